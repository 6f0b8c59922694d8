//! Damped harmonic oscillator driven by a memory-friction quantum Langevin
//! equation: solution functionals, covariance transfer and its Markov form.
//!
//! Covariances follow `V_ij = ⟨{R_i, R_j}⟩ − 2⟨R_i⟩⟨R_j⟩` for `R = (Q, P)`,
//! so the vacuum of frequency `Ω` is `diag(1/Ω, Ω)`.

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::kernel::{DeltaTrain, FreePropagator, KernelSpec, MemorySolver, Side, SignConvention};
use crate::linalg::{Mat2, SquareMatrix};
use crate::scalar::{re, Real};
use crate::spectral::SpectralSource;

/// Noise anticommutator matrix `ν_{kk′} = ⟨{ζ_k, ζ_{k′}}⟩` on global node indices.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseCovariance<R> {
    nu: SquareMatrix<R>,
}

impl<R: Real> NoiseCovariance<R> {
    pub fn new(nu: SquareMatrix<R>) -> Self {
        Self { nu }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(SquareMatrix::zeros(n))
    }

    pub fn matrix(&self) -> &SquareMatrix<R> {
        &self.nu
    }

    pub fn dim(&self) -> usize {
        self.nu.dim()
    }

    pub fn get(&self, k: usize, kp: usize) -> R {
        self.nu[(k, kp)]
    }

    /// White-noise counterpart: off-diagonal correlations removed.
    pub fn diagonal_only(&self) -> Self {
        let n = self.dim();
        let mut nu = SquareMatrix::zeros(n);
        for k in 0..n {
            nu[(k, k)] = self.nu[(k, k)];
        }
        Self::new(nu)
    }

    pub fn asymmetry(&self) -> R {
        let n = self.dim();
        let mut worst = R::zero();
        for k in 0..n {
            for kp in 0..k {
                worst = worst.max((self.nu[(k, kp)] - self.nu[(kp, k)]).abs());
            }
        }
        worst
    }
}

/// System frequency and Gaussian initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams<R> {
    pub omega: R,
    pub mean: [R; 2],
    pub covariance: Mat2<R>,
}

impl<R: Real> OscillatorParams<R> {
    /// Ground state of `P²/2 + Ω²Q²/2`.
    pub fn vacuum(omega: R) -> Result<Self> {
        Self::coherent(omega, R::zero(), R::zero())
    }

    /// Vacuum covariance displaced to `(q̄, p̄)`.
    pub fn coherent(omega: R, q: R, p: R) -> Result<Self> {
        if !(omega.is_finite() && omega > R::zero()) {
            return Err(invalid(
                "omega",
                format!("must be finite and > 0, got {omega}"),
            ));
        }
        let v = Mat2::new(R::one() / omega, R::zero(), R::zero(), omega);
        Self::new(omega, [q, p], v)
    }

    pub fn new(omega: R, mean: [R; 2], covariance: Mat2<R>) -> Result<Self> {
        if !(omega.is_finite() && omega > R::zero()) {
            return Err(invalid(
                "omega",
                format!("must be finite and > 0, got {omega}"),
            ));
        }
        let v = covariance.0;
        if (v[0][1] - v[1][0]).abs() > R::lit(1e-12) * covariance.max_abs().max(R::one()) {
            return Err(invalid("covariance", "must be symmetric"));
        }
        let i = Complex::new(R::zero(), R::one());
        let floor = (covariance.to_complex() + Mat2::<R>::symplectic().to_complex().scale(i))
            .hermitian_eigenvalues()[0];
        if floor < R::lit(-1e-10) {
            return Err(invalid(
                "covariance",
                format!("violates the uncertainty relation (min eigenvalue {floor})"),
            ));
        }
        Ok(Self {
            omega,
            mean,
            covariance,
        })
    }

    /// `(⟨Q²⟩, ⟨P²⟩, ⟨{Q, P}⟩)`.
    pub fn second_moments(&self) -> (R, R, R) {
        let [q, p] = self.mean;
        let v = self.covariance.0;
        let half = R::lit(0.5);
        (
            half * v[0][0] + q * q,
            half * v[1][1] + p * p,
            v[0][1] + R::lit(2.0) * q * p,
        )
    }
}

/// Smallest eigenvalue of `N + iΩ − iTΩTᵀ` for the symplectic form `Ω`.
fn physical_floor<R: Real>(n: &Mat2<R>, t: &Mat2<R>, extra: &Mat2<R>) -> R {
    let omega = Mat2::<R>::symplectic();
    let twist = omega - t.congruence(&omega);
    let i = Complex::new(R::zero(), R::one());
    let m = (*n + *extra).to_complex() + twist.to_complex().scale(i);
    m.hermitian_eigenvalues()[0]
}

/// Drift and noise matrices `(𝕋_t, ℕ_t)` of a Gaussian map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferPair<R> {
    pub t_mat: Mat2<R>,
    pub n_mat: Mat2<R>,
}

impl<R: Real> TransferPair<R> {
    pub fn evolve_mean(&self, mean: [R; 2]) -> [R; 2] {
        self.t_mat.mul_vec(mean)
    }

    /// `𝕍(t) = 𝕋𝕍(0)𝕋ᵀ + ℕ`.
    pub fn evolve_covariance(&self, v0: &Mat2<R>) -> Mat2<R> {
        self.t_mat.congruence(v0) + self.n_mat
    }

    /// `⟨Q²(t)⟩` for the given initial state.
    pub fn q_squared(&self, params: &OscillatorParams<R>) -> R {
        let v = self.evolve_covariance(&params.covariance);
        let q = self.evolve_mean(params.mean)[0];
        R::lit(0.5) * v.0[0][0] + q * q
    }

    /// Minimum eigenvalue of `ℕ + iΩ − i𝕋Ω𝕋ᵀ`; nonnegative for a physical map.
    pub fn uncertainty_floor(&self) -> R {
        physical_floor(&self.n_mat, &self.t_mat, &Mat2::zero())
    }

    pub fn n_asymmetry(&self) -> R {
        (self.n_mat.0[0][1] - self.n_mat.0[1][0]).abs()
    }
}

/// Smallest eigenvalue of `𝕍 + iΩ`; nonnegative for a valid covariance.
pub fn covariance_floor<R: Real>(v: &Mat2<R>) -> R {
    physical_floor(v, &Mat2::identity(), &Mat2::zero())
}

/// Friction kernel `Σ(t, t′) = −χχΓ(t − t′)` of a spectral source.
pub fn qle_kernel<R: Real>(spectral: &SpectralSource<R>) -> KernelSpec<R> {
    let source = spectral.clone();
    KernelSpec::stationary(move |dt: R| re(source.gamma(dt))).with_sign(SignConvention::Minus)
}

/// Base function of a solution functional `G[f]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseFunction {
    /// `cos(Ωt)`.
    Q,
    /// `sin(Ωt)/Ω`.
    P,
    /// `sin(Ω(t − t_k))Θ(t − t_k)/Ω` for global node `k`.
    Zeta(usize),
}

/// All solution functionals at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Functionals<R> {
    pub g_q: R,
    pub g_p: R,
    pub g_q_dot: R,
    pub g_p_dot: R,
    /// First global node with a noise functional.
    pub zeta_start: usize,
    pub g_zeta: Vec<R>,
    pub g_zeta_dot: Vec<R>,
}

/// Oscillator solver on a delta train (or a window of it).
#[derive(Debug)]
pub struct Oscillator<R: Real> {
    solver: MemorySolver<R>,
    omega: R,
}

impl<R: Real> Oscillator<R> {
    pub fn new(train: DeltaTrain<R>, kernel: KernelSpec<R>, omega: R) -> Result<Self> {
        let prop = FreePropagator::harmonic(omega)?;
        Ok(Self {
            solver: MemorySolver::new(train, kernel, prop)?,
            omega,
        })
    }

    /// Lorentz–Drude bath with optional arc-span restriction.
    pub fn lorentz_drude(
        train: DeltaTrain<R>,
        omega: R,
        kappa: R,
        lambda: R,
        span: Option<usize>,
    ) -> Result<Self> {
        let mut kernel = qle_kernel(&SpectralSource::lorentz_drude(kappa, lambda)?);
        if let Some(j) = span {
            kernel = kernel.restricted(j);
        }
        Self::new(train, kernel, omega)
    }

    pub fn solver(&self) -> &MemorySolver<R> {
        &self.solver
    }

    pub fn train(&self) -> &DeltaTrain<R> {
        self.solver.train()
    }

    pub fn omega(&self) -> R {
        self.omega
    }

    /// Map from the state at node `a` through the nodes up to `b`.
    pub fn interval(&self, a: usize, b: usize) -> Result<Self> {
        Ok(Self {
            solver: self.solver.interval(a, b)?,
            omega: self.omega,
        })
    }

    /// Map from the node at time `s` to time `t`.
    pub fn interval_between(&self, s: R, t: R) -> Result<Self> {
        Ok(Self {
            solver: self.solver.interval_between(s, t)?,
            omega: self.omega,
        })
    }

    fn base(&self, f: BaseFunction, t: R, side: Side) -> (R, R) {
        let w = self.omega;
        let tau = t - self.solver.origin();
        match f {
            BaseFunction::Q => ((w * tau).cos(), -w * (w * tau).sin()),
            BaseFunction::P => ((w * tau).sin() / w, (w * tau).cos()),
            BaseFunction::Zeta(k) => {
                let train = self.train();
                let tk = train.node_time(k);
                let active = train.active_count(t, side) > k;
                if train.active_count(t, Side::Right) <= k {
                    (R::zero(), R::zero())
                } else {
                    let d = t - tk;
                    let value = (w * d).sin() / w;
                    (value, if active { (w * d).cos() } else { R::zero() })
                }
            }
        }
    }

    fn node_values(&self, f: BaseFunction) -> Vec<R> {
        let train = self.train();
        (0..self.solver.len())
            .map(|m| {
                self.base(f, train.node_time(self.solver.start() + m), Side::Right)
                    .0
            })
            .collect()
    }

    fn weights(&self, t: R, side: Side) -> Result<(Vec<Complex<R>>, Vec<Complex<R>>)> {
        let w = self
            .solver
            .apply_resolvent_left(&self.solver.row(t, Side::Right)?);
        let wd = self
            .solver
            .apply_resolvent_left(&self.solver.row_derivative(t, side)?);
        Ok((w, wd))
    }

    /// `G[f](t) = f(t) + Σ K_{t,t_l}𝖪_{li} f(t_i)`.
    pub fn g_functional(&self, f: BaseFunction, t: R) -> Result<R> {
        let (w, _) = self.weights(t, Side::Right)?;
        let fv = self.node_values(f);
        Ok(self.base(f, t, Side::Right).0 + dot_re(&w, &fv))
    }

    /// Analytic `d/dt G[f](t)`; `side` picks the one-sided limit at node times.
    pub fn g_functional_dot(&self, f: BaseFunction, t: R, side: Side) -> Result<R> {
        let (_, wd) = self.weights(t, side)?;
        let fv = self.node_values(f);
        Ok(self.base(f, t, side).1 + dot_re(&wd, &fv))
    }

    /// `G_{f_Q}`, `G_{f_P}`, every noise functional, and their derivatives.
    pub fn functionals(&self, t: R, side: Side) -> Result<Functionals<R>> {
        let (w, wd) = self.weights(t, side)?;
        let s = self.solver.start();
        let len = self.solver.len();
        let fq = self.node_values(BaseFunction::Q);
        let fp = self.node_values(BaseFunction::P);
        let (q, qd) = self.base(BaseFunction::Q, t, side);
        let (p, pd) = self.base(BaseFunction::P, t, side);

        let zeta_start = self.solver.noise_start().max(s);
        let end = s + len;
        let mut g_zeta = Vec::with_capacity(end - zeta_start);
        let mut g_zeta_dot = Vec::with_capacity(end - zeta_start);
        for k in zeta_start..end {
            let (v, vd) = self.base(BaseFunction::Zeta(k), t, side);
            let (mut acc, mut acc_d) = (v, vd);
            for i in k + 1..end {
                let f = self.solver.green_lag(i - k);
                acc = acc + w[i - s].re * f;
                acc_d = acc_d + wd[i - s].re * f;
            }
            g_zeta.push(acc);
            g_zeta_dot.push(acc_d);
        }
        Ok(Functionals {
            g_q: q + dot_re(&w, &fq),
            g_p: p + dot_re(&w, &fp),
            g_q_dot: qd + dot_re(&wd, &fq),
            g_p_dot: pd + dot_re(&wd, &fp),
            zeta_start,
            g_zeta,
            g_zeta_dot,
        })
    }

    /// `𝒢(t) = G_{f_P}(t)`.
    pub fn script_g(&self, t: R) -> Result<R> {
        self.g_functional(BaseFunction::P, t)
    }

    /// `𝒢̇(t)`, taken as the limit from the left at node times.
    pub fn script_g_dot(&self, t: R) -> Result<R> {
        self.g_functional_dot(BaseFunction::P, t, Side::Left)
    }

    /// `(𝕋_t, ℕ_t)`.
    pub fn transfer_matrices(&self, t: R, nu: &NoiseCovariance<R>) -> Result<TransferPair<R>> {
        self.check_nu(nu)?;
        let f = self.functionals(t, Side::Right)?;
        let t_mat = Mat2::new(f.g_q, f.g_p, f.g_q_dot, f.g_p_dot);
        let h: Vec<[R; 2]> = f
            .g_zeta
            .iter()
            .zip(&f.g_zeta_dot)
            .map(|(&a, &b)| [a, b])
            .collect();
        Ok(TransferPair {
            t_mat,
            n_mat: noise_matrix(&h, f.zeta_start, nu),
        })
    }

    /// Symmetrized `½⟨{Q(t), Q(t′)}⟩`.
    pub fn two_time_qq(
        &self,
        t: R,
        t_prime: R,
        params: &OscillatorParams<R>,
        nu: &NoiseCovariance<R>,
    ) -> Result<R> {
        self.check_nu(nu)?;
        let a = self.functionals(t, Side::Right)?;
        let b = self.functionals(t_prime, Side::Right)?;
        let (q2, p2, qp) = params.second_moments();
        let half = R::lit(0.5);
        let mut noise = R::zero();
        for (i, &gi) in a.g_zeta.iter().enumerate() {
            for (j, &gj) in b.g_zeta.iter().enumerate() {
                noise = noise + gi * nu.get(a.zeta_start + i, b.zeta_start + j) * gj;
            }
        }
        Ok(a.g_q * b.g_q * q2
            + a.g_p * b.g_p * p2
            + half * (a.g_q * b.g_p + a.g_p * b.g_q) * qp
            + half * noise)
    }

    /// Composition residuals `‖𝕋_t − 𝕋_{t,s}𝕋_s‖` and `‖ℕ_t − 𝕋_{t,s}ℕ_s𝕋_{t,s}ᵀ − ℕ_{t,s}‖`.
    pub fn markov_check(&self, t: R, s: R, nu: &NoiseCovariance<R>) -> Result<(R, R)> {
        let whole = self.transfer_matrices(t, nu)?;
        let first = self.transfer_matrices(s, nu)?;
        let second = self.interval_between(s, t)?.transfer_matrices(t, nu)?;
        let t_res = (whole.t_mat - second.t_mat * first.t_mat).max_abs();
        let n_res = (whole.n_mat - second.t_mat.congruence(&first.n_mat) - second.n_mat).max_abs();
        Ok((t_res, n_res))
    }

    /// Nearest-neighbour transfer pair built from `F_t` and the `P_j` factors.
    pub fn markov_restricted_transfer(
        &self,
        t: R,
        nu: &NoiseCovariance<R>,
    ) -> Result<TransferPair<R>> {
        self.check_nu(nu)?;
        if !t.is_finite() || t < self.solver.origin() {
            return Err(invalid("t", "must be finite and not precede the origin"));
        }
        let train = self.train();
        let s = self.solver.start();
        let c = train
            .active_count(t, Side::Right)
            .clamp(s, s + self.solver.len());
        let origin = self.solver.origin();
        let w = self.omega;
        let d2 = train.spacing() * train.spacing();
        let local = |k: usize| train.node_time(k) - origin;
        let rotation = |tau: R| {
            Mat2::new(
                (w * tau).cos(),
                (w * tau).sin() / w,
                -w * (w * tau).sin(),
                (w * tau).cos(),
            )
        };

        // I + P_j for arcs j → j + 1 landing by time t.
        let factor = |j: usize| {
            let x = -(self.solver.sigma(j + 1, j).re) * d2;
            let (a, b) = (local(j), local(j + 1));
            let col = [-(w * b).sin() / w, (w * b).cos()];
            let row = [(w * a).cos(), (w * a).sin() / w];
            Mat2::identity()
                + Mat2::new(
                    col[0] * row[0],
                    col[0] * row[1],
                    col[1] * row[0],
                    col[1] * row[1],
                )
                .scale(x)
        };
        let f_t = rotation(t - origin);
        let mut chain = Mat2::identity();
        let zeta_start = self.solver.noise_start().max(s);
        let mut h = vec![[R::zero(); 2]; c.saturating_sub(zeta_start)];
        for k in (s..c).rev() {
            if k + 1 < c {
                chain = chain * factor(k);
            }
            if k >= zeta_start {
                let tau = local(k);
                let g = [-(w * tau).sin() / w, (w * tau).cos()];
                h[k - zeta_start] = (f_t * chain).mul_vec(g);
            }
        }
        Ok(TransferPair {
            t_mat: f_t * chain,
            n_mat: noise_matrix(&h, zeta_start, nu),
        })
    }

    fn check_nu(&self, nu: &NoiseCovariance<R>) -> Result<()> {
        if nu.dim() != self.train().len() {
            return Err(invalid(
                "nu",
                format!(
                    "expected {0}×{0}, got {1}×{1}",
                    self.train().len(),
                    nu.dim()
                ),
            ));
        }
        Ok(())
    }
}

fn dot_re<R: Real>(w: &[Complex<R>], f: &[R]) -> R {
    w.iter().zip(f).map(|(a, &b)| a.re * b).sum()
}

/// `Σ_{kk′} h_k ν_{kk′} h_{k′}ᵀ` over nodes `start..start + h.len()`.
fn noise_matrix<R: Real>(h: &[[R; 2]], start: usize, nu: &NoiseCovariance<R>) -> Mat2<R> {
    let mut acc = [[R::zero(); 2]; 2];
    for (i, hi) in h.iter().enumerate() {
        let mut row = [R::zero(); 2];
        for (j, hj) in h.iter().enumerate() {
            let v = nu.get(start + i, start + j);
            if v == R::zero() {
                continue;
            }
            row[0] = row[0] + v * hj[0];
            row[1] = row[1] + v * hj[1];
        }
        for a in 0..2 {
            for b in 0..2 {
                acc[a][b] = acc[a][b] + hi[a] * row[b];
            }
        }
    }
    Mat2(acc)
}

/// Convenience wrapper: `(𝕋_t, ℕ_t)` for a fresh oscillator.
pub fn transfer_matrices<R: Real>(
    t: R,
    train: &DeltaTrain<R>,
    kernel: &KernelSpec<R>,
    omega: R,
    nu: &NoiseCovariance<R>,
) -> Result<TransferPair<R>> {
    Oscillator::new(train.clone(), kernel.clone(), omega)?.transfer_matrices(t, nu)
}

/// Node-time check of `Q(t_l) = 𝒢̇(t_l)Q(0) + 𝒢(t_l)P(0) + Σ_k 𝒢(t_l − t_k)ζ_k`,
/// returning the largest deviation from the direct solve.
pub fn script_g_identity_residual<R: Real>(
    osc: &Oscillator<R>,
    q0: R,
    p0: R,
    zeta: &[R],
) -> Result<R> {
    let train = osc.train();
    let n = train.len();
    if zeta.len() != n {
        return Err(Error::InitialsLength {
            expected: n,
            got: zeta.len(),
        });
    }
    let noise = crate::kernel::NoiseSequence::new(zeta.iter().map(|&z| re(z)).collect());
    let direct = osc.solver().solve_nodes(&[re(q0), re(p0)], &noise)?;
    let mut lag_g = Vec::with_capacity(n);
    for m in 0..n {
        lag_g.push(if m == 0 {
            R::zero()
        } else {
            osc.script_g(train.node_time(m - 1))?
        });
    }
    let mut worst = R::zero();
    for l in 0..n {
        let t = train.node_time(l);
        let mut v = osc.script_g_dot(t)? * q0 + osc.script_g(t)? * p0;
        for k in 0..=l {
            v = v + lag_g[l - k] * zeta[k];
        }
        worst = worst.max((v - direct[l].re).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ld_osc(n: usize, span: Option<usize>) -> Oscillator<f64> {
        let train = DeltaTrain::uniform(1.0, n).unwrap();
        Oscillator::lorentz_drude(train, 1.0, 0.1, 2.0, span).unwrap()
    }

    #[test]
    fn free_oscillator_is_a_rotation() {
        let train = DeltaTrain::uniform(2.0, 8).unwrap();
        let osc = Oscillator::new(train, KernelSpec::zero(), 1.7).unwrap();
        let nu = NoiseCovariance::zeros(8);
        let t = 1.3;
        let pair = osc.transfer_matrices(t, &nu).unwrap();
        let w: f64 = 1.7;
        let expect = Mat2::new(
            (w * t).cos(),
            (w * t).sin() / w,
            -w * (w * t).sin(),
            (w * t).cos(),
        );
        assert!((pair.t_mat - expect).max_abs() < 1e-14);
        assert!((pair.t_mat.det() - 1.0).abs() < 1e-14);
        assert_eq!(pair.n_mat, Mat2::zero());
    }

    #[test]
    fn origin_values() {
        let osc = ld_osc(10, None);
        let nu = NoiseCovariance::zeros(10);
        let pair = osc.transfer_matrices(0.0, &nu).unwrap();
        assert_eq!(pair.t_mat, Mat2::identity());
        assert_eq!(pair.n_mat, Mat2::zero());
        assert_eq!(osc.script_g(0.0).unwrap(), 0.0);
        assert_eq!(osc.script_g_dot(0.0).unwrap(), 1.0);
    }

    #[test]
    fn analytic_derivative_matches_finite_difference_between_nodes() {
        let osc = ld_osc(12, None);
        let t = 0.537;
        let h = 1e-6;
        for f in [BaseFunction::Q, BaseFunction::P, BaseFunction::Zeta(3)] {
            let fd = (osc.g_functional(f, t + h).unwrap() - osc.g_functional(f, t - h).unwrap())
                / (2.0 * h);
            let an = osc.g_functional_dot(f, t, Side::Right).unwrap();
            assert!((fd - an).abs() < 1e-8, "{f:?}: {fd} vs {an}");
        }
    }

    #[test]
    fn zeta_functionals_match_individual_evaluation() {
        let osc = ld_osc(9, None);
        let t = osc.train().node_time(6);
        let all = osc.functionals(t, Side::Right).unwrap();
        for k in 0..9 {
            let one = osc.g_functional(BaseFunction::Zeta(k), t).unwrap();
            assert!((one - all.g_zeta[k]).abs() < 1e-15);
            if k > 6 {
                assert_eq!(all.g_zeta[k], 0.0);
            }
        }
    }

    #[test]
    fn vacuum_and_coherent_moments() {
        let p = OscillatorParams::coherent(2.0f64, 1.0, 0.5).unwrap();
        let (q2, p2, qp) = p.second_moments();
        assert!((q2 - (0.25 + 1.0)).abs() < 1e-15);
        assert!((p2 - (1.0 + 0.25)).abs() < 1e-15);
        assert!((qp - 1.0).abs() < 1e-15);
        assert!(OscillatorParams::new(1.0, [0.0; 2], Mat2::new(0.5, 0.0, 0.0, 0.5)).is_err());
    }

    #[test]
    fn two_time_qq_at_origin() {
        let osc = ld_osc(10, None);
        let params = OscillatorParams::coherent(1.0, 1.0, 0.0).unwrap();
        let nu = NoiseCovariance::zeros(10);
        let v = osc.two_time_qq(0.0, 0.0, &params, &nu).unwrap();
        assert!((v - 1.5).abs() < 1e-15);
    }

    #[test]
    fn restricted_transfer_agrees_with_general_solver() {
        let osc = ld_osc(15, Some(1));
        let mut nu = NoiseCovariance::zeros(15);
        for k in 0..15 {
            nu = {
                let mut m = nu.matrix().clone();
                m[(k, k)] = 0.01 * (1.0 + k as f64);
                NoiseCovariance::new(m)
            };
        }
        for &t in &[0.2, 0.47, 1.0] {
            let a = osc.transfer_matrices(t, &nu).unwrap();
            let b = osc.markov_restricted_transfer(t, &nu).unwrap();
            assert!((a.t_mat - b.t_mat).max_abs() < 1e-12, "t={t}");
            assert!((a.n_mat - b.n_mat).max_abs() < 1e-12, "t={t}");
        }
    }
}
