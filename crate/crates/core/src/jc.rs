//! Qubit amplitude damping in a Lorentzian reservoir (damped Jaynes–Cummings
//! model) solved on a delta train.

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::kernel::{
    sinhc, DeltaTrain, FreePropagator, KernelSpec, MemorySolver, NoiseSequence, Side,
};
use crate::linalg::Mat2;
use crate::scalar::{czero, re, Real};

/// Tolerated overshoot of `|𝒯|` above 1 before the channel is rejected.
pub const PHYSICALITY_GUARD: f64 = 1e-6;

/// Coupling, reservoir width and initial qubit amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JcParams<R> {
    pub kappa: R,
    pub lambda: R,
    pub alpha1_0: Complex<R>,
    pub alpha0: Complex<R>,
}

impl<R: Real> JcParams<R> {
    /// Qubit starting in the excited state.
    pub fn new(kappa: R, lambda: R) -> Result<Self> {
        Self::with_state(kappa, lambda, czero(), re(R::one()))
    }

    pub fn with_state(
        kappa: R,
        lambda: R,
        alpha0: Complex<R>,
        alpha1_0: Complex<R>,
    ) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= R::zero()) {
            return Err(invalid(
                "kappa",
                format!("must be finite and ≥ 0, got {kappa}"),
            ));
        }
        if !(lambda.is_finite() && lambda > R::zero()) {
            return Err(invalid(
                "lambda",
                format!("must be finite and > 0, got {lambda}"),
            ));
        }
        let norm = alpha0.norm_sqr() + alpha1_0.norm_sqr();
        if (norm - R::one()).abs() > R::lit(1e-12) {
            return Err(invalid(
                "alpha",
                format!("|α_0|² + |α_1(0)|² = {norm}, expected 1"),
            ));
        }
        Ok(Self {
            kappa,
            lambda,
            alpha1_0,
            alpha0,
        })
    }
}

/// `Γ(t − t′) = (κΛ/2)e^{−Λ(t − t′)}`.
pub fn jc_kernel<R: Real>(params: &JcParams<R>) -> KernelSpec<R> {
    let (kappa, lambda) = (params.kappa, params.lambda);
    if kappa == R::zero() {
        return KernelSpec::zero();
    }
    let half = R::lit(0.5);
    KernelSpec::stationary(move |dt: R| re(kappa * lambda * half * (-lambda * dt).exp()))
}

/// Transfer function `𝒯(t)` with `α_1(t) = 𝒯(t)α_1(0)`.
#[derive(Debug)]
pub struct TransferFunction<R: Real> {
    solver: MemorySolver<R>,
    nodes: Vec<Complex<R>>,
}

impl<R: Real> TransferFunction<R> {
    fn from_solver(solver: MemorySolver<R>) -> Result<Self> {
        let noise = NoiseSequence::zeros(solver.train().len());
        let nodes = solver.solve_nodes(&[re(R::one())], &noise)?;
        Ok(Self { solver, nodes })
    }

    /// `𝒯(t) = 1 + Σ K_{t,t_l}𝖪_{li}`.
    pub fn value(&self, t: R) -> Result<Complex<R>> {
        let row = self.solver.row(t, Side::Right)?;
        Ok(row
            .iter()
            .zip(&self.nodes)
            .fold(re(R::one()), |acc, (r, x)| acc + r * x))
    }

    /// `𝒯(t_k)` at every node.
    pub fn node_values(&self) -> &[Complex<R>] {
        &self.nodes
    }

    pub fn solver(&self) -> &MemorySolver<R> {
        &self.solver
    }

    /// `𝒯(t, t_a)` for a node time `t_a ≤ t`.
    pub fn interval(&self, t: R, t_a: R) -> Result<Complex<R>> {
        let window = self.solver.interval_between(t_a, t)?;
        TransferFunction::from_solver(window)?.value(t)
    }
}

fn jc_solver<R: Real>(
    train: &DeltaTrain<R>,
    params: &JcParams<R>,
    span: Option<usize>,
) -> Result<MemorySolver<R>> {
    let mut kernel = jc_kernel(params);
    if let Some(j) = span {
        kernel = kernel.restricted(j);
    }
    MemorySolver::new(train.clone(), kernel, FreePropagator::unit())
}

/// `𝒯` for the full kernel.
pub fn transfer<R: Real>(
    train: &DeltaTrain<R>,
    params: &JcParams<R>,
) -> Result<TransferFunction<R>> {
    transfer_restricted(train, params, None)
}

/// `𝒯` with arcs longer than `span` removed.
pub fn transfer_restricted<R: Real>(
    train: &DeltaTrain<R>,
    params: &JcParams<R>,
    span: Option<usize>,
) -> Result<TransferFunction<R>> {
    TransferFunction::from_solver(jc_solver(train, params, span)?)
}

/// `𝒯(t, t_a)`, the map from the node at `t_a` to `t`.
pub fn transfer_interval<R: Real>(
    t: R,
    t_a: R,
    train: &DeltaTrain<R>,
    params: &JcParams<R>,
    span: Option<usize>,
) -> Result<Complex<R>> {
    if t_a == R::zero() {
        return transfer_restricted(train, params, span)?.value(t);
    }
    let solver = jc_solver(train, params, span)?;
    let window = solver.interval_between(t_a, t)?;
    TransferFunction::from_solver(window)?.value(t)
}

/// Closed-form amplitude for constant coupling,
/// `e^{−Λt/2}[cosh(Dt/2) + (Λ/D) sinh(Dt/2)]`, `D = √(Λ² − 2κΛ)`.
pub fn exact_amplitude<R: Real>(t: R, kappa: R, lambda: R) -> Complex<R> {
    let half = R::lit(0.5);
    let d = re(lambda * lambda - R::lit(2.0) * kappa * lambda).sqrt();
    let x = d * re(half * t);
    let damp = (-lambda * t * half).exp();
    (x.cosh() + re(lambda * t * half) * sinhc(x)) * damp
}

/// Amplitude-damping Kraus pair `E_1 = diag(𝒯, 1)`, `E_2 = √(1 − |𝒯|²)|g⟩⟨e|`.
///
/// Basis order is `(e, g)`. Overshoots `|𝒯| ≤ 1 + PHYSICALITY_GUARD` are
/// projected back to the unit disk; larger ones are rejected unless `clamp`.
pub fn kraus_operators<R: Real>(t_value: Complex<R>, clamp: bool) -> Result<[Mat2<Complex<R>>; 2]> {
    let mag = t_value.norm();
    if !mag.is_finite() {
        return Err(Error::Physicality {
            magnitude: mag.as_f64(),
        });
    }
    if mag > R::one() + R::lit(PHYSICALITY_GUARD) && !clamp {
        return Err(Error::Physicality {
            magnitude: mag.as_f64(),
        });
    }
    let t = if mag > R::one() {
        t_value / mag
    } else {
        t_value
    };
    let z = czero();
    let one = re(R::one());
    let e1 = Mat2::new(t, z, z, one);
    let e2 = Mat2::new(z, z, re((R::one() - t.norm_sqr()).max(R::zero()).sqrt()), z);
    Ok([e1, e2])
}

/// `Σ_i E_i ρ E_i†`.
pub fn kraus_channel<R: Real>(
    t_value: Complex<R>,
    rho0: &Mat2<Complex<R>>,
) -> Result<Mat2<Complex<R>>> {
    Ok(apply_kraus(&kraus_operators(t_value, false)?, rho0))
}

pub fn apply_kraus<R: Real>(ops: &[Mat2<Complex<R>>], rho: &Mat2<Complex<R>>) -> Mat2<Complex<R>> {
    ops.iter()
        .fold(Mat2::zero(), |acc, e| acc + *e * *rho * e.adjoint())
}

/// `Σ_i E_i†E_i`, the identity for a trace-preserving channel.
pub fn kraus_completeness<R: Real>(ops: &[Mat2<Complex<R>>]) -> Mat2<Complex<R>> {
    ops.iter()
        .fold(Mat2::zero(), |acc, e| acc + e.adjoint() * *e)
}

fn node_amplitudes<R: Real>(
    train: &DeltaTrain<R>,
    params: &JcParams<R>,
    span: Option<usize>,
) -> Result<(MemorySolver<R>, Vec<Complex<R>>)> {
    let solver = jc_solver(train, params, span)?;
    let noise = NoiseSequence::zeros(train.len());
    let alpha = solver.solve_nodes(&[params.alpha1_0], &noise)?;
    Ok((solver, alpha))
}

/// Decay rates `γ_k = 2δ Re[Σ_{j≤k} Σ(t_{k+1}, t_j)α_1(t_j) / α_1(t_k)]` for `k = 1..N−1`.
///
/// Equal to `−2 Re[(α_{k+1} − α_k)/(δα_k)]` on the train.
pub fn decay_rates<R: Real>(
    train: &DeltaTrain<R>,
    params: &JcParams<R>,
    span: Option<usize>,
) -> Result<Vec<R>> {
    let (solver, alpha) = node_amplitudes(train, params, span)?;
    let delta = train.spacing();
    let n = train.len();
    (0..n.saturating_sub(1))
        .map(|k| {
            if alpha[k] == czero() {
                return Err(Error::Pole { node: k });
            }
            let s = (0..=k).fold(czero::<R>(), |acc, j| {
                acc + solver.sigma(k + 1, j) * alpha[j]
            });
            Ok(R::lit(2.0) * delta * (s / alpha[k]).re)
        })
        .collect()
}

/// `−2 Re[(α_{k+1} − α_k)/(δα_k)]`.
pub fn decay_rates_finite_difference<R: Real>(
    train: &DeltaTrain<R>,
    params: &JcParams<R>,
    span: Option<usize>,
) -> Result<Vec<R>> {
    let (_, alpha) = node_amplitudes(train, params, span)?;
    let delta = train.spacing();
    alpha
        .windows(2)
        .enumerate()
        .map(|(k, w)| {
            if w[0] == czero() {
                return Err(Error::Pole { node: k });
            }
            Ok(-R::lit(2.0) * ((w[1] - w[0]) / (w[0] * delta)).re)
        })
        .collect()
}

/// RHP measure `𝓘 = −δ Σ_k min(0, γ_k)`.
///
/// [`decay_rates`] yields `γ_1 … γ_{N−1}`; the last node has no forward
/// difference and never enters the sum.
pub fn rhp_measure<R: Real>(gammas: &[R], delta: R) -> R {
    delta * gammas.iter().map(|&g| (-g).max(R::zero())).sum::<R>()
}

/// Spectrum of the Choi matrix of `𝟙 + δℒ_t` and the derived `g` values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChoiSpectrum<R> {
    /// `λ_0, λ_1, λ_+, λ_−`.
    pub eigenvalues: [R; 4],
    /// `(Σ|λ| − 1)/δ`.
    pub g_exact: R,
    /// `−min(0, γ)`.
    pub g_leading: R,
}

/// The `4 × 4` Choi matrix for decay rate `γ` and `h = |α̇_1|²`.
pub fn choi_matrix<R: Real>(gamma: R, h: R, delta: R) -> [[R; 4]; 4] {
    let half = R::lit(0.5);
    let z = R::zero();
    let d2h = delta * delta * h;
    let a = R::one() - delta * gamma + d2h;
    let b = R::one() - delta * gamma * half;
    let c = delta * gamma - d2h;
    let m = [
        [z, d2h, z, z],
        [z, a, b, z],
        [z, b, R::one(), -d2h],
        [z, z, z, c],
    ];
    m.map(|row| row.map(|x| x * half))
}

pub fn choi_spectrum<R: Real>(gamma: R, h: R, delta: R) -> Result<ChoiSpectrum<R>> {
    if !(delta.is_finite() && delta > R::zero()) {
        return Err(invalid(
            "delta",
            format!("must be finite and > 0, got {delta}"),
        ));
    }
    if !(gamma.is_finite() && h.is_finite() && h >= R::zero()) {
        return Err(invalid("h", "γ must be finite and h finite and ≥ 0"));
    }
    let (two, four) = (R::lit(2.0), R::lit(4.0));
    let x = gamma - delta * h;
    let l1 = delta / two * x;
    let disc = four - four * delta * gamma + two * delta.powi(2) * gamma.powi(2)
        - two * delta.powi(3) * h * gamma
        + delta.powi(4) * h.powi(2);
    let mid = (two - delta * x) / four;
    let root = disc.max(R::zero()).sqrt() / four;
    let eig = [R::zero(), l1, mid + root, mid - root];
    let trace_norm: R = eig.iter().map(|v| v.abs()).sum();
    Ok(ChoiSpectrum {
        eigenvalues: eig,
        g_exact: (trace_norm - R::one()) / delta,
        g_leading: -gamma.min(R::zero()),
    })
}
