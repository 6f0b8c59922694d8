//! Delta-train discretization of a linear integro-differential equation with
//! a two-time memory kernel, and its exact solution through the nilpotent
//! memory matrix.
//!
//! Nodes are zero-based in code: node `k` sits at `t = (k + 1)·T/N`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::linalg::SquareMatrix;
use crate::scalar::{czero, is_finite_c, re, Real};

/// Which one-sided limit a quantity takes when `t` coincides with a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Side {
    /// Kick at the node not yet applied.
    Left,
    /// Kick at the node included (`Θ(0) = 1`).
    #[default]
    Right,
}

/// `N` weighted impulses at `t_k = k·T/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaTrain<R> {
    duration: R,
    amplitudes: Vec<R>,
}

impl<R: Real> DeltaTrain<R> {
    pub fn new(duration: R, amplitudes: Vec<R>) -> Result<Self> {
        if !(duration.is_finite() && duration > R::zero()) {
            return Err(invalid(
                "duration",
                format!("must be finite and > 0, got {duration}"),
            ));
        }
        if amplitudes.is_empty() {
            return Err(invalid("count", "a delta train needs at least one node"));
        }
        if let Some(k) = amplitudes.iter().position(|a| !a.is_finite()) {
            return Err(invalid(
                "amplitudes",
                format!("non-finite amplitude at node {k}"),
            ));
        }
        Ok(Self {
            duration,
            amplitudes,
        })
    }

    /// Constant switching, `χ_k = 1`.
    pub fn uniform(duration: R, count: usize) -> Result<Self> {
        Self::new(duration, vec![R::one(); count])
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn duration(&self) -> R {
        self.duration
    }

    /// Node spacing `δ = T/N`.
    pub fn spacing(&self) -> R {
        self.duration / R::of(self.len())
    }

    pub fn node_time(&self, k: usize) -> R {
        self.duration * R::of(k + 1) / R::of(self.len())
    }

    pub fn node_times(&self) -> Vec<R> {
        (0..self.len()).map(|k| self.node_time(k)).collect()
    }

    pub fn amplitude(&self, k: usize) -> R {
        self.amplitudes[k]
    }

    pub fn amplitudes(&self) -> &[R] {
        &self.amplitudes
    }

    /// Index of the node at time `t`, if `t` is a node time up to rounding.
    pub fn node_at(&self, t: R) -> Option<usize> {
        match self.snap(t) {
            Snap::Node(r) if r >= 1 && r <= self.len() => Some(r - 1),
            _ => None,
        }
    }

    /// Number of nodes whose kick has happened by time `t`.
    pub fn active_count(&self, t: R, side: Side) -> usize {
        let n = self.len();
        match self.snap(t) {
            Snap::Node(r) => match side {
                Side::Right => r.min(n),
                Side::Left => r.saturating_sub(1).min(n),
            },
            Snap::Between(r) => r.min(n),
            Snap::Before => 0,
        }
    }

    fn snap(&self, t: R) -> Snap {
        let x = t / self.spacing();
        if x < R::zero() {
            return if x.abs() <= R::lit(64.0) * R::epsilon() {
                Snap::Node(0)
            } else {
                Snap::Before
            };
        }
        let r = x.round();
        let tol = R::lit(64.0) * R::epsilon() * x.abs().max(R::one());
        let idx = |v: R| v.to_usize().unwrap_or(usize::MAX);
        if (x - r).abs() <= tol {
            Snap::Node(idx(r))
        } else {
            Snap::Between(idx(x.floor()))
        }
    }
}

enum Snap {
    Before,
    /// Exactly at `r·δ`; `r = 0` is the origin.
    Node(usize),
    /// Strictly between `r·δ` and `(r + 1)·δ`.
    Between(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Green<R> {
    /// `scale·e^{rate·t}`.
    Exponential { rate: R, scale: R },
    /// `sin(ωt)/(a_2 ω)`.
    Oscillator { omega: R, inv_lead: R },
    /// `Re[e^{ct} t sinhc(ht)]/a_2` for roots `c ± h`.
    Roots {
        c: Complex<R>,
        h: Complex<R>,
        inv_lead: R,
    },
}

/// Constant-coefficient operator `p(∂_t) = Σ a_j ∂_t^j` of order 1 or 2 and
/// its retarded Green function `G_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreePropagator<R> {
    coefficients: Vec<R>,
    green: Green<R>,
}

impl<R: Real> FreePropagator<R> {
    /// `∂_t`, with `G_0 = 1`.
    pub fn unit() -> Self {
        Self::first_order(R::zero(), R::one()).expect("unit operator is valid")
    }

    /// `a_1 ∂_t + a_0`.
    pub fn first_order(a0: R, a1: R) -> Result<Self> {
        check_coefficients(&[a0, a1])?;
        Ok(Self {
            coefficients: vec![a0, a1],
            green: Green::Exponential {
                rate: -a0 / a1,
                scale: R::one() / a1,
            },
        })
    }

    /// `∂_t² + Ω²`, with `G_0 = sin(Ωt)/Ω`.
    pub fn harmonic(omega: R) -> Result<Self> {
        if !(omega.is_finite() && omega > R::zero()) {
            return Err(invalid(
                "omega",
                format!("must be finite and > 0, got {omega}"),
            ));
        }
        Self::second_order(omega * omega, R::zero(), R::one())
    }

    /// `a_2 ∂_t² + a_1 ∂_t + a_0`.
    pub fn second_order(a0: R, a1: R, a2: R) -> Result<Self> {
        check_coefficients(&[a0, a1, a2])?;
        let green = if a1 == R::zero() && a0 / a2 > R::zero() {
            Green::Oscillator {
                omega: (a0 / a2).sqrt(),
                inv_lead: R::one() / a2,
            }
        } else {
            let two = R::lit(2.0);
            let disc = re(a1 * a1 - R::lit(4.0) * a2 * a0);
            Green::Roots {
                c: re(-a1 / (two * a2)),
                h: disc.sqrt() / re(two * a2),
                inv_lead: R::one() / a2,
            }
        };
        Ok(Self {
            coefficients: vec![a0, a1, a2],
            green,
        })
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `a_0, …, a_n`.
    pub fn coefficients(&self) -> &[R] {
        &self.coefficients
    }

    /// `G_0(t)` for `t ≥ 0`; callers apply the step function.
    pub fn green0(&self, t: R) -> R {
        match self.green {
            Green::Exponential { rate, scale } => {
                if rate == R::zero() {
                    scale
                } else {
                    scale * (rate * t).exp()
                }
            }
            Green::Oscillator { omega, inv_lead } => (omega * t).sin() / omega * inv_lead,
            Green::Roots { c, h, inv_lead } => {
                let e = (c * re(t)).exp();
                (e * re(t) * sinhc(h * re(t))).re * inv_lead
            }
        }
    }

    pub fn green0_derivative(&self, t: R) -> R {
        match self.green {
            Green::Exponential { rate, scale } => {
                if rate == R::zero() {
                    R::zero()
                } else {
                    rate * scale * (rate * t).exp()
                }
            }
            Green::Oscillator { omega, inv_lead } => (omega * t).cos() * inv_lead,
            Green::Roots { c, h, inv_lead } => {
                let ht = h * re(t);
                let e = (c * re(t)).exp();
                (e * (c * re(t) * sinhc(ht) + ht.cosh())).re * inv_lead
            }
        }
    }

    /// `G_0(t + δ)/G_0(t)` when it is independent of `t` (first-order operators).
    fn lag_ratio(&self, delta: R) -> Option<R> {
        match self.green {
            Green::Exponential { rate, .. } if rate == R::zero() => Some(R::one()),
            Green::Exponential { rate, .. } => Some((rate * delta).exp()),
            _ => None,
        }
    }

    fn green0_second_derivative(&self, t: R) -> R {
        let a = &self.coefficients;
        match self.order() {
            1 => {
                let rate = -a[0] / a[1];
                rate * self.green0_derivative(t)
            }
            _ => -(a[1] * self.green0_derivative(t) + a[0] * self.green0(t)) / a[2],
        }
    }

    /// Homogeneous solution `𝒪⁽⁰⁾(t)` from `initials[j] = d^j𝒪/dt^j` at 0.
    pub fn free_solution(&self, t: R, initials: &[Complex<R>]) -> Result<Complex<R>> {
        self.check_initials(initials)?;
        let a = &self.coefficients;
        let g = self.green0(t);
        Ok(match self.order() {
            1 => initials[0] * (a[1] * g),
            _ => {
                let gd = self.green0_derivative(t);
                initials[0] * (a[2] * gd + a[1] * g) + initials[1] * (a[2] * g)
            }
        })
    }

    /// Time derivative of [`free_solution`](Self::free_solution).
    pub fn free_solution_derivative(&self, t: R, initials: &[Complex<R>]) -> Result<Complex<R>> {
        self.check_initials(initials)?;
        let a = &self.coefficients;
        let gd = self.green0_derivative(t);
        Ok(match self.order() {
            1 => initials[0] * (a[1] * gd),
            _ => {
                let gdd = self.green0_second_derivative(t);
                initials[0] * (a[2] * gdd + a[1] * gd) + initials[1] * (a[2] * gd)
            }
        })
    }

    fn check_initials(&self, initials: &[Complex<R>]) -> Result<()> {
        if initials.len() != self.order() {
            return Err(Error::InitialsLength {
                expected: self.order(),
                got: initials.len(),
            });
        }
        Ok(())
    }
}

fn check_coefficients<R: Real>(a: &[R]) -> Result<()> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err(invalid("coefficients", "must be finite"));
    }
    if a.last().is_some_and(|x| *x == R::zero()) {
        return Err(invalid(
            "coefficients",
            "leading coefficient must be nonzero",
        ));
    }
    Ok(())
}

/// `sinh(z)/z` with its Taylor series near the origin.
pub(crate) fn sinhc<R: Real>(z: Complex<R>) -> Complex<R> {
    if z.norm() < R::lit(1e-3) {
        let z2 = z * z;
        re::<R>(R::one()) + z2 / re(R::lit(6.0)) + z2 * z2 / re(R::lit(120.0))
    } else {
        z.sinh() / z
    }
}

/// Overall sign multiplying `χχΓ` in the effective kernel `Σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignConvention {
    #[default]
    Plus,
    Minus,
}

impl SignConvention {
    pub fn factor<R: Real>(self) -> R {
        match self {
            SignConvention::Plus => R::one(),
            SignConvention::Minus => -R::one(),
        }
    }
}

type TwoTimeFn<R> = Arc<dyn Fn(R, R) -> Complex<R> + Send + Sync>;
type LagFn<R> = Arc<dyn Fn(R) -> Complex<R> + Send + Sync>;

#[derive(Clone)]
enum GammaFn<R> {
    Zero,
    TwoTime(TwoTimeFn<R>),
    Stationary(LagFn<R>),
}

/// Two-time kernel `Γ(t, t′)` plus the metadata that turns it into the
/// effective kernel `Σ(t_k, t_l) = ±χ_kχ_lΓ(t_k, t_l)`.
///
/// `Σ` vanishes on and above the diagonal (`k ≤ l`), and beyond the maximal
/// arc span when a restriction is set.
#[derive(Clone)]
pub struct KernelSpec<R> {
    gamma: GammaFn<R>,
    max_arc_span: Option<usize>,
    sign: SignConvention,
}

impl<R: Real> fmt::Debug for KernelSpec<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.gamma {
            GammaFn::Zero => "zero",
            GammaFn::TwoTime(_) => "two-time",
            GammaFn::Stationary(_) => "stationary",
        };
        f.debug_struct("KernelSpec")
            .field("gamma", &kind)
            .field("max_arc_span", &self.max_arc_span)
            .field("sign", &self.sign)
            .finish()
    }
}

impl<R: Real> KernelSpec<R> {
    pub fn zero() -> Self {
        Self {
            gamma: GammaFn::Zero,
            max_arc_span: None,
            sign: SignConvention::Plus,
        }
    }

    /// General nonstationary kernel `Γ(t, t′)`.
    pub fn two_time(gamma: impl Fn(R, R) -> Complex<R> + Send + Sync + 'static) -> Self {
        Self {
            gamma: GammaFn::TwoTime(Arc::new(gamma)),
            ..Self::zero()
        }
    }

    /// Kernel depending only on the lag, `Γ(t, t′) = γ(t − t′)`.
    pub fn stationary(gamma: impl Fn(R) -> Complex<R> + Send + Sync + 'static) -> Self {
        Self {
            gamma: GammaFn::Stationary(Arc::new(gamma)),
            ..Self::zero()
        }
    }

    pub fn with_sign(mut self, sign: SignConvention) -> Self {
        self.sign = sign;
        self
    }

    /// Keeps only arcs `l → k` with `k − l ≤ j`.
    pub fn restricted(mut self, j: usize) -> Self {
        self.max_arc_span = Some(j);
        self
    }

    pub fn unrestricted(mut self) -> Self {
        self.max_arc_span = None;
        self
    }

    pub fn max_arc_span(&self) -> Option<usize> {
        self.max_arc_span
    }

    pub fn sign(&self) -> SignConvention {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.gamma, GammaFn::Zero)
    }

    /// Raw `Γ(t, t′)` without sign, amplitudes or diagonal policy.
    pub fn gamma(&self, t: R, t_prime: R) -> Complex<R> {
        match &self.gamma {
            GammaFn::Zero => czero(),
            GammaFn::TwoTime(g) => g(t, t_prime),
            GammaFn::Stationary(g) => g(t - t_prime),
        }
    }

    fn admits(&self, k: usize, l: usize) -> bool {
        k > l && self.max_arc_span.is_none_or(|j| k - l <= j)
    }

    /// Effective `Σ(t_k, t_l)` on node indices.
    pub fn effective(&self, train: &DeltaTrain<R>, k: usize, l: usize) -> Result<Complex<R>> {
        if !self.admits(k, l) || self.is_zero() {
            return Ok(czero());
        }
        let g = self.gamma(train.node_time(k), train.node_time(l));
        if !is_finite_c(g) {
            return Err(Error::KernelEvaluation { k, l });
        }
        Ok(g * (self.sign.factor::<R>() * train.amplitude(k) * train.amplitude(l)))
    }

    fn validate(&self) -> Result<()> {
        if self.max_arc_span == Some(0) {
            return Err(invalid("max_arc_span", "must be a positive integer"));
        }
        Ok(())
    }
}

/// Tabulated effective kernel on node pairs, sign and amplitudes included.
enum SigmaTable<R> {
    Zero,
    /// `sign·γ(mδ)` per lag `m`.
    Lagged {
        by_lag: Vec<Complex<R>>,
        chi: Vec<R>,
    },
    /// Packed strict lower triangle, row `k` holding columns `0..k`.
    Dense(Vec<Complex<R>>),
}

impl<R: Real> SigmaTable<R> {
    fn build(train: &DeltaTrain<R>, kernel: &KernelSpec<R>) -> Result<Self> {
        let n = train.len();
        let sign = kernel.sign.factor::<R>();
        let span = kernel.max_arc_span.unwrap_or(n);
        match &kernel.gamma {
            GammaFn::Zero => Ok(SigmaTable::Zero),
            GammaFn::Stationary(g) => {
                let delta = train.spacing();
                let mut by_lag = vec![czero(); n];
                for (m, slot) in by_lag.iter_mut().enumerate().skip(1).take(span) {
                    let v = g(delta * R::of(m));
                    if !is_finite_c(v) {
                        return Err(Error::KernelEvaluation { k: m, l: 0 });
                    }
                    *slot = v * sign;
                }
                Ok(SigmaTable::Lagged {
                    by_lag,
                    chi: train.amplitudes().to_vec(),
                })
            }
            GammaFn::TwoTime(g) => {
                let rows: Vec<Result<Vec<Complex<R>>>> = (0..n)
                    .into_par_iter()
                    .map(|k| {
                        let tk = train.node_time(k);
                        (0..k)
                            .map(|l| {
                                if k - l > span {
                                    return Ok(czero());
                                }
                                let v = g(tk, train.node_time(l));
                                if !is_finite_c(v) {
                                    return Err(Error::KernelEvaluation { k, l });
                                }
                                Ok(v * (sign * train.amplitude(k) * train.amplitude(l)))
                            })
                            .collect()
                    })
                    .collect();
                let mut packed = Vec::with_capacity(n * n.saturating_sub(1) / 2);
                for row in rows {
                    packed.extend(row?);
                }
                Ok(SigmaTable::Dense(packed))
            }
        }
    }

    /// `Σ(k, l)` for `k > l` within the span restriction.
    #[inline]
    fn get(&self, k: usize, l: usize) -> Complex<R> {
        match self {
            SigmaTable::Zero => czero(),
            SigmaTable::Lagged { by_lag, chi } => by_lag[k - l] * (chi[k] * chi[l]),
            SigmaTable::Dense(p) => p[k * (k - 1) / 2 + l],
        }
    }
}

/// Strictly lower triangular `K` and its resolvent `𝖪 = (I − K)⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryMatrix<R> {
    k: SquareMatrix<Complex<R>>,
    resolvent: SquareMatrix<Complex<R>>,
}

impl<R: Real> MemoryMatrix<R> {
    fn from_k(k: SquareMatrix<Complex<R>>) -> Self {
        let n = k.dim();
        let mut x = SquareMatrix::<Complex<R>>::identity(n);
        for l in 1..n {
            let mut row = vec![czero::<R>(); n];
            row[l] = re(R::one());
            for m in 0..l {
                let klm = k[(l, m)];
                if klm == czero() {
                    continue;
                }
                for (j, v) in x.row(m).iter().enumerate().take(m + 1) {
                    row[j] = row[j] + klm * v;
                }
            }
            x.row_mut(l).copy_from_slice(&row);
        }
        Self { k, resolvent: x }
    }

    pub fn k(&self) -> &SquareMatrix<Complex<R>> {
        &self.k
    }

    pub fn resolvent(&self) -> &SquareMatrix<Complex<R>> {
        &self.resolvent
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    /// `Kⁿ` by repeated multiplication.
    pub fn k_power(&self, n: usize) -> SquareMatrix<Complex<R>> {
        let mut p = SquareMatrix::identity(self.dim());
        for _ in 0..n {
            p = p.matmul(&self.k);
        }
        p
    }

    /// `Σ_{n<N} Kⁿ`, the literal Neumann series.
    pub fn power_sum_resolvent(&self) -> SquareMatrix<Complex<R>> {
        let n = self.dim();
        let mut sum = SquareMatrix::identity(n);
        let mut p = SquareMatrix::identity(n);
        for _ in 1..n {
            p = p.matmul(&self.k);
            for (r, c) in (0..n).flat_map(|r| (0..n).map(move |c| (r, c))) {
                sum[(r, c)] = sum[(r, c)] + p[(r, c)];
            }
        }
        sum
    }

    /// `max |((I − K)𝖪 − I)_{ij}| / max(1, max |𝖪_{ij}|)`.
    pub fn resolvent_residual(&self) -> R {
        let n = self.dim();
        let prod = self.k.matmul(&self.resolvent);
        let mut worst = R::zero();
        for r in 0..n {
            for c in 0..n {
                let id = if r == c { R::one() } else { R::zero() };
                let v = self.resolvent[(r, c)] - prod[(r, c)] - re(id);
                worst = worst.max(v.norm());
            }
        }
        worst / self.resolvent.max_abs().max(R::one())
    }
}

/// Impulse noise `ζ_k = δ·χ_k·ξ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSequence<R> {
    values: Vec<Complex<R>>,
}

impl<R: Real> NoiseSequence<R> {
    pub fn new(values: Vec<Complex<R>>) -> Self {
        Self { values }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![czero(); n])
    }

    /// Builds `ζ_k` from the noise operator samples `ξ_k`.
    pub fn from_xi(train: &DeltaTrain<R>, xi: &[Complex<R>]) -> Result<Self> {
        if xi.len() != train.len() {
            return Err(invalid(
                "noise",
                format!("expected {} samples, got {}", train.len(), xi.len()),
            ));
        }
        let delta = train.spacing();
        Ok(Self::new(
            xi.iter()
                .zip(train.amplitudes())
                .map(|(x, &c)| *x * (delta * c))
                .collect(),
        ))
    }

    pub fn values(&self) -> &[Complex<R>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

struct Shared<R> {
    train: DeltaTrain<R>,
    kernel: KernelSpec<R>,
    prop: FreePropagator<R>,
    sigma: SigmaTable<R>,
    green_lag: Vec<R>,
    green_dot_lag: Vec<R>,
}

/// Solver for one delta train, optionally restricted to a node window.
///
/// A window `[a, b]` starts from the state at `t_a`: node `a` keeps its role
/// as a memory source (arcs leaving it), but arcs arriving before `t_a` and
/// the noise kick at `a` itself are already part of that state and are
/// dropped. The full train is the window `[0, N − 1]` with origin `0`.
pub struct MemorySolver<R> {
    shared: Arc<Shared<R>>,
    start: usize,
    end: usize,
    origin: R,
    noise_start: usize,
    matrix: OnceLock<MemoryMatrix<R>>,
}

impl<R: Real> fmt::Debug for MemorySolver<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MemorySolver")
            .field("nodes", &self.shared.train.len())
            .field("window", &(self.start..self.end))
            .field("origin", &self.origin)
            .field("kernel", &self.shared.kernel)
            .finish()
    }
}

impl<R: Real> MemorySolver<R> {
    pub fn new(
        train: DeltaTrain<R>,
        kernel: KernelSpec<R>,
        prop: FreePropagator<R>,
    ) -> Result<Self> {
        kernel.validate()?;
        let sigma = SigmaTable::build(&train, &kernel)?;
        let delta = train.spacing();
        let n = train.len();
        let green_lag = (0..n).map(|m| prop.green0(delta * R::of(m))).collect();
        let green_dot_lag = (0..n)
            .map(|m| prop.green0_derivative(delta * R::of(m)))
            .collect();
        Ok(Self {
            shared: Arc::new(Shared {
                train,
                kernel,
                prop,
                sigma,
                green_lag,
                green_dot_lag,
            }),
            start: 0,
            end: n,
            origin: R::zero(),
            noise_start: 0,
            matrix: OnceLock::new(),
        })
    }

    /// Solver for the window of nodes `[a, b]`, starting from the state at `t_a`.
    pub fn interval(&self, a: usize, b: usize) -> Result<Self> {
        let n = self.shared.train.len();
        if a > b || b >= n {
            return Err(invalid(
                "window",
                format!("need a ≤ b < {n}, got [{a}, {b}]"),
            ));
        }
        Ok(Self {
            shared: Arc::clone(&self.shared),
            start: a,
            end: b + 1,
            origin: self.shared.train.node_time(a),
            noise_start: a + 1,
            matrix: OnceLock::new(),
        })
    }

    /// Window `[a, b]` from the node at `t_a` through the last node at or before `t`.
    pub fn interval_between(&self, t_a: R, t: R) -> Result<Self> {
        let train = &self.shared.train;
        let a = train
            .node_at(t_a)
            .ok_or(Error::OffGrid { time: t_a.as_f64() })?;
        let c = train.active_count(t, Side::Right);
        if c <= a {
            return Err(invalid("t", "must not precede t_a"));
        }
        self.interval(a, c - 1)
    }

    pub fn train(&self) -> &DeltaTrain<R> {
        &self.shared.train
    }

    pub fn kernel(&self) -> &KernelSpec<R> {
        &self.shared.kernel
    }

    pub fn propagator(&self) -> &FreePropagator<R> {
        &self.shared.prop
    }

    /// Global index of the first node in the window.
    pub fn start(&self) -> usize {
        self.start
    }

    /// Number of nodes in the window.
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    /// Time the window's initial data refers to.
    pub fn origin(&self) -> R {
        self.origin
    }

    /// First global node whose noise kick is not yet in the initial data.
    pub fn noise_start(&self) -> usize {
        self.noise_start
    }

    /// Effective `Σ(t_k, t_l)` on global indices, zero outside the window.
    pub fn sigma(&self, k: usize, l: usize) -> Complex<R> {
        if l < self.start || k >= self.end || !self.shared.kernel.admits(k, l) {
            return czero();
        }
        self.shared.sigma.get(k, l)
    }

    /// `G_0(m·δ)`.
    pub fn green_lag(&self, m: usize) -> R {
        self.shared.green_lag[m]
    }

    fn span(&self) -> usize {
        self.shared.kernel.max_arc_span.unwrap_or(usize::MAX)
    }

    fn delta2(&self) -> R {
        let d = self.shared.train.spacing();
        d * d
    }

    fn check_time(&self, t: R) -> Result<()> {
        if !t.is_finite() || t < self.origin {
            return Err(invalid(
                "t",
                format!("must be finite and ≥ {}, got {t}", self.origin),
            ));
        }
        Ok(())
    }

    /// Global nodes `[start, c)` active at `t`.
    fn active_end(&self, t: R, side: Side) -> usize {
        self.shared
            .train
            .active_count(t, side)
            .clamp(self.start, self.end)
    }

    /// `G_0(t − t_k)` (or its derivative) for the active nodes.
    fn green_from(&self, t: R, c: usize, derivative: bool) -> Vec<R> {
        let sh = &*self.shared;
        let lag = if derivative {
            &sh.green_dot_lag
        } else {
            &sh.green_lag
        };
        match sh.train.node_at(t) {
            Some(at) => (self.start..c).map(|k| lag[at - k]).collect(),
            None => (self.start..c)
                .map(|k| {
                    let dt = t - sh.train.node_time(k);
                    if derivative {
                        sh.prop.green0_derivative(dt)
                    } else {
                        sh.prop.green0(dt)
                    }
                })
                .collect(),
        }
    }

    /// Row `K_{t,t_l}` over the window, in local indices.
    pub fn row(&self, t: R, side: Side) -> Result<Vec<Complex<R>>> {
        self.row_impl(t, side, false)
    }

    /// `d/dt K_{t,t_l}`, differentiating only `G_0(t − t_k)`.
    pub fn row_derivative(&self, t: R, side: Side) -> Result<Vec<Complex<R>>> {
        self.row_impl(t, side, true)
    }

    fn row_impl(&self, t: R, side: Side, derivative: bool) -> Result<Vec<Complex<R>>> {
        self.check_time(t)?;
        let c = self.active_end(t, side);
        let g = self.green_from(t, c, derivative);
        let span = self.span();
        let d2 = self.delta2();
        let mut row = vec![czero(); self.len()];
        for i in self.start..c {
            let hi = c.min(i.saturating_add(span).saturating_add(1));
            let mut acc = czero();
            for k in i + 1..hi {
                acc = acc + self.shared.sigma.get(k, i) * g[k - self.start];
            }
            row[i - self.start] = -acc * d2;
        }
        Ok(row)
    }

    /// `x = 𝖪 f`, by forward substitution on `(I − K)x = f`.
    pub fn apply_resolvent(&self, f: &[Complex<R>]) -> Vec<Complex<R>> {
        let len = self.len();
        assert_eq!(f.len(), len, "vector length must match the window");
        let span = self.span();
        let d2 = self.delta2();
        let s = self.start;
        let ratio = self.shared.prop.lag_ratio(self.shared.train.spacing());
        let g0 = self.shared.green_lag[0];
        let mut x = vec![czero::<R>(); len];
        let mut y = vec![czero::<R>(); len];
        for l in 0..len {
            let k = s + l;
            let lo = k.saturating_sub(span).max(s);
            let mut acc = czero();
            for i in lo..k {
                acc = acc + self.shared.sigma.get(k, i) * x[i - s];
            }
            y[l] = acc;
            x[l] = match ratio {
                // Geometric G_0: update from the previous node, which keeps
                // relative precision when the solution decays far below f.
                Some(rho) if l > 0 => x[l - 1] * rho + (f[l] - f[l - 1] * rho) - y[l] * (g0 * d2),
                Some(_) => f[l],
                None => {
                    let mut mem = czero();
                    for m in 1..=l {
                        mem = mem + y[m] * self.shared.green_lag[l - m];
                    }
                    f[l] - mem * d2
                }
            };
        }
        x
    }

    /// `w = r 𝖪` for a row vector `r`, by backward substitution.
    pub fn apply_resolvent_left(&self, r: &[Complex<R>]) -> Vec<Complex<R>> {
        let len = self.len();
        assert_eq!(r.len(), len, "vector length must match the window");
        let span = self.span();
        let d2 = self.delta2();
        let s = self.start;
        let mut w = vec![czero::<R>(); len];
        let mut u = vec![czero::<R>(); len];
        for i in (0..len).rev() {
            let hi = len.min(i.saturating_add(span).saturating_add(1));
            let mut acc = czero();
            for k in i + 1..hi {
                acc = acc + self.shared.sigma.get(s + k, s + i) * u[k];
            }
            w[i] = r[i] - acc * d2;
            let mut ui = czero();
            for l in i..len {
                ui = ui + w[l] * self.shared.green_lag[l - i];
            }
            u[i] = ui;
        }
        w
    }

    /// Free solution at the window nodes, time measured from the origin.
    pub fn free_values(&self, initials: &[Complex<R>]) -> Result<Vec<Complex<R>>> {
        let sh = &*self.shared;
        (self.start..self.end)
            .map(|k| {
                sh.prop
                    .free_solution(sh.train.node_time(k) - self.origin, initials)
            })
            .collect()
    }

    fn check_noise(&self, noise: &NoiseSequence<R>) -> Result<()> {
        if noise.len() != self.shared.train.len() {
            return Err(invalid(
                "noise",
                format!(
                    "expected {} values, got {}",
                    self.shared.train.len(),
                    noise.len()
                ),
            ));
        }
        Ok(())
    }

    /// `Ξ_t = Σ_k G_0(t − t_k)Θ(t − t_k)ζ_k` over the window's noise nodes.
    pub fn xi_at(&self, t: R, noise: &NoiseSequence<R>) -> Result<Complex<R>> {
        self.check_time(t)?;
        self.check_noise(noise)?;
        let c = self.active_end(t, Side::Right);
        let g = self.green_from(t, c, false);
        let lo = self.noise_start.max(self.start);
        Ok((lo..c).fold(czero(), |acc, k| {
            acc + noise.values()[k] * g[k - self.start]
        }))
    }

    /// `Ξ` at every window node.
    pub fn xi_nodes(&self, noise: &NoiseSequence<R>) -> Result<Vec<Complex<R>>> {
        self.check_noise(noise)?;
        let lo = self.noise_start.max(self.start);
        Ok((self.start..self.end)
            .map(|l| {
                (lo..=l).fold(czero(), |acc, k| {
                    acc + noise.values()[k] * self.shared.green_lag[l - k]
                })
            })
            .collect())
    }

    fn inhomogeneity(
        &self,
        initials: &[Complex<R>],
        noise: &NoiseSequence<R>,
    ) -> Result<Vec<Complex<R>>> {
        let free = self.free_values(initials)?;
        let xi = self.xi_nodes(noise)?;
        Ok(free.into_iter().zip(xi).map(|(a, b)| a + b).collect())
    }

    /// `𝒪` at every window node.
    pub fn solve_nodes(
        &self,
        initials: &[Complex<R>],
        noise: &NoiseSequence<R>,
    ) -> Result<Vec<Complex<R>>> {
        let f = self.inhomogeneity(initials, noise)?;
        Ok(self.apply_resolvent(&f))
    }

    /// `𝒪(t) = f_t + Σ_{l,i} K_{t,t_l}𝖪_{li} f_i` for any `t` at or after the origin.
    pub fn solve_at(
        &self,
        t: R,
        initials: &[Complex<R>],
        noise: &NoiseSequence<R>,
    ) -> Result<Complex<R>> {
        let x = self.solve_nodes(initials, noise)?;
        let row = self.row(t, Side::Right)?;
        let ft =
            self.shared.prop.free_solution(t - self.origin, initials)? + self.xi_at(t, noise)?;
        Ok(row.iter().zip(&x).fold(ft, |acc, (r, v)| acc + r * v))
    }

    /// Explicit `K` and `𝖪` over the window, built once and cached.
    pub fn memory_matrix(&self) -> &MemoryMatrix<R> {
        self.matrix.get_or_init(|| {
            let len = self.len();
            let s = self.start;
            let span = self.span();
            let d2 = self.delta2();
            let rows: Vec<Vec<Complex<R>>> = (0..len)
                .into_par_iter()
                .map(|l| {
                    let mut row = vec![czero(); len];
                    for (i, slot) in row.iter_mut().enumerate().take(l) {
                        let hi = l.min(i.saturating_add(span));
                        let mut acc = czero();
                        for k in i + 1..=hi {
                            acc = acc
                                + self.shared.sigma.get(s + k, s + i)
                                    * self.shared.green_lag[l - k];
                        }
                        *slot = -acc * d2;
                    }
                    row
                })
                .collect();
            MemoryMatrix::from_k(SquareMatrix::from_rows(rows))
        })
    }
}

/// Builds the explicit memory matrix and its resolvent.
pub fn build_k<R: Real>(
    train: &DeltaTrain<R>,
    kernel: &KernelSpec<R>,
    prop: &FreePropagator<R>,
) -> Result<MemoryMatrix<R>> {
    let solver = MemorySolver::new(train.clone(), kernel.clone(), prop.clone())?;
    Ok(solver.memory_matrix().clone())
}

/// `K_{t,t_l}` for every node `l`.
pub fn k_row<R: Real>(
    t: R,
    train: &DeltaTrain<R>,
    kernel: &KernelSpec<R>,
    prop: &FreePropagator<R>,
) -> Result<Vec<Complex<R>>> {
    MemorySolver::new(train.clone(), kernel.clone(), prop.clone())?.row(t, Side::Right)
}

/// Noise superposition `Ξ_t`.
pub fn xi_at<R: Real>(
    t: R,
    train: &DeltaTrain<R>,
    noise: &NoiseSequence<R>,
    prop: &FreePropagator<R>,
) -> Result<Complex<R>> {
    MemorySolver::new(train.clone(), KernelSpec::zero(), prop.clone())?.xi_at(t, noise)
}

/// Full solution `𝒪(t)`.
pub fn solve_at<R: Real>(
    t: R,
    initials: &[Complex<R>],
    train: &DeltaTrain<R>,
    kernel: &KernelSpec<R>,
    noise: &NoiseSequence<R>,
    prop: &FreePropagator<R>,
) -> Result<Complex<R>> {
    MemorySolver::new(train.clone(), kernel.clone(), prop.clone())?.solve_at(t, initials, noise)
}

/// Solution at every node.
pub fn solve_nodes<R: Real>(
    initials: &[Complex<R>],
    train: &DeltaTrain<R>,
    kernel: &KernelSpec<R>,
    noise: &NoiseSequence<R>,
    prop: &FreePropagator<R>,
) -> Result<Vec<Complex<R>>> {
    MemorySolver::new(train.clone(), kernel.clone(), prop.clone())?.solve_nodes(initials, noise)
}
