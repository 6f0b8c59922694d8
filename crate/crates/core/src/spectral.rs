//! Bath spectral densities, their node-sampled (DTFT) counterparts and the
//! thermal noise correlators that feed the oscillator covariance.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::kernel::DeltaTrain;
use crate::linalg::SquareMatrix;
use crate::qle::NoiseCovariance;
use crate::quadrature::{integrate, integrate_with_breakpoints, QuadratureOptions};
use crate::scalar::Real;

/// How the inverse temperature enters the sampled-noise thermal factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThermalUnits {
    /// `e^{β_eff ω̄}` with `β_eff = β·N/T`, so that `ω̄N/T` carries physical `β`.
    #[default]
    Physical,
    /// `e^{β ω̄}` with `ω̄` in radians per node.
    Literal,
}

impl ThermalUnits {
    pub fn label(self) -> &'static str {
        match self {
            ThermalUnits::Physical => "physical",
            ThermalUnits::Literal => "literal",
        }
    }

    /// Inverse temperature multiplying `ω̄` in the thermal factor.
    pub fn effective_beta<R: Real>(self, beta: R, train: &DeltaTrain<R>) -> R {
        match self {
            ThermalUnits::Physical => beta / train.spacing(),
            ThermalUnits::Literal => beta,
        }
    }
}

/// Environment spectral density `σ(ω)`.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralSource<R> {
    /// `𝒩` oscillators at `ω_j` with common coupling `c`.
    DiscreteOscillators { frequencies: Vec<R>, coupling: R },
    /// `σ(ω) = κωΛ²/(ω² + Λ²)`.
    LorentzDrude { kappa: R, lambda: R },
}

impl<R: Real> SpectralSource<R> {
    pub fn lorentz_drude(kappa: R, lambda: R) -> Result<Self> {
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
        Ok(SpectralSource::LorentzDrude { kappa, lambda })
    }

    pub fn discrete(frequencies: Vec<R>, coupling: R) -> Result<Self> {
        if frequencies
            .iter()
            .any(|w| !(w.is_finite() && *w > R::zero()))
        {
            return Err(invalid(
                "frequencies",
                "all bath frequencies must be finite and > 0",
            ));
        }
        if !coupling.is_finite() {
            return Err(invalid("coupling", "must be finite"));
        }
        Ok(SpectralSource::DiscreteOscillators {
            frequencies,
            coupling,
        })
    }

    /// Dissipation kernel `Γ(t)`, odd in `t`.
    pub fn gamma(&self, t: R) -> R {
        match self {
            SpectralSource::LorentzDrude { kappa, lambda } => gamma_ld(t, *kappa, *lambda),
            SpectralSource::DiscreteOscillators {
                frequencies,
                coupling,
            } => frequencies
                .iter()
                .map(|&w| coupling.powi(2) / w * (w * t).sin())
                .sum(),
        }
    }

    /// Continuous density `σ(ω)`; zero off the bath lines for a discrete bath.
    pub fn sigma(&self, omega: R) -> R {
        match self {
            SpectralSource::LorentzDrude { kappa, lambda } => sigma_ld(omega, *kappa, *lambda),
            SpectralSource::DiscreteOscillators { .. } => R::zero(),
        }
    }
}

/// `Γ(t) = κΛ²e^{−Λ|t|} sgn(t)` with `sgn(0) = 0`.
pub fn gamma_ld<R: Real>(t: R, kappa: R, lambda: R) -> R {
    if t == R::zero() {
        return R::zero();
    }
    kappa * lambda * lambda * (-lambda * t.abs()).exp() * t.signum()
}

/// `σ(ω) = κωΛ²/(ω² + Λ²)`.
pub fn sigma_ld<R: Real>(omega: R, kappa: R, lambda: R) -> R {
    kappa * omega * lambda * lambda / (omega * omega + lambda * lambda)
}

/// `2π`-periodic spectral density of the node-sampled Lorentz–Drude kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicSpectralDensity<R> {
    pub kappa: R,
    pub lambda: R,
    pub duration: R,
    pub count: usize,
}

impl<R: Real> PeriodicSpectralDensity<R> {
    pub fn new(kappa: R, lambda: R, duration: R, count: usize) -> Result<Self> {
        SpectralSource::lorentz_drude(kappa, lambda)?;
        if !(duration.is_finite() && duration > R::zero()) || count == 0 {
            return Err(invalid("train", "need T > 0 and N ≥ 1"));
        }
        Ok(Self {
            kappa,
            lambda,
            duration,
            count,
        })
    }

    pub fn spacing(&self) -> R {
        self.duration / R::of(self.count)
    }

    fn a(&self) -> R {
        self.lambda * self.spacing()
    }

    /// `cosh(Λδ) − cos ω̄` without cancellation near the origin.
    fn denominator(&self, omega_bar: R) -> R {
        let two = R::lit(2.0);
        let half = R::lit(0.5);
        two * ((half * self.a()).sinh().powi(2) + (half * omega_bar).sin().powi(2))
    }

    /// `s(ω̄) = ½κΛ² sin ω̄ / (cosh(Λδ) − cos ω̄)`.
    pub fn s(&self, omega_bar: R) -> R {
        let half = R::lit(0.5);
        half * self.kappa * self.lambda * self.lambda * omega_bar.sin()
            / self.denominator(omega_bar)
    }

    /// `s(x)·coth(b x/2)`, even in `x`, finite at the origin.
    pub fn thermal_weight(&self, x: R, b: R) -> R {
        let half = R::lit(0.5);
        let y = b * x * half;
        // x·coth(bx/2) and sin(x)/x, both even and smooth.
        let x_coth = if y.abs() < R::lit(1e-3) {
            let y2 = y * y;
            (R::lit(2.0) / b) * (R::one() + y2 / R::lit(3.0) - y2 * y2 / R::lit(45.0))
        } else {
            x / y.tanh()
        };
        let sinc = if x.abs() < R::lit(1e-4) {
            R::one() - x * x / R::lit(6.0)
        } else {
            x.sin() / x
        };
        half * self.kappa * self.lambda * self.lambda * sinc * x_coth / self.denominator(x)
    }
}

/// `s(ω̄)` for the Lorentz–Drude kernel sampled at spacing `T/N`.
pub fn dtft_s<R: Real>(omega_bar: R, kappa: R, lambda: R, duration: R, count: usize) -> R {
    PeriodicSpectralDensity {
        kappa,
        lambda,
        duration,
        count,
    }
    .s(omega_bar)
}

/// Recovers `Γ_k` from `s` by the inverse transform `(1/π)∫_{−π}^{π} s(ω̄) sin(kω̄) dω̄`.
pub fn dtft_gamma_k<R: Real>(
    k: i64,
    density: &PeriodicSpectralDensity<R>,
    opts: &QuadratureOptions,
) -> Result<R> {
    let kr = R::lit(k as f64);
    let pi = R::PI();
    let a = density.a();
    let mut points = vec![-pi];
    for p in [-a, R::zero(), a] {
        if p.abs() < pi && points.last().is_none_or(|q| p > *q) {
            points.push(p);
        }
    }
    points.push(pi);
    let est = integrate_with_breakpoints(|x| density.s(x) * (kr * x).sin(), &points, opts)?;
    Ok(est.value / pi)
}

/// Symmetrized thermal correlation `(1/π)∫_0^π s(x) coth(bx/2) cos(mx) dx` of lag `m`.
fn sampled_lag_correlation<R: Real>(
    density: &PeriodicSpectralDensity<R>,
    b: R,
    m: usize,
    opts: &QuadratureOptions,
) -> Result<R> {
    let pi = R::PI();
    let a = density.a();
    let mut points = vec![R::zero()];
    for scale in [0.1, 1.0, 10.0, 100.0] {
        let p = a * R::lit(scale);
        if p < pi && p > *points.last().expect("nonempty") {
            points.push(p);
        }
    }
    points.push(pi);
    let mr = R::of(m);
    let est = integrate_with_breakpoints(
        |x| density.thermal_weight(x, b) * (mr * x).cos(),
        &points,
        opts,
    )?;
    Ok(est.value / pi)
}

/// Options for [`noise_nu_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseOptions {
    pub units: ThermalUnits,
    pub quadrature: QuadratureOptions,
}

impl Default for NoiseOptions {
    fn default() -> Self {
        Self {
            units: ThermalUnits::Physical,
            quadrature: QuadratureOptions {
                abs_tol: 1e-10,
                rel_tol: 1e-10,
                max_subdivisions: 40_000,
            },
        }
    }
}

/// Thermal noise covariance `ν_{kk′} = ⟨{ζ_k, ζ_{k′}}⟩` with default options.
pub fn noise_nu<R: Real>(
    train: &DeltaTrain<R>,
    spectral: &SpectralSource<R>,
    beta: R,
) -> Result<NoiseCovariance<R>> {
    noise_nu_with(train, spectral, beta, &NoiseOptions::default())
}

pub fn noise_nu_with<R: Real>(
    train: &DeltaTrain<R>,
    spectral: &SpectralSource<R>,
    beta: R,
    opts: &NoiseOptions,
) -> Result<NoiseCovariance<R>> {
    if !(beta.is_finite() && beta > R::zero()) {
        return Err(invalid(
            "beta",
            format!("must be finite and > 0, got {beta}"),
        ));
    }
    let n = train.len();
    let delta = train.spacing();
    let lags: Vec<R> = match spectral {
        SpectralSource::LorentzDrude { kappa, lambda } => {
            if *kappa == R::zero() {
                vec![R::zero(); n]
            } else {
                let density = PeriodicSpectralDensity::new(*kappa, *lambda, train.duration(), n)?;
                let b = opts.units.effective_beta(beta, train);
                (0..n)
                    .into_par_iter()
                    .map(|m| sampled_lag_correlation(&density, b, m, &opts.quadrature))
                    .collect::<Result<Vec<R>>>()?
            }
        }
        SpectralSource::DiscreteOscillators {
            frequencies,
            coupling,
        } => (0..n)
            .map(|m| {
                let tau = delta * R::of(m);
                frequencies
                    .iter()
                    .map(|&w| {
                        coupling.powi(2) / (R::lit(2.0) * w) / (beta * w * R::lit(0.5)).tanh()
                            * (w * tau).cos()
                    })
                    .sum()
            })
            .collect(),
    };
    // Both branches hold ν/(2δ²χχ) per lag; the discrete one is exact.
    let two_d2 = R::lit(2.0) * delta * delta;
    let chi = train.amplitudes();
    let mut nu = SquareMatrix::zeros(n);
    for k in 0..n {
        for kp in 0..n {
            nu[(k, kp)] = two_d2 * chi[k] * chi[kp] * lags[k.abs_diff(kp)];
        }
    }
    Ok(NoiseCovariance::new(nu))
}

/// Both sides of the Poisson relation between `s` and `σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonCheck<R> {
    pub lhs: R,
    pub rhs: R,
    pub abs_diff: R,
}

/// `s(ωδ)` against the image sum `(1/δ)Σ_{|m|≤M} σ(ω − 2πm/δ)`.
pub fn poisson_check<R: Real>(
    omega: R,
    kappa: R,
    lambda: R,
    duration: R,
    count: usize,
    truncation: usize,
) -> PoissonCheck<R> {
    let density = PeriodicSpectralDensity {
        kappa,
        lambda,
        duration,
        count,
    };
    let delta = density.spacing();
    let lhs = density.s(omega * delta);
    let period = R::lit(2.0) * R::PI() / delta;
    let mut rhs = sigma_ld(omega, kappa, lambda);
    for m in (1..=truncation).rev() {
        let shift = period * R::of(m);
        rhs =
            rhs + (sigma_ld(omega - shift, kappa, lambda) + sigma_ld(omega + shift, kappa, lambda));
    }
    rhs = rhs / delta;
    PoissonCheck {
        lhs,
        rhs,
        abs_diff: (lhs - rhs).abs(),
    }
}

/// [`poisson_check`] with the asymptotic image tail beyond `M` added to the sum.
pub fn poisson_check_tail_corrected<R: Real>(
    omega: R,
    kappa: R,
    lambda: R,
    duration: R,
    count: usize,
    truncation: usize,
) -> PoissonCheck<R> {
    let base = poisson_check(omega, kappa, lambda, duration, count, truncation);
    let delta = duration / R::of(count);
    let pi = R::PI();
    let tail = -omega * kappa * lambda * lambda * delta
        / (R::lit(2.0) * pi * pi * (R::of(truncation) + R::lit(0.5)));
    let rhs = base.rhs + tail;
    PoissonCheck {
        lhs: base.lhs,
        rhs,
        abs_diff: (base.lhs - rhs).abs(),
    }
}

/// `σ(ω)` of a continuous source.
pub fn sigma_continuous<R: Real>(omega: R, spectral: &SpectralSource<R>) -> R {
    spectral.sigma(omega)
}

/// Thermal correlator `⟨ξ(t)ξ(t′)⟩` of the continuously coupled bath.
///
/// The real part is the symmetrized correlator, the imaginary part `Γ(t − t′)/2`.
/// For the Lorentz–Drude bath the real part is summed over Matsubara poles and
/// diverges logarithmically at equal times.
pub fn noise_continuous<R: Real>(
    t: R,
    t_prime: R,
    spectral: &SpectralSource<R>,
    beta: R,
) -> Result<Complex<R>> {
    if !(beta.is_finite() && beta > R::zero()) {
        return Err(invalid(
            "beta",
            format!("must be finite and > 0, got {beta}"),
        ));
    }
    let tau = t - t_prime;
    let im = spectral.gamma(tau) * R::lit(0.5);
    let re_part = match spectral {
        SpectralSource::LorentzDrude { kappa, lambda } => {
            if *kappa == R::zero() {
                R::zero()
            } else if tau == R::zero() {
                return Err(Error::Divergent(
                    "equal-time Lorentz–Drude noise correlator",
                ));
            } else {
                matsubara_ld(tau.abs(), *kappa, *lambda, beta)
            }
        }
        SpectralSource::DiscreteOscillators {
            frequencies,
            coupling,
        } => frequencies
            .iter()
            .map(|&w| {
                coupling.powi(2) / (R::lit(2.0) * w) / (beta * w * R::lit(0.5)).tanh()
                    * (w * tau).cos()
            })
            .sum(),
    };
    Ok(Complex::new(re_part, im))
}

fn matsubara_ld<R: Real>(tau: R, kappa: R, lambda: R, beta: R) -> R {
    let two_pi_over_beta = R::lit(2.0) * R::PI() / beta;
    let decay = (-lambda * tau).exp();
    let mut sum = R::zero();
    let mut n = 1usize;
    loop {
        let nu = two_pi_over_beta * R::of(n);
        let term = if (nu - lambda).abs() < R::lit(1e-6) * lambda {
            (R::one() - nu * tau) * (-nu * tau).exp() / (R::lit(2.0) * lambda)
        } else {
            (nu * (-nu * tau).exp() - lambda * decay) / (nu * nu - lambda * lambda)
        };
        sum = sum + term;
        if nu * tau > R::lit(60.0) && nu > R::lit(4.0) * lambda {
            break;
        }
        n += 1;
    }
    // Remaining −Λe^{−Λτ}/(ν_n² − Λ²) terms, ν_n ≫ Λ.
    let m = R::of(n) + R::lit(0.5);
    sum = sum - lambda * decay / (two_pi_over_beta * two_pi_over_beta * m);
    kappa * lambda / beta * decay + R::lit(2.0) * kappa * lambda * lambda / beta * sum
}

/// `(1/π)∫_0^∞ σ(ω) coth(βω/2) cos(ωτ) dω` by direct quadrature on `[0, W]`.
///
/// Reference path for the Matsubara sum; only accurate for `τ` of order `1/Λ`.
pub fn noise_continuous_quadrature<R: Real>(
    tau: R,
    kappa: R,
    lambda: R,
    beta: R,
    cutoff: R,
) -> Result<R> {
    let f = |w: R| {
        let y = beta * w * R::lit(0.5);
        let coth_sigma = if y.abs() < R::lit(1e-6) {
            kappa * lambda * lambda / (w * w + lambda * lambda) * R::lit(2.0) / beta
        } else {
            sigma_ld(w, kappa, lambda) / y.tanh()
        };
        coth_sigma * (w * tau).cos()
    };
    let opts = QuadratureOptions {
        abs_tol: 1e-11,
        rel_tol: 1e-11,
        max_subdivisions: 100_000,
    };
    // Beyond the cutoff σ coth ≈ κΛ²/ω, leaving −(κΛ²/π)Ci(Wτ).
    let x = cutoff * tau;
    let ci = if x > R::lit(20.0) {
        x.sin() / x - x.cos() / (x * x)
    } else {
        R::zero()
    };
    Ok(integrate(f, R::zero(), cutoff, &opts)?.value / R::PI()
        - kappa * lambda * lambda / R::PI() * ci)
}
