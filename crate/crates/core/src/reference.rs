//! Constant-coupling baselines: the Lorentz–Drude oscillator Green function
//! by partial fractions, its thermal `⟨Q²(t)⟩`, and the exact qubit amplitude.

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::qle::OscillatorParams;
use crate::quadrature::{integrate_with_breakpoints, QuadratureOptions};
use crate::scalar::{czero, re, Real};
use crate::spectral::sigma_ld;

/// Minimum pole separation before partial fractions are refused.
pub const ROOT_SEPARATION: f64 = 1e-8;

/// Roots of a monic polynomial `z^n + c_0 z^{n−1} + … + c_{n−1}`.
///
/// Eigenvalues of the companion matrix by shifted complex QR, then one
/// round of Newton polishing on the original polynomial.
pub fn monic_roots<R: Real>(coeffs: &[R]) -> Vec<Complex<R>> {
    let n = coeffs.len();
    if n == 0 {
        return Vec::new();
    }
    // Companion matrix in upper Hessenberg form.
    let mut h = vec![vec![czero::<R>(); n]; n];
    for (j, c) in coeffs.iter().enumerate() {
        h[0][j] = re(-*c);
    }
    for i in 1..n {
        h[i][i - 1] = re(R::one());
    }
    let mut roots = hessenberg_eigenvalues(h);
    for z in roots.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(coeffs, *z);
            if dp.norm() == R::zero() {
                break;
            }
            let step = p / dp;
            *z = *z - step;
            if step.norm() <= R::epsilon() * z.norm().max(R::one()) {
                break;
            }
        }
    }
    roots
}

/// `p(z)` and `p′(z)` of the monic polynomial.
fn horner<R: Real>(coeffs: &[R], z: Complex<R>) -> (Complex<R>, Complex<R>) {
    let mut p = re(R::one());
    let mut dp = czero();
    for c in coeffs {
        dp = dp * z + p;
        p = p * z + re(*c);
    }
    (p, dp)
}

fn hessenberg_eigenvalues<R: Real>(mut h: Vec<Vec<Complex<R>>>) -> Vec<Complex<R>> {
    let mut out = Vec::with_capacity(h.len());
    let mut n = h.len();
    let mut iterations = 0usize;
    while n > 0 {
        if n == 1 {
            out.push(h[0][0]);
            break;
        }
        let sub = h[n - 1][n - 2].norm();
        let scale = h[n - 1][n - 1].norm() + h[n - 2][n - 2].norm();
        if sub <= R::epsilon() * scale.max(R::min_positive_value()) || iterations > 200 {
            out.push(h[n - 1][n - 1]);
            n -= 1;
            iterations = 0;
            continue;
        }
        iterations += 1;
        let mu = if iterations % 31 == 0 {
            h[n - 1][n - 1] + re(sub)
        } else {
            wilkinson_shift(
                h[n - 2][n - 2],
                h[n - 2][n - 1],
                h[n - 1][n - 2],
                h[n - 1][n - 1],
            )
        };
        for (i, row) in h.iter_mut().enumerate().take(n) {
            row[i] = row[i] - mu;
        }
        let mut rotations = Vec::with_capacity(n - 1);
        for j in 0..n - 1 {
            let (a, b) = (h[j][j], h[j + 1][j]);
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (c, s) = if r == R::zero() {
                (re(R::one()), czero())
            } else {
                (a / r, b / r)
            };
            for col in j..n {
                let (x, y) = (h[j][col], h[j + 1][col]);
                h[j][col] = c.conj() * x + s.conj() * y;
                h[j + 1][col] = -s * x + c * y;
            }
            rotations.push((c, s));
        }
        for (j, &(c, s)) in rotations.iter().enumerate() {
            for row in h.iter_mut().take((j + 2).min(n)) {
                let (x, y) = (row[j], row[j + 1]);
                row[j] = x * c + y * s;
                row[j + 1] = -x * s.conj() + y * c.conj();
            }
        }
        for (i, row) in h.iter_mut().enumerate().take(n) {
            row[i] = row[i] + mu;
        }
    }
    out
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift<R: Real>(
    a: Complex<R>,
    b: Complex<R>,
    c: Complex<R>,
    d: Complex<R>,
) -> Complex<R> {
    let half = re(R::lit(0.5));
    let tr = (a + d) * half;
    let disc = ((a - d) * half * ((a - d) * half) + b * c).sqrt();
    let (l1, l2) = (tr + disc, tr - disc);
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// `G(t) = Σ r_i e^{z_i t}` from `G̃(z) = (z + Λ)/((z² + Ω²)(z + Λ) − κΛ²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalGreen<R> {
    poles: Vec<Complex<R>>,
    residues: Vec<Complex<R>>,
    lambda: R,
    coeffs: [R; 3],
}

impl<R: Real> RationalGreen<R> {
    pub fn lorentz_drude(omega: R, kappa: R, lambda: R) -> Result<Self> {
        for (name, v) in [("omega", omega), ("lambda", lambda)] {
            if !(v.is_finite() && v > R::zero()) {
                return Err(invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(kappa.is_finite() && kappa >= R::zero()) {
            return Err(invalid(
                "kappa",
                format!("must be finite and ≥ 0, got {kappa}"),
            ));
        }
        let w2 = omega * omega;
        let coeffs = [lambda, w2, w2 * lambda - kappa * lambda * lambda];
        let poles = monic_roots(&coeffs);
        let mut separation = R::infinity();
        for i in 0..poles.len() {
            for j in 0..i {
                separation = separation.min((poles[i] - poles[j]).norm());
            }
        }
        if separation < R::lit(ROOT_SEPARATION) {
            return Err(Error::DegenerateRoots {
                separation: separation.as_f64(),
            });
        }
        let residues = poles
            .iter()
            .map(|&z| (z + re(lambda)) / horner(&coeffs, z).1)
            .collect();
        Ok(Self {
            poles,
            residues,
            lambda,
            coeffs,
        })
    }

    pub fn poles(&self) -> &[Complex<R>] {
        &self.poles
    }

    pub fn residues(&self) -> &[Complex<R>] {
        &self.residues
    }

    /// Largest `|p(z_i)|` over the computed poles.
    pub fn root_residual(&self) -> R {
        self.poles
            .iter()
            .map(|&z| horner(&self.coeffs, z).0.norm())
            .fold(R::zero(), R::max)
    }

    fn moment(&self, t: R, power: i32) -> Complex<R> {
        self.poles
            .iter()
            .zip(&self.residues)
            .fold(czero(), |acc, (&z, &r)| {
                acc + r * z.powi(power) * (z * re(t)).exp()
            })
    }

    /// `G(t)` as a complex sum; the imaginary part is round-off.
    pub fn value_complex(&self, t: R) -> Complex<R> {
        self.moment(t, 0)
    }

    pub fn value(&self, t: R) -> R {
        self.moment(t, 0).re
    }

    pub fn derivative(&self, t: R) -> R {
        self.moment(t, 1).re
    }

    pub fn second_derivative(&self, t: R) -> R {
        self.moment(t, 2).re
    }

    /// `A(ω) = ∫_0^t G(t − u)e^{iωu} du`.
    pub fn driven_amplitude(&self, omega: R, t: R) -> Complex<R> {
        let iw = Complex::new(R::zero(), omega);
        self.poles
            .iter()
            .zip(&self.residues)
            .fold(czero(), |acc, (&z, &r)| {
                let eps = iw - z;
                let x = eps * re(t);
                let term = if x.norm() < R::lit(1e-3) {
                    let phi = re::<R>(R::one())
                        + x / re(R::lit(2.0))
                        + x * x / re(R::lit(6.0))
                        + x * x * x / re(R::lit(24.0));
                    (z * re(t)).exp() * re(t) * phi
                } else {
                    ((iw * re(t)).exp() - (z * re(t)).exp()) / eps
                };
                acc + r * term
            })
    }

    pub fn width(&self) -> R {
        self.lambda
    }
}

/// `G(t)` for constant coupling to a Lorentz–Drude bath.
pub fn green_constant<R: Real>(t: R, omega: R, kappa: R, lambda: R) -> Result<R> {
    if !(t.is_finite() && t >= R::zero()) {
        return Err(invalid("t", format!("must be finite and ≥ 0, got {t}")));
    }
    Ok(RationalGreen::lorentz_drude(omega, kappa, lambda)?.value(t))
}

/// Frequency cutoff of the thermal noise integral in [`reference_q2`].
const NOISE_CUTOFF: f64 = 1e4;

/// `⟨Q²(t)⟩` for constant coupling, thermal Lorentz–Drude bath at inverse temperature `β`.
///
/// The noise part `(1/π)∫_0^∞ σ(ω)coth(βω/2)|A(ω)|² dω` is the double time
/// integral of the symmetrized correlator, taken in the frequency domain with
/// an analytic tail beyond the cutoff.
pub fn reference_q2<R: Real>(
    t: R,
    params: &OscillatorParams<R>,
    kappa: R,
    lambda: R,
    beta: R,
) -> Result<R> {
    if !(t.is_finite() && t >= R::zero()) {
        return Err(invalid("t", format!("must be finite and ≥ 0, got {t}")));
    }
    if !(beta.is_finite() && beta > R::zero()) {
        return Err(invalid(
            "beta",
            format!("must be finite and > 0, got {beta}"),
        ));
    }
    let green = RationalGreen::lorentz_drude(params.omega, kappa, lambda)?;
    let (g, gd) = (green.value(t), green.derivative(t));
    let (q2, p2, qp) = params.second_moments();
    let mut total = gd * gd * q2 + g * g * p2 + gd * g * qp;
    if kappa == R::zero() || t == R::zero() {
        return Ok(total);
    }
    let integrand = |w: R| {
        let y = beta * w * R::lit(0.5);
        let thermal = if y < R::lit(1e-6) {
            kappa * lambda * lambda / (w * w + lambda * lambda) * R::lit(2.0) / beta
        } else {
            sigma_ld(w, kappa, lambda) / y.tanh()
        };
        thermal * green.driven_amplitude(w, t).norm_sqr()
    };
    let cutoff = R::lit(NOISE_CUTOFF);
    let mut points = vec![R::zero()];
    let mut p = R::lit(0.25);
    while p < cutoff {
        points.push(p);
        p = p * R::lit(2.0);
    }
    points.push(cutoff);
    let opts = QuadratureOptions {
        abs_tol: 1e-11,
        rel_tol: 1e-10,
        max_subdivisions: 20_000,
    };
    let body = integrate_with_breakpoints(integrand, &points, &opts)?.value / R::PI();
    let tail = kappa * lambda * lambda * g * g / (R::lit(2.0) * R::PI() * cutoff * cutoff);
    total = total + body + tail;
    Ok(total)
}

/// Exact qubit amplitude for constant coupling.
pub fn jc_exact<R: Real>(t: R, kappa: R, lambda: R) -> Complex<R> {
    crate::jc::exact_amplitude(t, kappa, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_roots_of_known_polynomial() {
        // (z − 1)(z + 2)(z − 3) = z³ − 2z² − 5z + 6
        let mut r = monic_roots(&[-2.0f64, -5.0, 6.0]);
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (z, want) in r.iter().zip([-2.0, 1.0, 3.0]) {
            assert!((z.re - want).abs() < 1e-13 && z.im.abs() < 1e-13);
        }
        // z³ + z = z(z² + 1)
        let r = monic_roots(&[0.0f64, 1.0, 0.0]);
        assert!(r
            .iter()
            .any(|z| (z - Complex::new(0.0, 1.0)).norm() < 1e-13));
        assert!(r
            .iter()
            .any(|z| (z - Complex::new(0.0, -1.0)).norm() < 1e-13));
    }

    #[test]
    fn undamped_limit_and_sum_rules() {
        let g = RationalGreen::lorentz_drude(1.3, 0.0, 2.0).unwrap();
        for &t in &[0.0f64, 0.4, 2.0] {
            assert!((g.value(t) - (1.3 * t).sin() / 1.3).abs() < 1e-13);
        }
        let g = RationalGreen::lorentz_drude(1.0, 0.1, 2.0).unwrap();
        let sum: Complex<f64> = g.residues().iter().sum();
        let first: Complex<f64> = g.residues().iter().zip(g.poles()).map(|(r, z)| r * z).sum();
        assert!(sum.norm() < 1e-13);
        assert!((first - Complex::new(1.0, 0.0)).norm() < 1e-13);
        assert!(g.root_residual() < 1e-10);
        assert!(g.value_complex(0.7).im.abs() < 1e-12);
    }

    #[test]
    fn degenerate_roots_rejected() {
        // With Ω = 1, Λ = 3 the cubic has a double root where p′(z) = 3z² + 6z + 1 vanishes.
        let z = -1.0 + (2.0f64 / 3.0).sqrt();
        let kappa = (z * z * z + 3.0 * z * z + z + 3.0) / 9.0;
        let got = RationalGreen::lorentz_drude(1.0, kappa, 3.0);
        assert!(matches!(got, Err(Error::DegenerateRoots { .. })), "{got:?}");
        assert!(RationalGreen::lorentz_drude(1.0, kappa * 1.01, 3.0).is_ok());
    }

    #[test]
    fn driven_amplitude_series_branch_is_continuous() {
        let g = RationalGreen::lorentz_drude(1.0, 0.0, 2.0).unwrap();
        let a = g.driven_amplitude(1.0, 0.8);
        let b = g.driven_amplitude(1.0 + 2e-3, 0.8);
        assert!((a - b).norm() < 5e-3);
        let direct = crate::quadrature::integrate(
            |u: f64| (0.8 - u).sin() * (1.0 * u).cos(),
            0.0,
            0.8,
            &Default::default(),
        )
        .unwrap()
        .value;
        assert!((a.re - direct).abs() < 1e-12);
    }

    #[test]
    fn free_reference_moments() {
        let p = OscillatorParams::coherent(1.0, 1.0, 0.0).unwrap();
        let t = 0.6f64;
        let v = reference_q2(t, &p, 0.0, 2.0, 1.0).unwrap();
        let expect = t.cos().powi(2) * 1.5 + t.sin().powi(2) * 0.5;
        assert!((v - expect).abs() < 1e-14);
        assert!((reference_q2(0.0, &p, 0.1, 2.0, 1.0).unwrap() - 1.5).abs() < 1e-15);
    }
}
