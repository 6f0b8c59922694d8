use deltatrain::qle::OscillatorParams;
use deltatrain::quadrature::{integrate, QuadratureOptions};
use deltatrain::reference::{green_constant, jc_exact, reference_q2, RationalGreen};
use deltatrain::spectral::{
    dtft_gamma_k, gamma_ld, noise_continuous, noise_nu, noise_nu_with, poisson_check,
    poisson_check_tail_corrected, sigma_ld, NoiseOptions, PeriodicSpectralDensity, SpectralSource,
    ThermalUnits,
};
use deltatrain::{jc, DeltaTrain, Error};
use nalgebra::DMatrix;
use num_complex::Complex;
use proptest::prelude::*;

fn min_eigenvalue(nu: &deltatrain::NoiseCovariance<f64>) -> (f64, f64) {
    let n = nu.dim();
    let m = DMatrix::from_fn(n, n, |r, c| nu.get(r, c));
    let eig = m.symmetric_eigenvalues();
    let norm = eig.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    (eig.min(), norm)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sampled_density_is_odd_and_periodic(
        kappa in 0.01f64..2.0,
        lambda in 0.1f64..5.0,
        delta in 1e-3f64..1.0,
        x in -10.0f64..10.0,
    ) {
        let d = PeriodicSpectralDensity::new(kappa, lambda, delta * 10.0, 10).unwrap();
        let scale = d.s(x).abs().max(1.0);
        prop_assert!((d.s(-x) + d.s(x)).abs() <= 1e-12 * scale);
        prop_assert!((d.s(x + std::f64::consts::TAU) - d.s(x)).abs() <= 1e-12 * scale * (1.0 + x.abs()));
        prop_assert_eq!(sigma_ld(-x, kappa, lambda), -sigma_ld(x, kappa, lambda));
    }

    #[test]
    fn dtft_roundtrip_recovers_samples(
        kappa in 0.01f64..2.0,
        lambda in 0.1f64..5.0,
        delta in 0.01f64..0.5,
    ) {
        let d = PeriodicSpectralDensity::new(kappa, lambda, delta * 20.0, 20).unwrap();
        let opts = QuadratureOptions { abs_tol: 1e-12, rel_tol: 1e-13, max_subdivisions: 4000 };
        for k in 1..=10 {
            let got = dtft_gamma_k(k, &d, &opts).unwrap();
            let want = gamma_ld(delta * k as f64, kappa, lambda);
            prop_assert!((got - want).abs() < 1e-8, "k = {}: {} vs {}", k, got, want);
        }
    }

    #[test]
    fn thermal_noise_matrix_is_stationary_and_positive(
        kappa in 0.01f64..1.0,
        lambda in 0.5f64..4.0,
        beta in 0.2f64..5.0,
        n in 2usize..30,
    ) {
        let train = DeltaTrain::uniform(1.0, n).unwrap();
        let nu = noise_nu(&train, &SpectralSource::lorentz_drude(kappa, lambda).unwrap(), beta).unwrap();
        prop_assert_eq!(nu.asymmetry(), 0.0);
        for k in 1..n {
            for kp in 1..n {
                prop_assert_eq!(nu.get(k, kp), nu.get(k - 1, kp - 1));
            }
            prop_assert!(nu.get(k, k) >= 0.0);
        }
        let (floor, norm) = min_eigenvalue(&nu);
        prop_assert!(floor >= -1e-8 * norm, "floor {} norm {}", floor, norm);
    }

    #[test]
    fn discrete_bath_noise_is_positive(
        freqs in proptest::collection::vec(0.1f64..5.0, 1..6),
        coupling in 0.1f64..2.0,
        beta in 0.2f64..5.0,
        n in 2usize..20,
    ) {
        let train = DeltaTrain::uniform(2.0, n).unwrap();
        let source = SpectralSource::discrete(freqs, coupling).unwrap();
        let nu = noise_nu(&train, &source, beta).unwrap();
        let (floor, norm) = min_eigenvalue(&nu);
        prop_assert!(floor >= -1e-10 * norm.max(1.0));
    }

    #[test]
    fn continuous_correlator_symmetries(
        kappa in 0.01f64..1.0,
        lambda in 0.5f64..4.0,
        beta in 0.2f64..5.0,
        t in 0.0f64..3.0,
        tp in 0.0f64..3.0,
    ) {
        prop_assume!((t - tp).abs() > 1e-3);
        let s = SpectralSource::lorentz_drude(kappa, lambda).unwrap();
        let a = noise_continuous(t, tp, &s, beta).unwrap();
        let b = noise_continuous(tp, t, &s, beta).unwrap();
        prop_assert_eq!(a.re, b.re);
        prop_assert_eq!(a.im, -b.im);
        prop_assert!((a.im - gamma_ld(t - tp, kappa, lambda) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn partial_fraction_green_function(
        omega in 0.2f64..3.0,
        kappa in 0.0f64..1.0,
        lambda in 0.3f64..5.0,
        t in 0.0f64..5.0,
    ) {
        let g = match RationalGreen::lorentz_drude(omega, kappa, lambda) {
            Ok(g) => g,
            Err(Error::DegenerateRoots { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(g.root_residual() < 1e-10);
        let sum: Complex<f64> = g.residues().iter().sum();
        let first: Complex<f64> = g.residues().iter().zip(g.poles()).map(|(r, z)| r * z).sum();
        prop_assert!(sum.norm() < 1e-10);
        prop_assert!((first - 1.0).norm() < 1e-10);
        prop_assert!(g.value_complex(t).im.abs() < 1e-12);
    }
}

#[test]
fn thermal_unit_modes_are_related_by_the_spacing() {
    let train = DeltaTrain::uniform(1.0f64, 20).unwrap();
    let s = SpectralSource::lorentz_drude(0.1, 2.0).unwrap();
    let physical = noise_nu(&train, &s, 1.0).unwrap();
    let literal = noise_nu_with(
        &train,
        &s,
        1.0 / train.spacing(),
        &NoiseOptions {
            units: ThermalUnits::Literal,
            ..NoiseOptions::default()
        },
    )
    .unwrap();
    for k in 0..20 {
        assert!((physical.get(0, k) - literal.get(0, k)).abs() < 1e-14);
    }
}

#[test]
fn poisson_images_converge() {
    let base = [50usize, 200, 800].map(|m| poisson_check(1.0f64, 1.0, 1.0, 1.0, 10, m).abs_diff);
    assert!(base[0] > base[1] && base[1] > base[2]);
    // Image tail falls off as 1/M.
    assert!((base[0] / base[1] - 4.0).abs() < 0.1);
    let corrected = poisson_check_tail_corrected(1.0, 1.0, 1.0, 1.0, 10, 200);
    assert!(corrected.abs_diff < 1e-3 * base[1]);
}

#[test]
fn equal_time_continuous_correlator_diverges() {
    let s = SpectralSource::lorentz_drude(0.1, 2.0).unwrap();
    assert!(matches!(
        noise_continuous(0.4, 0.4, &s, 1.0),
        Err(Error::Divergent(_))
    ));
}

#[test]
fn green_function_solves_the_memory_equation() {
    let (omega, kappa, lambda) = (1.0f64, 0.3, 2.0);
    let g = RationalGreen::lorentz_drude(omega, kappa, lambda).unwrap();
    let opts = QuadratureOptions::default();
    for &t in &[0.3, 1.0, 2.5] {
        let memory = integrate(
            |u| gamma_ld(t - u, kappa, lambda) * g.value(u),
            0.0,
            t,
            &opts,
        )
        .unwrap()
        .value;
        let residual = g.second_derivative(t) + omega * omega * g.value(t) - memory;
        assert!(residual.abs() < 1e-6, "t = {t}: residual {residual}");
    }
    assert_eq!(
        green_constant(0.0, omega, kappa, lambda).unwrap(),
        g.value(0.0)
    );
    assert!(g.value(0.0).abs() < 1e-14 && (g.derivative(0.0) - 1.0).abs() < 1e-13);
}

#[test]
fn weak_coupling_reference_is_continuous() {
    let params = OscillatorParams::coherent(1.0f64, 1.0, 0.0).unwrap();
    let t = 0.8;
    let free = reference_q2(t, &params, 0.0, 2.0, 1.0).unwrap();
    let d6 = reference_q2(t, &params, 1e-6, 2.0, 1.0).unwrap() - free;
    let d7 = reference_q2(t, &params, 1e-7, 2.0, 1.0).unwrap() - free;
    // Linear in κ: the jump vanishes with the coupling.
    assert!(d6.abs() < 1e-5);
    assert!((d6 / d7 - 10.0).abs() < 0.05, "{d6} vs {d7}");
}

#[test]
fn jc_reference_delegates_to_closed_form() {
    assert_eq!(jc_exact(1.3, 0.2, 1.0), jc::exact_amplitude(1.3, 0.2, 1.0));
}
