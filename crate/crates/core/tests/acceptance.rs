//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints its PASS/FAIL line even when the run succeeds.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use deltatrain::diagram::{enumerate, sum_check};
use deltatrain::jc::{
    self, decay_rates, exact_amplitude, kraus_completeness, kraus_operators, rhp_measure, JcParams,
};
use deltatrain::linalg::Mat2;
use deltatrain::qle::{covariance_floor, NoiseCovariance, Oscillator, OscillatorParams};
use deltatrain::quadrature::QuadratureOptions;
use deltatrain::reference::{green_constant, reference_q2};
use deltatrain::spectral::{
    dtft_gamma_k, noise_nu, poisson_check, PeriodicSpectralDensity, SpectralSource,
};
use deltatrain::{DeltaTrain, MemorySolver};
use nalgebra::Matrix4;
use num_complex::Complex;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn sci(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn jc_convergence() -> Outcome {
    let (kappa, lambda, t) = (0.1f64, 1.0, 1.0);
    let params = JcParams::new(kappa, lambda).unwrap();
    let exact = exact_amplitude(t, kappa, lambda);
    let mut errors = Vec::new();
    let mut last = Complex::new(0.0, 0.0);
    for n in [10, 30, 100, 300, 1000] {
        let train = DeltaTrain::uniform(t, n).unwrap();
        let value = jc::transfer(&train, &params).unwrap().value(t).unwrap();
        errors.push((value - exact).norm());
        last = value;
    }
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    let final_err = errors[errors.len() - 1];
    let literal = (last.norm() - 0.98130).abs();
    outcome(
        decreasing && final_err < 1e-3 && literal < 1e-3,
        format!(
            "errors {}; |T(1)| at N=1000 = {:.6}, closed form {:.6}, |T − 0.98130| = {literal:.2e}",
            sci(&errors),
            last.norm(),
            exact.re
        ),
    )
}

fn nilpotency_and_resolvent() -> Outcome {
    let mut rng = common::rng(0xacce_0002);
    let mut worst = 0.0f64;
    let mut nilpotent = true;
    for _ in 0..50 {
        let n = rng.random_range(1..=50);
        let inst = common::random_instance(&mut rng, n);
        let solver = MemorySolver::new(inst.train, inst.kernel, inst.prop).unwrap();
        let m = solver.memory_matrix();
        nilpotent &= m.k().is_strictly_lower() && m.k_power(n).is_zero();
        worst = worst.max(m.resolvent_residual());
    }
    outcome(
        nilpotent && worst < 1e-12,
        format!("K^N = 0 on all 50 instances: {nilpotent}; max ‖(I − K)𝖪 − I‖ = {worst:.2e}"),
    )
}

fn diagram_sums() -> Outcome {
    let mut rng = common::rng(0xacce_0003);
    let mut worst = 0.0f64;
    for n in 2..=6 {
        for _ in 0..20 {
            let inst = common::random_instance(&mut rng, n);
            let t = if rng.random_bool(0.5) {
                inst.train.node_time(rng.random_range(0..n))
            } else {
                rng.random_range(0.0..inst.train.duration() * 1.2)
            };
            let check = sum_check(
                t,
                &inst.train,
                &inst.kernel,
                &inst.noise,
                &inst.initials,
                &inst.prop,
            )
            .unwrap();
            worst = worst.max(check.abs_difference);
        }
    }
    let (c2, c3) = (enumerate(2).len(), enumerate(3).len());
    outcome(
        worst < 1e-10 && c2 == 1 && c3 == 4,
        format!("max |Σ weights + f_t − 𝒪(t)| = {worst:.2e}; counts N=2: {c2}, N=3: {c3}"),
    )
}

fn underdamped_train() -> (DeltaTrain<f64>, JcParams<f64>) {
    (
        DeltaTrain::uniform(30.0, 40).unwrap(),
        JcParams::new(2.5, 1.0).unwrap(),
    )
}

fn markovian_arcs() -> Outcome {
    let (train, params) = underdamped_train();
    let delta = train.spacing();
    let mut measures = Vec::new();
    let mut min_markov = f64::INFINITY;
    for j in 1..=4 {
        let gammas = decay_rates(&train, &params, Some(j)).unwrap();
        if j == 1 {
            min_markov = gammas.iter().copied().fold(f64::INFINITY, f64::min);
        }
        measures.push(rhp_measure(&gammas, delta));
    }
    let pass = min_markov >= -1e-9 && measures[0] == 0.0 && measures[1..].iter().all(|&m| m > 0.0);
    outcome(
        pass,
        format!("j=1 min γ_k = {min_markov:.3e}; 𝓘 for j=1..4 = {measures:.4?}"),
    )
}

fn semigroup_identities() -> Outcome {
    let (train, params) = underdamped_train();
    let n = train.len();
    let composition = |span: Option<usize>| {
        let tf = jc::transfer_restricted(&train, &params, span).unwrap();
        let mut worst = 0.0f64;
        for b in 0..n {
            let t = train.node_time(b);
            for a in 0..=b {
                let ta = train.node_time(a);
                let split = tf.interval(t, ta).unwrap() * tf.value(ta).unwrap();
                worst = worst.max((tf.value(t).unwrap() - split).norm());
            }
        }
        worst
    };
    let jc_markov = composition(Some(1));
    let jc_full = composition(None);

    let qtrain = DeltaTrain::uniform(1.0, 40).unwrap();
    let source = SpectralSource::lorentz_drude(0.1, 2.0).unwrap();
    let nu = noise_nu(&qtrain, &source, 1.0).unwrap();
    let white = nu.diagonal_only();
    let restricted = Oscillator::lorentz_drude(qtrain.clone(), 1.0, 0.1, 2.0, Some(1)).unwrap();
    let full = Oscillator::lorentz_drude(qtrain.clone(), 1.0, 0.1, 2.0, None).unwrap();
    let covariance = |osc: &Oscillator<f64>, nu: &NoiseCovariance<f64>| {
        let (mut t_worst, mut n_worst) = (0.0f64, 0.0f64);
        for b in 0..qtrain.len() {
            for a in 0..b {
                let (tr, nr) = osc
                    .markov_check(qtrain.node_time(b), qtrain.node_time(a), nu)
                    .unwrap();
                t_worst = t_worst.max(tr);
                n_worst = n_worst.max(nr);
            }
        }
        (t_worst, n_worst)
    };
    let (qt, qn) = covariance(&restricted, &white);
    let (ft, fnr) = covariance(&full, &white);
    let (_, coloured) = covariance(&restricted, &nu);
    let pass = jc_markov < 1e-12 && qt < 1e-9 && qn < 1e-9 && jc_full >= 1e-4;
    outcome(
        pass,
        format!(
            "JC j=1 {jc_markov:.2e}, unrestricted {jc_full:.2e}; QLE j=1 (𝕋 {qt:.2e}, ℕ {qn:.2e}); \
             QLE unrestricted (𝕋 {ft:.2e}, ℕ {fnr:.2e}); j=1 with coloured ν, ℕ {coloured:.2e}"
        ),
    )
}

fn qle_convergence() -> Outcome {
    let (omega, kappa, lambda, t) = (1.0f64, 0.1, 2.0, 1.0);
    let exact = green_constant(t, omega, kappa, lambda).unwrap();
    let mut rel = Vec::new();
    for n in [10, 30, 100, 300, 1000, 2000] {
        let train = DeltaTrain::uniform(t, n).unwrap();
        let osc = Oscillator::lorentz_drude(train, omega, kappa, lambda, None).unwrap();
        rel.push(((osc.script_g(t).unwrap() - exact) / exact).abs());
    }
    let decreasing = rel.windows(2).all(|w| w[1] < w[0]);
    let last = rel[rel.len() - 1];
    outcome(
        decreasing && last < 1e-2,
        format!("G(T) = {exact:.10}; relative errors {}", sci(&rel)),
    )
}

fn covariance_agreement() -> Outcome {
    let (omega, kappa, lambda, beta, duration, n) = (1.0, 0.1, 2.0, 1.0, 1.0, 2000);
    let train = DeltaTrain::uniform(duration, n).unwrap();
    let source = SpectralSource::lorentz_drude(kappa, lambda).unwrap();
    let nu = noise_nu(&train, &source, beta).unwrap();
    let osc = Oscillator::lorentz_drude(train, omega, kappa, lambda, None).unwrap();
    let params = OscillatorParams::coherent(omega, 1.0, 0.0).unwrap();
    let mut worst = 0.0f64;
    for i in 0..=10 {
        let t = duration * i as f64 / 10.0;
        let ours = osc.transfer_matrices(t, &nu).unwrap().q_squared(&params);
        let reference = reference_q2(t, &params, kappa, lambda, beta).unwrap();
        worst = worst.max(((ours - reference) / reference).abs());
    }
    outcome(
        worst < 1e-2,
        format!("max relative |Δ⟨Q²⟩| over ΩT ∈ [0, 1] at N = 2000: {worst:.3e}"),
    )
}

fn spectral_identities() -> Outcome {
    let opts = QuadratureOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-13,
        max_subdivisions: 4000,
    };
    let mut dtft_worst = 0.0f64;
    for kappa in [0.1, 1.0] {
        for lambda in [1.0, 2.0] {
            for (duration, count) in [(1.0, 100), (1.0, 10), (30.0, 40)] {
                let density = PeriodicSpectralDensity::new(kappa, lambda, duration, count).unwrap();
                let delta = duration / count as f64;
                for k in 0..=10i64 {
                    let got = dtft_gamma_k(k, &density, &opts).unwrap();
                    let want = if k == 0 {
                        0.0
                    } else {
                        kappa * lambda * lambda * (-lambda * delta * k as f64).exp()
                    };
                    dtft_worst = dtft_worst.max((got - want).abs());
                }
            }
        }
    }
    let mut poisson_worst = 0.0f64;
    for omega in [0.25, 0.5, 1.0, 2.0, 5.0] {
        poisson_worst = poisson_worst.max(poisson_check(omega, 0.1, 2.0, 1.0, 2000, 200).abs_diff);
    }
    let coarse = poisson_check(1.0, 1.0, 1.0, 1.0, 10, 200).abs_diff;
    outcome(
        dtft_worst < 1e-8 && poisson_worst < 1e-6,
        format!(
            "DTFT roundtrip max error {dtft_worst:.2e}; Poisson residual (M = 200, QLE train N = 2000) {poisson_worst:.2e}; \
             coarse train δ = 0.1 residual {coarse:.2e}"
        ),
    )
}

fn physicality() -> Outcome {
    let mut rng = common::rng(0xacce_0009);
    let mut values = Vec::new();
    let params = JcParams::new(0.1, 1.0).unwrap();
    let train = DeltaTrain::uniform(1.0, 1000).unwrap();
    values.extend_from_slice(jc::transfer(&train, &params).unwrap().node_values());
    let (train, params) = underdamped_train();
    values.extend_from_slice(
        jc::transfer_restricted(&train, &params, Some(1))
            .unwrap()
            .node_values(),
    );

    let identity = Mat2::<Complex<f64>>::identity();
    let mut completeness = 0.0f64;
    for &v in &values {
        let ops = kraus_operators(v, false).unwrap();
        completeness = completeness.max((kraus_completeness(&ops) - identity).max_abs());
    }
    let (mut trace_err, mut psd_floor) = (0.0f64, f64::INFINITY);
    for _ in 0..100 {
        let a = Mat2::new(
            common::complex(&mut rng, 1.0),
            common::complex(&mut rng, 1.0),
            common::complex(&mut rng, 1.0),
            common::complex(&mut rng, 1.0),
        );
        let mut rho = a * a.adjoint();
        let tr = rho.trace();
        rho = rho.scale(Complex::new(1.0, 0.0) / tr);
        let v = values[rng.random_range(0..values.len())];
        let out = jc::kraus_channel(v, &rho).unwrap();
        trace_err = trace_err.max((out.trace() - Complex::new(1.0, 0.0)).norm());
        psd_floor = psd_floor.min(out.hermitian_eigenvalues()[0]);
    }

    let qtrain = DeltaTrain::uniform(1.0, 400).unwrap();
    let source = SpectralSource::lorentz_drude(0.1, 2.0).unwrap();
    let osc = Oscillator::lorentz_drude(qtrain.clone(), 1.0, 0.1, 2.0, None).unwrap();
    let state = OscillatorParams::coherent(1.0, 1.0, 0.0).unwrap();
    let (mut n_floor, mut v_floor) = (f64::INFINITY, f64::INFINITY);
    for beta in [0.5, 1.0, 4.0] {
        let nu = noise_nu(&qtrain, &source, beta).unwrap();
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            let pair = osc.transfer_matrices(t, &nu).unwrap();
            n_floor = n_floor.min(pair.uncertainty_floor());
            v_floor = v_floor.min(covariance_floor(&pair.evolve_covariance(&state.covariance)));
        }
    }
    let pass = completeness <= 4.0 * f64::EPSILON
        && trace_err < 1e-14
        && psd_floor >= -1e-15
        && n_floor >= -1e-9
        && v_floor >= -1e-9;
    outcome(
        pass,
        format!(
            "Kraus completeness {completeness:.1e} over {} amplitudes; channel trace error {trace_err:.1e}, \
             min eigenvalue {psd_floor:.2e}; ℕ floor {n_floor:.2e}; V(t) floor {v_floor:.2e}",
            values.len()
        ),
    )
}

fn choi_spectrum_check() -> Outcome {
    let mut eig_worst = 0.0f64;
    let mut bound_ratio = 0.0f64;
    for kappa in [0.01, 0.1, 1.0, 5.0] {
        for delta in [1e-3, 1e-2, 2e-2, 0.1] {
            if kappa * delta > 0.1 {
                continue;
            }
            for gi in -4..=4 {
                let gamma = kappa * gi as f64 / 2.0;
                for hi in 0..=4 {
                    let h = kappa * kappa * hi as f64 / 4.0;
                    let spec = jc::choi_spectrum(gamma, h, delta).unwrap();
                    let m = jc::choi_matrix(gamma, h, delta);
                    let mat = Matrix4::from_fn(|r, c| m[r][c]);
                    let mut numeric: Vec<f64> =
                        mat.symmetric_eigenvalues().iter().copied().collect();
                    let mut closed = spec.eigenvalues.to_vec();
                    numeric.sort_by(f64::total_cmp);
                    closed.sort_by(f64::total_cmp);
                    for (a, b) in numeric.iter().zip(&closed) {
                        eig_worst = eig_worst.max((a - b).abs());
                    }
                    let gap = (spec.g_exact - spec.g_leading).abs();
                    bound_ratio = bound_ratio.max(gap / (3.0 * kappa * kappa * delta));
                }
            }
        }
    }
    outcome(
        eig_worst < 1e-12 && bound_ratio <= 1.0,
        format!("closed-form vs numeric eigenvalues {eig_worst:.2e}; max |g − g_leading| / (3κ²δ) = {bound_ratio:.3}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("JC convergence", jc_convergence, Duration::from_secs(10)),
        (
            "nilpotency and resolvent",
            nilpotency_and_resolvent,
            Duration::from_secs(5),
        ),
        (
            "diagram-sum equivalence",
            diagram_sums,
            Duration::from_secs(5),
        ),
        (
            "Markovianity of nearest-neighbour arcs",
            markovian_arcs,
            Duration::from_secs(5),
        ),
        (
            "semigroup identities",
            semigroup_identities,
            Duration::from_secs(10),
        ),
        ("QLE convergence", qle_convergence, Duration::from_secs(60)),
        (
            "covariance agreement",
            covariance_agreement,
            Duration::from_secs(300),
        ),
        (
            "spectral identities",
            spectral_identities,
            Duration::from_secs(5),
        ),
        ("physicality suite", physicality, Duration::from_secs(30)),
        ("Choi spectrum", choi_spectrum_check, Duration::from_secs(5)),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let pass = result.pass && elapsed <= budget;
        if !pass {
            failures += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {} [{:.2}s of {}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            result.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
