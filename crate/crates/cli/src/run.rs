//! One function per subcommand; each returns the finished table.

use deltatrain::diagram::{enumerate_restricted, sum_check, weight};
use deltatrain::jc::{self, decay_rates, exact_amplitude, jc_kernel, rhp_measure, JcParams};
use deltatrain::qle::{qle_kernel, Oscillator, OscillatorParams};
use deltatrain::reference::{green_constant, reference_q2};
use deltatrain::spectral::{noise_nu_with, NoiseOptions, SpectralSource};
use deltatrain::{
    Classification, DeltaTrain, FreePropagator, KernelSpec, MemorySolver, NoiseSequence,
};
use num_complex::Complex;

use crate::config::{ChiProfile, Command, Model, RunConfig};
use crate::output::{Cell, Document};
use crate::CliError;

fn numerical(context: impl Into<String>) -> impl FnOnce(deltatrain::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Numerical { context, source }
}

fn train(cfg: &RunConfig, n: usize) -> Result<DeltaTrain<f64>, CliError> {
    DeltaTrain::new(cfg.duration, cfg.chi.amplitudes(n))
        .map_err(numerical(format!("building the N = {n} train")))
}

fn span_label(span: Option<usize>) -> String {
    span.map_or_else(|| "full".to_string(), |j| j.to_string())
}

pub fn execute(cfg: &RunConfig) -> Result<Document, CliError> {
    let mut doc = match cfg.command {
        Command::JcConverge => jc_converge(cfg),
        Command::JcDecay => jc_decay(cfg),
        Command::QleConverge => qle_converge(cfg),
        Command::QleCovariance => qle_covariance(cfg),
        Command::Diagrams => diagrams(cfg),
    }?;
    if let ChiProfile::Tabulated { path, .. } = &cfg.chi {
        doc.note("chi-table", path.display().to_string());
    }
    Ok(doc)
}

/// `|𝒯(T)|` on each train of the sweep against the closed form.
pub fn jc_converge(cfg: &RunConfig) -> Result<Document, CliError> {
    let mut doc = Document::new(cfg, vec!["N", "T_delta", "T_exact", "abs_err"]);
    doc.note(
        "columns",
        "moduli of the transfer function at T; abs_err is the complex distance",
    );
    let params = JcParams::new(cfg.kappa, 1.0).map_err(numerical("coupling"))?;
    let exact = exact_amplitude(cfg.duration, cfg.kappa, 1.0);
    for &n in &cfg.n {
        let value = jc::transfer(&train(cfg, n)?, &params)
            .and_then(|tf| tf.value(cfg.duration))
            .map_err(numerical(format!("transfer function at N = {n}")))?;
        doc.push(vec![
            Cell::Int(n),
            Cell::Num(value.norm()),
            Cell::Num(exact.norm()),
            Cell::Num((value - exact).norm()),
        ]);
    }
    Ok(doc)
}

/// Decay rates per node and the RHP measure, for each arc-span restriction.
pub fn jc_decay(cfg: &RunConfig) -> Result<Document, CliError> {
    let mut doc = Document::new(cfg, vec!["j", "k", "t_k", "gamma_k", "rhp_measure"]);
    let n = cfg.n[0];
    let train = train(cfg, n)?;
    let params = JcParams::new(cfg.kappa, 1.0).map_err(numerical("coupling"))?;
    for &span in &cfg.spans {
        let gammas = decay_rates(&train, &params, span).map_err(numerical(format!(
            "decay rates for j = {}",
            span_label(span)
        )))?;
        let rhp = rhp_measure(&gammas, train.spacing());
        doc.note(
            &format!("rhp_measure[j={}]", span_label(span)),
            format!("{rhp:.14e}"),
        );
        for (i, &g) in gammas.iter().enumerate() {
            doc.push(vec![
                Cell::Text(span_label(span)),
                Cell::Int(i + 1),
                Cell::Num(train.node_time(i)),
                Cell::Num(g),
                Cell::Num(rhp),
            ]);
        }
    }
    Ok(doc)
}

/// `G_{f_P}(T)` on each train against the partial-fraction Green function.
pub fn qle_converge(cfg: &RunConfig) -> Result<Document, CliError> {
    let mut doc = Document::new(cfg, vec!["N", "G_delta", "G_reference", "rel_err"]);
    let t = cfg.duration;
    let exact = green_constant(t, 1.0, cfg.kappa, cfg.lambda)
        .map_err(numerical("reference Green function"))?;
    for &n in &cfg.n {
        let g = Oscillator::lorentz_drude(train(cfg, n)?, 1.0, cfg.kappa, cfg.lambda, None)
            .and_then(|osc| osc.script_g(t))
            .map_err(numerical(format!("oscillator solve at N = {n}")))?;
        doc.push(vec![
            Cell::Int(n),
            Cell::Num(g),
            Cell::Num(exact),
            Cell::Num(((g - exact) / exact).abs()),
        ]);
    }
    Ok(doc)
}

/// `⟨Q²(t)⟩` from the thermal delta train against the continuum reference.
pub fn qle_covariance(cfg: &RunConfig) -> Result<Document, CliError> {
    let mut doc = Document::new(cfg, vec!["t", "Q2_delta", "Q2_reference", "rel_err"]);
    doc.note(
        "initial-state",
        "coherent mean (q0, p0) with vacuum covariance diag(1/Omega, Omega)",
    );
    let n = cfg.n[0];
    let train = train(cfg, n)?;
    let source = SpectralSource::lorentz_drude(cfg.kappa, cfg.lambda).map_err(numerical("bath"))?;
    let opts = NoiseOptions {
        units: cfg.units,
        ..NoiseOptions::default()
    };
    let nu =
        noise_nu_with(&train, &source, cfg.beta, &opts).map_err(numerical("noise covariance"))?;
    let osc = Oscillator::lorentz_drude(train, 1.0, cfg.kappa, cfg.lambda, None)
        .map_err(numerical("oscillator"))?;
    let params =
        OscillatorParams::coherent(1.0, cfg.q0, cfg.p0).map_err(numerical("initial state"))?;
    for i in 0..cfg.points {
        let t = cfg.duration * i as f64 / (cfg.points - 1) as f64;
        let ours = osc
            .transfer_matrices(t, &nu)
            .map_err(numerical(format!("transfer matrices at t = {t}")))?
            .q_squared(&params);
        let reference = reference_q2(t, &params, cfg.kappa, cfg.lambda, cfg.beta)
            .map_err(numerical(format!("reference at t = {t}")))?;
        doc.push(vec![
            Cell::Num(t),
            Cell::Num(ours),
            Cell::Num(reference),
            Cell::Num(((ours - reference) / reference).abs()),
        ]);
    }
    Ok(doc)
}

/// Every diagram of the expansion at `t = T`, with its weight.
pub fn diagrams(cfg: &RunConfig) -> Result<Document, CliError> {
    let mut doc = Document::new(
        cfg,
        vec!["index", "arcs", "classification", "weight_re", "weight_im"],
    );
    let n = cfg.n[0];
    let span = cfg.spans[0];
    let train = train(cfg, n)?;
    let (kernel, prop, initials): (KernelSpec<f64>, _, Vec<Complex<f64>>) = match cfg.model {
        Model::Jc => (
            jc_kernel(&JcParams::new(cfg.kappa, 1.0).map_err(numerical("coupling"))?),
            FreePropagator::unit(),
            vec![Complex::new(1.0, 0.0)],
        ),
        Model::Qle => (
            qle_kernel(
                &SpectralSource::lorentz_drude(cfg.kappa, cfg.lambda).map_err(numerical("bath"))?,
            ),
            FreePropagator::harmonic(1.0).map_err(numerical("propagator"))?,
            vec![Complex::new(cfg.q0, 0.0), Complex::new(cfg.p0, 0.0)],
        ),
    };
    let kernel = match span {
        Some(j) => kernel.restricted(j),
        None => kernel,
    };
    let t = cfg.duration;
    let noise = NoiseSequence::zeros(n);
    let solver = MemorySolver::new(train.clone(), kernel.clone(), prop.clone())
        .map_err(numerical("solver"))?;
    let f = solver
        .free_values(&initials)
        .map_err(numerical("free solution"))?;
    for (i, d) in enumerate_restricted(n, span).iter().enumerate() {
        let w = weight(d, t, &solver, &f);
        let class = match d.classify() {
            Classification::Markovian => "markovian",
            Classification::NonMarkovian => "non-markovian",
        };
        doc.push(vec![
            Cell::Int(i),
            Cell::Text(d.label()),
            Cell::Text(class.into()),
            Cell::Num(w.re),
            Cell::Num(w.im),
        ]);
    }
    let check = sum_check(t, &train, &kernel, &noise, &initials, &prop)
        .map_err(numerical("diagram sum"))?;
    doc.note("diagram-count", check.diagram_count.to_string());
    doc.note(
        "sum-check-abs-difference",
        format!("{:.14e}", check.abs_difference),
    );
    Ok(doc)
}
