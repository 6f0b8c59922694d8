//! Run configuration: `key = value` files, flag overrides, validation.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use deltatrain::spectral::ThermalUnits;

/// Harness subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    JcConverge,
    JcDecay,
    QleConverge,
    QleCovariance,
    Diagrams,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::JcConverge => "jc-converge",
            Command::JcDecay => "jc-decay",
            Command::QleConverge => "qle-converge",
            Command::QleCovariance => "qle-covariance",
            Command::Diagrams => "diagrams",
        }
    }

    /// Keys accepted by this subcommand, in echo order.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            Command::JcConverge => &[
                "kappa-over-lambda",
                "lambda-T",
                "N",
                "chi",
                "format",
                "output",
            ],
            Command::JcDecay => &[
                "kappa-over-lambda",
                "lambda-T",
                "N",
                "j",
                "chi",
                "format",
                "output",
            ],
            Command::QleConverge => &[
                "kappa-over-omega",
                "lambda-over-omega",
                "omega-T",
                "N",
                "chi",
                "format",
                "output",
            ],
            Command::QleCovariance => &[
                "kappa-over-omega",
                "lambda-over-omega",
                "omega-T",
                "beta",
                "N",
                "points",
                "q0",
                "p0",
                "units",
                "chi",
                "format",
                "output",
            ],
            Command::Diagrams => &[
                "model",
                "kappa-over-lambda",
                "lambda-T",
                "kappa-over-omega",
                "lambda-over-omega",
                "omega-T",
                "N",
                "j",
                "q0",
                "p0",
                "format",
                "output",
            ],
        }
    }

    fn default_value(self, key: &str) -> Option<&'static str> {
        let v = match (self, key) {
            (Command::JcDecay, "kappa-over-lambda") => "2.5",
            (Command::JcDecay, "lambda-T") => "30",
            (Command::JcDecay, "N") => "40",
            (Command::JcDecay, "j") => "1,2,3,4",
            (Command::QleCovariance, "N") => "2000",
            (Command::Diagrams, "N") => "4",
            (Command::Diagrams, "j") => "full",
            (_, "kappa-over-lambda") => "0.1",
            (_, "lambda-T") => "1",
            (_, "kappa-over-omega") => "0.1",
            (_, "lambda-over-omega") => "2",
            (_, "omega-T") => "1",
            (_, "beta") => "1",
            (Command::JcConverge, "N") => "10,30,100,300,1000",
            (_, "N") => "10..2000",
            (_, "points") => "11",
            (_, "q0") => "1",
            (_, "p0") => "0",
            (_, "units") => "physical",
            (_, "chi") => "constant",
            (_, "format") => "csv",
            (_, "model") => "jc",
            _ => return None,
        };
        Some(v)
    }

    /// Frequency that sets the unit of time.
    pub fn scale(self, model: Model) -> &'static str {
        match model {
            Model::Jc => "Lambda",
            Model::Qle => "Omega",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Jc,
    Qle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Switching profile.
#[derive(Debug, Clone, PartialEq)]
pub enum ChiProfile {
    Constant,
    /// Amplitudes read from a file, one per line.
    Tabulated {
        path: PathBuf,
        values: Vec<f64>,
    },
}

impl ChiProfile {
    pub fn amplitudes(&self, n: usize) -> Vec<f64> {
        match self {
            ChiProfile::Constant => vec![1.0; n],
            ChiProfile::Tabulated { values, .. } => values.clone(),
        }
    }
}

/// A failed constraint on one field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub constraint: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.constraint)
    }
}

fn violation(field: &str, constraint: impl Into<String>) -> Violation {
    Violation {
        field: field.to_string(),
        constraint: constraint.into(),
    }
}

/// Raw `key → value` settings before validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawConfig {
    pub command: Command,
    pub values: BTreeMap<String, String>,
}

impl RawConfig {
    /// Defaults, then the file (if any), then flags.
    pub fn layered(
        command: Command,
        file: Option<&Path>,
        flags: &[(&str, Option<String>)],
    ) -> Result<Self, Vec<Violation>> {
        let mut values = BTreeMap::new();
        for key in command.keys() {
            if let Some(v) = command.default_value(key) {
                values.insert(key.to_string(), v.to_string());
            }
        }
        if let Some(path) = file {
            let text = fs::read_to_string(path).map_err(|e| {
                vec![violation(
                    "config",
                    format!("cannot read {}: {e}", path.display()),
                )]
            })?;
            let parsed = parse_file(&text)?;
            let mut unknown = Vec::new();
            for (k, v) in parsed {
                if command.keys().contains(&k.as_str()) {
                    values.insert(k, v);
                } else {
                    unknown.push(violation(
                        &k,
                        format!("not a setting of {}", command.name()),
                    ));
                }
            }
            if !unknown.is_empty() {
                return Err(unknown);
            }
        }
        for (k, v) in flags {
            if let Some(v) = v {
                values.insert(k.to_string(), v.clone());
            }
        }
        Ok(Self { command, values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_file(text: &str) -> Result<Vec<(String, String)>, Vec<Violation>> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => {
                out.push((k.trim().to_string(), v.trim().to_string()))
            }
            _ => errors.push(violation(
                "config",
                format!("line {}: expected `key = value`", i + 1),
            )),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

/// Expands an `N` sweep: a comma list, or `a..b` on the 1–3–10 ladder with both endpoints.
pub fn parse_sweep(s: &str) -> Result<Vec<usize>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("sweep is empty".into());
    }
    let values = if let Some((a, b)) = s.split_once("..") {
        let a: usize = a
            .trim()
            .parse()
            .map_err(|_| format!("bad range start `{a}`"))?;
        let b: usize = b
            .trim()
            .parse()
            .map_err(|_| format!("bad range end `{b}`"))?;
        if a == 0 || b < a {
            return Err(format!("range {a}..{b} must satisfy 1 ≤ a ≤ b"));
        }
        let mut v = vec![a];
        let mut decade = 1usize;
        while decade <= b {
            for m in [1, 3] {
                let x = m * decade;
                if x > a && x < b {
                    v.push(x);
                }
            }
            decade = match decade.checked_mul(10) {
                Some(d) => d,
                None => break,
            };
        }
        if b > a {
            v.push(b);
        }
        v
    } else {
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("bad entry `{}`", p.trim()))
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    if values.contains(&0) {
        return Err("entries must be ≥ 1".into());
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err("entries must be strictly increasing".into());
    }
    Ok(values)
}

/// Restriction list: positive spans, or `full` for no restriction.
pub fn parse_spans(s: &str) -> Result<Vec<Option<usize>>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("list is empty".into());
    }
    let values = s
        .split(',')
        .map(|p| match p.trim() {
            "full" => Ok(None),
            x => match x.parse::<usize>() {
                Ok(0) | Err(_) => Err(format!("bad entry `{x}` (positive integer or `full`)")),
                Ok(j) => Ok(Some(j)),
            },
        })
        .collect::<Result<Vec<_>, _>>()?;
    let sorted = values.windows(2).all(|w| match (w[0], w[1]) {
        (Some(a), Some(b)) => a < b,
        (Some(_), None) => true,
        _ => false,
    });
    if !sorted {
        return Err("entries must be strictly increasing, `full` last".into());
    }
    Ok(values)
}

/// Validated settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub model: Model,
    /// `κ/Λ` (qubit) or `κ/Ω` (oscillator).
    pub kappa: f64,
    /// `Λ/Ω` for the oscillator; the qubit uses `Λ = 1`.
    pub lambda: f64,
    /// `ΛT` or `ΩT`.
    pub duration: f64,
    pub beta: f64,
    pub n: Vec<usize>,
    pub spans: Vec<Option<usize>>,
    pub points: usize,
    pub q0: f64,
    pub p0: f64,
    pub units: ThermalUnits,
    pub chi: ChiProfile,
    pub format: Format,
    pub output: Option<PathBuf>,
    /// Settings as given, for the output header.
    pub echo: Vec<(String, String)>,
}

struct Reader<'a> {
    raw: &'a RawConfig,
    errors: Vec<Violation>,
}

impl Reader<'_> {
    fn has(&self, key: &str) -> bool {
        self.raw.command.keys().contains(&key)
    }

    fn text(&self, key: &str) -> String {
        self.raw.get(key).unwrap_or_default().to_string()
    }

    fn positive(&mut self, key: &str) -> f64 {
        if !self.has(key) {
            return f64::NAN;
        }
        match self.text(key).parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => v,
            Ok(v) => {
                self.errors
                    .push(violation(key, format!("must be finite and > 0, got {v}")));
                f64::NAN
            }
            Err(_) => {
                self.errors.push(violation(
                    key,
                    format!("not a number: `{}`", self.text(key)),
                ));
                f64::NAN
            }
        }
    }

    fn finite(&mut self, key: &str) -> f64 {
        if !self.has(key) {
            return 0.0;
        }
        match self.text(key).parse::<f64>() {
            Ok(v) if v.is_finite() => v,
            _ => {
                self.errors.push(violation(
                    key,
                    format!("not a finite number: `{}`", self.text(key)),
                ));
                0.0
            }
        }
    }
}

/// Every constraint the settings break; empty iff [`RunConfig::from_raw`] succeeds.
pub fn validate(raw: &RawConfig) -> Vec<Violation> {
    match RunConfig::from_raw(raw) {
        Ok(_) => Vec::new(),
        Err(v) => v,
    }
}

impl RunConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, Vec<Violation>> {
        let command = raw.command;
        let mut r = Reader {
            raw,
            errors: Vec::new(),
        };

        let model = match (command, r.text("model").as_str()) {
            (Command::JcConverge | Command::JcDecay, _) => Model::Jc,
            (Command::QleConverge | Command::QleCovariance, _) => Model::Qle,
            (Command::Diagrams, "jc") => Model::Jc,
            (Command::Diagrams, "qle") => Model::Qle,
            (Command::Diagrams, other) => {
                r.errors.push(violation(
                    "model",
                    format!("expected `jc` or `qle`, got `{other}`"),
                ));
                Model::Jc
            }
        };
        let (kappa, lambda, duration) = match model {
            Model::Jc => (r.positive("kappa-over-lambda"), 1.0, r.positive("lambda-T")),
            Model::Qle => (
                r.positive("kappa-over-omega"),
                r.positive("lambda-over-omega"),
                r.positive("omega-T"),
            ),
        };
        let beta = if r.has("beta") {
            r.positive("beta")
        } else {
            1.0
        };
        let (q0, p0) = (r.finite("q0"), r.finite("p0"));

        let n = match parse_sweep(&r.text("N")) {
            Ok(v) => v,
            Err(e) => {
                r.errors.push(violation("N", e));
                Vec::new()
            }
        };
        let single_n = matches!(
            command,
            Command::JcDecay | Command::QleCovariance | Command::Diagrams
        );
        if single_n && n.len() > 1 {
            r.errors.push(violation(
                "N",
                format!("{} takes a single node count", command.name()),
            ));
        }
        if command == Command::Diagrams
            && n.iter()
                .any(|&x| x > deltatrain::diagram::MAX_ENUMERATION_NODES)
        {
            r.errors.push(violation(
                "N",
                format!(
                    "diagram enumeration is limited to N ≤ {}",
                    deltatrain::diagram::MAX_ENUMERATION_NODES
                ),
            ));
        }

        let spans = if r.has("j") {
            match parse_spans(&r.text("j")) {
                Ok(v) => v,
                Err(e) => {
                    r.errors.push(violation("j", e));
                    Vec::new()
                }
            }
        } else {
            vec![None]
        };
        if command == Command::Diagrams && spans.len() > 1 {
            r.errors
                .push(violation("j", "diagrams takes a single restriction"));
        }

        let points = if r.has("points") {
            match r.text("points").parse::<usize>() {
                Ok(p) if p >= 2 => p,
                _ => {
                    r.errors.push(violation("points", "must be an integer ≥ 2"));
                    0
                }
            }
        } else {
            0
        };
        let units = match r.text("units").as_str() {
            "physical" | "" => ThermalUnits::Physical,
            "literal" => ThermalUnits::Literal,
            other => {
                r.errors.push(violation(
                    "units",
                    format!("expected `physical` or `literal`, got `{other}`"),
                ));
                ThermalUnits::Physical
            }
        };
        let format = match r.text("format").as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => {
                r.errors.push(violation(
                    "format",
                    format!("expected `csv` or `json`, got `{other}`"),
                ));
                Format::Csv
            }
        };
        let chi = if r.has("chi") {
            match r.text("chi").as_str() {
                "constant" => ChiProfile::Constant,
                path => match read_table(Path::new(path)) {
                    Ok(values) => {
                        if n.iter().any(|&x| x != values.len()) {
                            r.errors.push(violation(
                                "chi",
                                format!("table has {} amplitudes but N = {:?}", values.len(), n),
                            ));
                        }
                        ChiProfile::Tabulated {
                            path: PathBuf::from(path),
                            values,
                        }
                    }
                    Err(e) => {
                        r.errors.push(violation("chi", e));
                        ChiProfile::Constant
                    }
                },
            }
        } else {
            ChiProfile::Constant
        };
        let output = raw
            .get("output")
            .filter(|s| !s.is_empty())
            .map(PathBuf::from);

        if !r.errors.is_empty() {
            return Err(r.errors);
        }
        let echo = command
            .keys()
            .iter()
            .filter(|k| **k != "output")
            .filter(|k| match (command, model) {
                (Command::Diagrams, Model::Jc) => !matches!(
                    **k,
                    "kappa-over-omega" | "lambda-over-omega" | "omega-T" | "q0" | "p0"
                ),
                (Command::Diagrams, Model::Qle) => !matches!(**k, "kappa-over-lambda" | "lambda-T"),
                _ => true,
            })
            .filter_map(|k| raw.get(k).map(|v| (k.to_string(), v.to_string())))
            .collect();
        Ok(Self {
            command,
            model,
            kappa,
            lambda,
            duration,
            beta,
            n,
            spans,
            points,
            q0,
            p0,
            units,
            chi,
            format,
            output,
            echo,
        })
    }
}

/// Switching amplitudes, one number per line; `#` comments allowed.
fn read_table(path: &Path) -> Result<Vec<f64>, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            _ => {
                return Err(format!(
                    "{} line {}: not a finite number",
                    path.display(),
                    i + 1
                ))
            }
        }
    }
    if values.is_empty() {
        return Err(format!("{} holds no amplitudes", path.display()));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(command: Command, pairs: &[(&str, &str)]) -> RawConfig {
        let flags: Vec<(&str, Option<String>)> = pairs
            .iter()
            .map(|(k, v)| (*k, Some(v.to_string())))
            .collect();
        RawConfig::layered(command, None, &flags).unwrap()
    }

    #[test]
    fn sweep_ladder() {
        assert_eq!(
            parse_sweep("10..2000").unwrap(),
            vec![10, 30, 100, 300, 1000, 2000]
        );
        assert_eq!(parse_sweep("5..5").unwrap(), vec![5]);
        assert_eq!(parse_sweep("7..40").unwrap(), vec![7, 10, 30, 40]);
        assert_eq!(parse_sweep("10, 30,100").unwrap(), vec![10, 30, 100]);
        assert!(parse_sweep("").is_err());
        assert!(parse_sweep("30,10").is_err());
        assert!(parse_sweep("0..10").is_err());
    }

    #[test]
    fn span_lists() {
        assert_eq!(
            parse_spans("1,2,full").unwrap(),
            vec![Some(1), Some(2), None]
        );
        assert!(parse_spans("0").is_err());
        assert!(parse_spans("full,1").is_err());
    }

    #[test]
    fn negative_kappa_is_one_violation() {
        let v = validate(&raw(Command::JcConverge, &[("kappa-over-lambda", "-0.1")]));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "kappa-over-lambda");
    }

    #[test]
    fn empty_sweep_is_one_violation() {
        let v = validate(&raw(Command::QleConverge, &[("N", "")]));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "N");
    }

    #[test]
    fn decay_defaults_are_valid() {
        let r = raw(
            Command::JcDecay,
            &[
                ("kappa-over-lambda", "2.5"),
                ("N", "40"),
                ("lambda-T", "30"),
                ("j", "1,2,3,4"),
            ],
        );
        assert!(validate(&r).is_empty());
        let cfg = RunConfig::from_raw(&r).unwrap();
        assert_eq!(cfg.spans, vec![Some(1), Some(2), Some(3), Some(4)]);
    }

    #[test]
    fn file_parser_skips_comments() {
        let parsed =
            parse_file("# comment\nkappa-over-lambda = 0.3  # inline\n\nlambda-T=2\n").unwrap();
        assert_eq!(parsed.len(), 2);
        assert!(parse_file("no equals sign").is_err());
    }
}
