//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Floats accept a `pi`
//! suffix (`16pi`). Every violation is collected before reporting.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    EquilibriumCheck,
    Simulate,
    LinearResponse,
    StabilityCheck,
    Instability,
    Picard,
    Norms,
    ScatteringProbe,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::EquilibriumCheck,
        Kind::Simulate,
        Kind::LinearResponse,
        Kind::StabilityCheck,
        Kind::Instability,
        Kind::Picard,
        Kind::Norms,
        Kind::ScatteringProbe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::EquilibriumCheck => "equilibrium-check",
            Kind::Simulate => "simulate",
            Kind::LinearResponse => "linear-response",
            Kind::StabilityCheck => "stability-check",
            Kind::Instability => "instability",
            Kind::Picard => "picard",
            Kind::Norms => "norms",
            Kind::ScatteringProbe => "scattering-probe",
        }
    }

    /// Keys that must appear explicitly in the file.
    pub fn required(self) -> &'static [&'static str] {
        match self {
            Kind::EquilibriumCheck => &["f.kind"],
            Kind::Simulate => &["f.kind", "w.kind", "T"],
            Kind::LinearResponse => &["f.kind", "grid.d"],
            Kind::StabilityCheck => &["f.kind", "w.kind", "grid.d"],
            Kind::Instability => &["w.kind", "m", "xi"],
            Kind::Picard => &["f.kind", "w.kind", "T"],
            Kind::Norms => &["grid.d"],
            Kind::ScatteringProbe => &["f.kind", "w.kind", "T"],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown experiment kind `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistKind {
    Fermi,
    Bose,
    ZeroTempFermi,
    Gaussian,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotKind {
    Zero,
    Delta,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementKind {
    Modulated,
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Ndjson,
    Csv,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridBlock {
    pub d: usize,
    pub length: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhysicsBlock {
    pub f_kind: DistKind,
    pub f_temperature: f64,
    pub f_mu: f64,
    pub f_width: f64,
    pub w_kind: PotKind,
    pub w_amplitude: f64,
    pub w_width: f64,
    pub mass: Option<f64>,
    /// Two-wave carrier modulus.
    pub xi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericsBlock {
    pub dt: f64,
    pub t_total: f64,
    pub theta: f64,
    pub seed: u64,
    pub stride: usize,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_n: usize,
    pub xi_min: f64,
    pub xi_max: f64,
    pub xi_n: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub r_n: usize,
    pub pert_amplitude: f64,
    pub pert_width: f64,
    pub pert_placement: PlacementKind,
    pub pert_mode: usize,
    pub picard_dt: f64,
    pub picard_iterations: usize,
    pub ball_radius: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputBlock {
    pub dir: Option<PathBuf>,
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub kind: Kind,
    pub grid: GridBlock,
    pub physics: PhysicsBlock,
    pub numerics: NumericsBlock,
    pub output: OutputBlock,
}

/// One problem with the input; `lines` are 1-based source lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub lines: Vec<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lines.as_slice() {
            [] => f.write_str(&self.message),
            [l] => write!(f, "line {l}: {}", self.message),
            ls => {
                let s: Vec<String> = ls.iter().map(|l| l.to_string()).collect();
                write!(f, "lines {}: {}", s.join(", "), self.message)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

/// `(key, default)`; `None` means no default.
const KEYS: &[(&str, Option<&str>)] = &[
    ("kind", None),
    ("grid.d", Some("1")),
    ("grid.L", Some("2pi")),
    ("grid.N", Some("64")),
    ("f.kind", Some("fermi")),
    ("f.T", Some("1")),
    ("f.mu", Some("0")),
    ("f.width", Some("1")),
    ("w.kind", Some("delta")),
    ("w.amplitude", Some("1")),
    ("w.width", Some("1")),
    ("m", None),
    ("xi", Some("1")),
    ("dt", None),
    ("T", Some("1")),
    ("theta", Some("1e-8")),
    ("seed", Some("0")),
    ("stride", Some("100")),
    ("tau.min", Some("0.01")),
    ("tau.max", Some("100")),
    ("tau.n", Some("16")),
    ("xi.min", Some("0.05")),
    ("xi.max", Some("4")),
    ("xi.n", Some("16")),
    ("r.min", Some("0")),
    ("r.max", Some("3")),
    ("r.n", Some("1000")),
    ("pert.amplitude", Some("0.001")),
    ("pert.width", Some("0.5")),
    ("pert.placement", Some("modulated")),
    ("pert.mode", Some("0")),
    ("picard.dt", Some("0.01")),
    ("picard.iterations", Some("12")),
    ("ball.radius", Some("1")),
    ("trials", Some("1000")),
    ("output.dir", None),
    ("output.formats", Some("ndjson,csv,svg")),
];

fn parse_float(s: &str) -> Result<f64, String> {
    let v = if let Some(head) = s.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*');
        let c = if head.is_empty() {
            1.0
        } else {
            head.parse::<f64>().map_err(|e| e.to_string())?
        };
        c * PI
    } else {
        s.parse::<f64>().map_err(|e| e.to_string())?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err("not finite".into())
    }
}

struct Reader<'a> {
    values: BTreeMap<&'static str, (String, Option<usize>)>,
    violations: &'a mut Vec<Violation>,
}

impl Reader<'_> {
    fn raw(&self, key: &str) -> Option<&(String, Option<usize>)> {
        self.values.get(key)
    }

    fn bad(&mut self, key: &str, msg: String) {
        let lines = self.raw(key).and_then(|v| v.1).into_iter().collect();
        self.violations.push(Violation {
            lines,
            message: format!("{key}: {msg}"),
        });
    }

    fn get<T>(&mut self, key: &str, parse: impl Fn(&str) -> Result<T, String>, fallback: T) -> T {
        let Some((text, _)) = self.raw(key).cloned() else {
            return fallback;
        };
        match parse(&text) {
            Ok(v) => v,
            Err(e) => {
                self.bad(key, format!("cannot parse `{text}`: {e}"));
                fallback
            }
        }
    }

    fn float(&mut self, key: &str) -> f64 {
        self.get(key, parse_float, f64::NAN)
    }

    fn uint(&mut self, key: &str) -> usize {
        self.get(key, |s| s.parse::<usize>().map_err(|e| e.to_string()), 0)
    }

    fn check(&mut self, key: &str, ok: bool, msg: &str) {
        if !ok {
            let text = self.raw(key).map(|v| v.0.clone()).unwrap_or_default();
            self.bad(key, format!("`{text}` {msg}"));
        }
    }
}

/// Parses a config whose `kind` key must be present.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_for(None, text)
}

/// Parses a config for `kind`; a `kind` key in the text must then agree.
pub fn parse_config_for(kind: Option<Kind>, text: &str) -> Result<RunConfig, ConfigError> {
    let mut violations = Vec::new();
    let mut given: BTreeMap<&'static str, (String, usize)> = BTreeMap::new();
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    for (no, line) in text.lines().enumerate() {
        let no = no + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            violations.push(Violation {
                lines: vec![no],
                message: format!("expected `key = value`, found `{line}`"),
            });
            continue;
        };
        let (k, v) = (k.trim(), v.trim());
        let Some(&(key, _)) = KEYS.iter().find(|(name, _)| *name == k) else {
            violations.push(Violation {
                lines: vec![no],
                message: format!("unknown key `{k}`"),
            });
            continue;
        };
        if let Some((_, first)) = given.get(key) {
            violations.push(Violation {
                lines: vec![*first, no],
                message: format!("duplicate key `{key}`"),
            });
            continue;
        }
        given.insert(key, (v.to_string(), no));
    }

    let file_kind = given.get("kind").map(|(v, l)| (v.parse::<Kind>(), *l));
    let kind = match (kind, file_kind) {
        (Some(k), None) => Some(k),
        (None, None) => {
            violations.push(Violation {
                lines: vec![],
                message: "missing required key `kind`".into(),
            });
            None
        }
        (k, Some((Err(e), l))) => {
            violations.push(Violation {
                lines: vec![l],
                message: e,
            });
            k
        }
        (Some(k), Some((Ok(fk), l))) if k != fk => {
            violations.push(Violation {
                lines: vec![l],
                message: format!("config declares kind `{fk}` but `{k}` was requested"),
            });
            Some(k)
        }
        (_, Some((Ok(fk), _))) => Some(fk),
    };

    if let Some(k) = kind {
        let missing: Vec<&str> = k
            .required()
            .iter()
            .copied()
            .filter(|r| !given.contains_key(r))
            .collect();
        if !missing.is_empty() {
            violations.push(Violation {
                lines: vec![],
                message: format!("experiment `{k}` requires {}", missing.join(", ")),
            });
        }
    }

    let mut values = BTreeMap::new();
    for &(key, default) in KEYS {
        if let Some((v, l)) = given.get(key) {
            values.insert(key, (v.clone(), Some(*l)));
        } else if let Some(d) = default {
            values.insert(key, (d.to_string(), None));
        }
    }
    let mut r = Reader {
        values,
        violations: &mut violations,
    };

    let d = r.uint("grid.d");
    r.check("grid.d", (1..=4).contains(&d), "out of range: d must be in 1..=4");
    let length = r.float("grid.L");
    r.check("grid.L", length > 0.0, "must be positive");
    let n = r.uint("grid.N");
    r.check("grid.N", n >= 4 && n.is_power_of_two(), "must be a power of two >= 4");

    let f_kind = r.get(
        "f.kind",
        |s| match s {
            "fermi" => Ok(DistKind::Fermi),
            "bose" => Ok(DistKind::Bose),
            "zero-temp-fermi" => Ok(DistKind::ZeroTempFermi),
            "gaussian" => Ok(DistKind::Gaussian),
            "zero" => Ok(DistKind::Zero),
            _ => Err("expected fermi, bose, zero-temp-fermi, gaussian or zero".into()),
        },
        DistKind::Zero,
    );
    let f_temperature = r.float("f.T");
    let f_mu = r.float("f.mu");
    let f_width = r.float("f.width");
    if matches!(f_kind, DistKind::Fermi | DistKind::Bose) {
        r.check("f.T", f_temperature > 0.0, "must be positive");
    }
    if f_kind == DistKind::Bose {
        r.check("f.mu", f_mu < 0.0, "must be negative for bose");
    }
    if f_kind == DistKind::ZeroTempFermi {
        r.check("f.mu", f_mu > 0.0, "must be positive for zero-temp-fermi");
    }
    if f_kind == DistKind::Gaussian {
        r.check("f.width", f_width > 0.0, "must be positive");
    }
    let w_kind = r.get(
        "w.kind",
        |s| match s {
            "zero" => Ok(PotKind::Zero),
            "delta" => Ok(PotKind::Delta),
            "gaussian" => Ok(PotKind::Gaussian),
            _ => Err("expected zero, delta or gaussian".into()),
        },
        PotKind::Zero,
    );
    let w_amplitude = r.float("w.amplitude");
    let w_width = r.float("w.width");
    if w_kind == PotKind::Gaussian {
        r.check("w.width", w_width > 0.0, "must be positive");
    }
    let mass = if r.raw("m").is_some() {
        let m = r.float("m");
        r.check("m", m >= 0.0, "must be nonnegative");
        Some(m)
    } else {
        None
    };
    let xi = r.float("xi");
    r.check("xi", xi >= 0.0, "must be nonnegative");

    // default scales with the box: 1e-3 (L/2π)²
    let dt = if r.raw("dt").is_some() {
        let dt = r.float("dt");
        r.check("dt", dt > 0.0, "must be positive");
        dt
    } else {
        1e-3 * (length / (2.0 * PI)).powi(2)
    };
    let t_total = r.float("T");
    r.check("T", t_total > 0.0, "must be positive");
    let theta = r.float("theta");
    r.check("theta", theta >= 0.0, "must be nonnegative");
    let seed = r.get("seed", |s| s.parse::<u64>().map_err(|e| e.to_string()), 0);
    let stride = r.uint("stride");
    r.check("stride", stride >= 1, "must be at least 1");
    let tau_min = r.float("tau.min");
    let tau_max = r.float("tau.max");
    r.check(
        "tau.min",
        tau_min > 0.0 && tau_min < tau_max,
        "must satisfy 0 < tau.min < tau.max",
    );
    let tau_n = r.uint("tau.n");
    r.check("tau.n", tau_n >= 1, "must be at least 1");
    let xi_min = r.float("xi.min");
    let xi_max = r.float("xi.max");
    r.check(
        "xi.min",
        xi_min >= 0.0 && xi_min < xi_max,
        "must satisfy 0 <= xi.min < xi.max",
    );
    let xi_n = r.uint("xi.n");
    r.check("xi.n", xi_n >= 2, "must be at least 2");
    let r_min = r.float("r.min");
    let r_max = r.float("r.max");
    r.check(
        "r.min",
        r_min >= 0.0 && r_min < r_max,
        "must satisfy 0 <= r.min < r.max",
    );
    let r_n = r.uint("r.n");
    r.check("r.n", r_n >= 2, "must be at least 2");
    let pert_amplitude = r.float("pert.amplitude");
    let pert_width = r.float("pert.width");
    r.check("pert.width", pert_width > 0.0, "must be positive");
    let pert_placement = r.get(
        "pert.placement",
        |s| match s {
            "modulated" => Ok(PlacementKind::Modulated),
            "single" => Ok(PlacementKind::Single),
            _ => Err("expected modulated or single".into()),
        },
        PlacementKind::Modulated,
    );
    let pert_mode = r.uint("pert.mode");
    let picard_dt = r.float("picard.dt");
    r.check("picard.dt", picard_dt > 0.0, "must be positive");
    let picard_iterations = r.uint("picard.iterations");
    r.check("picard.iterations", picard_iterations >= 1, "must be at least 1");
    let ball_radius = r.float("ball.radius");
    r.check("ball.radius", ball_radius > 0.0, "must be positive");
    let trials = r.uint("trials");

    let dir = r.raw("output.dir").map(|v| PathBuf::from(&v.0));
    let formats = r.get(
        "output.formats",
        |s| {
            let mut out = Vec::new();
            for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let f = match part {
                    "ndjson" => Format::Ndjson,
                    "csv" => Format::Csv,
                    "svg" => Format::Svg,
                    _ => return Err(format!("unknown format `{part}`")),
                };
                if !out.contains(&f) {
                    out.push(f);
                }
            }
            Ok(out)
        },
        vec![],
    );

    if !violations.is_empty() {
        return Err(ConfigError { violations });
    }
    Ok(RunConfig {
        kind: kind.expect("kind checked above"),
        grid: GridBlock { d, length, n },
        physics: PhysicsBlock {
            f_kind,
            f_temperature,
            f_mu,
            f_width,
            w_kind,
            w_amplitude,
            w_width,
            mass,
            xi,
        },
        numerics: NumericsBlock {
            dt,
            t_total,
            theta,
            seed,
            stride,
            tau_min,
            tau_max,
            tau_n,
            xi_min,
            xi_max,
            xi_n,
            r_min,
            r_max,
            r_n,
            pert_amplitude,
            pert_width,
            pert_placement,
            pert_mode,
            picard_dt,
            picard_iterations,
            ball_radius,
            trials,
        },
        output: OutputBlock { dir, formats },
    })
}

fn enum_name<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => unreachable!("unit variants serialise to strings"),
    }
}

impl RunConfig {
    /// Every key with its resolved value; parses back to an equal config.
    pub fn echo(&self) -> String {
        let p = &self.physics;
        let n = &self.numerics;
        let mut lines = vec![
            ("kind", self.kind.to_string()),
            ("grid.d", self.grid.d.to_string()),
            ("grid.L", self.grid.length.to_string()),
            ("grid.N", self.grid.n.to_string()),
            ("f.kind", enum_name(&p.f_kind)),
            ("f.T", p.f_temperature.to_string()),
            ("f.mu", p.f_mu.to_string()),
            ("f.width", p.f_width.to_string()),
            ("w.kind", enum_name(&p.w_kind)),
            ("w.amplitude", p.w_amplitude.to_string()),
            ("w.width", p.w_width.to_string()),
        ];
        if let Some(m) = p.mass {
            lines.push(("m", m.to_string()));
        }
        lines.extend([
            ("xi", p.xi.to_string()),
            ("dt", n.dt.to_string()),
            ("T", n.t_total.to_string()),
            ("theta", n.theta.to_string()),
            ("seed", n.seed.to_string()),
            ("stride", n.stride.to_string()),
            ("tau.min", n.tau_min.to_string()),
            ("tau.max", n.tau_max.to_string()),
            ("tau.n", n.tau_n.to_string()),
            ("xi.min", n.xi_min.to_string()),
            ("xi.max", n.xi_max.to_string()),
            ("xi.n", n.xi_n.to_string()),
            ("r.min", n.r_min.to_string()),
            ("r.max", n.r_max.to_string()),
            ("r.n", n.r_n.to_string()),
            ("pert.amplitude", n.pert_amplitude.to_string()),
            ("pert.width", n.pert_width.to_string()),
            ("pert.placement", enum_name(&n.pert_placement)),
            ("pert.mode", n.pert_mode.to_string()),
            ("picard.dt", n.picard_dt.to_string()),
            ("picard.iterations", n.picard_iterations.to_string()),
            ("ball.radius", n.ball_radius.to_string()),
            ("trials", n.trials.to_string()),
        ]);
        if let Some(d) = &self.output.dir {
            lines.push(("output.dir", d.display().to_string()));
        }
        let formats: Vec<String> = self.output.formats.iter().map(enum_name).collect();
        lines.push(("output.formats", formats.join(",")));
        let mut s = String::new();
        for (k, v) in lines {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        }
        s
    }

    pub fn wants(&self, f: Format) -> bool {
        self.output.formats.contains(&f)
    }
}
