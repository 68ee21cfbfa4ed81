//! Run configuration files.
//!
//! One `key = value` pair per line. Blank lines and anything after `#` are
//! ignored. Lists are comma separated. Every key is optional and unknown or
//! repeated keys are rejected.
//!
//! ```text
//! configuration = config2        # config1 | config2
//! model = numeric                # analytic | numeric
//! delta_min_hz = -300000
//! delta_max_hz = 300000
//! points = 2001
//! powers_mW = 1, 10, 22
//! b_fields_mG = 0, 10, 30
//! optical_depth = 1
//! probe_fraction = 0.01          # probe / coupling Rabi ratio (numeric model)
//! coupling_detuning_hz = 0
//! gamma0_per_s = 1e7
//! transit_per_s = 1e3
//! raman_per_s = 1e4
//! rate_scaling = angular         # angular | cyclic
//! extrema = true
//! min_prominence = 1e-4
//! fwhm = true
//! fits = double-lorentzian, interacting-double-dark   # or: none
//! excess = true
//! slope = true
//! output_dir = out
//! format = csv                   # csv | json
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;
use tripod_eit::analysis::ModelKind;
use tripod_eit::{Configuration, RateScaling, RelaxationRates, SweepSpec};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key '{key}' already set on line {first}")]
    DuplicateKey { line: usize, key: String, first: usize },
    #[error("line {line}, field '{field}': {message}")]
    InvalidValue { line: usize, field: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv|json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisToggles {
    pub extrema: bool,
    pub min_prominence: f64,
    pub fwhm: bool,
    pub fits: Vec<ModelKind>,
    pub excess: bool,
    pub slope: bool,
}

impl Default for AnalysisToggles {
    fn default() -> Self {
        Self { extrema: true, min_prominence: 1e-4, fwhm: true, fits: Vec::new(), excess: false, slope: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sweep: SweepSpec,
    pub analysis: AnalysisToggles,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sweep: SweepSpec::new(Configuration::Config1),
            analysis: AnalysisToggles::default(),
            output_dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
        }
    }
}

const KEYS: &[&str] = &[
    "configuration",
    "model",
    "delta_min_hz",
    "delta_max_hz",
    "points",
    "powers_mW",
    "b_fields_mG",
    "optical_depth",
    "probe_fraction",
    "coupling_detuning_hz",
    "gamma0_per_s",
    "transit_per_s",
    "raman_per_s",
    "rate_scaling",
    "extrema",
    "min_prominence",
    "fwhm",
    "fits",
    "excess",
    "slope",
    "output_dir",
    "format",
];

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut seen: Vec<(&str, usize)> = Vec::new();
        let mut rates = (RelaxationRates::GAMMA0_PER_S, RelaxationRates::TRANSIT_PER_S, RelaxationRates::RAMAN_PER_S);
        let mut scaling = RateScaling::default();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax { line, text: content.to_string() });
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(&key) = KEYS.iter().find(|k| **k == key) else {
                return Err(ConfigError::UnknownKey { line, key: key.to_string() });
            };
            if let Some(&(_, first)) = seen.iter().find(|(k, _)| *k == key) {
                return Err(ConfigError::DuplicateKey { line, key: key.to_string(), first });
            }
            seen.push((key, line));

            let invalid = |message: String| ConfigError::InvalidValue { line, field: key.to_string(), message };
            let s = &mut cfg.sweep;
            let a = &mut cfg.analysis;
            match key {
                "configuration" => {
                    s.configuration = value.parse().map_err(|e: tripod_eit::Error| invalid(e.to_string()))?
                }
                "model" => s.backend = value.parse().map_err(|e: tripod_eit::Error| invalid(e.to_string()))?,
                "delta_min_hz" => s.delta_range_hz.0 = parse_f64(value).map_err(invalid)?,
                "delta_max_hz" => s.delta_range_hz.1 = parse_f64(value).map_err(invalid)?,
                "points" => s.points = value.parse().map_err(|e| invalid(format!("'{value}': {e}")))?,
                "powers_mW" => {
                    s.powers_mw = parse_list(value).map_err(invalid)?;
                    if s.powers_mw.is_empty() {
                        return Err(invalid("powers_mW must be non-empty".into()));
                    }
                }
                "b_fields_mG" => {
                    s.b_fields_mg = parse_list(value).map_err(invalid)?;
                    if s.b_fields_mg.is_empty() {
                        return Err(invalid("b_fields_mG must be non-empty".into()));
                    }
                }
                "optical_depth" => s.optical_depth = parse_f64(value).map_err(invalid)?,
                "probe_fraction" => s.probe_fraction = parse_f64(value).map_err(invalid)?,
                "coupling_detuning_hz" => s.coupling_detuning_hz = parse_f64(value).map_err(invalid)?,
                "gamma0_per_s" => rates.0 = parse_f64(value).map_err(invalid)?,
                "transit_per_s" => rates.1 = parse_f64(value).map_err(invalid)?,
                "raman_per_s" => rates.2 = parse_f64(value).map_err(invalid)?,
                "rate_scaling" => scaling = value.parse().map_err(|e: tripod_eit::Error| invalid(e.to_string()))?,
                "extrema" => a.extrema = parse_bool(value).map_err(invalid)?,
                "min_prominence" => a.min_prominence = parse_f64(value).map_err(invalid)?,
                "fwhm" => a.fwhm = parse_bool(value).map_err(invalid)?,
                "fits" => a.fits = parse_fits(value).map_err(invalid)?,
                "excess" => a.excess = parse_bool(value).map_err(invalid)?,
                "slope" => a.slope = parse_bool(value).map_err(invalid)?,
                "output_dir" => {
                    if value.is_empty() {
                        return Err(invalid("output_dir must not be empty".into()));
                    }
                    cfg.output_dir = PathBuf::from(value);
                }
                "format" => cfg.format = value.parse().map_err(invalid)?,
                _ => unreachable!("key list and match arms agree"),
            }
        }

        let line_of = |key: &str| seen.iter().find(|(k, _)| *k == key).map(|(_, l)| *l);
        cfg.sweep.rates =
            RelaxationRates::from_lab(rates.0, rates.1, rates.2, scaling).map_err(|e| {
                match line_of("transit_per_s").or(line_of("raman_per_s")).or(line_of("gamma0_per_s")) {
                    Some(line) => ConfigError::InvalidValue { line, field: "rates".into(), message: e.to_string() },
                    None => ConfigError::Invalid(e.to_string()),
                }
            })?;
        if !(cfg.analysis.min_prominence.is_finite() && cfg.analysis.min_prominence > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "min_prominence must be > 0 (line {})",
                line_of("min_prominence").unwrap_or(0)
            )));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Cross-field checks, run again after command-line overrides.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.sweep.validate().map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

fn parse_f64(value: &str) -> Result<f64, String> {
    let v: f64 = value.parse().map_err(|_| format!("'{value}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{value}' is not finite"))
    }
}

fn parse_list(value: &str) -> Result<Vec<f64>, String> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|item| parse_f64(item.trim())).collect()
}

fn parse_bool(value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        other => Err(format!("'{other}' is not a boolean (true|false)")),
    }
}

fn parse_fits(value: &str) -> Result<Vec<ModelKind>, String> {
    if value.is_empty() || value == "none" {
        return Ok(Vec::new());
    }
    let mut kinds = Vec::new();
    for item in value.split(',').map(str::trim) {
        let kind: ModelKind = item.parse().map_err(|_| {
            let names: Vec<_> = ModelKind::ALL.iter().map(|k| k.as_str()).collect();
            format!("unknown fit model '{item}' (expected one of {})", names.join(", "))
        })?;
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    Ok(kinds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tripod_eit::Backend;

    #[test]
    fn defaults_from_empty_file() {
        let cfg = RunConfig::parse("# nothing here\n\n").unwrap();
        assert_eq!(cfg, RunConfig::default());
    }

    #[test]
    fn parses_all_keys() {
        let text = "configuration = config2\nmodel = analytic\ndelta_min_hz=-1e5\ndelta_max_hz = 1e5 # comment\n\
                    points = 11\npowers_mW = 1, 22\nb_fields_mG = 10\noptical_depth = 2\nfits = single-eit, incoherent-two-eit\n\
                    excess = yes\nslope = off\nformat = json\noutput_dir = results\nrate_scaling = cyclic\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.sweep.configuration, Configuration::Config2);
        assert_eq!(cfg.sweep.backend, Backend::Analytic);
        assert_eq!(cfg.sweep.delta_range_hz, (-1e5, 1e5));
        assert_eq!(cfg.sweep.powers_mw, vec![1.0, 22.0]);
        assert_eq!(cfg.analysis.fits, vec![ModelKind::SingleEit, ModelKind::IncoherentTwoEit]);
        assert!(cfg.analysis.excess && !cfg.analysis.slope);
        assert_eq!(cfg.format, OutputFormat::Json);
        assert_eq!(cfg.sweep.rates.raman_bar, 1e-5);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let e = RunConfig::parse("points = 5\ncolour = blue\n").unwrap_err();
        assert!(matches!(e, ConfigError::UnknownKey { line: 2, .. }), "{e}");
        let e = RunConfig::parse("points = 5\npoints = 7\n").unwrap_err();
        assert!(matches!(e, ConfigError::DuplicateKey { line: 2, first: 1, .. }), "{e}");
        let e = RunConfig::parse("just text\n").unwrap_err();
        assert!(matches!(e, ConfigError::Syntax { line: 1, .. }));
    }

    #[test]
    fn empty_powers_message() {
        let e = RunConfig::parse("powers_mW =\n").unwrap_err();
        assert!(e.to_string().contains("powers_mW must be non-empty"), "{e}");
        assert!(e.to_string().contains("line 1"));
    }

    #[test]
    fn field_diagnostics() {
        let e = RunConfig::parse("\npoints = many\n").unwrap_err();
        assert_eq!(e.to_string(), "line 2, field 'points': 'many': invalid digit found in string");
        let e = RunConfig::parse("powers_mW = 1, x\n").unwrap_err();
        assert!(e.to_string().contains("field 'powers_mW'"));
        let e = RunConfig::parse("points = 2\n").unwrap_err();
        assert!(e.to_string().contains("points must be >= 3"));
        let e = RunConfig::parse("transit_per_s = 1e5\n").unwrap_err();
        assert!(matches!(e, ConfigError::InvalidValue { line: 1, .. }), "{e}");
    }
}
