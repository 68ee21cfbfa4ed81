use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::extrema::{check_trace, feature_fwhm, find_extrema, FeatureKind, SpectralFeature};
use super::lm::{self, LmConfig};
use crate::analytic::{chi_three_level, im_chi_config2, Config2Params};
use crate::error::{Error, Result};
use crate::units::{scale_frequency, FREQUENCY_SCALE_HZ};

/// Lineshape families available to [`fit_model`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Lorentzian peak on a flat baseline:
    /// baseline + contrast·w²/((δ − δ₀)² + w²).
    SingleEit,
    /// Flat absorption minus two transparency Lorentzians at ±δ₀:
    /// A·[1 − D·(Λ/((δ − δ₀)² + Λ²) + Λ/((δ + δ₀)² + Λ²))].
    DoubleLorentzian,
    /// Rational Im χ of the π-probe tripod with coupled dark states.
    InteractingDoubleDark,
    /// Sum of two independent Λ-EIT absorption profiles with free centres,
    /// couplings, Raman widths and amplitudes.
    IncoherentTwoEit,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::SingleEit,
        ModelKind::DoubleLorentzian,
        ModelKind::InteractingDoubleDark,
        ModelKind::IncoherentTwoEit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::SingleEit => "single-eit",
            ModelKind::DoubleLorentzian => "double-lorentzian",
            ModelKind::InteractingDoubleDark => "interacting-double-dark",
            ModelKind::IncoherentTwoEit => "incoherent-two-eit",
        }
    }

    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::SingleEit => &["baseline", "contrast", "center_hz", "hwhm_hz"],
            ModelKind::DoubleLorentzian => &["amplitude", "center_hz", "lambda_hz", "depth_hz"],
            ModelKind::InteractingDoubleDark => &["amplitude", "delta_z_hz", "omega_c_bar", "gamma_r_hz"],
            ModelKind::IncoherentTwoEit => &[
                "amplitude_1",
                "center_1_hz",
                "omega_1_bar",
                "gamma_1_hz",
                "amplitude_2",
                "center_2_hz",
                "omega_2_bar",
                "gamma_2_hz",
            ],
        }
    }

    pub fn parameter_count(self) -> usize {
        self.parameter_names().len()
    }

    /// Model value at `x_hz` for reported parameters `p`.
    pub fn evaluate(self, p: &[f64], x_hz: f64) -> f64 {
        match self {
            ModelKind::SingleEit => {
                let w2 = p[3] * p[3];
                p[0] + p[1] * w2 / ((x_hz - p[2]).powi(2) + w2)
            }
            ModelKind::DoubleLorentzian => {
                let lambda = p[2].abs();
                let l = |u: f64| lambda / (u * u + lambda * lambda);
                p[0] * (1.0 - p[3] * (l(x_hz - p[1]) + l(x_hz + p[1])))
            }
            ModelKind::InteractingDoubleDark => im_chi_config2(&Config2Params {
                delta_bar: scale_frequency(x_hz),
                delta_z_bar: scale_frequency(p[1]),
                delta_c_bar: 0.0,
                omega_c_bar: p[2],
                gamma_r_bar: scale_frequency(p[3].abs()),
                amplitude: p[0],
            }),
            ModelKind::IncoherentTwoEit => p
                .chunks_exact(4)
                .map(|c| chi_three_level(scale_frequency(x_hz - c[1]), c[2], scale_frequency(c[3].abs()), 0.0, c[0]).im)
                .sum(),
        }
    }

    /// Maps fit-space coordinates to reported parameters.
    fn to_reported(self, internal: &[f64]) -> Vec<f64> {
        let mut p = internal.to_vec();
        match self {
            ModelKind::SingleEit => p[3] = p[3].abs(),
            ModelKind::DoubleLorentzian => {
                p[1] = p[1].abs();
                p[2] = p[2].abs();
            }
            ModelKind::InteractingDoubleDark => {
                p[1] = p[1].abs();
                p[2] = p[2].abs();
                p[3] = p[3].abs();
            }
            ModelKind::IncoherentTwoEit => {
                for c in p.chunks_exact_mut(4) {
                    c[2] = c[2].abs();
                }
                if p[5] < p[1] {
                    let (a, b) = p.split_at_mut(4);
                    a.swap_with_slice(b);
                }
            }
        }
        p
    }

    /// Lower bounds in fit space. The incoherent model's Raman widths are
    /// constrained to be non-negative, since a negative width is gain.
    fn lower_bounds(self) -> Vec<f64> {
        let mut lower = vec![f64::NEG_INFINITY; self.parameter_count()];
        if self == ModelKind::IncoherentTwoEit {
            lower[3] = 0.0;
            lower[7] = 0.0;
        }
        lower
    }

    fn derived_metrics(self, p: &[f64]) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        match self {
            ModelKind::SingleEit => {
                m.insert("fwhm_hz".into(), 2.0 * p[3]);
            }
            ModelKind::DoubleLorentzian => {
                // D = (3Ω̄²/8)·10⁹ Hz and Λ = Γ_R + 3Ω̄²/4 in Hz.
                let omega2 = 8.0 * p[3] / (3.0 * FREQUENCY_SCALE_HZ);
                m.insert("fwhm_hz".into(), 2.0 * p[2]);
                m.insert("separation_hz".into(), 2.0 * p[1]);
                m.insert("omega_c_bar".into(), omega2.max(0.0).sqrt());
                m.insert("gamma_r_bar".into(), scale_frequency(p[2] - 2.0 * p[3]));
            }
            ModelKind::InteractingDoubleDark => {
                m.insert("separation_hz".into(), 2.0 * p[1]);
            }
            ModelKind::IncoherentTwoEit => {
                m.insert("separation_hz".into(), (p[5] - p[1]).abs());
            }
        }
        m
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Fit(format!("unknown model kind '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    /// Starting points built from the extrema of the data; several are tried
    /// and the lowest residual wins.
    FromExtrema,
    /// A single starting point in reported parameters.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitParameter {
    pub name: String,
    pub value: f64,
    /// One standard error from the linearized covariance, when defined.
    pub uncertainty: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model_kind: ModelKind,
    pub parameters: Vec<FitParameter>,
    pub derived: BTreeMap<String, f64>,
    pub residual_rms: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.parameters.iter().find(|p| p.name == name).map(|p| p.value)
    }

    pub fn values(&self) -> Vec<f64> {
        self.parameters.iter().map(|p| p.value).collect()
    }

    pub fn evaluate(&self, x_hz: f64) -> f64 {
        self.model_kind.evaluate(&self.values(), x_hz)
    }
}

/// Damped least-squares fit of `kind` to the trace (`x_hz`, `y`).
///
/// Susceptibility models expect normalized Im χ; [`ModelKind::SingleEit`]
/// takes any peak-shaped trace such as a transmission profile. A fit that
/// fails to meet its convergence tests still returns the best parameters
/// found, with `converged = false`.
pub fn fit_model(x_hz: &[f64], y: &[f64], kind: ModelKind, guess: InitialGuess) -> Result<FitResult> {
    check_trace(x_hz, y)?;
    let needed = 5 * kind.parameter_count();
    if x_hz.len() < needed {
        return Err(Error::Fit(format!("{kind} needs at least {needed} points, got {}", x_hz.len())));
    }
    let starts = match guess {
        InitialGuess::Explicit(p) => {
            if p.len() != kind.parameter_count() {
                return Err(Error::Fit(format!("{kind} takes {} parameters, got {}", kind.parameter_count(), p.len())));
            }
            vec![p]
        }
        InitialGuess::FromExtrema => seeds(x_hz, y, kind)?,
    };

    let y_scale = y.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let config = LmConfig { cost_floor: (1e-13 * y_scale).powi(2) * y.len() as f64, ..LmConfig::default() };
    let residuals = |p: &[f64]| -> Vec<f64> {
        let reported = kind.to_reported(p);
        x_hz.iter().zip(y).map(|(x, v)| kind.evaluate(&reported, *x) - v).collect()
    };

    let mut best: Option<lm::LmReport> = None;
    for start in starts {
        let scales = parameter_scales(kind, &start, x_hz, y_scale);
        let report = lm::minimize(residuals, &start, &scales, &kind.lower_bounds(), &config);
        let better = match &best {
            None => true,
            Some(b) => report.cost < b.cost,
        };
        if better {
            best = Some(report);
        }
    }
    let report = best.expect("at least one starting point");

    let n = y.len() as f64;
    let dof = (y.len() - kind.parameter_count()) as f64;
    let variance = report.cost / dof;
    let mut reported = kind.to_reported(&report.params);
    let mut sigma: Vec<Option<f64>> = (0..reported.len())
        .map(|j| report.normal_inverse.as_ref().map(|inv| (variance * inv[(j, j)]).max(0.0).sqrt()))
        .collect();
    if kind == ModelKind::IncoherentTwoEit && (report.params[5] < report.params[1]) {
        let (a, b) = sigma.split_at_mut(4);
        a.swap_with_slice(b);
    }
    if kind == ModelKind::SingleEit && reported[1] == 0.0 {
        // Zero contrast leaves centre and width unidentified.
        sigma[2] = None;
        sigma[3] = None;
    }
    for v in reported.iter_mut() {
        if *v == 0.0 {
            *v = 0.0; // drop negative zero
        }
    }

    let parameters = kind
        .parameter_names()
        .iter()
        .zip(reported.iter().zip(sigma))
        .map(|(name, (value, uncertainty))| FitParameter { name: (*name).to_string(), value: *value, uncertainty })
        .collect();
    Ok(FitResult {
        model_kind: kind,
        derived: kind.derived_metrics(&reported),
        parameters,
        residual_rms: (report.cost / n).sqrt(),
        converged: report.converged,
        iterations: report.iterations,
    })
}

fn parameter_scales(kind: ModelKind, p: &[f64], x_hz: &[f64], y_scale: f64) -> Vec<f64> {
    let span = x_hz[x_hz.len() - 1] - x_hz[0];
    let step = span / (x_hz.len() - 1) as f64;
    let names = kind.parameter_names();
    p.iter()
        .zip(names)
        .map(|(v, name)| {
            let floor = if name.starts_with("center") || name.starts_with("delta_z") {
                step
            } else if name.contains("amplitude") || *name == "baseline" || *name == "contrast" {
                1e-3 * y_scale
            } else if name.starts_with("omega") {
                1e-6
            } else if name.starts_with("gamma") && kind == ModelKind::IncoherentTwoEit {
                1e-2
            } else {
                1e-3 * step
            };
            v.abs().max(floor)
        })
        .collect()
}

/// Starting points derived from the trace's extrema.
fn seeds(x_hz: &[f64], y: &[f64], kind: ModelKind) -> Result<Vec<Vec<f64>>> {
    let y_max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let y_min = y.iter().copied().fold(f64::INFINITY, f64::min);
    let range = y_max - y_min;
    let span = x_hz[x_hz.len() - 1] - x_hz[0];
    let mid = 0.5 * (x_hz[0] + x_hz[x_hz.len() - 1]);
    let features = if range > 0.0 { find_extrema(x_hz, y, 1e-6 * range)? } else { Vec::new() };
    let width_of = |f: &SpectralFeature| feature_fwhm(x_hz, y, f).unwrap_or(0.1 * span).max(1e-6 * span);
    let minima: Vec<&SpectralFeature> = features.iter().filter(|f| f.kind == FeatureKind::Minimum).collect();
    let maxima: Vec<&SpectralFeature> = features.iter().filter(|f| f.kind == FeatureKind::Maximum).collect();

    // Transparency windows: (centre offset from the middle, half width, depth below y_max).
    let windows: Vec<(f64, f64, f64)> = match minima.as_slice() {
        [] => vec![(0.1 * span, 0.1 * span, 0.0)],
        [only] => {
            let hw = 0.5 * width_of(only);
            let depth = y_max - only.height;
            vec![(0.0, hw, depth), (0.25 * hw, hw, depth), (0.5 * hw, hw, depth), (hw, hw, depth)]
        }
        [a, b, ..] => {
            let c = 0.5 * ((a.center_hz - mid).abs() + (b.center_hz - mid).abs());
            let hw = 0.25 * (width_of(a) + width_of(b));
            let depth = y_max - 0.5 * (a.height + b.height);
            vec![(c, hw, depth)]
        }
    };

    let out = match kind {
        ModelKind::SingleEit => {
            let edge = y[0].min(y[y.len() - 1]);
            let mut s = Vec::new();
            if let Some(peak) = maxima.first() {
                s.push(vec![edge, peak.height - edge, peak.center_hz, 0.5 * width_of(peak)]);
            }
            if let Some(dip) = minima.first() {
                let top = y[0].max(y[y.len() - 1]);
                s.push(vec![top, dip.height - top, dip.center_hz, 0.5 * width_of(dip)]);
            }
            if s.is_empty() {
                let mean = y.iter().sum::<f64>() / y.len() as f64;
                s.push(vec![mean, 0.0, mid, 0.1 * span]);
            }
            s
        }
        ModelKind::DoubleLorentzian => windows
            .iter()
            .map(|&(c, hw, depth)| {
                let overlap = if c < hw { 2.0 } else { 1.0 };
                vec![y_max, c, hw, (depth / y_max.max(f64::MIN_POSITIVE)) * hw / overlap]
            })
            .collect(),
        ModelKind::InteractingDoubleDark => {
            let mut s = Vec::new();
            for &(c, hw, _) in &windows {
                let hw_bar = scale_frequency(hw);
                for coupling in [2.0 / 3.0, 4.0 / 3.0, 8.0 / 3.0] {
                    for gamma_fraction in [0.05, 0.3] {
                        s.push(vec![2.0 * y_max / 3.0, c, (coupling * hw_bar).sqrt(), gamma_fraction * hw]);
                    }
                }
            }
            s
        }
        ModelKind::IncoherentTwoEit => {
            let mut s = Vec::new();
            for &(c, hw, _) in &windows {
                for gamma_fraction in [0.05, 0.3] {
                    let gamma = gamma_fraction * hw;
                    let omega = (4.0 / 3.0 * scale_frequency(hw - gamma)).max(0.0).sqrt();
                    let amp = y_max / 3.0;
                    s.push(vec![amp, mid - c, omega, gamma, amp, mid + c, omega, gamma]);
                }
            }
            s
        }
    };
    Ok(out)
}
