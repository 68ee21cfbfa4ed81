//! Sweep execution and per-spectrum analyses.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tripod_eit::analysis::{
    feature_fwhm, find_extrema, fit_model, incoherent_excess, separation_slope, ExcessReport, FitResult, InitialGuess,
    ModelKind, SlopeReport, SpectralFeature,
};
use tripod_eit::{run_sweep, Backend, Configuration, Spectrum, SpectrumTable};

use crate::config::RunConfig;
use crate::output;

/// Either a value or the error message produced while computing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome<T> {
    Ok(T),
    Err { error: String },
}

impl<T> From<tripod_eit::Result<T>> for Outcome<T> {
    fn from(r: tripod_eit::Result<T>) -> Self {
        match r {
            Ok(v) => Outcome::Ok(v),
            Err(e) => Outcome::Err { error: e.to_string() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureWidth {
    pub center_hz: f64,
    pub kind: tripod_eit::analysis::FeatureKind,
    pub fwhm_hz: Outcome<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitEntry {
    pub model: ModelKind,
    /// Trace the model was fitted to: `transmission` or `im_chi`.
    pub observable: String,
    pub result: Outcome<FitResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub file: String,
    #[serde(rename = "power_mW")]
    pub power_mw: f64,
    #[serde(rename = "b_mG")]
    pub b_mg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extrema: Option<Outcome<Vec<SpectralFeature>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fwhm: Option<Outcome<Vec<FeatureWidth>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fits: Vec<FitEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excess: Option<Outcome<ExcessReport>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeEntry {
    #[serde(rename = "power_mW")]
    pub power_mw: f64,
    pub result: Outcome<SlopeReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub configuration: Configuration,
    pub model: Backend,
    pub optical_depth: f64,
    pub points: usize,
    pub min_prominence: f64,
    pub spectra: Vec<SpectrumSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub slopes: Vec<SlopeEntry>,
}

/// Everything a run writes, as (file name, contents), summary last.
#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub table: SpectrumTable,
    pub summary: RunSummary,
    pub files: Vec<(String, String)>,
}

pub const SUMMARY_FILE: &str = "summary.json";

pub fn execute(cfg: &RunConfig) -> tripod_eit::Result<RunArtifacts> {
    let table = run_sweep(&cfg.sweep)?;
    let spectra = table.spectra();
    let summary = analyze(cfg, &spectra);

    let mut files: Vec<(String, String)> = spectra
        .par_iter()
        .map(|s| {
            let name = output::spectrum_file_name(s.configuration, s.power_mw, s.b_mg, cfg.format);
            (name, output::render(&SpectrumTable::from_spectra(std::slice::from_ref(s)), cfg.format))
        })
        .collect();
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    files.push((SUMMARY_FILE.to_string(), json));
    Ok(RunArtifacts { table, summary, files })
}

pub fn analyze(cfg: &RunConfig, spectra: &[Spectrum]) -> RunSummary {
    let a = &cfg.analysis;
    let od = cfg.sweep.optical_depth;
    let per_spectrum: Vec<SpectrumSummary> = spectra
        .par_iter()
        .map(|s| {
            let extrema = find_extrema(&s.delta_hz, &s.transmission, a.min_prominence);
            let fwhm = a.fwhm.then(|| match &extrema {
                Ok(features) => Outcome::Ok(
                    features
                        .iter()
                        .map(|f| FeatureWidth {
                            center_hz: f.center_hz,
                            kind: f.kind,
                            fwhm_hz: feature_fwhm(&s.delta_hz, &s.transmission, f).into(),
                        })
                        .collect(),
                ),
                Err(e) => Outcome::Err { error: e.to_string() },
            });
            let im_chi = s.im_chi();
            let fits = a
                .fits
                .par_iter()
                .map(|&kind| {
                    let (observable, y) = match kind {
                        ModelKind::SingleEit => ("transmission", s.transmission.as_slice()),
                        _ => ("im_chi", im_chi.as_slice()),
                    };
                    FitEntry {
                        model: kind,
                        observable: observable.to_string(),
                        result: fit_model(&s.delta_hz, y, kind, InitialGuess::FromExtrema).into(),
                    }
                })
                .collect();
            let excess = a.excess.then(|| incoherent_excess(&s.delta_hz, &im_chi, od).into());
            SpectrumSummary {
                file: output::spectrum_file_name(s.configuration, s.power_mw, s.b_mg, cfg.format),
                power_mw: s.power_mw,
                b_mg: s.b_mg,
                extrema: a.extrema.then(|| extrema.into()),
                fwhm,
                fits,
                excess,
            }
        })
        .collect();

    let slopes = if a.slope {
        let mut powers: Vec<f64> = spectra.iter().map(|s| s.power_mw).collect();
        powers.dedup();
        powers
            .into_iter()
            .map(|p| {
                let group: Vec<Spectrum> = spectra.iter().filter(|s| s.power_mw == p).cloned().collect();
                SlopeEntry { power_mw: p, result: separation_slope(&group, a.min_prominence).into() }
            })
            .collect()
    } else {
        Vec::new()
    };

    RunSummary {
        configuration: cfg.sweep.configuration,
        model: cfg.sweep.backend,
        optical_depth: od,
        points: cfg.sweep.points,
        min_prominence: a.min_prominence,
        spectra: per_spectrum,
        slopes,
    }
}
