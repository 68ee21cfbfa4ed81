//! Parameter sweeps over Raman detuning and Beer–Lambert transmission.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::error::{Error, Result};
use crate::model::{Configuration, RelaxationRates, TripodModel, ZeemanField, DEFAULT_PROBE_FRACTION};
use crate::steady_state;
use crate::units::{self, PhysicalConstants};

/// Transmissions may exceed 1 by this much when a numeric spectrum shows
/// roundoff-level gain.
pub const TRANSMISSION_SLACK: f64 = 1.0e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Closed-form first-order susceptibilities.
    Analytic,
    /// Full density-matrix steady state.
    #[default]
    Numeric,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Analytic => "analytic",
            Backend::Numeric => "numeric",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Backend::Analytic),
            "numeric" => Ok(Backend::Numeric),
            other => Err(Error::InvalidSweep(format!("unknown model '{other}' (expected analytic|numeric)"))),
        }
    }
}

/// exp(−OD · Im χ), with Im χ normalized to the bare line-centre absorption.
pub fn transmission(im_chi_normalized: f64, optical_depth: f64) -> f64 {
    (-optical_depth * im_chi_normalized).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub configuration: Configuration,
    pub backend: Backend,
    pub delta_range_hz: (f64, f64),
    pub points: usize,
    pub powers_mw: Vec<f64>,
    pub b_fields_mg: Vec<f64>,
    pub optical_depth: f64,
    pub rates: RelaxationRates,
    /// Ω̄_P / Ω̄_C used by the numeric backend.
    pub probe_fraction: f64,
    pub coupling_detuning_hz: f64,
}

impl SweepSpec {
    /// ±300 kHz, 2001 points, the reference power and field triplets.
    pub fn new(configuration: Configuration) -> Self {
        Self {
            configuration,
            backend: Backend::default(),
            delta_range_hz: (-300.0e3, 300.0e3),
            points: 2001,
            powers_mw: units::REFERENCE_POWERS_MW.to_vec(),
            b_fields_mg: vec![0.0, 10.0, 30.0],
            optical_depth: 1.0,
            rates: RelaxationRates::default(),
            probe_fraction: DEFAULT_PROBE_FRACTION,
            coupling_detuning_hz: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.delta_range_hz;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidSweep(format!("delta range must satisfy min < max, got ({lo}, {hi})")));
        }
        if self.points < 3 {
            return Err(Error::InvalidSweep(format!("points must be >= 3, got {}", self.points)));
        }
        if self.powers_mw.is_empty() {
            return Err(Error::InvalidSweep("powers_mW must be non-empty".into()));
        }
        if let Some(p) = self.powers_mw.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidSweep(format!("powers must be finite and >= 0, got {p}")));
        }
        if self.b_fields_mg.is_empty() {
            return Err(Error::InvalidSweep("b_fields_mG must be non-empty".into()));
        }
        if let Some(b) = self.b_fields_mg.iter().find(|b| !b.is_finite()) {
            return Err(Error::InvalidSweep(format!("fields must be finite, got {b}")));
        }
        if !(self.optical_depth.is_finite() && self.optical_depth >= 0.0) {
            return Err(Error::InvalidSweep(format!("optical depth must be >= 0, got {}", self.optical_depth)));
        }
        if !(self.probe_fraction.is_finite() && self.probe_fraction > 0.0) {
            return Err(Error::InvalidSweep(format!("probe fraction must be > 0, got {}", self.probe_fraction)));
        }
        if !self.coupling_detuning_hz.is_finite() {
            return Err(Error::InvalidSweep("coupling detuning must be finite".into()));
        }
        self.rates.validate()
    }

    /// Uniform grid, exactly symmetric about the midpoint of the range.
    pub fn delta_grid_hz(&self) -> Vec<f64> {
        symmetric_grid(self.delta_range_hz, self.points)
    }

    /// Model at one (power, B) pair, Raman detuning zero.
    pub fn model_at(&self, power_mw: f64, b_mg: f64) -> Result<TripodModel> {
        let omega_c = units::power_to_rabi_scaled(power_mw)?;
        let zeeman = ZeemanField::from_milligauss(b_mg, &PhysicalConstants::default())?;
        TripodModel::new(self.configuration)
            .with_coupling_rabi(omega_c)
            .with_probe_rabi(self.probe_fraction * omega_c)
            .with_coupling_detuning(units::scale_frequency(self.coupling_detuning_hz))
            .with_zeeman(zeeman)
            .with_rates(self.rates)
            .validated()
    }
}

pub(crate) fn symmetric_grid((lo, hi): (f64, f64), points: usize) -> Vec<f64> {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let span = (points - 1) as f64;
    (0..points).map(|i| mid + half * (2.0 * i as f64 - span) / span).collect()
}

/// Probe susceptibility of `model` at its current Raman detuning.
pub fn susceptibility(model: &TripodModel, backend: Backend) -> Result<Complex64> {
    match backend {
        Backend::Analytic => Ok(analytic::chi_for_model(model)),
        Backend::Numeric => steady_state::steady_susceptibility(model).map(|(_, chi)| chi),
    }
}

/// One (configuration, power, B) trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub configuration: Configuration,
    pub power_mw: f64,
    pub b_mg: f64,
    pub delta_hz: Vec<f64>,
    pub chi: Vec<Complex64>,
    pub transmission: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.delta_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta_hz.is_empty()
    }

    pub fn im_chi(&self) -> Vec<f64> {
        self.chi.iter().map(|c| c.im).collect()
    }

    pub fn re_chi(&self) -> Vec<f64> {
        self.chi.iter().map(|c| c.re).collect()
    }

    pub fn step_hz(&self) -> f64 {
        (self.delta_hz[self.len() - 1] - self.delta_hz[0]) / (self.len() - 1) as f64
    }
}

/// Computes one spectrum over `grid_hz` for a base model.
pub fn compute_spectrum(
    base: &TripodModel,
    power_mw: f64,
    b_mg: f64,
    grid_hz: &[f64],
    backend: Backend,
    optical_depth: f64,
) -> Result<Spectrum> {
    let chi = grid_hz
        .par_iter()
        .map(|&delta_hz| {
            let model = base.with_raman_detuning(units::scale_frequency(delta_hz));
            susceptibility(&model, backend).map_err(|source| Error::SweepPoint {
                power_mw,
                b_mg,
                delta_hz,
                source: Box::new(source),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let transmission = chi.iter().map(|c| transmission(c.im, optical_depth)).collect();
    Ok(Spectrum { configuration: base.configuration(), power_mw, b_mg, delta_hz: grid_hz.to_vec(), chi, transmission })
}

/// Every (power, B) pair of the sweep, ordered by power then field.
pub fn run_sweep(spec: &SweepSpec) -> Result<SpectrumTable> {
    spec.validate()?;
    let grid = spec.delta_grid_hz();
    let mut pairs: Vec<(f64, f64)> =
        spec.powers_mw.iter().flat_map(|&p| spec.b_fields_mg.iter().map(move |&b| (p, b))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let spectra = pairs
        .par_iter()
        .map(|&(p, b)| {
            let model = spec.model_at(p, b)?;
            compute_spectrum(&model, p, b, &grid, spec.backend, spec.optical_depth)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumTable::from_spectra(&spectra))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub config: Configuration,
    #[serde(rename = "power_mW")]
    pub power_mw: f64,
    #[serde(rename = "b_mG")]
    pub b_mg: f64,
    pub delta_hz: f64,
    pub re_chi: f64,
    pub im_chi: f64,
    pub transmission: f64,
}

/// Flat table of rows sorted by (power, B, δ).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpectrumTable {
    rows: Vec<SpectrumRow>,
}

impl SpectrumTable {
    pub fn from_spectra(spectra: &[Spectrum]) -> Self {
        let mut rows: Vec<SpectrumRow> = spectra
            .iter()
            .flat_map(|s| {
                (0..s.len()).map(move |i| SpectrumRow {
                    config: s.configuration,
                    power_mw: s.power_mw,
                    b_mg: s.b_mg,
                    delta_hz: s.delta_hz[i],
                    re_chi: s.chi[i].re,
                    im_chi: s.chi[i].im,
                    transmission: s.transmission[i],
                })
            })
            .collect();
        rows.sort_by(|a, b| {
            a.config
                .cmp(&b.config)
                .then(a.power_mw.total_cmp(&b.power_mw))
                .then(a.b_mg.total_cmp(&b.b_mg))
                .then(a.delta_hz.total_cmp(&b.delta_hz))
        });
        Self { rows }
    }

    /// Validates ordering, grid uniformity and the transmission range.
    pub fn from_rows(rows: Vec<SpectrumRow>) -> Result<Self> {
        for w in rows.windows(2) {
            let key = |r: &SpectrumRow| (r.config, r.power_mw, r.b_mg, r.delta_hz);
            let (a, b) = (key(&w[0]), key(&w[1]));
            let ordered = a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)).then(a.3.total_cmp(&b.3));
            if ordered != std::cmp::Ordering::Less {
                return Err(Error::Spectrum(format!("rows not sorted by (power, B, delta) at delta = {}", b.3)));
            }
        }
        if let Some(r) = rows.iter().find(|r| !(r.transmission > 0.0 && r.transmission <= 1.0 + TRANSMISSION_SLACK)) {
            return Err(Error::Spectrum(format!("transmission {} outside (0, 1]", r.transmission)));
        }
        let table = Self { rows };
        for s in table.spectra() {
            check_uniform(&s.delta_hz)?;
        }
        Ok(table)
    }

    pub fn rows(&self) -> &[SpectrumRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Regroups rows into per-(config, power, B) spectra.
    pub fn spectra(&self) -> Vec<Spectrum> {
        let mut out: Vec<Spectrum> = Vec::new();
        for r in &self.rows {
            let same = out.last().is_some_and(|s| {
                s.configuration == r.config
                    && s.power_mw.to_bits() == r.power_mw.to_bits()
                    && s.b_mg.to_bits() == r.b_mg.to_bits()
            });
            if !same {
                out.push(Spectrum {
                    configuration: r.config,
                    power_mw: r.power_mw,
                    b_mg: r.b_mg,
                    delta_hz: Vec::new(),
                    chi: Vec::new(),
                    transmission: Vec::new(),
                });
            }
            let s = out.last_mut().expect("pushed above");
            s.delta_hz.push(r.delta_hz);
            s.chi.push(Complex64::new(r.re_chi, r.im_chi));
            s.transmission.push(r.transmission);
        }
        out
    }
}

fn check_uniform(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Ok(());
    }
    let step = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    let scale = grid[0].abs().max(grid[grid.len() - 1].abs());
    for (i, x) in grid.iter().enumerate() {
        let expected = grid[0] + step * i as f64;
        if (x - expected).abs() > 1e-9 * scale.max(step.abs()) {
            return Err(Error::Spectrum(format!("delta grid not uniform at index {i}")));
        }
    }
    Ok(())
}
