use serde::{Deserialize, Serialize};

use super::extrema::{check_trace, find_extrema, FeatureKind};
use super::fit::{fit_model, FitResult, InitialGuess, ModelKind};
use crate::error::{Error, Result};
use crate::spectra::{transmission, Spectrum};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessReport {
    /// (T_incoherent − T_actual) at the dip, in units of the bare-line
    /// transmission contrast 1 − e^(−OD).
    pub excess: f64,
    pub dip_hz: f64,
    pub model_transmission: f64,
    pub actual_transmission: f64,
    pub fit: FitResult,
}

/// How much deeper the central transmission dip is than the best sum of two
/// independent EIT profiles allows.
///
/// `im_chi` is normalized Im χ on the grid `x_hz`. The dip is the local
/// transmission minimum closest to the grid centre, or the centre itself when
/// there is none.
pub fn incoherent_excess(x_hz: &[f64], im_chi: &[f64], optical_depth: f64) -> Result<ExcessReport> {
    check_trace(x_hz, im_chi)?;
    if !(optical_depth.is_finite() && optical_depth > 0.0) {
        return Err(Error::Domain(format!(
            "optical depth must be > 0 for a transmission contrast, got {optical_depth}"
        )));
    }
    let fit = fit_model(x_hz, im_chi, ModelKind::IncoherentTwoEit, InitialGuess::FromExtrema)?;
    if !fit.converged {
        return Err(Error::Fit(format!(
            "incoherent two-EIT fit did not converge after {} iterations (rms residual {:.3e}, parameters {:?})",
            fit.iterations,
            fit.residual_rms,
            fit.values()
        )));
    }

    let t: Vec<f64> = im_chi.iter().map(|v| transmission(*v, optical_depth)).collect();
    let mid = 0.5 * (x_hz[0] + x_hz[x_hz.len() - 1]);
    let range = t.iter().copied().fold(f64::NEG_INFINITY, f64::max) - t.iter().copied().fold(f64::INFINITY, f64::min);
    let central_index = (0..x_hz.len())
        .min_by(|&a, &b| (x_hz[a] - mid).abs().total_cmp(&(x_hz[b] - mid).abs()))
        .expect("non-empty grid");
    let dip_index = if range > 0.0 {
        find_extrema(x_hz, &t, 1e-9 * range)?
            .into_iter()
            .filter(|f| f.kind == FeatureKind::Minimum)
            .min_by(|a, b| (a.center_hz - mid).abs().total_cmp(&(b.center_hz - mid).abs()))
            .map_or(central_index, |f| f.index)
    } else {
        central_index
    };

    let dip_hz = x_hz[dip_index];
    let actual = t[dip_index];
    let model = transmission(fit.evaluate(dip_hz), optical_depth);
    let contrast = 1.0 - (-optical_depth).exp();
    Ok(ExcessReport {
        excess: (model - actual) / contrast,
        dip_hz,
        model_transmission: model,
        actual_transmission: actual,
        fit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub slope_hz_per_mg: f64,
    pub intercept_hz: f64,
    /// (B in mG, peak separation in Hz) for every spectrum used.
    pub separations: Vec<(f64, f64)>,
}

/// Least-squares slope of the transmission-peak separation against field.
/// Zero-field spectra are skipped; every other spectrum must show two
/// maxima with prominence at least `min_prominence`.
pub fn separation_slope(spectra: &[Spectrum], min_prominence: f64) -> Result<SlopeReport> {
    let mut separations = Vec::new();
    for s in spectra.iter().filter(|s| s.b_mg != 0.0) {
        let peaks: Vec<_> = find_extrema(&s.delta_hz, &s.transmission, min_prominence)?
            .into_iter()
            .filter(|f| f.kind == FeatureKind::Maximum)
            .take(2)
            .collect();
        if peaks.len() < 2 {
            return Err(Error::Spectrum(format!("double peak not resolved at {} mW, {} mG", s.power_mw, s.b_mg)));
        }
        separations.push((s.b_mg, (peaks[0].center_hz - peaks[1].center_hz).abs()));
    }
    let first = separations.first().map(|p| p.0);
    if separations.len() < 2 || separations.iter().all(|p| Some(p.0) == first) {
        return Err(Error::Spectrum("separation slope needs at least two distinct nonzero fields".into()));
    }
    let n = separations.len() as f64;
    let mean_b = separations.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_s = separations.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = separations.iter().map(|(b, s)| (b - mean_b) * (s - mean_s)).sum();
    let sxx: f64 = separations.iter().map(|(b, _)| (b - mean_b).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(SlopeReport { slope_hz_per_mg: slope, intercept_hz: mean_s - slope * mean_b, separations })
}
