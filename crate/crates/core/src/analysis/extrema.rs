use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Maximum,
    Minimum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralFeature {
    pub kind: FeatureKind,
    /// Parabola-refined position.
    pub center_hz: f64,
    /// Parabola-refined value at the centre.
    pub height: f64,
    pub prominence: f64,
    /// Grid index of the sampled extremum.
    pub index: usize,
}

pub(crate) fn check_trace(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Spectrum(format!("abscissa has {} points but ordinate has {}", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(Error::Spectrum(format!("need at least 3 points, got {}", x.len())));
    }
    if x.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::Spectrum("grid must be strictly increasing".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Spectrum("spectrum contains non-finite values".into()));
    }
    Ok(())
}

/// Strict local extrema with prominence at least `min_prominence`, ordered by
/// decreasing prominence and then by increasing centre.
///
/// Prominence follows the usual topographic definition: the drop from the
/// extremum to the higher of the two lowest points reached before the trace
/// exceeds it on either side (or the grid ends).
pub fn find_extrema(x_hz: &[f64], y: &[f64], min_prominence: f64) -> Result<Vec<SpectralFeature>> {
    check_trace(x_hz, y)?;
    if min_prominence.is_nan() || min_prominence <= 0.0 {
        return Err(Error::Spectrum(format!("min_prominence must be > 0, got {min_prominence}")));
    }
    let mut features = Vec::new();
    let negated: Vec<f64> = y.iter().map(|v| -v).collect();
    for (kind, trace) in [(FeatureKind::Maximum, y), (FeatureKind::Minimum, negated.as_slice())] {
        for i in 1..trace.len() - 1 {
            if !(trace[i] > trace[i - 1] && trace[i] > trace[i + 1]) {
                continue;
            }
            let prominence = peak_prominence(trace, i);
            if prominence < min_prominence {
                continue;
            }
            let (offset, peak) = parabolic_vertex(trace[i - 1], trace[i], trace[i + 1]);
            let step = 0.5 * (x_hz[i + 1] - x_hz[i - 1]);
            let height = match kind {
                FeatureKind::Maximum => peak,
                FeatureKind::Minimum => -peak,
            };
            features.push(SpectralFeature { kind, center_hz: x_hz[i] + offset * step, height, prominence, index: i });
        }
    }
    features.sort_by(|a, b| b.prominence.total_cmp(&a.prominence).then(a.center_hz.total_cmp(&b.center_hz)));
    Ok(features)
}

fn peak_prominence(y: &[f64], i: usize) -> f64 {
    let peak = y[i];
    let left_base = y[..i].iter().rev().take_while(|v| **v <= peak).copied().fold(peak, f64::min);
    let right_base = y[i + 1..].iter().take_while(|v| **v <= peak).copied().fold(peak, f64::min);
    peak - left_base.max(right_base)
}

/// Vertex of the parabola through (−1, a), (0, b), (1, c): (offset, value).
fn parabolic_vertex(a: f64, b: f64, c: f64) -> (f64, f64) {
    let curvature = a - 2.0 * b + c;
    if curvature == 0.0 {
        return (0.0, b);
    }
    let offset = 0.5 * (a - c) / curvature;
    (offset, b - 0.25 * (a - c) * offset)
}

/// Full width at half prominence, with linear interpolation between grid
/// points on each side.
pub fn feature_fwhm(x_hz: &[f64], y: &[f64], feature: &SpectralFeature) -> Result<f64> {
    check_trace(x_hz, y)?;
    let i = feature.index;
    if i == 0 || i >= y.len() - 1 {
        return Err(Error::Spectrum(format!("feature index {i} is not interior")));
    }
    let sign = match feature.kind {
        FeatureKind::Maximum => 1.0,
        FeatureKind::Minimum => -1.0,
    };
    let level = sign * feature.height - 0.5 * feature.prominence;
    let value = |k: usize| sign * y[k];
    let out_of_range = || Error::FwhmOutOfRange { center_hz: feature.center_hz };

    let left = (0..i).rev().find(|&k| value(k) <= level).ok_or_else(out_of_range)?;
    let right = (i + 1..y.len()).find(|&k| value(k) <= level).ok_or_else(out_of_range)?;
    let cross = |inside: usize, outside: usize| {
        let (vi, vo) = (value(inside), value(outside));
        let t = if vi == vo { 0.0 } else { (vi - level) / (vi - vo) };
        x_hz[inside] + t * (x_hz[outside] - x_hz[inside])
    };
    Ok(cross(right - 1, right) - cross(left + 1, left))
}
