//! Lineshape analysis: extrema, widths, least-squares model fits and the
//! interference-excess test.

mod excess;
mod extrema;
mod fit;
pub mod lm;

pub use excess::{incoherent_excess, separation_slope, ExcessReport, SlopeReport};
pub use extrema::{feature_fwhm, find_extrema, FeatureKind, SpectralFeature};
pub use fit::{fit_model, FitParameter, FitResult, InitialGuess, ModelKind};
