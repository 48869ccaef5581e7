//! Parameter extraction from measured or synthesized two-ports.

pub mod fit;
pub mod metrics;
pub mod savgol;

pub use fit::{fit_propagation, wideband_fit, write_fit_csv, FitOptions, PropagationFit, WidebandFit, Weighting};
pub use metrics::{band_metrics, band_metrics_with, group_delay, write_band_metrics_csv, BandMetrics, GroupDelay};
pub use savgol::{savgol, Smoothed};
