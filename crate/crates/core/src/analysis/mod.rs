//! Spectral and time-frequency analysis of synthesized signals.

mod instfreq;
mod mask;
mod metrics;
mod psd;

pub use instfreq::instantaneous_frequency;
pub use mask::{mask_check, MaskReport, SpectralMask};
pub use metrics::{
    deviation_ratio, inband_ripple_db, low_snr_rate, max_frequency_deviation, shoulder_bandwidth,
    sideband_power_ratio_db,
};
pub use psd::{welch_psd, PsdEstimate, Window};
