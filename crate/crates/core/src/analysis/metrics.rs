use crate::error::Result;
use crate::modulator::synthesize_phase;
use crate::pulse::FrequencyPulse;
use crate::scalar::{wrap_phase, Real};

use super::psd::PsdEstimate;

/// Largest `|instantaneous frequency|` (Hz) of a waveform that applies
/// `shift` on every one of `chips` chips.
pub fn max_frequency_deviation<T: Real>(pulse: &FrequencyPulse<T>, shift: T, chips: usize) -> Result<f64> {
    let phase = synthesize_phase(&vec![shift; chips], pulse, pulse.oversampling)?;
    let scale = 1.0 / (std::f64::consts::TAU * pulse.sample_period_s());
    let first = phase.first().map_or(0.0, |p| p.as_f64().abs());
    Ok(phase
        .windows(2)
        .map(|w| (wrap_phase((w[1] - w[0]).as_f64()) * scale).abs())
        .fold(first * scale, f64::max))
}

fn extreme_shift<T: Real>(set: &[T]) -> T {
    set.iter().copied().fold(T::zero(), |a, s| if s.abs() > a.abs() { s } else { a })
}

/// Ratio of the maximal frequency deviations reached when the largest shift
/// of each constellation is repeated, `second / first`.
pub fn deviation_ratio<T: Real>(pulse: &FrequencyPulse<T>, first: &[T], second: &[T]) -> Result<f64> {
    let chips = 4 * pulse.support_chips() + 8;
    let a = max_frequency_deviation(pulse, extreme_shift(first), chips)?;
    let b = max_frequency_deviation(pulse, extreme_shift(second), chips)?;
    Ok(b / a)
}

/// `(log2(1 + snr), snr / ln 2)` in bit per channel use.
pub fn low_snr_rate(snr_linear: f64) -> (f64, f64) {
    ((1.0 + snr_linear).log2(), snr_linear / std::f64::consts::LN_2)
}

/// Power above `center + guard` over power below `center - guard`, both
/// limited to `span` from the center, in dB.
pub fn sideband_power_ratio_db(psd: &PsdEstimate, center_hz: f64, guard_hz: f64, span_hz: f64) -> f64 {
    let upper = psd.band_power(center_hz + guard_hz, center_hz + span_hz);
    let lower = psd.band_power(center_hz - span_hz, center_hz - guard_hz);
    10.0 * (upper / lower).log10()
}

/// Width between the first bins on either side of the peak that fall
/// `drop_db` below the peak.
pub fn shoulder_bandwidth(psd: &PsdEstimate, drop_db: f64) -> f64 {
    let (peak_idx, peak) = psd
        .psd
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc });
    let threshold = peak * 10f64.powf(-drop_db / 10.0);
    let upper = (peak_idx..psd.psd.len())
        .find(|&i| psd.psd[i] < threshold)
        .unwrap_or(psd.psd.len() - 1);
    let lower = (0..=peak_idx).rev().find(|&i| psd.psd[i] < threshold).unwrap_or(0);
    psd.freqs_hz[upper] - psd.freqs_hz[lower]
}

/// Max minus min of the density in dB over `[lo_hz, hi_hz]`.
pub fn inband_ripple_db(psd: &PsdEstimate, lo_hz: f64, hi_hz: f64) -> f64 {
    let band = psd
        .freqs_hz
        .iter()
        .zip(&psd.psd)
        .filter(|(f, _)| **f >= lo_hz && **f <= hi_hz)
        .map(|(_, p)| *p);
    let (lo, hi) = band.fold((f64::MAX, f64::MIN), |(lo, hi), p| (lo.min(p), hi.max(p)));
    10.0 * (hi / lo).log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PulseSpec;
    use crate::pulse::make_pulse;
    use std::f64::consts::PI;

    #[test]
    fn msk_versus_quaternary_with_rect_pulse() {
        let p = make_pulse::<f64>(PulseSpec::rect(), 1e-6, 16).unwrap();
        let r = deviation_ratio(&p, &[PI / 2.0, -PI / 2.0], &[PI / 4.0, 3.0 * PI / 4.0, -PI / 4.0, -3.0 * PI / 4.0])
            .unwrap();
        assert!((r - 1.5).abs() < 1e-12, "{r}");
        let same = deviation_ratio(&p, &[PI / 2.0], &[PI / 2.0]).unwrap();
        assert_eq!(same, 1.0);
    }

    #[test]
    fn rate_formulas() {
        assert_eq!(low_snr_rate(1.0).0, 1.0);
        assert_eq!(low_snr_rate(0.0), (0.0, 0.0));
        let (exact, approx) = low_snr_rate(0.01);
        assert!((exact - 0.014_355_3).abs() < 1e-6);
        assert!((approx - 0.014_426_95).abs() < 1e-7);
        assert!((approx - exact) / exact < 0.005);
    }
}
