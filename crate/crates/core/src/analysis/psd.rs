use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::IqSignal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Rect,
    Hann,
    Hamming,
    Blackman,
}

impl Window {
    /// Periodic window of length `n`.
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        let tau = std::f64::consts::TAU;
        (0..n)
            .map(|i| {
                let x = tau * i as f64 / n as f64;
                match self {
                    Window::Rect => 1.0,
                    Window::Hann => 0.5 - 0.5 * x.cos(),
                    Window::Hamming => 0.54 - 0.46 * x.cos(),
                    Window::Blackman => 0.42 - 0.5 * x.cos() + 0.08 * (2.0 * x).cos(),
                }
            })
            .collect()
    }
}

/// Two-sided power spectral density normalized to unit total power.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    /// Bin centers, ascending, centered on 0 Hz.
    pub freqs_hz: Vec<f64>,
    /// Linear density in 1/Hz; `sum(psd) * resolution_hz == 1`.
    pub psd: Vec<f64>,
    pub resolution_hz: f64,
}

impl PsdEstimate {
    pub fn total_power(&self) -> f64 {
        self.psd.iter().sum::<f64>() * self.resolution_hz
    }

    /// Power in bins whose center lies in `[lo_hz, hi_hz]`.
    pub fn band_power(&self, lo_hz: f64, hi_hz: f64) -> f64 {
        self.freqs_hz
            .iter()
            .zip(&self.psd)
            .filter(|(f, _)| **f >= lo_hz && **f <= hi_hz)
            .map(|(_, p)| p)
            .sum::<f64>()
            * self.resolution_hz
    }

    /// dB relative to the highest bin.
    pub fn db_rel_peak(&self) -> Vec<f64> {
        let peak = self.psd.iter().copied().fold(0.0, f64::max);
        self.psd.iter().map(|p| 10.0 * (p / peak).log10()).collect()
    }

    /// dB relative to a uniform density spreading the total power over
    /// `bandwidth_hz`.
    pub fn db_rel_inband(&self, bandwidth_hz: f64) -> Vec<f64> {
        self.psd.iter().map(|p| 10.0 * (p * bandwidth_hz).log10()).collect()
    }

    pub fn peak_freq_hz(&self) -> f64 {
        let (i, _) = self
            .psd
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc });
        self.freqs_hz[i]
    }
}

/// Welch estimate: averaged modified periodograms of `segment_len`-sample
/// segments overlapping by `overlap`.
pub fn welch_psd<T: Real>(
    signal: &IqSignal<T>,
    segment_len: usize,
    overlap: f64,
    window: Window,
) -> Result<PsdEstimate> {
    if segment_len == 0 || segment_len > signal.len() {
        return Err(Error::SegmentTooLong {
            segment: segment_len,
            len: signal.len(),
        });
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::InvalidConfig(format!("overlap must lie in [0, 1), got {overlap}")));
    }
    let hop = ((segment_len as f64 * (1.0 - overlap)).round() as usize).max(1);
    let n_segments = (signal.len() - segment_len) / hop + 1;
    let win = window.coefficients(segment_len);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(segment_len);

    let periodograms: Vec<Vec<f64>> = (0..n_segments)
        .into_par_iter()
        .map(|s| {
            let start = s * hop;
            let mut buf: Vec<Complex<f64>> = signal.samples[start..start + segment_len]
                .iter()
                .zip(&win)
                .map(|(x, w)| Complex::new(x.re.as_f64() * w, x.im.as_f64() * w))
                .collect();
            fft.process(&mut buf);
            buf.iter().map(|z| z.norm_sqr()).collect()
        })
        .collect();

    let mut acc = vec![0.0; segment_len];
    for p in &periodograms {
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
    }

    let fs = signal.sample_rate_hz;
    let resolution_hz = fs / segment_len as f64;
    let half = segment_len / 2;
    let total: f64 = acc.iter().sum::<f64>() * resolution_hz;
    let mut freqs_hz = Vec::with_capacity(segment_len);
    let mut psd = Vec::with_capacity(segment_len);
    // fftshift: bins [half.., ..half] hold negative then non-negative frequencies
    for i in 0..segment_len {
        let bin = (i + segment_len - half) % segment_len;
        let k = i as i64 - half as i64;
        freqs_hz.push(k as f64 * resolution_hz);
        psd.push(acc[bin] / total);
    }
    Ok(PsdEstimate {
        freqs_hz,
        psd,
        resolution_hz,
    })
}
