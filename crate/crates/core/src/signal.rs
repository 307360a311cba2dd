use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Complex baseband samples with timing metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct IqSignal<T> {
    pub samples: Vec<Complex<T>>,
    pub sample_rate_hz: f64,
    pub t0_s: f64,
}

impl<T: Real> IqSignal<T> {
    pub fn new(samples: Vec<Complex<T>>, sample_rate_hz: f64) -> Result<Self> {
        Self::with_start(samples, sample_rate_hz, 0.0)
    }

    pub fn with_start(samples: Vec<Complex<T>>, sample_rate_hz: f64, t0_s: f64) -> Result<Self> {
        if !(sample_rate_hz > 0.0) || !sample_rate_hz.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::InvalidConfig("signal has no samples".into()));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            t0_s,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.sample_rate_hz
    }

    pub fn time_of(&self, index: usize) -> f64 {
        self.t0_s + index as f64 / self.sample_rate_hz
    }

    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr().as_f64()).sum::<f64>() / self.len() as f64
    }

    /// Largest deviation of `|s|` from one.
    pub fn max_envelope_error(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.norm().as_f64() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Peak-to-average power ratio in dB.
    pub fn papr_db(&self) -> f64 {
        let peak = self
            .samples
            .iter()
            .map(|s| s.norm_sqr().as_f64())
            .fold(0.0, f64::max);
        crate::scalar::db(peak / self.mean_power())
    }

    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        if start + len > self.len() {
            return Err(Error::Dimension(format!(
                "slice [{start}, {}) exceeds signal length {}",
                start + len,
                self.len()
            )));
        }
        Self::with_start(
            self.samples[start..start + len].to_vec(),
            self.sample_rate_hz,
            self.time_of(start),
        )
    }
}
