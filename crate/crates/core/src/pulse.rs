//! Frequency and phase pulses for one chip.
//!
//! Every sample of `g` is the exact average of the continuous frequency pulse
//! over its sample cell, so the running sum `q` is the exact continuous phase
//! pulse at cell boundaries. A synthesized waveform therefore carries the
//! continuous-time phase at every sample instant, independent of the
//! oversampling factor.

use crate::config::{PulseShape, PulseSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Minimum fraction of the untruncated pulse energy the support must hold.
pub const MIN_ENERGY_FRACTION: f64 = 0.99;

/// Sampled frequency pulse `g` (1/s) and phase pulse `q` for one chip.
///
/// `g[i]` covers the time cell `[i, i + 1) * T_c / O`; `q[i]` is the phase
/// pulse at the end of that cell, so `q` ends at exactly one.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyPulse<T> {
    pub g: Vec<T>,
    pub q: Vec<T>,
    pub chip_period_s: f64,
    pub oversampling: usize,
    pub spec: PulseSpec,
}

impl<T: Real> FrequencyPulse<T> {
    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    pub fn sample_period_s(&self) -> f64 {
        self.chip_period_s / self.oversampling as f64
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 * self.sample_period_s()
    }

    pub fn support_chips(&self) -> usize {
        self.len() / self.oversampling
    }

    pub fn g_max(&self) -> T {
        self.g.iter().copied().fold(T::zero(), T::max)
    }

    /// Phase pulse value `samples` sample periods after the pulse starts.
    #[inline]
    pub fn phase_at(&self, samples: i64) -> T {
        if samples <= 0 {
            T::zero()
        } else if samples as usize >= self.q.len() {
            T::one()
        } else {
            self.q[samples as usize - 1]
        }
    }

    /// Reduces the oversampling by an integer factor, averaging each group
    /// of `factor` cells into one.
    pub fn decimate(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.oversampling.is_multiple_of(factor) || self.oversampling / factor < 1 {
            return Err(Error::InvalidPulse(format!(
                "cannot decimate oversampling {} by {factor}",
                self.oversampling
            )));
        }
        let scale = T::of(1.0 / factor as f64);
        let g: Vec<T> = self
            .g
            .chunks(factor)
            .map(|c| c.iter().copied().sum::<T>() * scale)
            .collect();
        let q = (0..g.len()).map(|i| self.q[(i + 1) * factor - 1]).collect();
        Ok(Self {
            g,
            q,
            chip_period_s: self.chip_period_s,
            oversampling: self.oversampling / factor,
            spec: self.spec,
        })
    }
}

#[inline]
fn normal_cdf(u: f64) -> f64 {
    0.5 * libm::erfc(-u / std::f64::consts::SQRT_2)
}

#[inline]
fn normal_pdf(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard deviation of the Gaussian filter in chip periods.
pub fn gaussian_sigma_chips(bt_product: f64) -> f64 {
    std::f64::consts::LN_2.sqrt() / (2.0 * std::f64::consts::PI * bt_product)
}

/// Untruncated Gaussian-filtered rectangle, `x` in chips from the pulse center,
/// value in units of 1/T_c.
pub fn gaussian_rect(x: f64, sigma: f64) -> f64 {
    normal_cdf((x + 0.5) / sigma) - normal_cdf((x - 0.5) / sigma)
}

/// Antiderivative of [`gaussian_rect`] in `x`.
fn gaussian_rect_integral(x: f64, sigma: f64) -> f64 {
    let psi = |u: f64| u * normal_cdf(u) + normal_pdf(u);
    sigma * (psi((x + 0.5) / sigma) - psi((x - 0.5) / sigma))
}

/// Fraction of the untruncated pulse energy inside `[-half, half]` chips.
fn energy_fraction(sigma: f64, half: f64) -> f64 {
    let outer = half.max(0.5) + 0.5 + 12.0 * sigma;
    let energy = |a: f64, b: f64| {
        let n = (((b - a) * 256.0).ceil() as usize).max(2) & !1usize;
        let n = n.max(2);
        let h = (b - a) / n as f64;
        let f = |x: f64| gaussian_rect(x, sigma).powi(2);
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    energy(-half, half) / energy(-outer, outer)
}

/// Samples the frequency pulse of `spec` at `oversampling` samples per chip.
pub fn make_pulse<T: Real>(
    spec: PulseSpec,
    chip_period_s: f64,
    oversampling: usize,
) -> Result<FrequencyPulse<T>> {
    spec.validate()?;
    if oversampling < 4 {
        return Err(Error::InvalidPulse(format!(
            "oversampling must be >= 4, got {oversampling}"
        )));
    }
    if !(chip_period_s > 0.0) || !chip_period_s.is_finite() {
        return Err(Error::InvalidPulse(format!(
            "chip period must be positive, got {chip_period_s}"
        )));
    }
    let len = spec.truncation_chips * oversampling;
    let o = oversampling as f64;

    // cell averages in units of 1/T_c
    let cells: Vec<f64> = match spec.shape {
        PulseShape::Rect => vec![1.0; len],
        PulseShape::GaussianFilteredRect => {
            let sigma = gaussian_sigma_chips(spec.bt_product);
            let half = spec.truncation_chips as f64 / 2.0;
            let fraction = energy_fraction(sigma, half);
            if fraction < MIN_ENERGY_FRACTION {
                return Err(Error::InvalidPulse(format!(
                    "{} chips hold only {:.2}% of the pulse energy at BT = {}; need {:.0}%",
                    spec.truncation_chips,
                    100.0 * fraction,
                    spec.bt_product,
                    100.0 * MIN_ENERGY_FRACTION
                )));
            }
            let edges: Vec<f64> = (0..=len)
                .map(|i| gaussian_rect_integral(i as f64 / o - half, sigma))
                .collect();
            let area = edges[len] - edges[0];
            edges.windows(2).map(|w| (w[1] - w[0]) * o / area).collect()
        }
    };

    // Renormalize so the discrete running sum ends at one to rounding.
    let total: f64 = cells.iter().sum::<f64>() / o;
    let mut acc = 0.0;
    let mut g = Vec::with_capacity(len);
    let mut q = Vec::with_capacity(len);
    for c in &cells {
        let c = c / total;
        acc += c / o;
        g.push(T::of(c / chip_period_s));
        q.push(T::of(acc));
    }
    if let Some(last) = q.last_mut() {
        *last = T::one();
    }
    Ok(FrequencyPulse {
        g,
        q,
        chip_period_s,
        oversampling,
        spec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_pulse_is_flat_with_linear_ramp() {
        let tc = 1e-6;
        let p: FrequencyPulse<f64> = make_pulse(PulseSpec::rect(), tc, 16).unwrap();
        assert_eq!(p.len(), 16);
        for (i, (&g, &q)) in p.g.iter().zip(&p.q).enumerate() {
            assert!((g * tc - 1.0).abs() < 1e-12);
            assert!((q - (i + 1) as f64 / 16.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_pulse_support_matches_chip_count() {
        let tc = 800e-9 / 70.0;
        let p: FrequencyPulse<f64> = make_pulse(PulseSpec::gaussian(0.1, 8), tc, 16).unwrap();
        assert_eq!(p.len(), 128);
        assert!((p.duration_s() * 1e9 - 91.4).abs() < 0.05);
    }

    #[test]
    fn rejects_short_truncation() {
        let err = make_pulse::<f64>(PulseSpec::gaussian(0.1, 2), 1e-6, 16).unwrap_err();
        assert!(matches!(err, Error::InvalidPulse(_)));
        assert!(make_pulse::<f64>(PulseSpec::gaussian(-0.3, 4), 1e-6, 16).is_err());
        assert!(make_pulse::<f64>(PulseSpec::gaussian(0.3, 4), 1e-6, 2).is_err());
        assert!(make_pulse::<f64>(PulseSpec::gaussian(0.3, 0), 1e-6, 16).is_err());
    }

    #[test]
    fn phase_at_clamps() {
        let p: FrequencyPulse<f64> = make_pulse(PulseSpec::gaussian(0.3, 4), 1.0, 8).unwrap();
        assert_eq!(p.phase_at(-3), 0.0);
        assert_eq!(p.phase_at(0), 0.0);
        assert_eq!(p.phase_at(1), p.q[0]);
        assert_eq!(p.phase_at(32), 1.0);
        assert_eq!(p.phase_at(1000), 1.0);
    }

    #[test]
    fn f32_pulse_normalized() {
        let p: FrequencyPulse<f32> = make_pulse(PulseSpec::gaussian(0.1, 8), 1.0, 16).unwrap();
        let area: f32 = p.g.iter().sum::<f32>() / 16.0;
        assert!((area - 1.0).abs() < 1e-5);
    }
}
