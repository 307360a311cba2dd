use crate::error::{Error, Result};

use super::psd::PsdEstimate;

/// Piecewise-linear PSD limit versus offset from band center, in dB relative
/// to the uniform in-band density.
///
/// Text form: one `offset_hz limit_db` pair per line, `#` comments, and an
/// optional `symmetric` line that mirrors the breakpoints onto negative
/// offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMask {
    pub breakpoints: Vec<(f64, f64)>,
    pub symmetric: bool,
}

impl SpectralMask {
    pub fn new(mut breakpoints: Vec<(f64, f64)>, symmetric: bool) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidMask("need at least two breakpoints".into()));
        }
        if breakpoints.iter().any(|(f, l)| !f.is_finite() || !l.is_finite()) {
            return Err(Error::InvalidMask("non-finite breakpoint".into()));
        }
        if symmetric && breakpoints.iter().any(|(f, _)| *f < 0.0) {
            return Err(Error::InvalidMask("symmetric mask with negative offset".into()));
        }
        breakpoints.sort_by(|a, b| a.0.total_cmp(&b.0));
        if breakpoints.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidMask("duplicate offset".into()));
        }
        Ok(Self {
            breakpoints,
            symmetric,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        let mut symmetric = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line == "symmetric" {
                symmetric = true;
                continue;
            }
            let mut fields = line.split_whitespace();
            let mut num = || -> Result<f64> {
                fields
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::InvalidMask(format!("line {}: expected `offset_hz limit_db`", lineno + 1)))
            };
            let offset = num()?;
            let limit = num()?;
            if fields.next().is_some() {
                return Err(Error::InvalidMask(format!("line {}: trailing fields", lineno + 1)));
            }
            points.push((offset, limit));
        }
        Self::new(points, symmetric)
    }

    /// Frequency span the mask covers.
    pub fn span(&self) -> (f64, f64) {
        let hi = self.breakpoints.last().unwrap().0;
        let lo = if self.symmetric { -hi } else { self.breakpoints[0].0 };
        (lo, hi)
    }

    /// Interpolated limit at `offset_hz`, `None` outside the span.
    pub fn limit_at(&self, offset_hz: f64) -> Option<f64> {
        let f = if self.symmetric { offset_hz.abs() } else { offset_hz };
        let bp = &self.breakpoints;
        if self.symmetric && f < bp[0].0 {
            return Some(bp[0].1);
        }
        if f < bp[0].0 || f > bp[bp.len() - 1].0 {
            return None;
        }
        let i = bp.partition_point(|p| p.0 <= f).min(bp.len() - 1).max(1);
        let (f0, l0) = bp[i - 1];
        let (f1, l1) = bp[i];
        Some(l0 + (l1 - l0) * (f - f0) / (f1 - f0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaskReport {
    pub pass: bool,
    pub worst_margin_db: f64,
    pub worst_freq_hz: f64,
    /// `(frequency, margin)` of every bin above the limit.
    pub offending: Vec<(f64, f64)>,
}

/// Compares the estimate, relative to uniform density over `inband_hz`, with
/// the mask bin by bin.
pub fn mask_check(psd: &PsdEstimate, mask: &SpectralMask, inband_hz: f64) -> Result<MaskReport> {
    let (lo, hi) = mask.span();
    let psd_lo = psd.freqs_hz[0];
    let psd_hi = *psd.freqs_hz.last().unwrap();
    if psd_lo < lo || psd_hi > hi {
        return Err(Error::MaskTooNarrow {
            mask_lo: lo,
            mask_hi: hi,
            psd_lo,
            psd_hi,
        });
    }
    let levels = psd.db_rel_inband(inband_hz);
    let mut worst = (f64::INFINITY, 0.0);
    let mut offending = Vec::new();
    for (&f, &level) in psd.freqs_hz.iter().zip(&levels) {
        let margin = mask.limit_at(f).expect("frequency inside mask span") - level;
        if margin < worst.0 {
            worst = (margin, f);
        }
        if margin < 0.0 {
            offending.push((f, margin));
        }
    }
    Ok(MaskReport {
        pass: offending.is_empty(),
        worst_margin_db: worst.0,
        worst_freq_hz: worst.1,
        offending,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_psd(width: f64, span: f64, bins: usize) -> PsdEstimate {
        let res = 2.0 * span / bins as f64;
        let freqs: Vec<f64> = (0..bins).map(|i| -span + (i as f64 + 0.5) * res).collect();
        let psd: Vec<f64> = freqs
            .iter()
            .map(|f| if f.abs() <= width / 2.0 { 1.0 / width } else { 1e-12 })
            .collect();
        PsdEstimate {
            freqs_hz: freqs,
            psd,
            resolution_hz: res,
        }
    }

    #[test]
    fn flat_band_passes_with_zero_margin() {
        let psd = flat_psd(100.0, 200.0, 400);
        let mask = SpectralMask::new(vec![(0.0, 0.0), (50.0, 0.0), (51.0, -100.0), (200.0, -100.0)], true).unwrap();
        let r = mask_check(&psd, &mask, 100.0).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.worst_margin_db.abs() < 1e-9);
    }

    #[test]
    fn out_of_band_tone_fails() {
        let mut psd = flat_psd(100.0, 200.0, 400);
        let idx = psd.freqs_hz.iter().position(|&f| f > 150.0).unwrap();
        psd.psd[idx] = 1e-4;
        let mask = SpectralMask::new(vec![(0.0, 0.0), (50.0, 0.0), (51.0, -60.0), (200.0, -60.0)], true).unwrap();
        let r = mask_check(&psd, &mask, 100.0).unwrap();
        assert!(!r.pass);
        assert_eq!(r.offending.len(), 1);
        assert_eq!(r.offending[0].0, psd.freqs_hz[idx]);
        assert_eq!(r.worst_freq_hz, psd.freqs_hz[idx]);
    }

    #[test]
    fn narrow_mask_rejected() {
        let psd = flat_psd(100.0, 200.0, 400);
        let mask = SpectralMask::new(vec![(0.0, 0.0), (100.0, -50.0)], true).unwrap();
        assert!(matches!(mask_check(&psd, &mask, 100.0), Err(Error::MaskTooNarrow { .. })));
        let one_sided = SpectralMask::new(vec![(0.0, 0.0), (300.0, -50.0)], false).unwrap();
        assert!(mask_check(&psd, &one_sided, 100.0).is_err());
    }

    #[test]
    fn parses_text_form() {
        let m = SpectralMask::parse("# example\nsymmetric\n0 3\n10e6 3 # edge\n12e6 -30\n").unwrap();
        assert!(m.symmetric);
        assert_eq!(m.breakpoints.len(), 3);
        assert_eq!(m.limit_at(-11e6), Some(-13.5));
        assert_eq!(m.limit_at(13e6), None);
        assert!(SpectralMask::parse("0 1 2\n5 3").is_err());
        assert!(SpectralMask::parse("0 x\n5 3").is_err());
        assert!(SpectralMask::parse("0 1").is_err());
    }
}
