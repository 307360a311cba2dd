//! Single-carrier reference waveforms: binary and quaternary GMSK,
//! repetition-coded GMSK, and linear PSK with root-raised-cosine pulses.

use std::f64::consts::PI;

use num_complex::Complex;

use crate::config::PulseSpec;
use crate::error::{Error, Result};
use crate::modulator::synthesize_phase;
use crate::pulse::{gaussian_sigma_chips, make_pulse};
use crate::scalar::Real;
use crate::signal::IqSignal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    GmskBinary,
    GmskQuaternary,
    GmskRepetition,
    LinearPskRrc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineSpec {
    pub kind: BaselineKind,
    /// Gaussian BT product for GMSK kinds, roll-off for linear PSK.
    pub bt_or_rolloff: f64,
    /// Chips per data symbol; 1 for no repetition.
    pub repetition: usize,
    /// Phase shift repeated on every chip of a repetition-coded symbol.
    pub repeated_shift: f64,
    pub psk_order: usize,
    pub symbol_period_s: f64,
    pub oversampling: usize,
    /// GMSK pulse support in chips, or RRC span in symbols.
    pub span: usize,
}

/// Smallest pulse support holding the rectangle plus 2.5 sigma on each side.
pub fn default_gmsk_truncation(bt: f64) -> usize {
    (2.0 * (0.5 + 2.5 * gaussian_sigma_chips(bt))).ceil() as usize
}

impl BaselineSpec {
    pub fn gmsk_binary(bt: f64, symbol_period_s: f64) -> Self {
        Self {
            kind: BaselineKind::GmskBinary,
            bt_or_rolloff: bt,
            repetition: 1,
            repeated_shift: 0.0,
            psk_order: 2,
            symbol_period_s,
            oversampling: 16,
            span: default_gmsk_truncation(bt),
        }
    }

    pub fn gmsk_quaternary(bt: f64, symbol_period_s: f64) -> Self {
        Self {
            kind: BaselineKind::GmskQuaternary,
            psk_order: 4,
            ..Self::gmsk_binary(bt, symbol_period_s)
        }
    }

    pub fn gmsk_repetition(
        bt: f64,
        repetition: usize,
        repeated_shift: f64,
        psk_order: usize,
        symbol_period_s: f64,
    ) -> Self {
        Self {
            kind: BaselineKind::GmskRepetition,
            repetition,
            repeated_shift,
            psk_order,
            ..Self::gmsk_binary(bt, symbol_period_s)
        }
    }

    pub fn rrc_psk(rolloff: f64, psk_order: usize, symbol_period_s: f64) -> Self {
        Self {
            kind: BaselineKind::LinearPskRrc,
            bt_or_rolloff: rolloff,
            repetition: 1,
            repeated_shift: 0.0,
            psk_order,
            symbol_period_s,
            oversampling: 16,
            span: 16,
        }
    }

    pub fn chip_period_s(&self) -> f64 {
        self.symbol_period_s / self.repetition as f64
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.oversampling as f64 / self.chip_period_s()
    }

    fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidBaseline(m));
        if self.repetition == 0 {
            return fail("repetition must be >= 1".into());
        }
        if self.psk_order < 2 || !self.psk_order.is_power_of_two() {
            return fail(format!("psk order {} is not a power of two >= 2", self.psk_order));
        }
        if !(self.symbol_period_s > 0.0) {
            return fail("symbol period must be positive".into());
        }
        match self.kind {
            BaselineKind::GmskBinary | BaselineKind::GmskQuaternary => {
                if self.repetition != 1 {
                    return fail("plain GMSK has no repetition; use GmskRepetition".into());
                }
                let order = if self.kind == BaselineKind::GmskBinary { 2 } else { 4 };
                if self.psk_order != order {
                    return fail(format!("{:?} needs psk order {order}", self.kind));
                }
            }
            BaselineKind::GmskRepetition => {}
            BaselineKind::LinearPskRrc => {
                if !(self.bt_or_rolloff > 0.0 && self.bt_or_rolloff <= 1.0) {
                    return fail(format!("roll-off must lie in (0, 1], got {}", self.bt_or_rolloff));
                }
                if self.span == 0 {
                    return fail("RRC span must be positive".into());
                }
            }
        }
        Ok(())
    }
}

/// Gray-mapped GMSK phase shift of `symbol`.
pub fn gmsk_shift(kind: BaselineKind, symbol: u32) -> Result<f64> {
    match (kind, symbol) {
        (BaselineKind::GmskBinary, 0) => Ok(PI / 2.0),
        (BaselineKind::GmskBinary, 1) => Ok(-PI / 2.0),
        (BaselineKind::GmskQuaternary, 0) => Ok(PI / 4.0),
        (BaselineKind::GmskQuaternary, 1) => Ok(3.0 * PI / 4.0),
        (BaselineKind::GmskQuaternary, 3) => Ok(-3.0 * PI / 4.0),
        (BaselineKind::GmskQuaternary, 2) => Ok(-PI / 4.0),
        _ => Err(Error::InvalidBaseline(format!("symbol {symbol} not valid for {kind:?}"))),
    }
}

/// Shift on the first chip of a repetition-coded symbol. Symbol 0 keeps the
/// repeated shift; any other symbol adds its phase step `2*pi*s/M` and takes
/// whichever `2*pi` alias lies closer to zero (the negative one on a tie).
pub fn repetition_transition_shift(repeated: f64, symbol: u32, m_order: usize) -> f64 {
    if symbol == 0 {
        return repeated;
    }
    let step = 2.0 * PI * symbol as f64 / m_order as f64;
    let up = repeated + step;
    let down = up - 2.0 * PI;
    if up.abs() < down.abs() {
        up
    } else {
        down
    }
}

fn chip_shifts(spec: &BaselineSpec, symbols: &[u32]) -> Result<Vec<f64>> {
    match spec.kind {
        BaselineKind::GmskBinary | BaselineKind::GmskQuaternary => {
            symbols.iter().map(|&s| gmsk_shift(spec.kind, s)).collect()
        }
        BaselineKind::GmskRepetition => {
            let mut chips = Vec::with_capacity(symbols.len() * spec.repetition);
            for &s in symbols {
                if s as usize >= spec.psk_order {
                    return Err(Error::InvalidBaseline(format!("symbol {s} out of range")));
                }
                chips.push(repetition_transition_shift(spec.repeated_shift, s, spec.psk_order));
                chips.extend(std::iter::repeat_n(spec.repeated_shift, spec.repetition - 1));
            }
            Ok(chips)
        }
        BaselineKind::LinearPskRrc => Err(Error::InvalidBaseline("linear PSK is not a GMSK kind".into())),
    }
}

/// Constant-envelope GMSK-family waveform for differential `symbols`.
pub fn gmsk_waveform<T: Real>(spec: &BaselineSpec, symbols: &[u32]) -> Result<IqSignal<T>> {
    spec.validate()?;
    let pulse = make_pulse::<T>(
        PulseSpec::gaussian(spec.bt_or_rolloff, spec.span),
        spec.chip_period_s(),
        spec.oversampling,
    )?;
    let increments: Vec<T> = chip_shifts(spec, symbols)?.into_iter().map(T::of).collect();
    let phase = synthesize_phase(&increments, &pulse, spec.oversampling)?;
    IqSignal::new(
        phase.into_iter().map(|p| Complex::from_polar(T::one(), p)).collect(),
        spec.sample_rate_hz(),
    )
}

/// Unit-energy root-raised-cosine taps, `span` symbols long plus one tap.
pub fn rrc_pulse(rolloff: f64, span: usize, oversampling: usize) -> Result<Vec<f64>> {
    if !(rolloff > 0.0 && rolloff <= 1.0) {
        return Err(Error::InvalidBaseline(format!("roll-off must lie in (0, 1], got {rolloff}")));
    }
    let b = rolloff;
    let half = (span * oversampling) as f64 / 2.0;
    let taps: Vec<f64> = (0..=span * oversampling)
        .map(|i| {
            let t = (i as f64 - half) / oversampling as f64;
            if t == 0.0 {
                1.0 - b + 4.0 * b / PI
            } else if ((4.0 * b * t).abs() - 1.0).abs() < 1e-9 {
                b / 2f64.sqrt()
                    * ((1.0 + 2.0 / PI) * (PI / (4.0 * b)).sin() + (1.0 - 2.0 / PI) * (PI / (4.0 * b)).cos())
            } else {
                ((PI * t * (1.0 - b)).sin() + 4.0 * b * t * (PI * t * (1.0 + b)).cos())
                    / (PI * t * (1.0 - (4.0 * b * t).powi(2)))
            }
        })
        .collect();
    let energy: f64 = taps.iter().map(|h| h * h).sum();
    Ok(taps.iter().map(|h| h / energy.sqrt()).collect())
}

/// Linear M-PSK through a root-raised-cosine filter.
pub fn rrc_psk_waveform<T: Real>(spec: &BaselineSpec, symbols: &[u32]) -> Result<IqSignal<T>> {
    spec.validate()?;
    if spec.kind != BaselineKind::LinearPskRrc {
        return Err(Error::InvalidBaseline(format!("{:?} is not linear PSK", spec.kind)));
    }
    if symbols.is_empty() {
        return Err(Error::InvalidBaseline("no symbols".into()));
    }
    let taps = rrc_pulse(spec.bt_or_rolloff, spec.span, spec.oversampling)?;
    let o = spec.oversampling;
    let mut out = vec![Complex::new(0.0, 0.0); (symbols.len() - 1) * o + taps.len()];
    for (k, &s) in symbols.iter().enumerate() {
        if s as usize >= spec.psk_order {
            return Err(Error::InvalidBaseline(format!("symbol {s} out of range")));
        }
        let a = Complex::from_polar(1.0, 2.0 * PI * s as f64 / spec.psk_order as f64);
        for (j, h) in taps.iter().enumerate() {
            out[k * o + j] += a * h;
        }
    }
    IqSignal::new(
        out.into_iter().map(|z| Complex::new(T::of(z.re), T::of(z.im))).collect(),
        spec.sample_rate_hz(),
    )
}
