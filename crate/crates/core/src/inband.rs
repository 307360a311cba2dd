//! Per-subcarrier choice of the `omega` bits so that every frequency
//! excursion during a phase transition points toward the band center.
//!
//! For each subcarrier `n` and each symbol `m` the two candidate shifts
//! `2*pi*m/M` and `2*pi*m/M - 2*pi` are scored by how far the instantaneous
//! frequency strays from the band center during the transition; the smaller
//! excursion wins, ties go to the negative shift.

use crate::config::SystemConfig;
use crate::error::Result;
use crate::modulator::synthesize_phase;
use crate::pulse::FrequencyPulse;
use crate::scalar::{two_pi, wrap_phase, Real};
use crate::shift::{candidate_shift, shift_set, PhaseShiftSet};

/// Relative tolerance under which two candidate costs count as a tie.
const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OmegaAssignment<T> {
    pub omegas: Vec<Vec<bool>>,
    pub shift_sets: Vec<PhaseShiftSet<T>>,
    /// Worst instantaneous-frequency distance from band center over the
    /// chosen shifts of each subcarrier, in Hz.
    pub peak_deviation_hz: Vec<f64>,
    /// How far any probe trace leaves `[f_min, f_max]` of the grid, in Hz.
    pub residual_hz: f64,
}

/// Instantaneous frequency (Hz) of a probe that runs `lead` chips of pure
/// carrier, applies `shift` on the next chip and continues for `lead` chips.
/// Only the samples after the carrier has settled are returned.
fn probe_trace<T: Real>(carrier: T, shift: T, pulse: &FrequencyPulse<T>) -> Result<Vec<f64>> {
    let l = pulse.support_chips();
    let o = pulse.oversampling;
    let mut increments = vec![carrier; 2 * l + 1];
    increments[l] += shift;
    let phase = synthesize_phase(&increments, pulse, o)?;
    let scale = 1.0 / (two_pi::<f64>() * pulse.sample_period_s());
    Ok(phase[l * o - 1..]
        .windows(2)
        .map(|w| wrap_phase((w[1] - w[0]).as_f64()) * scale)
        .collect())
}

fn carrier_of<T: Real>(freq_hz: f64, pulse: &FrequencyPulse<T>) -> T {
    T::of(2.0 * std::f64::consts::PI * freq_hz * pulse.chip_period_s)
}

/// Extremal instantaneous frequency while `shift` is applied on top of a
/// carrier at `freq_hz`: the transition excursion, measured against the
/// steady carrier trace, added to `freq_hz`.
pub fn peak_instantaneous_freq<T: Real>(freq_hz: f64, shift: T, pulse: &FrequencyPulse<T>) -> Result<f64> {
    let carrier = carrier_of(freq_hz, pulse);
    let with = probe_trace(carrier, shift, pulse)?;
    let without = probe_trace(carrier, T::zero(), pulse)?;
    let excursion = with
        .iter()
        .zip(&without)
        .map(|(a, b)| a - b)
        .fold(0.0f64, |acc, d| if d.abs() > acc.abs() { d } else { acc });
    Ok(freq_hz + excursion)
}

/// Chooses `omega` for every subcarrier of `cfg`.
pub fn choose_omega<T: Real>(cfg: &SystemConfig, pulse: &FrequencyPulse<T>) -> Result<OmegaAssignment<T>> {
    cfg.validate()?;
    let m_order = cfg.psk_order;
    let n = cfg.n_subcarriers;
    let f_min = cfg.subcarrier_freq_hz(0);
    let f_max = cfg.subcarrier_freq_hz(n - 1);

    let mut omegas = Vec::with_capacity(n);
    let mut shift_sets = Vec::with_capacity(n);
    let mut peak_deviation_hz = Vec::with_capacity(n);
    let mut residual = 0.0f64;

    for idx in 0..n {
        let f_n = cfg.subcarrier_freq_hz(idx);
        let mut omega = Vec::with_capacity(m_order - 1);
        let mut worst = f_n.abs();
        for m in 1..m_order {
            let up = peak_instantaneous_freq(f_n, candidate_shift::<T>(m, m_order, false), pulse)?;
            let down = peak_instantaneous_freq(f_n, candidate_shift::<T>(m, m_order, true), pulse)?;
            let cost_up = f_n.abs().max(up.abs());
            let cost_down = f_n.abs().max(down.abs());
            let tie = (cost_up - cost_down).abs() <= TIE_TOLERANCE * cost_up.max(cost_down);
            let lowered = tie || cost_down < cost_up;
            worst = worst.max(if lowered { cost_down } else { cost_up });
            omega.push(lowered);
        }
        let set = shift_set::<T>(m_order, &omega)?;

        let carrier = carrier_of(f_n, pulse);
        for &s in &set.shifts {
            for f in probe_trace(carrier, s, pulse)? {
                residual = residual.max(f - f_max).max(f_min - f);
            }
        }

        omegas.push(omega);
        shift_sets.push(set);
        peak_deviation_hz.push(worst);
    }

    Ok(OmegaAssignment {
        omegas,
        shift_sets,
        peak_deviation_hz,
        residual_hz: residual,
    })
}
