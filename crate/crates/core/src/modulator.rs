//! Constant-envelope CPFSK synthesis for every antenna and the aggregate.
//!
//! Each chip `k` of subcarrier `n` carries a phase increment
//! `theta_k = 2*pi*(n - N/2)/N + delta_k`, where `delta_k` is the data phase
//! shift on the first chip of a symbol and zero elsewhere. The phase
//! trajectory is `phi(t) = sum_k theta_k * q(t - k*T_c)`, so a repeated symbol
//! is a pure tone at the subcarrier frequency.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::pulse::FrequencyPulse;
use crate::scalar::{two_pi, Real};
use crate::shift::PhaseShiftSet;
use crate::signal::IqSignal;

/// Subcarriers summed per parallel task before the ordered final reduction.
const AGGREGATE_CHUNK: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierPlan<T> {
    pub index: usize,
    /// Signed position on the subcarrier grid, `index - N/2`.
    pub grid_position: i64,
    pub center_freq_hz: f64,
    pub shift_set: PhaseShiftSet<T>,
}

impl<T: Real> SubcarrierPlan<T> {
    pub fn new(cfg: &SystemConfig, index: usize, shift_set: PhaseShiftSet<T>) -> Self {
        Self {
            index,
            grid_position: cfg.grid_position(index),
            center_freq_hz: cfg.subcarrier_freq_hz(index),
            shift_set,
        }
    }

    /// Carrier phase advance per chip, `2*pi*f_n*T_c`.
    pub fn carrier_increment(&self, n_subcarriers: usize) -> T {
        two_pi::<T>() * T::of(self.grid_position as f64) / T::of(n_subcarriers as f64)
    }
}

/// Plans for all subcarriers, one shift set each.
pub fn plan_subcarriers<T: Real>(
    cfg: &SystemConfig,
    shift_sets: Vec<PhaseShiftSet<T>>,
) -> Result<Vec<SubcarrierPlan<T>>> {
    if shift_sets.len() != cfg.n_subcarriers {
        return Err(Error::Dimension(format!(
            "{} shift sets for {} subcarriers",
            shift_sets.len(),
            cfg.n_subcarriers
        )));
    }
    if let Some(bad) = shift_sets.iter().find(|s| s.order() != cfg.psk_order) {
        return Err(Error::Dimension(format!(
            "shift set of order {} in a {}-PSK system",
            bad.order(),
            cfg.psk_order
        )));
    }
    Ok(shift_sets
        .into_iter()
        .enumerate()
        .map(|(n, s)| SubcarrierPlan::new(cfg, n, s))
        .collect())
}

/// Data symbols per subcarrier. Column 0 is the differential reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolFrame {
    pub symbols: Vec<Vec<u32>>,
    pub m_order: usize,
}

impl SymbolFrame {
    pub fn new(symbols: Vec<Vec<u32>>, m_order: usize) -> Result<Self> {
        let k = symbols.first().map_or(0, Vec::len);
        if symbols.is_empty() || k < 2 {
            return Err(Error::Dimension(format!(
                "frame needs at least one row and two symbols, got {} x {k}",
                symbols.len()
            )));
        }
        if symbols.iter().any(|row| row.len() != k) {
            return Err(Error::Dimension("ragged symbol frame".into()));
        }
        if symbols.iter().flatten().any(|&s| s as usize >= m_order) {
            return Err(Error::InvalidConfig(format!(
                "symbol out of range for {m_order}-PSK"
            )));
        }
        Ok(Self { symbols, m_order })
    }

    /// Uniform random data with a zero reference symbol on every subcarrier.
    pub fn random(n_subcarriers: usize, n_symbols: usize, m_order: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let symbols = (0..n_subcarriers)
            .map(|_| {
                std::iter::once(0)
                    .chain((1..n_symbols).map(|_| rng.random_range(0..m_order as u32)))
                    .collect()
            })
            .collect();
        Self::new(symbols, m_order)
    }

    pub fn n_subcarriers(&self) -> usize {
        self.symbols.len()
    }

    pub fn n_symbols(&self) -> usize {
        self.symbols[0].len()
    }
}

/// Per-chip phase increments of one subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipIncrementStream<T> {
    pub increments: Vec<T>,
}

/// `out[0] = s[0]`, `out[k] = (s[k] - s[k-1]) mod M`.
pub fn differential_precode(symbols: &[u32], m_order: usize) -> Vec<u32> {
    let m = m_order as u32;
    let mut prev = 0;
    symbols
        .iter()
        .map(|&s| {
            let d = (s + m - prev % m) % m;
            prev = s;
            d
        })
        .collect()
}

pub fn build_increments<T: Real>(
    diff_symbols: &[u32],
    plan: &SubcarrierPlan<T>,
    cfg: &SystemConfig,
) -> ChipIncrementStream<T> {
    let carrier = plan.carrier_increment(cfg.n_subcarriers);
    let mut increments = vec![carrier; diff_symbols.len() * cfg.repetition];
    for (k, &d) in diff_symbols.iter().enumerate() {
        increments[k * cfg.repetition] += plan.shift_set.shift(d as usize);
    }
    ChipIncrementStream { increments }
}

/// Phase-pulse superposition of the chip increments, `O` samples per chip.
pub fn synthesize<T: Real>(
    increments: &ChipIncrementStream<T>,
    pulse: &FrequencyPulse<T>,
    cfg: &SystemConfig,
) -> Result<IqSignal<T>> {
    let phases = synthesize_phase(&increments.increments, pulse, cfg.oversampling)?;
    let samples = phases
        .into_iter()
        .map(|p| Complex::from_polar(T::one(), p))
        .collect();
    IqSignal::new(samples, cfg.sample_rate_hz())
}

/// Phase trajectory (radians) behind [`synthesize`]. Fully settled chips are
/// folded into a base phase kept modulo `2*pi`.
pub fn synthesize_phase<T: Real>(
    increments: &[T],
    pulse: &FrequencyPulse<T>,
    oversampling: usize,
) -> Result<Vec<T>> {
    if pulse.oversampling != oversampling {
        return Err(Error::Dimension(format!(
            "pulse has {} samples per chip, configuration {}",
            pulse.oversampling, oversampling
        )));
    }
    let o = oversampling;
    let l = pulse.support_chips();
    let tau = two_pi::<T>();
    // weights[r][d]: phase pulse of the chip d chips back, r samples into the current chip
    let weights: Vec<Vec<T>> = (0..o)
        .map(|r| (0..l).map(|d| pulse.phase_at((d * o + r) as i64)).collect())
        .collect();

    let mut out = Vec::with_capacity(increments.len() * o);
    let mut base = T::zero();
    for j in 0..increments.len() {
        if j >= l {
            base = (base + increments[j - l]) % tau;
        }
        let lo = (j + 1).saturating_sub(l);
        for w in &weights {
            let mut phase = base;
            for k in lo..=j {
                phase += increments[k] * w[j - k];
            }
            out.push(phase);
        }
    }
    Ok(out)
}

/// Transmit signals of one frame.
#[derive(Debug, Clone)]
pub struct Modulated<T> {
    pub per_antenna: Vec<IqSignal<T>>,
    /// Sum of the antenna signals scaled by `1/sqrt(N)`.
    pub aggregate: IqSignal<T>,
}

fn check_frame<T: Real>(
    frame: &SymbolFrame,
    plans: &[SubcarrierPlan<T>],
    cfg: &SystemConfig,
) -> Result<()> {
    cfg.validate()?;
    if frame.n_subcarriers() != plans.len() || plans.len() != cfg.n_subcarriers {
        return Err(Error::Dimension(format!(
            "frame has {} rows, {} plans, configuration {} subcarriers",
            frame.n_subcarriers(),
            plans.len(),
            cfg.n_subcarriers
        )));
    }
    if frame.m_order != cfg.psk_order {
        return Err(Error::Dimension(format!(
            "frame is {}-PSK, configuration {}-PSK",
            frame.m_order, cfg.psk_order
        )));
    }
    Ok(())
}

/// Transmit signal of a single antenna.
pub fn modulate_antenna<T: Real>(
    symbols: &[u32],
    plan: &SubcarrierPlan<T>,
    pulse: &FrequencyPulse<T>,
    cfg: &SystemConfig,
) -> Result<IqSignal<T>> {
    let diff = differential_precode(symbols, cfg.psk_order);
    synthesize(&build_increments(&diff, plan, cfg), pulse, cfg)
}

pub fn modulate_frame<T: Real>(
    frame: &SymbolFrame,
    plans: &[SubcarrierPlan<T>],
    pulse: &FrequencyPulse<T>,
    cfg: &SystemConfig,
) -> Result<Modulated<T>> {
    check_frame(frame, plans, cfg)?;
    let per_antenna = frame
        .symbols
        .par_iter()
        .zip(plans.par_iter())
        .map(|(row, plan)| modulate_antenna(row, plan, pulse, cfg))
        .collect::<Result<Vec<_>>>()?;
    let scale = T::one() / T::of(cfg.n_subcarriers as f64).sqrt();
    let mut acc = vec![Complex::new(T::zero(), T::zero()); per_antenna[0].len()];
    for sig in &per_antenna {
        for (a, s) in acc.iter_mut().zip(&sig.samples) {
            *a += *s;
        }
    }
    for a in &mut acc {
        *a *= scale;
    }
    let aggregate = IqSignal::new(acc, cfg.sample_rate_hz())?;
    Ok(Modulated {
        per_antenna,
        aggregate,
    })
}

/// Aggregate signal only, without keeping the per-antenna signals.
///
/// Subcarriers are summed in fixed chunks on worker threads and the chunk
/// sums are added in index order, so the result does not depend on the
/// thread schedule.
pub fn modulate_aggregate<T: Real>(
    frame: &SymbolFrame,
    plans: &[SubcarrierPlan<T>],
    pulse: &FrequencyPulse<T>,
    cfg: &SystemConfig,
) -> Result<IqSignal<T>> {
    check_frame(frame, plans, cfg)?;
    let len = frame.n_symbols() * cfg.samples_per_symbol();
    let partials = frame
        .symbols
        .par_chunks(AGGREGATE_CHUNK)
        .zip(plans.par_chunks(AGGREGATE_CHUNK))
        .map(|(rows, chunk_plans)| -> Result<Vec<Complex<T>>> {
            let mut acc = vec![Complex::new(T::zero(), T::zero()); len];
            for (row, plan) in rows.iter().zip(chunk_plans) {
                let sig = modulate_antenna(row, plan, pulse, cfg)?;
                for (a, s) in acc.iter_mut().zip(&sig.samples) {
                    *a += *s;
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = T::one() / T::of(cfg.n_subcarriers as f64).sqrt();
    let mut acc = vec![Complex::new(T::zero(), T::zero()); len];
    for part in &partials {
        for (a, s) in acc.iter_mut().zip(part) {
            *a += *s;
        }
    }
    for a in &mut acc {
        *a *= scale;
    }
    IqSignal::new(acc, cfg.sample_rate_hz())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PulseSpec;
    use crate::pulse::make_pulse;
    use crate::shift::shift_set;
    use std::f64::consts::PI;

    fn rect_cfg(n: usize, t: usize) -> SystemConfig {
        let mut cfg = SystemConfig::new(n, t, 4, 1e-6);
        cfg.pulse = PulseSpec::rect();
        cfg
    }

    #[test]
    fn precode_examples() {
        assert_eq!(differential_precode(&[1, 1, 1, 1], 2), vec![1, 0, 0, 0]);
        assert_eq!(differential_precode(&[0, 0, 0], 4), vec![0, 0, 0]);
        assert_eq!(differential_precode(&[0, 1, 3, 3], 4), vec![0, 1, 2, 0]);
        assert_eq!(differential_precode(&[3, 0], 4), vec![3, 1]);
    }

    #[test]
    fn increments_center_subcarrier_all_zero() {
        let cfg = rect_cfg(64, 70);
        let plan = SubcarrierPlan::new(&cfg, 32, PhaseShiftSet::<f64>::base(4).unwrap());
        let inc = build_increments(&[0, 0, 0], &plan, &cfg);
        assert_eq!(inc.increments.len(), 210);
        assert!(inc.increments.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn increments_follow_dft_row() {
        let cfg = rect_cfg(64, 70);
        let plan = SubcarrierPlan::new(&cfg, 33, PhaseShiftSet::<f64>::base(4).unwrap());
        let inc = build_increments(&[0, 0], &plan, &cfg);
        assert!(inc.increments.iter().all(|&x| (x - 2.0 * PI / 64.0).abs() < 1e-15));
    }

    #[test]
    fn upper_sideband_binary_transition() {
        let mut cfg = rect_cfg(64, 70);
        cfg.psk_order = 2;
        let plan = SubcarrierPlan::new(&cfg, 40, shift_set::<f64>(2, &[true]).unwrap());
        let inc = build_increments(&[0, 1], &plan, &cfg);
        let carrier = 2.0 * PI * 8.0 / 64.0;
        assert!((inc.increments[70] - (carrier - PI)).abs() < 1e-12);
        assert!((inc.increments[71] - carrier).abs() < 1e-12);
    }

    #[test]
    fn constant_pi_over_two_is_msk_tone() {
        let cfg = rect_cfg(1, 1);
        let pulse = make_pulse::<f64>(PulseSpec::rect(), cfg.chip_period_s, 16).unwrap();
        let inc = ChipIncrementStream {
            increments: vec![PI / 2.0; 32],
        };
        let sig = synthesize(&inc, &pulse, &cfg).unwrap();
        let f = 1.0 / (4.0 * cfg.chip_period_s);
        for (i, s) in sig.samples.iter().enumerate() {
            let t = i as f64 / cfg.sample_rate_hz();
            let expect = Complex::from_polar(1.0, 2.0 * PI * f * t);
            assert!((s - expect).norm() < 1e-9, "sample {i}");
        }
    }

    #[test]
    fn zero_increments_give_dc() {
        let cfg = rect_cfg(1, 1);
        let pulse = make_pulse::<f64>(PulseSpec::gaussian(0.3, 4), cfg.chip_period_s, 16).unwrap();
        let inc = ChipIncrementStream {
            increments: vec![0.0; 10],
        };
        let sig = synthesize(&inc, &pulse, &cfg).unwrap();
        assert!(sig.samples.iter().all(|s| *s == Complex::new(1.0, 0.0)));
    }

    #[test]
    fn single_pi_ramps_then_holds() {
        let cfg = rect_cfg(1, 1);
        let pulse = make_pulse::<f64>(PulseSpec::rect(), cfg.chip_period_s, 16).unwrap();
        let mut increments = vec![0.0; 4];
        increments[0] = PI;
        let phase = synthesize_phase(&increments, &pulse, 16).unwrap();
        for (i, &p) in phase.iter().enumerate() {
            let expect = if i < 16 { PI * i as f64 / 16.0 } else { PI };
            assert!((p - expect).abs() < 1e-12, "sample {i}: {p}");
        }
    }

    #[test]
    fn single_center_subcarrier_constant_symbols_is_dc() {
        let cfg = SystemConfig::new(1, 4, 4, 1e-6);
        let pulse = make_pulse::<f64>(cfg.pulse, cfg.chip_period_s, 16).unwrap();
        let plans = plan_subcarriers(&cfg, vec![PhaseShiftSet::base(4).unwrap()]).unwrap();
        let frame = SymbolFrame::new(vec![vec![0; 5]], 4).unwrap();
        let m = modulate_frame(&frame, &plans, &pulse, &cfg).unwrap();
        assert_eq!(m.aggregate.len(), 5 * 4 * 16);
        assert!(m.aggregate.samples.iter().all(|s| (s - Complex::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn aggregate_paths_agree() {
        let mut cfg = SystemConfig::new(8, 12, 4, 1e-6);
        cfg.pulse = PulseSpec::gaussian(0.3, 4);
        let pulse = make_pulse::<f64>(cfg.pulse, cfg.chip_period_s, 16).unwrap();
        let plans =
            plan_subcarriers(&cfg, (0..8).map(|_| PhaseShiftSet::base(4).unwrap()).collect()).unwrap();
        let frame = SymbolFrame::random(8, 6, 4, 3).unwrap();
        let full = modulate_frame(&frame, &plans, &pulse, &cfg).unwrap();
        let agg = modulate_aggregate(&frame, &plans, &pulse, &cfg).unwrap();
        for (a, b) in full.aggregate.samples.iter().zip(&agg.samples) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn frame_dimension_mismatch() {
        let cfg = SystemConfig::new(2, 4, 4, 1e-6);
        let pulse = make_pulse::<f64>(PulseSpec::gaussian(0.3, 4), cfg.chip_period_s, 16).unwrap();
        let plans = plan_subcarriers(&cfg, vec![PhaseShiftSet::base(4).unwrap(); 2]).unwrap();
        let frame = SymbolFrame::random(3, 4, 4, 0).unwrap();
        assert!(matches!(
            modulate_frame(&frame, &plans, &pulse, &cfg),
            Err(Error::Dimension(_))
        ));
        assert!(SymbolFrame::new(vec![vec![0]], 4).is_err());
        assert!(SymbolFrame::new(vec![vec![0, 4]], 4).is_err());
    }
}
