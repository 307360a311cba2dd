use std::f64::consts::{PI, TAU};

use matisk::analysis::{welch_psd, Window};
use matisk::demod::{fft_window_demod, sample_chips};
use matisk::modulator::{differential_precode, modulate_aggregate, modulate_frame};
use matisk::scalar::wrap_phase;
use matisk::{shift_set, Link64, PulseSpec, SymbolFrame, SystemConfig};
use num_complex::Complex;
use proptest::prelude::*;

fn small_cfg(n: usize, guard: usize, m: usize, bt: f64, l: usize, seed: u64) -> SystemConfig {
    let mut cfg = SystemConfig::new(n, n + l + guard, m, 1e-7);
    cfg.pulse = PulseSpec::gaussian(bt, l);
    cfg.oversampling = 8;
    cfg.seed = seed;
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shift_sets_are_congruent(log_m in 1u32..5, bits in any::<u32>()) {
        let m = 1usize << log_m;
        let omega: Vec<bool> = (0..m - 1).map(|i| bits >> (i % 32) & 1 == 1).collect();
        let set = shift_set::<f64>(m, &omega).unwrap();
        prop_assert_eq!(set.shifts[0], 0.0);
        for (i, s) in set.shifts.iter().enumerate() {
            let base = TAU * i as f64 / m as f64;
            prop_assert!((Complex::from_polar(1.0, *s) - Complex::from_polar(1.0, base)).norm() < 1e-12);
            prop_assert!(s.abs() < TAU);
        }
    }

    #[test]
    fn precode_inverts(symbols in prop::collection::vec(0u32..8, 1..64)) {
        let diff = differential_precode(&symbols, 8);
        let mut acc = 0;
        for (d, s) in diff.iter().zip(&symbols) {
            acc = (acc + d) % 8;
            prop_assert_eq!(acc, *s);
        }
    }

    #[test]
    fn round_trip_with_decayed_pulse(
        log_n in 2u32..5,
        guard in 0usize..3,
        log_m in 1u32..4,
        bt in prop::sample::select(vec![0.1, 0.3]),
        seed in any::<u64>(),
    ) {
        let l = if bt < 0.2 { 8 } else { 4 };
        let cfg = small_cfg(1 << log_n, guard, 1 << log_m, bt, l, seed);
        let report = Link64::new(cfg).unwrap().loopback(40).unwrap();
        prop_assert_eq!(report.symbol_errors, 0);
        prop_assert_eq!(report.erasures, 0);
        prop_assert!(report.per_subcarrier_sir_db.iter().all(|&s| s >= 60.0));
    }

    #[test]
    fn aggregate_is_linear_and_unit_envelope(log_n in 1u32..4, seed in any::<u64>()) {
        let cfg = small_cfg(1 << log_n, 1, 4, 0.3, 4, seed);
        let link = Link64::new(cfg.clone()).unwrap();
        let frame = link.random_frame(6).unwrap();
        let tx = modulate_frame(&frame, &link.plans, &link.pulse, &cfg).unwrap();
        let agg = modulate_aggregate(&frame, &link.plans, &link.pulse, &cfg).unwrap();
        let scale = (cfg.n_subcarriers as f64).sqrt();
        for (i, a) in agg.samples.iter().enumerate() {
            let direct: Complex<f64> = tx.per_antenna.iter().map(|s| s.samples[i]).sum::<Complex<f64>>() / scale;
            prop_assert!((a - direct).norm() <= 1e-10 * scale);
            prop_assert!((tx.aggregate.samples[i] - direct).norm() <= 1e-10 * scale);
        }
        for sig in &tx.per_antenna {
            prop_assert!(sig.max_envelope_error() <= 1e-12);
        }
    }

    #[test]
    fn lowered_shifts_end_on_the_same_phase(bits in any::<u8>(), seed in any::<u64>()) {
        let cfg = small_cfg(8, 0, 4, 0.1, 8, seed);
        let link = Link64::new(cfg.clone()).unwrap();
        let frame = link.random_frame(10).unwrap();
        let omega: Vec<bool> = (0..3).map(|i| bits >> i & 1 == 1).collect();
        let mut plans = link.plans.clone();
        for p in &mut plans {
            p.shift_set = shift_set(4, &omega).unwrap();
        }
        let a = modulate_frame(&frame, &link.plans, &link.pulse, &cfg).unwrap();
        let b = modulate_frame(&frame, &plans, &link.pulse, &cfg).unwrap();
        let spb = cfg.samples_per_symbol();
        for (x, y) in a.per_antenna.iter().zip(&b.per_antenna) {
            for k in 1..=frame.n_symbols() {
                let i = k * spb - 1;
                prop_assert!((x.samples[i] / y.samples[i]).arg().abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn parseval_in_every_window(log_n in 2u32..6, seed in any::<u64>()) {
        let cfg = small_cfg(1 << log_n, 0, 4, 0.1, 8, seed);
        let link = Link64::new(cfg.clone()).unwrap();
        let frame = link.random_frame(4).unwrap();
        let sig = link.transmit_aggregate(&frame).unwrap();
        let chips = sample_chips(&sig, &cfg).unwrap();
        let bins = fft_window_demod(&chips, &cfg).unwrap();
        let n = cfg.n_subcarriers;
        let w = cfg.window_offset_chips;
        for k in 0..chips.n_symbols {
            let time: f64 = chips.symbol(k)[w..w + n].iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
            let freq: f64 = bins.iter().map(|row| row[k].norm_sqr()).sum();
            prop_assert!((time - freq).abs() <= 1e-10 * time);
        }
    }

    #[test]
    fn psd_integrates_to_one(
        seg_log in 6u32..10,
        overlap in 0.0f64..0.9,
        window in prop::sample::select(vec![Window::Rect, Window::Hann, Window::Hamming, Window::Blackman]),
        seed in any::<u64>(),
    ) {
        let cfg = small_cfg(8, 1, 4, 0.3, 4, seed);
        let link = Link64::new(cfg).unwrap();
        let frame = link.random_frame(12).unwrap();
        let sig = link.transmit_aggregate(&frame).unwrap();
        let psd = welch_psd(&sig, 1 << seg_log, overlap, window).unwrap();
        prop_assert!((psd.total_power() - 1.0).abs() <= 1e-6);
        prop_assert!(psd.freqs_hz.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn phase_steps_respect_pulse_bound() {
    // per-sample phase step never exceeds the largest increment times the
    // largest chip-spaced sum of the sampled pulse
    let cfg = small_cfg(16, 0, 4, 0.1, 8, 3);
    let link = Link64::new(cfg.clone()).unwrap();
    let frame = link.random_frame(30).unwrap();
    let tx = link.transmit(&frame).unwrap();
    let o = cfg.oversampling;
    let dt = link.pulse.sample_period_s();
    let partition = (0..o)
        .map(|r| link.pulse.g.iter().skip(r).step_by(o).sum::<f64>())
        .fold(0.0, f64::max);
    for (sig, plan) in tx.per_antenna.iter().zip(&link.plans) {
        let carrier = plan.carrier_increment(cfg.n_subcarriers);
        let max_theta = plan.shift_set.shifts.iter().map(|s| (carrier + s).abs()).fold(carrier.abs(), f64::max);
        let bound = max_theta * partition * dt * (1.0 + 1e-6);
        for w in sig.samples.windows(2) {
            let step = (w[1] / w[0]).arg();
            assert!(step.abs() <= bound, "{step} > {bound}");
        }
    }
}

#[test]
fn constant_data_gives_a_pure_tone() {
    // Rect pulse: exact at every sample; Gaussian pulse: exact at the chip rate
    for pulse in [PulseSpec::rect(), PulseSpec::gaussian(0.1, 8)] {
        let mut cfg = SystemConfig::new(8, 12, 4, 1e-7);
        cfg.pulse = pulse;
        let link = Link64::new(cfg.clone()).unwrap();
        let frame = SymbolFrame::new(vec![vec![2; 20]; 8], 4).unwrap();
        let tx = link.transmit(&frame).unwrap();
        let settle = pulse.truncation_chips * cfg.oversampling;
        let step = if pulse.truncation_chips == 1 { 1 } else { cfg.oversampling };
        for (sig, plan) in tx.per_antenna.iter().zip(&link.plans) {
            let expect = plan.carrier_increment(cfg.n_subcarriers) * step as f64 / cfg.oversampling as f64;
            let chips: Vec<_> = sig.samples[settle..].iter().step_by(step).collect();
            for w in chips.windows(2) {
                let d = wrap_phase((w[1] / w[0]).arg() - expect);
                assert!(d.abs() < 1e-12, "{d:e}");
            }
        }
    }
}

#[test]
fn rect_msk_ramp() {
    let mut cfg = SystemConfig::new(1, 1, 2, 1e-6);
    cfg.pulse = PulseSpec::rect();
    let pulse = matisk::make_pulse::<f64>(cfg.pulse, cfg.chip_period_s, 16).unwrap();
    let phase = matisk::modulator::synthesize_phase(&[PI, 0.0, 0.0], &pulse, 16).unwrap();
    for (i, p) in phase.iter().enumerate() {
        let expect = PI * i.min(16) as f64 / 16.0;
        assert!((wrap_phase(p - expect)).abs() < 1e-12);
    }
}
