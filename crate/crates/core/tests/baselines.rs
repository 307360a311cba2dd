use std::f64::consts::PI;

use matisk::analysis::{instantaneous_frequency, welch_psd, PsdEstimate, Window};
use matisk::baselines::{gmsk_shift, gmsk_waveform, rrc_psk_waveform, BaselineKind, BaselineSpec};
use matisk::SymbolFrame;

const TS: f64 = 1e-6;

fn random(n: usize, m: usize, seed: u64) -> Vec<u32> {
    SymbolFrame::random(1, n, m, seed).unwrap().symbols.remove(0)
}

fn psd(spec: &BaselineSpec, symbols: &[u32]) -> PsdEstimate {
    let sig = if spec.kind == BaselineKind::LinearPskRrc {
        rrc_psk_waveform::<f64>(spec, symbols).unwrap()
    } else {
        gmsk_waveform::<f64>(spec, symbols).unwrap()
    };
    welch_psd(&sig, 4096, 0.5, Window::Hann).unwrap()
}

#[test]
fn quaternary_set() {
    let mut set: Vec<f64> = (0..4).map(|s| gmsk_shift(BaselineKind::GmskQuaternary, s).unwrap()).collect();
    set.sort_by(f64::total_cmp);
    for (a, b) in set.iter().zip([-3.0 * PI / 4.0, -PI / 4.0, PI / 4.0, 3.0 * PI / 4.0]) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn binary_zeros_give_quarter_rate_tone() {
    let est = psd(&BaselineSpec::gmsk_binary(0.3, TS), &vec![0; 1000]);
    assert!((est.peak_freq_hz() - 0.25 / TS).abs() <= est.resolution_hz);
}

#[test]
fn gmsk_is_constant_envelope() {
    let syms = random(300, 4, 1);
    let bits: Vec<u32> = syms.iter().map(|s| s & 1).collect();
    for (spec, data) in [
        (BaselineSpec::gmsk_binary(0.3, TS), &bits),
        (BaselineSpec::gmsk_quaternary(0.3, TS), &syms),
        (BaselineSpec::gmsk_repetition(0.3, 8, 1.5 * PI, 4, TS), &syms),
    ] {
        let sig = gmsk_waveform::<f64>(&spec, data).unwrap();
        assert!(sig.max_envelope_error() <= 1e-12);
    }
}

#[test]
fn mirrored_repetition_spectra() {
    let syms = random(400, 4, 2);
    let mirrored: Vec<u32> = syms.iter().map(|s| (4 - s) % 4).collect();
    let up = psd(&BaselineSpec::gmsk_repetition(0.3, 32, 1.5 * PI, 4, TS), &syms);
    let down = psd(&BaselineSpec::gmsk_repetition(0.3, 32, -1.5 * PI, 4, TS), &mirrored);
    let n = up.psd.len();
    // bin i sits at (i - n/2) * df, so its mirror is bin n - i
    for i in 1..n {
        let (a, b) = (up.psd[i], down.psd[n - i]);
        assert!((a - b).abs() <= 1e-9 * up.psd.iter().copied().fold(0.0, f64::max), "bin {i}");
    }
    assert!(up.peak_freq_hz() > 0.0 && down.peak_freq_hz() < 0.0);
}

#[test]
fn largest_repeated_shift_has_highest_frequency() {
    let syms = random(40, 4, 3);
    let plateau = |r: f64| {
        let spec = BaselineSpec::gmsk_repetition(0.3, 32, r, 4, TS);
        let f = instantaneous_frequency(&gmsk_waveform::<f64>(&spec, &syms).unwrap()).unwrap();
        // one chip in the middle of the tenth symbol, far from either transition
        let start = (9 * 32 + 16) * spec.oversampling;
        f[start..start + spec.oversampling].iter().sum::<f64>() / spec.oversampling as f64
    };
    let freqs: Vec<f64> = [-1.5 * PI, -0.5 * PI, 0.5 * PI, 1.5 * PI].iter().map(|&r| plateau(r)).collect();
    assert!(freqs.windows(2).all(|w| w[1] > w[0]), "{freqs:?}");
    let chip = TS / 32.0;
    assert!((freqs[3] - 0.75 / chip).abs() < 1e-9 / chip);
}

#[test]
fn rrc_occupies_roughly_one_plus_rolloff() {
    let est = psd(&BaselineSpec::rrc_psk(0.22, 4, TS), &random(4000, 4, 4));
    let edge = 1.22 / (2.0 * TS);
    let inside = est.band_power(-edge, edge);
    let core = est.band_power(-0.78 / (2.0 * TS), 0.78 / (2.0 * TS));
    assert!(inside > 0.995, "{inside}");
    assert!(core < 0.97, "{core}");
}

#[test]
fn rrc_has_envelope_peaks() {
    let spec = BaselineSpec::rrc_psk(0.22, 4, TS);
    let sig = rrc_psk_waveform::<f64>(&spec, &random(4000, 4, 5)).unwrap();
    let trimmed = sig.slice(spec.span * spec.oversampling, sig.len() - 2 * spec.span * spec.oversampling).unwrap();
    assert!(trimmed.papr_db() > 2.0, "{}", trimmed.papr_db());
}
