use matisk::inband::peak_instantaneous_freq;
use matisk::{Link64, PulseSpec, SystemConfig};

fn link(n: usize, m: usize) -> Link64 {
    let mut cfg = SystemConfig::new(n, n + 8, m, 800e-9 / 70.0);
    cfg.pulse = PulseSpec::gaussian(0.1, 8);
    Link64::new(cfg).unwrap()
}

#[test]
fn edges_point_inward() {
    let l = link(64, 4);
    assert_eq!(l.omega.omegas[0], vec![false; 3]);
    assert_eq!(l.omega.omegas[63], vec![true; 3]);
    // band center: pi ties with -pi and takes the negative shift
    assert_eq!(l.omega.shift_sets[32].omega_bits(), "011");
}

#[test]
fn mirrored_deviations() {
    let l = link(64, 4);
    let df = l.cfg.subcarrier_spacing_hz();
    for n in 1..32 {
        let f = n as f64 * df;
        for s in &l.omega.shift_sets[32 + n].shifts {
            let up = peak_instantaneous_freq(f, *s, &l.pulse).unwrap();
            let down = peak_instantaneous_freq(-f, -*s, &l.pulse).unwrap();
            assert!((up + down).abs() <= 1e-9 * up.abs().max(1.0), "n={n} s={s}: {up} {down}");
        }
        // away from ties the mirrored subcarrier uses the complementary bits
        let right = &l.omega.omegas[32 + n];
        let left = &l.omega.omegas[32 - n];
        let mirrored = |m: usize| left[m] == !right[l.cfg.psk_order - 2 - m];
        assert!((0..3).all(mirrored), "n={n}: {left:?} {right:?}");
    }
}

#[test]
fn monotone_handoff() {
    for (n, m) in [(64, 4), (32, 8), (16, 2)] {
        let l = link(n, m);
        for bit in 0..m - 1 {
            let column: Vec<bool> = l.omega.omegas.iter().map(|w| w[bit]).collect();
            let flips = column.windows(2).filter(|w| w[0] != w[1]).count();
            assert_eq!(flips, 1, "N={n} M={m} bit {bit}: {column:?}");
            assert!(!column[0] && column[n - 1]);
        }
    }
}

#[test]
fn excursions_stay_in_band() {
    let l = link(64, 4);
    let edge = l.omega.peak_deviation_hz[0].max(l.omega.peak_deviation_hz[63]);
    assert!(l.omega.peak_deviation_hz.iter().all(|&d| d <= edge * (1.0 + 1e-12)));
    let f_max = l.cfg.subcarrier_freq_hz(0).abs();
    assert!(l.omega.residual_hz < 0.01 * f_max);
}
