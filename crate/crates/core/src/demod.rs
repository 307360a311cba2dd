//! Windowed-FFT demodulation, differential decisions and interference metrics.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::modulator::{differential_precode, SymbolFrame};
use crate::scalar::{db, two_pi, Real};
use crate::signal::IqSignal;

/// SIR reported when the measured interference is exactly zero.
pub const SIR_CAP_DB: f64 = 200.0;

/// Below this bin magnitude a reference is unusable for differential decoding.
pub const ERASURE_THRESHOLD: f64 = 1e-12;

/// One complex sample per chip, stored symbol-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipMatrix<T> {
    pub chips: Vec<Complex<T>>,
    pub chips_per_symbol: usize,
    pub n_symbols: usize,
}

impl<T: Real> ChipMatrix<T> {
    /// `(chips per symbol, symbols)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.chips_per_symbol, self.n_symbols)
    }

    pub fn get(&self, chip: usize, symbol: usize) -> Complex<T> {
        self.chips[symbol * self.chips_per_symbol + chip]
    }

    pub fn symbol(&self, symbol: usize) -> &[Complex<T>] {
        let start = symbol * self.chips_per_symbol;
        &self.chips[start..start + self.chips_per_symbol]
    }
}

/// Takes sample `chip_sample_offset` of every chip.
pub fn sample_chips<T: Real>(signal: &IqSignal<T>, cfg: &SystemConfig) -> Result<ChipMatrix<T>> {
    let per_symbol = cfg.samples_per_symbol();
    if !signal.len().is_multiple_of(per_symbol) {
        return Err(Error::Length {
            len: signal.len(),
            unit: per_symbol,
        });
    }
    let chips = signal
        .samples
        .iter()
        .skip(cfg.chip_sample_offset)
        .step_by(cfg.oversampling)
        .copied()
        .collect();
    Ok(ChipMatrix {
        chips,
        chips_per_symbol: cfg.repetition,
        n_symbols: signal.len() / per_symbol,
    })
}

/// Per-subcarrier FFT outputs, `bins[n][k]`.
pub type BinMatrix<T> = Vec<Vec<Complex<T>>>;

/// N-point DFT over chips `[W, W + N)` of every symbol.
///
/// Subcarrier `n` is read from bin `(n - N/2) mod N` and scaled by `1/N`.
/// Each value is also derotated by the carrier phase `2*pi*(n - N/2)*c0/N`
/// accumulated up to the window's first chip `c0 = k*T + W`, so a subcarrier
/// that repeats its symbol yields the same bin value in every symbol.
pub fn fft_window_demod<T: Real>(chips: &ChipMatrix<T>, cfg: &SystemConfig) -> Result<BinMatrix<T>> {
    let n = cfg.n_subcarriers;
    let w = cfg.window_offset_chips;
    if w + n > chips.chips_per_symbol {
        return Err(Error::InvalidConfig(format!(
            "FFT window [{w}, {}) does not fit in {} chips",
            w + n,
            chips.chips_per_symbol
        )));
    }
    let fft = FftPlanner::<T>::new().plan_fft_forward(n);
    let scale = T::one() / T::of(n as f64);
    let mut bins = vec![Vec::with_capacity(chips.n_symbols); n];
    let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
    for k in 0..chips.n_symbols {
        buf.copy_from_slice(&chips.symbol(k)[w..w + n]);
        fft.process(&mut buf);
        let c0 = (k * chips.chips_per_symbol + w) as i64;
        for (idx, row) in bins.iter_mut().enumerate() {
            let pos = cfg.grid_position(idx);
            let bin = pos.rem_euclid(n as i64) as usize;
            // carrier phase modulo one turn, reduced in integers
            let turns = (pos * c0).rem_euclid(n as i64);
            let rot = Complex::from_polar(T::one(), -two_pi::<T>() * T::of(turns as f64) / T::of(n as f64));
            row.push(buf[bin] * scale * rot);
        }
    }
    Ok(bins)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DifferentialDecisions<T> {
    /// Differential symbol decisions for symbols `1..K`.
    pub decisions: Vec<Vec<u32>>,
    /// `bins[k] * conj(bins[k-1]) / |bins[k-1]|^2` for symbols `1..K`.
    pub soft: Vec<Vec<Complex<T>>>,
    /// `(subcarrier, symbol)` pairs whose reference bin vanished.
    pub erasures: Vec<(usize, usize)>,
}

/// Nearest point of the base M-PSK grid to `z`.
pub fn psk_decision<T: Real>(z: Complex<T>, m_order: usize) -> u32 {
    let turns = z.arg().as_f64() / (2.0 * std::f64::consts::PI) * m_order as f64;
    (turns.round() as i64).rem_euclid(m_order as i64) as u32
}

pub fn differential_decode<T: Real>(bins: &BinMatrix<T>, m_order: usize) -> Result<DifferentialDecisions<T>> {
    if bins.first().map_or(0, Vec::len) < 2 {
        return Err(Error::Dimension("differential decoding needs at least two symbols".into()));
    }
    let mut decisions = Vec::with_capacity(bins.len());
    let mut soft = Vec::with_capacity(bins.len());
    let mut erasures = Vec::new();
    for (n, row) in bins.iter().enumerate() {
        let mut d_row = Vec::with_capacity(row.len() - 1);
        let mut s_row = Vec::with_capacity(row.len() - 1);
        for (k, pair) in row.windows(2).enumerate() {
            let reference = pair[0].norm_sqr();
            if reference.as_f64().sqrt() < ERASURE_THRESHOLD {
                erasures.push((n, k + 1));
                d_row.push(0);
                s_row.push(Complex::new(T::zero(), T::zero()));
                continue;
            }
            let z = pair[1] * pair[0].conj() / reference;
            d_row.push(psk_decision(z, m_order));
            s_row.push(z);
        }
        decisions.push(d_row);
        soft.push(s_row);
    }
    Ok(DifferentialDecisions {
        decisions,
        soft,
        erasures,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SirMeasurement {
    /// Mean signal power over mean interference power, in dB.
    pub sir_db: f64,
    pub per_subcarrier_sir_db: Vec<f64>,
    /// Mean of the per-subcarrier linear ratios, in dB.
    pub mean_of_ratios_db: f64,
}

fn capped_db(signal: f64, interference: f64) -> f64 {
    if interference <= 0.0 {
        SIR_CAP_DB
    } else {
        db(signal / interference).min(SIR_CAP_DB)
    }
}

/// Fits one complex gain per subcarrier and counts what the fit leaves over
/// as interference.
pub fn measure_sir<T: Real>(observed: &[Vec<Complex<T>>], ideal: &[Vec<Complex<T>>]) -> Result<SirMeasurement> {
    if observed.len() != ideal.len()
        || observed.is_empty()
        || observed.iter().zip(ideal).any(|(a, b)| a.len() != b.len() || a.is_empty())
    {
        return Err(Error::Dimension("observed and ideal values differ in shape".into()));
    }
    let mut signal = Vec::with_capacity(observed.len());
    let mut error = Vec::with_capacity(observed.len());
    for (obs, ide) in observed.iter().zip(ideal) {
        let to64 = |z: &Complex<T>| Complex::new(z.re.as_f64(), z.im.as_f64());
        let (cross, energy) = obs.iter().zip(ide).fold(
            (Complex::new(0.0, 0.0), 0.0),
            |(c, e), (o, i)| (c + to64(o) * to64(i).conj(), e + to64(i).norm_sqr()),
        );
        let gain = cross / energy;
        let err: f64 = obs
            .iter()
            .zip(ide)
            .map(|(o, i)| (to64(o) - gain * to64(i)).norm_sqr())
            .sum();
        signal.push(gain.norm_sqr() * energy);
        error.push(err);
    }
    let per_subcarrier_sir_db: Vec<f64> = signal.iter().zip(&error).map(|(&s, &e)| capped_db(s, e)).collect();
    let count = signal.len() as f64;
    let sir_db = capped_db(signal.iter().sum::<f64>() / count, error.iter().sum::<f64>() / count);
    let mean_ratio = per_subcarrier_sir_db.iter().map(|d| 10f64.powf(d / 10.0)).sum::<f64>() / count;
    Ok(SirMeasurement {
        sir_db,
        per_subcarrier_sir_db,
        mean_of_ratios_db: db(mean_ratio).min(SIR_CAP_DB),
    })
}

/// `10*log10` of the number of coherently combined chips.
pub fn combining_gain(cfg: &SystemConfig) -> f64 {
    db(cfg.n_subcarriers as f64)
}

/// Demodulation outcome against a known transmitted frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DemodReport<T> {
    /// Recovered symbols; column 0 is the known reference.
    pub decisions: Vec<Vec<u32>>,
    /// Differential products for symbols `1..K`.
    pub soft_values: Vec<Vec<Complex<T>>>,
    pub bins: BinMatrix<T>,
    /// SIR of the FFT outputs against the transmitted constellation points.
    pub sir_db: f64,
    pub per_subcarrier_sir_db: Vec<f64>,
    pub mean_of_ratios_sir_db: f64,
    /// SIR of the differential products against the transmitted phase shifts.
    pub differential_sir_db: f64,
    pub differential_per_subcarrier_sir_db: Vec<f64>,
    /// Wrong differential decisions.
    pub symbol_errors: usize,
    pub erasures: usize,
    pub combining_gain_db: f64,
}

impl<T: Real> DemodReport<T> {
    pub fn decided_symbols(&self) -> usize {
        self.soft_values.iter().map(Vec::len).sum()
    }
}

fn constellation<T: Real>(symbol: u32, m_order: usize) -> Complex<T> {
    Complex::from_polar(T::one(), two_pi::<T>() * T::of(symbol as f64) / T::of(m_order as f64))
}

/// Full receive chain for a noiseless run with known transmitted data.
pub fn demodulate<T: Real>(signal: &IqSignal<T>, cfg: &SystemConfig, sent: &SymbolFrame) -> Result<DemodReport<T>> {
    cfg.validate()?;
    let chips = sample_chips(signal, cfg)?;
    if chips.n_symbols != sent.n_symbols() || sent.n_subcarriers() != cfg.n_subcarriers {
        return Err(Error::Dimension(format!(
            "signal carries {} symbols on {} subcarriers, frame has {} x {}",
            chips.n_symbols,
            cfg.n_subcarriers,
            sent.n_subcarriers(),
            sent.n_symbols()
        )));
    }
    let m = cfg.psk_order;
    let bins = fft_window_demod(&chips, cfg)?;
    let diff = differential_decode(&bins, m)?;

    let sent_diff: Vec<Vec<u32>> = sent.symbols.iter().map(|row| differential_precode(row, m)).collect();
    let symbol_errors = diff
        .decisions
        .iter()
        .zip(&sent_diff)
        .map(|(dec, tx)| dec.iter().zip(&tx[1..]).filter(|(a, b)| a != b).count())
        .sum();

    let decisions = diff
        .decisions
        .iter()
        .zip(&sent.symbols)
        .map(|(dec, tx)| {
            let mut acc = tx[0];
            std::iter::once(acc)
                .chain(dec.iter().map(|&d| {
                    acc = (acc + d) % m as u32;
                    acc
                }))
                .collect()
        })
        .collect();

    let ideal_abs: Vec<Vec<Complex<T>>> = sent
        .symbols
        .iter()
        .map(|row| row.iter().map(|&s| constellation(s, m)).collect())
        .collect();
    let ideal_diff: Vec<Vec<Complex<T>>> = sent_diff
        .iter()
        .map(|row| row[1..].iter().map(|&s| constellation(s, m)).collect())
        .collect();
    let coherent = measure_sir(&bins, &ideal_abs)?;
    let differential = measure_sir(&diff.soft, &ideal_diff)?;

    Ok(DemodReport {
        decisions,
        soft_values: diff.soft,
        bins,
        sir_db: coherent.sir_db,
        per_subcarrier_sir_db: coherent.per_subcarrier_sir_db,
        mean_of_ratios_sir_db: coherent.mean_of_ratios_db,
        differential_sir_db: differential.sir_db,
        differential_per_subcarrier_sir_db: differential.per_subcarrier_sir_db,
        symbol_errors,
        erasures: diff.erasures.len(),
        combining_gain_db: combining_gain(cfg),
    })
}
