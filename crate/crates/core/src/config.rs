//! System and pulse parameters.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseShape {
    /// Rectangular frequency pulse filtered by a Gaussian (the GMSK pulse).
    GaussianFilteredRect,
    /// One-chip rectangular frequency pulse (plain CPFSK / MSK).
    Rect,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub shape: PulseShape,
    /// 3-dB bandwidth of the Gaussian times the chip period.
    pub bt_product: f64,
    /// Total pulse support in chip periods.
    pub truncation_chips: usize,
}

impl PulseSpec {
    pub fn gaussian(bt_product: f64, truncation_chips: usize) -> Self {
        Self {
            shape: PulseShape::GaussianFilteredRect,
            bt_product,
            truncation_chips,
        }
    }

    pub fn rect() -> Self {
        Self {
            shape: PulseShape::Rect,
            bt_product: 0.0,
            truncation_chips: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.truncation_chips == 0 {
            return Err(Error::InvalidPulse("truncation_chips must be >= 1".into()));
        }
        match self.shape {
            PulseShape::GaussianFilteredRect => {
                if !(self.bt_product > 0.0) || !self.bt_product.is_finite() {
                    return Err(Error::InvalidPulse(format!(
                        "bt_product must be positive, got {}",
                        self.bt_product
                    )));
                }
            }
            PulseShape::Rect => {
                if self.truncation_chips != 1 {
                    return Err(Error::InvalidPulse(format!(
                        "rectangular pulse spans exactly one chip, got {}",
                        self.truncation_chips
                    )));
                }
            }
        }
        Ok(())
    }
}

impl Default for PulseSpec {
    /// BT = 0.1 truncated to 8 chips.
    fn default() -> Self {
        Self::gaussian(0.1, 8)
    }
}

/// All parameters of one multi-carrier CPFSK link.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Number of subcarriers, one per transmit antenna.
    pub n_subcarriers: usize,
    /// Chips per data symbol; the repetition code has rate `1 / repetition`.
    pub repetition: usize,
    /// PSK order, a power of two.
    pub psk_order: usize,
    pub chip_period_s: f64,
    /// Samples per chip.
    pub oversampling: usize,
    pub pulse: PulseSpec,
    /// First chip of the FFT window within each symbol.
    pub window_offset_chips: usize,
    /// Sample index within a chip at which the receiver takes its chip sample.
    pub chip_sample_offset: usize,
    pub seed: u64,
}

impl SystemConfig {
    /// Configuration with default pulse and oversampling and the FFT window
    /// pushed to the end of the symbol.
    pub fn new(n_subcarriers: usize, repetition: usize, psk_order: usize, chip_period_s: f64) -> Self {
        Self {
            n_subcarriers,
            repetition,
            psk_order,
            chip_period_s,
            oversampling: 16,
            pulse: PulseSpec::default(),
            window_offset_chips: repetition.saturating_sub(n_subcarriers),
            chip_sample_offset: 0,
            seed: 0,
        }
    }

    /// 64 antennas, QPSK at 1.25 Msym/s per subcarrier, 70 chips per symbol.
    pub fn nr_100mhz_example() -> Self {
        let repetition = 70;
        Self::new(64, repetition, 4, 1.0 / (1.25e6 * repetition as f64))
    }

    /// Same link with a different repetition factor; symbol rate stays fixed
    /// and the FFT window moves to the end of the new symbol.
    pub fn with_repetition(&self, repetition: usize) -> Self {
        let symbol_period = self.symbol_period_s();
        Self {
            repetition,
            chip_period_s: symbol_period / repetition as f64,
            window_offset_chips: repetition.saturating_sub(self.n_subcarriers),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_subcarriers == 0 {
            return fail("n_subcarriers must be positive".into());
        }
        if self.repetition < self.n_subcarriers {
            return fail(format!(
                "repetition {} is smaller than n_subcarriers {}; the FFT window cannot fit",
                self.repetition, self.n_subcarriers
            ));
        }
        if self.psk_order < 2 || !self.psk_order.is_power_of_two() {
            return fail(format!("psk_order must be a power of two >= 2, got {}", self.psk_order));
        }
        if !(self.chip_period_s > 0.0) || !self.chip_period_s.is_finite() {
            return fail(format!("chip_period_s must be positive, got {}", self.chip_period_s));
        }
        if self.oversampling < 4 {
            return fail(format!("oversampling must be >= 4, got {}", self.oversampling));
        }
        if self.window_offset_chips > self.repetition - self.n_subcarriers {
            return fail(format!(
                "window_offset_chips {} exceeds repetition - n_subcarriers = {}",
                self.window_offset_chips,
                self.repetition - self.n_subcarriers
            ));
        }
        if self.chip_sample_offset >= self.oversampling {
            return fail(format!(
                "chip_sample_offset {} must be below oversampling {}",
                self.chip_sample_offset, self.oversampling
            ));
        }
        self.pulse.validate()
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.oversampling as f64 / self.chip_period_s
    }

    pub fn subcarrier_spacing_hz(&self) -> f64 {
        1.0 / (self.n_subcarriers as f64 * self.chip_period_s)
    }

    pub fn symbol_period_s(&self) -> f64 {
        self.repetition as f64 * self.chip_period_s
    }

    pub fn samples_per_symbol(&self) -> usize {
        self.repetition * self.oversampling
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.psk_order.trailing_zeros()
    }

    /// Signed grid position `n - floor(N/2)` of subcarrier `n`.
    pub fn grid_position(&self, n: usize) -> i64 {
        n as i64 - (self.n_subcarriers / 2) as i64
    }

    pub fn subcarrier_freq_hz(&self, n: usize) -> f64 {
        self.grid_position(n) as f64 * self.subcarrier_spacing_hz()
    }

    pub fn derived(&self) -> DerivedParams {
        DerivedParams {
            chip_period_s: self.chip_period_s,
            symbol_period_s: self.symbol_period_s(),
            subcarrier_spacing_hz: self.subcarrier_spacing_hz(),
            pulse_duration_s: self.pulse.truncation_chips as f64 * self.chip_period_s,
            data_rate_bps: self.n_subcarriers as f64 * self.bits_per_symbol() as f64
                / self.symbol_period_s(),
            occupied_bandwidth_hz: self.n_subcarriers as f64 * self.subcarrier_spacing_hz(),
            sample_rate_hz: self.sample_rate_hz(),
        }
    }
}

/// Physical quantities that follow from a [`SystemConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub chip_period_s: f64,
    pub symbol_period_s: f64,
    pub subcarrier_spacing_hz: f64,
    pub pulse_duration_s: f64,
    pub data_rate_bps: f64,
    pub occupied_bandwidth_hz: f64,
    pub sample_rate_hz: f64,
}

impl std::fmt::Display for DerivedParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "chip period: {:.2} ns", self.chip_period_s * 1e9)?;
        writeln!(f, "symbol period: {:.0} ns", self.symbol_period_s * 1e9)?;
        writeln!(f, "subcarrier spacing: {:.2} MHz", self.subcarrier_spacing_hz * 1e-6)?;
        writeln!(f, "pulse duration: {:.1} ns", self.pulse_duration_s * 1e9)?;
        writeln!(f, "occupied bandwidth: {:.1} MHz", self.occupied_bandwidth_hz * 1e-6)?;
        writeln!(f, "sample rate: {:.1} MHz", self.sample_rate_hz * 1e-6)?;
        write!(f, "total data rate: {:.0} Mbit/s", self.data_rate_bps * 1e-6)
    }
}
