//! On-disk run configuration (TOML).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use matisk::analysis::Window;
use matisk::{PulseSpec, SystemConfig};
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSection,
    #[serde(default)]
    pub pulse: PulseSection,
    #[serde(default)]
    pub frame: FrameSection,
    #[serde(default)]
    pub psd: PsdSection,
    pub mask: Option<MaskSection>,
    /// Directory of the file the configuration came from; relative paths
    /// inside it resolve against this.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub n_subcarriers: usize,
    pub repetition: usize,
    pub psk_order: usize,
    pub symbol_rate_hz: f64,
    #[serde(default = "default_oversampling")]
    pub oversampling: usize,
    /// Defaults to `repetition - n_subcarriers`.
    pub window_offset_chips: Option<usize>,
    #[serde(default)]
    pub chip_sample_offset: usize,
}

fn default_oversampling() -> usize {
    16
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeName {
    Gaussian,
    Rect,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseSection {
    pub shape: ShapeName,
    pub bt: f64,
    pub truncation_chips: usize,
}

impl Default for PulseSection {
    fn default() -> Self {
        Self {
            shape: ShapeName::Gaussian,
            bt: 0.1,
            truncation_chips: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameSection {
    /// Symbols per subcarrier, reference symbol included.
    pub symbols: usize,
    pub seed: u64,
}

impl Default for FrameSection {
    fn default() -> Self {
        Self { symbols: 200, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum WindowName {
    Rect,
    Hann,
    Hamming,
    Blackman,
}

impl From<WindowName> for Window {
    fn from(w: WindowName) -> Self {
        match w {
            WindowName::Rect => Window::Rect,
            WindowName::Hann => Window::Hann,
            WindowName::Hamming => Window::Hamming,
            WindowName::Blackman => Window::Blackman,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsdSection {
    /// Welch segment length in symbol durations.
    pub segment_symbols: usize,
    pub overlap: f64,
    pub window: WindowName,
}

impl Default for PsdSection {
    fn default() -> Self {
        Self {
            segment_symbols: 8,
            overlap: 0.5,
            window: WindowName::Hann,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskSection {
    pub path: PathBuf,
    /// Reference bandwidth for the in-band density; defaults to `N * spacing`.
    pub inband_hz: Option<f64>,
}

impl RunConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = toml::from_str(text).context("invalid configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Self::parse(&text).with_context(|| format!("in {}", path.display()))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if !(self.system.symbol_rate_hz > 0.0 && self.system.symbol_rate_hz.is_finite()) {
            bail!("system.symbol_rate_hz must be positive");
        }
        if self.frame.symbols < 2 {
            bail!("frame.symbols must be at least 2 (reference plus data)");
        }
        if self.psd.segment_symbols == 0 {
            bail!("psd.segment_symbols must be positive");
        }
        if !(0.0..1.0).contains(&self.psd.overlap) {
            bail!("psd.overlap must lie in [0, 1)");
        }
        if let Some(m) = &self.mask {
            if m.inband_hz.is_some_and(|b| !(b > 0.0)) {
                bail!("mask.inband_hz must be positive");
            }
        }
        self.system_config().validate()?;
        Ok(())
    }

    pub fn pulse_spec(&self) -> PulseSpec {
        match self.pulse.shape {
            ShapeName::Gaussian => PulseSpec::gaussian(self.pulse.bt, self.pulse.truncation_chips),
            ShapeName::Rect => PulseSpec {
                truncation_chips: self.pulse.truncation_chips,
                ..PulseSpec::rect()
            },
        }
    }

    pub fn system_config(&self) -> SystemConfig {
        let s = &self.system;
        let chip_period = 1.0 / (s.symbol_rate_hz * s.repetition as f64);
        let mut cfg = SystemConfig::new(s.n_subcarriers, s.repetition, s.psk_order, chip_period);
        cfg.oversampling = s.oversampling;
        cfg.pulse = self.pulse_spec();
        cfg.chip_sample_offset = s.chip_sample_offset;
        if let Some(w) = s.window_offset_chips {
            cfg.window_offset_chips = w;
        }
        cfg.seed = self.frame.seed;
        cfg
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        if let Some(seed) = seed {
            self.frame.seed = seed;
        }
        self
    }

    pub fn mask_path(&self) -> Option<PathBuf> {
        self.mask.as_ref().map(|m| self.base_dir.join(&m.path))
    }

    pub fn segment_len(&self) -> usize {
        self.psd.segment_symbols * self.system_config().samples_per_symbol()
    }
}
