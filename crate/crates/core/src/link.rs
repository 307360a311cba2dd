//! End-to-end transmitter/receiver setup for one configuration.

use crate::config::SystemConfig;
use crate::demod::{demodulate, DemodReport};
use crate::error::Result;
use crate::inband::{choose_omega, OmegaAssignment};
use crate::modulator::{modulate_aggregate, modulate_frame, plan_subcarriers, Modulated, SubcarrierPlan, SymbolFrame};
use crate::pulse::{make_pulse, FrequencyPulse};
use crate::scalar::Real;
use crate::signal::IqSignal;

/// Pulse, `omega` assignment and subcarrier plans derived from a configuration.
#[derive(Debug, Clone)]
pub struct Link<T> {
    pub cfg: SystemConfig,
    pub pulse: FrequencyPulse<T>,
    pub omega: OmegaAssignment<T>,
    pub plans: Vec<SubcarrierPlan<T>>,
}

impl<T: Real> Link<T> {
    pub fn new(cfg: SystemConfig) -> Result<Self> {
        cfg.validate()?;
        let pulse = make_pulse(cfg.pulse, cfg.chip_period_s, cfg.oversampling)?;
        let omega = choose_omega(&cfg, &pulse)?;
        let plans = plan_subcarriers(&cfg, omega.shift_sets.clone())?;
        Ok(Self {
            cfg,
            pulse,
            omega,
            plans,
        })
    }

    /// Random frame of `n_symbols` (reference included) from the configured seed.
    pub fn random_frame(&self, n_symbols: usize) -> Result<SymbolFrame> {
        SymbolFrame::random(self.cfg.n_subcarriers, n_symbols, self.cfg.psk_order, self.cfg.seed)
    }

    pub fn transmit(&self, frame: &SymbolFrame) -> Result<Modulated<T>> {
        modulate_frame(frame, &self.plans, &self.pulse, &self.cfg)
    }

    pub fn transmit_aggregate(&self, frame: &SymbolFrame) -> Result<IqSignal<T>> {
        modulate_aggregate(frame, &self.plans, &self.pulse, &self.cfg)
    }

    pub fn receive(&self, signal: &IqSignal<T>, sent: &SymbolFrame) -> Result<DemodReport<T>> {
        demodulate(signal, &self.cfg, sent)
    }

    /// Noiseless transmit/receive run over a random frame.
    pub fn loopback(&self, n_symbols: usize) -> Result<DemodReport<T>> {
        let frame = self.random_frame(n_symbols)?;
        let signal = self.transmit_aggregate(&frame)?;
        self.receive(&signal, &frame)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub repetition: usize,
    pub sir_db: f64,
    pub differential_sir_db: f64,
    pub symbol_errors: usize,
}

/// Noiseless loopback for every repetition factor in `repetitions`.
pub fn sir_sweep<T: Real>(
    cfg: &SystemConfig,
    repetitions: impl IntoIterator<Item = usize>,
    n_symbols: usize,
) -> Result<Vec<SweepPoint>> {
    repetitions
        .into_iter()
        .map(|t| {
            let report = Link::<T>::new(cfg.with_repetition(t))?.loopback(n_symbols)?;
            Ok(SweepPoint {
                repetition: t,
                sir_db: report.sir_db,
                differential_sir_db: report.differential_sir_db,
                symbol_errors: report.symbol_errors,
            })
        })
        .collect()
}
