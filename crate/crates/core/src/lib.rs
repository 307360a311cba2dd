//! Waveform-level modem for multi-carrier, repetition-coded, differentially
//! precoded continuous-phase FSK.
//!
//! Every subcarrier is sent from its own antenna as a constant-envelope CPFSK
//! signal. Data symbols are repeated over `T` chips, so between phase
//! transitions each antenna emits a pure tone on an FFT grid and the receiver
//! separates the subcarriers with an `N`-point FFT over the last `N` chips of
//! each symbol. Per-subcarrier phase-shift sets steer every transient
//! frequency excursion toward the band center.
//!
//! Numeric kernels are generic over [`Real`] (`f32` or `f64`); the `*64` and
//! `*32` aliases below name the common instantiations.

pub mod analysis;
pub mod baselines;
pub mod config;
pub mod demod;
pub mod error;
pub mod inband;
pub mod link;
pub mod modulator;
pub mod pulse;
pub mod scalar;
pub mod shift;
pub mod signal;

pub use config::{DerivedParams, PulseShape, PulseSpec, SystemConfig};
pub use demod::{combining_gain, DemodReport};
pub use error::{Error, Result};
pub use inband::OmegaAssignment;
pub use link::{sir_sweep, Link, SweepPoint};
pub use modulator::{SubcarrierPlan, SymbolFrame};
pub use pulse::{make_pulse, FrequencyPulse};
pub use scalar::Real;
pub use shift::{shift_set, PhaseShiftSet};
pub use signal::IqSignal;

pub type IqSignal64 = IqSignal<f64>;
pub type IqSignal32 = IqSignal<f32>;
pub type FrequencyPulse64 = FrequencyPulse<f64>;
pub type FrequencyPulse32 = FrequencyPulse<f32>;
pub type PhaseShiftSet64 = PhaseShiftSet<f64>;
pub type Link64 = Link<f64>;
pub type Link32 = Link<f32>;
pub type DemodReport64 = DemodReport<f64>;
