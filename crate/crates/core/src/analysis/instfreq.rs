use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::IqSignal;

/// First-difference phase estimate, one value per adjacent sample pair (Hz).
pub fn instantaneous_frequency<T: Real>(signal: &IqSignal<T>) -> Result<Vec<f64>> {
    if let Some(i) = signal.samples.iter().position(|s| s.norm_sqr() == T::zero()) {
        return Err(Error::ZeroMagnitude(i));
    }
    let scale = signal.sample_rate_hz / std::f64::consts::TAU;
    Ok(signal
        .samples
        .windows(2)
        .map(|w| (w[1] * w[0].conj()).arg().as_f64() * scale)
        .collect())
}
