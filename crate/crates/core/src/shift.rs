//! Differential phase-shift sets.

use crate::error::{Error, Result};
use crate::scalar::{two_pi, Real};

/// The `M` phase shifts a subcarrier applies for differential symbols
/// `0..M`. Shift `m` is `2*pi*m/M`, lowered by `2*pi` when `omega[m-1]` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShiftSet<T> {
    pub omega: Vec<bool>,
    pub shifts: Vec<T>,
}

impl<T: Real> PhaseShiftSet<T> {
    pub fn order(&self) -> usize {
        self.shifts.len()
    }

    /// Shift applied for differential symbol `symbol`.
    #[inline]
    pub fn shift(&self, symbol: usize) -> T {
        self.shifts[symbol]
    }

    /// Set with every `omega` bit clear: `{0, 2pi/M, ..., 2pi(M-1)/M}`.
    pub fn base(m_order: usize) -> Result<Self> {
        shift_set(m_order, &vec![false; m_order.saturating_sub(1)])
    }

    pub fn omega_bits(&self) -> String {
        self.omega.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// Nominal shift for symbol `m` with the given `omega` bit.
#[inline]
pub fn candidate_shift<T: Real>(m: usize, m_order: usize, omega: bool) -> T {
    let nominal = two_pi::<T>() * T::of(m as f64) / T::of(m_order as f64);
    if omega {
        nominal - two_pi::<T>()
    } else {
        nominal
    }
}

pub fn shift_set<T: Real>(m_order: usize, omega: &[bool]) -> Result<PhaseShiftSet<T>> {
    if m_order < 2 {
        return Err(Error::InvalidConfig(format!("psk order must be >= 2, got {m_order}")));
    }
    if omega.len() != m_order - 1 {
        return Err(Error::OmegaLength {
            expected: m_order - 1,
            got: omega.len(),
        });
    }
    let shifts = std::iter::once(T::zero())
        .chain(
            omega
                .iter()
                .enumerate()
                .map(|(i, &w)| candidate_shift(i + 1, m_order, w)),
        )
        .collect();
    Ok(PhaseShiftSet {
        omega: omega.to_vec(),
        shifts,
    })
}
