//! Impairment-aware link quality under maximum-ratio transmission.
//!
//! With `ρ = ρ_b(1 + ρ_u)` and effective noise `σ² = σ_u²/p_b`, the objective
//! is `q1(x) = Σ_m A_m²/(ρ·A_m² + σ²)` where `A_m = |h_{d,m} + v_mᵀx|`, the
//! SNR is `q1/(1 + ρ_u·q1)` and the spectral efficiency is `log2(1 + SNR)`.
//! The transceiver distortion powers never appear explicitly; they are folded
//! into `ρ` and the `ρ_u` saturation term.

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::{check_len, Error, Result};
use crate::scalar::{lit, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpairmentParams<T> {
    pub rho_b: T,
    pub rho_u: T,
    /// `σ_u² / p_b`.
    pub sigma2: T,
}

impl<T: Real> ImpairmentParams<T> {
    pub fn new(rho_b: T, rho_u: T, sigma2: T) -> Result<Self> {
        let p = Self {
            rho_b,
            rho_u,
            sigma2,
        };
        p.validate()?;
        Ok(p)
    }

    /// `σ² = 10^(−snr_db/10)` with unit large-scale gains.
    pub fn from_snr_db(rho_b: T, rho_u: T, snr_db: T) -> Result<Self> {
        Self::new(rho_b, rho_u, lit::<T>(10.0).powf(-snr_db / lit(10.0)))
    }

    pub fn ideal(sigma2: T) -> Self {
        Self {
            rho_b: T::zero(),
            rho_u: T::zero(),
            sigma2,
        }
    }

    /// `ρ_b·(1 + ρ_u)`.
    pub fn rho(&self) -> T {
        self.rho_b * (T::one() + self.rho_u)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho_b >= T::zero()) || !self.rho_b.is_finite() {
            return Err(Error::validation("impairments.rho_b", "must be finite and nonnegative"));
        }
        if !(self.rho_u >= T::zero()) || !self.rho_u.is_finite() {
            return Err(Error::validation("impairments.rho_u", "must be finite and nonnegative"));
        }
        if !(self.sigma2 > T::zero()) || !self.sigma2.is_finite() {
            return Err(Error::validation("impairments.sigma2", "must be finite and positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveBreakdown<T: Real> {
    pub amplitudes: Array1<T>,
    pub q1: T,
    pub spectral_efficiency: T,
}

/// `A_m = |h_{d,m} + v_mᵀx|` for every antenna.
pub fn amplitudes<T: Real>(real: &ChannelRealization<T>, x: &Array1<Cx<T>>) -> Result<Array1<T>> {
    check_len("amplitudes x", real.n(), x.len())?;
    Ok(real.composite_channel(x)?.mapv(|z| z.norm()))
}

pub fn q1_from_amplitudes<T: Real>(amps: &Array1<T>, imp: &ImpairmentParams<T>) -> T {
    let rho = imp.rho();
    amps.iter()
        .map(|&a| {
            let a2 = a * a;
            a2 / (rho * a2 + imp.sigma2)
        })
        .sum()
}

pub fn snr_from_q1<T: Real>(q1: T, imp: &ImpairmentParams<T>) -> T {
    q1 / (T::one() + imp.rho_u * q1)
}

pub fn se_from_q1<T: Real>(q1: T, imp: &ImpairmentParams<T>) -> T {
    (T::one() + snr_from_q1(q1, imp)).log2()
}

pub fn q1<T: Real>(real: &ChannelRealization<T>, x: &Array1<Cx<T>>, imp: &ImpairmentParams<T>) -> Result<T> {
    Ok(q1_from_amplitudes(&amplitudes(real, x)?, imp))
}

pub fn snr<T: Real>(real: &ChannelRealization<T>, x: &Array1<Cx<T>>, imp: &ImpairmentParams<T>) -> Result<T> {
    Ok(snr_from_q1(q1(real, x, imp)?, imp))
}

/// Bits/s/Hz.
pub fn spectral_efficiency<T: Real>(
    real: &ChannelRealization<T>,
    x: &Array1<Cx<T>>,
    imp: &ImpairmentParams<T>,
) -> Result<T> {
    Ok(se_from_q1(q1(real, x, imp)?, imp))
}

pub fn evaluate<T: Real>(
    real: &ChannelRealization<T>,
    x: &Array1<Cx<T>>,
    imp: &ImpairmentParams<T>,
) -> Result<ObjectiveBreakdown<T>> {
    let amplitudes = amplitudes(real, x)?;
    let q1 = q1_from_amplitudes(&amplitudes, imp);
    Ok(ObjectiveBreakdown {
        amplitudes,
        q1,
        spectral_efficiency: se_from_q1(q1, imp),
    })
}

/// Asymptotic capacity ceiling `log2(1 + M/(ρ_b + ρ_u·(M + ρ_b)))` imposed by
/// the transceiver impairments.
pub fn upper_bound<T: Real>(m: usize, imp: &ImpairmentParams<T>) -> Result<T> {
    if m == 0 {
        return Err(Error::Parameter("antenna count must be positive".into()));
    }
    if imp.rho_b + imp.rho_u <= T::zero() {
        return Err(Error::UnboundedCapacity);
    }
    let m: T = lit(m as f64);
    Ok((T::one() + m / (imp.rho_b + imp.rho_u * (m + imp.rho_b))).log2())
}
