//! Decibel arithmetic and thermal noise power.
//!
//! Every power-like quantity in this crate travels in dB/dBm and is converted
//! to linear watts only at the point where powers must be summed or divided.
//! Conversions here are the single source of truth for that boundary.

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Thermal noise density at 290 K, dBm/Hz.
pub const THERMAL_NOISE_DBM_HZ: f64 = -174.0;

// ---------------------------------------------------------------------------
// Ratio conversions
// ---------------------------------------------------------------------------

/// Converts a dB value to a linear power ratio.
pub fn db_to_linear(x_db: f64) -> f64 {
    10.0_f64.powf(x_db / 10.0)
}

/// Converts a linear power ratio to dB. The ratio must be finite and > 0.
pub fn linear_to_db(ratio: f64) -> Result<f64> {
    if !ratio.is_finite() || ratio <= 0.0 {
        return Err(Error::invalid(format!(
            "linear ratio must be finite and > 0, got {ratio}"
        )));
    }
    Ok(10.0 * ratio.log10())
}

/// Converts an absolute power in dBm to watts.
pub fn dbm_to_watts(p_dbm: f64) -> f64 {
    10.0_f64.powf((p_dbm - 30.0) / 10.0)
}

/// Converts an absolute power in watts to dBm. The power must be finite and > 0.
pub fn watts_to_dbm(p_w: f64) -> Result<f64> {
    if !p_w.is_finite() || p_w <= 0.0 {
        return Err(Error::invalid(format!(
            "power must be finite and > 0 W, got {p_w}"
        )));
    }
    Ok(10.0 * p_w.log10() + 30.0)
}

// ---------------------------------------------------------------------------
// Noise power
// ---------------------------------------------------------------------------

/// Receiver noise power over a given bandwidth, in both representations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisePower {
    /// Integrated noise power, dBm.
    pub dbm: f64,
    /// Integrated noise power, W.
    pub watts: f64,
}

/// Integrates a noise density over `bandwidth_hz` and applies a receiver
/// noise figure: `N = n0 + 10 log10(B) + NF` in dBm.
///
/// `bandwidth_hz` must be > 0; the noise figure must be finite and >= 0.
pub fn noise_power(n0_dbm_hz: f64, noise_figure_db: f64, bandwidth_hz: f64) -> Result<NoisePower> {
    if !bandwidth_hz.is_finite() || bandwidth_hz <= 0.0 {
        return Err(Error::invalid(format!(
            "bandwidth must be > 0 Hz, got {bandwidth_hz}"
        )));
    }
    if !noise_figure_db.is_finite() || noise_figure_db < 0.0 {
        return Err(Error::invalid(format!(
            "noise figure must be finite and >= 0 dB, got {noise_figure_db}"
        )));
    }
    let dbm = n0_dbm_hz + 10.0 * bandwidth_hz.log10() + noise_figure_db;
    Ok(NoisePower {
        dbm,
        watts: dbm_to_watts(dbm),
    })
}

// ---------------------------------------------------------------------------
