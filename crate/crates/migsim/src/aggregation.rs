//! Carrier aggregation: power allocation across component carriers,
//! aggregate throughput, and bandwidth partitioning between competing
//! demands.

use crate::error::{Error, Result};

/// One component carrier as seen by a single UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentCarrier {
    /// Carrier center frequency, Hz.
    pub frequency_hz: f64,
    /// Carrier bandwidth, Hz.
    pub bandwidth_hz: f64,
    /// Linear channel power gain |h|^2 on this carrier (large-scale and
    /// fading combined).
    pub gain: f64,
    /// Noise (plus interference) spectral density at the receiver, W/Hz.
    pub noise_density_w_hz: f64,
}

/// Per-carrier transmit power split.
#[derive(Debug, Clone, PartialEq)]
pub struct CarrierPowerAllocation {
    /// Power per carrier, W, in the caller's carrier order.
    pub powers: Vec<f64>,
    /// Water level mu, `None` for splits not produced by water-filling.
    pub water_level: Option<f64>,
}

/// Effective gain `g = |h|^2 / (N0 B)`: SNR contributed per watt of
/// transmit power on this carrier.
pub fn effective_gain(cc: &ComponentCarrier) -> Result<f64> {
    if !cc.gain.is_finite() || cc.gain < 0.0 {
        return Err(Error::invalid(format!(
            "carrier gain must be finite and >= 0, got {}",
            cc.gain
        )));
    }
    if cc.bandwidth_hz <= 0.0 || cc.noise_density_w_hz <= 0.0 {
        return Err(Error::invalid(
            "carrier bandwidth and noise density must be > 0",
        ));
    }
    Ok(cc.gain / (cc.noise_density_w_hz * cc.bandwidth_hz))
}

// ---------------------------------------------------------------------------
// Power allocation policies
// ---------------------------------------------------------------------------

fn check_gains(gains: &[f64]) -> Result<()> {
    if gains.is_empty() {
        return Err(Error::invalid("at least one carrier is required"));
    }
    for &g in gains {
        if !g.is_finite() || g < 0.0 {
            return Err(Error::invalid(format!(
                "effective gains must be finite and >= 0, got {g}"
            )));
        }
    }
    Ok(())
}

/// Splits `p_total` equally over all carriers (the non-adaptive baseline).
pub fn equal_power(n_carriers: usize, p_total: f64) -> Result<CarrierPowerAllocation> {
    if n_carriers == 0 {
        return Err(Error::invalid("at least one carrier is required"));
    }
    if !p_total.is_finite() || p_total <= 0.0 {
        return Err(Error::invalid(format!(
            "total power must be > 0, got {p_total}"
        )));
    }
    Ok(CarrierPowerAllocation {
        powers: vec![p_total / n_carriers as f64; n_carriers],
        water_level: None,
    })
}

/// Water-fills `p_total` over carriers with effective gains `gains`:
/// `p_i = max(0, mu - 1/g_i)` with `mu` set by the carriers strong enough
/// to stay active.
///
/// The active set is found on the descending-gain ordering, admitting one
/// carrier at a time until the weakest admitted carrier would receive
/// nothing. Zero-gain carriers are excluded up front and always get zero.
/// Returned powers are mapped back to the caller's carrier order.
pub fn waterfill_carriers(gains: &[f64], p_total: f64) -> Result<CarrierPowerAllocation> {
    check_gains(gains)?;
    if !p_total.is_finite() || p_total <= 0.0 {
        return Err(Error::invalid(format!(
            "total power must be > 0, got {p_total}"
        )));
    }
    let mut order: Vec<usize> = (0..gains.len()).filter(|&i| gains[i] > 0.0).collect();
    if order.is_empty() {
        return Err(Error::NoCapacity(
            "all carrier gains are zero, nothing can carry power".into(),
        ));
    }
    order.sort_by(|&a, &b| gains[b].partial_cmp(&gains[a]).expect("finite gains"));
    let inv: Vec<f64> = order.iter().map(|&i| 1.0 / gains[i]).collect();

    let n = order.len();
    let mut prefix_inv = inv[0];
    let mut k = 1;
    let mut mu = (p_total + prefix_inv) / 1.0;
    while k <= n {
        mu = (p_total + prefix_inv) / k as f64;
        if mu - inv[k - 1] <= 0.0 {
            // Weakest admitted carrier would get nothing: back out and
            // settle with the previous active set. k = 1 cannot land here
            // because mu - inv[0] = p_total > 0.
            k -= 1;
            prefix_inv -= inv[k];
            mu = (p_total + prefix_inv) / k as f64;
            break;
        }
        if k == n {
            break;
        }
        prefix_inv += inv[k];
        k += 1;
    }

    let mut powers = vec![0.0; gains.len()];
    for (rank, &idx) in order.iter().enumerate().take(k) {
        powers[idx] = (mu - inv[rank]).max(0.0);
    }
    Ok(CarrierPowerAllocation {
        powers,
        water_level: Some(mu),
    })
}

/// Aggregate throughput `T = sum_i B_i log2(1 + p_i g_i)` in bit/s for a
/// given power split.
pub fn ca_throughput(
    carriers: &[ComponentCarrier],
    allocation: &CarrierPowerAllocation,
) -> Result<f64> {
    if carriers.is_empty() {
        return Err(Error::invalid("at least one carrier is required"));
    }
    if carriers.len() != allocation.powers.len() {
        return Err(Error::invalid(format!(
            "allocation covers {} carriers but {} were given",
            allocation.powers.len(),
            carriers.len()
        )));
    }
    let mut total = 0.0;
    for (cc, &p) in carriers.iter().zip(&allocation.powers) {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::invalid(format!("carrier power must be >= 0, got {p}")));
        }
        let g = effective_gain(cc)?;
        total += cc.bandwidth_hz * (p * g).ln_1p() / std::f64::consts::LN_2;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Spectrum partitioning
// ---------------------------------------------------------------------------

/// One demand competing for spectrum, with utility `w ln(1 + a x)` for an
/// assignment of `x` Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumDemand {
    /// Priority weight `w` (> 0).
    pub weight: f64,
    /// Marginal-rate coefficient `a` in 1/Hz (> 0); utility saturates
    /// beyond roughly `1/a` Hz.
    pub rate_per_hz: f64,
}

/// Splits `s_total` Hz across demands maximizing `sum_i w_i ln(1 + a_i x_i)`
/// subject to `sum_i x_i = s_total`, `x_i >= 0`.
///
/// Solved through the KKT conditions: `x_i(nu) = max(0, w_i/nu - 1/a_i)`
/// with the dual price `nu` found by bisection until the budget is met
/// within `1e-9 * s_total`.
pub fn allocate_spectrum(demands: &[SpectrumDemand], s_total: f64) -> Result<Vec<f64>> {
    if demands.is_empty() {
        return Err(Error::invalid("at least one demand is required"));
    }
    if !s_total.is_finite() || s_total <= 0.0 {
        return Err(Error::invalid(format!(
            "total spectrum must be > 0 Hz, got {s_total}"
        )));
    }
    for d in demands {
        if !d.weight.is_finite() || d.weight <= 0.0 || !d.rate_per_hz.is_finite() || d.rate_per_hz <= 0.0
        {
            return Err(Error::invalid(format!(
                "demand weight and rate must be > 0, got w={}, a={}",
                d.weight, d.rate_per_hz
            )));
        }
    }
    let assigned = |nu: f64| -> Vec<f64> {
        demands
            .iter()
            .map(|d| (d.weight / nu - 1.0 / d.rate_per_hz).max(0.0))
            .collect()
    };
    let total = |xs: &[f64]| -> f64 { xs.iter().sum() };

    // sum x(nu) decreases continuously from +inf (nu -> 0) to 0
    // (nu >= max w a), so plain bisection on the dual price converges.
    let mut hi = demands
        .iter()
        .map(|d| d.weight * d.rate_per_hz)
        .fold(f64::MIN, f64::max);
    let mut lo = hi;
    while total(&assigned(lo)) < s_total {
        lo /= 2.0;
    }
    let tol = 1e-9 * s_total;
    let mut xs = assigned(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        xs = assigned(mid);
        let t = total(&xs);
        if (t - s_total).abs() <= tol {
            return Ok(xs);
        }
        if t > s_total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = total(&xs);
    if (t - s_total).abs() <= tol {
        Ok(xs)
    } else {
        Err(Error::invalid(format!(
            "spectrum allocation did not converge: assigned {t} of {s_total} Hz"
        )))
    }
}

// ---------------------------------------------------------------------------
