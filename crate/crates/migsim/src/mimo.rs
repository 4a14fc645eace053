//! MIMO spectral efficiency: eigenmode decomposition, the four transmission
//! modes, and water-filling across eigenmodes.
//!
//! Conventions. `rho` is always the per-transmit-antenna SNR, i.e. total
//! transmit power split over `nt` antennas and divided by noise power, so
//! total SNR is `rho * nt`. Fading matrices are unit-variance (large-scale
//! gain lives in the link budget, not in `H`).

use nalgebra::{linalg::SymmetricEigen, DMatrix};

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};

/// Eigenvalues of `H Hᴴ`, canonicalized: sorted descending, clamped at 0,
/// truncated to `min(nt, nr)` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpectrum {
    values: Vec<f64>,
}

impl EigenSpectrum {
    /// Canonicalizes a raw eigenvalue list: clamps small negative values
    /// (decomposition round-off) to 0 and sorts descending.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("eigen spectrum must not be empty"));
        }
        for v in &mut values {
            if !v.is_finite() {
                return Err(Error::invalid(format!("non-finite eigenvalue {v}")));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        values.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest eigenvalue (the dominant eigenmode gain).
    pub fn max(&self) -> f64 {
        self.values[0]
    }
}

/// Transmission mode selecting how eigenmodes are exercised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MimoMode {
    /// All power on the dominant eigenmode.
    Beamforming,
    /// Single stream combined over the whole array (full Frobenius gain).
    Diversity,
    /// Independent streams, power split equally per transmit antenna.
    MultiplexingEqualPower,
    /// Independent streams, power water-filled across eigenmodes.
    MultiplexingWaterfilling,
}

/// Power split across eigenmodes produced by [`waterfill_eigenmodes`].
/// `powers` aligns with the descending spectrum order.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPowerAllocation {
    pub powers: Vec<f64>,
    /// Water level mu; `None` when the split was not produced by
    /// water-filling.
    pub water_level: Option<f64>,
}

// ---------------------------------------------------------------------------
// Eigenmode decomposition
// ---------------------------------------------------------------------------

/// Eigenvalues of the Gram matrix `H Hᴴ` via self-adjoint decomposition,
/// canonicalized and truncated to the `min(nt, nr)` possible nonzero modes.
pub fn eigen_spectrum(h: &ChannelMatrix) -> Result<EigenSpectrum> {
    if h.nrows() == 0 || h.ncols() == 0 {
        return Err(Error::invalid("channel matrix must be non-empty"));
    }
    let gram = h * h.adjoint();
    let eig = SymmetricEigen::new(gram);
    let mut spectrum = EigenSpectrum::from_values(eig.eigenvalues.iter().copied().collect())?;
    spectrum.values.truncate(h.nrows().min(h.ncols()));
    Ok(spectrum)
}

fn check_rho(rho: f64) -> Result<()> {
    if !rho.is_finite() || rho < 0.0 {
        return Err(Error::invalid(format!(
            "per-antenna SNR must be finite and >= 0, got {rho}"
        )));
    }
    Ok(())
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

// ---------------------------------------------------------------------------
// Spectral efficiency
// ---------------------------------------------------------------------------

/// Equal-power spectral efficiency `sum_i log2(1 + rho * lambda_i)` in
/// bit/s/Hz, the eigenvalue form of `log2 det(I + rho H Hᴴ)`.
pub fn spectral_efficiency_equal_power(h: &ChannelMatrix, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let spectrum = eigen_spectrum(h)?;
    Ok(spectrum.values().iter().map(|&l| log2_1p(rho * l)).sum())
}

/// Equal-power spectral efficiency computed as `log2 det(I + rho H Hᴴ)`
/// through a Cholesky factorization of the (Hermitian positive-definite)
/// argument. Algebraically identical to
/// [`spectral_efficiency_equal_power`]; kept as an independent route for
/// cross-checking.
pub fn spectral_efficiency_log_det(h: &ChannelMatrix, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    if h.nrows() == 0 || h.ncols() == 0 {
        return Err(Error::invalid("channel matrix must be non-empty"));
    }
    let n = h.nrows();
    let m = DMatrix::identity(n, n) + (h * h.adjoint()).scale(rho);
    let chol = nalgebra::linalg::Cholesky::new(m)
        .ok_or_else(|| Error::invalid("I + rho H Hᴴ must be positive definite"))?;
    let l = chol.l();
    let ln_det: f64 = (0..n).map(|i| l[(i, i)].re.ln()).sum::<f64>() * 2.0;
    Ok(ln_det / std::f64::consts::LN_2)
}

/// Spectral efficiency of `h` at per-antenna SNR `rho` under the given mode,
/// using at most `max_layers` spatial streams (multiplexing modes only).
pub fn spectral_efficiency_capped(
    h: &ChannelMatrix,
    rho: f64,
    mode: MimoMode,
    max_layers: usize,
) -> Result<f64> {
    check_rho(rho)?;
    if max_layers == 0 {
        return Err(Error::invalid("layer cap must be >= 1"));
    }
    let nt = h.ncols() as f64;
    match mode {
        MimoMode::Beamforming => {
            let spectrum = eigen_spectrum(h)?;
            Ok(log2_1p(rho * nt * spectrum.max()))
        }
        MimoMode::Diversity => {
            if h.nrows() == 0 || h.ncols() == 0 {
                return Err(Error::invalid("channel matrix must be non-empty"));
            }
            Ok(log2_1p(rho * nt * h.norm_squared()))
        }
        MimoMode::MultiplexingEqualPower => {
            let spectrum = eigen_spectrum(h)?;
            Ok(spectrum
                .values()
                .iter()
                .take(max_layers)
                .map(|&l| log2_1p(rho * l))
                .sum())
        }
        MimoMode::MultiplexingWaterfilling => {
            let spectrum = eigen_spectrum(h)?;
            let layers = spectrum.len().min(max_layers);
            let truncated = EigenSpectrum {
                values: spectrum.values()[..layers].to_vec(),
            };
            if truncated.max() == 0.0 {
                // Nothing to pour power into; the channel carries nothing.
                return Ok(0.0);
            }
            // Normalized problem: noise 1, total power rho * nt.
            let alloc = waterfill_eigenmodes(&truncated, rho * nt, 1.0)?;
            Ok(truncated
                .values()
                .iter()
                .zip(&alloc.powers)
                .map(|(&l, &p)| log2_1p(p * l))
                .sum())
        }
    }
}

/// Spectral efficiency with all `min(nt, nr)` layers available.
pub fn spectral_efficiency_mode(h: &ChannelMatrix, rho: f64, mode: MimoMode) -> Result<f64> {
    spectral_efficiency_capped(h, rho, mode, h.nrows().min(h.ncols()).max(1))
}

// ---------------------------------------------------------------------------
// Water-filling across eigenmodes
// ---------------------------------------------------------------------------

/// Splits `p_total` across eigenmodes as `p_i = max(0, mu - noise/lambda_i)`
/// with the water level `mu` chosen so the powers sum to `p_total`.
///
/// Zero eigenmodes never receive power. Fails with `NoCapacity` when every
/// eigenvalue is zero.
pub fn waterfill_eigenmodes(
    spectrum: &EigenSpectrum,
    p_total: f64,
    noise_power: f64,
) -> Result<EigenPowerAllocation> {
    if !p_total.is_finite() || p_total <= 0.0 {
        return Err(Error::invalid(format!(
            "total power must be > 0, got {p_total}"
        )));
    }
    if !noise_power.is_finite() || noise_power <= 0.0 {
        return Err(Error::invalid(format!(
            "noise power must be > 0, got {noise_power}"
        )));
    }
    let inverse_gains: Vec<f64> = spectrum
        .values()
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| noise_power / l)
        .collect();
    if inverse_gains.is_empty() {
        return Err(Error::NoCapacity(
            "all eigenvalues are zero, nothing can carry power".into(),
        ));
    }
    // Spectrum order is descending, so inverse gains ascend: try the largest
    // active set first and shrink until the weakest active mode stays
    // positive.
    let mut active = inverse_gains.len();
    let mut mu = 0.0;
    while active > 0 {
        let sum_inv: f64 = inverse_gains[..active].iter().sum();
        mu = (p_total + sum_inv) / active as f64;
        if mu - inverse_gains[active - 1] > 0.0 {
            break;
        }
        active -= 1;
    }
    let mut powers: Vec<f64> = inverse_gains[..active]
        .iter()
        .map(|&inv| (mu - inv).max(0.0))
        .collect();
    powers.resize(spectrum.len(), 0.0);
    Ok(EigenPowerAllocation {
        powers,
        water_level: Some(mu),
    })
}

// ---------------------------------------------------------------------------
