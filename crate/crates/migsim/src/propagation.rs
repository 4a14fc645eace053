//! Path loss models: free-space, log-distance with shadowing, rain
//! attenuation, single knife-edge diffraction and their composition.
//!
//! All losses are positive dB values. The log-distance model is anchored to
//! the free-space loss at the reference distance, so the two agree exactly
//! at `d = d0` when the exponent is 2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantities::SPEED_OF_LIGHT_M_S;

/// Wavelength in meters for a carrier frequency in Hz.
pub fn wavelength_m(frequency_hz: f64) -> Result<f64> {
    if !frequency_hz.is_finite() || frequency_hz <= 0.0 {
        return Err(Error::invalid(format!(
            "frequency must be > 0 Hz, got {frequency_hz}"
        )));
    }
    Ok(SPEED_OF_LIGHT_M_S / frequency_hz)
}

// ---------------------------------------------------------------------------
// Individual loss terms
// ---------------------------------------------------------------------------

/// Free-space path loss `20 log10(4 pi f d / c)` in dB.
pub fn friis_loss_db(frequency_hz: f64, distance_m: f64) -> Result<f64> {
    if !frequency_hz.is_finite() || frequency_hz <= 0.0 {
        return Err(Error::invalid(format!(
            "frequency must be > 0 Hz, got {frequency_hz}"
        )));
    }
    if !distance_m.is_finite() || distance_m <= 0.0 {
        return Err(Error::invalid(format!(
            "distance must be > 0 m, got {distance_m}"
        )));
    }
    Ok(20.0 * (4.0 * std::f64::consts::PI * frequency_hz * distance_m / SPEED_OF_LIGHT_M_S).log10())
}

/// Log-distance path loss with an explicit shadowing realization:
/// `PL(d0) + 10 n log10(d / d0) + X` in dB, free-space anchored at `d0`.
///
/// Requires `d >= d0 > 0`; the shadowing term is a realized value in dB,
/// not a standard deviation.
pub fn log_distance_loss_db(
    frequency_hz: f64,
    distance_m: f64,
    exponent: f64,
    shadowing_db: f64,
    ref_distance_m: f64,
) -> Result<f64> {
    if !ref_distance_m.is_finite() || ref_distance_m <= 0.0 {
        return Err(Error::invalid(format!(
            "reference distance must be > 0 m, got {ref_distance_m}"
        )));
    }
    if !distance_m.is_finite() || distance_m < ref_distance_m {
        return Err(Error::invalid(format!(
            "distance {distance_m} m must be >= reference distance {ref_distance_m} m"
        )));
    }
    if !exponent.is_finite() || exponent <= 0.0 {
        return Err(Error::invalid(format!(
            "path loss exponent must be > 0, got {exponent}"
        )));
    }
    if !shadowing_db.is_finite() {
        return Err(Error::invalid("shadowing must be finite"));
    }
    let anchor = friis_loss_db(frequency_hz, ref_distance_m)?;
    Ok(anchor + 10.0 * exponent * (distance_m / ref_distance_m).log10() + shadowing_db)
}

/// Rain attenuation `k R^alpha * d` in dB, with the specific attenuation in
/// dB/km and the path length converted to km. Zero rain means zero loss.
pub fn rain_attenuation_db(k: f64, alpha: f64, rain_rate_mm_h: f64, distance_m: f64) -> Result<f64> {
    if !k.is_finite() || k < 0.0 || !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::invalid(format!(
            "rain coefficients must satisfy k >= 0, alpha > 0, got k={k}, alpha={alpha}"
        )));
    }
    if !rain_rate_mm_h.is_finite() || rain_rate_mm_h < 0.0 {
        return Err(Error::invalid(format!(
            "rain rate must be >= 0 mm/h, got {rain_rate_mm_h}"
        )));
    }
    if !distance_m.is_finite() || distance_m < 0.0 {
        return Err(Error::invalid(format!(
            "distance must be >= 0 m, got {distance_m}"
        )));
    }
    if rain_rate_mm_h == 0.0 {
        return Ok(0.0);
    }
    Ok(k * rain_rate_mm_h.powf(alpha) * distance_m / 1000.0)
}

/// Single knife-edge obstacle: clearance `h_m` above the direct path at
/// distances `d1_m`/`d2_m` from the endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnifeEdge {
    /// Obstruction height above the line of sight, m. Negative or zero
    /// means the edge does not reach the path.
    pub height_m: f64,
    /// Distance from transmitter to the edge, m.
    pub d1_m: f64,
    /// Distance from the edge to the receiver, m.
    pub d2_m: f64,
}

/// Knife-edge diffraction loss `20 log10(v)` for the Fresnel parameter
/// `v = h sqrt(2 (d1 + d2) / (lambda d1 d2))`, clamped to 0 when `v <= 1`
/// (including any non-penetrating edge, `h <= 0`).
pub fn knife_edge_loss_db(edge: &KnifeEdge, frequency_hz: f64) -> Result<f64> {
    if !edge.d1_m.is_finite() || edge.d1_m <= 0.0 || !edge.d2_m.is_finite() || edge.d2_m <= 0.0 {
        return Err(Error::invalid(format!(
            "knife-edge segment lengths must be > 0 m, got d1={}, d2={}",
            edge.d1_m, edge.d2_m
        )));
    }
    if !edge.height_m.is_finite() {
        return Err(Error::invalid("knife-edge height must be finite"));
    }
    if edge.height_m <= 0.0 {
        return Ok(0.0);
    }
    let lambda = wavelength_m(frequency_hz)?;
    let v = edge.height_m * (2.0 * (edge.d1_m + edge.d2_m) / (lambda * edge.d1_m * edge.d2_m)).sqrt();
    if v <= 1.0 {
        Ok(0.0)
    } else {
        Ok(20.0 * v.log10())
    }
}

// ---------------------------------------------------------------------------
// Composite model
// ---------------------------------------------------------------------------

/// Environment-dependent coefficients for the composite loss model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathLossParams {
    pub exponent_los: f64,
    pub sigma_los_db: f64,
    pub exponent_nlos: f64,
    pub sigma_nlos_db: f64,
    /// Log-distance reference distance, m.
    pub ref_distance_m: f64,
    /// Rain power-law coefficient k (dB/km at R = 1 mm/h).
    pub rain_k: f64,
    /// Rain power-law exponent alpha.
    pub rain_alpha: f64,
    /// Penetration loss per wall, dB.
    pub wall_loss_db: f64,
}

impl Default for PathLossParams {
    fn default() -> Self {
        Self::sub6_urban_micro()
    }
}

impl PathLossParams {
    /// Sub-6 GHz street-level micro cells.
    pub fn sub6_urban_micro() -> Self {
        Self {
            exponent_los: 2.7,
            sigma_los_db: 4.0,
            exponent_nlos: 3.3,
            sigma_nlos_db: 7.0,
            ref_distance_m: 1.0,
            rain_k: 0.0,
            rain_alpha: 1.0,
            wall_loss_db: 20.0,
        }
    }

    /// Sub-6 GHz above-rooftop macro cells.
    pub fn sub6_urban_macro() -> Self {
        Self {
            exponent_los: 2.7,
            sigma_los_db: 4.0,
            exponent_nlos: 3.5,
            sigma_nlos_db: 8.0,
            ref_distance_m: 1.0,
            rain_k: 0.0,
            rain_alpha: 1.0,
            wall_loss_db: 20.0,
        }
    }

    /// 28 GHz street-level small cells; rain coefficients for that band.
    pub fn mmwave_28ghz() -> Self {
        Self {
            exponent_los: 2.1,
            sigma_los_db: 3.5,
            exponent_nlos: 3.3,
            sigma_nlos_db: 7.0,
            ref_distance_m: 1.0,
            rain_k: 0.12,
            rain_alpha: 0.9,
            wall_loss_db: 20.0,
        }
    }

    /// Shadowing standard deviation for a LOS state, dB.
    pub fn sigma_db(&self, los: bool) -> f64 {
        if los {
            self.sigma_los_db
        } else {
            self.sigma_nlos_db
        }
    }

    /// Path-loss exponent for a LOS state.
    pub fn exponent(&self, los: bool) -> f64 {
        if los {
            self.exponent_los
        } else {
            self.exponent_nlos
        }
    }
}

/// Geometry and weather of one link for the composite loss model.
#[derive(Debug, Clone, PartialEq)]
pub struct PathProfile {
    pub distance_m: f64,
    pub frequency_hz: f64,
    pub los: bool,
    pub rain_rate_mm_h: f64,
    pub obstacle: Option<KnifeEdge>,
    /// Number of penetrated walls.
    pub wall_count: u32,
}

impl PathProfile {
    /// Unobstructed outdoor link in clear weather.
    pub fn clear(distance_m: f64, frequency_hz: f64, los: bool) -> Self {
        Self {
            distance_m,
            frequency_hz,
            los,
            rain_rate_mm_h: 0.0,
            obstacle: None,
            wall_count: 0,
        }
    }
}

/// Additive composition of the loss terms, all in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    /// Log-distance term including the shadowing realization.
    pub path_db: f64,
    pub rain_db: f64,
    pub diffraction_db: f64,
    pub wall_db: f64,
    pub total_db: f64,
}

/// Composes log-distance, rain, diffraction and wall losses for one link.
/// `shadowing_db` is the realized shadowing value (draw it upstream).
pub fn total_loss(
    profile: &PathProfile,
    params: &PathLossParams,
    shadowing_db: f64,
) -> Result<LossBreakdown> {
    let path_db = log_distance_loss_db(
        profile.frequency_hz,
        profile.distance_m,
        params.exponent(profile.los),
        shadowing_db,
        params.ref_distance_m,
    )?;
    let rain_db = rain_attenuation_db(
        params.rain_k,
        params.rain_alpha,
        profile.rain_rate_mm_h,
        profile.distance_m,
    )?;
    let diffraction_db = match &profile.obstacle {
        Some(edge) => knife_edge_loss_db(edge, profile.frequency_hz)?,
        None => 0.0,
    };
    let wall_db = profile.wall_count as f64 * params.wall_loss_db;
    Ok(LossBreakdown {
        path_db,
        rain_db,
        diffraction_db,
        wall_db,
        total_db: path_db + rain_db + diffraction_db + wall_db,
    })
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    // Frozen by direct evaluation of the printed formulas (independent
    // calculator run), not by calling the functions under test.
    const FRIIS_1M_28GHZ_DB: f64 = 61.390_943_848_727_76;
    const KNIFE_1_50_50_28GHZ_DB: f64 = 8.734_273_154_062_352;
    const FRIIS_1M_2_4GHZ_DB: f64 = 40.052_008_056_115_5;

    #[test]
    fn test_friis_reference_points() {
        let got = friis_loss_db(28e9, 1.0).unwrap();
        assert!(
            (got - FRIIS_1M_28GHZ_DB).abs() < 1e-9,
            "expected {FRIIS_1M_28GHZ_DB}, got {got}"
        );
        // The textbook 2.4 GHz / 1 m value, ~40.05 dB.
        let got = friis_loss_db(2.4e9, 1.0).unwrap();
        assert!((got - FRIIS_1M_2_4GHZ_DB).abs() < 1e-9, "got {got}");
    }

    #[test]
    fn test_friis_doubling_adds_six_db() {
        let six = 20.0 * 2.0_f64.log10();
        for &d in &[1.0, 7.5, 120.0, 3_000.0] {
            let a = friis_loss_db(28e9, d).unwrap();
            self::assert_close(
                friis_loss_db(28e9, 2.0 * d).unwrap() - a,
                six,
                1e-10,
                "distance doubling",
            );
        }
        // Frequency doubling adds the same 6.02 dB.
        let a = friis_loss_db(1.8e9, 50.0).unwrap();
        self::assert_close(
            friis_loss_db(3.6e9, 50.0).unwrap() - a,
            six,
            1e-10,
            "frequency doubling",
        );
    }

    fn assert_close(got: f64, expect: f64, tol: f64, what: &str) {
        assert!(
            (got - expect).abs() < tol,
            "{what}: expected {expect}, got {got}"
        );
    }

    #[test]
    fn test_log_distance_reduces_to_friis() {
        // n = 2 with zero shadowing reproduces free space at any distance.
        for &d in &[1.0, 10.0, 250.0] {
            let ld = log_distance_loss_db(3.5e9, d, 2.0, 0.0, 1.0).unwrap();
            let fs = friis_loss_db(3.5e9, d).unwrap();
            assert_close(ld, fs, 1e-9, "n=2 log-distance vs free space");
        }
    }

    #[test]
    fn test_log_distance_slope_and_shadowing() {
        // 200 m NLOS at n = 3.3: anchor + 33 log10(200).
        let expect = FRIIS_1M_28GHZ_DB + 33.0 * 200.0_f64.log10();
        let got = log_distance_loss_db(28e9, 200.0, 3.3, 0.0, 1.0).unwrap();
        assert_close(got, expect, 1e-9, "200 m NLOS loss");
        // Shadowing is purely additive.
        let shadowed = log_distance_loss_db(28e9, 200.0, 3.3, 5.5, 1.0).unwrap();
        assert_close(shadowed - got, 5.5, 1e-12, "shadowing offset");
    }

    #[test]
    fn test_log_distance_monotone_in_distance_and_exponent() {
        let mut prev = 0.0;
        for i in 1..=100 {
            let d = i as f64 * 10.0;
            let pl = log_distance_loss_db(3.5e9, d, 3.0, 0.0, 1.0).unwrap();
            assert!(pl > prev, "loss must grow with distance");
            prev = pl;
        }
        let lo = log_distance_loss_db(3.5e9, 100.0, 2.7, 0.0, 1.0).unwrap();
        let hi = log_distance_loss_db(3.5e9, 100.0, 3.5, 0.0, 1.0).unwrap();
        assert!(hi > lo, "higher exponent must cost more beyond d0");
    }

    #[test]
    fn test_log_distance_rejects_below_reference() {
        assert!(log_distance_loss_db(3.5e9, 0.5, 3.0, 0.0, 1.0).is_err());
        assert!(log_distance_loss_db(3.5e9, 10.0, 3.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn test_rain_attenuation_values() {
        // alpha = 1 makes the law linear: 0.12 * 25 = 3 dB/km exactly.
        let db = rain_attenuation_db(0.12, 1.0, 25.0, 1000.0).unwrap();
        assert_eq!(db, 3.0);
        assert_eq!(rain_attenuation_db(0.12, 1.0, 25.0, 500.0).unwrap(), 1.5);
        // Power-law exponent below 1 compresses heavy rain.
        let db = rain_attenuation_db(0.12, 0.9, 25.0, 1000.0).unwrap();
        assert_close(db, 2.174_338_991_033_086_4, 1e-12, "alpha=0.9 rate");
        assert_eq!(rain_attenuation_db(0.12, 0.9, 0.0, 1000.0).unwrap(), 0.0);
    }

    #[test]
    fn test_knife_edge_reference_case() {
        // 1 m penetration mid-way on a 100 m link at 28 GHz: v ~ 2.73.
        let edge = KnifeEdge {
            height_m: 1.0,
            d1_m: 50.0,
            d2_m: 50.0,
        };
        let got = knife_edge_loss_db(&edge, 28e9).unwrap();
        assert_close(got, KNIFE_1_50_50_28GHZ_DB, 1e-9, "mid-path edge");
        assert!((got - 8.7).abs() <= 0.1);
    }

    #[test]
    fn test_knife_edge_clamps() {
        // Below-path and grazing edges cost nothing.
        for h in [-3.0, 0.0] {
            let edge = KnifeEdge {
                height_m: h,
                d1_m: 50.0,
                d2_m: 50.0,
            };
            assert_eq!(knife_edge_loss_db(&edge, 28e9).unwrap(), 0.0);
        }
        // Tiny positive penetration at long wavelength: v <= 1, still 0.
        let edge = KnifeEdge {
            height_m: 0.05,
            d1_m: 50.0,
            d2_m: 50.0,
        };
        assert_eq!(knife_edge_loss_db(&edge, 700e6).unwrap(), 0.0);
        // Loss grows with penetration depth.
        let shallow = knife_edge_loss_db(
            &KnifeEdge { height_m: 1.0, d1_m: 50.0, d2_m: 50.0 },
            28e9,
        )
        .unwrap();
        let deep = knife_edge_loss_db(
            &KnifeEdge { height_m: 4.0, d1_m: 50.0, d2_m: 50.0 },
            28e9,
        )
        .unwrap();
        assert!(deep > shallow);
    }

    #[test]
    fn test_total_loss_composition() {
        let params = PathLossParams::mmwave_28ghz();
        let profile = PathProfile {
            distance_m: 200.0,
            frequency_hz: 28e9,
            los: false,
            rain_rate_mm_h: 25.0,
            obstacle: Some(KnifeEdge {
                height_m: 1.0,
                d1_m: 100.0,
                d2_m: 100.0,
            }),
            wall_count: 1,
        };
        let loss = total_loss(&profile, &params, 2.0).unwrap();
        assert_close(
            loss.path_db,
            FRIIS_1M_28GHZ_DB + 33.0 * 200.0_f64.log10() + 2.0,
            1e-9,
            "path term",
        );
        assert_close(loss.wall_db, 20.0, 1e-12, "single wall");
        assert!(loss.rain_db > 0.0 && loss.diffraction_db > 0.0);
        assert_close(
            loss.total_db,
            loss.path_db + loss.rain_db + loss.diffraction_db + loss.wall_db,
            1e-12,
            "total is the sum of parts",
        );
        // Removing the wall removes exactly its 20 dB.
        let open = total_loss(
            &PathProfile { wall_count: 0, ..profile.clone() },
            &params,
            2.0,
        )
        .unwrap();
        assert_close(loss.total_db - open.total_db, 20.0, 1e-12, "wall delta");
    }

    #[test]
    fn test_los_state_selects_exponent() {
        let params = PathLossParams::mmwave_28ghz();
        let d = 150.0;
        let los = total_loss(&PathProfile::clear(d, 28e9, true), &params, 0.0).unwrap();
        let nlos = total_loss(&PathProfile::clear(d, 28e9, false), &params, 0.0).unwrap();
        // 10 (3.3 - 2.1) log10(150) dB apart.
        assert_close(
            nlos.total_db - los.total_db,
            12.0 * d.log10(),
            1e-9,
            "LOS/NLOS exponent gap",
        );
    }
}
