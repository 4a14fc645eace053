//! Small-scale fading, shadowing and LOS state, drawn from counter-based
//! random streams.
//!
//! Reproducibility contract: every draw is a pure function of the
//! `(scenario_seed, drop_index, link_index)` triple plus a fixed per-purpose
//! lane constant. There is no shared generator state, so results do not
//! depend on evaluation order or thread count.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex channel matrix, receive antennas x transmit antennas.
pub type ChannelMatrix = DMatrix<Complex<f64>>;

/// Propagation environment tag selecting the LOS probability family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Environment {
    /// Macro deployment, 3GPP UMa LOS curve (knee at 63 m).
    UrbanMacro,
    /// Micro / small-cell deployment, 3GPP UMi LOS curve (knee at 36 m).
    UrbanMicro,
}

// Lane constants decorrelate the per-purpose sub-streams of one link.
pub(crate) const LANE_FADING: u64 = 1;
pub(crate) const LANE_SHADOWING: u64 = 2;
pub(crate) const LANE_LOS: u64 = 3;
pub(crate) const LANE_UE_POSITION: u64 = 4;
pub(crate) const LANE_LATENCY: u64 = 5;
pub(crate) const LANE_BOOTSTRAP: u64 = 6;

/// Identifies one random stream: a `(seed, drop, link)` triple.
///
/// Streams for distinct triples are built from distinct 256-bit cipher keys,
/// so they never collide. Drawing twice from the same stream yields the
/// same values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub scenario_seed: u64,
    pub drop_index: u64,
    pub link_index: u64,
}

impl RngStream {
    pub fn new(scenario_seed: u64, drop_index: u64, link_index: u64) -> Self {
        Self {
            scenario_seed,
            drop_index,
            link_index,
        }
    }

    /// Fresh generator for one purpose lane, always starting at position 0.
    pub(crate) fn rng(&self, lane: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.scenario_seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.drop_index.to_le_bytes());
        key[16..24].copy_from_slice(&self.link_index.to_le_bytes());
        key[24..32].copy_from_slice(&lane.to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }
}

// ---------------------------------------------------------------------------
// Draws
// ---------------------------------------------------------------------------

/// Draws an `nr x nt` Rayleigh-fading matrix with i.i.d. CN(0, 1) entries
/// (each real/imaginary part N(0, 1/2), so E[|h|^2] = 1 per entry).
pub fn draw_rayleigh(stream: RngStream, nt: usize, nr: usize) -> Result<ChannelMatrix> {
    if nt == 0 || nr == 0 {
        return Err(Error::invalid(format!(
            "antenna counts must be >= 1, got nt={nt}, nr={nr}"
        )));
    }
    let mut rng = stream.rng(LANE_FADING);
    let scale = 0.5_f64.sqrt();
    Ok(ChannelMatrix::from_fn(nr, nt, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(re * scale, im * scale)
    }))
}

/// Draws a zero-mean Gaussian shadowing term in dB with standard deviation
/// `sigma_db` (>= 0; zero disables shadowing).
pub fn draw_shadowing(stream: RngStream, sigma_db: f64) -> Result<f64> {
    if !sigma_db.is_finite() || sigma_db < 0.0 {
        return Err(Error::invalid(format!(
            "shadowing sigma must be finite and >= 0 dB, got {sigma_db}"
        )));
    }
    let mut rng = stream.rng(LANE_SHADOWING);
    let z: f64 = rng.sample(StandardNormal);
    Ok(z * sigma_db)
}

/// Distance-dependent LOS probability for the given environment.
///
/// Both families equal 1 up to an 18 m knee and decay toward 0 with
/// distance; the macro curve decays more slowly (63 m constant vs 36 m).
pub fn los_probability(env: Environment, distance_m: f64) -> Result<f64> {
    if !distance_m.is_finite() || distance_m < 0.0 {
        return Err(Error::invalid(format!(
            "distance must be finite and >= 0 m, got {distance_m}"
        )));
    }
    if distance_m <= 18.0 {
        return Ok(1.0);
    }
    let decay_m = match env {
        Environment::UrbanMacro => 63.0,
        Environment::UrbanMicro => 36.0,
    };
    let e = (-distance_m / decay_m).exp();
    Ok((18.0 / distance_m) * (1.0 - e) + e)
}

/// Draws the LOS/NLOS state of a link by comparing a uniform variate against
/// [`los_probability`].
pub fn draw_los(stream: RngStream, env: Environment, distance_m: f64) -> Result<bool> {
    let p = los_probability(env, distance_m)?;
    let mut rng = stream.rng(LANE_LOS);
    let u: f64 = rng.gen();
    Ok(u < p)
}

/// Fading state of one link: LOS flag, shadowing offset and fading matrix.
#[derive(Debug, Clone)]
pub struct LinkState {
    pub los: bool,
    pub shadowing_db: f64,
    pub fading: ChannelMatrix,
}

/// Draws the complete fading state of one link in a fixed lane order.
pub fn draw_link_state(
    stream: RngStream,
    env: Environment,
    distance_m: f64,
    sigma_db: f64,
    nt: usize,
    nr: usize,
) -> Result<LinkState> {
    Ok(LinkState {
        los: draw_los(stream, env, distance_m)?,
        shadowing_db: draw_shadowing(stream, sigma_db)?,
        fading: draw_rayleigh(stream, nt, nr)?,
    })
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use rayon::prelude::*;

    #[test]
    fn test_same_stream_same_draws() {
        let s = RngStream::new(7, 3, 11);
        let a = draw_rayleigh(s, 4, 4).unwrap();
        let b = draw_rayleigh(s, 4, 4).unwrap();
        assert_eq!(a, b, "a stream must be a pure function of its triple");
        assert_eq!(
            draw_shadowing(s, 8.0).unwrap(),
            draw_shadowing(s, 8.0).unwrap()
        );
        assert_eq!(
            draw_los(s, Environment::UrbanMicro, 120.0).unwrap(),
            draw_los(s, Environment::UrbanMicro, 120.0).unwrap()
        );
    }

    #[test]
    fn test_distinct_triples_decorrelated() {
        let base = draw_rayleigh(RngStream::new(7, 3, 11), 2, 2).unwrap();
        for s in [
            RngStream::new(8, 3, 11),
            RngStream::new(7, 4, 11),
            RngStream::new(7, 3, 12),
        ] {
            assert_ne!(draw_rayleigh(s, 2, 2).unwrap(), base);
        }
        // Lanes of one stream must differ too: shadowing is not the first
        // fading component.
        let s = RngStream::new(7, 3, 11);
        let shadow = draw_shadowing(s, 1.0).unwrap();
        assert_ne!(shadow, base[(0, 0)].re * 2.0_f64.sqrt());
    }

    #[test]
    fn test_draws_are_thread_order_independent() {
        let serial: Vec<f64> = (0..64)
            .map(|i| draw_shadowing(RngStream::new(1, 0, i), 6.0).unwrap())
            .collect();
        let parallel: Vec<f64> = (0..64u64)
            .into_par_iter()
            .map(|i| draw_shadowing(RngStream::new(1, 0, i), 6.0).unwrap())
            .collect();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn test_rayleigh_unit_mean_power() {
        // Sample-mean oracle: E[|h|^2] = 1, so the mean over n entries has
        // standard error 1/sqrt(n); 2% is a > 7-sigma band at this n.
        let mut sum = 0.0;
        let mut n = 0usize;
        for link in 0..6_250 {
            let h = draw_rayleigh(RngStream::new(42, 0, link), 4, 4).unwrap();
            sum += h.iter().map(|c| c.norm_sqr()).sum::<f64>();
            n += 16;
        }
        let mean = sum / n as f64;
        assert!(
            (mean - 1.0).abs() < 0.02,
            "E[|h|^2] should be ~1, got {mean}"
        );
    }

    #[test]
    fn test_shadowing_moments() {
        let sigma = 7.0;
        let draws: Vec<f64> = (0..100_000)
            .map(|i| draw_shadowing(RngStream::new(9, 1, i), sigma).unwrap())
            .collect();
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.1, "sample mean should be ~0 dB, got {mean}");
        let std = var.sqrt();
        assert!(
            (std - sigma).abs() / sigma < 0.02,
            "sample std should be ~{sigma} dB, got {std}"
        );
    }

    #[test]
    fn test_los_probability_shape() {
        for env in [Environment::UrbanMacro, Environment::UrbanMicro] {
            assert_eq!(los_probability(env, 0.0).unwrap(), 1.0);
            assert_eq!(los_probability(env, 18.0).unwrap(), 1.0);
            let mut prev = 1.0;
            for i in 1..=500 {
                let d = 18.0 + i as f64 * 10.0;
                let p = los_probability(env, d).unwrap();
                assert!(
                    p <= prev + 1e-12,
                    "{env:?}: p must be non-increasing, rose at d={d}"
                );
                assert!((0.0..=1.0).contains(&p));
                prev = p;
            }
        }
        // Micro decays faster than macro beyond the knee.
        let d = 150.0;
        assert!(
            los_probability(Environment::UrbanMicro, d).unwrap()
                < los_probability(Environment::UrbanMacro, d).unwrap()
        );
        // Far field is essentially NLOS.
        assert!(los_probability(Environment::UrbanMacro, 10_000.0).unwrap() < 0.01);
    }

    #[test]
    fn test_micro_los_probability_value() {
        // Closed form at d = 36 m: 0.5 (1 - e^-1) + e^-1.
        let expect = 0.5 * (1.0 - (-1.0_f64).exp()) + (-1.0_f64).exp();
        let got = los_probability(Environment::UrbanMicro, 36.0).unwrap();
        assert!((got - expect).abs() < 1e-12, "expected {expect}, got {got}");
    }

    #[test]
    fn test_los_draw_frequency_tracks_probability() {
        let d = 80.0;
        let p = los_probability(Environment::UrbanMicro, d).unwrap();
        let hits = (0..100_000)
            .filter(|&i| draw_los(RngStream::new(5, 2, i), Environment::UrbanMicro, d).unwrap())
            .count();
        let freq = hits as f64 / 100_000.0;
        assert!(
            (freq - p).abs() < 0.01,
            "LOS frequency {freq} should track p={p}"
        );
    }

    #[test]
    fn test_invalid_arguments_rejected() {
        let s = RngStream::new(0, 0, 0);
        assert!(draw_rayleigh(s, 0, 2).is_err());
        assert!(draw_shadowing(s, -1.0).is_err());
        assert!(draw_shadowing(s, f64::NAN).is_err());
        assert!(los_probability(Environment::UrbanMicro, -5.0).is_err());
    }

    #[test]
    fn test_seed_zero_is_a_valid_stream() {
        let h = draw_rayleigh(RngStream::new(0, 0, 0), 2, 2).unwrap();
        assert!(h.iter().any(|c| c.norm_sqr() > 0.0));
    }
}
