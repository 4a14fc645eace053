//! End-to-end latency stacks for the three access modes.
//!
//! A latency sample is the sum of four components: processing, queueing,
//! MAC/scheduling and propagation. Components are drawn uniformly from
//! per-mode ranges; the deterministic parts are the transceiver turnaround
//! `1/f` and the propagation time `d/c`.

use serde::{Deserialize, Serialize};

use crate::channel::{RngStream, LANE_LATENCY};
use crate::error::{Error, Result};
use crate::quantities::SPEED_OF_LIGHT_M_S;

/// How the two endpoints reach each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AccessMode {
    /// Direct device-to-device sidelink.
    #[serde(alias = "d2d")]
    DeviceToDevice,
    /// Machine-type link, longer scheduling path than D2D.
    #[serde(alias = "m2m")]
    MachineToMachine,
    /// Conventional uplink-downlink relay through a base station.
    #[serde(alias = "bs")]
    BsAnchored,
}

/// Closed interval for one latency component, ms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentRange {
    pub min_ms: f64,
    pub max_ms: f64,
}

impl ComponentRange {
    pub fn contains(&self, x: f64) -> bool {
        self.min_ms <= x && x <= self.max_ms
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.min_ms + self.max_ms)
    }
}

/// Per-component ranges of one access mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatencyRanges {
    pub processing: ComponentRange,
    pub queueing: ComponentRange,
    pub mac: ComponentRange,
    pub propagation: ComponentRange,
}

/// Default component ranges per access mode, ms.
pub fn component_ranges(mode: AccessMode) -> LatencyRanges {
    let r = |min_ms: f64, max_ms: f64| ComponentRange { min_ms, max_ms };
    match mode {
        AccessMode::DeviceToDevice => LatencyRanges {
            processing: r(0.2, 0.4),
            queueing: r(0.1, 0.3),
            mac: r(0.4, 0.8),
            propagation: r(0.01, 0.05),
        },
        AccessMode::MachineToMachine => LatencyRanges {
            processing: r(0.3, 0.6),
            queueing: r(0.3, 0.8),
            mac: r(1.0, 1.5),
            propagation: r(0.05, 0.1),
        },
        AccessMode::BsAnchored => LatencyRanges {
            processing: r(0.5, 1.0),
            queueing: r(1.0, 3.0),
            mac: r(2.0, 4.0),
            propagation: r(0.05, 0.2),
        },
    }
}

// ---------------------------------------------------------------------------
// Closed-form approximations
// ---------------------------------------------------------------------------

fn check_tx_rx(tx_rx_hz: f64) -> Result<()> {
    if !tx_rx_hz.is_finite() || tx_rx_hz <= 0.0 {
        return Err(Error::invalid(format!(
            "turnaround frequency must be > 0 Hz, got {tx_rx_hz}"
        )));
    }
    Ok(())
}

/// First-order D2D latency: one transceiver turnaround, `1/f` in ms.
pub fn d2d_latency_ms(tx_rx_hz: f64) -> Result<f64> {
    check_tx_rx(tx_rx_hz)?;
    Ok(1000.0 / tx_rx_hz)
}

/// First-order M2M latency: propagation plus one turnaround,
/// `d/c + 1/f` in ms.
pub fn m2m_latency_ms(distance_m: f64, tx_rx_hz: f64) -> Result<f64> {
    check_tx_rx(tx_rx_hz)?;
    if !distance_m.is_finite() || distance_m < 0.0 {
        return Err(Error::invalid(format!(
            "distance must be >= 0 m, got {distance_m}"
        )));
    }
    Ok(distance_m / SPEED_OF_LIGHT_M_S * 1000.0 + 1000.0 / tx_rx_hz)
}

// ---------------------------------------------------------------------------
// Sampled stacks
// ---------------------------------------------------------------------------

/// One sampled end-to-end latency, ms per component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatencyStack {
    pub processing_ms: f64,
    pub queueing_ms: f64,
    pub mac_ms: f64,
    pub propagation_ms: f64,
    pub total_ms: f64,
}

/// Draws one latency stack for `mode`. Components are uniform over their
/// ranges; when `hop_distance_m` is given the propagation component is the
/// deterministic `d/c` instead of a draw.
pub fn sample_latency_stack(
    stream: RngStream,
    mode: AccessMode,
    hop_distance_m: Option<f64>,
) -> Result<LatencyStack> {
    if let Some(d) = hop_distance_m {
        if !d.is_finite() || d < 0.0 {
            return Err(Error::invalid(format!(
                "hop distance must be >= 0 m, got {d}"
            )));
        }
    }
    let ranges = component_ranges(mode);
    let mut rng = stream.rng(LANE_LATENCY);
    let mut draw = |r: &ComponentRange| -> f64 {
        use rand::Rng;
        let u: f64 = rng.gen();
        r.min_ms + u * (r.max_ms - r.min_ms)
    };
    let processing_ms = draw(&ranges.processing);
    let queueing_ms = draw(&ranges.queueing);
    let mac_ms = draw(&ranges.mac);
    let propagation_ms = match hop_distance_m {
        Some(d) => d / SPEED_OF_LIGHT_M_S * 1000.0,
        None => draw(&ranges.propagation),
    };
    Ok(LatencyStack {
        processing_ms,
        queueing_ms,
        mac_ms,
        propagation_ms,
        total_ms: processing_ms + queueing_ms + mac_ms + propagation_ms,
    })
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_d2d_turnaround_at_1khz_is_one_ms() {
        assert_eq!(d2d_latency_ms(1000.0).unwrap(), 1.0);
        assert_eq!(d2d_latency_ms(2000.0).unwrap(), 0.5);
    }

    #[test]
    fn test_m2m_adds_propagation() {
        // 3 km adds ~0.01 ms on top of the 1 ms turnaround.
        let got = m2m_latency_ms(3000.0, 1000.0).unwrap();
        assert!((got - 1.010_006_9).abs() < 1e-6, "got {got}");
        // 300 km of backhaul-scale distance pushes it to ~2 ms.
        let far = m2m_latency_ms(300_000.0, 1000.0).unwrap();
        assert!((far - 2.000_69).abs() < 1e-3, "got {far}");
    }

    #[test]
    fn test_m2m_never_beats_d2d() {
        for i in 0..100 {
            let d = i as f64 * 500.0;
            assert!(m2m_latency_ms(d, 1000.0).unwrap() >= d2d_latency_ms(1000.0).unwrap());
        }
    }

    #[test]
    fn test_sampled_components_stay_in_range() {
        for mode in [
            AccessMode::DeviceToDevice,
            AccessMode::MachineToMachine,
            AccessMode::BsAnchored,
        ] {
            let ranges = component_ranges(mode);
            for i in 0..2_000 {
                let s = sample_latency_stack(RngStream::new(1, 0, i), mode, None).unwrap();
                assert!(ranges.processing.contains(s.processing_ms));
                assert!(ranges.queueing.contains(s.queueing_ms));
                assert!(ranges.mac.contains(s.mac_ms));
                assert!(ranges.propagation.contains(s.propagation_ms));
                let sum = s.processing_ms + s.queueing_ms + s.mac_ms + s.propagation_ms;
                assert!((s.total_ms - sum).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn test_d2d_total_bounds() {
        // Range sums: worst case 0.71 to 1.55 ms.
        for i in 0..5_000 {
            let s = sample_latency_stack(
                RngStream::new(3, 0, i),
                AccessMode::DeviceToDevice,
                None,
            )
            .unwrap();
            assert!(
                (0.71..=1.55).contains(&s.total_ms),
                "D2D total out of bounds: {}",
                s.total_ms
            );
        }
    }

    #[test]
    fn test_sample_mean_near_midpoint_sum() {
        // Midpoint sums: 1.13 (D2D), 2.325 (M2M), 5.875 (BS).
        let cases = [
            (AccessMode::DeviceToDevice, 1.13),
            (AccessMode::MachineToMachine, 2.325),
            (AccessMode::BsAnchored, 5.875),
        ];
        for (mode, expect) in cases {
            let n = 20_000;
            let mean: f64 = (0..n)
                .map(|i| {
                    sample_latency_stack(RngStream::new(7, 1, i), mode, None)
                        .unwrap()
                        .total_ms
                })
                .sum::<f64>()
                / n as f64;
            assert!(
                (mean - expect).abs() < 0.02,
                "{mode:?}: mean should be ~{expect} ms, got {mean}"
            );
        }
    }

    #[test]
    fn test_distance_overrides_propagation_draw() {
        let s = sample_latency_stack(
            RngStream::new(2, 0, 5),
            AccessMode::BsAnchored,
            Some(299_792.458),
        )
        .unwrap();
        // Exactly 1 us per ~300 m: 299792.458 m is 1 ms.
        assert!((s.propagation_ms - 1.0).abs() < 1e-12);
        // Other components unaffected by the override.
        let drawn = sample_latency_stack(RngStream::new(2, 0, 5), AccessMode::BsAnchored, None)
            .unwrap();
        assert_eq!(s.processing_ms, drawn.processing_ms);
        assert_eq!(s.queueing_ms, drawn.queueing_ms);
        assert_eq!(s.mac_ms, drawn.mac_ms);
    }

    #[test]
    fn test_same_stream_same_stack() {
        let a = sample_latency_stack(RngStream::new(9, 4, 2), AccessMode::MachineToMachine, None)
            .unwrap();
        let b = sample_latency_stack(RngStream::new(9, 4, 2), AccessMode::MachineToMachine, None)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn test_invalid_inputs_rejected() {
        assert!(d2d_latency_ms(0.0).is_err());
        assert!(m2m_latency_ms(-1.0, 1000.0).is_err());
        assert!(
            sample_latency_stack(RngStream::new(0, 0, 0), AccessMode::BsAnchored, Some(-2.0))
                .is_err()
        );
    }
}
