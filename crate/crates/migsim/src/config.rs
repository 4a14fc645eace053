//! Scenario configuration: schema, validation, presets and the canonical
//! config digest.
//!
//! Configs are TOML with strict key checking: any unknown key fails
//! deserialization, so typos cannot silently fall back to defaults.

use serde::{Deserialize, Serialize};

use crate::channel::Environment;
use crate::error::{Error, Result};
use crate::latency::AccessMode;
use crate::mimo::MimoMode;
use crate::network::{CellType, PointInterferer};
use crate::propagation::PathLossParams;

/// Complete description of one Monte Carlo scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Free-form identifier echoed into every report row.
    pub scenario_id: String,
    pub seed: u64,
    /// Monte Carlo drops (>= 1).
    pub drops: u32,
    /// Fraction of gross throughput consumed by control overhead, [0, 0.3].
    pub overhead: f64,
    pub layout: LayoutConfig,
    pub bands: Vec<BandConfig>,
    pub mimo: MimoConfig,
    pub ca: CaConfig,
    pub ue: UeConfig,
    pub noise: NoiseConfig,
    pub coverage: CoverageConfig,
    /// Refarming plan applied before the first drop.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refarm: Option<RefarmPolicy>,
    /// When set, per-UE latency is sampled and reported.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency_mode: Option<AccessMode>,
    /// Analog beamforming array (mmWave deployments).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beam: Option<BeamConfig>,
    /// Deterministic extra interferer for SIR stress cases.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interferer: Option<PointInterferer>,
    /// Evaluate coverage under both anchored (either-layer) and
    /// standalone (NR-only) composition rules.
    #[serde(default)]
    pub compare_nsa_sa: bool,
    #[serde(default)]
    pub rain_rate_mm_h: f64,
    #[serde(default)]
    pub implementation_loss_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutConfig {
    pub environment: Environment,
    pub cell_type: CellType,
    pub isd_m: f64,
    /// Deployment rectangle, m.
    pub area_m: [f64; 2],
    pub bs_height_m: f64,
    pub ue_height_m: f64,
    /// Per-carrier site transmit power, dBm; bounded by the cell type.
    pub tx_power_dbm: f64,
}

/// Which radio technology a carrier currently serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandRole {
    Lte,
    Nr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandConfig {
    pub frequency_hz: f64,
    pub bandwidth_hz: f64,
    pub role: BandRole,
    /// Path-loss coefficient override; defaults are chosen from the
    /// frequency and the layout environment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pathloss: Option<PathLossParams>,
}

impl BandConfig {
    /// Path-loss coefficients for this band: explicit override, or the
    /// environment preset (mmWave coefficients from 6 GHz up).
    pub fn pathloss_params(&self, env: Environment) -> PathLossParams {
        if let Some(p) = self.pathloss {
            return p;
        }
        if self.frequency_hz >= 6e9 {
            PathLossParams::mmwave_28ghz()
        } else {
            match env {
                Environment::UrbanMacro => PathLossParams::sub6_urban_macro(),
                Environment::UrbanMicro => PathLossParams::sub6_urban_micro(),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MimoConfig {
    pub nt: usize,
    pub nr: usize,
    pub mode: MimoMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaPolicy {
    EqualPower,
    WaterFilling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaConfig {
    pub policy: CaPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UeConfig {
    pub count_per_cell: usize,
    /// Carrier-aggregation capability: carriers a UE can combine.
    pub max_ccs: usize,
    /// Spatial-layer capability.
    pub max_layers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub n0_dbm_hz: f64,
    pub noise_figure_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageConfig {
    /// SINR threshold, dB.
    pub tau_db: f64,
    /// Minimum per-UE throughput, bit/s.
    pub t_min_bps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefarmPolicy {
    /// Keep a sub-1 GHz legacy anchor alive: with this set, a plan that
    /// leaves no LTE bandwidth below 1 GHz is rejected.
    pub guard_rail: bool,
    pub moves: Vec<RefarmMove>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefarmMove {
    /// Center frequency of the LTE band to refarm.
    pub frequency_hz: f64,
    /// Fraction of its bandwidth handed to NR, [0, 1].
    pub fraction_to_nr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    /// Array elements; serving-link gain is 10 log10(n_ant) dB.
    pub n_ant: u32,
    /// Narrow beams miss interfered UEs: interfering sites then
    /// contribute without any beam gain.
    pub narrow: bool,
}

impl BeamConfig {
    pub fn serving_gain_db(&self) -> f64 {
        10.0 * (self.n_ant as f64).log10()
    }

    pub fn interferer_gain_db(&self) -> f64 {
        if self.narrow {
            0.0
        } else {
            self.serving_gain_db()
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing and validation
// ---------------------------------------------------------------------------

impl ScenarioConfig {
    /// Parses and validates a TOML scenario description.
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::Validation(format!("config parse: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Semantic checks beyond what the schema can express. Field bounds
    /// come first; cross-field rules (refarm guard-rail, NSA/SA band roles)
    /// run after.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(msg));
        if self.scenario_id.is_empty() {
            return fail("scenario_id must not be empty".into());
        }
        if self.drops == 0 {
            return fail("drops must be >= 1".into());
        }
        if !(0.0..=0.3).contains(&self.overhead) {
            return fail(format!("overhead must be in [0, 0.3], got {}", self.overhead));
        }
        let l = &self.layout;
        if !(l.isd_m.is_finite() && l.isd_m > 0.0) {
            return fail(format!("layout.isd_m must be > 0, got {}", l.isd_m));
        }
        if l.area_m.iter().any(|&a| !a.is_finite() || a <= 0.0) {
            return fail(format!("layout.area_m must be positive, got {:?}", l.area_m));
        }
        if !(l.bs_height_m > l.ue_height_m && l.ue_height_m >= 0.0) {
            return fail(format!(
                "heights must satisfy bs > ue >= 0, got bs={}, ue={}",
                l.bs_height_m, l.ue_height_m
            ));
        }
        let (p_lo, p_hi) = l.cell_type.tx_power_bounds_dbm();
        if !(p_lo..=p_hi).contains(&l.tx_power_dbm) {
            return fail(format!(
                "tx_power_dbm {} outside the legal window [{p_lo}, {p_hi}] for {:?} sites",
                l.tx_power_dbm, l.cell_type
            ));
        }
        if self.bands.is_empty() {
            return fail("at least one band is required".into());
        }
        for (i, b) in self.bands.iter().enumerate() {
            if !(b.frequency_hz.is_finite() && b.frequency_hz > 0.0) {
                return fail(format!("bands[{i}].frequency_hz must be > 0"));
            }
            if !(b.bandwidth_hz.is_finite() && b.bandwidth_hz > 0.0) {
                return fail(format!("bands[{i}].bandwidth_hz must be > 0"));
            }
            for (j, other) in self.bands.iter().enumerate().take(i) {
                if relative_eq(b.frequency_hz, other.frequency_hz) {
                    return fail(format!(
                        "bands[{i}] and bands[{j}] share center frequency {} Hz",
                        b.frequency_hz
                    ));
                }
            }
        }
        if !(1..=8).contains(&self.mimo.nt) || !(1..=8).contains(&self.mimo.nr) {
            return fail(format!(
                "antenna counts must be in 1..=8, got {}x{}",
                self.mimo.nt, self.mimo.nr
            ));
        }
        if self.ue.count_per_cell == 0 || self.ue.count_per_cell > 1000 {
            return fail(format!(
                "ue.count_per_cell must be in 1..=1000, got {}",
                self.ue.count_per_cell
            ));
        }
        if self.ue.max_ccs == 0 || self.ue.max_layers == 0 {
            return fail("ue.max_ccs and ue.max_layers must be >= 1".into());
        }
        if !(-200.0..=-100.0).contains(&self.noise.n0_dbm_hz) {
            return fail(format!(
                "noise.n0_dbm_hz {} outside the plausible [-200, -100] range",
                self.noise.n0_dbm_hz
            ));
        }
        if !(0.0..=20.0).contains(&self.noise.noise_figure_db) {
            return fail(format!(
                "noise.noise_figure_db must be in [0, 20], got {}",
                self.noise.noise_figure_db
            ));
        }
        if !self.coverage.tau_db.is_finite() {
            return fail("coverage.tau_db must be finite".into());
        }
        if !(self.coverage.t_min_bps.is_finite() && self.coverage.t_min_bps >= 0.0) {
            return fail(format!(
                "coverage.t_min_bps must be >= 0, got {}",
                self.coverage.t_min_bps
            ));
        }
        if !(self.rain_rate_mm_h.is_finite() && self.rain_rate_mm_h >= 0.0) {
            return fail(format!(
                "rain_rate_mm_h must be >= 0, got {}",
                self.rain_rate_mm_h
            ));
        }
        if !(self.implementation_loss_db.is_finite() && self.implementation_loss_db >= 0.0) {
            return fail(format!(
                "implementation_loss_db must be >= 0, got {}",
                self.implementation_loss_db
            ));
        }
        if let Some(beam) = &self.beam {
            if beam.n_ant == 0 {
                return fail("beam.n_ant must be >= 1".into());
            }
        }
        if let Some(i) = &self.interferer {
            if !(i.distance_m.is_finite() && i.distance_m > 0.0) {
                return fail(format!(
                    "interferer.distance_m must be > 0, got {}",
                    i.distance_m
                ));
            }
        }
        if let Some(policy) = &self.refarm {
            for (i, m) in policy.moves.iter().enumerate() {
                if !(0.0..=1.0).contains(&m.fraction_to_nr) {
                    return fail(format!(
                        "refarm.moves[{i}].fraction_to_nr must be in [0, 1], got {}",
                        m.fraction_to_nr
                    ));
                }
            }
            // Surface guard-rail violations at validation time, not mid-run.
            crate::simulation::apply_refarm(policy, &self.bands)?;
        }
        if self.compare_nsa_sa {
            let effective = match &self.refarm {
                Some(p) => crate::simulation::apply_refarm(p, &self.bands)?,
                None => self.bands.clone(),
            };
            let has = |role: BandRole| effective.iter().any(|b| b.role == role);
            if !has(BandRole::Lte) || !has(BandRole::Nr) {
                return fail(
                    "compare_nsa_sa needs both an LTE anchor and an NR band".into(),
                );
            }
        }
        Ok(())
    }

    /// Canonical digest of this config: SHA-256 over its canonical JSON
    /// serialization, hex-encoded. Recomputable from the config echoed in
    /// a run manifest.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

pub(crate) fn relative_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * a.abs().max(b.abs())
}

// ---------------------------------------------------------------------------
// Overrides
// ---------------------------------------------------------------------------

/// Applies dotted-path `key=value` overrides to a TOML config text and
/// re-validates. Paths address nested tables and array indices
/// (`coverage.tau_db`, `bands.1.role`); values are parsed as TOML scalars,
/// falling back to strings.
pub fn apply_overrides(toml_text: &str, overrides: &[String]) -> Result<ScenarioConfig> {
    let mut root: toml::Value =
        toml::from_str(toml_text).map_err(|e| Error::Validation(format!("config parse: {e}")))?;
    for entry in overrides {
        let (path, raw) = entry.split_once('=').ok_or_else(|| {
            Error::Validation(format!("override '{entry}' must look like key=value"))
        })?;
        let value = parse_scalar(raw.trim());
        set_path(&mut root, path.trim(), value)
            .map_err(|msg| Error::Validation(format!("override '{entry}': {msg}")))?;
    }
    let text = toml::to_string(&root).map_err(|e| Error::Validation(e.to_string()))?;
    ScenarioConfig::from_toml(&text)
}

fn parse_scalar(raw: &str) -> toml::Value {
    let probe = format!("v = {raw}");
    match toml::from_str::<toml::Value>(&probe) {
        Ok(toml::Value::Table(mut t)) => t.remove("v").expect("probe key exists"),
        _ => toml::Value::String(raw.to_string()),
    }
}

fn set_path(root: &mut toml::Value, path: &str, value: toml::Value) -> std::result::Result<(), String> {
    let mut cursor = root;
    let segments: Vec<&str> = path.split('.').collect();
    if segments.is_empty() || path.is_empty() {
        return Err("empty key path".into());
    }
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        if let Ok(index) = seg.parse::<usize>() {
            let arr = cursor
                .as_array_mut()
                .ok_or_else(|| format!("'{}' is not an array", segments[..i].join(".")))?;
            let slot = arr
                .get_mut(index)
                .ok_or_else(|| format!("index {index} out of bounds"))?;
            if last {
                *slot = value;
                return Ok(());
            }
            cursor = slot;
        } else {
            let table = cursor
                .as_table_mut()
                .ok_or_else(|| format!("'{}' is not a table", segments[..i].join(".")))?;
            if last {
                table.insert(seg.to_string(), value);
                return Ok(());
            }
            cursor = table
                .entry(seg.to_string())
                .or_insert(toml::Value::Table(Default::default()));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

/// Bundled scenario presets, in stable listing order.
pub const PRESET_IDS: [&str; 4] = ["S1-sub6-mimo", "S2-ca-refarm", "S3-mmwave-28", "S4-nsa-sa"];

/// Raw TOML text of a bundled preset; ids match case-insensitively.
pub fn preset_toml(id: &str) -> Result<&'static str> {
    match id.to_ascii_lowercase().as_str() {
        "s1-sub6-mimo" => Ok(include_str!("../presets/s1-sub6-mimo.toml")),
        "s2-ca-refarm" => Ok(include_str!("../presets/s2-ca-refarm.toml")),
        "s3-mmwave-28" => Ok(include_str!("../presets/s3-mmwave-28.toml")),
        "s4-nsa-sa" => Ok(include_str!("../presets/s4-nsa-sa.toml")),
        _ => Err(Error::InvalidArgument(format!(
            "unknown preset '{id}'; available: {}",
            PRESET_IDS.join(", ")
        ))),
    }
}

/// Parsed and validated bundled preset.
pub fn preset(id: &str) -> Result<ScenarioConfig> {
    ScenarioConfig::from_toml(preset_toml(id)?)
}

// ---------------------------------------------------------------------------
