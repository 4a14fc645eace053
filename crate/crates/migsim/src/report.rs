//! Report persistence: KPI table, SINR histogram, layout table, optional
//! per-UE samples, and the run manifest.
//!
//! Every file is written atomically (temp file in the target directory,
//! then rename), so an interrupted run never leaves a partial table. All
//! serialization is deterministic: re-emitting the same report produces
//! identical bytes.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::simulation::{KpiReport, SimOutput};

/// Environment variable holding the default output directory.
pub const OUTPUT_DIR_ENV: &str = "MIGSIM_OUT";

/// Output directory used when none is given: `$MIGSIM_OUT`, falling back
/// to `./migsim-out`.
pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("migsim-out"))
}

/// Paths of everything one run wrote.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputBundle {
    pub kpi_table: PathBuf,
    pub manifest: PathBuf,
    pub sinr_histogram: PathBuf,
    pub layout: PathBuf,
    pub per_ue_samples: Option<PathBuf>,
}

/// Reproducibility record persisted next to the KPI table. The digest is
/// recomputable from the echoed config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub scenario_id: String,
    pub seed: u64,
    pub drops: u32,
    pub config_digest: String,
    /// Stage order for per-UE rates, see `simulation::THROUGHPUT_PIPELINE`.
    pub throughput_pipeline: String,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub config: ScenarioConfig,
}

/// Milliseconds since the Unix epoch; manifest timestamp source.
pub fn now_unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .unwrap_or_default()
        .as_millis() as u64
}

/// Formats with a fixed number of significant digits, using plain decimal
/// notation (trailing zeros kept, so output width is stable).
pub fn format_sig(x: f64, digits: u32) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let d = digits as i32;
    let mut exp = x.abs().log10().floor() as i32;
    let mut scale = 10f64.powi(d - 1 - exp);
    let mut rounded = (x * scale).round() / scale;
    // Rounding can carry into the next decade (0.9999... -> 1.0).
    let new_exp = rounded.abs().log10().floor() as i32;
    if new_exp != exp {
        exp = new_exp;
        scale = 10f64.powi(d - 1 - exp);
        rounded = (x * scale).round() / scale;
    }
    let decimals = (d - 1 - exp).max(0) as usize;
    format!("{rounded:.decimals$}")
}

/// KPI table serialization: one header line, then one line per KPI, with
/// the scenario id last so tables from different scenarios can be
/// concatenated.
pub fn kpi_csv(report: &KpiReport) -> String {
    let mut out = String::from("kpi,value,ci95_low,ci95_high,unit,scenario_id\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.kpi,
            format_sig(r.value, 9),
            format_sig(r.ci95_low, 9),
            format_sig(r.ci95_high, 9),
            r.unit,
            report.scenario_id
        ));
    }
    out
}

/// Histogram serialization; the open-ended tails get explicit rows so
/// every sample in the run is accounted for.
pub fn histogram_csv(report: &KpiReport) -> String {
    let h = &report.sinr_histogram;
    let mut out = String::from("bin_low_db,bin_high_db,count\n");
    let hi_edge = h.lo_db + h.bin_width_db * h.counts.len() as f64;
    out.push_str(&format!("-inf,{},{}\n", format_sig(h.lo_db, 9), h.underflow));
    for (i, c) in h.counts.iter().enumerate() {
        let lo = h.lo_db + h.bin_width_db * i as f64;
        let hi = lo + h.bin_width_db;
        out.push_str(&format!("{},{},{c}\n", format_sig(lo, 9), format_sig(hi, 9)));
    }
    out.push_str(&format!("{},+inf,{}\n", format_sig(hi_edge, 9), h.overflow));
    out
}

/// Per-UE sample table; optional cells (latency, NSA/SA verdicts) stay
/// empty when the run did not produce them.
pub fn per_ue_csv(sim: &SimOutput) -> String {
    let mut out = String::from(
        "drop,ue,x_m,y_m,serving_site,snr_db,sinr_db,throughput_bps,covered,covered_nsa,covered_sa,latency_ms\n",
    );
    let opt_bool = |b: Option<bool>| b.map_or(String::new(), |v| v.to_string());
    for d in &sim.drops {
        for u in &d.ues {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                d.drop_index,
                u.ue_index,
                format_sig(u.position.x_m, 9),
                format_sig(u.position.y_m, 9),
                u.serving_site,
                format_sig(u.snr_db, 9),
                format_sig(u.sinr_db, 9),
                format_sig(u.throughput_bps, 9),
                u.covered,
                opt_bool(u.covered_nsa),
                opt_bool(u.covered_sa),
                u.latency_ms.map_or(String::new(), |l| format_sig(l, 9)),
            ));
        }
    }
    out
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `bytes` to `dir/name` atomically: the content lands in a
/// temporary file in the same directory and is renamed into place, so
/// readers never observe a partial file.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, &target).map_err(io_err(&target))?;
    Ok(target)
}

/// Persists a completed run: KPI table, manifest, histogram, layout and
/// (optionally) per-UE samples.
pub fn emit_report(
    sim: &SimOutput,
    config: &ScenarioConfig,
    dir: &Path,
    include_per_ue: bool,
    started_unix_ms: u64,
) -> Result<OutputBundle> {
    let report: &KpiReport = &sim.report;
    let manifest = RunManifest {
        tool_version: report.version.clone(),
        scenario_id: report.scenario_id.clone(),
        seed: report.seed,
        drops: report.drops,
        config_digest: report.config_digest.clone(),
        throughput_pipeline: report.throughput_pipeline.to_string(),
        started_unix_ms,
        finished_unix_ms: now_unix_ms(),
        config: config.clone(),
    };
    let manifest_json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Internal(format!("manifest serialization: {e}")))?;

    let kpi_table = write_atomic(dir, "kpi.csv", kpi_csv(report).as_bytes())?;
    let manifest_path = write_atomic(dir, "manifest.json", manifest_json.as_bytes())?;
    let histogram = write_atomic(dir, "sinr_histogram.csv", histogram_csv(report).as_bytes())?;
    let layout = write_atomic(dir, "layout.csv", sim.layout.to_table().as_bytes())?;
    let per_ue = if include_per_ue {
        Some(write_atomic(dir, "per_ue.csv", per_ue_csv(sim).as_bytes())?)
    } else {
        None
    };
    Ok(OutputBundle {
        kpi_table,
        manifest: manifest_path,
        sinr_histogram: histogram,
        layout,
        per_ue_samples: per_ue,
    })
}

// ---------------------------------------------------------------------------
