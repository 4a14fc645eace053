//! Monte Carlo engine: drops, per-UE KPIs, refarming, coverage and CI
//! aggregation.
//!
//! A run is a pure function of its config (seed included). Every random
//! draw inside a drop keys off `(seed, drop, link, lane)`, so drops can
//! execute on any number of threads; results are consumed in drop-index
//! order and aggregates never depend on scheduling.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::aggregation::{equal_power, waterfill_carriers};
use crate::channel::{
    draw_los, draw_rayleigh, draw_shadowing, Environment, RngStream, LANE_BOOTSTRAP,
};
use crate::config::{
    BandConfig, BandRole, CaPolicy, RefarmPolicy, ScenarioConfig, UeConfig,
};
use crate::error::{Error, Result};
use crate::latency::{sample_latency_stack, AccessMode};
use crate::mimo::spectral_efficiency_capped;
use crate::network::{
    budget_for_serving, build_hex_layout, drop_ues, select_serving, LinkBudget, LinkOptions,
    NetworkLayout, RadioBand, UePosition,
};
use crate::propagation::PathLossParams;
use crate::quantities::{dbm_to_watts, noise_power, NoisePower};

/// Stage order used when turning gross cell capacity into a per-UE rate;
/// recorded in report metadata.
pub const THROUGHPUT_PIPELINE: &str = "caps,share,overhead";

/// Spatial-layer ceiling a carrier's role imposes on top of the UE and
/// array limits. Legacy LTE carriers run at most two layers; NR carriers
/// use whatever the array supports. This cap is what refarming trades on.
pub fn role_layer_cap(role: BandRole) -> usize {
    match role {
        BandRole::Lte => 2,
        BandRole::Nr => usize::MAX,
    }
}

/// Caps an offered (carriers, layers) pair by a UE's capability.
pub fn apply_ue_caps(cap: &UeConfig, ccs: usize, layers: usize) -> (usize, usize) {
    (ccs.min(cap.max_ccs), layers.min(cap.max_layers))
}

/// Discounts gross throughput by a control-overhead fraction.
pub fn apply_overhead(gross_bps: f64, overhead: f64) -> Result<f64> {
    if !gross_bps.is_finite() || gross_bps < 0.0 {
        return Err(Error::invalid(format!(
            "gross throughput must be >= 0, got {gross_bps}"
        )));
    }
    if !(0.0..1.0).contains(&overhead) {
        return Err(Error::invalid(format!(
            "overhead must be in [0, 1), got {overhead}"
        )));
    }
    Ok(gross_bps * (1.0 - overhead))
}

// ---------------------------------------------------------------------------
// Refarming
// ---------------------------------------------------------------------------

/// Applies a refarm plan to a band list: each move flips (or splits) an
/// LTE band toward NR by `fraction_to_nr` of its bandwidth. Partial moves
/// leave the LTE remnant in place and insert the NR part right after it.
///
/// With `guard_rail` set, the result must keep a sub-1 GHz coverage layer:
/// either an LTE band below 1 GHz with bandwidth left, or a band below
/// 1 GHz that already served NR before the plan. A plan that converts the
/// only low band wholesale is rejected.
pub fn apply_refarm(policy: &RefarmPolicy, bands: &[BandConfig]) -> Result<Vec<BandConfig>> {
    let mut out = bands.to_vec();
    for (i, mv) in policy.moves.iter().enumerate() {
        if !(0.0..=1.0).contains(&mv.fraction_to_nr) {
            return Err(Error::invalid(format!(
                "refarm move {i}: fraction_to_nr must be in [0, 1], got {}",
                mv.fraction_to_nr
            )));
        }
        let pos = out
            .iter()
            .position(|b| crate::config::relative_eq(b.frequency_hz, mv.frequency_hz))
            .ok_or_else(|| {
                Error::PolicyRejected(format!(
                    "refarm move {i} targets {} Hz, which no band occupies",
                    mv.frequency_hz
                ))
            })?;
        if out[pos].role == BandRole::Nr {
            return Err(Error::PolicyRejected(format!(
                "refarm move {i}: band at {} Hz already serves NR",
                mv.frequency_hz
            )));
        }
        if mv.fraction_to_nr == 0.0 {
            continue;
        }
        if mv.fraction_to_nr >= 1.0 {
            out[pos].role = BandRole::Nr;
        } else {
            let total = out[pos].bandwidth_hz;
            out[pos].bandwidth_hz = total * (1.0 - mv.fraction_to_nr);
            let mut nr_part = out[pos].clone();
            nr_part.bandwidth_hz = total * mv.fraction_to_nr;
            nr_part.role = BandRole::Nr;
            out.insert(pos + 1, nr_part);
        }
    }
    if policy.guard_rail {
        let pre_existing_low_nr = bands
            .iter()
            .any(|b| b.frequency_hz < 1e9 && b.role == BandRole::Nr);
        let low_lte_left = out
            .iter()
            .any(|b| b.frequency_hz < 1e9 && b.role == BandRole::Lte && b.bandwidth_hz > 0.0);
        if !pre_existing_low_nr && !low_lte_left {
            return Err(Error::PolicyRejected(
                "guard rail: the plan leaves no sub-1 GHz coverage layer".into(),
            ));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Coverage
// ---------------------------------------------------------------------------

/// Per-UE results of one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct UeOutcome {
    pub ue_index: usize,
    pub position: UePosition,
    pub serving_site: usize,
    /// Best-carrier large-scale SNR, dB.
    pub snr_db: f64,
    /// Best-carrier large-scale SINR, dB.
    pub sinr_db: f64,
    /// Net rate after layer/CC caps, cell time-share and overhead.
    pub throughput_bps: f64,
    pub covered: bool,
    /// Either-layer coverage verdict (LTE anchor or NR passes); present
    /// only when the run compares anchored against standalone access.
    pub covered_nsa: Option<bool>,
    /// NR-only coverage verdict.
    pub covered_sa: Option<bool>,
    pub latency_ms: Option<f64>,
}

/// Fraction of UEs (percent) whose SINR clears `tau_db` and whose
/// throughput clears `t_min_bps`, recomputed from the raw fields.
pub fn coverage(per_ue: &[UeOutcome], tau_db: f64, t_min_bps: f64) -> Result<f64> {
    if per_ue.is_empty() {
        return Err(Error::invalid("coverage needs at least one UE result"));
    }
    let pass = per_ue
        .iter()
        .filter(|u| u.sinr_db >= tau_db && u.throughput_bps >= t_min_bps)
        .count();
    Ok(100.0 * pass as f64 / per_ue.len() as f64)
}

/// One completed drop.
#[derive(Debug, Clone, PartialEq)]
pub struct DropResult {
    pub drop_index: u64,
    pub ues: Vec<UeOutcome>,
    pub coverage_pct: f64,
    pub coverage_nsa_pct: Option<f64>,
    pub coverage_sa_pct: Option<f64>,
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

/// Sample mean with a normal-approximation 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCi {
    pub mean: f64,
    pub half_width: f64,
}

/// Mean and `1.96 s / sqrt(n)` over at least two samples.
pub fn aggregate_ci(samples: &[f64]) -> Result<MeanCi> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(MeanCi {
        mean,
        half_width: 1.96 * (var / n).sqrt(),
    })
}

/// Quantile with linear interpolation between order statistics
/// (`q` in [0, 1]; `q = 0.5` is the median).
pub fn percentile(samples: &[f64], q: f64) -> Result<f64> {
    let mut scratch = samples.to_vec();
    percentile_mut(&mut scratch, q)
}

/// In-place quantile on a scratch buffer; partially reorders it.
fn percentile_mut(scratch: &mut [f64], q: f64) -> Result<f64> {
    if scratch.is_empty() {
        return Err(Error::invalid("percentile of an empty sample"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("quantile must be in [0, 1], got {q}")));
    }
    let n = scratch.len();
    let pos = q * (n - 1) as f64;
    let k = pos.floor() as usize;
    let frac = pos - k as f64;
    let (_, kth, right) = scratch.select_nth_unstable_by(k, f64::total_cmp);
    let kth = *kth;
    if frac == 0.0 {
        return Ok(kth);
    }
    let next = right
        .iter()
        .copied()
        .min_by(f64::total_cmp)
        .expect("interpolation needs a right neighbor");
    Ok(kth + frac * (next - kth))
}

/// Percentile point estimate with a seeded bootstrap 95% interval
/// (resampling with replacement; interval from the 2.5th and 97.5th
/// percentiles of the resampled statistic). Returns `(value, lo, hi)`.
pub fn bootstrap_percentile_ci(
    samples: &[f64],
    q: f64,
    resamples: usize,
    stream: RngStream,
) -> Result<(f64, f64, f64)> {
    use rand::Rng;
    if resamples == 0 {
        return Err(Error::invalid("bootstrap needs at least one resample"));
    }
    let value = percentile(samples, q)?;
    let n = samples.len();
    let mut rng = stream.rng(LANE_BOOTSTRAP);
    let mut scratch = vec![0.0; n];
    let mut boots = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        for slot in scratch.iter_mut() {
            *slot = samples[rng.gen_range(0..n)];
        }
        boots.push(percentile_mut(&mut scratch, q)?);
    }
    let lo = percentile_mut(&mut boots.clone(), 0.025)?;
    let hi = percentile_mut(&mut boots, 0.975)?;
    Ok((value, lo, hi))
}

/// Fixed-width SINR histogram with explicit out-of-range counters.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrHistogram {
    pub lo_db: f64,
    pub bin_width_db: f64,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

/// Bins samples into `[lo, lo + n_bins * width)`; values outside land in
/// the underflow/overflow counters, so every sample is accounted for.
pub fn sinr_histogram(
    samples: &[f64],
    lo_db: f64,
    bin_width_db: f64,
    n_bins: usize,
) -> Result<SinrHistogram> {
    if !(bin_width_db.is_finite() && bin_width_db > 0.0) || n_bins == 0 {
        return Err(Error::invalid("histogram needs a positive bin width and count"));
    }
    let mut h = SinrHistogram {
        lo_db,
        bin_width_db,
        counts: vec![0; n_bins],
        underflow: 0,
        overflow: 0,
    };
    for &x in samples {
        if x < lo_db {
            h.underflow += 1;
            continue;
        }
        let idx = ((x - lo_db) / bin_width_db).floor() as usize;
        if idx >= n_bins {
            h.overflow += 1;
        } else {
            h.counts[idx] += 1;
        }
    }
    Ok(h)
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct KpiRow {
    pub kpi: String,
    pub value: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub unit: &'static str,
}

/// Aggregated KPIs of one scenario run, plus the metadata needed to
/// reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct KpiReport {
    pub scenario_id: String,
    pub seed: u64,
    pub drops: u32,
    pub version: String,
    pub config_digest: String,
    /// Stage order for per-UE rates; see [`THROUGHPUT_PIPELINE`].
    pub throughput_pipeline: &'static str,
    pub rows: Vec<KpiRow>,
    pub sinr_histogram: SinrHistogram,
}

impl KpiReport {
    /// Looks a row up by KPI name.
    pub fn row(&self, kpi: &str) -> Option<&KpiRow> {
        self.rows.iter().find(|r| r.kpi == kpi)
    }
}

/// Everything a run produces: the layout it ran on, all per-drop results
/// in drop order, and the aggregated report.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub layout: NetworkLayout,
    pub drops: Vec<DropResult>,
    pub report: KpiReport,
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

struct EffBand {
    radio: RadioBand,
    role: BandRole,
    params: PathLossParams,
    noise: NoisePower,
}

struct Plan {
    layout: NetworkLayout,
    bands: Vec<EffBand>,
    opts: LinkOptions,
    env: Environment,
    /// Nominal per-carrier transmit power, W.
    p_nom_w: f64,
    /// Site power budget the CA policy may redistribute, W.
    p_total_w: f64,
}

fn prepare(config: &ScenarioConfig) -> Result<Plan> {
    let effective = match &config.refarm {
        Some(policy) => apply_refarm(policy, &config.bands)?,
        None => config.bands.clone(),
    };
    let l = &config.layout;
    let layout = build_hex_layout(
        (l.area_m[0], l.area_m[1]),
        l.isd_m,
        l.cell_type,
        l.bs_height_m,
        l.ue_height_m,
    )?;
    let bands = effective
        .iter()
        .map(|b| {
            Ok(EffBand {
                radio: RadioBand {
                    frequency_hz: b.frequency_hz,
                    bandwidth_hz: b.bandwidth_hz,
                    tx_power_dbm: l.tx_power_dbm,
                },
                role: b.role,
                params: b.pathloss_params(l.environment),
                noise: noise_power(
                    config.noise.n0_dbm_hz,
                    config.noise.noise_figure_db,
                    b.bandwidth_hz,
                )?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let opts = LinkOptions {
        serving_gain_db: config.beam.map_or(0.0, |b| b.serving_gain_db()),
        interferer_gain_db: config.beam.map_or(0.0, |b| b.interferer_gain_db()),
        rain_rate_mm_h: config.rain_rate_mm_h,
        implementation_loss_db: config.implementation_loss_db,
        controlled_interferer: config.interferer,
    };
    let p_nom_w = dbm_to_watts(l.tx_power_dbm);
    Ok(Plan {
        layout,
        p_nom_w,
        p_total_w: p_nom_w * bands.len() as f64,
        bands,
        opts,
        env: l.environment,
    })
}

fn run_drop(plan: &Plan, config: &ScenarioConfig, drop_index: u64) -> Result<DropResult> {
    let layout = &plan.layout;
    let n_sites = layout.sites.len();
    let n_bands = plan.bands.len();
    let (nt, nr) = (config.mimo.nt, config.mimo.nr);
    let ues = drop_ues(layout, config.ue.count_per_cell, config.seed, drop_index)?;

    // First pass: LOS and shadowing toward every site, then attachment on
    // the primary (first-listed) band. One unit-normal shadowing draw per
    // link is scaled by each band's sigma, so shadowing is fully
    // correlated across bands of the same link.
    let primary = &plan.bands[0];
    let mut los_all = Vec::with_capacity(ues.len());
    let mut z_all = Vec::with_capacity(ues.len());
    let mut serving = Vec::with_capacity(ues.len());
    let mut attached = vec![0usize; n_sites];
    for (u, &ue) in ues.iter().enumerate() {
        let mut los = Vec::with_capacity(n_sites);
        let mut z = Vec::with_capacity(n_sites);
        for (s, site) in layout.sites.iter().enumerate() {
            let stream = RngStream::new(config.seed, drop_index, (u * n_sites + s) as u64);
            let ground = ((site.x_m - ue.x_m).powi(2) + (site.y_m - ue.y_m).powi(2)).sqrt();
            los.push(draw_los(stream, plan.env, ground)?);
            z.push(draw_shadowing(stream, 1.0)?);
        }
        let shadow: Vec<f64> = los
            .iter()
            .zip(&z)
            .map(|(&l, &zi)| zi * primary.params.sigma_db(l))
            .collect();
        let sv = select_serving(
            ue,
            layout,
            &los,
            &shadow,
            &primary.radio,
            &primary.params,
            &plan.opts,
        )?;
        attached[sv] += 1;
        serving.push(sv);
        los_all.push(los);
        z_all.push(z);
    }

    // Second pass: per-band budgets and fading, carrier selection, power
    // allocation, then caps -> time share -> overhead.
    let (eff_ccs, eff_layers) = apply_ue_caps(&config.ue, n_bands, nt.min(nr));
    let mut outcomes = Vec::with_capacity(ues.len());
    for (u, &ue) in ues.iter().enumerate() {
        let mut budgets: Vec<LinkBudget> = Vec::with_capacity(n_bands);
        let mut fading = Vec::with_capacity(n_bands);
        let mut sinr_lin = Vec::with_capacity(n_bands);
        let mut gains = Vec::with_capacity(n_bands);
        for (b, band) in plan.bands.iter().enumerate() {
            let shadow: Vec<f64> = los_all[u]
                .iter()
                .zip(&z_all[u])
                .map(|(&l, &zi)| zi * band.params.sigma_db(l))
                .collect();
            let budget = budget_for_serving(
                ue,
                layout,
                serving[u],
                &los_all[u],
                &shadow,
                &band.radio,
                &band.params,
                band.noise,
                &plan.opts,
            )?;
            let h = draw_rayleigh(
                RngStream::new(config.seed, drop_index, (u * n_bands + b) as u64),
                nt,
                nr,
            )?;
            let lin = dbm_to_watts(budget.rx_dbm) / (band.noise.watts + budget.interference_w);
            let fading_mean = h.norm_squared() / (nt * nr) as f64;
            gains.push(lin * fading_mean / plan.p_nom_w);
            sinr_lin.push(lin);
            fading.push(h);
            budgets.push(budget);
        }

        let mut order: Vec<usize> = (0..n_bands).collect();
        order.sort_by(|&a, &b| {
            gains[b]
                .partial_cmp(&gains[a])
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        let selected = &order[..eff_ccs.min(n_bands)];
        let sel_gains: Vec<f64> = selected.iter().map(|&b| gains[b]).collect();
        let alloc = match config.ca.policy {
            CaPolicy::EqualPower => equal_power(selected.len(), plan.p_total_w)?,
            CaPolicy::WaterFilling => waterfill_carriers(&sel_gains, plan.p_total_w)?,
        };

        let mut t_band = vec![0.0; n_bands];
        for (k, &b) in selected.iter().enumerate() {
            let p = alloc.powers[k];
            if p <= 0.0 {
                continue;
            }
            let rho = (p / plan.p_nom_w) * sinr_lin[b] / nt as f64;
            let layers = eff_layers.min(role_layer_cap(plan.bands[b].role));
            let eta = spectral_efficiency_capped(&fading[b], rho, config.mimo.mode, layers)?;
            t_band[b] = plan.bands[b].radio.bandwidth_hz * eta;
        }
        let scale = 1.0 / attached[serving[u]] as f64;
        let throughput_bps =
            apply_overhead(t_band.iter().sum::<f64>() * scale, config.overhead)?;

        let best = |keep: &dyn Fn(usize) -> bool, f: &dyn Fn(&LinkBudget) -> f64| {
            (0..n_bands)
                .filter(|&b| keep(b))
                .map(|b| f(&budgets[b]))
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let snr_db = best(&|_| true, &|b| b.snr_db);
        let sinr_db = best(&|_| true, &|b| b.sinr_db);
        let covered =
            sinr_db >= config.coverage.tau_db && throughput_bps >= config.coverage.t_min_bps;

        // Anchored vs standalone composition on the same transmission:
        // role throughputs are partial sums of the same per-carrier rates,
        // so an NR-only pass always implies an either-layer pass.
        let (covered_nsa, covered_sa) = if config.compare_nsa_sa {
            let role_pass = |role: BandRole| {
                let t: f64 = (0..n_bands)
                    .filter(|&b| plan.bands[b].role == role)
                    .map(|b| t_band[b])
                    .sum::<f64>()
                    * scale
                    * (1.0 - config.overhead);
                let s = best(&|b| plan.bands[b].role == role, &|b| b.sinr_db);
                s >= config.coverage.tau_db && t >= config.coverage.t_min_bps
            };
            let sa = role_pass(BandRole::Nr);
            let nsa = sa || role_pass(BandRole::Lte);
            (Some(nsa), Some(sa))
        } else {
            (None, None)
        };

        let latency_ms = match config.latency_mode {
            None => None,
            Some(mode) => {
                let hop = match mode {
                    // D2D runs device-to-device; the cell grid plays no part.
                    AccessMode::DeviceToDevice => None,
                    _ => Some(budgets[0].serving_distance_m),
                };
                let stack =
                    sample_latency_stack(RngStream::new(config.seed, drop_index, u as u64), mode, hop)?;
                Some(stack.total_ms)
            }
        };

        outcomes.push(UeOutcome {
            ue_index: u,
            position: ue,
            serving_site: serving[u],
            snr_db,
            sinr_db,
            throughput_bps,
            covered,
            covered_nsa,
            covered_sa,
            latency_ms,
        });
    }

    let coverage_pct = coverage(&outcomes, config.coverage.tau_db, config.coverage.t_min_bps)?;
    let pct_of = |pick: &dyn Fn(&UeOutcome) -> Option<bool>| {
        let n = outcomes.len() as f64;
        outcomes
            .first()
            .and_then(pick)
            .map(|_| 100.0 * outcomes.iter().filter(|u| pick(u) == Some(true)).count() as f64 / n)
    };
    Ok(DropResult {
        drop_index,
        coverage_pct,
        coverage_nsa_pct: pct_of(&|u| u.covered_nsa),
        coverage_sa_pct: pct_of(&|u| u.covered_sa),
        ues: outcomes,
    })
}

/// Runs every drop of a scenario and aggregates the KPI report.
///
/// `parallelism` is the worker-thread degree: 1 runs serially, larger
/// values use a dedicated thread pool, 0 uses the process-wide default.
/// The output is byte-for-byte identical for every choice.
pub fn run_scenario(config: &ScenarioConfig, parallelism: usize) -> Result<SimOutput> {
    config.validate()?;
    let plan = prepare(config)?;
    let run = |d: u32| run_drop(&plan, config, d as u64);
    let drops: Vec<DropResult> = if parallelism == 1 {
        (0..config.drops).map(run).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallelism)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
        pool.install(|| (0..config.drops).into_par_iter().map(run).collect::<Result<_>>())?
    };
    let report = aggregate(config, &drops)?;
    Ok(SimOutput {
        layout: plan.layout,
        drops,
        report,
    })
}

/// Bootstrap stream slots, keyed off a drop index no real drop uses.
const BOOT_SLOT_MEDIAN_THPT: u64 = 0;
const BOOT_SLOT_P5_THPT: u64 = 1;
const BOOT_SLOT_LATENCY: u64 = 2;
const BOOT_RESAMPLES: usize = 1000;

fn aggregate(config: &ScenarioConfig, drops: &[DropResult]) -> Result<KpiReport> {
    if drops.is_empty() {
        return Err(Error::Internal("no drops to aggregate".into()));
    }
    let mean_row = |kpi: &str, unit: &'static str, samples: &[f64]| -> Result<KpiRow> {
        let (value, hw) = if samples.len() == 1 {
            (samples[0], 0.0)
        } else {
            let ci = aggregate_ci(samples)?;
            (ci.mean, ci.half_width)
        };
        Ok(KpiRow {
            kpi: kpi.into(),
            value,
            ci95_low: value - hw,
            ci95_high: value + hw,
            unit,
        })
    };
    let boot_row = |kpi: &str, unit: &'static str, samples: &[f64], q: f64, slot: u64| -> Result<KpiRow> {
        let stream = RngStream::new(config.seed, u64::MAX, slot);
        let (value, lo, hi) = bootstrap_percentile_ci(samples, q, BOOT_RESAMPLES, stream)?;
        Ok(KpiRow {
            kpi: kpi.into(),
            value,
            ci95_low: lo,
            ci95_high: hi,
            unit,
        })
    };

    let coverage_samples: Vec<f64> = drops.iter().map(|d| d.coverage_pct).collect();
    let thpt: Vec<f64> = drops
        .iter()
        .flat_map(|d| d.ues.iter().map(|u| u.throughput_bps))
        .collect();
    let sinr: Vec<f64> = drops
        .iter()
        .flat_map(|d| d.ues.iter().map(|u| u.sinr_db))
        .collect();

    let mut rows = vec![
        mean_row("coverage_pct", "percent", &coverage_samples)?,
        boot_row("median_throughput_bps", "bps", &thpt, 0.5, BOOT_SLOT_MEDIAN_THPT)?,
        boot_row("p5_throughput_bps", "bps", &thpt, 0.05, BOOT_SLOT_P5_THPT)?,
        mean_row("mean_sinr_db", "dB", &sinr)?,
    ];
    if config.compare_nsa_sa {
        let nsa: Vec<f64> = drops.iter().filter_map(|d| d.coverage_nsa_pct).collect();
        let sa: Vec<f64> = drops.iter().filter_map(|d| d.coverage_sa_pct).collect();
        rows.push(mean_row("coverage_nsa_pct", "percent", &nsa)?);
        rows.push(mean_row("coverage_sa_pct", "percent", &sa)?);
    }
    if config.latency_mode.is_some() {
        let lat: Vec<f64> = drops
            .iter()
            .flat_map(|d| d.ues.iter().filter_map(|u| u.latency_ms))
            .collect();
        rows.push(boot_row("median_latency_ms", "ms", &lat, 0.5, BOOT_SLOT_LATENCY)?);
    }

    Ok(KpiReport {
        scenario_id: config.scenario_id.clone(),
        seed: config.seed,
        drops: config.drops,
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_digest: config.digest(),
        throughput_pipeline: THROUGHPUT_PIPELINE,
        rows,
        sinr_histogram: sinr_histogram(&sinr, -20.0, 1.0, 70)?,
    })
}

// ---------------------------------------------------------------------------
