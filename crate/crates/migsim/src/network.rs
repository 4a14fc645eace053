//! Cell deployment geometry and link budgets: hexagonal site lattice,
//! uniform UE drops, serving-cell selection and first-tier interference.
//!
//! Link budgets operate on large-scale quantities only (path loss,
//! shadowing, antenna gains). Serving selection happens before fast fading,
//! and interference is the linear sum of the mean received powers of the
//! serving site's first lattice tier; fast fading is applied downstream
//! when per-carrier efficiency is evaluated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagation::{total_loss, PathLossParams, PathProfile};
use crate::quantities::{dbm_to_watts, NoisePower};

/// Deployment class of a site; bounds its legal transmit power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellType {
    Macro,
    Micro,
    SmallCell,
}

impl CellType {
    /// Legal transmit power window, dBm.
    pub fn tx_power_bounds_dbm(self) -> (f64, f64) {
        match self {
            CellType::Macro => (43.0, 46.0),
            CellType::Micro => (30.0, 43.0),
            CellType::SmallCell => (30.0, 37.0),
        }
    }
}

/// One base-station site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Site {
    pub id: usize,
    pub x_m: f64,
    pub y_m: f64,
    pub cell_type: CellType,
}

/// A deployed lattice over a rectangular area.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkLayout {
    pub sites: Vec<Site>,
    pub isd_m: f64,
    pub area_m: (f64, f64),
    pub bs_height_m: f64,
    pub ue_height_m: f64,
}

/// UE drop position (heights live in the layout).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UePosition {
    pub x_m: f64,
    pub y_m: f64,
}

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

/// Site density of an ideal hexagonal lattice, sites per km^2:
/// `2 / (sqrt(3) isd^2)` with the ISD in km.
pub fn site_density_per_km2(isd_m: f64) -> Result<f64> {
    if !isd_m.is_finite() || isd_m <= 0.0 {
        return Err(Error::invalid(format!("ISD must be > 0 m, got {isd_m}")));
    }
    let isd_km = isd_m / 1000.0;
    Ok(2.0 / (3.0_f64.sqrt() * isd_km * isd_km))
}

/// Builds a triangular lattice with spacing `isd_m`, centered on the area
/// midpoint; sites outside the rectangle (boundary inclusive) are dropped.
///
/// The layout is a pure function of its arguments: site ids follow
/// bottom-up, left-to-right scan order.
pub fn build_hex_layout(
    area_m: (f64, f64),
    isd_m: f64,
    cell_type: CellType,
    bs_height_m: f64,
    ue_height_m: f64,
) -> Result<NetworkLayout> {
    let (w, h) = area_m;
    if !w.is_finite() || w <= 0.0 || !h.is_finite() || h <= 0.0 {
        return Err(Error::invalid(format!(
            "area must be positive, got {w} x {h} m"
        )));
    }
    if !isd_m.is_finite() || isd_m <= 0.0 {
        return Err(Error::invalid(format!("ISD must be > 0 m, got {isd_m}")));
    }
    if bs_height_m <= 0.0 || ue_height_m < 0.0 || bs_height_m <= ue_height_m {
        return Err(Error::invalid(format!(
            "heights must satisfy bs > ue >= 0, got bs={bs_height_m}, ue={ue_height_m}"
        )));
    }
    let eps = 1e-9 * isd_m;
    let (cx, cy) = (w / 2.0, h / 2.0);
    let row_step = isd_m * 3.0_f64.sqrt() / 2.0;
    let mut sites = Vec::new();
    let j_min = ((-cy) / row_step).floor() as i64 - 1;
    let j_max = ((h - cy) / row_step).ceil() as i64 + 1;
    for j in j_min..=j_max {
        let y = cy + j as f64 * row_step;
        if !(-eps..=h + eps).contains(&y) {
            continue;
        }
        let offset = if j.rem_euclid(2) == 1 { 0.5 } else { 0.0 };
        let i_min = ((-cx) / isd_m - offset).floor() as i64 - 1;
        let i_max = ((w - cx) / isd_m - offset).ceil() as i64 + 1;
        for i in i_min..=i_max {
            let x = cx + (i as f64 + offset) * isd_m;
            if !(-eps..=w + eps).contains(&x) {
                continue;
            }
            sites.push(Site {
                id: sites.len(),
                x_m: x,
                y_m: y,
                cell_type,
            });
        }
    }
    if sites.is_empty() {
        return Err(Error::invalid(
            "area is too small to hold a single site at this ISD",
        ));
    }
    Ok(NetworkLayout {
        sites,
        isd_m,
        area_m,
        bs_height_m,
        ue_height_m,
    })
}

impl NetworkLayout {
    /// 3D distance from a site to a UE, floored at `min_m` so downstream
    /// path-loss models never see a sub-reference distance.
    pub fn distance_3d_m(&self, site: &Site, ue: UePosition, min_m: f64) -> f64 {
        let dx = site.x_m - ue.x_m;
        let dy = site.y_m - ue.y_m;
        let dz = self.bs_height_m - self.ue_height_m;
        (dx * dx + dy * dy + dz * dz).sqrt().max(min_m)
    }

    /// Ids of the first lattice tier around `site_id`: every site one ISD
    /// away (six for interior sites, fewer at the area edge).
    pub fn first_tier(&self, site_id: usize) -> Result<Vec<usize>> {
        let site = self
            .sites
            .get(site_id)
            .ok_or_else(|| Error::invalid(format!("no site with id {site_id}")))?;
        let tol = 1e-6 * self.isd_m;
        Ok(self
            .sites
            .iter()
            .filter(|s| {
                s.id != site_id && {
                    let d = ((s.x_m - site.x_m).powi(2) + (s.y_m - site.y_m).powi(2)).sqrt();
                    (d - self.isd_m).abs() <= tol
                }
            })
            .map(|s| s.id)
            .collect())
    }

    /// Layout as a comma-separated table, one line per site.
    pub fn to_table(&self) -> String {
        let mut out = String::from("site_id,x_m,y_m,cell_type\n");
        for s in &self.sites {
            let kind = match s.cell_type {
                CellType::Macro => "macro",
                CellType::Micro => "micro",
                CellType::SmallCell => "small-cell",
            };
            out.push_str(&format!("{},{:.3},{:.3},{}\n", s.id, s.x_m, s.y_m, kind));
        }
        out
    }
}

/// Drops `count_per_cell * n_sites` UEs uniformly over the layout area.
/// Each UE position is a pure function of `(seed, drop, ue_index)`.
pub fn drop_ues(
    layout: &NetworkLayout,
    count_per_cell: usize,
    scenario_seed: u64,
    drop_index: u64,
) -> Result<Vec<UePosition>> {
    use crate::channel::{RngStream, LANE_UE_POSITION};
    use rand::Rng;
    if count_per_cell == 0 {
        return Err(Error::invalid("count_per_cell must be >= 1"));
    }
    let total = count_per_cell * layout.sites.len();
    let (w, h) = layout.area_m;
    Ok((0..total)
        .map(|ue| {
            let mut rng =
                RngStream::new(scenario_seed, drop_index, ue as u64).rng(LANE_UE_POSITION);
            let x: f64 = rng.gen::<f64>() * w;
            let y: f64 = rng.gen::<f64>() * h;
            UePosition { x_m: x, y_m: y }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Link budgets
// ---------------------------------------------------------------------------

/// Radio parameters of the carrier a budget is computed for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioBand {
    pub frequency_hz: f64,
    pub bandwidth_hz: f64,
    /// Per-carrier transmit power of every site, dBm.
    pub tx_power_dbm: f64,
}

/// Deterministic off-grid interferer for SIR stress cases: a co-channel
/// transmitter at a fixed distance, LOS, no shadowing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointInterferer {
    pub distance_m: f64,
    pub tx_power_dbm: f64,
}

/// Gains and environment knobs applied on top of raw path loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkOptions {
    /// Antenna/beam gain on the serving link, dB.
    pub serving_gain_db: f64,
    /// Antenna/beam gain toward this UE on interfering links, dB (0 for
    /// narrow beams that miss it).
    pub interferer_gain_db: f64,
    pub rain_rate_mm_h: f64,
    /// Receiver-side implementation margin, dB, applied to every link.
    pub implementation_loss_db: f64,
    pub controlled_interferer: Option<PointInterferer>,
}

impl Default for LinkOptions {
    fn default() -> Self {
        Self {
            serving_gain_db: 0.0,
            interferer_gain_db: 0.0,
            rain_rate_mm_h: 0.0,
            implementation_loss_db: 0.0,
            controlled_interferer: None,
        }
    }
}

/// Large-scale link budget of one UE on one carrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub serving_site: usize,
    pub serving_distance_m: f64,
    pub rx_dbm: f64,
    pub noise_dbm: f64,
    /// Aggregate interference, W; exactly 0 when nothing interferes.
    pub interference_w: f64,
    pub snr_db: f64,
    pub sinr_db: f64,
}

fn check_states(layout: &NetworkLayout, los: &[bool], shadowing_db: &[f64]) -> Result<()> {
    if los.len() != layout.sites.len() || shadowing_db.len() != layout.sites.len() {
        return Err(Error::invalid(format!(
            "per-site channel states must cover all {} sites, got los={}, shadowing={}",
            layout.sites.len(),
            los.len(),
            shadowing_db.len()
        )));
    }
    Ok(())
}

/// Mean received power from one site on one carrier, dBm (no fast fading).
fn mean_rx_dbm(
    layout: &NetworkLayout,
    site: &Site,
    ue: UePosition,
    los: bool,
    shadowing_db: f64,
    band: &RadioBand,
    params: &PathLossParams,
    rain_rate_mm_h: f64,
    gain_db: f64,
    implementation_loss_db: f64,
) -> Result<f64> {
    let d = layout.distance_3d_m(site, ue, params.ref_distance_m);
    let profile = PathProfile {
        distance_m: d,
        frequency_hz: band.frequency_hz,
        los,
        rain_rate_mm_h,
        obstacle: None,
        wall_count: 0,
    };
    let loss = total_loss(&profile, params, shadowing_db)?;
    Ok(band.tx_power_dbm - loss.total_db + gain_db - implementation_loss_db)
}

/// Picks the serving site: strongest mean received power after shadowing,
/// before fast fading; ties go to the lowest site id.
pub fn select_serving(
    ue: UePosition,
    layout: &NetworkLayout,
    los: &[bool],
    shadowing_db: &[f64],
    band: &RadioBand,
    params: &PathLossParams,
    opts: &LinkOptions,
) -> Result<usize> {
    check_states(layout, los, shadowing_db)?;
    let mut best: Option<(usize, f64)> = None;
    for (i, site) in layout.sites.iter().enumerate() {
        // Candidate powers carry no beam gain: a beam pointed after
        // association boosts every candidate the same way, so leaving it
        // out keeps the argmax identical.
        let rx = mean_rx_dbm(
            layout,
            site,
            ue,
            los[i],
            shadowing_db[i],
            band,
            params,
            opts.rain_rate_mm_h,
            0.0,
            opts.implementation_loss_db,
        )?;
        match best {
            Some((_, b)) if rx <= b => {}
            _ => best = Some((i, rx)),
        }
    }
    Ok(best.expect("layout has at least one site").0)
}

/// Link budget for an already-selected serving site: serving received
/// power, first-tier co-channel interference, SNR and SINR.
pub fn budget_for_serving(
    ue: UePosition,
    layout: &NetworkLayout,
    serving: usize,
    los: &[bool],
    shadowing_db: &[f64],
    band: &RadioBand,
    params: &PathLossParams,
    noise: NoisePower,
    opts: &LinkOptions,
) -> Result<LinkBudget> {
    check_states(layout, los, shadowing_db)?;
    let site = layout
        .sites
        .get(serving)
        .ok_or_else(|| Error::invalid(format!("no site with id {serving}")))?;
    let rx_dbm = mean_rx_dbm(
        layout,
        site,
        ue,
        los[serving],
        shadowing_db[serving],
        band,
        params,
        opts.rain_rate_mm_h,
        opts.serving_gain_db,
        opts.implementation_loss_db,
    )?;

    let mut interference_w = 0.0;
    for neighbor in layout.first_tier(serving)? {
        let n_site = &layout.sites[neighbor];
        let i_dbm = mean_rx_dbm(
            layout,
            n_site,
            ue,
            los[neighbor],
            shadowing_db[neighbor],
            band,
            params,
            opts.rain_rate_mm_h,
            opts.interferer_gain_db,
            opts.implementation_loss_db,
        )?;
        interference_w += dbm_to_watts(i_dbm);
    }
    if let Some(pi) = &opts.controlled_interferer {
        // Deterministic source: LOS log-distance, no shadowing.
        let d = pi.distance_m.max(params.ref_distance_m);
        let loss = crate::propagation::log_distance_loss_db(
            band.frequency_hz,
            d,
            params.exponent_los,
            0.0,
            params.ref_distance_m,
        )?;
        interference_w +=
            dbm_to_watts(pi.tx_power_dbm - loss - opts.implementation_loss_db);
    }

    let snr_db = rx_dbm - noise.dbm;
    let sinr_db = if interference_w == 0.0 {
        snr_db
    } else {
        10.0 * (dbm_to_watts(rx_dbm) / (noise.watts + interference_w)).log10()
    };
    Ok(LinkBudget {
        serving_site: serving,
        serving_distance_m: layout.distance_3d_m(site, ue, params.ref_distance_m),
        rx_dbm,
        noise_dbm: noise.dbm,
        interference_w,
        snr_db,
        sinr_db,
    })
}

/// Serving selection plus budget in one step.
#[allow(clippy::too_many_arguments)]
pub fn compute_link_budget(
    ue: UePosition,
    layout: &NetworkLayout,
    los: &[bool],
    shadowing_db: &[f64],
    band: &RadioBand,
    params: &PathLossParams,
    noise: NoisePower,
    opts: &LinkOptions,
) -> Result<LinkBudget> {
    let serving = select_serving(ue, layout, los, shadowing_db, band, params, opts)?;
    budget_for_serving(ue, layout, serving, los, shadowing_db, band, params, noise, opts)
}

// ---------------------------------------------------------------------------
