//! End-to-end check of `delta <= dim_B` and the shell-by-shell chain behind it.

use std::collections::BTreeMap;

use crate::geometry::radial_gap_from_distance;
use crate::group::{
    choose_basepoint, enumerate_orbit, find_loxodromic, packing_radius, shell_index, GroupElement,
    GroupPresentation, OrbitSet, PackingRadius,
};
use crate::limitset::{
    box_dimension_estimate, grid_volume, hyperbolic_ball_volume, lemma_one_check, sample_limit_set,
    BoxDimensionEstimate, LemmaOneReport, LimitSample, MAX_SCALE,
};
use crate::poincare::{exponent_estimate, pairwise_sum, ExponentEstimate, ExponentMethod, MIN_ESTIMATE_DEPTH};
use crate::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 0.1;
/// Word length searched for a loxodromic element and for elliptic elements
/// fixing the candidate basepoint.
pub const SEARCH_DEPTH: usize = 6;
/// Finest scale used by the verifier's box-dimension fit.
pub const FIT_FINEST_SCALE: u32 = 9;
/// Number of dyadic scales in the verifier's box-dimension fit, minus one.
pub const FIT_SPAN: u32 = 6;
pub const MIN_CHAIN_DEPTH: usize = 8;

/// Everything the pipeline computes on the way to a verdict.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub loxodromic: GroupElement,
    pub orbit: OrbitSet,
    pub sample: LimitSample,
    pub exponent: ExponentEstimate,
    pub dimension: BoxDimensionEstimate,
}

/// Box-counting window for `orbit`: its finest scale is the shell of the
/// enumeration horizon, capped at [`FIT_FINEST_SCALE`].
pub fn box_window(orbit: &OrbitSet) -> (u32, u32) {
    let resolved = shell_index(radial_gap_from_distance(orbit.horizon_distance())).unwrap_or(MAX_SCALE);
    let k_max = resolved.clamp(4, FIT_FINEST_SCALE);
    (k_max.saturating_sub(FIT_SPAN).max(1), k_max)
}

/// Divergence scan, falling back to the counting fit when the orbit has too
/// few populated shells.
pub fn default_exponent(orbit: &OrbitSet) -> Result<ExponentEstimate> {
    match exponent_estimate(orbit, ExponentMethod::DivergenceScan) {
        Err(Error::InsufficientData(why)) => {
            let mut est = exponent_estimate(orbit, ExponentMethod::CountingFit)?;
            est.note = format!("{}; divergence scan unavailable: {why}", est.note);
            Ok(est)
        }
        r => r,
    }
}

pub fn run_pipeline(group: &GroupPresentation, depth: usize) -> Result<PipelineRun> {
    if depth < MIN_ESTIMATE_DEPTH {
        return Err(Error::usage(format!("depth must be at least {MIN_ESTIMATE_DEPTH}")));
    }
    let loxodromic = find_loxodromic(group, depth.max(SEARCH_DEPTH)).map_err(|e| e.at_stage("find_loxodromic"))?;
    let z = choose_basepoint(&loxodromic, group, SEARCH_DEPTH).map_err(|e| e.at_stage("choose_basepoint"))?;
    let orbit = enumerate_orbit(group, &z, depth).map_err(|e| e.at_stage("enumerate_orbit"))?;
    let exponent = default_exponent(&orbit).map_err(|e| e.at_stage("exponent_estimate"))?;
    let sample = sample_limit_set(&orbit, &loxodromic).map_err(|e| e.at_stage("sample_limit_set"))?;
    let dimension =
        box_dimension_estimate(&sample, box_window(&orbit)).map_err(|e| e.at_stage("box_dimension_estimate"))?;
    Ok(PipelineRun {
        loxodromic,
        orbit,
        sample,
        exponent,
        dimension,
    })
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub group: String,
    pub depth: usize,
    pub exponent: ExponentEstimate,
    pub dimension: BoxDimensionEstimate,
    pub orbit_size: usize,
    pub sample_size: usize,
    /// `dim_est - delta_est`.
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerificationReport {
    pub fn delta_est(&self) -> f64 {
        self.exponent.delta_est
    }

    pub fn dim_est(&self) -> f64 {
        self.dimension.dim_est
    }
}

pub fn verify_inequality(group: &GroupPresentation, depth: usize, tolerance: f64) -> Result<VerificationReport> {
    if !(tolerance > 0.0) {
        return Err(Error::usage("tolerance must be positive"));
    }
    let run = run_pipeline(group, depth)?;
    let margin = run.dimension.dim_est - run.exponent.delta_est;
    Ok(VerificationReport {
        group: group.name().to_string(),
        depth,
        orbit_size: run.orbit.len(),
        sample_size: run.sample.len(),
        exponent: run.exponent,
        dimension: run.dimension,
        margin,
        tolerance,
        pass: margin >= -tolerance,
    })
}

/// One dyadic shell of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRow {
    pub k: u32,
    pub elements: usize,
    /// `sum (1 - |g(z)|)^s`.
    pub lhs: f64,
    /// `sum exp(-s d_H(0, g(z)))`.
    pub series: f64,
    /// `2^{-k(s-n)} sum V_E(B_H(g(z), a))`.
    pub mid: f64,
    /// `2^{-k(s-n)} V_E(L_{c 2^-k})`.
    pub rhs: f64,
    pub tail: f64,
    /// Total Euclidean volume of the shell's orbit balls.
    pub packed_volume: f64,
    pub neighborhood_volume: f64,
}

impl ChainRow {
    pub fn is_empty(&self) -> bool {
        self.elements == 0
    }
}

#[derive(Debug, Clone)]
pub struct ProofChainReport {
    pub s: f64,
    pub t: f64,
    pub dim_est: f64,
    pub packing: PackingRadius,
    pub lemma: LemmaOneReport,
    pub c_hat: f64,
    pub rows: Vec<ChainRow>,
    /// Largest `lhs/series` and whether every ratio lies in `[1, 2^s]`.
    pub series_ratio_max: f64,
    pub series_ratio_ok: bool,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Shells whose packed volume exceeds `2^n` times the neighbourhood volume.
    pub packing_violations: Vec<u32>,
    pub tail_sum: f64,
    pub tail_closed_form: f64,
    /// `1 / (2^{s-t} - 1)`, the full geometric series.
    pub tail_bound: f64,
}

impl ProofChainReport {
    /// Every shell inequality held with finite constants.
    pub fn holds(&self) -> bool {
        self.series_ratio_ok
            && self.packing_violations.is_empty()
            && [self.c1, self.c2, self.c3].iter().all(|c| c.is_finite())
            && self.tail_sum <= self.tail_bound + 1.0
    }
}

fn max_ratio(rows: &[ChainRow], f: impl Fn(&ChainRow) -> f64) -> f64 {
    rows.iter().filter(|r| !r.is_empty()).map(f).fold(0.0, f64::max)
}

/// Largest dyadic number not exceeding `x`.
fn dyadic_floor(x: f64) -> f64 {
    2f64.powi(x.log2().floor() as i32)
}

/// Shell-by-shell evaluation of the chain
/// `sum (1-|g(z)|)^s <~ sum 2^{-k(s-n)} V_E(L_{c 2^-k}) <~ sum 2^{-k(s-t)}`.
///
/// Rows run over the shells the orbit enumerates completely (up to the horizon
/// shell) and stop before the sample stops resolving `c_hat 2^-k`.
pub fn proof_chain_report(group: &GroupPresentation, depth: usize, s: f64, t: f64) -> Result<ProofChainReport> {
    if depth < MIN_CHAIN_DEPTH {
        return Err(Error::usage(format!("chain report needs depth at least {MIN_CHAIN_DEPTH}")));
    }
    let run = run_pipeline(group, depth)?;
    let dim_est = run.dimension.dim_est;
    if !(s > t && t > dim_est) {
        return Err(Error::usage(format!(
            "requires s > t > box-dimension estimate (s = {s}, t = {t}, estimate = {dim_est:.6})"
        )));
    }
    let orbit = &run.orbit;
    let model = orbit.model();
    let n = model.n() as f64;
    let packing = packing_radius(orbit).map_err(|e| e.at_stage("packing_radius"))?;
    let a = packing.a;

    let horizon_shell = shell_index(radial_gap_from_distance(orbit.horizon_distance())).unwrap_or(MAX_SCALE);
    let spacing = if run.sample.len() >= 3 { run.sample.median_spacing() } else { 0.0 };
    let mut k_rows = horizon_shell.min(MAX_SCALE);
    let lemma = lemma_one_check(orbit, a, &run.sample, k_rows).map_err(|e| e.at_stage("lemma_one_check"))?;
    let c_hat = lemma.c_hat;
    while k_rows > 1 && c_hat * 2f64.powi(-(k_rows as i32)) < spacing {
        k_rows -= 1;
    }

    let mut shells: BTreeMap<u32, Vec<&GroupElement>> = BTreeMap::new();
    for g in &orbit.elements {
        if let Some(k) = g.shell_index.filter(|&k| k <= k_rows) {
            shells.entry(k).or_default().push(g);
        }
    }
    let mut rows = Vec::new();
    for k in 1..=k_rows {
        let elems = shells.get(&k).map(Vec::as_slice).unwrap_or(&[]);
        let weight = 2f64.powf(-(k as f64) * (s - n));
        let lhs = pairwise_sum(&elems.iter().map(|g| g.radial_gap.powf(s)).collect::<Vec<_>>());
        let series = pairwise_sum(&elems.iter().map(|g| (-s * g.origin_distance).exp()).collect::<Vec<_>>());
        let packed_volume =
            pairwise_sum(&elems.iter().map(|g| hyperbolic_ball_volume(g, a, model)).collect::<Vec<_>>());
        let radius = c_hat * 2f64.powi(-(k as i32));
        let neighborhood_volume = if elems.is_empty() {
            0.0
        } else {
            grid_volume(&run.sample, radius, dyadic_floor(radius)).map_err(|e| e.at_stage("neighborhood_volume"))?
        };
        rows.push(ChainRow {
            k,
            elements: elems.len(),
            lhs,
            series,
            mid: weight * packed_volume,
            rhs: weight * neighborhood_volume,
            tail: 2f64.powf(-(k as f64) * (s - t)),
            packed_volume,
            neighborhood_volume,
        });
    }

    let bound = 2f64.powf(s);
    let slack = 1e-12;
    let series_ratio_ok = rows
        .iter()
        .filter(|r| !r.is_empty())
        .all(|r| r.lhs >= r.series * (1.0 - slack) && r.lhs <= bound * r.series * (1.0 + slack));
    let quantization = 2f64.powi(model.n() as i32);
    let packing_violations = rows
        .iter()
        .filter(|r| !r.is_empty() && r.packed_volume > quantization * r.neighborhood_volume)
        .map(|r| r.k)
        .collect();
    let q = 2f64.powf(-(s - t));
    let tail_sum = pairwise_sum(&rows.iter().map(|r| r.tail).collect::<Vec<_>>());
    Ok(ProofChainReport {
        s,
        t,
        dim_est,
        c1: max_ratio(&rows, |r| r.lhs / r.mid),
        c2: max_ratio(&rows, |r| r.mid / r.rhs),
        c3: max_ratio(&rows, |r| r.rhs / r.tail),
        series_ratio_max: max_ratio(&rows, |r| r.lhs / r.series),
        series_ratio_ok,
        packing_violations,
        tail_sum,
        tail_closed_form: q * (1.0 - q.powi(k_rows as i32)) / (1.0 - q),
        tail_bound: 1.0 / (2f64.powf(s - t) - 1.0),
        packing,
        lemma,
        c_hat,
        rows,
    })
}
