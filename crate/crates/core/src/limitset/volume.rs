use rayon::prelude::*;

use super::sample::LimitSample;
use crate::error::{Error, Result};
use crate::poincare::least_squares;

pub const MIN_SCALE: u32 = 1;
pub const MAX_SCALE: u32 = 24;

/// Grid measurement of the `r`-neighbourhood at `r = 2^-k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicScaleRecord {
    pub k: u32,
    pub r: f64,
    pub cell_count: u64,
    /// `cell_count * r^n`.
    pub volume: f64,
}

fn dyadic(k: u32) -> f64 {
    2f64.powi(-(k as i32))
}

/// Number of cells of side `cell` (grid anchored at the origin) whose centre is
/// within `radius + (sqrt(n)/2) cell` of a sample point. Every cell meeting the
/// closed `radius`-neighbourhood passes the test.
pub(crate) fn neighborhood_cells(sample: &LimitSample, radius: f64, cell: f64) -> Result<u64> {
    let n = sample.dim().n();
    let reach = radius + 0.5 * (n as f64).sqrt() * cell;
    let reach2 = reach * reach;
    let pts: Vec<[f64; 3]> = sample.vecs().collect();
    let mut keys: Vec<[i64; 3]> = pts
        .par_chunks(4096)
        .flat_map_iter(|chunk| {
            let mut local = Vec::new();
            for p in chunk {
                let lo: Vec<i64> = (0..n).map(|i| ((p[i] - reach) / cell).floor() as i64).collect();
                let hi: Vec<i64> = (0..n).map(|i| ((p[i] + reach) / cell).floor() as i64).collect();
                let zr = if n == 3 { lo[2]..=hi[2] } else { 0..=0 };
                for ix in lo[0]..=hi[0] {
                    let cx = (ix as f64 + 0.5) * cell - p[0];
                    for iy in lo[1]..=hi[1] {
                        let cy = (iy as f64 + 0.5) * cell - p[1];
                        for iz in zr.clone() {
                            let cz = if n == 3 { (iz as f64 + 0.5) * cell - p[2] } else { 0.0 };
                            if cx * cx + cy * cy + cz * cz <= reach2 {
                                local.push([ix, iy, iz]);
                            }
                        }
                    }
                }
            }
            local.sort_unstable();
            local.dedup();
            local
        })
        .collect();
    keys.par_sort_unstable();
    keys.dedup();
    let count = keys.len() as u64;
    let side = (4.0 / cell).max((2.0 + 2.0 * reach) / cell + 2.0);
    let bound = side.powi(n as i32);
    if count as f64 > bound {
        return Err(Error::Internal(format!(
            "{count} cells exceed the bounding-box count {bound}; sample is not on the sphere"
        )));
    }
    Ok(count)
}

/// Volume of the closed `radius`-neighbourhood measured on a grid of side `cell`.
pub fn grid_volume(sample: &LimitSample, radius: f64, cell: f64) -> Result<f64> {
    let n = sample.dim().n() as i32;
    Ok(neighborhood_cells(sample, radius, cell)? as f64 * cell.powi(n))
}

pub fn neighborhood_volume(sample: &LimitSample, k: u32) -> Result<DyadicScaleRecord> {
    if !(MIN_SCALE..=MAX_SCALE).contains(&k) {
        return Err(Error::usage(format!(
            "scale exponent k = {k} outside [{MIN_SCALE}, {MAX_SCALE}]"
        )));
    }
    let r = dyadic(k);
    let cell_count = neighborhood_cells(sample, r, r)?;
    Ok(DyadicScaleRecord {
        k,
        r,
        cell_count,
        volume: cell_count as f64 * r.powi(sample.dim().n() as i32),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxDimensionEstimate {
    /// Regression slope clamped to `[0, n]`.
    pub dim_est: f64,
    pub regression_slope: f64,
    pub slope_stderr: f64,
    /// `(k, log2(N_k / N_{k-1}))`; the first scale uses the forward difference.
    pub per_scale_slopes: Vec<(u32, f64)>,
    /// `(k, n - log V_k / log r_k)`, the quantity under the liminf.
    pub scale_values: Vec<(u32, f64)>,
    pub min_local_slope: f64,
    pub fit_window: (u32, u32),
    pub records: Vec<DyadicScaleRecord>,
    pub method_note: String,
}

/// Box-counting regression of `log N(2^-k)` against `k log 2` over `k_range`.
///
/// Samples of three or more points stand in for a perfect set and must resolve
/// the finest scale; one- and two-point samples are taken as exact.
pub fn box_dimension_estimate(sample: &LimitSample, k_range: (u32, u32)) -> Result<BoxDimensionEstimate> {
    let (k_min, k_max) = k_range;
    if k_min < MIN_SCALE || k_max > MAX_SCALE || k_max < k_min + 3 {
        return Err(Error::usage(format!(
            "scale window [{k_min}, {k_max}] must lie in [{MIN_SCALE}, {MAX_SCALE}] and span at least 3"
        )));
    }
    if sample.len() >= 3 {
        let spacing = sample.median_spacing();
        if spacing > dyadic(k_max) {
            return Err(Error::Resolution { k_max, spacing });
        }
    }
    let n = sample.dim().n() as f64;
    let records = (k_min..=k_max)
        .map(|k| neighborhood_volume(sample, k))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = records.iter().map(|r| r.k as f64 * std::f64::consts::LN_2).collect();
    let ys: Vec<f64> = records.iter().map(|r| (r.cell_count as f64).ln()).collect();
    let (slope, _, stderr) = least_squares(&xs, &ys);
    let log2n: Vec<f64> = records.iter().map(|r| (r.cell_count as f64).log2()).collect();
    let per_scale_slopes: Vec<(u32, f64)> = records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let j = if i == 0 { 1 } else { i };
            (r.k, log2n[j] - log2n[j - 1])
        })
        .collect();
    let scale_values = records
        .iter()
        .map(|r| (r.k, n - r.volume.ln() / r.r.ln()))
        .collect();
    let min_local_slope = per_scale_slopes.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    Ok(BoxDimensionEstimate {
        dim_est: slope.clamp(0.0, n),
        regression_slope: slope,
        slope_stderr: stderr,
        per_scale_slopes,
        scale_values,
        min_local_slope,
        fit_window: (k_min, k_max),
        records,
        method_note: format!(
            "least-squares slope of ln N(2^-k) on k ln 2 over {} scales; min local slope {min_local_slope:.4}",
            k_max - k_min + 1
        ),
    })
}
