use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::sample::LimitSample;
use crate::error::{Error, Result};
use crate::geometry::{radial_gap_from_distance, ModelDim, Vec3};
use crate::group::{GroupElement, OrbitSet};
use crate::spatial::KdTree;

/// The Euclidean ball that equals a hyperbolic ball `B_H(w, a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanBall {
    pub center: Vec3,
    pub radius: f64,
}

/// `tanh(x/2)`, written through the gap `1 - tanh(x/2)` for large `x`.
fn signed_radius_gap(x: f64) -> (f64, f64) {
    if x > 1.0 {
        let g = radial_gap_from_distance(x);
        (1.0 - g, g)
    } else {
        let r = (x / 2.0).tanh();
        (r, 1.0 - r)
    }
}

/// Realizes `B_H(g(z), a)` from its two diametral points on the radial
/// geodesic through `g(z)`, at distances `D + a` and `D - a` from the origin.
pub fn euclidean_ball(g: &GroupElement, a: f64) -> EuclideanBall {
    let d = g.origin_distance;
    let (outer, outer_gap) = signed_radius_gap(d + a);
    let (inner, inner_gap) = signed_radius_gap(d - a);
    let radius = if d - a > 1.0 {
        0.5 * (inner_gap - outer_gap)
    } else {
        0.5 * (outer - inner)
    };
    let center_r = if d - a > 1.0 {
        1.0 - 0.5 * (inner_gap + outer_gap)
    } else {
        0.5 * (outer + inner)
    };
    let c = g.orbit_point.coords();
    let len = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut center = [0.0; 3];
    if len > 0.0 {
        for i in 0..c.len() {
            center[i] = c[i] / len * center_r;
        }
    }
    EuclideanBall { center, radius }
}

fn ball_volume(dim: ModelDim, radius: f64) -> f64 {
    match dim {
        ModelDim::Two => PI * radius * radius,
        ModelDim::Three => 4.0 / 3.0 * PI * radius.powi(3),
    }
}

pub fn hyperbolic_ball_volume(g: &GroupElement, a: f64, dim: ModelDim) -> f64 {
    ball_volume(dim, euclidean_ball(g, a).radius)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeRecord {
    pub index: usize,
    pub word_length: usize,
    pub radial_gap: f64,
    pub diameter: f64,
    pub volume: f64,
    /// `volume / radial_gap^n`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeRatioReport {
    pub records: Vec<VolumeRecord>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl VolumeRatioReport {
    pub fn spread(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

pub fn volume_ratio_report(orbit: &OrbitSet, a: f64) -> Result<VolumeRatioReport> {
    if !(a > 0.0) {
        return Err(Error::usage("packing radius must be positive"));
    }
    let dim = orbit.model();
    let n = dim.n() as i32;
    let records: Vec<VolumeRecord> = orbit
        .elements
        .iter()
        .enumerate()
        .map(|(index, g)| {
            let ball = euclidean_ball(g, a);
            let volume = ball_volume(dim, ball.radius);
            VolumeRecord {
                index,
                word_length: g.word_length(),
                radial_gap: g.radial_gap,
                diameter: 2.0 * ball.radius,
                volume,
                ratio: volume / g.radial_gap.powi(n),
            }
        })
        .collect();
    let min_ratio = records.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = records.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(VolumeRatioReport {
        records,
        min_ratio,
        max_ratio,
    })
}

pub const MESH_POINTS: usize = 32;

/// Deterministic boundary mesh of a Euclidean ball: a regular polygon in the
/// plane, a Fibonacci lattice on the sphere.
pub fn ball_mesh(dim: ModelDim, ball: &EuclideanBall) -> Vec<Vec3> {
    let c = ball.center;
    let r = ball.radius;
    (0..MESH_POINTS)
        .map(|i| match dim {
            ModelDim::Two => {
                let t = 2.0 * PI * i as f64 / MESH_POINTS as f64;
                [c[0] + r * t.cos(), c[1] + r * t.sin(), 0.0]
            }
            ModelDim::Three => {
                let golden = PI * (3.0 - 5f64.sqrt());
                let y = 1.0 - 2.0 * (i as f64 + 0.5) / MESH_POINTS as f64;
                let rho = (1.0 - y * y).sqrt();
                let t = golden * i as f64;
                [c[0] + r * rho * t.cos(), c[1] + r * y, c[2] + r * rho * t.sin()]
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaShell {
    pub k: u32,
    pub elements: usize,
    /// Largest mesh-point distance to the sample over the shell's balls.
    pub max_distance: f64,
    /// `max_distance / 2^-k`.
    pub c_k: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaOneReport {
    pub shells: Vec<LemmaShell>,
    /// Shells in `1..=k_max` with no elements.
    pub skipped: Vec<u32>,
    pub c_hat: f64,
}

impl LemmaOneReport {
    pub fn median_c(&self) -> f64 {
        let mut c: Vec<f64> = self.shells.iter().map(|s| s.c_k).collect();
        c.sort_by(f64::total_cmp);
        if c.is_empty() {
            return f64::NAN;
        }
        let m = c.len() / 2;
        if c.len() % 2 == 1 {
            c[m]
        } else {
            0.5 * (c[m - 1] + c[m])
        }
    }
}

/// Measures, shell by shell, how far the orbit balls reach from the sample.
pub fn lemma_one_check(
    orbit: &OrbitSet,
    a: f64,
    sample: &LimitSample,
    k_max: u32,
) -> Result<LemmaOneReport> {
    if orbit.is_empty() {
        return Err(Error::usage("empty orbit"));
    }
    if sample.dim() != orbit.model() {
        return Err(Error::usage("sample and orbit have different dimensions"));
    }
    let grid = KdTree::build(sample.vecs());
    let mut by_shell: BTreeMap<u32, Vec<&GroupElement>> = BTreeMap::new();
    for g in &orbit.elements {
        if let Some(k) = g.shell_index.filter(|&k| k <= k_max) {
            by_shell.entry(k).or_default().push(g);
        }
    }
    let mut shells = Vec::new();
    let mut skipped = Vec::new();
    for k in 1..=k_max {
        let Some(elems) = by_shell.get(&k) else {
            skipped.push(k);
            continue;
        };
        let mut max_distance = 0.0f64;
        for g in elems {
            let ball = euclidean_ball(g, a);
            for p in ball_mesh(orbit.model(), &ball) {
                let d = grid
                    .nearest(&p, None)
                    .ok_or_else(|| Error::Internal("empty sample grid".into()))?;
                max_distance = max_distance.max(d);
            }
        }
        shells.push(LemmaShell {
            k,
            elements: elems.len(),
            max_distance,
            c_k: max_distance / 2f64.powi(-(k as i32)),
        });
    }
    let c_hat = shells.iter().map(|s| s.c_k).fold(0.0, f64::max);
    Ok(LemmaOneReport {
        shells,
        skipped,
        c_hat,
    })
}
