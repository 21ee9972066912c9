use super::orbit::OrbitSet;
use crate::error::{Error, Result};
use crate::geometry::{distance_from_parts, euclidean_distance};

pub const SAFETY_FACTOR: f64 = 0.98;

/// Hyperbolic radius `a` such that the balls `B_H(g(z), a)` are pairwise disjoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackingRadius {
    pub a: f64,
    /// `min d_H(z, g(z))` over the enumerated non-trivial elements.
    pub min_displacement: f64,
    pub safety_factor: f64,
    /// Index of the minimizing element in the orbit.
    pub minimizer: usize,
    /// Word length the minimum was taken over.
    pub search_depth: usize,
}

pub fn packing_radius(orbit: &OrbitSet) -> Result<PackingRadius> {
    let (minimizer, min_displacement) = orbit
        .elements
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, g)| (i, g.displacement))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .ok_or_else(|| Error::usage("packing radius needs a non-trivial element"))?;
    if min_displacement < 1e-9 {
        return Err(Error::DegenerateBasepoint(min_displacement));
    }
    Ok(PackingRadius {
        a: 0.5 * SAFETY_FACTOR * min_displacement,
        min_displacement,
        safety_factor: SAFETY_FACTOR,
        minimizer,
        search_depth: orbit.max_word_length,
    })
}

/// Outcome of the brute-force disjointness check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackingCheck {
    pub disjoint: bool,
    /// First pair `(i, j)`, `i < j`, with `d_H(g_i z, g_j z) <= 2a`, and that distance.
    pub violation: Option<(usize, usize, f64)>,
}

/// Checks `d_H(g_i(z), g_j(z)) > 2a` over every pair of orbit points, using the
/// two-point distance formula on coordinates.
pub fn check_packing_disjoint(orbit: &OrbitSet, a: f64) -> Result<PackingCheck> {
    if !(a > 0.0) {
        return Err(Error::usage("packing radius must be positive"));
    }
    let pts: Vec<([f64; 3], f64)> = orbit
        .elements
        .iter()
        .map(|g| {
            let mut x = [0.0; 3];
            x[..g.orbit_point.coords().len()].copy_from_slice(g.orbit_point.coords());
            // 1 - |x|^2 from the radial gap keeps precision near the sphere.
            (x, g.radial_gap * (2.0 - g.radial_gap))
        })
        .collect();
    // d > 2a  <=>  |x - y|^2 > sinh(a)^2 (1 - |x|^2)(1 - |y|^2)
    let sh2 = a.sinh().powi(2);
    for i in 0..pts.len() {
        let (xi, ci) = pts[i];
        for (j, (xj, cj)) in pts.iter().enumerate().skip(i + 1) {
            let dx = [xi[0] - xj[0], xi[1] - xj[1], xi[2] - xj[2]];
            let chord2 = dx[0] * dx[0] + dx[1] * dx[1] + dx[2] * dx[2];
            if chord2 <= sh2 * ci * cj {
                let d = distance_from_parts(euclidean_distance(&xi, xj), ci, *cj);
                return Ok(PackingCheck {
                    disjoint: false,
                    violation: Some((i, j, d)),
                });
            }
        }
    }
    Ok(PackingCheck {
        disjoint: true,
        violation: None,
    })
}
