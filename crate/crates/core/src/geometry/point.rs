use std::fmt;

use crate::error::{Error, Result};
use crate::policy::POLICY;

/// Ambient Euclidean dimension of the model ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum ModelDim {
    /// The Poincare disc in the plane.
    Two,
    /// The Poincare ball in space.
    Three,
}

impl ModelDim {
    pub fn from_n(n: u32) -> Result<Self> {
        match n {
            2 => Ok(ModelDim::Two),
            3 => Ok(ModelDim::Three),
            _ => Err(Error::usage(format!("model dimension must be 2 or 3, got {n}"))),
        }
    }

    pub fn n(self) -> usize {
        match self {
            ModelDim::Two => 2,
            ModelDim::Three => 3,
        }
    }
}

impl fmt::Display for ModelDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.n())
    }
}

pub(crate) type Vec3 = [f64; 3];

pub(crate) fn dot(x: &Vec3, y: &Vec3) -> f64 {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

pub(crate) fn norm(x: &Vec3) -> f64 {
    dot(x, x).sqrt()
}

pub(crate) fn sub(x: &Vec3, y: &Vec3) -> Vec3 {
    [x[0] - y[0], x[1] - y[1], x[2] - y[2]]
}

pub(crate) fn add(x: &Vec3, y: &Vec3) -> Vec3 {
    [x[0] + y[0], x[1] + y[1], x[2] + y[2]]
}

pub(crate) fn scale(x: &Vec3, s: f64) -> Vec3 {
    [x[0] * s, x[1] * s, x[2] * s]
}

pub(crate) fn euclidean_distance(x: &Vec3, y: &Vec3) -> f64 {
    norm(&sub(x, y))
}

fn coords_from_slice(dim: ModelDim, coords: &[f64]) -> Result<Vec3> {
    if coords.len() != dim.n() {
        return Err(Error::usage(format!(
            "expected {} coordinates, got {}",
            dim.n(),
            coords.len()
        )));
    }
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::usage("non-finite coordinate"));
    }
    let mut v = [0.0; 3];
    v[..coords.len()].copy_from_slice(coords);
    Ok(v)
}

/// A point of the open unit ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorPoint {
    coords: Vec3,
    dim: ModelDim,
}

impl InteriorPoint {
    pub fn new(dim: ModelDim, coords: &[f64]) -> Result<Self> {
        let v = coords_from_slice(dim, coords)?;
        Self::from_vec(dim, v)
    }

    pub(crate) fn from_vec(dim: ModelDim, mut v: Vec3) -> Result<Self> {
        if dim == ModelDim::Two {
            v[2] = 0.0;
        }
        let r = norm(&v);
        if !(r < 1.0 - POLICY.boundary_margin) {
            return Err(Error::NumericalOverflow(format!(
                "point of norm {r} is not strictly interior at f64 precision"
            )));
        }
        Ok(InteriorPoint { coords: v, dim })
    }

    pub fn origin(dim: ModelDim) -> Self {
        InteriorPoint {
            coords: [0.0; 3],
            dim,
        }
    }

    pub fn dim(&self) -> ModelDim {
        self.dim
    }

    /// Coordinates, `n` of them.
    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim.n()]
    }

    pub(crate) fn vec(&self) -> &Vec3 {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }
}

/// A point of the boundary sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    coords: Vec3,
    dim: ModelDim,
}

impl BoundaryPoint {
    /// Builds a boundary point, renormalizing to unit length. Inputs further than
    /// `1e-6` from the sphere are rejected.
    pub fn new(dim: ModelDim, coords: &[f64]) -> Result<Self> {
        let v = coords_from_slice(dim, coords)?;
        let r = norm(&v);
        if (r - 1.0).abs() > 1e-6 {
            return Err(Error::usage(format!("boundary point has norm {r}")));
        }
        Ok(Self::normalized(dim, v))
    }

    pub(crate) fn normalized(dim: ModelDim, mut v: Vec3) -> Self {
        if dim == ModelDim::Two {
            v[2] = 0.0;
        }
        let r = norm(&v);
        BoundaryPoint {
            coords: scale(&v, 1.0 / r),
            dim,
        }
    }

    pub fn dim(&self) -> ModelDim {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim.n()]
    }

    pub(crate) fn vec(&self) -> &Vec3 {
        &self.coords
    }

    pub fn distance(&self, other: &BoundaryPoint) -> f64 {
        euclidean_distance(&self.coords, &other.coords)
    }
}

/// Hyperbolic distance between two interior points.
///
/// Evaluated as `2 asinh(|x - y| / sqrt((1 - |x|^2)(1 - |y|^2)))`, which is the
/// two-point formula `cosh d = 1 + 2|x-y|^2 / ((1-|x|^2)(1-|y|^2))` without the
/// cancellation near `d = 0`.
pub fn hyperbolic_distance(x: &InteriorPoint, y: &InteriorPoint) -> f64 {
    let gx = 1.0 - dot(&x.coords, &x.coords);
    let gy = 1.0 - dot(&y.coords, &y.coords);
    distance_from_parts(euclidean_distance(&x.coords, &y.coords), gx, gy)
}

pub(crate) fn distance_from_parts(chord: f64, conformal_x: f64, conformal_y: f64) -> f64 {
    2.0 * (chord / (conformal_x * conformal_y).sqrt()).asinh()
}

/// `d_H(0, w) = log((1 + |w|) / (1 - |w|))`.
pub fn distance_from_origin(w: &InteriorPoint) -> f64 {
    let r = w.norm();
    2.0 * r.atanh()
}

/// Radial gap `1 - |w|` for a point at hyperbolic distance `d` from the origin.
pub fn radial_gap_from_distance(d: f64) -> f64 {
    2.0 / (d.exp() + 1.0)
}

/// Moebius addition `w (+) x`, the ball isometry sending `0` to `w` whose
/// derivative at `0` is a positive multiple of the identity.
pub(crate) fn ball_translate(w: &Vec3, x: &Vec3) -> Vec3 {
    let wx = dot(w, x);
    let ww = dot(w, w);
    let xx = dot(x, x);
    let den = 1.0 + 2.0 * wx + ww * xx;
    let cw = (1.0 + 2.0 * wx + xx) / den;
    let cx = (1.0 - ww) / den;
    add(&scale(w, cw), &scale(x, cx))
}

/// The point at hyperbolic distance `t` from `start`, leaving in Euclidean
/// direction `dir` (unit vector, tangent at `start`).
pub fn point_along(start: &InteriorPoint, dir: &[f64], t: f64) -> Result<InteriorPoint> {
    let d = coords_from_slice(start.dim, dir)?;
    let len = norm(&d);
    if len == 0.0 {
        return Err(Error::usage("zero direction"));
    }
    let local = scale(&d, (t / 2.0).tanh() / len);
    InteriorPoint::from_vec(start.dim, ball_translate(&start.coords, &local))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p2(x: f64, y: f64) -> InteriorPoint {
        InteriorPoint::new(ModelDim::Two, &[x, y]).unwrap()
    }

    #[test]
    fn origin_distance_examples() {
        let o = InteriorPoint::origin(ModelDim::Two);
        assert_eq!(hyperbolic_distance(&o, &o), 0.0);
        assert_abs_diff_eq!(hyperbolic_distance(&o, &p2(0.5, 0.0)), 3f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(
            hyperbolic_distance(&p2(0.5, 0.0), &p2(-0.5, 0.0)),
            2.0 * 3f64.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn two_point_formula_matches_origin_formula() {
        let o = InteriorPoint::origin(ModelDim::Three);
        for r in [0.1, 0.5, 0.9, 0.999] {
            let w = InteriorPoint::new(ModelDim::Three, &[0.0, r * 0.6, r * 0.8]).unwrap();
            assert_abs_diff_eq!(
                hyperbolic_distance(&o, &w),
                ((1.0 + r) / (1.0 - r)).ln(),
                epsilon = 1e-9
            );
            assert_abs_diff_eq!(distance_from_origin(&w), ((1.0 + r) / (1.0 - r)).ln(), epsilon = 1e-9);
        }
    }

    #[test]
    fn radial_gap_inverts_distance() {
        for r in [0.0f64, 0.3, 0.75, 0.999999] {
            let d = ((1.0 + r) / (1.0 - r)).ln();
            assert_abs_diff_eq!(radial_gap_from_distance(d), 1.0 - r, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_points_on_or_outside_sphere() {
        assert!(InteriorPoint::new(ModelDim::Two, &[1.0, 0.0]).is_err());
        assert!(InteriorPoint::new(ModelDim::Two, &[0.6, 0.9]).is_err());
        assert!(InteriorPoint::new(ModelDim::Two, &[0.1, 0.1, 0.1]).is_err());
        assert!(BoundaryPoint::new(ModelDim::Two, &[0.5, 0.0]).is_err());
    }

    #[test]
    fn point_along_moves_by_requested_distance() {
        let start = p2(0.3, -0.2);
        let q = point_along(&start, &[0.0, 1.0], 0.7).unwrap();
        assert_abs_diff_eq!(hyperbolic_distance(&start, &q), 0.7, epsilon = 1e-12);
    }
}
