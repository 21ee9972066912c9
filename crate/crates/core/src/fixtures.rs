//! Named fixtures: three group presentations in the disc and a point-set
//! fixture for checking the box-dimension estimator.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, ModelDim, MoebiusMap};
use crate::group::GroupPresentation;

pub const CYCLIC_LOXODROMIC: &str = "cyclic_loxodromic";
pub const SCHOTTKY_F2: &str = "schottky_f2";
pub const FUCHSIAN_LATTICE: &str = "fuchsian_lattice";
pub const CANTOR_TEST: &str = "cantor_test";

pub const FIXTURE_NAMES: [&str; 4] = [CYCLIC_LOXODROMIC, SCHOTTKY_F2, FUCHSIAN_LATTICE, CANTOR_TEST];

/// Angular half-width of each of the four Schottky circles.
pub const SCHOTTKY_HALF_ANGLE: f64 = PI / 6.0;

/// Depth of the middle-thirds construction in the Cantor fixture.
pub const CANTOR_DEPTH: u32 = 12;

/// `<g>` with `g` translating the real diameter by `ln 9`.
pub fn cyclic_loxodromic() -> GroupPresentation {
    let g = MoebiusMap::axial_translation(ModelDim::Two, 9f64.ln(), 0.0);
    GroupPresentation::new(CYCLIC_LOXODROMIC, ModelDim::Two, vec![g]).expect("valid fixture")
}

/// Translation length pairing the two circles orthogonal to the unit circle
/// centred at `+-1` with angular half-width `theta`: twice the distance from
/// the origin to either circle, `cosh rho = 1 / sin theta`.
pub fn schottky_translation_length(theta: f64) -> f64 {
    2.0 * (1.0 / theta.sin()).acosh()
}

/// Classical Schottky group on two generators: translations along the real and
/// imaginary diameters, each pairing an opposite pair of the four disjoint
/// circles centred at `1, i, -1, -i`.
pub fn schottky_f2_with(theta: f64) -> Result<GroupPresentation> {
    if !(theta > 0.0 && theta < PI / 4.0) {
        return Err(Error::usage("Schottky circles are disjoint only for 0 < theta < pi/4"));
    }
    let l = schottky_translation_length(theta);
    let g1 = MoebiusMap::axial_translation(ModelDim::Two, l, 0.0);
    let g2 = MoebiusMap::axial_translation(ModelDim::Two, l, FRAC_PI_2);
    GroupPresentation::new(SCHOTTKY_F2, ModelDim::Two, vec![g1, g2])
}

pub fn schottky_f2() -> GroupPresentation {
    schottky_f2_with(SCHOTTKY_HALF_ANGLE).expect("valid fixture")
}

/// The modular group carried to the disc: `z -> z + 1` and `z -> -1/z`.
pub fn fuchsian_lattice() -> GroupPresentation {
    let c = |x: f64| Complex64::new(x, 0.0);
    let t = MoebiusMap::from_halfspace(ModelDim::Two, [c(1.0), c(1.0), c(0.0), c(1.0)]).expect("valid");
    let s = MoebiusMap::from_halfspace(ModelDim::Two, [c(0.0), c(-1.0), c(1.0), c(0.0)]).expect("valid");
    GroupPresentation::new(FUCHSIAN_LATTICE, ModelDim::Two, vec![t, s]).expect("valid fixture")
}

pub fn group_fixture(name: &str) -> Result<GroupPresentation> {
    match name {
        CYCLIC_LOXODROMIC => Ok(cyclic_loxodromic()),
        SCHOTTKY_F2 => Ok(schottky_f2()),
        FUCHSIAN_LATTICE => Ok(fuchsian_lattice()),
        CANTOR_TEST => Err(Error::usage("cantor_test is a point-set fixture, not a group")),
        other => Err(Error::usage(format!("unknown fixture {other}"))),
    }
}

/// Left endpoints of the `2^depth` middle-thirds intervals of `[0, 1]`.
pub fn cantor_left_endpoints(depth: u32) -> Vec<f64> {
    let mut pts = vec![0.0f64];
    let mut len = 1.0;
    for _ in 0..depth {
        len /= 3.0;
        pts = pts.iter().flat_map(|&x| [x, x + 2.0 * len]).collect();
    }
    pts
}

/// The middle-thirds Cantor set laid along the unit circle by angle (one radian
/// of arc), a bi-Lipschitz copy with the same box dimension.
pub fn cantor_points(depth: u32) -> Vec<BoundaryPoint> {
    cantor_left_endpoints(depth)
        .into_iter()
        .map(|t| BoundaryPoint::new(ModelDim::Two, &[t.cos(), t.sin()]).expect("unit"))
        .collect()
}

/// `count` equally spaced points of the unit circle.
pub fn circle_points(count: usize) -> Vec<BoundaryPoint> {
    (0..count)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / count as f64;
            BoundaryPoint::new(ModelDim::Two, &[t.cos(), t.sin()]).expect("unit")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_endpoints() {
        let p = cantor_left_endpoints(2);
        let expected = [0.0, 2.0 / 9.0, 2.0 / 3.0, 8.0 / 9.0];
        for (a, b) in p.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(cantor_left_endpoints(CANTOR_DEPTH).len(), 4096);
    }

    #[test]
    fn schottky_length_for_sixty_degree_circles() {
        // theta = pi/6: cosh rho = 2.
        let l = schottky_translation_length(PI / 6.0);
        assert!((l - 2.0 * (2.0 + 3f64.sqrt()).ln()).abs() < 1e-12);
        assert!(schottky_f2_with(PI / 4.0).is_err());
    }
}
