//! Poincare disc and ball: points, the hyperbolic metric, and Moebius maps.

mod moebius;
mod point;

pub use moebius::{MapClass, MoebiusMap};
pub use point::{
    distance_from_origin, hyperbolic_distance, point_along, radial_gap_from_distance,
    BoundaryPoint, InteriorPoint, ModelDim,
};

pub(crate) use point::{distance_from_parts, euclidean_distance, Vec3};
