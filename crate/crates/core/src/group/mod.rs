//! Group presentations, breadth-first orbit enumeration, and the standing
//! choices of loxodromic element, basepoint and packing radius.

mod axis;
mod orbit;
mod packing;
mod presentation;

pub use axis::{choose_basepoint, find_loxodromic};
pub use orbit::{
    enumerate_orbit, enumerate_orbit_with, shell_index, EnumerationConfig, GroupElement, OrbitSet,
};
pub use packing::{check_packing_disjoint, packing_radius, PackingCheck, PackingRadius, SAFETY_FACTOR};
pub use presentation::{GroupPresentation, Letter, Word};

