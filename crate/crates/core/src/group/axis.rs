use super::orbit::{BasepointFrame, EnumerationConfig, GroupElement, OrbitEnumerator};
use super::presentation::GroupPresentation;
use crate::error::{Error, Result};
use crate::geometry::{point_along, InteriorPoint, MapClass, MoebiusMap, Vec3};

const SLIDE_STEP: f64 = 0.1;
const SLIDE_LIMIT: usize = 100;
const ELLIPTIC_FIX_TOL: f64 = 1e-9;

/// First loxodromic element in enumeration order with word length at most
/// `search_depth`. Orbit data refer to the origin.
pub fn find_loxodromic(group: &GroupPresentation, search_depth: usize) -> Result<GroupElement> {
    let origin = InteriorPoint::origin(group.model());
    let mut e = OrbitEnumerator::new(group, origin, EnumerationConfig::default())?;
    while e.depth() < search_depth {
        if e.advance()? == 0 {
            break;
        }
        if let Some(h) = e.last_level().iter().find(|g| g.map.classify() == MapClass::Loxodromic) {
            return Ok(h.clone());
        }
    }
    Err(Error::LoxodromicNotFound { depth: search_depth })
}

/// The point of the geodesic joining two boundary points that is closest to the
/// origin, together with the unit tangent there pointing towards `p`.
pub(crate) fn geodesic_apex(p: &[f64], q: &[f64]) -> (Vec3, Vec3) {
    let mut pv = [0.0; 3];
    let mut qv = [0.0; 3];
    pv[..p.len()].copy_from_slice(p);
    qv[..q.len()].copy_from_slice(q);
    let sum = [pv[0] + qv[0], pv[1] + qv[1], pv[2] + qv[2]];
    let diff = [pv[0] - qv[0], pv[1] - qv[1], pv[2] - qv[2]];
    let s = (sum[0] * sum[0] + sum[1] * sum[1] + sum[2] * sum[2]).sqrt();
    let dn = (diff[0] * diff[0] + diff[1] * diff[1] + diff[2] * diff[2]).sqrt();
    let tangent = [diff[0] / dn, diff[1] / dn, diff[2] / dn];
    if s < 1e-12 {
        return ([0.0; 3], tangent);
    }
    // Half the angle between p and q; the orthogonal circle has centre at
    // distance sec(theta) and radius tan(theta).
    let half_chord = dn / 2.0;
    let cos_t = s / 2.0;
    let r = (1.0 - half_chord) / cos_t;
    ([sum[0] / s * r, sum[1] / s * r, sum[2] / s * r], tangent)
}

/// A basepoint on the axis of the loxodromic `h`, moved off any elliptic fixed
/// point found among the elements of word length at most `search_depth`.
pub fn choose_basepoint(
    h: &GroupElement,
    group: &GroupPresentation,
    search_depth: usize,
) -> Result<InteriorPoint> {
    let fp = h.map.fixed_points()?;
    if fp.len() != 2 {
        return Err(Error::usage("choose_basepoint needs a loxodromic element"));
    }
    let (apex, tangent) = geodesic_apex(fp[0].coords(), fp[1].coords());
    let model = group.model();
    let apex = InteriorPoint::from_vec(model, apex)?;

    let origin = InteriorPoint::origin(model);
    let mut e = OrbitEnumerator::new(group, origin, EnumerationConfig::default())?;
    while e.depth() < search_depth {
        if e.advance()? == 0 {
            break;
        }
    }
    let elliptic: Vec<MoebiusMap> = e
        .finish()
        .elements
        .into_iter()
        .filter(|g| g.map.classify() == MapClass::Elliptic)
        .map(|g| g.map)
        .collect();
    let fixed = |z: &InteriorPoint| {
        let frame = BasepointFrame::new(*z);
        elliptic.iter().any(|g| {
            frame
                .element(*g, Default::default())
                .map(|el| el.displacement < ELLIPTIC_FIX_TOL)
                .unwrap_or(false)
        })
    };
    let dir = &tangent[..model.n()];
    for step in 0..=SLIDE_LIMIT {
        let z = point_along(&apex, dir, SLIDE_STEP * step as f64)?;
        if !fixed(&z) {
            return Ok(z);
        }
    }
    Err(Error::Internal(format!(
        "basepoint still fixed by an elliptic element after {SLIDE_LIMIT} steps"
    )))
}
