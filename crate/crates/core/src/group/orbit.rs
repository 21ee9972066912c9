use std::collections::HashMap;

use rayon::prelude::*;

use super::presentation::{GroupPresentation, Letter, Word};
use crate::error::{Error, Result};
use crate::geometry::{radial_gap_from_distance, InteriorPoint, ModelDim, MoebiusMap, Vec3};
use crate::policy::POLICY;

/// Dyadic shell `k` with `2^-k <= gap < 2^(-k+1)`, or `None` for `gap >= 1`.
pub fn shell_index(gap: f64) -> Option<u32> {
    if !(gap > 0.0) || gap >= 1.0 {
        return None;
    }
    let mut k = (-gap.log2()).ceil().max(1.0) as i32;
    // log2 may be off by one ulp at exact powers of two.
    while k > 1 && gap >= 2f64.powi(-k + 1) {
        k -= 1;
    }
    while gap < 2f64.powi(-k) {
        k += 1;
    }
    Some(k as u32)
}

/// One enumerated group element with the data attached to its orbit point.
#[derive(Debug, Clone)]
pub struct GroupElement {
    pub map: MoebiusMap,
    pub word: Word,
    /// `g(z)` for the orbit's basepoint `z`.
    pub orbit_point: InteriorPoint,
    /// `d_H(0, g(z))`, computed from the matrix.
    pub origin_distance: f64,
    /// `d_H(z, g(z))`, computed from the matrix.
    pub displacement: f64,
    /// `1 - |g(z)|`.
    pub radial_gap: f64,
    pub shell_index: Option<u32>,
}

impl GroupElement {
    pub fn word_length(&self) -> usize {
        self.word.len()
    }
}

/// Data needed to attach orbit-point information to maps for a basepoint.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BasepointFrame {
    basepoint: InteriorPoint,
    to_base: MoebiusMap,
    from_base: MoebiusMap,
}

impl BasepointFrame {
    pub(crate) fn new(basepoint: InteriorPoint) -> Self {
        let to_base = MoebiusMap::origin_to(&basepoint);
        BasepointFrame {
            basepoint,
            to_base,
            from_base: to_base.inverse(),
        }
    }

    pub(crate) fn element(&self, map: MoebiusMap, word: Word) -> Result<GroupElement> {
        let moved = map.compose_unchecked(&self.to_base);
        let origin_distance = moved.origin_displacement();
        let displacement = self.from_base.compose_unchecked(&moved).origin_displacement();
        let radial_gap = radial_gap_from_distance(origin_distance);
        if radial_gap < POLICY.boundary_margin {
            return Err(Error::NumericalOverflow(format!(
                "orbit point of word {word} (length {}) has 1 - |g(z)| = {radial_gap:e}",
                word.len()
            )));
        }
        let raw: Vec3 = map.eval_interior(self.basepoint.vec());
        let r = (raw[0] * raw[0] + raw[1] * raw[1] + raw[2] * raw[2]).sqrt();
        let target = 1.0 - radial_gap;
        let v = if r > 0.0 {
            [raw[0] * target / r, raw[1] * target / r, raw[2] * target / r]
        } else {
            [0.0; 3]
        };
        let orbit_point = InteriorPoint::from_vec(self.basepoint.dim(), v)?;
        Ok(GroupElement {
            map,
            word,
            orbit_point,
            origin_distance,
            displacement,
            radial_gap,
            shell_index: shell_index(radial_gap),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumerationConfig {
    /// Entrywise max-modulus distance below which two matrices are the same element.
    pub dedup_tolerance: f64,
    pub element_cap: usize,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig {
            dedup_tolerance: 1e-6,
            element_cap: 5_000_000,
        }
    }
}

/// Deduplicated orbit of a basepoint, in breadth-first word order.
#[derive(Debug, Clone)]
pub struct OrbitSet {
    pub basepoint: InteriorPoint,
    /// Starts with the identity.
    pub elements: Vec<GroupElement>,
    pub max_word_length: usize,
    pub dedup_tolerance: f64,
    /// `level_starts[m]` is the index of the first element of word length `m`.
    level_starts: Vec<usize>,
}

impl OrbitSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn model(&self) -> ModelDim {
        self.basepoint.dim()
    }

    /// Elements of exactly word length `m`.
    pub fn level(&self, m: usize) -> &[GroupElement] {
        if m + 1 >= self.level_starts.len() {
            return &[];
        }
        &self.elements[self.level_starts[m]..self.level_starts[m + 1]]
    }

    /// Elements of word length at most `m`.
    pub fn truncated(&self, m: usize) -> &[GroupElement] {
        let end = self.level_starts[(m + 1).min(self.level_starts.len() - 1)];
        &self.elements[..end]
    }

    /// The orbit restricted to word length at most `m`.
    pub fn up_to(&self, m: usize) -> OrbitSet {
        let m = m.min(self.max_word_length);
        OrbitSet {
            basepoint: self.basepoint,
            elements: self.truncated(m).to_vec(),
            max_word_length: m,
            dedup_tolerance: self.dedup_tolerance,
            level_starts: self.level_starts[..m + 2].to_vec(),
        }
    }

    /// Smallest `d_H(0, g(z))` over the deepest enumerated level: orbit points
    /// closer to the origin than this are unlikely to need longer words.
    pub fn horizon_distance(&self) -> f64 {
        let mut m = self.max_word_length;
        loop {
            let level = self.level(m);
            if !level.is_empty() || m == 0 {
                return level
                    .iter()
                    .map(|e| e.origin_distance)
                    .fold(f64::INFINITY, f64::min);
            }
            m -= 1;
        }
    }
}

/// Spatial hash on the first two matrix entries; probes neighbouring cells only
/// when a coordinate lies within the tolerance of a cell wall.
struct MatrixIndex {
    cell: f64,
    tol: f64,
    buckets: HashMap<[i64; 4], Vec<u32>>,
}

impl MatrixIndex {
    fn new(tol: f64) -> Self {
        MatrixIndex {
            cell: 4.0 * tol,
            tol,
            buckets: HashMap::new(),
        }
    }

    fn coords(m: &MoebiusMap) -> [f64; 4] {
        let e = m.entries();
        [e[0].re, e[0].im, e[1].re, e[1].im]
    }

    fn key(&self, x: &[f64; 4]) -> [i64; 4] {
        x.map(|v| (v / self.cell).floor() as i64)
    }

    fn candidates(&self, x: &[f64; 4]) -> Vec<[i64; 4]> {
        let base = self.key(x);
        let mut keys = vec![base];
        for i in 0..4 {
            let lo = base[i] as f64 * self.cell;
            let mut extra = Vec::new();
            if x[i] - lo < self.tol {
                extra.push(-1);
            }
            if lo + self.cell - x[i] < self.tol {
                extra.push(1);
            }
            let n = keys.len();
            for off in extra {
                for j in 0..n {
                    let mut k = keys[j];
                    k[i] += off;
                    keys.push(k);
                }
            }
        }
        keys
    }

    fn contains(&self, m: &MoebiusMap, stored: &[GroupElement]) -> bool {
        let x = Self::coords(m);
        let neg = x.map(|v| -v);
        for probe in [x, neg] {
            for key in self.candidates(&probe) {
                if let Some(ids) = self.buckets.get(&key) {
                    if ids
                        .iter()
                        .any(|&i| stored[i as usize].map.matrix_distance(m) <= self.tol)
                    {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn insert(&mut self, m: &MoebiusMap, id: usize) {
        let key = self.key(&Self::coords(m));
        self.buckets.entry(key).or_default().push(id as u32);
    }
}

/// Breadth-first orbit enumeration, one word length at a time.
pub(crate) struct OrbitEnumerator {
    letters: Vec<(Letter, MoebiusMap)>,
    frame: BasepointFrame,
    config: EnumerationConfig,
    index: MatrixIndex,
    elements: Vec<GroupElement>,
    level_starts: Vec<usize>,
}

impl OrbitEnumerator {
    pub(crate) fn new(
        group: &GroupPresentation,
        basepoint: InteriorPoint,
        config: EnumerationConfig,
    ) -> Result<Self> {
        if basepoint.dim() != group.model() {
            return Err(Error::usage("basepoint and group have different dimensions"));
        }
        let frame = BasepointFrame::new(basepoint);
        let id = frame.element(MoebiusMap::identity(group.model()), Word::empty())?;
        let mut index = MatrixIndex::new(config.dedup_tolerance);
        index.insert(&id.map, 0);
        Ok(OrbitEnumerator {
            letters: group.letters(),
            frame,
            config,
            index,
            elements: vec![id],
            level_starts: vec![0, 1],
        })
    }

    pub(crate) fn depth(&self) -> usize {
        self.level_starts.len() - 2
    }

    pub(crate) fn last_level(&self) -> &[GroupElement] {
        let n = self.level_starts.len();
        &self.elements[self.level_starts[n - 2]..self.level_starts[n - 1]]
    }

    /// Appends the next word length. Returns the number of new elements.
    pub(crate) fn advance(&mut self) -> Result<usize> {
        let n = self.level_starts.len();
        let (start, end) = (self.level_starts[n - 2], self.level_starts[n - 1]);
        let word_length = self.depth() + 1;
        let letters = &self.letters;
        let parents = &self.elements[start..end];
        let children: Vec<(usize, Letter, MoebiusMap)> = parents
            .par_iter()
            .enumerate()
            .flat_map_iter(|(pi, p)| {
                let last = p.word.last();
                letters
                    .iter()
                    .filter(move |(l, _)| Some(l.inverse()) != last)
                    .map(move |(l, g)| (start + pi, *l, p.map.compose_unchecked(g)))
            })
            .collect();
        let mut added = 0;
        for (parent, letter, map) in children {
            if self.index.contains(&map, &self.elements) {
                continue;
            }
            if self.elements.len() >= self.config.element_cap {
                return Err(Error::Resource {
                    limit: self.config.element_cap,
                    word_length,
                });
            }
            let word = self.elements[parent].word.extended(letter);
            let element = self.frame.element(map, word)?;
            self.index.insert(&element.map, self.elements.len());
            self.elements.push(element);
            added += 1;
        }
        self.level_starts.push(self.elements.len());
        Ok(added)
    }

    pub(crate) fn finish(self) -> OrbitSet {
        OrbitSet {
            basepoint: self.frame.basepoint,
            max_word_length: self.depth(),
            dedup_tolerance: self.config.dedup_tolerance,
            elements: self.elements,
            level_starts: self.level_starts,
        }
    }
}

/// Orbit of `basepoint` over all reduced words of length at most `max_word_length`.
pub fn enumerate_orbit(
    group: &GroupPresentation,
    basepoint: &InteriorPoint,
    max_word_length: usize,
) -> Result<OrbitSet> {
    enumerate_orbit_with(group, basepoint, max_word_length, EnumerationConfig::default())
}

pub fn enumerate_orbit_with(
    group: &GroupPresentation,
    basepoint: &InteriorPoint,
    max_word_length: usize,
    config: EnumerationConfig,
) -> Result<OrbitSet> {
    if max_word_length < 1 {
        return Err(Error::usage("max_word_length must be at least 1"));
    }
    let mut e = OrbitEnumerator::new(group, *basepoint, config)?;
    while e.depth() < max_word_length {
        e.advance()?;
    }
    Ok(e.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shell_index_boundaries() {
        assert_eq!(shell_index(1.0), None);
        assert_eq!(shell_index(0.5), Some(1));
        assert_eq!(shell_index(0.999), Some(1));
        assert_eq!(shell_index(0.4999), Some(2));
        assert_eq!(shell_index(0.25), Some(2));
        assert_eq!(shell_index(2f64.powi(-30)), Some(30));
        assert_eq!(shell_index(2f64.powi(-30) * 1.5), Some(30));
    }

    #[test]
    fn cyclic_orbit_has_two_l_plus_one_elements() {
        let g = MoebiusMap::axial_translation(ModelDim::Two, 9f64.ln(), 0.0);
        let group = GroupPresentation::new("c", ModelDim::Two, vec![g]).unwrap();
        let orbit = enumerate_orbit(&group, &InteriorPoint::origin(ModelDim::Two), 7).unwrap();
        assert_eq!(orbit.len(), 15);
        assert_eq!(orbit.level(3).len(), 2);
        assert!((orbit.horizon_distance() - 7.0 * 9f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn element_cap_reports_word_length() {
        let g = MoebiusMap::axial_translation(ModelDim::Two, 2.0, 0.0);
        let h = MoebiusMap::axial_translation(ModelDim::Two, 2.0, 1.5);
        let group = GroupPresentation::new("f", ModelDim::Two, vec![g, h]).unwrap();
        let cfg = EnumerationConfig {
            element_cap: 20,
            ..Default::default()
        };
        let err = enumerate_orbit_with(&group, &InteriorPoint::origin(ModelDim::Two), 5, cfg).unwrap_err();
        assert!(matches!(err, Error::Resource { word_length: 3, .. }), "{err}");
    }

    #[test]
    fn max_word_length_zero_is_usage_error() {
        let g = MoebiusMap::axial_translation(ModelDim::Two, 2.0, 0.0);
        let group = GroupPresentation::new("c", ModelDim::Two, vec![g]).unwrap();
        assert!(enumerate_orbit(&group, &InteriorPoint::origin(ModelDim::Two), 0).is_err());
    }
}
