use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, MapClass, ModelDim, Vec3};
use crate::group::{GroupElement, OrbitSet, Word};
use crate::spatial::{KdTree, PointGrid};

/// Euclidean tolerance under which two sampled limit points are merged.
pub const SAMPLE_DEDUP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SampleSource {
    /// `g(p+), g(p-)` for the fixed points `p+-` of a loxodromic `h`.
    ConjugateFixedPoints,
    /// Radial projections of the deepest orbit points.
    DeepOrbitProjection,
    /// A point set supplied directly (test fixtures).
    External,
}

/// Finite set of boundary points approximating the limit set.
#[derive(Debug, Clone)]
pub struct LimitSample {
    points: Vec<BoundaryPoint>,
    witnesses: Vec<Word>,
    source: SampleSource,
    dim: ModelDim,
}

impl LimitSample {
    /// Wraps a point set, deduplicating at [`SAMPLE_DEDUP`].
    pub fn from_points(points: Vec<BoundaryPoint>, source: SampleSource) -> Result<Self> {
        let witnesses = vec![Word::empty(); points.len()];
        Self::build(points, witnesses, source)
    }

    fn build(points: Vec<BoundaryPoint>, witnesses: Vec<Word>, source: SampleSource) -> Result<Self> {
        let dim = points
            .first()
            .map(|p| p.dim())
            .ok_or_else(|| Error::usage("a limit-set sample must be nonempty"))?;
        if points.iter().any(|p| p.dim() != dim) {
            return Err(Error::usage("sample points of mixed dimension"));
        }
        let mut grid = PointGrid::new(SAMPLE_DEDUP * 4.0);
        let mut kept = Vec::new();
        let mut kept_words = Vec::new();
        for (p, w) in points.into_iter().zip(witnesses) {
            if !grid.any_within(p.vec(), SAMPLE_DEDUP) {
                grid.insert(*p.vec());
                kept.push(p);
                kept_words.push(w);
            }
        }
        Ok(LimitSample {
            points: kept,
            witnesses: kept_words,
            source,
            dim,
        })
    }

    pub fn points(&self) -> &[BoundaryPoint] {
        &self.points
    }

    pub fn witnesses(&self) -> &[Word] {
        &self.witnesses
    }

    pub fn source(&self) -> SampleSource {
        self.source
    }

    pub fn dim(&self) -> ModelDim {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub(crate) fn vecs(&self) -> impl Iterator<Item = Vec3> + '_ {
        self.points.iter().map(|p| *p.vec())
    }

    /// Median distance from a sample point to its nearest other sample point.
    pub fn median_spacing(&self) -> f64 {
        if self.points.len() < 2 {
            return f64::INFINITY;
        }
        let grid = KdTree::build(self.vecs());
        let mut d: Vec<f64> = self
            .points
            .iter()
            .enumerate()
            .filter_map(|(i, p)| grid.nearest(p.vec(), Some(i)))
            .collect();
        d.sort_by(f64::total_cmp);
        d[d.len() / 2]
    }
}

/// Images of the fixed points of `h` under every orbit element: each is a
/// fixed point of the loxodromic `g h g^-1`, hence a limit point.
pub fn sample_limit_set(orbit: &OrbitSet, h: &GroupElement) -> Result<LimitSample> {
    if h.map.classify() != MapClass::Loxodromic {
        return Err(Error::usage("sample_limit_set needs a loxodromic element"));
    }
    let fp = h.map.fixed_points()?;
    let mut points = Vec::with_capacity(2 * orbit.len());
    let mut words = Vec::with_capacity(2 * orbit.len());
    for g in &orbit.elements {
        for p in &fp {
            points.push(g.map.apply_boundary(p)?);
            words.push(g.word.clone());
        }
    }
    LimitSample::build(points, words, SampleSource::ConjugateFixedPoints)
}

/// Radial projections `g(z) / |g(z)|` of the elements on the deepest level.
pub fn sample_deep_orbit(orbit: &OrbitSet) -> Result<LimitSample> {
    let level = orbit.level(orbit.max_word_length);
    let mut points = Vec::with_capacity(level.len());
    let mut words = Vec::with_capacity(level.len());
    for g in level {
        let c = g.orbit_point.coords();
        if c.iter().all(|&x| x == 0.0) {
            continue;
        }
        let mut v = [0.0; 3];
        v[..c.len()].copy_from_slice(c);
        points.push(BoundaryPoint::normalized(orbit.model(), v));
        words.push(g.word.clone());
    }
    LimitSample::build(points, words, SampleSource::DeepOrbitProjection)
}
