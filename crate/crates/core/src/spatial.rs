//! Point indexes in `R^3`: a hash grid for small-radius membership and a
//! kd-tree for nearest neighbours.

use std::collections::HashMap;

use crate::geometry::{euclidean_distance, Vec3};

pub(crate) struct PointGrid {
    cell: f64,
    points: Vec<Vec3>,
    cells: HashMap<[i64; 3], Vec<u32>>,
}

impl PointGrid {
    pub(crate) fn new(cell: f64) -> Self {
        PointGrid {
            cell,
            points: Vec::new(),
            cells: HashMap::new(),
        }
    }

    fn key(&self, p: &Vec3) -> [i64; 3] {
        p.map(|x| (x / self.cell).floor() as i64)
    }

    #[cfg(test)]
    pub(crate) fn len(&self) -> usize {
        self.points.len()
    }

    pub(crate) fn insert(&mut self, p: Vec3) -> usize {
        let key = self.key(&p);
        let id = self.points.len();
        self.points.push(p);
        self.cells.entry(key).or_default().push(id as u32);
        id
    }

    /// Whether some stored point lies within `r` of `p`.
    pub(crate) fn any_within(&self, p: &Vec3, r: f64) -> bool {
        let reach = (r / self.cell).ceil() as i64;
        let c = self.key(p);
        for dx in -reach..=reach {
            for dy in -reach..=reach {
                for dz in -reach..=reach {
                    if let Some(ids) = self.cells.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                        if ids
                            .iter()
                            .any(|&i| euclidean_distance(&self.points[i as usize], p) <= r)
                        {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

/// Static kd-tree for nearest-neighbour distances.
pub(crate) struct KdTree {
    points: Vec<Vec3>,
    /// Original index of each point in `points` (tree order).
    ids: Vec<usize>,
}

const LEAF: usize = 8;

impl KdTree {
    pub(crate) fn build(points: impl IntoIterator<Item = Vec3>) -> Self {
        let mut items: Vec<(Vec3, usize)> = points.into_iter().enumerate().map(|(i, p)| (p, i)).collect();
        Self::arrange(&mut items, 0);
        KdTree {
            points: items.iter().map(|x| x.0).collect(),
            ids: items.iter().map(|x| x.1).collect(),
        }
    }

    /// Orders `items` so that every subrange is split at its median along the
    /// axis `depth % 3`.
    fn arrange(items: &mut [(Vec3, usize)], depth: usize) {
        if items.len() <= LEAF {
            return;
        }
        let axis = depth % 3;
        let mid = items.len() / 2;
        items.select_nth_unstable_by(mid, |a, b| a.0[axis].total_cmp(&b.0[axis]));
        let (left, right) = items.split_at_mut(mid);
        Self::arrange(left, depth + 1);
        Self::arrange(&mut right[1..], depth + 1);
    }

    #[cfg(test)]
    pub(crate) fn len(&self) -> usize {
        self.points.len()
    }

    /// Distance from `p` to the nearest point whose original index is not `skip`.
    pub(crate) fn nearest(&self, p: &Vec3, skip: Option<usize>) -> Option<f64> {
        let mut best = f64::INFINITY;
        self.search(0, self.points.len(), 0, p, skip, &mut best);
        best.is_finite().then(|| best.sqrt())
    }

    fn search(&self, lo: usize, hi: usize, depth: usize, p: &Vec3, skip: Option<usize>, best: &mut f64) {
        if hi - lo <= LEAF {
            for i in lo..hi {
                if Some(self.ids[i]) == skip {
                    continue;
                }
                let q = &self.points[i];
                let d = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2) + (q[2] - p[2]).powi(2);
                if d < *best {
                    *best = d;
                }
            }
            return;
        }
        let axis = depth % 3;
        let mid = lo + (hi - lo) / 2;
        let split = self.points[mid];
        if Some(self.ids[mid]) != skip {
            let d = (split[0] - p[0]).powi(2) + (split[1] - p[1]).powi(2) + (split[2] - p[2]).powi(2);
            if d < *best {
                *best = d;
            }
        }
        let delta = p[axis] - split[axis];
        let (near, far) = if delta < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(near.0, near.1, depth + 1, p, skip, best);
        if delta * delta < *best {
            self.search(far.0, far.1, depth + 1, p, skip, best);
        }
    }
}
