//! Finite weighted metric spaces standing in for a metric compact with a
//! Borel measure: midpoint-rule grids on intervals and boxes, or explicit
//! distance matrices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, GEOMETRY_TOL};

/// Index of a point in a [`Domain`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub usize);

/// How to build a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    /// `[a, b]` cut into `n` equal cells, one point at each cell center.
    Interval { a: f64, b: f64, n: usize },
    /// Product of per-axis midpoint rules.
    Box { lo: Vec<f64>, hi: Vec<f64>, n: Vec<usize> },
    /// Explicit symmetric distance matrix and point weights.
    Finite { dist: Vec<Vec<f64>>, weights: Vec<f64> },
}

#[derive(Debug, Clone)]
enum Geometry {
    Grid { lo: Vec<f64>, hi: Vec<f64>, cell: Vec<f64>, coords: Vec<f64> },
    Matrix { dist: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct Domain {
    geometry: Geometry,
    dim: usize,
    len: usize,
    weights: Vec<f64>,
    total: f64,
    h: f64,
}

impl Domain {
    pub fn build(spec: &DomainSpec) -> Result<Domain> {
        match spec {
            DomainSpec::Interval { a, b, n } => Self::grid(&[*a], &[*b], &[*n]),
            DomainSpec::Box { lo, hi, n } => Self::grid(lo, hi, n),
            DomainSpec::Finite { dist, weights } => Self::finite(dist, weights),
        }
    }

    /// Midpoint interval grid.
    pub fn interval(a: f64, b: f64, n: usize) -> Result<Domain> {
        Self::grid(&[a], &[b], &[n])
    }

    fn grid(lo: &[f64], hi: &[f64], n: &[usize]) -> Result<Domain> {
        let dim = lo.len();
        if dim == 0 || hi.len() != dim || n.len() != dim {
            return Err(Error::InvalidDomain("box bounds and cell counts must have one entry per axis".into()));
        }
        for axis in 0..dim {
            let (a, b) = (lo[axis], hi[axis]);
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::IntervalBounds { a, b });
            }
            if n[axis] == 0 {
                return Err(Error::CellCount { axis });
            }
        }
        let cell: Vec<f64> = (0..dim).map(|k| (hi[k] - lo[k]) / n[k] as f64).collect();
        let len = n.iter().try_fold(1usize, |acc, &k| acc.checked_mul(k));
        let len = len.ok_or_else(|| Error::InvalidDomain("too many grid points".into()))?;
        let weight: f64 = cell.iter().product();

        // row-major: the last axis varies fastest
        let mut coords = Vec::with_capacity(len * dim);
        let mut index = vec![0usize; dim];
        for _ in 0..len {
            for k in 0..dim {
                coords.push(lo[k] + (index[k] as f64 + 0.5) * cell[k]);
            }
            for k in (0..dim).rev() {
                index[k] += 1;
                if index[k] < n[k] {
                    break;
                }
                index[k] = 0;
            }
        }
        let h = cell.iter().map(|c| c * c).sum::<f64>().sqrt();
        let weights = vec![weight; len];
        let total = compensated_sum(weights.iter().copied());
        Ok(Domain {
            geometry: Geometry::Grid { lo: lo.to_vec(), hi: hi.to_vec(), cell, coords },
            dim,
            len,
            weights,
            total,
            h,
        })
    }

    fn finite(dist: &[Vec<f64>], weights: &[f64]) -> Result<Domain> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::InvalidDomain("finite metric space needs at least one point".into()));
        }
        if weights.len() != n {
            return Err(Error::InvalidDomain(format!("{} weights for {} points", weights.len(), n)));
        }
        if let Some(row) = dist.iter().position(|r| r.len() != n) {
            return Err(Error::NotAMetric(format!("row {row} does not have {n} entries")));
        }
        let tol = GEOMETRY_TOL;
        for i in 0..n {
            if dist[i][i] != 0.0 {
                return Err(Error::NotAMetric(format!("d({i},{i}) = {} is not zero", dist[i][i])));
            }
            for j in 0..n {
                let v = dist[i][j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::NotAMetric(format!("d({i},{j}) = {v} is not a nonnegative number")));
                }
                if (v - dist[j][i]).abs() > tol {
                    return Err(Error::NotAMetric(format!(
                        "d({i},{j}) = {v} differs from d({j},{i}) = {}",
                        dist[j][i]
                    )));
                }
                if i != j && v == 0.0 {
                    return Err(Error::NotAMetric(format!("distinct points {i} and {j} at distance 0")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if dist[i][k] > dist[i][j] + dist[j][k] + tol {
                        return Err(Error::NotAMetric(format!(
                            "triangle inequality fails for ({i},{j},{k}): d({i},{k}) = {} > {} + {}",
                            dist[i][k], dist[i][j], dist[j][k]
                        )));
                    }
                }
            }
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidDomain(format!("weight {} at point {i} must be nonnegative", weights[i])));
        }
        let total = compensated_sum(weights.iter().copied());
        if total <= 0.0 {
            return Err(Error::ZeroMeasure);
        }
        Ok(Domain {
            geometry: Geometry::Matrix { dist: dist.iter().flatten().copied().collect() },
            dim: 0,
            len: n,
            weights: weights.to_vec(),
            total,
            h: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Coordinate dimension; `None` for explicit metric spaces.
    pub fn dim(&self) -> Option<usize> {
        match self.geometry {
            Geometry::Grid { .. } => Some(self.dim),
            Geometry::Matrix { .. } => None,
        }
    }

    /// Box bounds of a grid domain.
    pub fn bounds(&self) -> Option<(&[f64], &[f64])> {
        match &self.geometry {
            Geometry::Grid { lo, hi, .. } => Some((lo, hi)),
            Geometry::Matrix { .. } => None,
        }
    }

    /// Cell widths along each axis of a grid domain.
    pub fn cell_widths(&self) -> Option<&[f64]> {
        match &self.geometry {
            Geometry::Grid { cell, .. } => Some(cell),
            Geometry::Matrix { .. } => None,
        }
    }

    /// Largest cell diameter; zero for explicit metric spaces, whose
    /// integrals are exact.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, p: PointId) -> f64 {
        self.weights[p.0]
    }

    pub fn total_measure(&self) -> f64 {
        self.total
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> {
        (0..self.len).map(PointId)
    }

    pub fn check_point(&self, p: PointId) -> Result<PointId> {
        if p.0 < self.len {
            Ok(p)
        } else {
            Err(Error::PointOutOfRange { index: p.0, len: self.len })
        }
    }

    pub fn coords(&self, p: PointId) -> Option<&[f64]> {
        match &self.geometry {
            Geometry::Grid { coords, .. } => Some(&coords[p.0 * self.dim..(p.0 + 1) * self.dim]),
            Geometry::Matrix { .. } => None,
        }
    }

    /// `r(p, q)`.
    pub fn dist(&self, p: PointId, q: PointId) -> f64 {
        match &self.geometry {
            Geometry::Grid { coords, .. } => {
                let d = self.dim;
                let (a, b) = (&coords[p.0 * d..(p.0 + 1) * d], &coords[q.0 * d..(q.0 + 1) * d]);
                euclid(a, b)
            }
            Geometry::Matrix { dist } => dist[p.0 * self.len + q.0],
        }
    }

    /// Euclidean distance from a grid point to arbitrary coordinates.
    pub fn dist_to_coords(&self, p: PointId, x: &[f64]) -> Option<f64> {
        self.coords(p).map(|c| euclid(c, x))
    }

    /// Grid point nearest to `x`, ties to the lowest index.
    pub fn nearest_point(&self, x: &[f64]) -> Result<PointId> {
        let dim = self.dim().ok_or_else(|| Error::InvalidDomain("coordinates on a metric space".into()))?;
        if x.len() != dim {
            return Err(Error::InvalidDomain(format!("point has {} coordinates, domain has {dim}", x.len())));
        }
        let mut best = (f64::INFINITY, PointId(0));
        for p in self.points() {
            let d = euclid(self.coords(p).expect("grid"), x);
            if d < best.0 - GEOMETRY_TOL {
                best = (d, p);
            }
        }
        Ok(best.1)
    }

    pub fn full_mask(&self) -> Mask {
        Mask(vec![true; self.len])
    }

    pub fn empty_mask(&self) -> Mask {
        Mask(vec![false; self.len])
    }

    pub fn mask_where(&self, mut pred: impl FnMut(PointId) -> bool) -> Mask {
        Mask(self.points().map(&mut pred).collect())
    }

    /// Closed ball `r(t, center) <= eps`. An empty ball is an error because
    /// a mean over it is undefined.
    pub fn ball_mask(&self, center: PointId, eps: f64) -> Result<Mask> {
        self.check_point(center)?;
        if !(eps > 0.0) {
            return Err(Error::NonPositiveRadius(eps));
        }
        let mask = self.mask_where(|t| self.dist(t, center) <= eps + GEOMETRY_TOL);
        if mask.count() == 0 {
            return Err(Error::EmptyBall { center: center.0, eps });
        }
        Ok(mask)
    }

    /// `mu(mask)`.
    pub fn measure_of(&self, mask: &Mask) -> Result<f64> {
        self.check_mask(mask)?;
        Ok(compensated_sum(mask.indices().map(|i| self.weights[i])))
    }

    pub fn check_mask(&self, mask: &Mask) -> Result<()> {
        if mask.len() == self.len {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: self.len, found: mask.len() })
        }
    }

    /// Nearest-node labels: each point gets the smallest node position `i`
    /// with `r(t, x_i) <= r(t, x_j)` for all `j`, so ties go to the lowest
    /// index.
    pub fn voronoi_partition(&self, nodes: &Nodes) -> VoronoiPartition {
        let per_point: Vec<(usize, bool)> = (0..self.len)
            .into_par_iter()
            .map(|t| {
                let t = PointId(t);
                let dists: Vec<f64> = nodes.iter().map(|x| self.dist(t, x)).collect();
                let min = dists.iter().copied().fold(f64::INFINITY, f64::min);
                let mut close = dists.iter().enumerate().filter(|(_, &d)| d <= min + GEOMETRY_TOL);
                let label = close.next().map(|(i, _)| i).unwrap_or(0);
                (label, close.next().is_some())
            })
            .collect();
        let tie_points = per_point.iter().filter(|(_, tie)| *tie).count();
        VoronoiPartition { labels: per_point.into_iter().map(|(l, _)| l).collect(), tie_points }
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    if a.len() == 1 {
        return (a[0] - b[0]).abs();
    }
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Indicator of a subset of a domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask(Vec<bool>);

impl Mask {
    pub fn from_bools(bits: Vec<bool>) -> Self {
        Mask(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: PointId) -> bool {
        self.0[p.0]
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    /// Member indices in ascending order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i)
    }

    pub fn union(&self, other: &Mask) -> Mask {
        Mask(self.0.iter().zip(&other.0).map(|(a, b)| *a || *b).collect())
    }

    pub fn intersection(&self, other: &Mask) -> Mask {
        Mask(self.0.iter().zip(&other.0).map(|(a, b)| *a && *b).collect())
    }

    pub fn complement(&self) -> Mask {
        Mask(self.0.iter().map(|b| !b).collect())
    }

    pub fn is_disjoint(&self, other: &Mask) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| !(*a && *b))
    }

    pub fn as_bools(&self) -> &[bool] {
        &self.0
    }
}

/// Distinct, in-range point indices `x_1, ..., x_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Nodes(Vec<PointId>);

impl Nodes {
    pub fn new(domain: &Domain, nodes: Vec<PointId>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::NoNodes);
        }
        let mut seen = std::collections::BTreeSet::new();
        for &p in &nodes {
            domain.check_point(p)?;
            if !seen.insert(p) {
                return Err(Error::DuplicateNode(p.0));
            }
        }
        Ok(Nodes(nodes))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> PointId {
        self.0[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = PointId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[PointId] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VoronoiPartition {
    /// Node position (0-based) per domain point.
    pub labels: Vec<usize>,
    /// Points equidistant (within tolerance) from two or more nearest nodes.
    pub tie_points: usize,
}

impl VoronoiPartition {
    pub fn cell(&self, node: usize) -> Mask {
        Mask(self.labels.iter().map(|&l| l == node).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn interval_midpoint_rule() {
        let d = Domain::interval(0.0, 1.0, 4).unwrap();
        let xs: Vec<f64> = d.points().map(|p| d.coords(p).unwrap()[0]).collect();
        assert_eq!(xs, vec![0.125, 0.375, 0.625, 0.875]);
        assert!(d.weights().iter().all(|&w| w == 0.25));
        assert_eq!(d.h(), 0.25);
    }

    #[test]
    fn box_product_rule() {
        let d = Domain::build(&DomainSpec::Box { lo: vec![0.0, 0.0], hi: vec![1.0, 1.0], n: vec![2, 2] }).unwrap();
        assert_eq!(d.len(), 4);
        assert!(d.weights().iter().all(|&w| w == 0.25));
        assert_eq!(d.coords(PointId(1)).unwrap(), &[0.25, 0.75]);
        assert!(close(d.total_measure(), 1.0));
    }

    #[test]
    fn build_errors() {
        assert!(matches!(Domain::interval(1.0, 1.0, 4), Err(Error::IntervalBounds { .. })));
        assert!(matches!(Domain::interval(0.0, 1.0, 0), Err(Error::CellCount { axis: 0 })));
        let spec = DomainSpec::Finite {
            dist: vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]],
            weights: vec![1.0; 3],
        };
        match Domain::build(&spec) {
            Err(Error::NotAMetric(msg)) => assert!(msg.contains("(0,1,2)"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn finite_space() {
        let spec = DomainSpec::Finite {
            dist: vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]],
            weights: vec![0.5, 0.25, 0.25],
        };
        let d = Domain::build(&spec).unwrap();
        assert_eq!(d.dist(PointId(0), PointId(2)), 2.0);
        assert_eq!(d.h(), 0.0);
        assert!(d.dim().is_none());
    }

    #[test]
    fn voronoi_ties_go_to_lowest_index() {
        let d = Domain::interval(0.0, 1.0, 100).unwrap();
        let a = d.nearest_point(&[0.25]).unwrap();
        let b = d.nearest_point(&[0.75]).unwrap();
        // both snap to the lower of two equidistant cell centers
        assert!(close(d.coords(a).unwrap()[0], 0.245));
        assert!(close(d.coords(b).unwrap()[0], 0.745));
        let nodes = Nodes::new(&d, vec![a, b]).unwrap();
        let part = d.voronoi_partition(&nodes);
        let at = |x: f64| part.labels[d.nearest_point(&[x]).unwrap().0];
        assert_eq!(at(0.495), 0);
        assert_eq!(at(0.505), 1);
        assert_eq!(part.tie_points, 1);
    }

    #[test]
    fn voronoi_simple_cases() {
        let d = Domain::interval(0.0, 1.0, 10).unwrap();
        let single = Nodes::new(&d, vec![PointId(3)]).unwrap();
        assert!(d.voronoi_partition(&single).labels.iter().all(|&l| l == 0));
        let nodes = Nodes::new(&d, vec![d.nearest_point(&[0.1]).unwrap(), d.nearest_point(&[0.9]).unwrap()]).unwrap();
        assert_eq!(d.voronoi_partition(&nodes).labels[d.nearest_point(&[0.2]).unwrap().0], 0);
    }

    #[test]
    fn nodes_validation() {
        let d = Domain::interval(0.0, 1.0, 10).unwrap();
        assert_eq!(Nodes::new(&d, vec![]), Err(Error::NoNodes));
        assert_eq!(Nodes::new(&d, vec![PointId(1), PointId(1)]), Err(Error::DuplicateNode(1)));
        assert!(matches!(Nodes::new(&d, vec![PointId(10)]), Err(Error::PointOutOfRange { .. })));
    }

    #[test]
    fn ball_examples() {
        let d = Domain::interval(0.0, 1.0, 8).unwrap();
        let c = d.nearest_point(&[0.4375]).unwrap();
        let m = d.ball_mask(c, 0.13).unwrap();
        let xs: Vec<f64> = m.indices().map(|i| d.coords(PointId(i)).unwrap()[0]).collect();
        assert_eq!(xs, vec![0.3125, 0.4375, 0.5625]);
        assert!(close(d.measure_of(&m).unwrap(), 0.375));

        let single = d.ball_mask(c, 0.01).unwrap();
        assert_eq!(single.indices().collect::<Vec<_>>(), vec![c.0]);

        let all = d.ball_mask(c, 10.0).unwrap();
        assert_eq!(all.count(), 8);
        assert!(close(d.measure_of(&all).unwrap(), 1.0));
        assert!(matches!(d.ball_mask(c, 0.0), Err(Error::NonPositiveRadius(_))));
    }

    #[test]
    fn ball_always_contains_its_center() {
        let spec = DomainSpec::Finite { dist: vec![vec![0.0, 1.0], vec![1.0, 0.0]], weights: vec![1.0, 1.0] };
        let d = Domain::build(&spec).unwrap();
        assert_eq!(d.ball_mask(PointId(0), 0.5).unwrap().count(), 1);
    }

    #[test]
    fn measure_examples() {
        let d = Domain::interval(0.0, 1.0, 4).unwrap();
        assert!(close(d.measure_of(&d.full_mask()).unwrap(), 1.0));
        assert_eq!(d.measure_of(&d.empty_mask()).unwrap(), 0.0);
        let d = Domain::interval(0.0, 1.0, 10).unwrap();
        let half = d.mask_where(|p| p.0 % 2 == 0);
        assert!(close(d.measure_of(&half).unwrap(), 0.5));
        assert!(d.measure_of(&Mask::from_bools(vec![true; 3])).is_err());
    }
}
