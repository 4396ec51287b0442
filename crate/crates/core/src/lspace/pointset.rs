//! Finite planar point sets: canonical form, Minkowski arithmetic, convex
//! hulls and the two Hausdorff distances (finite-set and convex-body).

use std::cmp::Ordering;

pub type Point = [f64; 2];

/// A nonempty finite point set in canonical form: lexicographically sorted,
/// exact duplicates removed, `-0.0` normalized to `0.0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet(Vec<Point>);

fn lex(a: &Point, b: &Point) -> Ordering {
    a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]))
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

impl PointSet {
    /// Canonicalizes `points`. Returns `None` for an empty or non-finite input.
    pub fn new(points: Vec<Point>) -> Option<Self> {
        if points.is_empty() || points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return None;
        }
        Some(Self::canonical(points))
    }

    pub fn singleton(p: Point) -> Self {
        Self::canonical(vec![p])
    }

    fn canonical(mut points: Vec<Point>) -> Self {
        for p in points.iter_mut() {
            // adding 0.0 maps -0.0 to 0.0 and leaves everything else alone
            p[0] += 0.0;
            p[1] += 0.0;
        }
        points.sort_by(lex);
        points.dedup();
        PointSet(points)
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.0.len() == 1
    }

    /// Minkowski sum `{a + b}`.
    pub fn minkowski_sum(&self, other: &PointSet) -> PointSet {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for a in &self.0 {
            for b in &other.0 {
                out.push([a[0] + b[0], a[1] + b[1]]);
            }
        }
        Self::canonical(out)
    }

    /// `{alpha * p}`; negative factors reflect through the origin.
    pub fn scale(&self, alpha: f64) -> PointSet {
        if alpha == 0.0 {
            return Self::singleton([0.0, 0.0]);
        }
        Self::canonical(self.0.iter().map(|p| [alpha * p[0], alpha * p[1]]).collect())
    }

    /// Convex hull vertices in counterclockwise order starting from the
    /// lexicographically smallest vertex. Collinear points are dropped, so a
    /// degenerate hull is a single point or a segment's two endpoints.
    pub fn hull_vertices(&self) -> Vec<Point> {
        let pts = &self.0;
        if pts.len() <= 2 {
            return pts.clone();
        }
        let mut lower: Vec<Point> = Vec::with_capacity(pts.len());
        for &p in pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<Point> = Vec::with_capacity(pts.len());
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        if lower.len() == 2 && lower[0] == lower[1] {
            lower.truncate(1);
        }
        lower
    }

    /// The hull vertex set as a canonical point set.
    pub fn convex_hull(&self) -> PointSet {
        Self::canonical(self.hull_vertices())
    }

    /// True when every point is a hull vertex, i.e. the set is the vertex
    /// representation of a convex polygon (or a point or segment).
    pub fn is_hull_form(&self) -> bool {
        self.hull_vertices().len() == self.len()
    }

    /// Support function `max <p, u>`.
    pub fn support(&self, u: Point) -> f64 {
        self.0.iter().map(|p| p[0] * u[0] + p[1] * u[1]).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Hausdorff distance between the finite sets.
    pub fn hausdorff(&self, other: &PointSet) -> f64 {
        let d2 = |p: &Point, q: &Point| {
            let d = sub(*p, *q);
            d[0] * d[0] + d[1] * d[1]
        };
        directed_max(&self.0, other.0.len(), |p, j| d2(p, &other.0[j]))
            .max(directed_max(&other.0, self.0.len(), |p, j| d2(p, &self.0[j])))
            .sqrt()
    }

    /// Hausdorff distance between the convex hulls as filled convex bodies.
    /// The distance to a convex set is a convex function, so each directed
    /// distance is attained at a hull vertex.
    pub fn hull_hausdorff(&self, other: &PointSet) -> f64 {
        let a = self.hull_vertices();
        let b = other.hull_vertices();
        directed_hull(&a, &b).max(directed_hull(&b, &a)).sqrt()
    }
}

/// `max_p min_j d(p, j)` over squared distances. A point stops scanning once
/// it cannot raise the running max; each scan starts at the previous argmin,
/// which is usually close for neighbouring points. Exact.
fn directed_max(from: &[Point], m: usize, d: impl Fn(&Point, usize) -> f64) -> f64 {
    if m == 0 {
        return f64::INFINITY;
    }
    let (mut cmax, mut hint) = (0.0_f64, 0);
    for p in from {
        let (mut best, start) = (f64::INFINITY, hint);
        for k in 0..m {
            let j = (start + k) % m;
            let v = d(p, j);
            if v < best {
                best = v;
                hint = j;
                if best <= cmax {
                    break;
                }
            }
        }
        cmax = cmax.max(best);
    }
    cmax
}

/// Squared directed Hausdorff distance from the vertices `from` to the convex
/// polygon `to` (counterclockwise).
fn directed_hull(from: &[Point], to: &[Point]) -> f64 {
    match to.len() {
        0 => f64::INFINITY,
        1 | 2 => directed_max(from, 1, |p, _| seg_dist2(*p, to[0], to[to.len() - 1])),
        n => {
            // Points inside the polygon are at distance zero.
            let outside: Vec<Point> =
                from.iter().copied().filter(|p| (0..n).any(|i| cross(to[i], to[(i + 1) % n], *p) < 0.0)).collect();
            directed_max(&outside, n, |p, i| seg_dist2(*p, to[i], to[(i + 1) % n]))
        }
    }
}

fn seg_dist2(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let ap = sub(p, a);
    let t = if len2 == 0.0 { 0.0 } else { ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0) };
    let d = sub(p, [a[0] + t * ab[0], a[1] + t * ab[1]]);
    d[0] * d[0] + d[1] * d[1]
}

/// Minkowski sum of two convex polygons given as counterclockwise vertex
/// lists starting at the lexicographically smallest vertex. Runs in
/// `O(n + m)` by merging edge sequences by polar angle. The result may carry
/// nearly collinear vertices; callers prune them with [`PointSet::convex_hull`].
pub(crate) fn convex_minkowski(a: &[Point], b: &[Point]) -> Vec<Point> {
    match (a.len(), b.len()) {
        (0, _) | (_, 0) => return Vec::new(),
        (1, _) => return b.iter().map(|q| [a[0][0] + q[0], a[0][1] + q[1]]).collect(),
        (_, 1) => return a.iter().map(|p| [p[0] + b[0][0], p[1] + b[0][1]]).collect(),
        _ => {}
    }
    // Start both at the bottom-most (then left-most) vertex so edge angles
    // run monotonically through [0, 2pi). Segments are 2-gons.
    let start = |poly: &[Point]| {
        (0..poly.len())
            .min_by(|&i, &j| poly[i][1].total_cmp(&poly[j][1]).then(poly[i][0].total_cmp(&poly[j][0])))
            .unwrap_or(0)
    };
    // Edge angles compared by half-plane first; within a half-plane the
    // cross product is reliable.
    let half = |e: Point| u8::from(!(e[1] > 0.0 || (e[1] == 0.0 && e[0] > 0.0)));
    let (sa, sb) = (start(a), start(b));
    let (n, m) = (a.len(), b.len());
    let at = |i: usize| a[(sa + i) % n];
    let bt = |j: usize| b[(sb + j) % m];
    let mut out = Vec::with_capacity(n + m);
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        let p = at(i);
        let q = bt(j);
        out.push([p[0] + q[0], p[1] + q[1]]);
        let ea = sub(at(i + 1), at(i));
        let eb = sub(bt(j + 1), bt(j));
        let order = if j >= m {
            Ordering::Less
        } else if i >= n {
            Ordering::Greater
        } else if ea == [0.0, 0.0] {
            Ordering::Less
        } else if eb == [0.0, 0.0] {
            Ordering::Greater
        } else {
            half(ea)
                .cmp(&half(eb))
                .then_with(|| 0.0f64.partial_cmp(&(ea[0] * eb[1] - ea[1] * eb[0])).unwrap_or(Ordering::Equal))
        };
        match order {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pts: &[Point]) -> PointSet {
        PointSet::new(pts.to_vec()).unwrap()
    }

    #[test]
    fn canonical_form_sorts_and_dedups() {
        let s = set(&[[1.0, 0.0], [0.0, 0.0], [1.0, 0.0], [-0.0, 2.0]]);
        assert_eq!(s.points(), &[[0.0, 0.0], [0.0, 2.0], [1.0, 0.0]]);
        assert!(PointSet::new(vec![]).is_none());
    }

    #[test]
    fn hull_drops_interior_point() {
        let s = set(&[[0.0, 0.0], [2.0, 0.0], [1.0, 0.5], [0.0, 2.0]]);
        assert_eq!(s.hull_vertices(), vec![[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]]);
        assert!(!s.is_hull_form());
        assert!(s.convex_hull().is_hull_form());
    }

    #[test]
    fn hull_of_collinear_points_is_a_segment() {
        let s = set(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]);
        assert_eq!(s.hull_vertices(), vec![[0.0, 0.0], [2.0, 2.0]]);
    }

    #[test]
    fn finite_and_convex_hausdorff_differ() {
        let seg = set(&[[0.0, 0.0], [2.0, 0.0]]);
        let tri = set(&[[0.0, 0.0], [2.0, 0.0], [1.0, 0.01]]);
        assert!((seg.hausdorff(&tri) - (1.0f64 + 1e-4).sqrt()).abs() < 1e-12);
        assert!((seg.hull_hausdorff(&tri) - 0.01).abs() < 1e-12);
    }

    #[test]
    fn singleton_distance_is_euclidean() {
        assert_eq!(set(&[[0.0, 0.0]]).hausdorff(&set(&[[3.0, 4.0]])), 5.0);
    }

    #[test]
    fn convex_minkowski_matches_brute_force() {
        let a = set(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let b = set(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]]);
        let fast = PointSet::new(convex_minkowski(&a.hull_vertices(), &b.hull_vertices())).unwrap();
        let brute = a.minkowski_sum(&b).convex_hull();
        assert!(fast.hull_hausdorff(&brute) < 1e-12);
        assert_eq!(fast.convex_hull(), brute);
    }

    fn norm(a: Point) -> f64 {
        a[0].hypot(a[1])
    }

    fn brute_hull_hausdorff(a: &PointSet, b: &PointSet) -> f64 {
        let dist_to = |p: Point, poly: &[Point]| -> f64 {
            let n = poly.len();
            if n >= 3 && (0..n).all(|i| cross(poly[i], poly[(i + 1) % n], p) >= 0.0) {
                return 0.0;
            }
            (0..n.max(1)).map(|i| seg_dist2(p, poly[i], poly[(i + 1) % n]).sqrt()).fold(f64::INFINITY, f64::min)
        };
        let (ha, hb) = (a.hull_vertices(), b.hull_vertices());
        let d = |x: &[Point], y: &[Point]| x.iter().map(|p| dist_to(*p, y)).fold(0.0_f64, f64::max);
        d(&ha, &hb).max(d(&hb, &ha))
    }

    #[test]
    fn fast_hausdorff_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let gen = |rng: &mut rand_chacha::ChaCha8Rng| {
                let k = rng.gen_range(1..12);
                PointSet::new((0..k).map(|_| [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]).collect()).unwrap()
            };
            let (a, b) = (gen(&mut rng), gen(&mut rng));
            let brute =
                a.0.iter()
                    .map(|p| b.0.iter().map(|q| norm(sub(*p, *q))).fold(f64::INFINITY, f64::min))
                    .chain(b.0.iter().map(|p| a.0.iter().map(|q| norm(sub(*p, *q))).fold(f64::INFINITY, f64::min)))
                    .fold(0.0_f64, f64::max);
            assert!((a.hausdorff(&b) - brute).abs() < 1e-12, "{a:?} {b:?}");
            let (fast, slow) = (a.hull_hausdorff(&b), brute_hull_hausdorff(&a, &b));
            assert!((fast - slow).abs() < 1e-12, "{a:?} {b:?}: {fast} vs {slow}");
        }
    }

    #[test]
    fn convex_minkowski_handles_points_and_segments() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..2000 {
            let gen = |rng: &mut rand_chacha::ChaCha8Rng| {
                let k = rng.gen_range(1..7);
                // A coarse lattice makes collinear and parallel edges common.
                set(&(0..k).map(|_| [rng.gen_range(-3..=3) as f64, rng.gen_range(-3..=3) as f64]).collect::<Vec<_>>())
            };
            let (a, b) = (gen(&mut rng), gen(&mut rng));
            let fast = PointSet::new(convex_minkowski(&a.hull_vertices(), &b.hull_vertices())).unwrap();
            assert_eq!(fast.convex_hull(), a.minkowski_sum(&b).convex_hull(), "{a:?} + {b:?}");
            // Repeated vertices, as left by scaling a hull by zero.
            let flat = vec![[0.0, 0.0]; a.len()];
            let fast = PointSet::new(convex_minkowski(&flat, &b.hull_vertices())).unwrap();
            assert_eq!(fast.convex_hull(), b.convex_hull(), "0 + {b:?}");
        }
    }
}
