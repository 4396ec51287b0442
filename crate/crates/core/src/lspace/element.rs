use std::fmt;

use serde::{Deserialize, Serialize};

use super::pointset::{convex_minkowski, Point, PointSet};
use crate::error::{Error, Result};
use crate::numeric::ELEMENT_TOL;

/// The four concrete L-spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceId {
    /// The real line with its usual operations.
    RealLine,
    /// Compact intervals under Minkowski arithmetic and the Hausdorff metric.
    IntervalSpace,
    /// Finite nonempty planar point sets under Minkowski arithmetic.
    #[serde(rename = "point_set_2d")]
    PointSet2D,
    /// `[0, inf)` with `x + y = max(x, y)` and `a * x = |a| x`.
    MaxPlusRay,
}

impl InstanceId {
    pub const ALL: [InstanceId; 4] =
        [InstanceId::RealLine, InstanceId::IntervalSpace, InstanceId::PointSet2D, InstanceId::MaxPlusRay];

    pub fn zero(self) -> Element {
        match self {
            InstanceId::RealLine => Element::Real(0.0),
            InstanceId::IntervalSpace => Element::Interval(0.0, 0.0),
            InstanceId::PointSet2D => Element::Points(PointSet::singleton([0.0, 0.0])),
            InstanceId::MaxPlusRay => Element::MaxPlus(0.0),
        }
    }

    /// Whether the semi-isotropy inequality is an equality. For point sets
    /// this holds on the convex elements, where every recovery computation
    /// takes place; see [`super::check_axioms`].
    pub fn is_isotropic(self) -> bool {
        !matches!(self, InstanceId::MaxPlusRay)
    }

    /// A convex invertible element at distance one from zero, when the
    /// instance has one.
    pub fn unit_element(self) -> Option<Element> {
        match self {
            InstanceId::RealLine => Some(Element::Real(1.0)),
            InstanceId::IntervalSpace => Some(Element::Interval(1.0, 1.0)),
            InstanceId::PointSet2D => Some(Element::Points(PointSet::singleton([1.0, 0.0]))),
            InstanceId::MaxPlusRay => None,
        }
    }
}

impl fmt::Display for InstanceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            InstanceId::RealLine => "real line",
            InstanceId::IntervalSpace => "interval space",
            InstanceId::PointSet2D => "planar point sets",
            InstanceId::MaxPlusRay => "max-plus ray",
        };
        f.write_str(name)
    }
}

/// A value in one of the concrete L-spaces.
///
/// Serialized as a tagged literal: `{"real": 1.5}`, `{"interval": [a, b]}`,
/// `{"points": [[x, y], ...]}` or `{"maxplus": v}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementLiteral", into = "ElementLiteral")]
pub enum Element {
    Real(f64),
    /// Endpoints `lo <= hi`.
    Interval(f64, f64),
    Points(PointSet),
    /// Payload `>= 0`.
    MaxPlus(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum ElementLiteral {
    Real(f64),
    Interval([f64; 2]),
    Points(Vec<Point>),
    #[serde(rename = "maxplus")]
    MaxPlus(f64),
}

impl TryFrom<ElementLiteral> for Element {
    type Error = Error;

    fn try_from(lit: ElementLiteral) -> Result<Self> {
        match lit {
            ElementLiteral::Real(v) => Element::real(v),
            ElementLiteral::Interval([a, b]) => Element::interval(a, b),
            ElementLiteral::Points(pts) => Element::points(pts),
            ElementLiteral::MaxPlus(v) => Element::maxplus(v),
        }
    }
}

impl From<Element> for ElementLiteral {
    fn from(e: Element) -> Self {
        match e {
            Element::Real(v) => ElementLiteral::Real(v),
            Element::Interval(a, b) => ElementLiteral::Interval([a, b]),
            Element::Points(s) => ElementLiteral::Points(s.points().to_vec()),
            Element::MaxPlus(v) => ElementLiteral::MaxPlus(v),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Real(v) => write!(f, "{v}"),
            Element::Interval(a, b) => write!(f, "[{a}, {b}]"),
            Element::Points(s) => {
                f.write_str("{")?;
                for (i, p) in s.points().iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "({}, {})", p[0], p[1])?;
                }
                f.write_str("}")
            }
            Element::MaxPlus(v) => write!(f, "{v}"),
        }
    }
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidElement(format!("{what} must be finite, got {v}")))
    }
}

impl Element {
    pub fn real(v: f64) -> Result<Self> {
        Ok(Element::Real(finite(v, "real value")?))
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        let (a, b) = (finite(a, "interval endpoint")?, finite(b, "interval endpoint")?);
        if a > b {
            return Err(Error::InvalidElement(format!("interval [{a}, {b}] has a > b")));
        }
        Ok(Element::Interval(a, b))
    }

    pub fn points(pts: Vec<Point>) -> Result<Self> {
        PointSet::new(pts)
            .map(Element::Points)
            .ok_or_else(|| Error::InvalidElement("point set must be nonempty with finite coordinates".into()))
    }

    pub fn maxplus(v: f64) -> Result<Self> {
        let v = finite(v, "max-plus value")?;
        if v < 0.0 {
            return Err(Error::InvalidElement(format!("max-plus value {v} is negative")));
        }
        Ok(Element::MaxPlus(v))
    }

    pub fn instance(&self) -> InstanceId {
        match self {
            Element::Real(_) => InstanceId::RealLine,
            Element::Interval(..) => InstanceId::IntervalSpace,
            Element::Points(_) => InstanceId::PointSet2D,
            Element::MaxPlus(_) => InstanceId::MaxPlusRay,
        }
    }

    fn same_instance(&self, other: &Element) -> Result<()> {
        if self.instance() == other.instance() {
            Ok(())
        } else {
            Err(Error::InstanceMismatch { expected: self.instance(), found: other.instance() })
        }
    }

    /// The instance metric. For point sets this is the Hausdorff distance
    /// between the finite sets.
    pub fn dist(&self, other: &Element) -> Result<f64> {
        self.same_instance(other)?;
        Ok(match (self, other) {
            (Element::Real(x), Element::Real(y)) => (x - y).abs(),
            (Element::Interval(a, b), Element::Interval(c, d)) => (a - c).abs().max((b - d).abs()),
            (Element::Points(a), Element::Points(b)) => a.hausdorff(b),
            (Element::MaxPlus(x), Element::MaxPlus(y)) => (x - y).abs(),
            _ => unreachable!("instances checked above"),
        })
    }

    /// Distance between the convexified elements, `dist(P(x), P(y))`, with
    /// point-set hulls compared as filled convex bodies. This is the metric
    /// of the convex part of the space, in which integrals and measurements
    /// take their values.
    pub fn hull_dist(&self, other: &Element) -> Result<f64> {
        self.same_instance(other)?;
        match (self, other) {
            (Element::Points(a), Element::Points(b)) => Ok(a.hull_hausdorff(b)),
            _ => self.convexify().dist(&other.convexify()),
        }
    }

    pub fn dist_to_zero(&self) -> f64 {
        self.dist(&self.instance().zero()).expect("zero shares the instance")
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.same_instance(other)?;
        Ok(match (self, other) {
            (Element::Real(x), Element::Real(y)) => Element::Real(x + y),
            (Element::Interval(a, b), Element::Interval(c, d)) => Element::Interval(a + c, b + d),
            (Element::Points(a), Element::Points(b)) => Element::Points(a.minkowski_sum(b)),
            (Element::MaxPlus(x), Element::MaxPlus(y)) => Element::MaxPlus(x.max(*y)),
            _ => unreachable!("instances checked above"),
        })
    }

    pub fn scale(&self, alpha: f64) -> Element {
        match self {
            Element::Real(x) => Element::Real(alpha * x),
            Element::Interval(a, b) => {
                if alpha >= 0.0 {
                    Element::Interval(alpha * a + 0.0, alpha * b + 0.0)
                } else {
                    Element::Interval(alpha * b + 0.0, alpha * a + 0.0)
                }
            }
            Element::Points(s) => Element::Points(s.scale(alpha)),
            Element::MaxPlus(x) => Element::MaxPlus(alpha.abs() * x + 0.0),
        }
    }

    /// `alpha * self + y`.
    pub fn affine(&self, alpha: f64, y: &Element) -> Result<Element> {
        self.scale(alpha).add(y)
    }

    /// The convexifying operator: identity on reals and intervals, convex
    /// hull for point sets, and the constant map to zero on the max-plus ray
    /// (whose only convex element is zero).
    pub fn convexify(&self) -> Element {
        match self {
            Element::Points(s) => Element::Points(s.convex_hull()),
            Element::MaxPlus(_) => Element::MaxPlus(0.0),
            other => other.clone(),
        }
    }

    /// `(a + b) x = a x + b x` for all `a, b >= 0`. Point sets count as
    /// convex when they are the vertex set of their own hull.
    pub fn is_convex(&self) -> bool {
        match self {
            Element::Real(_) | Element::Interval(..) => true,
            Element::Points(s) => s.is_hull_form(),
            Element::MaxPlus(x) => *x == 0.0,
        }
    }

    /// The element `x'` with `x + x' = 0`, if one exists.
    pub fn try_invert(&self) -> Option<Element> {
        match self {
            Element::Real(x) => Some(Element::Real(-x)),
            Element::Interval(a, b) if b - a <= ELEMENT_TOL => Some(Element::Interval(-b + 0.0, -a + 0.0)),
            Element::Interval(..) => None,
            Element::Points(s) if s.is_singleton() => {
                let p = s.points()[0];
                Some(Element::Points(PointSet::singleton([-p[0], -p[1]])))
            }
            Element::Points(_) => None,
            Element::MaxPlus(x) if *x == 0.0 => Some(Element::MaxPlus(0.0)),
            Element::MaxPlus(_) => None,
        }
    }

    /// Equality up to `tol` in the instance metric.
    pub fn approx_eq(&self, other: &Element, tol: f64) -> bool {
        self.dist(other).map(|d| d <= tol).unwrap_or(false)
    }

    pub fn as_point_set(&self) -> Option<&PointSet> {
        match self {
            Element::Points(s) => Some(s),
            _ => None,
        }
    }

    /// Support function of a point set in direction `u`; reals and intervals
    /// are embedded on the first axis.
    pub fn support(&self, u: Point) -> f64 {
        match self {
            Element::Real(x) => x * u[0],
            Element::Interval(a, b) => (a * u[0]).max(b * u[0]),
            Element::Points(s) => s.support(u),
            Element::MaxPlus(x) => x * u[0],
        }
    }
}

/// Largest discrepancy of the support functions of `a` and `b` over
/// `directions` evenly spaced unit vectors.
pub fn support_gap(a: &Element, b: &Element, directions: usize) -> f64 {
    (0..directions)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / directions as f64;
            let u = [angle.cos(), angle.sin()];
            (a.support(u) - b.support(u)).abs()
        })
        .fold(0.0, f64::max)
}

/// Sums convex elements, keeping point-set results in hull form.
///
/// Point-set hulls are added with the linear-time convex Minkowski sum;
/// every `PRUNE_EVERY` additions the running polygon is re-canonicalized to
/// drop nearly collinear vertices. The hull of a Minkowski sum of hulls is
/// the hull of the Minkowski sum, so pruning never changes the value.
#[derive(Debug, Clone)]
pub struct ConvexAccumulator {
    acc: Element,
    hull: Option<Vec<Point>>,
    pending: usize,
}

const PRUNE_EVERY: usize = 64;

impl ConvexAccumulator {
    pub fn new(instance: InstanceId) -> Self {
        let acc = instance.zero();
        let hull = acc.as_point_set().map(PointSet::hull_vertices);
        Self { acc, hull, pending: 0 }
    }

    /// Adds `P(x)` scaled by `weight >= 0`.
    pub fn add_scaled(&mut self, weight: f64, x: &Element) -> Result<()> {
        self.acc.same_instance(x)?;
        match (&mut self.hull, x) {
            (Some(hull), Element::Points(s)) => {
                let term: Vec<Point> = s.hull_vertices().iter().map(|p| [weight * p[0], weight * p[1]]).collect();
                let term = if weight < 0.0 { PointSet::new(term).unwrap().hull_vertices() } else { term };
                *hull = convex_minkowski(hull, &term);
                self.pending += 1;
                if self.pending >= PRUNE_EVERY {
                    *hull = PointSet::new(std::mem::take(hull)).unwrap().hull_vertices();
                    self.pending = 0;
                }
            }
            _ => {
                self.acc = self.acc.add(&x.convexify().scale(weight))?;
            }
        }
        Ok(())
    }

    /// The accumulated value, convexified once more.
    pub fn finish(self) -> Element {
        match self.hull {
            Some(hull) => Element::Points(PointSet::new(hull).unwrap().convex_hull()),
            None => self.acc.convexify(),
        }
    }
}
