//! L-spaces: semilinear metric spaces whose metric is homogeneous and
//! semi-isotropic, together with a convexifying operator.
//!
//! Four instances ship: the real line, compact intervals, finite planar point
//! sets (both under Minkowski arithmetic and the Hausdorff metric) and the
//! non-isotropic max-plus ray.

mod axioms;
mod element;
mod pointset;

pub use axioms::{
    check_axioms, random_convex_invertible, random_element, AxiomCheck, AxiomReport, Counterexample, Isotropy,
    IsotropyScope,
};
pub use element::{support_gap, ConvexAccumulator, Element, InstanceId};
pub use pointset::{Point, PointSet};

use crate::error::Result;

/// `h(x, y)`.
pub fn dist(x: &Element, y: &Element) -> Result<f64> {
    x.dist(y)
}

/// `alpha * x + y`.
pub fn affine(alpha: f64, x: &Element, y: &Element) -> Result<Element> {
    x.affine(alpha, y)
}

/// The convexifying operator `P`.
pub fn convexify(x: &Element) -> Element {
    x.convexify()
}

pub fn try_invert(x: &Element) -> Option<Element> {
    x.try_invert()
}
