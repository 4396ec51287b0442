//! Lebesgue integral of L-space valued functions on a finite domain.
//!
//! Every function on a finite domain is simple, so the integral is the sum
//! of `P(f(t)) * mu({t})` over the integration set, accumulated in ascending
//! point order and convexified once more at the end.

use serde::Serialize;

use crate::domain::{Domain, Mask, PointId};
use crate::error::{Error, Result};
use crate::lspace::{ConvexAccumulator, Element, InstanceId};

/// One element per domain point, all from the same instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LFunction {
    #[serde(skip)]
    instance: InstanceId,
    values: Vec<Element>,
}

impl LFunction {
    pub fn new(values: Vec<Element>) -> Result<Self> {
        let instance = values
            .first()
            .map(Element::instance)
            .ok_or_else(|| Error::InvalidDomain("function needs at least one value".into()))?;
        if let Some(bad) = values.iter().find(|v| v.instance() != instance) {
            return Err(Error::InstanceMismatch { expected: instance, found: bad.instance() });
        }
        Ok(LFunction { instance, values })
    }

    /// Samples `f` at every point of `domain`.
    pub fn sample(domain: &Domain, mut f: impl FnMut(PointId) -> Element) -> Result<Self> {
        Self::new(domain.points().map(&mut f).collect())
    }

    pub fn constant(domain: &Domain, x: &Element) -> Self {
        LFunction { instance: x.instance(), values: vec![x.clone(); domain.len()] }
    }

    pub fn instance(&self) -> InstanceId {
        self.instance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, p: PointId) -> &Element {
        &self.values[p.0]
    }

    pub fn values(&self) -> &[Element] {
        &self.values
    }

    pub fn check_domain(&self, domain: &Domain) -> Result<()> {
        if self.values.len() == domain.len() {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: domain.len(), found: self.values.len() })
        }
    }

    /// Pointwise `alpha f + beta g`.
    pub fn combine(&self, alpha: f64, other: &LFunction, beta: f64) -> Result<LFunction> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), found: other.len() });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(f, g)| f.scale(alpha).add(&g.scale(beta)))
            .collect::<Result<Vec<_>>>()?;
        Ok(LFunction { instance: self.instance, values })
    }

    /// Pointwise `u(t) f(t)` for a real profile `u`.
    pub fn scale_by(&self, u: &[f64]) -> Result<LFunction> {
        if u.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), found: u.len() });
        }
        let values = self.values.iter().zip(u).map(|(f, &s)| f.scale(s)).collect();
        Ok(LFunction { instance: self.instance, values })
    }
}

/// `int_mask f dmu`. An empty mask integrates to zero.
pub fn integrate(domain: &Domain, f: &LFunction, mask: &Mask) -> Result<Element> {
    f.check_domain(domain)?;
    domain.check_mask(mask)?;
    let mut acc = ConvexAccumulator::new(f.instance());
    for i in mask.indices() {
        acc.add_scaled(domain.weights()[i], &f.values[i])?;
    }
    Ok(acc.finish())
}

/// `(1 / mu(mask)) int_mask f dmu`.
pub fn mean_value(domain: &Domain, f: &LFunction, mask: &Mask) -> Result<Element> {
    let measure = domain.measure_of(mask)?;
    if measure <= 0.0 {
        return Err(Error::ZeroMeasure);
    }
    Ok(integrate(domain, f, mask)?.scale(1.0 / measure))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Domain {
        Domain::interval(0.0, 1.0, n).unwrap()
    }

    fn x(d: &Domain, p: PointId) -> f64 {
        d.coords(p).unwrap()[0]
    }

    #[test]
    fn linear_interval_endpoints_integrate_exactly() {
        let d = grid(1000);
        let f = LFunction::sample(&d, |p| Element::interval(x(&d, p), x(&d, p) + 1.0).unwrap()).unwrap();
        let v = integrate(&d, &f, &d.full_mask()).unwrap();
        match v {
            Element::Interval(a, b) => {
                assert!((a - 0.5).abs() < 1e-12 && (b - 1.5).abs() < 1e-12, "{v}");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn constant_segment_integrates_to_its_hull() {
        let d = grid(1000);
        let seg = Element::points(vec![[0.0, 0.0], [1.0, 1.0]]).unwrap();
        let v = integrate(&d, &LFunction::constant(&d, &seg), &d.full_mask()).unwrap();
        assert!(v.hull_dist(&seg).unwrap() < 1e-12);
        assert_eq!(v.as_point_set().unwrap().hull_vertices().len(), 2);
    }

    #[test]
    fn empty_mask_gives_zero() {
        let d = grid(10);
        let f = LFunction::constant(&d, &Element::Interval(1.0, 2.0));
        assert_eq!(integrate(&d, &f, &d.empty_mask()).unwrap(), Element::Interval(0.0, 0.0));
        assert_eq!(mean_value(&d, &f, &d.empty_mask()), Err(Error::ZeroMeasure));
    }

    #[test]
    fn mean_value_examples() {
        let d = grid(1000);
        let tri = Element::points(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.1, 0.1]]).unwrap();
        let ball = d.ball_mask(PointId(300), 0.05).unwrap();
        let m = mean_value(&d, &LFunction::constant(&d, &tri), &ball).unwrap();
        assert!(m.hull_dist(&tri.convexify()).unwrap() < 1e-12);

        let f = LFunction::sample(&d, |p| Element::interval(0.0, x(&d, p)).unwrap()).unwrap();
        let m = mean_value(&d, &f, &d.full_mask()).unwrap();
        assert!(m.dist(&Element::Interval(0.0, 0.5)).unwrap() < 1e-12);

        let f = LFunction::sample(&d, |p| Element::points(vec![[x(&d, p), 0.0]]).unwrap()).unwrap();
        let m = mean_value(&d, &f, &d.full_mask()).unwrap();
        assert!(m.dist(&Element::points(vec![[0.5, 0.0]]).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let d = grid(10);
        let f = LFunction::constant(&grid(5), &Element::Real(1.0));
        assert!(matches!(integrate(&d, &f, &d.full_mask()), Err(Error::LengthMismatch { .. })));
        assert!(LFunction::new(vec![Element::Real(1.0), Element::MaxPlus(1.0)]).is_err());
    }
}
