//! Tolerances and compensated summation shared by every module.

/// Absolute tolerance for element equality.
pub const ELEMENT_TOL: f64 = 1e-9;

/// Slack used when comparing distances against closed-ball radii and
/// nearest-node ties, so grid points placed on a boundary by construction
/// are not dropped by rounding.
pub const GEOMETRY_TOL: f64 = 1e-12;

/// Bisection tolerance for the truncation radius of the radial extremal.
pub const BISECTION_TOL: f64 = 1e-12;

/// Neumaier-compensated running sum. Summation order is the call order, so
/// results are reproducible for a fixed input sequence.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.carry += (self.sum - t) + value;
        } else {
            self.carry += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<CompensatedSum>().value()
}

pub(crate) fn pos_part(v: f64) -> f64 {
    v.max(0.0)
}

pub(crate) fn neg_part(v: f64) -> f64 {
    (-v).max(0.0)
}
