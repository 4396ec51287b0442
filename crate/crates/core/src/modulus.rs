//! Moduli of continuity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SEMI_ADDITIVE_TOL: f64 = 1e-12;

/// A modulus of continuity `omega`: nondecreasing, continuous,
/// semi-additive, vanishing at zero.
///
/// Scenario literal: `{"power": {"K": 2, "alpha": 0.5}}` or
/// `{"piecewise": {"t": [...], "v": [...]}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModulusLiteral", into = "ModulusLiteral")]
pub enum Modulus {
    /// `K t^alpha` with `K > 0`, `0 < alpha <= 1`.
    Power { k: f64, alpha: f64 },
    /// Linear interpolation through `(t[i], v[i])` with `t[0] = 0`,
    /// `v[0] = 0`; extended past the last breakpoint with the final slope.
    PiecewiseLinear { t: Vec<f64>, v: Vec<f64> },
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum ModulusLiteral {
    Power {
        #[serde(rename = "K")]
        k: f64,
        alpha: f64,
    },
    Piecewise {
        t: Vec<f64>,
        v: Vec<f64>,
    },
}

impl TryFrom<ModulusLiteral> for Modulus {
    type Error = Error;

    fn try_from(lit: ModulusLiteral) -> Result<Self> {
        match lit {
            ModulusLiteral::Power { k, alpha } => Modulus::power(k, alpha),
            ModulusLiteral::Piecewise { t, v } => Modulus::piecewise(t, v),
        }
    }
}

impl From<Modulus> for ModulusLiteral {
    fn from(m: Modulus) -> Self {
        match m {
            Modulus::Power { k, alpha } => ModulusLiteral::Power { k, alpha },
            Modulus::PiecewiseLinear { t, v } => ModulusLiteral::Piecewise { t, v },
        }
    }
}

/// A pair `(s, t)` breaking semi-additivity or monotonicity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusViolation {
    pub kind: ViolationKind,
    pub s: f64,
    pub t: f64,
    /// `omega(s + t) - omega(s) - omega(t)` for semi-additivity,
    /// `omega(s) - omega(t)` for monotonicity (with `s < t`).
    pub excess: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Decreasing,
    NotSemiAdditive,
}

impl Modulus {
    pub fn power(k: f64, alpha: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidModulus(format!("power coefficient K = {k} must be positive")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidModulus(format!("power exponent alpha = {alpha} must lie in (0, 1]")));
        }
        Ok(Modulus::Power { k, alpha })
    }

    /// The identity modulus `omega(t) = t`.
    pub fn linear() -> Self {
        Modulus::Power { k: 1.0, alpha: 1.0 }
    }

    pub fn piecewise(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if t.is_empty() || t.len() != v.len() {
            return Err(Error::InvalidModulus("breakpoints and values must be nonempty and of equal length".into()));
        }
        if t.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(Error::InvalidModulus("breakpoints and values must be finite".into()));
        }
        if t[0] != 0.0 || v[0] != 0.0 {
            return Err(Error::InvalidModulus("the first breakpoint must be (0, 0)".into()));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidModulus("breakpoints must be strictly increasing".into()));
        }
        if v.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidModulus("values must be nondecreasing".into()));
        }
        Ok(Modulus::PiecewiseLinear { t, v })
    }

    /// `omega(t)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::NegativeArgument(t));
        }
        Ok(self.eval_unchecked(t))
    }

    /// `omega(t)` for `t >= 0`, without the argument check. Used on hot paths
    /// where `t` is a distance.
    pub fn eval_unchecked(&self, t: f64) -> f64 {
        match self {
            Modulus::Power { k, alpha } => {
                if *alpha == 1.0 {
                    k * t
                } else {
                    k * t.powf(*alpha)
                }
            }
            Modulus::PiecewiseLinear { t: bp, v } => {
                let last = bp.len() - 1;
                if last == 0 {
                    return v[0];
                }
                let seg = match bp.partition_point(|&b| b <= t) {
                    0 => 0,
                    i => (i - 1).min(last - 1),
                };
                let slope = (v[seg + 1] - v[seg]) / (bp[seg + 1] - bp[seg]);
                v[seg] + slope * (t - bp[seg])
            }
        }
    }

    /// Smallest `L` with `omega(t) <= L t`, when finite. Hölder powers with
    /// `alpha < 1` have none.
    pub fn lipschitz_bound(&self) -> Option<f64> {
        match self {
            Modulus::Power { k, alpha } if *alpha == 1.0 => Some(*k),
            Modulus::Power { .. } => None,
            Modulus::PiecewiseLinear { t, v } => Some(
                t.windows(2).zip(v.windows(2)).map(|(tw, vw)| (vw[1] - vw[0]) / (tw[1] - tw[0])).fold(0.0, f64::max),
            ),
        }
    }

    /// Discretization slack for a grid of mesh `h`: `L h` for Lipschitz
    /// moduli, `omega(h)` otherwise.
    pub fn grid_slack(&self, h: f64) -> f64 {
        match self.lipschitz_bound() {
            Some(l) => l * h,
            None => self.eval_unchecked(h),
        }
    }

    /// Checks monotonicity and semi-additivity. Power moduli with
    /// `alpha <= 1` pass analytically; piecewise moduli are checked on every
    /// pair of a uniform grid of `grid_points` points over `[0, 2 t_max]`,
    /// `t_max` being the last breakpoint. The grid search is sound only for
    /// the sampled pairs.
    ///
    /// The reported semi-additivity witness maximizes the relative excess
    /// `(omega(s + t) - omega(s) - omega(t)) / (s + t)`, earliest pair first.
    pub fn validate(&self, grid_points: usize) -> std::result::Result<(), ModulusViolation> {
        let (t, _) = match self {
            Modulus::Power { .. } => return Ok(()),
            Modulus::PiecewiseLinear { t, v } => (t, v),
        };
        let n = grid_points.max(2);
        let t_max = t[t.len() - 1].max(f64::MIN_POSITIVE);
        let grid: Vec<f64> = (0..n).map(|i| 2.0 * t_max * i as f64 / (n - 1) as f64).collect();
        let values: Vec<f64> = grid.iter().map(|&g| self.eval_unchecked(g)).collect();

        for i in 1..n {
            if values[i] < values[i - 1] - SEMI_ADDITIVE_TOL {
                return Err(ModulusViolation {
                    kind: ViolationKind::Decreasing,
                    s: grid[i - 1],
                    t: grid[i],
                    excess: values[i - 1] - values[i],
                });
            }
        }

        let mut worst: Option<(f64, ModulusViolation)> = None;
        for i in 1..n {
            for j in i..n {
                let (s, u) = (grid[i], grid[j]);
                let excess = self.eval_unchecked(s + u) - values[i] - values[j];
                if excess > SEMI_ADDITIVE_TOL {
                    let rate = excess / (s + u);
                    if worst.as_ref().is_none_or(|(r, _)| rate > r + SEMI_ADDITIVE_TOL) {
                        worst =
                            Some((rate, ModulusViolation { kind: ViolationKind::NotSemiAdditive, s, t: u, excess }));
                    }
                }
            }
        }
        match worst {
            Some((_, v)) => Err(v),
            None => Ok(()),
        }
    }
}
