//! Scenario files: what to build and which problem to solve.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use lrecover_core::extremal::{omega_bump, random_holder_function};
use lrecover_core::lintegral::LFunction;
use lrecover_core::recovery::Measurement;
use lrecover_core::{
    Domain, DomainSpec, Element, Functional, InstanceId, LambdaPhiOperator, Mask, Modulus, Nodes, PointId,
    ScalarProfile,
};

use crate::failure::Failure;

/// Number of grid points per axis used to validate piecewise moduli.
const MODULUS_CHECK_POINTS: usize = 400;

/// A point of the domain: a coordinate on an interval, a coordinate vector
/// on a box, or an explicit index. Coordinates snap to the nearest grid
/// point, ties to the lowest index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointRef {
    Coord(f64),
    Coords(Vec<f64>),
    Index { index: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MaskSpec {
    #[default]
    Full,
    Ball {
        center: PointRef,
        radius: f64,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Indices(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ChiSpec {
    Indicator(MaskSpec),
    Values(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpTerm {
    pub center: PointRef,
    #[serde(default = "one")]
    pub coefficient: f64,
    pub element: Element,
}

fn one() -> f64 {
    1.0
}

/// Closed-form function expressions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionExpr {
    Constant(Element),
    /// `base + sum_j c_j omega(r(center_j, .)) element_j`.
    Bumps {
        #[serde(default)]
        base: Option<Element>,
        terms: Vec<BumpTerm>,
    },
    /// `[lo_0 + lo . x, hi_0 + hi . x]` with coefficient vectors
    /// `[c_0, c_1, ..., c_d]`.
    IntervalAffine {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// `c_0 + c . x`.
    RealAffine(Vec<f64>),
    /// A seeded random member of the class.
    RandomBumps {
        #[serde(default = "default_terms")]
        terms: usize,
    },
}

fn default_terms() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSpec {
    #[serde(default = "LambdaPhiOperator::integral")]
    pub operator: LambdaPhiOperator,
    pub chi: ChiSpec,
}

fn default_trials() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Problem {
    Axioms {
        #[serde(default = "default_trials")]
        trials: usize,
    },
    Ostrowski {
        t: PointRef,
        chi: ChiSpec,
        #[serde(default = "LambdaPhiOperator::integral")]
        operator: LambdaPhiOperator,
    },
    RecoverIntegral {
        nodes: Vec<PointRef>,
        #[serde(default)]
        q: MaskSpec,
    },
    RecoverValue {
        t: PointRef,
        measurements: Vec<MeasurementSpec>,
    },
    RecoverUniform {
        nodes: Vec<PointRef>,
        eps: f64,
    },
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::Axioms { .. } => "axioms",
            Problem::Ostrowski { .. } => "ostrowski",
            Problem::RecoverIntegral { .. } => "recover_integral",
            Problem::RecoverValue { .. } => "recover_value",
            Problem::RecoverUniform { .. } => "recover_uniform",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub instance: InstanceId,
    pub modulus: Option<Modulus>,
    pub domain: Option<DomainSpec>,
    pub problem: Problem,
    pub function: Option<FunctionExpr>,
    pub seed: u64,
}

const FIELDS: [&str; 7] = ["schema_version", "instance", "modulus", "domain", "problem", "function", "seed"];

fn field<T: DeserializeOwned>(obj: &serde_json::Map<String, Value>, name: &str) -> Result<Option<T>, Failure> {
    obj.get(name)
        .map(|v| serde_json::from_value(v.clone()).map_err(|e| Failure::validation(format!("{name}: {e}"))))
        .transpose()
}

fn required<T: DeserializeOwned>(obj: &serde_json::Map<String, Value>, name: &str) -> Result<T, Failure> {
    field(obj, name)?.ok_or_else(|| Failure::validation(format!("{name}: missing field")))
}

impl Scenario {
    /// Parses a scenario, naming the offending top-level field on failure.
    pub fn from_value(v: &Value) -> Result<Scenario, Failure> {
        let obj = v.as_object().ok_or_else(|| Failure::validation("scenario: expected a JSON object"))?;
        if let Some(k) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
            return Err(Failure::validation(format!("{k}: unknown field")));
        }
        if let Some(version) = field::<u64>(obj, "schema_version")? {
            if version != 1 {
                return Err(Failure::validation(format!("schema_version: unsupported version {version}")));
            }
        }
        let scenario = Scenario {
            instance: required(obj, "instance")?,
            modulus: field(obj, "modulus")?,
            domain: field(obj, "domain")?,
            problem: required(obj, "problem")?,
            function: field(obj, "function")?,
            seed: field(obj, "seed")?.unwrap_or(0),
        };
        if let Some(Modulus::PiecewiseLinear { .. }) = &scenario.modulus {
            let m = scenario.modulus.as_ref().expect("present");
            if let Err(v) = m.validate(MODULUS_CHECK_POINTS) {
                return Err(Failure::validation(format!(
                    "modulus: {:?} at s = {}, t = {} (excess {})",
                    v.kind, v.s, v.t, v.excess
                )));
            }
        }
        Ok(scenario)
    }

    pub fn modulus(&self) -> Result<&Modulus, Failure> {
        self.modulus
            .as_ref()
            .ok_or_else(|| Failure::validation(format!("modulus: required for {}", self.problem.name())))
    }

    pub fn build_domain(&self) -> Result<Domain, Failure> {
        let spec = self
            .domain
            .as_ref()
            .ok_or_else(|| Failure::validation(format!("domain: required for {}", self.problem.name())))?;
        Domain::build(spec).map_err(|e| Failure::validation(format!("domain: {e}")))
    }
}

pub fn resolve_point(d: &Domain, p: &PointRef, what: &str) -> Result<PointId, Failure> {
    let coords: Vec<f64> = match p {
        PointRef::Index { index } => {
            return d.check_point(PointId(*index)).map_err(|e| Failure::validation(format!("{what}: {e}")))
        }
        PointRef::Coord(x) => vec![*x],
        PointRef::Coords(xs) => xs.clone(),
    };
    let (lo, hi) = d
        .bounds()
        .ok_or_else(|| Failure::validation(format!("{what}: metric-space points are given as {{\"index\": k}}")))?;
    if coords.len() != lo.len() {
        return Err(Failure::validation(format!(
            "{what}: {} coordinates for a {}-dimensional domain",
            coords.len(),
            lo.len()
        )));
    }
    if let Some(k) = (0..lo.len()).find(|&k| !(lo[k] <= coords[k] && coords[k] <= hi[k])) {
        return Err(Failure::validation(format!(
            "{what}: coordinate {} lies outside [{}, {}]",
            coords[k], lo[k], hi[k]
        )));
    }
    d.nearest_point(&coords).map_err(|e| Failure::validation(format!("{what}: {e}")))
}

pub fn resolve_nodes(d: &Domain, refs: &[PointRef], what: &str) -> Result<Nodes, Failure> {
    let pts = refs
        .iter()
        .enumerate()
        .map(|(i, p)| resolve_point(d, p, &format!("{what}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Nodes::new(d, pts).map_err(|e| Failure::validation(format!("{what}: {e}")))
}

pub fn resolve_mask(d: &Domain, spec: &MaskSpec, what: &str) -> Result<Mask, Failure> {
    let invalid = |e: lrecover_core::Error| Failure::validation(format!("{what}: {e}"));
    match spec {
        MaskSpec::Full => Ok(d.full_mask()),
        MaskSpec::Ball { center, radius } => {
            let c = resolve_point(d, center, &format!("{what}.center"))?;
            d.ball_mask(c, *radius).map_err(invalid)
        }
        MaskSpec::Box { lo, hi } => {
            let dim = d.dim().ok_or_else(|| Failure::validation(format!("{what}: box masks need a grid domain")))?;
            if lo.len() != dim || hi.len() != dim {
                return Err(Failure::validation(format!("{what}: box needs {dim} coordinates per corner")));
            }
            let tol = lrecover_core::numeric::GEOMETRY_TOL;
            Ok(d.mask_where(|p| {
                let c = d.coords(p).expect("grid");
                (0..dim).all(|k| lo[k] - tol <= c[k] && c[k] <= hi[k] + tol)
            }))
        }
        MaskSpec::Indices(ix) => {
            let mut bits = vec![false; d.len()];
            for &i in ix {
                d.check_point(PointId(i)).map_err(invalid)?;
                bits[i] = true;
            }
            Ok(Mask::from_bools(bits))
        }
    }
}

pub fn resolve_chi(d: &Domain, spec: &ChiSpec, what: &str) -> Result<ScalarProfile, Failure> {
    let profile = match spec {
        ChiSpec::Indicator(mask) => {
            let mask = resolve_mask(d, mask, what)?;
            ScalarProfile::new(mask.as_bools().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
        }
        ChiSpec::Values(v) => ScalarProfile::new(v.clone()),
    };
    let profile = profile.map_err(|e| Failure::validation(format!("{what}: {e}")))?;
    profile.check_domain(d).map_err(|e| Failure::validation(format!("{what}: {e}")))?;
    profile.check_nonnegative().map_err(|e| Failure::validation(format!("{what}: {e}")))?;
    Ok(profile)
}

pub fn resolve_measurements(d: &Domain, specs: &[MeasurementSpec]) -> Result<Vec<Measurement>, Failure> {
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let what = format!("problem.measurements[{i}]");
            s.operator.validate().map_err(|e| Failure::validation(format!("{what}.operator: {e}")))?;
            if let Functional::WeightedL1(_) = s.operator.functional() {
                s.operator
                    .functional()
                    .validate(d)
                    .map_err(|e| Failure::validation(format!("{what}.operator: {e}")))?;
            }
            Ok(Measurement { op: s.operator.clone(), chi: resolve_chi(d, &s.chi, &format!("{what}.chi"))? })
        })
        .collect()
}

fn affine(d: &Domain, coef: &[f64], p: PointId, what: &str) -> Result<f64, Failure> {
    let x = d.coords(p).ok_or_else(|| Failure::validation(format!("{what}: affine expressions need a grid domain")))?;
    if coef.len() != x.len() + 1 {
        return Err(Failure::validation(format!("{what}: expected {} coefficients, got {}", x.len() + 1, coef.len())));
    }
    Ok(coef[0] + coef[1..].iter().zip(x).map(|(c, v)| c * v).sum::<f64>())
}

pub fn build_function(
    d: &Domain,
    m: &Modulus,
    instance: InstanceId,
    expr: &FunctionExpr,
    seed: u64,
) -> Result<LFunction, Failure> {
    let what = "function";
    let invalid = |e: lrecover_core::Error| Failure::validation(format!("{what}: {e}"));
    let f = match expr {
        FunctionExpr::Constant(x) => LFunction::constant(d, x),
        FunctionExpr::Bumps { base, terms } => {
            let mut acc = LFunction::constant(d, base.as_ref().unwrap_or(&instance.zero()));
            for (j, term) in terms.iter().enumerate() {
                if !(term.coefficient >= 0.0) {
                    return Err(Failure::validation(format!("{what}.terms[{j}].coefficient: must be nonnegative")));
                }
                let c = resolve_point(d, &term.center, &format!("{what}.terms[{j}].center"))?;
                let bump = omega_bump(d, m, c, &term.element)
                    .map_err(|e| Failure::validation(format!("{what}.terms[{j}].element: {e}")))?;
                acc = acc.combine(1.0, &bump, term.coefficient).map_err(invalid)?;
            }
            acc
        }
        FunctionExpr::IntervalAffine { lo, hi } => {
            let values = d
                .points()
                .map(|p| {
                    let (a, b) = (affine(d, lo, p, what)?, affine(d, hi, p, what)?);
                    Element::interval(a, b).map_err(invalid)
                })
                .collect::<Result<Vec<_>, _>>()?;
            LFunction::new(values).map_err(invalid)?
        }
        FunctionExpr::RealAffine(c) => {
            let values =
                d.points().map(|p| Ok(Element::Real(affine(d, c, p, what)?))).collect::<Result<Vec<_>, Failure>>()?;
            LFunction::new(values).map_err(invalid)?
        }
        FunctionExpr::RandomBumps { terms } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_holder_function(d, m, instance, *terms, &mut rng).map_err(invalid)?
        }
    };
    if f.instance() != instance {
        return Err(Failure::validation(format!(
            "{what}: values belong to {}, scenario uses {instance}",
            f.instance()
        )));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn base() -> Value {
        json!({
            "instance": "interval_space",
            "modulus": { "power": { "K": 1.0, "alpha": 1.0 } },
            "domain": { "interval": { "a": 0.0, "b": 1.0, "n": 8 } },
            "problem": { "recover_integral": { "nodes": [0.5] } }
        })
    }

    #[test]
    fn defaults_are_filled_in() {
        let s = Scenario::from_value(&base()).unwrap();
        assert_eq!(s.seed, 0);
        assert_eq!(s.problem, Problem::RecoverIntegral { nodes: vec![PointRef::Coord(0.5)], q: MaskSpec::Full });
        let s = Scenario::from_value(&json!({ "instance": "real_line", "problem": { "axioms": {} } })).unwrap();
        assert_eq!(s.problem, Problem::Axioms { trials: 1000 });
        assert!(s.modulus().is_err());
    }

    #[test]
    fn points_snap_and_are_range_checked() {
        let s = Scenario::from_value(&base()).unwrap();
        let d = s.build_domain().unwrap();
        // 0.5 is equidistant from 0.4375 and 0.5625; the lower index wins.
        assert_eq!(resolve_point(&d, &PointRef::Coord(0.5), "t").unwrap(), PointId(3));
        assert_eq!(resolve_point(&d, &PointRef::Index { index: 7 }, "t").unwrap(), PointId(7));
        assert!(resolve_point(&d, &PointRef::Index { index: 8 }, "t").is_err());
        let err = resolve_point(&d, &PointRef::Coord(-0.1), "problem.t").unwrap_err();
        assert!(err.message.starts_with("problem.t"), "{}", err.message);
        assert!(resolve_point(&d, &PointRef::Coords(vec![0.5, 0.5]), "t").is_err());
    }

    #[test]
    fn masks_and_profiles() {
        let s = Scenario::from_value(&base()).unwrap();
        let d = s.build_domain().unwrap();
        let m = resolve_mask(&d, &MaskSpec::Box { lo: vec![0.0], hi: vec![0.5] }, "q").unwrap();
        assert_eq!(m.count(), 4);
        let m = resolve_mask(&d, &MaskSpec::Indices(vec![0, 2]), "q").unwrap();
        assert_eq!(m.count(), 2);
        assert!(resolve_mask(&d, &MaskSpec::Indices(vec![9]), "q").is_err());
        assert!(resolve_chi(&d, &ChiSpec::Values(vec![1.0; 3]), "chi").is_err());
        assert!(resolve_chi(&d, &ChiSpec::Values(vec![-1.0; 8]), "chi").is_err());
    }

    #[test]
    fn closed_form_functions() {
        let s = Scenario::from_value(&base()).unwrap();
        let d = s.build_domain().unwrap();
        let m = s.modulus().unwrap();
        let expr = FunctionExpr::IntervalAffine { lo: vec![0.0, 1.0], hi: vec![1.0, 1.0] };
        let f = build_function(&d, m, InstanceId::IntervalSpace, &expr, 0).unwrap();
        assert_eq!(f.at(PointId(0)), &Element::Interval(0.0625, 1.0625));
        let wrong = build_function(&d, m, InstanceId::RealLine, &expr, 0);
        assert!(wrong.is_err());
        let a = build_function(&d, m, InstanceId::PointSet2D, &FunctionExpr::RandomBumps { terms: 2 }, 5).unwrap();
        let b = build_function(&d, m, InstanceId::PointSet2D, &FunctionExpr::RandomBumps { terms: 2 }, 5).unwrap();
        assert_eq!(a, b);
    }
}
