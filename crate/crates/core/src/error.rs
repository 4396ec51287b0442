use crate::lspace::InstanceId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("instance mismatch: expected {expected}, found {found}")]
    InstanceMismatch { expected: InstanceId, found: InstanceId },

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("modulus evaluated at negative argument {0}")]
    NegativeArgument(f64),

    #[error("interval bounds: a = {a} must be below b = {b}")]
    IntervalBounds { a: f64, b: f64 },

    #[error("cell count must be positive (axis {axis})")]
    CellCount { axis: usize },

    #[error("distance matrix is not a metric: {0}")]
    NotAMetric(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("point index {index} out of range for a domain of {len} points")]
    PointOutOfRange { index: usize, len: usize },

    #[error("duplicate node at point {0}")]
    DuplicateNode(usize),

    #[error("node list is empty")]
    NoNodes,

    #[error("closed ball of radius {eps} around point {center} contains no grid point")]
    EmptyBall { center: usize, eps: f64 },

    #[error("non-positive radius {0}")]
    NonPositiveRadius(f64),

    #[error("mask or profile of length {found} does not match domain of {expected} points")]
    LengthMismatch { expected: usize, found: usize },

    #[error("zero-measure set")]
    ZeroMeasure,

    #[error("functional of the weight profile vanishes (phi(chi) = {0})")]
    ZeroFunctional(f64),

    #[error("negative weight profile value {value} at point {index}")]
    NegativeProfile { index: usize, value: f64 },

    #[error("element is not convex")]
    NotConvex,

    #[error("element is not invertible")]
    NotInvertible,

    #[error("element lies at distance {0} > 1 from zero")]
    NotUnit(f64),

    #[error("instance {0} has no convex invertible unit element")]
    NoUnitElement(InstanceId),

    #[error("information collision {residual} on coordinate {coordinate} exceeds tolerance {tolerance}")]
    CollisionExceeded { coordinate: usize, residual: f64, tolerance: f64 },

    #[error("domain must be a box of dimension 1..=3 for this construction")]
    NotABox,

    #[error("ball radius condition violated at node {node}: distance {distance} is neither R = {radius} nor >= R + 4 eps = {threshold}")]
    EpsCondition { node: usize, distance: f64, radius: f64, threshold: f64 },

    #[error("radius eps = {eps} must be below the empty-ball radius R = {radius}")]
    EpsTooLarge { eps: f64, radius: f64 },

    #[error("no node at distance R = {0} from the empty-ball center")]
    NoNodeAtRadius(f64),

    #[error("measurements must share one operator; measurement {0} differs from the first")]
    MixedOperators(usize),

    #[error("no measurements given")]
    NoMeasurements,

    #[error("lower bound unavailable")]
    LowerBoundUnavailable,

    #[error("invariant breach: {0}")]
    InvariantBreach(String),
}
