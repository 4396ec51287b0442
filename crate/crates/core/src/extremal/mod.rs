//! Extremal functions: omega-bumps, signed profiles, the radial function of
//! uniform recovery, witness pairs for lower bounds and membership checks
//! for `H^omega`.

mod bumps;
mod capital_psi;
mod membership;
mod witness;

pub use bumps::{omega_bump, psi_chi, random_holder_function, random_unit_convex, signed_extremal};
pub(crate) use capital_psi::ball_mean;
pub use capital_psi::{
    capital_psi, check_eps_condition, empty_ball_center, CapitalPsiResult, EmptyBallCenter, EpsConditionCheck,
};
pub use membership::{verify_membership, MembershipReport, ViolatingPair, MAX_MEMBERSHIP_PAIRS};
pub use witness::{integral_witness, uniform_witness, value_witness, witness_pair, WitnessPair};
