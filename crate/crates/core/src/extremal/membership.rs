use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{Domain, PointId};
use crate::lintegral::LFunction;
use crate::modulus::Modulus;

/// Pairs checked exhaustively up to this count; above it a seeded random
/// subsample of this size is checked instead.
pub const MAX_MEMBERSHIP_PAIRS: usize = 4_000_000;

const MEMBERSHIP_TOL: f64 = 1e-9;
const SUBSAMPLE_SEED: u64 = 0x6d65_6d62;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ViolatingPair {
    pub s: PointId,
    pub t: PointId,
    pub distance: f64,
    pub bound: f64,
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub pairs_checked: usize,
    pub subsampled: bool,
    /// Largest `dist(f(s), f(t)) - omega(r(s, t))` seen.
    pub worst_excess: f64,
    /// Worst pair exceeding the tolerance, if any.
    pub violation: Option<ViolatingPair>,
}

impl MembershipReport {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }
}

fn pair(d: &Domain, f: &LFunction, m: &Modulus, s: usize, t: usize) -> ViolatingPair {
    let (s, t) = (PointId(s), PointId(t));
    let distance = f.at(s).dist(f.at(t)).unwrap_or(f64::INFINITY);
    let bound = m.eval_unchecked(d.dist(s, t));
    ViolatingPair { s, t, distance, bound, excess: distance - bound }
}

fn worse(a: Option<ViolatingPair>, b: Option<ViolatingPair>) -> Option<ViolatingPair> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.excess > x.excess { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Checks `dist(f(s), f(t)) <= omega(r(s, t)) + 1e-9` over all pairs, or
/// over a seeded subsample of [`MAX_MEMBERSHIP_PAIRS`] pairs on large grids.
pub fn verify_membership(d: &Domain, f: &LFunction, m: &Modulus) -> MembershipReport {
    let n = f.len().min(d.len());
    let total = n * n.saturating_sub(1) / 2;
    let rows: Vec<Option<ViolatingPair>> = if total <= MAX_MEMBERSHIP_PAIRS {
        (0..n).into_par_iter().map(|s| (s + 1..n).map(|t| Some(pair(d, f, m, s, t))).fold(None, worse)).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SUBSAMPLE_SEED);
        let pairs: Vec<(usize, usize)> = (0..MAX_MEMBERSHIP_PAIRS)
            .map(|_| {
                let s = rng.gen_range(0..n);
                let t = (s + rng.gen_range(1..n)) % n;
                (s.min(t), s.max(t))
            })
            .collect();
        pairs.par_chunks(1 << 14).map(|c| c.iter().map(|&(s, t)| Some(pair(d, f, m, s, t))).fold(None, worse)).collect()
    };
    let worst = rows.into_iter().fold(None, worse);
    let worst_excess = worst.map_or(f64::NEG_INFINITY, |p| p.excess);
    MembershipReport {
        pairs_checked: total.min(MAX_MEMBERSHIP_PAIRS),
        subsampled: total > MAX_MEMBERSHIP_PAIRS,
        worst_excess,
        violation: worst.filter(|p| !(p.excess <= MEMBERSHIP_TOL)),
    }
}
