//! Locally finite partition of unity on the complement of the zero set
//! of a gauge function `h0`.
//!
//! The data is a gauge `h0` with values in `[0, 1]` (zero exactly on the
//! closed set `F`) and a family `h_n` of functions vanishing on `F`. For
//! thresholds `1/n` the sets
//!
//! ```text
//! A_n = { max_{0<=k<=n} |h_k| <  1/n }
//! B_n = { max_{0<=k<=n} |h_k| <= 1/n }
//! ```
//!
//! shrink to `F`, and the supports `A_n \ B_{n+2}` (with `G \ B_2` as the
//! zeroth piece) cover the complement `G` locally finitely. The bumps
//!
//! ```text
//! psi_n = min(1, n (1/n - M_n)_+) * min(1, (n+2) (M_{n+2} - 1/(n+2))_+)
//! psi_0 = min(1, 2 (M_2 - 1/2)_+)
//! ```
//!
//! with `M_n = max_{0<=k<=n} |h_k|` are continuous, valued in `[0, 1]`
//! and positive exactly on those supports, so normalizing by their sum
//! yields the partition. At a point where `h0` admits a verified positive
//! lower bound `L`, every bump with index at or beyond the least `n0`
//! with `1/n0 < L` vanishes, which caps the computation.
//!
//! Decisions against the thresholds use outward-rounded bounds for `h0`
//! (refined by doubling the precision level up to a cap) and exact double
//! values for the `h_n`; values inside the bumps use the `h0` center at
//! the maximal level.

use crate::real_fn::{Point2D, RealFunction2D};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PouError {
    #[error("cannot certify h0 away from zero at {0} at maximum precision")]
    NearZero(Point2D),
    #[error("active index bound {0} exceeds the computable range")]
    IndexBoundTooLarge(u64),
    #[error("no bump is active at {0}; the vanishing-sequence contract is broken")]
    DegeneratePartition(Point2D),
    #[error("vanishing contract violated at {point}: certified lower bound {lower:e} for h0")]
    VanishingContract { point: Point2D, lower: f64 },
}

/// A family `n -> h_n` of plane functions, `n >= 1`.
pub trait TermFamily2D: Send + Sync {
    fn eval_term(&self, n: u64, p: Point2D) -> f64;
}

impl<F> TermFamily2D for F
where
    F: Fn(u64, Point2D) -> f64 + Send + Sync,
{
    fn eval_term(&self, n: u64, p: Point2D) -> f64 {
        self(n, p)
    }
}

/// The gauge `h0` (with rigorous bounds) together with the vanishing
/// family `h_n`. The caller guarantees that the zero set of `h0` is
/// contained in the zero set of every `h_n`.
#[derive(Clone)]
pub struct VanishingSequence {
    h0: RealFunction2D,
    terms: Arc<dyn TermFamily2D>,
}

impl VanishingSequence {
    pub fn new(h0: RealFunction2D, terms: Arc<dyn TermFamily2D>) -> Self {
        VanishingSequence { h0, terms }
    }

    pub fn h0(&self) -> &RealFunction2D {
        &self.h0
    }

    pub fn term(&self, n: u64, p: Point2D) -> f64 {
        self.terms.eval_term(n, p)
    }

    /// Spot check on points expected to lie in `F`: the gauge must not be
    /// certifiably positive there.
    pub fn spot_check_vanishing(&self, samples: &[Point2D], level: u32) -> Result<(), PouError> {
        for &p in samples {
            let b = self.h0.eval_bounds(p, level);
            if b.lower() > 1e-12 {
                return Err(PouError::VanishingContract {
                    point: p,
                    lower: b.lower(),
                });
            }
        }
        Ok(())
    }
}

/// Precision ladder for gauge decisions: levels double from
/// `initial_terms` up to `max_terms`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RefinementPolicy {
    pub initial_terms: u32,
    pub max_terms: u32,
}

impl Default for RefinementPolicy {
    fn default() -> Self {
        RefinementPolicy {
            initial_terms: 15,
            max_terms: 60,
        }
    }
}

/// Outcome of a threshold-membership decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside,
    Unresolved,
}

/// Hard cap on partition index bounds accepted by the evaluator; callers
/// route larger bounds through their own fallbacks.
const MAX_EVALUABLE_INDEX: u64 = 10_000_000;

/// The least `n` with `1/n < lower`, or `u64::MAX` if it overflows the
/// representable range.
pub fn least_index_exceeding(lower: f64) -> u64 {
    assert!(lower > 0.0);
    let inv = 1.0 / lower;
    if !inv.is_finite() || inv >= 1e18 {
        return u64::MAX;
    }
    let mut n = inv.floor() as u64 + 1;
    while 1.0 / (n as f64) >= lower {
        n += 1;
    }
    n
}

/// The partition, evaluated on demand; a value, safe to share.
#[derive(Clone)]
pub struct LazyPartitionOfUnity {
    source: VanishingSequence,
    policy: RefinementPolicy,
}

impl LazyPartitionOfUnity {
    pub fn new(source: VanishingSequence, policy: RefinementPolicy) -> Self {
        LazyPartitionOfUnity { source, policy }
    }

    pub fn source(&self) -> &VanishingSequence {
        &self.source
    }

    pub fn policy(&self) -> RefinementPolicy {
        self.policy
    }

    pub fn with_policy(&self, policy: RefinementPolicy) -> Self {
        LazyPartitionOfUnity {
            source: self.source.clone(),
            policy,
        }
    }

    pub fn term_value(&self, n: u64, p: Point2D) -> f64 {
        self.source.term(n, p)
    }

    /// The `h0` center at the maximal precision level.
    pub fn h0_value(&self, p: Point2D) -> f64 {
        self.source.h0.eval_bounds(p, self.policy.max_terms).center
    }

    /// Verified positive lower bound for `h0(p)`, if one exists within
    /// the precision ladder.
    pub fn certify_nonzero(&self, p: Point2D) -> Option<f64> {
        let mut level = self.policy.initial_terms.max(1);
        loop {
            let b = self.source.h0.eval_bounds(p, level);
            if b.lower() > 0.0 {
                return Some(b.lower());
            }
            if level >= self.policy.max_terms {
                return None;
            }
            level = (level * 2).min(self.policy.max_terms);
        }
    }

    /// The least `n0` with `1/n0` below the certified lower bound of
    /// `|h0(p)|`; every bump with index `>= n0` vanishes at `p`.
    pub fn active_index_bound(&self, p: Point2D) -> Result<u64, PouError> {
        match self.certify_nonzero(p) {
            Some(lower) => Ok(least_index_exceeding(lower)),
            None => Err(PouError::NearZero(p)),
        }
    }

    fn threshold_membership(&self, n: u64, p: Point2D, strict: bool) -> Membership {
        assert!(n >= 1);
        let thr = 1.0 / (n as f64);
        // exact double values decide the h_k, k >= 1
        for k in 1..=n {
            let v = self.source.term(k, p).abs();
            let out = if strict { v >= thr } else { v > thr };
            if out {
                return Membership::Outside;
            }
        }
        // outward-rounded bounds decide h0, refined along the ladder
        let mut level = self.policy.initial_terms.max(1);
        loop {
            let b = self.source.h0.eval_bounds(p, level);
            let (lo, hi) = (b.lower().max(0.0), b.upper());
            if strict {
                if lo >= thr {
                    return Membership::Outside;
                }
                if hi < thr {
                    return Membership::Inside;
                }
            } else {
                if lo > thr {
                    return Membership::Outside;
                }
                if hi <= thr {
                    return Membership::Inside;
                }
            }
            if level >= self.policy.max_terms {
                return Membership::Unresolved;
            }
            level = (level * 2).min(self.policy.max_terms);
        }
    }

    /// Membership in `A_n` (strict thresholds `< 1/n`).
    pub fn membership_a(&self, n: u64, p: Point2D) -> Membership {
        self.threshold_membership(n, p, true)
    }

    /// Membership in `B_n` (weak thresholds `<= 1/n`).
    pub fn membership_b(&self, n: u64, p: Point2D) -> Membership {
        self.threshold_membership(n, p, false)
    }

    /// The active bumps at `p`, certified internally.
    pub fn evaluate_partition(&self, p: Point2D) -> Result<Vec<(u64, f64)>, PouError> {
        let n0 = self.active_index_bound(p)?;
        self.evaluate_partition_with_bound(p, n0)
    }

    /// The active bumps at `p` given a previously certified index bound.
    /// Returns the pairs `(n, phi_n(p))` with positive weight; the
    /// weights sum to one.
    pub fn evaluate_partition_with_bound(
        &self,
        p: Point2D,
        n0: u64,
    ) -> Result<Vec<(u64, f64)>, PouError> {
        if n0 > MAX_EVALUABLE_INDEX {
            return Err(PouError::IndexBoundTooLarge(n0));
        }
        let n0 = n0 as usize;
        let h0v = self.h0_value(p).abs();

        // running maxima M_k = max(|h0|, |h_1|, ..., |h_k|)
        let top = (n0 + 1).max(2);
        let mut running = Vec::with_capacity(top + 1);
        running.push(h0v);
        let mut m = h0v;
        for k in 1..=top {
            m = m.max(self.source.term(k as u64, p).abs());
            running.push(m);
        }

        let mut active: Vec<(u64, f64)> = Vec::new();
        let psi0 = (2.0 * (running[2] - 0.5)).clamp(0.0, 1.0);
        if psi0 > 0.0 {
            active.push((0, psi0));
        }
        for n in 1..n0 {
            let thr_a = 1.0 / (n as f64);
            let thr_b = 1.0 / ((n + 2) as f64);
            let a = ((n as f64) * (thr_a - running[n]).max(0.0)).min(1.0);
            if a == 0.0 {
                continue;
            }
            let b = (((n + 2) as f64) * (running[n + 2] - thr_b).max(0.0)).min(1.0);
            let v = a * b;
            if v > 0.0 {
                active.push((n as u64, v));
            }
        }

        let total: f64 = active.iter().map(|&(_, v)| v).sum();
        if total.is_nan() || total <= 0.0 {
            return Err(PouError::DegeneratePartition(p));
        }
        for entry in &mut active {
            entry.1 /= total;
        }
        Ok(active)
    }
}
