//! Extension of a continuous function from a closed subset of `[0, 1]`
//! to the whole line: values on the set are kept, each gap is bridged by
//! the chord between its endpoint values, and the function continues as a
//! constant outside the convex hull of the set. The gap chords are convex
//! combinations, so no value outside the original range is ever produced.

use crate::domains::ClosedLineSet;
use crate::real_fn::{lerp_gap, RealFunction1D};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExtendError {
    #[error("cannot extend from an empty domain")]
    EmptyDomain,
}

/// A function known only on a closed subset of the line. The evaluator is
/// queried on domain points only.
#[derive(Clone)]
pub struct PartialFunction1D {
    domain: ClosedLineSet,
    values: RealFunction1D,
}

impl PartialFunction1D {
    pub fn new(domain: ClosedLineSet, values: RealFunction1D) -> Self {
        PartialFunction1D { domain, values }
    }

    pub fn domain(&self) -> &ClosedLineSet {
        &self.domain
    }

    pub fn values(&self) -> &RealFunction1D {
        &self.values
    }
}

struct ExtensionTable {
    // per component: (lo, hi, value at lo, value at hi)
    rows: Vec<(f64, f64, f64, f64)>,
}

impl ExtensionTable {
    fn eval(&self, values: &RealFunction1D, x: f64) -> f64 {
        let first = self.rows[0];
        let last = self.rows[self.rows.len() - 1];
        if x < first.0 {
            return first.2;
        }
        if x > last.1 {
            return last.3;
        }
        // last component whose left endpoint is <= x
        let mut lo = 0usize;
        let mut hi = self.rows.len() - 1;
        while hi > lo {
            let mid = (lo + hi).div_ceil(2);
            if self.rows[mid].0 <= x {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let row = self.rows[lo];
        if x <= row.1 {
            values.eval_at(x)
        } else {
            let next = self.rows[lo + 1];
            lerp_gap(row.1, next.0, row.3, next.2, x)
        }
    }
}

/// Continuous extension of `g` to the whole line. On the domain the result
/// coincides with `g`; gaps carry the chord between the neighbouring
/// endpoint values. The declared range of the result is inherited from
/// `g`, which bounds every produced value.
pub fn extend_linear(g: &PartialFunction1D) -> Result<RealFunction1D, ExtendError> {
    let comps = g.domain().components();
    if comps.is_empty() {
        return Err(ExtendError::EmptyDomain);
    }
    let rows = comps
        .iter()
        .map(|&(lo, hi)| (lo, hi, g.values.eval_at(lo), g.values.eval_at(hi)))
        .collect();
    let table = Arc::new(ExtensionTable { rows });
    let values = g.values.clone();
    Ok(RealFunction1D::new(g.values.range(), move |x| {
        table.eval(&values, x)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real_fn::Interval;

    fn on(domain: ClosedLineSet, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> RealFunction1D {
        let _ = &domain;
        RealFunction1D::new(Interval::UNIT, f)
    }

    #[test]
    fn bridges_a_two_point_domain() {
        let domain = ClosedLineSet::new(vec![(0.0, 0.0), (1.0, 1.0)]).unwrap();
        let g = PartialFunction1D::new(domain.clone(), on(domain, |x| x));
        let f = extend_linear(&g).unwrap();
        assert_eq!(f.eval_at(0.5), 0.5);
        assert_eq!(f.eval_at(0.0), 0.0);
        assert_eq!(f.eval_at(1.0), 1.0);
    }

    #[test]
    fn full_interval_is_identity_case() {
        let domain = ClosedLineSet::unit();
        let g = PartialFunction1D::new(domain.clone(), on(domain, |x| x * x));
        let f = extend_linear(&g).unwrap();
        assert_eq!(f.eval_at(0.3), 0.3 * 0.3);
    }

    #[test]
    fn gap_midpoint_interpolates() {
        let domain = ClosedLineSet::new(vec![(0.0, 0.25), (0.75, 1.0)]).unwrap();
        let g = PartialFunction1D::new(domain.clone(), on(domain, |x| x));
        let f = extend_linear(&g).unwrap();
        assert_eq!(f.eval_at(0.5), 0.5);
    }

    #[test]
    fn constant_continuation_outside_hull() {
        let domain = ClosedLineSet::new(vec![(0.25, 0.5)]).unwrap();
        let g = PartialFunction1D::new(domain.clone(), on(domain, |x| 2.0 * x));
        let f = extend_linear(&g).unwrap();
        assert_eq!(f.eval_at(0.0), 0.5);
        assert_eq!(f.eval_at(0.1), 0.5);
        assert_eq!(f.eval_at(0.9), 1.0);
    }

    #[test]
    fn gap_slope_matches_difference_quotient() {
        let domain = ClosedLineSet::new(vec![(0.0, 0.2), (0.6, 1.0)]).unwrap();
        let g = PartialFunction1D::new(domain.clone(), on(domain, |x| x * x));
        let f = extend_linear(&g).unwrap();
        let slope = (0.6f64 * 0.6 - 0.2 * 0.2) / (0.6 - 0.2);
        for i in 1..20 {
            let a = 0.2 + 0.4 * (i as f64 / 21.0);
            let b = a + 0.4 / 21.0;
            let q = (f.eval_at(b) - f.eval_at(a)) / (b - a);
            assert!((q - slope).abs() <= 1e-12, "q = {q}, slope = {slope}");
        }
    }
}
