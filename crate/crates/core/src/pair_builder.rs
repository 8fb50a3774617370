//! From a continuous function on a graph set, build the plane pair
//! `(f, h)` with `f = (phi(x) + psi(y)) / 2` and `h = (phi(x) - psi(y)) / 2`,
//! where `phi` and `psi` are the one-variable traces of the function along
//! the graph, extended to the whole line. On the graph `f` restores the
//! input and `h` vanishes; moving along a horizontal or vertical section
//! changes `f` and `h` by the same increment.

use crate::domains::GraphSet;
use crate::extend1d::{extend_linear, PartialFunction1D};
use crate::real_fn::{clamp_sym, half_diff, half_sum, Interval, RealFunction1D, RealFunction2D};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PairError {
    #[error("bound must be positive, got {0}")]
    NonPositiveBound(f64),
    #[error("|g| exceeds the bound {bound} at parameter {param}: value {value}")]
    BoundExceeded { param: f64, value: f64, bound: f64 },
    #[error(transparent)]
    Extend(#[from] crate::extend1d::ExtendError),
}

/// The pair together with the retained one-variable traces, which make
/// the section-increment identity checkable as an equality of retained
/// functions rather than only numerically.
#[derive(Clone)]
pub struct PairFH {
    f: RealFunction2D,
    h: RealFunction2D,
    bound: f64,
    phi_tilde: RealFunction1D,
    psi_tilde: RealFunction1D,
    graph: GraphSet,
}

impl PairFH {
    pub fn f(&self) -> &RealFunction2D {
        &self.f
    }

    pub fn h(&self) -> &RealFunction2D {
        &self.h
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn phi_tilde(&self) -> &RealFunction1D {
        &self.phi_tilde
    }

    pub fn psi_tilde(&self) -> &RealFunction1D {
        &self.psi_tilde
    }

    pub fn graph(&self) -> &GraphSet {
        &self.graph
    }
}

/// Tolerance above which a probe value counts as violating the bound;
/// anything closer is clamped silently.
const BOUND_PROBE_TOL: f64 = 1e-12;

const PROBES_PER_COMPONENT: usize = 33;

/// Builds the pair for `g` on the graph set `e` with codomain `[-bound, bound]`.
///
/// `g` is probed on the graph; values beyond the bound by more than a
/// rounding margin are a contract error, marginal excursions are clamped.
pub fn build_pair(e: &GraphSet, g: &RealFunction2D, bound: f64) -> Result<PairFH, PairError> {
    if !bound.is_finite() || bound <= 0.0 {
        return Err(PairError::NonPositiveBound(bound));
    }
    for t in e.base().probe_params(PROBES_PER_COMPONENT) {
        let v = g.eval(e.point_at(t));
        if v.abs() > bound + BOUND_PROBE_TOL {
            return Err(PairError::BoundExceeded {
                param: t,
                value: v,
                bound,
            });
        }
    }

    let x_set = e.base().clone();
    let y_set = e.image_set();
    let range = Interval::symmetric(bound);

    let phi = {
        let g = g.clone();
        let map = e.map().clone();
        RealFunction1D::new(range, move |x| clamp_sym(g.eval_at(x, map.apply(x)), bound))
    };
    let psi = {
        let g = g.clone();
        let map = e.map().clone();
        RealFunction1D::new(range, move |y| {
            clamp_sym(g.eval_at(map.invert(y), y), bound)
        })
    };

    let phi_tilde = extend_linear(&PartialFunction1D::new(x_set, phi))?;
    let psi_tilde = extend_linear(&PartialFunction1D::new(y_set, psi))?;

    let f = half_sum(&phi_tilde, &psi_tilde);
    let h = half_diff(&phi_tilde, &psi_tilde);

    Ok(PairFH {
        f,
        h,
        bound,
        phi_tilde,
        psi_tilde,
        graph: e.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{ClosedLineSet, GraphSet, Homeomorphism1D};
    use crate::real_fn::{Interval, Point2D, RealFunction2D};

    fn first_coordinate() -> RealFunction2D {
        RealFunction2D::new(Interval::UNIT, |x, _| x)
    }

    #[test]
    fn diagonal_identity_values() {
        let e = GraphSet::diagonal();
        let pair = build_pair(&e, &first_coordinate(), 1.0).unwrap();
        assert_eq!(pair.f().eval_at(0.25, 0.75), 0.5);
        assert_eq!(pair.h().eval_at(0.25, 0.75), -0.25);
    }

    #[test]
    fn constant_function_gives_constant_pair() {
        let e = GraphSet::diagonal();
        let g = RealFunction2D::constant(0.4);
        let pair = build_pair(&e, &g, 1.0).unwrap();
        for &(x, y) in &[(0.0, 0.0), (0.1, 0.9), (0.7, 0.2)] {
            assert_eq!(pair.f().eval_at(x, y), 0.4);
            assert_eq!(pair.h().eval_at(x, y), 0.0);
        }
    }

    #[test]
    fn flip_graph_closed_form() {
        let e = GraphSet::new(
            ClosedLineSet::unit(),
            Homeomorphism1D::new(vec![(0.0, 1.0), (1.0, 0.0)]).unwrap(),
        )
        .unwrap();
        let pair = build_pair(&e, &first_coordinate(), 1.0).unwrap();
        // psi(y) = 1 - y, so f(x, y) = (x + 1 - y) / 2
        assert_eq!(pair.f().eval_at(0.5, 0.5), 0.5);
        assert_eq!(pair.f().eval_at(0.25, 0.75), 0.25);
    }

    #[test]
    fn restriction_and_vanishing_on_graph() {
        let e = GraphSet::diagonal();
        let pair = build_pair(&e, &first_coordinate(), 1.0).unwrap();
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let p = e.point_at(t);
            assert!((pair.f().eval(p) - t).abs() <= 1e-15);
            assert!(pair.h().eval(p).abs() <= 1e-15);
        }
    }

    #[test]
    fn sum_and_difference_recover_traces() {
        let e = GraphSet::diagonal();
        let pair = build_pair(&e, &first_coordinate(), 1.0).unwrap();
        for &(x, y) in &[(0.1, 0.9), (0.33, 0.77), (0.5, 0.5)] {
            let p = Point2D::new(x, y);
            let f = pair.f().eval(p);
            let h = pair.h().eval(p);
            assert!((f + h - pair.phi_tilde().eval_at(x)).abs() <= 1e-15);
            assert!((f - h - pair.psi_tilde().eval_at(y)).abs() <= 1e-15);
        }
    }

    #[test]
    fn bound_violations_are_contract_errors() {
        let e = GraphSet::diagonal();
        let g = RealFunction2D::new(Interval::new(0.0, 3.0), |x, _| 3.0 * x);
        match build_pair(&e, &g, 1.0) {
            Err(PairError::BoundExceeded { bound, .. }) => assert_eq!(bound, 1.0),
            other => panic!("expected a bound violation, got {:?}", other.map(|_| ())),
        }
        assert!(matches!(
            build_pair(&e, &first_coordinate(), 0.0),
            Err(PairError::NonPositiveBound(_))
        ));
    }

    #[test]
    fn marginal_excess_is_clamped() {
        let e = GraphSet::diagonal();
        let g = RealFunction2D::new(Interval::new(-2.0, 2.0), |_, _| 1.0 + 1e-13);
        let pair = build_pair(&e, &g, 1.0).unwrap();
        assert_eq!(pair.f().eval_at(0.5, 0.5), 1.0);
    }
}
