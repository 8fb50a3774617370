//! Canonical inputs: pointwise-limit sequences with known limits and
//! rate oracles, and the dyadic two-pointed set with its indicator
//! function.

use crate::domains::{FinitePointSet2D, GraphSet, PlanePiece, PlaneSetUnion, COORD_TOL};
use crate::engine::Baire1Sequence;
use crate::real_fn::{Interval, Point2D, RealFunction1D, RealFunction2D};
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GalleryError {
    #[error("truncation depth must be between 1 and 20, got {0}")]
    DepthOutOfRange(u32),
    #[error("jump location must lie strictly inside (0, 1), got {0}")]
    BadJumpLocation(f64),
    #[error("unknown gallery entry `{0}`")]
    UnknownEntry(String),
}

/// A limit value pinned at one parameter, with its provenance note.
#[derive(Debug, Clone)]
pub struct KnownValue {
    pub param: f64,
    pub value: f64,
    pub note: &'static str,
}

/// Location of a known joint discontinuity, with the oscillation every
/// neighbourhood must exhibit.
#[derive(Debug, Clone, Copy)]
pub struct DiscontinuityHint {
    pub at: Point2D,
    pub min_oscillation: f64,
}

/// A named stage sequence together with its analytic limit (when one
/// exists) and check metadata.
#[derive(Clone)]
pub struct GalleryEntry {
    pub name: String,
    pub sequence: Baire1Sequence,
    pub known_values: Vec<KnownValue>,
    pub limit: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    pub discontinuity: Option<DiscontinuityHint>,
}

fn pow_stage(x: f64, n: u64) -> f64 {
    if n <= i32::MAX as u64 {
        x.powi(n as i32)
    } else {
        x.powf(n as f64)
    }
}

const ORACLE_STAGE_CAP: u64 = 1_000_000_000_000_000;

/// `g_n(x) = x^n` on `[0, 1]`: limit 0 below 1 and 1 at 1, with a jump of
/// the limit along the diagonal at `(1, 1)`.
pub fn pow_limit() -> GalleryEntry {
    let sequence = Baire1Sequence::from_param_terms(|n| {
        RealFunction1D::new(Interval::UNIT, move |x| pow_stage(x, n))
    })
    .with_rate_oracle(|tol, p| {
        let m = p.x.abs().max(p.y.abs());
        if m >= 1.0 || m <= 0.0 {
            return 1;
        }
        let target = (tol * 0.99).min(0.5);
        let n = (target.ln() / m.ln()).ceil();
        if !n.is_finite() || n >= ORACLE_STAGE_CAP as f64 {
            ORACLE_STAGE_CAP
        } else {
            (n as u64).max(1)
        }
    });
    GalleryEntry {
        name: "pow_limit".to_string(),
        sequence,
        known_values: vec![
            KnownValue {
                param: 0.5,
                value: 0.0,
                note: "limit vanishes below the right endpoint",
            },
            KnownValue {
                param: 1.0,
                value: 1.0,
                note: "stages are constantly 1 at the right endpoint",
            },
        ],
        limit: Some(Arc::new(|x| if x < 1.0 { 0.0 } else { 1.0 })),
        discontinuity: Some(DiscontinuityHint {
            at: Point2D::new(1.0, 1.0),
            min_oscillation: 0.9,
        }),
    }
}

/// `g_n(x) = (2/pi) atan(n (x - c))`: limit -1 below `c`, 0 at `c`,
/// +1 above, with a jump of the limit along the diagonal at `(c, c)`.
pub fn arctan_step(c: f64) -> Result<GalleryEntry, GalleryError> {
    if !(c > 0.0 && c < 1.0) {
        return Err(GalleryError::BadJumpLocation(c));
    }
    let sequence = Baire1Sequence::from_param_terms(move |n| {
        let nf = n as f64;
        RealFunction1D::new(Interval::symmetric(1.0), move |x| {
            (2.0 / PI) * (nf * (x - c)).atan()
        })
    })
    .with_rate_oracle(move |tol, p| {
        let target = (tol * 0.99).min(0.5);
        let slope = (PI * target / 2.0).tan();
        let need = |d: f64| {
            if d <= 0.0 {
                1.0
            } else {
                (1.0 / (d * slope)).ceil()
            }
        };
        let n = need((p.x - c).abs()).max(need((p.y - c).abs()));
        if !n.is_finite() || n >= ORACLE_STAGE_CAP as f64 {
            ORACLE_STAGE_CAP
        } else {
            (n as u64).max(1)
        }
    });
    let mut known_values = vec![KnownValue {
        param: c,
        value: 0.0,
        note: "odd symmetry pins the limit at the jump",
    }];
    if c + 0.1 <= 1.0 {
        known_values.push(KnownValue {
            param: c + 0.1,
            value: 1.0,
            note: "limit above the jump",
        });
    }
    if c - 0.1 >= 0.0 {
        known_values.push(KnownValue {
            param: c - 0.1,
            value: -1.0,
            note: "limit below the jump",
        });
    }
    Ok(GalleryEntry {
        name: format!("arctan_step({c})"),
        sequence,
        known_values,
        limit: Some(Arc::new(move |x| {
            if x < c {
                -1.0
            } else if x > c {
                1.0
            } else {
                0.0
            }
        })),
        discontinuity: Some(DiscontinuityHint {
            at: Point2D::new(c, c),
            min_oscillation: 0.9,
        }),
    })
}

/// The constant sequence of a fixed value.
pub fn constant_entry(c: f64) -> GalleryEntry {
    GalleryEntry {
        name: format!("const({c})"),
        sequence: Baire1Sequence::constant(RealFunction2D::constant(c)),
        known_values: vec![KnownValue {
            param: 0.5,
            value: c,
            note: "constant stages",
        }],
        limit: Some(Arc::new(move |_| c)),
        discontinuity: None,
    }
}

/// The constant sequence of a piecewise-linear function of the parameter.
pub fn piecewise_entry(breakpoints: Vec<(f64, f64)>) -> Result<GalleryEntry, crate::real_fn::RealFnError> {
    let g = RealFunction1D::piecewise_linear(breakpoints.clone())?;
    let limit = g.clone();
    Ok(GalleryEntry {
        name: "piecewise".to_string(),
        sequence: Baire1Sequence::constant(RealFunction2D::from_x(&g)),
        known_values: breakpoints
            .iter()
            .map(|&(x, y)| KnownValue {
                param: x,
                value: y,
                note: "breakpoint of the constant stages",
            })
            .collect(),
        limit: Some(Arc::new(move |x| limit.eval_at(x))),
        discontinuity: None,
    })
}

/// Deliberately non-convergent stages `g_n = (-1)^n / 2`; exercises the
/// failure path of the stabilization heuristic.
pub fn alternating() -> GalleryEntry {
    GalleryEntry {
        name: "alternating".to_string(),
        sequence: Baire1Sequence::new(|n| {
            RealFunction2D::constant(if n % 2 == 0 { 0.5 } else { -0.5 })
        }),
        known_values: vec![],
        limit: None,
        discontinuity: None,
    }
}

/// Lookup used by config files; `arg` feeds parametric entries.
pub fn by_name(name: &str, arg: Option<f64>) -> Result<GalleryEntry, GalleryError> {
    match name {
        "pow_limit" => Ok(pow_limit()),
        "arctan_step" => arctan_step(arg.unwrap_or(0.5)),
        "alternating" => Ok(alternating()),
        other => Err(GalleryError::UnknownEntry(other.to_string())),
    }
}

/// The truncated dyadic family over the diagonal and its indicator data.
pub struct CounterexampleData {
    /// The points `((2k-1)/2^n, (2k-1)/2^n + 2^-(n+1))` for `n <= depth`.
    pub e1: FinitePointSet2D,
    /// The diagonal of the unit square.
    pub e2: GraphSet,
    /// The union, points listed before the diagonal.
    pub set: PlaneSetUnion,
    /// 1 on the point family, 0 elsewhere (in particular on the diagonal).
    pub g: RealFunction2D,
    pub depth: u32,
}

/// Builds the family truncated at `depth` dyadic levels. All coordinates
/// are exact binary fractions at tractable depths.
pub fn dyadic_counterexample(depth: u32) -> Result<CounterexampleData, GalleryError> {
    if !(1..=20).contains(&depth) {
        return Err(GalleryError::DepthOutOfRange(depth));
    }
    let mut points = Vec::new();
    for n in 1..=depth {
        let denom = 2f64.powi(n as i32);
        let offset = 2f64.powi(-(n as i32 + 1));
        for k in 1..=(1u32 << (n - 1)) {
            let x = (2 * k - 1) as f64 / denom;
            points.push(Point2D::new(x, x + offset));
        }
    }
    let e1 = FinitePointSet2D::new(points).expect("dyadic points are pairwise distinct");
    let e2 = GraphSet::diagonal();
    let set = PlaneSetUnion::new(vec![
        PlanePiece::Points(e1.clone()),
        PlanePiece::Graph(e2.clone()),
    ]);
    let marker = e1.clone();
    let g = RealFunction2D::new(Interval::UNIT, move |x, y| {
        if marker.contains_within(Point2D::new(x, y), COORD_TOL) {
            1.0
        } else {
            0.0
        }
    });
    Ok(CounterexampleData {
        e1,
        e2,
        set,
        g,
        depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{validate_onepointed, Axis};

    #[test]
    fn pow_stage_values() {
        let e = pow_limit();
        let g3 = e.sequence.term(3);
        assert_eq!(g3.eval_at(0.5, 0.0), 0.125);
        let limit = e.limit.unwrap();
        assert_eq!(limit(0.5), 0.0);
        assert_eq!(limit(1.0), 1.0);
    }

    #[test]
    fn pow_rate_oracle_is_sufficient() {
        let e = pow_limit();
        let oracle = e.sequence.rate_oracle().unwrap();
        for &x in &[0.3, 0.9, 0.99, 0.5] {
            let n = oracle(1e-6, Point2D::new(x, x));
            assert!(pow_stage(x, n) <= 1e-6, "x = {x}, n = {n}");
        }
        assert_eq!(oracle(1e-6, Point2D::new(1.0, 1.0)), 1);
    }

    #[test]
    fn arctan_values_and_limit() {
        let e = arctan_step(0.5).unwrap();
        let g1 = e.sequence.term(1);
        assert_eq!(g1.eval_at(0.5, 0.0), 0.0);
        let limit = e.limit.unwrap();
        assert_eq!(limit(0.5), 0.0);
        assert_eq!(limit(0.6), 1.0);
        assert_eq!(limit(0.4), -1.0);
    }

    #[test]
    fn arctan_rate_oracle_is_sufficient() {
        let e = arctan_step(0.5).unwrap();
        let oracle = e.sequence.rate_oracle().unwrap();
        for &x in &[0.1, 0.49, 0.7] {
            let n = oracle(1e-6, Point2D::new(x, x));
            let v = (2.0 / PI) * (n as f64 * (x - 0.5)).atan();
            let want = if x < 0.5 { -1.0 } else { 1.0 };
            assert!((v - want).abs() <= 1e-6, "x = {x}, n = {n}, v = {v}");
        }
    }

    #[test]
    fn arctan_rejects_boundary_jump() {
        assert!(matches!(
            arctan_step(0.0),
            Err(GalleryError::BadJumpLocation(_))
        ));
    }

    #[test]
    fn dyadic_depth_one() {
        let data = dyadic_counterexample(1).unwrap();
        assert_eq!(data.e1.points(), &[Point2D::new(0.5, 0.75)]);
    }

    #[test]
    fn dyadic_depth_two_adds_quarter_points() {
        let data = dyadic_counterexample(2).unwrap();
        assert_eq!(
            data.e1.points(),
            &[
                Point2D::new(0.5, 0.75),
                Point2D::new(0.25, 0.375),
                Point2D::new(0.75, 0.875),
            ]
        );
    }

    #[test]
    fn dyadic_offsets_are_exact() {
        let data = dyadic_counterexample(12).unwrap();
        let mut idx = 0;
        for n in 1..=12u32 {
            let offset = 2f64.powi(-(n as i32 + 1));
            for _ in 0..(1u32 << (n - 1)) {
                let p = data.e1.points()[idx];
                assert_eq!(p.y - p.x, offset);
                idx += 1;
            }
        }
        assert_eq!(idx, data.e1.len());
    }

    #[test]
    fn dyadic_union_violates_onepointedness() {
        let data = dyadic_counterexample(3).unwrap();
        let v = validate_onepointed(&data.set).unwrap_err();
        assert_eq!(v.axis, Axis::Vertical);
        assert_eq!(v.coordinate, 0.5);
        assert_eq!(v.witnesses.0, Point2D::new(0.5, 0.5));
        assert_eq!(v.witnesses.1, Point2D::new(0.5, 0.75));
    }

    #[test]
    fn indicator_separates_the_pieces() {
        let data = dyadic_counterexample(2).unwrap();
        assert_eq!(data.g.eval(Point2D::new(0.5, 0.75)), 1.0);
        assert_eq!(data.g.eval(Point2D::new(0.5, 0.5)), 0.0);
    }

    #[test]
    fn by_name_lookup() {
        assert!(by_name("pow_limit", None).is_ok());
        assert!(by_name("arctan_step", Some(0.25)).is_ok());
        assert!(matches!(
            by_name("nope", None),
            Err(GalleryError::UnknownEntry(_))
        ));
    }
}
