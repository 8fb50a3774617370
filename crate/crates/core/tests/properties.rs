//! Structural invariants checked on generated inputs.

use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sepcont::domains::{
    validate_onepointed, ClosedLineSet, FinitePointSet2D, GraphSet, Homeomorphism1D, PlanePiece,
    PlaneSetUnion,
};
use sepcont::extend1d::{extend_linear, PartialFunction1D};
use sepcont::real_fn::{
    combine, weighted_tail_series, CombineOp, FnObject, Interval, Point2D, RealFunction1D,
    ROUNDING_SLACK,
};

fn breakpoints_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    (
        prop::collection::vec(0.01f64..0.99, 1..5),
        prop::collection::vec(0.01f64..1.0, 2..7),
        any::<bool>(),
    )
        .prop_map(|(mut xs, steps, decreasing)| {
            xs.push(0.0);
            xs.push(1.0);
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            xs.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            // keep the span exactly [0, 1]
            *xs.last_mut().unwrap() = 1.0;
            let n = xs.len();
            let used: Vec<f64> = (0..n - 1).map(|i| steps[i % steps.len()]).collect();
            let total: f64 = used.iter().sum();
            let mut y = 0.0;
            let mut out = Vec::with_capacity(n);
            for (i, &x) in xs.iter().enumerate() {
                if i > 0 {
                    y += used[i - 1] / total;
                }
                let ordinate = if decreasing { 1.0 - y } else { y };
                out.push((x, ordinate));
            }
            out
        })
        .prop_filter("needs at least two breakpoints", |bps| bps.len() >= 2)
}

proptest! {
    #[test]
    fn homeomorphism_roundtrip(bps in breakpoints_strategy(), params in prop::collection::vec(0.0f64..=1.0, 20)) {
        let e = Homeomorphism1D::new(bps).unwrap();
        let (lo, hi) = e.span();
        for t in params {
            let x = lo + t * (hi - lo);
            let back = e.invert(e.apply(x));
            prop_assert!((back - x).abs() <= 1e-12, "roundtrip drift {} at {}", (back - x).abs(), x);
        }
    }

    #[test]
    fn graph_membership_matches_base(bps in breakpoints_strategy(), t in 0.0f64..=1.0, off in -0.5f64..0.5) {
        let e = Homeomorphism1D::new(bps).unwrap();
        let g = GraphSet::new(ClosedLineSet::unit(), e).unwrap();
        let on = g.point_at(t);
        prop_assert!(g.contains(on));
        if off.abs() > 1e-9 {
            let y = (on.y + off).clamp(0.0, 1.0);
            if (y - on.y).abs() > 1e-9 {
                prop_assert!(!g.contains(Point2D::new(on.x, y)));
            }
        }
    }

    #[test]
    fn tail_series_intervals_are_nested(seed in any::<u64>(), base in 1u32..6) {
        let term = move |n: u32, _p: Point2D| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
            rng.gen_range(-2.0..2.0)
        };
        let p = Point2D::new(0.5, 0.5);
        let mut prev = weighted_tail_series(term, p, base);
        for n in (base + 1)..(base + 12) {
            let cur = weighted_tail_series(term, p, n);
            prop_assert!(cur.lower() >= prev.lower() - prev.radius - ROUNDING_SLACK);
            prop_assert!(cur.upper() <= prev.upper() + prev.radius + ROUNDING_SLACK);
            prev = cur;
        }
    }

    #[test]
    fn extension_restricts_and_preserves_range(
        bps in breakpoints_strategy(),
        comps in prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 1..4),
        probes in prop::collection::vec(0.0f64..=1.0, 30),
    ) {
        let comps: Vec<(f64, f64)> = comps
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        let domain = ClosedLineSet::new(comps).unwrap();
        let g = RealFunction1D::piecewise_linear(bps.clone()).unwrap();
        let partial = PartialFunction1D::new(domain.clone(), g.clone());
        let ext = extend_linear(&partial).unwrap();

        // restriction: exact reproduction on the domain
        for &(lo, hi) in domain.components() {
            for s in [lo, hi, (lo + hi) / 2.0] {
                prop_assert_eq!(ext.eval_at(s), g.eval_at(s));
            }
        }
        // exact extrema of a piecewise-linear g over the domain: component
        // endpoints plus interior breakpoints
        let mut min_g = f64::INFINITY;
        let mut max_g = f64::NEG_INFINITY;
        let mut note = |v: f64| {
            min_g = min_g.min(v);
            max_g = max_g.max(v);
        };
        for &(lo, hi) in domain.components() {
            note(g.eval_at(lo));
            note(g.eval_at(hi));
            for &(bx, _) in &bps {
                if bx > lo && bx < hi {
                    note(g.eval_at(bx));
                }
            }
        }
        // gap chords are convex combinations, so the extension stays in
        // the domain hull and in its declared range
        for x in probes {
            let v = ext.eval_at(x);
            prop_assert!(ext.range().contains_with_slack(v, ROUNDING_SLACK));
            prop_assert!(
                v >= min_g - ROUNDING_SLACK && v <= max_g + ROUNDING_SLACK,
                "extension value {} escapes domain hull [{}, {}]", v, min_g, max_g
            );
        }
    }

    #[test]
    fn onepointed_validation_is_axis_symmetric(
        points in prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 1..12),
    ) {
        // symmetrize the point cloud under coordinate swap
        let mut all: Vec<Point2D> = Vec::new();
        for (x, y) in points {
            all.push(Point2D::new(x, y));
            all.push(Point2D::new(y, x));
        }
        all.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
        all.dedup_by(|a, b| (a.x - b.x).abs() <= 1e-12 && (a.y - b.y).abs() <= 1e-12);
        let Ok(ps) = FinitePointSet2D::new(all) else {
            return Ok(());
        };
        let union = PlaneSetUnion::new(vec![PlanePiece::Points(ps)]);
        let direct = validate_onepointed(&union).is_ok();
        let swapped = validate_onepointed(&union.swap_axes()).is_ok();
        prop_assert_eq!(direct, swapped);
    }
}

#[test]
fn combinator_ranges_are_sound_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let a = RealFunction1D::piecewise_linear(vec![(0.0, 0.1), (0.4, 0.9), (1.0, 0.3)]).unwrap();
    let b = RealFunction1D::piecewise_linear(vec![(0.0, 0.8), (0.7, 0.0), (1.0, 0.5)]).unwrap();
    let ops = [
        CombineOp::Add,
        CombineOp::Sub,
        CombineOp::Min,
        CombineOp::Max,
        CombineOp::HalfSum,
        CombineOp::HalfDiff,
    ];
    let mut checked = 0usize;
    for op in ops {
        let out = combine(
            op,
            &[FnObject::OneD(a.clone()), FnObject::OneD(b.clone())],
        )
        .unwrap();
        for _ in 0..2000 {
            let (x, y) = (rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0));
            let (v, range) = match &out {
                FnObject::OneD(f) => (f.eval_at(x), f.range()),
                FnObject::TwoD(f) => (f.eval_at(x, y), f.range()),
            };
            assert!(
                range.contains_with_slack(v, ROUNDING_SLACK),
                "{op:?}: value {v} outside {range:?}"
            );
            checked += 1;
        }
    }
    for op in [
        CombineOp::Abs,
        CombineOp::Scale(-1.75),
        CombineOp::Clamp { lo: 0.2, hi: 0.6 },
    ] {
        let out = combine(op, &[FnObject::OneD(a.clone())]).unwrap();
        for _ in 0..1000 {
            let x = rng.gen_range(0.0..=1.0);
            let (v, range) = match &out {
                FnObject::OneD(f) => (f.eval_at(x), f.range()),
                FnObject::TwoD(f) => (f.eval_at(x, 0.0), f.range()),
            };
            assert!(
                range.contains_with_slack(v, ROUNDING_SLACK),
                "{op:?}: value {v} outside {range:?}"
            );
            checked += 1;
        }
    }
    assert!(checked >= 10_000);
}

#[test]
fn extension_gap_slopes_match_difference_quotients() {
    let domain = ClosedLineSet::new(vec![(0.0, 0.25), (0.4, 0.4), (0.75, 1.0)]).unwrap();
    let g = RealFunction1D::new(Interval::UNIT, |x| (1.5 * x).sin().abs());
    let partial = PartialFunction1D::new(domain.clone(), g.clone());
    let ext = extend_linear(&partial).unwrap();
    let gaps = [(0.25f64, 0.4f64), (0.4, 0.75)];
    for (a, b) in gaps {
        let slope = (g.eval_at(b) - g.eval_at(a)) / (b - a);
        for i in 0..16 {
            let s = a + (b - a) * (i as f64 + 0.25) / 16.5;
            let t = a + (b - a) * (i as f64 + 0.75) / 16.5;
            let q = (ext.eval_at(t) - ext.eval_at(s)) / (t - s);
            assert!(
                (q - slope).abs() <= 1e-12,
                "gap ({a}, {b}): quotient {q} vs slope {slope}"
            );
        }
    }
}
