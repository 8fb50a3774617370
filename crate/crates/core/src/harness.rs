//! Verification probes: each check samples a construction, measures the
//! worst deviation from the asserted identity or estimate, and reports
//! pass/fail against a threshold. Sampling is seeded, so reports are
//! reproducible.

use crate::domains::GraphSet;
use crate::engine::{EngineError, SepExtension};
use crate::pair_builder::PairFH;
use crate::real_fn::{Point2D, RealFunction2D};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Outcome of one check. `pass` holds exactly when the worst deviation
/// stays within the threshold.
#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub name: String,
    pub samples: usize,
    pub worst: f64,
    pub threshold: f64,
    pub pass: bool,
    pub witness: Option<Point2D>,
    pub seed: u64,
}

impl ProbeReport {
    pub fn from_worst(
        name: impl Into<String>,
        samples: usize,
        worst: f64,
        threshold: f64,
        witness: Option<Point2D>,
        seed: u64,
    ) -> Self {
        ProbeReport {
            name: name.into(),
            samples,
            worst,
            threshold,
            pass: worst <= threshold,
            witness,
            seed,
        }
    }

    /// One-line plain-text form.
    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let witness = match self.witness {
            Some(p) => format!("({}, {})", p.x, p.y),
            None => "none".to_string(),
        };
        format!(
            "{verdict} {} worst={:e} thr={:e} witness={witness}",
            self.name, self.worst, self.threshold
        )
    }

    /// Machine-readable key-value block.
    pub fn kv_block(&self) -> String {
        let witness = match self.witness {
            Some(p) => format!("({},{})", p.x, p.y),
            None => "none".to_string(),
        };
        format!(
            "check={}\nsamples={}\nworst={:e}\nthreshold={:e}\npass={}\nwitness={}\nseed={}\n",
            self.name, self.samples, self.worst, self.threshold, self.pass, witness, self.seed
        )
    }
}

struct WorstTracker {
    worst: f64,
    witness: Option<Point2D>,
}

impl WorstTracker {
    fn new() -> Self {
        WorstTracker {
            worst: 0.0,
            witness: None,
        }
    }

    fn observe(&mut self, deviation: f64, at: Point2D) {
        if deviation > self.worst || self.witness.is_none() {
            self.worst = deviation.max(self.worst);
            self.witness = Some(at);
        }
    }
}

fn sample_params(e: &GraphSet, n_samples: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params: Vec<f64> = e
        .base()
        .components()
        .iter()
        .flat_map(|&(lo, hi)| [lo, hi])
        .collect();
    params.dedup();
    while params.len() < n_samples {
        params.push(e.base().sample_param(&mut rng));
    }
    params
}

/// Worst deviation of the extension from the limit values along the
/// graph, sampled uniformly in the abscissa parameter (component
/// endpoints always included).
pub fn check_restriction(
    ext: &SepExtension,
    e: &GraphSet,
    limit: &dyn Fn(f64) -> f64,
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<ProbeReport, EngineError> {
    let params = sample_params(e, n_samples, seed);
    let mut tracker = WorstTracker::new();
    for &t in &params {
        let p = e.point_at(t);
        let v = ext.evaluate(p, tol)?;
        tracker.observe((v - limit(t)).abs(), p);
    }
    Ok(ProbeReport::from_worst(
        "restriction",
        params.len(),
        tracker.worst,
        tol,
        tracker.witness,
        seed,
    ))
}

/// Evaluates the extension along the graph without comparing values;
/// surfaces stabilization failures for sequences without a known limit.
pub fn check_evaluability(
    ext: &SepExtension,
    e: &GraphSet,
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<ProbeReport, EngineError> {
    let params = sample_params(e, n_samples, seed);
    for &t in &params {
        ext.evaluate(e.point_at(t), tol)?;
    }
    Ok(ProbeReport::from_worst(
        "restriction-evaluability",
        params.len(),
        0.0,
        tol,
        None,
        seed,
    ))
}

/// Which coordinate varies along a section probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectionAxis {
    /// Fix the ordinate at the anchor, vary the abscissa.
    Horizontal,
    /// Fix the abscissa at the anchor, vary the ordinate.
    Vertical,
}

/// For each depth `k`, the maximum absolute difference of `f` between
/// adjacent points of the `2^-k`-grid of the window along the section.
pub fn section_oscillation(
    f: &RealFunction2D,
    axis: SectionAxis,
    anchor: f64,
    window: (f64, f64),
    depths: &[u32],
) -> Vec<f64> {
    assert!(window.0 < window.1);
    let mut out = Vec::with_capacity(depths.len());
    for &k in depths {
        let step = 2f64.powi(-(k as i32));
        let count = ((window.1 - window.0) / step).floor() as usize;
        let mut ts: Vec<f64> = (0..=count).map(|i| window.0 + i as f64 * step).collect();
        let last = *ts.last().expect("window produces at least one point");
        if last < window.1 - step * 1e-9 {
            ts.push(window.1);
        } else {
            *ts.last_mut().unwrap() = window.1;
        }
        let value = |t: f64| match axis {
            SectionAxis::Horizontal => f.eval_at(t, anchor),
            SectionAxis::Vertical => f.eval_at(anchor, t),
        };
        let mut max_diff = 0.0f64;
        let mut prev = value(ts[0]);
        for &t in &ts[1..] {
            let cur = value(t);
            max_diff = max_diff.max((cur - prev).abs());
            prev = cur;
        }
        out.push(max_diff);
    }
    out
}

/// Probe directions: the axis directions and exact diagonals first (the
/// diagonal offsets reuse one product, so a diagonal base point stays
/// exactly on the diagonal), then a ring of generic angles.
fn probe_directions() -> Vec<(f64, f64)> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut dirs = vec![
        (1.0, 0.0),
        (s, s),
        (0.0, 1.0),
        (-s, s),
        (-1.0, 0.0),
        (-s, -s),
        (0.0, -1.0),
        (s, -s),
    ];
    for i in 0..24 {
        let theta = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / 24.0;
        dirs.push((theta.cos(), theta.sin()));
    }
    dirs
}

/// Lower bounds on the oscillation of `f` near `p0`: for each radius the
/// maximum of `|f(q) - f(p0)|` over ring samples at distances `<= r`
/// inside the unit square.
pub fn joint_discontinuity_probe(f: &RealFunction2D, p0: Point2D, radii: &[f64]) -> Vec<f64> {
    let dirs = probe_directions();
    let center = f.eval(p0);
    radii
        .iter()
        .map(|&r| {
            let mut osc = 0.0f64;
            for &scale in &[1.0, 0.5, 0.25] {
                let s = r * scale;
                for &(dx, dy) in &dirs {
                    let (qx, qy) = (p0.x + s * dx, p0.y + s * dy);
                    if (0.0..=1.0).contains(&qx) && (0.0..=1.0).contains(&qy) {
                        osc = osc.max((f.eval_at(qx, qy) - center).abs());
                    }
                }
            }
            osc
        })
        .collect()
}

/// Section-increment identity of a pair: moving one coordinate changes
/// `f` and `h` by increments of equal magnitude.
pub fn check_pair_identity(pair: &PairFH, n_triples: usize, tol: f64, seed: u64) -> ProbeReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracker = WorstTracker::new();
    for _ in 0..n_triples {
        let (xa, xb, y) = (
            rng.gen_range(0.0..=1.0),
            rng.gen_range(0.0..=1.0),
            rng.gen_range(0.0..=1.0),
        );
        let df = (pair.f().eval_at(xa, y) - pair.f().eval_at(xb, y)).abs();
        let dh = (pair.h().eval_at(xa, y) - pair.h().eval_at(xb, y)).abs();
        tracker.observe((df - dh).abs(), Point2D::new(xa, y));

        let (x, ya, yb) = (
            rng.gen_range(0.0..=1.0),
            rng.gen_range(0.0..=1.0),
            rng.gen_range(0.0..=1.0),
        );
        let df = (pair.f().eval_at(x, ya) - pair.f().eval_at(x, yb)).abs();
        let dh = (pair.h().eval_at(x, ya) - pair.h().eval_at(x, yb)).abs();
        tracker.observe((df - dh).abs(), Point2D::new(x, ya));
    }
    ProbeReport::from_worst(
        "pair-identity",
        2 * n_triples,
        tracker.worst,
        tol,
        tracker.witness,
        seed,
    )
}

/// Partition checks at certified points of the complement: the weights
/// are nonnegative, sum to one, respect the strict threshold on their own
/// index, and never exceed the certified index bound in number.
pub fn check_partition(
    ext: &SepExtension,
    n_points: usize,
    tol: f64,
    seed: u64,
) -> Result<ProbeReport, EngineError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracker = WorstTracker::new();
    let mut collected = 0usize;
    let mut attempts = 0usize;
    let max_attempts = n_points.saturating_mul(100).max(1000);
    while collected < n_points && attempts < max_attempts {
        attempts += 1;
        let p = Point2D::new(rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0));
        let n0 = match ext.pou().active_index_bound(p) {
            Ok(n0) if n0 <= ext.policy().n0_cap => n0,
            _ => continue,
        };
        collected += 1;
        let parts = ext.pou().evaluate_partition_with_bound(p, n0)?;
        let sum: f64 = parts.iter().map(|&(_, w)| w).sum();
        tracker.observe((sum - 1.0).abs(), p);
        if parts.len() as u64 > n0 {
            tracker.observe(f64::INFINITY, p);
        }
        for &(n, w) in &parts {
            if w < 0.0 {
                tracker.observe(-w, p);
            }
            if n >= 1 && w > 0.0 {
                let h = ext.h_term(n, p).abs();
                let thr = 1.0 / n as f64;
                if h.is_nan() || h >= thr {
                    tracker.observe(h - thr + 1.0, p);
                }
            }
        }
    }
    Ok(ProbeReport::from_worst(
        "partition",
        collected,
        tracker.worst,
        tol,
        tracker.witness,
        seed,
    ))
}

/// Largest window half-width (found by halving from `delta_cap`) such
/// that the section through `p0` stays within `eps` of `f(p0)` on
/// sampled points of the window; `None` if none is found within 40
/// halvings.
pub fn section_delta_for_epsilon(
    f: &RealFunction2D,
    p0: Point2D,
    axis: SectionAxis,
    eps: f64,
    delta_cap: f64,
) -> Option<f64> {
    let center = f.eval(p0);
    let anchor = match axis {
        SectionAxis::Horizontal => p0.x,
        SectionAxis::Vertical => p0.y,
    };
    let holds = |delta: f64| {
        for i in 0..=64 {
            let t = anchor - delta + 2.0 * delta * i as f64 / 64.0;
            if !(0.0..=1.0).contains(&t) {
                continue;
            }
            let v = match axis {
                SectionAxis::Horizontal => f.eval_at(t, p0.y),
                SectionAxis::Vertical => f.eval_at(p0.x, t),
            };
            if (v - center).abs() >= eps {
                return false;
            }
        }
        true
    };
    let mut delta = delta_cap;
    for _ in 0..40 {
        if holds(delta) {
            return Some(delta);
        }
        delta /= 2.0;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{extend_diagonal, Baire1Sequence};
    use crate::pair_builder::build_pair;
    use crate::real_fn::{Interval, RealFunction2D};

    fn mean_function() -> RealFunction2D {
        RealFunction2D::new(Interval::UNIT, |x, y| (x + y) / 2.0)
    }

    #[test]
    fn restriction_on_constant_build() {
        let ext = extend_diagonal(
            Interval::UNIT,
            Baire1Sequence::constant(RealFunction2D::constant(0.5)),
        )
        .unwrap();
        let report = check_restriction(
            &ext,
            &GraphSet::diagonal(),
            &|_| 0.5,
            1000,
            1e-12,
            7,
        )
        .unwrap();
        assert!(report.pass, "{}", report.line());
    }

    #[test]
    fn oscillation_of_linear_section_halves_with_depth() {
        let f = mean_function();
        let osc = section_oscillation(&f, SectionAxis::Horizontal, 0.25, (0.5, 0.75), &[8, 9, 10]);
        assert_eq!(osc, vec![2f64.powi(-9), 2f64.powi(-10), 2f64.powi(-11)]);
    }

    #[test]
    fn oscillation_of_constant_is_zero() {
        let f = RealFunction2D::constant(3.0);
        let osc = section_oscillation(&f, SectionAxis::Vertical, 0.5, (0.0, 1.0), &[4, 6]);
        assert_eq!(osc, vec![0.0, 0.0]);
    }

    #[test]
    fn joint_probe_is_small_for_lipschitz_functions() {
        let f = mean_function();
        let osc = joint_discontinuity_probe(&f, Point2D::new(0.5, 0.5), &[0.1]);
        assert!(osc[0] <= 0.1 + 1e-12);
        let constant = RealFunction2D::constant(1.0);
        let osc = joint_discontinuity_probe(&constant, Point2D::new(0.5, 0.5), &[0.1, 0.01]);
        assert_eq!(osc, vec![0.0, 0.0]);
    }

    #[test]
    fn pair_identity_deviation_is_rounding_level() {
        let e = GraphSet::diagonal();
        let g = RealFunction2D::new(Interval::UNIT, |x, _| x);
        let pair = build_pair(&e, &g, 1.0).unwrap();
        let report = check_pair_identity(&pair, 1000, 1e-15, 11);
        assert!(report.pass, "{}", report.line());
        assert_eq!(report.samples, 2000);
    }

    #[test]
    fn report_lines_are_stable() {
        let r = ProbeReport::from_worst("demo", 10, 0.5, 0.25, Some(Point2D::new(0.1, 0.2)), 3);
        assert_eq!(r.line(), "FAIL demo worst=5e-1 thr=2.5e-1 witness=(0.1, 0.2)");
        assert!(r.kv_block().contains("pass=false"));
        let ok = ProbeReport::from_worst("demo", 10, 0.1, 0.25, None, 3);
        assert!(ok.line().starts_with("PASS demo"));
    }

    #[test]
    fn reports_are_deterministic_under_a_seed() {
        let e = GraphSet::diagonal();
        let g = RealFunction2D::new(Interval::UNIT, |x, _| x);
        let pair = build_pair(&e, &g, 1.0).unwrap();
        let a = check_pair_identity(&pair, 200, 1e-15, 5);
        let b = check_pair_identity(&pair, 200, 1e-15, 5);
        assert_eq!(a.worst.to_bits(), b.worst.to_bits());
        assert_eq!(a.witness, b.witness);
    }
}
