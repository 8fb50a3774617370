//! Assembly of the separately continuous extension.
//!
//! Input: a graph set `E` in the unit square, a sequence of stage
//! functions `g_n` on `E` converging pointwise to the target `g`, and a
//! case tag describing why `E` sits inside a functionally closed set on
//! which the stage pairs converge. The pipeline builds, per stage, the
//! plane pair `(f_n, h_n)` with `f_n|_E = g_n` and `h_n|_E = 0`, then a
//! gauge `h0` whose zero set `F` contains `E`, and finally the partition
//! of unity on the complement `G`. The extension is evaluated as
//!
//! ```text
//! f(p) = sum_n phi_n(p) f_n(p)   away from F (a finite sum),
//! f(p) = lim_n f_n(p)            on F (rate oracle or stabilization).
//! ```
//!
//! Classification between the branches is rigorous on the `G` side: a
//! point is sent to the finite sum only when `h0(p)` admits a verified
//! positive lower bound and the resulting active-index bound stays below
//! the policy cap. Everywhere else the limit branch is used, which is
//! safe because near `F` the two branches differ by at most `2/n0`.

use crate::domains::{ClosedLineSet, DomainError, GraphSet};
use crate::pair_builder::{build_pair, PairError, PairFH};
use crate::pou::{
    least_index_exceeding, LazyPartitionOfUnity, PouError, RefinementPolicy, TermFamily2D,
    VanishingSequence,
};
use crate::real_fn::{
    clamp_sym, lerp_gap, weighted_tail_series, BoundedValue, Interval, Point2D, RealFunction1D,
    RealFunction2D, Rect,
};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("stage values do not stabilize at {point} within {stages} stages")]
    NonConvergence { point: Point2D, stages: u64 },
    #[error("cover leaves a gap at probe point {0}")]
    CoverGap(Point2D),
    #[error("cover has {cover} rectangles but {locals} local functions")]
    CoverMismatch { cover: usize, locals: usize },
    #[error(transparent)]
    Pair(#[from] PairError),
    #[error(transparent)]
    Pou(#[from] PouError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Which hypothesis places `E` inside a functionally closed set of
/// convergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    PseudocompactE,
    FunctionallyClosedE,
    FunctionallyClosedX1,
    FunctionallyClosedY1,
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            CaseTag::PseudocompactE => "PseudocompactE",
            CaseTag::FunctionallyClosedE => "FunctionallyClosedE",
            CaseTag::FunctionallyClosedX1 => "FunctionallyClosedX1",
            CaseTag::FunctionallyClosedY1 => "FunctionallyClosedY1",
        };
        write!(f, "{name}")
    }
}

type RateOracle = Arc<dyn Fn(f64, Point2D) -> u64 + Send + Sync>;

/// The data `n -> g_n` presenting the target as a pointwise limit of
/// continuous functions on `E`, with an optional rate oracle
/// `(tol, p) -> N` guaranteeing `|g_N - lim| <= tol` at the relevant
/// parameters from stage `N` on. Stage `n` is clamped into `[-n, n]`
/// before use.
#[derive(Clone)]
pub struct Baire1Sequence {
    terms: Arc<dyn Fn(u64) -> RealFunction2D + Send + Sync>,
    rate_oracle: Option<RateOracle>,
}

impl Baire1Sequence {
    pub fn new<F>(terms: F) -> Self
    where
        F: Fn(u64) -> RealFunction2D + Send + Sync + 'static,
    {
        Baire1Sequence {
            terms: Arc::new(terms),
            rate_oracle: None,
        }
    }

    pub fn with_rate_oracle<O>(mut self, oracle: O) -> Self
    where
        O: Fn(f64, Point2D) -> u64 + Send + Sync + 'static,
    {
        self.rate_oracle = Some(Arc::new(oracle));
        self
    }

    /// Stages given as functions of the abscissa parameter of `E`.
    pub fn from_param_terms<F>(param_terms: F) -> Self
    where
        F: Fn(u64) -> RealFunction1D + Send + Sync + 'static,
    {
        Baire1Sequence::new(move |n| RealFunction2D::from_x(&param_terms(n)))
    }

    /// The constant sequence `g_n = g`; converged from the first stage.
    pub fn constant(g: RealFunction2D) -> Self {
        Baire1Sequence::new(move |_| g.clone()).with_rate_oracle(|_, _| 1)
    }

    /// The raw stage function; `n >= 1`.
    pub fn term(&self, n: u64) -> RealFunction2D {
        assert!(n >= 1, "stages are indexed from 1");
        (self.terms)(n)
    }

    pub fn rate_oracle(&self) -> Option<&RateOracle> {
        self.rate_oracle.as_ref()
    }
}

/// Precision and fallback knobs. `initial_terms`/`max_terms` drive the
/// gauge-certification ladder, `n0_cap` bounds the partition indices the
/// finite branch will accept (beyond it the limit branch is used, with
/// reported error bound `2 / n0_cap`), and the stabilization heuristic
/// gives up after `cauchy_max_stages`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Policy {
    pub initial_terms: u32,
    pub max_terms: u32,
    pub n0_cap: u64,
    pub cauchy_max_stages: u64,
    pub gauge_terms: u32,
    pub gauge_samples: usize,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            initial_terms: 15,
            max_terms: 60,
            n0_cap: 100_000,
            cauchy_max_stages: 4096,
            gauge_terms: 24,
            gauge_samples: 63,
        }
    }
}

impl Policy {
    /// The same policy with twice the gauge precision.
    pub fn doubled_precision(mut self) -> Policy {
        self.initial_terms *= 2;
        self.max_terms *= 2;
        self
    }

    fn refinement(&self) -> RefinementPolicy {
        RefinementPolicy {
            initial_terms: self.initial_terms,
            max_terms: self.max_terms,
        }
    }

    /// Error bound reported for limit-branch fallbacks near the
    /// classification threshold.
    pub fn fallback_bound(&self) -> f64 {
        2.0 / self.n0_cap as f64
    }
}

/// Which branch evaluates at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Certified off the closed set; the partition has at most `n0`
    /// active indices.
    OnG { n0: u64 },
    /// Not certifiably off the closed set at maximum precision (or the
    /// index bound exceeds the cap); the limit branch is used.
    OnFEffective,
}

/// A nonnegative gauge whose verified zero set describes the first
/// closed set of the construction. Evaluation returns an interval
/// containing the true gauge value.
#[derive(Clone)]
pub struct GaugeFn {
    eval: Arc<dyn Fn(Point2D) -> BoundedValue + Send + Sync>,
}

impl GaugeFn {
    pub fn exact<F>(f: F) -> Self
    where
        F: Fn(Point2D) -> f64 + Send + Sync + 'static,
    {
        GaugeFn {
            eval: Arc::new(move |p| BoundedValue::exact(f(p))),
        }
    }

    pub fn approximate<F>(f: F) -> Self
    where
        F: Fn(Point2D) -> BoundedValue + Send + Sync + 'static,
    {
        GaugeFn { eval: Arc::new(f) }
    }

    pub fn eval(&self, p: Point2D) -> BoundedValue {
        (self.eval)(p)
    }
}

/// Probe location of one coordinate against the base (or image) set:
/// inside the set, in a gap between two components, or beyond the hull.
/// Carries the graph points at which stage functions must be sampled.
enum FrameLoc {
    At(Point2D),
    Between {
        a: f64,
        b: f64,
        pa: Point2D,
        pb: Point2D,
        c: f64,
    },
    Clamped(Point2D),
}

struct Frame {
    // per component: lo, hi, graph point over lo, graph point over hi
    rows: Vec<(f64, f64, Point2D, Point2D)>,
}

impl Frame {
    fn build(set: &ClosedLineSet, point_of: impl Fn(f64) -> Point2D) -> Frame {
        let rows = set
            .components()
            .iter()
            .map(|&(lo, hi)| (lo, hi, point_of(lo), point_of(hi)))
            .collect();
        Frame { rows }
    }

    fn locate(&self, c: f64, point_of: impl Fn(f64) -> Point2D) -> FrameLoc {
        let first = &self.rows[0];
        let last = &self.rows[self.rows.len() - 1];
        if c < first.0 {
            return FrameLoc::Clamped(first.2);
        }
        if c > last.1 {
            return FrameLoc::Clamped(last.3);
        }
        let mut lo = 0usize;
        let mut hi = self.rows.len() - 1;
        while hi > lo {
            let mid = (lo + hi).div_ceil(2);
            if self.rows[mid].0 <= c {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let row = &self.rows[lo];
        if c <= row.1 {
            FrameLoc::At(point_of(c))
        } else {
            let next = &self.rows[lo + 1];
            FrameLoc::Between {
                a: row.1,
                b: next.0,
                pa: row.3,
                pb: next.2,
                c,
            }
        }
    }
}

struct StagePoint {
    xloc: FrameLoc,
    yloc: FrameLoc,
}

/// Shared immutable state: the graph, the stage sequence and the frames
/// used to evaluate the extended traces of every stage with a single
/// coordinate classification per point.
struct Core {
    graph: GraphSet,
    y_set: ClosedLineSet,
    seq: Baire1Sequence,
    policy: Policy,
    x_frame: Frame,
    y_frame: Frame,
}

impl Core {
    fn stage_point(&self, p: Point2D) -> StagePoint {
        let xloc = self
            .x_frame
            .locate(p.x, |t| self.graph.point_at(t));
        let yloc = self
            .y_frame
            .locate(p.y, |s| Point2D::new(self.graph.map().invert(s), s));
        StagePoint { xloc, yloc }
    }

    fn side_value(&self, loc: &FrameLoc, g: &RealFunction2D, bound: f64) -> f64 {
        match loc {
            FrameLoc::At(p) | FrameLoc::Clamped(p) => clamp_sym(g.eval(*p), bound),
            FrameLoc::Between { a, b, pa, pb, c } => {
                let va = clamp_sym(g.eval(*pa), bound);
                let vb = clamp_sym(g.eval(*pb), bound);
                lerp_gap(*a, *b, va, vb, *c)
            }
        }
    }

    /// The extended pair values at stage `n`: `(f_n, h_n)`.
    fn pair_values(&self, sp: &StagePoint, n: u64) -> (f64, f64) {
        debug_assert!(n >= 1);
        let g = self.seq.term(n);
        let bound = n as f64;
        let phi = self.side_value(&sp.xloc, &g, bound);
        let psi = self.side_value(&sp.yloc, &g, bound);
        ((phi + psi) / 2.0, (phi - psi) / 2.0)
    }

    /// `f_n(p)`, with `f_0 = 0`.
    fn f_value(&self, sp: &StagePoint, n: u64) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.pair_values(sp, n).0
        }
    }

    fn h_value(&self, sp: &StagePoint, n: u64) -> f64 {
        self.pair_values(sp, n).1
    }
}

/// The core plus the case gauge.
struct Assembly {
    core: Arc<Core>,
    case: CaseTag,
    d1: GaugeFn,
}

impl Assembly {
    /// `h0 = min(1, D1)/2 + sum_n 2^-(n+1) min(1, |h_n|)`, truncated after
    /// `terms` series terms. The result interval accounts for the series
    /// tail and the gauge uncertainty.
    fn h0_bounds(&self, p: Point2D, terms: u32) -> BoundedValue {
        let sp = self.core.stage_point(p);
        let d = self.d1.eval(p);
        let series = weighted_tail_series(|n, _| self.core.h_value(&sp, n as u64), p, terms);
        let lo = d.lower().clamp(0.0, 1.0) / 2.0 + series.lower().max(0.0) / 2.0;
        let hi = d.upper().clamp(0.0, 1.0) / 2.0 + series.upper() / 2.0;
        BoundedValue::from_bounds(lo, hi)
    }
}

struct HTerms(Arc<Core>);

impl TermFamily2D for HTerms {
    fn eval_term(&self, n: u64, p: Point2D) -> f64 {
        let sp = self.0.stage_point(p);
        self.0.h_value(&sp, n)
    }
}

fn sequence_metric(u: &[f64], v: &[f64]) -> f64 {
    let mut d = 0.0;
    let mut w = 0.5;
    for (a, b) in u.iter().zip(v) {
        d += w * (a - b).abs().min(1.0);
        w *= 0.5;
    }
    d
}

fn make_gauge(case: CaseTag, core: &Arc<Core>) -> GaugeFn {
    match case {
        CaseTag::FunctionallyClosedX1 => {
            let base = core.graph.base().clone();
            GaugeFn::exact(move |p| base.distance(p.x))
        }
        CaseTag::FunctionallyClosedY1 => {
            let image = core.y_set.clone();
            GaugeFn::exact(move |p| image.distance(p.y))
        }
        CaseTag::FunctionallyClosedE => {
            let graph = core.graph.clone();
            GaugeFn::exact(move |p| graph.distance(p))
        }
        CaseTag::PseudocompactE => {
            // Distance, in the metric d(u, v) = sum 2^-n min(1, |u_n - v_n|),
            // between the stage vector at p and the sampled stage image of E.
            // The interval carries the series tail and the sampling slack of
            // the net, so graph points never certify as off the set.
            let n_terms = core.policy.gauge_terms.max(1);
            let tail = 2f64.powi(-(n_terms as i32));
            let params = core.graph.base().probe_params(core.policy.gauge_samples);
            let table: Vec<Vec<f64>> = params
                .iter()
                .map(|&t| {
                    let sp = core.stage_point(core.graph.point_at(t));
                    (1..=n_terms as u64).map(|n| core.f_value(&sp, n)).collect()
                })
                .collect();
            let mut slack = 0.0f64;
            for w in table.windows(2) {
                slack = slack.max(sequence_metric(&w[0], &w[1]));
            }
            let core = core.clone();
            GaugeFn::approximate(move |p| {
                let sp = core.stage_point(p);
                let u: Vec<f64> = (1..=n_terms as u64).map(|n| core.f_value(&sp, n)).collect();
                let mut dmin = f64::INFINITY;
                for row in &table {
                    dmin = dmin.min(sequence_metric(&u, row));
                }
                let lo = (dmin - tail - slack).max(0.0);
                let hi = dmin + tail;
                BoundedValue::from_bounds(lo, hi)
            })
        }
    }
}

/// The constructed extension: point classifier and evaluator.
#[derive(Clone)]
pub struct SepExtension {
    assembly: Arc<Assembly>,
    pou: LazyPartitionOfUnity,
    h0: RealFunction2D,
    policy: Policy,
}

const SPOT_CHECK_PROBES: usize = 16;

/// Builds the extension for the stage sequence on the given graph set.
pub fn build(
    graph: GraphSet,
    seq: Baire1Sequence,
    case: CaseTag,
    policy: Policy,
) -> Result<SepExtension, EngineError> {
    let y_set = graph.image_set();
    let x_frame = Frame::build(graph.base(), |t| graph.point_at(t));
    let map = graph.map().clone();
    let y_frame = Frame::build(&y_set, |s| Point2D::new(map.invert(s), s));
    let core = Arc::new(Core {
        graph,
        y_set,
        seq,
        policy,
        x_frame,
        y_frame,
    });
    let d1 = make_gauge(case, &core);
    let assembly = Arc::new(Assembly {
        core: core.clone(),
        case,
        d1,
    });

    let h0 = {
        let a = assembly.clone();
        let b = assembly.clone();
        let default_terms = policy.max_terms;
        RealFunction2D::with_bounds(
            Interval::UNIT,
            move |x, y| a.h0_bounds(Point2D::new(x, y), default_terms).center,
            move |x, y, level| b.h0_bounds(Point2D::new(x, y), level.max(1)),
        )
    };

    let vanishing = VanishingSequence::new(h0.clone(), Arc::new(HTerms(core.clone())));
    let graph_points: Vec<Point2D> = core
        .graph
        .base()
        .probe_params(SPOT_CHECK_PROBES)
        .into_iter()
        .map(|t| core.graph.point_at(t))
        .collect();
    vanishing.spot_check_vanishing(&graph_points, policy.max_terms)?;

    let pou = LazyPartitionOfUnity::new(vanishing, policy.refinement());
    Ok(SepExtension {
        assembly,
        pou,
        h0,
        policy,
    })
}

/// The diagonal corollary: extend a pointwise-limit presentation on the
/// diagonal of `x` to the whole square.
pub fn extend_diagonal(x: Interval, seq: Baire1Sequence) -> Result<SepExtension, EngineError> {
    extend_diagonal_with_policy(x, seq, Policy::default())
}

pub fn extend_diagonal_with_policy(
    x: Interval,
    seq: Baire1Sequence,
    policy: Policy,
) -> Result<SepExtension, EngineError> {
    let graph = GraphSet::diagonal_on(x.lo, x.hi)?;
    build(graph, seq, CaseTag::FunctionallyClosedX1, policy)
}

impl SepExtension {
    pub fn case(&self) -> CaseTag {
        self.assembly.case
    }

    pub fn graph(&self) -> &GraphSet {
        &self.assembly.core.graph
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn h0(&self) -> &RealFunction2D {
        &self.h0
    }

    pub fn pou(&self) -> &LazyPartitionOfUnity {
        &self.pou
    }

    pub fn f1_gauge(&self) -> &GaugeFn {
        &self.assembly.d1
    }

    /// The same extension evaluated under a different policy; the
    /// construction is shared.
    pub fn with_policy(&self, policy: Policy) -> SepExtension {
        SepExtension {
            assembly: self.assembly.clone(),
            pou: self.pou.with_policy(policy.refinement()),
            h0: self.h0.clone(),
            policy,
        }
    }

    /// The stage pair `(f_n, h_n)` as first-class plane functions.
    pub fn pair(&self, n: u64) -> Result<PairFH, EngineError> {
        assert!(n >= 1);
        let bound = n as f64;
        let g = self.assembly.core.seq.term(n).clamp_to(-bound, bound);
        Ok(build_pair(&self.assembly.core.graph, &g, bound)?)
    }

    /// `f_n(p)` along the fast stage path (`f_0 = 0`).
    pub fn stage_value(&self, n: u64, p: Point2D) -> f64 {
        let sp = self.assembly.core.stage_point(p);
        self.assembly.core.f_value(&sp, n)
    }

    /// `h_n(p)` along the fast stage path.
    pub fn h_term(&self, n: u64, p: Point2D) -> f64 {
        let sp = self.assembly.core.stage_point(p);
        self.assembly.core.h_value(&sp, n)
    }

    pub fn classify(&self, p: Point2D) -> Classification {
        match self.pou.certify_nonzero(p) {
            None => Classification::OnFEffective,
            Some(lower) => {
                let n0 = least_index_exceeding(lower);
                if n0 <= self.policy.n0_cap {
                    Classification::OnG { n0 }
                } else {
                    Classification::OnFEffective
                }
            }
        }
    }

    /// Evaluates the extension at `p` to within `tol` on the limit
    /// branch; the finite branch is exact up to rounding.
    pub fn evaluate(&self, p: Point2D, tol: f64) -> Result<f64, EngineError> {
        assert!(tol > 0.0, "tolerance must be positive");
        match self.classify(p) {
            Classification::OnG { n0 } => {
                let parts = self.pou.evaluate_partition_with_bound(p, n0)?;
                let sp = self.assembly.core.stage_point(p);
                let mut acc = 0.0;
                for (n, w) in parts {
                    if n >= 1 {
                        acc += w * self.assembly.core.f_value(&sp, n);
                    }
                }
                Ok(acc)
            }
            Classification::OnFEffective => self.limit_value(p, tol),
        }
    }

    fn limit_value(&self, p: Point2D, tol: f64) -> Result<f64, EngineError> {
        let sp = self.assembly.core.stage_point(p);
        if let Some(oracle) = self.assembly.core.seq.rate_oracle() {
            let n = oracle(tol, p).max(1);
            return Ok(self.assembly.core.f_value(&sp, n));
        }
        // stabilization heuristic; not rigorous, and reported as such by
        // the error when it fails
        let mut prev = self.assembly.core.f_value(&sp, 1);
        let mut streak = 0u32;
        for n in 2..=self.policy.cauchy_max_stages {
            let cur = self.assembly.core.f_value(&sp, n);
            if (cur - prev).abs() < tol / 4.0 {
                streak += 1;
                if streak >= 3 {
                    return Ok(cur);
                }
            } else {
                streak = 0;
            }
            prev = cur;
        }
        Err(EngineError::NonConvergence {
            point: p,
            stages: self.policy.cauchy_max_stages,
        })
    }

    /// The extension as a plain function object.
    ///
    /// Panics on evaluation if the limit branch fails to stabilize; use
    /// [`SepExtension::evaluate`] where that must be handled.
    pub fn as_function(&self, tol: f64) -> RealFunction2D {
        assert!(tol > 0.0);
        let this = self.clone();
        // the finite branch is bounded by the largest admissible active
        // index because every stage is clamped into [-n, n]
        let range = Interval::symmetric(self.policy.n0_cap as f64);
        RealFunction2D::new(range, move |x, y| {
            this.evaluate(Point2D::new(x, y), tol)
                .expect("extension evaluation requires a stabilizing sequence")
        })
    }
}

/// Unnormalized tent weights, one per rectangle, supported exactly on the
/// open rectangles.
pub fn tensor_bumps(cover: &[Rect]) -> Vec<RealFunction2D> {
    cover
        .iter()
        .map(|r| {
            let (x0, x1, y0, y1) = (r.x.lo, r.x.hi, r.y.lo, r.y.hi);
            let peak = (x1 - x0) / 2.0 * ((y1 - y0) / 2.0);
            RealFunction2D::new(Interval::new(0.0, peak.max(0.0)), move |x, y| {
                let tx = (x - x0).min(x1 - x).max(0.0);
                let ty = (y - y0).min(y1 - y).max(0.0);
                tx * ty
            })
        })
        .collect()
}

const COVER_PROBE_RESOLUTION: usize = 33;

/// Glues local extensions over a finite rectangle cover of `region`.
///
/// Each local is weighted by its tent bump normalized by the sum of all
/// bumps and extended by zero outside its rectangle; locals are only
/// evaluated where their bump is positive. The cover is validated on a
/// probe grid of the region.
pub fn glue(
    region: Rect,
    cover: &[Rect],
    locals: &[RealFunction2D],
) -> Result<RealFunction2D, EngineError> {
    if cover.len() != locals.len() {
        return Err(EngineError::CoverMismatch {
            cover: cover.len(),
            locals: locals.len(),
        });
    }
    let bumps = tensor_bumps(cover);
    for i in 0..COVER_PROBE_RESOLUTION {
        for j in 0..COVER_PROBE_RESOLUTION {
            let x = region.x.lo
                + region.x.width() * i as f64 / (COVER_PROBE_RESOLUTION - 1) as f64;
            let y = region.y.lo
                + region.y.width() * j as f64 / (COVER_PROBE_RESOLUTION - 1) as f64;
            let total: f64 = bumps.iter().map(|b| b.eval_at(x, y)).sum();
            if total.is_nan() || total <= 0.0 {
                return Err(EngineError::CoverGap(Point2D::new(x, y)));
            }
        }
    }
    let mut range = Interval::point(0.0);
    for local in locals {
        range = range.hull(local.range());
    }
    let locals = locals.to_vec();
    Ok(RealFunction2D::new(range, move |x, y| {
        let weights: Vec<f64> = bumps.iter().map(|b| b.eval_at(x, y)).collect();
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for (w, local) in weights.iter().zip(&locals) {
            if *w > 0.0 {
                acc += (w / total) * local.eval_at(x, y);
            }
        }
        acc
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_coordinate() -> RealFunction2D {
        RealFunction2D::new(Interval::UNIT, |x, _| x)
    }

    fn diagonal_identity_build() -> SepExtension {
        extend_diagonal(Interval::UNIT, Baire1Sequence::constant(first_coordinate())).unwrap()
    }

    #[test]
    fn h0_single_term_value() {
        // |h_1| = 1 at (1, 0) and all later h_n = 0 there, zero gauge:
        // h0 = 2^-2 * 1 = 0.25
        let seq = Baire1Sequence::new(|n| {
            if n == 1 {
                RealFunction2D::new(Interval::new(-2.0, 2.0), |x, _| 4.0 * x - 2.0)
            } else {
                RealFunction2D::constant(0.0)
            }
        })
        .with_rate_oracle(|_, _| 2);
        let ext = build(
            GraphSet::diagonal(),
            seq,
            CaseTag::FunctionallyClosedX1,
            Policy::default(),
        )
        .unwrap();
        // phi_1(1) = clamp(2) = 1, psi_1(0) = clamp(-2) = -1, so h_1 = 1
        let b = ext.h0().eval_bounds(Point2D::new(1.0, 0.0), 60);
        assert!((b.center - 0.25).abs() <= 1e-15);
    }

    #[test]
    fn gauge_is_zero_on_full_base() {
        let ext = diagonal_identity_build();
        for &(x, y) in &[(0.2, 0.9), (0.5, 0.5), (1.0, 0.0)] {
            let d = ext.f1_gauge().eval(Point2D::new(x, y));
            assert_eq!(d.center, 0.0);
        }
    }

    #[test]
    fn gauge_measures_distance_to_partial_base() {
        let graph = GraphSet::new(
            ClosedLineSet::interval(0.0, 0.5).unwrap(),
            crate::domains::Homeomorphism1D::identity(),
        )
        .unwrap();
        let ext = build(
            graph,
            Baire1Sequence::constant(first_coordinate()),
            CaseTag::FunctionallyClosedX1,
            Policy::default(),
        )
        .unwrap();
        let d = ext.f1_gauge().eval(Point2D::new(0.75, 0.1));
        assert_eq!(d.center, 0.25);
        assert_eq!(d.radius, 0.0);
    }

    #[test]
    fn h0_mixes_gauge_at_half_weight() {
        // constant stages keep every h_n at zero, so h0 is the gauge term
        // alone: min(1, D1) / 2
        let graph = GraphSet::new(
            ClosedLineSet::interval(0.0, 0.5).unwrap(),
            crate::domains::Homeomorphism1D::identity(),
        )
        .unwrap();
        let ext = build(
            graph,
            Baire1Sequence::constant(RealFunction2D::constant(0.2)),
            CaseTag::FunctionallyClosedX1,
            Policy::default(),
        )
        .unwrap();
        let b = ext.h0().eval_bounds(Point2D::new(1.0, 0.3), 60);
        assert!((b.center - 0.25).abs() <= 1e-15);
    }

    #[test]
    fn pseudocompact_gauge_vanishes_for_constant_stages() {
        let ext = build(
            GraphSet::diagonal(),
            Baire1Sequence::constant(RealFunction2D::constant(0.3)),
            CaseTag::PseudocompactE,
            Policy::default(),
        )
        .unwrap();
        let tail = 2f64.powi(-(Policy::default().gauge_terms as i32));
        for &(x, y) in &[(0.1, 0.9), (0.5, 0.5), (0.0, 1.0)] {
            // the stage image is a single sequence point, so the measured
            // distance is 0 up to the truncation tail
            let d = ext.f1_gauge().eval(Point2D::new(x, y));
            assert_eq!(d.lower(), 0.0);
            assert!(d.upper() <= tail);
        }
    }

    #[test]
    fn classify_graph_points_as_effective_f() {
        let ext = diagonal_identity_build();
        assert_eq!(
            ext.classify(Point2D::new(0.25, 0.25)),
            Classification::OnFEffective
        );
        match ext.classify(Point2D::new(0.1, 0.9)) {
            Classification::OnG { n0 } => assert!(n0 >= 2),
            other => panic!("expected the finite branch, got {other:?}"),
        }
    }

    #[test]
    fn constant_sequence_matches_closed_form_on_both_branches() {
        let ext = diagonal_identity_build();
        for i in 0..=20 {
            for j in 0..=20 {
                let (x, y) = (i as f64 / 20.0, j as f64 / 20.0);
                let v = ext.evaluate(Point2D::new(x, y), 1e-9).unwrap();
                let want = (x + y) / 2.0;
                assert!(
                    (v - want).abs() <= 1e-12,
                    "f({x}, {y}) = {v}, closed form {want}"
                );
            }
        }
    }

    #[test]
    fn constant_value_everywhere() {
        let ext = extend_diagonal(
            Interval::UNIT,
            Baire1Sequence::constant(RealFunction2D::constant(0.0)),
        )
        .unwrap();
        for &(x, y) in &[(0.0, 0.0), (0.3, 0.8), (1.0, 0.2)] {
            assert_eq!(ext.evaluate(Point2D::new(x, y), 1e-9).unwrap(), 0.0);
        }
    }

    #[test]
    fn stage_and_pair_paths_agree() {
        let ext = diagonal_identity_build();
        let pair = ext.pair(2).unwrap();
        for &(x, y) in &[(0.1, 0.9), (0.4, 0.6), (0.77, 0.13)] {
            let p = Point2D::new(x, y);
            assert_eq!(ext.stage_value(2, p), pair.f().eval(p));
            assert_eq!(ext.h_term(2, p), pair.h().eval(p));
        }
    }

    #[test]
    fn nonconvergent_sequence_reports_failure() {
        let seq = Baire1Sequence::new(|n| {
            RealFunction2D::constant(if n % 2 == 0 { 0.5 } else { -0.5 })
        });
        let ext = extend_diagonal(Interval::UNIT, seq).unwrap();
        match ext.evaluate(Point2D::new(0.5, 0.5), 1e-6) {
            Err(EngineError::NonConvergence { point, .. }) => {
                assert_eq!(point, Point2D::new(0.5, 0.5));
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn glue_single_rectangle_reproduces_local() {
        let local = RealFunction2D::new(Interval::UNIT, |x, y| (x + y) / 2.0);
        let region = Rect::new(0.0, 1.0, 0.0, 1.0);
        let cover = [Rect::new(-0.25, 1.25, -0.25, 1.25)];
        let glued = glue(region, &cover, std::slice::from_ref(&local)).unwrap();
        for &(x, y) in &[(0.0, 0.0), (0.5, 0.25), (1.0, 1.0)] {
            assert!((glued.eval_at(x, y) - local.eval_at(x, y)).abs() <= 1e-15);
        }
    }

    #[test]
    fn glue_weighted_average_of_two_locals() {
        let region = Rect::new(0.45, 0.55, 0.45, 0.55);
        // symmetric rectangles, so the probe region carries equal weights
        // at the center point
        let cover = [Rect::new(-0.6, 1.0, -0.6, 1.0), Rect::new(0.0, 1.6, 0.0, 1.6)];
        let locals = [RealFunction2D::constant(0.2), RealFunction2D::constant(0.4)];
        let glued = glue(region, &cover, &locals).unwrap();
        // at (0.5, 0.5) both tents give 0.5 * 0.5, so the weights are equal
        let v = glued.eval_at(0.5, 0.5);
        assert!((v - 0.3).abs() <= 1e-12, "v = {v}");
    }

    #[test]
    fn glue_detects_cover_gaps() {
        let region = Rect::new(0.0, 1.0, 0.0, 1.0);
        let cover = [Rect::new(0.0, 0.3, 0.0, 0.3)];
        let local = RealFunction2D::constant(1.0);
        assert!(matches!(
            glue(region, &cover, &[local]),
            Err(EngineError::CoverGap(_))
        ));
    }

    #[test]
    fn fallback_is_stable_under_doubled_precision() {
        let ext = diagonal_identity_build();
        let fine = ext.with_policy(ext.policy().doubled_precision());
        let bound = ext.policy().fallback_bound();
        for i in 0..10 {
            let t = i as f64 / 10.0;
            let p = Point2D::new(t, t);
            assert_eq!(ext.classify(p), Classification::OnFEffective);
            let a = ext.evaluate(p, 1e-9).unwrap();
            let b = fine.evaluate(p, 1e-9).unwrap();
            assert!((a - b).abs() < bound);
        }
    }

    #[test]
    fn pair_stage_bound_is_stage_index() {
        let seq = Baire1Sequence::new(|_| {
            RealFunction2D::new(Interval::new(-3.0, 3.0), |x, _| 3.0 * (x - 0.5))
        })
        .with_rate_oracle(|_, _| 1);
        let ext = build(
            GraphSet::diagonal(),
            seq,
            CaseTag::FunctionallyClosedX1,
            Policy::default(),
        )
        .unwrap();
        // stage 1 clamps into [-1, 1]
        let p1 = ext.pair(1).unwrap();
        assert_eq!(p1.phi_tilde().eval_at(1.0), 1.0);
        // stage 2 clamps into [-2, 2]
        let p2 = ext.pair(2).unwrap();
        assert_eq!(p2.phi_tilde().eval_at(1.0), 1.5);
    }
}
