//! Evaluable real-valued function objects on the line and the plane.
//!
//! A function object couples a pure evaluator with a declared range and,
//! optionally, a bound evaluator that returns an interval guaranteed to
//! contain the true value at a requested precision level. All objects are
//! immutable after construction and safe to share between threads; any
//! internal caching must be behaviorally invisible.

use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Slack granted to algebraic identities that accumulate a handful of
/// double roundings.
pub const ROUNDING_SLACK: f64 = 1e-15;

#[derive(Debug, Error)]
pub enum RealFnError {
    #[error("operation `{op}` expects {expected} function argument(s), got {got}")]
    WrongArity {
        op: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("operation `{0}` received arguments of mixed domain dimension")]
    DimensionMismatch(&'static str),
    #[error("degenerate rectangle: {0}")]
    DegenerateRectangle(String),
    #[error("grid resolution must be at least 2 per axis, got {0}")]
    BadResolution(u32),
    #[error("piecewise-linear breakpoints must be nonempty with strictly increasing abscissae")]
    BadBreakpoints,
}

/// A point of a one-dimensional domain. Coordinates are always finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point1D {
    pub x: f64,
}

impl Point1D {
    pub fn new(x: f64) -> Self {
        assert!(x.is_finite(), "Point1D coordinate must be finite");
        Point1D { x }
    }
}

impl From<f64> for Point1D {
    fn from(x: f64) -> Self {
        Point1D::new(x)
    }
}

/// A point of the plane. Both coordinates are finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub fn new(x: f64, y: f64) -> Self {
        assert!(
            x.is_finite() && y.is_finite(),
            "Point2D coordinates must be finite"
        );
        Point2D { x, y }
    }
}

impl From<(f64, f64)> for Point2D {
    fn from((x, y): (f64, f64)) -> Self {
        Point2D::new(x, y)
    }
}

impl fmt::Display for Point2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A closed interval `[lo, hi]` used as a declared range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const UNIT: Interval = Interval { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo.is_finite() && hi.is_finite() && lo <= hi);
        Interval { lo, hi }
    }

    /// The degenerate interval `[c, c]`.
    pub fn point(c: f64) -> Self {
        Interval::new(c, c)
    }

    /// The symmetric interval `[-m, m]`.
    pub fn symmetric(m: f64) -> Self {
        assert!(m >= 0.0);
        Interval::new(-m, m)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_with_slack(&self, v: f64, slack: f64) -> bool {
        self.lo - slack <= v && v <= self.hi + slack
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Interval) -> Interval {
        Interval::new(self.lo + other.lo, self.hi + other.hi)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, other: Interval) -> Interval {
        Interval::new(self.lo - other.hi, self.hi - other.lo)
    }

    pub fn scale(self, c: f64) -> Interval {
        let (a, b) = (self.lo * c, self.hi * c);
        Interval::new(a.min(b), a.max(b))
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            Interval::new(-self.hi, -self.lo)
        } else {
            Interval::new(0.0, self.hi.max(-self.lo))
        }
    }

    pub fn min(self, other: Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.min(other.hi))
    }

    pub fn max(self, other: Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.max(other.hi))
    }

    pub fn clamp_to(self, lo: f64, hi: f64) -> Interval {
        assert!(lo <= hi);
        Interval::new(self.lo.clamp(lo, hi), self.hi.clamp(lo, hi))
    }

    pub fn half_sum(self, other: Interval) -> Interval {
        Interval::new((self.lo + other.lo) / 2.0, (self.hi + other.hi) / 2.0)
    }

    pub fn half_diff(self, other: Interval) -> Interval {
        Interval::new((self.lo - other.hi) / 2.0, (self.hi - other.lo) / 2.0)
    }

    pub fn hull(self, other: Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }
}

/// A value known to lie in `[center - radius, center + radius]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedValue {
    pub center: f64,
    pub radius: f64,
}

impl BoundedValue {
    pub fn new(center: f64, radius: f64) -> Self {
        assert!(center.is_finite() && radius.is_finite() && radius >= 0.0);
        BoundedValue { center, radius }
    }

    pub fn exact(v: f64) -> Self {
        BoundedValue::new(v, 0.0)
    }

    pub fn from_bounds(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi);
        BoundedValue::new((lo + hi) / 2.0, (hi - lo) / 2.0)
    }

    pub fn lower(&self) -> f64 {
        self.center - self.radius
    }

    pub fn upper(&self) -> f64 {
        self.center + self.radius
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower() <= v && v <= self.upper()
    }
}

/// Linear interpolation of the values `va` at `a` and `vb` at `b`,
/// evaluated at `x`. The single formula is shared by every module that
/// fills a gap, so distinct evaluation paths agree bit for bit.
pub fn lerp_gap(a: f64, b: f64, va: f64, vb: f64, x: f64) -> f64 {
    va + (x - a) / (b - a) * (vb - va)
}

/// Symmetric clamp into `[-m, m]`.
pub fn clamp_sym(v: f64, m: f64) -> f64 {
    v.min(m).max(-m)
}

type Eval1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type Eval2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type BoundEval1 = Arc<dyn Fn(f64, u32) -> BoundedValue + Send + Sync>;
type BoundEval2 = Arc<dyn Fn(f64, f64, u32) -> BoundedValue + Send + Sync>;

/// An evaluable function of one real variable with a declared range.
#[derive(Clone)]
pub struct RealFunction1D {
    eval: Eval1,
    bounds: Option<BoundEval1>,
    range: Interval,
}

impl RealFunction1D {
    pub fn new<F>(range: Interval, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        RealFunction1D {
            eval: Arc::new(f),
            bounds: None,
            range,
        }
    }

    pub fn with_bounds<F, B>(range: Interval, f: F, b: B) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        B: Fn(f64, u32) -> BoundedValue + Send + Sync + 'static,
    {
        RealFunction1D {
            eval: Arc::new(f),
            bounds: Some(Arc::new(b)),
            range,
        }
    }

    pub fn constant(c: f64) -> Self {
        RealFunction1D::new(Interval::point(c), move |_| c)
    }

    /// Identity on the line.
    pub fn identity() -> Self {
        RealFunction1D::new(Interval::UNIT, |x| x)
    }

    /// Piecewise-linear interpolant through `breakpoints` (strictly
    /// increasing abscissae), constant outside their span.
    pub fn piecewise_linear(breakpoints: Vec<(f64, f64)>) -> Result<Self, RealFnError> {
        if breakpoints.is_empty() {
            return Err(RealFnError::BadBreakpoints);
        }
        for w in breakpoints.windows(2) {
            if w[0].0.is_nan() || w[1].0.is_nan() || w[0].0 >= w[1].0 {
                return Err(RealFnError::BadBreakpoints);
            }
        }
        let lo = breakpoints
            .iter()
            .map(|&(_, y)| y)
            .fold(f64::INFINITY, f64::min);
        let hi = breakpoints
            .iter()
            .map(|&(_, y)| y)
            .fold(f64::NEG_INFINITY, f64::max);
        let bps = breakpoints;
        Ok(RealFunction1D::new(Interval::new(lo, hi), move |x| {
            eval_piecewise(&bps, x)
        }))
    }

    pub fn eval(&self, p: Point1D) -> f64 {
        (self.eval)(p.x)
    }

    /// Convenience evaluation from a raw coordinate.
    pub fn eval_at(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn eval_bounds(&self, p: Point1D, level: u32) -> BoundedValue {
        match &self.bounds {
            Some(b) => b(p.x, level),
            None => BoundedValue::exact((self.eval)(p.x)),
        }
    }

    pub fn has_bounds(&self) -> bool {
        self.bounds.is_some()
    }

    pub fn range(&self) -> Interval {
        self.range
    }

    pub fn add(&self, other: &Self) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        RealFunction1D::new(self.range.add(other.range), move |x| f(x) + g(x))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        RealFunction1D::new(self.range.sub(other.range), move |x| f(x) - g(x))
    }

    pub fn scale(&self, c: f64) -> Self {
        assert!(c.is_finite());
        let f = self.eval.clone();
        RealFunction1D::new(self.range.scale(c), move |x| c * f(x))
    }

    pub fn abs(&self) -> Self {
        let f = self.eval.clone();
        RealFunction1D::new(self.range.abs(), move |x| f(x).abs())
    }

    pub fn min_with(&self, other: &Self) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        RealFunction1D::new(self.range.min(other.range), move |x| f(x).min(g(x)))
    }

    pub fn max_with(&self, other: &Self) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        RealFunction1D::new(self.range.max(other.range), move |x| f(x).max(g(x)))
    }

    pub fn clamp_to(&self, lo: f64, hi: f64) -> Self {
        assert!(lo <= hi);
        let f = self.eval.clone();
        RealFunction1D::new(self.range.clamp_to(lo, hi), move |x| f(x).clamp(lo, hi))
    }
}

fn eval_piecewise(bps: &[(f64, f64)], x: f64) -> f64 {
    let first = bps[0];
    let last = bps[bps.len() - 1];
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    // index of the last breakpoint with abscissa <= x
    let mut lo = 0usize;
    let mut hi = bps.len() - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if bps[mid].0 <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (xa, ya) = bps[lo];
    let (xb, yb) = bps[hi];
    if x == xa {
        return ya;
    }
    lerp_gap(xa, xb, ya, yb, x)
}

/// An evaluable function of two real variables with a declared range.
#[derive(Clone)]
pub struct RealFunction2D {
    eval: Eval2,
    bounds: Option<BoundEval2>,
    range: Interval,
}

impl RealFunction2D {
    pub fn new<F>(range: Interval, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        RealFunction2D {
            eval: Arc::new(f),
            bounds: None,
            range,
        }
    }

    pub fn with_bounds<F, B>(range: Interval, f: F, b: B) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        B: Fn(f64, f64, u32) -> BoundedValue + Send + Sync + 'static,
    {
        RealFunction2D {
            eval: Arc::new(f),
            bounds: Some(Arc::new(b)),
            range,
        }
    }

    pub fn constant(c: f64) -> Self {
        RealFunction2D::new(Interval::point(c), move |_, _| c)
    }

    /// Lift a one-variable function to the plane through the first coordinate.
    pub fn from_x(f: &RealFunction1D) -> Self {
        let e = f.eval.clone();
        RealFunction2D::new(f.range, move |x, _| e(x))
    }

    /// Lift a one-variable function to the plane through the second coordinate.
    pub fn from_y(f: &RealFunction1D) -> Self {
        let e = f.eval.clone();
        RealFunction2D::new(f.range, move |_, y| e(y))
    }

    pub fn eval(&self, p: Point2D) -> f64 {
        (self.eval)(p.x, p.y)
    }

    pub fn eval_at(&self, x: f64, y: f64) -> f64 {
        (self.eval)(x, y)
    }

    pub fn eval_bounds(&self, p: Point2D, level: u32) -> BoundedValue {
        match &self.bounds {
            Some(b) => b(p.x, p.y, level),
            None => BoundedValue::exact((self.eval)(p.x, p.y)),
        }
    }

    pub fn has_bounds(&self) -> bool {
        self.bounds.is_some()
    }

    pub fn range(&self) -> Interval {
        self.range
    }

    pub fn add(&self, other: &Self) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        RealFunction2D::new(self.range.add(other.range), move |x, y| f(x, y) + g(x, y))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        RealFunction2D::new(self.range.sub(other.range), move |x, y| f(x, y) - g(x, y))
    }

    pub fn scale(&self, c: f64) -> Self {
        assert!(c.is_finite());
        let f = self.eval.clone();
        RealFunction2D::new(self.range.scale(c), move |x, y| c * f(x, y))
    }

    pub fn abs(&self) -> Self {
        let f = self.eval.clone();
        RealFunction2D::new(self.range.abs(), move |x, y| f(x, y).abs())
    }

    pub fn min_with(&self, other: &Self) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        RealFunction2D::new(self.range.min(other.range), move |x, y| {
            f(x, y).min(g(x, y))
        })
    }

    pub fn max_with(&self, other: &Self) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        RealFunction2D::new(self.range.max(other.range), move |x, y| {
            f(x, y).max(g(x, y))
        })
    }

    pub fn clamp_to(&self, lo: f64, hi: f64) -> Self {
        assert!(lo <= hi);
        let f = self.eval.clone();
        RealFunction2D::new(self.range.clamp_to(lo, hi), move |x, y| {
            f(x, y).clamp(lo, hi)
        })
    }
}

/// `(x, y) -> (a(x) + b(y)) / 2`.
pub fn half_sum(a: &RealFunction1D, b: &RealFunction1D) -> RealFunction2D {
    let (fa, fb) = (a.eval.clone(), b.eval.clone());
    RealFunction2D::new(a.range.half_sum(b.range), move |x, y| (fa(x) + fb(y)) / 2.0)
}

/// `(x, y) -> (a(x) - b(y)) / 2`.
pub fn half_diff(a: &RealFunction1D, b: &RealFunction1D) -> RealFunction2D {
    let (fa, fb) = (a.eval.clone(), b.eval.clone());
    RealFunction2D::new(a.range.half_diff(b.range), move |x, y| (fa(x) - fb(y)) / 2.0)
}

/// A function object of either dimension, for dynamic combination.
#[derive(Clone)]
pub enum FnObject {
    OneD(RealFunction1D),
    TwoD(RealFunction2D),
}

/// Tag for [`combine`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CombineOp {
    Add,
    Sub,
    Scale(f64),
    Abs,
    Min,
    Max,
    Clamp { lo: f64, hi: f64 },
    HalfSum,
    HalfDiff,
}

impl CombineOp {
    fn name(&self) -> &'static str {
        match self {
            CombineOp::Add => "add",
            CombineOp::Sub => "sub",
            CombineOp::Scale(_) => "scale",
            CombineOp::Abs => "abs",
            CombineOp::Min => "min",
            CombineOp::Max => "max",
            CombineOp::Clamp { .. } => "clamp",
            CombineOp::HalfSum => "half-sum",
            CombineOp::HalfDiff => "half-diff",
        }
    }

    fn arity(&self) -> usize {
        match self {
            CombineOp::Scale(_) | CombineOp::Abs | CombineOp::Clamp { .. } => 1,
            _ => 2,
        }
    }
}

/// Pointwise algebra on function objects. Binary operations require both
/// arguments on the same domain; `HalfSum`/`HalfDiff` take two one-variable
/// functions and produce the plane function of their coordinates.
pub fn combine(op: CombineOp, args: &[FnObject]) -> Result<FnObject, RealFnError> {
    let expected = op.arity();
    if args.len() != expected {
        return Err(RealFnError::WrongArity {
            op: op.name(),
            expected,
            got: args.len(),
        });
    }
    match op {
        CombineOp::Scale(c) => Ok(match &args[0] {
            FnObject::OneD(f) => FnObject::OneD(f.scale(c)),
            FnObject::TwoD(f) => FnObject::TwoD(f.scale(c)),
        }),
        CombineOp::Abs => Ok(match &args[0] {
            FnObject::OneD(f) => FnObject::OneD(f.abs()),
            FnObject::TwoD(f) => FnObject::TwoD(f.abs()),
        }),
        CombineOp::Clamp { lo, hi } => Ok(match &args[0] {
            FnObject::OneD(f) => FnObject::OneD(f.clamp_to(lo, hi)),
            FnObject::TwoD(f) => FnObject::TwoD(f.clamp_to(lo, hi)),
        }),
        CombineOp::HalfSum | CombineOp::HalfDiff => match (&args[0], &args[1]) {
            (FnObject::OneD(a), FnObject::OneD(b)) => Ok(FnObject::TwoD(match op {
                CombineOp::HalfSum => half_sum(a, b),
                _ => half_diff(a, b),
            })),
            _ => Err(RealFnError::DimensionMismatch(op.name())),
        },
        CombineOp::Add | CombineOp::Sub | CombineOp::Min | CombineOp::Max => {
            match (&args[0], &args[1]) {
                (FnObject::OneD(a), FnObject::OneD(b)) => Ok(FnObject::OneD(match op {
                    CombineOp::Add => a.add(b),
                    CombineOp::Sub => a.sub(b),
                    CombineOp::Min => a.min_with(b),
                    _ => a.max_with(b),
                })),
                (FnObject::TwoD(a), FnObject::TwoD(b)) => Ok(FnObject::TwoD(match op {
                    CombineOp::Add => a.add(b),
                    CombineOp::Sub => a.sub(b),
                    CombineOp::Min => a.min_with(b),
                    _ => a.max_with(b),
                })),
                _ => Err(RealFnError::DimensionMismatch(op.name())),
            }
        }
    }
}

/// Partial sum of the series `sum_n 2^-n * min(1, |term_n(p)|)` truncated
/// after `n_trunc` terms (indices start at 1). The geometric majorant makes
/// `2^-n_trunc` an exact tail bound, returned as the radius.
pub fn weighted_tail_series<F>(terms: F, p: Point2D, n_trunc: u32) -> BoundedValue
where
    F: Fn(u32, Point2D) -> f64,
{
    assert!(n_trunc >= 1, "truncation index must be at least 1");
    let mut center = 0.0;
    let mut weight = 0.5;
    for n in 1..=n_trunc {
        center += weight * terms(n, p).abs().min(1.0);
        weight *= 0.5;
    }
    BoundedValue::new(center, 2.0 * weight)
}

/// An axis-aligned rectangle of the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x: Interval,
    pub y: Interval,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect {
            x: Interval::new(x0, x1),
            y: Interval::new(y0, y1),
        }
    }

    pub fn contains(&self, p: Point2D) -> bool {
        self.x.contains(p.x) && self.y.contains(p.y)
    }
}

/// Values of a plane function on the uniform grid of a rectangle,
/// endpoints included. Entry `(i, j)` holds the value at `(xs[i], ys[j])`.
#[derive(Debug, Clone)]
pub struct GridSample {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    values: Vec<f64>,
}

impl GridSample {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ys.len() + j]
    }

    /// Row-major values, rows indexed by `xs`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn grid_coords(iv: Interval, resolution: u32) -> Vec<f64> {
    let n = resolution as usize;
    let step = iv.width() / (resolution - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| iv.lo + i as f64 * step).collect();
    out[n - 1] = iv.hi;
    out
}

/// Sample `f` on the `resolution x resolution` uniform grid of `rect`.
pub fn sample_grid(
    f: &RealFunction2D,
    rect: Rect,
    resolution: u32,
) -> Result<GridSample, RealFnError> {
    if resolution < 2 {
        return Err(RealFnError::BadResolution(resolution));
    }
    if rect.x.width() <= 0.0 || rect.y.width() <= 0.0 {
        return Err(RealFnError::DegenerateRectangle(format!(
            "[{}, {}] x [{}, {}]",
            rect.x.lo, rect.x.hi, rect.y.lo, rect.y.hi
        )));
    }
    let xs = grid_coords(rect.x, resolution);
    let ys = grid_coords(rect.y, resolution);
    let mut values = Vec::with_capacity(xs.len() * ys.len());
    for &x in &xs {
        for &y in &ys {
            values.push(f.eval_at(x, y));
        }
    }
    Ok(GridSample { xs, ys, values })
}
