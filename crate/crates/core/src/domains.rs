//! Concrete domains: closed subsets of the unit interval, strictly
//! monotone piecewise-linear homeomorphisms, graph sets in the square,
//! and the one-pointedness validation used to recover a graph structure
//! from a set given as a union of pieces.

use crate::real_fn::Point2D;
use thiserror::Error;

/// Tolerance for coordinate-equality decisions. This sits far below any
/// feature scale of the dyadic families at tractable truncation depths.
pub const COORD_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("the set has no components")]
    EmptySet,
    #[error("component [{lo}, {hi}] is not a subinterval of [0, 1]")]
    ComponentOutOfRange { lo: f64, hi: f64 },
    #[error("component bounds are not ordered: [{lo}, {hi}]")]
    UnorderedComponent { lo: f64, hi: f64 },
    #[error("breakpoints must have strictly increasing abscissae (duplicate near x = {0})")]
    DuplicateBreakpoint(f64),
    #[error("breakpoint ordinates are not strictly monotone (near x = {0})")]
    NotMonotone(f64),
    #[error("homeomorphism needs at least one breakpoint")]
    NoBreakpoints,
    #[error("base set [{lo}, {hi}] escapes the breakpoint span [{span_lo}, {span_hi}]")]
    BaseOutsideSpan {
        lo: f64,
        hi: f64,
        span_lo: f64,
        span_hi: f64,
    },
    #[error("duplicate point {0} in a finite point set")]
    DuplicatePoint(Point2D),
}

/// Classification of a coordinate against a closed line set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Locate1D {
    InSet,
    InGap { left: f64, right: f64 },
    LeftOfSet { min: f64 },
    RightOfSet { max: f64 },
}

/// A finite union of disjoint closed intervals inside `[0, 1]`;
/// singletons are intervals with equal endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLineSet {
    components: Vec<(f64, f64)>,
    tag: Option<String>,
}

impl ClosedLineSet {
    /// Normalizes the component list: sorts by left endpoint and merges
    /// components that overlap or touch.
    pub fn new(mut components: Vec<(f64, f64)>) -> Result<Self, DomainError> {
        if components.is_empty() {
            return Err(DomainError::EmptySet);
        }
        for &(lo, hi) in &components {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(DomainError::UnorderedComponent { lo, hi });
            }
            if lo < 0.0 || hi > 1.0 {
                return Err(DomainError::ComponentOutOfRange { lo, hi });
            }
        }
        components.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(components.len());
        for (lo, hi) in components {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Ok(ClosedLineSet {
            components: merged,
            tag: None,
        })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self, DomainError> {
        ClosedLineSet::new(vec![(lo, hi)])
    }

    pub fn singleton(x: f64) -> Result<Self, DomainError> {
        ClosedLineSet::new(vec![(x, x)])
    }

    /// The whole unit interval.
    pub fn unit() -> Self {
        ClosedLineSet::interval(0.0, 1.0).expect("unit interval is valid")
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = Some(tag.into());
        self
    }

    pub fn tag(&self) -> Option<&str> {
        self.tag.as_deref()
    }

    pub fn components(&self) -> &[(f64, f64)] {
        &self.components
    }

    pub fn min(&self) -> f64 {
        self.components[0].0
    }

    pub fn max(&self) -> f64 {
        self.components[self.components.len() - 1].1
    }

    pub fn total_length(&self) -> f64 {
        self.components.iter().map(|&(lo, hi)| hi - lo).sum()
    }

    /// Exact classification of `x` against the component list.
    pub fn locate(&self, x: f64) -> Locate1D {
        if x < self.min() {
            return Locate1D::LeftOfSet { min: self.min() };
        }
        if x > self.max() {
            return Locate1D::RightOfSet { max: self.max() };
        }
        // last component whose left endpoint is <= x
        let mut lo = 0usize;
        let mut hi = self.components.len() - 1;
        while hi > lo {
            let mid = (lo + hi).div_ceil(2);
            if self.components[mid].0 <= x {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let comp = self.components[lo];
        if x <= comp.1 {
            Locate1D::InSet
        } else {
            Locate1D::InGap {
                left: comp.1,
                right: self.components[lo + 1].0,
            }
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        matches!(self.locate(x), Locate1D::InSet)
    }

    /// Distance from `x` to the set; exact for the interval-union form.
    pub fn distance(&self, x: f64) -> f64 {
        match self.locate(x) {
            Locate1D::InSet => 0.0,
            Locate1D::InGap { left, right } => (x - left).min(right - x),
            Locate1D::LeftOfSet { min } => min - x,
            Locate1D::RightOfSet { max } => x - max,
        }
    }

    pub fn contains_within(&self, x: f64, tol: f64) -> bool {
        self.distance(x) <= tol
    }

    /// Intersection with another interval union.
    pub fn intersect(&self, other: &ClosedLineSet) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for &(a, b) in &self.components {
            for &(c, d) in &other.components {
                let lo = a.max(c);
                let hi = b.min(d);
                if lo <= hi {
                    out.push((lo, hi));
                }
            }
        }
        out
    }

    /// Deterministic probe parameters: all component endpoints plus
    /// `per_component` evenly spaced interior points of each interval.
    pub fn probe_params(&self, per_component: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for &(lo, hi) in &self.components {
            out.push(lo);
            if hi > lo {
                for i in 1..=per_component {
                    let t = i as f64 / (per_component + 1) as f64;
                    out.push(lo + t * (hi - lo));
                }
                out.push(hi);
            }
        }
        out
    }

    /// Uniform sample with respect to length; for a pure point set the
    /// points are drawn uniformly from the list.
    pub fn sample_param<R: rand::Rng>(&self, rng: &mut R) -> f64 {
        let total = self.total_length();
        if total <= 0.0 {
            let idx = rng.gen_range(0..self.components.len());
            return self.components[idx].0;
        }
        let mut t = rng.gen_range(0.0..total);
        for &(lo, hi) in &self.components {
            let len = hi - lo;
            if t <= len {
                return (lo + t).min(hi);
            }
            t -= len;
        }
        self.max()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// A strictly monotone piecewise-linear map, invertible by construction.
/// The breakpoints span an interval on which the map and its inverse are
/// evaluated exactly by segment interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct Homeomorphism1D {
    breakpoints: Vec<(f64, f64)>,
    direction: Direction,
}

impl Homeomorphism1D {
    pub fn new(mut breakpoints: Vec<(f64, f64)>) -> Result<Self, DomainError> {
        if breakpoints.is_empty() {
            return Err(DomainError::NoBreakpoints);
        }
        breakpoints.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in breakpoints.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(DomainError::DuplicateBreakpoint(w[0].0));
            }
        }
        let direction = if breakpoints.len() < 2 || breakpoints[1].1 > breakpoints[0].1 {
            Direction::Increasing
        } else {
            Direction::Decreasing
        };
        for w in breakpoints.windows(2) {
            let ok = match direction {
                Direction::Increasing => w[1].1 > w[0].1,
                Direction::Decreasing => w[1].1 < w[0].1,
            };
            if !ok {
                return Err(DomainError::NotMonotone(w[0].0));
            }
        }
        Ok(Homeomorphism1D {
            breakpoints,
            direction,
        })
    }

    pub fn identity() -> Self {
        Homeomorphism1D::new(vec![(0.0, 0.0), (1.0, 1.0)]).expect("identity breakpoints are valid")
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn span(&self) -> (f64, f64) {
        (
            self.breakpoints[0].0,
            self.breakpoints[self.breakpoints.len() - 1].0,
        )
    }

    fn eval_segments(bps: &[(f64, f64)], x: f64) -> f64 {
        let first = bps[0];
        let last = bps[bps.len() - 1];
        if x <= first.0 {
            return first.1;
        }
        if x >= last.0 {
            return last.1;
        }
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
        crate::real_fn::lerp_gap(xa, xb, ya, yb, x)
    }

    pub fn apply(&self, x: f64) -> f64 {
        Self::eval_segments(&self.breakpoints, x)
    }

    pub fn invert(&self, y: f64) -> f64 {
        let mut swapped: Vec<(f64, f64)> =
            self.breakpoints.iter().map(|&(x, y)| (y, x)).collect();
        if self.direction == Direction::Decreasing {
            swapped.reverse();
        }
        Self::eval_segments(&swapped, y)
    }

    /// The inverse map as a first-class homeomorphism.
    pub fn inverse(&self) -> Homeomorphism1D {
        let swapped: Vec<(f64, f64)> = self.breakpoints.iter().map(|&(x, y)| (y, x)).collect();
        Homeomorphism1D::new(swapped).expect("inverse of a strictly monotone map is valid")
    }

    /// Image of an interval union under the map, again an interval union.
    pub fn image(&self, set: &ClosedLineSet) -> ClosedLineSet {
        let comps = set
            .components()
            .iter()
            .map(|&(lo, hi)| {
                let (a, b) = (self.apply(lo), self.apply(hi));
                (a.min(b), a.max(b))
            })
            .collect();
        ClosedLineSet::new(comps).expect("image of a valid set is valid")
    }
}

/// The graph `{(x, e(x)) : x in base}` of a homeomorphism over a closed
/// line set.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSet {
    base: ClosedLineSet,
    map: Homeomorphism1D,
}

impl GraphSet {
    pub fn new(base: ClosedLineSet, map: Homeomorphism1D) -> Result<Self, DomainError> {
        let (span_lo, span_hi) = map.span();
        if map.breakpoints().len() >= 2 {
            for &(lo, hi) in base.components() {
                if lo < span_lo || hi > span_hi {
                    return Err(DomainError::BaseOutsideSpan {
                        lo,
                        hi,
                        span_lo,
                        span_hi,
                    });
                }
            }
        }
        Ok(GraphSet { base, map })
    }

    /// The diagonal of the unit square.
    pub fn diagonal() -> Self {
        GraphSet::new(ClosedLineSet::unit(), Homeomorphism1D::identity())
            .expect("diagonal is a valid graph")
    }

    pub fn diagonal_on(lo: f64, hi: f64) -> Result<Self, DomainError> {
        GraphSet::new(ClosedLineSet::interval(lo, hi)?, Homeomorphism1D::identity())
    }

    pub fn base(&self) -> &ClosedLineSet {
        &self.base
    }

    pub fn map(&self) -> &Homeomorphism1D {
        &self.map
    }

    pub fn image_set(&self) -> ClosedLineSet {
        self.map.image(&self.base)
    }

    /// The graph point over parameter `t`.
    pub fn point_at(&self, t: f64) -> Point2D {
        Point2D::new(t, self.map.apply(t))
    }

    pub fn contains(&self, p: Point2D) -> bool {
        self.base.contains(p.x) && (p.y - self.map.apply(p.x)).abs() <= COORD_TOL
    }

    /// Plane distance to the graph, exact over the segment decomposition.
    pub fn distance(&self, p: Point2D) -> f64 {
        let mut best = f64::INFINITY;
        for (a, b) in self.segments() {
            best = best.min(segment_distance(p, a, b));
        }
        best
    }

    /// Segment decomposition: each base component is split at interior
    /// map breakpoints.
    pub fn segments(&self) -> Vec<(Point2D, Point2D)> {
        let mut out = Vec::new();
        for &(lo, hi) in self.base.components() {
            if hi == lo {
                let p = self.point_at(lo);
                out.push((p, p));
                continue;
            }
            let mut knots = vec![lo];
            for &(bx, _) in self.map.breakpoints() {
                if bx > lo && bx < hi {
                    knots.push(bx);
                }
            }
            knots.push(hi);
            for w in knots.windows(2) {
                out.push((self.point_at(w[0]), self.point_at(w[1])));
            }
        }
        out
    }
}

fn segment_distance(p: Point2D, a: Point2D, b: Point2D) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return ((p.x - a.x).powi(2) + (p.y - a.y).powi(2)).sqrt();
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    let (qx, qy) = (a.x + t * dx, a.y + t * dy);
    ((p.x - qx).powi(2) + (p.y - qy).powi(2)).sqrt()
}

/// A finite set of plane points without duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePointSet2D {
    points: Vec<Point2D>,
}

impl FinitePointSet2D {
    pub fn new(points: Vec<Point2D>) -> Result<Self, DomainError> {
        for (i, p) in points.iter().enumerate() {
            for q in &points[i + 1..] {
                if (p.x - q.x).abs() <= COORD_TOL && (p.y - q.y).abs() <= COORD_TOL {
                    return Err(DomainError::DuplicatePoint(*p));
                }
            }
        }
        Ok(FinitePointSet2D { points })
    }

    pub fn points(&self) -> &[Point2D] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains_within(&self, p: Point2D, tol: f64) -> bool {
        self.points
            .iter()
            .any(|q| (p.x - q.x).abs() <= tol && (p.y - q.y).abs() <= tol)
    }
}

/// One piece of a plane set given as a finite union.
#[derive(Debug, Clone)]
pub enum PlanePiece {
    Graph(GraphSet),
    Points(FinitePointSet2D),
}

/// A finite union of graph pieces and point sets.
#[derive(Debug, Clone)]
pub struct PlaneSetUnion {
    pieces: Vec<PlanePiece>,
}

impl PlaneSetUnion {
    pub fn new(pieces: Vec<PlanePiece>) -> Self {
        PlaneSetUnion { pieces }
    }

    pub fn pieces(&self) -> &[PlanePiece] {
        &self.pieces
    }

    /// The union with the roles of the coordinates exchanged.
    pub fn swap_axes(&self) -> PlaneSetUnion {
        let pieces = self
            .pieces
            .iter()
            .map(|piece| match piece {
                PlanePiece::Points(ps) => PlanePiece::Points(
                    FinitePointSet2D::new(
                        ps.points().iter().map(|p| Point2D::new(p.y, p.x)).collect(),
                    )
                    .expect("swapping preserves distinctness"),
                ),
                PlanePiece::Graph(g) => PlanePiece::Graph(
                    GraphSet::new(g.image_set(), g.map().inverse())
                        .expect("swapped graph is valid"),
                ),
            })
            .collect();
        PlaneSetUnion::new(pieces)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Vertical,
    Horizontal,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::Vertical => write!(f, "vertical"),
            Axis::Horizontal => write!(f, "horizontal"),
        }
    }
}

/// Two distinct points of the set on one vertical or horizontal line.
#[derive(Debug, Clone, PartialEq)]
pub struct OnePointedViolation {
    pub axis: Axis,
    pub coordinate: f64,
    pub witnesses: (Point2D, Point2D),
}

impl std::fmt::Display for OnePointedViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} line at {} meets the set twice: {} and {}",
            self.axis, self.coordinate, self.witnesses.0, self.witnesses.1
        )
    }
}

fn violation(axis: Axis, coordinate: f64, a: Point2D, b: Point2D) -> OnePointedViolation {
    // order witnesses by the free coordinate for deterministic reports
    let (first, second) = match axis {
        Axis::Vertical => {
            if a.y <= b.y {
                (a, b)
            } else {
                (b, a)
            }
        }
        Axis::Horizontal => {
            if a.x <= b.x {
                (a, b)
            } else {
                (b, a)
            }
        }
    };
    OnePointedViolation {
        axis,
        coordinate,
        witnesses: (first, second),
    }
}

fn check_points_self(ps: &FinitePointSet2D) -> Result<(), OnePointedViolation> {
    let mut by_x: Vec<Point2D> = ps.points().to_vec();
    by_x.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    for w in by_x.windows(2) {
        if (w[1].x - w[0].x).abs() <= COORD_TOL && (w[1].y - w[0].y).abs() > COORD_TOL {
            return Err(violation(Axis::Vertical, w[0].x, w[0], w[1]));
        }
    }
    let mut by_y: Vec<Point2D> = ps.points().to_vec();
    by_y.sort_by(|a, b| (a.y, a.x).partial_cmp(&(b.y, b.x)).unwrap());
    for w in by_y.windows(2) {
        if (w[1].y - w[0].y).abs() <= COORD_TOL && (w[1].x - w[0].x).abs() > COORD_TOL {
            return Err(violation(Axis::Horizontal, w[0].y, w[0], w[1]));
        }
    }
    Ok(())
}

fn check_point_against_graph(p: Point2D, g: &GraphSet) -> Result<(), OnePointedViolation> {
    if g.base().contains_within(p.x, COORD_TOL) {
        let gy = g.map().apply(p.x);
        if (p.y - gy).abs() > COORD_TOL {
            return Err(violation(
                Axis::Vertical,
                p.x,
                Point2D::new(p.x, gy),
                p,
            ));
        }
    }
    if g.image_set().contains_within(p.y, COORD_TOL) {
        let gx = g.map().invert(p.y);
        if (p.x - gx).abs() > COORD_TOL {
            return Err(violation(
                Axis::Horizontal,
                p.y,
                Point2D::new(gx, p.y),
                p,
            ));
        }
    }
    Ok(())
}

fn check_points_cross(
    a: &FinitePointSet2D,
    b: &FinitePointSet2D,
) -> Result<(), OnePointedViolation> {
    for p in a.points() {
        for q in b.points() {
            let same_x = (p.x - q.x).abs() <= COORD_TOL;
            let same_y = (p.y - q.y).abs() <= COORD_TOL;
            if same_x && same_y {
                continue; // the same point listed in both pieces
            }
            if same_x {
                return Err(violation(Axis::Vertical, p.x, *p, *q));
            }
            if same_y {
                return Err(violation(Axis::Horizontal, p.y, *p, *q));
            }
        }
    }
    Ok(())
}

fn graph_compare_params(a: &GraphSet, b: &GraphSet) -> Vec<f64> {
    let mut params = Vec::new();
    for (lo, hi) in a.base().intersect(b.base()) {
        params.push(lo);
        params.push(hi);
        for &(bx, _) in a.map().breakpoints() {
            if bx > lo && bx < hi {
                params.push(bx);
            }
        }
        for &(bx, _) in b.map().breakpoints() {
            if bx > lo && bx < hi {
                params.push(bx);
            }
        }
    }
    params
}

fn check_graph_against_graph(a: &GraphSet, b: &GraphSet) -> Result<(), OnePointedViolation> {
    // Shared abscissae: the two sections must agree (piecewise-linear, so
    // endpoint and breakpoint probes are exhaustive).
    for x in graph_compare_params(a, b) {
        let (ya, yb) = (a.map().apply(x), b.map().apply(x));
        if (ya - yb).abs() > COORD_TOL {
            return Err(violation(
                Axis::Vertical,
                x,
                Point2D::new(x, ya),
                Point2D::new(x, yb),
            ));
        }
    }
    // Shared ordinates, via the inverse graphs.
    let ai = GraphSet::new(a.image_set(), a.map().inverse()).expect("inverse graph");
    let bi = GraphSet::new(b.image_set(), b.map().inverse()).expect("inverse graph");
    for y in graph_compare_params(&ai, &bi) {
        let (xa, xb) = (ai.map().apply(y), bi.map().apply(y));
        if (xa - xb).abs() > COORD_TOL {
            return Err(violation(
                Axis::Horizontal,
                y,
                Point2D::new(xa, y),
                Point2D::new(xb, y),
            ));
        }
    }
    Ok(())
}

/// Checks that every vertical and horizontal line meets the union in at
/// most one point. Graph pieces are one-pointed against themselves by
/// monotonicity; the remaining combinations are checked pairwise with the
/// [`COORD_TOL`] equality tolerance.
pub fn validate_onepointed(set: &PlaneSetUnion) -> Result<(), OnePointedViolation> {
    for piece in set.pieces() {
        if let PlanePiece::Points(ps) = piece {
            check_points_self(ps)?;
        }
    }
    let pieces = set.pieces();
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            match (&pieces[i], &pieces[j]) {
                (PlanePiece::Points(a), PlanePiece::Points(b)) => check_points_cross(a, b)?,
                (PlanePiece::Points(ps), PlanePiece::Graph(g)) => {
                    for p in ps.points() {
                        check_point_against_graph(*p, g)?;
                    }
                }
                (PlanePiece::Graph(g), PlanePiece::Points(ps)) => {
                    for p in ps.points() {
                        check_point_against_graph(*p, g)?;
                    }
                }
                (PlanePiece::Graph(a), PlanePiece::Graph(b)) => check_graph_against_graph(a, b)?,
            }
        }
    }
    Ok(())
}

#[derive(Debug, Error)]
pub enum GraphRecoveryError {
    #[error("set is not one-pointed: {0}")]
    NotOnePointed(OnePointedViolation),
    #[error("pieces project onto overlapping abscissa ranges near x = {0}")]
    OverlappingProjections(f64),
    #[error("combined breakpoints are not monotone near x = {0}; non-monotone recovery is unsupported")]
    NonMonotone(f64),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Recovers `(base, map)` with graph equal to the union. Requires the
/// union to be one-pointed and the combined pieces to form a strictly
/// monotone map; the rejection carries the violation witness.
pub fn graph_from_onepointed(
    set: &PlaneSetUnion,
) -> Result<(ClosedLineSet, Homeomorphism1D), GraphRecoveryError> {
    validate_onepointed(set).map_err(GraphRecoveryError::NotOnePointed)?;

    struct Fragment {
        lo: f64,
        hi: f64,
        breakpoints: Vec<(f64, f64)>,
    }

    let mut fragments: Vec<Fragment> = Vec::new();
    for piece in set.pieces() {
        match piece {
            PlanePiece::Points(ps) => {
                for p in ps.points() {
                    fragments.push(Fragment {
                        lo: p.x,
                        hi: p.x,
                        breakpoints: vec![(p.x, p.y)],
                    });
                }
            }
            PlanePiece::Graph(g) => {
                for &(lo, hi) in g.base().components() {
                    let mut bps = vec![(lo, g.map().apply(lo))];
                    for &(bx, by) in g.map().breakpoints() {
                        if bx > lo && bx < hi {
                            bps.push((bx, by));
                        }
                    }
                    if hi > lo {
                        bps.push((hi, g.map().apply(hi)));
                    }
                    fragments.push(Fragment {
                        lo,
                        hi,
                        breakpoints: bps,
                    });
                }
            }
        }
    }
    fragments.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
    for w in fragments.windows(2) {
        if w[1].lo < w[0].hi - COORD_TOL {
            return Err(GraphRecoveryError::OverlappingProjections(w[1].lo));
        }
    }

    let mut components = Vec::new();
    let mut breakpoints: Vec<(f64, f64)> = Vec::new();
    for frag in &fragments {
        components.push((frag.lo, frag.hi));
        for &(x, y) in &frag.breakpoints {
            match breakpoints.last() {
                Some(&(px, py)) if (x - px).abs() <= COORD_TOL => {
                    // same abscissa across abutting fragments; the validated
                    // union guarantees the ordinates agree
                    let _ = py;
                }
                _ => breakpoints.push((x, y)),
            }
        }
    }

    if breakpoints.len() >= 3 {
        let increasing = breakpoints[1].1 > breakpoints[0].1;
        for w in breakpoints.windows(2) {
            let ok = if increasing {
                w[1].1 > w[0].1
            } else {
                w[1].1 < w[0].1
            };
            if !ok {
                return Err(GraphRecoveryError::NonMonotone(w[0].0));
            }
        }
    }

    let base = ClosedLineSet::new(components)?;
    let map = Homeomorphism1D::new(breakpoints).map_err(|e| match e {
        DomainError::NotMonotone(at) => GraphRecoveryError::NonMonotone(at),
        other => GraphRecoveryError::Domain(other),
    })?;
    Ok((base, map))
}
