//! Fixed-point search in `O(log |L|)` (lexicographic order), `O(log² N)`
//! (componentwise, two dimensions) and `O(log^d N)` (componentwise, any
//! constant dimension) oracle queries.
//!
//! All componentwise searches keep a current box `B` with `f(B) ⊆ B`. Probing
//! a point `x ∈ B` with `f(x) ≥_c x` shows that `[f(x), sup B]` is again
//! mapped into itself, and dually for `f(x) ≤_c x`; the image `f(x)` is used
//! as the new corner so that every step strictly shrinks the box. Any answer
//! that contradicts these invariants is reported as a contract violation,
//! together with a pair of logged queries refuting monotonicity when one
//! exists.

use crate::error::{Error, Result};
use crate::lattice::{
    compare_unchecked, floor_mid, BoxLattice, Comparison, OrderRelation, Point,
};
use crate::oracle::{MonotoneOracle, Session};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub fixed_point: Point,
    /// Distinct oracle queries spent by this search.
    pub queries: usize,
    /// Boxes visited, outermost first, when tracing was requested.
    pub trace: Option<Vec<BoxLattice>>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    pub trace: bool,
}

/// Binary search over ranks for a map preserving the lexicographic order.
///
/// Keeps `lo ≤ rank f(unrank lo)` and `rank f(unrank hi) ≤ hi`; every probe
/// halves `[lo, hi]`, so at most `⌈log₂|L|⌉ + 2` queries are made.
pub fn solve_lexicographic(session: &mut Session<'_>) -> Result<SolveResult> {
    let start = session.queries();
    let domain = session.domain().clone();
    let mut lo: u128 = 0;
    let mut hi: u128 = domain.size() - 1;
    loop {
        let m = lo + (hi - lo) / 2;
        let x = domain.unrank(m)?;
        let fx = session.query(&x)?;
        let r = domain.rank(&fx)?;
        if r == m {
            return Ok(SolveResult {
                fixed_point: x,
                queries: session.queries() - start,
                trace: None,
            });
        }
        if r < lo || r > hi || lo == hi {
            return Err(violation(
                session,
                OrderRelation::Lexicographic,
                format!("f({x}) = {fx} leaves the rank interval [{lo}, {hi}]"),
            ));
        }
        if r > m {
            lo = m + 1;
        } else {
            hi = m - 1;
        }
    }
}

/// Point_check on a two-dimensional box.
pub fn solve_2d(session: &mut Session<'_>, opts: SolveOptions) -> Result<SolveResult> {
    let d = session.domain().dim();
    if d != 2 {
        return Err(Error::Usage(format!("solve_2d needs a 2-dimensional box, got d = {d}")));
    }
    run(session, opts)
}

/// Slice recursion for any dimension: binary search for `d = 1`, Point_check
/// for `d = 2`, and for `d ≥ 3` a recursive solve of the slice through the
/// center of the last coordinate followed by a halving of that coordinate.
pub fn solve_componentwise(session: &mut Session<'_>, opts: SolveOptions) -> Result<SolveResult> {
    run(session, opts)
}

/// Dispatches on the order relation.
pub fn solve(
    session: &mut Session<'_>,
    order: OrderRelation,
    opts: SolveOptions,
) -> Result<SolveResult> {
    match order {
        OrderRelation::Lexicographic => solve_lexicographic(session),
        OrderRelation::Componentwise => solve_componentwise(session, opts),
    }
}

fn run(session: &mut Session<'_>, opts: SolveOptions) -> Result<SolveResult> {
    let start = session.queries();
    let domain = session.domain().clone();
    let max_log = domain
        .sides()
        .iter()
        .map(|&n| ceil_log2(n))
        .max()
        .unwrap_or(0) as usize;
    let mut search = Search {
        session,
        trace: opts.trace.then(Vec::new),
        depth_limit: domain.dim() * (2 + max_log),
    };
    let fixed_point = search.solve(&[], &domain, 0)?;
    let trace = search.trace.take();
    Ok(SolveResult {
        fixed_point,
        queries: search.session.queries() - start,
        trace,
    })
}

pub(crate) fn ceil_log2(n: u128) -> u32 {
    if n <= 1 {
        0
    } else {
        128 - (n - 1).leading_zeros()
    }
}

fn violation(session: &Session<'_>, order: OrderRelation, reason: String) -> Error {
    Error::contract(reason, session.find_witness(order))
}

fn lift(x: &[i64], suffix: &[i64]) -> Point {
    let mut full = Vec::with_capacity(x.len() + suffix.len());
    full.extend_from_slice(x);
    full.extend_from_slice(suffix);
    full.into()
}

/// `f` restricted to the hyperplane `x_d = fixed`, keeping the first `d − 1`
/// coordinates of the answer.
pub struct SliceOracle<'a> {
    inner: &'a mut dyn MonotoneOracle,
    domain: BoxLattice,
    fixed: i64,
}

impl<'a> SliceOracle<'a> {
    pub fn new(inner: &'a mut dyn MonotoneOracle, fixed: i64) -> Result<Self> {
        let full = inner.domain().clone();
        let d = full.dim();
        if d < 2 {
            return Err(Error::Usage("cannot slice a one-dimensional box".into()));
        }
        if fixed < full.lower()[d - 1] || fixed > full.upper()[d - 1] {
            return Err(Error::OutOfRange(format!("slice value {fixed} outside {full}")));
        }
        Ok(SliceOracle {
            domain: full.slice_last()?,
            inner,
            fixed,
        })
    }
}

impl MonotoneOracle for SliceOracle<'_> {
    fn domain(&self) -> &BoxLattice {
        &self.domain
    }

    fn raw_eval(&mut self, x: &Point) -> Point {
        let k = x.dim();
        self.inner.raw_eval(&lift(x, &[self.fixed])).truncated(k)
    }
}

enum Segment {
    Found(Point),
    Narrowed(BoxLattice),
}

struct Search<'s, 'o> {
    session: &'s mut Session<'o>,
    trace: Option<Vec<BoxLattice>>,
    depth_limit: usize,
}

impl Search<'_, '_> {
    /// Evaluates the slice map at `x`: the first `x.len()` coordinates of
    /// `f(x, suffix)`.
    fn eval(&mut self, suffix: &[i64], x: &[i64]) -> Result<Point> {
        let k = x.len();
        Ok(self.session.query(&lift(x, suffix))?.truncated(k))
    }

    /// Evaluates and checks that the answer stays inside the current box.
    fn probe(&mut self, suffix: &[i64], current: &BoxLattice, x: &[i64]) -> Result<Point> {
        let fx = self.eval(suffix, x)?;
        if !current.contains(&fx) {
            return Err(self.fail(format!(
                "f({}) = {fx} escapes the invariant box {current}",
                Point::from(x)
            )));
        }
        Ok(fx)
    }

    fn fail(&self, reason: String) -> Error {
        violation(self.session, OrderRelation::Componentwise, reason)
    }

    fn enter(&mut self, current: &BoxLattice, depth: usize) -> Result<()> {
        if depth > self.depth_limit {
            return Err(self.fail(format!(
                "recursion depth {depth} exceeds {}; oracle suspected non-monotone",
                self.depth_limit
            )));
        }
        if let Some(trace) = self.trace.as_mut() {
            trace.push(current.clone());
        }
        Ok(())
    }

    fn solve(&mut self, suffix: &[i64], current: &BoxLattice, depth: usize) -> Result<Point> {
        match current.dim() {
            1 => self.line(suffix, current, depth),
            2 => self.point_check(suffix, current.clone(), depth),
            _ => self.slices(suffix, current.clone(), depth),
        }
    }

    fn singleton(&mut self, suffix: &[i64], current: &BoxLattice) -> Result<Point> {
        let x = current.lower().clone();
        let fx = self.eval(suffix, &x)?;
        if fx != x {
            return Err(self.fail(format!(
                "single-point box {current} is not fixed: f({x}) = {fx}"
            )));
        }
        Ok(x)
    }

    /// One-dimensional base case: endpoints first, then bisection keeping
    /// `f(lo) > lo` and `f(hi) < hi`.
    fn line(&mut self, suffix: &[i64], current: &BoxLattice, depth: usize) -> Result<Point> {
        self.enter(current, depth)?;
        if current.is_singleton() {
            return self.singleton(suffix, current);
        }
        let mut lo = current.lower()[0];
        let mut hi = current.upper()[0];
        if self.probe(suffix, current, &[lo])?[0] == lo {
            return Ok(Point::from([lo]));
        }
        if self.probe(suffix, current, &[hi])?[0] == hi {
            return Ok(Point::from([hi]));
        }
        loop {
            if hi - lo <= 1 {
                return Err(self.fail(format!(
                    "adjacent points {lo} and {hi} move apart, leaving no fixed point between"
                )));
            }
            let m = floor_mid(lo, hi);
            let fm = self.eval(suffix, &[m])?[0];
            if fm < lo || fm > hi {
                return Err(self.fail(format!("f({m}) = {fm} escapes [{lo}, {hi}]")));
            }
            match fm.cmp(&m) {
                std::cmp::Ordering::Equal => return Ok(Point::from([m])),
                std::cmp::Ordering::Less => hi = m,
                std::cmp::Ordering::Greater => lo = m,
            }
        }
    }

    fn point_check(&mut self, suffix: &[i64], mut current: BoxLattice, mut depth: usize) -> Result<Point> {
        loop {
            self.enter(&current, depth)?;
            depth += 1;
            if current.is_singleton() {
                return self.singleton(suffix, &current);
            }
            let x0 = current.center();
            let fx = self.probe(suffix, &current, &x0)?;
            match compare_unchecked(OrderRelation::Componentwise, &fx, &x0) {
                Comparison::Equal => return Ok(x0),
                Comparison::Greater => current = up_box(&current, &fx)?,
                Comparison::Less => current = down_box(&current, &fx)?,
                Comparison::Incomparable => {
                    let row = x0[1];
                    let outcome = if fx[0] < x0[0] {
                        // f pushes left and up: walk the row toward the left edge.
                        self.segment_left(suffix, &current, row, current.lower()[0], x0[0])?
                    } else {
                        self.segment_right(suffix, &current, row, x0[0], current.upper()[0])?
                    };
                    match outcome {
                        Segment::Found(p) => return Ok(p),
                        Segment::Narrowed(b) => current = b,
                    }
                }
            }
        }
    }

    /// Classifies a midline probe; `None` means the answer is antitone and the
    /// caller keeps bisecting.
    fn midline(
        &mut self,
        suffix: &[i64],
        current: &BoxLattice,
        xm: &Point,
    ) -> Result<(Point, Option<Segment>)> {
        let fx = self.probe(suffix, current, xm)?;
        let outcome = match compare_unchecked(OrderRelation::Componentwise, &fx, xm) {
            Comparison::Equal => Some(Segment::Found(xm.clone())),
            Comparison::Greater => Some(Segment::Narrowed(up_box(current, &fx)?)),
            Comparison::Less => Some(Segment::Narrowed(down_box(current, &fx)?)),
            Comparison::Incomparable => None,
        };
        Ok((fx, outcome))
    }

    /// Searches `[lo, hi)` on the row for a point with `f₁(x) = x₁`, knowing
    /// `f₁ ≥ x₁` at `lo` and `f₁ < x₁` at `hi`.
    fn segment_left(
        &mut self,
        suffix: &[i64],
        current: &BoxLattice,
        row: i64,
        mut lo: i64,
        mut hi: i64,
    ) -> Result<Segment> {
        loop {
            if lo >= hi {
                return Err(self.fail(format!(
                    "no crossing of f₁ on row {row} between {lo} and {hi}"
                )));
            }
            let m = floor_mid(lo, hi);
            let xm = Point::from([m, row]);
            let (fx, outcome) = self.midline(suffix, current, &xm)?;
            if let Some(seg) = outcome {
                return Ok(seg);
            }
            if fx[0] < m {
                hi = m;
            } else {
                lo = m + 1;
            }
        }
    }

    /// Searches `(lo, hi]` on the row, knowing `f₁ > x₁` at `lo` and
    /// `f₁ ≤ x₁` at `hi`.
    fn segment_right(
        &mut self,
        suffix: &[i64],
        current: &BoxLattice,
        row: i64,
        mut lo: i64,
        mut hi: i64,
    ) -> Result<Segment> {
        loop {
            if lo >= hi {
                return Err(self.fail(format!(
                    "no crossing of f₁ on row {row} between {lo} and {hi}"
                )));
            }
            let m = floor_mid(lo + 1, hi);
            let xm = Point::from([m, row]);
            let (fx, outcome) = self.midline(suffix, current, &xm)?;
            if let Some(seg) = outcome {
                return Ok(seg);
            }
            if fx[0] > m {
                lo = m;
            } else {
                hi = m - 1;
            }
        }
    }

    fn slices(&mut self, suffix: &[i64], mut current: BoxLattice, mut depth: usize) -> Result<Point> {
        let d = current.dim();
        loop {
            self.enter(&current, depth)?;
            depth += 1;
            if current.is_singleton() {
                return self.singleton(suffix, &current);
            }
            let c = floor_mid(current.lower()[d - 1], current.upper()[d - 1]);
            let inner_suffix = lift(&[c], suffix);
            let slice_box = current.slice_last()?;
            let inner = self.solve(&inner_suffix, &slice_box, depth)?;
            let y = inner.extended(c);
            let fy = self.probe(suffix, &current, &y)?;
            if fy.truncated(d - 1) != inner {
                return Err(self.fail(format!(
                    "slice solution {inner} no longer fixed in the first {} coordinates: f({y}) = {fy}",
                    d - 1
                )));
            }
            match fy[d - 1].cmp(&c) {
                std::cmp::Ordering::Equal => return Ok(y),
                std::cmp::Ordering::Greater => current = up_box(&current, &fy)?,
                std::cmp::Ordering::Less => current = down_box(&current, &fy)?,
            }
        }
    }
}

/// `[f(x), sup B]`, valid whenever `f(x) ≥_c x`.
fn up_box(current: &BoxLattice, fx: &Point) -> Result<BoxLattice> {
    BoxLattice::new(fx.clone(), current.upper().clone())
}

/// `[inf B, f(x)]`, valid whenever `f(x) ≤_c x`.
fn down_box(current: &BoxLattice, fx: &Point) -> Result<BoxLattice> {
    BoxLattice::new(current.lower().clone(), fx.clone())
}
