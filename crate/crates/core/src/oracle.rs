//! The oracle function model: a black-box map on a box lattice, accessed only
//! through memoized, counted queries.
//!
//! Every solver talks to a [`Session`], which wraps an oracle together with
//! its [`QueryLog`]. A repeated query is answered from the log and does not
//! count again, so `Session::queries` is the number of distinct oracle calls.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result, Witness};
use crate::lattice::{order_le, BoxLattice, OrderRelation, Point};

/// Largest lattice the brute-force enumerators will walk.
pub const BRUTE_FORCE_LIMIT: u128 = 1 << 20;

/// Largest lattice for which a closure-monotone instance is materialized.
pub const CLOSURE_LIMIT: u128 = 1 << 16;

/// A map `f: L → L` on a declared box, queried one point at a time.
///
/// Implementations may keep private state (adversaries do), which is why
/// evaluation takes `&mut self`.
pub trait MonotoneOracle {
    fn domain(&self) -> &BoxLattice;

    fn raw_eval(&mut self, x: &Point) -> Point;
}

impl<O: MonotoneOracle + ?Sized> MonotoneOracle for Box<O> {
    fn domain(&self) -> &BoxLattice {
        (**self).domain()
    }

    fn raw_eval(&mut self, x: &Point) -> Point {
        (**self).raw_eval(x)
    }
}

/// Ordered record of distinct queries and their answers.
#[derive(Debug, Clone, Default)]
pub struct QueryLog {
    entries: Vec<(Point, Point)>,
    index: HashMap<Point, usize>,
}

impl QueryLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (Point, Point)>) -> Self {
        let mut log = QueryLog::new();
        for (x, fx) in entries {
            log.record(x, fx);
        }
        log
    }

    /// Number of distinct queries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(Point, Point)] {
        &self.entries
    }

    pub fn get(&self, x: &[i64]) -> Option<&Point> {
        self.index.get(x).map(|&i| &self.entries[i].1)
    }

    /// Records `x ↦ fx` unless `x` is already present; returns whether it was new.
    pub fn record(&mut self, x: Point, fx: Point) -> bool {
        if self.index.contains_key(&x) {
            return false;
        }
        self.index.insert(x.clone(), self.entries.len());
        self.entries.push((x, fx));
        true
    }
}

/// One sequential query session against an oracle.
pub struct Session<'o> {
    oracle: &'o mut dyn MonotoneOracle,
    log: QueryLog,
    budget: Option<usize>,
}

impl<'o> Session<'o> {
    pub fn new(oracle: &'o mut dyn MonotoneOracle) -> Self {
        Session {
            oracle,
            log: QueryLog::new(),
            budget: None,
        }
    }

    /// Caps the number of distinct queries; the next new query beyond the cap
    /// fails with a capacity error.
    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn domain(&self) -> &BoxLattice {
        self.oracle.domain()
    }

    pub fn query(&mut self, x: &[i64]) -> Result<Point> {
        if let Some(fx) = self.log.get(x) {
            return Ok(fx.clone());
        }
        let domain = self.oracle.domain();
        if !domain.contains(x) {
            return Err(Error::Usage(format!(
                "query {} outside the oracle's box {}",
                Point::from(x),
                domain
            )));
        }
        if self.budget.is_some_and(|b| self.log.len() >= b) {
            return Err(Error::Capacity(format!(
                "query budget of {} exhausted",
                self.log.len()
            )));
        }
        let x = Point::from(x);
        let fx = self.oracle.raw_eval(&x);
        if !self.oracle.domain().contains(&fx) {
            return Err(Error::contract(
                format!(
                    "oracle answered f({x}) = {fx}, outside its box {}",
                    self.oracle.domain()
                ),
                None,
            ));
        }
        self.log.record(x, fx.clone());
        Ok(fx)
    }

    /// Distinct queries made so far.
    pub fn queries(&self) -> usize {
        self.log.len()
    }

    pub fn log(&self) -> &QueryLog {
        &self.log
    }

    pub fn into_log(self) -> QueryLog {
        self.log
    }

    /// A pair of logged queries refuting monotonicity, if any.
    pub fn find_witness(&self, order: OrderRelation) -> Option<Witness> {
        first_violation(&self.log, order)
    }
}

/// All logged pairs `(x, y)` with `x ⪯ y` but `f(x) ⋠ f(y)`.
pub fn verify_monotone_on_log(log: &QueryLog, order: OrderRelation) -> Vec<(Point, Point)> {
    let mut out = Vec::new();
    for (x, fx) in log.entries() {
        for (y, fy) in log.entries() {
            if x != y && order_le(order, x, y) && !order_le(order, fx, fy) {
                out.push((x.clone(), y.clone()));
            }
        }
    }
    out
}

pub(crate) fn first_violation(log: &QueryLog, order: OrderRelation) -> Option<Witness> {
    let entries = log.entries();
    for (x, fx) in entries {
        for (y, fy) in entries {
            if x != y && order_le(order, x, y) && !order_le(order, fx, fy) {
                return Some(Witness {
                    x: x.clone(),
                    fx: fx.clone(),
                    y: y.clone(),
                    fy: fy.clone(),
                });
            }
        }
    }
    None
}

fn check_brute_force_size(domain: &BoxLattice, limit: u128) -> Result<()> {
    if domain.size() > limit {
        return Err(Error::Capacity(format!(
            "lattice of {} points exceeds the enumeration limit {limit}",
            domain.size()
        )));
    }
    Ok(())
}

/// Every fixed point of the oracle, in rank order.
pub fn brute_force_fixed_points(oracle: &mut dyn MonotoneOracle) -> Result<Vec<Point>> {
    let domain = oracle.domain().clone();
    check_brute_force_size(&domain, BRUTE_FORCE_LIMIT)?;
    Ok(domain
        .points()
        .filter(|x| oracle.raw_eval(x) == *x)
        .collect())
}

/// Evaluates the oracle on the whole lattice, indexed by rank.
pub fn tabulate(oracle: &mut dyn MonotoneOracle) -> Result<Vec<Point>> {
    let domain = oracle.domain().clone();
    check_brute_force_size(&domain, BRUTE_FORCE_LIMIT)?;
    Ok(domain.points().map(|x| oracle.raw_eval(&x)).collect())
}

/// Full monotonicity check over the whole lattice.
///
/// Both orders are generated by their covering pairs (`x ⋖ x + e_i` for the
/// componentwise order, consecutive ranks for the lexicographic one), so it is
/// enough to compare neighbours. Returns the violating covering pairs.
pub fn monotone_violations_exhaustive(
    oracle: &mut dyn MonotoneOracle,
    order: OrderRelation,
) -> Result<Vec<(Point, Point)>> {
    let domain = oracle.domain().clone();
    let table = tabulate(oracle)?;
    Ok(table_violations(&domain, &table, order))
}

pub(crate) fn table_violations(
    domain: &BoxLattice,
    table: &[Point],
    order: OrderRelation,
) -> Vec<(Point, Point)> {
    let mut out = Vec::new();
    match order {
        OrderRelation::Lexicographic => {
            for r in 1..table.len() {
                if table[r - 1] > table[r] {
                    out.push((
                        domain.unrank(r as u128 - 1).unwrap(),
                        domain.unrank(r as u128).unwrap(),
                    ));
                }
            }
        }
        OrderRelation::Componentwise => {
            let strides = strides(domain);
            for (r, x) in domain.points().enumerate() {
                for i in 0..domain.dim() {
                    if x[i] < domain.upper()[i] {
                        let up = r + strides[i];
                        if !order_le(order, &table[r], &table[up]) {
                            out.push((x.clone(), x.with_coord(i, x[i] + 1)));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Rank distance between `x` and `x + e_i`.
pub(crate) fn strides(domain: &BoxLattice) -> Vec<usize> {
    let d = domain.dim();
    let mut out = vec![1usize; d];
    for i in (0..d.saturating_sub(1)).rev() {
        out[i] = out[i + 1] * domain.sides()[i + 1] as usize;
    }
    out
}

fn clamp_into(domain: &BoxLattice, k: usize, v: i128) -> i64 {
    v.clamp(domain.lower()[k] as i128, domain.upper()[k] as i128) as i64
}

#[derive(Debug, Clone)]
pub struct IdentityOracle {
    domain: BoxLattice,
}

impl IdentityOracle {
    pub fn new(domain: BoxLattice) -> Self {
        IdentityOracle { domain }
    }
}

impl MonotoneOracle for IdentityOracle {
    fn domain(&self) -> &BoxLattice {
        &self.domain
    }

    fn raw_eval(&mut self, x: &Point) -> Point {
        x.clone()
    }
}

#[derive(Debug, Clone)]
pub struct ConstantOracle {
    domain: BoxLattice,
    value: Point,
}

impl ConstantOracle {
    pub fn new(domain: BoxLattice, value: Point) -> Result<Self> {
        if !domain.contains(&value) {
            return Err(Error::OutOfRange(format!(
                "constant {value} outside box {domain}"
            )));
        }
        Ok(ConstantOracle { domain, value })
    }
}

impl MonotoneOracle for ConstantOracle {
    fn domain(&self) -> &BoxLattice {
        &self.domain
    }

    fn raw_eval(&mut self, _x: &Point) -> Point {
        self.value.clone()
    }
}

/// An oracle backed by a closure.
pub struct FnOracle<F> {
    domain: BoxLattice,
    f: F,
}

impl<F: FnMut(&Point) -> Point> FnOracle<F> {
    pub fn new(domain: BoxLattice, f: F) -> Self {
        FnOracle { domain, f }
    }
}

impl<F: FnMut(&Point) -> Point> MonotoneOracle for FnOracle<F> {
    fn domain(&self) -> &BoxLattice {
        &self.domain
    }

    fn raw_eval(&mut self, x: &Point) -> Point {
        (self.f)(x)
    }
}

/// A fully materialized map, indexed by rank.
#[derive(Debug, Clone)]
pub struct TableOracle {
    domain: BoxLattice,
    table: Vec<Point>,
}

impl TableOracle {
    pub fn new(domain: BoxLattice, table: Vec<Point>) -> Result<Self> {
        if table.len() as u128 != domain.size() {
            return Err(Error::Usage(format!(
                "table has {} entries for a lattice of {} points",
                table.len(),
                domain.size()
            )));
        }
        if let Some(bad) = table.iter().find(|p| !domain.contains(p)) {
            return Err(Error::OutOfRange(format!("table value {bad} outside {domain}")));
        }
        Ok(TableOracle { domain, table })
    }

    pub fn table(&self) -> &[Point] {
        &self.table
    }
}

impl MonotoneOracle for TableOracle {
    fn domain(&self) -> &BoxLattice {
        &self.domain
    }

    fn raw_eval(&mut self, x: &Point) -> Point {
        let r = self.domain.rank(x).expect("query inside the table's box");
        self.table[r as usize].clone()
    }
}

/// The order-reversing reflection `x ↦ a + b − x`: a planted non-monotone
/// fixture for exercising contract-violation reporting.
#[derive(Debug, Clone)]
pub struct ReflectionOracle {
    domain: BoxLattice,
}

impl ReflectionOracle {
    pub fn new(domain: BoxLattice) -> Self {
        ReflectionOracle { domain }
    }
}

impl MonotoneOracle for ReflectionOracle {
    fn domain(&self) -> &BoxLattice {
        &self.domain
    }

    fn raw_eval(&mut self, x: &Point) -> Point {
        x.iter()
            .enumerate()
            .map(|(i, v)| self.domain.lower()[i] + self.domain.upper()[i] - v)
            .collect::<Vec<_>>()
            .into()
    }
}

/// A nondecreasing step function `t ↦ ⌊num·(t − origin)/den⌋ + Σ_{at ≤ t} height`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepFn {
    origin: i64,
    num: i64,
    den: i64,
    breakpoints: Vec<i64>,
    /// `cumulative[i]` = total height of the first `i + 1` breakpoints.
    cumulative: Vec<i64>,
}

impl StepFn {
    /// `jumps` are `(position, height)` pairs; heights must be nonnegative.
    pub fn new(origin: i64, num: i64, den: i64, mut jumps: Vec<(i64, i64)>) -> Result<Self> {
        if num < 0 || den <= 0 || jumps.iter().any(|&(_, h)| h < 0) {
            return Err(Error::Usage(
                "step function needs num >= 0, den > 0 and nonnegative jumps".into(),
            ));
        }
        jumps.sort_unstable();
        let breakpoints = jumps.iter().map(|&(at, _)| at).collect();
        let cumulative = jumps
            .iter()
            .scan(0i64, |acc, &(_, h)| {
                *acc += h;
                Some(*acc)
            })
            .collect();
        Ok(StepFn {
            origin,
            num,
            den,
            breakpoints,
            cumulative,
        })
    }

    pub fn zero() -> Self {
        StepFn::new(0, 0, 1, Vec::new()).unwrap()
    }

    /// `t ↦ t − origin`.
    pub fn identity(origin: i64) -> Self {
        StepFn::new(origin, 1, 1, Vec::new()).unwrap()
    }

    pub fn eval(&self, t: i64) -> i128 {
        let linear = (self.num as i128 * (t as i128 - self.origin as i128)).div_euclid(self.den as i128);
        let passed = self.breakpoints.partition_point(|&b| b <= t);
        let steps = if passed == 0 {
            0
        } else {
            self.cumulative[passed - 1] as i128
        };
        linear + steps
    }
}

/// `f(x)_k = clamp_k(c_k + Σ_j w_kj · s_kj(x_j))` with `w ≥ 0` and every
/// `s_kj` nondecreasing, hence order-preserving for the componentwise order.
/// Evaluation is lazy, so the box may be arbitrarily large.
#[derive(Debug, Clone)]
pub struct StructuredOracle {
    domain: BoxLattice,
    offsets: Vec<i64>,
    weights: Vec<Vec<i64>>,
    steps: Vec<Vec<StepFn>>,
}

impl StructuredOracle {
    pub fn from_parts(
        domain: BoxLattice,
        offsets: Vec<i64>,
        weights: Vec<Vec<i64>>,
        steps: Vec<Vec<StepFn>>,
    ) -> Result<Self> {
        let d = domain.dim();
        let square_w = weights.len() == d && weights.iter().all(|r| r.len() == d);
        let square_s = steps.len() == d && steps.iter().all(|r| r.len() == d);
        if offsets.len() != d || !square_w || !square_s {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: offsets.len(),
            });
        }
        if weights.iter().flatten().any(|&w| w < 0) {
            return Err(Error::Usage("weights must be nonnegative".into()));
        }
        Ok(StructuredOracle {
            domain,
            offsets,
            weights,
            steps,
        })
    }

    /// Drops every self-dependence `w_kk`, so `f_k` ignores `x_k`.
    pub fn without_self_dependence(mut self) -> Self {
        for k in 0..self.domain.dim() {
            self.weights[k][k] = 0;
        }
        self
    }

    pub fn weights(&self) -> &[Vec<i64>] {
        &self.weights
    }

    pub fn eval_coord(&self, k: usize, x: &[i64]) -> i64 {
        let mut acc = self.offsets[k] as i128;
        for (j, &xj) in x.iter().enumerate() {
            let w = self.weights[k][j];
            if w != 0 {
                acc += w as i128 * self.steps[k][j].eval(xj);
            }
        }
        clamp_into(&self.domain, k, acc)
    }
}

impl MonotoneOracle for StructuredOracle {
    fn domain(&self) -> &BoxLattice {
        &self.domain
    }

    fn raw_eval(&mut self, x: &Point) -> Point {
        (0..self.domain.dim())
            .map(|k| self.eval_coord(k, x))
            .collect::<Vec<_>>()
            .into()
    }
}

fn require_nondegenerate(domain: &BoxLattice) -> Result<()> {
    if domain.is_singleton() {
        return Err(Error::Usage(format!(
            "instance generators need a nondegenerate box, got {domain}"
        )));
    }
    Ok(())
}

/// Seeded structured instance; deterministic per `(seed, box)`.
///
/// Slopes and jump heights are scaled by each row's total weight so that
/// `f_k` spans roughly 30–120% of side `k`; most instances then have their
/// fixed points away from the corners instead of saturating the clamp.
#[allow(clippy::needless_range_loop)]
pub fn gen_structured_monotone(seed: u64, domain: &BoxLattice) -> Result<StructuredOracle> {
    require_nondegenerate(domain)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = domain.dim();
    let span = |i: usize| (domain.sides()[i] - 1) as i64;
    let mut offsets = Vec::with_capacity(d);
    let mut weights = Vec::with_capacity(d);
    let mut steps = Vec::with_capacity(d);
    for k in 0..d {
        let row_w: Vec<i64> = (0..d)
            .map(|_| if rng.gen_bool(0.75) { rng.gen_range(1..=3) } else { 0 })
            .collect();
        let total = row_w.iter().sum::<i64>().max(1) as i128;
        let mut row_s = Vec::with_capacity(d);
        let mut reach: i128 = 0;
        for j in 0..d {
            let percent: i128 = rng.gen_range(30..=120);
            let num = (span(k) as i128 * percent / (100 * total)) as i64;
            let den = span(j).max(1);
            let jumps = (0..rng.gen_range(0..=3))
                .map(|_| {
                    let at = rng.gen_range(domain.lower()[j]..=domain.upper()[j]);
                    let height = rng.gen_range(0..=(span(k) as i128 / (8 * total)) as i64);
                    (at, height)
                })
                .collect();
            let s = StepFn::new(domain.lower()[j], num, den, jumps)?;
            reach += row_w[j] as i128 * s.eval(domain.upper()[j]);
            row_s.push(s);
        }
        let low = -(reach / 2).min(i64::MAX as i128) as i64;
        let high = (span(k) as i128 - reach / 2).max(low as i128) as i64;
        offsets.push(domain.lower()[k] + rng.gen_range(low..=high));
        weights.push(row_w);
        steps.push(row_s);
    }
    StructuredOracle::from_parts(domain.clone(), offsets, weights, steps)
}

/// The monotone closure `f(x) = ⋁ {r(y) : y ≤_c x}` of a raw map given by rank.
pub fn monotone_closure(domain: &BoxLattice, raw: &[Point]) -> Result<TableOracle> {
    if domain.size() > CLOSURE_LIMIT {
        return Err(Error::Capacity(format!(
            "closure instances are limited to {CLOSURE_LIMIT} points, got {}",
            domain.size()
        )));
    }
    if raw.len() as u128 != domain.size() {
        return Err(Error::Usage("raw map must have one entry per point".into()));
    }
    let strides = strides(domain);
    let mut table: Vec<Point> = Vec::with_capacity(raw.len());
    for (r, x) in domain.points().enumerate() {
        let mut acc = raw[r].clone().into_coords();
        for i in 0..domain.dim() {
            if x[i] > domain.lower()[i] {
                let below = &table[r - strides[i]];
                for (a, b) in acc.iter_mut().zip(below.iter()) {
                    *a = (*a).max(*b);
                }
            }
        }
        table.push(acc.into());
    }
    TableOracle::new(domain.clone(), table)
}

/// Seeded closure instance over a small box.
pub fn gen_closure_monotone(seed: u64, domain: &BoxLattice) -> Result<TableOracle> {
    if domain.size() > CLOSURE_LIMIT {
        return Err(Error::Capacity(format!(
            "closure instances are limited to {CLOSURE_LIMIT} points, got {}",
            domain.size()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c105);
    let lower = domain.lower();
    let upper = domain.upper();
    let raw: Vec<Point> = domain
        .points()
        .map(|y| {
            let roll: u32 = rng.gen_range(0..16);
            (0..domain.dim())
                .map(|k| match roll {
                    0 => rng.gen_range(lower[k]..=upper[k]),
                    1..=7 => rng.gen_range(lower[k]..=y[k]),
                    _ => (y[k] + rng.gen_range(-2..=1)).clamp(lower[k], upper[k]),
                })
                .collect::<Vec<_>>()
                .into()
        })
        .collect();
    monotone_closure(domain, &raw)
}

/// Transports a monotone map on the line `[0, |L|)` to `L` through the rank
/// bijection, giving a map that preserves the lexicographic order.
pub struct RankLiftedOracle<O> {
    domain: BoxLattice,
    line: O,
}

impl<O: MonotoneOracle> RankLiftedOracle<O> {
    pub fn new(domain: BoxLattice, line: O) -> Result<Self> {
        let expected = BoxLattice::new(vec![0], vec![domain.size() as i64 - 1])?;
        if domain.size() > i64::MAX as u128 || *line.domain() != expected {
            return Err(Error::Usage(format!(
                "line oracle must live on [0, {}]",
                domain.size() - 1
            )));
        }
        Ok(RankLiftedOracle { domain, line })
    }
}

impl<O: MonotoneOracle> MonotoneOracle for RankLiftedOracle<O> {
    fn domain(&self) -> &BoxLattice {
        &self.domain
    }

    fn raw_eval(&mut self, x: &Point) -> Point {
        let r = self.domain.rank(x).expect("query inside the box");
        let image = self.line.raw_eval(&Point::from(vec![r as i64]));
        self.domain.unrank(image[0] as u128).expect("line oracle stays in range")
    }
}

/// Seeded instance that preserves the lexicographic order.
pub fn gen_lexicographic_monotone(
    seed: u64,
    domain: &BoxLattice,
) -> Result<RankLiftedOracle<StructuredOracle>> {
    if domain.size() > i64::MAX as u128 {
        return Err(Error::Capacity("lexicographic instances need |L| < 2^63".into()));
    }
    let line = BoxLattice::new(vec![0], vec![domain.size() as i64 - 1])?;
    RankLiftedOracle::new(domain.clone(), gen_structured_monotone(seed, &line)?)
}
