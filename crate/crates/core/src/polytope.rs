//! Integer points of polytopes `P = {x | Ax ≤ b}` whose rows each have at
//! most one positive entry, reached as fixed points of order-preserving maps
//! on the integer hull `D(P)`.
//!
//! The row condition makes each `P(x) = {y ∈ P | y ≤_c x}` closed under
//! componentwise max, so `max eᵀy` over `P(x)` has a unique, componentwise
//! greatest solution `d(x)`. Then `h(x) = ⌊d(x)⌋` is order-preserving for
//! `≤_c`, and its fixed points other than `xˡ` are exactly the integer
//! points of `P`. A second map, built coordinate by coordinate from pairs of
//! LPs, does the same for `≤_l`.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::lattice::{BoxLattice, OrderRelation, Point};
use crate::lp::{solve_lp, LpOutcome, Sense};
use crate::oracle::{MonotoneOracle, Session, BRUTE_FORCE_LIMIT};
use crate::rational::{ceil_i64, floor_i64, int, parse_rational, Rational};
use crate::uniqueness::greatest_fixed_point;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    n: usize,
}

impl Polytope {
    /// Rejects any row of `A` with two or more positive entries.
    pub fn new(a: Vec<Vec<Rational>>, b: Vec<Rational>) -> Result<Self> {
        let n = a.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(Error::InvalidPolytope("A must have at least one column".into()));
        }
        if a.len() != b.len() {
            return Err(Error::InvalidPolytope(format!(
                "A has {} rows but b has {} entries",
                a.len(),
                b.len()
            )));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidPolytope(format!("row {} has {} entries, expected {n}", i + 1, row.len())));
            }
            if row.iter().filter(|v| v.is_positive()).count() > 1 {
                return Err(Error::InvalidPolytope(format!(
                    "row {} has more than one positive entry",
                    i + 1
                )));
            }
        }
        Ok(Polytope { a, b, n })
    }

    pub fn from_integers(a: &[&[i64]], b: &[i64]) -> Result<Self> {
        Polytope::new(
            a.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect(),
            b.iter().map(|&v| int(v)).collect(),
        )
    }

    /// `{"A": [["p/q", ...], ...], "b": ["p/q", ...]}`; plain numbers are
    /// accepted too.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
        let entry = |x: &Value| match x {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => parse_rational(&n.to_string()),
            other => Err(Error::Usage(format!("{other} is not a rational"))),
        };
        let a = v
            .get("A")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Usage("polytope file lacks an `A` array".into()))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::Usage("rows of `A` must be arrays".into()))?
                    .iter()
                    .map(entry)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let b = v
            .get("b")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Usage("polytope file lacks a `b` array".into()))?
            .iter()
            .map(entry)
            .collect::<Result<Vec<_>>>()?;
        Polytope::new(a, b)
    }

    pub fn to_json(&self) -> String {
        let a: Vec<Vec<String>> = self
            .a
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect())
            .collect();
        let b: Vec<String> = self.b.iter().map(ToString::to_string).collect();
        serde_json::json!({ "A": a, "b": b }).to_string()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.a
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.b
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.n
            && self.a.iter().zip(&self.b).all(|(row, bi)| {
                row.iter().zip(x).map(|(aij, xj)| aij * xj).sum::<Rational>() <= *bi
            })
    }

    pub fn contains_point(&self, x: &[i64]) -> bool {
        self.contains(&to_rational(x))
    }

    /// Optimizes over `P` with the first `fixed.len()` coordinates pinned and
    /// optional upper bounds `x ≤ cap`. The objective ranges over the free
    /// coordinates only; returned points are full-length.
    fn optimize(
        &self,
        objective: &[Rational],
        sense: Sense,
        fixed: &[i64],
        cap: Option<&[Rational]>,
    ) -> Result<LpOutcome> {
        let k = fixed.len();
        let free = self.n - k;
        let mut a = Vec::with_capacity(self.a.len() + free);
        let mut b = Vec::with_capacity(self.a.len() + free);
        for (row, bi) in self.a.iter().zip(&self.b) {
            let pinned: Rational = row[..k].iter().zip(fixed).map(|(c, &y)| c * int(y)).sum();
            a.push(row[k..].to_vec());
            b.push(bi - pinned);
        }
        if let Some(cap) = cap {
            for j in 0..free {
                let mut row = vec![Rational::zero(); free];
                row[j] = Rational::one();
                a.push(row);
                b.push(cap[k + j].clone());
            }
        }
        Ok(match solve_lp(objective, sense, &a, &b)? {
            LpOutcome::Optimal { point, value } => {
                let mut full = to_rational(fixed);
                full.extend(point);
                LpOutcome::Optimal { point: full, value }
            }
            other => other,
        })
    }
}

fn to_rational(x: &[i64]) -> Vec<Rational> {
    x.iter().map(|&v| int(v)).collect()
}

fn unit(n: usize, j: usize) -> Vec<Rational> {
    let mut e = vec![Rational::zero(); n];
    e[j] = Rational::one();
    e
}

fn optimum(outcome: LpOutcome, what: &str) -> Result<(Vec<Rational>, Rational)> {
    match outcome {
        LpOutcome::Optimal { point, value } => Ok((point, value)),
        LpOutcome::Infeasible => Err(Error::InvalidPolytope(format!("{what}: polytope is empty"))),
        LpOutcome::Unbounded => Err(Error::InvalidPolytope(format!("{what}: polytope is unbounded"))),
    }
}

/// The integer box a map acts on, with the rational extremes it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeHull {
    pub x_max: Vec<Rational>,
    pub x_min: Vec<Rational>,
    pub upper: Point,
    pub lower: Point,
    pub order: OrderRelation,
}

impl LatticeHull {
    pub fn domain(&self) -> Result<BoxLattice> {
        BoxLattice::new(self.lower.clone(), self.upper.clone())
    }
}

fn coordinate_minima(p: &Polytope) -> Result<Vec<Rational>> {
    (0..p.n)
        .map(|j| {
            let (_, v) = optimum(p.optimize(&unit(p.n, j), Sense::Minimize, &[], None)?, "coordinate minimum")?;
            Ok(v)
        })
        .collect()
}

fn strictly_below(x: &[Rational]) -> Result<Vec<i64>> {
    x.iter().map(|v| Ok(ceil_i64(v)? - 1)).collect()
}

/// `x^max` maximizes `eᵀx` over `P` (it is the componentwise greatest point);
/// `xᵘ = ⌊x^max⌋` and `xˡ = ⌈x^min⌉ − 1`, the largest integer vector strictly
/// below `x^min`. That keeps `xˡ` outside `P` and below every `⌊d(x)⌋`.
pub fn componentwise_hull(p: &Polytope) -> Result<LatticeHull> {
    let e = vec![Rational::one(); p.n];
    let (x_max, _) = optimum(p.optimize(&e, Sense::Maximize, &[], None)?, "max eᵀx")?;
    let x_min = coordinate_minima(p)?;
    let upper = x_max.iter().map(floor_i64).collect::<Result<Vec<_>>>()?;
    let lower = strictly_below(&x_min)?;
    Ok(LatticeHull {
        x_max,
        x_min,
        upper: upper.into(),
        lower: lower.into(),
        order: OrderRelation::Componentwise,
    })
}

/// Per-coordinate extremes, `xᵘ = ⌊x^max⌋`, and `xˡ` strictly below `x^min`
/// as in the componentwise hull (this differs from `⌊x^min⌋` only on integral
/// coordinates, where `⌊x^min⌋` would let a point outside `P` be fixed). The
/// map is evaluated on the box `[xˡ, xᵘ]` under `≤_l`.
pub fn lexicographic_hull(p: &Polytope) -> Result<LatticeHull> {
    if p.n < 2 {
        return Err(Error::Unsupported(
            "the lexicographic construction needs at least two coordinates".into(),
        ));
    }
    let mut x_max = Vec::with_capacity(p.n);
    for j in 0..p.n {
        let (_, v) = optimum(p.optimize(&unit(p.n, j), Sense::Maximize, &[], None)?, "coordinate maximum")?;
        x_max.push(v);
    }
    let x_min = coordinate_minima(p)?;
    let upper = x_max.iter().map(floor_i64).collect::<Result<Vec<_>>>()?;
    let lower = strictly_below(&x_min)?;
    Ok(LatticeHull {
        x_max,
        x_min,
        upper: upper.into(),
        lower: lower.into(),
        order: OrderRelation::Lexicographic,
    })
}

/// `argmax eᵀy` over `P(x)`, or `xˡ` when `P(x)` is empty.
pub fn d_map(p: &Polytope, hull: &LatticeHull, x: &[Rational]) -> Result<Vec<Rational>> {
    if x.len() != p.n {
        return Err(Error::DimensionMismatch { expected: p.n, got: x.len() });
    }
    let e = vec![Rational::one(); p.n];
    match p.optimize(&e, Sense::Maximize, &[], Some(x))? {
        LpOutcome::Optimal { point, .. } => Ok(point),
        LpOutcome::Infeasible => Ok(to_rational(&hull.lower)),
        LpOutcome::Unbounded => Err(Error::InvalidPolytope("max eᵀy over P(x) is unbounded".into())),
    }
}

/// `h(x) = ⌊d(x)⌋`.
pub fn h_componentwise(p: &Polytope, hull: &LatticeHull, x: &[i64]) -> Result<Point> {
    let d = d_map(p, hull, &to_rational(x))?;
    Ok(d.iter().map(floor_i64).collect::<Result<Vec<_>>>()?.into())
}

/// How `d_k^min` and `d_k^max` are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RangeLp {
    /// One LP, `min x_k − v_k` over `P(y, k−1) × P(y, k−1)`.
    #[default]
    Product,
    /// Two LPs, `min x_k` and `max x_k` over `P(y, k−1)`.
    Separate,
}

/// `[min x_k, max x_k]` over `P(y, k−1)` (0-based `k`, first `k` pinned).
fn coordinate_range(p: &Polytope, y: &[i64], k: usize, how: RangeLp) -> Result<(Rational, Rational)> {
    let fixed = &y[..k];
    let free = p.n - k;
    match how {
        RangeLp::Separate => {
            let (lo, _) = optimum(p.optimize(&unit(free, 0), Sense::Minimize, fixed, None)?, "d_k^min")?;
            let (hi, _) = optimum(p.optimize(&unit(free, 0), Sense::Maximize, fixed, None)?, "d_k^max")?;
            Ok((lo[k].clone(), hi[k].clone()))
        }
        RangeLp::Product => {
            // Variables (x_free, v_free); both blocks satisfy the pinned system.
            let mut a = Vec::with_capacity(2 * p.a.len());
            let mut b = Vec::with_capacity(2 * p.a.len());
            for (row, bi) in p.a.iter().zip(&p.b) {
                let pinned: Rational = row[..k].iter().zip(fixed).map(|(c, &v)| c * int(v)).sum();
                let rhs = bi - pinned;
                let mut left = row[k..].to_vec();
                left.extend(std::iter::repeat_n(Rational::zero(), free));
                let mut right = vec![Rational::zero(); free];
                right.extend_from_slice(&row[k..]);
                a.push(left);
                b.push(rhs.clone());
                a.push(right);
                b.push(rhs);
            }
            let mut objective = vec![Rational::zero(); 2 * free];
            objective[0] = Rational::one();
            objective[free] = -Rational::one();
            let (point, _) = optimum(solve_lp(&objective, Sense::Minimize, &a, &b)?, "d_k LP")?;
            Ok((point[0].clone(), point[free].clone()))
        }
    }
}

/// The lexicographic map, step by step: pin a growing prefix of `y`, and at
/// the first coordinate where `y` leaves the feasible range either step the
/// previous coordinate down or clip the current one to `⌊d_k^max⌋`.
pub fn h_lexicographic(p: &Polytope, hull: &LatticeHull, y: &[i64], how: RangeLp) -> Result<Point> {
    let n = p.n;
    let domain = hull.domain()?;
    if !domain.contains(y) {
        return Err(Error::Usage(format!("{} is outside D(P) = {domain}", Point::from(y))));
    }
    let lo = &hull.lower;
    let hi = &hull.upper;
    if y[0] == lo[0] {
        return Ok(lo.clone());
    }
    if p.contains_point(y) {
        return Ok(Point::from(y));
    }
    // `k` is 1-based as in the construction; coordinate `k` is `y[k − 1]`.
    for k in 2..=n {
        let (dmin, dmax) = coordinate_range(p, y, k - 1, how)?;
        let cmin = ceil_i64(&dmin)?;
        let fmax = floor_i64(&dmax)?;
        let yk = y[k - 1];
        if yk < cmin || fmax < cmin {
            let mut h = y[..k - 2].to_vec();
            if y[k - 2] <= lo[k - 2] + 1 {
                h.extend_from_slice(&lo[k - 2..]);
            } else {
                h.push(y[k - 2] - 1);
                h.extend_from_slice(&hi[k - 1..]);
            }
            return Ok(h.into());
        }
        if yk > fmax {
            let mut h = y[..k - 1].to_vec();
            h.push(fmax);
            h.extend_from_slice(&hi[k..]);
            return Ok(h.into());
        }
    }
    Err(Error::InvalidPolytope(format!(
        "{} passed every coordinate test but is not in P",
        Point::from(y)
    )))
}

/// `h_componentwise` on `D(P)` as an oracle.
pub struct CwPolytopeOracle {
    polytope: Polytope,
    hull: LatticeHull,
    domain: BoxLattice,
}

impl CwPolytopeOracle {
    pub fn new(polytope: Polytope) -> Result<Self> {
        let hull = componentwise_hull(&polytope)?;
        Ok(CwPolytopeOracle {
            domain: hull.domain()?,
            polytope,
            hull,
        })
    }

    pub fn hull(&self) -> &LatticeHull {
        &self.hull
    }
}

impl MonotoneOracle for CwPolytopeOracle {
    fn domain(&self) -> &BoxLattice {
        &self.domain
    }

    fn raw_eval(&mut self, x: &Point) -> Point {
        // P is nonempty and bounded (checked by the hull LPs), so this LP
        // always has an outcome.
        h_componentwise(&self.polytope, &self.hull, x).expect("LP on a validated polytope")
    }
}

/// `h_lexicographic` on `D(P)` as an oracle.
pub struct LexPolytopeOracle {
    polytope: Polytope,
    hull: LatticeHull,
    domain: BoxLattice,
    how: RangeLp,
}

impl LexPolytopeOracle {
    pub fn new(polytope: Polytope, how: RangeLp) -> Result<Self> {
        let hull = lexicographic_hull(&polytope)?;
        Ok(LexPolytopeOracle {
            domain: hull.domain()?,
            polytope,
            hull,
            how,
        })
    }

    pub fn hull(&self) -> &LatticeHull {
        &self.hull
    }
}

impl MonotoneOracle for LexPolytopeOracle {
    fn domain(&self) -> &BoxLattice {
        &self.domain
    }

    fn raw_eval(&mut self, y: &Point) -> Point {
        h_lexicographic(&self.polytope, &self.hull, y, self.how).expect("LP on a validated polytope")
    }
}

fn check_search_size(domain: &BoxLattice) -> Result<()> {
    if domain.size() > BRUTE_FORCE_LIMIT {
        return Err(Error::Capacity(format!(
            "D(P) has {} points, above the search limit {BRUTE_FORCE_LIMIT}",
            domain.size()
        )));
    }
    Ok(())
}

/// The greatest fixed point of `h_componentwise`, if it is not `xˡ`; that is
/// then the componentwise greatest integer point of `P`.
pub fn integer_point_via_fixed_point(p: &Polytope) -> Result<Option<Point>> {
    let mut oracle = CwPolytopeOracle::new(p.clone())?;
    check_search_size(&oracle.domain)?;
    let lower = oracle.hull.lower.clone();
    let mut session = Session::new(&mut oracle);
    let top = greatest_fixed_point(&mut session)?;
    Ok((top != lower).then_some(top))
}

/// Descends `y ← h(y)` from `xᵘ` under `≤_l`; the first fixed point other
/// than `xˡ` is the lexicographically greatest integer point of `P`.
pub fn integer_point_via_lexicographic(p: &Polytope, how: RangeLp) -> Result<Option<Point>> {
    let mut oracle = LexPolytopeOracle::new(p.clone(), how)?;
    check_search_size(&oracle.domain)?;
    let lower = oracle.hull.lower.clone();
    let mut y = oracle.hull.upper.clone();
    loop {
        let hy = oracle.raw_eval(&y);
        if hy == y {
            return Ok((y != lower).then_some(y));
        }
        if hy > y {
            return Err(Error::contract(format!("h({y}) = {hy} is not below its argument"), None));
        }
        y = hy;
    }
}

/// A random full-dimensional polytope satisfying the row condition: bounds
/// `lo ≤ x ≤ lo + span` plus `extra` rows with one positive and some
/// negative entries, each keeping slack at a random interior point.
pub fn random_polytope<R: Rng>(rng: &mut R, n: usize, extra: usize, span: i64) -> Result<Polytope> {
    let lo: Vec<i64> = (0..n).map(|_| rng.gen_range(-6..=3)).collect();
    let center: Vec<Rational> = lo
        .iter()
        .map(|&l| Rational::new((2 * l + span).into(), 2.into()) + Rational::new(rng.gen_range(-3..=3).into(), 8.into()))
        .collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for j in 0..n {
        let mut up = vec![Rational::zero(); n];
        up[j] = Rational::new(rng.gen_range(1..=3).into(), 1.into());
        b.push(&up[j] * int(lo[j] + span) - Rational::new(rng.gen_range(0..=2).into(), 3.into()));
        a.push(up);
        let mut down = vec![Rational::zero(); n];
        down[j] = -Rational::one();
        b.push(int(-lo[j]) + Rational::new(rng.gen_range(0..=2).into(), 3.into()));
        a.push(down);
    }
    for _ in 0..extra {
        let pos = rng.gen_range(0..n);
        let row: Vec<Rational> = (0..n)
            .map(|j| {
                if j == pos {
                    Rational::new(rng.gen_range(1..=3).into(), 1.into())
                } else if rng.gen_bool(0.6) {
                    -Rational::new(rng.gen_range(1..=3).into(), rng.gen_range(1..=2).into())
                } else {
                    Rational::zero()
                }
            })
            .collect();
        let at_center: Rational = row.iter().zip(&center).map(|(r, c)| r * c).sum();
        let slack = Rational::new(rng.gen_range(1..=12).into(), 4.into());
        a.push(row);
        b.push(at_center + slack);
    }
    Polytope::new(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::cw_le;
    use crate::oracle::{brute_force_fixed_points, monotone_violations_exhaustive};
    use crate::rational::ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example2() -> Polytope {
        Polytope::from_integers(
            &[&[2, -1, 0], &[-1, 3, 0], &[0, 0, 2], &[0, -1, -1]],
            &[0, -10, 10, 0],
        )
        .unwrap()
    }

    #[test]
    fn row_structure_is_enforced() {
        assert!(matches!(
            Polytope::from_integers(&[&[1, 1]], &[3]),
            Err(Error::InvalidPolytope(_))
        ));
        assert!(Polytope::from_integers(&[&[1, -1], &[-1, -1]], &[3, 0]).is_ok());
        assert!(Polytope::from_integers(&[&[1, 0]], &[3, 4]).is_err());
    }

    #[test]
    fn example2_hulls() {
        let p = example2();
        let cw = componentwise_hull(&p).unwrap();
        assert_eq!(cw.x_max, vec![int(-2), int(-4), int(5)]);
        assert_eq!(cw.x_min, vec![int(-5), int(-5), int(4)]);
        assert_eq!(cw.upper, Point::from([-2, -4, 5]));
        assert_eq!(cw.lower, Point::from([-6, -6, 3]));
        let lex = lexicographic_hull(&p).unwrap();
        assert_eq!(lex.lower, Point::from([-6, -6, 3]));
        assert_eq!(lex.upper, Point::from([-2, -4, 5]));
    }

    #[test]
    fn example2_h_value() {
        let p = example2();
        let hull = componentwise_hull(&p).unwrap();
        let d = d_map(&p, &hull, &to_rational(&[-3, -4, 5])).unwrap();
        assert_eq!(d, vec![int(-3), ratio(-13, 3), int(5)]);
        assert_eq!(h_componentwise(&p, &hull, &[-3, -4, 5]).unwrap(), Point::from([-3, -5, 5]));
    }

    #[test]
    fn d_map_edge_cases() {
        let p = example2();
        let hull = componentwise_hull(&p).unwrap();
        assert_eq!(d_map(&p, &hull, &to_rational(&[-50, -50, -50])).unwrap(), to_rational(&hull.lower));
        assert_eq!(d_map(&p, &hull, &to_rational(&[0, 0, 9])).unwrap(), hull.x_max);
        let inside = [-2, -4, 5];
        assert!(p.contains_point(&inside));
        assert_eq!(h_componentwise(&p, &hull, &inside).unwrap(), Point::from(inside));
    }

    #[test]
    fn example2_integer_points() {
        let p = example2();
        let found = integer_point_via_fixed_point(&p).unwrap().unwrap();
        assert!(p.contains_point(&found));
        assert_eq!(found, Point::from([-2, -4, 5]));
        let lex = integer_point_via_lexicographic(&p, RangeLp::Product).unwrap().unwrap();
        assert!(p.contains_point(&lex));
    }

    #[test]
    fn off_lattice_interval_has_no_integer_point() {
        let p = Polytope::new(vec![vec![int(1)], vec![int(-1)]], vec![ratio(2, 5), ratio(-1, 10)]).unwrap();
        assert_eq!(integer_point_via_fixed_point(&p).unwrap(), None);
        let q = Polytope::from_integers(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[1, 1, 1, 1]).unwrap();
        let found = integer_point_via_fixed_point(&q).unwrap().unwrap();
        assert!(q.contains_point(&found));
    }

    #[test]
    fn lex_step_one_rules() {
        let p = example2();
        let hull = lexicographic_hull(&p).unwrap();
        assert_eq!(h_lexicographic(&p, &hull, &[-6, -4, 5], RangeLp::Product).unwrap(), hull.lower);
        assert_eq!(
            h_lexicographic(&p, &hull, &[-2, -4, 5], RangeLp::Product).unwrap(),
            Point::from([-2, -4, 5])
        );
        assert!(h_lexicographic(&p, &hull, &[-9, -4, 5], RangeLp::Product).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = example2();
        assert_eq!(Polytope::from_json(&p.to_json()).unwrap(), p);
        let q = Polytope::from_json(r#"{"A": [["1/2", 0], [-1, "0"]], "b": ["3/4", 1]}"#).unwrap();
        assert_eq!(q.rhs()[0], ratio(3, 4));
        assert!(Polytope::from_json(r#"{"A": [["1", "1"]], "b": ["1"]}"#).is_err());
    }

    /// Both maps on a handful of random polytopes, checked exhaustively on
    /// D(P).
    #[test]
    fn random_polytope_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..4 {
            let p = random_polytope(&mut rng, 3, 2, 3).unwrap();
            let mut cw = CwPolytopeOracle::new(p.clone()).unwrap();
            let lower = cw.hull().lower.clone();
            assert!(monotone_violations_exhaustive(&mut cw, OrderRelation::Componentwise)
                .unwrap()
                .is_empty());
            let fixed = brute_force_fixed_points(&mut cw).unwrap();
            let domain = cw.domain().clone();
            for x in domain.points() {
                let is_fixed = fixed.contains(&x);
                assert_eq!(is_fixed && x != lower, p.contains_point(&x), "{x}");
            }

            let mut lex = LexPolytopeOracle::new(p.clone(), RangeLp::Product).unwrap();
            let mut sep = LexPolytopeOracle::new(p.clone(), RangeLp::Separate).unwrap();
            let lo = lex.hull().lower.clone();
            for y in lex.domain().clone().points() {
                let h = lex.raw_eval(&y);
                assert_eq!(h, sep.raw_eval(&y));
                assert!(cw_le(&lo, &h));
                assert!(h <= y);
                if !p.contains_point(&y) && y != lo {
                    assert_ne!(h, y);
                }
            }
            assert!(monotone_violations_exhaustive(&mut lex, OrderRelation::Lexicographic)
                .unwrap()
                .is_empty());
        }
    }
}
