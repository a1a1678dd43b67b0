//! Adaptive adversaries behind the uniqueness lower bounds, and certifiers
//! that decide whether a second fixed point can still be hidden.
//!
//! A partial map `g` on a set `S ⊆ L` extends to an order-preserving map on
//! the whole box exactly when it is order-preserving on `S`; the extension
//! `x ↦ ⋁({inf L} ∪ {g(y) : y ∈ S, y ≤_c x})` is then explicit. The certifiers
//! pre-filter candidates with the pairwise test and confirm the survivor by
//! building that extension and checking it on every covering pair.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::lattice::{cw_le, BoxLattice, OrderRelation, Point};
use crate::oracle::{monotone_closure, table_violations, MonotoneOracle, CLOSURE_LIMIT};

/// Largest index (1-based) with a positive coordinate.
pub fn maxindex(x: &[i64]) -> Result<usize> {
    if x.iter().any(|&v| v < 0) {
        return Err(Error::Usage(format!("maxindex needs x ≥ 0, got {}", Point::from(x))));
    }
    x.iter()
        .rposition(|&v| v > 0)
        .map(|i| i + 1)
        .ok_or_else(|| Error::Usage("maxindex of the zero vector is undefined".into()))
}

/// Answers `f(0) = 0` and `f(x) = x − 1` on `{0, …, N − 1}`.
#[derive(Debug, Clone)]
pub struct LineAdversary {
    domain: BoxLattice,
    asked: Vec<i64>,
    seen: HashSet<i64>,
}

impl LineAdversary {
    pub fn new(length: u64) -> Result<Self> {
        Ok(LineAdversary {
            domain: BoxLattice::line(length)?,
            asked: Vec::new(),
            seen: HashSet::new(),
        })
    }

    /// An adversary that has already been asked `queries`, in order.
    pub fn with_queries(length: u64, queries: impl IntoIterator<Item = i64>) -> Result<Self> {
        let mut adv = Self::new(length)?;
        for q in queries {
            if !adv.domain.contains(&[q]) {
                return Err(Error::OutOfRange(format!("query {q} outside {}", adv.domain)));
            }
            adv.record(q);
        }
        Ok(adv)
    }

    fn record(&mut self, q: i64) {
        if self.seen.insert(q) {
            self.asked.push(q);
        }
    }

    pub fn answer(x: i64) -> i64 {
        (x - 1).max(0)
    }

    /// Distinct points asked so far, in first-asked order.
    pub fn queries(&self) -> &[i64] {
        &self.asked
    }

    pub fn length(&self) -> u64 {
        self.domain.size() as u64
    }
}

impl MonotoneOracle for LineAdversary {
    fn domain(&self) -> &BoxLattice {
        &self.domain
    }

    fn raw_eval(&mut self, x: &Point) -> Point {
        self.record(x[0]);
        Point::from([Self::answer(x[0])])
    }
}

/// Answers `f(0) = 0` and `f(x) = x − e_maxindex(x)` on `[0, (N₁, …, N_d)]`.
#[derive(Debug, Clone)]
pub struct AuxAdversary {
    domain: BoxLattice,
    asked: Vec<Point>,
    seen: HashSet<Point>,
}

impl AuxAdversary {
    pub fn new(upper: &[i64]) -> Result<Self> {
        Ok(AuxAdversary {
            domain: BoxLattice::new(Point::splat(0, upper.len()), upper.to_vec())?,
            asked: Vec::new(),
            seen: HashSet::new(),
        })
    }

    pub fn with_queries(upper: &[i64], queries: impl IntoIterator<Item = Point>) -> Result<Self> {
        let mut adv = Self::new(upper)?;
        for q in queries {
            if !adv.domain.contains(&q) {
                return Err(Error::OutOfRange(format!("query {q} outside {}", adv.domain)));
            }
            adv.record(q);
        }
        Ok(adv)
    }

    fn record(&mut self, q: Point) {
        if self.seen.insert(q.clone()) {
            self.asked.push(q);
        }
    }

    pub fn answer(x: &[i64]) -> Point {
        match maxindex(x) {
            Ok(i) => {
                let mut y = x.to_vec();
                y[i - 1] -= 1;
                y.into()
            }
            Err(_) => Point::from(x),
        }
    }

    pub fn queries(&self) -> &[Point] {
        &self.asked
    }
}

impl MonotoneOracle for AuxAdversary {
    fn domain(&self) -> &BoxLattice {
        &self.domain
    }

    fn raw_eval(&mut self, x: &Point) -> Point {
        self.record(x.clone());
        Self::answer(x)
    }
}

/// Whether the constraints are pairwise order-preserving under `≤_c`.
fn pairwise_consistent(constraints: &[(Point, Point)]) -> bool {
    constraints.iter().all(|(x, fx)| {
        constraints
            .iter()
            .all(|(y, fy)| !cw_le(x, y) || cw_le(fx, fy))
    })
}

/// Whether `candidate ↦ candidate` is compatible with every constraint.
fn candidate_consistent(constraints: &[(Point, Point)], candidate: &Point) -> bool {
    constraints.iter().all(|(y, fy)| {
        (!cw_le(y, candidate) || cw_le(fy, candidate))
            && (!cw_le(candidate, y) || cw_le(candidate, fy))
    })
}

/// Builds the least order-preserving extension of `constraints` over the
/// whole box and checks it: it must agree with every constraint and have no
/// violating covering pair. Returns the extension's table on success.
pub fn monotone_completion(
    domain: &BoxLattice,
    constraints: &[(Point, Point)],
) -> Result<Option<Vec<Point>>> {
    if domain.size() > CLOSURE_LIMIT {
        return Err(Error::Capacity(format!(
            "completion check limited to {CLOSURE_LIMIT} points, got {}",
            domain.size()
        )));
    }
    let mut raw = vec![domain.lower().clone(); domain.size() as usize];
    for (x, fx) in constraints {
        if !domain.contains(x) || !domain.contains(fx) {
            return Ok(None);
        }
        raw[domain.rank(x)? as usize] = fx.clone();
    }
    let table = monotone_closure(domain, &raw)?.table().to_vec();
    for (x, fx) in constraints {
        if table[domain.rank(x)? as usize] != *fx {
            return Ok(None);
        }
    }
    if !table_violations(domain, &table, OrderRelation::Componentwise).is_empty() {
        return Ok(None);
    }
    Ok(Some(table))
}

fn first_hideable(
    domain: &BoxLattice,
    constraints: &[(Point, Point)],
    candidates: impl Iterator<Item = Point>,
) -> Result<Option<Point>> {
    if !pairwise_consistent(constraints) {
        return Ok(None);
    }
    let mut with_candidate = constraints.to_vec();
    for c in candidates {
        if !candidate_consistent(constraints, &c) {
            continue;
        }
        with_candidate.push((c.clone(), c.clone()));
        if monotone_completion(domain, &with_candidate)?.is_some() {
            return Ok(Some(c));
        }
        with_candidate.pop();
    }
    Ok(None)
}

/// The largest unqueried `x* ≥ 1` that could still be made a fixed point.
pub fn line_can_hide_second(adv: &LineAdversary) -> Result<Option<Point>> {
    let constraints: Vec<(Point, Point)> = adv
        .asked
        .iter()
        .map(|&q| (Point::from([q]), Point::from([LineAdversary::answer(q)])))
        .collect();
    let top = adv.domain.upper()[0];
    let candidates = (1..=top)
        .rev()
        .filter(|x| !adv.seen.contains(x))
        .map(|x| Point::from([x]));
    first_hideable(&adv.domain, &constraints, candidates)
}

/// The first unqueried nonzero `x` (in rank order) that could still be made a
/// fixed point while keeping every answer given and `f(0) = 0`.
pub fn aux_can_hide_second(adv: &AuxAdversary) -> Result<Option<Point>> {
    if adv.domain.size() > CLOSURE_LIMIT {
        return Err(Error::Capacity(format!(
            "completion check limited to {CLOSURE_LIMIT} points, got {}",
            adv.domain.size()
        )));
    }
    let zero = adv.domain.lower().clone();
    let mut constraints: Vec<(Point, Point)> = adv
        .asked
        .iter()
        .map(|q| (q.clone(), AuxAdversary::answer(q)))
        .collect();
    if !adv.seen.contains(&zero) {
        constraints.push((zero.clone(), zero.clone()));
    }
    let candidates = adv
        .domain
        .points()
        .filter(|x| *x != zero && !adv.seen.contains(x));
    first_hideable(&adv.domain, &constraints, candidates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::monotone_violations_exhaustive;
    use crate::uniqueness::is_unique_fixed_point;

    #[test]
    fn maxindex_examples() {
        assert_eq!(maxindex(&[2, 0, 3]).unwrap(), 3);
        assert_eq!(maxindex(&[1, 0, 0]).unwrap(), 1);
        assert_eq!(maxindex(&[0, 5, 0]).unwrap(), 2);
        assert!(matches!(maxindex(&[0, 0]), Err(Error::Usage(_))));
        assert!(matches!(maxindex(&[-1, 2]), Err(Error::Usage(_))));
    }

    #[test]
    fn line_without_queries_hides() {
        let adv = LineAdversary::new(10).unwrap();
        let x = line_can_hide_second(&adv).unwrap().unwrap();
        assert!((1..=9).contains(&x[0]));
    }

    #[test]
    fn line_fully_pinned() {
        let adv = LineAdversary::with_queries(10, 1..=9).unwrap();
        assert_eq!(line_can_hide_second(&adv).unwrap(), None);
    }

    #[test]
    fn line_last_spot() {
        let adv = LineAdversary::with_queries(10, 1..=8).unwrap();
        assert_eq!(line_can_hide_second(&adv).unwrap(), Some(Point::from([9])));
    }

    #[test]
    fn line_hides_in_gaps() {
        let adv = LineAdversary::with_queries(10, [9, 8, 2, 1]).unwrap();
        let x = line_can_hide_second(&adv).unwrap().unwrap();
        assert!((3..=7).contains(&x[0]));
    }

    #[test]
    fn aux_without_queries_hides() {
        let adv = AuxAdversary::new(&[3, 3]).unwrap();
        let x = aux_can_hide_second(&adv).unwrap().unwrap();
        assert_ne!(x, Point::from([0, 0]));
    }

    #[test]
    fn aux_fully_pinned() {
        let b = BoxLattice::new(vec![0, 0], vec![3, 3]).unwrap();
        let adv = AuxAdversary::with_queries(&[3, 3], b.points().skip(1)).unwrap();
        assert_eq!(aux_can_hide_second(&adv).unwrap(), None);
    }

    #[test]
    fn aux_missing_class_is_hideable() {
        // Ask the top of every class (i = maxindex, j = x_i) except (2, 3).
        let mut queries = Vec::new();
        for j in 1..=4 {
            queries.push(Point::from([j, 0]));
            if j != 3 {
                queries.push(Point::from([4, j]));
            }
        }
        let adv = AuxAdversary::with_queries(&[4, 4], queries).unwrap();
        let x = aux_can_hide_second(&adv).unwrap().unwrap();
        assert_eq!(maxindex(&x).unwrap(), 2);
        assert_eq!(x[1], 3);
    }

    #[test]
    fn aux_capacity() {
        let adv = AuxAdversary::new(&[300, 300]).unwrap();
        assert!(matches!(aux_can_hide_second(&adv), Err(Error::Capacity(_))));
    }

    #[test]
    fn adversaries_are_monotone_and_consistent() {
        let mut line = LineAdversary::new(40).unwrap();
        assert!(monotone_violations_exhaustive(&mut line, OrderRelation::Componentwise)
            .unwrap()
            .is_empty());
        let mut aux = AuxAdversary::new(&[3, 4, 2]).unwrap();
        assert!(monotone_violations_exhaustive(&mut aux, OrderRelation::Componentwise)
            .unwrap()
            .is_empty());
        let x = Point::from([2, 4, 0]);
        assert_eq!(aux.raw_eval(&x), aux.raw_eval(&x));
    }

    #[test]
    fn completion_agrees_with_pairwise_test() {
        let b = BoxLattice::new(vec![0, 0], vec![2, 2]).unwrap();
        let pts: Vec<Point> = b.points().collect();
        // All two-point partial maps.
        for (i, x) in pts.iter().enumerate() {
            for y in &pts[i + 1..] {
                for fx in &pts {
                    for fy in &pts {
                        let c = vec![(x.clone(), fx.clone()), (y.clone(), fy.clone())];
                        let full = monotone_completion(&b, &c).unwrap().is_some();
                        assert_eq!(full, pairwise_consistent(&c));
                    }
                }
            }
        }
    }

    #[test]
    fn uniqueness_hits_the_linear_wall() {
        let n = 200u64;
        let mut adv = LineAdversary::new(n).unwrap();
        let r = is_unique_fixed_point(&mut adv, &[0]).unwrap();
        assert!(r.unique);
        let order = adv.queries().to_vec();
        for k in 0..=order.len() {
            let partial = LineAdversary::with_queries(n, order[..k].iter().copied()).unwrap();
            let hideable = line_can_hide_second(&partial).unwrap().is_some();
            let covered = order[..k].iter().filter(|&&q| q >= 1).count();
            assert_eq!(hideable, covered < n as usize - 1);
            if !hideable {
                assert!(k >= n as usize - 1);
            }
        }
    }

    #[test]
    fn aux_uniqueness_is_linear_in_side_sum() {
        for n in [2i64, 4, 8, 16] {
            let mut adv = AuxAdversary::new(&[n, n, n]).unwrap();
            let r = is_unique_fixed_point(&mut adv, &[0, 0, 0]).unwrap();
            assert!(r.unique);
            assert_eq!(r.queries as i64, 3 * n + 2);
        }
    }
}
