//! Deciding whether the fixed point is unique, with `O(Σ Nᵢ)` queries.
//!
//! By Tarski's theorem every fixed point lies between the least and the
//! greatest one, so uniqueness is equivalent to the two coinciding. Both are
//! reached by plain iteration from the corners of the box; each non-final step
//! strictly decreases (or increases) at least one coordinate.

use crate::error::{Error, Result};
use crate::lattice::{cw_le, BoxLattice, OrderRelation, Point};
use crate::oracle::{MonotoneOracle, Session, BRUTE_FORCE_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniquenessReport {
    pub least: Point,
    pub greatest: Point,
    pub unique: bool,
    pub queries: usize,
}

/// Upper bound on the queries spent by [`is_unique_fixed_point`].
pub fn uniqueness_budget(domain: &BoxLattice) -> u128 {
    2 * (domain.side_sum() - domain.dim() as u128) + 3
}

/// Iterates `x ← f(x)` downward from the top corner.
pub fn greatest_fixed_point(session: &mut Session<'_>) -> Result<Point> {
    let start = session.domain().upper().clone();
    iterate(session, start, true)
}

/// Iterates `x ← f(x)` upward from the bottom corner.
pub fn least_fixed_point(session: &mut Session<'_>) -> Result<Point> {
    let start = session.domain().lower().clone();
    iterate(session, start, false)
}

fn iterate(session: &mut Session<'_>, mut x: Point, descending: bool) -> Result<Point> {
    loop {
        let fx = session.query(&x)?;
        if fx == x {
            return Ok(x);
        }
        let ok = if descending { cw_le(&fx, &x) } else { cw_le(&x, &fx) };
        if !ok {
            let dir = if descending { "descent" } else { "ascent" };
            return Err(Error::contract(
                format!("{dir} broken: f({x}) = {fx}"),
                session.find_witness(OrderRelation::Componentwise),
            ));
        }
        x = fx;
    }
}

/// Verifies `known`, then computes both extreme fixed points in separate
/// sessions.
pub fn is_unique_fixed_point(
    oracle: &mut dyn MonotoneOracle,
    known: &[i64],
) -> Result<UniquenessReport> {
    let domain = oracle.domain().clone();
    if known.len() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: known.len(),
        });
    }
    let (least, low_queries) = {
        let mut session = Session::new(oracle);
        let fk = session.query(known)?;
        if fk.coords() != known {
            return Err(Error::Usage(format!(
                "claimed fixed point {} maps to {fk}",
                Point::from(known)
            )));
        }
        (least_fixed_point(&mut session)?, session.queries())
    };
    let (greatest, high_queries) = {
        let mut session = Session::new(oracle);
        (greatest_fixed_point(&mut session)?, session.queries())
    };
    if !cw_le(&least, &greatest) || !cw_le(&least, known) || !cw_le(known, &greatest) {
        return Err(Error::contract(
            format!("extremes {least} and {greatest} do not bracket {}", Point::from(known)),
            None,
        ));
    }
    let queries = low_queries + high_queries;
    debug_assert!(queries as u128 <= uniqueness_budget(&domain));
    Ok(UniquenessReport {
        unique: least == greatest,
        least,
        greatest,
        queries,
    })
}

/// Exhaustive scan for the lexicographic model, where no sublinear method
/// exists. `least` and `greatest` are the rank-extreme fixed points.
pub fn lexicographic_uniqueness_scan(oracle: &mut dyn MonotoneOracle) -> Result<UniquenessReport> {
    let domain = oracle.domain().clone();
    if domain.size() > BRUTE_FORCE_LIMIT {
        return Err(Error::Capacity(format!(
            "lexicographic scan limited to {BRUTE_FORCE_LIMIT} points, got {}",
            domain.size()
        )));
    }
    let mut session = Session::new(oracle);
    let mut fixed = Vec::new();
    for x in domain.points() {
        if session.query(&x)? == x {
            fixed.push(x);
            if fixed.len() > 2 {
                fixed.swap_remove(1);
            }
        }
    }
    let (least, greatest) = match fixed.as_slice() {
        [] => {
            return Err(Error::contract(
                "no fixed point anywhere in the lattice",
                session.find_witness(OrderRelation::Lexicographic),
            ))
        }
        [one] => (one.clone(), one.clone()),
        [first, .., last] => (first.clone(), last.clone()),
    };
    Ok(UniquenessReport {
        unique: least == greatest,
        least,
        greatest,
        queries: session.queries(),
    })
}
