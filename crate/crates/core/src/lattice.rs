//! Integer box lattices `[a, b] ⊂ Z^d` with the componentwise and lexicographic
//! orders.
//!
//! Ranks use a mixed-radix encoding with coordinate 0 most significant, so the
//! rank order coincides with the lexicographic order and a lexicographic
//! lattice can be searched as a total order on `[0, |L|)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A point of `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(Vec<i64>);

impl Point {
    pub fn new(coords: Vec<i64>) -> Self {
        Point(coords)
    }

    pub fn splat(value: i64, dim: usize) -> Self {
        Point(vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.0
    }

    /// Appends one coordinate, producing a point of dimension `d + 1`.
    pub fn extended(&self, last: i64) -> Point {
        let mut coords = Vec::with_capacity(self.0.len() + 1);
        coords.extend_from_slice(&self.0);
        coords.push(last);
        Point(coords)
    }

    /// The first `k` coordinates.
    pub fn truncated(&self, k: usize) -> Point {
        Point(self.0[..k].to_vec())
    }

    pub fn with_coord(&self, i: usize, value: i64) -> Point {
        let mut coords = self.0.clone();
        coords[i] = value;
        Point(coords)
    }
}

impl Deref for Point {
    type Target = [i64];

    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl std::borrow::Borrow<[i64]> for Point {
    fn borrow(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for Point {
    fn from(coords: Vec<i64>) -> Self {
        Point(coords)
    }
}

impl From<&[i64]> for Point {
    fn from(coords: &[i64]) -> Self {
        Point(coords.to_vec())
    }
}

impl<const N: usize> From<[i64; N]> for Point {
    fn from(coords: [i64; N]) -> Self {
        Point(coords.to_vec())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for Point {
    type Err = Error;

    /// Parses `1,-2,3` (optionally wrapped in parentheses).
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        if trimmed.is_empty() {
            return Err(Error::Usage("empty point".into()));
        }
        trimmed
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Usage(format!("bad coordinate {part:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Point)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderRelation {
    Componentwise,
    Lexicographic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    Less,
    Equal,
    Greater,
    Incomparable,
}

impl Comparison {
    /// `x ⪯ y`.
    pub fn is_le(self) -> bool {
        matches!(self, Comparison::Less | Comparison::Equal)
    }

    pub fn is_ge(self) -> bool {
        matches!(self, Comparison::Greater | Comparison::Equal)
    }
}

fn check_dims(x: &[i64], y: &[i64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(())
}

pub fn compare(order: OrderRelation, x: &[i64], y: &[i64]) -> Result<Comparison> {
    check_dims(x, y)?;
    Ok(compare_unchecked(order, x, y))
}

pub(crate) fn compare_unchecked(order: OrderRelation, x: &[i64], y: &[i64]) -> Comparison {
    match order {
        OrderRelation::Lexicographic => match x.cmp(y) {
            Ordering::Less => Comparison::Less,
            Ordering::Equal => Comparison::Equal,
            Ordering::Greater => Comparison::Greater,
        },
        OrderRelation::Componentwise => {
            let mut le = true;
            let mut ge = true;
            for (a, b) in x.iter().zip(y) {
                le &= a <= b;
                ge &= a >= b;
            }
            match (le, ge) {
                (true, true) => Comparison::Equal,
                (true, false) => Comparison::Less,
                (false, true) => Comparison::Greater,
                (false, false) => Comparison::Incomparable,
            }
        }
    }
}

/// `x ≤_c y`, assuming equal dimensions.
pub fn cw_le(x: &[i64], y: &[i64]) -> bool {
    x.iter().zip(y).all(|(a, b)| a <= b)
}

pub(crate) fn order_le(order: OrderRelation, x: &[i64], y: &[i64]) -> bool {
    match order {
        OrderRelation::Componentwise => cw_le(x, y),
        OrderRelation::Lexicographic => x <= y,
    }
}

/// Componentwise meet and join.
pub fn meet_join(x: &[i64], y: &[i64]) -> Result<(Point, Point)> {
    check_dims(x, y)?;
    let meet = x.iter().zip(y).map(|(a, b)| *a.min(b)).collect();
    let join = x.iter().zip(y).map(|(a, b)| *a.max(b)).collect();
    Ok((Point(meet), Point(join)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    UpSet,
    DownSet,
}

/// The box `{x ∈ Z^d : lower ≤_c x ≤_c upper}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoxLattice {
    lower: Point,
    upper: Point,
    sides: Vec<u128>,
    size: u128,
}

impl BoxLattice {
    pub fn new(lower: impl Into<Point>, upper: impl Into<Point>) -> Result<Self> {
        let lower = lower.into();
        let upper = upper.into();
        check_dims(&lower, &upper)?;
        if lower.dim() == 0 {
            return Err(Error::Usage("box must have at least one coordinate".into()));
        }
        let mut sides = Vec::with_capacity(lower.dim());
        let mut size: u128 = 1;
        for (i, (a, b)) in lower.iter().zip(upper.iter()).enumerate() {
            if a > b {
                return Err(Error::OutOfRange(format!(
                    "lower bound {a} exceeds upper bound {b} in coordinate {i}"
                )));
            }
            let side = (*b as i128 - *a as i128 + 1) as u128;
            sides.push(side);
            size = size
                .checked_mul(side)
                .ok_or_else(|| Error::Capacity("lattice size overflows 128 bits".into()))?;
        }
        Ok(BoxLattice {
            lower,
            upper,
            sides,
            size,
        })
    }

    /// `{0, …, n−1}` as a one-dimensional box.
    pub fn line(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Usage("empty line lattice".into()));
        }
        BoxLattice::new(vec![0], vec![n as i64 - 1])
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    pub fn lower(&self) -> &Point {
        &self.lower
    }

    pub fn upper(&self) -> &Point {
        &self.upper
    }

    /// Side counts `N_i = b_i − a_i + 1`.
    pub fn sides(&self) -> &[u128] {
        &self.sides
    }

    /// `|L|`.
    pub fn size(&self) -> u128 {
        self.size
    }

    pub fn is_singleton(&self) -> bool {
        self.size == 1
    }

    /// `Σ (b_i − a_i)`.
    pub fn side_sum(&self) -> u128 {
        self.sides.iter().map(|s| s - 1).sum()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.dim() && cw_le(&self.lower, x) && cw_le(x, &self.upper)
    }

    fn check_inside(&self, x: &[i64]) -> Result<()> {
        check_dims(&self.lower, x)?;
        if !self.contains(x) {
            return Err(Error::OutOfRange(format!(
                "point {} outside box [{}, {}]",
                Point::from(x),
                self.lower,
                self.upper
            )));
        }
        Ok(())
    }

    /// Componentwise `⌊(a + b) / 2⌋`.
    pub fn center(&self) -> Point {
        self.lower
            .iter()
            .zip(self.upper.iter())
            .map(|(a, b)| floor_mid(*a, *b))
            .collect::<Vec<_>>()
            .into()
    }

    pub fn rank(&self, x: &[i64]) -> Result<u128> {
        self.check_inside(x)?;
        let mut r: u128 = 0;
        for ((xi, ai), ni) in x.iter().zip(self.lower.iter()).zip(&self.sides) {
            r = r * ni + (*xi as i128 - *ai as i128) as u128;
        }
        Ok(r)
    }

    pub fn unrank(&self, mut r: u128) -> Result<Point> {
        if r >= self.size {
            return Err(Error::OutOfRange(format!(
                "rank {r} not below lattice size {}",
                self.size
            )));
        }
        let mut coords = vec![0i64; self.dim()];
        for i in (0..self.dim()).rev() {
            let n = self.sides[i];
            coords[i] = (self.lower[i] as i128 + (r % n) as i128) as i64;
            r /= n;
        }
        Ok(Point(coords))
    }

    pub fn sub_box(&self, corner: &[i64], direction: Direction) -> Result<BoxLattice> {
        self.check_inside(corner)?;
        match direction {
            Direction::UpSet => BoxLattice::new(Point::from(corner), self.upper.clone()),
            Direction::DownSet => BoxLattice::new(self.lower.clone(), Point::from(corner)),
        }
    }

    /// Drops the last coordinate.
    pub fn slice_last(&self) -> Result<BoxLattice> {
        let k = self.dim() - 1;
        BoxLattice::new(self.lower.truncated(k), self.upper.truncated(k))
    }

    /// Every point in rank order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        PointIter {
            lattice: self,
            next: Some(self.lower.clone()),
        }
    }
}

impl fmt::Display for BoxLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

struct PointIter<'a> {
    lattice: &'a BoxLattice,
    next: Option<Point>,
}

impl Iterator for PointIter<'_> {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let lower = self.lattice.lower();
        let upper = self.lattice.upper();
        for i in (0..succ.dim()).rev() {
            if succ.0[i] < upper[i] {
                succ.0[i] += 1;
                self.next = Some(succ);
                break;
            }
            succ.0[i] = lower[i];
        }
        Some(current)
    }
}

pub(crate) fn floor_mid(a: i64, b: i64) -> i64 {
    (a as i128 + b as i128).div_euclid(2) as i64
}
