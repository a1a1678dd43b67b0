//! 3-CNF formulas and the reductions that turn them into order-preserving
//! maps whose non-bottom fixed points are satisfying assignments.
//!
//! Integers `i ∈ [0, 2ⁿ)` are read as assignments with the most significant
//! bit first: bit `k` of `i` (1-based, from the left) is the value of `x_k`.

use std::path::{Path, PathBuf};

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::{BoxLattice, Point};
use crate::oracle::{MonotoneOracle, Session};
use crate::uniqueness::greatest_fixed_point;

/// Largest variable count for which a cnf oracle is built.
pub const MAX_VARIABLES: usize = 62;

/// Largest variable count for which `sat_probe` walks down from the top.
pub const PROBE_MAX_VARIABLES: usize = 20;

pub type Clause = [i64; 3];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub n: usize,
    pub clauses: Vec<Clause>,
    pub source: Option<PathBuf>,
}

impl CnfFormula {
    pub fn new(n: usize, clauses: Vec<Clause>) -> Result<Self> {
        for c in &clauses {
            for &lit in c {
                if lit == 0 || lit.unsigned_abs() as usize > n {
                    return Err(Error::OutOfRange(format!(
                        "literal {lit} outside 1..={n}"
                    )));
                }
            }
        }
        Ok(CnfFormula {
            n,
            clauses,
            source: None,
        })
    }

    pub fn from_file(path: &Path, strict3: bool) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
        let mut f = parse_dimacs(&text, strict3)?;
        f.source = Some(path.to_path_buf());
        Ok(f)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n, self.clauses.len());
        for [a, b, c] in &self.clauses {
            out.push_str(&format!("{a} {b} {c} 0\n"));
        }
        out
    }
}

/// Parses DIMACS CNF. Lines starting with `c` are comments; a line starting
/// with `%` ends the input. Clauses shorter than three literals are padded by
/// repeating their last literal unless `strict3` is set.
pub fn parse_dimacs(text: &str, strict3: bool) -> Result<CnfFormula> {
    let err = |line: usize, message: String| Error::Parse { line, message };
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut current_line = 0;
    let mut last_line = 0;

    let finish = |lits: &mut Vec<i64>, line: usize, clauses: &mut Vec<Clause>| -> Result<()> {
        let clause = match lits.as_slice() {
            [] => return Err(err(line, "empty clause".into())),
            [a] if !strict3 => [*a, *a, *a],
            [a, b] if !strict3 => [*a, *b, *b],
            [a, b, c] => [*a, *b, *c],
            other => {
                return Err(err(
                    line,
                    format!("clause has {} literals, expected 3", other.len()),
                ))
            }
        };
        clauses.push(clause);
        lits.clear();
        Ok(())
    };

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(err(line, "duplicate header".into()));
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(err(line, format!("malformed header {trimmed:?}")));
            }
            let n = parts[2]
                .parse()
                .map_err(|_| err(line, format!("bad variable count {:?}", parts[2])))?;
            let m = parts[3]
                .parse()
                .map_err(|_| err(line, format!("bad clause count {:?}", parts[3])))?;
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(err(line, "clause before the `p cnf` header".into()));
        };
        for tok in trimmed.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| err(line, format!("bad literal {tok:?}")))?;
            if lit == 0 {
                finish(&mut current, line, &mut clauses)?;
                continue;
            }
            if lit.unsigned_abs() as usize > n {
                return Err(err(line, format!("literal {lit} exceeds variable count {n}")));
            }
            if current.is_empty() {
                current_line = line;
            }
            current.push(lit);
        }
    }
    let Some((n, m)) = header else {
        return Err(err(last_line.max(1), "missing `p cnf` header".into()));
    };
    if !current.is_empty() {
        finish(&mut current, current_line, &mut clauses)?;
    }
    if clauses.len() != m {
        return Err(err(
            last_line.max(1),
            format!("header declares {m} clauses, found {}", clauses.len()),
        ));
    }
    Ok(CnfFormula {
        n,
        clauses,
        source: None,
    })
}

pub fn eval_cnf(f: &CnfFormula, assignment: &[bool]) -> Result<bool> {
    if assignment.len() != f.n {
        return Err(Error::DimensionMismatch {
            expected: f.n,
            got: assignment.len(),
        });
    }
    Ok(f.clauses.iter().all(|c| {
        c.iter()
            .any(|&lit| assignment[lit.unsigned_abs() as usize - 1] == (lit > 0))
    }))
}

/// Evaluates `F` on the bits of `i`, most significant first.
fn eval_bits(f: &CnfFormula, i: u64) -> bool {
    f.clauses.iter().all(|c| {
        c.iter().any(|&lit| {
            let k = lit.unsigned_abs() as usize;
            let bit = (i >> (f.n - k)) & 1 == 1;
            bit == (lit > 0)
        })
    })
}

pub fn bits_of(i: u64, n: usize) -> Vec<bool> {
    (1..=n).map(|k| (i >> (n - k)) & 1 == 1).collect()
}

fn cnf_box(n: usize, d: usize) -> Result<BoxLattice> {
    if n > MAX_VARIABLES {
        return Err(Error::Capacity(format!(
            "cnf oracles support at most {MAX_VARIABLES} variables, got {n}"
        )));
    }
    if d == 0 {
        return Err(Error::Usage("dimension must be at least 1".into()));
    }
    let top = (1i64 << n) - 1;
    BoxLattice::new(Point::splat(-1, d), Point::splat(top, d))
}

/// `f(−1) = −1`; for `i ≥ 0`, `f(i) = i` if `F(i)` holds, else `i − 1`.
#[derive(Debug, Clone)]
pub struct LexCnfOracle {
    formula: CnfFormula,
    domain: BoxLattice,
}

impl LexCnfOracle {
    pub fn new(formula: CnfFormula) -> Result<Self> {
        Ok(LexCnfOracle {
            domain: cnf_box(formula.n, 1)?,
            formula,
        })
    }

    pub(crate) fn domain_top(&self) -> i64 {
        self.domain.upper()[0]
    }

    pub(crate) fn step(&self, i: i64) -> i64 {
        if i < 0 || eval_bits(&self.formula, i as u64) {
            i
        } else {
            i - 1
        }
    }
}

impl MonotoneOracle for LexCnfOracle {
    fn domain(&self) -> &BoxLattice {
        &self.domain
    }

    fn raw_eval(&mut self, x: &Point) -> Point {
        Point::from([self.step(x[0])])
    }
}

/// The `d`-dimensional version: a point is sent to the diagonal through its
/// largest coordinate, then moved by the one-dimensional rule.
#[derive(Debug, Clone)]
pub struct CwCnfOracle {
    inner: LexCnfOracle,
    domain: BoxLattice,
}

impl CwCnfOracle {
    pub fn new(formula: CnfFormula, d: usize) -> Result<Self> {
        Ok(CwCnfOracle {
            domain: cnf_box(formula.n, d)?,
            inner: LexCnfOracle::new(formula)?,
        })
    }
}

impl MonotoneOracle for CwCnfOracle {
    fn domain(&self) -> &BoxLattice {
        &self.domain
    }

    fn raw_eval(&mut self, x: &Point) -> Point {
        let i = x.iter().copied().max().unwrap_or(-1);
        Point::splat(self.inner.step(i), x.dim())
    }
}

pub fn lex_oracle_from_cnf(f: CnfFormula) -> Result<LexCnfOracle> {
    LexCnfOracle::new(f)
}

pub fn cw_oracle_from_cnf(f: CnfFormula, d: usize) -> Result<CwCnfOracle> {
    CwCnfOracle::new(f, d)
}

/// Reads an assignment off a fixed point of a cnf oracle; `None` for the
/// bottom.
pub fn second_fixed_point_to_assignment(n: usize, fp: &[i64]) -> Result<Option<Vec<bool>>> {
    let Some(&v) = fp.first() else {
        return Err(Error::Usage("empty point".into()));
    };
    if fp.iter().any(|&c| c != v) {
        return Err(Error::contract(
            format!("fixed point {} is off the diagonal", Point::from(fp)),
            None,
        ));
    }
    if n > MAX_VARIABLES || v < -1 || v >= 1i64 << n {
        return Err(Error::OutOfRange(format!("value {v} is not in [-1, 2^{n})")));
    }
    Ok((v >= 0).then(|| bits_of(v as u64, n)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatProbe {
    pub greatest: Point,
    pub assignment: Option<Vec<bool>>,
    pub queries: usize,
}

impl SatProbe {
    pub fn satisfiable(&self) -> bool {
        self.assignment.is_some()
    }
}

/// Decides satisfiability by the greatest fixed point of the cnf oracle in
/// dimension `d` (1 for the lexicographic construction).
pub fn sat_probe(f: &CnfFormula, d: usize) -> Result<SatProbe> {
    if f.n > PROBE_MAX_VARIABLES {
        return Err(Error::Capacity(format!(
            "descending probe limited to {PROBE_MAX_VARIABLES} variables, got {}",
            f.n
        )));
    }
    let mut oracle: Box<dyn MonotoneOracle> = if d == 1 {
        Box::new(LexCnfOracle::new(f.clone())?)
    } else {
        Box::new(CwCnfOracle::new(f.clone(), d)?)
    };
    let mut session = Session::new(&mut oracle);
    let greatest = greatest_fixed_point(&mut session)?;
    let assignment = second_fixed_point_to_assignment(f.n, &greatest)?;
    if let Some(a) = &assignment {
        if !eval_cnf(f, a)? {
            return Err(Error::contract(
                format!("decoded assignment from {greatest} does not satisfy the formula"),
                None,
            ));
        }
    }
    Ok(SatProbe {
        greatest,
        assignment,
        queries: session.queries(),
    })
}

/// A uniformly random 3-CNF with `m` clauses over `n ≥ 1` variables.
pub fn random_formula<R: Rng>(rng: &mut R, n: usize, m: usize) -> CnfFormula {
    let clauses = (0..m)
        .map(|_| {
            let mut lit = || {
                let v = rng.gen_range(1..=n as i64);
                if rng.gen_bool(0.5) {
                    v
                } else {
                    -v
                }
            };
            [lit(), lit(), lit()]
        })
        .collect();
    CnfFormula {
        n,
        clauses,
        source: None,
    }
}
