//! Reference implementations shared by the integration tests. Nothing here
//! calls into the library's LP or reduction code.

#![allow(dead_code, clippy::needless_range_loop, clippy::int_plus_one)]

use num_traits::{One, Signed, Zero};
use tarski_core::lattice::{BoxLattice, Point};
use tarski_core::polytope::Polytope;
use tarski_core::rational::{int, Rational};
use tarski_core::sat::CnfFormula;

/// The 16 clauses over two variables that mention both of them: sign
/// patterns of `(x1, x1, x2)` and `(x1, x2, x2)`.
pub fn two_variable_clauses() -> Vec<[i64; 3]> {
    let mut out = Vec::with_capacity(16);
    for shape in [[1, 1, 2], [1, 2, 2]] {
        for signs in 0..8 {
            let mut c = [0i64; 3];
            for (k, v) in shape.iter().enumerate() {
                c[k] = if signs >> k & 1 == 1 { -v } else { *v };
            }
            out.push(c);
        }
    }
    out
}

pub fn formula_from_mask(universe: &[[i64; 3]], mask: u32) -> CnfFormula {
    let clauses = universe
        .iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, c)| *c)
        .collect();
    CnfFormula::new(2, clauses).expect("valid two-variable formula")
}

/// Tries every assignment.
pub fn brute_force_sat(n: usize, clauses: &[[i64; 3]]) -> bool {
    (0u64..1 << n).any(|bits| {
        clauses.iter().all(|c| {
            c.iter().any(|&lit| {
                let value = bits >> (lit.unsigned_abs() - 1) & 1 == 1;
                value == (lit > 0)
            })
        })
    })
}

/// Solves the square system `M z = r`; `None` if singular.
fn solve_square(mut m: Vec<Vec<Rational>>, mut r: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = r.len();
    for col in 0..n {
        let pivot = (col..n).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, pivot);
        r.swap(col, pivot);
        for i in 0..n {
            if i != col && !m[i][col].is_zero() {
                let f = &m[i][col] / &m[col][col];
                for j in col..n {
                    let delta = &f * &m[col][j];
                    m[i][j] -= delta;
                }
                let delta = &f * &r[col];
                r[i] -= delta;
            }
        }
    }
    Some((0..n).map(|i| &r[i] / &m[i][i]).collect())
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// All vertices of the bounded polyhedron `{z | A z ≤ b}` (with repeats).
pub fn vertices(a: &[Vec<Rational>], b: &[Rational]) -> Vec<Vec<Rational>> {
    let n = a.first().map_or(0, Vec::len);
    if n == 0 {
        return if b.iter().all(|v| !v.is_negative()) { vec![vec![]] } else { vec![] };
    }
    combinations(a.len(), n)
        .into_iter()
        .filter_map(|rows| {
            let m = rows.iter().map(|&i| a[i].clone()).collect();
            let r = rows.iter().map(|&i| b[i].clone()).collect();
            solve_square(m, r)
        })
        .filter(|z| {
            a.iter()
                .zip(b)
                .all(|(row, bi)| row.iter().zip(z).map(|(x, y)| x * y).sum::<Rational>() <= *bi)
        })
        .collect()
}

/// The best objective value over the vertices and every vertex attaining it.
pub fn optimize_by_vertices(
    a: &[Vec<Rational>],
    b: &[Rational],
    c: &[Rational],
    maximize: bool,
) -> Option<(Rational, Vec<Vec<Rational>>)> {
    let mut best: Option<(Rational, Vec<Vec<Rational>>)> = None;
    for z in vertices(a, b) {
        let v: Rational = c.iter().zip(&z).map(|(x, y)| x * y).sum();
        let v = if maximize { v } else { -v };
        match &mut best {
            Some((bv, at)) if *bv == v => at.push(z),
            Some((bv, _)) if *bv > v => {}
            _ => best = Some((v, vec![z])),
        }
    }
    best.map(|(v, at)| (if maximize { v } else { -v }, at))
}

/// `P` with the first `fixed.len()` coordinates pinned, as a system in the
/// remaining coordinates.
pub fn restrict(p: &Polytope, fixed: &[i64]) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let k = fixed.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (row, bi) in p.rows().iter().zip(p.rhs()) {
        let pinned: Rational = row[..k].iter().zip(fixed).map(|(c, &y)| c * int(y)).sum();
        a.push(row[k..].to_vec());
        b.push(bi - pinned);
    }
    (a, b)
}

/// `argmax eᵀy` over `{y ∈ P | y ≤ x}` by vertex enumeration; `None` when
/// empty. Panics if the maximizer is not unique.
pub fn d_reference(p: &Polytope, x: &[Rational]) -> Option<Vec<Rational>> {
    let n = p.dim();
    let mut a = p.rows().to_vec();
    let mut b = p.rhs().to_vec();
    for j in 0..n {
        let mut row = vec![Rational::zero(); n];
        row[j] = Rational::one();
        a.push(row);
        b.push(x[j].clone());
    }
    let e = vec![Rational::one(); n];
    let (_, at) = optimize_by_vertices(&a, &b, &e, true)?;
    assert!(at.windows(2).all(|w| w[0] == w[1]), "maximizer of eᵀy is not unique");
    Some(at[0].clone())
}

fn ceil(r: &Rational) -> i64 {
    r.ceil().to_integer().try_into().unwrap()
}

fn floor(r: &Rational) -> i64 {
    r.floor().to_integer().try_into().unwrap()
}

/// Steps 1–5 of the lexicographic map, with `d_k^min`, `d_k^max` read off
/// vertex enumeration of `P(y, k − 1)`.
pub fn h_lex_reference(p: &Polytope, lo: &[i64], hi: &[i64], y: &[i64]) -> Vec<i64> {
    let n = p.dim();
    if y[0] == lo[0] {
        return lo.to_vec();
    }
    if p.contains_point(y) {
        return y.to_vec();
    }
    let mut k = 2;
    loop {
        assert!(k <= n, "reference map ran past the last coordinate");
        let (a, b) = restrict(p, &y[..k - 1]);
        let mut e = vec![Rational::zero(); n - k + 1];
        e[0] = Rational::one();
        let (dmin, _) = optimize_by_vertices(&a, &b, &e, false).expect("P(y, k-1) is nonempty");
        let (dmax, _) = optimize_by_vertices(&a, &b, &e, true).expect("P(y, k-1) is nonempty");
        let (cmin, fmax) = (ceil(&dmin), floor(&dmax));
        let mut h = vec![0; n];
        // Step 2 → Step 4, or Step 3 → Step 4.
        if y[k - 1] < cmin || fmax < cmin {
            for i in 1..=n {
                h[i - 1] = if i <= k - 2 {
                    y[i - 1]
                } else if y[k - 2] <= lo[k - 2] + 1 {
                    lo[i - 1]
                } else if i == k - 1 {
                    y[k - 2] - 1
                } else {
                    hi[i - 1]
                };
            }
            return h;
        }
        // Step 5.
        if y[k - 1] > fmax {
            for i in 1..=n {
                h[i - 1] = if i <= k - 1 {
                    y[i - 1]
                } else if i == k {
                    fmax
                } else {
                    hi[i - 1]
                };
            }
            return h;
        }
        k += 1;
    }
}

/// Integer points of `P` inside `domain`, by direct `A·x ≤ b` evaluation.
pub fn integer_points(p: &Polytope, domain: &BoxLattice) -> Vec<Point> {
    domain
        .points()
        .filter(|x| {
            p.rows().iter().zip(p.rhs()).all(|(row, bi)| {
                row.iter().zip(x.iter()).map(|(c, &v)| c * int(v)).sum::<Rational>() <= *bi
            })
        })
        .collect()
}

/// Bit width of the smallest power of two ≥ `n`.
pub fn ceil_log2(n: u128) -> u32 {
    if n <= 1 {
        0
    } else {
        128 - (n - 1).leading_zeros()
    }
}
