//! Query-count sweeps over seeded instances, one session per run.

use clap::ValueEnum;
use rayon::prelude::*;
use tarski_core::adversary::LineAdversary;
use tarski_core::oracle::{gen_lexicographic_monotone, gen_structured_monotone, Session};
use tarski_core::solver::{solve_2d, solve_componentwise, solve_lexicographic};
use tarski_core::supermodular::{solve_nash, Game};
use tarski_core::uniqueness::is_unique_fixed_point;
use tarski_core::{BoxLattice, Error, Point, Result, SolveOptions};

use crate::csv_out::Row;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    #[value(name = "2d")]
    TwoD,
    Cw,
    Lex,
    Unique,
    Nash,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Instance {
    Structured,
    /// `x ↦ max(x − 1, 0)` on a line: one fixed point, linear descent.
    Descent,
}

pub struct Plan {
    pub algorithm: Algorithm,
    pub instance: Instance,
    pub d: usize,
    pub sizes: Vec<u64>,
    pub seeds: Vec<u64>,
}

/// Largest lattice a sweep may touch; ranks must fit comfortably in i64.
const SWEEP_LIMIT: u128 = 1 << 62;

impl Plan {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.seeds.is_empty() {
            return Err(Error::Usage("need at least one size and one seed".into()));
        }
        if self.d == 0 {
            return Err(Error::Usage("dimension must be at least 1".into()));
        }
        match (self.algorithm, self.instance) {
            (Algorithm::Unique, _) | (_, Instance::Structured) => {}
            _ => {
                return Err(Error::Usage("the descent instance is only used with --algorithm unique".into()))
            }
        }
        if self.instance == Instance::Descent && self.d != 1 {
            return Err(Error::Usage("the descent instance is one-dimensional (--d 1)".into()));
        }
        if self.algorithm == Algorithm::TwoD && self.d != 2 {
            return Err(Error::Usage("--algorithm 2d needs --d 2".into()));
        }
        for &n in &self.sizes {
            if n < 2 {
                return Err(Error::Usage(format!("size {n} is too small; sides need at least 2 points")));
            }
            let total = (n as u128).checked_pow(self.d as u32);
            if total.is_none_or(|t| t > SWEEP_LIMIT) {
                return Err(Error::Capacity(format!("{n}^{} points exceeds the sweep limit 2^62", self.d)));
            }
        }
        Ok(())
    }

    pub fn run(&self) -> Result<Vec<Row>> {
        self.validate()?;
        let jobs: Vec<(u64, u64)> = self
            .sizes
            .iter()
            .flat_map(|&n| self.seeds.iter().map(move |&s| (n, s)))
            .collect();
        jobs.par_iter().map(|&(n, seed)| self.one(n, seed)).collect()
    }

    fn one(&self, n: u64, seed: u64) -> Result<Row> {
        let domain = BoxLattice::new(Point::splat(0, self.d), Point::splat(n as i64 - 1, self.d))?;
        let opts = SolveOptions::default();
        let (name, queries, result) = match self.algorithm {
            Algorithm::TwoD | Algorithm::Cw => {
                let mut f = gen_structured_monotone(seed, &domain)?;
                let mut s = Session::new(&mut f);
                let r = if self.algorithm == Algorithm::TwoD {
                    solve_2d(&mut s, opts)?
                } else {
                    solve_componentwise(&mut s, opts)?
                };
                ("find", r.queries, r.fixed_point.to_string())
            }
            Algorithm::Lex => {
                let mut f = gen_lexicographic_monotone(seed, &domain)?;
                let r = solve_lexicographic(&mut Session::new(&mut f))?;
                ("find", r.queries, r.fixed_point.to_string())
            }
            Algorithm::Unique => {
                let report = match self.instance {
                    Instance::Structured => {
                        let mut f = gen_structured_monotone(seed, &domain)?;
                        let known = solve_componentwise(&mut Session::new(&mut f), opts)?.fixed_point;
                        is_unique_fixed_point(&mut f, &known)?
                    }
                    Instance::Descent => {
                        let mut adv = LineAdversary::new(n)?;
                        is_unique_fixed_point(&mut adv, &[0])?
                    }
                };
                let verdict = if report.unique { "unique" } else { "multiple" };
                ("unique", report.queries, verdict.to_string())
            }
            Algorithm::Nash => {
                let mut g = Game::tracking(seed, &domain)?;
                let r = solve_nash(&mut g)?;
                ("nash", r.queries, r.profile.to_string())
            }
        };
        let seed = (self.instance == Instance::Structured).then_some(seed);
        Ok(Row::new(name, seed, &domain, queries, result))
    }
}
