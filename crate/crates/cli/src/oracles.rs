//! `--oracle` spec strings.

use std::path::Path;

use anyhow::{bail, Context};
use tarski_core::adversary::{AuxAdversary, LineAdversary};
use tarski_core::oracle::{
    gen_closure_monotone, gen_lexicographic_monotone, gen_structured_monotone, ConstantOracle,
    IdentityOracle, MonotoneOracle, ReflectionOracle,
};
use tarski_core::sat::{cw_oracle_from_cnf, lex_oracle_from_cnf, CnfFormula};
use tarski_core::{BoxLattice, Error, OrderRelation, Point};

pub const SPEC_HELP: &str = "structured:<seed> | closure:<seed> | identity | constant:<c1,...> | \
nonmono-fixture | cnf:<path> | line-adv:<N> | aux-adv:<N1,...>";

pub struct Built {
    pub oracle: Box<dyn MonotoneOracle>,
    pub seed: Option<u64>,
}

fn usage(msg: String) -> anyhow::Error {
    Error::Usage(msg).into()
}

fn parse_seed(arg: &str) -> anyhow::Result<u64> {
    arg.parse()
        .map_err(|_| usage(format!("seed {arg:?} is not a non-negative integer")))
}

fn require_box(kind: &str, domain: Option<BoxLattice>) -> anyhow::Result<BoxLattice> {
    domain.ok_or_else(|| usage(format!("oracle `{kind}` needs --lower and --upper")))
}

/// Oracles with a built-in domain accept `--lower/--upper` only if they match.
fn check_intrinsic(oracle: &dyn MonotoneOracle, domain: &Option<BoxLattice>) -> anyhow::Result<()> {
    if let Some(b) = domain {
        if b != oracle.domain() {
            return Err(usage(format!(
                "box {b} does not match the oracle's domain {}",
                oracle.domain()
            )));
        }
    }
    Ok(())
}

/// Builds the oracle named by `spec`. CNF oracles take their dimension from
/// the box when one is given, and are one-dimensional otherwise.
pub fn build(spec: &str, order: OrderRelation, domain: Option<BoxLattice>) -> anyhow::Result<Built> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let lex = order == OrderRelation::Lexicographic;
    let mut seed = None;
    let oracle: Box<dyn MonotoneOracle> = match kind {
        "structured" => {
            let s = parse_seed(arg)?;
            seed = Some(s);
            let b = require_box(kind, domain)?;
            if lex {
                Box::new(gen_lexicographic_monotone(s, &b)?)
            } else {
                Box::new(gen_structured_monotone(s, &b)?)
            }
        }
        "closure" => {
            let s = parse_seed(arg)?;
            seed = Some(s);
            let b = require_box(kind, domain)?;
            if lex && b.dim() > 1 {
                bail!(usage("closure instances preserve ≤_c only; use --order cw or d = 1".into()));
            }
            Box::new(gen_closure_monotone(s, &b)?)
        }
        "identity" => Box::new(IdentityOracle::new(require_box(kind, domain)?)),
        "constant" => {
            let value: Point = arg.parse()?;
            Box::new(ConstantOracle::new(require_box(kind, domain)?, value)?)
        }
        "nonmono-fixture" => Box::new(ReflectionOracle::new(require_box(kind, domain)?)),
        "cnf" => {
            let formula = CnfFormula::from_file(Path::new(arg), false)
                .with_context(|| format!("loading {arg}"))?;
            let d = domain.as_ref().map_or(1, BoxLattice::dim);
            let oracle: Box<dyn MonotoneOracle> = if d == 1 {
                Box::new(lex_oracle_from_cnf(formula)?)
            } else if lex {
                bail!(usage("the lexicographic CNF oracle is one-dimensional".into()));
            } else {
                Box::new(cw_oracle_from_cnf(formula, d)?)
            };
            check_intrinsic(oracle.as_ref(), &domain)?;
            oracle
        }
        "line-adv" => {
            let n: u64 = arg
                .parse()
                .map_err(|_| usage(format!("line length {arg:?} is not a positive integer")))?;
            let adv = LineAdversary::new(n)?;
            check_intrinsic(&adv, &domain)?;
            Box::new(adv)
        }
        "aux-adv" => {
            let upper: Point = arg.parse()?;
            let adv = AuxAdversary::new(&upper)?;
            check_intrinsic(&adv, &domain)?;
            Box::new(adv)
        }
        _ => bail!(usage(format!("unknown oracle {spec:?}; expected {SPEC_HELP}"))),
    };
    Ok(Built { oracle, seed })
}
