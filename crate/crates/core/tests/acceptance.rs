//! The ten acceptance criteria. Each test prints one `PASS`/`FAIL` line;
//! run with `--nocapture --test-threads=1` for a clean report.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{
    brute_force_sat, ceil_log2, d_reference, formula_from_mask, h_lex_reference, integer_points,
    two_variable_clauses,
};
use tarski_core::adversary::{line_can_hide_second, AuxAdversary, LineAdversary};
use tarski_core::lattice::{cw_le, BoxLattice, Point};
use tarski_core::oracle::{
    brute_force_fixed_points, gen_closure_monotone, gen_lexicographic_monotone,
    gen_structured_monotone, ConstantOracle, IdentityOracle, MonotoneOracle, Session,
};
use tarski_core::polytope::{
    componentwise_hull, d_map, h_componentwise, h_lexicographic, lexicographic_hull,
    random_polytope, Polytope, RangeLp,
};
use tarski_core::rational::{int, ratio, Rational};
use tarski_core::sat::{bits_of, cw_oracle_from_cnf, random_formula, sat_probe, CnfFormula};
use tarski_core::solver::{solve_2d, solve_componentwise, solve_lexicographic};
use tarski_core::supermodular::{
    brute_force_nash, game_from_cnf, gen_supermodular_table_game, is_nash, solve_nash, Game,
    ResponseSession,
};
use tarski_core::uniqueness::{is_unique_fixed_point, uniqueness_budget};
use tarski_core::SolveOptions;

type Outcome = Result<String, String>;

fn report(id: u32, title: &str, outcome: Outcome) {
    match &outcome {
        Ok(detail) => println!("PASS C{id} {title}: {detail}"),
        Err(why) => println!("FAIL C{id} {title}: {why}"),
    }
    if let Err(why) = outcome {
        panic!("criterion {id} failed: {why}");
    }
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

trait Ctx<T> {
    fn ctx(self, what: &str) -> Result<T, String>;
}

impl<T, E: std::fmt::Display> Ctx<T> for Result<T, E> {
    fn ctx(self, what: &str) -> Result<T, String> {
        self.map_err(|e| format!("{what}: {e}"))
    }
}

fn bx(lower: &[i64], upper: &[i64]) -> BoxLattice {
    BoxLattice::new(lower.to_vec(), upper.to_vec()).expect("valid box")
}

fn cube(d: usize, n: i64) -> BoxLattice {
    bx(&vec![0; d], &vec![n - 1; d])
}

/// Worst queries / (log₂ N)^d over `seeds` structured instances on `[0, N)^d`.
fn scaling_stat(d: usize, exp: u32, seeds: u64) -> Result<(usize, f64), String> {
    let domain = cube(d, 1 << exp);
    let mut worst = 0;
    for seed in 0..seeds {
        let mut f = gen_structured_monotone(seed, &domain).ctx("generator")?;
        let r = {
            let mut s = Session::new(&mut f);
            if d == 2 {
                solve_2d(&mut s, SolveOptions::default())
            } else {
                solve_componentwise(&mut s, SolveOptions::default())
            }
            .ctx(&format!("seed {seed}, N = 2^{exp}"))?
        };
        ensure!(
            f.raw_eval(&r.fixed_point) == r.fixed_point,
            "seed {seed}, N = 2^{exp}: {} is not fixed",
            r.fixed_point
        );
        worst = worst.max(r.queries);
    }
    Ok((worst, worst as f64 / (exp as f64).powi(d as i32)))
}

fn check_flat(stats: &[(u32, usize, f64)], label: &str) -> Outcome {
    let first = stats[0].2;
    let last = stats[stats.len() - 1].2;
    let table = stats
        .iter()
        .map(|(e, q, s)| format!("2^{e}: max {q}, {s:.3}"))
        .collect::<Vec<_>>()
        .join("; ");
    ensure!(
        stats.iter().all(|s| s.2 <= 1.5 * first),
        "{label} statistic grows with N ({table})"
    );
    Ok(format!("{table}; last/first = {:.3}", last / first))
}

#[test]
fn c01_two_dimensional_budget() {
    let run = || -> Outcome {
        let start = Instant::now();
        let mut stats = Vec::new();
        for exp in [8, 12, 16, 20] {
            let (q, s) = scaling_stat(2, exp, 100)?;
            stats.push((exp, q, s));
        }
        let elapsed = start.elapsed();
        ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
        let detail = check_flat(&stats, "max queries / log²N")?;
        Ok(format!("{detail}; {:.3}s", elapsed.as_secs_f64()))
    };
    report(1, "2D solver budget", run());
}

#[test]
fn c02_three_dimensional_solver() {
    let run = || -> Outcome {
        let domain = cube(3, 16);
        for seed in 0..100 {
            let mut f = gen_closure_monotone(seed, &domain).ctx("generator")?;
            let fixed = brute_force_fixed_points(&mut f).ctx("brute force")?;
            let r = solve_componentwise(&mut Session::new(&mut f), SolveOptions::default())
                .ctx(&format!("seed {seed}"))?;
            ensure!(
                fixed.contains(&r.fixed_point),
                "seed {seed}: {} is not in the brute-force set",
                r.fixed_point
            );
        }
        let mut stats = Vec::new();
        for exp in [4, 6, 8] {
            let (q, s) = scaling_stat(3, exp, 100)?;
            stats.push((exp, q, s));
        }
        let detail = check_flat(&stats, "max queries / log³N")?;
        Ok(format!("100/100 closure instances exact; {detail}"))
    };
    report(2, "d = 3 solver", run());
}

#[test]
fn c03_lexicographic_budget() {
    let run = || -> Outcome {
        let boxes = [
            bx(&[0], &[(1 << 20) - 1]),
            bx(&[0, 0], &[9, 9]),
            bx(&[-5, 0], &[7, 1000]),
            bx(&[0, 0, 0], &[2, 30, 4]),
            bx(&[-1, -1, -1, -1], &[6, 6, 6, 6]),
            bx(&[3, 3], &[3, 4]),
        ];
        let mut runs = 0;
        for domain in &boxes {
            let budget = ceil_log2(domain.size()) as usize + 2;
            for seed in 0..100 {
                let mut f = gen_lexicographic_monotone(seed, domain).ctx("generator")?;
                let r = solve_lexicographic(&mut Session::new(&mut f)).ctx("solve")?;
                ensure!(
                    r.queries <= budget,
                    "{domain}, seed {seed}: {} queries > {budget}",
                    r.queries
                );
                ensure!(f.raw_eval(&r.fixed_point) == r.fixed_point, "{domain}, seed {seed}: not fixed");
                runs += 1;
            }
        }
        Ok(format!("{runs} runs within ⌈log₂|L|⌉ + 2"))
    };
    report(3, "lexicographic solver budget", run());
}

fn budget_check(oracle: &mut dyn MonotoneOracle, known: &[i64], label: &str) -> Result<(), String> {
    let domain = oracle.domain().clone();
    let r = is_unique_fixed_point(oracle, known).ctx(label)?;
    let budget = uniqueness_budget(&domain);
    ensure!(
        r.queries as u128 <= budget,
        "{label}: {} queries > {budget}",
        r.queries
    );
    Ok(())
}

#[test]
fn c04_uniqueness_budget_and_wall() {
    let run = || -> Outcome {
        let mut runs = 0;
        for domain in [cube(1, 1 << 16), cube(2, 1 << 12), cube(3, 64), bx(&[-3, 5, 0], &[4, 9, 100])] {
            for seed in 0..30 {
                let mut f = gen_structured_monotone(seed, &domain).ctx("generator")?;
                let known = solve_componentwise(&mut Session::new(&mut f), SolveOptions::default())
                    .ctx("solve")?
                    .fixed_point;
                budget_check(&mut f, &known, &format!("structured {domain} seed {seed}"))?;
                runs += 1;
            }
        }
        for seed in 0..30 {
            let domain = cube(3, 12);
            let mut f = gen_closure_monotone(seed, &domain).ctx("generator")?;
            let known = brute_force_fixed_points(&mut f).ctx("brute force")?[0].clone();
            budget_check(&mut f, &known, &format!("closure seed {seed}"))?;
            runs += 1;
        }
        for upper in [vec![5], vec![3, 8], vec![4, 4, 4], vec![2, 7, 1, 3]] {
            let mut adv = AuxAdversary::new(&upper).ctx("adversary")?;
            budget_check(&mut adv, &vec![0; upper.len()], &format!("aux {upper:?}"))?;
            runs += 1;
        }

        // The wall: run the algorithm against the line adversary, then ask
        // the certifier after every prefix of its query sequence.
        let n = 1000u64;
        let mut adv = LineAdversary::new(n).ctx("adversary")?;
        let r = is_unique_fixed_point(&mut adv, &[0]).ctx("line adversary")?;
        ensure!(r.unique, "line adversary reported a second fixed point");
        ensure!(r.queries as u128 <= uniqueness_budget(adv.domain()), "line adversary over budget");
        let order = adv.queries().to_vec();
        let mut first_pinned = None;
        for k in 0..=order.len() {
            let partial = LineAdversary::with_queries(n, order[..k].iter().copied()).ctx("replay")?;
            let hideable = line_can_hide_second(&partial).ctx("certifier")?.is_some();
            if !hideable && first_pinned.is_none() {
                first_pinned = Some(k);
            }
            ensure!(
                hideable || first_pinned.is_some(),
                "prefix {k}: not hideable but an earlier prefix was"
            );
        }
        let Some(k) = first_pinned else {
            return Err("the certifier could still hide a second fixed point at the end".into());
        };
        ensure!(k as u64 >= n - 1, "pinned after only {k} < N − 1 distinct queries");
        Ok(format!(
            "{runs} instances within 2Σ(bᵢ−aᵢ)+3; line N = {n}: second fixed point hideable until {k} distinct queries"
        ))
    };
    report(4, "uniqueness budget and linear wall", run());
}

fn extremes_match(oracle: &mut dyn MonotoneOracle, label: &str) -> Result<bool, String> {
    let mut fixed = brute_force_fixed_points(oracle).ctx(label)?;
    let domain = oracle.domain().clone();
    fixed.sort_by_key(|x| domain.rank(x).expect("inside"));
    ensure!(!fixed.is_empty(), "{label}: no fixed point");
    let r = is_unique_fixed_point(oracle, &fixed[0]).ctx(label)?;
    ensure!(r.least == fixed[0], "{label}: least {} ≠ {}", r.least, fixed[0]);
    let last = &fixed[fixed.len() - 1];
    ensure!(r.greatest == *last, "{label}: greatest {} ≠ {last}", r.greatest);
    ensure!(r.unique == (fixed.len() == 1), "{label}: unique = {} with {} fixed points", r.unique, fixed.len());
    Ok(r.unique)
}

#[test]
fn c05_uniqueness_correctness() {
    let run = || -> Outcome {
        let mut total = 0;
        let mut unique = 0;
        let mut tally = |u: bool| {
            total += 1;
            unique += u as usize;
        };
        let boxes = [
            bx(&[0], &[9_999]),
            bx(&[0, 0], &[99, 99]),
            bx(&[-4, 2], &[5, 40]),
            cube(3, 21),
            bx(&[0, 0, 0, 0], &[9, 9, 9, 9]),
            bx(&[1, 1], &[1, 6]),
        ];
        for domain in &boxes {
            for seed in 0..40 {
                let mut f = gen_closure_monotone(seed, domain).ctx("closure")?;
                tally(extremes_match(&mut f, &format!("closure {domain} seed {seed}"))?);
                let mut g = gen_structured_monotone(seed, domain).ctx("structured")?;
                tally(extremes_match(&mut g, &format!("structured {domain} seed {seed}"))?);
            }
            let mut id = IdentityOracle::new(domain.clone());
            tally(extremes_match(&mut id, "identity")?);
            let mut c = ConstantOracle::new(domain.clone(), domain.center()).ctx("constant")?;
            tally(extremes_match(&mut c, "constant")?);
        }
        let universe = two_variable_clauses();
        for mask in (0..1u32 << 16).step_by(257) {
            let f = formula_from_mask(&universe, mask);
            for d in [2, 3] {
                let mut o = cw_oracle_from_cnf(f.clone(), d).ctx("cnf")?;
                tally(extremes_match(&mut o, &format!("cnf mask {mask} d {d}"))?);
            }
        }
        Ok(format!("{total} oracles exact ({unique} with a unique fixed point)"))
    };
    report(5, "uniqueness correctness", run());
}

fn probe_agrees(f: &CnfFormula, label: &str) -> Result<bool, String> {
    let truth = brute_force_sat(f.n, &f.clauses);
    for d in 1..=3 {
        let probe = sat_probe(f, d).ctx(label)?;
        let above_bottom = probe.greatest != Point::splat(-1, d);
        ensure!(
            above_bottom == truth && probe.satisfiable() == truth,
            "{label}, d = {d}: greatest {} but satisfiable = {truth}",
            probe.greatest
        );
    }
    Ok(truth)
}

#[test]
fn c06_sat_reduction_equivalence() {
    let run = || -> Outcome {
        let universe = two_variable_clauses();
        let mut sat = 0;
        for mask in 0..1u32 << universe.len() {
            let f = formula_from_mask(&universe, mask);
            sat += probe_agrees(&f, &format!("mask {mask:#06x}"))? as usize;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut random_sat = 0;
        for k in 0..200 {
            let n = rng.gen_range(1..=10);
            let m = rng.gen_range(1..=(5 * n).max(2));
            let f = random_formula(&mut rng, n, m);
            random_sat += probe_agrees(&f, &format!("random formula {k}"))? as usize;
        }
        Ok(format!(
            "{} clause sets ({sat} satisfiable) and 200 random formulas ({random_sat} satisfiable) agree for lex, d = 2, d = 3",
            1u32 << universe.len()
        ))
    };
    report(6, "SAT reduction equivalence", run());
}

#[test]
fn c07_two_player_nash_budget() {
    let run = || -> Outcome {
        let mut runs = 0;
        let shapes: [(i64, i64); 7] =
            [(2, 2), (3, 1000), (16, 16), (256, 9), (4096, 4096), (1 << 16, 1 << 16), (1 << 16, 3)];
        for (n1, n2) in shapes {
            let s = bx(&[0, 0], &[n1 - 1, n2 - 1]);
            let budget = 2 * ceil_log2(n1 as u128) as usize + 2;
            for seed in 0..25 {
                let mut g = Game::tracking(seed, &s).ctx("tracking game")?;
                let r = solve_nash(&mut g).ctx("solve_nash")?;
                ensure!(
                    r.queries <= budget,
                    "{n1}×{n2} seed {seed}: {} queries > {budget}",
                    r.queries
                );
                let mut session = ResponseSession::new(&mut g);
                ensure!(
                    session.query(&r.profile).ctx("response")? == r.profile,
                    "{n1}×{n2} seed {seed}: {} is not a best-response fixed point",
                    r.profile
                );
                if s.size() <= 10_000 {
                    ensure!(is_nash(&g, &r.profile).ctx("deviation")?, "{n1}×{n2} seed {seed}: deviation found");
                }
                runs += 1;
            }
        }
        for ranges in [[99, 99], [9, 999], [49, 3], [1, 1]] {
            let s = bx(&[0, 0], &ranges);
            let budget = 2 * ceil_log2(s.sides()[0]) as usize + 2;
            for seed in 0..25 {
                let mut g = gen_supermodular_table_game(seed, &s).ctx("table game")?;
                let r = solve_nash(&mut g).ctx("solve_nash")?;
                ensure!(r.queries <= budget, "table {ranges:?} seed {seed}: {} > {budget}", r.queries);
                ensure!(
                    is_nash(&g, &r.profile).ctx("deviation")?,
                    "table {ranges:?} seed {seed}: {} admits a profitable deviation",
                    r.profile
                );
                runs += 1;
            }
        }
        Ok(format!("{runs} games within 2⌈log₂N₁⌉+2, all profiles verified"))
    };
    report(7, "two-player Nash budget", run());
}

#[test]
fn c08_cnf_game_structure() {
    let run = || -> Outcome {
        let universe = two_variable_clauses();
        let mut sat = 0;
        for mask in 0..1u32 << universe.len() {
            let f = formula_from_mask(&universe, mask);
            let truth = brute_force_sat(2, &f.clauses);
            let mut g = game_from_cnf(f.clone(), 3).ctx("game")?;
            let set = brute_force_nash(&mut g).ctx("brute force")?;
            let mut above_bottom = false;
            for p in &set.profiles {
                ensure!(p.iter().all(|&v| v == p[0]), "mask {mask:#06x}: {p} is not diagonal");
                if p[0] >= 0 {
                    above_bottom = true;
                    let bits = bits_of(p[0] as u64, 2);
                    let one_hot = |lit: i64| bits[lit.unsigned_abs() as usize - 1] == (lit > 0);
                    ensure!(
                        f.clauses.iter().all(|c| c.iter().any(|&l| one_hot(l))),
                        "mask {mask:#06x}: {p} does not encode a satisfying assignment"
                    );
                }
            }
            ensure!(above_bottom == truth, "mask {mask:#06x}: equilibrium above bottom = {above_bottom}, satisfiable = {truth}");
            sat += truth as usize;
        }
        Ok(format!("{} formulas, {sat} satisfiable, every equilibrium diagonal", 1u32 << universe.len()))
    };
    report(8, "CNF game structure", run());
}

fn example2() -> Polytope {
    Polytope::from_integers(&[&[2, -1, 0], &[-1, 3, 0], &[0, 0, 2], &[0, -1, -1]], &[0, -10, 10, 0])
        .expect("row structure holds")
}

#[test]
fn c09_example_two() {
    let run = || -> Outcome {
        let p = example2();
        let hull = componentwise_hull(&p).ctx("hull")?;
        let x: Vec<Rational> = [-3, -4, 5].iter().map(|&v| int(v)).collect();
        let d = d_map(&p, &hull, &x).ctx("d")?;
        let reference = d_reference(&p, &x).ok_or("reference: P(x) empty")?;
        ensure!(d == reference, "d = {d:?}, vertex enumeration gives {reference:?}");
        ensure!(d == vec![int(-3), ratio(-13, 3), int(5)], "d = {d:?}");
        let h = h_componentwise(&p, &hull, &[-3, -4, 5]).ctx("h")?;
        ensure!(h == Point::from([-3, -5, 5]), "h = {h}");
        Ok(format!("d = (-3, -13/3, 5), h = {h}"))
    };
    report(9, "worked polytope example", run());
}

#[test]
fn c10_polytope_maps() {
    let run = || -> Outcome {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut checked = 0;
        let mut points = 0;
        let mut with_integer_points = 0;
        while checked < 10 {
            let n = 2 + checked % 3;
            // Thin instances (span 1, several cuts) often miss every lattice point.
            let (extra, span) = if checked % 2 == 0 { (1 + checked % 3, 3) } else { (6 + 2 * n, 1) };
            let p = random_polytope(&mut rng, n, extra, span).ctx("generator")?;
            let cw = componentwise_hull(&p).ctx("componentwise hull")?;
            let lex = lexicographic_hull(&p).ctx("lexicographic hull")?;
            let (cw_box, lex_box) = (cw.domain().ctx("box")?, lex.domain().ctx("box")?);
            if cw_box.size() > 10_000 || lex_box.size() > 10_000 {
                continue;
            }
            let label = format!("polytope {checked} (n = {n})");

            // Fixed points of the componentwise map versus a direct scan.
            let truth = integer_points(&p, &cw_box);
            with_integer_points += !truth.is_empty() as usize;
            for (k, x) in cw_box.points().enumerate() {
                let h = h_componentwise(&p, &cw, &x).ctx(&label)?;
                ensure!(cw_box.contains(&h), "{label}: h({x}) = {h} leaves D(P)");
                let fixed = h == x && x != cw.lower;
                ensure!(fixed == truth.contains(&x), "{label}: h({x}) = {h}, integer point = {}", !fixed);
                if k % 5 == 0 {
                    let xr: Vec<Rational> = x.iter().map(|&v| int(v)).collect();
                    let d = d_map(&p, &cw, &xr).ctx(&label)?;
                    let expected = d_reference(&p, &xr).unwrap_or_else(|| cw.lower.iter().map(|&v| int(v)).collect());
                    ensure!(d == expected, "{label}: d({x}) disagrees with vertex enumeration");
                }
            }

            // The lexicographic map: reference agreement, descent, and order.
            let mut images = Vec::with_capacity(lex_box.size() as usize);
            for y in lex_box.points() {
                let h = h_lexicographic(&p, &lex, &y, RangeLp::Product).ctx(&label)?;
                let reference = h_lex_reference(&p, &lex.lower, &lex.upper, &y);
                ensure!(h.coords() == reference, "{label}: h({y}) = {h}, reference {reference:?}");
                ensure!(cw_le(&lex.lower, &h) && h <= y, "{label}: h({y}) = {h} outside [xˡ, y]");
                if y != lex.lower && !p.contains_point(&y) {
                    ensure!(h != y, "{label}: {y} ∉ P is fixed");
                }
                images.push(h);
            }
            // Points come in ≤_l order, so preservation means every earlier
            // image is ≤_l every later one.
            for (i, a) in images.iter().enumerate() {
                ensure!(images[i + 1..].iter().all(|b| a <= b), "{label}: order broken after rank {i}");
            }
            points += cw_box.size() + lex_box.size();
            checked += 1;
        }
        Ok(format!(
            "10 polytopes ({with_integer_points} with integer points), {points} lattice points checked exhaustively"
        ))
    };
    report(10, "polytope maps", run());
}
