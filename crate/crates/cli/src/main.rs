mod bench;
mod csv_out;
mod oracles;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use tarski_core::adversary::{aux_can_hide_second, line_can_hide_second, AuxAdversary, LineAdversary};
use tarski_core::oracle::{brute_force_fixed_points, monotone_violations_exhaustive, Session};
use tarski_core::polytope::{
    componentwise_hull, d_map, h_componentwise, h_lexicographic, integer_point_via_fixed_point,
    integer_point_via_lexicographic, lexicographic_hull, LatticeHull, Polytope, RangeLp,
};
use tarski_core::rational::{int, Rational};
use tarski_core::sat::{bits_of, sat_probe, CnfFormula};
use tarski_core::solver::solve;
use tarski_core::supermodular::{brute_force_nash, game_from_cnf, solve_nash, Game, NashSemantics};
use tarski_core::uniqueness::{is_unique_fixed_point, lexicographic_uniqueness_scan, uniqueness_budget};
use tarski_core::{BoxLattice, Error, MonotoneOracle, OrderRelation, Point, SolveOptions, Witness};

use crate::bench::{Algorithm, Instance, Plan};
use crate::csv_out::Row;

#[derive(Parser)]
#[command(
    name = "tarski-lab",
    version,
    about = "Fixed points of order-preserving maps: solvers, uniqueness checks, games and reductions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find a fixed point.
    Find(FindArgs),
    /// Decide whether a known fixed point is the only one.
    Unique(UniqueArgs),
    /// Find a pure Nash equilibrium of a game file.
    Nash(NashArgs),
    /// Build the CNF game and find an equilibrium.
    NashFromCnf(NashCnfArgs),
    /// Decide satisfiability through the greatest fixed point of the reduction.
    SatProbe(SatArgs),
    /// Evaluate the polytope maps or search for an integer point.
    Polytope(PolytopeArgs),
    /// Run the uniqueness check against an adversary and report what stays hidden.
    AdversaryReport(AdversaryArgs),
    /// Sweep sizes and seeds and emit query counts as CSV.
    Bench(BenchArgs),
    /// Cross-check the solvers against brute force on one oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Order {
    Cw,
    Lex,
}

impl From<Order> for OrderRelation {
    fn from(o: Order) -> Self {
        match o {
            Order::Cw => OrderRelation::Componentwise,
            Order::Lex => OrderRelation::Lexicographic,
        }
    }
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_enum, default_value = "cw")]
    order: Order,
    /// Lower corner, e.g. `0,0,0`.
    #[arg(long, allow_hyphen_values = true)]
    lower: Option<Point>,
    /// Upper corner, e.g. `15,15,15`.
    #[arg(long, allow_hyphen_values = true)]
    upper: Option<Point>,
    /// structured:<seed> | closure:<seed> | identity | constant:<c,...> | nonmono-fixture |
    /// cnf:<path> | line-adv:<N> | aux-adv:<N1,...>
    #[arg(long)]
    oracle: String,
}

impl OracleArgs {
    fn domain(&self) -> anyhow::Result<Option<BoxLattice>> {
        match (&self.lower, &self.upper) {
            (Some(l), Some(u)) => Ok(Some(BoxLattice::new(l.clone(), u.clone())?)),
            (None, None) => Ok(None),
            _ => bail!(Error::Usage("--lower and --upper go together".into())),
        }
    }

    fn build(&self) -> anyhow::Result<oracles::Built> {
        oracles::build(&self.oracle, self.order.into(), self.domain()?)
    }
}

#[derive(Args)]
struct FindArgs {
    #[command(flatten)]
    oracle: OracleArgs,
    /// Print the sequence of boxes searched.
    #[arg(long)]
    trace: bool,
    /// Append a result row to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct UniqueArgs {
    #[command(flatten)]
    oracle: OracleArgs,
    /// A fixed point already in hand (required for --order cw).
    #[arg(long, allow_hyphen_values = true)]
    known: Option<Point>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct NashArgs {
    #[arg(long)]
    game: PathBuf,
    /// Also enumerate every equilibrium.
    #[arg(long)]
    brute_force: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct NashCnfArgs {
    #[arg(long)]
    cnf: PathBuf,
    #[arg(long, default_value_t = 3)]
    players: usize,
    #[arg(long)]
    brute_force: bool,
}

#[derive(Args)]
struct SatArgs {
    #[arg(long)]
    cnf: PathBuf,
    /// Dimension of the reduction; 1 is the lexicographic line.
    #[arg(long, default_value_t = 1)]
    d: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolytopeAction {
    Eval,
    FindIntegerPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StepLp {
    Product,
    Separate,
}

#[derive(Args)]
struct PolytopeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "cw")]
    mode: Order,
    #[arg(long, value_enum)]
    action: PolytopeAction,
    #[arg(long, allow_hyphen_values = true)]
    point: Option<Point>,
    /// How the lexicographic map bounds each coordinate.
    #[arg(long, value_enum, default_value = "product")]
    lp: StepLp,
}

#[derive(Args)]
struct AdversaryArgs {
    /// line-adv:<N> or aux-adv:<N1,...>
    #[arg(long)]
    oracle: String,
    /// Judge hideability after only this many distinct queries.
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    #[arg(long, value_enum, default_value = "structured")]
    instance: Instance,
    /// Dimension; defaults to 2 for `2d`/`cw`/`nash` and 1 for `lex`/`unique`.
    #[arg(long)]
    d: Option<usize>,
    /// Side lengths, e.g. `256,4096`.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<u64>,
    /// Number of seeds per size.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed_start: u64,
    /// Append rows here instead of printing them.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    oracle: OracleArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let start = Instant::now();
    let (result, timed) = match cli.command {
        Command::Find(a) => (find(a), true),
        Command::Unique(a) => (unique(a), true),
        Command::Nash(a) => (nash(a), true),
        Command::NashFromCnf(a) => (nash_from_cnf(a), true),
        Command::SatProbe(a) => (sat(a), true),
        Command::Polytope(a) => (polytope(a), true),
        Command::AdversaryReport(a) => (adversary(a), true),
        Command::Bench(a) => {
            let timed = a.csv.is_some();
            (bench(a), timed)
        }
        Command::Verify(a) => (verify(a), true),
    };
    match result {
        Ok(()) => {
            if timed {
                println!("elapsed: {:.3} ms", start.elapsed().as_secs_f64() * 1e3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(Error::Contract(_)) => 2,
        Some(Error::Capacity(_)) => 3,
        _ => 1,
    }
}

fn find(a: FindArgs) -> anyhow::Result<()> {
    let mut built = a.oracle.build()?;
    let mut session = Session::new(built.oracle.as_mut());
    let r = solve(&mut session, a.oracle.order.into(), SolveOptions { trace: a.trace })?;
    let domain = session.domain().clone();
    println!("fixed point: {}", r.fixed_point);
    println!("queries: {}", r.queries);
    if let Some(trace) = &r.trace {
        for (k, b) in trace.iter().enumerate() {
            println!("box {k}: {b}");
        }
    }
    if let Some(path) = &a.csv {
        csv_out::append(path, &[Row::new("find", built.seed, &domain, r.queries, r.fixed_point.to_string())])?;
    }
    Ok(())
}

fn unique(a: UniqueArgs) -> anyhow::Result<()> {
    let mut built = a.oracle.build()?;
    let domain = built.oracle.domain().clone();
    let report = match a.oracle.order {
        Order::Cw => {
            let known = a
                .known
                .ok_or_else(|| Error::Usage("--known is required for --order cw".into()))?;
            is_unique_fixed_point(built.oracle.as_mut(), &known)?
        }
        Order::Lex => lexicographic_uniqueness_scan(built.oracle.as_mut())?,
    };
    println!("least: {}", report.least);
    println!("greatest: {}", report.greatest);
    println!("unique={}", report.unique);
    println!("queries: {}", report.queries);
    if a.oracle.order == Order::Cw {
        println!("budget: {}", uniqueness_budget(&domain));
    }
    if let Some(path) = &a.csv {
        let verdict = if report.unique { "unique" } else { "multiple" };
        csv_out::append(path, &[Row::new("unique", built.seed, &domain, report.queries, verdict.into())])?;
    }
    Ok(())
}

fn print_nash_set(game: &mut Game, found: &Point) -> anyhow::Result<()> {
    let set = brute_force_nash(game)?;
    let label = match set.semantics {
        NashSemantics::NoProfitableDeviation => "equilibria",
        NashSemantics::LeastResponseFixed => "least-response fixed profiles",
    };
    let listed: Vec<String> = set.profiles.iter().map(Point::to_string).collect();
    println!("{label} ({}): {}", listed.len(), listed.join(" "));
    if !set.profiles.contains(found) {
        bail!(Error::Contract(tarski_core::Violation {
            reason: format!("{found} is not in the brute-force set"),
            witness: None,
        }));
    }
    Ok(())
}

fn nash(a: NashArgs) -> anyhow::Result<()> {
    let mut game = Game::from_file(&a.game).with_context(|| format!("loading {}", a.game.display()))?;
    let r = solve_nash(&mut game)?;
    println!("equilibrium: {}", r.profile);
    println!("best-response queries: {}", r.queries);
    if a.brute_force {
        print_nash_set(&mut game, &r.profile)?;
    }
    if let Some(path) = &a.csv {
        let row = Row::new("nash", None, game.strategies(), r.queries, r.profile.to_string());
        csv_out::append(path, &[row])?;
    }
    Ok(())
}

fn load_cnf(path: &Path) -> anyhow::Result<CnfFormula> {
    CnfFormula::from_file(path, false).with_context(|| format!("loading {}", path.display()))
}

fn assignment_text(bits: &[bool]) -> String {
    bits.iter()
        .enumerate()
        .map(|(i, &b)| format!("x{}={}", i + 1, b as u8))
        .collect::<Vec<_>>()
        .join(" ")
}

fn nash_from_cnf(a: NashCnfArgs) -> anyhow::Result<()> {
    let formula = load_cnf(&a.cnf)?;
    let n = formula.n;
    let mut game = game_from_cnf(formula, a.players)?;
    let r = solve_nash(&mut game)?;
    println!("equilibrium: {}", r.profile);
    println!("best-response queries: {}", r.queries);
    let v = r.profile[0];
    if v >= 0 && r.profile.iter().all(|&c| c == v) {
        println!("assignment: {}", assignment_text(&bits_of(v as u64, n)));
    }
    if a.brute_force {
        print_nash_set(&mut game, &r.profile)?;
    }
    Ok(())
}

fn sat(a: SatArgs) -> anyhow::Result<()> {
    let formula = load_cnf(&a.cnf)?;
    let probe = sat_probe(&formula, a.d)?;
    println!("{}", if probe.satisfiable() { "satisfiable" } else { "unsatisfiable" });
    println!("greatest fixed point: {}", probe.greatest);
    if let Some(bits) = &probe.assignment {
        println!("assignment: {}", assignment_text(bits));
    }
    println!("queries: {}", probe.queries);
    Ok(())
}

fn rational_vector(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

fn print_hull(hull: &LatticeHull) {
    println!("x_max: {}", rational_vector(&hull.x_max));
    println!("x_min: {}", rational_vector(&hull.x_min));
    println!("D(P): {}", BoxLattice::new(hull.lower.clone(), hull.upper.clone()).map_or_else(|e| e.to_string(), |b| b.to_string()));
}

fn polytope(a: PolytopeArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&a.input)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", a.input.display())))?;
    let p = Polytope::from_json(&text)?;
    let how = match a.lp {
        StepLp::Product => RangeLp::Product,
        StepLp::Separate => RangeLp::Separate,
    };
    match a.action {
        PolytopeAction::Eval => {
            let x = a
                .point
                .ok_or_else(|| Error::Usage("--action eval needs --point".into()))?;
            if x.dim() != p.dim() {
                bail!(Error::DimensionMismatch { expected: p.dim(), got: x.dim() });
            }
            match a.mode {
                Order::Cw => {
                    let hull = componentwise_hull(&p)?;
                    print_hull(&hull);
                    let xr: Vec<Rational> = x.iter().map(|&v| int(v)).collect();
                    println!("d{x} = {}", rational_vector(&d_map(&p, &hull, &xr)?));
                    println!("h{x} = {}", h_componentwise(&p, &hull, &x)?);
                }
                Order::Lex => {
                    let hull = lexicographic_hull(&p)?;
                    print_hull(&hull);
                    println!("h{x} = {}", h_lexicographic(&p, &hull, &x, how)?);
                }
            }
        }
        PolytopeAction::FindIntegerPoint => {
            let found = match a.mode {
                Order::Cw => integer_point_via_fixed_point(&p)?,
                Order::Lex => integer_point_via_lexicographic(&p, how)?,
            };
            match found {
                Some(x) => println!("integer point: {x}"),
                None => println!("no integer point"),
            }
        }
    }
    Ok(())
}

enum Adversary {
    Line(LineAdversary),
    Aux(AuxAdversary),
}

impl Adversary {
    fn parse(spec: &str) -> anyhow::Result<(Self, Point)> {
        let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
        match kind {
            "line-adv" => {
                let n: u64 = arg
                    .parse()
                    .map_err(|_| Error::Usage(format!("line length {arg:?} is not a positive integer")))?;
                Ok((Adversary::Line(LineAdversary::new(n)?), Point::from([0])))
            }
            "aux-adv" => {
                let upper: Point = arg.parse()?;
                let zero = Point::splat(0, upper.dim());
                Ok((Adversary::Aux(AuxAdversary::new(&upper)?), zero))
            }
            _ => bail!(Error::Usage(format!("adversary-report needs line-adv:<N> or aux-adv:<N1,...>, got {spec:?}"))),
        }
    }

    fn oracle(&mut self) -> &mut dyn MonotoneOracle {
        match self {
            Adversary::Line(a) => a,
            Adversary::Aux(a) => a,
        }
    }

    fn asked(&self) -> usize {
        match self {
            Adversary::Line(a) => a.queries().len(),
            Adversary::Aux(a) => a.queries().len(),
        }
    }

    /// The second fixed point the adversary could still plant after the
    /// first `k` distinct queries of the recorded run.
    fn hideable_after(&self, k: usize) -> tarski_core::Result<Option<Point>> {
        match self {
            Adversary::Line(a) => {
                let replay = LineAdversary::with_queries(a.length(), a.queries()[..k].iter().copied())?;
                line_can_hide_second(&replay)
            }
            Adversary::Aux(a) => {
                let upper = a.domain().upper().clone();
                let replay = AuxAdversary::with_queries(&upper, a.queries()[..k].iter().cloned())?;
                aux_can_hide_second(&replay)
            }
        }
    }
}

fn adversary(a: AdversaryArgs) -> anyhow::Result<()> {
    let (mut adv, zero) = Adversary::parse(&a.oracle)?;
    let domain = adv.oracle().domain().clone();
    let report = is_unique_fixed_point(adv.oracle(), &zero)?;
    let asked = adv.asked();
    println!("unique={}", report.unique);
    println!("queries: {} (budget {})", report.queries, uniqueness_budget(&domain));
    println!("lattice: {domain}, {} points", domain.size());
    // More answers never make hiding easier, so the first pinned prefix can
    // be found by bisection.
    let (mut lo, mut hi) = (0, asked);
    if adv.hideable_after(asked)?.is_some() {
        println!("a second fixed point is still hideable after all {asked} queries");
    } else {
        while lo < hi {
            let mid = (lo + hi) / 2;
            if adv.hideable_after(mid)?.is_some() {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        println!("second fixed point hideable until {lo} distinct queries");
    }
    if let Some(k) = a.budget {
        let k = k.min(asked);
        match adv.hideable_after(k)? {
            Some(x) => println!("after {k} queries: hideable at {x}"),
            None => println!("after {k} queries: pinned"),
        }
    }
    Ok(())
}

fn bench(a: BenchArgs) -> anyhow::Result<()> {
    let d = a.d.unwrap_or(match a.algorithm {
        Algorithm::Lex | Algorithm::Unique => 1,
        _ => 2,
    });
    let plan = Plan {
        algorithm: a.algorithm,
        instance: a.instance,
        d,
        sizes: a.sizes,
        seeds: (a.seed_start..a.seed_start + a.seeds).collect(),
    };
    let rows = plan.run()?;
    match &a.csv {
        Some(path) => {
            csv_out::append(path, &rows)?;
            let worst = rows.iter().map(|r| r.queries).max().unwrap_or(0);
            println!("{} rows appended to {} (max queries {worst})", rows.len(), path.display());
        }
        None => csv_out::write_rows(std::io::stdout().lock(), &rows, true)?,
    }
    Ok(())
}

fn first_witness(pairs: &[(Point, Point)], f: &mut dyn MonotoneOracle) -> Witness {
    let (x, y) = pairs[0].clone();
    Witness { fx: f.raw_eval(&x), fy: f.raw_eval(&y), x, y }
}

fn verify(a: VerifyArgs) -> anyhow::Result<()> {
    let order: OrderRelation = a.oracle.order.into();
    let mut built = a.oracle.build()?;
    let f = built.oracle.as_mut();
    let domain = f.domain().clone();
    let violations = monotone_violations_exhaustive(f, order)?;
    if !violations.is_empty() {
        let witness = first_witness(&violations, f);
        bail!(Error::Contract(tarski_core::Violation {
            reason: format!("{} order-breaking pairs", violations.len()),
            witness: Some(witness),
        }));
    }
    let mut fixed = brute_force_fixed_points(f)?;
    fixed.sort_by_key(|x| domain.rank(x).expect("inside"));
    println!("lattice: {domain}, {} points", domain.size());
    println!("fixed points: {}", fixed.len());

    let r = solve(&mut Session::new(f), order, SolveOptions::default())?;
    let found = fixed.contains(&r.fixed_point);
    println!("solver: {} in {} queries ({})", r.fixed_point, r.queries, if found { "ok" } else { "MISMATCH" });

    let report = match order {
        OrderRelation::Componentwise => is_unique_fixed_point(f, &r.fixed_point)?,
        OrderRelation::Lexicographic => lexicographic_uniqueness_scan(f)?,
    };
    let extremes = fixed.first() == Some(&report.least) && fixed.last() == Some(&report.greatest);
    let unique_ok = report.unique == (fixed.len() == 1);
    println!(
        "uniqueness: least {}, greatest {}, unique={} ({})",
        report.least,
        report.greatest,
        report.unique,
        if extremes && unique_ok { "ok" } else { "MISMATCH" }
    );
    if !(found && extremes && unique_ok) {
        bail!("verification failed");
    }
    Ok(())
}
