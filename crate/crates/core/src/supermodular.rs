//! Supermodular games: least best responses, equilibrium search with
//! `O(log N₁ ⋯ log N_{d−1})` best-response queries, and the game built from
//! a CNF formula in which deciding uniqueness of the equilibrium is hard.
//!
//! With increasing differences the least best-response map `B̲` is
//! order-preserving, and its fixed points are pure Nash equilibria. Unlike a
//! general monotone map, `B̲ᵢ` ignores `sᵢ`; the two-player search exploits
//! this to spend only two queries per halving of the first player's range.

use std::collections::HashMap;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::lattice::{floor_mid, BoxLattice, OrderRelation, Point};
use crate::oracle::{first_violation, gen_structured_monotone, QueryLog, StructuredOracle, BRUTE_FORCE_LIMIT};
use crate::rational::{parse_rational, Rational};
use crate::sat::{CnfFormula, LexCnfOracle};
use crate::solver::ceil_log2;

/// Most quadruple checks `check_increasing_differences` will run.
pub const DIFFERENCE_CHECK_LIMIT: u128 = 1_000_000;

/// Payoffs `uᵢ(s)` for every player `i` and profile `s`.
pub trait Utility {
    fn utility(&self, player: usize, profile: &[i64]) -> Rational;

    /// Least maximizer of `uᵢ(·, s₋ᵢ)`; `profile[player]` is ignored.
    fn least_best_response(&self, strategies: &BoxLattice, player: usize, profile: &[i64]) -> i64 {
        let mut s = profile.to_vec();
        let mut best: Option<(Rational, i64)> = None;
        for t in strategies.lower()[player]..=strategies.upper()[player] {
            s[player] = t;
            let u = self.utility(player, &s);
            if best.as_ref().is_none_or(|(b, _)| u > *b) {
                best = Some((u, t));
            }
        }
        best.expect("nonempty strategy range").1
    }
}

/// A best-response map given only as a black box: component `i` of the
/// answer is `B̲ᵢ(s₋ᵢ)`.
pub trait BestResponseOracle {
    fn respond(&mut self, profile: &Point) -> Point;
}

pub enum Payoff {
    Utility(Box<dyn Utility>),
    BestResponse(Box<dyn BestResponseOracle>),
}

pub struct Game {
    strategies: BoxLattice,
    payoff: Payoff,
}

/// Explicit tables, one per player, indexed by profile rank.
#[derive(Debug, Clone)]
pub struct TableUtility {
    strategies: BoxLattice,
    tables: Vec<Vec<Rational>>,
}

impl TableUtility {
    pub fn new(strategies: BoxLattice, tables: Vec<Vec<Rational>>) -> Result<Self> {
        let d = strategies.dim();
        if tables.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: tables.len(),
            });
        }
        if tables.iter().any(|t| t.len() as u128 != strategies.size()) {
            return Err(Error::Usage(format!(
                "every utility table needs {} entries",
                strategies.size()
            )));
        }
        Ok(TableUtility { strategies, tables })
    }

    /// Tabulates `u(i, s)` over every profile.
    pub fn tabulate(strategies: BoxLattice, u: impl Fn(usize, &[i64]) -> Rational) -> Result<Self> {
        if strategies.size() > BRUTE_FORCE_LIMIT {
            return Err(Error::Capacity(format!(
                "utility tables limited to {BRUTE_FORCE_LIMIT} profiles"
            )));
        }
        let tables = (0..strategies.dim())
            .map(|i| strategies.points().map(|s| u(i, &s)).collect())
            .collect();
        TableUtility::new(strategies, tables)
    }
}

impl Utility for TableUtility {
    fn utility(&self, player: usize, profile: &[i64]) -> Rational {
        let r = self.strategies.rank(profile).expect("profile inside the strategy box");
        self.tables[player][r as usize].clone()
    }
}

/// `uᵢ(s) = −(sᵢ − gᵢ(s₋ᵢ))²` for a monotone target map `g` that ignores
/// `sᵢ`. Increasing differences hold because `gᵢ` is nondecreasing, and the
/// least best response is `gᵢ(s₋ᵢ)` itself.
#[derive(Debug, Clone)]
pub struct TrackingUtility {
    targets: StructuredOracle,
}

impl TrackingUtility {
    pub fn new(targets: StructuredOracle) -> Self {
        TrackingUtility {
            targets: targets.without_self_dependence(),
        }
    }
}

impl Utility for TrackingUtility {
    fn utility(&self, player: usize, profile: &[i64]) -> Rational {
        let gap = profile[player] as i128 - self.targets.eval_coord(player, profile) as i128;
        -Rational::from_integer(BigInt::from(gap * gap))
    }

    fn least_best_response(&self, _: &BoxLattice, player: usize, profile: &[i64]) -> i64 {
        self.targets.eval_coord(player, profile)
    }
}

impl Game {
    pub fn new(strategies: BoxLattice, payoff: Payoff) -> Self {
        Game { strategies, payoff }
    }

    pub fn from_utility(strategies: BoxLattice, utility: impl Utility + 'static) -> Self {
        Game::new(strategies, Payoff::Utility(Box::new(utility)))
    }

    pub fn from_tables(strategies: BoxLattice, tables: Vec<Vec<Rational>>) -> Result<Self> {
        let t = TableUtility::new(strategies.clone(), tables)?;
        Ok(Game::from_utility(strategies, t))
    }

    /// Rejects the game unless increasing differences hold everywhere.
    pub fn validated(self) -> Result<Self> {
        let violations = check_increasing_differences(&self)?;
        if let Some(v) = violations.first() {
            return Err(Error::contract(
                format!(
                    "{} violations of increasing differences, first: {v}",
                    violations.len()
                ),
                None,
            ));
        }
        Ok(self)
    }

    /// Quadratic tracking game around a seeded monotone target map.
    pub fn tracking(seed: u64, strategies: &BoxLattice) -> Result<Self> {
        let targets = gen_structured_monotone(seed, strategies)?;
        Ok(Game::from_utility(strategies.clone(), TrackingUtility::new(targets)))
    }

    pub fn strategies(&self) -> &BoxLattice {
        &self.strategies
    }

    pub fn players(&self) -> usize {
        self.strategies.dim()
    }

    pub fn payoff(&self) -> &Payoff {
        &self.payoff
    }

    /// Loads a game from JSON: `players`, `ranges` (`[low, high]` pairs) and
    /// either `tables` (player-major arrays nested by strategy, entries as
    /// numbers or `"p/q"` strings) or `cnf` (`{"path": ..., "d": ...}`, the
    /// path relative to `base`).
    pub fn from_json(text: &str, base: &Path) -> Result<Self> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
        let field = |name: &str| {
            v.get(name)
                .ok_or_else(|| Error::Usage(format!("game file lacks `{name}`")))
        };
        if let Some(cnf) = v.get("cnf") {
            let path = cnf
                .get("path")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Usage("`cnf.path` must be a string".into()))?;
            let d = cnf
                .get("d")
                .or_else(|| v.get("players"))
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Usage("`cnf.d` must be a positive integer".into()))?;
            let formula = CnfFormula::from_file(&base.join(path), false)?;
            return game_from_cnf(formula, d as usize);
        }
        let players = field("players")?
            .as_u64()
            .ok_or_else(|| Error::Usage("`players` must be a positive integer".into()))?
            as usize;
        let ranges = field("ranges")?
            .as_array()
            .ok_or_else(|| Error::Usage("`ranges` must be an array".into()))?;
        if ranges.len() != players {
            return Err(Error::DimensionMismatch {
                expected: players,
                got: ranges.len(),
            });
        }
        let mut lower = Vec::with_capacity(players);
        let mut upper = Vec::with_capacity(players);
        for r in ranges {
            let pair = r.as_array().filter(|p| p.len() == 2);
            let bounds = pair.and_then(|p| Some((p[0].as_i64()?, p[1].as_i64()?)));
            let (lo, hi) =
                bounds.ok_or_else(|| Error::Usage(format!("range {r} is not [low, high]")))?;
            lower.push(lo);
            upper.push(hi);
        }
        let strategies = BoxLattice::new(lower, upper)?;
        if strategies.size() > BRUTE_FORCE_LIMIT {
            return Err(Error::Capacity("table games limited to 2^20 profiles".into()));
        }
        let tables = field("tables")?
            .as_array()
            .ok_or_else(|| Error::Usage("`tables` must be an array".into()))?;
        if tables.len() != players {
            return Err(Error::DimensionMismatch {
                expected: players,
                got: tables.len(),
            });
        }
        let mut parsed = Vec::with_capacity(players);
        for t in tables {
            let mut flat = Vec::new();
            flatten_table(t, strategies.sides(), 0, &mut flat)?;
            parsed.push(flat);
        }
        Game::from_tables(strategies, parsed)?.validated()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
        Game::from_json(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

fn flatten_table(v: &Value, sides: &[u128], depth: usize, out: &mut Vec<Rational>) -> Result<()> {
    if depth == sides.len() {
        let r = match v {
            Value::Number(n) => parse_rational(&n.to_string())?,
            Value::String(s) => parse_rational(s)?,
            other => return Err(Error::Usage(format!("utility entry {other} is not a number"))),
        };
        out.push(r);
        return Ok(());
    }
    let items = v
        .as_array()
        .filter(|a| a.len() as u128 == sides[depth])
        .ok_or_else(|| {
            Error::Usage(format!("table level {depth} must have {} entries", sides[depth]))
        })?;
    for item in items {
        flatten_table(item, sides, depth + 1, out)?;
    }
    Ok(())
}

/// A failure of `uᵢ(s′ᵢ, s′₋ᵢ) − uᵢ(sᵢ, s′₋ᵢ) ≥ uᵢ(s′ᵢ, s₋ᵢ) − uᵢ(sᵢ, s₋ᵢ)`,
/// reported on adjacent strategies: `low = (sᵢ, s₋ᵢ)`, `high = (sᵢ + 1, s₋ᵢ + e_j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceViolation {
    pub player: usize,
    pub low: Point,
    pub high: Point,
}

impl std::fmt::Display for DifferenceViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "player {} between {} and {}", self.player + 1, self.low, self.high)
    }
}

/// Increasing differences on a product of chains hold everywhere iff they
/// hold for adjacent own strategies and covering steps of the opponents, so
/// only those quadruples are checked.
pub fn check_increasing_differences(game: &Game) -> Result<Vec<DifferenceViolation>> {
    let Payoff::Utility(u) = &game.payoff else {
        return Err(Error::Unsupported(
            "increasing differences need utilities, not a best-response oracle".into(),
        ));
    };
    let s = &game.strategies;
    let d = s.dim();
    let checks = s.size() * (d as u128) * (d.saturating_sub(1) as u128);
    if checks > DIFFERENCE_CHECK_LIMIT {
        return Err(Error::Capacity(format!(
            "{checks} difference checks exceed the limit {DIFFERENCE_CHECK_LIMIT}"
        )));
    }
    let mut out = Vec::new();
    for x in s.points() {
        for i in 0..d {
            if x[i] == s.upper()[i] {
                continue;
            }
            let up_i = x.with_coord(i, x[i] + 1);
            let base = u.utility(i, &up_i) - u.utility(i, &x);
            for j in (0..d).filter(|&j| j != i && x[j] < s.upper()[j]) {
                let lo_j = x.with_coord(j, x[j] + 1);
                let hi_j = up_i.with_coord(j, x[j] + 1);
                let shifted = u.utility(i, &hi_j) - u.utility(i, &lo_j);
                if shifted < base {
                    out.push(DifferenceViolation {
                        player: i,
                        low: x.clone(),
                        high: hi_j,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Memoized access to `B̲`, checking that each `B̲ᵢ(s₋ᵢ)` never changes.
pub struct ResponseSession<'g> {
    game: &'g mut Game,
    memo: HashMap<(usize, Vec<i64>), i64>,
    log: QueryLog,
}

fn others(profile: &[i64], i: usize) -> Vec<i64> {
    let mut v = profile.to_vec();
    v.remove(i);
    v
}

impl<'g> ResponseSession<'g> {
    pub fn new(game: &'g mut Game) -> Self {
        ResponseSession {
            game,
            memo: HashMap::new(),
            log: QueryLog::new(),
        }
    }

    pub fn strategies(&self) -> &BoxLattice {
        &self.game.strategies
    }

    /// Distinct profiles at which `B̲` was queried.
    pub fn queries(&self) -> usize {
        self.log.len()
    }

    pub fn log(&self) -> &QueryLog {
        &self.log
    }

    pub fn query(&mut self, profile: &[i64]) -> Result<Point> {
        if let Some(b) = self.log.get(profile) {
            return Ok(b.clone());
        }
        let s = &self.game.strategies;
        if !s.contains(profile) {
            return Err(Error::Usage(format!(
                "profile {} outside the strategy box {s}",
                Point::from(profile)
            )));
        }
        let d = s.dim();
        let answer: Point = match &mut self.game.payoff {
            Payoff::Utility(u) => (0..d)
                .map(|i| {
                    *self
                        .memo
                        .entry((i, others(profile, i)))
                        .or_insert_with(|| u.least_best_response(s, i, profile))
                })
                .collect::<Vec<_>>()
                .into(),
            Payoff::BestResponse(oracle) => {
                let b = oracle.respond(&Point::from(profile));
                if b.dim() != d || !s.contains(&b) {
                    return Err(Error::contract(
                        format!("B({}) = {b} leaves the strategy box {s}", Point::from(profile)),
                        None,
                    ));
                }
                for i in 0..d {
                    let prev = *self.memo.entry((i, others(profile, i))).or_insert(b[i]);
                    if prev != b[i] {
                        return Err(Error::contract(
                            format!(
                                "inconsistent responses: player {} answered {prev} and then {} to the same opponents",
                                i + 1,
                                b[i]
                            ),
                            None,
                        ));
                    }
                }
                b
            }
        };
        self.log.record(Point::from(profile), answer.clone());
        Ok(answer)
    }

    /// `B̲ᵢ(s₋ᵢ)` for opponents' strategies given in player order without `i`.
    pub fn least_best_response(&mut self, player: usize, s_minus_i: &[i64]) -> Result<i64> {
        let s = &self.game.strategies;
        if player >= s.dim() || s_minus_i.len() + 1 != s.dim() {
            return Err(Error::DimensionMismatch {
                expected: s.dim().saturating_sub(1),
                got: s_minus_i.len(),
            });
        }
        if let Some(&v) = self.memo.get(&(player, s_minus_i.to_vec())) {
            return Ok(v);
        }
        let mut profile = s_minus_i.to_vec();
        profile.insert(player, s.lower()[player]);
        Ok(self.query(&profile)?[player])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NashResult {
    pub profile: Point,
    /// Distinct best-response profile queries.
    pub queries: usize,
}

/// A pure equilibrium, i.e. a profile with `B̲(s) = s`.
pub fn solve_nash(game: &mut Game) -> Result<NashResult> {
    let strategies = game.strategies.clone();
    let max_log = strategies.sides().iter().map(|&n| ceil_log2(n)).max().unwrap_or(0) as usize;
    let mut session = ResponseSession::new(game);
    let mut search = NashSearch {
        session: &mut session,
        depth_limit: strategies.dim() * (2 + max_log),
    };
    let profile = search.solve(&[], &strategies, 0)?;
    Ok(NashResult {
        profile,
        queries: session.queries(),
    })
}

struct NashSearch<'a, 'g> {
    session: &'a mut ResponseSession<'g>,
    depth_limit: usize,
}

impl NashSearch<'_, '_> {
    fn fail(&self, reason: String) -> Error {
        Error::contract(reason, first_violation(&self.session.log, OrderRelation::Componentwise))
    }

    fn probe(&mut self, suffix: &[i64], current: &BoxLattice, x: &[i64]) -> Result<Point> {
        let mut full = x.to_vec();
        full.extend_from_slice(suffix);
        let b = self.session.query(&full)?.truncated(x.len());
        if !current.contains(&b) {
            return Err(self.fail(format!(
                "B({}) = {b} escapes the invariant box {current}",
                Point::from(full)
            )));
        }
        Ok(b)
    }

    fn enter(&self, depth: usize) -> Result<()> {
        if depth > self.depth_limit {
            return Err(self.fail(format!(
                "recursion depth {depth} exceeds {}; responses suspected non-monotone",
                self.depth_limit
            )));
        }
        Ok(())
    }

    fn solve(&mut self, suffix: &[i64], current: &BoxLattice, depth: usize) -> Result<Point> {
        match current.dim() {
            1 => self.single(suffix, current),
            2 => self.pair(suffix, current.clone(), depth),
            _ => self.slices(suffix, current.clone(), depth),
        }
    }

    /// One free player: its response does not depend on its own strategy.
    fn single(&mut self, suffix: &[i64], current: &BoxLattice) -> Result<Point> {
        let lo = current.lower().clone();
        let b = self.probe(suffix, current, &lo)?;
        if b != lo {
            let again = self.probe(suffix, current, &b)?;
            if again != b {
                return Err(self.fail(format!(
                    "player response moved from {b} to {again} with unchanged opponents"
                )));
            }
        }
        Ok(b)
    }

    fn pair(&mut self, suffix: &[i64], mut current: BoxLattice, mut depth: usize) -> Result<Point> {
        loop {
            self.enter(depth)?;
            depth += 1;
            let s1 = floor_mid(current.lower()[0], current.upper()[0]);
            let first = self.probe(suffix, &current, &[s1, current.lower()[1]])?;
            let y = first[1];
            let second = self.probe(suffix, &current, &[s1, y])?;
            if second[1] != y {
                return Err(self.fail(format!(
                    "second player answered {y} and then {} against {s1}",
                    second[1]
                )));
            }
            let x = second[0];
            let corner = Point::from([x, y]);
            match x.cmp(&s1) {
                std::cmp::Ordering::Equal => return Ok(corner),
                std::cmp::Ordering::Less => {
                    current = BoxLattice::new(current.lower().clone(), corner)?
                }
                std::cmp::Ordering::Greater => {
                    current = BoxLattice::new(corner, current.upper().clone())?
                }
            }
        }
    }

    fn slices(&mut self, suffix: &[i64], mut current: BoxLattice, mut depth: usize) -> Result<Point> {
        let d = current.dim();
        loop {
            self.enter(depth)?;
            depth += 1;
            let c = floor_mid(current.lower()[d - 1], current.upper()[d - 1]);
            let mut inner_suffix = vec![c];
            inner_suffix.extend_from_slice(suffix);
            let inner = self.solve(&inner_suffix, &current.slice_last()?, depth)?;
            let y = inner.extended(c);
            let b = self.probe(suffix, &current, &y)?;
            if b.truncated(d - 1) != inner {
                return Err(self.fail(format!(
                    "slice equilibrium {inner} not reproduced: B({y}) = {b}"
                )));
            }
            match b[d - 1].cmp(&c) {
                std::cmp::Ordering::Equal => return Ok(y),
                std::cmp::Ordering::Greater => current = BoxLattice::new(b, current.upper().clone())?,
                std::cmp::Ordering::Less => current = BoxLattice::new(current.lower().clone(), b)?,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NashSemantics {
    /// No player has a profitable unilateral deviation.
    NoProfitableDeviation,
    /// Fixed profiles of the least best-response map (a subset of equilibria).
    LeastResponseFixed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NashSet {
    pub profiles: Vec<Point>,
    pub semantics: NashSemantics,
}

/// Every pure equilibrium, in rank order.
pub fn brute_force_nash(game: &mut Game) -> Result<NashSet> {
    let s = game.strategies.clone();
    if s.size() > BRUTE_FORCE_LIMIT {
        return Err(Error::Capacity(format!(
            "brute-force Nash limited to {BRUTE_FORCE_LIMIT} profiles, got {}",
            s.size()
        )));
    }
    let d = s.dim();
    match &mut game.payoff {
        Payoff::Utility(u) => {
            let mut best: HashMap<(usize, Vec<i64>), Rational> = HashMap::new();
            let mut profiles = Vec::new();
            for x in s.points() {
                let stable = (0..d).all(|i| {
                    let top = best.entry((i, others(&x, i))).or_insert_with(|| {
                        let mut y = x.clone().into_coords();
                        (s.lower()[i]..=s.upper()[i])
                            .map(|t| {
                                y[i] = t;
                                u.utility(i, &y)
                            })
                            .max()
                            .unwrap_or_else(Rational::zero)
                    });
                    u.utility(i, &x) >= *top
                });
                if stable {
                    profiles.push(x);
                }
            }
            Ok(NashSet {
                profiles,
                semantics: NashSemantics::NoProfitableDeviation,
            })
        }
        Payoff::BestResponse(oracle) => Ok(NashSet {
            profiles: s.points().filter(|x| oracle.respond(x) == *x).collect(),
            semantics: NashSemantics::LeastResponseFixed,
        }),
    }
}

/// Whether no player gains by deviating from `profile`.
pub fn is_nash(game: &Game, profile: &[i64]) -> Result<bool> {
    let Payoff::Utility(u) = &game.payoff else {
        return Err(Error::Unsupported("deviation check needs utilities".into()));
    };
    let s = &game.strategies;
    if !s.contains(profile) {
        return Err(Error::OutOfRange(format!("{} outside {s}", Point::from(profile))));
    }
    let mut y = profile.to_vec();
    for i in 0..s.dim() {
        let current = u.utility(i, profile);
        for t in s.lower()[i]..=s.upper()[i] {
            y[i] = t;
            if u.utility(i, &y) > current {
                return Ok(false);
            }
        }
        y[i] = profile[i];
    }
    Ok(true)
}

/// Responses of the CNF game: every player answers the one-dimensional
/// reduction applied to the largest opposing strategy.
pub struct CnfResponses {
    line: LexCnfOracle,
}

impl BestResponseOracle for CnfResponses {
    fn respond(&mut self, profile: &Point) -> Point {
        (0..profile.dim())
            .map(|i| {
                let j = others(profile, i).into_iter().max().unwrap_or(-1);
                self.line.step(j)
            })
            .collect::<Vec<_>>()
            .into()
    }
}

/// The `d`-player game on `{−1, …, 2ⁿ − 1}^d` whose equilibria other than
/// all-`(−1)` are diagonal profiles encoding satisfying assignments.
pub fn game_from_cnf(formula: CnfFormula, d: usize) -> Result<Game> {
    if d < 3 {
        return Err(Error::Unsupported(format!(
            "the CNF game needs at least 3 players, got {d}"
        )));
    }
    let line = LexCnfOracle::new(formula)?;
    let top = line.domain_top();
    let strategies = BoxLattice::new(Point::splat(-1, d), Point::splat(top, d))?;
    Ok(Game::new(
        strategies,
        Payoff::BestResponse(Box::new(CnfResponses { line })),
    ))
}

/// A seeded table game with increasing differences: pairwise products of
/// nondecreasing step functions with nonnegative weights, plus an arbitrary
/// own-strategy term and an arbitrary opponents-only term. Small integer
/// values produce plenty of ties.
pub fn gen_supermodular_table_game(seed: u64, strategies: &BoxLattice) -> Result<Game> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5afe_9a3e);
    let d = strategies.dim();
    let lo = strategies.lower().clone();
    let sides: Vec<usize> = strategies.sides().iter().map(|&n| n as usize).collect();
    let monotone = |rng: &mut ChaCha8Rng, n: usize| -> Vec<i64> {
        let mut acc = 0;
        (0..n)
            .map(|_| {
                acc += if rng.gen_bool(0.5) { rng.gen_range(0..3) } else { 0 };
                acc
            })
            .collect()
    };
    let mut phi = vec![vec![Vec::new(); d]; d];
    let mut psi = vec![vec![Vec::new(); d]; d];
    let mut weight = vec![vec![0i64; d]; d];
    let mut own = Vec::with_capacity(d);
    for i in 0..d {
        for j in (0..d).filter(|&j| j != i) {
            weight[i][j] = rng.gen_range(0..3);
            phi[i][j] = monotone(&mut rng, sides[i]);
            psi[i][j] = monotone(&mut rng, sides[j]);
        }
        own.push((0..sides[i]).map(|_| rng.gen_range(-4..=4)).collect::<Vec<i64>>());
    }
    let noise_seed: u64 = rng.gen();
    let denom = rng.gen_range(1..=3);
    let u = TableUtility::tabulate(strategies.clone(), |i, s| {
        let idx = |k: usize| (s[k] - lo[k]) as usize;
        let mut total = own[i][idx(i)];
        for j in (0..d).filter(|&j| j != i) {
            total += weight[i][j] * phi[i][j][idx(i)] * psi[i][j][idx(j)];
        }
        // Opponents-only term: any function of s₋ᵢ keeps differences intact.
        let mut h = noise_seed ^ i as u64;
        for (k, &v) in s.iter().enumerate() {
            if k != i {
                h = (h ^ v as u64).wrapping_mul(0x100_0000_01b3);
            }
        }
        total += (h % 5) as i64;
        Rational::new(BigInt::from(total), BigInt::from(denom))
    })?;
    Ok(Game::from_utility(strategies.clone(), u))
}
