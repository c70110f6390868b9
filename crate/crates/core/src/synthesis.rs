//! Careful cooperative rational synthesis on the bounded unfolding.
//!
//! An outcome ρ of the unfolding is the outcome of a Nash equilibrium iff
//! every player either wins on ρ or never moves on ρ from a state where it
//! could win alone against everybody else. Off the outcome, the coalition of
//! the other players punishes the first deviator with a winning strategy of
//! the corresponding zero-sum game. [`solve`] guesses the set of winners,
//! removes the forbidden states of the others and looks for an outcome with
//! a Büchi emptiness check; [`check_certificate`] re-verifies a profile
//! along an independent route (every region recomputed by parity solving on
//! a DPA product).

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arena::{canonical_lasso, Arena, GameGraph, Lasso, PlayerId, StateIdx};
use crate::buchi::AcceptGraph;
use crate::error::{Error, Result};
use crate::ltl::{classify_fragment, eval_on_lasso, to_nba, BoundNba, FragmentClass, Ltl};
use crate::unfolding::{unfold_with_budget, UState, UnfoldedArena, DEFAULT_STATE_BUDGET};
use crate::zerosum::{
    dpa_product, fragment_dpa, punish_region, solve_parity, BoundDpa, Dpa, DpaProduct, Punishment, ZeroSumGame,
};

pub const DEFAULT_PRODUCT_BUDGET: usize = 5_000_000;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Cap on reachable unfolded states.
    pub state_budget: usize,
    /// Cap on states of any automaton product.
    pub product_budget: usize,
    /// Deterministic parity automata for players whose objective is outside
    /// the supported fragments.
    pub dpas: BTreeMap<PlayerId, Dpa>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            state_budget: DEFAULT_STATE_BUDGET,
            product_budget: DEFAULT_PRODUCT_BUDGET,
            dpas: BTreeMap::new(),
        }
    }
}

/// Key of a punishment table entry: an unfolded state, plus the state of
/// the deviator's objective monitor when its objective depends on history.
pub type PunishKey = (UState, Option<String>);

/// Certificate of a solution.
///
/// The outcome lives in the unfolding. After the first deviation by player
/// `i`, the others follow `punishment[i]`; moves not covered by a table are
/// irrelevant to the equilibrium property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyProfile {
    pub bounds: Vec<i64>,
    pub stem: Vec<UState>,
    pub cycle: Vec<UState>,
    pub winners: BTreeSet<PlayerId>,
    pub punishment: BTreeMap<PlayerId, BTreeMap<PunishKey, UState>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinnerSetFailure {
    pub winners: Vec<PlayerId>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    Solution(StrategyProfile),
    NoSolution(Vec<WinnerSetFailure>),
    Unsupported(String),
}

impl SolveResult {
    pub fn profile(&self) -> Option<&StrategyProfile> {
        match self {
            SolveResult::Solution(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_solution(&self) -> bool {
        matches!(self, SolveResult::Solution(_))
    }
}

// ---------------------------------------------------------------------------
// witness search

/// States to keep off the outcome.
enum Avoid<'p> {
    Set(&'p [bool]),
    /// States owned by the player inside its winning region, tracked with
    /// its monitor when the region depends on history.
    Player(&'p Punishment),
}

/// Shortest lasso of `u` avoiding the depletion sink and `forbidden` whose
/// label word satisfies every formula in `required`.
pub fn find_witness_lasso(
    u: &UnfoldedArena,
    required: &[Ltl],
    forbidden: &[bool],
    product_budget: usize,
) -> Result<Option<Lasso>> {
    let nbas = required
        .iter()
        .map(|f| Ok(to_nba(f).bind(u.atoms())?))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&BoundNba> = nbas.iter().collect();
    search(u, &refs, &[Avoid::Set(forbidden)], product_budget)
}

fn search(u: &UnfoldedArena, nbas: &[&BoundNba], avoid: &[Avoid], budget: usize) -> Result<Option<Lasso>> {
    let monitors: Vec<(&Punishment, &BoundDpa)> = avoid
        .iter()
        .filter_map(|a| match a {
            Avoid::Player(p) => p.monitor.as_ref().map(|m| (*p, &m.dpa)),
            Avoid::Set(_) => None,
        })
        .collect();
    let allowed = |s: usize, ms: &[usize]| -> bool {
        if u.is_bot(s) {
            return false;
        }
        let mut k = 0;
        for a in avoid {
            match a {
                Avoid::Set(set) => {
                    if set[s] {
                        return false;
                    }
                }
                Avoid::Player(p) => {
                    let q = p.monitor.as_ref().map(|_| {
                        k += 1;
                        ms[k - 1]
                    });
                    if u.owner(s) == p.player && p.forbids(s, q) {
                        return false;
                    }
                }
            }
        }
        true
    };
    let acc_sets: Vec<usize> = (0..nbas.len()).filter(|&j| !nbas[j].all_accepting()).collect();
    if acc_sets.len() > 64 {
        return Err(Error::ProductBudget { limit: budget });
    }

    // node key: [state, nba states..., monitor states...]
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut keys: Vec<Vec<usize>> = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |key: Vec<usize>, keys: &mut Vec<Vec<usize>>, queue: &mut VecDeque<usize>| -> Result<usize> {
        if let Some(&i) = index.get(&key) {
            return Ok(i);
        }
        if keys.len() >= budget {
            return Err(Error::ProductBudget { limit: budget });
        }
        let i = keys.len();
        index.insert(key.clone(), i);
        keys.push(key);
        queue.push_back(i);
        Ok(i)
    };

    let s0 = u.initial();
    let m0: Vec<usize> = monitors.iter().map(|(_, d)| d.step(d.initial, u.label(s0))).collect();
    if !allowed(s0, &m0) {
        return Ok(None);
    }
    let mut roots = Vec::new();
    for qs in combinations(&nbas.iter().map(|b| b.initial.clone()).collect::<Vec<_>>()) {
        let mut key = vec![s0];
        key.extend(qs);
        key.extend(&m0);
        roots.push(intern(key, &mut keys, &mut queue)?);
    }
    let k = nbas.len();
    while let Some(i) = queue.pop_front() {
        let key = keys[i].clone();
        let s = key[0];
        let letter = u.label(s);
        let next: Vec<Vec<usize>> = (0..k).map(|j| nbas[j].step(key[1 + j], letter).collect()).collect();
        let mut out = Vec::new();
        if next.iter().all(|v| !v.is_empty()) {
            let combos = combinations(&next);
            for &d in u.successors(s) {
                let ms: Vec<usize> = monitors
                    .iter()
                    .enumerate()
                    .map(|(x, (_, dpa))| dpa.step(key[1 + k + x], u.label(d)))
                    .collect();
                if !allowed(d, &ms) {
                    continue;
                }
                for qs in &combos {
                    let mut nk = Vec::with_capacity(key.len());
                    nk.push(d);
                    nk.extend(qs);
                    nk.extend(&ms);
                    out.push(intern(nk, &mut keys, &mut queue)?);
                }
            }
        }
        if succ.len() <= i {
            succ.resize(i + 1, Vec::new());
        }
        succ[i] = out;
    }
    succ.resize(keys.len(), Vec::new());
    let acc = keys
        .iter()
        .map(|key| {
            acc_sets
                .iter()
                .enumerate()
                .filter(|&(_, &j)| nbas[j].accepting[key[1 + j]])
                .fold(0u64, |m, (bit, _)| m | 1 << bit)
        })
        .collect();
    let graph = AcceptGraph {
        succ,
        acc,
        num_sets: acc_sets.len(),
        roots,
    };
    Ok(graph.find_lasso().map(|l| {
        let stem: Vec<usize> = l.stem.iter().map(|&n| keys[n][0]).collect();
        let cycle: Vec<usize> = l.cycle.iter().map(|&n| keys[n][0]).collect();
        let (stem, cycle) = canonical_lasso(stem, cycle);
        Lasso::new(stem, cycle)
    }))
}

fn combinations(sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for set in sets {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                set.iter().map(move |&x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

// ---------------------------------------------------------------------------
// solving

/// Winner sets by decreasing size, lexicographic within a size.
pub fn winner_set_order(players: usize) -> Vec<Vec<PlayerId>> {
    let mut sets: Vec<Vec<PlayerId>> = (0u64..1 << players)
        .map(|m| (1..=players).filter(|&p| m >> (p - 1) & 1 == 1).collect())
        .collect();
    sets.sort_by(|a: &Vec<PlayerId>, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    sets
}

/// Decides careful cooperative rational synthesis under `bounds`, falling
/// back to the bounds stored in the arena. Without any bounds the problem is
/// undecidable and [`Error::Unbounded`] is returned.
pub fn solve(a: &Arena, bounds: Option<&[i64]>, opts: &SolveOptions) -> Result<SolveResult> {
    let bounds = bounds.or(a.bounds()).ok_or(Error::Unbounded)?.to_vec();
    let u = unfold_with_budget(a, &bounds, opts.state_budget)?;
    solve_unfolded(&u, opts)
}

pub fn solve_unfolded(u: &UnfoldedArena, opts: &SolveOptions) -> Result<SolveResult> {
    let a = u.base();
    let n = a.players();
    for i in 1..=n {
        if !opts.dpas.contains_key(&i) && classify_fragment(a.objective(i)) == FragmentClass::General {
            return Ok(SolveResult::Unsupported(format!(
                "objective of player {i} ({}) is outside the reachability, safety, Büchi and \
                 co-Büchi fragments; supply a deterministic parity automaton for it",
                a.objective(i)
            )));
        }
    }
    let punishments = (1..=n)
        .into_par_iter()
        .map(|i| punish_region(u, i, a.objective(i), opts.dpas.get(&i), opts.product_budget))
        .collect::<Result<Vec<Punishment>>>()?;

    let bind = |f: &Ltl| -> Result<BoundNba> { Ok(to_nba(f).bind(u.atoms())?) };
    let system = bind(u.system_objective())?;
    let player_nbas = (1..=n).map(|i| bind(a.objective(i))).collect::<Result<Vec<_>>>()?;

    let order = winner_set_order(n);
    let found = order
        .par_iter()
        .map(|w| {
            let mut nbas = vec![&system];
            nbas.extend(w.iter().map(|&i| &player_nbas[i - 1]));
            let avoid: Vec<Avoid> = (1..=n)
                .filter(|i| !w.contains(i))
                .map(|i| Avoid::Player(&punishments[i - 1]))
                .collect();
            search(u, &nbas, &avoid, opts.product_budget)
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    match found {
        Some(Ok(Some(lasso))) => Ok(SolveResult::Solution(build_profile(u, &lasso, &punishments)?)),
        Some(Err(e)) => Err(e),
        Some(Ok(None)) => unreachable!(),
        None => Ok(SolveResult::NoSolution(
            order
                .into_iter()
                .map(|w| {
                    let others: Vec<String> = (1..=n)
                        .filter(|i| !w.contains(i))
                        .map(|i| format!("S_{i} ∩ Win_{i}"))
                        .collect();
                    let mut req = vec!["Obj".to_string(), "G !bot".to_string()];
                    req.extend(w.iter().map(|i| format!("Obj_{i}")));
                    let reason = if others.is_empty() {
                        format!("no outcome satisfies {}", req.join(" ∧ "))
                    } else {
                        format!(
                            "no outcome satisfies {} while avoiding {}",
                            req.join(" ∧ "),
                            others.join(", ")
                        )
                    };
                    WinnerSetFailure { winners: w, reason }
                })
                .collect(),
        )),
    }
}

/// Pairs of (position, monitor state) visited by the outcome, in order of
/// first visit, until the walk repeats.
fn monitor_walk(
    word_at: impl Fn(usize) -> crate::atoms::Valuation,
    stem: usize,
    cycle: usize,
    dpa: &BoundDpa,
) -> Vec<(usize, usize)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut q = dpa.step(dpa.initial, word_at(0));
    let mut pos = 0;
    while seen.insert((pos, q)) {
        out.push((pos, q));
        let next = if pos + 1 < stem + cycle { pos + 1 } else { stem };
        q = dpa.step(q, word_at(next));
        pos = next;
    }
    out
}

fn build_profile(u: &UnfoldedArena, lasso: &Lasso, punishments: &[Punishment]) -> Result<StrategyProfile> {
    let a = u.base();
    let word = lasso.word(u);
    let mut winners = BTreeSet::new();
    for i in 1..=a.players() {
        if eval_on_lasso(a.objective(i), u.atoms(), &word)? {
            winners.insert(i);
        }
    }
    let positions: Vec<usize> = lasso.positions().collect();
    let (ls, lc) = (lasso.stem.len(), lasso.cycle.len());
    let next_of = |pos: usize| if pos + 1 < ls + lc { pos + 1 } else { ls };

    let mut punishment = BTreeMap::new();
    for p in punishments.iter().filter(|p| !winners.contains(&p.player)) {
        let i = p.player;
        let mut table = BTreeMap::new();
        match &p.monitor {
            None => {
                let mut seen = vec![false; u.num_states()];
                let mut stack = Vec::new();
                for pos in 0..positions.len() {
                    let s = positions[pos];
                    if u.owner(s) != i {
                        continue;
                    }
                    for &d in u.successors(s) {
                        if d != positions[next_of(pos)] && !seen[d] {
                            seen[d] = true;
                            stack.push(d);
                        }
                    }
                }
                while let Some(s) = stack.pop() {
                    if u.is_bot(s) {
                        continue;
                    }
                    let moves: Vec<usize> = if u.owner(s) == i {
                        u.successors(s).to_vec()
                    } else {
                        let m = p.punish_move(u, s, None).ok_or_else(|| missing(u, i, s))?;
                        table.insert((u.state(s).clone(), None), u.state(m).clone());
                        vec![m]
                    };
                    for d in moves {
                        if !seen[d] {
                            seen[d] = true;
                            stack.push(d);
                        }
                    }
                }
            }
            Some(m) => {
                let prod = &m.product;
                let mut seen = vec![false; prod.pairs.len()];
                let mut stack = Vec::new();
                let walk = monitor_walk(|pos| u.label(positions[pos]), ls, lc, &m.dpa);
                for &(pos, q) in &walk {
                    let s = positions[pos];
                    if u.owner(s) != i {
                        continue;
                    }
                    for &d in u.successors(s) {
                        if d == positions[next_of(pos)] {
                            continue;
                        }
                        let t = prod.get(d, m.dpa.step(q, u.label(d))).expect("closed product");
                        if !seen[t] {
                            seen[t] = true;
                            stack.push(t);
                        }
                    }
                }
                while let Some(x) = stack.pop() {
                    let (s, q) = prod.pairs[x];
                    if u.is_bot(s) {
                        continue;
                    }
                    let moves: Vec<usize> = if u.owner(s) == i {
                        prod.game.successors(x).to_vec()
                    } else {
                        let y = p.regions.antagonist_strategy[x].ok_or_else(|| missing(u, i, s))?;
                        table.insert(
                            (u.state(s).clone(), Some(m.dpa.names[q].clone())),
                            u.state(prod.pairs[y].0).clone(),
                        );
                        vec![y]
                    };
                    for y in moves {
                        if !seen[y] {
                            seen[y] = true;
                            stack.push(y);
                        }
                    }
                }
            }
        }
        punishment.insert(i, table);
    }
    Ok(StrategyProfile {
        bounds: u.bounds().to_vec(),
        stem: lasso.stem.iter().map(|&s| u.state(s).clone()).collect(),
        cycle: lasso.cycle.iter().map(|&s| u.state(s).clone()).collect(),
        winners,
        punishment,
    })
}

fn missing(u: &UnfoldedArena, i: PlayerId, s: usize) -> Error {
    Error::MalformedProfile(format!(
        "no punishing move for player {i} at {}; the deviation analysis is inconsistent",
        u.state_name(s)
    ))
}

// ---------------------------------------------------------------------------
// profiles

impl StrategyProfile {
    /// Outcome projected to the base arena, with the resource vector at
    /// every position.
    pub fn base_lasso(&self) -> Lasso {
        let base = |v: &[UState]| v.iter().map(|s| s.base().expect("outcome avoids the sink")).collect();
        Lasso {
            stem: base(&self.stem),
            cycle: base(&self.cycle),
            trace: Some(
                self.stem
                    .iter()
                    .chain(&self.cycle)
                    .map(|s| s.resources().expect("outcome avoids the sink").to_vec())
                    .collect(),
            ),
        }
    }

    pub fn to_document(&self, a: &Arena) -> ProfileDoc {
        let ids = |v: &[UState]| v.iter().map(|s| s.id(a)).collect::<Vec<_>>();
        let base = self.base_lasso();
        let names = |v: &[StateIdx]| v.iter().map(|&s| a.id(s).to_string()).collect::<Vec<_>>();
        ProfileDoc {
            bounds: self.bounds.clone(),
            outcome: OutcomeDoc {
                stem: ids(&self.stem),
                cycle: ids(&self.cycle),
                trace: base.trace.clone().unwrap_or_default(),
                projection: ProjectionDoc {
                    stem: names(&base.stem),
                    cycle: names(&base.cycle),
                },
            },
            winners: self.winners.iter().copied().collect(),
            punishment: self
                .punishment
                .iter()
                .map(|(&i, t)| {
                    (
                        i,
                        t.iter()
                            .map(|((s, q), d)| PunishDoc {
                                state: s.id(a),
                                monitor: q.clone(),
                                to: d.id(a),
                            })
                            .collect(),
                    )
                })
                .collect(),
        }
    }

    pub fn to_json(&self, a: &Arena) -> String {
        serde_json::to_string_pretty(&self.to_document(a)).expect("serializable")
    }

    /// Parses a profile document. Only the structure is checked here; use
    /// [`check_certificate`] for the equilibrium property.
    pub fn from_document(a: &Arena, doc: &ProfileDoc) -> Result<StrategyProfile> {
        let bad = |m: String| Error::MalformedProfile(m);
        let parse = |id: &str| UState::parse_id(a, id).ok_or_else(|| bad(format!("unknown unfolded state `{id}`")));
        let parse_all = |v: &[String]| v.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>();
        let stem = parse_all(&doc.outcome.stem)?;
        let cycle = parse_all(&doc.outcome.cycle)?;
        if stem.is_empty() || cycle.is_empty() {
            return Err(bad("outcome needs a nonempty stem and loop".into()));
        }
        let p = StrategyProfile {
            bounds: doc.bounds.clone(),
            stem,
            cycle,
            winners: doc.winners.iter().copied().collect(),
            punishment: doc
                .punishment
                .iter()
                .map(|(&i, entries)| {
                    let t = entries
                        .iter()
                        .map(|e| Ok(((parse(&e.state)?, e.monitor.clone()), parse(&e.to)?)))
                        .collect::<Result<BTreeMap<_, _>>>()?;
                    Ok((i, t))
                })
                .collect::<Result<_>>()?,
        };
        if p.winners
            .iter()
            .chain(p.punishment.keys())
            .any(|&i| i == 0 || i > a.players())
        {
            return Err(bad("player index out of range".into()));
        }
        if p.stem
            .iter()
            .chain(&p.cycle)
            .any(|s| s.resources().is_some_and(|r| r.len() != a.dimensions()))
        {
            return Err(bad("resource vector arity".into()));
        }
        let base = p.base_lasso();
        let names = |v: &[StateIdx]| v.iter().map(|&s| a.id(s).to_string()).collect::<Vec<_>>();
        if names(&base.stem) != doc.outcome.projection.stem
            || names(&base.cycle) != doc.outcome.projection.cycle
            || base.trace.as_ref() != Some(&doc.outcome.trace)
        {
            return Err(bad("projection or trace disagrees with the unfolded outcome".into()));
        }
        Ok(p)
    }

    /// Accepts a bare profile document or a solve result carrying one.
    pub fn from_json(a: &Arena, text: &str) -> Result<StrategyProfile> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(Error::json)?;
        // integer map keys only deserialize from text, not from a `Value`
        let doc: ProfileDoc = match value.get("verdict") {
            Some(v) if v == "solution" => serde_json::from_str(&value["profile"].to_string()).map_err(Error::json)?,
            Some(_) => return Err(Error::MalformedProfile("the solve result carries no profile".into())),
            None => serde_json::from_str(text).map_err(Error::json)?,
        };
        StrategyProfile::from_document(a, &doc)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDoc {
    pub bounds: Vec<i64>,
    pub outcome: OutcomeDoc,
    pub winners: Vec<PlayerId>,
    pub punishment: BTreeMap<PlayerId, Vec<PunishDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeDoc {
    pub stem: Vec<String>,
    #[serde(rename = "loop")]
    pub cycle: Vec<String>,
    pub trace: Vec<Vec<i64>>,
    pub projection: ProjectionDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionDoc {
    pub stem: Vec<String>,
    #[serde(rename = "loop")]
    pub cycle: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PunishDoc {
    pub state: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monitor: Option<String>,
    #[serde(rename = "move")]
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SolveResultDoc {
    Solution { profile: ProfileDoc },
    NoSolution { diagnostics: Vec<WinnerSetFailure> },
    Unsupported { reason: String },
}

impl SolveResult {
    pub fn to_document(&self, a: &Arena) -> SolveResultDoc {
        match self {
            SolveResult::Solution(p) => SolveResultDoc::Solution {
                profile: p.to_document(a),
            },
            SolveResult::NoSolution(d) => SolveResultDoc::NoSolution { diagnostics: d.clone() },
            SolveResult::Unsupported(r) => SolveResultDoc::Unsupported { reason: r.clone() },
        }
    }

    pub fn to_json(&self, a: &Arena) -> String {
        serde_json::to_string_pretty(&self.to_document(a)).expect("serializable")
    }
}

// ---------------------------------------------------------------------------
// certificate checking

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    BoundsMismatch {
        expected: Vec<i64>,
        got: Vec<i64>,
    },
    NotAPlay(String),
    Depletes,
    SystemObjective,
    WinnerNotSatisfied(PlayerId),
    /// The outcome visits a state of `player` from which it can deviate
    /// carefully and win.
    ProfitableDeviation {
        player: PlayerId,
        state: String,
    },
    MissingPunishment {
        player: PlayerId,
        state: String,
    },
    IllegalPunishment {
        player: PlayerId,
        state: String,
        to: String,
    },
    PunishmentFails {
        player: PlayerId,
        state: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BoundsMismatch { expected, got } => {
                write!(f, "profile was built for bounds {got:?}, checked against {expected:?}")
            }
            Violation::NotAPlay(m) => write!(f, "outcome is not a play of the unfolding: {m}"),
            Violation::Depletes => write!(f, "outcome depletes a resource"),
            Violation::SystemObjective => write!(f, "outcome violates the system objective"),
            Violation::WinnerNotSatisfied(i) => {
                write!(f, "player {i} is listed as a winner but its objective fails")
            }
            Violation::ProfitableDeviation { player, state } => write!(
                f,
                "player {player} visits {state} in S_{player} ∩ Win_{player} and can deviate profitably"
            ),
            Violation::MissingPunishment { player, state } => {
                write!(f, "no punishing move against player {player} at {state}")
            }
            Violation::IllegalPunishment { player, state, to } => {
                write!(
                    f,
                    "punishment against player {player} moves {state} -> {to}, which is not a coalition edge"
                )
            }
            Violation::PunishmentFails { player, state } => write!(
                f,
                "player {player} deviates to {state} and wins against the punishment table"
            ),
        }
    }
}

/// Re-verifies a profile from scratch: the outcome, the deviation condition
/// for every losing player, and the punishment tables (an exact check that
/// no deviation target is winning for the deviator once the coalition is
/// fixed to its table).
pub fn check_certificate(
    a: &Arena,
    bounds: &[i64],
    p: &StrategyProfile,
    opts: &SolveOptions,
) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    if p.bounds != bounds {
        out.push(Violation::BoundsMismatch {
            expected: bounds.to_vec(),
            got: p.bounds.clone(),
        });
        return Ok(out);
    }
    let u = unfold_with_budget(a, bounds, opts.state_budget)?;

    // outcome
    let idx = |s: &UState| u.index_of(s);
    let mut positions = Vec::new();
    for s in p.stem.iter().chain(&p.cycle) {
        match idx(s) {
            Some(i) => positions.push(i),
            None => {
                out.push(Violation::NotAPlay(format!("{} is not reachable", s.id(a))));
                return Ok(out);
            }
        }
    }
    let lasso = Lasso::new(positions[..p.stem.len()].to_vec(), positions[p.stem.len()..].to_vec());
    if let Err(e) = lasso.validate(&u) {
        out.push(Violation::NotAPlay(e.to_string()));
        return Ok(out);
    }
    if positions.iter().any(|&s| u.is_bot(s)) {
        out.push(Violation::Depletes);
    }
    let word = lasso.word(&u);
    if !eval_on_lasso(a.system_objective(), u.atoms(), &word)? {
        out.push(Violation::SystemObjective);
    }
    let (ls, lc) = (lasso.stem.len(), lasso.cycle.len());
    let next_of = |pos: usize| if pos + 1 < ls + lc { pos + 1 } else { ls };

    for i in 1..=a.players() {
        let sat = eval_on_lasso(a.objective(i), u.atoms(), &word)?;
        if p.winners.contains(&i) && !sat {
            out.push(Violation::WinnerNotSatisfied(i));
        }
        if sat {
            continue;
        }
        let dpa = match opts.dpas.get(&i) {
            Some(d) => d.clone(),
            None => fragment_dpa(&classify_fragment(a.objective(i))).ok_or_else(|| Error::UnsupportedObjective {
                player: i,
                formula: a.objective(i).to_string(),
            })?,
        };
        let dpa = dpa.bind(u.atoms())?;
        let g = ZeroSumGame::from_unfolded(&u, i);
        let prod = dpa_product(&g, &dpa, &[], opts.product_budget)?;
        let regions = solve_parity(&prod.game, &prod.priority)?;

        let walk = monitor_walk(|pos| u.label(positions[pos]), ls, lc, &dpa);
        let mut targets = Vec::new();
        for &(pos, q) in &walk {
            let s = positions[pos];
            if u.owner(s) != i || u.is_bot(s) {
                continue;
            }
            let x = prod.get(s, q).expect("closed product");
            if regions.win[x] {
                out.push(Violation::ProfitableDeviation {
                    player: i,
                    state: state_label(&u, &dpa, &prod, x),
                });
            }
            for &d in u.successors(s) {
                if d != positions[next_of(pos)] {
                    targets.push(prod.get(d, dpa.step(q, u.label(d))).expect("closed product"));
                }
            }
        }
        if out
            .iter()
            .any(|v| matches!(v, Violation::ProfitableDeviation { player, .. } if *player == i))
        {
            continue;
        }
        out.extend(check_table(&u, i, &dpa, &prod, p.punishment.get(&i), &targets));
    }
    Ok(out)
}

fn state_label(u: &UnfoldedArena, dpa: &BoundDpa, prod: &DpaProduct, x: usize) -> String {
    let (s, q) = prod.pairs[x];
    if dpa.num_states() > 1 {
        format!("{} [{}]", u.state_name(s), dpa.names[q])
    } else {
        u.state_name(s)
    }
}

fn check_table(
    u: &UnfoldedArena,
    i: PlayerId,
    dpa: &BoundDpa,
    prod: &DpaProduct,
    table: Option<&BTreeMap<PunishKey, UState>>,
    targets: &[usize],
) -> Vec<Violation> {
    let empty = BTreeMap::new();
    let table = table.unwrap_or(&empty);
    let lookup = |s: usize, q: usize| {
        let st = u.state(s).clone();
        table
            .get(&(st.clone(), Some(dpa.names[q].clone())))
            .or_else(|| table.get(&(st, None)))
    };
    let mut out = Vec::new();
    let mut fixed: Vec<Option<usize>> = vec![None; prod.pairs.len()];
    let mut seen = vec![false; prod.pairs.len()];
    let mut stack: Vec<usize> = Vec::new();
    for &t in targets {
        if !seen[t] {
            seen[t] = true;
            stack.push(t);
        }
    }
    while let Some(x) = stack.pop() {
        let (s, q) = prod.pairs[x];
        let moves: Vec<usize> = if u.is_bot(s) || u.owner(s) == i {
            prod.game.successors(x).to_vec()
        } else {
            let Some(to) = lookup(s, q) else {
                out.push(Violation::MissingPunishment {
                    player: i,
                    state: state_label(u, dpa, prod, x),
                });
                return out;
            };
            let y = prod
                .game
                .successors(x)
                .iter()
                .copied()
                .find(|&y| u.state(prod.pairs[y].0) == to);
            let Some(y) = y else {
                out.push(Violation::IllegalPunishment {
                    player: i,
                    state: state_label(u, dpa, prod, x),
                    to: to.id(u.base()),
                });
                return out;
            };
            fixed[x] = Some(y);
            vec![y]
        };
        for y in moves {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    let restricted = prod.game.restrict(&fixed);
    let regions = match solve_parity(&restricted, &prod.priority) {
        Ok(r) => r,
        Err(_) => unreachable!("priorities were accepted for the unrestricted game"),
    };
    for &t in targets {
        if regions.win[t] {
            out.push(Violation::PunishmentFails {
                player: i,
                state: state_label(u, dpa, prod, t),
            });
        }
    }
    out
}
