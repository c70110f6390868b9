//! Bounded-resource unfolding: saturating resource arithmetic, the product
//! of states with resource vectors plus a depletion sink, and the projection
//! between plays of the base arena and plays of the unfolding.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::{self, Write as _};

use crate::arena::{
    check_bounds, fmt_vec, Arena, ArenaDoc, EdgeDoc, GameGraph, Lasso, ObjectivesDoc, PlayerId, StateDoc, StateIdx,
    RESERVED_ATOM,
};
use crate::atoms::{AtomTable, Valuation};
use crate::error::{Error, Result};
use crate::ltl::Ltl;

pub const DEFAULT_STATE_BUDGET: usize = 10_000_000;

/// `min(c_i + w_i, B_i)` per component. The result may be negative; the
/// caller decides whether that depletes.
pub fn saturating_add(c: &[i64], w: &[i64], bounds: &[i64]) -> Vec<i64> {
    c.iter()
        .zip(w)
        .zip(bounds)
        .map(|((&c, &w), &b)| c.saturating_add(w).min(b))
        .collect()
}

/// A state of the unfolding.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UState {
    Node { base: StateIdx, res: Vec<i64> },
    Bot,
}

impl UState {
    pub fn base(&self) -> Option<StateIdx> {
        match self {
            UState::Node { base, .. } => Some(*base),
            UState::Bot => None,
        }
    }

    pub fn resources(&self) -> Option<&[i64]> {
        match self {
            UState::Node { res, .. } => Some(res),
            UState::Bot => None,
        }
    }

    /// Document id: `state@c1,c2,…` or `BOT`.
    pub fn id(&self, a: &Arena) -> String {
        match self {
            UState::Node { base, res } => format!("{}@{}", a.id(*base), fmt_vec(res)),
            UState::Bot => "BOT".to_string(),
        }
    }

    /// Inverse of [`UState::id`].
    pub fn parse_id(a: &Arena, id: &str) -> Option<UState> {
        if id == "BOT" {
            return Some(UState::Bot);
        }
        let (state, res) = id.rsplit_once('@')?;
        let res = res
            .split(',')
            .map(|x| x.trim().parse().ok())
            .collect::<Option<Vec<i64>>>()?;
        Some(UState::Node {
            base: a.state(state)?,
            res,
        })
    }
}

/// Reachable part of the resource unfolding of an arena.
#[derive(Clone, Debug)]
pub struct UnfoldedArena<'a> {
    base: &'a Arena,
    bounds: Vec<i64>,
    states: Vec<UState>,
    index: HashMap<UState, usize>,
    succ: Vec<Vec<usize>>,
    owner: Vec<PlayerId>,
    labels: Vec<Valuation>,
    atoms: AtomTable,
    bot: Option<usize>,
    saturated_edges: usize,
    system: Ltl,
}

impl GameGraph for UnfoldedArena<'_> {
    fn num_states(&self) -> usize {
        self.states.len()
    }
    fn initial(&self) -> StateIdx {
        0
    }
    fn successors(&self, s: StateIdx) -> &[StateIdx] {
        &self.succ[s]
    }
    fn owner(&self, s: StateIdx) -> PlayerId {
        self.owner[s]
    }
    fn label(&self, s: StateIdx) -> Valuation {
        self.labels[s]
    }
    fn atoms(&self) -> &AtomTable {
        &self.atoms
    }
    fn players(&self) -> usize {
        self.base.players()
    }
    fn state_name(&self, s: StateIdx) -> String {
        self.states[s].id(self.base)
    }
}

/// Builds the reachable unfolding of `a` under capacities `bounds`, with the
/// default state budget.
pub fn unfold<'a>(a: &'a Arena, bounds: &[i64]) -> Result<UnfoldedArena<'a>> {
    unfold_with_budget(a, bounds, DEFAULT_STATE_BUDGET)
}

pub fn unfold_with_budget<'a>(a: &'a Arena, bounds: &[i64], budget: usize) -> Result<UnfoldedArena<'a>> {
    check_bounds(a.dimensions(), bounds)?;
    let mut atoms = a.atoms().clone();
    let bot_atom = atoms
        .insert(RESERVED_ATOM)
        .expect("arena validation keeps one atom slot free");

    let mut u = UnfoldedArena {
        base: a,
        bounds: bounds.to_vec(),
        states: Vec::new(),
        index: HashMap::new(),
        succ: Vec::new(),
        owner: Vec::new(),
        labels: Vec::new(),
        atoms,
        bot: None,
        saturated_edges: 0,
        system: a
            .system_objective()
            .clone()
            .and(Ltl::atom(RESERVED_ATOM).not().globally()),
    };
    let init = UState::Node {
        base: a.initial(),
        res: vec![0; a.dimensions()],
    };
    u.intern(init, budget)?;

    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        let UState::Node { base, res } = u.states[x].clone() else {
            continue;
        };
        let mut succ = Vec::new();
        let mut depletes = false;
        for (dst, cost) in a.out_edges(base) {
            let next = saturating_add(&res, cost, bounds);
            if next.iter().any(|&v| v < 0) {
                depletes = true;
                continue;
            }
            if res
                .iter()
                .zip(cost)
                .zip(bounds)
                .any(|((&c, &w), &b)| c.saturating_add(w) > b)
            {
                u.saturated_edges += 1;
            }
            let before = u.states.len();
            let id = u.intern(UState::Node { base: dst, res: next }, budget)?;
            if u.states.len() > before {
                queue.push_back(id);
            }
            succ.push(id);
        }
        if depletes {
            let before = u.states.len();
            let id = u.intern(UState::Bot, budget)?;
            if u.states.len() > before {
                u.succ[id] = vec![id];
                u.labels[id] = Valuation::EMPTY.with(bot_atom);
                u.bot = Some(id);
            }
            succ.push(id);
        }
        u.succ[x] = succ;
    }
    Ok(u)
}

impl<'a> UnfoldedArena<'a> {
    fn intern(&mut self, s: UState, budget: usize) -> Result<usize> {
        if let Some(&i) = self.index.get(&s) {
            return Ok(i);
        }
        if self.states.len() >= budget {
            return Err(Error::StateBudget { limit: budget });
        }
        let i = self.states.len();
        let (owner, label) = match &s {
            UState::Node { base, .. } => (self.base.owner(*base), self.base.label(*base)),
            UState::Bot => (1, Valuation::EMPTY),
        };
        self.index.insert(s.clone(), i);
        self.states.push(s);
        self.succ.push(Vec::new());
        self.owner.push(owner);
        self.labels.push(label);
        Ok(i)
    }

    pub fn base(&self) -> &'a Arena {
        self.base
    }

    pub fn bounds(&self) -> &[i64] {
        &self.bounds
    }

    pub fn state(&self, i: usize) -> &UState {
        &self.states[i]
    }

    pub fn states(&self) -> &[UState] {
        &self.states
    }

    pub fn index_of(&self, s: &UState) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Index of the depletion sink, when it is reachable.
    pub fn bot(&self) -> Option<usize> {
        self.bot
    }

    pub fn is_bot(&self, i: usize) -> bool {
        self.bot == Some(i)
    }

    pub fn num_edges(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    /// Number of unfolded edges on which some capacity clipped the sum.
    pub fn saturated_edges(&self) -> usize {
        self.saturated_edges
    }

    /// The lifted global objective: `Obj & G !bot`.
    pub fn system_objective(&self) -> &Ltl {
        &self.system
    }

    pub fn objective(&self, i: PlayerId) -> &Ltl {
        self.base.objective(i)
    }

    /// Maps an unfolded history back to the base arena.
    pub fn project(&self, h: &[usize]) -> Result<Vec<StateIdx>> {
        h.iter()
            .map(|&x| {
                self.states[x]
                    .base()
                    .ok_or_else(|| Error::InvalidHistory("history visits the depletion sink".into()))
            })
            .collect()
    }

    /// Maps a base history to the unfolding, failing at the first prefix
    /// that drives some resource below zero.
    pub fn lift(&self, h: &[StateIdx]) -> Result<Vec<usize>> {
        let trace = bounded_trace(self.base, h, &self.bounds)?;
        Ok(h.iter()
            .zip(trace)
            .map(|(&base, res)| self.index[&UState::Node { base, res }])
            .collect())
    }

    /// The unfolding as an arena document without costs; the sink is `BOT`
    /// labelled with the reserved atom.
    pub fn to_document(&self) -> ArenaDoc {
        let a = self.base;
        let mut order: Vec<usize> = (0..self.states.len()).collect();
        let ids: Vec<String> = self.states.iter().map(|s| s.id(a)).collect();
        order.sort_by(|&x, &y| ids[x].cmp(&ids[y]));
        let zero = vec![0; a.dimensions()];
        let mut edges: Vec<EdgeDoc> = Vec::new();
        for &x in &order {
            for &y in &self.succ[x] {
                edges.push(EdgeDoc {
                    src: ids[x].clone(),
                    dst: ids[y].clone(),
                    cost: zero.clone(),
                });
            }
        }
        edges.sort_by(|e, f| (&e.src, &e.dst).cmp(&(&f.src, &f.dst)));
        ArenaDoc {
            players: a.players(),
            dimensions: a.dimensions(),
            bounds: None,
            atoms: self.atoms.names().to_vec(),
            states: order
                .iter()
                .map(|&x| StateDoc {
                    id: ids[x].clone(),
                    owner: self.owner[x],
                    labels: self
                        .atoms
                        .names_of(self.labels[x])
                        .into_iter()
                        .map(String::from)
                        .collect(),
                })
                .collect(),
            initial: ids[0].clone(),
            edges,
            objectives: ObjectivesDoc {
                system: self.system.to_string(),
                players: (1..=a.players()).map(|p| (p, a.objective(p).to_string())).collect(),
            },
        }
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph unfolded {\n  rankdir=LR;\n");
        for x in 0..self.states.len() {
            let id = self.state_name(x);
            let shape = if self.is_bot(x) { "doubleoctagon" } else { "ellipse" };
            let _ = writeln!(
                out,
                "  \"{id}\" [label=\"{id}\\nP{}\", shape={shape}{}];",
                self.owner[x],
                if x == 0 { ", penwidth=2" } else { "" }
            );
        }
        for x in 0..self.states.len() {
            for &y in &self.succ[x] {
                let _ = writeln!(out, "  \"{}\" -> \"{}\";", self.state_name(x), self.state_name(y));
            }
        }
        out.push_str("}\n");
        out
    }

    /// Counts by kind, for reports.
    pub fn stats(&self) -> UnfoldStats {
        let mut per_base: BTreeMap<StateIdx, usize> = BTreeMap::new();
        for s in &self.states {
            if let Some(b) = s.base() {
                *per_base.entry(b).or_default() += 1;
            }
        }
        UnfoldStats {
            states: self.states.len(),
            edges: self.num_edges(),
            bot_reachable: self.bot.is_some(),
            saturated_edges: self.saturated_edges,
            product_bound: product_bound(self.base, &self.bounds),
            max_per_base_state: per_base.values().copied().max().unwrap_or(0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnfoldStats {
    pub states: usize,
    pub edges: usize,
    pub bot_reachable: bool,
    pub saturated_edges: usize,
    /// `|S| · ∏ (B_i + 1) + 1`, saturating at `u128::MAX`.
    pub product_bound: u128,
    pub max_per_base_state: usize,
}

impl fmt::Display for UnfoldStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} states, {} edges, sink {}, bound {}",
            self.states,
            self.edges,
            if self.bot_reachable { "reachable" } else { "unreachable" },
            self.product_bound
        )
    }
}

/// `|S| · ∏ (B_i + 1) + 1`.
pub fn product_bound(a: &Arena, bounds: &[i64]) -> u128 {
    bounds
        .iter()
        .fold(a.num_states() as u128, |acc, &b| acc.saturating_mul(b as u128 + 1))
        .saturating_add(1)
}

/// Saturated resource vector at every position of a base history, or the
/// first depleting prefix as an error.
pub fn bounded_trace(a: &Arena, h: &[StateIdx], bounds: &[i64]) -> Result<Vec<Vec<i64>>> {
    check_bounds(a.dimensions(), bounds)?;
    match h.first() {
        Some(&s) if s == a.initial() => {}
        _ => return Err(Error::InvalidHistory("history must start at the initial state".into())),
    }
    let mut cur = vec![0; a.dimensions()];
    let mut out = vec![cur.clone()];
    for (k, w) in h.windows(2).enumerate() {
        let cost = a
            .edge_cost(w[0], w[1])
            .ok_or_else(|| Error::InvalidHistory(format!("no edge {} -> {}", a.id(w[0]), a.id(w[1]))))?;
        cur = saturating_add(&cur, cost, bounds);
        if let Some(i) = cur.iter().position(|&v| v < 0) {
            return Err(Error::Underflow {
                prefix_len: k + 2,
                resource: i + 1,
                value: cur[i],
            });
        }
        out.push(cur.clone());
    }
    Ok(out)
}

/// Lifts a base lasso to the unfolding: the stem is lifted, then the cycle is
/// unrolled until a (cycle position, resource vector) pair repeats. Returns
/// `None` when some prefix depletes a resource.
pub fn lift_lasso(a: &Arena, l: &Lasso, bounds: &[i64]) -> Result<Option<(Vec<UState>, Vec<UState>)>> {
    l.validate(a)?;
    check_bounds(a.dimensions(), bounds)?;
    let mut cur = vec![0i64; a.dimensions()];
    let mut seq = vec![UState::Node {
        base: l.at(0),
        res: cur.clone(),
    }];
    let mut seen: HashMap<(usize, Vec<i64>), usize> = HashMap::new();
    let mut pos = 0;
    loop {
        if pos >= l.stem.len() {
            let key = (pos - l.stem.len(), cur.clone());
            if let Some(&first) = seen.get(&key) {
                seq.pop();
                let cycle = seq.split_off(first);
                return Ok(Some((seq, cycle)));
            }
            seen.insert(key, seq.len() - 1);
        }
        let next_pos = if pos + 1 < l.len() { pos + 1 } else { l.stem.len() };
        let cost = a.edge_cost(l.at(pos), l.at(next_pos)).expect("validated");
        cur = saturating_add(&cur, cost, bounds);
        if cur.iter().any(|&v| v < 0) {
            return Ok(None);
        }
        seq.push(UState::Node {
            base: l.at(next_pos),
            res: cur.clone(),
        });
        pos = next_pos;
    }
}

/// Bounded multi-energy: the saturated resource vector never drops below
/// zero along the play.
pub fn multi_energy_check_bounded(a: &Arena, l: &Lasso, bounds: &[i64]) -> Result<bool> {
    Ok(lift_lasso(a, l, bounds)?.is_some())
}
