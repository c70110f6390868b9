//! Game arenas: the turn-based multi-player graph with cost vectors and
//! labels, its JSON document format, histories, lassos and cost arithmetic.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::atoms::{AtomTable, Valuation};
use crate::error::{Error, Result};
use crate::ltl::{eval_on_lasso, parse_ltl, LassoWord, Ltl};

/// 1-based player index.
pub type PlayerId = usize;
/// Index of a state in its graph.
pub type StateIdx = usize;

/// Atom reserved for the depletion sink of the unfolded arena.
pub const RESERVED_ATOM: &str = "bot";

/// Read access shared by the base and the unfolded arena.
pub trait GameGraph {
    fn num_states(&self) -> usize;
    fn initial(&self) -> StateIdx;
    fn successors(&self, s: StateIdx) -> &[StateIdx];
    fn owner(&self, s: StateIdx) -> PlayerId;
    fn label(&self, s: StateIdx) -> Valuation;
    fn atoms(&self) -> &AtomTable;
    fn players(&self) -> usize;
    fn state_name(&self, s: StateIdx) -> String;

    fn has_edge(&self, src: StateIdx, dst: StateIdx) -> bool {
        self.successors(src).contains(&dst)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub src: StateIdx,
    pub dst: StateIdx,
    pub cost: Vec<i64>,
}

/// A validated arena. Immutable once built.
#[derive(Clone, Debug)]
pub struct Arena {
    ids: Vec<String>,
    index: HashMap<String, StateIdx>,
    owner: Vec<PlayerId>,
    labels: Vec<Valuation>,
    atoms: AtomTable,
    initial: StateIdx,
    players: usize,
    dimensions: usize,
    bounds: Option<Vec<i64>>,
    edges: Vec<Edge>,
    succ: Vec<Vec<StateIdx>>,
    succ_edge: Vec<Vec<usize>>,
    system: Ltl,
    objectives: Vec<Ltl>,
}

impl GameGraph for Arena {
    fn num_states(&self) -> usize {
        self.ids.len()
    }
    fn initial(&self) -> StateIdx {
        self.initial
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
        self.players
    }
    fn state_name(&self, s: StateIdx) -> String {
        self.ids[s].clone()
    }
}

impl Arena {
    pub fn dimensions(&self) -> usize {
        self.dimensions
    }

    pub fn bounds(&self) -> Option<&[i64]> {
        self.bounds.as_deref()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn id(&self, s: StateIdx) -> &str {
        &self.ids[s]
    }

    pub fn state(&self, id: &str) -> Option<StateIdx> {
        self.index.get(id).copied()
    }

    pub fn system_objective(&self) -> &Ltl {
        &self.system
    }

    /// Objective of player `i` (1-based).
    pub fn objective(&self, i: PlayerId) -> &Ltl {
        &self.objectives[i - 1]
    }

    pub fn edge_cost(&self, src: StateIdx, dst: StateIdx) -> Option<&[i64]> {
        self.succ[src]
            .iter()
            .position(|&d| d == dst)
            .map(|k| self.edges[self.succ_edge[src][k]].cost.as_slice())
    }

    /// Outgoing edges of `s` as `(dst, cost)`, sorted by destination id.
    pub fn out_edges(&self, s: StateIdx) -> impl Iterator<Item = (StateIdx, &[i64])> {
        self.succ_edge[s]
            .iter()
            .map(|&e| (self.edges[e].dst, self.edges[e].cost.as_slice()))
    }

    /// Resolves state ids into a validated history.
    pub fn history(&self, ids: &[&str]) -> Result<History> {
        let states = ids
            .iter()
            .map(|id| {
                self.state(id)
                    .ok_or_else(|| Error::InvalidHistory(format!("unknown state `{id}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        History::new(self, states)
    }

    /// Resolves state ids into a validated lasso without trace.
    pub fn lasso(&self, stem: &[&str], cycle: &[&str]) -> Result<Lasso> {
        let resolve = |ids: &[&str]| -> Result<Vec<StateIdx>> {
            ids.iter()
                .map(|id| {
                    self.state(id)
                        .ok_or_else(|| Error::InvalidLasso(format!("unknown state `{id}`")))
                })
                .collect()
        };
        let l = Lasso::new(resolve(stem)?, resolve(cycle)?);
        l.validate(self)?;
        Ok(l)
    }

    pub fn to_document(&self) -> ArenaDoc {
        ArenaDoc {
            players: self.players,
            dimensions: self.dimensions,
            bounds: self.bounds.clone(),
            atoms: self.atoms.names().to_vec(),
            states: (0..self.ids.len())
                .map(|s| StateDoc {
                    id: self.ids[s].clone(),
                    owner: self.owner[s],
                    labels: self
                        .atoms
                        .names_of(self.labels[s])
                        .into_iter()
                        .map(String::from)
                        .collect(),
                })
                .collect(),
            initial: self.ids[self.initial].clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    src: self.ids[e.src].clone(),
                    dst: self.ids[e.dst].clone(),
                    cost: e.cost.clone(),
                })
                .collect(),
            objectives: ObjectivesDoc {
                system: self.system.to_string(),
                players: self
                    .objectives
                    .iter()
                    .enumerate()
                    .map(|(i, o)| (i + 1, o.to_string()))
                    .collect(),
            },
        }
    }

    /// Canonical JSON rendering; `parse_arena` of it yields an equal arena.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("arena document serialises")
    }

    pub fn with_bounds(mut self, bounds: Option<Vec<i64>>) -> Result<Arena> {
        if let Some(b) = &bounds {
            check_bounds(self.dimensions, b)?;
        }
        self.bounds = bounds;
        Ok(self)
    }

    /// Graphviz rendering; edges are annotated with their cost vectors.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph arena {\n  rankdir=LR;\n");
        for s in 0..self.ids.len() {
            let labels = self.atoms.names_of(self.labels[s]).join(",");
            let _ = writeln!(
                out,
                "  \"{}\" [label=\"{}\\nP{}{}\"{}];",
                self.ids[s],
                self.ids[s],
                self.owner[s],
                if labels.is_empty() {
                    String::new()
                } else {
                    format!(" {{{labels}}}")
                },
                if s == self.initial { ", penwidth=2" } else { "" }
            );
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"{}\"];",
                self.ids[e.src],
                self.ids[e.dst],
                fmt_vec(&e.cost)
            );
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn fmt_vec(v: &[i64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub(crate) fn check_bounds(dimensions: usize, bounds: &[i64]) -> Result<()> {
    if bounds.len() != dimensions {
        return Err(Error::BoundsArity {
            expected: dimensions,
            got: bounds.len(),
        });
    }
    if let Some(&b) = bounds.iter().find(|&&b| b < 0) {
        return Err(Error::NegativeBound(b));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// document format

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArenaDoc {
    pub players: usize,
    pub dimensions: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<i64>>,
    pub atoms: Vec<String>,
    pub states: Vec<StateDoc>,
    pub initial: String,
    pub edges: Vec<EdgeDoc>,
    pub objectives: ObjectivesDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub id: String,
    pub owner: PlayerId,
    #[serde(default)]
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub src: String,
    pub dst: String,
    pub cost: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectivesDoc {
    pub system: String,
    pub players: BTreeMap<PlayerId, String>,
}

/// Parses and validates an arena document.
pub fn parse_arena(text: &str) -> Result<Arena> {
    let doc: ArenaDoc = serde_json::from_str(text).map_err(Error::json)?;
    Arena::from_document(&doc)
}

impl Arena {
    pub fn from_document(doc: &ArenaDoc) -> Result<Arena> {
        let mut b = ArenaBuilder::new(doc.players, doc.dimensions);
        b.bounds = doc.bounds.clone();
        for a in &doc.atoms {
            b.atom(a);
        }
        for s in &doc.states {
            b.state(&s.id, s.owner, &s.labels.iter().map(String::as_str).collect::<Vec<_>>());
        }
        b.initial(&doc.initial);
        for e in &doc.edges {
            b.edge(&e.src, &e.dst, &e.cost);
        }
        let system = parse_ltl(&doc.objectives.system)?;
        b.system_objective(system);
        for (&p, text) in &doc.objectives.players {
            b.objective(p, parse_ltl(text)?);
        }
        b.build()
    }
}

// ---------------------------------------------------------------------------
// builder

/// Incremental construction of an [`Arena`]; all checks run in `build`.
#[derive(Clone, Debug, Default)]
pub struct ArenaBuilder {
    players: usize,
    dimensions: usize,
    pub bounds: Option<Vec<i64>>,
    atoms: Vec<String>,
    states: Vec<(String, PlayerId, Vec<String>)>,
    initial: Option<String>,
    edges: Vec<(String, String, Vec<i64>)>,
    system: Option<Ltl>,
    objectives: BTreeMap<PlayerId, Ltl>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(s, "true" | "false" | "X" | "U" | "F" | "G")
}

impl ArenaBuilder {
    pub fn new(players: usize, dimensions: usize) -> Self {
        ArenaBuilder {
            players,
            dimensions,
            ..Default::default()
        }
    }

    pub fn atom(&mut self, name: &str) -> &mut Self {
        self.atoms.push(name.to_string());
        self
    }

    pub fn state(&mut self, id: &str, owner: PlayerId, labels: &[&str]) -> &mut Self {
        self.states
            .push((id.to_string(), owner, labels.iter().map(|l| l.to_string()).collect()));
        self
    }

    pub fn initial(&mut self, id: &str) -> &mut Self {
        self.initial = Some(id.to_string());
        self
    }

    pub fn edge(&mut self, src: &str, dst: &str, cost: &[i64]) -> &mut Self {
        self.edges.push((src.to_string(), dst.to_string(), cost.to_vec()));
        self
    }

    pub fn system_objective(&mut self, phi: Ltl) -> &mut Self {
        self.system = Some(phi);
        self
    }

    pub fn objective(&mut self, player: PlayerId, phi: Ltl) -> &mut Self {
        self.objectives.insert(player, phi);
        self
    }

    pub fn build(&self) -> Result<Arena> {
        let bad = |m: String| Err(Error::InvalidArena(m));
        if self.players == 0 {
            return bad("at least one player is required".into());
        }
        if self.dimensions == 0 {
            return bad("at least one resource dimension is required".into());
        }
        if let Some(b) = &self.bounds {
            check_bounds(self.dimensions, b)?;
        }

        let mut atoms = AtomTable::new();
        for a in &self.atoms {
            if a == RESERVED_ATOM {
                return bad(format!("atom `{RESERVED_ATOM}` is reserved"));
            }
            if !is_identifier(a) {
                return bad(format!("atom `{a}` is not an identifier"));
            }
            if atoms.get(a).is_some() {
                return bad(format!("duplicate atom `{a}`"));
            }
            // one slot stays free for the depletion atom of the unfolding
            if atoms.len() + 1 == crate::atoms::MAX_ATOMS {
                return bad(format!("more than {} atoms", crate::atoms::MAX_ATOMS - 1));
            }
            atoms.insert(a);
        }

        let mut states: Vec<&(String, PlayerId, Vec<String>)> = self.states.iter().collect();
        states.sort_by(|a, b| a.0.cmp(&b.0));
        let mut index = HashMap::new();
        for (i, (id, owner, _)) in states.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return bad(format!("duplicate state `{id}`"));
            }
            if *owner == 0 || *owner > self.players {
                return bad(format!("state `{id}` has owner {owner} outside 1..={}", self.players));
            }
        }
        if states.is_empty() {
            return bad("arena has no states".into());
        }
        let mut labels = Vec::with_capacity(states.len());
        for (id, _, ls) in &states {
            match atoms.valuation(ls.iter().map(String::as_str)) {
                Ok(v) => labels.push(v),
                Err(a) => return bad(format!("state `{id}` carries unknown atom `{a}`")),
            }
        }

        let initial = match &self.initial {
            None => return bad("no initial state".into()),
            Some(id) => match index.get(id) {
                Some(&i) => i,
                None => return bad(format!("initial state `{id}` is not declared")),
            },
        };

        let mut edges = Vec::with_capacity(self.edges.len());
        let mut seen = HashSet::new();
        for (src, dst, cost) in &self.edges {
            let (Some(&s), Some(&d)) = (index.get(src), index.get(dst)) else {
                let missing = if index.contains_key(src) { dst } else { src };
                return bad(format!("edge {src} -> {dst} refers to undeclared state `{missing}`"));
            };
            if cost.len() != self.dimensions {
                return bad(format!(
                    "edge {src} -> {dst} has {} cost components, expected {}",
                    cost.len(),
                    self.dimensions
                ));
            }
            if !seen.insert((s, d)) {
                return bad(format!("duplicate edge {src} -> {dst}"));
            }
            edges.push(Edge {
                src: s,
                dst: d,
                cost: cost.clone(),
            });
        }
        edges.sort_by_key(|e| (e.src, e.dst));

        let mut succ = vec![Vec::new(); states.len()];
        let mut succ_edge = vec![Vec::new(); states.len()];
        for (k, e) in edges.iter().enumerate() {
            succ[e.src].push(e.dst);
            succ_edge[e.src].push(k);
        }
        if let Some(s) = succ.iter().position(Vec::is_empty) {
            return bad(format!("state without successor: `{}`", states[s].0));
        }

        let system = match &self.system {
            Some(phi) => phi.clone(),
            None => return bad("missing system objective".into()),
        };
        check_objective_atoms(&system, &atoms, "system")?;
        let mut objectives = Vec::with_capacity(self.players);
        for p in 1..=self.players {
            match self.objectives.get(&p) {
                Some(phi) => {
                    check_objective_atoms(phi, &atoms, &format!("player {p}"))?;
                    objectives.push(phi.clone());
                }
                None => return bad(format!("missing objective for player {p}")),
            }
        }
        if let Some(p) = self.objectives.keys().find(|&&p| p == 0 || p > self.players) {
            return bad(format!("objective given for unknown player {p}"));
        }

        Ok(Arena {
            ids: states.iter().map(|s| s.0.clone()).collect(),
            index,
            owner: states.iter().map(|s| s.1).collect(),
            labels,
            atoms,
            initial,
            players: self.players,
            dimensions: self.dimensions,
            bounds: self.bounds.clone(),
            edges,
            succ,
            succ_edge,
            system,
            objectives,
        })
    }
}

fn check_objective_atoms(phi: &Ltl, atoms: &AtomTable, whose: &str) -> Result<()> {
    if let Some(a) = phi.atoms().into_iter().find(|a| atoms.get(a).is_none()) {
        return Err(Error::InvalidArena(format!(
            "{whose} objective `{phi}` uses unknown atom `{a}`"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// histories and lassos

/// Nonempty, edge-consistent state sequence starting at the initial state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct History(Vec<StateIdx>);

impl History {
    pub fn new<G: GameGraph>(g: &G, states: Vec<StateIdx>) -> Result<History> {
        match states.first() {
            None => return Err(Error::InvalidHistory("empty history".into())),
            Some(&s) if s != g.initial() => {
                return Err(Error::InvalidHistory(format!(
                    "history starts at `{}`, not at the initial state",
                    g.state_name(s)
                )))
            }
            _ => {}
        }
        check_path(g, &states).map_err(Error::InvalidHistory)?;
        Ok(History(states))
    }

    pub fn states(&self) -> &[StateIdx] {
        &self.0
    }

    pub fn last(&self) -> StateIdx {
        *self.0.last().expect("nonempty")
    }
}

fn check_path<G: GameGraph>(g: &G, states: &[StateIdx]) -> std::result::Result<(), String> {
    if let Some(&s) = states.iter().find(|&&s| s >= g.num_states()) {
        return Err(format!("state index {s} out of range"));
    }
    for w in states.windows(2) {
        if !g.has_edge(w[0], w[1]) {
            return Err(format!("no edge {} -> {}", g.state_name(w[0]), g.state_name(w[1])));
        }
    }
    Ok(())
}

/// Ultimately periodic play `stem · cycle^ω`, optionally carrying the
/// resource vector reached at each of its `|stem| + |cycle|` positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub stem: Vec<StateIdx>,
    pub cycle: Vec<StateIdx>,
    pub trace: Option<Vec<Vec<i64>>>,
}

impl Lasso {
    pub fn new(stem: Vec<StateIdx>, cycle: Vec<StateIdx>) -> Lasso {
        Lasso {
            stem,
            cycle,
            trace: None,
        }
    }

    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// State at folded position `pos`.
    pub fn at(&self, pos: usize) -> StateIdx {
        if pos < self.stem.len() {
            self.stem[pos]
        } else {
            self.cycle[pos - self.stem.len()]
        }
    }

    pub fn positions(&self) -> impl Iterator<Item = StateIdx> + '_ {
        self.stem.iter().chain(self.cycle.iter()).copied()
    }

    /// Checks the shape against `g`; the trace is not inspected.
    pub fn validate<G: GameGraph>(&self, g: &G) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidLasso(m));
        if self.stem.is_empty() {
            return bad("empty stem".into());
        }
        if self.cycle.is_empty() {
            return bad("empty cycle".into());
        }
        if self.stem[0] != g.initial() {
            return bad("stem does not start at the initial state".into());
        }
        let mut path = self.stem.clone();
        path.extend(&self.cycle);
        path.push(self.cycle[0]);
        check_path(g, &path).map_err(Error::InvalidLasso)?;
        if let Some(t) = &self.trace {
            if t.len() != self.len() {
                return bad(format!("trace has {} entries for {} positions", t.len(), self.len()));
            }
        }
        Ok(())
    }

    /// Label word of the play.
    pub fn word<G: GameGraph>(&self, g: &G) -> LassoWord {
        LassoWord::new(
            self.stem.iter().map(|&s| g.label(s)).collect(),
            self.cycle.iter().map(|&s| g.label(s)).collect(),
        )
    }
}

/// Shortest representation of the same infinite sequence: primitive cycle,
/// then the shortest nonempty stem.
pub fn canonical_lasso<T: Clone + PartialEq>(mut stem: Vec<T>, mut cycle: Vec<T>) -> (Vec<T>, Vec<T>) {
    let n = cycle.len();
    if let Some(p) = (1..=n).find(|&p| n.is_multiple_of(p) && (p..n).all(|i| cycle[i] == cycle[i - p])) {
        cycle.truncate(p);
    }
    while stem.len() > 1 && stem.last() == cycle.last() {
        let x = stem.pop().unwrap();
        cycle.pop();
        cycle.insert(0, x);
    }
    if stem.is_empty() {
        stem.push(cycle[0].clone());
        cycle.rotate_left(1);
    }
    (stem, cycle)
}

// ---------------------------------------------------------------------------
// cost arithmetic

fn add_checked(acc: &mut [i64], w: &[i64]) -> Result<()> {
    for (i, (a, &x)) in acc.iter_mut().zip(w).enumerate() {
        *a = a.checked_add(x).ok_or(Error::CostOverflow { resource: i + 1 })?;
    }
    Ok(())
}

/// Componentwise sum of edge costs along `h` (no saturation).
pub fn cost_of_history(a: &Arena, h: &History) -> Result<Vec<i64>> {
    let mut acc = vec![0; a.dimensions];
    for w in h.states().windows(2) {
        let c = a
            .edge_cost(w[0], w[1])
            .ok_or_else(|| Error::InvalidHistory("history left the arena".into()))?;
        add_checked(&mut acc, c)?;
    }
    Ok(acc)
}

/// Cumulative cost at every position of `stem · cycle` plus the net cost of
/// one cycle traversal.
pub fn cumulative_costs(a: &Arena, l: &Lasso) -> Result<(Vec<Vec<i64>>, Vec<i64>)> {
    l.validate(a)?;
    let mut acc = vec![0; a.dimensions];
    let mut out = vec![acc.clone()];
    for pos in 1..l.len() {
        add_checked(&mut acc, a.edge_cost(l.at(pos - 1), l.at(pos)).expect("validated"))?;
        out.push(acc.clone());
    }
    let mut net = vec![0; a.dimensions];
    let c = &l.cycle;
    for k in 0..c.len() {
        add_checked(&mut net, a.edge_cost(c[k], c[(k + 1) % c.len()]).expect("validated"))?;
    }
    Ok((out, net))
}

/// Unbounded multi-energy: every prefix of the infinite play has
/// componentwise nonnegative cumulative cost.
pub fn multi_energy_check_unbounded(a: &Arena, l: &Lasso) -> Result<bool> {
    let (prefix, net) = cumulative_costs(a, l)?;
    Ok(prefix.iter().flatten().all(|&x| x >= 0) && net.iter().all(|&x| x >= 0))
}

/// 1 when the play satisfies the objective of player `i`, else 0.
pub fn payoff(a: &Arena, l: &Lasso, i: PlayerId) -> Result<u8> {
    l.validate(a)?;
    Ok(eval_on_lasso(a.objective(i), &a.atoms, &l.word(a))? as u8)
}

/// Players (1-based) whose objective holds on `l`.
pub fn satisfied_players(a: &Arena, word: &LassoWord) -> Result<BTreeSet<PlayerId>> {
    let mut out = BTreeSet::new();
    for p in 1..=a.players {
        if eval_on_lasso(a.objective(p), &a.atoms, word)? {
            out.insert(p);
        }
    }
    Ok(out)
}
