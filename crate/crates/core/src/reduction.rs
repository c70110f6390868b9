//! Counter automata and the two-player game encoding of their reachability
//! problem.
//!
//! [`build_game`] turns a 2-counter automaton Γ and a target location `t`
//! into an arena with two resources that mirror the counters. Player 1 picks
//! transitions; Player 2 owns the guard gadgets and the final zero test and
//! wins by deviating carefully whenever a guard or the zero test fails. A
//! careful solution exists exactly when the outcome encodes a run of Γ
//! reaching `(t, 0, 0)`, up to saturation at the chosen capacities.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::arena::{Arena, ArenaBuilder};
use crate::error::{Error, Result};
use crate::ltl::Ltl;

/// Per-counter guard `lo ≤ c ≤ up`; `up = None` stands for ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Guard {
    pub lo: i64,
    pub up: Option<i64>,
}

impl Guard {
    pub const FREE: Guard = Guard { lo: 0, up: None };

    pub fn holds(&self, c: i64) -> bool {
        self.lo <= c && self.up.is_none_or(|u| c <= u)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaTransition {
    pub src: usize,
    pub weights: Vec<i64>,
    pub guards: Vec<Guard>,
    pub dst: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterAutomaton {
    pub counters: usize,
    pub locations: Vec<String>,
    pub initial: usize,
    pub target: Option<usize>,
    pub transitions: Vec<CaTransition>,
}

/// A finite run: `locations[k]` with counter values `values[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterRun {
    pub locations: Vec<usize>,
    pub values: Vec<Vec<i64>>,
}

impl CounterRun {
    /// Number of transitions taken.
    pub fn len(&self) -> usize {
        self.locations.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest counter value along the run.
    pub fn max_value(&self) -> i64 {
        self.values.iter().flatten().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reachability {
    Witness(CounterRun),
    /// No witness among the explored configurations. `exhausted` is set
    /// when the reachable configuration space was finite and fully explored.
    Unknown {
        explored: usize,
        exhausted: bool,
    },
}

impl Reachability {
    pub fn witness(&self) -> Option<&CounterRun> {
        match self {
            Reachability::Witness(r) => Some(r),
            Reachability::Unknown { .. } => None,
        }
    }
}

// ---------------------------------------------------------------------------
// document

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterAutomatonDoc {
    pub counters: usize,
    pub locations: Vec<String>,
    pub initial: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub transitions: Vec<CaTransitionDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaTransitionDoc {
    pub src: String,
    pub dst: String,
    pub weights: Vec<i64>,
    /// One `[lo, up]` pair per counter, `up` an integer or `"omega"`.
    /// Omitted guards are `[0, "omega"]`.
    #[serde(default)]
    pub guards: Vec<(i64, UpperDoc)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UpperDoc {
    Finite(i64),
    Omega(String),
}

pub fn parse_counter_automaton(text: &str) -> Result<CounterAutomaton> {
    let doc: CounterAutomatonDoc = serde_json::from_str(text).map_err(Error::json)?;
    CounterAutomaton::from_document(&doc)
}

impl CounterAutomaton {
    pub fn from_document(doc: &CounterAutomatonDoc) -> Result<CounterAutomaton> {
        let bad = |m: String| Error::InvalidCounterAutomaton(m);
        let mut index = HashMap::new();
        for (i, l) in doc.locations.iter().enumerate() {
            if l.is_empty() || l.starts_with('$') {
                return Err(bad(format!("location name `{l}` is empty or starts with `$`")));
            }
            if index.insert(l.as_str(), i).is_some() {
                return Err(bad(format!("duplicate location `{l}`")));
            }
        }
        let find = |l: &str| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| bad(format!("unknown location `{l}`")))
        };
        let mut transitions = Vec::new();
        for t in &doc.transitions {
            let guards = if t.guards.is_empty() {
                vec![Guard::FREE; doc.counters]
            } else {
                t.guards
                    .iter()
                    .map(|(lo, up)| {
                        let up = match up {
                            UpperDoc::Finite(u) => Some(*u),
                            UpperDoc::Omega(w) if w == "omega" => None,
                            UpperDoc::Omega(w) => {
                                return Err(bad(format!("upper guard `{w}` is neither an integer nor \"omega\"")))
                            }
                        };
                        Ok(Guard { lo: *lo, up })
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            transitions.push(CaTransition {
                src: find(&t.src)?,
                weights: t.weights.clone(),
                guards,
                dst: find(&t.dst)?,
            });
        }
        let ca = CounterAutomaton {
            counters: doc.counters,
            locations: doc.locations.clone(),
            initial: find(&doc.initial)?,
            target: doc.target.as_deref().map(find).transpose()?,
            transitions,
        };
        ca.validate()?;
        Ok(ca)
    }

    pub fn to_document(&self) -> CounterAutomatonDoc {
        CounterAutomatonDoc {
            counters: self.counters,
            locations: self.locations.clone(),
            initial: self.locations[self.initial].clone(),
            target: self.target.map(|t| self.locations[t].clone()),
            transitions: self
                .transitions
                .iter()
                .map(|t| CaTransitionDoc {
                    src: self.locations[t.src].clone(),
                    dst: self.locations[t.dst].clone(),
                    weights: t.weights.clone(),
                    guards: t
                        .guards
                        .iter()
                        .map(|g| (g.lo, g.up.map_or(UpperDoc::Omega("omega".into()), UpperDoc::Finite)))
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("serializable")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidCounterAutomaton(m));
        if self.counters == 0 {
            return bad("at least one counter is required".into());
        }
        let n = self.locations.len();
        if self.initial >= n || self.target.is_some_and(|t| t >= n) {
            return bad("location index out of range".into());
        }
        for (k, t) in self.transitions.iter().enumerate() {
            if t.src >= n || t.dst >= n {
                return bad(format!("transition {k} has an endpoint out of range"));
            }
            if t.weights.len() != self.counters || t.guards.len() != self.counters {
                return bad(format!("transition {k} needs {} weights and guards", self.counters));
            }
            for g in &t.guards {
                if g.lo < 0 || g.up.is_some_and(|u| u < g.lo) {
                    return bad(format!("transition {k} has an empty or negative guard"));
                }
            }
        }
        Ok(())
    }

    /// Largest finite guard constant, 0 when there is none.
    pub fn max_guard(&self) -> i64 {
        self.transitions
            .iter()
            .flat_map(|t| &t.guards)
            .flat_map(|g| [Some(g.lo), g.up])
            .flatten()
            .max()
            .unwrap_or(0)
    }

    pub fn location(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l == name)
    }
}

// ---------------------------------------------------------------------------
// bounded simulation

/// Breadth-first search for a shortest run from `(l₀, 0⃗)` to `(target, 0⃗)`,
/// exploring at most `budget` configurations.
pub fn simulate_reachability(ca: &CounterAutomaton, target: usize, budget: usize) -> Result<Reachability> {
    ca.validate()?;
    if target >= ca.locations.len() {
        return Err(Error::InvalidCounterAutomaton("target out of range".into()));
    }
    if budget == 0 {
        return Err(Error::InvalidCounterAutomaton("budget must be positive".into()));
    }
    type Config = (usize, Vec<i64>);
    let start: Config = (ca.initial, vec![0; ca.counters]);
    let mut parent: HashMap<Config, Option<Config>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    let mut explored = 0;
    while let Some(cfg) = queue.pop_front() {
        explored += 1;
        if cfg.0 == target && cfg.1.iter().all(|&c| c == 0) {
            let mut path = vec![cfg.clone()];
            let mut cur = cfg;
            while let Some(Some(p)) = parent.get(&cur) {
                path.push(p.clone());
                cur = p.clone();
            }
            path.reverse();
            return Ok(Reachability::Witness(CounterRun {
                locations: path.iter().map(|c| c.0).collect(),
                values: path.into_iter().map(|c| c.1).collect(),
            }));
        }
        if explored >= budget {
            return Ok(Reachability::Unknown {
                explored,
                exhausted: false,
            });
        }
        for t in ca.transitions.iter().filter(|t| t.src == cfg.0) {
            if !t.guards.iter().zip(&cfg.1).all(|(g, &c)| g.holds(c)) {
                continue;
            }
            let next: Vec<i64> = cfg
                .1
                .iter()
                .zip(&t.weights)
                .map(|(&c, &w)| c.saturating_add(w))
                .collect();
            if next.iter().any(|&c| c < 0) {
                continue;
            }
            let key = (t.dst, next);
            if !parent.contains_key(&key) {
                parent.insert(key.clone(), Some(cfg.clone()));
                queue.push_back(key);
            }
        }
    }
    Ok(Reachability::Unknown {
        explored,
        exhausted: true,
    })
}

// ---------------------------------------------------------------------------
// game encoding

/// Reserved state names of the encoding.
pub const T_TEST: &str = "$t?";
pub const W1: &str = "$W1";
pub const W2: &str = "$W2";
pub const W2_PRIME: &str = "$W2'";

pub fn tau_enter(k: usize) -> String {
    format!("$tau>{k}")
}

pub fn tau_exit(k: usize) -> String {
    format!("$tau<{k}")
}

/// Encodes `(ca, target)` as a two-player arena with two resources.
///
/// Per transition `τ = (l, w⃗, g⃗, l′)`:
/// `l → τ_>` at cost 0; `τ_> → τ_<` at cost `−lo`, so a failed lower guard
/// depletes; `τ_< → l′` at cost `lo + w`; and for each finite upper guard
/// `τ_> → W_2` (counter 1) or `W_2′` (counter 2) at cost `−(up + 1)`, which
/// Player 2 can take carefully exactly when the guard fails. The target
/// additionally moves to `t?`, where Player 2 can leave carefully to `W_2`
/// or `W_2′` unless both counters are zero; otherwise the play ends in `W_1`.
/// Locations without transitions get a zero-cost self-loop so that the arena
/// is total.
pub fn build_game(ca: &CounterAutomaton, target: usize) -> Result<Arena> {
    ca.validate()?;
    if ca.counters != 2 {
        return Err(Error::InvalidCounterAutomaton(format!(
            "the encoding needs exactly 2 counters, got {}",
            ca.counters
        )));
    }
    if target >= ca.locations.len() {
        return Err(Error::InvalidCounterAutomaton("target out of range".into()));
    }
    let mut b = ArenaBuilder::new(2, 2);
    b.atom("w1").atom("w2");
    for l in &ca.locations {
        b.state(l, 1, &[]);
    }
    b.state(T_TEST, 2, &[])
        .state(W1, 1, &["w1"])
        .state(W2, 1, &["w2"])
        .state(W2_PRIME, 1, &["w2"]);
    b.initial(&ca.locations[ca.initial]);

    for (k, t) in ca.transitions.iter().enumerate() {
        let (enter, exit) = (tau_enter(k), tau_exit(k));
        b.state(&enter, 2, &[]).state(&exit, 2, &[]);
        let (g1, g2) = (t.guards[0], t.guards[1]);
        b.edge(&ca.locations[t.src], &enter, &[0, 0]);
        if let Some(up) = g1.up {
            b.edge(&enter, W2, &[-(up + 1), 0]);
        }
        if let Some(up) = g2.up {
            b.edge(&enter, W2_PRIME, &[0, -(up + 1)]);
        }
        b.edge(&enter, &exit, &[-g1.lo, -g2.lo]);
        b.edge(
            &exit,
            &ca.locations[t.dst],
            &[g1.lo + t.weights[0], g2.lo + t.weights[1]],
        );
    }
    let t = &ca.locations[target];
    b.edge(t, T_TEST, &[0, 0])
        .edge(T_TEST, W1, &[0, 0])
        .edge(T_TEST, W2, &[-1, 0])
        .edge(T_TEST, W2_PRIME, &[0, -1]);
    for s in [W1, W2, W2_PRIME] {
        b.edge(s, s, &[0, 0]);
    }
    for (l, name) in ca.locations.iter().enumerate() {
        if l != target && !ca.transitions.iter().any(|t| t.src == l) {
            b.edge(name, name, &[0, 0]);
        }
    }
    let w1 = Ltl::atom("w1").finally();
    b.system_objective(w1.clone())
        .objective(1, w1)
        .objective(2, Ltl::atom("w2").finally());
    b.build()
}

/// Capacities large enough that saturation never clips the encoding of a
/// run with counter values at most `max_value`: `max_value + max_guard + 1`
/// per resource.
pub fn suggested_bounds(ca: &CounterAutomaton, max_value: i64) -> Vec<i64> {
    vec![max_value + ca.max_guard() + 1; 2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::GameGraph;

    fn ca(transitions: Vec<(usize, [i64; 2], [Guard; 2], usize)>) -> CounterAutomaton {
        CounterAutomaton {
            counters: 2,
            locations: vec!["l0".into(), "t".into()],
            initial: 0,
            target: Some(1),
            transitions: transitions
                .into_iter()
                .map(|(src, w, g, dst)| CaTransition {
                    src,
                    weights: w.to_vec(),
                    guards: g.to_vec(),
                    dst,
                })
                .collect(),
        }
    }

    #[test]
    fn single_free_transition_has_a_witness_of_length_one() {
        let a = ca(vec![(0, [0, 0], [Guard::FREE; 2], 1)]);
        let r = simulate_reachability(&a, 1, 100).unwrap();
        assert_eq!(r.witness().unwrap().len(), 1);
    }

    #[test]
    fn nonzero_counters_at_target_do_not_count() {
        let a = ca(vec![(0, [1, 0], [Guard::FREE; 2], 1)]);
        assert_eq!(
            simulate_reachability(&a, 1, 100).unwrap(),
            Reachability::Unknown {
                explored: 2,
                exhausted: true
            }
        );
    }

    #[test]
    fn pump_then_drop() {
        let a = ca(vec![
            (0, [1, 0], [Guard::FREE; 2], 0),
            (0, [-1, 0], [Guard { lo: 1, up: None }, Guard::FREE], 1),
        ]);
        let r = simulate_reachability(&a, 1, 1000).unwrap();
        let run = r.witness().unwrap();
        assert_eq!(run.len(), 2);
        assert_eq!(run.values, vec![vec![0, 0], vec![1, 0], vec![0, 0]]);
    }

    #[test]
    fn state_count_of_the_encoding() {
        let a = ca(vec![
            (0, [1, 0], [Guard::FREE; 2], 0),
            (0, [-1, 0], [Guard { lo: 1, up: Some(3) }, Guard::FREE], 1),
        ]);
        let g = build_game(&a, 1).unwrap();
        assert_eq!(g.num_states(), 2 + 2 * 2 + 4);
        assert!(g.edge_cost(g.state("$tau>1").unwrap(), g.state("$W2").unwrap()) == Some(&[-4, 0][..]));
    }

    #[test]
    fn three_counters_are_rejected() {
        let mut a = ca(vec![]);
        a.counters = 3;
        assert!(build_game(&a, 1).is_err());
    }

    #[test]
    fn document_round_trip() {
        let text = r#"{"counters":2,"locations":["l0","t"],"initial":"l0","target":"t",
            "transitions":[{"src":"l0","dst":"t","weights":[0,0],"guards":[[0,"omega"],[1,3]]}]}"#;
        let a = parse_counter_automaton(text).unwrap();
        assert_eq!(a.transitions[0].guards[1], Guard { lo: 1, up: Some(3) });
        assert_eq!(parse_counter_automaton(&a.to_json()).unwrap(), a);
    }
}
