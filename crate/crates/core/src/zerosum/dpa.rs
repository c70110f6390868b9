use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::ZeroSumGame;
use crate::atoms::{AtomTable, Valuation};
use crate::error::{Error, Result};
use crate::ltl::{parse_ltl, FragmentClass, Ltl};

/// Guards may mention at most this many distinct atoms.
const MAX_GUARD_ATOMS: usize = 16;

/// Deterministic parity automaton with propositional guards. The priority
/// of the state reached after reading a letter is the one that counts.
#[derive(Clone, Debug, PartialEq)]
pub struct Dpa {
    pub states: Vec<String>,
    pub initial: usize,
    pub priority: Vec<u32>,
    pub transitions: Vec<(usize, Ltl, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DpaDoc {
    pub states: Vec<String>,
    pub initial: String,
    pub priorities: BTreeMap<String, u32>,
    pub transitions: Vec<DpaTransitionDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DpaTransitionDoc {
    pub src: String,
    pub guard: String,
    pub dst: String,
}

pub fn parse_dpa(text: &str) -> Result<Dpa> {
    let doc: DpaDoc = serde_json::from_str(text).map_err(Error::json)?;
    Dpa::from_document(&doc)
}

impl Dpa {
    pub fn from_document(doc: &DpaDoc) -> Result<Dpa> {
        let bad = |m: String| Error::InvalidDpa(m);
        let index: HashMap<&str, usize> = doc.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        if index.len() != doc.states.len() {
            return Err(bad("duplicate state".into()));
        }
        let find = |s: &str| index.get(s).copied().ok_or_else(|| bad(format!("unknown state `{s}`")));
        let initial = find(&doc.initial)?;
        let mut priority = Vec::with_capacity(doc.states.len());
        for s in &doc.states {
            let p = doc
                .priorities
                .get(s)
                .ok_or_else(|| bad(format!("state `{s}` has no priority")))?;
            priority.push(*p);
        }
        if let Some(k) = doc.priorities.keys().find(|k| !index.contains_key(k.as_str())) {
            return Err(bad(format!("priority for unknown state `{k}`")));
        }
        let mut transitions = Vec::new();
        for t in &doc.transitions {
            let guard = parse_ltl(&t.guard)?;
            if !guard.is_propositional() {
                return Err(bad(format!("guard `{}` is not propositional", t.guard)));
            }
            transitions.push((find(&t.src)?, guard, find(&t.dst)?));
        }
        Ok(Dpa {
            states: doc.states.clone(),
            initial,
            priority,
            transitions,
        })
    }

    pub fn to_document(&self) -> DpaDoc {
        DpaDoc {
            states: self.states.clone(),
            initial: self.states[self.initial].clone(),
            priorities: self.states.iter().cloned().zip(self.priority.iter().copied()).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|(s, g, d)| DpaTransitionDoc {
                    src: self.states[*s].clone(),
                    guard: g.to_string(),
                    dst: self.states[*d].clone(),
                })
                .collect(),
        }
    }

    /// Resolves guards against `atoms`, checking that every state has
    /// exactly one enabled transition for every letter.
    pub fn bind(&self, atoms: &AtomTable) -> Result<BoundDpa> {
        let mut relevant: Vec<usize> = Vec::new();
        for (_, g, _) in &self.transitions {
            g.check_atoms(atoms)?;
            for a in g.atoms() {
                let i = atoms.get(a).expect("checked");
                if !relevant.contains(&i) {
                    relevant.push(i);
                }
            }
        }
        relevant.sort_unstable();
        if relevant.len() > MAX_GUARD_ATOMS {
            return Err(Error::InvalidDpa(format!(
                "guards mention {} atoms, at most {MAX_GUARD_ATOMS} supported",
                relevant.len()
            )));
        }
        let letters = 1usize << relevant.len();
        let mut table = vec![vec![usize::MAX; letters]; self.states.len()];
        for (idx, row) in table.iter_mut().enumerate() {
            for (code, cell) in row.iter_mut().enumerate() {
                let mut v = Valuation::EMPTY;
                for (bit, &a) in relevant.iter().enumerate() {
                    if code >> bit & 1 == 1 {
                        v.insert(a);
                    }
                }
                for (s, g, d) in &self.transitions {
                    if *s == idx && g.eval_state(atoms, v)? {
                        if *cell != usize::MAX && *cell != *d {
                            return Err(Error::InvalidDpa(format!(
                                "state `{}` is nondeterministic on {{{}}}",
                                self.states[idx],
                                atoms.names_of(v).join(",")
                            )));
                        }
                        *cell = *d;
                    }
                }
                if *cell == usize::MAX {
                    return Err(Error::InvalidDpa(format!(
                        "state `{}` has no transition on {{{}}}",
                        self.states[idx],
                        atoms.names_of(v).join(",")
                    )));
                }
            }
        }
        Ok(BoundDpa {
            names: self.states.clone(),
            initial: self.initial,
            priority: self.priority.clone(),
            relevant,
            table,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundDpa {
    pub names: Vec<String>,
    pub initial: usize,
    pub priority: Vec<u32>,
    relevant: Vec<usize>,
    table: Vec<Vec<usize>>,
}

impl BoundDpa {
    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn step(&self, q: usize, letter: Valuation) -> usize {
        let code = self
            .relevant
            .iter()
            .enumerate()
            .fold(0usize, |c, (bit, &a)| c | (letter.contains(a) as usize) << bit);
        self.table[q][code]
    }

    /// Parity acceptance of the ultimately periodic word.
    pub fn accepts(&self, word: &crate::ltl::LassoWord) -> bool {
        let mut q = self.initial;
        for i in 0..word.stem.len() {
            q = self.step(q, word.letter(i));
        }
        // iterate the cycle until the state at the cycle start repeats
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut maxes: Vec<u32> = Vec::new();
        loop {
            if let Some(&k) = seen.get(&q) {
                let m = maxes[k..].iter().copied().max().unwrap_or(0);
                return m % 2 == 0;
            }
            seen.insert(q, maxes.len());
            let mut m = 0;
            for &v in &word.cycle {
                q = self.step(q, v);
                m = m.max(self.priority[q]);
            }
            maxes.push(m);
        }
    }
}

/// State names, priorities and transitions of a small automaton.
type Shape = (&'static [&'static str], Vec<u32>, Vec<(usize, Ltl, usize)>);

/// DPA for a fragment objective; `None` for general formulas.
pub fn fragment_dpa(frag: &FragmentClass) -> Option<Dpa> {
    let t = Ltl::True;
    let (states, priority, transitions): Shape = match frag {
        FragmentClass::Reach(b) => (
            &["wait", "done"],
            vec![1, 2],
            vec![(0, b.clone(), 1), (0, b.clone().not(), 0), (1, t, 1)],
        ),
        FragmentClass::Safe(b) => (
            &["ok", "fail"],
            vec![0, 1],
            vec![(0, b.clone(), 0), (0, b.clone().not(), 1), (1, t, 1)],
        ),
        FragmentClass::Buchi(b) => (&["miss", "hit"], vec![1, 2], both(b)),
        FragmentClass::CoBuchi(b) => (&["bad", "good"], vec![1, 0], both(b)),
        FragmentClass::General => return None,
    };
    let initial = match frag {
        FragmentClass::CoBuchi(_) => 1,
        _ => 0,
    };
    Some(Dpa {
        states: states.iter().map(|s| s.to_string()).collect(),
        initial,
        priority,
        transitions,
    })
}

fn both(b: &Ltl) -> Vec<(usize, Ltl, usize)> {
    let mut v = Vec::new();
    for s in 0..2 {
        v.push((s, b.clone(), 1));
        v.push((s, b.clone().not(), 0));
    }
    v
}

/// Synchronous product of a game with a DPA: `(s, q)` means the automaton
/// is in `q` after reading the label of `s`.
#[derive(Clone, Debug)]
pub struct DpaProduct {
    pub pairs: Vec<(usize, usize)>,
    pub index: HashMap<(usize, usize), usize>,
    pub game: ZeroSumGame<'static>,
    pub priority: Vec<u32>,
}

impl DpaProduct {
    pub fn get(&self, s: usize, q: usize) -> Option<usize> {
        self.index.get(&(s, q)).copied()
    }
}

/// Builds the product reachable from every fresh pair `(s, δ(q₀, ℓ(s)))`
/// and from `extra` pairs.
pub fn dpa_product(g: &ZeroSumGame, dpa: &BoundDpa, extra: &[(usize, usize)], budget: usize) -> Result<DpaProduct> {
    let mut pairs = Vec::new();
    let mut index = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern =
        |pair: (usize, usize), pairs: &mut Vec<(usize, usize)>, queue: &mut VecDeque<usize>| -> Result<usize> {
            if let Some(&i) = index.get(&pair) {
                return Ok(i);
            }
            if pairs.len() >= budget {
                return Err(Error::ProductBudget { limit: budget });
            }
            let i = pairs.len();
            index.insert(pair, i);
            pairs.push(pair);
            queue.push_back(i);
            Ok(i)
        };
    for s in 0..g.num_states() {
        intern((s, dpa.step(dpa.initial, g.label(s))), &mut pairs, &mut queue)?;
    }
    for &p in extra {
        intern(p, &mut pairs, &mut queue)?;
    }
    let mut succ: Vec<Vec<usize>> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let (s, q) = pairs[i];
        let mut out = Vec::with_capacity(g.successors(s).len());
        for &d in g.successors(s) {
            out.push(intern((d, dpa.step(q, g.label(d))), &mut pairs, &mut queue)?);
        }
        if succ.len() <= i {
            succ.resize(i + 1, Vec::new());
        }
        succ[i] = out;
    }
    let protagonist = pairs
        .iter()
        .map(|&(s, _)| g.owner(s) == super::Side::Protagonist)
        .collect();
    let losing = pairs.iter().map(|&(s, _)| g.losing()[s]).collect();
    let priority = pairs.iter().map(|&(_, q)| dpa.priority[q]).collect();
    let game = ZeroSumGame::new(succ, protagonist)?.with_losing(losing)?;
    Ok(DpaProduct {
        pairs,
        index,
        game,
        priority,
    })
}
