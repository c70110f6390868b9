//! Tableau translation of LTL to nondeterministic Büchi automata.
//!
//! States of the intermediate automaton are obligation sets (formulas that
//! must hold from the next position on). Expanding a set yields covers: a
//! conjunction of literals for the current letter, the next obligation set,
//! and the until-formulas left pending. Acceptance is generalised and
//! transition-based (one set per until); it is degeneralised with a level
//! counter, moved onto states, and the result is merged up to bisimulation.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use super::{eval::LassoWord, Ltl, LtlError};
use crate::atoms::{AtomTable, Valuation};
use crate::buchi::AcceptGraph;

/// Conjunction of literals over atom names.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub pos: BTreeSet<String>,
    pub neg: BTreeSet<String>,
}

impl Constraint {
    pub fn is_true(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty()
    }

    pub fn holds(&self, letter: &BTreeSet<&str>) -> bool {
        self.pos.iter().all(|a| letter.contains(a.as_str())) && self.neg.iter().all(|a| !letter.contains(a.as_str()))
    }

    fn bind(&self, atoms: &AtomTable) -> Result<(u64, u64), LtlError> {
        let mask = |set: &BTreeSet<String>| -> Result<u64, LtlError> {
            set.iter().try_fold(0u64, |m, a| {
                atoms
                    .get(a)
                    .map(|i| m | 1 << i)
                    .ok_or_else(|| LtlError::UnknownAtom(a.clone()))
            })
        };
        Ok((mask(&self.pos)?, mask(&self.neg)?))
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_true() {
            return write!(f, "true");
        }
        let lits: Vec<String> = self
            .pos
            .iter()
            .cloned()
            .chain(self.neg.iter().map(|a| format!("!{a}")))
            .collect();
        write!(f, "{}", lits.join(" & "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct NbaTransition {
    pub src: usize,
    pub guard: Constraint,
    pub dst: usize,
}

/// Büchi automaton with constraint-labelled transitions. A run reads one
/// letter per transition and is accepting when it visits `accepting`
/// states infinitely often.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nba {
    pub num_states: usize,
    pub initial: Vec<usize>,
    pub transitions: Vec<NbaTransition>,
    pub accepting: Vec<bool>,
}

/// An [`Nba`] with guards compiled to bitmasks over an atom table.
#[derive(Clone, Debug)]
pub struct BoundNba {
    pub initial: Vec<usize>,
    pub succ: Vec<Vec<(u64, u64, usize)>>,
    pub accepting: Vec<bool>,
}

impl BoundNba {
    pub fn num_states(&self) -> usize {
        self.succ.len()
    }

    pub fn all_accepting(&self) -> bool {
        self.accepting.iter().all(|&a| a)
    }

    pub fn step(&self, q: usize, letter: Valuation) -> impl Iterator<Item = usize> + '_ {
        self.succ[q]
            .iter()
            .filter(move |(pos, neg, _)| letter.0 & pos == *pos && letter.0 & neg == 0)
            .map(|&(_, _, d)| d)
    }

    /// Membership of an ultimately periodic word, via emptiness of the
    /// product with the folded word.
    pub fn accepts(&self, word: &LassoWord) -> bool {
        let k = self.num_states();
        let n = word.len();
        let node = |pos: usize, q: usize| pos * k + q;
        let mut succ = vec![Vec::new(); n * k];
        let mut acc = vec![0u64; n * k];
        for pos in 0..n {
            for q in 0..k {
                let v = node(pos, q);
                if self.accepting[q] {
                    acc[v] = 1;
                }
                for d in self.step(q, word.letter(pos)) {
                    succ[v].push(node(word.succ(pos), d));
                }
            }
        }
        AcceptGraph {
            succ,
            acc,
            num_sets: 1,
            roots: self.initial.iter().map(|&q| node(0, q)).collect(),
        }
        .find_lasso()
        .is_some()
    }
}

impl Nba {
    pub fn bind(&self, atoms: &AtomTable) -> Result<BoundNba, LtlError> {
        let mut succ = vec![Vec::new(); self.num_states];
        for t in &self.transitions {
            let (pos, neg) = t.guard.bind(atoms)?;
            succ[t.src].push((pos, neg, t.dst));
        }
        Ok(BoundNba {
            initial: self.initial.clone(),
            succ,
            accepting: self.accepting.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Cover {
    guard: Constraint,
    next: BTreeSet<Ltl>,
    pending: u64,
}

struct Expander<'a> {
    untils: &'a [Ltl],
}

impl Expander<'_> {
    fn expand(&self, obligations: &BTreeSet<Ltl>) -> BTreeSet<Cover> {
        let mut out = BTreeSet::new();
        let cover = Cover {
            guard: Constraint::default(),
            next: BTreeSet::new(),
            pending: 0,
        };
        self.go(obligations.iter().cloned().collect(), BTreeSet::new(), cover, &mut out);
        out
    }

    fn go(&self, mut todo: Vec<Ltl>, mut done: BTreeSet<Ltl>, mut c: Cover, out: &mut BTreeSet<Cover>) {
        while let Some(f) = todo.pop() {
            if !done.insert(f.clone()) {
                continue;
            }
            match f {
                Ltl::True => {}
                Ltl::False => return,
                Ltl::Atom(a) => {
                    if c.guard.neg.contains(&a) {
                        return;
                    }
                    c.guard.pos.insert(a);
                }
                Ltl::Not(inner) => match *inner {
                    Ltl::Atom(a) => {
                        if c.guard.pos.contains(&a) {
                            return;
                        }
                        c.guard.neg.insert(a);
                    }
                    other => unreachable!("negation normal form expected, got !{other}"),
                },
                Ltl::And(a, b) => {
                    todo.push(*a);
                    todo.push(*b);
                }
                Ltl::Or(a, b) => {
                    let mut left = todo.clone();
                    left.push(*a);
                    self.go(left, done.clone(), c.clone(), out);
                    todo.push(*b);
                }
                Ltl::Next(a) => {
                    c.next.insert(*a);
                }
                Ltl::Until(ref a, ref b) => {
                    let mut now = todo.clone();
                    now.push((**b).clone());
                    self.go(now, done.clone(), c.clone(), out);
                    let bit = self.untils.iter().position(|u| *u == f).expect("until in closure");
                    c.pending |= 1 << bit;
                    c.next.insert(f.clone());
                    todo.push((**a).clone());
                }
                Ltl::Release(ref a, ref b) => {
                    let mut now = todo.clone();
                    now.push((**a).clone());
                    now.push((**b).clone());
                    self.go(now, done.clone(), c.clone(), out);
                    c.next.insert(f.clone());
                    todo.push((**b).clone());
                }
                Ltl::Finally(_) | Ltl::Globally(_) => unreachable!("sugar removed by nnf"),
            }
        }
        out.insert(c);
    }
}

fn collect_untils(f: &Ltl, out: &mut BTreeSet<Ltl>) {
    match f {
        Ltl::True | Ltl::False | Ltl::Atom(_) => {}
        Ltl::Not(a) | Ltl::Next(a) | Ltl::Finally(a) | Ltl::Globally(a) => collect_untils(a, out),
        Ltl::Until(a, b) => {
            out.insert(f.clone());
            collect_untils(a, out);
            collect_untils(b, out);
        }
        Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Release(a, b) => {
            collect_untils(a, out);
            collect_untils(b, out);
        }
    }
}

/// Translates `phi` into a Büchi automaton accepting exactly the words
/// satisfying it.
pub fn to_nba(phi: &Ltl) -> Nba {
    let root = phi.nnf();
    let mut until_set = BTreeSet::new();
    collect_untils(&root, &mut until_set);
    let untils: Vec<Ltl> = until_set.into_iter().collect();
    let m = untils.len();
    let expander = Expander { untils: &untils };

    // generalised transition-based automaton over obligation sets
    let mut sets: Vec<BTreeSet<Ltl>> = vec![BTreeSet::from([root])];
    let mut set_ids: HashMap<BTreeSet<Ltl>, usize> = HashMap::from([(sets[0].clone(), 0)]);
    let mut gba: Vec<Vec<(Constraint, usize, u64)>> = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        let mut edges = Vec::new();
        for cover in expander.expand(&sets[i]) {
            let dst = *set_ids.entry(cover.next.clone()).or_insert_with(|| {
                sets.push(cover.next.clone());
                sets.len() - 1
            });
            let accepted = !cover.pending & ((1u64 << m) - 1);
            edges.push((cover.guard, dst, accepted));
        }
        gba.push(edges);
        i += 1;
    }

    // degeneralise and move acceptance onto states: (set, level, accepting)
    type Key = (usize, usize, bool);
    let init_key: Key = (0, 0, m == 0);
    let mut keys = vec![init_key];
    let mut key_ids: HashMap<Key, usize> = HashMap::from([(init_key, 0)]);
    let mut trans: Vec<(usize, Constraint, usize)> = Vec::new();
    let mut queue = VecDeque::from([init_key]);
    while let Some(key @ (set, level, _)) = queue.pop_front() {
        let src = key_ids[&key];
        for (guard, dst, accepted) in &gba[set] {
            let (nlevel, acc) = if m == 0 {
                (0, true)
            } else {
                let mut j = level;
                while j < m && accepted >> j & 1 == 1 {
                    j += 1;
                }
                if j == m {
                    (0, true)
                } else {
                    (j, false)
                }
            };
            let nkey = (*dst, nlevel, acc);
            let id = *key_ids.entry(nkey).or_insert_with(|| {
                keys.push(nkey);
                queue.push_back(nkey);
                keys.len() - 1
            });
            trans.push((src, guard.clone(), id));
        }
    }

    minimize(keys.len(), 0, &trans, &keys.iter().map(|k| k.2).collect::<Vec<_>>())
}

/// Merges bisimilar states (same acceptance, same labelled moves into the
/// same classes) and renumbers in breadth-first order from the initial state.
fn minimize(n: usize, initial: usize, trans: &[(usize, Constraint, usize)], accepting: &[bool]) -> Nba {
    let mut out: Vec<Vec<(Constraint, usize)>> = vec![Vec::new(); n];
    for (s, g, d) in trans {
        out[*s].push((g.clone(), *d));
    }
    let mut class: Vec<usize> = accepting.iter().map(|&a| a as usize).collect();
    let mut count = 0;
    loop {
        let mut sigs: BTreeMap<(usize, BTreeSet<(Constraint, usize)>), usize> = BTreeMap::new();
        let mut next = vec![0; n];
        for s in 0..n {
            let moves: BTreeSet<(Constraint, usize)> = out[s].iter().map(|(g, d)| (g.clone(), class[*d])).collect();
            let len = sigs.len();
            next[s] = *sigs.entry((class[s], moves)).or_insert(len);
        }
        let new_count = sigs.len();
        class = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }

    // breadth-first renumbering over classes
    let mut order: HashMap<usize, usize> = HashMap::new();
    let mut reps: Vec<usize> = Vec::new();
    let mut queue = VecDeque::from([initial]);
    order.insert(class[initial], 0);
    reps.push(initial);
    while let Some(s) = queue.pop_front() {
        for (_, d) in &out[s] {
            if let Entry::Vacant(e) = order.entry(class[*d]) {
                e.insert(reps.len());
                reps.push(*d);
                queue.push_back(*d);
            }
        }
    }
    let mut transitions = BTreeSet::new();
    for (i, &r) in reps.iter().enumerate() {
        for (g, d) in &out[r] {
            transitions.insert(NbaTransition {
                src: i,
                guard: g.clone(),
                dst: order[&class[*d]],
            });
        }
    }
    Nba {
        num_states: reps.len(),
        initial: vec![0],
        transitions: transitions.into_iter().collect(),
        accepting: reps.iter().map(|&r| accepting[r]).collect(),
    }
}
