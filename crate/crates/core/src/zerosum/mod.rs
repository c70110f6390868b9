//! Two-player zero-sum games on the unfolded arena.
//!
//! One player (the *protagonist*, a single deviating player) plays against
//! the coalition of all others. States in `losing` are absorbing and losing
//! for the protagonist; on the unfolding this is the depletion sink, which
//! makes every objective careful.

use std::borrow::Cow;
use std::collections::VecDeque;

use crate::arena::{GameGraph, PlayerId};
use crate::atoms::{AtomTable, Valuation};
use crate::error::{Error, Result};
use crate::unfolding::UnfoldedArena;

mod dpa;
mod fragment;
mod parity;
mod punish;

pub use dpa::{dpa_product, fragment_dpa, parse_dpa, BoundDpa, Dpa, DpaDoc, DpaProduct, DpaTransitionDoc};
pub use fragment::{solve_condition, solve_fragment, Condition};
pub use parity::{solve_parity, solve_parity_bounded, DEFAULT_MAX_PRIORITY};
pub use punish::{punish_region, Monitor, Punishment};

pub type StateSet = Vec<bool>;
pub type Strategy = Vec<Option<usize>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Protagonist,
    Antagonist,
}

impl Side {
    pub fn opponent(self) -> Side {
        match self {
            Side::Protagonist => Side::Antagonist,
            Side::Antagonist => Side::Protagonist,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ZeroSumGame<'g> {
    succ: Cow<'g, [Vec<usize>]>,
    pred: Vec<Vec<usize>>,
    protagonist: Vec<bool>,
    labels: Cow<'g, [Valuation]>,
    atoms: Cow<'g, AtomTable>,
    losing: Vec<bool>,
}

impl<'g> ZeroSumGame<'g> {
    /// Game over `succ` where `protagonist[s]` tells who moves at `s`.
    /// Every state needs a successor.
    pub fn new(succ: Vec<Vec<usize>>, protagonist: Vec<bool>) -> Result<ZeroSumGame<'static>> {
        let n = succ.len();
        ZeroSumGame::build(
            Cow::Owned(succ),
            protagonist,
            Cow::Owned(vec![Valuation::EMPTY; n]),
            Cow::Owned(AtomTable::new()),
        )
    }

    fn build(
        succ: Cow<'g, [Vec<usize>]>,
        protagonist: Vec<bool>,
        labels: Cow<'g, [Valuation]>,
        atoms: Cow<'g, AtomTable>,
    ) -> Result<ZeroSumGame<'g>> {
        let n = succ.len();
        if protagonist.len() != n || labels.len() != n {
            return Err(Error::InvalidArena("game vectors disagree in length".into()));
        }
        let mut pred = vec![Vec::new(); n];
        for (s, out) in succ.iter().enumerate() {
            if out.is_empty() {
                return Err(Error::InvalidArena(format!("game state {s} has no successor")));
            }
            for &d in out {
                if d >= n {
                    return Err(Error::InvalidArena(format!("game edge {s} -> {d} out of range")));
                }
                pred[d].push(s);
            }
        }
        Ok(ZeroSumGame {
            succ,
            pred,
            protagonist,
            labels,
            atoms,
            losing: vec![false; n],
        })
    }

    /// Deviation game of `player` on the unfolding, borrowing its graph.
    pub fn from_unfolded(u: &'g UnfoldedArena<'_>, player: PlayerId) -> ZeroSumGame<'g> {
        let n = u.num_states();
        let succ: Vec<Vec<usize>> = (0..n).map(|s| u.successors(s).to_vec()).collect();
        let mut g = ZeroSumGame::build(
            Cow::Owned(succ),
            (0..n).map(|s| u.owner(s) == player && !u.is_bot(s)).collect(),
            Cow::Owned((0..n).map(|s| u.label(s)).collect()),
            Cow::Borrowed(u.atoms()),
        )
        .expect("unfolding is total");
        if let Some(b) = u.bot() {
            g.losing[b] = true;
        }
        g
    }

    pub fn with_labels(mut self, labels: Vec<Valuation>, atoms: AtomTable) -> Result<Self> {
        if labels.len() != self.num_states() {
            return Err(Error::InvalidArena("label vector length".into()));
        }
        self.labels = Cow::Owned(labels);
        self.atoms = Cow::Owned(atoms);
        Ok(self)
    }

    /// Marks absorbing states that are losing for the protagonist.
    pub fn with_losing(mut self, losing: Vec<bool>) -> Result<Self> {
        if losing.len() != self.num_states() {
            return Err(Error::InvalidArena("losing vector length".into()));
        }
        self.losing = losing;
        Ok(self)
    }

    pub fn num_states(&self) -> usize {
        self.succ.len()
    }

    pub fn successors(&self, s: usize) -> &[usize] {
        &self.succ[s]
    }

    pub fn predecessors(&self, s: usize) -> &[usize] {
        &self.pred[s]
    }

    pub fn owner(&self, s: usize) -> Side {
        if self.protagonist[s] {
            Side::Protagonist
        } else {
            Side::Antagonist
        }
    }

    pub fn label(&self, s: usize) -> Valuation {
        self.labels[s]
    }

    pub fn atoms(&self) -> &AtomTable {
        &self.atoms
    }

    pub fn losing(&self) -> &[bool] {
        &self.losing
    }

    /// Copy of the game in which each state with a fixed move keeps only
    /// that edge.
    pub fn restrict(&self, fixed: &[Option<usize>]) -> ZeroSumGame<'g> {
        let succ: Vec<Vec<usize>> = (0..self.num_states())
            .map(|s| match fixed[s] {
                Some(d) => vec![d],
                None => self.succ[s].clone(),
            })
            .collect();
        let mut g = ZeroSumGame::build(
            Cow::Owned(succ),
            self.protagonist.clone(),
            self.labels.clone(),
            self.atoms.clone(),
        )
        .expect("restriction keeps totality");
        g.losing = self.losing.clone();
        g
    }
}

/// Protagonist region plus a memoryless strategy for each side on its own
/// region. The antagonist region is the complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinningRegions {
    pub win: StateSet,
    pub protagonist_strategy: Strategy,
    pub antagonist_strategy: Strategy,
}

impl WinningRegions {
    pub fn antagonist_region(&self) -> StateSet {
        self.win.iter().map(|w| !w).collect()
    }

    /// Move of the owner of `s` when `s` lies in the owner's region.
    pub fn strategy_at(&self, g: &ZeroSumGame, s: usize) -> Option<usize> {
        match (g.owner(s), self.win[s]) {
            (Side::Protagonist, true) => self.protagonist_strategy[s],
            (Side::Antagonist, false) => self.antagonist_strategy[s],
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attractor {
    pub set: StateSet,
    /// Rank-decreasing move for the attracting side's states outside the
    /// target.
    pub strategy: Strategy,
}

/// Protagonist attractor of `target` over the whole game.
pub fn attractor(g: &ZeroSumGame, target: &[bool]) -> Attractor {
    attractor_in(g, Side::Protagonist, target, &vec![true; g.num_states()])
}

/// Attractor of `target` for `side` inside the subgame `arena`; moves
/// leaving `arena` are ignored.
pub fn attractor_in(g: &ZeroSumGame, side: Side, target: &[bool], arena: &[bool]) -> Attractor {
    let n = g.num_states();
    let mut set = vec![false; n];
    let mut strategy = vec![None; n];
    let mut remaining: Vec<usize> = (0..n)
        .map(|s| g.successors(s).iter().filter(|&&d| arena[d]).count())
        .collect();
    let mut queue = VecDeque::new();
    for s in 0..n {
        if arena[s] && target[s] {
            set[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(x) = queue.pop_front() {
        for &v in g.predecessors(x) {
            if !arena[v] || set[v] {
                continue;
            }
            if g.owner(v) == side {
                set[v] = true;
                strategy[v] = Some(x);
                queue.push_back(v);
            } else {
                remaining[v] -= 1;
                if remaining[v] == 0 {
                    set[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    Attractor { set, strategy }
}

pub(crate) fn first_in(g: &ZeroSumGame, s: usize, set: &[bool]) -> Option<usize> {
    g.successors(s).iter().copied().find(|&d| set[d])
}
