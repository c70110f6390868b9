//! Independent oracles and random instance generators shared by the
//! integration tests. Nothing here calls the solver; the oracles only use
//! the library to build arenas from their own descriptions.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use careful_synth::arena::ArenaBuilder;
use careful_synth::{Arena, Ltl};
use rand::rngs::StdRng;
use rand::Rng;

// ---------------------------------------------------------------------------
// reachability games with resources

/// A game whose objectives are all of the form "eventually see atom x".
#[derive(Clone, Debug)]
pub struct ReachGame {
    pub players: usize,
    pub dims: usize,
    pub atoms: Vec<&'static str>,
    pub ids: Vec<String>,
    pub owner: Vec<usize>,
    /// Bitmask over `atoms`.
    pub labels: Vec<u8>,
    pub edges: Vec<(usize, usize, Vec<i64>)>,
    pub initial: usize,
    /// The system objective asks to eventually see each of these atoms.
    pub system: Vec<usize>,
    /// Goal atom of each player, 0-based by player.
    pub goals: Vec<usize>,
    pub bounds: Vec<i64>,
}

impl ReachGame {
    pub fn to_arena(&self) -> Arena {
        let mut b = ArenaBuilder::new(self.players, self.dims);
        for a in &self.atoms {
            b.atom(a);
        }
        for (s, id) in self.ids.iter().enumerate() {
            let labels: Vec<&str> = (0..self.atoms.len())
                .filter(|&k| self.labels[s] >> k & 1 == 1)
                .map(|k| self.atoms[k])
                .collect();
            b.state(id, self.owner[s], &labels);
        }
        b.initial(&self.ids[self.initial]);
        for (s, d, w) in &self.edges {
            b.edge(&self.ids[*s], &self.ids[*d], w);
        }
        let reach = |k: usize| Ltl::atom(self.atoms[k]).finally();
        b.system_objective(Ltl::conjunction(self.system.iter().map(|&k| reach(k))));
        for (p, &g) in self.goals.iter().enumerate() {
            b.objective(p + 1, reach(g));
        }
        b.build().expect("generated arena is valid")
    }

    pub fn figure1() -> ReachGame {
        // a, b, c, (□), (□,◇), (○,□); atoms circ, box, diam
        ReachGame {
            players: 3,
            dims: 2,
            atoms: vec!["circ", "box", "diam"],
            ids: ["a", "b", "c", "(□)", "(□,◇)", "(○,□)"].map(String::from).to_vec(),
            owner: vec![1, 2, 3, 1, 1, 1],
            labels: vec![0, 0, 0, 0b010, 0b110, 0b011],
            edges: vec![
                (0, 0, vec![2, 1]),
                (0, 1, vec![0, -1]),
                (1, 2, vec![-2, -1]),
                (1, 3, vec![0, -2]),
                (2, 4, vec![-3, 0]),
                (2, 5, vec![-1, -1]),
                (2, 2, vec![1, -2]),
                (3, 3, vec![0, 0]),
                (4, 4, vec![0, 0]),
                (5, 5, vec![0, 0]),
            ],
            initial: 0,
            system: vec![0],
            goals: vec![0, 1, 2],
            bounds: vec![3, 3],
        }
    }
}

/// Random game with at most 4 states, at most 2 players and resources,
/// capacities at most 2.
pub fn random_reach_game(rng: &mut StdRng) -> ReachGame {
    let n = rng.gen_range(1..=4);
    let players = rng.gen_range(1..=2);
    let dims = rng.gen_range(1..=2);
    let mut edges = Vec::new();
    for s in 0..n {
        let k = rng.gen_range(1..=n.min(3));
        let mut targets: Vec<usize> = (0..n).collect();
        for i in (1..targets.len()).rev() {
            targets.swap(i, rng.gen_range(0..=i));
        }
        for &d in &targets[..k] {
            let w = (0..dims).map(|_| rng.gen_range(-2..=2)).collect();
            edges.push((s, d, w));
        }
    }
    let system = match rng.gen_range(0..4) {
        0 => vec![],
        1 => vec![0],
        2 => vec![1],
        _ => vec![0, 1],
    };
    ReachGame {
        players,
        dims,
        atoms: vec!["p", "q"],
        ids: (0..n).map(|s| format!("s{s}")).collect(),
        owner: (0..n).map(|_| rng.gen_range(1..=players)).collect(),
        labels: (0..n).map(|_| rng.gen_range(0..4u8)).collect(),
        edges,
        initial: 0,
        system,
        goals: (0..players).map(|_| rng.gen_range(0..2)).collect(),
        bounds: (0..dims).map(|_| rng.gen_range(0..=2)).collect(),
    }
}

/// Product of the resource unfolding with "atom seen so far" flags, built
/// from the game description alone.
pub struct FlagProduct {
    pub succ: Vec<Vec<usize>>,
    /// Owner of each node; 0 for the depletion sink.
    pub owner: Vec<usize>,
    pub flags: Vec<u8>,
    pub bot: usize,
    pub unfolded_states: usize,
}

impl FlagProduct {
    pub fn build(g: &ReachGame) -> FlagProduct {
        type Key = Option<(usize, Vec<i64>, u8)>;
        let mut index: HashMap<Key, usize> = HashMap::new();
        let mut keys: Vec<Key> = Vec::new();
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let mut unfolded: HashSet<(usize, Vec<i64>)> = HashSet::new();
        let mut intern = |k: Key, keys: &mut Vec<Key>| -> usize {
            *index.entry(k.clone()).or_insert_with(|| {
                keys.push(k);
                keys.len() - 1
            })
        };
        let bot = intern(None, &mut keys);
        let start = intern(Some((g.initial, vec![0; g.dims], g.labels[g.initial])), &mut keys);
        assert_eq!(start, 1);
        let mut next = 0;
        while next < keys.len() {
            let out = match keys[next].clone() {
                None => vec![bot],
                Some((s, c, f)) => {
                    unfolded.insert((s, c.clone()));
                    g.edges
                        .iter()
                        .filter(|e| e.0 == s)
                        .map(|(_, d, w)| {
                            let raw: Vec<i64> = c.iter().zip(w).map(|(x, y)| x + y).collect();
                            if raw.iter().any(|&x| x < 0) {
                                bot
                            } else {
                                let r = raw.iter().zip(&g.bounds).map(|(&x, &b)| x.min(b)).collect();
                                intern(Some((*d, r, f | g.labels[*d])), &mut keys)
                            }
                        })
                        .collect()
                }
            };
            succ.push(out);
            next += 1;
        }
        FlagProduct {
            owner: keys
                .iter()
                .map(|k| k.as_ref().map_or(0, |(s, _, _)| g.owner[*s]))
                .collect(),
            flags: keys.iter().map(|k| k.as_ref().map_or(0, |(_, _, f)| *f)).collect(),
            succ,
            bot,
            unfolded_states: unfolded.len(),
        }
    }
}

/// Brute-force existence of a careful Nash equilibrium satisfying the
/// system objective, over profiles that are memoryless on the flag product.
///
/// Outcomes are the simple lassos of the product. For every player the
/// outcome leaves unsatisfied, the others must fix their off-outcome choices
/// (one per node, shared across deviators) so that the deviator cannot
/// reach its goal and then avoid depletion forever.
pub fn brute_force_ne(g: &ReachGame) -> bool {
    let p = FlagProduct::build(g);
    let mut path = vec![1usize];
    let mut pos = vec![usize::MAX; p.succ.len()];
    pos[1] = 0;
    outcomes(g, &p, &mut path, &mut pos)
}

fn outcomes(g: &ReachGame, p: &FlagProduct, path: &mut Vec<usize>, pos: &mut [usize]) -> bool {
    let x = *path.last().unwrap();
    for &y in &p.succ[x] {
        if y == p.bot {
            continue;
        }
        if pos[y] != usize::MAX {
            if supports_ne(g, p, path, pos[y]) {
                return true;
            }
            continue;
        }
        pos[y] = path.len();
        path.push(y);
        let found = outcomes(g, p, path, pos);
        path.pop();
        pos[y] = usize::MAX;
        if found {
            return true;
        }
    }
    false
}

fn supports_ne(g: &ReachGame, p: &FlagProduct, path: &[usize], loop_start: usize) -> bool {
    let last = p.flags[path[loop_start]];
    if !g.system.iter().all(|&k| last >> k & 1 == 1) {
        return false;
    }
    let mut next: HashMap<usize, usize> = HashMap::new();
    for k in 0..path.len() {
        let n = if k + 1 < path.len() {
            path[k + 1]
        } else {
            path[loop_start]
        };
        next.insert(path[k], n);
    }
    let deviators: Vec<usize> = (1..=g.players).filter(|&i| last >> g.goals[i - 1] & 1 == 0).collect();
    let mut assign: HashMap<usize, usize> = HashMap::new();
    // each deviator alone first; a failure there is final
    for &i in &deviators {
        if !punish(g, p, &next, &[i], &mut assign) {
            return false;
        }
        assign.clear();
    }
    punish(g, p, &next, &deviators, &mut assign)
}

/// Node successors in deviator `i`'s view; `None` when undetermined.
fn view(
    p: &FlagProduct,
    next: &HashMap<usize, usize>,
    assign: &HashMap<usize, usize>,
    i: usize,
    x: usize,
) -> Option<Vec<usize>> {
    if x == p.bot || p.owner[x] == i {
        return Some(p.succ[x].clone());
    }
    next.get(&x).or_else(|| assign.get(&x)).map(|&y| vec![y])
}

/// Reachable nodes, the first undetermined one, and whether the deviator
/// surely profits (a goal node from which depletion can be avoided forever,
/// using determined edges only).
fn explore(
    g: &ReachGame,
    p: &FlagProduct,
    next: &HashMap<usize, usize>,
    assign: &HashMap<usize, usize>,
    i: usize,
) -> (Option<usize>, bool) {
    let n = p.succ.len();
    let mut seen = vec![false; n];
    let mut order = vec![1usize];
    seen[1] = true;
    let mut open = None;
    let mut k = 0;
    while k < order.len() {
        let x = order[k];
        k += 1;
        match view(p, next, assign, i, x) {
            Some(out) => {
                for y in out {
                    if !seen[y] {
                        seen[y] = true;
                        order.push(y);
                    }
                }
            }
            None => {
                if open.is_none() {
                    open = Some(x);
                }
            }
        }
    }
    // greatest fixpoint: nodes with an infinite determined path avoiding the sink
    let mut safe: Vec<bool> = (0..n).map(|x| seen[x] && x != p.bot).collect();
    loop {
        let mut changed = false;
        for &x in &order {
            if safe[x] {
                let ok = view(p, next, assign, i, x).is_some_and(|out| out.iter().any(|&y| safe[y]));
                if !ok {
                    safe[x] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let goal = g.goals[i - 1];
    let profits = order.iter().any(|&x| safe[x] && p.flags[x] >> goal & 1 == 1);
    (open, profits)
}

fn punish(
    g: &ReachGame,
    p: &FlagProduct,
    next: &HashMap<usize, usize>,
    deviators: &[usize],
    assign: &mut HashMap<usize, usize>,
) -> bool {
    let Some((&i, rest)) = deviators.split_first() else {
        return true;
    };
    let (open, profits) = explore(g, p, next, assign, i);
    if profits {
        return false;
    }
    match open {
        None => punish(g, p, next, rest, assign),
        Some(x) => {
            for &y in &p.succ[x] {
                assign.insert(x, y);
                if punish(g, p, next, deviators, assign) {
                    return true;
                }
            }
            assign.remove(&x);
            false
        }
    }
}

// ---------------------------------------------------------------------------
// two-player zero-sum games

#[derive(Clone, Debug)]
pub struct SmallGame {
    pub succ: Vec<Vec<usize>>,
    pub protagonist: Vec<bool>,
    pub losing: Vec<bool>,
    pub target: Vec<bool>,
    pub priority: Vec<u32>,
}

pub fn random_small_game(rng: &mut StdRng, max_states: usize, max_priority: u32) -> SmallGame {
    let n = rng.gen_range(1..=max_states);
    let mut succ = Vec::new();
    for _ in 0..n {
        let k = rng.gen_range(1..=n.min(3));
        let mut out: Vec<usize> = (0..n).collect();
        for i in (1..out.len()).rev() {
            out.swap(i, rng.gen_range(0..=i));
        }
        out.truncate(k);
        succ.push(out);
    }
    let mut losing = vec![false; n];
    if n > 1 && rng.gen_bool(0.4) {
        let l = rng.gen_range(0..n);
        losing[l] = true;
        succ[l] = vec![l];
    }
    SmallGame {
        protagonist: (0..n).map(|_| rng.gen_bool(0.5)).collect(),
        target: (0..n).map(|s| !losing[s] && rng.gen_bool(0.4)).collect(),
        priority: (0..n).map(|_| rng.gen_range(0..max_priority)).collect(),
        losing,
        succ,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Reach,
    Safe,
    Buchi,
    CoBuchi,
    Parity,
}

/// Winning states of the protagonist by enumerating every pair of memoryless
/// strategies: `s` is winning iff some protagonist choice function beats
/// every antagonist choice function from `s`.
pub fn brute_force_regions(g: &SmallGame, obj: Objective) -> Vec<bool> {
    let n = g.succ.len();
    let prot: Vec<usize> = (0..n).filter(|&s| g.protagonist[s]).collect();
    let ant: Vec<usize> = (0..n).filter(|&s| !g.protagonist[s]).collect();
    let choices = |states: &[usize]| -> Vec<Vec<usize>> {
        let mut all = vec![vec![0usize; n]];
        for &s in states {
            all = all
                .into_iter()
                .flat_map(|c| {
                    g.succ[s].iter().map(move |&d| {
                        let mut c = c.clone();
                        c[s] = d;
                        c
                    })
                })
                .collect();
        }
        all
    };
    let ps = choices(&prot);
    let ans = choices(&ant);
    (0..n)
        .map(|s| {
            ps.iter().any(|sp| {
                ans.iter().all(|sa| {
                    let mv = |x: usize| if g.protagonist[x] { sp[x] } else { sa[x] };
                    wins(g, obj, s, mv)
                })
            })
        })
        .collect()
}

fn wins(g: &SmallGame, obj: Objective, start: usize, mv: impl Fn(usize) -> usize) -> bool {
    let mut path = vec![start];
    let mut seen = vec![usize::MAX; g.succ.len()];
    seen[start] = 0;
    let loop_start = loop {
        let x = mv(*path.last().unwrap());
        if seen[x] != usize::MAX {
            break seen[x];
        }
        seen[x] = path.len();
        path.push(x);
    };
    if path.iter().any(|&x| g.losing[x]) {
        return false;
    }
    let cycle = &path[loop_start..];
    match obj {
        Objective::Reach => path.iter().any(|&x| g.target[x]),
        Objective::Safe => path.iter().all(|&x| g.target[x]),
        Objective::Buchi => cycle.iter().any(|&x| g.target[x]),
        Objective::CoBuchi => cycle.iter().all(|&x| g.target[x]),
        Objective::Parity => cycle.iter().map(|&x| g.priority[x]).max().unwrap() % 2 == 0,
    }
}
