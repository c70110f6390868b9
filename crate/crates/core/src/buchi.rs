//! Generalised Büchi emptiness on explicit graphs, returning a shortest
//! witness lasso (shortest stem first, then shortest covering cycle).

use std::collections::VecDeque;

pub(crate) struct AcceptGraph {
    pub succ: Vec<Vec<usize>>,
    /// Bit `j` set when the node belongs to acceptance set `j`.
    pub acc: Vec<u64>,
    pub num_sets: usize,
    pub roots: Vec<usize>,
}

/// Witness lasso as node sequences: `stem` leads from a root to
/// `cycle[0]` (exclusive), and `cycle` closes back on itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct NodeLasso {
    pub stem: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl AcceptGraph {
    fn full(&self) -> u64 {
        if self.num_sets == 64 {
            u64::MAX
        } else {
            (1u64 << self.num_sets) - 1
        }
    }

    pub fn find_lasso(&self) -> Option<NodeLasso> {
        let n = self.succ.len();
        let (dist, parent) = self.bfs();
        let comp = tarjan(&self.succ, &dist);
        let full = self.full();

        let mut comp_acc = vec![0u64; n];
        let mut comp_size = vec![0usize; n];
        let mut comp_loop = vec![false; n];
        for v in 0..n {
            if dist[v] == usize::MAX {
                continue;
            }
            let c = comp[v];
            comp_acc[c] |= self.acc[v];
            comp_size[c] += 1;
            if self.succ[v].contains(&v) {
                comp_loop[c] = true;
            }
        }
        let good = |c: usize| comp_acc[c] & full == full && (comp_size[c] > 1 || comp_loop[c]);

        let target = (0..n)
            .filter(|&v| dist[v] != usize::MAX && good(comp[v]))
            .min_by_key(|&v| (dist[v], v))?;

        let mut stem = Vec::new();
        let mut cur = target;
        while let Some(p) = parent[cur] {
            stem.push(p);
            cur = p;
        }
        stem.reverse();

        let cycle = self.covering_cycle(target, &comp, full);
        Some(NodeLasso { stem, cycle })
    }

    fn bfs(&self) -> (Vec<usize>, Vec<Option<usize>>) {
        let n = self.succ.len();
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![None; n];
        let mut queue = VecDeque::new();
        for &r in &self.roots {
            if dist[r] == usize::MAX {
                dist[r] = 0;
                queue.push_back(r);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &w in &self.succ[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        (dist, parent)
    }

    /// Shortest closed walk from `v` inside its component visiting every
    /// acceptance set.
    fn covering_cycle(&self, v: usize, comp: &[usize], full: u64) -> Vec<usize> {
        use std::collections::HashMap;
        let c = comp[v];
        let start = (v, self.acc[v] & full);
        let mut prev: HashMap<(usize, u64), (usize, u64)> = HashMap::new();
        let mut queue = VecDeque::from([start]);
        let mut seen = std::collections::HashSet::from([start]);
        while let Some((x, mask)) = queue.pop_front() {
            for &y in &self.succ[x] {
                if comp[y] != c {
                    continue;
                }
                if y == v && mask == full {
                    let mut cycle = vec![x];
                    let mut cur = (x, mask);
                    while cur != start {
                        cur = prev[&cur];
                        cycle.push(cur.0);
                    }
                    cycle.reverse();
                    return cycle;
                }
                let next = (y, (mask | self.acc[y]) & full);
                if seen.insert(next) {
                    prev.insert(next, (x, mask));
                    queue.push_back(next);
                }
            }
        }
        unreachable!("component was checked to contain a covering cycle")
    }
}

/// Iterative Tarjan over the nodes with finite `dist`; returns component ids.
fn tarjan(succ: &[Vec<usize>], dist: &[usize]) -> Vec<usize> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;

    for root in 0..n {
        if dist[root] == usize::MAX || index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&(v, i)) = call.last() {
            if i < succ[v].len() {
                let w = succ[v][i];
                call.last_mut().unwrap().1 += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}
