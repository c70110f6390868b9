use super::{Ltl, LtlError};
use crate::atoms::{AtomTable, Valuation};

/// Ultimately periodic word `stem · cycle^ω` over valuations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LassoWord {
    pub stem: Vec<Valuation>,
    pub cycle: Vec<Valuation>,
}

impl LassoWord {
    pub fn new(stem: Vec<Valuation>, cycle: Vec<Valuation>) -> Self {
        assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
        LassoWord { stem, cycle }
    }

    /// Number of distinct positions (distinct suffixes up to equality).
    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letter(&self, pos: usize) -> Valuation {
        if pos < self.stem.len() {
            self.stem[pos]
        } else {
            self.cycle[pos - self.stem.len()]
        }
    }

    /// Successor position in the folded word.
    pub fn succ(&self, pos: usize) -> usize {
        if pos + 1 < self.len() {
            pos + 1
        } else {
            self.stem.len()
        }
    }
}

/// Decides `stem · cycle^ω ⊨ phi`.
///
/// Every suffix of the word equals one of the `|stem| + |cycle|` positions,
/// so each subformula is a boolean vector over positions. `U` is a least and
/// `R` a greatest fixpoint of its one-step unfolding along the folded word.
pub fn eval_on_lasso(phi: &Ltl, atoms: &AtomTable, word: &LassoWord) -> Result<bool, LtlError> {
    phi.check_atoms(atoms)?;
    Ok(eval_vec(phi, atoms, word)[0])
}

fn eval_vec(phi: &Ltl, atoms: &AtomTable, w: &LassoWord) -> Vec<bool> {
    let n = w.len();
    match phi {
        Ltl::True => vec![true; n],
        Ltl::False => vec![false; n],
        Ltl::Atom(a) => {
            let idx = atoms.get(a).expect("atoms checked");
            (0..n).map(|p| w.letter(p).contains(idx)).collect()
        }
        Ltl::Not(a) => eval_vec(a, atoms, w).into_iter().map(|b| !b).collect(),
        Ltl::And(a, b) => zip(eval_vec(a, atoms, w), eval_vec(b, atoms, w), |x, y| x && y),
        Ltl::Or(a, b) => zip(eval_vec(a, atoms, w), eval_vec(b, atoms, w), |x, y| x || y),
        Ltl::Next(a) => {
            let v = eval_vec(a, atoms, w);
            (0..n).map(|p| v[w.succ(p)]).collect()
        }
        Ltl::Until(a, b) => {
            let (va, vb) = (eval_vec(a, atoms, w), eval_vec(b, atoms, w));
            fixpoint(w, false, |p, next| vb[p] || (va[p] && next))
        }
        Ltl::Release(a, b) => {
            let (va, vb) = (eval_vec(a, atoms, w), eval_vec(b, atoms, w));
            fixpoint(w, true, |p, next| vb[p] && (va[p] || next))
        }
        Ltl::Finally(a) => {
            let va = eval_vec(a, atoms, w);
            fixpoint(w, false, |p, next| va[p] || next)
        }
        Ltl::Globally(a) => {
            let va = eval_vec(a, atoms, w);
            fixpoint(w, true, |p, next| va[p] && next)
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

/// Iterates `v[p] = step(p, v[succ p])` from `init` until stable. Values move
/// monotonically, so `len + 1` sweeps always suffice.
fn fixpoint(w: &LassoWord, init: bool, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let n = w.len();
    let mut v = vec![init; n];
    loop {
        let mut changed = false;
        for p in (0..n).rev() {
            let nv = step(p, v[w.succ(p)]);
            if nv != v[p] {
                v[p] = nv;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}
