//! Linear temporal logic: syntax, evaluation on ultimately periodic words,
//! translation to Büchi automata and fragment classification.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::atoms::{AtomTable, Valuation};

mod eval;
mod fragment;
mod nba;
mod parser;

pub use eval::{eval_on_lasso, LassoWord};
pub use fragment::{classify_fragment, FragmentClass};
pub use nba::{to_nba, BoundNba, Constraint, Nba, NbaTransition};
pub use parser::parse_ltl;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LtlError {
    #[error("LTL syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("temporal operator in a state formula: {0}")]
    NotPropositional(String),
}

/// LTL syntax tree.
///
/// `Finally` and `Globally` are kept as nodes so that formulas print the way
/// they were written; `Release` only arises from negation normal form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ltl {
    True,
    False,
    Atom(String),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    Release(Box<Ltl>, Box<Ltl>),
    Finally(Box<Ltl>),
    Globally(Box<Ltl>),
}

impl Ltl {
    pub fn atom(name: &str) -> Ltl {
        Ltl::Atom(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Ltl {
        Ltl::Not(Box::new(self))
    }

    pub fn and(self, rhs: Ltl) -> Ltl {
        Ltl::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Ltl) -> Ltl {
        Ltl::Or(Box::new(self), Box::new(rhs))
    }

    pub fn next(self) -> Ltl {
        Ltl::Next(Box::new(self))
    }

    pub fn until(self, rhs: Ltl) -> Ltl {
        Ltl::Until(Box::new(self), Box::new(rhs))
    }

    pub fn release(self, rhs: Ltl) -> Ltl {
        Ltl::Release(Box::new(self), Box::new(rhs))
    }

    pub fn finally(self) -> Ltl {
        Ltl::Finally(Box::new(self))
    }

    pub fn globally(self) -> Ltl {
        Ltl::Globally(Box::new(self))
    }

    /// Conjunction of all formulas, `true` when empty.
    pub fn conjunction<I: IntoIterator<Item = Ltl>>(items: I) -> Ltl {
        items.into_iter().reduce(Ltl::and).unwrap_or(Ltl::True)
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom(_) => 1,
            Ltl::Not(a) | Ltl::Next(a) | Ltl::Finally(a) | Ltl::Globally(a) => 1 + a.size(),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Ltl::True | Ltl::False => {}
            Ltl::Atom(a) => {
                out.insert(a);
            }
            Ltl::Not(a) | Ltl::Next(a) | Ltl::Finally(a) | Ltl::Globally(a) => a.collect_atoms(out),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// True when the formula contains no temporal operator.
    pub fn is_propositional(&self) -> bool {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom(_) => true,
            Ltl::Not(a) => a.is_propositional(),
            Ltl::And(a, b) | Ltl::Or(a, b) => a.is_propositional() && b.is_propositional(),
            _ => false,
        }
    }

    /// Fails with the first atom not present in `atoms`.
    pub fn check_atoms(&self, atoms: &AtomTable) -> Result<(), LtlError> {
        match self.atoms().into_iter().find(|a| atoms.get(a).is_none()) {
            Some(a) => Err(LtlError::UnknownAtom(a.to_string())),
            None => Ok(()),
        }
    }

    /// Evaluates a temporal-free formula on a single valuation.
    pub fn eval_state(&self, atoms: &AtomTable, v: Valuation) -> Result<bool, LtlError> {
        Ok(match self {
            Ltl::True => true,
            Ltl::False => false,
            Ltl::Atom(a) => v.contains(atoms.get(a).ok_or_else(|| LtlError::UnknownAtom(a.clone()))?),
            Ltl::Not(a) => !a.eval_state(atoms, v)?,
            Ltl::And(a, b) => a.eval_state(atoms, v)? && b.eval_state(atoms, v)?,
            Ltl::Or(a, b) => a.eval_state(atoms, v)? || b.eval_state(atoms, v)?,
            other => return Err(LtlError::NotPropositional(other.to_string())),
        })
    }

    /// Negation normal form over `true`, `false`, literals, `&`, `|`, `X`,
    /// `U` and `R`. The sugar `F`/`G` is expanded.
    pub fn nnf(&self) -> Ltl {
        self.nnf_signed(false)
    }

    fn nnf_signed(&self, neg: bool) -> Ltl {
        match (self, neg) {
            (Ltl::True, false) | (Ltl::False, true) => Ltl::True,
            (Ltl::True, true) | (Ltl::False, false) => Ltl::False,
            (Ltl::Atom(_), false) => self.clone(),
            (Ltl::Atom(_), true) => self.clone().not(),
            (Ltl::Not(a), _) => a.nnf_signed(!neg),
            (Ltl::And(a, b), false) => a.nnf_signed(false).and(b.nnf_signed(false)),
            (Ltl::And(a, b), true) => a.nnf_signed(true).or(b.nnf_signed(true)),
            (Ltl::Or(a, b), false) => a.nnf_signed(false).or(b.nnf_signed(false)),
            (Ltl::Or(a, b), true) => a.nnf_signed(true).and(b.nnf_signed(true)),
            (Ltl::Next(a), _) => a.nnf_signed(neg).next(),
            (Ltl::Until(a, b), false) => a.nnf_signed(false).until(b.nnf_signed(false)),
            (Ltl::Until(a, b), true) => a.nnf_signed(true).release(b.nnf_signed(true)),
            (Ltl::Release(a, b), false) => a.nnf_signed(false).release(b.nnf_signed(false)),
            (Ltl::Release(a, b), true) => a.nnf_signed(true).until(b.nnf_signed(true)),
            (Ltl::Finally(a), false) => Ltl::True.until(a.nnf_signed(false)),
            (Ltl::Finally(a), true) => Ltl::False.release(a.nnf_signed(true)),
            (Ltl::Globally(a), false) => Ltl::False.release(a.nnf_signed(false)),
            (Ltl::Globally(a), true) => Ltl::True.until(a.nnf_signed(true)),
        }
    }
}

/// Fully parenthesised canonical form, accepted back by [`parse_ltl`].
impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ltl::True => write!(f, "true"),
            Ltl::False => write!(f, "false"),
            Ltl::Atom(a) => write!(f, "{a}"),
            Ltl::Not(a) => write!(f, "!{a}"),
            Ltl::Next(a) => write!(f, "X {a}"),
            Ltl::Finally(a) => write!(f, "F {a}"),
            Ltl::Globally(a) => write!(f, "G {a}"),
            Ltl::And(a, b) => write!(f, "({a} & {b})"),
            Ltl::Or(a, b) => write!(f, "({a} | {b})"),
            Ltl::Until(a, b) => write!(f, "({a} U {b})"),
            // not part of the input syntax; printed through its dual
            Ltl::Release(a, b) => write!(f, "!({} U {})", a.clone().not(), b.clone().not()),
        }
    }
}
