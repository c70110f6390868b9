use std::fmt;

use super::Ltl;

/// Syntactic objective class used to pick a zero-sum solver. The payload is
/// a temporal-free formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FragmentClass {
    Reach(Ltl),
    Safe(Ltl),
    Buchi(Ltl),
    CoBuchi(Ltl),
    General,
}

impl fmt::Display for FragmentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FragmentClass::Reach(b) => write!(f, "Reach({b})"),
            FragmentClass::Safe(b) => write!(f, "Safe({b})"),
            FragmentClass::Buchi(b) => write!(f, "Buchi({b})"),
            FragmentClass::CoBuchi(b) => write!(f, "CoBuchi({b})"),
            FragmentClass::General => write!(f, "General"),
        }
    }
}

/// Rewrites `true U a` to `F a`, `!F !a` to `G a`, `!G !a` to `F a`, and
/// removes double negations, bottom-up.
fn normalize(phi: &Ltl) -> Ltl {
    match phi {
        Ltl::True | Ltl::False | Ltl::Atom(_) => phi.clone(),
        Ltl::Not(a) => match normalize(a) {
            Ltl::Not(inner) => *inner,
            Ltl::Finally(inner) => match *inner {
                Ltl::Not(x) => Ltl::Globally(x),
                other => Ltl::Finally(Box::new(other)).not(),
            },
            Ltl::Globally(inner) => match *inner {
                Ltl::Not(x) => Ltl::Finally(x),
                other => Ltl::Globally(Box::new(other)).not(),
            },
            other => other.not(),
        },
        Ltl::And(a, b) => normalize(a).and(normalize(b)),
        Ltl::Or(a, b) => normalize(a).or(normalize(b)),
        Ltl::Next(a) => normalize(a).next(),
        Ltl::Until(a, b) => match normalize(a) {
            Ltl::True => normalize(b).finally(),
            na => na.until(normalize(b)),
        },
        Ltl::Release(a, b) => match normalize(a) {
            Ltl::False => normalize(b).globally(),
            na => na.release(normalize(b)),
        },
        Ltl::Finally(a) => normalize(a).finally(),
        Ltl::Globally(a) => normalize(a).globally(),
    }
}

/// Sound, incomplete classification into reachability, safety, Büchi and
/// co-Büchi shapes. The constants are read as `G true` and `F false`.
pub fn classify_fragment(phi: &Ltl) -> FragmentClass {
    let n = normalize(phi);
    match &n {
        Ltl::True => FragmentClass::Safe(Ltl::True),
        Ltl::False => FragmentClass::Reach(Ltl::False),
        Ltl::Finally(a) if a.is_propositional() => FragmentClass::Reach((**a).clone()),
        Ltl::Globally(a) if a.is_propositional() => FragmentClass::Safe((**a).clone()),
        Ltl::Globally(a) => match &**a {
            Ltl::Finally(b) if b.is_propositional() => FragmentClass::Buchi((**b).clone()),
            _ => FragmentClass::General,
        },
        Ltl::Finally(a) => match &**a {
            Ltl::Globally(b) if b.is_propositional() => FragmentClass::CoBuchi((**b).clone()),
            _ => FragmentClass::General,
        },
        _ => FragmentClass::General,
    }
}
