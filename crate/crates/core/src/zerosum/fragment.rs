use super::{attractor_in, first_in, Side, StateSet, Strategy, WinningRegions, ZeroSumGame};
use crate::error::{Error, Result};
use crate::ltl::FragmentClass;

/// Objective over explicit state sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    Reach(StateSet),
    Safe(StateSet),
    Buchi(StateSet),
    CoBuchi(StateSet),
}

/// Solves a non-general fragment, reading the state formula from the game
/// labels. The objective is conjoined with avoidance of the losing states.
pub fn solve_fragment(g: &ZeroSumGame, frag: &FragmentClass) -> Result<WinningRegions> {
    let states = |beta: &crate::ltl::Ltl| -> Result<StateSet> {
        (0..g.num_states())
            .map(|s| Ok(!g.losing()[s] && beta.eval_state(g.atoms(), g.label(s))?))
            .collect()
    };
    let cond = match frag {
        FragmentClass::Reach(b) => Condition::Reach(states(b)?),
        FragmentClass::Safe(b) => Condition::Safe(states(b)?),
        FragmentClass::Buchi(b) => Condition::Buchi(states(b)?),
        FragmentClass::CoBuchi(b) => Condition::CoBuchi(states(b)?),
        FragmentClass::General => {
            return Err(Error::UnsupportedObjective {
                player: 0,
                formula: "general LTL".into(),
            })
        }
    };
    Ok(solve_condition(g, &cond))
}

/// Solves `cond ∧ G ¬losing` for the protagonist.
///
/// The protagonist must first stay outside the antagonist attractor of the
/// losing states; the condition is then solved inside that subgame.
pub fn solve_condition(g: &ZeroSumGame, cond: &Condition) -> WinningRegions {
    let n = g.num_states();
    let all = vec![true; n];
    let sink = attractor_in(g, Side::Antagonist, g.losing(), &all);
    let safe: StateSet = sink.set.iter().map(|b| !b).collect();

    let (win, mut pstrat, mut astrat) = match cond {
        Condition::Reach(t) => reach_in(g, t, &safe),
        Condition::Safe(t) => safety_in(g, t, &safe),
        Condition::Buchi(t) => buchi_in(g, Side::Protagonist, t, &safe),
        Condition::CoBuchi(t) => {
            let bad: StateSet = (0..n).map(|s| safe[s] && !t[s]).collect();
            let (ant_win, astrat, pstrat) = buchi_in(g, Side::Antagonist, &bad, &safe);
            let win = (0..n).map(|s| safe[s] && !ant_win[s]).collect();
            (win, pstrat, astrat)
        }
    };
    for s in 0..n {
        if sink.set[s] && g.owner(s) == Side::Antagonist {
            astrat[s] = sink.strategy[s].or_else(|| g.successors(s).first().copied());
        }
        if !win[s] {
            pstrat[s] = None;
        }
    }
    WinningRegions {
        win,
        protagonist_strategy: pstrat,
        antagonist_strategy: astrat,
    }
}

type Solved = (StateSet, Strategy, Strategy);

fn reach_in(g: &ZeroSumGame, target: &[bool], arena: &[bool]) -> Solved {
    let n = g.num_states();
    let a = attractor_in(g, Side::Protagonist, target, arena);
    let mut pstrat = vec![None; n];
    let mut astrat = vec![None; n];
    for s in (0..n).filter(|&s| arena[s]) {
        match (g.owner(s), a.set[s]) {
            (Side::Protagonist, true) => {
                pstrat[s] = a.strategy[s].or_else(|| first_in(g, s, arena));
            }
            (Side::Antagonist, false) => {
                let outside: StateSet = (0..n).map(|d| arena[d] && !a.set[d]).collect();
                astrat[s] = first_in(g, s, &outside);
            }
            _ => {}
        }
    }
    (a.set, pstrat, astrat)
}

fn safety_in(g: &ZeroSumGame, good: &[bool], arena: &[bool]) -> Solved {
    let n = g.num_states();
    let bad: StateSet = (0..n).map(|s| arena[s] && !good[s]).collect();
    let b = attractor_in(g, Side::Antagonist, &bad, arena);
    let win: StateSet = (0..n).map(|s| arena[s] && !b.set[s]).collect();
    let mut pstrat = vec![None; n];
    let mut astrat = vec![None; n];
    for s in (0..n).filter(|&s| arena[s]) {
        match (g.owner(s), win[s]) {
            (Side::Protagonist, true) => pstrat[s] = first_in(g, s, &win),
            (Side::Antagonist, false) => {
                astrat[s] = b.strategy[s].or_else(|| first_in(g, s, arena));
            }
            _ => {}
        }
    }
    (win, pstrat, astrat)
}

/// Classical Büchi iteration for `side` in the subgame `arena`: repeatedly
/// remove the opponent attractor of the states from which `side` cannot
/// reach the target. Returns `(side region, side strategy, opponent strategy)`.
fn buchi_in(g: &ZeroSumGame, side: Side, target: &[bool], arena: &[bool]) -> Solved {
    let n = g.num_states();
    let mut rest: StateSet = arena.to_vec();
    let mut side_strat = vec![None; n];
    let mut opp_strat = vec![None; n];
    loop {
        let t: StateSet = (0..n).map(|s| rest[s] && target[s]).collect();
        let a = attractor_in(g, side, &t, &rest);
        let trap: StateSet = (0..n).map(|s| rest[s] && !a.set[s]).collect();
        if !trap.iter().any(|&b| b) {
            for s in (0..n).filter(|&s| rest[s] && g.owner(s) == side) {
                side_strat[s] = a.strategy[s].or_else(|| first_in(g, s, &rest));
            }
            return (rest, side_strat, opp_strat);
        }
        let b = attractor_in(g, side.opponent(), &trap, &rest);
        for s in (0..n).filter(|&s| b.set[s] && g.owner(s) != side) {
            opp_strat[s] = if trap[s] { first_in(g, s, &trap) } else { b.strategy[s] };
        }
        for (r, &gone) in rest.iter_mut().zip(&b.set) {
            *r &= !gone;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::{AtomTable, Valuation};
    use crate::ltl::{classify_fragment, parse_ltl};

    fn labelled(succ: Vec<Vec<usize>>, prot: Vec<bool>, p_states: &[usize]) -> ZeroSumGame<'static> {
        let mut atoms = AtomTable::new();
        atoms.insert("b");
        let labels = (0..succ.len())
            .map(|s| {
                if p_states.contains(&s) {
                    Valuation::EMPTY.with(0)
                } else {
                    Valuation::EMPTY
                }
            })
            .collect();
        ZeroSumGame::new(succ, prot)
            .unwrap()
            .with_labels(labels, atoms)
            .unwrap()
    }

    fn frag(s: &str) -> FragmentClass {
        classify_fragment(&parse_ltl(s).unwrap())
    }

    #[test]
    fn reach_at_initial() {
        let g = labelled(vec![vec![1], vec![1]], vec![false, false], &[0]);
        assert!(solve_fragment(&g, &frag("F b")).unwrap().win[0]);
    }

    #[test]
    fn buchi_self_loop_and_everything_reaching_it() {
        // 0 -> 1 -> 2 (b, self loop); 3 -> 3 without b
        let g = labelled(
            vec![vec![1], vec![2], vec![2], vec![3]],
            vec![true, true, true, true],
            &[2],
        );
        let r = solve_fragment(&g, &frag("G F b")).unwrap();
        assert_eq!(r.win, vec![true, true, true, false]);
    }

    #[test]
    fn reach_is_not_won_if_the_sink_follows() {
        // 0(P) -> 1 (b) ; 1(A) -> 2 (losing sink) ; 2 -> 2
        let g = labelled(vec![vec![1], vec![2], vec![2]], vec![true, false, true], &[1])
            .with_losing(vec![false, false, true])
            .unwrap();
        let r = solve_fragment(&g, &frag("F b")).unwrap();
        assert_eq!(r.win, vec![false, false, false]);
        assert_eq!(r.antagonist_strategy[1], Some(2));
    }

    #[test]
    fn co_buchi_needs_eventual_stability() {
        // 0(A) -> 0 (b), 1 (not b); 1(A) -> 0
        let g = labelled(vec![vec![0, 1], vec![0]], vec![false, false], &[0]);
        let r = solve_fragment(&g, &frag("F G b")).unwrap();
        assert_eq!(r.win, vec![false, false]);
        // with the protagonist owning 0 it can stay forever
        let g = labelled(vec![vec![0, 1], vec![0]], vec![true, false], &[0]);
        let r = solve_fragment(&g, &frag("F G b")).unwrap();
        assert_eq!(r.win, vec![true, true]);
        assert_eq!(r.protagonist_strategy[0], Some(0));
    }

    #[test]
    fn general_is_rejected() {
        let g = labelled(vec![vec![0]], vec![true], &[]);
        assert!(matches!(
            solve_fragment(&g, &FragmentClass::General),
            Err(Error::UnsupportedObjective { .. })
        ));
    }
}
