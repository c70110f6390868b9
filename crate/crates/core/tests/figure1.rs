//! The three-player, two-resource running example, checked number by number.

use std::collections::BTreeSet;

use careful_synth::arena::{cost_of_history, multi_energy_check_unbounded, parse_arena, payoff};
use careful_synth::synthesis::{check_certificate, find_witness_lasso, Violation};
use careful_synth::unfolding::saturating_add;
use careful_synth::zerosum::{attractor, punish_region, Condition, ZeroSumGame};
use careful_synth::{
    solve, unfold, Arena, Error, GameGraph, Ltl, SolveOptions, StrategyProfile, UState, UnfoldedArena,
};

fn figure1() -> Arena {
    parse_arena(include_str!("../data/figure1.json")).unwrap()
}

fn node(a: &Arena, id: &str, res: &[i64]) -> UState {
    UState::Node {
        base: a.state(id).unwrap(),
        res: res.to_vec(),
    }
}

fn idx(u: &UnfoldedArena, s: &UState) -> usize {
    u.index_of(s).unwrap()
}

fn lifted(u: &UnfoldedArena, ids: &[&str]) -> Vec<UState> {
    let h = u.base().history(ids).unwrap();
    u.lift(h.states())
        .unwrap()
        .into_iter()
        .map(|x| u.state(x).clone())
        .collect()
}

#[test]
fn document_shape() {
    let a = figure1();
    assert_eq!((a.players(), a.dimensions(), a.num_states()), (3, 2, 6));
    // five edges between distinct states, five self-loops
    let loops = a.edges().iter().filter(|e| e.src == e.dst).count();
    assert_eq!((a.edges().len(), loops), (10, 5));
    assert_eq!(parse_arena(&a.to_json()).unwrap().to_json(), a.to_json());
}

#[test]
fn removing_the_moves_of_b_is_rejected() {
    let mut doc: serde_json::Value = serde_json::from_str(include_str!("../data/figure1.json")).unwrap();
    doc["edges"].as_array_mut().unwrap().retain(|e| e["src"] != "b");
    let err = parse_arena(&doc.to_string()).unwrap_err();
    assert!(err.to_string().contains("without successor"), "{err}");
}

#[test]
fn costs_of_histories() {
    let a = figure1();
    let cost = |ids: &[&str]| cost_of_history(&a, &a.history(ids).unwrap()).unwrap();
    assert_eq!(cost(&["a", "a", "a", "a"]), [6, 3]);
    assert_eq!(cost(&["a"]), [0, 0]);
    assert_eq!(cost(&["a", "a", "a", "a", "b", "c"]), [4, 1]);
}

#[test]
fn unbounded_energy_and_payoffs() {
    let a = figure1();
    let good = a.lasso(&["a", "a", "a", "a", "b", "c", "(○,□)"], &["(○,□)"]).unwrap();
    assert!(multi_energy_check_unbounded(&a, &good).unwrap());
    let bad = a.lasso(&["a", "b"], &["(□)"]).unwrap();
    assert!(!multi_energy_check_unbounded(&a, &bad).unwrap());
    assert_eq!(payoff(&a, &good, 1).unwrap(), 1);
    assert_eq!(payoff(&a, &good, 2).unwrap(), 1);
    assert_eq!(payoff(&a, &good, 3).unwrap(), 0);
}

#[test]
fn saturating_arithmetic() {
    assert_eq!(saturating_add(&[3, 2], &[2, 1], &[3, 3]), [3, 3]);
    assert_eq!(saturating_add(&[0, 0], &[0, 0], &[0, 0]), [0, 0]);
    assert_eq!(saturating_add(&[1, 1], &[1, -2], &[3, 3]), [2, -1]);
}

#[test]
fn unfolded_edges() {
    let a = figure1();
    let u = unfold(&a, &[3, 3]).unwrap();
    let a00 = idx(&u, &node(&a, "a", &[0, 0]));
    assert!(u.successors(a00).contains(&idx(&u, &node(&a, "a", &[2, 1]))));
    let c11 = idx(&u, &node(&a, "c", &[1, 1]));
    assert!(u.successors(c11).contains(&u.bot().unwrap()));
    assert!(u.num_states() <= 6 * 16 + 1);
}

#[test]
fn lifting_histories() {
    // b to c costs (-2,-1) from (3,2), so c is reached with (1,1)
    let a = figure1();
    let u = unfold(&a, &[3, 3]).unwrap();
    let want: Vec<UState> = [
        ("a", [0, 0]),
        ("a", [2, 1]),
        ("a", [3, 2]),
        ("a", [3, 3]),
        ("b", [3, 2]),
        ("c", [1, 1]),
    ]
    .iter()
    .map(|(s, r)| node(&a, s, r))
    .collect();
    assert_eq!(lifted(&u, &["a", "a", "a", "a", "b", "c"]), want);
    let h = a.history(&["a", "b", "c"]).unwrap();
    match u.lift(h.states()) {
        Err(Error::Underflow {
            prefix_len,
            resource,
            value,
        }) => {
            // a·b already takes the second resource to -1
            assert_eq!((prefix_len, resource, value), (2, 2, -1));
        }
        other => panic!("expected an underflow, got {other:?}"),
    }
}

#[test]
fn player_three_regions() {
    let a = figure1();
    let diam = |u: &UnfoldedArena| -> Vec<bool> {
        (0..u.num_states())
            .map(|x| u.state(x).base().is_some_and(|s| a.id(s) == "(□,◇)"))
            .collect()
    };

    let small = unfold(&a, &[3, 3]).unwrap();
    let g = ZeroSumGame::from_unfolded(&small, 3);
    let c11 = idx(&small, &node(&a, "c", &[1, 1]));
    // the plain attractor has no notion of the sink being bad
    assert!(!attractor(&g, &diam(&small)).set[c11]);
    let p = punish_region(&small, 3, a.objective(3), None, 1 << 20).unwrap();
    assert!(!p.win[c11]);

    let large = unfold(&a, &[10, 10]).unwrap();
    let g = ZeroSumGame::from_unfolded(&large, 3);
    let c41 = idx(&large, &node(&a, "c", &[4, 1]));
    assert!(attractor(&g, &diam(&large)).set[c41]);
    let reach = careful_synth::zerosum::solve_condition(&g, &Condition::Reach(diam(&large)));
    assert!(reach.win[c41]);
    assert!(punish_region(&large, 3, a.objective(3), None, 1 << 20).unwrap().win[c41]);
}

#[test]
fn carefulness_alone_wins_everywhere_without_negative_costs() {
    let mut b = careful_synth::ArenaBuilder::new(2, 1);
    b.state("x", 1, &[]).state("y", 2, &[]).initial("x");
    b.edge("x", "y", &[0]).edge("y", "x", &[1]).edge("y", "y", &[0]);
    b.system_objective(Ltl::True)
        .objective(1, Ltl::True)
        .objective(2, Ltl::True);
    let a = b.build().unwrap();
    let u = unfold(&a, &[2]).unwrap();
    assert!(punish_region(&u, 1, &Ltl::True, None, 1 << 20)
        .unwrap()
        .win
        .iter()
        .all(|&w| w));
}

#[test]
fn solution_at_three_three() {
    let a = figure1();
    let opts = SolveOptions::default();
    let r = solve(&a, Some(&[3, 3]), &opts).unwrap();
    let p = r.profile().unwrap();
    assert_eq!(p.winners, BTreeSet::from([1, 2]));
    let l = p.base_lasso();
    let ids: Vec<&str> = l.stem.iter().chain(&l.cycle).map(|&s| a.id(s)).collect();
    assert_eq!(ids, ["a", "a", "a", "a", "b", "c", "(○,□)"]);
    assert!(check_certificate(&a, &[3, 3], p, &opts).unwrap().is_empty());
    // every deviation of player 3 underflows, so nothing needs punishing
    assert!(p.punishment.values().all(|t| t.is_empty()));
    let back = StrategyProfile::from_json(&a, &p.to_json(&a)).unwrap();
    assert_eq!(&back, p);
}

#[test]
fn no_solution_at_ten_ten() {
    let r = solve(&figure1(), Some(&[10, 10]), &SolveOptions::default()).unwrap();
    assert!(!r.is_solution());
}

#[test]
fn witness_for_the_winners_one_and_two() {
    let a = figure1();
    let u = unfold(&a, &[3, 3]).unwrap();
    let p3 = punish_region(&u, 3, a.objective(3), None, 1 << 20).unwrap();
    let forbidden: Vec<bool> = (0..u.num_states())
        .map(|x| p3.win[x] && u.state(x).base().is_some_and(|s| a.owner(s) == 3))
        .collect();
    let required = ["F circ", "F box", "G !bot"].map(|f| careful_synth::ltl::parse_ltl(f).unwrap());
    let l = find_witness_lasso(&u, &required, &forbidden, 1 << 20).unwrap().unwrap();
    let proj: Vec<&str> = l
        .stem
        .iter()
        .chain(&l.cycle)
        .map(|&x| a.id(u.state(x).base().unwrap()))
        .collect();
    assert_eq!(proj, ["a", "a", "a", "a", "b", "c", "(○,□)"]);

    let contradiction = ["F circ", "G !circ"].map(|f| careful_synth::ltl::parse_ltl(f).unwrap());
    assert!(
        find_witness_lasso(&u, &contradiction, &vec![false; u.num_states()], 1 << 20)
            .unwrap()
            .is_none()
    );
    assert!(
        find_witness_lasso(&u, &[Ltl::True], &vec![false; u.num_states()], 1 << 20)
            .unwrap()
            .is_some()
    );
}

#[test]
fn rerouting_through_box_violates_the_system_objective() {
    let a = figure1();
    let opts = SolveOptions::default();
    let mut p = solve(&a, Some(&[3, 3]), &opts).unwrap().profile().unwrap().clone();
    let u = unfold(&a, &[3, 3]).unwrap();
    let mut stem = lifted(&u, &["a", "a", "a", "a", "b", "(□)"]);
    p.cycle = vec![stem.pop().unwrap()];
    p.stem = stem;
    let v = check_certificate(&a, &[3, 3], &p, &opts).unwrap();
    assert!(v.contains(&Violation::SystemObjective), "{v:?}");
}

#[test]
fn the_small_capacity_path_fails_at_ten_ten() {
    let a = figure1();
    let u = unfold(&a, &[10, 10]).unwrap();
    let mut stem = lifted(&u, &["a", "a", "a", "a", "b", "c", "(○,□)"]);
    let p = StrategyProfile {
        bounds: vec![10, 10],
        cycle: vec![stem.pop().unwrap()],
        stem,
        winners: BTreeSet::from([1, 2]),
        punishment: Default::default(),
    };
    let v = check_certificate(&a, &[10, 10], &p, &SolveOptions::default()).unwrap();
    // the checker tags the state with the deviator's monitor state
    assert!(
        v.iter()
            .any(|x| matches!(x, Violation::ProfitableDeviation { player: 3, state } if state.starts_with("c@4,1"))),
        "{v:?}"
    );
}

#[test]
fn false_system_objective_has_no_solution() {
    let mut doc: serde_json::Value = serde_json::from_str(include_str!("../data/figure1.json")).unwrap();
    doc["objectives"]["system"] = "false".into();
    let a = parse_arena(&doc.to_string()).unwrap();
    assert!(!solve(&a, Some(&[3, 3]), &SolveOptions::default())
        .unwrap()
        .is_solution());
}
