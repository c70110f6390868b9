//! Two-player zero-sum solving on a hand-made six-state graph.

use careful_synth::zerosum::{attractor, solve_condition, solve_parity, Condition, ZeroSumGame};

fn show(name: &str, win: &[bool]) {
    let states: Vec<usize> = (0..win.len()).filter(|&s| win[s]).collect();
    println!("{name:<10} protagonist wins from {states:?}");
}

fn main() -> careful_synth::Result<()> {
    // even states belong to the protagonist; 5 is a losing sink
    let succ = vec![vec![1, 2], vec![0, 4], vec![2, 3], vec![4, 5], vec![4, 0], vec![5]];
    let owner = (0..6).map(|s| s % 2 == 0).collect();
    let g = ZeroSumGame::new(succ, owner)?.with_losing(vec![false, false, false, false, false, true])?;

    let target = vec![false, false, false, false, true, false];
    show("attractor", &attractor(&g, &target).set);
    show("reach", &solve_condition(&g, &Condition::Reach(target.clone())).win);
    show(
        "safe",
        &solve_condition(&g, &Condition::Safe(vec![true, true, true, false, true, false])).win,
    );
    show("buchi", &solve_condition(&g, &Condition::Buchi(target.clone())).win);
    show(
        "co-buchi",
        &solve_condition(&g, &Condition::CoBuchi(vec![true, false, true, false, false, false])).win,
    );

    let w = solve_parity(&g, &[1, 2, 3, 0, 2, 1])?;
    show("parity", &w.win);
    for s in 0..6 {
        if let Some(t) = w.strategy_at(&g, s) {
            println!("  winner at {s} moves to {t}");
        }
    }
    Ok(())
}
