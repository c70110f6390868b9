//! Round-trips a solution through its JSON document, re-checks it, then
//! breaks it in two ways and shows what the checker reports.

use careful_synth::arena::parse_arena;
use careful_synth::synthesis::check_certificate;
use careful_synth::{solve, unfold, SolveOptions, StrategyProfile};

fn main() -> careful_synth::Result<()> {
    let a = parse_arena(include_str!("../data/figure1.json"))?;
    let opts = SolveOptions::default();
    let r = solve(&a, Some(&[3, 3]), &opts)?;
    let p = StrategyProfile::from_json(&a, &r.to_json(&a))?;
    println!("original: {:?}", check_certificate(&a, &[3, 3], &p, &opts)?);

    // player 2 heads for the box directly
    let u = unfold(&a, &[3, 3])?;
    let h = a.history(&["a", "a", "a", "a", "b", "(□)"])?;
    let mut path: Vec<_> = u.lift(h.states())?.into_iter().map(|x| u.state(x).clone()).collect();
    let mut rerouted = p.clone();
    rerouted.cycle = vec![path.pop().unwrap()];
    rerouted.stem = path;
    for v in check_certificate(&a, &[3, 3], &rerouted, &opts)? {
        println!("rerouted: {v}");
    }

    // the same route with more room lets player 3 escape to the diamond
    let u = unfold(&a, &[10, 10])?;
    let h = a.history(&["a", "a", "a", "a", "b", "c", "(○,□)"])?;
    let mut path: Vec<_> = u.lift(h.states())?.into_iter().map(|x| u.state(x).clone()).collect();
    let roomy = StrategyProfile {
        bounds: vec![10, 10],
        cycle: vec![path.pop().unwrap()],
        stem: path,
        ..p
    };
    for v in check_certificate(&a, &[10, 10], &roomy, &opts)? {
        println!("at 10,10: {v}");
    }
    Ok(())
}
