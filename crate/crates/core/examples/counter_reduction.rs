//! Encodes every counter automaton of the bundled corpus as a game and
//! compares the bounded solver with a direct simulation.

use careful_synth::reduction::{build_game, parse_counter_automaton, simulate_reachability, suggested_bounds};
use careful_synth::{solve, GameGraph, SolveOptions};

fn main() -> careful_synth::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data/counter-automata");
    let mut files: Vec<_> = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    files.sort();
    for path in files {
        let ca = parse_counter_automaton(&std::fs::read_to_string(&path)?)?;
        let t = ca.target.expect("corpus files name a target");
        let sim = simulate_reachability(&ca, t, 1_000_000)?;
        let max = sim.witness().map_or(6, |r| r.max_value());
        let game = build_game(&ca, t)?;
        let bounds = suggested_bounds(&ca, max);
        let verdict = solve(&game, Some(&bounds), &SolveOptions::default())?;
        println!(
            "{:<20} {:>3} states  run: {:<8} game at {bounds:?}: {}",
            path.file_stem().unwrap().to_string_lossy(),
            game.num_states(),
            sim.witness()
                .map_or("none".to_string(), |r| format!("{} steps", r.len())),
            if verdict.is_solution() {
                "solution"
            } else {
                "no solution"
            }
        );
    }
    Ok(())
}
