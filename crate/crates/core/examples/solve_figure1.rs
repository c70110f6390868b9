//! Solves the three-player running example at two capacities and prints the
//! equilibrium outcome with its resource vectors.

use careful_synth::arena::parse_arena;
use careful_synth::cli::render_outcome;
use careful_synth::{solve, SolveOptions, SolveResult};

fn main() -> careful_synth::Result<()> {
    let a = parse_arena(include_str!("../data/figure1.json"))?;
    for bounds in [[3, 3], [10, 10]] {
        println!("bounds {bounds:?}");
        match solve(&a, Some(&bounds), &SolveOptions::default())? {
            SolveResult::Solution(p) => println!("{}", render_outcome(&a, &p)),
            SolveResult::NoSolution(failures) => {
                for f in failures {
                    println!("  winners {:?}: {}", f.winners, f.reason);
                }
            }
            SolveResult::Unsupported(why) => println!("  unsupported: {why}"),
        }
    }
    Ok(())
}
