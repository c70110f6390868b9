//! A player objective outside the built-in fragments, handled through a
//! user-supplied deterministic parity automaton.

use careful_synth::arena::parse_arena;
use careful_synth::synthesis::check_certificate;
use careful_synth::zerosum::parse_dpa;
use careful_synth::{solve, SolveOptions};

fn main() -> careful_synth::Result<()> {
    let a = parse_arena(include_str!("../data/figure1-twice.json"))?;
    println!("player 3 wants: {}", a.objective(3));

    let plain = solve(&a, Some(&[3, 3]), &SolveOptions::default())?;
    println!("without an automaton: solution = {}", plain.is_solution());

    let mut opts = SolveOptions::default();
    opts.dpas
        .insert(3, parse_dpa(include_str!("../data/dpa/diam-twice.json"))?);
    for bounds in [[3, 3], [10, 10]] {
        let r = solve(&a, Some(&bounds), &opts)?;
        match r.profile() {
            Some(p) => println!(
                "{bounds:?}: solution, winners {:?}, checker {:?}",
                p.winners,
                check_certificate(&a, &bounds, p, &opts)?
            ),
            None => println!("{bounds:?}: no solution"),
        }
    }
    Ok(())
}
