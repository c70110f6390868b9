//! Unfolds the running example under capacities given on the command line
//! (default 3,3) and writes Graphviz to stdout, statistics to stderr.
//!
//! cargo run --example unfold_dot -- 2,2 | dot -Tsvg > unfolding.svg

use careful_synth::arena::parse_arena;
use careful_synth::unfold;

fn main() -> careful_synth::Result<()> {
    let bounds: Vec<i64> = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "3,3".into())
        .split(',')
        .map(|x| x.trim().parse().expect("integer bound"))
        .collect();
    let a = parse_arena(include_str!("../data/figure1.json"))?;
    let u = unfold(&a, &bounds)?;
    eprintln!("{}", u.stats());
    print!("{}", u.to_dot());
    Ok(())
}
