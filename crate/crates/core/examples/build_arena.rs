//! Builds a two-player arena in code, checks a few plays against the energy
//! conditions and prints its JSON document.

use careful_synth::arena::{cost_of_history, multi_energy_check_unbounded, payoff};
use careful_synth::{ArenaBuilder, Ltl};

fn main() -> careful_synth::Result<()> {
    let mut b = ArenaBuilder::new(2, 1);
    b.atom("goal")
        .state("home", 1, &[])
        .state("shop", 2, &[])
        .state("done", 1, &["goal"])
        .initial("home")
        .edge("home", "home", &[1])
        .edge("home", "shop", &[-2])
        .edge("shop", "home", &[0])
        .edge("shop", "done", &[-1])
        .edge("done", "done", &[0])
        .system_objective(Ltl::True)
        .objective(1, Ltl::atom("goal").finally())
        .objective(2, Ltl::atom("goal").finally().not());
    let a = b.build()?;

    let h = a.history(&["home", "home", "home", "shop", "done"])?;
    println!("cost of home^3 shop done: {:?}", cost_of_history(&a, &h)?);
    for (stem, cycle) in [
        (vec!["home", "home", "home", "shop"], vec!["done"]),
        (vec!["home"], vec!["shop", "home"]),
    ] {
        let l = a.lasso(&stem, &cycle)?;
        println!(
            "{stem:?} ({cycle:?})^ω: careful {}, payoffs {} {}",
            multi_energy_check_unbounded(&a, &l)?,
            payoff(&a, &l, 1)?,
            payoff(&a, &l, 2)?
        );
    }
    println!("{}", a.to_json());
    Ok(())
}
