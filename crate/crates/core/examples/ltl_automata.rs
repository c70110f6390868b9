//! Parses formulas, evaluates them on an ultimately periodic word, and
//! compares with membership in the translated Büchi automaton.

use careful_synth::ltl::{classify_fragment, eval_on_lasso, parse_ltl, to_nba, LassoWord};
use careful_synth::{AtomTable, Valuation};

fn main() {
    let mut atoms = AtomTable::new();
    atoms.insert("p");
    atoms.insert("q");
    // stem {p} {}, then ({q} {p,q})^ω; bit 0 is p, bit 1 is q
    let word = LassoWord::new(vec![Valuation(1), Valuation(0)], vec![Valuation(2), Valuation(3)]);

    for text in [
        "F q",
        "G p",
        "G F p",
        "F G q",
        "p U (X !p)",
        "X X (q U p)",
        "G (!p | F q)",
        "F (p &",
    ] {
        let phi = match parse_ltl(text) {
            Ok(phi) => phi,
            Err(e) => {
                println!("{text:<14} rejected: {e}");
                continue;
            }
        };
        let nba = to_nba(&phi);
        let bound = nba.bind(&atoms).expect("atoms are known");
        println!(
            "{:<14} {:<10} holds {:<5} nba: {} states, accepts {}",
            phi.to_string(),
            classify_fragment(&phi).to_string(),
            eval_on_lasso(&phi, &atoms, &word).unwrap(),
            nba.num_states,
            bound.accepts(&word)
        );
    }
}
