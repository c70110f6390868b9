use super::{
    dpa_product, fragment_dpa, solve_fragment, solve_parity, BoundDpa, Dpa, DpaProduct, StateSet, WinningRegions,
    ZeroSumGame,
};
use crate::arena::{GameGraph, PlayerId};
use crate::error::{Error, Result};
use crate::ltl::{classify_fragment, FragmentClass, Ltl};
use crate::unfolding::UnfoldedArena;

/// Where a deviating player can win, and how the others punish it.
///
/// Prefix-independent fragments (reachability, Büchi, co-Büchi) are solved
/// directly on the unfolding. Safety objectives and user automata depend on
/// the history, so they are solved on the product with a DPA that monitors
/// the play; regions and strategies are then keyed by product states.
#[derive(Clone, Debug)]
pub struct Punishment {
    pub player: PlayerId,
    /// `Win_i` on unfolded states, for plays starting there.
    pub win: StateSet,
    /// Regions on the unfolding, or on `monitor.product` when monitored.
    pub regions: WinningRegions,
    pub monitor: Option<Monitor>,
}

#[derive(Clone, Debug)]
pub struct Monitor {
    pub dpa: BoundDpa,
    pub product: DpaProduct,
}

impl Punishment {
    /// Whether an outcome visiting unfolded state `s`, owned by this player,
    /// with monitor state `q` lets the player deviate profitably.
    pub fn forbids(&self, s: usize, q: Option<usize>) -> bool {
        match (&self.monitor, q) {
            (None, _) => self.win[s],
            (Some(m), Some(q)) => m.product.get(s, q).is_some_and(|p| self.regions.win[p]),
            (Some(_), None) => panic!("monitored punishment needs a monitor state"),
        }
    }

    /// Coalition move at unfolded state `s` (monitor state `q`), if the
    /// state lies in the coalition's region.
    pub fn punish_move(&self, u: &UnfoldedArena, s: usize, q: Option<usize>) -> Option<usize> {
        match (&self.monitor, q) {
            (None, _) => self.regions.antagonist_strategy[s],
            (Some(m), Some(q)) => {
                let p = m.product.get(s, q)?;
                let d = self.regions.antagonist_strategy[p]?;
                let dst = m.product.pairs[d].0;
                debug_assert!(u.has_edge(s, dst));
                Some(dst)
            }
            (Some(_), None) => None,
        }
    }
}

/// Solves the deviation game of player `i`: `i` alone against everyone
/// else, for `obj_i` conjoined with never reaching the depletion sink.
pub fn punish_region(
    u: &UnfoldedArena,
    i: PlayerId,
    obj_i: &Ltl,
    dpa_i: Option<&Dpa>,
    product_budget: usize,
) -> Result<Punishment> {
    let g = ZeroSumGame::from_unfolded(u, i);
    let monitored = |dpa: Dpa| -> Result<Punishment> {
        let bound = dpa.bind(u.atoms())?;
        let product = dpa_product(&g, &bound, &[], product_budget)?;
        let regions = solve_parity(&product.game, &product.priority)?;
        let win = (0..g.num_states())
            .map(|s| {
                let q = bound.step(bound.initial, g.label(s));
                regions.win[product.get(s, q).expect("fresh pairs are seeded")]
            })
            .collect();
        Ok(Punishment {
            player: i,
            win,
            regions,
            monitor: Some(Monitor { dpa: bound, product }),
        })
    };
    if let Some(dpa) = dpa_i {
        return monitored(dpa.clone());
    }
    let frag = classify_fragment(obj_i);
    match frag {
        FragmentClass::General => Err(Error::UnsupportedObjective {
            player: i,
            formula: obj_i.to_string(),
        }),
        FragmentClass::Safe(_) => monitored(fragment_dpa(&frag).expect("fragment")),
        _ => {
            let regions = solve_fragment(&g, &frag)?;
            Ok(Punishment {
                player: i,
                win: regions.win.clone(),
                regions,
                monitor: None,
            })
        }
    }
}
