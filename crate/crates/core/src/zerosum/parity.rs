use super::{attractor_in, first_in, Side, StateSet, WinningRegions, ZeroSumGame};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_PRIORITY: u32 = 16;

/// Max-parity game: the protagonist wins when the largest priority seen
/// infinitely often is even. Losing states get the top odd priority.
pub fn solve_parity(g: &ZeroSumGame, priority: &[u32]) -> Result<WinningRegions> {
    solve_parity_bounded(g, priority, DEFAULT_MAX_PRIORITY)
}

pub fn solve_parity_bounded(g: &ZeroSumGame, priority: &[u32], max: u32) -> Result<WinningRegions> {
    let n = g.num_states();
    if priority.len() != n {
        return Err(Error::InvalidArena("priority map does not cover the game".into()));
    }
    if let Some(&p) = priority.iter().find(|&&p| p > max) {
        return Err(Error::PriorityBound { priority: p, max });
    }
    let top = priority.iter().copied().max().unwrap_or(0);
    let top_odd = top | 1;
    let prio: Vec<u32> = (0..n)
        .map(|s| if g.losing()[s] { top_odd } else { priority[s] })
        .collect();

    let mut winner = vec![Side::Antagonist; n];
    let mut strategy = vec![None; n];
    zielonka(g, &prio, vec![true; n], &mut winner, &mut strategy);

    let win: StateSet = winner.iter().map(|&w| w == Side::Protagonist).collect();
    let mut protagonist_strategy = vec![None; n];
    let mut antagonist_strategy = vec![None; n];
    for s in 0..n {
        match (g.owner(s), win[s]) {
            (Side::Protagonist, true) => protagonist_strategy[s] = strategy[s],
            (Side::Antagonist, false) => antagonist_strategy[s] = strategy[s],
            _ => {}
        }
    }
    Ok(WinningRegions {
        win,
        protagonist_strategy,
        antagonist_strategy,
    })
}

/// Writes the winner and, for states won by their owner, a winning move.
/// The second recursive call of the textbook algorithm is a loop here, so
/// the recursion depth is bounded by the number of priorities.
fn zielonka(g: &ZeroSumGame, prio: &[u32], mut arena: StateSet, winner: &mut [Side], strategy: &mut [Option<usize>]) {
    let n = g.num_states();
    loop {
        let Some(p) = (0..n).filter(|&s| arena[s]).map(|s| prio[s]).max() else {
            return;
        };
        let side = if p % 2 == 0 {
            Side::Protagonist
        } else {
            Side::Antagonist
        };
        let top: StateSet = (0..n).map(|s| arena[s] && prio[s] == p).collect();
        let a = attractor_in(g, side, &top, &arena);
        let sub: StateSet = (0..n).map(|s| arena[s] && !a.set[s]).collect();
        zielonka(g, prio, sub.clone(), winner, strategy);
        let opp_sub: StateSet = (0..n).map(|s| sub[s] && winner[s] == side.opponent()).collect();
        if !opp_sub.iter().any(|&b| b) {
            // side wins all of arena; sub already carries its moves
            for s in (0..n).filter(|&s| a.set[s]) {
                winner[s] = side;
                if g.owner(s) == side {
                    strategy[s] = a.strategy[s].or_else(|| first_in(g, s, &arena));
                }
            }
            return;
        }
        let b = attractor_in(g, side.opponent(), &opp_sub, &arena);
        for s in (0..n).filter(|&s| b.set[s]) {
            winner[s] = side.opponent();
            if g.owner(s) == side.opponent() && !opp_sub[s] {
                strategy[s] = b.strategy[s];
            }
        }
        for (x, &gone) in arena.iter_mut().zip(&b.set) {
            *x &= !gone;
        }
    }
}
