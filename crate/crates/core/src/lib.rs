//! Careful cooperative rational synthesis for turn-based multi-player games
//! sharing several common resources.
//!
//! A game ([`Arena`]) is a finite graph whose edges carry integer cost
//! vectors, one component per resource. Every player has an LTL objective and
//! the system has a global one. A *careful* solution is a Nash equilibrium
//! whose outcome satisfies the system objective and never drives any resource
//! below zero. The general problem is undecidable; when every resource has a
//! finite capacity it reduces to plain rational synthesis on the resource
//! unfolding of the game, which is what [`synthesis::solve`] implements.
//!
//! The crate is organised bottom-up:
//!
//! - [`arena`]: game data model, JSON document format, cost arithmetic.
//! - [`ltl`]: formulas, lasso evaluation, Büchi translation, fragments.
//! - [`unfolding`]: saturating resource arithmetic and the unfolded arena.
//! - [`zerosum`]: attractors, fragment solvers, Zielonka, punishment regions.
//! - [`synthesis`]: witness search, profile construction, certificate checks.
//! - [`reduction`]: counter automata and the game encoding of their
//!   reachability problem.
//! - [`cli`]: the `careful-synth` command line front end.

pub mod arena;
pub mod atoms;
mod buchi;
pub mod cli;
pub mod error;
pub mod ltl;
pub mod reduction;
pub mod synthesis;
pub mod unfolding;
pub mod zerosum;

pub use arena::{Arena, ArenaBuilder, GameGraph, Lasso, PlayerId, StateIdx};
pub use atoms::{AtomTable, Valuation};
pub use error::{Error, Result};
pub use ltl::Ltl;
pub use synthesis::{solve, SolveOptions, SolveResult, StrategyProfile};
pub use unfolding::{unfold, UState, UnfoldedArena};
