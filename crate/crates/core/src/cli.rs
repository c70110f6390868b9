//! The `careful-synth` command line.
//!
//! Every subcommand writes a machine-readable document to standard output
//! (or `--output`) and diagnostics to standard error. Exit codes: 0 for a
//! positive answer, 1 for a negative one (no solution, failed check), 2 for
//! usage errors, invalid input and unsupported objectives.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::arena::{cumulative_costs, multi_energy_check_unbounded, parse_arena, Arena, GameGraph, Lasso};
use crate::error::{Error, Result};
use crate::ltl::{eval_on_lasso, parse_ltl};
use crate::reduction::{build_game, parse_counter_automaton};
use crate::synthesis::{check_certificate, solve_unfolded, SolveOptions, SolveResult, StrategyProfile};
use crate::unfolding::{lift_lasso, unfold_with_budget, UState};
use crate::zerosum::parse_dpa;

#[derive(Debug, Parser)]
#[command(
    name = "careful-synth",
    version,
    about = "Careful cooperative rational synthesis for games with bounded common resources"
)]
pub struct Invocation {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for the parallel solver stages (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    /// Write the main document here instead of standard output.
    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide careful synthesis and print a certificate or diagnostics.
    Solve {
        arena: PathBuf,
        #[command(flatten)]
        bounds: BoundsArg,
        #[command(flatten)]
        dpa: DpaArg,
        /// Also print the outcome with its resource vectors to stderr.
        #[arg(long)]
        pretty: bool,
    },
    /// Print the reachable resource unfolding.
    Unfold {
        arena: PathBuf,
        #[command(flatten)]
        bounds: BoundsArg,
        /// Also write a Graphviz rendering to this file.
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Verify a strategy profile against an arena.
    Check {
        arena: PathBuf,
        profile: PathBuf,
        #[command(flatten)]
        bounds: BoundsArg,
        #[command(flatten)]
        dpa: DpaArg,
    },
    /// Evaluate a formula and the energy conditions on a lasso.
    Mc {
        arena: PathBuf,
        /// Lasso document `{"stem": [...], "loop": [...]}`, as a path or inline.
        lasso: String,
        formula: String,
        #[command(flatten)]
        bounds: BoundsArg,
    },
    /// Encode a 2-counter automaton as an arena.
    GenReduction {
        automaton: PathBuf,
        /// Target location; defaults to the automaton's `target`.
        #[arg(long)]
        target: Option<String>,
    },
    /// Size report for an arena and, with bounds, its unfolding.
    Stats {
        arena: PathBuf,
        #[command(flatten)]
        bounds: BoundsArg,
    },
}

#[derive(Debug, Args)]
pub struct BoundsArg {
    /// Resource capacities, overriding those in the arena document.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, value_name = "B1,B2,...")]
    pub bounds: Option<Vec<i64>>,
}

#[derive(Debug, Args)]
pub struct DpaArg {
    /// Parity automaton for a player's objective, as `PLAYER=FILE`.
    #[arg(long = "dpa", value_name = "PLAYER=FILE", value_parser = parse_dpa_arg)]
    pub dpa: Vec<(usize, PathBuf)>,
}

fn parse_dpa_arg(s: &str) -> std::result::Result<(usize, PathBuf), String> {
    let (p, f) = s.split_once('=').ok_or("expected PLAYER=FILE")?;
    let p = p.trim().parse().map_err(|_| format!("`{p}` is not a player number"))?;
    Ok((p, PathBuf::from(f)))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LassoDoc {
    stem: Vec<String>,
    #[serde(rename = "loop")]
    cycle: Vec<String>,
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let inv = match Invocation::try_parse_from(argv) {
        Ok(inv) => inv,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(inv.jobs.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    };
    let mut doc = Vec::new();
    let mut diag = Vec::new();
    let result = pool.install(|| execute(&inv.command, &mut doc, &mut diag));
    let _ = stderr.write_all(&diag);
    match result {
        Ok(code) => {
            let written = match &inv.output {
                Some(path) => fs::write(path, &doc).map_err(Error::from),
                None => stdout.write_all(&doc).map_err(Error::from),
            };
            match written {
                Ok(()) => code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    2
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_arena(path: &Path) -> Result<Arena> {
    parse_arena(&read(path)?)
}

/// Flag bounds win over document bounds, with a warning when they differ.
fn resolve_bounds(a: &Arena, flag: &BoundsArg, stderr: &mut dyn Write) -> Option<Vec<i64>> {
    match (&flag.bounds, a.bounds()) {
        (Some(f), Some(d)) => {
            if f.as_slice() != d {
                let _ = writeln!(stderr, "warning: --bounds {f:?} overrides the arena's bounds {d:?}");
            }
            Some(f.clone())
        }
        (Some(f), None) => Some(f.clone()),
        (None, d) => d.map(<[i64]>::to_vec),
    }
}

fn options(dpa: &DpaArg) -> Result<SolveOptions> {
    let mut dpas = BTreeMap::new();
    for (p, file) in &dpa.dpa {
        dpas.insert(*p, parse_dpa(&read(file)?)?);
    }
    Ok(SolveOptions {
        dpas,
        ..SolveOptions::default()
    })
}

fn json_line(out: &mut Vec<u8>, v: &impl Serialize) {
    out.extend(serde_json::to_string_pretty(v).expect("serializable").into_bytes());
    out.push(b'\n');
}

fn execute(cmd: &Command, out: &mut Vec<u8>, stderr: &mut Vec<u8>) -> Result<i32> {
    match cmd {
        Command::Solve {
            arena,
            bounds,
            dpa,
            pretty,
        } => {
            let a = load_arena(arena)?;
            let opts = options(dpa)?;
            let b = resolve_bounds(&a, bounds, stderr).ok_or(Error::Unbounded)?;
            let u = unfold_with_budget(&a, &b, opts.state_budget)?;
            let sat = u.saturated_edges();
            if sat > 0 {
                let _ = writeln!(
                    stderr,
                    "note: the capacities clip resource values on {sat} unfolded edges; the verdict \
                     is for the bounded semantics only"
                );
            }
            let r = solve_unfolded(&u, &opts)?;
            json_line(out, &r.to_document(&a));
            match &r {
                SolveResult::Solution(p) => {
                    if *pretty {
                        let _ = writeln!(stderr, "{}", render_outcome(&a, p));
                    }
                    Ok(0)
                }
                SolveResult::NoSolution(_) => Ok(1),
                SolveResult::Unsupported(reason) => {
                    let _ = writeln!(stderr, "unsupported: {reason}");
                    Ok(2)
                }
            }
        }
        Command::Unfold { arena, bounds, dot } => {
            let a = load_arena(arena)?;
            let b = resolve_bounds(&a, bounds, stderr).ok_or(Error::Unbounded)?;
            let u = unfold_with_budget(&a, &b, SolveOptions::default().state_budget)?;
            json_line(out, &u.to_document());
            if let Some(path) = dot {
                fs::write(path, u.to_dot())?;
            }
            Ok(0)
        }
        Command::Check {
            arena,
            profile,
            bounds,
            dpa,
        } => {
            let a = load_arena(arena)?;
            let opts = options(dpa)?;
            let p = StrategyProfile::from_json(&a, &read(profile)?)?;
            let b = bounds.bounds.clone().unwrap_or_else(|| p.bounds.clone());
            let violations = check_certificate(&a, &b, &p, &opts)?;
            let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
            json_line(out, &json!({ "ok": violations.is_empty(), "violations": text }));
            Ok(if violations.is_empty() { 0 } else { 1 })
        }
        Command::Mc {
            arena,
            lasso,
            formula,
            bounds,
        } => {
            let a = load_arena(arena)?;
            let text = if lasso.trim_start().starts_with('{') {
                lasso.clone()
            } else {
                read(Path::new(lasso))?
            };
            let doc: LassoDoc = serde_json::from_str(&text).map_err(Error::json)?;
            let stem: Vec<&str> = doc.stem.iter().map(String::as_str).collect();
            let cycle: Vec<&str> = doc.cycle.iter().map(String::as_str).collect();
            let l = a.lasso(&stem, &cycle)?;
            let phi = parse_ltl(formula)?;
            let holds = eval_on_lasso(&phi, a.atoms(), &l.word(&a))?;
            let (cumulative, net) = cumulative_costs(&a, &l)?;
            let mut report = json!({
                "formula": phi.to_string(),
                "holds": holds,
                "unbounded": {
                    "careful": multi_energy_check_unbounded(&a, &l)?,
                    "cumulative": cumulative,
                    "cycle_net": net,
                },
            });
            if let Some(b) = resolve_bounds(&a, bounds, stderr) {
                report["bounded"] = bounded_report(&a, &l, &b)?;
            }
            json_line(out, &report);
            Ok(0)
        }
        Command::GenReduction { automaton, target } => {
            let ca = parse_counter_automaton(&read(automaton)?)?;
            let t = match target {
                Some(name) => ca
                    .location(name)
                    .ok_or_else(|| Error::InvalidCounterAutomaton(format!("unknown target location `{name}`")))?,
                None => ca.target.ok_or_else(|| {
                    Error::InvalidCounterAutomaton("no target given in the document or by --target".into())
                })?,
            };
            let g = build_game(&ca, t)?;
            out.extend(g.to_json().into_bytes());
            out.push(b'\n');
            Ok(0)
        }
        Command::Stats { arena, bounds } => {
            let a = load_arena(arena)?;
            let mut report = json!({
                "players": a.players(),
                "dimensions": a.dimensions(),
                "states": a.num_states(),
                "edges": a.edges().len(),
            });
            if let Some(b) = resolve_bounds(&a, bounds, stderr) {
                let u = unfold_with_budget(&a, &b, SolveOptions::default().state_budget)?;
                let s = u.stats();
                report["unfolding"] = json!({
                    "bounds": b,
                    "states": s.states,
                    "edges": s.edges,
                    "sink_reachable": s.bot_reachable,
                    "saturated_edges": s.saturated_edges,
                    "product_bound": s.product_bound.to_string(),
                    "max_per_base_state": s.max_per_base_state,
                });
            }
            json_line(out, &report);
            Ok(0)
        }
    }
}

fn bounded_report(a: &Arena, l: &Lasso, b: &[i64]) -> Result<serde_json::Value> {
    Ok(match lift_lasso(a, l, b)? {
        Some((stem, cycle)) => {
            let ids = |v: &[UState]| v.iter().map(|s| s.id(a)).collect::<Vec<_>>();
            json!({
                "bounds": b,
                "careful": true,
                "stem": ids(&stem),
                "loop": ids(&cycle),
            })
        }
        None => json!({ "bounds": b, "careful": false }),
    })
}

/// One line per outcome position, `state  (r1,r2,...)`, with the loop
/// marked.
pub fn render_outcome(a: &Arena, p: &StrategyProfile) -> String {
    let l = p.base_lasso();
    let trace = l.trace.clone().unwrap_or_default();
    let mut out = String::from("outcome:\n");
    for (k, s) in l.positions().enumerate() {
        let mark = if k == l.stem.len() { "loop> " } else { "      " };
        let r: Vec<String> = trace[k].iter().map(i64::to_string).collect();
        out.push_str(&format!("{mark}{:<12} ({})  P{}\n", a.id(s), r.join(","), a.owner(s)));
    }
    let w: Vec<String> = p.winners.iter().map(|w| w.to_string()).collect();
    out.push_str(&format!("winners: {{{}}}", w.join(",")));
    out
}
