use std::collections::BTreeSet;

use anyhow::{bail, Result};
use clap::Args;
use nlpm::anpma::Pruning;
use nlpm::automaton::{Automaton, StateKind};
use nlpm::rename::is_consistent_naive;
use nlpm::strategy::BUILTIN_NAMES;
use nlpm::{match_naive, IndexedPattern, Term};
use rayon::prelude::*;

use crate::{build, label_list, load, partitions, strategy_for, KindArg, PruningArg, UniverseArgs};

#[derive(Args)]
pub struct CheckArgs {
    /// Pattern file.
    patterns: std::path::PathBuf,
    #[command(flatten)]
    universe: UniverseArgs,
    /// Strategies to try (default: every builtin, plus `scripted` when the
    /// file has a script).
    #[arg(long, value_delimiter = ',')]
    strategies: Vec<String>,
    /// Pruning levels to try (default: all).
    #[arg(long = "pruning-levels", value_enum, value_delimiter = ',')]
    pruning_levels: Vec<PruningArg>,
    /// Corrupt one final state of every automaton, to exercise the
    /// counterexample path.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

/// Drops the labels of the first reachable final state that has any.
fn inject_fault(m: &mut Automaton) {
    let target = m
        .reachable()
        .into_iter()
        .find(|&s| matches!(m.state(s), StateKind::Final { labels } if !labels.is_empty()));
    if let Some(s) = target {
        *m.state_mut(s) = StateKind::Final {
            labels: BTreeSet::new(),
        };
    }
}

/// A term with the automaton's answer and the oracle's.
type Mismatch<'a> = (&'a Term, BTreeSet<usize>, BTreeSet<usize>);

/// The first term, in universe order, on which `m` and `oracle` disagree.
fn counterexample<'a>(
    m: &Automaton,
    terms: &'a [Term],
    oracle: impl Fn(&Term) -> Option<BTreeSet<usize>> + Sync,
) -> Result<Option<Mismatch<'a>>> {
    let found = terms
        .par_iter()
        .map(|t| -> Result<_> {
            let Some(want) = oracle(t) else {
                return Ok(None);
            };
            let got = m.eval(t)?.result;
            Ok((got != want).then_some((t, got, want)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(found.into_iter().flatten().next())
}

pub fn run(args: &CheckArgs) -> Result<bool> {
    let file = load(&args.patterns)?;
    let terms = crate::universe(&file, &args.universe)?;
    let names: Vec<String> = if args.strategies.is_empty() {
        let mut v: Vec<String> = BUILTIN_NAMES.iter().map(|s| s.to_string()).collect();
        if file.script.is_some() {
            v.push("scripted".into());
        }
        v
    } else {
        args.strategies.clone()
    };
    let levels: Vec<Pruning> = if args.pruning_levels.is_empty() {
        Pruning::ALL.to_vec()
    } else {
        args.pruning_levels.iter().map(|&p| p.into()).collect()
    };
    let linear: Vec<IndexedPattern> = file
        .patterns
        .iter()
        .filter(|p| p.term().is_linear())
        .cloned()
        .collect();
    let linear_file = nlpm::textio::PatternFile {
        signature: file.signature.clone(),
        script: file.script.clone(),
        patterns: linear.clone(),
    };
    let parts = partitions(&file);

    let mut configs = 0;
    let mut failures = 0;
    let mut skipped = 0;
    for name in &names {
        let s = strategy_for(name, &file)?;
        for &pr in &levels {
            for kind in [KindArg::Anpma, KindArg::Apma, KindArg::Ca] {
                let (source, kind_name) = match kind {
                    KindArg::Apma => (&linear_file, "apma"),
                    KindArg::Ca => (&file, "ca"),
                    KindArg::Anpma => (&file, "anpma"),
                };
                let mut m = match build(source, kind, s.as_ref(), pr) {
                    Ok(m) => m,
                    // A script may name only positions or only pairs.
                    Err(e) if name == "scripted" => {
                        println!("skip {kind_name} {name} {pr}: {e}");
                        skipped += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                if args.inject_fault {
                    inject_fault(&mut m);
                }
                configs += 1;
                let found = match kind {
                    KindArg::Anpma => {
                        counterexample(&m, &terms, |t| Some(match_naive(&file.patterns, t)))?
                    }
                    KindArg::Apma => counterexample(&m, &terms, |t| Some(match_naive(&linear, t)))?,
                    KindArg::Ca => counterexample(&m, &terms, |t| {
                        let mut ok = BTreeSet::new();
                        for (i, (_, p)) in parts.iter().enumerate() {
                            if is_consistent_naive(t, p).ok()? {
                                ok.insert(i);
                            }
                        }
                        Some(ok)
                    })?,
                };
                match found {
                    None => println!("ok   {kind_name} {name} {pr} ({} states)", m.len()),
                    Some((t, got, want)) => {
                        failures += 1;
                        println!(
                            "FAIL {kind_name} {name} {pr}: counterexample {t}: automaton {}, oracle {}",
                            label_list(&m, &got),
                            label_list(&m, &want)
                        );
                    }
                }
            }
        }
    }
    if configs == 0 {
        bail!("no configuration could be built");
    }
    if failures == 0 {
        println!(
            "pass: {configs} configurations, {} terms, {skipped} skipped",
            terms.len()
        );
        Ok(true)
    } else {
        println!("{failures} of {configs} configurations have counterexamples");
        Ok(false)
    }
}
