use anyhow::Result;
use clap::Args;
use nlpm::automaton::Automaton;
use nlpm::{compare_efficiency, construct_anpma, two_phase_baseline, Verdict};
use rayon::prelude::*;

use crate::{load, strategy_for, PruningArg, UniverseArgs};

#[derive(Args)]
pub struct BenchArgs {
    /// Pattern file.
    patterns: std::path::PathBuf,
    #[command(flatten)]
    universe: UniverseArgs,
    /// Strategy for the pruned automaton.
    #[arg(long, default_value = "default")]
    strategy: String,
    /// Pruning level for the pruned automaton.
    #[arg(long, value_enum, default_value = "aggressive")]
    pruning: PruningArg,
}

#[derive(Default, Clone, Copy)]
struct Bucket {
    terms: usize,
    base_total: usize,
    base_max: usize,
    ours_total: usize,
    ours_max: usize,
    shorter: usize,
    longer: usize,
}

impl Bucket {
    fn add(&mut self, base: usize, ours: usize) {
        self.terms += 1;
        self.base_total += base;
        self.base_max = self.base_max.max(base);
        self.ours_total += ours;
        self.ours_max = self.ours_max.max(ours);
        self.shorter += usize::from(ours < base);
        self.longer += usize::from(ours > base);
    }

    fn mean(total: usize, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            total as f64 / n as f64
        }
    }
}

fn size_row(name: &str, m: &Automaton) {
    println!(
        "{name:<12}{:>8}{:>9}{:>11}",
        m.len(),
        m.breadth(),
        m.max_depth()
    );
}

pub fn run(args: &BenchArgs) -> Result<()> {
    let file = load(&args.patterns)?;
    let terms = crate::universe(&file, &args.universe)?;
    let strategy = strategy_for(&args.strategy, &file)?;
    let baseline = two_phase_baseline(&file.patterns)?;
    let ours = construct_anpma(&file.patterns, strategy.as_ref(), args.pruning.into())?;
    // Fails if the two automata disagree on any term.
    let cmp = compare_efficiency(&ours, &baseline, &terms)?;

    let runs: Vec<(Vec<usize>, usize, usize)> = terms
        .par_iter()
        .map(|t| -> Result<_> {
            let b = baseline.eval(t)?;
            let o = ours.eval(t)?;
            let len = o.len();
            Ok((o.result.into_iter().collect(), b.len(), len))
        })
        .collect::<Result<_>>()?;
    let labels = ours.labels();
    let mut buckets = vec![Bucket::default(); labels.len()];
    let mut unmatched = Bucket::default();
    let mut all = Bucket::default();
    for (result, b, o) in &runs {
        all.add(*b, *o);
        if result.is_empty() {
            unmatched.add(*b, *o);
        }
        for &i in result {
            buckets[i].add(*b, *o);
        }
    }

    println!(
        "{:<12}{:>8}{:>9}{:>11}",
        "automaton", "states", "breadth", "max depth"
    );
    size_row("baseline", &baseline);
    size_row("pruned", &ours);
    println!();
    println!(
        "{:<12}{:>7}{:>16}{:>16}{:>9}{:>8}",
        "terms", "count", "baseline mean", "pruned mean", "shorter", "longer"
    );
    let named = labels
        .iter()
        .map(String::as_str)
        .zip(buckets.iter())
        .chain([("(none)", &unmatched), ("all", &all)]);
    for (name, k) in named {
        println!(
            "{name:<12}{:>7}{:>11.2} /{:>3}{:>11.2} /{:>3}{:>9}{:>8}",
            k.terms,
            Bucket::mean(k.base_total, k.terms),
            k.base_max,
            Bucket::mean(k.ours_total, k.terms),
            k.ours_max,
            k.shorter,
            k.longer
        );
    }
    println!();
    let verdict = match cmp.verdict {
        Verdict::FirstDominates => "pruned dominates baseline".to_string(),
        Verdict::SecondDominates => "baseline dominates pruned".to_string(),
        Verdict::Equal => "equal on every term".to_string(),
        Verdict::Incomparable => "incomparable".to_string(),
    };
    println!("verdict: {verdict} over {} terms", cmp.terms);
    if let Some(t) = &cmp.first_faster {
        println!("pruned faster on: {t}");
    }
    if let Some(t) = &cmp.second_faster {
        println!("baseline faster on: {t}");
    }
    Ok(())
}
