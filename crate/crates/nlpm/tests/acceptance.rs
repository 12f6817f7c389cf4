//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use nlpm::anpma::Pruning;
use nlpm::automaton::StateKind;
use nlpm::position::pair;
use nlpm::rename::{is_consistent_naive, rename_all};
use nlpm::strategy::{builtin_strategies, DefaultStrategy, LeftToRight, Strategy};
use nlpm::textio::{parse_pattern_file, parse_term, PatternFile};
use nlpm::universe::{enumerate, DEFAULT_CAP};
use nlpm::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

/// Every automaton built by criteria 1 to 9, plus a count of traces that
/// inspected some position twice.
#[derive(Default)]
struct Registry {
    automata: Mutex<Vec<(String, Automaton)>>,
    traces: AtomicUsize,
    non_canonical: Mutex<Vec<String>>,
}

impl Registry {
    fn keep(&self, name: impl Into<String>, m: &Automaton) {
        self.automata.lock().unwrap().push((name.into(), m.clone()));
    }

    /// Evaluates and records whether the trace was canonical.
    fn eval(&self, m: &Automaton, t: &Term) -> EvalTrace {
        let trace = m.eval(t).expect("ground term, positions defined");
        let mut seen = HashSet::new();
        let canonical = trace.steps.iter().all(|(s, _)| match m.state(*s) {
            StateKind::Match { pos, .. } => seen.insert(pos.clone()),
            _ => true,
        });
        self.traces.fetch_add(1, Ordering::Relaxed);
        if !canonical {
            self.non_canonical.lock().unwrap().push(t.to_string());
        }
        trace
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn load(name: &str) -> PatternFile {
    let text = std::fs::read_to_string(format!("{FIXTURES}/{name}")).expect("fixture exists");
    parse_pattern_file(&text).expect("fixture parses")
}

fn term(file: &PatternFile, s: &str) -> Term {
    parse_term(&file.signature, s).expect("term parses")
}

fn set(xs: &[usize]) -> BTreeSet<usize> {
    xs.iter().copied().collect()
}

fn names(m: &Automaton, r: &BTreeSet<usize>) -> String {
    let n = m.label_names(r);
    if n.is_empty() {
        "{}".into()
    } else {
        format!("{{{}}}", n.join(","))
    }
}

fn ternary_counts(reg: &Registry) -> Outcome {
    let start = Instant::now();
    let file = load("ternary.pat");
    let swapped = load("ternary-swapped.pat");
    let m = construct_apma(&file.patterns, file.script.as_ref().unwrap(), false).unwrap();
    let n = construct_apma(&swapped.patterns, swapped.script.as_ref().unwrap(), false).unwrap();
    let took = start.elapsed();
    reg.keep("ternary apma", &m);
    reg.keep("ternary apma swapped", &n);
    Outcome::new(
        m.len() == 8 && n.len() == 9 && took < Duration::from_secs(1),
        format!(
            "states {} and {} (want 8 and 9) in {took:.2?}",
            m.len(),
            n.len()
        ),
    )
}

fn ternary_traces(reg: &Registry) -> Outcome {
    let file = load("ternary.pat");
    let m = construct_apma(&file.patterns, file.script.as_ref().unwrap(), false).unwrap();
    let cases = [
        ("f(a, b, a)", set(&[0])),
        ("f(b, b, b)", set(&[])),
        ("f(c, b, b)", set(&[1])),
    ];
    let mut detail = String::new();
    let mut pass = true;
    for (t, want) in cases {
        let got = reg.eval(&m, &term(&file, t)).result;
        pass &= got == want;
        write!(detail, "{t} -> {} ", names(&m, &got)).unwrap();
    }
    Outcome::new(pass, detail.trim_end())
}

fn rename_partitions() -> Outcome {
    let file = load("partitions.pat");
    let got: Vec<String> = rename_all(&file.patterns)
        .iter()
        .map(|r| r.partition.to_string())
        .collect();
    let want = ["{{1,2},{3}}", "{{1,3},{2}}", "{{1,2,3}}"];
    Outcome::new(got == want, got.join(" "))
}

/// The three-partition CA drawn with two grey comparisons: the repeated
/// {2,3} comparison under both outcomes of {1,3}. State ids in preorder.
fn drawn_ca() -> Automaton {
    let cons = |p: &str, q: &str, eq: usize, ne: usize| StateKind::Cons {
        pair: pair(p, q),
        eq: StateId(eq),
        ne: StateId(ne),
    };
    let fin = |xs: &[usize]| StateKind::Final { labels: set(xs) };
    let states = vec![
        cons("1", "2", 1, 8),
        cons("1", "3", 2, 5),
        cons("2", "3", 3, 4),
        fin(&[0, 1, 2]),
        fin(&[0, 1]),
        cons("2", "3", 6, 7),
        fin(&[0]),
        fin(&[0]),
        cons("1", "3", 9, 10),
        fin(&[1]),
        fin(&[]),
    ];
    let labels = vec!["P1".into(), "P2".into(), "P3".into()];
    Automaton::new(Kind::Ca, labels, states, StateId(0))
}

fn partition_list(file: &PatternFile) -> Vec<(String, ConsistencyPartition)> {
    rename_all(&file.patterns)
        .into_iter()
        .map(|r| (r.label, r.partition))
        .collect()
}

fn consistency_fixture(reg: &Registry) -> Outcome {
    let file = load("partitions.pat");
    let t = term(&file, "f(a, a, b)");
    let naive: BTreeSet<usize> = partition_list(&file)
        .iter()
        .enumerate()
        .filter(|(_, (_, p))| is_consistent_naive(&t, p).unwrap())
        .map(|(i, _)| i)
        .collect();
    let drawn = drawn_ca();
    reg.keep("drawn ca", &drawn);
    let by_ca = reg.eval(&drawn, &t).result;
    let built = construct_ca(&partition_list(&file), file.script.as_ref().unwrap()).unwrap();
    reg.keep("constructed ca", &built);
    let by_built = reg.eval(&built, &t).result;
    Outcome::new(
        naive == set(&[0]) && by_ca == naive && by_built == naive,
        format!(
            "naive {}, drawn CA {}, constructed CA {}",
            names(&drawn, &naive),
            names(&drawn, &by_ca),
            names(&built, &by_built)
        ),
    )
}

fn ca_pruning(reg: &Registry) -> Outcome {
    let file = load("partitions.pat");
    let drawn = drawn_ca();
    let grey: Vec<Redundancy> = [2, 5]
        .iter()
        .map(|&s| detect_redundant(&drawn, StateId(s)))
        .collect();
    let pruned = remove_redundant(&drawn);
    reg.keep("drawn ca pruned", &pruned);
    let built = construct_ca(&partition_list(&file), file.script.as_ref().unwrap()).unwrap();
    let built_pruned = remove_redundant(&built);
    reg.keep("constructed ca pruned", &built_pruned);
    let universe = enumerate(file.signature.symbols(), 1, DEFAULT_CAP).unwrap();
    let mut worst = 0;
    let mut agree = true;
    for t in universe.iter().filter(|t| t.args().len() == 3) {
        let a = reg.eval(&pruned, t);
        let b = reg.eval(&drawn, t);
        worst = worst.max(a.comparisons());
        agree &= a.result == b.result;
    }
    let pass = grey == [Redundancy::CheckEq, Redundancy::CheckNeq]
        && pruned.len() == 7
        && pruned.count_cons_states() == 3
        && worst <= 2
        && agree
        && built_pruned.len() == 7;
    Outcome::new(
        pass,
        format!(
            "grey states {grey:?}; {} -> {} states; max comparisons {worst}; constructed CA {} -> {}",
            drawn.len(),
            pruned.len(),
            built.len(),
            built_pruned.len()
        ),
    )
}

fn diagonal_behaviour(reg: &Registry) -> Outcome {
    let file = load("diagonal.pat");
    let cases = [
        ("f(a, a)", set(&[0, 2])),
        ("f(b, b)", set(&[0])),
        ("f(a, b)", set(&[1])),
        ("f(b, a)", set(&[])),
    ];
    let mut pass = true;
    let mut detail = String::new();
    let main = construct_anpma(&file.patterns, &DefaultStrategy, Pruning::Aggressive).unwrap();
    reg.keep("diagonal anpma", &main);
    for (t, want) in &cases {
        let got = reg.eval(&main, &term(&file, t)).result;
        pass &= got == *want;
        write!(detail, "{t} -> {} ", names(&main, &got)).unwrap();
    }
    // The same answers from every other configuration.
    for s in builtin_strategies() {
        for pr in Pruning::ALL {
            let m = construct_anpma(&file.patterns, s.as_ref(), pr).unwrap();
            for (t, want) in &cases {
                pass &= reg.eval(&m, &term(&file, t)).result == *want;
            }
            reg.keep(format!("diagonal anpma {} {pr}", s.name()), &m);
        }
    }
    Outcome::new(pass, detail.trim_end())
}

// ---- oracle equivalence -------------------------------------------------

fn random_pattern(sig: &Signature, vars: &[&str], depth: u32, rng: &mut ChaCha8Rng) -> Term {
    let symbols = sig.symbols();
    let s = if depth == 0 {
        let consts: Vec<_> = symbols.iter().filter(|s| s.arity() == 0).collect();
        *consts.choose(rng).unwrap()
    } else {
        symbols.choose(rng).unwrap()
    };
    let args = (0..s.arity())
        .map(|_| {
            if rng.gen_bool(0.4) {
                Term::var(vars.choose(rng).unwrap())
            } else {
                random_pattern(sig, vars, depth - 1, rng)
            }
        })
        .collect();
    Term::app(s, args).unwrap()
}

fn random_sets(sig: &Signature, count: usize, seed: u64) -> Vec<Vec<IndexedPattern>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=5);
            (0..n)
                .map(|i| {
                    let depth = rng.gen_range(1..=3);
                    let t = random_pattern(sig, &["x", "y", "z"], depth, &mut rng);
                    IndexedPattern::new(&format!("l{}", i + 1), t).unwrap()
                })
                .collect()
        })
        .collect()
}

struct OracleCase {
    name: String,
    patterns: Vec<IndexedPattern>,
    script: Option<Scripted>,
    universe: std::sync::Arc<Vec<Term>>,
}

/// Mismatch descriptions for one pattern set; empty when everything agrees.
fn check_case(case: &OracleCase, reg: &Registry) -> Vec<String> {
    let mut bad = Vec::new();
    let naive: Vec<BTreeSet<usize>> = case
        .universe
        .iter()
        .map(|t| match_naive(&case.patterns, t))
        .collect();
    let mut strategies: Vec<Box<dyn Strategy>> = builtin_strategies();
    if let Some(s) = &case.script {
        strategies.push(Box::new(s.clone()));
    }

    // ANPMA for every strategy and pruning level.
    for s in &strategies {
        for pr in Pruning::ALL {
            let m = match construct_anpma(&case.patterns, s.as_ref(), pr) {
                Ok(m) => m,
                // A script that only names comparisons cannot drive an ANPMA.
                Err(BuildError::Exhausted(_)) if s.name() == "scripted" => continue,
                Err(e) => {
                    bad.push(format!("{}: anpma {} {pr}: {e}", case.name, s.name()));
                    continue;
                }
            };
            for (t, want) in case.universe.iter().zip(&naive) {
                if reg.eval(&m, t).result != *want {
                    bad.push(format!("{}: anpma {} {pr} on {t}", case.name, s.name()));
                    break;
                }
            }
            reg.keep(format!("{} anpma {} {pr}", case.name, s.name()), &m);
        }
    }
    let baseline = two_phase_baseline(&case.patterns).unwrap();
    for (t, want) in case.universe.iter().zip(&naive) {
        if reg.eval(&baseline, t).result != *want {
            bad.push(format!("{}: baseline on {t}", case.name));
            break;
        }
    }
    reg.keep(format!("{} baseline", case.name), &baseline);

    // APMA on the linear subset.
    let linear: Vec<IndexedPattern> = case
        .patterns
        .iter()
        .filter(|p| p.term().is_linear())
        .cloned()
        .collect();
    for s in &strategies {
        for nonredundant in [false, true] {
            let m = match construct_apma(&linear, s.as_ref(), nonredundant) {
                Ok(m) => m,
                Err(BuildError::Exhausted(_)) if s.name() == "scripted" => continue,
                Err(e) => {
                    bad.push(format!("{}: apma {}: {e}", case.name, s.name()));
                    continue;
                }
            };
            for t in case.universe.iter() {
                if reg.eval(&m, t).result != match_naive(&linear, t) {
                    bad.push(format!("{}: apma {} on {t}", case.name, s.name()));
                    break;
                }
            }
            reg.keep(
                format!("{} apma {} {nonredundant}", case.name, s.name()),
                &m,
            );
        }
    }

    // CA on the partitions, over terms where every compared position exists.
    let parts: Vec<(String, ConsistencyPartition)> = rename_all(&case.patterns)
        .into_iter()
        .map(|r| (r.label, r.partition))
        .collect();
    let mut ca_strategies: Vec<Box<dyn Strategy>> = builtin_strategies();
    if let Some(s) = &case.script {
        ca_strategies.push(Box::new(s.clone()));
    }
    for s in &ca_strategies {
        let m = match construct_ca(&parts, s.as_ref()) {
            Ok(m) => m,
            Err(BuildError::Exhausted(_)) if s.name() == "scripted" => continue,
            Err(e) => {
                bad.push(format!("{}: ca {}: {e}", case.name, s.name()));
                continue;
            }
        };
        let pruned = remove_redundant(&m);
        for t in case.universe.iter() {
            let want: Option<BTreeSet<usize>> = parts
                .iter()
                .enumerate()
                .map(|(i, (_, p))| is_consistent_naive(t, p).ok().map(|ok| (i, ok)))
                .collect::<Option<Vec<_>>>()
                .map(|v| {
                    v.into_iter()
                        .filter(|(_, ok)| *ok)
                        .map(|(i, _)| i)
                        .collect()
                });
            let Some(want) = want else { continue };
            if reg.eval(&m, t).result != want || reg.eval(&pruned, t).result != want {
                bad.push(format!("{}: ca {} on {t}", case.name, s.name()));
                break;
            }
        }
        reg.keep(format!("{} ca {}", case.name, s.name()), &m);
        reg.keep(format!("{} ca {} pruned", case.name, s.name()), &pruned);
    }
    bad
}

fn oracle_equivalence(reg: &Registry) -> Outcome {
    let start = Instant::now();
    let mut cases = Vec::new();
    for (name, depth) in [
        ("diagonal.pat", 3),
        ("diagonal-or-ab.pat", 3),
        ("nested.pat", 3),
        ("ternary.pat", 2),
        ("partitions.pat", 2),
    ] {
        let file = load(name);
        let universe = enumerate(file.signature.symbols(), depth, DEFAULT_CAP).unwrap();
        cases.push(OracleCase {
            name: name.into(),
            patterns: file.patterns,
            script: file.script,
            universe: universe.into(),
        });
    }
    let sig = Signature::from_decls(&[("f", 2), ("g", 1), ("a", 0), ("b", 0)]).unwrap();
    let universe: std::sync::Arc<Vec<Term>> =
        enumerate(sig.symbols(), 3, DEFAULT_CAP).unwrap().into();
    let universe_len = universe.len();
    for (i, patterns) in random_sets(&sig, 100, 0x5eed).into_iter().enumerate() {
        cases.push(OracleCase {
            name: format!("random #{i}"),
            patterns,
            script: None,
            universe: universe.clone(),
        });
    }
    let bad: Vec<String> = cases.par_iter().flat_map(|c| check_case(c, reg)).collect();
    let took = start.elapsed();
    let mut detail = format!(
        "{} pattern sets, {universe_len}-term universe, {} mismatches in {took:.1?}",
        cases.len(),
        bad.len()
    );
    if let Some(first) = bad.first() {
        write!(detail, "; first: {first}").unwrap();
    }
    Outcome::new(
        bad.is_empty() && universe_len == 5552 && took < Duration::from_secs(60),
        detail,
    )
}

// ---- interleaving benefit -----------------------------------------------

fn interleaving_benefit(reg: &Registry) -> Outcome {
    let file = load("nested.pat");
    let pruned = construct_anpma(&file.patterns, &DefaultStrategy, Pruning::Aggressive).unwrap();
    let baseline = two_phase_baseline(&file.patterns).unwrap();
    reg.keep("nested pruned", &pruned);
    reg.keep("nested baseline", &baseline);
    let universe = enumerate(file.signature.symbols(), 3, DEFAULT_CAP).unwrap();

    let mut dominated = true;
    let mut strict = [0usize; 3];
    let mut matching = [0usize; 3];
    let mut only_tail = 0;
    let mut only_tail_equal = 0;
    for t in &universe {
        let a = reg.eval(&pruned, t);
        let b = reg.eval(&baseline, t);
        assert_eq!(a.result, b.result, "both automata must be correct on {t}");
        dominated &= a.len() <= b.len();
        for (i, slot) in strict.iter_mut().enumerate() {
            if a.result.contains(&i) {
                matching[i] += 1;
                if a.len() < b.len() {
                    *slot += 1;
                }
            }
        }
        if !a.result.is_empty() && a.result.iter().all(|&i| i >= 3) {
            only_tail += 1;
            if a.len() == b.len() {
                only_tail_equal += 1;
            }
        }
    }
    let claims = [
        ("pruned <= baseline on every term", dominated),
        ("strict on some l1 term", strict[0] > 0),
        ("strict on some l2 term", strict[1] > 0),
        ("strict on some l3 term", strict[2] > 0),
        ("equal on l4/l5-only terms", only_tail_equal == only_tail),
    ];
    let mut detail = format!(
        "{} vs {} states; strict on l1 {}/{}, l2 {}/{}, l3 {}/{}; equal on l4/l5-only {}/{}",
        pruned.len(),
        baseline.len(),
        strict[0],
        matching[0],
        strict[1],
        matching[1],
        strict[2],
        matching[2],
        only_tail_equal,
        only_tail
    );
    for (claim, ok) in claims {
        write!(
            detail,
            "\n      [{}] {claim}",
            if ok { "ok" } else { "FAILED" }
        )
        .unwrap();
    }
    Outcome::new(claims.iter().all(|(_, ok)| *ok), detail)
}

fn adversarial_ca(reg: &Registry) -> Outcome {
    let k = 4;
    let sig = Signature::from_decls(&[("f", 4), ("a", 0), ("b", 0), ("c", 0), ("d", 0)]).unwrap();
    let mut parts = Vec::new();
    for p in 1..=k {
        for q in p + 1..=k {
            let (p, q) = (p.to_string(), q.to_string());
            parts.push((
                format!("P{p}{q}"),
                ConsistencyPartition::from_strs(&[&[p.as_str(), q.as_str()]]),
            ));
        }
    }
    let t = parse_term(&sig, "f(a, b, c, d)").unwrap();
    let mut detail = String::new();
    let mut pass = true;
    let strategies: Vec<Box<dyn Strategy>> = vec![Box::new(LeftToRight), Box::new(DefaultStrategy)];
    for s in &strategies {
        let m = construct_ca(&parts, s.as_ref()).unwrap();
        let pruned = remove_redundant(&m);
        let before = reg.eval(&m, &t);
        let after = reg.eval(&pruned, &t);
        pass &= before.comparisons() == 6
            && after.comparisons() == 6
            && after.result.is_empty()
            && m.len() == 127;
        write!(
            detail,
            "{}: {} -> {} states, {} comparisons after pruning; ",
            s.name(),
            m.len(),
            pruned.len(),
            after.comparisons()
        )
        .unwrap();
        reg.keep(format!("adversarial ca {}", s.name()), &m);
        reg.keep(format!("adversarial ca {} pruned", s.name()), &pruned);
    }
    Outcome::new(pass, detail.trim_end_matches("; "))
}

fn well_formedness(reg: &Registry) -> Outcome {
    let automata = reg.automata.lock().unwrap();
    let mut broken = Vec::new();
    for (name, m) in automata.iter() {
        let v = check_well_formed(m);
        if !v.is_empty() {
            broken.push(format!("{name}: {}", v[0]));
        }
    }
    let odd = reg.non_canonical.lock().unwrap();
    let mut detail = format!(
        "{} automata, {} violations; {} traces, {} non-canonical",
        automata.len(),
        broken.len(),
        reg.traces.load(Ordering::Relaxed),
        odd.len()
    );
    if let Some(b) = broken.first() {
        write!(detail, "; first: {b}").unwrap();
    }
    if let Some(t) = odd.first() {
        write!(detail, "; first trace: {t}").unwrap();
    }
    Outcome::new(broken.is_empty() && odd.is_empty(), detail)
}

fn main() -> ExitCode {
    let reg = Registry::default();
    type Criterion = fn(&Registry) -> Outcome;
    let criteria: [(&str, Criterion); 10] = [
        (
            "ternary APMA has 8 states, 9 with 1 before 2",
            ternary_counts,
        ),
        ("ternary APMA traces", ternary_traces),
        ("renaming yields the three partitions", |_| {
            rename_partitions()
        }),
        ("f(a, a, b) is consistent with P1 only", consistency_fixture),
        ("CA pruning removes both grey states", ca_pruning),
        ("diagonal ANPMA results", diagonal_behaviour),
        ("oracle equivalence", oracle_equivalence),
        (
            "interleaving benefit on the nested patterns",
            interleaving_benefit,
        ),
        ("adversarial CA keeps 6 comparisons", adversarial_ca),
        ("well-formedness and canonical traces", well_formedness),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let out = run(&reg);
        if !out.pass {
            failed += 1;
        }
        println!(
            "{} {:>2}. {name}: {}",
            if out.pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
