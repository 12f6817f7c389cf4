//! Finite sets of ground terms used for exhaustive checking.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::UniverseError;
use crate::term::{Symbol, Term};

pub const DEFAULT_CAP: usize = 200_000;

/// Number of ground terms of depth at most `max_depth`, saturating.
pub fn universe_size(symbols: &[Symbol], max_depth: u32) -> u128 {
    let constants = symbols.iter().filter(|s| s.arity() == 0).count() as u128;
    // upto[d] = number of terms of depth <= d
    let mut upto = constants;
    for _ in 0..max_depth {
        let mut next = constants;
        for s in symbols.iter().filter(|s| s.arity() > 0) {
            let mut n: u128 = 1;
            for _ in 0..s.arity() {
                n = n.saturating_mul(upto);
            }
            next = next.saturating_add(n);
        }
        upto = next;
    }
    upto
}

/// All ground terms of depth at most `max_depth`: ordered by depth, then by
/// symbol declaration order, then by argument tuples in the same order.
pub fn enumerate(
    symbols: &[Symbol],
    max_depth: u32,
    cap: usize,
) -> Result<Vec<Term>, UniverseError> {
    let size = universe_size(symbols, max_depth);
    if size == 0 {
        return Err(UniverseError::NoConstants);
    }
    if size > cap as u128 {
        return Err(UniverseError::TooLarge { size, cap });
    }
    let mut symbols = symbols.to_vec();
    symbols.sort();
    let mut all: Vec<Term> = symbols
        .iter()
        .filter(|s| s.arity() == 0)
        .map(|s| Term::constant(s).expect("arity 0"))
        .collect();
    for d in 1..=max_depth {
        let pool = all.clone();
        for s in symbols.iter().filter(|s| s.arity() > 0) {
            let n = s.arity();
            let mut idx = vec![0usize; n];
            'tuples: loop {
                let args: Vec<Term> = idx.iter().map(|&i| pool[i].clone()).collect();
                if args.iter().any(|a| a.depth() == d - 1) {
                    all.push(Term::app(s, args).expect("arity respected"));
                }
                // Odometer increment, last argument fastest.
                for k in (0..n).rev() {
                    idx[k] += 1;
                    if idx[k] < pool.len() {
                        continue 'tuples;
                    }
                    idx[k] = 0;
                }
                break;
            }
        }
    }
    Ok(all)
}

/// `count` random ground terms of depth at most `max_depth`, reproducible
/// from `seed`.
pub fn sample(
    symbols: &[Symbol],
    max_depth: u32,
    count: usize,
    seed: u64,
) -> Result<Vec<Term>, UniverseError> {
    let constants: Vec<&Symbol> = symbols.iter().filter(|s| s.arity() == 0).collect();
    if constants.is_empty() {
        return Err(UniverseError::NoConstants);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| random_term(symbols, &constants, max_depth, &mut rng))
        .collect())
}

fn random_term(symbols: &[Symbol], constants: &[&Symbol], depth: u32, rng: &mut impl Rng) -> Term {
    let s = if depth == 0 {
        *constants.choose(rng).expect("non-empty")
    } else {
        symbols.choose(rng).expect("non-empty")
    };
    let args = (0..s.arity())
        .map(|_| random_term(symbols, constants, depth - 1, rng))
        .collect();
    Term::app(s, args).expect("arity respected")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Signature;
    use std::collections::HashSet;

    fn sig() -> Signature {
        Signature::from_decls(&[("f", 2), ("g", 1), ("a", 0), ("b", 0)]).unwrap()
    }

    #[test]
    fn sizes() {
        let s = sig();
        assert_eq!(universe_size(s.symbols(), 0), 2);
        assert_eq!(universe_size(s.symbols(), 1), 8);
        assert_eq!(universe_size(s.symbols(), 2), 74);
        assert_eq!(universe_size(s.symbols(), 3), 5552);
    }

    #[test]
    fn enumeration_is_complete_and_distinct() {
        let s = sig();
        let all = enumerate(s.symbols(), 3, DEFAULT_CAP).unwrap();
        assert_eq!(all.len(), 5552);
        let distinct: HashSet<&Term> = all.iter().collect();
        assert_eq!(distinct.len(), all.len());
        assert!(all.windows(2).all(|w| w[0].depth() <= w[1].depth()));
        assert!(all.iter().all(Term::is_ground));
        assert_eq!(all[0].to_string(), "a");
        assert_eq!(all[2].to_string(), "f(a, a)");
    }

    #[test]
    fn cap_and_constants_are_enforced() {
        let s = sig();
        assert!(matches!(
            enumerate(s.symbols(), 3, 100),
            Err(UniverseError::TooLarge {
                size: 5552,
                cap: 100
            })
        ));
        let no_const = Signature::from_decls(&[("g", 1)]).unwrap();
        assert_eq!(
            enumerate(no_const.symbols(), 2, 10),
            Err(UniverseError::NoConstants)
        );
    }

    #[test]
    fn sampling_is_reproducible() {
        let s = sig();
        let a = sample(s.symbols(), 3, 50, 7).unwrap();
        let b = sample(s.symbols(), 3, 50, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|t| t.depth() <= 3));
    }
}
