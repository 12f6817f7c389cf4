//! Selection functions deciding what a new state inspects or compares.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{BuildError, ParseError};
use crate::position::{Position, PositionPair};
use crate::rename::RenamedPattern;
use crate::term::{Head, Term};

/// A position to inspect or a pair to compare.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Choice {
    Pos(Position),
    Pair(PositionPair),
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Choice::Pos(p) => write!(f, "{p}"),
            Choice::Pair(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Choice {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        if s.trim_start().starts_with('{') {
            s.parse().map(Choice::Pair)
        } else {
            s.parse().map(Choice::Pos)
        }
    }
}

/// Everything a strategy may look at when choosing.
pub struct ChoiceCtx<'a> {
    pub work_f: &'a BTreeSet<Position>,
    pub work_c: &'a BTreeSet<PositionPair>,
    pub live: &'a [&'a RenamedPattern],
    pub prefix: &'a Term,
    /// Number of live patterns on the equal and unequal branch of a pair.
    pub split: &'a dyn Fn(&PositionPair) -> (usize, usize),
}

impl ChoiceCtx<'_> {
    pub fn contains(&self, c: &Choice) -> bool {
        match c {
            Choice::Pos(p) => self.work_f.contains(p),
            Choice::Pair(p) => self.work_c.contains(p),
        }
    }

    /// Positions where every live pattern has a function symbol.
    pub fn index_positions(&self) -> impl Iterator<Item = &Position> {
        self.work_f.iter().filter(|p| {
            self.live
                .iter()
                .all(|l| matches!(l.linear.at(p).map(Term::head), Some(Head::Fun(_))))
        })
    }

    /// Distinct function symbols live patterns carry at `p`.
    pub fn branching(&self, p: &Position) -> usize {
        self.live
            .iter()
            .filter_map(|l| l.linear.at(p).and_then(Term::symbol))
            .collect::<BTreeSet<_>>()
            .len()
    }

    fn first_f(&self) -> Option<Choice> {
        self.work_f.iter().next().cloned().map(Choice::Pos)
    }

    fn first_c(&self) -> Option<Choice> {
        self.work_c.iter().next().cloned().map(Choice::Pair)
    }
}

pub trait Strategy: Send + Sync {
    fn name(&self) -> &str;

    /// Called only with at least one non-empty work set. Must return a member
    /// of one of them.
    fn choose(&self, ctx: &ChoiceCtx<'_>) -> Result<Choice, BuildError>;
}

/// Runs a strategy and enforces the membership contract.
pub(crate) fn choose_checked(s: &dyn Strategy, ctx: &ChoiceCtx<'_>) -> Result<Choice, BuildError> {
    let c = s.choose(ctx)?;
    if ctx.contains(&c) {
        Ok(c)
    } else {
        Err(BuildError::Contract {
            strategy: s.name().to_string(),
            choice: c.to_string(),
        })
    }
}

fn exhausted(name: &str) -> BuildError {
    BuildError::Exhausted(name.to_string())
}

/// Least position first; pairs only once no position is left.
pub struct LeftToRight;

impl Strategy for LeftToRight {
    fn name(&self) -> &str {
        "left-to-right"
    }

    fn choose(&self, ctx: &ChoiceCtx<'_>) -> Result<Choice, BuildError> {
        ctx.first_f()
            .or_else(|| ctx.first_c())
            .ok_or_else(|| exhausted(self.name()))
    }
}

/// The position with the most distinct symbols among live patterns.
pub struct MaxBranching;

impl Strategy for MaxBranching {
    fn name(&self) -> &str {
        "max-branching"
    }

    fn choose(&self, ctx: &ChoiceCtx<'_>) -> Result<Choice, BuildError> {
        let mut best: Option<(&Position, usize)> = None;
        for p in ctx.work_f {
            let b = ctx.branching(p);
            if best.is_none_or(|(_, bb)| b > bb) {
                best = Some((p, b));
            }
        }
        best.map(|(p, _)| Choice::Pos(p.clone()))
            .or_else(|| ctx.first_c())
            .ok_or_else(|| exhausted(self.name()))
    }
}

/// Index positions first, then any position, then pairs.
pub struct IndexFirst;

impl Strategy for IndexFirst {
    fn name(&self) -> &str {
        "index-first"
    }

    fn choose(&self, ctx: &ChoiceCtx<'_>) -> Result<Choice, BuildError> {
        ctx.index_positions()
            .next()
            .cloned()
            .map(Choice::Pos)
            .or_else(|| ctx.first_f())
            .or_else(|| ctx.first_c())
            .ok_or_else(|| exhausted(self.name()))
    }
}

/// Pairs whenever there are any.
pub struct ConsistencyEager;

impl Strategy for ConsistencyEager {
    fn name(&self) -> &str {
        "consistency-eager"
    }

    fn choose(&self, ctx: &ChoiceCtx<'_>) -> Result<Choice, BuildError> {
        ctx.first_c()
            .or_else(|| ctx.first_f())
            .ok_or_else(|| exhausted(self.name()))
    }
}

/// Index positions, then the pair leaving the fewest live patterns over both
/// branches, then the least position.
pub struct DefaultStrategy;

fn best_split(ctx: &ChoiceCtx<'_>) -> Option<Choice> {
    ctx.work_c
        .iter()
        .min_by_key(|p| {
            let (y, n) = (ctx.split)(p);
            y + n
        })
        .cloned()
        .map(Choice::Pair)
}

impl Strategy for DefaultStrategy {
    fn name(&self) -> &str {
        "default"
    }

    fn choose(&self, ctx: &ChoiceCtx<'_>) -> Result<Choice, BuildError> {
        ctx.index_positions()
            .next()
            .cloned()
            .map(Choice::Pos)
            .or_else(|| best_split(ctx))
            .or_else(|| ctx.first_f())
            .ok_or_else(|| exhausted(self.name()))
    }
}

/// Every position before any pair: linear matching followed by consistency
/// checking.
pub struct TwoPhase;

impl Strategy for TwoPhase {
    fn name(&self) -> &str {
        "two-phase"
    }

    fn choose(&self, ctx: &ChoiceCtx<'_>) -> Result<Choice, BuildError> {
        ctx.index_positions()
            .next()
            .cloned()
            .map(Choice::Pos)
            .or_else(|| ctx.first_f())
            .or_else(|| best_split(ctx))
            .ok_or_else(|| exhausted(self.name()))
    }
}

/// A fixed priority list: the first entry present in the work sets wins.
#[derive(Clone, Debug)]
pub struct Scripted {
    entries: Vec<Choice>,
}

impl Scripted {
    pub fn new(entries: Vec<Choice>) -> Self {
        Scripted { entries }
    }

    /// Parses a whitespace-separated list such as `e 2 1 3` or
    /// `{1,2} {1,3}`.
    pub fn parse(s: &str) -> Result<Self, ParseError> {
        let mut entries = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let end = if rest.starts_with('{') {
                rest.find('}')
                    .map(|i| i + 1)
                    .ok_or_else(|| ParseError::BadPosition(rest.to_string()))?
            } else {
                rest.find(char::is_whitespace).unwrap_or(rest.len())
            };
            entries.push(rest[..end].parse()?);
            rest = rest[end..].trim_start();
        }
        Ok(Scripted { entries })
    }

    pub fn entries(&self) -> &[Choice] {
        &self.entries
    }
}

impl Strategy for Scripted {
    fn name(&self) -> &str {
        "scripted"
    }

    fn choose(&self, ctx: &ChoiceCtx<'_>) -> Result<Choice, BuildError> {
        self.entries
            .iter()
            .find(|c| ctx.contains(c))
            .cloned()
            .ok_or_else(|| exhausted(self.name()))
    }
}

/// Names accepted by [`by_name`], excluding `scripted`.
pub const BUILTIN_NAMES: &[&str] = &[
    "default",
    "left-to-right",
    "max-branching",
    "index-first",
    "consistency-eager",
    "two-phase",
];

pub fn by_name(name: &str) -> Option<Box<dyn Strategy>> {
    Some(match name {
        "default" => Box::new(DefaultStrategy),
        "left-to-right" => Box::new(LeftToRight),
        "max-branching" => Box::new(MaxBranching),
        "index-first" => Box::new(IndexFirst),
        "consistency-eager" => Box::new(ConsistencyEager),
        "two-phase" => Box::new(TwoPhase),
        _ => return None,
    })
}

pub fn builtin_strategies() -> Vec<Box<dyn Strategy>> {
    BUILTIN_NAMES.iter().filter_map(|n| by_name(n)).collect()
}
