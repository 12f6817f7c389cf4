//! Positions (paths of 1-based child indices) and unordered position pairs.

use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::ParseError;

/// A path from the root of a term; the empty path is the root.
///
/// The derived ordering is lexicographic with prefixes first, so
/// `e < 1 < 1.1 < 1.2 < 2`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Position(SmallVec<[u32; 4]>);

impl Position {
    pub fn root() -> Self {
        Position(SmallVec::new())
    }

    pub fn from_slice(path: &[u32]) -> Self {
        assert!(path.iter().all(|&i| i > 0), "child indices are 1-based");
        Position(SmallVec::from_slice(path))
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn path(&self) -> &[u32] {
        &self.0
    }

    /// `self.i`
    pub fn child(&self, i: u32) -> Position {
        assert!(i > 0, "child indices are 1-based");
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }

    pub fn parent(&self) -> Option<Position> {
        if self.0.is_empty() {
            None
        } else {
            Some(Position(SmallVec::from_slice(&self.0[..self.0.len() - 1])))
        }
    }

    /// Last child index, `None` at the root.
    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }

    /// `self ⊑ other`: self is a (not necessarily strict) prefix of other.
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_strict_prefix_of(&self, other: &Position) -> bool {
        self.0.len() < other.0.len() && self.is_prefix_of(other)
    }

    /// `self.r`
    pub fn concat(&self, suffix: &Position) -> Position {
        let mut p = self.0.clone();
        p.extend_from_slice(&suffix.0);
        Position(p)
    }

    /// The suffix `r` with `prefix.r = self`, if `prefix ⊑ self`.
    pub fn strip_prefix(&self, prefix: &Position) -> Option<Position> {
        if prefix.is_prefix_of(self) {
            Some(Position(SmallVec::from_slice(&self.0[prefix.0.len()..])))
        } else {
            None
        }
    }

    /// All prefixes from the root up to and including `self`.
    pub fn prefixes(&self) -> impl Iterator<Item = Position> + '_ {
        (0..=self.0.len()).map(move |k| Position(SmallVec::from_slice(&self.0[..k])))
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Position {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "e" || s == "ε" {
            return Ok(Position::root());
        }
        let mut path = SmallVec::new();
        for part in s.split('.') {
            let i: u32 = part
                .parse()
                .map_err(|_| ParseError::BadPosition(s.to_string()))?;
            if i == 0 {
                return Err(ParseError::BadPosition(s.to_string()));
            }
            path.push(i);
        }
        Ok(Position(path))
    }
}

/// An unordered pair of distinct positions, stored with `first < second`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PositionPair {
    first: Position,
    second: Position,
}

impl PositionPair {
    /// Returns `None` when both positions are equal.
    pub fn new(p: Position, q: Position) -> Option<Self> {
        match p.cmp(&q) {
            std::cmp::Ordering::Less => Some(PositionPair {
                first: p,
                second: q,
            }),
            std::cmp::Ordering::Greater => Some(PositionPair {
                first: q,
                second: p,
            }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn first(&self) -> &Position {
        &self.first
    }

    pub fn second(&self) -> &Position {
        &self.second
    }

    pub fn contains(&self, p: &Position) -> bool {
        &self.first == p || &self.second == p
    }
}

impl fmt::Display for PositionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.first, self.second)
    }
}

impl fmt::Debug for PositionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PositionPair {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| ParseError::BadPosition(s.to_string()))?;
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| ParseError::BadPosition(s.to_string()))?;
        PositionPair::new(a.parse()?, b.parse()?)
            .ok_or_else(|| ParseError::BadPosition(s.to_string()))
    }
}

/// Shorthand used heavily in tests: `pos("1.2")`.
pub fn pos(s: &str) -> Position {
    s.parse().expect("valid position literal")
}

/// Shorthand: `pair("1", "2.1")`.
pub fn pair(p: &str, q: &str) -> PositionPair {
    PositionPair::new(pos(p), pos(q)).expect("distinct positions")
}
