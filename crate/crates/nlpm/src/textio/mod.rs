//! Text formats for signatures, patterns and terms, and DOT export.

mod dot;
mod parse;

pub use dot::export_dot;
pub use parse::{
    parse_pattern_file, parse_patterns, parse_signature, parse_term, parse_terms, PatternFile,
};
