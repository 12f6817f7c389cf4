use std::collections::HashSet;

use crate::error::{ParseError, TermError};
use crate::matching::IndexedPattern;
use crate::strategy::Scripted;
use crate::term::{Signature, Term};

/// A parsed pattern file: declarations, an optional script header and
/// labelled patterns.
#[derive(Clone, Debug)]
pub struct PatternFile {
    pub signature: Signature,
    pub script: Option<Scripted>,
    pub patterns: Vec<IndexedPattern>,
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// Non-empty lines with comments removed, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l)))
        .filter(|(_, l)| !l.is_empty())
}

fn declaration(sig: &mut Signature, rest: &str) -> Result<(), ParseError> {
    let bad = || ParseError::BadDeclaration(rest.to_string());
    let (name, arity) = rest.trim().split_once('/').ok_or_else(bad)?;
    let name = name.trim();
    if name.is_empty() || !name.chars().all(is_ident_char) {
        return Err(bad());
    }
    let arity: usize = arity.trim().parse().map_err(|_| bad())?;
    sig.declare(name, arity)?;
    Ok(())
}

/// Parses `sym name/arity` lines.
pub fn parse_signature(text: &str) -> Result<Signature, ParseError> {
    let mut sig = Signature::new();
    for (n, line) in content_lines(text) {
        match line.strip_prefix("sym ") {
            Some(rest) => declaration(&mut sig, rest)?,
            None => {
                return Err(ParseError::at(
                    n,
                    format!("expected `sym name/arity`, found `{line}`"),
                ))
            }
        }
    }
    Ok(sig)
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

struct Parser<'a> {
    sig: &'a Signature,
    src: &'a str,
    at: usize,
    line: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.at..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.at += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.at..].chars().next()
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::at(self.line, msg)
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(d) if d == c => {
                self.at += c.len_utf8();
                Ok(())
            }
            Some(d) => Err(self.err(format!("expected `{c}`, found `{d}`"))),
            None => Err(self.err(format!("expected `{c}`, found end of input"))),
        }
    }

    fn ident(&mut self) -> Result<&str, ParseError> {
        self.skip_ws();
        let start = self.at;
        while let Some(c) = self.src[self.at..].chars().next() {
            if !is_ident_char(c) {
                break;
            }
            self.at += c.len_utf8();
        }
        if start == self.at {
            return Err(match self.peek() {
                Some(c) => self.err(format!("expected an identifier, found `{c}`")),
                None => self.err("expected an identifier, found end of input"),
            });
        }
        Ok(&self.src[start..self.at])
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let name = self.ident()?.to_string();
        if self.peek() == Some('(') {
            self.expect('(')?;
            let mut args = Vec::new();
            if self.peek() != Some(')') {
                loop {
                    args.push(self.term()?);
                    if self.peek() == Some(',') {
                        self.expect(',')?;
                    } else {
                        break;
                    }
                }
            }
            self.expect(')')?;
            let sym = self
                .sig
                .get(&name)
                .ok_or_else(|| TermError::UnknownSymbol(name.clone()))?;
            return Ok(Term::app(sym, args)?);
        }
        match self.sig.get(&name) {
            Some(sym) if sym.arity() == 0 => Ok(Term::constant(sym)?),
            Some(_) => Err(ParseError::SymbolAsVariable(name)),
            None => Ok(Term::var(&name)),
        }
    }
}

fn parse_term_at(sig: &Signature, text: &str, line: usize) -> Result<Term, ParseError> {
    let mut p = Parser {
        sig,
        src: text,
        at: 0,
        line,
    };
    let t = p.term()?;
    if let Some(c) = p.peek() {
        return Err(p.err(format!("unexpected `{c}` after term")));
    }
    Ok(t)
}

/// Parses a term in prefix syntax. Undeclared identifiers without arguments
/// are variables.
pub fn parse_term(sig: &Signature, text: &str) -> Result<Term, ParseError> {
    parse_term_at(sig, text, 1)
}

/// One term per line.
pub fn parse_terms(sig: &Signature, text: &str) -> Result<Vec<Term>, ParseError> {
    content_lines(text)
        .map(|(n, l)| parse_term_at(sig, l, n))
        .collect()
}

fn pattern_line(
    sig: &Signature,
    n: usize,
    line: &str,
    seen: &mut HashSet<String>,
) -> Result<IndexedPattern, ParseError> {
    let (label, body) = line
        .split_once(':')
        .ok_or_else(|| ParseError::at(n, format!("expected `label: pattern`, found `{line}`")))?;
    let label = label.trim();
    if label.is_empty() || !label.chars().all(is_ident_char) {
        return Err(ParseError::at(n, format!("bad label `{label}`")));
    }
    if !seen.insert(label.to_string()) {
        return Err(ParseError::DuplicateLabel(label.to_string()));
    }
    IndexedPattern::new(label, parse_term_at(sig, body, n)?)
}

/// Parses `label: pattern` lines.
pub fn parse_patterns(sig: &Signature, text: &str) -> Result<Vec<IndexedPattern>, ParseError> {
    let mut seen = HashSet::new();
    content_lines(text)
        .map(|(n, l)| pattern_line(sig, n, l, &mut seen))
        .collect()
}

/// Parses a whole pattern file. Declarations must precede their use.
pub fn parse_pattern_file(text: &str) -> Result<PatternFile, ParseError> {
    let mut signature = Signature::new();
    let mut script = None;
    let mut patterns = Vec::new();
    let mut seen = HashSet::new();
    for (n, line) in content_lines(text) {
        if let Some(rest) = line.strip_prefix("sym ") {
            declaration(&mut signature, rest)?;
        } else if let Some(rest) = line.strip_prefix("script:") {
            if script.is_some() {
                return Err(ParseError::at(n, "more than one script header"));
            }
            script = Some(Scripted::parse(rest)?);
        } else {
            patterns.push(pattern_line(&signature, n, line, &mut seen)?);
        }
    }
    Ok(PatternFile {
        signature,
        script,
        patterns,
    })
}
