use std::fmt::Write;

use crate::automaton::{Automaton, StateKind};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Deterministic Graphviz rendering. Node ids are state ids; match and final
/// states are boxes, consistency states ellipses.
pub fn export_dot(m: &Automaton) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", m.kind()).unwrap();
    for s in m.state_ids() {
        let (shape, label) = match m.state(s) {
            StateKind::Match { pos, .. } => ("box", pos.to_string()),
            StateKind::Cons { pair, .. } => ("ellipse", pair.to_string()),
            StateKind::Final { labels } => {
                ("box", format!("{{{}}}", m.label_names(labels).join(",")))
            }
        };
        writeln!(out, "  {s} [shape={shape}, label={}];", quote(&label)).unwrap();
    }
    for s in m.state_ids() {
        match m.state(s) {
            StateKind::Match { edges, .. } => {
                for (e, t) in edges {
                    writeln!(out, "  {s} -> {t} [label={}];", quote(&e.to_string())).unwrap();
                }
            }
            StateKind::Cons { eq, ne, .. } => {
                writeln!(out, "  {s} -> {eq} [label=\"Y\"];").unwrap();
                writeln!(out, "  {s} -> {ne} [label=\"N\"];").unwrap();
            }
            StateKind::Final { .. } => {}
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apma::construct_apma;
    use crate::strategy::LeftToRight;

    #[test]
    fn empty_automaton_is_one_node() {
        let m = construct_apma(&[], &LeftToRight, false).unwrap();
        assert_eq!(
            export_dot(&m),
            "digraph apma {\n  0 [shape=box, label=\"{}\"];\n}\n"
        );
    }
}
