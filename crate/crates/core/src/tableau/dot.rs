use std::fmt::Write;

use crate::formula::closure::Closure;

use super::{Edge, Mark, Tree};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering of a recorded tableau.
pub fn export_dot(tree: &Tree, closure: &Closure) -> String {
    let mut out = String::from("digraph tableau {\n  node [shape=box, fontname=\"monospace\"];\n");
    for (i, n) in tree.nodes.iter().enumerate() {
        let formulas: Vec<String> = n.label.iter().map(|&f| closure.display(f)).collect();
        let body = if formulas.is_empty() { "{}".to_string() } else { formulas.join("\\n") };
        let mut text = format!("u{i} t={}\\n{}", n.time, escape(&body));
        let mut attrs = String::new();
        match n.mark {
            Some((Mark::Ticked, rule)) => {
                let _ = write!(text, "\\n[ticked: {rule}]");
                attrs.push_str(", color=green");
            }
            Some((Mark::Crossed, rule)) => {
                let _ = write!(text, "\\n[crossed: {rule}]");
                attrs.push_str(", color=red");
            }
            None => {}
        }
        let _ = writeln!(out, "  n{i} [label=\"{text}\"{attrs}];");
        if let Some(p) = n.parent {
            match n.edge {
                Edge::Step(d) => {
                    let _ = writeln!(out, "  n{p} -> n{i} [label=\"STEP d={d}\", style=bold];");
                }
                Edge::Retry => {
                    let _ = writeln!(out, "  n{p} -> n{i} [label=\"YESTERDAY\", style=dashed];");
                }
                _ => {
                    let _ = writeln!(out, "  n{p} -> n{i};");
                }
            }
        }
    }
    out.push_str("}\n");
    out
}
