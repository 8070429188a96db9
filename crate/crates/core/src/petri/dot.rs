use std::collections::BTreeMap;
use std::fmt::Write;

use super::TimedPetriNet;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Graphviz rendering: places as ellipses with their token count,
/// transitions as `name@delay` boxes grouped into one cluster per locality,
/// arcs labelled with their weight.
pub fn to_dot(net: &TimedPetriNet, marking: &[u64]) -> String {
    let mut out = String::new();
    out.push_str("digraph net {\n  rankdir=LR;\n");
    for (i, name) in net.places().iter().enumerate() {
        let tokens = marking.get(i).copied().unwrap_or(0);
        let _ = writeln!(
            out,
            "  p{i} [shape=ellipse, label={}];",
            quote(&format!("{name}\n{tokens}"))
        );
    }
    let mut by_locality: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, t) in net.transitions().iter().enumerate() {
        by_locality.entry(t.locality).or_default().push(i);
    }
    for (loc, ids) in &by_locality {
        let _ = writeln!(out, "  subgraph cluster_loc{loc} {{");
        let _ = writeln!(out, "    label={};", quote(&format!("locality {loc}")));
        for &i in ids {
            let t = &net.transitions()[i];
            let _ = writeln!(
                out,
                "    t{i} [shape=box, label={}];",
                quote(&format!("{}@{}", t.name, t.delay))
            );
        }
        out.push_str("  }\n");
    }
    for (i, t) in net.transitions().iter().enumerate() {
        for &(p, w) in &t.inputs {
            let _ = writeln!(out, "  p{p} -> t{i} [label=\"{w}\"];");
        }
        for &(p, w) in &t.outputs {
            let _ = writeln!(out, "  t{i} -> p{p} [label=\"{w}\"];");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn renders_boxes_arcs_and_clusters() {
        let net = samples::two_membrane_net();
        let dot = to_dot(&net, net.initial_marking());
        assert!(dot.contains("label=\"tr_r2_2@2\""));
        assert!(dot.contains("label=\"tr_r1_1@0\""));
        assert!(dot.contains("subgraph cluster_loc1"));
        assert!(dot.contains("subgraph cluster_loc2"));
        assert!(dot.contains("label=\"a_2\\n2\""));
        assert_eq!(dot.matches(" -> ").count(), 4);
        assert_eq!(dot.matches("[label=\"1\"]").count(), 4);
    }

    #[test]
    fn empty_net_has_no_edges() {
        let net = TimedPetriNet::new(vec![], vec![], vec![]).unwrap();
        let dot = to_dot(&net, &[]);
        assert!(!dot.contains("->"));
        assert!(dot.starts_with("digraph net {"));
    }
}
