use std::fmt::Write;

use crate::petri::TimedPetriNet;
use crate::psystem::{Rule, Target, TimedPSystem};

fn rule_line(sys: &TimedPSystem, rule: &Rule, explicit_home: bool) -> String {
    let alphabet = sys.alphabet();
    let mut s = format!("rule {}", rule.name);
    if explicit_home {
        write!(s, " in {}", rule.home).unwrap();
    }
    write!(s, ": {} ->", rule.lhs.display(alphabet)).unwrap();
    if rule.rhs.is_empty() {
        s.push_str(" eps");
    }
    for (target, objects) in &rule.rhs {
        let target = match target {
            Target::Here => "here".to_string(),
            Target::Out => "out".to_string(),
            Target::In(l) => format!("in {l}"),
        };
        write!(s, " ({}, {target})", objects.display(alphabet)).unwrap();
    }
    write!(s, " @{};", rule.delay).unwrap();
    s
}

/// Canonical text for a membrane system. Rules sit inside their membranes
/// when the rule order allows it, otherwise they all follow the membrane
/// tree with explicit homes, so parsing gives back the same rule order.
pub fn print_psystem(sys: &TimedPSystem) -> String {
    let mu = sys.structure();
    let mut preorder = Vec::with_capacity(mu.len());
    let mut stack = vec![mu.skin()];
    while let Some(i) = stack.pop() {
        preorder.push(i);
        stack.extend(mu.children(i).iter().rev());
    }
    let mut rank = vec![0; mu.len()];
    for (k, &i) in preorder.iter().enumerate() {
        rank[i] = k;
    }
    let home_rank = |r: &Rule| rank[mu.index_of(r.home).expect("validated home")];
    let nested = sys.rules().windows(2).all(|w| home_rank(&w[0]) <= home_rank(&w[1]));

    let mut out = String::from("psystem {\n");
    let names: Vec<&str> = sys.alphabet().names().iter().map(String::as_str).collect();
    if names.is_empty() {
        out.push_str("  alphabet;\n");
    } else {
        writeln!(out, "  alphabet {};", names.join(" ")).unwrap();
    }
    fn membrane(sys: &TimedPSystem, i: usize, depth: usize, nested: bool, out: &mut String) {
        let mu = sys.structure();
        let pad = "  ".repeat(depth);
        let label = mu.label(i);
        writeln!(out, "{pad}membrane {label} {{").unwrap();
        let contents = &sys.initial_contents()[i];
        if !contents.is_empty() {
            writeln!(out, "{pad}  contents {};", contents.display(sys.alphabet())).unwrap();
        }
        if nested {
            for &r in sys.rules_in(i) {
                writeln!(out, "{pad}  {}", rule_line(sys, &sys.rules()[r], false)).unwrap();
            }
        }
        for &c in mu.children(i) {
            membrane(sys, c, depth + 1, nested, out);
        }
        writeln!(out, "{pad}}}").unwrap();
    }
    membrane(sys, mu.skin(), 1, nested, &mut out);
    if !nested {
        for rule in sys.rules() {
            writeln!(out, "  {}", rule_line(sys, rule, true)).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// Canonical text for a net: places, then each transition followed by its
/// arcs, then the non-zero part of the initial marking.
pub fn print_petri(net: &TimedPetriNet) -> String {
    let places = net.places();
    let mut out = String::from("petri {\n");
    if !places.is_empty() {
        writeln!(out, "  place {};", places.join(" ")).unwrap();
    }
    for t in net.transitions() {
        writeln!(out, "  transition {} @{} loc={};", t.name, t.delay, t.locality).unwrap();
        for &(p, w) in &t.inputs {
            writeln!(out, "  {} -{w}-> {};", places[p], t.name).unwrap();
        }
        for &(p, w) in &t.outputs {
            writeln!(out, "  {} -{w}-> {};", t.name, places[p]).unwrap();
        }
    }
    let marked: Vec<String> = net
        .initial_marking()
        .iter()
        .zip(places)
        .filter(|(&n, _)| n > 0)
        .map(|(n, p)| format!("{p}={n}"))
        .collect();
    if !marked.is_empty() {
        writeln!(out, "  marking {};", marked.join(" ")).unwrap();
    }
    out.push_str("}\n");
    out
}
