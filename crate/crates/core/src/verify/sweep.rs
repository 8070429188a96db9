//! Exhaustive enumeration of tiny models, used to cross-check the optimized
//! step code against the brute-force oracles on every instance.
//!
//! Membrane systems: one or two (nested) membranes, one or two symbols, up
//! to `max_rules` distinct rules with a single-object left-hand side and a
//! right-hand side that is empty or a single object sent to any valid
//! target, delays up to `max_delay`, and every contents with at most
//! `max_objects` objects. Nets mirror this: one to four places, transitions
//! with a single unit input arc and at most one unit output arc, and every
//! marking with at most `max_objects` tokens.

use crate::multiset::{Alphabet, Multiset, Symbol};
use crate::petri::{PNState, Transition, TimedPetriNet};
use crate::psystem::{Label, MembraneStructure, PConfiguration, Rule, Target, TimedPSystem};

use super::oracle::{self, OracleError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepBounds {
    pub max_membranes: u32,
    pub max_symbols: u32,
    pub max_places: usize,
    pub max_rules: usize,
    pub max_delay: u32,
    pub max_objects: u64,
}

impl Default for SweepBounds {
    fn default() -> Self {
        SweepBounds {
            max_membranes: 2,
            max_symbols: 2,
            max_places: 4,
            max_rules: 3,
            max_delay: 2,
            max_objects: 4,
        }
    }
}

/// Totals from a sweep. `mismatches` holds a readable description of every
/// instance where the two sides disagreed (capped at 20 entries, with the
/// full number in `mismatch_count`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub models: u64,
    pub instances: u64,
    pub mismatch_count: u64,
    pub mismatches: Vec<String>,
}

impl SweepReport {
    pub fn ok(&self) -> bool {
        self.mismatch_count == 0
    }

    fn mismatch(&mut self, what: impl FnOnce() -> String) {
        self.mismatch_count += 1;
        if self.mismatches.len() < 20 {
            self.mismatches.push(what());
        }
    }

    fn merge(&mut self, other: SweepReport) {
        self.models += other.models;
        self.instances += other.instances;
        self.mismatch_count += other.mismatch_count;
        for m in other.mismatches {
            if self.mismatches.len() < 20 {
                self.mismatches.push(m);
            }
        }
    }
}

/// Calls `visit` with every subset of `0..n` of size at most `k`, as a
/// strictly increasing index list.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    fn go(n: usize, k: usize, from: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        visit(cur);
        if cur.len() == k {
            return;
        }
        for i in from..n {
            cur.push(i);
            go(n, k, i + 1, cur, visit);
            cur.pop();
        }
    }
    go(n, k, 0, &mut Vec::new(), &mut visit);
}

/// Every vector of `slots` counts summing to at most `total`.
fn count_vectors(slots: usize, total: u64) -> Vec<Vec<u64>> {
    fn go(slots: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == slots {
            out.push(cur.clone());
            return;
        }
        for n in 0..=left {
            cur.push(n);
            go(slots, left - n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(slots, total, &mut Vec::new(), &mut out);
    out
}

/// Unnamed rule shape: home, left-hand symbol, optional product, delay.
type RuleShape = (Label, Symbol, Option<(Symbol, Target)>, u32);

fn rule_shapes(mu: &MembraneStructure, symbols: u32, max_delay: u32) -> Vec<RuleShape> {
    let mut out = Vec::new();
    for idx in 0..mu.len() {
        let home = mu.label(idx);
        let mut targets = vec![Target::Here, Target::Out];
        targets.extend(mu.children(idx).iter().map(|&c| Target::In(mu.label(c))));
        for a in 0..symbols {
            let mut products = vec![None];
            for b in 0..symbols {
                products.extend(targets.iter().map(|&t| Some((Symbol(b), t))));
            }
            for product in products {
                for delay in 0..=max_delay {
                    out.push((home, Symbol(a), product, delay));
                }
            }
        }
    }
    out
}

fn build_rule(k: usize, &(home, a, product, delay): &RuleShape) -> Rule {
    let rule = Rule::new(format!("r{}", k + 1), home, Multiset::singleton(a, 1), delay);
    match product {
        Some((b, target)) => rule.with_message(Multiset::singleton(b, 1), target),
        None => rule,
    }
}

/// Calls `visit` with every swept system (initial contents empty) and the
/// list of contents vectors to try on it.
pub fn for_each_psystem(bounds: &SweepBounds, mut visit: impl FnMut(&TimedPSystem, &[Vec<Multiset>])) {
    for membranes in 1..=bounds.max_membranes {
        let mu = MembraneStructure::chain(membranes).expect("chain is a tree");
        for symbols in 1..=bounds.max_symbols {
            let alphabet = Alphabet::from_names((0..symbols).map(|i| ((b'a' + i as u8) as char).to_string()));
            let contents: Vec<Vec<Multiset>> = count_vectors(membranes as usize * symbols as usize, bounds.max_objects)
                .into_iter()
                .map(|v| {
                    v.chunks(symbols as usize)
                        .map(|row| {
                            Multiset::from_pairs(row.iter().enumerate().map(|(a, &n)| (Symbol(a as u32), n)))
                                .expect("small counts")
                        })
                        .collect()
                })
                .collect();
            let shapes = rule_shapes(&mu, symbols, bounds.max_delay);
            for_each_subset(shapes.len(), bounds.max_rules, |picked| {
                let rules = picked.iter().enumerate().map(|(k, &i)| build_rule(k, &shapes[i])).collect();
                let empty = vec![Multiset::new(); membranes as usize];
                let sys = TimedPSystem::new(alphabet.clone(), mu.clone(), empty, rules).expect("swept system is valid");
                visit(&sys, &contents);
            });
        }
    }
}

/// Unnamed transition shape: input place, optional output place, delay.
type TransitionShape = (usize, Option<usize>, u32);

/// Calls `visit` with every swept net (initial marking empty) and the list
/// of markings to try on it.
pub fn for_each_net(bounds: &SweepBounds, mut visit: impl FnMut(&TimedPetriNet, &[Vec<u64>])) {
    for places in 1..=bounds.max_places {
        let names: Vec<String> = (0..places).map(|i| format!("p{i}")).collect();
        let markings = count_vectors(places, bounds.max_objects);
        let mut shapes: Vec<TransitionShape> = Vec::new();
        for input in 0..places {
            for output in std::iter::once(None).chain((0..places).map(Some)) {
                for delay in 0..=bounds.max_delay {
                    shapes.push((input, output, delay));
                }
            }
        }
        for_each_subset(shapes.len(), bounds.max_rules, |picked| {
            let transitions = picked
                .iter()
                .enumerate()
                .map(|(k, &i)| {
                    let (input, output, delay) = shapes[i];
                    let t = Transition::new(format!("t{k}"), 1, delay).input(input, 1);
                    match output {
                        Some(p) => t.output(p, 1),
                        None => t,
                    }
                })
                .collect();
            let net = TimedPetriNet::new(names.clone(), transitions, vec![0; places]).expect("swept net is valid");
            visit(&net, &markings);
        });
    }
}

fn configuration(sys: &TimedPSystem, contents: &[Multiset]) -> PConfiguration {
    let mut c = sys.initial_configuration();
    c.contents = contents.to_vec();
    c
}

fn marking(net: &TimedPetriNet, m: &[u64]) -> PNState {
    let mut s = net.initial_state();
    s.marking = m.to_vec();
    s
}

/// Optimized maximal-step enumeration against the brute-force oracle, on
/// every swept system and net.
pub fn enumeration_sweep(bounds: &SweepBounds) -> Result<SweepReport, OracleError> {
    let mut report = SweepReport::default();
    let mut failure = None;
    for_each_psystem(bounds, |sys, contents| {
        report.models += 1;
        for w in contents {
            if failure.is_some() {
                return;
            }
            report.instances += 1;
            let c = configuration(sys, w);
            match oracle::oracle_maximal_psystem(sys, &c) {
                Ok(expected) => {
                    let got = sys.enumerate_maximal(&c);
                    if got != expected {
                        report.mismatch(|| format!("system {sys:?} at {w:?}: got {got:?}, oracle {expected:?}"));
                    }
                }
                Err(e) => failure = Some(e),
            }
        }
    });
    for_each_net(bounds, |net, markings| {
        report.models += 1;
        for m in markings {
            if failure.is_some() {
                return;
            }
            report.instances += 1;
            let s = marking(net, m);
            match oracle::oracle_maximal_petri(net, &s) {
                Ok(expected) => {
                    let got = net.enumerate_max_enabled(&s);
                    if got != expected {
                        report.mismatch(|| format!("net {net:?} at {m:?}: got {got:?}, oracle {expected:?}"));
                    }
                }
                Err(e) => failure = Some(e),
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(report),
    }
}

/// With every delay set to zero, the timed step must coincide exactly with
/// plain untimed rewriting: same contents, empty pending buffers, same
/// environment, clock advanced by one. Checked for every maximal choice of
/// every swept instance.
pub fn zero_delay_sweep(bounds: &SweepBounds) -> SweepReport {
    let mut report = SweepReport::default();
    let zero = SweepBounds { max_delay: 0, ..*bounds };
    for_each_psystem(&zero, |sys, contents| {
        report.models += 1;
        for w in contents {
            let c = configuration(sys, w);
            for choice in sys.enumerate_maximal(&c) {
                report.instances += 1;
                let expected = oracle::untimed_step_psystem(sys, &c, &choice);
                match sys.apply_step(&c, &choice) {
                    Ok(got) if got == expected => {}
                    other => report.mismatch(|| {
                        format!("system {sys:?} at {w:?} with {choice:?}: got {other:?}, reference {expected:?}")
                    }),
                }
            }
        }
    });
    let mut nets = SweepReport::default();
    for_each_net(&zero, |net, markings| {
        nets.models += 1;
        for m in markings {
            let s = marking(net, m);
            for choice in net.enumerate_max_enabled(&s) {
                nets.instances += 1;
                let expected = oracle::untimed_fire(net, &s, &choice);
                match net.fire(&s, &choice) {
                    Ok(got) if got == expected => {}
                    other => nets.mismatch(|| {
                        format!("net {net:?} at {m:?} with {choice:?}: got {other:?}, reference {expected:?}")
                    }),
                }
            }
        }
    });
    report.merge(nets);
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SweepBounds {
        SweepBounds {
            max_membranes: 2,
            max_symbols: 1,
            max_places: 2,
            max_rules: 2,
            max_delay: 1,
            max_objects: 3,
        }
    }

    #[test]
    fn subsets_and_vectors_are_counted_right() {
        let mut n = 0;
        for_each_subset(5, 2, |_| n += 1);
        assert_eq!(n, 1 + 5 + 10);
        // Weak compositions of at most 4 into 4 parts: C(8, 4).
        assert_eq!(count_vectors(4, 4).len(), 70);
    }

    #[test]
    fn shape_count_for_two_nested_membranes() {
        let mu = MembraneStructure::chain(2).unwrap();
        // Skin: 2 symbols x (1 + 2 x 3 targets); inner: 2 x (1 + 2 x 2); times 3 delays.
        assert_eq!(rule_shapes(&mu, 2, 2).len(), (14 + 10) * 3);
    }

    #[test]
    fn tiny_sweeps_agree() {
        let r = enumeration_sweep(&tiny()).unwrap();
        assert!(r.ok(), "{:?}", r.mismatches);
        assert!(r.instances > 100);
        let z = zero_delay_sweep(&tiny());
        assert!(z.ok(), "{:?}", z.mismatches);
        assert!(z.instances > 100);
    }
}
