//! Seeded random model generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::multiset::{Alphabet, Multiset, Symbol};
use crate::petri::{TimedPetriNet, Transition};
use crate::psystem::{Label, MembraneStructure, Rule, Target, TimedPSystem};

/// Upper bounds for [`random_system`]; every count is drawn uniformly from
/// `1..=max` (rules and tokens from `0..=max`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemParams {
    pub max_membranes: u32,
    pub max_symbols: u32,
    pub max_rules: usize,
    pub max_lhs: u64,
    pub max_rhs: u64,
    pub max_delay: u32,
    pub max_initial_tokens: u64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            max_membranes: 2,
            max_symbols: 3,
            max_rules: 4,
            max_lhs: 2,
            max_rhs: 2,
            max_delay: 3,
            max_initial_tokens: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetParams {
    pub max_places: usize,
    pub max_transitions: usize,
    pub max_inputs: u64,
    pub max_outputs: u64,
    pub max_delay: u32,
    pub max_initial_tokens: u64,
}

impl Default for NetParams {
    fn default() -> Self {
        NetParams {
            max_places: 4,
            max_transitions: 3,
            max_inputs: 2,
            max_outputs: 2,
            max_delay: 3,
            max_initial_tokens: 8,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn symbol_names(n: u32) -> Vec<String> {
    (0..n).map(|i| ((b'a' + (i % 26) as u8) as char).to_string() + &"x".repeat((i / 26) as usize)).collect()
}

fn random_multiset(rng: &mut impl Rng, symbols: u32, size: u64) -> Multiset {
    Multiset::from_pairs((0..size).map(|_| (Symbol(rng.gen_range(0..symbols)), 1))).expect("small counts")
}

/// A random membrane system. Membrane `l > 1` sits inside a random earlier
/// membrane, so every `in` target drawn names a real child.
pub fn random_system(rng: &mut impl Rng, p: &SystemParams) -> TimedPSystem {
    let n = rng.gen_range(1..=p.max_membranes.max(1));
    let v = rng.gen_range(1..=p.max_symbols.max(1));
    let alphabet = Alphabet::from_names(symbol_names(v));
    let nodes: Vec<(Label, Option<Label>)> = (1..=n)
        .map(|l| (l, if l == 1 { None } else { Some(rng.gen_range(1..l)) }))
        .collect();
    let mu = MembraneStructure::new(&nodes).expect("generated tree");
    let mut initial = vec![Multiset::new(); n as usize];
    for _ in 0..rng.gen_range(0..=p.max_initial_tokens) {
        let i = rng.gen_range(0..n as usize);
        initial[i].insert(Symbol(rng.gen_range(0..v)), 1).expect("small counts");
    }
    let rule_count = rng.gen_range(0..=p.max_rules);
    let mut rules = Vec::with_capacity(rule_count);
    for k in 0..rule_count {
        let home = rng.gen_range(1..=n);
        let idx = mu.index_of(home).expect("label in range");
        let mut targets = vec![Target::Here, Target::Out];
        targets.extend(mu.children(idx).iter().map(|&c| Target::In(mu.label(c))));
        let lhs_size = rng.gen_range(1..=p.max_lhs.max(1));
        let lhs = random_multiset(rng, v, lhs_size);
        let mut rule = Rule::new(format!("r{}", k + 1), home, lhs, rng.gen_range(0..=p.max_delay));
        for _ in 0..rng.gen_range(0..=p.max_rhs) {
            let target = *targets.choose(rng).expect("non-empty targets");
            rule.push_message(Multiset::singleton(Symbol(rng.gen_range(0..v)), 1), target)
                .expect("small counts");
        }
        rules.push(rule);
    }
    TimedPSystem::new(alphabet, mu, initial, rules).expect("generated system is valid")
}

/// A random net; every transition has at least one input arc.
pub fn random_net(rng: &mut impl Rng, p: &NetParams) -> TimedPetriNet {
    let places = rng.gen_range(1..=p.max_places.max(1));
    let names: Vec<String> = (0..places).map(|i| format!("p{i}")).collect();
    let mut initial = vec![0u64; places];
    for _ in 0..rng.gen_range(0..=p.max_initial_tokens) {
        initial[rng.gen_range(0..places)] += 1;
    }
    let count = rng.gen_range(0..=p.max_transitions);
    let mut transitions = Vec::with_capacity(count);
    for k in 0..count {
        let mut t = Transition::new(format!("t{k}"), rng.gen_range(1..=2), rng.gen_range(0..=p.max_delay));
        for _ in 0..rng.gen_range(1..=p.max_inputs.max(1)) {
            t.add_input(rng.gen_range(0..places), 1);
        }
        for _ in 0..rng.gen_range(0..=p.max_outputs) {
            t.add_output(rng.gen_range(0..places), 1);
        }
        transitions.push(t);
    }
    TimedPetriNet::new(names, transitions, initial).expect("generated net is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic_per_seed() {
        let p = SystemParams::default();
        for seed in 0..20 {
            assert_eq!(random_system(&mut rng(seed), &p), random_system(&mut rng(seed), &p));
            let q = NetParams::default();
            assert_eq!(random_net(&mut rng(seed), &q), random_net(&mut rng(seed), &q));
        }
    }

    #[test]
    fn generated_models_respect_bounds() {
        let p = SystemParams::default();
        let mut r = rng(3);
        for _ in 0..200 {
            let s = random_system(&mut r, &p);
            assert!(s.structure().len() <= 2);
            assert!(s.alphabet().len() <= 3);
            assert!(s.rules().len() <= 4);
            assert!(s.max_delay() <= 3);
            assert!(s.initial_contents().iter().map(Multiset::size).sum::<u64>() <= 6);
        }
        let q = NetParams::default();
        for _ in 0..200 {
            let n = random_net(&mut r, &q);
            assert!(n.places().len() <= 4);
            assert!(n.transitions().len() <= 3);
            assert!(n.max_delay() <= 3);
            assert!(n.initial_marking().iter().sum::<u64>() <= 8);
        }
    }
}
