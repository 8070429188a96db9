//! Small ready-made models used by the examples, the tests and the docs.

use crate::multiset::{Alphabet, Multiset};
use crate::petri::{TimedPetriNet, Transition};
use crate::psystem::{MembraneStructure, Rule, TimedPSystem, Target};

/// Two nested membranes `[[ ]_2]_1` over `{a, b}` with contents `a b` and
/// `a^2 b`, rules `r1: b -> (b, in 2) @0` in 1 and `r2: a -> (a, out) @2`
/// in 2.
pub fn two_membrane_system() -> TimedPSystem {
    let mut alpha = Alphabet::new();
    let a = alpha.intern("a");
    let b = alpha.intern("b");
    let mu = MembraneStructure::chain(2).expect("static structure");
    let w1 = Multiset::from_pairs([(a, 1), (b, 1)]).expect("static contents");
    let w2 = Multiset::from_pairs([(a, 2), (b, 1)]).expect("static contents");
    let r1 = Rule::new("r1", 1, Multiset::singleton(b, 1), 0).with_message(Multiset::singleton(b, 1), Target::In(2));
    let r2 = Rule::new("r2", 2, Multiset::singleton(a, 1), 2).with_message(Multiset::singleton(a, 1), Target::Out);
    TimedPSystem::new(alpha, mu, vec![w1, w2], vec![r1, r2]).expect("static system")
}

/// The timed net corresponding to [`two_membrane_system`], written out by
/// hand: places `a_1 a_2 b_1 b_2`, `tr_r1_1: b_1 -> b_2 @0 loc 1` and
/// `tr_r2_2: a_2 -> a_1 @2 loc 2`.
pub fn two_membrane_net() -> TimedPetriNet {
    let places = ["a_1", "a_2", "b_1", "b_2"].map(String::from).to_vec();
    let tr1 = Transition::new("tr_r1_1", 1, 0).input(2, 1).output(3, 1);
    let tr2 = Transition::new("tr_r2_2", 2, 2).input(1, 1).output(0, 1);
    TimedPetriNet::new(places, vec![tr1, tr2], vec![1, 2, 1, 1]).expect("static net")
}

/// One membrane holding `a^3` with `r: a -> (b, here)` and
/// `r_prime: a^2 -> (c, here)`; two maximal steps compete.
pub fn branching_system() -> TimedPSystem {
    let mut alpha = Alphabet::new();
    let a = alpha.intern("a");
    let b = alpha.intern("b");
    let c = alpha.intern("c");
    let mu = MembraneStructure::chain(1).expect("static structure");
    let r = Rule::new("r", 1, Multiset::singleton(a, 1), 0).with_message(Multiset::singleton(b, 1), Target::Here);
    let r_prime = Rule::new("r_prime", 1, Multiset::singleton(a, 2), 0).with_message(Multiset::singleton(c, 1), Target::Here);
    TimedPSystem::new(alpha, mu, vec![Multiset::singleton(a, 3)], vec![r, r_prime]).expect("static system")
}

/// Place `p` with three tokens feeding `tr_a` (weight 1) and `tr_b`
/// (weight 2).
pub fn branching_net() -> TimedPetriNet {
    let places = ["p", "x", "y"].map(String::from).to_vec();
    let tr_a = Transition::new("tr_a", 1, 0).input(0, 1).output(1, 1);
    let tr_b = Transition::new("tr_b", 1, 0).input(0, 2).output(2, 1);
    TimedPetriNet::new(places, vec![tr_a, tr_b], vec![3, 0, 0]).expect("static net")
}
