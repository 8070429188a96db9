//! Model-to-model translations:
//!
//! * [`detime_psystem`]: timed membrane system -> untimed one, where each
//!   delayed product travels through staged copies `a_j` that tick down by
//!   one per step;
//! * [`detime_petri`]: timed net -> untimed net, where each delayed output
//!   travels through a chain of intermediate places and transitions;
//! * [`psystem_to_petri`]: timed membrane system -> timed net with one place
//!   per (object, membrane) and one transition per rule, located in the
//!   rule's membrane.
//!
//! Each translation returns the correspondence data needed to map states
//! and steps back and forth.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::multiset::{Alphabet, Multiset, MultisetError, Symbol};
use crate::petri::{FiringChoice, NetError, PNState, TimedPetriNet, Transition};
use crate::psystem::{Label, ModelError, PConfiguration, Rule, StepChoice, Target, TimedPSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Multiset(#[from] MultisetError),
}

/// Picks `base`, or `base` followed by enough underscores to be unused.
fn fresh(taken: &mut HashSet<String>, base: String) -> String {
    let mut name = base;
    while taken.contains(&name) {
        name.push('_');
    }
    taken.insert(name.clone());
    name
}

/// A symbol of the detimed alphabet: an original object, or its copy that
/// still has `stage + 1` ticks to wait.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DetimedSymbol {
    pub base: Symbol,
    pub stage: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct DetimedPSystem {
    /// Untimed system: every execution time is 0.
    pub system: TimedPSystem,
    /// Indexed by detimed symbol.
    pub symbols: Vec<DetimedSymbol>,
    /// For each detimed rule, the original rule it stems from (`None` for
    /// the staging rules).
    pub rule_origin: Vec<Option<usize>>,
}

impl DetimedPSystem {
    /// Projection onto the original alphabet; staged symbols are erased.
    pub fn projection(&self, sym: Symbol) -> Option<Symbol> {
        let d = self.symbols[sym.index()];
        d.stage.is_none().then_some(d.base)
    }

    pub fn project(&self, contents: &[Multiset]) -> Vec<Multiset> {
        contents
            .iter()
            .map(|m| m.restrict(|s| self.symbols[s.index()].stage.is_none()))
            .collect()
    }
}

/// Replaces every delay by staged objects. Zero-delay rules are copied;
/// a rule `u -> v` with `e(r) > 0` becomes `u -> v'` where each object `a`
/// of `v` is replaced by `a_{e(r)-1}` under the same target. Every membrane
/// gets the staging rules `a_j -> a_{j-1}` and `a_0 -> a` for each staged
/// object some rule can produce, since targets may carry staged objects
/// anywhere.
pub fn detime_psystem(sys: &TimedPSystem) -> Result<DetimedPSystem, TranslateError> {
    let m = sys.max_delay();
    let original = sys.alphabet();
    let mut alphabet = original.clone();
    let mut names: HashSet<String> = original.names().iter().cloned().collect();
    let mut symbols: Vec<DetimedSymbol> = original.symbols().map(|s| DetimedSymbol { base: s, stage: None }).collect();
    let mut staged: BTreeMap<(Symbol, u32), Symbol> = BTreeMap::new();
    for a in original.symbols() {
        for j in 0..m {
            let name = fresh(&mut names, format!("{}_{j}", original.name(a)));
            let sym = alphabet.intern(name);
            staged.insert((a, j), sym);
            symbols.push(DetimedSymbol { base: a, stage: Some(j) });
        }
    }

    let mut rule_names: HashSet<String> = sys.rules().iter().map(|r| r.name.clone()).collect();
    let mut rules = Vec::new();
    let mut rule_origin = Vec::new();
    let mut producible: BTreeSet<(Symbol, u32)> = BTreeSet::new();
    for (id, rule) in sys.rules().iter().enumerate() {
        rule_origin.push(Some(id));
        if rule.delay == 0 {
            rules.push(rule.clone());
            continue;
        }
        let stage = rule.delay - 1;
        let mut staged_rule = Rule::new(rule.name.clone(), rule.home, rule.lhs.clone(), 0);
        for (&target, objects) in &rule.rhs {
            let moved = Multiset::from_pairs(objects.iter().map(|(a, n)| (staged[&(a, stage)], n)))?;
            staged_rule.push_message(moved, target)?;
            for a in objects.support() {
                producible.extend((0..=stage).map(|j| (a, j)));
            }
        }
        rules.push(staged_rule);
    }
    for &label in sys.structure().labels() {
        for &(a, j) in &producible {
            let name = fresh(&mut rule_names, format!("tick_{}_{j}_m{label}", original.name(a)));
            let next = if j == 0 { a } else { staged[&(a, j - 1)] };
            rules.push(
                Rule::new(name, label, Multiset::singleton(staged[&(a, j)], 1), 0)
                    .with_message(Multiset::singleton(next, 1), Target::Here),
            );
            rule_origin.push(None);
        }
    }
    let system = TimedPSystem::new(alphabet, sys.structure().clone(), sys.initial_contents().to_vec(), rules)?;
    Ok(DetimedPSystem {
        system,
        symbols,
        rule_origin,
    })
}

/// A place of the detimed net: an original place, or the `stage`-th
/// waiting place on the way from `transition` to `base`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetimedPlace {
    pub base: usize,
    pub chain: Option<(usize, u32)>,
}

/// A transition of the detimed net: an original transition, or the
/// `stage`-th forwarding step of `source`'s delay chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetimedTransition {
    pub source: usize,
    pub stage: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct DetimedNet {
    pub net: TimedPetriNet,
    pub places: Vec<DetimedPlace>,
    pub transitions: Vec<DetimedTransition>,
}

impl DetimedNet {
    pub fn projection(&self, place: usize) -> Option<usize> {
        let p = self.places[place];
        p.chain.is_none().then_some(p.base)
    }

    /// Marking restricted to the original places.
    pub fn project(&self, marking: &[u64]) -> Vec<u64> {
        marking
            .iter()
            .zip(&self.places)
            .filter(|(_, p)| p.chain.is_none())
            .map(|(&n, _)| n)
            .collect()
    }
}

/// Replaces every delay `D(tr) > 0` by a chain: `tr` now outputs into
/// `p^{D-1}_tr` for each output place `p`, and `tr^j` moves the tokens from
/// every `p^j_tr` to `p^{j-1}_tr` (`tr^0` delivers into `p`). All weights
/// along a chain are `W(tr, p)`; chain transitions inherit `L(tr)`. A
/// delayed transition without outputs needs no chain.
pub fn detime_petri(net: &TimedPetriNet) -> Result<DetimedNet, TranslateError> {
    let mut names: HashSet<String> = net
        .places()
        .iter()
        .cloned()
        .chain(net.transitions().iter().map(|t| t.name.clone()))
        .collect();
    let mut place_names = net.places().to_vec();
    let mut places: Vec<DetimedPlace> = (0..place_names.len()).map(|p| DetimedPlace { base: p, chain: None }).collect();
    let mut marking = net.initial_marking().to_vec();
    let mut transitions = Vec::new();
    let mut origins: Vec<DetimedTransition> = Vec::new();
    let mut chains = Vec::new();

    for (t, tr) in net.transitions().iter().enumerate() {
        if tr.delay == 0 || tr.outputs.is_empty() {
            let mut copy = tr.clone();
            copy.delay = 0;
            transitions.push(copy);
            origins.push(DetimedTransition { source: t, stage: None });
            continue;
        }
        // chain_places[k][j] is p^j_tr for the k-th output p
        let mut chain_places = Vec::new();
        for &(p, _) in &tr.outputs {
            let stages: Vec<usize> = (0..tr.delay)
                .map(|j| {
                    let name = fresh(&mut names, format!("{}_{}_{j}", net.places()[p], tr.name));
                    place_names.push(name);
                    places.push(DetimedPlace {
                        base: p,
                        chain: Some((t, j)),
                    });
                    marking.push(0);
                    place_names.len() - 1
                })
                .collect();
            chain_places.push(stages);
        }
        let last = tr.delay as usize - 1;
        let mut head = Transition::new(tr.name.clone(), tr.locality, 0);
        head.inputs = tr.inputs.clone();
        for (k, &(_, w)) in tr.outputs.iter().enumerate() {
            head.add_output(chain_places[k][last], w);
        }
        transitions.push(head);
        origins.push(DetimedTransition { source: t, stage: None });
        chains.push((t, chain_places));
    }
    for (t, chain_places) in chains {
        let tr = &net.transitions()[t];
        for j in 0..tr.delay {
            let name = fresh(&mut names, format!("{}_{j}", tr.name));
            let mut step = Transition::new(name, tr.locality, 0);
            for (k, &(p, w)) in tr.outputs.iter().enumerate() {
                step.add_input(chain_places[k][j as usize], w);
                let dest = if j == 0 { p } else { chain_places[k][j as usize - 1] };
                step.add_output(dest, w);
            }
            transitions.push(step);
            origins.push(DetimedTransition { source: t, stage: Some(j) });
        }
    }
    let out = TimedPetriNet::new(place_names, transitions, marking)?;
    Ok(DetimedNet {
        net: out,
        places,
        transitions: origins,
    })
}

/// The net of a timed membrane system together with the place and
/// transition correspondences.
#[derive(Debug, Clone)]
pub struct NetTranslation {
    pub net: TimedPetriNet,
    /// `place_of[a][i]`: place of object `a` in the membrane with index `i`.
    pub place_of: Vec<Vec<usize>>,
    /// `(object, membrane label)` of each place.
    pub place_origin: Vec<(Symbol, Label)>,
    /// Transition id of each rule; rule `r` maps to transition `r`.
    pub transition_of: Vec<usize>,
}

impl NetTranslation {
    /// `M_C`, extended to carry the objects in transit and the clock.
    pub fn state_of(&self, c: &PConfiguration) -> PNState {
        let places = self.place_origin.len();
        let mut marking = vec![0; places];
        let mut pending = vec![BTreeMap::new(); places];
        for (i, contents) in c.contents.iter().enumerate() {
            for (a, n) in contents.iter() {
                marking[self.place_of[a.index()][i]] = n;
            }
            for (&j, objects) in &c.pending[i] {
                for (a, n) in objects.iter() {
                    pending[self.place_of[a.index()][i]].insert(j, n);
                }
            }
        }
        PNState {
            marking,
            pending,
            gc: c.clock,
        }
    }

    /// `U_R`.
    pub fn firing_of(&self, choice: &StepChoice) -> FiringChoice {
        FiringChoice::from_counts(choice.counts.iter().map(|(&r, &n)| (self.transition_of[r], n)))
    }

    pub fn choice_of(&self, firing: &FiringChoice) -> StepChoice {
        StepChoice::from_counts(firing.counts.iter().filter_map(|(&t, &n)| {
            self.transition_of.iter().position(|&x| x == t).map(|r| (r, n))
        }))
    }
}

/// One place `(a, i)` per object and membrane (object-major order), one
/// transition `tr^r_j` per rule `r` of membrane `j` with `L = j`,
/// `D = e(r)`, input weights from `lhs` in `j` and output weights by target:
/// `here` feeds `(a, j)`, `out` the parent, `in i` the child `i`. Objects
/// sent out of the skin have no place and vanish.
pub fn psystem_to_petri(sys: &TimedPSystem) -> Result<NetTranslation, TranslateError> {
    let structure = sys.structure();
    let alphabet: &Alphabet = sys.alphabet();
    let mut names = HashSet::new();
    let mut place_names = Vec::new();
    let mut place_of = vec![Vec::with_capacity(structure.len()); alphabet.len()];
    let mut place_origin = Vec::new();
    let mut marking = Vec::new();
    for a in alphabet.symbols() {
        for (i, &label) in structure.labels().iter().enumerate() {
            place_names.push(fresh(&mut names, format!("{}_{label}", alphabet.name(a))));
            place_of[a.index()].push(place_origin.len());
            place_origin.push((a, label));
            marking.push(sys.initial_contents()[i].count(a));
        }
    }
    let mut transitions = Vec::with_capacity(sys.rules().len());
    for rule in sys.rules() {
        let home = structure.index_of(rule.home).ok_or(ModelError::UnknownMembrane(rule.home))?;
        let name = fresh(&mut names, format!("tr_{}_{}", rule.name, rule.home));
        let mut tr = Transition::new(name, rule.home, rule.delay);
        for (a, n) in rule.lhs.iter() {
            tr.add_input(place_of[a.index()][home], n);
        }
        for (&target, objects) in &rule.rhs {
            let dest = match target {
                Target::Here => Some(home),
                Target::Out => structure.parent(home),
                Target::In(child) => Some(
                    structure
                        .index_of(child)
                        .ok_or(ModelError::NoSuchChild { home: rule.home, child })?,
                ),
            };
            if let Some(i) = dest {
                for (a, n) in objects.iter() {
                    tr.add_output(place_of[a.index()][i], n);
                }
            }
        }
        transitions.push(tr);
    }
    let transition_of = (0..transitions.len()).collect();
    let net = TimedPetriNet::new(place_names, transitions, marking)?;
    Ok(NetTranslation {
        net,
        place_of,
        place_origin,
        transition_of,
    })
}
