//! Timed Petri nets with localities and max-enabled step firing.
//!
//! Every transition carries a locality label and a delay. Firing a multiset
//! of transitions consumes input tokens immediately; output tokens travel
//! through a per-place pending buffer and become available `delay + 1` ticks
//! later. Localities are structural: firing never consults them.

mod dot;

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::explore::MaxStepSemantics;
use crate::psystem::DisplayChoice;

pub use dot::to_dot;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("name {0} is used for more than one place or transition")]
    DuplicateName(String),
    #[error("transition {transition} references unknown place #{place}")]
    UnknownPlace { transition: String, place: usize },
    #[error("transition {0} has no input arcs; its max-enabled multiplicity would be unbounded")]
    EmptyPreset(String),
    #[error("initial marking has {given} entries, net has {expected} places")]
    MarkingArity { given: usize, expected: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FireError {
    #[error("transition multiset is not enabled at this marking")]
    NotEnabled,
    #[error("transition multiset is not maximal at this marking")]
    NotMaximal,
    #[error("transition id {0} is out of range")]
    UnknownTransition(usize),
    #[error("token count overflow")]
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub name: String,
    pub locality: u32,
    pub delay: u32,
    /// `(place, W(place, tr))`, sorted by place, weights >= 1.
    pub inputs: Vec<(usize, u64)>,
    /// `(place, W(tr, place))`, sorted by place, weights >= 1.
    pub outputs: Vec<(usize, u64)>,
}

fn add_arc(arcs: &mut Vec<(usize, u64)>, place: usize, weight: u64) {
    if weight == 0 {
        return;
    }
    match arcs.binary_search_by_key(&place, |&(p, _)| p) {
        Ok(i) => arcs[i].1 += weight,
        Err(i) => arcs.insert(i, (place, weight)),
    }
}

impl Transition {
    pub fn new(name: impl Into<String>, locality: u32, delay: u32) -> Self {
        Transition {
            name: name.into(),
            locality,
            delay,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn input(mut self, place: usize, weight: u64) -> Self {
        add_arc(&mut self.inputs, place, weight);
        self
    }

    pub fn output(mut self, place: usize, weight: u64) -> Self {
        add_arc(&mut self.outputs, place, weight);
        self
    }

    pub fn add_input(&mut self, place: usize, weight: u64) {
        add_arc(&mut self.inputs, place, weight);
    }

    pub fn add_output(&mut self, place: usize, weight: u64) {
        add_arc(&mut self.outputs, place, weight);
    }

    /// How many occurrences fit into `marking`.
    fn capacity(&self, marking: &[u64]) -> u64 {
        self.inputs
            .iter()
            .map(|&(p, w)| marking[p] / w)
            .min()
            .unwrap_or(u64::MAX)
    }

    fn fits(&self, marking: &[u64]) -> bool {
        self.inputs.iter().all(|&(p, w)| marking[p] >= w)
    }
}

/// `N = (P, T, W, L, D, M0)`. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedPetriNet {
    places: Vec<String>,
    transitions: Vec<Transition>,
    initial: Vec<u64>,
}

impl TimedPetriNet {
    pub fn new(places: Vec<String>, transitions: Vec<Transition>, initial: Vec<u64>) -> Result<Self, NetError> {
        if initial.len() != places.len() {
            return Err(NetError::MarkingArity {
                given: initial.len(),
                expected: places.len(),
            });
        }
        let mut names = HashSet::new();
        for name in places.iter().chain(transitions.iter().map(|t| &t.name)) {
            if !names.insert(name.as_str()) {
                return Err(NetError::DuplicateName(name.clone()));
            }
        }
        for t in &transitions {
            if t.inputs.is_empty() {
                return Err(NetError::EmptyPreset(t.name.clone()));
            }
            if let Some(&(p, _)) = t.inputs.iter().chain(&t.outputs).find(|&&(p, _)| p >= places.len()) {
                return Err(NetError::UnknownPlace {
                    transition: t.name.clone(),
                    place: p,
                });
            }
        }
        Ok(TimedPetriNet {
            places,
            transitions,
            initial,
        })
    }

    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn initial_marking(&self) -> &[u64] {
        &self.initial
    }

    pub fn place_id(&self, name: &str) -> Option<usize> {
        self.places.iter().position(|p| p == name)
    }

    pub fn transition_id(&self, name: &str) -> Option<usize> {
        self.transitions.iter().position(|t| t.name == name)
    }

    /// `W(p, tr)`.
    pub fn weight_in(&self, place: usize, transition: usize) -> u64 {
        lookup(&self.transitions[transition].inputs, place)
    }

    /// `W(tr, p)`.
    pub fn weight_out(&self, transition: usize, place: usize) -> u64 {
        lookup(&self.transitions[transition].outputs, place)
    }

    /// `m' = max D(tr)`, 0 for a net without transitions.
    pub fn max_delay(&self) -> u32 {
        self.transitions.iter().map(|t| t.delay).max().unwrap_or(0)
    }

    pub fn initial_state(&self) -> PNState {
        PNState {
            marking: self.initial.clone(),
            pending: vec![BTreeMap::new(); self.places.len()],
            gc: 0,
        }
    }

    /// The same net with every delay set to 0.
    pub fn with_zero_delays(&self) -> TimedPetriNet {
        let mut out = self.clone();
        for t in &mut out.transitions {
            t.delay = 0;
        }
        out
    }

    /// `pre(U)(p)`, saturating.
    pub fn pre_of(&self, choice: &FiringChoice, place: usize) -> u64 {
        choice
            .counts
            .iter()
            .filter_map(|(&t, &n)| self.transitions.get(t).map(|tr| n.saturating_mul(lookup(&tr.inputs, place))))
            .fold(0u64, u64::saturating_add)
    }

    fn residual(&self, s: &PNState, choice: &FiringChoice) -> Option<Vec<u64>> {
        let mut residual = s.marking.clone();
        for (&t, &n) in &choice.counts {
            for &(p, w) in &self.transitions.get(t)?.inputs {
                residual[p] = residual[p].checked_sub(w.checked_mul(n)?)?;
            }
        }
        Some(residual)
    }

    pub fn is_enabled(&self, s: &PNState, choice: &FiringChoice) -> bool {
        self.residual(s, choice).is_some()
    }

    /// Enabled, and no single further occurrence of any transition fits into
    /// the tokens left over.
    pub fn is_max_enabled(&self, s: &PNState, choice: &FiringChoice) -> bool {
        match self.residual(s, choice) {
            Some(residual) => !self.transitions.iter().any(|t| t.fits(&residual)),
            None => false,
        }
    }

    /// All max-enabled multisets in ascending canonical order; `[∅]` at a
    /// dead marking.
    pub fn enumerate_max_enabled(&self, s: &PNState) -> Vec<FiringChoice> {
        let mut out = Vec::new();
        let mut counts = Vec::with_capacity(self.transitions.len());
        let mut residual = s.marking.clone();
        self.extend(0, &mut residual, &mut counts, &mut out);
        out.sort();
        out
    }

    fn extend(
        &self,
        k: usize,
        residual: &mut Vec<u64>,
        counts: &mut Vec<(usize, u64)>,
        out: &mut Vec<FiringChoice>,
    ) {
        if k == self.transitions.len() {
            if !self.transitions.iter().any(|t| t.fits(residual)) {
                out.push(FiringChoice {
                    counts: counts.iter().copied().filter(|&(_, n)| n > 0).collect(),
                });
            }
            return;
        }
        let tr = &self.transitions[k];
        let cap = tr.capacity(residual);
        for &(p, w) in &tr.inputs {
            residual[p] -= w * cap;
        }
        let mut n = cap;
        loop {
            counts.push((k, n));
            self.extend(k + 1, residual, counts, out);
            counts.pop();
            if n == 0 {
                break;
            }
            n -= 1;
            for &(p, w) in &tr.inputs {
                residual[p] += w;
            }
        }
    }

    /// One tick: consume `pre(U)`, deposit outputs with remaining delay
    /// `D(tr)`, deliver the tokens whose delay reached 0, shift, `gc + 1`.
    pub fn fire(&self, s: &PNState, choice: &FiringChoice) -> Result<PNState, FireError> {
        if let Some(&t) = choice.counts.keys().find(|&&t| t >= self.transitions.len()) {
            return Err(FireError::UnknownTransition(t));
        }
        let Some(marking) = self.residual(s, choice) else {
            return Err(FireError::NotEnabled);
        };
        if self.transitions.iter().any(|t| t.fits(&marking)) {
            return Err(FireError::NotMaximal);
        }
        let mut next = PNState {
            marking,
            pending: s.pending.clone(),
            gc: s.gc + 1,
        };
        for (&t, &n) in &choice.counts {
            let tr = &self.transitions[t];
            for &(p, w) in &tr.outputs {
                let produced = w.checked_mul(n).ok_or(FireError::Overflow)?;
                let slot = next.pending[p].entry(tr.delay).or_default();
                *slot = slot.checked_add(produced).ok_or(FireError::Overflow)?;
            }
        }
        for (tokens, pending) in next.marking.iter_mut().zip(next.pending.iter_mut()) {
            if let Some(ready) = pending.remove(&0) {
                *tokens = tokens.checked_add(ready).ok_or(FireError::Overflow)?;
            }
            *pending = std::mem::take(pending).into_iter().map(|(j, n)| (j - 1, n)).collect();
        }
        Ok(next)
    }

    pub fn is_dead(&self, s: &PNState) -> bool {
        !s.has_pending() && !self.transitions.iter().any(|t| t.fits(&s.marking))
    }
}

fn lookup(arcs: &[(usize, u64)], place: usize) -> u64 {
    arcs.binary_search_by_key(&place, |&(p, _)| p)
        .map(|i| arcs[i].1)
        .unwrap_or(0)
}

/// A marking together with tokens in transit and the global clock.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PNState {
    pub marking: Vec<u64>,
    /// `pending[p][j]`: tokens reaching `p` once `j` more ticks complete.
    pub pending: Vec<BTreeMap<u32, u64>>,
    pub gc: u64,
}

impl PNState {
    pub fn has_pending(&self) -> bool {
        self.pending.iter().any(|p| !p.is_empty())
    }
}

/// A multiset of transition occurrences, keyed by transition id.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiringChoice {
    pub counts: BTreeMap<usize, u64>,
}

impl FiringChoice {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_counts<I: IntoIterator<Item = (usize, u64)>>(counts: I) -> Self {
        let mut choice = Self::default();
        for (t, n) in counts {
            if n > 0 {
                *choice.counts.entry(t).or_default() += n;
            }
        }
        choice
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn display<'a>(&'a self, net: &'a TimedPetriNet) -> DisplayChoice<'a> {
        DisplayChoice {
            counts: &self.counts,
            name: Box::new(move |id| net.transitions()[id].name.as_str()),
        }
    }
}

impl MaxStepSemantics for TimedPetriNet {
    type State = PNState;
    type Choice = FiringChoice;
    type Error = FireError;

    fn initial_state(&self) -> PNState {
        TimedPetriNet::initial_state(self)
    }

    fn maximal_choices(&self, state: &PNState) -> Result<Vec<FiringChoice>, FireError> {
        Ok(self.enumerate_max_enabled(state))
    }

    fn step(&self, state: &PNState, choice: &FiringChoice) -> Result<PNState, FireError> {
        self.fire(state, choice)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explore;
    use crate::samples;

    fn choice(pairs: &[(usize, u64)]) -> FiringChoice {
        FiringChoice::from_counts(pairs.iter().copied())
    }

    fn marking(net: &TimedPetriNet, s: &PNState) -> Vec<(String, u64)> {
        net.places().iter().cloned().zip(s.marking.iter().copied()).collect()
    }

    fn expect(pairs: &[(&str, u64)]) -> Vec<(String, u64)> {
        pairs.iter().map(|&(p, n)| (p.to_string(), n)).collect()
    }

    #[test]
    fn construction_validation() {
        let places = vec!["p".to_string(), "q".to_string()];
        assert_eq!(
            TimedPetriNet::new(places.clone(), vec![Transition::new("p", 1, 0).input(0, 1)], vec![0, 0]),
            Err(NetError::DuplicateName("p".into()))
        );
        assert_eq!(
            TimedPetriNet::new(places.clone(), vec![Transition::new("t", 1, 0).output(0, 1)], vec![0, 0]),
            Err(NetError::EmptyPreset("t".into()))
        );
        assert!(matches!(
            TimedPetriNet::new(places.clone(), vec![Transition::new("t", 1, 0).input(5, 1)], vec![0, 0]),
            Err(NetError::UnknownPlace { place: 5, .. })
        ));
        assert!(matches!(
            TimedPetriNet::new(places, vec![], vec![0]),
            Err(NetError::MarkingArity { given: 1, expected: 2 })
        ));
    }

    #[test]
    fn pre_of_examples() {
        let net = samples::two_membrane_net();
        let tr1 = net.transition_id("tr_r1_1").unwrap();
        let tr2 = net.transition_id("tr_r2_2").unwrap();
        let a2 = net.place_id("a_2").unwrap();
        let b1 = net.place_id("b_1").unwrap();
        assert_eq!(net.pre_of(&choice(&[(tr2, 2)]), a2), 2);
        assert_eq!(net.pre_of(&FiringChoice::empty(), a2), 0);
        assert_eq!(net.pre_of(&choice(&[(tr1, 1)]), b1), 1);
    }

    #[test]
    fn max_enabled_examples() {
        let net = samples::two_membrane_net();
        let s0 = net.initial_state();
        assert!(net.is_max_enabled(&s0, &choice(&[(0, 1), (1, 2)])));
        assert!(!net.is_max_enabled(&s0, &choice(&[(0, 1), (1, 1)])));
        assert!(!net.is_max_enabled(&s0, &choice(&[(0, 1)])));
        assert_eq!(net.enumerate_max_enabled(&s0), vec![choice(&[(0, 1), (1, 2)])]);
        let branching = samples::branching_net();
        assert_eq!(
            branching.enumerate_max_enabled(&branching.initial_state()),
            vec![choice(&[(0, 1), (1, 1)]), choice(&[(0, 3)])]
        );
    }

    #[test]
    fn fire_reproduces_pictured_markings() {
        let net = samples::two_membrane_net();
        let s0 = net.initial_state();
        assert_eq!(marking(&net, &s0), expect(&[("a_1", 1), ("a_2", 2), ("b_1", 1), ("b_2", 1)]));
        let s1 = net.fire(&s0, &choice(&[(0, 1), (1, 2)])).unwrap();
        assert_eq!(marking(&net, &s1), expect(&[("a_1", 1), ("a_2", 0), ("b_1", 0), ("b_2", 2)]));
        assert_eq!(s1.gc, 1);
        assert_eq!(net.enumerate_max_enabled(&s1), vec![FiringChoice::empty()]);
        let s2 = net.fire(&s1, &FiringChoice::empty()).unwrap();
        assert_eq!(s2.marking, s1.marking);
        let s3 = net.fire(&s2, &FiringChoice::empty()).unwrap();
        assert_eq!(marking(&net, &s3), expect(&[("a_1", 3), ("a_2", 0), ("b_1", 0), ("b_2", 2)]));
        assert!(net.is_dead(&s3));
        let s4 = net.fire(&s3, &FiringChoice::empty()).unwrap();
        assert_eq!(s4.marking, s3.marking);
        assert_eq!(s4.gc, 4);
    }

    #[test]
    fn fire_rejects_bad_choices() {
        let net = samples::two_membrane_net();
        let s0 = net.initial_state();
        assert_eq!(net.fire(&s0, &choice(&[(1, 3)])), Err(FireError::NotEnabled));
        assert_eq!(net.fire(&s0, &choice(&[(1, 2)])), Err(FireError::NotMaximal));
        assert_eq!(net.fire(&s0, &choice(&[(9, 1)])), Err(FireError::UnknownTransition(9)));
    }

    #[test]
    fn exhaustive_run_on_branching_net() {
        let net = samples::branching_net();
        let g = explore::explore(&net, 1, 100).unwrap();
        assert_eq!(g.at_depth(1).count(), 2);
        let g0 = explore::explore(&net, 0, 100).unwrap();
        assert_eq!(g0.nodes.len(), 1);
    }
}
