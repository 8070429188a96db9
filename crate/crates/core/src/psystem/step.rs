use std::collections::BTreeMap;

use thiserror::Error;

use super::{Label, PConfiguration, StepChoice, TimedPSystem};
use crate::explore::MaxStepSemantics;
use crate::multiset::{Multiset, MultisetError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("rule multiset is not applicable in this configuration")]
    NotApplicable,
    #[error("rule multiset is not maximal in this configuration")]
    NotMaximal,
    #[error("rule id {0} is out of range")]
    UnknownRule(usize),
    #[error(transparent)]
    Multiset(#[from] MultisetError),
}

impl TimedPSystem {
    /// `lhs_i`: the objects consumed in membrane `membrane` by `choice`.
    pub fn lhs_of(&self, choice: &StepChoice, membrane: Label) -> Result<Multiset, StepError> {
        let mut out = Multiset::new();
        let Some(idx) = self.structure.index_of(membrane) else {
            return Ok(out);
        };
        for (&rule, &n) in &choice.counts {
            let compiled = self.compiled.get(rule).ok_or(StepError::UnknownRule(rule))?;
            if compiled.home == idx {
                out.absorb(&self.rules[rule].lhs.scale(n)?)?;
            }
        }
        Ok(out)
    }

    /// Residual contents after consuming every left-hand side of `choice`,
    /// or `None` if some membrane lacks objects.
    fn residual(&self, c: &PConfiguration, choice: &StepChoice) -> Option<Vec<Multiset>> {
        let mut residual = c.contents.clone();
        for (&rule, &n) in &choice.counts {
            let compiled = self.compiled.get(rule)?;
            let need = self.rules[rule].lhs.scale(n).ok()?;
            residual[compiled.home].deplete(&need).ok()?;
        }
        Some(residual)
    }

    pub fn is_applicable(&self, c: &PConfiguration, choice: &StepChoice) -> bool {
        self.residual(c, choice).is_some()
    }

    /// No single further occurrence of any rule, including rules already in
    /// `choice`, fits into what `choice` leaves behind.
    pub fn is_maximal(&self, c: &PConfiguration, choice: &StepChoice) -> bool {
        match self.residual(c, choice) {
            Some(residual) => !self
                .rules
                .iter()
                .zip(&self.compiled)
                .any(|(r, cr)| r.lhs.leq(&residual[cr.home])),
            None => false,
        }
    }

    /// Every applicable and maximal rule multiset, in ascending canonical
    /// order; `[∅]` when nothing applies.
    ///
    /// Each rule consumes only from its home membrane, so the maximal
    /// multisets are the products of per-membrane maximal multisets.
    pub fn enumerate_maximal(&self, c: &PConfiguration) -> Vec<StepChoice> {
        let mut combined: Vec<BTreeMap<usize, u64>> = vec![BTreeMap::new()];
        for (membrane, rules) in self.by_membrane.iter().enumerate() {
            if rules.is_empty() {
                continue;
            }
            let mut local = Vec::new();
            let mut counts = Vec::with_capacity(rules.len());
            self.extend_local(rules, 0, &c.contents[membrane], &mut counts, &mut local);
            if local.len() == 1 && local[0].iter().all(|&(_, n)| n == 0) {
                continue;
            }
            let mut next = Vec::with_capacity(combined.len() * local.len());
            for base in &combined {
                for pick in &local {
                    let mut merged = base.clone();
                    merged.extend(pick.iter().copied().filter(|&(_, n)| n > 0));
                    next.push(merged);
                }
            }
            combined = next;
        }
        let mut out: Vec<StepChoice> = combined.into_iter().map(|counts| StepChoice { counts }).collect();
        out.sort();
        out
    }

    fn extend_local(
        &self,
        rules: &[usize],
        k: usize,
        residual: &Multiset,
        counts: &mut Vec<(usize, u64)>,
        out: &mut Vec<Vec<(usize, u64)>>,
    ) {
        if k == rules.len() {
            if !rules.iter().any(|&r| self.rules[r].lhs.leq(residual)) {
                out.push(counts.clone());
            }
            return;
        }
        let lhs = &self.rules[rules[k]].lhs;
        let cap = lhs.multiplicity_in(residual).unwrap_or(0);
        for n in (0..=cap).rev() {
            let mut rest = residual.clone();
            rest.deplete(&lhs.scale(n).expect("bounded by residual"))
                .expect("bounded by residual");
            counts.push((rules[k], n));
            self.extend_local(rules, k + 1, &rest, counts, out);
            counts.pop();
        }
    }

    /// One tick: consume left-hand sides, deposit each fired rule's messages
    /// at its destination with remaining delay `e(r)`, deliver everything
    /// whose delay reached 0, shift the rest down by one and advance the
    /// clock.
    pub fn apply_step(&self, c: &PConfiguration, choice: &StepChoice) -> Result<PConfiguration, StepError> {
        if let Some(&rule) = choice.counts.keys().find(|&&r| r >= self.rules.len()) {
            return Err(StepError::UnknownRule(rule));
        }
        let Some(contents) = self.residual(c, choice) else {
            return Err(StepError::NotApplicable);
        };
        if !self.is_maximal(c, choice) {
            return Err(StepError::NotMaximal);
        }
        let mut next = PConfiguration {
            contents,
            pending: c.pending.clone(),
            environment: c.environment.clone(),
            clock: c.clock + 1,
        };
        for (&rule, &n) in &choice.counts {
            let delay = self.rules[rule].delay;
            for (dest, objects) in &self.compiled[rule].deliveries {
                let produced = objects.scale(n)?;
                match dest {
                    Some(i) => next.pending[*i].entry(delay).or_default().absorb(&produced)?,
                    None => next.environment.absorb(&produced)?,
                }
            }
        }
        for (contents, pending) in next.contents.iter_mut().zip(next.pending.iter_mut()) {
            if let Some(ready) = pending.remove(&0) {
                contents.absorb(&ready)?;
            }
            *pending = std::mem::take(pending).into_iter().map(|(j, m)| (j - 1, m)).collect();
        }
        Ok(next)
    }

    /// Only the empty step is maximal and nothing is in transit.
    pub fn is_halted(&self, c: &PConfiguration) -> bool {
        !c.has_pending() && self.is_maximal(c, &StepChoice::empty())
    }
}

impl MaxStepSemantics for TimedPSystem {
    type State = PConfiguration;
    type Choice = StepChoice;
    type Error = StepError;

    fn initial_state(&self) -> PConfiguration {
        self.initial_configuration()
    }

    fn maximal_choices(&self, state: &PConfiguration) -> Result<Vec<StepChoice>, StepError> {
        Ok(self.enumerate_maximal(state))
    }

    fn step(&self, state: &PConfiguration, choice: &StepChoice) -> Result<PConfiguration, StepError> {
        self.apply_step(state, choice)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explore::{self, Policy, RunOutcome};
    use crate::multiset::Alphabet;
    use crate::psystem::{MembraneStructure, Rule, Target};
    use crate::samples;

    fn ms(sys: &TimedPSystem, pairs: &[(&str, u64)]) -> Multiset {
        Multiset::from_pairs(pairs.iter().map(|&(s, n)| (sys.symbol(s).unwrap(), n))).unwrap()
    }

    fn config(sys: &TimedPSystem, contents: &[&[(&str, u64)]], clock: u64) -> PConfiguration {
        PConfiguration {
            contents: contents.iter().map(|c| ms(sys, c)).collect(),
            pending: vec![BTreeMap::new(); contents.len()],
            environment: Multiset::new(),
            clock,
        }
    }

    fn choice(pairs: &[(usize, u64)]) -> StepChoice {
        StepChoice::from_counts(pairs.iter().copied())
    }

    #[test]
    fn lhs_of_examples() {
        let sys = samples::two_membrane_system();
        let r = choice(&[(0, 1), (1, 2)]);
        assert_eq!(sys.lhs_of(&r, 1).unwrap(), ms(&sys, &[("b", 1)]));
        assert_eq!(sys.lhs_of(&r, 2).unwrap(), ms(&sys, &[("a", 2)]));
        assert!(sys.lhs_of(&StepChoice::empty(), 1).unwrap().is_empty());
    }

    #[test]
    fn applicability_and_maximality_examples() {
        let sys = samples::two_membrane_system();
        let c0 = sys.initial_configuration();
        assert!(sys.is_applicable(&c0, &choice(&[(0, 1), (1, 2)])));
        assert!(!sys.is_applicable(&c0, &choice(&[(1, 3)])));
        assert!(sys.is_applicable(&c0, &StepChoice::empty()));

        assert!(sys.is_maximal(&c0, &choice(&[(0, 1), (1, 2)])));
        assert!(!sys.is_maximal(&c0, &choice(&[(0, 1), (1, 1)])));
        let c1 = config(&sys, &[&[("a", 1)], &[("b", 2)]], 1);
        assert!(sys.is_maximal(&c1, &StepChoice::empty()));
    }

    #[test]
    fn enumerate_examples() {
        let sys = samples::two_membrane_system();
        assert_eq!(
            sys.enumerate_maximal(&sys.initial_configuration()),
            vec![choice(&[(0, 1), (1, 2)])]
        );
        let branching = samples::branching_system();
        assert_eq!(
            branching.enumerate_maximal(&branching.initial_configuration()),
            vec![choice(&[(0, 1), (1, 1)]), choice(&[(0, 3)])]
        );
        let halted = config(&sys, &[&[("a", 1)], &[("b", 2)]], 1);
        assert_eq!(sys.enumerate_maximal(&halted), vec![StepChoice::empty()]);
    }

    #[test]
    fn apply_step_reproduces_two_membrane_trace() {
        let sys = samples::two_membrane_system();
        let c0 = sys.initial_configuration();
        let c1 = sys.apply_step(&c0, &choice(&[(0, 1), (1, 2)])).unwrap();
        assert_eq!(c1.contents, config(&sys, &[&[("a", 1)], &[("b", 2)]], 1).contents);
        assert_eq!(c1.clock, 1);
        let c2 = sys.apply_step(&c1, &StepChoice::empty()).unwrap();
        assert_eq!(c2.contents, c1.contents);
        assert_eq!(c2.clock, 2);
        let c3 = sys.apply_step(&c2, &StepChoice::empty()).unwrap();
        assert_eq!(c3.contents, config(&sys, &[&[("a", 3)], &[("b", 2)]], 3).contents);
        assert!(!c3.has_pending());
        assert!(sys.is_halted(&c3));
        let c4 = sys.apply_step(&c3, &StepChoice::empty()).unwrap();
        assert_eq!(c4.contents, c3.contents);
        assert_eq!(c4.clock, 4);
    }

    #[test]
    fn apply_step_rejects_bad_choices() {
        let sys = samples::two_membrane_system();
        let c0 = sys.initial_configuration();
        assert_eq!(sys.apply_step(&c0, &choice(&[(1, 3)])), Err(StepError::NotApplicable));
        assert_eq!(sys.apply_step(&c0, &choice(&[(0, 1), (1, 1)])), Err(StepError::NotMaximal));
        assert_eq!(sys.apply_step(&c0, &StepChoice::empty()), Err(StepError::NotMaximal));
        assert_eq!(sys.apply_step(&c0, &choice(&[(7, 1)])), Err(StepError::UnknownRule(7)));
    }

    #[test]
    fn out_of_skin_goes_to_environment() {
        let mut alpha = Alphabet::new();
        let a = alpha.intern("a");
        let mu = MembraneStructure::chain(1).unwrap();
        let r = Rule::new("r", 1, Multiset::singleton(a, 1), 1)
            .with_message(Multiset::singleton(a, 2), Target::Out);
        let sys = TimedPSystem::new(alpha, mu, vec![Multiset::singleton(a, 2)], vec![r]).unwrap();
        let c1 = sys.apply_step(&sys.initial_configuration(), &choice(&[(0, 2)])).unwrap();
        assert!(c1.contents[0].is_empty());
        assert_eq!(c1.environment, Multiset::singleton(a, 4));
        assert!(!c1.has_pending());
    }

    #[test]
    fn delayed_objects_arrive_after_delay_plus_one_ticks() {
        let mut alpha = Alphabet::new();
        let a = alpha.intern("a");
        let b = alpha.intern("b");
        let mu = MembraneStructure::chain(1).unwrap();
        let r = Rule::new("r", 1, Multiset::singleton(a, 1), 1)
            .with_message(Multiset::singleton(b, 1), Target::Here);
        let sys = TimedPSystem::new(alpha, mu, vec![Multiset::singleton(a, 1)], vec![r]).unwrap();
        let c1 = sys.apply_step(&sys.initial_configuration(), &choice(&[(0, 1)])).unwrap();
        assert!(c1.contents[0].is_empty());
        assert_eq!(c1.pending[0].get(&0), Some(&Multiset::singleton(b, 1)));
        let c2 = sys.apply_step(&c1, &StepChoice::empty()).unwrap();
        assert_eq!(c2.contents[0], Multiset::singleton(b, 1));
        assert!(!c2.has_pending());
    }

    #[test]
    fn run_policies() {
        let sys = samples::two_membrane_system();
        let RunOutcome::Trace(t) = explore::run(&sys, 3, Policy::FirstCanonical, 100).unwrap() else {
            panic!("expected a trace");
        };
        assert_eq!(t.states.len(), 4);
        assert_eq!(t.choices[0], choice(&[(0, 1), (1, 2)]));
        let RunOutcome::Graph(g) = explore::run(&sys, 0, Policy::Exhaustive, 100).unwrap() else {
            panic!("expected a graph");
        };
        assert_eq!(g.nodes.len(), 1);
        let branching = samples::branching_system();
        let g = explore::explore(&branching, 1, 100).unwrap();
        assert_eq!(g.at_depth(1).count(), 2);
        let seeded_a = explore::trace(&branching, 1, Some(7)).unwrap();
        let seeded_b = explore::trace(&branching, 1, Some(7)).unwrap();
        assert_eq!(seeded_a, seeded_b);
    }

    #[test]
    fn exploration_respects_budget() {
        let sys = samples::branching_system();
        assert!(matches!(
            explore::explore(&sys, 1, 2),
            Err(explore::ExploreError::BudgetExceeded { budget: 2 })
        ));
    }
}
