//! Bounded checks of the three simulation claims.
//!
//! * prop 1: a timed membrane system and its detimed version reach the same
//!   sets of contents (restricted to the original objects) at every depth;
//! * prop 2: the same for a timed net and its detimed net, on the original
//!   places;
//! * prop 3: a membrane system and its net, explored in lockstep, have the
//!   same maximal steps under `R -> U_R` and land on corresponding states
//!   (contents and marking, pending and pending, clock and gc).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::explore::{self, ExploreError, MaxStepSemantics, TraceGraph};
use crate::multiset::Multiset;
use crate::petri::{FireError, FiringChoice, PNState, TimedPetriNet};
use crate::psystem::{PConfiguration, StepChoice, StepError, TimedPSystem};
use crate::translate::{self, TranslateError};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("state budget of {budget} nodes exceeded; result inconclusive")]
    StateBudgetExceeded { budget: usize },
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Fire(#[from] FireError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
}

impl<E: std::error::Error + Into<VerifyError>> From<ExploreError<E>> for VerifyError {
    fn from(e: ExploreError<E>) -> Self {
        match e {
            ExploreError::Step(e) => e.into(),
            ExploreError::BudgetExceeded { budget } => VerifyError::StateBudgetExceeded { budget },
        }
    }
}

/// Replayable evidence of a failed check. `replay` lists, by rule or
/// transition name, the steps from the initial state of `model` to the
/// offending state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub depth: usize,
    pub model: String,
    pub replay: Vec<BTreeMap<String, u64>>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub property: u8,
    pub ok: bool,
    pub depth: usize,
    pub states_explored: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl Verdict {
    fn pass(property: u8, depth: usize, states_explored: usize) -> Self {
        Verdict {
            property,
            ok: true,
            depth,
            states_explored,
            counterexample: None,
        }
    }

    fn fail(property: u8, depth: usize, states_explored: usize, cex: Counterexample) -> Self {
        Verdict {
            property,
            ok: false,
            depth,
            states_explored,
            counterexample: Some(cex),
        }
    }
}

fn named<C>(path: &[C], counts: impl Fn(&C) -> Vec<(usize, u64)>, name: impl Fn(usize) -> String) -> Vec<BTreeMap<String, u64>> {
    path.iter()
        .map(|c| counts(c).into_iter().map(|(id, n)| (name(id), n)).collect())
        .collect()
}

fn psystem_replay(sys: &TimedPSystem, path: &[StepChoice]) -> Vec<BTreeMap<String, u64>> {
    named(
        path,
        |c| c.counts.iter().map(|(&k, &v)| (k, v)).collect(),
        |r| sys.rules()[r].name.clone(),
    )
}

fn petri_replay(net: &TimedPetriNet, path: &[FiringChoice]) -> Vec<BTreeMap<String, u64>> {
    named(
        path,
        |c| c.counts.iter().map(|(&k, &v)| (k, v)).collect(),
        |t| net.transitions()[t].name.clone(),
    )
}

/// Compares depth-indexed projection sets of two graphs. On a mismatch
/// returns the depth, the canonically smallest differing projection and
/// which side (`true` = left) holds it.
fn compare_levels<S, C, P: Ord + Clone>(
    depth: usize,
    left: &TraceGraph<S, C>,
    left_proj: impl Fn(&S) -> P,
    right: &TraceGraph<S, C>,
    right_proj: impl Fn(&S) -> P,
) -> Option<(usize, P, bool)>
where
    S: Clone + Ord,
{
    for k in 0..=depth {
        let l: BTreeSet<P> = left.at_depth(k).map(&left_proj).collect();
        let r: BTreeSet<P> = right.at_depth(k).map(&right_proj).collect();
        if l != r {
            let only_left = l.difference(&r).next().cloned();
            let only_right = r.difference(&l).next().cloned();
            return match (only_left, only_right) {
                (Some(p), Some(q)) if q < p => Some((k, q, false)),
                (Some(p), _) => Some((k, p, true)),
                (None, Some(q)) => Some((k, q, false)),
                (None, None) => unreachable!("sets differ"),
            };
        }
    }
    None
}

fn node_with<S, C, P: PartialEq>(g: &TraceGraph<S, C>, depth: usize, proj: impl Fn(&S) -> P, target: &P) -> usize
where
    S: Clone + Ord,
{
    (0..g.nodes.len())
        .find(|&i| g.depth[i] == depth && proj(&g.nodes[i]) == *target)
        .expect("projection came from this graph")
}

/// Timed system vs its detimed version, contents projected onto the
/// original alphabet, for every depth up to `depth`.
pub fn check_prop1(sys: &TimedPSystem, depth: usize, budget: usize) -> Result<Verdict, VerifyError> {
    let detimed = translate::detime_psystem(sys)?;
    let timed = explore::explore(sys, depth, budget)?;
    let rest = budget.saturating_sub(timed.nodes.len());
    let untimed = explore::explore(&detimed.system, depth, rest).map_err(|e| match e {
        ExploreError::BudgetExceeded { .. } => VerifyError::StateBudgetExceeded { budget },
        other => other.into(),
    })?;
    let explored = timed.nodes.len() + untimed.nodes.len();
    let timed_proj = |c: &PConfiguration| c.contents.clone();
    let untimed_proj = |c: &PConfiguration| detimed.project(&c.contents);
    let Some((k, witness, on_timed)) = compare_levels(depth, &timed, timed_proj, &untimed, untimed_proj) else {
        return Ok(Verdict::pass(1, depth, explored));
    };
    let render = |contents: &[Multiset]| {
        let parts: Vec<String> = contents.iter().map(|m| m.display(sys.alphabet()).to_string()).collect();
        format!("({})", parts.join(", "))
    };
    let (model, replay) = if on_timed {
        let node = node_with(&timed, k, timed_proj, &witness);
        ("timed".to_string(), psystem_replay(sys, &timed.path_to(node)))
    } else {
        let node = node_with(&untimed, k, untimed_proj, &witness);
        ("detimed".to_string(), psystem_replay(&detimed.system, &untimed.path_to(node)))
    };
    let reason = format!(
        "contents {} reachable at depth {k} only in the {model} system",
        render(&witness)
    );
    Ok(Verdict::fail(
        1,
        depth,
        explored,
        Counterexample {
            depth: k,
            model,
            replay,
            reason,
        },
    ))
}

/// Timed net vs its detimed net, markings projected onto the original
/// places.
pub fn check_prop2(net: &TimedPetriNet, depth: usize, budget: usize) -> Result<Verdict, VerifyError> {
    let detimed = translate::detime_petri(net)?;
    let timed = explore::explore(net, depth, budget)?;
    let rest = budget.saturating_sub(timed.nodes.len());
    let untimed = explore::explore(&detimed.net, depth, rest).map_err(|e| match e {
        ExploreError::BudgetExceeded { .. } => VerifyError::StateBudgetExceeded { budget },
        other => other.into(),
    })?;
    let explored = timed.nodes.len() + untimed.nodes.len();
    let timed_proj = |s: &PNState| s.marking.clone();
    let untimed_proj = |s: &PNState| detimed.project(&s.marking);
    let Some((k, witness, on_timed)) = compare_levels(depth, &timed, timed_proj, &untimed, untimed_proj) else {
        return Ok(Verdict::pass(2, depth, explored));
    };
    let (model, replay) = if on_timed {
        let node = node_with(&timed, k, timed_proj, &witness);
        ("timed".to_string(), petri_replay(net, &timed.path_to(node)))
    } else {
        let node = node_with(&untimed, k, untimed_proj, &witness);
        ("detimed".to_string(), petri_replay(&detimed.net, &untimed.path_to(node)))
    };
    let reason = format!("marking {witness:?} reachable at depth {k} only in the {model} net");
    Ok(Verdict::fail(
        2,
        depth,
        explored,
        Counterexample {
            depth: k,
            model,
            replay,
            reason,
        },
    ))
}

/// Lockstep exploration of a membrane system and its net.
pub fn check_prop3(sys: &TimedPSystem, depth: usize, budget: usize) -> Result<Verdict, VerifyError> {
    let tr = translate::psystem_to_petri(sys)?;
    let net = &tr.net;
    let start = sys.initial_configuration();
    let mut seen: BTreeMap<PConfiguration, Vec<StepChoice>> = BTreeMap::new();
    seen.insert(start.clone(), Vec::new());
    let mut queue = VecDeque::from([(start, net.initial_state(), 0usize)]);
    let fail = |k: usize, path: &[StepChoice], reason: String, explored: usize| {
        Verdict::fail(
            3,
            depth,
            explored,
            Counterexample {
                depth: k,
                model: "psystem".to_string(),
                replay: psystem_replay(sys, path),
                reason,
            },
        )
    };
    if tr.state_of(&queue[0].0) != queue[0].1 {
        return Ok(fail(0, &[], "initial marking differs from M_C0".into(), 1));
    }
    while let Some((c, m, k)) = queue.pop_front() {
        if k >= depth {
            continue;
        }
        let path = seen[&c].clone();
        let rs = sys.maximal_choices(&c)?;
        let us = net.maximal_choices(&m)?;
        let mapped: BTreeSet<FiringChoice> = rs.iter().map(|r| tr.firing_of(r)).collect();
        if mapped.len() != rs.len() || mapped != us.iter().cloned().collect() {
            let reason = format!(
                "maximal steps differ: membrane side {:?}, net side {:?}",
                rs.iter().map(|r| r.display(sys).to_string()).collect::<Vec<_>>(),
                us.iter().map(|u| u.display(net).to_string()).collect::<Vec<_>>()
            );
            return Ok(fail(k, &path, reason, seen.len()));
        }
        for r in &rs {
            let c2 = sys.apply_step(&c, r)?;
            let m2 = net.fire(&m, &tr.firing_of(r))?;
            if tr.state_of(&c2) != m2 {
                let mut p = path.clone();
                p.push(r.clone());
                let reason = format!("step {} leads to non-corresponding states", r.display(sys));
                return Ok(fail(k + 1, &p, reason, seen.len()));
            }
            if !seen.contains_key(&c2) {
                if seen.len() >= budget {
                    return Err(VerifyError::StateBudgetExceeded { budget });
                }
                let mut p = path.clone();
                p.push(r.clone());
                seen.insert(c2.clone(), p);
                queue.push_back((c2, m2, k + 1));
            }
        }
    }
    Ok(Verdict::pass(3, depth, seen.len()))
}

/// Replays a counterexample path of rule names against `sys` and returns the
/// configuration it reaches.
pub fn replay_psystem(sys: &TimedPSystem, replay: &[BTreeMap<String, u64>]) -> Result<PConfiguration, StepError> {
    let mut c = sys.initial_configuration();
    for step in replay {
        let choice = StepChoice::from_counts(step.iter().map(|(name, &n)| {
            (sys.rule_id(name).unwrap_or(usize::MAX), n)
        }));
        c = sys.apply_step(&c, &choice)?;
    }
    Ok(c)
}

pub fn replay_petri(net: &TimedPetriNet, replay: &[BTreeMap<String, u64>]) -> Result<PNState, FireError> {
    let mut s = net.initial_state();
    for step in replay {
        let choice = FiringChoice::from_counts(step.iter().map(|(name, &n)| {
            (net.transition_id(name).unwrap_or(usize::MAX), n)
        }));
        s = net.fire(&s, &choice)?;
    }
    Ok(s)
}
