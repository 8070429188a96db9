//! Brute-force reference implementations.
//!
//! Nothing here calls into the step or enumeration code it is used to
//! check: maximal steps are found by trying every count vector below the
//! per-rule capacity, and the untimed steps add products straight to their
//! destination.

use thiserror::Error;

use crate::multiset::Multiset;
use crate::petri::{FiringChoice, PNState, TimedPetriNet};
use crate::psystem::{PConfiguration, StepChoice, Target, TimedPSystem};

/// Largest number of count vectors an oracle will try.
pub const ORACLE_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance needs {vectors} count vectors, oracle cap is {cap}")]
    CapacityExceeded { vectors: u64, cap: u64 },
}

/// Calls `visit` on every vector `v` with `0 <= v[i] <= bounds[i]`.
fn for_each_vector(bounds: &[u64], mut visit: impl FnMut(&[u64])) -> Result<(), OracleError> {
    let total = bounds
        .iter()
        .try_fold(1u64, |acc, &b| acc.checked_mul(b + 1))
        .unwrap_or(u64::MAX);
    if total > ORACLE_CAP {
        return Err(OracleError::CapacityExceeded {
            vectors: total,
            cap: ORACLE_CAP,
        });
    }
    let mut v = vec![0u64; bounds.len()];
    loop {
        visit(&v);
        let mut i = 0;
        loop {
            if i == v.len() {
                return Ok(());
            }
            if v[i] < bounds[i] {
                v[i] += 1;
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

fn membrane_index(sys: &TimedPSystem, rule: usize) -> usize {
    sys.structure()
        .index_of(sys.rules()[rule].home)
        .expect("validated home")
}

/// All applicable, non-extendable rule multisets, sorted.
pub fn oracle_maximal_psystem(sys: &TimedPSystem, c: &PConfiguration) -> Result<Vec<StepChoice>, OracleError> {
    let rules = sys.rules();
    let homes: Vec<usize> = (0..rules.len()).map(|r| membrane_index(sys, r)).collect();
    let bounds: Vec<u64> = rules
        .iter()
        .zip(&homes)
        .map(|(r, &h)| {
            r.lhs
                .iter()
                .map(|(a, n)| c.contents[h].count(a) / n)
                .min()
                .unwrap_or(0)
        })
        .collect();
    let mut found = Vec::new();
    for_each_vector(&bounds, |v| {
        let mut demand = vec![Multiset::new(); c.contents.len()];
        for (r, &n) in v.iter().enumerate() {
            for (a, k) in rules[r].lhs.iter() {
                demand[homes[r]].insert(a, k * n).expect("small counts");
            }
        }
        let applicable = demand.iter().zip(&c.contents).all(|(d, w)| d.leq(w));
        if !applicable {
            return;
        }
        let extendable = rules.iter().zip(&homes).any(|(r, &h)| {
            r.lhs
                .iter()
                .all(|(a, k)| demand[h].count(a) + k <= c.contents[h].count(a))
        });
        if !extendable {
            found.push(StepChoice::from_counts(v.iter().copied().enumerate()));
        }
    })?;
    found.sort();
    Ok(found)
}

/// All enabled, non-extendable transition multisets, sorted.
pub fn oracle_maximal_petri(net: &TimedPetriNet, s: &PNState) -> Result<Vec<FiringChoice>, OracleError> {
    let ts = net.transitions();
    let bounds: Vec<u64> = ts
        .iter()
        .map(|t| t.inputs.iter().map(|&(p, w)| s.marking[p] / w).min().unwrap_or(0))
        .collect();
    let mut found = Vec::new();
    for_each_vector(&bounds, |v| {
        let mut pre = vec![0u64; s.marking.len()];
        for (t, &n) in v.iter().enumerate() {
            for &(p, w) in &ts[t].inputs {
                pre[p] += w * n;
            }
        }
        if pre.iter().zip(&s.marking).any(|(d, m)| d > m) {
            return;
        }
        let extendable = ts
            .iter()
            .any(|t| t.inputs.iter().all(|&(p, w)| pre[p] + w <= s.marking[p]));
        if !extendable {
            found.push(FiringChoice::from_counts(v.iter().copied().enumerate()));
        }
    })?;
    found.sort();
    Ok(found)
}

/// Classic untimed maximal-parallel rewriting: consume left-hand sides and
/// add every message directly to its destination. Delays are ignored.
pub fn untimed_step_psystem(sys: &TimedPSystem, c: &PConfiguration, choice: &StepChoice) -> PConfiguration {
    let mu = sys.structure();
    let mut next = c.clone();
    next.clock += 1;
    for (&r, &n) in &choice.counts {
        let rule = &sys.rules()[r];
        let home = membrane_index(sys, r);
        for (a, k) in rule.lhs.iter() {
            next.contents[home].remove(a, k * n).expect("applicable choice");
        }
    }
    for (&r, &n) in &choice.counts {
        let rule = &sys.rules()[r];
        let home = membrane_index(sys, r);
        for (&target, objects) in &rule.rhs {
            let dest = match target {
                Target::Here => Some(home),
                Target::Out => mu.parent(home),
                Target::In(l) => mu.index_of(l),
            };
            for (a, k) in objects.iter() {
                match dest {
                    Some(i) => next.contents[i].insert(a, k * n).expect("small counts"),
                    None => next.environment.insert(a, k * n).expect("small counts"),
                }
            }
        }
    }
    next
}

/// Classic untimed max-step firing: `M - pre(U) + post(U)`.
pub fn untimed_fire(net: &TimedPetriNet, s: &PNState, choice: &FiringChoice) -> PNState {
    let mut next = s.clone();
    next.gc += 1;
    for (&t, &n) in &choice.counts {
        for &(p, w) in &net.transitions()[t].inputs {
            next.marking[p] -= w * n;
        }
    }
    for (&t, &n) in &choice.counts {
        for &(p, w) in &net.transitions()[t].outputs {
            next.marking[p] += w * n;
        }
    }
    next
}
