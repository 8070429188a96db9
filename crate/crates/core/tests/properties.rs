//! Property tests over seeded random models: step conservation laws, clock
//! behaviour, agreement with the brute-force oracles, translation sizes and
//! the three simulation checks.

#![allow(clippy::needless_range_loop)] // Loops index several parallel vectors.

use std::collections::BTreeMap;

use proptest::prelude::*;

use membrane_nets::explore::{self, DEFAULT_BUDGET};
use membrane_nets::multiset::Multiset;
use membrane_nets::petri::{PNState, TimedPetriNet};
use membrane_nets::psystem::{resolve_target, Destination, PConfiguration, TimedPSystem};
use membrane_nets::translate;
use membrane_nets::verify::{self, oracle, random, NetParams, SystemParams, VerifyError};

fn system(seed: u64) -> TimedPSystem {
    verify::random_system(&mut random::rng(seed), &SystemParams::default())
}

fn net(seed: u64) -> TimedPetriNet {
    verify::random_net(&mut random::rng(seed), &NetParams::default())
}

/// Configurations reachable in a few seeded steps, so pending buffers are
/// exercised too.
fn reachable_psystem(sys: &TimedPSystem, seed: u64, steps: usize) -> Vec<PConfiguration> {
    explore::trace(sys, steps, Some(seed)).unwrap().states
}

fn reachable_net(n: &TimedPetriNet, seed: u64, steps: usize) -> Vec<PNState> {
    explore::trace(n, steps, Some(seed)).unwrap().states
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn psystem_step_conserves_objects(seed in any::<u64>(), run in any::<u64>()) {
        let sys = system(seed);
        let mu = sys.structure();
        for c in reachable_psystem(&sys, run, 4) {
            for choice in sys.enumerate_maximal(&c) {
                prop_assert!(sys.is_applicable(&c, &choice) && sys.is_maximal(&c, &choice));
                let next = sys.apply_step(&c, &choice).unwrap();
                prop_assert_eq!(next.clock, c.clock + 1);
                // Deliveries per (membrane, delay) computed from the rules.
                let mut fresh: Vec<BTreeMap<u32, Multiset>> = vec![BTreeMap::new(); mu.len()];
                let mut env = c.environment.clone();
                let mut deposited = 0u64;
                for (&r, &n) in &choice.counts {
                    let rule = &sys.rules()[r];
                    for (&t, objects) in &rule.rhs {
                        let objects = objects.scale(n).unwrap();
                        deposited += objects.size();
                        match resolve_target(mu, rule.home, t).unwrap() {
                            Destination::Membrane(l) => {
                                let i = mu.index_of(l).unwrap();
                                fresh[i].entry(rule.delay).or_default().absorb(&objects).unwrap();
                            }
                            Destination::Environment => env.absorb(&objects).unwrap(),
                        }
                    }
                }
                prop_assert_eq!(&next.environment, &env);
                let mut pending_in = 0;
                for i in 0..mu.len() {
                    let label = mu.label(i);
                    let mut expect = c.contents[i].sub(&sys.lhs_of(&choice, label).unwrap()).unwrap();
                    for src in [c.pending[i].get(&0), fresh[i].get(&0)].into_iter().flatten() {
                        expect.absorb(src).unwrap();
                    }
                    prop_assert_eq!(&next.contents[i], &expect);
                    let keys: std::collections::BTreeSet<u32> = c.pending[i].keys().chain(fresh[i].keys()).copied().collect();
                    for j in keys.into_iter().filter(|&j| j > 0) {
                        let mut want = Multiset::new();
                        for src in [c.pending[i].get(&j), fresh[i].get(&j)].into_iter().flatten() {
                            want.absorb(src).unwrap();
                        }
                        prop_assert_eq!(next.pending[i].get(&(j - 1)).cloned().unwrap_or_default(), want);
                    }
                    pending_in += fresh[i].iter().filter(|(&d, _)| d > 0).map(|(_, m)| m.size()).sum::<u64>();
                }
                let total_fresh: u64 = fresh.iter().flat_map(|f| f.values()).map(Multiset::size).sum::<u64>()
                    + (env.size() - c.environment.size());
                prop_assert_eq!(total_fresh, deposited);
                prop_assert!(pending_in <= deposited);
            }
        }
    }

    #[test]
    fn psystem_halting_only_ticks(seed in any::<u64>()) {
        let sys = system(seed);
        let mut c = sys.initial_configuration();
        for _ in 0..12 {
            let choices = sys.enumerate_maximal(&c);
            if choices == vec![Default::default()] && !c.has_pending() {
                let next = sys.apply_step(&c, &choices[0]).unwrap();
                prop_assert_eq!(&next.contents, &c.contents);
                prop_assert_eq!(next.clock, c.clock + 1);
                break;
            }
            c = sys.apply_step(&c, &choices[0]).unwrap();
        }
    }

    #[test]
    fn zero_delay_psystem_matches_untimed_rewriting(seed in any::<u64>(), run in any::<u64>()) {
        let sys = system(seed).with_zero_delays();
        for c in reachable_psystem(&sys, run, 4) {
            prop_assert!(!c.has_pending());
            for choice in sys.enumerate_maximal(&c) {
                let next = sys.apply_step(&c, &choice).unwrap();
                prop_assert!(!next.has_pending());
                prop_assert_eq!(next, oracle::untimed_step_psystem(&sys, &c, &choice));
            }
        }
    }

    #[test]
    fn net_fire_conserves_tokens(seed in any::<u64>(), run in any::<u64>()) {
        let n = net(seed);
        for s in reachable_net(&n, run, 4) {
            for u in n.enumerate_max_enabled(&s) {
                prop_assert!(n.is_enabled(&s, &u) && n.is_max_enabled(&s, &u));
                let next = n.fire(&s, &u).unwrap();
                prop_assert_eq!(next.gc, s.gc + 1);
                let mut fresh = vec![BTreeMap::<u32, u64>::new(); s.marking.len()];
                let mut deposited = 0;
                for (&t, &k) in &u.counts {
                    let tr = &n.transitions()[t];
                    for &(p, w) in &tr.outputs {
                        *fresh[p].entry(tr.delay).or_default() += w * k;
                        deposited += w * k;
                    }
                }
                for p in 0..s.marking.len() {
                    let delivered = s.pending[p].get(&0).copied().unwrap_or(0) + fresh[p].get(&0).copied().unwrap_or(0);
                    prop_assert_eq!(next.marking[p], s.marking[p] - n.pre_of(&u, p) + delivered);
                    for j in 1..=n.max_delay() {
                        let want = s.pending[p].get(&j).copied().unwrap_or(0) + fresh[p].get(&j).copied().unwrap_or(0);
                        prop_assert_eq!(next.pending[p].get(&(j - 1)).copied().unwrap_or(0), want);
                    }
                }
                prop_assert_eq!(fresh.iter().flat_map(|f| f.values()).sum::<u64>(), deposited);
            }
        }
    }

    #[test]
    fn dead_net_only_ticks(seed in any::<u64>()) {
        let n = net(seed);
        let mut s = n.initial_state();
        for _ in 0..12 {
            let us = n.enumerate_max_enabled(&s);
            if n.is_dead(&s) && !s.has_pending() {
                let next = n.fire(&s, &us[0]).unwrap();
                prop_assert_eq!(&next.marking, &s.marking);
                break;
            }
            s = n.fire(&s, &us[0]).unwrap();
        }
    }

    #[test]
    fn zero_delay_net_matches_untimed_firing(seed in any::<u64>(), run in any::<u64>()) {
        let n = net(seed).with_zero_delays();
        for s in reachable_net(&n, run, 4) {
            for u in n.enumerate_max_enabled(&s) {
                let next = n.fire(&s, &u).unwrap();
                prop_assert!(!next.has_pending());
                prop_assert_eq!(next, oracle::untimed_fire(&n, &s, &u));
            }
        }
    }

    #[test]
    fn enumeration_matches_oracle_on_larger_nets(seed in any::<u64>()) {
        // Up to 5 transitions and 12 tokens.
        let p = NetParams { max_places: 4, max_transitions: 5, max_inputs: 2, max_outputs: 2, max_delay: 2, max_initial_tokens: 12 };
        let n = verify::random_net(&mut random::rng(seed), &p);
        let s = n.initial_state();
        prop_assert_eq!(n.enumerate_max_enabled(&s), oracle::oracle_maximal_petri(&n, &s).unwrap());
    }

    #[test]
    fn enumeration_matches_oracle_on_reachable_configurations(seed in any::<u64>(), run in any::<u64>()) {
        let sys = system(seed);
        for c in reachable_psystem(&sys, run, 3) {
            prop_assert_eq!(sys.enumerate_maximal(&c), oracle::oracle_maximal_psystem(&sys, &c).unwrap());
        }
    }

    #[test]
    fn detimed_system_sizes(seed in any::<u64>()) {
        let sys = system(seed);
        let d = translate::detime_psystem(&sys).unwrap();
        let v = sys.alphabet().len();
        let m = sys.max_delay() as usize;
        prop_assert_eq!(d.system.alphabet().len(), v * (1 + m));
        prop_assert!(d.system.rules().iter().all(|r| r.delay == 0));
        prop_assert_eq!(d.system.structure(), sys.structure());
        prop_assert_eq!(d.system.initial_contents(), sys.initial_contents());
        prop_assert_eq!(d.rule_origin.iter().filter(|o| o.is_some()).count(), sys.rules().len());
        // Zero-delay rules are copied verbatim.
        for (r, o) in d.system.rules().iter().zip(&d.rule_origin) {
            if let Some(o) = o {
                if sys.rules()[*o].delay == 0 {
                    prop_assert_eq!(r, &sys.rules()[*o]);
                }
            }
        }
    }

    #[test]
    fn detimed_net_sizes(seed in any::<u64>()) {
        let n = net(seed);
        let d = translate::detime_petri(&n).unwrap();
        let chain_places: usize = n.transitions().iter().map(|t| t.outputs.len() * t.delay as usize).sum();
        let chain_transitions: usize = n
            .transitions()
            .iter()
            .filter(|t| !t.outputs.is_empty())
            .map(|t| t.delay as usize)
            .sum();
        prop_assert_eq!(d.net.places().len(), n.places().len() + chain_places);
        prop_assert_eq!(d.net.transitions().len(), n.transitions().len() + chain_transitions);
        prop_assert!(d.net.transitions().iter().all(|t| t.delay == 0));
        for (t, origin) in d.net.transitions().iter().zip(&d.transitions) {
            prop_assert_eq!(t.locality, n.transitions()[origin.source].locality);
        }
        let m0 = d.net.initial_marking();
        prop_assert_eq!(&m0[..n.places().len()], n.initial_marking());
        prop_assert!(m0[n.places().len()..].iter().all(|&k| k == 0));
    }

    #[test]
    fn net_of_system_shape(seed in any::<u64>()) {
        let sys = system(seed);
        let t = translate::psystem_to_petri(&sys).unwrap();
        prop_assert_eq!(t.net.places().len(), sys.alphabet().len() * sys.structure().len());
        prop_assert_eq!(t.net.transitions().len(), sys.rules().len());
        for (r, tr) in sys.rules().iter().zip(t.net.transitions()) {
            prop_assert_eq!(tr.locality, r.home);
            prop_assert_eq!(tr.delay, r.delay);
        }
        prop_assert_eq!(t.state_of(&sys.initial_configuration()), t.net.initial_state());
    }

    #[test]
    fn simulation_properties_hold(seed in any::<u64>()) {
        // Some random models grow doubly exponentially; running out of
        // budget is an inconclusive answer, not a failure.
        let sys = system(seed);
        for verdict in [
            verify::check_prop1(&sys, 4, 20_000),
            verify::check_prop3(&sys, 4, 20_000),
            verify::check_prop2(&net(seed), 4, 20_000),
        ] {
            match verdict {
                Ok(v) => prop_assert!(v.ok, "{:?}", v),
                Err(VerifyError::StateBudgetExceeded { .. }) => {}
                Err(e) => prop_assert!(false, "{}", e),
            }
        }
    }

    #[test]
    fn exploration_depth_tracks_clock(seed in any::<u64>()) {
        let sys = system(seed);
        let Ok(g) = explore::explore(&sys, 4, DEFAULT_BUDGET) else {
            return Ok(());
        };
        for (s, &d) in g.nodes.iter().zip(&g.depth) {
            prop_assert_eq!(s.clock, d as u64);
        }
    }
}
