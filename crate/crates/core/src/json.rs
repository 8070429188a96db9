//! JSON forms of models, states and translation correspondences. Field
//! names follow the domain types; symbols, places, rules and transitions
//! are referred to by name, membranes by label.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::multiset::{Alphabet, Multiset, MultisetError};
use crate::petri::{NetError, PNState, TimedPetriNet, Transition};
use crate::psystem::{Label, MembraneStructure, ModelError, PConfiguration, Rule, Target, TimedPSystem};
use crate::translate::{DetimedNet, DetimedPSystem, NetTranslation};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error(transparent)]
    Syntax(#[from] serde_json::Error),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Multiset(#[from] MultisetError),
}

type Counts = BTreeMap<String, u64>;

fn counts(m: &Multiset, alphabet: &Alphabet) -> Counts {
    m.iter().map(|(a, n)| (alphabet.name(a).to_string(), n)).collect()
}

fn multiset(c: &Counts, alphabet: &Alphabet) -> Result<Multiset, JsonError> {
    let pairs = c
        .iter()
        .map(|(name, &n)| {
            alphabet.get(name).map(|a| (a, n)).ok_or_else(|| JsonError::Unknown {
                kind: "symbol",
                name: name.clone(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Multiset::from_pairs(pairs)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetJson {
    Here,
    Out,
    In(Label),
}

impl From<Target> for TargetJson {
    fn from(t: Target) -> Self {
        match t {
            Target::Here => TargetJson::Here,
            Target::Out => TargetJson::Out,
            Target::In(l) => TargetJson::In(l),
        }
    }
}

impl From<TargetJson> for Target {
    fn from(t: TargetJson) -> Self {
        match t {
            TargetJson::Here => Target::Here,
            TargetJson::Out => Target::Out,
            TargetJson::In(l) => Target::In(l),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembraneJson {
    pub label: Label,
    pub parent: Option<Label>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageJson {
    pub objects: Counts,
    pub target: TargetJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleJson {
    pub name: String,
    pub home: Label,
    pub lhs: Counts,
    pub rhs: Vec<MessageJson>,
    pub delay: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PSystemJson {
    pub alphabet: Vec<String>,
    pub structure: Vec<MembraneJson>,
    /// Initial contents keyed by membrane label.
    pub initial: BTreeMap<Label, Counts>,
    pub rules: Vec<RuleJson>,
}

impl PSystemJson {
    pub fn from_model(sys: &TimedPSystem) -> Self {
        let alphabet = sys.alphabet();
        let mu = sys.structure();
        PSystemJson {
            alphabet: alphabet.names().to_vec(),
            structure: (0..mu.len())
                .map(|i| MembraneJson {
                    label: mu.label(i),
                    parent: mu.parent(i).map(|p| mu.label(p)),
                })
                .collect(),
            initial: sys
                .initial_contents()
                .iter()
                .enumerate()
                .map(|(i, m)| (mu.label(i), counts(m, alphabet)))
                .collect(),
            rules: sys
                .rules()
                .iter()
                .map(|r| RuleJson {
                    name: r.name.clone(),
                    home: r.home,
                    lhs: counts(&r.lhs, alphabet),
                    rhs: r
                        .rhs
                        .iter()
                        .map(|(&t, m)| MessageJson {
                            objects: counts(m, alphabet),
                            target: t.into(),
                        })
                        .collect(),
                    delay: r.delay,
                })
                .collect(),
        }
    }

    pub fn to_model(&self) -> Result<TimedPSystem, JsonError> {
        let alphabet = Alphabet::from_names(self.alphabet.iter().cloned());
        let pairs: Vec<(Label, Option<Label>)> = self.structure.iter().map(|m| (m.label, m.parent)).collect();
        let mu = MembraneStructure::new(&pairs)?;
        let mut initial = vec![Multiset::new(); mu.len()];
        for (&label, c) in &self.initial {
            let i = mu.index_of(label).ok_or(ModelError::UnknownMembrane(label))?;
            initial[i] = multiset(c, &alphabet)?;
        }
        let mut rules = Vec::with_capacity(self.rules.len());
        for r in &self.rules {
            let mut rule = Rule::new(r.name.clone(), r.home, multiset(&r.lhs, &alphabet)?, r.delay);
            for m in &r.rhs {
                rule.push_message(multiset(&m.objects, &alphabet)?, m.target.into())?;
            }
            rules.push(rule);
        }
        Ok(TimedPSystem::new(alphabet, mu, initial, rules)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionJson {
    pub name: String,
    pub locality: u32,
    pub delay: u32,
    pub inputs: Counts,
    pub outputs: Counts,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetJson {
    pub places: Vec<String>,
    pub transitions: Vec<TransitionJson>,
    /// Non-zero part of the initial marking.
    pub initial: Counts,
}

fn place_id(net_places: &[String], name: &str) -> Result<usize, JsonError> {
    net_places.iter().position(|p| p == name).ok_or_else(|| JsonError::Unknown {
        kind: "place",
        name: name.to_string(),
    })
}

impl NetJson {
    pub fn from_model(net: &TimedPetriNet) -> Self {
        let places = net.places();
        let arcs = |arcs: &[(usize, u64)]| arcs.iter().map(|&(p, w)| (places[p].clone(), w)).collect();
        NetJson {
            places: places.to_vec(),
            transitions: net
                .transitions()
                .iter()
                .map(|t| TransitionJson {
                    name: t.name.clone(),
                    locality: t.locality,
                    delay: t.delay,
                    inputs: arcs(&t.inputs),
                    outputs: arcs(&t.outputs),
                })
                .collect(),
            initial: marking_counts(places, net.initial_marking()),
        }
    }

    pub fn to_model(&self) -> Result<TimedPetriNet, JsonError> {
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for t in &self.transitions {
            let mut tr = Transition::new(t.name.clone(), t.locality, t.delay);
            for (p, &w) in &t.inputs {
                tr.add_input(place_id(&self.places, p)?, w);
            }
            for (p, &w) in &t.outputs {
                tr.add_output(place_id(&self.places, p)?, w);
            }
            transitions.push(tr);
        }
        let mut initial = vec![0; self.places.len()];
        for (p, &n) in &self.initial {
            initial[place_id(&self.places, p)?] = n;
        }
        Ok(TimedPetriNet::new(self.places.clone(), transitions, initial)?)
    }
}

fn marking_counts(places: &[String], marking: &[u64]) -> Counts {
    places
        .iter()
        .zip(marking)
        .filter(|(_, &n)| n > 0)
        .map(|(p, &n)| (p.clone(), n))
        .collect()
}

/// `{contents: {membrane: {symbol: count}}, pending: {membrane: {delay:
/// {symbol: count}}}, environment, clock}`. Every membrane appears in
/// `contents`; `pending` lists only membranes with objects in transit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PStateJson {
    pub contents: BTreeMap<Label, Counts>,
    pub pending: BTreeMap<Label, BTreeMap<u32, Counts>>,
    pub environment: Counts,
    pub clock: u64,
}

impl PStateJson {
    pub fn from_state(sys: &TimedPSystem, c: &PConfiguration) -> Self {
        let alphabet = sys.alphabet();
        let mu = sys.structure();
        PStateJson {
            contents: c
                .contents
                .iter()
                .enumerate()
                .map(|(i, m)| (mu.label(i), counts(m, alphabet)))
                .collect(),
            pending: c
                .pending
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_empty())
                .map(|(i, p)| (mu.label(i), p.iter().map(|(&d, m)| (d, counts(m, alphabet))).collect()))
                .collect(),
            environment: counts(&c.environment, alphabet),
            clock: c.clock,
        }
    }

    pub fn to_state(&self, sys: &TimedPSystem) -> Result<PConfiguration, JsonError> {
        let alphabet = sys.alphabet();
        let mu = sys.structure();
        let mut c = sys.initial_configuration();
        c.contents = vec![Multiset::new(); mu.len()];
        let index = |l: Label| mu.index_of(l).ok_or(ModelError::UnknownMembrane(l));
        for (&l, m) in &self.contents {
            c.contents[index(l)?] = multiset(m, alphabet)?;
        }
        for (&l, p) in &self.pending {
            let i = index(l)?;
            for (&d, m) in p {
                let m = multiset(m, alphabet)?;
                if !m.is_empty() {
                    c.pending[i].insert(d, m);
                }
            }
        }
        c.environment = multiset(&self.environment, alphabet)?;
        c.clock = self.clock;
        Ok(c)
    }
}

/// `{marking: {place: count}, pending: {place: {delay: count}}, gc}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetStateJson {
    pub marking: Counts,
    pub pending: BTreeMap<String, BTreeMap<u32, u64>>,
    pub gc: u64,
}

impl NetStateJson {
    pub fn from_state(net: &TimedPetriNet, s: &PNState) -> Self {
        let places = net.places();
        NetStateJson {
            marking: places.iter().cloned().zip(s.marking.iter().copied()).collect(),
            pending: s
                .pending
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_empty())
                .map(|(i, p)| (places[i].clone(), p.clone()))
                .collect(),
            gc: s.gc,
        }
    }

    pub fn to_state(&self, net: &TimedPetriNet) -> Result<PNState, JsonError> {
        let mut s = net.initial_state();
        s.marking = vec![0; net.places().len()];
        for (p, &n) in &self.marking {
            s.marking[place_id(net.places(), p)?] = n;
        }
        for (p, pending) in &self.pending {
            let i = place_id(net.places(), p)?;
            s.pending[i] = pending.iter().filter(|(_, &n)| n > 0).map(|(&d, &n)| (d, n)).collect();
        }
        s.gc = self.gc;
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StagedSymbolJson {
    pub base: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<u32>,
}

/// Correspondence of a detimed membrane system with its source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetimedPSystemMap {
    pub symbols: BTreeMap<String, StagedSymbolJson>,
    /// Source rule of every detimed rule; `null` for staging rules.
    pub rules: BTreeMap<String, Option<String>>,
}

impl DetimedPSystemMap {
    pub fn new(source: &TimedPSystem, d: &DetimedPSystem) -> Self {
        let names = d.system.alphabet();
        DetimedPSystemMap {
            symbols: d
                .symbols
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    (
                        names.names()[i].clone(),
                        StagedSymbolJson {
                            base: source.alphabet().name(s.base).to_string(),
                            stage: s.stage,
                        },
                    )
                })
                .collect(),
            rules: d
                .system
                .rules()
                .iter()
                .zip(&d.rule_origin)
                .map(|(r, o)| (r.name.clone(), o.map(|o| source.rules()[o].name.clone())))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainPlaceJson {
    pub base: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transition: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainTransitionJson {
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<u32>,
}

/// Correspondence of a detimed net with its source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetimedNetMap {
    pub places: BTreeMap<String, ChainPlaceJson>,
    pub transitions: BTreeMap<String, ChainTransitionJson>,
}

impl DetimedNetMap {
    pub fn new(source: &TimedPetriNet, d: &DetimedNet) -> Self {
        let tname = |t: usize| source.transitions()[t].name.clone();
        DetimedNetMap {
            places: d
                .places
                .iter()
                .zip(d.net.places())
                .map(|(p, name)| {
                    (
                        name.clone(),
                        ChainPlaceJson {
                            base: source.places()[p.base].clone(),
                            transition: p.chain.map(|(t, _)| tname(t)),
                            stage: p.chain.map(|(_, j)| j),
                        },
                    )
                })
                .collect(),
            transitions: d
                .transitions
                .iter()
                .zip(d.net.transitions())
                .map(|(t, tr)| {
                    (
                        tr.name.clone(),
                        ChainTransitionJson {
                            source: tname(t.source),
                            stage: t.stage,
                        },
                    )
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObjectPlaceJson {
    pub symbol: String,
    pub membrane: Label,
}

/// Correspondence of a membrane system with its net: `(object, membrane)`
/// per place and source rule per transition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NetTranslationMap {
    pub places: BTreeMap<String, ObjectPlaceJson>,
    pub transitions: BTreeMap<String, String>,
}

impl NetTranslationMap {
    pub fn new(source: &TimedPSystem, t: &NetTranslation) -> Self {
        NetTranslationMap {
            places: t
                .place_origin
                .iter()
                .zip(t.net.places())
                .map(|(&(a, l), name)| {
                    (
                        name.clone(),
                        ObjectPlaceJson {
                            symbol: source.alphabet().name(a).to_string(),
                            membrane: l,
                        },
                    )
                })
                .collect(),
            transitions: t
                .transition_of
                .iter()
                .enumerate()
                .map(|(r, &tr)| (t.net.transitions()[tr].name.clone(), source.rules()[r].name.clone()))
                .collect(),
        }
    }
}
