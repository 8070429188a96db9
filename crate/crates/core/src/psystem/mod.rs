//! Timed membrane systems: a tree of labelled membranes, each holding a
//! multiset of objects and a set of rewriting rules with execution times.
//!
//! Steps are maximally parallel: [`TimedPSystem::enumerate_maximal`] yields
//! every applicable, non-extendable multiset of rule occurrences and
//! [`TimedPSystem::apply_step`] performs one clock tick, routing produced
//! objects through a per-membrane pending buffer keyed by remaining delay.

mod step;

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::multiset::{Alphabet, Multiset, MultisetError, Symbol};

pub use step::StepError;

/// Membrane label, a positive integer.
pub type Label = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("membrane label {0} is declared twice")]
    DuplicateLabel(Label),
    #[error("membrane labels must be positive, found 0")]
    ZeroLabel,
    #[error("membrane structure is empty")]
    NoMembranes,
    #[error("membrane structure has {0} roots; exactly one skin is required")]
    SkinCount(usize),
    #[error("membrane {child} names unknown parent {parent}")]
    UnknownParent { child: Label, parent: Label },
    #[error("membrane structure is not a tree (cycle through {0})")]
    Cycle(Label),
    #[error("unknown membrane {0}")]
    UnknownMembrane(Label),
    #[error("membrane {home} has no child membrane {child}")]
    NoSuchChild { home: Label, child: Label },
    #[error("rule {0} has an empty left-hand side")]
    EmptyLhs(String),
    #[error("rule name {0} is used twice")]
    DuplicateRule(String),
    #[error("symbol #{0} is not in the alphabet")]
    UnknownSymbol(u32),
    #[error("initial contents given for {given} membranes, structure has {expected}")]
    ContentsArity { given: usize, expected: usize },
}

/// The membrane tree. Membranes are stored in ascending label order, so the
/// index of a membrane is its rank among the labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembraneStructure {
    labels: Vec<Label>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    skin: usize,
}

impl MembraneStructure {
    /// Builds the tree from `(label, parent label)` pairs; the skin is the
    /// unique membrane without a parent.
    pub fn new(nodes: &[(Label, Option<Label>)]) -> Result<Self, ModelError> {
        if nodes.is_empty() {
            return Err(ModelError::NoMembranes);
        }
        let mut sorted = nodes.to_vec();
        sorted.sort_by_key(|&(l, _)| l);
        let labels: Vec<Label> = sorted.iter().map(|&(l, _)| l).collect();
        if labels[0] == 0 {
            return Err(ModelError::ZeroLabel);
        }
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::DuplicateLabel(w[0]));
        }
        let index_of = |l: Label| labels.binary_search(&l).ok();
        let mut parent = Vec::with_capacity(labels.len());
        for &(child, p) in &sorted {
            parent.push(match p {
                None => None,
                Some(p) => Some(index_of(p).ok_or(ModelError::UnknownParent { child, parent: p })?),
            });
        }
        let roots: Vec<usize> = (0..labels.len()).filter(|&i| parent[i].is_none()).collect();
        if roots.len() != 1 {
            return Err(ModelError::SkinCount(roots.len()));
        }
        // every membrane must reach the skin without revisiting a node
        for start in 0..labels.len() {
            let mut cur = start;
            let mut hops = 0;
            while let Some(p) = parent[cur] {
                cur = p;
                hops += 1;
                if hops > labels.len() {
                    return Err(ModelError::Cycle(labels[start]));
                }
            }
        }
        let mut children = vec![Vec::new(); labels.len()];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(i);
            }
        }
        Ok(MembraneStructure {
            labels,
            parent,
            children,
            skin: roots[0],
        })
    }

    /// `[[ ]_2]_1`-style nesting of `n` membranes, label `i+1` inside label `i`.
    pub fn chain(n: u32) -> Result<Self, ModelError> {
        let nodes: Vec<_> = (1..=n).map(|l| (l, if l == 1 { None } else { Some(l - 1) })).collect();
        Self::new(&nodes)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn index_of(&self, label: Label) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    pub fn label(&self, index: usize) -> Label {
        self.labels[index]
    }

    pub fn skin(&self) -> usize {
        self.skin
    }

    pub fn parent(&self, index: usize) -> Option<usize> {
        self.parent[index]
    }

    pub fn children(&self, index: usize) -> &[usize] {
        &self.children[index]
    }

    /// Parent label of `label`, `None` for the skin.
    pub fn parent_label(&self, label: Label) -> Option<Label> {
        self.index_of(label)
            .and_then(|i| self.parent[i])
            .map(|p| self.labels[p])
    }
}

/// Where a produced object goes, relative to the membrane of the rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Here,
    Out,
    In(Label),
}

/// Resolved destination of a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Destination {
    Membrane(Label),
    /// Objects sent out of the skin. Recorded, never matched by rules.
    Environment,
}

pub fn resolve_target(
    structure: &MembraneStructure,
    home: Label,
    target: Target,
) -> Result<Destination, ModelError> {
    let idx = structure.index_of(home).ok_or(ModelError::UnknownMembrane(home))?;
    match target {
        Target::Here => Ok(Destination::Membrane(home)),
        Target::Out => Ok(match structure.parent(idx) {
            Some(p) => Destination::Membrane(structure.label(p)),
            None => Destination::Environment,
        }),
        Target::In(child) => match structure.index_of(child) {
            Some(c) if structure.parent(c) == Some(idx) => Ok(Destination::Membrane(child)),
            _ => Err(ModelError::NoSuchChild { home, child }),
        },
    }
}

/// An evolution rule `lhs -> (v1, t1) (v2, t2) ...` homed in one membrane.
/// Messages with the same target are merged into a single multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub home: Label,
    pub lhs: Multiset,
    pub rhs: BTreeMap<Target, Multiset>,
    pub delay: u32,
}

impl Rule {
    pub fn new(name: impl Into<String>, home: Label, lhs: Multiset, delay: u32) -> Self {
        Rule {
            name: name.into(),
            home,
            lhs,
            rhs: BTreeMap::new(),
            delay,
        }
    }

    /// Adds a message, merging it with any existing one for the same target.
    pub fn with_message(mut self, objects: Multiset, target: Target) -> Self {
        self.push_message(objects, target).expect("message counts overflow");
        self
    }

    pub fn push_message(&mut self, objects: Multiset, target: Target) -> Result<(), MultisetError> {
        if objects.is_empty() {
            return Ok(());
        }
        self.rhs.entry(target).or_default().absorb(&objects)
    }

    pub fn rhs_size(&self) -> u64 {
        self.rhs.values().map(Multiset::size).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct CompiledRule {
    home: usize,
    /// `None` destination is the environment.
    deliveries: Vec<(Option<usize>, Multiset)>,
}

/// `(V, mu, w_1..w_n, R_1..R_n, e)`. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedPSystem {
    alphabet: Alphabet,
    structure: MembraneStructure,
    initial: Vec<Multiset>,
    rules: Vec<Rule>,
    compiled: Vec<CompiledRule>,
    by_membrane: Vec<Vec<usize>>,
}

impl TimedPSystem {
    /// `initial[i]` holds the contents of the membrane with index `i`
    /// (ascending label order).
    pub fn new(
        alphabet: Alphabet,
        structure: MembraneStructure,
        initial: Vec<Multiset>,
        rules: Vec<Rule>,
    ) -> Result<Self, ModelError> {
        if initial.len() != structure.len() {
            return Err(ModelError::ContentsArity {
                given: initial.len(),
                expected: structure.len(),
            });
        }
        let check = |m: &Multiset| match m.support().find(|&s| !alphabet.contains(s)) {
            Some(s) => Err(ModelError::UnknownSymbol(s.0)),
            None => Ok(()),
        };
        for m in &initial {
            check(m)?;
        }
        let mut names = HashSet::new();
        let mut compiled = Vec::with_capacity(rules.len());
        let mut by_membrane = vec![Vec::new(); structure.len()];
        for (id, rule) in rules.iter().enumerate() {
            if !names.insert(rule.name.as_str()) {
                return Err(ModelError::DuplicateRule(rule.name.clone()));
            }
            let home = structure
                .index_of(rule.home)
                .ok_or(ModelError::UnknownMembrane(rule.home))?;
            if rule.lhs.is_empty() {
                return Err(ModelError::EmptyLhs(rule.name.clone()));
            }
            check(&rule.lhs)?;
            let mut deliveries = Vec::new();
            for (&target, objects) in &rule.rhs {
                check(objects)?;
                let dest = match resolve_target(&structure, rule.home, target)? {
                    Destination::Membrane(l) => structure.index_of(l),
                    Destination::Environment => None,
                };
                if !objects.is_empty() {
                    deliveries.push((dest, objects.clone()));
                }
            }
            by_membrane[home].push(id);
            compiled.push(CompiledRule { home, deliveries });
        }
        Ok(TimedPSystem {
            alphabet,
            structure,
            initial,
            rules,
            compiled,
            by_membrane,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn structure(&self) -> &MembraneStructure {
        &self.structure
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule_id(&self, name: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.name == name)
    }

    /// Rule ids homed in the membrane with index `membrane`.
    pub fn rules_in(&self, membrane: usize) -> &[usize] {
        &self.by_membrane[membrane]
    }

    pub fn initial_contents(&self) -> &[Multiset] {
        &self.initial
    }

    /// `m = max e(r)`, 0 for a system without rules.
    pub fn max_delay(&self) -> u32 {
        self.rules.iter().map(|r| r.delay).max().unwrap_or(0)
    }

    pub fn initial_configuration(&self) -> PConfiguration {
        PConfiguration {
            contents: self.initial.clone(),
            pending: vec![BTreeMap::new(); self.structure.len()],
            environment: Multiset::new(),
            clock: 0,
        }
    }

    /// The same system with every execution time set to 0.
    pub fn with_zero_delays(&self) -> TimedPSystem {
        let mut out = self.clone();
        for r in &mut out.rules {
            r.delay = 0;
        }
        out
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.alphabet.get(name)
    }
}

/// `C = (w_1, ..., w_n, k)` plus the objects still in transit.
///
/// `pending[i][j]` holds what reaches membrane index `i` once `j` more
/// ticks have completed (key 0 is merged at the end of the next step).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PConfiguration {
    pub contents: Vec<Multiset>,
    pub pending: Vec<BTreeMap<u32, Multiset>>,
    pub environment: Multiset,
    pub clock: u64,
}

impl PConfiguration {
    pub fn has_pending(&self) -> bool {
        self.pending.iter().any(|p| !p.is_empty())
    }

    /// `(a b, a^2 b, 0)`: contents in label order, then the clock.
    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> DisplayConfiguration<'a> {
        DisplayConfiguration { config: self, alphabet }
    }
}

pub struct DisplayConfiguration<'a> {
    config: &'a PConfiguration,
    alphabet: &'a Alphabet,
}

impl fmt::Display for DisplayConfiguration<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for m in &self.config.contents {
            write!(f, "{}, ", m.display(self.alphabet))?;
        }
        write!(f, "{})", self.config.clock)
    }
}

/// A multiset of rule occurrences, keyed by rule id.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StepChoice {
    pub counts: BTreeMap<usize, u64>,
}

impl StepChoice {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_counts<I: IntoIterator<Item = (usize, u64)>>(counts: I) -> Self {
        let mut choice = Self::default();
        for (rule, n) in counts {
            if n > 0 {
                *choice.counts.entry(rule).or_default() += n;
            }
        }
        choice
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, rule: usize) -> u64 {
        self.counts.get(&rule).copied().unwrap_or(0)
    }

    /// `{r1 r2^2}`, `{}` for the empty step.
    pub fn display<'a>(&'a self, sys: &'a TimedPSystem) -> DisplayChoice<'a> {
        DisplayChoice {
            counts: &self.counts,
            name: Box::new(move |id| sys.rules()[id].name.as_str()),
        }
    }
}

/// Shared `{name name^k}` rendering for rule and transition multisets.
pub struct DisplayChoice<'a> {
    pub(crate) counts: &'a BTreeMap<usize, u64>,
    pub(crate) name: Box<dyn Fn(usize) -> &'a str + 'a>,
}

impl fmt::Display for DisplayChoice<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (&id, &n)) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str((self.name)(id))?;
            if n > 1 {
                write!(f, "^{n}")?;
            }
        }
        f.write_str("}")
    }
}
