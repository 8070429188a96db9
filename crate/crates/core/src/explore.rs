//! Policy-driven runs and bounded reachability graphs, shared by both
//! formalisms through [`MaxStepSemantics`].

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Debug;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Default node budget for exhaustive exploration.
pub const DEFAULT_BUDGET: usize = 50_000;

/// A transition system whose steps are maximal multisets of rule or
/// transition occurrences, advancing a global clock by one tick.
pub trait MaxStepSemantics {
    type State: Clone + Ord + Debug;
    type Choice: Clone + Ord + Debug;
    type Error: std::error::Error + Send + Sync + 'static;

    fn initial_state(&self) -> Self::State;

    /// All maximal choices at `state`, in canonical (ascending) order. Never
    /// empty: a state with no applicable occurrence yields the empty choice.
    fn maximal_choices(&self, state: &Self::State) -> Result<Vec<Self::Choice>, Self::Error>;

    fn step(&self, state: &Self::State, choice: &Self::Choice) -> Result<Self::State, Self::Error>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    Exhaustive,
    FirstCanonical,
    Seeded(u64),
}

#[derive(Debug, Error)]
pub enum ExploreError<E: std::error::Error + 'static> {
    #[error(transparent)]
    Step(E),
    #[error("state budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: usize },
}

/// A single run: `states[k+1]` is reached from `states[k]` by `choices[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace<S, C> {
    pub states: Vec<S>,
    pub choices: Vec<C>,
}

impl<S, C> Trace<S, C> {
    pub fn last(&self) -> &S {
        self.states.last().expect("trace always holds the initial state")
    }
}

#[derive(Debug, Clone)]
pub struct Edge<C> {
    pub from: usize,
    pub choice: C,
    pub to: usize,
}

/// Bounded reachability graph. Node identity is state equality; node 0 is
/// the initial state and `depth[i]` is the number of steps from it.
#[derive(Debug, Clone)]
pub struct TraceGraph<S, C> {
    pub nodes: Vec<S>,
    pub depth: Vec<usize>,
    pub edges: Vec<Edge<C>>,
    index: BTreeMap<S, usize>,
}

impl<S: Clone + Ord, C> TraceGraph<S, C> {
    fn new(initial: S) -> Self {
        let mut index = BTreeMap::new();
        index.insert(initial.clone(), 0);
        TraceGraph {
            nodes: vec![initial],
            depth: vec![0],
            edges: Vec::new(),
            index,
        }
    }

    pub fn node_of(&self, state: &S) -> Option<usize> {
        self.index.get(state).copied()
    }

    pub fn max_depth(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    /// Nodes at exactly `depth`, in insertion order.
    pub fn at_depth(&self, depth: usize) -> impl Iterator<Item = &S> + '_ {
        self.nodes
            .iter()
            .zip(&self.depth)
            .filter(move |(_, &d)| d == depth)
            .map(|(s, _)| s)
    }

    /// Choices leading from the initial state to `node` along the edges
    /// that first discovered each node.
    pub fn path_to(&self, node: usize) -> Vec<C>
    where
        C: Clone,
    {
        let mut path = Vec::new();
        let mut cur = node;
        while cur != 0 {
            let edge = self
                .edges
                .iter()
                .find(|e| e.to == cur && e.from != cur)
                .expect("every non-initial node has a discovering edge");
            path.push(edge.choice.clone());
            cur = edge.from;
        }
        path.reverse();
        path
    }

    pub fn successors(&self, node: usize) -> impl Iterator<Item = &Edge<C>> + '_ {
        self.edges.iter().filter(move |e| e.from == node)
    }
}

#[derive(Debug, Clone)]
pub enum RunOutcome<S, C> {
    Graph(TraceGraph<S, C>),
    Trace(Trace<S, C>),
}

/// The state graph of a model.
pub type GraphOf<M> = TraceGraph<<M as MaxStepSemantics>::State, <M as MaxStepSemantics>::Choice>;
type Failed<M> = ExploreError<<M as MaxStepSemantics>::Error>;

/// Breadth-first exploration up to `steps` ticks. Every node counts against
/// `budget`; running out is an error, never a truncated graph.
pub fn explore<M: MaxStepSemantics>(
    model: &M,
    steps: usize,
    budget: usize,
) -> Result<GraphOf<M>, Failed<M>> {
    explore_from(model, model.initial_state(), steps, budget)
}

pub fn explore_from<M: MaxStepSemantics>(
    model: &M,
    start: M::State,
    steps: usize,
    budget: usize,
) -> Result<GraphOf<M>, Failed<M>> {
    if budget == 0 {
        return Err(ExploreError::BudgetExceeded { budget });
    }
    let mut graph = TraceGraph::new(start);
    let mut queue = VecDeque::from([0usize]);
    while let Some(node) = queue.pop_front() {
        let depth = graph.depth[node];
        if depth >= steps {
            continue;
        }
        let state = graph.nodes[node].clone();
        for choice in model.maximal_choices(&state).map_err(ExploreError::Step)? {
            let next = model.step(&state, &choice).map_err(ExploreError::Step)?;
            let to = match graph.index.get(&next) {
                Some(&i) => i,
                None => {
                    if graph.nodes.len() >= budget {
                        return Err(ExploreError::BudgetExceeded { budget });
                    }
                    let i = graph.nodes.len();
                    graph.index.insert(next.clone(), i);
                    graph.nodes.push(next);
                    graph.depth.push(depth + 1);
                    queue.push_back(i);
                    i
                }
            };
            graph.edges.push(Edge { from: node, choice, to });
        }
    }
    Ok(graph)
}

/// Follows one path, picking the canonically first choice or a seeded
/// uniform one at every step.
pub fn trace<M: MaxStepSemantics>(
    model: &M,
    steps: usize,
    seed: Option<u64>,
) -> Result<Trace<M::State, M::Choice>, M::Error> {
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut state = model.initial_state();
    let mut out = Trace {
        states: vec![state.clone()],
        choices: Vec::with_capacity(steps),
    };
    for _ in 0..steps {
        let mut choices = model.maximal_choices(&state)?;
        let pick = match rng.as_mut() {
            Some(rng) => rng.gen_range(0..choices.len()),
            None => 0,
        };
        let choice = choices.swap_remove(pick);
        state = model.step(&state, &choice)?;
        out.states.push(state.clone());
        out.choices.push(choice);
    }
    Ok(out)
}

pub fn run<M: MaxStepSemantics>(
    model: &M,
    steps: usize,
    policy: Policy,
    budget: usize,
) -> Result<RunOutcome<M::State, M::Choice>, Failed<M>> {
    match policy {
        Policy::Exhaustive => explore(model, steps, budget).map(RunOutcome::Graph),
        Policy::FirstCanonical => trace(model, steps, None)
            .map(RunOutcome::Trace)
            .map_err(ExploreError::Step),
        Policy::Seeded(seed) => trace(model, steps, Some(seed))
            .map(RunOutcome::Trace)
            .map_err(ExploreError::Step),
    }
}
