//! Regular threads with postconditional switching, represented as finite
//! automata.
//!
//! A state is `Stop`, `Dead`, or a switch that performs a basic action and
//! selects its continuation by the reply: reply `i` continues at `targets[i-1]`.
//! Basic action prefixing `a ∘ x` abbreviates the binary switch `x ⊴ a ⊵ x`;
//! see [`BasicAction::prefix_arity`] for how it is laid out per action kind.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::pga::BasicInstruction;
use crate::syntax::{is_atomic_action, Cursor, ParseError};

pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasicAction {
    Tau,
    Interaction { focus: String, method: String },
    Construct(Vec<String>),
}

impl BasicAction {
    pub fn interaction(focus: impl Into<String>, method: impl Into<String>) -> Self {
        BasicAction::Interaction {
            focus: focus.into(),
            method: method.into(),
        }
    }

    /// # Panics
    /// If `actions` is empty.
    pub fn construct<S: Into<String>>(actions: impl IntoIterator<Item = S>) -> Self {
        let actions: Vec<String> = actions.into_iter().map(Into::into).collect();
        assert!(!actions.is_empty(), "ac() needs at least one action");
        BasicAction::Construct(actions)
    }

    /// Number of targets of `a ∘ x` once written as a normalized switch whose
    /// targets are all `x`: one for `tau` (only reply 1 exists), two for `f.m`
    /// (`x ⊴ f.m ⊵ x`), and `n` for `ac(e1,...,en)` so that every choice
    /// continues with `x`.
    pub fn prefix_arity(&self) -> usize {
        match self {
            BasicAction::Tau => 1,
            BasicAction::Interaction { .. } => 2,
            BasicAction::Construct(actions) => actions.len(),
        }
    }

    /// The target count a normalized switch on this action carries, if fixed.
    pub fn normal_arity(&self) -> Option<usize> {
        match self {
            BasicAction::Tau => Some(1),
            BasicAction::Construct(actions) => Some(actions.len()),
            BasicAction::Interaction { .. } => None,
        }
    }

    pub fn focus(&self) -> Option<&str> {
        match self {
            BasicAction::Interaction { focus, .. } => Some(focus),
            _ => None,
        }
    }
}

impl From<&BasicInstruction> for BasicAction {
    fn from(b: &BasicInstruction) -> Self {
        match b {
            BasicInstruction::Interaction { focus, method } => BasicAction::interaction(focus.clone(), method.clone()),
            BasicInstruction::Construct(actions) => BasicAction::Construct(actions.clone()),
        }
    }
}

impl fmt::Display for BasicAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicAction::Tau => write!(f, "tau"),
            BasicAction::Interaction { focus, method } => write!(f, "{focus}.{method}"),
            BasicAction::Construct(actions) => write!(f, "ac({})", actions.join(",")),
        }
    }
}

fn parse_action(cur: &mut Cursor<'_>) -> Result<BasicAction, ParseError> {
    let at = cur.offset();
    let head = cur.ident()?;
    if head == "tau" {
        return Ok(BasicAction::Tau);
    }
    if head == "ac" && cur.peek() == Some('(') {
        cur.expect("(")?;
        let mut actions = Vec::new();
        loop {
            let at = cur.offset();
            let e = cur.ident()?;
            if !is_atomic_action(e) {
                return Err(ParseError::new(at, format!("`{e}` cannot be an atomic action")));
            }
            actions.push(e.to_string());
            if !cur.eat(",") {
                break;
            }
        }
        cur.expect(")")?;
        return Ok(BasicAction::Construct(actions));
    }
    if cur.eat(".") {
        let method = cur.method()?;
        return Ok(BasicAction::interaction(head, method));
    }
    Err(ParseError::new(at, "expected `tau`, `f.m` or `ac(...)`"))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ThreadState {
    Stop,
    Dead,
    Switch { action: BasicAction, targets: Vec<StateId> },
}

impl ThreadState {
    pub fn switch(action: BasicAction, targets: Vec<StateId>) -> Self {
        ThreadState::Switch { action, targets }
    }

    /// `action ∘ target`.
    pub fn prefix(action: BasicAction, target: StateId) -> Self {
        let targets = vec![target; action.prefix_arity()];
        ThreadState::Switch { action, targets }
    }

    fn targets(&self) -> &[StateId] {
        match self {
            ThreadState::Switch { targets, .. } => targets,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThreadError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("variable `{0}` is defined more than once")]
    DuplicateVariable(String),
    #[error("state {state} refers to missing state {target}")]
    DanglingTarget { state: StateId, target: StateId },
    #[error("state {0} is a switch without targets")]
    EmptySwitch(StateId),
    #[error("root state {0} does not exist")]
    MissingRoot(StateId),
    #[error("state {0} was reserved but never defined")]
    Undefined(StateId),
}

/// A finite-state thread. All states are reachable from `root`, and states are
/// numbered in breadth-first discovery order with `root == 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThreadAutomaton {
    states: Vec<ThreadState>,
}

impl ThreadAutomaton {
    /// Validate, prune unreachable states and renumber breadth-first from `root`.
    pub fn new(states: Vec<ThreadState>, root: StateId) -> Result<Self, ThreadError> {
        if root >= states.len() {
            return Err(ThreadError::MissingRoot(root));
        }
        for (id, s) in states.iter().enumerate() {
            if let ThreadState::Switch { targets, .. } = s {
                if targets.is_empty() {
                    return Err(ThreadError::EmptySwitch(id));
                }
                if let Some(&t) = targets.iter().find(|&&t| t >= states.len()) {
                    return Err(ThreadError::DanglingTarget { state: id, target: t });
                }
            }
        }
        Ok(Self::renumber(&states, root))
    }

    fn renumber(states: &[ThreadState], root: StateId) -> Self {
        let mut index: HashMap<StateId, StateId> = HashMap::new();
        let mut order = vec![root];
        index.insert(root, 0);
        let mut i = 0;
        while i < order.len() {
            for &t in states[order[i]].targets() {
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(t) {
                    e.insert(order.len());
                    order.push(t);
                }
            }
            i += 1;
        }
        let states = order
            .iter()
            .map(|&old| match &states[old] {
                ThreadState::Switch { action, targets } => ThreadState::Switch {
                    action: action.clone(),
                    targets: targets.iter().map(|t| index[t]).collect(),
                },
                other => other.clone(),
            })
            .collect();
        ThreadAutomaton { states }
    }

    pub fn stop() -> Self {
        ThreadAutomaton {
            states: vec![ThreadState::Stop],
        }
    }

    pub fn dead() -> Self {
        ThreadAutomaton {
            states: vec![ThreadState::Dead],
        }
    }

    pub fn root(&self) -> StateId {
        0
    }

    pub fn states(&self) -> &[ThreadState] {
        &self.states
    }

    pub fn state(&self, id: StateId) -> &ThreadState {
        &self.states[id]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The automaton rooted at another of its states.
    pub fn rooted_at(&self, id: StateId) -> Self {
        Self::renumber(&self.states, id)
    }

    /// True if every switch has the target count its action prescribes.
    pub fn is_normalized(&self) -> bool {
        self.states.iter().all(|s| match s {
            ThreadState::Switch { action, targets } => action.normal_arity().is_none_or(|n| n == targets.len()),
            _ => true,
        })
    }
}

impl fmt::Display for ThreadAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", to_linear_spec(self))
    }
}

impl FromStr for ThreadAutomaton {
    type Err = crate::Error;

    /// Parse a linear thread specification; the first equation is the root.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let spec: LinearThreadSpec = s.parse()?;
        let root = spec
            .root()
            .ok_or_else(|| ThreadError::UnboundVariable(String::new()))?
            .to_string();
        Ok(from_linear_spec(&spec, &root)?)
    }
}

/// Incremental construction of automata, including cyclic ones.
#[derive(Debug, Default)]
pub struct ThreadBuilder {
    states: Vec<Option<ThreadState>>,
}

impl ThreadBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, state: ThreadState) -> StateId {
        self.states.push(Some(state));
        self.states.len() - 1
    }

    /// A placeholder to be filled by [`ThreadBuilder::define`].
    pub fn reserve(&mut self) -> StateId {
        self.states.push(None);
        self.states.len() - 1
    }

    pub fn define(&mut self, id: StateId, state: ThreadState) {
        self.states[id] = Some(state);
    }

    pub fn stop(&mut self) -> StateId {
        self.add(ThreadState::Stop)
    }

    pub fn dead(&mut self) -> StateId {
        self.add(ThreadState::Dead)
    }

    pub fn switch(&mut self, action: BasicAction, targets: Vec<StateId>) -> StateId {
        self.add(ThreadState::switch(action, targets))
    }

    pub fn prefix(&mut self, action: BasicAction, target: StateId) -> StateId {
        self.add(ThreadState::prefix(action, target))
    }

    pub fn build(self, root: StateId) -> Result<ThreadAutomaton, ThreadError> {
        let states = self
            .states
            .into_iter()
            .enumerate()
            .map(|(id, s)| s.ok_or(ThreadError::Undefined(id)))
            .collect::<Result<Vec<_>, _>>()?;
        ThreadAutomaton::new(states, root)
    }
}

/// Rewrite every switch to the arity its action prescribes: `tau` keeps its
/// first target, `ac(e1,...,en)` is truncated to or padded with `Dead` up to
/// `n` targets. Switches on `f.m` are left as they are.
pub fn normalize(a: &ThreadAutomaton) -> ThreadAutomaton {
    if a.is_normalized() {
        return a.clone();
    }
    let mut states = a.states.clone();
    let dead = states.len();
    states.push(ThreadState::Dead);
    for s in states.iter_mut() {
        if let ThreadState::Switch { action, targets } = s {
            if let Some(n) = action.normal_arity() {
                targets.resize(n, dead);
            }
        }
    }
    ThreadAutomaton::renumber(&states, 0)
}

/// Strong bisimilarity of threads: `Stop` matches `Stop`, `Dead` matches
/// `Dead`, and switches match on action and pointwise on targets.
pub fn thread_equal(a: &ThreadAutomaton, b: &ThreadAutomaton) -> bool {
    let mut seen: HashSet<(StateId, StateId)> = HashSet::new();
    let mut queue = VecDeque::from([(0, 0)]);
    seen.insert((0, 0));
    while let Some((x, y)) = queue.pop_front() {
        match (&a.states[x], &b.states[y]) {
            (ThreadState::Stop, ThreadState::Stop) | (ThreadState::Dead, ThreadState::Dead) => {}
            (
                ThreadState::Switch { action: p, targets: ps },
                ThreadState::Switch { action: q, targets: qs },
            ) => {
                if p != q || ps.len() != qs.len() {
                    return false;
                }
                for pair in ps.iter().copied().zip(qs.iter().copied()) {
                    if seen.insert(pair) {
                        queue.push_back(pair);
                    }
                }
            }
            _ => return false,
        }
    }
    true
}

/// Right-hand side of a linear thread equation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ThreadRhs {
    Stop,
    Dead,
    Switch(BasicAction, Vec<String>),
}

/// A finite linear recursive specification over threads. The first equation's
/// variable is the default root.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearThreadSpec {
    equations: Vec<(String, ThreadRhs)>,
}

impl LinearThreadSpec {
    pub fn new(equations: Vec<(String, ThreadRhs)>) -> Result<Self, ThreadError> {
        let mut seen = HashSet::new();
        for (x, _) in &equations {
            if !seen.insert(x.as_str()) {
                return Err(ThreadError::DuplicateVariable(x.clone()));
            }
        }
        for (_, rhs) in &equations {
            if let ThreadRhs::Switch(_, vars) = rhs {
                if let Some(v) = vars.iter().find(|v| !seen.contains(v.as_str())) {
                    return Err(ThreadError::UnboundVariable(v.clone()));
                }
            }
        }
        Ok(LinearThreadSpec { equations })
    }

    pub fn equations(&self) -> &[(String, ThreadRhs)] {
        &self.equations
    }

    pub fn root(&self) -> Option<&str> {
        self.equations.first().map(|(x, _)| x.as_str())
    }
}

impl fmt::Display for LinearThreadSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, rhs) in &self.equations {
            match rhs {
                ThreadRhs::Stop => writeln!(f, "{x} = S ;")?,
                ThreadRhs::Dead => writeln!(f, "{x} = D ;")?,
                ThreadRhs::Switch(a, vars) => writeln!(f, "{x} = {a}[{}] ;", vars.join(","))?,
            }
        }
        Ok(())
    }
}

impl FromStr for LinearThreadSpec {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_linear_thread_spec(s)
    }
}

/// Parse `X = S ; Y = D ; Z = action[Y1,...,Yk] ;`.
pub fn parse_linear_thread_spec(text: &str) -> Result<LinearThreadSpec, crate::Error> {
    let mut cur = Cursor::new(text);
    let mut equations = Vec::new();
    while !cur.at_end() {
        let x = cur.ident()?.to_string();
        cur.expect("=")?;
        let save = cur.clone();
        let head = cur.ident()?;
        let rhs = match head {
            "S" => ThreadRhs::Stop,
            "D" => ThreadRhs::Dead,
            _ => {
                cur = save;
                let action = parse_action(&mut cur)?;
                cur.expect("[")?;
                let mut vars = Vec::new();
                loop {
                    vars.push(cur.ident()?.to_string());
                    if !cur.eat(",") {
                        break;
                    }
                }
                cur.expect("]")?;
                ThreadRhs::Switch(action, vars)
            }
        };
        equations.push((x, rhs));
        if !cur.eat(";") && !cur.at_end() {
            return Err(cur.error("expected `;`").into());
        }
    }
    if equations.is_empty() {
        return Err(ParseError::new(0, "expected at least one equation").into());
    }
    Ok(LinearThreadSpec::new(equations)?)
}

/// The solution of `e` for variable `x`, as an automaton.
pub fn from_linear_spec(e: &LinearThreadSpec, x: &str) -> Result<ThreadAutomaton, ThreadError> {
    let index: HashMap<&str, StateId> = e
        .equations
        .iter()
        .enumerate()
        .map(|(i, (v, _))| (v.as_str(), i))
        .collect();
    let lookup = |v: &str| index.get(v).copied().ok_or_else(|| ThreadError::UnboundVariable(v.to_string()));
    let root = lookup(x)?;
    let states = e
        .equations
        .iter()
        .map(|(_, rhs)| {
            Ok(match rhs {
                ThreadRhs::Stop => ThreadState::Stop,
                ThreadRhs::Dead => ThreadState::Dead,
                ThreadRhs::Switch(a, vars) => ThreadState::Switch {
                    action: a.clone(),
                    targets: vars.iter().map(|v| lookup(v)).collect::<Result<_, _>>()?,
                },
            })
        })
        .collect::<Result<Vec<_>, ThreadError>>()?;
    ThreadAutomaton::new(states, root)
}

/// One equation `X<i>` per state, root first.
pub fn to_linear_spec(a: &ThreadAutomaton) -> LinearThreadSpec {
    let name = |i: StateId| format!("X{i}");
    let equations = a
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let rhs = match s {
                ThreadState::Stop => ThreadRhs::Stop,
                ThreadState::Dead => ThreadRhs::Dead,
                ThreadState::Switch { action, targets } => {
                    ThreadRhs::Switch(action.clone(), targets.iter().map(|&t| name(t)).collect())
                }
            };
            (name(i), rhs)
        })
        .collect();
    LinearThreadSpec { equations }
}

/// A node of a [`FiniteThread`]; children index into the same node list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FiniteNode {
    Stop,
    Dead,
    Switch(BasicAction, Vec<usize>),
}

/// A finite thread, stored as a maximally shared DAG numbered in post-order
/// from the root. Two finite threads are structurally equal iff their
/// representations are equal, so `==` is tree equality without unfolding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteThread {
    nodes: Vec<FiniteNode>,
}

#[derive(Default)]
struct Interner {
    nodes: Vec<FiniteNode>,
    ids: HashMap<FiniteNode, usize>,
}

impl Interner {
    fn intern(&mut self, node: FiniteNode) -> usize {
        if let Some(&id) = self.ids.get(&node) {
            return id;
        }
        self.nodes.push(node.clone());
        self.ids.insert(node, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    /// Copy a finite thread into this interner, returning its root id.
    fn import(&mut self, t: &FiniteThread) -> usize {
        let mut map = Vec::with_capacity(t.nodes.len());
        for node in &t.nodes {
            let node = match node {
                FiniteNode::Switch(a, cs) => FiniteNode::Switch(a.clone(), cs.iter().map(|&c| map[c]).collect()),
                other => other.clone(),
            };
            map.push(self.intern(node));
        }
        *map.last().expect("finite threads are nonempty")
    }

    fn finish(self, root: usize) -> FiniteThread {
        // iterative post-order; the root ends up last
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut nodes = Vec::new();
        let mut stack = vec![(root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if index.contains_key(&id) {
                continue;
            }
            match &self.nodes[id] {
                FiniteNode::Switch(a, cs) if expanded => {
                    let node = FiniteNode::Switch(a.clone(), cs.iter().map(|c| index[c]).collect());
                    index.insert(id, nodes.len());
                    nodes.push(node);
                }
                FiniteNode::Switch(_, cs) => {
                    stack.push((id, true));
                    for &c in cs.iter().rev() {
                        if !index.contains_key(&c) {
                            stack.push((c, false));
                        }
                    }
                }
                leaf => {
                    index.insert(id, nodes.len());
                    nodes.push(leaf.clone());
                }
            }
        }
        FiniteThread { nodes }
    }
}

impl FiniteThread {
    pub fn stop() -> Self {
        FiniteThread {
            nodes: vec![FiniteNode::Stop],
        }
    }

    pub fn dead() -> Self {
        FiniteThread {
            nodes: vec![FiniteNode::Dead],
        }
    }

    pub fn switch(action: BasicAction, children: Vec<FiniteThread>) -> Self {
        let mut interner = Interner::default();
        let ids = children.iter().map(|c| interner.import(c)).collect();
        let root = interner.intern(FiniteNode::Switch(action, ids));
        interner.finish(root)
    }

    /// `action ∘ child`.
    pub fn prefix(action: BasicAction, child: FiniteThread) -> Self {
        let n = action.prefix_arity();
        Self::switch(action, vec![child; n])
    }

    pub fn nodes(&self) -> &[FiniteNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Longest action path from the root.
    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if let FiniteNode::Switch(_, cs) = n {
                depth[i] = 1 + cs.iter().map(|&c| depth[c]).max().unwrap_or(0);
            }
        }
        depth[self.root()]
    }

    /// The same thread as an automaton (shared subtrees become shared states).
    pub fn to_automaton(&self) -> ThreadAutomaton {
        let states: Vec<ThreadState> = self
            .nodes
            .iter()
            .map(|n| match n {
                FiniteNode::Stop => ThreadState::Stop,
                FiniteNode::Dead => ThreadState::Dead,
                FiniteNode::Switch(a, cs) => ThreadState::switch(a.clone(), cs.clone()),
            })
            .collect();
        ThreadAutomaton::renumber(&states, self.root())
    }
}

impl fmt::Display for FiniteThread {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &FiniteThread, id: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match &t.nodes[id] {
                FiniteNode::Stop => write!(f, "S"),
                FiniteNode::Dead => write!(f, "D"),
                FiniteNode::Switch(a, cs) => {
                    write!(f, "{a}[")?;
                    for (i, &c) in cs.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        go(t, c, f)?;
                    }
                    write!(f, "]")
                }
            }
        }
        go(self, self.root(), f)
    }
}

/// The approximation of `a` up to depth `n`: behaviour after `n` actions is
/// cut off and replaced by `Dead`.
pub fn project(a: &ThreadAutomaton, n: usize) -> FiniteThread {
    let mut interner = Interner::default();
    let dead = interner.intern(FiniteNode::Dead);
    // level[s] = id of the projection of state s at the current depth
    let mut level = vec![dead; a.len()];
    for _ in 0..n {
        let next: Vec<usize> = a
            .states
            .iter()
            .map(|s| match s {
                ThreadState::Stop => interner.intern(FiniteNode::Stop),
                ThreadState::Dead => dead,
                ThreadState::Switch { action, targets } => {
                    let cs = targets.iter().map(|&t| level[t]).collect();
                    interner.intern(FiniteNode::Switch(action.clone(), cs))
                }
            })
            .collect();
        level = next;
    }
    interner.finish(level[0])
}
