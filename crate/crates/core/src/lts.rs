//! Labeled transition systems with a termination predicate, the process
//! alphabet, the communication function, and the ACP operators used by
//! process extraction.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::syntax::{is_ident, is_method};

pub type LtsState = usize;

/// Payload of a focus channel action: a method on the way in, a reply on the
/// way back.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Data {
    Method(String),
    Reply(u64),
}

impl fmt::Display for Data {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Data::Method(m) => write!(f, "{m}"),
            Data::Reply(r) => write!(f, "{r}"),
        }
    }
}

impl FromStr for Data {
    type Err = LtsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) {
            return s
                .parse()
                .map(Data::Reply)
                .map_err(|_| LtsError::Label(s.to_string()));
        }
        if is_method(s) {
            Ok(Data::Method(s.to_string()))
        } else {
            Err(LtsError::Label(s.to_string()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionLabel {
    /// A plain atomic action `e`.
    Atomic(String),
    /// `snd_f(d)`: the thread side of a focus channel.
    Snd { focus: String, data: Data },
    /// `rcv_f(d)`.
    Rcv { focus: String, data: Data },
    /// `snd_s(r)`: a service sending reply `r`.
    ServiceSnd(u64),
    /// `rcv_s(m)`: a service receiving method `m`.
    ServiceRcv(String),
    Stop,
    StopBar,
    StopStar,
    /// The visible internal action `i`.
    I,
    Tau,
}

impl ActionLabel {
    pub fn atomic(name: impl Into<String>) -> Self {
        ActionLabel::Atomic(name.into())
    }

    pub fn snd(focus: impl Into<String>, data: Data) -> Self {
        ActionLabel::Snd {
            focus: focus.into(),
            data,
        }
    }

    pub fn rcv(focus: impl Into<String>, data: Data) -> Self {
        ActionLabel::Rcv {
            focus: focus.into(),
            data,
        }
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, ActionLabel::Tau)
    }

    /// Member of the set `A_f` of channel actions for focus `f`.
    pub fn on_focus(&self, f: &str) -> bool {
        match self {
            ActionLabel::Snd { focus, .. } | ActionLabel::Rcv { focus, .. } => focus == f,
            _ => false,
        }
    }
}

impl fmt::Display for ActionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionLabel::Atomic(e) => write!(f, "{e}"),
            ActionLabel::Snd { focus, data } => write!(f, "snd_{focus}({data})"),
            ActionLabel::Rcv { focus, data } => write!(f, "rcv_{focus}({data})"),
            ActionLabel::ServiceSnd(r) => write!(f, "snd_s({r})"),
            ActionLabel::ServiceRcv(m) => write!(f, "rcv_s({m})"),
            ActionLabel::Stop => write!(f, "stop"),
            ActionLabel::StopBar => write!(f, "stop_bar"),
            ActionLabel::StopStar => write!(f, "stop_star"),
            ActionLabel::I => write!(f, "i"),
            ActionLabel::Tau => write!(f, "tau"),
        }
    }
}

impl FromStr for ActionLabel {
    type Err = LtsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LtsError::Label(s.to_string());
        match s {
            "stop" => return Ok(ActionLabel::Stop),
            "stop_bar" => return Ok(ActionLabel::StopBar),
            "stop_star" => return Ok(ActionLabel::StopStar),
            "i" => return Ok(ActionLabel::I),
            "tau" => return Ok(ActionLabel::Tau),
            _ => {}
        }
        for (prefix, send) in [("snd_", true), ("rcv_", false)] {
            let Some(rest) = s.strip_prefix(prefix) else { continue };
            let (focus, arg) = rest
                .strip_suffix(')')
                .and_then(|r| r.split_once('('))
                .ok_or_else(bad)?;
            if !is_ident(focus) {
                return Err(bad());
            }
            let data: Data = arg.parse().map_err(|_| bad())?;
            return Ok(match (focus, send, data) {
                ("s", true, Data::Reply(r)) => ActionLabel::ServiceSnd(r),
                ("s", false, Data::Method(m)) => ActionLabel::ServiceRcv(m),
                (_, true, data) => ActionLabel::snd(focus, data),
                (_, false, data) => ActionLabel::rcv(focus, data),
            });
        }
        if crate::syntax::is_atomic_action(s) {
            Ok(ActionLabel::Atomic(s.to_string()))
        } else {
            Err(bad())
        }
    }
}

/// The communication function: `snd_f(d) | rcv_f(d) = i`,
/// `stop | stop_bar = stop_star`, symmetric, and undefined (δ) elsewhere.
pub fn gamma(a: &ActionLabel, b: &ActionLabel) -> Option<ActionLabel> {
    use ActionLabel::*;
    match (a, b) {
        (Snd { focus: f, data: d }, Rcv { focus: g, data: e }) | (Rcv { focus: g, data: e }, Snd { focus: f, data: d })
            if f == g && d == e =>
        {
            Some(I)
        }
        (Stop, StopBar) | (StopBar, Stop) => Some(StopStar),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtsError {
    #[error("invalid action label `{0}`")]
    Label(String),
    #[error("state {0} out of range")]
    StateOutOfRange(usize),
    #[error("malformed JSON LTS: {0}")]
    Json(String),
    #[error("malformed .aut file at line {line}: {message}")]
    Aut { line: usize, message: String },
}

/// A rooted LTS. States are `0..len()`; after any operator of this module the
/// LTS is canonical: every state is reachable, the root is 0, states are
/// numbered in breadth-first order, and transitions are sorted and distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lts {
    root: LtsState,
    terminating: Vec<bool>,
    transitions: Vec<(LtsState, ActionLabel, LtsState)>,
}

impl Lts {
    /// Validate and store without canonicalizing.
    pub fn new(
        states: usize,
        root: LtsState,
        terminating: impl IntoIterator<Item = LtsState>,
        transitions: Vec<(LtsState, ActionLabel, LtsState)>,
    ) -> Result<Self, LtsError> {
        if root >= states {
            return Err(LtsError::StateOutOfRange(root));
        }
        let mut term = vec![false; states];
        for s in terminating {
            *term.get_mut(s).ok_or(LtsError::StateOutOfRange(s))? = true;
        }
        for (from, _, to) in &transitions {
            for &s in [from, to] {
                if s >= states {
                    return Err(LtsError::StateOutOfRange(s));
                }
            }
        }
        Ok(Lts {
            root,
            terminating: term,
            transitions,
        })
    }

    /// A single deadlocked state.
    pub fn deadlock() -> Self {
        Lts {
            root: 0,
            terminating: vec![false],
            transitions: Vec::new(),
        }
    }

    /// A single terminated state.
    pub fn terminated() -> Self {
        Lts {
            root: 0,
            terminating: vec![true],
            transitions: Vec::new(),
        }
    }

    pub fn root(&self) -> LtsState {
        self.root
    }

    pub fn len(&self) -> usize {
        self.terminating.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_terminating(&self, s: LtsState) -> bool {
        self.terminating[s]
    }

    pub fn terminating_states(&self) -> impl Iterator<Item = LtsState> + '_ {
        self.terminating.iter().enumerate().filter(|(_, &t)| t).map(|(s, _)| s)
    }

    pub fn transitions(&self) -> &[(LtsState, ActionLabel, LtsState)] {
        &self.transitions
    }

    /// Outgoing transitions of `s`.
    pub fn successors(&self, s: LtsState) -> impl Iterator<Item = (&ActionLabel, LtsState)> {
        self.transitions
            .iter()
            .filter(move |(f, _, _)| *f == s)
            .map(|(_, l, t)| (l, *t))
    }

    /// Per-state adjacency lists.
    pub fn adjacency(&self) -> Vec<Vec<(&ActionLabel, LtsState)>> {
        let mut adj = vec![Vec::new(); self.len()];
        for (f, l, t) in &self.transitions {
            adj[*f].push((l, *t));
        }
        adj
    }

    /// All labels occurring on transitions.
    pub fn labels(&self) -> BTreeSet<&ActionLabel> {
        self.transitions.iter().map(|(_, l, _)| l).collect()
    }

    pub fn is_deadlock(&self, s: LtsState) -> bool {
        !self.terminating[s] && self.transitions.iter().all(|(f, _, _)| *f != s)
    }

    /// Prune unreachable states and renumber breadth-first from the root,
    /// visiting successors in (label, target) order.
    pub fn canonical(&self) -> Lts {
        let mut adj = self.adjacency();
        for succ in &mut adj {
            succ.sort();
            succ.dedup();
        }
        let mut index = vec![usize::MAX; self.len()];
        let mut order = vec![self.root];
        index[self.root] = 0;
        let mut i = 0;
        while i < order.len() {
            for &(_, t) in &adj[order[i]] {
                if index[t] == usize::MAX {
                    index[t] = order.len();
                    order.push(t);
                }
            }
            i += 1;
        }
        let mut transitions: Vec<_> = order
            .iter()
            .flat_map(|&s| adj[s].iter().map(move |(l, t)| (s, *l, *t)))
            .map(|(s, l, t)| (index[s], l.clone(), index[t]))
            .collect();
        transitions.sort();
        transitions.dedup();
        Lts {
            root: 0,
            terminating: order.iter().map(|&s| self.terminating[s]).collect(),
            transitions,
        }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }
}

/// Incremental LTS construction.
#[derive(Debug, Default, Clone)]
pub struct LtsBuilder {
    terminating: Vec<bool>,
    transitions: Vec<(LtsState, ActionLabel, LtsState)>,
}

impl LtsBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&mut self, terminating: bool) -> LtsState {
        self.terminating.push(terminating);
        self.terminating.len() - 1
    }

    pub fn set_terminating(&mut self, s: LtsState, terminating: bool) {
        self.terminating[s] = terminating;
    }

    pub fn edge(&mut self, from: LtsState, label: ActionLabel, to: LtsState) {
        self.transitions.push((from, label, to));
    }

    pub fn len(&self) -> usize {
        self.terminating.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terminating.is_empty()
    }

    /// Canonical LTS rooted at `root`.
    ///
    /// # Panics
    /// If `root` or an edge endpoint is not a state of the builder.
    pub fn build(self, root: LtsState) -> Lts {
        assert!(root < self.terminating.len(), "root out of range");
        let lts = Lts {
            root,
            terminating: self.terminating,
            transitions: self.transitions,
        };
        assert!(
            lts.transitions.iter().all(|(f, _, t)| *f < lts.len() && *t < lts.len()),
            "edge endpoint out of range"
        );
        lts.canonical()
    }
}

/// Merge with on-the-fly encapsulation of `blocked` labels, exploring only the
/// reachable product. Fails once more than `bound` states are discovered.
pub(crate) fn merge_encapsulated(
    p: &Lts,
    q: &Lts,
    blocked: &dyn Fn(&ActionLabel) -> bool,
    bound: usize,
) -> Result<Lts, usize> {
    let pa = p.adjacency();
    let qa = q.adjacency();
    let mut b = LtsBuilder::new();
    let mut ids: HashMap<(LtsState, LtsState), LtsState> = HashMap::new();
    let mut queue = VecDeque::new();
    let start = (p.root, q.root);
    ids.insert(start, b.state(p.terminating[p.root] && q.terminating[q.root]));
    queue.push_back(start);
    while let Some((x, y)) = queue.pop_front() {
        let from = ids[&(x, y)];
        let mut moves: Vec<(ActionLabel, (LtsState, LtsState))> = Vec::new();
        for &(l, x2) in &pa[x] {
            moves.push((l.clone(), (x2, y)));
        }
        for &(l, y2) in &qa[y] {
            moves.push((l.clone(), (x, y2)));
        }
        for &(l1, x2) in &pa[x] {
            for &(l2, y2) in &qa[y] {
                if let Some(c) = gamma(l1, l2) {
                    moves.push((c, (x2, y2)));
                }
            }
        }
        for (label, target) in moves {
            if blocked(&label) {
                continue;
            }
            let to = match ids.get(&target) {
                Some(&id) => id,
                None => {
                    if ids.len() >= bound {
                        return Err(bound);
                    }
                    let id = b.state(p.terminating[target.0] && q.terminating[target.1]);
                    ids.insert(target, id);
                    queue.push_back(target);
                    id
                }
            };
            b.edge(from, label, to);
        }
    }
    Ok(b.build(0))
}

/// `p ∥ q`: interleavings of both sides plus a synchronized step labeled
/// `gamma(a, b)` wherever that is defined. A pair terminates iff both do.
pub fn par_merge(p: &Lts, q: &Lts) -> Lts {
    merge_encapsulated(p, q, &|_| false, usize::MAX).expect("unbounded merge")
}

/// `∂_H`, with `H` given as a predicate.
pub fn encapsulate_where(p: &Lts, blocked: impl Fn(&ActionLabel) -> bool) -> Lts {
    let transitions = p
        .transitions
        .iter()
        .filter(|(_, l, _)| !blocked(l))
        .cloned()
        .collect();
    Lts {
        root: p.root,
        terminating: p.terminating.clone(),
        transitions,
    }
    .canonical()
}

/// `∂_H(p)`: transitions labeled with a member of `h` are removed.
pub fn encapsulate(p: &Lts, h: &BTreeSet<ActionLabel>) -> Lts {
    encapsulate_where(p, |l| h.contains(l))
}

/// `ρ_R(p)`. `tau` is always mapped to itself.
pub fn rename(p: &Lts, r: impl Fn(&ActionLabel) -> ActionLabel) -> Lts {
    let transitions = p
        .transitions
        .iter()
        .map(|(f, l, t)| {
            let l = if l.is_tau() { ActionLabel::Tau } else { r(l) };
            (*f, l, *t)
        })
        .collect();
    Lts {
        root: p.root,
        terminating: p.terminating.clone(),
        transitions,
    }
    .canonical()
}

/// `ρ_R(p)` for a finite map; labels outside the map are unchanged.
pub fn rename_map(p: &Lts, r: &HashMap<ActionLabel, ActionLabel>) -> Lts {
    rename(p, |l| r.get(l).cloned().unwrap_or_else(|| l.clone()))
}

/// `τ_I`, with `I` given as a predicate.
pub fn abstract_where(p: &Lts, hidden: impl Fn(&ActionLabel) -> bool) -> Lts {
    rename(p, |l| if hidden(l) { ActionLabel::Tau } else { l.clone() })
}

/// `τ_I(p)`: members of `i` become `tau`.
pub fn abstract_labels(p: &Lts, i: &BTreeSet<ActionLabel>) -> Lts {
    abstract_where(p, |l| i.contains(l))
}

/// `τ · p`.
pub fn tau_prefix(p: &Lts) -> Lts {
    let n = p.len();
    let mut transitions = p.transitions.clone();
    transitions.push((n, ActionLabel::Tau, p.root));
    let mut terminating = p.terminating.clone();
    terminating.push(false);
    Lts {
        root: n,
        terminating,
        transitions,
    }
    .canonical()
}
