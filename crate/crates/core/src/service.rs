//! Services and the thread-level use operator.
//!
//! A service is a state machine: processing a method yields a reply and a
//! derived service. Reply 0 means the request is rejected, and a service that
//! has replied 0 replies 0 to everything afterwards.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use thiserror::Error;

use crate::syntax::is_ident;
use crate::thread::{normalize, BasicAction, StateId, ThreadAutomaton, ThreadBuilder, ThreadState};

/// Default cap on reachable product states.
pub const DEFAULT_STATE_BOUND: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ServiceError {
    #[error("state bound of {bound} exceeded (the result may not be regular)")]
    StateBoundExceeded { bound: usize },
    #[error("invalid service descriptor `{0}`")]
    BadDescriptor(String),
}

/// A service whose state is the value itself; equal values are equal states.
pub trait Service: Clone + Eq + Hash + fmt::Debug {
    /// The reply to processing `method` in the current state.
    fn reply(&self, method: &str) -> u64;
    /// The service after processing `method`.
    fn derive(&self, method: &str) -> Self;
    /// The methods the service declares. The process-level semantics sums over
    /// these; any other method is answered with 0.
    fn methods(&self) -> Vec<String>;
}

/// Every service state reachable from `h` through its declared methods, in
/// breadth-first order with `h` first.
pub fn reachable_states<S: Service>(h: &S, bound: usize) -> Result<Vec<S>, ServiceError> {
    let methods = h.methods();
    let mut seen: HashMap<S, usize> = HashMap::new();
    let mut order = vec![h.clone()];
    seen.insert(h.clone(), 0);
    let mut i = 0;
    while i < order.len() {
        for m in &methods {
            let next = order[i].derive(m);
            if !seen.contains_key(&next) {
                if order.len() >= bound {
                    return Err(ServiceError::StateBoundExceeded { bound });
                }
                seen.insert(next.clone(), order.len());
                order.push(next);
            }
        }
        i += 1;
    }
    Ok(order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegisterState {
    True,
    False,
    Blocked,
}

impl RegisterState {
    fn reply(self) -> u64 {
        match self {
            RegisterState::True => 1,
            RegisterState::False => 2,
            RegisterState::Blocked => 0,
        }
    }
}

/// The Boolean register: `set:T`, `set:F` and `get`, where effect and yield
/// coincide under True ↦ 1, False ↦ 2, Blocked ↦ 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BooleanRegister {
    pub state: RegisterState,
}

pub const REGISTER_METHODS: [&str; 3] = ["set:T", "set:F", "get"];

pub fn boolean_register(init: RegisterState) -> BooleanRegister {
    BooleanRegister { state: init }
}

impl BooleanRegister {
    fn effect(&self, method: &str) -> RegisterState {
        match (self.state, method) {
            (RegisterState::Blocked, _) => RegisterState::Blocked,
            (_, "set:T") => RegisterState::True,
            (_, "set:F") => RegisterState::False,
            (b, "get") => b,
            _ => RegisterState::Blocked,
        }
    }
}

impl Service for BooleanRegister {
    fn reply(&self, method: &str) -> u64 {
        self.effect(method).reply()
    }

    fn derive(&self, method: &str) -> Self {
        BooleanRegister {
            state: self.effect(method),
        }
    }

    fn methods(&self) -> Vec<String> {
        REGISTER_METHODS.iter().map(|m| m.to_string()).collect()
    }
}

/// A counter over `[0, max]` with `inc`, `dec` and `iszero`. Incrementing at
/// `max` blocks the counter; decrementing at 0 replies False and keeps 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundedCounter {
    /// `None` once blocked.
    pub value: Option<u64>,
    pub max: u64,
}

impl BoundedCounter {
    pub fn new(max: u64) -> Self {
        BoundedCounter { value: Some(0), max }
    }

    fn step(&self, method: &str) -> (u64, Option<u64>) {
        let Some(v) = self.value else { return (0, None) };
        match method {
            "inc" if v < self.max => (1, Some(v + 1)),
            "inc" => (0, None),
            "dec" if v > 0 => (1, Some(v - 1)),
            "dec" => (2, Some(0)),
            "iszero" => (if v == 0 { 1 } else { 2 }, Some(v)),
            _ => (0, None),
        }
    }
}

impl Service for BoundedCounter {
    fn reply(&self, method: &str) -> u64 {
        self.step(method).0
    }

    fn derive(&self, method: &str) -> Self {
        BoundedCounter {
            value: self.step(method).1,
            max: self.max,
        }
    }

    fn methods(&self) -> Vec<String> {
        vec!["inc".into(), "dec".into(), "iszero".into()]
    }
}

/// A stack over a finite alphabet holding at most `max` symbols, with
/// `push:x`, `pop` and `top:x`. Pushing onto a full stack blocks it; popping
/// or inspecting an empty stack replies False.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoundedStack {
    /// `None` once blocked; top of stack is the last element.
    pub contents: Option<Vec<String>>,
    pub max: usize,
    pub alphabet: Vec<String>,
}

impl BoundedStack {
    pub fn new(max: usize, alphabet: Vec<String>) -> Self {
        BoundedStack {
            contents: Some(Vec::new()),
            max,
            alphabet,
        }
    }

    fn step(&self, method: &str) -> (u64, Option<Vec<String>>) {
        let Some(stack) = &self.contents else { return (0, None) };
        if let Some(x) = method.strip_prefix("push:") {
            if !self.alphabet.iter().any(|a| a == x) || stack.len() >= self.max {
                return (0, None);
            }
            let mut next = stack.clone();
            next.push(x.to_string());
            return (1, Some(next));
        }
        if let Some(x) = method.strip_prefix("top:") {
            if !self.alphabet.iter().any(|a| a == x) {
                return (0, None);
            }
            let reply = if stack.last().map(String::as_str) == Some(x) { 1 } else { 2 };
            return (reply, Some(stack.clone()));
        }
        if method == "pop" {
            let mut next = stack.clone();
            return match next.pop() {
                Some(_) => (1, Some(next)),
                None => (2, Some(next)),
            };
        }
        (0, None)
    }
}

impl Service for BoundedStack {
    fn reply(&self, method: &str) -> u64 {
        self.step(method).0
    }

    fn derive(&self, method: &str) -> Self {
        BoundedStack {
            contents: self.step(method).1,
            max: self.max,
            alphabet: self.alphabet.clone(),
        }
    }

    fn methods(&self) -> Vec<String> {
        let mut ms = vec!["pop".to_string()];
        for x in &self.alphabet {
            ms.push(format!("push:{x}"));
            ms.push(format!("top:{x}"));
        }
        ms
    }
}

/// One of the built-in services, as named by a descriptor
/// `br:<t|f|b>`, `counter:<max>` or `stack:<max>:<x,y,...>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AnyService {
    Register(BooleanRegister),
    Counter(BoundedCounter),
    Stack(BoundedStack),
}

impl Service for AnyService {
    fn reply(&self, method: &str) -> u64 {
        match self {
            AnyService::Register(s) => s.reply(method),
            AnyService::Counter(s) => s.reply(method),
            AnyService::Stack(s) => s.reply(method),
        }
    }

    fn derive(&self, method: &str) -> Self {
        match self {
            AnyService::Register(s) => AnyService::Register(s.derive(method)),
            AnyService::Counter(s) => AnyService::Counter(s.derive(method)),
            AnyService::Stack(s) => AnyService::Stack(s.derive(method)),
        }
    }

    fn methods(&self) -> Vec<String> {
        match self {
            AnyService::Register(s) => s.methods(),
            AnyService::Counter(s) => s.methods(),
            AnyService::Stack(s) => s.methods(),
        }
    }
}

impl FromStr for AnyService {
    type Err = ServiceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ServiceError::BadDescriptor(s.to_string());
        let mut parts = s.splitn(3, ':');
        match (parts.next(), parts.next(), parts.next()) {
            (Some("br"), Some(init), None) => {
                let state = match init {
                    "t" => RegisterState::True,
                    "f" => RegisterState::False,
                    "b" => RegisterState::Blocked,
                    _ => return Err(bad()),
                };
                Ok(AnyService::Register(boolean_register(state)))
            }
            (Some("counter"), Some(max), None) => {
                Ok(AnyService::Counter(BoundedCounter::new(max.parse().map_err(|_| bad())?)))
            }
            (Some("stack"), Some(max), Some(alphabet)) => {
                let max = max.parse().map_err(|_| bad())?;
                let alphabet: Vec<String> = alphabet.split(',').map(str::to_string).collect();
                if alphabet.iter().any(|x| !is_ident(x)) {
                    return Err(bad());
                }
                Ok(AnyService::Stack(BoundedStack::new(max, alphabet)))
            }
            _ => Err(bad()),
        }
    }
}

/// A `focus=descriptor` service attachment.
pub fn parse_attachment(s: &str) -> Result<(String, AnyService), ServiceError> {
    let (focus, descriptor) = s
        .split_once('=')
        .ok_or_else(|| ServiceError::BadDescriptor(s.to_string()))?;
    if !is_ident(focus) {
        return Err(ServiceError::BadDescriptor(s.to_string()));
    }
    Ok((focus.to_string(), descriptor.parse()?))
}

/// `a /f h`: every `f.m` switch of `a` is processed by `h`. A reply `i` within
/// the switch's arity becomes a `tau` step to the `i`-th target with the
/// derived service; any other reply (including 0) deadlocks.
pub fn use_thread<S: Service>(
    a: &ThreadAutomaton,
    focus: &str,
    h: &S,
    state_bound: usize,
) -> Result<ThreadAutomaton, ServiceError> {
    let mut b = ThreadBuilder::new();
    let mut ids: HashMap<(StateId, S), StateId> = HashMap::new();
    let mut queue: VecDeque<(StateId, S, StateId)> = VecDeque::new();

    let mut intern = |key: (StateId, S), b: &mut ThreadBuilder, queue: &mut VecDeque<_>| {
        if let Some(&id) = ids.get(&key) {
            return Ok(id);
        }
        if ids.len() >= state_bound {
            return Err(ServiceError::StateBoundExceeded { bound: state_bound });
        }
        let id = b.reserve();
        queue.push_back((key.0, key.1.clone(), id));
        ids.insert(key, id);
        Ok(id)
    };

    let root = intern((a.root(), h.clone()), &mut b, &mut queue)?;
    while let Some((t, service, id)) = queue.pop_front() {
        let state = match a.state(t) {
            ThreadState::Stop => ThreadState::Stop,
            ThreadState::Dead => ThreadState::Dead,
            ThreadState::Switch { action, targets } => match action {
                BasicAction::Interaction { focus: g, method } if g == focus => {
                    let reply = service.reply(method);
                    match usize::try_from(reply) {
                        Ok(i) if i >= 1 && i <= targets.len() => {
                            let next = intern((targets[i - 1], service.derive(method)), &mut b, &mut queue)?;
                            ThreadState::switch(BasicAction::Tau, vec![next])
                        }
                        _ => ThreadState::Dead,
                    }
                }
                _ => {
                    let targets = targets
                        .iter()
                        .map(|&x| intern((x, service.clone()), &mut b, &mut queue))
                        .collect::<Result<Vec<_>, _>>()?;
                    ThreadState::switch(action.clone(), targets)
                }
            },
        };
        b.define(id, state);
    }
    let result = b.build(root).expect("every product state is defined");
    Ok(normalize(&result))
}
