//! Process extraction from thread automata and the process-level use
//! operator.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::lts::{merge_encapsulated, rename, abstract_where, ActionLabel, Data, Lts, LtsBuilder, LtsState};
use crate::service::{Service, ServiceError};
use crate::thread::{normalize, BasicAction, ThreadAutomaton, ThreadState};

/// `⦇a⦈_c`: the process of `a` that performs `stop` just before terminating.
/// The automaton is normalized first.
pub fn pextr_c(a: &ThreadAutomaton) -> Lts {
    let a = normalize(a);
    let mut b = LtsBuilder::new();
    for _ in a.states() {
        b.state(false);
    }
    let terminated = b.state(true);
    let deadlock = b.state(false);
    for (s, state) in a.states().iter().enumerate() {
        match state {
            ThreadState::Stop => b.edge(s, ActionLabel::Stop, terminated),
            ThreadState::Dead => b.edge(s, ActionLabel::I, deadlock),
            ThreadState::Switch { action, targets } => match action {
                BasicAction::Tau => {
                    let mid = b.state(false);
                    b.edge(s, ActionLabel::I, mid);
                    b.edge(mid, ActionLabel::I, targets[0]);
                }
                BasicAction::Interaction { focus, method } => {
                    let mid = b.state(false);
                    b.edge(s, ActionLabel::snd(focus.clone(), Data::Method(method.clone())), mid);
                    for (j, &t) in targets.iter().enumerate() {
                        b.edge(mid, ActionLabel::rcv(focus.clone(), Data::Reply(j as u64 + 1)), t);
                    }
                }
                BasicAction::Construct(actions) => {
                    for (e, &t) in actions.iter().zip(targets) {
                        b.edge(s, ActionLabel::Atomic(e.clone()), t);
                    }
                }
            },
        }
    }
    b.build(a.root())
}

/// `⦇a⦈ = τ_{stop}(⦇a⦈_c)`.
pub fn pextr(a: &ThreadAutomaton) -> Lts {
    abstract_stop(&pextr_c(a))
}

/// `τ_{stop}(p)`.
pub fn abstract_stop(p: &Lts) -> Lts {
    abstract_where(p, |l| *l == ActionLabel::Stop)
}

/// `⦇h⦈_c` over the service's declared methods.
pub fn service_lts<S: Service>(h: &S, bound: usize) -> Result<Lts, ServiceError> {
    service_lts_over(h, &h.methods(), bound)
}

/// `⦇h⦈_c` summing over `methods`: from every reachable service state,
/// `rcv_s(m)` then `snd_s(reply)` into the derived state, or `stop_bar` into
/// a terminated state.
pub fn service_lts_over<S: Service>(h: &S, methods: &[String], bound: usize) -> Result<Lts, ServiceError> {
    let mut b = LtsBuilder::new();
    let terminated = b.state(true);
    let mut ids: HashMap<S, LtsState> = HashMap::new();
    let mut queue = VecDeque::new();
    let root = b.state(false);
    ids.insert(h.clone(), root);
    queue.push_back(h.clone());
    while let Some(s) = queue.pop_front() {
        let from = ids[&s];
        b.edge(from, ActionLabel::StopBar, terminated);
        for m in methods {
            let derived = s.derive(m);
            let to = match ids.get(&derived) {
                Some(&id) => id,
                None => {
                    if ids.len() >= bound {
                        return Err(ServiceError::StateBoundExceeded { bound });
                    }
                    let id = b.state(false);
                    ids.insert(derived.clone(), id);
                    queue.push_back(derived);
                    id
                }
            };
            let mid = b.state(false);
            b.edge(from, ActionLabel::ServiceRcv(m.clone()), mid);
            b.edge(mid, ActionLabel::ServiceSnd(s.reply(m)), to);
        }
    }
    Ok(b.build(root))
}

/// Methods `m` such that `snd_f(m)` labels a transition of `p`.
fn methods_sent(p: &Lts, focus: &str) -> BTreeSet<String> {
    p.transitions()
        .iter()
        .filter_map(|(_, l, _)| match l {
            ActionLabel::Snd {
                focus: f,
                data: Data::Method(m),
            } if f == focus => Some(m.clone()),
            _ => None,
        })
        .collect()
}

/// `ρ_{stop*↦stop}(∂_{stop,stop_bar}(∂_{A_f}(lc ∥ ρ_{R_f}(⦇h⦈_c))))` for a
/// process `lc` at the `⦇·⦈_c` level. The service sums over its declared
/// methods plus any method `lc` sends on `focus`, so an undeclared method is
/// answered with reply 0 exactly as at the thread level.
pub fn use_process_lts<S: Service>(lc: &Lts, focus: &str, h: &S, bound: usize) -> Result<Lts, ServiceError> {
    let mut methods = h.methods();
    for m in methods_sent(lc, focus) {
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    let service = service_lts_over(h, &methods, bound)?;
    let service = rename(&service, |l| match l {
        ActionLabel::ServiceSnd(r) => ActionLabel::snd(focus, Data::Reply(*r)),
        ActionLabel::ServiceRcv(m) => ActionLabel::rcv(focus, Data::Method(m.clone())),
        other => other.clone(),
    });
    let blocked = |l: &ActionLabel| l.on_focus(focus) || matches!(l, ActionLabel::Stop | ActionLabel::StopBar);
    let merged = merge_encapsulated(lc, &service, &blocked, bound)
        .map_err(|bound| ServiceError::StateBoundExceeded { bound })?;
    Ok(rename(&merged, |l| match l {
        ActionLabel::StopStar => ActionLabel::Stop,
        other => other.clone(),
    }))
}

/// `⦇a /f h⦈_c` computed at the process level, from `⦇a⦈_c`.
pub fn use_process<S: Service>(a: &ThreadAutomaton, focus: &str, h: &S, bound: usize) -> Result<Lts, ServiceError> {
    use_process_lts(&pextr_c(a), focus, h, bound)
}
