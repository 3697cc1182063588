//! Random generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use isaw_core::lps::{LinearProcessSpec, Summand};
use isaw_core::lts::{ActionLabel, Data, Lts, LtsBuilder};
use isaw_core::pga::{BasicInstruction, PgaTerm, PrimitiveInstruction};
use isaw_core::pgld::{PgldInstruction, PgldProgram};
use isaw_core::thread::{BasicAction, StateId, ThreadAutomaton, ThreadBuilder, ThreadState};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

const ATOMS: [&str; 5] = ["a", "b", "c", "d", "e"];

pub fn random_basic(r: &mut StdRng) -> BasicInstruction {
    match r.gen_range(0..4) {
        0 => BasicInstruction::interaction("f", ["m", "n"].choose(r).unwrap().to_string()),
        1 => BasicInstruction::construct([*ATOMS[..3].choose(r).unwrap()]),
        _ => {
            let n = r.gen_range(1..=3);
            BasicInstruction::construct((0..n).map(|_| *ATOMS[..3].choose(r).unwrap()))
        }
    }
}

pub fn random_primitive(r: &mut StdRng) -> PrimitiveInstruction {
    use PrimitiveInstruction::*;
    match r.gen_range(0..8) {
        0 | 1 => Plain(random_basic(r)),
        2 => PosTest(random_basic(r)),
        3 => NegTest(random_basic(r)),
        4 => PosMultiTest(r.gen_range(1..=3), random_basic(r)),
        5 => NegMultiTest(r.gen_range(1..=3), random_basic(r)),
        6 => FwdJump(r.gen_range(0..=4)),
        _ => Halt,
    }
}

/// A random closed term of nesting depth at most `depth`.
pub fn random_term(r: &mut StdRng, depth: u32) -> PgaTerm {
    if depth == 0 || r.gen_bool(0.3) {
        return PgaTerm::Instr(random_primitive(r));
    }
    match r.gen_range(0..5) {
        0 | 1 => random_term(r, depth - 1).concat(random_term(r, depth - 1)),
        2 => random_term(r, depth - 1).power(r.gen_range(1..=3)),
        _ => random_term(r, depth - 1).repeat(),
    }
}

/// The first `n` instructions of a term, by direct unfolding, and whether
/// the term is finite.
pub fn unroll(t: &PgaTerm, n: usize) -> (Vec<PrimitiveInstruction>, bool) {
    match t {
        PgaTerm::Instr(u) => (vec![u.clone()], true),
        PgaTerm::Concat(a, b) => {
            let (mut xs, fin) = unroll(a, n);
            if !fin {
                return (xs, false);
            }
            if xs.len() < n {
                let (ys, fin_b) = unroll(b, n - xs.len());
                xs.extend(ys);
                (xs, fin_b)
            } else {
                // `a` alone fills the window; finiteness still depends on `b`
                (xs, unroll(b, 1).1)
            }
        }
        PgaTerm::Power(a, k) => {
            let mut t = (**a).clone();
            for _ in 1..*k {
                t = t.concat((**a).clone());
            }
            unroll(&t, n)
        }
        PgaTerm::Repeat(a) => {
            let (xs, fin) = unroll(a, n);
            if !fin {
                return (xs, false);
            }
            let mut out = Vec::with_capacity(n);
            while out.len() < n {
                out.extend(xs.iter().cloned());
            }
            out.truncate(n);
            (out, false)
        }
    }
}

/// A random PGLDmr program of length `1..=max_len`. Multi-reply windows stay
/// within `k + 2` so every reply lands inside the program or on one of the
/// two appended halts.
pub fn random_pgld(r: &mut StdRng, max_len: usize) -> PgldProgram {
    let k = r.gen_range(1..=max_len);
    let instrs = (1..=k)
        .map(|j| {
            let window = (k + 2 - j) as u32;
            match r.gen_range(0..7) {
                0 => PgldInstruction::Plain(random_basic(r)),
                1 => PgldInstruction::PosTest(random_basic(r)),
                2 => PgldInstruction::NegTest(random_basic(r)),
                3 => PgldInstruction::PosMultiTest(r.gen_range(1..=window.min(4)), random_basic(r)),
                4 => PgldInstruction::NegMultiTest(r.gen_range(1..=window.min(4)), random_basic(r)),
                5 if r.gen_bool(0.3) => PgldInstruction::AbsJump(j as u64),
                _ => PgldInstruction::AbsJump(r.gen_range(0..=k as u64 + 2)),
            }
        })
        .collect();
    PgldProgram::new(instrs).unwrap()
}

/// The thread of a PGLDmr program read directly off the instruction list:
/// execution at position `j`, jumps to absolute positions, termination when
/// control leaves the program or jumps to 0, deadlock on a jump cycle.
pub fn pgld_oracle(p: &PgldProgram) -> ThreadAutomaton {
    let k = p.len();
    let mut b = ThreadBuilder::new();
    let stop = b.stop();
    let dead = b.dead();
    let mut ids: HashMap<usize, StateId> = HashMap::new();
    let mut pending = Vec::new();

    // follow absolute jumps from position `j`
    let land = |j: usize| -> Result<usize, StateId> {
        let mut seen = HashSet::new();
        let mut j = j;
        loop {
            if j == 0 || j > k {
                return Err(stop);
            }
            match p.get(j).unwrap() {
                PgldInstruction::AbsJump(l) => {
                    if !seen.insert(j) {
                        return Err(dead);
                    }
                    j = *l as usize;
                    if *l > k as u64 {
                        return Err(stop);
                    }
                }
                _ => return Ok(j),
            }
        }
    };
    let mut state_of = |j: usize, b: &mut ThreadBuilder, pending: &mut Vec<usize>| match land(j) {
        Err(s) => s,
        Ok(pos) => *ids.entry(pos).or_insert_with(|| {
            pending.push(pos);
            b.reserve()
        }),
    };
    let root = state_of(1, &mut b, &mut pending);
    let mut defined = HashSet::new();
    while let Some(j) = pending.pop() {
        if !defined.insert(j) {
            continue;
        }
        let (action, replies, negative, plain) = match p.get(j).unwrap() {
            PgldInstruction::Plain(u) => (u, 1, false, true),
            PgldInstruction::PosTest(u) => (u, 2, false, false),
            PgldInstruction::NegTest(u) => (u, 2, true, false),
            PgldInstruction::PosMultiTest(n, u) => (u, *n as usize, false, false),
            PgldInstruction::NegMultiTest(n, u) => (u, *n as usize, true, false),
            PgldInstruction::AbsJump(_) => unreachable!(),
        };
        let action = BasicAction::from(action);
        let id = state_of(j, &mut b, &mut pending);
        let state = if plain {
            ThreadState::prefix(action, state_of(j + 1, &mut b, &mut pending))
        } else {
            let mut targets: Vec<StateId> = (1..=replies).map(|i| state_of(j + i, &mut b, &mut pending)).collect();
            if negative {
                targets.reverse();
            }
            ThreadState::switch(action, targets)
        };
        b.define(id, state);
    }
    isaw_core::normalize(&b.build(root).unwrap())
}

pub fn random_action(r: &mut StdRng, interactions: &[(&str, &str)]) -> BasicAction {
    let pick = r.gen_range(0..10);
    if pick == 0 {
        BasicAction::Tau
    } else if pick <= 4 && !interactions.is_empty() {
        let (f, m) = interactions.choose(r).unwrap();
        BasicAction::interaction(*f, *m)
    } else {
        let n = r.gen_range(1..=3);
        BasicAction::construct((0..n).map(|_| *ATOMS[..3].choose(r).unwrap()))
    }
}

/// A random automaton with at most `max_states` states. With `exact_arity`
/// false, switch arities are arbitrary (not normalized).
pub fn random_automaton(
    r: &mut StdRng,
    max_states: usize,
    interactions: &[(&str, &str)],
    exact_arity: bool,
) -> ThreadAutomaton {
    let n = r.gen_range(1..=max_states);
    let states = (0..n)
        .map(|_| match r.gen_range(0..10) {
            0 => ThreadState::Stop,
            1 => ThreadState::Dead,
            _ => {
                let action = random_action(r, interactions);
                let arity = match (&action, exact_arity) {
                    (BasicAction::Tau, true) => 1,
                    (BasicAction::Construct(es), true) => es.len(),
                    _ => r.gen_range(1..=3),
                };
                ThreadState::switch(action, (0..arity).map(|_| r.gen_range(0..n)).collect())
            }
        })
        .collect();
    ThreadAutomaton::new(states, 0).unwrap()
}

/// A random automaton over two foci using the register methods.
pub fn register_automaton(r: &mut StdRng, max_states: usize) -> ThreadAutomaton {
    random_automaton(
        r,
        max_states,
        &[("br", "get"), ("br", "set:T"), ("br", "set:F"), ("g", "m")],
        true,
    )
}

/// A random linear process specification without delta summands:
/// up to 6 variables, up to 5 actions, up to 3 steps and 2 terminations per
/// equation, at least one summand each.
pub fn random_lps(r: &mut StdRng) -> LinearProcessSpec {
    let vars = r.gen_range(1..=6);
    let actions = &ATOMS[..r.gen_range(1..=5)];
    let equations = (0..vars)
        .map(|i| {
            let mut summands = Vec::new();
            loop {
                for _ in 0..r.gen_range(0..=3) {
                    let e = ActionLabel::atomic(*actions.choose(r).unwrap());
                    summands.push(Summand::Step(e, format!("X{}", r.gen_range(0..vars))));
                }
                for _ in 0..r.gen_range(0..=2) {
                    summands.push(Summand::Terminate(ActionLabel::atomic(*actions.choose(r).unwrap())));
                }
                if !summands.is_empty() {
                    break;
                }
            }
            (format!("X{i}"), summands)
        })
        .collect();
    LinearProcessSpec::new(equations).unwrap()
}

/// A random LTS with at most `max_states` states over a small alphabet.
pub fn random_lts(r: &mut StdRng, max_states: usize) -> Lts {
    let labels = [
        ActionLabel::atomic("a"),
        ActionLabel::atomic("b"),
        ActionLabel::Tau,
        ActionLabel::I,
        ActionLabel::snd("f", Data::Method("m".into())),
        ActionLabel::rcv("f", Data::Method("m".into())),
        ActionLabel::Stop,
        ActionLabel::StopBar,
    ];
    let n = r.gen_range(1..=max_states);
    let mut b = LtsBuilder::new();
    for _ in 0..n {
        b.state(r.gen_bool(0.25));
    }
    for _ in 0..r.gen_range(0..=2 * n) {
        let l = labels.choose(r).unwrap().clone();
        b.edge(r.gen_range(0..n), l, r.gen_range(0..n));
    }
    b.build(0)
}

/// Process extraction read directly off the k-ary equations, without
/// normalizing first: a mismatched `ac` switch drops surplus targets or sends
/// surplus choices to `i·δ`, and a `tau` switch of any arity takes its first
/// target.
pub fn direct_pextr_c(a: &ThreadAutomaton) -> Lts {
    let mut b = LtsBuilder::new();
    for _ in a.states() {
        b.state(false);
    }
    let done = b.state(true);
    let deadlock = b.state(false);
    let internal_dead = b.state(false);
    b.edge(internal_dead, ActionLabel::I, deadlock);
    for (s, state) in a.states().iter().enumerate() {
        match state {
            ThreadState::Stop => b.edge(s, ActionLabel::Stop, done),
            ThreadState::Dead => b.edge(s, ActionLabel::I, deadlock),
            ThreadState::Switch { action, targets } => match action {
                BasicAction::Tau => {
                    let m = b.state(false);
                    b.edge(s, ActionLabel::I, m);
                    b.edge(m, ActionLabel::I, targets[0]);
                }
                BasicAction::Interaction { focus, method } => {
                    let m = b.state(false);
                    b.edge(s, ActionLabel::snd(focus.clone(), Data::Method(method.clone())), m);
                    for (j, &t) in targets.iter().enumerate() {
                        b.edge(m, ActionLabel::rcv(focus.clone(), Data::Reply(j as u64 + 1)), t);
                    }
                }
                BasicAction::Construct(es) => {
                    for (j, e) in es.iter().enumerate() {
                        let t = targets.get(j).copied().unwrap_or(internal_dead);
                        b.edge(s, ActionLabel::atomic(e.clone()), t);
                    }
                }
            },
        }
    }
    b.build(a.root())
}

/// Number of instructions whose basic instruction mentions atomic action `e`.
pub fn occurrences(p: &PgldProgram, e: &str) -> usize {
    p.instructions()
        .iter()
        .filter(|u| matches!(u.basic(), Some(BasicInstruction::Construct(es)) if es.iter().any(|x| x == e)))
        .count()
}
