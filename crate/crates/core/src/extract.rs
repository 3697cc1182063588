//! Thread extraction: the thread produced by executing a canonical instruction
//! sequence.
//!
//! Positions of the ω-part are quotiented by their offset into the period, so
//! every sequence has finitely many positions and an infinite chain of jumps
//! shows up as a revisited position.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::pga::{InstructionSequence, PrimitiveInstruction};
use crate::thread::{normalize, BasicAction, StateId, ThreadAutomaton, ThreadBuilder, ThreadState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PositionRef {
    /// 1-based index into the prefix.
    Prefix(usize),
    /// 0-based offset into the period.
    Period(usize),
}

/// Where a chase through jump instructions ends up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Resolved {
    /// A position holding a basic or test instruction.
    At(PositionRef),
    Stop,
    Dead,
}

impl PositionRef {
    /// The position with 1-based index `pos` in the ω-unrolled sequence, or
    /// `None` past the end of a finite sequence.
    pub fn from_index(s: &InstructionSequence, pos: usize) -> Option<Self> {
        let p = s.prefix().len();
        if pos >= 1 && pos <= p {
            return Some(PositionRef::Prefix(pos));
        }
        let period = s.period()?;
        if pos == 0 {
            return None;
        }
        Some(PositionRef::Period((pos - p - 1) % period.len()))
    }

    /// A representative 1-based index.
    pub fn index(self, s: &InstructionSequence) -> usize {
        match self {
            PositionRef::Prefix(i) => i,
            PositionRef::Period(o) => s.prefix().len() + 1 + o,
        }
    }

    /// The position `by` instructions further on.
    pub fn advance(self, s: &InstructionSequence, by: u64) -> Option<Self> {
        let p = s.prefix().len() as u128;
        let target = self.index(s) as u128 + u128::from(by);
        if target <= p {
            return Some(PositionRef::Prefix(target as usize));
        }
        let q = s.period()?.len() as u128;
        Some(PositionRef::Period(((target - p - 1) % q) as usize))
    }

    pub fn instruction(self, s: &InstructionSequence) -> &PrimitiveInstruction {
        match self {
            PositionRef::Prefix(i) => &s.prefix()[i - 1],
            PositionRef::Period(o) => &s.period().expect("period position without period")[o],
        }
    }
}

/// Chase forward jumps starting at `pos`. `#0`, a jump past the end of a
/// finite sequence, and a jump chain that revisits a position all yield
/// `Dead`; `!` yields `Stop`.
pub fn resolve(s: &InstructionSequence, pos: Option<PositionRef>) -> Resolved {
    let mut visited = HashSet::new();
    let mut cur = pos;
    loop {
        let Some(p) = cur else { return Resolved::Dead };
        match p.instruction(s) {
            PrimitiveInstruction::Halt => return Resolved::Stop,
            PrimitiveInstruction::FwdJump(0) => return Resolved::Dead,
            PrimitiveInstruction::FwdJump(l) => {
                if !visited.insert(p) {
                    return Resolved::Dead;
                }
                cur = p.advance(s, *l);
            }
            _ => return Resolved::At(p),
        }
    }
}

/// The thread produced by `s`, normalized. The result has at most
/// `|prefix| + |period| + 2` states.
pub fn extract_thread(s: &InstructionSequence) -> ThreadAutomaton {
    let mut ex = Extractor {
        seq: s,
        builder: ThreadBuilder::new(),
        ids: HashMap::new(),
        queue: VecDeque::new(),
    };
    let root = ex.state(resolve(s, PositionRef::from_index(s, 1)));
    while let Some((p, id)) = ex.queue.pop_front() {
        let state = ex.switch_at(p);
        ex.builder.define(id, state);
    }
    let a = ex.builder.build(root).expect("extraction defines every reserved state");
    normalize(&a)
}

struct Extractor<'a> {
    seq: &'a InstructionSequence,
    builder: ThreadBuilder,
    ids: HashMap<Resolved, StateId>,
    queue: VecDeque<(PositionRef, StateId)>,
}

impl Extractor<'_> {
    fn state(&mut self, r: Resolved) -> StateId {
        if let Some(&id) = self.ids.get(&r) {
            return id;
        }
        let id = match r {
            Resolved::Stop => self.builder.stop(),
            Resolved::Dead => self.builder.dead(),
            Resolved::At(p) => {
                let id = self.builder.reserve();
                self.queue.push_back((p, id));
                id
            }
        };
        self.ids.insert(r, id);
        id
    }

    /// State for the instruction `by` positions after `p`.
    fn next(&mut self, p: PositionRef, by: u64) -> StateId {
        let r = resolve(self.seq, p.advance(self.seq, by));
        self.state(r)
    }

    fn switch_at(&mut self, p: PositionRef) -> ThreadState {
        use PrimitiveInstruction::*;
        let last = p.advance(self.seq, 1).is_none();
        let (b, arity, negative) = match p.instruction(self.seq) {
            Plain(b) => {
                let next = self.next(p, 1);
                return ThreadState::prefix(BasicAction::from(b), next);
            }
            PosTest(b) => (b, 2, false),
            NegTest(b) => (b, 2, true),
            PosMultiTest(n, b) => (b, *n, false),
            NegMultiTest(n, b) => (b, *n, true),
            FwdJump(_) | Halt => unreachable!("resolve never stops at a jump or `!`"),
        };
        let action = BasicAction::from(b);
        if last {
            // a test with no next instruction behaves as `a ∘ D`
            let dead = self.state(Resolved::Dead);
            return ThreadState::prefix(action, dead);
        }
        let mut targets: Vec<StateId> = (1..=u64::from(arity)).map(|i| self.next(p, i)).collect();
        if negative {
            targets.reverse();
        }
        ThreadState::switch(action, targets)
    }
}
