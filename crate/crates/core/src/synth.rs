//! Synthesis of PGLDmr programs from linear process specifications, and the
//! transformation into programs in which every basic instruction occurs at
//! most once, using Boolean registers to tell occurrences apart.

use std::collections::HashMap;

use thiserror::Error;

use crate::lps::{LinearProcessSpec, Summand};
use crate::lts::ActionLabel;
use crate::pga::BasicInstruction;
use crate::pgld::{PgldInstruction, PgldProgram};
use crate::syntax::is_atomic_action;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("equation for `{0}` has a delta summand")]
    DeltaSummand(String),
    #[error("equation for `{0}` has no summands")]
    EmptyEquation(String),
    #[error("`{0}` is not a plain atomic action")]
    NonAtomic(String),
    #[error("auxiliary action `{0}` already occurs in the specification")]
    TactCollision(String),
    #[error("program is not in block form at instruction {position}: {reason}")]
    NotBlockForm { position: usize, reason: String },
}

/// Step summands (action, target index) and terminate summands of one
/// equation, steps first.
struct Equation {
    steps: Vec<(String, usize)>,
    terms: Vec<String>,
}

fn atomic(l: &ActionLabel) -> Result<String, SynthError> {
    match l {
        ActionLabel::Atomic(e) => Ok(e.clone()),
        other => Err(SynthError::NonAtomic(other.to_string())),
    }
}

fn equations(e: &LinearProcessSpec) -> Result<Vec<Equation>, SynthError> {
    e.equations()
        .iter()
        .map(|(x, summands)| {
            if summands.is_empty() {
                return Err(SynthError::EmptyEquation(x.clone()));
            }
            let mut eq = Equation {
                steps: Vec::new(),
                terms: Vec::new(),
            };
            for s in summands {
                match s {
                    Summand::Step(l, y) => {
                        let target = e.index_of(y).expect("specification targets are bound");
                        eq.steps.push((atomic(l)?, target));
                    }
                    Summand::Terminate(l) => eq.terms.push(atomic(l)?),
                    Summand::Delta => return Err(SynthError::DeltaSummand(x.clone())),
                }
            }
            Ok(eq)
        })
        .collect()
}

/// 1-based start position of each block given the block sizes.
fn block_starts(sizes: impl IntoIterator<Item = usize>) -> Vec<u64> {
    let mut next = 1u64;
    sizes
        .into_iter()
        .map(|n| {
            let start = next;
            next += n as u64;
            start
        })
        .collect()
}

/// One block per equation: `+[k+l]ac(steps.., terms..)` followed by a jump
/// per reply, to the target's block for a step and `##0` for a terminate
/// summand. The root equation's block comes first.
pub fn synth_multireply(e: &LinearProcessSpec) -> Result<PgldProgram, SynthError> {
    let eqs = equations(e)?;
    let starts = block_starts(eqs.iter().map(|q| 1 + q.steps.len() + q.terms.len()));
    let mut out = Vec::new();
    for q in &eqs {
        let actions = q.steps.iter().map(|(a, _)| a.clone()).chain(q.terms.iter().cloned());
        let n = (q.steps.len() + q.terms.len()) as u32;
        out.push(PgldInstruction::PosMultiTest(n, BasicInstruction::Construct(actions.collect())));
        out.extend(q.steps.iter().map(|&(_, y)| PgldInstruction::AbsJump(starts[y])));
        out.extend(q.terms.iter().map(|_| PgldInstruction::AbsJump(0)));
    }
    Ok(PgldProgram::new(out).expect("specifications have at least one equation"))
}

/// One chain per equation with a link `+ac(e,tact) ; ##target ; ##next` per
/// summand (`##0` as the target of a terminate summand). The last link's
/// false branch returns to the head of its chain.
pub fn synth_binary(e: &LinearProcessSpec, tact: &str) -> Result<PgldProgram, SynthError> {
    if !is_atomic_action(tact) {
        return Err(SynthError::NonAtomic(tact.to_string()));
    }
    let eqs = equations(e)?;
    let used = eqs
        .iter()
        .flat_map(|q| q.steps.iter().map(|(a, _)| a).chain(&q.terms));
    if used.into_iter().any(|a| a == tact) {
        return Err(SynthError::TactCollision(tact.to_string()));
    }
    let starts = block_starts(eqs.iter().map(|q| 3 * (q.steps.len() + q.terms.len())));
    let mut out = Vec::new();
    for (q, &head) in eqs.iter().zip(&starts) {
        let links: Vec<(&String, u64)> = q
            .steps
            .iter()
            .map(|(a, y)| (a, starts[*y]))
            .chain(q.terms.iter().map(|a| (a, 0)))
            .collect();
        for (j, (a, target)) in links.iter().enumerate() {
            let next = if j + 1 < links.len() { head + 3 * (j as u64 + 1) } else { head };
            out.push(PgldInstruction::PosTest(BasicInstruction::construct([a.as_str(), tact])));
            out.push(PgldInstruction::AbsJump(*target));
            out.push(PgldInstruction::AbsJump(next));
        }
    }
    Ok(PgldProgram::new(out).expect("specifications have at least one equation"))
}

/// Name of the `j`-th register focus (1-based).
pub fn register_focus(j: usize) -> String {
    format!("br{j}")
}

/// Symbolic jump targets resolved in a second layout pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Label {
    Terminate,
    /// Entry point of original block `b`.
    Block(usize),
    /// The single occurrence of shared group `g`.
    Shared(usize),
    /// Register read `r` of the dispatch chain of group `g` on branch `true`.
    Read(usize, bool, usize),
    /// Reset of register site `s` on branch `true`/`false`.
    Reset(usize, bool),
}

enum Item {
    Test(BasicInstruction),
    Plain(BasicInstruction),
    Jump(Label),
}

/// Original block `b`: the construct instruction and both continuations, as
/// block indices (`None` = terminate).
struct Block {
    instruction: BasicInstruction,
    on_true: Option<usize>,
    on_false: Option<usize>,
}

fn parse_blocks(p: &PgldProgram) -> Result<Vec<Block>, SynthError> {
    let k = p.len();
    let bad = |position: usize, reason: &str| SynthError::NotBlockForm {
        position,
        reason: reason.to_string(),
    };
    if !k.is_multiple_of(3) {
        return Err(bad(k, "length is not a multiple of 3"));
    }
    let target = |position: usize, l: u64| -> Result<Option<usize>, SynthError> {
        if l == 0 || l > k as u64 {
            Ok(None)
        } else if (l - 1).is_multiple_of(3) {
            Ok(Some(((l - 1) / 3) as usize))
        } else {
            Err(bad(position, "jump into the middle of a block"))
        }
    };
    p.instructions()
        .chunks(3)
        .enumerate()
        .map(|(b, chunk)| {
            let pos = 3 * b + 1;
            let instruction = match &chunk[0] {
                PgldInstruction::PosTest(i @ BasicInstruction::Construct(actions)) if actions.len() == 2 => i.clone(),
                _ => return Err(bad(pos, "expected a positive test on a binary construct")),
            };
            let jump = |u: &PgldInstruction, at: usize| match u {
                PgldInstruction::AbsJump(l) => target(at, *l),
                _ => Err(bad(at, "expected an absolute jump")),
            };
            Ok(Block {
                instruction,
                on_true: jump(&chunk[1], pos + 1)?,
                on_false: jump(&chunk[2], pos + 2)?,
            })
        })
        .collect()
}

/// Rewrite a program in block form so that each construct instruction occurs
/// once. Each occurrence site of a shared instruction gets its own Boolean
/// register `br<j>` (initially False): the site sets it and jumps to the
/// single shared test, whose outcome is dispatched on the registers to a
/// reset of the set register followed by the site's original continuation.
/// Returns the program and the number of registers. Instructions that are
/// not shared are kept in place, so a program without sharing is unchanged.
pub fn to_single_occurrence(p: &PgldProgram) -> Result<(PgldProgram, usize), SynthError> {
    let blocks = parse_blocks(p)?;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of: HashMap<&BasicInstruction, usize> = HashMap::new();
    for (b, block) in blocks.iter().enumerate() {
        let g = *group_of.entry(&block.instruction).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(b);
    }
    if groups.iter().all(|sites| sites.len() == 1) {
        return Ok((p.clone(), 0));
    }
    // register number (1-based) of each shared site, in block order
    let mut register: HashMap<usize, usize> = HashMap::new();
    for (b, block) in blocks.iter().enumerate() {
        if groups[group_of[&block.instruction]].len() > 1 {
            let next = register.len() + 1;
            register.insert(b, next);
        }
    }
    let to_label = |t: Option<usize>| t.map_or(Label::Terminate, Label::Block);
    let mut layout: Vec<(Option<Label>, Item)> = Vec::new();
    let mut emit = |label: Option<Label>, item: Item| layout.push((label, item));

    for (b, block) in blocks.iter().enumerate() {
        let g = group_of[&block.instruction];
        if let Some(&r) = register.get(&b) {
            emit(Some(Label::Block(b)), Item::Plain(BasicInstruction::interaction(register_focus(r), "set:T")));
            emit(None, Item::Jump(Label::Shared(g)));
        } else {
            emit(Some(Label::Block(b)), Item::Test(block.instruction.clone()));
            emit(None, Item::Jump(to_label(block.on_true)));
            emit(None, Item::Jump(to_label(block.on_false)));
        }
    }
    for (g, sites) in groups.iter().enumerate() {
        if sites.len() < 2 {
            continue;
        }
        emit(Some(Label::Shared(g)), Item::Test(blocks[sites[0]].instruction.clone()));
        emit(None, Item::Jump(Label::Read(g, true, 0)));
        emit(None, Item::Jump(Label::Read(g, false, 0)));
        for branch in [true, false] {
            // exactly one register of the group is set, so the last site
            // needs no read
            let last = sites.len() - 1;
            for (j, &s) in sites[..last].iter().enumerate() {
                let r = register[&s];
                emit(
                    Some(Label::Read(g, branch, j)),
                    Item::Test(BasicInstruction::interaction(register_focus(r), "get")),
                );
                emit(None, Item::Jump(Label::Reset(s, branch)));
                let next = if j + 1 < last { Label::Read(g, branch, j + 1) } else { Label::Reset(sites[last], branch) };
                emit(None, Item::Jump(next));
            }
        }
        for &s in sites {
            for branch in [true, false] {
                let r = register[&s];
                let cont = if branch { blocks[s].on_true } else { blocks[s].on_false };
                emit(
                    Some(Label::Reset(s, branch)),
                    Item::Plain(BasicInstruction::interaction(register_focus(r), "set:F")),
                );
                emit(None, Item::Jump(to_label(cont)));
            }
        }
    }

    let mut position: HashMap<Label, u64> = HashMap::new();
    for (i, (label, _)) in layout.iter().enumerate() {
        if let Some(l) = label {
            position.insert(*l, i as u64 + 1);
        }
    }
    let out = layout
        .into_iter()
        .map(|(_, item)| match item {
            Item::Test(b) => PgldInstruction::PosTest(b),
            Item::Plain(b) => PgldInstruction::Plain(b),
            Item::Jump(Label::Terminate) => PgldInstruction::AbsJump(0),
            Item::Jump(l) => PgldInstruction::AbsJump(position[&l]),
        })
        .collect();
    Ok((PgldProgram::new(out).expect("nonempty layout"), register.len()))
}
