//! PGLDmr: programs with absolute jumps and implicit termination past the end,
//! and their translation into PGAmr.

use std::fmt;
use std::str::FromStr;

use crate::pga::{parse_arity, parse_basic, BasicInstruction, InstructionSequence, PrimitiveInstruction};
use crate::syntax::{Cursor, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PgldInstruction {
    Plain(BasicInstruction),
    PosTest(BasicInstruction),
    NegTest(BasicInstruction),
    PosMultiTest(u32, BasicInstruction),
    NegMultiTest(u32, BasicInstruction),
    /// `##l`: continue with the `l`-th instruction of the program.
    AbsJump(u64),
}

impl PgldInstruction {
    pub fn basic(&self) -> Option<&BasicInstruction> {
        use PgldInstruction::*;
        match self {
            Plain(b) | PosTest(b) | NegTest(b) | PosMultiTest(_, b) | NegMultiTest(_, b) => Some(b),
            AbsJump(_) => None,
        }
    }
}

impl fmt::Display for PgldInstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use PgldInstruction::*;
        match self {
            Plain(b) => write!(f, "{b}"),
            PosTest(b) => write!(f, "+{b}"),
            NegTest(b) => write!(f, "-{b}"),
            PosMultiTest(n, b) => write!(f, "+[{n}]{b}"),
            NegMultiTest(n, b) => write!(f, "-[{n}]{b}"),
            AbsJump(l) => write!(f, "##{l}"),
        }
    }
}

/// A nonempty PGLDmr program `u1 ; ... ; uk`. Positions are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PgldProgram {
    instructions: Vec<PgldInstruction>,
}

impl PgldProgram {
    /// Returns `None` for an empty instruction list.
    pub fn new(instructions: Vec<PgldInstruction>) -> Option<Self> {
        if instructions.is_empty() {
            None
        } else {
            Some(PgldProgram { instructions })
        }
    }

    pub fn instructions(&self) -> &[PgldInstruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Instruction at 1-based position `pos`.
    pub fn get(&self, pos: usize) -> Option<&PgldInstruction> {
        pos.checked_sub(1).and_then(|i| self.instructions.get(i))
    }
}

impl fmt::Display for PgldProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, u) in self.instructions.iter().enumerate() {
            if i > 0 {
                write!(f, " ; ")?;
            }
            write!(f, "{u}")?;
        }
        Ok(())
    }
}

impl FromStr for PgldProgram {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pgld(s)
    }
}

/// Parse a `;`-separated PGLDmr program. A trailing `;` is tolerated.
pub fn parse_pgld(text: &str) -> Result<PgldProgram, ParseError> {
    use PgldInstruction::*;
    let mut cur = Cursor::new(text);
    let mut instructions = Vec::new();
    loop {
        let instr = match cur.peek() {
            Some('#') => {
                cur.expect("#")?;
                if !cur.eat("#") {
                    return Err(cur.error("relative jump `#l` is not a PGLDmr instruction; use `##l`"));
                }
                AbsJump(cur.nat()?)
            }
            Some('!') => return Err(cur.error("PGLDmr has no termination instruction `!`")),
            Some('(') | Some(')') | Some('*') => return Err(cur.error("repetition is not part of PGLDmr")),
            Some('+') | Some('-') => {
                let positive = cur.eat("+");
                if !positive {
                    cur.expect("-")?;
                }
                if cur.peek_raw() == Some('[') {
                    cur.expect("[")?;
                    let n = parse_arity(&mut cur)?;
                    cur.expect("]")?;
                    let b = parse_basic(&mut cur)?;
                    if positive { PosMultiTest(n, b) } else { NegMultiTest(n, b) }
                } else {
                    let b = parse_basic(&mut cur)?;
                    if positive { PosTest(b) } else { NegTest(b) }
                }
            }
            Some(_) => Plain(parse_basic(&mut cur)?),
            None => return Err(cur.error("expected instruction")),
        };
        instructions.push(instr);
        if !cur.eat(";") || cur.at_end() {
            break;
        }
    }
    if !cur.at_end() {
        return Err(cur.error("unexpected trailing input"));
    }
    Ok(PgldProgram { instructions })
}

/// The per-position instruction translation for a program of length `k`,
/// applied at 1-based position `j`.
pub fn translate_instruction(u: &PgldInstruction, j: usize, k: usize) -> PrimitiveInstruction {
    use PrimitiveInstruction as P;
    let (j, k) = (j as u64, k as u64);
    match u {
        PgldInstruction::AbsJump(l) => {
            let l = *l;
            if l == 0 || l > k {
                P::Halt
            } else if l >= j {
                P::FwdJump(l - j)
            } else {
                P::FwdJump(k + 2 - (j - l))
            }
        }
        PgldInstruction::Plain(b) => P::Plain(b.clone()),
        PgldInstruction::PosTest(b) => P::PosTest(b.clone()),
        PgldInstruction::NegTest(b) => P::NegTest(b.clone()),
        PgldInstruction::PosMultiTest(n, b) => P::PosMultiTest(*n, b.clone()),
        PgldInstruction::NegMultiTest(n, b) => P::NegMultiTest(*n, b.clone()),
    }
}

/// `(phi_1(u1) ; ... ; phi_k(uk) ; ! ; !)*` in canonical form.
pub fn pgld_to_pga(p: &PgldProgram) -> InstructionSequence {
    let k = p.len();
    let mut period: Vec<PrimitiveInstruction> = p
        .instructions
        .iter()
        .enumerate()
        .map(|(i, u)| translate_instruction(u, i + 1, k))
        .collect();
    period.push(PrimitiveInstruction::Halt);
    period.push(PrimitiveInstruction::Halt);
    InstructionSequence::periodic(Vec::new(), period).expect("period is nonempty")
}
