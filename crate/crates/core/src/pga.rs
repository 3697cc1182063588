//! Program algebra with multiple-reply test instructions: instruction syntax,
//! terms, parsing, and reduction of closed terms to canonical instruction
//! sequences.
//!
//! Every closed term denotes a finite or ultimately periodic sequence, so a
//! canonical sequence is stored as a finite `prefix` followed by an optional
//! repeated `period`. The period is kept primitive and the prefix as short as
//! possible, which makes equality of denoted sequences structural.

use std::fmt;
use std::str::FromStr;

use crate::syntax::{is_atomic_action, Cursor, ParseError};

/// Upper bound on the number of instructions a term may expand to through
/// finite powers. Keeps eager expansion of `X^n` bounded on hostile input.
pub const MAX_EXPANDED_LEN: usize = 1 << 20;

/// A basic instruction: a request to a service, or a process construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasicInstruction {
    /// `f.m`: ask the service named `focus` to process `method`.
    Interaction { focus: String, method: String },
    /// `ac(e1,...,en)`: perform one of the atomic actions; the reply is its index.
    Construct(Vec<String>),
}

impl BasicInstruction {
    pub fn interaction(focus: impl Into<String>, method: impl Into<String>) -> Self {
        BasicInstruction::Interaction {
            focus: focus.into(),
            method: method.into(),
        }
    }

    /// # Panics
    /// If `actions` is empty.
    pub fn construct<S: Into<String>>(actions: impl IntoIterator<Item = S>) -> Self {
        let actions: Vec<String> = actions.into_iter().map(Into::into).collect();
        assert!(!actions.is_empty(), "ac() needs at least one action");
        BasicInstruction::Construct(actions)
    }

    /// Atomic actions mentioned by this instruction.
    pub fn atomic_actions(&self) -> &[String] {
        match self {
            BasicInstruction::Construct(actions) => actions,
            BasicInstruction::Interaction { .. } => &[],
        }
    }
}

impl fmt::Display for BasicInstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicInstruction::Interaction { focus, method } => write!(f, "{focus}.{method}"),
            BasicInstruction::Construct(actions) => write!(f, "ac({})", actions.join(",")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimitiveInstruction {
    Plain(BasicInstruction),
    PosTest(BasicInstruction),
    NegTest(BasicInstruction),
    PosMultiTest(u32, BasicInstruction),
    NegMultiTest(u32, BasicInstruction),
    FwdJump(u64),
    Halt,
}

impl PrimitiveInstruction {
    pub fn basic(&self) -> Option<&BasicInstruction> {
        use PrimitiveInstruction::*;
        match self {
            Plain(b) | PosTest(b) | NegTest(b) | PosMultiTest(_, b) | NegMultiTest(_, b) => Some(b),
            FwdJump(_) | Halt => None,
        }
    }
}

impl fmt::Display for PrimitiveInstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use PrimitiveInstruction::*;
        match self {
            Plain(b) => write!(f, "{b}"),
            PosTest(b) => write!(f, "+{b}"),
            NegTest(b) => write!(f, "-{b}"),
            PosMultiTest(n, b) => write!(f, "+[{n}]{b}"),
            NegMultiTest(n, b) => write!(f, "-[{n}]{b}"),
            FwdJump(l) => write!(f, "#{l}"),
            Halt => write!(f, "!"),
        }
    }
}

/// Abstract syntax of closed terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PgaTerm {
    Instr(PrimitiveInstruction),
    Concat(Box<PgaTerm>, Box<PgaTerm>),
    /// `X^n` with `n >= 1`.
    Power(Box<PgaTerm>, u32),
    /// `X*`, the infinite repetition of `X`.
    Repeat(Box<PgaTerm>),
}

impl PgaTerm {
    pub fn concat(self, rhs: PgaTerm) -> PgaTerm {
        PgaTerm::Concat(Box::new(self), Box::new(rhs))
    }

    pub fn repeat(self) -> PgaTerm {
        PgaTerm::Repeat(Box::new(self))
    }

    /// # Panics
    /// If `n == 0`.
    pub fn power(self, n: u32) -> PgaTerm {
        assert!(n >= 1, "finite power exponent must be at least 1");
        PgaTerm::Power(Box::new(self), n)
    }

    /// Length of the finite expansion before any repetition is reached,
    /// saturating at `usize::MAX`.
    fn expanded_len(&self) -> usize {
        match self {
            PgaTerm::Instr(_) => 1,
            PgaTerm::Concat(a, b) => a.expanded_len().saturating_add(b.expanded_len()),
            PgaTerm::Power(a, n) => a.expanded_len().saturating_mul(*n as usize),
            PgaTerm::Repeat(a) => a.expanded_len(),
        }
    }
}

impl fmt::Display for PgaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PgaTerm::Instr(u) => write!(f, "{u}"),
            PgaTerm::Concat(a, b) => {
                // parsing is left-associative, so a right-nested concatenation
                // keeps its grouping
                write!(f, "{a} ; ")?;
                match **b {
                    PgaTerm::Concat(..) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
            PgaTerm::Power(a, n) => write!(f, "({a})^{n}"),
            PgaTerm::Repeat(a) => write!(f, "({a})*"),
        }
    }
}

/// Canonical form of a closed term: `prefix` followed by `period` repeated forever.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InstructionSequence {
    prefix: Vec<PrimitiveInstruction>,
    period: Option<Vec<PrimitiveInstruction>>,
}

impl InstructionSequence {
    /// A finite sequence. Returns `None` for an empty list.
    pub fn finite(instructions: Vec<PrimitiveInstruction>) -> Option<Self> {
        if instructions.is_empty() {
            None
        } else {
            Some(InstructionSequence {
                prefix: instructions,
                period: None,
            })
        }
    }

    /// `prefix ; (period)*`, brought into canonical form. Returns `None` if
    /// `period` is empty.
    pub fn periodic(prefix: Vec<PrimitiveInstruction>, period: Vec<PrimitiveInstruction>) -> Option<Self> {
        if period.is_empty() {
            return None;
        }
        Some(canonical_periodic(prefix, period))
    }

    pub fn prefix(&self) -> &[PrimitiveInstruction] {
        &self.prefix
    }

    pub fn period(&self) -> Option<&[PrimitiveInstruction]> {
        self.period.as_deref()
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_none()
    }

    /// Number of distinct positions: prefix length plus period length.
    pub fn position_count(&self) -> usize {
        self.prefix.len() + self.period.as_ref().map_or(0, Vec::len)
    }

    /// Instruction at 1-based position `pos` of the denoted sequence.
    pub fn instruction_at(&self, pos: usize) -> Option<&PrimitiveInstruction> {
        if pos == 0 {
            return None;
        }
        if pos <= self.prefix.len() {
            return Some(&self.prefix[pos - 1]);
        }
        let period = self.period.as_ref()?;
        Some(&period[(pos - self.prefix.len() - 1) % period.len()])
    }

    /// All instructions, prefix first.
    pub fn instructions(&self) -> impl Iterator<Item = &PrimitiveInstruction> {
        self.prefix.iter().chain(self.period.iter().flatten())
    }
}

impl fmt::Display for InstructionSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for u in &self.prefix {
            if !first {
                write!(f, " ; ")?;
            }
            first = false;
            write!(f, "{u}")?;
        }
        if let Some(period) = &self.period {
            if !first {
                write!(f, " ; ")?;
            }
            write!(f, "(")?;
            for (i, u) in period.iter().enumerate() {
                if i > 0 {
                    write!(f, " ; ")?;
                }
                write!(f, "{u}")?;
            }
            write!(f, ")*")?;
        }
        Ok(())
    }
}

impl FromStr for InstructionSequence {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pga(s).map(|t| canonical_form(&t))
    }
}

/// True iff the two canonical sequences denote the same instruction sequence.
pub fn sequences_equal(s1: &InstructionSequence, s2: &InstructionSequence) -> bool {
    s1 == s2
}

enum Flat {
    Finite(Vec<PrimitiveInstruction>),
    Infinite(Vec<PrimitiveInstruction>, Vec<PrimitiveInstruction>),
}

fn flatten(t: &PgaTerm) -> Flat {
    match t {
        PgaTerm::Instr(u) => Flat::Finite(vec![u.clone()]),
        PgaTerm::Concat(a, b) => match flatten(a) {
            // X* ; Y = X*
            inf @ Flat::Infinite(..) => inf,
            Flat::Finite(mut xs) => match flatten(b) {
                Flat::Finite(ys) => {
                    xs.extend(ys);
                    Flat::Finite(xs)
                }
                Flat::Infinite(p, q) => {
                    xs.extend(p);
                    Flat::Infinite(xs, q)
                }
            },
        },
        PgaTerm::Power(a, n) => match flatten(a) {
            inf @ Flat::Infinite(..) => inf,
            Flat::Finite(xs) => {
                let mut out = Vec::with_capacity(xs.len() * *n as usize);
                for _ in 0..*n {
                    out.extend_from_slice(&xs);
                }
                Flat::Finite(out)
            }
        },
        PgaTerm::Repeat(a) => match flatten(a) {
            // (P;Q*)* = P;Q*;(P;Q*)* = P;Q*
            inf @ Flat::Infinite(..) => inf,
            Flat::Finite(xs) => Flat::Infinite(Vec::new(), xs),
        },
    }
}

/// Length of the shortest word `w` with `period == w^k`.
fn primitive_root_len<T: PartialEq>(word: &[T]) -> usize {
    let n = word.len();
    let mut failure = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && word[i] != word[k] {
            k = failure[k - 1];
        }
        if word[i] == word[k] {
            k += 1;
        }
        failure[i] = k;
    }
    let p = n - failure[n - 1];
    if n.is_multiple_of(p) {
        p
    } else {
        n
    }
}

fn canonical_periodic(
    mut prefix: Vec<PrimitiveInstruction>,
    mut period: Vec<PrimitiveInstruction>,
) -> InstructionSequence {
    let root = primitive_root_len(&period);
    period.truncate(root);
    while prefix.last().is_some() && prefix.last() == period.last() {
        prefix.pop();
        period.rotate_right(1);
    }
    InstructionSequence {
        prefix,
        period: Some(period),
    }
}

/// Reduce a closed term to its canonical instruction sequence.
pub fn canonical_form(t: &PgaTerm) -> InstructionSequence {
    match flatten(t) {
        Flat::Finite(prefix) => InstructionSequence {
            prefix,
            period: None,
        },
        Flat::Infinite(prefix, period) => canonical_periodic(prefix, period),
    }
}

/// Parse a closed term. A trailing `;` is tolerated.
pub fn parse_pga(text: &str) -> Result<PgaTerm, ParseError> {
    let mut cur = Cursor::new(text);
    let term = parse_term(&mut cur, 0)?;
    cur.eat(";");
    if !cur.at_end() {
        return Err(cur.error("unexpected trailing input"));
    }
    if term.expanded_len() > MAX_EXPANDED_LEN {
        return Err(ParseError::new(
            0,
            format!("term expands to more than {MAX_EXPANDED_LEN} instructions"),
        ));
    }
    Ok(term)
}

const MAX_NESTING: usize = 256;

fn parse_term(cur: &mut Cursor<'_>, depth: usize) -> Result<PgaTerm, ParseError> {
    let mut term = parse_factor(cur, depth)?;
    loop {
        let save = cur.clone();
        if !cur.eat(";") {
            break;
        }
        // allow the trailing `;` handled by the caller
        if cur.at_end() || cur.peek() == Some(')') {
            *cur = save;
            break;
        }
        let rhs = parse_factor(cur, depth)?;
        term = term.concat(rhs);
    }
    Ok(term)
}

fn parse_factor(cur: &mut Cursor<'_>, depth: usize) -> Result<PgaTerm, ParseError> {
    if cur.peek() == Some('(') {
        if depth >= MAX_NESTING {
            return Err(cur.error("parentheses nested too deeply"));
        }
        cur.expect("(")?;
        let inner = parse_term(cur, depth + 1)?;
        cur.expect(")")?;
        if cur.eat("*") {
            return Ok(inner.repeat());
        }
        if cur.eat("^") {
            let at = cur.offset();
            let n = cur.nat()?;
            if n == 0 {
                return Err(ParseError::new(at, "finite power exponent must be at least 1"));
            }
            let n = u32::try_from(n).map_err(|_| ParseError::new(at, "exponent too large"))?;
            return Ok(inner.power(n));
        }
        return Ok(inner);
    }
    parse_primitive(cur).map(PgaTerm::Instr)
}

fn parse_primitive(cur: &mut Cursor<'_>) -> Result<PrimitiveInstruction, ParseError> {
    use PrimitiveInstruction::*;
    match cur.peek() {
        Some('!') => {
            cur.expect("!")?;
            Ok(Halt)
        }
        Some('#') => {
            cur.expect("#")?;
            if cur.peek_raw() == Some('#') {
                return Err(cur.error("absolute jump `##` is not a PGA instruction"));
            }
            Ok(FwdJump(cur.nat()?))
        }
        Some('+') | Some('-') => {
            let positive = cur.eat("+");
            if !positive {
                cur.expect("-")?;
            }
            if cur.peek_raw() == Some('[') {
                cur.expect("[")?;
                let arity = parse_arity(cur)?;
                cur.expect("]")?;
                let b = parse_basic(cur)?;
                Ok(if positive { PosMultiTest(arity, b) } else { NegMultiTest(arity, b) })
            } else {
                let b = parse_basic(cur)?;
                Ok(if positive { PosTest(b) } else { NegTest(b) })
            }
        }
        Some(_) => Ok(Plain(parse_basic(cur)?)),
        None => Err(cur.error("expected instruction")),
    }
}

pub(crate) fn parse_arity(cur: &mut Cursor<'_>) -> Result<u32, ParseError> {
    let at = cur.offset();
    let n = cur.nat()?;
    if n == 0 {
        return Err(ParseError::new(at, "multiple-reply test arity must be at least 1"));
    }
    u32::try_from(n).map_err(|_| ParseError::new(at, "arity too large"))
}

/// `f.m`, `ac(e1,...,en)`, or a bare atomic action `e` (shorthand for `ac(e)`).
pub(crate) fn parse_basic(cur: &mut Cursor<'_>) -> Result<BasicInstruction, ParseError> {
    let at = cur.offset();
    let head = cur.ident()?;
    if head == "ac" && cur.peek() == Some('(') {
        cur.expect("(")?;
        let mut actions = Vec::new();
        if cur.peek() == Some(')') {
            return Err(cur.error("ac() needs at least one atomic action"));
        }
        loop {
            let at = cur.offset();
            let e = cur.ident()?;
            if !is_atomic_action(e) {
                return Err(ParseError::new(at, format!("`{e}` is reserved and cannot be an atomic action")));
            }
            actions.push(e.to_string());
            if !cur.eat(",") {
                break;
            }
        }
        cur.expect(")")?;
        return Ok(BasicInstruction::Construct(actions));
    }
    if cur.peek() == Some('.') {
        cur.expect(".")?;
        let method = cur.method()?;
        return Ok(BasicInstruction::interaction(head, method));
    }
    if !is_atomic_action(head) {
        return Err(ParseError::new(at, format!("`{head}` is reserved and cannot be an atomic action")));
    }
    Ok(BasicInstruction::Construct(vec![head.to_string()]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use PrimitiveInstruction::*;

    fn ac(names: &[&str]) -> BasicInstruction {
        BasicInstruction::construct(names.iter().copied())
    }

    fn canon(s: &str) -> InstructionSequence {
        s.parse().unwrap()
    }

    #[test]
    fn parses_tests_jumps_and_halt() {
        let t = parse_pga("+a.m ; #2 ; !").unwrap();
        let expected = PgaTerm::Instr(PosTest(BasicInstruction::interaction("a", "m")))
            .concat(PgaTerm::Instr(FwdJump(2)))
            .concat(PgaTerm::Instr(Halt));
        assert_eq!(t, expected);
    }

    #[test]
    fn parses_repetition() {
        let t = parse_pga("(b.m ; #1)*").unwrap();
        match t {
            PgaTerm::Repeat(inner) => assert!(matches!(*inner, PgaTerm::Concat(..))),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parses_multi_reply_test() {
        let t = parse_pga("+[3]ac(e1,e2,e3)").unwrap();
        assert_eq!(t, PgaTerm::Instr(PosMultiTest(3, ac(&["e1", "e2", "e3"]))));
        let t = parse_pga("-[2] f.set:T").unwrap();
        assert_eq!(
            t,
            PgaTerm::Instr(NegMultiTest(2, BasicInstruction::interaction("f", "set:T")))
        );
    }

    #[test]
    fn rejects_zero_arity_and_empty_ac() {
        assert!(parse_pga("+[0]ac(a)").is_err());
        assert!(parse_pga("ac()").is_err());
        assert!(parse_pga("##1").is_err());
        assert!(parse_pga("(a)^0").is_err());
        assert!(parse_pga("ac(stop)").is_err());
        assert!(parse_pga("a ; ; b").is_err());
        assert!(parse_pga("").is_err());
    }

    #[test]
    fn error_reports_offset() {
        let err = parse_pga("a ; +[0]b").unwrap_err();
        assert_eq!(err.offset, 6);
    }

    #[test]
    fn rejects_power_blowup() {
        assert!(parse_pga("((a)^4096)^4096").is_err());
        assert!(parse_pga("((a)^4096)^4096 ; !").is_err());
    }

    #[test]
    fn rotation_law() {
        assert_eq!(canon("(a;b)*"), canon("a;(b;a)*"));
    }

    #[test]
    fn repetition_absorbs_suffix() {
        let s = canon("(a)* ; b");
        assert!(s.prefix().is_empty());
        assert_eq!(s.period().unwrap(), &[Plain(ac(&["a"]))]);
    }

    #[test]
    fn primitive_period() {
        let s = canon("(a;a)*");
        assert_eq!(s.period().unwrap().len(), 1);
        assert_eq!(canon("(a;b;a;b;a;b)*"), canon("(a;b)*"));
        assert_eq!(canon("((a;b)^3)*"), canon("(a;b)*"));
    }

    #[test]
    fn finite_sequence_is_already_canonical() {
        let s = canon("a ; !");
        assert_eq!(s.prefix(), &[Plain(ac(&["a"])), Halt]);
        assert!(s.period().is_none());
    }

    #[test]
    fn equality_examples() {
        assert!(sequences_equal(&canon("a;(a)*"), &canon("(a)*")));
        assert!(!sequences_equal(&canon("(a;b)*"), &canon("(b;a)*")));
        assert!(!sequences_equal(&canon("a"), &canon("a;a")));
    }

    #[test]
    fn positional_view() {
        assert_eq!(canon("a;!").instruction_at(3), None);
        let s = canon("a;(b;c)*");
        assert_eq!(s.instruction_at(4), Some(&Plain(ac(&["b"]))));
        assert_eq!(s.instruction_at(5), Some(&Plain(ac(&["c"]))));
        assert_eq!(canon("(a)*").instruction_at(1000), Some(&Plain(ac(&["a"]))));
        assert_eq!(canon("(a)*").instruction_at(0), None);
    }

    #[test]
    fn display_reparses() {
        for src in ["+a.m ; #2 ; !", "a ; (b ; c)*", "(-[3]ac(x,y,z) ; #0)*"] {
            let s = canon(src);
            assert_eq!(canon(&s.to_string()), s);
        }
    }

    #[test]
    fn nested_repetition_collapses() {
        assert_eq!(canon("(a;(b)*)*"), canon("a;(b)*"));
        assert_eq!(canon("((a)*)^3"), canon("(a)*"));
    }
}
