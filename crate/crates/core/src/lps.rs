//! Finite linear recursive specifications over ACPτ and their LTS semantics.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::lts::{ActionLabel, Lts, LtsBuilder};
use crate::syntax::{Cursor, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Summand {
    /// `e . Y`
    Step(ActionLabel, String),
    /// `e`, followed by successful termination.
    Terminate(ActionLabel),
    /// `delta`
    Delta,
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Summand::Step(e, y) => write!(f, "{e} . {y}"),
            Summand::Terminate(e) => write!(f, "{e}"),
            Summand::Delta => write!(f, "delta"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("variable `{0}` is used but has no equation")]
    UnboundVariable(String),
    #[error("variable `{0}` has more than one equation")]
    DuplicateVariable(String),
    #[error("a specification needs at least one equation")]
    NoEquations,
}

/// Equations `X = Σ summands`, in order; the first variable is the default
/// root. An empty summand list denotes `delta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProcessSpec {
    equations: Vec<(String, Vec<Summand>)>,
}

impl LinearProcessSpec {
    pub fn new(equations: Vec<(String, Vec<Summand>)>) -> Result<Self, SpecError> {
        if equations.is_empty() {
            return Err(SpecError::NoEquations);
        }
        let mut seen = HashSet::new();
        for (x, _) in &equations {
            if !seen.insert(x.as_str()) {
                return Err(SpecError::DuplicateVariable(x.clone()));
            }
        }
        for (_, summands) in &equations {
            for s in summands {
                if let Summand::Step(_, y) = s {
                    if !seen.contains(y.as_str()) {
                        return Err(SpecError::UnboundVariable(y.clone()));
                    }
                }
            }
        }
        Ok(LinearProcessSpec { equations })
    }

    pub fn equations(&self) -> &[(String, Vec<Summand>)] {
        &self.equations
    }

    pub fn root(&self) -> &str {
        &self.equations[0].0
    }

    /// Position of the equation for `x`.
    pub fn index_of(&self, x: &str) -> Option<usize> {
        self.equations.iter().position(|(v, _)| v == x)
    }
}

impl fmt::Display for LinearProcessSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, summands) in &self.equations {
            write!(f, "{x} = ")?;
            if summands.is_empty() {
                write!(f, "delta")?;
            }
            for (i, s) in summands.iter().enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                write!(f, "{s}")?;
            }
            writeln!(f, " ;")?;
        }
        Ok(())
    }
}

impl FromStr for LinearProcessSpec {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_linear_process_spec(s)
    }
}

/// Read one action label: an identifier optionally followed by a
/// parenthesized argument.
fn label(cur: &mut Cursor<'_>) -> Result<ActionLabel, ParseError> {
    let start = {
        cur.skip_ws();
        cur.offset()
    };
    let name = cur.ident()?;
    let text = if cur.peek_raw() == Some('(') {
        let rest = cur.rest();
        let close = rest.find(')').ok_or_else(|| cur.error("unclosed `(` in label"))?;
        let arg = &rest[..=close];
        cur.expect(arg)?;
        format!("{name}{arg}")
    } else {
        name.to_string()
    };
    text.parse()
        .map_err(|_| ParseError::new(start, format!("invalid action label `{text}`")))
}

/// Parse `X = a . Y + b + delta ; Y = ... ;`. The final `;` is optional.
pub fn parse_linear_process_spec(text: &str) -> Result<LinearProcessSpec, crate::Error> {
    let mut cur = Cursor::new(text);
    let mut equations = Vec::new();
    while !cur.at_end() {
        let x = cur.ident()?.to_string();
        cur.expect("=")?;
        let mut summands = Vec::new();
        loop {
            let save = cur.clone();
            if cur.ident().ok() == Some("delta") {
                summands.push(Summand::Delta);
            } else {
                cur = save;
                let e = label(&mut cur)?;
                if cur.eat(".") {
                    summands.push(Summand::Step(e, cur.ident()?.to_string()));
                } else {
                    summands.push(Summand::Terminate(e));
                }
            }
            if !cur.eat("+") {
                break;
            }
        }
        equations.push((x, summands));
        if !cur.eat(";") && !cur.at_end() {
            return Err(cur.error("expected `;` or `+`").into());
        }
    }
    if equations.is_empty() {
        return Err(ParseError::new(0, "expected at least one equation").into());
    }
    Ok(LinearProcessSpec::new(equations)?)
}

/// One state per variable plus a shared terminating sink, rooted at `x`.
pub fn lts_from_linear_spec(e: &LinearProcessSpec, x: &str) -> Result<Lts, SpecError> {
    let root = e
        .index_of(x)
        .ok_or_else(|| SpecError::UnboundVariable(x.to_string()))?;
    let index: HashMap<&str, usize> = e
        .equations
        .iter()
        .enumerate()
        .map(|(i, (v, _))| (v.as_str(), i))
        .collect();
    let mut b = LtsBuilder::new();
    for _ in &e.equations {
        b.state(false);
    }
    let sink = b.state(true);
    for (i, (_, summands)) in e.equations.iter().enumerate() {
        for s in summands {
            match s {
                Summand::Step(l, y) => b.edge(i, l.clone(), index[y.as_str()]),
                Summand::Terminate(l) => b.edge(i, l.clone(), sink),
                Summand::Delta => {}
            }
        }
    }
    Ok(b.build(root))
}
