//! JSON and Aldebaran (`.aut`) serialization of LTSs.
//!
//! In `.aut` files termination is encoded as a `"term!"` transition from each
//! terminating state to one extra sink state, the highest-numbered state.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::lts::{ActionLabel, Lts, LtsError};

/// Label used for the termination encoding in `.aut` files.
pub const TERM_LABEL: &str = "term!";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonLts {
    root: usize,
    states: usize,
    terminating: Vec<usize>,
    transitions: Vec<(usize, String, usize)>,
}

/// Pretty-printed JSON with one transition per line.
pub fn to_json(lts: &Lts) -> String {
    let mut out = String::new();
    let term: Vec<String> = lts.terminating_states().map(|s| s.to_string()).collect();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"root\": {},", lts.root());
    let _ = writeln!(out, "  \"states\": {},", lts.len());
    let _ = writeln!(out, "  \"terminating\": [{}],", term.join(", "));
    if lts.transitions().is_empty() {
        let _ = writeln!(out, "  \"transitions\": []");
    } else {
        let _ = writeln!(out, "  \"transitions\": [");
        let n = lts.transitions().len();
        for (i, (f, l, t)) in lts.transitions().iter().enumerate() {
            let label = serde_json::to_string(&l.to_string()).expect("strings serialize");
            let sep = if i + 1 < n { "," } else { "" };
            let _ = writeln!(out, "    [{f}, {label}, {t}]{sep}");
        }
        let _ = writeln!(out, "  ]");
    }
    out.push_str("}\n");
    out
}

/// Parse the JSON format. The result is not canonicalized.
pub fn from_json(text: &str) -> Result<Lts, LtsError> {
    let raw: JsonLts = serde_json::from_str(text).map_err(|e| LtsError::Json(e.to_string()))?;
    let transitions = raw
        .transitions
        .into_iter()
        .map(|(f, l, t)| Ok((f, l.parse::<ActionLabel>()?, t)))
        .collect::<Result<Vec<_>, LtsError>>()?;
    Lts::new(raw.states, raw.root, raw.terminating, transitions)
}

pub fn to_aut(lts: &Lts) -> String {
    let sink = lts.len();
    let term: Vec<usize> = lts.terminating_states().collect();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "des ({}, {}, {})",
        lts.root(),
        lts.transitions().len() + term.len(),
        lts.len() + 1
    );
    for (f, l, t) in lts.transitions() {
        let _ = writeln!(out, "({f},\"{l}\",{t})");
    }
    for s in term {
        let _ = writeln!(out, "({s},\"{TERM_LABEL}\",{sink})");
    }
    out
}

fn aut_error(line: usize, message: impl Into<String>) -> LtsError {
    LtsError::Aut {
        line,
        message: message.into(),
    }
}

fn number(s: &str, line: usize) -> Result<usize, LtsError> {
    s.trim()
        .parse()
        .map_err(|_| aut_error(line, format!("expected a number, found `{}`", s.trim())))
}

/// Split `(a, b, c)` into its three fields. The middle field may be quoted and
/// may then contain commas.
fn triple(s: &str, line: usize) -> Result<(&str, &str, &str), LtsError> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| aut_error(line, "expected `(from, label, to)`"))?;
    let (first, rest) = inner
        .split_once(',')
        .ok_or_else(|| aut_error(line, "expected three fields"))?;
    let (middle, last) = rest
        .rsplit_once(',')
        .ok_or_else(|| aut_error(line, "expected three fields"))?;
    Ok((first, middle.trim(), last))
}

/// Parse an Aldebaran file, undoing the termination encoding.
pub fn from_aut(text: &str) -> Result<Lts, LtsError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| aut_error(1, "missing `des` header"))?;
    let header = header
        .trim()
        .strip_prefix("des")
        .ok_or_else(|| aut_error(1, "missing `des` header"))?;
    let (root, count, states) = triple(header, 1)?;
    let (root, count, states) = (number(root, 1)?, number(count, 1)?, number(states, 1)?);
    if states == 0 {
        return Err(aut_error(1, "no room for the termination sink"));
    }
    let sink = states - 1;
    if root >= sink {
        return Err(aut_error(1, "root is out of range or is the termination sink"));
    }
    let mut terminating = Vec::new();
    let mut transitions = Vec::new();
    let mut seen = 0;
    for (i, line) in lines {
        let n = i + 1;
        let (f, label, t) = triple(line, n)?;
        let (f, t) = (number(f, n)?, number(t, n)?);
        let label = label
            .strip_prefix('"')
            .and_then(|l| l.strip_suffix('"'))
            .unwrap_or(label);
        seen += 1;
        if f >= sink {
            return Err(aut_error(n, "transition leaves the termination sink or an unknown state"));
        }
        if label == TERM_LABEL {
            if t != sink {
                return Err(aut_error(n, "`term!` must lead to the termination sink"));
            }
            terminating.push(f);
            continue;
        }
        if t >= sink {
            return Err(aut_error(n, "transition enters the termination sink or an unknown state"));
        }
        let label: ActionLabel = label.parse().map_err(|e: LtsError| aut_error(n, e.to_string()))?;
        transitions.push((f, label, t));
    }
    if seen != count {
        return Err(aut_error(1, format!("header announces {count} transitions, found {seen}")));
    }
    Lts::new(sink, root, terminating, transitions)
}
