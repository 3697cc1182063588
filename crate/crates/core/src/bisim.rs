//! Strong and rooted branching bisimilarity with explicit termination.
//!
//! Both checkers run signature-based partition refinement on the disjoint
//! union of the two LTSs. The branching variant first collapses τ-strongly
//! connected components (their states are always branching bisimilar), which
//! leaves an acyclic τ-graph over which inert-τ signatures can be propagated
//! in a single sweep per round.

use std::collections::{BTreeSet, HashMap};

use crate::lts::{ActionLabel, Lts};

const TAU: u32 = 0;
/// Pseudo-label marking termination inside signatures.
const TERM: u32 = u32::MAX;

/// The disjoint union of two LTSs with interned labels (`tau` is 0).
struct Union {
    term: Vec<bool>,
    adj: Vec<Vec<(u32, usize)>>,
    roots: (usize, usize),
}

impl Union {
    fn new(p: &Lts, q: &Lts) -> Self {
        let mut labels: HashMap<&ActionLabel, u32> = HashMap::new();
        labels.insert(&ActionLabel::Tau, TAU);
        let offset = p.len();
        let n = offset + q.len();
        let mut adj = vec![Vec::new(); n];
        for (lts, shift) in [(p, 0), (q, offset)] {
            for (f, l, t) in lts.transitions() {
                let next = labels.len() as u32;
                let id = *labels.entry(l).or_insert(next);
                adj[f + shift].push((id, t + shift));
            }
        }
        for succ in &mut adj {
            succ.sort_unstable();
            succ.dedup();
        }
        let term = (0..p.len())
            .map(|s| p.is_terminating(s))
            .chain((0..q.len()).map(|s| q.is_terminating(s)))
            .collect();
        Union {
            term,
            adj,
            roots: (p.root(), offset + q.root()),
        }
    }
}

/// Assign dense ids to keys in first-seen order.
fn renumber<K: std::hash::Hash + Eq>(keys: impl IntoIterator<Item = K>) -> (Vec<usize>, usize) {
    let mut ids = HashMap::new();
    let blocks = keys
        .into_iter()
        .map(|k| {
            let next = ids.len();
            *ids.entry(k).or_insert(next)
        })
        .collect();
    (blocks, ids.len())
}

/// Coarsest strong bisimulation on `u`, as a block index per state.
fn strong_partition(u: &Union) -> Vec<usize> {
    let n = u.term.len();
    let (mut block, mut count) = renumber(u.term.iter().copied());
    loop {
        let keys = (0..n).map(|s| {
            let sig: BTreeSet<(u32, usize)> = u.adj[s].iter().map(|&(l, t)| (l, block[t])).collect();
            (block[s], sig)
        });
        let (next, next_count) = renumber(keys);
        block = next;
        if next_count == count {
            return block;
        }
        count = next_count;
    }
}

/// Tarjan's algorithm on the τ-edges. Components are numbered in completion
/// order, so every τ-edge between distinct components goes from a higher to
/// a lower component number.
fn tau_sccs(u: &Union) -> (Vec<usize>, usize) {
    let n = u.term.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut comps = 0;
    let tau_succ = |s: usize| u.adj[s].iter().filter(|(l, _)| *l == TAU).map(|&(_, t)| t);
    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        // explicit DFS stack of (state, position in its τ-successor list)
        let mut work: Vec<(usize, usize)> = vec![(start, 0)];
        index[start] = next_index;
        low[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;
        while let Some(&mut (s, ref mut pos)) = work.last_mut() {
            if let Some(t) = tau_succ(s).nth(*pos) {
                *pos += 1;
                if index[t] == usize::MAX {
                    index[t] = next_index;
                    low[t] = next_index;
                    next_index += 1;
                    stack.push(t);
                    on_stack[t] = true;
                    work.push((t, 0));
                } else if on_stack[t] {
                    low[s] = low[s].min(index[t]);
                }
                continue;
            }
            work.pop();
            if let Some(&(parent, _)) = work.last() {
                low[parent] = low[parent].min(low[s]);
            }
            if low[s] == index[s] {
                loop {
                    let t = stack.pop().expect("scc stack underflow");
                    on_stack[t] = false;
                    comp[t] = comps;
                    if t == s {
                        break;
                    }
                }
                comps += 1;
            }
        }
    }
    (comp, comps)
}

/// Coarsest branching bisimulation with explicit termination on `u`, as a
/// block index per state.
fn branching_partition(u: &Union) -> Vec<usize> {
    let (comp, m) = tau_sccs(u);
    let mut term = vec![false; m];
    let mut adj: Vec<Vec<(u32, usize)>> = vec![Vec::new(); m];
    for s in 0..u.term.len() {
        term[comp[s]] |= u.term[s];
        for &(l, t) in &u.adj[s] {
            if !(l == TAU && comp[s] == comp[t]) {
                adj[comp[s]].push((l, comp[t]));
            }
        }
    }
    for succ in &mut adj {
        succ.sort_unstable();
        succ.dedup();
    }
    let mut block = vec![0usize; m];
    let mut count = 1;
    loop {
        // τ-successors have smaller component numbers, so one ascending
        // sweep sees every inert successor's signature first.
        let mut sigs: Vec<BTreeSet<(u32, usize)>> = Vec::with_capacity(m);
        for c in 0..m {
            let mut sig = BTreeSet::new();
            if term[c] {
                sig.insert((TERM, 0));
            }
            for &(l, d) in &adj[c] {
                if l == TAU && block[d] == block[c] {
                    let inherited: Vec<_> = sigs[d].iter().copied().collect();
                    sig.extend(inherited);
                } else {
                    sig.insert((l, block[d]));
                }
            }
            sigs.push(sig);
        }
        let (next, next_count) = renumber((0..m).map(|c| (block[c], std::mem::take(&mut sigs[c]))));
        block = next;
        if next_count == count {
            return comp.iter().map(|&c| block[c]).collect();
        }
        count = next_count;
    }
}

/// Strong bisimilarity of the two roots, termination included.
pub fn strong_bisimilar(p: &Lts, q: &Lts) -> bool {
    let u = Union::new(p, q);
    let block = strong_partition(&u);
    block[u.roots.0] == block[u.roots.1]
}

/// Branching bisimilarity of the two roots, without the root condition.
pub fn branching_bisimilar(p: &Lts, q: &Lts) -> bool {
    let u = Union::new(p, q);
    let block = branching_partition(&u);
    block[u.roots.0] == block[u.roots.1]
}

/// Rooted branching bisimilarity: every initial move, τ included, must be
/// matched by an identically labeled initial move into a branching-bisimilar
/// state, and the roots agree on termination.
pub fn rooted_branching_bisimilar(p: &Lts, q: &Lts) -> bool {
    let u = Union::new(p, q);
    let (r1, r2) = u.roots;
    if u.term[r1] != u.term[r2] {
        return false;
    }
    let block = branching_partition(&u);
    let moves = |r: usize| -> BTreeSet<(u32, usize)> { u.adj[r].iter().map(|&(l, t)| (l, block[t])).collect() };
    moves(r1) == moves(r2)
}
