//! Acceptance suite: one pass/fail line per criterion, each within its time
//! limit.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use isaw_core::bisim::{rooted_branching_bisimilar, strong_bisimilar};
use isaw_core::extract::extract_thread;
use isaw_core::lps::lts_from_linear_spec;
use isaw_core::lts::{abstract_labels, tau_prefix, ActionLabel, Lts};
use isaw_core::pga::{canonical_form, InstructionSequence, PgaTerm};
use isaw_core::pgld::{parse_pgld, pgld_to_pga, PgldInstruction, PgldProgram};
use isaw_core::process::{abstract_stop, pextr, pextr_c, use_process, use_process_lts};
use isaw_core::service::{boolean_register, use_thread, RegisterState, DEFAULT_STATE_BOUND};
use isaw_core::synth::{register_focus, synth_binary, synth_multireply, to_single_occurrence};
use isaw_core::thread::{
    from_linear_spec, project, thread_equal, to_linear_spec, BasicAction, ThreadAutomaton, ThreadBuilder,
    ThreadState,
};

use common::*;

type Outcome = Result<String, String>;

fn run(id: u32, name: &str, limit: Duration, check: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = check();
    let elapsed = start.elapsed();
    let (ok, detail) = match outcome {
        Ok(d) if elapsed <= limit => (true, d),
        Ok(d) => (false, format!("{d}; took {elapsed:?}, limit {limit:?}")),
        Err(e) => (false, e),
    };
    println!(
        "{} [{id}] {name}: {detail} ({:.3}s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    ok
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn seq(s: &str) -> InstructionSequence {
    s.parse().unwrap()
}

fn pga_axioms() -> Outcome {
    let mut r = rng(1);
    let laws = ["assoc", "power", "repeat-absorbs", "rotate", "unfold"];
    for case in 0..200 {
        let x = random_term(&mut r, 2);
        let y = random_term(&mut r, 2);
        let z = random_term(&mut r, 2);
        let law = laws[case % laws.len()];
        let (lhs, rhs) = match law {
            "assoc" => (
                x.clone().concat(y.clone()).concat(z.clone()),
                x.clone().concat(y.clone().concat(z.clone())),
            ),
            "power" => {
                let n = r.gen_range(1..=3);
                (x.clone().power(n).repeat(), x.clone().repeat())
            }
            "repeat-absorbs" => (x.clone().repeat().concat(y.clone()), x.clone().repeat()),
            "rotate" => (
                x.clone().concat(y.clone()).repeat(),
                x.clone().concat(y.clone().concat(x.clone()).repeat()),
            ),
            _ => (x.clone().repeat(), x.clone().concat(x.clone().repeat())),
        };
        // apply the law inside a random context
        let (lhs, rhs) = match r.gen_range(0..4) {
            0 => (lhs, rhs),
            1 => (z.clone().concat(lhs), z.clone().concat(rhs)),
            2 => (lhs.concat(z.clone()), rhs.concat(z.clone())),
            _ => (lhs.repeat(), rhs.repeat()),
        };
        let (cl, cr) = (canonical_form(&lhs), canonical_form(&rhs));
        ensure(cl == cr, || format!("{law}: `{lhs}` gives {cl}, `{rhs}` gives {cr}"))?;
        for t in [&lhs, &rhs] {
            agrees_with_unrolling(t, &cl)?;
        }
    }
    Ok("200 law instances canonicalize identically".into())
}

fn agrees_with_unrolling(t: &PgaTerm, s: &InstructionSequence) -> Result<(), String> {
    let n = 64;
    let (naive, finite) = unroll(t, n);
    ensure(finite == s.is_finite(), || format!("finiteness of `{t}`"))?;
    for (i, u) in naive.iter().enumerate() {
        ensure(s.instruction_at(i + 1) == Some(u), || format!("position {} of `{t}`", i + 1))?;
    }
    if finite {
        ensure(s.instruction_at(naive.len() + 1).is_none(), || format!("length of `{t}`"))?;
    }
    Ok(())
}

/// Disjoint union of `parts` under a new root switching on `action`, not
/// normalized.
fn raw_switch_of(action: BasicAction, parts: &[ThreadAutomaton]) -> ThreadAutomaton {
    let mut b = ThreadBuilder::new();
    let root = b.reserve();
    let mut roots = Vec::new();
    for part in parts {
        let ids: Vec<_> = part.states().iter().map(|_| b.reserve()).collect();
        for (i, s) in part.states().iter().enumerate() {
            let s = match s {
                ThreadState::Switch { action, targets } => {
                    ThreadState::switch(action.clone(), targets.iter().map(|&t| ids[t]).collect())
                }
                other => other.clone(),
            };
            b.define(ids[i], s);
        }
        roots.push(ids[part.root()]);
    }
    b.define(root, ThreadState::switch(action, roots));
    b.build(root).unwrap()
}

/// [`raw_switch_of`], normalized.
fn switch_of(action: BasicAction, parts: &[ThreadAutomaton]) -> ThreadAutomaton {
    isaw_core::normalize(&raw_switch_of(action, parts))
}

fn prefix_of(action: BasicAction, x: &ThreadAutomaton) -> ThreadAutomaton {
    let arity = action.prefix_arity();
    switch_of(action, &vec![x.clone(); arity])
}

fn thread_extraction() -> Outcome {
    let ex = |s: &str| extract_thread(&seq(s));
    let dead = ThreadAutomaton::dead();
    let stop = ThreadAutomaton::stop();
    let witnesses = ["!", "b ; !", "+c ; #2 ; ! ; a", "(a ; #3 ; !)*", "#1 ; !", "-[2]f.n ; ! ; b ; #0", "b ; (c ; +a)*"];
    let instructions = [("a", BasicAction::construct(["a"])), ("f.m", BasicAction::interaction("f", "m")), ("ac(a,b)", BasicAction::construct(["a", "b"]))];
    let mut checks: Vec<(String, ThreadAutomaton, ThreadAutomaton)> = Vec::new();
    let mut add = |name: String, lhs: ThreadAutomaton, rhs: ThreadAutomaton| checks.push((name, lhs, rhs));
    for (u, a) in &instructions {
        add(format!("[{u}]"), ex(u), prefix_of(a.clone(), &dead));
        add(format!("[+{u}]"), ex(&format!("+{u}")), prefix_of(a.clone(), &dead));
        add(format!("[-{u}]"), ex(&format!("-{u}")), prefix_of(a.clone(), &dead));
        add(format!("[+[3]{u}]"), ex(&format!("+[3]{u}")), prefix_of(a.clone(), &dead));
        add(format!("[-[2]{u}]"), ex(&format!("-[2]{u}")), prefix_of(a.clone(), &dead));
        for x in witnesses {
            let jump = |l: u32| ex(&format!("#{l} ; {x}"));
            add(format!("[{u};X] X={x}"), ex(&format!("{u} ; {x}")), prefix_of(a.clone(), &ex(x)));
            add(format!("[+{u};X] X={x}"), ex(&format!("+{u} ; {x}")), switch_of(a.clone(), &[ex(x), jump(2)]));
            add(format!("[-{u};X] X={x}"), ex(&format!("-{u} ; {x}")), switch_of(a.clone(), &[jump(2), ex(x)]));
            for n in 1..=3 {
                let forward: Vec<_> = (1..=n).map(jump).collect();
                let mut backward = forward.clone();
                backward.reverse();
                add(format!("[+[{n}]{u};X] X={x}"), ex(&format!("+[{n}]{u} ; {x}")), switch_of(a.clone(), &forward));
                add(format!("[-[{n}]{u};X] X={x}"), ex(&format!("-[{n}]{u} ; {x}")), switch_of(a.clone(), &backward));
            }
        }
    }
    for l in [0, 1, 4] {
        add(format!("[#{l}]"), ex(&format!("#{l}")), dead.clone());
    }
    for x in witnesses {
        add(format!("[#0;X] X={x}"), ex(&format!("#0 ; {x}")), dead.clone());
        add(format!("[#1;X] X={x}"), ex(&format!("#1 ; {x}")), ex(x));
        add(format!("[!;X] X={x}"), ex(&format!("! ; {x}")), stop.clone());
        for l in 0..3 {
            add(format!("[#{};u;X] X={x}", l + 2), ex(&format!("#{} ; c ; {x}", l + 2)), ex(&format!("#{} ; {x}", l + 1)));
        }
    }
    for (l, u) in [(0, "a"), (1, "!"), (3, "+b")] {
        add(format!("[#{};u]", l + 2), ex(&format!("#{} ; {u}", l + 2)), dead.clone());
    }
    add("[!]".into(), ex("!"), stop.clone());
    for chain in ["(#2 ; #2)*", "(#1)*", "a ; (#3 ; b ; c)*", "#1 ; (#4 ; #1 ; #5)*"] {
        let lhs = ex(chain);
        let expected = if chain.starts_with('a') { prefix_of(BasicAction::construct(["a"]), &dead) } else { dead.clone() };
        add(format!("[{chain}] jump chain"), lhs, expected);
    }
    let count = checks.len();
    for (name, lhs, rhs) in checks {
        ensure(thread_equal(&lhs, &rhs), || format!("{name}: {lhs} vs {rhs}"))?;
    }
    Ok(format!("all 17 equations plus the jump-chain rule hold on {count} witnesses"))
}

fn pgld_fidelity() -> Outcome {
    let mut r = rng(3);
    let fixed = [
        ("a ; ##2", prefix_of(BasicAction::construct(["a"]), &ThreadAutomaton::dead())),
        ("a ; ##7", prefix_of(BasicAction::construct(["a"]), &ThreadAutomaton::stop())),
        ("##1", ThreadAutomaton::dead()),
        ("##0 ; a", ThreadAutomaton::stop()),
    ];
    for (src, expected) in &fixed {
        let p = parse_pgld(src).unwrap();
        let got = extract_thread(&pgld_to_pga(&p));
        ensure(thread_equal(&got, expected), || format!("`{src}` extracts to {got}"))?;
        ensure(thread_equal(&pgld_oracle(&p), expected), || format!("oracle on `{src}`"))?;
    }
    for _ in 0..200 {
        let p = random_pgld(&mut r, 12);
        let got = extract_thread(&pgld_to_pga(&p));
        let want = pgld_oracle(&p);
        ensure(thread_equal(&got, &want), || format!("`{p}`: translation gives {got}, interpreter gives {want}"))?;
    }
    Ok("200 random programs agree with the direct interpreter".into())
}

fn spec_lts(e: &isaw_core::LinearProcessSpec) -> Lts {
    lts_from_linear_spec(e, e.root()).unwrap()
}

fn program_process(p: &PgldProgram) -> Lts {
    pextr(&extract_thread(&pgld_to_pga(p)))
}

fn multireply_synthesis() -> Outcome {
    let mut r = rng(4);
    for _ in 0..300 {
        let e = random_lps(&mut r);
        let p = synth_multireply(&e).map_err(|err| format!("{e}: {err}"))?;
        ensure(rooted_branching_bisimilar(&spec_lts(&e), &program_process(&p)), || format!("{e}=> {p}"))?;
    }
    Ok("300 specifications round-trip".into())
}

fn binary_synthesis() -> Outcome {
    let mut r = rng(5);
    let tact = "t";
    let hidden = BTreeSet::from([ActionLabel::atomic(tact)]);
    for _ in 0..300 {
        let e = random_lps(&mut r);
        let p = synth_binary(&e, tact).map_err(|err| format!("{e}: {err}"))?;
        for u in p.instructions() {
            let ok = match u {
                PgldInstruction::AbsJump(_) => true,
                PgldInstruction::PosTest(isaw_core::pga::BasicInstruction::Construct(es)) => es.len() == 2 && es[1] == tact,
                _ => false,
            };
            ensure(ok, || format!("`{u}` in {p}"))?;
        }
        let lhs = tau_prefix(&spec_lts(&e));
        let rhs = tau_prefix(&abstract_labels(&program_process(&p), &hidden));
        ensure(rooted_branching_bisimilar(&lhs, &rhs), || format!("{e}=> {p}"))?;
    }
    Ok("300 specifications round-trip; only binary ac(e,t) tests".into())
}

fn use_cross_check() -> Outcome {
    let mut r = rng(6);
    let inits = [RegisterState::True, RegisterState::False, RegisterState::Blocked];
    for _ in 0..100 {
        let a = register_automaton(&mut r, 8);
        let h = boolean_register(*inits.choose(&mut r).unwrap());
        let process = abstract_stop(&use_process(&a, "br", &h, DEFAULT_STATE_BOUND).map_err(|e| e.to_string())?);
        let thread = use_thread(&a, "br", &h, DEFAULT_STATE_BOUND).map_err(|e| e.to_string())?;
        ensure(strong_bisimilar(&process, &pextr(&thread)), || format!("{a} with {h:?}"))?;
    }
    Ok("100 automaton/register pairs agree".into())
}

fn single_occurrence() -> Outcome {
    let mut r = rng(7);
    let tact = "t";
    let hidden = BTreeSet::from([ActionLabel::Stop, ActionLabel::I, ActionLabel::atomic(tact)]);
    let mut shared_cases = 0;
    for _ in 0..50 {
        let e = random_lps(&mut r);
        let p = synth_binary(&e, tact).map_err(|err| err.to_string())?;
        let (q, registers) = to_single_occurrence(&p).map_err(|err| err.to_string())?;
        if registers > 0 {
            shared_cases += 1;
        }
        for atom in ["a", "b", "c", "d", "e"] {
            ensure(occurrences(&q, atom) <= 1, || format!("`{atom}` occurs more than once in {q}"))?;
        }
        let mut lc = pextr_c(&extract_thread(&pgld_to_pga(&q)));
        for j in 1..=registers {
            let br = boolean_register(RegisterState::False);
            lc = use_process_lts(&lc, &register_focus(j), &br, DEFAULT_STATE_BOUND).map_err(|err| err.to_string())?;
        }
        let transformed = tau_prefix(&abstract_labels(&lc, &hidden));
        let original = tau_prefix(&abstract_labels(&pextr_c(&extract_thread(&pgld_to_pga(&p))), &hidden));
        ensure(rooted_branching_bisimilar(&transformed, &original), || format!("{p} => {q}"))?;
    }
    ensure(shared_cases > 0, || "no sample needed registers".into())?;
    Ok(format!("50 programs ({shared_cases} with shared instructions) transform correctly"))
}

/// A bisimilar copy of `a` in which every state is duplicated and targets
/// alternate between the copies.
fn doubled(a: &ThreadAutomaton) -> ThreadAutomaton {
    let n = a.len();
    let states = (0..2 * n)
        .map(|i| match a.state(i % n) {
            ThreadState::Switch { action, targets } => ThreadState::switch(
                action.clone(),
                targets.iter().map(|&t| if i < n { t + n } else { t }).collect(),
            ),
            other => other.clone(),
        })
        .collect();
    ThreadAutomaton::new(states, 0).unwrap()
}

fn aip() -> Outcome {
    let mut r = rng(8);
    let (mut equal, mut different) = (0, 0);
    for case in 0..100 {
        let a = random_automaton(&mut r, 5, &[("f", "m")], true);
        let b = if case % 2 == 0 { doubled(&a) } else { random_automaton(&mut r, 5, &[("f", "m")], true) };
        let bound = a.len() * b.len() + 1;
        let by_projection = (0..=bound).all(|n| project(&a, n) == project(&b, n));
        let by_bisimulation = thread_equal(&a, &b);
        ensure(by_projection == by_bisimulation, || format!("{a} vs {b}"))?;
        if by_bisimulation {
            equal += 1;
        } else {
            different += 1;
        }
    }
    ensure(equal > 0 && different > 0, || "samples did not cover both outcomes".into())?;
    Ok(format!("100 pairs agree ({equal} equal, {different} different)"))
}

fn axiom_preservation() -> Outcome {
    let mut r = rng(9);
    let mut instances = 0;
    for case in 0..100 {
        let base = random_automaton(&mut r, 5, &[("f", "m")], true);
        let pick = |r: &mut rand::rngs::StdRng| (0..r.gen_range(1..=4)).map(|_| base.rooted_at(r.gen_range(0..base.len()))).collect::<Vec<_>>();
        let (lhs, rhs) = match case % 6 {
            0 => {
                // S1: the binary form is the 2-ary switch
                let a = [BasicAction::interaction("f", "m"), BasicAction::Tau, BasicAction::construct(["a"]), BasicAction::construct(["a", "b"])]
                    .choose(&mut r)
                    .unwrap()
                    .clone();
                let xs = [base.rooted_at(r.gen_range(0..base.len())), base.rooted_at(r.gen_range(0..base.len()))];
                let lhs = raw_switch_of(a.clone(), &xs);
                (abstract_stop(&direct_pextr_c(&lhs)), pextr(&switch_of(a, &xs)))
            }
            1 | 2 => {
                // S2 (n < k) and S3 (n > k)
                let xs = pick(&mut r);
                let k = xs.len();
                let n = if case % 6 == 1 { r.gen_range(1..k.max(2)).min(k) } else { r.gen_range(k + 1..=k + 2) };
                let a = BasicAction::construct((0..n).map(|i| ["a", "b", "c", "d", "e", "g"][i]));
                let lhs = raw_switch_of(a.clone(), &xs);
                let mut padded = xs.clone();
                padded.resize(n, ThreadAutomaton::dead());
                (abstract_stop(&direct_pextr_c(&lhs)), pextr(&switch_of(a, &padded)))
            }
            3 | 4 => {
                // T1 (k = 2) and T2 (any k)
                let mut xs = pick(&mut r);
                if case % 6 == 3 {
                    xs.resize(2, base.clone());
                }
                let lhs = raw_switch_of(BasicAction::Tau, &xs);
                let rhs = switch_of(BasicAction::Tau, &vec![xs[0].clone(); xs.len()]);
                (abstract_stop(&direct_pextr_c(&lhs)), pextr(&rhs))
            }
            _ => {
                // RDP: a recursion constant equals its unfolding
                let spec = to_linear_spec(&base);
                let x = from_linear_spec(&spec, "X0").unwrap();
                let ThreadState::Switch { action, targets } = x.state(x.root()).clone() else {
                    let lhs = direct_pextr_c(&x);
                    instances += 1;
                    ensure(strong_bisimilar(&abstract_stop(&lhs), &pextr(&x)), || format!("RDP on {x}"))?;
                    continue;
                };
                let parts: Vec<_> = targets.iter().map(|&t| x.rooted_at(t)).collect();
                (abstract_stop(&direct_pextr_c(&x)), pextr(&switch_of(action, &parts)))
            }
        };
        instances += 1;
        ensure(strong_bisimilar(&lhs, &rhs), || format!("instance {case} over {base}"))?;
    }
    Ok(format!("{instances} axiom instances have strongly bisimilar images"))
}

fn main() {
    let results = [
        run(1, "PGA axiom suite", Duration::from_secs(1), pga_axioms),
        run(2, "thread-extraction regression", Duration::from_secs(1), thread_extraction),
        run(3, "PGLDmr fidelity", Duration::from_secs(5), pgld_fidelity),
        run(4, "multi-reply synthesis round-trip", Duration::from_secs(30), multireply_synthesis),
        run(5, "binary synthesis round-trip", Duration::from_secs(60), binary_synthesis),
        run(6, "use operator cross-check", Duration::from_secs(30), use_cross_check),
        run(7, "single-occurrence transformation", Duration::from_secs(60), single_occurrence),
        run(8, "AIP consistency", Duration::from_secs(5), aip),
        run(9, "axiom preservation sampling", Duration::from_secs(10), axiom_preservation),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
