//! Test-side oracle: plain enumeration of every plan, written without the
//! search module so that it can check it.
#![allow(dead_code)]

use std::collections::BTreeSet;

use netbench_core::dialog::{Advisory, Query, Slot};
use netbench_core::generate::{gen_instance, GenClass, InstanceClass};
use netbench_core::model::Objective;
use netbench_core::textio::{serialize_dialog_spec, serialize_problem, SourceError};
use netbench_core::{ratio, DialogSpec, ObjectiveKind, Problem, Rational};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TWO_OP: &str = include_str!("../../../../data/two_op.plan.txt");
pub const WATER: &str = include_str!("../../../../data/water.dlg.txt");

/// One enumerated plan with its totals.
#[derive(Debug, Clone)]
pub struct Enumerated {
    pub ops: Vec<String>,
    pub cost: Rational,
    pub utility: Rational,
    pub discounted: Rational,
    pub final_state: Vec<u32>,
}

/// Every operator sequence of length at most the horizon that is applicable
/// from the initial state, in depth-first order.
pub fn enumerate(pr: &Problem) -> Vec<Enumerated> {
    let gamma = match pr.objective() {
        Objective::Discounted { gamma } => gamma.clone(),
        _ => Rational::one(),
    };
    let mut out = Vec::new();
    let start = Enumerated {
        ops: Vec::new(),
        cost: Rational::zero(),
        utility: Rational::zero(),
        discounted: Rational::zero(),
        final_state: pr.initial_state().values().to_vec(),
    };
    let mut stack = vec![(start, Rational::one())];
    while let Some((cur, weight)) = stack.pop() {
        if cur.ops.len() < pr.horizon() {
            for op in pr.operators().iter().rev() {
                let ok = op.pre().bindings().iter().all(|&(v, val)| cur.final_state[v] == val);
                if !ok {
                    continue;
                }
                let mut next = cur.clone();
                for &(v, val) in op.eff().bindings() {
                    next.final_state[v] = val;
                }
                next.ops.push(op.name().to_string());
                next.cost += op.cost();
                next.utility += op.utility();
                next.discounted += (op.utility() - op.cost()) * &weight;
                stack.push((next, &weight * &gamma));
            }
        }
        out.push(cur);
    }
    out
}

/// Best plan under the objective: higher value (lower cost for min-cost),
/// then shorter, then lexicographically smaller names. `None` when a goal
/// is unreachable.
pub fn oracle_best(pr: &Problem) -> Option<(Rational, Vec<String>)> {
    let plans = enumerate(pr);
    let scored: Vec<(Rational, &Enumerated)> = match pr.objective() {
        Objective::MinCost { goal: None } => return Some((Rational::zero(), Vec::new())),
        Objective::MinCost { goal: Some(goal) } => plans
            .iter()
            .filter(|p| goal.bindings().iter().all(|&(v, val)| p.final_state[v] == val))
            .map(|p| (-p.cost.clone(), p))
            .collect(),
        Objective::NetBenefit => plans.iter().map(|p| (&p.utility - &p.cost, p)).collect(),
        Objective::Discounted { .. } => plans.iter().map(|p| (p.discounted.clone(), p)).collect(),
    };
    let (score, best) = scored.into_iter().max_by(|(sa, a), (sb, b)| {
        sa.cmp(sb).then_with(|| b.ops.len().cmp(&a.ops.len())).then_with(|| b.ops.cmp(&a.ops))
    })?;
    let value = if pr.objective().is_minimizing() { -score } else { score };
    Some((value, best.ops.clone()))
}

/// Nondominated (cost, utility) pairs over every enumerated plan.
pub fn oracle_front(pr: &Problem) -> BTreeSet<(Rational, Rational)> {
    let pairs: BTreeSet<(Rational, Rational)> = enumerate(pr).into_iter().map(|p| (p.cost, p.utility)).collect();
    pairs
        .iter()
        .filter(|(c, u)| !pairs.iter().any(|(c2, u2)| c2 <= c && u2 >= u && (c2 < c || u2 > u)))
        .cloned()
        .collect()
}

pub const OBJECTIVES: [ObjectiveKind; 3] =
    [ObjectiveKind::MinCost, ObjectiveKind::NetBenefit, ObjectiveKind::DiscountedNetBenefit];

/// Small seeded instances within the brute-force-friendly size box
/// (≤ 3 variables, domain ≤ 3, ≤ 5 operators, k ≤ 5), cycling through
/// every class and objective.
pub fn small_instances(count: u64, base_seed: u64) -> Vec<Problem> {
    (0..count)
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            let class = InstanceClass::ALL[(i % 3) as usize];
            let objective = OBJECTIVES[((i / 3) % 3) as usize];
            let vars = 1 + (seed % 3) as usize;
            let dom = 2 + ((seed / 3) % 2) as usize;
            let ops = 1 + ((seed / 7) % 5) as usize;
            let k = 1 + ((seed / 11) % 5) as usize;
            let g = GenClass::new(class, seed).sizes(vars, dom, ops, k);
            gen_instance(&g, objective).expect("sizes in range")
        })
        .collect()
}

/// Serialized generated problems plus the worked example.
pub fn problem_corpus() -> Vec<String> {
    let mut out: Vec<String> = small_instances(150, 0).iter().map(serialize_problem).collect();
    for (i, class) in InstanceClass::ALL.into_iter().enumerate() {
        for objective in OBJECTIVES {
            let g = GenClass::new(class, 31 * i as u64).sizes(4, 5, 12, 9);
            out.push(serialize_problem(&gen_instance(&g, objective).unwrap()));
        }
    }
    out.push(TWO_OP.to_string());
    out
}

fn amount(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(0..20), rng.gen_range(1..5))
}

/// A random well-formed dialog spec.
pub fn random_spec(seed: u64) -> DialogSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slots: Vec<Slot<Rational>> = (0..rng.gen_range(1..4))
        .map(|i| {
            let answers: Vec<String> = (0..rng.gen_range(1..4)).map(|a| format!("ans{a}")).collect();
            Slot {
                name: format!("slot{i}"),
                prompt: format!("Which \"value\" for slot {i}?\\"),
                default_answer: answers[rng.gen_range(0..answers.len())].clone(),
                answers,
                ask_cost: amount(&mut rng),
            }
        })
        .collect();
    let queries: Vec<Query<Rational>> = (0..rng.gen_range(1..3))
        .map(|i| Query {
            name: format!("q{i}"),
            requires: slots
                .iter()
                .filter(|_| rng.gen_bool(0.6))
                .map(|s| s.name.clone())
                .chain(["slot0".to_string()])
                .fold(Vec::new(), |mut acc, s| {
                    if !acc.contains(&s) {
                        acc.push(s);
                    }
                    acc
                }),
            run_cost: amount(&mut rng),
            utility: amount(&mut rng),
        })
        .collect();
    let advisories: Vec<Advisory<Rational>> = (0..rng.gen_range(0..3))
        .map(|i| Advisory {
            name: format!("adv{i}"),
            requires_queries: queries.iter().filter(|_| rng.gen_bool(0.5)).map(|q| q.name.clone()).collect(),
            message_template: format!("Result for {{slot0}} number {i}."),
            cost: amount(&mut rng),
            utility: amount(&mut rng),
        })
        .collect();
    let discount = if rng.gen_bool(0.5) { Some(ratio(rng.gen_range(1..=10), 10)) } else { None };
    DialogSpec::new(format!("spec{seed}"), slots, queries, advisories, rng.gen_range(1..8), discount).unwrap()
}

/// Asserts that an error position points into `text`.
pub fn check_position(text: &str, e: &SourceError) {
    let lines: Vec<&str> = text.split('\n').collect();
    assert!(e.line >= 1 && e.line <= lines.len(), "line {} of {} for {e}", e.line, lines.len());
    let width = lines[e.line - 1].chars().count();
    assert!(e.column >= 1 && e.column <= width + 1, "column {} of {width} for {e}", e.column);
    assert!(!e.message.is_empty());
}

/// Random byte-level edits of a seed text.
pub fn mutate(rng: &mut ChaCha8Rng, seed: &str) -> String {
    const PIECES: &[&str] = &[
        "{",
        "}",
        "=",
        ",",
        ";",
        ":",
        "/",
        "-",
        "\"",
        "#",
        "\n",
        "\r\n",
        " ",
        "0",
        "1/0",
        "99999999999999999999",
        "x",
        "op",
        "var",
        "goal",
        "unknown",
        "\\",
        "\u{0}",
        "é",
        "{slot0}",
        "{",
        "horizon 0",
        "pre:",
        "eff:",
        "cost:",
        "utility:",
    ];
    let mut bytes = seed.as_bytes().to_vec();
    for _ in 0..rng.gen_range(1..6) {
        let len = bytes.len();
        match rng.gen_range(0..6) {
            0 if len > 0 => {
                let at = rng.gen_range(0..len);
                let end = (at + rng.gen_range(1..12)).min(len);
                bytes.drain(at..end);
            }
            1 => {
                let at = rng.gen_range(0..=len);
                let piece = PIECES[rng.gen_range(0..PIECES.len())].as_bytes();
                bytes.splice(at..at, piece.iter().copied());
            }
            2 if len > 0 => {
                let at = rng.gen_range(0..len);
                bytes[at] = rng.gen();
            }
            3 if len > 0 => {
                let at = rng.gen_range(0..len);
                let end = (at + rng.gen_range(1..40)).min(len);
                let chunk: Vec<u8> = bytes[at..end].to_vec();
                let to = rng.gen_range(0..=len);
                bytes.splice(to..to, chunk);
            }
            4 if len > 0 => bytes.truncate(rng.gen_range(0..len)),
            _ => {
                let at = rng.gen_range(0..=len);
                let junk: Vec<u8> = (0..rng.gen_range(1..8)).map(|_| rng.gen()).collect();
                bytes.splice(at..at, junk);
            }
        }
    }
    String::from_utf8_lossy(&bytes).into_owned()
}

/// `count` mutated problem and dialog texts plus a few hand-picked
/// pathological inputs.
pub fn fuzz_inputs(count: usize, seed: u64) -> Vec<String> {
    let mut seeds = problem_corpus();
    seeds.truncate(40);
    let dialog_seeds: Vec<String> =
        (0..20).map(|i| serialize_dialog_spec(&random_spec(i))).chain([WATER.to_string()]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs: Vec<String> = vec![
        String::new(),
        "{".repeat(5000),
        "}".repeat(5000),
        "\"".repeat(3),
        "problem".to_string(),
        "dialog d\n".to_string(),
        String::from_utf8_lossy(&(0..=255u8).collect::<Vec<_>>()).into_owned(),
    ];
    for i in 0..count {
        let pool = if i % 3 == 0 { &dialog_seeds } else { &seeds };
        let seed = &pool[rng.gen_range(0..pool.len())];
        inputs.push(mutate(&mut rng, seed));
    }
    inputs
}
