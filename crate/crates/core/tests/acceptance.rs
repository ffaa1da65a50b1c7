//! Acceptance battery. Each test prints one PASS/FAIL line; run with
//! `--nocapture` to see them on success.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num::BigRational;
use spanner_core::gen;
use spanner_core::graph::{format_edge_set, Graph, VertexId};
use spanner_core::protocol::{build_spanner, ExecutionTrace};
use spanner_core::rational::{ceil_pow, floor_to_u64, rat_u64};
use spanner_core::schedule::{build_schedule, EpsilonMode, PhaseSchedule, ScheduleParams};
use spanner_core::verifier::{
    check_budgets, check_interconnection_completeness, check_knowledge, check_popular_oracle,
    check_ruling, check_stretch, check_structure, CheckResult,
};

const KAPPA: u64 = 4;
const C: u64 = 3;

struct Instance {
    label: String,
    graph: Graph,
    schedule: PhaseSchedule,
    e_h: BTreeSet<(VertexId, VertexId)>,
    trace: ExecutionTrace,
}

fn exploratory(n: u64, eps: BigRational) -> PhaseSchedule {
    build_schedule(&ScheduleParams {
        n,
        kappa: KAPPA,
        c: C,
        mode: EpsilonMode::Exploratory,
        eps_arg: eps,
    })
    .unwrap()
}

fn build_instance(label: String, graph: Graph, schedule: PhaseSchedule) -> Instance {
    let (e_h, trace) = build_spanner(&graph, &schedule).expect(&label);
    Instance {
        label,
        graph,
        schedule,
        e_h,
        trace,
    }
}

/// 54 random instances plus adversarial structured graphs, built once with
/// the exploratory eps = 1/2 parameter point.
fn corpus() -> &'static Vec<Instance> {
    static CORPUS: OnceLock<Vec<Instance>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut out = Vec::new();
        for n in [32u32, 64, 128] {
            for (pn, pd) in [(1u64, 20u64), (1, 10), (1, 5)] {
                for seed in 1..=6u64 {
                    let g = gen::gnp(n, &rat_u64(pn, pd), seed);
                    let s = exploratory(u64::from(n), rat_u64(1, 2));
                    out.push(build_instance(
                        format!("gnp n={n} p={pn}/{pd} seed={seed}"),
                        g,
                        s,
                    ));
                }
            }
        }
        for (label, g) in [
            ("path64", gen::path(64)),
            ("path127", gen::path(127)),
            ("grid8x8", gen::grid(8, 8)),
            ("grid5x20", gen::grid(5, 20)),
            ("barbell8x30", gen::barbell(8, 30)),
            ("complete16", gen::complete(16)),
            ("cycle64", gen::cycle(64)),
        ] {
            let s = exploratory(u64::from(g.n()), rat_u64(1, 2));
            out.push(build_instance(label.to_string(), g, s));
        }
        out
    })
}

fn report(criterion: u32, desc: &str, failures: &[String]) {
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE C{criterion} {desc}: {verdict}");
    assert!(
        failures.is_empty(),
        "criterion {criterion} failures: {failures:?}"
    );
}

fn collect(failures: &mut Vec<String>, label: &str, result: CheckResult) {
    if !result.pass {
        failures.push(format!(
            "{label}: {} — {}",
            result.name,
            result.witness.unwrap_or_default()
        ));
    }
}

#[test]
fn criterion_1_popularity_oracle_equivalence() {
    let mut failures = Vec::new();
    for inst in corpus() {
        for p in &inst.trace.phases {
            let i = p.phase as usize;
            let deg = inst.schedule.deg[i];
            let depth = floor_to_u64(&inst.schedule.delta[i]);
            collect(
                &mut failures,
                &inst.label,
                check_popular_oracle(&inst.graph, &p.collection, deg, depth, &p.w, p.phase),
            );
            collect(
                &mut failures,
                &inst.label,
                check_knowledge(
                    &inst.graph,
                    &p.collection,
                    deg,
                    depth,
                    &p.knowledge,
                    &p.w,
                    p.phase,
                ),
            );
        }
    }
    report(
        1,
        "popularity detection and knowledge match brute-force oracles",
        &failures,
    );
}

#[test]
fn criterion_2_ruling_set_contract() {
    let mut failures = Vec::new();
    for inst in corpus() {
        for p in &inst.trace.phases {
            if p.phase == inst.schedule.ell {
                continue;
            }
            let q = inst.schedule.q(p.phase as usize);
            collect(
                &mut failures,
                &inst.label,
                check_ruling(&inst.graph, &p.w, &p.rs, q, C * q, p.phase),
            );
            let b = ceil_pow(u64::from(inst.graph.n()), 1, C).max(2);
            let cap = C * b * q + 4 * C * q;
            if p.rounds_ruling.executed > cap {
                failures.push(format!(
                    "{}: phase {} ruling rounds {} > {cap}",
                    inst.label, p.phase, p.rounds_ruling.executed
                ));
            }
        }
    }
    report(2, "ruling sets separated, dominating, within round cost", &failures);
}

#[test]
fn criterion_3_structural_invariants() {
    let mut failures = Vec::new();
    for inst in corpus() {
        for res in check_structure(&inst.trace, &inst.schedule, &inst.graph) {
            collect(&mut failures, &inst.label, res);
        }
        let h = inst.graph.edge_subgraph(&inst.e_h).unwrap();
        collect(
            &mut failures,
            &inst.label,
            check_interconnection_completeness(&inst.trace, &inst.graph, &inst.schedule, &h),
        );
    }
    report(
        3,
        "radius, absorption, partition and size-decay invariants exact",
        &failures,
    );
}

#[test]
fn criterion_4_golden_traces() {
    let mut failures = Vec::new();
    // Complete graph on 16 vertices: the star at the maximum id.
    let g = gen::complete(16);
    let s = exploratory(16, rat_u64(1, 2));
    let (e_h, _) = build_spanner(&g, &s).unwrap();
    let star: BTreeSet<_> = (0..15u32).map(|v| (v, 15)).collect();
    if e_h != star {
        failures.push(format!("complete16: expected 15-edge star, got {e_h:?}"));
    }
    // 64-cycle: the spanner keeps every edge, stretch exactly 1.
    let g = gen::cycle(64);
    let s = exploratory(64, rat_u64(1, 2));
    let (e_h, trace) = build_spanner(&g, &s).unwrap();
    if e_h != g.edges().into_iter().collect::<BTreeSet<_>>() {
        failures.push(format!("cycle64: spanner dropped edges, {} of 64", e_h.len()));
    }
    let h = g.edge_subgraph(&e_h).unwrap();
    let (res, worst) = check_stretch(&g, &h, &s, None);
    if !res.pass || worst.map(|(w, _)| w) != Some(0) {
        failures.push(format!("cycle64: stretch not exactly 1 ({worst:?})"));
    }
    // Byte-identical artifacts on repeated runs.
    let (e2, t2) = build_spanner(&g, &s).unwrap();
    if format_edge_set(64, &e_h) != format_edge_set(64, &e2)
        || trace.replay_hash != t2.replay_hash
    {
        failures.push("cycle64: repeated runs differ".into());
    }
    report(4, "golden end-to-end traces reproduce exactly", &failures);
}

#[test]
fn criterion_5_stretch_bounds() {
    let mut failures = Vec::new();
    let mut worst_surplus = 0u64;
    let configs: Vec<(String, EpsilonMode, BigRational)> = vec![
        ("guaranteed eps'=1/2".into(), EpsilonMode::Guaranteed, rat_u64(1, 2)),
        ("guaranteed eps'=1".into(), EpsilonMode::Guaranteed, rat_u64(1, 1)),
        ("exploratory eps=1/30".into(), EpsilonMode::Exploratory, rat_u64(1, 30)),
    ];
    for inst in corpus() {
        for (cfg, mode, eps) in &configs {
            let s = build_schedule(&ScheduleParams {
                n: u64::from(inst.graph.n()),
                kappa: KAPPA,
                c: C,
                mode: *mode,
                eps_arg: eps.clone(),
            })
            .unwrap();
            assert!(s.stretch_bound_holds, "{cfg} must assert a stretch bound");
            let (e_h, _) = match build_spanner(&inst.graph, &s) {
                Ok(x) => x,
                Err(e) => {
                    failures.push(format!("{} [{cfg}]: {e}", inst.label));
                    continue;
                }
            };
            let h = inst.graph.edge_subgraph(&e_h).unwrap();
            let (res, worst) = check_stretch(&inst.graph, &h, &s, None);
            if !res.pass {
                failures.push(format!(
                    "{} [{cfg}]: {}",
                    inst.label,
                    res.witness.unwrap_or_default()
                ));
            }
            if let Some((w, _)) = worst {
                worst_surplus = worst_surplus.max(w);
            }
        }
    }
    println!("  worst observed additive surplus across corpus: {worst_surplus}");
    report(5, "all-pairs stretch bounds hold exactly", &failures);
}

#[test]
fn criterion_6_round_and_edge_budgets() {
    let mut failures = Vec::new();
    for inst in corpus() {
        let mut comparisons = Vec::new();
        for res in check_budgets(&inst.trace, &inst.schedule, &inst.graph, &mut comparisons) {
            collect(&mut failures, &inst.label, res);
        }
        for cmp in &comparisons {
            if !cmp.slack_factor.is_finite() {
                failures.push(format!("{}: bad slack for {}", inst.label, cmp.quantity));
            }
        }
    }
    report(6, "exact round counts and edge budgets respected", &failures);
}

#[test]
fn criterion_7_engine_safety_and_determinism() {
    let mut failures = Vec::new();
    // Bandwidth safety across the corpus: any violation would have aborted
    // the builds; double-check that the traces carry none.
    for inst in corpus() {
        for p in &inst.trace.phases {
            let executed = [
                p.rounds_popular,
                p.rounds_ruling,
                p.rounds_super,
                p.rounds_inter,
            ];
            if executed.iter().any(|r| r.executed > r.prescribed) {
                failures.push(format!("{}: phase {} over budget", inst.label, p.phase));
            }
        }
    }
    // Replay-hash determinism on a larger instance, ten runs.
    let g = gen::gnp(256, &rat_u64(1, 20), 7);
    let s = exploratory(256, rat_u64(1, 2));
    let mut hashes = BTreeSet::new();
    for _ in 0..10 {
        let (_, trace) = build_spanner(&g, &s).unwrap();
        hashes.insert(trace.replay_hash);
    }
    if hashes.len() != 1 {
        failures.push(format!("n=256 replay hashes diverged: {hashes:?}"));
    }
    report(7, "bandwidth-safe and replay-deterministic", &failures);
}

#[test]
fn criterion_8_schedule_exactness() {
    let mut failures = Vec::new();
    let mut rng: u64 = 0x5eed;
    let mut next = move || {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        rng
    };
    for trial in 0..1000u32 {
        let kappa = 3 + next() % 14; // [3, 16]
        let c = 3 + next() % (kappa - 2); // [3, kappa]
        let p = 1 + next() % 9;
        let q = p + 1 + next() % 40;
        let n = 2 + next() % 5000;
        for mode in [EpsilonMode::Exploratory, EpsilonMode::Guaranteed] {
            let s = match build_schedule(&ScheduleParams {
                n,
                kappa,
                c,
                mode,
                eps_arg: rat_u64(p, q),
            }) {
                Ok(s) => s,
                Err(e) => {
                    failures.push(format!("trial {trial}: rejected valid input: {e}"));
                    continue;
                }
            };
            // Closed form of the radius recurrence, term by term.
            for i in 0..=s.ell {
                let mut sum = rat_u64(0, 1);
                for j in 0..i {
                    let mut term = rat_u64(2 * c, 1) * s.eps_pow_neg(j);
                    for _ in 0..(i - 1 - j) {
                        term *= rat_u64(5 * c, 1);
                    }
                    sum += term;
                }
                if s.r[i as usize] != sum {
                    failures.push(format!("trial {trial}: R_{i} recurrence/closed-form split"));
                }
            }
            if s.beta != s.eps_pow_neg(s.ell) {
                failures.push(format!("trial {trial}: beta != eps^-ell"));
            }
            if mode == EpsilonMode::Guaranteed {
                let expect = &s.eps_user * &s.rho / rat_u64(30 * s.ell, 1);
                if s.eps_internal != expect {
                    failures.push(format!("trial {trial}: internal eps rescaling off"));
                }
            }
        }
    }
    report(8, "schedule identities exact on 1000 random parameter points", &failures);
}
