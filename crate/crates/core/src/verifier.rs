//! Exact-oracle validation of the construction: every structural claim is
//! recomputed from scratch with BFS oracles and exact rational arithmetic and
//! compared against what the protocol produced. Failing checks always carry
//! a concrete witness.

use std::collections::{BTreeMap, BTreeSet};

use num::bigint::BigInt;
use num::BigRational;
use serde_json::json;

use crate::graph::{bfs, multi_source_bfs, Graph, VertexId, UNREACHABLE};
use crate::protocol::{CenterKnowledge, ClusterCollection, ExecutionTrace};
use crate::rational::{ceil_pow, floor_to_u64, rat_u64, rational_to_f64, RationalRepr};
use crate::schedule::{EpsilonMode, PhaseSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerificationLevel {
    Fast,
    Full,
    Deep,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub witness: Option<String>,
}

impl CheckResult {
    fn pass(name: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            pass: true,
            witness: None,
        }
    }

    fn fail(name: impl Into<String>, witness: String) -> Self {
        CheckResult {
            name: name.into(),
            pass: false,
            witness: Some(witness),
        }
    }
}

/// A measured quantity against an asymptotic shape; informational only.
#[derive(Debug, Clone)]
pub struct BoundComparison {
    pub quantity: String,
    pub measured: f64,
    pub bound: f64,
    pub slack_factor: f64,
}

#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    /// Worst observed additive surplus d_H - d_G and the pair attaining it.
    pub max_stretch_observed: Option<(u64, (VertexId, VertexId))>,
    pub edge_count: usize,
    pub round_total: u64,
    pub bound_comparisons: Vec<BoundComparison>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "pass": c.pass,
                "witness": c.witness,
            })).collect::<Vec<_>>(),
            "maxStretchObserved": self.max_stretch_observed.map(|(s, (u, v))| json!({
                "surplus": s, "pair": [u, v],
            })),
            "edgeCount": self.edge_count,
            "roundTotal": self.round_total,
            "boundComparisons": self.bound_comparisons.iter().map(|b| json!({
                "quantity": b.quantity,
                "measured": b.measured,
                "bound": b.bound,
                "slackFactor": b.slack_factor,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Centers with at least `deg` other centers within `depth` hops, recomputed
/// by brute force.
pub fn popular_oracle(
    graph: &Graph,
    centers: &BTreeSet<VertexId>,
    deg: u64,
    depth: u64,
) -> BTreeSet<VertexId> {
    centers
        .iter()
        .copied()
        .filter(|&r| {
            let row = bfs(graph, r, Some(depth.min(u64::from(u32::MAX)) as u32)).unwrap();
            let within = centers
                .iter()
                .filter(|&&c| c != r && row.reachable(c))
                .count() as u64;
            within >= deg
        })
        .collect()
}

pub fn check_popular_oracle(
    graph: &Graph,
    collection: &ClusterCollection,
    deg: u64,
    depth: u64,
    w: &BTreeSet<VertexId>,
    phase: u64,
) -> CheckResult {
    let name = format!("popular_oracle.phase{phase}");
    let oracle = popular_oracle(graph, &collection.centers(), deg, depth);
    if &oracle == w {
        CheckResult::pass(name)
    } else {
        let extra: Vec<_> = w.difference(&oracle).collect();
        let missing: Vec<_> = oracle.difference(w).collect();
        CheckResult::fail(
            name,
            format!("protocol-only centers {extra:?}, oracle-only centers {missing:?}"),
        )
    }
}

pub fn check_knowledge(
    graph: &Graph,
    collection: &ClusterCollection,
    deg: u64,
    depth: u64,
    knowledge: &[CenterKnowledge],
    w: &BTreeSet<VertexId>,
    phase: u64,
) -> CheckResult {
    let name = format!("knowledge.phase{phase}");
    let centers = collection.centers();
    let depth32 = depth.min(u64::from(u32::MAX)) as u32;
    for u in 0..graph.n() {
        let k = &knowledge[u as usize];
        let row = bfs(graph, u, Some(depth32)).unwrap();
        let near: BTreeMap<VertexId, u64> = centers
            .iter()
            .filter(|&&c| c != u && row.reachable(c))
            .map(|&c| (c, u64::from(row.dist[c as usize])))
            .collect();
        // Non-popular centers know every center in range, at exact distance.
        if centers.contains(&u) && !w.contains(&u) {
            let known: BTreeSet<_> = k.entries.iter().map(|e| e.center).collect();
            let expect: BTreeSet<_> = near.keys().copied().collect();
            if known != expect {
                return CheckResult::fail(
                    name,
                    format!("center {u}: knows {known:?}, in-range set is {expect:?}"),
                );
            }
            for e in &k.entries {
                if e.dist != near[&e.center] {
                    return CheckResult::fail(
                        name,
                        format!(
                            "center {u}: recorded distance {} to {}, true distance {}",
                            e.dist, e.center, near[&e.center]
                        ),
                    );
                }
            }
        }
        // Everyone knows at least min(deg, #centers in range), counting a
        // center's implicit self entry.
        let self_bonus = u64::from(centers.contains(&u));
        let in_range = near.len() as u64 + self_bonus;
        let knows = k.entries.len() as u64 + self_bonus;
        if knows < deg.min(in_range) {
            return CheckResult::fail(
                name,
                format!(
                    "vertex {u}: knows {knows} centers, expected at least {}",
                    deg.min(in_range)
                ),
            );
        }
        // Predecessor chains must strictly descend to the center.
        for e in &k.entries {
            let (mut at, mut d) = (e.pred, e.dist);
            while d > 1 {
                match knowledge[at as usize].lookup(e.center) {
                    Some(next) if next.dist == d - 1 => {
                        d = next.dist;
                        at = next.pred;
                    }
                    other => {
                        return CheckResult::fail(
                            name,
                            format!(
                                "vertex {u}: chain to {} breaks at {at} ({other:?})",
                                e.center
                            ),
                        );
                    }
                }
            }
            if at != e.center {
                return CheckResult::fail(
                    name,
                    format!("vertex {u}: chain to {} ends at {at}", e.center),
                );
            }
        }
    }
    CheckResult::pass(name)
}

pub fn check_ruling(
    graph: &Graph,
    w: &BTreeSet<VertexId>,
    rs: &BTreeSet<VertexId>,
    q: u64,
    cq: u64,
    phase: u64,
) -> CheckResult {
    let name = format!("ruling.phase{phase}");
    if !rs.is_subset(w) {
        return CheckResult::fail(name, format!("RS {rs:?} not a subset of W"));
    }
    for &a in rs {
        let row = bfs(graph, a, None).unwrap();
        for &b in rs {
            if a < b {
                if let Some(d) = row.get(b) {
                    if u64::from(d) < q + 1 {
                        return CheckResult::fail(
                            name,
                            format!("members {a}, {b} at distance {d} < {}", q + 1),
                        );
                    }
                }
            }
        }
    }
    if !rs.is_empty() {
        let sources: Vec<_> = rs.iter().copied().collect();
        let dist = multi_source_bfs(graph, &sources, None);
        for &v in w {
            let d = dist[v as usize];
            if d == UNREACHABLE || u64::from(d) > cq {
                return CheckResult::fail(name, format!("candidate {v} not within {cq} of RS"));
            }
        }
    } else if !w.is_empty() {
        return CheckResult::fail(name, format!("W nonempty ({} members) but RS empty", w.len()));
    }
    CheckResult::pass(name)
}

fn cluster_radius(h: &Graph, center: VertexId, members: &BTreeSet<VertexId>) -> Option<u64> {
    let row = bfs(h, center, None).unwrap();
    members
        .iter()
        .map(|&m| row.get(m).map(u64::from))
        .collect::<Option<Vec<_>>>()
        .map(|d| d.into_iter().max().unwrap_or(0))
}

/// Count bound of the form count <= n^(p/q) with integer p possibly
/// negative; evaluated exactly in big integers.
fn count_within_power(count: u64, n: u64, p: i64, q: u64) -> bool {
    if p < 0 {
        return count == 0;
    }
    BigInt::from(count).pow(q as u32) <= BigInt::from(n).pow(p as u32)
}

pub fn check_structure(
    trace: &ExecutionTrace,
    schedule: &PhaseSchedule,
    graph: &Graph,
) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let n = u64::from(graph.n());
    let kappa = schedule.kappa as i64;
    let c = schedule.c as i64;
    let i0 = schedule.i0 as i64;

    // Cluster radii, measured in the spanner edges of earlier phases.
    let mut acc: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    for p in &trace.phases {
        let name = format!("radius.phase{}", p.phase);
        let h = graph.edge_subgraph(&acc).expect("spanner edges exist in G");
        let bound = &schedule.r[p.phase as usize];
        let mut ok = CheckResult::pass(&name);
        for cluster in p.collection.clusters.values() {
            match cluster_radius(&h, cluster.center, &cluster.members) {
                Some(rad) if rat_u64(rad, 1) <= *bound => {}
                r => {
                    ok = CheckResult::fail(
                        &name,
                        format!(
                            "cluster {} has radius {r:?}, bound {bound}",
                            cluster.center
                        ),
                    );
                    break;
                }
            }
        }
        out.push(ok);
        acc.extend(p.edges_added());
    }

    // Every popular cluster of a non-final phase was absorbed.
    for p in &trace.phases {
        if p.phase == schedule.ell {
            continue;
        }
        let name = format!("popular_absorbed.phase{}", p.phase);
        match p.w.iter().find(|c| p.u.clusters.contains_key(c)) {
            Some(&cid) => out.push(CheckResult::fail(
                name,
                format!("popular center {cid} retired unabsorbed"),
            )),
            None => out.push(CheckResult::pass(name)),
        }
    }

    // Retired clusters form an exact partition of V, and each phase splits
    // its collection exactly into retained and retired vertices.
    {
        let name = "retired_partition";
        let mut seen: BTreeMap<VertexId, u64> = BTreeMap::new();
        for p in &trace.phases {
            for cluster in p.u.clusters.values() {
                for &m in &cluster.members {
                    if let Some(prev) = seen.insert(m, p.phase) {
                        out.push(CheckResult::fail(
                            name,
                            format!("vertex {m} retired in phases {prev} and {}", p.phase),
                        ));
                        return out;
                    }
                }
            }
        }
        if seen.len() == graph.n() as usize {
            out.push(CheckResult::pass(name));
        } else {
            let missing = (0..graph.n()).find(|v| !seen.contains_key(v));
            out.push(CheckResult::fail(
                name,
                format!("vertex {missing:?} never retired"),
            ));
        }
    }
    for win in trace.phases.windows(2) {
        let name = format!("phase_split.phase{}", win[0].phase);
        let prev: BTreeSet<VertexId> = win[0]
            .collection
            .clusters
            .values()
            .flat_map(|c| c.members.iter().copied())
            .collect();
        let mut next: BTreeSet<VertexId> = win[1]
            .collection
            .clusters
            .values()
            .flat_map(|c| c.members.iter().copied())
            .collect();
        let retired: BTreeSet<VertexId> = win[0]
            .u
            .clusters
            .values()
            .flat_map(|c| c.members.iter().copied())
            .collect();
        if next.intersection(&retired).next().is_some() {
            out.push(CheckResult::fail(
                &name,
                "retained and retired vertex sets overlap".into(),
            ));
            continue;
        }
        next.extend(retired);
        if next == prev {
            out.push(CheckResult::pass(&name));
        } else {
            out.push(CheckResult::fail(
                &name,
                format!("split covers {} of {} vertices", next.len(), prev.len()),
            ));
        }
    }

    // Collection size decay, exactly: |P_i| <= n^{1-(2^i-1)/kappa} in the
    // doubling stage and |P_i| <= n^{1+1/kappa-(i-i0)/c} afterwards;
    // |P_last| <= ceil(n^{1/c}).
    for p in &trace.phases {
        let i = p.phase as i64;
        let count = p.collection.len() as u64;
        let name = format!("collection_size.phase{}", p.phase);
        let ok = if i <= i0 + 1 {
            // count^kappa <= n^{kappa - (2^i - 1)}
            count_within_power(count, n, kappa - ((1i64 << i) - 1), schedule.kappa)
        } else {
            // count^{kappa*c} <= n^{kappa*c + c - (i-i0)*kappa}
            count_within_power(
                count,
                n,
                kappa * c + c - (i - i0) * kappa,
                schedule.kappa * schedule.c,
            )
        };
        if ok {
            out.push(CheckResult::pass(&name));
        } else {
            out.push(CheckResult::fail(
                &name,
                format!("collection has {count} clusters, above the stage bound"),
            ));
        }
    }
    if let Some(last) = trace.phases.last() {
        let name = "final_collection_size";
        let cap = ceil_pow(n, 1, schedule.c);
        if last.collection.len() as u64 <= cap {
            out.push(CheckResult::pass(name));
        } else {
            out.push(CheckResult::fail(
                name,
                format!("final collection {} > {cap}", last.collection.len()),
            ));
        }
    }
    out
}

pub fn check_interconnection_completeness(
    trace: &ExecutionTrace,
    graph: &Graph,
    schedule: &PhaseSchedule,
    h: &Graph,
) -> CheckResult {
    let name = "interconnection_completeness";
    for p in &trace.phases {
        let depth = floor_to_u64(&schedule.delta[p.phase as usize]);
        let depth32 = depth.min(u64::from(u32::MAX)) as u32;
        let all_centers = p.collection.centers();
        for &rc in p.u.clusters.keys() {
            let g_row = bfs(graph, rc, Some(depth32)).unwrap();
            let h_row = bfs(h, rc, None).unwrap();
            for &other in &all_centers {
                if other == rc || !g_row.reachable(other) {
                    continue;
                }
                let dg = g_row.dist[other as usize];
                match h_row.get(other) {
                    Some(dh) if dh == dg => {}
                    dh => {
                        return CheckResult::fail(
                            name,
                            format!(
                                "phase {}: centers ({rc}, {other}) at d_G {dg} but d_H {dh:?}",
                                p.phase
                            ),
                        );
                    }
                }
            }
        }
    }
    CheckResult::pass(name)
}

pub fn check_neighbor_cluster_distance(
    trace: &ExecutionTrace,
    graph: &Graph,
    schedule: &PhaseSchedule,
    h: &Graph,
) -> CheckResult {
    let name = "neighbor_cluster_distance";
    let retired: Vec<_> = trace
        .phases
        .iter()
        .flat_map(|p| p.u.clusters.values().map(move |c| (p.phase, c)))
        .collect();
    for (i_phase, ci) in &retired {
        let r_i = &schedule.r[*i_phase as usize];
        let center_row = bfs(h, ci.center, None).unwrap();
        for (j_phase, cj) in &retired {
            if j_phase >= i_phase {
                continue;
            }
            let touching = cj.members.iter().any(|&w| {
                graph
                    .neighbors(w)
                    .iter()
                    .any(|x| ci.members.contains(x))
            });
            if !touching {
                continue;
            }
            let r_j = &schedule.r[*j_phase as usize];
            let bound1 = rat_u64(3, 1) * r_j + rat_u64(1, 1) + r_i;
            let bound2 = rat_u64(2, 1) * r_i + rat_u64(1, 1);
            for &w in &cj.members {
                match center_row.get(w) {
                    Some(d) => {
                        let d = rat_u64(u64::from(d), 1);
                        if d > bound1 || d > bound2 {
                            return CheckResult::fail(
                                name,
                                format!(
                                    "vertex {w} (cluster {}, phase {j_phase}) at d_H {d} from \
                                     center {} (phase {i_phase}); bounds {bound1}, {bound2}",
                                    cj.center, ci.center
                                ),
                            );
                        }
                    }
                    None => {
                        return CheckResult::fail(
                            name,
                            format!("vertex {w} unreachable from center {}", ci.center),
                        );
                    }
                }
            }
        }
    }
    CheckResult::pass(name)
}

/// The stretch inequality that applies to this schedule, if any:
/// d_H <= (1+eps')d_G + beta in guaranteed mode, and the internal bound
/// d_H <= (1 + 30*eps*ell/rho)d_G + 30/(rho*eps^{ell-1}) when the
/// exploratory parameters support it.
fn stretch_bound(schedule: &PhaseSchedule) -> Option<(BigRational, BigRational)> {
    match schedule.mode {
        EpsilonMode::Guaranteed => Some((
            rat_u64(1, 1) + &schedule.eps_user,
            schedule.beta.clone(),
        )),
        EpsilonMode::Exploratory if schedule.stretch_bound_holds => {
            let mult = rat_u64(1, 1)
                + rat_u64(30 * schedule.ell, 1) * &schedule.eps_internal / &schedule.rho;
            let add = rat_u64(30, 1) / (&schedule.rho * schedule.eps_pow_neg(schedule.ell - 1).recip());
            Some((mult, add))
        }
        _ => None,
    }
}

pub fn check_stretch(
    graph: &Graph,
    h: &Graph,
    schedule: &PhaseSchedule,
    sample_sources: Option<usize>,
) -> (CheckResult, Option<(u64, (VertexId, VertexId))>) {
    let name = "stretch";
    let bound = stretch_bound(schedule);
    let n = graph.n();
    let sources: Vec<VertexId> = match sample_sources {
        Some(k) if (k as u32) < n => {
            // Deterministic spread of k sources.
            (0..k as u32).map(|i| (i * n) / k as u32).collect()
        }
        _ => (0..n).collect(),
    };
    let mut worst: Option<(u64, (VertexId, VertexId))> = None;
    for &s in &sources {
        let g_row = bfs(graph, s, None).unwrap();
        let h_row = bfs(h, s, None).unwrap();
        for v in 0..n {
            if v == s || !g_row.reachable(v) {
                continue;
            }
            let dg = u64::from(g_row.dist[v as usize]);
            let dh = match h_row.get(v) {
                Some(d) => u64::from(d),
                None => {
                    return (
                        CheckResult::fail(
                            name,
                            format!("pair ({s}, {v}) connected in G but not in the spanner"),
                        ),
                        worst,
                    );
                }
            };
            let surplus = dh - dg;
            if worst.map_or(true, |(w, _)| surplus > w) {
                worst = Some((surplus, (s, v)));
            }
            if let Some((mult, add)) = &bound {
                let allowed = mult * rat_u64(dg, 1) + add;
                if rat_u64(dh, 1) > allowed {
                    return (
                        CheckResult::fail(
                            name,
                            format!(
                                "pair ({s}, {v}): d_G {dg}, d_H {dh} exceeds {}",
                                rational_to_f64(&allowed)
                            ),
                        ),
                        worst,
                    );
                }
            }
        }
    }
    (CheckResult::pass(name), worst)
}

pub fn check_budgets(
    trace: &ExecutionTrace,
    schedule: &PhaseSchedule,
    graph: &Graph,
    comparisons: &mut Vec<BoundComparison>,
) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let n = u64::from(graph.n());
    for p in &trace.phases {
        let i = p.phase as usize;
        let deg = schedule.deg[i];
        let depth = floor_to_u64(&schedule.delta[i]);
        // Detection consumes its closed-form round count exactly.
        let name = format!("round_budget_popular.phase{}", p.phase);
        let expect = 1 + depth * deg;
        if p.rounds_popular.prescribed == expect && p.rounds_popular.executed <= expect {
            out.push(CheckResult::pass(&name));
        } else {
            out.push(CheckResult::fail(
                &name,
                format!(
                    "prescribed {} executed {} expected {expect}",
                    p.rounds_popular.prescribed, p.rounds_popular.executed
                ),
            ));
        }
        // Ruling-set round ceiling.
        let name = format!("round_budget_ruling.phase{}", p.phase);
        let q = schedule.q(i);
        let b = ceil_pow(n, 1, schedule.c).max(2);
        let cap = schedule.c * b * q + 4 * schedule.c * q;
        if p.rounds_ruling.executed <= cap {
            out.push(CheckResult::pass(&name));
        } else {
            out.push(CheckResult::fail(
                &name,
                format!("executed {} > {cap}", p.rounds_ruling.executed),
            ));
        }
        // Edge accounting: forest paths contribute < n edges; each retired
        // cluster contributes <= deg paths of <= ceil(delta) edges.
        let name = format!("edge_budget.phase{}", p.phase);
        let edges = p.edges_added().len() as u64;
        let delta_ceil = crate::rational::ceil_to_u64(&schedule.delta[i]);
        let cap = n + p.collection.len() as u64 * deg * delta_ceil;
        if edges <= cap {
            out.push(CheckResult::pass(&name));
        } else {
            out.push(CheckResult::fail(&name, format!("{edges} edges > {cap}")));
        }
    }
    // Whole-run round ceiling.
    {
        let name = "round_budget_total";
        let total = trace.total_prescribed_rounds();
        let cap = crate::protocol::round_budget_bound(schedule);
        if total <= cap {
            out.push(CheckResult::pass(name));
        } else {
            out.push(CheckResult::fail(name, format!("{total} rounds > {cap}")));
        }
        let beta = rational_to_f64(&schedule.beta);
        let n_rho = ceil_pow(n, 1, schedule.c) as f64;
        let round_shape = beta * n_rho * schedule.c as f64;
        comparisons.push(BoundComparison {
            quantity: "totalRounds".into(),
            measured: total as f64,
            bound: round_shape,
            slack_factor: total as f64 / round_shape,
        });
        let edges: BTreeSet<_> = trace.phases.iter().flat_map(|p| p.edges_added()).collect();
        let edge_shape = beta * (n as f64).powf(1.0 + 1.0 / schedule.kappa as f64);
        comparisons.push(BoundComparison {
            quantity: "spannerEdges".into(),
            measured: edges.len() as f64,
            bound: edge_shape,
            slack_factor: edges.len() as f64 / edge_shape,
        });
    }
    out
}

/// Edge-set conservation: the spanner equals the deduplicated union of the
/// per-phase additions and is a subgraph of G.
fn check_edge_conservation(
    trace: &ExecutionTrace,
    graph: &Graph,
    e_h: &BTreeSet<(VertexId, VertexId)>,
) -> CheckResult {
    let name = "edge_conservation";
    let union: BTreeSet<_> = trace.phases.iter().flat_map(|p| p.edges_added()).collect();
    if &union != e_h {
        return CheckResult::fail(
            name,
            format!("trace accounts for {} edges, spanner has {}", union.len(), e_h.len()),
        );
    }
    for &(a, b) in e_h {
        if !graph.has_edge(a, b) {
            return CheckResult::fail(name, format!("spanner edge ({a}, {b}) not in G"));
        }
    }
    CheckResult::pass(name)
}

/// Runs the whole battery at the requested level.
pub fn verify(
    graph: &Graph,
    schedule: &PhaseSchedule,
    e_h: &BTreeSet<(VertexId, VertexId)>,
    trace: &ExecutionTrace,
    level: VerificationLevel,
) -> VerificationReport {
    let mut report = VerificationReport {
        edge_count: e_h.len(),
        round_total: trace.total_prescribed_rounds(),
        ..Default::default()
    };
    let h = graph.edge_subgraph(e_h).expect("spanner edges exist in G");

    for p in &trace.phases {
        let i = p.phase as usize;
        let depth = floor_to_u64(&schedule.delta[i]);
        let deg = schedule.deg[i];
        report.checks.push(check_popular_oracle(
            graph,
            &p.collection,
            deg,
            depth,
            &p.w,
            p.phase,
        ));
        if level != VerificationLevel::Fast {
            report.checks.push(check_knowledge(
                graph,
                &p.collection,
                deg,
                depth,
                &p.knowledge,
                &p.w,
                p.phase,
            ));
        }
        if p.phase < schedule.ell {
            let q = schedule.q(i);
            report.checks.push(check_ruling(
                graph,
                &p.w,
                &p.rs,
                q,
                schedule.c * q,
                p.phase,
            ));
        }
    }
    report.checks.extend(check_structure(trace, schedule, graph));
    report
        .checks
        .push(check_edge_conservation(trace, graph, e_h));
    if level != VerificationLevel::Fast {
        report
            .checks
            .push(check_interconnection_completeness(trace, graph, schedule, &h));
    }
    if level == VerificationLevel::Deep {
        report
            .checks
            .push(check_neighbor_cluster_distance(trace, graph, schedule, &h));
    }
    let sample = match level {
        VerificationLevel::Fast => Some(64),
        _ if graph.n() <= 2048 => None,
        _ => Some(256),
    };
    let (stretch, worst) = check_stretch(graph, &h, schedule, sample);
    report.checks.push(stretch);
    report.max_stretch_observed = worst;
    let mut comparisons = Vec::new();
    report
        .checks
        .extend(check_budgets(trace, schedule, graph, &mut comparisons));
    report.bound_comparisons = comparisons;
    report
}

/// Convenience used by the report JSON: schedule parameters rendered exactly.
pub fn schedule_json(schedule: &PhaseSchedule) -> serde_json::Value {
    let mut v = schedule.to_json();
    v["beta"] = json!(RationalRepr::of(&schedule.beta));
    v
}
