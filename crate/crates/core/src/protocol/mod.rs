//! The phased spanner construction, run as vertex programs on the simulator.
//! Each phase over the current cluster collection: popularity detection,
//! ruling-set selection among the popular centers, BFS superclustering with
//! path marking, and shortest-path interconnection of the retired clusters.
//! The last phase skips superclustering and retires everything.

mod interconnect;
mod popular;
mod ruling;
mod supercluster;

pub use interconnect::{interconnect, InterconnectOutcome};
pub use popular::{detect_popular, PopularOutcome};
pub use ruling::{ruling_set, RulingOutcome};
pub use supercluster::{supercluster, SuperclusterOutcome};

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;
use thiserror::Error;

use crate::engine::{EngineError, EngineTrace, DEFAULT_WORD_BUDGET};
use crate::graph::{Graph, VertexId};
use crate::rational::{ceil_to_u64, floor_to_u64, rat_u64};
use crate::schedule::PhaseSchedule;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("protocol bug (phase {phase}): {source}")]
    Engine {
        phase: u64,
        #[source]
        source: EngineError,
    },
    #[error(
        "protocol bug (phase {phase}): vertex {vertex} has no predecessor entry for target {target}"
    )]
    MissingPredecessor {
        phase: u64,
        vertex: VertexId,
        target: VertexId,
    },
    #[error("protocol bug (phase {phase}): round budget {budget} expired with messages in flight")]
    BudgetExpired { phase: u64, budget: u64 },
}

/// A cluster: a designated center vertex and its member set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub center: VertexId,
    pub members: BTreeSet<VertexId>,
}

impl Cluster {
    pub fn singleton(v: VertexId) -> Self {
        Cluster {
            center: v,
            members: [v].into_iter().collect(),
        }
    }
}

/// The active clusters of one phase, keyed by center id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClusterCollection {
    pub phase: u64,
    pub clusters: BTreeMap<VertexId, Cluster>,
}

impl ClusterCollection {
    pub fn singletons(n: u32) -> Self {
        ClusterCollection {
            phase: 0,
            clusters: (0..n).map(|v| (v, Cluster::singleton(v))).collect(),
        }
    }

    /// The center id set.
    pub fn centers(&self) -> BTreeSet<VertexId> {
        self.clusters.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

/// One learned entry: a center, the recorded hop distance to it, and the
/// neighbor the message arrived from (the next hop toward the center).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnowledgeEntry {
    pub center: VertexId,
    pub dist: u64,
    pub pred: VertexId,
}

/// Per-vertex knowledge accumulated by popularity detection: up to `deg`
/// learned centers, ordered by (distance, center id). A center's own entry
/// (itself at distance 0) is kept implicit and is not stored here.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CenterKnowledge {
    pub entries: Vec<KnowledgeEntry>,
}

impl CenterKnowledge {
    pub fn lookup(&self, center: VertexId) -> Option<&KnowledgeEntry> {
        self.entries.iter().find(|e| e.center == center)
    }
}

/// Per-vertex forest record from superclustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestEntry {
    pub root: VertexId,
    /// None exactly for the roots themselves.
    pub parent: Option<VertexId>,
    pub hop: u64,
}

/// Round accounting for one sub-operation: the closed-form budget the host
/// prescribes, and what the simulator actually used.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Rounds {
    pub prescribed: u64,
    pub executed: u64,
    pub messages: u64,
}

impl Rounds {
    fn of(prescribed: u64, trace: &EngineTrace) -> Self {
        Rounds {
            prescribed,
            executed: trace.rounds_executed,
            messages: trace.total_messages,
        }
    }
}

/// Everything observable about one phase, recorded for verification.
#[derive(Debug, Clone)]
pub struct PhaseRecord {
    pub phase: u64,
    /// The collection the phase started from.
    pub collection: ClusterCollection,
    pub w: BTreeSet<VertexId>,
    pub knowledge: Vec<CenterKnowledge>,
    pub rs: BTreeSet<VertexId>,
    /// Per popular center, the surviving vertex whose elimination chain
    /// covers it (itself if it survived).
    pub dominators: BTreeMap<VertexId, VertexId>,
    pub forest: Vec<Option<ForestEntry>>,
    /// Clusters retired (not absorbed) this phase.
    pub u: ClusterCollection,
    pub edges_super: BTreeSet<(VertexId, VertexId)>,
    pub edges_inter: BTreeSet<(VertexId, VertexId)>,
    pub rounds_popular: Rounds,
    pub rounds_ruling: Rounds,
    pub rounds_super: Rounds,
    pub rounds_inter: Rounds,
}

impl PhaseRecord {
    pub fn edges_added(&self) -> BTreeSet<(VertexId, VertexId)> {
        self.edges_super.union(&self.edges_inter).copied().collect()
    }

    pub fn rounds_total(&self) -> u64 {
        self.rounds_popular.prescribed
            + self.rounds_ruling.prescribed
            + self.rounds_super.prescribed
            + self.rounds_inter.prescribed
    }
}

#[derive(Debug, Clone)]
pub struct ExecutionTrace {
    pub phases: Vec<PhaseRecord>,
    /// Combined replay hash over every sub-run's delivery stream.
    pub replay_hash: u64,
}

impl ExecutionTrace {
    pub fn total_prescribed_rounds(&self) -> u64 {
        self.phases.iter().map(|p| p.rounds_total()).sum()
    }

    pub fn total_messages(&self) -> u64 {
        self.phases
            .iter()
            .map(|p| {
                p.rounds_popular.messages
                    + p.rounds_ruling.messages
                    + p.rounds_super.messages
                    + p.rounds_inter.messages
            })
            .sum()
    }

    pub fn to_json(&self, verbose: bool) -> serde_json::Value {
        let phases: Vec<_> = self
            .phases
            .iter()
            .map(|p| {
                let mut obj = json!({
                    "phase": p.phase,
                    "clusters": p.collection.len(),
                    "W": p.w.len(),
                    "RS": p.rs.len(),
                    "U": p.u.len(),
                    "edgesSuper": p.edges_super.len(),
                    "edgesInter": p.edges_inter.len(),
                    "rounds": {
                        "popular": [p.rounds_popular.prescribed, p.rounds_popular.executed],
                        "ruling": [p.rounds_ruling.prescribed, p.rounds_ruling.executed],
                        "supercluster": [p.rounds_super.prescribed, p.rounds_super.executed],
                        "interconnect": [p.rounds_inter.prescribed, p.rounds_inter.executed],
                    },
                });
                if verbose {
                    obj["members"] = json!(p
                        .collection
                        .clusters
                        .values()
                        .map(|c| (c.center, c.members.iter().collect::<Vec<_>>()))
                        .collect::<Vec<_>>());
                    obj["WSet"] = json!(p.w.iter().collect::<Vec<_>>());
                    obj["RSSet"] = json!(p.rs.iter().collect::<Vec<_>>());
                }
                obj
            })
            .collect();
        json!({
            "phases": phases,
            "totalPrescribedRounds": self.total_prescribed_rounds(),
            "totalMessages": self.total_messages(),
            "replayHash": format!("{:#x}", self.replay_hash),
        })
    }
}

fn mix_hash(acc: &mut u64, h: u64) {
    *acc = acc.rotate_left(17) ^ h.wrapping_mul(0x9e37_79b9_7f4a_7c15);
}

/// Runs all phases and returns the spanner edge set plus the full trace.
pub fn build_spanner(
    graph: &Graph,
    schedule: &PhaseSchedule,
) -> Result<(BTreeSet<(VertexId, VertexId)>, ExecutionTrace), ProtocolError> {
    let w_budget = DEFAULT_WORD_BUDGET;
    let n = graph.n();
    let mut collection = ClusterCollection::singletons(n);
    let mut tree_children: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); n as usize];
    let mut e_h: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    let mut phases = Vec::new();
    let mut replay_hash = 0u64;

    for i in 0..=schedule.ell {
        let idx = i as usize;
        let delta = &schedule.delta[idx];
        let deg = schedule.deg[idx];
        let depth = floor_to_u64(delta);
        let centers = collection.centers();

        let pop = detect_popular(graph, &centers, deg, depth, w_budget)
            .map_err(|e| e.with_phase(i))?;
        mix_hash(&mut replay_hash, pop.engine.replay_hash);

        let last = i == schedule.ell;
        let (rs_out, sc_out, u, next_collection) = if last {
            // Final phase: no superclustering; everything retires.
            (
                RulingOutcome::empty(),
                SuperclusterOutcome::empty(n),
                collection.clone(),
                ClusterCollection {
                    phase: i + 1,
                    clusters: BTreeMap::new(),
                },
            )
        } else {
            let q = schedule.q(idx);
            let rs_out = ruling_set(graph, &pop.w, q, schedule.c, w_budget)
                .map_err(|e| e.with_phase(i))?;
            mix_hash(&mut replay_hash, rs_out.engine.replay_hash);
            let bfs_depth = schedule.c * q;
            let r_ceil = ceil_to_u64(&schedule.r[idx]);
            let sc_out = supercluster(
                graph,
                &centers,
                &rs_out.rs,
                bfs_depth,
                r_ceil,
                &tree_children,
                w_budget,
            )
            .map_err(|e| e.with_phase(i))?;
            mix_hash(&mut replay_hash, sc_out.engine.replay_hash);

            // Absorb spanned clusters into their roots; the rest retire.
            let mut next = ClusterCollection {
                phase: i + 1,
                clusters: rs_out
                    .rs
                    .iter()
                    .map(|&r| {
                        (
                            r,
                            Cluster {
                                center: r,
                                members: BTreeSet::new(),
                            },
                        )
                    })
                    .collect(),
            };
            let mut u = ClusterCollection {
                phase: i,
                clusters: BTreeMap::new(),
            };
            for (&c, cluster) in &collection.clusters {
                match sc_out.forest[c as usize] {
                    Some(entry) => {
                        next.clusters
                            .get_mut(&entry.root)
                            .expect("forest root is a ruling-set member")
                            .members
                            .extend(cluster.members.iter().copied());
                    }
                    None => {
                        u.clusters.insert(c, cluster.clone());
                    }
                }
            }
            // Extend the accumulated intra-cluster trees with the marked
            // forest path edges (child -> parent).
            for (v, entry) in sc_out.forest.iter().enumerate() {
                if let Some(e) = entry {
                    if sc_out.acked[v] {
                        if let Some(p) = e.parent {
                            tree_children[p as usize].insert(v as VertexId);
                        }
                    }
                }
            }
            (rs_out, sc_out, u, next)
        };

        let u_centers = u.centers();
        let inter = interconnect(graph, &u_centers, &pop.knowledge, deg, depth, w_budget)
            .map_err(|e| e.with_phase(i))?;
        mix_hash(&mut replay_hash, inter.engine.replay_hash);

        e_h.extend(sc_out.edges_added.iter().copied());
        e_h.extend(inter.edges_added.iter().copied());

        phases.push(PhaseRecord {
            phase: i,
            collection,
            w: pop.w,
            knowledge: pop.knowledge,
            rs: rs_out.rs,
            dominators: rs_out.dominators,
            forest: sc_out.forest,
            u,
            edges_super: sc_out.edges_added,
            edges_inter: inter.edges_added,
            rounds_popular: Rounds::of(pop.prescribed_rounds, &pop.engine),
            rounds_ruling: Rounds::of(rs_out.prescribed_rounds, &rs_out.engine),
            rounds_super: Rounds::of(sc_out.prescribed_rounds, &sc_out.engine),
            rounds_inter: Rounds::of(inter.prescribed_rounds, &inter.engine),
        });
        collection = next_collection;
    }

    Ok((e_h, ExecutionTrace { phases, replay_hash }))
}

impl ProtocolError {
    fn with_phase(self, phase: u64) -> Self {
        match self {
            ProtocolError::Engine { source, .. } => ProtocolError::Engine { phase, source },
            ProtocolError::MissingPredecessor { vertex, target, .. } => {
                ProtocolError::MissingPredecessor {
                    phase,
                    vertex,
                    target,
                }
            }
            ProtocolError::BudgetExpired { budget, .. } => {
                ProtocolError::BudgetExpired { phase, budget }
            }
        }
    }
}

/// Shared by the sub-operations: run with a hard budget and fail loudly if
/// the budget expires with traffic still pending.
fn run_bounded<P: crate::engine::VertexProgram>(
    graph: &Graph,
    programs: Vec<P>,
    budget: u64,
    word_budget: usize,
) -> Result<(Vec<P>, EngineTrace), ProtocolError> {
    let (states, trace) = crate::engine::run(graph, programs, budget, word_budget)
        .map_err(|source| ProtocolError::Engine { phase: 0, source })?;
    if trace.truncated {
        return Err(ProtocolError::BudgetExpired { phase: 0, budget });
    }
    Ok((states, trace))
}

/// Prescribed spanner-wide round budget shape: for each phase,
/// 4 * (deg_i * delta_i + c * ceil(n^rho) * delta_i + c * delta_i).
pub fn round_budget_bound(schedule: &PhaseSchedule) -> u64 {
    let n_rho = crate::rational::ceil_pow(schedule.n, 1, schedule.c);
    let mut total = rat_u64(0, 1);
    for i in 0..=schedule.ell as usize {
        let delta = &schedule.delta[i];
        let term = rat_u64(schedule.deg[i], 1) * delta
            + rat_u64(schedule.c * n_rho, 1) * delta
            + rat_u64(schedule.c, 1) * delta;
        total += rat_u64(4, 1) * term;
    }
    ceil_to_u64(&total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::schedule::{build_schedule, EpsilonMode, ScheduleParams};

    fn sched(n: u64, kappa: u64, c: u64, p: u64, q: u64) -> PhaseSchedule {
        build_schedule(&ScheduleParams {
            n,
            kappa,
            c,
            mode: EpsilonMode::Exploratory,
            eps_arg: rat_u64(p, q),
        })
        .unwrap()
    }

    #[test]
    fn complete_16_collapses_to_a_star() {
        let g = gen::complete(16);
        let s = sched(16, 4, 3, 1, 2);
        let (e_h, trace) = build_spanner(&g, &s).unwrap();
        let star: BTreeSet<_> = (0..15u32).map(|v| (v, 15)).collect();
        assert_eq!(e_h, star);
        // Phase 0 does all the work; later collections are single or empty.
        assert_eq!(trace.phases[0].rs, [15u32].into_iter().collect());
        assert!(trace.phases[0].u.is_empty());
        for p in &trace.phases[1..] {
            assert!(p.collection.len() <= 1);
        }
        let h = g.edge_subgraph(&e_h).unwrap();
        for v in 0..15u32 {
            let row = crate::graph::bfs(&h, v, None).unwrap();
            assert!((0..16u32).all(|u| row.dist[u as usize] <= 2));
        }
    }

    #[test]
    fn cycle_64_keeps_every_edge() {
        let g = gen::cycle(64);
        let s = sched(64, 4, 3, 1, 2);
        let (e_h, trace) = build_spanner(&g, &s).unwrap();
        assert_eq!(e_h, g.edges().into_iter().collect());
        // Nobody is popular, so everything retires in phase 0.
        assert!(trace.phases[0].w.is_empty());
        assert_eq!(trace.phases[0].u.len(), 64);
        assert!(trace.phases[1].collection.is_empty());
    }

    #[test]
    fn edgeless_graph_empty_spanner() {
        let g = Graph::new(9);
        let s = sched(9, 4, 3, 1, 2);
        let (e_h, _) = build_spanner(&g, &s).unwrap();
        assert!(e_h.is_empty());
    }

    #[test]
    fn retired_clusters_partition_vertices() {
        for seed in [1, 2, 3] {
            let g = gen::gnp(64, &rat_u64(1, 10), seed);
            let s = sched(64, 4, 3, 1, 2);
            let (e_h, trace) = build_spanner(&g, &s).unwrap();
            let mut seen: BTreeSet<VertexId> = BTreeSet::new();
            for p in &trace.phases {
                for cluster in p.u.clusters.values() {
                    for &m in &cluster.members {
                        assert!(seen.insert(m), "vertex {m} retired twice");
                    }
                }
            }
            assert_eq!(seen.len(), 64);
            for &(a, b) in &e_h {
                assert!(g.has_edge(a, b));
            }
        }
    }

    #[test]
    fn deterministic_replay() {
        let g = gen::gnp(48, &rat_u64(1, 8), 9);
        let s = sched(48, 4, 3, 1, 2);
        let (e1, t1) = build_spanner(&g, &s).unwrap();
        let (e2, t2) = build_spanner(&g, &s).unwrap();
        assert_eq!(e1, e2);
        assert_eq!(t1.replay_hash, t2.replay_hash);
    }

    #[test]
    fn barbell_connects_cliques_within_phase_budgets() {
        let g = gen::barbell(8, 30);
        let s = sched(46, 4, 3, 1, 2);
        let (e_h, trace) = build_spanner(&g, &s).unwrap();
        // Clique vertices are popular in phase 0 (deg_0 centers within 1).
        let w0 = &trace.phases[0].w;
        assert!((0..16u32).all(|v| w0.contains(&v)));
        let h = g.edge_subgraph(&e_h).unwrap();
        // The spanner stays connected wherever the graph is.
        let row = crate::graph::bfs(&h, 0, None).unwrap();
        assert!((0..46u32).all(|v| row.reachable(v)));
        for p in &trace.phases {
            for r in [p.rounds_popular, p.rounds_ruling, p.rounds_super, p.rounds_inter] {
                assert!(r.executed <= r.prescribed);
            }
        }
    }
}
