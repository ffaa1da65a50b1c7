//! Ruling-set selection by digit elimination. Candidate ids are written as
//! `c` digits in base b = ceil(n^(1/c)). For each digit position (most
//! significant first) and each value from b-1 down to 0, candidates holding
//! that value flood a domination notice to hop distance `q`; still-active
//! candidates with a smaller current digit are eliminated. Survivors are
//! pairwise (q+1)-separated and dominate every candidate within c*q hops.

use std::collections::{BTreeMap, BTreeSet};

use crate::engine::{EngineTrace, Message, Outbox, VertexProgram};
use crate::graph::{Graph, VertexId};
use crate::protocol::ProtocolError;
use crate::rational::ceil_pow;

const TAG_DOMINATE: u8 = 2;

#[derive(Debug)]
pub struct RulingOutcome {
    pub rs: BTreeSet<VertexId>,
    /// For each input vertex, the survivor whose chain of eliminations
    /// covers it (itself for survivors). Each chain hop spans <= q hops in
    /// the graph and chains have <= c links.
    pub dominators: BTreeMap<VertexId, VertexId>,
    pub prescribed_rounds: u64,
    pub engine: EngineTrace,
}

impl RulingOutcome {
    pub fn empty() -> Self {
        RulingOutcome {
            rs: BTreeSet::new(),
            dominators: BTreeMap::new(),
            prescribed_rounds: 0,
            engine: EngineTrace {
                rounds_executed: 0,
                per_round_message_count: Vec::new(),
                total_messages: 0,
                bandwidth_violations: Vec::new(),
                replay_hash: 0,
                truncated: false,
            },
        }
    }
}

#[derive(Debug)]
struct RulingProg {
    id: VertexId,
    neighbors: Vec<VertexId>,
    candidate: bool,
    active: bool,
    eliminated_by: Option<VertexId>,
    b: u64,
    c: u64,
    q: u64,
    /// Latest slot whose flood this vertex already forwarded.
    forwarded_slot: Option<u64>,
}

impl RulingProg {
    fn digit(&self, position: u64) -> u64 {
        let shift = self.c - 1 - position;
        (u64::from(self.id) / self.b.pow(shift as u32)) % self.b
    }

    fn slot_count(&self) -> u64 {
        self.c * self.b
    }
}

impl VertexProgram for RulingProg {
    fn step(&mut self, round: u64, inbox: &[(VertexId, Message)], outbox: &mut Outbox) {
        if let Some((_, first)) = inbox.first() {
            debug_assert_eq!(first.tag, TAG_DOMINATE);
            // All arrivals this round belong to the slot of the sends that
            // produced them.
            let slot = (round - 1) / self.q;
            if self.forwarded_slot != Some(slot) {
                self.forwarded_slot = Some(slot);
                let (source, ttl) = inbox
                    .iter()
                    .map(|(_, m)| (m.words[0], m.words[1]))
                    .min()
                    .unwrap();
                let position = slot / self.b;
                let value = self.b - 1 - (slot % self.b);
                if self.candidate && self.active && self.digit(position) < value {
                    self.active = false;
                    self.eliminated_by = Some(source as VertexId);
                }
                if ttl > 1 {
                    for &u in &self.neighbors {
                        outbox.send(u, Message::new(TAG_DOMINATE, &[source, ttl - 1]));
                    }
                }
            }
        }

        if self.candidate && self.active && round % self.q == 0 {
            let slot = round / self.q;
            if slot < self.slot_count() {
                let position = slot / self.b;
                let value = self.b - 1 - (slot % self.b);
                if self.digit(position) == value {
                    for &u in &self.neighbors {
                        outbox.send(u, Message::new(TAG_DOMINATE, &[u64::from(self.id), self.q]));
                    }
                }
            }
        }
    }

    fn next_wakeup(&self, from: u64) -> Option<u64> {
        if !(self.candidate && self.active) {
            return None;
        }
        // Wake at the start of the next slot whose (position, value) matches
        // one of our digits.
        let mut slot = from.div_ceil(self.q);
        while slot < self.slot_count() {
            let position = slot / self.b;
            let value = self.b - 1 - (slot % self.b);
            if self.digit(position) == value {
                return Some(slot * self.q);
            }
            slot += 1;
        }
        None
    }
}

pub fn ruling_set(
    graph: &Graph,
    w: &BTreeSet<VertexId>,
    q: u64,
    c: u64,
    word_budget: usize,
) -> Result<RulingOutcome, ProtocolError> {
    assert!(q >= 1 && c >= 1);
    if w.is_empty() {
        return Ok(RulingOutcome::empty());
    }
    let b = ceil_pow(u64::from(graph.n()), 1, c).max(2);
    let programs: Vec<_> = (0..graph.n())
        .map(|v| RulingProg {
            id: v,
            neighbors: graph.neighbors(v).to_vec(),
            candidate: w.contains(&v),
            active: w.contains(&v),
            eliminated_by: None,
            b,
            c,
            q,
            forwarded_slot: None,
        })
        .collect();
    let prescribed = c * b * q + 1;
    let (states, engine) = super::run_bounded(graph, programs, prescribed, word_budget)?;

    let rs: BTreeSet<_> = states
        .iter()
        .filter(|s| s.candidate && s.active)
        .map(|s| s.id)
        .collect();
    // Resolve elimination chains to their surviving endpoints.
    let eliminated_by: BTreeMap<VertexId, VertexId> = states
        .iter()
        .filter_map(|s| s.eliminated_by.map(|e| (s.id, e)))
        .collect();
    let mut dominators = BTreeMap::new();
    for &v in w {
        let mut cur = v;
        let mut hops = 0;
        while !rs.contains(&cur) {
            cur = *eliminated_by
                .get(&cur)
                .expect("eliminated candidate records its eliminator");
            hops += 1;
            assert!(hops <= c, "elimination chain longer than {c} links");
        }
        dominators.insert(v, cur);
    }
    Ok(RulingOutcome {
        rs,
        dominators,
        prescribed_rounds: prescribed,
        engine,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::graph::multi_source_bfs;

    fn check_properties(g: &Graph, w: &BTreeSet<VertexId>, out: &RulingOutcome, q: u64, c: u64) {
        assert!(out.rs.is_subset(w));
        // Pairwise separation >= q + 1.
        for &a in &out.rs {
            let row = crate::graph::bfs(g, a, None).unwrap();
            for &b in &out.rs {
                if a < b {
                    if let Some(d) = row.get(b) {
                        assert!(u64::from(d) >= q + 1, "rs {a},{b} at distance {d}");
                    }
                }
            }
        }
        // Domination within c*q.
        let sources: Vec<_> = out.rs.iter().copied().collect();
        let dist = multi_source_bfs(g, &sources, None);
        for &v in w {
            assert!(u64::from(dist[v as usize]) <= c * q, "vertex {v} undominated");
            assert!(out.rs.contains(&out.dominators[&v]));
        }
    }

    #[test]
    fn singleton_w_is_its_own_ruling_set() {
        let g = gen::path(10);
        let w = [4u32].into_iter().collect();
        let out = ruling_set(&g, &w, 2, 3, 3).unwrap();
        assert_eq!(out.rs, w);
        assert_eq!(out.dominators[&4], 4);
    }

    #[test]
    fn complete_graph_keeps_max_id() {
        let g = gen::complete(16);
        let w: BTreeSet<_> = (0..16).collect();
        let out = ruling_set(&g, &w, 2, 3, 3).unwrap();
        assert_eq!(out.rs, [15u32].into_iter().collect());
        check_properties(&g, &w, &out, 2, 3);
    }

    #[test]
    fn ten_path_separated_and_dominating() {
        let g = gen::path(10);
        let w: BTreeSet<_> = (0..10).collect();
        let out = ruling_set(&g, &w, 2, 2, 3).unwrap();
        check_properties(&g, &w, &out, 2, 2);
    }

    #[test]
    fn empty_w() {
        let g = gen::path(5);
        let out = ruling_set(&g, &BTreeSet::new(), 3, 3, 3).unwrap();
        assert!(out.rs.is_empty());
        assert_eq!(out.engine.rounds_executed, 0);
    }

    #[test]
    fn random_graphs_hold_both_properties() {
        for seed in 0..5 {
            let g = gen::gnp(48, &crate::rational::rat_u64(1, 10), seed);
            let w: BTreeSet<_> = (0..48).filter(|v| v % 3 == 0).collect();
            for (q, c) in [(2, 3), (5, 3), (3, 4)] {
                let out = ruling_set(&g, &w, q, c, 3).unwrap();
                check_properties(&g, &w, &out, q, c);
                assert!(out.prescribed_rounds <= c * ceil_pow(48, 1, c).max(2) * q + 1);
            }
        }
    }

    #[test]
    fn round_cost_within_contract() {
        let g = gen::grid(6, 8);
        let w: BTreeSet<_> = (0..48).collect();
        let (q, c) = (2, 3);
        let out = ruling_set(&g, &w, q, c, 3).unwrap();
        check_properties(&g, &w, &out, q, c);
        let b = ceil_pow(48, 1, c);
        assert!(out.engine.rounds_executed <= c * b * q + 4 * c * q);
    }
}
