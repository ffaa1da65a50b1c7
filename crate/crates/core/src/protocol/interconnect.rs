//! Interconnection. Each retired cluster's center walks the recorded
//! predecessor chain toward every center it knows, marking the chain's edges
//! for the spanner. Messages carry one target id; every vertex forwards a
//! given target at most once, queueing per-neighbor sends one per round.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::engine::{EngineTrace, Message, Outbox, VertexProgram};
use crate::graph::{Graph, VertexId};
use crate::protocol::{CenterKnowledge, ProtocolError};

const TAG_TRACE: u8 = 6;

#[derive(Debug)]
pub struct InterconnectOutcome {
    pub edges_added: BTreeSet<(VertexId, VertexId)>,
    pub prescribed_rounds: u64,
    pub engine: EngineTrace,
}

#[derive(Debug)]
struct TraceProg {
    id: VertexId,
    initiator: bool,
    /// target center -> next hop toward it.
    preds: BTreeMap<VertexId, VertexId>,
    queues: BTreeMap<VertexId, VecDeque<VertexId>>,
    handled: BTreeSet<VertexId>,
    marked: Vec<(VertexId, VertexId)>,
    /// Targets received with no predecessor entry (protocol bug if any).
    missing: Vec<VertexId>,
    started: bool,
}

impl TraceProg {
    fn enqueue(&mut self, target: VertexId) {
        if !self.handled.insert(target) {
            return;
        }
        match self.preds.get(&target) {
            Some(&pred) => {
                self.marked.push((self.id.min(pred), self.id.max(pred)));
                self.queues.entry(pred).or_default().push_back(target);
            }
            None => self.missing.push(target),
        }
    }
}

impl VertexProgram for TraceProg {
    fn step(&mut self, _round: u64, inbox: &[(VertexId, Message)], outbox: &mut Outbox) {
        if self.initiator && !self.started {
            self.started = true;
            let targets: Vec<_> = self.preds.keys().copied().collect();
            for t in targets {
                self.enqueue(t);
            }
        }
        for (_, msg) in inbox {
            debug_assert_eq!(msg.tag, TAG_TRACE);
            let target = msg.words[0] as VertexId;
            if target == self.id {
                continue; // chain complete
            }
            self.enqueue(target);
        }
        for (&to, queue) in &mut self.queues {
            if let Some(target) = queue.pop_front() {
                outbox.send(to, Message::new(TAG_TRACE, &[u64::from(target)]));
            }
        }
        self.queues.retain(|_, q| !q.is_empty());
    }

    fn next_wakeup(&self, from: u64) -> Option<u64> {
        if (self.initiator && !self.started) || !self.queues.is_empty() {
            Some(from)
        } else {
            None
        }
    }
}

pub fn interconnect(
    graph: &Graph,
    u_centers: &BTreeSet<VertexId>,
    knowledge: &[CenterKnowledge],
    deg: u64,
    depth: u64,
    word_budget: usize,
) -> Result<InterconnectOutcome, ProtocolError> {
    let prescribed = if u_centers.is_empty() {
        0
    } else {
        deg * (depth + 1)
    };
    let programs: Vec<_> = (0..graph.n())
        .map(|v| TraceProg {
            id: v,
            initiator: u_centers.contains(&v),
            preds: knowledge[v as usize]
                .entries
                .iter()
                .map(|e| (e.center, e.pred))
                .collect(),
            queues: BTreeMap::new(),
            handled: BTreeSet::new(),
            marked: Vec::new(),
            missing: Vec::new(),
            started: false,
        })
        .collect();
    let (states, engine) = super::run_bounded(graph, programs, prescribed, word_budget)?;

    let mut edges_added = BTreeSet::new();
    for s in &states {
        if let Some(&target) = s.missing.first() {
            return Err(ProtocolError::MissingPredecessor {
                phase: 0,
                vertex: s.id,
                target,
            });
        }
        edges_added.extend(s.marked.iter().copied());
    }
    Ok(InterconnectOutcome {
        edges_added,
        prescribed_rounds: prescribed,
        engine,
    })
}
