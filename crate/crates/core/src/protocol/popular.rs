//! Popularity detection. Centers announce themselves; announcements spread
//! one hop per macro-phase of `deg` rounds. At each macro-phase boundary a
//! vertex forwards at most `deg` of the centers it heard about for the first
//! time during that phase (smallest ids win when over the cap); everything it
//! ever hears is retained with its best distance and predecessor so that
//! shortest paths can be traced back later. After `depth` macro-phases a
//! center is popular iff it learned at least `deg` other centers.
//!
//! Forwarding is deliberately decoupled from retention: capping the retained
//! list as well would let a bottleneck vertex waste a slot on the receiving
//! center's own announcement and starve it of a substitute, misclassifying a
//! genuinely popular center.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::engine::{EngineTrace, Message, Outbox, VertexProgram};
use crate::graph::{Graph, VertexId};
use crate::protocol::{CenterKnowledge, KnowledgeEntry, ProtocolError};

const TAG_ANNOUNCE: u8 = 1;

#[derive(Debug)]
pub struct PopularOutcome {
    pub w: BTreeSet<VertexId>,
    pub knowledge: Vec<CenterKnowledge>,
    pub prescribed_rounds: u64,
    pub engine: EngineTrace,
}

#[derive(Debug)]
struct PopularProg {
    id: VertexId,
    neighbors: Vec<VertexId>,
    is_center: bool,
    deg: u64,
    depth: u64,
    /// Everything learned so far: center -> (dist, pred).
    known: BTreeMap<VertexId, (u64, VertexId)>,
    /// First-time arrivals of the current macro-phase awaiting the boundary.
    staged: BTreeMap<VertexId, (u64, VertexId)>,
    /// Forward queue for the next macro-phase, one message per round.
    pending: VecDeque<(VertexId, u64)>,
    announced: bool,
}

impl PopularProg {
    fn last_round(&self) -> u64 {
        self.depth * self.deg
    }
}

impl VertexProgram for PopularProg {
    fn step(&mut self, round: u64, inbox: &[(VertexId, Message)], outbox: &mut Outbox) {
        for (from, msg) in inbox {
            debug_assert_eq!(msg.tag, TAG_ANNOUNCE);
            let center = msg.words[0] as VertexId;
            let dist = msg.words[1];
            if center == self.id || self.known.contains_key(&center) {
                continue;
            }
            let entry = self.staged.entry(center).or_insert((dist, *from));
            if (dist, *from) < *entry {
                *entry = (dist, *from);
            }
        }

        // Macro-phase boundary: retain everything heard this phase; forward at
        // most `deg` of it (smallest center ids first) in the next phase.
        if round > 0 && round % self.deg == 0 {
            let staged = std::mem::take(&mut self.staged);
            for (center, (dist, pred)) in staged {
                self.known.insert(center, (dist, pred));
                if round < self.last_round() && (self.pending.len() as u64) < self.deg {
                    self.pending.push_back((center, dist));
                }
            }
        }

        if round == 0 && self.is_center && !self.announced {
            self.announced = true;
            for &u in &self.neighbors {
                outbox.send(u, Message::new(TAG_ANNOUNCE, &[u64::from(self.id), 1]));
            }
        } else if let Some((center, dist)) = self.pending.pop_front() {
            for &u in &self.neighbors {
                outbox.send(u, Message::new(TAG_ANNOUNCE, &[u64::from(center), dist + 1]));
            }
        }
    }

    fn next_wakeup(&self, from: u64) -> Option<u64> {
        let mut best: Option<u64> = None;
        let mut consider = |r: u64| {
            if r >= from && best.map_or(true, |b| r < b) {
                best = Some(r);
            }
        };
        if self.is_center && !self.announced {
            consider(0);
        }
        if !self.pending.is_empty() {
            consider(from);
        }
        if !self.staged.is_empty() {
            let boundary = from.div_ceil(self.deg) * self.deg;
            if boundary <= self.last_round() {
                consider(boundary.max(from));
            }
        }
        best
    }
}

/// Runs the detection over `depth` macro-phases of `deg` rounds each
/// (1 + depth*deg prescribed rounds total, counting the announcement round).
pub fn detect_popular(
    graph: &Graph,
    centers: &BTreeSet<VertexId>,
    deg: u64,
    depth: u64,
    word_budget: usize,
) -> Result<PopularOutcome, ProtocolError> {
    assert!(deg >= 1);
    let programs: Vec<_> = (0..graph.n())
        .map(|v| PopularProg {
            id: v,
            neighbors: graph.neighbors(v).to_vec(),
            is_center: centers.contains(&v),
            deg,
            depth,
            known: BTreeMap::new(),
            staged: BTreeMap::new(),
            pending: VecDeque::new(),
            announced: false,
        })
        .collect();
    let prescribed = 1 + depth * deg;
    let (states, engine) = super::run_bounded(graph, programs, prescribed, word_budget)?;

    let mut w = BTreeSet::new();
    let mut knowledge = Vec::with_capacity(states.len());
    for s in &states {
        if s.is_center && s.known.len() as u64 >= deg {
            w.insert(s.id);
        }
        let mut entries: Vec<KnowledgeEntry> = s
            .known
            .iter()
            .map(|(&center, &(dist, pred))| KnowledgeEntry { center, dist, pred })
            .collect();
        entries.sort_by_key(|e| (e.dist, e.center));
        knowledge.push(CenterKnowledge { entries });
    }
    Ok(PopularOutcome {
        w,
        knowledge,
        prescribed_rounds: prescribed,
        engine,
    })
}
