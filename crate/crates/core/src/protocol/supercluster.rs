//! Superclustering. A multi-source BFS from the ruling set grows a forest to
//! a fixed depth; every active-cluster center the forest reaches is absorbed
//! into its root's new cluster. Reached centers then acknowledge up their
//! parent chains, marking the root-to-center path edges for the spanner, and
//! finally announce the new cluster id down their old intra-cluster trees.

use std::collections::BTreeSet;

use crate::engine::{EngineTrace, Message, Outbox, VertexProgram};
use crate::graph::{Graph, VertexId};
use crate::protocol::{ForestEntry, ProtocolError};

const TAG_GROW: u8 = 3;
const TAG_ACK: u8 = 4;
const TAG_NEW_ROOT: u8 = 5;

#[derive(Debug)]
pub struct SuperclusterOutcome {
    /// Per-vertex adoption (root, parent, hop); None if the BFS never
    /// reached the vertex.
    pub forest: Vec<Option<ForestEntry>>,
    /// Vertices lying on some root-to-absorbed-center path.
    pub acked: Vec<bool>,
    pub edges_added: BTreeSet<(VertexId, VertexId)>,
    pub prescribed_rounds: u64,
    pub engine: EngineTrace,
}

impl SuperclusterOutcome {
    pub fn empty(n: u32) -> Self {
        SuperclusterOutcome {
            forest: vec![None; n as usize],
            acked: vec![false; n as usize],
            edges_added: BTreeSet::new(),
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
struct ClusterProg {
    id: VertexId,
    neighbors: Vec<VertexId>,
    is_root: bool,
    is_center: bool,
    depth: u64,
    ack_round: u64,
    announce_round: u64,
    tree_children: Vec<VertexId>,
    adoption: Option<(VertexId, Option<VertexId>, u64)>,
    grew: bool,
    acked: bool,
    ack_sent: bool,
    /// First new-root announcement seen (informational; membership is
    /// recomputed by the host from the forest).
    heard_new_root: Option<VertexId>,
    announced: bool,
}

impl VertexProgram for ClusterProg {
    fn step(&mut self, round: u64, inbox: &[(VertexId, Message)], outbox: &mut Outbox) {
        // Growth window: adoption on first arrival, tie-broken by smallest
        // (root, sender); forward one hop further while depth remains.
        if round == 0 && self.is_root && !self.grew {
            self.grew = true;
            self.adoption = Some((self.id, None, 0));
            if self.depth >= 1 {
                for &u in &self.neighbors {
                    outbox.send(u, Message::new(TAG_GROW, &[u64::from(self.id), 1]));
                }
            }
            return;
        }
        let mut best: Option<(u64, VertexId)> = None;
        for (from, msg) in inbox {
            match msg.tag {
                TAG_GROW => {
                    if self.adoption.is_none() {
                        let cand = (msg.words[0], *from);
                        if best.map_or(true, |b| cand < b) {
                            best = Some(cand);
                        }
                    }
                }
                TAG_ACK => {
                    if !self.acked {
                        self.acked = true;
                        if let Some((_, Some(parent), _)) = self.adoption {
                            if !self.ack_sent {
                                self.ack_sent = true;
                                outbox.send(parent, Message::new(TAG_ACK, &[]));
                            }
                        }
                    }
                }
                TAG_NEW_ROOT => {
                    if !self.announced {
                        self.announced = true;
                        self.heard_new_root = Some(msg.words[0] as VertexId);
                        for &child in &self.tree_children {
                            outbox.send(child, Message::new(TAG_NEW_ROOT, &[msg.words[0]]));
                        }
                    }
                }
                _ => debug_assert!(false, "unexpected tag {}", msg.tag),
            }
        }
        if let Some((root, sender)) = best {
            let hop = round;
            self.adoption = Some((root as VertexId, Some(sender), hop));
            if hop < self.depth {
                for &u in &self.neighbors {
                    if u != sender {
                        outbox.send(u, Message::new(TAG_GROW, &[root, hop + 1]));
                    }
                }
            }
        }

        // Reached non-root centers start the path acknowledgement.
        if round == self.ack_round && self.is_center && !self.is_root && !self.acked {
            if let Some((_, Some(parent), _)) = self.adoption {
                self.acked = true;
                self.ack_sent = true;
                outbox.send(parent, Message::new(TAG_ACK, &[]));
            }
        }
        if round == self.ack_round && self.is_root {
            self.acked = true;
        }

        // Absorbed centers announce their new cluster id down the old tree.
        if round == self.announce_round && self.is_center && !self.is_root && !self.announced {
            if let Some((root, Some(_), _)) = self.adoption {
                self.announced = true;
                self.heard_new_root = Some(root);
                for &child in &self.tree_children {
                    outbox.send(child, Message::new(TAG_NEW_ROOT, &[u64::from(root)]));
                }
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
        if self.is_root && !self.grew {
            consider(0);
        }
        if self.is_center && !self.acked && !self.is_root {
            consider(self.ack_round);
        }
        if self.is_root && !self.acked {
            consider(self.ack_round);
        }
        if self.is_center && !self.is_root && !self.announced {
            consider(self.announce_round);
        }
        best
    }
}

/// Grows the forest to `depth` hops, then runs the acknowledgement and
/// announcement windows. `r_ceil` bounds the old intra-cluster tree depth.
pub fn supercluster(
    graph: &Graph,
    centers: &BTreeSet<VertexId>,
    rs: &BTreeSet<VertexId>,
    depth: u64,
    r_ceil: u64,
    tree_children: &[BTreeSet<VertexId>],
    word_budget: usize,
) -> Result<SuperclusterOutcome, ProtocolError> {
    if rs.is_empty() {
        return Ok(SuperclusterOutcome::empty(graph.n()));
    }
    let ack_round = depth + 1;
    let announce_round = 2 * depth + 3;
    let prescribed = 3 * depth + r_ceil + 8;
    let programs: Vec<_> = (0..graph.n())
        .map(|v| ClusterProg {
            id: v,
            neighbors: graph.neighbors(v).to_vec(),
            is_root: rs.contains(&v),
            is_center: centers.contains(&v),
            depth,
            ack_round,
            announce_round,
            tree_children: tree_children[v as usize].iter().copied().collect(),
            adoption: None,
            grew: false,
            acked: false,
            ack_sent: false,
            heard_new_root: None,
            announced: false,
        })
        .collect();
    let (states, engine) = super::run_bounded(graph, programs, prescribed, word_budget)?;

    let mut forest = Vec::with_capacity(states.len());
    let mut acked = Vec::with_capacity(states.len());
    let mut edges_added = BTreeSet::new();
    for s in &states {
        forest.push(s.adoption.map(|(root, parent, hop)| ForestEntry {
            root,
            parent,
            hop,
        }));
        acked.push(s.acked);
        if s.acked {
            if let Some((_, Some(parent), _)) = s.adoption {
                edges_added.insert((s.id.min(parent), s.id.max(parent)));
            }
        }
    }
    Ok(SuperclusterOutcome {
        forest,
        acked,
        edges_added,
        prescribed_rounds: prescribed,
        engine,
    })
}
