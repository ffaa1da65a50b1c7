//! Round-synchronous message-passing simulator. Each round, every vertex may
//! send at most one bounded-size message per incident edge direction; a
//! message sent in round r is observable in round r+1. Execution is
//! deterministic, and quiescent stretches (no messages in flight, no vertex
//! scheduled to act) are skipped without being simulated round by round.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{Graph, VertexId};

/// Default per-message word budget: one tag word plus two integer words.
pub const DEFAULT_WORD_BUDGET: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub tag: u8,
    pub words: Vec<u64>,
}

impl Message {
    pub fn new(tag: u8, words: &[u64]) -> Self {
        Message {
            tag,
            words: words.to_vec(),
        }
    }

    /// Size in words, counting the tag as one word.
    pub fn word_count(&self) -> usize {
        1 + self.words.len()
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("bandwidth violation at round {round}: {detail}")]
    Bandwidth { round: u64, detail: String },
    #[error("vertex {vertex} sent to non-neighbor {to} at round {round}")]
    NotANeighbor { round: u64, vertex: VertexId, to: VertexId },
    #[error("replay hash mismatch: {0:#x} vs {1:#x}")]
    Determinism(u64, u64),
}

/// Per-round send buffer handed to `step`. At most one message per neighbor.
pub struct Outbox {
    sends: Vec<(VertexId, Message)>,
}

impl Outbox {
    pub fn send(&mut self, to: VertexId, msg: Message) {
        self.sends.push((to, msg));
    }
}

/// A vertex-local protocol. `step` may depend only on local state, the round
/// index, and the inbox; the engine only invokes it at rounds where the
/// vertex has incoming messages or has asked to be woken.
pub trait VertexProgram {
    /// Called at round `round` with all messages delivered this round.
    fn step(&mut self, round: u64, inbox: &[(VertexId, Message)], outbox: &mut Outbox);

    /// Earliest round >= `from` at which this vertex must run `step` even
    /// with an empty inbox; `None` if it only reacts to messages.
    fn next_wakeup(&self, from: u64) -> Option<u64>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineTrace {
    /// Highest round in which a message was delivered (0 if none was sent).
    pub rounds_executed: u64,
    /// Sparse (round, delivered message count), ascending by round.
    pub per_round_message_count: Vec<(u64, u64)>,
    pub total_messages: u64,
    /// Non-empty only if the run aborted; kept for diagnostics.
    pub bandwidth_violations: Vec<String>,
    /// FNV-1a hash over the full delivery stream; equal hashes on replay
    /// certify determinism.
    pub replay_hash: u64,
    /// True if the round budget expired with messages still in flight.
    pub truncated: bool,
}

fn fnv1a(hash: &mut u64, value: u64) {
    let mut h = *hash;
    for byte in value.to_le_bytes() {
        h ^= u64::from(byte);
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    *hash = h;
}

/// Runs `programs` (indexed by vertex id) for at most `max_rounds` rounds.
/// Returns the final states and the trace.
pub fn run<P: VertexProgram>(
    graph: &Graph,
    mut programs: Vec<P>,
    max_rounds: u64,
    word_budget: usize,
) -> Result<(Vec<P>, EngineTrace), EngineError> {
    assert_eq!(programs.len(), graph.n() as usize);
    // delivery round -> receiver -> ordered (sender, message)
    let mut in_flight: BTreeMap<u64, BTreeMap<VertexId, Vec<(VertexId, Message)>>> =
        BTreeMap::new();
    let mut trace = EngineTrace {
        rounds_executed: 0,
        per_round_message_count: Vec::new(),
        total_messages: 0,
        bandwidth_violations: Vec::new(),
        replay_hash: 0xcbf2_9ce4_8422_2325,
        truncated: false,
    };

    let next_event = |in_flight: &BTreeMap<u64, _>, programs: &[P], from: u64| -> Option<u64> {
        let delivery = in_flight.keys().next().copied();
        let wake = programs.iter().filter_map(|p| p.next_wakeup(from)).min();
        match (delivery, wake) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    };

    let mut from = 0u64;
    while let Some(round) = next_event(&in_flight, &programs, from) {
        if round > max_rounds {
            trace.truncated = in_flight.keys().next().is_some();
            break;
        }
        let mut inboxes = in_flight.remove(&round).unwrap_or_default();
        let mut delivered = 0u64;
        for (&receiver, msgs) in &inboxes {
            for (sender, msg) in msgs {
                delivered += 1;
                fnv1a(&mut trace.replay_hash, round);
                fnv1a(&mut trace.replay_hash, u64::from(*sender));
                fnv1a(&mut trace.replay_hash, u64::from(receiver));
                fnv1a(&mut trace.replay_hash, u64::from(msg.tag));
                for &w in &msg.words {
                    fnv1a(&mut trace.replay_hash, w);
                }
            }
        }
        if delivered > 0 {
            trace.rounds_executed = round;
            trace.per_round_message_count.push((round, delivered));
            trace.total_messages += delivered;
        }

        let empty = Vec::new();
        let mut outbox = Outbox { sends: Vec::new() };
        for v in 0..graph.n() {
            let inbox = inboxes.remove(&v).unwrap_or_default();
            let wants_wakeup = programs[v as usize].next_wakeup(round) == Some(round);
            if inbox.is_empty() && !wants_wakeup {
                continue;
            }
            let inbox_ref = if inbox.is_empty() { &empty } else { &inbox };
            outbox.sends.clear();
            programs[v as usize].step(round, inbox_ref, &mut outbox);
            let mut seen = Vec::new();
            for (to, msg) in outbox.sends.drain(..) {
                if !graph.has_edge(v, to) {
                    return Err(EngineError::NotANeighbor { round, vertex: v, to });
                }
                if seen.contains(&to) {
                    let detail =
                        format!("vertex {v} sent two messages to neighbor {to} in one round");
                    trace.bandwidth_violations.push(detail.clone());
                    return Err(EngineError::Bandwidth { round, detail });
                }
                if msg.word_count() > word_budget {
                    let detail = format!(
                        "vertex {v} sent {} words to {to} (budget {word_budget})",
                        msg.word_count()
                    );
                    trace.bandwidth_violations.push(detail.clone());
                    return Err(EngineError::Bandwidth { round, detail });
                }
                seen.push(to);
                in_flight
                    .entry(round + 1)
                    .or_default()
                    .entry(to)
                    .or_default()
                    .push((v, msg));
            }
        }
        from = round + 1;
    }
    Ok((programs, trace))
}

/// Runs twice and checks the delivery streams hash identically.
pub fn run_replay_checked<P: VertexProgram>(
    graph: &Graph,
    make: impl Fn(VertexId) -> P,
    max_rounds: u64,
    word_budget: usize,
) -> Result<(Vec<P>, EngineTrace), EngineError> {
    let programs: Vec<P> = (0..graph.n()).map(&make).collect();
    let (states, trace) = run(graph, programs, max_rounds, word_budget)?;
    let programs: Vec<P> = (0..graph.n()).map(&make).collect();
    let (_, replay) = run(graph, programs, max_rounds, word_budget)?;
    if trace.replay_hash != replay.replay_hash {
        return Err(EngineError::Determinism(trace.replay_hash, replay.replay_hash));
    }
    Ok((states, trace))
}
