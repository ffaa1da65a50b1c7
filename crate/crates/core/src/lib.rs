//! Deterministic round-synchronous message-passing simulator with a bounded
//! per-edge word budget, a clustering-based sparse spanner construction that
//! runs on it, exact-arithmetic parameter schedules, and an oracle-backed
//! verifier for the structural and stretch guarantees.

pub mod engine;
pub mod gen;
pub mod graph;
pub mod protocol;
pub mod rational;
pub mod schedule;
pub mod verifier;

pub use engine::{run, run_replay_checked, EngineError, EngineTrace, Message, VertexProgram};
pub use graph::{bfs, ball_centers, DistanceRow, Graph, GraphError, VertexId, UNREACHABLE};
pub use schedule::{build_schedule, EpsilonMode, PhaseSchedule, ScheduleError, ScheduleParams};
