//! Decentralized collective navigation for planar swarms.
//!
//! Each agent keeps a short, displacement-gated history of where it has seen
//! every neighbor. Uninformed agents follow the neighbor whose path is most
//! persistent and most similar to the rest of the candidates; informed agents
//! fly to the goal, slowing down when the swarm falls behind. A tangential
//! repulsion term steers around obstacles and neighbors.
//!
//! The [`sim`] module wraps this in a deterministic, seeded, synchronous
//! simulator, and [`runner`] and [`cli`] drive single runs and seed batches.

pub mod cli;
pub mod control;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod model;
pub mod record;
pub mod render;
pub mod runner;
pub mod scenario;
pub mod selection;
pub mod sim;

pub use error::{Error, Result};
pub use geometry::Vec2;
pub use model::{AgentId, AgentMemory, Params, PathHistory, TargetRef, UavState};
pub use scenario::{parse_scenario, Scenario};
pub use sim::{RunStatus, World};
