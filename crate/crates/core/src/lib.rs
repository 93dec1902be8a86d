//! Routing benchmark core: problem model, instance I/O, feasibility
//! checking, exact and heuristic solvers, the LLM pipeline and metrics.

pub mod exact;
pub mod heuristic;
pub mod instance_io;
pub mod llm;
pub mod metrics;
pub mod pipeline;
pub mod routing;
pub mod sandbox;
pub mod verifier;

pub use routing::*;
