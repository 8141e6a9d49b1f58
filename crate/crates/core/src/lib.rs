//! Functional and cycle-level timing simulation of a pipelined graph random-walk
//! accelerator.

pub mod graph;
pub mod sampling;
pub mod walk;
pub mod scheduler;
pub mod sim;
pub mod metrics;
pub mod oracle;
