//! Enumeration of smooth plane quartics over small prime fields up to
//! isomorphism, with twists and trace statistics.

pub mod census;
pub mod error;
pub mod families;
pub mod gf;
pub mod invariants;
pub mod quartic;
pub mod stats;
pub mod twists;

pub use error::{Error, Result};
