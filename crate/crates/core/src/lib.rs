//! Engine for NecklaceNim and related SetNim games.
//!
//! * [`spec`] and [`position`]: game specifications, positions and legal moves.
//! * [`descriptor`]: the JSON form of specs and positions.
//! * [`oracle`]: exhaustive outcome classification with a shared memo.
//! * [`characterizations`]: closed-form P-position predicates.
//! * [`reductions`]: zero, merge, subsume, anchor and invariance reductions.
//! * [`strategy`]: constructive winning moves.

pub mod characterizations;
pub mod descriptor;
pub mod error;
pub mod oracle;
pub mod position;
pub mod reductions;
pub mod spec;
pub mod strategy;

pub use descriptor::Descriptor;
pub use error::{Error, Result};
pub use position::{Move, Outcome, Position};
pub use spec::{Family, GameSpec, MoveSet};
