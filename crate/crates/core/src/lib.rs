//! Pinwheel scheduling: exact decision, a (1+ε)-approximation with constructive schedules,
//! the density-one hardness reduction from 3,4-SAT with checkable witnesses, and reductions
//! to related perpetual scheduling problems.

mod error;
pub mod exact;
pub mod exec;
pub mod fold;
pub mod instance;
pub mod num;
pub mod oracle;
pub mod ptas;
pub mod reductions;
pub mod related;
pub mod repr;
pub mod sat;
pub mod schedule;
mod serde_num;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Exec;
pub use instance::{Job, PinwheelInstance};
pub use num::Rational;
pub use repr::{Directive, ScheduleRepr};
pub use schedule::{validate_schedule, Schedule, Slot, Validity};
