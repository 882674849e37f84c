//! Serialized forms: Minion model text, JSON reports of configurations and
//! canonical DSL source.

mod minion;
mod minion_check;
mod pretty;
mod report;

pub use minion::{emit_minion, EmitError};
pub use minion_check::{check_minion, MinionStats, MinionSyntaxError};
pub use pretty::{pretty_library, pretty_problem, pretty_template};
pub use report::{emit_report, parse_report, ReportError};
