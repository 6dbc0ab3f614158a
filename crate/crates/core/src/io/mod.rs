//! Model files and reports.

mod model_file;
mod report;

pub use model_file::{emit_model, load_model, parse_model};
pub use report::{emit_report, CheckStatus, Format, Record, Report, Summary};
