//! Column-type standardization.
//!
//! * [`table`]: CSV-backed tables of text cells.
//! * [`standardize`]: one declarative clean function per column type.
//! * [`annotate`]: column-type inference, by validator voting or by a model.
//! * [`llm`]: chat-completion client with an OpenAI-compatible and a scripted
//!   backend, plus a content-addressed reply cache.
//! * [`orchestrate`]: the annotate → plan → execute → retry workflow.
//! * [`eval`]: cell-level matching rate and latency.

pub mod annotate;
pub mod eval;
pub mod llm;
pub mod orchestrate;
pub mod parallel;
pub mod standardize;
pub mod table;

pub use annotate::{infer_types_rules, AnnotationResult, CandidateTypes};
pub use parallel::Execution;
pub use standardize::{clean_column, validate, ColumnType, StandardizeOptions, TargetFormat};
pub use table::{load_csv, sample_rows, save_csv, table_info, Cell, IngestOptions, Table, TableError};
pub use eval::{cell_match_rate, evaluate_run, EvalReport};
pub use llm::{ChatMessage, LlmClient, LlmConfig};
pub use orchestrate::{run_workflow, AnnotatorMode, SessionSettings, SessionState, Status, Workflow};
