//! The annotate → plan → execute workflow with retries.
//!
//! A chat manager routes messages between three agents: the column-type
//! annotator, the plan generator and the plan executor. Every message is
//! stored in the sender's and receiver's memory and always in the chat
//! manager's. Any failure is reported back to the chat manager and the whole
//! workflow starts over from annotation, up to `max_retries` times.

mod memory;
mod plan;
pub mod prompt;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use memory::{AgentMemory, AgentRole, Memories, Step, TranscriptEvent};
pub use plan::{execute_plan, parse_plan, CleaningPlan, PlanStep};

use crate::annotate::{
    build_annotator_prompt, infer_types_rules_with, parse_annotation_reply, AnnotateError, AnnotationResult, CandidateTypes,
    RuleSettings, DEFAULT_SAMPLE_SIZE, DEFAULT_THRESHOLD,
};
use crate::llm::{ChatMessage, LlmClient, LlmError};
use crate::parallel::Execution;
use crate::standardize::{ColumnType, DateFormat, StandardizeError, StandardizeOptions, TargetFormat};
use crate::table::Table;

pub const DEFAULT_MAX_RETRIES: usize = 3;
pub const DEFAULT_OUTPUT_NAME: &str = "cleaned_data.csv";
pub const COMPLETED_MESSAGE: &str = "data standardization is completed";

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "message", rename_all = "snake_case")]
pub enum WorkflowError {
    #[error("malformed annotation: {0}")]
    MalformedAnnotation(String),
    #[error("malformed plan: {0}")]
    MalformedPlan(String),
    #[error("execution error: {0}")]
    ExecutionError(String),
    #[error("language model error: {0}")]
    LlmError(String),
}

impl From<LlmError> for WorkflowError {
    fn from(e: LlmError) -> Self {
        WorkflowError::LlmError(e.to_string())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SessionError {
    #[error("a workflow is running on this session")]
    SessionActive,
    #[error("requirement text is empty")]
    EmptyRequirement,
    #[error(transparent)]
    Standardize(#[from] StandardizeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pending,
    Annotating,
    Planning,
    Executing,
    Succeeded,
    Failed,
}

impl Status {
    pub fn is_running(self) -> bool {
        matches!(self, Status::Annotating | Status::Planning | Status::Executing)
    }

    pub fn is_finished(self) -> bool {
        matches!(self, Status::Succeeded | Status::Failed)
    }
}

/// A user-forced type, and optionally format, for one column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Override {
    pub kind: ColumnType,
    pub target_format: Option<TargetFormat>,
}

impl FromStr for Override {
    type Err = StandardizeError;

    /// `type` or `type:format`, e.g. `date:MM/DD/YYYY HH:MM:SS`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, format) = match s.split_once(':') {
            Some((k, f)) => (k, Some(f.trim())),
            None => (s, None),
        };
        let kind: ColumnType = kind.parse()?;
        let target_format = format.filter(|f| !f.is_empty()).map(TargetFormat::new);
        if let (ColumnType::Date, Some(f)) = (kind, &target_format) {
            DateFormat::parse(f.as_str())?;
        }
        Ok(Self { kind, target_format })
    }
}

impl fmt::Display for Override {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.target_format {
            Some(t) => write!(f, "{}:{}", self.kind, t.as_str()),
            None => write!(f, "{}", self.kind),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SessionSettings {
    pub candidates: CandidateTypes,
    pub sample_size: usize,
    pub threshold: f64,
    pub max_retries: usize,
    pub options: StandardizeOptions,
    /// Shown to the agents as the table's path.
    pub source_name: String,
}

impl Default for SessionSettings {
    fn default() -> Self {
        Self {
            candidates: CandidateTypes::default(),
            sample_size: DEFAULT_SAMPLE_SIZE,
            threshold: DEFAULT_THRESHOLD,
            max_retries: DEFAULT_MAX_RETRIES,
            options: StandardizeOptions::default(),
            source_name: "input.csv".to_owned(),
        }
    }
}

/// Everything one standardization conversation owns.
#[derive(Debug, Clone)]
pub struct SessionState {
    table: Table,
    settings: SessionSettings,
    requirements: Vec<String>,
    overrides: IndexMap<String, Override>,
    annotations: Option<AnnotationResult>,
    plan: Option<CleaningPlan>,
    result: Option<Table>,
    attempts: usize,
    status: Status,
    last_error: Option<WorkflowError>,
    memories: Memories,
}

impl SessionState {
    pub fn new(table: Table, settings: SessionSettings) -> Self {
        Self {
            table,
            settings,
            requirements: Vec::new(),
            overrides: IndexMap::new(),
            annotations: None,
            plan: None,
            result: None,
            attempts: 0,
            status: Status::Pending,
            last_error: None,
            memories: Memories::default(),
        }
    }

    pub fn table(&self) -> &Table {
        &self.table
    }
    pub fn settings(&self) -> &SessionSettings {
        &self.settings
    }
    pub fn requirements(&self) -> &[String] {
        &self.requirements
    }
    pub fn overrides(&self) -> &IndexMap<String, Override> {
        &self.overrides
    }
    pub fn annotations(&self) -> Option<&AnnotationResult> {
        self.annotations.as_ref()
    }
    pub fn plan(&self) -> Option<&CleaningPlan> {
        self.plan.as_ref()
    }
    pub fn result(&self) -> Option<&Table> {
        self.result.as_ref()
    }
    pub fn attempts(&self) -> usize {
        self.attempts
    }
    pub fn max_retries(&self) -> usize {
        self.settings.max_retries
    }
    pub fn status(&self) -> Status {
        self.status
    }
    pub fn last_error(&self) -> Option<&WorkflowError> {
        self.last_error.as_ref()
    }
    pub fn memory(&self, role: AgentRole) -> &AgentMemory {
        self.memories.of(role)
    }
    pub fn transcript(&self) -> &[TranscriptEvent] {
        self.memories.transcript()
    }

    /// Adds a natural-language requirement and readies the session for a
    /// fresh run. History is kept.
    pub fn add_requirement(&mut self, text: &str) -> Result<(), SessionError> {
        if self.status.is_running() {
            return Err(SessionError::SessionActive);
        }
        let text = text.trim();
        if text.is_empty() {
            return Err(SessionError::EmptyRequirement);
        }
        self.requirements.push(text.to_owned());
        self.memories
            .record(AgentRole::ChatManager, AgentRole::ChatManager, Step::INPUT, format!("New requirement: {text}"));
        self.reset();
        Ok(())
    }

    /// Forces a column's type, and optionally its format, for later runs.
    pub fn set_override(&mut self, column: &str, value: Override) -> Result<(), SessionError> {
        if self.status.is_running() {
            return Err(SessionError::SessionActive);
        }
        if self.table.column_index(column).is_none() {
            return Err(StandardizeError::UnknownColumn(column.to_owned()).into());
        }
        self.overrides.insert(column.to_owned(), value);
        self.reset();
        Ok(())
    }

    /// Readies a finished session for another run with the same inputs.
    pub fn restart(&mut self) -> Result<(), SessionError> {
        if self.status.is_running() {
            return Err(SessionError::SessionActive);
        }
        self.reset();
        Ok(())
    }

    fn reset(&mut self) {
        self.status = Status::Pending;
        self.attempts = 0;
        self.annotations = None;
        self.plan = None;
        self.result = None;
        self.last_error = None;
    }

    /// The plan generator prompt: system template plus the session context.
    pub fn build_plan_prompt(&self) -> Option<String> {
        let ctx = self.plan_context(self.annotations.as_ref()?, &[]);
        Some(format!("{}\n\n{ctx}", prompt::plan_system_prompt()))
    }

    fn plan_context(&self, annotations: &AnnotationResult, errors: &[String]) -> String {
        prompt::plan_context(annotations, &self.requirements, &self.overrides, errors)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnotatorMode {
    /// Ask the language model with the annotator prompt.
    Llm,
    /// Vote with the validators; no model call.
    Rules,
}

/// Something observed while a workflow runs.
#[derive(Debug, Clone, Copy)]
pub enum WorkflowEvent<'a> {
    Message(&'a TranscriptEvent),
    Status(Status),
}

pub type Observer = Arc<dyn Fn(WorkflowEvent<'_>) + Send + Sync>;

/// How a session is run: which client, which annotator, who is watching.
#[derive(Clone)]
pub struct Workflow {
    pub client: LlmClient,
    pub annotator: AnnotatorMode,
    pub execution: Execution,
    pub observer: Option<Observer>,
}

impl Workflow {
    pub fn new(client: LlmClient, annotator: AnnotatorMode) -> Self {
        Self { client, annotator, execution: Execution::default(), observer: None }
    }

    pub fn with_observer(mut self, observer: Observer) -> Self {
        self.observer = Some(observer);
        self
    }
}

struct Run<'a> {
    session: &'a mut SessionState,
    workflow: &'a Workflow,
}

impl Run<'_> {
    fn say(&mut self, from: AgentRole, to: AgentRole, step: Step, content: String) {
        let event = self.session.memories.record(from, to, step, content);
        if let Some(observe) = &self.workflow.observer {
            observe(WorkflowEvent::Message(event));
        }
    }

    fn set_status(&mut self, status: Status) {
        self.session.status = status;
        if let Some(observe) = &self.workflow.observer {
            observe(WorkflowEvent::Status(status));
        }
    }

    fn annotate(&mut self, errors: &[String]) -> Result<AnnotationResult, WorkflowError> {
        let s = &*self.session;
        let settings = &s.settings;
        let prompt = build_annotator_prompt(&s.table, &settings.candidates, settings.sample_size);
        let instruction = prompt::chat_manager_instruction(&settings.source_name, &settings.candidates);
        let context = prompt::annotator_context(&instruction, &s.requirements, errors);
        // memory holds both turns the annotator actually receives
        let sent = format!("{}\n\n{context}", prompt.trim_end());
        self.say(AgentRole::ChatManager, AgentRole::ColumnTypeAnnotator, Step::TO_ANNOTATOR, sent);

        let s = &*self.session;
        let result = match self.workflow.annotator {
            AnnotatorMode::Rules => {
                let rules = RuleSettings {
                    sample_size: s.settings.sample_size,
                    threshold: s.settings.threshold,
                    options: s.settings.options.clone(),
                    execution: self.workflow.execution,
                };
                let r = infer_types_rules_with(&s.table, &s.settings.candidates, &rules)
                    .map_err(|e| WorkflowError::MalformedAnnotation(e.to_string()));
                let reply = match &r {
                    Ok(r) => r.render(),
                    Err(e) => e.to_string(),
                };
                self.say(AgentRole::ColumnTypeAnnotator, AgentRole::ChatManager, Step::ANNOTATION, reply);
                r?
            }
            AnnotatorMode::Llm => {
                let reply = self
                    .workflow
                    .client
                    .complete(&[ChatMessage::system(prompt), ChatMessage::user(context)])?;
                self.say(AgentRole::ColumnTypeAnnotator, AgentRole::ChatManager, Step::ANNOTATION, reply.clone());
                let s = &*self.session;
                parse_annotation_reply(&reply, s.table.columns(), &s.settings.candidates).map_err(|e| match e {
                    AnnotateError::MalformedAnnotation(why) => WorkflowError::MalformedAnnotation(why),
                    other => WorkflowError::MalformedAnnotation(other.to_string()),
                })?
            }
        };
        Ok(self.apply_overrides(result))
    }

    fn apply_overrides(&self, mut result: AnnotationResult) -> AnnotationResult {
        for (column, o) in &self.session.overrides {
            if let Some(slot) = result.assignments.get_mut(column) {
                *slot = o.kind;
            }
        }
        result
    }

    fn attempt(&mut self, errors: &[String]) -> Result<Table, WorkflowError> {
        self.set_status(Status::Annotating);
        let annotations = self.annotate(errors)?;
        self.session.annotations = Some(annotations.clone());

        self.set_status(Status::Planning);
        let context = self.session.plan_context(&annotations, errors);
        self.say(AgentRole::ChatManager, AgentRole::PlanGenerator, Step::TO_PLANNER, context.clone());
        let reply = self
            .workflow
            .client
            .complete(&[ChatMessage::system(prompt::plan_system_prompt()), ChatMessage::user(context)])?;
        self.say(AgentRole::PlanGenerator, AgentRole::ChatManager, Step::PLAN, reply.clone());
        let s = &*self.session;
        let plan = parse_plan(&reply, &s.table, &annotations, &s.overrides)?;
        self.session.plan = Some(plan.clone());

        self.set_status(Status::Executing);
        self.say(AgentRole::ChatManager, AgentRole::PlanExecutor, Step::TO_EXECUTOR, plan.to_json());
        let s = &*self.session;
        let table = match execute_plan(&plan, &s.table, &s.settings.options, self.workflow.execution) {
            Ok(t) => t,
            Err(e) => {
                self.say(AgentRole::PlanExecutor, AgentRole::ChatManager, Step::RESULT, format!("error: {e}"));
                return Err(e);
            }
        };
        let skipped: Vec<&str> = annotations
            .assignments
            .iter()
            .filter(|(_, t)| **t == ColumnType::Unknown)
            .map(|(c, _)| c.as_str())
            .collect();
        let mut summary = format!(
            "Applied {} step(s) to {} row(s): {}.",
            plan.steps.len(),
            table.row_count(),
            plan.steps.iter().map(|s| format!("{}({})", s.function, s.column)).collect::<Vec<_>>().join(", ")
        );
        if !skipped.is_empty() {
            summary.push_str(&format!(" Left unchanged (unknown type): {}.", skipped.join(", ")));
        }
        summary.push_str(&format!(" Result stored as {DEFAULT_OUTPUT_NAME}; {COMPLETED_MESSAGE}."));
        self.say(AgentRole::PlanExecutor, AgentRole::ChatManager, Step::RESULT, summary);
        Ok(table)
    }
}

/// Runs a pending session to `Succeeded` or `Failed`. Never panics on model
/// or data errors; they are recorded in the chat manager memory. A session
/// that is not pending is returned unchanged.
pub fn run_workflow(mut session: SessionState, workflow: &Workflow) -> SessionState {
    run_in_place(&mut session, workflow);
    session
}

pub fn run_in_place(session: &mut SessionState, workflow: &Workflow) {
    if session.status != Status::Pending {
        return;
    }
    let mut run = Run { session, workflow };
    let s = &*run.session;
    let mut opening = prompt::chat_manager_instruction(&s.settings.source_name, &s.settings.candidates);
    opening.push_str(&format!("\n{}\n{}", prompt::REQUIREMENTS_HEADER, prompt::requirements_text(&s.requirements)));
    run.say(AgentRole::ChatManager, AgentRole::ChatManager, Step::INPUT, opening);

    let mut errors: Vec<String> = Vec::new();
    let limit = run.session.settings.max_retries + 1;
    for attempt in 1..=limit {
        run.session.attempts = attempt;
        match run.attempt(&errors) {
            Ok(table) => {
                run.session.result = Some(table);
                run.session.last_error = None;
                run.set_status(Status::Succeeded);
                return;
            }
            Err(error) => {
                let note = if attempt < limit {
                    format!("Attempt {attempt} failed: {error}. Retrying the whole workflow.")
                } else {
                    format!("Attempt {attempt} failed: {error}. Giving up after {attempt} attempt(s).")
                };
                run.say(AgentRole::ChatManager, AgentRole::ChatManager, Step::RESULT, note);
                errors.push(error.to_string());
                run.session.last_error = Some(error);
            }
        }
    }
    run.set_status(Status::Failed);
}
