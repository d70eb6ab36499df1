use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use colstd_core::annotate::CandidateTypes;
use colstd_core::llm::{BackendKind, Fault, LlmClient, LlmConfig, MockBackend, DEFAULT_MODEL};
use colstd_core::orchestrate::{AnnotatorMode, SessionSettings, Workflow};
use colstd_core::standardize::{CallingCode, DateOrder, StandardizeOptions};
use colstd_core::IngestOptions;

#[derive(Debug, Parser)]
#[command(name = "colstd", version, about = "Standardize the value formats of CSV columns")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the inferred type of every column.
    Infer(InferArgs),
    /// Annotate, plan and clean a table, then write the result.
    Standardize(StandardizeArgs),
    /// Score a cleaned table against a ground-truth table.
    Evaluate(EvaluateArgs),
    /// Serve the HTTP API and the console.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LlmChoice {
    /// Scripted model for both annotation and planning.
    Mock,
    /// Validator voting for annotation, scripted planning. No model at all.
    Rules,
    /// An OpenAI-compatible endpoint.
    Openai,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    /// Field text read and written as a missing cell.
    #[arg(long, default_value = "")]
    pub nan_token: String,
}

impl TableArgs {
    pub fn ingest(&self) -> IngestOptions {
        IngestOptions::with_nan_token(self.nan_token.clone())
    }
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    /// Calling code for phone numbers written without one.
    #[arg(long, default_value = "1")]
    pub default_region: String,
    /// Reading of ambiguous numeric dates: mdy or dmy.
    #[arg(long, default_value = "mdy")]
    pub date_order: DateOrder,
    /// Year given to dates written without one (otherwise they become missing).
    #[arg(long)]
    pub reference_year: Option<i32>,
    /// Comma-separated candidate types, e.g. date,address.
    #[arg(long)]
    pub candidates: Option<CandidateTypes>,
    /// Cells per column checked by the rule annotator and shown to the model.
    #[arg(long, default_value_t = 100)]
    pub sample_size: usize,
    /// Share of sampled cells a type must validate to be chosen.
    #[arg(long, default_value_t = 0.8)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value_t = LlmChoice::Rules)]
    pub llm: LlmChoice,
    /// Base URL of an OpenAI-compatible server.
    #[arg(long)]
    pub base_url: Option<String>,
    #[arg(long, default_value = DEFAULT_MODEL)]
    pub model: String,
    #[arg(long, default_value_t = 0.0)]
    pub temperature: f64,
    /// Request timeout in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: i64,
    /// Directory for cached model replies.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Fault injected into the scripted model, e.g. malformed-plan-once.
    #[arg(long = "mock-fault")]
    pub mock_faults: Vec<Fault>,
    #[arg(long, default_value_t = 3)]
    pub max_retries: usize,
}

impl EngineArgs {
    pub fn options(&self) -> Result<StandardizeOptions, String> {
        Ok(StandardizeOptions {
            default_region: CallingCode::parse(&self.default_region).map_err(|e| e.to_string())?,
            date_order: self.date_order,
            reference_year: self.reference_year,
        })
    }

    pub fn settings(&self, source_name: &str) -> Result<SessionSettings, String> {
        if self.sample_size == 0 {
            return Err("--sample-size must be at least 1".into());
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err("--threshold must be in (0, 1]".into());
        }
        Ok(SessionSettings {
            candidates: self.candidates.clone().unwrap_or_default(),
            sample_size: self.sample_size,
            threshold: self.threshold,
            max_retries: self.max_retries,
            options: self.options()?,
            source_name: source_name.to_owned(),
        })
    }

    pub fn llm_config(&self) -> Result<LlmConfig, String> {
        if !(self.timeout > 0.0 && self.timeout.is_finite()) {
            return Err("--timeout must be positive".into());
        }
        Ok(LlmConfig {
            backend: match self.llm {
                LlmChoice::Openai => BackendKind::OpenAiCompatible,
                LlmChoice::Mock | LlmChoice::Rules => BackendKind::Mock,
            },
            model: self.model.clone(),
            temperature: self.temperature,
            timeout: Duration::from_secs_f64(self.timeout),
            cache_dir: self.cache_dir.clone(),
            base_url: self.base_url.clone(),
            seed: Some(self.seed),
        })
    }

    pub fn client(&self) -> Result<LlmClient, String> {
        let config = self.llm_config()?;
        let client = match self.llm {
            LlmChoice::Openai => {
                if !self.mock_faults.is_empty() {
                    return Err("--mock-fault only applies to --llm mock or rules".into());
                }
                LlmClient::new(config)
            }
            LlmChoice::Mock | LlmChoice::Rules => {
                LlmClient::with_backend(config, Arc::new(MockBackend::new(self.mock_faults.clone())))
            }
        };
        client.map_err(|e| e.to_string())
    }

    pub fn annotator(&self) -> AnnotatorMode {
        match self.llm {
            LlmChoice::Rules => AnnotatorMode::Rules,
            LlmChoice::Mock | LlmChoice::Openai => AnnotatorMode::Llm,
        }
    }

    pub fn workflow(&self) -> Result<Workflow, String> {
        Ok(Workflow::new(self.client()?, self.annotator()))
    }
}

#[derive(Debug, Args)]
pub struct InferArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub table: TableArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Print a JSON object instead of lines.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct StandardizeArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub table: TableArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Extra requirement in plain language; repeatable.
    #[arg(long)]
    pub requirements: Vec<String>,
    /// Force a column type: "column=type" or "column=type:format"; repeatable.
    #[arg(long = "set")]
    pub overrides: Vec<String>,
    #[arg(long, short, default_value = "cleaned_data.csv")]
    pub output: PathBuf,
    /// Print the final session summary as JSON on stdout.
    #[arg(long)]
    pub json: bool,
    /// Do not print the agent transcript on stderr.
    #[arg(long, short)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub cleaned: PathBuf,
    pub truth: PathBuf,
    #[command(flatten)]
    pub table: TableArgs,
    #[arg(long)]
    pub json: bool,
    /// Divide matches by the row count only, summing column rates.
    #[arg(long)]
    pub per_row: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = 8000)]
    pub port: u16,
    /// Directory with the console's static files.
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
    /// Idle seconds before a session is dropped.
    #[arg(long, default_value_t = 3600)]
    pub session_ttl: u64,
    #[command(flatten)]
    pub table: TableArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
}
