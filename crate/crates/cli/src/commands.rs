use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use colstd_core::annotate::{build_annotator_prompt, infer_types_rules_with, parse_annotation_reply, RuleSettings};
use colstd_core::eval::{cell_match_rate_with, Normalization};
use colstd_core::llm::ChatMessage;
use colstd_core::orchestrate::{prompt, run_workflow, AnnotatorMode, SessionState, Status, TranscriptEvent, WorkflowEvent};
use colstd_core::parallel::Execution;
use colstd_core::{load_csv, save_csv, IngestOptions, Table};
use indexmap::IndexMap;

use crate::opts::{EvaluateArgs, InferArgs, StandardizeArgs};

/// A message for stderr and the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub message: String,
    pub code: u8,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: 2 }
    }

    pub fn run(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: 1 }
    }
}

pub fn read_table(path: &Path, options: &IngestOptions) -> Result<Table, Failure> {
    let file = File::open(path).map_err(|e| Failure::run(format!("cannot read {}: {e}", path.display())))?;
    load_csv(BufReader::new(file), options).map_err(|e| Failure::run(format!("{}: {e}", path.display())))
}

fn source_name(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

pub fn format_event(e: &TranscriptEvent) -> String {
    let mut lines = e.content.lines();
    let mut out = format!("[{}] {} {}: {}", e.seq, e.step.badge(), e.agent, lines.next().unwrap_or_default());
    for l in lines {
        out.push_str("\n    ");
        out.push_str(l);
    }
    out
}

pub fn infer(args: &InferArgs) -> Result<(), Failure> {
    let table = read_table(&args.input, &args.table.ingest())?;
    let settings = args.engine.settings(&source_name(&args.input)).map_err(Failure::usage)?;
    let result = match args.engine.annotator() {
        AnnotatorMode::Rules => {
            let rules = RuleSettings {
                sample_size: settings.sample_size,
                threshold: settings.threshold,
                options: settings.options.clone(),
                execution: Execution::default(),
            };
            infer_types_rules_with(&table, &settings.candidates, &rules).map_err(|e| Failure::run(e.to_string()))?
        }
        AnnotatorMode::Llm => {
            let client = args.engine.client().map_err(Failure::usage)?;
            let system = build_annotator_prompt(&table, &settings.candidates, settings.sample_size);
            let user = prompt::chat_manager_instruction(&settings.source_name, &settings.candidates);
            let reply = client
                .complete(&[ChatMessage::system(system), ChatMessage::user(user)])
                .map_err(|e| Failure::run(e.to_string()))?;
            parse_annotation_reply(&reply, table.columns(), &settings.candidates).map_err(|e| Failure::run(e.to_string()))?
        }
    };
    if args.json {
        let map: IndexMap<&str, &str> = result.assignments.iter().map(|(c, t)| (c.as_str(), t.label())).collect();
        println!("{}", serde_json::to_string(&map).expect("strings serialize"));
    } else {
        print!("{result}");
    }
    Ok(())
}

pub fn standardize(args: &StandardizeArgs) -> Result<(), Failure> {
    let ingest = args.table.ingest();
    let table = read_table(&args.input, &ingest)?;
    let settings = args.engine.settings(&source_name(&args.input)).map_err(Failure::usage)?;
    let mut session = SessionState::new(table, settings);
    for text in &args.requirements {
        session.add_requirement(text).map_err(|e| Failure::usage(e.to_string()))?;
    }
    for spec in &args.overrides {
        let (column, value) = spec
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("--set {spec:?} is not column=type[:format]")))?;
        let value = value.parse().map_err(|e| Failure::usage(format!("--set {spec:?}: {e}")))?;
        session
            .set_override(column.trim(), value)
            .map_err(|e| Failure::usage(format!("--set {spec:?}: {e}")))?;
    }

    let mut workflow = args.engine.workflow().map_err(Failure::usage)?;
    if !args.quiet {
        for e in session.transcript() {
            eprintln!("{}", format_event(e));
        }
        workflow = workflow.with_observer(Arc::new(|event| {
            if let WorkflowEvent::Message(e) = event {
                eprintln!("{}", format_event(e));
            }
        }));
    }
    let session = run_workflow(session, &workflow);

    if args.json {
        let summary = serde_json::json!({
            "status": session.status(),
            "attempts": session.attempts(),
            "annotations": session.annotations().map(|a| a.assignments.iter().map(|(c, t)| (c.clone(), t.label())).collect::<IndexMap<_, _>>()),
            "plan": session.plan(),
            "error": session.last_error().map(|e| e.to_string()),
            "output": (session.status() == Status::Succeeded).then(|| args.output.display().to_string()),
        });
        println!("{summary}");
    }
    match (session.status(), session.result()) {
        (Status::Succeeded, Some(result)) => {
            let file = File::create(&args.output)
                .map_err(|e| Failure::run(format!("cannot write {}: {e}", args.output.display())))?;
            let mut sink = BufWriter::new(file);
            save_csv(result, &mut sink, &ingest).map_err(|e| Failure::run(e.to_string()))?;
            sink.flush().map_err(|e| Failure::run(e.to_string()))?;
            if !args.json {
                println!(
                    "wrote {} ({} rows, {} columns) after {} attempt(s)",
                    args.output.display(),
                    result.row_count(),
                    result.column_count(),
                    session.attempts()
                );
            }
            Ok(())
        }
        _ => Err(Failure::run(format!(
            "standardization failed after {} attempt(s): {}",
            session.attempts(),
            session.last_error().map_or_else(|| "unknown error".to_owned(), |e| e.to_string())
        ))),
    }
}

pub fn evaluate(args: &EvaluateArgs) -> Result<(), Failure> {
    let ingest = args.table.ingest();
    let cleaned = read_table(&args.cleaned, &ingest)?;
    let truth = read_table(&args.truth, &ingest)?;
    let normalization = if args.per_row { Normalization::Rows } else { Normalization::Cells };
    let report = cell_match_rate_with(&cleaned, &truth, normalization, Execution::default())
        .map_err(|e| Failure::run(e.to_string()))?;
    if args.json {
        println!("{}", report.to_json());
    } else {
        print!("{report}");
    }
    Ok(())
}
