//! Scripted stand-in for a language model.
//!
//! The system message says which agent is asking. Annotator requests are
//! answered by running the rule annotator over the sample embedded in the
//! prompt; plan requests get one step per annotated column, with date
//! formats copied from the required formats or from a `YYYY`-style pattern
//! in the user requirements. Faults can be injected to exercise retries.

use std::str::FromStr;
use std::sync::{Mutex, OnceLock};
use std::time::Duration;

use regex::Regex;

use super::{ChatBackend, ChatMessage, LlmConfig, LlmError};
use crate::annotate::{infer_types_rules, CandidateTypes, ANNOTATOR_TEMPLATE, DEFAULT_SAMPLE_SIZE, DEFAULT_THRESHOLD, DONT_KNOW};
use crate::orchestrate::prompt::{
    plan_generator_role, ANNOTATIONS_HEADER, ANNOTATION_SIGN_OFF, FORMATS_HEADER, REQUIREMENTS_HEADER, SECTION_HEADERS,
};
use crate::standardize::{ColumnType, DateFormat};
use crate::table::{load_csv, IngestOptions};

/// Function name used by an injected malformed plan.
pub const PLAN_MALFORMED_FUNCTION: &str = "clean_foo";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultKind {
    /// Annotator reply leaves out the last column.
    MalformedAnnotation,
    /// Plan reply calls a function that does not exist.
    MalformedPlan,
    /// Any request fails with a timeout.
    Timeout,
}

/// A fault that fires on the first `times` matching requests, or on every
/// one when `times` is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fault {
    pub kind: FaultKind,
    pub times: Option<usize>,
}

impl Fault {
    pub fn once(kind: FaultKind) -> Self {
        Self { kind, times: Some(1) }
    }

    pub fn always(kind: FaultKind) -> Self {
        Self { kind, times: None }
    }
}

impl FromStr for Fault {
    type Err = String;

    /// `malformed-plan-once`, `malformed-annotation-always`, `timeout-2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, count) = s
            .rsplit_once('-')
            .ok_or_else(|| format!("fault {s:?} needs a -once, -always or -N suffix"))?;
        let kind = match kind {
            "malformed-annotation" => FaultKind::MalformedAnnotation,
            "malformed-plan" => FaultKind::MalformedPlan,
            "timeout" => FaultKind::Timeout,
            other => return Err(format!("unknown fault kind {other:?}")),
        };
        let times = match count {
            "once" => Some(1),
            "always" => None,
            n => Some(n.parse().map_err(|_| format!("bad fault count {n:?}"))?),
        };
        Ok(Self { kind, times })
    }
}

#[derive(Debug, Default)]
pub struct MockBackend {
    faults: Vec<Fault>,
    fired: Mutex<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Request {
    Annotate,
    Plan,
}

impl MockBackend {
    pub fn new(faults: Vec<Fault>) -> Self {
        let fired = Mutex::new(vec![0; faults.len()]);
        Self { faults, fired }
    }

    /// Consumes one firing of the first live fault that applies.
    fn take_fault(&self, request: Request) -> Option<FaultKind> {
        let mut fired = self.fired.lock().unwrap_or_else(|p| p.into_inner());
        for (i, fault) in self.faults.iter().enumerate() {
            let applies = match fault.kind {
                FaultKind::Timeout => true,
                FaultKind::MalformedAnnotation => request == Request::Annotate,
                FaultKind::MalformedPlan => request == Request::Plan,
            };
            if applies && fault.times.is_none_or(|t| fired[i] < t) {
                fired[i] += 1;
                return Some(fault.kind);
            }
        }
        None
    }
}

impl ChatBackend for MockBackend {
    fn complete(&self, messages: &[ChatMessage], config: &LlmConfig) -> Result<String, LlmError> {
        let system = messages.first().map(|m| m.content.as_str()).unwrap_or_default();
        let request = if system.starts_with(first_line(ANNOTATOR_TEMPLATE)) {
            Request::Annotate
        } else if system.starts_with(plan_generator_role()) {
            Request::Plan
        } else {
            return Err(LlmError::Unscripted);
        };
        let fault = self.take_fault(request);
        if fault == Some(FaultKind::Timeout) {
            return Err(LlmError::Timeout(config.timeout.min(Duration::from_secs(60))));
        }
        match request {
            Request::Annotate => annotate_reply(system, fault == Some(FaultKind::MalformedAnnotation)),
            Request::Plan => {
                let user = messages.get(1).map(|m| m.content.as_str()).unwrap_or_default();
                Ok(plan_reply(user, fault == Some(FaultKind::MalformedPlan)))
            }
        }
    }
}

fn first_line(s: &str) -> &str {
    s.lines().next().unwrap_or_default()
}

/// Recovers placeholder values from a rendered annotator prompt.
fn unfill_annotator(prompt: &str) -> Option<(String, String)> {
    let (head, rest) = ANNOTATOR_TEMPLATE.split_once("{candidate_column_types}")?;
    let (middle, tail) = rest.split_once("{df}")?;
    let after_head = prompt.strip_prefix(head)?;
    let (candidates, after_middle) = after_head.split_once(middle)?;
    let df = after_middle.strip_suffix(tail)?;
    Some((candidates.to_owned(), df.to_owned()))
}

fn annotate_reply(prompt: &str, malformed: bool) -> Result<String, LlmError> {
    let (candidates, df) = unfill_annotator(prompt).ok_or(LlmError::Unscripted)?;
    let candidates: CandidateTypes = candidates.parse().map_err(|_| LlmError::Unscripted)?;
    let table = load_csv(df.as_bytes(), &IngestOptions::default()).map_err(|_| LlmError::Unscripted)?;
    let result =
        infer_types_rules(&table, &candidates, DEFAULT_SAMPLE_SIZE, DEFAULT_THRESHOLD).map_err(|_| LlmError::Unscripted)?;
    let mut lines: Vec<&str> = Vec::new();
    let rendered = result.render();
    lines.extend(rendered.lines());
    if malformed {
        lines.pop();
    }
    Ok(format!("{}\n\n{ANNOTATION_SIGN_OFF}", lines.join("\n")))
}

fn date_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?i)\b(?:YYYY|MM|DD|HH|SS)(?:[^A-Za-z0-9\r\n]{0,3}(?:YYYY|MM|DD|HH|SS))+\b").expect("valid regex")
    })
}

/// The last date pattern in free text that compiles as a target format, so
/// a later requirement overrides an earlier one.
pub(crate) fn find_date_format(text: &str) -> Option<String> {
    date_pattern()
        .find_iter(text)
        .map(|m| m.as_str().to_owned())
        .filter(|p| DateFormat::parse(p).is_ok())
        .last()
}

fn sections(text: &str) -> (Vec<&str>, String, Vec<&str>) {
    let (mut annotations, mut requirements, mut formats) = (Vec::new(), Vec::new(), Vec::new());
    let mut current = None;
    for line in text.lines() {
        let trimmed = line.trim();
        if SECTION_HEADERS.contains(&trimmed) {
            current = Some(trimmed);
            continue;
        }
        match current {
            Some(ANNOTATIONS_HEADER) => annotations.push(line),
            Some(REQUIREMENTS_HEADER) => requirements.push(line),
            Some(FORMATS_HEADER) => formats.push(line),
            _ => {}
        }
    }
    (annotations, requirements.join("\n"), formats)
}

fn plan_reply(user: &str, malformed: bool) -> String {
    let (annotation_lines, requirements, format_lines) = sections(user);
    let mut columns: Vec<(String, ColumnType)> = Vec::new();
    for line in annotation_lines {
        let line = line.replace("**", "");
        if let Some((name, class)) = line.trim().rsplit_once(':') {
            let class = class.trim();
            let kind = if class.eq_ignore_ascii_case(DONT_KNOW) {
                ColumnType::Unknown
            } else {
                class.parse().unwrap_or(ColumnType::Unknown)
            };
            columns.push((name.trim().to_owned(), kind));
        }
    }
    if malformed {
        let column = columns.first().map_or("?", |(c, _)| c.as_str());
        return serde_json::json!([{ "function": PLAN_MALFORMED_FUNCTION, "column": column }]).to_string();
    }
    let requested_date = find_date_format(&requirements);
    let required_format = |column: &str| {
        let prefix = format!("- {column}: ");
        format_lines
            .iter()
            .find_map(|l| l.trim_start().strip_prefix(prefix.as_str()))
            .map(|f| f.trim().to_owned())
    };
    let steps: Vec<serde_json::Value> = columns
        .iter()
        .filter_map(|(column, kind)| {
            let function = kind.clean_function()?;
            let format = required_format(column).or_else(|| match kind {
                ColumnType::Date => requested_date.clone(),
                _ => None,
            });
            let mut step = serde_json::json!({ "function": function, "column": column });
            if let Some(f) = format {
                step["target_format"] = f.into();
            }
            Some(step)
        })
        .collect();
    serde_json::to_string_pretty(&steps).expect("json values serialize")
}
