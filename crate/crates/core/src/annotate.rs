//! Column-type annotation.
//!
//! Two annotators share one result type: [`infer_types_rules`] votes with the
//! validators, and the model path renders [`build_annotator_prompt`] and reads
//! the reply back with [`parse_annotation_reply`].

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parallel::Execution;
use crate::standardize::{Cleaner, ColumnType, StandardizeOptions};
use crate::table::{sample_rows, Cell, Table};

pub const ANNOTATOR_TEMPLATE: &str = include_str!("../assets/prompts/column_annotator.txt");

/// The reply text a model gives for a column it cannot classify.
pub const DONT_KNOW: &str = "I do not know";

pub const DEFAULT_SAMPLE_SIZE: usize = 100;
pub const DEFAULT_THRESHOLD: f64 = 0.8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnnotateError {
    #[error("candidate type list is empty")]
    EmptyCandidates,
    #[error("candidate type {0} listed twice")]
    DuplicateCandidate(ColumnType),
    #[error("unknown is not a candidate type")]
    UnknownCandidate,
    #[error("sample size must be at least 1")]
    BadSampleSize,
    #[error("threshold {0} is outside (0, 1]")]
    BadThreshold(f64),
    #[error("malformed annotation: {0}")]
    MalformedAnnotation(String),
}

/// Ordered, duplicate-free subset of the supported types.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateTypes(Vec<ColumnType>);

impl CandidateTypes {
    pub fn new(types: Vec<ColumnType>) -> Result<Self, AnnotateError> {
        if types.is_empty() {
            return Err(AnnotateError::EmptyCandidates);
        }
        for (i, t) in types.iter().enumerate() {
            if *t == ColumnType::Unknown {
                return Err(AnnotateError::UnknownCandidate);
            }
            if types[..i].contains(t) {
                return Err(AnnotateError::DuplicateCandidate(*t));
            }
        }
        Ok(Self(types))
    }

    pub fn types(&self) -> &[ColumnType] {
        &self.0
    }

    pub fn contains(&self, t: ColumnType) -> bool {
        self.0.contains(&t)
    }

    /// Labels joined with `", "`, as substituted into prompts.
    pub fn joined(&self) -> String {
        self.0.iter().map(|t| t.label()).collect::<Vec<_>>().join(", ")
    }
}

impl Default for CandidateTypes {
    fn default() -> Self {
        Self(ColumnType::SUPPORTED.to_vec())
    }
}

impl FromStr for CandidateTypes {
    type Err = String;

    /// Comma-separated type names, e.g. `date,phone_number`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let types = s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| p.parse::<ColumnType>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(types).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnotationSource {
    Rules,
    Llm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnotationResult {
    pub assignments: IndexMap<String, ColumnType>,
    pub source: AnnotationSource,
}

impl AnnotationResult {
    pub fn get(&self, column: &str) -> Option<ColumnType> {
        self.assignments.get(column).copied()
    }

    /// One `**name: class**` line per column; unknown columns use the
    /// "I do not know" wording.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, t) in &self.assignments {
            let class = match t {
                ColumnType::Unknown => DONT_KNOW,
                t => t.label(),
            };
            out.push_str(&format!("**{name}: {class}**\n"));
        }
        out
    }
}

impl fmt::Display for AnnotationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, t) in &self.assignments {
            writeln!(f, "{name}: {t}")?;
        }
        Ok(())
    }
}

/// Tuning for [`infer_types_rules`].
#[derive(Debug, Clone)]
pub struct RuleSettings {
    pub sample_size: usize,
    pub threshold: f64,
    pub options: StandardizeOptions,
    pub execution: Execution,
}

impl Default for RuleSettings {
    fn default() -> Self {
        Self {
            sample_size: DEFAULT_SAMPLE_SIZE,
            threshold: DEFAULT_THRESHOLD,
            options: StandardizeOptions::default(),
            execution: Execution::default(),
        }
    }
}

/// Votes each column with the validators of every candidate.
///
/// Up to `sample_size` non-missing, non-blank cells are checked. The type with
/// the highest pass fraction wins if it reaches `threshold`; ties go to the
/// earlier candidate. Columns with no evidence are [`ColumnType::Unknown`].
pub fn infer_types_rules(
    table: &Table,
    candidates: &CandidateTypes,
    sample_size: usize,
    threshold: f64,
) -> Result<AnnotationResult, AnnotateError> {
    infer_types_rules_with(
        table,
        candidates,
        &RuleSettings {
            sample_size,
            threshold,
            ..RuleSettings::default()
        },
    )
}

pub fn infer_types_rules_with(
    table: &Table,
    candidates: &CandidateTypes,
    settings: &RuleSettings,
) -> Result<AnnotationResult, AnnotateError> {
    if settings.sample_size == 0 {
        return Err(AnnotateError::BadSampleSize);
    }
    if !(settings.threshold > 0.0 && settings.threshold <= 1.0) {
        return Err(AnnotateError::BadThreshold(settings.threshold));
    }
    let cleaners: Vec<Cleaner> = candidates
        .types()
        .iter()
        .map(|t| Cleaner::new(*t, None, &settings.options).expect("candidates exclude unknown"))
        .collect();

    let kinds = settings.execution.map_range(table.column_count(), |col| {
        let sample: Vec<&str> = table
            .column(col)
            .filter_map(Cell::as_text)
            .filter(|s| !s.trim().is_empty())
            .take(settings.sample_size)
            .collect();
        vote(&sample, &cleaners, settings.threshold)
    });

    Ok(AnnotationResult {
        assignments: table.columns().iter().cloned().zip(kinds).collect(),
        source: AnnotationSource::Rules,
    })
}

fn vote(sample: &[&str], cleaners: &[Cleaner], threshold: f64) -> ColumnType {
    if sample.is_empty() {
        return ColumnType::Unknown;
    }
    let mut best: Option<(usize, ColumnType)> = None;
    for cleaner in cleaners {
        let passed = sample.iter().filter(|v| cleaner.is_valid(v)).count();
        // strict > keeps the earlier candidate on ties
        if best.is_none_or(|(b, _)| passed > b) {
            best = Some((passed, cleaner.kind()));
        }
    }
    match best {
        Some((passed, kind)) if passed > 0 && passed as f64 / sample.len() as f64 >= threshold => kind,
        _ => ColumnType::Unknown,
    }
}

/// Fills the annotator template with the candidate labels and a CSV sample.
pub fn build_annotator_prompt(table: &Table, candidates: &CandidateTypes, sample_size: usize) -> String {
    ANNOTATOR_TEMPLATE
        .replace("{candidate_column_types}", &candidates.joined())
        .replace("{df}", &sample_rows(table, sample_size))
}

/// Reads `name: class` pairs out of a model reply.
///
/// `**` markers, bullets and lines without a known column are ignored. The
/// split happens at the last `:` so column names may contain colons.
pub fn parse_annotation_reply(
    reply: &str,
    columns: &[String],
    candidates: &CandidateTypes,
) -> Result<AnnotationResult, AnnotateError> {
    let mut found: IndexMap<&str, ColumnType> = IndexMap::new();
    for line in reply.lines() {
        let line = line.replace("**", "");
        let line = line.trim().trim_start_matches(['-', '*', '•']).trim();
        let Some((name, class)) = line.rsplit_once(':') else {
            continue;
        };
        let name = name.trim().trim_matches(['`', '"', '\'']);
        let Some(column) = columns.iter().find(|c| c.as_str() == name) else {
            continue;
        };
        let class = class.trim().trim_end_matches(['.', '!']).trim().trim_matches(['`', '"', '\'']);
        let kind = if class.eq_ignore_ascii_case(DONT_KNOW) {
            ColumnType::Unknown
        } else {
            match class.parse::<ColumnType>() {
                Ok(t) if t == ColumnType::Unknown || candidates.contains(t) => t,
                _ => {
                    return Err(AnnotateError::MalformedAnnotation(format!(
                        "column {column:?} has class {class:?}, which is not a candidate"
                    )))
                }
            }
        };
        found.entry(column.as_str()).or_insert(kind);
    }
    let mut assignments = IndexMap::with_capacity(columns.len());
    for c in columns {
        let kind = found
            .get(c.as_str())
            .ok_or_else(|| AnnotateError::MalformedAnnotation(format!("no class given for column {c:?}")))?;
        assignments.insert(c.clone(), *kind);
    }
    Ok(AnnotationResult {
        assignments,
        source: AnnotationSource::Llm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(cols: &[&str], rows: &[&[Option<&str>]]) -> Table {
        Table::from_strs(cols, rows).unwrap()
    }

    fn names(cols: &[&str]) -> Vec<String> {
        cols.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn rules_examples() {
        let table = t(
            &["when", "junk", "empty"],
            &[
                &[Some("2003-09-25 10:36:28"), Some("xyzzy"), None],
                &[Some("2011-12-08 15:50:00"), Some("qwerty"), None],
            ],
        );
        let r = infer_types_rules(&table, &CandidateTypes::default(), 100, 0.8).unwrap();
        assert_eq!(r.get("when"), Some(ColumnType::Date));
        assert_eq!(r.get("junk"), Some(ColumnType::Unknown));
        assert_eq!(r.get("empty"), Some(ColumnType::Unknown));
        assert_eq!(r.source, AnnotationSource::Rules);
    }

    #[test]
    fn threshold_and_ties() {
        let table = t(
            &["c"],
            &[&[Some("red")], &[Some("blue")], &[Some("#fff")], &[Some("nope")]],
        );
        let all = CandidateTypes::default();
        assert_eq!(infer_types_rules(&table, &all, 100, 0.75).unwrap().get("c"), Some(ColumnType::Color));
        assert_eq!(infer_types_rules(&table, &all, 100, 0.8).unwrap().get("c"), Some(ColumnType::Unknown));
        // sample of 3 skips the bad cell
        assert_eq!(infer_types_rules(&table, &all, 3, 1.0).unwrap().get("c"), Some(ColumnType::Color));
    }

    #[test]
    fn bad_settings() {
        let table = t(&["c"], &[]);
        let all = CandidateTypes::default();
        assert_eq!(infer_types_rules(&table, &all, 0, 0.5), Err(AnnotateError::BadSampleSize));
        assert!(matches!(infer_types_rules(&table, &all, 1, 0.0), Err(AnnotateError::BadThreshold(_))));
        assert_eq!(CandidateTypes::new(vec![]), Err(AnnotateError::EmptyCandidates));
        assert!("date,date".parse::<CandidateTypes>().is_err());
        assert_eq!(
            "date, Phone Number".parse::<CandidateTypes>().unwrap().types(),
            &[ColumnType::Date, ColumnType::PhoneNumber]
        );
    }

    #[test]
    fn prompt_is_filled_and_stable() {
        let table = t(
            &["Admission Date", "Address"],
            &[&[Some("2024-01-02"), Some("1 Main St, Springfield, IL 62704")]],
        );
        let cands = CandidateTypes::new(vec![ColumnType::Date, ColumnType::Address]).unwrap();
        let p = build_annotator_prompt(&table, &cands, 5);
        assert!(p.starts_with("You are an expert column type annotator."));
        assert!(p.contains("seperated with comma: date, address."));
        assert!(p.contains("Admission Date,Address\n2024-01-02,\"1 Main St, Springfield, IL 62704\"\n"));
        assert!(p.contains("\"I do not know\""));
        assert!(!p.contains('{'));
        assert_eq!(p, build_annotator_prompt(&table.clone(), &cands, 5));
    }

    #[test]
    fn reply_parsing() {
        let cols = names(&["Admission Date", "Address"]);
        let all = CandidateTypes::default();
        let r = parse_annotation_reply("**Admission Date: date**\n**Address: address**", &cols, &all).unwrap();
        assert_eq!(r.get("Admission Date"), Some(ColumnType::Date));
        assert_eq!(r.get("Address"), Some(ColumnType::Address));
        assert_eq!(r.source, AnnotationSource::Llm);

        let noisy = "Here you go:\n- **Address: Address**\n- **Admission Date: DATE**\n\nPlease using corresponding clean functions and write code to clean the column";
        assert_eq!(parse_annotation_reply(noisy, &cols, &all).unwrap().get("Address"), Some(ColumnType::Address));

        let one = names(&["Admission Date"]);
        let r = parse_annotation_reply("Admission Date: I do not know", &one, &all).unwrap();
        assert_eq!(r.get("Admission Date"), Some(ColumnType::Unknown));

        assert!(matches!(
            parse_annotation_reply("**Address: address**", &cols, &all),
            Err(AnnotateError::MalformedAnnotation(_))
        ));
        let narrow = CandidateTypes::new(vec![ColumnType::Date]).unwrap();
        assert!(matches!(
            parse_annotation_reply("**Admission Date: date**\n**Address: address**", &cols, &narrow),
            Err(AnnotateError::MalformedAnnotation(_))
        ));
    }

    #[test]
    fn render_round_trips() {
        let cols = names(&["a: b", "c"]);
        let r = AnnotationResult {
            assignments: [("a: b".to_string(), ColumnType::Url), ("c".to_string(), ColumnType::Unknown)]
                .into_iter()
                .collect(),
            source: AnnotationSource::Llm,
        };
        assert_eq!(parse_annotation_reply(&r.render(), &cols, &CandidateTypes::default()).unwrap(), r);
    }
}
