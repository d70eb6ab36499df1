//! Prompt texts exchanged between the agents.

use indexmap::IndexMap;

use super::Override;
use crate::annotate::{AnnotationResult, CandidateTypes};
use crate::standardize::{ColumnType, DEFAULT_DATE_FORMAT};

pub const CHAT_MANAGER_TEMPLATE: &str = include_str!("../../assets/prompts/chat_manager.txt");
pub const PLAN_GENERATOR_TEMPLATE: &str = include_str!("../../assets/prompts/plan_generator.txt");

/// Closing sentence the annotator template asks the model to add.
pub const ANNOTATION_SIGN_OFF: &str = "Please using corresponding clean functions and write code to clean the column";

pub const ANNOTATIONS_HEADER: &str = "Column annotations:";
pub const REQUIREMENTS_HEADER: &str = "User requirements:";
pub const FORMATS_HEADER: &str = "Required target formats:";
pub const ERRORS_HEADER: &str = "Errors from earlier attempts:";
pub const SKIPPED_HEADER: &str = "Columns left unchanged (unknown type):";
pub const SECTION_HEADERS: [&str; 5] =
    [ANNOTATIONS_HEADER, SKIPPED_HEADER, FORMATS_HEADER, ERRORS_HEADER, REQUIREMENTS_HEADER];

/// First line of the plan generator template, which opens its system message.
pub fn plan_generator_role() -> &'static str {
    PLAN_GENERATOR_TEMPLATE.lines().next().unwrap_or_default()
}

pub fn default_format(kind: ColumnType) -> &'static str {
    match kind {
        ColumnType::Date => DEFAULT_DATE_FORMAT,
        ColumnType::Address => {
            "Apt apartment_number, house_number, street_name, city, state_abbreviation, country, zipcode (skip missing parts)"
        }
        ColumnType::PhoneNumber => "E.164, e.g. +14155552671",
        ColumnType::Location => "(lat,lon)",
        ColumnType::Ip => "plain IP without subnet mask",
        ColumnType::Url => "JSON object with keys scheme, host, url_clean, queries",
        ColumnType::Duration => "hh:mm:ss",
        ColumnType::Temperature => "Celsius, e.g. 23℃",
        ColumnType::Color => "hexadecimal, e.g. #a1b2c3",
        ColumnType::Name => "firstname lastname",
        ColumnType::Unknown => "left unchanged",
    }
}

pub fn chat_manager_instruction(path: &str, candidates: &CandidateTypes) -> String {
    CHAT_MANAGER_TEMPLATE
        .replace("{path}", path)
        .replace("{candidate_column_types}", &candidates.joined())
}

pub fn plan_system_prompt() -> String {
    let functions = ColumnType::SUPPORTED
        .iter()
        .filter_map(|t| t.clean_function())
        .collect::<Vec<_>>()
        .join(", ");
    let formats = ColumnType::SUPPORTED
        .iter()
        .map(|t| format!("- {}: {}", t.label(), default_format(*t)))
        .collect::<Vec<_>>()
        .join("\n");
    PLAN_GENERATOR_TEMPLATE
        .replace("{clean_functions}", &functions)
        .replace("{default_formats}", &formats)
}

fn push_section(out: &mut String, header: &str, body: &str) {
    if !out.is_empty() {
        out.push('\n');
    }
    out.push_str(header);
    out.push('\n');
    out.push_str(body.trim_end());
    out.push('\n');
}

pub fn requirements_text(requirements: &[String]) -> String {
    if requirements.is_empty() {
        "(none)".to_owned()
    } else {
        requirements.join("\n")
    }
}

pub fn errors_text(errors: &[String]) -> Option<String> {
    (!errors.is_empty()).then(|| {
        errors
            .iter()
            .enumerate()
            .map(|(i, e)| format!("- attempt {}: {e}", i + 1))
            .collect::<Vec<_>>()
            .join("\n")
    })
}

/// The user turn sent to the plan generator.
pub fn plan_context(
    annotations: &AnnotationResult,
    requirements: &[String],
    overrides: &IndexMap<String, Override>,
    errors: &[String],
) -> String {
    let mut out = String::new();
    push_section(&mut out, ANNOTATIONS_HEADER, &annotations.render());
    let unknown: Vec<&str> = annotations
        .assignments
        .iter()
        .filter(|(_, t)| **t == ColumnType::Unknown)
        .map(|(c, _)| c.as_str())
        .collect();
    if !unknown.is_empty() {
        push_section(&mut out, SKIPPED_HEADER, &unknown.join(", "));
    }
    let formats: Vec<String> = overrides
        .iter()
        .filter_map(|(c, o)| o.target_format.as_ref().map(|f| format!("- {c}: {}", f.as_str())))
        .collect();
    if !formats.is_empty() {
        push_section(&mut out, FORMATS_HEADER, &formats.join("\n"));
    }
    if let Some(e) = errors_text(errors) {
        push_section(&mut out, ERRORS_HEADER, &e);
    }
    // last, so free text cannot swallow the other sections
    push_section(&mut out, REQUIREMENTS_HEADER, &requirements_text(requirements));
    out
}

/// The user turn sent to the annotator alongside its filled template.
pub fn annotator_context(instruction: &str, requirements: &[String], errors: &[String]) -> String {
    let mut out = instruction.trim_end().to_owned();
    out.push('\n');
    if let Some(e) = errors_text(errors) {
        push_section(&mut out, ERRORS_HEADER, &e);
    }
    push_section(&mut out, REQUIREMENTS_HEADER, &requirements_text(requirements));
    out
}
