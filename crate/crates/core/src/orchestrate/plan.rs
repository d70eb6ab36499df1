//! Declarative cleaning plans: parsing, checking and execution.

use std::collections::HashSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{Override, WorkflowError};
use crate::annotate::AnnotationResult;
use crate::parallel::Execution;
use crate::standardize::{clean_column_with, ColumnType, DateFormat, StandardizeOptions, TargetFormat};
use crate::table::Table;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanStep {
    pub function: String,
    pub column: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_format: Option<String>,
}

impl PlanStep {
    pub fn kind(&self) -> Option<ColumnType> {
        ColumnType::from_clean_function(&self.function)
    }
}

/// Ordered steps. On the wire this is a bare JSON array.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CleaningPlan {
    pub steps: Vec<PlanStep>,
}

impl CleaningPlan {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plans serialize")
    }
}

/// The JSON array inside a reply, with code fences and prose around it
/// ignored.
fn json_array(reply: &str) -> Option<&str> {
    let start = reply.find('[')?;
    let end = reply.rfind(']')?;
    (start < end).then(|| &reply[start..=end])
}

/// Parses and checks a plan against the table and its annotation.
///
/// Each step must name a known clean function and an existing column, at most
/// once per column, and agree with the column's annotated type. A target
/// format set by an override replaces whatever the reply says.
pub fn parse_plan(
    reply: &str,
    table: &Table,
    annotations: &AnnotationResult,
    overrides: &IndexMap<String, Override>,
) -> Result<CleaningPlan, WorkflowError> {
    let bad = |why: String| WorkflowError::MalformedPlan(why);
    let json = json_array(reply).ok_or_else(|| bad("reply holds no JSON array".into()))?;
    let mut plan: CleaningPlan = serde_json::from_str(json).map_err(|e| bad(format!("plan is not a valid step list: {e}")))?;

    let mut seen = HashSet::new();
    for step in &mut plan.steps {
        let kind = step
            .kind()
            .ok_or_else(|| bad(format!("unknown function {:?}", step.function)))?;
        if table.column_index(&step.column).is_none() {
            return Err(bad(format!("no column named {:?}", step.column)));
        }
        if !seen.insert(step.column.clone()) {
            return Err(bad(format!("column {:?} has more than one step", step.column)));
        }
        match annotations.get(&step.column) {
            Some(annotated) if annotated == kind => {}
            Some(ColumnType::Unknown) | None => {
                return Err(bad(format!("column {:?} has no known type and must be skipped", step.column)))
            }
            Some(annotated) => {
                return Err(bad(format!(
                    "column {:?} is annotated {annotated} but the step calls {}",
                    step.column, step.function
                )))
            }
        }
        if let Some(f) = overrides.get(&step.column).and_then(|o| o.target_format.as_ref()) {
            step.target_format = Some(f.as_str().to_owned());
        }
        if let (ColumnType::Date, Some(f)) = (kind, &step.target_format) {
            DateFormat::parse(f).map_err(|e| bad(e.to_string()))?;
        }
    }
    Ok(plan)
}

/// Applies the steps in order with `clean_column`.
pub fn execute_plan(
    plan: &CleaningPlan,
    table: &Table,
    options: &StandardizeOptions,
    execution: Execution,
) -> Result<Table, WorkflowError> {
    plan.steps.iter().try_fold(table.clone(), |t, step| {
        let kind = step
            .kind()
            .ok_or_else(|| WorkflowError::ExecutionError(format!("unknown function {:?}", step.function)))?;
        let format = step.target_format.clone().map(TargetFormat);
        clean_column_with(&t, &step.column, kind, format.as_ref(), options, execution)
            .map_err(|e| WorkflowError::ExecutionError(e.to_string()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::AnnotationSource;
    use crate::table::Cell;

    fn fixture() -> (Table, AnnotationResult) {
        let t = Table::from_strs(
            &["Admission Date", "Address", "Notes"],
            &[
                &[Some("Thu Sep 25 10:36:28 2003"), Some("456 Oak Avenue, Springfield, IL 62704"), Some("hi")],
                &[Some("2011-12-08 3:50:00 PM"), None, Some("there")],
            ],
        )
        .unwrap();
        let a = AnnotationResult {
            assignments: [
                ("Admission Date".to_string(), ColumnType::Date),
                ("Address".to_string(), ColumnType::Address),
                ("Notes".to_string(), ColumnType::Unknown),
            ]
            .into_iter()
            .collect(),
            source: AnnotationSource::Rules,
        };
        (t, a)
    }

    const TWO_STEPS: &str = r#"Sure! ```json
[{"function": "clean_date", "column": "Admission Date", "target_format": "MM/DD/YYYY HH:MM:SS"},
 {"function": "clean_address", "column": "Address"}]
```"#;

    #[test]
    fn parses_two_steps() {
        let (t, a) = fixture();
        let plan = parse_plan(TWO_STEPS, &t, &a, &IndexMap::new()).unwrap();
        assert_eq!(plan.steps.len(), 2);
        assert_eq!(plan.steps[0].target_format.as_deref(), Some("MM/DD/YYYY HH:MM:SS"));
        assert_eq!(plan.steps[1].target_format, None);
        let back: CleaningPlan = serde_json::from_str(&plan.to_json()).unwrap();
        assert_eq!(back, plan);
    }

    #[test]
    fn rejections() {
        let (t, a) = fixture();
        let none = IndexMap::new();
        let cases = [
            r#"[{"function": "clean_foo", "column": "Address"}]"#,
            r#"[{"function": "clean_address", "column": "Nope"}]"#,
            r#"[{"function": "clean_address", "column": "Address"}, {"function": "clean_address", "column": "Address"}]"#,
            r#"[{"function": "clean_name", "column": "Address"}]"#,
            r#"[{"function": "clean_name", "column": "Notes"}]"#,
            r#"[{"function": "clean_date", "column": "Admission Date", "target_format": "YY"}]"#,
            r#"[{"function": "clean_date", "column": "Admission Date", "extra": 1}]"#,
            "no plan here",
        ];
        for c in cases {
            assert!(matches!(parse_plan(c, &t, &a, &none), Err(WorkflowError::MalformedPlan(_))), "{c}");
        }
    }

    #[test]
    fn override_format_replaces() {
        let (t, a) = fixture();
        let mut o = IndexMap::new();
        o.insert("Admission Date".to_string(), "date:DD-MM-YYYY".parse::<Override>().unwrap());
        let plan = parse_plan(TWO_STEPS, &t, &a, &o).unwrap();
        assert_eq!(plan.steps[0].target_format.as_deref(), Some("DD-MM-YYYY"));
    }

    #[test]
    fn execution_folds_and_is_idempotent() {
        let (t, a) = fixture();
        let plan = parse_plan(TWO_STEPS, &t, &a, &IndexMap::new()).unwrap();
        let opts = StandardizeOptions::default();
        let once = execute_plan(&plan, &t, &opts, Execution::Sequential).unwrap();
        assert_eq!(once.cell(0, 0), &Cell::text("09/25/2003 10:36:28"));
        assert_eq!(once.cell(1, 0), &Cell::text("12/08/2011 15:50:00"));
        assert_eq!(once.cell(0, 1), &Cell::text("456, Oak Avenue, Springfield, IL, 62704"));
        assert!(once.cell(1, 1).is_missing());
        assert_eq!(once.cell(0, 2), t.cell(0, 2));
        assert_eq!(execute_plan(&plan, &once, &opts, Execution::Parallel).unwrap(), once);
        assert_eq!(execute_plan(&CleaningPlan::default(), &t, &opts, Execution::Sequential).unwrap(), t);
    }
}
