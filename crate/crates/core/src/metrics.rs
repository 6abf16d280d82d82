//! Per-class size metrics.

use std::path::PathBuf;

use serde::Serialize;

use crate::model::{ClassInfo, ProjectModel};
use crate::report::{render_table, to_json};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricsRecord {
    pub class: String,
    pub path: PathBuf,
    pub fields: usize,
    /// Constructors are not counted.
    pub methods: usize,
    /// Physical lines from the `class` keyword to the closing brace.
    pub loc: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
}

pub fn class_metrics(class: &ClassInfo, model: &ProjectModel) -> MetricsRecord {
    let tree = model.tree_of(class);
    let first = tree.line_of(class.keyword_span.start);
    let last = tree.line_of(
        class
            .body_span
            .end
            .saturating_sub(1)
            .max(class.keyword_span.start),
    );
    MetricsRecord {
        class: class.fqn.clone(),
        path: class.path.clone(),
        fields: class.fields.len(),
        methods: class.methods.iter().filter(|m| !m.is_constructor).count(),
        loc: last - first + 1,
    }
}

/// Metrics for every class, sorted by FQN.
pub fn project_metrics(model: &ProjectModel) -> Vec<MetricsRecord> {
    model
        .classes
        .values()
        .map(|c| class_metrics(c, model))
        .collect()
}

pub fn metrics_report(records: &[MetricsRecord], format: Format) -> String {
    let mut sorted: Vec<&MetricsRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.class.cmp(&b.class));
    match format {
        Format::Json => to_json(&sorted),
        Format::Table => {
            let rows: Vec<Vec<String>> = sorted
                .iter()
                .map(|r| {
                    vec![
                        r.class.clone(),
                        r.fields.to_string(),
                        r.methods.to_string(),
                        r.loc.to_string(),
                    ]
                })
                .collect();
            let mut table = render_table(&["CLASS", "FIELDS", "METHODS", "LOC"], &rows, &[1, 2, 3]);
            table.pop();
            table
        }
    }
}
