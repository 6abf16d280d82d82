//! Headless Javadoc mining: one record per documented method.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::model::{ClassInfo, MethodInfo, ProjectModel};
use crate::report::to_json;

#[derive(Debug, thiserror::Error)]
#[error("cannot write {path}: {cause}")]
pub struct IoError {
    pub path: PathBuf,
    pub cause: std::io::Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DocRecord {
    pub path: String,
    pub class: String,
    pub method: String,
    pub signature: String,
    pub javadoc: String,
    pub line: usize,
}

/// Strip the comment delimiters and the conventional `*` gutter.
pub fn normalize_javadoc(raw: &str) -> String {
    let inner = raw.strip_prefix("/**").unwrap_or(raw);
    let inner = inner.strip_suffix("*/").unwrap_or(inner);
    let lines: Vec<&str> = inner
        .split('\n')
        .map(|line| {
            let line = line.trim_start();
            let line = line.strip_prefix('*').unwrap_or(line);
            let line = line.strip_prefix(' ').unwrap_or(line);
            line.trim_end()
        })
        .collect();
    let first = lines.iter().position(|l| !l.is_empty());
    let last = lines.iter().rposition(|l| !l.is_empty());
    match (first, last) {
        (Some(a), Some(b)) => lines[a..=b].join("\n"),
        _ => String::new(),
    }
}

/// `name(type,...)` with every whitespace character removed.
pub fn signature(method: &MethodInfo) -> String {
    let params: Vec<&str> = method.params.iter().map(|p| p.type_text.as_str()).collect();
    let mut sig = format!("{}({})", method.name, params.join(","));
    sig.retain(|c| !c.is_whitespace());
    sig
}

fn slash_path(path: &Path) -> String {
    path.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

fn class_records(model: &ProjectModel, class: &ClassInfo) -> Vec<DocRecord> {
    let tree = model.tree_of(class);
    class
        .methods
        .iter()
        .filter_map(|m| {
            let doc = m.javadoc.as_ref()?;
            let javadoc = normalize_javadoc(&doc.raw);
            if javadoc.is_empty() {
                return None;
            }
            Some(DocRecord {
                path: slash_path(&class.path),
                class: class.fqn.clone(),
                method: m.name.clone(),
                signature: signature(m),
                javadoc,
                line: tree.line_of(m.header_start),
            })
        })
        .collect()
}

/// Records for every method with a non-empty Javadoc, sorted by (path, line).
pub fn extract_docs(model: &ProjectModel) -> Vec<DocRecord> {
    let classes: Vec<&ClassInfo> = model.classes.values().collect();
    let mut records: Vec<DocRecord> = classes
        .par_iter()
        .flat_map_iter(|c| class_records(model, c))
        .collect();
    records.sort_by(|a, b| {
        (&a.path, a.line, &a.class, &a.signature).cmp(&(&b.path, b.line, &b.class, &b.signature))
    });
    records
}

#[derive(Serialize)]
struct DocsFile<'a> {
    project: &'a str,
    records: &'a [DocRecord],
}

/// The exact bytes [`write_docs_json`] writes.
pub fn docs_json(records: &[DocRecord], project_root: &str) -> String {
    let mut out = to_json(&DocsFile {
        project: project_root,
        records,
    });
    out.push('\n');
    out
}

pub fn write_docs_json(
    records: &[DocRecord],
    project_root: &str,
    out_path: impl AsRef<Path>,
) -> Result<(), IoError> {
    let out_path = out_path.as_ref();
    fs::write(out_path, docs_json(records, project_root)).map_err(|cause| IoError {
        path: out_path.to_path_buf(),
        cause,
    })
}
