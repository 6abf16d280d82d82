//! Move Method: relocate an envious method to the class it envies, guarded
//! by preconditions and compiled to plain text edits.

mod plan;
mod preconditions;
mod sites;

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::envy::{access_profile, is_candidate, judge, Anchor, Counting};
use crate::model::{ClassInfo, MethodInfo, ProjectModel};
use crate::syntax::{apply_edits, parse_file, EditError, Span, TextEdit};

pub use preconditions::{check_preconditions, PreconditionViolation, ViolationCode};

#[derive(Debug, thiserror::Error)]
pub enum MoveError {
    #[error("class {0} is not in the project")]
    UnknownClass(String),
    #[error("{class} has no method named `{method}`")]
    UnknownMethod { class: String, method: String },
    #[error("{class} declares several methods named `{method}`; overloads are not supported")]
    Overloaded { class: String, method: String },
    #[error("{class}.{method} shows no Feature Envy; name a target class explicitly")]
    NoTarget { class: String, method: String },
    #[error("{} precondition violation(s)", .0.len())]
    Preconditions(Vec<PreconditionViolation>),
    #[error("{}:{line}: cannot plan the move: {message}", path.display())]
    Planning {
        path: PathBuf,
        line: usize,
        span: Span,
        message: String,
    },
    #[error("sources changed since planning: {}", display_paths(.0))]
    StaleSources(Vec<PathBuf>),
    #[error(transparent)]
    Edit(#[from] EditError),
    #[error("{}: the rewritten file no longer parses cleanly", .0.display())]
    Reparse(PathBuf),
    #[error("cannot read {}: {cause}", path.display())]
    Io { path: PathBuf, cause: io::Error },
}

fn display_paths(paths: &[PathBuf]) -> String {
    paths
        .iter()
        .map(|p| p.display().to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone)]
pub struct RefactoringPlan {
    pub method: String,
    pub source_class: String,
    pub target_class: String,
    pub anchor: Anchor,
    pub needs_back_reference: bool,
    pub self_param_name: String,
    /// Per file, relative to the project root.
    pub edits: BTreeMap<PathBuf, Vec<TextEdit>>,
    pub call_site_count: usize,
    hashes: BTreeMap<PathBuf, String>,
    parse_note_counts: BTreeMap<PathBuf, usize>,
}

impl fmt::Display for RefactoringPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "move {}.{} to {} via {}",
            self.source_class, self.method, self.target_class, self.anchor
        )?;
        if self.needs_back_reference {
            write!(f, " (adds parameter {})", self.self_param_name)?;
        }
        write!(f, "; {} call site(s)", self.call_site_count)
    }
}

pub(crate) fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Look up the method to move; overloaded names are refused.
pub fn select<'m>(
    model: &'m ProjectModel,
    class: &str,
    method: &str,
) -> Result<(&'m ClassInfo, &'m MethodInfo), MoveError> {
    let c = model
        .class(class)
        .ok_or_else(|| MoveError::UnknownClass(class.to_string()))?;
    let mut named = c.methods.iter().filter(|m| m.name == method);
    let m = named.next().ok_or_else(|| MoveError::UnknownMethod {
        class: class.to_string(),
        method: method.to_string(),
    })?;
    if named.next().is_some() {
        return Err(MoveError::Overloaded {
            class: class.to_string(),
            method: method.to_string(),
        });
    }
    Ok((c, m))
}

/// The class the method envies, when detection names one.
pub fn envied_target(
    model: &ProjectModel,
    class: &ClassInfo,
    method: &MethodInfo,
) -> Result<String, MoveError> {
    let no_target = || MoveError::NoTarget {
        class: class.fqn.clone(),
        method: method.name.clone(),
    };
    if !is_candidate(method) {
        return Err(no_target());
    }
    let profile = access_profile(class, method, model);
    judge(&profile, Counting::Distinct)
        .map(|(target, _, _)| target)
        .ok_or_else(no_target)
}

pub fn plan_move(
    model: &ProjectModel,
    class: &ClassInfo,
    method: &MethodInfo,
    target: &str,
) -> Result<RefactoringPlan, MoveError> {
    let (analysis, violations) = preconditions::analyze(model, class, method, target);
    if !violations.is_empty() {
        return Err(MoveError::Preconditions(violations));
    }
    plan::compile(model, &analysis)
}

/// Apply a plan to the files on disk under the model's root.
pub fn execute(
    plan: &RefactoringPlan,
    model: &ProjectModel,
) -> Result<BTreeMap<PathBuf, String>, MoveError> {
    let root = model.root.clone();
    execute_with(plan, |rel| std::fs::read_to_string(root.join(rel)))
}

/// Apply a plan to sources obtained from `read` (called with relative
/// paths). Only touched files appear in the result.
pub fn execute_with(
    plan: &RefactoringPlan,
    mut read: impl FnMut(&Path) -> io::Result<String>,
) -> Result<BTreeMap<PathBuf, String>, MoveError> {
    let mut current = BTreeMap::new();
    let mut stale = Vec::new();
    for path in plan.edits.keys() {
        let text = read(path).map_err(|cause| MoveError::Io {
            path: path.clone(),
            cause,
        })?;
        if plan.hashes.get(path) != Some(&sha256_hex(&text)) {
            stale.push(path.clone());
        }
        current.insert(path.clone(), text);
    }
    if !stale.is_empty() {
        return Err(MoveError::StaleSources(stale));
    }
    let mut out = BTreeMap::new();
    for (path, edits) in &plan.edits {
        let text = apply_edits(&current[path], edits)?;
        let notes = parse_file(&text, path.clone()).parse_notes.len();
        if notes > plan.parse_note_counts.get(path).copied().unwrap_or(0) {
            return Err(MoveError::Reparse(path.clone()));
        }
        out.insert(path.clone(), text);
    }
    Ok(out)
}

/// Unified diff of the plan against the model's sources.
pub fn preview(plan: &RefactoringPlan, model: &ProjectModel) -> Result<String, MoveError> {
    let outputs = execute_with(plan, |rel| {
        model
            .tree(rel)
            .map(|t| t.source.clone())
            .ok_or_else(|| io::Error::new(io::ErrorKind::NotFound, "file not in model"))
    })?;
    let mut diff = String::new();
    for (path, new_text) in &outputs {
        let old = &model.tree(path).expect("planned file").source;
        let name = path
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        let text = similar::TextDiff::from_lines(old.as_str(), new_text.as_str());
        diff.push_str(
            &text
                .unified_diff()
                .header(&format!("a/{name}"), &format!("b/{name}"))
                .to_string(),
        );
    }
    Ok(diff)
}
