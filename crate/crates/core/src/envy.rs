//! Feature Envy: methods that touch more fields of another project class
//! than of their own.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::model::{ClassInfo, FieldInfo, MethodInfo, ParamInfo, ProjectModel};
use crate::report::{render_table, to_json};
use crate::syntax::shallow::{self, Chain, CodeView, HeadKind, LocalDecl};

/// How accesses are tallied when comparing classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Counting {
    /// Each field name counts once per class.
    #[default]
    Distinct,
    /// Every access counts.
    Occurrences,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct MethodRef {
    pub path: PathBuf,
    pub line: usize,
    pub class: String,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessProfile {
    pub method: MethodRef,
    pub own_fields: BTreeSet<String>,
    /// Target class FQN to accessed field names; never contains the owner.
    pub foreign: BTreeMap<String, BTreeSet<String>>,
    pub own_occurrences: usize,
    pub foreign_occurrences: BTreeMap<String, usize>,
}

impl AccessProfile {
    pub fn own_count(&self, counting: Counting) -> usize {
        match counting {
            Counting::Distinct => self.own_fields.len(),
            Counting::Occurrences => self.own_occurrences,
        }
    }

    pub fn foreign_counts(&self, counting: Counting) -> BTreeMap<&str, usize> {
        match counting {
            Counting::Distinct => self
                .foreign
                .iter()
                .map(|(k, v)| (k.as_str(), v.len()))
                .collect(),
            Counting::Occurrences => self
                .foreign_occurrences
                .iter()
                .map(|(k, v)| (k.as_str(), *v))
                .collect(),
        }
    }
}

/// How an envious method reaches its target class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Anchor {
    Parameter { name: String, index: usize },
    Field { name: String },
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Anchor::Parameter { name, .. } => write!(f, "parameter {name}"),
            Anchor::Field { name } => write!(f, "field {name}"),
        }
    }
}

impl Serialize for Anchor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnvyFinding {
    pub class: String,
    pub method: String,
    pub path: PathBuf,
    pub line: usize,
    pub target: String,
    pub own_count: usize,
    pub target_count: usize,
    pub anchor: Option<Anchor>,
}

/// What a chain head identifier refers to inside a method.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Binding<'a> {
    Param(&'a ParamInfo),
    Local(&'a LocalDecl),
    OwnField(&'a FieldInfo),
    This,
    Unbound,
}

/// Name-resolution context for one method body.
pub(crate) struct MethodScope<'a> {
    pub model: &'a ProjectModel,
    pub class: &'a ClassInfo,
    pub params: &'a [ParamInfo],
    pub view: CodeView,
}

impl<'a> MethodScope<'a> {
    pub fn new(model: &'a ProjectModel, class: &'a ClassInfo, method: &'a MethodInfo) -> Self {
        let view = shallow::analyze(model.body_tokens(class, method));
        Self {
            model,
            class,
            params: &method.params,
            view,
        }
    }

    pub fn bind(&self, chain: &Chain) -> Binding<'_> {
        match chain.head_kind {
            HeadKind::This => Binding::This,
            HeadKind::Super => Binding::Unbound,
            HeadKind::Ident => {
                if let Some(p) = self.params.iter().find(|p| p.name == chain.head) {
                    return Binding::Param(p);
                }
                if let Some(local) = self.view.local_before(&chain.head, chain.head_span.start) {
                    return Binding::Local(local);
                }
                match self.class.field(&chain.head) {
                    Some(f) => Binding::OwnField(f),
                    None => Binding::Unbound,
                }
            }
        }
    }

    pub fn resolve_in(&self, type_text: &str, context: &ClassInfo) -> Option<&'a ClassInfo> {
        self.model
            .resolve_type(type_text, context)
            .and_then(|fqn| self.model.class(&fqn))
    }

    /// Walk a chain left to right, reporting each field access as
    /// `(declaring class, field)`. Stops at calls and unresolvable steps.
    pub fn walk(&self, chain: &Chain, mut record: impl FnMut(&'a ClassInfo, &'a FieldInfo)) {
        if chain.is_type || chain.head_call.is_some() {
            return;
        }
        let mut current: Option<&'a ClassInfo> = match self.bind(chain) {
            Binding::This => Some(self.class),
            Binding::Param(p) => self.resolve_in(&p.type_text, self.class),
            Binding::Local(l) => self.resolve_in(&l.type_text, self.class),
            Binding::OwnField(_) => {
                // re-borrow with the scope lifetime
                let f = self.class.field(&chain.head).expect("bound field exists");
                record(self.class, f);
                self.resolve_in(&f.declared_type_text, self.class)
            }
            Binding::Unbound => return,
        };
        for step in &chain.steps {
            let Some(class) = current else { return };
            if step.call.is_some() {
                return;
            }
            let Some(field) = class.field(&step.name) else {
                return;
            };
            record(class, field);
            current = self.resolve_in(&field.declared_type_text, class);
        }
    }
}

fn method_ref(model: &ProjectModel, class: &ClassInfo, method: &MethodInfo) -> MethodRef {
    MethodRef {
        path: class.path.clone(),
        line: model.tree_of(class).line_of(method.header_start),
        class: class.fqn.clone(),
        method: method.name.clone(),
    }
}

/// Count the fields a method body touches, per declaring class.
pub fn access_profile(
    class: &ClassInfo,
    method: &MethodInfo,
    model: &ProjectModel,
) -> AccessProfile {
    let scope = MethodScope::new(model, class, method);
    let mut profile = AccessProfile {
        method: method_ref(model, class, method),
        own_fields: BTreeSet::new(),
        foreign: BTreeMap::new(),
        own_occurrences: 0,
        foreign_occurrences: BTreeMap::new(),
    };
    for chain in &scope.view.chains {
        scope.walk(chain, |owner, field| {
            if owner.fqn == class.fqn {
                profile.own_fields.insert(field.name.clone());
                profile.own_occurrences += 1;
            } else {
                profile
                    .foreign
                    .entry(owner.fqn.clone())
                    .or_default()
                    .insert(field.name.clone());
                *profile
                    .foreign_occurrences
                    .entry(owner.fqn.clone())
                    .or_default() += 1;
            }
        });
    }
    profile
}

/// Unique parameter of type `target`, else unique accessed own field of
/// that type.
pub(crate) fn find_anchors(
    model: &ProjectModel,
    class: &ClassInfo,
    method: &MethodInfo,
    target: &str,
    accessed_own: &BTreeSet<String>,
) -> Vec<Anchor> {
    let params: Vec<Anchor> = method
        .params
        .iter()
        .enumerate()
        .filter(|(_, p)| model.resolve_type(&p.type_text, class).as_deref() == Some(target))
        .map(|(index, p)| Anchor::Parameter {
            name: p.name.clone(),
            index,
        })
        .collect();
    if !params.is_empty() {
        return params;
    }
    class
        .fields
        .iter()
        .filter(|f| accessed_own.contains(&f.name))
        .filter(|f| model.resolve_type(&f.declared_type_text, class).as_deref() == Some(target))
        .map(|f| Anchor::Field {
            name: f.name.clone(),
        })
        .collect()
}

pub(crate) fn is_candidate(method: &MethodInfo) -> bool {
    !method.is_constructor && !method.is_static && !method.is_abstract
}

/// Evaluate a profile: the unique class with the most accesses, if it beats
/// the owner.
pub fn judge(profile: &AccessProfile, counting: Counting) -> Option<(String, usize, usize)> {
    let own = profile.own_count(counting);
    let counts = profile.foreign_counts(counting);
    let max = counts.values().copied().max()?;
    let mut leaders = counts.iter().filter(|(_, &c)| c == max);
    let (target, _) = leaders.next()?;
    if leaders.next().is_some() || max <= own {
        return None;
    }
    Some((target.to_string(), own, max))
}

pub fn detect_feature_envy(model: &ProjectModel, counting: Counting) -> Vec<EnvyFinding> {
    let work: Vec<(&ClassInfo, &MethodInfo)> = model
        .classes
        .values()
        .flat_map(|c| c.methods.iter().map(move |m| (c, m)))
        .filter(|(_, m)| is_candidate(m))
        .collect();
    let mut findings: Vec<EnvyFinding> = work
        .par_iter()
        .filter_map(|&(class, method)| {
            let profile = access_profile(class, method, model);
            let (target, own_count, target_count) = judge(&profile, counting)?;
            let anchors = find_anchors(model, class, method, &target, &profile.own_fields);
            let anchor = match anchors.as_slice() {
                [only] => Some(only.clone()),
                _ => None,
            };
            Some(EnvyFinding {
                class: class.fqn.clone(),
                method: method.name.clone(),
                path: profile.method.path,
                line: profile.method.line,
                target,
                own_count,
                target_count,
                anchor,
            })
        })
        .collect();
    findings.sort_by(|a, b| {
        (&a.path, a.line, &a.class, &a.method).cmp(&(&b.path, b.line, &b.class, &b.method))
    });
    findings
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
}

pub fn findings_report(findings: &[EnvyFinding], format: Format) -> String {
    match format {
        Format::Json => to_json(findings),
        Format::Table => {
            let rows: Vec<Vec<String>> = findings
                .iter()
                .map(|f| {
                    vec![
                        f.class.clone(),
                        f.method.clone(),
                        f.line.to_string(),
                        f.target.clone(),
                        f.own_count.to_string(),
                        f.target_count.to_string(),
                        f.anchor.as_ref().map_or("-".to_string(), Anchor::to_string),
                    ]
                })
                .collect();
            let mut table = render_table(
                &[
                    "CLASS", "METHOD", "LINE", "TARGET", "OWN", "FOREIGN", "ANCHOR",
                ],
                &rows,
                &[2, 4, 5],
            );
            table.pop();
            table
        }
    }
}
