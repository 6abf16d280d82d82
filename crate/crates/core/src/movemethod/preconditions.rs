use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

use crate::envy::{access_profile, find_anchors, Anchor, Binding, MethodScope};
use crate::model::{ClassInfo, MethodInfo, ProjectModel, Visibility};
use crate::syntax::shallow::HeadKind;
use crate::syntax::Span;

use super::sites::{scan_call_sites, SiteScan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationCode {
    TargetNotInProject,
    NotInstanceMethod,
    NoBody,
    AmbiguousAnchor,
    NoAnchor,
    NameClashInTarget,
    UsesSuper,
    CallsOwnInstanceMethod,
    ReferencesPrivateOwnField,
    AnchorFieldPrivate,
    UnresolvableCallSite,
}

impl ViolationCode {
    pub const ALL: [ViolationCode; 11] = [
        ViolationCode::TargetNotInProject,
        ViolationCode::NotInstanceMethod,
        ViolationCode::NoBody,
        ViolationCode::AmbiguousAnchor,
        ViolationCode::NoAnchor,
        ViolationCode::NameClashInTarget,
        ViolationCode::UsesSuper,
        ViolationCode::CallsOwnInstanceMethod,
        ViolationCode::ReferencesPrivateOwnField,
        ViolationCode::AnchorFieldPrivate,
        ViolationCode::UnresolvableCallSite,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::TargetNotInProject => "TargetNotInProject",
            ViolationCode::NotInstanceMethod => "NotInstanceMethod",
            ViolationCode::NoBody => "NoBody",
            ViolationCode::AmbiguousAnchor => "AmbiguousAnchor",
            ViolationCode::NoAnchor => "NoAnchor",
            ViolationCode::NameClashInTarget => "NameClashInTarget",
            ViolationCode::UsesSuper => "UsesSuper",
            ViolationCode::CallsOwnInstanceMethod => "CallsOwnInstanceMethod",
            ViolationCode::ReferencesPrivateOwnField => "ReferencesPrivateOwnField",
            ViolationCode::AnchorFieldPrivate => "AnchorFieldPrivate",
            ViolationCode::UnresolvableCallSite => "UnresolvableCallSite",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for ViolationCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreconditionViolation {
    pub code: ViolationCode,
    pub message: String,
    pub path: PathBuf,
    pub line: usize,
    pub span: Span,
}

impl fmt::Display for PreconditionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.path.display(),
            self.line,
            self.code,
            self.message
        )
    }
}

/// Everything the checks learn about a method; reused by planning.
pub(crate) struct Analysis<'m> {
    pub class: &'m ClassInfo,
    pub method: &'m MethodInfo,
    pub target: Option<&'m ClassInfo>,
    pub scope: MethodScope<'m>,
    pub own_fields: Vec<String>,
    pub anchor: Option<Anchor>,
    pub needs_back_reference: bool,
    pub sites: SiteScan,
}

impl Analysis<'_> {
    pub fn anchor_field(&self) -> Option<&str> {
        match &self.anchor {
            Some(Anchor::Field { name }) => Some(name),
            _ => None,
        }
    }

    pub fn post_move_arity(&self) -> usize {
        let mut n = self.method.params.len();
        if matches!(self.anchor, Some(Anchor::Parameter { .. })) {
            n -= 1;
        }
        if self.needs_back_reference {
            n += 1;
        }
        n
    }
}

/// Whether the body still needs the source instance once the anchor
/// becomes `this`.
fn needs_back_reference(scope: &MethodScope<'_>, anchor_field: Option<&str>) -> bool {
    scope.view.chains.iter().any(|chain| match chain.head_kind {
        HeadKind::This => {
            let via_anchor = anchor_field.is_some_and(|fd| {
                chain
                    .steps
                    .first()
                    .is_some_and(|s| s.name == fd && s.call.is_none())
            });
            !via_anchor
        }
        HeadKind::Ident if chain.head_call.is_none() && !chain.is_type => {
            matches!(scope.bind(chain), Binding::OwnField(f) if Some(f.name.as_str()) != anchor_field)
        }
        _ => false,
    })
}

pub(crate) fn analyze<'m>(
    model: &'m ProjectModel,
    class: &'m ClassInfo,
    method: &'m MethodInfo,
    target: &str,
) -> (Analysis<'m>, Vec<PreconditionViolation>) {
    let tree = model.tree_of(class);
    let mut out = Vec::new();
    let mut violation = |code: ViolationCode, span: Span, message: String| {
        out.push(PreconditionViolation {
            code,
            message,
            path: class.path.clone(),
            line: tree.line_of(span.start),
            span,
        })
    };
    let here = method.name_span;
    let has_body = method.body.is_some();

    // P1
    let target_class = model.class(target).filter(|d| d.fqn != class.fqn);
    if target_class.is_none() {
        let why = if target == class.fqn {
            "target is the declaring class"
        } else {
            "target is not a project class"
        };
        violation(
            ViolationCode::TargetNotInProject,
            here,
            format!("{target}: {why}"),
        );
    }

    // P2
    if method.is_static || method.is_constructor {
        let what = if method.is_static {
            "static method"
        } else {
            "constructor"
        };
        violation(
            ViolationCode::NotInstanceMethod,
            here,
            format!("`{}` is a {what}", method.name),
        );
    }
    if !has_body {
        violation(
            ViolationCode::NoBody,
            here,
            format!("`{}` has no body", method.name),
        );
    }

    let scope = MethodScope::new(model, class, method);
    let profile = access_profile(class, method, model);
    let own_fields: Vec<String> = profile.own_fields.iter().cloned().collect();

    // P3
    let mut anchor = None;
    if let Some(d) = target_class {
        let anchors = find_anchors(model, class, method, &d.fqn, &profile.own_fields);
        match anchors.len() {
            0 => violation(
                ViolationCode::NoAnchor,
                here,
                format!("no parameter or accessed field of type {}", d.fqn),
            ),
            1 => anchor = anchors.into_iter().next(),
            _ => {
                let names: Vec<String> = anchors.iter().map(Anchor::to_string).collect();
                violation(
                    ViolationCode::AmbiguousAnchor,
                    here,
                    format!("several ways to reach {}: {}", d.fqn, names.join(", ")),
                );
            }
        }
    }
    let anchor_field = match &anchor {
        Some(Anchor::Field { name }) => Some(name.clone()),
        _ => None,
    };
    let needs_back = has_body && needs_back_reference(&scope, anchor_field.as_deref());

    let sites = if method.is_constructor {
        SiteScan::default()
    } else {
        scan_call_sites(model, class, method)
    };

    let analysis = Analysis {
        class,
        method,
        target: target_class,
        scope,
        own_fields,
        anchor,
        needs_back_reference: needs_back,
        sites,
    };

    // P4
    if let (Some(d), Some(_)) = (target_class, &analysis.anchor) {
        let arity = analysis.post_move_arity();
        if d.methods_named(&method.name)
            .any(|m| m.params.len() == arity)
        {
            violation(
                ViolationCode::NameClashInTarget,
                here,
                format!(
                    "{} already has `{}` with {arity} parameter(s)",
                    d.fqn, method.name
                ),
            );
        }
    }

    // P5
    if has_body {
        for chain in &analysis.scope.view.chains {
            match chain.head_kind {
                HeadKind::Super => violation(
                    ViolationCode::UsesSuper,
                    chain.head_span,
                    "uses `super`".into(),
                ),
                HeadKind::This => {
                    if let Some(step) = chain.steps.first().filter(|s| s.call.is_some()) {
                        violation(
                            ViolationCode::CallsOwnInstanceMethod,
                            step.name_span,
                            format!("calls `this.{}`", step.name),
                        );
                    } else if let Some((name, span)) =
                        chain.method_ref.as_ref().filter(|_| chain.steps.is_empty())
                    {
                        violation(
                            ViolationCode::CallsOwnInstanceMethod,
                            *span,
                            format!("references `this::{name}`"),
                        );
                    }
                }
                HeadKind::Ident => {
                    if chain.head_call.is_some() && !chain.is_type {
                        violation(
                            ViolationCode::CallsOwnInstanceMethod,
                            chain.head_span,
                            format!("calls `{}` without a receiver", chain.head),
                        );
                    }
                }
            }
        }
        for name in &analysis.own_fields {
            if Some(name) == anchor_field.as_ref() {
                continue;
            }
            if let Some(f) = class
                .field(name)
                .filter(|f| f.visibility == Visibility::Private)
            {
                violation(
                    ViolationCode::ReferencesPrivateOwnField,
                    f.name_span,
                    format!("references private field `{}`", f.name),
                );
            }
        }
    }

    // P6
    if let Some(fd) = &anchor_field {
        let private = class
            .field(fd)
            .is_some_and(|f| f.visibility == Visibility::Private);
        if private {
            let outside: Vec<_> = analysis
                .sites
                .sites
                .iter()
                .filter(|s| {
                    model
                        .class(&s.enclosing)
                        .is_none_or(|e| e.top_level_fqn() != class.top_level_fqn())
                })
                .collect();
            if let Some(first) = outside.first() {
                violation(
                    ViolationCode::AnchorFieldPrivate,
                    here,
                    format!(
                        "anchor field `{fd}` is private but {} call site(s) lie outside {} (first in {})",
                        outside.len(),
                        class.fqn,
                        first.path.display()
                    ),
                );
            }
        }
    }

    // P7
    for u in &analysis.sites.unresolved {
        let line = model.tree(&u.path).map_or(0, |t| t.line_of(u.span.start));
        out.push(PreconditionViolation {
            code: ViolationCode::UnresolvableCallSite,
            message: u.reason.clone(),
            path: u.path.clone(),
            line,
            span: u.span,
        });
    }

    (analysis, out)
}

/// Evaluate every rule; an empty result means the move may be planned.
pub fn check_preconditions(
    model: &ProjectModel,
    class: &ClassInfo,
    method: &MethodInfo,
    target: &str,
) -> Vec<PreconditionViolation> {
    analyze(model, class, method, target).1
}
