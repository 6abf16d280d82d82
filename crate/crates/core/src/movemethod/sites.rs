//! Finding the project call sites of a method.

use std::path::PathBuf;

use crate::envy::{Binding, MethodScope};
use crate::model::{ClassInfo, MethodInfo, ProjectModel};
use crate::syntax::shallow::{CallArgs, Chain, HeadKind};
use crate::syntax::{Span, Token};

/// Static type of a receiver expression as far as the shallow view can tell.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Recv<'m> {
    Known(&'m ClassInfo),
    /// A declared type outside the project.
    NonProject,
    /// A type name used for static access.
    TypeName,
    Unknown,
}

#[derive(Debug, Clone)]
pub(crate) enum SiteKind {
    Receiver { receiver: Span },
    Bare,
}

#[derive(Debug, Clone)]
pub(crate) struct CallSite {
    pub path: PathBuf,
    /// FQN of the class whose method contains the call.
    pub enclosing: String,
    pub name_span: Span,
    pub call: CallArgs,
    pub kind: SiteKind,
}

impl CallSite {
    pub fn span(&self) -> Span {
        let start = match &self.kind {
            SiteKind::Receiver { receiver } => receiver.start,
            SiteKind::Bare => self.name_span.start,
        };
        Span::new(start, self.call.close.end)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Unresolved {
    pub path: PathBuf,
    pub span: Span,
    pub reason: String,
}

#[derive(Debug, Default)]
pub(crate) struct SiteScan {
    pub sites: Vec<CallSite>,
    pub unresolved: Vec<Unresolved>,
}

pub(crate) fn is_subclass_of(model: &ProjectModel, class: &ClassInfo, ancestor: &str) -> bool {
    let mut current = class;
    for _ in 0..64 {
        let Some(parent) = current
            .extends
            .as_deref()
            .and_then(|e| model.resolve_type(e, current))
            .and_then(|fqn| model.class(&fqn))
        else {
            return false;
        };
        if parent.fqn == ancestor {
            return true;
        }
        current = parent;
    }
    false
}

pub(crate) fn is_nested_in(model: &ProjectModel, class: &ClassInfo, outer: &str) -> bool {
    let mut current = class.outer.as_deref();
    while let Some(fqn) = current {
        if fqn == outer {
            return true;
        }
        current = model.class(fqn).and_then(|c| c.outer.as_deref());
    }
    false
}

/// Type of `chain` up to (not including) step `upto`.
pub(crate) fn receiver_type<'m>(scope: &MethodScope<'m>, chain: &Chain, upto: usize) -> Recv<'m> {
    if chain.head_call.is_some() {
        return Recv::Unknown;
    }
    let from_decl = |type_text: &str| -> Recv<'m> {
        if type_text.is_empty() || type_text == "var" {
            return Recv::Unknown;
        }
        match scope.resolve_in(type_text, scope.class) {
            Some(c) => Recv::Known(c),
            None => Recv::NonProject,
        }
    };
    let mut current = match scope.bind(chain) {
        Binding::This => Recv::Known(scope.class),
        Binding::Param(p) => from_decl(&p.type_text),
        Binding::Local(l) => from_decl(&l.type_text),
        Binding::OwnField(f) => match scope.resolve_in(&f.declared_type_text, scope.class) {
            Some(c) => Recv::Known(c),
            None => Recv::NonProject,
        },
        Binding::Unbound if chain.head_kind == HeadKind::Ident => {
            if chain.head.starts_with(|c: char| c.is_uppercase()) {
                Recv::TypeName
            } else {
                Recv::Unknown
            }
        }
        Binding::Unbound => Recv::Unknown,
    };
    for step in &chain.steps[..upto] {
        current = match current {
            Recv::Known(class) => {
                if step.call.is_some() {
                    Recv::Unknown
                } else {
                    match class.field(&step.name) {
                        Some(f) => match scope.resolve_in(&f.declared_type_text, class) {
                            Some(c) => Recv::Known(c),
                            None => Recv::NonProject,
                        },
                        None => Recv::Unknown,
                    }
                }
            }
            other => other,
        };
    }
    current
}

fn next_is_open_paren(tokens: &[&Token], i: usize) -> bool {
    tokens[i + 1..]
        .iter()
        .find(|t| !t.is_trivia())
        .is_some_and(|t| t.is_punct("("))
}

/// Classify every call of `method` (declared in `class`) across the project.
pub(crate) fn scan_call_sites(
    model: &ProjectModel,
    class: &ClassInfo,
    method: &MethodInfo,
) -> SiteScan {
    let name = method.name.as_str();
    let arity = method.params.len();
    let mut scan = SiteScan::default();
    let mut accounted: Vec<(PathBuf, Span)> = Vec::new();

    for x in model.classes.values() {
        for mm in &x.methods {
            if mm.body.is_none() || (x.fqn == class.fqn && mm.decl_span == method.decl_span) {
                continue;
            }
            let scope = MethodScope::new(model, x, mm);
            for chain in &scope.view.chains {
                let mut unresolved = |span: Span, reason: String| {
                    scan.unresolved.push(Unresolved {
                        path: x.path.clone(),
                        span,
                        reason,
                    })
                };
                if chain.head == name && chain.head_kind == HeadKind::Ident {
                    if let Some(call) = &chain.head_call {
                        accounted.push((x.path.clone(), chain.head_span));
                        if chain.is_type {
                            // constructor call
                        } else if x.fqn == class.fqn {
                            if call.args.len() == arity {
                                scan.sites.push(CallSite {
                                    path: x.path.clone(),
                                    enclosing: x.fqn.clone(),
                                    name_span: chain.head_span,
                                    call: call.clone(),
                                    kind: SiteKind::Bare,
                                });
                            } else {
                                unresolved(
                                    chain.head_span,
                                    format!("call to `{name}` with {} arguments", call.args.len()),
                                );
                            }
                        } else if x.method(name).is_none()
                            && (is_nested_in(model, x, &class.fqn)
                                || is_subclass_of(model, x, &class.fqn))
                        {
                            unresolved(
                                chain.head_span,
                                format!("unqualified call to `{name}` from {}", x.fqn),
                            );
                        }
                    }
                }
                for (i, step) in chain.steps.iter().enumerate() {
                    let Some(call) = &step.call else { continue };
                    if step.name != name {
                        continue;
                    }
                    accounted.push((x.path.clone(), step.name_span));
                    match receiver_type(&scope, chain, i) {
                        Recv::Known(c) if c.fqn == class.fqn => {
                            if call.args.len() == arity {
                                scan.sites.push(CallSite {
                                    path: x.path.clone(),
                                    enclosing: x.fqn.clone(),
                                    name_span: step.name_span,
                                    call: call.clone(),
                                    kind: SiteKind::Receiver {
                                        receiver: chain.receiver_span(i),
                                    },
                                });
                            } else {
                                unresolved(
                                    step.name_span,
                                    format!("call to `{name}` with {} arguments", call.args.len()),
                                );
                            }
                        }
                        Recv::Known(c) if is_subclass_of(model, c, &class.fqn) => {
                            unresolved(
                                step.name_span,
                                format!("call to `{name}` through subclass {}", c.fqn),
                            );
                        }
                        Recv::Known(_) | Recv::NonProject | Recv::TypeName => {}
                        Recv::Unknown => {
                            unresolved(
                                step.name_span,
                                format!("receiver of `{name}` has unknown type"),
                            );
                        }
                    }
                }
                if let Some((ref_name, span)) = &chain.method_ref {
                    if ref_name == name {
                        accounted.push((x.path.clone(), *span));
                        match receiver_type(&scope, chain, chain.steps.len()) {
                            Recv::Known(c)
                                if c.fqn != class.fqn && !is_subclass_of(model, c, &class.fqn) => {}
                            Recv::NonProject | Recv::TypeName => {}
                            _ => unresolved(*span, format!("method reference to `{name}`")),
                        }
                    }
                }
            }
        }
    }

    // Any remaining `name(` token sits where the analysis does not look.
    let declared: Vec<(PathBuf, Span)> = model
        .classes
        .values()
        .flat_map(|c| c.methods.iter().map(move |m| (c.path.clone(), m.name_span)))
        .collect();
    for (path, tree) in &model.files {
        let tokens = tree.root.tokens();
        for (i, t) in tokens.iter().enumerate() {
            if !(t.is_ident() && t.text == name && next_is_open_paren(&tokens, i)) {
                continue;
            }
            if path == &class.path && method.decl_span.contains(t.span) {
                continue;
            }
            let key = (path.clone(), t.span);
            if accounted.contains(&key) || declared.contains(&key) {
                continue;
            }
            scan.unresolved.push(Unresolved {
                path: path.clone(),
                span: t.span,
                reason: format!("call to `{name}` outside any analyzed method body"),
            });
        }
    }
    scan.sites
        .sort_by(|a, b| (&a.path, a.name_span).cmp(&(&b.path, b.name_span)));
    scan
}
