//! Compiling a checked move into text edits.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use crate::envy::{Anchor, Binding};
use crate::model::{ClassInfo, ProjectModel, Visibility};
use crate::syntax::shallow::{Chain, HeadKind};
use crate::syntax::{apply_edits, Span, TextEdit, Token, TokenKind};

use super::preconditions::Analysis;
use super::sites::{is_nested_in, is_subclass_of, CallSite, SiteKind};
use super::{sha256_hex, MoveError, RefactoringPlan};

const ASSIGN_OPS: &[&str] = &[
    "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", "++", "--",
];

struct Planner<'a, 'm> {
    model: &'m ProjectModel,
    a: &'a Analysis<'m>,
    target: &'m ClassInfo,
    self_name: String,
}

fn fail(
    model: &ProjectModel,
    class: &ClassInfo,
    span: Span,
    message: impl Into<String>,
) -> MoveError {
    let tree = model.tree_of(class);
    MoveError::Planning {
        path: class.path.clone(),
        line: tree.line_of(span.start),
        span,
        message: message.into(),
    }
}

fn line_start(src: &str, offset: usize) -> usize {
    src[..offset].rfind('\n').map_or(0, |i| i + 1)
}

fn line_end(src: &str, offset: usize) -> usize {
    src[offset..].find('\n').map_or(src.len(), |i| offset + i)
}

fn is_blank(s: &str) -> bool {
    s.chars()
        .all(|c| c == ' ' || c == '\t' || c == '\r' || c == '\x0C')
}

/// Indentation of the line holding `offset`.
fn indent_of(src: &str, offset: usize) -> &str {
    let start = line_start(src, offset);
    let line = &src[start..line_end(src, offset)];
    let len = line.len() - line.trim_start_matches([' ', '\t']).len();
    &line[..len]
}

/// Whether only indentation precedes `offset` on its line.
fn starts_line(src: &str, offset: usize) -> bool {
    is_blank(&src[line_start(src, offset)..offset])
}

fn newline_of(src: &str) -> &'static str {
    if src.contains("\r\n") {
        "\r\n"
    } else {
        "\n"
    }
}

impl<'m> Planner<'_, 'm> {
    fn fail(&self, span: Span, message: impl Into<String>) -> MoveError {
        fail(self.model, self.a.class, span, message)
    }

    fn source(&self) -> &'m str {
        &self.model.tree_of(self.a.class).source
    }

    fn method_tokens(&self) -> Vec<&'m Token> {
        self.model
            .tree_of(self.a.class)
            .tokens_in(self.a.method.decl_span)
    }

    fn sig_after(&self, offset: usize) -> Option<&'m Token> {
        self.method_tokens()
            .into_iter()
            .find(|t| t.span.start >= offset && !t.is_trivia())
    }

    fn sig_before(&self, offset: usize) -> Option<&'m Token> {
        self.method_tokens()
            .into_iter()
            .rev()
            .find(|t| t.span.end <= offset && !t.is_trivia())
    }

    fn is_assigned(&self, chain: &Chain) -> bool {
        let span = chain.span();
        let after = self
            .sig_after(span.end)
            .is_some_and(|t| t.kind == TokenKind::Punct && ASSIGN_OPS.contains(&t.text.as_str()));
        let before = self
            .sig_before(span.start)
            .is_some_and(|t| t.is_punct("++") || t.is_punct("--"));
        after || before
    }

    /// Constructs inside the body where `this` would change meaning, and
    /// names that stop resolving once the method lives in the target.
    fn check_body(&self) -> Result<(), MoveError> {
        let a = self.a;
        let class = a.class;
        let tokens: Vec<&Token> = self
            .method_tokens()
            .into_iter()
            .filter(|t| !t.is_trivia())
            .collect();
        let body = a.method.body.expect("checked by preconditions");
        for (i, t) in tokens.iter().enumerate() {
            if t.span.start < body.start {
                if t.is_punct("@") && tokens.get(i + 1).is_some_and(|n| n.text == "Override") {
                    return Err(self.fail(t.span, "method overrides a supertype method"));
                }
                continue;
            }
            if t.is_keyword("class") || t.is_keyword("interface") || t.is_keyword("enum") {
                return Err(self.fail(t.span, "local type declarations are not rewritten"));
            }
            if t.is_keyword("new") {
                let mut depth = 0usize;
                for (j, u) in tokens.iter().enumerate().skip(i + 1) {
                    if u.is_punct("(") {
                        depth += 1;
                    } else if u.is_punct(")") {
                        depth = depth.saturating_sub(1);
                        if depth == 0 {
                            if tokens.get(j + 1).is_some_and(|n| n.is_punct("{")) {
                                return Err(
                                    self.fail(t.span, "anonymous class bodies are not rewritten")
                                );
                            }
                            break;
                        }
                    } else if depth == 0 && (u.is_punct("[") || u.is_punct(";") || u.is_punct("{"))
                    {
                        break;
                    }
                }
            }
        }

        // Type and import visibility.
        let target = self.target;
        let target_file_imports = &target.imports;
        let same_file = target.path == class.path;
        let mut checked = BTreeSet::new();
        for (i, t) in tokens.iter().enumerate() {
            if !t.is_ident()
                || (i > 0 && tokens[i - 1].is_punct("."))
                || !checked.insert(t.text.as_str())
            {
                continue;
            }
            let from_c = self.model.resolve_type(&t.text, class);
            if from_c.is_some() && from_c != self.model.resolve_type(&t.text, target) {
                return Err(self.fail(
                    t.span,
                    format!("type `{}` is not visible from {}", t.text, target.fqn),
                ));
            }
            if from_c.is_none() && !same_file {
                for import in class.imports.iter().filter(|im| !im.wildcard) {
                    let last = import.path.rsplit('.').next();
                    if last == Some(t.text.as_str()) && !target_file_imports.contains(import) {
                        return Err(self.fail(
                            t.span,
                            format!(
                                "`{}` is imported in {} but not in {}",
                                t.text,
                                class.path.display(),
                                target.path.display()
                            ),
                        ));
                    }
                }
            }
        }

        // Names inherited or borrowed from enclosing classes.
        for chain in &a.scope.view.chains {
            if chain.head_kind != HeadKind::Ident || chain.head_call.is_some() || chain.is_type {
                continue;
            }
            if !matches!(a.scope.bind(chain), Binding::Unbound) {
                continue;
            }
            let owner = self.model.classes.values().find(|c| {
                c.field(&chain.head).is_some()
                    && (is_nested_in(self.model, class, &c.fqn)
                        || is_subclass_of(self.model, class, &c.fqn))
            });
            if let Some(owner) = owner {
                return Err(self.fail(
                    chain.head_span,
                    format!(
                        "`{}` is a field of {}, reachable only from the source class",
                        chain.head, owner.fqn
                    ),
                ));
            }
        }

        // Fields reached through the back reference must stay accessible.
        if class.package != target.package {
            for name in &a.own_fields {
                if Some(name.as_str()) == a.anchor_field() {
                    continue;
                }
                if let Some(f) = class.field(name) {
                    if matches!(f.visibility, Visibility::Package | Visibility::Protected) {
                        return Err(self.fail(
                            f.name_span,
                            format!(
                                "field `{name}` is not accessible from package {}",
                                target.package
                            ),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_sites(&self) -> Result<(), MoveError> {
        let method = self.a.method;
        for site in &self.a.sites.sites {
            let Some(x) = self.model.class(&site.enclosing) else {
                continue;
            };
            let ok = match method.visibility {
                Visibility::Public => true,
                Visibility::Private => x.top_level_fqn() == self.target.top_level_fqn(),
                Visibility::Package | Visibility::Protected => x.package == self.target.package,
            };
            if !ok {
                return Err(fail(
                    self.model,
                    x,
                    site.name_span,
                    format!(
                        "`{}` would not be accessible here after the move",
                        method.name
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Edits inside the method declaration, in file offsets.
    fn rewrite_edits(&self) -> Result<Vec<TextEdit>, MoveError> {
        let a = self.a;
        let mut edits = Vec::new();
        let this_name = &self.self_name;
        let anchor_field = a.anchor_field();
        for chain in &a.scope.view.chains {
            if chain.is_type {
                continue;
            }
            match chain.head_kind {
                HeadKind::This => {
                    let first = chain.steps.first();
                    let via_anchor = anchor_field
                        .is_some_and(|fd| first.is_some_and(|s| s.name == fd && s.call.is_none()));
                    if via_anchor {
                        let step = first.expect("anchor step");
                        if chain.steps.len() == 1 && self.is_assigned(chain) {
                            return Err(
                                self.fail(chain.head_span, "anchor field is assigned in the body")
                            );
                        }
                        edits.push(TextEdit::new(
                            Span::new(chain.head_span.start, step.name_span.end),
                            "this",
                        ));
                    } else {
                        edits.push(TextEdit::new(chain.head_span, this_name.clone()));
                    }
                }
                HeadKind::Ident if chain.head_call.is_none() => match a.scope.bind(chain) {
                    Binding::Param(p) if matches!(&a.anchor, Some(Anchor::Parameter { name, .. }) if *name == p.name) =>
                    {
                        if chain.steps.is_empty() && self.is_assigned(chain) {
                            return Err(self.fail(
                                chain.head_span,
                                "anchor parameter is assigned in the body",
                            ));
                        }
                        edits.push(TextEdit::new(chain.head_span, "this"));
                    }
                    Binding::OwnField(f) if Some(f.name.as_str()) == anchor_field => {
                        if chain.steps.is_empty() && self.is_assigned(chain) {
                            return Err(
                                self.fail(chain.head_span, "anchor field is assigned in the body")
                            );
                        }
                        edits.push(TextEdit::new(chain.head_span, "this"));
                    }
                    Binding::OwnField(_) => {
                        edits.push(TextEdit::insert(
                            chain.head_span.start,
                            format!("{this_name}."),
                        ));
                    }
                    _ => {}
                },
                _ => {}
            }
        }
        edits.extend(self.signature_edits());
        Ok(edits)
    }

    fn source_type_name(&self) -> String {
        let class = self.a.class;
        if self.model.resolve_type(&class.name, self.target).as_deref() == Some(class.fqn.as_str())
        {
            class.name.clone()
        } else {
            class.fqn.clone()
        }
    }

    fn signature_edits(&self) -> Vec<TextEdit> {
        let a = self.a;
        let params = &a.method.params;
        let back = a
            .needs_back_reference
            .then(|| format!("{} {}", self.source_type_name(), self.self_name));
        let mut edits = Vec::new();
        match &a.anchor {
            Some(Anchor::Parameter { index, .. }) => {
                let k = *index;
                let last = params.len() - 1;
                if params.len() == 1 {
                    edits.push(TextEdit::new(params[k].span, back.unwrap_or_default()));
                } else if k < last {
                    edits.push(TextEdit::delete(Span::new(
                        params[k].span.start,
                        params[k + 1].span.start,
                    )));
                    if let Some(b) = back {
                        edits.push(TextEdit::insert(params[last].span.end, format!(", {b}")));
                    }
                } else {
                    let text = back.map(|b| format!(", {b}")).unwrap_or_default();
                    edits.push(TextEdit::new(
                        Span::new(params[k - 1].span.end, params[k].span.end),
                        text,
                    ));
                }
            }
            _ => {
                if let Some(b) = back {
                    match params.last() {
                        Some(p) => edits.push(TextEdit::insert(p.span.end, format!(", {b}"))),
                        None => edits.push(TextEdit::insert(a.method.params_close.start, b)),
                    }
                }
            }
        }
        edits
    }

    fn member_indent(&self, class: &ClassInfo, src: &'m str, unit: &str) -> String {
        let mut starts: Vec<usize> = class
            .fields
            .iter()
            .map(|f| f.decl_span.start)
            .chain(class.methods.iter().map(|m| m.decl_span.start))
            .chain(
                self.model
                    .classes
                    .values()
                    .filter(|c| c.outer.as_deref() == Some(class.fqn.as_str()))
                    .map(|c| c.decl_span.start),
            )
            .filter(|&s| !(class.fqn == self.a.class.fqn && s == self.a.method.decl_span.start))
            .collect();
        starts.sort_unstable();
        match starts.first() {
            Some(&s) if starts_line(src, s) => indent_of(src, s).to_string(),
            _ => format!("{}{unit}", indent_of(src, class.keyword_span.start)),
        }
    }

    /// The moved declaration, rewritten and re-indented for the target.
    fn moved_text(
        &self,
        body_edits: &[TextEdit],
        d_indent: &str,
        c_indent: &str,
    ) -> Result<String, MoveError> {
        let decl = self.a.method.decl_span;
        let src = self.source();
        let local: Vec<TextEdit> = body_edits
            .iter()
            .map(|e| {
                TextEdit::new(
                    Span::new(e.span.start - decl.start, e.span.end - decl.start),
                    e.replacement.clone(),
                )
            })
            .collect();
        let text = apply_edits(decl.slice(src), &local)
            .map_err(|e| self.fail(decl, format!("body rewrite failed: {e}")))?;
        let mut out = Vec::new();
        for (i, line) in text.split('\n').enumerate() {
            if i == 0 {
                out.push(format!("{d_indent}{line}"));
            } else if is_blank(line) {
                out.push(if line.ends_with('\r') {
                    "\r".into()
                } else {
                    String::new()
                });
            } else if let Some(rest) = line.strip_prefix(c_indent) {
                out.push(format!("{d_indent}{rest}"));
            } else {
                out.push(line.to_string());
            }
        }
        Ok(out.join("\n"))
    }

    fn deletion(&self) -> TextEdit {
        let src = self.source();
        let decl = self.a.method.decl_span;
        let ls = line_start(src, decl.start);
        let le = line_end(src, decl.end);
        if starts_line(src, decl.start) && is_blank(&src[decl.end..le]) {
            let mut start = ls;
            let end = (le + 1).min(src.len());
            if ls > 0 {
                let prev_start = line_start(src, ls - 1);
                let next_line = &src[end..line_end(src, end)];
                if is_blank(&src[prev_start..ls - 1])
                    && (is_blank(next_line) || next_line.trim_start().starts_with('}'))
                {
                    start = prev_start;
                }
            }
            return TextEdit::delete(Span::new(start, end));
        }
        let trailing = src[decl.end..]
            .find(|c: char| c != ' ' && c != '\t')
            .map_or(src.len() - decl.end, |i| i);
        TextEdit::delete(Span::new(decl.start, decl.end + trailing))
    }

    fn insertion(&self, moved: &str, d_decl_indent: &str) -> TextEdit {
        let d = self.target;
        let src = &self.model.tree_of(d).source;
        let nl = newline_of(src);
        let close = d.body_span.end - 1;
        let open = d.body_span.start + 1;
        let ls = line_start(src, close);
        if ls > open && is_blank(&src[ls..close]) {
            let inner = &src[open..ls];
            let text = if is_blank(&inner.replace('\n', "")) {
                format!("{moved}{nl}")
            } else {
                let prev_start = line_start(src, ls - 1);
                if is_blank(&src[prev_start..ls - 1]) {
                    format!("{moved}{nl}")
                } else {
                    format!("{nl}{moved}{nl}")
                }
            };
            return TextEdit::insert(ls, text);
        }
        let ws_start = src[..close].trim_end_matches([' ', '\t']).len().max(open);
        let lead = if src[open..ws_start].trim().is_empty() {
            nl.to_string()
        } else {
            format!("{nl}{nl}")
        };
        TextEdit::new(
            Span::new(ws_start, close),
            format!("{lead}{moved}{nl}{d_decl_indent}"),
        )
    }

    fn simple_arg(&self, path: &Path, span: Span) -> bool {
        let Some(tree) = self.model.tree(path) else {
            return false;
        };
        let toks: Vec<&Token> = tree
            .tokens_in(span)
            .into_iter()
            .filter(|t| !t.is_trivia())
            .collect();
        !toks.is_empty()
            && toks.iter().enumerate().all(|(i, t)| {
                if i % 2 == 0 {
                    t.is_ident() || t.is_keyword("this")
                } else {
                    t.is_punct(".")
                }
            })
            && toks.len() % 2 == 1
    }

    fn site_edits(&self, site: &CallSite) -> Vec<TextEdit> {
        let tree = self.model.tree(&site.path).expect("site file");
        let src = &tree.source;
        let name = &self.a.method.name;
        let recv_text = match &site.kind {
            SiteKind::Receiver { receiver } => receiver.slice(src).to_string(),
            SiteKind::Bare => "this".to_string(),
        };
        let back = self.a.needs_back_reference;
        match &self.a.anchor {
            Some(Anchor::Parameter { index, .. }) => {
                let arg = site.call.args[*index];
                let arg_text = arg.slice(src);
                let new_recv = if self.simple_arg(&site.path, arg) {
                    arg_text.to_string()
                } else {
                    format!("({arg_text})")
                };
                let mut args: Vec<&str> = site
                    .call
                    .args
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| i != index)
                    .map(|(_, s)| s.slice(src))
                    .collect();
                if back {
                    args.push(&recv_text);
                }
                vec![TextEdit::new(
                    site.span(),
                    format!("{new_recv}.{name}({})", args.join(", ")),
                )]
            }
            Some(Anchor::Field { name: fd }) => {
                let mut edits = match &site.kind {
                    SiteKind::Receiver { receiver } => {
                        vec![TextEdit::insert(receiver.end, format!(".{fd}"))]
                    }
                    SiteKind::Bare => vec![TextEdit::insert(
                        site.name_span.start,
                        format!("this.{fd}."),
                    )],
                };
                if back {
                    let sep = if site.call.args.is_empty() { "" } else { ", " };
                    edits.push(TextEdit::insert(
                        site.call.close.start,
                        format!("{sep}{recv_text}"),
                    ));
                }
                edits
            }
            None => Vec::new(),
        }
    }
}

fn choose_self_name(taken: &BTreeSet<&str>) -> String {
    let mut name = String::from("self");
    while taken.contains(name.as_str()) {
        name.push('_');
    }
    name
}

pub(crate) fn compile(
    model: &ProjectModel,
    a: &Analysis<'_>,
) -> Result<RefactoringPlan, MoveError> {
    let target = a.target.expect("checked by preconditions");
    let anchor = a.anchor.clone().expect("checked by preconditions");
    let class_tree = model.tree_of(a.class);
    let target_tree = model.tree_of(target);
    let taken: BTreeSet<&str> = class_tree
        .tokens_in(a.method.decl_span)
        .into_iter()
        .chain(target_tree.tokens_in(target.decl_span))
        .filter(|t| t.is_ident())
        .map(|t| t.text.as_str())
        .collect();
    let planner = Planner {
        model,
        a,
        target,
        self_name: choose_self_name(&taken),
    };
    planner.check_body()?;
    planner.check_sites()?;

    let src = planner.source();
    let decl = a.method.decl_span;
    let unit = {
        let c_decl = indent_of(src, a.class.keyword_span.start);
        let m_indent = indent_of(src, decl.start);
        match m_indent.strip_prefix(c_decl) {
            Some(u) if starts_line(src, decl.start) && !u.is_empty() => u.to_string(),
            _ => "    ".to_string(),
        }
    };
    let c_indent = if starts_line(src, decl.start) {
        indent_of(src, decl.start).to_string()
    } else {
        format!("{}{unit}", indent_of(src, a.class.keyword_span.start))
    };
    let d_indent = planner.member_indent(target, &target_tree.source, &unit);
    let d_decl_indent = indent_of(&target_tree.source, target.keyword_span.start).to_string();

    let body_edits = planner.rewrite_edits()?;
    let moved = planner.moved_text(&body_edits, &d_indent, &c_indent)?;

    let mut edits: BTreeMap<PathBuf, Vec<TextEdit>> = BTreeMap::new();
    edits
        .entry(a.class.path.clone())
        .or_default()
        .push(planner.deletion());
    edits
        .entry(target.path.clone())
        .or_default()
        .push(planner.insertion(&moved, &d_decl_indent));
    for site in &a.sites.sites {
        edits
            .entry(site.path.clone())
            .or_default()
            .extend(planner.site_edits(site));
    }

    let mut hashes = BTreeMap::new();
    let mut notes = BTreeMap::new();
    for (path, file_edits) in &edits {
        let tree = model.tree(path).expect("edited file is in the model");
        if let Err(e) = apply_edits(&tree.source, file_edits) {
            let span = match &e {
                crate::syntax::EditError::OverlappingEdits { second, .. } => *second,
                crate::syntax::EditError::OutOfBounds { span, .. } => *span,
            };
            return Err(MoveError::Planning {
                path: path.clone(),
                line: tree.line_of(span.start.min(tree.source.len())),
                span,
                message: format!("edits conflict: {e}"),
            });
        }
        hashes.insert(path.clone(), sha256_hex(&tree.source));
        notes.insert(path.clone(), tree.parse_notes.len());
    }

    Ok(RefactoringPlan {
        method: a.method.name.clone(),
        source_class: a.class.fqn.clone(),
        target_class: target.fqn.clone(),
        anchor,
        needs_back_reference: a.needs_back_reference,
        self_param_name: planner.self_name.clone(),
        edits,
        call_site_count: a.sites.sites.len(),
        hashes,
        parse_note_counts: notes,
    })
}
