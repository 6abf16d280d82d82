//! Project-wide view of classes, fields and methods over parsed trees.
//!
//! Names resolve only against classes declared in the analyzed sources;
//! anything else (JDK types, libraries) is unresolved.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{Element, NodeKind, Span, SyntaxNode, SyntaxTree, Token, TokenKind};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("class {fqn} is declared twice: {} and {}", first.display(), second.display())]
    DuplicateFqn {
        fqn: String,
        first: PathBuf,
        second: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Public,
    Protected,
    Package,
    Private,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Import {
    /// Dotted path without `static` or the trailing `.*`.
    pub path: String,
    pub is_static: bool,
    pub wildcard: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Javadoc {
    pub raw: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldInfo {
    pub name: String,
    pub name_span: Span,
    pub declared_type_text: String,
    pub visibility: Visibility,
    pub is_static: bool,
    pub decl_span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamInfo {
    pub name: String,
    pub name_span: Span,
    pub type_text: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodInfo {
    pub name: String,
    pub name_span: Span,
    pub params: Vec<ParamInfo>,
    /// `None` for constructors.
    pub return_type_text: Option<String>,
    pub visibility: Visibility,
    pub is_static: bool,
    pub is_constructor: bool,
    /// No body (`abstract` or `native`).
    pub is_abstract: bool,
    pub body: Option<Span>,
    pub javadoc: Option<Javadoc>,
    /// Whole declaration, including an attached Javadoc.
    pub decl_span: Span,
    /// First token that is not the attached Javadoc or trivia.
    pub header_start: usize,
    pub params_open: Span,
    pub params_close: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassInfo {
    pub fqn: String,
    pub name: String,
    pub package: String,
    pub path: PathBuf,
    pub decl_span: Span,
    pub body_span: Span,
    pub keyword_span: Span,
    pub fields: Vec<FieldInfo>,
    pub methods: Vec<MethodInfo>,
    pub is_nested: bool,
    pub outer: Option<String>,
    pub extends: Option<String>,
    pub implements: Vec<String>,
    pub imports: Vec<Import>,
}

impl ClassInfo {
    pub fn field(&self, name: &str) -> Option<&FieldInfo> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn method(&self, name: &str) -> Option<&MethodInfo> {
        self.methods.iter().find(|m| m.name == name)
    }

    pub fn methods_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a MethodInfo> {
        self.methods.iter().filter(move |m| m.name == name)
    }

    /// Top-level class this one is nested in (itself when top-level).
    pub fn top_level_fqn(&self) -> &str {
        let rest = if self.package.is_empty() {
            self.fqn.as_str()
        } else {
            &self.fqn[self.package.len() + 1..]
        };
        let top = rest.split('.').next().unwrap_or(rest);
        let len = if self.package.is_empty() {
            top.len()
        } else {
            self.package.len() + 1 + top.len()
        };
        &self.fqn[..len]
    }
}

#[derive(Debug, Clone, Default)]
pub struct ProjectModel {
    pub root: PathBuf,
    pub classes: BTreeMap<String, ClassInfo>,
    pub files: BTreeMap<PathBuf, SyntaxTree>,
}

/// Build the model. The result does not depend on the order of `trees`.
pub fn build_model(
    trees: Vec<SyntaxTree>,
    root: impl AsRef<Path>,
) -> Result<ProjectModel, ModelError> {
    let root = root.as_ref().to_path_buf();
    let mut files = BTreeMap::new();
    for tree in trees {
        let rel = relative_path(&root, &tree.path);
        files.insert(rel, tree);
    }
    let mut classes: BTreeMap<String, ClassInfo> = BTreeMap::new();
    for (path, tree) in &files {
        let package = tree
            .root
            .first_child(NodeKind::PackageDecl)
            .and_then(|n| n.name.clone())
            .unwrap_or_default();
        let imports = collect_imports(&tree.root);
        let mut found = Vec::new();
        for node in tree
            .root
            .child_nodes()
            .filter(|n| n.kind == NodeKind::ClassDecl)
        {
            collect_class(node, &package, None, path, &imports, &mut found);
        }
        for class in found {
            if let Some(prev) = classes.get(&class.fqn) {
                return Err(ModelError::DuplicateFqn {
                    fqn: class.fqn.clone(),
                    first: prev.path.clone(),
                    second: class.path.clone(),
                });
            }
            classes.insert(class.fqn.clone(), class);
        }
    }
    Ok(ProjectModel {
        root,
        classes,
        files,
    })
}

fn relative_path(root: &Path, path: &Path) -> PathBuf {
    path.strip_prefix(root).unwrap_or(path).to_path_buf()
}

impl ProjectModel {
    pub fn class(&self, fqn: &str) -> Option<&ClassInfo> {
        self.classes.get(fqn)
    }

    pub fn tree(&self, path: &Path) -> Option<&SyntaxTree> {
        self.files.get(path)
    }

    pub fn tree_of(&self, class: &ClassInfo) -> &SyntaxTree {
        &self.files[&class.path]
    }

    /// Classes ordered by (path, declaration offset).
    pub fn classes_in_source_order(&self) -> Vec<&ClassInfo> {
        let mut out: Vec<&ClassInfo> = self.classes.values().collect();
        out.sort_by(|a, b| (&a.path, a.decl_span.start).cmp(&(&b.path, b.decl_span.start)));
        out
    }

    /// Leaf tokens of a method body, braces included.
    pub fn body_tokens(&self, class: &ClassInfo, method: &MethodInfo) -> Vec<&Token> {
        match method.body {
            Some(span) => self.tree_of(class).tokens_in(span),
            None => Vec::new(),
        }
    }

    /// Resolve a declared type to a project class.
    ///
    /// Order: exact FQN, explicit or wildcard import, same package, nested
    /// classes of the context and its enclosing classes. Generic arguments
    /// are ignored; array types never resolve.
    pub fn resolve_type(&self, type_text: &str, context: &ClassInfo) -> Option<String> {
        let name = strip_type(type_text)?;
        if self.classes.contains_key(&name) {
            return Some(name);
        }
        let (first, rest) = match name.split_once('.') {
            Some((f, r)) => (f, Some(r)),
            None => (name.as_str(), None),
        };
        let with_rest = |base: String| match rest {
            Some(r) => format!("{base}.{r}"),
            None => base,
        };
        for import in context
            .imports
            .iter()
            .filter(|i| !i.is_static && !i.wildcard)
        {
            if import.path.rsplit('.').next() == Some(first) {
                let candidate = with_rest(import.path.clone());
                if self.classes.contains_key(&candidate) {
                    return Some(candidate);
                }
            }
        }
        for import in context
            .imports
            .iter()
            .filter(|i| !i.is_static && i.wildcard)
        {
            let candidate = format!("{}.{}", import.path, name);
            if self.classes.contains_key(&candidate) {
                return Some(candidate);
            }
        }
        if !context.package.is_empty() {
            let candidate = format!("{}.{}", context.package, name);
            if self.classes.contains_key(&candidate) {
                return Some(candidate);
            }
        }
        let mut scope = Some(context);
        while let Some(class) = scope {
            let candidate = format!("{}.{}", class.fqn, name);
            if self.classes.contains_key(&candidate) {
                return Some(candidate);
            }
            scope = class.outer.as_deref().and_then(|o| self.classes.get(o));
        }
        None
    }
}

/// Drop annotations, generic arguments and whitespace; `None` for arrays.
fn strip_type(type_text: &str) -> Option<String> {
    let mut out = String::new();
    let mut depth = 0usize;
    let mut chars = type_text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '<' => depth += 1,
            '>' => depth = depth.saturating_sub(1),
            '@' if depth == 0 => {
                // annotation name, possibly dotted
                while chars
                    .peek()
                    .is_some_and(|c| c.is_alphanumeric() || *c == '_' || *c == '$' || *c == '.')
                {
                    chars.next();
                }
            }
            _ if depth > 0 => {}
            c if c.is_whitespace() => {}
            '[' => return None,
            _ => out.push(c),
        }
    }
    if out.is_empty() || out.contains("...") {
        return None;
    }
    Some(out)
}

fn collect_imports(root: &SyntaxNode) -> Vec<Import> {
    root.child_nodes()
        .filter(|n| n.kind == NodeKind::ImportDecl)
        .filter_map(|n| {
            let is_static = n.child_tokens().any(|t| t.is_keyword("static"));
            let name = n.name.clone()?;
            let (path, wildcard) = match name.strip_suffix(".*") {
                Some(p) => (p.to_string(), true),
                None => (name, false),
            };
            Some(Import {
                path,
                is_static,
                wildcard,
            })
        })
        .collect()
}

fn collect_class(
    node: &SyntaxNode,
    package: &str,
    outer: Option<&str>,
    path: &Path,
    imports: &[Import],
    out: &mut Vec<ClassInfo>,
) {
    let Some(name) = node.name.clone() else {
        return;
    };
    let fqn = match (outer, package.is_empty()) {
        (Some(o), _) => format!("{o}.{name}"),
        (None, true) => name.clone(),
        (None, false) => format!("{package}.{name}"),
    };
    let Some(body) = node.first_child(NodeKind::Body) else {
        return;
    };
    let keyword_span = node
        .child_tokens()
        .find(|t| t.is_keyword("class"))
        .map_or(node.span, |t| t.span);

    let mut extends = None;
    let mut implements = Vec::new();
    let mut mode = "";
    for child in &node.children {
        match child {
            Element::Token(t) if t.is_keyword("extends") => mode = "extends",
            Element::Token(t) if t.is_keyword("implements") => mode = "implements",
            Element::Token(t) if t.is_ident() && t.text == "permits" => mode = "",
            Element::Node(n) if n.kind == NodeKind::TypeRefText => match mode {
                "extends" => extends = Some(n.compact_text()),
                "implements" => implements.push(n.compact_text()),
                _ => {}
            },
            _ => {}
        }
    }

    let mut fields = Vec::new();
    let mut methods = Vec::new();
    let mut nested = Vec::new();
    for member in body.child_nodes() {
        match member.kind {
            NodeKind::FieldDecl => fields.extend(field_infos(member)),
            NodeKind::MethodDecl => methods.push(method_info(member)),
            NodeKind::ClassDecl => nested.push(member),
            _ => {}
        }
    }

    out.push(ClassInfo {
        fqn: fqn.clone(),
        name,
        package: package.to_string(),
        path: path.to_path_buf(),
        decl_span: node.span,
        body_span: body.span,
        keyword_span,
        fields,
        methods,
        is_nested: outer.is_some(),
        outer: outer.map(str::to_string),
        extends,
        implements,
        imports: imports.to_vec(),
    });
    for child in nested {
        collect_class(child, package, Some(&fqn), path, imports, out);
    }
}

struct Modifiers {
    visibility: Visibility,
    is_static: bool,
}

fn modifiers(node: &SyntaxNode) -> Modifiers {
    let mut visibility = Visibility::Package;
    let mut is_static = false;
    for t in header_tokens(node) {
        if t.kind != TokenKind::Keyword {
            continue;
        }
        match t.text.as_str() {
            "public" => visibility = Visibility::Public,
            "protected" => visibility = Visibility::Protected,
            "private" => visibility = Visibility::Private,
            "static" => is_static = true,
            _ => {}
        }
    }
    Modifiers {
        visibility,
        is_static,
    }
}

/// Direct tokens before the first child node: doc, annotations, modifiers
/// and type parameters.
fn header_tokens(node: &SyntaxNode) -> impl Iterator<Item = &Token> {
    node.children
        .iter()
        .take_while(|c| matches!(c, Element::Token(_)))
        .filter_map(Element::as_token)
}

fn attached_doc(node: &SyntaxNode) -> Option<Javadoc> {
    let mut doc = None;
    for t in header_tokens(node) {
        match t.kind {
            TokenKind::DocComment => {
                doc = Some(Javadoc {
                    raw: t.text.clone(),
                    span: t.span,
                })
            }
            TokenKind::LineComment | TokenKind::BlockComment => doc = None,
            _ => {}
        }
    }
    doc
}

fn header_start(node: &SyntaxNode, doc: Option<&Javadoc>) -> usize {
    node.tokens()
        .into_iter()
        .find(|t| !t.is_trivia() && doc.is_none_or(|d| t.span.start > d.span.start))
        .map_or(node.span.start, |t| t.span.start)
}

fn field_infos(node: &SyntaxNode) -> Vec<FieldInfo> {
    let mods = modifiers(node);
    let Some(type_node) = node.first_child(NodeKind::TypeRefText) else {
        return Vec::new();
    };
    let base_type = type_node.compact_text();
    let after_type: Vec<&Token> = node
        .children
        .iter()
        .skip_while(|c| c.span().start < type_node.span.end)
        .filter_map(Element::as_token)
        .filter(|t| !t.is_trivia())
        .collect();
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut expect_name = true;
    let mut i = 0;
    while i < after_type.len() {
        let t = after_type[i];
        if expect_name && depth == 0 && t.is_ident() {
            let mut ty = base_type.clone();
            let mut j = i + 1;
            while j + 1 < after_type.len()
                && after_type[j].is_punct("[")
                && after_type[j + 1].is_punct("]")
            {
                ty.push_str("[]");
                j += 2;
            }
            out.push(FieldInfo {
                name: t.text.clone(),
                name_span: t.span,
                declared_type_text: ty,
                visibility: mods.visibility,
                is_static: mods.is_static,
                decl_span: node.span,
            });
            expect_name = false;
            i = j;
            continue;
        }
        if t.kind == TokenKind::Punct {
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth = depth.saturating_sub(1),
                "," if depth == 0 => expect_name = true,
                _ => {}
            }
        }
        i += 1;
    }
    out
}

fn method_info(node: &SyntaxNode) -> MethodInfo {
    let mods = modifiers(node);
    let doc = attached_doc(node);
    let direct: Vec<&Token> = node.child_tokens().filter(|t| !t.is_trivia()).collect();
    let name = node.name.clone().unwrap_or_default();
    let name_idx = (0..direct.len())
        .find(|&i| {
            direct[i].is_ident()
                && direct[i].text == name
                && direct.get(i + 1).is_some_and(|t| t.is_punct("("))
                && (i == 0 || !(direct[i - 1].is_punct("@") || direct[i - 1].is_punct(".")))
        })
        .unwrap_or(0);
    let open_idx = name_idx + 1;
    let name_span = direct.get(name_idx).map_or(node.span, |t| t.span);
    let params_open = direct.get(open_idx).map_or(node.span, |t| t.span);
    let params_close = direct
        .iter()
        .skip(open_idx + 1)
        .find(|t| t.is_punct(")"))
        .map_or(params_open, |t| t.span);
    let return_type_text = node
        .child_nodes()
        .find(|n| n.kind == NodeKind::TypeRefText && n.span.end <= name_span.start)
        .map(SyntaxNode::compact_text);
    let params = node
        .child_nodes()
        .filter(|n| n.kind == NodeKind::Param)
        .map(param_info)
        .collect();
    let body = node.first_child(NodeKind::Body).map(|b| b.span);
    MethodInfo {
        name,
        name_span,
        params,
        is_constructor: return_type_text.is_none(),
        return_type_text,
        visibility: mods.visibility,
        is_static: mods.is_static,
        is_abstract: body.is_none(),
        body,
        header_start: header_start(node, doc.as_ref()),
        javadoc: doc,
        decl_span: node.span,
        params_open,
        params_close,
    }
}

fn param_info(node: &SyntaxNode) -> ParamInfo {
    let mut type_text = node
        .first_child(NodeKind::TypeRefText)
        .map(SyntaxNode::compact_text)
        .unwrap_or_default();
    let mut name_span = node.span;
    let mut seen_name = false;
    for t in node.child_tokens().filter(|t| !t.is_trivia()) {
        if t.is_punct("...") {
            type_text.push_str("...");
        } else if t.is_ident() && node.name.as_deref() == Some(t.text.as_str()) && !seen_name {
            name_span = t.span;
            seen_name = true;
        } else if seen_name && t.is_punct("[") {
            type_text.push_str("[]");
        }
    }
    ParamInfo {
        name: node.name.clone().unwrap_or_default(),
        name_span,
        type_text,
        span: node.span,
    }
}
