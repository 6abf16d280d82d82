//! Lossless concrete syntax trees for a Java subset.
//!
//! Every byte of the input lands in exactly one [`Token`], and every token
//! lands in exactly one leaf of the tree, so [`render`] reproduces the source
//! byte-for-byte. Regions the parser does not understand are kept as
//! [`NodeKind::TokenRun`] nodes and reported through
//! [`SyntaxTree::parse_notes`] instead of failing.

mod edit;
mod lexer;
mod lines;
mod parser;
pub mod shallow;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use edit::{apply_edits, EditError, TextEdit};
pub use lexer::tokenize;
pub use lines::LineIndex;
pub use parser::parse_file;

/// Half-open byte range `[start, end)` into a source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn empty_at(offset: usize) -> Self {
        Self::new(offset, offset)
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, other: Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn intersects(&self, other: Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn cover(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    pub fn slice<'s>(&self, text: &'s str) -> &'s str {
        &text[self.start..self.end]
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword,
    Identifier,
    Number,
    String,
    Char,
    Punct,
    Whitespace,
    LineComment,
    BlockComment,
    DocComment,
    Unknown,
}

impl TokenKind {
    /// Whitespace and comments.
    pub fn is_trivia(self) -> bool {
        matches!(
            self,
            TokenKind::Whitespace
                | TokenKind::LineComment
                | TokenKind::BlockComment
                | TokenKind::DocComment
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
}

impl Token {
    pub fn is_trivia(&self) -> bool {
        self.kind.is_trivia()
    }

    pub fn is_punct(&self, p: &str) -> bool {
        self.kind == TokenKind::Punct && self.text == p
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        self.kind == TokenKind::Keyword && self.text == kw
    }

    pub fn is_ident(&self) -> bool {
        self.kind == TokenKind::Identifier
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    File,
    PackageDecl,
    ImportDecl,
    ClassDecl,
    FieldDecl,
    MethodDecl,
    Param,
    TypeRefText,
    Body,
    TokenRun,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Element {
    Node(SyntaxNode),
    Token(Token),
}

impl Element {
    pub fn span(&self) -> Span {
        match self {
            Element::Node(n) => n.span,
            Element::Token(t) => t.span,
        }
    }

    pub fn as_node(&self) -> Option<&SyntaxNode> {
        match self {
            Element::Node(n) => Some(n),
            Element::Token(_) => None,
        }
    }

    pub fn as_token(&self) -> Option<&Token> {
        match self {
            Element::Token(t) => Some(t),
            Element::Node(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxNode {
    pub kind: NodeKind,
    pub span: Span,
    pub children: Vec<Element>,
    /// Declared name for package, import, class, field (first declarator),
    /// method and parameter nodes.
    pub name: Option<String>,
}

impl SyntaxNode {
    pub(crate) fn new(
        kind: NodeKind,
        children: Vec<Element>,
        name: Option<String>,
        at: usize,
    ) -> Self {
        let span = match (children.first(), children.last()) {
            (Some(first), Some(last)) => Span::new(first.span().start, last.span().end),
            _ => Span::empty_at(at),
        };
        Self {
            kind,
            span,
            children,
            name,
        }
    }

    pub fn child_nodes(&self) -> impl Iterator<Item = &SyntaxNode> {
        self.children.iter().filter_map(Element::as_node)
    }

    pub fn child_tokens(&self) -> impl Iterator<Item = &Token> {
        self.children.iter().filter_map(Element::as_token)
    }

    pub fn first_child(&self, kind: NodeKind) -> Option<&SyntaxNode> {
        self.child_nodes().find(|n| n.kind == kind)
    }

    /// All leaf tokens below this node, in source order.
    pub fn tokens(&self) -> Vec<&Token> {
        let mut out = Vec::new();
        self.collect_tokens(&mut out);
        out
    }

    fn collect_tokens<'a>(&'a self, out: &mut Vec<&'a Token>) {
        for child in &self.children {
            match child {
                Element::Token(t) => out.push(t),
                Element::Node(n) => n.collect_tokens(out),
            }
        }
    }

    /// Pre-order walk over this node and every descendant node.
    pub fn descendants(&self) -> Vec<&SyntaxNode> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let node = out[i];
            out.extend(node.child_nodes());
            i += 1;
        }
        out
    }

    pub fn render_into(&self, out: &mut String) {
        for child in &self.children {
            match child {
                Element::Token(t) => out.push_str(&t.text),
                Element::Node(n) => n.render_into(out),
            }
        }
    }

    /// Source text of the significant tokens, separated by a single space
    /// only where two word-like tokens would otherwise merge.
    pub fn compact_text(&self) -> String {
        compact_tokens(self.tokens().into_iter())
    }
}

pub(crate) fn compact_tokens<'a>(tokens: impl Iterator<Item = &'a Token>) -> String {
    let mut out = String::new();
    let mut prev_word = false;
    for t in tokens.filter(|t| !t.is_trivia()) {
        let word = matches!(
            t.kind,
            TokenKind::Identifier | TokenKind::Keyword | TokenKind::Number
        );
        if word && prev_word {
            out.push(' ');
        }
        out.push_str(&t.text);
        prev_word = word;
    }
    out
}

/// A region the parser accepted tolerantly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseNote {
    pub span: Span,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct SyntaxTree {
    pub root: SyntaxNode,
    pub path: PathBuf,
    pub source: String,
    pub parse_notes: Vec<ParseNote>,
    lines: LineIndex,
}

impl SyntaxTree {
    pub(crate) fn new(
        root: SyntaxNode,
        path: PathBuf,
        source: String,
        parse_notes: Vec<ParseNote>,
    ) -> Self {
        let lines = LineIndex::new(&source);
        Self {
            root,
            path,
            source,
            parse_notes,
            lines,
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn lines(&self) -> &LineIndex {
        &self.lines
    }

    /// 1-based line holding `offset`.
    pub fn line_of(&self, offset: usize) -> usize {
        self.lines.line_of(offset)
    }

    pub fn text(&self, span: Span) -> &str {
        span.slice(&self.source)
    }

    /// Innermost node of `kind` whose span equals `span`.
    pub fn find_node(&self, kind: NodeKind, span: Span) -> Option<&SyntaxNode> {
        fn walk(node: &SyntaxNode, kind: NodeKind, span: Span) -> Option<&SyntaxNode> {
            if !node.span.contains(span) {
                return None;
            }
            for child in node.child_nodes() {
                if let Some(found) = walk(child, kind, span) {
                    return Some(found);
                }
            }
            (node.kind == kind && node.span == span).then_some(node)
        }
        walk(&self.root, kind, span)
    }

    /// Leaf tokens lying inside `span`.
    pub fn tokens_in(&self, span: Span) -> Vec<&Token> {
        self.root
            .tokens()
            .into_iter()
            .filter(|t| span.contains(t.span) && !(t.span.is_empty()))
            .collect()
    }
}

/// Concatenate the leaves of the tree.
pub fn render(tree: &SyntaxTree) -> String {
    let mut out = String::with_capacity(tree.source.len());
    tree.root.render_into(&mut out);
    out
}
