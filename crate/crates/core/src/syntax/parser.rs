use std::path::PathBuf;

use super::{
    compact_tokens, tokenize, Element, NodeKind, ParseNote, Span, SyntaxNode, SyntaxTree, Token,
    TokenKind,
};

const MODIFIERS: &[&str] = &[
    "public",
    "protected",
    "private",
    "static",
    "final",
    "abstract",
    "native",
    "synchronized",
    "transient",
    "volatile",
    "strictfp",
    "default",
];

const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
];

/// Parse `source` into a lossless tree. Never fails: anything outside the
/// supported subset is wrapped in a `TokenRun` and reported as a parse note.
pub fn parse_file(source: &str, path: impl Into<PathBuf>) -> SyntaxTree {
    let tokens = tokenize(source);
    let mut parser = Parser::new(tokens);
    let root = parser.file();
    SyntaxTree::new(root, path.into(), source.to_string(), parser.notes)
}

type Parsed<T> = Result<T, ()>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Class,
    Method { ctor: bool },
    Field,
    Initializer,
    Semicolon,
    OtherType(&'static str),
    Unknown,
}

struct Parser {
    tokens: Vec<Token>,
    /// Indices of significant (non-trivia) tokens.
    sig: Vec<usize>,
    pos: usize,
    notes: Vec<ParseNote>,
}

impl Parser {
    fn new(tokens: Vec<Token>) -> Self {
        let sig = tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.is_trivia())
            .map(|(i, _)| i)
            .collect();
        Self {
            tokens,
            sig,
            pos: 0,
            notes: Vec::new(),
        }
    }

    // ---- cursor helpers -------------------------------------------------

    /// Index into `sig` of the next significant token at or after `pos`.
    fn sig_cursor(&self) -> usize {
        self.sig.partition_point(|&i| i < self.pos)
    }

    fn sig_tok(&self, k: usize) -> Option<&Token> {
        self.sig.get(k).map(|&i| &self.tokens[i])
    }

    fn peek(&self) -> Option<&Token> {
        self.peek_nth(0)
    }

    fn peek_nth(&self, n: usize) -> Option<&Token> {
        self.sig_tok(self.sig_cursor() + n)
    }

    fn peek_is_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn peek_is_keyword(&self, kw: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(kw))
    }

    fn take_trivia(&mut self) -> Vec<Element> {
        let mut out = Vec::new();
        while let Some(t) = self.tokens.get(self.pos) {
            if !t.is_trivia() {
                break;
            }
            out.push(Element::Token(t.clone()));
            self.pos += 1;
        }
        out
    }

    /// Move pending trivia and the next significant token into `out`.
    fn bump(&mut self, out: &mut Vec<Element>) -> Option<Token> {
        out.extend(self.take_trivia());
        let t = self.tokens.get(self.pos)?.clone();
        out.push(Element::Token(t.clone()));
        self.pos += 1;
        Some(t)
    }

    fn expect_punct(&mut self, p: &str, out: &mut Vec<Element>) -> Parsed<()> {
        if self.peek_is_punct(p) {
            self.bump(out);
            Ok(())
        } else {
            Err(())
        }
    }

    fn expect_ident(&mut self, out: &mut Vec<Element>) -> Parsed<String> {
        match self.peek() {
            Some(t) if t.is_ident() => Ok(self.bump(out).map(|t| t.text).unwrap_or_default()),
            _ => Err(()),
        }
    }

    fn note(&mut self, span: Span, message: impl Into<String>) {
        self.notes.push(ParseNote {
            span,
            message: message.into(),
        });
    }

    fn checkpoint(&self) -> (usize, usize) {
        (self.pos, self.notes.len())
    }

    fn rewind(&mut self, (pos, notes): (usize, usize)) {
        self.pos = pos;
        self.notes.truncate(notes);
    }

    // ---- lookahead (in significant-token index space) -------------------

    fn skip_annotation(&self, k: usize) -> Option<usize> {
        let at = self.sig_tok(k)?;
        if !at.is_punct("@") || !self.sig_tok(k + 1)?.is_ident() {
            return None;
        }
        let mut k = k + 2;
        while self.sig_tok(k).is_some_and(|t| t.is_punct("."))
            && self.sig_tok(k + 1).is_some_and(Token::is_ident)
        {
            k += 2;
        }
        if self.sig_tok(k).is_some_and(|t| t.is_punct("(")) {
            k = self.match_close(k, "(", ")")? + 1;
        }
        Some(k)
    }

    fn skip_modifiers(&self, mut k: usize) -> usize {
        loop {
            let Some(t) = self.sig_tok(k) else { return k };
            if (t.kind == TokenKind::Keyword && MODIFIERS.contains(&t.text.as_str()))
                || (t.is_ident() && t.text == "sealed")
            {
                k += 1;
            } else if t.is_ident()
                && t.text == "non"
                && self.sig_tok(k + 1).is_some_and(|t| t.is_punct("-"))
                && self
                    .sig_tok(k + 2)
                    .is_some_and(|t| t.is_ident() && t.text == "sealed")
            {
                k += 3;
            } else if let Some(next) = self.skip_annotation(k) {
                k = next;
            } else {
                return k;
            }
        }
    }

    fn match_close(&self, k: usize, open: &str, close: &str) -> Option<usize> {
        let mut depth = 0usize;
        let mut j = k;
        while let Some(t) = self.sig_tok(j) {
            if t.is_punct(open) {
                depth += 1;
            } else if t.is_punct(close) {
                depth -= 1;
                if depth == 0 {
                    return Some(j);
                }
            }
            j += 1;
        }
        None
    }

    fn match_angle(&self, k: usize) -> Option<usize> {
        let mut depth = 0usize;
        let mut j = k;
        while let Some(t) = self.sig_tok(j) {
            if t.is_punct("<") {
                depth += 1;
            } else if t.is_punct(">") {
                depth -= 1;
                if depth == 0 {
                    return Some(j);
                }
            } else if !angle_inner_ok(t) {
                return None;
            }
            j += 1;
        }
        None
    }

    /// End (exclusive) of a type starting at `k`.
    fn scan_type(&self, mut k: usize) -> Option<usize> {
        while let Some(next) = self.skip_annotation(k) {
            k = next;
        }
        let t = self.sig_tok(k)?;
        if t.kind == TokenKind::Keyword && PRIMITIVES.contains(&t.text.as_str()) {
            k += 1;
        } else if t.is_ident() {
            k += 1;
            loop {
                if self.sig_tok(k).is_some_and(|t| t.is_punct("<")) {
                    k = self.match_angle(k)? + 1;
                }
                if self.sig_tok(k).is_some_and(|t| t.is_punct("."))
                    && self.sig_tok(k + 1).is_some_and(Token::is_ident)
                {
                    k += 2;
                } else {
                    break;
                }
            }
        } else {
            return None;
        }
        while self.sig_tok(k).is_some_and(|t| t.is_punct("["))
            && self.sig_tok(k + 1).is_some_and(|t| t.is_punct("]"))
        {
            k += 2;
        }
        Some(k)
    }

    fn classify_member(&self, class_name: &str) -> Shape {
        let start = self.sig_cursor();
        let mut k = self.skip_modifiers(start);
        let Some(t) = self.sig_tok(k) else {
            return Shape::Unknown;
        };
        if t.is_keyword("class") {
            return Shape::Class;
        }
        if t.is_keyword("interface") {
            return Shape::OtherType("interface");
        }
        if t.is_keyword("enum") {
            return Shape::OtherType("enum");
        }
        if t.is_punct("@")
            && self
                .sig_tok(k + 1)
                .is_some_and(|t| t.is_keyword("interface"))
        {
            return Shape::OtherType("annotation type");
        }
        if t.is_ident()
            && t.text == "record"
            && self.sig_tok(k + 1).is_some_and(Token::is_ident)
            && self
                .sig_tok(k + 2)
                .is_some_and(|t| t.is_punct("(") || t.is_punct("<"))
        {
            return Shape::OtherType("record");
        }
        if t.is_punct("{") {
            return Shape::Initializer;
        }
        if t.is_punct(";") {
            return if k == start {
                Shape::Semicolon
            } else {
                Shape::Unknown
            };
        }
        if t.is_punct("<") {
            match self.match_angle(k) {
                Some(close) => k = close + 1,
                None => return Shape::Unknown,
            }
        }
        let Some(t) = self.sig_tok(k) else {
            return Shape::Unknown;
        };
        if t.is_ident() && self.sig_tok(k + 1).is_some_and(|n| n.is_punct("(")) {
            return if t.text == class_name {
                Shape::Method { ctor: true }
            } else {
                Shape::Unknown
            };
        }
        let Some(after_type) = self.scan_type(k) else {
            return Shape::Unknown;
        };
        if !self.sig_tok(after_type).is_some_and(Token::is_ident) {
            return Shape::Unknown;
        }
        match self.sig_tok(after_type + 1) {
            Some(n) if n.is_punct("(") => Shape::Method { ctor: false },
            Some(n) if n.is_punct("=") || n.is_punct(",") || n.is_punct(";") || n.is_punct("[") => {
                Shape::Field
            }
            _ => Shape::Unknown,
        }
    }

    // ---- building -------------------------------------------------------

    fn file(&mut self) -> SyntaxNode {
        let mut children = Vec::new();
        loop {
            let pending = self.take_trivia();
            let Some(t) = self.peek().cloned() else {
                children.extend(pending);
                break;
            };
            if t.is_keyword("package") || t.is_keyword("import") {
                children.extend(pending);
                let kind = if t.is_keyword("package") {
                    NodeKind::PackageDecl
                } else {
                    NodeKind::ImportDecl
                };
                children.push(Element::Node(self.header_statement(kind)));
                continue;
            }
            if t.is_punct(";") {
                children.extend(pending);
                self.bump(&mut children);
                continue;
            }
            let (outer, leading) = split_attached_doc(pending);
            children.extend(outer);
            match self.classify_member("") {
                Shape::Class => {
                    let cp = self.checkpoint();
                    match self.class_decl(leading.clone()) {
                        Ok(node) => children.push(Element::Node(node)),
                        Err(()) => {
                            self.rewind(cp);
                            children.extend(leading);
                            children.push(Element::Node(
                                self.token_run(false, Some("malformed class declaration")),
                            ));
                        }
                    }
                }
                Shape::OtherType(what) => {
                    children.extend(leading);
                    let msg = format!("{what} declaration not analyzed");
                    children.push(Element::Node(self.token_run(false, Some(&msg))));
                }
                _ => {
                    children.extend(leading);
                    children.push(Element::Node(
                        self.token_run(false, Some("unrecognized top-level construct")),
                    ));
                }
            }
        }
        SyntaxNode::new(NodeKind::File, children, None, 0)
    }

    fn header_statement(&mut self, kind: NodeKind) -> SyntaxNode {
        let mut children = Vec::new();
        self.bump(&mut children);
        let mut terminated = false;
        while let Some(t) = self.peek() {
            if t.is_punct("{") || t.is_punct("}") {
                break;
            }
            let semi = t.is_punct(";");
            self.bump(&mut children);
            if semi {
                terminated = true;
                break;
            }
        }
        let tokens: Vec<&Token> = children
            .iter()
            .filter_map(Element::as_token)
            .skip(1)
            .filter(|t| !t.is_keyword("static") && !t.is_punct(";"))
            .collect();
        let name = compact_tokens(tokens.into_iter());
        let node = SyntaxNode::new(kind, children, Some(name), self.pos_offset());
        if !terminated {
            self.note(node.span, "declaration is missing ';'");
        }
        node
    }

    fn pos_offset(&self) -> usize {
        self.tokens.get(self.pos).map_or_else(
            || self.tokens.last().map_or(0, |t| t.span.end),
            |t| t.span.start,
        )
    }

    /// Consume an unrecognized region: up to a `;` or a closed brace group at
    /// depth zero, or (when `stop_at_close`) just before an unmatched `}`.
    fn token_run(&mut self, stop_at_close: bool, note: Option<&str>) -> SyntaxNode {
        let mut children = Vec::new();
        let mut depth = 0usize;
        while let Some(t) = self.peek().cloned() {
            if stop_at_close && depth == 0 && t.is_punct("}") && !children.is_empty() {
                break;
            }
            self.bump(&mut children);
            if t.kind != TokenKind::Punct {
                continue;
            }
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" => depth = depth.saturating_sub(1),
                "}" => {
                    depth = depth.saturating_sub(1);
                    if depth == 0 {
                        break;
                    }
                }
                ";" if depth == 0 => break,
                _ => {}
            }
        }
        let node = SyntaxNode::new(NodeKind::TokenRun, children, None, self.pos_offset());
        if let Some(msg) = note {
            self.note(node.span, msg);
        }
        node
    }

    fn modifiers(&mut self, out: &mut Vec<Element>) -> Parsed<()> {
        let end = self.skip_modifiers(self.sig_cursor());
        while self.sig_cursor() < end {
            self.bump(out);
        }
        Ok(())
    }

    fn bump_angle(&mut self, out: &mut Vec<Element>) -> Parsed<()> {
        let close = self.match_angle(self.sig_cursor()).ok_or(())?;
        while self.sig_cursor() <= close {
            self.bump(out);
        }
        Ok(())
    }

    fn type_ref(&mut self, out: &mut Vec<Element>) -> Parsed<()> {
        let end = self.scan_type(self.sig_cursor()).ok_or(())?;
        out.extend(self.take_trivia());
        let mut children = Vec::new();
        while self.sig_cursor() < end {
            self.bump(&mut children);
        }
        out.push(Element::Node(SyntaxNode::new(
            NodeKind::TypeRefText,
            children,
            None,
            self.pos_offset(),
        )));
        Ok(())
    }

    fn dims(&mut self, out: &mut Vec<Element>) {
        while self.peek_is_punct("[") && self.peek_nth(1).is_some_and(|t| t.is_punct("]")) {
            self.bump(out);
            self.bump(out);
        }
    }

    fn class_decl(&mut self, mut children: Vec<Element>) -> Parsed<SyntaxNode> {
        self.modifiers(&mut children)?;
        if !self.peek_is_keyword("class") {
            return Err(());
        }
        self.bump(&mut children);
        let name = self.expect_ident(&mut children)?;
        if self.peek_is_punct("<") {
            self.bump_angle(&mut children)?;
        }
        loop {
            let Some(t) = self.peek().cloned() else {
                return Err(());
            };
            if t.is_punct("{") {
                break;
            }
            let is_list = t.is_keyword("implements") || (t.is_ident() && t.text == "permits");
            if t.is_keyword("extends") || is_list {
                self.bump(&mut children);
                self.type_ref(&mut children)?;
                while is_list && self.peek_is_punct(",") {
                    self.bump(&mut children);
                    self.type_ref(&mut children)?;
                }
            } else {
                return Err(());
            }
        }
        children.extend(self.take_trivia());
        let body = self.class_body(&name);
        children.push(Element::Node(body));
        Ok(SyntaxNode::new(
            NodeKind::ClassDecl,
            children,
            Some(name),
            self.pos_offset(),
        ))
    }

    fn class_body(&mut self, class_name: &str) -> SyntaxNode {
        let mut children = Vec::new();
        self.bump(&mut children);
        let open = children[0].span();
        loop {
            let pending = self.take_trivia();
            let Some(t) = self.peek().cloned() else {
                children.extend(pending);
                let end = children.last().map_or(open.end, |c| c.span().end);
                self.note(Span::new(open.start, end), "class body is not closed");
                break;
            };
            if t.is_punct("}") {
                children.extend(pending);
                self.bump(&mut children);
                break;
            }
            let (outer, leading) = split_attached_doc(pending);
            children.extend(outer);
            self.member(class_name, leading, &mut children);
        }
        SyntaxNode::new(NodeKind::Body, children, None, self.pos_offset())
    }

    fn member(&mut self, class_name: &str, leading: Vec<Element>, out: &mut Vec<Element>) {
        let shape = self.classify_member(class_name);
        let cp = self.checkpoint();
        let attempt = match shape {
            Shape::Class => self.class_decl(leading.clone()),
            Shape::Method { ctor } => self.method_decl(leading.clone(), ctor),
            Shape::Field => self.field_decl(leading.clone()),
            Shape::Semicolon => {
                out.extend(leading);
                self.bump(out);
                return;
            }
            Shape::Initializer => {
                out.extend(leading);
                out.push(Element::Node(self.token_run(true, None)));
                return;
            }
            Shape::OtherType(_) | Shape::Unknown => Err(()),
        };
        match attempt {
            Ok(node) => out.push(Element::Node(node)),
            Err(()) => {
                self.rewind(cp);
                out.extend(leading);
                let msg = match shape {
                    Shape::OtherType(what) => format!("{what} declaration not analyzed"),
                    Shape::Class => "malformed class declaration".to_string(),
                    Shape::Method { .. } => "malformed method declaration".to_string(),
                    Shape::Field => "malformed field declaration".to_string(),
                    _ => "unrecognized class member".to_string(),
                };
                out.push(Element::Node(self.token_run(true, Some(&msg))));
            }
        }
    }

    fn method_decl(&mut self, mut children: Vec<Element>, ctor: bool) -> Parsed<SyntaxNode> {
        self.modifiers(&mut children)?;
        if self.peek_is_punct("<") {
            self.bump_angle(&mut children)?;
        }
        if !ctor {
            self.type_ref(&mut children)?;
        }
        let name = self.expect_ident(&mut children)?;
        self.expect_punct("(", &mut children)?;
        if !self.peek_is_punct(")") {
            loop {
                children.extend(self.take_trivia());
                let param = self.param()?;
                children.push(Element::Node(param));
                if self.peek_is_punct(",") {
                    self.bump(&mut children);
                } else {
                    break;
                }
            }
        }
        self.expect_punct(")", &mut children)?;
        self.dims(&mut children);
        if self.peek_is_keyword("throws") {
            self.bump(&mut children);
            self.type_ref(&mut children)?;
            while self.peek_is_punct(",") {
                self.bump(&mut children);
                self.type_ref(&mut children)?;
            }
        }
        if self.peek_is_punct("{") {
            children.extend(self.take_trivia());
            let body = self.block()?;
            children.push(Element::Node(body));
        } else {
            self.expect_punct(";", &mut children)?;
        }
        Ok(SyntaxNode::new(
            NodeKind::MethodDecl,
            children,
            Some(name),
            self.pos_offset(),
        ))
    }

    fn param(&mut self) -> Parsed<SyntaxNode> {
        let mut children = Vec::new();
        self.modifiers(&mut children)?;
        self.type_ref(&mut children)?;
        if self.peek_is_punct("...") {
            self.bump(&mut children);
        }
        let name = self.expect_ident(&mut children)?;
        self.dims(&mut children);
        Ok(SyntaxNode::new(
            NodeKind::Param,
            children,
            Some(name),
            self.pos_offset(),
        ))
    }

    /// A brace-balanced block kept as a flat token sequence.
    fn block(&mut self) -> Parsed<SyntaxNode> {
        let mut children = Vec::new();
        let mut depth = 0usize;
        loop {
            let t = self.bump(&mut children).ok_or(())?;
            if t.is_punct("{") {
                depth += 1;
            } else if t.is_punct("}") {
                depth -= 1;
                if depth == 0 {
                    break;
                }
            }
        }
        Ok(SyntaxNode::new(
            NodeKind::Body,
            children,
            None,
            self.pos_offset(),
        ))
    }

    fn field_decl(&mut self, mut children: Vec<Element>) -> Parsed<SyntaxNode> {
        self.modifiers(&mut children)?;
        self.type_ref(&mut children)?;
        let mut first = None;
        loop {
            let name = self.expect_ident(&mut children)?;
            first.get_or_insert(name);
            self.dims(&mut children);
            if self.peek_is_punct("=") {
                self.bump(&mut children);
                self.initializer(&mut children)?;
            }
            if self.peek_is_punct(",") {
                self.bump(&mut children);
                continue;
            }
            self.expect_punct(";", &mut children)?;
            break;
        }
        Ok(SyntaxNode::new(
            NodeKind::FieldDecl,
            children,
            first,
            self.pos_offset(),
        ))
    }

    fn initializer(&mut self, out: &mut Vec<Element>) -> Parsed<()> {
        let mut depth = 0usize;
        loop {
            let t = self.peek().ok_or(())?;
            if depth == 0 && (t.is_punct(",") || t.is_punct(";")) {
                return Ok(());
            }
            if t.kind == TokenKind::Punct {
                match t.text.as_str() {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => {
                        if depth == 0 {
                            return Err(());
                        }
                        depth -= 1;
                    }
                    _ => {}
                }
            }
            self.bump(out);
        }
    }
}

fn angle_inner_ok(t: &Token) -> bool {
    match t.kind {
        TokenKind::Identifier | TokenKind::Keyword => true,
        TokenKind::Punct => matches!(t.text.as_str(), "?" | "," | "." | "[" | "]" | "&" | "@"),
        _ => false,
    }
}

/// Split trailing `DocComment + whitespace` off the pending trivia so the
/// comment travels with the declaration that follows.
fn split_attached_doc(mut pending: Vec<Element>) -> (Vec<Element>, Vec<Element>) {
    let doc_at = pending.iter().rposition(|e| {
        e.as_token()
            .is_some_and(|t| t.kind != TokenKind::Whitespace)
    });
    match doc_at {
        Some(i)
            if pending[i]
                .as_token()
                .is_some_and(|t| t.kind == TokenKind::DocComment) =>
        {
            let leading = pending.split_off(i);
            (pending, leading)
        }
        _ => (pending, Vec::new()),
    }
}
