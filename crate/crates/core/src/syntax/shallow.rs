//! Shallow view of statement code: dotted-name chains, call argument lists
//! and local variable declarations. No expression grammar is built.

use super::{compact_tokens, Span, Token, TokenKind};

const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadKind {
    Ident,
    This,
    Super,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallArgs {
    pub open: Span,
    pub close: Span,
    /// One span per argument, trimmed to its significant tokens.
    pub args: Vec<Span>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub name: String,
    pub name_span: Span,
    pub dot_span: Span,
    pub call: Option<CallArgs>,
}

/// `head(.step)*`, e.g. `this.a.b`, `p.f(x).y`, `m(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub head_kind: HeadKind,
    pub head: String,
    pub head_span: Span,
    /// Set when the head itself is a call: `m(args)`.
    pub head_call: Option<CallArgs>,
    pub steps: Vec<Step>,
    /// Chain names a type (after `new`, before a declared name, ...).
    pub is_type: bool,
    /// `chain::name` method reference following the chain.
    pub method_ref: Option<(String, Span)>,
}

impl Chain {
    pub fn span(&self) -> Span {
        let mut end = self.head_span.end;
        if let Some(c) = &self.head_call {
            end = c.close.end;
        }
        if let Some(last) = self.steps.last() {
            end = last
                .call
                .as_ref()
                .map_or(last.name_span.end, |c| c.close.end);
        }
        Span::new(self.head_span.start, end)
    }

    /// Span of everything before step `i` (the receiver of that step).
    pub fn receiver_span(&self, i: usize) -> Span {
        let end = if i == 0 {
            self.head_call
                .as_ref()
                .map_or(self.head_span.end, |c| c.close.end)
        } else {
            let prev = &self.steps[i - 1];
            prev.call
                .as_ref()
                .map_or(prev.name_span.end, |c| c.close.end)
        };
        Span::new(self.head_span.start, end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDecl {
    pub name: String,
    pub name_span: Span,
    /// Declared type with trivia removed; empty for untyped lambda parameters.
    pub type_text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CodeView {
    pub chains: Vec<Chain>,
    pub locals: Vec<LocalDecl>,
}

impl CodeView {
    /// Local declared before `offset` with the given name (latest wins).
    pub fn local_before(&self, name: &str, offset: usize) -> Option<&LocalDecl> {
        self.locals
            .iter()
            .rfind(|l| l.name == name && l.name_span.start < offset)
    }
}

/// Analyze a token slice (typically a method body).
pub fn analyze<'a>(tokens: impl IntoIterator<Item = &'a Token>) -> CodeView {
    let sig: Vec<&Token> = tokens.into_iter().filter(|t| !t.is_trivia()).collect();
    Scanner { sig }.run()
}

struct Scanner<'a> {
    sig: Vec<&'a Token>,
}

impl<'a> Scanner<'a> {
    fn tok(&self, i: usize) -> Option<&'a Token> {
        self.sig.get(i).copied()
    }

    fn is(&self, i: usize, p: &str) -> bool {
        self.tok(i).is_some_and(|t| t.is_punct(p))
    }

    fn ident_at(&self, i: usize) -> bool {
        self.tok(i).is_some_and(|t| t.is_ident())
    }

    fn run(&self) -> CodeView {
        let mut view = CodeView::default();
        let mut declared = vec![false; self.sig.len()];
        for i in 0..self.sig.len() {
            if declared[i] {
                continue;
            }
            let t = self.sig[i];
            if t.kind == TokenKind::Keyword && PRIMITIVES.contains(&t.text.as_str()) {
                let after_dot = i > 0 && self.is(i - 1, ".");
                if !after_dot {
                    for (idx, local) in self.declaration_after(i, i + 1).unwrap_or_default() {
                        declared[idx] = true;
                        view.locals.push(local);
                    }
                }
                continue;
            }
            let head_kind = match t.kind {
                TokenKind::Identifier => HeadKind::Ident,
                TokenKind::Keyword if t.text == "this" => HeadKind::This,
                TokenKind::Keyword if t.text == "super" => HeadKind::Super,
                _ => continue,
            };
            let prev = i.checked_sub(1).and_then(|p| self.tok(p));
            if prev.is_some_and(|p| p.is_punct(".") || p.is_punct("::") || p.is_punct("@")) {
                continue;
            }
            if head_kind == HeadKind::Ident {
                if let Some(names) = self.lambda_params(i) {
                    for (idx, tok) in names {
                        declared[idx] = true;
                        view.locals.push(LocalDecl {
                            name: tok.text.clone(),
                            name_span: tok.span,
                            type_text: String::new(),
                        });
                    }
                    continue;
                }
            }
            let (mut chain, end) = self.chain(i, head_kind);
            if prev.is_some_and(|p| p.is_keyword("new") || p.is_keyword("instanceof")) {
                chain.is_type = true;
            }
            // `void run(` or `String name(`: a member declared in a nested class body.
            let declares = prev.is_some_and(|p| {
                (p.is_ident() && p.text != "yield")
                    || p.is_keyword("void")
                    || (p.kind == TokenKind::Keyword && PRIMITIVES.contains(&p.text.as_str()))
            });
            if declares && chain.head_call.is_some() && chain.steps.is_empty() {
                chain.is_type = true;
            }
            let plain = chain.head_call.is_none()
                && chain.steps.iter().all(|s| s.call.is_none())
                && chain.method_ref.is_none();
            if head_kind == HeadKind::Ident && plain && !chain.is_type && chain.head != "yield" {
                if let Some(decls) = self.declaration_after(i, end) {
                    chain.is_type = true;
                    for (idx, local) in decls {
                        declared[idx] = true;
                        view.locals.push(local);
                    }
                }
            }
            view.chains.push(chain);
        }
        view
    }

    fn chain(&self, i: usize, head_kind: HeadKind) -> (Chain, usize) {
        let t = self.sig[i];
        let mut j = i + 1;
        let head_call = if self.is(j, "(") {
            let (call, next) = self.call_args(j);
            j = next;
            call
        } else {
            None
        };
        let mut steps = Vec::new();
        while self.is(j, ".") && self.ident_at(j + 1) {
            let name_tok = self.sig[j + 1];
            let dot_span = self.sig[j].span;
            j += 2;
            let call = if self.is(j, "(") {
                let (call, next) = self.call_args(j);
                j = next;
                call
            } else {
                None
            };
            steps.push(Step {
                name: name_tok.text.clone(),
                name_span: name_tok.span,
                dot_span,
                call,
            });
        }
        let method_ref = if self.is(j, "::") {
            self.tok(j + 1)
                .filter(|n| n.is_ident() || n.is_keyword("new"))
                .map(|n| (n.text.clone(), n.span))
        } else {
            None
        };
        let chain = Chain {
            head_kind,
            head: t.text.clone(),
            head_span: t.span,
            head_call,
            steps,
            is_type: false,
            method_ref,
        };
        (chain, j)
    }

    /// Parse `( args )` starting at the open paren.
    fn call_args(&self, open: usize) -> (Option<CallArgs>, usize) {
        let mut depth = 0usize;
        let mut args = Vec::new();
        let mut arg_start: Option<usize> = None;
        let mut j = open;
        while let Some(t) = self.tok(j) {
            if t.kind == TokenKind::Punct {
                match t.text.as_str() {
                    "(" | "[" | "{" => {
                        depth += 1;
                        if depth == 1 {
                            j += 1;
                            continue;
                        }
                    }
                    ")" | "]" | "}" => {
                        depth = depth.saturating_sub(1);
                        if depth == 0 {
                            if let Some(s) = arg_start {
                                args.push(Span::new(
                                    self.sig[s].span.start,
                                    self.sig[j - 1].span.end,
                                ));
                            }
                            let call = CallArgs {
                                open: self.sig[open].span,
                                close: t.span,
                                args,
                            };
                            return (Some(call), j + 1);
                        }
                    }
                    "," if depth == 1 => {
                        if let Some(s) = arg_start.take() {
                            args.push(Span::new(self.sig[s].span.start, self.sig[j - 1].span.end));
                        }
                        j += 1;
                        continue;
                    }
                    _ => {}
                }
            }
            if arg_start.is_none() {
                arg_start = Some(j);
            }
            j += 1;
        }
        (None, open + 1)
    }

    /// `x ->` or `(a, b) ->` starting at identifier `i`.
    fn lambda_params(&self, i: usize) -> Option<Vec<(usize, &'a Token)>> {
        if self.is(i + 1, "->") {
            return Some(vec![(i, self.sig[i])]);
        }
        if !(i > 0 && self.is(i - 1, "(")) {
            return None;
        }
        let mut names = Vec::new();
        let mut j = i;
        loop {
            if !self.ident_at(j) {
                return None;
            }
            names.push((j, self.sig[j]));
            if self.is(j + 1, ",") {
                j += 2;
            } else if self.is(j + 1, ")") && self.is(j + 2, "->") {
                return Some(names);
            } else {
                return None;
            }
        }
    }

    /// Detect `Type name [= ...] (, name [= ...])*` where `Type` is the chain
    /// ending at `end`.
    fn declaration_after(&self, start: usize, end: usize) -> Option<Vec<(usize, LocalDecl)>> {
        let mut j = end;
        if self.is(j, "<") {
            j = self.angle_end(j)? + 1;
        }
        while self.is(j, "[") && self.is(j + 1, "]") {
            j += 2;
        }
        if self.is(j, "...") {
            j += 1;
        }
        if !self.ident_at(j) {
            return None;
        }
        let type_text = compact_tokens(self.sig[start..j].iter().copied());
        let mut out = vec![(
            j,
            LocalDecl {
                name: self.sig[j].text.clone(),
                name_span: self.sig[j].span,
                type_text: type_text.clone(),
            },
        )];
        // Further declarators: `, name` at depth zero before `;` or `)`.
        let mut depth = 0usize;
        let mut k = j + 1;
        while let Some(t) = self.tok(k) {
            if t.kind == TokenKind::Punct {
                match t.text.as_str() {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => {
                        if depth == 0 {
                            break;
                        }
                        depth -= 1;
                    }
                    ";" if depth == 0 => break,
                    ":" if depth == 0 => break,
                    "," if depth == 0 => {
                        if self.ident_at(k + 1)
                            && (self.is(k + 2, "=")
                                || self.is(k + 2, ",")
                                || self.is(k + 2, ";")
                                || self.is(k + 2, "["))
                        {
                            out.push((
                                k + 1,
                                LocalDecl {
                                    name: self.sig[k + 1].text.clone(),
                                    name_span: self.sig[k + 1].span,
                                    type_text: type_text.clone(),
                                },
                            ));
                        } else {
                            break;
                        }
                    }
                    _ => {}
                }
            }
            k += 1;
        }
        Some(out)
    }

    fn angle_end(&self, open: usize) -> Option<usize> {
        let mut depth = 0usize;
        let mut j = open;
        while let Some(t) = self.tok(j) {
            match (t.kind, t.text.as_str()) {
                (TokenKind::Punct, "<") => depth += 1,
                (TokenKind::Punct, ">") => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(j);
                    }
                }
                (TokenKind::Identifier | TokenKind::Keyword, _) => {}
                (TokenKind::Punct, "?" | "," | "." | "[" | "]" | "&") => {}
                _ => return None,
            }
            j += 1;
        }
        None
    }
}
