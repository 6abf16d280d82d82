use super::{Span, Token, TokenKind};

const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "false",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "null",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "true",
    "try",
    "void",
    "volatile",
    "while",
];

// `>>` and `>>>` are never fused so that nested generic closers stay separate.
const PUNCTS: &[&str] = &[
    "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=",
    "/=", "%=", "&=", "|=", "^=", "<<", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@", "=", ">",
    "<", "!", "~", "?", ":", "+", "-", "*", "/", "&", "|", "^", "%",
];

pub(crate) fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

fn is_space(c: char) -> bool {
    matches!(c, ' ' | '\t' | '\n' | '\r' | '\x0C')
}

/// Split `source` into tokens covering every byte exactly once.
///
/// Never fails: bytes that fit no lexical rule become [`TokenKind::Unknown`].
pub fn tokenize(source: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < source.len() {
        let (kind, len) = next_token(&source[pos..]);
        debug_assert!(len > 0);
        let span = Span::new(pos, pos + len);
        tokens.push(Token {
            kind,
            text: source[pos..pos + len].to_string(),
            span,
        });
        pos += len;
    }
    tokens
}

fn next_token(rest: &str) -> (TokenKind, usize) {
    let c = rest.chars().next().expect("non-empty input");
    let bytes = rest.as_bytes();

    if is_space(c) {
        let len = rest.find(|ch| !is_space(ch)).unwrap_or(rest.len());
        return (TokenKind::Whitespace, len);
    }
    if rest.starts_with("//") {
        let len = rest.find(['\n', '\r']).unwrap_or(rest.len());
        return (TokenKind::LineComment, len);
    }
    if let Some(after) = rest.strip_prefix("/*") {
        return match after.find("*/") {
            Some(i) => {
                let len = i + 4;
                // `/**/` is an empty block comment, not a doc comment.
                let kind = if rest.starts_with("/**") && len >= 5 {
                    TokenKind::DocComment
                } else {
                    TokenKind::BlockComment
                };
                (kind, len)
            }
            None => (TokenKind::Unknown, rest.len()),
        };
    }
    if rest.starts_with("\"\"\"") {
        return text_block(rest);
    }
    if c == '"' || c == '\'' {
        return quoted(rest, c);
    }
    if c.is_ascii_digit() || (c == '.' && bytes.get(1).is_some_and(u8::is_ascii_digit)) {
        return (TokenKind::Number, number_len(rest));
    }
    if is_ident_start(c) {
        let len = rest
            .char_indices()
            .find(|&(_, ch)| !is_ident_continue(ch))
            .map_or(rest.len(), |(i, _)| i);
        let kind = if is_keyword(&rest[..len]) {
            TokenKind::Keyword
        } else {
            TokenKind::Identifier
        };
        return (kind, len);
    }
    if let Some(p) = PUNCTS.iter().find(|p| rest.starts_with(**p)) {
        return (TokenKind::Punct, p.len());
    }
    (TokenKind::Unknown, c.len_utf8())
}

fn quoted(rest: &str, quote: char) -> (TokenKind, usize) {
    let kind = if quote == '"' {
        TokenKind::String
    } else {
        TokenKind::Char
    };
    let mut chars = rest.char_indices().skip(1);
    while let Some((i, ch)) = chars.next() {
        match ch {
            '\\' => {
                chars.next();
            }
            '\n' | '\r' => return (TokenKind::Unknown, i),
            _ if ch == quote => return (kind, i + 1),
            _ => {}
        }
    }
    (TokenKind::Unknown, rest.len())
}

fn text_block(rest: &str) -> (TokenKind, usize) {
    let mut i = 3;
    let bytes = rest.as_bytes();
    while i < bytes.len() {
        if bytes[i] == b'\\' {
            i += 2;
            continue;
        }
        if bytes[i..].starts_with(b"\"\"\"") {
            return (TokenKind::String, i + 3);
        }
        i += 1;
    }
    (TokenKind::Unknown, rest.len())
}

fn number_len(rest: &str) -> usize {
    let bytes = rest.as_bytes();
    let hex = rest.starts_with("0x") || rest.starts_with("0X");
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_alphanumeric() || b == b'_' || b == b'.' {
            i += 1;
            continue;
        }
        if (b == b'+' || b == b'-') && i > 0 {
            let prev = bytes[i - 1];
            let exp = if hex {
                matches!(prev, b'p' | b'P')
            } else {
                matches!(prev, b'e' | b'E' | b'p' | b'P')
            };
            if exp {
                i += 1;
                continue;
            }
        }
        break;
    }
    i
}
