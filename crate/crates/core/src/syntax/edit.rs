use thiserror::Error;

use super::Span;

/// Replace the bytes at `span` (in the original text) with `replacement`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextEdit {
    pub span: Span,
    pub replacement: String,
}

impl TextEdit {
    pub fn new(span: Span, replacement: impl Into<String>) -> Self {
        Self {
            span,
            replacement: replacement.into(),
        }
    }

    pub fn insert(offset: usize, text: impl Into<String>) -> Self {
        Self::new(Span::empty_at(offset), text)
    }

    pub fn delete(span: Span) -> Self {
        Self::new(span, "")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EditError {
    #[error("edits overlap at {first} and {second}")]
    OverlappingEdits { first: Span, second: Span },
    #[error("edit span {span} is outside the text (length {len})")]
    OutOfBounds { span: Span, len: usize },
}

/// Apply a batch of edits as if simultaneously; all spans refer to `source`.
///
/// Insertions at the same offset keep their batch order. An insertion at the
/// boundary of a replacement does not overlap it.
pub fn apply_edits(source: &str, edits: &[TextEdit]) -> Result<String, EditError> {
    for edit in edits {
        let Span { start, end } = edit.span;
        if start > end
            || end > source.len()
            || !source.is_char_boundary(start)
            || !source.is_char_boundary(end)
        {
            return Err(EditError::OutOfBounds {
                span: edit.span,
                len: source.len(),
            });
        }
    }
    let mut order: Vec<&TextEdit> = edits.iter().collect();
    order.sort_by_key(|e| (e.span.start, e.span.end));
    for pair in order.windows(2) {
        let (a, b) = (pair[0].span, pair[1].span);
        if a.intersects(b) {
            return Err(EditError::OverlappingEdits {
                first: a,
                second: b,
            });
        }
    }
    let mut out = String::with_capacity(source.len());
    let mut cursor = 0;
    for edit in order {
        out.push_str(&source[cursor..edit.span.start]);
        out.push_str(&edit.replacement);
        cursor = edit.span.end;
    }
    out.push_str(&source[cursor..]);
    Ok(out)
}
