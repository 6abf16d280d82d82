//! Parse a Java file, print its outline and confirm the tree renders back
//! to the exact input.
//!
//! cargo run --example parse_roundtrip -- path/to/File.java

use psilite::syntax::{parse_file, render, NodeKind, SyntaxNode};

const SAMPLE: &str = r#"package demo;

import java.util.List;

/** A tiny class. */
public class Sample {
    private int count;

    public Sample(int count) { this.count = count; }

    int total(List<Integer> xs) {
        int t = count;
        for (int x : xs) t += x;
        return t;
    }
}

enum Mode { ON, OFF }
"#;

fn outline(node: &SyntaxNode, depth: usize) {
    if node.kind != NodeKind::File {
        let name = node.name.as_deref().unwrap_or("");
        println!(
            "{:indent$}{:?} {name} [{}]",
            "",
            node.kind,
            node.span,
            indent = depth * 2
        );
    }
    for child in node.child_nodes() {
        if matches!(child.kind, NodeKind::TypeRefText | NodeKind::Param) {
            continue;
        }
        outline(child, depth + 1);
    }
}

fn main() {
    let (path, source) = match std::env::args().nth(1) {
        Some(p) => {
            let text = std::fs::read_to_string(&p).expect("readable file");
            (p, text)
        }
        None => ("Sample.java".to_string(), SAMPLE.to_string()),
    };
    let tree = parse_file(&source, &path);
    outline(&tree.root, 0);
    for note in &tree.parse_notes {
        println!(
            "note {}:{}: {}",
            path,
            tree.line_of(note.span.start),
            note.message
        );
    }
    let lossless = render(&tree) == source;
    println!("{} tokens, lossless: {lossless}", tree.root.tokens().len());
}
