//! Collect method Javadocs from a source tree and print the JSON document.
//!
//! cargo run --example mine_docs -- path/to/project

use std::path::PathBuf;

use psilite::cli::discover_sources;
use psilite::docminer::{docs_json, extract_docs};
use psilite::model::build_model;
use psilite::syntax::parse_file;

fn main() {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/miner/project")
        });
    let trees = discover_sources(&root)
        .expect("readable project")
        .into_iter()
        .map(|p| parse_file(&std::fs::read_to_string(&p).expect("utf-8 source"), p))
        .collect();
    let model = build_model(trees, &root).expect("unique class names");
    let records = extract_docs(&model);
    for r in &records {
        println!("{}:{} {} {}", r.path, r.line, r.class, r.signature);
    }
    print!("{}", docs_json(&records, &root.to_string_lossy()));
}
