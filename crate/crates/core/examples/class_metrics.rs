//! Field, method and line counts for every class in a project.
//!
//! cargo run --example class_metrics -- path/to/project [json]

use std::path::PathBuf;

use psilite::cli::discover_sources;
use psilite::metrics::{metrics_report, project_metrics, Format};
use psilite::model::build_model;
use psilite::syntax::parse_file;

fn main() {
    let mut args = std::env::args().skip(1);
    let root = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/corpus/react-native-svg")
    });
    let format = match args.next().as_deref() {
        Some("json") => Format::Json,
        _ => Format::Table,
    };
    let trees = discover_sources(&root)
        .expect("readable project")
        .into_iter()
        .filter_map(|p| Some(parse_file(&std::fs::read_to_string(&p).ok()?, p)))
        .collect();
    let model = build_model(trees, &root).expect("unique class names");
    println!("{}", metrics_report(&project_metrics(&model), format));
}
