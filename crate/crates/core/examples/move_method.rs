//! Plan a Move Method refactoring, show the diff, then apply it in memory.

use std::collections::BTreeMap;
use std::path::PathBuf;

use psilite::model::build_model;
use psilite::movemethod::{
    check_preconditions, envied_target, execute_with, plan_move, preview, select,
};
use psilite::syntax::parse_file;

fn main() {
    let sources: BTreeMap<PathBuf, &str> = BTreeMap::from([
        (
            PathBuf::from("Canvas.java"),
            "class Canvas {\n    int scale;\n\n    int width(Rect r) {\n        return (r.right - r.left) * scale + r.border;\n    }\n\n    int layout(Rect a) {\n        return width(a) + 1;\n    }\n}\n",
        ),
        (
            PathBuf::from("Rect.java"),
            "class Rect {\n    int left;\n    int right;\n    int border;\n}\n",
        ),
    ]);
    let trees = sources
        .iter()
        .map(|(p, s)| parse_file(s, PathBuf::from("/demo").join(p)))
        .collect();
    let model = build_model(trees, "/demo").unwrap();

    let (class, method) = select(&model, "Canvas", "width").unwrap();
    let target = envied_target(&model, class, method).unwrap();
    println!("target: {target}");

    let violations = check_preconditions(&model, class, method, &target);
    for v in &violations {
        println!("{v}");
    }
    // Asking for a class with no anchor shows what a refusal looks like.
    for v in check_preconditions(&model, class, method, "Canvas") {
        println!("refused: {v}");
    }

    let plan = plan_move(&model, class, method, &target).unwrap();
    println!("{plan}");
    print!("{}", preview(&plan, &model).unwrap());

    let rewritten = execute_with(&plan, |p| Ok(sources[p].to_string())).unwrap();
    for (path, text) in rewritten {
        println!("== {}\n{text}", path.display());
    }
}
