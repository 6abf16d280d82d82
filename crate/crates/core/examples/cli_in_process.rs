//! Drive the command-line interface from code, capturing its streams.

fn main() {
    let root = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/data/move/02-param-anchor-back-reference/before"
    );
    for args in [
        vec!["detect-envy", root, "--format", "json"],
        vec![
            "move-method",
            root,
            "--class",
            "C",
            "--method",
            "f",
            "--dry-run",
        ],
        vec!["metrics", "/no/such/dir"],
    ] {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = psilite::cli::run_with(args.clone(), &mut std::io::empty(), &mut out, &mut err);
        println!("$ psilite {}  -> exit {code}", args.join(" "));
        print!("{}", String::from_utf8_lossy(&out));
        print!("{}", String::from_utf8_lossy(&err));
    }
}
