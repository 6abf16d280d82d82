//! Fixture loaders and the checks shared by the integration targets.
#![allow(dead_code)]


use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use psilite::envy::{detect_feature_envy, Counting};
use psilite::model::{build_model, ProjectModel};
use psilite::movemethod::{envied_target, execute, plan_move, select, MoveError};
use psilite::syntax::{parse_file, render, Element, SyntaxNode, SyntaxTree};

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

/// Outcome of one acceptance criterion.
#[derive(Debug)]
pub struct Verdict {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!("{status} {}: {}", self.name, self.detail)
    }
}

/// Every file below `dir` with the given extension, sorted.
pub fn files_with_ext(dir: &Path, ext: &str) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == ext) {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

/// Parse every Java file under `root` into a model rooted there.
pub fn load_model(root: &Path) -> ProjectModel {
    let trees = files_with_ext(root, "java")
        .into_iter()
        .map(|p| parse_file(&fs::read_to_string(&p).unwrap(), p))
        .collect();
    build_model(trees, root).unwrap()
}

/// Project from in-memory sources; paths are relative to `/p`.
pub fn model_of(files: &[(String, String)]) -> ProjectModel {
    let trees = files
        .iter()
        .map(|(p, s)| parse_file(s, Path::new("/p").join(p)))
        .collect();
    build_model(trees, "/p").unwrap()
}

/// Copy a directory tree.
pub fn copy_tree(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let p = entry.unwrap().path();
        let dest = to.join(p.file_name().unwrap());
        if p.is_dir() {
            copy_tree(&p, &dest);
        } else {
            fs::copy(&p, &dest).unwrap();
        }
    }
}

/// Snapshot of all files under `root`, keyed by relative path.
pub fn snapshot(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(
                    p.strip_prefix(root).unwrap().to_path_buf(),
                    fs::read(&p).unwrap(),
                );
            }
        }
    }
    out
}

/// `key=value` lines.
pub fn read_case(path: &Path) -> BTreeMap<String, String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

fn check_partition(node: &SyntaxNode) -> Result<(), String> {
    let mut at = node.span.start;
    for child in &node.children {
        let span = child.span();
        if span.start != at {
            return Err(format!(
                "gap or overlap at byte {at} inside {:?}",
                node.kind
            ));
        }
        at = span.end;
        if let Element::Node(n) = child {
            check_partition(n)?;
        }
    }
    if !node.children.is_empty() && at != node.span.end {
        return Err(format!(
            "children of {:?} stop at {at}, node ends at {}",
            node.kind, node.span.end
        ));
    }
    Ok(())
}

/// Tree invariants: leaves render the source and children tile their parent.
pub fn check_tree(tree: &SyntaxTree) -> Result<(), String> {
    if render(tree) != tree.source {
        return Err("rendering differs from the source".into());
    }
    if tree.root.span.start != 0 || tree.root.span.end != tree.source.len() {
        return Err("root does not cover the file".into());
    }
    check_partition(&tree.root)
}

pub struct CorpusRun {
    pub files: usize,
    pub failures: Vec<String>,
    pub noted_files: usize,
    pub elapsed: Duration,
}

pub fn roundtrip_corpus() -> CorpusRun {
    let paths = files_with_ext(&data_dir().join("corpus"), "java");
    let sources: Vec<(PathBuf, String)> = paths
        .iter()
        .map(|p| (p.clone(), fs::read_to_string(p).unwrap()))
        .collect();
    let started = Instant::now();
    let trees: Vec<SyntaxTree> = sources
        .iter()
        .map(|(p, s)| parse_file(s, p.clone()))
        .collect();
    let elapsed = started.elapsed();
    let mut failures = Vec::new();
    for tree in &trees {
        if let Err(e) = check_tree(tree) {
            failures.push(format!("{}: {e}", tree.path.display()));
        }
    }
    CorpusRun {
        files: trees.len(),
        failures,
        noted_files: trees.iter().filter(|t| !t.parse_notes.is_empty()).count(),
        elapsed,
    }
}

pub fn criterion_roundtrip() -> Verdict {
    let run = roundtrip_corpus();
    let passed =
        run.files >= 100 && run.failures.is_empty() && run.elapsed < Duration::from_secs(5);
    let mut detail = format!(
        "{} files byte-identical, {} with parse notes, parsed in {:.3}s (limit 5s)",
        run.files - run.failures.len(),
        run.noted_files,
        run.elapsed.as_secs_f64()
    );
    for f in run.failures.iter().take(3) {
        detail.push_str(&format!("; {f}"));
    }
    Verdict {
        name: "round-trip",
        passed,
        detail,
    }
}

pub fn move_cases() -> Vec<PathBuf> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(data_dir().join("move"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    dirs
}

/// Run one golden case in a scratch copy. The target comes from detection
/// unless the case names one.
pub fn run_move_case(dir: &Path) -> Result<(), String> {
    let case = read_case(&dir.join("case.txt"));
    let class = &case["class"];
    let method = &case["method"];
    let scratch = tempfile::tempdir().unwrap();
    copy_tree(&dir.join("before"), scratch.path());
    let model = load_model(scratch.path());
    let before_notes: usize = model.files.values().map(|t| t.parse_notes.len()).sum();
    let (c, m) = select(&model, class, method).map_err(|e| e.to_string())?;
    let target = match case.get("target") {
        Some(t) => t.clone(),
        None => envied_target(&model, c, m).map_err(|e| e.to_string())?,
    };
    let plan = plan_move(&model, c, m, &target).map_err(|e| match e {
        MoveError::Preconditions(v) => v
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; "),
        other => other.to_string(),
    })?;
    let outputs = execute(&plan, &model).map_err(|e| e.to_string())?;
    for (rel, text) in &outputs {
        fs::write(scratch.path().join(rel), text).unwrap();
    }

    let expected = snapshot(&dir.join("after"));
    let mut actual = snapshot(scratch.path());
    actual.retain(|k, _| expected.contains_key(k) || outputs.contains_key(k));
    for (rel, want) in &expected {
        match actual.get(rel) {
            Some(got) if got == want => {}
            Some(got) => {
                return Err(format!(
                    "{} differs from the golden:\n{}",
                    rel.display(),
                    String::from_utf8_lossy(got)
                ))
            }
            None => return Err(format!("{} missing", rel.display())),
        }
    }
    for rel in outputs.keys() {
        if !expected.contains_key(rel) {
            return Err(format!("{} was rewritten but has no golden", rel.display()));
        }
    }

    let after = load_model(scratch.path());
    let after_notes: usize = after.files.values().map(|t| t.parse_notes.len()).sum();
    if after_notes > before_notes {
        return Err(format!(
            "parse notes grew from {before_notes} to {after_notes}"
        ));
    }
    let lingering = detect_feature_envy(&after, Counting::Distinct)
        .into_iter()
        .any(|f| f.method == *method && (f.class == *class || f.class == target));
    if lingering {
        return Err(format!("{method} is still reported as envious"));
    }
    Ok(())
}

pub fn criterion_move_goldens() -> Verdict {
    let cases = move_cases();
    let failures: Vec<String> = cases
        .iter()
        .filter_map(|d| {
            run_move_case(d)
                .err()
                .map(|e| format!("{}: {e}", d.file_name().unwrap().to_string_lossy()))
        })
        .collect();
    let mut detail = format!(
        "{}/{} golden moves match, reparse clean, envy cleared",
        cases.len() - failures.len(),
        cases.len()
    );
    for f in failures.iter().take(3) {
        detail.push_str(&format!("; {f}"));
    }
    Verdict {
        name: "move-method goldens",
        passed: cases.len() >= 10 && failures.is_empty(),
        detail,
    }
}

pub const ENVY_CASES: u64 = 1500;

pub fn criterion_envy_oracle() -> Verdict {
    let mut mismatches = Vec::new();
    let mut findings = 0;
    for seed in 0..ENVY_CASES {
        let p = envy_oracle::generate(seed);
        let (files, _) = envy_oracle::render(&p);
        let model = model_of(&files);
        let mut got: Vec<_> = detect_feature_envy(&model, Counting::Distinct)
            .into_iter()
            .map(|f| envy_oracle::Expected {
                class: f.class,
                method: f.method,
                line: f.line,
                target: f.target,
                own: f.own_count,
                target_count: f.target_count,
            })
            .collect();
        got.sort();
        let want = envy_oracle::expected(&p, false);
        findings += want.len();
        if got != want {
            mismatches.push(seed);
        }
    }
    Verdict {
        name: "feature-envy oracle",
        passed: mismatches.is_empty(),
        detail: format!(
            "{}/{ENVY_CASES} random projects agree with brute force ({findings} findings); mismatched seeds {:?}",
            ENVY_CASES as usize - mismatches.len(),
            &mismatches[..mismatches.len().min(5)]
        ),
    }
}

pub fn precondition_cases() -> Vec<PathBuf> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(data_dir().join("preconditions"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    dirs.sort();
    dirs
}

/// Codes reported for one fixture next to the code it expects.
pub fn run_precondition_case(dir: &Path) -> (Vec<String>, Option<String>) {
    let case = read_case(&dir.join("case.txt"));
    let model = load_model(dir);
    let (c, m) = select(&model, &case["class"], &case["method"]).unwrap();
    let got = psilite::movemethod::check_preconditions(&model, c, m, &case["target"])
        .iter()
        .map(|v| v.code.to_string())
        .collect();
    let want = case.get("expect").filter(|e| !e.is_empty()).cloned();
    (got, want)
}

pub fn criterion_preconditions() -> Verdict {
    let mut seen = std::collections::BTreeSet::new();
    let mut failures = Vec::new();
    let mut eligible_ok = false;
    for dir in precondition_cases() {
        let name = dir.file_name().unwrap().to_string_lossy().to_string();
        let (got, want) = run_precondition_case(&dir);
        match want {
            Some(code) => {
                if got == [code.clone()] {
                    seen.insert(code);
                } else {
                    failures.push(format!("{name}: expected [{code}], got {got:?}"));
                }
            }
            None if got.is_empty() => {
                let case = read_case(&dir.join("case.txt"));
                let model = load_model(&dir);
                let (c, m) = select(&model, &case["class"], &case["method"]).unwrap();
                match plan_move(&model, c, m, &case["target"]) {
                    Ok(_) => eligible_ok = true,
                    Err(e) => failures.push(format!("{name}: eligible but planning failed: {e}")),
                }
            }
            None => failures.push(format!("{name}: expected no violations, got {got:?}")),
        }
    }
    let all = psilite::movemethod::ViolationCode::ALL.len();
    let mut detail = format!(
        "{}/{all} violation codes reported alone by their fixtures, eligible fixture {}",
        seen.len(),
        if eligible_ok {
            "plans"
        } else {
            "does not plan"
        }
    );
    for f in &failures {
        detail.push_str(&format!("; {f}"));
    }
    Verdict {
        name: "move-method preconditions",
        passed: failures.is_empty() && eligible_ok && seen.len() == all,
        detail,
    }
}

/// Every license fixture with the label its directory names.
pub fn license_fixtures() -> Vec<(String, PathBuf)> {
    let root = data_dir().join("licenses");
    let mut out = Vec::new();
    for dir in ["MIT", "Apache-2.0", "BSD-3-Clause", "unknown"] {
        let label = if dir == "unknown" { "Unknown" } else { dir };
        let mut files: Vec<PathBuf> = fs::read_dir(root.join(dir))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        out.extend(files.into_iter().map(|p| (label.to_string(), p)));
    }
    out
}

pub fn criterion_licenses() -> Verdict {
    use psilite::license::{classify_license, DEFAULT_THRESHOLD};
    let mut wrong = Vec::new();
    let (mut variants, mut others) = (0, 0);
    let mut best_unknown: f64 = 0.0;
    let mut worst_known: f64 = 1.0;
    for (label, path) in license_fixtures() {
        let text = String::from_utf8_lossy(&fs::read(&path).unwrap()).into_owned();
        let m = classify_license(&text, DEFAULT_THRESHOLD);
        if label == "Unknown" {
            others += 1;
            best_unknown = best_unknown.max(m.score);
        } else {
            variants += 1;
            worst_known = worst_known.min(m.score);
        }
        if m.label.as_str() != label {
            wrong.push(format!(
                "{}: {} expected {label}",
                path.file_name().unwrap().to_string_lossy(),
                m.to_text()
            ));
        }
    }
    let ts = psilite::license::templates();
    for t in ts {
        let m = classify_license(t.text, DEFAULT_THRESHOLD);
        if m.label != t.label || (m.score - 1.0).abs() > 1e-9 {
            wrong.push(format!("template {} self-scores {}", t.label, m.to_text()));
        }
    }
    let mut max_pair: f64 = 0.0;
    for (i, a) in ts.iter().enumerate() {
        for b in &ts[i + 1..] {
            max_pair = max_pair.max(a.vector.cosine(&b.vector));
        }
    }
    if max_pair >= DEFAULT_THRESHOLD {
        wrong.push(format!("templates too similar: {max_pair:.4}"));
    }
    let mut detail = format!(
        "templates self-score 1.0 (max pairwise {max_pair:.4}); {variants} license variants and {others} other documents labelled correctly at threshold {DEFAULT_THRESHOLD:.2} (lowest match {worst_known:.4}, highest non-license {best_unknown:.4})"
    );
    for w in &wrong {
        detail.push_str(&format!("; {w}"));
    }
    Verdict {
        name: "license classification",
        passed: wrong.is_empty() && variants >= 10 && others >= 20,
        detail,
    }
}

/// Run the CLI in-process with empty stdin; returns (code, stdout, stderr).
pub fn cli<S: AsRef<str>>(args: &[S]) -> (i32, String, String) {
    cli_with_input(args, &mut std::io::empty())
}

pub fn cli_with_input<S: AsRef<str>>(
    args: &[S],
    input: &mut dyn std::io::BufRead,
) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv: Vec<String> = args.iter().map(|a| a.as_ref().to_string()).collect();
    let code = psilite::cli::run_with(argv, input, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

/// A documented method as a line scanner sees it: (path, name, line, text).
pub type ScannedDoc = (String, String, usize, String);

/// Find `/** ... */` blocks followed by something that looks like a method
/// header, without any parsing.
pub fn scan_docs(root: &Path) -> Vec<ScannedDoc> {
    let mut out = Vec::new();
    for path in files_with_ext(root, "java") {
        let rel = path
            .strip_prefix(root)
            .unwrap()
            .components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join("/");
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        let mut i = 0;
        while i < lines.len() {
            let Some(start) = lines[i].trim_start().strip_prefix("/**") else {
                i += 1;
                continue;
            };
            let mut raw = vec![start.to_string()];
            let mut j = i;
            while !raw.last().unwrap().contains("*/") {
                j += 1;
                raw.push(lines[j].to_string());
            }
            let last = raw.pop().unwrap();
            raw.push(last[..last.find("*/").unwrap()].to_string());
            let mut k = j + 1;
            while lines[k].trim().is_empty() {
                k += 1;
            }
            let header_line = k + 1;
            while lines[k].trim_start().starts_with('@') {
                k += 1;
            }
            let header = lines[k];
            let looks_like_method = header.contains('(')
                && !header.contains(" class ")
                && !header[..header.find('(').unwrap()].contains('=');
            if looks_like_method {
                let before = header[..header.find('(').unwrap()].trim_end();
                let name = before
                    .rsplit(|c: char| !c.is_alphanumeric() && c != '_')
                    .next()
                    .unwrap();
                let cleaned: Vec<String> = raw
                    .iter()
                    .map(|l| {
                        let l = l.trim_start();
                        let l = l.strip_prefix('*').unwrap_or(l);
                        l.strip_prefix(' ').unwrap_or(l).trim_end().to_string()
                    })
                    .collect();
                let body = cleaned.join("\n").trim_matches('\n').to_string();
                if !body.is_empty() {
                    out.push((rel.clone(), name.to_string(), header_line, body));
                }
            }
            i = j + 1;
        }
    }
    out.sort();
    out
}

pub fn criterion_miner() -> Verdict {
    use psilite::docminer::extract_docs;
    let root = data_dir().join("miner/project");
    let model = load_model(&root);
    let methods: usize = model.classes.values().map(|c| c.methods.len()).sum();
    let records = extract_docs(&model);
    let mut problems = Vec::new();

    let got: Vec<ScannedDoc> = {
        let mut v: Vec<ScannedDoc> = records
            .iter()
            .map(|r| (r.path.clone(), r.method.clone(), r.line, r.javadoc.clone()))
            .collect();
        v.sort();
        v
    };
    if got != scan_docs(&root) {
        problems.push("records differ from the line scanner".to_string());
    }
    let golden: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(data_dir().join("miner/expected.json")).unwrap())
            .unwrap();
    if serde_json::to_value(&records).unwrap() != golden {
        problems.push("records differ from the golden file".to_string());
    }

    let scratch = tempfile::tempdir().unwrap();
    let root_arg = root.to_string_lossy().to_string();
    let mut outputs = Vec::new();
    for (run, jobs) in ["1", "8", "1", "8", "3"].iter().enumerate() {
        let out = scratch.path().join(format!("docs-{run}.json"));
        let (code, _, err) = cli(&[
            "--jobs",
            jobs,
            "mine-docs",
            &root_arg,
            "--out",
            &out.to_string_lossy(),
        ]);
        if code != 0 {
            problems.push(format!("mine-docs exited {code}: {err}"));
            break;
        }
        outputs.push(fs::read(&out).unwrap());
    }
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    if !identical {
        problems.push("output bytes vary with --jobs".to_string());
    }
    if let Some(first) = outputs.first() {
        let text = String::from_utf8_lossy(first);
        if !text.ends_with("}\n") || text.trim_end().contains('\n') {
            problems.push("output is not one JSON line ending in a newline".to_string());
        }
    }
    Verdict {
        name: "javadoc miner",
        passed: problems.is_empty() && methods == 12 && records.len() == 7,
        detail: format!(
            "{}/{methods} methods documented, matches golden and line scanner, {} runs across --jobs 1/3/8 byte-identical{}",
            records.len(),
            outputs.len(),
            problems.iter().map(|p| format!("; {p}")).collect::<String>()
        ),
    }
}

/// Hand tallies: file -> [(class, fields, methods, loc)].
pub fn metrics_expectations() -> BTreeMap<String, Vec<(String, usize, usize, usize)>> {
    let mut out: BTreeMap<String, Vec<_>> = BTreeMap::new();
    let text = fs::read_to_string(data_dir().join("metrics/expected.txt")).unwrap();
    for line in text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
    {
        let f: Vec<&str> = line.split_whitespace().collect();
        out.entry(f[0].to_string()).or_default().push((
            f[1].to_string(),
            f[2].parse().unwrap(),
            f[3].parse().unwrap(),
            f[4].parse().unwrap(),
        ));
    }
    out
}

/// Metrics of a single file parsed on its own.
pub fn file_metrics(path: &Path) -> Vec<(String, usize, usize, usize)> {
    let tree = parse_file(&fs::read_to_string(path).unwrap(), path.to_path_buf());
    let model = build_model(vec![tree], path.parent().unwrap()).unwrap();
    psilite::metrics::project_metrics(&model)
        .into_iter()
        .map(|r| (r.class, r.fields, r.methods, r.loc))
        .collect()
}

pub fn criterion_metrics() -> Verdict {
    let expected = metrics_expectations();
    let mut wrong = Vec::new();
    let mut classes = 0;
    for (file, want) in &expected {
        let mut got = file_metrics(&data_dir().join("metrics").join(file));
        let mut want = want.clone();
        got.sort();
        want.sort();
        classes += want.len();
        if got != want {
            wrong.push(format!("{file}: expected {want:?}, got {got:?}"));
        }
    }
    Verdict {
        name: "metrics",
        passed: wrong.is_empty() && expected.len() >= 10,
        detail: format!(
            "{}/{} fixtures ({classes} classes) match hand tallies{}",
            expected.len() - wrong.len(),
            expected.len(),
            wrong.iter().map(|w| format!("; {w}")).collect::<String>()
        ),
    }
}

/// Run the built binary with `stdin` piped in.
pub fn bin(args: &[&str], stdin: &str) -> (i32, String, String) {
    use std::io::Write;
    use std::process::{Command, Stdio};
    let mut child = Command::new(env!("CARGO_BIN_EXE_psilite"))
        .args(args)
        .env_remove(psilite::cli::JOBS_ENV)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

/// Confirmation input that edits a file on disk just before answering,
/// like a concurrent editor would.
pub struct EditingInput {
    answer: std::io::Cursor<Vec<u8>>,
    pending: Option<(PathBuf, String)>,
}

impl EditingInput {
    pub fn new(answer: &str, path: PathBuf, new_text: String) -> Self {
        Self {
            answer: std::io::Cursor::new(answer.as_bytes().to_vec()),
            pending: Some((path, new_text)),
        }
    }
}

impl std::io::Read for EditingInput {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        use std::io::BufRead;
        let n = {
            let avail = self.fill_buf()?;
            let n = avail.len().min(buf.len());
            buf[..n].copy_from_slice(&avail[..n]);
            n
        };
        self.consume(n);
        Ok(n)
    }
}

impl std::io::BufRead for EditingInput {
    fn fill_buf(&mut self) -> std::io::Result<&[u8]> {
        if let Some((path, text)) = self.pending.take() {
            fs::write(path, text)?;
        }
        self.answer.fill_buf()
    }

    fn consume(&mut self, amt: usize) {
        self.answer.consume(amt)
    }
}

/// A scratch project holding the back-reference move fixture.
pub fn move_project() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    copy_tree(
        &data_dir().join("move/02-param-anchor-back-reference/before"),
        dir.path(),
    );
    dir
}

pub struct ContractCase {
    pub name: &'static str,
    pub code: i32,
    pub result: Result<(), String>,
}

fn expect(
    name: &'static str,
    want: i32,
    got: (i32, String, String),
    extra: Result<(), String>,
) -> ContractCase {
    let result = if got.0 != want {
        Err(format!("exit {} (stderr: {})", got.0, got.2.trim()))
    } else {
        extra
    };
    ContractCase {
        name,
        code: want,
        result,
    }
}

fn ensure(ok: bool, msg: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

/// End-to-end exit-code table for every subcommand.
pub fn contract_cases() -> Vec<ContractCase> {
    let mut cases = Vec::new();
    let scratch = tempfile::tempdir().unwrap();
    let missing = scratch.path().join("missing");
    let missing = missing.to_str().unwrap();
    let miner = data_dir().join("miner/project");
    let miner = miner.to_str().unwrap();
    let broken = tempfile::tempdir().unwrap();
    fs::copy(
        data_dir().join("corpus/authored/Broken.java"),
        broken.path().join("Broken.java"),
    )
    .unwrap();
    fs::copy(
        data_dir().join("metrics/01-empty.java"),
        broken.path().join("Empty.java"),
    )
    .unwrap();
    let broken = broken.path().to_str().unwrap().to_string();
    let license = data_dir().join("licenses/MIT/bytes.txt");
    let license = license.to_str().unwrap();

    // global
    cases.push(expect("no arguments", 1, bin(&[], ""), Ok(())));
    cases.push(expect(
        "unknown subcommand",
        1,
        bin(&["frobnicate"], ""),
        Ok(()),
    ));
    let help = bin(&["--help"], "");
    let has_all = [
        "mine-docs",
        "metrics",
        "detect-envy",
        "move-method",
        "classify-license",
    ]
    .iter()
    .all(|c| help.1.contains(c));
    cases.push(expect(
        "--help",
        0,
        help,
        ensure(has_all, "help lists every subcommand"),
    ));
    cases.push(expect(
        "--jobs 0",
        1,
        bin(&["--jobs", "0", "metrics", miner], ""),
        Ok(()),
    ));

    // mine-docs
    let out = scratch.path().join("docs.json");
    let run = bin(&["mine-docs", miner, "--out", out.to_str().unwrap()], "");
    let written = fs::read_to_string(&out).unwrap_or_default();
    cases.push(expect(
        "mine-docs",
        0,
        run,
        ensure(written.contains("\"records\": ["), "docs file written"),
    ));
    cases.push(expect(
        "mine-docs missing root",
        2,
        bin(&["mine-docs", missing, "--out", out.to_str().unwrap()], ""),
        Ok(()),
    ));
    cases.push(expect(
        "mine-docs unwritable output",
        2,
        bin(
            &[
                "mine-docs",
                miner,
                "--out",
                &format!("{missing}/x/docs.json"),
            ],
            "",
        ),
        Ok(()),
    ));
    cases.push(expect(
        "mine-docs without --out",
        1,
        bin(&["mine-docs", miner], ""),
        Ok(()),
    ));
    cases.push(expect(
        "mine-docs --strict on parse notes",
        2,
        bin(
            &[
                "--strict",
                "mine-docs",
                &broken,
                "--out",
                out.to_str().unwrap(),
            ],
            "",
        ),
        Ok(()),
    ));

    // metrics
    let run = bin(&["metrics", miner], "");
    let table_ok = run.1.starts_with("CLASS") && run.1.contains("lib.Ledger");
    cases.push(expect(
        "metrics table",
        0,
        run,
        ensure(table_ok, "table on stdout"),
    ));
    let run = bin(&["metrics", miner, "--format", "json"], "");
    let json_ok = serde_json::from_str::<serde_json::Value>(&run.1).is_ok();
    cases.push(expect(
        "metrics json",
        0,
        run,
        ensure(json_ok, "valid JSON on stdout"),
    ));
    cases.push(expect(
        "metrics missing root",
        2,
        bin(&["metrics", missing], ""),
        Ok(()),
    ));
    cases.push(expect(
        "metrics bad format",
        1,
        bin(&["metrics", miner, "--format", "xml"], ""),
        Ok(()),
    ));
    let run = bin(&["metrics", &broken], "");
    let summary_ok = run.2.contains("1 with parse notes");
    cases.push(expect(
        "metrics tolerates parse notes",
        0,
        run,
        ensure(summary_ok, "summary counts noted files"),
    ));
    cases.push(expect(
        "metrics --strict on parse notes",
        2,
        bin(&["--strict", "metrics", &broken], ""),
        Ok(()),
    ));

    // detect-envy
    let project = move_project();
    let root = project.path().to_str().unwrap().to_string();
    let run = bin(&["detect-envy", &root], "");
    let found = run
        .1
        .lines()
        .nth(1)
        .is_some_and(|l| l.starts_with("C ") && l.contains("parameter d"));
    cases.push(expect(
        "detect-envy table",
        0,
        run,
        ensure(found, "finding for C.f"),
    ));
    let run = bin(
        &[
            "detect-envy",
            &root,
            "--format",
            "json",
            "--counting",
            "occurrences",
        ],
        "",
    );
    let json_ok =
        serde_json::from_str::<serde_json::Value>(&run.1).is_ok_and(|v| v[0]["target"] == "D");
    cases.push(expect(
        "detect-envy json occurrences",
        0,
        run,
        ensure(json_ok, "JSON finding targets D"),
    ));
    let run = bin(&["detect-envy", miner, "--format", "json"], "");
    let empty = run.1 == "[]\n";
    cases.push(expect(
        "detect-envy no findings",
        0,
        run,
        ensure(empty, "empty JSON array"),
    ));
    cases.push(expect(
        "detect-envy missing root",
        2,
        bin(&["detect-envy", missing], ""),
        Ok(()),
    ));
    cases.push(expect(
        "detect-envy bad counting",
        1,
        bin(&["detect-envy", &root, "--counting", "weighted"], ""),
        Ok(()),
    ));

    // move-method
    let before = snapshot(project.path());
    let unchanged = |what: &str| ensure(snapshot(project.path()) == before, what);
    let args = |extra: &[&'static str]| {
        let mut v = vec![
            "move-method".to_string(),
            root.clone(),
            "--class".into(),
            "C".into(),
            "--method".into(),
            "f".into(),
        ];
        v.extend(extra.iter().map(|s| s.to_string()));
        v
    };
    let call = |extra: &[&'static str], stdin: &str| {
        let a = args(extra);
        let refs: Vec<&str> = a.iter().map(String::as_str).collect();
        bin(&refs, stdin)
    };
    let run = call(&["--dry-run"], "");
    let diff_ok = run.1.contains("--- a/C.java") && run.1.contains("+    void f(C self) {");
    cases.push(expect(
        "move-method --dry-run",
        0,
        run,
        unchanged("dry run leaves files").and(ensure(diff_ok, "diff printed")),
    ));
    let run = call(&["--apply"], "n\n");
    let prompted = run.2.contains("Move C.f to D? [y/N]");
    cases.push(expect(
        "move-method prompt answered n",
        0,
        run,
        unchanged("answer n leaves files").and(ensure(prompted, "prompt shown")),
    ));
    cases.push(expect(
        "move-method prompt at end of input",
        0,
        call(&["--apply"], ""),
        unchanged("no answer leaves files"),
    ));
    cases.push(expect(
        "move-method --yes without --apply",
        1,
        call(&["--yes"], ""),
        unchanged("usage error leaves files"),
    ));
    cases.push(expect(
        "move-method both modes",
        1,
        call(&["--dry-run", "--apply"], ""),
        unchanged("usage error leaves files"),
    ));
    cases.push(expect(
        "move-method no mode",
        1,
        call(&[], ""),
        unchanged("usage error leaves files"),
    ));
    let run = bin(
        &[
            "move-method",
            &root,
            "--class",
            "Nope",
            "--method",
            "f",
            "--dry-run",
        ],
        "",
    );
    cases.push(expect(
        "move-method unknown class",
        1,
        run,
        unchanged("files untouched"),
    ));
    let run = bin(
        &[
            "move-method",
            &root,
            "--class",
            "C",
            "--method",
            "nope",
            "--dry-run",
        ],
        "",
    );
    cases.push(expect(
        "move-method unknown method",
        1,
        run,
        unchanged("files untouched"),
    ));
    let run = bin(
        &[
            "move-method",
            &root,
            "--class",
            "U",
            "--method",
            "run",
            "--apply",
            "--yes",
        ],
        "",
    );
    cases.push(expect(
        "move-method without envy or target",
        3,
        run,
        unchanged("files untouched"),
    ));
    let run = call(&["--target", "U", "--apply", "--yes"], "");
    let listed = run.2.contains("NoAnchor");
    cases.push(expect(
        "move-method precondition violation",
        3,
        run,
        unchanged("files untouched").and(ensure(listed, "violation code listed")),
    ));
    cases.push(expect(
        "move-method missing root",
        2,
        bin(
            &[
                "move-method",
                missing,
                "--class",
                "C",
                "--method",
                "f",
                "--dry-run",
            ],
            "",
        ),
        Ok(()),
    ));

    // stale sources between planning and confirmation
    let d_path = project.path().join("D.java");
    let edited = "class D {\n    int x;\n    int y;\n    int z;\n    int w;\n}\n".to_string();
    let mut input = EditingInput::new("y\n", d_path.clone(), edited.clone());
    let run = cli_with_input(&args(&["--apply"]), &mut input);
    let kept = fs::read_to_string(&d_path).unwrap() == edited
        && fs::read(project.path().join("C.java")).unwrap() == before[Path::new("C.java")];
    cases.push(expect(
        "move-method stale sources",
        4,
        run,
        ensure(kept, "concurrent edit kept, nothing written"),
    ));
    fs::write(&d_path, &before[Path::new("D.java")]).unwrap();

    let run = call(&["--apply"], "y\n");
    let golden = snapshot(&data_dir().join("move/02-param-anchor-back-reference/after"));
    let applied = snapshot(project.path()) == golden;
    cases.push(expect(
        "move-method prompt answered y",
        0,
        run,
        ensure(applied, "files match the golden"),
    ));
    let second = move_project();
    let a = [
        "move-method",
        second.path().to_str().unwrap(),
        "--class",
        "C",
        "--method",
        "f",
        "--target",
        "D",
        "--apply",
        "--yes",
    ];
    let run = bin(&a, "");
    let applied = snapshot(second.path()) == golden;
    cases.push(expect(
        "move-method --apply --yes",
        0,
        run,
        ensure(applied, "files match the golden"),
    ));
    let dup = tempfile::tempdir().unwrap();
    fs::write(
        dup.path().join("A.java"),
        "class C { void f(D d) { d.x = 1; } }\nclass D { int x; }\n",
    )
    .unwrap();
    fs::write(dup.path().join("B.java"), "class C { }\n").unwrap();
    let run = bin(
        &[
            "move-method",
            dup.path().to_str().unwrap(),
            "--class",
            "C",
            "--method",
            "f",
            "--dry-run",
        ],
        "",
    );
    cases.push(expect("move-method duplicate class name", 2, run, Ok(())));

    // classify-license
    let run = bin(&["classify-license", license], "");
    let text_ok = run.1.starts_with("MIT (score=0.");
    cases.push(expect(
        "classify-license text",
        0,
        run,
        ensure(text_ok, "label and score"),
    ));
    let run = bin(&["classify-license", license, "--format", "json"], "");
    let json_ok =
        serde_json::from_str::<serde_json::Value>(&run.1).is_ok_and(|v| v["label"] == "MIT");
    cases.push(expect(
        "classify-license json",
        0,
        run,
        ensure(json_ok, "JSON label"),
    ));
    let readme = data_dir().join("licenses/unknown/memchr-COPYING.txt");
    let run = bin(&["classify-license", readme.to_str().unwrap()], "");
    let unknown = run.1.starts_with("Unknown");
    cases.push(expect(
        "classify-license unknown text",
        0,
        run,
        ensure(unknown, "Unknown label"),
    ));
    cases.push(expect(
        "classify-license missing file",
        2,
        bin(&["classify-license", missing], ""),
        Ok(()),
    ));
    cases.push(expect(
        "classify-license bad threshold",
        1,
        bin(&["classify-license", license, "--threshold", "2"], ""),
        Ok(()),
    ));
    cases
}

pub fn criterion_cli() -> Verdict {
    let cases = contract_cases();
    let failed: Vec<String> = cases
        .iter()
        .filter_map(|c| {
            c.result
                .as_ref()
                .err()
                .map(|e| format!("{} (want {}): {e}", c.name, c.code))
        })
        .collect();
    let codes: std::collections::BTreeSet<i32> = cases.iter().map(|c| c.code).collect();
    Verdict {
        name: "cli contract",
        passed: failed.is_empty() && codes.len() == 5,
        detail: format!(
            "{}/{} end-to-end cases exit as specified, codes covered {codes:?}{}",
            cases.len() - failed.len(),
            cases.len(),
            failed.iter().map(|f| format!("; {f}")).collect::<String>()
        ),
    }
}
