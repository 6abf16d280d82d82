//! Identify a license file, or compare the built-in templates when no file
//! is given.
//!
//! cargo run --example classify_license -- LICENSE

use psilite::license::{classify_license, templates, DEFAULT_THRESHOLD};

fn main() {
    if let Some(path) = std::env::args().nth(1) {
        let bytes = std::fs::read(&path).expect("readable file");
        let m = classify_license(&String::from_utf8_lossy(&bytes), DEFAULT_THRESHOLD);
        println!("{path}: {}", m.to_text());
        println!("{}", m.to_json());
        return;
    }
    let ts = templates();
    for a in ts {
        for b in ts {
            print!("{:>14} ", format!("{:.4}", a.vector.cosine(&b.vector)));
        }
        println!("  {}", a.label);
    }
    let reworded = ts[2]
        .text
        .replace("<year> <copyright holders>", "2024 Jane Doe")
        .to_uppercase();
    println!(
        "reworded MIT: {}",
        classify_license(&reworded, DEFAULT_THRESHOLD).to_text()
    );
    println!(
        "prose: {}",
        classify_license(
            "Grant me the serenity to accept the things I cannot change.",
            DEFAULT_THRESHOLD
        )
        .to_text()
    );
}
