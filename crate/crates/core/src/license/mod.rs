//! Recognize Apache-2.0, BSD-3-Clause and MIT license texts by cosine
//! similarity against embedded canonical templates.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::report::to_json;

pub const DEFAULT_THRESHOLD: f64 = 0.90;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LicenseLabel {
    Apache2,
    Bsd3Clause,
    Mit,
    Unknown,
}

impl LicenseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            LicenseLabel::Apache2 => "Apache-2.0",
            LicenseLabel::Bsd3Clause => "BSD-3-Clause",
            LicenseLabel::Mit => "MIT",
            LicenseLabel::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for LicenseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for LicenseLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub label: LicenseLabel,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LicenseMatch {
    pub label: LicenseLabel,
    pub score: f64,
    pub runner_up: Candidate,
}

impl LicenseMatch {
    /// `LABEL (score=0.NNNN)`
    pub fn to_text(&self) -> String {
        format!("{} (score={:.4})", self.label, self.score)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// Unit-length term-frequency vector.
#[derive(Debug, Clone, Default)]
pub struct TermVector(HashMap<String, f64>);

impl TermVector {
    pub fn from_tokens(tokens: &[String]) -> Self {
        let mut counts: HashMap<String, f64> = HashMap::new();
        for t in tokens {
            *counts.entry(t.clone()).or_default() += 1.0;
        }
        let norm = counts.values().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.0 {
            counts.values_mut().for_each(|c| *c /= norm);
        }
        TermVector(counts)
    }

    pub fn norm(&self) -> f64 {
        self.0.values().map(|w| w * w).sum::<f64>().sqrt()
    }

    pub fn cosine(&self, other: &TermVector) -> f64 {
        let (small, large) = if self.0.len() <= other.0.len() {
            (self, other)
        } else {
            (other, self)
        };
        let dot: f64 = small
            .0
            .iter()
            .filter_map(|(k, w)| large.0.get(k).map(|v| w * v))
            .fold(0.0, |acc, x| acc + x);
        dot.clamp(0.0, 1.0)
    }
}

#[derive(Debug)]
pub struct CanonicalTemplate {
    pub label: LicenseLabel,
    pub text: &'static str,
    pub vector: TermVector,
}

const SOURCES: [(LicenseLabel, &str); 3] = [
    (
        LicenseLabel::Apache2,
        include_str!("templates/apache-2.0.txt"),
    ),
    (
        LicenseLabel::Bsd3Clause,
        include_str!("templates/bsd-3-clause.txt"),
    ),
    (LicenseLabel::Mit, include_str!("templates/mit.txt")),
];

pub fn templates() -> &'static [CanonicalTemplate] {
    static TEMPLATES: OnceLock<Vec<CanonicalTemplate>> = OnceLock::new();
    TEMPLATES.get_or_init(|| {
        SOURCES
            .iter()
            .map(|&(label, text)| CanonicalTemplate {
                label,
                text,
                vector: TermVector::from_tokens(&normalize_license(text)),
            })
            .collect()
    })
}

fn has_year(line: &str) -> bool {
    let mut run = 0;
    for c in line.chars() {
        run = if c.is_ascii_digit() { run + 1 } else { 0 };
        if run == 4 {
            return true;
        }
    }
    false
}

fn is_copyright_line(line: &str) -> bool {
    line.contains("copyright (c)") || (line.contains("copyright") && has_year(line))
}

/// Lowercase, drop copyright lines, and split on anything that is not
/// alphanumeric.
pub fn normalize_license(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    lower
        .lines()
        .filter(|line| !is_copyright_line(line))
        .flat_map(|line| line.split(|c: char| !c.is_alphanumeric()))
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn classify_license(text: &str, threshold: f64) -> LicenseMatch {
    let input = TermVector::from_tokens(&normalize_license(text));
    let mut scored: Vec<Candidate> = templates()
        .iter()
        .map(|t| Candidate {
            label: t.label,
            score: input.cosine(&t.vector),
        })
        .collect();
    // Stable sort keeps template order on equal scores.
    scored.sort_by(|a, b| b.score.total_cmp(&a.score));
    let best = scored[0];
    let runner_up = scored[1];
    LicenseMatch {
        label: if best.score >= threshold {
            best.label
        } else {
            LicenseLabel::Unknown
        },
        score: best.score,
        runner_up,
    }
}
