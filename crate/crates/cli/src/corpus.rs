//! Regression corpus: one curve per line, `p n f-coeffs [expected-json]`.
//! Blank lines and lines starting with # are skipped.

use std::path::{Path, PathBuf};

use crate::commands::{cmd_classify, Options};
use crate::report::Report;
use crate::spec::CurveSpec;
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    pub line: usize,
    pub spec: CurveSpec,
    pub expected: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Match,
    /// The first differing report lines.
    Differs(String),
    /// No expected report to compare with.
    Unchecked,
    Failed(String),
}

pub fn parse_corpus(text: &str, dir: &Path) -> Result<Vec<CorpusEntry>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if !(3..=4).contains(&toks.len()) {
            return Err(CliError::Parse(format!("corpus line {}: expected `p n f-coeffs [expected-json]`", i + 1)));
        }
        let num = |s: &str, what: &str| {
            s.parse::<u64>().map_err(|_| CliError::Parse(format!("corpus line {}: bad {what} {s:?}", i + 1)))
        };
        let spec = CurveSpec::parse(num(toks[0], "p")?, num(toks[1], "n")? as usize, None, toks[2])
            .map_err(|e| CliError::Parse(format!("corpus line {}: {e}", i + 1)))?;
        out.push(CorpusEntry { line: i + 1, spec, expected: toks.get(3).map(|p| dir.join(p)) });
    }
    Ok(out)
}

fn first_difference(a: &str, b: &str) -> String {
    for (i, (x, y)) in a.lines().zip(b.lines()).enumerate() {
        if x != y {
            return format!("line {}: expected {:?}, got {:?}", i + 1, x.trim(), y.trim());
        }
    }
    "reports differ in length".into()
}

/// Runs classify on every entry. With `update`, missing or differing
/// expected reports are rewritten.
pub fn run_corpus(entries: &[CorpusEntry], opts: &Options, update: bool) -> Vec<(usize, Outcome)> {
    entries
        .iter()
        .map(|e| {
            let outcome = match cmd_classify(&e.spec, opts) {
                Err(err) => Outcome::Failed(err.to_string()),
                Ok(r) => compare(&r, e.expected.as_deref(), update),
            };
            (e.line, outcome)
        })
        .collect()
}

fn compare(r: &Report, expected: Option<&Path>, update: bool) -> Outcome {
    let got = r.to_json();
    let Some(path) = expected else { return Outcome::Unchecked };
    let want = std::fs::read_to_string(path).ok();
    match want {
        Some(w) if w.trim_end() == got => Outcome::Match,
        _ if update => match std::fs::write(path, got + "\n") {
            Ok(()) => Outcome::Match,
            Err(e) => Outcome::Failed(e.to_string()),
        },
        Some(w) => Outcome::Differs(first_difference(&w, &got)),
        None => Outcome::Failed(format!("missing expected report {}", path.display())),
    }
}
