//! Running a directory of problems and summarizing the outcome.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::batch;
use crate::parse::parse_system;
use crate::proof::ProofJson;
use crate::prover::{prove, MaybeReason, RunConfig, Verdict};
use crate::term::SystemKind;

/// Problem files in `dir` (`.trs` and `.srs`), sorted by file name.
pub fn problem_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if system_kind(&path).is_some() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// The kind of system a file holds, by extension.
pub fn system_kind(path: &Path) -> Option<SystemKind> {
    match path.extension()?.to_str()? {
        "trs" => Some(SystemKind::Term),
        "srs" => Some(SystemKind::String),
        _ => None,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub name: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub millis: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proof: Option<ProofJson>,
}

impl Entry {
    pub fn is_yes(&self) -> bool {
        self.verdict == "YES"
    }
}

#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct Summary {
    pub problems: usize,
    pub successes: usize,
    pub timeouts: usize,
    pub errors: usize,
    pub total_millis: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub entries: Vec<Entry>,
    pub summary: Summary,
}

/// Proves one file; errors become `ERROR` entries.
pub fn run_file(path: &Path, cfg: &RunConfig) -> Entry {
    let start = Instant::now();
    let name = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
    let result = (|| {
        let kind = system_kind(path).ok_or_else(|| "unknown file extension".to_string())?;
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let trs = parse_system(&text, kind).map_err(|e| e.to_string())?;
        let out = prove(&trs, cfg).map_err(|e| e.to_string())?;
        Ok::<_, String>((trs, out))
    })();
    let millis = start.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok((trs, out)) => match out.verdict {
            Verdict::Yes { proof, .. } => Entry {
                name,
                verdict: "YES".into(),
                reason: None,
                millis,
                proof: Some(ProofJson::new(&proof, trs.signature())),
            },
            Verdict::Maybe(r) => Entry {
                name,
                verdict: "MAYBE".into(),
                reason: Some(
                    match r {
                        MaybeReason::Unsat => "unsat",
                        MaybeReason::Timeout => "timeout",
                        MaybeReason::ConflictLimit => "conflict-limit",
                    }
                    .into(),
                ),
                millis,
                proof: None,
            },
        },
        Err(e) => Entry { name, verdict: "ERROR".into(), reason: Some(e), millis, proof: None },
    }
}

pub fn summarize(entries: &[Entry]) -> Summary {
    Summary {
        problems: entries.len(),
        successes: entries.iter().filter(|e| e.is_yes()).count(),
        timeouts: entries.iter().filter(|e| e.reason.as_deref() == Some("timeout")).count(),
        errors: entries.iter().filter(|e| e.verdict == "ERROR").count(),
        total_millis: entries.iter().map(|e| e.millis).sum(),
    }
}

/// Runs every problem of `dir`, in parallel when the feature is enabled.
pub fn run_corpus(dir: &Path, cfg: &RunConfig) -> std::io::Result<Report> {
    let files = problem_files(dir)?;
    let entries = batch::map(&files, |p| run_file(p, cfg));
    let summary = summarize(&entries);
    Ok(Report { entries, summary })
}

impl Report {
    /// Aligned text table with a summary row.
    pub fn to_text(&self) -> String {
        let width = self.entries.iter().map(|e| e.name.len()).max().unwrap_or(0).max(7);
        let mut out = String::new();
        writeln!(out, "{:<width$}  {:<6}  {:>10}  note", "problem", "result", "time(ms)").unwrap();
        for e in &self.entries {
            writeln!(
                out,
                "{:<width$}  {:<6}  {:>10.1}  {}",
                e.name,
                e.verdict,
                e.millis,
                e.reason.as_deref().unwrap_or("")
            )
            .unwrap();
        }
        let s = &self.summary;
        writeln!(
            out,
            "total time {:.1} ms, {} problems, {} successes, {} timeouts, {} errors",
            s.total_millis, s.problems, s.successes, s.timeouts, s.errors
        )
        .unwrap();
        out
    }
}
