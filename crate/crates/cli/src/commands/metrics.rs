use std::collections::HashMap;
use std::path::{Path, PathBuf};

use abex_core::metrics::{DiversityMode, DiversityReport, DocumentAugs};

use crate::corpus::{load_records, read_text};
use crate::error::{CliError, Result};

/// Text of an augmentation line: `expanded_text`, else `text`, else
/// `abstract_text`.
const TEXT_FIELDS: [&str; 3] = ["expanded_text", "text", "abstract_text"];

struct Augmentation {
    source: String,
    text: String,
}

fn read_augmentations(path: &Path) -> Result<Vec<Augmentation>> {
    let mut out = Vec::new();
    for (n, line) in read_text(path)?.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let at = || format!("{}:{}", path.display(), n + 1);
        let value: serde_json::Value =
            serde_json::from_str(line).map_err(|e| CliError::data(format!("{}: {e}", at())))?;
        let field = |k: &str| value.get(k).and_then(|v| v.as_str());
        let id = field("id").ok_or_else(|| CliError::data(format!("{}: missing string `id`", at())))?;
        let source = field("source_id").unwrap_or(id).to_string();
        let text = TEXT_FIELDS
            .iter()
            .find_map(|k| field(k))
            .ok_or_else(|| CliError::data(format!("{}: record `{id}` has no text", at())))?
            .to_string();
        out.push(Augmentation { source, text });
    }
    Ok(out)
}

/// Writes the table to `output` and the JSON report to `output` + `.json`.
pub fn run(original: &Path, augmented: &Path, output: &Path, mode: DiversityMode) -> Result<DiversityReport> {
    let originals = load_records(original)?;
    let augs = read_augmentations(augmented)?;

    let index: HashMap<&str, usize> = originals.iter().enumerate().map(|(i, r)| (r.id.as_str(), i)).collect();
    let mut grouped: Vec<Vec<&str>> = vec![Vec::new(); originals.len()];
    for a in &augs {
        let i = *index.get(a.source.as_str()).ok_or_else(|| {
            CliError::data(format!(
                "augmentation source `{}` is not in {}",
                a.source,
                original.display()
            ))
        })?;
        grouped[i].push(&a.text);
    }
    let docs: Vec<DocumentAugs<'_>> = originals
        .iter()
        .zip(grouped)
        .filter(|(_, g)| !g.is_empty())
        .map(|(r, g)| DocumentAugs {
            id: &r.id,
            original: &r.text,
            augs: g,
        })
        .collect();
    let report = DiversityReport::compute(&docs, mode).map_err(|e| CliError::data(e.to_string()))?;

    std::fs::write(output, report.to_table()).map_err(|e| CliError::io(output, e))?;
    let json_path = json_sibling(output);
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::data(e.to_string()))?;
    std::fs::write(&json_path, json + "\n").map_err(|e| CliError::io(&json_path, e))?;
    Ok(report)
}

pub fn json_sibling(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}
