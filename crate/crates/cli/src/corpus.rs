//! Corpus files: JSON-Lines records or blank-line separated PENMAN blocks.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use abex_core::penman::parse_penman;
use abex_core::pipeline::AugRecord;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// One document on the wire.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusRecord {
    pub id: String,
    pub text: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tri: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Penman,
}

/// JSON-Lines when the first non-blank character opens an object.
pub fn detect(text: &str) -> Format {
    match text.trim_start().chars().next() {
        Some('{') => Format::Jsonl,
        _ => Format::Penman,
    }
}

/// A record as read, before validation.
#[derive(Debug, Clone)]
pub struct Entry {
    /// 1-based line where the record starts.
    pub line: usize,
    pub record: std::result::Result<CorpusRecord, String>,
}

pub fn read_entries(text: &str) -> Vec<Entry> {
    match detect(text) {
        Format::Jsonl => read_jsonl(text),
        Format::Penman => read_penman_blocks(text),
    }
}

fn read_jsonl(text: &str) -> Vec<Entry> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| Entry {
            line: n + 1,
            record: serde_json::from_str(l).map_err(|e| e.to_string()),
        })
        .collect()
}

fn read_penman_blocks(text: &str) -> Vec<Entry> {
    let mut entries = Vec::new();
    let mut block: Vec<(usize, &str)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            if !block.is_empty() {
                entries.extend(penman_block(&block, entries.len() + 1));
                block.clear();
            }
        } else {
            block.push((n + 1, line));
        }
    }
    if !block.is_empty() {
        entries.extend(penman_block(&block, entries.len() + 1));
    }
    entries
}

fn penman_block(lines: &[(usize, &str)], ordinal: usize) -> Option<Entry> {
    let mut id = None;
    let mut text = String::new();
    let mut label = String::new();
    let mut graph = Vec::new();
    for (_, line) in lines {
        let trimmed = line.trim_start();
        if let Some(meta) = trimmed.strip_prefix('#') {
            for field in meta.split("::").skip(1) {
                let (key, value) = field.split_once(char::is_whitespace).unwrap_or((field, ""));
                let value = value.trim().to_string();
                match key {
                    "id" => id = Some(value),
                    "snt" => text = value,
                    "label" => label = value,
                    _ => {}
                }
            }
        } else {
            graph.push(*line);
        }
    }
    if graph.is_empty() {
        return None;
    }
    Some(Entry {
        line: lines[0].0,
        record: Ok(CorpusRecord {
            id: id.unwrap_or_else(|| ordinal.to_string()),
            text,
            label,
            amr: Some(graph.join("\n")),
            tri: None,
        }),
    })
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Reads every record, failing on the first malformed one or on a
/// repeated id.
pub fn load_records(path: &Path) -> Result<Vec<CorpusRecord>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for entry in read_entries(&read_text(path)?) {
        let record = entry
            .record
            .map_err(|e| CliError::data(format!("{}:{}: {e}", path.display(), entry.line)))?;
        if !seen.insert(record.id.clone()) {
            return Err(CliError::data(format!(
                "{}:{}: duplicate id `{}`",
                path.display(),
                entry.line,
                record.id
            )));
        }
        out.push(record);
    }
    Ok(out)
}

/// Parses embedded graphs into pipeline records.
pub fn to_aug_records(records: Vec<CorpusRecord>) -> Result<Vec<AugRecord>> {
    records
        .into_iter()
        .map(|r| {
            let mut aug = AugRecord::new(r.id, r.text, r.label);
            if let Some(amr) = &r.amr {
                let g = parse_penman(amr).map_err(|e| CliError::data(format!("record `{}`: {e}", aug.id)))?;
                aug.amr = Some(g);
            }
            aug.tri = r.tri;
            Ok(aug)
        })
        .collect()
}

/// Opens `path` for writing; `-` is standard output.
pub fn create_output(path: &Path) -> Result<Box<dyn Write>> {
    if path == Path::new("-") {
        return Ok(Box::new(BufWriter::new(std::io::stdout().lock())));
    }
    let f = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(Box::new(BufWriter::new(f)))
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut out = create_output(path)?;
    for item in items {
        let line = serde_json::to_string(item).map_err(|e| CliError::data(e.to_string()))?;
        writeln!(out, "{line}").map_err(|e| CliError::io(path, e))?;
    }
    out.flush().map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_format() {
        assert_eq!(detect("  \n{\"id\":1}"), Format::Jsonl);
        assert_eq!(detect("(a / b)"), Format::Penman);
        assert_eq!(detect(""), Format::Penman);
    }

    #[test]
    fn penman_blocks_with_metadata() {
        let text = "# ::id d1 ::snt The boy left.\n(l / leave-11\n   :ARG0 (b / boy))\n\n\n(x / thing)\n";
        let e = read_entries(text);
        assert_eq!(e.len(), 2);
        let r0 = e[0].record.as_ref().unwrap();
        assert_eq!(r0.id, "d1");
        assert_eq!(r0.text, "The boy left.");
        assert_eq!(r0.amr.as_deref(), Some("(l / leave-11\n   :ARG0 (b / boy))"));
        assert_eq!(e[1].line, 6);
        assert_eq!(e[1].record.as_ref().unwrap().id, "2");
    }

    #[test]
    fn jsonl_lines_are_independent() {
        let text = "{\"id\":\"a\",\"text\":\"t\",\"label\":\"l\"}\n\n{\"id\":\"b\"}\n";
        let e = read_entries(text);
        assert_eq!(e.len(), 2);
        assert!(e[0].record.is_ok());
        assert!(e[1].record.is_err());
        assert_eq!(e[1].line, 3);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let e = read_entries("{\"id\":\"a\",\"text\":\"t\",\"label\":\"l\",\"lable\":\"x\"}");
        assert!(e[0].record.is_err());
    }
}
