use std::collections::HashSet;
use std::path::Path;

use abex_core::penman::{parse_penman, serialize_penman};

use crate::corpus::{read_entries, read_text, write_jsonl, CorpusRecord};
use crate::error::{CliError, Result};

/// Validates every record and writes the valid ones with normalized,
/// single-line graphs. Invalid records are reported on stderr.
pub fn run(input: &Path, output: &Path) -> Result<()> {
    let entries = read_entries(&read_text(input)?);
    let total = entries.len();
    let mut seen = HashSet::new();
    let mut good: Vec<CorpusRecord> = Vec::new();
    let mut bad = 0usize;
    for entry in entries {
        let at = format!("{}:{}", input.display(), entry.line);
        let mut record = match entry.record {
            Ok(r) => r,
            Err(e) => {
                eprintln!("{at}: {e}");
                bad += 1;
                continue;
            }
        };
        if !seen.insert(record.id.clone()) {
            eprintln!("{at}: duplicate id `{}`", record.id);
            bad += 1;
            continue;
        }
        if let Some(amr) = &record.amr {
            match parse_penman(amr) {
                Ok(g) => record.amr = Some(serialize_penman(&g)),
                Err(e) => {
                    eprintln!("{at}: record `{}`: {e}", record.id);
                    bad += 1;
                    continue;
                }
            }
        }
        good.push(record);
    }
    write_jsonl(output, &good)?;
    if bad > 0 {
        return Err(CliError::data(format!("{bad} of {total} records are invalid")));
    }
    Ok(())
}
