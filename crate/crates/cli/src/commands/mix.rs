use std::path::Path;

use abex_core::mix::{apply_mix, build_mix_plan};
use abex_core::penman::serialize_penman;
use abex_core::smatch::SimilarityMode;
use serde::Serialize;

use crate::corpus::{load_records, to_aug_records, write_jsonl};
use crate::error::{CliError, Result};

#[derive(Debug, Serialize)]
struct GraftLine {
    source_root: String,
    anchor_root: String,
    score: f64,
}

#[derive(Debug, Serialize)]
struct MixLine {
    id: String,
    partner_id: String,
    grafts: Vec<GraftLine>,
    mixed_amr: String,
}

/// Mixes the i-th graph of `partner` into the i-th graph of `source`,
/// without any editing.
pub fn run(source: &Path, partner: &Path, output: &Path, k: usize, mode: SimilarityMode) -> Result<()> {
    let a = to_aug_records(load_records(source)?)?;
    let b = to_aug_records(load_records(partner)?)?;
    if a.len() != b.len() {
        return Err(CliError::data(format!(
            "{} has {} records but {} has {}",
            source.display(),
            a.len(),
            partner.display(),
            b.len()
        )));
    }
    let mut lines = Vec::with_capacity(a.len());
    for (ra, rb) in a.iter().zip(&b) {
        let (Some(gi), Some(gk)) = (&ra.amr, &rb.amr) else {
            return Err(CliError::data(format!(
                "records `{}` and `{}` both need a graph",
                ra.id, rb.id
            )));
        };
        let plan = build_mix_plan(gi, gk, k, mode);
        let mixed = apply_mix(gi, gk, &plan).map_err(|e| CliError::data(e.to_string()))?;
        lines.push(MixLine {
            id: ra.id.clone(),
            partner_id: rb.id.clone(),
            grafts: plan
                .grafts
                .into_iter()
                .map(|g| GraftLine {
                    source_root: g.source_root,
                    anchor_root: g.anchor_root,
                    score: g.score,
                })
                .collect(),
            mixed_amr: serialize_penman(&mixed),
        });
    }
    write_jsonl(output, &lines)
}
