use std::path::PathBuf;

use abex_core::mix::{EmbeddingTable, LexicalProvider, SimilarityProvider};
use abex_core::penman::serialize_penman;
use abex_core::pipeline::run_pipeline;
use serde::Serialize;

use crate::config::Config;
use crate::corpus::{load_records, to_aug_records, write_jsonl};
use crate::error::{CliError, Result};

#[derive(Debug, Clone)]
pub struct AbstractOptions {
    pub input: PathBuf,
    pub output: PathBuf,
    pub config: Option<PathBuf>,
    pub no_mix: bool,
    pub seed: Option<u64>,
    pub rounds: Option<usize>,
}

#[derive(Debug, Serialize)]
struct OutputLine<'a> {
    id: String,
    source_id: &'a str,
    round: usize,
    label: &'a str,
    abstract_amr: String,
    mixed: bool,
    partner_id: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    abstract_text: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expanded_text: Option<&'a str>,
}

pub fn run(opts: &AbstractOptions) -> Result<()> {
    let mut config = Config::load_or_default(opts.config.as_deref())?;
    if opts.no_mix {
        config.edit.mix = false;
    }
    if let Some(seed) = opts.seed {
        config.edit.seed = seed;
    }
    if let Some(rounds) = opts.rounds {
        config.edit.rounds = rounds;
    }
    config.edit.validate().map_err(|e| CliError::data(e.to_string()))?;

    let records = to_aug_records(load_records(&opts.input)?)?;
    let provider: Box<dyn SimilarityProvider> = match &config.embeddings {
        Some(path) => {
            Box::new(EmbeddingTable::load(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?)
        }
        None => Box::new(LexicalProvider),
    };
    let adapters = config.adapters()?;
    let result = run_pipeline(records, &config.edit, &adapters, provider.as_ref(), config.workers)
        .map_err(|e| CliError::data(e.to_string()))?;

    let lines: Vec<OutputLine<'_>> = result
        .records
        .iter()
        .flat_map(|r| {
            r.outputs.iter().map(move |o| OutputLine {
                id: format!("{}#{}", r.id, o.round),
                source_id: &r.id,
                round: o.round,
                label: &r.label,
                abstract_amr: serialize_penman(&o.graph),
                mixed: o.mixed,
                partner_id: o.partner_id.as_deref(),
                abstract_text: o.abstract_text.as_deref(),
                expanded_text: o.expanded_text.as_deref(),
            })
        })
        .collect();
    write_jsonl(&opts.output, &lines)?;
    log::info!("{} records, {} augmentations", result.records.len(), lines.len());

    if !result.failures.is_empty() {
        for f in &result.failures {
            match f.round {
                Some(round) => eprintln!("record `{}` round {round} ({:?}): {}", f.id, f.stage, f.message),
                None => eprintln!("record `{}` ({:?}): {}", f.id, f.stage, f.message),
            }
        }
        return Err(CliError::Partial(format!("{} failures", result.failures.len())));
    }
    Ok(())
}
