//! Per-record abstraction rounds and corpus orchestration.
//!
//! Each round edits the record's graph (keyword matching, attribute
//! filtering, stochastic subtree deletion) and, when the mixing gate opens,
//! grafts subtrees from the most similar other document. All randomness of
//! a round comes from a seed derived from `(seed, record id, round)`, so
//! results do not depend on corpus order or thread scheduling.

pub mod adapter;
mod tri;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graphops::{
    delete_subgraphs, filter_attributes, match_tri, sample_clamped_normal, DeletionPolicy, GraphOpsError,
    DEFAULT_ATTRIBUTE_ROLES,
};
use crate::mix::{apply_mix, build_mix_plan, retrieve_partner, LexicalProvider, MixError, SimilarityProvider, TextRef};
use crate::penman::{parse_penman, serialize_penman, AmrGraph, ParseError};
use crate::smatch::SimilarityMode;

pub use adapter::{AdapterError, ExternalAdapters, LineAdapter};
pub use tri::{extract_tri, is_stopword, tri_candidates, Candidate, MAX_NGRAM, STOPWORDS};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("record `{0}` has no AMR graph")]
    MissingAmr(String),
    #[error("text-to-AMR output for `{id}` does not parse: {source}")]
    BadAdapterGraph {
        id: String,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Graph(#[from] GraphOpsError),
    #[error(transparent)]
    Mix(#[from] MixError),
    #[error(transparent)]
    Adapter(#[from] AdapterError),
}

/// Editing and mixing hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EditConfig {
    /// Mean of the deletion-rate Gaussian.
    pub mu: f64,
    /// Variance of the deletion-rate Gaussian.
    pub sigma2: f64,
    /// Depth-ratio threshold for deletion.
    pub alpha: f64,
    /// Mixing happens when the sampled gate value is strictly above this.
    pub beta: f64,
    /// Mean of the mixing-gate Gaussian.
    pub mix_mu: f64,
    /// Variance of the mixing-gate Gaussian.
    pub mix_sigma2: f64,
    pub top_k_mix: usize,
    pub rounds: usize,
    pub tri_k: usize,
    pub seed: u64,
    pub attribute_roles: Vec<String>,
    /// Set to false to skip mixing entirely.
    pub mix: bool,
    pub similarity: SimilarityMode,
}

impl Default for EditConfig {
    fn default() -> Self {
        EditConfig {
            mu: 0.5,
            sigma2: 0.1,
            alpha: 0.35,
            beta: 0.6,
            mix_mu: 0.5,
            mix_sigma2: 0.1,
            top_k_mix: 1,
            rounds: 5,
            tri_k: 3,
            seed: 42,
            attribute_roles: DEFAULT_ATTRIBUTE_ROLES.iter().map(|s| s.to_string()).collect(),
            mix: true,
            similarity: SimilarityMode::F1,
        }
    }
}

impl EditConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let unit = [
            ("mu", self.mu),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("mix_mu", self.mix_mu),
        ];
        for (name, v) in unit {
            if !(0.0..=1.0).contains(&v) {
                return Err(PipelineError::InvalidConfig(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        for (name, v) in [("sigma2", self.sigma2), ("mix_sigma2", self.mix_sigma2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(PipelineError::InvalidConfig(format!(
                    "{name} = {v} must be a finite value >= 0"
                )));
            }
        }
        if self.rounds == 0 {
            return Err(PipelineError::InvalidConfig("rounds must be at least 1".into()));
        }
        Ok(())
    }

    pub fn deletion_policy(&self) -> DeletionPolicy {
        DeletionPolicy {
            alpha: self.alpha,
            mu: self.mu,
            sigma2: self.sigma2,
            attribute_roles: self.attribute_roles.clone(),
        }
    }
}

/// A labeled document moving through the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct AugRecord {
    pub id: String,
    pub text: String,
    pub label: String,
    pub amr: Option<AmrGraph>,
    /// Keywords to protect; extracted from text and label when `None`.
    pub tri: Option<Vec<String>>,
    pub outputs: Vec<RoundOutput>,
}

impl AugRecord {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: impl Into<String>) -> Self {
        AugRecord {
            id: id.into(),
            text: text.into(),
            label: label.into(),
            amr: None,
            tri: None,
            outputs: Vec::new(),
        }
    }

    pub fn with_amr(mut self, amr: AmrGraph) -> Self {
        self.amr = Some(amr);
        self
    }

    pub fn with_tri(mut self, tri: Vec<String>) -> Self {
        self.tri = Some(tri);
        self
    }

    pub fn keywords(&self) -> &[String] {
        self.tri.as_deref().unwrap_or(&[])
    }
}

/// One augmentation of a record.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutput {
    pub round: usize,
    pub graph: AmrGraph,
    pub mixed: bool,
    /// Set exactly when `mixed` is.
    pub partner_id: Option<String>,
    /// Filled by the AMR-to-text adapter.
    pub abstract_text: Option<String>,
    /// Filled by the expander adapter.
    pub expanded_text: Option<String>,
}

/// SHA-256 over `(seed, id, round)`; the first 8 bytes, little endian.
pub fn derive_seed(seed: u64, id: &str, round: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((id.len() as u64).to_le_bytes());
    h.update(id.as_bytes());
    h.update((round as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

pub fn round_rng(seed: u64, id: &str, round: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, id, round))
}

/// One editing pass: keyword matching, attribute filtering, then deletion.
pub fn abstract_once<R: Rng + ?Sized>(graph: &AmrGraph, tri: &[String], config: &EditConfig, rng: &mut R) -> AmrGraph {
    let policy = config.deletion_policy();
    let protection = match_tri(graph, tri);
    let filtered = filter_attributes(graph, &policy, &protection);
    delete_subgraphs(&filtered, &policy, &protection, rng)
}

/// One round for `corpus[index]`. `corpus` must only hold records with a
/// graph; partner ties resolve to the lowest position.
///
/// The gate value is drawn first, from the mixing Gaussian.
pub fn augment_round<R: Rng + ?Sized>(
    corpus: &[&AugRecord],
    index: usize,
    config: &EditConfig,
    provider: &dyn SimilarityProvider,
    rng: &mut R,
    round: usize,
) -> Result<RoundOutput, PipelineError> {
    let record = corpus[index];
    let graph = record
        .amr
        .as_ref()
        .ok_or_else(|| PipelineError::MissingAmr(record.id.clone()))?;
    let gamma = sample_clamped_normal(config.mix_mu, config.mix_sigma2, rng);

    let mut partner = None;
    if config.mix && gamma > config.beta {
        let docs: Vec<TextRef<'_>> = corpus.iter().map(|r| TextRef::new(&r.id, &r.text)).collect();
        match retrieve_partner(&docs, index, provider) {
            Ok(j) => partner = Some(corpus[j]),
            Err(MixError::CorpusTooSmall(n)) => {
                log::warn!("record `{}`: mixing skipped, corpus has {n} document(s)", record.id);
            }
            Err(e) => return Err(e.into()),
        }
    }

    let edited = abstract_once(graph, record.keywords(), config, rng);
    let Some(partner) = partner else {
        return Ok(RoundOutput {
            round,
            graph: edited,
            mixed: false,
            partner_id: None,
            abstract_text: None,
            expanded_text: None,
        });
    };
    let partner_graph = partner
        .amr
        .as_ref()
        .ok_or_else(|| PipelineError::MissingAmr(partner.id.clone()))?;
    let partner_edited = abstract_once(partner_graph, partner.keywords(), config, rng);
    let plan = build_mix_plan(&edited, &partner_edited, config.top_k_mix, config.similarity);
    let mixed = apply_mix(&edited, &partner_edited, &plan)?;
    Ok(RoundOutput {
        round,
        graph: mixed,
        mixed: true,
        partner_id: Some(partner.id.clone()),
        abstract_text: None,
        expanded_text: None,
    })
}

/// Which pipeline step a failure belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    TextToAmr,
    Keywords,
    Augment,
    AmrToText,
    Expander,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub id: String,
    pub round: Option<usize>,
    pub stage: Stage,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct PipelineOutput {
    /// Input records, in input order, with their surviving outputs.
    pub records: Vec<AugRecord>,
    pub failures: Vec<Failure>,
}

impl PipelineOutput {
    pub fn output_count(&self) -> usize {
        self.records.iter().map(|r| r.outputs.len()).sum()
    }
}

/// Runs `config.rounds` rounds for every record.
///
/// Records without a graph are parsed through the text-to-AMR adapter
/// first. Keywords use the lexical scorer; `provider` drives partner
/// retrieval. Outputs that serialize to nothing or to the source graph are
/// dropped before the text adapters run. `workers` bounds both the record
/// pool and the adapter processes per stage (0: all cores for records, one
/// adapter process).
pub fn run_pipeline(
    mut dataset: Vec<AugRecord>,
    config: &EditConfig,
    adapters: &ExternalAdapters,
    provider: &dyn SimilarityProvider,
    workers: usize,
) -> Result<PipelineOutput, PipelineError> {
    config.validate()?;
    let mut failures = Vec::new();
    let adapter_workers = adapters.workers.max(1);

    parse_missing_graphs(&mut dataset, adapters, adapter_workers, &mut failures);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| PipelineError::InvalidConfig(format!("worker pool: {e}")))?;

    let keyword_failures: Vec<Failure> = pool.install(|| {
        dataset
            .par_iter_mut()
            .filter(|r| r.tri.is_none())
            .filter_map(
                |r| match extract_tri(&r.text, &r.label, config.tri_k, &LexicalProvider) {
                    Ok(tri) => {
                        r.tri = Some(tri);
                        None
                    }
                    Err(e) => Some(Failure {
                        id: r.id.clone(),
                        round: None,
                        stage: Stage::Keywords,
                        message: e.to_string(),
                    }),
                },
            )
            .collect()
    });
    failures.extend(keyword_failures);

    let mut order: Vec<usize> = (0..dataset.len()).filter(|&i| dataset[i].amr.is_some()).collect();
    order.sort_by(|&a, &b| dataset[a].id.cmp(&dataset[b].id));
    let corpus: Vec<&AugRecord> = order.iter().map(|&i| &dataset[i]).collect();

    let per_record: Vec<(usize, Vec<RoundOutput>, Vec<Failure>)> = pool.install(|| {
        (0..corpus.len())
            .into_par_iter()
            .map(|pos| {
                let record = corpus[pos];
                let source = serialize_penman(record.amr.as_ref().expect("corpus holds parsed records"));
                let mut outs = Vec::new();
                let mut fails = Vec::new();
                for round in 0..config.rounds {
                    let mut rng = round_rng(config.seed, &record.id, round);
                    match augment_round(&corpus, pos, config, provider, &mut rng, round) {
                        Ok(out) => {
                            let s = serialize_penman(&out.graph);
                            if !s.is_empty() && s != source {
                                outs.push(out);
                            }
                        }
                        Err(e) => fails.push(Failure {
                            id: record.id.clone(),
                            round: Some(round),
                            stage: Stage::Augment,
                            message: e.to_string(),
                        }),
                    }
                }
                (order[pos], outs, fails)
            })
            .collect()
    });

    let mut outputs: HashMap<usize, Vec<RoundOutput>> = HashMap::new();
    let mut augment_failures: Vec<(usize, Vec<Failure>)> = Vec::new();
    for (idx, outs, fails) in per_record {
        outputs.insert(idx, outs);
        augment_failures.push((idx, fails));
    }
    augment_failures.sort_by_key(|(idx, _)| *idx);
    failures.extend(augment_failures.into_iter().flat_map(|(_, f)| f));
    for (idx, outs) in outputs {
        dataset[idx].outputs = outs;
    }

    run_text_adapters(&mut dataset, adapters, adapter_workers, &mut failures);

    Ok(PipelineOutput {
        records: dataset,
        failures,
    })
}

fn parse_missing_graphs(
    dataset: &mut [AugRecord],
    adapters: &ExternalAdapters,
    workers: usize,
    failures: &mut Vec<Failure>,
) {
    let missing: Vec<usize> = (0..dataset.len()).filter(|&i| dataset[i].amr.is_none()).collect();
    if missing.is_empty() {
        return;
    }
    let Some(adapter) = &adapters.text_to_amr else {
        for &i in &missing {
            failures.push(Failure {
                id: dataset[i].id.clone(),
                round: None,
                stage: Stage::TextToAmr,
                message: PipelineError::MissingAmr(dataset[i].id.clone()).to_string(),
            });
        }
        return;
    };
    let texts: Vec<&str> = missing.iter().map(|&i| dataset[i].text.as_str()).collect();
    let results = adapter.run_chunked(&texts, workers);
    for (&i, result) in missing.iter().zip(results) {
        let parsed = result.map_err(PipelineError::from).and_then(|line| {
            parse_penman(&line).map_err(|source| PipelineError::BadAdapterGraph {
                id: dataset[i].id.clone(),
                source,
            })
        });
        match parsed {
            Ok(g) => dataset[i].amr = Some(g),
            Err(e) => failures.push(Failure {
                id: dataset[i].id.clone(),
                round: None,
                stage: Stage::TextToAmr,
                message: e.to_string(),
            }),
        }
    }
}

fn run_text_adapters(
    dataset: &mut [AugRecord],
    adapters: &ExternalAdapters,
    workers: usize,
    failures: &mut Vec<Failure>,
) {
    let slots: Vec<(usize, usize)> = dataset
        .iter()
        .enumerate()
        .flat_map(|(i, r)| (0..r.outputs.len()).map(move |j| (i, j)))
        .collect();

    if let Some(adapter) = &adapters.amr_to_text {
        let inputs: Vec<String> = slots
            .iter()
            .map(|&(i, j)| serialize_penman(&dataset[i].outputs[j].graph))
            .collect();
        let results = adapter.run_chunked(&inputs, workers);
        for (&(i, j), result) in slots.iter().zip(results) {
            match result {
                Ok(text) => dataset[i].outputs[j].abstract_text = Some(text),
                Err(e) => failures.push(Failure {
                    id: dataset[i].id.clone(),
                    round: Some(dataset[i].outputs[j].round),
                    stage: Stage::AmrToText,
                    message: e.to_string(),
                }),
            }
        }
    }

    if let Some(adapter) = &adapters.expander {
        // without a text adapter the expander receives the abstract graph itself
        let ready: Vec<(usize, usize)> = slots
            .iter()
            .copied()
            .filter(|&(i, j)| adapters.amr_to_text.is_none() || dataset[i].outputs[j].abstract_text.is_some())
            .collect();
        let inputs: Vec<String> = ready
            .iter()
            .map(|&(i, j)| {
                let out = &dataset[i].outputs[j];
                out.abstract_text
                    .clone()
                    .unwrap_or_else(|| serialize_penman(&out.graph))
            })
            .collect();
        let results = adapter.run_chunked(&inputs, workers);
        for (&(i, j), result) in ready.iter().zip(results) {
            match result {
                Ok(text) => dataset[i].outputs[j].expanded_text = Some(text),
                Err(e) => failures.push(Failure {
                    id: dataset[i].id.clone(),
                    round: Some(dataset[i].outputs[j].round),
                    stage: Stage::Expander,
                    message: e.to_string(),
                }),
            }
        }
    }
}
