//! Token diversity (D) and length diversity (D-L) of augmentations.
//!
//! Both metrics use [`text::tokenize`]: alphanumeric runs, case-folded.
//! Values are only comparable with other numbers produced by this crate.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("original document `{0}` has no tokens")]
    EmptyOriginal(String),
}

/// How new tokens are counted for D.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiversityMode {
    /// New token types are pooled over all augmentations of a document.
    #[default]
    Pooled,
    /// D is computed per augmentation and averaged.
    PerAugmentation,
}

fn tokens_or_empty(original: &str) -> Result<Vec<String>, MetricsError> {
    let toks = text::tokenize(original);
    if toks.is_empty() {
        return Err(MetricsError::EmptyOriginal(original.to_string()));
    }
    Ok(toks)
}

/// `100 * |new token types| / |original tokens|`, where the denominator
/// counts tokens with multiplicity. Can exceed 100.
pub fn token_diversity<S: AsRef<str>>(original: &str, augs: &[S], mode: DiversityMode) -> Result<f64, MetricsError> {
    let orig = tokens_or_empty(original)?;
    if augs.is_empty() {
        return Ok(0.0);
    }
    let known: HashSet<&str> = orig.iter().map(String::as_str).collect();
    let denom = orig.len() as f64;
    match mode {
        DiversityMode::Pooled => {
            let mut new: HashSet<String> = HashSet::new();
            for a in augs {
                new.extend(
                    text::tokenize(a.as_ref())
                        .into_iter()
                        .filter(|t| !known.contains(t.as_str())),
                );
            }
            Ok(100.0 * new.len() as f64 / denom)
        }
        DiversityMode::PerAugmentation => {
            let total: f64 = augs
                .iter()
                .map(|a| {
                    let new: HashSet<String> = text::tokenize(a.as_ref())
                        .into_iter()
                        .filter(|t| !known.contains(t.as_str()))
                        .collect();
                    100.0 * new.len() as f64 / denom
                })
                .sum();
            Ok(total / augs.len() as f64)
        }
    }
}

/// Mean absolute token-length difference between original and augmentations.
pub fn length_diversity<S: AsRef<str>>(original: &str, augs: &[S]) -> Result<f64, MetricsError> {
    let len = tokens_or_empty(original)?.len() as f64;
    if augs.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = augs
        .iter()
        .map(|a| (text::tokenize(a.as_ref()).len() as f64 - len).abs())
        .sum();
    Ok(total / augs.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordDiversity {
    pub id: String,
    pub augmentations: usize,
    pub d: f64,
    pub dl: f64,
}

/// Corpus-level D and D-L: the means of the per-record values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub mode: DiversityMode,
    pub d: f64,
    pub dl: f64,
    pub records: Vec<RecordDiversity>,
}

/// One original document and its augmentations.
#[derive(Debug, Clone)]
pub struct DocumentAugs<'a> {
    pub id: &'a str,
    pub original: &'a str,
    pub augs: Vec<&'a str>,
}

impl DiversityReport {
    pub fn compute(docs: &[DocumentAugs<'_>], mode: DiversityMode) -> Result<Self, MetricsError> {
        let mut records = Vec::with_capacity(docs.len());
        for doc in docs {
            let d = token_diversity(doc.original, &doc.augs, mode)
                .map_err(|_| MetricsError::EmptyOriginal(doc.id.to_string()))?;
            let dl = length_diversity(doc.original, &doc.augs)
                .map_err(|_| MetricsError::EmptyOriginal(doc.id.to_string()))?;
            records.push(RecordDiversity {
                id: doc.id.to_string(),
                augmentations: doc.augs.len(),
                d,
                dl,
            });
        }
        let n = records.len().max(1) as f64;
        Ok(DiversityReport {
            mode,
            d: records.iter().map(|r| r.d).sum::<f64>() / n,
            dl: records.iter().map(|r| r.dl).sum::<f64>() / n,
            records,
        })
    }

    /// Plain-text table, one row per record followed by the aggregate.
    pub fn to_table(&self) -> String {
        let width = self.records.iter().map(|r| r.id.len()).max().unwrap_or(2).max(7);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {:>4}  {:>10}  {:>10}", "id", "augs", "D", "D-L");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{:<width$}  {:>4}  {:>10.4}  {:>10.4}",
                r.id, r.augmentations, r.d, r.dl
            );
        }
        let total: usize = self.records.iter().map(|r| r.augmentations).sum();
        let _ = writeln!(
            out,
            "{:<width$}  {:>4}  {:>10.4}  {:>10.4}",
            "overall", total, self.d, self.dl
        );
        out
    }
}
