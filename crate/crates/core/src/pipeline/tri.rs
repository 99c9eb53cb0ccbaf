use crate::mix::{SimilarityProvider, TextRef};
use crate::text;

use super::PipelineError;

/// Longest n-gram considered as a keyword.
pub const MAX_NGRAM: usize = 3;

/// Function words that may not begin or end a keyword n-gram.
pub const STOPWORDS: &[&str] = &[
    "a",
    "about",
    "above",
    "after",
    "again",
    "against",
    "all",
    "am",
    "an",
    "and",
    "any",
    "are",
    "as",
    "at",
    "be",
    "because",
    "been",
    "before",
    "being",
    "below",
    "between",
    "both",
    "but",
    "by",
    "can",
    "could",
    "did",
    "do",
    "does",
    "doing",
    "down",
    "during",
    "each",
    "few",
    "for",
    "from",
    "further",
    "had",
    "has",
    "have",
    "having",
    "he",
    "her",
    "here",
    "hers",
    "herself",
    "him",
    "himself",
    "his",
    "how",
    "i",
    "if",
    "in",
    "into",
    "is",
    "it",
    "its",
    "itself",
    "just",
    "me",
    "more",
    "most",
    "my",
    "myself",
    "no",
    "nor",
    "not",
    "now",
    "of",
    "off",
    "on",
    "once",
    "only",
    "or",
    "other",
    "our",
    "ours",
    "ourselves",
    "out",
    "over",
    "own",
    "s",
    "same",
    "she",
    "should",
    "so",
    "some",
    "such",
    "t",
    "than",
    "that",
    "the",
    "their",
    "theirs",
    "them",
    "themselves",
    "then",
    "there",
    "these",
    "they",
    "this",
    "those",
    "through",
    "to",
    "too",
    "under",
    "until",
    "up",
    "very",
    "was",
    "we",
    "were",
    "what",
    "when",
    "where",
    "which",
    "while",
    "who",
    "whom",
    "why",
    "will",
    "with",
    "would",
    "you",
    "your",
    "yours",
    "yourself",
    "yourselves",
];

pub fn is_stopword(token: &str) -> bool {
    STOPWORDS.binary_search(&token).is_ok()
}

/// A keyword candidate and where it first occurs.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub text: String,
    /// Token index of the first occurrence.
    pub start: usize,
    pub n: usize,
}

/// Distinct n-grams (n = 1..3) of the document's tokens that neither start
/// nor end with a stopword, ordered by first occurrence, then length.
pub fn tri_candidates(document: &str) -> Vec<Candidate> {
    let toks = text::tokenize(document);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for start in 0..toks.len() {
        for n in 1..=MAX_NGRAM {
            let Some(gram) = toks.get(start..start + n) else {
                break;
            };
            if is_stopword(&gram[0]) || is_stopword(&gram[n - 1]) {
                continue;
            }
            let text = gram.join(" ");
            if seen.insert(text.clone()) {
                out.push(Candidate { text, start, n });
            }
        }
    }
    out
}

/// Top-`k` candidates by similarity to the label. Candidates scoring 0 or
/// less are never selected; ties keep document order.
pub fn extract_tri(
    document: &str,
    label: &str,
    k: usize,
    scorer: &dyn SimilarityProvider,
) -> Result<Vec<String>, PipelineError> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut scored = Vec::new();
    for (pos, c) in tri_candidates(document).into_iter().enumerate() {
        let s = scorer.similarity(TextRef::anonymous(&c.text), TextRef::anonymous(label))?;
        if s > 0.0 {
            scored.push((s, pos, c.text));
        }
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok(scored.into_iter().take(k).map(|(_, _, t)| t).collect())
}
