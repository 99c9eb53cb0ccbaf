//! Partner retrieval and AMR mixing.
//!
//! Mixing takes a second, semantically close document, scores every pair
//! of subgraphs between the two graphs and grafts copies of the best
//! scoring subgraphs of the partner onto their most similar anchors in the
//! source graph.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use thiserror::Error;

use crate::graphops::{enumerate_subgraphs, Subgraph};
use crate::penman::{AmrGraph, Edge, Instance, InvariantViolation, Target};
use crate::smatch::{subgraph_similarity, SimilarityMode};
use crate::text;

/// Role used when a grafted subtree had no incoming edge (it was the
/// partner's root).
pub const FALLBACK_GRAFT_ROLE: &str = ":mod";

#[derive(Debug, Error)]
pub enum MixError {
    #[error("corpus has {0} usable documents; partner retrieval needs at least 2")]
    CorpusTooSmall(usize),
    #[error("document index {index} is out of range for a corpus of {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("no embedding for record `{0}`")]
    MissingEmbedding(String),
    #[error("embedding file line {line}: {message}")]
    Sidecar { line: usize, message: String },
    #[error("`{0}` is not a variable of the graph it was planned for")]
    UnknownVariable(String),
    #[error("grafting produced an invalid graph: {0}")]
    Invariant(#[from] InvariantViolation),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A document seen by a similarity provider.
#[derive(Debug, Clone, Copy)]
pub struct TextRef<'a> {
    pub id: &'a str,
    pub text: &'a str,
}

impl<'a> TextRef<'a> {
    pub fn new(id: &'a str, text: &'a str) -> Self {
        TextRef { id, text }
    }

    /// A text with no record behind it, e.g. a keyword candidate.
    pub fn anonymous(text: &'a str) -> Self {
        TextRef { id: "", text }
    }
}

/// Cosine similarity between document embeddings.
pub trait SimilarityProvider: Send + Sync {
    fn similarity(&self, a: TextRef<'_>, b: TextRef<'_>) -> Result<f64, MixError>;
}

/// `a·b / (|a||b|)`, or 0 when either vector is zero.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Bag-of-words embedding: lowercased token counts.
#[derive(Debug, Clone, Copy, Default)]
pub struct LexicalProvider;

impl LexicalProvider {
    pub fn embed(text: &str) -> BTreeMap<String, f64> {
        let mut counts = BTreeMap::new();
        for t in text::tokenize(text) {
            *counts.entry(t).or_insert(0.0) += 1.0;
        }
        counts
    }

    pub fn cosine_text(a: &str, b: &str) -> f64 {
        let ea = Self::embed(a);
        let eb = Self::embed(b);
        let dot: f64 = ea.iter().filter_map(|(k, x)| eb.get(k).map(|y| x * y)).sum();
        let na = ea.values().map(|x| x * x).sum::<f64>().sqrt();
        let nb = eb.values().map(|x| x * x).sum::<f64>().sqrt();
        if na == 0.0 || nb == 0.0 {
            0.0
        } else {
            dot / (na * nb)
        }
    }
}

impl SimilarityProvider for LexicalProvider {
    fn similarity(&self, a: TextRef<'_>, b: TextRef<'_>) -> Result<f64, MixError> {
        Ok(Self::cosine_text(a.text, b.text))
    }
}

/// Precomputed embeddings keyed by record id, read from a sidecar file
/// with one `id<TAB>v1,v2,...` record per line.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn parse(contents: &str) -> Result<Self, MixError> {
        let mut table = EmbeddingTable::default();
        for (n, line) in contents.lines().enumerate() {
            let line_no = n + 1;
            if line.trim().is_empty() {
                continue;
            }
            let err = |message: String| MixError::Sidecar { line: line_no, message };
            let (id, values) = line
                .split_once('\t')
                .ok_or_else(|| err("expected `id<TAB>v1,v2,...`".into()))?;
            let vector = values
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|e| err(format!("bad value `{v}`: {e}")))
                })
                .collect::<Result<Vec<f64>, _>>()?;
            if table.vectors.is_empty() {
                table.dim = vector.len();
            } else if vector.len() != table.dim {
                return Err(err(format!("dimension {} differs from {}", vector.len(), table.dim)));
            }
            if table.vectors.insert(id.to_string(), vector).is_some() {
                return Err(err(format!("duplicate id `{id}`")));
            }
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self, MixError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.vectors.get(id).map(Vec::as_slice)
    }
}

impl SimilarityProvider for EmbeddingTable {
    fn similarity(&self, a: TextRef<'_>, b: TextRef<'_>) -> Result<f64, MixError> {
        let ea = self
            .get(a.id)
            .ok_or_else(|| MixError::MissingEmbedding(a.id.to_string()))?;
        let eb = self
            .get(b.id)
            .ok_or_else(|| MixError::MissingEmbedding(b.id.to_string()))?;
        Ok(cosine(ea, eb))
    }
}

/// Most similar other document; ties go to the lowest position.
pub fn retrieve_partner(
    docs: &[TextRef<'_>],
    index: usize,
    provider: &dyn SimilarityProvider,
) -> Result<usize, MixError> {
    if docs.len() < 2 {
        return Err(MixError::CorpusTooSmall(docs.len()));
    }
    let query = *docs
        .get(index)
        .ok_or(MixError::IndexOutOfRange { index, len: docs.len() })?;
    let mut best: Option<(usize, f64)> = None;
    for (j, doc) in docs.iter().enumerate() {
        if j == index {
            continue;
        }
        let mut s = provider.similarity(query, *doc)?;
        if s.is_nan() {
            s = f64::NEG_INFINITY;
        }
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((j, s));
        }
    }
    Ok(best.map(|(j, _)| j).unwrap_or(0))
}

/// Attach a copy of the partner subtree at `source_root` under `anchor_root`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graft {
    /// Root of the subtree to copy, in the partner graph.
    pub source_root: String,
    /// Root of the most similar subtree in the source graph.
    pub anchor_root: String,
    pub score: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MixPlan {
    /// Sorted by descending score.
    pub grafts: Vec<Graft>,
    pub k: usize,
}

impl MixPlan {
    pub fn is_empty(&self) -> bool {
        self.grafts.is_empty()
    }
}

/// Plans up to `k` grafts from `gk` (partner) into `gi` (source).
///
/// Every partner subgraph is scored against every source subgraph. Each
/// partner subgraph keeps its best anchor (ties: earliest anchor); the `k`
/// best partner subgraphs (ties: earliest) are selected, then any selected
/// subgraph nested inside another selected one is dropped, keeping the
/// larger.
pub fn build_mix_plan(gi: &AmrGraph, gk: &AmrGraph, k: usize, mode: SimilarityMode) -> MixPlan {
    let empty = MixPlan { grafts: Vec::new(), k };
    if k == 0 {
        return empty;
    }
    let si = enumerate_subgraphs(gi);
    let sk = enumerate_subgraphs(gk);
    if si.is_empty() || sk.is_empty() {
        return empty;
    }

    let mut ranked: Vec<(usize, usize, f64)> = sk
        .iter()
        .enumerate()
        .map(|(ks, s)| {
            let (best_t, best) = best_anchor(gk, s, gi, &si, mode);
            (ks, best_t, best)
        })
        .collect();
    ranked.sort_by(|x, y| y.2.total_cmp(&x.2).then(x.0.cmp(&y.0)));
    ranked.truncate(k);

    let tree = gk.tree();
    let selected: Vec<&(usize, usize, f64)> = ranked
        .iter()
        .filter(|(ks, _, _)| {
            !ranked
                .iter()
                .any(|(other, _, _)| other != ks && tree.contains(&sk[*other].root, &sk[*ks].root))
        })
        .collect();

    MixPlan {
        grafts: selected
            .into_iter()
            .map(|&(ks, ti, score)| Graft {
                source_root: sk[ks].root.clone(),
                anchor_root: si[ti].root.clone(),
                score,
            })
            .collect(),
        k,
    }
}

fn best_anchor(gk: &AmrGraph, s: &Subgraph, gi: &AmrGraph, si: &[Subgraph], mode: SimilarityMode) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (ti, t) in si.iter().enumerate() {
        let score = subgraph_similarity(gk, s, gi, t, mode);
        if score > best.1 {
            best = (ti, score);
        }
    }
    best
}

fn fresh_name(base: &str, used: &HashSet<String>) -> String {
    let letters: String = base.chars().take_while(|c| c.is_ascii_lowercase()).collect();
    let letters = if letters.is_empty() { "x".to_string() } else { letters };
    (2..)
        .map(|n| format!("{letters}{n}"))
        .find(|name| !used.contains(name))
        .expect("an unbounded sequence has an unused name")
}

/// Applies a plan: each graft appends a renamed copy of the partner
/// subtree (internal relations and attributes included, edges leaving the
/// subtree dropped) and one edge from the anchor to the copy's root,
/// labeled with the role that entered the subtree in the partner graph.
pub fn apply_mix(gi: &AmrGraph, gk: &AmrGraph, plan: &MixPlan) -> Result<AmrGraph, MixError> {
    if plan.is_empty() {
        return Ok(gi.clone());
    }
    let tree = gk.tree();
    let mut instances: Vec<Instance> = gi.instances().to_vec();
    let mut edges: Vec<Edge> = gi.edges().to_vec();
    let mut used: HashSet<String> = gi.variables().map(str::to_string).collect();

    for graft in &plan.grafts {
        if !gi.contains(&graft.anchor_root) {
            return Err(MixError::UnknownVariable(graft.anchor_root.clone()));
        }
        if !gk.contains(&graft.source_root) {
            return Err(MixError::UnknownVariable(graft.source_root.clone()));
        }
        let members = tree.subtree(&graft.source_root);
        let mut rename: HashMap<&str, String> = HashMap::new();
        for m in &members {
            let name = if used.contains(*m) {
                fresh_name(m, &used)
            } else {
                m.to_string()
            };
            used.insert(name.clone());
            rename.insert(m, name);
        }
        let role = tree.parent_role(&graft.source_root).unwrap_or(FALLBACK_GRAFT_ROLE);
        edges.push(Edge::relation(
            graft.anchor_root.clone(),
            role,
            rename[graft.source_root.as_str()].clone(),
        ));
        for m in &members {
            let concept = gk.concept(m).unwrap_or_default().to_string();
            instances.push(Instance {
                var: rename[m].clone(),
                concept,
            });
        }
        for e in gk.edges() {
            let Some(src) = rename.get(e.source.as_str()) else {
                continue;
            };
            match &e.target {
                Target::Const(c) => edges.push(Edge::attribute(src.clone(), e.role.clone(), c.clone())),
                Target::Var(t) => {
                    if let Some(dst) = rename.get(t.as_str()) {
                        edges.push(Edge::relation(src.clone(), e.role.clone(), dst.clone()));
                    }
                }
            }
        }
    }
    Ok(AmrGraph::from_parts(gi.root(), instances, edges)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penman::{parse_penman, serialize_penman};

    fn g(s: &str) -> AmrGraph {
        parse_penman(s).unwrap()
    }

    #[test]
    fn cosine_basics() {
        assert!((cosine(&[1.0, 2.0], &[2.0, 4.0]) - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]), 0.0);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 1.0]), 0.0);
        assert!((cosine(&[1.0, 0.0], &[-1.0, 0.0]) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn lexical_self_similarity() {
        assert!((LexicalProvider::cosine_text("The cat sat", "the CAT sat") - 1.0).abs() < 1e-12);
        assert_eq!(LexicalProvider::cosine_text("", "cat"), 0.0);
    }

    #[test]
    fn partner_in_two_doc_corpus() {
        let docs = [TextRef::new("a", "one two"), TextRef::new("b", "three")];
        assert_eq!(retrieve_partner(&docs, 0, &LexicalProvider).unwrap(), 1);
        assert_eq!(retrieve_partner(&docs, 1, &LexicalProvider).unwrap(), 0);
        assert!(matches!(
            retrieve_partner(&docs[..1], 0, &LexicalProvider),
            Err(MixError::CorpusTooSmall(1))
        ));
    }

    #[test]
    fn duplicate_document_is_selected() {
        let docs = [
            TextRef::new("a", "the match ended in a draw"),
            TextRef::new("b", "stocks fell sharply"),
            TextRef::new("c", "the match ended in a draw"),
            TextRef::new("d", "the match was long"),
        ];
        assert_eq!(retrieve_partner(&docs, 0, &LexicalProvider).unwrap(), 2);
    }

    #[test]
    fn ties_go_to_lowest_position() {
        let docs = [TextRef::new("a", "x"), TextRef::new("b", "y"), TextRef::new("c", "z")];
        assert_eq!(retrieve_partner(&docs, 2, &LexicalProvider).unwrap(), 0);
    }

    #[test]
    fn sidecar_table() {
        let t = EmbeddingTable::parse("a\t1,0\nb\t0.5,0.5\n\nc\t0,2\n").unwrap();
        assert_eq!(t.dim(), 2);
        let s = t.similarity(TextRef::new("a", ""), TextRef::new("c", "")).unwrap();
        assert_eq!(s, 0.0);
        assert!(matches!(
            t.similarity(TextRef::new("a", ""), TextRef::new("zz", "")),
            Err(MixError::MissingEmbedding(id)) if id == "zz"
        ));
        assert!(matches!(
            EmbeddingTable::parse("a\t1,0\nb\t1,2,3\n"),
            Err(MixError::Sidecar { line: 2, .. })
        ));
        assert!(matches!(
            EmbeddingTable::parse("a 1,0\n"),
            Err(MixError::Sidecar { line: 1, .. })
        ));
        assert!(matches!(
            EmbeddingTable::parse("a\t1,x\n"),
            Err(MixError::Sidecar { line: 1, .. })
        ));
    }

    #[test]
    fn empty_plans() {
        let gi = g("(s / say-01 :ARG0 (p / person))");
        let gk = g("(t / tell-01 :ARG0 (q / person))");
        assert!(build_mix_plan(&gi, &gk, 0, SimilarityMode::F1).is_empty());
        assert!(build_mix_plan(&gi, &g("(a / agree-01)"), 3, SimilarityMode::F1).is_empty());
        assert!(build_mix_plan(&g("(a / agree-01)"), &gk, 3, SimilarityMode::F1).is_empty());
        assert_eq!(apply_mix(&gi, &gk, &MixPlan::default()).unwrap(), gi);
    }

    #[test]
    fn graft_two_node_subtree() {
        let gi = g("(s / say-01 :ARG0 (p / person) :ARG1 (v / victory))");
        let gk = g("(w / win-01 :ARG0 (p / person :mod (f / famous)))");
        let plan = build_mix_plan(&gi, &gk, 1, SimilarityMode::F1);
        assert_eq!(
            plan.grafts,
            vec![Graft {
                source_root: "p".into(),
                anchor_root: "p".into(),
                score: 0.5
            }]
        );
        let mixed = apply_mix(&gi, &gk, &plan).unwrap();
        assert_eq!(mixed.len(), 5);
        assert_eq!(
            serialize_penman(&mixed),
            "(s / say-01 :ARG0 (p / person :ARG0 (p2 / person :mod (f / famous))) :ARG1 (v / victory))"
        );
    }

    #[test]
    fn nested_selection_keeps_the_larger() {
        let gi = g("(s / say-01 :ARG0 (p / person :mod (f / famous)))");
        let gk = g("(w / win-01 :ARG0 (p / person :mod (f / famous)))");
        let plan = build_mix_plan(&gi, &gk, 2, SimilarityMode::F1);
        assert_eq!(plan.grafts.len(), 1);
        assert_eq!(plan.grafts[0].source_root, "p");
        let mixed = apply_mix(&gi, &gk, &plan).unwrap();
        assert_eq!(mixed.len(), 5);
    }

    #[test]
    fn reentrancy_leaving_the_copy_is_dropped() {
        let gi = g("(s / say-01 :ARG0 (p / person))");
        let gk = g("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))");
        let plan = MixPlan {
            grafts: vec![Graft {
                source_root: "g".into(),
                anchor_root: "p".into(),
                score: 0.0,
            }],
            k: 1,
        };
        let mixed = apply_mix(&gi, &gk, &plan).unwrap();
        assert_eq!(
            serialize_penman(&mixed),
            "(s / say-01 :ARG0 (p / person :ARG1 (g / go-02)))"
        );
    }

    #[test]
    fn unknown_anchor_is_rejected() {
        let gi = g("(s / say-01)");
        let gk = g("(w / win-01 :ARG0 (p / person))");
        let plan = MixPlan {
            grafts: vec![Graft {
                source_root: "p".into(),
                anchor_root: "zz".into(),
                score: 1.0,
            }],
            k: 1,
        };
        assert!(matches!(apply_mix(&gi, &gk, &plan), Err(MixError::UnknownVariable(v)) if v == "zz"));
    }
}
