//! Structural editing of AMR graphs.
//!
//! Subgraphs are subtrees of the graph's [`TreeView`]: the subgraph rooted
//! at `v` holds `v` and every tree descendant of `v`. Deleting one removes
//! those variables together with every edge that touches them, including
//! reentrant edges pointing into the removed region, so the rest of the
//! graph stays rooted-connected.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::penman::{AmrGraph, Edge, Instance, Target, TreeView};
use crate::text;

/// Roles removed by attribute filtering unless configured otherwise.
/// A trailing `*` matches any run of digits, so `:op*` covers `:op1`, `:op2`, ...
pub const DEFAULT_ATTRIBUTE_ROLES: &[&str] = &[":mod", ":wiki", ":quant", ":value", ":op*"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphOpsError {
    #[error("`{0}` is not a variable of the graph")]
    UnknownVariable(String),
    #[error("invalid deletion policy: {0}")]
    InvalidPolicy(String),
}

/// A subtree of the tree view, identified by its root variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub root: String,
    /// Root first, then descendants in pre-order.
    pub members: Vec<String>,
    /// Longest downward edge count from `root`.
    pub depth: usize,
}

impl Subgraph {
    pub fn contains(&self, var: &str) -> bool {
        self.members.iter().any(|m| m == var)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Variables that editing must leave in place.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TriProtection {
    pub keywords: Vec<String>,
    /// Variables whose concept or attribute matched a keyword.
    pub protected: BTreeSet<String>,
    /// `protected` plus all of their tree ancestors.
    pub non_deletable: BTreeSet<String>,
}

impl TriProtection {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn is_protected(&self, var: &str) -> bool {
        self.protected.contains(var)
    }

    pub fn is_deletable(&self, var: &str) -> bool {
        !self.non_deletable.contains(var)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeletionPolicy {
    /// Depth-ratio threshold; a subtree is a candidate only below it.
    pub alpha: f64,
    /// Mean of the deletion-rate Gaussian.
    pub mu: f64,
    /// Variance of the deletion-rate Gaussian.
    pub sigma2: f64,
    pub attribute_roles: Vec<String>,
}

impl Default for DeletionPolicy {
    fn default() -> Self {
        DeletionPolicy {
            alpha: 0.35,
            mu: 0.5,
            sigma2: 0.1,
            attribute_roles: DEFAULT_ATTRIBUTE_ROLES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl DeletionPolicy {
    pub fn validate(&self) -> Result<(), GraphOpsError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(GraphOpsError::InvalidPolicy(format!(
                "alpha {} outside [0, 1]",
                self.alpha
            )));
        }
        if !self.mu.is_finite() {
            return Err(GraphOpsError::InvalidPolicy(format!("mu {} is not finite", self.mu)));
        }
        if !(self.sigma2.is_finite() && self.sigma2 >= 0.0) {
            return Err(GraphOpsError::InvalidPolicy(format!(
                "sigma2 {} must be >= 0",
                self.sigma2
            )));
        }
        Ok(())
    }

    pub fn matches_role(&self, role: &str) -> bool {
        self.attribute_roles.iter().any(|p| role_matches(p, role))
    }
}

fn role_matches(pattern: &str, role: &str) -> bool {
    match pattern.strip_suffix('*') {
        Some(prefix) => role
            .strip_prefix(prefix)
            .is_some_and(|rest| rest.bytes().all(|b| b.is_ascii_digit())),
        None => pattern == role,
    }
}

/// Draws from `Normal(mu, sigma2)` (variance, not deviation) and clamps
/// the draw to `[0, 1]`. With `sigma2 == 0` the clamped mean is returned
/// without consuming randomness.
pub fn sample_clamped_normal<R: Rng + ?Sized>(mu: f64, sigma2: f64, rng: &mut R) -> f64 {
    if sigma2 <= 0.0 {
        return mu.clamp(0.0, 1.0);
    }
    let normal = Normal::new(mu, sigma2.sqrt()).expect("finite positive standard deviation");
    normal.sample(rng).clamp(0.0, 1.0)
}

/// Ratio of the subtree depth at `subgraph_root` to the whole graph depth.
///
/// A single-node graph has depth 0; its only subtree gets ratio 1.0.
pub fn depth_ratio(graph: &AmrGraph, subgraph_root: &str) -> Result<f64, GraphOpsError> {
    let tree = graph.tree();
    depth_ratio_in(&tree, subgraph_root)
}

fn depth_ratio_in(tree: &TreeView<'_>, var: &str) -> Result<f64, GraphOpsError> {
    let graph = tree.graph();
    let sub = tree
        .height(var)
        .ok_or_else(|| GraphOpsError::UnknownVariable(var.to_string()))?;
    let whole = tree.height(graph.root()).unwrap_or(0);
    if whole == 0 {
        return Ok(1.0);
    }
    Ok(sub as f64 / whole as f64)
}

/// One subgraph per non-root variable, in surface order.
pub fn enumerate_subgraphs(graph: &AmrGraph) -> Vec<Subgraph> {
    let tree = graph.tree();
    subgraphs_of(&tree)
}

pub(crate) fn subgraphs_of(tree: &TreeView<'_>) -> Vec<Subgraph> {
    let root = tree.graph().root();
    tree.preorder()
        .filter(|v| *v != root)
        .map(|v| subgraph_at(tree, v))
        .collect()
}

pub(crate) fn subgraph_at(tree: &TreeView<'_>, var: &str) -> Subgraph {
    Subgraph {
        root: var.to_string(),
        members: tree.subtree(var).into_iter().map(str::to_string).collect(),
        depth: tree.height(var).unwrap_or(0),
    }
}

/// Removes attribute triples whose role is listed in the policy, except on
/// protected variables. Relations and instances are never touched.
pub fn filter_attributes(graph: &AmrGraph, policy: &DeletionPolicy, protection: &TriProtection) -> AmrGraph {
    let edges: Vec<Edge> = graph
        .edges()
        .iter()
        .filter(|e| match e.target {
            Target::Const(_) => !policy.matches_role(&e.role) || protection.is_protected(&e.source),
            Target::Var(_) => true,
        })
        .cloned()
        .collect();
    AmrGraph::from_parts(graph.root(), graph.instances().to_vec(), edges)
        .expect("removing attributes keeps every invariant")
}

fn strip_sense(concept: &str) -> &str {
    match concept.rsplit_once('-') {
        Some((stem, sense)) if !stem.is_empty() && !sense.is_empty() && sense.bytes().all(|b| b.is_ascii_digit()) => {
            stem
        }
        _ => concept,
    }
}

fn strip_quotes(value: &str) -> &str {
    value
        .strip_prefix('"')
        .and_then(|v| v.strip_suffix('"'))
        .unwrap_or(value)
}

struct Keyword {
    whole: String,
    tokens: Vec<String>,
}

impl Keyword {
    fn new(raw: &str) -> Self {
        Keyword {
            whole: raw.trim().to_lowercase(),
            tokens: text::tokenize(raw),
        }
    }

    fn matches(&self, candidate: &str) -> bool {
        let c = candidate.to_lowercase();
        !c.is_empty() && (c == self.whole || self.tokens.contains(&c))
    }
}

/// Finds variables carrying target-related keywords.
///
/// A variable is protected when its concept (sense suffix such as `-01`
/// removed) or one of its attribute values (quotes removed) equals a
/// keyword or one of the keyword's tokens, compared case-insensitively.
/// Tree ancestors of protected variables become non-deletable as well.
pub fn match_tri<S: AsRef<str>>(graph: &AmrGraph, keywords: &[S]) -> TriProtection {
    let kws: Vec<Keyword> = keywords
        .iter()
        .map(|k| Keyword::new(k.as_ref()))
        .filter(|k| !k.whole.is_empty())
        .collect();
    let mut protected = BTreeSet::new();
    for inst in graph.instances() {
        let concept = strip_sense(&inst.concept);
        if kws.iter().any(|k| k.matches(concept)) {
            protected.insert(inst.var.clone());
        }
    }
    for (src, _, value) in graph.attributes() {
        let value = strip_quotes(value);
        if kws.iter().any(|k| k.matches(value)) {
            protected.insert(src.to_string());
        }
    }
    let tree = graph.tree();
    let mut non_deletable = protected.clone();
    for v in &protected {
        non_deletable.extend(tree.ancestors(v).into_iter().map(str::to_string));
    }
    TriProtection {
        keywords: keywords.iter().map(|k| k.as_ref().to_string()).collect(),
        protected,
        non_deletable,
    }
}

/// Roots of subtrees eligible for deletion: depth ratio below `alpha` and
/// no protected variable (or ancestor of one) inside, in surface order.
pub fn deletion_candidates(graph: &AmrGraph, alpha: f64, protection: &TriProtection) -> Vec<Subgraph> {
    let tree = graph.tree();
    subgraphs_of(&tree)
        .into_iter()
        .filter(|s| depth_ratio_in(&tree, &s.root).map(|r| r < alpha).unwrap_or(false))
        .filter(|s| s.members.iter().all(|m| protection.is_deletable(m)))
        .collect()
}

/// Result of one stochastic deletion pass.
#[derive(Debug, Clone)]
pub struct DeletionOutcome {
    pub graph: AmrGraph,
    /// The deletion rate that was applied.
    pub rate: f64,
    pub candidates: usize,
    /// Roots of the subtrees actually removed, in removal order.
    pub deleted: Vec<String>,
}

/// Samples a deletion rate from the policy and deletes that share of the
/// eligible subtrees.
pub fn delete_subgraphs<R: Rng + ?Sized>(
    graph: &AmrGraph,
    policy: &DeletionPolicy,
    protection: &TriProtection,
    rng: &mut R,
) -> AmrGraph {
    delete_subgraphs_detailed(graph, policy, protection, rng).graph
}

pub fn delete_subgraphs_detailed<R: Rng + ?Sized>(
    graph: &AmrGraph,
    policy: &DeletionPolicy,
    protection: &TriProtection,
    rng: &mut R,
) -> DeletionOutcome {
    let rate = sample_clamped_normal(policy.mu, policy.sigma2, rng);
    delete_subgraphs_at_rate(graph, policy.alpha, protection, rate, rng)
}

/// Deletes `floor(rate * |candidates|)` candidate subtrees, visiting the
/// candidates in a uniformly random order.
///
/// A candidate already removed as part of an earlier deletion is skipped
/// and does not count, so the number of removals reaches the target
/// whenever enough disjoint candidates exist.
pub fn delete_subgraphs_at_rate<R: Rng + ?Sized>(
    graph: &AmrGraph,
    alpha: f64,
    protection: &TriProtection,
    rate: f64,
    rng: &mut R,
) -> DeletionOutcome {
    let rate = if rate.is_nan() { 0.0 } else { rate.clamp(0.0, 1.0) };
    let mut candidates = deletion_candidates(graph, alpha, protection);
    let target = (rate * candidates.len() as f64).floor() as usize;
    let total = candidates.len();
    if target == 0 {
        return DeletionOutcome {
            graph: graph.clone(),
            rate,
            candidates: total,
            deleted: Vec::new(),
        };
    }
    candidates.shuffle(rng);

    let mut removed: BTreeSet<&str> = BTreeSet::new();
    let mut deleted = Vec::new();
    for cand in &candidates {
        if deleted.len() == target {
            break;
        }
        if removed.contains(cand.root.as_str()) {
            continue;
        }
        removed.extend(cand.members.iter().map(String::as_str));
        deleted.push(cand.root.clone());
    }
    DeletionOutcome {
        graph: remove_variables(graph, &removed),
        rate,
        candidates: total,
        deleted,
    }
}

/// Drops `vars` and every edge touching them. The caller guarantees that
/// `vars` is a union of subtrees not containing the root.
fn remove_variables(graph: &AmrGraph, vars: &BTreeSet<&str>) -> AmrGraph {
    let instances: Vec<Instance> = graph
        .instances()
        .iter()
        .filter(|i| !vars.contains(i.var.as_str()))
        .cloned()
        .collect();
    let edges: Vec<Edge> = graph
        .edges()
        .iter()
        .filter(|e| !vars.contains(e.source.as_str()) && e.target.as_var().is_none_or(|t| !vars.contains(t)))
        .cloned()
        .collect();
    AmrGraph::from_parts(graph.root(), instances, edges).expect("removing whole subtrees keeps the graph connected")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penman::parse_penman;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SAY: &str = "(s / say-01 :ARG0 (p / person :mod (f / famous)) :ARG1 (v / victory))";

    fn g(s: &str) -> AmrGraph {
        parse_penman(s).unwrap()
    }

    #[test]
    fn depth_ratio_examples() {
        let graph = g(SAY);
        assert_eq!(depth_ratio(&graph, "s").unwrap(), 1.0);
        assert_eq!(depth_ratio(&graph, "p").unwrap(), 0.5);
        assert_eq!(depth_ratio(&graph, "f").unwrap(), 0.0);
        let deep = g("(a / x :ARG0 (b / y :ARG0 (c / z :ARG0 (d / w))))");
        assert_eq!(depth_ratio(&deep, "d").unwrap(), 0.0);
        assert_eq!(
            depth_ratio(&graph, "zz").unwrap_err(),
            GraphOpsError::UnknownVariable("zz".into())
        );
    }

    #[test]
    fn depth_ratio_on_single_node_is_one() {
        assert_eq!(depth_ratio(&g("(a / agree-01)"), "a").unwrap(), 1.0);
    }

    #[test]
    fn enumeration() {
        assert!(enumerate_subgraphs(&g("(a / agree-01)")).is_empty());
        let subs = enumerate_subgraphs(&g(SAY));
        let roots: Vec<_> = subs.iter().map(|s| s.root.as_str()).collect();
        assert_eq!(roots, vec!["p", "f", "v"]);
        assert_eq!(subs[0].members, vec!["p", "f"]);
        assert_eq!(subs[0].depth, 1);
        let chain = g("(a / x :ARG0 (b / x :ARG0 (c / x :ARG0 (d / x :ARG0 (e / x)))))");
        assert_eq!(enumerate_subgraphs(&chain).len(), 4);
    }

    #[test]
    fn role_patterns() {
        assert!(role_matches(":op*", ":op1"));
        assert!(role_matches(":op*", ":op12"));
        assert!(role_matches(":op*", ":op"));
        assert!(!role_matches(":op*", ":opx"));
        assert!(role_matches(":mod", ":mod"));
        assert!(!role_matches(":mod", ":mode"));
    }

    #[test]
    fn filter_removes_listed_attributes() {
        let graph = g("(v / victory :quant 2 :polarity -)");
        let out = filter_attributes(&graph, &DeletionPolicy::default(), &TriProtection::none());
        assert_eq!(out.attributes().collect::<Vec<_>>(), vec![("v", ":polarity", "-")]);
        let plain = g(SAY);
        assert_eq!(
            filter_attributes(&plain, &DeletionPolicy::default(), &TriProtection::none()),
            plain
        );
    }

    #[test]
    fn filter_keeps_protected_attributes() {
        let graph = g("(p / person :name (n / name :op1 \"Roem\") :quant 3)");
        let prot = match_tri(&graph, &["Roem"]);
        assert!(prot.is_protected("n"));
        let out = filter_attributes(&graph, &DeletionPolicy::default(), &prot);
        assert_eq!(out.attributes().collect::<Vec<_>>(), vec![("n", ":op1", "\"Roem\"")]);
    }

    #[test]
    fn tri_matching() {
        let graph = g("(s / say-01 :ARG0 (p / person :name (n / name :op1 \"Roem\")) :ARG1 (v / victory))");
        let prot = match_tri(&graph, &["victory"]);
        assert_eq!(prot.protected, BTreeSet::from(["v".to_string()]));
        let prot = match_tri(&graph, &["Roem"]);
        assert_eq!(prot.protected, BTreeSet::from(["n".to_string()]));
        assert_eq!(
            prot.non_deletable,
            BTreeSet::from(["n".to_string(), "p".to_string(), "s".to_string()])
        );
        assert!(match_tri(&graph, &["banana"]).protected.is_empty());
        // sense suffix and case are ignored; phrase tokens count
        let prot = match_tri(&graph, &["They SAY so"]);
        assert!(prot.is_protected("s"));
    }

    #[test]
    fn zero_rate_or_alpha_is_identity() {
        let graph = g(SAY);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = delete_subgraphs_at_rate(&graph, 0.6, &TriProtection::none(), 0.0, &mut rng);
        assert_eq!(out.graph, graph);
        let policy = DeletionPolicy {
            alpha: 0.0,
            ..DeletionPolicy::default()
        };
        assert_eq!(
            delete_subgraphs(&graph, &policy, &TriProtection::none(), &mut rng),
            graph
        );
    }

    #[test]
    fn full_rate_with_protection() {
        let graph = g(SAY);
        let prot = match_tri(&graph, &["victory"]);
        let cands: Vec<_> = deletion_candidates(&graph, 0.6, &prot)
            .into_iter()
            .map(|s| s.root)
            .collect();
        assert_eq!(cands, vec!["p", "f"]);
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = delete_subgraphs_at_rate(&graph, 0.6, &prot, 1.0, &mut rng);
            assert_eq!(out.graph.variables().collect::<Vec<_>>(), vec!["s", "v"]);
            assert_eq!(
                crate::penman::serialize_penman(&out.graph),
                "(s / say-01 :ARG1 (v / victory))"
            );
        }
    }

    #[test]
    fn deletion_drops_reentrant_edges_into_removed_region() {
        let graph = g("(s / say-01 :ARG0 (p / person) :ARG1 (v / victory :poss p) :ARG2 (t / time))");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let prot = match_tri(&graph, &["victory", "time"]);
        let out = delete_subgraphs_at_rate(&graph, 1.0, &prot, 1.0, &mut rng);
        assert_eq!(out.deleted, vec!["p"]);
        assert_eq!(
            crate::penman::serialize_penman(&out.graph),
            "(s / say-01 :ARG1 (v / victory) :ARG2 (t / time))"
        );
    }

    #[test]
    fn policy_validation() {
        assert!(DeletionPolicy::default().validate().is_ok());
        let bad = DeletionPolicy {
            alpha: 1.5,
            ..DeletionPolicy::default()
        };
        assert!(bad.validate().is_err());
        let bad = DeletionPolicy {
            sigma2: -0.1,
            ..DeletionPolicy::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn clamped_normal_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(sample_clamped_normal(0.5, 0.0, &mut rng), 0.5);
        assert_eq!(sample_clamped_normal(1.7, 0.0, &mut rng), 1.0);
        for _ in 0..1000 {
            let x = sample_clamped_normal(0.5, 0.1, &mut rng);
            assert!((0.0..=1.0).contains(&x));
        }
    }
}
