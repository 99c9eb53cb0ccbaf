//! SMATCH alignment between AMR graphs.
//!
//! A graph is read as a set of triples: `(v, instance, concept)`,
//! `(v, role, v2)` and `(v, role, constant)`. Given an injective partial
//! map from the variables of `a` to those of `b`, the overlap `f` is the
//! number of triples of `a` that land on a triple of `b` once variables are
//! renamed. The score is the maximum overlap `F` over all maps, with
//! precision `F / |a|`, recall `F / |b|` and their harmonic mean.
//!
//! [`score_exact`] enumerates every map and serves as the oracle on small
//! graphs; [`score`] is the usual hill-climbing search with restarts.

use std::collections::{HashMap, HashSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphops::Subgraph;
use crate::penman::{AmrGraph, Target};

/// Largest variable count either side may have for [`score_exact`].
pub const EXACT_VARIABLE_BOUND: usize = 8;

/// Below this size [`subgraph_similarity`] uses the exhaustive search.
pub const EXACT_SUBGRAPH_BOUND: usize = 6;

/// Restarts used wherever a caller does not choose them.
pub const DEFAULT_RESTARTS: usize = 4;

pub const INSTANCE: &str = "instance";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmatchError {
    #[error("graph has {vars} variables; exact scoring is limited to {bound}")]
    GraphTooLarge { vars: usize, bound: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Triple {
    Instance {
        var: String,
        concept: String,
    },
    Relation {
        source: String,
        role: String,
        target: String,
    },
    Attribute {
        source: String,
        role: String,
        value: String,
    },
}

/// Deduplicated triples of one graph, with variables indexed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TripleSet {
    variables: Vec<String>,
    instances: Vec<(usize, String)>,
    relations: Vec<(usize, String, usize)>,
    attributes: Vec<(usize, String, String)>,
}

impl TripleSet {
    pub fn from_graph(graph: &AmrGraph) -> Self {
        Self::from_triples(graph_triples(graph, |_| true))
    }

    /// Triples induced by a subgraph's members: their instances and
    /// attributes, and relations with both endpoints inside.
    pub fn from_subgraph(graph: &AmrGraph, subgraph: &Subgraph) -> Self {
        let members: HashSet<&str> = subgraph.members.iter().map(String::as_str).collect();
        Self::from_triples(graph_triples(graph, |v| members.contains(v)))
    }

    /// Collects triples; variables are indexed in order of first appearance.
    pub fn from_triples<I: IntoIterator<Item = Triple>>(triples: I) -> Self {
        let mut set = TripleSet::default();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut seen: HashSet<Triple> = HashSet::new();
        let mut var = |name: &str, set: &mut TripleSet| -> usize {
            if let Some(&i) = index.get(name) {
                return i;
            }
            let i = set.variables.len();
            set.variables.push(name.to_string());
            index.insert(name.to_string(), i);
            i
        };
        for t in triples {
            if !seen.insert(t.clone()) {
                continue;
            }
            match t {
                Triple::Instance { var: v, concept } => {
                    let i = var(&v, &mut set);
                    set.instances.push((i, concept));
                }
                Triple::Relation { source, role, target } => {
                    let s = var(&source, &mut set);
                    let t = var(&target, &mut set);
                    set.relations.push((s, role, t));
                }
                Triple::Attribute { source, role, value } => {
                    let s = var(&source, &mut set);
                    set.attributes.push((s, role, value));
                }
            }
        }
        set
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn len(&self) -> usize {
        self.instances.len() + self.relations.len() + self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn triples(&self) -> Vec<Triple> {
        let name = |i: usize| self.variables[i].clone();
        let mut out = Vec::with_capacity(self.len());
        out.extend(self.instances.iter().map(|(v, c)| Triple::Instance {
            var: name(*v),
            concept: c.clone(),
        }));
        out.extend(self.relations.iter().map(|(s, r, t)| Triple::Relation {
            source: name(*s),
            role: r.clone(),
            target: name(*t),
        }));
        out.extend(self.attributes.iter().map(|(s, r, v)| Triple::Attribute {
            source: name(*s),
            role: r.clone(),
            value: v.clone(),
        }));
        out
    }
}

fn graph_triples(graph: &AmrGraph, keep: impl Fn(&str) -> bool) -> Vec<Triple> {
    let mut out: Vec<Triple> = graph
        .instances()
        .iter()
        .filter(|i| keep(&i.var))
        .map(|i| Triple::Instance {
            var: i.var.clone(),
            concept: i.concept.clone(),
        })
        .collect();
    for e in graph.edges().iter().filter(|e| keep(&e.source)) {
        match &e.target {
            Target::Var(t) if keep(t) => out.push(Triple::Relation {
                source: e.source.clone(),
                role: e.role.clone(),
                target: t.clone(),
            }),
            Target::Var(_) => {}
            Target::Const(c) => out.push(Triple::Attribute {
                source: e.source.clone(),
                role: e.role.clone(),
                value: c.clone(),
            }),
        }
    }
    out
}

/// Variable pairs `(a_var, b_var)` of an alignment.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableMap {
    pub pairs: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmatchScore {
    /// Matched triple count.
    pub matched: usize,
    pub size_a: usize,
    pub size_b: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub witness: VariableMap,
}

impl SmatchScore {
    fn new(matched: usize, a: &TripleSet, b: &TripleSet, map: &[Option<usize>]) -> Self {
        let (size_a, size_b) = (a.len(), b.len());
        let precision = if size_a == 0 {
            0.0
        } else {
            matched as f64 / size_a as f64
        };
        let recall = if size_b == 0 {
            0.0
        } else {
            matched as f64 / size_b as f64
        };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        let pairs = map
            .iter()
            .enumerate()
            .filter_map(|(i, m)| m.map(|j| (a.variables[i].clone(), b.variables[j].clone())))
            .collect();
        SmatchScore {
            matched,
            size_a,
            size_b,
            precision,
            recall,
            f1,
            witness: VariableMap { pairs },
        }
    }
}

/// Precomputed match weights for one `(a, b)` pair.
struct Alignment<'t> {
    a: &'t TripleSet,
    b: &'t TripleSet,
    /// `unary[i][j]`: instance and attribute triples of `a` at `i` matched
    /// when `i` maps to `j`.
    unary: Vec<Vec<u32>>,
    /// relations of `a` as (source, role id, target)
    rels: Vec<(usize, u32, usize)>,
    b_rels: HashSet<(usize, u32, usize)>,
    /// `b_rels` in a fixed order, for move generation
    b_rel_list: Vec<(usize, u32, usize)>,
    /// relation indices touching each variable of `a`
    incident: Vec<Vec<usize>>,
    /// `b` variables each `a` variable could usefully map to
    candidates: Vec<Vec<usize>>,
}

impl<'t> Alignment<'t> {
    fn new(a: &'t TripleSet, b: &'t TripleSet) -> Self {
        let (na, nb) = (a.variables.len(), b.variables.len());

        let mut b_unary: HashMap<(&str, &str), Vec<usize>> = HashMap::new();
        for (v, c) in &b.instances {
            b_unary.entry((INSTANCE, c)).or_default().push(*v);
        }
        for (v, r, c) in &b.attributes {
            b_unary.entry((r, c)).or_default().push(*v);
        }
        let mut unary = vec![vec![0u32; nb]; na];
        let a_unary = a
            .instances
            .iter()
            .map(|(v, c)| (*v, INSTANCE, c.as_str()))
            .chain(a.attributes.iter().map(|(v, r, c)| (*v, r.as_str(), c.as_str())));
        for (i, r, c) in a_unary {
            if let Some(js) = b_unary.get(&(r, c)) {
                for &j in js {
                    unary[i][j] += 1;
                }
            }
        }

        let mut role_ids: HashMap<&str, u32> = HashMap::new();
        let mut role_id = |r: &'t str| -> u32 {
            let next = role_ids.len() as u32;
            *role_ids.entry(r).or_insert(next)
        };
        let rels: Vec<(usize, u32, usize)> = a.relations.iter().map(|(s, r, t)| (*s, role_id(r), *t)).collect();
        let b_rels: HashSet<(usize, u32, usize)> = b.relations.iter().map(|(s, r, t)| (*s, role_id(r), *t)).collect();

        let mut b_rel_list: Vec<(usize, u32, usize)> = b_rels.iter().copied().collect();
        b_rel_list.sort_unstable();

        let mut incident = vec![Vec::new(); na];
        for (k, &(s, _, t)) in rels.iter().enumerate() {
            incident[s].push(k);
            if t != s {
                incident[t].push(k);
            }
        }

        let mut compatible = vec![vec![false; nb]; na];
        for i in 0..na {
            for j in 0..nb {
                compatible[i][j] = unary[i][j] > 0;
            }
        }
        for &(s, r, t) in &rels {
            for &(s2, r2, t2) in &b_rels {
                if r == r2 && (s == t) == (s2 == t2) {
                    compatible[s][s2] = true;
                    compatible[t][t2] = true;
                }
            }
        }
        let candidates = compatible
            .iter()
            .map(|row| row.iter().enumerate().filter(|(_, c)| **c).map(|(j, _)| j).collect())
            .collect();

        Alignment {
            a,
            b,
            unary,
            rels,
            b_rels,
            b_rel_list,
            incident,
            candidates,
        }
    }

    fn rel_matched(&self, k: usize, map: &[Option<usize>]) -> bool {
        let (s, r, t) = self.rels[k];
        match (map[s], map[t]) {
            (Some(ms), Some(mt)) => self.b_rels.contains(&(ms, r, mt)),
            _ => false,
        }
    }

    fn overlap(&self, map: &[Option<usize>]) -> usize {
        let unary: u32 = map
            .iter()
            .enumerate()
            .filter_map(|(i, m)| m.map(|j| self.unary[i][j]))
            .sum();
        let rel = (0..self.rels.len()).filter(|&k| self.rel_matched(k, map)).count();
        unary as usize + rel
    }

    /// Change in overlap when the listed variables take new values.
    fn delta(&self, map: &mut [Option<usize>], changes: &[(usize, Option<usize>)]) -> i64 {
        let mut touched: Vec<usize> = changes
            .iter()
            .flat_map(|&(i, _)| self.incident[i].iter().copied())
            .collect();
        touched.sort_unstable();
        touched.dedup();
        let unary = |m: &[Option<usize>], i: usize| m[i].map(|j| self.unary[i][j] as i64).unwrap_or(0);
        let before: i64 = changes.iter().map(|&(i, _)| unary(map, i)).sum::<i64>()
            + touched.iter().filter(|&&k| self.rel_matched(k, map)).count() as i64;
        let saved: Vec<(usize, Option<usize>)> = changes.iter().map(|&(i, _)| (i, map[i])).collect();
        for &(i, v) in changes {
            map[i] = v;
        }
        let after: i64 = changes.iter().map(|&(i, _)| unary(map, i)).sum::<i64>()
            + touched.iter().filter(|&&k| self.rel_matched(k, map)).count() as i64;
        for &(i, v) in &saved {
            map[i] = v;
        }
        after - before
    }

    fn exhaustive(&self) -> (usize, Vec<Option<usize>>) {
        let na = self.a.variables.len();
        // relations whose later endpoint (in index order) is each variable
        let mut closing: Vec<Vec<usize>> = vec![Vec::new(); na];
        for (k, &(s, _, t)) in self.rels.iter().enumerate() {
            closing[s.max(t)].push(k);
        }
        let mut state = Exhaustive {
            al: self,
            closing,
            map: vec![None; na],
            used: vec![false; self.b.variables.len()],
            best: 0,
            best_map: vec![None; na],
        };
        state.visit(0, 0);
        (state.best, state.best_map)
    }

    fn greedy_init(&self) -> Vec<Option<usize>> {
        let na = self.a.variables.len();
        let mut used = vec![false; self.b.variables.len()];
        let mut map = vec![None; na];
        for (i, slot) in map.iter_mut().enumerate() {
            let best = self.candidates[i]
                .iter()
                .copied()
                .filter(|&j| !used[j] && self.unary[i][j] > 0)
                .max_by(|&x, &y| self.unary[i][x].cmp(&self.unary[i][y]).then(y.cmp(&x)));
            if let Some(j) = best {
                used[j] = true;
                *slot = Some(j);
            }
        }
        map
    }

    fn random_init<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Option<usize>> {
        let na = self.a.variables.len();
        let mut used = vec![false; self.b.variables.len()];
        let mut map = vec![None; na];
        let mut order: Vec<usize> = (0..na).collect();
        order.shuffle(rng);
        for i in order {
            let free: Vec<usize> = self.candidates[i].iter().copied().filter(|&j| !used[j]).collect();
            if let Some(&j) = free.choose(rng) {
                used[j] = true;
                map[i] = Some(j);
            }
        }
        map
    }

    /// Steepest-ascent until no move helps. Moves: reassign one variable
    /// (or unmap it), swap two, or put both endpoints of an `a` relation
    /// onto a same-role `b` relation at once, unmapping whoever held those
    /// targets. The last one crosses plateaus where a relation needs two
    /// variables to move together.
    fn climb(&self, map: &mut [Option<usize>]) -> usize {
        let na = self.a.variables.len();
        let mut used = vec![false; self.b.variables.len()];
        for j in map.iter().flatten() {
            used[*j] = true;
        }
        let mut score = self.overlap(map);
        loop {
            let mut best_gain = 0i64;
            let mut best_move: Option<Vec<(usize, Option<usize>)>> = None;
            for i in 0..na {
                let options = self.candidates[i].iter().map(|&j| Some(j)).chain(std::iter::once(None));
                for new in options {
                    if new == map[i] || new.is_some_and(|j| used[j]) {
                        continue;
                    }
                    let change = [(i, new)];
                    let gain = self.delta(map, &change);
                    if gain > best_gain {
                        best_gain = gain;
                        best_move = Some(change.to_vec());
                    }
                }
            }
            for i in 0..na {
                for k in (i + 1)..na {
                    if map[i] == map[k] {
                        continue;
                    }
                    let change = [(i, map[k]), (k, map[i])];
                    let gain = self.delta(map, &change);
                    if gain > best_gain {
                        best_gain = gain;
                        best_move = Some(change.to_vec());
                    }
                }
            }
            for &(s, r, t) in &self.rels {
                for &(s2, r2, t2) in &self.b_rel_list {
                    if r != r2 || (s == t) != (s2 == t2) || (map[s] == Some(s2) && map[t] == Some(t2)) {
                        continue;
                    }
                    let mut change = vec![(s, Some(s2))];
                    if t != s {
                        change.push((t, Some(t2)));
                    }
                    for (i, m) in map.iter().enumerate() {
                        if i != s && i != t && (*m == Some(s2) || *m == Some(t2)) {
                            change.push((i, None));
                        }
                    }
                    let gain = self.delta(map, &change);
                    if gain > best_gain {
                        best_gain = gain;
                        best_move = Some(change);
                    }
                }
            }
            let Some(mv) = best_move else { break };
            for &(i, v) in &mv {
                map[i] = v;
            }
            used.fill(false);
            for j in map.iter().flatten() {
                used[*j] = true;
            }
            score = (score as i64 + best_gain) as usize;
        }
        debug_assert_eq!(score, self.overlap(map));
        score
    }
}

struct Exhaustive<'a, 't> {
    al: &'a Alignment<'t>,
    closing: Vec<Vec<usize>>,
    map: Vec<Option<usize>>,
    used: Vec<bool>,
    best: usize,
    best_map: Vec<Option<usize>>,
}

impl Exhaustive<'_, '_> {
    fn visit(&mut self, i: usize, acc: usize) {
        if i == self.map.len() {
            if acc > self.best {
                self.best = acc;
                self.best_map = self.map.clone();
            }
            return;
        }
        // leave `i` unmapped
        self.visit(i + 1, acc);
        for ci in 0..self.al.candidates[i].len() {
            let j = self.al.candidates[i][ci];
            if self.used[j] {
                continue;
            }
            self.used[j] = true;
            self.map[i] = Some(j);
            let gain = self.al.unary[i][j] as usize
                + self.closing[i]
                    .iter()
                    .filter(|&&k| self.al.rel_matched(k, &self.map))
                    .count();
            self.visit(i + 1, acc + gain);
            self.map[i] = None;
            self.used[j] = false;
        }
    }
}

/// Maximum overlap by enumerating every injective partial map over
/// compatible variable pairs (pairs that could match at least one triple).
pub fn score_exact(a: &TripleSet, b: &TripleSet) -> Result<SmatchScore, SmatchError> {
    score_exact_bounded(a, b, EXACT_VARIABLE_BOUND)
}

pub fn score_exact_bounded(a: &TripleSet, b: &TripleSet, bound: usize) -> Result<SmatchScore, SmatchError> {
    for vars in [a.variables.len(), b.variables.len()] {
        if vars > bound {
            return Err(SmatchError::GraphTooLarge { vars, bound });
        }
    }
    let al = Alignment::new(a, b);
    let (best, map) = al.exhaustive();
    Ok(SmatchScore::new(best, a, b, &map))
}

/// Hill-climbing search: the first restart starts from a greedy concept
/// match, the rest from random maps. Deterministic for a given `rng`
/// state. `restarts` below 1 is treated as 1.
pub fn score<R: Rng + ?Sized>(a: &TripleSet, b: &TripleSet, restarts: usize, rng: &mut R) -> SmatchScore {
    let al = Alignment::new(a, b);
    let mut best: Option<(usize, Vec<Option<usize>>)> = None;
    for r in 0..restarts.max(1) {
        let mut map = if r == 0 { al.greedy_init() } else { al.random_init(rng) };
        let s = al.climb(&mut map);
        if best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, map));
        }
    }
    let (matched, map) = best.unwrap_or_default();
    SmatchScore::new(matched, a, b, &map)
}

/// Exact search when both sides have at most `bound` variables, hill
/// climbing with a fixed seed otherwise.
pub fn score_auto(a: &TripleSet, b: &TripleSet, bound: usize) -> SmatchScore {
    match score_exact_bounded(a, b, bound) {
        Ok(s) => s,
        Err(_) => {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            score(a, b, DEFAULT_RESTARTS, &mut rng)
        }
    }
}

/// How subgraph pairs are compared.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityMode {
    /// Size-normalized F1 in `[0, 1]`.
    #[default]
    F1,
    /// Matched triple count.
    RawF,
}

/// SMATCH similarity between two subgraphs over their induced triples.
pub fn subgraph_similarity(g1: &AmrGraph, s1: &Subgraph, g2: &AmrGraph, s2: &Subgraph, mode: SimilarityMode) -> f64 {
    let a = TripleSet::from_subgraph(g1, s1);
    let b = TripleSet::from_subgraph(g2, s2);
    let s = score_auto(&a, &b, EXACT_SUBGRAPH_BOUND);
    match mode {
        SimilarityMode::F1 => s.f1,
        SimilarityMode::RawF => s.matched as f64,
    }
}
