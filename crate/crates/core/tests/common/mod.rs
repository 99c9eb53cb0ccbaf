//! Brute-force oracles shared by the integration and acceptance tests.
//!
//! Everything here works from the raw instances and edges of a graph and
//! enumerates all candidate maps, so it shares no search code with the
//! library.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;

use abex_core::penman::{parse_penman, AmrGraph, Edge, Instance, Target};
use abex_core::smatch::{Triple, TripleSet};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Graphs of a blank-line separated PENMAN file, keyed by `# ::id`.
pub fn load_penman_file(path: &std::path::Path) -> Vec<(String, String)> {
    let text = std::fs::read_to_string(path).expect("fixture file");
    let mut out = Vec::new();
    for block in text.split("\n\n") {
        let mut id = None;
        let mut body = Vec::new();
        for line in block.lines() {
            if let Some(rest) = line.trim_start().strip_prefix("# ::id ") {
                id = Some(rest.trim().to_string());
            } else if !line.trim_start().starts_with('#') && !line.trim().is_empty() {
                body.push(line);
            }
        }
        if !body.is_empty() {
            out.push((id.unwrap_or_else(|| format!("block{}", out.len())), body.join("\n")));
        }
    }
    out
}

pub fn fixture_graphs() -> Vec<(String, AmrGraph)> {
    load_penman_file(&fixtures_dir().join("graphs.penman"))
        .into_iter()
        .map(|(id, s)| {
            let g = parse_penman(&s).unwrap_or_else(|e| panic!("fixture {id}: {e}"));
            (id, g)
        })
        .collect()
}

/// Same graph under fresh variable names, with instances and edges shuffled.
pub fn rename_shuffle<R: Rng>(g: &AmrGraph, rng: &mut R) -> AmrGraph {
    let mut fresh: Vec<String> = (0..g.len()).map(|i| format!("q{i}")).collect();
    fresh.shuffle(rng);
    let names: HashMap<&str, String> = g.variables().zip(fresh).collect();
    let mut instances: Vec<Instance> = g
        .instances()
        .iter()
        .map(|i| Instance {
            var: names[i.var.as_str()].clone(),
            concept: i.concept.clone(),
        })
        .collect();
    instances.shuffle(rng);
    let mut edges: Vec<Edge> = g
        .edges()
        .iter()
        .map(|e| Edge {
            source: names[e.source.as_str()].clone(),
            role: e.role.clone(),
            target: match &e.target {
                Target::Var(v) => Target::Var(names[v.as_str()].clone()),
                Target::Const(c) => Target::Const(c.clone()),
            },
        })
        .collect();
    edges.shuffle(rng);
    AmrGraph::from_parts(names[g.root()].clone(), instances, edges).expect("renaming keeps validity")
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

type EdgeKey = (String, String, String, bool);

fn edge_multiset(g: &AmrGraph, rename: &HashMap<&str, &str>) -> BTreeMap<EdgeKey, usize> {
    let mut m = BTreeMap::new();
    for e in g.edges() {
        let key = match &e.target {
            Target::Var(v) => (
                rename[e.source.as_str()].to_string(),
                e.role.clone(),
                rename[v.as_str()].to_string(),
                true,
            ),
            Target::Const(c) => (rename[e.source.as_str()].to_string(), e.role.clone(), c.clone(), false),
        };
        *m.entry(key).or_insert(0) += 1;
    }
    m
}

/// Tries every bijection of variables that maps root to root.
pub fn brute_isomorphic(a: &AmrGraph, b: &AmrGraph) -> bool {
    if a.len() != b.len() || a.edges().len() != b.edges().len() {
        return false;
    }
    let va: Vec<&str> = a.variables().collect();
    let vb: Vec<&str> = b.variables().collect();
    let identity: HashMap<&str, &str> = vb.iter().map(|v| (*v, *v)).collect();
    let target = edge_multiset(b, &identity);
    for perm in permutations(va.len()) {
        let map: HashMap<&str, &str> = va.iter().enumerate().map(|(i, v)| (*v, vb[perm[i]])).collect();
        if map[a.root()] != b.root() {
            continue;
        }
        if va.iter().any(|v| a.concept(v) != b.concept(map[v])) {
            continue;
        }
        if edge_multiset(a, &map) == target {
            return true;
        }
    }
    false
}

fn map_triple(t: &Triple, map: &HashMap<&str, &str>) -> Option<Triple> {
    Some(match t {
        Triple::Instance { var, concept } => Triple::Instance {
            var: map.get(var.as_str())?.to_string(),
            concept: concept.clone(),
        },
        Triple::Relation { source, role, target } => Triple::Relation {
            source: map.get(source.as_str())?.to_string(),
            role: role.clone(),
            target: map.get(target.as_str())?.to_string(),
        },
        Triple::Attribute { source, role, value } => Triple::Attribute {
            source: map.get(source.as_str())?.to_string(),
            role: role.clone(),
            value: value.clone(),
        },
    })
}

/// Maximum triple overlap over every injective partial map.
pub fn brute_smatch_f(a: &TripleSet, b: &TripleSet) -> usize {
    let ta = a.triples();
    let tb: BTreeSet<Triple> = b.triples().into_iter().collect();
    let va: Vec<&str> = a.variables().iter().map(String::as_str).collect();
    let vb: Vec<&str> = b.variables().iter().map(String::as_str).collect();
    let mut best = 0;
    let mut map = HashMap::new();
    let mut used = vec![false; vb.len()];
    extend(0, &va, &vb, &ta, &tb, &mut map, &mut used, &mut best);
    best
}

#[allow(clippy::too_many_arguments)]
fn extend<'a>(
    i: usize,
    va: &[&'a str],
    vb: &[&'a str],
    ta: &[Triple],
    tb: &BTreeSet<Triple>,
    map: &mut HashMap<&'a str, &'a str>,
    used: &mut [bool],
    best: &mut usize,
) {
    if i == va.len() {
        let f = ta
            .iter()
            .filter(|t| map_triple(t, map).is_some_and(|m| tb.contains(&m)))
            .count();
        *best = (*best).max(f);
        return;
    }
    extend(i + 1, va, vb, ta, tb, map, used, best);
    for j in 0..vb.len() {
        if !used[j] {
            used[j] = true;
            map.insert(va[i], vb[j]);
            extend(i + 1, va, vb, ta, tb, map, used, best);
            map.remove(va[i]);
            used[j] = false;
        }
    }
}

/// Dense count vectors over the joint vocabulary, then the textbook cosine.
pub fn dense_cosine(a: &str, b: &str) -> f64 {
    let tok = |s: &str| -> Vec<String> {
        s.split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .map(|t| t.to_lowercase())
            .collect()
    };
    let (ta, tb) = (tok(a), tok(b));
    let vocab: BTreeSet<&String> = ta.iter().chain(&tb).collect();
    let count = |toks: &[String], w: &String| toks.iter().filter(|t| *t == w).count() as f64;
    let ea: Vec<f64> = vocab.iter().map(|w| count(&ta, w)).collect();
    let eb: Vec<f64> = vocab.iter().map(|w| count(&tb, w)).collect();
    let dot: f64 = ea.iter().zip(&eb).map(|(x, y)| x * y).sum();
    let na = ea.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = eb.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// All n-grams (n = 1..3) not starting or ending with a stopword, scored by
/// dense cosine against the label; top k by score, then first position.
pub fn brute_tri(document: &str, label: &str, k: usize, stopwords: &[&str]) -> Vec<String> {
    let toks: Vec<String> = document
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect();
    let stop = |t: &str| stopwords.contains(&t);
    let mut scored: Vec<(f64, usize, usize, String)> = Vec::new();
    for start in 0..toks.len() {
        for n in 1..=3 {
            if start + n > toks.len() {
                continue;
            }
            let gram = &toks[start..start + n];
            if stop(&gram[0]) || stop(&gram[n - 1]) {
                continue;
            }
            let text = gram.join(" ");
            if scored.iter().any(|s| s.3 == text) {
                continue;
            }
            let s = dense_cosine(&text, label);
            scored.push((s, start, n, text));
        }
    }
    scored.retain(|s| s.0 > 0.0);
    scored.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then((x.1, x.2).cmp(&(y.1, y.2))));
    scored.into_iter().take(k).map(|s| s.3).collect()
}

/// Tree descendants of `v` (inclusive), via parent pointers only.
pub fn subtree_by_parents(g: &AmrGraph, v: &str) -> BTreeSet<String> {
    let tree = g.tree();
    g.variables()
        .filter(|u| {
            let mut cur = Some(*u);
            while let Some(c) = cur {
                if c == v {
                    return true;
                }
                cur = tree.parent(c);
            }
            false
        })
        .map(str::to_string)
        .collect()
}

/// Longest downward path in the tree, computed from parent pointers.
pub fn height_by_parents(g: &AmrGraph, v: &str) -> usize {
    let tree = g.tree();
    subtree_by_parents(g, v)
        .iter()
        .map(|u| {
            let mut d = 0;
            let mut cur = u.as_str();
            while cur != v {
                cur = tree.parent(cur).expect("descendant has a parent");
                d += 1;
            }
            d
        })
        .max()
        .unwrap_or(0)
}
