use std::collections::HashMap;

use super::graph::{AmrGraph, Target};

/// Edge multiset keyed by variable indices; constants are kept as strings.
type EdgeCounts<'g> = HashMap<(usize, &'g str, EdgeEnd<'g>), usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum EdgeEnd<'g> {
    Var(usize),
    Const(&'g str),
}

struct Indexed<'g> {
    edges: EdgeCounts<'g>,
    // per-variable sorted signature: concept, outgoing roles, incoming roles, attributes
    signature: Vec<Signature<'g>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Signature<'g> {
    concept: &'g str,
    out_roles: Vec<&'g str>,
    in_roles: Vec<&'g str>,
    attrs: Vec<(&'g str, &'g str)>,
}

impl<'g> Indexed<'g> {
    fn new(graph: &'g AmrGraph) -> Self {
        let mut edges: EdgeCounts<'g> = HashMap::new();
        let mut signature: Vec<Signature<'g>> = graph
            .instances()
            .iter()
            .map(|i| Signature {
                concept: &i.concept,
                out_roles: Vec::new(),
                in_roles: Vec::new(),
                attrs: Vec::new(),
            })
            .collect();
        for e in graph.edges() {
            let s = graph.var_index(&e.source).unwrap_or(0);
            let end = match &e.target {
                Target::Var(t) => {
                    let t = graph.var_index(t).unwrap_or(0);
                    signature[s].out_roles.push(&e.role);
                    signature[t].in_roles.push(&e.role);
                    EdgeEnd::Var(t)
                }
                Target::Const(c) => {
                    signature[s].attrs.push((&e.role, c));
                    EdgeEnd::Const(c)
                }
            };
            *edges.entry((s, e.role.as_str(), end)).or_default() += 1;
        }
        for sig in &mut signature {
            sig.out_roles.sort_unstable();
            sig.in_roles.sort_unstable();
            sig.attrs.sort_unstable();
        }
        Indexed { edges, signature }
    }

    fn count(&self, s: usize, role: &'g str, end: EdgeEnd<'g>) -> usize {
        self.edges.get(&(s, role, end)).copied().unwrap_or(0)
    }
}

/// True when `a` and `b` are equal up to a renaming of variables that maps
/// root to root. Edge multiplicities must agree.
///
/// Backtracking over variables in `a`'s tree order, with candidates
/// filtered by a per-variable signature and pairwise edge counts checked
/// as soon as both endpoints are assigned.
pub fn is_isomorphic<'g>(a: &'g AmrGraph, b: &'g AmrGraph) -> bool {
    if a.len() != b.len() || a.edges().len() != b.edges().len() {
        return false;
    }
    let ia = Indexed::new(a);
    let ib = Indexed::new(b);

    let order: Vec<usize> = a.tree().preorder().map(|v| a.var_index(v).unwrap_or(0)).collect();
    let root_a = a.var_index(a.root()).unwrap_or(0);
    let root_b = b.var_index(b.root()).unwrap_or(0);
    if ia.signature[root_a] != ib.signature[root_b] {
        return false;
    }

    // relation edges of `a` between each variable and the ones before it in `order`
    let mut rank = vec![0; a.len()];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let mut back: Vec<Vec<(usize, &'g str, usize, usize)>> = vec![Vec::new(); a.len()];
    for (&(s, role, end), &count) in &ia.edges {
        if let EdgeEnd::Var(t) = end {
            let later = if rank[s] >= rank[t] { s } else { t };
            back[later].push((s, role, t, count));
        }
    }

    let candidates: Vec<Vec<usize>> = (0..a.len())
        .map(|v| (0..b.len()).filter(|&w| ia.signature[v] == ib.signature[w]).collect())
        .collect();

    let mut map = vec![usize::MAX; a.len()];
    let mut used = vec![false; b.len()];
    search(0, &order, &candidates, &back, &ib, root_a, root_b, &mut map, &mut used)
}

#[allow(clippy::too_many_arguments)]
fn search<'g>(
    depth: usize,
    order: &[usize],
    candidates: &[Vec<usize>],
    back: &[Vec<(usize, &'g str, usize, usize)>],
    ib: &Indexed<'g>,
    root_a: usize,
    root_b: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    for &w in &candidates[v] {
        if used[w] || ((v == root_a) != (w == root_b)) {
            continue;
        }
        map[v] = w;
        let consistent = back[v]
            .iter()
            .all(|&(s, role, t, count)| ib.count(map[s], role, EdgeEnd::Var(map[t])) == count);
        if consistent {
            used[w] = true;
            if search(depth + 1, order, candidates, back, ib, root_a, root_b, map, used) {
                return true;
            }
            used[w] = false;
        }
        map[v] = usize::MAX;
    }
    false
}
