use super::graph::{AmrGraph, InvariantViolation, Target};

/// Spanning-tree reading of an [`AmrGraph`].
///
/// A depth-first walk from the root over outgoing relations in stored
/// order assigns each variable the edge that first discovers it as its
/// tree parent. Every other relation is reentrant. This is the reading a
/// PENMAN serialization of the graph makes explicit.
///
/// Depth counts edges: the root has depth 0, and the height of a leaf
/// subtree is 0.
#[derive(Debug, Clone)]
pub struct TreeView<'g> {
    graph: &'g AmrGraph,
    order: Vec<usize>,
    parent_edge: Vec<Option<usize>>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    height: Vec<usize>,
    reentrant: Vec<usize>,
    // pre-order interval [pos, end) of each subtree
    pos: Vec<usize>,
    end: Vec<usize>,
}

impl<'g> TreeView<'g> {
    pub(crate) fn build(graph: &'g AmrGraph) -> Result<Self, InvariantViolation> {
        let n = graph.len();
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (ei, e) in graph.edges().iter().enumerate() {
            if let Target::Var(_) = e.target {
                // endpoints were validated by the caller
                let s = graph
                    .var_index(&e.source)
                    .ok_or_else(|| InvariantViolation::UnknownSource(e.source.clone()))?;
                out[s].push(ei);
            }
        }
        let root = graph
            .var_index(graph.root())
            .ok_or_else(|| InvariantViolation::MissingRoot(graph.root().to_string()))?;

        let mut visited = vec![false; n];
        let mut parent_edge = vec![None; n];
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0; n];
        let mut reentrant = Vec::new();
        let mut order = Vec::with_capacity(n);

        // (variable, cursor into its outgoing edges)
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        visited[root] = true;
        order.push(root);
        while let Some(frame) = stack.last_mut() {
            let (v, cursor) = *frame;
            if cursor == out[v].len() {
                stack.pop();
                continue;
            }
            frame.1 += 1;
            let ei = out[v][cursor];
            let target = graph.edges()[ei].target.as_str();
            let t = graph
                .var_index(target)
                .ok_or_else(|| InvariantViolation::UnknownTarget(target.to_string()))?;
            if visited[t] {
                reentrant.push(ei);
            } else {
                visited[t] = true;
                parent_edge[t] = Some(ei);
                parent[t] = Some(v);
                children[v].push(t);
                depth[t] = depth[v] + 1;
                order.push(t);
                stack.push((t, 0));
            }
        }
        if let Some(u) = visited.iter().position(|seen| !seen) {
            return Err(InvariantViolation::Unreachable(graph.instances()[u].var.clone()));
        }

        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut height = vec![0; n];
        let mut end = vec![0; n];
        for &v in order.iter().rev() {
            height[v] = children[v].iter().map(|&c| height[c] + 1).max().unwrap_or(0);
            end[v] = children[v].iter().map(|&c| end[c]).max().unwrap_or(pos[v] + 1);
        }
        Ok(TreeView {
            graph,
            order,
            parent_edge,
            parent,
            children,
            depth,
            height,
            reentrant,
            pos,
            end,
        })
    }

    pub fn graph(&self) -> &'g AmrGraph {
        self.graph
    }

    fn idx(&self, var: &str) -> Option<usize> {
        self.graph.var_index(var)
    }

    fn name(&self, i: usize) -> &'g str {
        &self.graph.instances()[i].var
    }

    /// Variables in pre-order (surface order of their defining occurrence).
    pub fn preorder(&self) -> impl Iterator<Item = &'g str> + '_ {
        self.order.iter().map(|&i| self.name(i))
    }

    /// Edges from the root to this variable, or `None` if unknown.
    pub fn depth(&self, var: &str) -> Option<usize> {
        self.idx(var).map(|i| self.depth[i])
    }

    /// Longest downward edge count inside the subtree rooted at `var`.
    pub fn height(&self, var: &str) -> Option<usize> {
        self.idx(var).map(|i| self.height[i])
    }

    pub fn parent(&self, var: &str) -> Option<&'g str> {
        self.idx(var).and_then(|i| self.parent[i]).map(|p| self.name(p))
    }

    /// Role of the tree edge entering `var`.
    pub fn parent_role(&self, var: &str) -> Option<&'g str> {
        let ei = self.idx(var).and_then(|i| self.parent_edge[i])?;
        Some(self.graph.edges()[ei].role.as_str())
    }

    /// Index into `graph.edges()` of the tree edge entering `var`.
    pub fn parent_edge(&self, var: &str) -> Option<usize> {
        self.idx(var).and_then(|i| self.parent_edge[i])
    }

    pub fn children(&self, var: &str) -> Vec<&'g str> {
        self.idx(var)
            .map(|i| self.children[i].iter().map(|&c| self.name(c)).collect())
            .unwrap_or_default()
    }

    /// `var` and all its tree descendants, in pre-order.
    pub fn subtree(&self, var: &str) -> Vec<&'g str> {
        match self.idx(var) {
            Some(i) => self.order[self.pos[i]..self.end[i]]
                .iter()
                .map(|&v| self.name(v))
                .collect(),
            None => Vec::new(),
        }
    }

    /// True when `descendant` lies in the subtree rooted at `ancestor`
    /// (a variable counts as its own descendant).
    pub fn contains(&self, ancestor: &str, descendant: &str) -> bool {
        match (self.idx(ancestor), self.idx(descendant)) {
            (Some(a), Some(d)) => self.pos[a] <= self.pos[d] && self.pos[d] < self.end[a],
            _ => false,
        }
    }

    /// Proper tree ancestors of `var`, nearest first.
    pub fn ancestors(&self, var: &str) -> Vec<&'g str> {
        let mut out = Vec::new();
        let mut cur = self.idx(var).and_then(|i| self.parent[i]);
        while let Some(p) = cur {
            out.push(self.name(p));
            cur = self.parent[p];
        }
        out
    }

    /// Indices into `graph.edges()` of relations that are not tree edges.
    pub fn reentrant_edges(&self) -> &[usize] {
        &self.reentrant
    }

    pub fn is_tree_edge(&self, edge_index: usize) -> bool {
        let e = &self.graph.edges()[edge_index];
        match e.target.as_var().and_then(|t| self.idx(t)) {
            Some(t) => self.parent_edge[t] == Some(edge_index),
            None => false,
        }
    }
}
