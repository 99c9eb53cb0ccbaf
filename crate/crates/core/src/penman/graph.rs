use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::tree::TreeView;

/// Target of an outgoing edge: another variable (a relation) or a constant
/// (an attribute).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Var(String),
    /// Stored verbatim; quoted strings keep their quotes.
    Const(String),
}

impl Target {
    pub fn as_str(&self) -> &str {
        match self {
            Target::Var(v) | Target::Const(v) => v,
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Target::Var(v) => Some(v),
            Target::Const(_) => None,
        }
    }

    pub fn as_const(&self) -> Option<&str> {
        match self {
            Target::Const(c) => Some(c),
            Target::Var(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    pub var: String,
    pub concept: String,
}

/// Directed labeled edge, stored as it appears in PENMAN surface order.
/// Inverted roles such as `:ARG0-of` are kept as written.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: String,
    pub role: String,
    pub target: Target,
}

impl Edge {
    pub fn relation(source: impl Into<String>, role: impl Into<String>, target: impl Into<String>) -> Self {
        Edge {
            source: source.into(),
            role: role.into(),
            target: Target::Var(target.into()),
        }
    }

    pub fn attribute(source: impl Into<String>, role: impl Into<String>, value: impl Into<String>) -> Self {
        Edge {
            source: source.into(),
            role: role.into(),
            target: Target::Const(value.into()),
        }
    }

    pub fn is_relation(&self) -> bool {
        matches!(self.target, Target::Var(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantViolation {
    #[error("graph has no instances")]
    Empty,
    #[error("root `{0}` is not a variable of the graph")]
    MissingRoot(String),
    #[error("variable `{0}` has more than one instance")]
    DuplicateInstance(String),
    #[error("edge source `{0}` is not a variable of the graph")]
    UnknownSource(String),
    #[error("relation target `{0}` is not a variable of the graph")]
    UnknownTarget(String),
    #[error("variable `{0}` is not reachable from the root")]
    Unreachable(String),
    #[error("`{0}` is not a valid role")]
    InvalidRole(String),
    #[error("`{0}` is not a valid variable name")]
    InvalidVariable(String),
    #[error("`{0}` is not a valid concept")]
    InvalidConcept(String),
    #[error("constant `{0}` cannot be written unambiguously")]
    InvalidConstant(String),
}

/// Rooted, labeled AMR graph.
///
/// Construction always goes through [`AmrGraph::from_parts`] (or the
/// parser, which calls it), so every value of this type satisfies the
/// graph invariants: single instance per variable, known edge endpoints,
/// valid roles, and every variable reachable from the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmrGraph {
    root: String,
    instances: Vec<Instance>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
}

pub(crate) fn is_symbol_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | '"' | '/')
}

fn is_symbol(s: &str) -> bool {
    !s.is_empty() && !s.starts_with(':') && s.chars().all(is_symbol_char)
}

pub(crate) fn is_role(s: &str) -> bool {
    s.len() > 1 && s.starts_with(':') && s[1..].chars().all(is_symbol_char)
}

/// Atoms of this shape (`s`, `s2`, `zz10`) are read as variable references;
/// an undefined one is a dangling reference rather than a constant.
pub(crate) fn is_variable_shaped(s: &str) -> bool {
    let letters = s.bytes().take_while(u8::is_ascii_lowercase).count();
    let digits = s.len() - letters;
    letters >= 1 && s.bytes().skip(letters).all(|b| b.is_ascii_digit()) && (letters == 1 || digits > 0)
}

pub(crate) fn is_quoted(s: &str) -> bool {
    if s.len() < 2 || !s.starts_with('"') || !s.ends_with('"') {
        return false;
    }
    let inner = &s[1..s.len() - 1];
    let mut escaped = false;
    for c in inner.chars() {
        match (escaped, c) {
            (true, _) => escaped = false,
            (false, '\\') => escaped = true,
            (false, '"') => return false,
            _ => {}
        }
    }
    !escaped
}

impl AmrGraph {
    /// Builds a graph from its parts, checking every invariant.
    ///
    /// Instance order defines variable order; edge order is the order in
    /// which outgoing edges are serialized.
    pub fn from_parts(
        root: impl Into<String>,
        instances: Vec<Instance>,
        edges: Vec<Edge>,
    ) -> Result<Self, InvariantViolation> {
        let root = root.into();
        if instances.is_empty() {
            return Err(InvariantViolation::Empty);
        }
        let mut index = HashMap::with_capacity(instances.len());
        for (i, inst) in instances.iter().enumerate() {
            if !is_symbol(&inst.var) {
                return Err(InvariantViolation::InvalidVariable(inst.var.clone()));
            }
            if !is_symbol(&inst.concept) {
                return Err(InvariantViolation::InvalidConcept(inst.concept.clone()));
            }
            if index.insert(inst.var.clone(), i).is_some() {
                return Err(InvariantViolation::DuplicateInstance(inst.var.clone()));
            }
        }
        if !index.contains_key(&root) {
            return Err(InvariantViolation::MissingRoot(root));
        }
        for e in &edges {
            if !is_role(&e.role) {
                return Err(InvariantViolation::InvalidRole(e.role.clone()));
            }
            if !index.contains_key(&e.source) {
                return Err(InvariantViolation::UnknownSource(e.source.clone()));
            }
            match &e.target {
                Target::Var(v) => {
                    if !index.contains_key(v) {
                        return Err(InvariantViolation::UnknownTarget(v.clone()));
                    }
                }
                Target::Const(c) => {
                    let ok = is_quoted(c) || (is_symbol(c) && !index.contains_key(c) && !is_variable_shaped(c));
                    if !ok {
                        return Err(InvariantViolation::InvalidConstant(c.clone()));
                    }
                }
            }
        }
        let graph = AmrGraph {
            root,
            instances,
            edges,
            index,
        };
        TreeView::build(&graph)?;
        Ok(graph)
    }

    /// Single-node graph `(var / concept)`.
    pub fn singleton(var: impl Into<String>, concept: impl Into<String>) -> Result<Self, InvariantViolation> {
        let var = var.into();
        Self::from_parts(
            var.clone(),
            vec![Instance {
                var,
                concept: concept.into(),
            }],
            Vec::new(),
        )
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> + '_ {
        self.instances.iter().map(|i| i.var.as_str())
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    /// Always false: a graph has at least its root.
    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn contains(&self, var: &str) -> bool {
        self.index.contains_key(var)
    }

    pub fn var_index(&self, var: &str) -> Option<usize> {
        self.index.get(var).copied()
    }

    pub fn concept(&self, var: &str) -> Option<&str> {
        self.var_index(var).map(|i| self.instances[i].concept.as_str())
    }

    /// Relation triples `(source, role, target)` in stored order.
    pub fn relations(&self) -> impl Iterator<Item = (&str, &str, &str)> + '_ {
        self.edges.iter().filter_map(|e| match &e.target {
            Target::Var(t) => Some((e.source.as_str(), e.role.as_str(), t.as_str())),
            Target::Const(_) => None,
        })
    }

    /// Attribute triples `(source, role, constant)` in stored order.
    pub fn attributes(&self) -> impl Iterator<Item = (&str, &str, &str)> + '_ {
        self.edges.iter().filter_map(|e| match &e.target {
            Target::Const(c) => Some((e.source.as_str(), e.role.as_str(), c.as_str())),
            Target::Var(_) => None,
        })
    }

    /// Tree reading of the graph; first occurrence in surface order wins.
    pub fn tree(&self) -> TreeView<'_> {
        // from_parts already proved the graph is rooted-connected
        TreeView::build(self).expect("AmrGraph invariants guarantee a spanning tree")
    }

    /// Depth of the whole graph in edges; a single node has depth 0.
    pub fn depth(&self) -> usize {
        self.tree().height(&self.root).unwrap_or(0)
    }
}

impl fmt::Display for AmrGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::serialize_penman(self))
    }
}
