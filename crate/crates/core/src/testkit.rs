//! Random valid graphs for tests and benchmarks.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::penman::{AmrGraph, Edge, Instance};

pub const CONCEPTS: &[&str] = &[
    "say-01", "person", "victory", "win-01", "team", "city", "and", "thing", "good-02", "want-01",
];
pub const ROLES: &[&str] = &[":ARG0", ":ARG1", ":ARG2", ":mod", ":location", ":op1", ":poss"];
pub const ATTRIBUTE_ROLES: &[&str] = &[":quant", ":polarity", ":name", ":value", ":mode"];
pub const CONSTANTS: &[&str] = &["2", "-", "\"Paris\"", "imperative", "\"a b\"", "10.5"];

/// Shape parameters for [`GraphGen::generate`].
#[derive(Debug, Clone)]
pub struct GraphGen {
    pub min_vars: usize,
    pub max_vars: usize,
    /// Probability of each extra (reentrant) relation slot being filled.
    pub reentrancy: f64,
    /// Probability of each variable carrying an attribute.
    pub attributes: f64,
    pub concepts: &'static [&'static str],
}

impl Default for GraphGen {
    fn default() -> Self {
        GraphGen {
            min_vars: 1,
            max_vars: 8,
            reentrancy: 0.2,
            attributes: 0.3,
            concepts: CONCEPTS,
        }
    }
}

impl GraphGen {
    pub fn small(max_vars: usize) -> Self {
        GraphGen {
            max_vars,
            ..GraphGen::default()
        }
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> AmrGraph {
        let n = rng.random_range(self.min_vars.max(1)..=self.max_vars.max(self.min_vars).max(1));
        let mut names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        names.shuffle(rng);

        let instances: Vec<Instance> = names
            .iter()
            .map(|v| Instance {
                var: v.clone(),
                concept: self.concepts.choose(rng).expect("non-empty concept list").to_string(),
            })
            .collect();

        let mut edges = Vec::new();
        for i in 1..n {
            let parent = rng.random_range(0..i);
            let role = ROLES.choose(rng).expect("roles");
            edges.push(Edge::relation(names[parent].clone(), *role, names[i].clone()));
        }
        if n > 1 {
            for _ in 0..n {
                if rng.random_bool(self.reentrancy) {
                    let s = rng.random_range(0..n);
                    let t = rng.random_range(0..n);
                    if s != t {
                        let role = ROLES.choose(rng).expect("roles");
                        edges.push(Edge::relation(names[s].clone(), *role, names[t].clone()));
                    }
                }
            }
        }
        for name in &names {
            if rng.random_bool(self.attributes) {
                let role = ATTRIBUTE_ROLES.choose(rng).expect("roles");
                let value = CONSTANTS.choose(rng).expect("constants");
                edges.push(Edge::attribute(name.clone(), *role, *value));
            }
        }
        edges.shuffle(rng);
        AmrGraph::from_parts(names[0].clone(), instances, edges)
            .expect("generated graphs are rooted trees plus extra edges")
    }
}
