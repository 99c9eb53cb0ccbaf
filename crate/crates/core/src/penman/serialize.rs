use super::graph::{AmrGraph, Target};

/// Token stream of the single-line PENMAN rendering of `graph`.
///
/// Emission is a depth-first walk from the root; each node lists its
/// outgoing edges in stored order. A relation whose target was already
/// emitted is written as the bare variable.
pub fn linearize(graph: &AmrGraph) -> Vec<String> {
    let tree = graph.tree();
    let n = graph.len();
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ei, e) in graph.edges().iter().enumerate() {
        if let Some(s) = graph.var_index(&e.source) {
            out_edges[s].push(ei);
        }
    }

    let mut toks = Vec::with_capacity(4 * n + 2 * graph.edges().len());
    let open = |toks: &mut Vec<String>, v: usize| {
        let inst = &graph.instances()[v];
        toks.push("(".to_string());
        toks.push(inst.var.clone());
        toks.push("/".to_string());
        toks.push(inst.concept.clone());
    };

    // graph invariants guarantee the root exists
    let root = graph.var_index(graph.root()).unwrap_or(0);
    open(&mut toks, root);
    let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
    while let Some(frame) = stack.last_mut() {
        let (v, cursor) = *frame;
        if cursor == out_edges[v].len() {
            toks.push(")".to_string());
            stack.pop();
            continue;
        }
        frame.1 += 1;
        let ei = out_edges[v][cursor];
        let e = &graph.edges()[ei];
        toks.push(e.role.clone());
        match &e.target {
            Target::Const(c) => toks.push(c.clone()),
            Target::Var(t) => {
                if tree.is_tree_edge(ei) {
                    let ti = graph.var_index(t).unwrap_or(0);
                    open(&mut toks, ti);
                    stack.push((ti, 0));
                } else {
                    toks.push(t.clone());
                }
            }
        }
    }
    toks
}

/// Joins PENMAN tokens with single spaces, omitting the space after `(`
/// and before `)`.
pub fn join_tokens<S: AsRef<str>>(toks: &[S]) -> String {
    let mut s = String::new();
    let mut prev_open = true;
    for t in toks {
        let t = t.as_ref();
        if !prev_open && t != ")" {
            s.push(' ');
        }
        s.push_str(t);
        prev_open = t == "(";
    }
    s
}

/// Deterministic single-line PENMAN, e.g. `(s / say-01 :ARG0 (p / person))`.
pub fn serialize_penman(graph: &AmrGraph) -> String {
    join_tokens(&linearize(graph))
}

/// Indented multi-line PENMAN, one edge per line.
pub fn serialize_penman_pretty(graph: &AmrGraph) -> String {
    let toks = linearize(graph);
    let mut s = String::new();
    let mut level = 0usize;
    for t in toks.iter().map(String::as_str) {
        match t {
            "(" => {
                s.push('(');
                level += 1;
            }
            ")" => {
                s.push(')');
                level = level.saturating_sub(1);
            }
            "/" => s.push_str(" / "),
            _ if t.starts_with(':') => {
                s.push('\n');
                s.push_str(&"    ".repeat(level));
                s.push_str(t);
                s.push(' ');
            }
            _ => s.push_str(t),
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penman::parse_penman;

    #[test]
    fn minimal_round_trip() {
        let g = parse_penman("(a / agree-01)").unwrap();
        assert_eq!(serialize_penman(&g), "(a / agree-01)");
        assert_eq!(linearize(&g), vec!["(", "a", "/", "agree-01", ")"]);
    }

    #[test]
    fn reentrancy_emitted_as_bare_variable() {
        let src = "(s / say-01 :ARG0 (p / person) :ARG1 (v / victory :poss p))";
        let g = parse_penman(src).unwrap();
        assert_eq!(serialize_penman(&g), src);
    }

    #[test]
    fn attribute_tokens() {
        let g = parse_penman("(p / person :quant 2)").unwrap();
        let toks = linearize(&g);
        assert!(toks.windows(2).any(|w| w == [":quant", "2"]));
    }

    #[test]
    fn normalizes_whitespace_and_forward_references() {
        let g = parse_penman("( a/x\n\t:ARG0  b :ARG1 (b / y) )").unwrap();
        assert_eq!(serialize_penman(&g), "(a / x :ARG0 (b / y) :ARG1 b)");
    }

    #[test]
    fn quoted_constants_survive() {
        let src = "(n / name :op1 \"New York\" :op2 \"a \\\"q\\\" b\")";
        let g = parse_penman(src).unwrap();
        assert_eq!(serialize_penman(&g), src);
        let toks = linearize(&g);
        assert!(toks.contains(&"\"New York\"".to_string()));
    }

    #[test]
    fn pretty_form_reparses() {
        let g = parse_penman("(s / say-01 :ARG0 (p / person :mod (f / famous)) :ARG1 (v / victory :poss p))").unwrap();
        let pretty = serialize_penman_pretty(&g);
        assert!(pretty.contains('\n'));
        assert_eq!(parse_penman(&pretty).unwrap(), g);
    }
}
