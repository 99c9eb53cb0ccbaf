use std::collections::HashMap;

use thiserror::Error;

use super::graph::{is_symbol_char, is_variable_shaped, AmrGraph, Edge, Instance, InvariantViolation, Target};

/// What went wrong while reading PENMAN text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unbalanced parentheses")]
    UnbalancedParens,
    #[error("variable `{0}` is instantiated more than once")]
    DuplicateVariableInstance(String),
    #[error("reference to undefined variable `{0}`")]
    DanglingVariableReference(String),
    #[error("node has no concept")]
    EmptyConcept,
    #[error("empty input")]
    EmptyInput,
    #[error("input is not valid UTF-8")]
    InvalidUtf8,
    #[error("unterminated string literal")]
    UnterminatedString,
    #[error("role has no name")]
    EmptyRole,
    #[error("expected {expected}, found {found}")]
    UnexpectedToken { expected: &'static str, found: String },
    #[error("input continues after the graph")]
    TrailingInput,
    #[error("{0}")]
    Invariant(InvariantViolation),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

impl ParseError {
    fn new(kind: ParseErrorKind, offset: usize) -> Self {
        ParseError { kind, offset }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Open,
    Close,
    Slash,
    Role(&'a str),
    Str(&'a str),
    Sym(&'a str),
}

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::Open => "`(`".into(),
            Tok::Close => "`)`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Role(r) => format!("role `{r}`"),
            Tok::Str(s) => format!("string {s}"),
            Tok::Sym(s) => format!("`{s}`"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok<'_>, usize)>, ParseError> {
    let mut toks = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(start, c)) = it.peek() {
        match c {
            c if c.is_whitespace() => {
                it.next();
            }
            '(' => {
                it.next();
                toks.push((Tok::Open, start));
            }
            ')' => {
                it.next();
                toks.push((Tok::Close, start));
            }
            '/' => {
                it.next();
                toks.push((Tok::Slash, start));
            }
            '"' => {
                it.next();
                let mut escaped = false;
                let mut end = None;
                for (i, ch) in it.by_ref() {
                    match (escaped, ch) {
                        (true, _) => escaped = false,
                        (false, '\\') => escaped = true,
                        (false, '"') => {
                            end = Some(i + 1);
                            break;
                        }
                        _ => {}
                    }
                }
                let end = end.ok_or_else(|| ParseError::new(ParseErrorKind::UnterminatedString, start))?;
                toks.push((Tok::Str(&text[start..end]), start));
            }
            _ => {
                let mut end = start;
                while let Some(&(i, ch)) = it.peek() {
                    if !is_symbol_char(ch) {
                        break;
                    }
                    end = i + ch.len_utf8();
                    it.next();
                }
                let word = &text[start..end];
                if let Some(name) = word.strip_prefix(':') {
                    if name.is_empty() {
                        return Err(ParseError::new(ParseErrorKind::EmptyRole, start));
                    }
                    toks.push((Tok::Role(word), start));
                } else {
                    toks.push((Tok::Sym(word), start));
                }
            }
        }
    }
    Ok(toks)
}

/// An atom whose meaning (variable or constant) is only known once every
/// node has been read.
struct PendingAtom {
    edge: usize,
    offset: usize,
}

/// Parses one PENMAN graph such as `(s / say-01 :ARG0 (p / person))`.
///
/// Bare atoms naming a variable defined anywhere in the graph become
/// relations (reentrancies); other atoms become constants. An undefined
/// atom that looks like a variable (`s`, `p2`) is rejected as a dangling
/// reference. The parser is iterative and does not recurse on nesting.
pub fn parse_penman(text: &str) -> Result<AmrGraph, ParseError> {
    let toks = tokenize(text)?;
    let eof = text.len();
    let mut pos = 0;

    let mut instances: Vec<Instance> = Vec::new();
    let mut defined: HashMap<&str, usize> = HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut pending: Vec<PendingAtom> = Vec::new();
    // open nodes: (variable, offset of its `(`)
    let mut stack: Vec<(String, usize)> = Vec::new();
    // role waiting for its value, with the node it hangs from
    let mut open_role: Option<(String, String)> = None;

    match toks.first() {
        None => return Err(ParseError::new(ParseErrorKind::EmptyInput, 0)),
        Some((Tok::Open, _)) => {}
        Some((Tok::Close, off)) => return Err(ParseError::new(ParseErrorKind::UnbalancedParens, *off)),
        Some((t, off)) => {
            return Err(ParseError::new(
                ParseErrorKind::UnexpectedToken {
                    expected: "`(`",
                    found: t.describe(),
                },
                *off,
            ))
        }
    }

    let mut root: Option<String> = None;
    while pos < toks.len() {
        let (tok, off) = &toks[pos];
        let off = *off;
        pos += 1;
        match tok {
            Tok::Open => {
                if !stack.is_empty() && open_role.is_none() {
                    return Err(ParseError::new(
                        ParseErrorKind::UnexpectedToken {
                            expected: "a role or `)`",
                            found: tok.describe(),
                        },
                        off,
                    ));
                }
                // variable
                let var = match toks.get(pos) {
                    Some((Tok::Sym(v), _)) => *v,
                    Some((Tok::Close, voff)) | Some((Tok::Slash, voff)) | Some((Tok::Role(_), voff)) => {
                        return Err(ParseError::new(ParseErrorKind::EmptyConcept, *voff))
                    }
                    Some((t, voff)) => {
                        return Err(ParseError::new(
                            ParseErrorKind::UnexpectedToken {
                                expected: "a variable",
                                found: t.describe(),
                            },
                            *voff,
                        ))
                    }
                    None => return Err(ParseError::new(ParseErrorKind::UnbalancedParens, off)),
                };
                let var_off = toks[pos].1;
                pos += 1;
                // `/`
                match toks.get(pos) {
                    Some((Tok::Slash, _)) => pos += 1,
                    Some((Tok::Close, coff)) | Some((Tok::Role(_), coff)) => {
                        return Err(ParseError::new(ParseErrorKind::EmptyConcept, *coff))
                    }
                    Some((t, toff)) => {
                        return Err(ParseError::new(
                            ParseErrorKind::UnexpectedToken {
                                expected: "`/`",
                                found: t.describe(),
                            },
                            *toff,
                        ))
                    }
                    None => return Err(ParseError::new(ParseErrorKind::UnbalancedParens, off)),
                }
                // concept
                let concept = match toks.get(pos) {
                    Some((Tok::Sym(c), _)) => *c,
                    Some((Tok::Close, coff)) | Some((Tok::Role(_), coff)) => {
                        return Err(ParseError::new(ParseErrorKind::EmptyConcept, *coff))
                    }
                    Some((t, toff)) => {
                        return Err(ParseError::new(
                            ParseErrorKind::UnexpectedToken {
                                expected: "a concept",
                                found: t.describe(),
                            },
                            *toff,
                        ))
                    }
                    None => return Err(ParseError::new(ParseErrorKind::UnbalancedParens, off)),
                };
                pos += 1;
                if defined.contains_key(var) {
                    return Err(ParseError::new(
                        ParseErrorKind::DuplicateVariableInstance(var.to_string()),
                        var_off,
                    ));
                }
                defined.insert(var, instances.len());
                instances.push(Instance {
                    var: var.to_string(),
                    concept: concept.to_string(),
                });
                if let Some((source, role)) = open_role.take() {
                    edges.push(Edge::relation(source, role, var));
                } else {
                    root = Some(var.to_string());
                }
                stack.push((var.to_string(), off));
            }
            Tok::Close => {
                if let Some((_, role)) = open_role.take() {
                    return Err(ParseError::new(
                        ParseErrorKind::UnexpectedToken {
                            expected: "a value",
                            found: format!("`)` after role `{role}`"),
                        },
                        off,
                    ));
                }
                if stack.pop().is_none() {
                    return Err(ParseError::new(ParseErrorKind::UnbalancedParens, off));
                }
                if stack.is_empty() {
                    break;
                }
            }
            Tok::Role(r) => {
                if open_role.is_some() {
                    return Err(ParseError::new(
                        ParseErrorKind::UnexpectedToken {
                            expected: "a value",
                            found: tok.describe(),
                        },
                        off,
                    ));
                }
                let (current, _) = stack
                    .last()
                    .ok_or_else(|| ParseError::new(ParseErrorKind::UnbalancedParens, off))?;
                open_role = Some((current.clone(), r.to_string()));
            }
            Tok::Str(s) => match open_role.take() {
                Some((source, role)) => edges.push(Edge::attribute(source, role, *s)),
                None => {
                    return Err(ParseError::new(
                        ParseErrorKind::UnexpectedToken {
                            expected: "a role or `)`",
                            found: tok.describe(),
                        },
                        off,
                    ))
                }
            },
            Tok::Sym(s) => match open_role.take() {
                Some((source, role)) => {
                    pending.push(PendingAtom {
                        edge: edges.len(),
                        offset: off,
                    });
                    edges.push(Edge::attribute(source, role, *s));
                }
                None => {
                    return Err(ParseError::new(
                        ParseErrorKind::UnexpectedToken {
                            expected: "a role or `)`",
                            found: tok.describe(),
                        },
                        off,
                    ))
                }
            },
            Tok::Slash => {
                return Err(ParseError::new(
                    ParseErrorKind::UnexpectedToken {
                        expected: "a role or `)`",
                        found: tok.describe(),
                    },
                    off,
                ))
            }
        }
    }

    if let Some((_, open_off)) = stack.first() {
        return Err(ParseError::new(ParseErrorKind::UnbalancedParens, *open_off));
    }
    if let Some((tok, off)) = toks.get(pos) {
        let kind = match tok {
            Tok::Close => ParseErrorKind::UnbalancedParens,
            _ => ParseErrorKind::TrailingInput,
        };
        return Err(ParseError::new(kind, *off));
    }

    for p in pending {
        let atom = edges[p.edge].target.as_str().to_string();
        if defined.contains_key(atom.as_str()) {
            edges[p.edge].target = Target::Var(atom);
        } else if is_variable_shaped(&atom) {
            return Err(ParseError::new(
                ParseErrorKind::DanglingVariableReference(atom),
                p.offset,
            ));
        }
    }

    let root = root.ok_or_else(|| ParseError::new(ParseErrorKind::EmptyInput, eof))?;
    AmrGraph::from_parts(root, instances, edges).map_err(|v| ParseError::new(ParseErrorKind::Invariant(v), 0))
}

/// Byte-level entry point: rejects invalid UTF-8, then parses.
pub fn parse_penman_bytes(bytes: &[u8]) -> Result<AmrGraph, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_penman(text),
        Err(e) => Err(ParseError::new(ParseErrorKind::InvalidUtf8, e.valid_up_to())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kind(text: &str) -> ParseErrorKind {
        parse_penman(text).unwrap_err().kind
    }

    #[test]
    fn minimal_graph() {
        let g = parse_penman("(a / agree-01)").unwrap();
        assert_eq!(g.root(), "a");
        assert_eq!(g.instances().len(), 1);
        assert_eq!(g.concept("a"), Some("agree-01"));
        assert!(g.edges().is_empty());
    }

    #[test]
    fn reentrancy_becomes_relation() {
        let g = parse_penman("(s / say-01 :ARG0 (p / person) :ARG1 (v / victory :poss p))").unwrap();
        assert_eq!(g.len(), 3);
        let rels: Vec<_> = g.relations().collect();
        assert_eq!(
            rels,
            vec![("s", ":ARG0", "p"), ("s", ":ARG1", "v"), ("v", ":poss", "p")]
        );
        assert_eq!(g.attributes().count(), 0);
        assert_eq!(g.tree().reentrant_edges().len(), 1);
    }

    #[test]
    fn attributes_keep_their_spelling() {
        let g = parse_penman("(n / name :op1 \"Roem\" :quant 2 :polarity -)").unwrap();
        let attrs: Vec<_> = g.attributes().collect();
        assert_eq!(
            attrs,
            vec![("n", ":op1", "\"Roem\""), ("n", ":quant", "2"), ("n", ":polarity", "-")]
        );
    }

    #[test]
    fn slash_without_spaces_and_multiline() {
        let g = parse_penman("(s/say-01\n   :ARG0 (p/person))").unwrap();
        assert_eq!(g.relations().collect::<Vec<_>>(), vec![("s", ":ARG0", "p")]);
    }

    #[test]
    fn duplicate_instance_with_offset() {
        let err = parse_penman("(a / agree-01 :ARG0 (a / person))").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateVariableInstance("a".into()));
        assert_eq!(err.offset, 21);
    }

    #[test]
    fn declared_error_classes() {
        assert_eq!(kind("(a / b"), ParseErrorKind::UnbalancedParens);
        assert_eq!(kind("(a / b))"), ParseErrorKind::UnbalancedParens);
        assert_eq!(kind(")"), ParseErrorKind::UnbalancedParens);
        assert_eq!(
            kind("(a / b :ARG0 x2)"),
            ParseErrorKind::DanglingVariableReference("x2".into())
        );
        assert_eq!(kind("(a / )"), ParseErrorKind::EmptyConcept);
        assert_eq!(kind("(a)"), ParseErrorKind::EmptyConcept);
        assert_eq!(
            kind("(a / b :ARG0)"),
            ParseErrorKind::UnexpectedToken {
                expected: "a value",
                found: "`)` after role `:ARG0`".into()
            }
        );
        assert_eq!(kind(""), ParseErrorKind::EmptyInput);
        assert_eq!(kind("   "), ParseErrorKind::EmptyInput);
        assert_eq!(kind("(a / b :op1 \"x)"), ParseErrorKind::UnterminatedString);
        assert_eq!(kind("(a / b : x)"), ParseErrorKind::EmptyRole);
        assert_eq!(kind("(a / b) (c / d)"), ParseErrorKind::TrailingInput);
    }

    #[test]
    fn dangling_offset_points_at_atom() {
        let err = parse_penman("(a / b :ARG0 q)").unwrap_err();
        assert_eq!(err.offset, 13);
    }

    #[test]
    fn forward_reference_resolves() {
        let g = parse_penman("(a / x :ARG0 b :ARG1 (b / y))").unwrap();
        assert_eq!(g.relations().count(), 2);
    }

    #[test]
    fn bare_symbols_that_are_not_variables_are_constants() {
        let g = parse_penman("(g / go-02 :mode imperative :ARG0 (y / you))").unwrap();
        assert_eq!(g.attributes().collect::<Vec<_>>(), vec![("g", ":mode", "imperative")]);
    }

    #[test]
    fn invalid_utf8() {
        let err = parse_penman_bytes(b"(a / \xff)").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::InvalidUtf8);
        assert_eq!(err.offset, 5);
    }

    #[test]
    fn deep_nesting_does_not_overflow() {
        let depth = 50_000;
        let mut s = String::new();
        for i in 0..depth {
            s.push_str(&format!("(v{i} / c :ARG0 "));
        }
        s.push_str("(leaf / c)");
        s.push_str(&")".repeat(depth));
        let g = parse_penman(&s).unwrap();
        assert_eq!(g.len(), depth + 1);
    }
}
