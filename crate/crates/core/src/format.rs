//! Plain-text file formats.
//!
//! Hypergraph files start with `n <count>` and list one edge per `e v1 v2 ...`
//! line; graph files use `g u v` lines instead. A hypergraph file may also
//! contain `g` lines, read as two-vertex edges. `l <index> <name>` attaches
//! a label to a vertex. `#` starts a comment. Move files hold one `v w`
//! submove per line and preload files one `p/q` per edge.

use thiserror::Error;

use crate::fractional_game::{Move, Submove};
use crate::hypergraph::{Graph, Hypergraph, HypergraphError, LoadVector};
use crate::scalar::{format_rational, parse_rational};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `n <count>` header")]
    MissingHeader,
    #[error("expected {expected} values, found {found}")]
    Count { expected: usize, found: usize },
    #[error(transparent)]
    Invalid(#[from] HypergraphError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn parse_index(line: usize, token: &str, n: Option<usize>) -> Result<usize, ParseError> {
    let v: usize = token
        .parse()
        .map_err(|_| syntax(line, format!("`{token}` is not a vertex index")))?;
    match n {
        Some(n) if v >= n => Err(syntax(line, format!("vertex {v} is out of range for n = {n}"))),
        _ => Ok(v),
    }
}

/// A parsed hypergraph with its optional vertex labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypergraphFile {
    pub h: Hypergraph,
    pub labels: Vec<Option<String>>,
}

impl HypergraphFile {
    pub fn label(&self, v: usize) -> String {
        self.labels[v].clone().unwrap_or_else(|| v.to_string())
    }

    /// Resolves a vertex given as an index or a label.
    pub fn resolve(&self, token: &str) -> Option<usize> {
        if let Ok(v) = token.parse::<usize>() {
            return (v < self.h.n()).then_some(v);
        }
        self.labels.iter().position(|l| l.as_deref() == Some(token))
    }
}

struct RawFile {
    n: usize,
    edges: Vec<(usize, Vec<usize>)>,
    labels: Vec<Option<String>>,
}

fn parse_raw(text: &str, allow_hyperedges: bool) -> Result<RawFile, ParseError> {
    let mut n = None;
    let mut edges = Vec::new();
    let mut labels: Vec<(usize, usize, String)> = Vec::new();
    for (line, tokens) in content_lines(text) {
        match tokens[0] {
            "n" => {
                if n.is_some() {
                    return Err(syntax(line, "repeated `n` line"));
                }
                if tokens.len() != 2 {
                    return Err(syntax(line, "expected `n <count>`"));
                }
                let count = tokens[1]
                    .parse()
                    .map_err(|_| syntax(line, format!("`{}` is not a vertex count", tokens[1])))?;
                n = Some(count);
            }
            "e" if allow_hyperedges => {
                let n = n.ok_or_else(|| syntax(line, "edge before the `n` line"))?;
                if tokens.len() == 1 {
                    return Err(syntax(line, "edge has no vertices"));
                }
                let edge = tokens[1..]
                    .iter()
                    .map(|t| parse_index(line, t, Some(n)))
                    .collect::<Result<Vec<_>, _>>()?;
                edges.push((line, edge));
            }
            "g" => {
                let n = n.ok_or_else(|| syntax(line, "edge before the `n` line"))?;
                if tokens.len() != 3 {
                    return Err(syntax(line, "expected `g <u> <v>`"));
                }
                let u = parse_index(line, tokens[1], Some(n))?;
                let v = parse_index(line, tokens[2], Some(n))?;
                if u == v {
                    return Err(syntax(line, "graph edge is a loop"));
                }
                edges.push((line, vec![u, v]));
            }
            "l" => {
                if tokens.len() != 3 {
                    return Err(syntax(line, "expected `l <index> <name>`"));
                }
                let v = parse_index(line, tokens[1], n)?;
                labels.push((line, v, tokens[2].to_string()));
            }
            other => return Err(syntax(line, format!("unknown line type `{other}`"))),
        }
    }
    let n = n.ok_or(ParseError::MissingHeader)?;
    let mut table = vec![None; n];
    for (line, v, name) in labels {
        if v >= n {
            return Err(syntax(line, format!("vertex {v} is out of range for n = {n}")));
        }
        table[v] = Some(name);
    }
    Ok(RawFile { n, edges, labels: table })
}

fn build_hypergraph(raw: &RawFile, strict: bool) -> Result<Hypergraph, ParseError> {
    let edges: Vec<Vec<usize>> = raw.edges.iter().map(|(_, e)| e.clone()).collect();
    let built = if strict { Hypergraph::new_strict(raw.n, edges) } else { Hypergraph::new(raw.n, edges) };
    built.map_err(|err| match err {
        HypergraphError::DuplicateEdge(i) => syntax(raw.edges[i].0, "duplicate edge"),
        other => ParseError::Invalid(other),
    })
}

/// Parses a hypergraph file, merging duplicate edges.
pub fn parse_hypergraph(text: &str) -> Result<HypergraphFile, ParseError> {
    let raw = parse_raw(text, true)?;
    Ok(HypergraphFile { h: build_hypergraph(&raw, false)?, labels: raw.labels })
}

/// Parses a hypergraph file, rejecting duplicate edges.
pub fn parse_hypergraph_strict(text: &str) -> Result<HypergraphFile, ParseError> {
    let raw = parse_raw(text, true)?;
    Ok(HypergraphFile { h: build_hypergraph(&raw, true)?, labels: raw.labels })
}

/// Parses a graph file (`n` and `g` lines only).
pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let raw = parse_raw(text, false)?;
    let edges = raw.edges.iter().map(|(_, e)| (e[0], e[1])).collect();
    Ok(Graph::new(raw.n, edges)?)
}

fn parse_weight(line: usize, token: &str) -> Result<Rational, ParseError> {
    parse_rational(token).ok_or_else(|| syntax(line, format!("`{token}` is not a rational number")))
}

/// Parses a move file against `file`, accepting vertex indices or labels.
pub fn parse_move(text: &str, file: &HypergraphFile) -> Result<Move, ParseError> {
    let mut submoves = Vec::new();
    for (line, tokens) in content_lines(text) {
        if tokens.len() != 2 {
            return Err(syntax(line, "expected `<vertex> <weight>`"));
        }
        let vertex = file
            .resolve(tokens[0])
            .ok_or_else(|| syntax(line, format!("unknown vertex `{}`", tokens[0])))?;
        let weight = parse_weight(line, tokens[1])?;
        if weight < Rational::from_integer(0.into()) {
            return Err(syntax(line, "negative weight"));
        }
        submoves.push(Submove::new(vertex, weight));
    }
    Ok(Move::new(submoves))
}

/// Parses whitespace-separated rationals, one per edge.
pub fn parse_values(text: &str, expected: usize) -> Result<Vec<Rational>, ParseError> {
    let mut values = Vec::new();
    for (line, tokens) in content_lines(text) {
        for token in tokens {
            values.push(parse_weight(line, token)?);
        }
    }
    if values.len() != expected {
        return Err(ParseError::Count { expected, found: values.len() });
    }
    Ok(values)
}

pub fn parse_preload(text: &str, h: &Hypergraph) -> Result<LoadVector, ParseError> {
    Ok(LoadVector::new(parse_values(text, h.m())?)?)
}

/// Renders a move in move-file format.
pub fn render_move(m: &Move) -> String {
    m.submoves
        .iter()
        .map(|s| format!("{} {}\n", s.vertex, format_rational(&s.weight)))
        .collect()
}

pub fn render_values(values: &[Rational]) -> String {
    values.iter().map(format_rational).collect::<Vec<_>>().join(" ")
}
