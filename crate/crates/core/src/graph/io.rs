//! Plain-text edge lists.
//!
//! One `u v` pair per line, whitespace separated, `#` starts a comment line.
//! The first non-comment line may be a header: a single token `n`, or a pair
//! `n m` where `m` equals the number of edge lines that follow and every id
//! that follows is below `n`. Anything else is read as an edge. Without a
//! header the vertex count is one past the largest id.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use super::{Graph, GraphError, Vertex};

fn parse_ids(line: &str, lineno: usize) -> Result<Vec<u64>, GraphError> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<u64>().map_err(|_| GraphError::Parse {
                line: lineno,
                msg: format!("expected a non-negative integer, found {tok:?}"),
            })
        })
        .collect()
}

pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        rows.push((i + 1, parse_ids(line, i + 1)?));
    }

    let mut declared_n = None;
    let mut body = &rows[..];
    if let Some((lineno, first)) = rows.first() {
        match first.len() {
            1 => {
                declared_n = Some(first[0]);
                body = &rows[1..];
            }
            2 => {
                let rest = &rows[1..];
                let (n, m) = (first[0], first[1]);
                let counts_match = rest.len() as u64 == m;
                let ids_fit = rest.iter().all(|(_, ids)| ids.iter().all(|&id| id < n));
                if counts_match && ids_fit && n > 0 {
                    declared_n = Some(n);
                    body = rest;
                }
            }
            _ => {
                return Err(GraphError::Parse {
                    line: *lineno,
                    msg: format!("expected 1 or 2 tokens, found {}", first.len()),
                })
            }
        }
    }

    let mut edges = Vec::with_capacity(body.len());
    let mut max_id = None::<u64>;
    for (lineno, ids) in body {
        if ids.len() != 2 {
            return Err(GraphError::Parse {
                line: *lineno,
                msg: format!("expected an edge `u v`, found {} tokens", ids.len()),
            });
        }
        for &id in ids {
            if id > Vertex::MAX as u64 {
                return Err(GraphError::TooLarge(id as usize));
            }
            max_id = Some(max_id.map_or(id, |m| m.max(id)));
        }
        edges.push((ids[0] as Vertex, ids[1] as Vertex));
    }
    let n = match declared_n {
        Some(n) => n as usize,
        None => max_id.map_or(0, |m| m as usize + 1),
    };
    Graph::from_edges(n, edges)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    parse_edge_list(&fs::read_to_string(path)?)
}

/// Writes each edge once with `u < v`, preceded by an `n m` header when the
/// last vertex is isolated and would otherwise be lost.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> io::Result<()> {
    let n = graph.vertex_count();
    if n > 0 && graph.degree(n as Vertex - 1) == 0 {
        writeln!(out, "{} {}", n, graph.edge_count())?;
    }
    for (u, v) in graph.edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()
}
