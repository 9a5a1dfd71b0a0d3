//! Plain-text edge-list format.
//!
//! ```text
//! N F
//! i j weight
//! ...
//! A: a1 a2 ...
//! ```
//! Vertex ids are 0-based. Blank lines and `#` comments are ignored.

use std::fmt::Write;

use super::{AdversaryPlacement, Graph};
use crate::error::{Error, Result};

pub fn write_graph_file(graph: &Graph, placement: &AdversaryPlacement) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", graph.vertex_count(), placement.f());
    for (i, j, w) in graph.edges() {
        let _ = writeln!(out, "{i} {j} {w}");
    }
    let adversaries: Vec<String> = placement.adversaries().iter().map(|a| a.to_string()).collect();
    let _ = writeln!(out, "A: {}", adversaries.join(" "));
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(token: &str, line: usize) -> Result<T> {
    token
        .parse()
        .map_err(|_| parse_err(line, format!("bad number {token:?}")))
}

pub fn parse_graph_file(text: &str) -> Result<(Graph, AdversaryPlacement)> {
    let mut header: Option<(usize, usize)> = None;
    let mut graph = Graph::new(0);
    let mut adversaries: Option<Vec<usize>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((n, _)) = header else {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(parse_err(line_no, "expected header \"N F\""));
            }
            let n = number(parts[0], line_no)?;
            header = Some((n, number(parts[1], line_no)?));
            graph = Graph::new(n);
            continue;
        };
        if let Some(rest) = line.strip_prefix("A:") {
            if adversaries.is_some() {
                return Err(parse_err(line_no, "duplicate adversary line"));
            }
            let ids = rest
                .split_whitespace()
                .map(|t| number::<usize>(t, line_no))
                .collect::<Result<Vec<_>>>()?;
            if let Some(&bad) = ids.iter().find(|&&a| a >= n) {
                return Err(parse_err(line_no, format!("adversary {bad} out of range")));
            }
            adversaries = Some(ids);
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_err(line_no, "expected edge line \"i j weight\""));
        }
        let (i, j, w) = (
            number(parts[0], line_no)?,
            number(parts[1], line_no)?,
            number(parts[2], line_no)?,
        );
        graph
            .add_edge(i, j, w)
            .map_err(|e| parse_err(line_no, e.to_string()))?;
    }

    let (n, f) = header.ok_or_else(|| parse_err(0, "missing header"))?;
    let placement = AdversaryPlacement::new(n, &adversaries.unwrap_or_default(), f)?;
    Ok((graph, placement))
}
