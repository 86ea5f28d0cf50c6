//! Plain-text edge lists:
//!
//! ```text
//! p=4
//! 1 -- 2
//! 2 -- 4
//! ```
//!
//! Labels are 1-based. Edge tokens are `--`, `<->` and `->`; every edge in a
//! file must use the same token. Blank lines and `#` comments are ignored.

use std::fmt;
use std::str::FromStr;

use super::{EdgeKind, Graph};
use crate::error::{Error, Result};

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p={}", self.p)?;
        for (i, j) in self.edges() {
            writeln!(f, "{} {} {}", i + 1, self.kind.token(), j + 1)?;
        }
        Ok(())
    }
}

fn parse_label(s: &str, p: usize, line: usize) -> Result<usize> {
    let err = |message: String| Error::EdgeListParse { line, message };
    let v: usize = s.parse().map_err(|_| err(format!("invalid vertex label {s:?}")))?;
    if v == 0 || v > p {
        return Err(err(format!("vertex {v} outside 1..={p}")));
    }
    Ok(v - 1)
}

impl Graph {
    /// Parses an edge list. `default_kind` applies when the file lists no
    /// edges.
    pub fn parse_edge_list(text: &str, default_kind: EdgeKind) -> Result<Graph> {
        let mut p = None;
        let mut kind = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| Error::EdgeListParse { line, message };
            let Some(p) = p else {
                let value = content
                    .strip_prefix("p=")
                    .ok_or_else(|| err("expected header line \"p=<int>\"".into()))?;
                p = Some(
                    value.trim().parse::<usize>().map_err(|_| err(format!("bad vertex count {value:?}")))?,
                );
                continue;
            };
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let [a, op, b] = tokens[..] else {
                return Err(err(format!("expected \"i <op> j\", got {content:?}")));
            };
            let this_kind = match op {
                "--" => EdgeKind::Undirected,
                "<->" => EdgeKind::Bidirected,
                "->" => EdgeKind::Directed,
                _ => return Err(err(format!("unknown edge token {op:?}"))),
            };
            if *kind.get_or_insert(this_kind) != this_kind {
                return Err(err("mixed edge kinds in one file".into()));
            }
            edges.push((line, parse_label(a, p, line)?, parse_label(b, p, line)?));
        }
        let p = p.ok_or(Error::EdgeListParse { line: 0, message: "missing \"p=<int>\" header".into() })?;
        let mut g = Graph::empty(p, kind.unwrap_or(default_kind));
        for (line, i, j) in edges {
            g.add_edge(i, j).map_err(|e| Error::EdgeListParse { line, message: e.to_string() })?;
        }
        Ok(g)
    }
}

impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Graph> {
        Graph::parse_edge_list(s, EdgeKind::Undirected)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_kinds() {
        let g: Graph = "p=4\n1 -- 2\n2 -- 4\n# comment\n\n3 -- 4\n".parse().unwrap();
        assert_eq!(g.kind(), EdgeKind::Undirected);
        assert_eq!(g.edges(), vec![(0, 1), (1, 3), (2, 3)]);
        let b: Graph = "p=3\n1 <-> 3\n".parse().unwrap();
        assert_eq!(b.kind(), EdgeKind::Bidirected);
        let d: Graph = "p=3\n3 -> 1\n".parse().unwrap();
        assert!(d.has_edge(2, 0) && !d.has_edge(0, 2));
    }

    #[test]
    fn display_round_trips() {
        let g = Graph::from_edges(5, EdgeKind::Directed, [(4, 0), (1, 2)]).unwrap();
        let text = g.to_string();
        assert_eq!(text, "p=5\n2 -> 3\n5 -> 1\n");
        assert_eq!(text.parse::<Graph>().unwrap(), g);
    }

    #[test]
    fn empty_graph_takes_default_kind() {
        let g = Graph::parse_edge_list("p=3\n", EdgeKind::Bidirected).unwrap();
        assert_eq!(g.kind(), EdgeKind::Bidirected);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn reports_line_numbers() {
        let err = "p=3\n1 -- 2\n1 -> 3\n".parse::<Graph>().unwrap_err();
        assert!(matches!(err, Error::EdgeListParse { line: 3, .. }));
        let err = "p=3\n1 -- 9\n".parse::<Graph>().unwrap_err();
        assert!(matches!(err, Error::EdgeListParse { line: 2, .. }));
        assert!("1 -- 2\n".parse::<Graph>().is_err());
        assert!("p=3\n1 -- 1\n".parse::<Graph>().is_err());
    }
}
