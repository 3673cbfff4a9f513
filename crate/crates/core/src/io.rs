//! Plain-text edge lists: one `u v` pair per line, `#` starts a comment line.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Parses an edge list, returning edges in file order. Blank lines and lines
/// whose first non-blank character is `#` are skipped. Line numbers in
/// errors are 1-based.
pub fn parse_edge_list(text: &str) -> Result<Vec<(NodeId, NodeId)>> {
    let mut edges = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<NodeId> {
            let tok = tok.ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: "expected two node IDs".into(),
            })?;
            tok.parse::<NodeId>().map_err(|e| Error::Parse {
                line: idx + 1,
                message: format!("bad node ID {tok:?}: {e}"),
            })
        };
        let u = parse(tokens.next())?;
        let v = parse(tokens.next())?;
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("unexpected token {extra:?}"),
            });
        }
        edges.push((u, v));
    }
    Ok(edges)
}

/// Reads and parses an edge-list file into a graph.
pub fn read_graph(path: impl AsRef<std::path::Path>) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    Ok(Graph::from_edges(parse_edge_list(&text)?))
}

/// One line per undirected edge, `u v` with `u < v`, in lexicographic order.
pub fn write_edge_list(graph: &Graph) -> String {
    let mut out = String::with_capacity(graph.edge_count() * 12);
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::g5;
    use proptest::prelude::*;

    #[test]
    fn parses_pairs_in_order() {
        assert_eq!(parse_edge_list("0 1\n1 2\n").unwrap(), vec![(0, 1), (1, 2)]);
        assert_eq!(parse_edge_list("# comment\n3 4\n").unwrap(), vec![(3, 4)]);
        assert_eq!(parse_edge_list("\n  \n5\t6\r\n").unwrap(), vec![(5, 6)]);
    }

    #[test]
    fn reports_line_of_malformed_input() {
        match parse_edge_list("0 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_edge_list("0 1\n# c\n7\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_edge_list("1 2 3\n").is_err());
        assert!(parse_edge_list("-1 2\n").is_err());
    }

    #[test]
    fn writes_each_edge_once() {
        let text = write_edge_list(&g5());
        assert_eq!(text.lines().count(), 6);
        assert!(text.ends_with('\n'));
        assert_eq!(Graph::from_edges(parse_edge_list(&text).unwrap()), g5());
        assert_eq!(write_edge_list(&Graph::default()), "");
    }

    proptest! {
        #[test]
        fn write_parse_is_a_fixed_point(edges in prop::collection::vec((0u32..60, 0u32..60), 0..200)) {
            let g = Graph::from_edges(edges);
            let text = write_edge_list(&g);
            let again = Graph::from_edges(parse_edge_list(&text).unwrap());
            prop_assert_eq!(write_edge_list(&again), text);
            prop_assert_eq!(again.edge_count(), g.edge_count());
        }
    }
}
