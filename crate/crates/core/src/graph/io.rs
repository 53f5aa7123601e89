//! Text formats for graphs and opinion vectors.
//!
//! Edge files carry one edge per line as `u<TAB>v[<TAB>weight]` with 0-based
//! ids; any run of whitespace is accepted as a separator. Lines starting with
//! `#` and blank lines are skipped. Opinion files hold one decimal per line,
//! line index = node id.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use super::{pair, Graph};
use crate::error::{Error, Result};

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, msg: msg.into() }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn split_edge_line<'a>(path: &Path, lineno: usize, line: &'a str) -> Result<(&'a str, &'a str, f64)> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 2 && fields.len() != 3 {
        return Err(parse_err(path, lineno, format!("expected 2 or 3 fields, found {}", fields.len())));
    }
    let weight = match fields.get(2) {
        Some(w) => w.parse::<f64>().map_err(|_| parse_err(path, lineno, format!("bad weight '{w}'")))?,
        None => 1.0,
    };
    Ok((fields[0], fields[1], weight))
}

// Both orientations of one undirected edge may appear in a file. Repeats
// with the same weight collapse; conflicting weights are an error.
fn collect_edges(path: &Path, rows: Vec<(usize, usize, usize, f64)>) -> Result<Vec<(usize, usize, f64)>> {
    let mut seen: HashMap<(usize, usize), f64> = HashMap::new();
    let mut out = Vec::new();
    for (lineno, u, v, w) in rows {
        if u == v {
            return Err(parse_err(path, lineno, format!("self loop ({u}, {v})")));
        }
        match seen.get(&pair(u, v)) {
            Some(&prev) if prev == w => continue,
            Some(&prev) => {
                return Err(parse_err(path, lineno, format!("edge ({u}, {v}) repeated with weight {w} != {prev}")))
            }
            None => {
                seen.insert(pair(u, v), w);
                out.push((u, v, w));
            }
        }
    }
    Ok(out)
}

/// Parses edge-list text. With `nodes = None` the node count is one more than
/// the largest id.
pub fn parse_graph(text: &str, nodes: Option<usize>, path: &Path) -> Result<Graph> {
    let mut rows = Vec::new();
    let mut max_id = None;
    for (lineno, line) in data_lines(text) {
        let (a, b, w) = split_edge_line(path, lineno, line)?;
        let u: usize = a.parse().map_err(|_| parse_err(path, lineno, format!("bad node id '{a}'")))?;
        let v: usize = b.parse().map_err(|_| parse_err(path, lineno, format!("bad node id '{b}'")))?;
        if let Some(n) = nodes {
            if u >= n || v >= n {
                return Err(parse_err(path, lineno, format!("node id out of range for {n} nodes")));
            }
        }
        if !w.is_finite() || w < 0.0 {
            return Err(parse_err(path, lineno, format!("invalid weight {w}")));
        }
        max_id = Some(max_id.unwrap_or(0).max(u).max(v));
        rows.push((lineno, u, v, w));
    }
    let n = nodes.unwrap_or_else(|| max_id.map_or(0, |m| m + 1));
    Graph::build(n, collect_edges(path, rows)?)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Read { path: path.to_path_buf(), source })
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    parse_graph(&read(path)?, None, path)
}

/// Loads an edge list into a graph with exactly `nodes` nodes, so trailing
/// isolated nodes are kept.
pub fn load_graph_with_nodes(path: impl AsRef<Path>, nodes: usize) -> Result<Graph> {
    let path = path.as_ref();
    parse_graph(&read(path)?, Some(nodes), path)
}

/// Loads an edge list whose endpoints are arbitrary string labels. Labels
/// receive dense ids in order of first appearance; the returned vector maps
/// id to label.
pub fn load_labeled_graph(path: impl AsRef<Path>) -> Result<(Graph, Vec<String>)> {
    let path = path.as_ref();
    let text = read(path)?;
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (lineno, line) in data_lines(&text) {
        let (a, b, w) = split_edge_line(path, lineno, line)?;
        if !w.is_finite() || w < 0.0 {
            return Err(parse_err(path, lineno, format!("invalid weight {w}")));
        }
        let mut id = |s: &str| {
            *ids.entry(s.to_string()).or_insert_with(|| {
                labels.push(s.to_string());
                labels.len() - 1
            })
        };
        let (u, v) = (id(a), id(b));
        rows.push((lineno, u, v, w));
    }
    let graph = Graph::build(labels.len(), collect_edges(path, rows)?)?;
    Ok((graph, labels))
}

pub fn parse_opinions(text: &str, path: &Path) -> Result<Vec<f64>> {
    data_lines(text)
        .map(|(lineno, line)| {
            let x: f64 = line.parse().map_err(|_| parse_err(path, lineno, format!("bad opinion '{line}'")))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(parse_err(path, lineno, format!("non-finite opinion '{line}'")))
            }
        })
        .collect()
}

/// Reads an opinion vector and checks it has exactly `n` entries.
pub fn load_opinions(path: impl AsRef<Path>, n: usize) -> Result<Vec<f64>> {
    let path: PathBuf = path.as_ref().to_path_buf();
    let values = parse_opinions(&read(&path)?, &path)?;
    if values.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: values.len() });
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> &Path {
        Path::new(s)
    }

    #[test]
    fn path_graph_from_text() {
        let g = parse_graph("0\t1\n1\t2\n", None, p("x")).unwrap();
        assert_eq!(g, Graph::path(3));
    }

    #[test]
    fn comments_weights_and_reverse_duplicates() {
        let g = parse_graph("# header\n0\t1\t2.5\n\n1 0 2.5\n1\t2\n", None, p("x")).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.weight(0, 1), Some(2.5));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_graph("0\t1\n1\tx\n", None, p("f.tsv")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_graph("0\t1\n1\t0\t3\n", None, p("f")), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("2\t2\n", None, p("f")), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_graph("0\t5\n", Some(3), p("f")), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn explicit_node_count_keeps_isolated_nodes() {
        let g = parse_graph("", Some(4), p("x")).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (4, 0));
    }

    #[test]
    fn opinions() {
        assert_eq!(parse_opinions("1.0\n0.0\n-1.0\n", p("x")).unwrap(), vec![1.0, 0.0, -1.0]);
        assert!(matches!(parse_opinions("1.0\nabc\n", p("x")), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn opinion_length_mismatch() {
        let dir = std::env::temp_dir().join(format!("fjc-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let f = dir.join("s.txt");
        std::fs::write(&f, "1.0\n0.0\n").unwrap();
        assert!(matches!(load_opinions(&f, 3), Err(Error::LengthMismatch { expected: 3, found: 2 })));
        assert_eq!(load_opinions(&f, 2).unwrap(), vec![1.0, 0.0]);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn labeled_ids() {
        let dir = std::env::temp_dir().join(format!("fjc-lab-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let f = dir.join("g.tsv");
        std::fs::write(&f, "alice\tbob\nbob\tcarol\ncarol\tbob\n").unwrap();
        let (g, labels) = load_labeled_graph(&f).unwrap();
        assert_eq!(labels, vec!["alice", "bob", "carol"]);
        assert_eq!(g, Graph::path(3));
        std::fs::remove_dir_all(&dir).ok();
    }
}
