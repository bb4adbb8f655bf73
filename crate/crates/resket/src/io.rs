//! Edge-list text IO: one edge per line, `u v [w]`, `#` comments.

use std::collections::BTreeMap;
use std::path::Path;

use resket_core::Graph;

use crate::error::{CliError, CliResult};

/// A graph with the original vertex ids; dense index `i` is `ids[i]`, and ids
/// are assigned in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub ids: Vec<u64>,
}

impl LabeledGraph {
    pub fn identity(graph: Graph) -> Self {
        let ids = (0..graph.n() as u64).collect();
        Self { graph, ids }
    }

    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_id(tok: &str, line: usize) -> CliResult<u64> {
    tok.parse().map_err(|_| CliError::Parse {
        line,
        msg: format!("vertex id `{tok}` is not a non-negative integer"),
    })
}

pub fn parse_edge_list(text: &str) -> CliResult<LabeledGraph> {
    let mut raw = Vec::new();
    for (line, l) in content_lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if !(2..=3).contains(&toks.len()) {
            return Err(CliError::Parse {
                line,
                msg: format!("expected `u v [w]`, found {} fields", toks.len()),
            });
        }
        let u = parse_id(toks[0], line)?;
        let v = parse_id(toks[1], line)?;
        let w = match toks.get(2) {
            Some(t) => t.parse::<f64>().map_err(|_| CliError::Parse {
                line,
                msg: format!("weight `{t}` is not a number"),
            })?,
            None => 1.0,
        };
        raw.push((u, v, w));
    }
    let mut index = BTreeMap::new();
    for &(u, v, _) in &raw {
        index.insert(u, 0);
        index.insert(v, 0);
    }
    let ids: Vec<u64> = index.keys().copied().collect();
    for (i, slot) in index.values_mut().enumerate() {
        *slot = i;
    }
    let edges = raw.into_iter().map(|(u, v, w)| (index[&u], index[&v], w));
    let graph = Graph::new(ids.len(), edges)?;
    Ok(LabeledGraph { graph, ids })
}

pub fn load_graph(path: &Path) -> CliResult<LabeledGraph> {
    parse_edge_list(&read_text(path)?)
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

/// Unit weights are written without a weight column.
pub fn format_edge_list(g: &LabeledGraph) -> String {
    let mut out = format!("# n={} m={}\n", g.graph.n(), g.graph.m());
    for &(u, v, w) in g.graph.edges() {
        if w == 1.0 {
            out.push_str(&format!("{} {}\n", g.ids[u], g.ids[v]));
        } else {
            out.push_str(&format!("{} {} {:?}\n", g.ids[u], g.ids[v], w));
        }
    }
    out
}

/// Pairs `a b`, one per line, in original vertex ids.
pub fn parse_pairs(text: &str) -> CliResult<Vec<(u64, u64)>> {
    content_lines(text)
        .map(|(line, l)| {
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(CliError::Parse {
                    line,
                    msg: format!("expected `a b`, found {} fields", toks.len()),
                });
            }
            Ok((parse_id(toks[0], line)?, parse_id(toks[1], line)?))
        })
        .collect()
}
