//! Network, graph, trajectory and table file formats.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nlt_core::exact::ReachTable;
use nlt_core::network::UndirectedGraph;
use nlt_core::{InfoNetwork, Trajectory};
use serde::{Deserialize, Serialize};

/// Failure to read or parse an input file.
#[derive(Debug)]
pub enum IoError {
    Read { path: String, source: std::io::Error },
    Parse { what: String, message: String },
    Network(nlt_core::Error),
}

impl std::fmt::Display for IoError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IoError::Read { path, source } => write!(f, "cannot read {path}: {source}"),
            IoError::Parse { what, message } => write!(f, "cannot parse {what}: {message}"),
            IoError::Network(e) => write!(f, "invalid network: {e}"),
        }
    }
}

impl std::error::Error for IoError {}

fn parse_err(what: &str, e: impl std::fmt::Display) -> IoError {
    IoError::Parse {
        what: what.to_string(),
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub src: String,
    pub dst: String,
    pub weight: f64,
}

/// The JSON network document. Unknown top-level keys are ignored, so a
/// counterexample file also reads as a network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkFile {
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeRecord>,
}

impl NetworkFile {
    /// User-visible nodes and edges of `net`; the void node and its slack
    /// edges are left out.
    pub fn from_network(net: &InfoNetwork) -> Self {
        NetworkFile {
            nodes: net.labels().map(str::to_string).collect(),
            edges: net
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    src: net.label(e.src).to_string(),
                    dst: net.label(e.dst).to_string(),
                    weight: e.weight,
                })
                .collect(),
        }
    }

    pub fn build(&self) -> Result<InfoNetwork, IoError> {
        let edges: Vec<(&str, &str, f64)> =
            self.edges.iter().map(|e| (e.src.as_str(), e.dst.as_str(), e.weight)).collect();
        InfoNetwork::build(&self.nodes, &edges).map_err(IoError::Network)
    }
}

pub fn parse_network_json(text: &str) -> Result<InfoNetwork, IoError> {
    let file: NetworkFile = serde_json::from_str(text).map_err(|e| parse_err("network JSON", e))?;
    file.build()
}

/// Reads a `src,dst,weight` edge list. Nodes are the endpoints in order of
/// first appearance.
pub fn parse_network_csv(text: &str) -> Result<InfoNetwork, IoError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err("network CSV", e))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["src", "dst", "weight"] {
        return Err(parse_err("network CSV", "header must be `src,dst,weight`"));
    }
    let mut nodes: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    for row in reader.deserialize::<EdgeRecord>() {
        let e = row.map_err(|e| parse_err("network CSV", e))?;
        for l in [&e.src, &e.dst] {
            if !nodes.contains(l) {
                nodes.push(l.clone());
            }
        }
        edges.push(e);
    }
    NetworkFile { nodes, edges }.build()
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a network, as CSV when the extension is `.csv` and JSON otherwise.
pub fn read_network(path: &Path) -> Result<InfoNetwork, IoError> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        parse_network_csv(&text)
    } else {
        parse_network_json(&text)
    }
}

pub fn network_json(net: &InfoNetwork) -> serde_json::Value {
    serde_json::to_value(NetworkFile::from_network(net)).expect("network serializes")
}

#[derive(Debug, Deserialize)]
struct GraphFile {
    nodes: Vec<String>,
    edges: Vec<(String, String)>,
}

/// Reads an undirected graph `{"nodes": [labels], "edges": [[u, v], ...]}`.
pub fn parse_graph_json(text: &str) -> Result<UndirectedGraph, IoError> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| parse_err("graph JSON", e))?;
    let index = |l: &str| {
        file.nodes
            .iter()
            .position(|n| n == l)
            .ok_or_else(|| parse_err("graph JSON", format!("unknown vertex `{l}`")))
    };
    let edges = file
        .edges
        .iter()
        .map(|(a, b)| Ok((index(a)?, index(b)?)))
        .collect::<Result<Vec<_>, IoError>>()?;
    UndirectedGraph::new(file.nodes.clone(), edges).map_err(IoError::Network)
}

pub fn read_graph(path: &Path) -> Result<UndirectedGraph, IoError> {
    parse_graph_json(&read(path)?)
}

/// Parses a seed list: comma- or whitespace-separated labels, or `@path`
/// to read them from a file.
pub fn parse_label_list(list: &str) -> Result<Vec<String>, IoError> {
    let text = match list.strip_prefix('@') {
        Some(path) => read(Path::new(path))?,
        None => list.to_string(),
    };
    Ok(text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect())
}

fn header(net: &InfoNetwork, out: &mut String) {
    out.push('t');
    for v in net.non_void_nodes() {
        out.push(',');
        out.push_str(net.label(v));
    }
    out.push('\n');
}

/// Trajectory as CSV: a `t` column, then one 0/1 column per node.
pub fn trajectory_csv(net: &InfoNetwork, traj: &Trajectory) -> String {
    let mut out = String::new();
    header(net, &mut out);
    for t in 0..=traj.horizon() {
        let _ = write!(out, "{t}");
        for v in net.non_void_nodes() {
            out.push_str(if traj.is_active(t, v) { ",1" } else { ",0" });
        }
        out.push('\n');
    }
    out
}

/// Expected activity table as CSV with 17 significant digits.
pub fn reach_table_csv(net: &InfoNetwork, table: &ReachTable) -> String {
    let mut out = String::new();
    header(net, &mut out);
    for t in 0..=table.horizon() {
        let _ = write!(out, "{t}");
        for v in net.non_void_nodes() {
            let _ = write!(out, ",{:.16e}", table.get(t, v));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nlt_core::network::random_dag;
    use nlt_core::diffusion::rng;

    #[test]
    fn json_round_trip_is_exact() {
        let mut r = rng::stream(5);
        for _ in 0..20 {
            let net = random_dag(&mut r, 7, 14);
            let text = serde_json::to_string(&network_json(&net)).unwrap();
            let back = parse_network_json(&text).unwrap();
            assert_eq!(NetworkFile::from_network(&back), NetworkFile::from_network(&net));
            assert_eq!(back.node_count(), net.node_count());
        }
    }

    #[test]
    fn csv_needs_header() {
        assert!(parse_network_csv("a,b,0.5\n").is_err());
        let net = parse_network_csv("src,dst,weight\nb,a,0.7\n").unwrap();
        assert_eq!(net.labels().collect::<Vec<_>>(), ["b", "a"]);
        assert!((net.weight(net.resolve("b").unwrap(), net.void()) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn graph_json() {
        let g = parse_graph_json(r#"{"nodes":["x","y","z"],"edges":[["x","y"],["y","z"]]}"#).unwrap();
        assert_eq!(g.edges(), [(0, 1), (1, 2)]);
        assert!(parse_graph_json(r#"{"nodes":["x"],"edges":[["x","q"]]}"#).is_err());
    }

    #[test]
    fn label_lists() {
        assert_eq!(parse_label_list("a, b,c").unwrap(), ["a", "b", "c"]);
        assert!(parse_label_list("").unwrap().is_empty());
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("seeds.txt");
        fs::write(&p, "x\ny\n").unwrap();
        assert_eq!(parse_label_list(&format!("@{}", p.display())).unwrap(), ["x", "y"]);
    }

    #[test]
    fn table_has_seventeen_digits() {
        let net = parse_network_csv("src,dst,weight\nb,a,0.3333333333333333\n").unwrap();
        let seeds = nlt_core::SeedSets::from_labels(&net, &["a"], &[] as &[&str]).unwrap();
        let table = nlt_core::exact::expected_indicator_dag(&net, &seeds, 1).unwrap();
        let csv = reach_table_csv(&net, &table);
        assert_eq!(csv.lines().next(), Some("t,b,a"));
        assert_eq!(csv.lines().nth(2), Some("1,3.3333333333333331e-1,0.0000000000000000e0"));
    }
}
