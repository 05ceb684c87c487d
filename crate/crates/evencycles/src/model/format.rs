//! Line-based decomposition text format.
//!
//! ```text
//! # comments start with '#'
//! host bipartite 4 4
//! cycle p0.0 p1.0 p0.1 p1.1
//! matching p0.0-p1.2 p0.1-p1.0
//! ```
//!
//! Hosts: `bipartite A B`, `bipartite-minus-matching A`, `hole V U`,
//! `multipartite S1,S2,...`. Output is canonical and byte-reproducible:
//! cycles are written in canonical form, sorted, and matching pairs sorted.

use crate::error::{Error, Result};
use crate::model::cycle::Cycle;
use crate::model::host::{Edge, HostGraph, HostKind, Vertex};
use crate::model::packing::Packing;
use std::collections::BTreeSet;
use std::sync::Arc;

/// A parsed decomposition file, not yet validated against its host.
#[derive(Debug, Clone)]
pub struct Claim {
    pub host: HostGraph,
    pub cycles: Vec<Vec<Vertex>>,
    pub matching: Option<Vec<Edge>>,
}

pub fn write_packing(p: &Packing) -> String {
    let mut out = String::new();
    out.push_str(&host_line(p.host().kind()));
    out.push('\n');
    let mut cycles: Vec<&Cycle> = p.cycles().iter().collect();
    cycles.sort();
    for c in cycles {
        out.push_str("cycle ");
        out.push_str(&c.to_string());
        out.push('\n');
    }
    if let Some(m) = p.matching() {
        out.push_str("matching");
        for e in m {
            out.push(' ');
            out.push_str(&format!("{}-{}", e.0, e.1));
        }
        out.push('\n');
    }
    out
}

pub fn host_line(kind: &HostKind) -> String {
    match kind {
        HostKind::Bipartite { a, b } => format!("host bipartite {a} {b}"),
        HostKind::BipartiteMinusMatching { a } => {
            format!("host bipartite-minus-matching {a}")
        }
        HostKind::CompleteMinusClique { v, u } => format!("host hole {v} {u}"),
        HostKind::Multipartite { sizes } => {
            let s: Vec<String> = sizes.iter().map(|x| x.to_string()).collect();
            format!("host multipartite {}", s.join(","))
        }
    }
}

pub fn parse_host_tokens(tokens: &[&str]) -> Result<HostGraph> {
    let bad = || Error::Parse(format!("bad host spec `{}`", tokens.join(" ")));
    match tokens {
        ["bipartite", a, b] => {
            let a = a.parse().map_err(|_| bad())?;
            let b = b.parse().map_err(|_| bad())?;
            HostGraph::bipartite(a, b)
        }
        ["bipartite-minus-matching", a] => {
            let a = a.parse().map_err(|_| bad())?;
            HostGraph::bipartite_minus_matching(a)
        }
        ["hole", v, u] => {
            let v = v.parse().map_err(|_| bad())?;
            let u = u.parse().map_err(|_| bad())?;
            HostGraph::complete_minus_clique(v, u)
        }
        ["multipartite", sizes] => {
            let sizes: Result<Vec<usize>> = sizes
                .split(',')
                .map(|t| t.parse::<usize>().map_err(|_| bad()))
                .collect();
            HostGraph::multipartite(sizes?)
        }
        _ => Err(bad()),
    }
}

pub fn parse_claim(text: &str) -> Result<Claim> {
    let mut host: Option<HostGraph> = None;
    let mut cycles: Vec<Vec<Vertex>> = Vec::new();
    let mut matching: Option<Vec<Edge>> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        let rest: Vec<&str> = tokens.collect();
        match head {
            "host" => {
                if host.is_some() {
                    return Err(Error::Parse(format!("line {}: duplicate host", lineno + 1)));
                }
                host = Some(parse_host_tokens(&rest)?);
            }
            "cycle" => {
                let vs: Result<Vec<Vertex>> = rest.iter().map(|t| t.parse()).collect();
                cycles.push(vs?);
            }
            "matching" => {
                if matching.is_some() {
                    return Err(Error::Parse(format!(
                        "line {}: duplicate matching",
                        lineno + 1
                    )));
                }
                let mut edges = Vec::new();
                for tok in rest {
                    let (a, b) = tok
                        .split_once('-')
                        .ok_or_else(|| Error::Parse(format!("bad matching pair `{tok}`")))?;
                    let a: Vertex = a.parse()?;
                    let b: Vertex = b.parse()?;
                    if a == b {
                        return Err(Error::Parse(format!("degenerate matching pair `{tok}`")));
                    }
                    edges.push(Edge::new(a, b));
                }
                matching = Some(edges);
            }
            other => {
                return Err(Error::Parse(format!(
                    "line {}: unknown directive `{other}`",
                    lineno + 1
                )));
            }
        }
    }
    let host = host.ok_or_else(|| Error::Parse("missing host line".into()))?;
    Ok(Claim {
        host,
        cycles,
        matching,
    })
}

/// Parses and validates a file into a packing.
pub fn parse_packing(text: &str) -> Result<Packing> {
    let claim = parse_claim(text)?;
    let host = Arc::new(claim.host);
    let cycles: Result<Vec<Cycle>> = claim.cycles.into_iter().map(Cycle::new).collect();
    let matching: Option<BTreeSet<Edge>> = claim.matching.map(|m| m.into_iter().collect());
    Packing::new(host, cycles?, matching)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_with_matching() {
        let host = Arc::new(HostGraph::bipartite(5, 5).unwrap());
        let diag: BTreeSet<Edge> = host.diagonal_matching().into_iter().collect();
        let p = Packing::new(host, vec![], Some(diag)).unwrap();
        let text = write_packing(&p);
        let q = parse_packing(&text).unwrap();
        assert_eq!(p, q);
        assert_eq!(text, write_packing(&q));
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let text = "# header\nhost bipartite 4 4\n\ncycle p0.0 p1.0 p0.1 p1.1 # inline\n";
        let p = parse_packing(text).unwrap();
        assert_eq!(p.cycles().len(), 1);
    }

    #[test]
    fn multipartite_host_line() {
        let text = "host multipartite 6,6,6\n";
        let p = parse_packing(text).unwrap();
        assert_eq!(p.host().edge_count(), 108);
    }

    #[test]
    fn bad_input_errors() {
        assert!(parse_packing("cycle p0.0 p1.0\n").is_err());
        assert!(parse_packing("host bipartite 4\n").is_err());
        assert!(parse_packing("host bipartite 4 4\nwidget 3\n").is_err());
    }
}
