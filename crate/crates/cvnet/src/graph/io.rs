use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{cartesian_lattice, NetworkGraph};

/// Writes the edge-list text format: a header line, then one `u v` pair per
/// line by vertex index. Lattices use `D M` as the header so readers can
/// reconstruct coordinates; other graphs use `generic |G|`.
pub fn write_edge_list<W: Write>(graph: &NetworkGraph, mut out: W) -> Result<()> {
    match (graph.dimension(), graph.side()) {
        (d, Some(m)) if d >= 1 => writeln!(out, "{d} {m}")?,
        _ => writeln!(out, "generic {}", graph.n_vertices())?,
    }
    for &(u, v) in graph.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

/// Reads the format produced by [`write_edge_list`].
///
/// For a lattice header the edge list must match the lattice exactly; for a
/// generic header any simple graph on the declared vertex count is accepted.
pub fn read_edge_list<R: BufRead>(input: R) -> Result<NetworkGraph> {
    let mut lines = input.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        reason: "empty input".into(),
    })?;
    let header = header?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(Error::Parse {
            line: 1,
            reason: format!("expected `D M` or `generic |G|`; got {header:?}"),
        });
    }

    let mut edges = Vec::new();
    for (i, line) in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut it = trimmed.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<usize> {
            tok.and_then(|t| t.parse().ok()).ok_or(Error::Parse {
                line: i + 1,
                reason: format!("expected `u v` pair; got {trimmed:?}"),
            })
        };
        let u = parse(it.next())?;
        let v = parse(it.next())?;
        if it.next().is_some() {
            return Err(Error::Parse {
                line: i + 1,
                reason: format!("trailing tokens in {trimmed:?}"),
            });
        }
        edges.push((u, v));
    }

    if parts[0] == "generic" {
        let n: usize = parts[1].parse().map_err(|_| Error::Parse {
            line: 1,
            reason: format!("bad vertex count {:?}", parts[1]),
        })?;
        NetworkGraph::from_edges(n, &edges)
    } else {
        let d: usize = parts[0].parse().map_err(|_| Error::Parse {
            line: 1,
            reason: format!("bad dimension {:?}", parts[0]),
        })?;
        let m: usize = parts[1].parse().map_err(|_| Error::Parse {
            line: 1,
            reason: format!("bad side length {:?}", parts[1]),
        })?;
        let (graph, _) = cartesian_lattice(d, m)?;
        let mut expect: Vec<(usize, usize)> = graph.edges().to_vec();
        let mut got: Vec<(usize, usize)> =
            edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        expect.sort_unstable();
        got.sort_unstable();
        if expect != got {
            return Err(Error::Parse {
                line: 1,
                reason: format!("edge list does not match the {d}-D lattice with M = {m}"),
            });
        }
        Ok(graph)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_roundtrip() {
        let (g, _) = cartesian_lattice(2, 3).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let g2 = read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(g2.dimension(), 2);
        assert_eq!(g2.side(), Some(3));
        assert_eq!(g2.edges(), g.edges());
    }

    #[test]
    fn generic_roundtrip() {
        let g = NetworkGraph::from_edges(5, &[(0, 1), (0, 2), (3, 4), (2, 3)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("generic 5\n"));
        let g2 = read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(g2.dimension(), 0);
        assert_eq!(g2.edges(), g.edges());
    }

    #[test]
    fn rejects_corrupt_lattice_edges() {
        let (g, _) = cartesian_lattice(1, 5).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let mut text = String::from_utf8(buf).unwrap();
        text.push_str("0 3\n");
        assert!(read_edge_list(text.as_bytes()).is_err());
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(read_edge_list("generic 3\n0 1 2\n".as_bytes()).is_err());
        assert!(read_edge_list("generic 3\n0\n".as_bytes()).is_err());
        assert!(read_edge_list("".as_bytes()).is_err());
    }
}
