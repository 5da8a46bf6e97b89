//! Network topology: lattices and generic graphs, edge colorings into gate
//! rounds, subsystem boundaries, and conductance.

mod conductance;
mod io;

pub use conductance::{conductance, ConductanceEstimate, ConductanceMode};
pub use io::{read_edge_list, write_edge_list};

use crate::error::{Error, Result};

/// An undirected simple graph whose vertices carry integer coordinates.
///
/// Lattice graphs have dimension D >= 1 and coordinates in [-N, N]^D with
/// M = 2N + 1; generic graphs have dimension 0 and each vertex's coordinate
/// tuple is just its index. Vertex order is row-major by coordinates with the
/// first coordinate most significant, so all derived matrices and files are
/// reproducible.
#[derive(Debug, Clone)]
pub struct NetworkGraph {
    coords: Vec<Vec<i64>>,
    neighbors: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    dim: usize,
    side: Option<usize>,
    connected: bool,
}

impl NetworkGraph {
    /// Builds a generic (dimension-0) graph from an edge list over vertex
    /// indices 0..n. Rejects self-edges; duplicate edges collapse to one.
    pub fn from_edges(n: usize, edge_list: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph {
                reason: "graph must have at least one vertex".into(),
            });
        }
        let mut edges = Vec::with_capacity(edge_list.len());
        for &(u, v) in edge_list {
            if u == v {
                return Err(Error::InvalidGraph {
                    reason: format!("self-edge at vertex {u}"),
                });
            }
            if u >= n || v >= n {
                return Err(Error::InvalidGraph {
                    reason: format!("edge ({u}, {v}) out of range for {n} vertices"),
                });
            }
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        edges.dedup();
        let coords = (0..n).map(|i| vec![i as i64]).collect();
        Ok(Self::assemble(coords, edges, 0, None))
    }

    fn assemble(
        coords: Vec<Vec<i64>>,
        edges: Vec<(usize, usize)>,
        dim: usize,
        side: Option<usize>,
    ) -> Self {
        let n = coords.len();
        let mut neighbors = vec![Vec::new(); n];
        for &(u, v) in &edges {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        let connected = connected_bfs(n, &neighbors);
        Self {
            coords,
            neighbors,
            edges,
            dim,
            side,
            connected,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges as (u, v) pairs with u < v, sorted lexicographically.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n_vertices()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.neighbors[u].binary_search(&v).is_ok()
    }

    /// Lattice dimension; 0 for generic graphs.
    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Lattice side length M, when the graph is a Cartesian lattice.
    pub fn side(&self) -> Option<usize> {
        self.side
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn coord(&self, v: usize) -> &[i64] {
        &self.coords[v]
    }

    /// Index of the vertex with the given coordinate tuple, if any.
    pub fn vertex_at(&self, coord: &[i64]) -> Option<usize> {
        match (self.dim, self.side) {
            (d, Some(m)) if d >= 1 => {
                if coord.len() != d {
                    return None;
                }
                let half = (m as i64 - 1) / 2;
                let mut idx = 0usize;
                for &x in coord {
                    if x < -half || x > half {
                        return None;
                    }
                    idx = idx * m + (x + half) as usize;
                }
                Some(idx)
            }
            _ => {
                let idx = usize::try_from(*coord.first()?).ok()?;
                (idx < self.n_vertices() && coord.len() == 1).then_some(idx)
            }
        }
    }
}

fn connected_bfs(n: usize, neighbors: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &neighbors[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == n
}

/// A partition of the edges into K rounds, each a matching; vertices left
/// unmatched within a round are listed as loops so every round acts on all
/// vertices (a looped vertex just idles that round).
#[derive(Debug, Clone)]
pub struct EdgeColoring {
    rounds: Vec<Vec<(usize, usize)>>,
    loops: Vec<Vec<usize>>,
}

impl EdgeColoring {
    pub(crate) fn from_rounds(n: usize, rounds: Vec<Vec<(usize, usize)>>) -> Self {
        let loops = rounds
            .iter()
            .map(|round| {
                let mut matched = vec![false; n];
                for &(u, v) in round {
                    matched[u] = true;
                    matched[v] = true;
                }
                (0..n).filter(|&v| !matched[v]).collect()
            })
            .collect();
        Self { rounds, loops }
    }

    /// Number of rounds K.
    pub fn n_rounds(&self) -> usize {
        self.rounds.len()
    }

    pub fn round(&self, k: usize) -> &[(usize, usize)] {
        &self.rounds[k]
    }

    /// Vertices idle (looped) in round k.
    pub fn loops(&self, k: usize) -> &[usize] {
        &self.loops[k]
    }

    pub fn rounds(&self) -> &[Vec<(usize, usize)>] {
        &self.rounds
    }
}

/// A nonempty proper subset of vertices and its complement.
#[derive(Debug, Clone)]
pub struct Subsystem {
    members: Vec<usize>,
    n_total: usize,
}

impl Subsystem {
    pub fn new(members: impl IntoIterator<Item = usize>, n_total: usize) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() || members.len() >= n_total {
            return Err(Error::InvalidSubsystem {
                reason: format!(
                    "need a nonempty proper subset; got {} of {} vertices",
                    members.len(),
                    n_total
                ),
            });
        }
        if let Some(&max) = members.last() {
            if max >= n_total {
                return Err(Error::InvalidSubsystem {
                    reason: format!("vertex {max} out of range for {n_total} vertices"),
                });
            }
        }
        Ok(Self { members, n_total })
    }

    /// The lattice prefix {x <= cut} in 1-D coordinates.
    pub fn prefix_1d(graph: &NetworkGraph, cut: i64) -> Result<Self> {
        if graph.dimension() != 1 {
            return Err(Error::InvalidSubsystem {
                reason: "prefix_1d requires a 1-D lattice".into(),
            });
        }
        let members: Vec<usize> = (0..graph.n_vertices())
            .filter(|&v| graph.coord(v)[0] <= cut)
            .collect();
        Self::new(members, graph.n_vertices())
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn complement(&self) -> Self {
        let members = (0..self.n_total).filter(|&v| !self.contains(v)).collect();
        Self {
            members,
            n_total: self.n_total,
        }
    }
}

/// Builds the D-dimensional Cartesian lattice with side M (odd, >= 3):
/// coordinates in [-N, N]^D with M = 2N + 1, nearest-neighbor edges, and the
/// canonical 2D-round coloring (even bonds then odd bonds, axis by axis).
pub fn cartesian_lattice(d: usize, m: usize) -> Result<(NetworkGraph, EdgeColoring)> {
    if d < 1 {
        return Err(Error::InvalidParameter {
            name: "D",
            reason: "lattice dimension must be at least 1".into(),
        });
    }
    if m < 3 || m % 2 == 0 {
        return Err(Error::InvalidParameter {
            name: "M",
            reason: format!("side length must be odd and at least 3; got {m}"),
        });
    }
    let n: usize = m.checked_pow(d as u32).ok_or(Error::InvalidParameter {
        name: "M",
        reason: "lattice too large".into(),
    })?;
    let half = (m as i64 - 1) / 2;

    let mut coords = vec![Vec::with_capacity(d); n];
    for (idx, coord) in coords.iter_mut().enumerate() {
        let mut rem = idx;
        let mut tuple = vec![0i64; d];
        for slot in (0..d).rev() {
            tuple[slot] = (rem % m) as i64 - half;
            rem /= m;
        }
        *coord = tuple;
    }

    // stride[axis] = index step for +1 along that axis.
    let mut strides = vec![1usize; d];
    for axis in (0..d.saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * m;
    }

    let mut edges = Vec::with_capacity(d * n);
    let mut rounds = vec![Vec::new(); 2 * d];
    for idx in 0..n {
        for axis in 0..d {
            let x = coords[idx][axis];
            if x < half {
                let other = idx + strides[axis];
                edges.push((idx, other));
                // Bond parity along the axis, taken at the lower endpoint
                // shifted to [0, M): even bonds fire first.
                let parity = ((x + half) % 2) as usize;
                rounds[2 * axis + parity].push((idx, other));
            }
        }
    }
    edges.sort_unstable();

    let graph = NetworkGraph::assemble(coords, edges, d, Some(m));
    let coloring = EdgeColoring::from_rounds(n, rounds);
    Ok((graph, coloring))
}

/// Proper edge coloring by greedy assignment in the graph's deterministic
/// edge order; uses at most maxdegree + 1 rounds.
pub fn greedy_edge_coloring(graph: &NetworkGraph) -> EdgeColoring {
    let n = graph.n_vertices();
    let mut vertex_colors: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut rounds: Vec<Vec<(usize, usize)>> = Vec::new();
    for &(u, v) in graph.edges() {
        let mut color = 0;
        while vertex_colors[u].contains(&color) || vertex_colors[v].contains(&color) {
            color += 1;
        }
        if color == rounds.len() {
            rounds.push(Vec::new());
        }
        rounds[color].push((u, v));
        vertex_colors[u].push(color);
        vertex_colors[v].push(color);
    }
    if rounds.is_empty() {
        rounds.push(Vec::new());
    }
    EdgeColoring::from_rounds(n, rounds)
}

/// Inner boundary, outer boundary, and crossing edges of a bipartition:
/// the L-vertices touching R, the R-vertices touching L, and the edges
/// between them.
pub fn boundary_sets(
    graph: &NetworkGraph,
    l: &Subsystem,
) -> Result<(Vec<usize>, Vec<usize>, Vec<(usize, usize)>)> {
    if l.n_total() != graph.n_vertices() {
        return Err(Error::InvalidSubsystem {
            reason: format!(
                "subsystem sized for {} vertices but graph has {}",
                l.n_total(),
                graph.n_vertices()
            ),
        });
    }
    let mut inner = Vec::new();
    let mut outer = Vec::new();
    let mut crossing = Vec::new();
    for &(u, v) in graph.edges() {
        if l.contains(u) != l.contains(v) {
            crossing.push((u, v));
        }
    }
    let mut inner_seen = vec![false; graph.n_vertices()];
    let mut outer_seen = vec![false; graph.n_vertices()];
    for &(u, v) in &crossing {
        let (in_l, in_r) = if l.contains(u) { (u, v) } else { (v, u) };
        if !inner_seen[in_l] {
            inner_seen[in_l] = true;
            inner.push(in_l);
        }
        if !outer_seen[in_r] {
            outer_seen[in_r] = true;
            outer.push(in_r);
        }
    }
    inner.sort_unstable();
    outer.sort_unstable();
    Ok((inner, outer, crossing))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_of_three() {
        let (g, c) = cartesian_lattice(1, 3).unwrap();
        assert_eq!(g.n_vertices(), 3);
        assert_eq!(g.n_edges(), 2);
        assert_eq!(c.n_rounds(), 2);
        // Vertices are x = -1, 0, 1 at indices 0, 1, 2.
        assert_eq!(c.round(0), &[(0, 1)]);
        assert_eq!(c.round(1), &[(1, 2)]);
        assert_eq!(c.loops(0), &[2]);
        assert_eq!(c.loops(1), &[0]);
    }

    #[test]
    fn lattice_counts() {
        for (d, m) in [(1, 5), (2, 3), (2, 5), (3, 3)] {
            let (g, c) = cartesian_lattice(d, m).unwrap();
            assert_eq!(g.n_vertices(), m.pow(d as u32));
            assert_eq!(
                g.n_edges(),
                d * m.pow(d as u32 - 1) * (m - 1),
                "edge count for D={d} M={m}"
            );
            assert_eq!(c.n_rounds(), 2 * d);
            assert!(g.is_connected());
        }
    }

    #[test]
    fn rounds_are_matchings_and_partition_edges() {
        let (g, c) = cartesian_lattice(2, 5).unwrap();
        let mut total = 0;
        let mut seen = std::collections::HashSet::new();
        for k in 0..c.n_rounds() {
            let mut touched = vec![false; g.n_vertices()];
            for &(u, v) in c.round(k) {
                assert!(!touched[u] && !touched[v], "round {k} is not a matching");
                touched[u] = true;
                touched[v] = true;
                assert!(seen.insert((u, v)), "edge ({u},{v}) in two rounds");
                total += 1;
            }
            for &v in c.loops(k) {
                assert!(!touched[v]);
            }
            assert_eq!(
                c.round(k).len() * 2 + c.loops(k).len(),
                g.n_vertices(),
                "round {k} does not cover all vertices"
            );
        }
        assert_eq!(total, g.n_edges());
    }

    #[test]
    fn lattice_rejects_bad_side() {
        assert!(cartesian_lattice(1, 4).is_err());
        assert!(cartesian_lattice(1, 1).is_err());
        assert!(cartesian_lattice(0, 5).is_err());
    }

    #[test]
    fn vertex_at_roundtrips() {
        let (g, _) = cartesian_lattice(2, 5).unwrap();
        for v in 0..g.n_vertices() {
            assert_eq!(g.vertex_at(g.coord(v)), Some(v));
        }
        assert_eq!(g.vertex_at(&[3, 0]), None);
        assert_eq!(g.vertex_at(&[0]), None);
    }

    #[test]
    fn greedy_coloring_on_path_uses_two_rounds() {
        let g = NetworkGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let c = greedy_edge_coloring(&g);
        assert_eq!(c.n_rounds(), 2);
    }

    #[test]
    fn greedy_coloring_on_star_uses_four_rounds() {
        let g = NetworkGraph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let c = greedy_edge_coloring(&g);
        assert_eq!(c.n_rounds(), 4);
        for k in 0..4 {
            assert_eq!(c.round(k).len(), 1);
        }
    }

    #[test]
    fn greedy_coloring_respects_vizing_bound() {
        let g = NetworkGraph::from_edges(
            6,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 4), (2, 5), (3, 4), (4, 5)],
        )
        .unwrap();
        let c = greedy_edge_coloring(&g);
        assert!(c.n_rounds() <= g.max_degree() + 1);
        let total: usize = (0..c.n_rounds()).map(|k| c.round(k).len()).sum();
        assert_eq!(total, g.n_edges());
    }

    #[test]
    fn boundary_of_left_prefix() {
        let (g, _) = cartesian_lattice(1, 5).unwrap();
        // L = two leftmost vertices x = -2, -1.
        let l = Subsystem::prefix_1d(&g, -1).unwrap();
        assert_eq!(l.members(), &[0, 1]);
        let (inner, outer, crossing) = boundary_sets(&g, &l).unwrap();
        assert_eq!(inner, vec![g.vertex_at(&[-1]).unwrap()]);
        assert_eq!(outer, vec![g.vertex_at(&[0]).unwrap()]);
        assert_eq!(crossing.len(), 1);
    }

    #[test]
    fn prefix_cut_has_single_crossing_edge() {
        let (g, _) = cartesian_lattice(1, 9).unwrap();
        for cut in -4..4 {
            let l = Subsystem::prefix_1d(&g, cut).unwrap();
            let (_, _, crossing) = boundary_sets(&g, &l).unwrap();
            assert_eq!(crossing.len(), 1, "cut at {cut}");
        }
    }

    #[test]
    fn boundary_when_l_is_all_but_one_vertex() {
        let (g, _) = cartesian_lattice(2, 3).unwrap();
        let missing = 4usize; // center vertex
        let l = Subsystem::new((0..9).filter(|&v| v != missing), 9).unwrap();
        let (_, outer, _) = boundary_sets(&g, &l).unwrap();
        assert_eq!(outer, vec![missing]);
    }

    #[test]
    fn boundary_duality() {
        let (g, _) = cartesian_lattice(2, 3).unwrap();
        let l = Subsystem::new([0, 1, 2, 4], 9).unwrap();
        let r = l.complement();
        let (inner_l, outer_l, cross_l) = boundary_sets(&g, &l).unwrap();
        let (inner_r, outer_r, cross_r) = boundary_sets(&g, &r).unwrap();
        assert_eq!(inner_l, outer_r);
        assert_eq!(outer_l, inner_r);
        assert_eq!(cross_l, cross_r);
    }

    #[test]
    fn subsystem_rejects_improper_sets() {
        assert!(Subsystem::new([], 5).is_err());
        assert!(Subsystem::new(0..5, 5).is_err());
        assert!(Subsystem::new([7], 5).is_err());
    }

    #[test]
    fn from_edges_rejects_self_edge() {
        assert!(NetworkGraph::from_edges(3, &[(1, 1)]).is_err());
    }

    #[test]
    fn disconnected_graph_is_flagged() {
        let g = NetworkGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(!g.is_connected());
    }
}
