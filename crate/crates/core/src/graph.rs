use crate::error::{Error, Result};

/// How a graph was constructed; `Lattice2d` edge sets are the 4-neighbour
/// grid and are validated as such.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Lattice2d { rows: usize, cols: usize },
    General,
}

/// Undirected graph over `node_count` nodes with a canonical edge list
/// (each pair stored as `(i, j)` with `i < j`, no duplicates) and a
/// precomputed adjacency structure for the samplers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphStructure {
    node_count: usize,
    edges: Vec<(u32, u32)>,
    kind: GraphKind,
    // CSR adjacency
    adj_offsets: Vec<u32>,
    adj_neighbors: Vec<u32>,
    max_degree: usize,
}

impl GraphStructure {
    /// 4-neighbour 2d lattice with `rows * cols` nodes, row-major node order.
    pub fn lattice2d(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidGraph("lattice dimensions must be positive".into()));
        }
        let mut edges = Vec::with_capacity(rows * (cols - 1) + cols * (rows - 1));
        for r in 0..rows {
            for c in 0..cols {
                let node = (r * cols + c) as u32;
                if c + 1 < cols {
                    edges.push((node, node + 1));
                }
                if r + 1 < rows {
                    edges.push((node, node + cols as u32));
                }
            }
        }
        Ok(Self::build(rows * cols, edges, GraphKind::Lattice2d { rows, cols }))
    }

    /// Arbitrary undirected graph; pairs are canonicalised and checked.
    pub fn general(node_count: usize, edges: Vec<(u32, u32)>) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidGraph("node_count must be positive".into()));
        }
        let mut canonical: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at node {a}")));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if j as usize >= node_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i},{j}) references node >= node_count {node_count}"
                )));
            }
            canonical.push((i, j));
        }
        let mut sorted = canonical.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph("duplicate edge".into()));
        }
        Ok(Self::build(node_count, canonical, GraphKind::General))
    }

    fn build(node_count: usize, edges: Vec<(u32, u32)>, kind: GraphKind) -> Self {
        let mut degree = vec![0u32; node_count];
        for &(i, j) in &edges {
            degree[i as usize] += 1;
            degree[j as usize] += 1;
        }
        let max_degree = degree.iter().copied().max().unwrap_or(0) as usize;
        let mut offsets = vec![0u32; node_count + 1];
        for v in 0..node_count {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0u32; 2 * edges.len()];
        for &(i, j) in &edges {
            neighbors[fill[i as usize] as usize] = j;
            fill[i as usize] += 1;
            neighbors[fill[j as usize] as usize] = i;
            fill[j as usize] += 1;
        }
        Self {
            node_count,
            edges,
            kind,
            adj_offsets: offsets,
            adj_neighbors: neighbors,
            max_degree,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj_neighbors[self.adj_offsets[v] as usize..self.adj_offsets[v + 1] as usize]
    }

    /// Adjacency lists (each neighbour listed once per incident edge).
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        (0..self.node_count).map(|v| self.neighbors(v).to_vec()).collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.node_count == 0 {
            return false;
        }
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    stack.push(w as usize);
                }
            }
        }
        count == self.node_count
    }

    /// Same node set, different edge set (used to build the growing graphs
    /// of a hot-coupling sequence).
    pub fn with_edges(&self, edges: Vec<(u32, u32)>) -> Result<Self> {
        Self::general(self.node_count, edges)
    }
}

/// Position of the pair `(i, j)`, `i < j`, in the lexicographic ordering of
/// all node pairs of an `n`-node graph; this is the canonical component
/// order of an [`crate::state::EdgeState`].
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Inverse of [`pair_index`].
pub fn index_pair(n: usize, mut idx: usize) -> (usize, usize) {
    for i in 0..n {
        let row = n - i - 1;
        if idx < row {
            return (i, i + 1 + idx);
        }
        idx -= row;
    }
    panic!("pair index out of range");
}

/// Number of unordered node pairs `C(n, 2)`.
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_edge_count_matches_formula() {
        for (r, c) in [(1, 1), (2, 2), (3, 3), (10, 10), (2, 5)] {
            let g = GraphStructure::lattice2d(r, c).unwrap();
            assert_eq!(g.edge_count(), r * (c - 1) + c * (r - 1));
            assert_eq!(g.node_count(), r * c);
            assert!(g.is_connected());
        }
    }

    #[test]
    fn lattice_neighbors_are_grid_neighbors() {
        let g = GraphStructure::lattice2d(3, 3).unwrap();
        let mut centre: Vec<u32> = g.neighbors(4).to_vec();
        centre.sort_unstable();
        assert_eq!(centre, vec![1, 3, 5, 7]);
        assert_eq!(g.max_degree(), 4);
    }

    #[test]
    fn general_rejects_bad_edges() {
        assert!(GraphStructure::general(3, vec![(0, 0)]).is_err());
        assert!(GraphStructure::general(3, vec![(0, 3)]).is_err());
        assert!(GraphStructure::general(3, vec![(0, 1), (1, 0)]).is_err());
        let g = GraphStructure::general(3, vec![(2, 0), (1, 2)]).unwrap();
        assert_eq!(g.edges(), &[(0, 2), (1, 2)]);
    }

    #[test]
    fn pair_index_round_trips() {
        let n = 7;
        let mut seen = vec![false; pair_count(n)];
        for i in 0..n {
            for j in (i + 1)..n {
                let idx = pair_index(n, i, j);
                assert!(!seen[idx]);
                seen[idx] = true;
                assert_eq!(index_pair(n, idx), (i, j));
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn disconnected_graph_detected() {
        let g = GraphStructure::general(4, vec![(0, 1), (2, 3)]).unwrap();
        assert!(!g.is_connected());
    }
}
