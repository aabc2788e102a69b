//! Graph kernels shared by the model builders, the separators and the
//! certification code.
//!
//! Graphs are undirected and simple. Every edge carries a stable [`EdgeId`]
//! (the branch index in the originating case) which survives taking
//! subgraphs, so results can always be mapped back to model variables.

mod cycles;
mod directed;
mod forest;

pub use cycles::{fundamental_cycle_basis, short_cycles, CycleBasis, SignedCycle, MAX_SHORT_CYCLE_LEN};
pub use directed::{extract_directed_cycles, Arc, DirectedCycle};
pub use forest::{bridges, connected_components, min_spanning_forest, Components, SpanningForest};

pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub u: usize,
    pub v: usize,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, usize)>>,
    pos_of: Vec<Option<usize>>,
}

impl Graph {
    /// Builds a graph on `n` vertices; edge ids are the iteration positions.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self::from_edges(n, edges.into_iter().enumerate().map(|(id, (u, v))| Edge { id, u, v }).collect())
    }

    fn from_edges(n: usize, edges: Vec<Edge>) -> Self {
        let mut adj = vec![Vec::new(); n];
        let max_id = edges.iter().map(|e| e.id + 1).max().unwrap_or(0);
        let mut pos_of = vec![None; max_id];
        for (pos, e) in edges.iter().enumerate() {
            assert!(e.u < n && e.v < n, "edge {} references a vertex outside 0..{n}", e.id);
            adj[e.u].push((e.v, pos));
            adj[e.v].push((e.u, pos));
            pos_of[e.id] = Some(pos);
        }
        Self { n, edges, adj, pos_of }
    }

    /// Same vertex set, only the edges for which `keep` holds; ids are preserved.
    pub fn subgraph(&self, keep: impl Fn(EdgeId) -> bool) -> Self {
        Self::from_edges(self.n, self.edges.iter().copied().filter(|e| keep(e.id)).collect())
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.pos_of.get(id).copied().flatten().map(|p| &self.edges[p])
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        self.edge(id).is_some()
    }

    /// Neighbours of `v` with the connecting edge.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, &Edge)> + '_ {
        self.adj[v].iter().map(move |&(w, pos)| (w, &self.edges[pos]))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }
}

/// Minimal union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::Graph;

    pub fn triangle() -> Graph {
        Graph::new(3, [(0, 1), (1, 2), (0, 2)])
    }

    pub fn path(n: usize) -> Graph {
        Graph::new(n, (0..n - 1).map(|i| (i, i + 1)))
    }

    pub fn ring(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn grid(rows: usize, cols: usize) -> Graph {
        let id = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((id(r, c), id(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((id(r, c), id(r + 1, c)));
                }
            }
        }
        Graph::new(rows * cols, edges)
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Graph::new(n, edges)
    }

    /// Two triangles joined by the edge with id 6.
    pub fn barbell() -> Graph {
        Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
    }
}
