use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{DisjointSets, EdgeId, Graph, SpanningForest};
use crate::error::{Error, Result};

/// Upper guard on the length of enumerated short cycles.
pub const MAX_SHORT_CYCLE_LEN: usize = 8;

/// A simple cycle as an ordered edge sequence. The sign of an edge is +1
/// when the traversal runs from the edge's first endpoint to its second.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedCycle {
    pub edges: Vec<(EdgeId, i8)>,
}

impl SignedCycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().map(|&(e, _)| e)
    }

    /// `sum sign(e) * value(e)` around the cycle.
    pub fn signed_sum(&self, mut value: impl FnMut(EdgeId) -> f64) -> f64 {
        self.edges.iter().map(|&(e, s)| f64::from(s) * value(e)).sum()
    }

    /// Rotation and orientation normal form: smallest edge id first, then
    /// the direction in which the second edge id is below the last.
    pub fn canonical(mut self) -> Self {
        if self.edges.len() < 2 {
            return self;
        }
        let start = (0..self.edges.len()).min_by_key(|&i| self.edges[i].0).unwrap();
        self.edges.rotate_left(start);
        let last = self.edges.len() - 1;
        if self.edges[1].0 > self.edges[last].0 {
            self.edges[1..].reverse();
            for item in &mut self.edges {
                item.1 = -item.1;
            }
        }
        self
    }

    /// Checks that the signed edges form a closed walk through distinct
    /// vertices of `g`, i.e. the signed incidence vector sums to zero.
    pub fn is_simple_closed_walk(&self, g: &Graph) -> bool {
        if self.edges.len() < 2 {
            return false;
        }
        let mut visited = HashSet::new();
        let mut walk = Vec::with_capacity(self.edges.len());
        for &(id, sign) in &self.edges {
            let Some(e) = g.edge(id) else { return false };
            let (tail, head) = if sign > 0 { (e.u, e.v) } else { (e.v, e.u) };
            walk.push((tail, head));
        }
        for i in 0..walk.len() {
            let next = walk[(i + 1) % walk.len()];
            if walk[i].1 != next.0 || !visited.insert(walk[i].0) {
                return false;
            }
        }
        true
    }

    /// Vertex sequence of the traversal, starting at the tail of the first edge.
    pub fn vertices(&self, g: &Graph) -> Vec<usize> {
        self.edges
            .iter()
            .map(|&(id, sign)| {
                let e = g.edge(id).expect("cycle edge belongs to graph");
                if sign > 0 {
                    e.u
                } else {
                    e.v
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleBasis {
    pub cycles: Vec<SignedCycle>,
    pub tree_edges: Vec<EdgeId>,
}

/// One cycle per non-tree edge: the edge itself (sign +1) followed by the
/// tree path back to its first endpoint.
pub fn fundamental_cycle_basis(g: &Graph, forest: &SpanningForest) -> Result<CycleBasis> {
    let n = g.num_vertices();
    let mut sets = DisjointSets::new(n);
    let mut tree_adj: Vec<Vec<(usize, EdgeId)>> = vec![Vec::new(); n];
    for &id in &forest.edges {
        let e = g.edge(id).ok_or_else(|| Error::Contract(format!("forest edge {id} is not in the graph")))?;
        if !sets.union(e.u, e.v) {
            return Err(Error::Contract(format!("forest edge {id} closes a cycle")));
        }
        tree_adj[e.u].push((e.v, id));
        tree_adj[e.v].push((e.u, id));
    }

    // Root every tree and record parent edge and depth.
    let mut parent: Vec<Option<(usize, EdgeId)>> = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if depth[s] != usize::MAX {
            continue;
        }
        depth[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &(w, id) in &tree_adj[v] {
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    parent[w] = Some((v, id));
                    queue.push_back(w);
                }
            }
        }
    }

    let sign_from = |id: EdgeId, tail: usize| -> i8 {
        if g.edge(id).map(|e| e.u) == Some(tail) {
            1
        } else {
            -1
        }
    };

    let mut cycles = Vec::new();
    for e in g.edges() {
        if forest.contains(e.id) {
            continue;
        }
        if sets.find(e.u) != sets.find(e.v) {
            return Err(Error::Contract(format!("forest does not span the component of edge {}", e.id)));
        }
        // Walk e.u -> e.v, then e.v up to the common ancestor and down to e.u.
        let (mut a, mut b) = (e.v, e.u);
        let mut up = Vec::new();
        let mut down = Vec::new();
        while depth[a] > depth[b] {
            let (p, id) = parent[a].unwrap();
            up.push((id, sign_from(id, a)));
            a = p;
        }
        while depth[b] > depth[a] {
            let (p, id) = parent[b].unwrap();
            down.push((id, sign_from(id, p)));
            b = p;
        }
        while a != b {
            let (pa, ida) = parent[a].unwrap();
            up.push((ida, sign_from(ida, a)));
            a = pa;
            let (pb, idb) = parent[b].unwrap();
            down.push((idb, sign_from(idb, pb)));
            b = pb;
        }
        let mut edges = Vec::with_capacity(1 + up.len() + down.len());
        edges.push((e.id, 1));
        edges.extend(up);
        edges.extend(down.into_iter().rev());
        cycles.push(SignedCycle { edges });
    }
    Ok(CycleBasis { cycles, tree_edges: forest.edges.clone() })
}

/// Every simple cycle with at most `max_len` edges, each exactly once, in
/// canonical form and sorted.
pub fn short_cycles(g: &Graph, max_len: usize) -> Result<Vec<SignedCycle>> {
    if !(3..=MAX_SHORT_CYCLE_LEN).contains(&max_len) {
        return Err(Error::Config(format!("short cycle length must lie in 3..={MAX_SHORT_CYCLE_LEN}, got {max_len}")));
    }
    let n = g.num_vertices();
    let mut out = Vec::new();
    let mut on_path = vec![false; n];
    let mut path: Vec<usize> = Vec::with_capacity(max_len);
    let mut path_edges: Vec<(EdgeId, i8)> = Vec::with_capacity(max_len);

    for s in 0..n {
        on_path[s] = true;
        path.push(s);
        // Frame: vertex and neighbour cursor.
        let mut stack: Vec<(usize, usize)> = vec![(s, 0)];
        while let Some(frame) = stack.last_mut() {
            let (v, cursor) = (frame.0, frame.1);
            frame.1 += 1;
            match g.neighbors(v).nth(cursor) {
                Some((w, e)) => {
                    let sign = if e.u == v { 1 } else { -1 };
                    if w == s {
                        // Closing edge; count each cycle in one direction only.
                        if path.len() >= 3 && path[1] < path[path.len() - 1] {
                            let mut edges = path_edges.clone();
                            edges.push((e.id, sign));
                            out.push(SignedCycle { edges }.canonical());
                        }
                    } else if w > s && !on_path[w] && path.len() < max_len {
                        on_path[w] = true;
                        path.push(w);
                        path_edges.push((e.id, sign));
                        stack.push((w, 0));
                    }
                }
                None => {
                    stack.pop();
                    on_path[v] = false;
                    path.pop();
                    if !stack.is_empty() {
                        path_edges.pop();
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.edges.cmp(&b.edges)));
    Ok(out)
}
