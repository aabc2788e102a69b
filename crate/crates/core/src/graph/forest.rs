use std::cmp::Ordering;
use std::collections::VecDeque;

use super::{DisjointSets, EdgeId, Graph};

/// Connected-component labels. Component `c` is the one whose smallest
/// vertex is the `c`-th smallest among component minima.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub labels: Vec<usize>,
    pub count: usize,
}

impl Components {
    pub fn members(&self, c: usize) -> impl Iterator<Item = usize> + '_ {
        self.labels.iter().enumerate().filter(move |&(_, &l)| l == c).map(|(v, _)| v)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

pub fn connected_components(g: &Graph) -> Components {
    let n = g.num_vertices();
    let mut labels = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for s in 0..n {
        if labels[s] != usize::MAX {
            continue;
        }
        labels[s] = count;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for (w, _) in g.neighbors(v) {
                if labels[w] == usize::MAX {
                    labels[w] = count;
                    queue.push_back(w);
                }
            }
        }
        count += 1;
    }
    Components { labels, count }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpanningForest {
    /// Tree edge ids in ascending order.
    pub edges: Vec<EdgeId>,
    pub components: Components,
}

impl SpanningForest {
    pub fn contains(&self, id: EdgeId) -> bool {
        self.edges.binary_search(&id).is_ok()
    }
}

/// Kruskal's algorithm; ties in weight go to the lower edge id.
pub fn min_spanning_forest<W, F>(g: &Graph, weight: F) -> SpanningForest
where
    W: PartialOrd + Copy,
    F: Fn(EdgeId) -> W,
{
    let mut order: Vec<(W, EdgeId, usize, usize)> = g.edges().iter().map(|e| (weight(e.id), e.id, e.u, e.v)).collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
    let mut sets = DisjointSets::new(g.num_vertices());
    let mut edges: Vec<EdgeId> =
        order.into_iter().filter(|&(_, _, u, v)| sets.union(u, v)).map(|(_, id, _, _)| id).collect();
    edges.sort_unstable();
    SpanningForest { edges, components: connected_components(g) }
}

/// Edges whose removal disconnects their endpoints, in ascending id order.
pub fn bridges(g: &Graph) -> Vec<EdgeId> {
    let n = g.num_vertices();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut timer = 0;
    let mut out = Vec::new();
    // Frame: (vertex, edge id used to enter it, next neighbour cursor).
    let mut stack: Vec<(usize, Option<EdgeId>, usize)> = Vec::new();

    for s in 0..n {
        if disc[s] != usize::MAX {
            continue;
        }
        disc[s] = timer;
        low[s] = timer;
        timer += 1;
        stack.push((s, None, 0));
        while let Some(&mut (v, via, ref mut cursor)) = stack.last_mut() {
            let next = g.neighbors(v).nth(*cursor);
            *cursor += 1;
            match next {
                Some((w, e)) => {
                    if Some(e.id) == via {
                        continue;
                    }
                    if disc[w] == usize::MAX {
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        stack.push((w, Some(e.id), 0));
                    } else {
                        low[v] = low[v].min(disc[w]);
                    }
                }
                None => {
                    stack.pop();
                    if let (Some(&(parent, _, _)), Some(id)) = (stack.last(), via) {
                        low[parent] = low[parent].min(low[v]);
                        if low[v] > disc[parent] {
                            out.push(id);
                        }
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}
