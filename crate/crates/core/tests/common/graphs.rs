//! Brute-force graph oracles.

use ici_core::graph::Graph;

pub fn union_find_components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut count = n;
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a] = b;
            count -= 1;
        }
    }
    count
}

fn edge_list(g: &Graph) -> Vec<(usize, usize)> {
    g.edges().iter().map(|e| (e.u, e.v)).collect()
}

/// Calls `f` on every `k`-subset of `0..m`.
pub fn for_each_subset(m: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, f);
            cur.pop();
        }
    }
    rec(0, m, k, &mut Vec::with_capacity(k), f);
}

/// True iff the edge subset is one simple cycle.
pub fn is_simple_cycle(n: usize, edges: &[(usize, usize)], subset: &[usize]) -> bool {
    let mut deg = vec![0; n];
    for &e in subset {
        deg[edges[e].0] += 1;
        deg[edges[e].1] += 1;
    }
    if deg.iter().any(|&d| d != 0 && d != 2) {
        return false;
    }
    let touched = deg.iter().filter(|&&d| d == 2).count();
    let sub: Vec<(usize, usize)> = subset.iter().map(|&e| edges[e]).collect();
    // A 2-regular edge set is one cycle iff it is connected on its vertices.
    union_find_components(n, &sub) == n - touched + 1
}

/// Number of simple cycles with `3..=max_len` edges.
pub fn count_cycles(g: &Graph, max_len: usize) -> usize {
    let edges = edge_list(g);
    let n = g.num_vertices();
    let mut count = 0;
    for len in 3..=max_len.min(edges.len()) {
        for_each_subset(edges.len(), len, &mut |s| {
            if is_simple_cycle(n, &edges, s) {
                count += 1;
            }
        });
    }
    count
}

/// Minimum total weight over all spanning forests, by enumeration.
pub fn min_spanning_forest_weight(g: &Graph, weight: &dyn Fn(usize) -> f64) -> f64 {
    let edges = edge_list(g);
    let n = g.num_vertices();
    let c = union_find_components(n, &edges);
    let mut best = f64::INFINITY;
    for_each_subset(edges.len(), n - c, &mut |s| {
        let sub: Vec<(usize, usize)> = s.iter().map(|&e| edges[e]).collect();
        if union_find_components(n, &sub) == c {
            best = best.min(s.iter().map(|&e| weight(e)).sum());
        }
    });
    best
}

/// Edges whose removal increases the component count.
pub fn bridges_by_removal(g: &Graph) -> Vec<usize> {
    let edges = edge_list(g);
    let n = g.num_vertices();
    let base = union_find_components(n, &edges);
    (0..edges.len())
        .filter(|&e| {
            let rest: Vec<(usize, usize)> =
                edges.iter().enumerate().filter(|&(i, _)| i != e).map(|(_, &x)| x).collect();
            union_find_components(n, &rest) > base
        })
        .collect()
}

/// Random simple graph with `m` edges (fewer if `m` exceeds the maximum).
pub fn random_graph(rng: &mut impl rand::Rng, n: usize, m: usize) -> Graph {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let max = n * (n - 1) / 2;
    while edges.len() < m.min(max) {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (u, v) = (u.min(v), u.max(v));
        if u != v && !edges.contains(&(u, v)) {
            edges.push((u, v));
        }
    }
    Graph::new(n, edges)
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
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Graph::new(n, edges)
}
