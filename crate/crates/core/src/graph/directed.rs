use serde::{Deserialize, Serialize};

use super::{DisjointSets, EdgeId};
use crate::error::{Error, Result};

/// An enabled orientation of an undirected edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub edge: EdgeId,
    pub tail: usize,
    pub head: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectedCycle {
    /// Arcs in traversal order; the head of each is the tail of the next.
    pub arcs: Vec<Arc>,
}

impl DirectedCycle {
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }
}

/// Finds the directed cycles that keep an arc selection from being a forest
/// of `k` root-anchored arborescences.
///
/// The selection must give every non-root vertex exactly one incoming arc and
/// the roots none. Under that structure each component without a root
/// carries exactly one directed cycle, which is followed through the
/// predecessor map. Returns an empty list iff the arcs form exactly `k` weakly
/// connected components.
pub fn extract_directed_cycles(n: usize, arcs: &[Arc], roots: &[usize], k: usize) -> Result<Vec<DirectedCycle>> {
    let mut is_root = vec![false; n];
    for &r in roots {
        is_root[r] = true;
    }
    let mut pred: Vec<Option<Arc>> = vec![None; n];
    let mut sets = DisjointSets::new(n);
    let mut components = n;
    for a in arcs {
        if a.tail >= n || a.head >= n {
            return Err(Error::Contract(format!("arc {a:?} leaves the vertex range")));
        }
        if is_root[a.head] {
            return Err(Error::Contract(format!("root {} has an incoming arc", a.head)));
        }
        if pred[a.head].replace(*a).is_some() {
            return Err(Error::Contract(format!("vertex {} has in-degree above one", a.head)));
        }
        if sets.union(a.tail, a.head) {
            components -= 1;
        }
    }
    if components == k {
        return Ok(Vec::new());
    }
    if let Some(v) = (0..n).find(|&v| !is_root[v] && pred[v].is_none()) {
        return Err(Error::Contract(format!("non-root vertex {v} has no incoming arc")));
    }

    const NEW: u8 = 0;
    const ACTIVE: u8 = 1;
    const DONE: u8 = 2;
    let mut state = vec![NEW; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if state[start] != NEW {
            continue;
        }
        let mut walk = Vec::new();
        let mut v = start;
        while state[v] == NEW {
            state[v] = ACTIVE;
            walk.push(v);
            match pred[v] {
                Some(a) => v = a.tail,
                None => break,
            }
        }
        if state[v] == ACTIVE && pred[v].is_some() {
            // Walked into our own trail: v lies on a cycle.
            let mut reversed = Vec::new();
            let mut u = v;
            loop {
                let a = pred[u].unwrap();
                reversed.push(a);
                u = a.tail;
                if u == v {
                    break;
                }
            }
            reversed.reverse();
            cycles.push(DirectedCycle { arcs: reversed });
        }
        for w in walk {
            state[w] = DONE;
        }
    }
    Ok(cycles)
}
