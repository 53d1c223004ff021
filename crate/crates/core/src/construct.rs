//! The optimal in-out graphs `S_k` and their canonical Hamiltonian paths.
//!
//! For `k >= 4` the graph is a chain of "poles" (four vertices joined by three
//! undirected edges) linked by crossing directed arcs, closed off by a few
//! extra arcs through vertex 1. `S_1`, `S_2` and `S_3` are special graphs.

use crate::error::{Error, Result};
use crate::graph::{Arc, DiGraph, InOutGraph, Vertex};

/// Hamiltonian path of `S_k` from `i_j` to `o_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalPath {
    pub j: usize,
    pub vertices: Vec<Vertex>,
}

impl CanonicalPath {
    pub fn arcs(&self) -> Vec<Arc> {
        self.vertices.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Number of arcs on the path.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn both_ways(arcs: &mut Vec<Arc>, a: Vertex, b: Vertex) {
    arcs.push((a, b));
    arcs.push((b, a));
}

/// Arcs of the pole chain shared by both parities: `poles` poles and
/// `poles - 1` crossing links.
fn pole_chain(arcs: &mut Vec<Arc>, poles: Vertex) {
    for i in 1..=poles {
        both_ways(arcs, 4 * i - 2, 4 * i - 1);
        both_ways(arcs, 4 * i - 1, 4 * i);
        both_ways(arcs, 4 * i, 4 * i + 1);
    }
    for i in 1..poles {
        arcs.push((4 * i - 2, 4 * i + 5));
        arcs.push((4 * i + 1, 4 * i + 2));
    }
}

/// Number of poles in `S_k` for `k >= 4`.
pub fn pole_count(k: usize) -> usize {
    if k.is_multiple_of(2) {
        (k - 2) / 2
    } else {
        (k - 1) / 2
    }
}

/// Builds `S_k`.
pub fn build_inout(k: usize) -> Result<InOutGraph> {
    let (order, arcs, incoming, outgoing): (usize, Vec<Arc>, Vec<Vertex>, Vec<Vertex>) = match k {
        0 => return Err(Error::InvalidK(0)),
        1 => (1, vec![], vec![1], vec![1]),
        2 => (3, vec![(1, 2), (2, 1), (2, 3), (3, 2)], vec![1, 3], vec![3, 1]),
        3 => {
            let mut arcs: Vec<Arc> = (1..6).map(|v| (v, v + 1)).collect();
            arcs.extend([(1, 5), (2, 1), (3, 2), (5, 1), (6, 4)]);
            (6, arcs, vec![1, 3, 6], vec![6, 4, 3])
        }
        _ => {
            let kv = k as Vertex;
            let mut arcs = Vec::new();
            pole_chain(&mut arcs, pole_count(k) as Vertex);
            if k.is_multiple_of(2) {
                arcs.extend([
                    (1, 2),
                    (2 * kv - 6, 2 * kv - 1),
                    (2 * kv - 3, 2 * kv - 2),
                    (2 * kv - 2, 1),
                    (2 * kv - 2, 5),
                    (2 * kv - 1, 2 * kv - 2),
                ]);
            } else {
                arcs.extend([(1, 2), (2 * kv - 4, 1), (2 * kv - 2, 5)]);
            }
            (2 * k - 1, arcs, (1..=kv).map(|j| 2 * j - 1).collect(), outgoing_labels(k))
        }
    };
    InOutGraph::new(DiGraph::new(order, arcs)?, incoming, outgoing)
}

/// `o_1..o_k` for `k >= 4`.
fn outgoing_labels(k: usize) -> Vec<Vertex> {
    let kv = k as Vertex;
    // 1-indexed scratch; slot 0 unused.
    let mut out = vec![0; k + 1];
    for j in 1..=((k - 3) / 2) {
        let jv = j as Vertex;
        out[2 * j] = 4 * jv + 3;
        out[2 * j + 1] = 4 * jv - 3;
    }
    if k.is_multiple_of(2) {
        out[1] = 3;
        out[k - 2] = 2 * kv - 1;
        out[k - 1] = 2 * kv - 7;
        out[k] = 2 * kv - 3;
    } else {
        out[1] = 2 * kv - 1;
        out[k - 1] = 3;
        out[k] = 2 * kv - 5;
    }
    out.split_off(1)
}

/// Appends `4m+1, 4m, 4m-1, 4m-2` for each `m` in `range`.
fn pole_walks(path: &mut Vec<Vertex>, range: std::ops::RangeInclusive<usize>) {
    for m in range {
        let m = m as Vertex;
        path.extend([4 * m + 1, 4 * m, 4 * m - 1, 4 * m - 2]);
    }
}

/// The Hamiltonian path of `S_k` from `i_j` to `o_j`, built from the explicit
/// per-index recipes rather than by search.
pub fn canonical_path(k: usize, j: usize) -> Result<CanonicalPath> {
    if k == 0 {
        return Err(Error::InvalidK(0));
    }
    if j == 0 || j > k {
        return Err(Error::IndexOutOfRange { j, k });
    }
    let vertices = match (k, j) {
        (1, _) => vec![1],
        (2, 1) => vec![1, 2, 3],
        (2, _) => vec![3, 2, 1],
        (3, 1) => vec![1, 2, 3, 4, 5, 6],
        (3, 2) => vec![3, 2, 1, 5, 6, 4],
        (3, _) => vec![6, 4, 5, 1, 2, 3],
        _ if k.is_multiple_of(2) => even_path(k, j),
        _ => odd_path(k, j),
    };
    Ok(CanonicalPath { j, vertices })
}

fn even_path(k: usize, idx: usize) -> Vec<Vertex> {
    let kv = k as Vertex;
    let last_pole = (k - 2) / 2;
    let mut p = Vec::with_capacity(2 * k - 1);
    if idx == 1 {
        p.extend([1, 2]);
        pole_walks(&mut p, 2..=last_pole);
        p.extend([2 * kv - 1, 2 * kv - 2, 5, 4, 3]);
    } else if idx == k {
        p.extend([2 * kv - 1, 2 * kv - 2, 1]);
        p.extend(2..=2 * kv - 3);
    } else if idx == k - 2 {
        p.extend([2 * kv - 5, 2 * kv - 4, 2 * kv - 3, 2 * kv - 2, 1]);
        p.extend(2..=2 * kv - 6);
        p.push(2 * kv - 1);
    } else if idx.is_multiple_of(2) {
        let j = idx / 2;
        let jv = j as Vertex;
        p.extend([4 * jv - 1, 4 * jv, 4 * jv + 1, 4 * jv + 2]);
        pole_walks(&mut p, j + 2..=last_pole);
        p.extend([2 * kv - 1, 2 * kv - 2, 1]);
        p.extend(2..=4 * jv - 2);
        p.extend([4 * jv + 5, 4 * jv + 4, 4 * jv + 3]);
    } else {
        let j = (idx - 1) / 2;
        let jv = j as Vertex;
        p.extend([4 * jv + 1, 4 * jv, 4 * jv - 1, 4 * jv - 2]);
        pole_walks(&mut p, j + 1..=last_pole);
        p.extend([2 * kv - 1, 2 * kv - 2, 1]);
        p.extend(2..=4 * jv - 3);
    }
    p
}

fn odd_path(k: usize, idx: usize) -> Vec<Vertex> {
    let kv = k as Vertex;
    let last_pole = (k - 1) / 2;
    let mut p = Vec::with_capacity(2 * k - 1);
    if idx == 1 {
        p.extend(1..=2 * kv - 1);
    } else if idx == k - 1 {
        p.extend([2 * kv - 3, 2 * kv - 4, 1, 2]);
        // Blocks end at 4m-2, matching every other walk through a pole.
        pole_walks(&mut p, 2..=(k - 3) / 2);
        p.extend([2 * kv - 1, 2 * kv - 2, 5, 4, 3]);
    } else if idx.is_multiple_of(2) {
        let j = idx / 2;
        let jv = j as Vertex;
        p.extend([4 * jv - 1, 4 * jv, 4 * jv + 1, 4 * jv + 2]);
        pole_walks(&mut p, j + 2..=last_pole);
        p.push(1);
        p.extend(2..=4 * jv - 2);
        p.extend([4 * jv + 5, 4 * jv + 4, 4 * jv + 3]);
    } else {
        let j = (idx - 1) / 2;
        let jv = j as Vertex;
        p.extend([4 * jv + 1, 4 * jv, 4 * jv - 1, 4 * jv - 2]);
        pole_walks(&mut p, j + 1..=last_pole);
        p.push(1);
        p.extend(2..=4 * jv - 3);
    }
    p
}

/// Checks that `path` is a Hamiltonian path of `g` from `i_j` to `o_j`.
pub fn is_hamiltonian_path_for(g: &InOutGraph, path: &CanonicalPath) -> bool {
    let n = g.order();
    let mut seen = vec![false; n + 1];
    if path.vertices.len() != n || path.j == 0 || path.j > g.k() {
        return false;
    }
    for &v in &path.vertices {
        if v == 0 || v as usize > n || std::mem::replace(&mut seen[v as usize], true) {
            return false;
        }
    }
    path.vertices.first() == Some(&g.incoming[path.j - 1])
        && path.vertices.last() == Some(&g.outgoing[path.j - 1])
        && path.arcs().iter().all(|&(u, w)| g.graph.has_arc(u, w))
}
