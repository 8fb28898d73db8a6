use super::{members, SmallGraph};
use crate::error::{Error, Result};

/// Simple graph on any number of vertices, stored as adjacency bit rows.
/// Used for realizations, whose order can exceed 64.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DenseGraph {
    n: usize,
    rows: Vec<Vec<u64>>,
}

impl DenseGraph {
    pub fn new(n: usize) -> Self {
        DenseGraph {
            n,
            rows: vec![vec![0; n.div_ceil(64)]; n],
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u][v / 64] >> (v % 64) & 1 == 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "loop at vertex {u}");
        self.rows[u][v / 64] |= 1 << (v % 64);
        self.rows[v][u / 64] |= 1 << (u % 64);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.rows[u][v / 64] &= !(1 << (v % 64));
        self.rows[v][u / 64] &= !(1 << (u % 64));
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[v]
            .iter()
            .enumerate()
            .flat_map(|(w, &bits)| members(bits).map(move |b| w * 64 + b))
    }

    pub fn edge_count(&self) -> usize {
        self.degrees().iter().sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| {
                self.neighbors(u)
                    .filter(move |&v| v > u)
                    .map(move |v| (u, v))
            })
            .collect()
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = DenseGraph::new(n);
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::range("edge", format!("({u}, {v}) with n = {n}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn from_small(g: &SmallGraph) -> Self {
        let mut d = DenseGraph::new(g.order());
        for (u, v) in g.edges() {
            d.add_edge(u, v);
        }
        d
    }

    /// Subgraph induced by `verts`, relabeled in the given order.
    pub fn induced_small(&self, verts: &[usize]) -> Result<SmallGraph> {
        let mut g = SmallGraph::empty(verts.len())?;
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        Ok(g)
    }

    /// Whether vertex `map[x]` realizes vertex `x` of `h`: `map` is
    /// injective and every edge of `h` lands on an edge.
    pub fn contains_embedding(&self, h: &SmallGraph, map: &[usize]) -> bool {
        if map.len() != h.order() || map.iter().any(|&v| v >= self.n) {
            return false;
        }
        let mut seen = std::collections::HashSet::new();
        map.iter().all(|v| seen.insert(*v))
            && h.edges()
                .iter()
                .all(|&(a, b)| self.has_edge(map[a], map[b]))
    }

    /// Appends a vertex adjacent to `nbrs` and returns its index.
    pub fn push_vertex(&mut self, nbrs: &[usize]) -> usize {
        let old = std::mem::replace(self, DenseGraph::new(self.n + 1));
        for (u, v) in old.edges() {
            self.add_edge(u, v);
        }
        let x = self.n - 1;
        for &v in nbrs {
            self.add_edge(x, v);
        }
        x
    }

    /// Relabels: vertex `v` of `self` becomes `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> DenseGraph {
        let mut g = DenseGraph::new(self.n);
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }
}
