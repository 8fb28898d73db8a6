//! Small labeled graphs and the structural invariants used by the potential
//! machinery: independence number, maximum degree, `∇_i` and the deleted
//! families `D^(t)(H)`.
//!
//! Vertex sets are `u64` masks, so a [`SmallGraph`] has at most 64 vertices.
//! Generator expressions are capped lower (see [`DEFAULT_ORDER_CAP`]).

mod dense;
mod expr;
mod iso;

use std::fmt;
use std::str::FromStr;

pub use dense::DenseGraph;
pub use expr::{GraphExpr, DEFAULT_ORDER_CAP};
pub use iso::{automorphisms, canonical_form, find_embedding, is_isomorphic};

use crate::error::{Error, Result};
use crate::sequence::DegreeSequence;

pub const MAX_ORDER: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SmallGraph {
    adj: Vec<u64>,
}

#[inline]
pub(crate) fn bit(v: usize) -> u64 {
    1u64 << v
}

/// Iterates the set bits of a mask in increasing order.
pub(crate) fn members(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

/// All `size`-subsets of `{0..k}` as masks, in increasing numeric order.
pub(crate) fn subsets(k: usize, size: usize) -> impl Iterator<Item = u64> {
    let limit: u128 = 1u128 << k;
    let mut next: Option<u64> = if size > k {
        None
    } else if size == 0 {
        Some(0)
    } else {
        Some(((1u128 << size) - 1) as u64)
    };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack, in u128 to survive k = 64.
            let c = cur as u128;
            let lowest = c & c.wrapping_neg();
            let ripple = c + lowest;
            let succ = (((ripple ^ c) >> 2) / lowest) | ripple;
            (succ < limit).then_some(succ as u64)
        };
        Some(cur)
    })
}

impl SmallGraph {
    pub fn empty(order: usize) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::CapExceeded {
                what: "graph order",
                value: order,
                cap: MAX_ORDER,
            });
        }
        Ok(SmallGraph {
            adj: vec![0; order],
        })
    }

    pub fn complete(order: usize) -> Result<Self> {
        let mut g = Self::empty(order)?;
        for u in 0..order {
            g.adj[u] = g.all() & !bit(u);
        }
        Ok(g)
    }

    /// Builds from 0-based edges. Loops and out-of-range endpoints are rejected.
    pub fn from_edges(order: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(order)?;
        for &(u, v) in edges {
            if u >= order || v >= order || u == v {
                return Err(Error::range(
                    "edge",
                    format!("({u}, {v}) in a graph of order {order}"),
                ));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    /// Mask of all vertices.
    pub fn all(&self) -> u64 {
        match self.order() {
            64 => u64::MAX,
            k => (1u64 << k) - 1,
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] & bit(v) != 0
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "loop at vertex {u}");
        self.adj[u] |= bit(v);
        self.adj[v] |= bit(u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u] &= !bit(v);
        self.adj[v] &= !bit(u);
    }

    pub fn neighbors(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.order()).map(|v| self.degree(v)).collect()
    }

    pub fn degree_sequence(&self) -> DegreeSequence {
        DegreeSequence::new(self.degrees())
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj
            .iter()
            .map(|m| m.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.order() {
            for v in members(self.adj[u] & !((bit(u) << 1).wrapping_sub(1))) {
                out.push((u, v));
            }
        }
        out
    }

    pub fn is_complete(&self) -> bool {
        let k = self.order();
        self.edge_count() == k * k.saturating_sub(1) / 2
    }

    /// Maximum degree of `H[X]` without materializing it.
    pub fn induced_max_degree(&self, mask: u64) -> usize {
        members(mask)
            .map(|v| (self.adj[v] & mask).count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn induced_edge_count(&self, mask: u64) -> usize {
        members(mask)
            .map(|v| (self.adj[v] & mask).count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// `H[X]`, relabeled in increasing vertex order.
    pub fn induced(&self, mask: u64) -> SmallGraph {
        let verts: Vec<usize> = members(mask).collect();
        let mut g = SmallGraph {
            adj: vec![0; verts.len()],
        };
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn complement(&self) -> SmallGraph {
        let all = self.all();
        SmallGraph {
            adj: (0..self.order())
                .map(|v| !self.adj[v] & all & !bit(v))
                .collect(),
        }
    }

    pub fn disjoint_union(&self, other: &SmallGraph) -> Result<SmallGraph> {
        let k = self.order();
        let mut g = Self::empty(k + other.order())?;
        for (u, v) in self.edges() {
            g.add_edge(u, v);
        }
        for (u, v) in other.edges() {
            g.add_edge(k + u, k + v);
        }
        Ok(g)
    }

    /// `G ∨ H`: disjoint union plus every edge between the two sides.
    pub fn join(&self, other: &SmallGraph) -> Result<SmallGraph> {
        let k = self.order();
        let mut g = self.disjoint_union(other)?;
        for u in 0..k {
            for v in 0..other.order() {
                g.add_edge(u, k + v);
            }
        }
        Ok(g)
    }

    pub fn independence_number(&self) -> usize {
        mis_size(&self.adj, self.all(), 0, 0)
    }

    /// Every maximum independent set, as masks in increasing order.
    pub fn maximum_independent_sets(&self) -> Vec<u64> {
        let alpha = self.independence_number();
        let mut out = Vec::new();
        collect_mis(&self.adj, self.all(), 0, alpha, &mut out);
        out.sort_unstable();
        out
    }

    /// `∇_i(H)`: the least maximum degree over induced subgraphs of order `i`.
    /// Only defined for `α(H)+1 <= i <= k`.
    pub fn nabla(&self, i: usize) -> Result<usize> {
        let alpha = self.independence_number();
        let k = self.order();
        if i <= alpha || i > k {
            return Err(Error::range(
                "nabla index",
                format!("{i} not in {}..={k}", alpha + 1),
            ));
        }
        Ok(self.nabla_unchecked(i))
    }

    pub(crate) fn nabla_unchecked(&self, i: usize) -> usize {
        subsets(self.order(), i)
            .map(|m| self.induced_max_degree(m))
            .min()
            .unwrap_or(0)
    }

    /// All order-`i` vertex sets attaining `∇_i`, as masks.
    pub(crate) fn nabla_attaining_sets(&self, i: usize) -> Vec<u64> {
        let target = self.nabla_unchecked(i);
        subsets(self.order(), i)
            .filter(|&m| self.induced_max_degree(m) == target)
            .collect()
    }

    /// `D^(t)(H)`: every induced subgraph on `k - t` vertices. With `dedup`,
    /// only the first member of each isomorphism class is kept.
    pub fn deleted_family(&self, t: usize, dedup: bool) -> Result<Vec<DeletedSubgraph>> {
        let k = self.order();
        if t >= k {
            return Err(Error::range("deletion count", format!("{t} not in 0..{k}")));
        }
        let mut out: Vec<DeletedSubgraph> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut masks: Vec<u64> = subsets(k, k - t).collect();
        masks.sort_by_key(|&m| members(m).collect::<Vec<_>>());
        for mask in masks {
            let graph = self.induced(mask);
            if dedup && !seen.insert(canonical_form(&graph)) {
                continue;
            }
            out.push(DeletedSubgraph {
                kept: members(mask).collect(),
                graph,
            });
        }
        Ok(out)
    }

    /// Whether `self` is a spanning subgraph of `host` up to relabeling.
    pub fn spanning_subgraph_of(&self, host: &SmallGraph) -> Result<bool> {
        if self.order() != host.order() {
            return Err(Error::Precondition(format!(
                "order mismatch: {} vs {}",
                self.order(),
                host.order()
            )));
        }
        Ok(find_embedding(self, host).is_some())
    }

    /// Whether some `size`-subset induces exactly one edge.
    pub fn one_edge_set_exists(&self, size: usize) -> bool {
        self.one_edge_set(size).is_some()
    }

    pub fn one_edge_set(&self, size: usize) -> Option<u64> {
        if size == 0 || size > self.order() {
            return None;
        }
        subsets(self.order(), size).find(|&m| self.induced_edge_count(m) == 1)
    }

    /// Edge-list text: `n <k>` then `e <u> <v>` per edge, 1-based.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("n {}\n", self.order());
        for (u, v) in self.edges() {
            s.push_str(&format!("e {} {}\n", u + 1, v + 1));
        }
        s
    }

    pub fn parse_edge_list(text: &str) -> Result<SmallGraph> {
        let mut graph: Option<SmallGraph> = None;
        let mut offset = 0;
        for line in text.lines() {
            let pos = offset;
            offset += line.len() + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| -> Result<usize> {
                s.parse()
                    .map_err(|_| Error::parse(pos, format!("bad integer {s:?}")))
            };
            match (fields[0], &graph) {
                ("n", None) if fields.len() == 2 => {
                    graph = Some(SmallGraph::empty(num(fields[1])?)?);
                }
                ("e", Some(_)) if fields.len() == 3 => {
                    let (u, v) = (num(fields[1])?, num(fields[2])?);
                    let g = graph.as_mut().unwrap();
                    if u == 0 || v == 0 || u > g.order() || v > g.order() || u == v {
                        return Err(Error::parse(pos, format!("invalid edge {u} {v}")));
                    }
                    g.add_edge(u - 1, v - 1);
                }
                ("n", Some(_)) => return Err(Error::parse(pos, "duplicate `n` line")),
                ("e", None) => return Err(Error::parse(pos, "edge before `n` line")),
                _ => return Err(Error::parse(pos, format!("unrecognized line {line:?}"))),
            }
        }
        graph.ok_or_else(|| Error::parse(0, "missing `n <k>` line"))
    }
}

fn mis_size(adj: &[u64], cand: u64, size: usize, best: usize) -> usize {
    if cand == 0 {
        return size.max(best);
    }
    if size + cand.count_ones() as usize <= best {
        return best;
    }
    // Branch on a vertex of maximum degree within the candidates.
    let v = members(cand)
        .max_by_key(|&v| (adj[v] & cand).count_ones())
        .unwrap();
    if (adj[v] & cand) == 0 {
        // every candidate is isolated
        return (size + cand.count_ones() as usize).max(best);
    }
    let best = mis_size(adj, cand & !bit(v) & !adj[v], size + 1, best);
    mis_size(adj, cand & !bit(v), size, best)
}

fn collect_mis(adj: &[u64], cand: u64, chosen: u64, alpha: usize, out: &mut Vec<u64>) {
    let size = chosen.count_ones() as usize;
    if size + (cand.count_ones() as usize) < alpha {
        return;
    }
    if size == alpha {
        out.push(chosen);
        return;
    }
    let v = cand.trailing_zeros() as usize;
    collect_mis(adj, cand & !bit(v) & !adj[v], chosen | bit(v), alpha, out);
    collect_mis(adj, cand & !bit(v), chosen, alpha, out);
}

/// One member of `D^(t)(H)` together with the kept vertices of `H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeletedSubgraph {
    pub kept: Vec<usize>,
    pub graph: SmallGraph,
}

impl fmt::Debug for SmallGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SmallGraph(k={}, edges={:?})",
            self.order(),
            self.edges()
        )
    }
}

impl FromStr for SmallGraph {
    type Err = Error;

    /// Accepts either a generator expression or edge-list text.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim_start().starts_with("n ") || s.contains('\n') {
            SmallGraph::parse_edge_list(s)
        } else {
            s.parse::<GraphExpr>()?.build(DEFAULT_ORDER_CAP)
        }
    }
}
