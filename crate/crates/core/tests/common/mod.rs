//! Exhaustive enumeration of labelled graphs, shared by test targets.
//!
//! Graphs are adjacency bitmask rows; containment is tried over every
//! injection. Only graph construction comes from the library.

#![allow(dead_code)]

use std::collections::BTreeSet;

use potstab::SmallGraph;

pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect()
}

/// Sorted degree sequence of every labelled graph on `n` vertices, with
/// the adjacency rows of each graph.
pub fn all_graphs(n: usize) -> impl Iterator<Item = (Vec<usize>, Vec<u32>)> {
    let ps = pairs(n);
    (0u64..1 << ps.len()).map(move |mask| {
        let mut adj = vec![0u32; n];
        for (bit, &(u, v)) in ps.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
        }
        let mut deg: Vec<usize> = adj.iter().map(|r| r.count_ones() as usize).collect();
        deg.sort_unstable_by(|a, b| b.cmp(a));
        (deg, adj)
    })
}

pub fn contains(adj: &[u32], h: &[(usize, usize)], k: usize) -> bool {
    let n = adj.len();
    let mut map = vec![usize::MAX; k];
    fn go(
        x: usize,
        k: usize,
        n: usize,
        adj: &[u32],
        h: &[(usize, usize)],
        map: &mut Vec<usize>,
        used: u32,
    ) -> bool {
        if x == k {
            return h.iter().all(|&(a, b)| adj[map[a]] >> map[b] & 1 == 1);
        }
        for v in 0..n {
            if used >> v & 1 == 0 {
                map[x] = v;
                // Edges between already placed vertices.
                let ok = h
                    .iter()
                    .filter(|&&(a, b)| a.max(b) == x)
                    .all(|&(a, b)| adj[map[a]] >> map[b] & 1 == 1);
                if ok && go(x + 1, k, n, adj, h, map, used | 1 << v) {
                    return true;
                }
            }
        }
        false
    }
    go(0, k, n, adj, h, &mut map, 0)
}

pub fn nonincreasing(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for d in 0..=max {
            cur.push(d);
            rec(n, d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n.saturating_sub(1), &mut Vec::new(), &mut out);
    out
}

/// Sorted degree sequences realized by some graph on `n` vertices.
pub fn realized_sequences(n: usize) -> BTreeSet<Vec<usize>> {
    all_graphs(n).map(|(d, _)| d).collect()
}

/// Degree sequences of length `n` with at least one realization containing `h`.
pub fn potential_set(n: usize, h: &SmallGraph) -> (BTreeSet<Vec<usize>>, BTreeSet<Vec<usize>>) {
    let edges = h.edges();
    let mut yes = BTreeSet::new();
    let mut all = BTreeSet::new();
    for (deg, adj) in all_graphs(n) {
        all.insert(deg.clone());
        if !yes.contains(&deg) && contains(&adj, &edges, h.order()) {
            yes.insert(deg);
        }
    }
    (yes, all)
}

/// `max_i 2(k-i) + ∇_i - 1` over `i > α`, from the edge list alone.
pub fn sigma_tilde_brute(k: usize, edges: &[(usize, usize)]) -> usize {
    let max_deg = |mask: u32| {
        (0..k)
            .filter(|&v| mask >> v & 1 == 1)
            .map(|v| {
                edges
                    .iter()
                    .filter(|&&(a, b)| {
                        mask >> a & 1 == 1 && mask >> b & 1 == 1 && (a == v || b == v)
                    })
                    .count()
            })
            .max()
            .unwrap_or(0)
    };
    let mut best = 0;
    for i in 1..=k {
        let nabla = (0u32..1 << k)
            .filter(|m| m.count_ones() as usize == i)
            .map(max_deg)
            .min()
            .unwrap();
        // Sizes up to α have an edgeless subset.
        if nabla > 0 {
            best = best.max(2 * (k - i) + nabla - 1);
        }
    }
    best
}

/// Induced subgraphs on `k - t` vertices, as relabelled edge lists.
pub fn deletions(k: usize, edges: &[(usize, usize)], t: usize) -> Vec<Vec<(usize, usize)>> {
    (0u32..1 << k)
        .filter(|m| m.count_ones() as usize == k - t)
        .map(|m| {
            let index = |v: usize| (m & ((1 << v) - 1)).count_ones() as usize;
            edges
                .iter()
                .filter(|&&(a, b)| m >> a & 1 == 1 && m >> b & 1 == 1)
                .map(|&(a, b)| (index(a), index(b)))
                .collect()
        })
        .collect()
}
