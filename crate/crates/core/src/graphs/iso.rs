//! Embedding search, automorphisms and canonical forms for small graphs.

use super::{bit, members, SmallGraph};

/// An injective map `x -> map[x]` from the vertices of `pattern` into `host`
/// sending edges to edges, if one exists. Backtracks over pattern vertices in
/// a connectivity-first order, pruning candidates by degree.
pub fn find_embedding(pattern: &SmallGraph, host: &SmallGraph) -> Option<Vec<usize>> {
    let k = pattern.order();
    if k > host.order() || pattern.edge_count() > host.edge_count() {
        return None;
    }
    let order = search_order(pattern);
    let host_deg = host.degrees();
    let mut map = vec![usize::MAX; k];
    let mut used = 0u64;
    if extend(pattern, host, &host_deg, &order, 0, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

fn search_order(g: &SmallGraph) -> Vec<usize> {
    let k = g.order();
    let mut placed = 0u64;
    let mut order = Vec::with_capacity(k);
    while order.len() < k {
        let v = (0..k)
            .filter(|&v| placed & bit(v) == 0)
            .max_by_key(|&v| {
                (
                    (g.neighbors(v) & placed).count_ones(),
                    g.degree(v),
                    std::cmp::Reverse(v),
                )
            })
            .unwrap();
        placed |= bit(v);
        order.push(v);
    }
    order
}

fn extend(
    pattern: &SmallGraph,
    host: &SmallGraph,
    host_deg: &[usize],
    order: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut u64,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let x = order[depth];
    let mut cand = host.all() & !*used;
    for y in members(pattern.neighbors(x)) {
        if map[y] != usize::MAX {
            cand &= host.neighbors(map[y]);
        }
    }
    let need = pattern.degree(x);
    for w in members(cand) {
        if host_deg[w] < need {
            continue;
        }
        map[x] = w;
        *used |= bit(w);
        if extend(pattern, host, host_deg, order, depth + 1, map, used) {
            return true;
        }
        *used &= !bit(w);
        map[x] = usize::MAX;
    }
    false
}

/// All automorphisms of `g` as vertex permutations, in lexicographic order.
pub fn automorphisms(g: &SmallGraph) -> Vec<Vec<usize>> {
    let k = g.order();
    let colors = refine(g);
    let mut out = Vec::new();
    let mut perm = vec![usize::MAX; k];
    auto_extend(g, &colors, 0, &mut perm, 0, &mut out);
    out
}

fn auto_extend(
    g: &SmallGraph,
    colors: &[usize],
    v: usize,
    perm: &mut [usize],
    used: u64,
    out: &mut Vec<Vec<usize>>,
) {
    let k = g.order();
    if v == k {
        out.push(perm.to_vec());
        return;
    }
    for w in 0..k {
        if used & bit(w) != 0 || colors[w] != colors[v] {
            continue;
        }
        if (0..v).all(|u| g.has_edge(u, v) == g.has_edge(perm[u], w)) {
            perm[v] = w;
            auto_extend(g, colors, v + 1, perm, used | bit(w), out);
        }
    }
    perm[v] = usize::MAX;
}

/// Colour refinement starting from degrees. The returned colours are
/// isomorphism-invariant: relabeling the graph permutes them accordingly.
fn refine(g: &SmallGraph) -> Vec<usize> {
    let k = g.order();
    let mut colors: Vec<usize> = g.degrees();
    let mut classes = 0;
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..k)
            .map(|v| {
                let mut nb: Vec<usize> = members(g.neighbors(v)).map(|u| colors[u]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut distinct = sigs.clone();
        distinct.sort();
        distinct.dedup();
        colors = sigs
            .iter()
            .map(|s| distinct.binary_search(s).unwrap())
            .collect();
        if distinct.len() == classes {
            return colors;
        }
        classes = distinct.len();
    }
}

/// A canonical relabeling: isomorphic graphs map to equal graphs.
///
/// Positions are filled cell by cell in refined-colour order, choosing
/// vertices so the adjacency code (row `p` lists adjacency of position `p`
/// to positions `0..p`) is lexicographically largest. Twins are taken in
/// index order since swapping them is an automorphism.
pub fn canonical_form(g: &SmallGraph) -> SmallGraph {
    let k = g.order();
    let colors = refine(g);
    let mut slots: Vec<usize> = colors.clone();
    slots.sort_unstable();
    let twin_prev: Vec<Option<usize>> = (0..k)
        .map(|v| {
            (0..v).rev().find(|&u| {
                colors[u] == colors[v] && g.neighbors(u) & !bit(v) == g.neighbors(v) & !bit(u)
            })
        })
        .collect();
    let mut search = Canon {
        g,
        colors: &colors,
        slots: &slots,
        twin_prev: &twin_prev,
        best: None,
        perm: Vec::with_capacity(k),
        code: Vec::with_capacity(k * k / 2),
    };
    search.run(0);
    let (_, best_perm) = search.best.unwrap_or_default();
    let mut out = SmallGraph::empty(k).expect("same order");
    for p in 0..k {
        for q in 0..p {
            if g.has_edge(best_perm[p], best_perm[q]) {
                out.add_edge(p, q);
            }
        }
    }
    out
}

struct Canon<'a> {
    g: &'a SmallGraph,
    colors: &'a [usize],
    slots: &'a [usize],
    twin_prev: &'a [Option<usize>],
    best: Option<(Vec<bool>, Vec<usize>)>,
    perm: Vec<usize>,
    code: Vec<bool>,
}

impl Canon<'_> {
    fn run(&mut self, used: u64) {
        let p = self.perm.len();
        if p == self.g.order() {
            if self.best.as_ref().is_none_or(|(c, _)| self.code > *c) {
                self.best = Some((self.code.clone(), self.perm.clone()));
            }
            return;
        }
        for v in 0..self.g.order() {
            if used & bit(v) != 0 || self.colors[v] != self.slots[p] {
                continue;
            }
            if let Some(u) = self.twin_prev[v] {
                if used & bit(u) == 0 {
                    continue;
                }
            }
            let mark = self.code.len();
            for &u in &self.perm {
                self.code.push(self.g.has_edge(u, v));
            }
            // Prune when the prefix is already worse than the best code.
            let worse = self
                .best
                .as_ref()
                .is_some_and(|(c, _)| self.code[..] < c[..self.code.len()]);
            if !worse {
                self.perm.push(v);
                self.run(used | bit(v));
                self.perm.pop();
            }
            self.code.truncate(mark);
        }
    }
}

pub fn is_isomorphic(a: &SmallGraph, b: &SmallGraph) -> bool {
    a.order() == b.order()
        && a.edge_count() == b.edge_count()
        && a.degree_sequence() == b.degree_sequence()
        && canonical_form(a) == canonical_form(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> SmallGraph {
        s.parse().unwrap()
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphisms(&g("K 4")).len(), 24);
        assert_eq!(automorphisms(&g("C 5")).len(), 10);
        assert_eq!(automorphisms(&g("P 4")).len(), 2);
        assert_eq!(automorphisms(&g("friendship 2")).len(), 8);
        assert_eq!(automorphisms(&g("Kbip 2 3")).len(), 12);
        assert_eq!(automorphisms(&g("complement(C 6)")).len(), 12);
    }

    #[test]
    fn canonical_forms_identify_relabelings() {
        let c6 = g("C 6");
        let mut shuffled = SmallGraph::empty(6).unwrap();
        let perm = [3, 0, 5, 1, 4, 2];
        for (u, v) in c6.edges() {
            shuffled.add_edge(perm[u], perm[v]);
        }
        assert_eq!(canonical_form(&c6), canonical_form(&shuffled));
        assert!(!is_isomorphic(&c6, &g("union(K 3, K 3)")));
        assert!(is_isomorphic(&g("C 16"), &g("C 16")));
        assert!(!is_isomorphic(&g("C 16"), &g("union(C 8, C 8)")));
        assert!(is_isomorphic(&g("Kbar 16"), &g("complement(K 16)")));
    }

    #[test]
    fn embeddings_respect_edges() {
        let host = g("join(K 1, dstar 1 1)");
        let map = find_embedding(&g("C 5"), &host).unwrap();
        let c5 = g("C 5");
        assert!(c5
            .edges()
            .iter()
            .all(|&(a, b)| host.has_edge(map[a], map[b])));
        assert!(find_embedding(&g("K 3"), &g("Kbip 3 3")).is_none());
        assert!(find_embedding(&g("P 3"), &g("C 5")).is_some());
    }
}
