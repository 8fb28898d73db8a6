//! Exhaustive ground truth at desk scale.
//!
//! [`potentially`] decides whether some realization of a sequence contains
//! `H`. Positions with equal degree are interchangeable, so an embedding is
//! determined up to symmetry by which degree class each vertex of `H` lands
//! in; classes are enumerated up to automorphisms of `H`, and each placement
//! is completed by a backtracking search for the residual degrees that
//! avoids the edges already used by `H`.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphs::{automorphisms, bit, members, DenseGraph, SmallGraph};
use crate::sequence::DegreeSequence;

pub const DEFAULT_MAX_N: usize = 10;
pub const DEFAULT_MAX_K: usize = 8;
/// Residual demands are packed four bits per vertex into a `u64`.
pub const HARD_MAX_N: usize = 16;

/// Desk-scale limits. Exceeding one is an error, never a truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub max_n: usize,
    pub max_k: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_n: DEFAULT_MAX_N,
            max_k: DEFAULT_MAX_K,
        }
    }
}

impl Caps {
    fn check(&self, n: usize, k: usize) -> Result<()> {
        let max_n = self.max_n.min(HARD_MAX_N);
        if n > max_n {
            return Err(Error::CapExceeded {
                what: "sequence length",
                value: n,
                cap: max_n,
            });
        }
        if k > self.max_k {
            return Err(Error::CapExceeded {
                what: "pattern order",
                value: k,
                cap: self.max_k,
            });
        }
        Ok(())
    }
}

/// A graph whose vertex `i` has degree `sequence.terms()[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    pub sequence: DegreeSequence,
    pub graph: DenseGraph,
}

impl Realization {
    pub fn new(sequence: DegreeSequence, graph: DenseGraph) -> Result<Self> {
        if graph.order() != sequence.len() || graph.degrees() != sequence.terms() {
            return Err(Error::Invariant(format!(
                "graph degrees {:?} do not realize {sequence}",
                graph.degrees()
            )));
        }
        Ok(Realization { sequence, graph })
    }
}

/// Havel–Hakimi realization: the vertex of largest remaining demand (lowest
/// index on ties) is joined to the next largest demands.
pub fn canonical_realization(seq: &DegreeSequence) -> Result<Realization> {
    if !seq.is_graphic() {
        return Err(Error::NotGraphic(seq.to_string()));
    }
    let n = seq.len();
    let mut rem: Vec<usize> = seq.terms().to_vec();
    let mut done = vec![false; n];
    let mut g = DenseGraph::new(n);
    while let Some(v) = (0..n)
        .filter(|&v| !done[v] && rem[v] > 0)
        .max_by_key(|&v| (rem[v], std::cmp::Reverse(v)))
    {
        done[v] = true;
        let mut others: Vec<usize> = (0..n).filter(|&u| !done[u] && rem[u] > 0).collect();
        others.sort_by_key(|&u| (std::cmp::Reverse(rem[u]), u));
        if others.len() < rem[v] {
            return Err(Error::Invariant(format!("Havel–Hakimi stalled on {seq}")));
        }
        for &u in &others[..rem[v]] {
            g.add_edge(v, u);
            rem[u] -= 1;
        }
        rem[v] = 0;
    }
    Realization::new(seq.clone(), g)
}

/// Replaces edges `ab`, `cd` with `ac`, `bd`.
pub fn two_switch(
    r: &Realization,
    (a, b): (usize, usize),
    (c, d): (usize, usize),
) -> Result<Realization> {
    let g = &r.graph;
    let n = g.order();
    if [a, b, c, d].iter().any(|&v| v >= n) {
        return Err(Error::Precondition(format!(
            "vertex out of range in switch {a}{b}/{c}{d}"
        )));
    }
    if a == c || b == d || a == d || b == c || a == b || c == d {
        return Err(Error::Precondition(format!(
            "switch {a}{b}/{c}{d} reuses a vertex"
        )));
    }
    if !g.has_edge(a, b) || !g.has_edge(c, d) {
        return Err(Error::Precondition(format!(
            "{a}{b} or {c}{d} is not an edge"
        )));
    }
    if g.has_edge(a, c) || g.has_edge(b, d) {
        return Err(Error::Precondition(format!(
            "{a}{c} or {b}{d} is already an edge"
        )));
    }
    let mut g = g.clone();
    g.remove_edge(a, b);
    g.remove_edge(c, d);
    g.add_edge(a, c);
    g.add_edge(b, d);
    Realization::new(r.sequence.clone(), g)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Placements of `H` tried (after symmetry reduction).
    pub placements: u64,
    /// Nodes visited by the residual search.
    pub residual_nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialCertificate {
    pub answer: bool,
    /// `embedding[x]` is the position hosting vertex `x` of `H`.
    pub embedding: Option<Vec<usize>>,
    pub realization: Option<Realization>,
    pub stats: SearchStats,
}

impl PotentialCertificate {
    /// Checks a positive certificate against `seq` and `h`.
    pub fn verify(&self, seq: &DegreeSequence, h: &SmallGraph) -> bool {
        match (&self.embedding, &self.realization) {
            (Some(map), Some(r)) => {
                &r.sequence == seq
                    && r.graph.degrees() == seq.terms()
                    && r.graph.contains_embedding(h, map)
            }
            _ => !self.answer,
        }
    }
}

pub fn potentially(seq: &DegreeSequence, h: &SmallGraph) -> Result<PotentialCertificate> {
    potentially_with(seq, h, &Caps::default())
}

pub fn potentially_with(
    seq: &DegreeSequence,
    h: &SmallGraph,
    caps: &Caps,
) -> Result<PotentialCertificate> {
    let n = seq.len();
    let k = h.order();
    caps.check(n, k)?;
    if !seq.is_graphic() {
        return Err(Error::NotGraphic(seq.to_string()));
    }
    let mut stats = SearchStats::default();
    if k > n || h.edge_count() > seq.sum() / 2 {
        return Ok(PotentialCertificate {
            answer: false,
            embedding: None,
            realization: None,
            stats,
        });
    }
    let d = seq.terms();
    // Degree classes: (value, first position, size), by decreasing value.
    let mut classes: Vec<(usize, usize, usize)> = Vec::new();
    for (p, &v) in d.iter().enumerate() {
        match classes.last_mut() {
            Some(c) if c.0 == v => c.2 += 1,
            _ => classes.push((v, p, 1)),
        }
    }
    let auts: Vec<Vec<usize>> = automorphisms(h)
        .into_iter()
        .filter(|s| s.iter().enumerate().any(|(i, &x)| i != x))
        .collect();
    let order = placement_order(h);
    let mut search = Placement {
        h,
        d,
        classes: &classes,
        auts: &auts,
        order: &order,
        assign: vec![usize::MAX; k],
        used: vec![0; classes.len()],
        stats: &mut stats,
        found: None,
    };
    search.run(0);
    let found = search.found.take();
    Ok(match found {
        Some((map, graph)) => PotentialCertificate {
            answer: true,
            embedding: Some(map),
            realization: Some(Realization::new(seq.clone(), graph)?),
            stats,
        },
        None => PotentialCertificate {
            answer: false,
            embedding: None,
            realization: None,
            stats,
        },
    })
}

fn placement_order(h: &SmallGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..h.order()).collect();
    order.sort_by_key(|&x| (std::cmp::Reverse(h.degree(x)), x));
    order
}

struct Placement<'a> {
    h: &'a SmallGraph,
    d: &'a [usize],
    classes: &'a [(usize, usize, usize)],
    auts: &'a [Vec<usize>],
    order: &'a [usize],
    assign: Vec<usize>,
    used: Vec<usize>,
    stats: &'a mut SearchStats,
    found: Option<(Vec<usize>, DenseGraph)>,
}

impl Placement<'_> {
    fn run(&mut self, depth: usize) {
        if self.found.is_some() {
            return;
        }
        if depth == self.order.len() {
            self.leaf();
            return;
        }
        let x = self.order[depth];
        let need = self.h.degree(x);
        for c in 0..self.classes.len() {
            let (value, _, size) = self.classes[c];
            if value < need {
                break;
            }
            if self.used[c] == size {
                continue;
            }
            self.assign[x] = c;
            self.used[c] += 1;
            self.run(depth + 1);
            self.used[c] -= 1;
            self.assign[x] = usize::MAX;
            if self.found.is_some() {
                return;
            }
        }
    }

    fn leaf(&mut self) {
        let a = &self.assign;
        // Keep only the lexicographically least assignment in each orbit.
        for s in self.auts {
            let img = s.iter().map(|&y| a[y]);
            if img.lt(a.iter().copied()) {
                return;
            }
        }
        self.stats.placements += 1;
        let k = self.h.order();
        let n = self.d.len();
        let mut next = vec![0usize; self.classes.len()];
        let mut map = vec![0usize; k];
        for x in 0..k {
            let c = a[x];
            map[x] = self.classes[c].1 + next[c];
            next[c] += 1;
        }
        let mut dem: Vec<u8> = self.d.iter().map(|&v| v as u8).collect();
        for x in 0..k {
            dem[map[x]] -= self.h.degree(x) as u8;
        }
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut allowed: Vec<u64> = (0..n).map(|p| all & !bit(p)).collect();
        for (x, y) in self.h.edges() {
            allowed[map[x]] &= !bit(map[y]);
            allowed[map[y]] &= !bit(map[x]);
        }
        if let Some(edges) = residual_realization(&mut dem, &allowed, self.stats) {
            let mut g = DenseGraph::new(n);
            for (x, y) in self.h.edges() {
                g.add_edge(map[x], map[y]);
            }
            for (u, v) in edges {
                g.add_edge(u, v);
            }
            self.found = Some((map, g));
        }
    }
}

/// A graph with the given degrees using only `allowed` pairs, if one exists.
pub(crate) fn residual_realization(
    dem: &mut [u8],
    allowed: &[u64],
    stats: &mut SearchStats,
) -> Option<Vec<(usize, usize)>> {
    let mut r = Residual {
        allowed,
        failed: HashSet::new(),
        edges: Vec::new(),
        stats,
    };
    if r.solve(dem) {
        Some(r.edges)
    } else {
        None
    }
}

struct Residual<'a> {
    allowed: &'a [u64],
    failed: HashSet<u64>,
    edges: Vec<(usize, usize)>,
    stats: &'a mut SearchStats,
}

fn pack(dem: &[u8]) -> u64 {
    dem.iter()
        .enumerate()
        .fold(0, |acc, (i, &v)| acc | (v as u64) << (4 * i))
}

impl Residual<'_> {
    fn solve(&mut self, dem: &mut [u8]) -> bool {
        self.stats.residual_nodes += 1;
        let active: u64 = dem
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0)
            .fold(0, |m, (i, _)| m | bit(i));
        if active == 0 {
            return true;
        }
        let key = pack(dem);
        if self.failed.contains(&key) {
            return false;
        }
        let feasible = members(active)
            .all(|u| dem[u] as u32 <= (self.allowed[u] & active).count_ones())
            && DegreeSequence::new(members(active).map(|u| dem[u] as usize).collect()).is_graphic();
        if feasible {
            let v = members(active)
                .max_by_key(|&u| (dem[u], std::cmp::Reverse(u)))
                .unwrap();
            let mut cand: Vec<usize> = members(self.allowed[v] & active).collect();
            cand.sort_by_key(|&u| (std::cmp::Reverse(dem[u]), u));
            let need = dem[v] as usize;
            dem[v] = 0;
            if self.choose(dem, v, &cand, 0, need) {
                return true;
            }
            dem[v] = need as u8;
        }
        self.failed.insert(key);
        false
    }

    /// Joins `v` to `need` more vertices from `cand[from..]`, then recurses.
    fn choose(
        &mut self,
        dem: &mut [u8],
        v: usize,
        cand: &[usize],
        from: usize,
        need: usize,
    ) -> bool {
        if need == 0 {
            return self.solve(dem);
        }
        for i in from..cand.len() {
            if cand.len() - i < need {
                break;
            }
            let u = cand[i];
            dem[u] -= 1;
            self.edges.push((v, u));
            if self.choose(dem, v, cand, i + 1, need - 1) {
                return true;
            }
            self.edges.pop();
            dem[u] += 1;
        }
        false
    }
}

/// Sufficient condition for containing `K_k`: `d_k >= k-1` together with
/// either `d_i >= 2(k-1) - i` for `i <= k-2`, or `d_{2k} >= k-2`.
/// `false` means undecided.
pub fn yin_li_kk(seq: &DegreeSequence, k: usize) -> bool {
    if k == 0 {
        return true;
    }
    let d = |j: usize| seq.padded(j);
    if d(k) + 1 < k {
        return false;
    }
    let first = (1..=k.saturating_sub(2)).all(|i| d(i) + i >= 2 * (k - 1));
    let second = d(2 * k) + 2 >= k;
    first || second
}

/// Exact decision for `K_r ∨ K̄_t`, placing the clique on the `r` largest
/// terms and the independent set on the next `t`.
pub fn potentially_split(seq: &DegreeSequence, r: usize, t: usize) -> Result<PotentialCertificate> {
    potentially_split_with(seq, r, t, &Caps::default())
}

pub fn potentially_split_with(
    seq: &DegreeSequence,
    r: usize,
    t: usize,
    caps: &Caps,
) -> Result<PotentialCertificate> {
    let n = seq.len();
    caps.check(n, r + t)?;
    if !seq.is_graphic() {
        return Err(Error::NotGraphic(seq.to_string()));
    }
    let mut stats = SearchStats::default();
    let no = |stats| PotentialCertificate {
        answer: false,
        embedding: None,
        realization: None,
        stats,
    };
    if r + t > n {
        return Ok(no(stats));
    }
    let h = crate::graphs::GraphExpr::Split(r, t).build(HARD_MAX_N)?;
    let d = seq.terms();
    let map: Vec<usize> = (0..r + t).collect();
    if (0..r + t).any(|x| d[x] < h.degree(x)) {
        return Ok(no(stats));
    }
    stats.placements = 1;
    let mut dem: Vec<u8> = d.iter().map(|&v| v as u8).collect();
    for (x, slot) in dem.iter_mut().enumerate().take(r + t) {
        *slot -= h.degree(x) as u8;
    }
    let all = (1u64 << n) - 1;
    let mut allowed: Vec<u64> = (0..n).map(|p| all & !bit(p)).collect();
    for (x, y) in h.edges() {
        allowed[x] &= !bit(y);
        allowed[y] &= !bit(x);
    }
    match residual_realization(&mut dem, &allowed, &mut stats) {
        Some(edges) => {
            let mut g = DenseGraph::new(n);
            for (x, y) in h.edges().into_iter().chain(edges) {
                g.add_edge(x, y);
            }
            Ok(PotentialCertificate {
                answer: true,
                embedding: Some(map),
                realization: Some(Realization::new(seq.clone(), g)?),
                stats,
            })
        }
        None => Ok(no(stats)),
    }
}

/// Every nonincreasing graphic sequence of length `n`, in lexicographically
/// decreasing order.
pub fn graphic_sequences(n: usize) -> Vec<DegreeSequence> {
    fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<DegreeSequence>) {
        if cur.len() == n {
            let s = DegreeSequence::new(cur.clone());
            if s.is_graphic() {
                out.push(s);
            }
            return;
        }
        for v in (0..=max).rev() {
            cur.push(v);
            rec(n, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(DegreeSequence::default());
    } else {
        rec(n, n - 1, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaExact {
    pub n: usize,
    /// `σ(H,n)`.
    pub value: usize,
    /// Every graphic sequence of sum `value - 2` that is not potentially
    /// `H`-graphic, lexicographically decreasing.
    pub extremal_sequences: Vec<DegreeSequence>,
    /// Number of sequences decided.
    pub evaluated: usize,
}

pub fn sigma_exact(h: &SmallGraph, n: usize) -> Result<SigmaExact> {
    sigma_exact_with(h, n, &Caps::default())
}

/// Decides sequences by decreasing sum until some sum has a sequence that
/// is not potentially `H`-graphic. Sequences of one sum run in parallel.
pub fn sigma_exact_with(h: &SmallGraph, n: usize, caps: &Caps) -> Result<SigmaExact> {
    let k = h.order();
    caps.check(n, k)?;
    if h.edge_count() == 0 {
        return Err(Error::Edgeless);
    }
    if n < k {
        return Err(Error::range("n", format!("{n} < k = {k}")));
    }
    let mut all = graphic_sequences(n);
    // Stable: lexicographic order survives within each sum.
    all.sort_by_key(|s| std::cmp::Reverse(s.sum()));
    let mut evaluated = 0;
    for group in all.chunk_by(|a, b| a.sum() == b.sum()) {
        let answers: Vec<bool> = group
            .par_iter()
            .map(|s| potentially_with(s, h, caps).map(|c| c.answer))
            .collect::<Result<_>>()?;
        evaluated += group.len();
        let extremal: Vec<DegreeSequence> = group
            .iter()
            .zip(&answers)
            .filter(|(_, &a)| !a)
            .map(|(s, _)| s.clone())
            .collect();
        if !extremal.is_empty() {
            return Ok(SigmaExact {
                n,
                value: group[0].sum() + 2,
                extremal_sequences: extremal,
                evaluated,
            });
        }
    }
    Err(Error::Invariant(
        "the empty sequence was potentially H-graphic".into(),
    ))
}
