//! The `∇`-profile of a graph and the extremal sequences built from it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{members, SmallGraph};
use crate::sequence::DegreeSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphType {
    /// `2i* - ∇_{i*} <= 2α`
    Type1,
    /// `2i* - ∇_{i*} = 2α + 1`
    Type2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PotentialProfile {
    pub k: usize,
    pub alpha: usize,
    /// `i -> ∇_i(H)` for `i = α+1..=k`.
    pub nabla: BTreeMap<usize, usize>,
    /// `i -> 2(k-i) + ∇_i - 1`.
    pub sigma_tilde_i: BTreeMap<usize, usize>,
    pub sigma_tilde: usize,
    pub i_star: usize,
    #[serde(rename = "type")]
    pub type_flag: GraphType,
    #[serde(rename = "bH")]
    pub b_h: usize,
}

impl PotentialProfile {
    pub fn nabla_at(&self, i: usize) -> Result<usize> {
        self.nabla.get(&i).copied().ok_or_else(|| {
            Error::range(
                "index",
                format!("{i} not in {}..={}", self.alpha + 1, self.k),
            )
        })
    }

    /// Indices attaining `σ̃`, ascending.
    pub fn maximizers(&self) -> Vec<usize> {
        self.sigma_tilde_i
            .iter()
            .filter(|&(_, &s)| s == self.sigma_tilde)
            .map(|(&i, _)| i)
            .collect()
    }
}

pub fn profile(h: &SmallGraph) -> Result<PotentialProfile> {
    if h.edge_count() == 0 {
        return Err(Error::Edgeless);
    }
    let k = h.order();
    let alpha = h.independence_number();
    let nabla: BTreeMap<usize, usize> =
        (alpha + 1..=k).map(|i| (i, h.nabla_unchecked(i))).collect();
    let sigma_tilde_i: BTreeMap<usize, usize> = nabla
        .iter()
        .map(|(&i, &d)| (i, 2 * (k - i) + d - 1))
        .collect();
    let sigma_tilde = *sigma_tilde_i.values().max().expect("alpha < k");
    let i_star = *sigma_tilde_i
        .iter()
        .find(|&(_, &s)| s == sigma_tilde)
        .unwrap()
        .0;
    let key = 2 * i_star - nabla[&i_star];
    let type_flag = if key <= 2 * alpha {
        GraphType::Type1
    } else if key == 2 * alpha + 1 {
        GraphType::Type2
    } else {
        return Err(Error::Invariant(format!(
            "2i* - ∇ = {key} exceeds 2α + 1 = {}",
            2 * alpha + 1
        )));
    };
    if type_flag == GraphType::Type2 && nabla[&(alpha + 1)] != 1 {
        return Err(Error::Invariant("Type 2 graph with ∇_{α+1} != 1".into()));
    }
    Ok(PotentialProfile {
        k,
        alpha,
        nabla,
        sigma_tilde_i,
        sigma_tilde,
        i_star,
        type_flag,
        b_h: match type_flag {
            GraphType::Type1 => 0,
            GraphType::Type2 => 1,
        },
    })
}

/// `π̃_i(H,n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TargetSequence {
    pub i: usize,
    pub n: usize,
    pub seq: DegreeSequence,
    pub parity_adjusted: bool,
}

pub fn target_sequence(h: &SmallGraph, i: usize, n: usize) -> Result<TargetSequence> {
    target_from_profile(&profile(h)?, i, n)
}

pub fn target_from_profile(p: &PotentialProfile, i: usize, n: usize) -> Result<TargetSequence> {
    let nabla = p.nabla_at(i)?;
    let k = p.k;
    let clique = k - i;
    let value = clique + nabla - 1;
    if n < k || n - 1 < value {
        return Err(Error::range(
            "n",
            format!(
                "{n} too small for index {i}: need n >= {}",
                k.max(value + 1)
            ),
        ));
    }
    let tail = n - clique;
    let parity_adjusted = tail % 2 == 1 && (nabla - 1) % 2 == 1;
    let mut terms = DegreeSequence::constant(n - 1, clique)
        .extended(value, tail)
        .into_terms();
    if parity_adjusted {
        *terms.last_mut().unwrap() -= 1;
    }
    let seq = DegreeSequence::new(terms);
    if !seq.is_graphic() {
        return Err(Error::Invariant(format!("target {seq} is not graphic")));
    }
    Ok(TargetSequence {
        i,
        n,
        seq,
        parity_adjusted,
    })
}

/// `P(H,n)`: targets for every index attaining `σ̃`, ascending.
pub fn target_family(h: &SmallGraph, n: usize) -> Result<Vec<TargetSequence>> {
    family_from_profile(&profile(h)?, n)
}

pub fn family_from_profile(p: &PotentialProfile, n: usize) -> Result<Vec<TargetSequence>> {
    p.maximizers()
        .into_iter()
        .map(|i| target_from_profile(p, i, n))
        .collect()
}

/// `ρ(H,n)` and the parameters of its unique realization
/// `K_c ∨ S_{b1,b2}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExtremalWitness {
    pub seq: DegreeSequence,
    pub n: usize,
    pub clique: usize,
    pub b1: usize,
    pub b2: usize,
}

impl ExtremalWitness {
    /// Pattern text with `n` left symbolic.
    pub fn pattern(k: usize, alpha: usize) -> String {
        let c = k - alpha - 2;
        let d = k - alpha - 1;
        let head = if c > 0 {
            format!("(n-1)^{c}, ")
        } else {
            String::new()
        };
        let mid = if c > 0 {
            format!("(n+{c})")
        } else {
            "n".into()
        };
        format!("{head}ceil({mid}/2), floor({mid}/2), {d}^(n-{})", k - alpha)
    }
}

pub fn rho(h: &SmallGraph, n: usize) -> Result<ExtremalWitness> {
    rho_from_profile(&profile(h)?, n)
}

pub fn rho_from_profile(p: &PotentialProfile, n: usize) -> Result<ExtremalWitness> {
    if p.type_flag != GraphType::Type2 {
        return Err(Error::Precondition("ρ(H,n) needs a Type 2 graph".into()));
    }
    let (k, alpha) = (p.k, p.alpha);
    if k < alpha + 2 {
        return Err(Error::Precondition(format!(
            "k - α - 2 < 0 (k = {k}, α = {alpha})"
        )));
    }
    if n < k + 2 {
        return Err(Error::range("n", format!("{n} < k + 2 = {}", k + 2)));
    }
    let c = k - alpha - 2;
    let mid = n + c;
    let seq = DegreeSequence::constant(n - 1, c)
        .extended(mid.div_ceil(2), 1)
        .extended(mid / 2, 1)
        .extended(k - alpha - 1, n - k + alpha);
    if !seq.is_graphic() || seq.sum() != rho_sum(k, alpha, n) {
        return Err(Error::Invariant(format!("ρ = {seq} fails its own checks")));
    }
    let leaves = n - k + alpha;
    Ok(ExtremalWitness {
        seq,
        n,
        clique: c,
        b1: leaves.div_ceil(2),
        b2: leaves / 2,
    })
}

/// Direct sum of `ρ(H,n)`: `2(k-α-1)n - (k-α)(k-α-1)`.
pub fn rho_sum(k: usize, alpha: usize, n: usize) -> usize {
    let c = k - alpha - 1;
    2 * c * n - (k - alpha) * c
}

/// Whether `ρ(H,n)` is degree-sufficient for `H` once `n` is large: the
/// first `k - α` terms grow with `n`, the rest equal `k - α - 1`.
pub fn asymptotic_degree_sufficient_rho(h: &SmallGraph) -> Result<bool> {
    let p = profile(h)?;
    if p.type_flag != GraphType::Type2 {
        return Err(Error::Precondition("ρ(H,n) needs a Type 2 graph".into()));
    }
    let degrees = h.degree_sequence();
    let tail = p.k - p.alpha - 1;
    Ok(degrees.terms()[p.k - p.alpha..].iter().all(|&d| d <= tail))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeletedChoice {
    /// Vertices of `H` kept in `F`.
    pub kept: Vec<usize>,
    pub graph: SmallGraph,
    pub sigma_tilde: usize,
}

/// An `F ∈ D^(t)(H)` minimizing `σ̃(F)`; the first one in subset order on
/// ties.
pub fn best_deleted_subgraph(h: &SmallGraph, t: usize) -> Result<DeletedChoice> {
    let alpha = h.independence_number();
    if t + alpha >= h.order() {
        return Err(Error::range(
            "deletion count",
            format!("{t} >= k - α = {}", h.order() - alpha),
        ));
    }
    let mut best: Option<DeletedChoice> = None;
    for f in h.deleted_family(t, false)? {
        // k - t > α, so F has an edge.
        let s = profile(&f.graph)?.sigma_tilde;
        if best.as_ref().is_none_or(|b| s < b.sigma_tilde) {
            best = Some(DeletedChoice {
                kept: f.kept,
                graph: f.graph,
                sigma_tilde: s,
            });
        }
    }
    Ok(best.expect("family is nonempty"))
}

/// An order-`i` vertex set of `H` attaining `∇_i`, preferring one that
/// contains a maximum independent set, else the first in subset order.
pub fn nabla_witness(h: &SmallGraph, i: usize) -> Result<u64> {
    h.nabla(i)?;
    let sets = h.nabla_attaining_sets(i);
    let mis = h.maximum_independent_sets();
    let mut sorted = sets.clone();
    sorted.sort_by_key(|&m| members(m).collect::<Vec<_>>());
    Ok(sorted
        .iter()
        .copied()
        .find(|&m| mis.iter().any(|&s| s & !m == 0))
        .unwrap_or(sorted[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> SmallGraph {
        s.parse().unwrap()
    }

    #[test]
    fn profiles() {
        let p = profile(&g("K 3")).unwrap();
        assert_eq!((p.alpha, p.nabla[&2], p.nabla[&3]), (1, 1, 2));
        assert_eq!(
            (p.sigma_tilde, p.i_star, p.type_flag, p.b_h),
            (2, 2, GraphType::Type2, 1)
        );

        assert_eq!(
            profile(&g("join(K 2, Kbar 3)")).unwrap().type_flag,
            GraphType::Type1
        );

        let p = profile(&g("C 5")).unwrap();
        assert_eq!((p.alpha, p.nabla[&3], p.i_star), (2, 1, 3));
        assert_eq!(2 * p.i_star - p.nabla[&p.i_star], 5);
        assert_eq!(p.type_flag, GraphType::Type2);

        assert_eq!(profile(&g("Kbar 3")).unwrap_err(), Error::Edgeless);
    }

    #[test]
    fn profile_json_field_names() {
        let v = serde_json::to_value(profile(&g("K 3")).unwrap()).unwrap();
        for key in [
            "k",
            "alpha",
            "nabla",
            "sigmaTildeI",
            "sigmaTilde",
            "iStar",
            "type",
            "bH",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["type"], "Type2");
    }

    #[test]
    fn targets() {
        let t = target_sequence(&g("K 3"), 2, 8).unwrap();
        assert_eq!(t.seq.to_string(), "7,1^7");
        assert!(!t.parity_adjusted);
        assert_eq!(
            target_sequence(&g("K 4"), 2, 8).unwrap().seq.to_string(),
            "7,7,2^6"
        );
        let t = target_sequence(&g("P 3"), 3, 7).unwrap();
        assert_eq!(t.seq.to_string(), "1^6,0");
        assert!(t.parity_adjusted);
        assert!(target_sequence(&g("K 3"), 1, 8).is_err());
        assert!(target_sequence(&g("K 4"), 2, 2).is_err());
    }

    #[test]
    fn families() {
        let fam = target_family(&g("K 3"), 8).unwrap();
        assert_eq!(fam.len(), 1);
        assert_eq!(fam[0].seq.to_string(), "7,1^7");

        let p = profile(&g("K 4")).unwrap();
        assert_eq!(
            p.sigma_tilde_i.values().copied().collect::<Vec<_>>(),
            vec![4, 3, 2]
        );
        let fam = target_family(&g("K 4"), 10).unwrap();
        assert_eq!(fam.iter().map(|t| t.i).collect::<Vec<_>>(), vec![2]);

        // K5 minus the edges of a P3.
        let h = g("complement(union(P 3, Kbar 2))");
        assert!(target_family(&h, 10).unwrap().len() >= 2);
    }

    #[test]
    fn rho_sequences() {
        let w = rho(&g("K 3"), 8).unwrap();
        assert_eq!(w.seq.to_string(), "4,4,1^6");
        assert_eq!(w.seq.sum(), 14);
        assert_eq!((w.clique, w.b1, w.b2), (0, 3, 3));

        let w = rho(&g("C 5"), 9).unwrap();
        assert_eq!(w.seq.terms(), &[8, 5, 5, 2, 2, 2, 2, 2, 2]);
        assert_eq!(w.seq.sum(), rho_sum(5, 2, 9));
        assert_eq!(rho_sum(5, 2, 9), 30);

        assert!(rho(&g("split 2 3"), 9).is_err());
        assert!(rho(&g("K 3"), 4).is_err());
        assert_eq!(
            ExtremalWitness::pattern(3, 1),
            "ceil(n/2), floor(n/2), 1^(n-2)"
        );
    }

    #[test]
    fn rho_degree_sufficiency() {
        assert!(asymptotic_degree_sufficient_rho(&g("C 6")).unwrap());
        assert!(!asymptotic_degree_sufficient_rho(&g("K 3")).unwrap());
        assert!(!asymptotic_degree_sufficient_rho(&g("K 4")).unwrap());
        assert!(asymptotic_degree_sufficient_rho(&g("Kbip 2 3")).is_err());
    }

    #[test]
    fn deleted_choices() {
        let c = best_deleted_subgraph(&g("K 4"), 1).unwrap();
        assert_eq!(c.graph.order(), 3);
        assert_eq!(c.sigma_tilde, 2);
        assert!(c.sigma_tilde + 2 <= profile(&g("K 4")).unwrap().sigma_tilde);

        let h = g("C 5");
        let c = best_deleted_subgraph(&h, 0).unwrap();
        assert_eq!(c.graph, h);

        let c = best_deleted_subgraph(&h, 1).unwrap();
        assert!(crate::graphs::is_isomorphic(&c.graph, &g("P 4")));
        assert!(c.sigma_tilde + 2 <= profile(&h).unwrap().sigma_tilde);
        assert!(best_deleted_subgraph(&h, 3).is_err());
    }

    #[test]
    fn nabla_witness_prefers_independent_sets() {
        let h = g("C 5");
        let m = nabla_witness(&h, 3).unwrap();
        assert_eq!(h.induced_max_degree(m), 1);
        assert!(h.maximum_independent_sets().iter().any(|&s| s & !m == 0));
        // No attaining 4-set of C6 contains a maximum independent set.
        let h = g("C 6");
        assert_eq!(nabla_witness(&h, 4).unwrap(), 0b11011);
    }
}
