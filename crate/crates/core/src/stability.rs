//! σ-stability and weak σ-stability classification.
//!
//! Only the cells decided by a proved statement get a definite answer.
//! Everything else is `Unknown` with a note naming the failed hypothesis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{GraphExpr, SmallGraph};
use crate::potential::{
    asymptotic_degree_sufficient_rho, profile, rho, ExtremalWitness, GraphType, PotentialProfile,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Stable,
    NotStable,
    Unknown,
}

/// Which result decided a σ-stability verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    /// Type 1 graphs are σ-stable.
    MainLow,
    /// Type 2 with a one-edge `(α+1)`-set: stable iff a double-star cover exists.
    MainHigh,
    /// Type 2 without a double-star cover: `ρ(H,n)` breaks stability.
    NotStable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StabilityVerdict {
    pub status: Status,
    pub theorem: Option<Basis>,
    /// `ρ(H,n)` with `n` symbolic; present exactly for `NotStable`.
    pub witness_sequence_pattern: Option<String>,
    #[serde(rename = "coverB1B2")]
    pub cover_b1_b2: Option<(usize, usize)>,
    pub note: Option<String>,
}

impl StabilityVerdict {
    /// The concrete witness `ρ(H,n)` for a `NotStable` verdict.
    pub fn witness(&self, h: &SmallGraph, n: usize) -> Result<Option<ExtremalWitness>> {
        match self.status {
            Status::NotStable => rho(h, n).map(Some),
            _ => Ok(None),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeakStatus {
    WeaklyStable,
    NotWeaklyStable,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeakBasis {
    /// Complete graphs of order at least 3 are weakly σ-stable.
    CliqueWeak,
    /// Not σ-stable via `ρ(H,n)`, and `ρ(H,n)` is degree-sufficient for `H`.
    RhoDegreeSufficient,
    /// σ-stable, and weak stability quantifies over fewer sequences. This
    /// follows from the definitions rather than from a stated result.
    ImpliedBySigmaStable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WeakVerdict {
    pub status: WeakStatus,
    pub basis: Option<WeakBasis>,
    pub witness_sequence_pattern: Option<String>,
    pub note: Option<String>,
}

/// Host graph `K_{k-α-2} ∨ S_{b1,b2}` for a cover test.
fn cover_host(k: usize, alpha: usize, b1: usize, b2: usize) -> Result<SmallGraph> {
    let star = GraphExpr::DoubleStar(b1, b2).build(crate::graphs::MAX_ORDER)?;
    SmallGraph::complete(k - alpha - 2)?.join(&star)
}

/// The smallest `(b1, b2)` with `b1 >= b2`, `b1 + b2 = α` and
/// `H ⊆ K_{k-α-2} ∨ S_{b1,b2}`, if any.
pub fn double_star_cover(h: &SmallGraph) -> Result<Option<(usize, usize)>> {
    let k = h.order();
    let alpha = h.independence_number();
    if k < alpha + 2 {
        return Err(Error::Precondition(format!(
            "k - α - 2 < 0 (k = {k}, α = {alpha}): cover question is ill-posed"
        )));
    }
    for b1 in alpha.div_ceil(2)..=alpha {
        let b2 = alpha - b1;
        if h.spanning_subgraph_of(&cover_host(k, alpha, b1, b2)?)? {
            return Ok(Some((b1, b2)));
        }
    }
    Ok(None)
}

pub fn classify_sigma(h: &SmallGraph) -> Result<StabilityVerdict> {
    let p = profile(h)?;
    Ok(classify_with_profile(h, &p))
}

fn classify_with_profile(h: &SmallGraph, p: &PotentialProfile) -> StabilityVerdict {
    let mut v = StabilityVerdict {
        status: Status::Unknown,
        theorem: None,
        witness_sequence_pattern: None,
        cover_b1_b2: None,
        note: None,
    };
    if p.type_flag == GraphType::Type1 {
        v.status = Status::Stable;
        v.theorem = Some(Basis::MainLow);
        return v;
    }
    let cover = match double_star_cover(h) {
        Ok(c) => c,
        Err(e) => {
            v.note = Some(format!("Type 2, but {e}"));
            return v;
        }
    };
    match cover {
        None => {
            v.status = Status::NotStable;
            v.theorem = Some(Basis::NotStable);
            v.witness_sequence_pattern = Some(ExtremalWitness::pattern(p.k, p.alpha));
        }
        Some(c) if h.one_edge_set_exists(p.alpha + 1) => {
            v.status = Status::Stable;
            v.theorem = Some(Basis::MainHigh);
            v.cover_b1_b2 = Some(c);
        }
        Some(c) => {
            v.cover_b1_b2 = Some(c);
            v.note = Some(format!(
                "Type 2 with a double-star cover {c:?}, but no set of {} vertices induces exactly one edge",
                p.alpha + 1
            ));
        }
    }
    v
}

pub fn classify_weak(h: &SmallGraph) -> Result<WeakVerdict> {
    let sigma = classify_sigma(h)?;
    Ok(classify_weak_with(h, &sigma))
}

/// Weak verdict given an already computed σ verdict for the same graph.
pub fn classify_weak_with(h: &SmallGraph, sigma: &StabilityVerdict) -> WeakVerdict {
    let mut v = WeakVerdict {
        status: WeakStatus::Unknown,
        basis: None,
        witness_sequence_pattern: None,
        note: None,
    };
    if h.order() >= 3 && h.is_complete() {
        v.status = WeakStatus::WeaklyStable;
        v.basis = Some(WeakBasis::CliqueWeak);
        return v;
    }
    match sigma.status {
        Status::NotStable => {
            if asymptotic_degree_sufficient_rho(h).unwrap_or(false) {
                v.status = WeakStatus::NotWeaklyStable;
                v.basis = Some(WeakBasis::RhoDegreeSufficient);
                v.witness_sequence_pattern = sigma.witness_sequence_pattern.clone();
            } else {
                v.note = Some("not σ-stable, but ρ(H,n) is not degree-sufficient for H".into());
            }
        }
        Status::Stable => {
            v.status = WeakStatus::WeaklyStable;
            v.basis = Some(WeakBasis::ImpliedBySigmaStable);
        }
        Status::Unknown => {
            v.note = Some("σ-stability undecided".into());
        }
    }
    v
}
