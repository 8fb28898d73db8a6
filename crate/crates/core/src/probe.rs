//! Executable form of the iterative lay-off algorithm used to prove
//! stability, with a full per-iteration trace.
//!
//! The algorithm is proof machinery for large `n`. At desk scale its guards
//! can fire on sequences that are not potentially `H`-graphic; the oracle
//! result is attached to every guard verdict rather than hidden. Conclusions
//! that claim a subgraph are backed by an explicit realization of the input,
//! built by replaying every deletion and lay-off in reverse, or by the
//! oracle. When neither is possible the verdict is `Inconclusive`.

use std::collections::HashSet;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graphs::{find_embedding, DenseGraph, GraphExpr, SmallGraph};
use crate::oracle::{
    canonical_realization, potentially_split_with, potentially_with, two_switch, Caps, Realization,
};
use crate::potential::{
    family_from_profile, nabla_witness, profile, target_from_profile, PotentialProfile,
    TargetSequence,
};
use crate::sequence::{l1_distance, DegreeSequence, Layoff};
use crate::stability::double_star_cover;

pub type Rational = Ratio<i64>;

fn ser_ratio<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub epsilon: Rational,
    /// `None` selects half of [`ProbeConfig::delta_bound`].
    pub delta: Option<Rational>,
    /// Replaces `f(k) = C(k, ⌊k/2⌋)·8k²`, which exceeds any desk-scale `n`.
    pub f_override: Option<usize>,
    /// Confirm or complete conclusions with the exhaustive oracle.
    pub oracle_fallback: bool,
    pub caps: Caps,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            epsilon: Rational::new(1, 4),
            delta: None,
            f_override: None,
            oracle_fallback: true,
            caps: Caps::default(),
        }
    }
}

impl ProbeConfig {
    /// `ε / (16k³ + 48k² + (32+ε)k)`; `δ` must lie strictly below it.
    pub fn delta_bound(&self, k: usize) -> Rational {
        let k = k as i64;
        let eps = self.epsilon;
        eps / (Rational::from(16 * k * k * k + 48 * k * k + 32 * k) + eps * k)
    }

    pub fn resolved_delta(&self, k: usize) -> Rational {
        self.delta.unwrap_or_else(|| self.delta_bound(k) / 2)
    }

    pub fn f_value(&self, k: usize) -> usize {
        self.f_override.unwrap_or_else(|| default_f(k))
    }

    fn validate(&self) -> Result<()> {
        let half = Rational::new(1, 2);
        if self.epsilon <= Rational::from(0) || self.epsilon >= half {
            return Err(Error::Precondition(format!(
                "epsilon = {} not in (0, 1/2)",
                self.epsilon
            )));
        }
        if let Some(d) = self.delta {
            if d <= Rational::from(0) {
                return Err(Error::Precondition(format!("delta = {d} must be positive")));
            }
        }
        Ok(())
    }
}

/// `C(k, ⌊k/2⌋)·8k²`.
pub fn default_f(k: usize) -> usize {
    let half = k / 2;
    let binom = (0..half).fold(1usize, |acc, j| acc * (k - j) / (j + 1));
    binom * 8 * k * k
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GuardReason {
    /// `d_{2k} >= k-1`, so the sequence is potentially `K_k`-graphic.
    LargeCliqueDegrees,
    /// Too many terms were laid off during initialization.
    InitGuard,
    /// Too many terms were laid off in Step 4.
    Step4Guard,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum ProbeVerdict {
    /// `embedding[x]` is the position of `π` hosting vertex `x` of `H`.
    FoundH {
        embedding: Vec<usize>,
    },
    #[serde(rename_all = "camelCase")]
    CloseToTarget {
        target: TargetSequence,
        distance: usize,
        /// Whether the target maximizes `σ̃_i`, i.e. lies in `P(H,n)`.
        in_family: bool,
        /// Whether `distance < εn`; only guaranteed for large `n`.
        within_epsilon: bool,
    },
    /// Embedding of `K_clique ∨ K̄_independent` (clique vertices first).
    FoundSplit {
        clique: usize,
        independent: usize,
        embedding: Vec<usize>,
    },
    /// A guard fired. Guards are sound only for large `n`.
    DeclaredPotential {
        reason: GuardReason,
        /// Oracle confirmation, when the oracle could run.
        verified: Option<bool>,
    },
    Inconclusive {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InitRecord {
    pub threshold: usize,
    pub j_init: usize,
    pub laid_off_sum: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub guard: Rational,
    pub pi0: DegreeSequence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IterationRecord {
    pub t: usize,
    pub n_t: usize,
    pub pi_t: DegreeSequence,
    pub sigma: usize,
    /// Right side of the sum lower bound `(2(k-i*)+∇_{i*}-1-(t+1)δ-2t)·n_t`.
    #[serde(serialize_with = "ser_ratio")]
    pub sum_bound: Rational,
    pub sum_bound_holds: bool,
    pub removed_nonneighbors: Option<usize>,
    pub step4_threshold: Option<i64>,
    pub laid_off_step4: Option<usize>,
    pub halting_reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HaltRecord {
    pub ell: usize,
    pub n_ell: usize,
    /// `S_ℓ = K_a ∨ K̄_b` as `(a, b)`.
    pub s_ell: (usize, usize),
    pub min_term_ok: bool,
    pub degree_sufficient_for_s_ell: Option<bool>,
    pub p: Option<usize>,
    /// Order of the induced subgraph `F` used, and its vertices in `H`.
    pub f_order: Option<usize>,
    pub f_vertices: Option<Vec<usize>>,
    /// Degree sequence of `K_ℓ ∨ G^(ℓ)`.
    pub eta: Option<DegreeSequence>,
    /// Realization of `π` backing a found subgraph.
    pub realization_edges: Option<Vec<(usize, usize)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Accounting {
    pub removed_init: usize,
    pub removed_step2: usize,
    pub removed_step3: usize,
    pub removed_step4: usize,
    pub n_minus_n_ell: usize,
    pub identity_holds: bool,
    /// `δ(k²+3k+2)/(1-kδ)·n + k·f + k`.
    #[serde(serialize_with = "ser_ratio")]
    pub removal_bound: Rational,
    pub removal_bound_holds: bool,
    /// `n` beyond which the `(ε/8k)n` bound is asserted.
    #[serde(serialize_with = "ser_ratio")]
    pub epsilon_bound_threshold: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbeTrace {
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    pub i_star: usize,
    pub b_h: usize,
    pub sigma_tilde: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub epsilon: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub delta: Rational,
    pub f: usize,
    pub warnings: Vec<String>,
    pub init: Option<InitRecord>,
    pub iterations: Vec<IterationRecord>,
    pub halt: Option<HaltRecord>,
    pub accounting: Option<Accounting>,
    pub refinement: Option<RefineOutcome>,
}

impl ProbeTrace {
    /// True iff the sum lower bound held at every recorded iteration.
    pub fn sum_bound_everywhere(&self) -> bool {
        self.iterations.iter().all(|r| r.sum_bound_holds)
    }
}

/// Vertex roles carried through the reverse replay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tag {
    Core(usize),
    Dominating(usize),
}

enum LiftOp {
    Layoff(Layoff, Option<Tag>),
    /// `full` realizes the sequence before pruning; `kept[p]` is the vertex
    /// of `full` at position `p` of the pruned sequence.
    Prune {
        full: DenseGraph,
        kept: Vec<usize>,
    },
}

/// Turns a realization of the final sequence into one of the input,
/// carrying tags along.
fn lift(
    ops: &[LiftOp],
    mut g: DenseGraph,
    mut tags: Vec<Option<Tag>>,
) -> (DenseGraph, Vec<Option<Tag>>) {
    for op in ops.iter().rev() {
        match op {
            LiftOp::Layoff(l, tag) => {
                let n = l.origin.len() + 1;
                let mut g2 = DenseGraph::new(n);
                let mut t2 = vec![None; n];
                for (p, q) in g.edges() {
                    g2.add_edge(l.origin[p], l.origin[q]);
                }
                for (p, &orig) in l.origin.iter().enumerate() {
                    t2[orig] = tags[p];
                }
                for &q in &l.reduced {
                    g2.add_edge(l.index, q);
                }
                t2[l.index] = *tag;
                g = g2;
                tags = t2;
            }
            LiftOp::Prune { full, kept } => {
                let mut g2 = full.clone();
                let kept_set: HashSet<usize> = kept.iter().copied().collect();
                for (u, v) in full.edges() {
                    if kept_set.contains(&u) && kept_set.contains(&v) {
                        g2.remove_edge(u, v);
                    }
                }
                for (p, q) in g.edges() {
                    g2.add_edge(kept[p], kept[q]);
                }
                let mut t2 = vec![None; full.order()];
                for (p, &v) in kept.iter().enumerate() {
                    t2[v] = tags[p];
                }
                g = g2;
                tags = t2;
            }
        }
    }
    (g, tags)
}

pub fn run_probe(
    seq: &DegreeSequence,
    h: &SmallGraph,
    cfg: &ProbeConfig,
) -> Result<(ProbeVerdict, ProbeTrace)> {
    cfg.validate()?;
    if !seq.is_graphic() {
        return Err(Error::NotGraphic(seq.to_string()));
    }
    let prof = profile(h)?;
    let (k, alpha, i_star, b_h) = (prof.k, prof.alpha, prof.i_star, prof.b_h);
    let n = seq.len();
    let delta = cfg.resolved_delta(k);
    let f = cfg.f_value(k);
    let nabla_star = prof.nabla[&i_star] as i64;
    let mut trace = ProbeTrace {
        n,
        k,
        alpha,
        i_star,
        b_h,
        sigma_tilde: prof.sigma_tilde,
        epsilon: cfg.epsilon,
        delta,
        f,
        warnings: Vec::new(),
        init: None,
        iterations: Vec::new(),
        halt: None,
        accounting: None,
        refinement: None,
    };
    if delta >= cfg.delta_bound(k) {
        trace.warnings.push(format!(
            "delta = {delta} is not below the bound {}",
            cfg.delta_bound(k)
        ));
    }
    let r = |x: usize| Rational::from(x as i64);
    if r(seq.sum()) < (r(prof.sigma_tilde) - delta) * r(n) {
        trace.warnings.push(format!(
            "sum {} is below (σ̃ - δ)n = {}",
            seq.sum(),
            (r(prof.sigma_tilde) - delta) * r(n)
        ));
    }
    let oracle_ok = cfg.oracle_fallback && n <= cfg.caps.max_n && k <= cfg.caps.max_k;
    let confirm = |reason: GuardReason| -> Result<ProbeVerdict> {
        if !oracle_ok {
            return Ok(ProbeVerdict::DeclaredPotential {
                reason,
                verified: None,
            });
        }
        let verified = potentially_with(seq, h, &cfg.caps)?.answer;
        Ok(ProbeVerdict::DeclaredPotential {
            reason,
            verified: Some(verified),
        })
    };

    // Large clique degrees.
    if seq.padded(2 * k) + 1 >= k {
        return Ok((confirm(GuardReason::LargeCliqueDegrees)?, trace));
    }

    // Initialization.
    let threshold = seq.sum().div_ceil(2 * n.max(1));
    let batch = seq.layoff_batch_below(threshold)?;
    let init_guard = Rational::from(2 * n as i64) * delta / (Rational::from(1) + delta);
    trace.init = Some(InitRecord {
        threshold,
        j_init: batch.count,
        laid_off_sum: batch.laid_off_sum,
        guard: init_guard,
        pi0: batch.result.clone(),
    });
    if r(batch.count) > init_guard {
        return Ok((confirm(GuardReason::InitGuard)?, trace));
    }
    let mut ops: Vec<LiftOp> = batch
        .steps
        .into_iter()
        .map(|l| LiftOp::Layoff(l, None))
        .collect();
    let mut pi = batch.result;
    let mut acct = (batch.count, 0usize, 0usize, 0usize);
    let stop = k - alpha - b_h;

    // Iteration.
    let mut t = 0usize;
    let ell = loop {
        let n_t = pi.len();
        let bound = (r(2 * (k - i_star)) + Rational::from(nabla_star - 1)
            - Rational::from((t + 1) as i64) * delta
            - r(2 * t))
            * r(n_t);
        let mut rec = IterationRecord {
            t,
            n_t,
            pi_t: pi.clone(),
            sigma: pi.sum(),
            sum_bound: bound,
            sum_bound_holds: r(pi.sum()) >= bound,
            removed_nonneighbors: None,
            step4_threshold: None,
            laid_off_step4: None,
            halting_reason: None,
        };
        // Step 1.
        if pi.max_term() + f < n_t || t == stop {
            rec.halting_reason = Some(if t == stop {
                format!("t = k - α - b_H = {stop}")
            } else {
                format!("d_1 = {} < n_t - f = {}", pi.max_term(), n_t - f)
            });
            trace.iterations.push(rec);
            break t;
        }
        if n_t == 0 {
            rec.halting_reason = Some("sequence exhausted".into());
            trace.iterations.push(rec);
            return Ok((
                ProbeVerdict::Inconclusive {
                    reason: format!("all terms were removed before t reached {stop}"),
                },
                trace,
            ));
        }
        // Step 2: keep v_1 and its neighbours in the canonical realization.
        let real = canonical_realization(&pi)?;
        let mut kept: Vec<usize> = std::iter::once(0).chain(real.graph.neighbors(0)).collect();
        let in_kept: HashSet<usize> = kept.iter().copied().collect();
        let deg: Vec<usize> = kept
            .iter()
            .map(|&v| {
                real.graph
                    .neighbors(v)
                    .filter(|u| in_kept.contains(u))
                    .count()
            })
            .collect();
        let mut order: Vec<usize> = (0..kept.len()).collect();
        order.sort_by_key(|&p| (std::cmp::Reverse(deg[p]), p));
        kept = order.iter().map(|&p| kept[p]).collect();
        let pi_hat = DegreeSequence::new(deg.clone());
        rec.removed_nonneighbors = Some(n_t - kept.len());
        acct.1 += n_t - kept.len();
        ops.push(LiftOp::Prune {
            full: real.graph.clone(),
            kept,
        });
        // Step 3: lay off the dominating vertex.
        if pi_hat.max_term() + 1 != pi_hat.len() {
            return Err(Error::Invariant(format!("{pi_hat} has no dominating term")));
        }
        let step3 = pi_hat.layoff_traced(1)?;
        let pi_check = step3.result.clone();
        ops.push(LiftOp::Layoff(step3, Some(Tag::Dominating(t))));
        acct.2 += 1;
        // Step 4.
        let ceil = ((Rational::from(nabla_star - 1) - Rational::from((t + 1) as i64) * delta) / 2)
            .ceil()
            .to_integer();
        let thr = (k - i_star) as i64 + ceil - (t + 1) as i64;
        rec.step4_threshold = Some(thr);
        let b4 = pi_check.layoff_batch_below(thr.max(0) as usize)?;
        rec.laid_off_step4 = Some(b4.count);
        acct.3 += b4.count;
        let guard4 = Rational::from(((t + 3) * n_t) as i64) * delta
            / (Rational::from(1) - delta * (k as i64));
        trace.iterations.push(rec);
        if r(b4.count) >= guard4 {
            trace.iterations.last_mut().unwrap().halting_reason = Some(format!(
                "{} terms laid off in Step 4, guard {guard4}",
                b4.count
            ));
            return Ok((confirm(GuardReason::Step4Guard)?, trace));
        }
        ops.extend(b4.steps.into_iter().map(|l| LiftOp::Layoff(l, None)));
        pi = b4.result;
        t += 1;
    };

    let n_ell = pi.len();
    let removed = acct.0 + acct.1 + acct.2 + acct.3;
    let kd = Rational::from(k as i64);
    let removal_bound = delta * Rational::from((k * k + 3 * k + 2) as i64)
        / (Rational::from(1) - kd * delta)
        * r(n)
        + r(k * f + k);
    trace.accounting = Some(Accounting {
        removed_init: acct.0,
        removed_step2: acct.1,
        removed_step3: acct.2,
        removed_step4: acct.3,
        n_minus_n_ell: n - n_ell,
        identity_holds: removed == n - n_ell,
        removal_bound,
        removal_bound_holds: r(n - n_ell) <= removal_bound,
        epsilon_bound_threshold: Rational::from(16 * k as i64) * r(k * f + k) / cfg.epsilon,
    });
    let s_clique = k - ell - alpha - b_h;
    let s_ell = (s_clique, alpha + b_h);
    let mut halt = HaltRecord {
        ell,
        n_ell,
        s_ell,
        min_term_ok: true,
        degree_sufficient_for_s_ell: None,
        p: None,
        f_order: None,
        f_vertices: None,
        eta: Some(eta(&pi, ell)),
        realization_edges: None,
    };

    let ctx = Finish {
        seq,
        h,
        prof: &prof,
        cfg,
        ops: &ops,
        ell,
        oracle_ok,
    };

    if ell == stop {
        // Every choice of α + b_H vertices of π^(ℓ) is independent in K̄.
        if n_ell < alpha + b_h {
            halt.min_term_ok = false;
            trace.halt = Some(halt);
            return Ok((
                ProbeVerdict::Inconclusive {
                    reason: format!(
                        "π^(ℓ) has {n_ell} terms, fewer than α + b_H = {}",
                        alpha + b_h
                    ),
                },
                trace,
            ));
        }
        let g_ell = canonical_realization(&pi)?.graph;
        let core: Vec<usize> = (0..alpha + b_h).collect();
        let verdict = ctx.split_conclusion(g_ell, &[], &core, &mut halt)?;
        trace.halt = Some(halt);
        return Ok((ctx.refine_if_split(verdict, &mut trace)?, trace));
    }

    let min_needed = s_clique as i64;
    if (pi.min_term() as i64) < min_needed || pi.is_empty() {
        halt.min_term_ok = false;
        trace.halt = Some(halt);
        return Ok((
            ProbeVerdict::Inconclusive {
                reason: format!(
                    "minimum term of π^(ℓ) is {}, below k - ℓ - α - b_H = {min_needed}",
                    pi.min_term()
                ),
            },
            trace,
        ));
    }
    let s_graph = GraphExpr::Split(s_clique, alpha + b_h).build(crate::graphs::MAX_ORDER)?;
    let sufficient = pi.is_degree_sufficient_for(&s_graph.degree_sequence());
    halt.degree_sufficient_for_s_ell = Some(sufficient);
    if sufficient {
        // The bounded-maximum-degree step needs large n; complete by oracle.
        if !(oracle_ok && n_ell <= cfg.caps.max_n) {
            trace.halt = Some(halt);
            return Ok((
                ProbeVerdict::Inconclusive {
                    reason: "degree-sufficient for S_ℓ, but the oracle is unavailable to build the embedding".into(),
                },
                trace,
            ));
        }
        let cert = potentially_split_with(&pi, s_clique, alpha + b_h, &cfg.caps)?;
        let (Some(real), Some(map)) = (cert.realization, cert.embedding) else {
            trace.halt = Some(halt);
            return Ok((
                ProbeVerdict::Inconclusive {
                    reason: format!("degree-sufficient for S_ℓ, but π^(ℓ) = {pi} is not potentially S_ℓ-graphic"),
                },
                trace,
            ));
        };
        let (clique, indep) = map.split_at(s_clique);
        let verdict = ctx.split_conclusion(real.graph, clique, indep, &mut halt)?;
        trace.halt = Some(halt);
        return Ok((ctx.refine_if_split(verdict, &mut trace)?, trace));
    }

    let p = pi.terms().iter().filter(|&&d| d + ell + 1 >= k).count();
    halt.p = Some(p);
    if k < ell + p + alpha + 1 {
        trace.halt = Some(halt);
        return Ok((
            ProbeVerdict::Inconclusive {
                reason: format!(
                    "index k - ℓ - p = {} is not above α = {alpha}",
                    k as i64 - (ell + p) as i64
                ),
            },
            trace,
        ));
    }
    let i_t = k - ell - p;
    let w = nabla_witness(h, i_t)?;
    let fsub = h.induced(w);
    halt.f_order = Some(i_t);
    halt.f_vertices = Some(crate::graphs::members(w).collect());
    let kpf = SmallGraph::complete(p)?.join(&fsub)?;
    if pi.is_degree_sufficient_for(&kpf.degree_sequence()) {
        trace.halt = Some(halt);
        if !oracle_ok {
            return Ok((
                ProbeVerdict::Inconclusive {
                    reason: "degree-sufficient for K_p ∨ F, but the oracle is unavailable to build the embedding".into(),
                },
                trace,
            ));
        }
        let cert = potentially_with(seq, h, &cfg.caps)?;
        return Ok(match (cert.embedding, cert.realization) {
            (Some(embedding), Some(real)) => {
                trace.halt.as_mut().unwrap().realization_edges = Some(real.graph.edges());
                (ProbeVerdict::FoundH { embedding }, trace)
            }
            _ => (
                ProbeVerdict::Inconclusive {
                    reason: "degree-sufficient for K_p ∨ F, but the oracle finds no realization containing H".into(),
                },
                trace,
            ),
        });
    }
    trace.halt = Some(halt);
    let target = match target_from_profile(&prof, i_t, n) {
        Ok(t) => t,
        Err(e) => {
            return Ok((
                ProbeVerdict::Inconclusive {
                    reason: format!("target π̃_{i_t}(H,{n}) unavailable: {e}"),
                },
                trace,
            ))
        }
    };
    let distance = l1_distance(seq, &target.seq);
    let in_family = family_from_profile(&prof, n)?.iter().any(|m| m.i == i_t);
    let within_epsilon = Rational::from(distance as i64) < cfg.epsilon * r(n);
    Ok((
        ProbeVerdict::CloseToTarget {
            target,
            distance,
            in_family,
            within_epsilon,
        },
        trace,
    ))
}

fn eta(pi: &DegreeSequence, ell: usize) -> DegreeSequence {
    let n_ell = pi.len();
    let mut terms: Vec<usize> = pi.terms().iter().map(|&d| d + ell).collect();
    terms.extend(std::iter::repeat_n(n_ell + ell - 1, ell));
    DegreeSequence::new(terms)
}

struct Finish<'a> {
    seq: &'a DegreeSequence,
    h: &'a SmallGraph,
    prof: &'a PotentialProfile,
    cfg: &'a ProbeConfig,
    ops: &'a [LiftOp],
    ell: usize,
    oracle_ok: bool,
}

impl Finish<'_> {
    /// Lifts a realization of `π^(ℓ)` in which `clique ∪ indep` spans
    /// `S_ℓ`, and reads off `H` (Type 1) or the split graph (Type 2).
    fn split_conclusion(
        &self,
        g_ell: DenseGraph,
        clique: &[usize],
        indep: &[usize],
        halt: &mut HaltRecord,
    ) -> Result<ProbeVerdict> {
        let mut tags: Vec<Option<Tag>> = vec![None; g_ell.order()];
        for (i, &v) in clique.iter().chain(indep).enumerate() {
            tags[v] = Some(Tag::Core(i));
        }
        let (g, tags) = lift(self.ops, g_ell, tags);
        let real = Realization::new(self.seq.clone(), g)?;
        let mut dom = vec![usize::MAX; self.ell];
        let mut core = vec![usize::MAX; clique.len() + indep.len()];
        for (v, tag) in tags.iter().enumerate() {
            match tag {
                Some(Tag::Dominating(t)) => dom[*t] = v,
                Some(Tag::Core(i)) => core[*i] = v,
                None => {}
            }
        }
        if dom.contains(&usize::MAX) || core.contains(&usize::MAX) {
            return Err(Error::Invariant(
                "a tagged vertex was lost while lifting".into(),
            ));
        }
        let big_clique: Vec<usize> = dom.iter().chain(&core[..clique.len()]).copied().collect();
        let independent: Vec<usize> = core[clique.len()..].to_vec();
        let split = GraphExpr::Split(big_clique.len(), independent.len())
            .build(crate::graphs::MAX_ORDER)?;
        let split_map: Vec<usize> = big_clique.iter().chain(&independent).copied().collect();
        if !real.graph.contains_embedding(&split, &split_map) {
            return Err(Error::Invariant(
                "lifted realization lacks the split graph".into(),
            ));
        }
        halt.realization_edges = Some(real.graph.edges());
        if self.prof.b_h == 1 {
            return Ok(ProbeVerdict::FoundSplit {
                clique: big_clique.len(),
                independent: independent.len(),
                embedding: split_map,
            });
        }
        // Type 1: H ⊆ K_{k-α} ∨ K̄_α with a maximum independent set on K̄_α.
        let mis = self.h.maximum_independent_sets()[0];
        let mut embedding = vec![0; self.h.order()];
        let (mut ci, mut ii) = (0, 0);
        for (x, slot) in embedding.iter_mut().enumerate() {
            if mis >> x & 1 == 1 {
                *slot = independent[ii];
                ii += 1;
            } else {
                *slot = big_clique[ci];
                ci += 1;
            }
        }
        if !real.graph.contains_embedding(self.h, &embedding) {
            return Err(Error::Invariant(
                "H does not embed in the lifted split graph".into(),
            ));
        }
        if self.oracle_ok && !potentially_with(self.seq, self.h, &self.cfg.caps)?.answer {
            return Err(Error::Invariant(
                "oracle contradicts an explicit realization".into(),
            ));
        }
        Ok(ProbeVerdict::FoundH { embedding })
    }

    fn refine_if_split(
        &self,
        verdict: ProbeVerdict,
        trace: &mut ProbeTrace,
    ) -> Result<ProbeVerdict> {
        if let ProbeVerdict::FoundSplit {
            clique, embedding, ..
        } = &verdict
        {
            let edges = trace
                .halt
                .as_ref()
                .and_then(|h| h.realization_edges.clone())
                .unwrap_or_default();
            let g = DenseGraph::from_edges(self.seq.len(), &edges)?;
            let real = Realization::new(self.seq.clone(), g)?;
            let (q, r) = embedding.split_at(*clique);
            trace.refinement = Some(type2_refine(&real, q, r, self.h)?);
        }
        Ok(verdict)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RefineOutcome {
    /// `embedding[x]` is the vertex of the (possibly exchanged) realization
    /// hosting vertex `x` of `H`.
    pub embedding: Option<Vec<usize>>,
    pub exchange: Option<String>,
    /// Edges of the exchanged realization when an embedding was found.
    pub realization_edges: Option<Vec<(usize, usize)>>,
    /// `|W_p|` for each clique vertex, taking the first vertex of `R` as centre.
    pub w_sizes: Vec<usize>,
    /// `d_{k-α} < 2k²`.
    pub max_degree_bound_holds: bool,
    /// `d_{k-α+8k⁴} <= k-α-1`.
    pub few_big_degrees_bound_holds: bool,
}

/// Tries the two edge exchanges that turn a copy of `K_{k-α-1} ∨ K̄_{α+1}`
/// on `Q ∪ R` into a copy of `H`: a double-star exchange around one vertex
/// of `Q`, then a three-edge exchange putting one edge inside `R`.
pub fn type2_refine(
    g: &Realization,
    q: &[usize],
    r: &[usize],
    h: &SmallGraph,
) -> Result<RefineOutcome> {
    let k = h.order();
    let alpha = h.independence_number();
    let n = g.graph.order();
    let malformed = |msg: String| Err(Error::Precondition(format!("malformed Q/R: {msg}")));
    if q.len() + alpha + 1 != k || r.len() != alpha + 1 {
        return malformed(format!(
            "|Q| = {}, |R| = {} for k = {k}, α = {alpha}",
            q.len(),
            r.len()
        ));
    }
    let mut qr: Vec<usize> = q.iter().chain(r).copied().collect();
    qr.sort_unstable();
    qr.dedup();
    if qr.len() != k || qr.iter().any(|&v| v >= n) {
        return malformed("vertices repeat or are out of range".into());
    }
    for (i, &a) in q.iter().enumerate() {
        if q[i + 1..].iter().any(|&b| !g.graph.has_edge(a, b)) {
            return malformed("Q is not a clique".into());
        }
        if r.iter().any(|&b| !g.graph.has_edge(a, b)) {
            return malformed("Q is not joined to R".into());
        }
    }
    let d = &g.sequence;
    let kk = k as u64;
    let mut out = RefineOutcome {
        embedding: None,
        exchange: None,
        realization_edges: None,
        w_sizes: Vec::new(),
        max_degree_bound_holds: (d.padded(k - alpha) as u64) < 2 * kk * kk,
        few_big_degrees_bound_holds: d.padded(k - alpha + 8 * k.pow(4)) + alpha < k,
    };
    let in_qr: HashSet<usize> = q.iter().chain(r).copied().collect();
    let try_embed = |real: &Realization, label: String, out: &mut RefineOutcome| -> Result<bool> {
        let verts: Vec<usize> = q.iter().chain(r).copied().collect();
        let sub = real.graph.induced_small(&verts)?;
        if let Some(map) = find_embedding(h, &sub) {
            out.embedding = Some(map.iter().map(|&i| verts[i]).collect());
            out.exchange = Some(label);
            out.realization_edges = Some(real.graph.edges());
            return Ok(true);
        }
        Ok(false)
    };

    let r_has_edge = r
        .iter()
        .enumerate()
        .any(|(i, &a)| r[i + 1..].iter().any(|&b| g.graph.has_edge(a, b)));
    if r_has_edge {
        try_embed(g, "R already induces an edge".into(), &mut out)?;
        return Ok(out);
    }

    // Double-star exchange.
    let mut centres: Vec<usize> = r.to_vec();
    centres.sort_by_key(|&v| (std::cmp::Reverse(g.graph.degree(v)), v));
    if let Ok(Some((_, b2))) = double_star_cover(h) {
        for (ci, &v) in centres.iter().enumerate() {
            let leaves: Vec<usize> = r.iter().copied().filter(|&x| x != v).collect();
            for &qp in q {
                let w: Vec<usize> = g
                    .graph
                    .neighbors(v)
                    .filter(|x| !in_qr.contains(x) && !g.graph.has_edge(*x, qp))
                    .collect();
                if ci == 0 {
                    out.w_sizes.push(w.len());
                }
                if w.len() < b2 {
                    continue;
                }
                let mut cur = g.clone();
                for i in 0..b2 {
                    cur = two_switch(&cur, (v, w[i]), (leaves[i], qp))?;
                }
                if try_embed(
                    &cur,
                    format!("double-star exchange around Q-vertex {qp} and R-vertex {v}"),
                    &mut out,
                )? {
                    return Ok(out);
                }
            }
        }
    }

    // Three-edge exchange inside G - Q. The distance condition on w only
    // serves to make the new pairs non-edges; here that is checked directly.
    let qset: HashSet<usize> = q.iter().copied().collect();
    let outside = |x: &usize| !in_qr.contains(x);
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    for (i, &u) in r.iter().enumerate() {
        for &v in &r[i + 1..] {
            for a1 in g.graph.neighbors(u).filter(outside) {
                for a2 in g.graph.neighbors(v).filter(outside) {
                    for (wv, x) in g
                        .graph
                        .edges()
                        .into_iter()
                        .flat_map(|(a, b)| [(a, b), (b, a)])
                    {
                        if qset.contains(&wv) || qset.contains(&x) || wv == a1 || x == a2 {
                            continue;
                        }
                        let removed = [key(u, a1), key(v, a2), key(wv, x)];
                        let added = [key(u, v), key(wv, a1), key(x, a2)];
                        if removed[0] == removed[1]
                            || removed[2] == removed[0]
                            || removed[2] == removed[1]
                        {
                            continue;
                        }
                        // A pair both removed and added cancels out.
                        let net_add: Vec<_> =
                            added.iter().filter(|e| !removed.contains(e)).collect();
                        if added[1] == added[2]
                            || net_add.iter().any(|&&(a, b)| g.graph.has_edge(a, b))
                        {
                            continue;
                        }
                        let mut cur = g.graph.clone();
                        for (a, b) in removed {
                            cur.remove_edge(a, b);
                        }
                        for (a, b) in added {
                            cur.add_edge(a, b);
                        }
                        let real = Realization::new(g.sequence.clone(), cur)?;
                        let label = format!(
                            "three-edge exchange {u}{a1}, {v}{a2}, {wv}{x} -> {u}{v}, {wv}{a1}, {x}{a2}"
                        );
                        if try_embed(&real, label, &mut out)? {
                            return Ok(out);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
