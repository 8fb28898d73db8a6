//! Acceptance suite. Prints one line per criterion and exits nonzero if
//! any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::panic;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use potstab::graphs::{DenseGraph, GraphExpr};
use potstab::oracle::{graphic_sequences, potentially, potentially_split, sigma_exact};
use potstab::potential::{best_deleted_subgraph, profile, rho, target_family, target_sequence};
use potstab::probe::{run_probe, ProbeConfig, ProbeTrace, ProbeVerdict};
use potstab::stability::{classify_sigma, classify_weak, Basis, Status, WeakStatus};
use potstab::{l1_distance, DegreeSequence, SmallGraph};

type Outcome = Result<String, String>;

const CORPUS: [&str; 8] = [
    "K 3",
    "K 4",
    "C 5",
    "C 6",
    "P 4",
    "Kbip 2 3",
    "split 2 3",
    "friendship 2",
];

fn g(s: &str) -> SmallGraph {
    s.parse().unwrap()
}

fn single_core<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(f)
}

fn verdict(failures: Vec<String>, pass: String) -> Outcome {
    if failures.is_empty() {
        Ok(pass)
    } else {
        Err(failures.join("; "))
    }
}

fn triangle_potential_numbers() -> Outcome {
    let k3 = g("K 3");
    let mut failures = Vec::new();
    let mut seen = Vec::new();
    for n in 5..=8 {
        let start = Instant::now();
        let s = single_core(|| sigma_exact(&k3, n)).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        seen.push(format!("n={n}: {}", s.value));
        if s.value != 2 * n {
            let witness: Vec<String> = s.extremal_sequences.iter().map(|x| x.to_string()).collect();
            failures.push(format!(
                "σ(K3,{n}) = {} but 2n = {}; not potentially K3 with sum {}: {}",
                s.value,
                2 * n,
                s.value - 2,
                witness.join(" ")
            ));
        }
        if took > Duration::from_secs(60) {
            failures.push(format!("n = {n} took {took:.1?} > 60 s"));
        }
    }
    verdict(failures, seen.join(", "))
}

fn k4_potential_numbers() -> Outcome {
    let k4 = g("K 4");
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut seen = Vec::new();
    for n in [6, 7] {
        let s = single_core(|| sigma_exact(&k4, n)).map_err(|e| e.to_string())?;
        seen.push(format!("n={n}: {}", s.value));
        if s.value != 4 * n - 4 {
            let witness: Vec<String> = s.extremal_sequences.iter().map(|x| x.to_string()).collect();
            failures.push(format!(
                "σ(K4,{n}) = {} but 4n-4 = {}; not potentially K4 with sum {}: {}",
                s.value,
                4 * n - 4,
                s.value - 2,
                witness.join(" ")
            ));
        }
    }
    let took = start.elapsed();
    if took > Duration::from_secs(600) {
        failures.push(format!("took {took:.1?} > 10 min"));
    }
    verdict(failures, seen.join(", "))
}

fn triangle_maximizers() -> Outcome {
    let s = sigma_exact(&g("K 3"), 8).map_err(|e| e.to_string())?;
    let found: Vec<String> = s.extremal_sequences.iter().map(|x| x.to_string()).collect();
    let mut failures = Vec::new();
    if s.value != 16 {
        failures.push(format!("extremal sum is {}, not 14", s.value - 2));
    }
    for want in ["7,1^7", "4,4,1^6"] {
        if !found.iter().any(|f| f == want) {
            failures.push(format!("{want} missing from {found:?}"));
        }
    }
    verdict(failures, format!("sum 14 maximizers: {}", found.join(" ")))
}

fn target_soundness() -> Outcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    for name in CORPUS {
        let h = g(name);
        let p = profile(&h).map_err(|e| e.to_string())?;
        for n in p.k + 2..=9 {
            for i in p.alpha + 1..=p.k {
                cases += 1;
                match target_sequence(&h, i, n) {
                    Ok(t) if !t.seq.is_graphic() => {
                        failures.push(format!("{name} i={i} n={n}: {} not graphic", t.seq))
                    }
                    Ok(t) => match potentially(&t.seq, &h) {
                        Ok(c) if c.answer => {
                            failures.push(format!("{name} i={i} n={n}: {} is potentially H", t.seq))
                        }
                        Ok(_) => {}
                        Err(e) => failures.push(format!("{name} i={i} n={n}: {e}")),
                    },
                    Err(e) => failures.push(format!("{name} i={i} n={n}: {e}")),
                }
            }
        }
    }
    verdict(
        failures,
        format!("{cases} (H, i, n) cases graphic and not potentially H-graphic"),
    )
}

fn layoff_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b77);
    let mut failures = Vec::new();
    for _ in 0..1000 {
        let n = rng.gen_range(1..=9);
        let mut terms: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        terms.sort_unstable_by(|a, b| b.cmp(a));
        let seq = DegreeSequence::new(terms);
        let i = rng.gen_range(1..=n);
        let after = seq.layoff(i).map(|s| s.is_graphic()).unwrap_or(false);
        if after != seq.is_graphic() {
            failures.push(format!("{seq} at {i}"));
        }
    }
    let mut checked = 0;
    for n in 1..=7 {
        let realized = common::realized_sequences(n);
        for terms in common::nonincreasing(n) {
            checked += 1;
            let expect = realized.contains(&terms);
            if DegreeSequence::new(terms.clone()).is_graphic() != expect {
                failures.push(format!("{terms:?}: enumeration says {expect}"));
            }
        }
    }
    verdict(
        failures,
        format!("1000 random lay-offs agree; {checked} sequences with n <= 7 match enumeration"),
    )
}

fn classifier_table() -> Outcome {
    let mut failures = Vec::new();
    let mut check_sigma = |name: &str, status: Status, basis: Basis| match classify_sigma(&g(name))
    {
        Ok(v) if v.status == status && v.theorem == Some(basis) => {}
        Ok(v) => failures.push(format!("{name}: got {:?}/{:?}", v.status, v.theorem)),
        Err(e) => failures.push(format!("{name}: {e}")),
    };
    for k in 3..=6 {
        check_sigma(&format!("K {k}"), Status::NotStable, Basis::NotStable);
    }
    check_sigma("split 2 3", Status::Stable, Basis::MainLow);
    check_sigma("Kbip 2 3", Status::Stable, Basis::MainLow);
    for name in ["C 5", "C 7", "friendship 2"] {
        check_sigma(name, Status::Stable, Basis::MainHigh);
    }
    let mut check_weak = |name: &str, status: WeakStatus| match classify_weak(&g(name)) {
        Ok(v) if v.status == status => {}
        Ok(v) => failures.push(format!("{name} weak: got {:?}", v.status)),
        Err(e) => failures.push(format!("{name} weak: {e}")),
    };
    for k in 3..=6 {
        check_weak(&format!("K {k}"), WeakStatus::WeaklyStable);
    }
    check_weak("C 6", WeakStatus::NotWeaklyStable);
    verdict(failures, "13 classifications match".into())
}

fn rho_witness_quality() -> Outcome {
    let n = 9;
    let mut failures = Vec::new();
    let mut checked = Vec::new();
    for name in CORPUS {
        let h = g(name);
        if classify_sigma(&h).map_err(|e| e.to_string())?.status != Status::NotStable {
            continue;
        }
        let w = rho(&h, n).map_err(|e| e.to_string())?;
        if !w.seq.is_graphic() {
            failures.push(format!("{name}: ρ = {} not graphic", w.seq));
            continue;
        }
        if potentially(&w.seq, &h).map_err(|e| e.to_string())?.answer {
            failures.push(format!("{name}: ρ = {} is potentially H-graphic", w.seq));
        }
        let mut dists = Vec::new();
        for t in target_family(&h, n).map_err(|e| e.to_string())? {
            let d = l1_distance(&w.seq, &t.seq);
            dists.push(d);
            // d > n/3
            if 3 * d <= n {
                failures.push(format!("{name}: ‖ρ - π̃_{}‖ = {d} <= n/3", t.i));
            }
        }
        checked.push(format!("{name} ρ={} dist={dists:?}", w.seq));
    }
    if checked.is_empty() {
        failures.push("no NotStable graph in the corpus".into());
    }
    verdict(failures, checked.join("; "))
}

fn deletion_bound() -> Outcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    for name in CORPUS {
        let h = g(name);
        let p = profile(&h).map_err(|e| e.to_string())?;
        let edges = h.edges();
        if common::sigma_tilde_brute(p.k, &edges) != p.sigma_tilde {
            failures.push(format!("{name}: σ̃ disagrees with enumeration"));
        }
        for t in 0..p.k - p.alpha {
            cases += 1;
            let best = best_deleted_subgraph(&h, t).map_err(|e| e.to_string())?;
            let brute = common::deletions(p.k, &edges, t)
                .iter()
                .map(|f| common::sigma_tilde_brute(p.k - t, f))
                .min()
                .unwrap();
            if brute != best.sigma_tilde {
                failures.push(format!(
                    "{name} t={t}: enumeration gives min σ̃(F) = {brute}"
                ));
            }
            if best.sigma_tilde + 2 * t > p.sigma_tilde {
                failures.push(format!(
                    "{name} t={t}: min σ̃(F) = {} > σ̃(H) - 2t = {}",
                    best.sigma_tilde,
                    p.sigma_tilde as i64 - 2 * t as i64
                ));
            }
        }
    }
    verdict(
        failures,
        format!("{cases} (H, t) pairs satisfy σ̃(F) <= σ̃(H) - 2t"),
    )
}

#[derive(Default)]
struct ProbeTally {
    runs: usize,
    kinds: BTreeMap<&'static str, usize>,
    sum_bound_failures: usize,
    sum_bound_failures_meeting_hypothesis: usize,
    runs_meeting_hypothesis: usize,
    bad_embeddings: Vec<String>,
    off_family_targets: Vec<String>,
    unconfirmed_guards: Vec<String>,
}

fn meets_sum_hypothesis(seq: &DegreeSequence, trace: &ProbeTrace) -> bool {
    let n = Ratio::from(seq.len() as i64);
    Ratio::from(seq.sum() as i64) >= (Ratio::from(trace.sigma_tilde as i64) - trace.delta) * n
}

fn check_found(
    seq: &DegreeSequence,
    h: &SmallGraph,
    v: &ProbeVerdict,
    trace: &ProbeTrace,
) -> Result<(), String> {
    let edges = trace
        .halt
        .as_ref()
        .and_then(|halt| halt.realization_edges.clone())
        .ok_or("no realization recorded")?;
    let real = DenseGraph::from_edges(seq.len(), &edges).map_err(|e| e.to_string())?;
    if real.degrees() != seq.terms() {
        return Err("realization has the wrong degrees".into());
    }
    match v {
        ProbeVerdict::FoundH { embedding } => {
            if !real.contains_embedding(h, embedding) {
                return Err("H embedding does not verify".into());
            }
            if !potentially(seq, h).map_err(|e| e.to_string())?.answer {
                return Err("oracle says not potentially H-graphic".into());
            }
        }
        ProbeVerdict::FoundSplit {
            clique,
            independent,
            embedding,
        } => {
            let split = GraphExpr::Split(*clique, *independent)
                .build(16)
                .map_err(|e| e.to_string())?;
            if !real.contains_embedding(&split, embedding) {
                return Err("split embedding does not verify".into());
            }
            if !potentially_split(seq, *clique, *independent)
                .map_err(|e| e.to_string())?
                .answer
            {
                return Err("oracle says not potentially split-graphic".into());
            }
        }
        _ => unreachable!(),
    }
    Ok(())
}

fn probe_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut per_graph = Vec::new();
    let mut total = ProbeTally::default();
    for name in CORPUS {
        let h = g(name);
        let mut pool = Vec::new();
        for n in 8..=10 {
            let s = sigma_exact(&h, n).map_err(|e| e.to_string())?.value;
            let lo = s.saturating_sub(4);
            pool.extend(
                graphic_sequences(n)
                    .into_iter()
                    .filter(|q| (lo..=s).contains(&q.sum())),
            );
        }
        let sample: Vec<DegreeSequence> = pool.choose_multiple(&mut rng, 200).cloned().collect();
        if sample.len() < 200 {
            return Err(format!(
                "{name}: only {} near-threshold sequences",
                sample.len()
            ));
        }
        let before = total.runs;
        for seq in &sample {
            for f in [3, 5] {
                let cfg = ProbeConfig {
                    f_override: Some(f),
                    ..Default::default()
                };
                let (v, trace) =
                    run_probe(seq, &h, &cfg).map_err(|e| format!("{name} {seq}: {e}"))?;
                let tag = format!("{name} {seq} f={f}");
                total.runs += 1;
                let hyp = meets_sum_hypothesis(seq, &trace);
                total.runs_meeting_hypothesis += usize::from(hyp);
                if !trace.sum_bound_everywhere() {
                    total.sum_bound_failures += 1;
                    total.sum_bound_failures_meeting_hypothesis += usize::from(hyp);
                }
                let kind = match &v {
                    ProbeVerdict::FoundH { .. } => "FoundH",
                    ProbeVerdict::FoundSplit { .. } => "FoundSplit",
                    ProbeVerdict::CloseToTarget { .. } => "CloseToTarget",
                    ProbeVerdict::DeclaredPotential { .. } => "DeclaredPotential",
                    ProbeVerdict::Inconclusive { .. } => "Inconclusive",
                };
                *total.kinds.entry(kind).or_default() += 1;
                match &v {
                    ProbeVerdict::FoundH { .. } | ProbeVerdict::FoundSplit { .. } => {
                        if let Err(e) = check_found(seq, &h, &v, &trace) {
                            total.bad_embeddings.push(format!("{tag}: {e}"));
                        }
                    }
                    ProbeVerdict::CloseToTarget {
                        target, in_family, ..
                    } => {
                        if !in_family {
                            total
                                .off_family_targets
                                .push(format!("{tag}: π̃_{} = {}", target.i, target.seq));
                        }
                    }
                    ProbeVerdict::DeclaredPotential { reason, verified } => {
                        if *verified != Some(true) {
                            total
                                .unconfirmed_guards
                                .push(format!("{tag}: {reason:?} verified={verified:?}"));
                        }
                    }
                    ProbeVerdict::Inconclusive { .. } => {}
                }
            }
        }
        per_graph.push(format!("{name}:{}", total.runs - before));
    }
    let summary = format!(
        "{} runs ({}), verdicts {:?}; sum bound failed on {} runs, {} of them meeting σ(π) >= (σ̃-δ)n ({} runs meet it)",
        total.runs,
        per_graph.join(" "),
        total.kinds,
        total.sum_bound_failures,
        total.sum_bound_failures_meeting_hypothesis,
        total.runs_meeting_hypothesis,
    );
    let mut failures = Vec::new();
    if total.sum_bound_failures > 0 {
        failures.push(format!(
            "sum lower bound violated on {} of {} runs",
            total.sum_bound_failures, total.runs
        ));
    }
    let mut report = |what: &str, list: &[String]| {
        if !list.is_empty() {
            failures.push(format!("{what}: {} (first: {})", list.len(), list[0]));
        }
    };
    report("embeddings failing verification", &total.bad_embeddings);
    report("targets outside P(H,n)", &total.off_family_targets);
    report(
        "guard verdicts not confirmed by the oracle",
        &total.unconfirmed_guards,
    );
    match verdict(failures, summary.clone()) {
        Ok(s) => Ok(s),
        Err(e) => Err(format!("{e}; {summary}")),
    }
}

fn main() {
    type Criterion = (u32, &'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        (1, "σ(K3,n) = 2n for n in 5..=8", triangle_potential_numbers),
        (2, "σ(K4,n) = 4n-4 for n in {6,7}", k4_potential_numbers),
        (
            3,
            "(7,1^7) and (4,4,1^6) among the n=8 K3 maximizers",
            triangle_maximizers,
        ),
        (
            4,
            "π̃_i(H,n) graphic and not potentially H-graphic",
            target_soundness,
        ),
        (
            5,
            "lay-off equivalence and enumeration agreement",
            layoff_equivalence,
        ),
        (6, "classifier table", classifier_table),
        (7, "ρ(H,9) witness quality", rho_witness_quality),
        (8, "deleted-subgraph bound", deletion_bound),
        (9, "probe trace invariants", probe_invariants),
    ];
    let only: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    let mut ran = 0;
    for (id, name, run) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = panic::catch_unwind(run).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {id} PASS [{took:.1?}] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} FAIL [{took:.1?}] {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
