use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_rational::Ratio;
use serde_json::{json, Value};

use potstab::oracle::{potentially_with, sigma_exact_with, Caps, DEFAULT_MAX_N};
use potstab::potential::{family_from_profile, profile, rho, target_sequence, PotentialProfile};
use potstab::probe::{run_probe, ProbeConfig, ProbeTrace, ProbeVerdict};
use potstab::stability::{classify_sigma, classify_weak_with};
use potstab::{l1_distance, DegreeSequence, Error, SmallGraph};

/// Potential functions, extremal sequences and stability of small graphs.
///
/// GRAPH is a generator expression such as `join(K 2, Kbar 3)`, or `@FILE`
/// naming a file holding an expression or an edge list. SEQ is a degree
/// sequence such as `4,4,1^6`. Vertices and positions are printed 1-based.
#[derive(Debug, Parser)]
#[command(name = "potstab", version)]
struct Cli {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,

    /// Largest sequence length handed to the exhaustive oracle.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_N)]
    cap_n: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Profile, σ-stability and weak σ-stability of a graph.
    Analyze { graph: String },
    /// Build an extremal sequence for a graph.
    Build {
        graph: String,
        #[command(subcommand)]
        kind: BuildKind,
    },
    /// Decide whether SEQ has a realization containing GRAPH.
    Check { seq: String, graph: String },
    /// Exact potential number σ(GRAPH, N) by exhaustive search.
    Sigma {
        graph: String,
        n: usize,
        /// Worker threads for the search (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the iterative lay-off algorithm on SEQ.
    Probe {
        seq: String,
        graph: String,
        /// Replace f(k) in the Step 1 halting test.
        #[arg(long)]
        f_override: Option<usize>,
        /// Rational such as `1/2000` or `0.0005`.
        #[arg(long)]
        delta: Option<String>,
        #[arg(long, default_value = "1/4")]
        epsilon: String,
        /// Emit the trace as JSON lines, one record per step.
        #[arg(long)]
        trace: bool,
        /// Never consult the exhaustive oracle.
        #[arg(long)]
        no_oracle: bool,
    },
    /// ℓ¹ distance between two sequences.
    Dist { a: String, b: String },
}

#[derive(Debug, Subcommand)]
enum BuildKind {
    /// π̃_i(H, n).
    #[command(name = "pi_tilde")]
    PiTilde { i: usize, n: usize },
    /// ρ(H, n).
    Rho { n: usize },
    /// Every member of P(H, n).
    Family { n: usize },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error, Option<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e, None)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Lib(Error::CapExceeded { .. }, _) => 2,
            Failure::Lib(Error::Invariant(_), _) => 3,
            Failure::Lib(..) => 1,
        }
    }

    fn report(&self) -> String {
        match self {
            Failure::Usage(msg) => format!("error: {msg}"),
            Failure::Lib(e @ Error::Parse { pos, .. }, Some(input)) => {
                format!("error: {e}\n  {input}\n  {}^", " ".repeat(*pos))
            }
            Failure::Lib(e, _) => format!("error: {e}"),
        }
    }
}

type Outcome = Result<String, Failure>;

fn with_input<T>(r: potstab::Result<T>, input: &str) -> Result<T, Failure> {
    r.map_err(|e| Failure::Lib(e, Some(input.to_string())))
}

fn load_graph(arg: &str) -> Result<SmallGraph, Failure> {
    match arg.strip_prefix('@') {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Lib(e.into(), None))?;
            with_input(text.trim().parse(), text.trim())
        }
        None => with_input(arg.parse(), arg),
    }
}

fn load_seq(arg: &str) -> Result<DegreeSequence, Failure> {
    with_input(arg.parse(), arg)
}

fn parse_rational(text: &str) -> Result<Ratio<i64>, Failure> {
    let bad = || Failure::Usage(format!("cannot read `{text}` as a rational"));
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = 10i64.pow(frac.len() as u32);
        let whole: i64 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let frac: i64 = frac.parse().map_err(|_| bad())?;
        return Ok(Ratio::new(whole * scale + frac, scale));
    }
    text.parse().map_err(|_| bad())
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

fn edges_one_based(edges: &[(usize, usize)]) -> Vec<[usize; 2]> {
    edges.iter().map(|&(u, v)| [u + 1, v + 1]).collect()
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialize")
}

fn family_pattern(p: &PotentialProfile) -> Vec<String> {
    p.maximizers()
        .into_iter()
        .map(|i| {
            let head = p.k - i;
            let tail = head + p.nabla[&i] - 1;
            format!("π̃_{i}(H,n) = ((n-1)^{head}, {tail}^(n-{head}))")
        })
        .collect()
}

fn analyze(graph: &str, as_json: bool) -> Outcome {
    let h = load_graph(graph)?;
    let p = profile(&h)?;
    let sigma = classify_sigma(&h)?;
    let weak = classify_weak_with(&h, &sigma);
    let family = family_pattern(&p);
    if as_json {
        return Ok(pretty(&json!({
            "graph": graph,
            "profile": p,
            "sigma": sigma,
            "weak": weak,
            "family": family,
        })));
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "order k = {}, independence number α = {}",
        p.k, p.alpha
    );
    for (i, d) in &p.nabla {
        let _ = writeln!(out, "  i = {i}: ∇ = {d}, σ̃_i = {}", p.sigma_tilde_i[i]);
    }
    let _ = writeln!(
        out,
        "σ̃ = {}, i* = {}, {:?}, b_H = {}",
        p.sigma_tilde, p.i_star, p.type_flag, p.b_h
    );
    for f in &family {
        let _ = writeln!(out, "{f}");
    }
    let _ = write!(out, "σ-stability: {:?}", sigma.status);
    if let Some(t) = sigma.theorem {
        let _ = write!(out, " ({t:?})");
    }
    if let Some(c) = sigma.cover_b1_b2 {
        let _ = write!(out, ", double-star cover {c:?}");
    }
    if let Some(w) = &sigma.witness_sequence_pattern {
        let _ = write!(out, ", witness {w}");
    }
    if let Some(note) = &sigma.note {
        let _ = write!(out, "; {note}");
    }
    let _ = write!(out, "\nweak σ-stability: {:?}", weak.status);
    if let Some(b) = weak.basis {
        let _ = write!(out, " ({b:?})");
    }
    if let Some(note) = &weak.note {
        let _ = write!(out, "; {note}");
    }
    Ok(out)
}

fn build(graph: &str, kind: &BuildKind, as_json: bool) -> Outcome {
    let h = load_graph(graph)?;
    match kind {
        BuildKind::PiTilde { i, n } => {
            let t = target_sequence(&h, *i, *n)?;
            Ok(if as_json {
                pretty(&json!(t))
            } else {
                t.seq.to_string()
            })
        }
        BuildKind::Rho { n } => {
            let w = rho(&h, *n)?;
            Ok(if as_json {
                pretty(&json!(w))
            } else {
                w.seq.to_string()
            })
        }
        BuildKind::Family { n } => {
            let fam = family_from_profile(&profile(&h)?, *n)?;
            if as_json {
                return Ok(pretty(&json!(fam)));
            }
            Ok(fam
                .iter()
                .map(|t| format!("i={}: {}", t.i, t.seq))
                .collect::<Vec<_>>()
                .join("\n"))
        }
    }
}

fn check(seq: &str, graph: &str, caps: &Caps, as_json: bool) -> Outcome {
    let s = load_seq(seq)?;
    let h = load_graph(graph)?;
    let cert = potentially_with(&s, &h, caps)?;
    let embedding = cert.embedding.as_deref().map(one_based);
    let realization = cert
        .realization
        .as_ref()
        .map(|r| edges_one_based(&r.graph.edges()));
    if as_json {
        return Ok(pretty(&json!({
            "sequence": s,
            "potentially": cert.answer,
            "embedding": embedding,
            "realization": realization,
            "placements": cert.stats.placements,
            "residualNodes": cert.stats.residual_nodes,
        })));
    }
    let mut out = format!("potentially: {}", cert.answer);
    if let (Some(e), Some(r)) = (embedding, realization) {
        let _ = write!(out, "\nembedding: {e:?}\nrealization edges: {r:?}");
    }
    Ok(out)
}

fn sigma(graph: &str, n: usize, threads: Option<usize>, caps: &Caps, as_json: bool) -> Outcome {
    let h = load_graph(graph)?;
    let run = || sigma_exact_with(&h, n, caps);
    let s = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Failure::Usage(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    let maximizers: Vec<String> = s.extremal_sequences.iter().map(|x| x.to_string()).collect();
    if as_json {
        return Ok(pretty(&json!({
            "graph": graph,
            "n": s.n,
            "value": s.value,
            "maximizers": maximizers,
            "evaluated": s.evaluated,
        })));
    }
    let mut out = s.value.to_string();
    if !maximizers.is_empty() {
        let _ = write!(
            out,
            "\nnot potentially H-graphic at sum {}: {}",
            s.value - 2,
            maximizers.join(" ")
        );
    }
    Ok(out)
}

/// Shifts every vertex-valued field to 1-based numbering.
fn one_based_json(v: &mut Value) {
    fn bump(v: &mut Value) {
        match v {
            Value::Number(n) => *v = json!(n.as_u64().unwrap_or(0) + 1),
            Value::Array(items) => items.iter_mut().for_each(bump),
            _ => {}
        }
    }
    match v {
        Value::Object(map) => {
            for (key, field) in map.iter_mut() {
                if matches!(key.as_str(), "embedding" | "realizationEdges" | "fVertices") {
                    bump(field);
                } else {
                    one_based_json(field);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(one_based_json),
        _ => {}
    }
}

fn verdict_json(v: &ProbeVerdict) -> Value {
    let mut j = json!(v);
    one_based_json(&mut j);
    j
}

fn trace_json(trace: &ProbeTrace) -> Value {
    let mut j = json!(trace);
    one_based_json(&mut j);
    j
}

fn trace_lines(trace: &ProbeTrace, v: &ProbeVerdict) -> Vec<Value> {
    let mut header = trace_json(trace);
    let obj = header.as_object_mut().expect("trace is an object");
    let mut take = |key: &str| obj.remove(key).filter(|x| !x.is_null());
    let (init, iterations, halt, accounting, refinement) = (
        take("init"),
        take("iterations"),
        take("halt"),
        take("accounting"),
        take("refinement"),
    );
    let mut lines = vec![json!({"record": "header", "data": header})];
    lines.extend(init.map(|d| json!({"record": "init", "data": d})));
    if let Some(Value::Array(its)) = iterations {
        lines.extend(
            its.into_iter()
                .map(|d| json!({"record": "iteration", "data": d})),
        );
    }
    lines.extend(halt.map(|d| json!({"record": "halt", "data": d})));
    lines.extend(accounting.map(|d| json!({"record": "accounting", "data": d})));
    lines.extend(refinement.map(|d| json!({"record": "refinement", "data": d})));
    lines.push(json!({"record": "verdict", "data": verdict_json(v)}));
    lines
}

fn describe(v: &ProbeVerdict) -> String {
    match v {
        ProbeVerdict::FoundH { embedding } => {
            format!("found H: embedding {:?}", one_based(embedding))
        }
        ProbeVerdict::FoundSplit {
            clique,
            independent,
            embedding,
        } => format!(
            "found K_{clique} ∨ K̄_{independent}: embedding {:?}",
            one_based(embedding)
        ),
        ProbeVerdict::CloseToTarget {
            target,
            distance,
            in_family,
            within_epsilon,
        } => format!(
            "close to π̃_{}(H,{}) = {}: distance {distance}{}{}",
            target.i,
            target.n,
            target.seq,
            if *in_family {
                ""
            } else {
                " (target not in P(H,n))"
            },
            if *within_epsilon {
                ""
            } else {
                " (not below εn)"
            },
        ),
        ProbeVerdict::DeclaredPotential { reason, verified } => format!(
            "declared potentially H-graphic ({reason:?}), oracle: {}",
            match verified {
                Some(true) => "confirmed",
                Some(false) => "REFUTED",
                None => "not run",
            }
        ),
        ProbeVerdict::Inconclusive { reason } => format!("inconclusive: {reason}"),
    }
}

#[allow(clippy::too_many_arguments)]
fn probe(
    seq: &str,
    graph: &str,
    f_override: Option<usize>,
    delta: Option<&str>,
    epsilon: &str,
    trace: bool,
    no_oracle: bool,
    caps: &Caps,
    as_json: bool,
) -> Outcome {
    let s = load_seq(seq)?;
    let h = load_graph(graph)?;
    let cfg = ProbeConfig {
        epsilon: parse_rational(epsilon)?,
        delta: delta.map(parse_rational).transpose()?,
        f_override,
        oracle_fallback: !no_oracle,
        caps: *caps,
    };
    let (v, tr) = run_probe(&s, &h, &cfg)?;
    if trace {
        let lines: Vec<String> = trace_lines(&tr, &v).iter().map(|l| l.to_string()).collect();
        return Ok(lines.join("\n"));
    }
    if as_json {
        return Ok(pretty(
            &json!({"verdict": verdict_json(&v), "trace": trace_json(&tr)}),
        ));
    }
    let mut out = String::new();
    for w in &tr.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    let _ = writeln!(out, "δ = {}, ε = {}, f = {}", tr.delta, tr.epsilon, tr.f);
    for it in &tr.iterations {
        let _ = writeln!(
            out,
            "t = {}: n_t = {}, π = {}{}",
            it.t,
            it.n_t,
            it.pi_t,
            it.halting_reason
                .as_deref()
                .map(|r| format!(" [halt: {r}]"))
                .unwrap_or_default()
        );
    }
    out.push_str(&describe(&v));
    Ok(out)
}

fn dist(a: &str, b: &str, as_json: bool) -> Outcome {
    let (x, y) = (load_seq(a)?, load_seq(b)?);
    let d = l1_distance(&x, &y);
    Ok(if as_json {
        pretty(&json!({"distance": d}))
    } else {
        d.to_string()
    })
}

fn run(cli: Cli) -> Outcome {
    let caps = Caps {
        max_n: cli.cap_n,
        ..Caps::default()
    };
    let j = cli.json;
    match &cli.command {
        Command::Analyze { graph } => analyze(graph, j),
        Command::Build { graph, kind } => build(graph, kind, j),
        Command::Check { seq, graph } => check(seq, graph, &caps, j),
        Command::Sigma { graph, n, threads } => sigma(graph, *n, *threads, &caps, j),
        Command::Probe {
            seq,
            graph,
            f_override,
            delta,
            epsilon,
            trace,
            no_oracle,
        } => probe(
            seq,
            graph,
            *f_override,
            delta.as_deref(),
            epsilon,
            *trace,
            *no_oracle,
            &caps,
            j,
        ),
        Command::Dist { a, b } => dist(a, b, j),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{out}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
                _ => ExitCode::SUCCESS,
            }
        }
        Err(f) => {
            eprintln!("{}", f.report());
            ExitCode::from(f.exit_code())
        }
    }
}
