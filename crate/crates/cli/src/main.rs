//! `rank1lab`: run rank-one experiments and emit JSON reports.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use rank1lab::engine::{ColumnSummary, LevelSet, Tower, TransformationSpec, DEFAULT_LEVEL_CAP};
use rank1lab::presets::PresetId;
use rank1lab::properties::{
    level_return_ratio, non_wde_recursion, ratio_set_probe, wde_witness_search, witness_pair,
    Verdict, WdeMode,
};
use rank1lab::rational::{format_rational, parse_rational};
use rank1lab::spectral::{
    eigenvalue_scan, factor_map_build, gap_lemma_check, rigidity_sum, HeightSequence, Theta,
    DEFAULT_GAP_CAP,
};
use rank1lab::Error;

const SCHEMA_VERSION: &str = "rank1lab.report/1";

const EXIT_SPEC: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "rank1lab", version, about = "Exact experiments on rank-one cutting-and-stacking transformations")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Exit with status 4 when a search ends inconclusive.
    #[arg(long, global = true)]
    strict: bool,

    /// Worker threads (RANK1LAB_THREADS takes precedence).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build columns and report heights and per-stage measures.
    Build(BuildArgs),
    /// Search for a weak double ergodicity witness.
    Wde(WdeArgs),
    /// Index sets I_n(A,A), I_n(A,B) and the four-translate inclusion.
    IndexSets(IndexArgs),
    /// Probe the ratio set for cocycle values near t.
    RatioSet(RatioArgs),
    /// Minimum return ratio of the levels of C_n after h_n steps.
    ReturnBound(ReturnArgs),
    /// Grid scan of the eigenvalue sum over a height sequence.
    Spectral(SpectralArgs),
    /// Partial sums of the rigidity series at one θ.
    Rigidity(RigidityArgs),
    /// Build the circle factor map of a tower transformation.
    FactorMap(FactorMapArgs),
    /// Largest gap of the digit set Σ a_j q_j.
    GapCheck(GapArgs),
}

#[derive(Args, Debug, Clone)]
struct SpecArgs {
    /// Preset name (chacon, kakutani, hajian_kakutani, hk_plus1, hk_plus1_lambda, type_iii1, tower_from_heights).
    #[arg(long)]
    preset: Option<String>,
    /// Cut ratio for hk_plus1_lambda, as p/q.
    #[arg(long)]
    lambda: Option<String>,
    /// Even-stage ratio for type_iii1.
    #[arg(long)]
    lambda1: Option<String>,
    /// Odd-stage ratio for type_iii1.
    #[arg(long)]
    lambda2: Option<String>,
    /// Comma-separated heights (tower_from_heights, spectral commands).
    #[arg(long)]
    q: Option<String>,
    /// JSON spec file.
    #[arg(long, conflicts_with = "preset")]
    spec: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 6)]
    depth: usize,
    /// Refuse to build columns with more levels than this.
    #[arg(long, default_value_t = DEFAULT_LEVEL_CAP)]
    max_levels: usize,
}

#[derive(Args, Debug, Clone)]
struct SetArgs {
    /// Use the top level of C_1 as B and the level below it as A.
    #[arg(long, conflicts_with_all = ["a", "b"])]
    paper_sets: bool,
    /// Level set A as stage:i,j,...
    #[arg(long)]
    a: Option<String>,
    /// Level set B as stage:i,j,...
    #[arg(long)]
    b: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Stabilized,
    Truncated,
}

#[derive(Args, Debug)]
struct WdeArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    sets: SetArgs,
    /// Search 1 <= |i| <= N.
    #[arg(long = "N")]
    n_max: i64,
    #[arg(long, default_value_t = 7)]
    depth: usize,
    #[arg(long, value_enum, default_value_t = Mode::Stabilized)]
    mode: Mode,
    /// Refinement limit in truncated mode (default: depth).
    #[arg(long)]
    max_stage: Option<usize>,
}

#[derive(Args, Debug)]
struct IndexArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    sets: SetArgs,
    /// Last stage of the recursion.
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Built depth (default: n + 1).
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Args, Debug)]
struct RatioArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Target cocycle value, as p/q.
    #[arg(long)]
    t: String,
    /// Tolerance, as p/q.
    #[arg(long)]
    eps: String,
    /// Level set A as stage:i,j,... (default: the middle level of C_1).
    #[arg(long)]
    a: Option<String>,
    /// Scan 1 <= n <= N (default: h_{depth-1}).
    #[arg(long = "N")]
    n_max: Option<i64>,
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// Refinement limit (default: depth).
    #[arg(long)]
    max_stage: Option<usize>,
}

#[derive(Args, Debug)]
struct ReturnArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Column whose levels are returned.
    #[arg(long)]
    n: usize,
}

#[derive(Args, Debug)]
struct SpectralArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Number of terms.
    #[arg(long = "N", default_value_t = 20)]
    terms: usize,
    #[arg(long, default_value_t = 65536)]
    grid: u64,
    #[arg(long, default_value_t = 0.1)]
    threshold: f64,
}

#[derive(Args, Debug)]
struct RigidityArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// p/q, a decimal, or "golden".
    #[arg(long)]
    theta: String,
    #[arg(long = "N", default_value_t = 20)]
    terms: usize,
    /// 1 for chord distance, 2 for its square.
    #[arg(long, default_value_t = 1)]
    exponent: u32,
    /// Tail threshold for the convergence flag.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
}

#[derive(Args, Debug)]
struct FactorMapArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    theta: String,
    /// Stages built (default: all the heights allow; 6 for specs).
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Args, Debug)]
struct GapArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// First index, 1-based.
    #[arg(long = "L", default_value_t = 1)]
    l: usize,
    /// Last index (default: the last height).
    #[arg(long = "M")]
    m: Option<usize>,
    /// Enumeration size cap.
    #[arg(long, default_value_t = DEFAULT_GAP_CAP)]
    cap: u64,
    /// Heights h_0..=h_depth when a spec is used instead of --q.
    #[arg(long, default_value_t = 6)]
    depth: usize,
}

/// A finished command: the report body plus a one-line summary.
struct Run {
    spec: Value,
    config: Value,
    report: Value,
    summary: String,
    inconclusive: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads(cli.threads) {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_SPEC);
    }
    let run = match dispatch(&cli.command) {
        Ok(run) => run,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command_name(&cli.command),
        "spec": run.spec,
        "config": run.config,
        "report": run.report,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("report serialises");
    text.push('\n');
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(EXIT_SPEC);
            }
        }
        None => print!("{text}"),
    }
    eprintln!("{}", run.summary);
    if cli.strict && run.inconclusive {
        eprintln!("strict mode: result is inconclusive");
        return ExitCode::from(EXIT_INCONCLUSIVE);
    }
    ExitCode::SUCCESS
}

fn configure_threads(flag: Option<usize>) -> anyhow::Result<()> {
    let threads = match std::env::var("RANK1LAB_THREADS") {
        Ok(v) if !v.trim().is_empty() => Some(
            v.trim()
                .parse::<usize>()
                .with_context(|| format!("RANK1LAB_THREADS={v:?} is not a thread count"))?,
        ),
        _ => flag,
    };
    if let Some(n) = threads {
        if n == 0 {
            bail!("thread count must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Resource { .. }) => EXIT_RESOURCE,
        Some(Error::Unresolved { .. }) => EXIT_INCONCLUSIVE,
        _ => EXIT_SPEC,
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Build(_) => "build",
        Command::Wde(_) => "wde",
        Command::IndexSets(_) => "index-sets",
        Command::RatioSet(_) => "ratio-set",
        Command::ReturnBound(_) => "return-bound",
        Command::Spectral(_) => "spectral",
        Command::Rigidity(_) => "rigidity",
        Command::FactorMap(_) => "factor-map",
        Command::GapCheck(_) => "gap-check",
    }
}

fn dispatch(c: &Command) -> anyhow::Result<Run> {
    match c {
        Command::Build(a) => cmd_build(a),
        Command::Wde(a) => cmd_wde(a),
        Command::IndexSets(a) => cmd_index_sets(a),
        Command::RatioSet(a) => cmd_ratio_set(a),
        Command::ReturnBound(a) => cmd_return_bound(a),
        Command::Spectral(a) => cmd_spectral(a),
        Command::Rigidity(a) => cmd_rigidity(a),
        Command::FactorMap(a) => cmd_factor_map(a),
        Command::GapCheck(a) => cmd_gap_check(a),
    }
}

// spec resolution ------------------------------------------------------------

fn resolve_spec(s: &SpecArgs) -> anyhow::Result<TransformationSpec> {
    if let Some(path) = &s.spec {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Spec(format!("reading {}: {e}", path.display())))?;
        return Ok(TransformationSpec::from_json_str(&text)?);
    }
    let Some(name) = &s.preset else {
        return Err(Error::Spec("give --preset or --spec".into()).into());
    };
    let mut params = Map::new();
    for (key, val) in [("lambda", &s.lambda), ("lambda1", &s.lambda1), ("lambda2", &s.lambda2)] {
        if let Some(v) = val {
            params.insert(key.into(), json!(v));
        }
    }
    if let Some(q) = &s.q {
        let seq = HeightSequence::parse_list(q)?;
        params.insert("q".into(), seq.to_json());
    }
    Ok(rank1lab::preset(PresetId::from_name_params(name, &params)?)?)
}

fn tower(spec: &TransformationSpec, depth: usize, cap: usize) -> anyhow::Result<Tower> {
    let mut t = Tower::with_level_cap(spec.clone(), cap);
    t.extend_to(depth)?;
    Ok(t)
}

/// `--q` when given (and no preset), otherwise `h_from..=h_to` of the spec.
fn heights(s: &SpecArgs, from: usize, to: usize) -> anyhow::Result<(HeightSequence, Value)> {
    if s.preset.is_none() && s.spec.is_none() {
        let Some(q) = &s.q else {
            return Err(Error::Spec("give --q, --preset or --spec".into()).into());
        };
        let seq = HeightSequence::parse_list(q)?;
        let v = json!({ "heights": seq.to_json() });
        return Ok((seq, v));
    }
    let spec = resolve_spec(s)?;
    let all = spec.heights(to)?;
    let seq = HeightSequence::new(all[from..].to_vec())?;
    Ok((seq, spec.to_json()))
}

fn level_set(text: &str) -> anyhow::Result<LevelSet> {
    Ok(text.parse::<LevelSet>()?)
}

fn pair(t: &Tower, sets: &SetArgs) -> anyhow::Result<(LevelSet, LevelSet)> {
    if sets.paper_sets {
        return Ok(witness_pair(t)?);
    }
    match (&sets.a, &sets.b) {
        (Some(a), Some(b)) => Ok((level_set(a)?, level_set(b)?)),
        _ => Err(Error::Spec("give --paper-sets or both --a and --b".into()).into()),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serialises")
}

// commands -------------------------------------------------------------------

fn cmd_build(a: &BuildArgs) -> anyhow::Result<Run> {
    let spec = resolve_spec(&a.spec)?;
    let t = tower(&spec, a.depth, a.max_levels)?;
    let columns: Vec<ColumnSummary> = t.columns().iter().map(ColumnSummary::from).collect();
    let heights = t.heights();
    Ok(Run {
        spec: spec.to_json(),
        config: json!({ "depth": a.depth, "max_levels": a.max_levels }),
        report: json!({ "heights": heights, "columns": to_value(&columns) }),
        summary: format!("built C_0..C_{}: heights {heights:?}", a.depth),
        inconclusive: false,
    })
}

fn cmd_wde(a: &WdeArgs) -> anyhow::Result<Run> {
    let spec = resolve_spec(&a.spec)?;
    let t = tower(&spec, a.depth, DEFAULT_LEVEL_CAP)?;
    let (sa, sb) = pair(&t, &a.sets)?;
    let mode = match a.mode {
        Mode::Stabilized => WdeMode::Stabilized,
        Mode::Truncated => WdeMode::Truncated {
            max_stage: a.max_stage.unwrap_or(a.depth),
        },
    };
    let r = wde_witness_search(&t, &sa, &sb, a.n_max, mode)?;
    let summary = format!(
        "wde A = {sa}, B = {sb}, |i| <= {}: {} ({} witnesses, unresolved {})",
        a.n_max,
        r.verdict.as_str(),
        r.witnesses.len(),
        format_rational(&r.unresolved_measure)
    );
    Ok(Run {
        spec: spec.to_json(),
        config: json!({
            "depth": a.depth,
            "N": a.n_max,
            "a": sa.to_string(),
            "b": sb.to_string(),
            "mode": to_value(&mode),
        }),
        report: to_value(&r),
        summary,
        inconclusive: r.verdict == Verdict::Inconclusive,
    })
}

fn cmd_index_sets(a: &IndexArgs) -> anyhow::Result<Run> {
    let spec = resolve_spec(&a.spec)?;
    let depth = a.depth.unwrap_or(a.n + 1);
    let t = tower(&spec, depth, DEFAULT_LEVEL_CAP)?;
    let (sa, sb) = pair(&t, &a.sets)?;
    let r = non_wde_recursion(&t, &sa, &sb, a.n)?;
    let summary = format!(
        "index sets A = {sa}, B = {sb}, n <= {}: all I_n empty {}, inclusions hold {}, I_1(A,B) = {:?}",
        a.n, r.all_empty, r.all_inclusions_hold, r.i1_ab
    );
    Ok(Run {
        spec: spec.to_json(),
        config: json!({ "n": a.n, "depth": depth, "a": sa.to_string(), "b": sb.to_string() }),
        report: to_value(&r),
        summary,
        inconclusive: false,
    })
}

fn cmd_ratio_set(a: &RatioArgs) -> anyhow::Result<Run> {
    let spec = resolve_spec(&a.spec)?;
    let t = tower(&spec, a.depth, DEFAULT_LEVEL_CAP)?;
    let target = parse_rational(&a.t)?;
    let eps = parse_rational(&a.eps)?;
    let set = match &a.a {
        Some(s) => level_set(s)?,
        None => {
            let k = 1.min(a.depth);
            LevelSet::level(k, t.height(k)? / 2)
        }
    };
    let n_max = match a.n_max {
        Some(n) => n,
        None => t.height(a.depth.saturating_sub(1))? as i64,
    };
    let max_stage = a.max_stage.unwrap_or(a.depth);
    let r = ratio_set_probe(&t, &set, &target, &eps, n_max, max_stage)?;
    let summary = format!(
        "ratio set near {} ± {} on {set}, n <= {n_max}: {} hits, {} distinct values{}",
        format_rational(&target),
        format_rational(&eps),
        r.hits.len(),
        r.observed_values.len(),
        if r.inconclusive { ", some mass unresolved" } else { "" }
    );
    Ok(Run {
        spec: spec.to_json(),
        config: json!({
            "t": format_rational(&target),
            "eps": format_rational(&eps),
            "a": set.to_string(),
            "N": n_max,
            "depth": a.depth,
            "max_stage": max_stage,
        }),
        report: to_value(&r),
        summary,
        inconclusive: r.inconclusive,
    })
}

fn cmd_return_bound(a: &ReturnArgs) -> anyhow::Result<Run> {
    let spec = resolve_spec(&a.spec)?;
    let t = tower(&spec, a.n + 1, DEFAULT_LEVEL_CAP)?;
    let r = level_return_ratio(&t, a.n)?;
    let summary = format!(
        "return ratio over C_{} (h = {}): image side {}, returning mass {}",
        a.n,
        r.height,
        format_rational(&r.ratio),
        format_rational(&r.source_ratio)
    );
    Ok(Run {
        spec: spec.to_json(),
        config: json!({ "n": a.n }),
        report: to_value(&r),
        summary,
        inconclusive: false,
    })
}

fn cmd_spectral(a: &SpectralArgs) -> anyhow::Result<Run> {
    let (q, spec) = heights(&a.spec, 1, a.terms)?;
    let r = eigenvalue_scan(&q, a.grid, a.terms, a.threshold)?;
    let summary = format!(
        "spectral scan N = {}, grid {}: {} candidates below {}, grid minimum {:.6} at θ = {}",
        a.terms,
        a.grid,
        r.candidates.len(),
        a.threshold,
        r.grid_minimum.partial_sum,
        r.grid_minimum.theta.exact()
    );
    Ok(Run {
        spec,
        config: json!({ "N": a.terms, "grid": a.grid, "threshold": a.threshold }),
        report: to_value(&r),
        summary,
        inconclusive: false,
    })
}

fn cmd_rigidity(a: &RigidityArgs) -> anyhow::Result<Run> {
    let (q, spec) = heights(&a.spec, 1, a.terms)?;
    let theta: Theta = a.theta.parse()?;
    let r = rigidity_sum(&q, &theta, a.terms, a.exponent, a.tolerance)?;
    let summary = format!(
        "rigidity sum p = {} at θ = {}: total {:.6e}, converged-looking {}",
        a.exponent,
        theta.exact(),
        r.total(),
        r.converged_looking
    );
    Ok(Run {
        spec,
        config: json!({
            "theta": theta.exact(),
            "N": a.terms,
            "exponent": a.exponent,
            "tolerance": a.tolerance,
        }),
        report: to_value(&r),
        summary,
        inconclusive: false,
    })
}

fn cmd_factor_map(a: &FactorMapArgs) -> anyhow::Result<Run> {
    let (q, spec) = heights(&a.spec, 0, a.depth.unwrap_or(6))?;
    let depth = a.depth.unwrap_or(q.len() - 1);
    let theta: Theta = a.theta.parse()?;
    let r = factor_map_build(&q, &theta, depth)?;
    let worst = r
        .stages
        .iter()
        .map(|s| s.delta_sup - s.bound)
        .fold(f64::NEG_INFINITY, f64::max);
    let summary = format!(
        "factor map θ = {}, {} stages: max(delta_sup - bound) = {worst:.3e}, equivariance residual {}",
        theta.exact(),
        r.stages.len(),
        r.equivariance_residual
    );
    Ok(Run {
        spec,
        config: json!({ "theta": theta.exact(), "depth": depth }),
        report: to_value(&r),
        summary,
        inconclusive: false,
    })
}

fn cmd_gap_check(a: &GapArgs) -> anyhow::Result<Run> {
    let (q, spec) = heights(&a.spec, 0, a.depth)?;
    let m = a.m.unwrap_or(q.len());
    let r = gap_lemma_check(&q, a.l, m, a.cap)?;
    let summary = format!(
        "gap check L = {}, M = {m}: {} sums, max gap {} vs q_L = {}: {}",
        a.l,
        r.set_size,
        r.max_gap,
        r.q_l,
        if r.holds { "holds" } else { "fails" }
    );
    Ok(Run {
        spec,
        config: json!({ "L": a.l, "M": m, "cap": a.cap }),
        report: to_value(&r),
        summary,
        inconclusive: false,
    })
}
