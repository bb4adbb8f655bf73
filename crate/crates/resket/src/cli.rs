//! The `resket` command line.

use std::ffi::OsString;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use resket_core::hardness::{
    detect_triangle_via_resistance, detect_triangle_via_spectral_sum, ReductionParams, ResistanceEstimator,
};
use resket_core::oracle::DEFAULT_DENSE_CAP;
use resket_core::{
    gen_expander, BoostedResistanceSketch, DenseOracle, SketchConfig, SketchSpectra, SpectralFunction, SpectralSketch,
};
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::format;
use crate::io::{format_edge_list, load_graph, parse_pairs, read_text, LabeledGraph};
use crate::random;
use crate::verify;

pub const DENSE_CAP_ENV: &str = "RESKET_DENSE_CAP";

#[derive(Debug, Parser)]
#[command(name = "resket", version, about = "Effective-resistance sketches for expander graphs")]
pub struct Cli {
    /// Worker threads for sketch construction and reduction trials.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Tsv)]
    pub format: OutputFormat,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Tsv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Constants {
    #[arg(long)]
    pub c_s: Option<f64>,
    #[arg(long)]
    pub c_rep: Option<f64>,
    #[arg(long)]
    pub c_boost: Option<f64>,
}

impl Constants {
    fn config(&self) -> CliResult<SketchConfig> {
        let mut cfg = SketchConfig::default();
        if let Some(v) = self.c_s {
            cfg.c_s = v;
        }
        if let Some(v) = self.c_rep {
            cfg.c_rep = v;
        }
        if let Some(v) = self.c_boost {
            cfg.c_boost = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorKind {
    Exact,
    Sketch,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Random connected d-regular graph as an edge list.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build a boosted resistance sketch of a graph (requires --out).
    Sketch {
        graph: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        constants: Constants,
    },
    /// Resistance estimates for vertex pairs, as `a b value`.
    Query {
        sketch: PathBuf,
        /// File of `a b` lines; `-` reads stdin.
        pairs: Option<PathBuf>,
        /// A single pair `a,b`; may repeat.
        #[arg(long = "pair", value_parser = parse_pair_arg)]
        pair: Vec<(u64, u64)>,
        /// Append the exact resistance computed densely from this graph.
        #[arg(long)]
        oracle: Option<PathBuf>,
    },
    /// Batched estimates, for the sketched edge set or a pair file.
    EstimateAll {
        sketch: PathBuf,
        #[arg(long)]
        edges: bool,
        pairs: Option<PathBuf>,
    },
    /// Run property suites and report margins.
    Verify {
        /// Suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 30)]
        n_max: usize,
        #[arg(long, default_value_t = 50)]
        seeds: u64,
    },
    /// Triangle detection through a resistance or spectral-sum estimator.
    Reduce {
        graph: PathBuf,
        /// `resistance` or `spectral:<f>` with f one of schatten_3,
        /// schatten_<p>, svd_entropy, log_det, trace_exp.
        #[arg(long, default_value = "resistance")]
        mode: String,
        #[arg(long, default_value_t = 60)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.3)]
        alpha: f64,
        #[arg(long, default_value_t = 0.01)]
        c_red: f64,
        /// Constant inside the logarithm of the spectral-sum step size.
        #[arg(long, default_value_t = 2.0)]
        alpha_const: f64,
        #[arg(long, value_enum, default_value_t = EstimatorKind::Exact)]
        estimator: EstimatorKind,
        /// Sketch accuracy when `--estimator sketch`.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Disable the adversarial perturbation of exact resistances.
        #[arg(long)]
        no_perturb: bool,
        /// Also write per-trial JSON lines here.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Build time, query latency and sketch size across an ε grid.
    Bench {
        graph: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05")]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        queries: usize,
        #[command(flatten)]
        constants: Constants,
    },
}

fn parse_pair_arg(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `a,b`")?;
    let p = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("`{t}` is not a vertex id"));
    Ok((p(a)?, p(b)?))
}

/// Parses arguments, runs, prints errors, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?
            .install(|| dispatch(cli)),
        None => dispatch(cli),
    }
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Output { path: p.clone(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dense_cap() -> CliResult<usize> {
    match std::env::var(DENSE_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{DENSE_CAP_ENV} must be a non-negative integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_DENSE_CAP),
    }
}

fn check_eps(eps: f64) -> CliResult<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--eps must lie in (0, 1), got {eps}")))
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Gen { n, d, seed } => {
            let g = LabeledGraph::identity(gen_expander(*n, *d, *seed)?);
            emit(cli, &format_edge_list(&g))
        }
        Command::Sketch {
            graph,
            eps,
            seed,
            constants,
        } => cmd_sketch(cli, graph, *eps, *seed, constants),
        Command::Query { sketch, pairs, pair, oracle } => {
            let mut wanted = pair.clone();
            if let Some(p) = pairs {
                wanted.extend(read_pairs(p)?);
            }
            if wanted.is_empty() && pairs.is_none() {
                return Err(CliError::Usage("give a pair file or at least one --pair".into()));
            }
            cmd_query(cli, sketch, Some(wanted), oracle.as_deref())
        }
        Command::EstimateAll { sketch, edges, pairs } => match (edges, pairs) {
            (true, None) => cmd_query(cli, sketch, None, None),
            (false, Some(p)) => cmd_query(cli, sketch, Some(read_pairs(p)?), None),
            _ => Err(CliError::Usage("give exactly one of --edges or a pair file".into())),
        },
        Command::Verify { suite, n_max, seeds } => cmd_verify(cli, suite, *n_max, *seeds),
        Command::Reduce { .. } => cmd_reduce(cli),
        Command::Bench {
            graph,
            eps,
            seed,
            queries,
            constants,
        } => cmd_bench(cli, graph, eps, *seed, *queries, constants),
    }
}

fn read_pairs(p: &Path) -> CliResult<Vec<(u64, u64)>> {
    if p.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|source| CliError::Input { path: p.to_path_buf(), source })?;
        parse_pairs(&s)
    } else {
        parse_pairs(&read_text(p)?)
    }
}

fn cmd_sketch(cli: &Cli, graph: &Path, eps: f64, seed: u64, constants: &Constants) -> CliResult<()> {
    check_eps(eps)?;
    let out = cli
        .out
        .as_ref()
        .ok_or_else(|| CliError::Usage("sketch writes a binary file; pass --out".into()))?;
    let cfg = constants.config()?;
    let g = load_graph(graph)?;
    let start = Instant::now();
    let sk = BoostedResistanceSketch::build(&g.graph, eps, &cfg, seed)?;
    let elapsed = start.elapsed().as_secs_f64();
    let bytes = format::encode_boosted(&sk, &g.ids);
    std::fs::write(out, &bytes).map_err(|source| CliError::Output { path: out.clone(), source })?;
    let first = &sk.copies()[0].to_parts();
    let summary = json!({
        "n": g.graph.n(), "m": g.graph.m(), "eps": eps, "seed": seed,
        "copies": sk.copies().len(), "s": first.s, "t": first.t,
        "kappa_bar": first.kappa_bar, "bytes": bytes.len(), "build_seconds": elapsed,
    });
    match cli.format {
        OutputFormat::Json => println!("{summary}"),
        OutputFormat::Tsv => {
            for (k, v) in summary.as_object().unwrap() {
                println!("{k}\t{v}");
            }
        }
    }
    Ok(())
}

/// A loaded sketch of either kind, with original vertex ids.
enum Loaded {
    Boosted(BoostedResistanceSketch),
    Single(SpectralSketch),
}

fn load_sketch(path: &Path) -> CliResult<(Loaded, Vec<u64>)> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Input { path: path.to_path_buf(), source })?;
    match format::sniff(&bytes) {
        Some(format::BOOSTED_MAGIC) => {
            let (sk, ids) = format::decode_boosted(&bytes)?;
            Ok((Loaded::Boosted(sk), ids))
        }
        Some(format::SDD_MAGIC) => {
            let sk = format::decode_sketch(&bytes)?;
            let ids = (0..sk.n() as u64).collect();
            Ok((Loaded::Single(sk), ids))
        }
        Some(format::PSD_MAGIC) => Err(CliError::Usage(
            "PSD sketches answer quadratic-form queries, not vertex pairs".into(),
        )),
        _ => Err(format::decode_boosted(&bytes).map(|_| ()).unwrap_err().into()),
    }
}

fn cmd_query(cli: &Cli, path: &Path, pairs: Option<Vec<(u64, u64)>>, oracle: Option<&Path>) -> CliResult<()> {
    let (sk, ids) = load_sketch(path)?;
    let index = |id: u64| {
        ids.binary_search(&id).map_err(|_| {
            CliError::Core(resket_core::Error::InvalidVertex {
                vertex: id as usize,
                n: ids.len(),
            })
        })
    };
    let dense: Vec<(usize, usize)> = match pairs {
        Some(p) => p.into_iter().map(|(a, b)| Ok((index(a)?, index(b)?))).collect::<CliResult<_>>()?,
        None => match &sk {
            Loaded::Boosted(b) => b.edges().to_vec(),
            Loaded::Single(_) => return Err(CliError::Usage("single-copy sketch files carry no edge set".into())),
        },
    };
    let values = match &sk {
        Loaded::Boosted(b) => b.estimate_all(&dense)?,
        Loaded::Single(s) => dense.iter().map(|&(a, b)| s.query_pair(a, b)).collect::<Result<_, _>>()?,
    };
    let exact = match oracle {
        Some(gp) => {
            let g = load_graph(gp)?;
            if g.ids != ids {
                return Err(CliError::Usage("oracle graph has different vertices than the sketch".into()));
            }
            let o = DenseOracle::from_graph_capped(&g.graph, dense_cap()?)?;
            Some(dense.iter().map(|&(a, b)| o.resistance(a, b)).collect::<Vec<_>>())
        }
        None => None,
    };
    let mut text = String::new();
    for (k, (&(a, b), v)) in dense.iter().zip(&values).enumerate() {
        let (a, b) = (ids[a], ids[b]);
        match (cli.format, &exact) {
            (OutputFormat::Tsv, None) => text.push_str(&format!("{a}\t{b}\t{v}\n")),
            (OutputFormat::Tsv, Some(e)) => text.push_str(&format!("{a}\t{b}\t{v}\t{}\n", e[k])),
            (OutputFormat::Json, e) => {
                let mut rec = json!({"a": a, "b": b, "value": v});
                if let Some(e) = e {
                    rec["exact"] = json!(e[k]);
                }
                text.push_str(&format!("{rec}\n"));
            }
        }
    }
    emit(cli, &text)
}

fn cmd_verify(cli: &Cli, suite: &str, n_max: usize, seeds: u64) -> CliResult<()> {
    if n_max < 2 || seeds == 0 {
        return Err(CliError::Usage("--n-max must be at least 2 and --seeds at least 1".into()));
    }
    if n_max > dense_cap()? {
        return Err(CliError::Usage(format!("--n-max {n_max} exceeds the dense cap")));
    }
    let names: Vec<&str> = if suite == "all" {
        verify::SUITES.to_vec()
    } else if verify::SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(CliError::Usage(format!(
            "unknown suite `{suite}`; known: all, {}",
            verify::SUITES.join(", ")
        )));
    };
    let mut text = String::new();
    let mut failed = Vec::new();
    for name in names {
        let rep = verify::run_suite(name, n_max, seeds).expect("known suite")?;
        if !rep.pass {
            failed.push(name);
        }
        match cli.format {
            OutputFormat::Json => text.push_str(&format!("{}\n", serde_json::to_string(&rep).unwrap())),
            OutputFormat::Tsv => text.push_str(&format!(
                "{}\t{}\t{}\t{:.3e}\n",
                rep.suite,
                if rep.pass { "pass" } else { "fail" },
                rep.checks,
                rep.margin
            )),
        }
    }
    emit(cli, &text)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::VerifyFailed(failed.join(", ")))
    }
}

fn cmd_reduce(cli: &Cli) -> CliResult<()> {
    let Command::Reduce {
        graph,
        mode,
        trials,
        seed,
        alpha,
        c_red,
        alpha_const,
        estimator,
        eps,
        no_perturb,
        log,
    } = &cli.command
    else {
        unreachable!()
    };
    if *trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let g = load_graph(graph)?;
    let mut lines = Vec::new();
    let triangle = if mode == "resistance" {
        let est = match estimator {
            EstimatorKind::Exact => {
                let cap = dense_cap()?;
                if 2 * g.graph.n() + 1 > cap {
                    return Err(CliError::Core(resket_core::Error::DenseCapExceeded {
                        n: 2 * g.graph.n() + 1,
                        cap,
                    }));
                }
                ResistanceEstimator::ExactOracle
            }
            EstimatorKind::Sketch => {
                check_eps(*eps)?;
                ResistanceEstimator::Sketch {
                    eps: *eps,
                    config: SketchConfig::default(),
                    seed: *seed,
                }
            }
        };
        let params = ReductionParams {
            alpha: *alpha,
            c_red: *c_red,
            estimator: est,
            perturb: !no_perturb,
        };
        let rep = detect_triangle_via_resistance(&g.graph, &params, *trials, *seed)?;
        for (k, t) in rep.trials.iter().enumerate() {
            lines.push(json!({
                "trial": k, "seed": t.seed, "part_sizes": t.part_sizes, "rho": t.rho,
                "pairs_checked": t.pairs_checked, "max_abs_p": t.max_abs_p, "p_tail_bound": t.p_tail_bound,
                "decision": decision(t.triangle),
                "witness": t.witness.map(|(i, j, p)| json!({"a": g.ids[i], "b": g.ids[j], "p": p})),
            }));
        }
        rep.triangle
    } else if let Some(name) = mode.strip_prefix("spectral:") {
        let f = SpectralFunction::parse(name)
            .ok_or_else(|| CliError::Usage(format!("unknown spectral function `{name}`")))?;
        let rep = detect_triangle_via_spectral_sum(&g.graph, f, *alpha_const, *trials, *seed)?;
        for (k, t) in rep.trials.iter().enumerate() {
            lines.push(json!({
                "trial": k, "seed": t.seed, "rho": t.rho, "trace_cube": t.trace_cube,
                "recovered": t.recovered, "decision": decision(t.triangle),
            }));
        }
        rep.triangle
    } else {
        return Err(CliError::Usage(format!(
            "unknown mode `{mode}`; use resistance or spectral:<f>"
        )));
    };
    let log_text: String = lines.iter().map(|l| format!("{l}\n")).collect();
    if let Some(p) = log {
        std::fs::write(p, &log_text).map_err(|source| CliError::Output { path: p.clone(), source })?;
    }
    match cli.format {
        OutputFormat::Tsv => emit(cli, &format!("{}\n", decision(triangle))),
        OutputFormat::Json => emit(
            cli,
            &format!("{log_text}{}\n", json!({"decision": decision(triangle), "trials": trials})),
        ),
    }
}

fn decision(t: bool) -> &'static str {
    if t {
        "triangle"
    } else {
        "no-triangle"
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

fn cmd_bench(cli: &Cli, graph: &Path, grid: &[f64], seed: u64, queries: usize, constants: &Constants) -> CliResult<()> {
    if grid.len() < 2 {
        return Err(CliError::Usage("--eps needs at least two values".into()));
    }
    for &e in grid {
        check_eps(e)?;
    }
    let cfg = constants.config()?;
    let g = load_graph(graph)?;
    g.graph.require_connected()?;
    let l = g.graph.laplacian()?;
    let spectra = SketchSpectra::compute(&l, &cfg.eigen)?;
    let n = g.graph.n();
    let mut r = random::rng(seed);
    let pairs: Vec<(usize, usize)> = (0..queries)
        .map(|_| {
            use rand::Rng;
            let a = r.random_range(0..n);
            let b = (a + r.random_range(1..n)) % n;
            (a, b)
        })
        .collect();

    let mut rows = Vec::new();
    for &eps in grid {
        let start = Instant::now();
        let sk = SpectralSketch::build_with_spectra(&l, eps, &cfg, seed, &spectra)?;
        let build = start.elapsed().as_secs_f64();
        let bytes = format::encode_sketch(&sk).len();
        let start = Instant::now();
        for &(a, b) in &pairs {
            std::hint::black_box(sk.query_pair(a, b)?);
        }
        let per_query = start.elapsed().as_secs_f64() / queries.max(1) as f64;
        let p = sk.to_parts();
        rows.push((eps, p.s, p.t, bytes, build, per_query));
    }
    let inv: Vec<f64> = rows.iter().map(|r| 1.0 / r.0).collect();
    let size_slope = log_log_slope(&inv, &rows.iter().map(|r| r.3 as f64).collect::<Vec<_>>());
    let time_slope = log_log_slope(&inv, &rows.iter().map(|r| r.4).collect::<Vec<_>>());

    let mut text = String::new();
    match cli.format {
        OutputFormat::Tsv => {
            text.push_str("eps\ts\tt\tbytes\tbuild_seconds\tquery_seconds\n");
            for (eps, s, t, bytes, build, q) in &rows {
                text.push_str(&format!("{eps}\t{s}\t{t}\t{bytes}\t{build:.6}\t{q:.3e}\n"));
            }
            text.push_str(&format!("# slope_bytes\t{size_slope:.4}\n# slope_build\t{time_slope:.4}\n"));
        }
        OutputFormat::Json => {
            for (eps, s, t, bytes, build, q) in &rows {
                let rec = json!({"eps": eps, "s": s, "t": t, "bytes": bytes, "build_seconds": build, "query_seconds": q});
                text.push_str(&format!("{rec}\n"));
            }
            text.push_str(&format!("{}\n", json!({"slope_bytes": size_slope, "slope_build": time_slope})));
        }
    }
    emit(cli, &text)
}
