use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rrcr::analysis::{
    degree_histogram_into_set, lambda_estimate, mixing_discrepancy, sphere_growth_check, AnalysisError, MixingReport,
    SpectralEstimate, DEFAULT_MAX_ITERS, DEFAULT_SPHERE_C, DEFAULT_TOL,
};
use rrcr::canonical::{are_isomorphic, canonical_labelling, IsoOutcome, SeedStrategy};
use rrcr::harness::{render_report, run_experiment, ExperimentConfig, ExperimentKind, ReportFormat, SeedKind};
use rrcr::inequalities::{check_hypergeometric_anticoncentration, check_lemma_aux, InequalityReport};
use rrcr::rng::{below, random_permutation, RngSeed};
use rrcr::sampler::{sample_regular_with, SamplerMethod, DEFAULT_MAX_ATTEMPTS, DEFAULT_SWITCH_SWEEPS};
use rrcr::{refine_to_stable, Graph, Vertex, VertexPartition};

/// Exit code for bad input or I/O failures.
const EXIT_ERROR: u8 = 4;
/// Exit code when a calibration threshold or exact check fails.
const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "rrcr", version, about = "Colour refinement on random regular graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random d-regular graph.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Run colour refinement to a stable colouring.
    Refine {
        #[arg(long)]
        graph: PathBuf,
        /// `singleton:V`, `parts:FILE` or `trivial`.
        #[arg(long)]
        seed: String,
    },
    /// Compute a canonical labelling.
    Canon {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Strategy::Triangles)]
        strategy: Strategy,
        /// Also write the canonical form in graph text format.
        #[arg(long)]
        emit_form: Option<PathBuf>,
    },
    /// Decide isomorphism; exits 0 / 1 / 2 for isomorphic / non-isomorphic / unknown.
    Iso {
        #[arg(long)]
        g1: PathBuf,
        #[arg(long)]
        g2: PathBuf,
    },
    /// Structural diagnostics, printed as JSON.
    Analyze {
        #[arg(long)]
        graph: PathBuf,
        #[command(subcommand)]
        what: Analysis,
    },
    /// Exhaustive exact checks.
    Check {
        #[command(subcommand)]
        what: CheckKind,
    },
    /// Seeded experiments; exits 3 if a calibration threshold fails.
    Experiment(ExperimentArgs),
}

#[derive(Subcommand)]
enum Analysis {
    /// Power-iteration estimate of the second largest absolute eigenvalue.
    Lambda,
    /// Edge discrepancy of random set pairs against the estimated lambda.
    Mixing {
        #[arg(long)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sphere sizes around one vertex against the tree-like lower bound.
    Spheres {
        #[arg(long)]
        source: Vertex,
        #[arg(long, default_value_t = DEFAULT_SPHERE_C)]
        c: f64,
    },
    /// Histogram of neighbour counts into a vertex set.
    Hist {
        /// Whitespace-separated vertex ids.
        #[arg(long)]
        set: PathBuf,
    },
}

#[derive(Subcommand)]
enum CheckKind {
    Inequalities {
        #[arg(long, default_value_t = 40)]
        max: u64,
        #[arg(long, default_value_t = 6)]
        kmax: u64,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(value_enum)]
    kind: Kind,
    /// Comma-separated vertex counts.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Comma-separated degrees.
    #[arg(long, value_delimiter = ',', required = true)]
    d: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Seeds for the discreteness experiment, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "singleton")]
    strategy: Vec<SeedKind>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    method: Method,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Pairing,
    Switching,
}

impl From<Method> for SamplerMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Auto => SamplerMethod::Auto,
            Method::Pairing => SamplerMethod::Pairing { max_attempts: DEFAULT_MAX_ATTEMPTS },
            Method::Switching => SamplerMethod::Switching { sweeps: DEFAULT_SWITCH_SWEEPS },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Triangles,
    Degree,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Discreteness,
    SeedValidity,
    Iso,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

type CliResult = Result<ExitCode, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(cmd: Command) -> CliResult {
    match cmd {
        Command::Sample { n, d, seed, out, method } => {
            let g = sample_regular_with(n, d, RngSeed::new(seed), method.into()).map_err(|e| e.to_string())?;
            write_or_print(out.as_deref(), &g.to_text())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Refine { graph, seed } => refine(&read_graph(&graph)?, &seed),
        Command::Canon { graph, strategy, emit_form } => {
            let g = read_graph(&graph)?;
            let strategy = match strategy {
                Strategy::Triangles => SeedStrategy::Triangles,
                Strategy::Degree => SeedStrategy::Degree,
            };
            match canonical_labelling(&g, &strategy) {
                Ok(l) => {
                    println!("rounds {}", l.rounds_used);
                    println!("labels {}", join(&l.perm));
                    if let Some(path) = emit_form {
                        write_or_print(Some(&path), &l.canonical_form(&g).to_text())?;
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(f) => {
                    println!("failed {:?} after {} rounds", f.reason, f.rounds);
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Iso { g1, g2 } => {
            let (g1, g2) = (read_graph(&g1)?, read_graph(&g2)?);
            Ok(match are_isomorphic(&g1, &g2) {
                IsoOutcome::Isomorphic(f) => {
                    println!("isomorphic");
                    println!("mapping {}", join(&f));
                    ExitCode::SUCCESS
                }
                IsoOutcome::NonIsomorphic => {
                    println!("non-isomorphic");
                    ExitCode::from(1)
                }
                IsoOutcome::Unknown => {
                    println!("unknown");
                    ExitCode::from(2)
                }
            })
        }
        Command::Analyze { graph, what } => analyze(&read_graph(&graph)?, what),
        Command::Check { what: CheckKind::Inequalities { max, kmax } } => {
            #[derive(Serialize)]
            struct Out {
                passed: bool,
                lemma_aux: InequalityReport,
                anticoncentration: InequalityReport,
            }
            let lemma_aux = check_lemma_aux(max);
            let anticoncentration = check_hypergeometric_anticoncentration(max, kmax);
            let passed = lemma_aux.passed() && anticoncentration.passed();
            print_json(&Out { passed, lemma_aux, anticoncentration })?;
            Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(EXIT_CHECK_FAILED) })
        }
        Command::Experiment(args) => experiment(args),
    }
}

fn refine(g: &Graph, seed: &str) -> CliResult {
    let n = g.n();
    let init = if seed == "trivial" {
        VertexPartition::trivial(n)
    } else if let Some(v) = seed.strip_prefix("singleton:") {
        let v: Vertex = v.parse().map_err(|_| format!("bad vertex {v:?}"))?;
        VertexPartition::singleton(n, v).map_err(|e| e.to_string())?
    } else if let Some(path) = seed.strip_prefix("parts:") {
        let text = fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
        VertexPartition::from_text(n, &text).map_err(|e| e.to_string())?
    } else {
        return Err(format!("seed must be singleton:V, parts:FILE or trivial, got {seed:?}"));
    };
    let trace = refine_to_stable(g, &init).map_err(|e| e.to_string())?;
    println!("rounds {}", trace.rounds);
    println!("classes {}", join(&trace.class_counts_per_round));
    println!("discrete {}", trace.stable.is_discrete());
    print!("{}", trace.stable.to_partition().to_text());
    Ok(ExitCode::SUCCESS)
}

fn analyze(g: &Graph, what: Analysis) -> CliResult {
    match what {
        Analysis::Lambda => {
            #[derive(Serialize)]
            struct Out {
                d: Option<usize>,
                converged: bool,
                estimate: SpectralEstimate,
                ramanujan: Option<f64>,
            }
            let (converged, estimate) = lambda_or_best(g)?;
            let d = g.regular_degree();
            let ramanujan = d.map(|d| 2.0 * (d as f64 - 1.0).max(0.0).sqrt());
            print_json(&Out { d, converged, estimate, ramanujan })?;
        }
        Analysis::Mixing { pairs, seed } => {
            #[derive(Serialize)]
            struct Pair {
                a_size: usize,
                b_size: usize,
                #[serde(flatten)]
                report: MixingReport,
            }
            #[derive(Serialize)]
            struct Out {
                lambda: f64,
                converged: bool,
                all_ok: bool,
                pairs: Vec<Pair>,
            }
            let (converged, estimate) = lambda_or_best(g)?;
            let n = g.n();
            let mut out = Vec::with_capacity(pairs);
            for k in 0..pairs {
                let mut rng = RngSeed::new(seed).derive(&[k as u64]).rng();
                let pick = |rng: &mut _| {
                    let size = 1 + below(rng, n);
                    random_permutation(rng, n)[..size].to_vec()
                };
                let (a, b) = (pick(&mut rng), pick(&mut rng));
                let report = mixing_discrepancy(g, &a, &b, estimate.lambda_hat).map_err(|e| e.to_string())?;
                out.push(Pair { a_size: a.len(), b_size: b.len(), report });
            }
            let all_ok = out.iter().all(|p| p.report.ok);
            print_json(&Out { lambda: estimate.lambda_hat, converged, all_ok, pairs: out })?;
        }
        Analysis::Spheres { source, c } => {
            let report = sphere_growth_check(g, &[source], c).map_err(|e| e.to_string())?;
            print_json(&report)?;
        }
        Analysis::Hist { set } => {
            let text = fs::read_to_string(&set).map_err(|e| format!("{}: {e}", set.display()))?;
            let u = text
                .split_whitespace()
                .map(|t| t.parse::<Vertex>().map_err(|_| format!("bad vertex {t:?}")))
                .collect::<Result<Vec<_>, _>>()?;
            let hist: BTreeMap<usize, usize> = degree_histogram_into_set(g, &u).map_err(|e| e.to_string())?;
            print_json(&hist)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn lambda_or_best(g: &Graph) -> Result<(bool, SpectralEstimate), String> {
    match lambda_estimate(g, DEFAULT_MAX_ITERS, DEFAULT_TOL) {
        Ok(e) => Ok((true, e)),
        Err(AnalysisError::NoConvergence(e)) => Ok((false, e)),
        Err(e) => Err(e.to_string()),
    }
}

fn experiment(args: ExperimentArgs) -> CliResult {
    let kind = match args.kind {
        Kind::Discreteness => ExperimentKind::Discreteness,
        Kind::SeedValidity => ExperimentKind::SeedValidity,
        Kind::Iso => ExperimentKind::Iso,
    };
    let format = match args.format {
        Format::Csv => ReportFormat::Csv,
        Format::Json => ReportFormat::Json,
    };
    let mut cfg = ExperimentConfig::new(args.n, args.d, args.samples, args.seed).with_strategies(args.strategy);
    cfg.method = args.method.into();
    let start = Instant::now();
    let reports = run_experiment(kind, &cfg).map_err(|e| e.to_string())?;
    let text = render_report(&reports, format).map_err(|e| e.to_string())?;
    write_or_print(args.out.as_deref(), &text)?;
    let failed = reports.iter().filter(|r| !r.threshold_ok).count();
    eprintln!(
        "{kind}: {} cells, {failed} below threshold, {:.2}s",
        reports.len(),
        start.elapsed().as_secs_f64()
    );
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(EXIT_CHECK_FAILED) })
}

fn read_graph(path: &Path) -> Result<Graph, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Graph::from_text(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), String> {
    println!("{}", serde_json::to_string_pretty(value).map_err(|e| e.to_string())?);
    Ok(())
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}
