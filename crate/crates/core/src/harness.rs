//! Seeded experiments over grids of `(n, d)` and their CSV/JSON reports.
//!
//! Sample `j` of cell `(n, d)` draws its graph from stream
//! `hash(n, d, j)`; seed choices and permutations use the same path extended
//! by a tag. Samples run in parallel but are aggregated in index order, so a
//! report depends only on the configuration.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::canonical::{
    are_isomorphic, canonical_labelling, default_strategy, seed_partition, verify_isomorphism, IsoOutcome,
    SeedStrategy,
};
use crate::graph::{Graph, Vertex};
use crate::partition::VertexPartition;
use crate::refinement::{is_equitable, refine_to_stable};
use crate::rng::{below, random_permutation, tag_word, RngSeed};
use crate::sampler::{sample_regular_with, SamplerMethod};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
/// Minimum fraction of samples that must show the predicted behaviour.
pub const WHP_THRESHOLD: f64 = 0.95;
/// Minimum fraction for the full triangle-seeded pipeline.
pub const PIPELINE_THRESHOLD: f64 = 0.90;
pub const THREADS_ENV: &str = "RRCR_THREADS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedKind {
    Singleton,
    RandomBipartition,
    Triangles,
}

impl fmt::Display for SeedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeedKind::Singleton => "singleton",
            SeedKind::RandomBipartition => "random-bipartition",
            SeedKind::Triangles => "triangles",
        })
    }
}

impl FromStr for SeedKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "singleton" => Ok(SeedKind::Singleton),
            "random-bipartition" | "bipartition" => Ok(SeedKind::RandomBipartition),
            "triangles" => Ok(SeedKind::Triangles),
            _ => Err(format!("unknown seed kind {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Discreteness,
    SeedValidity,
    Iso,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::Discreteness => "discreteness",
            ExperimentKind::SeedValidity => "seed-validity",
            ExperimentKind::Iso => "iso",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(format!("unknown report format {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_list: Vec<usize>,
    pub d_list: Vec<usize>,
    pub samples: usize,
    pub master_seed: u64,
    pub seed_strategies: Vec<SeedKind>,
    pub method: SamplerMethod,
}

impl ExperimentConfig {
    pub fn new(n_list: Vec<usize>, d_list: Vec<usize>, samples: usize, master_seed: u64) -> Self {
        ExperimentConfig {
            n_list,
            d_list,
            samples,
            master_seed,
            seed_strategies: vec![SeedKind::Singleton],
            method: SamplerMethod::Auto,
        }
    }

    pub fn with_strategies(mut self, strategies: Vec<SeedKind>) -> Self {
        self.seed_strategies = strategies;
        self
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.samples == 0 {
            return Err(HarnessError::InvalidConfig("samples must be at least 1".into()));
        }
        for (n, d) in self.cells() {
            if d >= n || (n * d) % 2 == 1 {
                return Err(HarnessError::InvalidConfig(format!(
                    "no {d}-regular graph on {n} vertices"
                )));
            }
        }
        Ok(())
    }

    pub fn cells(&self) -> Vec<(usize, usize)> {
        self.n_list
            .iter()
            .flat_map(|&n| self.d_list.iter().map(move |&d| (n, d)))
            .collect()
    }

    fn cell_seed(&self, n: usize, d: usize) -> RngSeed {
        RngSeed::new(self.master_seed).derive(&[n as u64, d as u64])
    }
}

/// One row of an experiment report. Fields that do not apply to the
/// experiment are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub d: usize,
    pub strategy: SeedKind,
    pub samples: usize,
    pub sampler_errors: usize,

    pub discrete: Option<usize>,
    pub fraction_discrete: Option<f64>,
    pub max_rounds_observed: Option<usize>,
    pub mean_rounds: Option<f64>,
    pub mean_steps_including_check: Option<f64>,
    pub diam_min: Option<usize>,
    pub diam_max: Option<usize>,
    pub diam_mean: Option<f64>,
    pub disconnected: Option<usize>,
    pub mean_rounds_over_diam: Option<f64>,
    /// Discrete samples with `rounds > 2 diam + 3`.
    pub round_bound_violations: Option<usize>,
    /// Same, counting the final non-refining step as well.
    pub round_bound_violations_with_check: Option<usize>,
    pub round_bound_2diam3_ok: Option<bool>,
    pub fraction_within_diam_plus_1: Option<f64>,
    /// Stable partitions that were not equitable (expected 0).
    pub equitable_failures: Option<usize>,
    /// Discrete samples whose canonical labelling failed (expected 0).
    pub labelling_failures: Option<usize>,

    pub seed_trivial: Option<usize>,
    pub seed_trivial_fraction: Option<f64>,
    pub pipeline_discrete_fraction: Option<f64>,

    pub labelled_pairs: Option<usize>,
    pub unknown_pairs: Option<usize>,
    pub iso_ok: Option<usize>,
    pub false_non_isomorphic: Option<usize>,
    pub iso_roundtrip_ok_fraction: Option<f64>,
    pub independent_non_isomorphic: Option<usize>,
    pub independent_isomorphic_verified: Option<usize>,
    pub independent_unknown: Option<usize>,

    pub threshold_ok: bool,
}

impl CellReport {
    fn blank(experiment: ExperimentKind, n: usize, d: usize, strategy: SeedKind, samples: usize) -> Self {
        CellReport {
            experiment,
            n,
            d,
            strategy,
            samples,
            sampler_errors: 0,
            discrete: None,
            fraction_discrete: None,
            max_rounds_observed: None,
            mean_rounds: None,
            mean_steps_including_check: None,
            diam_min: None,
            diam_max: None,
            diam_mean: None,
            disconnected: None,
            mean_rounds_over_diam: None,
            round_bound_violations: None,
            round_bound_violations_with_check: None,
            round_bound_2diam3_ok: None,
            fraction_within_diam_plus_1: None,
            equitable_failures: None,
            labelling_failures: None,
            seed_trivial: None,
            seed_trivial_fraction: None,
            pipeline_discrete_fraction: None,
            labelled_pairs: None,
            unknown_pairs: None,
            iso_ok: None,
            false_non_isomorphic: None,
            iso_roundtrip_ok_fraction: None,
            independent_non_isomorphic: None,
            independent_isomorphic_verified: None,
            independent_unknown: None,
            threshold_ok: true,
        }
    }
}

pub const CSV_COLUMNS: [&str; 34] = [
    "experiment",
    "n",
    "d",
    "strategy",
    "samples",
    "sampler_errors",
    "discrete",
    "fraction_discrete",
    "max_rounds_observed",
    "mean_rounds",
    "mean_steps_including_check",
    "diam_min",
    "diam_max",
    "diam_mean",
    "disconnected",
    "mean_rounds_over_diam",
    "round_bound_violations",
    "round_bound_violations_with_check",
    "round_bound_2diam3_ok",
    "fraction_within_diam_plus_1",
    "equitable_failures",
    "labelling_failures",
    "seed_trivial",
    "seed_trivial_fraction",
    "pipeline_discrete_fraction",
    "labelled_pairs",
    "unknown_pairs",
    "iso_ok",
    "false_non_isomorphic",
    "iso_roundtrip_ok_fraction",
    "independent_non_isomorphic",
    "independent_isomorphic_verified",
    "independent_unknown",
    "threshold_ok",
];

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn optf(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_default()
}

impl CellReport {
    /// Values in [`CSV_COLUMNS`] order.
    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.experiment.to_string(),
            self.n.to_string(),
            self.d.to_string(),
            self.strategy.to_string(),
            self.samples.to_string(),
            self.sampler_errors.to_string(),
            opt(self.discrete),
            optf(self.fraction_discrete),
            opt(self.max_rounds_observed),
            optf(self.mean_rounds),
            optf(self.mean_steps_including_check),
            opt(self.diam_min),
            opt(self.diam_max),
            optf(self.diam_mean),
            opt(self.disconnected),
            optf(self.mean_rounds_over_diam),
            opt(self.round_bound_violations),
            opt(self.round_bound_violations_with_check),
            opt(self.round_bound_2diam3_ok),
            optf(self.fraction_within_diam_plus_1),
            opt(self.equitable_failures),
            opt(self.labelling_failures),
            opt(self.seed_trivial),
            optf(self.seed_trivial_fraction),
            optf(self.pipeline_discrete_fraction),
            opt(self.labelled_pairs),
            opt(self.unknown_pairs),
            opt(self.iso_ok),
            opt(self.false_non_isomorphic),
            optf(self.iso_roundtrip_ok_fraction),
            opt(self.independent_non_isomorphic),
            opt(self.independent_isomorphic_verified),
            opt(self.independent_unknown),
            self.threshold_ok.to_string(),
        ]
    }
}

fn fraction(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Runs `f` on the pool sized by `RRCR_THREADS`, or rayon's default pool.
pub fn with_worker_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(threads) if threads > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
            .install(f),
        _ => f(),
    }
}

fn draw_graph(cfg: &ExperimentConfig, n: usize, d: usize, j: usize, tag: Option<&str>) -> Option<Graph> {
    let mut path = vec![j as u64];
    path.extend(tag.map(tag_word));
    sample_regular_with(n, d, cfg.cell_seed(n, d).derive(&path), cfg.method).ok()
}

fn stream(cfg: &ExperimentConfig, n: usize, d: usize, j: usize, tag: &str) -> RngSeed {
    cfg.cell_seed(n, d).derive(&[j as u64, tag_word(tag)])
}

/// Uniform non-trivial subset split (requires `n >= 2`).
fn random_bipartition(n: usize, seed: RngSeed) -> VertexPartition {
    let mut rng = seed.rng();
    loop {
        let side: Vec<bool> = (0..n).map(|_| below(&mut rng, 2) == 1).collect();
        let (a, b): (Vec<Vertex>, Vec<Vertex>) = (0..n as Vertex).partition(|&v| side[v as usize]);
        if !a.is_empty() && !b.is_empty() {
            return VertexPartition::new(n, vec![a, b]).unwrap();
        }
    }
}

struct DiscreteSample {
    discrete: bool,
    rounds: usize,
    diam: usize,
    connected: bool,
    seed_trivial: bool,
    equitable: bool,
    labelled: bool,
}

fn discreteness_sample(cfg: &ExperimentConfig, n: usize, d: usize, kind: SeedKind, j: usize) -> Option<DiscreteSample> {
    let g = draw_graph(cfg, n, d, j, None)?;
    let seed = match kind {
        SeedKind::Singleton => {
            let v = below(&mut stream(cfg, n, d, j, "singleton").rng(), n) as Vertex;
            Some(VertexPartition::singleton(n, v).unwrap())
        }
        SeedKind::RandomBipartition if n >= 2 => Some(random_bipartition(n, stream(cfg, n, d, j, "bipartition"))),
        SeedKind::RandomBipartition => None,
        SeedKind::Triangles => seed_partition(&g).ok(),
    };
    let diameter = g.diameter();
    let diam = diameter.or(n);
    let Some(seed) = seed else {
        return Some(DiscreteSample {
            discrete: false,
            rounds: 0,
            diam,
            connected: diameter.finite().is_some(),
            seed_trivial: true,
            equitable: true,
            labelled: true,
        });
    };
    let trace = refine_to_stable(&g, &seed).expect("sizes match");
    let discrete = trace.stable.is_discrete();
    let equitable = is_equitable(&g, &trace.stable.to_partition());
    let labelled = !discrete || canonical_labelling(&g, &SeedStrategy::Given(seed)).is_ok();
    Some(DiscreteSample {
        discrete,
        rounds: trace.rounds,
        diam,
        connected: diameter.finite().is_some(),
        seed_trivial: false,
        equitable,
        labelled,
    })
}

/// Colour refinement from sampled seeds: discreteness and round counts
/// against `2 diam + 3`.
pub fn run_discreteness_experiment(cfg: &ExperimentConfig) -> Result<Vec<CellReport>, HarnessError> {
    cfg.validate()?;
    let mut out = Vec::new();
    for (n, d) in cfg.cells() {
        for &kind in &cfg.seed_strategies {
            let results: Vec<Option<DiscreteSample>> = (0..cfg.samples)
                .into_par_iter()
                .map(|j| discreteness_sample(cfg, n, d, kind, j))
                .collect();
            let ok: Vec<&DiscreteSample> = results.iter().flatten().collect();
            let mut r = CellReport::blank(ExperimentKind::Discreteness, n, d, kind, cfg.samples);
            r.sampler_errors = results.len() - ok.len();
            let discrete: Vec<&&DiscreteSample> = ok.iter().filter(|s| s.discrete).collect();
            let refined: Vec<&&DiscreteSample> = ok.iter().filter(|s| !s.seed_trivial).collect();
            r.discrete = Some(discrete.len());
            r.fraction_discrete = fraction(discrete.len(), ok.len());
            r.max_rounds_observed = refined.iter().map(|s| s.rounds).max();
            let rounds_sum: usize = refined.iter().map(|s| s.rounds).sum();
            r.mean_rounds = fraction(rounds_sum, refined.len());
            r.mean_steps_including_check = fraction(rounds_sum + refined.len(), refined.len());
            r.diam_min = ok.iter().map(|s| s.diam).min();
            r.diam_max = ok.iter().map(|s| s.diam).max();
            r.diam_mean = fraction(ok.iter().map(|s| s.diam).sum(), ok.len());
            r.disconnected = Some(ok.iter().filter(|s| !s.connected).count());
            r.mean_rounds_over_diam = (!refined.is_empty()).then(|| {
                refined.iter().map(|s| s.rounds as f64 / s.diam.max(1) as f64).sum::<f64>() / refined.len() as f64
            });
            let violations = discrete.iter().filter(|s| s.rounds > 2 * s.diam + 3).count();
            r.round_bound_violations = Some(violations);
            r.round_bound_violations_with_check =
                Some(discrete.iter().filter(|s| s.rounds + 1 > 2 * s.diam + 3).count());
            r.round_bound_2diam3_ok = Some(violations == 0);
            r.fraction_within_diam_plus_1 =
                fraction(discrete.iter().filter(|s| s.rounds <= s.diam + 1).count(), discrete.len());
            r.equitable_failures = Some(ok.iter().filter(|s| !s.equitable).count());
            r.labelling_failures = Some(ok.iter().filter(|s| !s.labelled).count());
            r.seed_trivial = Some(ok.iter().filter(|s| s.seed_trivial).count());
            r.seed_trivial_fraction = fraction(r.seed_trivial.unwrap(), ok.len());
            r.threshold_ok = r.fraction_discrete.is_some_and(|f| f >= WHP_THRESHOLD)
                && violations == 0
                && r.equitable_failures == Some(0)
                && r.labelling_failures == Some(0);
            out.push(r);
        }
    }
    Ok(out)
}

/// How often the triangle seed is trivial, and how often the full pipeline
/// ends discrete.
pub fn run_seed_validity_experiment(cfg: &ExperimentConfig) -> Result<Vec<CellReport>, HarnessError> {
    cfg.validate()?;
    let mut out = Vec::new();
    for (n, d) in cfg.cells() {
        // (trivial, discrete)
        let results: Vec<Option<(bool, bool)>> = (0..cfg.samples)
            .into_par_iter()
            .map(|j| {
                let g = draw_graph(cfg, n, d, j, None)?;
                Some(match seed_partition(&g) {
                    Err(_) => (true, false),
                    Ok(seed) => (false, refine_to_stable(&g, &seed).unwrap().stable.is_discrete()),
                })
            })
            .collect();
        let ok: Vec<(bool, bool)> = results.iter().flatten().copied().collect();
        let mut r = CellReport::blank(ExperimentKind::SeedValidity, n, d, SeedKind::Triangles, cfg.samples);
        r.sampler_errors = results.len() - ok.len();
        let trivial = ok.iter().filter(|s| s.0).count();
        let discrete = ok.iter().filter(|s| s.1).count();
        r.seed_trivial = Some(trivial);
        r.seed_trivial_fraction = fraction(trivial, ok.len());
        r.discrete = Some(discrete);
        r.pipeline_discrete_fraction = fraction(discrete, ok.len());
        r.threshold_ok = r.seed_trivial_fraction.is_some_and(|f| f <= 1.0 - WHP_THRESHOLD)
            && r.pipeline_discrete_fraction.is_some_and(|f| f >= PIPELINE_THRESHOLD);
        out.push(r);
    }
    Ok(out)
}

#[derive(Default)]
struct IsoSample {
    labelled: bool,
    ok: bool,
    false_non_iso: bool,
    indep_non_iso: bool,
    indep_iso_verified: bool,
    indep_unknown: bool,
}

fn iso_sample(cfg: &ExperimentConfig, n: usize, d: usize, j: usize) -> Option<IsoSample> {
    let g = draw_graph(cfg, n, d, j, None)?;
    let perm = random_permutation(&mut stream(cfg, n, d, j, "perm").rng(), n);
    let h = g.relabel(&perm);
    let strategy = default_strategy(&g);
    let mut s = IsoSample::default();
    let (lg, lh) = (canonical_labelling(&g, &strategy), canonical_labelling(&h, &strategy));
    s.labelled = lg.is_ok() && lh.is_ok();
    let outcome = are_isomorphic(&g, &h);
    if let (Ok(lg), Ok(lh)) = (&lg, &lh) {
        let forms_equal = lg.canonical_form(&g).to_text() == lh.canonical_form(&h).to_text();
        s.ok = forms_equal && matches!(&outcome, IsoOutcome::Isomorphic(f) if verify_isomorphism(&g, &h, f));
        s.false_non_iso = outcome == IsoOutcome::NonIsomorphic;
    }
    let other = draw_graph(cfg, n, d, j, Some("other"))?;
    match are_isomorphic(&g, &other) {
        IsoOutcome::NonIsomorphic => s.indep_non_iso = true,
        IsoOutcome::Isomorphic(f) => s.indep_iso_verified = verify_isomorphism(&g, &other, &f),
        IsoOutcome::Unknown => s.indep_unknown = true,
    }
    Some(s)
}

/// `g` against a random relabelling of itself, and against an independent
/// sample.
pub fn run_iso_roundtrip_experiment(cfg: &ExperimentConfig) -> Result<Vec<CellReport>, HarnessError> {
    cfg.validate()?;
    let mut out = Vec::new();
    for (n, d) in cfg.cells() {
        let results: Vec<Option<IsoSample>> =
            (0..cfg.samples).into_par_iter().map(|j| iso_sample(cfg, n, d, j)).collect();
        let ok: Vec<&IsoSample> = results.iter().flatten().collect();
        let mut r = CellReport::blank(ExperimentKind::Iso, n, d, SeedKind::Triangles, cfg.samples);
        r.sampler_errors = results.len() - ok.len();
        let labelled = ok.iter().filter(|s| s.labelled).count();
        let good = ok.iter().filter(|s| s.labelled && s.ok).count();
        r.labelled_pairs = Some(labelled);
        r.unknown_pairs = Some(ok.len() - labelled);
        r.iso_ok = Some(good);
        r.false_non_isomorphic = Some(ok.iter().filter(|s| s.false_non_iso).count());
        r.iso_roundtrip_ok_fraction = fraction(good, labelled);
        r.independent_non_isomorphic = Some(ok.iter().filter(|s| s.indep_non_iso).count());
        r.independent_isomorphic_verified = Some(ok.iter().filter(|s| s.indep_iso_verified).count());
        r.independent_unknown = Some(ok.iter().filter(|s| s.indep_unknown).count());
        r.threshold_ok = good == labelled && r.false_non_isomorphic == Some(0);
        out.push(r);
    }
    Ok(out)
}

pub fn run_experiment(kind: ExperimentKind, cfg: &ExperimentConfig) -> Result<Vec<CellReport>, HarnessError> {
    with_worker_pool(|| match kind {
        ExperimentKind::Discreteness => run_discreteness_experiment(cfg),
        ExperimentKind::SeedValidity => run_seed_validity_experiment(cfg),
        ExperimentKind::Iso => run_iso_roundtrip_experiment(cfg),
    })
}

#[derive(Serialize)]
struct JsonReport<'a> {
    schema_version: u32,
    cells: &'a [CellReport],
}

pub fn render_report(reports: &[CellReport], format: ReportFormat) -> Result<String, HarnessError> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(CSV_COLUMNS)?;
            for r in reports {
                w.write_record(r.csv_row())?;
            }
            let bytes = w.into_inner().map_err(|e| e.into_error())?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&JsonReport { schema_version: REPORT_SCHEMA_VERSION, cells: reports })?;
            s.push('\n');
            Ok(s)
        }
    }
}

pub fn emit_report(reports: &[CellReport], format: ReportFormat, path: &Path) -> Result<(), HarnessError> {
    let text = render_report(reports, format)?;
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}
