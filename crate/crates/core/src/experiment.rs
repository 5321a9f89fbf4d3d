//! Seeded Monte Carlo evaluation.
//!
//! Every run derives its own seed from the base seed, the density and the run
//! index, so runs can execute in any order or in parallel and still produce
//! bit-identical reports. All algorithms in a run share one deployment and one
//! connectivity graph, which makes their errors paired samples.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines;
use crate::geometry::Point;
use crate::network::{
    build_graph, generate_deployment, min_hops, AnchorRanging, DeploymentConfig, NetworkError,
    NodeId,
};
use crate::radio::{PathLossModel, RadioError};
use crate::rail::{RailError, RailLocalizer};
use crate::rng::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    MinMax,
    RssiDvHop,
    #[serde(rename = "RAIL")]
    Rail,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::MinMax, Algorithm::RssiDvHop, Algorithm::Rail];

    pub fn label(&self) -> &'static str {
        match self {
            Algorithm::MinMax => "MinMax",
            Algorithm::RssiDvHop => "RssiDvHop",
            Algorithm::Rail => "RAIL",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.label() == s)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error("deployment generation failed at density {density}, run {run_index}: {source}")]
    GenerationFailed {
        density: usize,
        run_index: usize,
        source: NetworkError,
    },
    #[error("localization failed at density {density}, run {run_index}: {source}")]
    Localization {
        density: usize,
        run_index: usize,
        source: RailError,
    },
    #[error("no run records to aggregate")]
    NoRecords,
    #[error("config json: {0}")]
    Json(#[from] serde_json::Error),
}

impl From<RadioError> for ExperimentError {
    fn from(e: RadioError) -> Self {
        ExperimentError::InvalidConfig(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Width and height of the deployment area, meters.
    pub area: (f64, f64),
    /// Numbers of unknown nodes to evaluate.
    pub densities: Vec<usize>,
    pub n_anchors: usize,
    pub comm_range: f64,
    /// RSSI noise standard deviation, dB.
    pub sigma: f64,
    pub runs_per_density: usize,
    pub base_seed: u64,
    pub algorithms: Vec<Algorithm>,
    /// Path-loss parameters; its own `sigma` is overridden by the field above.
    #[serde(default)]
    pub path_loss: PathLossModel,
    #[serde(default = "default_min_anchor_area")]
    pub min_anchor_area: f64,
    #[serde(default = "default_max_attempts")]
    pub max_attempts: usize,
}

fn default_min_anchor_area() -> f64 {
    crate::network::DEFAULT_MIN_ANCHOR_AREA
}

fn default_max_attempts() -> usize {
    crate::network::DEFAULT_MAX_ATTEMPTS
}

impl ExperimentConfig {
    /// 50 × 50 m, 100/200/500 unknown nodes, three anchors, 10 m range,
    /// noise-free ranging, 50 runs per density, all algorithms.
    pub fn table2() -> Self {
        Self {
            area: (50.0, 50.0),
            densities: vec![100, 200, 500],
            n_anchors: 3,
            comm_range: 10.0,
            sigma: 0.0,
            runs_per_density: 50,
            base_seed: 1,
            algorithms: Algorithm::ALL.to_vec(),
            path_loss: PathLossModel::default(),
            min_anchor_area: default_min_anchor_area(),
            max_attempts: default_max_attempts(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self, ExperimentError> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::InvalidConfig(m.to_string()));
        if self.runs_per_density == 0 {
            return bad("runs_per_density must be at least 1");
        }
        if self.densities.is_empty() {
            return bad("densities must not be empty");
        }
        if self.algorithms.is_empty() {
            return bad("algorithms must not be empty");
        }
        if self.n_anchors < 3 {
            return bad("at least three anchors are required");
        }
        self.model()?;
        Ok(())
    }

    pub fn model(&self) -> Result<PathLossModel, RadioError> {
        let m = self.path_loss.with_sigma(self.sigma);
        m.validate()?;
        Ok(m)
    }

    pub fn deployment_config(&self, density: usize) -> DeploymentConfig {
        DeploymentConfig {
            width: self.area.0,
            height: self.area.1,
            n_unknown: density,
            n_anchors: self.n_anchors,
            comm_range: self.comm_range,
            min_anchor_area: self.min_anchor_area,
            max_attempts: self.max_attempts,
        }
    }

    /// Configured algorithms, deduplicated, in canonical order.
    pub fn algorithm_set(&self) -> Vec<Algorithm> {
        let mut algs = self.algorithms.clone();
        algs.sort();
        algs.dedup();
        algs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub node_id: NodeId,
    pub truth: Point,
    pub estimates: BTreeMap<Algorithm, Point>,
    pub errors: BTreeMap<Algorithm, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub density: usize,
    pub run_index: usize,
    pub seed: u64,
    pub nodes: Vec<NodeRecord>,
    pub run_mean_error: BTreeMap<Algorithm, f64>,
}

/// Euclidean distance between true and estimated positions.
pub fn localization_error(truth: Point, estimate: Point) -> f64 {
    ((truth.x - estimate.x).powi(2) + (truth.y - estimate.y).powi(2)).sqrt()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation.
fn std_dev(values: &[f64], mean: f64) -> f64 {
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Simulates one run: deployment, graph, then every configured algorithm on
/// every unknown node.
pub fn simulate_run(
    cfg: &ExperimentConfig,
    density: usize,
    run_index: usize,
) -> Result<RunRecord, ExperimentError> {
    let seed = rng::run_seed(cfg.base_seed, density, run_index);
    let gen_err = |source| ExperimentError::GenerationFailed {
        density,
        run_index,
        source,
    };
    let loc_err = |source| ExperimentError::Localization {
        density,
        run_index,
        source,
    };

    let dep = generate_deployment(&cfg.deployment_config(density), seed).map_err(gen_err)?;
    let model = cfg.model()?;
    let g = build_graph(&dep, &model, &mut rng::stream(seed, Stream::Noise));
    let ranging = AnchorRanging::new(&g, &dep.anchor_ids).map_err(|e| loc_err(e.into()))?;
    let hops: BTreeMap<NodeId, Vec<usize>> = dep
        .anchor_ids
        .iter()
        .map(|&a| min_hops(&g, a).map(|h| (a, h)))
        .collect::<Result<_, _>>()
        .map_err(|e| loc_err(e.into()))?;
    let localizer = RailLocalizer::new(&dep, &g, &ranging);
    let algorithms = cfg.algorithm_set();

    let mut nodes = Vec::new();
    for target in dep.unknown_ids() {
        let truth = dep.nodes[target];
        let anchors = localizer.anchors_for(target).map_err(loc_err)?;
        let mut estimates = BTreeMap::new();
        for &alg in &algorithms {
            let est = match alg {
                Algorithm::MinMax => {
                    let input: Vec<(Point, usize)> = anchors
                        .iter()
                        .map(|&a| (dep.nodes[a], hops[&a][target]))
                        .collect();
                    baselines::min_max(&input, dep.comm_range).position
                }
                Algorithm::RssiDvHop => {
                    let mut input = [(Point::default(), 0.0); 3];
                    for (slot, &a) in input.iter_mut().zip(&anchors) {
                        let sd =
                            ranging
                                .tree(a)
                                .and_then(|t| t.distance(target))
                                .ok_or(loc_err(RailError::Network(NetworkError::Unreachable {
                                    from: a,
                                    target,
                                })))?;
                        *slot = (dep.nodes[a], sd);
                    }
                    baselines::rssi_dv_hop(&input).position
                }
                Algorithm::Rail => localizer.localize(target).map_err(loc_err)?.estimate,
            };
            estimates.insert(alg, est);
        }
        let errors = estimates
            .iter()
            .map(|(&alg, &est)| (alg, localization_error(truth, est)))
            .collect();
        nodes.push(NodeRecord {
            node_id: target,
            truth,
            estimates,
            errors,
        });
    }

    let run_mean_error = algorithms
        .iter()
        .map(|&alg| {
            let errs: Vec<f64> = nodes.iter().map(|n| n.errors[&alg]).collect();
            (alg, mean(&errs))
        })
        .collect();
    Ok(RunRecord {
        density,
        run_index,
        seed,
        nodes,
        run_mean_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub algorithm: Algorithm,
    pub density: usize,
    pub mean_error: f64,
    pub std_error: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub algorithm: Algorithm,
    pub density: usize,
    pub run_index: usize,
    pub seed: u64,
    pub mean_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: Option<ExperimentConfig>,
    /// One row per (algorithm, density): algorithms in canonical order,
    /// densities in first-seen order.
    pub summaries: Vec<Summary>,
    pub runs: Vec<RunSummary>,
    pub records: Vec<RunRecord>,
}

impl ExperimentReport {
    pub fn summary(&self, algorithm: Algorithm, density: usize) -> Option<&Summary> {
        self.summaries
            .iter()
            .find(|s| s.algorithm == algorithm && s.density == density)
    }

    /// `algorithm,density,mean_error_m,std_error_m`
    pub fn report_csv(&self) -> String {
        let mut out = String::from("algorithm,density,mean_error_m,std_error_m\n");
        for s in &self.summaries {
            let _ = writeln!(
                out,
                "{},{},{:.4},{:.4}",
                s.algorithm, s.density, s.mean_error, s.std_error
            );
        }
        out
    }

    /// `algorithm,density,run_index,seed,run_mean_error_m`
    pub fn runs_csv(&self) -> String {
        let mut out = String::from("algorithm,density,run_index,seed,run_mean_error_m\n");
        for r in &self.runs {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.4}",
                r.algorithm, r.density, r.run_index, r.seed, r.mean_error
            );
        }
        out
    }

    /// Long format, one row per (algorithm, run, node).
    pub fn errors_csv(&self) -> String {
        let mut out =
            String::from("algorithm,density,run_index,node_id,true_x,true_y,est_x,est_y,error_m\n");
        for alg in self.algorithms() {
            for rec in &self.records {
                for n in &rec.nodes {
                    let (Some(est), Some(err)) = (n.estimates.get(&alg), n.errors.get(&alg)) else {
                        continue;
                    };
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{:.4},{:.4},{:.4},{:.4},{:.4}",
                        alg,
                        rec.density,
                        rec.run_index,
                        n.node_id,
                        n.truth.x,
                        n.truth.y,
                        est.x,
                        est.y,
                        err
                    );
                }
            }
        }
        out
    }

    pub fn algorithms(&self) -> Vec<Algorithm> {
        let mut algs: Vec<Algorithm> = self.summaries.iter().map(|s| s.algorithm).collect();
        algs.dedup();
        algs
    }

    /// Table of means and standard deviations, densities as rows.
    pub fn summary_table(&self) -> String {
        let algs = self.algorithms();
        let mut densities: Vec<usize> = Vec::new();
        for s in &self.summaries {
            if !densities.contains(&s.density) {
                densities.push(s.density);
            }
        }
        let mut out = String::new();
        for (title, pick) in [
            (
                "Mean Error (m)",
                (|s: &Summary| s.mean_error) as fn(&Summary) -> f64,
            ),
            ("Standard Deviation Error (m)", |s: &Summary| s.std_error),
        ] {
            let _ = writeln!(out, "{title}");
            let _ = write!(out, "{:>8}", "Nodes");
            for a in &algs {
                let _ = write!(out, " {:>12}", a.label());
            }
            out.push('\n');
            for d in &densities {
                let _ = write!(out, "{d:>8}");
                for a in &algs {
                    match self.summary(*a, *d) {
                        Some(s) => {
                            let _ = write!(out, " {:>12.4}", pick(s));
                        }
                        None => {
                            let _ = write!(out, " {:>12}", "-");
                        }
                    }
                }
                out.push('\n');
            }
            out.push('\n');
        }
        out
    }
}

/// Pooled per-node mean and population standard deviation per (algorithm,
/// density), plus the per-run mean series.
pub fn aggregate(records: &[RunRecord]) -> Result<ExperimentReport, ExperimentError> {
    if records.is_empty() {
        return Err(ExperimentError::NoRecords);
    }
    let mut densities: Vec<usize> = Vec::new();
    for r in records {
        if !densities.contains(&r.density) {
            densities.push(r.density);
        }
    }
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by_key(|r| {
        (
            densities
                .iter()
                .position(|d| *d == r.density)
                .expect("seen"),
            r.run_index,
        )
    });
    let mut algorithms: Vec<Algorithm> = records
        .iter()
        .flat_map(|r| r.run_mean_error.keys().copied())
        .collect();
    algorithms.sort();
    algorithms.dedup();

    let mut summaries = Vec::new();
    let mut runs = Vec::new();
    for &alg in &algorithms {
        for &density in &densities {
            let pooled: Vec<f64> = sorted
                .iter()
                .filter(|r| r.density == density)
                .flat_map(|r| r.nodes.iter().filter_map(|n| n.errors.get(&alg).copied()))
                .collect();
            if pooled.is_empty() {
                continue;
            }
            let m = mean(&pooled);
            summaries.push(Summary {
                algorithm: alg,
                density,
                mean_error: m,
                std_error: std_dev(&pooled, m),
                samples: pooled.len(),
            });
            for r in sorted.iter().filter(|r| r.density == density) {
                if let Some(&mean_error) = r.run_mean_error.get(&alg) {
                    runs.push(RunSummary {
                        algorithm: alg,
                        density,
                        run_index: r.run_index,
                        seed: r.seed,
                        mean_error,
                    });
                }
            }
        }
    }
    Ok(ExperimentReport {
        config: None,
        summaries,
        runs,
        records: sorted.into_iter().cloned().collect(),
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    run_experiment_with(cfg, Execution::Parallel)
}

pub fn run_experiment_with(
    cfg: &ExperimentConfig,
    execution: Execution,
) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = cfg
        .densities
        .iter()
        .flat_map(|&d| (0..cfg.runs_per_density).map(move |r| (d, r)))
        .collect();
    let records: Vec<RunRecord> = match execution {
        Execution::Serial => jobs
            .iter()
            .map(|&(d, r)| simulate_run(cfg, d, r))
            .collect::<Result<_, _>>()?,
        Execution::Parallel => jobs
            .par_iter()
            .map(|&(d, r)| simulate_run(cfg, d, r))
            .collect::<Result<_, _>>()?,
    };
    let mut report = aggregate(&records)?;
    report.config = Some(cfg.clone());
    Ok(report)
}
