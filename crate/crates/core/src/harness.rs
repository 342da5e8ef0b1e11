//! Simulation sweeps and real-network noise sweeps.
//!
//! Each (sweep cell, replicate) pair owns a random stream derived from
//! `(base_seed, cell, replicate)`, and records come back ordered by
//! (cell, replicate, method). Serial and parallel runs therefore produce
//! identical output.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::clustering::KMeansConfig;
use crate::detect::{detect_from_embedding, Method};
use crate::error::{Error, Result};
use crate::metrics::error_rate;
use crate::model::{
    build_omega, sample_adjacency_rng, sample_labeling, ConnectivityMatrix, DomainPolicy,
    EdgeDistribution, Heterogeneity, Labeling, ModelParams,
};
use crate::netio::{add_noise, NetworkDataset};
use crate::rng::{self, derive_seed, tag};
use crate::spectral::leading_eigs;

/// Connectivity matrix of the Normal-distribution experiments (signed entries).
pub const P_SIGNED: [[f64; 4]; 4] = [
    [-1.0, -0.4, 0.5, 0.2],
    [-0.4, 0.9, 0.2, -0.2],
    [0.5, 0.2, 0.8, 0.3],
    [0.2, -0.2, 0.3, -0.9],
];

/// Connectivity matrix of the Binomial, Bernoulli and Poisson experiments.
pub const P_NONNEGATIVE: [[f64; 4]; 4] = [
    [1.0, 0.4, 0.5, 0.2],
    [0.4, 0.9, 0.2, 0.2],
    [0.5, 0.2, 0.8, 0.3],
    [0.2, 0.2, 0.3, 0.9],
];

pub fn connectivity(p: &[[f64; 4]; 4]) -> ConnectivityMatrix {
    ConnectivityMatrix::new(DMatrix::from_fn(4, 4, |i, j| p[i][j])).expect("preset is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentId {
    E1a,
    E1b,
    E2a,
    E2b,
    E3,
    E4,
    RealNoise,
    Custom,
}

impl ExperimentId {
    pub const PRESETS: [ExperimentId; 6] = [
        ExperimentId::E1a,
        ExperimentId::E1b,
        ExperimentId::E2a,
        ExperimentId::E2b,
        ExperimentId::E3,
        ExperimentId::E4,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::E1a => "E1a",
            ExperimentId::E1b => "E1b",
            ExperimentId::E2a => "E2a",
            ExperimentId::E2b => "E2b",
            ExperimentId::E3 => "E3",
            ExperimentId::E4 => "E4",
            ExperimentId::RealNoise => "RealNoise",
            ExperimentId::Custom => "Custom",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        [
            ExperimentId::E1a,
            ExperimentId::E1b,
            ExperimentId::E2a,
            ExperimentId::E2b,
            ExperimentId::E3,
            ExperimentId::E4,
            ExperimentId::RealNoise,
            ExperimentId::Custom,
        ]
        .into_iter()
        .find(|id| id.as_str().eq_ignore_ascii_case(s))
        .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

/// How the heterogeneity scale `rho` maps to node weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThetaScale {
    /// `theta(i) = rho * U(0,1)`.
    Linear,
    /// `theta(i) = sqrt(rho) * U(0,1)`, so that `|Omega(i,j)| <= rho`.
    #[default]
    Sqrt,
}

impl ThetaScale {
    pub fn factor(&self, rho: f64) -> f64 {
        match self {
            ThetaScale::Linear => rho,
            ThetaScale::Sqrt => rho.sqrt(),
        }
    }
}

impl FromStr for ThetaScale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "linear" => Ok(ThetaScale::Linear),
            "sqrt" => Ok(ThetaScale::Sqrt),
            _ => Err(format!("unknown theta scale `{s}` (expected linear or sqrt)")),
        }
    }
}

/// The model parameter varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Heterogeneity scale, see [`ThetaScale`].
    Rho,
    /// Normal edge variance.
    NormalVariance,
    /// Binomial trial count.
    Trials,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::Rho => "rho",
            SweepParam::NormalVariance => "sigma2_A",
            SweepParam::Trials => "m",
        }
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "rho" => Ok(SweepParam::Rho),
            "sigma2_A" | "sigma2" | "variance" => Ok(SweepParam::NormalVariance),
            "m" | "trials" => Ok(SweepParam::Trials),
            _ => Err(format!("unknown sweep parameter `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    pub n: usize,
    pub k: usize,
    pub connectivity: ConnectivityMatrix,
    /// Base distribution; the swept parameter overrides its field.
    pub distribution: EdgeDistribution,
    /// Base heterogeneity scale; overridden when sweeping `rho`.
    pub rho: f64,
    pub sweep: SweepParam,
    pub values: Vec<f64>,
    pub replicates: usize,
    pub base_seed: u64,
    pub restarts: usize,
    pub domain: DomainPolicy,
    pub theta_scale: ThetaScale,
}

fn grid(lo: usize, hi: usize, div: f64) -> Vec<f64> {
    (lo..=hi).map(|i| i as f64 / div).collect()
}

impl ExperimentSpec {
    /// Built-in experiment settings: `n = 400`, `K = 4`, 50 replicates.
    ///
    /// Node weights are `sqrt(rho) U(0,1)`, so `|Omega(i,j)| <= rho` and the
    /// Binomial sweep stays below `m`. The Bernoulli sweep reaches `rho = 2`
    /// and clips its means to 1.
    pub fn preset(id: ExperimentId) -> Option<Self> {
        let base = |p: &[[f64; 4]; 4], distribution, rho, sweep, values| ExperimentSpec {
            id,
            n: 400,
            k: 4,
            connectivity: connectivity(p),
            distribution,
            rho,
            sweep,
            values,
            replicates: 50,
            base_seed: 0,
            restarts: 20,
            domain: DomainPolicy::Strict,
            theta_scale: ThetaScale::default(),
        };
        let spec = match id {
            ExperimentId::E1a => base(
                &P_SIGNED,
                EdgeDistribution::Normal { variance: 4.0 },
                1.0,
                SweepParam::Rho,
                grid(1, 10, 1.0),
            ),
            ExperimentId::E1b => base(
                &P_SIGNED,
                EdgeDistribution::Normal { variance: 1.0 },
                10.0,
                SweepParam::NormalVariance,
                grid(1, 10, 1.0),
            ),
            ExperimentId::E2a => base(
                &P_NONNEGATIVE,
                EdgeDistribution::Binomial { trials: 5 },
                1.0,
                SweepParam::Rho,
                grid(1, 8, 2.0),
            ),
            ExperimentId::E2b => base(
                &P_NONNEGATIVE,
                EdgeDistribution::Binomial { trials: 1 },
                1.0,
                SweepParam::Trials,
                grid(1, 20, 1.0),
            ),
            ExperimentId::E3 => ExperimentSpec {
                domain: DomainPolicy::Clip,
                ..base(
                    &P_NONNEGATIVE,
                    EdgeDistribution::Bernoulli,
                    1.0,
                    SweepParam::Rho,
                    grid(1, 20, 10.0),
                )
            },
            ExperimentId::E4 => base(
                &P_NONNEGATIVE,
                EdgeDistribution::Poisson,
                1.0,
                SweepParam::Rho,
                grid(1, 20, 10.0),
            ),
            ExperimentId::RealNoise | ExperimentId::Custom => return None,
        };
        Some(spec)
    }

    pub fn with_replicates(mut self, replicates: usize) -> Self {
        self.replicates = replicates;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn with_values(mut self, values: Vec<f64>) -> Self {
        self.values = values;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidConfig("sweep has no values".into()));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be at least 1".into()));
        }
        if self.k != self.connectivity.k() {
            return Err(Error::DimensionMismatch(format!(
                "K = {} but P is {}x{}",
                self.k,
                self.connectivity.k(),
                self.connectivity.k()
            )));
        }
        if self.n < self.k {
            return Err(Error::InvalidConfig(format!("n = {} is smaller than K = {}", self.n, self.k)));
        }
        for &v in &self.values {
            self.cell(v)?;
        }
        Ok(())
    }

    /// `(rho, distribution)` for one sweep value.
    pub fn cell(&self, value: f64) -> Result<(f64, EdgeDistribution)> {
        let bad = |msg: String| Error::Sweep {
            param: self.sweep.name(),
            value,
            source: Box::new(Error::InvalidConfig(msg)),
        };
        let (rho, dist) = match self.sweep {
            SweepParam::Rho => (value, self.distribution),
            SweepParam::NormalVariance => match self.distribution {
                EdgeDistribution::Normal { .. } => (self.rho, EdgeDistribution::Normal { variance: value }),
                d => return Err(bad(format!("cannot sweep sigma2_A for a {} model", d.name()))),
            },
            SweepParam::Trials => match self.distribution {
                EdgeDistribution::Binomial { .. } if value >= 1.0 && value.fract() == 0.0 => {
                    (self.rho, EdgeDistribution::Binomial { trials: value as u64 })
                }
                EdgeDistribution::Binomial { .. } => {
                    return Err(bad(format!("trial count must be a positive integer, got {value}")))
                }
                d => return Err(bad(format!("cannot sweep m for a {} model", d.name()))),
            },
        };
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(bad(format!("rho must be positive, got {rho}")));
        }
        dist.validate().map_err(|e| Error::Sweep {
            param: self.sweep.name(),
            value,
            source: Box::new(e),
        })?;
        Ok((rho, dist))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub param_name: String,
    pub param_value: f64,
    /// Position of `param_value` in the sweep.
    pub param_index: usize,
    pub replicate: usize,
    pub method: Method,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub experiment: String,
    pub param_name: String,
    pub param_value: f64,
    pub method: Method,
    pub mean_error: f64,
    pub stderr: f64,
    pub replicates: usize,
}

/// Draws one model instance of `spec` at sweep `value` for replicate stream `seed`.
pub fn draw_instance(
    spec: &ExperimentSpec,
    rho: f64,
    seed: u64,
) -> Result<ModelParams> {
    let labeling = sample_labeling(spec.n, spec.k, &mut rng::stream(seed, &[tag::LABELS]))?;
    let theta = Heterogeneity::sample_scaled_uniform(
        spec.n,
        spec.theta_scale.factor(rho),
        &mut rng::stream(seed, &[tag::THETA]),
    )?;
    ModelParams::new(labeling, spec.connectivity.clone(), theta)
}

fn both_methods(
    a: &DMatrix<f64>,
    truth: &Labeling,
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<[f64; 2]> {
    let embedding = leading_eigs(a, k)?;
    let config = KMeansConfig::new(k, derive_seed(seed, &[tag::KMEANS])).with_restarts(restarts);
    let mut out = [0.0; 2];
    for (slot, method) in out.iter_mut().zip(Method::ALL) {
        let det = detect_from_embedding(&embedding, method, &config)?;
        *slot = error_rate(&det.labeling, truth)?;
    }
    Ok(out)
}

fn run_grid<F>(cells: usize, replicates: usize, parallel: bool, job: F) -> Result<Vec<[f64; 2]>>
where
    F: Fn(usize, usize) -> Result<[f64; 2]> + Sync,
{
    let jobs: Vec<(usize, usize)> = (0..cells)
        .flat_map(|c| (0..replicates).map(move |r| (c, r)))
        .collect();
    let results: Vec<Result<[f64; 2]>> = if parallel {
        jobs.par_iter().map(|&(c, r)| job(c, r)).collect()
    } else {
        jobs.iter().map(|&(c, r)| job(c, r)).collect()
    };
    results.into_iter().collect()
}

fn to_records(
    experiment: &str,
    param_name: &str,
    values: &[f64],
    replicates: usize,
    errors: Vec<[f64; 2]>,
) -> Vec<ExperimentRecord> {
    let mut out = Vec::with_capacity(errors.len() * 2);
    for (idx, errs) in errors.into_iter().enumerate() {
        let (c, r) = (idx / replicates, idx % replicates);
        for (method, error) in Method::ALL.into_iter().zip(errs) {
            out.push(ExperimentRecord {
                experiment: experiment.to_string(),
                param_name: param_name.to_string(),
                param_value: values[c],
                param_index: c,
                replicate: r,
                method,
                error,
            });
        }
    }
    out
}

/// Runs every (sweep value, replicate) cell of `spec`, scoring both methods
/// on the same sampled matrix.
pub fn run_simulation(spec: &ExperimentSpec, parallel: bool) -> Result<Vec<ExperimentRecord>> {
    spec.validate()?;
    let errors = run_grid(spec.values.len(), spec.replicates, parallel, |c, r| {
        let value = spec.values[c];
        let wrap = |e: Error| Error::Sweep {
            param: spec.sweep.name(),
            value,
            source: Box::new(e),
        };
        let (rho, dist) = spec.cell(value)?;
        let seed = derive_seed(spec.base_seed, &[c as u64, r as u64]);
        let params = draw_instance(spec, rho, seed).map_err(wrap)?;
        let omega = build_omega(&params);
        let a = sample_adjacency_rng(
            &omega,
            &dist,
            &mut rng::stream(seed, &[tag::ADJACENCY]),
            spec.domain,
        )
        .map_err(wrap)?;
        both_methods(a.matrix(), params.labeling(), spec.k, spec.restarts, seed).map_err(wrap)
    })?;
    Ok(to_records(
        spec.id.as_str(),
        spec.sweep.name(),
        &spec.values,
        spec.replicates,
        errors,
    ))
}

/// Adds symmetric Gaussian noise of each variance in `sigma2_grid` to the
/// dataset and scores both methods against its ground truth.
pub fn run_real_noise(
    dataset: &NetworkDataset,
    sigma2_grid: &[f64],
    replicates: usize,
    base_seed: u64,
    restarts: usize,
    parallel: bool,
) -> Result<Vec<ExperimentRecord>> {
    let truth = dataset
        .truth
        .as_ref()
        .ok_or_else(|| Error::MissingGroundTruth(dataset.name.clone()))?;
    if sigma2_grid.is_empty() || replicates == 0 {
        return Err(Error::InvalidConfig("noise grid and replicates must be non-empty".into()));
    }
    let k = truth.k();
    let errors = run_grid(sigma2_grid.len(), replicates, parallel, |c, r| {
        let seed = derive_seed(base_seed, &[c as u64, r as u64]);
        let noisy = add_noise(&dataset.adjacency, sigma2_grid[c], derive_seed(seed, &[tag::NOISE]))?;
        both_methods(noisy.matrix(), truth, k, restarts, seed)
    })?;
    Ok(to_records(
        &dataset.name,
        "sigma2_W",
        sigma2_grid,
        replicates,
        errors,
    ))
}

/// Mean error and standard error per (sweep value, method).
pub fn summarize(records: &[ExperimentRecord]) -> Vec<SummaryRow> {
    // (experiment, value index, method) -> (param name, value, errors)
    type Group = (String, f64, Vec<f64>);
    let mut groups: BTreeMap<(String, usize, Method), Group> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.experiment.clone(), r.param_index, r.method))
            .or_insert_with(|| (r.param_name.clone(), r.param_value, Vec::new()))
            .2
            .push(r.error);
    }
    groups
        .into_iter()
        .map(|((experiment, _, method), (param_name, param_value, mut errs))| {
            // order-independent sum
            errs.sort_by(f64::total_cmp);
            let n = errs.len() as f64;
            let mean = errs.iter().sum::<f64>() / n;
            let stderr = if errs.len() > 1 {
                (errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() / n.sqrt()
            } else {
                0.0
            };
            SummaryRow {
                experiment,
                param_name,
                param_value,
                method,
                mean_error: mean,
                stderr,
                replicates: errs.len(),
            }
        })
        .collect()
}

/// Mean errors of `method` in sweep order.
pub fn mean_curve(summary: &[SummaryRow], method: Method) -> Vec<(f64, f64)> {
    summary
        .iter()
        .filter(|s| s.method == method)
        .map(|s| (s.param_value, s.mean_error))
        .collect()
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &p in &idx[i..=j] {
            out[p] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

/// Ordered `key=value` lines; `#` starts a comment, keys may repeat.
#[derive(Debug, Clone, Default)]
pub struct KeyValues(Vec<(String, String, usize)>);

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, 1, "expected key=value"))?;
            out.push((k.trim().to_string(), v.trim().to_string(), i + 1));
        }
        Ok(Self(out))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().rev().find(|(k, _, _)| k == key).map(|(_, v, _)| v.as_str())
    }

    fn line_of(&self, key: &str) -> usize {
        self.0.iter().rev().find(|(k, _, _)| k == key).map_or(1, |e| e.2)
    }

    pub fn all(&self, key: &str) -> Vec<&str> {
        self.0.iter().filter(|(k, _, _)| k == key).map(|(_, v, _)| v.as_str()).collect()
    }

    pub fn parse_value<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::parse(self.line_of(key), 1, format!("invalid value `{v}` for `{key}`"))),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.parse_value(key)?
            .ok_or_else(|| Error::parse(1, 1, format!("missing required key `{key}`")))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => parse_list(v)
                .map(Some)
                .map_err(|_| Error::parse(self.line_of(key), 1, format!("invalid list for `{key}`"))),
        }
    }

    /// Connectivity matrix from repeated `P=` row lines, or `P=row;row` on one line.
    pub fn connectivity(&self) -> Result<ConnectivityMatrix> {
        let lines = self.all("P");
        if lines.is_empty() {
            return Err(Error::parse(1, 1, "missing required key `P`"));
        }
        let rows: Vec<&str> = lines.iter().flat_map(|l| l.split(';')).collect();
        let rows: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| parse_list(r))
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(self.line_of("P"), 1, "P rows must be comma lists of numbers"))?;
        ConnectivityMatrix::from_rows(&rows)
    }

    pub fn distribution(&self) -> Result<EdgeDistribution> {
        let name: String = self.require("distribution")?;
        let d = match name.to_ascii_lowercase().as_str() {
            "normal" => EdgeDistribution::Normal {
                variance: self.require("sigma2")?,
            },
            "binomial" => EdgeDistribution::Binomial {
                trials: self.require("m")?,
            },
            "bernoulli" => EdgeDistribution::Bernoulli,
            "poisson" => EdgeDistribution::Poisson,
            other => {
                return Err(Error::parse(
                    self.line_of("distribution"),
                    1,
                    format!("unknown distribution `{other}`"),
                ))
            }
        };
        d.validate()?;
        Ok(d)
    }

    pub fn domain(&self) -> Result<DomainPolicy> {
        match self.get("domain") {
            None | Some("strict") => Ok(DomainPolicy::Strict),
            Some("clip") => Ok(DomainPolicy::Clip),
            Some(other) => Err(Error::parse(
                self.line_of("domain"),
                1,
                format!("unknown domain policy `{other}`"),
            )),
        }
    }

    pub fn theta_scale(&self) -> Result<ThetaScale> {
        match self.get("theta_scale") {
            None => Ok(ThetaScale::default()),
            Some(v) => v.parse().map_err(|e: String| Error::parse(self.line_of("theta_scale"), 1, e)),
        }
    }
}

fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, ()> {
    s.split(',')
        .map(|x| x.trim())
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| ()))
        .collect()
}

/// A model description as read by the CLI: explicit labels and theta, or
/// `rho` and `seed` to draw them.
#[derive(Debug, Clone)]
pub struct ParamsFile {
    pub params: ModelParams,
    pub distribution: EdgeDistribution,
    pub seed: u64,
    pub domain: DomainPolicy,
}

impl ParamsFile {
    pub fn parse(text: &str) -> Result<Self> {
        let kv = KeyValues::parse(text)?;
        let k: usize = kv.require("K")?;
        let p = kv.connectivity()?;
        let distribution = kv.distribution()?;
        let seed: u64 = kv.parse_value("seed")?.unwrap_or(0);
        let domain = kv.domain()?;
        let labeling = match kv.list::<usize>("labels")? {
            Some(l) => Labeling::from_one_based(&l)?,
            None => {
                let n: usize = kv.require("n")?;
                sample_labeling(n, k, &mut rng::stream(seed, &[tag::LABELS]))?
            }
        };
        if labeling.k() != k {
            return Err(Error::DimensionMismatch(format!(
                "labels use {} communities but K = {k}",
                labeling.k()
            )));
        }
        let theta = match kv.list::<f64>("theta")? {
            Some(t) => Heterogeneity::new(t)?,
            None => {
                let rho: f64 = kv.require("rho")?;
                let scale = kv.theta_scale()?.factor(rho);
                Heterogeneity::sample_scaled_uniform(labeling.n(), scale, &mut rng::stream(seed, &[tag::THETA]))?
            }
        };
        if let Some(n) = kv.parse_value::<usize>("n")? {
            if n != labeling.n() {
                return Err(Error::DimensionMismatch(format!("n = {n} but {} labels given", labeling.n())));
            }
        }
        Ok(Self {
            params: ModelParams::new(labeling, p, theta)?,
            distribution,
            seed,
            domain,
        })
    }
}

/// Parses an experiment description file (`--spec`).
///
/// Keys: `experiment`, `n`, `K`, `P`, `distribution`, `sigma2`, `m`, `rho`,
/// `sweep`, `values`, `replicates`, `seed`, `restarts`, `domain`, `theta_scale`.
pub fn parse_experiment_spec(text: &str) -> Result<ExperimentSpec> {
    let kv = KeyValues::parse(text)?;
    let id = match kv.get("experiment") {
        Some(s) => s.parse().map_err(|e: String| Error::parse(1, 1, e))?,
        None => ExperimentId::Custom,
    };
    let sweep: SweepParam = kv
        .get("sweep")
        .unwrap_or("rho")
        .parse()
        .map_err(|e: String| Error::parse(1, 1, e))?;
    // the swept field of the distribution may be omitted
    let distribution = match (kv.get("distribution"), sweep) {
        (Some(d), SweepParam::NormalVariance) if kv.get("sigma2").is_none() && d.eq_ignore_ascii_case("normal") => {
            EdgeDistribution::Normal { variance: 1.0 }
        }
        (Some(d), SweepParam::Trials) if kv.get("m").is_none() && d.eq_ignore_ascii_case("binomial") => {
            EdgeDistribution::Binomial { trials: 1 }
        }
        _ => kv.distribution()?,
    };
    let spec = ExperimentSpec {
        id,
        n: kv.require("n")?,
        k: kv.require("K")?,
        connectivity: kv.connectivity()?,
        distribution,
        rho: kv.parse_value("rho")?.unwrap_or(1.0),
        sweep,
        values: kv
            .list("values")?
            .ok_or_else(|| Error::parse(1, 1, "missing required key `values`"))?,
        replicates: kv.parse_value("replicates")?.unwrap_or(50),
        base_seed: kv.parse_value("seed")?.unwrap_or(0),
        restarts: kv.parse_value("restarts")?.unwrap_or(20),
        domain: kv.domain()?,
        theta_scale: kv.theta_scale()?,
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for id in ExperimentId::PRESETS {
            let spec = ExperimentSpec::preset(id).unwrap();
            spec.validate().unwrap();
            assert_eq!(spec.replicates, 50);
        }
        let e3 = ExperimentSpec::preset(ExperimentId::E3).unwrap();
        assert_eq!(e3.values.len(), 20);
        assert_eq!(e3.values[0], 0.1);
        assert_eq!(e3.values[19], 2.0);
        let e2a = ExperimentSpec::preset(ExperimentId::E2a).unwrap();
        assert_eq!(e2a.values, vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]);
    }

    #[test]
    fn spearman_basics() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0], &[1.0, 5.0, 9.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn strict_bernoulli_sweep_reports_value() {
        let spec = ExperimentSpec {
            domain: DomainPolicy::Strict,
            n: 40,
            ..ExperimentSpec::preset(ExperimentId::E3).unwrap()
        }
        .with_values(vec![0.5, 2.0])
        .with_replicates(1);
        match run_simulation(&spec, false).unwrap_err() {
            Error::Sweep { param, value, source } => {
                assert_eq!(param, "rho");
                assert_eq!(value, 2.0);
                assert!(matches!(*source, Error::DistributionDomain { .. }));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn summary_statistics() {
        let mk = |rep, error| ExperimentRecord {
            experiment: "X".into(),
            param_name: "rho".into(),
            param_value: 1.0,
            param_index: 0,
            replicate: rep,
            method: Method::Normalized,
            error,
        };
        let s = summarize(&[mk(0, 0.1), mk(1, 0.3)]);
        assert_eq!(s.len(), 1);
        assert!((s[0].mean_error - 0.2).abs() < 1e-15);
        assert!((s[0].stderr - 0.1).abs() < 1e-12);
        assert_eq!(s[0].replicates, 2);
    }

    #[test]
    fn params_file_draws_reproducibly() {
        let text = "n=12\nK=2\nP=1,0.2\nP=0.2,0.8\ndistribution=poisson\nrho=1.5\nseed=4\n";
        let a = ParamsFile::parse(text).unwrap();
        let b = ParamsFile::parse(text).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.params.n(), 12);
        let explicit = "K=2\nP=1,0;0,1\ndistribution=normal\nsigma2=2\nlabels=1,2,2\ntheta=1,2,3\n";
        let c = ParamsFile::parse(explicit).unwrap();
        assert_eq!(c.params.theta().values(), &[1.0, 2.0, 3.0]);
        assert!(ParamsFile::parse("K=2\nP=1,0;0,1\ndistribution=cauchy\n").is_err());
    }

    #[test]
    fn spec_file() {
        let text = "experiment=Custom\nn=30\nK=2\nP=1,0.1;0.1,0.7\ndistribution=normal\nsweep=sigma2_A\nrho=3\nvalues=1,2\nreplicates=2\nseed=9\n";
        let spec = parse_experiment_spec(text).unwrap();
        assert_eq!(spec.sweep, SweepParam::NormalVariance);
        assert_eq!(spec.values, vec![1.0, 2.0]);
        let recs = run_simulation(&spec, false).unwrap();
        assert_eq!(recs.len(), 2 * 2 * 2);
    }
}
