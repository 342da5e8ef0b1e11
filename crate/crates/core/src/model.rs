//! Model parameters, expectation matrix and edge-weight samplers.
//!
//! A model instance is a labeling of `n` nodes into `K` non-empty
//! communities, a symmetric full-rank `K x K` connectivity matrix with
//! largest absolute entry 1, and a positive heterogeneity weight per node.
//! Its expectation matrix is `Omega(i,j) = theta(i) theta(j) P(l(i), l(j))`.

use nalgebra::DMatrix;
use rand::distr::{Bernoulli, Distribution};
use rand::Rng;
use rand_distr::{Binomial, Normal, Poisson};

use crate::error::{Error, Result, Violation};
use crate::rng::{self, StreamRng};

/// Relative threshold on `sigma_K(P) / sigma_1(P)` below which P counts as singular.
pub const RANK_TOLERANCE: f64 = 1e-10;
/// Allowed deviation of `max |P(k,l)|` from 1.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;
/// Allowed asymmetry of P.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Community assignment of `n` nodes into `k` non-empty communities.
///
/// Labels are stored 0-based; files and the Python bindings use 1-based labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    labels: Vec<usize>,
    k: usize,
}

impl Labeling {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        let violations = Self::check(&labels, k);
        if violations.is_empty() {
            Ok(Self { labels, k })
        } else {
            Err(Error::Invalid(violations))
        }
    }

    /// Builds a labeling from 1-based labels, inferring `k` as the largest label.
    pub fn from_one_based(labels: &[usize]) -> Result<Self> {
        let mut zero_based = Vec::with_capacity(labels.len());
        for (node, &l) in labels.iter().enumerate() {
            if l == 0 {
                return Err(Error::Invalid(vec![Violation::LabelOutOfRange { node, label: 0 }]));
            }
            zero_based.push(l - 1);
        }
        let k = zero_based.iter().max().map_or(0, |m| m + 1);
        Self::new(zero_based, k)
    }

    fn check(labels: &[usize], k: usize) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut sizes = vec![0usize; k];
        for (node, &l) in labels.iter().enumerate() {
            if l >= k {
                out.push(Violation::LabelOutOfRange { node, label: l });
            } else {
                sizes[l] += 1;
            }
        }
        for (community, &s) in sizes.iter().enumerate() {
            if s == 0 {
                out.push(Violation::EmptyCommunity { community });
            }
        }
        out
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l + 1).collect()
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Community sizes `n_k`.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn n_min(&self) -> usize {
        self.sizes().into_iter().min().unwrap_or(0)
    }

    pub fn n_max(&self) -> usize {
        self.sizes().into_iter().max().unwrap_or(0)
    }

    /// The `n x K` one-hot membership matrix `Z`.
    pub fn membership_matrix(&self) -> DMatrix<f64> {
        let mut z = DMatrix::zeros(self.n(), self.k);
        for (i, &l) in self.labels.iter().enumerate() {
            z[(i, l)] = 1.0;
        }
        z
    }
}

/// Symmetric, full-rank `K x K` connectivity matrix with `max |P(k,l)| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityMatrix(DMatrix<f64>);

impl ConnectivityMatrix {
    pub fn new(p: DMatrix<f64>) -> Result<Self> {
        let violations = Self::check(&p);
        if violations.is_empty() {
            Ok(Self(p))
        } else {
            Err(Error::Invalid(violations))
        }
    }

    /// Builds a connectivity matrix from row vectors.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != k) {
            return Err(Error::Invalid(vec![Violation::DimensionMismatch {
                what: "connectivity matrix row length",
                expected: k,
                found: bad.len(),
            }]));
        }
        Self::new(DMatrix::from_fn(k, k, |i, j| rows[i][j]))
    }

    fn check(p: &DMatrix<f64>) -> Vec<Violation> {
        let mut out = Vec::new();
        if p.nrows() != p.ncols() {
            out.push(Violation::DimensionMismatch {
                what: "connectivity matrix columns",
                expected: p.nrows(),
                found: p.ncols(),
            });
            return out;
        }
        if p.nrows() == 0 {
            out.push(Violation::DimensionMismatch {
                what: "connectivity matrix size",
                expected: 1,
                found: 0,
            });
            return out;
        }
        let k = p.nrows();
        'outer: for i in 0..k {
            for j in (i + 1)..k {
                let diff = (p[(i, j)] - p[(j, i)]).abs();
                if diff.is_nan() || diff > SYMMETRY_TOLERANCE {
                    out.push(Violation::AsymmetricP { row: i, col: j, diff });
                    break 'outer;
                }
            }
        }
        let max_abs = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if max_abs.is_nan() || (max_abs - 1.0).abs() > NORMALIZATION_TOLERANCE {
            out.push(Violation::UnnormalizedP { max_abs });
        }
        let sv = p.clone().singular_values();
        let smax = sv.max();
        let smin = sv.min();
        let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
        if ratio.is_nan() || ratio <= RANK_TOLERANCE {
            out.push(Violation::RankDeficientP { ratio });
        }
        out
    }

    pub fn k(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.0[(k, l)]
    }

    /// `|lambda_K(P)|`, the smallest eigenvalue magnitude.
    pub fn lambda_k_abs(&self) -> f64 {
        self.0
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |m, v| m.min(v.abs()))
    }

    /// True when every entry is non-negative.
    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&v| v >= 0.0)
    }
}

/// Per-node degree heterogeneity, strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Heterogeneity(Vec<f64>);

impl Heterogeneity {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        let violations = Self::check(&theta);
        if violations.is_empty() {
            Ok(Self(theta))
        } else {
            Err(Error::Invalid(violations))
        }
    }

    fn check(theta: &[f64]) -> Vec<Violation> {
        theta
            .iter()
            .enumerate()
            .filter(|(_, &v)| !(v > 0.0 && v.is_finite()))
            .map(|(node, &value)| Violation::NonpositiveTheta { node, value })
            .collect()
    }

    /// All nodes share the weight `value`.
    pub fn uniform(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    /// Draws `theta(i) = rho * U(0,1)` for every node.
    pub fn sample_scaled_uniform<R: Rng>(n: usize, rho: f64, rng: &mut R) -> Result<Self> {
        let theta = (0..n)
            .map(|_| {
                // open interval: U(0,1) excluding 0
                let mut u: f64 = rng.random();
                while u == 0.0 {
                    u = rng.random();
                }
                rho * u
            })
            .collect();
        Self::new(theta)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn l1(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// A validated model instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    labeling: Labeling,
    connectivity: ConnectivityMatrix,
    theta: Heterogeneity,
}

impl ModelParams {
    /// Assembles already-validated parts, checking only that their sizes agree.
    pub fn new(
        labeling: Labeling,
        connectivity: ConnectivityMatrix,
        theta: Heterogeneity,
    ) -> Result<Self> {
        let mut v = Vec::new();
        if connectivity.k() != labeling.k() {
            v.push(Violation::DimensionMismatch {
                what: "connectivity matrix size vs K",
                expected: labeling.k(),
                found: connectivity.k(),
            });
        }
        if theta.len() != labeling.n() {
            v.push(Violation::DimensionMismatch {
                what: "theta length vs n",
                expected: labeling.n(),
                found: theta.len(),
            });
        }
        if v.is_empty() {
            Ok(Self {
                labeling,
                connectivity,
                theta,
            })
        } else {
            Err(Error::Invalid(v))
        }
    }

    pub fn labeling(&self) -> &Labeling {
        &self.labeling
    }

    pub fn connectivity(&self) -> &ConnectivityMatrix {
        &self.connectivity
    }

    pub fn theta(&self) -> &Heterogeneity {
        &self.theta
    }

    pub fn n(&self) -> usize {
        self.labeling.n()
    }

    pub fn k(&self) -> usize {
        self.labeling.k()
    }
}

/// Validates raw model fields, reporting every broken invariant at once.
///
/// `labels` are 0-based community indices.
pub fn validate_params(
    k: usize,
    labels: Vec<usize>,
    p: DMatrix<f64>,
    theta: Vec<f64>,
) -> Result<ModelParams> {
    let mut v = Vec::new();
    if p.nrows() != k || p.ncols() != k {
        v.push(Violation::DimensionMismatch {
            what: "connectivity matrix size vs K",
            expected: k,
            found: if p.nrows() != k { p.nrows() } else { p.ncols() },
        });
    } else {
        v.extend(ConnectivityMatrix::check(&p));
    }
    if theta.len() != labels.len() {
        v.push(Violation::DimensionMismatch {
            what: "theta length vs n",
            expected: labels.len(),
            found: theta.len(),
        });
    }
    v.extend(Labeling::check(&labels, k));
    v.extend(Heterogeneity::check(&theta));
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }
    ModelParams::new(
        Labeling { labels, k },
        ConnectivityMatrix(p),
        Heterogeneity(theta),
    )
}

/// Draws labels uniformly over `0..k`, redrawing until every community is non-empty.
pub fn sample_labeling<R: Rng>(n: usize, k: usize, rng: &mut R) -> Result<Labeling> {
    if k == 0 || n < k {
        return Err(Error::Invalid(vec![Violation::DimensionMismatch {
            what: "node count must be at least K",
            expected: k,
            found: n,
        }]));
    }
    loop {
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        if let Ok(l) = Labeling::new(labels, k) {
            return Ok(l);
        }
    }
}

/// A symmetric, finite, real-valued adjacency matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedAdjacency(DMatrix<f64>);

impl WeightedAdjacency {
    /// Accepts a square matrix whose entries are finite and symmetric to
    /// within `1e-10 * max(1, A_max)`.
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "adjacency matrix is {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let n = a.nrows();
        for j in 0..n {
            for i in 0..n {
                if !a[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        let tol = 1e-10 * a.amax().max(1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                if (a[(i, j)] - a[(j, i)]).abs() > tol {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self(a))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// `A_max = max |A(i,j)|`.
    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    /// Row sums, i.e. weighted degrees.
    pub fn degrees(&self) -> Vec<f64> {
        self.0.row_iter().map(|r| r.sum()).collect()
    }
}

/// Edge-weight distribution with mean `Omega(i,j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeDistribution {
    /// `Normal(Omega(i,j), variance)`.
    Normal { variance: f64 },
    /// `Binomial(trials, Omega(i,j) / trials)`.
    Binomial { trials: u64 },
    /// `Bernoulli(Omega(i,j))`.
    Bernoulli,
    /// `Poisson(Omega(i,j))`.
    Poisson,
}

impl EdgeDistribution {
    pub fn name(&self) -> &'static str {
        match self {
            EdgeDistribution::Normal { .. } => "normal",
            EdgeDistribution::Binomial { .. } => "binomial",
            EdgeDistribution::Bernoulli => "bernoulli",
            EdgeDistribution::Poisson => "poisson",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            EdgeDistribution::Normal { variance } if !(variance > 0.0 && variance.is_finite()) => {
                Err(Error::InvalidDistribution(format!(
                    "normal variance must be positive, got {variance}"
                )))
            }
            EdgeDistribution::Binomial { trials: 0 } => Err(Error::InvalidDistribution(
                "binomial trial count must be at least 1".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Whether `mean` is an admissible expectation for this distribution.
    pub fn admits(&self, mean: f64) -> bool {
        match *self {
            EdgeDistribution::Normal { .. } => mean.is_finite(),
            EdgeDistribution::Binomial { trials } => (0.0..=trials as f64).contains(&mean),
            EdgeDistribution::Bernoulli => (0.0..=1.0).contains(&mean),
            EdgeDistribution::Poisson => mean >= 0.0 && mean.is_finite(),
        }
    }

    /// Nearest admissible mean; identity for admissible values.
    pub fn clip(&self, mean: f64) -> f64 {
        match *self {
            EdgeDistribution::Normal { .. } => mean,
            EdgeDistribution::Binomial { trials } => mean.clamp(0.0, trials as f64),
            EdgeDistribution::Bernoulli => mean.clamp(0.0, 1.0),
            EdgeDistribution::Poisson => mean.max(0.0),
        }
    }

    /// Draws one value with expectation `mean`. `mean` must be admissible.
    fn draw<R: Rng>(&self, mean: f64, rng: &mut R) -> f64 {
        match *self {
            EdgeDistribution::Normal { variance } => {
                // variance validated positive
                Normal::new(mean, variance.sqrt()).unwrap().sample(rng)
            }
            EdgeDistribution::Binomial { trials } => {
                let p = (mean / trials as f64).clamp(0.0, 1.0);
                Binomial::new(trials, p).unwrap().sample(rng) as f64
            }
            EdgeDistribution::Bernoulli => {
                if Bernoulli::new(mean.clamp(0.0, 1.0)).unwrap().sample(rng) {
                    1.0
                } else {
                    0.0
                }
            }
            EdgeDistribution::Poisson => {
                if mean == 0.0 {
                    0.0
                } else {
                    Poisson::new(mean).unwrap().sample(rng)
                }
            }
        }
    }

    /// Analytic bound on `max Var(A(i,j)) / (theta(i) theta(j))`.
    pub fn gamma_bound(&self, params: &ModelParams) -> f64 {
        match *self {
            EdgeDistribution::Normal { variance } => {
                let t = params.theta().min();
                variance / (t * t)
            }
            EdgeDistribution::Binomial { .. }
            | EdgeDistribution::Bernoulli
            | EdgeDistribution::Poisson => 1.0,
        }
    }

    /// Exact `Var(A(i,j))` when the mean is `mean`.
    pub fn variance(&self, mean: f64) -> f64 {
        match *self {
            EdgeDistribution::Normal { variance } => variance,
            EdgeDistribution::Binomial { trials } => mean * (1.0 - mean / trials as f64),
            EdgeDistribution::Bernoulli => mean * (1.0 - mean),
            EdgeDistribution::Poisson => mean,
        }
    }
}

/// `gamma` for the given distribution and model; see [`EdgeDistribution::gamma_bound`].
pub fn gamma_bound(dist: &EdgeDistribution, params: &ModelParams) -> f64 {
    dist.gamma_bound(params)
}

/// The expectation matrix `Omega = Theta Z P Z' Theta`.
pub fn build_omega(params: &ModelParams) -> DMatrix<f64> {
    let n = params.n();
    let theta = params.theta().values();
    let labels = params.labeling().labels();
    let p = params.connectivity();
    DMatrix::from_fn(n, n, |i, j| theta[i] * theta[j] * p.get(labels[i], labels[j]))
}

/// How out-of-support means are treated by [`sample_adjacency_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DomainPolicy {
    /// Reject the whole sample if any mean is outside the support.
    #[default]
    Strict,
    /// Clip each mean to the nearest admissible value before drawing.
    Clip,
}

/// Samples a symmetric adjacency matrix with `E[A(i,j)] = omega(i,j)`.
///
/// Entries on and above the diagonal are drawn independently in row-major
/// order from a ChaCha8 stream seeded with `seed`; the lower triangle mirrors
/// the upper one.
pub fn sample_adjacency(
    omega: &DMatrix<f64>,
    dist: &EdgeDistribution,
    seed: u64,
) -> Result<WeightedAdjacency> {
    sample_adjacency_with(omega, dist, seed, DomainPolicy::Strict)
}

pub fn sample_adjacency_with(
    omega: &DMatrix<f64>,
    dist: &EdgeDistribution,
    seed: u64,
    policy: DomainPolicy,
) -> Result<WeightedAdjacency> {
    let mut rng = rng::stream(seed, &[]);
    sample_adjacency_rng(omega, dist, &mut rng, policy)
}

pub(crate) fn sample_adjacency_rng(
    omega: &DMatrix<f64>,
    dist: &EdgeDistribution,
    rng: &mut StreamRng,
    policy: DomainPolicy,
) -> Result<WeightedAdjacency> {
    dist.validate()?;
    let n = omega.nrows();
    if omega.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "expectation matrix is {}x{}",
            n,
            omega.ncols()
        )));
    }
    if policy == DomainPolicy::Strict {
        for i in 0..n {
            for j in i..n {
                let mean = omega[(i, j)];
                if !dist.admits(mean) {
                    return Err(Error::DistributionDomain {
                        row: i,
                        col: j,
                        mean,
                        distribution: dist.name(),
                    });
                }
            }
        }
    }
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mean = dist.clip(omega[(i, j)]);
            let v = dist.draw(mean, rng);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    Ok(WeightedAdjacency(a))
}
