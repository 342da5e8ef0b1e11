//! Seeded k-means with distance-weighted initialization and restarts.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::Labeling;
use crate::rng::{self, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub restarts: usize,
    pub max_iters: usize,
    /// Lloyd iterations stop once the relative objective improvement drops below this.
    pub tol: f64,
    pub seed: u64,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            restarts: 20,
            max_iters: 100,
            tol: 1e-8,
            seed,
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub assignment: Labeling,
    /// `K x d` centroid matrix.
    pub centroids: DMatrix<f64>,
    /// Sum of squared distances from each point to its assigned centroid.
    pub objective: f64,
    pub iterations_used: usize,
    /// Index of the restart that produced this result.
    pub restart: usize,
}

fn sq_dist(points: &DMatrix<f64>, i: usize, centroids: &DMatrix<f64>, c: usize) -> f64 {
    let mut s = 0.0;
    for j in 0..points.ncols() {
        let d = points[(i, j)] - centroids[(c, j)];
        s += d * d;
    }
    s
}

/// Distance-weighted seeding: first centre uniform, later ones with
/// probability proportional to squared distance from the nearest chosen centre.
fn init_centroids(points: &DMatrix<f64>, k: usize, rng: &mut StreamRng) -> DMatrix<f64> {
    let (n, d) = points.shape();
    let mut centroids = DMatrix::zeros(k, d);
    let first = rng.random_range(0..n);
    centroids.row_mut(0).copy_from(&points.row(first));
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(points, i, &centroids, 0)).collect();
    for c in 1..k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, &w) in nearest.iter().enumerate() {
                acc += w;
                if acc > target && w > 0.0 {
                    chosen = Some(i);
                    break;
                }
            }
            // rounding can leave `acc` a hair short of `target`
            chosen.unwrap_or_else(|| nearest.iter().rposition(|&w| w > 0.0).unwrap())
        } else {
            rng.random_range(0..n)
        };
        centroids.row_mut(c).copy_from(&points.row(pick));
        for (i, w) in nearest.iter_mut().enumerate() {
            *w = w.min(sq_dist(points, i, &centroids, c));
        }
    }
    centroids
}

/// Assigns each point to its nearest centroid, lowest index on ties.
fn assign(points: &DMatrix<f64>, centroids: &DMatrix<f64>, out: &mut [usize], dist: &mut [f64]) {
    for i in 0..points.nrows() {
        let mut best = 0;
        let mut best_d = sq_dist(points, i, centroids, 0);
        for c in 1..centroids.nrows() {
            let d = sq_dist(points, i, centroids, c);
            if d < best_d {
                best = c;
                best_d = d;
            }
        }
        out[i] = best;
        dist[i] = best_d;
    }
}

/// Moves the point farthest from its centroid into each empty cluster.
fn repair_empty(
    points: &DMatrix<f64>,
    centroids: &mut DMatrix<f64>,
    assignment: &mut [usize],
    dist: &mut [f64],
) {
    let k = centroids.nrows();
    loop {
        let mut sizes = vec![0usize; k];
        for &a in assignment.iter() {
            sizes[a] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let mut donor = None;
        for i in 0..assignment.len() {
            if sizes[assignment[i]] < 2 {
                continue;
            }
            match donor {
                None => donor = Some(i),
                Some(j) if dist[i] > dist[j] => donor = Some(i),
                _ => {}
            }
        }
        let i = donor.expect("n >= k guarantees a cluster with two points");
        centroids.row_mut(empty).copy_from(&points.row(i));
        assignment[i] = empty;
        dist[i] = 0.0;
    }
}

fn update_centroids(points: &DMatrix<f64>, assignment: &[usize], k: usize) -> DMatrix<f64> {
    let d = points.ncols();
    let mut sums = DMatrix::zeros(k, d);
    let mut counts = vec![0usize; k];
    for (i, &a) in assignment.iter().enumerate() {
        counts[a] += 1;
        for j in 0..d {
            sums[(a, j)] += points[(i, j)];
        }
    }
    for c in 0..k {
        let cnt = counts[c].max(1) as f64;
        for j in 0..d {
            sums[(c, j)] /= cnt;
        }
    }
    sums
}

fn objective(points: &DMatrix<f64>, assignment: &[usize], centroids: &DMatrix<f64>) -> f64 {
    assignment
        .iter()
        .enumerate()
        .map(|(i, &a)| sq_dist(points, i, centroids, a))
        .sum()
}

/// One restart of Lloyd's algorithm.
pub(crate) struct LloydRun {
    pub assignment: Vec<usize>,
    pub centroids: DMatrix<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Objective after each centroid update.
    #[cfg_attr(not(test), allow(dead_code))]
    pub history: Vec<f64>,
}

pub(crate) fn lloyd(
    points: &DMatrix<f64>,
    k: usize,
    max_iters: usize,
    tol: f64,
    rng: &mut StreamRng,
) -> LloydRun {
    let n = points.nrows();
    let mut centroids = init_centroids(points, k, rng);
    let mut assignment = vec![0usize; n];
    let mut dist = vec![0.0; n];
    let mut history = Vec::new();
    let mut prev = f64::INFINITY;
    let mut iterations = 0;
    for _ in 0..max_iters.max(1) {
        iterations += 1;
        assign(points, &centroids, &mut assignment, &mut dist);
        repair_empty(points, &mut centroids, &mut assignment, &mut dist);
        centroids = update_centroids(points, &assignment, k);
        let obj = objective(points, &assignment, &centroids);
        history.push(obj);
        let improvement = prev - obj;
        prev = obj;
        if obj == 0.0 || improvement <= tol * obj {
            break;
        }
    }
    LloydRun {
        objective: prev,
        assignment,
        centroids,
        iterations,
        history,
    }
}

/// Clusters the rows of `points` into `config.k` non-empty groups.
///
/// Runs `config.restarts` independent seeded restarts and keeps the one with
/// the smallest objective, earliest restart on ties.
pub fn kmeans(points: &DMatrix<f64>, config: &KMeansConfig) -> Result<KMeansResult> {
    config.validate()?;
    let n = points.nrows();
    if n < config.k {
        return Err(Error::TooFewPoints { n, k: config.k });
    }
    let mut best: Option<(usize, LloydRun)> = None;
    for r in 0..config.restarts {
        let mut rng = rng::stream(config.seed, &[r as u64]);
        let run = lloyd(points, config.k, config.max_iters, config.tol, &mut rng);
        let better = match &best {
            None => true,
            Some((_, b)) => run.objective < b.objective,
        };
        if better {
            best = Some((r, run));
        }
    }
    let (restart, run) = best.expect("restarts >= 1");
    Ok(KMeansResult {
        assignment: Labeling::new(run.assignment, config.k)?,
        centroids: run.centroids,
        objective: run.objective,
        iterations_used: run.iterations,
        restart,
    })
}
