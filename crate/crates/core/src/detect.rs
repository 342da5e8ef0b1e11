//! End-to-end community detection: the normalized pipeline and its
//! uncorrected baseline.
//!
//! Both pipelines take the `K` leading eigenvectors of the adjacency matrix
//! and run k-means on their rows. The normalized variant first scales every
//! row to unit length, which cancels per-node heterogeneity.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::clustering::{kmeans, KMeansConfig, KMeansResult};
use crate::error::{Error, Result};
use crate::model::{Labeling, WeightedAdjacency};
use crate::spectral::{leading_eigs, SpectralEmbedding};

/// Leading eigenvalues at or below this magnitude carry no signal.
pub const NULL_SPECTRUM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Row-normalized eigenvectors (nDFA).
    Normalized,
    /// Raw eigenvectors (DFA).
    Unnormalized,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Normalized, Method::Unnormalized];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Normalized => "nDFA",
            Method::Unnormalized => "DFA",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ndfa" => Ok(Method::Normalized),
            "dfa" => Ok(Method::Unnormalized),
            other => Err(format!("unknown method `{other}` (expected ndfa or dfa)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionOutput {
    pub labeling: Labeling,
    pub embedding: SpectralEmbedding,
    pub kmeans: KMeansResult,
    pub method: Method,
    /// Nodes whose embedding row carried no direction. Non-empty means a
    /// degenerate-embedding warning.
    pub degenerate_rows: Vec<usize>,
}

impl DetectionOutput {
    pub fn is_degenerate(&self) -> bool {
        !self.degenerate_rows.is_empty()
    }
}

/// Runs k-means for `method` on an already computed embedding.
///
/// Lets callers share one eigendecomposition between both methods.
pub fn detect_from_embedding(
    embedding: &SpectralEmbedding,
    method: Method,
    config: &KMeansConfig,
) -> Result<DetectionOutput> {
    if config.k != embedding.k() {
        return Err(Error::DimensionMismatch(format!(
            "k-means K = {} but embedding has {} columns",
            config.k,
            embedding.k()
        )));
    }
    let n = embedding.n();
    let null_spectrum = embedding
        .eigenvalues
        .iter()
        .all(|l| l.abs() <= NULL_SPECTRUM);

    let (embedding, degenerate_rows) = match method {
        Method::Normalized => {
            let mut e = embedding.clone().row_normalized();
            if null_spectrum {
                // eigenvectors of a null matrix are arbitrary
                let k = e.k();
                e.u_star = Some(DMatrix::from_element(n, k, 1.0 / (k as f64).sqrt()));
                e.degenerate_rows = (0..n).collect();
            }
            let rows = e.degenerate_rows.clone();
            (e, rows)
        }
        Method::Unnormalized => {
            let rows = if null_spectrum { (0..n).collect() } else { Vec::new() };
            (embedding.clone(), rows)
        }
    };
    if !degenerate_rows.is_empty() {
        log::debug!(
            "degenerate embedding: {} of {} rows carry no direction",
            degenerate_rows.len(),
            n
        );
    }
    let points = match method {
        Method::Normalized => embedding.u_star.as_ref().expect("normalized above"),
        Method::Unnormalized => &embedding.u_hat,
    };
    let km = kmeans(points, config)?;
    Ok(DetectionOutput {
        labeling: km.assignment.clone(),
        embedding,
        kmeans: km,
        method,
        degenerate_rows,
    })
}

pub fn detect(a: &WeightedAdjacency, method: Method, config: &KMeansConfig) -> Result<DetectionOutput> {
    let embedding = leading_eigs(a.matrix(), config.k)?;
    detect_from_embedding(&embedding, method, config)
}

/// Normalized pipeline: leading eigenvectors, row normalization, k-means.
pub fn ndfa(a: &WeightedAdjacency, config: &KMeansConfig) -> Result<DetectionOutput> {
    detect(a, Method::Normalized, config)
}

/// Uncorrected baseline: k-means directly on the leading eigenvectors.
pub fn dfa(a: &WeightedAdjacency, config: &KMeansConfig) -> Result<DetectionOutput> {
    detect(a, Method::Unnormalized, config)
}
