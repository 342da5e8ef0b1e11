//! Community detection in weighted networks with degree heterogeneity.
//!
//! The generative model assigns each node a community and a positive
//! heterogeneity weight; edge weights may follow any distribution whose
//! mean is `theta(i) theta(j) P(l(i), l(j))`. Detection takes the leading
//! eigenvectors of the adjacency matrix, normalizes their rows and runs
//! k-means.
//!
//! ```
//! use dcdfm::{build_omega, ndfa, error_rate, validate_params, KMeansConfig, WeightedAdjacency};
//! use nalgebra::DMatrix;
//!
//! let p = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.8]);
//! let params = validate_params(2, vec![0, 0, 1, 1], p, vec![0.5, 1.0, 0.7, 0.2]).unwrap();
//! let omega = WeightedAdjacency::new(build_omega(&params)).unwrap();
//! let out = ndfa(&omega, &KMeansConfig::new(2, 1)).unwrap();
//! assert_eq!(error_rate(&out.labeling, params.labeling()).unwrap(), 0.0);
//! ```

pub mod clustering;
pub mod detect;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod netio;
pub mod rng;
pub mod spectral;

pub use clustering::{kmeans, KMeansConfig, KMeansResult};
pub use detect::{detect, detect_from_embedding, dfa, ndfa, DetectionOutput, Method};
pub use error::{Error, Result, Violation};
pub use harness::{run_real_noise, run_simulation, summarize, ExperimentId, ExperimentRecord, ExperimentSpec, ThetaScale};
pub use metrics::{bound_report, error_rate, f_hat, BoundReport};
pub use model::{
    build_omega, gamma_bound, sample_adjacency, sample_adjacency_with, validate_params,
    ConnectivityMatrix, DomainPolicy, EdgeDistribution, Heterogeneity, Labeling, ModelParams,
    WeightedAdjacency,
};
pub use netio::{add_noise, parse_gml, read_labels, Manifest, NetworkDataset};
pub use spectral::{leading_eigs, row_normalize, SpectralEmbedding};
