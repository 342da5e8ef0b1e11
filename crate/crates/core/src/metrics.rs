//! Label-permutation-invariant error metrics and finite-sample evaluators
//! for the consistency bounds.

use crate::error::{Error, Result};
use crate::model::{build_omega, Labeling, ModelParams, WeightedAdjacency};
use crate::spectral::{eigenvalues_by_magnitude, symmetric_spectral_norm};

/// Largest K searched exhaustively over all K! permutations.
pub const MAX_EXHAUSTIVE_K: usize = 8;

/// `confusion[k][l]` counts nodes with true label `k` and estimated label `l`.
pub fn confusion_matrix(est: &Labeling, truth: &Labeling) -> Result<Vec<Vec<usize>>> {
    if est.n() != truth.n() || est.k() != truth.k() {
        return Err(Error::DimensionMismatch(format!(
            "estimate has n={}, K={}; truth has n={}, K={}",
            est.n(),
            est.k(),
            truth.n(),
            truth.k()
        )));
    }
    let k = truth.k();
    let mut c = vec![vec![0usize; k]; k];
    for (&t, &e) in truth.labels().iter().zip(est.labels()) {
        c[t][e] += 1;
    }
    Ok(c)
}

/// Calls `f` with every permutation of `0..k` in lexicographic order.
pub(crate) fn for_each_permutation(k: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..k).collect();
    loop {
        f(&p);
        let Some(i) = (1..k).rev().find(|&i| p[i - 1] < p[i]) else {
            return;
        };
        let j = (i..k).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
///
/// Returns `assign` with row `r` matched to column `assign[r]`.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    // 1-based potentials; column 0 is a sentinel
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

/// Largest number of nodes on which `est` agrees with `truth` under some relabeling.
pub fn best_matched_count(est: &Labeling, truth: &Labeling) -> Result<usize> {
    let c = confusion_matrix(est, truth)?;
    let k = truth.k();
    if k <= MAX_EXHAUSTIVE_K {
        let mut best = 0;
        for_each_permutation(k, |perm| {
            let s: usize = (0..k).map(|t| c[t][perm[t]]).sum();
            best = best.max(s);
        });
        Ok(best)
    } else {
        let cost: Vec<Vec<f64>> = c
            .iter()
            .map(|row| row.iter().map(|&x| -(x as f64)).collect())
            .collect();
        let assign = min_cost_assignment(&cost);
        Ok((0..k).map(|t| c[t][assign[t]]).sum())
    }
}

/// `n^-1 min_J ||Z_hat J - Z||_0` over `K x K` permutation matrices `J`.
///
/// Each misclassified node flips two entries of the one-hot matrix, so it
/// contributes `2/n`.
pub fn error_rate(est: &Labeling, truth: &Labeling) -> Result<f64> {
    let matched = best_matched_count(est, truth)?;
    let n = truth.n();
    if n == 0 {
        return Ok(0.0);
    }
    Ok(2.0 * (n - matched) as f64 / n as f64)
}

/// Fraction of nodes misclassified under the best relabeling.
pub fn misclassification_fraction(est: &Labeling, truth: &Labeling) -> Result<f64> {
    let matched = best_matched_count(est, truth)?;
    let n = truth.n();
    Ok(if n == 0 { 0.0 } else { (n - matched) as f64 / n as f64 })
}

/// Min over label permutations of the largest per-community normalized
/// confusion mass.
///
/// The min-max objective does not decompose over matched pairs, so this is
/// an exhaustive search limited to `K <= 8`.
pub fn f_hat(est: &Labeling, truth: &Labeling) -> Result<f64> {
    let k = truth.k();
    if k > MAX_EXHAUSTIVE_K {
        return Err(Error::KTooLargeForExhaustive {
            k,
            max: MAX_EXHAUSTIVE_K,
        });
    }
    let c = confusion_matrix(est, truth)?;
    let truth_sizes = truth.sizes();
    let est_sizes = est.sizes();
    let mut best = f64::INFINITY;
    for_each_permutation(k, |perm| {
        let worst = (0..k)
            .map(|t| {
                let hit = c[t][perm[t]];
                let missed = truth_sizes[t] - hit;
                let intruders = est_sizes[perm[t]] - hit;
                (missed + intruders) as f64 / truth_sizes[t] as f64
            })
            .fold(0.0, f64::max);
        best = best.min(worst);
    });
    Ok(best)
}

/// Finite-instance values of the quantities in the consistency bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    /// `|lambda_K(Omega)|`.
    pub spectral_gap: f64,
    /// `theta_min^2 |lambda_K(P)| n_min`, a lower bound on `spectral_gap`.
    pub lemma3_rhs: f64,
    /// `sqrt(gamma theta_max ||theta||_1 log n)`, the scale of `||A - Omega||`.
    pub lemma2_rhs: f64,
    /// `||A - Omega||`.
    pub observed_deviation: f64,
    /// `gamma theta_max^3 K^2 n_max ||theta||_1 log n / (lambda_K(P)^2 theta_min^6 n_min^3)`.
    pub theorem1_rate: f64,
    /// `gamma theta_max ||theta||_1 / log n`, which must diverge with `n`.
    pub sparsity: f64,
    pub gamma: f64,
}

impl BoundReport {
    /// Key/value pairs in a fixed order.
    pub fn fields(&self) -> [(&'static str, f64); 7] {
        [
            ("spectral_gap", self.spectral_gap),
            ("lemma3_rhs", self.lemma3_rhs),
            ("lemma2_rhs", self.lemma2_rhs),
            ("observed_deviation", self.observed_deviation),
            ("theorem1_rate", self.theorem1_rate),
            ("sparsity", self.sparsity),
            ("gamma", self.gamma),
        ]
    }

    /// Whether `spectral_gap >= lemma3_rhs` up to relative slack `rel`.
    pub fn lemma3_holds(&self, rel: f64) -> bool {
        self.spectral_gap >= self.lemma3_rhs * (1.0 - rel)
    }

    /// `observed_deviation / lemma2_rhs`.
    pub fn deviation_ratio(&self) -> f64 {
        self.observed_deviation / self.lemma2_rhs
    }
}

pub fn bound_report(a: &WeightedAdjacency, params: &ModelParams, gamma: f64) -> Result<BoundReport> {
    let n = params.n();
    if a.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "adjacency has n={}, model has n={}",
            a.n(),
            n
        )));
    }
    let k = params.k();
    let omega = build_omega(params);
    let spectral_gap = eigenvalues_by_magnitude(&omega)?[k - 1].abs();
    let observed_deviation = symmetric_spectral_norm(&(a.matrix() - &omega))?;

    let theta = params.theta();
    let (t_max, t_min, t_l1) = (theta.max(), theta.min(), theta.l1());
    let lambda_p = params.connectivity().lambda_k_abs();
    let n_min = params.labeling().n_min() as f64;
    let n_max = params.labeling().n_max() as f64;
    let log_n = (n as f64).ln();
    let kf = k as f64;

    Ok(BoundReport {
        spectral_gap,
        lemma3_rhs: t_min * t_min * lambda_p * n_min,
        lemma2_rhs: (gamma * t_max * t_l1 * log_n).sqrt(),
        observed_deviation,
        theorem1_rate: gamma * t_max.powi(3) * kf * kf * n_max * t_l1 * log_n
            / (lambda_p * lambda_p * t_min.powi(6) * n_min.powi(3)),
        sparsity: gamma * t_max * t_l1 / log_n,
        gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(one_based: &[usize]) -> Labeling {
        Labeling::from_one_based(one_based).unwrap()
    }

    #[test]
    fn error_rate_examples() {
        let t = lab(&[1, 1, 2, 2]);
        assert_eq!(error_rate(&t, &t).unwrap(), 0.0);
        assert_eq!(error_rate(&lab(&[2, 2, 1, 1]), &t).unwrap(), 0.0);
        assert_eq!(error_rate(&lab(&[1, 1, 1, 2]), &t).unwrap(), 0.5);
    }

    #[test]
    fn f_hat_examples() {
        let t = lab(&[1, 1, 2, 2]);
        assert_eq!(f_hat(&t, &t).unwrap(), 0.0);
        assert_eq!(f_hat(&lab(&[2, 2, 1, 1]), &t).unwrap(), 0.0);
        // identity: 1/2 on both communities; swap: 3/2 on community 1
        assert_eq!(f_hat(&lab(&[1, 2, 2, 2]), &t).unwrap(), 0.5);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(error_rate(&lab(&[1, 2]), &lab(&[1, 2, 2])).is_err());
        assert!(error_rate(&lab(&[1, 2, 3]), &lab(&[1, 2, 2])).is_err());
    }

    #[test]
    fn f_hat_refuses_large_k() {
        let l = lab(&(1..=9).collect::<Vec<_>>());
        assert!(matches!(f_hat(&l, &l), Err(Error::KTooLargeForExhaustive { k: 9, .. })));
        assert_eq!(error_rate(&l, &l).unwrap(), 0.0);
    }

    #[test]
    fn permutations_enumerated() {
        let mut seen = Vec::new();
        for_each_permutation(3, |p| seen.push(p.to_vec()));
        assert_eq!(seen.len(), 6);
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 6);
        let mut count = 0;
        for_each_permutation(1, |_| count += 1);
        assert_eq!(count, 1);
    }

    #[test]
    fn hungarian_small() {
        let cost = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
        let a = min_cost_assignment(&cost);
        let total: f64 = (0..3).map(|r| cost[r][a[r]]).sum();
        assert_eq!(total, 5.0);
    }
}
