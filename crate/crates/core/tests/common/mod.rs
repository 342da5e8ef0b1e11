#![allow(dead_code)]

use dcdfm::{validate_params, ModelParams};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Omega by the entrywise definition, no matrix products.
pub fn omega_triple_loop(labels: &[usize], p: &DMatrix<f64>, theta: &[f64]) -> DMatrix<f64> {
    let n = labels.len();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = theta[i] * theta[j] * p[(labels[i], labels[j])];
        }
    }
    out
}

/// Cyclic Jacobi eigendecomposition. Returns eigenvalues and eigenvectors
/// (columns), unsorted.
pub fn jacobi_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() <= 1e-14 * a.norm().max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

pub fn random_symmetric(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = rng.random_range(-1.0..1.0);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    m
}

/// Random symmetric `K x K` matrix with max-abs 1 and singular-value ratio
/// at least `min_ratio`; near-singular draws are rejected.
pub fn random_connectivity(k: usize, min_ratio: f64, nonnegative: bool, rng: &mut impl Rng) -> DMatrix<f64> {
    loop {
        let mut p = random_symmetric(k, rng);
        if nonnegative {
            p.apply(|x| *x = x.abs());
        }
        let scale = p.amax();
        p /= scale;
        let sv = p.singular_values();
        let (hi, lo) = (sv.max(), sv.min());
        if lo >= min_ratio * hi {
            return p;
        }
    }
}

/// Labels with every community non-empty: a fixed prefix `0..K`, rest uniform, shuffled.
pub fn random_labels(n: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut labels: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.random_range(0..k) }).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        labels.swap(i, j);
    }
    labels
}

/// Random oracle instance: n in [20,200], K in {2,3,4}, theta = rho U(0,1) + 0.05 rho.
pub fn random_instance(rng: &mut impl Rng) -> ModelParams {
    let n = rng.random_range(20..=200);
    let k = rng.random_range(2..=4);
    let p = random_connectivity(k, 0.05, false, rng);
    let rho: f64 = rng.random_range(0.1..5.0);
    let theta: Vec<f64> = (0..n).map(|_| rho * rng.random::<f64>() + 0.05 * rho).collect();
    validate_params(k, random_labels(n, k, rng), p, theta).expect("generator builds valid params")
}

/// All labelings of `n` nodes into exactly `k` non-empty communities.
pub fn surjective_labelings(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = k.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let labels: Vec<usize> = (0..n)
            .map(|_| {
                let l = c % k;
                c /= k;
                l
            })
            .collect();
        let mut seen = vec![false; k];
        labels.iter().for_each(|&l| seen[l] = true);
        if seen.iter().all(|&s| s) {
            out.push(labels);
        }
    }
    out
}

pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(k - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, k - 1);
            out.push(p);
        }
    }
    out
}

/// `n^{-1} min_J ||Z_hat J - Z||_0`, counting differing entries of the
/// membership matrices.
pub fn brute_error_rate(est: &[usize], truth: &[usize], k: usize, perms: &[Vec<usize>]) -> f64 {
    let n = est.len();
    let mut best = usize::MAX;
    for perm in perms {
        let mut diff = 0;
        for i in 0..n {
            for c in 0..k {
                let zhat = (perm[est[i]] == c) as u8;
                let z = (truth[i] == c) as u8;
                diff += (zhat != z) as usize;
            }
        }
        best = best.min(diff);
    }
    best as f64 / n as f64
}

/// `min_pi max_k (|C_k \ C_hat_pi(k)| + |C_hat_pi(k) \ C_k|) / n_k` from the set definition.
pub fn brute_f_hat(est: &[usize], truth: &[usize], perms: &[Vec<usize>]) -> f64 {
    let n = est.len();
    let mut best = f64::INFINITY;
    for perm in perms {
        let mut worst: f64 = 0.0;
        for (c, &target) in perm.iter().enumerate() {
            let size = (0..n).filter(|&i| truth[i] == c).count();
            let missed = (0..n).filter(|&i| truth[i] == c && est[i] != target).count();
            let intruders = (0..n).filter(|&i| truth[i] != c && est[i] == target).count();
            worst = worst.max((missed + intruders) as f64 / size as f64);
        }
        best = best.min(worst);
    }
    best
}

pub fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}
