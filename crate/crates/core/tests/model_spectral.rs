mod common;

use common::*;
use dcdfm::model::sample_labeling;
use dcdfm::spectral::{eigenvalues_by_magnitude, symmetric_spectral_norm};
use dcdfm::{
    build_omega, gamma_bound, leading_eigs, ndfa, sample_adjacency, validate_params, EdgeDistribution, Error,
    KMeansConfig, Violation, WeightedAdjacency,
};
use nalgebra::DMatrix;
use rand::Rng;

#[test]
fn omega_matches_entrywise_definition() {
    let mut r = rng(1);
    for _ in 0..20 {
        let params = random_instance(&mut r);
        let expected = omega_triple_loop(
            params.labeling().labels(),
            params.connectivity().matrix(),
            params.theta().values(),
        );
        let got = build_omega(&params);
        assert_eq!(got.shape(), expected.shape());
        for (a, b) in got.iter().zip(expected.iter()) {
            assert!((a - b).abs() <= 1e-14 * b.abs().max(1.0));
        }
    }
}

#[test]
fn omega_has_rank_k() {
    let mut r = rng(2);
    for _ in 0..10 {
        let params = random_instance(&mut r);
        let k = params.k();
        let eig = eigenvalues_by_magnitude(&build_omega(&params)).unwrap();
        let scale = eig[0].abs();
        assert!(eig[k - 1].abs() > 1e-8 * scale);
        assert!(eig[k..].iter().all(|l| l.abs() <= 1e-10 * scale), "{:?}", &eig[..k + 2]);
    }
}

#[test]
fn eigensolver_agrees_with_jacobi() {
    let mut r = rng(3);
    for n in [5, 12, 30, 45] {
        let m = random_symmetric(n, &mut r);
        let norm = symmetric_spectral_norm(&m).unwrap();
        let (jvals, _) = jacobi_eigen(&m);
        let mut jvals = jvals;
        jvals.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).unwrap());
        assert!((jvals[0].abs() - norm).abs() <= 1e-10 * norm);

        for k in [1, 3, n.min(6)] {
            let e = leading_eigs(&m, k).unwrap();
            for (i, lam) in e.eigenvalues.iter().enumerate() {
                assert!((lam - jvals[i]).abs() <= 1e-10 * norm, "n={n} i={i}: {lam} vs {}", jvals[i]);
                let v = e.u_hat.column(i);
                let residual = (&m * v - v * *lam).norm();
                assert!(residual <= 1e-8 * norm);
            }
            let gram = e.u_hat.transpose() * &e.u_hat;
            assert!((gram - DMatrix::identity(k, k)).amax() <= 1e-10);
        }
    }
}

#[test]
fn eigenvectors_have_deterministic_sign() {
    let mut r = rng(4);
    let m = random_symmetric(20, &mut r);
    let e = leading_eigs(&m, 4).unwrap();
    let flipped = leading_eigs(&(-&m), 4).unwrap();
    for i in 0..4 {
        let col = e.u_hat.column(i);
        let big = col.iter().cloned().fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
        assert!(big > 0.0);
        assert!((flipped.eigenvalues[i] + e.eigenvalues[i]).abs() < 1e-10);
    }
}

#[test]
fn oracle_rows_collapse_to_orthonormal_community_centres() {
    let mut r = rng(5);
    for _ in 0..10 {
        let params = random_instance(&mut r);
        let k = params.k();
        let e = leading_eigs(&build_omega(&params), k).unwrap().row_normalized();
        let u = e.u_star.unwrap();
        let labels = params.labeling().labels();
        let mut centre: Vec<Option<usize>> = vec![None; k];
        for (i, &l) in labels.iter().enumerate() {
            match centre[l] {
                None => centre[l] = Some(i),
                Some(j) => assert!((u.row(i) - u.row(j)).norm() < 1e-8),
            }
        }
        for a in 0..k {
            for b in a + 1..k {
                let (i, j) = (centre[a].unwrap(), centre[b].unwrap());
                let d = (u.row(i) - u.row(j)).norm();
                assert!((d - 2f64.sqrt()).abs() < 1e-8, "distance {d}");
            }
        }
    }
}

#[test]
fn oracle_detection_is_exact_with_negative_entries() {
    let p = DMatrix::from_row_slice(3, 3, &[-1.0, 0.2, 0.5, 0.2, 0.7, -0.3, 0.5, -0.3, 0.4]);
    let labels: Vec<usize> = (0..30).map(|i| i % 3).collect();
    let theta: Vec<f64> = (0..30).map(|i| 0.2 + (i as f64 * 0.37).sin().abs()).collect();
    let params = validate_params(3, labels, p, theta).unwrap();
    let a = WeightedAdjacency::new(build_omega(&params)).unwrap();
    let out = ndfa(&a, &KMeansConfig::new(3, 9)).unwrap();
    assert_eq!(dcdfm::error_rate(&out.labeling, params.labeling()).unwrap(), 0.0);
}

#[test]
fn validation_reports_every_violation() {
    let p = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 2.0]);
    let err = validate_params(2, vec![0, 0, 0, 5], p, vec![1.0, -1.0, 0.0, 2.0]).unwrap_err();
    let Error::Invalid(v) = err else { panic!("expected Invalid") };
    assert!(v.iter().any(|x| matches!(x, Violation::AsymmetricP { .. })));
    assert!(v.iter().any(|x| matches!(x, Violation::UnnormalizedP { .. })));
    assert!(v.iter().any(|x| matches!(x, Violation::NonpositiveTheta { .. })));
    assert!(v.iter().any(|x| matches!(x, Violation::LabelOutOfRange { .. })));
    assert!(v.iter().any(|x| matches!(x, Violation::EmptyCommunity { .. })));

    let singular = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
    let err = validate_params(2, vec![0, 1], singular, vec![1.0, 1.0]).unwrap_err();
    assert!(matches!(err, Error::Invalid(v) if v.iter().any(|x| matches!(x, Violation::RankDeficientP { .. }))));
}

#[test]
fn sampled_labels_fill_every_community() {
    for seed in 0..50 {
        let l = sample_labeling(8, 4, &mut dcdfm::rng::stream(seed, &[])).unwrap();
        assert_eq!(l.sizes().iter().filter(|&&s| s > 0).count(), 4);
    }
}

fn empirical_moments(dist: &EdgeDistribution, mean: f64, seed: u64) -> (f64, f64) {
    // a constant Omega: every upper-triangular entry is an independent draw
    let n = 300;
    let omega = DMatrix::from_element(n, n, mean);
    let a = sample_adjacency(&omega, dist, seed).unwrap();
    let draws: Vec<f64> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).map(|(i, j)| a.get(i, j)).collect();
    let m = draws.iter().sum::<f64>() / draws.len() as f64;
    let v = draws.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (draws.len() - 1) as f64;
    (m, v)
}

#[test]
fn distributions_have_the_stated_moments() {
    let cases = [
        (EdgeDistribution::Normal { variance: 4.0 }, 0.7),
        (EdgeDistribution::Binomial { trials: 5 }, 1.5),
        (EdgeDistribution::Bernoulli, 0.3),
        (EdgeDistribution::Poisson, 2.0),
    ];
    for (i, (dist, mean)) in cases.iter().enumerate() {
        let (m, v) = empirical_moments(dist, *mean, 100 + i as u64);
        let var = dist.variance(*mean);
        // 45150 draws: mean within 5 standard errors, variance within 5%
        assert!((m - mean).abs() < 5.0 * (var / 45150.0).sqrt(), "{dist:?}: mean {m}");
        assert!((v - var).abs() < 0.05 * var, "{dist:?}: var {v} vs {var}");
    }
}

#[test]
fn variance_is_bounded_by_gamma() {
    let mut r = rng(7);
    let dists = [
        EdgeDistribution::Normal { variance: 2.0 },
        EdgeDistribution::Binomial { trials: 3 },
        EdgeDistribution::Bernoulli,
        EdgeDistribution::Poisson,
    ];
    for dist in dists {
        for _ in 0..5 {
            let n = 40;
            let k = 3;
            let p = random_connectivity(k, 0.05, true, &mut r);
            let theta: Vec<f64> = (0..n).map(|_| 0.05 + 0.9 * r.random::<f64>()).collect();
            let params = validate_params(k, random_labels(n, k, &mut r), p, theta.clone()).unwrap();
            let gamma = gamma_bound(&dist, &params);
            let omega = build_omega(&params);
            for i in 0..n {
                for j in 0..n {
                    let ratio = dist.variance(omega[(i, j)]) / (theta[i] * theta[j]);
                    assert!(ratio <= gamma * (1.0 + 1e-12), "{dist:?}: {ratio} > {gamma}");
                }
            }
        }
    }
}

#[test]
fn strict_sampling_rejects_out_of_support_means() {
    let omega = DMatrix::from_element(3, 3, 1.5);
    assert!(matches!(
        sample_adjacency(&omega, &EdgeDistribution::Bernoulli, 0),
        Err(Error::DistributionDomain { .. })
    ));
    let omega = DMatrix::from_element(3, 3, -0.1);
    assert!(sample_adjacency(&omega, &EdgeDistribution::Poisson, 0).is_err());
    assert!(sample_adjacency(&omega, &EdgeDistribution::Normal { variance: 1.0 }, 0).is_ok());
}

#[test]
fn sampling_is_seed_deterministic() {
    let mut r = rng(8);
    let params = random_instance(&mut r);
    let omega = build_omega(&params);
    let dist = EdgeDistribution::Normal { variance: 1.0 };
    let a = sample_adjacency(&omega, &dist, 42).unwrap();
    let b = sample_adjacency(&omega, &dist, 42).unwrap();
    let c = sample_adjacency(&omega, &dist, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.matrix(), &a.matrix().transpose());
}
