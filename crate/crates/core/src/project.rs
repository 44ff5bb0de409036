//! Exact t-SNE (O(n²)) for 2D cluster visualization export.
//!
//! Per-point Gaussian bandwidths come from a binary search matching the
//! target perplexity; the joint P is symmetrized; optimization is gradient
//! descent with momentum and early exaggeration. Documented capacity
//! target is n ≤ 10,000.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

const GRAD_SCALE: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub early_exaggeration: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    /// Momentum before and after the switch iteration.
    pub momentum_initial: f64,
    pub momentum_final: f64,
    pub momentum_switch: usize,
    /// Early exaggeration applies to iterations before this index.
    pub exaggeration_until: usize,
    pub seed: u64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        TsneConfig {
            perplexity: 100.0,
            early_exaggeration: 12.0,
            iterations: 1000,
            learning_rate: 200.0,
            momentum_initial: 0.5,
            momentum_final: 0.8,
            momentum_switch: 250,
            exaggeration_until: 250,
            seed: 0,
        }
    }
}

/// 2D coordinates per document plus the per-iteration KL divergence.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding2D {
    pub coords: Vec<(String, [f64; 2])>,
    pub kl_trace: Vec<f64>,
    /// Present when the configured perplexity was clamped to (n−1)/3.
    pub clamped_perplexity: Option<f64>,
}

impl Embedding2D {
    pub fn get(&self, doc_id: &str) -> Option<[f64; 2]> {
        self.coords
            .iter()
            .find(|(id, _)| id == doc_id)
            .map(|(_, xy)| *xy)
    }
}

/// Binary search over the Gaussian bandwidth so the row's perplexity
/// e^{H(p)} matches `target` within `tol`. `row` is one row of pairwise
/// squared distances including the self entry at `self_index`
/// (p_{i|i} = 0; the returned row sums to 1).
pub fn perplexity_search(
    row: &[f64],
    self_index: usize,
    target: f64,
    tol: f64,
    max_steps: usize,
) -> Result<Vec<f64>> {
    let others: Vec<(usize, f64)> = row
        .iter()
        .enumerate()
        .filter(|&(j, &d)| j != self_index && d.is_finite())
        .map(|(j, &d)| (j, d))
        .collect();
    if others.len() < 2 {
        return Err(Error::Input(
            "perplexity search needs at least 2 finite non-self entries".into(),
        ));
    }
    if target < 1.0 {
        return Err(Error::Parameter("target perplexity must be ≥ 1".into()));
    }

    let min_dist = others
        .iter()
        .map(|&(_, d)| d)
        .fold(f64::INFINITY, f64::min);
    let eval = |beta: f64| -> (f64, Vec<f64>) {
        // shifted by the minimum distance for numerical stability
        let weights: Vec<f64> = others
            .iter()
            .map(|&(_, d)| (-beta * (d - min_dist)).exp())
            .collect();
        let total: f64 = weights.iter().sum();
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let entropy: f64 = probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.ln())
            .sum();
        (entropy.exp(), probs)
    };

    let mut beta = 1.0;
    let mut beta_min = f64::NEG_INFINITY;
    let mut beta_max = f64::INFINITY;
    let mut achieved = 0.0;
    let mut probs = Vec::new();
    for _ in 0..max_steps {
        let (perp, p) = eval(beta);
        achieved = perp;
        probs = p;
        if (perp - target).abs() <= tol {
            let mut full = vec![0.0; row.len()];
            for (&(j, _), &p) in others.iter().zip(&probs) {
                full[j] = p;
            }
            return Ok(full);
        }
        if perp > target {
            // too many effective neighbors: sharpen
            beta_min = beta;
            beta = if beta_max.is_finite() {
                (beta + beta_max) / 2.0
            } else {
                beta * 2.0
            };
        } else {
            beta_max = beta;
            beta = if beta_min.is_finite() {
                (beta + beta_min) / 2.0
            } else {
                beta / 2.0
            };
        }
    }
    let _ = probs;
    Err(Error::BandwidthConvergence {
        steps: max_steps,
        achieved,
        target,
    })
}

fn pairwise_squared_distances(data: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = data.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d: f64 = data[i]
                .iter()
                .zip(&data[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            out[i][j] = d;
            out[j][i] = d;
        }
    }
    out
}

/// Symmetrized joint distribution p_ij = (p_{j|i} + p_{i|j}) / (2n).
#[allow(clippy::needless_range_loop)] // symmetric (i, j) indexing
pub fn joint_probabilities(
    data: &[Vec<f64>],
    perplexity: f64,
    tol: f64,
    max_steps: usize,
) -> Result<Vec<Vec<f64>>> {
    let n = data.len();
    let distances = pairwise_squared_distances(data);
    let mut conditional = Vec::with_capacity(n);
    for (i, row) in distances.iter().enumerate() {
        conditional.push(perplexity_search(row, i, perplexity, tol, max_steps)?);
    }
    let mut joint = vec![vec![0.0; n]; n];
    let scale = 1.0 / (2.0 * n as f64);
    for i in 0..n {
        for j in 0..n {
            joint[i][j] = (conditional[i][j] + conditional[j][i]) * scale;
        }
    }
    Ok(joint)
}

/// Fits exact t-SNE. The configured perplexity is clamped to (n−1)/3 when
/// it exceeds that bound (recorded on the result). Deterministic for a
/// fixed seed.
pub fn fit_tsne(vectors: &[(String, Vec<f64>)], config: &TsneConfig) -> Result<Embedding2D> {
    let n = vectors.len();
    if n < 5 {
        return Err(Error::Parameter(format!(
            "t-SNE needs at least 5 points, got {n}"
        )));
    }
    let dim = vectors[0].1.len();
    if vectors.iter().any(|(_, v)| v.len() != dim) {
        return Err(Error::Input("vectors have mixed dimensions".into()));
    }

    let max_perplexity = (n as f64 - 1.0) / 3.0;
    let (perplexity, clamped) = if config.perplexity > max_perplexity {
        (max_perplexity, Some(max_perplexity))
    } else {
        (config.perplexity, None)
    };

    let data: Vec<Vec<f64>> = vectors.iter().map(|(_, v)| v.clone()).collect();
    let p = joint_probabilities(&data, perplexity, 1e-4, 200)?;

    // Seeded Gaussian init scaled 1e-4.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut y: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            [a * 1e-4, b * 1e-4]
        })
        .collect();
    let mut velocity = vec![[0.0; 2]; n];
    let mut gains: Vec<[f64; 2]> = vec![[1.0; 2]; n];
    let mut kl_trace = Vec::with_capacity(config.iterations);
    let mut weights = vec![vec![0.0; n]; n];

    for iter in 0..config.iterations {
        let exaggeration = if iter < config.exaggeration_until {
            config.early_exaggeration
        } else {
            1.0
        };
        let momentum = if iter < config.momentum_switch {
            config.momentum_initial
        } else {
            config.momentum_final
        };

        // Student-t weights and their normalizer.
        let mut weight_sum = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = y[i][0] - y[j][0];
                let dy = y[i][1] - y[j][1];
                let w = 1.0 / (1.0 + dx * dx + dy * dy);
                weights[i][j] = w;
                weights[j][i] = w;
                weight_sum += 2.0 * w;
            }
        }

        // Gradient: 4 Σ_j (p_ij·exagg − q_ij) w_ij (y_i − y_j), evaluated
        // at the current positions for every point before any update.
        let mut kl = 0.0;
        let mut gradient = vec![[0.0; 2]; n];
        for i in 0..n {
            let grad = &mut gradient[i];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let q = weights[i][j] / weight_sum;
                let coeff = GRAD_SCALE * (p[i][j] * exaggeration - q) * weights[i][j];
                grad[0] += coeff * (y[i][0] - y[j][0]);
                grad[1] += coeff * (y[i][1] - y[j][1]);
                if p[i][j] > 0.0 {
                    // true-P KL, independent of the exaggeration phase
                    kl += p[i][j] * (p[i][j] / q).ln();
                }
            }
            if !grad[0].is_finite() || !grad[1].is_finite() {
                return Err(Error::Divergence {
                    what: "t-SNE optimization".into(),
                    unit: "iteration".into(),
                    step: iter,
                });
            }
        }
        for i in 0..n {
            for d in 0..2 {
                // Per-dimension gains as in the reference implementation:
                // grow while descent is consistent, shrink on oscillation.
                gains[i][d] = if (gradient[i][d] > 0.0) != (velocity[i][d] > 0.0) {
                    gains[i][d] + 0.2
                } else {
                    (gains[i][d] * 0.8).max(0.01)
                };
                velocity[i][d] = momentum * velocity[i][d]
                    - config.learning_rate * gains[i][d] * gradient[i][d];
                y[i][d] += velocity[i][d];
            }
        }
        kl_trace.push(kl);

        // Re-center so the embedding does not drift.
        let mean = y.iter().fold([0.0; 2], |acc, p| {
            [acc[0] + p[0] / n as f64, acc[1] + p[1] / n as f64]
        });
        for point in &mut y {
            point[0] -= mean[0];
            point[1] -= mean[1];
        }
    }

    Ok(Embedding2D {
        coords: vectors
            .iter()
            .zip(y)
            .map(|((id, _), xy)| (id.clone(), xy))
            .collect(),
        kl_trace,
        clamped_perplexity: clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn equidistant_points_split_evenly() {
        let row = [0.0, 4.0, 4.0];
        let p = perplexity_search(&row, 0, 2.0, 1e-6, 100).unwrap();
        assert_eq!(p[0], 0.0);
        assert!((p[1] - 0.5).abs() < 1e-12);
        assert!((p[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn four_point_row_matches_independent_bisection() {
        // Squared distances [0, 1, 4, 9], target 2.5; an independent
        // bisection (carried to convergence by hand) gives
        // p ≈ (0.583865, 0.309072, 0.107063).
        let row = [0.0, 1.0, 4.0, 9.0];
        let p = perplexity_search(&row, 0, 2.5, 1e-6, 200).unwrap();
        assert!((p[1] - 0.583865).abs() < 1e-3);
        assert!((p[2] - 0.309072).abs() < 1e-3);
        assert!((p[3] - 0.107063).abs() < 1e-3);
        let total: f64 = p.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn achieved_perplexity_is_within_tolerance_on_random_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 50;
        let data: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..10).map(|_| rng.random::<f64>() * 4.0).collect())
            .collect();
        let distances = pairwise_squared_distances(&data);
        for (i, row) in distances.iter().enumerate() {
            let p = perplexity_search(row, i, 12.0, 1e-3, 200).unwrap();
            let entropy: f64 = p
                .iter()
                .filter(|&&x| x > 0.0)
                .map(|&x| -x * x.ln())
                .sum();
            assert!((entropy.exp() - 12.0).abs() <= 1e-3);
        }
    }

    #[test]
    fn unreachable_target_reports_achieved_perplexity() {
        let row = [0.0, 1.0, 2.0];
        let err = perplexity_search(&row, 0, 10.0, 1e-5, 60).unwrap_err();
        match err {
            Error::BandwidthConvergence { achieved, target, .. } => {
                assert_eq!(target, 10.0);
                assert!(achieved <= 2.0 + 1e-6);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn joint_p_is_symmetric_nonnegative_and_sums_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let data: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..6).map(|_| rng.random::<f64>()).collect())
            .collect();
        let p = joint_probabilities(&data, 5.0, 1e-4, 200).unwrap();
        let mut total = 0.0;
        for i in 0..20 {
            assert_eq!(p[i][i], 0.0);
            for j in 0..20 {
                assert!(p[i][j] >= 0.0);
                assert!((p[i][j] - p[j][i]).abs() < 1e-15);
                total += p[i][j];
            }
        }
        assert!((total - 1.0).abs() < 1e-9);
    }

    fn two_blobs(seed: u64) -> Vec<(String, Vec<f64>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::new();
        for blob in 0..2 {
            let offset = if blob == 0 { 0.0 } else { 25.0 };
            for i in 0..10 {
                let v: Vec<f64> = (0..50)
                    .map(|_| {
                        let noise: f64 = StandardNormal.sample(&mut rng);
                        offset + noise
                    })
                    .collect();
                points.push((format!("b{blob}p{i}"), v));
            }
        }
        points
    }

    #[test]
    fn separated_blobs_stay_separated_in_2d() {
        for seed in 0..3u64 {
            let points = two_blobs(seed);
            let config = TsneConfig {
                iterations: 500,
                seed,
                ..TsneConfig::default()
            };
            let embedding = fit_tsne(&points, &config).unwrap();
            // perplexity 100 must have been clamped on 20 points
            assert!(embedding.clamped_perplexity.is_some());
            let xy: Vec<[f64; 2]> = embedding.coords.iter().map(|(_, p)| *p).collect();
            let dist = |a: [f64; 2], b: [f64; 2]| {
                ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
            };
            let mut within = Vec::new();
            let mut between = Vec::new();
            for i in 0..20 {
                for j in (i + 1)..20 {
                    let d = dist(xy[i], xy[j]);
                    if (i < 10) == (j < 10) {
                        within.push(d);
                    } else {
                        between.push(d);
                    }
                }
            }
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            assert!(
                mean(&within) < mean(&between),
                "seed {seed}: within {} between {}",
                mean(&within),
                mean(&between)
            );
        }
    }

    #[test]
    fn kl_divergence_improves_after_exaggeration() {
        let points = two_blobs(42);
        let config = TsneConfig {
            iterations: 600,
            seed: 42,
            ..TsneConfig::default()
        };
        let embedding = fit_tsne(&points, &config).unwrap();
        assert!(embedding.kl_trace.iter().all(|k| k.is_finite()));
        assert!(embedding.kl_trace[599] < embedding.kl_trace[299]);
    }

    #[test]
    fn fixed_seed_reproduces_coordinates() {
        let points = two_blobs(7);
        let config = TsneConfig {
            iterations: 120,
            seed: 9,
            ..TsneConfig::default()
        };
        let a = fit_tsne(&points, &config).unwrap();
        let b = fit_tsne(&points, &config).unwrap();
        assert_eq!(a.coords, b.coords);
    }

    #[test]
    fn too_few_points_is_a_parameter_error() {
        let points: Vec<(String, Vec<f64>)> =
            (0..4).map(|i| (format!("d{i}"), vec![i as f64])).collect();
        assert!(matches!(
            fit_tsne(&points, &TsneConfig::default()),
            Err(Error::Parameter(_))
        ));
    }
}
