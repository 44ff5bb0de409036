//! K-means over document vectors: k-means++ initialization, Lloyd
//! iterations, best-of-restarts, and elbow-method K selection.
//!
//! Distance is squared Euclidean throughout. Assignment ties break toward
//! the lowest cluster id; an emptied cluster is re-seeded at the point
//! farthest from its own centroid.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::textio::{self, Section, SectionWriter};

/// Fitted model: centroids, per-document assignments, and the objective.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansModel {
    pub k: usize,
    pub dim: usize,
    pub centroids: Vec<Vec<f64>>,
    pub assignments: BTreeMap<String, usize>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
    pub iterations_run: usize,
    pub seed: u64,
    /// Inertia after each (assignment, update) pair of the winning restart;
    /// non-increasing by construction.
    pub inertia_trace: Vec<f64>,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid by squared Euclidean distance, ties to the lowest id.
fn nearest(centroids: &[Vec<f64>], point: &[f64]) -> usize {
    let mut best = 0usize;
    let mut best_dist = f64::INFINITY;
    for (idx, c) in centroids.iter().enumerate() {
        let d = squared_distance(c, point);
        if d < best_dist {
            best_dist = d;
            best = idx;
        }
    }
    best
}

fn kmeans_plus_plus(
    points: &[(String, Vec<f64>)],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let n = points.len();
    let first = rng.random_range(0..n);
    let mut centroids = vec![points[first].1.clone()];
    let mut min_dist: Vec<f64> = points
        .iter()
        .map(|(_, p)| squared_distance(p, &centroids[0]))
        .collect();
    while centroids.len() < k {
        let total: f64 = min_dist.iter().sum();
        let chosen = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut idx = n - 1;
            for (i, &d) in min_dist.iter().enumerate() {
                if target < d {
                    idx = i;
                    break;
                }
                target -= d;
            }
            idx
        } else {
            rng.random_range(0..n)
        };
        let centroid = points[chosen].1.clone();
        for (i, (_, p)) in points.iter().enumerate() {
            let d = squared_distance(p, &centroid);
            if d < min_dist[i] {
                min_dist[i] = d;
            }
        }
        centroids.push(centroid);
    }
    centroids
}

struct LloydRun {
    centroids: Vec<Vec<f64>>,
    assignments: Vec<usize>,
    inertia: f64,
    iterations: usize,
    trace: Vec<f64>,
}

fn lloyd(
    points: &[(String, Vec<f64>)],
    mut centroids: Vec<Vec<f64>>,
    max_iter: usize,
    tol: f64,
) -> LloydRun {
    let n = points.len();
    let k = centroids.len();
    let dim = centroids[0].len();
    let mut assignments = vec![usize::MAX; n];
    let mut trace = Vec::new();
    let mut iterations = 0;

    for _ in 0..max_iter {
        iterations += 1;
        // Assignment step.
        let mut changed = false;
        for (i, (_, p)) in points.iter().enumerate() {
            let a = nearest(&centroids, p);
            if a != assignments[i] {
                changed = true;
                assignments[i] = a;
            }
        }

        // Update step: means of members.
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, (_, p)) in points.iter().enumerate() {
            counts[assignments[i]] += 1;
            for (s, v) in sums[assignments[i]].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut max_shift = 0.0_f64;
        let mut reseeded: Vec<usize> = Vec::new();
        for c in 0..k {
            if counts[c] > 0 {
                let mut new_centroid = sums[c].clone();
                for v in &mut new_centroid {
                    *v /= counts[c] as f64;
                }
                max_shift = max_shift.max(squared_distance(&new_centroid, &centroids[c]));
                centroids[c] = new_centroid;
            } else {
                // Re-seed an empty cluster at the point farthest from its
                // own (current) centroid.
                let mut far_idx = 0usize;
                let mut far_dist = -1.0;
                for (i, (_, p)) in points.iter().enumerate() {
                    if reseeded.contains(&i) {
                        continue;
                    }
                    let d = squared_distance(p, &centroids[assignments[i]]);
                    if d > far_dist {
                        far_dist = d;
                        far_idx = i;
                    }
                }
                reseeded.push(far_idx);
                centroids[c] = points[far_idx].1.clone();
                max_shift = f64::INFINITY;
            }
        }

        // Inertia over current assignments and updated centroids: the mean
        // minimizes each cluster's contribution, so this never rises.
        let inertia: f64 = points
            .iter()
            .enumerate()
            .map(|(i, (_, p))| squared_distance(p, &centroids[assignments[i]]))
            .sum();
        trace.push(inertia);

        if !changed || max_shift < tol * tol {
            break;
        }
    }

    let inertia = *trace.last().expect("at least one iteration");
    LloydRun {
        centroids,
        assignments,
        inertia,
        iterations,
        trace,
    }
}

/// Fits K-means with `restarts` independent k-means++ starts and returns
/// the lowest-inertia run. Deterministic for a fixed seed.
pub fn fit_kmeans(
    points: &[(String, Vec<f64>)],
    k: usize,
    restarts: usize,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> Result<KMeansModel> {
    if k < 1 {
        return Err(Error::Parameter("k must be ≥ 1".into()));
    }
    if points.is_empty() || k > points.len() {
        return Err(Error::Parameter(format!(
            "k = {k} exceeds the number of points {}",
            points.len()
        )));
    }
    if restarts < 1 {
        return Err(Error::Parameter("restarts must be ≥ 1".into()));
    }
    if max_iter < 1 {
        return Err(Error::Parameter("max_iter must be ≥ 1".into()));
    }
    let dim = points[0].1.len();
    if points.iter().any(|(_, p)| p.len() != dim) {
        return Err(Error::Input("points have mixed dimensions".into()));
    }

    let mut best: Option<LloydRun> = None;
    for restart in 0..restarts {
        let mut rng =
            ChaCha8Rng::seed_from_u64(crate::derive_seed(seed, &format!("kmeans-{restart}")));
        let init = kmeans_plus_plus(points, k, &mut rng);
        let run = lloyd(points, init, max_iter, tol);
        let better = match &best {
            None => true,
            Some(b) => run.inertia < b.inertia,
        };
        if better {
            best = Some(run);
        }
    }
    let run = best.expect("restarts ≥ 1");

    let assignments = points
        .iter()
        .zip(&run.assignments)
        .map(|((id, _), &a)| (id.clone(), a))
        .collect();
    Ok(KMeansModel {
        k,
        dim,
        centroids: run.centroids,
        assignments,
        inertia: run.inertia,
        iterations_run: run.iterations,
        seed,
        inertia_trace: run.trace,
    })
}

impl KMeansModel {
    /// Nearest-centroid assignment for a new vector.
    pub fn assign(&self, vector: &[f64]) -> Result<usize> {
        if vector.len() != self.dim {
            return Err(Error::Input(format!(
                "vector dimension {} does not match model dimension {}",
                vector.len(),
                self.dim
            )));
        }
        Ok(nearest(&self.centroids, vector))
    }

    pub fn write_section(&self, w: &mut SectionWriter) {
        w.section("kmeans_params")
            .param("k", self.k)
            .param("dim", self.dim)
            .param("inertia", textio::fmt_f64(self.inertia))
            .param("iterations", self.iterations_run)
            .param("seed", self.seed);
        w.section("centroids");
        for c in &self.centroids {
            w.row(c.iter().map(|v| textio::fmt_f64(*v)).collect::<Vec<_>>());
        }
        w.section("assignments");
        for (doc_id, cluster) in &self.assignments {
            w.row([doc_id.as_str(), &cluster.to_string()]);
        }
    }

    pub fn to_text(&self) -> String {
        let mut w = SectionWriter::new("kmeans model");
        self.write_section(&mut w);
        w.finish()
    }

    pub fn from_sections(sections: &[Section], origin: &str) -> Result<KMeansModel> {
        let params = textio::section_params(
            textio::find_section(sections, "kmeans_params", origin)?,
            origin,
        )?;
        let k: usize = textio::require_param(&params, "k", origin)?;
        let dim: usize = textio::require_param(&params, "dim", origin)?;
        let inertia: f64 = textio::require_param(&params, "inertia", origin)?;
        let iterations: usize = textio::require_param(&params, "iterations", origin)?;
        let seed: u64 = textio::require_param(&params, "seed", origin)?;

        let centroid_section = textio::find_section(sections, "centroids", origin)?;
        // capacity capped: `k` is untrusted input
        let mut centroids = Vec::with_capacity(k.min(1024));
        for (line, fields) in &centroid_section.rows {
            if fields.len() != dim {
                return Err(Error::format(
                    origin,
                    *line,
                    format!("expected {dim} components"),
                ));
            }
            let row: Vec<f64> = fields
                .iter()
                .map(|f| textio::parse_f64(f, origin, *line))
                .collect::<Result<_>>()?;
            centroids.push(row);
        }
        if centroids.len() != k {
            return Err(Error::format(origin, 0, "centroid count differs from k"));
        }

        let assignment_section = textio::find_section(sections, "assignments", origin)?;
        let mut assignments = BTreeMap::new();
        for (line, fields) in &assignment_section.rows {
            if fields.len() != 2 {
                return Err(Error::format(origin, *line, "expected doc_id\\tcluster"));
            }
            let cluster = textio::parse_usize(&fields[1], origin, *line)?;
            if cluster >= k {
                return Err(Error::format(origin, *line, "cluster id out of range"));
            }
            if assignments.insert(fields[0].clone(), cluster).is_some() {
                return Err(Error::format(origin, *line, "duplicate doc_id"));
            }
        }

        Ok(KMeansModel {
            k,
            dim,
            centroids,
            assignments,
            inertia,
            iterations_run: iterations,
            seed,
            inertia_trace: Vec::new(),
        })
    }

    pub fn from_text(text: &str, origin: &str) -> Result<KMeansModel> {
        let sections = textio::parse_sections(text, origin)?;
        KMeansModel::from_sections(&sections, origin)
    }
}

/// Inertia-vs-K curve with the knee selected by maximum perpendicular
/// distance to the chord between the curve's endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct ElbowReport {
    pub k_values: Vec<usize>,
    pub inertias: Vec<f64>,
    pub knee: usize,
    /// Set when the curve is too flat for the knee to be meaningful.
    pub degenerate: bool,
}

pub fn elbow_scan(
    points: &[(String, Vec<f64>)],
    k_values: &[usize],
    restarts: usize,
    seed: u64,
) -> Result<ElbowReport> {
    if k_values.len() < 3 {
        return Err(Error::Parameter(
            "elbow scan needs at least 3 K values (knee undefined otherwise)".into(),
        ));
    }
    let mut inertias = Vec::with_capacity(k_values.len());
    for &k in k_values {
        let model = fit_kmeans(
            points,
            k,
            restarts,
            300,
            1e-6,
            crate::derive_seed(seed, &format!("elbow-k{k}")),
        )?;
        inertias.push(model.inertia);
    }

    let (x1, y1) = (k_values[0] as f64, inertias[0]);
    let (x2, y2) = (
        *k_values.last().unwrap() as f64,
        *inertias.last().unwrap(),
    );
    let denom = ((y2 - y1).powi(2) + (x2 - x1).powi(2)).sqrt();
    let mut best_idx = 0usize;
    let mut best_dist = -1.0;
    for (i, (&k, &inertia)) in k_values.iter().zip(&inertias).enumerate() {
        let dist = ((y2 - y1) * k as f64 - (x2 - x1) * inertia + x2 * y1 - y2 * x1).abs() / denom;
        if dist > best_dist + 1e-15 {
            best_dist = dist;
            best_idx = i;
        }
    }
    let degenerate = best_dist <= 1e-12 * (1.0 + y1.abs());
    Ok(ElbowReport {
        k_values: k_values.to_vec(),
        inertias,
        knee: k_values[best_idx],
        degenerate,
    })
}
