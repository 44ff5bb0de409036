//! CBOW trainer: predicts a center word from the mean of its window's
//! input vectors. Full-softmax mode optimizes the exact negative
//! log-likelihood; negative-sampling mode approximates it with a
//! unigram^0.75 noise distribution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::WordVectors;
use crate::error::{Error, Result};
use crate::preprocess::TokenDoc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CbowMode {
    NegativeSampling,
    FullSoftmax,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CbowParams {
    pub dim: usize,
    /// Context words taken each side of the center (clipped at the edges).
    pub window: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub negatives: usize,
    pub mode: CbowMode,
    pub seed: u64,
}

impl Default for CbowParams {
    fn default() -> Self {
        CbowParams {
            dim: 100,
            window: 5,
            epochs: 5,
            learning_rate: 0.025,
            negatives: 5,
            mode: CbowMode::NegativeSampling,
            seed: 0,
        }
    }
}

/// Two-layer CBOW network: input (context) and output (prediction) vectors.
#[derive(Debug, Clone)]
pub struct CbowModel {
    pub params: CbowParams,
    pub input_vectors: Vec<Vec<f64>>,
    pub output_vectors: Vec<Vec<f64>>,
    /// Running loss per epoch (mode-specific objective).
    pub epoch_losses: Vec<f64>,
    /// Cumulative unigram^0.75 weights for negative sampling.
    unigram_cumulative: Vec<f64>,
}

impl CbowModel {
    /// Small random input vectors, zero output vectors (so the initial
    /// full-softmax distribution is exactly uniform).
    pub fn init(vocab_size: usize, params: CbowParams) -> CbowModel {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let dim = params.dim;
        let input_vectors = (0..vocab_size)
            .map(|_| {
                (0..dim)
                    .map(|_| (rng.random::<f64>() - 0.5) / dim as f64)
                    .collect()
            })
            .collect();
        CbowModel {
            params,
            input_vectors,
            output_vectors: vec![vec![0.0; dim]; vocab_size],
            epoch_losses: Vec::new(),
            unigram_cumulative: Vec::new(),
        }
    }

    /// All-zero model (tests and closed-form checks).
    pub fn zeroed(vocab_size: usize, params: CbowParams) -> CbowModel {
        let dim = params.dim;
        CbowModel {
            params,
            input_vectors: vec![vec![0.0; dim]; vocab_size],
            output_vectors: vec![vec![0.0; dim]; vocab_size],
            epoch_losses: Vec::new(),
            unigram_cumulative: Vec::new(),
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.input_vectors.len()
    }

    /// The trained word representation: the input (context) vectors.
    pub fn word_vectors(&self) -> WordVectors {
        WordVectors::new(self.params.dim, self.input_vectors.clone())
    }

    #[allow(clippy::needless_range_loop)] // index form keeps the center-skip visible
    fn context_mean(&self, tokens: &[u32], center: usize) -> Option<Vec<f64>> {
        let n = self.params.window;
        let lo = center.saturating_sub(n);
        let hi = (center + n).min(tokens.len() - 1);
        let mut mean = vec![0.0; self.params.dim];
        let mut count = 0usize;
        for pos in lo..=hi {
            if pos == center {
                continue;
            }
            let row = &self.input_vectors[tokens[pos] as usize];
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
            count += 1;
        }
        if count == 0 {
            return None;
        }
        for m in &mut mean {
            *m /= count as f64;
        }
        Some(mean)
    }

    fn softmax_probs(&self, hidden: &[f64]) -> Vec<f64> {
        let scores: Vec<f64> = self
            .output_vectors
            .iter()
            .map(|row| row.iter().zip(hidden).map(|(a, b)| a * b).sum())
            .collect();
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
        let total: f64 = exps.iter().sum();
        exps.into_iter().map(|e| e / total).collect()
    }

    /// Total full-softmax negative log-likelihood over all center positions.
    pub fn full_softmax_loss(&self, docs: &[TokenDoc]) -> f64 {
        let mut total = 0.0;
        for doc in docs {
            for center in 0..doc.tokens.len() {
                let Some(hidden) = self.context_mean(&doc.tokens, center) else {
                    continue;
                };
                let probs = self.softmax_probs(&hidden);
                total -= probs[doc.tokens[center] as usize].ln();
            }
        }
        total
    }

    /// Mean per-center full-softmax loss (ln V for an all-zero model).
    pub fn mean_token_loss(&self, docs: &[TokenDoc]) -> f64 {
        let centers = center_count(docs);
        if centers == 0 {
            return 0.0;
        }
        self.full_softmax_loss(docs) / centers as f64
    }

    /// Analytic gradient of [`full_softmax_loss`] w.r.t. input and output
    /// vectors.
    pub fn full_softmax_gradient(&self, docs: &[TokenDoc]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let v = self.vocab_size();
        let dim = self.params.dim;
        let mut grad_in = vec![vec![0.0; dim]; v];
        let mut grad_out = vec![vec![0.0; dim]; v];
        let n = self.params.window;
        for doc in docs {
            for center in 0..doc.tokens.len() {
                let Some(hidden) = self.context_mean(&doc.tokens, center) else {
                    continue;
                };
                let mut errors = self.softmax_probs(&hidden);
                errors[doc.tokens[center] as usize] -= 1.0;

                let mut grad_hidden = vec![0.0; dim];
                for (w, err) in errors.iter().enumerate() {
                    for k in 0..dim {
                        grad_out[w][k] += err * hidden[k];
                        grad_hidden[k] += err * self.output_vectors[w][k];
                    }
                }

                let lo = center.saturating_sub(n);
                let hi = (center + n).min(doc.tokens.len() - 1);
                let count = (hi - lo) as f64; // window positions minus the center
                for pos in lo..=hi {
                    if pos == center {
                        continue;
                    }
                    let row = &mut grad_in[doc.tokens[pos] as usize];
                    for k in 0..dim {
                        row[k] += grad_hidden[k] / count;
                    }
                }
            }
        }
        (grad_in, grad_out)
    }

    fn sample_negative(&self, rng: &mut ChaCha8Rng) -> u32 {
        let total = *self.unigram_cumulative.last().expect("table built");
        let r = rng.random::<f64>() * total;
        match self
            .unigram_cumulative
            .binary_search_by(|probe| probe.partial_cmp(&r).expect("finite"))
        {
            Ok(idx) => idx as u32 + 1,
            Err(idx) => idx as u32,
        }
        .min(self.vocab_size() as u32 - 1)
    }
}

/// Number of (center, context) training positions: every token of every
/// document that has at least one other token.
pub fn center_count(docs: &[TokenDoc]) -> usize {
    docs.iter()
        .map(|d| if d.tokens.len() >= 2 { d.tokens.len() } else { 0 })
        .sum()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Trains the CBOW model. Deterministic for a fixed seed (sequential).
pub fn train_pubw(docs: &[TokenDoc], vocab_size: usize, params: CbowParams) -> Result<CbowModel> {
    if docs.is_empty() {
        return Err(Error::Parameter("training docs must be non-empty".into()));
    }
    if params.window < 1 {
        return Err(Error::Parameter("window must be ≥ 1".into()));
    }
    let total_centers = center_count(docs);
    if total_centers == 0 {
        return Err(Error::NoTrainingPairs);
    }

    let mut model = CbowModel::init(vocab_size, params.clone());

    // unigram^0.75 cumulative table for negative sampling
    let mut counts = vec![0u64; vocab_size];
    for doc in docs {
        for &t in &doc.tokens {
            counts[t as usize] += 1;
        }
    }
    let mut cumulative = Vec::with_capacity(vocab_size);
    let mut running = 0.0;
    for &c in &counts {
        running += (c as f64).powf(0.75);
        cumulative.push(running);
    }
    if running <= 0.0 {
        return Err(Error::NoTrainingPairs);
    }
    model.unigram_cumulative = cumulative;

    let mut rng = ChaCha8Rng::seed_from_u64(crate::derive_seed(params.seed, "pubw-sampling"));
    let dim = params.dim;
    let total_steps = (total_centers * params.epochs) as f64;
    let mut processed = 0usize;

    for epoch in 0..params.epochs {
        let mut epoch_loss = 0.0;
        for doc in docs {
            if doc.tokens.len() < 2 {
                continue;
            }
            for center in 0..doc.tokens.len() {
                let lr = params.learning_rate
                    * (1.0 - processed as f64 / total_steps).max(1e-4);
                processed += 1;
                let center_word = doc.tokens[center] as usize;
                let hidden = model
                    .context_mean(&doc.tokens, center)
                    .expect("len ≥ 2 ⇒ context exists");

                let mut grad_hidden = vec![0.0; dim];
                match params.mode {
                    CbowMode::FullSoftmax => {
                        let mut errors = model.softmax_probs(&hidden);
                        epoch_loss -= errors[center_word].ln();
                        errors[center_word] -= 1.0;
                        for (w, err) in errors.iter().enumerate() {
                            let row = &mut model.output_vectors[w];
                            for k in 0..dim {
                                grad_hidden[k] += err * row[k];
                                row[k] -= lr * err * hidden[k];
                            }
                        }
                    }
                    CbowMode::NegativeSampling => {
                        // center as the positive target, then sampled noise
                        for sample in 0..=params.negatives {
                            let (target, label) = if sample == 0 {
                                (center_word, 1.0)
                            } else {
                                let neg = model.sample_negative(&mut rng) as usize;
                                if neg == center_word {
                                    continue;
                                }
                                (neg, 0.0)
                            };
                            let row = &model.output_vectors[target];
                            let score: f64 =
                                row.iter().zip(&hidden).map(|(a, b)| a * b).sum();
                            let prob = sigmoid(score);
                            epoch_loss -= if label > 0.5 {
                                prob.max(f64::MIN_POSITIVE).ln()
                            } else {
                                (1.0 - prob).max(f64::MIN_POSITIVE).ln()
                            };
                            let err = prob - label;
                            let row = &mut model.output_vectors[target];
                            for k in 0..dim {
                                grad_hidden[k] += err * row[k];
                                row[k] -= lr * err * hidden[k];
                            }
                        }
                    }
                }

                let n = params.window;
                let lo = center.saturating_sub(n);
                let hi = (center + n).min(doc.tokens.len() - 1);
                let count = (hi - lo) as f64;
                for pos in lo..=hi {
                    if pos == center {
                        continue;
                    }
                    let row = &mut model.input_vectors[doc.tokens[pos] as usize];
                    for k in 0..dim {
                        row[k] -= lr * grad_hidden[k] / count;
                    }
                }
            }
        }
        if !epoch_loss.is_finite() {
            return Err(Error::Divergence {
                what: "pubw training".into(),
                unit: "epoch".into(),
                step: epoch,
            });
        }
        model.epoch_losses.push(epoch_loss);
    }
    Ok(model)
}
