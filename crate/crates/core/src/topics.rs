//! Per-cluster LDA topic modeling via collapsed Gibbs sampling.
//!
//! The sampler integrates out θ and β and resamples each token's topic
//! from the count tables; phi/theta are posterior-mean estimates averaged
//! over post-burn-in sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::preprocess::{TokenDoc, Vocabulary};
use crate::textio::{self, Section, SectionWriter};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LdaParams {
    pub k_topics: usize,
    /// Symmetric per-document Dirichlet parameter; 0.0 selects 50/K.
    pub alpha: f64,
    /// Symmetric per-topic Dirichlet parameter.
    pub eta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl Default for LdaParams {
    fn default() -> Self {
        LdaParams {
            k_topics: 10,
            alpha: 0.0,
            eta: 0.01,
            iterations: 1000,
            burn_in: 500,
            seed: 0,
        }
    }
}

impl LdaParams {
    pub fn effective_alpha(&self) -> f64 {
        if self.alpha > 0.0 {
            self.alpha
        } else {
            50.0 / self.k_topics as f64
        }
    }
}

/// Collapsed Gibbs chain state, exposed so integrity checks can run
/// after individual sweeps.
pub struct GibbsSampler {
    pub params: LdaParams,
    vocab_size: usize,
    alpha: f64,
    /// words[d][i]: vocabulary id of token i in doc d (empty docs removed).
    words: Vec<Vec<u32>>,
    doc_ids: Vec<String>,
    z: Vec<Vec<usize>>,
    n_dk: Vec<Vec<u64>>,
    n_kw: Vec<Vec<u64>>,
    n_k: Vec<u64>,
    rng: ChaCha8Rng,
}

impl GibbsSampler {
    pub fn new(docs: &[TokenDoc], vocab_size: usize, params: LdaParams) -> Result<GibbsSampler> {
        if params.k_topics < 1 {
            return Err(Error::Parameter("k_topics must be ≥ 1".into()));
        }
        if params.iterations < 1 || params.burn_in >= params.iterations {
            return Err(Error::Parameter(
                "need iterations ≥ 1 and burn_in < iterations".into(),
            ));
        }
        let populated: Vec<&TokenDoc> = docs.iter().filter(|d| !d.tokens.is_empty()).collect();
        if populated.is_empty() {
            return Err(Error::NoTokens);
        }
        for d in &populated {
            if let Some(&bad) = d.tokens.iter().find(|&&t| t as usize >= vocab_size) {
                return Err(Error::Input(format!(
                    "document {:?} has id {bad} outside vocabulary size {vocab_size}",
                    d.doc_id
                )));
            }
        }

        let k = params.k_topics;
        let alpha = params.effective_alpha();
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut n_dk = vec![vec![0u64; k]; populated.len()];
        let mut n_kw = vec![vec![0u64; vocab_size]; k];
        let mut n_k = vec![0u64; k];
        let mut z = Vec::with_capacity(populated.len());
        let mut words = Vec::with_capacity(populated.len());
        let mut doc_ids = Vec::with_capacity(populated.len());
        for (d, doc) in populated.iter().enumerate() {
            let mut zd = Vec::with_capacity(doc.tokens.len());
            for &w in &doc.tokens {
                let topic = rng.random_range(0..k);
                zd.push(topic);
                n_dk[d][topic] += 1;
                n_kw[topic][w as usize] += 1;
                n_k[topic] += 1;
            }
            z.push(zd);
            words.push(doc.tokens.clone());
            doc_ids.push(doc.doc_id.clone());
        }
        Ok(GibbsSampler {
            params,
            vocab_size,
            alpha,
            words,
            doc_ids,
            z,
            n_dk,
            n_kw,
            n_k,
            rng,
        })
    }

    pub fn n_docs(&self) -> usize {
        self.words.len()
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn counts(&self) -> (&[Vec<u64>], &[Vec<u64>], &[u64]) {
        (&self.n_dk, &self.n_kw, &self.n_k)
    }

    pub fn doc_len(&self, d: usize) -> usize {
        self.words[d].len()
    }

    /// One full sweep: every token's topic is resampled in place.
    pub fn sweep(&mut self) {
        let k = self.params.k_topics;
        let eta = self.params.eta;
        let v_eta = self.vocab_size as f64 * eta;
        let mut weights = vec![0.0; k];
        for d in 0..self.words.len() {
            for i in 0..self.words[d].len() {
                let w = self.words[d][i] as usize;
                let old = self.z[d][i];
                self.n_dk[d][old] -= 1;
                self.n_kw[old][w] -= 1;
                self.n_k[old] -= 1;

                let mut total = 0.0;
                for (t, weight) in weights.iter_mut().enumerate() {
                    *weight = (self.n_dk[d][t] as f64 + self.alpha)
                        * (self.n_kw[t][w] as f64 + eta)
                        / (self.n_k[t] as f64 + v_eta);
                    total += *weight;
                }
                let mut target = self.rng.random::<f64>() * total;
                let mut new = k - 1;
                for (t, &weight) in weights.iter().enumerate() {
                    if target < weight {
                        new = t;
                        break;
                    }
                    target -= weight;
                }

                self.z[d][i] = new;
                self.n_dk[d][new] += 1;
                self.n_kw[new][w] += 1;
                self.n_k[new] += 1;
            }
        }
    }

    /// Collapsed log joint ln P(w, z | α, η) of the current state.
    pub fn log_joint(&self) -> f64 {
        let k = self.params.k_topics as f64;
        let v = self.vocab_size as f64;
        let alpha = self.alpha;
        let eta = self.params.eta;
        let lg = libm::lgamma;

        let mut total = 0.0;
        for (d, row) in self.n_dk.iter().enumerate() {
            let n_d = self.words[d].len() as f64;
            total += lg(k * alpha) - k * lg(alpha) - lg(n_d + k * alpha);
            for &count in row {
                total += lg(count as f64 + alpha);
            }
        }
        for (t, row) in self.n_kw.iter().enumerate() {
            total += lg(v * eta) - v * lg(eta) - lg(self.n_k[t] as f64 + v * eta);
            for &count in row {
                total += lg(count as f64 + eta);
            }
        }
        total
    }

    /// Posterior-mean topic–word distribution from the current counts.
    pub fn phi_estimate(&self) -> Vec<Vec<f64>> {
        let eta = self.params.eta;
        let v_eta = self.vocab_size as f64 * eta;
        self.n_kw
            .iter()
            .zip(&self.n_k)
            .map(|(row, &nk)| {
                let denom = nk as f64 + v_eta;
                row.iter().map(|&c| (c as f64 + eta) / denom).collect()
            })
            .collect()
    }

    /// Posterior-mean document–topic distribution from the current counts.
    pub fn theta_estimate(&self) -> Vec<Vec<f64>> {
        let k_alpha = self.params.k_topics as f64 * self.alpha;
        self.n_dk
            .iter()
            .enumerate()
            .map(|(d, row)| {
                let denom = self.words[d].len() as f64 + k_alpha;
                row.iter().map(|&c| (c as f64 + self.alpha) / denom).collect()
            })
            .collect()
    }
}

/// Fitted model: averaged posterior means plus the final chain state.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaModel {
    pub params: LdaParams,
    pub vocab_size: usize,
    pub doc_ids: Vec<String>,
    /// K×V topic–word distributions (rows sum to 1).
    pub phi: Vec<Vec<f64>>,
    /// D×K document–topic distributions (rows sum to 1).
    pub theta: Vec<Vec<f64>>,
    /// Final per-token topic assignments.
    pub z: Vec<Vec<usize>>,
    /// (sweep, collapsed log joint), recorded every 10 sweeps.
    pub log_joint_trace: Vec<(usize, f64)>,
}

/// Runs the collapsed Gibbs chain; phi/theta are the averages of the
/// per-sweep posterior-mean estimates over post-burn-in sweeps.
pub fn fit_lda(docs: &[TokenDoc], vocab_size: usize, params: LdaParams) -> Result<LdaModel> {
    let mut sampler = GibbsSampler::new(docs, vocab_size, params.clone())?;
    let k = params.k_topics;
    let n_docs = sampler.n_docs();

    let mut phi_acc = vec![vec![0.0; vocab_size]; k];
    let mut theta_acc = vec![vec![0.0; k]; n_docs];
    let mut samples = 0usize;
    let mut trace = Vec::new();

    for sweep in 1..=params.iterations {
        sampler.sweep();
        if sweep % 10 == 0 {
            trace.push((sweep, sampler.log_joint()));
        }
        if sweep > params.burn_in {
            samples += 1;
            for (acc, row) in phi_acc.iter_mut().zip(sampler.phi_estimate()) {
                for (a, v) in acc.iter_mut().zip(row) {
                    *a += v;
                }
            }
            for (acc, row) in theta_acc.iter_mut().zip(sampler.theta_estimate()) {
                for (a, v) in acc.iter_mut().zip(row) {
                    *a += v;
                }
            }
        }
    }

    let scale = 1.0 / samples as f64;
    for row in &mut phi_acc {
        for v in row {
            *v *= scale;
        }
    }
    for row in &mut theta_acc {
        for v in row {
            *v *= scale;
        }
    }

    Ok(LdaModel {
        params,
        vocab_size,
        doc_ids: sampler.doc_ids.clone(),
        phi: phi_acc,
        theta: theta_acc,
        z: sampler.z.clone(),
        log_joint_trace: trace,
    })
}

/// Ranked top words of one topic: probabilities descending, ties broken
/// lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicSummary {
    pub cluster: usize,
    pub topic: usize,
    pub top_words: Vec<(String, f64)>,
}

impl LdaModel {
    pub fn top_words(
        &self,
        vocab: &Vocabulary,
        topic: usize,
        n_top: usize,
    ) -> Result<TopicSummary> {
        if topic >= self.params.k_topics {
            return Err(Error::Input(format!(
                "topic {topic} out of range 0..{}",
                self.params.k_topics
            )));
        }
        if n_top > self.vocab_size {
            return Err(Error::Input(format!(
                "n_top {n_top} exceeds vocabulary size {}",
                self.vocab_size
            )));
        }
        let mut scored: Vec<(String, f64)> = self.phi[topic]
            .iter()
            .enumerate()
            .map(|(id, &p)| {
                let token = vocab
                    .token(id as u32)
                    .unwrap_or_default()
                    .to_string();
                (token, p)
            })
            .collect();
        scored.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("finite probabilities")
                .then_with(|| a.0.cmp(&b.0))
        });
        scored.truncate(n_top);
        Ok(TopicSummary {
            cluster: 0,
            topic,
            top_words: scored,
        })
    }

    pub fn write_section(&self, w: &mut SectionWriter) {
        w.section("lda_params")
            .param("k_topics", self.params.k_topics)
            .param("alpha", textio::fmt_f64(self.params.alpha))
            .param("eta", textio::fmt_f64(self.params.eta))
            .param("iterations", self.params.iterations)
            .param("burn_in", self.params.burn_in)
            .param("seed", self.params.seed)
            .param("vocab_size", self.vocab_size);
        w.section("phi");
        for row in &self.phi {
            w.row(row.iter().map(|v| textio::fmt_f64(*v)).collect::<Vec<_>>());
        }
        w.section("theta");
        for (doc_id, row) in self.doc_ids.iter().zip(&self.theta) {
            let mut fields = vec![doc_id.clone()];
            fields.extend(row.iter().map(|v| textio::fmt_f64(*v)));
            w.row(fields);
        }
        w.section("z");
        for (doc_id, zd) in self.doc_ids.iter().zip(&self.z) {
            let joined = zd
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(" ");
            w.row([doc_id.as_str(), &joined]);
        }
    }

    pub fn to_text(&self) -> String {
        let mut w = SectionWriter::new("lda model");
        self.write_section(&mut w);
        w.finish()
    }

    pub fn from_sections(sections: &[Section], origin: &str) -> Result<LdaModel> {
        let raw = textio::section_params(
            textio::find_section(sections, "lda_params", origin)?,
            origin,
        )?;
        let params = LdaParams {
            k_topics: textio::require_param(&raw, "k_topics", origin)?,
            alpha: textio::require_param(&raw, "alpha", origin)?,
            eta: textio::require_param(&raw, "eta", origin)?,
            iterations: textio::require_param(&raw, "iterations", origin)?,
            burn_in: textio::require_param(&raw, "burn_in", origin)?,
            seed: textio::require_param(&raw, "seed", origin)?,
        };
        let vocab_size: usize = textio::require_param(&raw, "vocab_size", origin)?;

        let phi_section = textio::find_section(sections, "phi", origin)?;
        let mut phi = Vec::new();
        for (line, fields) in &phi_section.rows {
            if fields.len() != vocab_size {
                return Err(Error::format(origin, *line, "phi row length mismatch"));
            }
            phi.push(
                fields
                    .iter()
                    .map(|f| textio::parse_f64(f, origin, *line))
                    .collect::<Result<Vec<f64>>>()?,
            );
        }
        if phi.len() != params.k_topics {
            return Err(Error::format(origin, 0, "phi row count differs from k_topics"));
        }

        let theta_section = textio::find_section(sections, "theta", origin)?;
        let mut doc_ids = Vec::new();
        let mut theta = Vec::new();
        for (line, fields) in &theta_section.rows {
            if fields.len() != params.k_topics + 1 {
                return Err(Error::format(origin, *line, "theta row length mismatch"));
            }
            doc_ids.push(fields[0].clone());
            theta.push(
                fields[1..]
                    .iter()
                    .map(|f| textio::parse_f64(f, origin, *line))
                    .collect::<Result<Vec<f64>>>()?,
            );
        }

        let z_section = textio::find_section(sections, "z", origin)?;
        if z_section.rows.len() != doc_ids.len() {
            return Err(Error::format(origin, 0, "z row count differs from theta"));
        }
        let mut z = Vec::new();
        for ((line, fields), doc_id) in z_section.rows.iter().zip(&doc_ids) {
            if fields.len() != 2 || &fields[0] != doc_id {
                return Err(Error::format(origin, *line, "z rows must mirror theta order"));
            }
            let assignments = fields[1]
                .split_whitespace()
                .map(|t| {
                    let v = textio::parse_usize(t, origin, *line)?;
                    if v >= params.k_topics {
                        return Err(Error::format(origin, *line, "topic out of range"));
                    }
                    Ok(v)
                })
                .collect::<Result<Vec<usize>>>()?;
            z.push(assignments);
        }

        Ok(LdaModel {
            params,
            vocab_size,
            doc_ids,
            phi,
            theta,
            z,
            log_joint_trace: Vec::new(),
        })
    }

    pub fn from_text(text: &str, origin: &str) -> Result<LdaModel> {
        let sections = textio::parse_sections(text, origin)?;
        LdaModel::from_sections(&sections, origin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::build_vocabulary;
    use std::collections::HashSet;

    fn doc(id: &str, ids: &[u32]) -> TokenDoc {
        TokenDoc {
            doc_id: id.into(),
            tokens: ids.to_vec(),
        }
    }

    fn check_counts(sampler: &GibbsSampler) {
        let (n_dk, n_kw, n_k) = sampler.counts();
        for (t, row) in n_kw.iter().enumerate() {
            assert_eq!(row.iter().sum::<u64>(), n_k[t]);
        }
        for (d, row) in n_dk.iter().enumerate() {
            assert_eq!(row.iter().sum::<u64>() as usize, sampler.doc_len(d));
        }
    }

    #[test]
    fn count_conservation_holds_after_every_sweep() {
        let docs = vec![doc("a", &[0, 1, 2, 0]), doc("b", &[2, 3]), doc("c", &[4])];
        let params = LdaParams {
            k_topics: 3,
            iterations: 20,
            burn_in: 5,
            seed: 1,
            ..LdaParams::default()
        };
        let mut sampler = GibbsSampler::new(&docs, 5, params).unwrap();
        check_counts(&sampler);
        for _ in 0..20 {
            sampler.sweep();
            check_counts(&sampler);
        }
    }

    #[test]
    fn single_topic_has_closed_form() {
        let docs = vec![doc("a", &[0, 0, 1]), doc("b", &[0, 2])];
        let params = LdaParams {
            k_topics: 1,
            eta: 0.01,
            iterations: 10,
            burn_in: 2,
            seed: 3,
            ..LdaParams::default()
        };
        let model = fit_lda(&docs, 3, params).unwrap();
        // phi = (corpus counts + eta) normalized: counts are (3, 1, 1).
        let denom = 5.0 + 3.0 * 0.01;
        let expected = [3.01 / denom, 1.01 / denom, 1.01 / denom];
        for (p, e) in model.phi[0].iter().zip(expected) {
            assert!((p - e).abs() < 1e-12);
        }
        for row in &model.theta {
            assert_eq!(row.len(), 1);
            assert!((row[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rows_are_distributions() {
        let docs = vec![doc("a", &[0, 1, 2, 3, 0, 1]), doc("b", &[3, 2, 1])];
        let params = LdaParams {
            k_topics: 4,
            iterations: 30,
            burn_in: 10,
            seed: 9,
            ..LdaParams::default()
        };
        let model = fit_lda(&docs, 4, params).unwrap();
        for row in model.phi.iter().chain(&model.theta) {
            assert!(row.iter().all(|&p| p >= 0.0));
            let total: f64 = row.iter().sum();
            assert!((total - 1.0).abs() < 1e-9, "row sum {total}");
        }
    }

    #[test]
    fn fixed_seed_reproduces_the_chain() {
        let docs = vec![doc("a", &[0, 1, 2, 3]), doc("b", &[1, 1, 0])];
        let params = LdaParams {
            k_topics: 2,
            iterations: 25,
            burn_in: 5,
            seed: 11,
            ..LdaParams::default()
        };
        let m1 = fit_lda(&docs, 4, params.clone()).unwrap();
        let m2 = fit_lda(&docs, 4, params).unwrap();
        assert_eq!(m1.z, m2.z);
        assert_eq!(m1.phi, m2.phi);
        assert_eq!(m1.theta, m2.theta);
    }

    /// Two disjoint topic vocabularies; docs draw from exactly one.
    fn planted_corpus(seed: u64, n_docs: usize, vocab_half: u32) -> Vec<TokenDoc> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n_docs)
            .map(|i| {
                let base = if i % 2 == 0 { 0 } else { vocab_half };
                let tokens: Vec<u32> = (0..25)
                    .map(|_| base + rng.random_range(0..vocab_half))
                    .collect();
                doc(&format!("d{i}"), &tokens)
            })
            .collect()
    }

    #[test]
    fn planted_topics_are_recovered_in_most_seeds() {
        let vocab_half = 15u32;
        let mut pure_runs = 0;
        for seed in 0..5u64 {
            let docs = planted_corpus(seed, 200, vocab_half);
            let params = LdaParams {
                k_topics: 2,
                alpha: 1.0, // 50/K would swamp these short documents
                iterations: 400,
                burn_in: 200,
                seed,
                ..LdaParams::default()
            };
            let model = fit_lda(&docs, (vocab_half * 2) as usize, params).unwrap();
            let mut both_pure = true;
            for topic in 0..2 {
                let mut ranked: Vec<(usize, f64)> =
                    model.phi[topic].iter().cloned().enumerate().collect();
                ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
                let top: Vec<usize> = ranked.iter().take(10).map(|(id, _)| *id).collect();
                let in_first: usize = top
                    .iter()
                    .filter(|&&id| id < vocab_half as usize)
                    .count();
                let purity = in_first.max(10 - in_first);
                if purity < 9 {
                    both_pure = false;
                }
            }
            if both_pure {
                pure_runs += 1;
            }
        }
        assert!(pure_runs >= 4, "pure in only {pure_runs}/5 seeds");
    }

    #[test]
    fn log_joint_trends_upward_on_planted_fixture() {
        let docs = planted_corpus(42, 100, 10);
        let params = LdaParams {
            k_topics: 2,
            alpha: 1.0,
            iterations: 200,
            burn_in: 100,
            seed: 42,
            ..LdaParams::default()
        };
        let model = fit_lda(&docs, 20, params).unwrap();
        let values: Vec<f64> = model.log_joint_trace.iter().map(|(_, v)| *v).collect();
        assert!(values.iter().all(|v| v.is_finite()));
        let median = |xs: &[f64]| {
            let mut v = xs.to_vec();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v[v.len() / 2]
        };
        let first = median(&values[..values.len() / 2]);
        let second = median(&values[values.len() / 2..]);
        assert!(
            second >= first,
            "log joint declined: {first} → {second}"
        );
    }

    #[test]
    fn top_words_rank_by_probability_then_token() {
        let docs = vec![
            doc("a", &[0, 0, 0, 1, 2]),
            doc("b", &[0, 1]),
        ];
        let owned: Vec<(String, Vec<String>)> = vec![
            ("a".into(), vec!["design".into(), "design".into(), "design".into(), "user".into(), "tool".into()]),
            ("b".into(), vec!["design".into(), "user".into()]),
        ];
        let (vocab, _) = build_vocabulary(&owned, &HashSet::new(), 1).unwrap();
        assert_eq!(vocab.id("design"), Some(0));
        let params = LdaParams {
            k_topics: 1,
            iterations: 5,
            burn_in: 1,
            seed: 0,
            ..LdaParams::default()
        };
        let model = fit_lda(&docs, 3, params).unwrap();
        let summary = model.top_words(&vocab, 0, 3).unwrap();
        assert_eq!(summary.top_words[0].0, "design");
        assert_eq!(summary.top_words.len(), 3);
        // Full vocabulary when n_top = V, probabilities descending.
        for pair in summary.top_words.windows(2) {
            assert!(pair[0].1 >= pair[1].1);
        }
    }

    #[test]
    fn hand_set_phi_ranks_exactly() {
        let owned: Vec<(String, Vec<String>)> = vec![(
            "a".into(),
            vec!["alpha".into(), "beta".into(), "gamma".into()],
        )];
        let (vocab, _) = build_vocabulary(&owned, &HashSet::new(), 1).unwrap();
        let model = LdaModel {
            params: LdaParams {
                k_topics: 1,
                ..LdaParams::default()
            },
            vocab_size: 3,
            doc_ids: vec!["a".into()],
            phi: vec![vec![0.3, 0.5, 0.2]],
            theta: vec![vec![1.0]],
            z: vec![vec![0, 0, 0]],
            log_joint_trace: vec![],
        };
        let summary = model.top_words(&vocab, 0, 3).unwrap();
        let tokens: Vec<&str> = summary.top_words.iter().map(|(t, _)| t.as_str()).collect();
        // ids: alpha=0, beta=1, gamma=2; phi ranks beta, alpha, gamma.
        assert_eq!(tokens, vec!["beta", "alpha", "gamma"]);
    }

    #[test]
    fn all_empty_docs_is_a_no_tokens_error() {
        let docs = vec![doc("a", &[]), doc("b", &[])];
        assert!(matches!(
            fit_lda(&docs, 3, LdaParams::default()),
            Err(Error::NoTokens)
        ));
    }

    #[test]
    fn out_of_range_topic_is_an_input_error() {
        let docs = vec![doc("a", &[0, 1])];
        let owned: Vec<(String, Vec<String>)> =
            vec![("a".into(), vec!["x".into(), "y".into()])];
        let (vocab, _) = build_vocabulary(&owned, &HashSet::new(), 1).unwrap();
        let params = LdaParams {
            k_topics: 2,
            iterations: 5,
            burn_in: 1,
            seed: 0,
            ..LdaParams::default()
        };
        let model = fit_lda(&docs, 2, params).unwrap();
        assert!(matches!(
            model.top_words(&vocab, 5, 1),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            model.top_words(&vocab, 0, 3),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn model_text_round_trips() {
        let docs = vec![doc("a", &[0, 1, 2]), doc("b", &[2, 0])];
        let params = LdaParams {
            k_topics: 2,
            iterations: 15,
            burn_in: 5,
            seed: 8,
            ..LdaParams::default()
        };
        let model = fit_lda(&docs, 3, params).unwrap();
        let mut reloaded = LdaModel::from_text(&model.to_text(), "test").unwrap();
        reloaded.log_joint_trace = model.log_joint_trace.clone();
        assert_eq!(reloaded, model);
    }
}
