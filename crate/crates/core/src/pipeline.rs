//! Staged pipeline: each stage reads its upstream artifacts from the
//! output directory, writes exactly one plain-text artifact, and records a
//! manifest entry with the artifact's SHA-256. Reruns with identical
//! config, seed, and inputs reproduce identical artifact bytes.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::cluster::{elbow_scan, fit_kmeans, KMeansModel};
use crate::config::{EmbeddingMethod, PipelineConfig};
use crate::corpus::{self, Corpus, LoadMode};
use crate::embedding::{
    build_cooccurrence, embed_document, train_pubg, train_pubw, CbowParams, GloveParams,
    WordVectors,
};
use crate::error::{Error, Result};
use crate::eval::{mi_report, umass_coherence, DocStats};
use crate::preprocess::{
    self, load_stopwords, Lexicon, PhraseModel, PreprocessOptions, TokenDoc, Vocabulary,
};
use crate::project::{fit_tsne, TsneConfig};
use crate::textio::{self, SectionWriter};
use crate::tfidf::{fit_tfidf, read_sparse_vectors, write_sparse_vectors, SparseDocVector, TfidfModel};
use crate::topics::{fit_lda, LdaParams, TopicSummary};
use crate::trends::build_trend_series;

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_FILE: &str = "manifest.kv";

/// Pipeline stages in dependency order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Ingest,
    Preprocess,
    Embed,
    Cluster,
    Topics,
    Evaluate,
    Tsne,
    Trends,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Ingest,
        Stage::Preprocess,
        Stage::Embed,
        Stage::Cluster,
        Stage::Topics,
        Stage::Evaluate,
        Stage::Tsne,
        Stage::Trends,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Preprocess => "preprocess",
            Stage::Embed => "embed",
            Stage::Cluster => "cluster",
            Stage::Topics => "topics",
            Stage::Evaluate => "evaluate",
            Stage::Tsne => "tsne",
            Stage::Trends => "trends",
        }
    }

    pub fn artifact(self) -> &'static str {
        match self {
            Stage::Ingest => "corpus.csv",
            Stage::Preprocess => "preprocess.txt",
            Stage::Embed => "embedding.txt",
            Stage::Cluster => "kmeans.txt",
            Stage::Topics => "topics.txt",
            Stage::Evaluate => "eval.txt",
            Stage::Tsne => "tsne.txt",
            Stage::Trends => "trends.txt",
        }
    }

    pub fn upstream(self) -> &'static [Stage] {
        match self {
            Stage::Ingest => &[],
            Stage::Preprocess => &[Stage::Ingest],
            Stage::Embed => &[Stage::Preprocess],
            Stage::Cluster => &[Stage::Embed],
            Stage::Topics => &[Stage::Preprocess, Stage::Cluster],
            Stage::Evaluate => &[Stage::Topics, Stage::Preprocess],
            Stage::Tsne => &[Stage::Embed, Stage::Cluster, Stage::Ingest],
            Stage::Trends => &[Stage::Ingest, Stage::Cluster],
        }
    }
}

impl std::str::FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Stage> {
        Stage::ALL
            .iter()
            .copied()
            .find(|stage| stage.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown stage {s:?}")))
    }
}

/// One artifact recorded by a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub stage: String,
    pub file: String,
    pub sha256: String,
}

/// Config snapshot, artifact hashes, and per-stage wall times of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub version: String,
    pub seed: u64,
    pub config_snapshot: String,
    pub artifacts: Vec<ManifestEntry>,
    pub timings: Vec<(String, u128)>,
}

impl RunManifest {
    fn new(config: &PipelineConfig) -> RunManifest {
        RunManifest {
            version: TOOLKIT_VERSION.to_string(),
            seed: config.seed,
            config_snapshot: config.to_toml_string(),
            artifacts: Vec::new(),
            timings: Vec::new(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut w = SectionWriter::new("run manifest");
        w.section("manifest")
            .param("version", &self.version)
            .param("seed", self.seed);
        w.section("config");
        for line in self.config_snapshot.lines() {
            if !line.is_empty() {
                w.row([line]);
            }
        }
        w.section("artifacts");
        for entry in &self.artifacts {
            w.row([entry.stage.as_str(), entry.file.as_str(), entry.sha256.as_str()]);
        }
        w.section("timings");
        for (stage, millis) in &self.timings {
            w.row([stage.as_str(), &millis.to_string()]);
        }
        w.finish()
    }

    pub fn from_text(text: &str, origin: &str) -> Result<RunManifest> {
        let sections = textio::parse_sections(text, origin)?;
        let params = textio::section_params(
            textio::find_section(&sections, "manifest", origin)?,
            origin,
        )?;
        let version: String = textio::require_param(&params, "version", origin)?;
        let seed: u64 = textio::require_param(&params, "seed", origin)?;
        let config_snapshot = textio::find_section(&sections, "config", origin)?
            .rows
            .iter()
            .map(|(_, fields)| fields.join("\t"))
            .collect::<Vec<_>>()
            .join("\n");
        let mut artifacts = Vec::new();
        for (line, fields) in &textio::find_section(&sections, "artifacts", origin)?.rows {
            if fields.len() != 3 {
                return Err(Error::format(origin, *line, "expected stage\\tfile\\tsha256"));
            }
            artifacts.push(ManifestEntry {
                stage: fields[0].clone(),
                file: fields[1].clone(),
                sha256: fields[2].clone(),
            });
        }
        let mut timings = Vec::new();
        for (line, fields) in &textio::find_section(&sections, "timings", origin)?.rows {
            if fields.len() != 2 {
                return Err(Error::format(origin, *line, "expected stage\\tmillis"));
            }
            timings.push((
                fields[0].clone(),
                fields[1]
                    .parse()
                    .map_err(|_| Error::format(origin, *line, "bad millis"))?,
            ));
        }
        Ok(RunManifest {
            version,
            seed,
            config_snapshot,
            artifacts,
            timings,
        })
    }

    /// Confirms every listed artifact exists and matches its hash.
    pub fn verify(&self, dir: &Path) -> Result<()> {
        for entry in &self.artifacts {
            let path = dir.join(&entry.file);
            let bytes = std::fs::read(&path).map_err(|e| {
                Error::Internal(format!("manifest artifact {} unreadable: {e}", entry.file))
            })?;
            let actual = textio::sha256_hex(&bytes);
            if actual != entry.sha256 {
                return Err(Error::Internal(format!(
                    "artifact {} hash mismatch: manifest {} actual {actual}",
                    entry.file, entry.sha256
                )));
            }
        }
        Ok(())
    }
}

/// Runs the requested stages in dependency order. Artifacts land in
/// `config.output_dir`; the manifest is written even when a stage fails.
pub fn run_pipeline(config: &PipelineConfig, stages: &[Stage]) -> Result<RunManifest> {
    let requested: BTreeSet<Stage> = stages.iter().copied().collect();
    if requested.is_empty() {
        return Err(Error::Parameter("no stages requested".into()));
    }
    let order: Vec<Stage> = Stage::ALL
        .iter()
        .copied()
        .filter(|s| requested.contains(s))
        .collect();
    let dir = &config.output_dir;

    // Dependency check: upstream artifacts must exist or be scheduled.
    for stage in &order {
        for upstream in stage.upstream() {
            let artifact = dir.join(upstream.artifact());
            if !requested.contains(upstream) && !artifact.exists() {
                return Err(Error::Dependency {
                    stage: stage.name().to_string(),
                    upstream: upstream.name().to_string(),
                    artifact,
                });
            }
        }
    }

    std::fs::create_dir_all(dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;

    let mut manifest = RunManifest::new(config);
    for stage in order {
        let start = Instant::now();
        let result = pool.install(|| execute_stage(config, stage));
        match result {
            Ok(content) => {
                let path = dir.join(stage.artifact());
                std::fs::write(&path, &content)?;
                manifest.artifacts.push(ManifestEntry {
                    stage: stage.name().to_string(),
                    file: stage.artifact().to_string(),
                    sha256: textio::sha256_hex(&content),
                });
                manifest
                    .timings
                    .push((stage.name().to_string(), start.elapsed().as_millis()));
            }
            Err(err) => {
                // Partial manifest for the stages that did complete.
                let _ = textio::write_file(&dir.join(MANIFEST_FILE), &manifest.to_text());
                return Err(Error::Stage {
                    stage: stage.name().to_string(),
                    source: Box::new(err),
                });
            }
        }
    }
    textio::write_file(&dir.join(MANIFEST_FILE), &manifest.to_text())?;
    Ok(manifest)
}

fn execute_stage(config: &PipelineConfig, stage: Stage) -> Result<Vec<u8>> {
    match stage {
        Stage::Ingest => stage_ingest(config),
        Stage::Preprocess => stage_preprocess(config).map(String::into_bytes),
        Stage::Embed => stage_embed(config).map(String::into_bytes),
        Stage::Cluster => stage_cluster(config).map(String::into_bytes),
        Stage::Topics => stage_topics(config).map(String::into_bytes),
        Stage::Evaluate => stage_evaluate(config).map(String::into_bytes),
        Stage::Tsne => stage_tsne(config).map(String::into_bytes),
        Stage::Trends => stage_trends(config).map(String::into_bytes),
    }
}

// ---------------------------------------------------------------------------
// Stage implementations
// ---------------------------------------------------------------------------

fn stage_ingest(config: &PipelineConfig) -> Result<Vec<u8>> {
    let report = corpus::load_corpus(
        &config.corpus.path,
        &config.corpus.columns,
        config.corpus.mode,
    )?;
    let mut loaded = report.corpus;
    if let Some(label) = &config.corpus.venue_label {
        loaded.venue_label = label.clone();
    }
    corpus::corpus_to_csv_bytes(&loaded)
}

fn load_corpus_artifact(config: &PipelineConfig) -> Result<Corpus> {
    let path = config.output_dir.join(Stage::Ingest.artifact());
    let report = corpus::load_corpus(&path, &corpus::canonical_schema(), LoadMode::Strict)?;
    let mut loaded = report.corpus;
    if let Some(label) = &config.corpus.venue_label {
        loaded.venue_label = label.clone();
    }
    Ok(loaded)
}

fn preprocess_options(config: &PipelineConfig) -> Result<PreprocessOptions> {
    let lexicon = match &config.preprocess.lexicon_path {
        Some(path) => Lexicon::from_file(path)?,
        None => Lexicon::bundled().clone(),
    };
    let stopwords = match &config.preprocess.stopwords_path {
        Some(path) => load_stopwords(path)?,
        None => preprocess::bundled_stopwords(),
    };
    Ok(PreprocessOptions {
        lexicon,
        stopwords,
        pos_filter: config.preprocess.pos_filter,
        phrase_min_count: config.preprocess.phrase_min_count,
        phrase_threshold: config.preprocess.phrase_threshold,
        min_doc_freq: config.preprocess.min_doc_freq,
    })
}

fn stage_preprocess(config: &PipelineConfig) -> Result<String> {
    let corpus = load_corpus_artifact(config)?;
    let documents: Vec<(String, String)> = corpus
        .analyzed_records()
        .map(|r| (r.id.clone(), r.abstract_text.clone()))
        .collect();
    if documents.is_empty() {
        return Err(Error::EmptyCorpus(
            "no records with non-empty abstracts".into(),
        ));
    }
    let options = preprocess_options(config)?;
    let prepared = preprocess::prepare_documents(&documents, &options)?;

    let mut w = SectionWriter::new("preprocess artifact");
    prepared.vocabulary.write_section(&mut w);
    prepared.phrases.write_section(&mut w);
    w.section("docs");
    for doc in &prepared.docs {
        let ids = doc
            .tokens
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        w.row([doc.doc_id.as_str(), ids.as_str()]);
    }
    Ok(w.finish())
}

fn load_preprocess_artifact(
    config: &PipelineConfig,
) -> Result<(Vocabulary, Vec<TokenDoc>, PhraseModel)> {
    let path = config.output_dir.join(Stage::Preprocess.artifact());
    let origin = path.display().to_string();
    let text = textio::read_file(&path)?;
    let sections = textio::parse_sections(&text, &origin)?;
    let vocabulary = Vocabulary::from_section(
        textio::find_section(&sections, "vocabulary", &origin)?,
        &origin,
    )?;
    let phrases = PhraseModel::from_sections(&sections, &origin)?;
    let docs_section = textio::find_section(&sections, "docs", &origin)?;
    let mut docs = Vec::with_capacity(docs_section.rows.len());
    for (line, fields) in &docs_section.rows {
        if fields.is_empty() || fields.len() > 2 {
            return Err(Error::format(&origin, *line, "expected doc_id\\tids"));
        }
        let tokens = if fields.len() == 2 {
            fields[1]
                .split_whitespace()
                .map(|t| {
                    let id = textio::parse_usize(t, &origin, *line)? as u32;
                    if id as usize >= vocabulary.len() {
                        return Err(Error::format(&origin, *line, "token id out of range"));
                    }
                    Ok(id)
                })
                .collect::<Result<Vec<u32>>>()?
        } else {
            Vec::new()
        };
        docs.push(TokenDoc {
            doc_id: fields[0].clone(),
            tokens,
        });
    }
    Ok((vocabulary, docs, phrases))
}

fn stage_embed(config: &PipelineConfig) -> Result<String> {
    let (vocabulary, docs, _) = load_preprocess_artifact(config)?;
    let method = config.embedding.method;

    let mut w = SectionWriter::new("embedding artifact");
    w.section("embedding_params").param("method", method.as_str());

    match method {
        EmbeddingMethod::Tfidf => {
            let model = fit_tfidf(&vocabulary, &docs)?;
            let vectors: Vec<(String, SparseDocVector)> = docs
                .iter()
                .map(|d| Ok((d.doc_id.clone(), model.vector(d)?)))
                .collect::<Result<_>>()?;
            model.write_section(&mut w);
            write_sparse_vectors(&mut w, "doc_vectors_sparse", &vectors);
        }
        EmbeddingMethod::Pubg => {
            let x = build_cooccurrence(
                &docs,
                vocabulary.len(),
                config.embedding.pubg.window,
                config.embedding.pubg.weighting,
            )?;
            let params = GloveParams {
                dim: config.embedding.dim,
                epochs: config.embedding.pubg.epochs,
                learning_rate: config.embedding.pubg.learning_rate,
                x_max: config.embedding.pubg.x_max,
                alpha: config.embedding.pubg.alpha,
                seed: crate::derive_seed(config.seed, "embed-pubg"),
            };
            let model = train_pubg(&x, params)?;
            write_dense_sections(&mut w, &vocabulary, &docs, &model.word_vectors())?;
        }
        EmbeddingMethod::Pubw => {
            let params = CbowParams {
                dim: config.embedding.dim,
                window: config.embedding.pubw.window,
                epochs: config.embedding.pubw.epochs,
                learning_rate: config.embedding.pubw.learning_rate,
                negatives: config.embedding.pubw.negatives,
                mode: config.embedding.pubw.mode,
                seed: crate::derive_seed(config.seed, "embed-pubw"),
            };
            let model = train_pubw(&docs, vocabulary.len(), params)?;
            write_dense_sections(&mut w, &vocabulary, &docs, &model.word_vectors())?;
        }
    }
    Ok(w.finish())
}

fn write_dense_sections(
    w: &mut SectionWriter,
    vocabulary: &Vocabulary,
    docs: &[TokenDoc],
    vectors: &WordVectors,
) -> Result<()> {
    let labels: Vec<String> = vocabulary.iter().map(|(_, t)| t.to_string()).collect();
    let word_text = vectors.to_text(&labels)?;
    w.section("word_vectors");
    for line in word_text.lines() {
        w.row([line]);
    }
    // Doc ids are opaque (they may contain spaces), so this section keeps
    // the id in its own tab field with space-joined components after it.
    w.section("doc_vectors");
    w.row([format!("{} {}", docs.len(), vectors.dim())]);
    for doc in docs {
        let embedding = embed_document(vectors, doc);
        let components = embedding
            .vector
            .iter()
            .map(|v| textio::fmt_f64(*v))
            .collect::<Vec<_>>()
            .join(" ");
        w.row([doc.doc_id.as_str(), components.as_str()]);
    }
    Ok(())
}

fn read_doc_vectors(
    section: &textio::Section,
    origin: &str,
) -> Result<Vec<(String, Vec<f64>)>> {
    let mut rows = section.rows.iter();
    let (header_line, header) = rows
        .next()
        .ok_or_else(|| Error::format(origin, 0, "empty doc_vectors section"))?;
    let mut parts = header
        .first()
        .map(|h| h.split_whitespace())
        .ok_or_else(|| Error::format(origin, *header_line, "missing `N d` header"))?;
    let count: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::format(origin, *header_line, "bad doc_vectors header"))?;
    let dim: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::format(origin, *header_line, "bad doc_vectors header"))?;

    let mut out = Vec::with_capacity(count.min(1024));
    for (line, fields) in rows {
        if fields.len() != 2 {
            return Err(Error::format(origin, *line, "expected doc_id\\tcomponents"));
        }
        let vector: Vec<f64> = fields[1]
            .split_whitespace()
            .map(|f| textio::parse_f64(f, origin, *line))
            .collect::<Result<_>>()?;
        if vector.len() != dim {
            return Err(Error::format(
                origin,
                *line,
                format!("expected {dim} components, got {}", vector.len()),
            ));
        }
        out.push((fields[0].clone(), vector));
    }
    if out.len() != count {
        return Err(Error::format(
            origin,
            0,
            format!("doc_vectors header declared {count} rows, found {}", out.len()),
        ));
    }
    Ok(out)
}

/// Doc vectors of the embed stage, densified when the method is sparse.
pub struct EmbeddingArtifact {
    pub method: String,
    pub doc_vectors: Vec<(String, Vec<f64>)>,
    pub word_vectors: Option<(Vec<String>, WordVectors)>,
    pub tfidf: Option<TfidfModel>,
}

fn load_embedding_artifact(config: &PipelineConfig) -> Result<EmbeddingArtifact> {
    let path = config.output_dir.join(Stage::Embed.artifact());
    let origin = path.display().to_string();
    let text = textio::read_file(&path)?;
    let sections = textio::parse_sections(&text, &origin)?;
    let params = textio::section_params(
        textio::find_section(&sections, "embedding_params", &origin)?,
        &origin,
    )?;
    let method: String = textio::require_param(&params, "method", &origin)?;

    if method == "tfidf" {
        let model = TfidfModel::from_sections(&sections, &origin)?;
        let sparse = read_sparse_vectors(
            textio::find_section(&sections, "doc_vectors_sparse", &origin)?,
            model.vocab_size(),
            &origin,
        )?;
        let doc_vectors = sparse
            .into_iter()
            .map(|(id, v)| (id, v.to_dense()))
            .collect();
        return Ok(EmbeddingArtifact {
            method,
            doc_vectors,
            word_vectors: None,
            tfidf: Some(model),
        });
    }

    let join_rows = |section: &textio::Section| {
        section
            .rows
            .iter()
            .map(|(_, fields)| fields.join("\t"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let word_text = join_rows(textio::find_section(&sections, "word_vectors", &origin)?);
    let word_vectors = WordVectors::from_text(&word_text, &origin)?;
    let doc_vectors =
        read_doc_vectors(textio::find_section(&sections, "doc_vectors", &origin)?, &origin)?;
    Ok(EmbeddingArtifact {
        method,
        doc_vectors,
        word_vectors: Some(word_vectors),
        tfidf: None,
    })
}

fn stage_cluster(config: &PipelineConfig) -> Result<String> {
    let artifact = load_embedding_artifact(config)?;
    let model = fit_kmeans(
        &artifact.doc_vectors,
        config.cluster.k,
        config.cluster.restarts,
        config.cluster.max_iter,
        config.cluster.tol,
        crate::derive_seed(config.seed, "cluster"),
    )?;
    let mut w = SectionWriter::new("cluster artifact");
    model.write_section(&mut w);
    if let Some((lo, hi)) = config.cluster.elbow_range {
        let k_values: Vec<usize> = (lo..=hi).collect();
        let report = elbow_scan(
            &artifact.doc_vectors,
            &k_values,
            config.cluster.restarts,
            crate::derive_seed(config.seed, "elbow"),
        )?;
        w.section("elbow")
            .param("knee", report.knee)
            .param("degenerate", report.degenerate);
        w.section("elbow_curve");
        for (k, inertia) in report.k_values.iter().zip(&report.inertias) {
            w.row([k.to_string(), textio::fmt_f64(*inertia)]);
        }
    }
    Ok(w.finish())
}

fn load_kmeans_artifact(config: &PipelineConfig) -> Result<KMeansModel> {
    let path = config.output_dir.join(Stage::Cluster.artifact());
    let origin = path.display().to_string();
    KMeansModel::from_text(&textio::read_file(&path)?, &origin)
}

fn stage_topics(config: &PipelineConfig) -> Result<String> {
    let (vocabulary, docs, _) = load_preprocess_artifact(config)?;
    let kmeans = load_kmeans_artifact(config)?;

    let mut w = SectionWriter::new("topics artifact");
    w.section("topics_params")
        .param("per_cluster", config.topics.per_cluster)
        .param("n_top", config.topics.n_top)
        .param("eta", textio::fmt_f64(config.topics.eta))
        .param("iterations", config.topics.iterations)
        .param("burn_in", config.topics.burn_in);
    w.section("top_words");

    for cluster in 0..kmeans.k {
        let members: Vec<TokenDoc> = docs
            .iter()
            .filter(|d| kmeans.assignments.get(&d.doc_id) == Some(&cluster))
            .cloned()
            .collect();
        if members.iter().all(|d| d.tokens.is_empty()) {
            continue; // nothing to model in this cluster
        }
        let params = LdaParams {
            k_topics: config.topics.per_cluster,
            alpha: config.topics.alpha,
            eta: config.topics.eta,
            iterations: config.topics.iterations,
            burn_in: config.topics.burn_in,
            seed: crate::derive_seed(config.seed, &format!("lda-{cluster}")),
        };
        let model = fit_lda(&members, vocabulary.len(), params)?;
        let n_top = config.topics.n_top.min(vocabulary.len());
        for topic in 0..config.topics.per_cluster {
            let mut summary = model.top_words(&vocabulary, topic, n_top)?;
            summary.cluster = cluster;
            for (rank, (token, prob)) in summary.top_words.iter().enumerate() {
                w.row([
                    cluster.to_string(),
                    topic.to_string(),
                    rank.to_string(),
                    token.clone(),
                    textio::fmt_f64(*prob),
                ]);
            }
        }
    }
    Ok(w.finish())
}

fn load_topics_artifact(config: &PipelineConfig) -> Result<Vec<TopicSummary>> {
    let path = config.output_dir.join(Stage::Topics.artifact());
    let origin = path.display().to_string();
    let text = textio::read_file(&path)?;
    let sections = textio::parse_sections(&text, &origin)?;
    let section = textio::find_section(&sections, "top_words", &origin)?;

    let mut summaries: Vec<TopicSummary> = Vec::new();
    for (line, fields) in &section.rows {
        if fields.len() != 5 {
            return Err(Error::format(
                &origin,
                *line,
                "expected cluster\\ttopic\\trank\\ttoken\\tprob",
            ));
        }
        let cluster = textio::parse_usize(&fields[0], &origin, *line)?;
        let topic = textio::parse_usize(&fields[1], &origin, *line)?;
        let rank = textio::parse_usize(&fields[2], &origin, *line)?;
        let prob = textio::parse_f64(&fields[4], &origin, *line)?;
        let current = match summaries.last_mut() {
            Some(s) if s.cluster == cluster && s.topic == topic => s,
            _ => {
                summaries.push(TopicSummary {
                    cluster,
                    topic,
                    top_words: Vec::new(),
                });
                summaries.last_mut().unwrap()
            }
        };
        if rank != current.top_words.len() {
            return Err(Error::format(&origin, *line, "ranks must be contiguous"));
        }
        current.top_words.push((fields[3].clone(), prob));
    }
    Ok(summaries)
}

fn stage_evaluate(config: &PipelineConfig) -> Result<String> {
    let (vocabulary, docs, _) = load_preprocess_artifact(config)?;
    let topics = load_topics_artifact(config)?;
    // D(·) counts come from the full corpus documents, not per cluster.
    let stats = DocStats::build(&docs);
    let report = umass_coherence(&topics, &vocabulary, &stats)?;

    let mut w = SectionWriter::new("evaluation artifact");
    w.section("eval_params")
        .param("embedding", config.embedding.method.as_str())
        .param("n_topics_scored", report.per_topic.len());
    w.section("coherence");
    for (&(cluster, topic), &score) in &report.per_topic {
        w.row([
            cluster.to_string(),
            topic.to_string(),
            textio::fmt_f64(score),
        ]);
    }
    w.section("coherence_cluster");
    for (&cluster, &mean) in &report.per_cluster {
        w.row([cluster.to_string(), textio::fmt_f64(mean)]);
    }
    w.section("coherence_overall");
    w.row([textio::fmt_f64(report.overall)]);
    Ok(w.finish())
}

fn stage_tsne(config: &PipelineConfig) -> Result<String> {
    let artifact = load_embedding_artifact(config)?;
    let kmeans = load_kmeans_artifact(config)?;
    let corpus = load_corpus_artifact(config)?;

    let tsne_config = TsneConfig {
        perplexity: config.tsne.perplexity,
        early_exaggeration: config.tsne.early_exaggeration,
        iterations: config.tsne.iterations,
        learning_rate: config.tsne.learning_rate,
        seed: crate::derive_seed(config.seed, "tsne"),
        ..TsneConfig::default()
    };
    let embedding = fit_tsne(&artifact.doc_vectors, &tsne_config)?;

    let years: std::collections::BTreeMap<&str, i32> = corpus
        .records
        .iter()
        .map(|r| (r.id.as_str(), r.year))
        .collect();

    let mut w = SectionWriter::new("tsne artifact: doc_id\tx\ty\tcluster\tyear");
    w.section("tsne_params")
        .param("perplexity", textio::fmt_f64(config.tsne.perplexity))
        .param(
            "effective_perplexity",
            textio::fmt_f64(embedding.clamped_perplexity.unwrap_or(config.tsne.perplexity)),
        )
        .param("early_exaggeration", textio::fmt_f64(config.tsne.early_exaggeration))
        .param("iterations", config.tsne.iterations)
        .param("final_kl", textio::fmt_f64(*embedding.kl_trace.last().unwrap_or(&0.0)));
    w.section("coords");
    for (doc_id, [x, y]) in &embedding.coords {
        let cluster = kmeans
            .assignments
            .get(doc_id)
            .map(|c| c.to_string())
            .unwrap_or_else(|| "-".to_string());
        let year = years
            .get(doc_id.as_str())
            .map(|y| y.to_string())
            .unwrap_or_else(|| "-".to_string());
        w.row([
            doc_id.as_str(),
            &textio::fmt_f64(*x),
            &textio::fmt_f64(*y),
            &cluster,
            &year,
        ]);
    }
    Ok(w.finish())
}

fn stage_trends(config: &PipelineConfig) -> Result<String> {
    let corpus = load_corpus_artifact(config)?;
    let kmeans = load_kmeans_artifact(config)?;
    let series = build_trend_series(&corpus, &kmeans)?;
    let mut w = SectionWriter::new("trends artifact: year\tcluster\tcount\tfraction");
    series.write_section(&mut w);
    Ok(w.finish())
}

// ---------------------------------------------------------------------------
// compare-embeddings
// ---------------------------------------------------------------------------

/// Coherence table and pairwise MI scores across the three embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    /// (embedding, overall coherence)
    pub coherence_overall: Vec<(String, f64)>,
    /// (pair label, mi, nmi, ami)
    pub mi_pairs: Vec<(String, f64, f64, f64)>,
}

/// Runs the full analysis once per embedding (tfidf, pubg, pubw) in
/// sibling output directories, then reports Table-style coherence and
/// MI/NMI/AMI comparisons. Returns the report; the rendered artifact is
/// written as `compare.txt` in the configured output directory.
pub fn run_compare_embeddings(config: &PipelineConfig) -> Result<CompareReport> {
    let methods = [
        EmbeddingMethod::Tfidf,
        EmbeddingMethod::Pubg,
        EmbeddingMethod::Pubw,
    ];
    let stages = [
        Stage::Ingest,
        Stage::Preprocess,
        Stage::Embed,
        Stage::Cluster,
        Stage::Topics,
        Stage::Evaluate,
    ];

    let mut sub_configs = Vec::new();
    for method in methods {
        let mut sub = config.clone();
        sub.embedding.method = method;
        sub.output_dir = config
            .output_dir
            .join(format!("compare-{}", method.as_str()));
        run_pipeline(&sub, &stages)?;
        sub_configs.push(sub);
    }

    let corpus_label = config
        .corpus
        .venue_label
        .clone()
        .unwrap_or_else(|| "corpus".to_string());

    let mut coherence_overall = Vec::new();
    let mut per_topic_rows: Vec<(String, usize, usize, f64)> = Vec::new();
    for sub in &sub_configs {
        let path = sub.output_dir.join(Stage::Evaluate.artifact());
        let origin = path.display().to_string();
        let sections = textio::parse_sections(&textio::read_file(&path)?, &origin)?;
        let overall_section = textio::find_section(&sections, "coherence_overall", &origin)?;
        let (line, fields) = overall_section
            .rows
            .first()
            .ok_or_else(|| Error::format(&origin, 0, "missing overall coherence"))?;
        let overall = textio::parse_f64(&fields[0], &origin, *line)?;
        coherence_overall.push((sub.embedding.method.as_str().to_string(), overall));
        for (line, fields) in &textio::find_section(&sections, "coherence", &origin)?.rows {
            per_topic_rows.push((
                sub.embedding.method.as_str().to_string(),
                textio::parse_usize(&fields[0], &origin, *line)?,
                textio::parse_usize(&fields[1], &origin, *line)?,
                textio::parse_f64(&fields[2], &origin, *line)?,
            ));
        }
    }

    // Pairwise MI over cluster labelings aligned by doc id.
    let mut labelings = Vec::new();
    for sub in &sub_configs {
        labelings.push(load_kmeans_artifact(sub)?.assignments);
    }
    let pairs = [(0usize, 1usize), (1, 2), (2, 0)];
    let mut mi_pairs = Vec::new();
    for (a, b) in pairs {
        let ids: Vec<&String> = labelings[a]
            .keys()
            .filter(|id| labelings[b].contains_key(*id))
            .collect();
        let u: Vec<usize> = ids.iter().map(|id| labelings[a][*id]).collect();
        let v: Vec<usize> = ids.iter().map(|id| labelings[b][*id]).collect();
        let report = mi_report(&u, &v)?;
        let label = format!(
            "{}-{}",
            methods[a].as_str(),
            methods[b].as_str()
        );
        mi_pairs.push((label, report.mi, report.nmi, report.ami));
    }

    let mut w = SectionWriter::new(
        "embedding comparison: coherence by embedding and pairwise MI scores",
    );
    w.section("coherence");
    for (embedding, cluster, topic, score) in &per_topic_rows {
        w.row([
            corpus_label.as_str(),
            embedding.as_str(),
            &cluster.to_string(),
            &topic.to_string(),
            &textio::fmt_f64(*score),
        ]);
    }
    w.section("coherence_overall");
    for (embedding, overall) in &coherence_overall {
        w.row([
            corpus_label.as_str(),
            embedding.as_str(),
            &textio::fmt_f64(*overall),
        ]);
    }
    w.section("mi");
    for (pair, mi, nmi, ami) in &mi_pairs {
        w.row([
            corpus_label.as_str(),
            pair.as_str(),
            &textio::fmt_f64(*mi),
            &textio::fmt_f64(*nmi),
            &textio::fmt_f64(*ami),
        ]);
    }
    std::fs::create_dir_all(&config.output_dir)?;
    textio::write_file(&config.output_dir.join("compare.txt"), &w.finish())?;

    Ok(CompareReport {
        coherence_overall,
        mi_pairs,
    })
}

/// Convenience: path of a stage artifact under the configured output dir.
pub fn artifact_path(config: &PipelineConfig, stage: Stage) -> PathBuf {
    config.output_dir.join(stage.artifact())
}
