//! Integration tests for the staged pipeline: dependency checking,
//! manifests, stage-at-a-time runs, and the embedding comparison report.

use std::path::{Path, PathBuf};

use pubtrends::config::PipelineConfig;
use pubtrends::corpus::write_corpus;
use pubtrends::error::Error;
use pubtrends::pipeline::{
    run_compare_embeddings, run_pipeline, RunManifest, Stage, MANIFEST_FILE,
};
use pubtrends::synth::{generate, SynthConfig};
use pubtrends::textio;

struct Fixture {
    _dir: tempfile::TempDir,
    corpus_path: PathBuf,
    base: PathBuf,
}

fn fixture(n_docs: usize, seed: u64) -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let corpus_path = dir.path().join("corpus.csv");
    let synth = generate(&SynthConfig {
        n_docs,
        n_topics: 3,
        seed,
        ..SynthConfig::default()
    });
    write_corpus(&synth.corpus, &corpus_path).unwrap();
    let base = dir.path().to_path_buf();
    Fixture {
        _dir: dir,
        corpus_path,
        base,
    }
}

fn small_config(fixture: &Fixture, out: &Path, cluster_extra: &str) -> PipelineConfig {
    let toml = format!(
        "seed = 11\noutput_dir = {out:?}\n\
         [corpus]\npath = {:?}\n[corpus.columns]\nid = \"id\"\n\
         [embedding]\nmethod = \"pubw\"\ndim = 16\n[embedding.pubw]\nepochs = 2\n\
         [cluster]\nk = 3\nrestarts = 3\n{cluster_extra}\
         [topics]\nper_cluster = 3\niterations = 50\nburn_in = 20\n\
         [tsne]\niterations = 80\n",
        fixture.corpus_path
    );
    PipelineConfig::from_toml_str(&toml).unwrap()
}

#[test]
fn stage_names_parse_back_to_stages() {
    for stage in Stage::ALL {
        assert_eq!(stage.name().parse::<Stage>().unwrap(), stage);
    }
    assert!("bogus".parse::<Stage>().is_err());
}

#[test]
fn stage_without_upstream_is_a_dependency_error() {
    let fx = fixture(60, 1);
    let out = fx.base.join("out");
    let config = small_config(&fx, &out, "");
    let err = run_pipeline(&config, &[Stage::Evaluate]).unwrap_err();
    match err {
        Error::Dependency { stage, upstream, .. } => {
            assert_eq!(stage, "evaluate");
            assert_eq!(upstream, "topics");
        }
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn stage_at_a_time_reproduces_the_full_run() {
    let fx = fixture(80, 2);
    let out_all = fx.base.join("all");
    let config_all = small_config(&fx, &out_all, "");
    let manifest_all = run_pipeline(&config_all, &Stage::ALL).unwrap();

    let out_steps = fx.base.join("steps");
    let config_steps = small_config(&fx, &out_steps, "");
    for stage in Stage::ALL {
        run_pipeline(&config_steps, &[stage]).unwrap();
    }
    for entry in &manifest_all.artifacts {
        let a = std::fs::read(out_all.join(&entry.file)).unwrap();
        let b = std::fs::read(out_steps.join(&entry.file)).unwrap();
        assert_eq!(a, b, "artifact {} differs stage-at-a-time", entry.file);
    }
}

#[test]
fn failing_stage_leaves_a_partial_manifest_and_names_itself() {
    let fx = fixture(60, 3);
    let out = fx.base.join("out");
    // burn_in ≥ iterations passes config validation only if we break it
    // after parsing; instead make the topics stage fail via k > n.
    let config = small_config(&fx, &out, "");
    run_pipeline(&config, &[Stage::Ingest, Stage::Preprocess, Stage::Embed]).unwrap();

    // Corrupt the kmeans artifact so `topics` fails to parse it.
    std::fs::write(out.join(Stage::Cluster.artifact()), "[kmeans_params]\nk\tbogus\n").unwrap();
    let err = run_pipeline(&config, &[Stage::Topics]).unwrap_err();
    match &err {
        Error::Stage { stage, .. } => assert_eq!(stage, "topics"),
        other => panic!("unexpected error {other:?}"),
    }
    // The partial manifest exists and lists no topics artifact.
    let manifest =
        RunManifest::from_text(&std::fs::read_to_string(out.join(MANIFEST_FILE)).unwrap(), "m")
            .unwrap();
    assert!(manifest.artifacts.iter().all(|a| a.stage != "topics"));
}

#[test]
fn manifest_verify_catches_tampering() {
    let fx = fixture(60, 4);
    let out = fx.base.join("out");
    let config = small_config(&fx, &out, "");
    let manifest = run_pipeline(&config, &[Stage::Ingest, Stage::Preprocess]).unwrap();
    manifest.verify(&out).unwrap();
    std::fs::write(out.join("preprocess.txt"), "tampered").unwrap();
    assert!(matches!(manifest.verify(&out), Err(Error::Internal(_))));
}

#[test]
fn elbow_section_is_written_when_configured() {
    let fx = fixture(60, 5);
    let out = fx.base.join("out");
    let config = small_config(&fx, &out, "elbow_range = [1, 6]\n");
    assert_eq!(config.cluster.elbow_range, Some((1, 6)));
    run_pipeline(
        &config,
        &[Stage::Ingest, Stage::Preprocess, Stage::Embed, Stage::Cluster],
    )
    .unwrap();
    let text = std::fs::read_to_string(out.join("kmeans.txt")).unwrap();
    let sections = textio::parse_sections(&text, "kmeans").unwrap();
    assert!(textio::find_section(&sections, "elbow", "kmeans").is_ok());
    let curve = textio::find_section(&sections, "elbow_curve", "kmeans").unwrap();
    assert_eq!(curve.rows.len(), 6);
}

#[test]
fn compare_embeddings_reports_three_methods_and_three_pairs() {
    let fx = fixture(90, 6);
    let out = fx.base.join("out");
    let config = small_config(&fx, &out, "");
    let report = run_compare_embeddings(&config).unwrap();

    let methods: Vec<&str> = report
        .coherence_overall
        .iter()
        .map(|(m, _)| m.as_str())
        .collect();
    assert_eq!(methods, vec!["tfidf", "pubg", "pubw"]);
    assert!(report.coherence_overall.iter().all(|(_, c)| c.is_finite()));

    let pairs: Vec<&str> = report.mi_pairs.iter().map(|(p, ..)| p.as_str()).collect();
    assert_eq!(pairs, vec!["tfidf-pubg", "pubg-pubw", "pubw-tfidf"]);
    for (pair, mi, nmi, ami) in &report.mi_pairs {
        assert!(*mi >= -1e-12, "{pair}: MI {mi}");
        assert!((-1e-9..=1.0 + 1e-9).contains(nmi), "{pair}: NMI {nmi}");
        assert!(*ami <= 1.0 + 1e-9, "{pair}: AMI {ami}");
    }

    // The rendered report parses and carries all three sections.
    let text = std::fs::read_to_string(out.join("compare.txt")).unwrap();
    let sections = textio::parse_sections(&text, "compare").unwrap();
    for name in ["coherence", "coherence_overall", "mi"] {
        assert!(textio::find_section(&sections, name, "compare").is_ok());
    }
    assert_eq!(
        textio::find_section(&sections, "coherence_overall", "compare")
            .unwrap()
            .rows
            .len(),
        3
    );
}

#[test]
fn rerunning_one_stage_with_same_inputs_reproduces_its_hash() {
    let fx = fixture(70, 7);
    let out = fx.base.join("out");
    let config = small_config(&fx, &out, "");
    let first = run_pipeline(&config, &Stage::ALL).unwrap();
    let cluster_hash = first
        .artifacts
        .iter()
        .find(|a| a.stage == "cluster")
        .unwrap()
        .sha256
        .clone();
    let again = run_pipeline(&config, &[Stage::Cluster]).unwrap();
    assert_eq!(again.artifacts.len(), 1);
    assert_eq!(again.artifacts[0].sha256, cluster_hash);
}

#[test]
fn tfidf_method_runs_all_eight_stages() {
    let fx = fixture(60, 9);
    let out = fx.base.join("out");
    let toml = format!(
        "seed = 21\noutput_dir = {out:?}\n\
         [corpus]\npath = {:?}\n[corpus.columns]\nid = \"id\"\n\
         [embedding]\nmethod = \"tfidf\"\n\
         [cluster]\nk = 3\nrestarts = 3\n\
         [topics]\nper_cluster = 2\niterations = 40\nburn_in = 10\n\
         [tsne]\niterations = 80\n",
        fx.corpus_path
    );
    let config = PipelineConfig::from_toml_str(&toml).unwrap();
    let manifest = run_pipeline(&config, &Stage::ALL).unwrap();
    assert_eq!(manifest.artifacts.len(), 8);
    // t-SNE ran on densified sparse vectors.
    let text = std::fs::read_to_string(out.join("tsne.txt")).unwrap();
    assert!(text.contains("[coords]"));
}

#[test]
fn doc_ids_with_spaces_survive_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_path = dir.path().join("corpus.csv");
    let mut synth = generate(&SynthConfig {
        n_docs: 40,
        n_topics: 2,
        seed: 12,
        ..SynthConfig::default()
    });
    for (i, record) in synth.corpus.records.iter_mut().enumerate() {
        record.id = format!("Smith et al {i}");
    }
    write_corpus(&synth.corpus, &corpus_path).unwrap();
    let out = dir.path().join("out");
    let toml = format!(
        "seed = 5\noutput_dir = {out:?}\n\
         [corpus]\npath = {corpus_path:?}\n[corpus.columns]\nid = \"id\"\n\
         [embedding]\nmethod = \"pubw\"\ndim = 8\n[embedding.pubw]\nepochs = 1\n\
         [cluster]\nk = 2\nrestarts = 2\n\
         [topics]\nper_cluster = 2\niterations = 30\nburn_in = 10\n\
         [tsne]\niterations = 60\n"
    );
    let config = PipelineConfig::from_toml_str(&toml).unwrap();
    run_pipeline(&config, &Stage::ALL).unwrap();
    let text = std::fs::read_to_string(out.join("tsne.txt")).unwrap();
    assert!(text.contains("Smith et al 0\t"));
}

#[test]
fn thread_count_does_not_change_artifacts() {
    let fx = fixture(50, 13);
    let out1 = fx.base.join("t1");
    let out2 = fx.base.join("t2");
    let make = |out: &Path, threads: usize| {
        let toml = format!(
            "seed = 11\nthreads = {threads}\noutput_dir = {out:?}\n\
             [corpus]\npath = {:?}\n[corpus.columns]\nid = \"id\"\n\
             [embedding]\nmethod = \"pubw\"\ndim = 16\n[embedding.pubw]\nepochs = 2\n\
             [cluster]\nk = 3\nrestarts = 3\n\
             [topics]\nper_cluster = 3\niterations = 50\nburn_in = 20\n\
             [tsne]\niterations = 80\n",
            fx.corpus_path
        );
        PipelineConfig::from_toml_str(&toml).unwrap()
    };
    let m1 = run_pipeline(&make(&out1, 1), &Stage::ALL).unwrap();
    let m2 = run_pipeline(&make(&out2, 4), &Stage::ALL).unwrap();
    // threads only parallelizes order-preserving per-document maps.
    assert_eq!(m1.artifacts, m2.artifacts);
}

#[test]
fn preprocess_options_flow_through_the_config() {
    let dir = tempfile::tempdir().unwrap();
    // Corpus with a junk row (skipped in permissive mode) and text whose
    // function words the POS filter should drop.
    let corpus_path = dir.path().join("corpus.csv");
    std::fs::write(
        &corpus_path,
        "id,venue,year,title,abstract\n\
         a,V,2010,T,the design of the probes studies the designs\n\
         b,V,badyear,T,broken row\n\
         c,V,2011,T,the probes design of designs probes design\n",
    )
    .unwrap();
    let stop_path = dir.path().join("stop.txt");
    std::fs::write(&stop_path, "probe\n").unwrap();

    let out = dir.path().join("out");
    let toml = format!(
        "seed = 2\noutput_dir = {out:?}\n\
         [corpus]\npath = {corpus_path:?}\nmode = \"permissive\"\n\
         [preprocess]\nstopwords_path = {stop_path:?}\npos_filter = true\nmin_doc_freq = 1\n"
    );
    let config = PipelineConfig::from_toml_str(&toml).unwrap();
    run_pipeline(&config, &[Stage::Ingest, Stage::Preprocess]).unwrap();

    let text = std::fs::read_to_string(out.join("preprocess.txt")).unwrap();
    let sections = textio::parse_sections(&text, "pre").unwrap();
    let vocab = textio::find_section(&sections, "vocabulary", "pre").unwrap();
    let tokens: Vec<&str> = vocab.rows.iter().map(|(_, f)| f[0].as_str()).collect();
    // POS filter dropped "the"/"of"; the custom stopword list dropped the
    // lemmatized "probe"; "designs"/"studies" lemmatized into their roots.
    assert!(tokens.contains(&"design"), "{tokens:?}");
    assert!(tokens.contains(&"study"), "{tokens:?}");
    assert!(!tokens.contains(&"the"), "{tokens:?}");
    assert!(!tokens.contains(&"of"), "{tokens:?}");
    assert!(!tokens.contains(&"probe"), "{tokens:?}");
    // The bad year row was skipped, so only two docs remain.
    let docs = textio::find_section(&sections, "docs", "pre").unwrap();
    assert_eq!(docs.rows.len(), 2);
}

#[test]
fn tsne_artifact_rows_carry_cluster_and_year() {
    let fx = fixture(60, 8);
    let out = fx.base.join("out");
    let config = small_config(&fx, &out, "");
    run_pipeline(&config, &Stage::ALL).unwrap();
    let text = std::fs::read_to_string(out.join("tsne.txt")).unwrap();
    let sections = textio::parse_sections(&text, "tsne").unwrap();
    let coords = textio::find_section(&sections, "coords", "tsne").unwrap();
    assert_eq!(coords.rows.len(), 60);
    for (_, fields) in &coords.rows {
        assert_eq!(fields.len(), 5);
        let x: f64 = fields[1].parse().unwrap();
        let y: f64 = fields[2].parse().unwrap();
        assert!(x.is_finite() && y.is_finite());
        let cluster: usize = fields[3].parse().unwrap();
        assert!(cluster < 3);
        let year: i32 = fields[4].parse().unwrap();
        assert!((2000..=2020).contains(&year));
    }
}
