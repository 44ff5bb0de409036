//! Year-by-cluster publication counts and per-year fractions for trend
//! plotting.

use std::collections::BTreeMap;

use crate::cluster::KMeansModel;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::textio::{self, SectionWriter};

/// Per-cluster time series over the corpus year range; gap years are
/// present with zero counts. Fractions normalize by that year's total
/// (assigned publications), so each populated year's fractions sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendSeries {
    pub years: Vec<i32>,
    pub per_cluster_counts: BTreeMap<usize, Vec<u64>>,
    pub per_cluster_fractions: BTreeMap<usize, Vec<f64>>,
}

/// Tallies assigned documents per (cluster, year). Every assignment must
/// reference a corpus record.
pub fn build_trend_series(corpus: &Corpus, model: &KMeansModel) -> Result<TrendSeries> {
    let years: Vec<i32> = (corpus.year_range.0..=corpus.year_range.1).collect();
    let year_index: BTreeMap<i32, usize> =
        years.iter().enumerate().map(|(i, &y)| (y, i)).collect();

    let record_year: BTreeMap<&str, i32> = corpus
        .records
        .iter()
        .map(|r| (r.id.as_str(), r.year))
        .collect();

    let mut counts: BTreeMap<usize, Vec<u64>> = (0..model.k)
        .map(|c| (c, vec![0u64; years.len()]))
        .collect();
    let mut year_totals = vec![0u64; years.len()];
    for (doc_id, &cluster) in &model.assignments {
        let year = record_year.get(doc_id.as_str()).ok_or_else(|| {
            Error::Internal(format!(
                "assignment references unknown doc_id {doc_id:?}"
            ))
        })?;
        let idx = year_index[year];
        counts.get_mut(&cluster).expect("cluster in range")[idx] += 1;
        year_totals[idx] += 1;
    }

    let fractions = counts
        .iter()
        .map(|(&cluster, series)| {
            let row = series
                .iter()
                .zip(&year_totals)
                .map(|(&c, &total)| {
                    if total == 0 {
                        0.0
                    } else {
                        c as f64 / total as f64
                    }
                })
                .collect();
            (cluster, row)
        })
        .collect();

    Ok(TrendSeries {
        years,
        per_cluster_counts: counts,
        per_cluster_fractions: fractions,
    })
}

impl TrendSeries {
    /// Delimited export: (year, cluster, count, fraction) rows.
    pub fn write_section(&self, w: &mut SectionWriter) {
        w.section("trend_series");
        for (year_idx, year) in self.years.iter().enumerate() {
            for (cluster, counts) in &self.per_cluster_counts {
                w.row([
                    year.to_string(),
                    cluster.to_string(),
                    counts[year_idx].to_string(),
                    textio::fmt_f64(self.per_cluster_fractions[cluster][year_idx]),
                ]);
            }
        }
    }

    pub fn to_text(&self) -> String {
        let mut w = SectionWriter::new("trend series: year\tcluster\tcount\tfraction");
        self.write_section(&mut w);
        w.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::PublicationRecord;
    use std::collections::BTreeMap as Map;

    fn record(id: &str, year: i32) -> PublicationRecord {
        PublicationRecord {
            id: id.into(),
            venue: "V".into(),
            year,
            title: String::new(),
            abstract_text: "text".into(),
            authors: vec![],
            keywords: vec![],
            doi: None,
        }
    }

    fn corpus(years: &[(&str, i32)]) -> Corpus {
        let records: Vec<PublicationRecord> =
            years.iter().map(|(id, y)| record(id, *y)).collect();
        let min = records.iter().map(|r| r.year).min().unwrap();
        let max = records.iter().map(|r| r.year).max().unwrap();
        Corpus {
            records,
            venue_label: "V".into(),
            year_range: (min, max),
        }
    }

    fn model(k: usize, assignments: &[(&str, usize)]) -> KMeansModel {
        KMeansModel {
            k,
            dim: 1,
            centroids: vec![vec![0.0]; k],
            assignments: assignments
                .iter()
                .map(|(id, c)| (id.to_string(), *c))
                .collect::<Map<_, _>>(),
            inertia: 0.0,
            iterations_run: 0,
            seed: 0,
            inertia_trace: vec![],
        }
    }

    #[test]
    fn hand_tally_fixture() {
        let corpus = corpus(&[("a", 2007), ("b", 2007), ("c", 2008), ("d", 2008)]);
        let model = model(2, &[("a", 0), ("b", 1), ("c", 0), ("d", 0)]);
        let series = build_trend_series(&corpus, &model).unwrap();
        assert_eq!(series.years, vec![2007, 2008]);
        assert_eq!(series.per_cluster_counts[&0], vec![1, 2]);
        assert_eq!(series.per_cluster_counts[&1], vec![1, 0]);
    }

    #[test]
    fn single_cluster_fractions_are_one_for_populated_years() {
        let corpus = corpus(&[("a", 2010), ("b", 2012)]);
        let model = model(1, &[("a", 0), ("b", 0)]);
        let series = build_trend_series(&corpus, &model).unwrap();
        assert_eq!(series.per_cluster_fractions[&0], vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn gap_years_are_present_with_zero_counts() {
        let corpus = corpus(&[("a", 2010), ("b", 2013)]);
        let model = model(1, &[("a", 0), ("b", 0)]);
        let series = build_trend_series(&corpus, &model).unwrap();
        assert_eq!(series.years, vec![2010, 2011, 2012, 2013]);
        assert_eq!(series.per_cluster_counts[&0], vec![1, 0, 0, 1]);
    }

    #[test]
    fn counts_conserve_per_year_totals() {
        let corpus = corpus(&[("a", 2007), ("b", 2007), ("c", 2008)]);
        let model = model(3, &[("a", 2), ("b", 0), ("c", 1)]);
        let series = build_trend_series(&corpus, &model).unwrap();
        for (idx, &year) in series.years.iter().enumerate() {
            let total: u64 = series
                .per_cluster_counts
                .values()
                .map(|counts| counts[idx])
                .sum();
            let expected = corpus.records.iter().filter(|r| r.year == year).count() as u64;
            assert_eq!(total, expected);
            if total > 0 {
                let f: f64 = series
                    .per_cluster_fractions
                    .values()
                    .map(|fr| fr[idx])
                    .sum();
                assert!((f - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn output_is_independent_of_record_order() {
        let mut c1 = corpus(&[("a", 2007), ("b", 2008), ("c", 2007)]);
        let assignments = [("a", 0), ("b", 1), ("c", 0)];
        let m = model(2, &assignments);
        let s1 = build_trend_series(&c1, &m).unwrap();
        c1.records.reverse();
        let s2 = build_trend_series(&c1, &m).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn unknown_doc_id_is_a_consistency_error() {
        let corpus = corpus(&[("a", 2007)]);
        let model = model(1, &[("ghost", 0)]);
        assert!(matches!(
            build_trend_series(&corpus, &model),
            Err(Error::Internal(_))
        ));
    }
}
