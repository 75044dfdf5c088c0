//! Field benchmarks: quartile summaries per SDS and UDA, ranges of medians
//! and maxima, low-quartile counts, exclusion accounting and percentile
//! lookups.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::indices::ProfileStatus;
use crate::profile::{IndexKind, ResearcherProfile};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("cannot summarize an empty group")]
    EmptyGroup,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum QuantileMethod {
    /// Interpolate between closest ranks at position `p·(n−1)`.
    #[default]
    Linear,
    /// Smallest value with at least `p·n` values at or below it.
    NearestRank,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum VarianceDenominator {
    #[default]
    Sample,
    Population,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Conventions {
    pub quantile: QuantileMethod,
    pub variance: VarianceDenominator,
}

impl Conventions {
    pub fn describe(&self) -> &'static str {
        match (self.quantile, self.variance) {
            (QuantileMethod::Linear, VarianceDenominator::Sample) => {
                "quantiles: linear p(n-1); variance: sample (n-1)"
            }
            (QuantileMethod::Linear, VarianceDenominator::Population) => {
                "quantiles: linear p(n-1); variance: population (n)"
            }
            (QuantileMethod::NearestRank, VarianceDenominator::Sample) => {
                "quantiles: nearest rank; variance: sample (n-1)"
            }
            (QuantileMethod::NearestRank, VarianceDenominator::Population) => {
                "quantiles: nearest rank; variance: population (n)"
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub group_code: String,
    pub n: usize,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    pub variance: f64,
}

fn quantile(sorted: &[f64], p: f64, method: QuantileMethod) -> f64 {
    let n = sorted.len();
    match method {
        QuantileMethod::Linear => {
            let h = p * (n - 1) as f64;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
        QuantileMethod::NearestRank => {
            let rank = (p * n as f64).ceil() as usize;
            sorted[rank.clamp(1, n) - 1]
        }
    }
}

/// Summary statistics with the default conventions (linear quantiles,
/// sample variance).
pub fn summarize(values: &[f64]) -> Result<SummaryRow, StatsError> {
    summarize_with("", values, Conventions::default())
}

pub fn summarize_with(
    code: &str,
    values: &[f64],
    conv: Conventions,
) -> Result<SummaryRow, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyGroup);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let ss: f64 = sorted.iter().map(|x| (x - mean) * (x - mean)).sum();
    let variance = match conv.variance {
        VarianceDenominator::Sample if n > 1 => ss / (n - 1) as f64,
        VarianceDenominator::Sample => 0.0,
        VarianceDenominator::Population => ss / n as f64,
    };
    Ok(SummaryRow {
        group_code: code.to_string(),
        n,
        q1: quantile(&sorted, 0.25, conv.quantile),
        median: quantile(&sorted, 0.5, conv.quantile),
        q3: quantile(&sorted, 0.75, conv.quantile),
        max: sorted[n - 1],
        mean,
        variance,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeRow {
    pub uda_code: String,
    pub median_min: f64,
    pub median_max: f64,
    pub max_min: f64,
    pub max_max: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowCountRow {
    pub uda_code: String,
    pub n_sds: usize,
    pub n_q1_eq_1: usize,
    pub n_median_le_2: usize,
}

fn by_uda(per_sds: &[(String, SummaryRow)]) -> BTreeMap<&str, Vec<&SummaryRow>> {
    let mut m: BTreeMap<&str, Vec<&SummaryRow>> = BTreeMap::new();
    for (uda, row) in per_sds {
        m.entry(uda.as_str()).or_default().push(row);
    }
    m
}

/// Per UDA, the spread of its SDS medians and SDS maxima. Input pairs are
/// `(uda_code, sds_row)`.
pub fn range_rows(per_sds: &[(String, SummaryRow)]) -> Vec<RangeRow> {
    by_uda(per_sds)
        .into_iter()
        .map(|(uda, rows)| {
            let fold = |f: fn(&SummaryRow) -> f64| {
                rows.iter()
                    .map(|r| f(r))
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                        (lo.min(v), hi.max(v))
                    })
            };
            let (median_min, median_max) = fold(|r| r.median);
            let (max_min, max_max) = fold(|r| r.max);
            RangeRow {
                uda_code: uda.to_string(),
                median_min,
                median_max,
                max_min,
                max_max,
            }
        })
        .collect()
}

/// Per UDA, how many SDSs have a first quartile of exactly 1 and how many a
/// median of at most 2.
pub fn low_counts(per_sds: &[(String, SummaryRow)]) -> Vec<LowCountRow> {
    by_uda(per_sds)
        .into_iter()
        .map(|(uda, rows)| LowCountRow {
            uda_code: uda.to_string(),
            n_sds: rows.len(),
            n_q1_eq_1: rows.iter().filter(|r| r.q1 == 1.0).count(),
            n_median_le_2: rows.iter().filter(|r| r.median <= 2.0).count(),
        })
        .collect()
}

/// Midrank percentile of `value` within `group`.
pub fn percentile_of(value: f64, group: &[f64]) -> Result<f64, StatsError> {
    if group.is_empty() {
        return Err(StatsError::EmptyGroup);
    }
    let below = group.iter().filter(|v| **v < value).count() as f64;
    let equal = group.iter().filter(|v| **v == value).count() as f64;
    Ok(100.0 * (below + 0.5 * equal) / group.len() as f64)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExclusionReport {
    pub excluded_total: usize,
    pub zero_publications: usize,
    pub zero_citations: usize,
}

pub fn exclusion_report<I: IntoIterator<Item = ProfileStatus>>(statuses: I) -> ExclusionReport {
    let mut r = ExclusionReport::default();
    for s in statuses {
        match s {
            ProfileStatus::Ok => {}
            ProfileStatus::ZeroPublications => r.zero_publications += 1,
            ProfileStatus::ZeroCitations => r.zero_citations += 1,
        }
    }
    r.excluded_total = r.zero_publications + r.zero_citations;
    r
}

/// Keeps the SDSs where at least half of the researchers published
/// something in the window. Empty groups are dropped.
pub fn activity_filter(
    groups: BTreeMap<String, Vec<ResearcherProfile>>,
) -> BTreeMap<String, Vec<ResearcherProfile>> {
    groups
        .into_iter()
        .filter(|(_, members)| {
            let active = members
                .iter()
                .filter(|p| p.status() != ProfileStatus::ZeroPublications)
                .count();
            !members.is_empty() && 2 * active >= members.len()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Uda,
    Sds,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Uda => "UDA",
            Level::Sds => "SDS",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeveledRow {
    pub level: Level,
    pub row: SummaryRow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexBenchmark {
    pub index: IndexKind,
    pub uda_rows: Vec<SummaryRow>,
    /// `(uda_code, row)` sorted by SDS code.
    pub sds_rows: Vec<(String, SummaryRow)>,
    pub ranges: Vec<RangeRow>,
    pub low_counts: Vec<LowCountRow>,
}

impl IndexBenchmark {
    /// UDA rows first, then SDS rows, each sorted by code.
    pub fn leveled_rows(&self) -> Vec<LeveledRow> {
        self.uda_rows
            .iter()
            .map(|r| LeveledRow {
                level: Level::Uda,
                row: r.clone(),
            })
            .chain(self.sds_rows.iter().map(|(_, r)| LeveledRow {
                level: Level::Sds,
                row: r.clone(),
            }))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRun {
    pub retained_sds: Vec<String>,
    pub dropped_sds: Vec<String>,
    /// Researchers in retained SDSs.
    pub population: usize,
    pub exclusion: ExclusionReport,
    pub conventions: Conventions,
    pub indexes: Vec<IndexBenchmark>,
}

fn summarize_groups(groups: BTreeMap<&str, Vec<f64>>, conv: Conventions) -> Vec<SummaryRow> {
    let keyed: Vec<(&str, Vec<f64>)> = groups.into_iter().filter(|(_, v)| !v.is_empty()).collect();
    keyed
        .par_iter()
        .map(|(code, values)| summarize_with(code, values, conv).expect("nonempty group"))
        .collect()
}

/// Full benchmark: activity filter over SDSs, null-index exclusion, then
/// summaries per UDA and SDS for each selected index.
pub fn benchmark(
    profiles: &[ResearcherProfile],
    selected: &[IndexKind],
    conv: Conventions,
) -> BenchmarkRun {
    let mut groups: BTreeMap<String, Vec<ResearcherProfile>> = BTreeMap::new();
    for p in profiles {
        groups.entry(p.sds.clone()).or_default().push(p.clone());
    }
    let all_sds: Vec<String> = groups.keys().cloned().collect();
    let retained = activity_filter(groups);
    let dropped_sds = all_sds
        .into_iter()
        .filter(|s| !retained.contains_key(s))
        .collect();
    let members: Vec<&ResearcherProfile> = retained.values().flatten().collect();
    let exclusion = exclusion_report(members.iter().map(|p| p.status()));

    let indexes = selected
        .iter()
        .map(|&kind| {
            let mut per_sds: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
            let mut per_uda: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
            let mut uda_of: BTreeMap<&str, &str> = BTreeMap::new();
            for p in members.iter().filter(|p| !p.status().is_null()) {
                let Some(v) = p.value(kind) else { continue };
                per_sds.entry(&p.sds).or_default().push(v);
                per_uda.entry(&p.uda).or_default().push(v);
                uda_of.entry(&p.sds).or_insert(&p.uda);
            }
            let sds_rows: Vec<(String, SummaryRow)> = summarize_groups(per_sds, conv)
                .into_iter()
                .map(|r| (uda_of[r.group_code.as_str()].to_string(), r))
                .collect();
            IndexBenchmark {
                index: kind,
                uda_rows: summarize_groups(per_uda, conv),
                ranges: range_rows(&sds_rows),
                low_counts: low_counts(&sds_rows),
                sds_rows,
            }
        })
        .collect();

    BenchmarkRun {
        retained_sds: retained.keys().cloned().collect(),
        dropped_sds,
        population: members.len(),
        exclusion,
        conventions: conv,
        indexes,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Csv,
    Markdown,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Markdown => "md",
        }
    }
}

/// A row that can be laid out in a report table.
pub trait TableRow {
    fn header() -> Vec<&'static str>;
    fn cells(&self) -> Vec<String>;
}

fn real(v: f64) -> String {
    format!("{v:.2}")
}

/// Integral values print without decimals.
fn count_like(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        real(v)
    }
}

impl TableRow for SummaryRow {
    fn header() -> Vec<&'static str> {
        vec!["code", "n", "q1", "median", "q3", "max", "mean", "variance"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.group_code.clone(),
            self.n.to_string(),
            real(self.q1),
            real(self.median),
            real(self.q3),
            count_like(self.max),
            real(self.mean),
            real(self.variance),
        ]
    }
}

impl TableRow for LeveledRow {
    fn header() -> Vec<&'static str> {
        let mut h = vec!["level"];
        h.extend(SummaryRow::header());
        h
    }

    fn cells(&self) -> Vec<String> {
        let mut c = vec![self.level.as_str().to_string()];
        c.extend(self.row.cells());
        c
    }
}

impl TableRow for RangeRow {
    fn header() -> Vec<&'static str> {
        vec!["uda", "median_min", "median_max", "max_min", "max_max"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.uda_code.clone(),
            real(self.median_min),
            real(self.median_max),
            count_like(self.max_min),
            count_like(self.max_max),
        ]
    }
}

impl TableRow for LowCountRow {
    fn header() -> Vec<&'static str> {
        vec!["uda", "n_sds", "n_q1_eq_1", "n_median_le_2"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.uda_code.clone(),
            self.n_sds.to_string(),
            self.n_q1_eq_1.to_string(),
            self.n_median_le_2.to_string(),
        ]
    }
}

impl TableRow for ExclusionReport {
    fn header() -> Vec<&'static str> {
        vec!["excluded_total", "zero_publications", "zero_citations"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.excluded_total.to_string(),
            self.zero_publications.to_string(),
            self.zero_citations.to_string(),
        ]
    }
}

/// Renders rows with a fixed column order. An empty slice yields the header
/// alone.
pub fn render_table<R: TableRow>(rows: &[R], format: OutputFormat) -> String {
    render_raw(&R::header(), rows.iter().map(TableRow::cells), format)
}

pub fn render_raw<I>(header: &[&str], rows: I, format: OutputFormat) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    match format {
        OutputFormat::Csv => {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record(header).expect("in-memory write");
            for r in rows {
                wtr.write_record(&r).expect("in-memory write");
            }
            String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8 cells")
        }
        OutputFormat::Markdown => {
            let line = |cells: &[String]| {
                let escaped: Vec<String> = cells.iter().map(|c| c.replace('|', "\\|")).collect();
                format!("| {} |\n", escaped.join(" | "))
            };
            let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
            let mut out = line(&header);
            out.push_str(&format!("|{}\n", "---|".repeat(header.len())));
            for r in rows {
                out.push_str(&line(&r));
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indices::IndexSet;

    fn row(code: &str, q1: f64, median: f64, max: f64) -> SummaryRow {
        SummaryRow {
            group_code: code.into(),
            n: 10,
            q1,
            median,
            q3: median,
            max,
            mean: median,
            variance: 1.0,
        }
    }

    #[test]
    fn summarize_examples() {
        let s = summarize(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(
            (s.q1, s.median, s.q3, s.max, s.mean, s.variance),
            (2.0, 3.0, 4.0, 5.0, 3.0, 2.5)
        );
        let s = summarize(&[7.0]).unwrap();
        assert_eq!(
            (s.q1, s.median, s.q3, s.max, s.mean, s.variance),
            (7.0, 7.0, 7.0, 7.0, 7.0, 0.0)
        );
        let s = summarize(&[2.0; 4]).unwrap();
        assert_eq!(
            (s.q1, s.median, s.q3, s.max, s.mean, s.variance),
            (2.0, 2.0, 2.0, 2.0, 2.0, 0.0)
        );
        assert_eq!(summarize(&[]), Err(StatsError::EmptyGroup));
    }

    #[test]
    fn alternate_conventions() {
        let conv = Conventions {
            quantile: QuantileMethod::NearestRank,
            variance: VarianceDenominator::Population,
        };
        let s = summarize_with("X", &[1.0, 2.0, 3.0, 4.0], conv).unwrap();
        assert_eq!((s.q1, s.median, s.q3), (1.0, 2.0, 3.0));
        assert_eq!(s.variance, 1.25);
        let lin = summarize(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!((lin.q1, lin.median, lin.q3), (1.75, 2.5, 3.25));
    }

    #[test]
    fn ranges_and_low_counts() {
        let single = vec![("U".to_string(), row("S", 1.0, 3.0, 9.0))];
        let r = &range_rows(&single)[0];
        assert_eq!(
            (r.median_min, r.median_max, r.max_min, r.max_max),
            (3.0, 3.0, 9.0, 9.0)
        );

        let rows = vec![
            ("U".to_string(), row("A", 1.0, 1.0, 5.0)),
            ("U".to_string(), row("B", 1.0, 2.0, 5.0)),
            ("U".to_string(), row("C", 2.0, 3.0, 5.0)),
        ];
        assert_eq!(
            low_counts(&rows),
            [LowCountRow {
                uda_code: "U".into(),
                n_sds: 3,
                n_q1_eq_1: 2,
                n_median_le_2: 2
            }]
        );
    }

    #[test]
    fn percentile_examples() {
        assert_eq!(
            percentile_of(3.0, &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(),
            50.0
        );
        assert_eq!(percentile_of(9.0, &[1.0, 2.0, 3.0, 4.0]).unwrap(), 100.0);
        assert_eq!(percentile_of(4.0, &[4.0]).unwrap(), 50.0);
        assert_eq!(percentile_of(1.0, &[]), Err(StatsError::EmptyGroup));
    }

    fn prof(id: &str, sds: &str, status: ProfileStatus, h: u64) -> ResearcherProfile {
        ResearcherProfile {
            researcher_id: id.into(),
            sds: sds.into(),
            uda: "U".into(),
            indices: IndexSet {
                n_pubs: if status == ProfileStatus::ZeroPublications {
                    0
                } else {
                    1
                },
                h,
                g: h,
                h_individual: h as f64,
                h_m: h as f64,
                h_f: None,
                status,
            },
        }
    }

    #[test]
    fn exclusion_counts() {
        use ProfileStatus::*;
        let r = exclusion_report([Ok, ZeroPublications, ZeroCitations, Ok]);
        assert_eq!(
            (r.excluded_total, r.zero_publications, r.zero_citations),
            (2, 1, 1)
        );
        assert_eq!(exclusion_report([Ok, Ok]), ExclusionReport::default());
    }

    #[test]
    fn activity_boundary() {
        let group = |active: usize| -> Vec<ResearcherProfile> {
            (0..10)
                .map(|i| {
                    let st = if i < active {
                        ProfileStatus::Ok
                    } else {
                        ProfileStatus::ZeroPublications
                    };
                    prof(&format!("R{i}"), "S", st, 1)
                })
                .collect()
        };
        let mut m = BTreeMap::new();
        m.insert("FIVE".to_string(), group(5));
        m.insert("FOUR".to_string(), group(4));
        m.insert("EMPTY".to_string(), vec![]);
        let kept = activity_filter(m);
        assert_eq!(kept.keys().collect::<Vec<_>>(), ["FIVE"]);
    }

    #[test]
    fn benchmark_accounting() {
        use ProfileStatus::*;
        let profiles = vec![
            prof("R1", "A", Ok, 3),
            prof("R2", "A", ZeroCitations, 0),
            prof("R3", "A", Ok, 1),
            prof("R4", "B", ZeroPublications, 0),
            prof("R5", "B", ZeroPublications, 0),
            prof("R6", "B", Ok, 2),
        ];
        let run = benchmark(
            &profiles,
            &[IndexKind::H, IndexKind::Hf],
            Conventions::default(),
        );
        assert_eq!(run.dropped_sds, ["B"]);
        assert_eq!(run.population, 3);
        assert_eq!(run.exclusion.excluded_total, 1);
        let h = &run.indexes[0];
        assert_eq!(h.sds_rows.iter().map(|(_, r)| r.n).sum::<usize>(), 2);
        assert_eq!(h.uda_rows[0].max, 3.0);
        assert!(run.indexes[1].sds_rows.is_empty());
    }

    #[test]
    fn rendering() {
        let s =
            summarize_with("FIS/01", &[1.0, 2.0, 3.0, 4.0, 5.0], Conventions::default()).unwrap();
        let csv = render_table(std::slice::from_ref(&s), OutputFormat::Csv);
        assert_eq!(
            csv,
            "code,n,q1,median,q3,max,mean,variance\nFIS/01,5,2.00,3.00,4.00,5,3.00,2.50\n"
        );
        assert_eq!(csv.lines().nth(1).unwrap().split(',').count(), 8);
        assert_eq!(
            render_table::<SummaryRow>(&[], OutputFormat::Csv),
            "code,n,q1,median,q3,max,mean,variance\n"
        );
        let md = render_table(std::slice::from_ref(&s), OutputFormat::Markdown);
        assert_eq!(
            md,
            "| code | n | q1 | median | q3 | max | mean | variance |\n|---|---|---|---|---|---|---|---|\n| FIS/01 | 5 | 2.00 | 3.00 | 4.00 | 5 | 3.00 | 2.50 |\n"
        );
    }
}
