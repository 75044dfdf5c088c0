//! h, g and three variant indexes over one researcher's papers.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::{Read, Write};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct PaperStat {
    pub pub_id: String,
    pub citations: u64,
    /// Always at least 1.
    pub n_authors: u32,
    pub category: String,
    pub year: i32,
}

impl PaperStat {
    pub fn new(
        pub_id: impl Into<String>,
        citations: u64,
        n_authors: u32,
        category: impl Into<String>,
        year: i32,
    ) -> Self {
        Self {
            pub_id: pub_id.into(),
            citations,
            n_authors: n_authors.max(1),
            category: category.into(),
            year,
        }
    }
}

/// Mean citations per article keyed by `(category, year)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FieldBaseline {
    means: BTreeMap<String, BTreeMap<i32, f64>>,
}

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] IndexError),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Error, PartialEq)]
pub enum IndexError {
    #[error("no field baseline for category `{category}` in {year}")]
    MissingBaseline { category: String, year: i32 },
    #[error("baseline for `{category}` in {year} must be positive, got {value}")]
    NonPositiveBaseline {
        category: String,
        year: i32,
        value: f64,
    },
}

impl FieldBaseline {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        category: impl Into<String>,
        year: i32,
        c0: f64,
    ) -> Result<(), IndexError> {
        let category = category.into();
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(IndexError::NonPositiveBaseline {
                category,
                year,
                value: c0,
            });
        }
        self.means.entry(category).or_default().insert(year, c0);
        Ok(())
    }

    pub fn get(&self, category: &str, year: i32) -> Option<f64> {
        self.means.get(category)?.get(&year).copied()
    }

    pub fn len(&self) -> usize {
        self.means.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    /// Entries sorted by `(category, year)`.
    pub fn entries(&self) -> Vec<(&str, i32, f64)> {
        self.means
            .iter()
            .flat_map(|(c, years)| years.iter().map(move |(y, m)| (c.as_str(), *y, *m)))
            .collect()
    }

    /// Reads `category,year,c0` CSV.
    pub fn parse<R: Read>(reader: R) -> Result<Self, BaselineError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["category", "year", "c0"] {
            return Err(BaselineError::Malformed {
                line: 1,
                message: "expected header `category,year,c0`".into(),
            });
        }
        let mut out = Self::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
            let malformed = |what: &str| BaselineError::Malformed {
                line,
                message: format!("invalid {what}"),
            };
            let year = rec
                .get(1)
                .unwrap_or("")
                .parse()
                .map_err(|_| malformed("year"))?;
            let c0 = rec
                .get(2)
                .unwrap_or("")
                .parse()
                .map_err(|_| malformed("c0"))?;
            out.insert(rec.get(0).unwrap_or(""), year, c0)?;
        }
        Ok(out)
    }

    /// Writes `category,year,c0` with `c0` in shortest round-trip form.
    pub fn write<W: Write>(&self, w: W) -> Result<(), BaselineError> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["category", "year", "c0"])?;
        for (c, y, m) in self.entries() {
            wtr.write_record([c, &y.to_string(), &m.to_string()])?;
        }
        wtr.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Whether g may exceed the number of papers (Egghe's fictitious zero-cited
/// papers) or is capped at it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum GConvention {
    #[default]
    Padded,
    Capped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileStatus {
    Ok,
    ZeroPublications,
    ZeroCitations,
}

impl ProfileStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ProfileStatus::Ok => "ok",
            ProfileStatus::ZeroPublications => "zero_publications",
            ProfileStatus::ZeroCitations => "zero_citations",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ok" => Some(ProfileStatus::Ok),
            "zero_publications" => Some(ProfileStatus::ZeroPublications),
            "zero_citations" => Some(ProfileStatus::ZeroCitations),
            _ => None,
        }
    }

    pub fn is_null(self) -> bool {
        self != ProfileStatus::Ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexSet {
    pub n_pubs: usize,
    pub h: u64,
    pub g: u64,
    pub h_individual: f64,
    pub h_m: f64,
    /// Absent when no baselines were supplied or one was missing.
    pub h_f: Option<u64>,
    pub status: ProfileStatus,
}

/// Largest h such that at least h of the counts are ≥ h.
pub fn h_index(counts: &[u64]) -> u64 {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted
        .iter()
        .enumerate()
        .take_while(|(i, c)| **c > *i as u64)
        .count() as u64
}

/// Largest g such that the g most cited papers hold at least g² citations.
pub fn g_index(counts: &[u64]) -> u64 {
    g_index_with(counts, GConvention::Padded)
}

pub fn g_index_with(counts: &[u64], convention: GConvention) -> u64 {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    // Prefix sums are concave and g² convex, so the feasible g form a prefix.
    let mut total: u128 = 0;
    for (i, c) in sorted.iter().enumerate() {
        total += *c as u128;
        let g = (i + 1) as u128;
        if total < g * g {
            return i as u64;
        }
    }
    let n = sorted.len() as u64;
    match convention {
        GConvention::Capped => n,
        GConvention::Padded => n.max(total.isqrt() as u64),
    }
}

fn by_citations_then_id(a: &PaperStat, b: &PaperStat) -> Ordering {
    b.citations
        .cmp(&a.citations)
        .then_with(|| a.pub_id.cmp(&b.pub_id))
}

fn ranked(papers: &[PaperStat]) -> Vec<&PaperStat> {
    let mut v: Vec<&PaperStat> = papers.iter().collect();
    v.sort_by(|a, b| by_citations_then_id(a, b));
    v
}

fn counts(papers: &[PaperStat]) -> Vec<u64> {
    papers.iter().map(|p| p.citations).collect()
}

/// The h most cited papers; citation ties at the boundary go to the smaller
/// `pub_id`.
pub fn h_core(papers: &[PaperStat]) -> Vec<PaperStat> {
    let h = h_index(&counts(papers)) as usize;
    ranked(papers).into_iter().take(h).cloned().collect()
}

/// h divided by the mean author count of the h-core.
pub fn individual_h(papers: &[PaperStat]) -> f64 {
    let core = h_core(papers);
    if core.is_empty() {
        return 0.0;
    }
    let h = core.len() as f64;
    let authors: f64 = core.iter().map(|p| p.n_authors as f64).sum();
    h * h / authors
}

/// Fractional-rank h: each paper advances the rank by `1 / n_authors`; the
/// result is the largest effective rank not exceeding that paper's citations.
pub fn hm_index(papers: &[PaperStat]) -> f64 {
    let mut effective_rank = 0.0;
    let mut best = 0.0;
    for p in ranked(papers) {
        effective_rank += 1.0 / p.n_authors as f64;
        if effective_rank <= p.citations as f64 {
            best = effective_rank;
        }
    }
    best
}

/// h over citations divided by the paper's `(category, year)` mean.
pub fn generalized_h(papers: &[PaperStat], baselines: &FieldBaseline) -> Result<u64, IndexError> {
    let mut normalized = papers
        .iter()
        .map(|p| {
            baselines
                .get(&p.category, p.year)
                .map(|c0| p.citations as f64 / c0)
                .ok_or_else(|| IndexError::MissingBaseline {
                    category: p.category.clone(),
                    year: p.year,
                })
        })
        .collect::<Result<Vec<f64>, _>>()?;
    normalized.sort_unstable_by(|a, b| b.total_cmp(a));
    Ok(normalized
        .iter()
        .enumerate()
        .take_while(|(i, v)| **v >= (*i + 1) as f64)
        .count() as u64)
}

/// All indexes for one researcher's in-window papers.
pub fn index_set(
    papers: &[PaperStat],
    baselines: Option<&FieldBaseline>,
    g: GConvention,
) -> IndexSet {
    let counts = counts(papers);
    let status = if papers.is_empty() {
        ProfileStatus::ZeroPublications
    } else if counts.iter().all(|c| *c == 0) {
        ProfileStatus::ZeroCitations
    } else {
        ProfileStatus::Ok
    };
    IndexSet {
        n_pubs: papers.len(),
        h: h_index(&counts),
        g: g_index_with(&counts, g),
        h_individual: individual_h(papers),
        h_m: hm_index(papers),
        h_f: baselines.and_then(|b| generalized_h(papers, b).ok()),
        status,
    }
}
