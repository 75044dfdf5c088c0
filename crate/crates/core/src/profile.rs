//! Per-researcher index profiles built from attributions, and the profile CSV.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{
    citations_at, effective_sds, in_window, ClassificationScheme, Corpus, RosterEntry, WindowConfig,
};
use crate::disambig::Attribution;
use crate::indices::{index_set, FieldBaseline, GConvention, IndexSet, PaperStat, ProfileStatus};

pub const PROFILE_HEADER: [&str; 10] = [
    "researcher_id",
    "sds",
    "uda",
    "status",
    "n_pubs",
    "h",
    "g",
    "h_individual",
    "h_m",
    "h_f",
];

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Index selector used on the command line and in benchmark output names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndexKind {
    H,
    G,
    Hi,
    Hm,
    Hf,
}

impl IndexKind {
    pub const ALL: [IndexKind; 5] = [
        IndexKind::H,
        IndexKind::G,
        IndexKind::Hi,
        IndexKind::Hm,
        IndexKind::Hf,
    ];

    pub fn code(self) -> &'static str {
        match self {
            IndexKind::H => "h",
            IndexKind::G => "g",
            IndexKind::Hi => "hi",
            IndexKind::Hm => "hm",
            IndexKind::Hf => "hf",
        }
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for IndexKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IndexKind::ALL
            .into_iter()
            .find(|k| k.code() == s.trim())
            .ok_or_else(|| format!("unknown index `{s}` (expected one of h, g, hi, hm, hf)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResearcherProfile {
    pub researcher_id: String,
    pub sds: String,
    pub uda: String,
    pub indices: IndexSet,
}

impl ResearcherProfile {
    pub fn status(&self) -> ProfileStatus {
        self.indices.status
    }

    pub fn value(&self, kind: IndexKind) -> Option<f64> {
        let ix = &self.indices;
        match kind {
            IndexKind::H => Some(ix.h as f64),
            IndexKind::G => Some(ix.g as f64),
            IndexKind::Hi => Some(ix.h_individual),
            IndexKind::Hm => Some(ix.h_m),
            IndexKind::Hf => ix.h_f.map(|v| v as f64),
        }
    }
}

/// Read-only view joining attributions to the corpus, keyed by researcher.
pub struct Profiler<'a> {
    corpus: &'a Corpus,
    papers_of: HashMap<&'a str, Vec<usize>>,
    window: WindowConfig,
    baselines: Option<&'a FieldBaseline>,
    g_convention: GConvention,
}

impl<'a> Profiler<'a> {
    pub fn new(
        corpus: &'a Corpus,
        attributions: &'a [Attribution],
        window: WindowConfig,
        baselines: Option<&'a FieldBaseline>,
    ) -> Self {
        let position: HashMap<&str, usize> = corpus
            .records()
            .iter()
            .enumerate()
            .map(|(i, r)| (r.pub_id.as_str(), i))
            .collect();
        let mut papers_of: HashMap<&str, Vec<usize>> = HashMap::new();
        for a in attributions {
            if let Some(&i) = position.get(a.pub_id.as_str()) {
                papers_of
                    .entry(a.researcher_id.as_str())
                    .or_default()
                    .push(i);
            }
        }
        for v in papers_of.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
        Self {
            corpus,
            papers_of,
            window,
            baselines,
            g_convention: GConvention::default(),
        }
    }

    pub fn g_convention(mut self, g: GConvention) -> Self {
        self.g_convention = g;
        self
    }

    /// The researcher's attributed in-window papers with citations counted at
    /// the window's observation date.
    pub fn papers(&self, researcher_id: &str) -> Vec<PaperStat> {
        let records = self.corpus.records();
        self.papers_of
            .get(researcher_id)
            .into_iter()
            .flatten()
            .map(|&i| &records[i])
            .filter(|r| in_window(r, &self.window))
            .map(|r| {
                PaperStat::new(
                    r.pub_id.clone(),
                    citations_at(r, self.window.observation_date),
                    r.n_authors() as u32,
                    r.category.clone(),
                    r.year,
                )
            })
            .collect()
    }

    pub fn profile(&self, researcher_id: &str) -> IndexSet {
        index_set(
            &self.papers(researcher_id),
            self.baselines,
            self.g_convention,
        )
    }
}

/// Profiles every eligible researcher, sorted by researcher id. Researchers
/// whose window-end SDS cannot be determined or is not in the scheme are
/// returned separately.
pub fn profile_all(
    profiler: &Profiler<'_>,
    eligible: &[&RosterEntry],
    scheme: &ClassificationScheme,
) -> (Vec<ResearcherProfile>, Vec<String>) {
    let results: Vec<Result<ResearcherProfile, String>> = eligible
        .par_iter()
        .map(|e| {
            let sds = effective_sds(e, &profiler.window).map_err(|err| err.to_string())?;
            let uda = scheme.uda_of(sds).ok_or_else(|| {
                format!(
                    "researcher `{}`: SDS `{sds}` not in classification",
                    e.researcher_id
                )
            })?;
            Ok(ResearcherProfile {
                researcher_id: e.researcher_id.clone(),
                sds: sds.to_string(),
                uda: uda.to_string(),
                indices: profiler.profile(&e.researcher_id),
            })
        })
        .collect();
    let mut profiles = Vec::new();
    let mut skipped = Vec::new();
    for r in results {
        match r {
            Ok(p) => profiles.push(p),
            Err(e) => skipped.push(e),
        }
    }
    profiles.sort_by(|a, b| a.researcher_id.cmp(&b.researcher_id));
    (profiles, skipped)
}

/// Writes the profile CSV; columns for unselected indexes are left empty.
pub fn write_profiles<W: Write>(
    profiles: &[ResearcherProfile],
    selected: &[IndexKind],
    w: W,
) -> Result<(), ProfileError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(PROFILE_HEADER)?;
    let pick = |k: IndexKind, s: String| {
        if selected.contains(&k) {
            s
        } else {
            String::new()
        }
    };
    for p in profiles {
        let ix = &p.indices;
        wtr.write_record([
            p.researcher_id.clone(),
            p.sds.clone(),
            p.uda.clone(),
            ix.status.as_str().to_string(),
            ix.n_pubs.to_string(),
            pick(IndexKind::H, ix.h.to_string()),
            pick(IndexKind::G, ix.g.to_string()),
            pick(IndexKind::Hi, ix.h_individual.to_string()),
            pick(IndexKind::Hm, ix.h_m.to_string()),
            pick(
                IndexKind::Hf,
                ix.h_f.map(|v| v.to_string()).unwrap_or_default(),
            ),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a profile CSV. Empty index cells read as 0 (or absent for `h_f`).
pub fn parse_profiles<R: Read>(reader: R) -> Result<Vec<ResearcherProfile>, ProfileError> {
    parse_profile_table(reader).map(|(profiles, _)| profiles)
}

/// Like [`parse_profiles`], also returning the index columns that hold a
/// value in at least one row.
pub fn parse_profile_table<R: Read>(
    reader: R,
) -> Result<(Vec<ResearcherProfile>, Vec<IndexKind>), ProfileError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != PROFILE_HEADER {
        return Err(ProfileError::Malformed {
            line: 1,
            message: format!("expected header `{}`", PROFILE_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    let mut filled = [false; 5];
    for rec in rdr.records() {
        let rec = rec?;
        for (i, f) in filled.iter_mut().enumerate() {
            *f |= !rec.get(5 + i).unwrap_or("").is_empty();
        }
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let bad = |field: &str, v: &str| ProfileError::Malformed {
            line,
            message: format!("invalid {field} `{v}`"),
        };
        let get = |i: usize| rec.get(i).unwrap_or("");
        fn num<T: FromStr + Default>(s: &str) -> Option<T> {
            if s.is_empty() {
                Some(T::default())
            } else {
                s.parse().ok()
            }
        }
        let status = ProfileStatus::parse(get(3)).ok_or_else(|| bad("status", get(3)))?;
        let indices = IndexSet {
            n_pubs: num(get(4)).ok_or_else(|| bad("n_pubs", get(4)))?,
            h: num(get(5)).ok_or_else(|| bad("h", get(5)))?,
            g: num(get(6)).ok_or_else(|| bad("g", get(6)))?,
            h_individual: num(get(7)).ok_or_else(|| bad("h_individual", get(7)))?,
            h_m: num(get(8)).ok_or_else(|| bad("h_m", get(8)))?,
            h_f: match get(9) {
                "" => None,
                s => Some(s.parse().map_err(|_| bad("h_f", s))?),
            },
            status,
        };
        out.push(ResearcherProfile {
            researcher_id: get(0).to_string(),
            sds: get(1).to_string(),
            uda: get(2).to_string(),
            indices,
        });
    }
    let columns = IndexKind::ALL
        .into_iter()
        .zip(filled)
        .filter(|(_, f)| *f)
        .map(|(k, _)| k)
        .collect();
    Ok((out, columns))
}
