//! Publication records, the researcher roster and the SDS/UDA classification.
//!
//! Everything here is loaded once and then only read. Loaders validate as they
//! go and report the first offending line.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::names;

pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

const ROSTER_HEADER: [&str; 7] = [
    "researcher_id",
    "surname",
    "given_names",
    "institution_id",
    "entry_year",
    "exit_year",
    "sds_history",
];
const CLASSIFICATION_HEADER: [&str; 4] = ["sds_code", "sds_name", "uda_code", "uda_name"];
const AFFINITY_HEADER: [&str; 2] = ["category", "sds_code"];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: missing required field `{field}`")]
    MissingField { line: usize, field: &'static str },
    #[error("line {line}: invalid `{field}`: {message}")]
    InvalidField {
        line: usize,
        field: &'static str,
        message: String,
    },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("researcher `{0}` has an empty SDS history")]
    EmptyHistory(String),
    #[error("researcher `{id}` has no SDS assignment on or before {year}")]
    NoSdsBefore { id: String, year: i32 },
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

pub fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").ok()
}

/// Publication window (inclusive years) and the citation observation date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub start_year: i32,
    pub end_year: i32,
    pub observation_date: NaiveDate,
}

impl WindowConfig {
    pub fn new(start_year: i32, end_year: i32, observation_date: NaiveDate) -> Result<Self> {
        if start_year > end_year {
            return Err(CorpusError::InvalidWindow(format!(
                "start {start_year} is after end {end_year}"
            )));
        }
        Ok(Self {
            start_year,
            end_year,
            observation_date,
        })
    }

    pub fn contains_year(&self, year: i32) -> bool {
        self.start_year <= year && year <= self.end_year
    }
}

impl Default for WindowConfig {
    /// 2001–2005 window, citations counted up to 2008-03-31.
    fn default() -> Self {
        Self {
            start_year: 2001,
            end_year: 2005,
            observation_date: NaiveDate::from_ymd_opt(2008, 3, 31).expect("valid date"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthorMention {
    pub raw: String,
    pub surname_norm: String,
    pub initials: Vec<char>,
    pub position: usize,
}

impl AuthorMention {
    pub fn parse(raw: &str, position: usize) -> Result<Self, String> {
        let (surname, initials) = names::split_byline(raw)?;
        Ok(Self {
            raw: raw.to_string(),
            surname_norm: names::normalize_surname(&surname),
            initials,
            position,
        })
    }
}

/// Where a record's citation count comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CitationSource {
    /// Dated events, cut at the observation date.
    Events,
    /// A pre-counted total; the observation date cannot be applied.
    Snapshot,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicationRecord {
    pub pub_id: String,
    pub year: i32,
    pub mentions: Vec<AuthorMention>,
    pub addresses: Vec<String>,
    pub category: String,
    /// Sorted ascending.
    pub citation_events: Vec<NaiveDate>,
    pub citation_snapshot: Option<u64>,
}

impl PublicationRecord {
    pub fn citation_source(&self) -> CitationSource {
        if !self.citation_events.is_empty() {
            CitationSource::Events
        } else if self.citation_snapshot.is_some() {
            CitationSource::Snapshot
        } else {
            CitationSource::None
        }
    }

    pub fn n_authors(&self) -> usize {
        self.mentions.len()
    }
}

/// Citations received up to and including `obs`. Records that only carry a
/// snapshot count return it unchanged.
pub fn citations_at(record: &PublicationRecord, obs: NaiveDate) -> u64 {
    match record.citation_source() {
        CitationSource::Events => record.citation_events.partition_point(|d| *d <= obs) as u64,
        CitationSource::Snapshot => record.citation_snapshot.unwrap_or(0),
        CitationSource::None => 0,
    }
}

pub fn in_window(record: &PublicationRecord, window: &WindowConfig) -> bool {
    window.contains_year(record.year)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPublication {
    pub_id: Option<String>,
    year: Option<i64>,
    authors: Option<Vec<String>>,
    addresses: Option<Vec<String>>,
    category: Option<String>,
    citation_dates: Option<Vec<String>>,
    citation_count: Option<u64>,
}

#[derive(Serialize)]
struct PublicationOut<'a> {
    pub_id: &'a str,
    year: i32,
    authors: Vec<&'a str>,
    addresses: &'a [String],
    category: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    citation_dates: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    citation_count: Option<u64>,
}

fn required<T>(value: Option<T>, line: usize, field: &'static str) -> Result<T> {
    value.ok_or(CorpusError::MissingField { line, field })
}

fn publication_from_raw(raw: RawPublication, line: usize) -> Result<PublicationRecord> {
    let pub_id = required(raw.pub_id, line, "pub_id")?;
    if pub_id.trim().is_empty() {
        return Err(CorpusError::InvalidField {
            line,
            field: "pub_id",
            message: "empty".into(),
        });
    }
    let year = required(raw.year, line, "year")?;
    if !(MIN_YEAR as i64..=MAX_YEAR as i64).contains(&year) {
        return Err(CorpusError::InvalidField {
            line,
            field: "year",
            message: format!("{year} outside [{MIN_YEAR}, {MAX_YEAR}]"),
        });
    }
    let authors = required(raw.authors, line, "authors")?;
    if authors.is_empty() {
        return Err(CorpusError::InvalidField {
            line,
            field: "authors",
            message: "no authors".into(),
        });
    }
    let mentions = authors
        .iter()
        .enumerate()
        .map(|(pos, a)| AuthorMention::parse(a, pos))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|message| CorpusError::InvalidField {
            line,
            field: "authors",
            message,
        })?;
    let addresses = required(raw.addresses, line, "addresses")?;
    let category = required(raw.category, line, "category")?;
    let mut citation_events = raw
        .citation_dates
        .unwrap_or_default()
        .iter()
        .map(|s| {
            parse_date(s).ok_or_else(|| CorpusError::InvalidField {
                line,
                field: "citation_dates",
                message: format!("`{s}` is not a YYYY-MM-DD date"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    citation_events.sort_unstable();
    Ok(PublicationRecord {
        pub_id,
        year: year as i32,
        mentions,
        addresses,
        category,
        citation_events,
        citation_snapshot: raw.citation_count,
    })
}

/// Reads line-delimited JSON publication records. Blank lines are skipped;
/// line numbers in errors are 1-based.
pub fn parse_publications<R: BufRead>(reader: R) -> Result<Vec<PublicationRecord>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawPublication =
            serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
                line: line_no,
                message: e.to_string(),
            })?;
        let record = publication_from_raw(raw, line_no)?;
        if !seen.insert(record.pub_id.clone()) {
            return Err(CorpusError::DuplicateId {
                line: line_no,
                id: record.pub_id,
            });
        }
        out.push(record);
    }
    Ok(out)
}

pub fn write_publications<W: Write>(records: &[PublicationRecord], mut w: W) -> Result<()> {
    for r in records {
        let out = PublicationOut {
            pub_id: &r.pub_id,
            year: r.year,
            authors: r.mentions.iter().map(|m| m.raw.as_str()).collect(),
            addresses: &r.addresses,
            category: &r.category,
            citation_dates: (!r.citation_events.is_empty()).then(|| {
                r.citation_events
                    .iter()
                    .map(|d| d.format("%Y-%m-%d").to_string())
                    .collect()
            }),
            citation_count: r.citation_snapshot,
        };
        serde_json::to_writer(&mut w, &out).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Load-time observations that do not reject a record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// Both dated events and a snapshot count were given; events are used.
    SnapshotIgnored {
        pub_id: String,
    },
    /// Snapshot-only record: the observation date cannot be applied.
    SnapshotOnly {
        pub_id: String,
    },
    UnknownCategory {
        pub_id: String,
        category: String,
    },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::SnapshotIgnored { pub_id } => {
                write!(
                    f,
                    "{pub_id}: citation_count ignored, citation_dates take precedence"
                )
            }
            Warning::SnapshotOnly { pub_id } => {
                write!(
                    f,
                    "{pub_id}: snapshot count used, observation date not applied"
                )
            }
            Warning::UnknownCategory { pub_id, category } => {
                write!(f, "{pub_id}: unknown subject category `{category}`")
            }
        }
    }
}

/// An immutable, validated set of publication records.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    records: Vec<PublicationRecord>,
    warnings: Vec<Warning>,
}

impl Corpus {
    pub fn new(records: Vec<PublicationRecord>) -> Self {
        let warnings = records
            .iter()
            .filter_map(
                |r| match (r.citation_events.is_empty(), r.citation_snapshot) {
                    (false, Some(_)) => Some(Warning::SnapshotIgnored {
                        pub_id: r.pub_id.clone(),
                    }),
                    (true, Some(_)) => Some(Warning::SnapshotOnly {
                        pub_id: r.pub_id.clone(),
                    }),
                    _ => None,
                },
            )
            .collect();
        Self { records, warnings }
    }

    pub fn load<R: BufRead>(reader: R) -> Result<Self> {
        Ok(Self::new(parse_publications(reader)?))
    }

    pub fn records(&self) -> &[PublicationRecord] {
        &self.records
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Flags records whose category has no affinity entry in `scheme`.
    /// Returns nothing when the scheme carries no affinity map.
    pub fn unknown_categories(&self, scheme: &ClassificationScheme) -> Vec<Warning> {
        let Some(affinity) = &scheme.category_affinity else {
            return Vec::new();
        };
        self.records
            .iter()
            .filter(|r| !affinity.contains_key(&r.category))
            .map(|r| Warning::UnknownCategory {
                pub_id: r.pub_id.clone(),
                category: r.category.clone(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RosterEntry {
    pub researcher_id: String,
    pub surname: String,
    pub surname_norm: String,
    pub given_names: String,
    pub initials: Vec<char>,
    pub institution_id: String,
    pub entry_year: i32,
    pub exit_year: Option<i32>,
    /// `(year, sds_code)` sorted by year.
    pub sds_history: Vec<(i32, String)>,
}

impl RosterEntry {
    pub fn new(
        researcher_id: impl Into<String>,
        surname: impl Into<String>,
        given_names: impl Into<String>,
        institution_id: impl Into<String>,
        entry_year: i32,
        exit_year: Option<i32>,
        mut sds_history: Vec<(i32, String)>,
    ) -> Self {
        let surname = surname.into();
        let given_names = given_names.into();
        sds_history.sort_by_key(|(y, _)| *y);
        Self {
            researcher_id: researcher_id.into(),
            surname_norm: names::normalize_surname(&surname),
            initials: names::initials_of_given_names(&given_names),
            surname,
            given_names,
            institution_id: institution_id.into(),
            entry_year,
            exit_year,
            sds_history,
        }
    }
}

fn parse_sds_history(s: &str) -> Result<Vec<(i32, String)>, String> {
    let mut out = Vec::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (year, code) = part
            .split_once(':')
            .ok_or_else(|| format!("`{part}` is not YEAR:CODE"))?;
        let year: i32 = year
            .trim()
            .parse()
            .map_err(|_| format!("`{year}` is not a year"))?;
        let code = code.trim();
        if code.is_empty() {
            return Err(format!("empty SDS code in `{part}`"));
        }
        out.push((year, code.to_string()));
    }
    out.sort_by_key(|(y, _)| *y);
    Ok(out)
}

fn format_sds_history(history: &[(i32, String)]) -> String {
    history
        .iter()
        .map(|(y, c)| format!("{y}:{c}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn check_header(headers: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let got: Vec<&str> = headers.iter().map(str::trim).collect();
    if got != expected {
        return Err(CorpusError::Malformed {
            line: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                got.join(",")
            ),
        });
    }
    Ok(())
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

fn line_of(rec: &csv::StringRecord) -> usize {
    rec.position().map(|p| p.line() as usize).unwrap_or(0)
}

fn parse_year(field: &'static str, s: &str, line: usize) -> Result<i32> {
    s.parse().map_err(|_| CorpusError::InvalidField {
        line,
        field,
        message: format!("`{s}` is not a year"),
    })
}

/// Reads the researcher roster CSV. An empty input is an empty roster.
pub fn parse_roster<R: Read>(reader: R) -> Result<Vec<RosterEntry>> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        return Ok(Vec::new());
    }
    check_header(&headers, &ROSTER_HEADER)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let field = |i: usize| rec.get(i).unwrap_or("");
        let id = field(0);
        if id.is_empty() {
            return Err(CorpusError::MissingField {
                line,
                field: "researcher_id",
            });
        }
        if names::normalize_surname(field(1)).is_empty() {
            return Err(CorpusError::MissingField {
                line,
                field: "surname",
            });
        }
        if names::initials_of_given_names(field(2)).is_empty() {
            return Err(CorpusError::MissingField {
                line,
                field: "given_names",
            });
        }
        if field(4).is_empty() {
            return Err(CorpusError::MissingField {
                line,
                field: "entry_year",
            });
        }
        let entry_year = parse_year("entry_year", field(4), line)?;
        let exit_year = match field(5) {
            "" => None,
            s => Some(parse_year("exit_year", s, line)?),
        };
        if let Some(exit) = exit_year {
            if entry_year > exit {
                return Err(CorpusError::InvalidField {
                    line,
                    field: "exit_year",
                    message: format!("entry year {entry_year} is after exit year {exit}"),
                });
            }
        }
        let history = parse_sds_history(field(6)).map_err(|message| CorpusError::InvalidField {
            line,
            field: "sds_history",
            message,
        })?;
        if !seen.insert(id.to_string()) {
            return Err(CorpusError::DuplicateId {
                line,
                id: id.to_string(),
            });
        }
        out.push(RosterEntry::new(
            id,
            field(1),
            field(2),
            field(3),
            entry_year,
            exit_year,
            history,
        ));
    }
    Ok(out)
}

pub fn write_roster<W: Write>(roster: &[RosterEntry], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(ROSTER_HEADER)?;
    for e in roster {
        wtr.write_record([
            e.researcher_id.as_str(),
            e.surname.as_str(),
            e.given_names.as_str(),
            e.institution_id.as_str(),
            &e.entry_year.to_string(),
            &e.exit_year.map(|y| y.to_string()).unwrap_or_default(),
            &format_sds_history(&e.sds_history),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Researchers in role for the whole window: entered no later than its
/// first year and not departed before its last.
pub fn eligible_researchers<'a, I>(roster: I, window: &WindowConfig) -> Vec<&'a RosterEntry>
where
    I: IntoIterator<Item = &'a RosterEntry>,
{
    roster
        .into_iter()
        .filter(|e| {
            e.entry_year <= window.start_year && e.exit_year.is_none_or(|x| x >= window.end_year)
        })
        .collect()
}

/// SDS held at the close of the window's last year.
pub fn effective_sds<'a>(entry: &'a RosterEntry, window: &WindowConfig) -> Result<&'a str> {
    if entry.sds_history.is_empty() {
        return Err(CorpusError::EmptyHistory(entry.researcher_id.clone()));
    }
    entry
        .sds_history
        .iter()
        .rev()
        .find(|(y, _)| *y <= window.end_year)
        .map(|(_, code)| code.as_str())
        .ok_or_else(|| CorpusError::NoSdsBefore {
            id: entry.researcher_id.clone(),
            year: window.end_year,
        })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdsInfo {
    pub code: String,
    pub name: String,
    pub uda: String,
}

/// Two-level field classification: SDSs grouped under UDAs, plus an optional
/// map from journal subject categories to the SDSs they are typical for.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassificationScheme {
    pub udas: BTreeMap<String, String>,
    pub sds: BTreeMap<String, SdsInfo>,
    pub category_affinity: Option<BTreeMap<String, BTreeSet<String>>>,
}

impl ClassificationScheme {
    pub fn uda_of(&self, sds: &str) -> Option<&str> {
        self.sds.get(sds).map(|s| s.uda.as_str())
    }

    /// `None` when no affinity map was loaded.
    pub fn has_affinity(&self, category: &str, sds: &str) -> Option<bool> {
        self.category_affinity
            .as_ref()
            .map(|m| m.get(category).is_some_and(|set| set.contains(sds)))
    }

    pub fn parse<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv_reader(reader);
        let headers = rdr.headers()?.clone();
        check_header(&headers, &CLASSIFICATION_HEADER)?;
        let mut scheme = Self::default();
        for rec in rdr.records() {
            let rec = rec?;
            let line = line_of(&rec);
            let f = |i: usize| rec.get(i).unwrap_or("").to_string();
            let (sds_code, sds_name, uda_code, uda_name) = (f(0), f(1), f(2), f(3));
            if sds_code.is_empty() {
                return Err(CorpusError::MissingField {
                    line,
                    field: "sds_code",
                });
            }
            if uda_code.is_empty() {
                return Err(CorpusError::MissingField {
                    line,
                    field: "uda_code",
                });
            }
            match scheme.udas.get(&uda_code) {
                Some(existing) if *existing != uda_name => {
                    return Err(CorpusError::InvalidField {
                        line,
                        field: "uda_name",
                        message: format!("UDA `{uda_code}` already named `{existing}`"),
                    })
                }
                Some(_) => {}
                None => {
                    scheme.udas.insert(uda_code.clone(), uda_name);
                }
            }
            if scheme.sds.contains_key(&sds_code) {
                return Err(CorpusError::DuplicateId { line, id: sds_code });
            }
            scheme.sds.insert(
                sds_code.clone(),
                SdsInfo {
                    code: sds_code,
                    name: sds_name,
                    uda: uda_code,
                },
            );
        }
        Ok(scheme)
    }

    /// Attaches a `category,sds_code` affinity file. Every SDS it names must
    /// already be in the scheme.
    pub fn load_affinity<R: Read>(&mut self, reader: R) -> Result<()> {
        let mut rdr = csv_reader(reader);
        let headers = rdr.headers()?.clone();
        check_header(&headers, &AFFINITY_HEADER)?;
        let mut map: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = line_of(&rec);
            let category = rec.get(0).unwrap_or("");
            let sds = rec.get(1).unwrap_or("");
            if category.is_empty() {
                return Err(CorpusError::MissingField {
                    line,
                    field: "category",
                });
            }
            if !self.sds.contains_key(sds) {
                return Err(CorpusError::InvalidField {
                    line,
                    field: "sds_code",
                    message: format!("unknown SDS `{sds}`"),
                });
            }
            map.entry(category.to_string())
                .or_default()
                .insert(sds.to_string());
        }
        self.category_affinity = Some(map);
        Ok(())
    }

    pub fn write<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(CLASSIFICATION_HEADER)?;
        for s in self.sds.values() {
            let uda_name = self.udas.get(&s.uda).map(String::as_str).unwrap_or("");
            wtr.write_record([&s.code, &s.name, &s.uda, uda_name])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn write_affinity<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(AFFINITY_HEADER)?;
        for (cat, set) in self.category_affinity.iter().flatten() {
            for sds in set {
                wtr.write_record([cat, sds])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(s: &str) -> NaiveDate {
        parse_date(s).unwrap()
    }

    #[test]
    fn well_formed_line() {
        let line = r#"{"pub_id":"P1","year":2003,"authors":["Rossi, M","Bianchi, GL"],"addresses":["Univ Roma"],"category":"PHYS","citation_dates":["2009-01-01","2006-01-01"]}"#;
        let recs = parse_publications(line.as_bytes()).unwrap();
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert_eq!(
            r.mentions.iter().map(|m| m.position).collect::<Vec<_>>(),
            [0, 1]
        );
        assert_eq!(r.mentions[1].initials, ['G', 'L']);
        assert_eq!(r.citation_events, [date("2006-01-01"), date("2009-01-01")]);
    }

    #[test]
    fn missing_year_names_field_and_line() {
        let text = "\n{\"pub_id\":\"P1\",\"authors\":[\"Rossi, M\"],\"addresses\":[],\"category\":\"X\"}\n";
        let err = parse_publications(text.as_bytes()).unwrap_err();
        assert!(matches!(
            err,
            CorpusError::MissingField {
                line: 2,
                field: "year"
            }
        ));
        assert!(err.to_string().contains("year"));
    }

    #[test]
    fn duplicate_pub_id() {
        let l =
            r#"{"pub_id":"P1","year":2003,"authors":["Rossi, M"],"addresses":[],"category":"X"}"#;
        let text = format!("{l}\n{l}\n");
        let err = parse_publications(text.as_bytes()).unwrap_err();
        assert!(matches!(&err, CorpusError::DuplicateId { id, line: 2 } if id == "P1"));
        assert!(err.to_string().contains("P1"));
    }

    #[test]
    fn rejects_bad_records() {
        let cases = [
            r#"{"pub_id":"P1","year":1800,"authors":["Rossi, M"],"addresses":[],"category":"X"}"#,
            r#"{"pub_id":"P1","year":2003,"authors":[],"addresses":[],"category":"X"}"#,
            r#"{"pub_id":"P1","year":2003,"authors":["Rossi"],"addresses":[],"category":"X"}"#,
            r#"{"pub_id":"P1","year":2003,"authors":["Rossi, M"],"addresses":[],"category":"X","citation_dates":["2008-13-01"]}"#,
            r#"{"pub_id":"P1","year":2003,"authors":["Rossi, M"],"addresses":[],"category":"X","citation_count":-1}"#,
            r#"{"pub_id":"P1","year":2003,"authors":["Rossi, M"],"addresses":[],"category":"X","extra":1}"#,
            r#"{"pub_id":"P1","year":2003"#,
        ];
        for c in cases {
            assert!(parse_publications(c.as_bytes()).is_err(), "{c}");
        }
    }

    #[test]
    fn citation_cutoff_and_snapshot() {
        let mut r = PublicationRecord {
            pub_id: "P".into(),
            year: 2003,
            mentions: vec![AuthorMention::parse("Rossi, M", 0).unwrap()],
            addresses: vec![],
            category: "X".into(),
            citation_events: vec![date("2006-01-01"), date("2009-01-01")],
            citation_snapshot: None,
        };
        let obs = date("2008-03-31");
        assert_eq!(citations_at(&r, obs), 1);
        assert_eq!(citations_at(&r, date("2009-01-01")), 2);
        r.citation_events.clear();
        assert_eq!(citations_at(&r, obs), 0);
        r.citation_snapshot = Some(7);
        assert_eq!(citations_at(&r, obs), 7);
        assert_eq!(r.citation_source(), CitationSource::Snapshot);
    }

    #[test]
    fn both_counts_present_records_warning() {
        let l = r#"{"pub_id":"P1","year":2003,"authors":["Rossi, M"],"addresses":[],"category":"X","citation_dates":["2006-01-01"],"citation_count":9}"#;
        let corpus = Corpus::load(l.as_bytes()).unwrap();
        assert_eq!(citations_at(&corpus.records()[0], date("2008-03-31")), 1);
        assert_eq!(
            corpus.warnings(),
            [Warning::SnapshotIgnored {
                pub_id: "P1".into()
            }]
        );
    }

    #[test]
    fn window_is_inclusive() {
        let w = WindowConfig::default();
        assert!(w.contains_year(2001));
        assert!(w.contains_year(2005));
        assert!(!w.contains_year(2006));
        assert!(!w.contains_year(2000));
        assert!(WindowConfig::new(2006, 2005, w.observation_date).is_err());
    }

    const HEADER: &str =
        "researcher_id,surname,given_names,institution_id,entry_year,exit_year,sds_history\n";

    #[test]
    fn roster_history_sorted() {
        let text = format!("{HEADER}R1,Rossi,Maria,U1,1999,,2004:FIS/01;2001:MAT/05\n");
        let roster = parse_roster(text.as_bytes()).unwrap();
        assert_eq!(
            roster[0].sds_history,
            [(2001, "MAT/05".to_string()), (2004, "FIS/01".to_string())]
        );
        assert_eq!(roster[0].exit_year, None);
    }

    #[test]
    fn roster_entry_after_exit() {
        let text = format!("{HEADER}R1,Rossi,Maria,U1,2006,2004,2001:MAT/05\n");
        let err = parse_roster(text.as_bytes()).unwrap_err();
        assert!(matches!(
            err,
            CorpusError::InvalidField {
                line: 2,
                field: "exit_year",
                ..
            }
        ));
    }

    #[test]
    fn roster_empty_and_bad_inputs() {
        assert!(parse_roster("".as_bytes()).unwrap().is_empty());
        assert!(parse_roster(HEADER.as_bytes()).unwrap().is_empty());
        assert!(parse_roster("id,name\nR1,x\n".as_bytes()).is_err());
        let dup = format!("{HEADER}R1,Rossi,Maria,U1,1999,,\nR1,Rossi,Marco,U1,1999,,\n");
        assert!(matches!(
            parse_roster(dup.as_bytes()).unwrap_err(),
            CorpusError::DuplicateId { .. }
        ));
        let bad_hist = format!("{HEADER}R1,Rossi,Maria,U1,1999,,2001-MAT/05\n");
        assert!(parse_roster(bad_hist.as_bytes()).is_err());
        let no_given = format!("{HEADER}R1,Rossi,,U1,1999,,\n");
        assert!(parse_roster(no_given.as_bytes()).is_err());
    }

    fn entry(entry: i32, exit: Option<i32>, hist: &[(i32, &str)]) -> RosterEntry {
        RosterEntry::new(
            "R",
            "Rossi",
            "Maria",
            "U1",
            entry,
            exit,
            hist.iter().map(|(y, c)| (*y, c.to_string())).collect(),
        )
    }

    #[test]
    fn eligibility_rules() {
        let w = WindowConfig::default();
        let roster = [
            entry(2000, None, &[]),
            entry(2002, None, &[]),
            entry(1990, Some(2004), &[]),
            entry(2001, Some(2005), &[]),
        ];
        let kept = eligible_researchers(&roster, &w);
        assert_eq!(kept.len(), 2);
        assert_eq!(kept[0].entry_year, 2000);
        assert_eq!(kept[1].entry_year, 2001);
    }

    #[test]
    fn effective_sds_rules() {
        let w = WindowConfig::default();
        let e = entry(1990, None, &[(2001, "MAT/05"), (2005, "FIS/01")]);
        assert_eq!(effective_sds(&e, &w).unwrap(), "FIS/01");
        assert_eq!(
            effective_sds(&entry(1990, None, &[(2001, "BIO/10")]), &w).unwrap(),
            "BIO/10"
        );
        assert!(matches!(
            effective_sds(&entry(1990, None, &[(2006, "FIS/01")]), &w),
            Err(CorpusError::NoSdsBefore { .. })
        ));
        assert!(matches!(
            effective_sds(&entry(1990, None, &[]), &w),
            Err(CorpusError::EmptyHistory(_))
        ));
    }

    #[test]
    fn scheme_and_affinity() {
        let text = "sds_code,sds_name,uda_code,uda_name\nFIS/01,Experimental physics,02,Physics\nFIS/03,Physics of matter,02,Physics\nMAT/05,Analysis,01,Mathematics\n";
        let mut scheme = ClassificationScheme::parse(text.as_bytes()).unwrap();
        assert_eq!(scheme.uda_of("FIS/03"), Some("02"));
        assert_eq!(scheme.udas.len(), 2);
        assert_eq!(scheme.has_affinity("PHYS", "FIS/01"), None);
        scheme
            .load_affinity("category,sds_code\nPHYS,FIS/01\nPHYS,FIS/03\n".as_bytes())
            .unwrap();
        assert_eq!(scheme.has_affinity("PHYS", "FIS/01"), Some(true));
        assert_eq!(scheme.has_affinity("MATH", "FIS/01"), Some(false));
        assert!(scheme
            .clone()
            .load_affinity("category,sds_code\nPHYS,XXX/01\n".as_bytes())
            .is_err());

        let dup = "sds_code,sds_name,uda_code,uda_name\nFIS/01,a,02,Physics\nFIS/01,b,02,Physics\n";
        assert!(ClassificationScheme::parse(dup.as_bytes()).is_err());
        let clash =
            "sds_code,sds_name,uda_code,uda_name\nFIS/01,a,02,Physics\nFIS/02,b,02,Chemistry\n";
        assert!(ClassificationScheme::parse(clash.as_bytes()).is_err());

        let mut buf = Vec::new();
        scheme.write(&mut buf).unwrap();
        let mut back = ClassificationScheme::parse(buf.as_slice()).unwrap();
        let mut aff = Vec::new();
        scheme.write_affinity(&mut aff).unwrap();
        back.load_affinity(aff.as_slice()).unwrap();
        assert_eq!(back, scheme);
    }

    #[test]
    fn unknown_category_flagged() {
        let l =
            r#"{"pub_id":"P1","year":2003,"authors":["Rossi, M"],"addresses":[],"category":"ZZZ"}"#;
        let corpus = Corpus::load(l.as_bytes()).unwrap();
        let mut scheme = ClassificationScheme::parse(
            "sds_code,sds_name,uda_code,uda_name\nFIS/01,a,02,Physics\n".as_bytes(),
        )
        .unwrap();
        assert!(corpus.unknown_categories(&scheme).is_empty());
        scheme
            .load_affinity("category,sds_code\nPHYS,FIS/01\n".as_bytes())
            .unwrap();
        assert_eq!(corpus.unknown_categories(&scheme).len(), 1);
    }
}
