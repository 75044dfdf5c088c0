//! Author-mention attribution: block on normalized surname and compatible
//! initials, score candidates on three signals, keep the best one above a
//! threshold. Quality is measured against gold labels.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::{Read, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{
    effective_sds, AuthorMention, ClassificationScheme, Corpus, PublicationRecord, RosterEntry,
    WindowConfig,
};
use crate::names::initials_compatible;

#[derive(Debug, Error)]
pub enum DisambigError {
    #[error("weights must be nonnegative and sum to 1, got {0:?}")]
    InvalidWeights([f64; 3]),
    #[error("threshold must be a finite nonnegative number, got {0}")]
    InvalidThreshold(f64),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = DisambigError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub affiliation: f64,
    pub field: f64,
    pub uniqueness: f64,
}

impl Weights {
    pub fn new(affiliation: f64, field: f64, uniqueness: f64) -> Result<Self> {
        let w = [affiliation, field, uniqueness];
        let valid = w.iter().all(|x| x.is_finite() && *x >= 0.0)
            && (w.iter().sum::<f64>() - 1.0).abs() <= 1e-9;
        if !valid {
            return Err(DisambigError::InvalidWeights(w));
        }
        Ok(Self {
            affiliation,
            field,
            uniqueness,
        })
    }

    pub fn combine(&self, s: &Signals) -> f64 {
        let raw = self.affiliation * s.affiliation
            + self.field * s.field
            + self.uniqueness * s.uniqueness;
        raw.clamp(0.0, 1.0)
    }
}

impl Default for Weights {
    fn default() -> Self {
        Self {
            affiliation: 0.5,
            field: 0.3,
            uniqueness: 0.2,
        }
    }
}

/// Case-insensitive substring patterns that identify an institution inside a
/// raw address string.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AliasTable {
    entries: Vec<(String, String)>,
}

impl AliasTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, alias: &str, institution_id: impl Into<String>) {
        self.entries
            .push((alias.to_lowercase(), institution_id.into()));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Institutions recognized anywhere in `addresses`.
    pub fn resolve<'a>(&'a self, addresses: &[String]) -> BTreeSet<&'a str> {
        let lowered: Vec<String> = addresses.iter().map(|a| a.to_lowercase()).collect();
        self.entries
            .iter()
            .filter(|(alias, _)| lowered.iter().any(|a| a.contains(alias.as_str())))
            .map(|(_, inst)| inst.as_str())
            .collect()
    }

    /// Reads `alias,institution_id` CSV.
    pub fn parse<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["alias", "institution_id"] {
            return Err(DisambigError::Malformed {
                line: 1,
                message: "expected header `alias,institution_id`".into(),
            });
        }
        let mut table = Self::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
            match (rec.get(0), rec.get(1)) {
                (Some(a), Some(i)) if !a.is_empty() && !i.is_empty() => table.insert(a, i),
                _ => {
                    return Err(DisambigError::Malformed {
                        line,
                        message: "alias and institution_id are required".into(),
                    })
                }
            }
        }
        Ok(table)
    }

    pub fn write<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["alias", "institution_id"])?;
        for (a, i) in &self.entries {
            wtr.write_record([a, i])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisambigConfig {
    pub threshold: f64,
    pub weights: Weights,
    pub alias_table: AliasTable,
}

impl DisambigConfig {
    pub const DEFAULT_THRESHOLD: f64 = 0.5;

    pub fn new(threshold: f64, weights: Weights, alias_table: AliasTable) -> Result<Self> {
        if !(threshold.is_finite() && threshold >= 0.0) {
            return Err(DisambigError::InvalidThreshold(threshold));
        }
        Ok(Self {
            threshold,
            weights,
            alias_table,
        })
    }

    pub fn with_aliases(alias_table: AliasTable) -> Self {
        Self {
            alias_table,
            ..Self::default()
        }
    }
}

impl Default for DisambigConfig {
    fn default() -> Self {
        Self {
            threshold: Self::DEFAULT_THRESHOLD,
            weights: Weights::default(),
            alias_table: AliasTable::new(),
        }
    }
}

/// The three per-candidate signals, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Signals {
    pub affiliation: f64,
    pub field: f64,
    pub uniqueness: f64,
}

/// Roster entries whose normalized surname equals the mention's and whose
/// initials are compatible with it.
pub fn block<'a>(mention: &AuthorMention, roster: &'a [RosterEntry]) -> Vec<&'a RosterEntry> {
    roster
        .iter()
        .filter(|e| {
            e.surname_norm == mention.surname_norm
                && initials_compatible(&mention.initials, &e.initials)
        })
        .collect()
}

/// SDS used for the field signal: the window-end assignment, or the earliest
/// recorded one for researchers who only joined a field afterwards.
fn candidate_sds<'a>(entry: &'a RosterEntry, window: &WindowConfig) -> Option<&'a str> {
    effective_sds(entry, window)
        .ok()
        .or_else(|| entry.sds_history.first().map(|(_, c)| c.as_str()))
}

fn field_signal(category: &str, sds: Option<&str>, scheme: &ClassificationScheme) -> f64 {
    if scheme.category_affinity.is_none() {
        return 0.5;
    }
    match sds.and_then(|s| scheme.has_affinity(category, s)) {
        Some(true) => 1.0,
        _ => 0.0,
    }
}

pub fn signals(
    candidate: &RosterEntry,
    n_candidates: usize,
    record: &PublicationRecord,
    scheme: &ClassificationScheme,
    config: &DisambigConfig,
    window: &WindowConfig,
) -> Signals {
    let institutions = config.alias_table.resolve(&record.addresses);
    signals_with(
        candidate,
        n_candidates,
        record,
        &institutions,
        scheme,
        window,
    )
}

fn signals_with(
    candidate: &RosterEntry,
    n_candidates: usize,
    record: &PublicationRecord,
    institutions: &BTreeSet<&str>,
    scheme: &ClassificationScheme,
    window: &WindowConfig,
) -> Signals {
    Signals {
        affiliation: if institutions.contains(candidate.institution_id.as_str()) {
            1.0
        } else {
            0.0
        },
        field: field_signal(&record.category, candidate_sds(candidate, window), scheme),
        uniqueness: 1.0 / n_candidates.max(1) as f64,
    }
}

/// Weighted score of one blocked candidate for a mention on `record`;
/// `n_candidates` is the size of the mention's block.
pub fn score_match(
    candidate: &RosterEntry,
    n_candidates: usize,
    record: &PublicationRecord,
    scheme: &ClassificationScheme,
    config: &DisambigConfig,
    window: &WindowConfig,
) -> f64 {
    config.weights.combine(&signals(
        candidate,
        n_candidates,
        record,
        scheme,
        config,
        window,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attribution {
    pub pub_id: String,
    pub mention_position: usize,
    pub researcher_id: String,
    pub score: f64,
}

/// A mention left unattributed. `best_score` is `None` when blocking found no
/// candidate at all.
#[derive(Debug, Clone, PartialEq)]
pub struct Residue {
    pub pub_id: String,
    pub mention_position: usize,
    pub best_score: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AttributionTable {
    /// Sorted by `(pub_id, mention_position)`.
    pub attributions: Vec<Attribution>,
    pub residue: Vec<Residue>,
}

/// Surname-keyed view of the roster for fast blocking.
pub struct RosterIndex<'a> {
    by_surname: HashMap<&'a str, Vec<&'a RosterEntry>>,
}

impl<'a> RosterIndex<'a> {
    pub fn new(roster: &'a [RosterEntry]) -> Self {
        let mut by_surname: HashMap<&str, Vec<&RosterEntry>> = HashMap::new();
        for e in roster {
            by_surname
                .entry(e.surname_norm.as_str())
                .or_default()
                .push(e);
        }
        for group in by_surname.values_mut() {
            group.sort_by(|a, b| a.researcher_id.cmp(&b.researcher_id));
        }
        Self { by_surname }
    }

    pub fn block(&self, mention: &AuthorMention) -> Vec<&'a RosterEntry> {
        self.by_surname
            .get(mention.surname_norm.as_str())
            .map(|group| {
                group
                    .iter()
                    .copied()
                    .filter(|e| initials_compatible(&mention.initials, &e.initials))
                    .collect()
            })
            .unwrap_or_default()
    }
}

fn attribute_record(
    record: &PublicationRecord,
    index: &RosterIndex<'_>,
    scheme: &ClassificationScheme,
    config: &DisambigConfig,
    window: &WindowConfig,
) -> (Vec<Attribution>, Vec<Residue>) {
    let institutions = config.alias_table.resolve(&record.addresses);
    let mut pairs: Vec<(f64, usize, &RosterEntry)> = Vec::new();
    let mut best: Vec<Option<f64>> = vec![None; record.mentions.len()];
    for (slot, mention) in record.mentions.iter().enumerate() {
        let candidates = index.block(mention);
        for c in &candidates {
            let s = signals_with(c, candidates.len(), record, &institutions, scheme, window);
            let score = config.weights.combine(&s);
            best[slot] = Some(best[slot].map_or(score, |b: f64| b.max(score)));
            pairs.push((score, slot, c));
        }
    }
    // Best pairs first; a researcher takes at most one mention per record.
    pairs.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then(a.1.cmp(&b.1))
            .then_with(|| a.2.researcher_id.cmp(&b.2.researcher_id))
    });
    let mut taken_mentions = vec![false; record.mentions.len()];
    let mut taken_researchers: HashSet<&str> = HashSet::new();
    let mut attributions = Vec::new();
    for (score, slot, entry) in pairs {
        if score < config.threshold || taken_mentions[slot] {
            continue;
        }
        if !taken_researchers.insert(entry.researcher_id.as_str()) {
            continue;
        }
        taken_mentions[slot] = true;
        attributions.push(Attribution {
            pub_id: record.pub_id.clone(),
            mention_position: record.mentions[slot].position,
            researcher_id: entry.researcher_id.clone(),
            score,
        });
    }
    let residue = taken_mentions
        .iter()
        .enumerate()
        .filter(|(_, t)| !**t)
        .map(|(slot, _)| Residue {
            pub_id: record.pub_id.clone(),
            mention_position: record.mentions[slot].position,
            best_score: best[slot],
        })
        .collect();
    (attributions, residue)
}

/// Attributes every mention in the corpus. Records are processed in
/// parallel; the output is sorted by `(pub_id, mention_position)`.
pub fn attribute(
    corpus: &Corpus,
    roster: &[RosterEntry],
    scheme: &ClassificationScheme,
    config: &DisambigConfig,
    window: &WindowConfig,
) -> AttributionTable {
    let index = RosterIndex::new(roster);
    let per_record: Vec<_> = corpus
        .records()
        .par_iter()
        .map(|r| attribute_record(r, &index, scheme, config, window))
        .collect();
    let mut table = AttributionTable::default();
    for (a, r) in per_record {
        table.attributions.extend(a);
        table.residue.extend(r);
    }
    table
        .attributions
        .sort_by(|a, b| (&a.pub_id, a.mention_position).cmp(&(&b.pub_id, b.mention_position)));
    table
        .residue
        .sort_by(|a, b| (&a.pub_id, a.mention_position).cmp(&(&b.pub_id, b.mention_position)));
    table
}

/// `(pub_id, mention_position, researcher_id)`.
pub type Link = (String, usize, String);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub true_positive: usize,
    pub false_positive: usize,
    pub false_negative: usize,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Scores attributions against gold links. Mentions absent from `gold` are
/// true non-links. Precision is 0 when nothing was attributed; two empty
/// sets agree perfectly.
pub fn evaluate(attributions: &[Attribution], gold: &HashSet<Link>) -> EvalReport {
    let predicted: HashSet<Link> = attributions
        .iter()
        .map(|a| {
            (
                a.pub_id.clone(),
                a.mention_position,
                a.researcher_id.clone(),
            )
        })
        .collect();
    let tp = predicted.intersection(gold).count();
    let fp = predicted.len() - tp;
    let fn_ = gold.len() - tp;
    if predicted.is_empty() && gold.is_empty() {
        return EvalReport {
            true_positive: 0,
            false_positive: 0,
            false_negative: 0,
            precision: 1.0,
            recall: 1.0,
            f_measure: 1.0,
        };
    }
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    EvalReport {
        true_positive: tp,
        false_positive: fp,
        false_negative: fn_,
        precision,
        recall,
        f_measure: f_measure(precision, recall),
    }
}

fn line_of(rec: &csv::StringRecord) -> usize {
    rec.position().map(|p| p.line() as usize).unwrap_or(0)
}

fn parse_position(s: &str, line: usize) -> Result<usize> {
    s.parse().map_err(|_| DisambigError::Malformed {
        line,
        message: format!("`{s}` is not a mention position"),
    })
}

fn expect_header(rdr: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<bool> {
    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        return Ok(false);
    }
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(DisambigError::Malformed {
            line: 1,
            message: format!("expected header `{}`", expected.join(",")),
        });
    }
    Ok(true)
}

/// Reads `pub_id,mention_position,researcher_id` gold labels.
pub fn parse_gold<R: Read>(reader: R) -> Result<HashSet<Link>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = HashSet::new();
    if !expect_header(&mut rdr, &["pub_id", "mention_position", "researcher_id"])? {
        return Ok(out);
    }
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let pos = parse_position(rec.get(1).unwrap_or(""), line)?;
        out.insert((
            rec.get(0).unwrap_or("").to_string(),
            pos,
            rec.get(2).unwrap_or("").to_string(),
        ));
    }
    Ok(out)
}

pub fn write_gold<W: Write>(links: &[Link], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["pub_id", "mention_position", "researcher_id"])?;
    for (p, m, r) in links {
        wtr.write_record([p.as_str(), &m.to_string(), r.as_str()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_attributions<W: Write>(attributions: &[Attribution], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["pub_id", "mention_position", "researcher_id", "score"])?;
    for a in attributions {
        wtr.write_record([
            a.pub_id.as_str(),
            &a.mention_position.to_string(),
            a.researcher_id.as_str(),
            &format!("{:.4}", a.score),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn parse_attributions<R: Read>(reader: R) -> Result<Vec<Attribution>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    if !expect_header(
        &mut rdr,
        &["pub_id", "mention_position", "researcher_id", "score"],
    )? {
        return Ok(out);
    }
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let score = rec.get(3).unwrap_or("");
        out.push(Attribution {
            pub_id: rec.get(0).unwrap_or("").to_string(),
            mention_position: parse_position(rec.get(1).unwrap_or(""), line)?,
            researcher_id: rec.get(2).unwrap_or("").to_string(),
            score: score.parse().map_err(|_| DisambigError::Malformed {
                line,
                message: format!("`{score}` is not a score"),
            })?,
        });
    }
    Ok(out)
}

pub fn write_residue<W: Write>(residue: &[Residue], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["pub_id", "mention_position", "best_score"])?;
    for r in residue {
        wtr.write_record([
            r.pub_id.as_str(),
            &r.mention_position.to_string(),
            &r.best_score.map(|s| format!("{s:.4}")).unwrap_or_default(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
