//! Deterministic synthetic corpora with gold attribution labels.
//!
//! A fixed seed reproduces every emitted file byte for byte. Fields differ in
//! publication rate and citation skew; surnames are drawn so that a
//! controlled share of researchers has a namesake.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use chrono::{Datelike, Days, NaiveDate};
use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{LogNormal, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{
    citations_at, write_publications, write_roster, AuthorMention, ClassificationScheme, Corpus,
    PublicationRecord, RosterEntry, SdsInfo, WindowConfig,
};
use crate::disambig::{write_gold, AliasTable, Link};
use crate::indices::FieldBaseline;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("homonym rate {rate} cannot be met within one percentage point for {population} researchers")]
    InfeasibleHomonymRate { rate: f64, population: usize },
    #[error("invalid synth config: {0}")]
    InvalidConfig(String),
    #[error("could not draw {0} distinct surnames")]
    SurnamePoolExhausted(usize),
}

/// One scientific disciplinary sector and its publication/citation regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub sds_code: String,
    pub sds_name: String,
    pub uda_code: String,
    pub uda_name: String,
    pub n_researchers: usize,
    /// Mean lead-authored papers per researcher-year.
    pub pubs_per_year: f64,
    /// Lognormal location/shape of a paper's eventual citation total.
    pub citation_mu: f64,
    pub citation_sigma: f64,
    /// Share of researchers who never publish.
    pub inactive_share: f64,
    /// Journal subject categories typical for this SDS.
    pub categories: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub window: WindowConfig,
    pub fields: Vec<FieldSpec>,
    /// Relative weights of 1, 2, 3, ... authors per paper.
    pub coauthor_weights: Vec<f64>,
    pub homonym_rate: f64,
    pub n_institutions: usize,
    pub late_entry_share: f64,
    pub early_exit_share: f64,
    pub sds_change_share: f64,
    /// Share of co-authors drawn from outside the lead author's SDS.
    pub cross_field_share: f64,
    /// Share of papers published in a category outside the lead's SDS.
    pub off_field_share: f64,
    /// Share of author institutions left out of a paper's address list.
    pub missing_address_share: f64,
    /// Share of bylines that keep only the first initial.
    pub truncated_initials_share: f64,
    /// Share of papers that carry a citation count instead of dated events.
    pub snapshot_share: f64,
}

struct Preset {
    sds: &'static str,
    name: &'static str,
    uda: &'static str,
    weight: f64,
    rate: f64,
    mu: f64,
    sigma: f64,
    inactive: f64,
    categories: &'static [&'static str],
}

const UDAS: [(&str, &str); 9] = [
    ("01", "Mathematics and computer sciences"),
    ("02", "Physics"),
    ("03", "Chemistry"),
    ("04", "Earth sciences"),
    ("05", "Biology"),
    ("06", "Medicine"),
    ("07", "Agricultural and veterinary sciences"),
    ("08", "Civil engineering and architecture"),
    ("09", "Industrial and information engineering"),
];

const PRESETS: &[Preset] = &[
    Preset {
        sds: "MAT/02",
        name: "Algebra",
        uda: "01",
        weight: 2.0,
        rate: 0.45,
        mu: 0.7,
        sigma: 1.0,
        inactive: 0.25,
        categories: &["MATHEMATICS"],
    },
    Preset {
        sds: "MAT/05",
        name: "Mathematical analysis",
        uda: "01",
        weight: 4.0,
        rate: 0.5,
        mu: 0.8,
        sigma: 1.0,
        inactive: 0.2,
        categories: &["MATHEMATICS", "MATHEMATICS, APPLIED"],
    },
    Preset {
        sds: "INF/01",
        name: "Computer science",
        uda: "01",
        weight: 3.0,
        rate: 0.6,
        mu: 0.9,
        sigma: 1.1,
        inactive: 0.2,
        categories: &["COMPUTER SCIENCE, THEORY & METHODS"],
    },
    Preset {
        sds: "FIS/01",
        name: "Experimental physics",
        uda: "02",
        weight: 7.0,
        rate: 0.9,
        mu: 1.7,
        sigma: 1.1,
        inactive: 0.08,
        categories: &["PHYSICS, PARTICLES & FIELDS", "PHYSICS, NUCLEAR"],
    },
    Preset {
        sds: "FIS/03",
        name: "Physics of matter",
        uda: "02",
        weight: 3.5,
        rate: 1.0,
        mu: 1.9,
        sigma: 1.0,
        inactive: 0.06,
        categories: &["PHYSICS, CONDENSED MATTER", "PHYSICS, APPLIED"],
    },
    Preset {
        sds: "FIS/05",
        name: "Astronomy and astrophysics",
        uda: "02",
        weight: 1.5,
        rate: 1.0,
        mu: 2.0,
        sigma: 1.2,
        inactive: 0.08,
        categories: &["ASTRONOMY & ASTROPHYSICS"],
    },
    Preset {
        sds: "CHIM/02",
        name: "Physical chemistry",
        uda: "03",
        weight: 4.0,
        rate: 1.0,
        mu: 2.0,
        sigma: 1.0,
        inactive: 0.05,
        categories: &["CHEMISTRY, PHYSICAL"],
    },
    Preset {
        sds: "CHIM/03",
        name: "General and inorganic chemistry",
        uda: "03",
        weight: 4.0,
        rate: 1.0,
        mu: 1.9,
        sigma: 1.0,
        inactive: 0.05,
        categories: &[
            "CHEMISTRY, INORGANIC & NUCLEAR",
            "CHEMISTRY, MULTIDISCIPLINARY",
        ],
    },
    Preset {
        sds: "GEO/04",
        name: "Physical geography and geomorphology",
        uda: "04",
        weight: 1.5,
        rate: 0.5,
        mu: 1.2,
        sigma: 1.0,
        inactive: 0.2,
        categories: &["GEOGRAPHY, PHYSICAL"],
    },
    Preset {
        sds: "GEO/08",
        name: "Geochemistry and volcanology",
        uda: "04",
        weight: 1.5,
        rate: 0.6,
        mu: 1.3,
        sigma: 1.0,
        inactive: 0.15,
        categories: &["GEOCHEMISTRY & GEOPHYSICS"],
    },
    Preset {
        sds: "BIO/10",
        name: "Biochemistry",
        uda: "05",
        weight: 5.0,
        rate: 0.9,
        mu: 2.0,
        sigma: 1.1,
        inactive: 0.07,
        categories: &["BIOCHEMISTRY & MOLECULAR BIOLOGY"],
    },
    Preset {
        sds: "BIO/13",
        name: "Experimental biology",
        uda: "05",
        weight: 3.0,
        rate: 0.8,
        mu: 1.8,
        sigma: 1.1,
        inactive: 0.1,
        categories: &["CELL BIOLOGY", "BIOLOGY"],
    },
    Preset {
        sds: "MED/04",
        name: "Experimental medicine and pathophysiology",
        uda: "06",
        weight: 4.0,
        rate: 0.9,
        mu: 1.9,
        sigma: 1.2,
        inactive: 0.1,
        categories: &["PATHOLOGY", "MEDICINE, RESEARCH & EXPERIMENTAL"],
    },
    Preset {
        sds: "MED/09",
        name: "Internal medicine",
        uda: "06",
        weight: 6.0,
        rate: 0.8,
        mu: 1.8,
        sigma: 1.2,
        inactive: 0.12,
        categories: &["MEDICINE, GENERAL & INTERNAL"],
    },
    Preset {
        sds: "MED/36",
        name: "Diagnostic imaging and radiotherapy",
        uda: "06",
        weight: 3.0,
        rate: 0.7,
        mu: 1.6,
        sigma: 1.1,
        inactive: 0.15,
        categories: &["RADIOLOGY, NUCLEAR MEDICINE & MEDICAL IMAGING"],
    },
    Preset {
        sds: "AGR/01",
        name: "Agricultural economics",
        uda: "07",
        weight: 1.5,
        rate: 0.4,
        mu: 0.9,
        sigma: 1.0,
        inactive: 0.3,
        categories: &["AGRICULTURAL ECONOMICS & POLICY"],
    },
    Preset {
        sds: "AGR/13",
        name: "Agricultural chemistry",
        uda: "07",
        weight: 2.0,
        rate: 0.7,
        mu: 1.4,
        sigma: 1.0,
        inactive: 0.12,
        categories: &["AGRONOMY", "SOIL SCIENCE"],
    },
    Preset {
        sds: "ICAR/01",
        name: "Hydraulics",
        uda: "08",
        weight: 1.0,
        rate: 0.5,
        mu: 1.0,
        sigma: 1.0,
        inactive: 0.2,
        categories: &["WATER RESOURCES"],
    },
    Preset {
        sds: "ICAR/08",
        name: "Structural mechanics",
        uda: "08",
        weight: 1.5,
        rate: 0.5,
        mu: 1.0,
        sigma: 1.0,
        inactive: 0.2,
        categories: &["MECHANICS", "ENGINEERING, CIVIL"],
    },
    Preset {
        sds: "ICAR/18",
        name: "History of architecture",
        uda: "08",
        weight: 0.8,
        rate: 0.15,
        mu: 0.3,
        sigma: 0.8,
        inactive: 0.75,
        categories: &["ARCHITECTURE"],
    },
    Preset {
        sds: "ING-INF/03",
        name: "Telecommunications",
        uda: "09",
        weight: 3.0,
        rate: 0.7,
        mu: 1.2,
        sigma: 1.1,
        inactive: 0.15,
        categories: &["TELECOMMUNICATIONS", "ENGINEERING, ELECTRICAL & ELECTRONIC"],
    },
    Preset {
        sds: "ING-IND/22",
        name: "Materials science and technology",
        uda: "09",
        weight: 2.5,
        rate: 0.8,
        mu: 1.3,
        sigma: 1.0,
        inactive: 0.12,
        categories: &["MATERIALS SCIENCE, MULTIDISCIPLINARY"],
    },
];

const CITIES: [&str; 40] = [
    "Ancona", "Bari", "Bergamo", "Bologna", "Brescia", "Cagliari", "Camerino", "Catania",
    "Ferrara", "Firenze", "Foggia", "Genova", "Lecce", "Macerata", "Messina", "Milano", "Modena",
    "Napoli", "Padova", "Palermo", "Parma", "Pavia", "Perugia", "Pisa", "Potenza", "Roma",
    "Salerno", "Sassari", "Siena", "Teramo", "Torino", "Trento", "Trieste", "Udine", "Urbino",
    "Venezia", "Verona", "Viterbo", "Chieti", "Insubria",
];

const DEPARTMENTS: [&str; 6] = ["Dipartimento", "Dept", "Dip Sci", "Ist", "Lab", "Fac"];

const GIVEN_NAMES: [&str; 48] = [
    "Maria",
    "Marco",
    "Mario",
    "Anna",
    "Andrea",
    "Alessandro",
    "Alessandra",
    "Antonio",
    "Angela",
    "Giuseppe",
    "Giovanni",
    "Giulia",
    "Francesco",
    "Francesca",
    "Luca",
    "Laura",
    "Lucia",
    "Paolo",
    "Paola",
    "Roberto",
    "Roberta",
    "Stefano",
    "Stefania",
    "Carlo",
    "Chiara",
    "Davide",
    "Daniela",
    "Elena",
    "Emanuele",
    "Fabio",
    "Federica",
    "Giorgio",
    "Ilaria",
    "Lorenzo",
    "Massimo",
    "Matteo",
    "Michele",
    "Nicola",
    "Pietro",
    "Raffaele",
    "Sara",
    "Silvia",
    "Simone",
    "Valentina",
    "Vincenzo",
    "Enrico",
    "Nicolò",
    "Élena",
];

const SYL_HEAD: [&str; 30] = [
    "Ro", "Bian", "Ver", "Fer", "Es", "Ric", "Col", "Ma", "Lu", "Gal", "Con", "Mo", "Cos", "Bru",
    "Fon", "Ca", "Gi", "Pel", "Ser", "Vi", "Sa", "Mar", "Ba", "Pa", "Le", "Tor", "Ne", "Fa", "Ri",
    "Zan",
];
const SYL_MID: [&str; 22] = [
    "ra", "ri", "ro", "na", "ne", "ni", "li", "le", "ta", "to", "ti", "ca", "co", "gi", "ge",
    "del", "bar", "ren", "van", "sel", "mon", "gan",
];
const SYL_TAIL: [&str; 23] = [
    "ssi", "nchi", "rdi", "rrari", "posito", "cci", "lombo", "ncini", "tti", "lli", "nti", "rini",
    "sta", "no", "ni", "ri", "ro", "lo", "li", "gna", "sca", "ddu", "zzi",
];
const SURNAME_PREFIXES: [&str; 5] = ["De ", "D'", "Di ", "La ", "Lo "];

/// Largest-remainder split of `total` over the preset weights.
fn apportion(total: usize, presets: &[Preset]) -> Vec<usize> {
    let weight: f64 = presets.iter().map(|p| p.weight).sum();
    let quotas: Vec<f64> = presets
        .iter()
        .map(|p| total as f64 * p.weight / weight)
        .collect();
    let mut sizes: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..presets.len()).collect();
    order.sort_by(|&a, &b| {
        (quotas[b] - quotas[b].floor())
            .total_cmp(&(quotas[a] - quotas[a].floor()))
            .then(a.cmp(&b))
    });
    let assigned: usize = sizes.iter().sum();
    for &i in order.iter().take(total - assigned) {
        sizes[i] += 1;
    }
    sizes
}

impl SynthConfig {
    /// A nine-area, 22-sector preset with exactly `total_researchers`.
    pub fn preset(seed: u64, total_researchers: usize) -> Self {
        let uda_name = |code: &str| {
            UDAS.iter()
                .find(|(c, _)| *c == code)
                .map(|(_, n)| *n)
                .unwrap_or("")
        };
        let sizes = apportion(total_researchers, PRESETS);
        let fields = PRESETS
            .iter()
            .zip(sizes)
            .map(|(p, n_researchers)| FieldSpec {
                sds_code: p.sds.into(),
                sds_name: p.name.into(),
                uda_code: p.uda.into(),
                uda_name: uda_name(p.uda).into(),
                n_researchers,
                pubs_per_year: p.rate,
                citation_mu: p.mu,
                citation_sigma: p.sigma,
                inactive_share: p.inactive,
                categories: p.categories.iter().map(|c| c.to_string()).collect(),
            })
            .collect();
        Self {
            seed,
            window: WindowConfig::default(),
            fields,
            coauthor_weights: vec![0.15, 0.25, 0.25, 0.15, 0.1, 0.1],
            homonym_rate: 0.12,
            n_institutions: 40,
            late_entry_share: 0.12,
            early_exit_share: 0.08,
            sds_change_share: 0.05,
            cross_field_share: 0.2,
            off_field_share: 0.1,
            missing_address_share: 0.05,
            truncated_initials_share: 0.3,
            snapshot_share: 0.05,
        }
    }

    pub fn total_researchers(&self) -> usize {
        self.fields.iter().map(|f| f.n_researchers).sum()
    }

    fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidConfig(m));
        if !(0.0..1.0).contains(&self.homonym_rate) {
            return bad(format!("homonym_rate {} outside [0, 1)", self.homonym_rate));
        }
        if self.fields.is_empty() {
            return bad("no fields".into());
        }
        if self.n_institutions == 0 || self.n_institutions > CITIES.len() {
            return bad(format!("n_institutions must be in 1..={}", CITIES.len()));
        }
        if self.coauthor_weights.is_empty()
            || self
                .coauthor_weights
                .iter()
                .any(|w| !w.is_finite() || *w < 0.0)
        {
            return bad("coauthor_weights must be nonnegative and nonempty".into());
        }
        let shares = [
            self.late_entry_share,
            self.early_exit_share,
            self.sds_change_share,
            self.cross_field_share,
            self.off_field_share,
            self.missing_address_share,
            self.truncated_initials_share,
            self.snapshot_share,
        ];
        if shares.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return bad("shares must lie in [0, 1]".into());
        }
        let mut codes = HashSet::new();
        for f in &self.fields {
            if !codes.insert(&f.sds_code) {
                return bad(format!("duplicate SDS `{}`", f.sds_code));
            }
            if !(f.pubs_per_year >= 0.0 && f.citation_sigma >= 0.0 && f.citation_mu.is_finite()) {
                return bad(format!("{}: rates must be nonnegative", f.sds_code));
            }
            if !(0.0..=1.0).contains(&f.inactive_share) || f.categories.is_empty() {
                return bad(format!(
                    "{}: invalid inactive_share or categories",
                    f.sds_code
                ));
            }
        }
        Ok(())
    }
}

/// Everything `generate` emits.
#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub publications: Vec<PublicationRecord>,
    pub roster: Vec<RosterEntry>,
    pub gold: Vec<Link>,
    pub baselines: FieldBaseline,
    pub scheme: ClassificationScheme,
    pub aliases: AliasTable,
}

pub const PUBLICATIONS_FILE: &str = "publications.jsonl";
pub const ROSTER_FILE: &str = "roster.csv";
pub const CLASSIFICATION_FILE: &str = "classification.csv";
pub const AFFINITY_FILE: &str = "affinity.csv";
pub const ALIASES_FILE: &str = "aliases.csv";
pub const GOLD_FILE: &str = "gold.csv";
pub const BASELINES_FILE: &str = "baselines.csv";

impl SynthOutput {
    /// Serialized files as `(file name, bytes)`, in a fixed order.
    pub fn files(&self) -> Vec<(&'static str, Vec<u8>)> {
        let mut pubs = Vec::new();
        write_publications(&self.publications, &mut pubs).expect("in-memory write");
        let mut roster = Vec::new();
        write_roster(&self.roster, &mut roster).expect("in-memory write");
        let mut classification = Vec::new();
        self.scheme
            .write(&mut classification)
            .expect("in-memory write");
        let mut affinity = Vec::new();
        self.scheme
            .write_affinity(&mut affinity)
            .expect("in-memory write");
        let mut aliases = Vec::new();
        self.aliases.write(&mut aliases).expect("in-memory write");
        let mut gold = Vec::new();
        write_gold(&self.gold, &mut gold).expect("in-memory write");
        let mut baselines = Vec::new();
        self.baselines
            .write(&mut baselines)
            .expect("in-memory write");
        vec![
            (PUBLICATIONS_FILE, pubs),
            (ROSTER_FILE, roster),
            (CLASSIFICATION_FILE, classification),
            (AFFINITY_FILE, affinity),
            (ALIASES_FILE, aliases),
            (GOLD_FILE, gold),
            (BASELINES_FILE, baselines),
        ]
    }
}

/// Number of researchers placed in namesake groups: the closest integer to
/// `rate · n` that is not 1, provided it lands within one point of `rate`.
fn homonym_count(rate: f64, n: usize) -> Result<usize, SynthError> {
    if n == 0 || rate == 0.0 {
        return Ok(0);
    }
    let target = rate * n as f64;
    let lo = target.floor() as usize;
    let candidates = [lo, lo + 1];
    candidates
        .into_iter()
        .filter(|h| *h != 1 && *h <= n)
        .map(|h| (h, (h as f64 / n as f64 - rate).abs()))
        .filter(|(_, dev)| *dev <= 0.01)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(h, _)| h)
        .ok_or(SynthError::InfeasibleHomonymRate {
            rate,
            population: n,
        })
}

fn group_sizes(h: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut left = h;
    while left > 0 {
        let size = if left == 3 || (left >= 5 && rng.random_bool(0.2)) {
            3
        } else {
            2
        };
        sizes.push(size);
        left -= size;
    }
    sizes
}

fn draw_surname(rng: &mut ChaCha8Rng) -> String {
    let mut s = String::new();
    if rng.random_bool(0.08) {
        s.push_str(SURNAME_PREFIXES.choose(rng).expect("nonempty"));
    }
    s.push_str(SYL_HEAD.choose(rng).expect("nonempty"));
    for _ in 0..rng.random_range(0..=2) {
        s.push_str(SYL_MID.choose(rng).expect("nonempty"));
    }
    s.push_str(SYL_TAIL.choose(rng).expect("nonempty"));
    if rng.random_bool(0.03) && s.ends_with('o') {
        s.pop();
        s.push('ò');
    }
    s
}

/// `count` surnames, pairwise distinct after normalization.
fn surname_pool(count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<String>, SynthError> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 50 * count + 1000 {
            return Err(SynthError::SurnamePoolExhausted(count));
        }
        let s = draw_surname(rng);
        if seen.insert(crate::names::normalize_surname(&s)) {
            out.push(s);
        }
    }
    Ok(out)
}

fn byline_initials(given: &str, truncate: bool) -> String {
    let initials = crate::names::initials_of_given_names(given);
    let take = if truncate { 1 } else { initials.len() };
    initials.into_iter().take(take).collect()
}

fn institution_name(idx: usize) -> &'static str {
    CITIES[idx]
}

fn address_for(inst: usize, rng: &mut ChaCha8Rng) -> String {
    let city = institution_name(inst);
    let variant = match rng.random_range(0..3) {
        0 => format!("Univ {city}"),
        1 => format!("Universita {city}"),
        _ => format!("University of {city}"),
    };
    let dept = DEPARTMENTS.choose(rng).expect("nonempty");
    format!(
        "{dept}, {variant}, I-{:05} {city}, Italy",
        rng.random_range(100..99999)
    )
}

fn institution_id(idx: usize) -> String {
    format!("U{:02}", idx + 1)
}

struct Researcher {
    entry: RosterEntry,
    field: usize,
    institution: usize,
    active_from: i32,
    active_to: i32,
    publishes: bool,
}

fn random_date(start: NaiveDate, end: NaiveDate, rng: &mut ChaCha8Rng) -> NaiveDate {
    let span = (end - start).num_days().max(0) as u64;
    start + Days::new(rng.random_range(0..=span))
}

/// Generates a corpus, roster, gold labels and baselines from `config`.
pub fn generate(config: &SynthConfig) -> Result<SynthOutput, SynthError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let window = config.window;
    let n = config.total_researchers();
    let gen_start = window.start_year - 1;
    let gen_end = window.end_year + 1;

    // Surnames: namesake groups plus unique names, shuffled over researchers.
    let h = homonym_count(config.homonym_rate, n)?;
    let sizes = group_sizes(h, &mut rng);
    let pool = surname_pool(sizes.len() + (n - h), &mut rng)?;
    let mut surnames: Vec<&str> = Vec::with_capacity(n);
    for (size, name) in sizes.iter().zip(&pool) {
        surnames.extend(std::iter::repeat_n(name.as_str(), *size));
    }
    surnames.extend(pool[sizes.len()..].iter().map(String::as_str));
    surnames.shuffle(&mut rng);

    let width = n.to_string().len().max(4);
    let all_sds: Vec<&str> = config.fields.iter().map(|f| f.sds_code.as_str()).collect();
    let mut researchers = Vec::with_capacity(n);
    let mut idx = 0;
    for (field_idx, field) in config.fields.iter().enumerate() {
        for _ in 0..field.n_researchers {
            let surname = surnames[idx];
            idx += 1;
            let id = format!("R{:0width$}", idx, width = width);
            let first = *GIVEN_NAMES.choose(&mut rng).expect("nonempty");
            let given = if rng.random_bool(0.3) {
                let second = GIVEN_NAMES
                    .iter()
                    .filter(|g| g.chars().next() != first.chars().next())
                    .choose(&mut rng)
                    .expect("nonempty");
                format!("{first} {second}")
            } else {
                first.to_string()
            };
            let institution = rng.random_range(0..config.n_institutions);
            let entry_year = if rng.random_bool(config.late_entry_share) {
                rng.random_range(window.start_year + 1..=window.end_year + 1)
            } else {
                rng.random_range(1970..=window.start_year)
            };
            let exit_year = if rng.random_bool(config.early_exit_share) {
                let lo = entry_year.max(window.start_year);
                (lo < window.end_year).then(|| rng.random_range(lo..window.end_year))
            } else {
                None
            };
            let history = if rng.random_bool(config.sds_change_share) && all_sds.len() > 1 {
                let other = all_sds
                    .iter()
                    .filter(|s| **s != field.sds_code)
                    .choose(&mut rng)
                    .expect("at least two fields");
                let switch = rng.random_range(
                    entry_year.max(window.start_year) + 1..=window.end_year.max(entry_year + 1),
                );
                vec![
                    (entry_year, other.to_string()),
                    (switch, field.sds_code.clone()),
                ]
            } else {
                vec![(entry_year, field.sds_code.clone())]
            };
            let entry = RosterEntry::new(
                id,
                surname,
                given,
                institution_id(institution),
                entry_year,
                exit_year,
                history,
            );
            researchers.push(Researcher {
                active_from: entry_year.max(gen_start),
                active_to: exit_year.unwrap_or(gen_end).min(gen_end),
                publishes: !rng.random_bool(field.inactive_share),
                entry,
                field: field_idx,
                institution,
            });
        }
    }

    // Co-author pools per field, researchers who publish at all.
    let mut field_pool: Vec<Vec<usize>> = vec![Vec::new(); config.fields.len()];
    let mut global_pool = Vec::new();
    for (i, r) in researchers.iter().enumerate() {
        if r.publishes {
            field_pool[r.field].push(i);
            global_pool.push(i);
        }
    }
    let all_categories: Vec<&str> = config
        .fields
        .iter()
        .flat_map(|f| f.categories.iter().map(String::as_str))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let authors_dist = WeightedIndex::new(&config.coauthor_weights)
        .map_err(|e| SynthError::InvalidConfig(format!("coauthor_weights: {e}")))?;
    let citation_dists = config
        .fields
        .iter()
        .map(|f| {
            LogNormal::new(f.citation_mu, f.citation_sigma)
                .map_err(|e| SynthError::InvalidConfig(format!("{}: {e}", f.sds_code)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let obs = window.observation_date;
    let horizon = obs + Days::new(730);

    let mut publications = Vec::new();
    let mut gold = Vec::new();
    for lead in 0..researchers.len() {
        let r = &researchers[lead];
        if !r.publishes || r.active_from > r.active_to {
            continue;
        }
        let field = &config.fields[r.field];
        let per_year = if field.pubs_per_year > 0.0 {
            Some(Poisson::new(field.pubs_per_year).expect("positive rate"))
        } else {
            None
        };
        for year in r.active_from..=r.active_to {
            let count = per_year.as_ref().map_or(0, |d| d.sample(&mut rng) as usize);
            for _ in 0..count {
                let n_authors = authors_dist.sample(&mut rng) + 1;
                let mut team = vec![lead];
                for _ in 1..n_authors {
                    let pool = if rng.random_bool(config.cross_field_share) {
                        &global_pool
                    } else {
                        &field_pool[r.field]
                    };
                    // A few draws; small pools simply yield smaller teams.
                    for _ in 0..4 {
                        let pick = pool[rng.random_range(0..pool.len())];
                        if !team.contains(&pick) {
                            team.push(pick);
                            break;
                        }
                    }
                }
                team.shuffle(&mut rng);

                let category = if rng.random_bool(config.off_field_share) {
                    all_categories
                        .choose(&mut rng)
                        .expect("nonempty")
                        .to_string()
                } else {
                    field.categories.choose(&mut rng).expect("nonempty").clone()
                };

                let pub_id = format!("W{:07}", publications.len() + 1);
                let mut mentions = Vec::with_capacity(team.len());
                let mut institutions: Vec<usize> = Vec::new();
                for (pos, &who) in team.iter().enumerate() {
                    let person = &researchers[who];
                    let initials = byline_initials(
                        &person.entry.given_names,
                        rng.random_bool(config.truncated_initials_share),
                    );
                    let raw = format!("{}, {}", person.entry.surname, initials);
                    mentions
                        .push(AuthorMention::parse(&raw, pos).expect("generated byline parses"));
                    gold.push((pub_id.clone(), pos, person.entry.researcher_id.clone()));
                    if !institutions.contains(&person.institution) {
                        institutions.push(person.institution);
                    }
                }
                let mut addresses = Vec::with_capacity(institutions.len());
                for inst in institutions {
                    if !rng.random_bool(config.missing_address_share) {
                        addresses.push(address_for(inst, &mut rng));
                    }
                }

                let total = citation_dists[r.field].sample(&mut rng).floor() as u64;
                let published = NaiveDate::from_ymd_opt(year, 1, 1).expect("valid year");
                let mut events: Vec<NaiveDate> = (0..total)
                    .map(|_| random_date(published, horizon, &mut rng))
                    .collect();
                events.sort_unstable();
                let (citation_events, citation_snapshot) = if rng.random_bool(config.snapshot_share)
                {
                    (
                        Vec::new(),
                        Some(events.partition_point(|d| *d <= obs) as u64),
                    )
                } else {
                    (events, None)
                };
                publications.push(PublicationRecord {
                    pub_id,
                    year: published.year(),
                    mentions,
                    addresses,
                    category,
                    citation_events,
                    citation_snapshot,
                });
            }
        }
    }

    let baselines = field_baselines(&publications, obs);

    let mut scheme = ClassificationScheme::default();
    let mut affinity: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for f in &config.fields {
        scheme
            .udas
            .entry(f.uda_code.clone())
            .or_insert_with(|| f.uda_name.clone());
        scheme.sds.insert(
            f.sds_code.clone(),
            SdsInfo {
                code: f.sds_code.clone(),
                name: f.sds_name.clone(),
                uda: f.uda_code.clone(),
            },
        );
        for c in &f.categories {
            affinity
                .entry(c.clone())
                .or_default()
                .insert(f.sds_code.clone());
        }
    }
    scheme.category_affinity = Some(affinity);

    let mut aliases = AliasTable::new();
    for i in 0..config.n_institutions {
        let city = institution_name(i);
        for v in [
            format!("Univ {city}"),
            format!("Universita {city}"),
            format!("University of {city}"),
        ] {
            aliases.insert(&v, institution_id(i));
        }
    }

    Ok(SynthOutput {
        publications,
        roster: researchers.into_iter().map(|r| r.entry).collect(),
        gold,
        baselines,
        scheme,
        aliases,
    })
}

/// Mean citations at `obs` per `(category, year)`; keys whose mean is zero
/// are left out.
pub fn field_baselines(publications: &[PublicationRecord], obs: NaiveDate) -> FieldBaseline {
    let mut sums: BTreeMap<(&str, i32), (u64, u64)> = BTreeMap::new();
    for p in publications {
        let e = sums.entry((p.category.as_str(), p.year)).or_default();
        e.0 += citations_at(p, obs);
        e.1 += 1;
    }
    let mut b = FieldBaseline::new();
    for ((cat, year), (total, count)) in sums {
        if total > 0 {
            b.insert(cat, year, total as f64 / count as f64)
                .expect("positive mean");
        }
    }
    b
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Census {
    pub publications: usize,
    pub researchers: usize,
    pub mentions: usize,
    pub homonym_fraction: f64,
}

/// Share of researchers whose normalized surname is shared with another.
pub fn homonym_fraction(roster: &[RosterEntry]) -> f64 {
    if roster.is_empty() {
        return 0.0;
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for e in roster {
        *counts.entry(e.surname_norm.as_str()).or_default() += 1;
    }
    let shared: usize = counts.values().filter(|c| **c > 1).sum();
    shared as f64 / roster.len() as f64
}

pub fn corpus_census(corpus: &Corpus, roster: &[RosterEntry]) -> Census {
    Census {
        publications: corpus.len(),
        researchers: roster.len(),
        mentions: corpus.records().iter().map(|r| r.mentions.len()).sum(),
        homonym_fraction: homonym_fraction(roster),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn city_names_do_not_nest() {
        for a in CITIES {
            for b in CITIES {
                if a != b {
                    assert!(!b.to_lowercase().contains(&a.to_lowercase()), "{a} in {b}");
                }
            }
        }
    }

    #[test]
    fn preset_sizes_are_exact() {
        for n in [0, 1, 7, 100, 10_000] {
            assert_eq!(SynthConfig::preset(0, n).total_researchers(), n);
        }
    }

    #[test]
    fn homonym_counts() {
        assert_eq!(homonym_count(0.12, 10_000).unwrap(), 1200);
        assert_eq!(homonym_count(0.0, 5).unwrap(), 0);
        // 0.12 · 10 = 1.2 → 1 is not realizable, 2 is 8 points off.
        assert!(matches!(
            homonym_count(0.12, 10),
            Err(SynthError::InfeasibleHomonymRate { .. })
        ));
        assert_eq!(homonym_count(0.12, 100).unwrap(), 12);
    }

    #[test]
    fn zero_rate_gives_unique_surnames() {
        let mut cfg = SynthConfig::preset(3, 400);
        cfg.homonym_rate = 0.0;
        let out = generate(&cfg).unwrap();
        assert_eq!(homonym_fraction(&out.roster), 0.0);
    }

    #[test]
    fn small_preset_is_consistent() {
        let out = generate(&SynthConfig::preset(11, 600)).unwrap();
        let frac = homonym_fraction(&out.roster);
        assert!((frac - 0.12).abs() <= 0.01, "{frac}");
        let mentions: usize = out.publications.iter().map(|p| p.mentions.len()).sum();
        assert_eq!(out.gold.len(), mentions);
        for (c, y, m) in out.baselines.entries() {
            let v: Vec<u64> = out
                .publications
                .iter()
                .filter(|p| p.category == c && p.year == y)
                .map(|p| citations_at(p, out_obs()))
                .collect();
            let mean = v.iter().sum::<u64>() as f64 / v.len() as f64;
            assert!((mean - m).abs() < 1e-9);
        }
    }

    fn out_obs() -> NaiveDate {
        WindowConfig::default().observation_date
    }

    #[test]
    fn census_counts() {
        let c = corpus_census(&Corpus::default(), &[]);
        assert_eq!(
            (
                c.publications,
                c.researchers,
                c.mentions,
                c.homonym_fraction
            ),
            (0, 0, 0, 0.0)
        );
        let roster: Vec<RosterEntry> = [
            ("R1", "Rossi"),
            ("R2", "Rossi"),
            ("R3", "Bianchi"),
            ("R4", "Verdi"),
        ]
        .iter()
        .map(|(id, s)| RosterEntry::new(*id, *s, "Maria", "U1", 1990, None, vec![]))
        .collect();
        assert_eq!(homonym_fraction(&roster), 0.5);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = SynthConfig::preset(1, 100);
        cfg.homonym_rate = 1.0;
        assert!(generate(&cfg).is_err());
        let mut cfg = SynthConfig::preset(1, 100);
        cfg.n_institutions = 0;
        assert!(generate(&cfg).is_err());
    }
}
