//! Python bindings: index computations, summary statistics, synthetic
//! corpora and the command-line pipeline.

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;

use hgbench::benchstats::{self, Conventions, QuantileMethod, VarianceDenominator};
use hgbench::corpus::Corpus;
use hgbench::disambig::{self, Attribution};
use hgbench::indices::{self, FieldBaseline, GConvention, PaperStat};
use hgbench::synthgen::{self, SynthConfig};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Paper", module = "hgbench", frozen, get_all, from_py_object)]
#[derive(Clone)]
struct Paper {
    pub_id: String,
    citations: u64,
    n_authors: u32,
    category: String,
    year: i32,
}

#[pymethods]
impl Paper {
    #[new]
    #[pyo3(signature = (pub_id, citations, n_authors = 1, category = String::new(), year = 0))]
    fn new(
        pub_id: String,
        citations: u64,
        n_authors: u32,
        category: String,
        year: i32,
    ) -> PyResult<Self> {
        if n_authors == 0 {
            return Err(PyValueError::new_err("n_authors must be at least 1"));
        }
        Ok(Self {
            pub_id,
            citations,
            n_authors,
            category,
            year,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Paper({:?}, citations={}, n_authors={}, category={:?}, year={})",
            self.pub_id, self.citations, self.n_authors, self.category, self.year
        )
    }
}

impl Paper {
    fn stat(&self) -> PaperStat {
        PaperStat::new(
            self.pub_id.clone(),
            self.citations,
            self.n_authors,
            self.category.clone(),
            self.year,
        )
    }

    fn from_stat(p: PaperStat) -> Self {
        Self {
            pub_id: p.pub_id,
            citations: p.citations,
            n_authors: p.n_authors,
            category: p.category,
            year: p.year,
        }
    }
}

fn stats(papers: &[Paper]) -> Vec<PaperStat> {
    papers.iter().map(Paper::stat).collect()
}

fn baselines_from(map: HashMap<(String, i32), f64>) -> PyResult<FieldBaseline> {
    let mut b = FieldBaseline::new();
    let mut entries: Vec<_> = map.into_iter().collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    for ((category, year), c0) in entries {
        b.insert(category, year, c0).map_err(value_err)?;
    }
    Ok(b)
}

fn convention(capped: bool) -> GConvention {
    if capped {
        GConvention::Capped
    } else {
        GConvention::Padded
    }
}

#[pyclass(name = "IndexSet", module = "hgbench", frozen, get_all)]
struct IndexSet {
    n_pubs: usize,
    h: u64,
    g: u64,
    h_individual: f64,
    h_m: f64,
    h_f: Option<u64>,
    status: &'static str,
}

#[pymethods]
impl IndexSet {
    fn __repr__(&self) -> String {
        format!(
            "IndexSet(status={:?}, n_pubs={}, h={}, g={}, h_individual={}, h_m={}, h_f={:?})",
            self.status, self.n_pubs, self.h, self.g, self.h_individual, self.h_m, self.h_f
        )
    }
}

#[pyclass(name = "Summary", module = "hgbench", frozen, get_all)]
struct Summary {
    group_code: String,
    n: usize,
    q1: f64,
    median: f64,
    q3: f64,
    max: f64,
    mean: f64,
    variance: f64,
}

#[pymethods]
impl Summary {
    fn __repr__(&self) -> String {
        format!(
            "Summary({:?}, n={}, q1={}, median={}, q3={}, max={}, mean={}, variance={})",
            self.group_code,
            self.n,
            self.q1,
            self.median,
            self.q3,
            self.max,
            self.mean,
            self.variance
        )
    }
}

#[pyclass(name = "EvalReport", module = "hgbench", frozen, get_all)]
struct EvalReport {
    true_positive: usize,
    false_positive: usize,
    false_negative: usize,
    precision: f64,
    recall: f64,
    f_measure: f64,
}

#[pyfunction]
fn h_index(counts: Vec<u64>) -> u64 {
    indices::h_index(&counts)
}

#[pyfunction]
#[pyo3(signature = (counts, capped = false))]
fn g_index(counts: Vec<u64>, capped: bool) -> u64 {
    indices::g_index_with(&counts, convention(capped))
}

#[pyfunction]
fn h_core(papers: Vec<Paper>) -> Vec<Paper> {
    indices::h_core(&stats(&papers))
        .into_iter()
        .map(Paper::from_stat)
        .collect()
}

#[pyfunction]
fn individual_h(papers: Vec<Paper>) -> f64 {
    indices::individual_h(&stats(&papers))
}

#[pyfunction]
fn hm_index(papers: Vec<Paper>) -> f64 {
    indices::hm_index(&stats(&papers))
}

/// `baselines` maps `(category, year)` to the mean citations per article.
#[pyfunction]
fn generalized_h(papers: Vec<Paper>, baselines: HashMap<(String, i32), f64>) -> PyResult<u64> {
    indices::generalized_h(&stats(&papers), &baselines_from(baselines)?).map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (papers, baselines = None, capped = false))]
fn index_set(
    papers: Vec<Paper>,
    baselines: Option<HashMap<(String, i32), f64>>,
    capped: bool,
) -> PyResult<IndexSet> {
    let baselines = baselines.map(baselines_from).transpose()?;
    let ix = indices::index_set(&stats(&papers), baselines.as_ref(), convention(capped));
    Ok(IndexSet {
        n_pubs: ix.n_pubs,
        h: ix.h,
        g: ix.g,
        h_individual: ix.h_individual,
        h_m: ix.h_m,
        h_f: ix.h_f,
        status: ix.status.as_str(),
    })
}

#[pyfunction]
#[pyo3(signature = (values, group_code = "", quantile = "linear", variance = "sample"))]
fn summarize(
    values: Vec<f64>,
    group_code: &str,
    quantile: &str,
    variance: &str,
) -> PyResult<Summary> {
    let conv = Conventions {
        quantile: match quantile {
            "linear" => QuantileMethod::Linear,
            "nearest-rank" => QuantileMethod::NearestRank,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown quantile method `{other}`"
                )))
            }
        },
        variance: match variance {
            "sample" => VarianceDenominator::Sample,
            "population" => VarianceDenominator::Population,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown variance denominator `{other}`"
                )))
            }
        },
    };
    let r = benchstats::summarize_with(group_code, &values, conv).map_err(value_err)?;
    Ok(Summary {
        group_code: r.group_code,
        n: r.n,
        q1: r.q1,
        median: r.median,
        q3: r.q3,
        max: r.max,
        mean: r.mean,
        variance: r.variance,
    })
}

#[pyfunction]
fn percentile_of(value: f64, group: Vec<f64>) -> PyResult<f64> {
    benchstats::percentile_of(value, &group).map_err(value_err)
}

#[pyfunction]
fn normalize_surname(name: &str) -> String {
    hgbench::names::normalize_surname(name)
}

type LinkTuple = (String, usize, String);

/// Scores `(pub_id, mention_position, researcher_id)` links against gold.
#[pyfunction]
fn evaluate(attributions: Vec<LinkTuple>, gold: Vec<LinkTuple>) -> EvalReport {
    let attrs: Vec<Attribution> = attributions
        .into_iter()
        .map(|(pub_id, mention_position, researcher_id)| Attribution {
            pub_id,
            mention_position,
            researcher_id,
            score: 1.0,
        })
        .collect();
    let gold: HashSet<LinkTuple> = gold.into_iter().collect();
    let r = disambig::evaluate(&attrs, &gold);
    EvalReport {
        true_positive: r.true_positive,
        false_positive: r.false_positive,
        false_negative: r.false_negative,
        precision: r.precision,
        recall: r.recall,
        f_measure: r.f_measure,
    }
}

/// Writes a preset synthetic corpus into `out_dir` and returns its census.
#[pyfunction]
#[pyo3(signature = (out_dir, seed = 7, researchers = 1000, homonym_rate = 0.12))]
fn synth(
    out_dir: PathBuf,
    seed: u64,
    researchers: usize,
    homonym_rate: f64,
) -> PyResult<HashMap<&'static str, f64>> {
    let mut config = SynthConfig::preset(seed, researchers);
    config.homonym_rate = homonym_rate;
    let out = synthgen::generate(&config).map_err(value_err)?;
    std::fs::create_dir_all(&out_dir).map_err(|e| PyIOError::new_err(e.to_string()))?;
    for (name, bytes) in out.files() {
        std::fs::write(out_dir.join(name), bytes).map_err(|e| PyIOError::new_err(e.to_string()))?;
    }
    let corpus = Corpus::new(out.publications);
    let c = synthgen::corpus_census(&corpus, &out.roster);
    Ok(HashMap::from([
        ("publications", c.publications as f64),
        ("researchers", c.researchers as f64),
        ("mentions", c.mentions as f64),
        ("homonym_fraction", c.homonym_fraction),
    ]))
}

/// Runs a command-line invocation, e.g. `run(["benchmark", "--in", "out"])`,
/// and returns its exit code.
#[pyfunction]
fn run(py: Python<'_>, args: Vec<String>) -> i32 {
    let argv: Vec<String> = std::iter::once("hgbench".to_string()).chain(args).collect();
    py.detach(|| hgbench::cli::run(argv))
}

#[pymodule]
#[pyo3(name = "hgbench")]
fn hgbench_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Paper>()?;
    m.add_class::<IndexSet>()?;
    m.add_class::<Summary>()?;
    m.add_class::<EvalReport>()?;
    m.add_function(wrap_pyfunction!(h_index, m)?)?;
    m.add_function(wrap_pyfunction!(g_index, m)?)?;
    m.add_function(wrap_pyfunction!(h_core, m)?)?;
    m.add_function(wrap_pyfunction!(individual_h, m)?)?;
    m.add_function(wrap_pyfunction!(hm_index, m)?)?;
    m.add_function(wrap_pyfunction!(generalized_h, m)?)?;
    m.add_function(wrap_pyfunction!(index_set, m)?)?;
    m.add_function(wrap_pyfunction!(summarize, m)?)?;
    m.add_function(wrap_pyfunction!(percentile_of, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_surname, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(synth, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
