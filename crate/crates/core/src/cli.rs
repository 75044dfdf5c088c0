//! Command-line front end: `ingest`, `attribute`, `compute`, `benchmark`,
//! `compare` and `synth`.
//!
//! Inputs are resolved against `--in` (default `.`), artifacts are written
//! atomically into `--out`. Exit status is 0 on success, 1 on data errors and
//! 2 on usage errors.

use std::collections::{BTreeMap, HashSet};
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use tempfile::NamedTempFile;
use thiserror::Error;

use crate::benchstats::{
    benchmark, percentile_of, render_raw, render_table, Conventions, OutputFormat, QuantileMethod,
    VarianceDenominator,
};
use crate::corpus::{
    eligible_researchers, parse_roster, ClassificationScheme, Corpus, RosterEntry, WindowConfig,
};
use crate::disambig::{
    attribute, evaluate, parse_attributions, parse_gold, write_attributions, write_residue,
    AliasTable, DisambigConfig, Weights,
};
use crate::indices::{FieldBaseline, GConvention};
use crate::profile::{parse_profile_table, profile_all, write_profiles, IndexKind, Profiler};
use crate::synthgen::{corpus_census, generate, SynthConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("{0}")]
    Data(String),
    #[error("writing {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "hgbench",
    version,
    about = "Field-stratified h- and g-index benchmarks"
)]
pub struct Cli {
    /// Directory receiving the artifacts.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Layout of report tables. Data artifacts are always CSV.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Markdown,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Markdown => OutputFormat::Markdown,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate input files and report counts.
    Ingest(InputArgs),
    /// Attribute author mentions to roster researchers.
    Attribute(AttributeArgs),
    /// Compute per-researcher indexes.
    Compute(ComputeArgs),
    /// Summarize profiles per SDS and UDA.
    Benchmark(BenchmarkArgs),
    /// Percentile of one researcher within their group.
    Compare(CompareArgs),
    /// Generate a synthetic corpus with gold labels.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Directory that relative input paths are resolved against.
    #[arg(long = "in", default_value = ".")]
    pub input: PathBuf,
    #[arg(long, default_value = "publications.jsonl")]
    pub publications: PathBuf,
    #[arg(long, default_value = "roster.csv")]
    pub roster: PathBuf,
    #[arg(long, default_value = "classification.csv")]
    pub classification: PathBuf,
    /// Category-to-SDS affinity map (`category,sds`).
    #[arg(long)]
    pub affinity: Option<PathBuf>,
}

impl InputArgs {
    fn resolve(&self, p: &Path) -> PathBuf {
        resolve(&self.input, p)
    }
}

fn resolve(dir: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        dir.join(p)
    }
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    /// Publication window, inclusive years.
    #[arg(long, value_name = "START:END", default_value = "2001:2005", value_parser = parse_window)]
    pub window: (i32, i32),
    /// Citations are counted up to and including this date.
    #[arg(long, value_name = "YYYY-MM-DD", default_value = "2008-03-31", value_parser = parse_obs_date)]
    pub obs_date: NaiveDate,
}

impl WindowArgs {
    fn config(&self) -> Result<WindowConfig> {
        WindowConfig::new(self.window.0, self.window.1, self.obs_date)
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

fn parse_window(s: &str) -> std::result::Result<(i32, i32), String> {
    let (a, b) = s.split_once(':').ok_or("expected START:END")?;
    let start: i32 = a
        .trim()
        .parse()
        .map_err(|_| format!("invalid start year `{a}`"))?;
    let end: i32 = b
        .trim()
        .parse()
        .map_err(|_| format!("invalid end year `{b}`"))?;
    if start > end {
        return Err(format!("start {start} is after end {end}"));
    }
    Ok((start, end))
}

fn parse_obs_date(s: &str) -> std::result::Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| format!("not an ISO-8601 date: {e}"))
}

fn parse_weights(s: &str) -> std::result::Result<Weights, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("invalid weight `{p}`"))
        })
        .collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [a, f, u] => Weights::new(a, f, u).map_err(|e| e.to_string()),
        _ => Err("expected AFFILIATION,FIELD,UNIQUENESS".into()),
    }
}

fn parse_index(s: &str) -> std::result::Result<IndexKind, String> {
    s.trim().parse()
}

fn dedup(kinds: &[IndexKind]) -> Vec<IndexKind> {
    let mut out = Vec::new();
    for k in kinds {
        if !out.contains(k) {
            out.push(*k);
        }
    }
    out
}

#[derive(Debug, Args)]
pub struct AttributeArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Address alias table (`alias,institution_id`).
    #[arg(long)]
    pub aliases: Option<PathBuf>,
    /// Gold links; when given, precision/recall/F are reported.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    #[arg(long, default_value_t = DisambigConfig::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Signal weights AFFILIATION,FIELD,UNIQUENESS summing to 1.
    #[arg(long, default_value = "0.5,0.3,0.2", value_parser = parse_weights)]
    pub weights: Weights,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GConventionArg {
    Padded,
    Capped,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long, default_value = "attributions.csv")]
    pub attributions: PathBuf,
    /// Comma-separated subset of h,g,hi,hm,hf.
    #[arg(long, value_delimiter = ',', default_value = "h,g,hi,hm,hf", value_parser = parse_index)]
    pub indices: Vec<IndexKind>,
    /// Field baselines (`category,year,c0`) for hf.
    #[arg(long)]
    pub baselines: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = GConventionArg::Padded)]
    pub g_convention: GConventionArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuantileArg {
    Linear,
    NearestRank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VarianceArg {
    Sample,
    Population,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long, value_enum, default_value_t = QuantileArg::Linear)]
    pub quantile: QuantileArg,
    #[arg(long, value_enum, default_value_t = VarianceArg::Sample)]
    pub variance: VarianceArg,
}

impl StatsArgs {
    fn conventions(&self) -> Conventions {
        Conventions {
            quantile: match self.quantile {
                QuantileArg::Linear => QuantileMethod::Linear,
                QuantileArg::NearestRank => QuantileMethod::NearestRank,
            },
            variance: match self.variance {
                VarianceArg::Sample => VarianceDenominator::Sample,
                VarianceArg::Population => VarianceDenominator::Population,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[arg(long = "in", default_value = ".")]
    pub input: PathBuf,
    #[arg(long, default_value = "profiles.csv")]
    pub profiles: PathBuf,
    /// Indexes to summarize; defaults to every column present in the profiles.
    #[arg(long, value_delimiter = ',', value_parser = parse_index)]
    pub indices: Option<Vec<IndexKind>>,
    #[command(flatten)]
    pub stats: StatsArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Sds,
    Uda,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long = "in", default_value = ".")]
    pub input: PathBuf,
    #[arg(long, default_value = "profiles.csv")]
    pub profiles: PathBuf,
    #[arg(long)]
    pub researcher: String,
    #[arg(long, value_parser = parse_index)]
    pub index: IndexKind,
    /// Comparison group.
    #[arg(long, value_enum, default_value_t = LevelArg::Sds)]
    pub level: LevelArg,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Overrides the seed of `--config`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, conflicts_with = "config")]
    pub researchers: Option<usize>,
    /// Overrides the homonym rate of `--config`.
    #[arg(long)]
    pub homonym_rate: Option<f64>,
    /// JSON synth configuration; the built-in preset is used otherwise.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(written) => {
            for p in written {
                eprintln!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command, returning the artifacts written.
pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>> {
    let out = Output {
        dir: &cli.out,
        format: cli.format.into(),
    };
    match &cli.command {
        Command::Ingest(a) => cmd_ingest(a, &out),
        Command::Attribute(a) => cmd_attribute(a, &out),
        Command::Compute(a) => cmd_compute(a, &out),
        Command::Benchmark(a) => cmd_benchmark(a, &out),
        Command::Compare(a) => cmd_compare(a, &out),
        Command::Synth(a) => cmd_synth(a, &out),
    }
}

struct Output<'a> {
    dir: &'a Path,
    format: OutputFormat,
}

impl Output<'_> {
    fn report_name(&self, stem: &str) -> String {
        format!("{stem}.{}", self.format.extension())
    }

    /// Writes through a temporary file in the target directory and renames
    /// it into place.
    fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let target = self.dir.join(name);
        let fail = |source| CliError::Output {
            path: target.clone(),
            source,
        };
        fs::create_dir_all(self.dir).map_err(fail)?;
        let mut tmp = NamedTempFile::new_in(self.dir).map_err(fail)?;
        tmp.write_all(bytes).map_err(fail)?;
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            tmp.as_file()
                .set_permissions(fs::Permissions::from_mode(0o644))
                .map_err(fail)?;
        }
        tmp.as_file().sync_all().map_err(fail)?;
        tmp.persist(&target).map_err(|e| fail(e.error))?;
        Ok(target)
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Input {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
}

fn input_err(path: &Path) -> impl Fn(&dyn std::fmt::Display) -> CliError + '_ {
    move |e| CliError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    let corpus = Corpus::load(open(path)?).map_err(|e| input_err(path)(&e))?;
    report_warnings(corpus.warnings());
    Ok(corpus)
}

const MAX_LISTED_WARNINGS: usize = 10;

fn report_warnings<T: std::fmt::Display>(warnings: &[T]) {
    for w in warnings.iter().take(MAX_LISTED_WARNINGS) {
        eprintln!("warning: {w}");
    }
    if warnings.len() > MAX_LISTED_WARNINGS {
        eprintln!(
            "warning: ... and {} more",
            warnings.len() - MAX_LISTED_WARNINGS
        );
    }
}

fn load_roster(path: &Path) -> Result<Vec<RosterEntry>> {
    parse_roster(open(path)?).map_err(|e| input_err(path)(&e))
}

fn load_scheme(inputs: &InputArgs) -> Result<ClassificationScheme> {
    let path = inputs.resolve(&inputs.classification);
    let mut scheme = ClassificationScheme::parse(open(&path)?).map_err(|e| input_err(&path)(&e))?;
    if let Some(a) = &inputs.affinity {
        let path = inputs.resolve(a);
        scheme
            .load_affinity(open(&path)?)
            .map_err(|e| input_err(&path)(&e))?;
    }
    Ok(scheme)
}

fn cmd_ingest(a: &InputArgs, out: &Output) -> Result<Vec<PathBuf>> {
    let corpus = load_corpus(&a.resolve(&a.publications))?;
    let roster = load_roster(&a.resolve(&a.roster))?;
    let scheme = load_scheme(a)?;
    let unknown_categories = corpus.unknown_categories(&scheme);
    report_warnings(&unknown_categories);
    let unknown_sds: Vec<String> = roster
        .iter()
        .flat_map(|e| e.sds_history.iter().map(move |(_, sds)| (e, sds)))
        .filter(|(_, sds)| scheme.uda_of(sds).is_none())
        .map(|(e, sds)| {
            format!(
                "researcher `{}`: SDS `{sds}` not in classification",
                e.researcher_id
            )
        })
        .collect();
    report_warnings(&unknown_sds);
    let warnings = corpus.warnings().len() + unknown_categories.len() + unknown_sds.len();
    let c = corpus_census(&corpus, &roster);
    let table = render_raw(
        &[
            "publications",
            "researchers",
            "mentions",
            "homonym_fraction",
            "warnings",
        ],
        [vec![
            c.publications.to_string(),
            c.researchers.to_string(),
            c.mentions.to_string(),
            format!("{:.4}", c.homonym_fraction),
            warnings.to_string(),
        ]],
        out.format,
    );
    Ok(vec![
        out.write(&out.report_name("census"), table.as_bytes())?
    ])
}

fn cmd_attribute(a: &AttributeArgs, out: &Output) -> Result<Vec<PathBuf>> {
    let inputs = &a.inputs;
    let window = a.window.config()?;
    let corpus = load_corpus(&inputs.resolve(&inputs.publications))?;
    let roster = load_roster(&inputs.resolve(&inputs.roster))?;
    let scheme = load_scheme(inputs)?;
    let aliases = match &a.aliases {
        Some(p) => {
            let path = inputs.resolve(p);
            AliasTable::parse(open(&path)?).map_err(|e| input_err(&path)(&e))?
        }
        None => AliasTable::new(),
    };
    let config = DisambigConfig::new(a.threshold, a.weights, aliases)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let table = attribute(&corpus, &roster, &scheme, &config, &window);

    let mut attributions = Vec::new();
    write_attributions(&table.attributions, &mut attributions)
        .map_err(|e| CliError::Data(e.to_string()))?;
    let mut residue = Vec::new();
    write_residue(&table.residue, &mut residue).map_err(|e| CliError::Data(e.to_string()))?;
    let mut written = vec![
        out.write("attributions.csv", &attributions)?,
        out.write("residue.csv", &residue)?,
    ];
    eprintln!(
        "attributed {} mentions, {} left unresolved",
        table.attributions.len(),
        table.residue.len()
    );

    if let Some(g) = &a.gold {
        let path = inputs.resolve(g);
        let gold = parse_gold(open(&path)?).map_err(|e| input_err(&path)(&e))?;
        let r = evaluate(&table.attributions, &gold);
        eprintln!(
            "precision {:.4} recall {:.4} F {:.4}",
            r.precision, r.recall, r.f_measure
        );
        let report = render_raw(
            &[
                "true_positive",
                "false_positive",
                "false_negative",
                "precision",
                "recall",
                "f_measure",
            ],
            [vec![
                r.true_positive.to_string(),
                r.false_positive.to_string(),
                r.false_negative.to_string(),
                format!("{:.4}", r.precision),
                format!("{:.4}", r.recall),
                format!("{:.4}", r.f_measure),
            ]],
            out.format,
        );
        written.push(out.write(&out.report_name("evaluation"), report.as_bytes())?);
    }
    Ok(written)
}

fn cmd_compute(a: &ComputeArgs, out: &Output) -> Result<Vec<PathBuf>> {
    let inputs = &a.inputs;
    let window = a.window.config()?;
    let corpus = load_corpus(&inputs.resolve(&inputs.publications))?;
    let roster = load_roster(&inputs.resolve(&inputs.roster))?;
    let scheme = load_scheme(inputs)?;
    let path = inputs.resolve(&a.attributions);
    let attributions = parse_attributions(open(&path)?).map_err(|e| input_err(&path)(&e))?;
    let baselines = match &a.baselines {
        Some(p) => {
            let path = inputs.resolve(p);
            Some(FieldBaseline::parse(open(&path)?).map_err(|e| input_err(&path)(&e))?)
        }
        None => {
            if a.indices.contains(&IndexKind::Hf) {
                eprintln!("warning: hf selected without --baselines; its column stays empty");
            }
            None
        }
    };
    let g = match a.g_convention {
        GConventionArg::Padded => GConvention::Padded,
        GConventionArg::Capped => GConvention::Capped,
    };
    let profiler =
        Profiler::new(&corpus, &attributions, window, baselines.as_ref()).g_convention(g);
    let eligible = eligible_researchers(&roster, &window);
    let (profiles, skipped) = profile_all(&profiler, &eligible, &scheme);
    let skipped: Vec<String> = skipped
        .into_iter()
        .map(|s| format!("skipped {s}"))
        .collect();
    report_warnings(&skipped);
    let mut buf = Vec::new();
    write_profiles(&profiles, &dedup(&a.indices), &mut buf)
        .map_err(|e| CliError::Data(e.to_string()))?;
    Ok(vec![out.write("profiles.csv", &buf)?])
}

fn cmd_benchmark(a: &BenchmarkArgs, out: &Output) -> Result<Vec<PathBuf>> {
    let path = resolve(&a.input, &a.profiles);
    let (profiles, present) =
        parse_profile_table(open(&path)?).map_err(|e| input_err(&path)(&e))?;
    let selected = match &a.indices {
        Some(sel) => {
            if let Some(k) = sel
                .iter()
                .find(|k| !present.contains(k) && !profiles.is_empty())
            {
                return Err(CliError::Data(format!(
                    "{}: column for `{k}` is empty",
                    path.display()
                )));
            }
            dedup(sel)
        }
        None => present,
    };
    let conv = a.stats.conventions();
    let run = benchmark(&profiles, &selected, conv);
    eprintln!("{}", conv.describe());
    for s in &run.dropped_sds {
        eprintln!("dropped {s}: fewer than half of its researchers published in the window");
    }

    let mut written = Vec::new();
    let exclusion = render_raw(
        &[
            "eligible",
            "excluded_total",
            "zero_publications",
            "zero_citations",
            "benchmarked",
        ],
        [vec![
            run.population.to_string(),
            run.exclusion.excluded_total.to_string(),
            run.exclusion.zero_publications.to_string(),
            run.exclusion.zero_citations.to_string(),
            (run.population - run.exclusion.excluded_total).to_string(),
        ]],
        out.format,
    );
    written.push(out.write(&out.report_name("exclusion"), exclusion.as_bytes())?);
    let filter_rows = run
        .retained_sds
        .iter()
        .map(|s| vec![s.clone(), "retained".into()])
        .chain(
            run.dropped_sds
                .iter()
                .map(|s| vec![s.clone(), "dropped".into()]),
        );
    let filter = render_raw(&["sds", "status"], filter_rows, out.format);
    written.push(out.write(&out.report_name("sds_filter"), filter.as_bytes())?);
    for b in &run.indexes {
        let code = b.index.code();
        let tables = [
            ("benchmark", render_table(&b.leveled_rows(), out.format)),
            ("ranges", render_table(&b.ranges, out.format)),
            ("lowcounts", render_table(&b.low_counts, out.format)),
        ];
        for (stem, body) in tables {
            written.push(out.write(&out.report_name(&format!("{stem}_{code}")), body.as_bytes())?);
        }
    }
    Ok(written)
}

fn cmd_compare(a: &CompareArgs, out: &Output) -> Result<Vec<PathBuf>> {
    let path = resolve(&a.input, &a.profiles);
    let (profiles, present) =
        parse_profile_table(open(&path)?).map_err(|e| input_err(&path)(&e))?;
    if !present.contains(&a.index) {
        return Err(CliError::Data(format!(
            "{}: column for `{}` is empty",
            path.display(),
            a.index
        )));
    }
    let me = profiles
        .iter()
        .find(|p| p.researcher_id == a.researcher)
        .ok_or_else(|| {
            CliError::Data(format!(
                "researcher `{}` not in {}",
                a.researcher,
                path.display()
            ))
        })?;
    if me.status().is_null() {
        return Err(CliError::Data(format!(
            "researcher `{}` is excluded from benchmarks ({})",
            a.researcher,
            me.status().as_str()
        )));
    }
    let value = me.value(a.index).ok_or_else(|| {
        CliError::Data(format!(
            "researcher `{}` has no `{}` value",
            a.researcher, a.index
        ))
    })?;

    // Same population as the benchmark tables: SDSs passing the activity
    // filter, null profiles excluded.
    let run = benchmark(&profiles, &[], Conventions::default());
    if !run.retained_sds.contains(&me.sds) {
        return Err(CliError::Data(format!(
            "SDS `{}` of researcher `{}` is dropped by the activity filter",
            me.sds, a.researcher
        )));
    }
    let retained: HashSet<&str> = run.retained_sds.iter().map(String::as_str).collect();
    let (level, group) = match a.level {
        LevelArg::Sds => ("SDS", me.sds.as_str()),
        LevelArg::Uda => ("UDA", me.uda.as_str()),
    };
    let values: Vec<f64> = profiles
        .iter()
        .filter(|p| retained.contains(p.sds.as_str()) && !p.status().is_null())
        .filter(|p| match a.level {
            LevelArg::Sds => p.sds == group,
            LevelArg::Uda => p.uda == group,
        })
        .filter_map(|p| p.value(a.index))
        .collect();
    let pct = percentile_of(value, &values).map_err(|e| CliError::Data(e.to_string()))?;
    let table = render_raw(
        &[
            "researcher_id",
            "index",
            "level",
            "group",
            "group_n",
            "value",
            "percentile",
        ],
        [vec![
            a.researcher.clone(),
            a.index.code().to_string(),
            level.to_string(),
            group.to_string(),
            values.len().to_string(),
            format!("{value:.2}"),
            format!("{pct:.2}"),
        ]],
        out.format,
    );
    print!("{table}");
    let name = out.report_name(&format!(
        "compare_{}_{}",
        sanitize(&a.researcher),
        a.index.code()
    ));
    Ok(vec![out.write(&name, table.as_bytes())?])
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn cmd_synth(a: &SynthArgs, out: &Output) -> Result<Vec<PathBuf>> {
    let mut config = match &a.config {
        Some(p) => serde_json::from_reader(open(p)?).map_err(|e| input_err(p)(&e))?,
        None => SynthConfig::preset(7, a.researchers.unwrap_or(1000)),
    };
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    if let Some(rate) = a.homonym_rate {
        config.homonym_rate = rate;
    }
    let output = generate(&config).map_err(|e| CliError::Data(e.to_string()))?;
    let mut written = Vec::new();
    for (name, bytes) in output.files() {
        written.push(out.write(name, &bytes)?);
    }
    let corpus = Corpus::new(output.publications);
    let c = corpus_census(&corpus, &output.roster);
    eprintln!(
        "{} publications, {} researchers, {} mentions, homonym fraction {:.4}",
        c.publications, c.researchers, c.mentions, c.homonym_fraction
    );
    let per_uda: BTreeMap<&str, usize> = config.fields.iter().fold(BTreeMap::new(), |mut m, f| {
        *m.entry(f.uda_code.as_str()).or_default() += f.n_researchers;
        m
    });
    eprintln!("researchers per UDA: {per_uda:?}");
    Ok(written)
}
