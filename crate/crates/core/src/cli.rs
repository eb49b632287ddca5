//! The `catvec` command line: `stats`, `run`, `synth` and `classify`.
//!
//! Settings are resolved as flags, then `CATVEC_*` environment variables,
//! then a `key = value` config file given with `--config`, then defaults.

use std::collections::HashMap;
use std::io::{Read as _, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::categorizers::{classify, load_model, save_model, Approach, DEFAULT_MAX_TRAINING_TERMS};
use crate::corpus::{collection_stats, parse_category_list, parse_collection, read_collection, render_stats, split_collection, Collection, Document, Split};
use crate::error::{Error, Result};
use crate::eval::{render_points, render_report, reports_to_json, write_scores_csv, Orientation, Strategy, DEFAULT_K_MAX};
use crate::lexicon::{load_lexicon, parse_entries, read_source, REUTERS_NAMES, REUTERS_TOPICS};
use crate::pipeline::{run, RunConfig, DEFAULT_TRAIN_COUNT};
use crate::synth::{generate, SynthConfig};
use crate::vsm::Term;

#[derive(Debug, Parser)]
#[command(name = "catvec", version, about = "Vector space text categorization with lexicon expansion")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "CATVEC_JOBS")]
    pub jobs: Option<usize>,

    /// Progress and model details on stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,

    /// `key = value` settings file, consulted after flags and environment.
    #[arg(long, global = true, env = "CATVEC_CONFIG")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Collection statistics for the training and test splits.
    Stats(StatsArgs),
    /// Build models on the training split, score the test split, evaluate.
    Run(RunArgs),
    /// Write a synthetic corpus (and matching lexicon).
    Synth(SynthArgs),
    /// Score documents against a model saved by `run --cache`.
    Classify(ClassifyArgs),
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Corpus files, concatenated in the order given.
    #[arg(long, env = "CATVEC_CORPUS", value_delimiter = ',')]
    pub corpus: Vec<PathBuf>,

    /// Declared category list (whitespace separated, `#` comments), or
    /// `builtin:reuters`. Defaults to the topics seen in the corpus.
    #[arg(long, env = "CATVEC_CATEGORIES")]
    pub categories: Option<PathBuf>,

    /// Documents, in file order, that form the training split.
    #[arg(long, env = "CATVEC_TRAIN_COUNT")]
    pub train_count: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    /// Print JSON instead of the table.
    #[arg(long)]
    pub json: bool,

    /// Also write the statistics as JSON to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    /// Synonym lexicon, or `builtin:reuters`.
    #[arg(long, env = "CATVEC_LEXICON")]
    pub lexicon: Option<PathBuf>,

    /// Name terms replacing category codes for the direct approach
    /// (`bop: balance of payments`), or `builtin:reuters`.
    #[arg(long, env = "CATVEC_CATEGORY_NAMES")]
    pub category_names: Option<PathBuf>,

    /// Comma-separated subset of direct, lexicon, training, integrated.
    #[arg(long, env = "CATVEC_APPROACHES", value_delimiter = ',', value_parser = parse_approach)]
    pub approaches: Vec<Approach>,

    /// `threshold` or `k-per-doc`.
    #[arg(long, env = "CATVEC_STRATEGY", value_parser = ["threshold", "k-per-doc"])]
    pub strategy: Option<String>,

    /// Largest k for the k-per-doc strategy.
    #[arg(long, env = "CATVEC_K_MAX")]
    pub k_max: Option<usize>,

    #[arg(long, env = "CATVEC_MAX_TRAINING_TERMS")]
    pub max_training_terms: Option<usize>,

    /// Macro-averaging over `category` (default) or `document`.
    #[arg(long, env = "CATVEC_ORIENTATION", value_parser = ["category", "document"])]
    pub orientation: Option<String>,

    /// Write the reports as JSON to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Save each model (with its df table) as `<dir>/<approach>.json`.
    #[arg(long, env = "CATVEC_CACHE")]
    pub cache: Option<PathBuf>,

    /// Save each score matrix as `<dir>/<approach>.csv`.
    #[arg(long)]
    pub scores_dir: Option<PathBuf>,

    /// Print per-level figures after the summary table.
    #[arg(long)]
    pub points: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    #[arg(long, default_value_t = 1000)]
    pub docs: usize,

    #[arg(long, default_value_t = 20)]
    pub categories: usize,

    /// Categories that get no training documents.
    #[arg(long, default_value_t = 1)]
    pub undertrained: usize,

    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,

    /// Corpus destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long)]
    pub lexicon_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Model JSON written by `run --cache`.
    #[arg(long)]
    pub model: PathBuf,

    /// Categories to print per document; 0 prints every nonzero score.
    #[arg(long, default_value_t = 5)]
    pub top: usize,

    /// Treat inputs as corpus records instead of plain text.
    #[arg(long)]
    pub records: bool,

    /// Input files; stdin when none are given.
    pub files: Vec<PathBuf>,
}

/// Parsed `--config` file.
#[derive(Debug, Default)]
struct Settings(HashMap<String, String>);

impl Settings {
    const KEYS: [&'static str; 14] = [
        "corpus",
        "categories",
        "train_count",
        "lexicon",
        "category_names",
        "approaches",
        "strategy",
        "k_max",
        "max_training_terms",
        "orientation",
        "out",
        "cache",
        "scores_dir",
        "jobs",
    ];

    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Settings::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Settings::parse(&text)
    }

    fn parse(text: &str) -> Result<Self> {
        let mut map = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("config line {}: expected key = value", i + 1)))?;
            let key = key.trim().replace('-', "_");
            if !Self::KEYS.contains(&key.as_str()) {
                return Err(Error::invalid(format!("config line {}: unknown key `{key}`", i + 1)));
            }
            map.insert(key, value.trim().to_string());
        }
        Ok(Settings(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.0
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::invalid(format!("config: bad value `{v}` for `{key}`")))
            })
            .transpose()
    }

    fn list(&self, key: &str) -> Vec<String> {
        self.0
            .get(key)
            .map(|v| v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect())
            .unwrap_or_default()
    }
}

fn parse_approach(s: &str) -> std::result::Result<Approach, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn or_config<T: FromStr>(flag: Option<T>, cfg: &Settings, key: &str) -> Result<Option<T>> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.get(key),
    }
}

struct Ctx {
    verbose: bool,
    settings: Settings,
}

impl Ctx {
    fn note(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("{}", msg.as_ref());
        }
    }
}

/// Parses `std::env::args`, runs the command and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("catvec: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    let settings = Settings::load(cli.config.as_deref())?;
    if let Some(jobs) = or_config(cli.jobs, &settings, "jobs")? {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let ctx = Ctx {
        verbose: cli.verbose,
        settings,
    };
    match cli.command {
        Command::Stats(a) => cmd_stats(&ctx, a),
        Command::Run(a) => cmd_run(&ctx, a),
        Command::Synth(a) => cmd_synth(&ctx, a),
        Command::Classify(a) => cmd_classify(&ctx, a),
    }
}

fn load_corpus(ctx: &Ctx, args: &CorpusArgs) -> Result<Collection> {
    let paths: Vec<PathBuf> = if args.corpus.is_empty() {
        ctx.settings.list("corpus").into_iter().map(PathBuf::from).collect()
    } else {
        args.corpus.clone()
    };
    if paths.is_empty() {
        return Err(Error::invalid("no corpus given (use --corpus or CATVEC_CORPUS)"));
    }
    let mut c = read_collection(&paths)?;
    ctx.note(format!("read {} documents from {} file(s)", c.len(), paths.len()));
    let declared = or_config(args.categories.clone(), &ctx.settings, "categories")?;
    if let Some(path) = declared {
        let text = read_source(&path, |n| (n == "reuters").then_some(REUTERS_TOPICS))?;
        c = c.with_categories(parse_category_list(&text))?;
    }
    Ok(c)
}

/// Writes to stdout; a closed pipe (`catvec run | head`) is not an error.
fn emit(text: &str) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::io("<stdout>", e)),
        _ => Ok(()),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn cmd_stats(ctx: &Ctx, args: StatsArgs) -> Result<()> {
    let c = load_corpus(ctx, &args.corpus)?;
    let mut train_count = or_config(args.corpus.train_count, &ctx.settings, "train_count")?.unwrap_or(DEFAULT_TRAIN_COUNT);
    if train_count > c.len() {
        eprintln!(
            "catvec: warning: train count {train_count} exceeds the {} documents read; using {}",
            c.len(),
            c.len()
        );
        train_count = c.len();
    }
    let (train, test) = split_collection(&c, train_count)?;
    let columns = [
        ("Training", collection_stats(&train)),
        ("Test", collection_stats(&test)),
        ("Total", collection_stats(&c)),
    ];
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "training": columns[0].1,
        "test": columns[1].1,
        "total": columns[2].1,
    }))?;
    if let Some(out) = &args.out {
        write_file(out, &json)?;
    }
    if args.json {
        emit(&format!("{json}\n"))
    } else {
        emit(&render_stats(&columns))
    }
}

fn load_names(path: &Path) -> Result<Vec<(String, Vec<Term>)>> {
    let text = read_source(path, |n| (n == "reuters").then_some(REUTERS_NAMES))?;
    parse_entries(&text)
}

fn run_config(ctx: &Ctx, args: &RunArgs) -> Result<RunConfig> {
    let cfg = &ctx.settings;
    let approaches = if !args.approaches.is_empty() {
        args.approaches.clone()
    } else if cfg.0.contains_key("approaches") {
        cfg.list("approaches").iter().map(|s| s.parse()).collect::<Result<_>>()?
    } else {
        Approach::ALL.to_vec()
    };
    let k_max = or_config(args.k_max, cfg, "k_max")?.unwrap_or(DEFAULT_K_MAX);
    let strategy = match or_config(args.strategy.clone(), cfg, "strategy")?.as_deref() {
        None | Some("threshold") => Strategy::Threshold,
        Some("k-per-doc") => {
            if k_max == 0 {
                return Err(Error::invalid("--k-max must be at least 1"));
            }
            Strategy::KPerDoc { k_max }
        }
        Some(other) => return Err(Error::invalid(format!("unknown strategy `{other}`"))),
    };
    let orientation = match or_config(args.orientation.clone(), cfg, "orientation")?.as_deref() {
        None | Some("category") => Orientation::Category,
        Some("document") => Orientation::Document,
        Some(other) => return Err(Error::invalid(format!("unknown orientation `{other}`"))),
    };
    Ok(RunConfig {
        train_count: or_config(args.corpus.train_count, cfg, "train_count")?.unwrap_or(DEFAULT_TRAIN_COUNT),
        approaches,
        strategy,
        orientation,
        max_training_terms: or_config(args.max_training_terms, cfg, "max_training_terms")?
            .unwrap_or(DEFAULT_MAX_TRAINING_TERMS),
    })
}

fn cmd_run(ctx: &Ctx, args: RunArgs) -> Result<()> {
    let cfg = &ctx.settings;
    let run_cfg = run_config(ctx, &args)?;
    let lexicon_path = or_config(args.lexicon.clone(), cfg, "lexicon")?;
    if run_cfg.approaches.iter().any(|a| a.needs_lexicon()) && lexicon_path.is_none() {
        return Err(Error::invalid(
            "the lexicon and integrated approaches need --lexicon (or CATVEC_LEXICON)",
        ));
    }
    let collection = load_corpus(ctx, &args.corpus)?;
    let lexicon = lexicon_path.as_deref().map(load_lexicon).transpose()?;
    let names = or_config(args.category_names.clone(), cfg, "category_names")?
        .as_deref()
        .map(load_names)
        .transpose()?;

    let output = run(&run_cfg, &collection, names.as_deref(), lexicon.as_ref())?;
    ctx.note(format!(
        "{} training / {} test documents, {} categories",
        output.train_docs,
        output.test_docs,
        collection.categories.len()
    ));
    for r in &output.runs {
        let mut line = format!("{}: {} terms", r.model.approach, r.model.vocab.len());
        if let Some(n) = r.model.meta.training_shortfall {
            line.push_str(&format!(", {n} short of the requested training terms"));
        }
        if let Some(n) = r.model.meta.lexicon_terms_dropped {
            line.push_str(&format!(", {n} lexicon terms absent from training text"));
        }
        ctx.note(line);
    }

    if let Some(dir) = or_config(args.cache.clone(), cfg, "cache")? {
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for r in &output.runs {
            save_model(&dir.join(format!("{}.json", r.model.approach)), &r.model, Some(&r.df))?;
        }
    }
    if let Some(dir) = or_config(args.scores_dir.clone(), cfg, "scores_dir")? {
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for r in &output.runs {
            write_file(&dir.join(format!("{}.csv", r.model.approach)), &write_scores_csv(&r.scores)?)?;
        }
    }

    let reports = output.reports();
    if let Some(out) = or_config(args.out.clone(), cfg, "out")? {
        write_file(&out, &reports_to_json(&reports)?)?;
    }
    let mut text = render_report(&reports);
    if args.points {
        for r in &reports {
            text.push('\n');
            text.push_str(&render_points(r));
        }
    }
    emit(&text)
}

fn cmd_synth(ctx: &Ctx, args: SynthArgs) -> Result<()> {
    let corpus = generate(&SynthConfig {
        seed: args.seed,
        n_docs: args.docs,
        n_categories: args.categories,
        undertrained: args.undertrained,
        train_fraction: args.train_fraction,
        ..SynthConfig::default()
    })?;
    match &args.out {
        Some(path) => write_file(path, &corpus.corpus_text())?,
        None => emit(&corpus.corpus_text())?,
    }
    if let Some(path) = &args.lexicon_out {
        write_file(path, &corpus.lexicon_text())?;
    }
    // the train count is needed to reproduce the intended split
    eprintln!("train_count={}", corpus.train_count);
    ctx.note(format!("undertrained: {}", corpus.undertrained.join(" ")));
    Ok(())
}

fn read_inputs(files: &[PathBuf]) -> Result<Vec<(String, Vec<u8>)>> {
    if files.is_empty() {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| Error::io("<stdin>", e))?;
        return Ok(vec![("-".to_string(), buf)]);
    }
    files
        .iter()
        .map(|p| {
            std::fs::read(p)
                .map(|b| (p.display().to_string(), b))
                .map_err(|e| Error::io(p, e))
        })
        .collect()
}

fn cmd_classify(ctx: &Ctx, args: ClassifyArgs) -> Result<()> {
    let (model, df) = load_model(&args.model)?;
    let df = df.ok_or_else(|| {
        Error::ModelFormat(format!(
            "{} has no df table; save models with `run --cache`",
            args.model.display()
        ))
    })?;
    ctx.note(format!("{} model, {} categories", model.approach, model.category_count()));

    let mut docs: Vec<(String, Document)> = Vec::new();
    for (i, (name, bytes)) in read_inputs(&args.files)?.into_iter().enumerate() {
        if args.records {
            for d in parse_collection(&bytes)?.documents {
                docs.push((d.doc_id.to_string(), d));
            }
        } else {
            let doc = Document {
                doc_id: i as u32 + 1,
                split: Split::Test,
                annotation: None,
                dateline: String::new(),
                title: String::new(),
                body: String::from_utf8_lossy(&bytes).into_owned(),
                topics: Default::default(),
            };
            docs.push((name, doc));
        }
    }

    let mut text = String::new();
    for (name, doc) in &docs {
        let mut scores: Vec<_> = classify(doc, &model, &df).into_iter().filter(|s| s.score > 0.0).collect();
        scores.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.category.cmp(&b.category)));
        if args.top > 0 {
            scores.truncate(args.top);
        }
        for s in scores {
            text.push_str(&format!("{name}\t{}\t{:.6}\n", s.category, s.score));
        }
    }
    emit(&text)
}
