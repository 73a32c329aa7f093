//! Command-line front end: one executable whose subcommands chain the
//! library into a pipeline — annotate a corpus, inspect it, train a
//! tagger, cross-validate or ablate it, dump predictions, replay a talk
//! against the clock, and render saved reports.
//!
//! Every run writes a single-line JSON manifest to stderr recording the
//! resolved configuration and the SHA-256 of each input file, so any
//! output artifact can be traced back to exactly what produced it. Data
//! goes to stdout or `--out`; diagnostics and progress go to stderr.
//! Optional flags fall back to values from a `--config` TOML file before
//! their built-in defaults.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::thread;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::annotate::{
    annotate_corpus, annotation_stats, gold_tags, load_human_annotations, Tag,
};
use crate::corpus::{
    load_bilingual_dictionary, load_corpus, load_frequency_table, load_pronunciation_dict,
    load_talk_glossaries, write_corpus, FrequencyTable, PronunciationDictionary, Rank, Resources,
};
use crate::error::{Error, Result};
use crate::eval::{ablation, write_pr_csv, CvOptions, EvalReport};
use crate::features::{FeatureConfig, FeatureGroup};
use crate::model::{load_model, model_to_string, save_model, train_traced, ClassWeightMode, TrainConfig};
use crate::tagger::{extract_examples, tag_sentence, HistoryMode, StreamTagger};

#[derive(Parser)]
#[command(name = "itl", version, about = "Tag source words an interpreter is likely to leave untranslated")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Judge term coverage against reference and renditions, write the annotated corpus
    Annotate(AnnotateArgs),
    /// Summarize the annotations stored in a corpus
    Stats(StatsArgs),
    /// Train a tagging model on annotated talks
    Train(TrainArgs),
    /// Leave-one-talk-out cross-validation against the baselines
    Cv(CvArgs),
    /// Cross-validation with feature groups dropped one at a time
    Ablate(CvArgs),
    /// Dump batch predictions for every token as TSV
    Predict(PredictArgs),
    /// Replay a corpus through the incremental tagger, paced by word timings
    Stream(StreamArgs),
    /// Render a saved evaluation report
    Report(ReportArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML file of defaults for optional flags; explicit flags win.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Seed for every stochastic step.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the data output here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

/// Optional-flag defaults readable from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileDefaults {
    seed: Option<u64>,
    jobs: Option<usize>,
    window: Option<usize>,
    bins: Option<usize>,
    horizon: Option<f64>,
    features: Option<String>,
    c: Option<f64>,
    epochs: Option<usize>,
    class_weight: Option<String>,
    grid: Option<String>,
    threshold: Option<f64>,
    bootstrap: Option<usize>,
    speed: Option<f64>,
}

impl CommonArgs {
    fn file_defaults(&self) -> Result<FileDefaults> {
        let Some(path) = &self.config else {
            return Ok(FileDefaults::default());
        };
        let text = fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::parse(&path.display().to_string(), 1, e.to_string()))
    }

    fn seed(&self, defaults: &FileDefaults) -> u64 {
        self.seed.or(defaults.seed).unwrap_or(42)
    }

    fn out_writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

#[derive(Args)]
struct FeatureArgs {
    /// Sliding-window size: the current word plus window-1 predecessors.
    #[arg(long)]
    window: Option<usize>,
    /// Number of log-frequency bins.
    #[arg(long)]
    bins: Option<usize>,
    /// Speech-pace horizon in seconds.
    #[arg(long)]
    horizon: Option<f64>,
    /// Feature groups to enable, comma-separated (default: all).
    #[arg(long, value_delimiter = ',')]
    features: Vec<FeatureGroup>,
}

impl FeatureArgs {
    fn resolve(&self, defaults: &FileDefaults) -> Result<FeatureConfig> {
        let mut config = FeatureConfig::default();
        if let Some(w) = self.window.or(defaults.window) {
            config.window_size = w;
        }
        if let Some(b) = self.bins.or(defaults.bins) {
            config.frequency_bins = b;
        }
        if let Some(h) = self.horizon.or(defaults.horizon) {
            config.timing_horizon = h;
        }
        if !self.features.is_empty() {
            config.enabled = self.features.iter().copied().collect();
        } else if let Some(csv) = &defaults.features {
            config.enabled = csv
                .split(',')
                .map(|s| s.trim().parse().map_err(Error::domain))
                .collect::<Result<_>>()?;
        }
        config.validate()?;
        Ok(config)
    }
}

/// Lookup files behind the feature extractor.
#[derive(Args)]
struct ResourceArgs {
    /// Bilingual dictionary TSV (source<TAB>target); repeatable.
    #[arg(long, value_name = "FILE")]
    dict: Vec<PathBuf>,
    /// Word-frequency TSV (word<TAB>count).
    #[arg(long, value_name = "FILE")]
    freq: Option<PathBuf>,
    /// Pronunciation dictionary in CMU format.
    #[arg(long, value_name = "FILE")]
    cmudict: Option<PathBuf>,
}

impl ResourceArgs {
    fn load(&self) -> Result<Resources> {
        Ok(Resources {
            dictionary: load_bilingual_dictionary(&self.dict)?,
            frequency: match &self.freq {
                Some(path) => load_frequency_table(path)?,
                None => FrequencyTable::default(),
            },
            pronunciations: match &self.cmudict {
                Some(path) => load_pronunciation_dict(path)?,
                None => PronunciationDictionary::default(),
            },
        })
    }

    fn input_paths(&self) -> Vec<&Path> {
        self.dict
            .iter()
            .map(PathBuf::as_path)
            .chain(self.freq.as_deref())
            .chain(self.cmudict.as_deref())
            .collect()
    }
}

#[derive(Args)]
struct AnnotateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Line-delimited sentence corpus.
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,
    /// Bilingual dictionary TSV; repeatable.
    #[arg(long, value_name = "FILE")]
    dict: Vec<PathBuf>,
    /// Directory of per-talk glossaries, one <talk_id>.tsv each.
    #[arg(long, value_name = "DIR")]
    glossary: Option<PathBuf>,
    /// Human verdicts TSV overriding the automatic judgment.
    #[arg(long, value_name = "FILE")]
    human: Option<PathBuf>,
    /// Interpreter ranks to judge; repeatable (default: every rank present).
    #[arg(long = "rank")]
    ranks: Vec<Rank>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Annotated corpus to summarize.
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    resources: ResourceArgs,
    /// Annotated corpus to train on.
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,
    /// Interpreter rank whose untranslated terms are the targets.
    #[arg(long)]
    rank: Rank,
    /// Soft-margin cost.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    /// inverse_frequency | uniform
    #[arg(long)]
    class_weight: Option<ClassWeightMode>,
}

#[derive(Args)]
struct CvArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    resources: ResourceArgs,
    /// Annotated corpus of at least three talks.
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,
    /// Interpreter rank whose untranslated terms are the targets.
    #[arg(long)]
    rank: Rank,
    /// Soft-margin costs to try per fold: comma-separated values or "default".
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    epochs: Option<usize>,
    /// inverse_frequency | uniform
    #[arg(long)]
    class_weight: Option<ClassWeightMode>,
    /// Worker threads for fold/variant jobs.
    #[arg(long)]
    jobs: Option<usize>,
    /// Resampling iterations for the significance tests.
    #[arg(long)]
    bootstrap: Option<usize>,
    /// Feature groups to drop one at a time, comma-separated.
    /// `ablate` with no flag drops each ablatable group in turn.
    #[arg(long, value_delimiter = ',')]
    ablate: Vec<FeatureGroup>,
    /// Also write one PR-curve CSV per system into this directory.
    #[arg(long, value_name = "DIR")]
    pr_dir: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    resources: ResourceArgs,
    /// Corpus to tag.
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,
    /// Trained model file.
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    /// Decision threshold for the reported label.
    #[arg(long)]
    threshold: Option<f64>,
    /// Fill the gold column from this rank's annotations.
    #[arg(long)]
    rank: Option<Rank>,
}

#[derive(Args)]
struct StreamArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    resources: ResourceArgs,
    /// Corpus to replay in talk order.
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,
    /// Trained model file.
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    /// Scores above this raise an ALERT.
    #[arg(long)]
    threshold: Option<f64>,
    /// Playback speed multiplier; 0 replays as fast as possible.
    #[arg(long)]
    speed: Option<f64>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Evaluation report JSON as written by `cv` or `ablate`.
    #[arg(long, value_name = "FILE")]
    report: PathBuf,
    /// Also write one PR-curve CSV per system into this directory.
    #[arg(long, value_name = "DIR")]
    pr_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    version: String,
    seed: u64,
    config: serde_json::Value,
    /// SHA-256 per input file.
    inputs: BTreeMap<String, String>,
}

fn file_digest(path: &Path) -> Result<String> {
    let mut hasher = Sha256::new();
    hasher.update(fs::read(path)?);
    Ok(hasher.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

fn emit_manifest(command: &str, seed: u64, config: serde_json::Value, inputs: &[&Path]) -> Result<()> {
    let mut digests = BTreeMap::new();
    for path in inputs {
        digests.insert(path.display().to_string(), file_digest(path)?);
    }
    let manifest = RunManifest {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        config,
        inputs: digests,
    };
    eprintln!("{}", serde_json::to_string(&manifest).expect("manifest serializes"));
    Ok(())
}

fn group_names(config: &FeatureConfig) -> Vec<&'static str> {
    FeatureGroup::ALL.iter().filter(|g| config.enabled(**g)).map(|g| g.as_str()).collect()
}

fn tag_str(tag: Tag) -> &'static str {
    match tag {
        Tag::I => "I",
        Tag::O => "O",
    }
}

/// Parse and run a full command line; returns the process exit status.
/// 0 success, 1 domain or input error, 2 usage error.
pub fn cmd_dispatch(argv: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = err.exit_code();
            let _ = err.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Annotate(args) => cmd_annotate(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Train(args) => cmd_train(args),
        Command::Cv(args) => cmd_cv(args, false),
        Command::Ablate(args) => cmd_cv(args, true),
        Command::Predict(args) => cmd_predict(args),
        Command::Stream(args) => cmd_stream(args),
        Command::Report(args) => cmd_report(args),
    }
}

fn cmd_annotate(args: AnnotateArgs) -> Result<()> {
    let defaults = args.common.file_defaults()?;
    let ranks: Vec<String> = args.ranks.iter().map(|r| r.as_str().to_string()).collect();
    let mut inputs: Vec<&Path> = vec![&args.corpus];
    inputs.extend(args.dict.iter().map(PathBuf::as_path));
    inputs.extend(args.human.as_deref());
    emit_manifest(
        "annotate",
        args.common.seed(&defaults),
        serde_json::json!({
            "ranks": ranks,
            "glossary_dir": args.glossary.as_ref().map(|p| p.display().to_string()),
        }),
        &inputs,
    )?;

    let mut talks = load_corpus(&args.corpus)?;
    let dictionary = load_bilingual_dictionary(&args.dict)?;
    if let Some(dir) = &args.glossary {
        let loaded = load_talk_glossaries(dir, &mut talks)?;
        eprintln!("loaded {loaded} talk glossaries");
    }
    let human = match &args.human {
        Some(path) => load_human_annotations(path)?,
        None => Vec::new(),
    };
    let wanted = (!args.ranks.is_empty()).then_some(args.ranks.as_slice());
    let summary = annotate_corpus(&mut talks, &dictionary, &human, wanted)?;
    eprintln!(
        "annotated {} sentences: {} terms, {} spans, {} flagged for review",
        summary.sentences, summary.terms, summary.spans, summary.needs_review
    );
    let mut out = args.common.out_writer()?;
    write_corpus(&talks, &mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> Result<()> {
    let defaults = args.common.file_defaults()?;
    emit_manifest("stats", args.common.seed(&defaults), serde_json::json!({}), &[&args.corpus])?;
    let talks = load_corpus(&args.corpus)?;
    let stats = annotation_stats(&talks);
    let mut out = args.common.out_writer()?;
    write!(out, "{stats}")?;
    out.flush()?;
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let defaults = args.common.file_defaults()?;
    let feature_config = args.features.resolve(&defaults)?;
    let class_weight_mode = resolve_class_weight(args.class_weight, &defaults)?;
    let config = TrainConfig {
        c: args.c.or(defaults.c).unwrap_or(1.0),
        epochs: args.epochs.or(defaults.epochs).unwrap_or(20),
        seed: args.common.seed(&defaults),
        class_weight_mode,
    };
    let mut inputs: Vec<&Path> = vec![&args.corpus];
    inputs.extend(args.resources.input_paths());
    emit_manifest(
        "train",
        config.seed,
        serde_json::json!({
            "rank": args.rank.as_str(),
            "c": config.c,
            "epochs": config.epochs,
            "class_weight": class_weight_mode.as_str(),
            "window": feature_config.window_size,
            "bins": feature_config.frequency_bins,
            "horizon": feature_config.timing_horizon,
            "features": group_names(&feature_config),
        }),
        &inputs,
    )?;

    let talks = load_corpus(&args.corpus)?;
    let resources = args.resources.load()?;
    let examples = extract_examples(&talks, args.rank, &feature_config, &resources, HistoryMode::Gold)?;
    let positives = examples.iter().filter(|(_, t)| *t == Tag::I).count();
    let (model, trace) = train_traced(&examples, &config)?;
    eprintln!(
        "trained on {} candidates ({} positive); objective {:.6} -> {:.6}",
        examples.len(),
        positives,
        trace.first().copied().unwrap_or(f64::NAN),
        trace.last().copied().unwrap_or(f64::NAN),
    );
    match &args.common.out {
        Some(path) => save_model(path, &model, &feature_config)?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(model_to_string(&model, &feature_config).as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn resolve_class_weight(
    flag: Option<ClassWeightMode>,
    defaults: &FileDefaults,
) -> Result<ClassWeightMode> {
    match (flag, &defaults.class_weight) {
        (Some(mode), _) => Ok(mode),
        (None, Some(name)) => ClassWeightMode::from_str(name).map_err(Error::domain),
        (None, None) => Ok(ClassWeightMode::InverseFrequency),
    }
}

fn parse_grid(spec: Option<String>) -> Result<Vec<f64>> {
    let default = CvOptions::new(Rank::B).grid;
    match spec.as_deref() {
        None | Some("default") => Ok(default),
        Some(csv) => csv
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<f64>().map_err(|e| Error::domain(format!("bad grid value {s:?}: {e}")))
            })
            .collect(),
    }
}

fn cmd_cv(args: CvArgs, drop_each_group: bool) -> Result<()> {
    let defaults = args.common.file_defaults()?;
    let mut opts = CvOptions::new(args.rank);
    opts.feature_config = args.features.resolve(&defaults)?;
    opts.grid = parse_grid(args.grid.or(defaults.grid.clone()))?;
    opts.epochs = args.epochs.or(defaults.epochs).unwrap_or(opts.epochs);
    opts.seed = args.common.seed(&defaults);
    opts.class_weight_mode = resolve_class_weight(args.class_weight, &defaults)?;
    opts.jobs = args.jobs.or(defaults.jobs).unwrap_or(opts.jobs);
    opts.bootstrap_iterations = args.bootstrap.or(defaults.bootstrap).unwrap_or(opts.bootstrap_iterations);
    let ablate: Vec<FeatureGroup> = if !args.ablate.is_empty() {
        args.ablate.clone()
    } else if drop_each_group {
        FeatureGroup::ABLATABLE.to_vec()
    } else {
        Vec::new()
    };

    let mut inputs: Vec<&Path> = vec![&args.corpus];
    inputs.extend(args.resources.input_paths());
    emit_manifest(
        if drop_each_group { "ablate" } else { "cv" },
        opts.seed,
        serde_json::json!({
            "rank": args.rank.as_str(),
            "grid": opts.grid,
            "epochs": opts.epochs,
            "class_weight": opts.class_weight_mode.as_str(),
            "jobs": opts.jobs,
            "bootstrap": opts.bootstrap_iterations,
            "window": opts.feature_config.window_size,
            "bins": opts.feature_config.frequency_bins,
            "horizon": opts.feature_config.timing_horizon,
            "features": group_names(&opts.feature_config),
            "ablate": ablate.iter().map(|g| g.as_str()).collect::<Vec<_>>(),
        }),
        &inputs,
    )?;

    let talks = load_corpus(&args.corpus)?;
    let resources = args.resources.load()?;
    let report = ablation(&talks, &resources, &opts, &ablate)?;
    eprintln!("{report}");
    if let Some(dir) = &args.pr_dir {
        write_pr_files(&report, dir)?;
    }
    let mut out = args.common.out_writer()?;
    serde_json::to_writer_pretty(&mut out, &report)
        .map_err(|e| Error::domain(format!("cannot serialize report: {e}")))?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn write_pr_files(report: &EvalReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for system in &report.systems {
        let name: String = system
            .name
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
            .collect();
        let file = File::create(dir.join(format!("{name}.csv")))?;
        write_pr_csv(&system.pr_points, BufWriter::new(file))?;
    }
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let defaults = args.common.file_defaults()?;
    let threshold = args.threshold.or(defaults.threshold).unwrap_or(0.0);
    let mut inputs: Vec<&Path> = vec![&args.corpus, &args.model];
    inputs.extend(args.resources.input_paths());
    emit_manifest(
        "predict",
        args.common.seed(&defaults),
        serde_json::json!({
            "threshold": threshold,
            "rank": args.rank.map(|r| r.as_str()),
        }),
        &inputs,
    )?;

    let (model, feature_config) = load_model(&args.model)?;
    let talks = load_corpus(&args.corpus)?;
    let resources = args.resources.load()?;
    let mut out = args.common.out_writer()?;
    writeln!(out, "talk_id\tsentence_index\ttoken_index\tsurface\tis_candidate\tscore\tlabel\tgold")?;
    for talk in &talks {
        for triple in &talk.triples {
            let predictions =
                tag_sentence(&model, &feature_config, &resources, &triple.source, threshold)?;
            let gold = args.rank.map(|rank| gold_tags(triple, rank)).transpose()?;
            for (token, prediction) in triple.source.tokens.iter().zip(&predictions) {
                let score = prediction.score.map_or_else(|| "-".to_string(), |s| s.to_string());
                let gold_column =
                    gold.as_ref().map_or("-", |tags| tag_str(tags.tags[prediction.index]));
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    talk.talk_id,
                    triple.source.sentence_index,
                    prediction.index,
                    token.surface,
                    prediction.is_candidate,
                    score,
                    tag_str(prediction.label),
                    gold_column,
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_stream(args: StreamArgs) -> Result<()> {
    let defaults = args.common.file_defaults()?;
    let threshold = args.threshold.or(defaults.threshold).unwrap_or(0.0);
    let speed = args.speed.or(defaults.speed).unwrap_or(1.0);
    if speed < 0.0 || !speed.is_finite() {
        return Err(Error::domain(format!("speed must be finite and non-negative, got {speed}")));
    }
    let mut inputs: Vec<&Path> = vec![&args.corpus, &args.model];
    inputs.extend(args.resources.input_paths());
    emit_manifest(
        "stream",
        args.common.seed(&defaults),
        serde_json::json!({ "threshold": threshold, "speed": speed }),
        &inputs,
    )?;

    let (model, feature_config) = load_model(&args.model)?;
    let talks = load_corpus(&args.corpus)?;
    let resources = args.resources.load()?;
    let mut out = args.common.out_writer()?;
    for talk in &talks {
        let mut tagger = StreamTagger::new(&model, &feature_config, &resources, threshold)?;
        let mut previous_start: Option<f64> = None;
        for triple in &talk.triples {
            for token in &triple.source.tokens {
                if speed > 0.0 {
                    let gap = token.start_time - previous_start.unwrap_or(token.start_time);
                    if gap > 0.0 {
                        thread::sleep(Duration::from_secs_f64(gap / speed));
                    }
                }
                previous_start = Some(token.start_time);
                let prediction = tagger.push(triple.source.sentence_index, token)?;
                write!(
                    out,
                    "{:9.2}  {}  {}:{}\t{}",
                    token.start_time,
                    talk.talk_id,
                    triple.source.sentence_index,
                    prediction.index,
                    token.surface,
                )?;
                if let Some(score) = prediction.score {
                    write!(out, "\tscore={score:+.4}")?;
                    if score > threshold {
                        write!(out, "\tALERT")?;
                    }
                }
                writeln!(out)?;
                if speed > 0.0 {
                    out.flush()?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let defaults = args.common.file_defaults()?;
    emit_manifest(
        "report",
        args.common.seed(&defaults),
        serde_json::json!({ "pr_dir": args.pr_dir.as_ref().map(|p| p.display().to_string()) }),
        &[&args.report],
    )?;
    let text = fs::read_to_string(&args.report)?;
    let report: EvalReport = serde_json::from_str(&text)
        .map_err(|e| Error::parse(&args.report.display().to_string(), e.line(), e.to_string()))?;
    if let Some(dir) = &args.pr_dir {
        write_pr_files(&report, dir)?;
    }
    let mut out = args.common.out_writer()?;
    write!(out, "{report}")?;
    out.flush()?;
    Ok(())
}
