//! Evaluation: PR curves, average precision, paired bootstrap significance,
//! leave-one-talk-out cross-validation, and feature-group ablations.
//!
//! Evaluation is word-level: every token of the test talk is ranked, with
//! non-candidate tokens given a score below every candidate. Because
//! non-candidates are never gold-positive this padding leaves average
//! precision unchanged, while keeping one row per word. Cross-validation
//! rotates the test talk; the development talk is always the next one
//! cyclically, and is used only to pick hyperparameters — models never see
//! dev or test tokens during training.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::annotate::{gold_tags, Tag};
use crate::corpus::{Rank, Resources, SourceSentence, Talk};
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, FeatureGroup};
use crate::model::{train, ClassWeightMode, TrainConfig};
use crate::tagger::{baseline_frequency, baseline_select_pos, tag_sentence, extract_examples, HistoryMode, TokenPrediction};

/// Parallel lists of decision scores, gold labels, and sentence ids.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScoredSet {
    pub scores: Vec<f64>,
    pub gold: Vec<bool>,
    pub sentences: Vec<usize>,
}

impl ScoredSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, score: f64, gold: bool, sentence: usize) {
        self.scores.push(score);
        self.gold.push(gold);
        self.sentences.push(sentence);
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    fn check(&self) -> Result<()> {
        if self.scores.len() != self.gold.len() || self.scores.len() != self.sentences.len() {
            return Err(Error::metric("scores, gold, and sentence lists differ in length"));
        }
        if self.scores.iter().any(|s| s.is_nan()) {
            return Err(Error::metric("scores contain NaN"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// One point per distinct score, descending; ties share a point. A token
/// counts as predicted-positive when its score is >= the threshold.
pub fn pr_curve(set: &ScoredSet) -> Result<Vec<PrPoint>> {
    set.check()?;
    let positives = set.gold.iter().filter(|g| **g).count();
    if positives == 0 {
        return Err(Error::metric("cannot draw a PR curve without positives"));
    }
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.sort_by(|a, b| set.scores[*b].partial_cmp(&set.scores[*a]).expect("no NaN"));

    let mut points = Vec::new();
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let threshold = set.scores[order[i]];
        while i < order.len() && set.scores[order[i]] == threshold {
            if set.gold[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(PrPoint {
            threshold,
            precision: tp as f64 / (tp + fp) as f64,
            recall: tp as f64 / positives as f64,
        });
    }
    Ok(points)
}

/// Recall-increment-weighted mean of precisions along the PR curve.
pub fn average_precision(set: &ScoredSet) -> Result<f64> {
    let points = pr_curve(set)?;
    let mut ap = 0.0;
    let mut last_recall = 0.0;
    for point in points {
        ap += (point.recall - last_recall) * point.precision;
        last_recall = point.recall;
    }
    Ok(ap)
}

/// CSV export: `threshold,precision,recall`, one row per PR point.
pub fn write_pr_csv<W: Write>(points: &[PrPoint], mut out: W) -> Result<()> {
    writeln!(out, "threshold,precision,recall")?;
    for p in points {
        writeln!(out, "{},{},{}", p.threshold, p.precision, p.recall)?;
    }
    Ok(())
}

/// Paired bootstrap over sentences: resample sentences with replacement,
/// recompute both systems' AP each time, and report how often the system
/// that is worse on the full data comes out at least as good. Resamples
/// where the two APs tie — including resamples with no positive tokens —
/// count half.
pub fn paired_bootstrap(a: &ScoredSet, b: &ScoredSet, iterations: usize, seed: u64) -> Result<f64> {
    a.check()?;
    b.check()?;
    if a.gold != b.gold || a.sentences != b.sentences {
        return Err(Error::domain("paired bootstrap needs identical gold and sentence structure"));
    }
    if iterations == 0 {
        return Err(Error::domain("paired bootstrap needs at least one iteration"));
    }
    let ap_a = average_precision(a)?;
    let ap_b = average_precision(b)?;
    let (worse, better) = if ap_b < ap_a { (b, a) } else { (a, b) };

    let mut by_sentence: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, sid) in a.sentences.iter().enumerate() {
        by_sentence.entry(*sid).or_default().push(i);
    }
    let sentence_rows: Vec<&Vec<usize>> = by_sentence.values().collect();
    let n = sentence_rows.len();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wins = 0.0f64;
    for _ in 0..iterations {
        let mut sample_worse = ScoredSet::new();
        let mut sample_better = ScoredSet::new();
        for _ in 0..n {
            let pick = rng.random_range(0..n);
            for &row in sentence_rows[pick] {
                sample_worse.push(worse.scores[row], worse.gold[row], worse.sentences[row]);
                sample_better.push(better.scores[row], better.gold[row], better.sentences[row]);
            }
        }
        if !sample_worse.gold.iter().any(|g| *g) {
            wins += 0.5;
            continue;
        }
        let ap_w = average_precision(&sample_worse)?;
        let ap_b = average_precision(&sample_better)?;
        if ap_w > ap_b {
            wins += 1.0;
        } else if ap_w == ap_b {
            wins += 0.5;
        }
    }
    Ok(wins / iterations as f64)
}

/// One leave-one-talk-out fold: indices into the talk list.
#[derive(Clone, Debug, PartialEq)]
pub struct Fold {
    pub test: usize,
    pub dev: usize,
    pub train: Vec<usize>,
}

/// Rotate the test talk through the corpus; dev is the next talk
/// cyclically and the rest train.
pub fn fold_plan(talks: usize) -> Result<Vec<Fold>> {
    if talks < 3 {
        return Err(Error::domain(format!(
            "leave-one-out needs at least 3 talks, got {talks}"
        )));
    }
    Ok((0..talks)
        .map(|test| {
            let dev = (test + 1) % talks;
            let train = (0..talks).filter(|i| *i != test && *i != dev).collect();
            Fold { test, dev, train }
        })
        .collect())
}

#[derive(Clone, Debug)]
pub struct CvOptions {
    pub rank: Rank,
    /// Soft-margin costs to try per fold.
    pub grid: Vec<f64>,
    pub feature_config: FeatureConfig,
    pub epochs: usize,
    pub seed: u64,
    pub class_weight_mode: ClassWeightMode,
    /// Worker threads for fold/variant jobs.
    pub jobs: usize,
    pub bootstrap_iterations: usize,
}

impl CvOptions {
    pub fn new(rank: Rank) -> Self {
        CvOptions {
            rank,
            grid: vec![0.01, 0.1, 1.0, 10.0, 100.0],
            feature_config: FeatureConfig::default(),
            epochs: 20,
            seed: 42,
            class_weight_mode: ClassWeightMode::InverseFrequency,
            jobs: 1,
            bootstrap_iterations: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemEval {
    pub name: String,
    /// Test AP per fold, aligned with the report's talk order.
    pub fold_ap: Vec<f64>,
    pub mean_ap: f64,
    /// AP over all folds' test tokens pooled into one ranking.
    pub pooled_ap: f64,
    /// Hyperparameter chosen per fold on the dev talk ("-" when none).
    pub chosen: Vec<String>,
    /// Per-fold digests of the trained models (empty for baselines).
    pub model_digest: Vec<String>,
    /// PR curve of the pooled ranking.
    pub pr_points: Vec<PrPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapComparison {
    pub baseline: String,
    pub system: String,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rank: Rank,
    /// Held-out talk id per fold.
    pub fold_talks: Vec<String>,
    pub systems: Vec<SystemEval>,
    pub comparisons: Vec<BootstrapComparison>,
    pub bootstrap_iterations: usize,
}

/// Candidate scores before padding: score is absent for non-candidates.
#[derive(Clone, Debug, Default)]
struct RawScores {
    entries: Vec<(Option<f64>, bool, usize)>,
}

impl RawScores {
    fn min_candidate(&self) -> Option<f64> {
        self.entries
            .iter()
            .filter_map(|(s, _, _)| *s)
            .fold(None, |acc, s| Some(acc.map_or(s, |a: f64| a.min(s))))
    }

    /// Pad non-candidates just below the given floor reference.
    fn materialize(&self, min_candidate: Option<f64>) -> ScoredSet {
        let floor = min_candidate.unwrap_or(0.0) - 1.0;
        let mut set = ScoredSet::new();
        for (score, gold, sentence) in &self.entries {
            set.push(score.unwrap_or(floor), *gold, *sentence);
        }
        set
    }
}

fn pool(raw: &[RawScores]) -> ScoredSet {
    let min = raw
        .iter()
        .filter_map(RawScores::min_candidate)
        .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.min(s))));
    let mut combined = RawScores::default();
    for r in raw {
        combined.entries.extend(r.entries.iter().cloned());
    }
    combined.materialize(min)
}

/// Stable sentence ids across the whole corpus, shared by every system so
/// paired comparisons line up.
fn sentence_ids(talks: &[Talk]) -> BTreeMap<(usize, usize), usize> {
    let mut ids = BTreeMap::new();
    let mut next = 0usize;
    for (t, talk) in talks.iter().enumerate() {
        for triple in &talk.triples {
            ids.insert((t, triple.source.sentence_index), next);
            next += 1;
        }
    }
    ids
}

fn score_talk<F>(
    talk: &Talk,
    talk_idx: usize,
    ids: &BTreeMap<(usize, usize), usize>,
    rank: Rank,
    mut predict: F,
) -> Result<RawScores>
where
    F: FnMut(&SourceSentence) -> Result<Vec<TokenPrediction>>,
{
    let mut out = RawScores::default();
    for triple in &talk.triples {
        let gold = gold_tags(triple, rank)?;
        let predictions = predict(&triple.source)?;
        let sid = ids[&(talk_idx, triple.source.sentence_index)];
        for (p, g) in predictions.iter().zip(&gold.tags) {
            out.entries.push((p.score, *g == Tag::I, sid));
        }
    }
    Ok(out)
}

fn require_positives(set: &ScoredSet, what: &str) -> Result<()> {
    if !set.gold.iter().any(|g| *g) {
        return Err(Error::metric(format!("{what} has no positive tokens")));
    }
    Ok(())
}

struct FoldOutcome {
    chosen: String,
    digest: String,
    test: RawScores,
}

fn svm_fold(
    talks: &[Talk],
    resources: &Resources,
    opts: &CvOptions,
    feature_config: &FeatureConfig,
    fold: &Fold,
    ids: &BTreeMap<(usize, usize), usize>,
) -> Result<FoldOutcome> {
    let train_talks: Vec<Talk> = fold.train.iter().map(|i| talks[*i].clone()).collect();
    let examples = extract_examples(&train_talks, opts.rank, feature_config, resources, HistoryMode::Gold)?;

    let mut best: Option<(f64, f64, crate::model::LinearModel)> = None;
    for &c in &opts.grid {
        let config = TrainConfig {
            c,
            epochs: opts.epochs,
            seed: opts.seed,
            class_weight_mode: opts.class_weight_mode,
        };
        let model = train(&examples, &config)?;
        let dev = score_talk(&talks[fold.dev], fold.dev, ids, opts.rank, |s| {
            tag_sentence(&model, feature_config, resources, s, 0.0)
        })?;
        let dev_set = dev.materialize(dev.min_candidate());
        require_positives(&dev_set, &format!("dev talk {}", talks[fold.dev].talk_id))?;
        let ap = average_precision(&dev_set)?;
        if best.as_ref().is_none_or(|(b, _, _)| ap > *b) {
            best = Some((ap, c, model));
        }
    }
    let (_, c, model) = best.expect("non-empty grid");
    let test = score_talk(&talks[fold.test], fold.test, ids, opts.rank, |s| {
        tag_sentence(&model, feature_config, resources, s, 0.0)
    })?;
    Ok(FoldOutcome {
        chosen: format!("c={c}"),
        digest: model.digest(feature_config),
        test,
    })
}

/// Binarize candidate rarity scores at a threshold: 1 above, 0 at or below.
fn binarize(raw: &RawScores, threshold: f64) -> RawScores {
    RawScores {
        entries: raw
            .entries
            .iter()
            .map(|(s, g, sid)| (s.map(|v| if v > threshold { 1.0 } else { 0.0 }), *g, *sid))
            .collect(),
    }
}

fn freq_fold(
    talks: &[Talk],
    resources: &Resources,
    opts: &CvOptions,
    fold: &Fold,
    ids: &BTreeMap<(usize, usize), usize>,
) -> Result<FoldOutcome> {
    let rarity = |s: &SourceSentence| Ok(baseline_frequency(s, &resources.frequency, f64::INFINITY));
    let dev = score_talk(&talks[fold.dev], fold.dev, ids, opts.rank, rarity)?;

    let mut candidates: BTreeSet<u64> = BTreeSet::new();
    for (score, _, _) in &dev.entries {
        if let Some(s) = score {
            candidates.insert(s.to_bits());
        }
    }
    let mut thresholds: Vec<f64> = candidates.into_iter().map(f64::from_bits).collect();
    thresholds.sort_by(|a, b| a.partial_cmp(b).expect("rarity scores are finite"));
    if let Some(min) = thresholds.first().copied() {
        thresholds.insert(0, min - 1.0);
    } else {
        thresholds.push(0.0);
    }

    let mut best: Option<(f64, f64)> = None;
    for &threshold in &thresholds {
        let binarized = binarize(&dev, threshold);
        let set = binarized.materialize(binarized.min_candidate());
        require_positives(&set, &format!("dev talk {}", talks[fold.dev].talk_id))?;
        let ap = average_precision(&set)?;
        if best.as_ref().is_none_or(|(b, _)| ap > *b) {
            best = Some((ap, threshold));
        }
    }
    let (_, threshold) = best.expect("at least one threshold candidate");

    let test = score_talk(&talks[fold.test], fold.test, ids, opts.rank, rarity)?;
    Ok(FoldOutcome {
        chosen: format!("t={threshold:.4}"),
        digest: String::new(),
        test: binarize(&test, threshold),
    })
}

fn assemble_system(name: &str, folds: Vec<FoldOutcome>) -> Result<(SystemEval, ScoredSet)> {
    let mut fold_ap = Vec::with_capacity(folds.len());
    for outcome in &folds {
        let set = outcome.test.materialize(outcome.test.min_candidate());
        require_positives(&set, "test talk")?;
        fold_ap.push(average_precision(&set)?);
    }
    let raw: Vec<RawScores> = folds.iter().map(|f| f.test.clone()).collect();
    let pooled_set = pool(&raw);
    let pooled_ap = average_precision(&pooled_set)?;
    let pr_points = pr_curve(&pooled_set)?;
    let system = SystemEval {
        name: name.to_string(),
        mean_ap: fold_ap.iter().sum::<f64>() / fold_ap.len() as f64,
        fold_ap,
        pooled_ap,
        chosen: folds.iter().map(|f| f.chosen.clone()).collect(),
        model_digest: folds.iter().map(|f| f.digest.clone()).filter(|d| !d.is_empty()).collect(),
        pr_points,
    };
    Ok((system, pooled_set))
}

/// Cross-validate the full-featured tagger against both baselines.
pub fn cross_validate(talks: &[Talk], resources: &Resources, opts: &CvOptions) -> Result<EvalReport> {
    ablation(talks, resources, opts, &[])
}

/// Cross-validate the tagger with all features and once more per dropped
/// group, alongside the baselines. An empty drop list is a plain
/// cross-validation run.
pub fn ablation(
    talks: &[Talk],
    resources: &Resources,
    opts: &CvOptions,
    drop: &[FeatureGroup],
) -> Result<EvalReport> {
    opts.feature_config.validate()?;
    if opts.grid.is_empty() {
        return Err(Error::domain("hyperparameter grid is empty"));
    }
    let folds = fold_plan(talks.len())?;
    let ids = sentence_ids(talks);

    let mut variants: Vec<(String, FeatureConfig)> =
        vec![("svm:all".to_string(), opts.feature_config.clone())];
    let mut seen = BTreeSet::new();
    for group in drop {
        if !opts.feature_config.enabled(*group) {
            return Err(Error::domain(format!(
                "cannot ablate {group}: not enabled in the feature configuration"
            )));
        }
        if seen.insert(*group) {
            variants.push((format!("svm:-{group}"), opts.feature_config.without(*group)));
        }
    }

    // Baselines are cheap; run them inline.
    let mut select_pos_folds = Vec::with_capacity(folds.len());
    let mut freq_folds = Vec::with_capacity(folds.len());
    for fold in &folds {
        let test = score_talk(&talks[fold.test], fold.test, &ids, opts.rank, |s| {
            Ok(baseline_select_pos(s))
        })?;
        select_pos_folds.push(FoldOutcome { chosen: "-".to_string(), digest: String::new(), test });
        freq_folds.push(freq_fold(talks, resources, opts, fold, &ids)?);
    }

    // SVM variants: one job per (variant, fold).
    let jobs: Vec<(usize, usize)> = (0..variants.len())
        .flat_map(|v| (0..folds.len()).map(move |f| (v, f)))
        .collect();
    let results: Mutex<Vec<Option<Result<FoldOutcome>>>> =
        Mutex::new((0..jobs.len()).map(|_| None).collect());
    let next_job = AtomicUsize::new(0);
    let workers = opts.jobs.max(1).min(jobs.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let j = next_job.fetch_add(1, Ordering::SeqCst);
                if j >= jobs.len() {
                    break;
                }
                let (v, f) = jobs[j];
                let outcome = svm_fold(talks, resources, opts, &variants[v].1, &folds[f], &ids);
                results.lock().expect("results lock poisoned")[j] = Some(outcome);
            });
        }
    });

    let mut outcomes = results.into_inner().expect("results lock poisoned");
    let mut assembled = vec![
        assemble_system("select_pos", select_pos_folds)?,
        assemble_system("freq_threshold", freq_folds)?,
    ];
    for (v, (name, _)) in variants.iter().enumerate() {
        let folds_for_variant: Result<Vec<FoldOutcome>> = (0..folds.len())
            .map(|f| outcomes[v * folds.len() + f].take().expect("job completed"))
            .collect();
        assembled.push(assemble_system(name, folds_for_variant?)?);
    }

    // Significance of every trained system against both baselines, on the
    // pooled rankings (identical token structure across systems).
    let mut comparisons = Vec::new();
    for (system, system_pool) in assembled.iter().skip(2) {
        for (baseline, baseline_pool) in assembled.iter().take(2) {
            comparisons.push(BootstrapComparison {
                baseline: baseline.name.clone(),
                system: system.name.clone(),
                p_value: paired_bootstrap(
                    baseline_pool,
                    system_pool,
                    opts.bootstrap_iterations,
                    opts.seed,
                )?,
            });
        }
    }

    Ok(EvalReport {
        rank: opts.rank,
        fold_talks: folds.iter().map(|f| talks[f.test].talk_id.clone()).collect(),
        systems: assembled.into_iter().map(|(system, _)| system).collect(),
        comparisons,
        bootstrap_iterations: opts.bootstrap_iterations,
    })
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "leave-one-talk-out evaluation, rank {} ({} folds; AP values x100)",
            self.rank,
            self.fold_talks.len()
        )?;
        let name_width = self
            .systems
            .iter()
            .map(|s| s.name.len())
            .max()
            .unwrap_or(6)
            .max("system".len());
        writeln!(f)?;
        writeln!(f, "  {:<name_width$}  {:>6}  {:>6}", "system", "mean", "pooled")?;
        for system in &self.systems {
            writeln!(
                f,
                "  {:<name_width$}  {:>6.1}  {:>6.1}",
                system.name,
                system.mean_ap * 100.0,
                system.pooled_ap * 100.0
            )?;
        }
        writeln!(f)?;
        writeln!(f, "per-fold test AP (held-out talk: {}):", self.fold_talks.join(" "))?;
        for system in &self.systems {
            let folds: Vec<String> =
                system.fold_ap.iter().map(|ap| format!("{:.1}", ap * 100.0)).collect();
            let chosen = if system.chosen.iter().all(|c| c == "-") {
                String::new()
            } else {
                format!("  [{}]", system.chosen.join(" "))
            };
            writeln!(f, "  {:<name_width$}  {}{}", system.name, folds.join(" "), chosen)?;
        }
        if !self.comparisons.is_empty() {
            writeln!(f)?;
            writeln!(
                f,
                "paired bootstrap on pooled rankings ({} resamples):",
                self.bootstrap_iterations
            )?;
            for cmp in &self.comparisons {
                writeln!(f, "  {} vs {}  p = {:.4}", cmp.system, cmp.baseline, cmp.p_value)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::{Coverage, TermSpan};
    use crate::corpus::{
        AlignedTriple, BilingualDictionary, FrequencyTable, PronunciationDictionary, Side, Token,
    };
    use proptest::prelude::*;

    fn scored(scores: &[f64], gold: &[u8]) -> ScoredSet {
        let mut set = ScoredSet::new();
        for (i, (s, g)) in scores.iter().zip(gold).enumerate() {
            set.push(*s, *g == 1, i);
        }
        set
    }

    #[test]
    fn pr_curve_matches_hand_computed_points() {
        let set = scored(&[0.9, 0.8, 0.7, 0.6], &[1, 0, 1, 0]);
        let points = pr_curve(&set).unwrap();
        let expected = [
            (0.9, 1.0, 0.5),
            (0.8, 0.5, 0.5),
            (0.7, 2.0 / 3.0, 1.0),
            (0.6, 0.5, 1.0),
        ];
        assert_eq!(points.len(), expected.len());
        for (got, (t, p, r)) in points.iter().zip(expected) {
            assert_eq!(got.threshold, t);
            assert!((got.precision - p).abs() < 1e-12);
            assert!((got.recall - r).abs() < 1e-12);
        }
        let ap = average_precision(&set).unwrap();
        assert!((ap - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_ranking_opens_at_the_top_right() {
        let set = scored(&[0.9, 0.8, 0.2, 0.1], &[1, 1, 0, 0]);
        let points = pr_curve(&set).unwrap();
        assert_eq!((points[0].precision, points[0].recall), (1.0, 0.5));
        assert_eq!((points[1].precision, points[1].recall), (1.0, 1.0));
        assert_eq!(average_precision(&set).unwrap(), 1.0);
    }

    #[test]
    fn constant_scores_collapse_to_one_point() {
        let set = scored(&[0.5, 0.5, 0.5, 0.5, 0.5], &[1, 0, 1, 0, 0]);
        let points = pr_curve(&set).unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!((points[0].precision, points[0].recall), (0.4, 1.0));
        assert_eq!(average_precision(&set).unwrap(), 0.4);
    }

    #[test]
    fn degenerate_sets_are_rejected() {
        let no_positives = scored(&[0.9, 0.1], &[0, 0]);
        assert!(matches!(average_precision(&no_positives), Err(Error::Metric(_))));
        let with_nan = scored(&[f64::NAN, 0.1], &[1, 0]);
        assert!(matches!(pr_curve(&with_nan), Err(Error::Metric(_))));
    }

    #[test]
    fn pr_csv_is_plot_ready() {
        let set = scored(&[0.9, 0.6], &[1, 0]);
        let mut out = Vec::new();
        write_pr_csv(&pr_curve(&set).unwrap(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "threshold,precision,recall\n0.9,1,1\n0.6,0.5,1\n");
    }

    #[test]
    fn bootstrap_on_identical_systems_is_a_coin_flip() {
        let set = scored(&[0.9, 0.8, 0.4, 0.2, 0.7, 0.1], &[1, 0, 1, 0, 1, 0]);
        let p = paired_bootstrap(&set, &set, 1000, 42).unwrap();
        assert_eq!(p, 0.5, "every resample ties");
    }

    #[test]
    fn bootstrap_detects_strict_dominance() {
        // System b ranks perfectly in every sentence; a inverts.
        let mut a = ScoredSet::new();
        let mut b = ScoredSet::new();
        for sentence in 0..8 {
            a.push(0.1, true, sentence);
            a.push(0.9, false, sentence);
            b.push(0.9, true, sentence);
            b.push(0.1, false, sentence);
        }
        let p = paired_bootstrap(&a, &b, 1000, 42).unwrap();
        assert_eq!(p, 0.0);
        let again = paired_bootstrap(&a, &b, 1000, 42).unwrap();
        assert_eq!(p, again, "seeded determinism");
    }

    #[test]
    fn bootstrap_requires_matching_structure() {
        let a = scored(&[0.9, 0.1], &[1, 0]);
        let b = scored(&[0.9, 0.1], &[0, 1]);
        assert!(matches!(paired_bootstrap(&a, &b, 10, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn fold_plan_rotates_test_and_dev() {
        let folds = fold_plan(7).unwrap();
        assert_eq!(folds.len(), 7);
        for (i, fold) in folds.iter().enumerate() {
            assert_eq!(fold.test, i);
            assert_eq!(fold.dev, (i + 1) % 7);
            assert_eq!(fold.train.len(), 5);
            assert!(!fold.train.contains(&fold.test));
            assert!(!fold.train.contains(&fold.dev));
        }
        assert_eq!(fold_plan(3).unwrap().len(), 3);
        assert!(fold_plan(2).is_err());
    }

    fn token(surface: &str, pos: &str, sent: usize, i: usize) -> Token {
        Token {
            surface: surface.to_string(),
            pos: pos.to_string(),
            start_time: (sent * 4 + i) as f64 * 0.5,
            end_time: (sent * 4 + i) as f64 * 0.5 + 0.4,
            talk_word_index: sent * 4 + i,
            sent_word_index: i,
        }
    }

    fn planted_sentence(common: &str, rare: &str, sentence_index: usize) -> AlignedTriple {
        let tokens = vec![
            token("the", "DT", sentence_index, 0),
            token(common, "NN", sentence_index, 1),
            token(rare, "NN", sentence_index, 2),
            token(".", ".", sentence_index, 3),
        ];
        AlignedTriple {
            source: SourceSentence { sentence_index, tokens },
            reference: vec!["参照".to_string()],
            interpretations: BTreeMap::new(),
            annotations: vec![TermSpan {
                side: Side::Interpreter(Rank::B),
                start: 2,
                end: 3,
                coverage: Coverage::Untranslated,
                matched_translation: None,
                relevant: true,
                needs_review: false,
            }],
        }
    }

    fn mini_corpus() -> (Vec<Talk>, Resources) {
        let words = [
            ("ocean", "klyqua"),
            ("river", "plenth"),
            ("forest", "drixel"),
            ("valley", "smorv"),
            ("stone", "frulk"),
            ("cloud", "tevrix"),
        ];
        let talks: Vec<Talk> = (0..3)
            .map(|t| Talk {
                talk_id: format!("talk{t}"),
                triples: (0..2)
                    .map(|s| {
                        let (common, rare) = words[t * 2 + s];
                        planted_sentence(common, rare, s)
                    })
                    .collect(),
                glossary: None,
            })
            .collect();
        let mut counts: Vec<(String, u64)> =
            words.iter().map(|(c, _)| (c.to_string(), 1_000_000)).collect();
        counts.push(("the".to_string(), 1_000_000_000));
        let resources = Resources {
            dictionary: BilingualDictionary::new(),
            frequency: FrequencyTable::from_counts(counts),
            pronunciations: PronunciationDictionary::default(),
        };
        (talks, resources)
    }

    fn fast_options() -> CvOptions {
        let mut opts = CvOptions::new(Rank::B);
        opts.grid = vec![1.0, 100.0];
        opts.bootstrap_iterations = 50;
        opts
    }

    #[test]
    fn cross_validation_reports_all_systems() {
        let (talks, resources) = mini_corpus();
        let report = cross_validate(&talks, &resources, &fast_options()).unwrap();
        assert_eq!(report.fold_talks, vec!["talk0", "talk1", "talk2"]);
        let names: Vec<&str> = report.systems.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, vec!["select_pos", "freq_threshold", "svm:all"]);
        for system in &report.systems {
            assert_eq!(system.fold_ap.len(), 3);
            assert!(system.fold_ap.iter().all(|ap| (0.0..=1.0).contains(ap)));
        }
        // Every candidate is scored 1, so select-POS AP is the I fraction
        // among candidates: one of two candidates per sentence.
        let select = &report.systems[0];
        assert_eq!(select.fold_ap, vec![0.5, 0.5, 0.5]);
        assert_eq!(select.pooled_ap, 0.5);
        // Rarity separates the planted terms perfectly here.
        let freq = &report.systems[1];
        assert_eq!(freq.mean_ap, 1.0);
        let svm = &report.systems[2];
        assert!(svm.mean_ap > 0.9, "out-of-vocabulary signal is separable: {}", svm.mean_ap);
        assert_eq!(svm.model_digest.len(), 3);
        assert_eq!(report.comparisons.len(), 2);
        let rendered = report.to_string();
        assert!(rendered.contains("svm:all"), "{rendered}");
    }

    #[test]
    fn parallel_and_serial_runs_agree() {
        let (talks, resources) = mini_corpus();
        let serial = ablation(&talks, &resources, &fast_options(), &[FeatureGroup::WordFreq]).unwrap();
        let mut parallel_opts = fast_options();
        parallel_opts.jobs = 4;
        let parallel =
            ablation(&talks, &resources, &parallel_opts, &[FeatureGroup::WordFreq]).unwrap();
        assert_eq!(serial, parallel);
        let names: Vec<&str> = serial.systems.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, vec!["select_pos", "freq_threshold", "svm:all", "svm:-word_freq"]);
        assert_eq!(serial.comparisons.len(), 4);
    }

    #[test]
    fn single_point_grid_still_selects() {
        let (talks, resources) = mini_corpus();
        let mut opts = fast_options();
        opts.grid = vec![1.0];
        let report = cross_validate(&talks, &resources, &opts).unwrap();
        let svm = &report.systems[2];
        assert!(svm.chosen.iter().all(|c| c == "c=1"));
    }

    #[test]
    fn ablating_a_disabled_group_is_an_error() {
        let (talks, resources) = mini_corpus();
        let mut opts = fast_options();
        opts.feature_config = opts.feature_config.without(FeatureGroup::History);
        let err = ablation(&talks, &resources, &opts, &[FeatureGroup::History]).unwrap_err();
        assert!(matches!(err, Error::Domain(_)), "{err}");
    }

    #[test]
    fn too_few_talks_is_a_domain_error() {
        let (talks, resources) = mini_corpus();
        let err = cross_validate(&talks[..2], &resources, &fast_options()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)), "{err}");
    }

    #[test]
    fn report_round_trips_through_json() {
        let (talks, resources) = mini_corpus();
        let report = cross_validate(&talks, &resources, &fast_options()).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: EvalReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    proptest! {
        #[test]
        fn ap_survives_monotone_score_transforms(
            pairs in prop::collection::vec((0.0f64..1.0, prop::bool::ANY), 2..60),
        ) {
            prop_assume!(pairs.iter().any(|(_, g)| *g));
            let mut original = ScoredSet::new();
            let mut transformed = ScoredSet::new();
            for (i, (score, gold)) in pairs.iter().enumerate() {
                original.push(*score, *gold, i);
                // exp is strictly monotone, so the ranking is unchanged.
                transformed.push(score.exp() * 3.0 + 1.0, *gold, i);
            }
            let a = average_precision(&original).unwrap();
            let b = average_precision(&transformed).unwrap();
            prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
        }
    }
}
