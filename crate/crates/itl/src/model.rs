//! Linear classifier trained with the Pegasos stochastic subgradient
//! scheme, plus a plain-text model file format.
//!
//! Training works on named sparse vectors; the model keeps a name-to-weight
//! map so feature extraction and scoring stay decoupled from index
//! bookkeeping. Rare-class examples can be upweighted by inverse class
//! frequency, which matters here because untranslated terms are a small
//! minority of candidate tokens.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::annotate::Tag;
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, FeatureGroup, FeatureVector};

/// Version tag for the feature naming scheme baked into saved models.
pub const REGISTRY_VERSION: &str = "fr1";

const MODEL_MAGIC: &str = "itl-model v1";

/// When the scale factor drops below this, fold it into the weights to
/// keep the representation numerically healthy.
const SCALE_REFOLD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassWeightMode {
    /// Weight each class by total / (2 * class count).
    InverseFrequency,
    /// Weight both classes 1.
    Uniform,
}

impl ClassWeightMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassWeightMode::InverseFrequency => "inverse_frequency",
            ClassWeightMode::Uniform => "uniform",
        }
    }
}

impl fmt::Display for ClassWeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassWeightMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "inverse_frequency" => Ok(ClassWeightMode::InverseFrequency),
            "uniform" => Ok(ClassWeightMode::Uniform),
            other => Err(format!("unknown class weight mode {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    /// Soft-margin cost; the regularization strength is 1 / (c * n).
    pub c: f64,
    pub epochs: usize,
    pub seed: u64,
    pub class_weight_mode: ClassWeightMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { c: 1.0, epochs: 20, seed: 42, class_weight_mode: ClassWeightMode::InverseFrequency }
    }
}

/// Per-class example weights (weight_i, weight_o).
pub fn class_weights(labels: &[Tag], mode: ClassWeightMode) -> Result<(f64, f64)> {
    match mode {
        ClassWeightMode::Uniform => Ok((1.0, 1.0)),
        ClassWeightMode::InverseFrequency => {
            let n_i = labels.iter().filter(|t| **t == Tag::I).count();
            let n_o = labels.len() - n_i;
            if n_i == 0 || n_o == 0 {
                return Err(Error::training("class weighting needs both classes present"));
            }
            let n = labels.len() as f64;
            Ok((n / (2.0 * n_i as f64), n / (2.0 * n_o as f64)))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub weights: BTreeMap<String, f64>,
    pub bias: f64,
    pub config: TrainConfig,
    pub feature_registry_version: String,
}

impl LinearModel {
    /// Raw decision value w . x + b; names absent from the model score 0.
    pub fn decision_score(&self, vector: &FeatureVector) -> f64 {
        let mut score = self.bias;
        for (name, value) in vector.iter() {
            if let Some(w) = self.weights.get(name) {
                score += w * value;
            }
        }
        score
    }

    /// I when the decision value is strictly above the threshold.
    pub fn predict(&self, vector: &FeatureVector, threshold: f64) -> Tag {
        if self.decision_score(vector) > threshold {
            Tag::I
        } else {
            Tag::O
        }
    }

    /// Hex digest of the serialized model, for change detection.
    pub fn digest(&self, feature_config: &FeatureConfig) -> String {
        let mut hasher = Sha256::new();
        hasher.update(model_to_string(self, feature_config).as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}

struct Prepared {
    names: Vec<String>,
    rows: Vec<Vec<(usize, f64)>>,
    labels: Vec<f64>,
    example_weights: Vec<f64>,
}

fn prepare(examples: &[(FeatureVector, Tag)], mode: ClassWeightMode) -> Result<Prepared> {
    if examples.is_empty() {
        return Err(Error::training("no training examples"));
    }
    let tags: Vec<Tag> = examples.iter().map(|(_, t)| *t).collect();
    if tags.iter().all(|t| *t == tags[0]) {
        return Err(Error::training("training data contains a single class"));
    }
    let (weight_i, weight_o) = class_weights(&tags, mode)?;

    let mut names = Vec::new();
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    let mut rows = Vec::with_capacity(examples.len());
    for (vector, _) in examples {
        let mut row = Vec::with_capacity(vector.len());
        for (name, value) in vector.iter() {
            let idx = *index.entry(name).or_insert_with(|| {
                names.push(name.to_string());
                names.len() - 1
            });
            row.push((idx, value));
        }
        rows.push(row);
    }
    let labels: Vec<f64> = tags.iter().map(|t| if *t == Tag::I { 1.0 } else { -1.0 }).collect();
    let example_weights: Vec<f64> =
        tags.iter().map(|t| if *t == Tag::I { weight_i } else { weight_o }).collect();
    Ok(Prepared { names, rows, labels, example_weights })
}

fn sparse_dot(dense: &[f64], row: &[(usize, f64)]) -> f64 {
    row.iter().map(|(i, v)| dense[*i] * v).sum()
}

fn dense_objective(prepared: &Prepared, dense: &[f64], scale: f64, bias: f64, lambda: f64) -> f64 {
    let norm_sq: f64 = dense.iter().map(|w| (w * scale).powi(2)).sum::<f64>() + bias * bias;
    let hinge: f64 = prepared
        .rows
        .iter()
        .zip(&prepared.labels)
        .zip(&prepared.example_weights)
        .map(|((row, y), wc)| {
            let margin = y * (scale * sparse_dot(dense, row) + bias);
            wc * (1.0 - margin).max(0.0)
        })
        .sum();
    lambda / 2.0 * norm_sq + hinge / prepared.rows.len() as f64
}

/// The value training minimizes: lambda/2 (||w||^2 + b^2) plus the
/// class-weighted mean hinge loss, with lambda = 1 / (c * n) taken from the
/// model's own config. The intercept is regularized like any other weight
/// (the bias-feature formulation).
pub fn objective(examples: &[(FeatureVector, Tag)], model: &LinearModel) -> Result<f64> {
    let prepared = prepare(examples, model.config.class_weight_mode)?;
    let lambda = 1.0 / (model.config.c * examples.len() as f64);
    let dense: Vec<f64> =
        prepared.names.iter().map(|n| model.weights.get(n).copied().unwrap_or(0.0)).collect();
    Ok(dense_objective(&prepared, &dense, 1.0, model.bias, lambda))
}

/// Train and return the per-epoch objective values alongside the model.
///
/// Each epoch shuffles the examples, runs subgradient steps with step size
/// 1/(lambda*t), and snapshots the weights if the full-data objective
/// improved; the returned model is the best epoch snapshot (the pocket
/// variant), so the trace is non-increasing.
pub fn train_traced(examples: &[(FeatureVector, Tag)], config: &TrainConfig) -> Result<(LinearModel, Vec<f64>)> {
    if config.c.is_nan() || config.c <= 0.0 {
        return Err(Error::training("cost must be positive"));
    }
    if config.epochs == 0 {
        return Err(Error::training("epochs must be at least 1"));
    }
    let prepared = prepare(examples, config.class_weight_mode)?;
    let n = prepared.rows.len();
    let lambda = 1.0 / (config.c * n as f64);

    // The intercept rides along as a constant-1 feature: it shrinks and
    // refolds with the weights, keeping the update scale-free.
    let mut dense = vec![0.0f64; prepared.names.len()];
    let mut bias = 0.0f64;
    let mut scale = 1.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut step: u64 = 1;
    let mut trace = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, Vec<f64>, f64)> = None;

    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let t = step as f64;
            let eta = 1.0 / (lambda * t);
            let row = &prepared.rows[i];
            let y = prepared.labels[i];
            let margin = y * (scale * (sparse_dot(&dense, row) + bias));
            if step == 1 {
                // Shrink factor 1 - eta*lambda = 0 at the first step.
                dense.iter_mut().for_each(|w| *w = 0.0);
                bias = 0.0;
                scale = 1.0;
            } else {
                scale *= 1.0 - 1.0 / t;
            }
            if margin < 1.0 {
                let g = eta * prepared.example_weights[i] * y / scale;
                for &(idx, value) in row {
                    dense[idx] += g * value;
                }
                bias += g;
            }
            if scale < SCALE_REFOLD {
                dense.iter_mut().for_each(|w| *w *= scale);
                bias *= scale;
                scale = 1.0;
            }
            step += 1;
        }
        let current = dense_objective(&prepared, &dense, scale, bias * scale, lambda);
        if best.as_ref().is_none_or(|(b, _, _)| current < *b) {
            best = Some((current, dense.iter().map(|w| w * scale).collect(), bias * scale));
        }
        trace.push(best.as_ref().expect("objective recorded").0);
    }

    let (_, folded, bias) = best.expect("at least one epoch ran");
    let weights: BTreeMap<String, f64> = prepared.names.into_iter().zip(folded).collect();
    let model = LinearModel {
        weights,
        bias,
        config: config.clone(),
        feature_registry_version: REGISTRY_VERSION.to_string(),
    };
    Ok((model, trace))
}

pub fn train(examples: &[(FeatureVector, Tag)], config: &TrainConfig) -> Result<LinearModel> {
    train_traced(examples, config).map(|(model, _)| model)
}

/// Serialize a model with the feature configuration it was trained under.
pub fn model_to_string(model: &LinearModel, feature_config: &FeatureConfig) -> String {
    let groups: Vec<&str> = FeatureGroup::ALL
        .iter()
        .filter(|g| feature_config.enabled(**g))
        .map(|g| g.as_str())
        .collect();
    let mut out = String::new();
    out.push_str(MODEL_MAGIC);
    out.push('\n');
    out.push_str(&format!("registry {}\n", model.feature_registry_version));
    out.push_str(&format!("c {}\n", model.config.c));
    out.push_str(&format!("epochs {}\n", model.config.epochs));
    out.push_str(&format!("seed {}\n", model.config.seed));
    out.push_str(&format!("class_weight {}\n", model.config.class_weight_mode));
    out.push_str(&format!("window {}\n", feature_config.window_size));
    out.push_str(&format!("bins {}\n", feature_config.frequency_bins));
    out.push_str(&format!("timing_horizon {}\n", feature_config.timing_horizon));
    out.push_str(&format!("groups {}\n", groups.join(",")));
    out.push_str(&format!("bias {}\n", model.bias));
    for (name, weight) in &model.weights {
        out.push_str(&format!("{name}\t{weight}\n"));
    }
    out
}

pub fn save_model(path: impl AsRef<Path>, model: &LinearModel, feature_config: &FeatureConfig) -> Result<()> {
    fs::write(path, model_to_string(model, feature_config))?;
    Ok(())
}

struct ModelLines<'a> {
    source: &'a str,
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> ModelLines<'a> {
    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        match self.lines.next() {
            Some((i, line)) => Ok((i + 1, line.trim_end_matches('\r'))),
            None => Err(Error::parse(self.source, 0, "unexpected end of model file")),
        }
    }

    fn expect_field(&mut self, key: &str) -> Result<(usize, String)> {
        let (line_no, line) = self.next_line()?;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok((line_no, v.to_string())),
            _ => Err(Error::parse(self.source, line_no, format!("expected {key:?} field, got {line:?}"))),
        }
    }
}

fn parse_field<T: FromStr>(source: &str, line_no: usize, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::parse(source, line_no, format!("invalid {key} value {value:?}")))
}

/// Parse the plain-text model format produced by [`model_to_string`].
pub fn parse_model(source: &str, text: &str) -> Result<(LinearModel, FeatureConfig)> {
    let mut reader = ModelLines { source, lines: text.lines().enumerate() };
    let (line_no, magic) = reader.next_line()?;
    if magic != MODEL_MAGIC {
        return Err(Error::parse(source, line_no, format!("not a model file (header {magic:?})")));
    }
    let (line_no, registry) = reader.expect_field("registry")?;
    if registry != REGISTRY_VERSION {
        return Err(Error::parse(source, line_no, format!("unsupported feature registry {registry:?}")));
    }
    let (ln, v) = reader.expect_field("c")?;
    let c: f64 = parse_field(source, ln, "c", &v)?;
    let (ln, v) = reader.expect_field("epochs")?;
    let epochs: usize = parse_field(source, ln, "epochs", &v)?;
    let (ln, v) = reader.expect_field("seed")?;
    let seed: u64 = parse_field(source, ln, "seed", &v)?;
    let (ln, v) = reader.expect_field("class_weight")?;
    let class_weight_mode: ClassWeightMode = ClassWeightMode::from_str(&v)
        .map_err(|e| Error::parse(source, ln, e))?;
    let (ln, v) = reader.expect_field("window")?;
    let window_size: usize = parse_field(source, ln, "window", &v)?;
    let (ln, v) = reader.expect_field("bins")?;
    let frequency_bins: usize = parse_field(source, ln, "bins", &v)?;
    let (ln, v) = reader.expect_field("timing_horizon")?;
    let timing_horizon: f64 = parse_field(source, ln, "timing_horizon", &v)?;
    let (ln, v) = reader.expect_field("groups")?;
    let mut enabled = std::collections::BTreeSet::new();
    for part in v.split(',').filter(|p| !p.is_empty()) {
        let group = FeatureGroup::from_str(part).map_err(|e| Error::parse(source, ln, e))?;
        enabled.insert(group);
    }
    if enabled.is_empty() {
        return Err(Error::parse(source, ln, "model enables no feature groups"));
    }
    let (ln, v) = reader.expect_field("bias")?;
    let bias: f64 = parse_field(source, ln, "bias", &v)?;

    let mut weights = BTreeMap::new();
    for (i, raw) in reader.lines {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let (name, value) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(source, i + 1, "expected name<TAB>weight"))?;
        let weight: f64 = parse_field(source, i + 1, "weight", value)?;
        weights.insert(name.to_string(), weight);
    }

    let feature_config = FeatureConfig { window_size, frequency_bins, timing_horizon, enabled };
    feature_config.validate()?;
    let model = LinearModel {
        weights,
        bias,
        config: TrainConfig { c, epochs, seed, class_weight_mode },
        feature_registry_version: registry,
    };
    Ok((model, feature_config))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<(LinearModel, FeatureConfig)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_model(&path.display().to_string(), &text)
}
