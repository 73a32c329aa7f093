//! Predict which source-language terms a simultaneous interpreter is
//! likely to leave untranslated, so a live assistant can surface their
//! translations in time.
//!
//! The crate covers the whole pipeline: loading time-aligned talk
//! transcripts with reference translations and interpreter outputs
//! ([`corpus`]), deciding which terms count as untranslated for each
//! interpreter ([`annotate`]), turning candidate tokens into causal
//! sliding-window features ([`features`]), training a linear classifier
//! ([`model`]), batch and streaming tagging ([`tagger`]), and evaluation
//! with average precision, cross-validation, ablations, and significance
//! tests ([`eval`]). Synthetic corpora for end-to-end exercises live in
//! [`synth`], and [`cli`] backs the `itl` binary.
//!
//! Start with the runnable programs in `examples/`:
//!
//! - `annotate_corpus` — derive untranslated-term spans and IO tags.
//! - `corpus_stats` — coverage and overlap tables for an annotated corpus.
//! - `train_tagger` — train, save, reload, and apply a tagger.
//! - `cross_validate` — leave-one-talk-out evaluation against baselines.
//! - `feature_ablation` — drop feature groups one at a time.
//! - `stream_replay` — tag a talk token-by-token as a live feed.
//! - `pr_curves` — precision/recall trade-offs per system.

mod error;

pub mod annotate;
pub mod cli;
pub mod corpus;
pub mod features;
pub mod model;
pub mod eval;
pub mod synth;
pub mod tagger;

pub use error::{Error, Result};
