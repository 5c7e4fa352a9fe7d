//! Flat key=value run configuration.
//!
//! A config is a plain-text file of `section.key = value` lines (`#` starts a
//! comment). Values are layered in a fixed precedence order:
//!
//!   defaults  <  config file  <  `MOTIONVQ_*` environment  <  `--set` flags
//!
//! Unknown keys are rejected rather than ignored, and every run artifact
//! (checkpoint, report) embeds the canonical echo produced by
//! [`RunConfig::to_text`] so a run can be replayed from any of its outputs.

use crate::error::{Error, Result};
use std::path::{Path, PathBuf};

/// Environment variables with this prefix override config keys.
/// `MOTIONVQ_TRAIN__LR=1e-4` sets `train.lr` (double underscore encodes the dot).
pub const ENV_PREFIX: &str = "MOTIONVQ_";

/// Typed view over every config key.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    // data.*
    pub height: usize,
    pub width: usize,
    pub clips: usize,
    pub motion_classes: usize,
    pub holdout_fraction: f64,
    pub min_duration: usize,
    pub max_duration: usize,
    // model.*
    pub d_a: usize,
    pub d_p: usize,
    pub k_a: usize,
    pub k_p: usize,
    pub d_t: usize,
    pub text_len: usize,
    pub d_model: usize,
    pub layers: usize,
    pub heads: usize,
    pub n_frames: usize,
    // mask.*
    pub p_all: f64,
    pub p_interp: f64,
    pub end_steps: usize,
    // train.*
    pub vqvae_steps: usize,
    pub exemplar_steps: usize,
    pub diffuser_steps: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub dead_entry_steps: usize,
    pub rec_frames: usize,
    pub log_every: usize,
    pub exemplar_sample_steps: usize,
    // aug.*
    pub jitter: f64,
    pub blur_min: f64,
    pub blur_max: f64,
    // ablate.*
    pub unified_space: bool,
    pub same_res: bool,
    pub discrete_head: bool,
    pub no_codebook: bool,
    // run.*
    pub out_dir: String,
    pub dataset_dir: String,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            height: 128,
            width: 64,
            clips: 200,
            motion_classes: 4,
            holdout_fraction: 0.1,
            min_duration: 10,
            max_duration: 24,
            d_a: 64,
            d_p: 64,
            k_a: 256,
            k_p: 128,
            d_t: 64,
            text_len: 16,
            d_model: 128,
            layers: 4,
            heads: 4,
            n_frames: 8,
            p_all: 0.375,
            p_interp: 0.2,
            end_steps: 6,
            vqvae_steps: 5000,
            exemplar_steps: 3000,
            diffuser_steps: 5000,
            batch_size: 8,
            lr: 3e-4,
            dead_entry_steps: 200,
            rec_frames: 2,
            log_every: 100,
            exemplar_sample_steps: 8,
            jitter: 0.4,
            blur_min: 0.1,
            blur_max: 2.0,
            unified_space: false,
            same_res: false,
            discrete_head: false,
            no_codebook: false,
            out_dir: "runs/default".to_string(),
            dataset_dir: String::new(),
            seed: 42,
        }
    }
}

/// Every recognized key, in echo order.
pub const KEYS: &[&str] = &[
    "data.height",
    "data.width",
    "data.clips",
    "data.motion_classes",
    "data.holdout_fraction",
    "data.min_duration",
    "data.max_duration",
    "model.d_a",
    "model.d_p",
    "model.k_a",
    "model.k_p",
    "model.d_t",
    "model.text_len",
    "model.d_model",
    "model.layers",
    "model.heads",
    "model.n_frames",
    "mask.p_all",
    "mask.p_interp",
    "mask.end_steps",
    "train.vqvae_steps",
    "train.exemplar_steps",
    "train.diffuser_steps",
    "train.batch_size",
    "train.lr",
    "train.dead_entry_steps",
    "train.rec_frames",
    "train.log_every",
    "train.exemplar_sample_steps",
    "aug.jitter",
    "aug.blur_min",
    "aug.blur_max",
    "ablate.unified_space",
    "ablate.same_res",
    "ablate.discrete_head",
    "ablate.no_codebook",
    "run.out_dir",
    "run.dataset_dir",
    "run.seed",
];

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| Error::Config(format!("key `{key}`: expected a non-negative integer, got `{v}`")))
}

fn parse_u64(key: &str, v: &str) -> Result<u64> {
    v.parse()
        .map_err(|_| Error::Config(format!("key `{key}`: expected a non-negative integer, got `{v}`")))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse()
        .map_err(|_| Error::Config(format!("key `{key}`: expected a number, got `{v}`")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(Error::Config(format!(
            "key `{key}`: expected true/false, got `{v}`"
        ))),
    }
}

impl RunConfig {
    /// Set one key from its text form. Unknown keys are an error.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "data.height" => self.height = parse_usize(key, v)?,
            "data.width" => self.width = parse_usize(key, v)?,
            "data.clips" => self.clips = parse_usize(key, v)?,
            "data.motion_classes" => self.motion_classes = parse_usize(key, v)?,
            "data.holdout_fraction" => self.holdout_fraction = parse_f64(key, v)?,
            "data.min_duration" => self.min_duration = parse_usize(key, v)?,
            "data.max_duration" => self.max_duration = parse_usize(key, v)?,
            "model.d_a" => self.d_a = parse_usize(key, v)?,
            "model.d_p" => self.d_p = parse_usize(key, v)?,
            "model.k_a" => self.k_a = parse_usize(key, v)?,
            "model.k_p" => self.k_p = parse_usize(key, v)?,
            "model.d_t" => self.d_t = parse_usize(key, v)?,
            "model.text_len" => self.text_len = parse_usize(key, v)?,
            "model.d_model" => self.d_model = parse_usize(key, v)?,
            "model.layers" => self.layers = parse_usize(key, v)?,
            "model.heads" => self.heads = parse_usize(key, v)?,
            "model.n_frames" => self.n_frames = parse_usize(key, v)?,
            "mask.p_all" => self.p_all = parse_f64(key, v)?,
            "mask.p_interp" => self.p_interp = parse_f64(key, v)?,
            "mask.end_steps" => self.end_steps = parse_usize(key, v)?,
            "train.vqvae_steps" => self.vqvae_steps = parse_usize(key, v)?,
            "train.exemplar_steps" => self.exemplar_steps = parse_usize(key, v)?,
            "train.diffuser_steps" => self.diffuser_steps = parse_usize(key, v)?,
            "train.batch_size" => self.batch_size = parse_usize(key, v)?,
            "train.lr" => self.lr = parse_f64(key, v)?,
            "train.dead_entry_steps" => self.dead_entry_steps = parse_usize(key, v)?,
            "train.rec_frames" => self.rec_frames = parse_usize(key, v)?,
            "train.log_every" => self.log_every = parse_usize(key, v)?,
            "train.exemplar_sample_steps" => self.exemplar_sample_steps = parse_usize(key, v)?,
            "aug.jitter" => self.jitter = parse_f64(key, v)?,
            "aug.blur_min" => self.blur_min = parse_f64(key, v)?,
            "aug.blur_max" => self.blur_max = parse_f64(key, v)?,
            "ablate.unified_space" => self.unified_space = parse_bool(key, v)?,
            "ablate.same_res" => self.same_res = parse_bool(key, v)?,
            "ablate.discrete_head" => self.discrete_head = parse_bool(key, v)?,
            "ablate.no_codebook" => self.no_codebook = parse_bool(key, v)?,
            "run.out_dir" => self.out_dir = v.to_string(),
            "run.dataset_dir" => self.dataset_dir = v.to_string(),
            "run.seed" => self.seed = parse_u64(key, v)?,
            _ => return Err(Error::Config(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Read the value of one key in its text form.
    pub fn get(&self, key: &str) -> Option<String> {
        let s = match key {
            "data.height" => self.height.to_string(),
            "data.width" => self.width.to_string(),
            "data.clips" => self.clips.to_string(),
            "data.motion_classes" => self.motion_classes.to_string(),
            "data.holdout_fraction" => self.holdout_fraction.to_string(),
            "data.min_duration" => self.min_duration.to_string(),
            "data.max_duration" => self.max_duration.to_string(),
            "model.d_a" => self.d_a.to_string(),
            "model.d_p" => self.d_p.to_string(),
            "model.k_a" => self.k_a.to_string(),
            "model.k_p" => self.k_p.to_string(),
            "model.d_t" => self.d_t.to_string(),
            "model.text_len" => self.text_len.to_string(),
            "model.d_model" => self.d_model.to_string(),
            "model.layers" => self.layers.to_string(),
            "model.heads" => self.heads.to_string(),
            "model.n_frames" => self.n_frames.to_string(),
            "mask.p_all" => self.p_all.to_string(),
            "mask.p_interp" => self.p_interp.to_string(),
            "mask.end_steps" => self.end_steps.to_string(),
            "train.vqvae_steps" => self.vqvae_steps.to_string(),
            "train.exemplar_steps" => self.exemplar_steps.to_string(),
            "train.diffuser_steps" => self.diffuser_steps.to_string(),
            "train.batch_size" => self.batch_size.to_string(),
            "train.lr" => self.lr.to_string(),
            "train.dead_entry_steps" => self.dead_entry_steps.to_string(),
            "train.rec_frames" => self.rec_frames.to_string(),
            "train.log_every" => self.log_every.to_string(),
            "train.exemplar_sample_steps" => self.exemplar_sample_steps.to_string(),
            "aug.jitter" => self.jitter.to_string(),
            "aug.blur_min" => self.blur_min.to_string(),
            "aug.blur_max" => self.blur_max.to_string(),
            "ablate.unified_space" => self.unified_space.to_string(),
            "ablate.same_res" => self.same_res.to_string(),
            "ablate.discrete_head" => self.discrete_head.to_string(),
            "ablate.no_codebook" => self.no_codebook.to_string(),
            "run.out_dir" => self.out_dir.clone(),
            "run.dataset_dir" => self.dataset_dir.clone(),
            "run.seed" => self.seed.to_string(),
            _ => return None,
        };
        Some(s)
    }

    /// Apply every `key = value` line of a config file body.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`, got `{raw}`", lineno + 1))
            })?;
            self.apply(key.trim(), value)?;
        }
        Ok(())
    }

    /// Apply overrides from `MOTIONVQ_*` environment variables.
    /// `MOTIONVQ_TRAIN__LR` maps to `train.lr`.
    pub fn apply_env(&mut self, vars: impl Iterator<Item = (String, String)>) -> Result<()> {
        for (name, value) in vars {
            if let Some(suffix) = name.strip_prefix(ENV_PREFIX) {
                let key = suffix.to_lowercase().replace("__", ".");
                self.apply(&key, &value)?;
            }
        }
        Ok(())
    }

    /// Build a config from all sources in precedence order, then validate.
    /// `sets` holds `key=value` strings from repeated `--set` flags.
    pub fn load(path: Option<&Path>, sets: &[String]) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::io(p.display().to_string(), e))?;
            cfg.apply_text(&text)?;
        }
        cfg.apply_env(std::env::vars())?;
        for s in sets {
            let (key, value) = s.split_once('=').ok_or_else(|| {
                Error::Config(format!("--set expects key=value, got `{s}`"))
            })?;
            cfg.apply(key.trim(), value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical text echo: every key, fixed order, one per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(&self.get(key).expect("every listed key is readable"));
            out.push('\n');
        }
        out
    }

    /// Check cross-key consistency rules. Called after all overrides.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.height == 0 || self.height % 64 != 0 || self.width == 0 || self.width % 64 != 0 {
            return fail(format!(
                "data.height/data.width must be positive multiples of 64 so both \
                 feature-grid resolutions divide evenly; got {}x{}",
                self.height, self.width
            ));
        }
        if self.motion_classes < 4 || self.motion_classes > 8 {
            return fail(format!(
                "data.motion_classes must be in 4..=8, got {}",
                self.motion_classes
            ));
        }
        if !(self.holdout_fraction > 0.0 && self.holdout_fraction < 1.0) {
            return fail(format!(
                "data.holdout_fraction must be in (0, 1), got {}",
                self.holdout_fraction
            ));
        }
        if self.clips < 10 {
            return fail(format!("data.clips must be at least 10, got {}", self.clips));
        }
        if self.n_frames < 2 {
            return fail(format!("model.n_frames must be at least 2, got {}", self.n_frames));
        }
        if self.min_duration < self.n_frames {
            return fail(format!(
                "data.min_duration ({}) must be at least model.n_frames ({}) so every clip \
                 supports an interpolation training window",
                self.min_duration, self.n_frames
            ));
        }
        if self.max_duration < self.min_duration {
            return fail(format!(
                "data.max_duration ({}) must be >= data.min_duration ({})",
                self.max_duration, self.min_duration
            ));
        }
        if self.d_a == 0 || self.d_p == 0 || self.d_t == 0 || self.k_a == 0 || self.k_p == 0 {
            return fail("model dims and codebook sizes must be positive".to_string());
        }
        if self.heads == 0 || self.d_model % self.heads != 0 {
            return fail(format!(
                "model.heads ({}) must divide model.d_model ({})",
                self.heads, self.d_model
            ));
        }
        if self.layers == 0 {
            return fail("model.layers must be positive".to_string());
        }
        if self.text_len == 0 {
            return fail("model.text_len must be positive".to_string());
        }
        for (key, p) in [("mask.p_all", self.p_all), ("mask.p_interp", self.p_interp)] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{key} must be in [0, 1], got {p}"));
            }
        }
        if self.end_steps == 0 {
            return fail("mask.end_steps must be at least 1".to_string());
        }
        if self.batch_size == 0 {
            return fail("train.batch_size must be positive".to_string());
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return fail(format!("train.lr must be positive and finite, got {}", self.lr));
        }
        if self.rec_frames == 0 {
            return fail("train.rec_frames must be at least 1".to_string());
        }
        if self.log_every == 0 {
            return fail("train.log_every must be at least 1".to_string());
        }
        if self.exemplar_sample_steps == 0 {
            return fail("train.exemplar_sample_steps must be at least 1".to_string());
        }
        if !(self.jitter >= 0.0 && self.jitter < 1.0) {
            return fail(format!("aug.jitter must be in [0, 1), got {}", self.jitter));
        }
        if !(self.blur_min > 0.0 && self.blur_max >= self.blur_min) {
            return fail(format!(
                "aug blur range must satisfy 0 < blur_min <= blur_max, got [{}, {}]",
                self.blur_min, self.blur_max
            ));
        }
        if self.unified_space && (self.no_codebook || self.discrete_head || self.same_res) {
            return fail(
                "ablate.unified_space cannot be combined with other ablation switches".to_string(),
            );
        }
        if self.out_dir.is_empty() {
            return fail("run.out_dir must not be empty".to_string());
        }
        Ok(())
    }

    // ------------------------------------------------------------------
    // Derived shapes and paths
    // ------------------------------------------------------------------

    /// Appearance grid height/width: 1/16 of the frame.
    pub fn appearance_hw(&self) -> (usize, usize) {
        (self.height / 16, self.width / 16)
    }

    /// Pose grid height/width: 1/64 of the frame, or 1/16 under `same_res`.
    pub fn pose_hw(&self) -> (usize, usize) {
        if self.same_res {
            (self.height / 16, self.width / 16)
        } else {
            (self.height / 64, self.width / 64)
        }
    }

    /// Cells per frame in the pose grid.
    pub fn pose_cells(&self) -> usize {
        let (h, w) = self.pose_hw();
        h * w
    }

    /// Directory holding the dataset (manifest + frames).
    pub fn dataset_root(&self) -> PathBuf {
        if self.dataset_dir.is_empty() {
            Path::new(&self.out_dir).join("dataset")
        } else {
            PathBuf::from(&self.dataset_dir)
        }
    }

    /// Checkpoint directory for one training stage.
    pub fn stage_dir(&self, stage: &str) -> PathBuf {
        Path::new(&self.out_dir).join(stage)
    }

    /// Directory for evaluation reports.
    pub fn reports_dir(&self) -> PathBuf {
        Path::new(&self.out_dir).join("reports")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn every_key_round_trips_through_text() {
        let cfg = RunConfig::default();
        let echo = cfg.to_text();
        let mut parsed = RunConfig::default();
        parsed.apply_text(&echo).unwrap();
        assert_eq!(parsed, cfg);
        // The echo covers every key exactly once.
        assert_eq!(echo.lines().count(), KEYS.len());
    }

    #[test]
    fn unknown_key_is_rejected_by_name() {
        let mut cfg = RunConfig::default();
        let err = cfg.apply("train.momentum", "0.9").unwrap_err();
        assert!(err.to_string().contains("train.momentum"), "{err}");
    }

    #[test]
    fn bad_value_names_the_key() {
        let mut cfg = RunConfig::default();
        let err = cfg.apply("train.lr", "fast").unwrap_err();
        assert!(err.to_string().contains("train.lr"), "{err}");
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let mut cfg = RunConfig::default();
        cfg.apply_text("# a comment\n\n  train.lr = 0.001  # trailing\n").unwrap();
        assert_eq!(cfg.lr, 0.001);
    }

    #[test]
    fn env_override_maps_double_underscore_to_dot() {
        let mut cfg = RunConfig::default();
        cfg.apply_env(
            [("MOTIONVQ_TRAIN__BATCH_SIZE".to_string(), "4".to_string())].into_iter(),
        )
        .unwrap();
        assert_eq!(cfg.batch_size, 4);
    }

    #[test]
    fn non_divisible_resolution_is_rejected() {
        let mut cfg = RunConfig::default();
        cfg.height = 64;
        cfg.width = 32; // 32/64 < 1: pose grid would be degenerate
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("64"), "{err}");
    }

    #[test]
    fn short_clips_cannot_host_interpolation_windows() {
        let mut cfg = RunConfig::default();
        cfg.min_duration = 4; // below n_frames = 8
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn pose_grid_shape_follows_resolution_and_ablation() {
        let mut cfg = RunConfig::default();
        assert_eq!(cfg.pose_hw(), (2, 1));
        assert_eq!(cfg.appearance_hw(), (8, 4));
        cfg.same_res = true;
        assert_eq!(cfg.pose_hw(), (8, 4));
    }
}
