//! On-disk dataset layout and its plain-text manifest.
//!
//! ```text
//! <root>/manifest.txt
//! <root>/clips/clip_0000/f_000.png ... f_{D-1}.png
//! ```
//!
//! The manifest is human-readable key/value records. A header gives global
//! facts, then one `clip` line per record followed by its two indented text
//! lines:
//!
//! ```text
//! version = 1
//! height = 128
//! width = 64
//! clips = 200
//! clip id=0000 split=train motion=move_right duration=17 top=d61f1f bottom=2640d6 sleeve=long garment=short figure=2 dir=clips/clip_0000
//!   appearance_text = a person wearing a red top with long sleeves and short blue bottoms
//!   motion_text = she walks to the right
//! ```
//!
//! Frames are lossless PNGs; together with the 8-bit render lattice this makes
//! regeneration from the same seed byte-identical, manifest included.

use super::{
    draw_appearance, generate_clip, split_holdout, AppearanceSpec, Frame, GarmentLength,
    MotionClass, MotionSpec, SleeveLength, VideoClip,
};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::rng::{fnv1a, stream};
use rand::Rng;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Train / held-out split tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Holdout,
}

impl Split {
    fn word(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Holdout => "holdout",
        }
    }

    fn from_word(w: &str) -> Option<Self> {
        match w {
            "train" => Some(Split::Train),
            "holdout" => Some(Split::Holdout),
            _ => None,
        }
    }
}

/// One clip's metadata; frames live under `dir` relative to the dataset root.
#[derive(Debug, Clone)]
pub struct ClipRecord {
    pub id: usize,
    pub dir: String,
    pub split: Split,
    pub motion: MotionSpec,
    pub appearance: AppearanceSpec,
    pub appearance_text: String,
    pub motion_text: String,
}

impl ClipRecord {
    /// Relative path of frame `k`.
    pub fn frame_rel_path(&self, k: usize) -> String {
        format!("{}/f_{k:03}.png", self.dir)
    }
}

/// The dataset index: resolution, records, and where they live.
#[derive(Debug, Clone)]
pub struct DatasetManifest {
    pub root: PathBuf,
    pub height: usize,
    pub width: usize,
    pub records: Vec<ClipRecord>,
}

fn color_hex(c: [f32; 3]) -> String {
    let [r, g, b] = c.map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8);
    format!("{r:02x}{g:02x}{b:02x}")
}

fn parse_color_hex(s: &str) -> Option<[f32; 3]> {
    if s.len() != 6 {
        return None;
    }
    let byte = |i: usize| u8::from_str_radix(&s[i..i + 2], 16).ok();
    Some([
        byte(0)? as f32 / 255.0,
        byte(2)? as f32 / 255.0,
        byte(4)? as f32 / 255.0,
    ])
}

impl DatasetManifest {
    pub fn manifest_path(root: &Path) -> PathBuf {
        root.join("manifest.txt")
    }

    /// Indices of records in one split.
    pub fn split_indices(&self, split: Split) -> Vec<usize> {
        self.records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.split == split)
            .map(|(i, _)| i)
            .collect()
    }

    /// Serialize to the manifest text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("version = 1\n");
        let _ = writeln!(out, "height = {}", self.height);
        let _ = writeln!(out, "width = {}", self.width);
        let _ = writeln!(out, "clips = {}", self.records.len());
        for r in &self.records {
            let _ = writeln!(
                out,
                "clip id={:04} split={} motion={} duration={} top={} bottom={} sleeve={} garment={} figure={} dir={}",
                r.id,
                r.split.word(),
                r.motion.label.name(),
                r.motion.duration_frames,
                color_hex(r.appearance.top_color),
                color_hex(r.appearance.bottom_color),
                r.appearance.sleeve_length.word(),
                r.appearance.garment_length.word(),
                r.appearance.figure_id,
                r.dir,
            );
            let _ = writeln!(out, "  appearance_text = {}", r.appearance_text);
            let _ = writeln!(out, "  motion_text = {}", r.motion_text);
        }
        out
    }

    /// FNV-1a hash of the manifest text; reports reference datasets by it.
    pub fn content_hash(&self) -> u64 {
        fnv1a(self.to_text().as_bytes())
    }

    /// Parse manifest text rooted at `root`.
    pub fn parse(root: &Path, text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| {
            Err(Error::Data(format!("manifest line {}: {msg}", line + 1)))
        };
        let mut height = 0usize;
        let mut width = 0usize;
        let mut declared = 0usize;
        let mut records: Vec<ClipRecord> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim_end();
            if line.trim().is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("clip ") {
                let mut fields = std::collections::HashMap::new();
                for part in rest.split_whitespace() {
                    let Some((k, v)) = part.split_once('=') else {
                        return bad(ln, &format!("bad field `{part}`"));
                    };
                    fields.insert(k.to_string(), v.to_string());
                }
                let need = |k: &str| -> Result<String> {
                    fields
                        .get(k)
                        .cloned()
                        .ok_or_else(|| Error::Data(format!("manifest line {}: missing `{k}`", ln + 1)))
                };
                let id: usize = need("id")?
                    .parse()
                    .map_err(|_| Error::Data(format!("manifest line {}: bad id", ln + 1)))?;
                let split = Split::from_word(&need("split")?)
                    .ok_or_else(|| Error::Data(format!("manifest line {}: bad split", ln + 1)))?;
                let label = MotionClass::from_name(&need("motion")?)
                    .ok_or_else(|| Error::Data(format!("manifest line {}: bad motion", ln + 1)))?;
                let duration: usize = need("duration")?
                    .parse()
                    .map_err(|_| Error::Data(format!("manifest line {}: bad duration", ln + 1)))?;
                let top = parse_color_hex(&need("top")?)
                    .ok_or_else(|| Error::Data(format!("manifest line {}: bad top color", ln + 1)))?;
                let bottom = parse_color_hex(&need("bottom")?)
                    .ok_or_else(|| Error::Data(format!("manifest line {}: bad bottom color", ln + 1)))?;
                let sleeve = SleeveLength::from_word(&need("sleeve")?)
                    .ok_or_else(|| Error::Data(format!("manifest line {}: bad sleeve", ln + 1)))?;
                let garment = GarmentLength::from_word(&need("garment")?)
                    .ok_or_else(|| Error::Data(format!("manifest line {}: bad garment", ln + 1)))?;
                let figure_id: u32 = need("figure")?
                    .parse()
                    .map_err(|_| Error::Data(format!("manifest line {}: bad figure", ln + 1)))?;
                records.push(ClipRecord {
                    id,
                    dir: need("dir")?,
                    split,
                    motion: MotionSpec {
                        label,
                        duration_frames: duration,
                    },
                    appearance: AppearanceSpec {
                        top_color: top,
                        bottom_color: bottom,
                        sleeve_length: sleeve,
                        garment_length: garment,
                        figure_id,
                    },
                    appearance_text: String::new(),
                    motion_text: String::new(),
                });
            } else if let Some(rest) = line.trim_start().strip_prefix("appearance_text = ") {
                match records.last_mut() {
                    Some(r) => r.appearance_text = rest.to_string(),
                    None => return bad(ln, "text line before any clip"),
                }
            } else if let Some(rest) = line.trim_start().strip_prefix("motion_text = ") {
                match records.last_mut() {
                    Some(r) => r.motion_text = rest.to_string(),
                    None => return bad(ln, "text line before any clip"),
                }
            } else if let Some((k, v)) = line.split_once('=') {
                match k.trim() {
                    "version" => {
                        if v.trim() != "1" {
                            return bad(ln, &format!("unsupported manifest version {}", v.trim()));
                        }
                    }
                    "height" => height = v.trim().parse().map_err(|_| Error::Data("bad height".into()))?,
                    "width" => width = v.trim().parse().map_err(|_| Error::Data("bad width".into()))?,
                    "clips" => declared = v.trim().parse().map_err(|_| Error::Data("bad clips".into()))?,
                    other => return bad(ln, &format!("unknown header key `{other}`")),
                }
            } else {
                return bad(ln, &format!("unrecognized line `{line}`"));
            }
        }
        if height == 0 || width == 0 {
            return Err(Error::Data("manifest missing height/width header".into()));
        }
        if declared != records.len() {
            return Err(Error::Data(format!(
                "manifest declares {declared} clips but lists {}",
                records.len()
            )));
        }
        Ok(DatasetManifest {
            root: root.to_path_buf(),
            height,
            width,
            records,
        })
    }

    pub fn save(&self) -> Result<()> {
        let path = Self::manifest_path(&self.root);
        std::fs::write(&path, self.to_text())
            .map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn load(root: &Path) -> Result<Self> {
        let path = Self::manifest_path(root);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let m = Self::parse(root, &text)?;
        m.validate()?;
        Ok(m)
    }

    /// Check ids are unique and every referenced frame file exists.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for r in &self.records {
            if !seen.insert(r.id) {
                return Err(Error::Data(format!("duplicate clip id {}", r.id)));
            }
            r.appearance.validate()?;
            r.motion.validate()?;
            for k in 0..r.motion.duration_frames {
                let p = self.root.join(r.frame_rel_path(k));
                if !p.is_file() {
                    return Err(Error::Data(format!("missing frame file {}", p.display())));
                }
            }
        }
        Ok(())
    }

    /// Read one clip's frames back from disk.
    pub fn load_clip(&self, index: usize) -> Result<VideoClip> {
        let r = self
            .records
            .get(index)
            .ok_or_else(|| Error::Data(format!("clip index {index} out of range")))?;
        let mut frames = Vec::with_capacity(r.motion.duration_frames);
        for k in 0..r.motion.duration_frames {
            let p = self.root.join(r.frame_rel_path(k));
            frames.push(read_frame_png(&p)?);
        }
        Ok(VideoClip {
            frames,
            appearance: r.appearance.clone(),
            motion: r.motion.clone(),
            appearance_text: r.appearance_text.clone(),
            motion_text: r.motion_text.clone(),
        })
    }
}

/// Write a frame as an 8-bit RGB PNG. Render colors sit on the 8-bit lattice,
/// so this is lossless for generated frames.
pub fn write_frame_png(frame: &Frame, path: &Path) -> Result<()> {
    let mut img = image::RgbImage::new(frame.width as u32, frame.height as u32);
    for y in 0..frame.height {
        for x in 0..frame.width {
            let c = frame.get(y, x);
            let px = c.map(|v| (((v + 1.0) / 2.0).clamp(0.0, 1.0) * 255.0).round() as u8);
            img.put_pixel(x as u32, y as u32, image::Rgb(px));
        }
    }
    img.save(path)
        .map_err(|e| Error::Data(format!("writing {}: {e}", path.display())))
}

/// Read a PNG back into a [-1, 1] frame.
pub fn read_frame_png(path: &Path) -> Result<Frame> {
    let img = image::open(path)
        .map_err(|e| Error::Data(format!("reading {}: {e}", path.display())))?
        .to_rgb8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut frame = Frame::new(h, w);
    for y in 0..h {
        for x in 0..w {
            let p = img.get_pixel(x as u32, y as u32).0;
            frame.set(y, x, p.map(|v| 2.0 * (v as f32 / 255.0) - 1.0));
        }
    }
    Ok(frame)
}

/// Generate the full dataset under `cfg.dataset_root()`: stratified motion
/// classes, random appearances, disjoint train/held-out split, validated
/// manifest. Same config + seed regenerate the dataset byte-identically.
pub fn make_dataset(cfg: &RunConfig) -> Result<DatasetManifest> {
    let root = cfg.dataset_root();
    std::fs::create_dir_all(root.join("clips"))
        .map_err(|e| Error::io(root.display().to_string(), e))?;

    let mut rng = stream(cfg.seed, "dataset.specs");
    let n = cfg.clips;
    // Round-robin class assignment guarantees near-equal class counts.
    let classes: Vec<usize> = (0..n).map(|i| i % cfg.motion_classes).collect();
    let total_holdout = ((n as f64) * cfg.holdout_fraction).round().max(1.0) as usize;
    let specs: Vec<(AppearanceSpec, MotionSpec)> = classes
        .iter()
        .map(|&c| {
            let appearance = draw_appearance(&mut rng);
            let duration = rng.gen_range(cfg.min_duration..=cfg.max_duration);
            (
                appearance,
                MotionSpec {
                    label: MotionClass::ALL[c],
                    duration_frames: duration,
                },
            )
        })
        .collect();
    let mut split_rng = stream(cfg.seed, "dataset.split");
    let held = split_holdout(&classes, cfg.motion_classes, total_holdout, &mut split_rng);

    let mut records = Vec::with_capacity(n);
    for (i, (appearance, motion)) in specs.iter().enumerate() {
        let dir = format!("clips/clip_{i:04}");
        let abs_dir = root.join(&dir);
        std::fs::create_dir_all(&abs_dir)
            .map_err(|e| Error::io(abs_dir.display().to_string(), e))?;
        let clip = generate_clip(appearance, motion, cfg.seed ^ i as u64, cfg.height, cfg.width)?;
        for (k, frame) in clip.frames.iter().enumerate() {
            write_frame_png(frame, &abs_dir.join(format!("f_{k:03}.png")))?;
        }
        records.push(ClipRecord {
            id: i,
            dir,
            split: if held[i] { Split::Holdout } else { Split::Train },
            motion: motion.clone(),
            appearance: appearance.clone(),
            appearance_text: clip.appearance_text,
            motion_text: clip.motion_text,
        });
    }

    let manifest = DatasetManifest {
        root,
        height: cfg.height,
        width: cfg.width,
        records,
    };
    manifest.save()?;
    manifest.validate()?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_cfg(dir: &Path) -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.clips = 12;
        cfg.height = 64;
        cfg.width = 64;
        cfg.min_duration = 8;
        cfg.max_duration = 12;
        cfg.n_frames = 8;
        cfg.out_dir = dir.display().to_string();
        cfg.validate().unwrap();
        cfg
    }

    #[test]
    fn dataset_builds_splits_and_validates() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = tiny_cfg(tmp.path());
        let m = make_dataset(&cfg).unwrap();
        assert_eq!(m.records.len(), 12);
        let holdout = m.split_indices(Split::Holdout);
        let train = m.split_indices(Split::Train);
        // round(12 * 0.1) = 1 held-out clip.
        assert_eq!(holdout.len(), 1);
        assert_eq!(train.len(), 11);
        // Stratification: every class appears at least clips/(2*classes) times.
        for c in 0..cfg.motion_classes {
            let count = m
                .records
                .iter()
                .filter(|r| r.motion.label.index() == c)
                .count();
            assert!(count >= 12 / (2 * cfg.motion_classes), "class {c}: {count}");
        }
        m.validate().unwrap();
    }

    #[test]
    fn regeneration_is_byte_identical() {
        let tmp_a = tempfile::tempdir().unwrap();
        let tmp_b = tempfile::tempdir().unwrap();
        let m_a = make_dataset(&tiny_cfg(tmp_a.path())).unwrap();
        let m_b = make_dataset(&tiny_cfg(tmp_b.path())).unwrap();
        assert_eq!(m_a.to_text(), m_b.to_text());
        assert_eq!(m_a.content_hash(), m_b.content_hash());
        // Spot-check one frame file byte-for-byte.
        let p_a = m_a.root.join(m_a.records[3].frame_rel_path(0));
        let p_b = m_b.root.join(m_b.records[3].frame_rel_path(0));
        assert_eq!(std::fs::read(p_a).unwrap(), std::fs::read(p_b).unwrap());
    }

    #[test]
    fn png_round_trip_preserves_frames_exactly() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = tiny_cfg(tmp.path());
        let m = make_dataset(&cfg).unwrap();
        let clip = m.load_clip(0).unwrap();
        let r = &m.records[0];
        let regenerated = generate_clip(
            &r.appearance,
            &r.motion,
            cfg.seed,
            cfg.height,
            cfg.width,
        )
        .unwrap();
        assert_eq!(clip.frames.len(), regenerated.frames.len());
        for (a, b) in clip.frames.iter().zip(&regenerated.frames) {
            assert_eq!(a.data, b.data);
        }
        assert_eq!(clip.appearance_text, r.appearance_text);
    }

    #[test]
    fn manifest_text_round_trips() {
        let tmp = tempfile::tempdir().unwrap();
        let m = make_dataset(&tiny_cfg(tmp.path())).unwrap();
        let parsed = DatasetManifest::parse(&m.root, &m.to_text()).unwrap();
        assert_eq!(parsed.to_text(), m.to_text());
    }

    #[test]
    fn missing_frame_fails_validation_with_path() {
        let tmp = tempfile::tempdir().unwrap();
        let m = make_dataset(&tiny_cfg(tmp.path())).unwrap();
        let victim = m.root.join(m.records[2].frame_rel_path(1));
        std::fs::remove_file(&victim).unwrap();
        let err = m.validate().unwrap_err();
        assert!(err.to_string().contains("f_001.png"), "{err}");
    }
}
