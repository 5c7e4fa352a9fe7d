//! Procedural performer-video dataset.
//!
//! Clips show a single articulated figure (head, torso, two arms, two legs as
//! solid-color primitives) on a flat light background. Every clip carries its
//! generating parameters — garment colors and shapes, motion class, duration —
//! so evaluation can read ground truth straight off the data instead of
//! relying on pretrained feature extractors.
//!
//! Submodules: [`render`] rasterizes single frames; [`manifest`] writes and
//! reads the on-disk dataset.

pub mod manifest;
pub mod render;

pub use manifest::{make_dataset, ClipRecord, DatasetManifest};

use crate::error::{Error, Result};
use crate::rng::shuffle;
use rand::Rng;

/// Sleeve options for the top garment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SleeveLength {
    None,
    Short,
    Medium,
    Long,
}

impl SleeveLength {
    pub const ALL: [SleeveLength; 4] = [
        SleeveLength::None,
        SleeveLength::Short,
        SleeveLength::Medium,
        SleeveLength::Long,
    ];

    /// The word used in texts and the manifest.
    pub fn word(self) -> &'static str {
        match self {
            SleeveLength::None => "no",
            SleeveLength::Short => "short",
            SleeveLength::Medium => "medium",
            SleeveLength::Long => "long",
        }
    }

    pub fn from_word(w: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|s| s.word() == w)
    }

    /// Fraction of the arm covered by the sleeve.
    pub fn coverage(self) -> f32 {
        match self {
            SleeveLength::None => 0.0,
            SleeveLength::Short => 0.35,
            SleeveLength::Medium => 0.65,
            SleeveLength::Long => 1.0,
        }
    }
}

/// Length options for the bottom garment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GarmentLength {
    Short,
    Medium,
    Long,
}

impl GarmentLength {
    pub const ALL: [GarmentLength; 3] = [
        GarmentLength::Short,
        GarmentLength::Medium,
        GarmentLength::Long,
    ];

    pub fn word(self) -> &'static str {
        match self {
            GarmentLength::Short => "short",
            GarmentLength::Medium => "medium",
            GarmentLength::Long => "long",
        }
    }

    pub fn from_word(w: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|g| g.word() == w)
    }

    /// Fraction of the leg covered by the garment.
    pub fn coverage(self) -> f32 {
        match self {
            GarmentLength::Short => 0.32,
            GarmentLength::Medium => 0.62,
            GarmentLength::Long => 0.95,
        }
    }
}

/// Garment colors, clothing shapes, and a small body-shape seed.
#[derive(Debug, Clone, PartialEq)]
pub struct AppearanceSpec {
    /// Top garment color, RGB in [0, 1].
    pub top_color: [f32; 3],
    /// Bottom garment color, RGB in [0, 1].
    pub bottom_color: [f32; 3],
    pub sleeve_length: SleeveLength,
    pub garment_length: GarmentLength,
    /// Deterministic body-proportion variant; text does not mention it.
    pub figure_id: u32,
}

impl AppearanceSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, c) in [("top_color", self.top_color), ("bottom_color", self.bottom_color)] {
            for v in c {
                if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                    return Err(Error::Data(format!(
                        "appearance field `{name}` out of range: {c:?}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The motion classes, ordered so any config prefix of size 4..=8 stays
/// maximally separable (the first four differ in centroid path, silhouette
/// width, and vertical extent respectively).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MotionClass {
    Stand,
    MoveRight,
    TurnAround,
    RaiseArms,
    MoveLeft,
    Wave,
    Squat,
    Jump,
}

impl MotionClass {
    pub const ALL: [MotionClass; 8] = [
        MotionClass::Stand,
        MotionClass::MoveRight,
        MotionClass::TurnAround,
        MotionClass::RaiseArms,
        MotionClass::MoveLeft,
        MotionClass::Wave,
        MotionClass::Squat,
        MotionClass::Jump,
    ];

    /// Identifier used in the manifest.
    pub fn name(self) -> &'static str {
        match self {
            MotionClass::Stand => "stand",
            MotionClass::MoveRight => "move_right",
            MotionClass::TurnAround => "turn_around",
            MotionClass::RaiseArms => "raise_arms",
            MotionClass::MoveLeft => "move_left",
            MotionClass::Wave => "wave",
            MotionClass::Squat => "squat",
            MotionClass::Jump => "jump",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|m| m.name() == name)
    }

    /// The phrase completing "she ...".
    pub fn phrase(self) -> &'static str {
        match self {
            MotionClass::Stand => "stands still",
            MotionClass::MoveRight => "walks to the right",
            MotionClass::TurnAround => "turns around",
            MotionClass::RaiseArms => "raises both arms",
            MotionClass::MoveLeft => "walks to the left",
            MotionClass::Wave => "waves her hand",
            MotionClass::Squat => "squats down",
            MotionClass::Jump => "jumps up",
        }
    }

    /// Index within the full class list.
    pub fn index(self) -> usize {
        Self::ALL.iter().position(|m| *m == self).expect("member of ALL")
    }
}

/// A motion class plus clip length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotionSpec {
    pub label: MotionClass,
    pub duration_frames: usize,
}

impl MotionSpec {
    pub fn validate(&self) -> Result<()> {
        if self.duration_frames < 2 {
            return Err(Error::Data(format!(
                "motion field `duration_frames` must be >= 2, got {}",
                self.duration_frames
            )));
        }
        Ok(())
    }
}

/// One H x W RGB raster with values in [-1, 1], row-major (y, x, channel).
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub height: usize,
    pub width: usize,
    pub data: Vec<f32>,
}

impl Frame {
    pub fn new(height: usize, width: usize) -> Self {
        Frame {
            height,
            width,
            data: vec![0.0; height * width * 3],
        }
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> [f32; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, rgb: [f32; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i] = rgb[0];
        self.data[i + 1] = rgb[1];
        self.data[i + 2] = rgb[2];
    }

    /// Channel-major copy (3, H, W) for the conv stack.
    pub fn to_chw(&self) -> Vec<f32> {
        let (h, w) = (self.height, self.width);
        let mut out = vec![0.0; 3 * h * w];
        for y in 0..h {
            for x in 0..w {
                let p = self.get(y, x);
                for c in 0..3 {
                    out[c * h * w + y * w + x] = p[c];
                }
            }
        }
        out
    }

    /// Inverse of [`Frame::to_chw`].
    pub fn from_chw(height: usize, width: usize, chw: &[f32]) -> Result<Self> {
        if chw.len() != 3 * height * width {
            return Err(Error::shape("Frame::from_chw", 3 * height * width, chw.len()));
        }
        let mut f = Frame::new(height, width);
        for y in 0..height {
            for x in 0..width {
                let rgb = [
                    chw[y * width + x],
                    chw[height * width + y * width + x],
                    chw[2 * height * width + y * width + x],
                ];
                f.set(y, x, rgb.map(|v| v.clamp(-1.0, 1.0)));
            }
        }
        Ok(f)
    }

    /// Mean absolute pixel difference to another frame.
    pub fn l1_to(&self, other: &Frame) -> f32 {
        assert_eq!(self.data.len(), other.data.len());
        let sum: f32 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .sum();
        sum / self.data.len() as f32
    }
}

/// A rendered clip with its generating parameters and paired texts.
#[derive(Debug, Clone)]
pub struct VideoClip {
    pub frames: Vec<Frame>,
    pub appearance: AppearanceSpec,
    pub motion: MotionSpec,
    pub appearance_text: String,
    pub motion_text: String,
}

/// Garment color palette; names are part of the text vocabulary.
/// Stored as u8 triples so rendered pixels live on the PNG lattice exactly.
pub const PALETTE: &[(&str, [u8; 3])] = &[
    ("red", [214, 31, 31]),
    ("blue", [38, 64, 214]),
    ("green", [26, 163, 51]),
    ("yellow", [232, 214, 31]),
    ("purple", [140, 38, 191]),
    ("orange", [242, 140, 20]),
];

/// Nearest palette name to an RGB triple in [0, 1].
pub fn color_name(rgb: [f32; 3]) -> &'static str {
    let mut best = PALETTE[0].0;
    let mut best_d = f32::INFINITY;
    for (name, c) in PALETTE {
        let d: f32 = (0..3)
            .map(|i| {
                let diff = rgb[i] - c[i] as f32 / 255.0;
                diff * diff
            })
            .sum();
        if d < best_d {
            best_d = d;
            best = name;
        }
    }
    best
}

/// Fill the text templates from ground-truth specs.
///
/// The grammar is closed: every produced word appears in the fixed vocabulary
/// (see `text_cond`), and two specs differing in one field produce texts
/// differing only in that field's word.
pub fn text_from_spec(appearance: &AppearanceSpec, motion: &MotionSpec) -> (String, String) {
    let appearance_text = format!(
        "a person wearing a {} top with {} sleeves and {} {} bottoms",
        color_name(appearance.top_color),
        appearance.sleeve_length.word(),
        appearance.garment_length.word(),
        color_name(appearance.bottom_color),
    );
    let motion_text = format!("she {}", motion.label.phrase());
    (appearance_text, motion_text)
}

/// Render a full clip; frame k is at pose phase k / (duration - 1).
///
/// `_rng_seed` is reserved for future stochastic variation; rendering is
/// currently a pure function of the specs, so equal inputs give equal clips.
pub fn generate_clip(
    appearance: &AppearanceSpec,
    motion: &MotionSpec,
    _rng_seed: u64,
    height: usize,
    width: usize,
) -> Result<VideoClip> {
    appearance.validate()?;
    motion.validate()?;
    let n = motion.duration_frames;
    let mut frames = Vec::with_capacity(n);
    for k in 0..n {
        let phase = k as f32 / (n - 1) as f32;
        frames.push(render::render_frame(appearance, phase, motion, height, width)?);
    }
    let (appearance_text, motion_text) = text_from_spec(appearance, motion);
    Ok(VideoClip {
        frames,
        appearance: appearance.clone(),
        motion: motion.clone(),
        appearance_text,
        motion_text,
    })
}

/// Indices selected when resampling `len` frames down/up to `n`:
/// `round(i * (len-1) / (n-1))`, which always keeps both endpoints.
pub fn normalize_indices(len: usize, n: usize) -> Vec<usize> {
    (0..n)
        .map(|i| {
            let x = i as f64 * (len - 1) as f64 / (n - 1) as f64;
            x.round() as usize
        })
        .collect()
}

/// Resample a clip to exactly `n` frames by nearest-index selection,
/// preserving the first and last frames exactly.
pub fn normalize_clip(clip: &VideoClip, n: usize) -> Result<VideoClip> {
    if n < 2 {
        return Err(Error::Data(format!("normalize_clip needs n >= 2, got {n}")));
    }
    if clip.frames.len() < 2 {
        return Err(Error::Data(format!(
            "normalize_clip needs a clip with >= 2 frames, got {}",
            clip.frames.len()
        )));
    }
    let idx = normalize_indices(clip.frames.len(), n);
    Ok(VideoClip {
        frames: idx.iter().map(|&i| clip.frames[i].clone()).collect(),
        appearance: clip.appearance.clone(),
        motion: MotionSpec {
            label: clip.motion.label,
            duration_frames: n,
        },
        appearance_text: clip.appearance_text.clone(),
        motion_text: clip.motion_text.clone(),
    })
}

/// Draw a random appearance spec: palette colors with a small per-clip jitter
/// (on the u8 lattice, so names stay recoverable), random garment shapes, and
/// one of four body-width variants.
pub fn draw_appearance(rng: &mut impl Rng) -> AppearanceSpec {
    let mut draw_color = |rng: &mut dyn rand::RngCore| {
        let (_, base) = PALETTE[rng.gen_range(0..PALETTE.len())];
        let mut c = [0.0f32; 3];
        for i in 0..3 {
            let jitter: i16 = rng.gen_range(-13..=13);
            let v = (base[i] as i16 + jitter).clamp(0, 255) as u8;
            c[i] = v as f32 / 255.0;
        }
        c
    };
    AppearanceSpec {
        top_color: draw_color(rng),
        bottom_color: draw_color(rng),
        sleeve_length: SleeveLength::ALL[rng.gen_range(0..SleeveLength::ALL.len())],
        garment_length: GarmentLength::ALL[rng.gen_range(0..GarmentLength::ALL.len())],
        figure_id: rng.gen_range(0..4),
    }
}

/// Assign `total_holdout` held-out slots round-robin across classes so every
/// class appears in both splits. Returns a held-out flag per clip index, given
/// each clip's class.
pub fn split_holdout(classes: &[usize], num_classes: usize, total_holdout: usize, rng: &mut impl Rng) -> Vec<bool> {
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); num_classes];
    for (i, &c) in classes.iter().enumerate() {
        by_class[c].push(i);
    }
    for list in &mut by_class {
        shuffle(list, rng);
    }
    let mut held = vec![false; classes.len()];
    let mut taken = vec![0usize; num_classes];
    let mut assigned = 0;
    let mut turn = 0;
    while assigned < total_holdout {
        let c = turn % num_classes;
        turn += 1;
        if taken[c] < by_class[c].len() {
            held[by_class[c][taken[c]]] = true;
            taken[c] += 1;
            assigned += 1;
        } else if taken.iter().zip(&by_class).all(|(t, l)| *t >= l.len()) {
            break; // nothing left to assign
        }
    }
    held
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn spec() -> AppearanceSpec {
        AppearanceSpec {
            top_color: [214.0 / 255.0, 31.0 / 255.0, 31.0 / 255.0],
            bottom_color: [38.0 / 255.0, 64.0 / 255.0, 214.0 / 255.0],
            sleeve_length: SleeveLength::Long,
            garment_length: GarmentLength::Short,
            figure_id: 0,
        }
    }

    #[test]
    fn texts_contain_ground_truth_words() {
        let motion = MotionSpec {
            label: MotionClass::Stand,
            duration_frames: 8,
        };
        let (at, mt) = text_from_spec(&spec(), &motion);
        assert!(at.contains("long"), "{at}");
        assert!(at.contains("red"), "{at}");
        assert!(mt.contains("stands"), "{mt}");
    }

    #[test]
    fn texts_differ_only_in_the_changed_field() {
        let motion = MotionSpec {
            label: MotionClass::Stand,
            duration_frames: 8,
        };
        let mut other = spec();
        other.sleeve_length = SleeveLength::Short;
        let (a, _) = text_from_spec(&spec(), &motion);
        let (b, _) = text_from_spec(&other, &motion);
        let diff: Vec<(&str, &str)> = a
            .split_whitespace()
            .zip(b.split_whitespace())
            .filter(|(x, y)| x != y)
            .collect();
        assert_eq!(diff, vec![("long", "short")]);
    }

    #[test]
    fn color_names_survive_the_clip_jitter() {
        let mut rng = stream(11, "jitter-name");
        for _ in 0..200 {
            let (name, base) = PALETTE[rng.gen_range(0..PALETTE.len())];
            let mut c = [0.0f32; 3];
            for i in 0..3 {
                let jitter: i16 = rng.gen_range(-13..=13);
                c[i] = (base[i] as i16 + jitter).clamp(0, 255) as f32 / 255.0;
            }
            assert_eq!(color_name(c), name);
        }
    }

    #[test]
    fn clip_phases_are_uniform_and_deterministic() {
        let motion = MotionSpec {
            label: MotionClass::RaiseArms,
            duration_frames: 8,
        };
        let clip = generate_clip(&spec(), &motion, 1, 64, 64).unwrap();
        assert_eq!(clip.frames.len(), 8);
        // Frame k equals a direct render at phase k/7.
        for (k, frame) in clip.frames.iter().enumerate() {
            let expect =
                render::render_frame(&spec(), k as f32 / 7.0, &motion, 64, 64).unwrap();
            assert_eq!(frame.data, expect.data, "frame {k}");
        }
        let again = generate_clip(&spec(), &motion, 1, 64, 64).unwrap();
        for (a, b) in clip.frames.iter().zip(&again.frames) {
            assert_eq!(a.data, b.data);
        }
    }

    #[test]
    fn normalize_indices_match_rounding_rule() {
        // Independent oracle: explicit rounding of i*(L-1)/(n-1).
        assert_eq!(normalize_indices(10, 4), vec![0, 3, 6, 9]);
        assert_eq!(normalize_indices(16, 2), vec![0, 15]);
        assert_eq!(normalize_indices(8, 8), (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn normalize_preserves_endpoints_exactly() {
        let motion = MotionSpec {
            label: MotionClass::TurnAround,
            duration_frames: 13,
        };
        let clip = generate_clip(&spec(), &motion, 0, 64, 64).unwrap();
        for n in [2, 5, 8, 20] {
            let norm = normalize_clip(&clip, n).unwrap();
            assert_eq!(norm.frames.len(), n);
            assert_eq!(norm.frames[0].data, clip.frames[0].data);
            assert_eq!(norm.frames[n - 1].data, clip.frames[12].data);
        }
        // n = len is the identity.
        let same = normalize_clip(&clip, 13).unwrap();
        for (a, b) in same.frames.iter().zip(&clip.frames) {
            assert_eq!(a.data, b.data);
        }
        assert!(normalize_clip(&clip, 1).is_err());
    }

    #[test]
    fn chw_round_trip_is_exact() {
        let motion = MotionSpec {
            label: MotionClass::Stand,
            duration_frames: 2,
        };
        let frame = render::render_frame(&spec(), 0.0, &motion, 64, 64).unwrap();
        let chw = frame.to_chw();
        let back = Frame::from_chw(64, 64, &chw).unwrap();
        assert_eq!(frame.data, back.data);
    }

    #[test]
    fn holdout_split_covers_every_class() {
        let mut rng = stream(2, "split");
        let classes: Vec<usize> = (0..100).map(|i| i % 4).collect();
        let held = split_holdout(&classes, 4, 10, &mut rng);
        assert_eq!(held.iter().filter(|h| **h).count(), 10);
        for c in 0..4 {
            let class_held = classes
                .iter()
                .zip(&held)
                .filter(|(cc, h)| **cc == c && **h)
                .count();
            assert!(class_held >= 2, "class {c} held {class_held}");
        }
    }

    #[test]
    fn invalid_specs_name_the_field() {
        let mut bad = spec();
        bad.top_color = [1.5, 0.0, 0.0];
        let err = bad.validate().unwrap_err();
        assert!(err.to_string().contains("top_color"), "{err}");
        let bad_motion = MotionSpec {
            label: MotionClass::Stand,
            duration_frames: 1,
        };
        assert!(bad_motion.validate().is_err());
    }
}
