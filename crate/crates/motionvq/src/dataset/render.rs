//! Deterministic articulated-figure rasterizer.
//!
//! A frame is composed of solid-color primitives on a flat light background:
//! legs, bottom garment, shoes, torso, arms, sleeves, head, hair, eyes — in
//! that painter's order. All colors live on the 8-bit lattice, so writing a
//! frame to a lossless image file and reading it back is bit-exact.
//!
//! Geometry is parameterized by the motion class and a phase in [0, 1]:
//!
//! * `stand` — static.
//! * `move_right` / `move_left` — the figure translates horizontally while
//!   the legs scissor and the arms swing.
//! * `turn_around` — a three-quarter turn: the silhouette narrows with the
//!   facing angle (so the end pose is visually distinct from the start) and
//!   the face is hidden while the figure points away.
//! * `raise_arms` — both arms rotate from hanging to overhead.
//! * `wave` — one raised arm oscillates.
//! * `squat` — the body compresses toward the ground and recovers.
//! * `jump` — the figure leaves the ground on a parabolic arc, legs tucked.

use super::{AppearanceSpec, Frame, MotionClass, MotionSpec};
use crate::error::{Error, Result};

const BG: [u8; 3] = [224, 224, 230];
const SKIN: [u8; 3] = [222, 184, 153];
const HAIR: [u8; 3] = [54, 33, 22];
const SHOE: [u8; 3] = [40, 40, 46];

/// Joint configuration for one frame, in canvas units.
struct Pose {
    /// Figure center x.
    cx: f32,
    /// Vertical offset; negative lifts the figure off the ground.
    y_off: f32,
    /// Horizontal silhouette compression in (0, 1]; 1 = facing camera.
    width_scale: f32,
    /// Whether the face (eyes) is visible.
    facing_front: bool,
    /// Eye-line horizontal shift as the head turns, in fractions of W.
    gaze_shift: f32,
    /// Arm angles from straight-down, radians; pi = overhead.
    arm_left: f32,
    arm_right: f32,
    /// Walking scissor: legs offset by +/- this many pixels.
    leg_shift: f32,
    /// Body compression toward the ground, 0..1.
    crouch: f32,
    /// Leg shortening while airborne, 0..1.
    leg_tuck: f32,
}

fn neutral_pose(w: f32) -> Pose {
    Pose {
        cx: 0.5 * w,
        y_off: 0.0,
        width_scale: 1.0,
        facing_front: true,
        gaze_shift: 0.0,
        arm_left: 0.08,
        arm_right: 0.08,
        leg_shift: 0.0,
        crouch: 0.0,
        leg_tuck: 0.0,
    }
}

/// Map (motion class, phase) to joint configuration.
fn motion_pose(motion: MotionClass, phase: f32, h: f32, w: f32) -> Pose {
    let mut p = neutral_pose(w);
    match motion {
        MotionClass::Stand => {}
        MotionClass::MoveRight | MotionClass::MoveLeft => {
            let t = if motion == MotionClass::MoveRight { phase } else { 1.0 - phase };
            p.cx = (0.30 + 0.40 * t) * w;
            let swing = (std::f32::consts::TAU * 2.0 * phase).sin();
            p.leg_shift = 0.045 * w * swing;
            p.arm_left = 0.08 + 0.10 * swing;
            p.arm_right = 0.08 - 0.10 * swing;
        }
        MotionClass::TurnAround => {
            // Three-quarter turn: front -> profile -> back -> profile.
            let theta = 1.5 * std::f32::consts::PI * phase;
            p.width_scale = theta.cos().abs().max(0.18);
            p.facing_front = theta.cos() > 0.25;
            p.gaze_shift = 0.012 * theta.sin();
        }
        MotionClass::RaiseArms => {
            let a = 0.08 + (std::f32::consts::PI - 0.16) * phase;
            p.arm_left = a;
            p.arm_right = a;
        }
        MotionClass::Wave => {
            p.arm_right = 2.2 + 0.45 * (std::f32::consts::TAU * 2.0 * phase).sin();
        }
        MotionClass::Squat => {
            p.crouch = 1.0 - (2.0 * phase - 1.0).abs();
        }
        MotionClass::Jump => {
            let arc = 4.0 * phase * (1.0 - phase);
            p.y_off = -0.11 * h * arc;
            p.leg_tuck = arc;
        }
    }
    p
}

/// Pixel canvas of 8-bit colors; converted to [-1, 1] floats at the end.
struct Canvas {
    h: usize,
    w: usize,
    px: Vec<[u8; 3]>,
}

impl Canvas {
    fn new(h: usize, w: usize) -> Self {
        Canvas {
            h,
            w,
            px: vec![BG; h * w],
        }
    }

    /// Fill pixels whose centers fall inside [x0, x1) x [y0, y1).
    fn rect(&mut self, x0: f32, x1: f32, y0: f32, y1: f32, color: [u8; 3]) {
        let xs = (x0 - 0.5).ceil().max(0.0) as usize;
        let ys = (y0 - 0.5).ceil().max(0.0) as usize;
        let xe = (x1 - 0.5).ceil().clamp(0.0, self.w as f32) as usize;
        let ye = (y1 - 0.5).ceil().clamp(0.0, self.h as f32) as usize;
        for y in ys..ye {
            for x in xs..xe {
                self.px[y * self.w + x] = color;
            }
        }
    }

    /// Fill pixels whose centers lie within `r` of (cx, cy).
    fn circle(&mut self, cx: f32, cy: f32, r: f32, color: [u8; 3]) {
        self.capsule(cx, cy, cx, cy, r, color);
    }

    /// Fill pixels whose centers lie within `r` of the segment (x0,y0)-(x1,y1).
    fn capsule(&mut self, x0: f32, y0: f32, x1: f32, y1: f32, r: f32, color: [u8; 3]) {
        let xs = ((x0.min(x1) - r - 0.5).ceil().max(0.0)) as usize;
        let ys = ((y0.min(y1) - r - 0.5).ceil().max(0.0)) as usize;
        let xe = ((x0.max(x1) + r + 0.5).ceil().clamp(0.0, self.w as f32)) as usize;
        let ye = ((y0.max(y1) + r + 0.5).ceil().clamp(0.0, self.h as f32)) as usize;
        let dx = x1 - x0;
        let dy = y1 - y0;
        let len2 = dx * dx + dy * dy;
        for y in ys..ye {
            for x in xs..xe {
                let px = x as f32 + 0.5;
                let py = y as f32 + 0.5;
                let t = if len2 > 0.0 {
                    (((px - x0) * dx + (py - y0) * dy) / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let ex = px - (x0 + t * dx);
                let ey = py - (y0 + t * dy);
                if ex * ex + ey * ey <= r * r {
                    self.px[y * self.w + x] = color;
                }
            }
        }
    }
}

fn to_u8(c: [f32; 3]) -> [u8; 3] {
    c.map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
}

/// Rasterize one frame. Same inputs always give bit-identical output.
pub fn render_frame(
    appearance: &AppearanceSpec,
    pose_phase: f32,
    motion: &MotionSpec,
    height: usize,
    width: usize,
) -> Result<Frame> {
    appearance.validate()?;
    motion.validate()?;
    if !(0.0..=1.0).contains(&pose_phase) || !pose_phase.is_finite() {
        return Err(Error::Data(format!(
            "pose_phase must be in [0, 1], got {pose_phase}"
        )));
    }
    let h = height as f32;
    let w = width as f32;
    let pose = motion_pose(motion.label, pose_phase, h, w);

    // Body-width variant from the figure id; texts never mention it.
    let wf = [0.90, 0.96, 1.02, 1.08][(appearance.figure_id % 4) as usize];
    let ws = pose.width_scale * wf;

    let top = to_u8(appearance.top_color);
    let bottom = to_u8(appearance.bottom_color);

    // Vertical landmarks, then the squat compression toward the ground.
    let ground = 0.94 * h + pose.y_off;
    let squeeze = 1.0 - 0.18 * pose.crouch;
    let squash = |y: f32| ground - (ground - (y + pose.y_off)) * squeeze;

    let head_cy = squash(0.135 * h);
    let head_r = 0.062 * h;
    let torso_y0 = squash(0.21 * h);
    let torso_y1 = squash(0.50 * h);
    let torso_hw = 0.18 * w * ws;
    let shoulder_y = squash(0.225 * h);
    let arm_len = 0.28 * h * squeeze;
    let arm_r = (0.028 * w * wf).max(1.2);
    let leg_top = torso_y1;
    let leg_bottom = ground - 0.12 * h * pose.leg_tuck;
    let leg_hw = 0.045 * w * ws;
    let hip_off = (0.075 * w * ws).max(leg_hw * 0.6);

    let mut canvas = Canvas::new(height, width);

    // 1. Legs: skin columns, then the bottom garment over their upper part.
    for (side, shift_sign) in [(-1.0f32, 1.0f32), (1.0, -1.0)] {
        let lx = pose.cx + side * hip_off + shift_sign * pose.leg_shift;
        canvas.rect(lx - leg_hw, lx + leg_hw, leg_top, leg_bottom, SKIN);
    }
    let garment_y1 = leg_top + (leg_bottom - leg_top) * appearance.garment_length.coverage();
    for (side, shift_sign) in [(-1.0f32, 1.0f32), (1.0, -1.0)] {
        let lx = pose.cx + side * hip_off + shift_sign * pose.leg_shift;
        let gw = leg_hw * 1.15;
        canvas.rect(lx - gw, lx + gw, leg_top, garment_y1, bottom);
        // Shoes anchor the silhouette at the ground.
        canvas.rect(
            lx - leg_hw * 1.2,
            lx + leg_hw * 1.2,
            leg_bottom - 0.025 * h,
            leg_bottom,
            SHOE,
        );
    }

    // 2. Torso in the top-garment color.
    canvas.rect(pose.cx - torso_hw, pose.cx + torso_hw, torso_y0, torso_y1, top);

    // 3. Arms: skin capsules from the shoulders, sleeves drawn over them.
    for (side, angle) in [(-1.0f32, pose.arm_left), (1.0, pose.arm_right)] {
        let px = pose.cx + side * (torso_hw + arm_r * 0.6);
        let dir_x = side * angle.sin();
        let dir_y = angle.cos();
        let ex = px + arm_len * dir_x;
        let ey = shoulder_y + arm_len * dir_y;
        canvas.capsule(px, shoulder_y, ex, ey, arm_r, SKIN);
        canvas.circle(ex, ey, arm_r * 1.25, SKIN); // hand
        let cov = appearance.sleeve_length.coverage();
        if cov > 0.0 {
            let sx = px + arm_len * cov * dir_x;
            let sy = shoulder_y + arm_len * cov * dir_y;
            canvas.capsule(px, shoulder_y, sx, sy, arm_r * 1.15, top);
        }
    }

    // 4. Head, hair cap (whole head when facing away), eyes when frontal.
    canvas.circle(pose.cx, head_cy, head_r, SKIN);
    if pose.facing_front {
        canvas.rect(
            pose.cx - head_r,
            pose.cx + head_r,
            head_cy - head_r,
            head_cy - 0.25 * head_r,
            HAIR,
        );
        let eye_y = head_cy + 0.05 * head_r;
        let eye_dx = 0.40 * head_r * pose.width_scale;
        let gaze = pose.gaze_shift * w;
        for side in [-1.0f32, 1.0] {
            canvas.circle(pose.cx + gaze + side * eye_dx, eye_y, 0.14 * head_r.max(1.0), HAIR);
        }
    } else {
        canvas.circle(pose.cx, head_cy, head_r, HAIR);
    }

    // Convert the 8-bit canvas to the [-1, 1] float frame.
    let mut frame = Frame::new(height, width);
    for y in 0..height {
        for x in 0..width {
            let c = canvas.px[y * width + x];
            frame.set(y, x, c.map(|v| 2.0 * (v as f32 / 255.0) - 1.0));
        }
    }
    Ok(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{GarmentLength, SleeveLength};

    fn spec() -> AppearanceSpec {
        AppearanceSpec {
            top_color: [214.0 / 255.0, 31.0 / 255.0, 31.0 / 255.0],
            bottom_color: [38.0 / 255.0, 64.0 / 255.0, 214.0 / 255.0],
            sleeve_length: SleeveLength::Long,
            garment_length: GarmentLength::Medium,
            figure_id: 1,
        }
    }

    fn motion(label: MotionClass) -> MotionSpec {
        MotionSpec {
            label,
            duration_frames: 8,
        }
    }

    /// Columns containing any non-background pixel.
    fn occupied_cols(f: &Frame) -> Vec<usize> {
        let bgf = BG.map(|v| 2.0 * (v as f32 / 255.0) - 1.0);
        (0..f.width)
            .filter(|&x| {
                (0..f.height).any(|y| {
                    let p = f.get(y, x);
                    (0..3).any(|c| (p[c] - bgf[c]).abs() > 1e-3)
                })
            })
            .collect()
    }

    #[test]
    fn standing_is_pose_constant() {
        let a = render_frame(&spec(), 0.0, &motion(MotionClass::Stand), 128, 64).unwrap();
        let b = render_frame(&spec(), 1.0, &motion(MotionClass::Stand), 128, 64).unwrap();
        assert_eq!(a.data, b.data);
    }

    #[test]
    fn distinct_motions_render_distinct_frames() {
        let a = render_frame(&spec(), 0.5, &motion(MotionClass::TurnAround), 128, 64).unwrap();
        let b = render_frame(&spec(), 0.5, &motion(MotionClass::MoveLeft), 128, 64).unwrap();
        assert_ne!(a.data, b.data);
    }

    #[test]
    fn rendering_is_deterministic() {
        for label in MotionClass::ALL {
            let a = render_frame(&spec(), 0.37, &motion(label), 128, 64).unwrap();
            let b = render_frame(&spec(), 0.37, &motion(label), 128, 64).unwrap();
            assert_eq!(a.data, b.data, "{label:?}");
        }
    }

    #[test]
    fn turn_endpoints_differ_in_silhouette_width() {
        // Oracle: compare occupied-column counts of the two endpoint renders.
        let first = render_frame(&spec(), 0.0, &motion(MotionClass::TurnAround), 128, 64).unwrap();
        let last = render_frame(&spec(), 1.0, &motion(MotionClass::TurnAround), 128, 64).unwrap();
        let w0 = occupied_cols(&first).len();
        let w1 = occupied_cols(&last).len();
        assert!(
            w1 + 4 <= w0,
            "expected a narrower end profile: start {w0} cols, end {w1} cols"
        );
    }

    #[test]
    fn movement_shifts_the_figure() {
        let first = render_frame(&spec(), 0.0, &motion(MotionClass::MoveRight), 128, 64).unwrap();
        let last = render_frame(&spec(), 1.0, &motion(MotionClass::MoveRight), 128, 64).unwrap();
        let c0 = occupied_cols(&first);
        let c1 = occupied_cols(&last);
        let mid = |v: &[usize]| v.iter().sum::<usize>() as f32 / v.len() as f32;
        assert!(
            mid(&c1) > mid(&c0) + 10.0,
            "centroid did not move right: {} -> {}",
            mid(&c0),
            mid(&c1)
        );
    }

    #[test]
    fn all_values_lie_on_the_lattice_in_range() {
        let f = render_frame(&spec(), 0.25, &motion(MotionClass::Jump), 128, 64).unwrap();
        for v in &f.data {
            assert!((-1.0..=1.0).contains(v));
            // Every value decodes to a whole 8-bit level.
            let level = (v + 1.0) / 2.0 * 255.0;
            assert!((level - level.round()).abs() < 1e-3, "off-lattice value {v}");
        }
    }

    #[test]
    fn out_of_range_phase_is_rejected() {
        assert!(render_frame(&spec(), 1.5, &motion(MotionClass::Stand), 128, 64).is_err());
    }
}
