//! Heading-up raster of the scene around one agent.
//!
//! The agent sits at the corner shared by the four central pixels. Row 0 is
//! the far end ahead of the bow; column 0 is to port. Pixel `(row, col)`
//! covers forward offsets `[(H/2 − row − 1)·cell, (H/2 − row)·cell]` and
//! starboard offsets `[(col − W/2)·cell, (col − W/2 + 1)·cell]`.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::VesselState;
use crate::geometry::ObstacleSet;
use crate::math::Vec2;

use super::ObservationError;

pub const BEV_CHANNELS: usize = 4;
pub const CH_LAND: usize = 0;
pub const CH_STATIC: usize = 1;
pub const CH_MOVING: usize = 2;
pub const CH_GOAL: usize = 3;
pub const CHANNEL_NAMES: [&str; BEV_CHANNELS] = ["land", "static", "moving", "goal"];

/// Line sampling density in samples per pixel.
const LINE_SAMPLES_PER_PIXEL: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BevConfig {
    /// Square raster side in pixels; must be even.
    pub size: usize,
    /// Minimum half-width of the view in metres.
    pub base_range: f64,
    /// Maximum half-width of the view in metres.
    pub max_range: f64,
    /// The view widens to `goal_margin × distance to goal` when larger.
    pub goal_margin: f64,
}

impl Default for BevConfig {
    fn default() -> Self {
        Self {
            size: 64,
            base_range: 200.0,
            max_range: 1500.0,
            goal_margin: 1.2,
        }
    }
}

impl BevConfig {
    pub fn validate(&self) -> Result<(), ObservationError> {
        if self.size < 2 || !self.size.is_multiple_of(2) {
            return Err(ObservationError::Config(format!("BEV size must be even and >= 2, got {}", self.size)));
        }
        if !(self.base_range > 0.0 && self.max_range >= self.base_range && self.goal_margin >= 0.0) {
            return Err(ObservationError::Config(format!(
                "need 0 < base_range <= max_range, got {} and {}",
                self.base_range, self.max_range
            )));
        }
        Ok(())
    }

    /// Half-width of the view for an agent `goal_distance` from its goal.
    pub fn view_range(&self, goal_distance: f64) -> f64 {
        (self.goal_margin * goal_distance).max(self.base_range).min(self.max_range)
    }
}

/// `C × H × W` raster with values in `[0, 1]`, row-major per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct BevImage {
    pub size: usize,
    pub view_range: f64,
    pub data: Vec<f32>,
}

impl BevImage {
    pub fn zeros(size: usize, view_range: f64) -> Self {
        Self {
            size,
            view_range,
            data: vec![0.0; BEV_CHANNELS * size * size],
        }
    }

    pub fn cell(&self) -> f64 {
        2.0 * self.view_range / self.size as f64
    }

    pub fn get(&self, ch: usize, row: usize, col: usize) -> f32 {
        self.data[(ch * self.size + row) * self.size + col]
    }

    fn mark(&mut self, ch: usize, row: usize, col: usize) {
        let i = (ch * self.size + row) * self.size + col;
        self.data[i] = 1.0;
    }

    pub fn channel(&self, ch: usize) -> &[f32] {
        let n = self.size * self.size;
        &self.data[ch * n..(ch + 1) * n]
    }

    pub fn count(&self, ch: usize) -> usize {
        self.channel(ch).iter().filter(|&&v| v > 0.0).count()
    }

    /// Binary PGM (P5) of one channel, 255 for occupied.
    pub fn to_pgm(&self, ch: usize) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.size, self.size).into_bytes();
        out.extend(self.channel(ch).iter().map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8));
        out
    }

    /// Writes `<stem>_<channel>.pgm` for every channel into `dir`.
    pub fn write_pgm(&self, dir: &Path, stem: &str) -> std::io::Result<()> {
        for (ch, name) in CHANNEL_NAMES.iter().enumerate() {
            let mut f = std::fs::File::create(dir.join(format!("{stem}_{name}.pgm")))?;
            f.write_all(&self.to_pgm(ch))?;
        }
        Ok(())
    }
}

/// World to continuous pixel coordinates `(col, row)`.
struct Frame {
    origin: Vec2,
    cos: f64,
    sin: f64,
    inv_cell: f64,
    half: f64,
}

impl Frame {
    fn to_pixel(&self, w: Vec2) -> Vec2 {
        let d = w - self.origin;
        let fwd = d.x * self.cos + d.y * self.sin;
        let left = -d.x * self.sin + d.y * self.cos;
        Vec2::new(self.half - left * self.inv_cell, self.half - fwd * self.inv_cell)
    }
}

/// Clips the segment `a → b` to `[0, n]²` and returns the clipped endpoints.
fn clip(a: Vec2, b: Vec2, n: f64) -> Option<(Vec2, Vec2)> {
    let d = b - a;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [(-d.x, a.x), (d.x, n - a.x), (-d.y, a.y), (d.y, n - a.y)] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    (t0 <= t1).then(|| (a + d * t0, a + d * t1))
}

fn draw_line(img: &mut BevImage, ch: usize, a: Vec2, b: Vec2) {
    let n = img.size as f64;
    let Some((a, b)) = clip(a, b, n) else { return };
    let steps = ((b - a).norm() * LINE_SAMPLES_PER_PIXEL).ceil().max(1.0) as usize;
    for k in 0..=steps {
        let p = a.lerp(b, k as f64 / steps as f64);
        let col = (p.x.floor() as isize).clamp(0, img.size as isize - 1) as usize;
        let row = (p.y.floor() as isize).clamp(0, img.size as isize - 1) as usize;
        img.mark(ch, row, col);
    }
}

/// Fills pixels whose centers lie within `r` (pixels) of `c`. A disc that
/// covers no pixel center still marks the pixel containing `c`.
fn fill_disc(img: &mut BevImage, ch: usize, c: Vec2, r: f64) {
    let n = img.size as isize;
    let lo_c = ((c.x - r - 0.5).floor() as isize).max(0);
    let hi_c = ((c.x + r - 0.5).ceil() as isize).min(n - 1);
    let lo_r = ((c.y - r - 0.5).floor() as isize).max(0);
    let hi_r = ((c.y + r - 0.5).ceil() as isize).min(n - 1);
    let mut any = false;
    for row in lo_r..=hi_r {
        for col in lo_c..=hi_c {
            let dx = col as f64 + 0.5 - c.x;
            let dy = row as f64 + 0.5 - c.y;
            if dx * dx + dy * dy <= r * r {
                img.mark(ch, row as usize, col as usize);
                any = true;
            }
        }
    }
    if !any && c.x >= 0.0 && c.y >= 0.0 && c.x < n as f64 && c.y < n as f64 {
        img.mark(ch, c.y as usize, c.x as usize);
    }
}

/// Rasterizes land lines, static and moving circles and the goal disc into
/// separate channels.
pub fn render_bev(
    state: &VesselState,
    obstacles: &ObstacleSet,
    goal: Vec2,
    goal_radius: f64,
    cfg: &BevConfig,
) -> BevImage {
    let p = state.position();
    let range = cfg.view_range(p.distance(goal));
    let mut img = BevImage::zeros(cfg.size, range);
    let frame = Frame {
        origin: p,
        cos: state.psi.cos(),
        sin: state.psi.sin(),
        inv_cell: 1.0 / img.cell(),
        half: cfg.size as f64 / 2.0,
    };
    // Anything farther than this from the agent cannot touch the raster.
    let reach = range * std::f64::consts::SQRT_2;
    for poly in &obstacles.polylines {
        for (a, b) in poly.segments() {
            if crate::geometry::min_dist_point_segment(p, a, b) <= reach {
                draw_line(&mut img, CH_LAND, frame.to_pixel(a), frame.to_pixel(b));
            }
        }
    }
    for c in &obstacles.circles {
        if c.center.distance(p) - c.radius <= reach {
            let ch = if c.is_moving() { CH_MOVING } else { CH_STATIC };
            fill_disc(&mut img, ch, frame.to_pixel(c.center), c.radius * frame.inv_cell);
        }
    }
    if goal.distance(p) - goal_radius <= reach {
        fill_disc(&mut img, CH_GOAL, frame.to_pixel(goal), goal_radius * frame.inv_cell);
    }
    img
}
