//! Rendering of original and corrected sequences into SVG frame documents
//! and an animated GIF.
//!
//! Render space is screen space: origin at the top-left of a
//! `window_width x window_height` window, y growing downward. Normalized
//! y = -1 (the top of the source image) lands on the top edge.

mod raster;
mod svg;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{JointId, Keyframe, Point2, Sequence, Skeleton};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Color(pub [u8; 3]);

impl Color {
    pub const WHITE: Color = Color([255, 255, 255]);

    pub fn hex(self) -> String {
        let [r, g, b] = self.0;
        format!("#{r:02x}{g:02x}{b:02x}")
    }
}

impl FromStr for Color {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let named = match s.to_ascii_lowercase().as_str() {
            "white" => Some([255, 255, 255]),
            "black" => Some([0, 0, 0]),
            "red" => Some([220, 40, 40]),
            "yellow" => Some([255, 209, 102]),
            "orange" => Some([255, 140, 0]),
            _ => None,
        };
        if let Some(rgb) = named {
            return Ok(Color(rgb));
        }
        let hex = s.strip_prefix('#').unwrap_or(s);
        if hex.len() != 6 || !hex.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(Error::InvalidConfig(format!("unrecognized color `{s}`")));
        }
        let byte = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).expect("checked hex digits");
        Ok(Color([byte(0), byte(2), byte(4)]))
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.hex())
    }
}

impl Serialize for Color {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.hex())
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderConfig {
    pub window_width: u32,
    pub window_height: u32,
    /// Extra zoom applied on top of the window scaling.
    pub magnification: f64,
    /// Added on each side of the shoulder span to get the goalpost width.
    pub goalpost_offset: f64,
    pub goalpost_height: f64,
    /// Leave out the final keyframe, which only shows the aftermath.
    pub skip_last_frame: bool,
    pub ball_color: Color,
    pub frame_interval_ms: u32,
    /// Size of the GIF relative to the window.
    pub raster_scale: f64,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            window_width: 2500,
            window_height: 1200,
            magnification: 1.0,
            goalpost_offset: 5.0,
            goalpost_height: 5.0,
            skip_last_frame: true,
            ball_color: Color::WHITE,
            frame_interval_ms: 200,
            raster_scale: 0.5,
        }
    }
}

impl RenderConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(format!("{what} must be positive")));
        if self.window_width == 0 || self.window_height == 0 {
            return bad("window size");
        }
        if !(self.magnification > 0.0 && self.magnification.is_finite()) {
            return bad("magnification");
        }
        if !(self.goalpost_height > 0.0 && self.goalpost_height.is_finite()) {
            return bad("goalpost height");
        }
        if !(self.goalpost_offset >= 0.0 && self.goalpost_offset.is_finite()) {
            return Err(Error::InvalidConfig("goalpost offset must be non-negative".into()));
        }
        if !(self.raster_scale > 0.0 && self.raster_scale <= 4.0) {
            return Err(Error::InvalidConfig("raster scale must be in (0, 4]".into()));
        }
        Ok(())
    }

    fn half_extent(&self) -> (f64, f64) {
        (self.window_width as f64 / 2.0, self.window_height as f64 / 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RenderPoint {
    pub x: f64,
    pub y: f64,
}

pub fn to_render_space(p: Point2, cfg: &RenderConfig) -> RenderPoint {
    let (hw, hh) = cfg.half_extent();
    RenderPoint {
        x: p.x * cfg.magnification * hw + hw,
        y: p.y * cfg.magnification * hh + hh,
    }
}

pub fn from_render_space(r: RenderPoint, cfg: &RenderConfig) -> Point2 {
    let (hw, hh) = cfg.half_extent();
    Point2::new((r.x - hw) / (cfg.magnification * hw), (r.y - hh) / (cfg.magnification * hh))
}

/// Goalpost rectangle in render coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Goalpost {
    pub left: f64,
    pub right: f64,
    pub top: f64,
    pub bottom: f64,
}

impl Goalpost {
    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    pub fn height(&self) -> f64 {
        self.bottom - self.top
    }
}

/// Goalpost behind the keeper's opening stance: as wide as the shoulder
/// span plus `goalpost_offset` on each side, centered on the shoulders, with
/// the crossbar `goalpost_height` above the head.
pub fn layout_goalpost(first_frame: &Keyframe, cfg: &RenderConfig) -> Goalpost {
    let s = &first_frame.skeleton;
    let ls = to_render_space(s[JointId::LeftShoulder], cfg);
    let rs = to_render_space(s[JointId::RightShoulder], cfg);
    let head = to_render_space(s[JointId::Head], cfg);
    let width = (ls.x - rs.x).abs() + 2.0 * cfg.goalpost_offset;
    let center = (ls.x + rs.x) / 2.0;
    Goalpost {
        left: center - width / 2.0,
        right: center + width / 2.0,
        top: head.y - cfg.goalpost_height,
        bottom: head.y,
    }
}

/// Bone segments drawn for every skeleton. The head is drawn as a marker
/// at its joint and joined to the shoulder midpoint.
pub const BONES: [(JointId, JointId); 11] = [
    (JointId::LeftShoulder, JointId::RightShoulder),
    (JointId::LeftShoulder, JointId::LeftElbow),
    (JointId::LeftElbow, JointId::LeftWrist),
    (JointId::RightShoulder, JointId::RightElbow),
    (JointId::RightElbow, JointId::RightWrist),
    (JointId::LeftShoulder, JointId::LeftHip),
    (JointId::RightShoulder, JointId::RightHip),
    (JointId::LeftHip, JointId::LeftKnee),
    (JointId::LeftKnee, JointId::LeftAnkle),
    (JointId::RightHip, JointId::RightKnee),
    (JointId::RightKnee, JointId::RightAnkle),
];

/// All 12 segments of a skeleton in render space, head-to-neck first.
pub fn bone_segments(s: &Skeleton, cfg: &RenderConfig) -> Vec<(RenderPoint, RenderPoint)> {
    let r = |p: Point2| to_render_space(p, cfg);
    let mut out = Vec::with_capacity(BONES.len() + 1);
    out.push((r(s[JointId::Head]), r(s.shoulder_midpoint())));
    out.extend(BONES.iter().map(|&(a, b)| (r(s[a]), r(s[b]))));
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Layer {
    Original,
    Corrected,
}

/// Everything drawn in one frame, in render coordinates and z-order.
#[derive(Debug, Clone)]
pub(crate) struct FrameScene {
    pub index: usize,
    pub goalpost: Goalpost,
    pub skeletons: Vec<(Layer, Vec<(RenderPoint, RenderPoint)>, RenderPoint)>,
    pub ball: RenderPoint,
    pub ball_radius: f64,
    pub head_radius: f64,
}

#[derive(Debug, Clone)]
pub struct RenderedAnimation {
    /// One SVG document per rendered keyframe.
    pub frames: Vec<String>,
    pub gif: Vec<u8>,
}

impl RenderedAnimation {
    /// Writes `frame_000.svg`, `frame_001.svg`, ... and `animation.gif`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::with_capacity(self.frames.len() + 1);
        for (i, doc) in self.frames.iter().enumerate() {
            let path = dir.join(format!("frame_{i:03}.svg"));
            std::fs::write(&path, doc)?;
            written.push(path);
        }
        let path = dir.join("animation.gif");
        std::fs::write(&path, &self.gif)?;
        written.push(path);
        Ok(written)
    }
}

const DEFAULT_BALL_RADIUS: f64 = 0.02;
const HEAD_RADIUS: f64 = 0.035;

fn scenes(original: &Sequence, corrected: Option<&Sequence>, cfg: &RenderConfig) -> Vec<FrameScene> {
    let goalpost = layout_goalpost(&original.frames()[0], cfg);
    let (_, hh) = cfg.half_extent();
    let scale = cfg.magnification * hh;
    let count = if cfg.skip_last_frame {
        original.len().saturating_sub(1)
    } else {
        original.len()
    };
    (0..count)
        .map(|i| {
            let frame = &original.frames()[i];
            let mut skeletons = Vec::new();
            let head = |s: &Skeleton| to_render_space(s[JointId::Head], cfg);
            skeletons.push((Layer::Original, bone_segments(&frame.skeleton, cfg), head(&frame.skeleton)));
            if let Some(c) = corrected {
                let s = &c.frames()[i].skeleton;
                skeletons.push((Layer::Corrected, bone_segments(s, cfg), head(s)));
            }
            FrameScene {
                index: i,
                goalpost,
                skeletons,
                ball: to_render_space(frame.ball, cfg),
                ball_radius: frame.ball_radius.unwrap_or(DEFAULT_BALL_RADIUS) * scale,
                head_radius: HEAD_RADIUS * scale,
            }
        })
        .collect()
}

/// Renders one SVG per keyframe (minus the last when `skip_last_frame`) and
/// an animated GIF. With `corrected`, the original skeleton is drawn dimmed
/// under the corrected one.
pub fn render_sequence(original: &Sequence, corrected: Option<&Sequence>, cfg: &RenderConfig) -> Result<RenderedAnimation> {
    cfg.validate()?;
    if let Some(c) = corrected {
        if c.len() != original.len() {
            return Err(Error::LengthMismatch {
                left: original.len(),
                right: c.len(),
            });
        }
    }
    let scenes = scenes(original, corrected, cfg);
    let frames = scenes.iter().map(|s| svg::document(s, cfg)).collect();
    let gif = raster::animated_gif(&scenes, cfg)?;
    Ok(RenderedAnimation { frames, gif })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_space_examples() {
        let cfg = RenderConfig::default();
        assert_eq!(to_render_space(Point2::new(0.0, 0.0), &cfg), RenderPoint { x: 1250.0, y: 600.0 });
        assert_eq!(to_render_space(Point2::new(1.0, -1.0), &cfg), RenderPoint { x: 2500.0, y: 0.0 });
        let zoomed = RenderConfig {
            magnification: 2.0,
            ..cfg
        };
        // 0.5 * 2 * 1250 + 1250
        assert_eq!(to_render_space(Point2::new(0.5, 0.0), &zoomed), RenderPoint { x: 2500.0, y: 600.0 });
    }

    #[test]
    fn render_space_round_trip() {
        let cfg = RenderConfig {
            magnification: 1.7,
            ..Default::default()
        };
        let p = Point2::new(-0.37, 0.81);
        let back = from_render_space(to_render_space(p, &cfg), &cfg);
        assert!(back.distance(p) < 1e-12);
    }

    #[test]
    fn color_parsing() {
        assert_eq!("white".parse::<Color>().unwrap(), Color::WHITE);
        assert_eq!("#10a0FF".parse::<Color>().unwrap(), Color([0x10, 0xa0, 0xff]));
        assert!("#12345".parse::<Color>().is_err());
        assert!("mauve".parse::<Color>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(RenderConfig::default().validate().is_ok());
        let bad = RenderConfig {
            magnification: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = RenderConfig {
            window_height: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
