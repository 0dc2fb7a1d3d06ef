//! Domain types shared by every stage: joints, normalized points, skeletons,
//! keyframes and ten-frame sequences.
//!
//! Normalized coordinates put the origin at the frame center and scale each
//! axis by half the frame extent, so in-frame pixels land in `[-1, 1]`. The
//! y axis points down, as in image space.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};
use std::str::FromStr;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Number of keyframes in a clip.
pub const FRAME_COUNT: usize = 10;

/// Number of tracked joints.
pub const JOINT_COUNT: usize = 13;

/// Slack allowed around `[-1, 1]` for slightly out-of-frame annotations.
pub const COORD_LIMIT: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointId {
    Head,
    LeftShoulder,
    RightShoulder,
    LeftElbow,
    RightElbow,
    LeftWrist,
    RightWrist,
    LeftHip,
    RightHip,
    LeftKnee,
    RightKnee,
    LeftAnkle,
    RightAnkle,
}

impl JointId {
    /// Canonical order, used for serialization, tie-breaks and guided labeling.
    pub const ALL: [JointId; JOINT_COUNT] = [
        JointId::Head,
        JointId::LeftShoulder,
        JointId::RightShoulder,
        JointId::LeftElbow,
        JointId::RightElbow,
        JointId::LeftWrist,
        JointId::RightWrist,
        JointId::LeftHip,
        JointId::RightHip,
        JointId::LeftKnee,
        JointId::RightKnee,
        JointId::LeftAnkle,
        JointId::RightAnkle,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            JointId::Head => "head",
            JointId::LeftShoulder => "left_shoulder",
            JointId::RightShoulder => "right_shoulder",
            JointId::LeftElbow => "left_elbow",
            JointId::RightElbow => "right_elbow",
            JointId::LeftWrist => "left_wrist",
            JointId::RightWrist => "right_wrist",
            JointId::LeftHip => "left_hip",
            JointId::RightHip => "right_hip",
            JointId::LeftKnee => "left_knee",
            JointId::RightKnee => "right_knee",
            JointId::LeftAnkle => "left_ankle",
            JointId::RightAnkle => "right_ankle",
        }
    }

    /// The left/right counterpart. `Head` maps to itself.
    pub fn counterpart(self) -> JointId {
        use JointId::*;
        match self {
            Head => Head,
            LeftShoulder => RightShoulder,
            RightShoulder => LeftShoulder,
            LeftElbow => RightElbow,
            RightElbow => LeftElbow,
            LeftWrist => RightWrist,
            RightWrist => LeftWrist,
            LeftHip => RightHip,
            RightHip => LeftHip,
            LeftKnee => RightKnee,
            RightKnee => LeftKnee,
            LeftAnkle => RightAnkle,
            RightAnkle => LeftAnkle,
        }
    }
}

impl fmt::Display for JointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for JointId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        JointId::ALL
            .into_iter()
            .find(|j| j.name() == s)
            .ok_or_else(|| Error::UnknownJoint(s.to_string()))
    }
}

/// A normalized 2D coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new((self.x + other.x) / 2.0, (self.y + other.y) / 2.0)
    }

    pub fn within_limit(self) -> bool {
        self.x.abs() <= COORD_LIMIT && self.y.abs() <= COORD_LIMIT
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

/// A coordinate in source-image pixels.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PixelPoint {
    pub x: f64,
    pub y: f64,
}

impl PixelPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        PixelPoint { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrameDims {
    pub width: u32,
    pub height: u32,
}

impl FrameDims {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        let dims = FrameDims { width, height };
        dims.validate()?;
        Ok(dims)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidDims {
                width: self.width,
                height: self.height,
            });
        }
        Ok(())
    }

    fn half(&self) -> (f64, f64) {
        (self.width as f64 / 2.0, self.height as f64 / 2.0)
    }
}

/// Maps a pixel coordinate to the frame-centered normalized space.
pub fn normalize_point(p: PixelPoint, dims: FrameDims) -> Result<Point2> {
    dims.validate()?;
    if !(p.x.is_finite() && p.y.is_finite()) {
        return Err(Error::NonFinite);
    }
    let (hw, hh) = dims.half();
    Ok(Point2::new((p.x - hw) / hw, (p.y - hh) / hh))
}

/// Inverse of [`normalize_point`].
pub fn denormalize_point(p: Point2, dims: FrameDims) -> Result<PixelPoint> {
    dims.validate()?;
    if !p.is_finite() {
        return Err(Error::NonFinite);
    }
    let (hw, hh) = dims.half();
    Ok(PixelPoint::new(p.x * hw + hw, p.y * hh + hh))
}

/// Picks `n` source-frame indices evenly spread over `0..total_frames`,
/// endpoints included: `round(i * (total - 1) / (n - 1))`.
pub fn sample_frame_indices(total_frames: usize, n: usize) -> Result<Vec<usize>> {
    if n == 0 || total_frames < n {
        return Err(Error::ClipTooShort {
            total: total_frames,
            requested: n,
        });
    }
    if n == 1 {
        return Ok(vec![0]);
    }
    let span = total_frames - 1;
    let steps = n - 1;
    // round-half-up in integer arithmetic
    Ok((0..n).map(|i| (2 * i * span + steps) / (2 * steps)).collect())
}

/// A 13-joint pose. Indexed by [`JointId`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Skeleton {
    joints: [Point2; JOINT_COUNT],
}

impl Skeleton {
    /// Builds a skeleton without checking invariants; see [`Skeleton::validate`].
    pub fn from_array(joints: [Point2; JOINT_COUNT]) -> Self {
        Skeleton { joints }
    }

    pub fn from_fn(mut f: impl FnMut(JointId) -> Point2) -> Self {
        Skeleton {
            joints: JointId::ALL.map(&mut f),
        }
    }

    pub fn new(joints: [Point2; JOINT_COUNT]) -> Result<Self> {
        let s = Skeleton { joints };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(j) = JointId::ALL.into_iter().find(|&j| !self[j].is_finite()) {
            return Err(Error::InvalidSkeleton(format!("joint {j} is not finite")));
        }
        if self[JointId::Head].distance(self.hip_midpoint()) <= 1e-9 {
            return Err(Error::InvalidSkeleton(
                "head coincides with hip midpoint".to_string(),
            ));
        }
        Ok(())
    }

    pub fn joints(&self) -> &[Point2; JOINT_COUNT] {
        &self.joints
    }

    pub fn iter(&self) -> impl Iterator<Item = (JointId, Point2)> + '_ {
        JointId::ALL.into_iter().map(move |j| (j, self[j]))
    }

    pub fn hip_midpoint(&self) -> Point2 {
        self[JointId::LeftHip].midpoint(self[JointId::RightHip])
    }

    pub fn shoulder_midpoint(&self) -> Point2 {
        self[JointId::LeftShoulder].midpoint(self[JointId::RightShoulder])
    }

    pub fn translated(&self, delta: Point2) -> Skeleton {
        Skeleton {
            joints: self.joints.map(|p| p + delta),
        }
    }
}

impl Index<JointId> for Skeleton {
    type Output = Point2;
    fn index(&self, j: JointId) -> &Point2 {
        &self.joints[j.index()]
    }
}

impl IndexMut<JointId> for Skeleton {
    fn index_mut(&mut self, j: JointId) -> &mut Point2 {
        &mut self.joints[j.index()]
    }
}

// Serialized as a map keyed by joint name, in canonical order.
impl Serialize for Skeleton {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(JOINT_COUNT))?;
        for (j, p) in self.iter() {
            map.serialize_entry(j.name(), &p)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Skeleton {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct SkeletonVisitor;

        impl<'de> Visitor<'de> for SkeletonVisitor {
            type Value = Skeleton;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map with all 13 joints")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Skeleton, A::Error> {
                let mut slots: [Option<Point2>; JOINT_COUNT] = [None; JOINT_COUNT];
                while let Some(key) = map.next_key::<String>()? {
                    let joint = JointId::from_str(&key)
                        .map_err(|_| de::Error::custom(format!("unknown joint `{key}`")))?;
                    if slots[joint.index()].is_some() {
                        return Err(de::Error::custom(format!("duplicate joint `{key}`")));
                    }
                    slots[joint.index()] = Some(map.next_value()?);
                }
                let mut joints = [Point2::ORIGIN; JOINT_COUNT];
                for j in JointId::ALL {
                    joints[j.index()] = slots[j.index()]
                        .ok_or_else(|| de::Error::custom(format!("missing joint `{j}`")))?;
                }
                Ok(Skeleton { joints })
            }
        }

        deserializer.deserialize_map(SkeletonVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    /// Goal conceded.
    Hit,
    /// Save.
    Miss,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Keyframe {
    pub index: usize,
    /// Seconds from clip start.
    pub time: f64,
    pub skeleton: Skeleton,
    pub ball: Point2,
    /// Kept as metadata; the optimizer ignores it.
    pub ball_radius: Option<f64>,
}

/// A ten-keyframe clip.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    frames: Vec<Keyframe>,
    pub dims: FrameDims,
    pub label: Label,
    pub source_id: String,
}

impl Sequence {
    pub fn new(frames: Vec<Keyframe>, dims: FrameDims, label: Label, source_id: impl Into<String>) -> Result<Self> {
        let seq = Sequence {
            frames,
            dims,
            label,
            source_id: source_id.into(),
        };
        seq.validate()?;
        Ok(seq)
    }

    pub fn validate(&self) -> Result<()> {
        self.dims.validate()?;
        if self.frames.len() != FRAME_COUNT {
            return Err(Error::InvalidSequence(format!(
                "expected {FRAME_COUNT} frames, got {}",
                self.frames.len()
            )));
        }
        let mut prev_time = f64::NEG_INFINITY;
        for (i, frame) in self.frames.iter().enumerate() {
            if frame.index != i {
                return Err(Error::InvalidSequence(format!(
                    "frame at position {i} has index {}",
                    frame.index
                )));
            }
            if !frame.time.is_finite() || frame.time < 0.0 || frame.time <= prev_time {
                return Err(Error::InvalidSequence(format!(
                    "frame {i}: time must be non-negative and strictly increasing"
                )));
            }
            prev_time = frame.time;
            frame.skeleton.validate()?;
            if !frame.ball.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(())
    }

    pub fn frames(&self) -> &[Keyframe] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn skeletons(&self) -> Vec<Skeleton> {
        self.frames.iter().map(|f| f.skeleton).collect()
    }

    /// Replaces the skeleton track, keeping times, ball and metadata.
    pub fn with_skeletons(&self, skeletons: &[Skeleton]) -> Result<Sequence> {
        if skeletons.len() != self.frames.len() {
            return Err(Error::LengthMismatch {
                left: self.frames.len(),
                right: skeletons.len(),
            });
        }
        let mut out = self.clone();
        for (frame, s) in out.frames.iter_mut().zip(skeletons) {
            frame.skeleton = *s;
        }
        Ok(out)
    }

    pub(crate) fn frames_mut(&mut self) -> &mut [Keyframe] {
        &mut self.frames
    }
}
