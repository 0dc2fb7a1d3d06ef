//! Import of externally produced multi-person keypoint detections.
//!
//! Detections arrive as the per-frame JSON documents written by common 2D
//! pose estimators: a `people` array where each entry carries a flat
//! `pose_keypoints_2d` list of 18 `(x, y, confidence)` triples in pixels.
//! Each person is mapped onto the 13-joint skeleton and ranked against the
//! previously accepted skeleton; a human then accepts or rejects.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{normalize_point, FrameDims, JointId, PixelPoint, Point2, Skeleton, JOINT_COUNT};

pub const DEFAULT_MIN_CONFIDENCE: f64 = 0.1;

pub const SLOT_COUNT: usize = 18;

/// The 18 landmark slots, in detector output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BodySlot {
    Nose,
    Neck,
    RightShoulder,
    RightElbow,
    RightWrist,
    LeftShoulder,
    LeftElbow,
    LeftWrist,
    RightHip,
    RightKnee,
    RightAnkle,
    LeftHip,
    LeftKnee,
    LeftAnkle,
    RightEye,
    LeftEye,
    RightEar,
    LeftEar,
}

impl BodySlot {
    pub fn index(self) -> usize {
        self as usize
    }

    /// Slot feeding each joint. Eyes, ears and neck have no joint.
    pub fn for_joint(joint: JointId) -> BodySlot {
        match joint {
            JointId::Head => BodySlot::Nose,
            JointId::LeftShoulder => BodySlot::LeftShoulder,
            JointId::RightShoulder => BodySlot::RightShoulder,
            JointId::LeftElbow => BodySlot::LeftElbow,
            JointId::RightElbow => BodySlot::RightElbow,
            JointId::LeftWrist => BodySlot::LeftWrist,
            JointId::RightWrist => BodySlot::RightWrist,
            JointId::LeftHip => BodySlot::LeftHip,
            JointId::RightHip => BodySlot::RightHip,
            JointId::LeftKnee => BodySlot::LeftKnee,
            JointId::RightKnee => BodySlot::RightKnee,
            JointId::LeftAnkle => BodySlot::LeftAnkle,
            JointId::RightAnkle => BodySlot::RightAnkle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Landmark {
    pub position: PixelPoint,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectedPerson {
    pub landmarks: [Option<Landmark>; SLOT_COUNT],
}

impl DetectedPerson {
    pub fn landmark(&self, slot: BodySlot) -> Option<Landmark> {
        self.landmarks[slot.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawDetection {
    pub people: Vec<DetectedPerson>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectionParseError {
    #[error("malformed detection document: {0}")]
    Json(String),
    #[error("person {person}: expected {expected} keypoint values, got {got}")]
    KeypointCount { person: usize, expected: usize, got: usize },
    #[error("person {person}, slot {slot}: confidence {value} outside [0, 1]")]
    Confidence { person: usize, slot: usize, value: f64 },
    #[error("person {person}, slot {slot}: non-finite coordinate")]
    NonFinite { person: usize, slot: usize },
}

#[derive(Deserialize)]
struct DetectionDoc {
    #[serde(default)]
    people: Vec<PersonDoc>,
}

#[derive(Deserialize)]
struct PersonDoc {
    pose_keypoints_2d: Vec<f64>,
}

impl RawDetection {
    /// Parses one per-frame detection document. An all-zero triple marks an
    /// undetected landmark.
    pub fn from_json(text: &str) -> Result<RawDetection, DetectionParseError> {
        let doc: DetectionDoc =
            serde_json::from_str(text).map_err(|e| DetectionParseError::Json(e.to_string()))?;
        let mut people = Vec::with_capacity(doc.people.len());
        for (person, p) in doc.people.into_iter().enumerate() {
            let values = p.pose_keypoints_2d;
            if values.len() != SLOT_COUNT * 3 {
                return Err(DetectionParseError::KeypointCount {
                    person,
                    expected: SLOT_COUNT * 3,
                    got: values.len(),
                });
            }
            let mut landmarks = [None; SLOT_COUNT];
            for (slot, triple) in values.chunks_exact(3).enumerate() {
                let (x, y, c) = (triple[0], triple[1], triple[2]);
                if !(x.is_finite() && y.is_finite()) {
                    return Err(DetectionParseError::NonFinite { person, slot });
                }
                if !(0.0..=1.0).contains(&c) {
                    return Err(DetectionParseError::Confidence { person, slot, value: c });
                }
                if x == 0.0 && y == 0.0 && c == 0.0 {
                    continue;
                }
                landmarks[slot] = Some(Landmark {
                    position: PixelPoint::new(x, y),
                    confidence: c,
                });
            }
            people.push(DetectedPerson { landmarks });
        }
        Ok(RawDetection { people })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Rejection {
    #[error("missing or low-confidence joints: {}", joint_list(.0))]
    MissingJoints(Vec<JointId>),
    #[error("unusable skeleton: {0}")]
    Invalid(String),
}

fn joint_list(joints: &[JointId]) -> String {
    joints.iter().map(|j| j.name()).collect::<Vec<_>>().join(", ")
}

/// Maps one detected person onto the 13-joint skeleton, normalizing every
/// coordinate. Rejects the person when a required landmark is absent or
/// below `min_confidence`.
pub fn map_landmarks(person: &DetectedPerson, dims: FrameDims, min_confidence: f64) -> Result<Skeleton, Rejection> {
    let mut joints = [Point2::ORIGIN; JOINT_COUNT];
    let mut missing = Vec::new();
    for joint in JointId::ALL {
        match person.landmark(BodySlot::for_joint(joint)) {
            Some(lm) if lm.confidence >= min_confidence => {
                joints[joint.index()] =
                    normalize_point(lm.position, dims).map_err(|e| Rejection::Invalid(e.to_string()))?;
            }
            _ => missing.push(joint),
        }
    }
    if !missing.is_empty() {
        return Err(Rejection::MissingJoints(missing));
    }
    Skeleton::new(joints).map_err(|e| Rejection::Invalid(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateProposal {
    pub frame_index: usize,
    pub skeleton: Skeleton,
    /// Distance to the previously accepted skeleton; lower is better.
    pub score: f64,
    pub source_person: usize,
}

/// Sum of per-joint Euclidean distances.
pub fn skeleton_distance(a: &Skeleton, b: &Skeleton) -> f64 {
    JointId::ALL.iter().map(|&j| a[j].distance(b[j])).sum()
}

/// Turns every mappable person into a proposal and sorts by score, ties by
/// person index. Without a previous skeleton the score is the hip midpoint's
/// distance to the frame center.
pub fn rank_candidates(
    frame_index: usize,
    detection: &RawDetection,
    previous: Option<&Skeleton>,
    dims: FrameDims,
    min_confidence: f64,
) -> Vec<CandidateProposal> {
    let mut proposals: Vec<CandidateProposal> = detection
        .people
        .iter()
        .enumerate()
        .filter_map(|(idx, person)| {
            let skeleton = map_landmarks(person, dims, min_confidence).ok()?;
            let score = match previous {
                Some(prev) => skeleton_distance(&skeleton, prev),
                None => skeleton.hip_midpoint().norm(),
            };
            Some(CandidateProposal {
                frame_index,
                skeleton,
                score,
                source_person: idx,
            })
        })
        .collect();
    proposals.sort_by(|a, b| a.score.total_cmp(&b.score).then(a.source_person.cmp(&b.source_person)));
    proposals
}
