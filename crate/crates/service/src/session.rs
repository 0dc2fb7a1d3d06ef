//! Annotation sessions: per-frame review of detector proposals, guided
//! manual joint placement and ball clicks. Everything a human enters is
//! stored in pixels; normalization happens on export.

use std::time::{SystemTime, UNIX_EPOCH};

use goalie_core::ingest::{skeleton_distance, CandidateProposal};
use goalie_core::model::{normalize_point, FRAME_COUNT, JOINT_COUNT};
use goalie_core::{FrameDims, JointId, Keyframe, Label, PixelPoint, Sequence, Skeleton};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameState {
    /// Nothing to review yet.
    Pending,
    CandidateProposed,
    PendingManual,
    Accepted,
}

/// The pose a frame was accepted with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum AcceptedPose {
    Candidate { rank: usize, skeleton: Skeleton },
    Manual { joints: Vec<PixelPoint> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSlot {
    /// File name inside the session's image directory.
    pub image: String,
    pub time: f64,
    pub state: FrameState,
    pub candidates: Vec<CandidateProposal>,
    pub cursor: usize,
    /// Guided clicks in canonical joint order.
    pub manual_joints: Vec<PixelPoint>,
    pub ball: Option<PixelPoint>,
    pub accepted: Option<AcceptedPose>,
}

impl FrameSlot {
    pub fn new(image: impl Into<String>, time: f64, candidates: Vec<CandidateProposal>) -> FrameSlot {
        let state = if candidates.is_empty() {
            FrameState::PendingManual
        } else {
            FrameState::CandidateProposed
        };
        FrameSlot {
            image: image.into(),
            time,
            state,
            candidates,
            cursor: 0,
            manual_joints: Vec::new(),
            ball: None,
            accepted: None,
        }
    }

    pub fn current_candidate(&self) -> Option<&CandidateProposal> {
        match self.state {
            FrameState::CandidateProposed => self.candidates.get(self.cursor),
            _ => None,
        }
    }

    /// Joint the next manual click will place.
    pub fn next_joint(&self) -> Option<JointId> {
        JointId::ALL.get(self.manual_joints.len()).copied()
    }

    pub fn is_complete(&self) -> bool {
        self.state == FrameState::Accepted && self.accepted.is_some() && self.ball.is_some()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalOverrides {
    pub goal_frame: Option<usize>,
    pub blocking_joint: Option<JointId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSession {
    pub session_id: String,
    pub version: u64,
    pub source_id: String,
    pub label: Label,
    pub dims: FrameDims,
    pub frames: Vec<FrameSlot>,
    pub overrides: GoalOverrides,
    /// Unix seconds.
    pub created_at: u64,
    pub updated_at: u64,
}

pub fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl AnnotationSession {
    pub fn new(
        session_id: impl Into<String>,
        source_id: impl Into<String>,
        label: Label,
        dims: FrameDims,
        frames: Vec<FrameSlot>,
    ) -> Result<AnnotationSession, ServiceError> {
        if frames.len() != FRAME_COUNT {
            return Err(ServiceError::invalid(format!("expected {FRAME_COUNT} frames, found {}", frames.len())));
        }
        dims.validate()?;
        let t = now();
        Ok(AnnotationSession {
            session_id: session_id.into(),
            version: 1,
            source_id: source_id.into(),
            label,
            dims,
            frames,
            overrides: GoalOverrides::default(),
            created_at: t,
            updated_at: t,
        })
    }

    fn frame_mut(&mut self, index: usize) -> Result<&mut FrameSlot, ServiceError> {
        self.frames.get_mut(index).ok_or(ServiceError::FrameNotFound(index))
    }

    pub fn frame(&self, index: usize) -> Result<&FrameSlot, ServiceError> {
        self.frames.get(index).ok_or(ServiceError::FrameNotFound(index))
    }

    /// Confirms the shown candidate, or the 13 manual clicks. The ball must
    /// be clicked first.
    pub fn accept(&mut self, index: usize) -> Result<(), ServiceError> {
        let dims = self.dims;
        let slot = self.frame_mut(index)?;
        if slot.ball.is_none() {
            return Err(ServiceError::InvalidState(format!("frame {index}: place the ball before accepting")));
        }
        let pose = match slot.state {
            FrameState::CandidateProposed => {
                let c = slot.candidates.get(slot.cursor).ok_or_else(|| {
                    ServiceError::InvalidState(format!("frame {index}: no candidate to accept"))
                })?;
                AcceptedPose::Candidate {
                    rank: slot.cursor,
                    skeleton: c.skeleton,
                }
            }
            FrameState::PendingManual => {
                if slot.manual_joints.len() != JOINT_COUNT {
                    return Err(ServiceError::InvalidState(format!(
                        "frame {index}: {} of {JOINT_COUNT} joints placed",
                        slot.manual_joints.len()
                    )));
                }
                manual_skeleton(&slot.manual_joints, dims)
                    .map_err(|e| ServiceError::InvalidState(format!("frame {index}: {e}")))?;
                AcceptedPose::Manual {
                    joints: slot.manual_joints.clone(),
                }
            }
            FrameState::Accepted => return Err(ServiceError::InvalidState(format!("frame {index} is already accepted"))),
            FrameState::Pending => return Err(ServiceError::InvalidState(format!("frame {index} has nothing to accept"))),
        };
        slot.accepted = Some(pose);
        slot.state = FrameState::Accepted;
        self.rerank_after(index);
        Ok(())
    }

    /// Advances to the next-ranked candidate; past the last one the frame
    /// falls back to manual placement.
    pub fn reject(&mut self, index: usize) -> Result<(), ServiceError> {
        let slot = self.frame_mut(index)?;
        if slot.state != FrameState::CandidateProposed {
            return Err(ServiceError::InvalidState(format!("frame {index} has no candidate under review")));
        }
        slot.cursor += 1;
        if slot.cursor >= slot.candidates.len() {
            slot.state = FrameState::PendingManual;
        }
        Ok(())
    }

    /// Places the next joint in guided order. Switches a frame under review
    /// to manual placement.
    pub fn place_joint(&mut self, index: usize, at: PixelPoint) -> Result<JointId, ServiceError> {
        let dims = self.dims;
        check_click(at, dims)?;
        let slot = self.frame_mut(index)?;
        if slot.state == FrameState::Accepted {
            return Err(ServiceError::InvalidState(format!("frame {index} is already accepted")));
        }
        let joint = slot
            .next_joint()
            .ok_or_else(|| ServiceError::InvalidState(format!("frame {index}: all {JOINT_COUNT} joints placed")))?;
        slot.state = FrameState::PendingManual;
        slot.manual_joints.push(at);
        Ok(joint)
    }

    pub fn undo_joint(&mut self, index: usize) -> Result<JointId, ServiceError> {
        let slot = self.frame_mut(index)?;
        if slot.state == FrameState::Accepted {
            return Err(ServiceError::InvalidState(format!("frame {index} is already accepted")));
        }
        slot.manual_joints.pop();
        Ok(JointId::ALL[slot.manual_joints.len()])
    }

    pub fn set_ball(&mut self, index: usize, at: PixelPoint) -> Result<(), ServiceError> {
        check_click(at, self.dims)?;
        self.frame_mut(index)?.ball = Some(at);
        Ok(())
    }

    pub fn set_overrides(&mut self, overrides: GoalOverrides) -> Result<(), ServiceError> {
        if let Some(g) = overrides.goal_frame {
            if g == 0 || g >= FRAME_COUNT {
                return Err(ServiceError::invalid(format!(
                    "goal frame must be ≥ 1 and ≤ {}, got {g}",
                    FRAME_COUNT - 1
                )));
            }
        }
        self.overrides = overrides;
        Ok(())
    }

    pub fn incomplete_frames(&self) -> Vec<usize> {
        (0..self.frames.len()).filter(|&i| !self.frames[i].is_complete()).collect()
    }

    fn accepted_skeleton(&self, index: usize) -> Option<Skeleton> {
        match self.frames.get(index)?.accepted.as_ref()? {
            AcceptedPose::Candidate { skeleton, .. } => Some(*skeleton),
            AcceptedPose::Manual { joints } => manual_skeleton(joints, self.dims).ok(),
        }
    }

    /// Once a frame is accepted, the following frame's untouched proposals
    /// are re-scored against it.
    fn rerank_after(&mut self, index: usize) {
        let Some(prev) = self.accepted_skeleton(index) else {
            return;
        };
        let Some(next) = self.frames.get_mut(index + 1) else {
            return;
        };
        if next.state != FrameState::CandidateProposed || next.cursor != 0 {
            return;
        }
        for c in &mut next.candidates {
            c.score = skeleton_distance(&c.skeleton, &prev);
        }
        next.candidates
            .sort_by(|a, b| a.score.total_cmp(&b.score).then(a.source_person.cmp(&b.source_person)));
    }

    /// The normalized sequence; fails listing every incomplete frame.
    pub fn to_sequence(&self) -> Result<Sequence, ServiceError> {
        let missing = self.incomplete_frames();
        if !missing.is_empty() {
            return Err(ServiceError::IncompleteFrames(missing));
        }
        let mut frames = Vec::with_capacity(FRAME_COUNT);
        for (i, slot) in self.frames.iter().enumerate() {
            let skeleton = self.accepted_skeleton(i).ok_or(ServiceError::IncompleteFrames(vec![i]))?;
            let ball = normalize_point(slot.ball.expect("complete frame has a ball"), self.dims)?;
            frames.push(Keyframe {
                index: i,
                time: slot.time,
                skeleton,
                ball,
                ball_radius: None,
            });
        }
        Ok(Sequence::new(frames, self.dims, self.label, self.source_id.clone())?)
    }
}

fn check_click(at: PixelPoint, dims: FrameDims) -> Result<(), ServiceError> {
    let p = normalize_point(at, dims)?;
    if !p.within_limit() {
        return Err(ServiceError::invalid(format!(
            "click ({}, {}) is too far outside the {}x{} frame",
            at.x, at.y, dims.width, dims.height
        )));
    }
    Ok(())
}

fn manual_skeleton(joints: &[PixelPoint], dims: FrameDims) -> goalie_core::Result<Skeleton> {
    let mut out = [goalie_core::Point2::ORIGIN; JOINT_COUNT];
    for (slot, &px) in out.iter_mut().zip(joints) {
        *slot = normalize_point(px, dims)?;
    }
    Skeleton::new(out)
}
