//! Scenario classification and construction of the virtual goal frame: the
//! target pose in which one blocking joint sits exactly on the ball.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{JointId, Point2, Sequence, Skeleton};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionClass {
    SameDirection,
    OppositeDirection,
    MinimalMovement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionThresholds {
    /// Below this horizontal ball travel the shot counts as straight at the keeper.
    pub ball: f64,
    /// Minimum horizontal keeper travel to count as a committed dive.
    pub keeper: f64,
}

impl Default for DirectionThresholds {
    fn default() -> Self {
        DirectionThresholds {
            ball: 0.08,
            keeper: 0.05,
        }
    }
}

fn check_goal_index(seq: &Sequence, goal: usize) -> Result<()> {
    let max = seq.len() - 1;
    if goal < 1 || goal > max {
        return Err(Error::InvalidGoalIndex { got: goal, max });
    }
    Ok(())
}

/// Compares horizontal ball travel with horizontal hip-midpoint travel
/// between frame 0 and the goal frame.
pub fn classify_direction(seq: &Sequence, goal: usize, thresholds: DirectionThresholds) -> Result<DirectionClass> {
    check_goal_index(seq, goal)?;
    let frames = seq.frames();
    let ball_dx = frames[goal].ball.x - frames[0].ball.x;
    let keeper_dx = frames[goal].skeleton.hip_midpoint().x - frames[0].skeleton.hip_midpoint().x;
    Ok(if ball_dx.abs() < thresholds.ball {
        DirectionClass::MinimalMovement
    } else if (ball_dx > 0.0) == (keeper_dx > 0.0) && keeper_dx.abs() >= thresholds.keeper {
        DirectionClass::SameDirection
    } else {
        DirectionClass::OppositeDirection
    })
}

/// Reflects `p` across the infinite line through `origin` with unit direction `dir`.
fn reflect(p: Point2, origin: Point2, dir: Point2) -> Point2 {
    let rel = p - origin;
    let along = dir * rel.dot(dir);
    origin + along * 2.0 - rel
}

/// Reflects every joint across the line through the head and the hip
/// midpoint, then swaps left/right labels so limbs stay anatomically named.
pub fn mirror_skeleton(s: &Skeleton) -> Result<Skeleton> {
    let head = s[JointId::Head];
    let axis = s.hip_midpoint() - head;
    let len = axis.norm();
    if !len.is_finite() || len <= 1e-9 {
        return Err(Error::DegenerateAxis);
    }
    let dir = axis * (1.0 / len);
    Ok(Skeleton::from_fn(|j| reflect(s[j.counterpart()], head, dir)))
}

/// Nearest joint to the ball; ties go to the earlier joint in canonical order.
pub fn select_blocking_joint(s: &Skeleton, ball: Point2) -> JointId {
    let mut best = JointId::Head;
    let mut best_d = f64::INFINITY;
    for (j, p) in s.iter() {
        let d = p.distance(ball);
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

/// Axis-aligned rectangle in normalized coordinates (y down, so `top < bottom`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoalRegion {
    pub left: f64,
    pub right: f64,
    pub top: f64,
    pub bottom: f64,
}

/// Margins used to derive the goal mouth from the keeper's frame-0 pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoalMargins {
    pub side: f64,
    pub above_head: f64,
}

impl Default for GoalMargins {
    fn default() -> Self {
        GoalMargins {
            side: 0.35,
            above_head: 0.15,
        }
    }
}

impl GoalRegion {
    /// The goal mouth behind a keeper standing in the ready pose: the
    /// shoulder span widened on both sides, from above the head down to the
    /// lowest ankle.
    pub fn from_ready_pose(s: &Skeleton, margins: GoalMargins) -> GoalRegion {
        let ls = s[JointId::LeftShoulder].x;
        let rs = s[JointId::RightShoulder].x;
        let ground = s[JointId::LeftAnkle].y.max(s[JointId::RightAnkle].y);
        GoalRegion {
            left: ls.min(rs) - margins.side,
            right: ls.max(rs) + margins.side,
            top: s[JointId::Head].y - margins.above_head,
            bottom: ground,
        }
    }

    pub fn contains(&self, p: Point2) -> bool {
        (self.left..=self.right).contains(&p.x) && (self.top..=self.bottom).contains(&p.y)
    }

    /// Euclidean distance from `p` to the rectangle; zero inside.
    pub fn distance(&self, p: Point2) -> f64 {
        let dx = (self.left - p.x).max(0.0).max(p.x - self.right);
        let dy = (self.top - p.y).max(0.0).max(p.y - self.bottom);
        dx.hypot(dy)
    }
}

/// Picks the goal frame: the override when given, else the first frame
/// (from 1) whose ball lies in `region`, else the frame whose ball comes
/// closest to it.
pub fn choose_goal_index(seq: &Sequence, region: &GoalRegion, override_index: Option<usize>) -> Result<usize> {
    if let Some(g) = override_index {
        check_goal_index(seq, g)?;
        return Ok(g);
    }
    let frames = &seq.frames()[1..];
    if let Some(f) = frames.iter().find(|f| region.contains(f.ball)) {
        return Ok(f.index);
    }
    let mut best = 1;
    let mut best_d = f64::INFINITY;
    for f in frames {
        let d = region.distance(f.ball);
        if d < best_d {
            best = f.index;
            best_d = d;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirtualGoalFrame {
    pub goal_index: usize,
    pub blocking_joint: JointId,
    pub mirrored: bool,
    pub direction: DirectionClass,
    pub skeleton: Skeleton,
    pub ball_at_goal: Point2,
}

/// Builds the target pose at frame `goal`: mirror when the keeper dove the
/// wrong way, then translate the whole skeleton so the blocking joint lands
/// on the ball.
pub fn build_virtual_goal_frame(
    seq: &Sequence,
    goal: usize,
    joint_override: Option<JointId>,
    thresholds: DirectionThresholds,
) -> Result<VirtualGoalFrame> {
    let direction = classify_direction(seq, goal, thresholds)?;
    let frame = &seq.frames()[goal];
    let mirrored = direction == DirectionClass::OppositeDirection;
    let source = if mirrored {
        mirror_skeleton(&frame.skeleton)?
    } else {
        frame.skeleton
    };
    let ball = frame.ball;
    let blocking_joint = joint_override.unwrap_or_else(|| select_blocking_joint(&source, ball));
    let mut skeleton = source.translated(ball - source[blocking_joint]);
    // p + (ball - p) can be off by an ulp; the contact must be exact.
    skeleton[blocking_joint] = ball;
    Ok(VirtualGoalFrame {
        goal_index: goal,
        blocking_joint,
        mirrored,
        direction,
        skeleton,
        ball_at_goal: ball,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FrameDims, Keyframe, Label};

    fn standing(offset_x: f64) -> Skeleton {
        let base = [
            (0.0, -0.8),
            (-0.15, -0.6),
            (0.15, -0.6),
            (-0.25, -0.35),
            (0.25, -0.35),
            (-0.3, -0.1),
            (0.3, -0.1),
            (-0.1, 0.0),
            (0.1, 0.0),
            (-0.12, 0.3),
            (0.12, 0.3),
            (-0.14, 0.6),
            (0.14, 0.6),
        ];
        Skeleton::from_array(base.map(|(x, y)| Point2::new(x + offset_x, y)))
    }

    fn seq_with(ball_x: impl Fn(usize) -> f64, keeper_x: impl Fn(usize) -> f64) -> Sequence {
        let frames = (0..10)
            .map(|i| Keyframe {
                index: i,
                time: i as f64 * 0.1,
                skeleton: standing(keeper_x(i)),
                ball: Point2::new(ball_x(i), 0.5 - 0.1 * i as f64),
                ball_radius: None,
            })
            .collect();
        Sequence::new(frames, FrameDims::new(640, 360).unwrap(), Label::Hit, "test").unwrap()
    }

    #[test]
    fn classification_examples() {
        let t = DirectionThresholds::default();
        let s = seq_with(|i| if i == 4 { 0.6 } else { 0.0 }, |i| if i == 4 { 0.3 } else { 0.0 });
        assert_eq!(classify_direction(&s, 4, t).unwrap(), DirectionClass::SameDirection);
        let s = seq_with(|i| if i == 4 { 0.6 } else { 0.0 }, |i| if i == 4 { -0.4 } else { 0.0 });
        assert_eq!(classify_direction(&s, 4, t).unwrap(), DirectionClass::OppositeDirection);
        let s = seq_with(|i| if i == 4 { 0.02 } else { 0.0 }, |i| if i == 4 { -0.3 } else { 0.0 });
        assert_eq!(classify_direction(&s, 4, t).unwrap(), DirectionClass::MinimalMovement);
        // keeper barely moves toward the ball: not a committed dive
        let s = seq_with(|i| if i == 4 { 0.6 } else { 0.0 }, |i| if i == 4 { 0.01 } else { 0.0 });
        assert_eq!(classify_direction(&s, 4, t).unwrap(), DirectionClass::OppositeDirection);
        assert!(classify_direction(&s, 0, t).is_err());
    }

    #[test]
    fn mirror_across_vertical_axis() {
        let mut s = standing(0.0);
        s[JointId::Head] = Point2::new(0.0, -0.8);
        s[JointId::LeftWrist] = Point2::new(0.5, 0.3);
        let m = mirror_skeleton(&s).unwrap();
        assert!(m[JointId::RightWrist].distance(Point2::new(-0.5, 0.3)) < 1e-12);
        assert_eq!(m[JointId::Head], s[JointId::Head]);
        // hips are symmetric about x=0 already
        assert_eq!(m[JointId::LeftHip], s[JointId::LeftHip]);
    }

    #[test]
    fn mirror_fixes_points_on_axis() {
        // tilted axis: head (0.2,-0.6), hip midpoint (-0.1, 0.3)
        let mut s = standing(0.0);
        s[JointId::Head] = Point2::new(0.2, -0.6);
        s[JointId::LeftHip] = Point2::new(-0.2, 0.3);
        s[JointId::RightHip] = Point2::new(0.0, 0.3);
        let on_axis = Point2::new(0.2 + (-0.3) * 0.5, -0.6 + 0.9 * 0.5);
        s[JointId::LeftKnee] = on_axis;
        s[JointId::RightKnee] = on_axis;
        let m = mirror_skeleton(&s).unwrap();
        assert!(m[JointId::RightKnee].distance(on_axis) < 1e-12);
        assert!(m[JointId::LeftKnee].distance(on_axis) < 1e-12);
    }

    #[test]
    fn mirror_rejects_degenerate_axis() {
        let mut s = standing(0.0);
        s[JointId::Head] = s.hip_midpoint();
        assert_eq!(mirror_skeleton(&s), Err(Error::DegenerateAxis));
    }

    #[test]
    fn blocking_joint_examples() {
        let mut s = standing(0.0);
        s[JointId::LeftWrist] = Point2::new(0.4, 0.2);
        // brute force: every other joint is at least 0.3 from the ball
        let ball = Point2::new(0.5, 0.2);
        for (j, p) in s.iter() {
            if j != JointId::LeftWrist {
                assert!(p.distance(ball) >= 0.3, "{j}");
            }
        }
        assert_eq!(select_blocking_joint(&s, ball), JointId::LeftWrist);
        assert_eq!(select_blocking_joint(&s, s[JointId::Head]), JointId::Head);
        // symmetric pose, ball on the symmetry axis level with the wrists
        let ball = Point2::new(0.0, -0.1);
        let s = standing(0.0);
        let d_hip = s[JointId::LeftHip].distance(ball);
        assert_eq!(d_hip, s[JointId::RightHip].distance(ball));
        assert_eq!(select_blocking_joint(&s, ball), JointId::LeftHip);
    }

    #[test]
    fn goal_index_selection() {
        let region = GoalRegion {
            left: -0.5,
            right: 0.5,
            top: -0.5,
            bottom: 0.0,
        };
        // ball y = 0.5 - 0.1 i enters y <= 0 at frame 5
        let s = seq_with(|_| 0.0, |_| 0.0);
        assert_eq!(choose_goal_index(&s, &region, None).unwrap(), 5);
        let region4 = GoalRegion { bottom: 0.1, ..region };
        assert_eq!(choose_goal_index(&s, &region4, None).unwrap(), 4);
        assert_eq!(choose_goal_index(&s, &region, Some(7)).unwrap(), 7);
        assert!(choose_goal_index(&s, &region, Some(0)).is_err());
        assert!(choose_goal_index(&s, &region, Some(10)).is_err());
    }

    #[test]
    fn goal_index_falls_back_to_closest() {
        let region = GoalRegion {
            left: 2.0,
            right: 3.0,
            top: -3.0,
            bottom: 3.0,
        };
        let s = seq_with(|i| [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 1.1, 0.9][i], |_| 0.0);
        // brute force over frames 1..9
        let expected = (1..10)
            .min_by(|&a, &b| {
                region
                    .distance(s.frames()[a].ball)
                    .total_cmp(&region.distance(s.frames()[b].ball))
                    .then(a.cmp(&b))
            })
            .unwrap();
        assert_eq!(expected, 8);
        assert_eq!(choose_goal_index(&s, &region, None).unwrap(), 8);
    }

    #[test]
    fn zero_translation_keeps_pose() {
        let s = seq_with(|_| 0.0, |_| 0.0);
        let g = 4;
        let ball = s.frames()[g].ball;
        let mut frames = s.frames().to_vec();
        frames[g].skeleton[JointId::RightWrist] = ball;
        let s = Sequence::new(frames, s.dims, s.label, "t").unwrap();
        let goal = build_virtual_goal_frame(&s, g, Some(JointId::RightWrist), Default::default()).unwrap();
        assert_eq!(goal.skeleton, s.frames()[g].skeleton);
        assert!(!goal.mirrored);
    }

    #[test]
    fn translation_is_rigid() {
        let s = seq_with(|i| if i == 4 { 0.5 } else { 0.0 }, |i| if i == 4 { 0.3 } else { 0.0 });
        let mut frames = s.frames().to_vec();
        frames[4].ball = Point2::new(0.5, 0.1);
        frames[4].skeleton[JointId::RightWrist] = Point2::new(0.45, 0.1);
        let s = Sequence::new(frames, s.dims, s.label, "t").unwrap();
        let goal = build_virtual_goal_frame(&s, 4, None, Default::default()).unwrap();
        assert_eq!(goal.direction, DirectionClass::SameDirection);
        assert_eq!(goal.blocking_joint, JointId::RightWrist);
        assert_eq!(goal.skeleton[JointId::RightWrist], Point2::new(0.5, 0.1));
        let src = &s.frames()[4].skeleton;
        for j in JointId::ALL {
            let shift = goal.skeleton[j] - src[j];
            assert!((shift.x - 0.05).abs() < 1e-12 && shift.y.abs() < 1e-12, "{j}");
        }
    }

    #[test]
    fn opposite_case_mirrors_then_translates() {
        let s = seq_with(|i| if i == 4 { 0.6 } else { 0.0 }, |i| if i == 4 { -0.4 } else { 0.0 });
        let goal = build_virtual_goal_frame(&s, 4, None, Default::default()).unwrap();
        assert!(goal.mirrored);
        // oracle: reflect by hand across the (vertical) head-hip line x = -0.4, swap labels
        let src = &s.frames()[4].skeleton;
        let manual = Skeleton::from_fn(|j| {
            let p = src[j.counterpart()];
            Point2::new(2.0 * -0.4 - p.x, p.y)
        });
        let delta = goal.ball_at_goal - manual[goal.blocking_joint];
        for j in JointId::ALL {
            assert!(goal.skeleton[j].distance(manual[j] + delta) < 1e-12, "{j}");
        }
        assert_eq!(goal.skeleton[goal.blocking_joint], goal.ball_at_goal);
    }
}
