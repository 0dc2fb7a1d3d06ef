//! The full correction pipeline: pick the goal frame, classify the
//! scenario, build the virtual goal frame and optimize.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::goalframe::{
    build_virtual_goal_frame, choose_goal_index, DirectionClass, DirectionThresholds, GoalMargins, GoalRegion,
    VirtualGoalFrame,
};
use crate::model::{JointId, Sequence};
use crate::optimizer::{optimize, OptimizerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CorrectionConfig {
    pub goal_frame: Option<usize>,
    pub blocking_joint: Option<JointId>,
    pub optimizer: OptimizerConfig,
    pub thresholds: DirectionThresholds,
    pub margins: GoalMargins,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionReport {
    pub source_id: String,
    pub direction: DirectionClass,
    pub goal_index: usize,
    pub blocking_joint: JointId,
    pub mirrored: bool,
    pub goal_region: GoalRegion,
    pub iterations: usize,
    pub converged: bool,
    pub max_displacement: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    pub sequence: Sequence,
    pub goal: VirtualGoalFrame,
    pub report: CorrectionReport,
}

pub fn correct(seq: &Sequence, cfg: &CorrectionConfig) -> Result<Correction> {
    cfg.optimizer.validate()?;
    let region = GoalRegion::from_ready_pose(&seq.frames()[0].skeleton, cfg.margins);
    let goal_index = choose_goal_index(seq, &region, cfg.goal_frame)?;
    let goal = build_virtual_goal_frame(seq, goal_index, cfg.blocking_joint, cfg.thresholds)?;
    let optimized = optimize(seq, &goal, &cfg.optimizer)?;

    for frame in optimized.sequence.frames() {
        if let Some((joint, _)) = frame.skeleton.iter().find(|(_, p)| !p.within_limit()) {
            return Err(Error::OutOfFrame {
                frame: frame.index,
                joint,
            });
        }
    }

    let report = CorrectionReport {
        source_id: seq.source_id.clone(),
        direction: goal.direction,
        goal_index,
        blocking_joint: goal.blocking_joint,
        mirrored: goal.mirrored,
        goal_region: region,
        iterations: optimized.report.iterations,
        converged: optimized.report.converged,
        max_displacement: optimized.report.max_displacement,
    };
    Ok(Correction {
        sequence: optimized.sequence,
        goal,
        report,
    })
}
