//! Iterative quadratic-interpolation correction.
//!
//! Every frame other than frame 0 and the goal frame `G` is repeatedly
//! replaced, joint by joint and axis by axis, with the Lagrange quadratic
//! through two neighboring frames and the goal frame, evaluated at the
//! frame's own index. The abscissa of each node is its frame index; the
//! ordinate is one coordinate of one joint.
//!
//! Within a pass frames are updated in place, visiting them outward from the
//! goal frame (nearest first, ties to the lower index), so each frame reads
//! values already refreshed closer to the goal. A simultaneous (Jacobi)
//! update of the same scheme is unstable: the last-frame and goal-adjacent
//! cases extrapolate with weights above 2, and the iteration matrix has
//! spectral radius between 1.25 and 2. The outward in-place sweep is bounded
//! and converges to a track that every local quadratic reproduces.
//!
//! ```
//! use goalie_core::optimizer::{quadratic_interpolate, InterpolationNode};
//!
//! let node = |t, v| InterpolationNode { t, v };
//! // samples of t^2
//! let y = quadratic_interpolate(node(0.0, 0.0), node(2.0, 4.0), node(3.0, 9.0), 1.0).unwrap();
//! assert!((y - 1.0).abs() < 1e-12);
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::goalframe::VirtualGoalFrame;
use crate::model::{JointId, Point2, Sequence, Skeleton};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationNode {
    pub t: f64,
    pub v: f64,
}

/// Lagrange quadratic through `a`, `b` and `g`, evaluated at `t`.
pub fn quadratic_interpolate(a: InterpolationNode, b: InterpolationNode, g: InterpolationNode, t: f64) -> Result<f64> {
    let (ta, tb, tg) = (a.t, b.t, g.t);
    if !(ta.is_finite() && tb.is_finite() && tg.is_finite()) || ta == tb || ta == tg || tb == tg {
        return Err(Error::DegenerateNodes);
    }
    let wb = (t - tg) * (t - ta) / ((tb - tg) * (tb - ta));
    let wg = (t - tb) * (t - ta) / ((tg - tb) * (tg - ta));
    let wa = (t - tb) * (t - tg) / ((ta - tg) * (ta - tb));
    Ok(wb * b.v + wg * g.v + wa * a.v)
}

/// The two frames used alongside the goal when recomputing frame `i`.
///
/// Interior frames use `(i-1, i+1)`. The last frame uses `(i-2, i-1)`. A frame
/// right before the goal uses `(i-2, i-1)`, one right after it `(i+1, i+2)`.
/// When a rule yields an index that is out of range or equal to the goal, the
/// two nearest usable frames are taken instead, preferring frames on the same
/// side of the goal, then lower indices.
pub fn neighbor_indices(i: usize, goal: usize, n_frames: usize) -> Result<(usize, usize)> {
    if n_frames < 2 || i == 0 || i >= n_frames || goal == 0 || goal >= n_frames || i == goal {
        return Err(Error::NoNeighbors { frame: i, goal });
    }
    let last = n_frames - 1;
    let (a, b): (isize, isize) = {
        let i = i as isize;
        let g = goal as isize;
        if i as usize == last || i + 1 == g {
            (i - 2, i - 1)
        } else if i - 1 == g {
            (i + 1, i + 2)
        } else {
            (i - 1, i + 1)
        }
    };
    let usable = |k: isize| k >= 0 && k as usize <= last && k as usize != goal && k as usize != i;
    if usable(a) && usable(b) {
        return Ok((a as usize, b as usize));
    }
    nearest_usable(i, goal, n_frames).ok_or(Error::NoNeighbors { frame: i, goal })
}

fn nearest_usable(i: usize, goal: usize, n_frames: usize) -> Option<(usize, usize)> {
    let crosses = |k: usize| (k < goal) != (i < goal);
    let mut pool: Vec<usize> = (0..n_frames).filter(|&k| k != i && k != goal).collect();
    pool.sort_by_key(|&k| (k.abs_diff(i), crosses(k), k));
    match pool[..] {
        [x, y, ..] => Some((x.min(y), x.max(y))),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub iterations: usize,
    /// Stop once a whole pass moves no coordinate by this much or more.
    pub convergence_tol: f64,
    /// Also smooth the ball through the same scheme. Off by default: the
    /// observed ball trajectory is ground truth.
    pub interpolate_ball: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            iterations: 10,
            convergence_tol: 1e-6,
            interpolate_ball: false,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        if !(self.convergence_tol >= 0.0) {
            return Err(Error::InvalidConfig("convergence tolerance must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    /// Largest single-coordinate change in each executed pass.
    pub max_displacement: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn interpolate_point(track: &[Point2], frame: usize, goal: usize, goal_value: Point2) -> Result<Point2> {
    let (a, b) = neighbor_indices(frame, goal, track.len())?;
    let t = frame as f64;
    let axis = |get: fn(Point2) -> f64| {
        quadratic_interpolate(
            InterpolationNode { t: a as f64, v: get(track[a]) },
            InterpolationNode { t: b as f64, v: get(track[b]) },
            InterpolationNode { t: goal as f64, v: get(goal_value) },
            t,
        )
    };
    Ok(Point2::new(axis(|p| p.x)?, axis(|p| p.y)?))
}

/// Free frames in sweep order: outward from the goal, ties to the lower index.
pub fn sweep_order(goal: usize, n_frames: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (1..n_frames).filter(|&f| f != goal).collect();
    order.sort_by_key(|&f| (f.abs_diff(goal), f));
    order
}

fn sweep(track: &mut [Point2], goal: usize, goal_value: Point2) -> Result<f64> {
    let mut max_move = 0.0f64;
    for f in sweep_order(goal, track.len()) {
        let new = interpolate_point(track, f, goal, goal_value)?;
        let old = track[f];
        max_move = max_move.max((new.x - old.x).abs()).max((new.y - old.y).abs());
        track[f] = new;
    }
    Ok(max_move)
}

/// One pass over the skeleton track. Frames 0 and `goal` are returned
/// untouched; `frames[goal]` should already hold the goal skeleton.
pub fn optimize_iteration(frames: &[Skeleton], goal: &VirtualGoalFrame) -> Result<Vec<Skeleton>> {
    Ok(optimize_pass(frames, goal)?.0)
}

fn optimize_pass(frames: &[Skeleton], goal: &VirtualGoalFrame) -> Result<(Vec<Skeleton>, f64)> {
    let g = goal.goal_index;
    if g == 0 || g >= frames.len() {
        return Err(Error::InvalidGoalIndex {
            got: g,
            max: frames.len().saturating_sub(1),
        });
    }
    let mut out = frames.to_vec();
    let mut max_move = 0.0f64;
    for joint in JointId::ALL {
        let mut track: Vec<Point2> = frames.iter().map(|s| s[joint]).collect();
        max_move = max_move.max(sweep(&mut track, g, goal.skeleton[joint])?);
        for (s, p) in out.iter_mut().zip(&track) {
            s[joint] = *p;
        }
    }
    Ok((out, max_move))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimized {
    pub sequence: Sequence,
    pub report: IterationReport,
}

/// Installs the goal skeleton at frame `G` and runs up to `cfg.iterations`
/// passes, stopping early once a pass moves nothing by `convergence_tol`.
pub fn optimize(seq: &Sequence, goal: &VirtualGoalFrame, cfg: &OptimizerConfig) -> Result<Optimized> {
    cfg.validate()?;
    let g = goal.goal_index;
    if g == 0 || g >= seq.len() {
        return Err(Error::InvalidGoalIndex {
            got: g,
            max: seq.len() - 1,
        });
    }
    let mut track = seq.skeletons();
    track[g] = goal.skeleton;
    let mut balls: Vec<Point2> = seq.frames().iter().map(|f| f.ball).collect();

    let mut report = IterationReport {
        max_displacement: Vec::with_capacity(cfg.iterations),
        iterations: 0,
        converged: false,
    };
    for _ in 0..cfg.iterations {
        let (next, mut moved) = optimize_pass(&track, goal)?;
        track = next;
        if cfg.interpolate_ball {
            let ball_at_goal = balls[g];
            moved = moved.max(sweep(&mut balls, g, ball_at_goal)?);
        }
        report.iterations += 1;
        report.max_displacement.push(moved);
        if moved < cfg.convergence_tol {
            report.converged = true;
            break;
        }
    }

    let mut sequence = seq.with_skeletons(&track)?;
    if cfg.interpolate_ball {
        for (frame, ball) in sequence.frames_mut().iter_mut().zip(&balls) {
            frame.ball = *ball;
        }
    }
    Ok(Optimized { sequence, report })
}
