//! Correction of a goalkeeper's keyframed 2D motion so that the keeper
//! intercepts the ball.
//!
//! The pipeline works on ten evenly sampled keyframes of a front-view clip:
//!
//! 1. [`goalframe`] picks the frame `G` where the ball reaches the goal,
//!    classifies the keeper's mistake, mirrors the pose when the keeper dove
//!    the wrong way, and translates it so a blocking joint sits on the ball.
//! 2. [`optimizer`] repeatedly re-derives every other frame (except frame 0)
//!    as a quadratic through two neighboring frames and the goal frame.
//! 3. [`render`] turns original and corrected clips into SVG frames and a GIF.
//!
//! [`ingest`] and [`document`] cover the input side: pose-detector output
//! and the canonical JSON sequence format.
//!
//! ```
//! use goalie_core::{correct::{correct, CorrectionConfig}, document::parse_sequence};
//!
//! let text = include_str!("../fixtures/same_direction.json");
//! let seq = parse_sequence(text).unwrap();
//! let fixed = correct(&seq, &CorrectionConfig::default()).unwrap();
//! let g = fixed.report.goal_index;
//! let frame = &fixed.sequence.frames()[g];
//! assert_eq!(frame.skeleton[fixed.report.blocking_joint], frame.ball);
//! ```

pub mod correct;
pub mod document;
pub mod error;
pub mod goalframe;
pub mod ingest;
pub mod model;
pub mod optimizer;
pub mod render;

pub use error::{Error, Result};
pub use model::{FrameDims, JointId, Keyframe, Label, PixelPoint, Point2, Sequence, Skeleton};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/coordinates.md")]
    mod coordinates {}
    #[doc = include_str!("../../../book/src/skeleton.md")]
    mod skeleton {}
    #[doc = include_str!("../../../book/src/goal-frame.md")]
    mod goal_frame {}
    #[doc = include_str!("../../../book/src/optimizer.md")]
    mod optimizer {}
    #[doc = include_str!("../../../book/src/rendering.md")]
    mod rendering {}
    #[doc = include_str!("../../../book/src/sequence-format.md")]
    mod sequence_format {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
