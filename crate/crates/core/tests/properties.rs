use goalie_core::document::{parse_sequence, sequence_to_json};
use goalie_core::goalframe::{build_virtual_goal_frame, classify_direction, mirror_skeleton, DirectionThresholds};
use goalie_core::model::{denormalize_point, normalize_point, sample_frame_indices};
use goalie_core::optimizer::{optimize, optimize_iteration, OptimizerConfig};
use goalie_core::{FrameDims, JointId, Keyframe, Label, PixelPoint, Point2, Sequence, Skeleton};
use proptest::prelude::*;

fn point(range: f64) -> impl Strategy<Value = Point2> {
    (-range..range, -range..range).prop_map(|(x, y)| Point2::new(x, y))
}

fn skeleton() -> impl Strategy<Value = Skeleton> {
    proptest::array::uniform13(point(0.6))
        .prop_filter("head away from hips", |j| {
            let s = Skeleton::from_array(*j);
            s[JointId::Head].distance(s.hip_midpoint()) > 1e-3
        })
        .prop_map(Skeleton::from_array)
}

fn sequence() -> impl Strategy<Value = Sequence> {
    (proptest::collection::vec((skeleton(), point(0.6)), 10), 1u32..4000, 1u32..4000).prop_map(|(frames, w, h)| {
        let frames = frames
            .into_iter()
            .enumerate()
            .map(|(i, (skeleton, ball))| Keyframe {
                index: i,
                time: i as f64 / 30.0,
                skeleton,
                ball,
                ball_radius: None,
            })
            .collect();
        Sequence::new(frames, FrameDims::new(w, h).unwrap(), Label::Hit, "prop").unwrap()
    })
}

fn flip_x(p: Point2) -> Point2 {
    Point2::new(-p.x, p.y)
}

proptest! {
    #[test]
    fn normalize_round_trip(x in -10.0f64..5000.0, y in -10.0f64..5000.0, w in 1u32..8000, h in 1u32..8000) {
        let dims = FrameDims::new(w, h).unwrap();
        let back = denormalize_point(normalize_point(PixelPoint::new(x, y), dims).unwrap(), dims).unwrap();
        prop_assert!((back.x - x).abs() <= 1e-9 && (back.y - y).abs() <= 1e-9);
    }

    #[test]
    fn sampling_is_strictly_increasing(total in 10usize..5000) {
        let idx = sample_frame_indices(total, 10).unwrap();
        prop_assert_eq!(idx.len(), 10);
        prop_assert_eq!(idx[0], 0);
        prop_assert_eq!(idx[9], total - 1);
        prop_assert!(idx.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn mirror_is_an_involutive_isometry(s in skeleton()) {
        let m = mirror_skeleton(&s).unwrap();
        let mm = mirror_skeleton(&m).unwrap();
        for j in JointId::ALL {
            prop_assert!(mm[j].distance(s[j]) <= 1e-9);
        }
        for a in JointId::ALL {
            for b in JointId::ALL {
                let d0 = s[a].distance(s[b]);
                let d1 = m[a.counterpart()].distance(m[b.counterpart()]);
                prop_assert!((d0 - d1).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn goal_frame_is_a_rigid_move(seq in sequence(), g in 1usize..10) {
        let goal = build_virtual_goal_frame(&seq, g, None, DirectionThresholds::default()).unwrap();
        let src = &seq.frames()[g].skeleton;
        let base = if goal.mirrored { mirror_skeleton(src).unwrap() } else { *src };
        let shift = goal.skeleton[goal.blocking_joint] - base[goal.blocking_joint];
        for j in JointId::ALL {
            let d = goal.skeleton[j] - base[j] - shift;
            prop_assert!(d.norm() <= 1e-9);
        }
        prop_assert_eq!(goal.skeleton[goal.blocking_joint], seq.frames()[g].ball);
    }

    #[test]
    fn fixed_frames_and_determinism(seq in sequence(), g in 1usize..10) {
        let goal = build_virtual_goal_frame(&seq, g, None, DirectionThresholds::default()).unwrap();
        let cfg = OptimizerConfig { convergence_tol: 0.0, ..Default::default() };
        let a = optimize(&seq, &goal, &cfg).unwrap();
        let b = optimize(&seq, &goal, &cfg).unwrap();
        prop_assert_eq!(&a, &b);
        let f = a.sequence.frames();
        prop_assert_eq!(f[0].skeleton, seq.frames()[0].skeleton);
        prop_assert_eq!(f[g].skeleton, goal.skeleton);
        for (x, y) in f.iter().zip(seq.frames()) {
            prop_assert_eq!(x.ball, y.ball);
        }
    }

    #[test]
    fn axes_and_joints_are_independent(seq in sequence(), g in 1usize..10, dy in -0.3f64..0.3, joint in 0usize..13) {
        let goal = build_virtual_goal_frame(&seq, g, None, DirectionThresholds::default()).unwrap();
        let mut track = seq.skeletons();
        track[g] = goal.skeleton;
        let base = optimize_iteration(&track, &goal).unwrap();

        // perturb y of one joint in every frame, goal included
        let j = JointId::ALL[joint];
        let mut moved = track.clone();
        for s in &mut moved {
            s[j].y += dy;
        }
        let mut goal2 = goal.clone();
        goal2.skeleton[j].y += dy;
        let out = optimize_iteration(&moved, &goal2).unwrap();
        for (a, b) in out.iter().zip(&base) {
            for k in JointId::ALL {
                prop_assert_eq!(a[k].x, b[k].x);
                if k != j {
                    prop_assert_eq!(a[k].y, b[k].y);
                }
            }
        }
    }

    #[test]
    fn document_round_trip(seq in sequence()) {
        let back = parse_sequence(&sequence_to_json(&seq)).unwrap();
        prop_assert_eq!(back.dims, seq.dims);
        for (a, b) in back.frames().iter().zip(seq.frames()) {
            prop_assert!((a.time - b.time).abs() <= 1e-12);
            prop_assert!(a.ball.distance(b.ball) <= 1e-12);
            for j in JointId::ALL {
                prop_assert!(a.skeleton[j].distance(b.skeleton[j]) <= 1e-12);
            }
        }
    }

    #[test]
    fn classification_ignores_horizontal_flip(seq in sequence(), g in 1usize..10) {
        let flipped: Vec<Keyframe> = seq
            .frames()
            .iter()
            .map(|f| Keyframe {
                skeleton: Skeleton::from_fn(|j| flip_x(f.skeleton[j])),
                ball: flip_x(f.ball),
                ..f.clone()
            })
            .collect();
        let flipped = Sequence::new(flipped, seq.dims, seq.label, "flip").unwrap();
        let t = DirectionThresholds::default();
        prop_assert_eq!(classify_direction(&seq, g, t).unwrap(), classify_direction(&flipped, g, t).unwrap());
    }
}
