use goalie_core::correct::{correct, CorrectionConfig};
use goalie_core::document::parse_sequence;
use goalie_core::render::{from_render_space, layout_goalpost, render_sequence, to_render_space, RenderConfig, RenderPoint};
use goalie_core::{JointId, Point2, Sequence};

fn fixture() -> Sequence {
    parse_sequence(include_str!("../fixtures/opposite_direction.json")).unwrap()
}

#[test]
fn last_frame_is_skipped_by_default() {
    let seq = fixture();
    let out = render_sequence(&seq, None, &RenderConfig::default()).unwrap();
    assert_eq!(out.frames.len(), 9);
    let all = RenderConfig {
        skip_last_frame: false,
        ..Default::default()
    };
    assert_eq!(render_sequence(&seq, None, &all).unwrap().frames.len(), 10);
}

#[test]
fn corrected_overlay_adds_a_skeleton() {
    let seq = fixture();
    let fixed = correct(&seq, &CorrectionConfig::default()).unwrap().sequence;
    let cfg = RenderConfig::default();
    let single = render_sequence(&seq, None, &cfg).unwrap();
    let both = render_sequence(&seq, Some(&fixed), &cfg).unwrap();
    for doc in &single.frames {
        assert_eq!(doc.matches("class=\"skeleton").count(), 1);
        assert_eq!(doc.matches("<line").count(), 12);
        assert_eq!(doc.matches("class=\"ball\"").count(), 1);
    }
    for doc in &both.frames {
        assert_eq!(doc.matches("class=\"skeleton").count(), 2);
        assert!(doc.contains("skeleton original\" stroke=\"#9aa5b1\" stroke-opacity=\"0.45\""));
        // goalpost, then keepers, then ball
        let gp = doc.find("goalpost").unwrap();
        let sk = doc.find("skeleton").unwrap();
        let ball = doc.find("class=\"ball\"").unwrap();
        assert!(gp < sk && sk < ball);
    }
}

#[test]
fn goalpost_spans_shoulders_plus_offsets() {
    let cfg = RenderConfig::default();
    let mut frame = fixture().frames()[0].clone();
    // render x 1200 and 1300
    frame.skeleton[JointId::LeftShoulder] = from_render_space(RenderPoint { x: 1300.0, y: 400.0 }, &cfg);
    frame.skeleton[JointId::RightShoulder] = from_render_space(RenderPoint { x: 1200.0, y: 400.0 }, &cfg);
    let gp = layout_goalpost(&frame, &cfg);
    assert!((gp.width() - 110.0).abs() < 1e-9);
    assert!(((gp.left + gp.right) / 2.0 - 1250.0).abs() < 1e-9);
    assert!((gp.height() - 5.0).abs() < 1e-9);
    let head = to_render_space(frame.skeleton[JointId::Head], &cfg);
    assert!(gp.top < head.y);

    let bare = RenderConfig {
        goalpost_offset: 0.0,
        ..cfg
    };
    assert!((layout_goalpost(&frame, &bare).width() - 100.0).abs() < 1e-9);
}

#[test]
fn symmetric_pose_centers_the_goalpost() {
    let cfg = RenderConfig::default();
    let mut frame = fixture().frames()[0].clone();
    frame.skeleton[JointId::LeftShoulder] = Point2::new(0.2, -0.3);
    frame.skeleton[JointId::RightShoulder] = Point2::new(-0.2, -0.3);
    let gp = layout_goalpost(&frame, &cfg);
    assert!(((gp.left + gp.right) / 2.0 - 1250.0).abs() < 1e-9);
}

#[test]
fn output_is_deterministic_and_finite() {
    let seq = fixture();
    let fixed = correct(&seq, &CorrectionConfig::default()).unwrap().sequence;
    let cfg = RenderConfig {
        magnification: 3.0,
        ..Default::default()
    };
    let a = render_sequence(&seq, Some(&fixed), &cfg).unwrap();
    let b = render_sequence(&seq, Some(&fixed), &cfg).unwrap();
    assert_eq!(a.frames, b.frames);
    assert_eq!(a.gif, b.gif);
    assert!(a.gif.starts_with(b"GIF89a"));
    for doc in &a.frames {
        assert!(!doc.contains("NaN") && !doc.contains("inf"));
    }
}

#[test]
fn frames_are_written_to_disk() {
    let dir = tempfile::tempdir().unwrap();
    let out = render_sequence(&fixture(), None, &RenderConfig::default()).unwrap();
    let written = out.write_to_dir(dir.path()).unwrap();
    assert_eq!(written.len(), 10);
    assert!(dir.path().join("frame_008.svg").exists());
    assert!(dir.path().join("animation.gif").exists());
}
