use std::fmt::Write;

use super::{FrameScene, Layer, RenderConfig, RenderPoint};

const BACKGROUND: &str = "#1e5631";
const GOALPOST: &str = "#f2f2f2";
const ORIGINAL: &str = "#9aa5b1";
const CORRECTED: &str = "#ffd166";

/// Liang-Barsky clipping of a segment to `[0, w] x [0, h]`.
pub(crate) fn clip_segment(a: RenderPoint, b: RenderPoint, w: f64, h: f64) -> Option<(RenderPoint, RenderPoint)> {
    if !(a.x.is_finite() && a.y.is_finite() && b.x.is_finite() && b.y.is_finite()) {
        return None;
    }
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for (p, q) in [(-dx, a.x), (dx, w - a.x), (-dy, a.y), (dy, h - a.y)] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    if t0 > t1 {
        return None;
    }
    let at = |t: f64| RenderPoint {
        x: (a.x + t * dx).clamp(0.0, w),
        y: (a.y + t * dy).clamp(0.0, h),
    };
    Some((at(t0), at(t1)))
}

fn inside(p: RenderPoint, w: f64, h: f64) -> bool {
    (0.0..=w).contains(&p.x) && (0.0..=h).contains(&p.y)
}

pub(crate) fn document(scene: &FrameScene, cfg: &RenderConfig) -> String {
    let w = cfg.window_width as f64;
    let h = cfg.window_height as f64;
    let stroke = (h / 240.0).max(1.0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        cfg.window_width, cfg.window_height, cfg.window_width, cfg.window_height
    );
    let _ = writeln!(out, "<title>frame {}</title>", scene.index);
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="{BACKGROUND}"/>"#);

    let gp = scene.goalpost;
    let (tl, br) = (
        RenderPoint {
            x: gp.left.clamp(0.0, w),
            y: gp.top.clamp(0.0, h),
        },
        RenderPoint {
            x: gp.right.clamp(0.0, w),
            y: gp.bottom.clamp(0.0, h),
        },
    );
    let _ = writeln!(
        out,
        r#"<rect class="goalpost" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="{GOALPOST}" stroke-width="{:.2}"/>"#,
        tl.x,
        tl.y,
        br.x - tl.x,
        br.y - tl.y,
        stroke
    );

    for (layer, bones, head) in &scene.skeletons {
        let (class, color, opacity) = match layer {
            Layer::Original if scene.skeletons.len() > 1 => ("original", ORIGINAL, 0.45),
            Layer::Original => ("original", CORRECTED, 1.0),
            Layer::Corrected => ("corrected", CORRECTED, 1.0),
        };
        let _ = writeln!(
            out,
            r#"<g class="skeleton {class}" stroke="{color}" stroke-opacity="{opacity}" stroke-width="{:.2}" stroke-linecap="round">"#,
            stroke * 2.0
        );
        for &(a, b) in bones {
            if let Some((a, b)) = clip_segment(a, b, w, h) {
                let _ = writeln!(
                    out,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
                    a.x, a.y, b.x, b.y
                );
            }
        }
        if inside(*head, w, h) {
            let _ = writeln!(
                out,
                r#"<circle class="head" cx="{:.2}" cy="{:.2}" r="{:.2}" fill="{color}" fill-opacity="{opacity}"/>"#,
                head.x, head.y, scene.head_radius
            );
        }
        out.push_str("</g>\n");
    }

    if inside(scene.ball, w, h) {
        let _ = writeln!(
            out,
            r#"<circle class="ball" cx="{:.2}" cy="{:.2}" r="{:.2}" fill="{}"/>"#,
            scene.ball.x,
            scene.ball.y,
            scene.ball_radius,
            cfg.ball_color.hex()
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> RenderPoint {
        RenderPoint { x, y }
    }

    #[test]
    fn clipping() {
        assert_eq!(
            clip_segment(pt(10.0, 10.0), pt(20.0, 20.0), 100.0, 100.0),
            Some((pt(10.0, 10.0), pt(20.0, 20.0)))
        );
        assert_eq!(
            clip_segment(pt(-50.0, 50.0), pt(150.0, 50.0), 100.0, 100.0),
            Some((pt(0.0, 50.0), pt(100.0, 50.0)))
        );
        assert_eq!(clip_segment(pt(-5.0, -5.0), pt(-1.0, 50.0), 100.0, 100.0), None);
        assert_eq!(clip_segment(pt(f64::NAN, 0.0), pt(1.0, 1.0), 100.0, 100.0), None);
    }
}
