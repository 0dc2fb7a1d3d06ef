use std::borrow::Cow;

use super::{FrameScene, Layer, RenderConfig, RenderPoint};
use crate::error::{Error, Result};

const BG: u8 = 0;
const POST: u8 = 1;
const DIM: u8 = 2;
const SOLID: u8 = 3;
const BALL: u8 = 4;

struct Canvas {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl Canvas {
    fn new(width: usize, height: usize) -> Self {
        Canvas {
            width,
            height,
            pixels: vec![BG; width * height],
        }
    }

    fn disc(&mut self, cx: f64, cy: f64, r: f64, color: u8) {
        if !(cx.is_finite() && cy.is_finite()) {
            return;
        }
        let r = r.max(0.5);
        let x0 = (cx - r).floor().max(0.0) as usize;
        let y0 = (cy - r).floor().max(0.0) as usize;
        let x1 = ((cx + r).ceil().max(0.0) as usize).min(self.width.saturating_sub(1));
        let y1 = ((cy + r).ceil().max(0.0) as usize).min(self.height.saturating_sub(1));
        for y in y0..=y1 {
            for x in x0..=x1 {
                let dx = x as f64 + 0.5 - cx;
                let dy = y as f64 + 0.5 - cy;
                if dx * dx + dy * dy <= r * r {
                    self.pixels[y * self.width + x] = color;
                }
            }
        }
    }

    fn line(&mut self, a: RenderPoint, b: RenderPoint, r: f64, color: u8) {
        let len = (b.x - a.x).hypot(b.y - a.y);
        if !len.is_finite() {
            return;
        }
        let steps = (len / r.max(0.5)).ceil().max(1.0) as usize;
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            self.disc(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), r, color);
        }
    }
}

fn palette(cfg: &RenderConfig) -> Vec<u8> {
    let mut p = Vec::with_capacity(8 * 3);
    p.extend_from_slice(&[0x1e, 0x56, 0x31]);
    p.extend_from_slice(&[0xf2, 0xf2, 0xf2]);
    p.extend_from_slice(&[0x6f, 0x86, 0x78]);
    p.extend_from_slice(&[0xff, 0xd1, 0x66]);
    p.extend_from_slice(&cfg.ball_color.0);
    p.resize(8 * 3, 0);
    p
}

pub(crate) fn animated_gif(scenes: &[FrameScene], cfg: &RenderConfig) -> Result<Vec<u8>> {
    let s = cfg.raster_scale;
    let width = ((cfg.window_width as f64 * s).round() as usize).clamp(1, u16::MAX as usize);
    let height = ((cfg.window_height as f64 * s).round() as usize).clamp(1, u16::MAX as usize);
    let scale = |p: RenderPoint| RenderPoint { x: p.x * s, y: p.y * s };
    let stroke = (height as f64 / 240.0).max(1.0);

    let mut out = Vec::new();
    {
        let gif_err = |e: gif::EncodingError| Error::Io(e.to_string());
        let mut enc = gif::Encoder::new(&mut out, width as u16, height as u16, &palette(cfg)).map_err(gif_err)?;
        enc.set_repeat(gif::Repeat::Infinite).map_err(gif_err)?;
        for scene in scenes {
            let mut canvas = Canvas::new(width, height);
            let gp = scene.goalpost;
            let corners = [
                RenderPoint { x: gp.left, y: gp.bottom },
                RenderPoint { x: gp.left, y: gp.top },
                RenderPoint { x: gp.right, y: gp.top },
                RenderPoint { x: gp.right, y: gp.bottom },
            ];
            for w in corners.windows(2) {
                canvas.line(scale(w[0]), scale(w[1]), stroke / 2.0, POST);
            }
            for (layer, bones, head) in &scene.skeletons {
                let color = match layer {
                    Layer::Original if scene.skeletons.len() > 1 => DIM,
                    _ => SOLID,
                };
                for &(a, b) in bones {
                    canvas.line(scale(a), scale(b), stroke, color);
                }
                let h = scale(*head);
                canvas.disc(h.x, h.y, scene.head_radius * s, color);
            }
            let b = scale(scene.ball);
            canvas.disc(b.x, b.y, scene.ball_radius * s, BALL);

            let frame = gif::Frame {
                width: width as u16,
                height: height as u16,
                delay: (cfg.frame_interval_ms / 10).min(u16::MAX as u32) as u16,
                buffer: Cow::Owned(canvas.pixels),
                ..Default::default()
            };
            enc.write_frame(&frame).map_err(gif_err)?;
        }
    }
    Ok(out)
}
