//! The canonical on-disk sequence format.
//!
//! A `SequenceDocument` is a JSON object holding one ten-frame clip in
//! normalized coordinates at full `f64` precision. Parsing reports every
//! problem with a field path such as `frames[3].joints.left_wrist.x`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{FrameDims, JointId, Keyframe, Label, Point2, Sequence, Skeleton, COORD_LIMIT, FRAME_COUNT};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceDocument {
    pub schema_version: u32,
    pub source_id: String,
    pub label: Label,
    pub dims: DimsRecord,
    pub frames: Vec<FrameRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimsRecord {
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameRecord {
    pub index: usize,
    pub time: f64,
    pub joints: Skeleton,
    pub ball: Point2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub struct SchemaErrors {
    pub issues: Vec<Issue>,
}

impl fmt::Display for SchemaErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.issues.iter().map(Issue::to_string).collect();
        f.write_str(&parts.join("; "))
    }
}

impl SchemaErrors {
    fn single(path: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaErrors {
            issues: vec![Issue {
                path: path.into(),
                message: message.into(),
            }],
        }
    }
}

#[derive(Default)]
struct Collector(Vec<Issue>);

impl Collector {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(Issue {
            path: path.into(),
            message: message.into(),
        });
    }

    fn point(&mut self, path: &str, p: Point2) {
        for (axis, v) in [("x", p.x), ("y", p.y)] {
            if !v.is_finite() {
                self.push(format!("{path}.{axis}"), "must be a finite number");
            } else if v.abs() > COORD_LIMIT {
                self.push(
                    format!("{path}.{axis}"),
                    format!("{v} outside normalized range [-{COORD_LIMIT}, {COORD_LIMIT}]"),
                );
            }
        }
    }
}

impl SequenceDocument {
    pub fn from_sequence(seq: &Sequence) -> SequenceDocument {
        SequenceDocument {
            schema_version: SCHEMA_VERSION,
            source_id: seq.source_id.clone(),
            label: seq.label,
            dims: DimsRecord {
                width: seq.dims.width,
                height: seq.dims.height,
            },
            frames: seq
                .frames()
                .iter()
                .map(|f| FrameRecord {
                    index: f.index,
                    time: f.time,
                    joints: f.skeleton,
                    ball: f.ball,
                    ball_radius: f.ball_radius,
                })
                .collect(),
        }
    }

    /// Structural parse only; see [`parse_sequence`] for full validation.
    pub fn from_json(text: &str) -> Result<SequenceDocument, SchemaErrors> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            SchemaErrors::single(path, e.into_inner().to_string())
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serialization is infallible")
    }

    pub fn validate(&self) -> Result<(), SchemaErrors> {
        let mut c = Collector::default();
        if self.schema_version != SCHEMA_VERSION {
            c.push(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            );
        }
        if self.dims.width == 0 {
            c.push("dims.width", "must be positive");
        }
        if self.dims.height == 0 {
            c.push("dims.height", "must be positive");
        }
        if self.frames.len() != FRAME_COUNT {
            c.push(
                "frames",
                format!("expected {FRAME_COUNT} frames, got {}", self.frames.len()),
            );
        }
        let mut prev_time = f64::NEG_INFINITY;
        for (i, f) in self.frames.iter().enumerate() {
            let base = format!("frames[{i}]");
            if f.index != i {
                c.push(format!("{base}.index"), format!("expected {i}, got {}", f.index));
            }
            if !f.time.is_finite() || f.time < 0.0 {
                c.push(format!("{base}.time"), "must be a non-negative finite number");
            } else if f.time <= prev_time {
                c.push(format!("{base}.time"), "must be strictly increasing");
            }
            prev_time = f.time;
            for (j, p) in f.joints.iter() {
                c.point(&format!("{base}.joints.{j}"), p);
            }
            if f.joints.iter().all(|(_, p)| p.is_finite()) {
                if let Err(e) = f.joints.validate() {
                    c.push(format!("{base}.joints"), e.to_string());
                }
            }
            c.point(&format!("{base}.ball"), f.ball);
            if let Some(r) = f.ball_radius {
                if !r.is_finite() || r < 0.0 {
                    c.push(format!("{base}.ball_radius"), "must be a non-negative finite number");
                }
            }
        }
        if c.0.is_empty() {
            Ok(())
        } else {
            Err(SchemaErrors { issues: c.0 })
        }
    }

    pub fn to_sequence(&self) -> Result<Sequence, SchemaErrors> {
        self.validate()?;
        let frames = self
            .frames
            .iter()
            .map(|f| Keyframe {
                index: f.index,
                time: f.time,
                skeleton: f.joints,
                ball: f.ball,
                ball_radius: f.ball_radius,
            })
            .collect();
        let dims = FrameDims {
            width: self.dims.width,
            height: self.dims.height,
        };
        Sequence::new(frames, dims, self.label, self.source_id.clone())
            .map_err(|e| SchemaErrors::single("", e.to_string()))
    }
}

/// Parses and fully validates a sequence document.
pub fn parse_sequence(text: &str) -> Result<Sequence, SchemaErrors> {
    SequenceDocument::from_json(text)?.to_sequence()
}

pub fn sequence_to_json(seq: &Sequence) -> String {
    SequenceDocument::from_sequence(seq).to_json()
}

/// Joint order used in documents, exposed for schema publication.
pub fn joint_names() -> [&'static str; 13] {
    JointId::ALL.map(JointId::name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::{json, Value};

    fn doc_value() -> Value {
        let joints: serde_json::Map<String, Value> = JointId::ALL
            .iter()
            .enumerate()
            .map(|(k, j)| (j.name().to_string(), json!({"x": -0.3 + 0.05 * k as f64, "y": -0.6 + 0.1 * k as f64})))
            .collect();
        let frames: Vec<Value> = (0..10)
            .map(|i| {
                json!({
                    "index": i,
                    "time": i as f64 * 0.1,
                    "joints": joints,
                    "ball": {"x": 0.1, "y": 0.8 - 0.1 * i as f64},
                })
            })
            .collect();
        json!({
            "schema_version": 1,
            "source_id": "clip-1",
            "label": "hit",
            "dims": {"width": 1280, "height": 720},
            "frames": frames,
        })
    }

    #[test]
    fn parses_valid_document() {
        let seq = parse_sequence(&doc_value().to_string()).unwrap();
        assert_eq!(seq.len(), 10);
        assert_eq!(seq.label, Label::Hit);
        let back = parse_sequence(&sequence_to_json(&seq)).unwrap();
        assert_eq!(back, seq);
    }

    #[test]
    fn structural_errors_carry_paths() {
        let mut v = doc_value();
        v["frames"][3]["joints"]["left_wrist"]["x"] = json!("oops");
        let err = parse_sequence(&v.to_string()).unwrap_err();
        assert_eq!(err.issues[0].path, "frames[3].joints.left_wrist.x");

        let mut v = doc_value();
        v["frames"][2]["joints"].as_object_mut().unwrap().remove("right_knee");
        let err = parse_sequence(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("frames[2].joints"), "{err}");
        assert!(err.to_string().contains("right_knee"), "{err}");

        let mut v = doc_value();
        v["colour"] = json!("red");
        let err = parse_sequence(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
    }

    #[test]
    fn semantic_errors_are_all_listed() {
        let mut v = doc_value();
        v["schema_version"] = json!(7);
        v["dims"]["height"] = json!(0);
        v["frames"][5]["time"] = json!(0.1);
        v["frames"][8]["ball"]["y"] = json!(2.5);
        let err = parse_sequence(&v.to_string()).unwrap_err();
        let paths: Vec<&str> = err.issues.iter().map(|i| i.path.as_str()).collect();
        assert_eq!(
            paths,
            vec!["schema_version", "dims.height", "frames[5].time", "frames[8].ball.y"]
        );
    }

    #[test]
    fn frame_count_checked() {
        let mut v = doc_value();
        v["frames"].as_array_mut().unwrap().pop();
        let err = parse_sequence(&v.to_string()).unwrap_err();
        assert_eq!(err.issues[0].path, "frames");
        assert!(err.issues[0].message.contains("expected 10 frames"));
    }
}
