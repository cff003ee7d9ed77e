//! Extraction of `_3D` shape descriptions into per-frame scene records.

use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use crate::engine::{Field, ObjectStore, Observer, ObserverError};
use crate::values::Value;

/// Name of the variable holding an object's shapes.
pub const SHAPE_FIELD: &str = "_3D";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShapeKind {
    Sphere,
    Cylinder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ShapeSize {
    Radius(f64),
    /// Radius and length.
    RadiusLength([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeRecord {
    pub kind: ShapeKind,
    pub center: [f64; 3],
    pub size: ShapeSize,
    pub color: [f64; 3],
    pub orientation: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SceneFrame {
    pub time: f64,
    pub shapes: Vec<ShapeRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("`_3D` must be a vector, found {0}")]
    NotAVector(&'static str),
    #[error("unknown shape kind {0:?}")]
    UnknownKind(String),
    #[error("malformed {kind} shape: {reason}")]
    Malformed { kind: String, reason: String },
    #[error("{object}: {source}")]
    In { object: String, source: Box<SceneError> },
    #[error("writing {}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

fn malformed(kind: &str, reason: impl Into<String>) -> SceneError {
    SceneError::Malformed { kind: kind.to_string(), reason: reason.into() }
}

fn triple(kind: &str, what: &str, v: &Value) -> Result<[f64; 3], SceneError> {
    match v.as_reals().as_deref() {
        Some(&[a, b, c]) if !matches!(v, Value::Real(_)) => Ok([a, b, c]),
        _ => Err(malformed(kind, format!("{what} must be a vector of 3 reals, found {v}"))),
    }
}

fn shape(items: &[Value]) -> Result<ShapeRecord, SceneError> {
    let kind_name = match items.first() {
        Some(Value::Str(s)) => s.as_str(),
        Some(other) => return Err(malformed("?", format!("kind must be a string, found {other}"))),
        None => return Err(malformed("?", "empty shape")),
    };
    let kind = match kind_name {
        "Sphere" => ShapeKind::Sphere,
        "Cylinder" => ShapeKind::Cylinder,
        other => return Err(SceneError::UnknownKind(other.to_string())),
    };
    if items.len() != 5 {
        return Err(malformed(kind_name, format!("expected 5 fields, found {}", items.len())));
    }
    let center = triple(kind_name, "center", &items[1])?;
    // Sizes are lengths; a bar showing a negative value is drawn at full length.
    let size = match (kind, &items[2]) {
        (ShapeKind::Sphere, Value::Real(r)) => ShapeSize::Radius(r.abs()),
        (ShapeKind::Cylinder, v) => match v.as_reals().as_deref() {
            Some(&[r, l]) if !matches!(v, Value::Real(_)) => ShapeSize::RadiusLength([r.abs(), l.abs()]),
            _ => return Err(malformed(kind_name, format!("size must be [radius, length], found {v}"))),
        },
        (ShapeKind::Sphere, v) => return Err(malformed(kind_name, format!("radius must be a real, found {v}"))),
    };
    let color = triple(kind_name, "color", &items[3])?;
    let orientation = triple(kind_name, "orientation", &items[4])?;
    Ok(ShapeRecord { kind, center, size, color, orientation })
}

/// Interprets a `_3D` value. A vector starting with a string is one shape;
/// any other vector is a list of shapes.
pub fn normalize_3d(value: &Value) -> Result<Vec<ShapeRecord>, SceneError> {
    match value {
        Value::Vec(items) if matches!(items.first(), Some(Value::Str(_))) => Ok(vec![shape(items)?]),
        Value::Vec(items) => items
            .iter()
            .map(|item| match item {
                Value::Vec(fields) => shape(fields),
                other => Err(malformed("?", format!("shape must be a vector, found {other}"))),
            })
            .collect(),
        // an all-real matrix can never hold a kind string
        Value::Mat(_) => Err(malformed("?", "shape list holds no kind strings")),
        other => Err(SceneError::NotAVector(other.kind_name())),
    }
}

/// Shapes of every live object with a `_3D` field, depth-first in creation order.
pub fn scene_frame(time: f64, store: &ObjectStore) -> Result<SceneFrame, SceneError> {
    let key = Field::new(SHAPE_FIELD, 0);
    let mut shapes = Vec::new();
    for id in store.traverse() {
        let Ok(obj) = store.get(id) else { continue };
        if let Some(v) = obj.fields.get(&key) {
            let found =
                normalize_3d(v).map_err(|e| SceneError::In { object: store.describe(id), source: Box::new(e) })?;
            shapes.extend(found);
        }
    }
    Ok(SceneFrame { time, shapes })
}

/// Writes frames as JSON Lines. `path` names the sink in error messages.
pub fn emit_scene<'a, W: Write>(
    frames: impl IntoIterator<Item = &'a SceneFrame>,
    mut sink: W,
    path: &std::path::Path,
) -> Result<(), SceneError> {
    let io = |source| SceneError::Io { path: path.to_path_buf(), source };
    for frame in frames {
        serde_json::to_writer(&mut sink, frame).map_err(|e| io(e.into()))?;
        sink.write_all(b"\n").map_err(io)?;
    }
    sink.flush().map_err(io)
}

/// Streams scene frames to a JSON Lines sink.
pub struct SceneWriter<W: Write> {
    out: W,
    path: PathBuf,
}

impl<W: Write> SceneWriter<W> {
    pub fn new(out: W, path: impl Into<PathBuf>) -> Self {
        SceneWriter { out, path: path.into() }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> Observer for SceneWriter<W> {
    fn observe(&mut self, time: f64, store: &ObjectStore) -> Result<(), ObserverError> {
        let frame = scene_frame(time, store)?;
        emit_scene([&frame], &mut self.out, &self.path)?;
        Ok(())
    }

    fn finish(&mut self) -> Result<(), ObserverError> {
        self.out.flush().map_err(|source| SceneError::Io { path: self.path.clone(), source })?;
        Ok(())
    }
}

/// Keeps scene frames in memory.
#[derive(Debug, Default)]
pub struct SceneRecorder {
    pub frames: Vec<SceneFrame>,
}

impl Observer for SceneRecorder {
    fn observe(&mut self, time: f64, store: &ObjectStore) -> Result<(), ObserverError> {
        self.frames.push(scene_frame(time, store)?);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::eval_const;
    use crate::syntax::parse_expression;

    fn value(src: &str) -> Value {
        eval_const(&parse_expression(src).unwrap()).unwrap()
    }

    #[test]
    fn single_sphere() {
        let shapes = normalize_3d(&value(r#"["Sphere",[0,0,1],0.5,[1,0,0],[1,1,1]]"#)).unwrap();
        assert_eq!(
            shapes,
            vec![ShapeRecord {
                kind: ShapeKind::Sphere,
                center: [0.0, 0.0, 1.0],
                size: ShapeSize::Radius(0.5),
                color: [1.0, 0.0, 0.0],
                orientation: [1.0, 1.0, 1.0],
            }]
        );
    }

    #[test]
    fn shape_list() {
        let shapes = normalize_3d(&value(
            r#"[["Sphere",[0,0,0],1,[1,1,1],[0,0,0]],["Cylinder",[1,2,3],[0.1,2],[0,0,1],[0,0,0]]]"#,
        ))
        .unwrap();
        assert_eq!(shapes.len(), 2);
        assert_eq!(shapes[1].kind, ShapeKind::Cylinder);
        assert_eq!(shapes[1].size, ShapeSize::RadiusLength([0.1, 2.0]));
        assert!(normalize_3d(&value("[]")).unwrap().is_empty());
    }

    #[test]
    fn display_bar_cylinder() {
        let v = 3.0;
        let src = format!(r#"["Cylinder", [0,0,0]+[0,0.2,{v}/2], [0.02,{v}], [1,1,1], [-1.5708,0,0]]"#);
        let shapes = normalize_3d(&value(&src)).unwrap();
        assert_eq!(shapes[0].center, [0.0, 0.2, 1.5]);
        assert_eq!(shapes[0].size, ShapeSize::RadiusLength([0.02, 3.0]));
    }

    #[test]
    fn rejects_bad_shapes() {
        for src in [
            r#"["Cube",[0,0,0],1,[1,1,1],[0,0,0]]"#,
            r#"["Sphere",[0,0],1,[1,1,1],[0,0,0]]"#,
            r#"["Sphere",[0,0,0],[1,2],[1,1,1],[0,0,0]]"#,
            r#"["Cylinder",[0,0,0],1,[1,1,1],[0,0,0]]"#,
            r#"["Sphere",[0,0,0],1,[1,1,1]]"#,
            "[1,2,3]",
            "3",
        ] {
            assert!(normalize_3d(&value(src)).is_err(), "{src}");
        }
        assert!(matches!(
            normalize_3d(&value(r#"["Cube",[0,0,0],1,[1,1,1],[0,0,0]]"#)),
            Err(SceneError::UnknownKind(k)) if k == "Cube"
        ));
    }

    #[test]
    fn json_keys() {
        let frame = SceneFrame {
            time: 0.5,
            shapes: normalize_3d(&value(r#"["Sphere",[0,0,1],0.5,[1,0,0],[1,1,1]]"#)).unwrap(),
        };
        let mut out = Vec::new();
        emit_scene([&frame], &mut out, std::path::Path::new("mem")).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "{\"time\":0.5,\"shapes\":[{\"kind\":\"Sphere\",\"center\":[0.0,0.0,1.0],\"size\":0.5,\
             \"color\":[1.0,0.0,0.0],\"orientation\":[1.0,1.0,1.0]}]}\n"
        );
    }
}
