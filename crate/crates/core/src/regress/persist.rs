//! Versioned JSON model files.
//!
//! ```json
//! { "format": "weldkit-model", "version": 1, "kind": "robust",
//!   "model": { "linear": { "weights": [...], "scaler": {...}, ... } } }
//! ```
//!
//! Floats are written in shortest round-trip form and parsed with exact
//! rounding, so a loaded model predicts bit-identically to the saved one.

use serde::Serialize;
use serde_json::Value;

use super::{Model, ModelError, ModelKind};

pub const MODEL_FORMAT: &str = "weldkit-model";
pub const MODEL_VERSION: u64 = 1;

#[derive(Serialize)]
struct Envelope<'a> {
    format: &'static str,
    version: u64,
    kind: ModelKind,
    model: &'a Model,
}

pub fn save_model(model: &Model) -> String {
    let env = Envelope {
        format: MODEL_FORMAT,
        version: MODEL_VERSION,
        kind: model.kind(),
        model,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("model serializes");
    s.push('\n');
    s
}

pub fn load_model(text: &str) -> Result<Model, ModelError> {
    let load_err = |m: String| ModelError::Load(m);
    let mut doc: Value = serde_json::from_str(text).map_err(|e| load_err(e.to_string()))?;
    let obj = doc
        .as_object_mut()
        .ok_or_else(|| load_err("top level is not an object".into()))?;

    if obj.get("format").and_then(Value::as_str) != Some(MODEL_FORMAT) {
        return Err(load_err(format!("not a {MODEL_FORMAT} document")));
    }
    let version = obj
        .get("version")
        .and_then(Value::as_u64)
        .ok_or_else(|| load_err("missing version".into()))?;
    if version != MODEL_VERSION {
        return Err(ModelError::VersionMismatch {
            found: version,
            expected: MODEL_VERSION,
        });
    }
    let kind: ModelKind = obj
        .get("kind")
        .cloned()
        .ok_or_else(|| load_err("missing kind".into()))
        .and_then(|k| serde_json::from_value(k).map_err(|e| load_err(e.to_string())))?;
    let body = obj
        .remove("model")
        .ok_or_else(|| load_err("missing model".into()))?;
    let model: Model = serde_json::from_value(body).map_err(|e| load_err(e.to_string()))?;

    if model.kind() != kind {
        return Err(load_err(format!(
            "kind `{kind}` does not match model body `{}`",
            model.kind()
        )));
    }
    match &model {
        Model::Linear(m) => m.validate(),
        Model::Forest(f) => f.validate(),
    }
    .map_err(load_err)?;
    Ok(model)
}
