//! Versioned JSON form of a trained model, for caching between runs.

use std::path::Path;

use optg_core::classify::TrainedModel;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{read_to_string, write_atomic};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    model: TrainedModel,
}

pub fn model_to_json(model: &TrainedModel) -> String {
    serde_json::to_string(&ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        model: model.clone(),
    })
    .expect("models contain only finite numbers")
}

pub fn model_from_json(text: &str) -> std::result::Result<TrainedModel, String> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(format!(
            "model format {} is not supported (expected {MODEL_FORMAT_VERSION})",
            file.format_version
        ));
    }
    Ok(file.model)
}

pub fn save_model(path: &Path, model: &TrainedModel) -> Result<()> {
    write_atomic(path, model_to_json(model).as_bytes())
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    model_from_json(&read_to_string(path)?).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}
