//! Dataset layout: one directory per case holding `description.txt` and
//! one or more `gold*.bpmn` reference models.

use std::fs;
use std::path::Path;

use super::BenchError;
use crate::bpmn_model::{parse_bpmn, ProcessGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct GoldModel {
    /// File name, e.g. `gold_a.bpmn`.
    pub name: String,
    pub graph: ProcessGraph,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub case_id: String,
    pub description: String,
    pub gold_models: Vec<GoldModel>,
}

/// Load every case directory under `root`, sorted by case id. Gold files
/// are sorted by name.
pub fn load_dataset(root: &Path) -> Result<Vec<Case>, BenchError> {
    let mut dirs = Vec::new();
    for entry in fs::read_dir(root).map_err(|e| BenchError::io(root, e))? {
        let entry = entry.map_err(|e| BenchError::io(root, e))?;
        if entry.path().is_dir() {
            dirs.push(entry.path());
        }
    }
    dirs.sort();
    if dirs.is_empty() {
        return Err(BenchError::Data(format!(
            "{}: dataset contains no case directories",
            root.display()
        )));
    }
    dirs.iter().map(|dir| load_case(dir)).collect()
}

fn load_case(dir: &Path) -> Result<Case, BenchError> {
    let case_id = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let description_path = dir.join("description.txt");
    if !description_path.is_file() {
        return Err(BenchError::MissingDescription(case_id));
    }
    let description =
        fs::read_to_string(&description_path).map_err(|e| BenchError::io(&description_path, e))?;

    let mut gold_files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| BenchError::io(dir, e))? {
        let path = entry.map_err(|e| BenchError::io(dir, e))?.path();
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        if path.is_file() && name.starts_with("gold") && name.ends_with(".bpmn") {
            gold_files.push((name, path));
        }
    }
    gold_files.sort();
    if gold_files.is_empty() {
        return Err(BenchError::NoGoldModel(case_id));
    }
    let gold_models = gold_files
        .into_iter()
        .map(|(name, path)| {
            let xml = fs::read_to_string(&path).map_err(|e| BenchError::io(&path, e))?;
            let graph = parse_bpmn(&xml).map_err(|source| BenchError::GoldParseError {
                file: path.display().to_string(),
                source,
            })?;
            Ok(GoldModel { name, graph })
        })
        .collect::<Result<_, BenchError>>()?;
    Ok(Case {
        case_id,
        description: description.trim_end().to_string(),
        gold_models,
    })
}
