//! Profile, plan, report, provider and annotation files, plus JSONL records.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{read_json, read_text, to_json_string, write_bytes, IoError};
use crate::checks::{AnnotationResolver, FixtureProvider};
use crate::engine::DiagnosticReport;
use crate::geometry::{Face, Vec3};
use crate::scene::{builtin_profile, AgentProfile, AtomicAction, Plan, BUILTIN_PROFILES};

/// A built-in profile name, or a path to a profile JSON file.
pub fn load_profile(name_or_path: &str) -> Result<AgentProfile, IoError> {
    if BUILTIN_PROFILES.contains(&name_or_path) {
        return Ok(builtin_profile(name_or_path).expect("listed built-in"));
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        return Err(IoError::invalid(
            path,
            vec![format!(
                "not a built-in profile ({}) and no such file",
                BUILTIN_PROFILES.join(", ")
            )],
        ));
    }
    let profile: AgentProfile = read_json(path)?;
    profile
        .validate()
        .map_err(|e| IoError::invalid(path, vec![e.to_string()]))?;
    Ok(profile)
}

pub fn load_plan(path: &Path) -> Result<Plan, IoError> {
    read_json(path)
}

pub fn load_report(path: &Path) -> Result<DiagnosticReport, IoError> {
    read_json(path)
}

pub fn write_report(path: &Path, report: &DiagnosticReport) -> Result<(), IoError> {
    write_json(path, report)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    write_bytes(path, to_json_string(value).as_bytes())
}

/// One JSON value per non-blank line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, IoError> {
    read_text(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| IoError::parse(path, Some(i + 1), e.to_string()))
        })
        .collect()
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), IoError> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("serializable record"));
        out.push('\n');
    }
    write_bytes(path, out.as_bytes())
}

/// `{"object_id": {"action": [[x, y, z], ...]}}`.
pub fn load_fixture_parts(path: &Path) -> Result<FixtureProvider, IoError> {
    let raw: BTreeMap<String, BTreeMap<AtomicAction, Vec<[f64; 3]>>> = read_json(path)?;
    let mut provider = FixtureProvider::default();
    for (object_id, actions) in raw {
        for (action, points) in actions {
            provider.insert(
                object_id.clone(),
                action,
                points.into_iter().map(Vec3::from).collect(),
            );
        }
    }
    Ok(provider)
}

/// `{"category": {"action": ["front", ...]}}`.
pub fn load_annotations(path: &Path) -> Result<AnnotationResolver, IoError> {
    let raw: BTreeMap<String, BTreeMap<AtomicAction, Vec<Face>>> = read_json(path)?;
    let mut resolver = AnnotationResolver::default();
    for (category, actions) in raw {
        for (action, faces) in actions {
            resolver.insert(category.clone(), action, faces);
        }
    }
    Ok(resolver)
}
