//! Batch verification over (scene, plan, agent) triplets.
//!
//! Jobs run on a dedicated rayon pool; each worker owns its map and trace.
//! Results come back in job order and are folded into the summary on the
//! calling thread.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checks::{AnnotationResolver, DefaultResolver, FixtureProvider, FullSurfaceProvider};
use crate::engine::{ground_plan_with, Backends, DiagnosticReport, VerificationConfig};
use crate::fixtures::AuditCase;
use crate::io::{
    load_annotations, load_fixture_parts, load_plan, load_profile, load_scene, IoError,
};
use crate::scene::{AgentProfile, Plan, PropertyKind, Scene};

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Io(#[from] IoError),
}

#[derive(Clone, Debug)]
pub struct AuditJob {
    pub name: String,
    pub scene: Arc<Scene>,
    pub plan: Plan,
    pub profile: AgentProfile,
    pub seed: Option<u64>,
    pub parts: Option<Arc<FixtureProvider>>,
    pub annotations: Option<Arc<AnnotationResolver>>,
}

impl AuditJob {
    /// One job per profile for an in-memory case.
    pub fn from_case(case: &AuditCase, profile: &AgentProfile) -> Self {
        Self {
            name: format!("{}/{}", case.scene.id, profile.name),
            scene: case.scene.clone(),
            plan: case.plan.clone(),
            profile: profile.clone(),
            seed: None,
            parts: case.parts.clone(),
            annotations: case.annotations.clone(),
        }
    }

    pub fn run(&self, cfg: &VerificationConfig) -> JobOutcome {
        let mut cfg = cfg.clone();
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        let backends = Backends {
            resolver: match &self.annotations {
                Some(a) => a.as_ref(),
                None => &DefaultResolver,
            },
            provider: match &self.parts {
                Some(p) => p.as_ref(),
                None => &FullSurfaceProvider,
            },
        };
        let result = ground_plan_with(&self.plan, &self.scene, &self.profile, &cfg, backends);
        JobOutcome {
            name: self.name.clone(),
            scene_id: self.scene.id.clone(),
            agent: self.profile.name.clone(),
            error: result.as_ref().err().map(|e| e.to_string()),
            report: result.ok(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobOutcome {
    pub name: String,
    pub scene_id: String,
    pub agent: String,
    pub report: Option<DiagnosticReport>,
    pub error: Option<String>,
}

/// Runs every job on a pool of `workers` threads, returning outcomes in job
/// order.
pub fn run_jobs(
    jobs: &[AuditJob],
    cfg: &VerificationConfig,
    workers: usize,
) -> Result<Vec<JobOutcome>, AuditError> {
    if workers == 0 {
        return Err(AuditError::NoWorkers);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()?;
    Ok(pool.install(|| jobs.par_iter().map(|j| j.run(cfg)).collect()))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PassRate {
    pub passed: usize,
    pub evaluated: usize,
    /// `None` when the property was never evaluated.
    pub rate: Option<f64>,
}

impl PassRate {
    fn record(&mut self, pass: bool) {
        self.evaluated += 1;
        self.passed += pass as usize;
        self.rate = Some(self.passed as f64 / self.evaluated as f64);
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub tasks: usize,
    pub errors: usize,
    pub task_success: PassRate,
    pub properties: BTreeMap<PropertyKind, PassRate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobLine {
    pub name: String,
    pub scene_id: String,
    pub agent: String,
    pub overall_success: Option<bool>,
    pub insight: Option<String>,
    pub error: Option<String>,
}

/// Task success and per-property pass rates for each agent, plus one line
/// per job.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub jobs: usize,
    pub profiles: BTreeMap<String, ProfileSummary>,
    pub results: Vec<JobLine>,
}

impl AuditSummary {
    pub fn error_count(&self) -> usize {
        self.results.iter().filter(|r| r.error.is_some()).count()
    }

    /// Fixed-width table: one row per agent, task success then one column
    /// per property.
    pub fn table(&self) -> String {
        let fmt = |r: &PassRate| match r.rate {
            Some(v) => format!("{:>6.1}%", v * 100.0),
            None => format!("{:>7}", "-"),
        };
        let mut out = format!("{:<12}{:>8}", "agent", "task");
        for p in PropertyKind::ALL {
            out.push_str(&format!("{:>14}", p.as_str()));
        }
        out.push('\n');
        for (agent, s) in &self.profiles {
            out.push_str(&format!("{:<12}{:>8}", agent, fmt(&s.task_success)));
            for p in PropertyKind::ALL {
                let r = s.properties.get(&p).copied().unwrap_or_default();
                out.push_str(&format!("{:>14}", fmt(&r)));
            }
            out.push('\n');
        }
        out
    }
}

pub fn summarize_outcomes(outcomes: &[JobOutcome]) -> AuditSummary {
    let mut profiles: BTreeMap<String, ProfileSummary> = BTreeMap::new();
    let mut results = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        let s = profiles.entry(o.agent.clone()).or_default();
        s.tasks += 1;
        match &o.report {
            Some(r) => {
                s.task_success.record(r.overall_success);
                for c in r.steps.iter().flat_map(|st| &st.checks) {
                    s.properties.entry(c.property).or_default().record(c.status);
                }
            }
            None => s.errors += 1,
        }
        results.push(JobLine {
            name: o.name.clone(),
            scene_id: o.scene_id.clone(),
            agent: o.agent.clone(),
            overall_success: o.report.as_ref().map(|r| r.overall_success),
            insight: o.report.as_ref().map(|r| r.insight.clone()),
            error: o.error.clone(),
        });
    }
    AuditSummary {
        jobs: outcomes.len(),
        profiles,
        results,
    }
}

pub fn run_audit(
    jobs: &[AuditJob],
    cfg: &VerificationConfig,
    workers: usize,
) -> Result<AuditSummary, AuditError> {
    Ok(summarize_outcomes(&run_jobs(jobs, cfg, workers)?))
}

/// One manifest line. Relative paths are resolved against the manifest's
/// directory; `agent` is a built-in profile name or a profile file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    #[serde(default)]
    pub name: Option<String>,
    pub scene: PathBuf,
    pub plan: PathBuf,
    pub agent: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub parts: Option<PathBuf>,
    #[serde(default)]
    pub annotations: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub config: VerificationConfig,
    pub entries: Vec<ManifestEntry>,
}

/// Loads a manifest and every file it names. Files shared by several
/// entries are read once. Problems across all entries are reported together.
pub fn load_manifest(path: &Path) -> Result<(Vec<AuditJob>, VerificationConfig), IoError> {
    let manifest: Manifest = crate::io::read_json(path)?;
    let base = path.parent().unwrap_or(Path::new(""));
    let resolve = |p: &Path| {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    };

    let mut scenes: HashMap<PathBuf, Arc<Scene>> = HashMap::new();
    let mut parts: HashMap<PathBuf, Arc<FixtureProvider>> = HashMap::new();
    let mut annotations: HashMap<PathBuf, Arc<AnnotationResolver>> = HashMap::new();
    let mut jobs = Vec::with_capacity(manifest.entries.len());
    let mut problems = Vec::new();

    for (i, e) in manifest.entries.iter().enumerate() {
        let mut entry = || -> Result<AuditJob, IoError> {
            let scene_path = resolve(&e.scene);
            let scene = match scenes.get(&scene_path) {
                Some(s) => s.clone(),
                None => {
                    let s = Arc::new(load_scene(&scene_path)?.scene);
                    scenes.insert(scene_path, s.clone());
                    s
                }
            };
            let plan = load_plan(&resolve(&e.plan))?;
            let agent_path = resolve(Path::new(&e.agent));
            let profile = if agent_path.exists() {
                load_profile(&agent_path.to_string_lossy())?
            } else {
                load_profile(&e.agent)?
            };
            let p = match &e.parts {
                Some(pp) => {
                    let pp = resolve(pp);
                    match parts.get(&pp) {
                        Some(x) => Some(x.clone()),
                        None => {
                            let x = Arc::new(load_fixture_parts(&pp)?);
                            parts.insert(pp, x.clone());
                            Some(x)
                        }
                    }
                }
                None => None,
            };
            let a = match &e.annotations {
                Some(ap) => {
                    let ap = resolve(ap);
                    match annotations.get(&ap) {
                        Some(x) => Some(x.clone()),
                        None => {
                            let x = Arc::new(load_annotations(&ap)?);
                            annotations.insert(ap, x.clone());
                            Some(x)
                        }
                    }
                }
                None => None,
            };
            Ok(AuditJob {
                name: e
                    .name
                    .clone()
                    .unwrap_or_else(|| format!("{}/{}", scene.id, profile.name)),
                scene,
                plan,
                profile,
                seed: e.seed,
                parts: p,
                annotations: a,
            })
        };
        match entry() {
            Ok(job) => jobs.push(job),
            Err(err) => problems.push(format!("entry {i}: {err}")),
        }
    }
    if !problems.is_empty() {
        return Err(IoError::invalid(path, problems));
    }
    Ok((jobs, manifest.config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{audit_suite, gap_room, plan};
    use crate::io::{scene_to_file, write_json};
    use crate::scene::{builtin_profile, AtomicAction};

    #[test]
    fn worker_count_does_not_change_results() {
        let cases = audit_suite();
        let adult = builtin_profile("adult").unwrap();
        let jobs: Vec<AuditJob> = cases
            .iter()
            .take(6)
            .map(|c| AuditJob::from_case(c, &adult))
            .collect();
        let cfg = VerificationConfig::default();
        let one = run_audit(&jobs, &cfg, 1).unwrap();
        let four = run_audit(&jobs, &cfg, 4).unwrap();
        assert_eq!(one, four);
        assert_eq!(one.jobs, 6);
        assert!(run_audit(&jobs, &cfg, 0).is_err());
    }

    #[test]
    fn summary_counts_checks() {
        let cases = audit_suite();
        let adult = builtin_profile("adult").unwrap();
        // shelf plans: two navigability checks and one reach check each
        let jobs: Vec<AuditJob> = cases
            .iter()
            .filter(|c| c.template == "shelf")
            .map(|c| AuditJob::from_case(c, &adult))
            .collect();
        let s = run_audit(&jobs, &VerificationConfig::default(), 2).unwrap();
        let p = &s.profiles["adult"];
        assert_eq!(p.properties[&PropertyKind::Navigable].evaluated, 10);
        assert_eq!(p.properties[&PropertyKind::Reachable].evaluated, 5);
        assert!(!p.properties.contains_key(&PropertyKind::Visible));
        assert!(s.table().lines().count() == 2);
    }

    #[test]
    fn manifest_resolves_relative_paths_and_collects_errors() {
        let dir = tempfile::tempdir().unwrap();
        write_json(
            &dir.path().join("scene.json"),
            &scene_to_file(&gap_room(0.55)),
        )
        .unwrap();
        write_json(
            &dir.path().join("plan.json"),
            &plan("adult", "go", &[(AtomicAction::NavigateTo, "cabinet")]),
        )
        .unwrap();
        let m = dir.path().join("manifest.json");
        std::fs::write(
            &m,
            r#"{"entries": [
                {"scene": "scene.json", "plan": "plan.json", "agent": "adult"},
                {"scene": "scene.json", "plan": "plan.json", "agent": "wheelchair", "seed": 7}
            ]}"#,
        )
        .unwrap();
        let (jobs, cfg) = load_manifest(&m).unwrap();
        assert_eq!(jobs.len(), 2);
        assert!(Arc::ptr_eq(&jobs[0].scene, &jobs[1].scene));
        let s = run_audit(&jobs, &cfg, 2).unwrap();
        assert_eq!(s.results[0].overall_success, Some(true));
        assert_eq!(s.results[1].overall_success, Some(false));

        std::fs::write(
            &m,
            r#"{"entries": [
                {"scene": "missing.json", "plan": "plan.json", "agent": "adult"},
                {"scene": "scene.json", "plan": "plan.json", "agent": "giant"}
            ]}"#,
        )
        .unwrap();
        match load_manifest(&m) {
            Err(IoError::Invalid { problems, .. }) => assert_eq!(problems.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
