//! Step-by-step grounding of a plan against a scene for one agent.
//!
//! Every step runs all of its required checks in order, and every step runs
//! even after an earlier one failed. The agent pose only moves when a
//! navigability check succeeds.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checks::navigable::MSG_NO_ZONES;
use crate::checks::{
    check_clearance, check_interactable, check_navigable, check_reachable, check_visible,
    clearance_box, CheckError, CheckOutcome, ClearanceBox, ClearanceOptions, DefaultResolver,
    FullSurfaceProvider, FunctionalPartProvider, ReachTarget, VisibilityConfig, ZoneResolver,
};
use crate::geometry::{face_zones, GeometryError, InteractionZone, PointCloud3};
use crate::navmap::{
    build_navmap, initial_pose, AgentPose, FootprintMode, NavMap, NavMapError, NavMapOptions,
};
use crate::rng::stream_rng;
use crate::scene::{
    AgentProfile, AtomicAction, Locomotion, Plan, Posture, PropertyKind, Scene, SceneError,
};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("plan error: {0}")]
    Plan(SceneError),
    #[error("profile error: {0}")]
    Profile(SceneError),
    #[error("invalid verification config: {0}")]
    Config(String),
    #[error("navigation map: {0}")]
    NavMap(#[from] NavMapError),
    #[error("step {step}: {source}")]
    Check { step: usize, source: CheckError },
    #[error("step {step}: {source}")]
    Geometry { step: usize, source: GeometryError },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerificationConfig {
    pub resolution: usize,
    pub margin: f64,
    pub footprint: FootprintMode,
    pub zone_depth: f64,
    pub zone_flare: f64,
    pub visibility: VisibilityConfig,
    pub strict_clearance: bool,
    pub seed: u64,
}

impl Default for VerificationConfig {
    fn default() -> Self {
        Self {
            resolution: crate::navmap::DEFAULT_RESOLUTION,
            margin: crate::navmap::DEFAULT_MARGIN,
            footprint: FootprintMode::Obb,
            zone_depth: 0.75,
            zone_flare: 1.0,
            visibility: VisibilityConfig::default(),
            strict_clearance: false,
            seed: 0,
        }
    }
}

impl VerificationConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        let mut problems = Vec::new();
        if self.resolution < crate::navmap::MIN_RESOLUTION {
            problems.push(format!(
                "resolution must be >= {}, got {}",
                crate::navmap::MIN_RESOLUTION,
                self.resolution
            ));
        }
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            problems.push(format!("margin must be >= 0, got {}", self.margin));
        }
        if !(self.zone_depth > 0.0 && self.zone_depth.is_finite()) {
            problems.push(format!(
                "zone_depth must be positive, got {}",
                self.zone_depth
            ));
        }
        if !(self.zone_flare >= 1.0 && self.zone_flare.is_finite()) {
            problems.push(format!("zone_flare must be >= 1, got {}", self.zone_flare));
        }
        if let Err(e) = self.visibility.validate() {
            problems.push(e.to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(EngineError::Config(problems.join("; ")))
        }
    }

    pub fn navmap_options(&self) -> NavMapOptions {
        NavMapOptions {
            resolution: self.resolution,
            margin: self.margin,
            footprint: self.footprint,
            height_threshold: None,
        }
    }
}

/// Pluggable zone selection and functional-part lookup.
#[derive(Clone, Copy)]
pub struct Backends<'a> {
    pub resolver: &'a dyn ZoneResolver,
    pub provider: &'a dyn FunctionalPartProvider,
}

impl Default for Backends<'static> {
    fn default() -> Self {
        Self {
            resolver: &DefaultResolver,
            provider: &FullSurfaceProvider,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub action: AtomicAction,
    pub object_id: String,
    pub success: bool,
    pub checks: Vec<CheckOutcome>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub scene_id: String,
    pub agent: String,
    pub task: String,
    pub seed: u64,
    pub overall_success: bool,
    pub insight: String,
    pub steps: Vec<StepResult>,
}

impl DiagnosticReport {
    /// Whether the success flags are the conjunctions of their parts.
    pub fn is_consistent(&self) -> bool {
        let steps_ok = self.steps.iter().all(|s| {
            s.success == s.checks.iter().all(|c| c.status)
                && s.checks.iter().map(|c| c.property).eq(s
                    .action
                    .required_properties()
                    .iter()
                    .copied())
        });
        steps_ok && self.overall_success == self.steps.iter().all(|s| s.success)
    }
}

/// Geometry produced while grounding one step, for debugging output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepTrace {
    pub pose_before: AgentPose,
    pub pose_after: AgentPose,
    pub zones: Vec<InteractionZone>,
    pub clearance_boxes: Vec<ClearanceBox>,
}

/// A finished run: the report plus the map and per-step geometry.
#[derive(Clone, Debug)]
pub struct GroundingRun {
    pub report: DiagnosticReport,
    pub map: NavMap,
    pub initial_pose: AgentPose,
    pub trace: Vec<StepTrace>,
}

pub fn ground_plan(
    plan: &Plan,
    scene: &Scene,
    profile: &AgentProfile,
    cfg: &VerificationConfig,
) -> Result<DiagnosticReport, EngineError> {
    ground_plan_with(plan, scene, profile, cfg, Backends::default())
}

pub fn ground_plan_with(
    plan: &Plan,
    scene: &Scene,
    profile: &AgentProfile,
    cfg: &VerificationConfig,
    backends: Backends<'_>,
) -> Result<DiagnosticReport, EngineError> {
    run_grounding(plan, scene, profile, cfg, backends).map(|r| r.report)
}

/// Validates inputs, builds the navigation map and grounds every step.
pub fn run_grounding(
    plan: &Plan,
    scene: &Scene,
    profile: &AgentProfile,
    cfg: &VerificationConfig,
    backends: Backends<'_>,
) -> Result<GroundingRun, EngineError> {
    cfg.validate()?;
    profile.validate().map_err(EngineError::Profile)?;
    plan.check_against(scene).map_err(EngineError::Plan)?;
    let map = build_navmap(scene, profile, &cfg.navmap_options())?;
    let (report, start, trace) = ground_on_map(plan, scene, profile, &map, cfg, backends)?;
    Ok(GroundingRun {
        report,
        map,
        initial_pose: start,
        trace,
    })
}

/// Grounds a plan on a prebuilt map, which must belong to `profile`.
pub fn ground_on_map(
    plan: &Plan,
    scene: &Scene,
    profile: &AgentProfile,
    map: &NavMap,
    cfg: &VerificationConfig,
    backends: Backends<'_>,
) -> Result<(DiagnosticReport, AgentPose, Vec<StepTrace>), EngineError> {
    plan.check_against(scene).map_err(EngineError::Plan)?;
    let start = initial_pose(map, cfg.seed)?;
    let mut pose = start;
    let mut region_points: HashMap<u32, PointCloud3> = HashMap::new();
    let mut steps = Vec::with_capacity(plan.steps.len());
    let mut trace = Vec::with_capacity(plan.steps.len());

    for (i, step) in plan.steps.iter().enumerate() {
        let t = i + 1;
        let object = scene
            .object(&step.object_id)
            .expect("plan checked against scene");
        let mut rng = stream_rng(cfg.seed, t as u64);
        let pose_before = pose;
        let mut zones = Vec::new();
        let mut boxes = Vec::new();
        let mut checks = Vec::new();

        for &property in step.action.required_properties() {
            let outcome = match property {
                PropertyKind::Navigable => {
                    let all = face_zones(&object.obb, cfg.zone_depth, cfg.zone_flare)
                        .map_err(|source| EngineError::Geometry { step: t, source })?;
                    match backends.resolver.resolve(object, step.action, &all, map) {
                        Ok(z) => zones = z,
                        Err(e) => {
                            zones.clear();
                            checks.push(resolver_failure(&e));
                            continue;
                        }
                    }
                    let (outcome, next) = check_navigable(map, &pose, &zones, &mut rng)
                        .map_err(|source| EngineError::Check { step: t, source })?;
                    pose = next;
                    outcome
                }
                PropertyKind::Reachable | PropertyKind::Interactable => {
                    let region = map.region_at(&pose.position).unwrap_or(0);
                    let floor = match region_points.entry(region) {
                        Entry::Occupied(e) => &*e.into_mut(),
                        Entry::Vacant(e) => &*e.insert(map.walkable_points_3d(region)?),
                    };
                    let res = if property == PropertyKind::Reachable {
                        check_reachable(
                            floor,
                            ReachTarget::Mesh(&object.mesh),
                            profile,
                            pose.posture,
                        )
                    } else {
                        check_interactable(
                            object,
                            step.action,
                            backends.provider,
                            floor,
                            profile,
                            pose.posture,
                        )
                    };
                    res.map_err(|source| EngineError::Check { step: t, source })?
                }
                PropertyKind::Clearance => {
                    boxes = zones
                        .iter()
                        .map(|z| clearance_box(&object.obb, z.face))
                        .collect();
                    let options = ClearanceOptions {
                        strict_floor: cfg.strict_clearance,
                    };
                    check_clearance(object, &zones, scene, options)
                }
                PropertyKind::Visible => {
                    check_visible(&pose, profile, object, scene, &cfg.visibility)
                        .map_err(|source| EngineError::Check { step: t, source })?
                }
            };
            checks.push(outcome);
        }

        let success = checks.iter().all(|c| c.status);
        pose.posture = next_posture(profile, step.action, pose.posture, success);
        trace.push(StepTrace {
            pose_before,
            pose_after: pose,
            zones,
            clearance_boxes: boxes,
        });
        steps.push(StepResult {
            action: step.action,
            object_id: step.object_id.clone(),
            success,
            checks,
        });
    }

    let overall_success = steps.iter().all(|s| s.success);
    let mut report = DiagnosticReport {
        scene_id: scene.id.clone(),
        agent: profile.name.clone(),
        task: plan.task.clone(),
        seed: cfg.seed,
        overall_success,
        insight: String::new(),
        steps,
    };
    report.insight = summarize(&report);
    Ok((report, start, trace))
}

fn resolver_failure(e: &str) -> CheckOutcome {
    let mut m = crate::checks::Metrics::new();
    m.insert("zone_count".into(), serde_json::json!(0));
    let msg = if e.is_empty() {
        MSG_NO_ZONES.to_string()
    } else {
        format!("Zone resolver failed: {e}")
    };
    CheckOutcome::new(PropertyKind::Navigable, false, msg, m)
}

/// Posture after a step: sitting or lying down seats the agent; walking
/// agents stand up again when they move.
fn next_posture(
    profile: &AgentProfile,
    action: AtomicAction,
    current: Posture,
    success: bool,
) -> Posture {
    if profile.locomotion == Locomotion::Wheel {
        return Posture::Seated;
    }
    match action {
        AtomicAction::SitOn | AtomicAction::LieOn if success => Posture::Seated,
        AtomicAction::NavigateTo if success => Posture::Standing,
        _ => current,
    }
}

fn failure_detail(c: &CheckOutcome) -> String {
    let f = |k: &str| c.metric_f64(k);
    match c.property {
        PropertyKind::Navigable => match (
            c.metrics.get("agent_region"),
            c.metrics.get("target_regions"),
        ) {
            (Some(a), Some(t)) => format!("agent area {a}, target areas {t}"),
            _ => c.message.clone(),
        },
        PropertyKind::Reachable | PropertyKind::Interactable => {
            match (f("required_distance_m"), f("reach_m")) {
                (Some(d), Some(r)) => format!("required distance {d:.2}m exceeds {r:.2}m reach"),
                _ => c.message.clone(),
            }
        }
        PropertyKind::Clearance => format!(
            "{} of {} clearance boxes free",
            c.metrics
                .get("zone_count")
                .map_or("0".into(), |v| v.to_string()),
            c.metrics
                .get("zones_tested")
                .map_or("0".into(), |v| v.to_string())
        ),
        PropertyKind::Visible => match (f("visibility_ratio"), f("threshold")) {
            (Some(v), Some(t)) => {
                format!("{:.1}% clear, needs more than {:.1}%", v * 100.0, t * 100.0)
            }
            _ => c.message.clone(),
        },
    }
}

/// One-paragraph account of the report.
pub fn summarize(report: &DiagnosticReport) -> String {
    let failed: Vec<(usize, &StepResult)> = report
        .steps
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.success)
        .collect();
    let Some(&(i, step)) = failed.first() else {
        return format!("Plan is fully executable for agent {}.", report.agent);
    };
    let mut failing = step.checks.iter().filter(|c| !c.status);
    let first = failing.next().expect("failed step has a failed check");
    let mut out = format!(
        "Plan fails for agent {} at step {} ({} {}): {} check failed ({}).",
        report.agent,
        i + 1,
        step.action,
        step.object_id,
        first.property,
        failure_detail(first)
    );
    let others: Vec<String> = failing
        .map(|c| format!("{} ({})", c.property, failure_detail(c)))
        .collect();
    if !others.is_empty() {
        out.push_str(&format!(
            " Also failing at this step: {}.",
            others.join(", ")
        ));
    }
    out.push_str(&format!(
        " {} of {} steps failed.",
        failed.len(),
        report.steps.len()
    ));
    out
}
