//! Scene, agent and plan types, the atomic-action taxonomy, and the
//! action-to-property mapping.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::polygon::point_in_triangle;
use crate::geometry::{ground, GeometryError, OrientedBox, TriangleMesh, Vec2};

/// Tolerance used when checking that an object mesh stays inside its box.
pub const MESH_BOX_TOLERANCE: f64 = 0.05;

/// Seated shoulder height of a bipedal agent, as a fraction of standing.
pub const SEATED_SHOULDER_FRACTION: f64 = 0.70;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("invalid agent profile: {0}")]
    InvalidProfile(String),
    #[error("unknown built-in profile `{0}` (expected adult, child or wheelchair)")]
    UnknownProfile(String),
    #[error("duplicate object id `{0}`")]
    DuplicateObjectId(String),
    #[error("scene floor is empty")]
    EmptyFloor,
    #[error("plan step {step} references unknown object `{object_id}`")]
    UnknownObject { step: usize, object_id: String },
    #[error("object `{id}`: {source}")]
    Object { id: String, source: GeometryError },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Locomotion {
    Walk,
    Wheel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Posture {
    Standing,
    Seated,
}

/// Embodiment parameters; all lengths in meters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentProfile {
    pub name: String,
    pub locomotion: Locomotion,
    pub clearance_width: f64,
    pub standing_shoulder_height: f64,
    pub shoulder_to_eye_offset: f64,
    pub eye_to_top_offset: f64,
    pub crouch_factor: f64,
    pub reach_radius: f64,
    /// Static seated reduction of the shoulder height; 1.0 for bipeds.
    pub posture_scale: f64,
}

/// Derived heights above the floor for a given posture.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveHeights {
    pub shoulder: f64,
    pub eye: f64,
    pub crouch: f64,
    pub total: f64,
}

impl AgentProfile {
    pub fn validate(&self) -> Result<(), SceneError> {
        let mut problems = Vec::new();
        let lengths = [
            ("clearance_width", self.clearance_width),
            ("standing_shoulder_height", self.standing_shoulder_height),
            ("shoulder_to_eye_offset", self.shoulder_to_eye_offset),
            ("eye_to_top_offset", self.eye_to_top_offset),
            ("reach_radius", self.reach_radius),
        ];
        for (name, v) in lengths {
            if !(v > 0.0 && v.is_finite()) {
                problems.push(format!("{name} must be a positive length, got {v}"));
            }
        }
        if !(0.0..=1.0).contains(&self.crouch_factor) {
            problems.push(format!(
                "crouch_factor must lie in [0, 1], got {}",
                self.crouch_factor
            ));
        }
        if !(self.posture_scale > 0.0 && self.posture_scale <= 1.0) {
            problems.push(format!(
                "posture_scale must lie in (0, 1], got {}",
                self.posture_scale
            ));
        }
        if self.locomotion == Locomotion::Wheel && self.posture_scale >= 1.0 {
            problems.push("wheeled profiles need a seated posture_scale below 1.0".to_owned());
        }
        if self.name.trim().is_empty() {
            problems.push("name must not be empty".to_owned());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(SceneError::InvalidProfile(problems.join("; ")))
        }
    }

    /// Wheeled agents are always seated; bipeds start standing.
    pub fn default_posture(&self) -> Posture {
        match self.locomotion {
            Locomotion::Wheel => Posture::Seated,
            Locomotion::Walk => Posture::Standing,
        }
    }

    pub fn effective_heights(&self, posture: Posture) -> EffectiveHeights {
        effective_heights(self, posture)
    }

    /// Standing height used to filter overhead obstacles.
    pub fn total_height(&self) -> f64 {
        self.standing_shoulder_height + self.shoulder_to_eye_offset + self.eye_to_top_offset
    }
}

pub fn effective_heights(profile: &AgentProfile, posture: Posture) -> EffectiveHeights {
    let standing = profile.standing_shoulder_height;
    let shoulder = match (profile.locomotion, posture) {
        (Locomotion::Wheel, _) => standing * profile.posture_scale,
        (Locomotion::Walk, Posture::Standing) => standing,
        (Locomotion::Walk, Posture::Seated) => SEATED_SHOULDER_FRACTION * standing,
    };
    EffectiveHeights {
        shoulder,
        eye: shoulder + profile.shoulder_to_eye_offset,
        crouch: profile.crouch_factor * standing,
        total: profile.total_height(),
    }
}

/// The three reference embodiments.
pub fn builtin_profile(name: &str) -> Result<AgentProfile, SceneError> {
    let (loco, clear, shoulder, eye, top, crouch, reach, posture) = match name {
        "adult" => (Locomotion::Walk, 0.40, 1.45, 0.20, 0.10, 0.40, 0.70, 1.0),
        "child" => (Locomotion::Walk, 0.30, 0.85, 0.15, 0.10, 0.50, 0.40, 1.0),
        "wheelchair" => (Locomotion::Wheel, 0.65, 1.45, 0.20, 0.10, 0.10, 0.70, 0.70),
        other => return Err(SceneError::UnknownProfile(other.to_owned())),
    };
    Ok(AgentProfile {
        name: name.to_owned(),
        locomotion: loco,
        clearance_width: clear,
        standing_shoulder_height: shoulder,
        shoulder_to_eye_offset: eye,
        eye_to_top_offset: top,
        crouch_factor: crouch,
        reach_radius: reach,
        posture_scale: posture,
    })
}

pub const BUILTIN_PROFILES: [&str; 3] = ["adult", "child", "wheelchair"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub id: String,
    pub category: String,
    pub obb: OrientedBox,
    pub mesh: TriangleMesh,
}

impl SceneObject {
    /// Builds an object; a box mesh is synthesized when `mesh` is `None`.
    pub fn new(
        id: impl Into<String>,
        category: impl Into<String>,
        obb: OrientedBox,
        mesh: Option<TriangleMesh>,
    ) -> Result<Self, SceneError> {
        let id = id.into();
        obb.validate().map_err(|source| SceneError::Object {
            id: id.clone(),
            source,
        })?;
        let mesh = match mesh {
            Some(m) => {
                m.validate().map_err(|source| SceneError::Object {
                    id: id.clone(),
                    source,
                })?;
                if m.is_empty() {
                    return Err(SceneError::Object {
                        id,
                        source: GeometryError::EmptyInput("object mesh"),
                    });
                }
                m
            }
            None => TriangleMesh::from_box(&obb),
        };
        Ok(Self {
            id,
            category: category.into(),
            obb,
            mesh,
        })
    }

    /// Largest distance by which a mesh vertex leaves the box (0 if inside).
    pub fn mesh_box_excess(&self) -> f64 {
        self.mesh
            .vertices
            .iter()
            .map(|v| {
                let l = self.obb.to_local(v);
                (0..3)
                    .map(|i| (l[i].abs() - self.obb.half_extents[i]).max(0.0))
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    pub fn mesh_within_box(&self, tolerance: f64) -> bool {
        self.mesh_box_excess() <= tolerance
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub id: String,
    pub floor: TriangleMesh,
    pub walls: Vec<TriangleMesh>,
    pub objects: Vec<SceneObject>,
}

impl Scene {
    pub fn new(
        id: impl Into<String>,
        floor: TriangleMesh,
        walls: Vec<TriangleMesh>,
        objects: Vec<SceneObject>,
    ) -> Result<Self, SceneError> {
        let scene = Self {
            id: id.into(),
            floor,
            walls,
            objects,
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        if self.floor.is_empty() {
            return Err(SceneError::EmptyFloor);
        }
        self.floor.validate()?;
        for w in &self.walls {
            w.validate()?;
        }
        let mut seen = HashSet::new();
        for o in &self.objects {
            if !seen.insert(o.id.as_str()) {
                return Err(SceneError::DuplicateObjectId(o.id.clone()));
            }
        }
        Ok(())
    }

    pub fn object(&self, id: &str) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    /// Mean height of the floor vertices.
    pub fn floor_height(&self) -> f64 {
        let n = self.floor.vertices.len().max(1) as f64;
        self.floor.vertices.iter().map(|v| v.y).sum::<f64>() / n
    }

    pub fn floor_contains(&self, p: &Vec2) -> bool {
        self.floor.triangles_iter().any(|t| {
            let tri = [ground(&t[0]), ground(&t[1]), ground(&t[2])];
            point_in_triangle(p, &tri)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomicAction {
    NavigateTo,
    SitOn,
    LieOn,
    Toggle,
    PickupFrom,
    ReleaseOn,
    Open,
    Close,
    PutIn,
    TakeOutOf,
    LookAt,
}

impl AtomicAction {
    pub const ALL: [AtomicAction; 11] = [
        AtomicAction::NavigateTo,
        AtomicAction::SitOn,
        AtomicAction::LieOn,
        AtomicAction::Toggle,
        AtomicAction::PickupFrom,
        AtomicAction::ReleaseOn,
        AtomicAction::Open,
        AtomicAction::Close,
        AtomicAction::PutIn,
        AtomicAction::TakeOutOf,
        AtomicAction::LookAt,
    ];

    pub fn family(self) -> ActionFamily {
        use AtomicAction::*;
        match self {
            NavigateTo | SitOn | LieOn => ActionFamily::Mobility,
            Toggle | PickupFrom | ReleaseOn => ActionFamily::Contact,
            Open | Close | PutIn | TakeOutOf => ActionFamily::Handling,
            LookAt => ActionFamily::Perception,
        }
    }

    pub fn required_properties(self) -> &'static [PropertyKind] {
        required_properties(self)
    }

    pub fn as_str(self) -> &'static str {
        use AtomicAction::*;
        match self {
            NavigateTo => "navigate_to",
            SitOn => "sit_on",
            LieOn => "lie_on",
            Toggle => "toggle",
            PickupFrom => "pickup_from",
            ReleaseOn => "release_on",
            Open => "open",
            Close => "close",
            PutIn => "put_in",
            TakeOutOf => "take_out_of",
            LookAt => "look_at",
        }
    }
}

impl fmt::Display for AtomicAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionFamily {
    Mobility,
    Contact,
    Handling,
    Perception,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyKind {
    Navigable,
    Reachable,
    Interactable,
    Clearance,
    Visible,
}

impl PropertyKind {
    pub const ALL: [PropertyKind; 5] = [
        PropertyKind::Navigable,
        PropertyKind::Reachable,
        PropertyKind::Interactable,
        PropertyKind::Clearance,
        PropertyKind::Visible,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PropertyKind::Navigable => "navigable",
            PropertyKind::Reachable => "reachable",
            PropertyKind::Interactable => "interactable",
            PropertyKind::Clearance => "clearance",
            PropertyKind::Visible => "visible",
        }
    }
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordered property checks an action must pass, fixed by its family.
pub fn required_properties(action: AtomicAction) -> &'static [PropertyKind] {
    use PropertyKind::*;
    match action.family() {
        ActionFamily::Mobility => &[Navigable],
        ActionFamily::Contact => &[Navigable, Reachable],
        ActionFamily::Handling => &[Navigable, Reachable, Interactable, Clearance],
        ActionFamily::Perception => &[Visible],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanStep {
    pub action: AtomicAction,
    pub object_id: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub agent: String,
    pub task: String,
    pub steps: Vec<PlanStep>,
}

impl Plan {
    /// Every step's object id must exist in `scene`.
    pub fn check_against(&self, scene: &Scene) -> Result<(), SceneError> {
        for (i, s) in self.steps.iter().enumerate() {
            if scene.object(&s.object_id).is_none() {
                return Err(SceneError::UnknownObject {
                    step: i + 1,
                    object_id: s.object_id.clone(),
                });
            }
        }
        Ok(())
    }
}
