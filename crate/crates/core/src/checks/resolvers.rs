//! Selection of the interaction zones relevant to an action.

use std::collections::BTreeMap;

use crate::geometry::{Face, InteractionZone};
use crate::navmap::NavMap;
use crate::scene::{AtomicAction, SceneObject};

pub trait ZoneResolver: Send + Sync {
    /// Picks a subset of `zones` (the object's four face zones) for `action`.
    fn resolve(
        &self,
        object: &SceneObject,
        action: AtomicAction,
        zones: &[InteractionZone],
        map: &NavMap,
    ) -> Result<Vec<InteractionZone>, String>;
}

/// Keeps every zone whose mask touches a walkable pixel. When none does, all
/// zones are returned so that navigability reports them as non-walkable.
#[derive(Clone, Copy, Debug, Default)]
pub struct DefaultResolver;

impl ZoneResolver for DefaultResolver {
    fn resolve(
        &self,
        _object: &SceneObject,
        _action: AtomicAction,
        zones: &[InteractionZone],
        map: &NavMap,
    ) -> Result<Vec<InteractionZone>, String> {
        let grid = map.grid();
        let open: Vec<InteractionZone> = zones
            .iter()
            .filter(|z| {
                map.rasterize_polygon(&z.polygon)
                    .into_iter()
                    .any(|i| grid[i])
            })
            .cloned()
            .collect();
        Ok(if open.is_empty() {
            zones.to_vec()
        } else {
            open
        })
    }
}

/// Faces listed per `(category, action)`; other pairs use [`DefaultResolver`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AnnotationResolver {
    faces: BTreeMap<(String, AtomicAction), Vec<Face>>,
}

impl AnnotationResolver {
    pub fn insert(&mut self, category: impl Into<String>, action: AtomicAction, faces: Vec<Face>) {
        self.faces.insert((category.into(), action), faces);
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, AtomicAction, &[Face])> {
        self.faces
            .iter()
            .map(|((c, a), f)| (c.as_str(), *a, f.as_slice()))
    }
}

impl ZoneResolver for AnnotationResolver {
    fn resolve(
        &self,
        object: &SceneObject,
        action: AtomicAction,
        zones: &[InteractionZone],
        map: &NavMap,
    ) -> Result<Vec<InteractionZone>, String> {
        match self.faces.get(&(object.category.clone(), action)) {
            Some(faces) => Ok(zones
                .iter()
                .filter(|z| faces.contains(&z.face))
                .cloned()
                .collect()),
            None => DefaultResolver.resolve(object, action, zones, map),
        }
    }
}

pub fn resolve_zones(
    resolver: &dyn ZoneResolver,
    object: &SceneObject,
    action: AtomicAction,
    zones: &[InteractionZone],
    map: &NavMap,
) -> Result<Vec<InteractionZone>, String> {
    resolver.resolve(object, action, zones, map)
}
