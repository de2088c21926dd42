//! Benchmark metrics over labelled task records.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scene::PropertyKind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("prediction for task `{0}` has no matching label")]
    UnmatchedTask(String),
    #[error("duplicate record for task `{0}`")]
    DuplicateTask(String),
    #[error("task `{task_id}`: {reason}")]
    InvalidRecord { task_id: String, reason: String },
    #[error("decomposed prediction has no actions")]
    EmptyActions,
    #[error("direct and decomposed predictions cover different tasks")]
    MismatchedTaskSets,
}

/// Ground truth for one task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub task_id: String,
    pub agent_name: String,
    pub step_count: usize,
    pub task_label: bool,
    pub action_labels: Vec<bool>,
    /// Per action: the property that made it fail, if it failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failing_properties: Option<Vec<Option<PropertyKind>>>,
}

impl LabelRecord {
    pub fn validate(&self) -> Result<(), MetricsError> {
        let bad = |reason: String| {
            Err(MetricsError::InvalidRecord {
                task_id: self.task_id.clone(),
                reason,
            })
        };
        if self.step_count != self.action_labels.len() {
            return bad(format!(
                "step_count {} differs from {} action labels",
                self.step_count,
                self.action_labels.len()
            ));
        }
        if self.task_label != self.action_labels.iter().all(|&a| a) {
            return bad("task_label is not the conjunction of action_labels".into());
        }
        if let Some(fp) = &self.failing_properties {
            if fp.len() != self.action_labels.len() {
                return bad("failing_properties length differs from action_labels".into());
            }
        }
        Ok(())
    }

    /// The first recorded failing property, used by the spatial reward.
    pub fn first_failing_property(&self) -> Option<PropertyKind> {
        self.failing_properties
            .as_ref()?
            .iter()
            .flatten()
            .next()
            .copied()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PredictionRecord {
    Direct {
        task_id: String,
        task_pred: bool,
    },
    Decomposed {
        task_id: String,
        action_preds: Vec<bool>,
    },
}

impl PredictionRecord {
    pub fn task_id(&self) -> &str {
        match self {
            PredictionRecord::Direct { task_id, .. }
            | PredictionRecord::Decomposed { task_id, .. } => task_id,
        }
    }

    /// Task-level conclusion: the direct answer or the conjunction of actions.
    pub fn conclusion(&self) -> Result<bool, MetricsError> {
        match self {
            PredictionRecord::Direct { task_pred, .. } => Ok(*task_pred),
            PredictionRecord::Decomposed { action_preds, .. } => {
                decomposed_conclusion(action_preds)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn add(&mut self, pred: bool, label: bool) {
        match (pred, label) {
            (true, true) => self.tp += 1,
            (false, false) => self.tn += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn accuracy(&self) -> Option<f64> {
        let n = self.total();
        (n > 0).then(|| (self.tp + self.tn) as f64 / n as f64)
    }

    /// Share of infeasible tasks predicted feasible; 0 when there are none.
    pub fn fp_rate(&self) -> f64 {
        let neg = self.fp + self.tn;
        if neg == 0 {
            0.0
        } else {
            self.fp as f64 / neg as f64
        }
    }
}

/// Matthews correlation coefficient; 0 when any marginal is empty.
pub fn mcc(c: &ConfusionCounts) -> f64 {
    let (tp, tn, fp, fn_) = (c.tp as f64, c.tn as f64, c.fp as f64, c.fn_ as f64);
    let denom = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
    if denom == 0.0 {
        return 0.0;
    }
    ((tp * tn - fp * fn_) / denom.sqrt()).clamp(-1.0, 1.0)
}

pub fn decomposed_conclusion(action_preds: &[bool]) -> Result<bool, MetricsError> {
    if action_preds.is_empty() {
        return Err(MetricsError::EmptyActions);
    }
    Ok(action_preds.iter().all(|&p| p))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskMetrics {
    /// Per-action accuracy; only defined for decomposed predictions.
    pub action_accuracy: Option<f64>,
    pub task_accuracy: f64,
    pub fp: f64,
    pub mcc: f64,
    /// Largest task-accuracy difference between agents.
    pub ingap: f64,
    /// `100 * acc(>= 3 steps) / acc(<= 2 steps)`; absent when undefined.
    pub hsi: Option<f64>,
    pub confusion: ConfusionCounts,
    pub tasks: usize,
}

fn label_index(labels: &[LabelRecord]) -> Result<HashMap<&str, &LabelRecord>, MetricsError> {
    let mut index = HashMap::with_capacity(labels.len());
    for l in labels {
        l.validate()?;
        if index.insert(l.task_id.as_str(), l).is_some() {
            return Err(MetricsError::DuplicateTask(l.task_id.clone()));
        }
    }
    Ok(index)
}

pub fn task_metrics(
    labels: &[LabelRecord],
    preds: &[PredictionRecord],
) -> Result<TaskMetrics, MetricsError> {
    let index = label_index(labels)?;
    let mut seen = HashSet::new();
    let mut all = ConfusionCounts::default();
    let mut short = ConfusionCounts::default();
    let mut long = ConfusionCounts::default();
    let mut per_agent: BTreeMap<&str, ConfusionCounts> = BTreeMap::new();
    let (mut action_hits, mut action_total) = (0usize, 0usize);

    for p in preds {
        let id = p.task_id();
        let label = *index
            .get(id)
            .ok_or_else(|| MetricsError::UnmatchedTask(id.to_string()))?;
        if !seen.insert(id) {
            return Err(MetricsError::DuplicateTask(id.to_string()));
        }
        if let PredictionRecord::Decomposed { action_preds, .. } = p {
            if action_preds.len() != label.action_labels.len() {
                return Err(MetricsError::InvalidRecord {
                    task_id: id.to_string(),
                    reason: format!(
                        "{} action predictions for {} labelled actions",
                        action_preds.len(),
                        label.action_labels.len()
                    ),
                });
            }
            action_total += action_preds.len();
            action_hits += action_preds
                .iter()
                .zip(&label.action_labels)
                .filter(|(a, b)| a == b)
                .count();
        }
        let pred = p.conclusion()?;
        all.add(pred, label.task_label);
        per_agent
            .entry(label.agent_name.as_str())
            .or_default()
            .add(pred, label.task_label);
        if label.step_count >= 3 {
            long.add(pred, label.task_label);
        } else {
            short.add(pred, label.task_label);
        }
    }

    let accs: Vec<f64> = per_agent
        .values()
        .filter_map(ConfusionCounts::accuracy)
        .collect();
    let ingap = match (
        accs.iter().copied().reduce(f64::max),
        accs.iter().copied().reduce(f64::min),
    ) {
        (Some(hi), Some(lo)) => hi - lo,
        _ => 0.0,
    };
    let hsi = match (long.accuracy(), short.accuracy()) {
        (Some(l), Some(s)) if s > 0.0 => Some(100.0 * l / s),
        _ => None,
    };
    let is_decomposed = preds
        .iter()
        .any(|p| matches!(p, PredictionRecord::Decomposed { .. }));
    Ok(TaskMetrics {
        action_accuracy: (is_decomposed && action_total > 0)
            .then(|| action_hits as f64 / action_total as f64),
        task_accuracy: all.accuracy().unwrap_or(0.0),
        fp: all.fp_rate(),
        mcc: mcc(&all),
        ingap,
        hsi,
        confusion: all,
        tasks: preds.len(),
    })
}

/// Percentage of tasks whose direct answer equals the decomposed conclusion.
pub fn consistency(
    direct: &[PredictionRecord],
    decomposed: &[PredictionRecord],
) -> Result<f64, MetricsError> {
    let mut d: HashMap<&str, bool> = HashMap::new();
    for p in direct {
        if d.insert(p.task_id(), p.conclusion()?).is_some() {
            return Err(MetricsError::DuplicateTask(p.task_id().to_string()));
        }
    }
    if decomposed.len() != d.len() {
        return Err(MetricsError::MismatchedTaskSets);
    }
    let mut matches = 0usize;
    let mut seen = HashSet::new();
    for p in decomposed {
        let direct_pred = d.get(p.task_id()).ok_or(MetricsError::MismatchedTaskSets)?;
        if !seen.insert(p.task_id()) {
            return Err(MetricsError::DuplicateTask(p.task_id().to_string()));
        }
        if *direct_pred == p.conclusion()? {
            matches += 1;
        }
    }
    if d.is_empty() {
        return Ok(100.0);
    }
    Ok(100.0 * matches as f64 / d.len() as f64)
}

/// The benchmark table row for one model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub direct: Option<TaskMetrics>,
    pub decomposed: Option<TaskMetrics>,
    pub consistency: Option<f64>,
}

pub fn metrics_report(
    labels: &[LabelRecord],
    direct: Option<&[PredictionRecord]>,
    decomposed: Option<&[PredictionRecord]>,
) -> Result<MetricsReport, MetricsError> {
    let d = direct.map(|p| task_metrics(labels, p)).transpose()?;
    let c = decomposed.map(|p| task_metrics(labels, p)).transpose()?;
    let cons = match (direct, decomposed) {
        (Some(a), Some(b)) => Some(consistency(a, b)?),
        _ => None,
    };
    Ok(MetricsReport {
        direct: d,
        decomposed: c,
        consistency: cons,
    })
}
