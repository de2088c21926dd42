//! Completion parsing, the shaped verifier reward, and group-normalized
//! advantages.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::metrics::{LabelRecord, MetricsError};
use crate::scene::PropertyKind;

pub const PLACEHOLDER_TEXT: &str = "reasoning process here";
pub const FORMAT_REWARD: f64 = 0.5;
pub const CORRECT_FALSE_REWARD: f64 = 3.0;
pub const CORRECT_TRUE_REWARD: f64 = 2.0;
pub const SPATIAL_REWARD: f64 = 1.0;
pub const PLACEHOLDER_PENALTY: f64 = -1.0;
pub const DEFAULT_ADVANTAGE_EPSILON: f64 = 1e-4;

static THINK: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?s)<think>(.*?)</think>").unwrap());
static ANSWER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?s)<answer>(.*?)</answer>").unwrap());

/// Words whose presence in the reasoning earns the spatial reward when the
/// given property caused the failure.
pub fn property_keywords(property: PropertyKind) -> &'static [&'static str] {
    match property {
        PropertyKind::Navigable => &[
            "path", "walk", "navigate", "access", "blocked", "way", "stuck",
        ],
        PropertyKind::Reachable => &[
            "reach", "distance", "too far", "height", "arm", "long", "short", "touch",
        ],
        PropertyKind::Interactable => &["handle", "grip", "part", "grasp", "rim", "side"],
        PropertyKind::Clearance => &[
            "clearance",
            "blocked",
            "fit",
            "narrow",
            "collision",
            "hit",
            "space",
            "swing",
        ],
        PropertyKind::Visible => &[],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedCompletion {
    pub think: String,
    pub answer: Option<bool>,
    pub format_ok: bool,
    pub placeholder: bool,
}

pub fn parse_completion(text: &str) -> ParsedCompletion {
    let think = THINK.captures(text).map(|c| c[1].to_string());
    let answer_raw = ANSWER
        .captures(text)
        .map(|c| c[1].trim().to_ascii_lowercase());
    let answer = match answer_raw.as_deref() {
        Some("true") => Some(true),
        Some("false") => Some(false),
        _ => None,
    };
    let placeholder = think
        .as_deref()
        .is_some_and(|t| t.trim() == PLACEHOLDER_TEXT);
    ParsedCompletion {
        format_ok: think.is_some() && answer.is_some(),
        think: think.unwrap_or_default(),
        answer,
        placeholder,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub r_format: f64,
    pub r_correct: f64,
    pub r_spatial: f64,
    /// Placeholder penalty; 0 unless the completion copied the prompt example.
    pub penalty: f64,
    pub total: f64,
    pub parsed_answer: Option<bool>,
    pub matched_keywords: Vec<String>,
}

pub fn matched_keywords(think: &str, property: PropertyKind) -> Vec<String> {
    let lower = think.to_lowercase();
    property_keywords(property)
        .iter()
        .filter(|k| lower.contains(*k))
        .map(|k| k.to_string())
        .collect()
}

pub fn grpo_reward(
    completion: &str,
    label: bool,
    failing_property: Option<PropertyKind>,
) -> RewardBreakdown {
    let parsed = parse_completion(completion);
    if parsed.placeholder {
        return RewardBreakdown {
            r_format: 0.0,
            r_correct: 0.0,
            r_spatial: 0.0,
            penalty: PLACEHOLDER_PENALTY,
            total: PLACEHOLDER_PENALTY,
            parsed_answer: parsed.answer,
            matched_keywords: Vec::new(),
        };
    }
    let r_format = if parsed.format_ok { FORMAT_REWARD } else { 0.0 };
    let r_correct = match parsed.answer {
        Some(a) if a == label => {
            if label {
                CORRECT_TRUE_REWARD
            } else {
                CORRECT_FALSE_REWARD
            }
        }
        _ => 0.0,
    };
    let matched = match (label, parsed.answer, failing_property) {
        (false, Some(false), Some(p)) => matched_keywords(&parsed.think, p),
        _ => Vec::new(),
    };
    let r_spatial = if matched.is_empty() {
        0.0
    } else {
        SPATIAL_REWARD
    };
    RewardBreakdown {
        r_format,
        r_correct,
        r_spatial,
        penalty: 0.0,
        total: r_format + r_correct + r_spatial,
        parsed_answer: parsed.answer,
        matched_keywords: matched,
    }
}

/// `(r_i - mean) / (std + epsilon)` with the population standard deviation.
pub fn group_advantage(rewards: &[f64], epsilon: f64) -> Vec<f64> {
    if rewards.is_empty() {
        return Vec::new();
    }
    let n = rewards.len() as f64;
    let mean = rewards.iter().sum::<f64>() / n;
    let var = rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    let denom = var.sqrt() + epsilon;
    rewards.iter().map(|r| (r - mean) / denom).collect()
}

/// One sampled completion for a task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletionRecord {
    pub task_id: String,
    pub completion: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardRecord {
    pub task_id: String,
    /// Position of the completion in the input file.
    pub index: usize,
    pub label: bool,
    pub failing_property: Option<PropertyKind>,
    #[serde(flatten)]
    pub reward: RewardBreakdown,
    /// Normalized within the completions sharing `task_id`.
    pub advantage: f64,
}

/// Scores every completion against its task label, then normalizes the
/// totals per task.
pub fn score_completions(
    labels: &[LabelRecord],
    completions: &[CompletionRecord],
    epsilon: f64,
) -> Result<Vec<RewardRecord>, MetricsError> {
    let mut by_task = std::collections::HashMap::new();
    for l in labels {
        l.validate()?;
        if by_task.insert(l.task_id.as_str(), l).is_some() {
            return Err(MetricsError::DuplicateTask(l.task_id.clone()));
        }
    }
    let mut out = Vec::with_capacity(completions.len());
    let mut groups: std::collections::BTreeMap<&str, Vec<usize>> =
        std::collections::BTreeMap::new();
    for (index, c) in completions.iter().enumerate() {
        let label = by_task
            .get(c.task_id.as_str())
            .ok_or_else(|| MetricsError::UnmatchedTask(c.task_id.clone()))?;
        let failing = label.first_failing_property();
        groups.entry(c.task_id.as_str()).or_default().push(index);
        out.push(RewardRecord {
            task_id: c.task_id.clone(),
            index,
            label: label.task_label,
            failing_property: failing,
            reward: grpo_reward(&c.completion, label.task_label, failing),
            advantage: 0.0,
        });
    }
    for members in groups.values() {
        let totals: Vec<f64> = members.iter().map(|&i| out[i].reward.total).collect();
        for (&i, a) in members.iter().zip(group_advantage(&totals, epsilon)) {
            out[i].advantage = a;
        }
    }
    Ok(out)
}
