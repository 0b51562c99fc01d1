//! Priorities, sustainability impact scores and benchmark normalization.
//!
//! The pipeline for one model is:
//!
//! 1. resolve importance/risk per QA (a utility-matrix cell for the chosen
//!    scenario overrides the QA default),
//! 2. priority = `w_I·I + w_R·R` (or the QA's explicit override),
//! 3. min-max normalize all priorities into `[0.1, 1.0]`,
//! 4. SIS per (alternative, dimension pair) = `Σ (P_row + P_col) · effect`,
//! 5. express each SIS as a percentage between the worst non-optimal
//!    alternative (0%) and the theoretical optimal (100%).
//!
//! Raw SIS values have no lower bound, so a 0% alternative can still be
//! arbitrarily bad in absolute terms. Reports always show raw SIS next to the
//! percentage for that reason.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    AssessmentModel, Dimension, DimensionPair, EffectMatrix, Level, ModelError, WeightConfig,
};

pub const MIN_NORMALIZED_PRIORITY: f64 = 0.1;
pub const MAX_NORMALIZED_PRIORITY: f64 = 1.0;

/// Absolute tolerance for comparing accumulated SIS values.
pub const SIS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("cannot normalize an empty set of priorities")]
    EmptyPriorities,
    #[error("no priority for quality attribute '{0}'")]
    MissingPriority(String),
    #[error("legacy SIS is defined for technical rows only, matrix starts at {0}")]
    NotTechnical(Dimension),
    #[error("theoretical optimal is not optimal{}: alternative '{alternative}' scores {sis} above the optimal {optimal}",
        .pair.map(|p| format!(" for {p}")).unwrap_or_default())]
    NotOptimal { pair: Option<DimensionPair>, alternative: String, sis: f64, optimal: f64 },
    #[error("no alternative has is_theoretical_optimal set; flag the benchmark alternative to normalize SIS")]
    NoTheoreticalOptimal,
    #[error("scenario '{0}' is not a column of the utility matrix")]
    UnknownScenario(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which priority feeds the SIS sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorityMode {
    #[default]
    Normalized,
    /// Unnormalized priorities, as in legacy ranking-based scoring.
    Raw,
}

/// Weighted sum of importance and risk.
pub fn compute_priority(importance: Level, risk: Level, weights: &WeightConfig) -> f64 {
    weights.importance_weight * f64::from(importance.value()) + weights.risk_weight * f64::from(risk.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Priority {
    pub raw: f64,
    pub normalized: f64,
}

impl Priority {
    pub fn value(&self, mode: PriorityMode) -> f64 {
        match mode {
            PriorityMode::Normalized => self.normalized,
            PriorityMode::Raw => self.raw,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PrioritySet {
    entries: BTreeMap<String, Priority>,
}

impl PrioritySet {
    pub fn get(&self, qa: &str) -> Option<Priority> {
        self.entries.get(qa).copied()
    }

    pub fn value(&self, qa: &str, mode: PriorityMode) -> Result<f64, ScoringError> {
        self.get(qa)
            .map(|p| p.value(mode))
            .ok_or_else(|| ScoringError::MissingPriority(qa.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Priority)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Min-max maps raw priorities onto `[0.1, 1.0]`.
///
/// When every raw value is equal there is no spread to map, and every entry
/// normalizes to 1.0.
pub fn normalize_priorities<I, K>(raw: I) -> Result<PrioritySet, ScoringError>
where
    I: IntoIterator<Item = (K, f64)>,
    K: Into<String>,
{
    let raw: Vec<(String, f64)> = raw.into_iter().map(|(k, v)| (k.into(), v)).collect();
    if raw.is_empty() {
        return Err(ScoringError::EmptyPriorities);
    }
    let min = raw.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    let max = raw.iter().map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
    let span = MAX_NORMALIZED_PRIORITY - MIN_NORMALIZED_PRIORITY;
    let entries = raw
        .into_iter()
        .map(|(qa, p)| {
            let normalized = if max > min {
                MIN_NORMALIZED_PRIORITY + span * (p - min) / (max - min)
            } else {
                MAX_NORMALIZED_PRIORITY
            };
            (qa, Priority { raw: p, normalized })
        })
        .collect();
    Ok(PrioritySet { entries })
}

/// Priorities for every QA in the model, optionally under one scenario.
pub fn resolve_priorities(model: &AssessmentModel, scenario: Option<&str>) -> Result<PrioritySet, ScoringError> {
    let utility = match scenario {
        None => None,
        Some(s) => {
            let um = model
                .utility_matrix
                .as_ref()
                .filter(|um| um.columns.iter().any(|c| c == s))
                .ok_or_else(|| ScoringError::UnknownScenario(s.to_string()))?;
            Some((um, s))
        }
    };
    let raw = model.quality_attributes.iter().map(|qa| {
        let (importance, risk) = utility
            .and_then(|(um, s)| um.levels(&qa.id, s))
            .unwrap_or((qa.importance, qa.risk));
        let p = qa
            .priority_override
            .unwrap_or_else(|| compute_priority(importance, risk, &model.weights));
        (qa.id.clone(), p)
    });
    normalize_priorities(raw)
}

/// SIS of one matrix using normalized priorities.
pub fn compute_sis(matrix: &EffectMatrix, priorities: &PrioritySet) -> Result<f64, ScoringError> {
    compute_sis_with(matrix, priorities, PriorityMode::Normalized)
}

pub fn compute_sis_with(
    matrix: &EffectMatrix,
    priorities: &PrioritySet,
    mode: PriorityMode,
) -> Result<f64, ScoringError> {
    let rows = matrix
        .row_qas
        .iter()
        .map(|qa| priorities.value(qa, mode))
        .collect::<Result<Vec<_>, _>>()?;
    let cols = matrix
        .col_qas
        .iter()
        .map(|qa| priorities.value(qa, mode))
        .collect::<Result<Vec<_>, _>>()?;
    let mut sis = 0.0;
    for (r, row) in matrix.cells.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            sis += (rows[r] + cols[c]) * f64::from(cell.effect.value());
        }
    }
    Ok(sis)
}

/// Technical-row SIS under its legacy name. Same computation as
/// [`compute_sis_with`]; kept as a named conformance check.
pub fn legacy_sis_equivalence_check(
    matrix: &EffectMatrix,
    priorities: &PrioritySet,
    mode: PriorityMode,
) -> Result<f64, ScoringError> {
    if matrix.dim_from != Dimension::T {
        return Err(ScoringError::NotTechnical(matrix.dim_from));
    }
    compute_sis_with(matrix, priorities, mode)
}

/// Percent position of each alternative between the worst alternative (0%)
/// and the theoretical optimal (100%).
///
/// `raw` holds the non-optimal alternatives only. If the optimal does not
/// exceed the minimum, every alternative reports 100%.
pub fn compute_normalized_sis(
    raw: &BTreeMap<String, f64>,
    theoretical_optimal: f64,
) -> Result<BTreeMap<String, f64>, ScoringError> {
    if let Some((alt, sis)) = raw.iter().find(|(_, sis)| **sis > theoretical_optimal + SIS_TOLERANCE) {
        return Err(ScoringError::NotOptimal {
            pair: None,
            alternative: alt.clone(),
            sis: *sis,
            optimal: theoretical_optimal,
        });
    }
    let min = raw.values().copied().fold(f64::INFINITY, f64::min);
    let span = theoretical_optimal - min;
    Ok(raw
        .iter()
        .map(|(alt, sis)| {
            let pct = if span > SIS_TOLERANCE { (sis - min) / span * 100.0 } else { 100.0 };
            (alt.clone(), pct)
        })
        .collect())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScoreOptions {
    pub scenario: Option<String>,
    pub priority_mode: PriorityMode,
    /// Fail when no theoretical optimal is flagged instead of skipping
    /// normalization.
    pub require_optimal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternativeRef {
    pub id: String,
    pub name: String,
    pub is_theoretical_optimal: bool,
}

/// Scores of every alternative for one dimension pair.
///
/// `raw` and `normalized_percent` cover the non-optimal alternatives; the
/// optimal's raw SIS is in `theoretical_optimal` and it is 100% by
/// definition. Without a flagged optimal, `raw` holds every alternative and
/// `normalized_percent` is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SisResult {
    pub dim_from: Dimension,
    pub dim_to: Dimension,
    pub raw: BTreeMap<String, f64>,
    #[serde(default)]
    pub normalized_percent: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theoretical_optimal: Option<f64>,
}

impl SisResult {
    pub fn pair(&self) -> DimensionPair {
        DimensionPair::new(self.dim_from, self.dim_to)
    }

    /// Raw SIS for any alternative, including the optimal.
    pub fn raw_for(&self, alt: &AlternativeRef) -> Option<f64> {
        if alt.is_theoretical_optimal {
            self.theoretical_optimal
        } else {
            self.raw.get(&alt.id).copied()
        }
    }

    pub fn percent_for(&self, alt: &AlternativeRef) -> Option<f64> {
        if alt.is_theoretical_optimal {
            self.theoretical_optimal.map(|_| 100.0)
        } else {
            self.normalized_percent.get(&alt.id).copied()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub priority_mode: PriorityMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub alternatives: Vec<AlternativeRef>,
    pub results: Vec<SisResult>,
}

impl ScoreReport {
    pub fn result(&self, pair: DimensionPair) -> Option<&SisResult> {
        self.results.iter().find(|r| r.pair() == pair)
    }

    pub fn optimal(&self) -> Option<&AlternativeRef> {
        self.alternatives.iter().find(|a| a.is_theoretical_optimal)
    }
}

/// Effective matrices of every alternative, in model order.
pub fn alternative_matrices(model: &AssessmentModel) -> Result<Vec<(String, Vec<EffectMatrix>)>, ModelError> {
    model
        .alternatives
        .iter()
        .map(|alt| Ok((alt.id.clone(), alt.effective_matrices(model)?)))
        .collect()
}

/// Full scoring pipeline for one model.
///
/// Pairs that an alternative lacks score 0 for that alternative.
pub fn score_model(model: &AssessmentModel, options: &ScoreOptions) -> Result<ScoreReport, ScoringError> {
    let priorities = resolve_priorities(model, options.scenario.as_deref())?;
    let matrices = alternative_matrices(model)?;

    let mut pairs: Vec<DimensionPair> = matrices.iter().flat_map(|(_, ms)| ms.iter().map(EffectMatrix::pair)).collect();
    pairs.sort();
    pairs.dedup();

    let optimal = model.theoretical_optimal().map(|a| a.id.as_str());
    if optimal.is_none() && options.require_optimal && !pairs.is_empty() {
        return Err(ScoringError::NoTheoreticalOptimal);
    }

    let mut results = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let mut raw = BTreeMap::new();
        let mut optimal_sis = None;
        for (alt, ms) in &matrices {
            let sis = match ms.iter().find(|m| m.pair() == pair) {
                Some(m) => compute_sis_with(m, &priorities, options.priority_mode)?,
                None => 0.0,
            };
            if Some(alt.as_str()) == optimal {
                optimal_sis = Some(sis);
            } else {
                raw.insert(alt.clone(), sis);
            }
        }
        results.push(finish_pair(pair, raw, optimal_sis)?);
    }

    Ok(ScoreReport {
        priority_mode: options.priority_mode,
        scenario: options.scenario.clone(),
        alternatives: alternative_refs(model),
        results,
    })
}

pub(crate) fn finish_pair(
    pair: DimensionPair,
    raw: BTreeMap<String, f64>,
    optimal_sis: Option<f64>,
) -> Result<SisResult, ScoringError> {
    let normalized_percent = match optimal_sis {
        Some(to) => compute_normalized_sis(&raw, to).map_err(|err| match err {
            ScoringError::NotOptimal { alternative, sis, optimal, .. } => {
                ScoringError::NotOptimal { pair: Some(pair), alternative, sis, optimal }
            }
            other => other,
        })?,
        None => BTreeMap::new(),
    };
    Ok(SisResult {
        dim_from: pair.from,
        dim_to: pair.to,
        raw,
        normalized_percent,
        theoretical_optimal: optimal_sis,
    })
}

pub fn alternative_refs(model: &AssessmentModel) -> Vec<AlternativeRef> {
    model
        .alternatives
        .iter()
        .map(|a| AlternativeRef {
            id: a.id.clone(),
            name: a.name.clone(),
            is_theoretical_optimal: a.is_theoretical_optimal,
        })
        .collect()
}
