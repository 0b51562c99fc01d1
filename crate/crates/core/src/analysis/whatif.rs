//! What-if exploration: override effect cells and observe SIS changes.
//!
//! Raw SIS is updated incrementally (a cell change from `e` to `e'` moves the
//! pair's SIS by `(P_row + P_col)·(e' − e)`); percentages are recomputed for
//! the whole pair because the minimum may move.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::chains::{find_synergy_chains, SynergyChain};
use crate::model::{
    Alternative, AssessmentModel, Dimension, DimensionPair, DmapEdge, DmapNode, Effect, EffectMatrix,
    ModelError, Sign,
};
use crate::scoring::{
    alternative_matrices, finish_pair, resolve_priorities, score_model, ScoreOptions, ScoreReport,
    ScoringError, SisResult,
};

/// Minimum chain length reported in what-if chain diffs.
pub const WHATIF_CHAIN_MIN_LENGTH: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellOverride {
    pub alternative: String,
    pub dim_from: Dimension,
    pub dim_to: Dimension,
    pub row_qa: String,
    pub col_qa: String,
    pub effect: Effect,
}

impl CellOverride {
    pub fn pair(&self) -> DimensionPair {
        DimensionPair::new(self.dim_from, self.dim_to)
    }

    fn same_cell(&self, other: &CellOverride) -> bool {
        self.alternative == other.alternative
            && self.pair() == other.pair()
            && self.row_qa == other.row_qa
            && self.col_qa == other.col_qa
    }

    fn coordinates(&self) -> String {
        format!("{}:{}[{}, {}]", self.alternative, self.pair(), self.row_qa, self.col_qa)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhatIfPatch {
    #[serde(default)]
    pub overrides: Vec<CellOverride>,
}

impl WhatIfPatch {
    pub fn is_empty(&self) -> bool {
        self.overrides.is_empty()
    }

    /// Adds an override, replacing any earlier one for the same cell.
    pub fn merge(&mut self, cell: CellOverride) {
        match self.overrides.iter_mut().find(|o| o.same_cell(&cell)) {
            Some(existing) => *existing = cell,
            None => self.overrides.push(cell),
        }
    }
}

#[derive(Debug, Error)]
pub enum WhatIfError {
    #[error("unknown alternative '{0}'")]
    UnknownAlternative(String),
    #[error("unknown cell {0}")]
    UnknownCell(String),
    #[error("cell {0} is overridden more than once")]
    DuplicateOverride(String),
    #[error("cell {0} is on the diagonal and must stay 0")]
    DiagonalCell(String),
    #[error("alternative '{0}' is the theoretical optimal and is read-only; pass allow_optimal_edit to change it")]
    OptimalReadOnly(String),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WhatIfOptions {
    #[serde(flatten)]
    pub score: ScoreOptions,
    #[serde(default)]
    pub allow_optimal_edit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternativeDelta {
    pub alternative: String,
    pub old_raw: f64,
    pub new_raw: f64,
    pub delta_raw: f64,
    pub old_percent: Option<f64>,
    pub new_percent: Option<f64>,
    pub delta_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDelta {
    pub dim_from: Dimension,
    pub dim_to: Dimension,
    pub entries: Vec<AlternativeDelta>,
}

impl PairDelta {
    pub fn pair(&self) -> DimensionPair {
        DimensionPair::new(self.dim_from, self.dim_to)
    }

    pub fn entry(&self, alternative: &str) -> Option<&AlternativeDelta> {
        self.entries.iter().find(|e| e.alternative == alternative)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainChange {
    Created,
    Broken,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangedChain {
    pub alternative: String,
    pub change: ChainChange,
    pub chain: SynergyChain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhatIfReport {
    pub pairs: Vec<PairDelta>,
    pub changed_chains: Vec<ChangedChain>,
}

impl WhatIfReport {
    pub fn pair(&self, pair: DimensionPair) -> Option<&PairDelta> {
        self.pairs.iter().find(|p| p.pair() == pair)
    }
}

#[derive(Debug, Clone)]
pub struct WhatIfOutcome {
    /// Copy of the input model with the overrides applied.
    pub model: AssessmentModel,
    pub baseline: ScoreReport,
    pub patched: ScoreReport,
    pub report: WhatIfReport,
}

/// Applies `patch` to a copy of `model` and reports the SIS change per pair.
pub fn apply_whatif(
    model: &AssessmentModel,
    patch: &WhatIfPatch,
    options: &WhatIfOptions,
) -> Result<WhatIfOutcome, WhatIfError> {
    let baseline = score_model(model, &options.score)?;
    let priorities = resolve_priorities(model, options.score.scenario.as_deref())?;
    let matrices: BTreeMap<String, Vec<EffectMatrix>> = alternative_matrices(model)?.into_iter().collect();
    let mode = options.score.priority_mode;

    let mut seen: Vec<&CellOverride> = Vec::new();
    let mut deltas: BTreeMap<(String, DimensionPair), f64> = BTreeMap::new();
    for cell in &patch.overrides {
        let alt = model
            .alternative(&cell.alternative)
            .ok_or_else(|| WhatIfError::UnknownAlternative(cell.alternative.clone()))?;
        if alt.is_theoretical_optimal && !options.allow_optimal_edit {
            return Err(WhatIfError::OptimalReadOnly(alt.id.clone()));
        }
        if seen.iter().any(|o| o.same_cell(cell)) {
            return Err(WhatIfError::DuplicateOverride(cell.coordinates()));
        }
        seen.push(cell);
        let old = current_effect(model, alt, &matrices[&alt.id], cell)
            .ok_or_else(|| WhatIfError::UnknownCell(cell.coordinates()))?;
        if cell.pair().is_same_dimension() && cell.row_qa == cell.col_qa && cell.effect.is_nonzero() {
            return Err(WhatIfError::DiagonalCell(cell.coordinates()));
        }
        let weight = priorities.value(&cell.row_qa, mode)? + priorities.value(&cell.col_qa, mode)?;
        let step = weight * f64::from(cell.effect.value() - old.value());
        *deltas.entry((alt.id.clone(), cell.pair())).or_default() += step;
    }

    let optimal = model.theoretical_optimal().map(|a| a.id.clone());
    // Edits on a decision map can open a pair that no alternative had; it
    // starts from an all-zero baseline.
    let mut baseline = baseline;
    for (_, pair) in deltas.keys() {
        if baseline.result(*pair).is_none() {
            let zeros = model
                .alternatives
                .iter()
                .filter(|a| !a.is_theoretical_optimal)
                .map(|a| (a.id.clone(), 0.0))
                .collect();
            baseline.results.push(finish_pair(*pair, zeros, optimal.as_ref().map(|_| 0.0))?);
        }
    }
    baseline.results.sort_by_key(SisResult::pair);

    let mut patched_results = Vec::with_capacity(baseline.results.len());
    let mut pairs = Vec::with_capacity(baseline.results.len());
    for old in &baseline.results {
        let pair = old.pair();
        let delta_of = |alt: &str| deltas.get(&(alt.to_string(), pair)).copied().unwrap_or(0.0);
        let raw = old.raw.iter().map(|(alt, sis)| (alt.clone(), sis + delta_of(alt))).collect();
        let optimal_sis = match (&optimal, old.theoretical_optimal) {
            (Some(id), Some(sis)) => Some(sis + delta_of(id)),
            _ => None,
        };
        let new = finish_pair(pair, raw, optimal_sis)?;
        pairs.push(pair_delta(&baseline, old, &new, &delta_of));
        patched_results.push(new);
    }

    let mut patched_model = model.clone();
    for cell in &patch.overrides {
        let alt = patched_model
            .alternatives
            .iter_mut()
            .find(|a| a.id == cell.alternative)
            .expect("validated above");
        apply_override(alt, cell);
    }

    let changed_chains = chain_changes(model, &patched_model, patch)?;

    Ok(WhatIfOutcome {
        patched: ScoreReport { results: patched_results, ..baseline.clone() },
        report: WhatIfReport { pairs, changed_chains },
        model: patched_model,
        baseline,
    })
}

/// Effect currently in the targeted cell. Explicit matrices only know their
/// own cells; a decision map admits any cell between QAs of the pair's
/// dimensions, absent edges reading as 0.
fn current_effect(
    model: &AssessmentModel,
    alt: &Alternative,
    matrices: &[EffectMatrix],
    cell: &CellOverride,
) -> Option<Effect> {
    let explicit = matrices
        .iter()
        .find(|m| m.pair() == cell.pair())
        .and_then(|m| m.effect_between(&cell.row_qa, &cell.col_qa));
    if explicit.is_some() || alt.matrices.is_some() {
        return explicit;
    }
    let in_dimension = |qa: &str, d: Dimension| model.qa(qa).is_some_and(|q| q.dimension == d);
    (in_dimension(&cell.row_qa, cell.dim_from) && in_dimension(&cell.col_qa, cell.dim_to)).then_some(Effect::Neutral)
}

fn pair_delta(
    baseline: &ScoreReport,
    old: &SisResult,
    new: &SisResult,
    delta_of: &dyn Fn(&str) -> f64,
) -> PairDelta {
    let entries = baseline
        .alternatives
        .iter()
        .filter_map(|alt| {
            let old_raw = old.raw_for(alt)?;
            let new_raw = new.raw_for(alt)?;
            let old_percent = old.percent_for(alt);
            let new_percent = new.percent_for(alt);
            Some(AlternativeDelta {
                alternative: alt.id.clone(),
                old_raw,
                new_raw,
                delta_raw: delta_of(&alt.id),
                old_percent,
                new_percent,
                delta_percent: old_percent.zip(new_percent).map(|(o, n)| n - o),
            })
        })
        .collect();
    PairDelta { dim_from: old.dim_from, dim_to: old.dim_to, entries }
}

/// Writes one override into the alternative's own representation: the
/// matching matrix cell when it carries explicit matrices, else the decision
/// map edge (added, re-signed or removed).
fn apply_override(alt: &mut Alternative, cell: &CellOverride) {
    if let Some(matrices) = alt.matrices.as_mut() {
        let matrix = matrices.iter_mut().find(|m| m.pair() == cell.pair()).expect("validated pair");
        let (r, c) = matrix.position(&cell.row_qa, &cell.col_qa).expect("validated cell");
        matrix.set_effect(r, c, cell.effect);
        return;
    }
    let dmap = alt.dmap.as_mut().expect("alternatives without matrices carry a dmap");
    let existing = dmap.edges.iter().position(|e| e.from == cell.row_qa && e.to == cell.col_qa);
    match (existing, cell.effect) {
        (Some(idx), Effect::Neutral) => {
            dmap.edges.remove(idx);
        }
        (Some(idx), effect) => dmap.edges[idx].sign = sign_of(effect),
        (None, Effect::Neutral) => {}
        (None, effect) => {
            for qa in [&cell.row_qa, &cell.col_qa] {
                if dmap.node(qa).is_none() {
                    dmap.nodes.push(DmapNode { qa: qa.clone(), dimension: None, impact_level: None });
                }
            }
            dmap.edges.push(DmapEdge {
                from: cell.row_qa.clone(),
                to: cell.col_qa.clone(),
                sign: sign_of(effect),
                impact_level: None,
                rationale: None,
            });
        }
    }
}

fn sign_of(effect: Effect) -> Sign {
    if effect == Effect::Positive {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

fn chain_changes(
    before: &AssessmentModel,
    after: &AssessmentModel,
    patch: &WhatIfPatch,
) -> Result<Vec<ChangedChain>, ModelError> {
    let touched: BTreeSet<&str> = patch.overrides.iter().map(|o| o.alternative.as_str()).collect();
    let mut out = Vec::new();
    for alt in before.alternatives.iter().filter(|a| touched.contains(a.id.as_str())) {
        let new_alt = after.alternative(&alt.id).expect("same alternatives");
        let old: Vec<SynergyChain> =
            find_synergy_chains(&alt.effective_dmap(before)?, before, WHATIF_CHAIN_MIN_LENGTH);
        let new: Vec<SynergyChain> =
            find_synergy_chains(&new_alt.effective_dmap(after)?, after, WHATIF_CHAIN_MIN_LENGTH);
        let old_set: HashSet<&Vec<String>> = old.iter().map(|c| &c.path).collect();
        let new_set: HashSet<&Vec<String>> = new.iter().map(|c| &c.path).collect();
        for chain in new.iter().filter(|c| !old_set.contains(&c.path)) {
            out.push(ChangedChain { alternative: alt.id.clone(), change: ChainChange::Created, chain: chain.clone() });
        }
        for chain in old.iter().filter(|c| !new_set.contains(&c.path)) {
            out.push(ChangedChain { alternative: alt.id.clone(), change: ChainChange::Broken, chain: chain.clone() });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_is_last_write_wins() {
        let mut patch = WhatIfPatch::default();
        let cell = CellOverride {
            alternative: "a".into(),
            dim_from: Dimension::T,
            dim_to: Dimension::Ec,
            row_qa: "x".into(),
            col_qa: "y".into(),
            effect: Effect::Positive,
        };
        patch.merge(cell.clone());
        patch.merge(CellOverride { effect: Effect::Negative, ..cell.clone() });
        assert_eq!(patch.overrides.len(), 1);
        assert_eq!(patch.overrides[0].effect, Effect::Negative);
        patch.merge(CellOverride { col_qa: "z".into(), ..cell });
        assert_eq!(patch.overrides.len(), 2);
    }

    #[test]
    fn patch_file_format() {
        let json = r#"{"overrides": [{"alternative": "containerization", "dim_from": "T", "dim_to": "Ec",
            "row_qa": "latency", "col_qa": "cost_efficiency", "effect": 0}]}"#;
        let patch: WhatIfPatch = serde_json::from_str(json).unwrap();
        assert_eq!(patch.overrides[0].effect, Effect::Neutral);
        assert!(serde_json::from_str::<WhatIfPatch>(&json.replace("\"effect\": 0", "\"effect\": 3"))
            .is_err());
        assert!(serde_json::from_str::<WhatIfPatch>("{}").unwrap().is_empty());
    }
}
