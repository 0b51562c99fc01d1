use std::cmp::Reverse;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{Alternative, AssessmentModel, Dimension, Effect, EffectMatrix, ImpactLevel, ModelError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TradeoffScope {
    WithinDimension,
    AcrossDimensions,
    #[default]
    All,
}

impl TradeoffScope {
    fn admits(self, same_dimension: bool) -> bool {
        match self {
            TradeoffScope::WithinDimension => same_dimension,
            TradeoffScope::AcrossDimensions => !same_dimension,
            TradeoffScope::All => true,
        }
    }
}

/// One negative effect of `from_qa` on `to_qa`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradeoffRecord {
    pub from_qa: String,
    pub to_qa: String,
    pub dim_from: Dimension,
    pub dim_to: Dimension,
    pub same_dimension: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub impact_level: Option<ImpactLevel>,
}

pub fn find_tradeoffs(
    alternative: &Alternative,
    model: &AssessmentModel,
    scope: TradeoffScope,
) -> Result<Vec<TradeoffRecord>, ModelError> {
    Ok(tradeoffs_in(&alternative.effective_matrices(model)?, scope))
}

/// Negative cells of `matrices` in pair, row, column order.
pub fn tradeoffs_in(matrices: &[EffectMatrix], scope: TradeoffScope) -> Vec<TradeoffRecord> {
    let mut out = Vec::new();
    for m in matrices {
        let same = m.dim_from == m.dim_to;
        if !scope.admits(same) {
            continue;
        }
        for (r, c, cell) in m.nonzero_cells().filter(|(_, _, cell)| cell.effect == Effect::Negative) {
            out.push(TradeoffRecord {
                from_qa: m.row_qas[r].clone(),
                to_qa: m.col_qas[c].clone(),
                dim_from: m.dim_from,
                dim_to: m.dim_to,
                same_dimension: same,
                impact_level: cell.impact_level,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffectedCount {
    pub qa: String,
    pub positive_in: usize,
    pub negative_in: usize,
}

/// Incoming effect counts per QA, ranked both ways. Ties break by QA id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffectedRanking {
    pub by_negative: Vec<AffectedCount>,
    pub by_positive: Vec<AffectedCount>,
}

impl AffectedRanking {
    pub fn most_negative(&self) -> Option<&AffectedCount> {
        self.by_negative.first().filter(|c| c.negative_in > 0)
    }

    pub fn most_positive(&self) -> Option<&AffectedCount> {
        self.by_positive.first().filter(|c| c.positive_in > 0)
    }

    pub fn count(&self, qa: &str) -> Option<&AffectedCount> {
        self.by_negative.iter().find(|c| c.qa == qa)
    }
}

pub fn most_affected_qas(alternative: &Alternative, model: &AssessmentModel) -> Result<AffectedRanking, ModelError> {
    Ok(rank_affected(&alternative.effective_matrices(model)?, model))
}

pub fn rank_affected(matrices: &[EffectMatrix], model: &AssessmentModel) -> AffectedRanking {
    let mut counts: BTreeMap<&str, (usize, usize)> =
        model.quality_attributes.iter().map(|q| (q.id.as_str(), (0, 0))).collect();
    for m in matrices {
        for (_, c, cell) in m.nonzero_cells() {
            let entry = counts.entry(m.col_qas[c].as_str()).or_default();
            match cell.effect {
                Effect::Positive => entry.0 += 1,
                Effect::Negative => entry.1 += 1,
                Effect::Neutral => {}
            }
        }
    }
    // BTreeMap iteration is already id-ordered; stable sorts keep that as the tie-break.
    let all: Vec<AffectedCount> = counts
        .into_iter()
        .map(|(qa, (positive_in, negative_in))| AffectedCount { qa: qa.to_string(), positive_in, negative_in })
        .collect();
    let mut by_negative = all.clone();
    by_negative.sort_by_key(|c| Reverse(c.negative_in));
    let mut by_positive = all;
    by_positive.sort_by_key(|c| Reverse(c.positive_in));
    AffectedRanking { by_negative, by_positive }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DimensionPair, EffectCell, Level, QualityAttribute, WeightConfig};

    fn model(ids: &[&str]) -> AssessmentModel {
        AssessmentModel {
            schema_version: "1".into(),
            weights: WeightConfig::default(),
            quality_attributes: ids
                .iter()
                .map(|id| QualityAttribute {
                    id: id.to_string(),
                    name: id.to_string(),
                    definition: String::new(),
                    dimension: Dimension::T,
                    importance: Level::LOW,
                    risk: Level::LOW,
                    priority_override: None,
                })
                .collect(),
            scenarios: vec![],
            utility_matrix: None,
            alternatives: vec![],
        }
    }

    fn matrix(pair: &str, rows: &[&str], cols: &[&str], effects: &[&[i64]]) -> EffectMatrix {
        let pair: DimensionPair = pair.parse().unwrap();
        EffectMatrix {
            dim_from: pair.from,
            dim_to: pair.to,
            row_qas: rows.iter().map(|s| s.to_string()).collect(),
            col_qas: cols.iter().map(|s| s.to_string()).collect(),
            cells: effects
                .iter()
                .map(|row| row.iter().map(|e| EffectCell::new(Effect::try_from(*e).unwrap())).collect())
                .collect(),
        }
    }

    #[test]
    fn scope_filter() {
        let ms = [
            matrix("T-T", &["a", "b"], &["a", "b"], &[&[0, -1], &[1, 0]]),
            matrix("T-En", &["a"], &["r"], &[&[-1]]),
        ];
        let within = tradeoffs_in(&ms, TradeoffScope::WithinDimension);
        assert_eq!(within.len(), 1);
        assert!(within[0].same_dimension);
        let across = tradeoffs_in(&ms, TradeoffScope::AcrossDimensions);
        assert_eq!((across[0].from_qa.as_str(), across[0].to_qa.as_str()), ("a", "r"));
        assert_eq!(tradeoffs_in(&ms, TradeoffScope::All).len(), 2);
    }

    #[test]
    fn all_positive_has_no_tradeoffs() {
        let ms = [matrix("T-Ec", &["a", "b"], &["c"], &[&[1], &[1]])];
        assert!(tradeoffs_in(&ms, TradeoffScope::All).is_empty());
    }

    #[test]
    fn equal_counts_take_no_exclusive_top_slot() {
        let m = model(&["a", "b", "c", "monetary_costs", "resource_utilization", "wellbeing"]);
        let ms = [matrix(
            "T-Ec",
            &["a", "b", "c"],
            &["monetary_costs", "resource_utilization", "wellbeing"],
            &[&[1, -1, 1], &[1, -1, 1], &[-1, -1, 1]],
        )];
        let mut ms = ms.to_vec();
        ms.push(matrix("T-T", &["a"], &["monetary_costs"], &[&[-1]]));
        let ranking = rank_affected(&ms, &m);
        let mc = ranking.count("monetary_costs").unwrap();
        assert_eq!((mc.positive_in, mc.negative_in), (2, 2));
        assert_eq!(ranking.most_negative().unwrap().qa, "resource_utilization");
        assert_eq!(ranking.most_positive().unwrap().qa, "wellbeing");
    }

    #[test]
    fn no_matrices_all_zero() {
        let ranking = rank_affected(&[], &model(&["b", "a"]));
        assert!(ranking.by_negative.iter().all(|c| c.negative_in == 0 && c.positive_in == 0));
        assert_eq!(ranking.by_negative[0].qa, "a");
        assert!(ranking.most_negative().is_none());
    }
}
