#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use itertools::Itertools;
use proptest::prelude::*;
use siskit_core::analysis::CellOverride;
use siskit_core::model::{
    load_model, Alternative, AssessmentModel, DecisionMap, Dimension, DmapEdge, DmapNode, Effect,
    EffectCell, EffectMatrix, Level, QualityAttribute, Sign, WeightConfig,
};
use siskit_core::scoring::{normalize_priorities, PriorityMode, PrioritySet};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn fixture(name: &str) -> AssessmentModel {
    load_model(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn effect(v: i64) -> Effect {
    Effect::try_from(v).unwrap()
}

/// Independent SIS accumulator: Σ_i P_i·(row sum) + Σ_j P_j·(column sum).
/// Deliberately a different algebraic route from the cell-by-cell sum.
pub fn oracle_sis(rows: &[f64], cols: &[f64], effects: &[Vec<i64>]) -> f64 {
    let row_part: f64 = rows
        .iter()
        .zip(effects)
        .map(|(p, row)| p * row.iter().sum::<i64>() as f64)
        .sum();
    let col_part: f64 = cols
        .iter()
        .enumerate()
        .map(|(j, p)| p * effects.iter().map(|row| row[j]).sum::<i64>() as f64)
        .sum();
    row_part + col_part
}

/// A matrix with per-axis priorities, ready for SIS checks.
#[derive(Debug, Clone)]
pub struct Instance {
    pub row_priorities: Vec<f64>,
    pub col_priorities: Vec<f64>,
    pub effects: Vec<Vec<i64>>,
}

impl Instance {
    pub fn matrix(&self, dim_from: Dimension) -> EffectMatrix {
        EffectMatrix {
            dim_from,
            dim_to: Dimension::Ec,
            row_qas: (0..self.row_priorities.len()).map(|i| format!("r{i}")).collect(),
            col_qas: (0..self.col_priorities.len()).map(|j| format!("c{j}")).collect(),
            cells: self
                .effects
                .iter()
                .map(|row| row.iter().map(|e| EffectCell::new(effect(*e))).collect())
                .collect(),
        }
    }

    /// Priorities keyed by the generated ids; the given values are used as
    /// both raw and (after min-max) normalized inputs.
    pub fn priorities(&self) -> PrioritySet {
        let entries = self
            .row_priorities
            .iter()
            .enumerate()
            .map(|(i, p)| (format!("r{i}"), *p))
            .chain(self.col_priorities.iter().enumerate().map(|(j, p)| (format!("c{j}"), *p)));
        normalize_priorities(entries).unwrap()
    }

    pub fn axis_values(&self, set: &PrioritySet, mode: PriorityMode) -> (Vec<f64>, Vec<f64>) {
        let rows = (0..self.row_priorities.len()).map(|i| set.value(&format!("r{i}"), mode).unwrap()).collect();
        let cols = (0..self.col_priorities.len()).map(|j| set.value(&format!("c{j}"), mode).unwrap()).collect();
        (rows, cols)
    }
}

pub fn instance_strategy() -> impl Strategy<Value = Instance> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(n, m)| {
        (
            proptest::collection::vec(0.0f64..5.0, n),
            proptest::collection::vec(0.0f64..5.0, m),
            proptest::collection::vec(proptest::collection::vec(-1i64..=1, m), n),
        )
            .prop_map(|(row_priorities, col_priorities, effects)| Instance { row_priorities, col_priorities, effects })
    })
}

/// Random signed digraph on up to 8 nodes and 16 edges, no self-loops, no
/// duplicate (from, to).
pub fn graph_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize, bool)>)> {
    (2usize..=8).prop_flat_map(|n| {
        let all: Vec<(usize, usize)> = (0..n).cartesian_product(0..n).filter(|(a, b)| a != b).collect();
        let max = all.len().min(16);
        (Just(n), proptest::sample::subsequence(all, 0..=max), proptest::collection::vec(any::<bool>(), 16))
            .prop_map(|(n, edges, signs)| {
                (n, edges.into_iter().zip(signs).map(|((a, b), s)| (a, b, s)).collect())
            })
    })
}

pub fn node_id(i: usize) -> String {
    format!("n{i}")
}

pub fn graph_model(n: usize) -> AssessmentModel {
    let dims = [Dimension::T, Dimension::S, Dimension::Ec, Dimension::En];
    model_from_qas((0..n).map(|i| (node_id(i), dims[i % 4], 1, 1)).collect())
}

pub fn graph_dmap(n: usize, edges: &[(usize, usize, bool)]) -> DecisionMap {
    DecisionMap {
        nodes: (0..n).map(|i| DmapNode { qa: node_id(i), dimension: None, impact_level: None }).collect(),
        edges: edges
            .iter()
            .map(|(a, b, pos)| DmapEdge {
                from: node_id(*a),
                to: node_id(*b),
                sign: if *pos { Sign::Positive } else { Sign::Negative },
                impact_level: None,
                rationale: None,
            })
            .collect(),
    }
}

/// Exhaustive simple-path oracle: every ordered sequence of distinct nodes
/// whose consecutive hops are all positive edges.
pub fn oracle_chains(n: usize, edges: &[(usize, usize, bool)], min_length: usize) -> BTreeSet<Vec<String>> {
    let positive: BTreeSet<(usize, usize)> = edges.iter().filter(|e| e.2).map(|e| (e.0, e.1)).collect();
    let mut out = BTreeSet::new();
    for k in (min_length + 1).max(2)..=n {
        for seq in (0..n).permutations(k) {
            if seq.windows(2).all(|w| positive.contains(&(w[0], w[1]))) {
                out.insert(seq.iter().map(|i| node_id(*i)).collect());
            }
        }
    }
    out
}

pub fn model_from_qas(qas: Vec<(String, Dimension, i64, i64)>) -> AssessmentModel {
    AssessmentModel {
        schema_version: "1".into(),
        weights: WeightConfig::default(),
        quality_attributes: qas
            .into_iter()
            .map(|(id, dimension, i, r)| QualityAttribute {
                name: id.clone(),
                id,
                definition: String::new(),
                dimension,
                importance: Level::new(i).unwrap(),
                risk: Level::new(r).unwrap(),
                priority_override: None,
            })
            .collect(),
        scenarios: vec![],
        utility_matrix: None,
        alternatives: vec![],
    }
}

/// Random scoreable model: two ordinary alternatives (one dmap-backed, one
/// matrix-backed) and an all-positive theoretical optimal, which dominates
/// every reachable effect assignment.
#[derive(Debug, Clone)]
pub struct RandomModel {
    pub model: AssessmentModel,
}

pub fn random_model_strategy() -> impl Strategy<Value = RandomModel> {
    let dim = prop_oneof![Just(Dimension::T), Just(Dimension::Ec), Just(Dimension::En), Just(Dimension::S)];
    proptest::collection::vec((dim, 1i64..=3, 1i64..=3), 3..=7).prop_flat_map(|qas| {
        let n = qas.len();
        let cells = n * n;
        (
            Just(qas),
            proptest::collection::vec(-1i64..=1, cells),
            proptest::collection::vec(-1i64..=1, cells),
        )
            .prop_map(move |(qas, a, b)| {
                let mut model =
                    model_from_qas(qas.iter().enumerate().map(|(i, (d, im, r))| (format!("q{i}"), *d, *im, *r)).collect());
                let dmap = dense_to_dmap(n, &a);
                let dense_b = dense_to_dmap(n, &b);
                let b_matrices = siskit_core::model::derive_matrices(&dense_b, &model).unwrap();
                let all_positive: Vec<i64> = vec![1; cells];
                let optimal = siskit_core::model::derive_matrices(&dense_to_dmap(n, &all_positive), &model).unwrap();
                model.alternatives = vec![
                    Alternative {
                        id: "alpha".into(),
                        name: "Alpha".into(),
                        description: String::new(),
                        is_theoretical_optimal: false,
                        dmap: Some(dmap),
                        matrices: None,
                    },
                    Alternative {
                        id: "beta".into(),
                        name: "Beta".into(),
                        description: String::new(),
                        is_theoretical_optimal: false,
                        dmap: None,
                        matrices: Some(pad_to_optimal(b_matrices, &optimal)),
                    },
                    Alternative {
                        id: "optimal".into(),
                        name: "Optimal".into(),
                        description: String::new(),
                        is_theoretical_optimal: true,
                        dmap: None,
                        matrices: Some(optimal),
                    },
                ];
                RandomModel { model }
            })
    })
}

fn dense_to_dmap(n: usize, effects: &[i64]) -> DecisionMap {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let e = effects[i * n + j];
            if i != j && e != 0 {
                edges.push(DmapEdge {
                    from: format!("q{i}"),
                    to: format!("q{j}"),
                    sign: if e > 0 { Sign::Positive } else { Sign::Negative },
                    impact_level: None,
                    rationale: None,
                });
            }
        }
    }
    DecisionMap {
        nodes: (0..n).map(|i| DmapNode { qa: format!("q{i}"), dimension: None, impact_level: None }).collect(),
        edges,
    }
}

/// Gives the matrix-backed alternative an all-zero matrix for every pair the
/// optimal has, so any of its cells can be patched.
fn pad_to_optimal(mut matrices: Vec<EffectMatrix>, optimal: &[EffectMatrix]) -> Vec<EffectMatrix> {
    for o in optimal {
        if !matrices.iter().any(|m| m.pair() == o.pair()) {
            matrices.push(EffectMatrix::zeros(o.dim_from, o.dim_to, o.row_qas.clone(), o.col_qas.clone()));
        }
    }
    matrices
}

/// Every patchable (non-diagonal) cell of the ordinary alternatives.
pub fn patchable_cells(model: &AssessmentModel) -> Vec<(String, EffectMatrix, usize, usize)> {
    let mut out = Vec::new();
    for alt in model.alternatives.iter().filter(|a| !a.is_theoretical_optimal) {
        for m in alt.effective_matrices(model).unwrap() {
            for r in 0..m.row_qas.len() {
                for c in 0..m.col_qas.len() {
                    if m.dim_from == m.dim_to && m.row_qas[r] == m.col_qas[c] {
                        continue;
                    }
                    out.push((alt.id.clone(), m.clone(), r, c));
                }
            }
        }
    }
    out
}

pub fn override_for(alt: &str, m: &EffectMatrix, r: usize, c: usize, e: Effect) -> CellOverride {
    CellOverride {
        alternative: alt.to_string(),
        dim_from: m.dim_from,
        dim_to: m.dim_to,
        row_qa: m.row_qas[r].clone(),
        col_qa: m.col_qas[c].clone(),
        effect: e,
    }
}

pub fn raw_by_pair(report: &siskit_core::ScoreReport) -> BTreeMap<(String, String), f64> {
    let mut out = BTreeMap::new();
    for r in &report.results {
        for alt in &report.alternatives {
            if let Some(v) = r.raw_for(alt) {
                out.insert((r.pair().to_string(), alt.id.clone()), v);
            }
        }
    }
    out
}
