use std::collections::BTreeMap;

use super::{
    AssessmentModel, DecisionMap, DimensionPair, DmapEdge, DmapNode, Effect, EffectCell, EffectMatrix,
    ModelError, Sign,
};

/// Builds one effect matrix per ordered dimension pair that has at least one
/// edge in the decision map.
///
/// Rows and columns span every model QA of the respective dimension, in model
/// order. Absent edges are 0. Self-loops are ignored, so same-dimension
/// matrices always have a zero diagonal. Output is sorted in pair
/// presentation order.
pub fn derive_matrices(dmap: &DecisionMap, model: &AssessmentModel) -> Result<Vec<EffectMatrix>, ModelError> {
    let dims = model.dimension_index();
    let mut by_pair: BTreeMap<DimensionPair, Vec<&DmapEdge>> = BTreeMap::new();
    for edge in &dmap.edges {
        let from = *dims.get(edge.from.as_str()).ok_or_else(|| ModelError::UnknownQa(edge.from.clone()))?;
        let to = *dims.get(edge.to.as_str()).ok_or_else(|| ModelError::UnknownQa(edge.to.clone()))?;
        if edge.from == edge.to {
            continue;
        }
        by_pair.entry(DimensionPair::new(from, to)).or_default().push(edge);
    }

    let ids_in = |dim| model.qas_in(dim).map(|q| q.id.clone()).collect::<Vec<_>>();
    let mut out = Vec::with_capacity(by_pair.len());
    for (pair, edges) in by_pair {
        let mut matrix = EffectMatrix::zeros(pair.from, pair.to, ids_in(pair.from), ids_in(pair.to));
        for edge in edges {
            let (r, c) = matrix
                .position(&edge.from, &edge.to)
                .expect("edge endpoints were resolved against the model");
            let fallback = dmap.node(&edge.to).and_then(|n| n.impact_level);
            matrix.cells[r][c] = EffectCell {
                effect: edge.sign.into(),
                impact_level: edge.impact_level.or(fallback),
                rationale: edge.rationale.clone(),
            };
        }
        out.push(matrix);
    }
    Ok(out)
}

/// Inverse of [`derive_matrices`]: one edge per nonzero cell.
pub fn dmap_from_matrices(matrices: &[EffectMatrix], model: &AssessmentModel) -> DecisionMap {
    let mut sorted: Vec<&EffectMatrix> = matrices.iter().collect();
    sorted.sort_by_key(|m| m.pair());

    let mut edges = Vec::new();
    let mut used = std::collections::BTreeSet::new();
    for matrix in sorted {
        for (r, c, cell) in matrix.nonzero_cells() {
            let (from, to) = (&matrix.row_qas[r], &matrix.col_qas[c]);
            used.insert(from.as_str());
            used.insert(to.as_str());
            edges.push(DmapEdge {
                from: from.clone(),
                to: to.clone(),
                sign: if cell.effect == Effect::Positive { Sign::Positive } else { Sign::Negative },
                impact_level: cell.impact_level,
                rationale: cell.rationale.clone(),
            });
        }
    }
    let nodes = model
        .quality_attributes
        .iter()
        .filter(|q| used.contains(q.id.as_str()))
        .map(|q| DmapNode { qa: q.id.clone(), dimension: Some(q.dimension), impact_level: None })
        .collect();
    DecisionMap { nodes, edges }
}
