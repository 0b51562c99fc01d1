use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::{
    AssessmentModel, DecisionMap, Diagnostic, DiagnosticCode as Code, Dimension, EffectMatrix,
    MAX_ID_LEN, SCHEMA_VERSION,
};

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Checks every cross reference and invariant of a parsed model.
///
/// Returns errors and warnings in document order; an empty list means the
/// model is clean.
pub fn validate_model(model: &AssessmentModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    if model.schema_version != SCHEMA_VERSION {
        out.push(Diagnostic::error(
            Code::SchemaVersion,
            "schema_version",
            format!("unsupported schema version '{}' (expected '{SCHEMA_VERSION}')", model.schema_version),
        ));
    }

    check_weights(model, &mut out);

    let qa_dims = check_qas(model, &mut out);
    let scenario_ids = check_unique_ids(
        model.scenarios.iter().map(|s| s.id.as_str()),
        "scenarios",
        &mut out,
    );
    check_utility_matrix(model, &qa_dims, &scenario_ids, &mut out);

    if model.alternatives.is_empty() {
        out.push(Diagnostic::error(Code::NoAlternatives, "alternatives", "no alternatives"));
    }
    check_unique_ids(model.alternatives.iter().map(|a| a.id.as_str()), "alternatives", &mut out);

    let optimal: Vec<&str> = model
        .alternatives
        .iter()
        .filter(|a| a.is_theoretical_optimal)
        .map(|a| a.id.as_str())
        .collect();
    if optimal.len() > 1 {
        out.push(Diagnostic::error(
            Code::Invariant,
            "alternatives",
            format!("more than one theoretical optimal: {}", optimal.join(", ")),
        ));
    }

    for (i, alt) in model.alternatives.iter().enumerate() {
        let path = format!("alternatives[{i}]");
        if alt.dmap.is_none() && alt.matrices.is_none() {
            out.push(Diagnostic::error(
                Code::Invariant,
                path.clone(),
                format!("alternative '{}' has neither dmap nor matrices", alt.id),
            ));
        }
        if let Some(dmap) = &alt.dmap {
            check_dmap(dmap, &qa_dims, &format!("{path}.dmap"), &mut out);
        }
        if let Some(matrices) = &alt.matrices {
            let mut pairs = BTreeSet::new();
            for (m, matrix) in matrices.iter().enumerate() {
                let mpath = format!("{path}.matrices[{m}]");
                if !pairs.insert(matrix.pair()) {
                    out.push(Diagnostic::error(
                        Code::DuplicateId,
                        mpath.clone(),
                        format!("duplicate matrix for pair {}", matrix.pair()),
                    ));
                }
                check_matrix(matrix, &qa_dims, &mpath, &mut out);
            }
        }
    }

    out
}

fn check_weights(model: &AssessmentModel, out: &mut Vec<Diagnostic>) {
    let w = &model.weights;
    for (name, value) in [("importance_weight", w.importance_weight), ("risk_weight", w.risk_weight)] {
        if !(0.0..=1.0).contains(&value) {
            out.push(Diagnostic::error(
                Code::OutOfRange,
                format!("weights.{name}"),
                format!("weight {value} is outside [0, 1]"),
            ));
        }
    }
    let sum = w.importance_weight + w.risk_weight;
    if sum.is_finite() && (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        out.push(Diagnostic::warning(Code::WeightSum, "weights", format!("weights sum to {sum}")));
    }
}

fn check_id(id: &str, path: &str, out: &mut Vec<Diagnostic>) {
    if id.is_empty() {
        out.push(Diagnostic::error(Code::InvalidId, path, "id is empty"));
    } else if id.chars().count() > MAX_ID_LEN {
        out.push(Diagnostic::error(
            Code::InvalidId,
            path,
            format!("id is longer than {MAX_ID_LEN} characters"),
        ));
    }
}

fn check_unique_ids<'a>(
    ids: impl Iterator<Item = &'a str>,
    collection: &str,
    out: &mut Vec<Diagnostic>,
) -> HashSet<&'a str> {
    let mut seen = HashSet::new();
    for (i, id) in ids.enumerate() {
        let path = format!("{collection}[{i}].id");
        check_id(id, &path, out);
        if !seen.insert(id) {
            out.push(Diagnostic::error(Code::DuplicateId, path, format!("duplicate id '{id}'")));
        }
    }
    seen
}

fn check_qas<'a>(model: &'a AssessmentModel, out: &mut Vec<Diagnostic>) -> BTreeMap<&'a str, Dimension> {
    check_unique_ids(model.quality_attributes.iter().map(|q| q.id.as_str()), "quality_attributes", out);
    for (i, qa) in model.quality_attributes.iter().enumerate() {
        if let Some(p) = qa.priority_override {
            if !p.is_finite() {
                out.push(Diagnostic::error(
                    Code::OutOfRange,
                    format!("quality_attributes[{i}].priority_override"),
                    "priority override must be a finite number",
                ));
            }
        }
    }
    model.dimension_index()
}

fn check_utility_matrix(
    model: &AssessmentModel,
    qas: &BTreeMap<&str, Dimension>,
    scenarios: &HashSet<&str>,
    out: &mut Vec<Diagnostic>,
) {
    let Some(um) = &model.utility_matrix else { return };
    for (i, qa) in um.rows.iter().enumerate() {
        if !qas.contains_key(qa.as_str()) {
            out.push(dangling(format!("utility_matrix.rows[{i}]"), "quality attribute", qa));
        }
    }
    for (i, s) in um.columns.iter().enumerate() {
        if !scenarios.contains(s.as_str()) {
            out.push(dangling(format!("utility_matrix.columns[{i}]"), "scenario", s));
        }
    }
    let mut seen = HashSet::new();
    for (i, cell) in um.cells.iter().enumerate() {
        let path = format!("utility_matrix.cells[{i}]");
        if !um.rows.contains(&cell.qa) {
            out.push(dangling(format!("{path}.qa"), "utility matrix row", &cell.qa));
        }
        if !um.columns.contains(&cell.scenario) {
            out.push(dangling(format!("{path}.scenario"), "utility matrix column", &cell.scenario));
        }
        if !seen.insert((cell.qa.as_str(), cell.scenario.as_str())) {
            out.push(Diagnostic::error(
                Code::DuplicateId,
                path,
                format!("duplicate cell ({}, {})", cell.qa, cell.scenario),
            ));
        }
    }
}

fn dangling(path: String, kind: &str, id: &str) -> Diagnostic {
    Diagnostic::error(Code::DanglingReference, path, format!("unknown {kind} '{id}'"))
}

fn check_dmap(
    dmap: &DecisionMap,
    qas: &BTreeMap<&str, Dimension>,
    path: &str,
    out: &mut Vec<Diagnostic>,
) {
    let mut nodes = HashSet::new();
    for (i, node) in dmap.nodes.iter().enumerate() {
        let npath = format!("{path}.nodes[{i}]");
        match qas.get(node.qa.as_str()) {
            None => out.push(dangling(format!("{npath}.qa"), "quality attribute", &node.qa)),
            Some(dim) => {
                if let Some(declared) = node.dimension {
                    if declared != *dim {
                        out.push(Diagnostic::error(
                            Code::Invariant,
                            format!("{npath}.dimension"),
                            format!("node '{}' declares dimension {declared} but the QA is {dim}", node.qa),
                        ));
                    }
                }
            }
        }
        if !nodes.insert(node.qa.as_str()) {
            out.push(Diagnostic::error(
                Code::DuplicateId,
                format!("{npath}.qa"),
                format!("duplicate node '{}'", node.qa),
            ));
        }
    }
    let mut edges = HashSet::new();
    for (i, edge) in dmap.edges.iter().enumerate() {
        let epath = format!("{path}.edges[{i}]");
        for (field, id) in [("from", &edge.from), ("to", &edge.to)] {
            if !nodes.contains(id.as_str()) {
                out.push(dangling(format!("{epath}.{field}"), "decision map node", id));
            }
        }
        if edge.from == edge.to {
            out.push(Diagnostic::error(
                Code::Invariant,
                epath.clone(),
                format!("self-loop on '{}'", edge.from),
            ));
        }
        if !edges.insert((edge.from.as_str(), edge.to.as_str())) {
            out.push(Diagnostic::error(
                Code::DuplicateId,
                epath,
                format!("duplicate edge {} -> {}", edge.from, edge.to),
            ));
        }
    }
}

fn check_matrix(
    matrix: &EffectMatrix,
    qas: &BTreeMap<&str, Dimension>,
    path: &str,
    out: &mut Vec<Diagnostic>,
) {
    let axes = [
        ("rows", &matrix.row_qas, matrix.dim_from),
        ("columns", &matrix.col_qas, matrix.dim_to),
    ];
    for (axis, ids, expected) in axes {
        let mut seen = HashSet::new();
        for (i, id) in ids.iter().enumerate() {
            let ipath = format!("{path}.{axis}[{i}]");
            match qas.get(id.as_str()) {
                None => out.push(dangling(ipath.clone(), "quality attribute", id)),
                Some(dim) if *dim != expected => out.push(Diagnostic::error(
                    Code::Invariant,
                    ipath.clone(),
                    format!("'{id}' belongs to {dim}, not {expected}"),
                )),
                Some(_) => {}
            }
            if !seen.insert(id.as_str()) {
                out.push(Diagnostic::error(Code::DuplicateId, ipath, format!("duplicate QA '{id}'")));
            }
        }
    }
    if matrix.dim_from == matrix.dim_to {
        for (r, row_qa) in matrix.row_qas.iter().enumerate() {
            if let Some(c) = matrix.col_qas.iter().position(|q| q == row_qa) {
                if matrix.effect(r, c).is_nonzero() {
                    out.push(Diagnostic::error(
                        Code::Invariant,
                        format!("{path}.effects[{r}][{c}]"),
                        format!("diagonal cell for '{row_qa}' must be 0"),
                    ));
                }
            }
        }
    }
}
