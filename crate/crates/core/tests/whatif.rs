mod common;

use common::*;
use proptest::prelude::*;
use proptest::sample::Index;
use siskit_core::analysis::{apply_whatif, ChainChange, CellOverride, WhatIfError, WhatIfOptions, WhatIfPatch};
use siskit_core::model::Effect;
use siskit_core::rounding::format_fixed;
use siskit_core::scoring::{resolve_priorities, PriorityMode, ScoreOptions};

fn raw_options() -> WhatIfOptions {
    WhatIfOptions {
        score: ScoreOptions { priority_mode: PriorityMode::Raw, ..ScoreOptions::default() },
        ..WhatIfOptions::default()
    }
}

fn cell(alt: &str, pair: &str, row: &str, col: &str, effect: Effect) -> CellOverride {
    let (from, to) = pair.split_once('-').unwrap();
    CellOverride {
        alternative: alt.into(),
        dim_from: from.parse().unwrap(),
        dim_to: to.parse().unwrap(),
        row_qa: row.into(),
        col_qa: col.into(),
        effect,
    }
}

fn patch(cells: Vec<CellOverride>) -> WhatIfPatch {
    WhatIfPatch { overrides: cells }
}

#[test]
fn latency_cost_edit_moves_containerization_to_58_percent() {
    let model = fixture("cloud_example.json");
    let p = patch(vec![cell("containerization", "T-Ec", "latency", "cost_efficiency", Effect::Neutral)]);
    let outcome = apply_whatif(&model, &p, &raw_options()).unwrap();
    let entry = outcome.report.pair("T-Ec".parse().unwrap()).unwrap().entry("containerization").unwrap().clone();
    assert_eq!((entry.old_raw, entry.new_raw, entry.delta_raw), (11.0, 18.0, 7.0));
    assert_eq!(format_fixed(entry.old_percent.unwrap(), 2), "35.48");
    assert_eq!(format_fixed(entry.new_percent.unwrap(), 2), "58.06");
}

#[test]
fn serverless_portability_flip_gains_six() {
    let model = fixture("cloud_example.json");
    let p = patch(vec![cell("serverless", "T-Ec", "portability", "vendor_independence", Effect::Positive)]);
    let outcome = apply_whatif(&model, &p, &raw_options()).unwrap();
    let entry = outcome.report.pairs[0].entry("serverless").unwrap().clone();
    // (2 + 1) · (+1 − −1)
    assert_eq!(entry.delta_raw, 6.0);
    assert_eq!(entry.new_raw, 6.0);
    // Still the minimum at 6 < 11.
    assert_eq!(entry.new_percent, Some(0.0));
    let c = outcome.report.pairs[0].entry("containerization").unwrap();
    assert!((c.new_percent.unwrap() - (11.0 - 6.0) / (31.0 - 6.0) * 100.0).abs() < 1e-9);
    assert_eq!(c.delta_raw, 0.0);
}

#[test]
fn single_cell_delta_is_local_to_its_pair() {
    let model = fixture("case_study.json");
    let priorities = resolve_priorities(&model, None).unwrap();
    let weight = priorities.get("adaptability").unwrap().normalized + priorities.get("resource_utilization").unwrap().normalized;
    assert!((weight - 1.1).abs() < 1e-12);
    let p = patch(vec![cell("multi_model", "T-En", "adaptability", "resource_utilization", Effect::Neutral)]);
    let outcome = apply_whatif(&model, &p, &WhatIfOptions::default()).unwrap();
    for pair in &outcome.report.pairs {
        for e in &pair.entries {
            let expected = if pair.pair().to_string() == "T-En" && e.alternative == "multi_model" { 1.1 } else { 0.0 };
            assert!((e.delta_raw - expected).abs() < 1e-12, "{} {}: {}", pair.pair(), e.alternative, e.delta_raw);
        }
    }
}

#[test]
fn empty_patch_reproduces_the_baseline() {
    let model = fixture("case_study.json");
    let outcome = apply_whatif(&model, &WhatIfPatch::default(), &WhatIfOptions::default()).unwrap();
    assert_eq!(outcome.patched, outcome.baseline);
    assert_eq!(outcome.model, model);
    assert!(outcome.report.changed_chains.is_empty());
    assert!(outcome.report.pairs.iter().flat_map(|p| &p.entries).all(|e| e.delta_raw == 0.0 && e.delta_percent == Some(0.0)));
}

#[test]
fn optimal_is_read_only_unless_allowed() {
    let model = fixture("cloud_example.json");
    let p = patch(vec![cell("theoretical_optimal", "T-Ec", "latency", "vendor_independence", Effect::Positive)]);
    assert!(matches!(apply_whatif(&model, &p, &raw_options()), Err(WhatIfError::OptimalReadOnly(_))));
    let allowed = WhatIfOptions { allow_optimal_edit: true, ..raw_options() };
    let outcome = apply_whatif(&model, &p, &allowed).unwrap();
    let t_ec = outcome.patched.result("T-Ec".parse().unwrap()).unwrap();
    assert_eq!(t_ec.theoretical_optimal, Some(35.0));
}

#[test]
fn lowering_the_optimal_below_an_alternative_fails() {
    let model = fixture("cloud_example.json");
    let cells = ["scalability", "latency", "portability"]
        .iter()
        .flat_map(|r| ["cost_efficiency", "vendor_independence"].map(|c| cell("theoretical_optimal", "T-Ec", r, c, Effect::Negative)))
        .collect();
    let allowed = WhatIfOptions { allow_optimal_edit: true, ..raw_options() };
    let err = apply_whatif(&model, &patch(cells), &allowed).unwrap_err();
    assert!(err.to_string().contains("not optimal for T-Ec"), "{err}");
}

#[test]
fn invalid_overrides_are_rejected() {
    let model = fixture("case_study.json");
    let opts = WhatIfOptions::default();
    let unknown = patch(vec![cell("multi_model", "T-T", "resource_utilization", "traceability", Effect::Positive)]);
    assert!(matches!(apply_whatif(&model, &unknown, &opts), Err(WhatIfError::UnknownCell(_))));
    let ghost = patch(vec![cell("multi_model", "T-T", "ghost", "traceability", Effect::Positive)]);
    assert!(matches!(apply_whatif(&model, &ghost, &opts), Err(WhatIfError::UnknownCell(_))));
    let nobody = patch(vec![cell("nobody", "T-T", "adaptability", "traceability", Effect::Positive)]);
    assert!(matches!(apply_whatif(&model, &nobody, &opts), Err(WhatIfError::UnknownAlternative(_))));
    let diagonal = patch(vec![cell("multi_model", "T-T", "traceability", "traceability", Effect::Positive)]);
    assert!(matches!(apply_whatif(&model, &diagonal, &opts), Err(WhatIfError::DiagonalCell(_))));
    let c = cell("multi_model", "T-T", "adaptability", "traceability", Effect::Positive);
    let twice = patch(vec![c.clone(), c]);
    assert!(matches!(apply_whatif(&model, &twice, &opts), Err(WhatIfError::DuplicateOverride(_))));
}

#[test]
fn removing_a_link_breaks_the_cascade() {
    let model = fixture("case_study.json");
    let p = patch(vec![cell("multi_model", "S-Ec", "transparency", "stake_of_beneficiary", Effect::Neutral)]);
    let outcome = apply_whatif(&model, &p, &WhatIfOptions::default()).unwrap();
    let broken: Vec<String> = outcome
        .report
        .changed_chains
        .iter()
        .filter(|c| c.change == ChainChange::Broken)
        .map(|c| c.chain.path.join(">"))
        .collect();
    assert!(broken.contains(&"traceability>transparency>stake_of_beneficiary>monetary_costs".to_string()), "{broken:?}");
    assert!(outcome.report.changed_chains.iter().all(|c| c.change == ChainChange::Broken));
    assert!(outcome.model.alternative("multi_model").unwrap().dmap.as_ref().unwrap().edge("transparency", "stake_of_beneficiary").is_none());
    // The caller's model is untouched.
    assert!(model.alternative("multi_model").unwrap().dmap.as_ref().unwrap().edge("transparency", "stake_of_beneficiary").is_some());
}

#[test]
fn new_edge_lands_in_the_decision_map() {
    let model = fixture("case_study.json");
    let p = patch(vec![cell("single_model", "T-S", "variability", "transparency", Effect::Positive)]);
    let outcome = apply_whatif(&model, &p, &WhatIfOptions::default()).unwrap();
    let dmap = outcome.model.alternative("single_model").unwrap().dmap.clone().unwrap();
    assert!(dmap.edge("variability", "transparency").is_some());
    let t_s = outcome.report.pair("T-S".parse().unwrap()).unwrap();
    assert!((t_s.entry("single_model").unwrap().delta_raw - 1.1).abs() < 1e-12);
}

#[test]
fn restoring_a_link_recreates_the_cascade() {
    let model = fixture("case_study.json");
    let remove = cell("multi_model", "S-Ec", "transparency", "stake_of_beneficiary", Effect::Neutral);
    let removed = apply_whatif(&model, &patch(vec![remove.clone()]), &WhatIfOptions::default()).unwrap();
    let restore = CellOverride { effect: Effect::Positive, ..remove };
    let restored = apply_whatif(&removed.model, &patch(vec![restore]), &WhatIfOptions::default()).unwrap();
    let created: Vec<String> = restored
        .report
        .changed_chains
        .iter()
        .filter(|c| c.change == ChainChange::Created)
        .map(|c| c.chain.to_string())
        .collect();
    assert!(created.contains(&"traceability → transparency → stake_of_beneficiary → monetary_costs [T→S→Ec]".to_string()));
}

#[test]
fn editing_an_absent_pair_opens_it() {
    let model = fixture("case_study.json");
    let p = patch(vec![cell("multi_model", "En-T", "resource_utilization", "traceability", Effect::Negative)]);
    let outcome = apply_whatif(&model, &p, &WhatIfOptions::default()).unwrap();
    let en_t = outcome.report.pair("En-T".parse().unwrap()).unwrap();
    let entry = en_t.entry("multi_model").unwrap();
    assert_eq!(entry.old_raw, 0.0);
    assert!((entry.new_raw + 1.1).abs() < 1e-12);
    assert_eq!(entry.new_percent, Some(0.0));
    assert_eq!(en_t.entry("single_model").unwrap().new_percent, Some(100.0));
}

fn two_cells() -> impl Strategy<Value = (RandomModel, Index, Index, i64, i64)> {
    (random_model_strategy(), any::<Index>(), any::<Index>(), -1i64..=1, -1i64..=1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn disjoint_patches_compose((rm, a, b, ea, eb) in two_cells()) {
        let cells = patchable_cells(&rm.model);
        let (ia, ib) = (a.index(cells.len()), b.index(cells.len()));
        prop_assume!(ia != ib);
        let (alt_a, ma, ra, ca) = &cells[ia];
        let (alt_b, mb, rb, cb) = &cells[ib];
        let pa = override_for(alt_a, ma, *ra, *ca, effect(ea));
        let pb = override_for(alt_b, mb, *rb, *cb, effect(eb));
        prop_assume!(!(pa.alternative == pb.alternative && pa.pair() == pb.pair() && pa.row_qa == pb.row_qa && pa.col_qa == pb.col_qa));

        let opts = WhatIfOptions::default();
        let together = apply_whatif(&rm.model, &patch(vec![pa.clone(), pb.clone()]), &opts).unwrap();
        let first = apply_whatif(&rm.model, &patch(vec![pa]), &opts).unwrap();
        let then = apply_whatif(&first.model, &patch(vec![pb]), &opts).unwrap();
        let x = raw_by_pair(&together.patched);
        let y = raw_by_pair(&then.patched);
        for (k, v) in &x {
            prop_assert!((v - y.get(k).copied().unwrap_or(0.0)).abs() < 1e-9, "{k:?}");
        }
        prop_assert_eq!(
            rm.model.alternatives.iter().map(|a| a.effective_matrices(&together.model).unwrap()).collect::<Vec<_>>(),
            rm.model.alternatives.iter().map(|a| a.effective_matrices(&then.model).unwrap()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn applying_a_patch_twice_changes_nothing_more((rm, a, _b, ea, _eb) in two_cells()) {
        let cells = patchable_cells(&rm.model);
        let (alt, m, r, c) = &cells[a.index(cells.len())];
        let p = patch(vec![override_for(alt, m, *r, *c, effect(ea))]);
        let opts = WhatIfOptions::default();
        let once = apply_whatif(&rm.model, &p, &opts).unwrap();
        let twice = apply_whatif(&once.model, &p, &opts).unwrap();
        prop_assert!(twice.report.pairs.iter().flat_map(|p| &p.entries).all(|e| e.delta_raw == 0.0));
        prop_assert!(twice.report.changed_chains.is_empty());
        let x = raw_by_pair(&once.patched);
        let y = raw_by_pair(&twice.patched);
        for (k, v) in &x {
            prop_assert!((v - y.get(k).copied().unwrap_or(0.0)).abs() < 1e-9, "{k:?}");
        }
    }
}
