//! `siskit report`: one Markdown document per model.

use std::fmt::Write as _;

use serde::Serialize;
use siskit_core::analysis::{
    find_synergy_chains, rank_affected, tradeoffs_in, AffectedRanking, TradeoffRecord, TradeoffScope,
    WHATIF_CHAIN_MIN_LENGTH,
};
use siskit_core::model::{AssessmentModel, EffectMatrix};
use siskit_core::score_model;

use crate::render::markdown_table;
use crate::{json, priority_table, score_blocks, Cli, Exit, OutputFormat};

const CHAIN_LIMIT: usize = 25;
const NO_EFFECTS: &str = "_no effects identified_";

#[derive(Serialize)]
struct AlternativeAnalysis {
    id: String,
    name: String,
    is_theoretical_optimal: bool,
    tradeoffs: Vec<TradeoffRecord>,
    synergy_chains: Vec<String>,
    affected: AffectedRanking,
}

fn analyse(model: &AssessmentModel) -> Result<Vec<(AlternativeAnalysis, Vec<EffectMatrix>)>, Exit> {
    let model_err = |e: siskit_core::model::ModelError| Exit::invalid(format!("ERROR {e}"));
    model
        .alternatives
        .iter()
        .map(|alt| {
            let matrices = alt.effective_matrices(model).map_err(model_err)?;
            let dmap = alt.effective_dmap(model).map_err(model_err)?;
            let analysis = AlternativeAnalysis {
                id: alt.id.clone(),
                name: alt.name.clone(),
                is_theoretical_optimal: alt.is_theoretical_optimal,
                tradeoffs: tradeoffs_in(&matrices, TradeoffScope::All),
                synergy_chains: find_synergy_chains(&dmap, model, WHATIF_CHAIN_MIN_LENGTH)
                    .iter()
                    .map(|c| c.to_string())
                    .collect(),
                affected: rank_affected(&matrices, model),
            };
            Ok((analysis, matrices))
        })
        .collect()
}

pub(crate) fn render(cli: &Cli, model: &AssessmentModel) -> Result<String, Exit> {
    let scores = score_model(model, &cli.score_options(false)).map_err(|e| Exit::invalid(format!("ERROR {e}")))?;
    let analyses = analyse(model)?;

    if cli.format == OutputFormat::Json {
        #[derive(Serialize)]
        struct Bundle<'a> {
            scores: &'a siskit_core::ScoreReport,
            alternatives: Vec<&'a AlternativeAnalysis>,
        }
        let alternatives = analyses.iter().map(|(a, _)| a).collect();
        return Ok(json(&Bundle { scores: &scores, alternatives }));
    }

    let mut out = String::from("# Sustainability impact report\n\n");
    let mode = if cli.raw_priorities { "raw" } else { "normalized" };
    let _ = writeln!(out, "Priorities: {mode}. Scenario: {}.\n", cli.scenario.as_deref().unwrap_or("default"));

    out.push_str("## Priorities\n\n");
    let (headers, rows) = priority_table(cli, model)?;
    out.push_str(&markdown_table(&headers, &rows, 1));

    out.push_str("\n## Effect matrices\n");
    for (a, matrices) in &analyses {
        let _ = writeln!(out, "\n### {} (`{}`)", a.name, a.id);
        if matrices.iter().all(EffectMatrix::is_all_zero) {
            let _ = writeln!(out, "\n{NO_EFFECTS}");
            continue;
        }
        for m in matrices.iter().filter(|m| !m.is_all_zero()) {
            let _ = writeln!(out, "\n#### {}\n", m.pair());
            let mut headers = vec!["from \u{2192} to".to_string()];
            headers.extend(m.col_qas.iter().cloned());
            let rows: Vec<Vec<String>> = m
                .row_qas
                .iter()
                .enumerate()
                .map(|(r, qa)| {
                    let mut row = vec![qa.clone()];
                    row.extend((0..m.col_qas.len()).map(|c| m.effect(r, c).symbol().to_string()));
                    row
                })
                .collect();
            out.push_str(&markdown_table(&headers, &rows, 1));
        }
    }

    out.push_str("\n## Sustainability impact scores\n");
    if scores.results.is_empty() {
        let _ = writeln!(out, "\n{NO_EFFECTS}");
    } else {
        for (title, headers, rows) in score_blocks(&scores, cli.decimals) {
            let _ = writeln!(out, "\n### {title}\n");
            out.push_str(&markdown_table(&headers, &rows, 1));
        }
        out.push_str(if scores.optimal().is_some() {
            "\nPercentages are relative to the alternatives compared here: 0% marks the weakest of them, \
             not an absolute floor, since raw SIS has no lower bound.\n"
        } else {
            "\nNo alternative is flagged `is_theoretical_optimal`, so only raw SIS is shown.\n"
        });
    }

    out.push_str("\n## Trade-offs\n");
    for (a, _) in &analyses {
        let _ = writeln!(out, "\n### {}\n", a.name);
        if a.tradeoffs.is_empty() {
            let _ = writeln!(out, "{NO_EFFECTS}");
        }
        for t in &a.tradeoffs {
            let scope = if t.same_dimension { "within" } else { "across" };
            let _ = writeln!(out, "- `{}` \u{2192} `{}` ({}-{}, {scope})", t.from_qa, t.to_qa, t.dim_from, t.dim_to);
        }
    }

    out.push_str("\n## Synergy chains\n");
    for (a, _) in &analyses {
        let _ = writeln!(out, "\n### {}\n", a.name);
        if a.synergy_chains.is_empty() {
            let _ = writeln!(out, "{NO_EFFECTS}");
        }
        for chain in a.synergy_chains.iter().take(CHAIN_LIMIT) {
            let _ = writeln!(out, "- {chain}");
        }
        if a.synergy_chains.len() > CHAIN_LIMIT {
            let _ = writeln!(out, "- ... and {} more", a.synergy_chains.len() - CHAIN_LIMIT);
        }
    }

    out.push_str("\n## Most affected quality attributes\n");
    for (a, _) in &analyses {
        let _ = writeln!(out, "\n### {}\n", a.name);
        let ranking = &a.affected;
        if ranking.most_negative().is_none() && ranking.most_positive().is_none() {
            let _ = writeln!(out, "{NO_EFFECTS}");
            continue;
        }
        if let Some(c) = ranking.most_negative() {
            let _ = writeln!(out, "Most negatively affected: `{}` ({} negative)\n", c.qa, c.negative_in);
        }
        if let Some(c) = ranking.most_positive() {
            let _ = writeln!(out, "Most positively affected: `{}` ({} positive)\n", c.qa, c.positive_in);
        }
        let rows: Vec<Vec<String>> = ranking
            .by_negative
            .iter()
            .filter(|c| c.positive_in + c.negative_in > 0)
            .map(|c| vec![c.qa.clone(), c.positive_in.to_string(), c.negative_in.to_string()])
            .collect();
        out.push_str(&markdown_table(&crate::render::strings(["QA", "positive in", "negative in"]), &rows, 1));
    }
    Ok(out)
}
