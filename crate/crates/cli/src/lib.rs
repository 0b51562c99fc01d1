//! `siskit` command-line front end.
//!
//! Exit codes: 0 success (warnings allowed unless `--strict`), 1 warnings
//! under `--strict`, 2 invalid input or a refused operation, 3 unreadable
//! file.

pub mod render;
mod report;

use std::io::Write;
use std::net::IpAddr;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use siskit_core::analysis::{apply_whatif, ChainChange, WhatIfOptions, WhatIfPatch, WhatIfReport};
use siskit_core::model::{parse_document, read_document, validate_model, AssessmentModel, Diagnostic, ModelError};
use siskit_core::scoring::{resolve_priorities, AlternativeRef, PriorityMode, ScoreOptions, ScoringError};
use siskit_core::{score_model, ScoreReport};

use render::{csv_table, markdown_table, num, opt_num, signed, strings, text_table, Style};

pub const EXIT_OK: u8 = 0;
pub const EXIT_WARNINGS: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_UNREADABLE: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
    Markdown,
}

#[derive(Debug, Parser)]
#[command(name = "siskit", version, about = "Score architecture alternatives by their sustainability impact")]
pub struct Cli {
    /// Model document (JSON).
    #[arg(long, short, global = true, env = "SISKIT_INPUT")]
    pub input: Option<PathBuf>,
    #[arg(long, short, global = true, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
    /// Utility-matrix scenario whose importance/risk levels to use.
    #[arg(long, global = true)]
    pub scenario: Option<String>,
    /// Treat warnings as failures (exit 1).
    #[arg(long, global = true)]
    pub strict: bool,
    /// Feed unnormalized priorities into SIS.
    #[arg(long, global = true)]
    pub raw_priorities: bool,
    /// Decimal places for displayed numbers.
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u32).range(0..=6))]
    pub decimals: u32,
    /// Permit what-if overrides on the theoretical optimal.
    #[arg(long, global = true)]
    pub allow_optimal_edit: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model and print diagnostics.
    Validate,
    /// Print importance, risk and (normalized) priority per quality attribute.
    Priorities,
    /// Print raw and normalized SIS per dimension pair.
    Score {
        /// Re-render a score document previously written with `--format json`.
        #[arg(long, value_name = "FILE", conflicts_with = "input")]
        scores: Option<PathBuf>,
    },
    /// Apply a patch of effect overrides and print the SIS changes.
    Whatif {
        /// Patch document: {"overrides": [{alternative, dim_from, dim_to, row_qa, col_qa, effect}]}.
        patch: PathBuf,
    },
    /// Full Markdown report: priorities, matrices, scores, trade-offs, chains.
    Report,
    /// Run the HTTP service for interactive editing.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Minutes of inactivity before a session expires.
        #[arg(long, default_value_t = 60)]
        idle_timeout_minutes: u64,
        /// Write committed models to this directory.
        #[arg(long)]
        snapshot_dir: Option<PathBuf>,
        /// Cross-check pending scores against a full rescore on every request.
        #[arg(long)]
        verify_rescore: bool,
    },
}

/// A failed command: exit code plus lines for stderr.
#[derive(Debug)]
pub struct Exit {
    pub code: u8,
    pub lines: Vec<String>,
}

impl Exit {
    fn invalid(line: impl Into<String>) -> Self {
        Exit { code: EXIT_INVALID, lines: vec![line.into()] }
    }

    fn from_model_error(err: ModelError) -> Self {
        let code = if matches!(err, ModelError::Io { .. }) { EXIT_UNREADABLE } else { EXIT_INVALID };
        Exit { code, lines: err.diagnostics().iter().map(|d| d.to_string()).collect() }
    }
}

impl Cli {
    fn priority_mode(&self) -> PriorityMode {
        if self.raw_priorities {
            PriorityMode::Raw
        } else {
            PriorityMode::Normalized
        }
    }

    fn score_options(&self, require_optimal: bool) -> ScoreOptions {
        ScoreOptions { scenario: self.scenario.clone(), priority_mode: self.priority_mode(), require_optimal }
    }
}

/// Runs every command except `serve`, writing results to `out` and
/// diagnostics to `err`, each with its own styling. Returns the process exit code.
pub fn run(cli: &Cli, style: Style, err_style: Style, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match &cli.command {
        Command::Validate => validate(cli),
        Command::Priorities => with_model(cli, err_style, err, |m| priorities(cli, style, m)),
        Command::Score { scores: Some(path) } => rerender_scores(cli, style, path),
        Command::Score { scores: None } => with_model(cli, err_style, err, |m| score(cli, style, m)),
        Command::Whatif { patch } => with_model(cli, err_style, err, |m| whatif(cli, style, m, patch)),
        Command::Report => with_model(cli, err_style, err, |m| report::render(cli, m)),
        Command::Serve { .. } => Err(Exit::invalid("ERROR serve: must be started from the binary entry point")),
    };
    match result {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(exit) => {
            for line in &exit.lines {
                let _ = writeln!(err, "{}", err_style.level(line));
            }
            exit.code
        }
    }
}

type Rendered = Result<(String, u8), Exit>;

fn read_model(cli: &Cli) -> Result<(AssessmentModel, Vec<Diagnostic>), Exit> {
    let path = cli.input.as_ref().ok_or_else(|| Exit::invalid("ERROR --input: no model file given"))?;
    let text = read_document(path).map_err(Exit::from_model_error)?;
    let model = parse_document(&text).map_err(Exit::from_model_error)?;
    let diagnostics = validate_model(&model);
    Ok((model, diagnostics))
}

fn validate(cli: &Cli) -> Rendered {
    let (_, diagnostics) = read_model(cli)?;
    let code = if diagnostics.iter().any(Diagnostic::is_error) {
        EXIT_INVALID
    } else if !diagnostics.is_empty() && cli.strict {
        EXIT_WARNINGS
    } else {
        EXIT_OK
    };
    let text = match cli.format {
        OutputFormat::Json => json(&diagnostics),
        _ => diagnostics.iter().map(|d| format!("{d}\n")).collect(),
    };
    Ok((text, code))
}

/// Loads a valid model, reports warnings on `err`, then renders.
fn with_model(
    cli: &Cli,
    style: Style,
    err: &mut dyn Write,
    render: impl FnOnce(&AssessmentModel) -> Result<String, Exit>,
) -> Rendered {
    let (model, diagnostics) = read_model(cli)?;
    if diagnostics.iter().any(Diagnostic::is_error) {
        return Err(Exit { code: EXIT_INVALID, lines: diagnostics.iter().map(|d| d.to_string()).collect() });
    }
    for d in &diagnostics {
        let _ = writeln!(err, "{}", style.level(&d.to_string()));
    }
    if cli.strict && !diagnostics.is_empty() {
        return Err(Exit { code: EXIT_WARNINGS, lines: vec![] });
    }
    Ok((render(&model)?, EXIT_OK))
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serialization is infallible");
    text.push('\n');
    text
}

#[derive(Serialize)]
struct PriorityRow {
    qa: String,
    importance: u8,
    risk: u8,
    priority: f64,
    normalized_priority: f64,
    dimension: String,
}

fn priority_rows(cli: &Cli, model: &AssessmentModel) -> Result<Vec<PriorityRow>, Exit> {
    let scenario = cli.scenario.as_deref();
    let set = resolve_priorities(model, scenario).map_err(|e| Exit::invalid(format!("ERROR {e}")))?;
    Ok(model
        .quality_attributes
        .iter()
        .map(|qa| {
            let (importance, risk) = scenario
                .and_then(|s| model.utility_matrix.as_ref()?.levels(&qa.id, s))
                .unwrap_or((qa.importance, qa.risk));
            let p = set.get(&qa.id).expect("every QA has a priority");
            PriorityRow {
                qa: qa.id.clone(),
                importance: importance.value(),
                risk: risk.value(),
                priority: p.raw,
                normalized_priority: p.normalized,
                dimension: qa.dimension.code().to_string(),
            }
        })
        .collect())
}

pub(crate) fn priority_table(cli: &Cli, model: &AssessmentModel) -> Result<(Vec<String>, Vec<Vec<String>>), Exit> {
    let rows = priority_rows(cli, model)?
        .into_iter()
        .map(|r| {
            vec![
                r.qa,
                r.importance.to_string(),
                r.risk.to_string(),
                num(r.priority, cli.decimals),
                num(r.normalized_priority, cli.decimals),
                r.dimension,
            ]
        })
        .collect();
    Ok((strings(["QA", "I", "R", "P", "NP", "dimension"]), rows))
}

fn priorities(cli: &Cli, style: Style, model: &AssessmentModel) -> Result<String, Exit> {
    if cli.format == OutputFormat::Json {
        return Ok(json(&priority_rows(cli, model)?));
    }
    let (headers, rows) = priority_table(cli, model)?;
    Ok(match cli.format {
        OutputFormat::Csv => csv_table(&headers, &rows),
        OutputFormat::Markdown => markdown_table(&headers, &rows, 1),
        _ => text_table(style, &headers, &rows, 1),
    })
}

fn score(cli: &Cli, style: Style, model: &AssessmentModel) -> Result<String, Exit> {
    // Core only insists on an optimal when there is something to normalize.
    if model.theoretical_optimal().is_none() {
        return Err(Exit::invalid(format!("ERROR alternatives: {}", ScoringError::NoTheoreticalOptimal)));
    }
    let report = score_model(model, &cli.score_options(true)).map_err(|e| Exit::invalid(format!("ERROR {e}")))?;
    Ok(render_scores(cli.format, style, cli.decimals, &report))
}

fn rerender_scores(cli: &Cli, style: Style, path: &Path) -> Rendered {
    let text = read_document(path).map_err(Exit::from_model_error)?;
    let report: ScoreReport = serde_json::from_str(&text)
        .map_err(|e| Exit::invalid(format!("ERROR {}: not a score document: {e}", path.display())))?;
    Ok((render_scores(cli.format, style, cli.decimals, &report), EXIT_OK))
}

/// Alternatives in table order: ordinary ones as listed, the optimal last.
fn table_rows(report: &ScoreReport) -> Vec<&AlternativeRef> {
    let (optimal, others): (Vec<_>, Vec<_>) = report.alternatives.iter().partition(|a| a.is_theoretical_optimal);
    others.into_iter().chain(optimal).collect()
}

/// A titled table: (title, headers, rows).
pub(crate) type Block = (&'static str, Vec<String>, Vec<Vec<String>>);

/// The raw block, plus the percentage block when an optimal is present.
pub(crate) fn score_blocks(report: &ScoreReport, decimals: u32) -> Vec<Block> {
    let mut headers = vec!["Alternative".to_string()];
    headers.extend(report.results.iter().map(|r| r.pair().to_string()));
    let block = |value: &dyn Fn(&siskit_core::scoring::SisResult, &AlternativeRef) -> Option<f64>| -> Vec<Vec<String>> {
        table_rows(report)
            .into_iter()
            .map(|alt| {
                let mut row = vec![alt.name.clone()];
                row.extend(report.results.iter().map(|r| opt_num(value(r, alt), decimals)));
                row
            })
            .collect()
    };
    let mut blocks = vec![("Non-normalized SIS", headers.clone(), block(&|r, a| r.raw_for(a)))];
    if report.optimal().is_some() {
        blocks.push(("Normalized SIS (%)", headers, block(&|r, a| r.percent_for(a))));
    }
    blocks
}

pub fn render_scores(format: OutputFormat, style: Style, decimals: u32, report: &ScoreReport) -> String {
    match format {
        OutputFormat::Json => json(report),
        OutputFormat::Csv => {
            let mut rows = Vec::new();
            for r in &report.results {
                for alt in table_rows(report) {
                    rows.push(vec![
                        r.pair().to_string(),
                        alt.id.clone(),
                        opt_num(r.raw_for(alt), decimals),
                        r.percent_for(alt).map(|v| num(v, decimals)).unwrap_or_default(),
                    ]);
                }
            }
            csv_table(&strings(["pair", "alternative", "raw_sis", "normalized_percent"]), &rows)
        }
        OutputFormat::Markdown => score_blocks(report, decimals)
            .into_iter()
            .map(|(title, headers, rows)| format!("### {title}\n\n{}", markdown_table(&headers, &rows, 1)))
            .collect::<Vec<_>>()
            .join("\n"),
        OutputFormat::Table => score_blocks(report, decimals)
            .into_iter()
            .map(|(title, headers, rows)| format!("{}\n{}", style.bold(title), text_table(style, &headers, &rows, 1)))
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn whatif(cli: &Cli, style: Style, model: &AssessmentModel, patch_path: &Path) -> Result<String, Exit> {
    let text = read_document(patch_path).map_err(Exit::from_model_error)?;
    // A zero-byte patch file means "no overrides".
    let patch: WhatIfPatch = if text.trim().is_empty() {
        WhatIfPatch::default()
    } else {
        serde_json::from_str(&text)
            .map_err(|e| Exit::invalid(format!("ERROR {}: invalid patch: {e}", patch_path.display())))?
    };
    let options = WhatIfOptions { score: cli.score_options(false), allow_optimal_edit: cli.allow_optimal_edit };
    let outcome = apply_whatif(model, &patch, &options).map_err(|e| Exit::invalid(format!("ERROR {e}")))?;
    Ok(render_whatif(cli.format, style, cli.decimals, &outcome.report))
}

pub fn render_whatif(format: OutputFormat, style: Style, decimals: u32, report: &WhatIfReport) -> String {
    if format == OutputFormat::Json {
        return json(report);
    }
    let csv = format == OutputFormat::Csv;
    let delta = |v: Option<f64>| match v {
        Some(v) if !csv => signed(v, decimals),
        Some(v) => num(v, decimals),
        None => "-".to_string(),
    };
    let mut rows = Vec::new();
    for pair in &report.pairs {
        for e in &pair.entries {
            rows.push(vec![
                pair.pair().to_string(),
                e.alternative.clone(),
                num(e.old_raw, decimals),
                num(e.new_raw, decimals),
                delta(Some(e.delta_raw)),
                opt_num(e.old_percent, decimals),
                opt_num(e.new_percent, decimals),
                delta(e.delta_percent),
            ]);
        }
    }
    if csv {
        let headers = strings([
            "pair",
            "alternative",
            "old_raw",
            "new_raw",
            "delta_raw",
            "old_percent",
            "new_percent",
            "delta_percent",
        ]);
        return csv_table(&headers, &rows);
    }
    let headers = strings(["Pair", "Alternative", "Raw old", "Raw new", "Δ raw", "% old", "% new", "Δ %"]);
    let chains: Vec<String> = report
        .changed_chains
        .iter()
        .map(|c| {
            let verb = match c.change {
                ChainChange::Created => "created",
                ChainChange::Broken => "broken",
            };
            format!("- {}: {verb} {}", c.alternative, c.chain)
        })
        .collect();
    let (table, heading) = match format {
        OutputFormat::Markdown => (markdown_table(&headers, &rows, 2), "### Synergy chain changes".to_string()),
        _ => (text_table(style, &headers, &rows, 2), style.bold("Synergy chain changes")),
    };
    if chains.is_empty() {
        table
    } else {
        format!("{table}\n{heading}\n{}\n", chains.join("\n"))
    }
}
