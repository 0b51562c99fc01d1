use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Current on-disk schema version.
pub const SCHEMA_VERSION: &str = "1";

/// Upper bound on the length of any id in a model document.
pub const MAX_ID_LEN: usize = 128;

/// Sustainability dimension a quality attribute belongs to.
///
/// The derived ordering (`Ec < En < S < T`) matches the lexicographic order
/// of the short codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dimension {
    Ec,
    En,
    S,
    T,
}

impl Dimension {
    pub const ALL: [Dimension; 4] = [Dimension::Ec, Dimension::En, Dimension::S, Dimension::T];

    pub fn code(self) -> &'static str {
        match self {
            Dimension::Ec => "Ec",
            Dimension::En => "En",
            Dimension::S => "S",
            Dimension::T => "T",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Dimension::Ec => "economic",
            Dimension::En => "environmental",
            Dimension::S => "social",
            Dimension::T => "technical",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown dimension code '{0}' (expected Ec, En, S or T)")]
pub struct UnknownDimension(pub String);

impl FromStr for Dimension {
    type Err = UnknownDimension;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Ec" => Ok(Dimension::Ec),
            "En" => Ok(Dimension::En),
            "S" => Ok(Dimension::S),
            "T" => Ok(Dimension::T),
            other => Err(UnknownDimension(other.to_string())),
        }
    }
}

/// Ordered (row dimension, column dimension) pair. `T-Ec` and `Ec-T` are
/// different pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DimensionPair {
    pub from: Dimension,
    pub to: Dimension,
}

impl DimensionPair {
    pub const fn new(from: Dimension, to: Dimension) -> Self {
        Self { from, to }
    }

    pub fn is_same_dimension(self) -> bool {
        self.from == self.to
    }

    // T-T, T-Ec, T-En, T-S lead; everything else follows in code order.
    fn presentation_key(self) -> (u8, Dimension, Dimension) {
        let rank = match (self.from, self.to) {
            (Dimension::T, Dimension::T) => 0,
            (Dimension::T, Dimension::Ec) => 1,
            (Dimension::T, Dimension::En) => 2,
            (Dimension::T, Dimension::S) => 3,
            _ => 4,
        };
        (rank, self.from, self.to)
    }
}

impl Ord for DimensionPair {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.presentation_key().cmp(&other.presentation_key())
    }
}

impl PartialOrd for DimensionPair {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DimensionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.from, self.to)
    }
}

impl FromStr for DimensionPair {
    type Err = UnknownDimension;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (from, to) = s.split_once('-').ok_or_else(|| UnknownDimension(s.to_string()))?;
        Ok(Self::new(from.parse()?, to.parse()?))
    }
}

/// Three-step importance or risk rating: Low = 1, Medium = 2, High = 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct Level(u8);

impl Level {
    pub const LOW: Level = Level(1);
    pub const MEDIUM: Level = Level(2);
    pub const HIGH: Level = Level(3);

    pub fn new(value: i64) -> Result<Self, LevelOutOfRange> {
        match value {
            1..=3 => Ok(Level(value as u8)),
            _ => Err(LevelOutOfRange(value)),
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("level {0} is out of range (expected 1=Low, 2=Medium or 3=High)")]
pub struct LevelOutOfRange(pub i64);

impl TryFrom<i64> for Level {
    type Error = LevelOutOfRange;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        Level::new(value)
    }
}

impl From<Level> for u8 {
    fn from(level: Level) -> u8 {
        level.0
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Effect of a row QA on a column QA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i8")]
pub enum Effect {
    Negative,
    Neutral,
    Positive,
}

impl Effect {
    pub const ALL: [Effect; 3] = [Effect::Negative, Effect::Neutral, Effect::Positive];

    pub fn value(self) -> i8 {
        match self {
            Effect::Negative => -1,
            Effect::Neutral => 0,
            Effect::Positive => 1,
        }
    }

    pub fn is_nonzero(self) -> bool {
        self != Effect::Neutral
    }

    pub fn negated(self) -> Effect {
        match self {
            Effect::Negative => Effect::Positive,
            Effect::Neutral => Effect::Neutral,
            Effect::Positive => Effect::Negative,
        }
    }

    /// Grid glyph: `+`, `−` or `0`.
    pub fn symbol(self) -> &'static str {
        match self {
            Effect::Negative => "−",
            Effect::Neutral => "0",
            Effect::Positive => "+",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("effect {0} is not one of -1, 0, +1")]
pub struct InvalidEffect(pub i64);

impl TryFrom<i64> for Effect {
    type Error = InvalidEffect;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        match value {
            -1 => Ok(Effect::Negative),
            0 => Ok(Effect::Neutral),
            1 => Ok(Effect::Positive),
            other => Err(InvalidEffect(other)),
        }
    }
}

impl From<Effect> for i8 {
    fn from(effect: Effect) -> i8 {
        effect.value()
    }
}

impl From<Sign> for Effect {
    fn from(sign: Sign) -> Effect {
        match sign {
            Sign::Positive => Effect::Positive,
            Sign::Negative => Effect::Negative,
        }
    }
}

/// Sign of a decision-map edge. Zero edges are not representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i8")]
pub enum Sign {
    Negative,
    Positive,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("edge sign {0} is not +1 or -1")]
pub struct InvalidSign(pub i64);

impl TryFrom<i64> for Sign {
    type Error = InvalidSign;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        match value {
            1 => Ok(Sign::Positive),
            -1 => Ok(Sign::Negative),
            other => Err(InvalidSign(other)),
        }
    }
}

impl From<Sign> for i8 {
    fn from(sign: Sign) -> i8 {
        Effect::from(sign).value()
    }
}

/// Order of an ICT impact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImpactLevel {
    Direct,
    Enabling,
    Systemic,
}

impl fmt::Display for ImpactLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ImpactLevel::Direct => "direct",
            ImpactLevel::Enabling => "enabling",
            ImpactLevel::Systemic => "systemic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QualityAttribute {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub definition: String,
    pub dimension: Dimension,
    pub importance: Level,
    pub risk: Level,
    /// Explicit priority that replaces the importance/risk weighted sum.
    /// Used for legacy ranking-based models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priority_override: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub importance_weight: f64,
    pub risk_weight: f64,
}

impl Default for WeightConfig {
    fn default() -> Self {
        Self { importance_weight: 0.5, risk_weight: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    #[serde(default)]
    pub description: String,
}

/// One populated cell of the utility matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityCell {
    pub qa: String,
    pub scenario: String,
    pub importance: Level,
    pub risk: Level,
}

/// QA × scenario matrix of per-scenario importance/risk ratings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityMatrix {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    #[serde(default)]
    pub cells: Vec<UtilityCell>,
}

impl UtilityMatrix {
    pub fn levels(&self, qa: &str, scenario: &str) -> Option<(Level, Level)> {
        self.cells
            .iter()
            .find(|c| c.qa == qa && c.scenario == scenario)
            .map(|c| (c.importance, c.risk))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectCell {
    pub effect: Effect,
    pub impact_level: Option<ImpactLevel>,
    pub rationale: Option<String>,
}

impl EffectCell {
    pub fn new(effect: Effect) -> Self {
        Self { effect, impact_level: None, rationale: None }
    }

    fn is_annotated(&self) -> bool {
        self.impact_level.is_some() || self.rationale.is_some()
    }
}

/// Dependency matrix: effect of each `dim_from` QA (rows) on each `dim_to`
/// QA (columns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixDoc", into = "MatrixDoc")]
pub struct EffectMatrix {
    pub dim_from: Dimension,
    pub dim_to: Dimension,
    pub row_qas: Vec<String>,
    pub col_qas: Vec<String>,
    pub cells: Vec<Vec<EffectCell>>,
}

impl EffectMatrix {
    /// All-neutral matrix over the given axes.
    pub fn zeros(
        dim_from: Dimension,
        dim_to: Dimension,
        row_qas: Vec<String>,
        col_qas: Vec<String>,
    ) -> Self {
        let cells = vec![vec![EffectCell::new(Effect::Neutral); col_qas.len()]; row_qas.len()];
        Self { dim_from, dim_to, row_qas, col_qas, cells }
    }

    pub fn pair(&self) -> DimensionPair {
        DimensionPair::new(self.dim_from, self.dim_to)
    }

    pub fn position(&self, row_qa: &str, col_qa: &str) -> Option<(usize, usize)> {
        let r = self.row_qas.iter().position(|q| q == row_qa)?;
        let c = self.col_qas.iter().position(|q| q == col_qa)?;
        Some((r, c))
    }

    pub fn effect(&self, row: usize, col: usize) -> Effect {
        self.cells[row][col].effect
    }

    pub fn effect_between(&self, row_qa: &str, col_qa: &str) -> Option<Effect> {
        self.position(row_qa, col_qa).map(|(r, c)| self.effect(r, c))
    }

    pub fn set_effect(&mut self, row: usize, col: usize, effect: Effect) {
        self.cells[row][col].effect = effect;
    }

    /// Nonzero cells in row-major order as `(row, col, cell)`.
    pub fn nonzero_cells(&self) -> impl Iterator<Item = (usize, usize, &EffectCell)> {
        self.cells.iter().enumerate().flat_map(|(r, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, cell)| cell.effect.is_nonzero())
                .map(move |(c, cell)| (r, c, cell))
        })
    }

    pub fn is_all_zero(&self) -> bool {
        self.nonzero_cells().next().is_none()
    }
}

/// Serialized form of an [`EffectMatrix`]: a dense integer grid plus a
/// sparse list of cell annotations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDoc {
    dim_from: Dimension,
    dim_to: Dimension,
    rows: Vec<String>,
    columns: Vec<String>,
    effects: Vec<Vec<Effect>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    annotations: Vec<AnnotationDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnotationDoc {
    row: String,
    col: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    impact_level: Option<ImpactLevel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rationale: Option<String>,
}

impl TryFrom<MatrixDoc> for EffectMatrix {
    type Error = String;

    fn try_from(doc: MatrixDoc) -> Result<Self, Self::Error> {
        if doc.effects.len() != doc.rows.len() {
            return Err(format!(
                "effects has {} rows but {} row QAs are declared",
                doc.effects.len(),
                doc.rows.len()
            ));
        }
        if let Some((i, row)) =
            doc.effects.iter().enumerate().find(|(_, row)| row.len() != doc.columns.len())
        {
            return Err(format!(
                "effects[{i}] has {} cells but {} column QAs are declared",
                row.len(),
                doc.columns.len()
            ));
        }
        let mut matrix = EffectMatrix {
            dim_from: doc.dim_from,
            dim_to: doc.dim_to,
            cells: doc
                .effects
                .into_iter()
                .map(|row| row.into_iter().map(EffectCell::new).collect())
                .collect(),
            row_qas: doc.rows,
            col_qas: doc.columns,
        };
        for note in doc.annotations {
            let (r, c) = matrix.position(&note.row, &note.col).ok_or_else(|| {
                format!("annotation targets unknown cell ({}, {})", note.row, note.col)
            })?;
            let cell = &mut matrix.cells[r][c];
            if cell.is_annotated() {
                return Err(format!("duplicate annotation for cell ({}, {})", note.row, note.col));
            }
            cell.impact_level = note.impact_level;
            cell.rationale = note.rationale;
        }
        Ok(matrix)
    }
}

impl From<EffectMatrix> for MatrixDoc {
    fn from(matrix: EffectMatrix) -> Self {
        let mut annotations = Vec::new();
        let mut effects = Vec::with_capacity(matrix.cells.len());
        for (r, row) in matrix.cells.into_iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (c, cell) in row.into_iter().enumerate() {
                out.push(cell.effect);
                if cell.is_annotated() {
                    annotations.push(AnnotationDoc {
                        row: matrix.row_qas[r].clone(),
                        col: matrix.col_qas[c].clone(),
                        impact_level: cell.impact_level,
                        rationale: cell.rationale,
                    });
                }
            }
            effects.push(out);
        }
        MatrixDoc {
            dim_from: matrix.dim_from,
            dim_to: matrix.dim_to,
            rows: matrix.row_qas,
            columns: matrix.col_qas,
            effects,
            annotations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DmapNode {
    pub qa: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<Dimension>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub impact_level: Option<ImpactLevel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DmapEdge {
    pub from: String,
    pub to: String,
    pub sign: Sign,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub impact_level: Option<ImpactLevel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationale: Option<String>,
}

/// Signed directed graph of quality concerns.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionMap {
    #[serde(default)]
    pub nodes: Vec<DmapNode>,
    #[serde(default)]
    pub edges: Vec<DmapEdge>,
}

impl DecisionMap {
    pub fn node(&self, qa: &str) -> Option<&DmapNode> {
        self.nodes.iter().find(|n| n.qa == qa)
    }

    pub fn edge(&self, from: &str, to: &str) -> Option<&DmapEdge> {
        self.edges.iter().find(|e| e.from == from && e.to == to)
    }
}

/// A named architectural approach under evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Alternative {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub is_theoretical_optimal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dmap: Option<DecisionMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<EffectMatrix>>,
}

/// Aggregate root for one evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssessmentModel {
    pub schema_version: String,
    #[serde(default)]
    pub weights: WeightConfig,
    pub quality_attributes: Vec<QualityAttribute>,
    #[serde(default)]
    pub scenarios: Vec<Scenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utility_matrix: Option<UtilityMatrix>,
    pub alternatives: Vec<Alternative>,
}

impl AssessmentModel {
    pub fn qa(&self, id: &str) -> Option<&QualityAttribute> {
        self.quality_attributes.iter().find(|q| q.id == id)
    }

    pub fn qas_in(&self, dimension: Dimension) -> impl Iterator<Item = &QualityAttribute> {
        self.quality_attributes.iter().filter(move |q| q.dimension == dimension)
    }

    pub fn alternative(&self, id: &str) -> Option<&Alternative> {
        self.alternatives.iter().find(|a| a.id == id)
    }

    pub fn theoretical_optimal(&self) -> Option<&Alternative> {
        self.alternatives.iter().find(|a| a.is_theoretical_optimal)
    }

    pub fn dimension_index(&self) -> BTreeMap<&str, Dimension> {
        self.quality_attributes.iter().map(|q| (q.id.as_str(), q.dimension)).collect()
    }
}
