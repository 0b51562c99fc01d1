use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{AssessmentModel, DecisionMap, Dimension, Sign};

/// Simple path of positive edges: a cascade of reinforcing effects.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SynergyChain {
    pub path: Vec<String>,
    pub dimensions_crossed: BTreeSet<Dimension>,
    /// Dimensions along the path with consecutive repeats collapsed.
    pub dimension_sequence: Vec<Dimension>,
    pub length: usize,
}

impl fmt::Display for SynergyChain {
    /// `a → b → c [T→S→Ec]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<&str> = self.dimension_sequence.iter().map(|d| d.code()).collect();
        write!(f, "{} [{}]", self.path.join(" → "), dims.join("→"))
    }
}

/// Every simple all-positive path with at least `min_length` edges.
///
/// Sorted longest first, then lexicographically by path. Enumeration is
/// exhaustive, which is fine for decision maps of a few dozen concerns but
/// grows factorially on dense graphs.
pub fn find_synergy_chains(dmap: &DecisionMap, model: &AssessmentModel, min_length: usize) -> Vec<SynergyChain> {
    let min_length = min_length.max(1);
    let mut adjacency: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for edge in dmap.edges.iter().filter(|e| e.sign == Sign::Positive && e.from != e.to) {
        adjacency.entry(edge.from.as_str()).or_default().insert(edge.to.as_str());
    }

    let dimension_of = |qa: &str| model.qa(qa).map(|q| q.dimension).or_else(|| dmap.node(qa).and_then(|n| n.dimension));

    let mut paths = Vec::new();
    let mut stack = Vec::new();
    for start in adjacency.keys() {
        stack.push(*start);
        walk(&adjacency, &mut stack, min_length, &mut paths);
        stack.pop();
    }

    let mut chains: Vec<SynergyChain> = paths
        .into_iter()
        .map(|path| {
            let dims: Vec<Dimension> = path.iter().filter_map(|qa| dimension_of(qa)).collect();
            let mut sequence = dims.clone();
            sequence.dedup();
            SynergyChain {
                length: path.len() - 1,
                dimensions_crossed: dims.into_iter().collect(),
                dimension_sequence: sequence,
                path,
            }
        })
        .collect();
    chains.sort_by(|a, b| b.length.cmp(&a.length).then_with(|| a.path.cmp(&b.path)));
    chains
}

fn walk<'a>(
    adjacency: &BTreeMap<&'a str, BTreeSet<&'a str>>,
    stack: &mut Vec<&'a str>,
    min_length: usize,
    out: &mut Vec<Vec<String>>,
) {
    let Some(next) = adjacency.get(stack.last().expect("non-empty stack")) else { return };
    for to in next {
        if stack.contains(to) {
            continue;
        }
        stack.push(to);
        if stack.len() > min_length {
            out.push(stack.iter().map(|s| s.to_string()).collect());
        }
        walk(adjacency, stack, min_length, out);
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DmapEdge, DmapNode, Level, QualityAttribute, WeightConfig};

    fn model(qas: &[(&str, Dimension)]) -> AssessmentModel {
        AssessmentModel {
            schema_version: "1".into(),
            weights: WeightConfig::default(),
            quality_attributes: qas
                .iter()
                .map(|(id, d)| QualityAttribute {
                    id: id.to_string(),
                    name: id.to_string(),
                    definition: String::new(),
                    dimension: *d,
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

    fn dmap(edges: &[(&str, &str, i64)]) -> DecisionMap {
        let mut ids: Vec<&str> = edges.iter().flat_map(|(a, b, _)| [*a, *b]).collect();
        ids.sort();
        ids.dedup();
        DecisionMap {
            nodes: ids.iter().map(|q| DmapNode { qa: q.to_string(), dimension: None, impact_level: None }).collect(),
            edges: edges
                .iter()
                .map(|(a, b, s)| DmapEdge {
                    from: a.to_string(),
                    to: b.to_string(),
                    sign: Sign::try_from(*s).unwrap(),
                    impact_level: None,
                    rationale: None,
                })
                .collect(),
        }
    }

    #[test]
    fn traceability_cascade() {
        use Dimension::*;
        let m = model(&[
            ("traceability", T),
            ("transparency", S),
            ("stake_of_beneficiary", Ec),
            ("monetary_costs", Ec),
        ]);
        let map = dmap(&[
            ("traceability", "transparency", 1),
            ("transparency", "stake_of_beneficiary", 1),
            ("stake_of_beneficiary", "monetary_costs", 1),
        ]);
        let chains = find_synergy_chains(&map, &m, 3);
        assert_eq!(chains.len(), 1);
        let chain = &chains[0];
        assert_eq!(chain.length, 3);
        assert_eq!(chain.dimensions_crossed, BTreeSet::from([T, S, Ec]));
        assert_eq!(
            chain.to_string(),
            "traceability → transparency → stake_of_beneficiary → monetary_costs [T→S→Ec]"
        );
    }

    #[test]
    fn negative_edges_never_chain() {
        let m = model(&[("a", Dimension::T), ("b", Dimension::T)]);
        assert!(find_synergy_chains(&dmap(&[("a", "b", -1)]), &m, 1).is_empty());
    }

    #[test]
    fn cycles_are_not_followed() {
        let m = model(&[("a", Dimension::T), ("b", Dimension::T)]);
        let chains = find_synergy_chains(&dmap(&[("a", "b", 1), ("b", "a", 1)]), &m, 1);
        let paths: Vec<_> = chains.iter().map(|c| c.path.join(">")).collect();
        assert_eq!(paths, ["a>b", "b>a"]);
    }

    #[test]
    fn mixed_sign_cascade_is_cut() {
        let m = model(&[("a", Dimension::T), ("b", Dimension::T), ("c", Dimension::S)]);
        let chains = find_synergy_chains(&dmap(&[("a", "b", 1), ("b", "c", -1)]), &m, 2);
        assert!(chains.is_empty());
    }
}
