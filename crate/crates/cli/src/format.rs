//! JSON instance files.

use std::collections::BTreeMap;
use std::sync::Arc;

use repset_core::{
    BcInstance, Constraint, Element, ElementId, GraphicMatroid, IdSet, MatchingGraph, Matroid, PartitionMatroid,
    UniformMatroid,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Edge maps keyed by element id. JSON object keys are strings, and tagged
/// enums buffer their content, so the keys are converted explicitly.
mod edge_map {
    use std::collections::BTreeMap;

    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(edges: &BTreeMap<u32, [u32; 2]>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(edges.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u32, [u32; 2]>, D::Error> {
        let keyed = BTreeMap::<String, [u32; 2]>::deserialize(d)?;
        keyed
            .into_iter()
            .map(|(k, v)| k.parse::<u32>().map(|id| (id, v)).map_err(|_| D::Error::custom(format!("edge key {k:?} is not an id"))))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub id: u32,
    pub cost: u64,
    pub profit: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatroidSpec {
    /// Ground set is every element of the file.
    Uniform { rank: usize },
    Partition { blocks: Vec<Vec<u32>>, capacities: Vec<usize> },
    Graphic {
        vertices: u32,
        #[serde(with = "edge_map")]
        edges: BTreeMap<u32, [u32; 2]>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConstraintSpec {
    Matching {
        vertices: u32,
        #[serde(with = "edge_map")]
        edges: BTreeMap<u32, [u32; 2]>,
    },
    MatroidIntersection { matroids: [MatroidSpec; 2] },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub version: u32,
    pub elements: Vec<ElementRecord>,
    pub constraint: ConstraintSpec,
    pub budget: u64,
}

impl MatroidSpec {
    fn build(&self, all: &IdSet) -> Result<Arc<dyn Matroid>, CliError> {
        Ok(match self {
            MatroidSpec::Uniform { rank } => Arc::new(UniformMatroid::new(all.clone(), *rank)),
            MatroidSpec::Partition { blocks, capacities } => Arc::new(PartitionMatroid::new(
                blocks.iter().map(|b| b.iter().map(|&i| ElementId(i)).collect()).collect(),
                capacities.clone(),
            )?),
            MatroidSpec::Graphic { vertices, edges } => {
                Arc::new(GraphicMatroid::new(*vertices, edges.iter().map(|(&id, &[u, v])| (ElementId(id), (u, v))))?)
            }
        })
    }
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| CliError::Input(e.to_string()))?;
        if file.version != SCHEMA_VERSION {
            return Err(CliError::Input(format!("unsupported schema version {}", file.version)));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("instance files always serialize");
        text.push('\n');
        text
    }

    /// Builds and validates the instance.
    pub fn to_instance(&self) -> Result<BcInstance, CliError> {
        let elements: Vec<Element> = self.elements.iter().map(|e| Element::new(e.id, e.cost, e.profit)).collect();
        let all: IdSet = elements.iter().map(|e| e.id).collect();
        let constraint = match &self.constraint {
            ConstraintSpec::Matching { vertices, edges } => Constraint::Matching(MatchingGraph::new(
                *vertices,
                edges.iter().map(|(&id, &[u, v])| (ElementId(id), (u, v))),
            )),
            ConstraintSpec::MatroidIntersection { matroids: [a, b] } => {
                Constraint::matroid_intersection(a.build(&all)?, b.build(&all)?)
            }
        };
        Ok(BcInstance::new(elements, constraint, self.budget)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_file_round_trip() {
        let text = r#"{
            "version": 1,
            "elements": [{"id": 0, "cost": 2, "profit": 5}, {"id": 1, "cost": 3, "profit": 4}],
            "constraint": {"type": "matching", "vertices": 3, "edges": {"0": [0, 1], "1": [1, 2]}},
            "budget": 4
        }"#;
        let file = InstanceFile::parse(text).unwrap();
        assert_eq!(InstanceFile::parse(&file.to_json()).unwrap(), file);
        let inst = file.to_instance().unwrap();
        assert_eq!(inst.len(), 2);
        assert_eq!(inst.budget(), 4);
    }

    #[test]
    fn matroid_descriptors_parse() {
        let text = r#"{
            "version": 1,
            "elements": [{"id": 0, "cost": 1, "profit": 1}, {"id": 1, "cost": 1, "profit": 1}],
            "constraint": {"type": "matroid_intersection", "matroids": [
                {"kind": "partition", "blocks": [[0, 1]], "capacities": [1]},
                {"kind": "uniform", "rank": 2}
            ]},
            "budget": 2
        }"#;
        let inst = InstanceFile::parse(text).unwrap().to_instance().unwrap();
        assert!(!inst.constraint().is_feasible(&inst.ids()).unwrap());
    }

    #[test]
    fn dangling_edge_is_invalid_input() {
        let text = r#"{
            "version": 1,
            "elements": [{"id": 0, "cost": 1, "profit": 1}],
            "constraint": {"type": "matching", "vertices": 2, "edges": {"0": [0, 1], "7": [0, 1]}},
            "budget": 1
        }"#;
        let err = InstanceFile::parse(text).unwrap().to_instance().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("dangling id 7"));
    }

    #[test]
    fn wrong_version_is_rejected() {
        let text = r#"{"version": 9, "elements": [], "constraint": {"type": "matching", "vertices": 0, "edges": {}}, "budget": 0}"#;
        assert!(matches!(InstanceFile::parse(text), Err(CliError::Input(_))));
    }
}
