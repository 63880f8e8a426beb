//! Structure config documents and their content hash.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classical::{FreeAbelian, FreeGroup};
use crate::error::{Error, Result};
use crate::graph_product::{GPGraph, GraphProduct};
use crate::plane::FreePlane;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexConfig {
    pub name: String,
    pub order: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StructureConfig {
    GraphProduct {
        vertices: Vec<VertexConfig>,
        #[serde(default)]
        edges: Vec<(String, String)>,
    },
    FreeAbelian {
        rank: usize,
    },
    FreeGroup {
        rank: usize,
    },
    #[serde(rename = "free_plane_4")]
    FreePlane4,
}

impl StructureConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Hex SHA-256 of the compact re-serialization, so formatting does not
    /// change the hash.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("configs serialize");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn build(&self) -> Result<LoadedStructure> {
        Ok(match self {
            StructureConfig::GraphProduct { vertices, edges } => {
                let g = GPGraph::new(
                    vertices.iter().map(|v| (v.name.clone(), v.order)).collect(),
                    edges.clone(),
                )?;
                LoadedStructure::GraphProduct(GraphProduct::new(g)?)
            }
            StructureConfig::FreeAbelian { rank } => LoadedStructure::FreeAbelian(FreeAbelian::new(*rank)?),
            StructureConfig::FreeGroup { rank } => LoadedStructure::FreeGroup(FreeGroup::new(*rank)?),
            StructureConfig::FreePlane4 => LoadedStructure::Plane(FreePlane::new()),
        })
    }
}

/// A built structure of any supported kind.
#[derive(Debug)]
pub enum LoadedStructure {
    GraphProduct(GraphProduct),
    FreeAbelian(FreeAbelian),
    FreeGroup(FreeGroup),
    Plane(FreePlane),
}

impl LoadedStructure {
    pub fn kind(&self) -> &'static str {
        match self {
            LoadedStructure::GraphProduct(_) => "graph_product",
            LoadedStructure::FreeAbelian(_) => "free_abelian",
            LoadedStructure::FreeGroup(_) => "free_group",
            LoadedStructure::Plane(_) => "free_plane_4",
        }
    }

    /// Caveat recorded in emitted documents about the chosen relators.
    pub fn presentation_note(&self) -> Option<&'static str> {
        match self {
            LoadedStructure::Plane(_) => {
                Some("psi uses S1(xi) and distinctness only; conjunct semantics depending on richer lattice relators are not covered")
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        let gp = StructureConfig::parse(
            r#"{"type":"graph_product","vertices":[{"name":"a","order":2},{"name":"b","order":2}],"edges":[]}"#,
        )
        .unwrap();
        assert_eq!(gp.build().unwrap().kind(), "graph_product");
        let z = StructureConfig::parse(r#"{"type":"free_abelian","rank":2}"#).unwrap();
        assert_eq!(z, StructureConfig::FreeAbelian { rank: 2 });
        let p = StructureConfig::parse(r#"{"type":"free_plane_4"}"#).unwrap();
        assert_eq!(p.build().unwrap().kind(), "free_plane_4");
        assert!(StructureConfig::parse(r#"{"type":"torus"}"#).is_err());
        assert!(StructureConfig::parse(r#"{"type":"free_group","rank":2,"extra":1}"#).is_err());
    }

    #[test]
    fn hash_ignores_whitespace() {
        let a = StructureConfig::parse(r#"{"type":"free_group","rank":2}"#).unwrap();
        let b = StructureConfig::parse("{ \"rank\" : 2,\n \"type\": \"free_group\" }").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        assert_ne!(a.hash(), StructureConfig::FreeGroup { rank: 3 }.hash());
    }
}
