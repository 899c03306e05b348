//! JSON graph files: `{"n": 3, "edges": [[i, j, w], ...]}` with 0-based
//! indices, `i` the influenced agent and `j` the influencer.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SocialGraph;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl From<&SocialGraph> for GraphFile {
    fn from(g: &SocialGraph) -> Self {
        Self {
            n: g.n(),
            edges: g.edges(),
        }
    }
}

impl GraphFile {
    /// Converts to a graph, failing unless every invariant holds.
    pub fn into_graph(self) -> Result<SocialGraph> {
        let g = SocialGraph::from_edges(self.n, &self.edges)?;
        g.ensure_valid()?;
        Ok(g)
    }
}

pub fn read_graph<R: Read>(reader: R) -> Result<SocialGraph> {
    let file: GraphFile = serde_json::from_reader(reader)?;
    file.into_graph()
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<SocialGraph> {
    let f = std::fs::File::open(path)?;
    read_graph(std::io::BufReader::new(f))
}

pub fn write_graph<W: Write>(g: &SocialGraph, writer: W) -> Result<()> {
    serde_json::to_writer(writer, &GraphFile::from(g))?;
    Ok(())
}
