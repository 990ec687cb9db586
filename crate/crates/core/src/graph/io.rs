//! Graph JSON: `{"n": int, "directed": bool, "edges": [[i, j, w], ...]}`, 0-based ids.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub directed: bool,
    pub edges: Vec<(usize, usize, f64)>,
}

impl From<&Graph> for GraphFile {
    fn from(g: &Graph) -> Self {
        GraphFile { n: g.n(), directed: g.directed(), edges: g.edges() }
    }
}

impl TryFrom<GraphFile> for Graph {
    type Error = crate::Error;

    fn try_from(f: GraphFile) -> Result<Self> {
        Graph::from_edges(f.n, f.directed, &f.edges)
    }
}

pub fn read_graph_json<R: Read>(reader: R) -> Result<Graph> {
    let file: GraphFile = serde_json::from_reader(reader)?;
    Graph::try_from(file)
}

pub fn write_graph_json<W: Write>(mut writer: W, g: &Graph) -> Result<()> {
    serde_json::to_writer(&mut writer, &GraphFile::from(g))?;
    writeln!(writer).map_err(|e| crate::Error::io("<graph output>", e))?;
    Ok(())
}
