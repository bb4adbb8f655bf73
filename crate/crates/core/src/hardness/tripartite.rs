use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Random 3-labelling of `G`: `H` keeps only `V₁–V₃` and `V₂–V₃` edges, and
/// `E₁₂` lists the `V₁–V₂` edges as `(i ∈ V₁, j ∈ V₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TripartiteInstance {
    pub labels: Vec<u8>,
    pub h: Graph,
    pub e12: Vec<(usize, usize)>,
    pub seed: Option<u64>,
}

impl TripartiteInstance {
    pub fn from_labels(g: &Graph, labels: Vec<u8>) -> Result<Self> {
        if !g.is_unweighted() {
            return Err(Error::WeightedInput);
        }
        if labels.len() != g.n() || labels.iter().any(|l| *l > 2) {
            return Err(Error::param("labels", "need one label in {0, 1, 2} per vertex"));
        }
        let mut h_edges = Vec::new();
        let mut e12 = Vec::new();
        for &(u, v, _) in g.edges() {
            match (labels[u], labels[v]) {
                (a, b) if a == b => {}
                (0, 1) => e12.push((u, v)),
                (1, 0) => e12.push((v, u)),
                _ => h_edges.push((u, v)),
            }
        }
        let h = Graph::unweighted(g.n(), h_edges)?;
        Ok(Self {
            labels,
            h,
            e12,
            seed: None,
        })
    }

    pub fn part_sizes(&self) -> [usize; 3] {
        let mut s = [0; 3];
        for &l in &self.labels {
            s[l as usize] += 1;
        }
        s
    }
}

pub fn sample_tripartite(g: &Graph, seed: u64) -> Result<TripartiteInstance> {
    let mut rng = crate::seed::rng(seed);
    let labels = (0..g.n()).map(|_| rng.random_range(0..3u8)).collect();
    let mut inst = TripartiteInstance::from_labels(g, labels)?;
    inst.seed = Some(seed);
    Ok(inst)
}
