//! Exhaustive enumeration over small graphs and all their signings.

use alloc::vec::Vec;

use super::signing::SignedAdjacency;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Every labelled simple graph on `n ≤ 6` vertices (`2^(n choose 2)` of them).
pub fn all_graphs(n: usize) -> Result<Vec<Graph>> {
    if n > 6 {
        return Err(Error::param("n", "enumeration limited to six vertices"));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0..1u64 << pairs.len())
        .map(|mask| {
            let edges = pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, e)| *e);
            Graph::unweighted(n, edges)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigningCensus {
    pub signings: u64,
    /// Signings with `trace(Ā³) ≠ 0`.
    pub trace_nonzero: u64,
    /// Per pair `i < j`: `(i, j, (A²)_ij, signings with (Ā²)_ij ≠ 0)`.
    pub pairs: Vec<(usize, usize, usize, u64)>,
}

impl SigningCensus {
    pub fn trace_fraction(&self) -> f64 {
        self.trace_nonzero as f64 / self.signings as f64
    }
}

/// Tally over all `2^m` signings of `g` (`m ≤ 20`).
pub fn signing_census(g: &Graph) -> Result<SigningCensus> {
    if g.m() > 20 {
        return Err(Error::param("g", "too many edges to enumerate signings"));
    }
    let n = g.n();
    let mut pairs: Vec<(usize, usize, usize, u64)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let common = g.neighbor_ids(i).iter().filter(|k| g.has_edge(**k, j)).count();
            pairs.push((i, j, common, 0));
        }
    }
    let signings = 1u64 << g.m();
    let mut trace_nonzero = 0;
    for mask in 0..signings {
        let sa = SignedAdjacency::from_mask(g, mask)?;
        if sa.trace_cube() != 0 {
            trace_nonzero += 1;
        }
        for p in pairs.iter_mut() {
            if sa.two_path(p.0, p.1)? != 0 {
                p.3 += 1;
            }
        }
    }
    Ok(SigningCensus {
        signings,
        trace_nonzero,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(all_graphs(4).unwrap().len(), 64);
        let c = signing_census(&Graph::complete(3)).unwrap();
        assert_eq!(c.signings, 8);
        assert_eq!(c.trace_nonzero, 8);
        // two 2-paths between opposite corners of C₄
        let c4 = signing_census(&Graph::cycle(4)).unwrap();
        let (_, _, paths, hits) = c4.pairs.iter().find(|p| p.0 == 0 && p.1 == 2).copied().unwrap();
        assert_eq!(paths, 2);
        assert_eq!(hits * 2, c4.signings);
    }
}
