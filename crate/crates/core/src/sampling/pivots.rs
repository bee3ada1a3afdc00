use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::subgraph::subgraph_size_capped;
use super::{SamplingError, DEFAULT_MAX_HOPS};
use crate::kg::{KnowledgeGraph, NodeId};

/// Which nodes may serve as pivots: the `top_k` nodes by out-degree plus
/// every node whose `radius`-hop subgraph has at least `min_subgraph_size`
/// members. Nodes without out-edges never qualify.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PivotCriteria {
    pub top_k: usize,
    pub min_subgraph_size: usize,
    pub radius: usize,
}

impl Default for PivotCriteria {
    fn default() -> Self {
        Self { top_k: 2000, min_subgraph_size: 2000, radius: DEFAULT_MAX_HOPS }
    }
}

impl PivotCriteria {
    /// Qualifying nodes in id order.
    pub fn pool(&self, graph: &KnowledgeGraph) -> Vec<NodeId> {
        let mut by_degree: Vec<(&NodeId, usize)> =
            graph.node_ids().map(|id| (id, graph.out_degree(id))).filter(|&(_, d)| d > 0).collect();
        by_degree.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let mut pool: BTreeSet<&NodeId> = by_degree.iter().take(self.top_k).map(|&(id, _)| id).collect();
        if self.min_subgraph_size > 0 {
            for &(id, _) in &by_degree[self.top_k.min(by_degree.len())..] {
                if subgraph_size_capped(graph, id, self.radius, self.min_subgraph_size) >= self.min_subgraph_size {
                    pool.insert(id);
                }
            }
        }
        pool.into_iter().cloned().collect()
    }
}

/// Draws `count` distinct pivots uniformly from the qualifying pool.
pub fn select_pivots<R: Rng + ?Sized>(
    graph: &KnowledgeGraph,
    count: usize,
    criteria: &PivotCriteria,
    rng: &mut R,
) -> Result<Vec<NodeId>, SamplingError> {
    let pool = criteria.pool(graph);
    if pool.len() < count {
        return Err(SamplingError::PoolTooSmall { available: pool.len(), requested: count });
    }
    Ok(index::sample(rng, pool.len(), count).into_iter().map(|i| pool[i].clone()).collect())
}

/// One id per line.
pub fn write_pivots<W: Write>(pivots: &[NodeId], mut out: W) -> std::io::Result<()> {
    for p in pivots {
        writeln!(out, "{p}")?;
    }
    out.flush()
}

/// Reads a pivot file, skipping blank lines and `#` comments.
pub fn read_pivots<R: BufRead>(input: R) -> std::io::Result<Vec<NodeId>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        let t = line.trim();
        if !t.is_empty() && !t.starts_with('#') {
            out.push(NodeId::new(t));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::graph_from_edges;
    use crate::seed::derive_rng;

    fn star() -> KnowledgeGraph {
        graph_from_edges(&[
            ("A", "X", "r"),
            ("A", "Y", "r"),
            ("A", "Z", "r"),
            ("B", "X", "r"),
            ("B", "Y", "r"),
            ("C", "X", "r"),
        ])
    }

    #[test]
    fn top_k_pool() {
        let g = star();
        let crit = PivotCriteria { top_k: 2, min_subgraph_size: 0, radius: 4 };
        for s in 0..50 {
            let p = select_pivots(&g, 1, &crit, &mut derive_rng(s, &[])).unwrap();
            assert!(p[0].as_str() == "A" || p[0].as_str() == "B");
        }
        let p = select_pivots(&g, 2, &crit, &mut derive_rng(1, &[])).unwrap();
        assert_ne!(p[0], p[1]);
    }

    #[test]
    fn subgraph_size_adds_to_pool() {
        let g = star();
        let crit = PivotCriteria { top_k: 1, min_subgraph_size: 3, radius: 1 };
        assert_eq!(crit.pool(&g), vec![NodeId::from("A"), NodeId::from("B")]);
    }

    #[test]
    fn pool_too_small() {
        let g = star();
        let crit = PivotCriteria { top_k: 2, min_subgraph_size: 0, radius: 4 };
        assert_eq!(
            select_pivots(&g, 3, &crit, &mut derive_rng(0, &[])),
            Err(SamplingError::PoolTooSmall { available: 2, requested: 3 })
        );
    }

    #[test]
    fn pivot_file_round_trip() {
        let ids = vec![NodeId::from("Q1"), NodeId::from("Q22")];
        let mut buf = Vec::new();
        write_pivots(&ids, &mut buf).unwrap();
        assert_eq!(read_pivots(&buf[..]).unwrap(), ids);
    }
}
