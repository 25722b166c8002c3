//! Undirected interaction graph between agents.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Symmetric agent graph. Each neighbor set `N_i` is sorted ascending and
/// always contains `i` itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    adjacency: Vec<Vec<usize>>,
}

impl InteractionGraph {
    /// Build from an undirected edge list over nodes `0..n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Graph("graph needs at least one agent".into()));
        }
        let mut adjacency: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Graph(format!(
                    "edge ({u},{v}) out of range for n={n}"
                )));
            }
            if u == v {
                continue; // self-inclusion is implicit
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        Ok(Self { adjacency })
    }

    /// Build from explicit neighbor sets, validating symmetry and
    /// self-inclusion.
    pub fn from_neighbor_sets(adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let n = adjacency.len();
        if n == 0 {
            return Err(Error::Graph("graph needs at least one agent".into()));
        }
        let mut sorted = adjacency;
        for (i, nbrs) in sorted.iter_mut().enumerate() {
            nbrs.sort_unstable();
            nbrs.dedup();
            if nbrs.iter().any(|&j| j >= n) {
                return Err(Error::Graph(format!("agent {i} lists a neighbor >= n")));
            }
            if !nbrs.contains(&i) {
                return Err(Error::Graph(format!(
                    "agent {i} must be in its own neighbor set"
                )));
            }
        }
        for i in 0..n {
            for &j in &sorted[i] {
                if !sorted[j].contains(&i) {
                    return Err(Error::Graph(format!(
                        "asymmetric adjacency: {j} in N_{i} but {i} not in N_{j}"
                    )));
                }
            }
        }
        Ok(Self { adjacency: sorted })
    }

    /// Path graph 0-1-...-(n-1).
    pub fn line(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges).expect("line graph is always valid")
    }

    /// Grid graph with 4-neighbor connectivity. Nodes are numbered with the
    /// row index varying fastest, so thin grids stay low-bandwidth.
    pub fn grid(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Graph("grid needs positive dimensions".into()));
        }
        let id = |r: usize, c: usize| r + c * rows;
        let mut edges = Vec::new();
        for c in 0..cols {
            for r in 0..rows {
                if r + 1 < rows {
                    edges.push((id(r, c), id(r + 1, c)));
                }
                if c + 1 < cols {
                    edges.push((id(r, c), id(r, c + 1)));
                }
            }
        }
        Self::from_edges(rows * cols, &edges)
    }

    pub fn num_agents(&self) -> usize {
        self.adjacency.len()
    }

    /// One-hop neighborhood `N_i`, sorted, including `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// `κ`-hop neighborhood `N_i^κ`: all agents at graph distance <= κ,
    /// sorted, including `i`.
    pub fn kappa_neighborhood(&self, i: usize, kappa: usize) -> Result<Vec<usize>> {
        let n = self.num_agents();
        if i >= n {
            return Err(Error::IndexRange(format!(
                "agent {i} out of range for n={n}"
            )));
        }
        let dist = self.distances_from(i);
        let mut out: Vec<usize> = (0..n)
            .filter(|&j| dist[j].map(|d| d <= kappa).unwrap_or(false))
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Complement `N_{-i}^κ` of the κ-hop neighborhood.
    pub fn kappa_complement(&self, i: usize, kappa: usize) -> Result<Vec<usize>> {
        let inside = self.kappa_neighborhood(i, kappa)?;
        Ok((0..self.num_agents())
            .filter(|j| !inside.contains(j))
            .collect())
    }

    fn distances_from(&self, i: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_agents()];
        dist[i] = Some(0);
        let mut queue = VecDeque::from([i]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Largest finite pairwise distance. Disconnected pairs are ignored,
    /// matching how κ-hop neighborhoods saturate per component.
    pub fn diameter(&self) -> usize {
        (0..self.num_agents())
            .flat_map(|i| self.distances_from(i).into_iter().flatten())
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_middle_one_hop() {
        let g = InteractionGraph::line(5);
        assert_eq!(g.kappa_neighborhood(2, 1).unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn kappa_zero_is_self() {
        let g = InteractionGraph::grid(3, 3).unwrap();
        for i in 0..9 {
            assert_eq!(g.kappa_neighborhood(i, 0).unwrap(), vec![i]);
        }
    }

    #[test]
    fn kappa_at_diameter_covers_all() {
        let g = InteractionGraph::line(6);
        assert_eq!(g.diameter(), 5);
        let all: Vec<usize> = (0..6).collect();
        assert_eq!(g.kappa_neighborhood(0, 5).unwrap(), all);
        assert_eq!(g.kappa_neighborhood(0, 17).unwrap(), all);
    }

    #[test]
    fn neighborhoods_are_monotone_in_kappa() {
        let g = InteractionGraph::grid(2, 3).unwrap();
        for i in 0..6 {
            let mut prev = Vec::new();
            for kappa in 0..=g.diameter() + 1 {
                let cur = g.kappa_neighborhood(i, kappa).unwrap();
                assert!(prev.iter().all(|j| cur.contains(j)));
                prev = cur;
            }
        }
    }

    #[test]
    fn asymmetric_sets_rejected() {
        let bad = vec![vec![0, 1], vec![1]];
        assert!(InteractionGraph::from_neighbor_sets(bad).is_err());
        let no_self = vec![vec![1], vec![0, 1]];
        assert!(InteractionGraph::from_neighbor_sets(no_self).is_err());
    }

    #[test]
    fn out_of_range_agent_rejected() {
        let g = InteractionGraph::line(3);
        assert!(g.kappa_neighborhood(3, 1).is_err());
    }
}
