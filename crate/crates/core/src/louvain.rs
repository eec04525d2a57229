//! Modularity clustering with the Louvain method.
//!
//! Edge weights are the co-tweet multiplicities. Each level moves single
//! nodes to the neighbouring community with the largest modularity gain,
//! visiting nodes in a permutation drawn from the seed, then collapses
//! communities into super-nodes. Equal gains go to the lowest community id,
//! so a fixed seed always gives the same partition.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::CoTweetMultigraph;

const GAIN_EPS: f64 = 1e-10;
const MAX_SWEEPS: usize = 1_000;

/// Community assignment aligned with the node order of the graph it was
/// computed on.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    assignment: Vec<u32>,
    community_count: usize,
    pub modularity: f64,
}

impl Partition {
    /// Wraps an explicit assignment and computes its modularity. Community
    /// ids are renumbered in order of first appearance.
    pub fn from_assignment(graph: &CoTweetMultigraph, assignment: &[u32], resolution: f64) -> Self {
        let (assignment, community_count) = renumber(assignment);
        let modularity = modularity(graph, &assignment, resolution);
        Partition { assignment, community_count, modularity }
    }

    pub fn singletons(graph: &CoTweetMultigraph, resolution: f64) -> Self {
        let ids: Vec<u32> = (0..graph.node_count() as u32).collect();
        Self::from_assignment(graph, &ids, resolution)
    }

    /// Community of node index `i`.
    pub fn community(&self, i: usize) -> u32 {
        self.assignment[i]
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    /// Node indices per community, each list sorted.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.community_count];
        for (i, &c) in self.assignment.iter().enumerate() {
            groups[c as usize].push(i);
        }
        groups
    }
}

fn renumber(assignment: &[u32]) -> (Vec<u32>, usize) {
    let mut map: alloc::collections::BTreeMap<u32, u32> = Default::default();
    let out = assignment
        .iter()
        .map(|c| {
            let next = map.len() as u32;
            *map.entry(*c).or_insert(next)
        })
        .collect();
    (out, map.len())
}

/// Weighted modularity of `assignment`, computed from scratch:
/// `Q = Σ_c [ L_c / m − γ (d_c / 2m)² ]` with `L_c` the internal weight and
/// `d_c` the degree sum of community `c`. Zero for graphs without edges.
pub fn modularity(graph: &CoTweetMultigraph, assignment: &[u32], resolution: f64) -> f64 {
    assert_eq!(assignment.len(), graph.node_count(), "assignment must cover every node");
    let m = graph.total_multiplicity() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let communities = assignment.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut internal = vec![0.0f64; communities];
    let mut degree = vec![0.0f64; communities];
    for e in graph.edges() {
        let (ca, cb) = (assignment[e.a as usize] as usize, assignment[e.b as usize] as usize);
        let w = e.multiplicity as f64;
        if ca == cb {
            internal[ca] += w;
        }
        degree[ca] += w;
        degree[cb] += w;
    }
    internal.iter().zip(&degree).map(|(l, d)| l / m - resolution * (d / (2.0 * m)) * (d / (2.0 * m))).sum()
}

/// Result of a Louvain run with the modularity reached after each level.
/// The first trace entry is the singleton partition.
#[derive(Debug, Clone, PartialEq)]
pub struct LouvainRun {
    pub partition: Partition,
    pub level_modularity: Vec<f64>,
}

pub fn louvain(graph: &CoTweetMultigraph, seed: u64, resolution: f64) -> Partition {
    louvain_traced(graph, seed, resolution).partition
}

pub fn louvain_traced(graph: &CoTweetMultigraph, seed: u64, resolution: f64) -> LouvainRun {
    let n = graph.node_count();
    let singles = Partition::singletons(graph, resolution);
    let mut trace = vec![singles.modularity];
    if n <= 1 || graph.edge_count() == 0 {
        return LouvainRun { partition: singles, level_modularity: trace };
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = Level::from_graph(graph);
    // original node -> current super-node
    let mut membership: Vec<usize> = (0..n).collect();

    loop {
        let (communities, moved) = level.local_moves(&mut rng, resolution);
        if !moved {
            break;
        }
        let (dense, count) = renumber_usize(&communities);
        for m in membership.iter_mut() {
            *m = dense[*m];
        }
        let as_u32: Vec<u32> = membership.iter().map(|&c| c as u32).collect();
        trace.push(modularity(graph, &as_u32, resolution));
        if count == level.len() {
            break;
        }
        level = level.aggregate(&dense, count);
    }

    let as_u32: Vec<u32> = membership.iter().map(|&c| c as u32).collect();
    LouvainRun { partition: Partition::from_assignment(graph, &as_u32, resolution), level_modularity: trace }
}

fn renumber_usize(assignment: &[usize]) -> (Vec<usize>, usize) {
    let mut map = vec![usize::MAX; assignment.len()];
    let mut next = 0;
    let out = assignment
        .iter()
        .map(|&c| {
            if map[c] == usize::MAX {
                map[c] = next;
                next += 1;
            }
            map[c]
        })
        .collect();
    (out, next)
}

/// A graph level: super-nodes with self-loop weight and weighted adjacency.
struct Level {
    adjacency: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
    degree: Vec<f64>,
    two_m: f64,
}

impl Level {
    fn from_graph(graph: &CoTweetMultigraph) -> Self {
        let n = graph.node_count();
        let adjacency: Vec<Vec<(usize, f64)>> =
            (0..n).map(|i| graph.neighbours(i).iter().map(|&(j, w)| (j as usize, w as f64)).collect()).collect();
        let degree: Vec<f64> = adjacency.iter().map(|a| a.iter().map(|(_, w)| w).sum()).collect();
        let two_m = degree.iter().sum();
        Level { adjacency, self_loops: vec![0.0; n], degree, two_m }
    }

    fn len(&self) -> usize {
        self.adjacency.len()
    }

    /// One round of local moving until no node changes community.
    fn local_moves(&self, rng: &mut ChaCha8Rng, resolution: f64) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut community: Vec<usize> = (0..n).collect();
        let mut total: Vec<f64> = self.degree.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let mut weight_to = vec![0.0f64; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut any_move = false;

        for _ in 0..MAX_SWEEPS {
            let mut moved = false;
            for &i in &order {
                let k_i = self.degree[i];
                let current = community[i];
                for &(j, w) in &self.adjacency[i] {
                    let c = community[j];
                    if weight_to[c] == 0.0 {
                        touched.push(c);
                    }
                    weight_to[c] += w;
                }
                total[current] -= k_i;

                let gain = |c: usize, w: f64| w - resolution * total[c] * k_i / self.two_m;
                let stay = gain(current, weight_to[current]);
                let best = touched.iter().map(|&c| gain(c, weight_to[c])).fold(stay, f64::max);
                let target = if best > stay + GAIN_EPS {
                    touched
                        .iter()
                        .copied()
                        .filter(|&c| gain(c, weight_to[c]) >= best - GAIN_EPS)
                        .min()
                        .expect("best gain comes from a touched community")
                } else {
                    current
                };

                total[target] += k_i;
                community[i] = target;
                if target != current {
                    moved = true;
                }
                for c in touched.drain(..) {
                    weight_to[c] = 0.0;
                }
            }
            if !moved {
                break;
            }
            any_move = true;
        }
        (community, any_move)
    }

    fn aggregate(&self, community: &[usize], count: usize) -> Level {
        let mut self_loops = vec![0.0f64; count];
        let mut degree = vec![0.0f64; count];
        let mut weights: Vec<alloc::collections::BTreeMap<usize, f64>> = vec![Default::default(); count];
        for i in 0..self.len() {
            let ci = community[i];
            self_loops[ci] += self.self_loops[i];
            degree[ci] += self.degree[i];
            for &(j, w) in &self.adjacency[i] {
                let cj = community[j];
                if ci == cj {
                    // each internal edge is seen from both ends
                    self_loops[ci] += w / 2.0;
                } else {
                    *weights[ci].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        let adjacency = weights.into_iter().map(|m| m.into_iter().collect()).collect();
        Level { adjacency, self_loops, degree, two_m: self.two_m }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::{String, ToString};

    pub(crate) fn graph(n: usize, edges: &[(usize, usize, u32)]) -> CoTweetMultigraph {
        let name = |i: usize| alloc::format!("u{i:02}");
        CoTweetMultigraph::from_parts(
            (0..n).map(|i| (name(i), 1)),
            edges.iter().map(|&(a, b, w)| (name(a), name(b), w)),
        )
        .unwrap()
    }

    #[test]
    fn edgeless_graph_keeps_singletons() {
        let g = graph(4, &[]);
        let p = louvain(&g, 7, 1.0);
        assert_eq!(p.community_count(), 4);
        assert_eq!(p.modularity, 0.0);
    }

    #[test]
    fn single_node_is_one_community() {
        let g = CoTweetMultigraph::from_parts([(String::from("a"), 3)], core::iter::empty::<(String, String, u32)>())
            .unwrap();
        let p = louvain(&g, 0, 1.0);
        assert_eq!(p.community_count(), 1);
        assert_eq!(p.modularity, 0.0);
    }

    #[test]
    fn triangle_merges() {
        let g = graph(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]);
        let p = louvain(&g, 1, 1.0);
        assert_eq!(p.community_count(), 1);
        assert!(p.modularity.abs() < 1e-12);
    }

    #[test]
    fn modularity_of_known_split() {
        // two disjoint edges, split along them: Q = 2 * (1/2 - (2/4)^2) = 0.5
        let g = graph(4, &[(0, 1, 1), (2, 3, 1)]);
        assert!((modularity(&g, &[0, 0, 1, 1], 1.0) - 0.5).abs() < 1e-15);
        assert!((modularity(&g, &[0, 0, 0, 0], 1.0) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn weights_drive_the_split() {
        // a heavy pair and a heavy pair joined by light edges
        let g = graph(4, &[(0, 1, 9), (2, 3, 9), (1, 2, 1), (0, 3, 1)]);
        let p = louvain(&g, 3, 1.0);
        assert_eq!(p.assignment(), &[0, 0, 1, 1]);
    }

    #[test]
    fn same_seed_same_partition() {
        let mut edges = alloc::vec::Vec::new();
        for a in 0..30usize {
            for b in (a + 1)..30 {
                if (a * 7 + b * 13) % 5 == 0 {
                    edges.push((a, b, ((a + b) % 3 + 1) as u32));
                }
            }
        }
        let g = graph(30, &edges);
        let first = louvain(&g, 42, 1.0);
        for _ in 0..3 {
            assert_eq!(louvain(&g, 42, 1.0), first);
        }
        let run = louvain_traced(&g, 42, 1.0);
        assert!(run.level_modularity.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!((run.partition.modularity - modularity(&g, run.partition.assignment(), 1.0)).abs() < 1e-12);
        let _ = run.partition.members().iter().map(|m| m.len().to_string());
    }

    #[test]
    fn higher_resolution_never_gives_fewer_communities_on_a_ring_of_cliques() {
        let mut edges = alloc::vec::Vec::new();
        for c in 0..6usize {
            let base = c * 4;
            for a in 0..4 {
                for b in (a + 1)..4 {
                    edges.push((base + a, base + b, 1));
                }
            }
            edges.push((base + 3, (base + 4) % 24, 1));
        }
        let g = graph(24, &edges);
        let coarse = louvain(&g, 5, 0.5);
        let fine = louvain(&g, 5, 2.0);
        assert!(fine.community_count() >= coarse.community_count());
        assert_eq!(louvain(&g, 5, 1.0).community_count(), 6);
    }
}
