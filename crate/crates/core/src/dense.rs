//! Dense communities of the co-tweet graph: candidate bot rings and media
//! cores.
//!
//! Density is the mean multiplicity over all member pairs, absent pairs
//! counting as zero. Communities of one member have no pairs and are never
//! returned.

use alloc::string::String;
use alloc::vec::Vec;

use crate::graph::CoTweetMultigraph;
use crate::louvain::Partition;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseComponent {
    pub community: u32,
    /// Member user ids, sorted.
    pub members: Vec<String>,
    /// Sum of multiplicities over member pairs.
    pub internal_multiplicity: u64,
    pub mean_internal_multiplicity: f64,
}

impl DenseComponent {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Communities with at least `min_size` members and mean internal
/// multiplicity at least `min_internal_multiplicity`, densest first. Ties go
/// to the larger community, then to the lexicographically smallest member.
pub fn dense_components(
    graph: &CoTweetMultigraph,
    partition: &Partition,
    min_size: usize,
    min_internal_multiplicity: f64,
) -> Vec<DenseComponent> {
    assert_eq!(partition.assignment().len(), graph.node_count(), "partition must cover the graph");
    let mut internal = alloc::vec![0u64; partition.community_count()];
    for e in graph.edges() {
        let c = partition.community(e.a as usize);
        if c == partition.community(e.b as usize) {
            internal[c as usize] += e.multiplicity as u64;
        }
    }

    let mut out: Vec<DenseComponent> = partition
        .members()
        .into_iter()
        .enumerate()
        .filter_map(|(c, nodes)| {
            let size = nodes.len();
            if size < 2 || size < min_size {
                return None;
            }
            let pairs = (size * (size - 1) / 2) as f64;
            let mean = internal[c] as f64 / pairs;
            (mean >= min_internal_multiplicity).then(|| DenseComponent {
                community: c as u32,
                // node order is already sorted by user id
                members: nodes.iter().map(|&i| graph.nodes()[i].user_id.clone()).collect(),
                internal_multiplicity: internal[c],
                mean_internal_multiplicity: mean,
            })
        })
        .collect();

    out.sort_by(|x, y| {
        y.mean_internal_multiplicity
            .total_cmp(&x.mean_internal_multiplicity)
            .then(y.size().cmp(&x.size()))
            .then_with(|| x.members[0].cmp(&y.members[0]))
    });
    out
}
