//! The user/day bipartite network and its one-mode projection.
//!
//! Users form one vertex class and (city, local date) pairs the other; a user
//! is adjacent to every day on which it tweeted. Projecting onto users gives
//! an undirected loopless multigraph whose parallel-edge count for `{u, v}`
//! is `|N(u) ∩ N(v)|`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::record::{City, EventCalendar, TweetRecord};
use crate::time::Day;

/// One vertex of the event class: a calendar date in a city.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DayKey {
    pub city: City,
    pub day: Day,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphMode {
    /// Only days listed in the event calendar for the tweet's city.
    EventDays,
    /// Every day with activity.
    AllDays,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BipartiteGraph {
    incidence: BTreeMap<String, BTreeSet<DayKey>>,
    tweet_counts: BTreeMap<String, u64>,
}

impl BipartiteGraph {
    /// Builds the graph from explicit neighbourhoods. Tweet counts default to
    /// the neighbourhood size.
    pub fn from_incidence<I, S, D>(incidence: I) -> Self
    where
        I: IntoIterator<Item = (S, D)>,
        S: Into<String>,
        D: IntoIterator<Item = DayKey>,
    {
        let mut graph = BipartiteGraph::default();
        for (user, days) in incidence {
            let user = user.into();
            let days: BTreeSet<DayKey> = days.into_iter().collect();
            graph.tweet_counts.insert(user.clone(), days.len() as u64);
            graph.incidence.insert(user, days);
        }
        graph
    }

    pub fn users(&self) -> impl Iterator<Item = &str> {
        self.incidence.keys().map(String::as_str)
    }

    pub fn user_count(&self) -> usize {
        self.incidence.len()
    }

    /// The event vertex set `V`.
    pub fn events(&self) -> BTreeSet<DayKey> {
        self.incidence.values().flatten().copied().collect()
    }

    /// `N(u)`; empty for unknown users.
    pub fn neighbourhood(&self, user: &str) -> Option<&BTreeSet<DayKey>> {
        self.incidence.get(user)
    }

    pub fn tweet_count(&self, user: &str) -> u64 {
        self.tweet_counts.get(user).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.incidence.is_empty()
    }
}

/// Builds the bipartite graph. `day_of` maps a tweet to its local calendar
/// date (time-zone handling stays with the caller).
///
/// In event-day mode only tweets falling on a calendar date of their city
/// contribute, and users without such tweets are absent. Node tweet counts
/// count the contributing tweets.
pub fn build_bipartite<F>(
    records: &[TweetRecord],
    mode: GraphMode,
    calendar: Option<&EventCalendar>,
    mut day_of: F,
) -> Result<BipartiteGraph>
where
    F: FnMut(&TweetRecord) -> Day,
{
    let calendar = match (mode, calendar) {
        (GraphMode::EventDays, None) => return Err(Error::MissingCalendar),
        (GraphMode::EventDays, Some(c)) => Some(c),
        (GraphMode::AllDays, _) => None,
    };
    let mut graph = BipartiteGraph::default();
    for record in records {
        let key = DayKey { city: record.city, day: day_of(record) };
        if let Some(calendar) = calendar {
            if !calendar.contains(key.city, key.day) {
                continue;
            }
        }
        if let Some(days) = graph.incidence.get_mut(&record.user_id) {
            days.insert(key);
            *graph.tweet_counts.get_mut(&record.user_id).expect("counted with incidence") += 1;
        } else {
            graph.incidence.insert(record.user_id.clone(), BTreeSet::from([key]));
            graph.tweet_counts.insert(record.user_id.clone(), 1);
        }
    }
    Ok(graph)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphNode {
    pub user_id: String,
    pub tweet_count: u64,
}

/// An undirected edge between node indices `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub a: u32,
    pub b: u32,
    pub multiplicity: u32,
}

/// Co-tweet multigraph. Nodes are sorted by user id; edges are sorted by
/// `(a, b)` with `a < b` and carry the parallel-edge count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoTweetMultigraph {
    nodes: Vec<GraphNode>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(u32, u32)>>,
}

impl CoTweetMultigraph {
    /// Assembles a graph from labelled parts. Repeated pairs are summed as
    /// further parallel edges. Self-loops, zero multiplicities, unknown
    /// endpoints and duplicate node ids are rejected.
    pub fn from_parts<N, E>(nodes: N, edges: E) -> core::result::Result<Self, String>
    where
        N: IntoIterator<Item = (String, u64)>,
        E: IntoIterator<Item = (String, String, u32)>,
    {
        let mut node_map = BTreeMap::new();
        for (user, count) in nodes {
            if node_map.insert(user.clone(), count).is_some() {
                return Err(alloc::format!("duplicate node {user:?}"));
            }
        }
        let nodes: Vec<GraphNode> =
            node_map.into_iter().map(|(user_id, tweet_count)| GraphNode { user_id, tweet_count }).collect();
        let index = |id: &str| {
            nodes
                .binary_search_by(|n| n.user_id.as_str().cmp(id))
                .map(|i| i as u32)
                .map_err(|_| alloc::format!("edge endpoint {id:?} is not a node"))
        };
        let mut pairs: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for (u, v, multiplicity) in edges {
            let (iu, iv) = (index(&u)?, index(&v)?);
            if iu == iv {
                return Err(alloc::format!("self-loop on {u:?}"));
            }
            if multiplicity == 0 {
                return Err(alloc::format!("zero multiplicity on {u:?} -- {v:?}"));
            }
            *pairs.entry((iu.min(iv), iu.max(iv))).or_insert(0) += multiplicity;
        }
        let edges = pairs.into_iter().map(|((a, b), multiplicity)| Edge { a, b, multiplicity }).collect();
        Ok(Self::assemble(nodes, edges))
    }

    fn assemble(nodes: Vec<GraphNode>, edges: Vec<Edge>) -> Self {
        let mut adjacency = alloc::vec![Vec::new(); nodes.len()];
        for e in &edges {
            adjacency[e.a as usize].push((e.b, e.multiplicity));
            adjacency[e.b as usize].push((e.a, e.multiplicity));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        CoTweetMultigraph { nodes, edges, adjacency }
    }

    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn index_of(&self, user: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.user_id.as_str().cmp(user)).ok()
    }

    /// Neighbours of node `i` with multiplicities, sorted by index.
    pub fn neighbours(&self, i: usize) -> &[(u32, u32)] {
        &self.adjacency[i]
    }

    /// Parallel-edge count between two users; zero when not adjacent.
    pub fn multiplicity(&self, u: &str, v: &str) -> u32 {
        match (self.index_of(u), self.index_of(v)) {
            (Some(i), Some(j)) => self.multiplicity_at(i, j),
            _ => 0,
        }
    }

    pub fn multiplicity_at(&self, i: usize, j: usize) -> u32 {
        self.adjacency[i].binary_search_by_key(&(j as u32), |&(n, _)| n).map(|k| self.adjacency[i][k].1).unwrap_or(0)
    }

    /// Sum of multiplicities over all edges (the `m` of modularity).
    pub fn total_multiplicity(&self) -> u64 {
        self.edges.iter().map(|e| e.multiplicity as u64).sum()
    }

    /// Weighted degree of node `i`.
    pub fn strength(&self, i: usize) -> u64 {
        self.adjacency[i].iter().map(|&(_, w)| w as u64).sum()
    }
}

/// One-mode projection onto users.
///
/// Works day by day: every pair of users active on the same day gains one
/// parallel edge. Pair counts are gathered by sorting, so the cost follows
/// the number of co-active pairs rather than all user pairs.
pub fn project(bipartite: &BipartiteGraph) -> CoTweetMultigraph {
    let nodes: Vec<GraphNode> = bipartite
        .incidence
        .keys()
        .map(|user| GraphNode { user_id: user.clone(), tweet_count: bipartite.tweet_count(user) })
        .collect();

    let mut by_day: BTreeMap<DayKey, Vec<u32>> = BTreeMap::new();
    for (i, days) in bipartite.incidence.values().enumerate() {
        for day in days {
            by_day.entry(*day).or_default().push(i as u32);
        }
    }

    let mut pairs: Vec<u64> = Vec::new();
    for users in by_day.values() {
        // users are pushed in increasing index order
        for (x, &a) in users.iter().enumerate() {
            for &b in &users[x + 1..] {
                pairs.push(((a as u64) << 32) | b as u64);
            }
        }
    }
    pairs.sort_unstable();

    let mut edges = Vec::new();
    for run in pairs.chunk_by(|x, y| x == y) {
        let key = run[0];
        edges.push(Edge { a: (key >> 32) as u32, b: key as u32, multiplicity: run.len() as u32 });
    }
    CoTweetMultigraph::assemble(nodes, edges)
}
