//! Compact indexed graph with deterministic shortest-path routing.
//!
//! All path queries are canonical: among equal-cost paths the one with the
//! lexicographically smallest node sequence is returned, so every consumer
//! (ride synthesis, target selection, the simulator) agrees on routes and
//! results are reproducible run to run.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use sha2::{Digest, Sha256};

use crate::geo::GeoCoord;
use crate::road_network::{NodeId, RoadNetwork};

/// Edge weight used for shortest paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Street length in meters.
    Length,
    /// Unit weight per edge (hop count).
    Hops,
}

#[derive(Debug, Clone, Copy)]
pub struct CompactEdge {
    pub from: u32,
    pub to: u32,
    pub length_m: f64,
    pub lanes: u8,
}

impl CompactEdge {
    fn weight(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Length => self.length_m,
            Metric::Hops => 1.0,
        }
    }
}

/// A directed path as node and edge index sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub nodes: Vec<u32>,
    pub edges: Vec<u32>,
    pub length_m: f64,
}

/// Immutable array-backed view of a [`RoadNetwork`].
///
/// Node index order follows ascending node id; edge index order follows
/// ascending (from, to), which makes edge indices the deterministic
/// tie-break order used throughout the crate.
pub struct CompactGraph {
    node_ids: Vec<NodeId>,
    coords: Vec<GeoCoord>,
    edges: Vec<CompactEdge>,
    out_start: Vec<u32>,
    in_edges: Vec<u32>,
    in_start: Vec<u32>,
    fingerprint: String,
}

impl CompactGraph {
    pub fn from_network(net: &RoadNetwork) -> Self {
        let node_ids: Vec<NodeId> = net.node_ids().collect();
        let coords: Vec<GeoCoord> = node_ids.iter().map(|id| net.coord(*id).unwrap()).collect();
        let idx_of = |id: NodeId| node_ids.binary_search(&id).unwrap() as u32;

        // BTreeMap iteration is already sorted by (from, to).
        let edges: Vec<CompactEdge> = net
            .edge_iter()
            .map(|((u, v), attrs)| CompactEdge {
                from: idx_of(u),
                to: idx_of(v),
                length_m: attrs.length_m,
                lanes: attrs.lanes,
            })
            .collect();

        let n = node_ids.len();
        let mut out_start = vec![0u32; n + 1];
        for e in &edges {
            out_start[e.from as usize + 1] += 1;
        }
        for i in 0..n {
            out_start[i + 1] += out_start[i];
        }

        let mut in_start = vec![0u32; n + 1];
        for e in &edges {
            in_start[e.to as usize + 1] += 1;
        }
        for i in 0..n {
            in_start[i + 1] += in_start[i];
        }
        let mut cursor = in_start.clone();
        let mut in_edges = vec![0u32; edges.len()];
        for (i, e) in edges.iter().enumerate() {
            in_edges[cursor[e.to as usize] as usize] = i as u32;
            cursor[e.to as usize] += 1;
        }

        let mut hasher = Sha256::new();
        for (id, c) in node_ids.iter().zip(&coords) {
            hasher.update(id.0.to_be_bytes());
            hasher.update(c.lat.to_bits().to_be_bytes());
            hasher.update(c.lon.to_bits().to_be_bytes());
        }
        for e in &edges {
            hasher.update(e.from.to_be_bytes());
            hasher.update(e.to.to_be_bytes());
            hasher.update(e.length_m.to_bits().to_be_bytes());
            hasher.update([e.lanes]);
        }
        let fingerprint = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();

        Self {
            node_ids,
            coords,
            edges,
            out_start,
            in_edges,
            in_start,
            fingerprint,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_id(&self, idx: u32) -> NodeId {
        self.node_ids[idx as usize]
    }

    pub fn node_idx(&self, id: NodeId) -> Option<u32> {
        self.node_ids.binary_search(&id).ok().map(|i| i as u32)
    }

    pub fn coord(&self, idx: u32) -> GeoCoord {
        self.coords[idx as usize]
    }

    pub fn edge(&self, idx: u32) -> &CompactEdge {
        &self.edges[idx as usize]
    }

    pub fn edges(&self) -> &[CompactEdge] {
        &self.edges
    }

    /// Endpoint node ids of an edge, for reports and serialization.
    pub fn edge_endpoints(&self, idx: u32) -> (NodeId, NodeId) {
        let e = self.edge(idx);
        (self.node_id(e.from), self.node_id(e.to))
    }

    pub fn edge_index(&self, from: u32, to: u32) -> Option<u32> {
        let lo = self.out_start[from as usize] as usize;
        let hi = self.out_start[from as usize + 1] as usize;
        self.edges[lo..hi]
            .binary_search_by_key(&to, |e| e.to)
            .ok()
            .map(|off| (lo + off) as u32)
    }

    /// Out-edge indices of a node, ascending by target node index.
    pub fn out_edges(&self, node: u32) -> impl Iterator<Item = u32> + '_ {
        let lo = self.out_start[node as usize];
        let hi = self.out_start[node as usize + 1];
        lo..hi
    }

    pub fn in_edges(&self, node: u32) -> impl Iterator<Item = u32> + '_ {
        let lo = self.in_start[node as usize] as usize;
        let hi = self.in_start[node as usize + 1] as usize;
        self.in_edges[lo..hi].iter().copied()
    }

    /// Content hash of the graph, used to pair logs with the network that
    /// produced them.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Distance from every node to `target` (infinity where unreachable).
    pub fn dist_to_target(&self, target: u32, metric: Metric, blocked: Option<&[bool]>) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.node_count()];
        dist[target as usize] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(HeapItem { dist: 0.0, node: target });
        while let Some(HeapItem { dist: d, node }) = heap.pop() {
            if d > dist[node as usize] {
                continue;
            }
            for eidx in self.in_edges(node) {
                if blocked.is_some_and(|b| b[eidx as usize]) {
                    continue;
                }
                let e = self.edge(eidx);
                let cand = d + e.weight(metric);
                if cand < dist[e.from as usize] {
                    dist[e.from as usize] = cand;
                    heap.push(HeapItem { dist: cand, node: e.from });
                }
            }
        }
        dist
    }

    /// Distance from `source` to every node (infinity where unreachable).
    pub fn dist_from_source(&self, source: u32, metric: Metric, blocked: Option<&[bool]>) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.node_count()];
        dist[source as usize] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(HeapItem { dist: 0.0, node: source });
        while let Some(HeapItem { dist: d, node }) = heap.pop() {
            if d > dist[node as usize] {
                continue;
            }
            for eidx in self.out_edges(node) {
                if blocked.is_some_and(|b| b[eidx as usize]) {
                    continue;
                }
                let e = self.edge(eidx);
                let cand = d + e.weight(metric);
                if cand < dist[e.to as usize] {
                    dist[e.to as usize] = cand;
                    heap.push(HeapItem { dist: cand, node: e.to });
                }
            }
        }
        dist
    }

    /// Hop count of a shortest unweighted path, `None` if unreachable.
    pub fn hop_distance(&self, source: u32, target: u32, blocked: Option<&[bool]>) -> Option<u32> {
        if source == target {
            return Some(0);
        }
        let mut seen = vec![false; self.node_count()];
        seen[source as usize] = true;
        let mut queue = VecDeque::new();
        queue.push_back((source, 0u32));
        while let Some((node, d)) = queue.pop_front() {
            for eidx in self.out_edges(node) {
                if blocked.is_some_and(|b| b[eidx as usize]) {
                    continue;
                }
                let to = self.edge(eidx).to;
                if to == target {
                    return Some(d + 1);
                }
                if !seen[to as usize] {
                    seen[to as usize] = true;
                    queue.push_back((to, d + 1));
                }
            }
        }
        None
    }

    /// Canonical shortest path from `source` to `target` given precomputed
    /// distances to `target` (from [`Self::dist_to_target`] with the same
    /// metric and mask). Among equal-cost paths, returns the one whose node
    /// sequence is lexicographically smallest.
    pub fn canonical_path_via(
        &self,
        source: u32,
        target: u32,
        dist_to: &[f64],
        metric: Metric,
        blocked: Option<&[bool]>,
    ) -> Option<Path> {
        if !dist_to[source as usize].is_finite() {
            return None;
        }
        let mut nodes = vec![source];
        let mut edges = Vec::new();
        let mut length_m = 0.0;
        let mut u = source;
        while u != target {
            let mut step = None;
            for eidx in self.out_edges(u) {
                if blocked.is_some_and(|b| b[eidx as usize]) {
                    continue;
                }
                let e = self.edge(eidx);
                // Out-edges iterate ascending by target index, so the first
                // hit is the smallest next node among tight edges.
                if e.weight(metric) + dist_to[e.to as usize] == dist_to[u as usize] {
                    step = Some(eidx);
                    break;
                }
            }
            let eidx = step.expect("distance table inconsistent with graph");
            let e = self.edge(eidx);
            length_m += e.length_m;
            edges.push(eidx);
            nodes.push(e.to);
            u = e.to;
        }
        Some(Path { nodes, edges, length_m })
    }

    /// One-shot canonical shortest path.
    pub fn canonical_path(
        &self,
        source: u32,
        target: u32,
        metric: Metric,
        blocked: Option<&[bool]>,
    ) -> Option<Path> {
        let dist_to = self.dist_to_target(target, metric, blocked);
        self.canonical_path_via(source, target, &dist_to, metric, blocked)
    }

    pub fn is_strongly_connected(&self) -> bool {
        if self.node_count() == 0 {
            return false;
        }
        let adj: Vec<Vec<u32>> = (0..self.node_count() as u32)
            .map(|v| self.out_edges(v).map(|e| self.edge(e).to).collect())
            .collect();
        strongly_connected_components(&adj).len() == 1
    }
}

#[derive(PartialEq)]
struct HeapItem {
    dist: f64,
    node: u32,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want smallest dist first,
        // node index as deterministic tie-break.
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Strongly connected components of an adjacency list (iterative Tarjan).
/// Components are returned with their member node indices sorted ascending.
pub(crate) fn strongly_connected_components(adj: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let n = adj.len();
    let mut index = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next_index = 0u32;
    let mut components = Vec::new();

    // Explicit DFS stack: (node, next child position).
    let mut call: Vec<(u32, usize)> = Vec::new();
    for root in 0..n as u32 {
        if index[root as usize] != u32::MAX {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut child)) = call.last_mut() {
            let vu = v as usize;
            if *child == 0 {
                index[vu] = next_index;
                low[vu] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[vu] = true;
            }
            if let Some(&w) = adj[vu].get(*child) {
                *child += 1;
                let wu = w as usize;
                if index[wu] == u32::MAX {
                    call.push((w, 0));
                } else if on_stack[wu] {
                    low[vu] = low[vu].min(index[wu]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    let pu = parent as usize;
                    low[pu] = low[pu].min(low[vu]);
                }
                if low[vu] == index[vu] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w as usize] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
            }
        }
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::road_network::RoadNetwork;

    /// Grid-ish test graph:
    ///
    /// ```text
    ///   1 -> 2 -> 3
    ///   |         ^
    ///   v         |
    ///   4 ------> 5
    /// ```
    fn diamondish() -> RoadNetwork {
        let mut net = RoadNetwork::new();
        for (id, lat, lon) in [
            (1, 0.0, 0.0),
            (2, 0.0, 0.001),
            (3, 0.0, 0.002),
            (4, -0.001, 0.0),
            (5, -0.001, 0.002),
        ] {
            net.insert_node(NodeId(id), GeoCoord::new(lat, lon).unwrap());
        }
        for (u, v, len) in [
            (1, 2, 100.0),
            (2, 3, 100.0),
            (1, 4, 100.0),
            (4, 5, 100.0),
            (5, 3, 100.0),
        ] {
            net.insert_edge(NodeId(u), NodeId(v), len, 1).unwrap();
        }
        net
    }

    #[test]
    fn canonical_path_prefers_smaller_nodes_on_ties() {
        let g = CompactGraph::from_network(&diamondish());
        let s = g.node_idx(NodeId(1)).unwrap();
        let t = g.node_idx(NodeId(3)).unwrap();
        let path = g.canonical_path(s, t, Metric::Length, None).unwrap();
        // Both 1-2-3 (200 m) and 1-4-5-3 (300 m) exist; shorter wins.
        let ids: Vec<u64> = path.nodes.iter().map(|&i| g.node_id(i).0).collect();
        assert_eq!(ids, vec![1, 2, 3]);
        assert_eq!(path.length_m, 200.0);

        // Under hop ties (make 1-2-3 cost equal), lexicographic order decides.
        let path = g.canonical_path(s, t, Metric::Hops, None).unwrap();
        let ids: Vec<u64> = path.nodes.iter().map(|&i| g.node_id(i).0).collect();
        assert_eq!(ids, vec![1, 2, 3]);
    }

    #[test]
    fn blocked_edges_are_avoided() {
        let g = CompactGraph::from_network(&diamondish());
        let s = g.node_idx(NodeId(1)).unwrap();
        let t = g.node_idx(NodeId(3)).unwrap();
        let e12 = g
            .edge_index(s, g.node_idx(NodeId(2)).unwrap())
            .unwrap();
        let mut blocked = vec![false; g.edge_count()];
        blocked[e12 as usize] = true;
        let path = g.canonical_path(s, t, Metric::Length, Some(&blocked)).unwrap();
        let ids: Vec<u64> = path.nodes.iter().map(|&i| g.node_id(i).0).collect();
        assert_eq!(ids, vec![1, 4, 5, 3]);
        assert_eq!(g.hop_distance(s, t, Some(&blocked)), Some(3));
    }

    #[test]
    fn unreachable_is_none() {
        let g = CompactGraph::from_network(&diamondish());
        let s = g.node_idx(NodeId(3)).unwrap();
        let t = g.node_idx(NodeId(1)).unwrap();
        assert!(g.canonical_path(s, t, Metric::Length, None).is_none());
        assert_eq!(g.hop_distance(s, t, None), None);
    }

    #[test]
    fn scc_finds_components() {
        // 0 <-> 1, 2 isolated, 3 -> 0.
        let adj = vec![vec![1], vec![0], vec![], vec![0]];
        let mut comps = strongly_connected_components(&adj);
        comps.sort();
        assert_eq!(comps, vec![vec![0, 1], vec![2], vec![3]]);
    }

    #[test]
    fn fingerprint_tracks_content() {
        let a = CompactGraph::from_network(&diamondish());
        let b = CompactGraph::from_network(&diamondish());
        assert_eq!(a.fingerprint(), b.fingerprint());
        let mut net = diamondish();
        net.insert_edge(NodeId(3), NodeId(1), 50.0, 2).unwrap();
        let c = CompactGraph::from_network(&net);
        assert_ne!(a.fingerprint(), c.fingerprint());
    }
}
