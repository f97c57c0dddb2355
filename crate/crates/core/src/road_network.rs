//! Road-graph construction from a raw map extract.
//!
//! The pipeline turns an XML map extract into a simulation-ready directed
//! graph in four stages: classify ways into lane counts, merge nearby
//! nodes, repair strong connectivity, and contract pass-through nodes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use quick_xml::events::Event;
use quick_xml::Reader;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{haversine_m, GeoCoord};
use crate::routing::strongly_connected_components;

/// Identifier of a road-network node (map-extract node id; merged nodes
/// keep the smallest id of their group).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Road classes admitted into the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HighwayClass {
    Motorway,
    Trunk,
    Primary,
    Secondary,
    Tertiary,
    Unclassified,
    Residential,
    Service,
}

impl HighwayClass {
    /// Parses the value of a `highway` tag; `None` for classes that are not
    /// admitted (footways, paths, cycleways, ...).
    pub fn from_tag(value: &str) -> Option<Self> {
        Some(match value {
            "motorway" => Self::Motorway,
            "trunk" => Self::Trunk,
            "primary" => Self::Primary,
            "secondary" => Self::Secondary,
            "tertiary" => Self::Tertiary,
            "unclassified" => Self::Unclassified,
            "residential" => Self::Residential,
            "service" => Self::Service,
            _ => return None,
        })
    }
}

/// Lane count for a road class.
pub fn lanes_for_class(class: HighwayClass) -> u8 {
    match class {
        HighwayClass::Motorway | HighwayClass::Trunk => 4,
        HighwayClass::Primary | HighwayClass::Secondary => 3,
        HighwayClass::Tertiary | HighwayClass::Unclassified => 2,
        HighwayClass::Residential | HighwayClass::Service => 1,
    }
}

/// A way retained from the extract.
#[derive(Debug, Clone)]
pub struct RawWay {
    pub node_ids: Vec<NodeId>,
    pub highway_class: HighwayClass,
    pub oneway: bool,
}

/// Result of parsing a map extract.
#[derive(Debug, Default)]
pub struct ParsedExtract {
    pub nodes: BTreeMap<NodeId, GeoCoord>,
    pub ways: Vec<RawWay>,
    /// Non-fatal problems: ways rejected for referencing undeclared nodes
    /// or having fewer than two node references.
    pub diagnostics: Vec<String>,
}

/// Edge attributes: street length and lane count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeAttrs {
    pub length_m: f64,
    pub lanes: u8,
}

/// Directed road graph. At most one edge per ordered node pair, no
/// self-loops, every edge with positive length.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RoadNetwork {
    nodes: BTreeMap<NodeId, GeoCoord>,
    edges: BTreeMap<(NodeId, NodeId), EdgeAttrs>,
}

/// Edge length between two coordinates; coincident points are clamped to
/// one meter so cell counts stay positive.
fn edge_length_m(a: GeoCoord, b: GeoCoord) -> f64 {
    let d = haversine_m(a, b);
    if d == 0.0 {
        1.0
    } else {
        d
    }
}

impl RoadNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn insert_node(&mut self, id: NodeId, coord: GeoCoord) {
        self.nodes.insert(id, coord);
    }

    pub fn insert_edge(&mut self, u: NodeId, v: NodeId, length_m: f64, lanes: u8) -> Result<()> {
        if u == v {
            return Err(Error::Input(format!("self-loop on node {u}")));
        }
        if !self.nodes.contains_key(&u) || !self.nodes.contains_key(&v) {
            return Err(Error::Input(format!("edge ({u}, {v}) references unknown node")));
        }
        if length_m <= 0.0 {
            return Err(Error::Input(format!("edge ({u}, {v}) has non-positive length")));
        }
        if lanes == 0 {
            return Err(Error::Input(format!("edge ({u}, {v}) has zero lanes")));
        }
        self.edges.insert((u, v), EdgeAttrs { length_m, lanes });
        Ok(())
    }

    /// Inserts an edge, combining with any existing edge on the same pair:
    /// the shorter length and the larger lane count win.
    fn combine_edge(&mut self, u: NodeId, v: NodeId, length_m: f64, lanes: u8) {
        debug_assert_ne!(u, v);
        self.edges
            .entry((u, v))
            .and_modify(|attrs| {
                attrs.length_m = attrs.length_m.min(length_m);
                attrs.lanes = attrs.lanes.max(lanes);
            })
            .or_insert(EdgeAttrs { length_m, lanes });
    }

    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> Option<EdgeAttrs> {
        self.edges.remove(&(u, v))
    }

    pub fn coord(&self, id: NodeId) -> Option<GeoCoord> {
        self.nodes.get(&id).copied()
    }

    pub fn edge(&self, u: NodeId, v: NodeId) -> Option<EdgeAttrs> {
        self.edges.get(&(u, v)).copied()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn edge_iter(&self) -> impl Iterator<Item = ((NodeId, NodeId), EdgeAttrs)> + '_ {
        self.edges.iter().map(|(&k, &v)| (k, v))
    }

    fn successors(&self, y: NodeId) -> BTreeSet<NodeId> {
        self.edges
            .range((y, NodeId(0))..=(y, NodeId(u64::MAX)))
            .map(|(&(_, v), _)| v)
            .collect()
    }

    pub fn is_strongly_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        self.components().len() == 1
    }

    /// Strongly connected components as sets of node ids.
    fn components(&self) -> Vec<Vec<NodeId>> {
        let ids: Vec<NodeId> = self.node_ids().collect();
        let idx = |id: NodeId| ids.binary_search(&id).unwrap() as u32;
        let mut adj = vec![Vec::new(); ids.len()];
        for (&(u, v), _) in &self.edges {
            adj[idx(u) as usize].push(idx(v));
        }
        strongly_connected_components(&adj)
            .into_iter()
            .map(|comp| comp.into_iter().map(|i| ids[i as usize]).collect())
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Extract parsing
// ---------------------------------------------------------------------------

struct PendingWay {
    refs: Vec<NodeId>,
    highway: Option<String>,
    oneway: bool,
    line: usize,
}

fn line_of(text: &str, byte_pos: usize) -> usize {
    text.as_bytes()
        .iter()
        .take(byte_pos.min(text.len()))
        .filter(|&&b| b == b'\n')
        .count()
        + 1
}

fn attr_map(e: &quick_xml::events::BytesStart<'_>, text: &str, pos: usize) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for attr in e.attributes() {
        let attr = attr.map_err(|err| Error::Parse {
            line: line_of(text, pos),
            msg: format!("bad attribute: {err}"),
        })?;
        let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
        let value = String::from_utf8_lossy(&attr.value).into_owned();
        out.insert(key, value);
    }
    Ok(out)
}

/// Parses an XML map extract: `<node id lat lon>` declarations and `<way>`
/// elements carrying ordered `<nd ref>` children and `<tag k v>` children.
///
/// Only ways whose `highway` tag is one of the eight admitted classes are
/// retained. A way is one-directional iff its `oneway` tag is `yes`, `true`
/// or `1`. Ways referencing undeclared nodes are rejected with a diagnostic.
pub fn parse_extract(text: &str) -> Result<ParsedExtract> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);

    let mut nodes: BTreeMap<NodeId, GeoCoord> = BTreeMap::new();
    let mut pending: Vec<PendingWay> = Vec::new();
    let mut current: Option<PendingWay> = None;
    let mut buf = Vec::new();

    loop {
        let pos = reader.buffer_position() as usize;
        match reader.read_event_into(&mut buf) {
            Err(err) => {
                return Err(Error::Parse {
                    line: line_of(text, reader.buffer_position() as usize),
                    msg: err.to_string(),
                })
            }
            Ok(Event::Eof) => break,
            Ok(Event::Start(e)) | Ok(Event::Empty(e)) => {
                let name = e.name().as_ref().to_vec();
                let line = line_of(text, pos);
                match name.as_slice() {
                    b"node" => {
                        let attrs = attr_map(&e, text, pos)?;
                        let id = attrs
                            .get("id")
                            .and_then(|s| s.parse::<u64>().ok())
                            .ok_or_else(|| Error::Parse {
                                line,
                                msg: "node without valid id".into(),
                            })?;
                        let lat = attrs
                            .get("lat")
                            .and_then(|s| s.parse::<f64>().ok())
                            .ok_or_else(|| Error::Parse {
                                line,
                                msg: format!("node {id} without valid lat"),
                            })?;
                        let lon = attrs
                            .get("lon")
                            .and_then(|s| s.parse::<f64>().ok())
                            .ok_or_else(|| Error::Parse {
                                line,
                                msg: format!("node {id} without valid lon"),
                            })?;
                        let coord = GeoCoord::new(lat, lon).map_err(|err| Error::Parse {
                            line,
                            msg: format!("node {id}: {err}"),
                        })?;
                        nodes.insert(NodeId(id), coord);
                    }
                    b"way" => {
                        if let Some(done) = current.take() {
                            pending.push(done);
                        }
                        current = Some(PendingWay {
                            refs: Vec::new(),
                            highway: None,
                            oneway: false,
                            line,
                        });
                    }
                    b"nd" => {
                        if let Some(way) = current.as_mut() {
                            let attrs = attr_map(&e, text, pos)?;
                            let r = attrs
                                .get("ref")
                                .and_then(|s| s.parse::<u64>().ok())
                                .ok_or_else(|| Error::Parse {
                                    line,
                                    msg: "nd without valid ref".into(),
                                })?;
                            way.refs.push(NodeId(r));
                        }
                    }
                    b"tag" => {
                        if let Some(way) = current.as_mut() {
                            let attrs = attr_map(&e, text, pos)?;
                            match attrs.get("k").map(String::as_str) {
                                Some("highway") => way.highway = attrs.get("v").cloned(),
                                Some("oneway") => {
                                    way.oneway = matches!(
                                        attrs.get("v").map(String::as_str),
                                        Some("yes") | Some("true") | Some("1")
                                    );
                                }
                                _ => {}
                            }
                        }
                    }
                    _ => {}
                }
            }
            Ok(Event::End(e)) => {
                if e.name().as_ref() == b"way" {
                    if let Some(done) = current.take() {
                        pending.push(done);
                    }
                }
            }
            Ok(_) => {}
        }
        buf.clear();
    }
    if let Some(done) = current.take() {
        pending.push(done);
    }

    let mut out = ParsedExtract::default();
    let mut used: BTreeSet<NodeId> = BTreeSet::new();
    for way in pending {
        let class = match way.highway.as_deref().and_then(HighwayClass::from_tag) {
            Some(c) => c,
            None => continue, // not a road we admit
        };
        if way.refs.len() < 2 {
            out.diagnostics.push(format!(
                "way at line {} rejected: fewer than two node references",
                way.line
            ));
            continue;
        }
        if let Some(missing) = way.refs.iter().find(|id| !nodes.contains_key(id)) {
            out.diagnostics.push(format!(
                "way at line {} rejected: references undeclared node {missing}",
                way.line
            ));
            continue;
        }
        used.extend(way.refs.iter().copied());
        out.ways.push(RawWay {
            node_ids: way.refs,
            highway_class: class,
            oneway: way.oneway,
        });
    }
    out.nodes = nodes.into_iter().filter(|(id, _)| used.contains(id)).collect();
    Ok(out)
}

/// Builds the raw directed graph from parsed ways: consecutive node pairs
/// become edges, two-way unless the way is one-directional.
pub fn network_from_ways(extract: &ParsedExtract) -> RoadNetwork {
    let mut net = RoadNetwork::new();
    for way in &extract.ways {
        let lanes = lanes_for_class(way.highway_class);
        for pair in way.node_ids.windows(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v {
                continue;
            }
            let cu = extract.nodes[&u];
            let cv = extract.nodes[&v];
            net.insert_node(u, cu);
            net.insert_node(v, cv);
            let len = edge_length_m(cu, cv);
            net.combine_edge(u, v, len, lanes);
            if !way.oneway {
                net.combine_edge(v, u, len, lanes);
            }
        }
    }
    net
}

// ---------------------------------------------------------------------------
// Stage 2: merge nearby nodes
// ---------------------------------------------------------------------------

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = i;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // Smaller index wins so group representatives are deterministic.
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Merges groups of nodes that lie within `radius_m` of each other (one
/// union-find pass). Returns `None` when no group forms.
fn merge_pass(net: &RoadNetwork, radius_m: f64) -> Option<RoadNetwork> {
    let ids: Vec<NodeId> = net.node_ids().collect();
    let coords: Vec<GeoCoord> = ids.iter().map(|id| net.coord(*id).unwrap()).collect();
    let mut uf = UnionFind::new(ids.len());
    let mut merged_any = false;
    for i in 0..ids.len() {
        for j in (i + 1)..ids.len() {
            if haversine_m(coords[i], coords[j]) < radius_m {
                merged_any |= uf.union(i, j);
            }
        }
    }
    if !merged_any {
        return None;
    }

    // Group members, keyed by representative.
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..ids.len() {
        groups.entry(uf.find(i)).or_default().push(i);
    }

    let mut new_id = vec![NodeId(0); ids.len()];
    let mut out = RoadNetwork::new();
    for (&rep, members) in &groups {
        let id = ids[*members.iter().min().unwrap()];
        let lat = members.iter().map(|&i| coords[i].lat).sum::<f64>() / members.len() as f64;
        let lon = members.iter().map(|&i| coords[i].lon).sum::<f64>() / members.len() as f64;
        out.insert_node(id, GeoCoord { lat, lon });
        for &m in members {
            new_id[m] = id;
        }
        let _ = rep;
    }
    let idx_of = |id: NodeId| ids.binary_search(&id).unwrap();
    for ((u, v), attrs) in net.edge_iter() {
        let (x, y) = (new_id[idx_of(u)], new_id[idx_of(v)]);
        if x == y {
            continue; // edge internal to a merged group
        }
        let len = edge_length_m(out.coord(x).unwrap(), out.coord(y).unwrap());
        out.combine_edge(x, y, len, attrs.lanes);
    }
    Some(out)
}

/// Merges nearby nodes (closer than `radius_m`) into single nodes placed at
/// the group's mean coordinates. Runs to a fixpoint: averaging can move
/// surviving nodes within the radius of each other.
pub fn merge_nearby(net: &RoadNetwork, radius_m: f64) -> RoadNetwork {
    let mut current = net.clone();
    while let Some(next) = merge_pass(&current, radius_m) {
        current = next;
    }
    current
}

// ---------------------------------------------------------------------------
// Stage 3: strong-connectivity repair
// ---------------------------------------------------------------------------

/// Adds edges between strongly connected components until the graph is a
/// single component. Each iteration links the globally closest cross-
/// component node pair; missing directions get the opposite edge's lane
/// count, or one lane when neither direction exists.
pub fn ensure_strong_connectivity(net: &RoadNetwork) -> RoadNetwork {
    let mut out = net.clone();
    loop {
        let comps = out.components();
        if comps.len() <= 1 {
            return out;
        }
        let ids: Vec<NodeId> = out.node_ids().collect();
        let coords: Vec<GeoCoord> = ids.iter().map(|id| out.coord(*id).unwrap()).collect();
        let mut comp_of = BTreeMap::new();
        for (ci, comp) in comps.iter().enumerate() {
            for &id in comp {
                comp_of.insert(id, ci);
            }
        }
        // Globally nearest cross-component pair; ties by smallest id pair.
        let mut best: Option<(f64, NodeId, NodeId)> = None;
        for i in 0..ids.len() {
            for j in (i + 1)..ids.len() {
                if comp_of[&ids[i]] == comp_of[&ids[j]] {
                    continue;
                }
                let d = haversine_m(coords[i], coords[j]);
                let cand = (d, ids[i], ids[j]);
                if best.is_none_or(|b| (cand.0, cand.1, cand.2) < (b.0, b.1, b.2)) {
                    best = Some(cand);
                }
            }
        }
        let (d, x, y) = best.expect("multiple components imply a cross pair");
        let len = if d == 0.0 { 1.0 } else { d };
        let forward = out.edge(x, y);
        let backward = out.edge(y, x);
        debug_assert!(
            forward.is_none() || backward.is_none(),
            "nodes with edges both ways cannot sit in different components"
        );
        let lanes = forward.or(backward).map(|a| a.lanes).unwrap_or(1);
        out.edges.insert((x, y), EdgeAttrs { length_m: len, lanes });
        out.edges.insert((y, x), EdgeAttrs { length_m: len, lanes });
    }
}

// ---------------------------------------------------------------------------
// Stage 4: contraction of pass-through nodes
// ---------------------------------------------------------------------------

/// True when `y` qualifies for removal: a single predecessor and single
/// successor (distinct from each other), or exactly two predecessors that
/// are also its only two successors.
fn contraction_case(net: &RoadNetwork, y: NodeId) -> Option<(Vec<(NodeId, NodeId)>, bool)> {
    let preds: BTreeSet<NodeId> = net
        .edge_iter()
        .filter(|&((_, v), _)| v == y)
        .map(|((u, _), _)| u)
        .collect();
    let succs = net.successors(y);
    if preds.len() == 1 && succs.len() == 1 {
        let x = *preds.iter().next().unwrap();
        let z = *succs.iter().next().unwrap();
        if x != z {
            return Some((vec![(x, z)], false));
        }
    }
    if preds.len() == 2 && preds == succs {
        let mut it = preds.iter();
        let x = *it.next().unwrap();
        let z = *it.next().unwrap();
        return Some((vec![(x, z), (z, x)], true));
    }
    None
}

/// Iteratively removes pass-through nodes, splicing their edges together.
/// Replacement edges take the sum of the replaced lengths and the maximum
/// of the replaced lane counts. Nodes are visited in ascending id order
/// until no node qualifies.
pub fn contract(net: &RoadNetwork) -> RoadNetwork {
    let mut out = net.clone();
    loop {
        let mut changed = false;
        let snapshot: Vec<NodeId> = out.node_ids().collect();
        for y in snapshot {
            if !out.nodes.contains_key(&y) {
                continue;
            }
            let Some((links, _two_way)) = contraction_case(&out, y) else {
                continue;
            };
            for (x, z) in links {
                let a = out.remove_edge(x, y).expect("predecessor edge present");
                let b = out.remove_edge(y, z).expect("successor edge present");
                out.combine_edge(x, z, a.length_m + b.length_m, a.lanes.max(b.lanes));
            }
            out.nodes.remove(&y);
            changed = true;
        }
        if !changed {
            return out;
        }
    }
}

/// Nodes that still satisfy a contraction condition (empty after the
/// pipeline has run).
pub fn contractible_nodes(net: &RoadNetwork) -> Vec<NodeId> {
    net.node_ids()
        .filter(|&y| contraction_case(net, y).is_some())
        .collect()
}

// ---------------------------------------------------------------------------
// Full pipeline
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub merge_radius_m: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self { merge_radius_m: 20.0 }
    }
}

/// Node/edge counts after each pipeline stage, plus parse diagnostics.
#[derive(Debug, Default, Serialize)]
pub struct BuildReport {
    pub stages: Vec<StageCount>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct StageCount {
    pub stage: String,
    pub nodes: usize,
    pub edges: usize,
}

impl fmt::Display for BuildReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stages {
            writeln!(f, "stage {}: {} nodes, {} edges", s.stage, s.nodes, s.edges)?;
        }
        for d in &self.diagnostics {
            writeln!(f, "note: {d}")?;
        }
        Ok(())
    }
}

/// Runs the full extract-to-network pipeline.
pub fn build_network(extract_text: &str, cfg: &PipelineConfig) -> Result<(RoadNetwork, BuildReport)> {
    let parsed = parse_extract(extract_text)?;
    let mut report = BuildReport {
        diagnostics: parsed.diagnostics.clone(),
        ..Default::default()
    };
    let mut push = |report: &mut BuildReport, stage: &str, net: &RoadNetwork| {
        report.stages.push(StageCount {
            stage: stage.to_string(),
            nodes: net.node_count(),
            edges: net.edge_count(),
        });
    };

    let raw = network_from_ways(&parsed);
    if raw.node_count() == 0 || raw.edge_count() == 0 {
        return Err(Error::Empty("no admitted ways in extract".into()));
    }
    push(&mut report, "classify", &raw);
    let merged = merge_nearby(&raw, cfg.merge_radius_m);
    push(&mut report, "merge", &merged);
    let connected = ensure_strong_connectivity(&merged);
    push(&mut report, "connect", &connected);
    let contracted = contract(&connected);
    push(&mut report, "contract", &contracted);
    Ok((contracted, report))
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

impl RoadNetwork {
    /// Plain-text graph format: a `nodes <N> edges <M>` header, one
    /// `<id> <lat> <lon>` line per node, one `<u> <v> <length_m> <lanes>`
    /// line per edge, each section ordered by id.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("nodes {} edges {}\n", self.node_count(), self.edge_count()));
        for (id, c) in &self.nodes {
            out.push_str(&format!("{} {} {}\n", id, c.lat, c.lon));
        }
        for ((u, v), attrs) in &self.edges {
            out.push_str(&format!("{} {} {} {}\n", u, v, attrs.length_m, attrs.lanes));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let parse_err = |line: usize, msg: String| Error::Parse { line: line + 1, msg };
        let (hline, header) = lines
            .next()
            .ok_or_else(|| parse_err(0, "empty graph file".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "nodes" || parts[2] != "edges" {
            return Err(parse_err(hline, "expected header `nodes <N> edges <M>`".into()));
        }
        let n: usize = parts[1]
            .parse()
            .map_err(|_| parse_err(hline, "bad node count".into()))?;
        let m: usize = parts[3]
            .parse()
            .map_err(|_| parse_err(hline, "bad edge count".into()))?;

        let mut net = RoadNetwork::new();
        for _ in 0..n {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| Error::Input("truncated node section".into()))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(parse_err(ln, "expected `<id> <lat> <lon>`".into()));
            }
            let id = f[0].parse::<u64>().map_err(|_| parse_err(ln, "bad node id".into()))?;
            let lat = f[1].parse::<f64>().map_err(|_| parse_err(ln, "bad lat".into()))?;
            let lon = f[2].parse::<f64>().map_err(|_| parse_err(ln, "bad lon".into()))?;
            let coord = GeoCoord::new(lat, lon).map_err(|e| parse_err(ln, e.to_string()))?;
            net.insert_node(NodeId(id), coord);
        }
        for _ in 0..m {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| Error::Input("truncated edge section".into()))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(parse_err(ln, "expected `<u> <v> <length_m> <lanes>`".into()));
            }
            let u = f[0].parse::<u64>().map_err(|_| parse_err(ln, "bad node id".into()))?;
            let v = f[1].parse::<u64>().map_err(|_| parse_err(ln, "bad node id".into()))?;
            let len = f[2].parse::<f64>().map_err(|_| parse_err(ln, "bad length".into()))?;
            let lanes = f[3].parse::<u8>().map_err(|_| parse_err(ln, "bad lane count".into()))?;
            net.insert_edge(NodeId(u), NodeId(v), len, lanes)
                .map_err(|e| parse_err(ln, e.to_string()))?;
        }
        Ok(net)
    }

    /// GeoJSON FeatureCollection with one LineString per edge.
    pub fn to_geojson(&self) -> serde_json::Value {
        let features: Vec<serde_json::Value> = self
            .edges
            .iter()
            .map(|(&(u, v), attrs)| {
                let cu = self.nodes[&u];
                let cv = self.nodes[&v];
                serde_json::json!({
                    "type": "Feature",
                    "geometry": {
                        "type": "LineString",
                        "coordinates": [[cu.lon, cu.lat], [cv.lon, cv.lat]],
                    },
                    "properties": {
                        "u": u.0,
                        "v": v.0,
                        "length_m": attrs.length_m,
                        "lanes": attrs.lanes,
                    },
                })
            })
            .collect();
        serde_json::json!({ "type": "FeatureCollection", "features": features })
    }
}
