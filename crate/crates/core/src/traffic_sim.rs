//! Discrete-time multi-lane traffic simulation on a directed road graph.
//!
//! Streets are split into cells of one vehicle length per lane; vehicles
//! accelerate, change lanes, randomly slow down, and advance once per
//! one-second step. Each ride follows a fixed route computed when it is
//! injected and the per-ride completion times plus per-edge traversal
//! counts are logged.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::objective::RideTime;
use crate::ride_gen::Ride;
use crate::road_network::NodeId;
use crate::routing::{CompactGraph, Metric};

const EMPTY: u32 = u32::MAX;

/// Simulation parameters.
#[derive(Debug, Clone)]
pub struct SimParams {
    /// Space one vehicle occupies on the road, including separation (m).
    pub d_vehicle_m: f64,
    /// Maximum speed in cells per step.
    pub v_max: u32,
    /// Per-step probability that a vehicle slows down by one.
    pub p_slow: f64,
    /// Nominal number of steps in the simulated day. Vehicles already on
    /// the road keep moving past this point until they finish.
    pub t_max: u32,
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            d_vehicle_m: 7.5,
            v_max: 5,
            p_slow: 0.01,
            t_max: 86_400,
            seed: 0,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.d_vehicle_m > 0.0) || !self.d_vehicle_m.is_finite() {
            return Err(Error::Input("d_vehicle_m must be positive".into()));
        }
        if self.v_max < 1 {
            return Err(Error::Input("v_max must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p_slow) {
            return Err(Error::Input("p_slow must lie in [0, 1]".into()));
        }
        if self.t_max < 1 {
            return Err(Error::Input("t_max must be at least 1".into()));
        }
        Ok(())
    }
}

/// Number of cells an edge of the given length provides per lane.
pub fn cells_for_edge(length_m: f64, d_vehicle_m: f64) -> u32 {
    ((length_m / d_vehicle_m).ceil() as u32).max(1)
}

/// Cell/lane geometry for every edge of a graph.
pub struct SimNetwork {
    cells: Vec<u32>,
    lanes: Vec<u32>,
    offsets: Vec<usize>,
    total_cells: usize,
}

impl SimNetwork {
    pub fn new(graph: &CompactGraph, d_vehicle_m: f64) -> Self {
        let cells: Vec<u32> = graph
            .edges()
            .iter()
            .map(|e| cells_for_edge(e.length_m, d_vehicle_m))
            .collect();
        let lanes: Vec<u32> = graph.edges().iter().map(|e| u32::from(e.lanes)).collect();
        Self::with_geometry(cells, lanes)
    }

    /// Uniform geometry, overriding edge attributes. Used by the reduced
    /// regime where every street is one cell long and wide enough that no
    /// vehicle ever queues.
    pub fn uniform(graph: &CompactGraph, cells_per_edge: u32, lanes_per_edge: u32) -> Self {
        let m = graph.edge_count();
        Self::with_geometry(vec![cells_per_edge.max(1); m], vec![lanes_per_edge.max(1); m])
    }

    fn with_geometry(cells: Vec<u32>, lanes: Vec<u32>) -> Self {
        let mut offsets = Vec::with_capacity(cells.len());
        let mut total = 0usize;
        for (c, l) in cells.iter().zip(&lanes) {
            offsets.push(total);
            total += *c as usize * *l as usize;
        }
        Self {
            cells,
            lanes,
            offsets,
            total_cells: total,
        }
    }

    pub fn cells(&self, edge: u32) -> u32 {
        self.cells[edge as usize]
    }

    pub fn lanes(&self, edge: u32) -> u32 {
        self.lanes[edge as usize]
    }

    #[inline]
    fn pos(&self, edge: u32, lane: u32, cell: u32) -> usize {
        debug_assert!(cell >= 1 && cell <= self.cells[edge as usize]);
        debug_assert!(lane < self.lanes[edge as usize]);
        self.offsets[edge as usize]
            + lane as usize * self.cells[edge as usize] as usize
            + (cell as usize - 1)
    }
}

/// Route assigned to a ride: an edge-index sequence, or no surviving path.
#[derive(Debug, Clone, PartialEq)]
pub enum RouteAssignment {
    Route(Vec<u32>),
    Unreachable,
}

/// Final outcome of one ride.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum RideOutcome {
    /// Completed after the given number of steps from its start time.
    Finished { steps: u32 },
    /// Never injected: no route existed.
    Unreachable,
    /// Still on the road when the safety stop tripped.
    Unfinished,
}

/// Per-run record: ride completion times and per-edge traversal counts.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficLog {
    pub outcomes: Vec<RideOutcome>,
    pub thetas: Vec<u32>,
    /// Vehicles that entered each edge over the whole run.
    pub traversals: Vec<u64>,
    pub network_hash: String,
    /// Run-length occupancy snapshots, one string per sampled step.
    pub snapshots: Vec<String>,
}

impl TrafficLog {
    /// Completion times with unreachable and unfinished rides mapped to an
    /// infinite ride time.
    pub fn ride_times(&self) -> Vec<RideTime> {
        self.outcomes
            .iter()
            .map(|o| match o {
                RideOutcome::Finished { steps } => RideTime::Finished(*steps),
                _ => RideTime::Unreachable,
            })
            .collect()
    }

    pub fn finished_count(&self) -> usize {
        self.outcomes
            .iter()
            .filter(|o| matches!(o, RideOutcome::Finished { .. }))
            .count()
    }

    /// `ride_id,theta,T_steps,finished` CSV. `T_steps` is empty for rides
    /// cut off by the safety stop and `inf` for unreachable rides.
    pub fn rides_csv(&self) -> String {
        let mut out = String::from("ride_id,theta,T_steps,finished\n");
        for (i, (o, th)) in self.outcomes.iter().zip(&self.thetas).enumerate() {
            match o {
                RideOutcome::Finished { steps } => {
                    out.push_str(&format!("{i},{th},{steps},true\n"));
                }
                RideOutcome::Unreachable => out.push_str(&format!("{i},{th},inf,false\n")),
                RideOutcome::Unfinished => out.push_str(&format!("{i},{th},,false\n")),
            }
        }
        out
    }

    /// `u,v,traversal_count` CSV in edge-index order.
    pub fn edges_csv(&self, graph: &CompactGraph) -> String {
        let mut out = String::from("u,v,traversal_count\n");
        for (idx, count) in self.traversals.iter().enumerate() {
            let (u, v) = graph.edge_endpoints(idx as u32);
            out.push_str(&format!("{u},{v},{count}\n"));
        }
        out
    }

    /// Rebuilds a log from its two CSV exports.
    pub fn from_csv(rides_text: &str, edges_text: &str, graph: &CompactGraph) -> Result<Self> {
        let mut outcomes = Vec::new();
        let mut thetas = Vec::new();
        let mut reader = csv::Reader::from_reader(rides_text.as_bytes());
        for record in reader.records() {
            let record = record?;
            let theta: u32 = record
                .get(1)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Input("rides csv: bad theta".into()))?;
            let finished = record.get(3) == Some("true");
            let outcome = if finished {
                let steps: u32 = record
                    .get(2)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Input("rides csv: bad T_steps".into()))?;
                RideOutcome::Finished { steps }
            } else if record.get(2) == Some("inf") {
                RideOutcome::Unreachable
            } else {
                RideOutcome::Unfinished
            };
            outcomes.push(outcome);
            thetas.push(theta);
        }

        let mut traversals = vec![0u64; graph.edge_count()];
        let mut reader = csv::Reader::from_reader(edges_text.as_bytes());
        for record in reader.records() {
            let record = record?;
            let u: u64 = record
                .get(0)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Input("edges csv: bad node id".into()))?;
            let v: u64 = record
                .get(1)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Input("edges csv: bad node id".into()))?;
            let count: u64 = record
                .get(2)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Input("edges csv: bad count".into()))?;
            let ui = graph
                .node_idx(NodeId(u))
                .ok_or_else(|| Error::Input(format!("edges csv: unknown node {u}")))?;
            let vi = graph
                .node_idx(NodeId(v))
                .ok_or_else(|| Error::Input(format!("edges csv: unknown node {v}")))?;
            let eidx = graph
                .edge_index(ui, vi)
                .ok_or_else(|| Error::Input(format!("edges csv: unknown edge {u}->{v}")))?;
            traversals[eidx as usize] = count;
        }
        Ok(Self {
            outcomes,
            thetas,
            traversals,
            network_hash: graph.fingerprint().to_string(),
            snapshots: Vec::new(),
        })
    }
}

/// Canonical length-shortest routes for rides on the (optionally masked)
/// graph. Rides with no surviving path get [`RouteAssignment::Unreachable`].
pub fn compute_routes(
    graph: &CompactGraph,
    rides: &[Ride],
    blocked: Option<&[bool]>,
) -> Result<Vec<RouteAssignment>> {
    compute_routes_with_metric(graph, rides, blocked, Metric::Length)
}

pub fn compute_routes_with_metric(
    graph: &CompactGraph,
    rides: &[Ride],
    blocked: Option<&[bool]>,
    metric: Metric,
) -> Result<Vec<RouteAssignment>> {
    let mut dist_cache: std::collections::BTreeMap<u32, Vec<f64>> = std::collections::BTreeMap::new();
    let mut out = Vec::with_capacity(rides.len());
    for ride in rides {
        let s = graph
            .node_idx(ride.start)
            .ok_or_else(|| Error::Input(format!("ride start node {} unknown", ride.start)))?;
        let t = graph
            .node_idx(ride.end)
            .ok_or_else(|| Error::Input(format!("ride end node {} unknown", ride.end)))?;
        let dist = dist_cache
            .entry(t)
            .or_insert_with(|| graph.dist_to_target(t, metric, blocked));
        out.push(match graph.canonical_path_via(s, t, dist, metric, blocked) {
            Some(path) => RouteAssignment::Route(path.edges),
            None => RouteAssignment::Unreachable,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Status {
    Waiting,
    Traversing { lane: u32, cell: u32 },
    Done,
}

struct Vehicle {
    leg: u32,
    speed: u32,
    status: Status,
}

/// Runs the simulation over `rides` with pre-assigned routes.
pub fn run(
    net: &SimNetwork,
    graph: &CompactGraph,
    rides: &[Ride],
    routes: &[RouteAssignment],
    params: &SimParams,
) -> Result<TrafficLog> {
    run_with_snapshots(net, graph, rides, routes, params, None)
}

/// Convenience entry: canonical routes on the unmodified graph.
pub fn run_baseline(graph: &CompactGraph, rides: &[Ride], params: &SimParams) -> Result<TrafficLog> {
    let net = SimNetwork::new(graph, params.d_vehicle_m);
    let routes = compute_routes(graph, rides, None)?;
    run(&net, graph, rides, &routes, params)
}

pub fn run_with_snapshots(
    net: &SimNetwork,
    graph: &CompactGraph,
    rides: &[Ride],
    routes: &[RouteAssignment],
    params: &SimParams,
    snapshot_every: Option<u32>,
) -> Result<TrafficLog> {
    params.validate()?;
    if rides.len() != routes.len() {
        return Err(Error::Input(format!(
            "{} rides but {} routes",
            rides.len(),
            routes.len()
        )));
    }
    for (i, ride) in rides.iter().enumerate() {
        if ride.theta >= params.t_max {
            return Err(Error::Input(format!(
                "ride {i} starts at {} but the day is only {} steps",
                ride.theta, params.t_max
            )));
        }
        if let RouteAssignment::Route(edges) = &routes[i] {
            validate_route(graph, ride, edges, i)?;
        }
    }

    let n = rides.len();
    let mut vehicles: Vec<Vehicle> = (0..n)
        .map(|_| Vehicle {
            leg: 0,
            speed: 0,
            status: Status::Waiting,
        })
        .collect();
    let mut outcomes = vec![RideOutcome::Unfinished; n];
    let mut order: Vec<u32> = (0..n as u32)
        .filter(|&i| match &routes[i as usize] {
            RouteAssignment::Route(_) => true,
            RouteAssignment::Unreachable => {
                outcomes[i as usize] = RideOutcome::Unreachable;
                false
            }
        })
        .collect();
    order.sort_by_key(|&i| (rides[i as usize].theta, i));

    let route_of = |i: u32| -> &[u32] {
        match &routes[i as usize] {
            RouteAssignment::Route(edges) => edges,
            RouteAssignment::Unreachable => unreachable!("unreachable rides are never injected"),
        }
    };

    let mut occ = vec![EMPTY; net.total_cells];
    let mut traversals = vec![0u64; graph.edge_count()];
    let mut active: BTreeSet<u32> = BTreeSet::new();
    let mut snapshots = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut finished = 0usize;
    let mut injected = 0usize;

    let hard_stop = params.t_max.saturating_mul(100).max(1_000_000);
    let mut inj = 0usize;
    let mut snapshot_buf: Vec<u32> = Vec::new();
    let mut scratch: Vec<u32> = Vec::new();
    let mut free_lanes: Vec<u32> = Vec::new();
    let mut t: u32 = 0;

    loop {
        if active.is_empty() {
            if inj == order.len() {
                break; // every ride resolved; remaining steps are no-ops
            }
            // Skip idle steps up to the next injection.
            let next = rides[order[inj] as usize].theta;
            if next > t {
                t = next;
            }
        }

        // Inject rides that start now (ascending ride id).
        while inj < order.len() && rides[order[inj] as usize].theta == t {
            let id = order[inj];
            vehicles[id as usize] = Vehicle {
                leg: 0,
                speed: 0,
                status: Status::Waiting,
            };
            active.insert(id);
            injected += 1;
            inj += 1;
        }

        // Waiting rides try to enter the first free lane of their edge.
        scratch.clear();
        scratch.extend(active.iter().copied());
        for &id in &scratch {
            let v = &vehicles[id as usize];
            if v.status != Status::Waiting {
                continue;
            }
            let edge = route_of(id)[v.leg as usize];
            free_lanes.clear();
            for lane in 0..net.lanes(edge) {
                if occ[net.pos(edge, lane, 1)] == EMPTY {
                    free_lanes.push(lane);
                }
            }
            if free_lanes.is_empty() {
                continue;
            }
            let lane = if free_lanes.len() == 1 {
                free_lanes[0]
            } else {
                free_lanes[rng.random_range(0..free_lanes.len())]
            };
            occ[net.pos(edge, lane, 1)] = id;
            traversals[edge as usize] += 1;
            vehicles[id as usize].status = Status::Traversing { lane, cell: 1 };
        }

        // Traversing rides accelerate, change lanes, slow down, advance.
        scratch.clear();
        scratch.extend(active.iter().copied());
        for &id in &scratch {
            let Status::Traversing { lane, cell } = vehicles[id as usize].status else {
                continue;
            };
            let vehicle = &mut vehicles[id as usize];
            let edge = route_of(id)[vehicle.leg as usize];
            let ce = net.cells(edge);
            let mut speed = (vehicle.speed + 1).min(params.v_max);

            let mut lane = lane;
            let mut gap = gap_ahead(&occ, net, edge, lane, cell);
            if gap < speed {
                // Move to the lane with the most room at this cell index;
                // the target cell must be free. Ties keep the lowest lane.
                let mut best_lane = lane;
                let mut best_gap = gap;
                for cand in 0..net.lanes(edge) {
                    if cand == lane {
                        continue;
                    }
                    if occ[net.pos(edge, cand, cell)] != EMPTY {
                        continue;
                    }
                    let cand_gap = gap_ahead(&occ, net, edge, cand, cell);
                    if cand_gap > best_gap || (cand_gap == best_gap && cand < best_lane) {
                        best_lane = cand;
                        best_gap = cand_gap;
                    }
                }
                if best_lane != lane {
                    debug_assert_eq!(occ[net.pos(edge, lane, cell)], id);
                    occ[net.pos(edge, lane, cell)] = EMPTY;
                    debug_assert_eq!(occ[net.pos(edge, best_lane, cell)], EMPTY);
                    occ[net.pos(edge, best_lane, cell)] = id;
                    lane = best_lane;
                    gap = best_gap;
                }
            }
            speed = speed.min(gap);
            if params.p_slow > 0.0 && rng.random_bool(params.p_slow) {
                speed = speed.saturating_sub(1);
            }

            let new_cell = cell + speed;
            debug_assert!(new_cell <= ce);
            if new_cell != cell {
                debug_assert_eq!(occ[net.pos(edge, lane, cell)], id);
                occ[net.pos(edge, lane, cell)] = EMPTY;
                if new_cell < ce {
                    debug_assert_eq!(occ[net.pos(edge, lane, new_cell)], EMPTY);
                    occ[net.pos(edge, lane, new_cell)] = id;
                }
            } else if new_cell == ce {
                // Entered a one-cell edge this step and leaves it now.
                occ[net.pos(edge, lane, cell)] = EMPTY;
            }

            vehicle.speed = speed;
            if new_cell == ce {
                if (vehicle.leg as usize) + 1 < route_of(id).len() {
                    vehicle.leg += 1;
                    vehicle.speed = 0;
                    vehicle.status = Status::Waiting;
                } else {
                    vehicle.status = Status::Done;
                    outcomes[id as usize] =
                        RideOutcome::Finished { steps: t + 1 - rides[id as usize].theta };
                    finished += 1;
                    active.remove(&id);
                }
            } else {
                vehicle.status = Status::Traversing { lane, cell: new_cell };
            }
        }

        debug_assert_eq!(injected, finished + active.len(), "ride conservation");

        if let Some(every) = snapshot_every {
            if every > 0 && t % every == 0 {
                snapshots.push(render_snapshot(t, &occ, net, &mut snapshot_buf));
            }
        }

        t += 1;
        if t >= hard_stop && !active.is_empty() {
            log::warn!(
                "safety stop at step {t}: {} rides still on the road",
                active.len()
            );
            break;
        }
        if t >= params.t_max && active.is_empty() && inj == order.len() {
            break;
        }
    }

    Ok(TrafficLog {
        outcomes,
        thetas: rides.iter().map(|r| r.theta).collect(),
        traversals,
        network_hash: graph.fingerprint().to_string(),
        snapshots,
    })
}

fn validate_route(graph: &CompactGraph, ride: &Ride, edges: &[u32], idx: usize) -> Result<()> {
    if edges.is_empty() {
        return Err(Error::Input(format!("ride {idx} has an empty route")));
    }
    let s = graph
        .node_idx(ride.start)
        .ok_or_else(|| Error::Input(format!("ride {idx} start node {} unknown", ride.start)))?;
    let e = graph
        .node_idx(ride.end)
        .ok_or_else(|| Error::Input(format!("ride {idx} end node {} unknown", ride.end)))?;
    let mut at = s;
    for &eidx in edges {
        if eidx as usize >= graph.edge_count() {
            return Err(Error::Input(format!("ride {idx} route references edge {eidx}")));
        }
        let edge = graph.edge(eidx);
        if edge.from != at {
            return Err(Error::Input(format!("ride {idx} route is not contiguous")));
        }
        at = edge.to;
    }
    if at != e {
        return Err(Error::Input(format!("ride {idx} route does not reach its end node")));
    }
    Ok(())
}

/// Contiguous empty cells in front of `cell` on `lane`, within the edge.
#[inline]
fn gap_ahead(occ: &[u32], net: &SimNetwork, edge: u32, lane: u32, cell: u32) -> u32 {
    let ce = net.cells(edge);
    let mut gap = 0;
    let mut c = cell + 1;
    while c <= ce && occ[net.pos(edge, lane, c)] == EMPTY {
        gap += 1;
        c += 1;
    }
    gap
}

/// Run-length occupancy rendering: `e<edge> l<lane> 3.1x2.` means three
/// empty cells, one occupied, two empty. Lanes with no vehicles are omitted.
fn render_snapshot(t: u32, occ: &[u32], net: &SimNetwork, _buf: &mut Vec<u32>) -> String {
    let mut out = format!("t={t}");
    for edge in 0..net.cells.len() as u32 {
        for lane in 0..net.lanes(edge) {
            let ce = net.cells(edge);
            let mut any = false;
            for cell in 1..=ce {
                if occ[net.pos(edge, lane, cell)] != EMPTY {
                    any = true;
                    break;
                }
            }
            if !any {
                continue;
            }
            let mut rle = String::new();
            let mut run_char = ' ';
            let mut run_len = 0u32;
            for cell in 1..=ce {
                let ch = if occ[net.pos(edge, lane, cell)] == EMPTY { '.' } else { 'x' };
                if ch == run_char {
                    run_len += 1;
                } else {
                    if run_len > 0 {
                        rle.push_str(&format!("{run_len}{run_char}"));
                    }
                    run_char = ch;
                    run_len = 1;
                }
            }
            if run_len > 0 {
                rle.push_str(&format!("{run_len}{run_char}"));
            }
            out.push_str(&format!(" e{edge} l{lane} {rle}"));
        }
    }
    out
}

/// Ride times under the reduced regime used by the exact solvers: every
/// edge one cell long, one lane per ride so nothing queues, unit top speed,
/// no random slowdown, every ride starting at step zero, hop-count routes.
pub fn degenerate_ride_times(
    graph: &CompactGraph,
    pairs: &[(NodeId, NodeId)],
    blocked: Option<&[bool]>,
    seed: u64,
) -> Result<Vec<RideTime>> {
    let rides: Vec<Ride> = pairs
        .iter()
        .map(|&(start, end)| Ride { start, end, theta: 0 })
        .collect();
    let routes = compute_routes_with_metric(graph, &rides, blocked, Metric::Hops)?;
    let net = SimNetwork::uniform(graph, 1, rides.len().max(1) as u32);
    let params = SimParams {
        d_vehicle_m: 7.5,
        v_max: 1,
        p_slow: 0.0,
        t_max: 1,
        seed,
    };
    let log = run(&net, graph, &rides, &routes, &params)?;
    Ok(log.ride_times())
}
