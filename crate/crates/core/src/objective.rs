//! Traffic-quality objective: the mean of reciprocal ride times.
//!
//! Higher values mean better traffic; a disconnected ride contributes zero.
//! `m_empty_time` gives the interaction-free model where a ride's time is
//! the hop count of a shortest path.

use crate::error::{Error, Result};
use crate::road_network::NodeId;
use crate::routing::CompactGraph;

/// A ride's completion time in steps, or unreachable (treated as infinite).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RideTime {
    Finished(u32),
    Unreachable,
}

impl RideTime {
    /// Reciprocal with `1/infinity = 0`.
    fn reciprocal(self) -> Result<f64> {
        match self {
            RideTime::Finished(0) => Err(Error::Domain(
                "completed ride with zero time; times must be at least one step".into(),
            )),
            RideTime::Finished(t) => Ok(1.0 / f64::from(t)),
            RideTime::Unreachable => Ok(0.0),
        }
    }
}

/// Mean of reciprocal ride times.
pub fn f_star(times: &[RideTime]) -> Result<f64> {
    if times.is_empty() {
        return Err(Error::Domain("traffic quality of an empty ride set".into()));
    }
    let mut sum = 0.0;
    for &t in times {
        sum += t.reciprocal()?;
    }
    Ok(sum / times.len() as f64)
}

/// Ride time under the interaction-free model: hop count of a shortest
/// path, unreachable when no path survives.
pub fn m_empty_time(
    graph: &CompactGraph,
    start: NodeId,
    end: NodeId,
    blocked: Option<&[bool]>,
) -> Result<RideTime> {
    let s = graph
        .node_idx(start)
        .ok_or_else(|| Error::Input(format!("unknown node id {start}")))?;
    let t = graph
        .node_idx(end)
        .ok_or_else(|| Error::Input(format!("unknown node id {end}")))?;
    Ok(match graph.hop_distance(s, t, blocked) {
        Some(d) => RideTime::Finished(d),
        None => RideTime::Unreachable,
    })
}

/// Traffic quality of a ride set under the interaction-free model.
pub fn f_star_m_empty(
    graph: &CompactGraph,
    rides: &[(NodeId, NodeId)],
    blocked: Option<&[bool]>,
) -> Result<f64> {
    let times = rides
        .iter()
        .map(|&(s, e)| m_empty_time(graph, s, e, blocked))
        .collect::<Result<Vec<_>>>()?;
    f_star(&times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::GeoCoord;
    use crate::road_network::RoadNetwork;

    #[test]
    fn f_star_examples() {
        use RideTime::*;
        assert_eq!(f_star(&[Finished(1), Finished(2)]).unwrap(), 0.75);
        assert_eq!(f_star(&[Unreachable, Unreachable]).unwrap(), 0.0);
        assert_eq!(f_star(&[Finished(5)]).unwrap(), 0.2);
    }

    #[test]
    fn f_star_domain_errors() {
        assert!(matches!(f_star(&[]), Err(Error::Domain(_))));
        assert!(matches!(
            f_star(&[RideTime::Finished(0)]),
            Err(Error::Domain(_))
        ));
    }

    fn line_graph() -> CompactGraph {
        let mut net = RoadNetwork::new();
        for (id, lon) in [(1u64, 0.0), (2, 0.001), (3, 0.002)] {
            net.insert_node(NodeId(id), GeoCoord::new(0.0, lon).unwrap());
        }
        net.insert_edge(NodeId(1), NodeId(2), 100.0, 1).unwrap();
        net.insert_edge(NodeId(2), NodeId(3), 100.0, 1).unwrap();
        CompactGraph::from_network(&net)
    }

    #[test]
    fn hop_time_for_adjacent_nodes_is_one() {
        let g = line_graph();
        assert_eq!(
            m_empty_time(&g, NodeId(1), NodeId(2), None).unwrap(),
            RideTime::Finished(1)
        );
        assert_eq!(
            m_empty_time(&g, NodeId(1), NodeId(3), None).unwrap(),
            RideTime::Finished(2)
        );
    }

    #[test]
    fn removal_makes_pair_unreachable() {
        let g = line_graph();
        let mut blocked = vec![false; g.edge_count()];
        let s = g.node_idx(NodeId(2)).unwrap();
        let t = g.node_idx(NodeId(3)).unwrap();
        blocked[g.edge_index(s, t).unwrap() as usize] = true;
        assert_eq!(
            m_empty_time(&g, NodeId(1), NodeId(3), Some(&blocked)).unwrap(),
            RideTime::Unreachable
        );
    }

    #[test]
    fn unknown_node_is_input_error() {
        let g = line_graph();
        assert!(matches!(
            m_empty_time(&g, NodeId(1), NodeId(99), None),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn f_star_never_increases_under_deletion() {
        // Random-ish deletions on a small two-route graph.
        let mut net = RoadNetwork::new();
        for (id, lat, lon) in [
            (1u64, 0.0, 0.0),
            (2, 0.0, 0.001),
            (3, 0.001, 0.0),
            (4, 0.001, 0.001),
        ] {
            net.insert_node(NodeId(id), GeoCoord::new(lat, lon).unwrap());
        }
        for (u, v) in [(1, 2), (2, 4), (1, 3), (3, 4), (4, 1), (2, 3)] {
            net.insert_edge(NodeId(u), NodeId(v), 100.0, 1).unwrap();
        }
        let g = CompactGraph::from_network(&net);
        let rides = vec![(NodeId(1), NodeId(4)), (NodeId(2), NodeId(3)), (NodeId(4), NodeId(2))];
        let mut blocked = vec![false; g.edge_count()];
        let mut last = f_star_m_empty(&g, &rides, Some(&blocked)).unwrap();
        assert!(last <= 1.0 && last >= 0.0);
        for e in 0..g.edge_count() {
            blocked[e] = true;
            let cur = f_star_m_empty(&g, &rides, Some(&blocked)).unwrap();
            assert!(cur <= last + 1e-15, "deletion increased f*: {last} -> {cur}");
            assert!((0.0..=1.0).contains(&cur));
            last = cur;
        }
    }
}
