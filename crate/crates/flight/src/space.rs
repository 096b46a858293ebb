use std::cmp::Ordering;

use crate::aircraft::{Aircraft, ArcCost, Level, LevelTable};
use crate::network::ProjectedNetwork;

/// Detour factor bounding the search space around the great circle.
pub const DETOUR_FACTOR: f64 = 1.2;

/// A waypoint at a flight level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex3d {
    pub waypoint: usize,
    pub level: Level,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expansion {
    pub head: Vertex3d,
    pub segment: usize,
    pub cost: ArcCost,
}

/// The part of the 3-D airway graph relevant to one origin-destination
/// pair. Waypoints outside the detour ellipse are excluded and segments are
/// oriented towards the destination, which makes the graph acyclic.
#[derive(Debug, Clone)]
pub struct SearchSpace<'a> {
    network: &'a ProjectedNetwork,
    levels: &'a LevelTable,
    aircraft: &'a Aircraft,
    source: usize,
    target: usize,
    inside: Vec<bool>,
    to_target_km: Vec<f64>,
    /// Kept out-segments per waypoint, ordered by head then segment index.
    out: Vec<Vec<usize>>,
}

impl<'a> SearchSpace<'a> {
    pub fn new(
        network: &'a ProjectedNetwork,
        levels: &'a LevelTable,
        aircraft: &'a Aircraft,
        source: usize,
        target: usize,
    ) -> Self {
        let n = network.num_waypoints();
        let to_target_km: Vec<f64> = (0..n).map(|v| network.gcd_km(v, target)).collect();
        let limit = DETOUR_FACTOR * network.gcd_km(source, target);
        let inside: Vec<bool> = (0..n)
            .map(|v| network.gcd_km(source, v) + to_target_km[v] <= limit * (1.0 + 1e-12))
            .collect();
        let mut space = SearchSpace {
            network,
            levels,
            aircraft,
            source,
            target,
            inside,
            to_target_km,
            out: vec![Vec::new(); n],
        };
        for (i, seg) in network.segments().iter().enumerate() {
            if space.keeps(seg.tail, seg.head) {
                space.out[seg.tail].push(i);
            }
        }
        for list in &mut space.out {
            list.sort_by_key(|&i| (network.segments()[i].head, i));
        }
        space
    }

    /// Orientation order: closer to the target comes later, ties by index.
    pub fn precedes(&self, u: usize, v: usize) -> bool {
        match self.to_target_km[u].total_cmp(&self.to_target_km[v]) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => u < v,
        }
    }

    fn keeps(&self, u: usize, v: usize) -> bool {
        self.inside[u] && self.inside[v] && self.precedes(u, v)
    }

    pub fn keeps_segment(&self, segment: usize) -> bool {
        let s = self.network.segments()[segment];
        self.keeps(s.tail, s.head)
    }

    pub fn contains(&self, waypoint: usize) -> bool {
        self.inside[waypoint]
    }

    pub fn network(&self) -> &ProjectedNetwork {
        self.network
    }

    pub fn levels(&self) -> &LevelTable {
        self.levels
    }

    pub fn aircraft(&self) -> &Aircraft {
        self.aircraft
    }

    /// Departure happens at the lowest level.
    pub fn source3d(&self) -> Vertex3d {
        Vertex3d {
            waypoint: self.source,
            level: 1,
        }
    }

    /// Arrival happens at the lowest level.
    pub fn target3d(&self) -> Vertex3d {
        Vertex3d {
            waypoint: self.target,
            level: 1,
        }
    }

    /// Outgoing 3-D arcs: per kept segment, cruise plus every feasible
    /// level change, in segment then level order.
    pub fn expand_neighbors(&self, v: Vertex3d) -> Vec<Expansion> {
        let mut out = Vec::new();
        for &i in &self.out[v.waypoint] {
            let seg = self.network.segments()[i];
            for level in self.levels.levels() {
                if let Some(cost) = self.aircraft.arc_cost(self.levels, seg.length_km, v.level, level) {
                    out.push(Expansion {
                        head: Vertex3d {
                            waypoint: seg.head,
                            level,
                        },
                        segment: i,
                        cost,
                    });
                }
            }
        }
        out
    }

    /// Fuel needed to reach the target at the optimal level along the
    /// great circle.
    pub fn heuristic_kg(&self, v: Vertex3d) -> f64 {
        self.aircraft.heuristic_kg(self.to_target_km[v.waypoint])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::LatLon;

    fn line() -> ProjectedNetwork {
        let mut n = ProjectedNetwork::new();
        n.add_waypoint("S", LatLon::new(0.0, 0.0)).unwrap();
        n.add_waypoint("M", LatLon::new(0.0, 1.0)).unwrap();
        n.add_waypoint("T", LatLon::new(0.0, 2.0)).unwrap();
        n.add_waypoint("FAR", LatLon::new(5.0, 1.0)).unwrap();
        n.add_waypoint("ISO", LatLon::new(0.1, 1.5)).unwrap();
        n.add_segment("S", "M").unwrap();
        n.add_segment("M", "S").unwrap();
        n.add_segment("M", "T").unwrap();
        n.add_segment("S", "FAR").unwrap();
        n
    }

    #[test]
    fn filtering_and_orientation() {
        let n = line();
        let (t, a) = (LevelTable::linear(3, 1000.0, 2000.0).unwrap(), Aircraft::default());
        let sp = SearchSpace::new(&n, &t, &a, 0, 2);
        assert!(!sp.contains(3));
        assert!(sp.contains(4));
        assert!(sp.keeps_segment(0));
        assert!(!sp.keeps_segment(1));
        assert!(sp.keeps_segment(2));
        assert!(!sp.keeps_segment(3));
    }

    #[test]
    fn expansion() {
        let n = line();
        let (t, a) = (LevelTable::linear(3, 1000.0, 2000.0).unwrap(), Aircraft::default());
        let sp = SearchSpace::new(&n, &t, &a, 0, 2);
        assert!(sp.expand_neighbors(Vertex3d { waypoint: 4, level: 2 }).is_empty());
        let e = sp.expand_neighbors(Vertex3d { waypoint: 1, level: 2 });
        let heads: Vec<Level> = e.iter().map(|x| x.head.level).collect();
        assert_eq!(heads, vec![1, 2, 3]);
        assert!(e.iter().all(|x| x.head.waypoint == 2));
        // a 1 km segment only admits cruise
        let mut short = ProjectedNetwork::new();
        short.add_waypoint("S", LatLon::new(0.0, 0.0)).unwrap();
        short.add_waypoint("T", LatLon::new(0.0, 0.009)).unwrap();
        short.add_segment("S", "T").unwrap();
        let sp = SearchSpace::new(&short, &t, &a, 0, 1);
        let e = sp.expand_neighbors(Vertex3d { waypoint: 0, level: 2 });
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].head.level, 2);
    }

    #[test]
    fn heuristic_values() {
        let n = line();
        let (t, a) = (LevelTable::standard(), Aircraft::default());
        let sp = SearchSpace::new(&n, &t, &a, 0, 2);
        assert_eq!(sp.heuristic_kg(sp.target3d()), 0.0);
        let d = n.gcd_km(1, 2);
        assert!((sp.heuristic_kg(Vertex3d { waypoint: 1, level: 7 }) - 6.0 * d).abs() < 1e-9);
    }
}
