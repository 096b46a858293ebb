use std::collections::HashMap;

use thiserror::Error;

use crate::geo::{great_circle_km, LatLon};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("duplicate waypoint id {0:?}")]
    DuplicateWaypoint(String),
    #[error("waypoint {0:?} has invalid coordinates")]
    InvalidCoordinates(String),
    #[error("segment references unknown waypoint {0:?}")]
    UnknownWaypoint(String),
    #[error("segment {0:?} is a self-loop")]
    SelfLoop(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Waypoint {
    pub id: String,
    pub position: LatLon,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub tail: usize,
    pub head: usize,
    pub length_km: f64,
}

/// Two-dimensional airway network. Waypoints are referenced by index
/// internally and by id in files and restrictions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProjectedNetwork {
    waypoints: Vec<Waypoint>,
    index: HashMap<String, usize>,
    segments: Vec<Segment>,
}

impl ProjectedNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_waypoint(&mut self, id: impl Into<String>, position: LatLon) -> Result<usize, NetworkError> {
        let id = id.into();
        if !position.is_valid() {
            return Err(NetworkError::InvalidCoordinates(id));
        }
        if self.index.contains_key(&id) {
            return Err(NetworkError::DuplicateWaypoint(id));
        }
        let i = self.waypoints.len();
        self.index.insert(id.clone(), i);
        self.waypoints.push(Waypoint { id, position });
        Ok(i)
    }

    /// Adds a directed segment; its length is the great-circle distance.
    pub fn add_segment(&mut self, tail: &str, head: &str) -> Result<usize, NetworkError> {
        let u = self.lookup(tail)?;
        let v = self.lookup(head)?;
        if u == v {
            return Err(NetworkError::SelfLoop(tail.to_string()));
        }
        let length_km = great_circle_km(self.waypoints[u].position, self.waypoints[v].position);
        self.segments.push(Segment { tail: u, head: v, length_km });
        Ok(self.segments.len() - 1)
    }

    fn lookup(&self, id: &str) -> Result<usize, NetworkError> {
        self.index.get(id).copied().ok_or_else(|| NetworkError::UnknownWaypoint(id.to_string()))
    }

    pub fn waypoint_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn waypoints(&self) -> &[Waypoint] {
        &self.waypoints
    }

    pub fn waypoint(&self, i: usize) -> &Waypoint {
        &self.waypoints[i]
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn num_waypoints(&self) -> usize {
        self.waypoints.len()
    }

    pub fn gcd_km(&self, a: usize, b: usize) -> f64 {
        great_circle_km(self.waypoints[a].position, self.waypoints[b].position)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn referential_checks() {
        let mut n = ProjectedNetwork::new();
        n.add_waypoint("A", LatLon::new(0.0, 0.0)).unwrap();
        n.add_waypoint("B", LatLon::new(0.0, 1.0)).unwrap();
        assert_eq!(n.add_waypoint("A", LatLon::new(1.0, 1.0)), Err(NetworkError::DuplicateWaypoint("A".into())));
        assert!(matches!(n.add_waypoint("X", LatLon::new(91.0, 0.0)), Err(NetworkError::InvalidCoordinates(_))));
        assert_eq!(n.add_segment("A", "C"), Err(NetworkError::UnknownWaypoint("C".into())));
        assert!(n.add_segment("A", "A").is_err());
        let s = n.add_segment("A", "B").unwrap();
        assert!((n.segments()[s].length_km - 111.19492664455873).abs() < 1e-9);
    }
}
