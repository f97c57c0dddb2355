//! Geographic primitives: WGS84 coordinates, great-circle distance, polygons.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Earth radius in meters, fixed so distances are bit-reproducible.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// A WGS84 coordinate in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoCoord {
    pub lat: f64,
    pub lon: f64,
}

impl GeoCoord {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&lat) || !lat.is_finite() {
            return Err(Error::Input(format!("latitude {lat} out of [-90, 90]")));
        }
        if !(-180.0..=180.0).contains(&lon) || !lon.is_finite() {
            return Err(Error::Input(format!("longitude {lon} out of [-180, 180]")));
        }
        Ok(Self { lat, lon })
    }
}

/// Great-circle distance between two coordinates in meters (haversine).
pub fn haversine_m(a: GeoCoord, b: GeoCoord) -> f64 {
    let lat_a = a.lat.to_radians();
    let lat_b = b.lat.to_radians();
    let dlat = (b.lat - a.lat).to_radians();
    let dlon = (b.lon - a.lon).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat_a.cos() * lat_b.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

/// Midpoint of two coordinates by arithmetic mean of lat/lon.
pub fn midpoint(a: GeoCoord, b: GeoCoord) -> GeoCoord {
    GeoCoord {
        lat: (a.lat + b.lat) / 2.0,
        lon: (a.lon + b.lon) / 2.0,
    }
}

/// A simple closed polygon over lat/lon treated as a plane.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Polygon {
    ring: Vec<GeoCoord>,
}

impl Polygon {
    /// Builds a polygon from a ring of vertices. A repeated final vertex
    /// equal to the first is accepted and dropped.
    pub fn new(mut ring: Vec<GeoCoord>) -> Result<Self> {
        if ring.len() > 1 && ring.first() == ring.last() {
            ring.pop();
        }
        if ring.len() < 3 {
            return Err(Error::Input(format!(
                "polygon needs at least 3 distinct vertices, got {}",
                ring.len()
            )));
        }
        Ok(Self { ring })
    }

    pub fn vertices(&self) -> &[GeoCoord] {
        &self.ring
    }

    /// Even-odd point-in-polygon test in (lon, lat) coordinates.
    pub fn contains(&self, p: GeoCoord) -> bool {
        let mut inside = false;
        let n = self.ring.len();
        let mut j = n - 1;
        for i in 0..n {
            let a = self.ring[i];
            let b = self.ring[j];
            if (a.lat > p.lat) != (b.lat > p.lat) {
                let x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
                if p.lon < x {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coord(lat: f64, lon: f64) -> GeoCoord {
        GeoCoord::new(lat, lon).unwrap()
    }

    #[test]
    fn haversine_identity() {
        let a = coord(41.88, -87.63);
        assert_eq!(haversine_m(a, a), 0.0);
    }

    #[test]
    fn haversine_one_degree_at_equator() {
        // One degree of arc on a 6,371,000 m sphere: R * pi / 180.
        let expected = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
        let got = haversine_m(coord(0.0, 0.0), coord(0.0, 1.0));
        assert!((got - expected).abs() < 1e-6, "got {got}, expected {expected}");
        assert!((got - 111_194.93).abs() < 0.01);
    }

    #[test]
    fn haversine_symmetric() {
        let a = coord(41.88, -87.63);
        let b = coord(41.95, -87.70);
        assert_eq!(haversine_m(a, b), haversine_m(b, a));
    }

    #[test]
    fn coord_bounds_checked() {
        assert!(GeoCoord::new(91.0, 0.0).is_err());
        assert!(GeoCoord::new(-91.0, 0.0).is_err());
        assert!(GeoCoord::new(0.0, 181.0).is_err());
        assert!(GeoCoord::new(0.0, -181.0).is_err());
        assert!(GeoCoord::new(45.0, 45.0).is_ok());
    }

    #[test]
    fn polygon_rejects_degenerate() {
        assert!(Polygon::new(vec![coord(0.0, 0.0), coord(1.0, 1.0)]).is_err());
    }

    #[test]
    fn polygon_contains_square() {
        let square = Polygon::new(vec![
            coord(0.0, 0.0),
            coord(0.0, 10.0),
            coord(10.0, 10.0),
            coord(10.0, 0.0),
        ])
        .unwrap();
        assert!(square.contains(coord(5.0, 5.0)));
        assert!(!square.contains(coord(15.0, 5.0)));
        assert!(!square.contains(coord(-1.0, -1.0)));
    }

    #[test]
    fn polygon_closed_ring_accepted() {
        let square = Polygon::new(vec![
            coord(0.0, 0.0),
            coord(0.0, 1.0),
            coord(1.0, 1.0),
            coord(1.0, 0.0),
            coord(0.0, 0.0),
        ])
        .unwrap();
        assert_eq!(square.vertices().len(), 4);
    }
}
