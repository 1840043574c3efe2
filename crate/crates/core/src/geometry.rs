//! Link geometry for a UAV and a vehicle on the same street centerline.
//!
//! Frame: the street runs along `x`, the vehicle antenna sits at
//! `(x_v, 0, h_v)` and the UAV at `(x_v + D, 0, H)`. Facades are the planes
//! `y = ±S/2`; block `k` of either row covers `x ∈ [x0 + k(W+S), x0 + k(W+S) + W)`
//! where `x0` is the grid offset.
//!
//! Because both terminals are on the centerline, the specular point on either
//! facade sits at the street-axis midpoint `x_v + D/2` and at height
//! `(H + h_v)/2`. A wall reflection exists on a side when that midpoint lands on
//! a wall and the building is tall enough, i.e. `H ≤ 2·h_p − h_v`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::{BuildingHeights, GridLayout};

pub use crate::scenario::Side;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkGeometry {
    /// Horizontal UAV–vehicle separation along the street, metres.
    pub distance: f64,
    /// UAV altitude, metres.
    pub altitude: f64,
    /// Vehicle antenna height, metres.
    pub vehicle_height: f64,
    pub layout: GridLayout,
    /// Vehicle position along the street axis, metres.
    pub vehicle_x: f64,
    /// Street-axis coordinate where block 0 begins.
    pub grid_offset: f64,
}

impl LinkGeometry {
    pub fn new(
        distance: f64,
        altitude: f64,
        vehicle_height: f64,
        layout: GridLayout,
    ) -> Result<Self> {
        let g = Self {
            distance,
            altitude,
            vehicle_height,
            layout,
            vehicle_x: 0.0,
            grid_offset: 0.0,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn with_vehicle_x(mut self, x: f64) -> Self {
        self.vehicle_x = x;
        self
    }

    pub fn with_grid_offset(mut self, offset: f64) -> Self {
        self.grid_offset = offset;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.distance >= 0.0 && self.distance.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "horizontal distance must be non-negative, got {}",
                self.distance
            )));
        }
        if !(self.vehicle_height > 0.0 && self.vehicle_height.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "vehicle antenna height must be positive, got {}",
                self.vehicle_height
            )));
        }
        if !(self.altitude > self.vehicle_height && self.altitude.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "UAV altitude {} must exceed vehicle antenna height {}",
                self.altitude, self.vehicle_height
            )));
        }
        if !(self.vehicle_x.is_finite() && self.grid_offset.is_finite()) {
            return Err(Error::InvalidGeometry(
                "vehicle position and grid offset must be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn uav_x(&self) -> f64 {
        self.vehicle_x + self.distance
    }
}

pub fn los_distance(g: &LinkGeometry) -> f64 {
    let dz = g.altitude - g.vehicle_height;
    (g.distance * g.distance + dz * dz).sqrt()
}

pub fn ground_reflection_length(g: &LinkGeometry) -> f64 {
    let dz = g.altitude + g.vehicle_height;
    (g.distance * g.distance + dz * dz).sqrt()
}

/// Unfolded length of a first-order facade reflection. Both sides share it
/// since each facade is `S/2` from the centerline, putting the image `S` away.
pub fn wall_reflection_length(g: &LinkGeometry) -> f64 {
    let s = g.layout.street;
    let dz = g.altitude - g.vehicle_height;
    (s * s + g.distance * g.distance + dz * dz).sqrt()
}

/// Highest UAV altitude at which a building of height `h_p` still reflects.
pub fn critical_altitude(building_height: f64, vehicle_height: f64) -> f64 {
    2.0 * building_height - vehicle_height
}

/// Street-axis coordinate of the potential specular point on either facade.
pub fn reflection_midpoint(g: &LinkGeometry) -> f64 {
    g.vehicle_x + g.distance / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FacadeHit {
    pub on_facade: bool,
    /// Block containing `x`, or the block preceding the gap `x` falls in.
    pub block: i64,
}

/// Whether street-axis coordinate `x` faces a wall, with blocks anchored at 0.
pub fn facade_hit_test(x: f64, layout: &GridLayout) -> FacadeHit {
    let period = layout.period();
    let k = (x / period).floor();
    let rem = x - k * period;
    FacadeHit {
        on_facade: rem < layout.width,
        block: k as i64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SideProfile {
    pub side: Side,
    pub block: i64,
    pub on_facade: bool,
    /// Height of the building holding the potential reflection point; `None` over a gap.
    pub building_height: Option<f64>,
    /// `2·h_p − h_v`; `None` over a gap.
    pub critical_altitude: Option<f64>,
    pub wall_reflection: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultipathBreakdown {
    pub d_los: f64,
    pub d_ref_g: f64,
    pub d_ref_b: f64,
    /// Number of wall reflections, 0..=2.
    pub num_wr: u8,
    pub sides: [SideProfile; 2],
}

pub fn analyze_link<B: BuildingHeights + ?Sized>(
    g: &LinkGeometry,
    heights: &B,
) -> MultipathBreakdown {
    let hit = facade_hit_test(reflection_midpoint(g) - g.grid_offset, &g.layout);
    let profile = |side: Side| {
        if !hit.on_facade {
            return SideProfile {
                side,
                block: hit.block,
                on_facade: false,
                building_height: None,
                critical_altitude: None,
                wall_reflection: false,
            };
        }
        let h_p = heights.height(side, hit.block);
        let h_c = critical_altitude(h_p, g.vehicle_height);
        SideProfile {
            side,
            block: hit.block,
            on_facade: true,
            building_height: Some(h_p),
            critical_altitude: Some(h_c),
            wall_reflection: g.altitude <= h_c,
        }
    };
    let sides = [profile(Side::Left), profile(Side::Right)];
    let num_wr = sides.iter().filter(|s| s.wall_reflection).count() as u8;
    MultipathBreakdown {
        d_los: los_distance(g),
        d_ref_g: ground_reflection_length(g),
        d_ref_b: wall_reflection_length(g),
        num_wr,
        sides,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{ConstantHeights, HeightTable};

    fn urban() -> GridLayout {
        GridLayout::new(24.5, 20.2).unwrap()
    }

    fn link(d: f64, h: f64, hv: f64) -> LinkGeometry {
        LinkGeometry {
            distance: d,
            altitude: h,
            vehicle_height: hv,
            layout: urban(),
            vehicle_x: 0.0,
            grid_offset: 0.0,
        }
    }

    #[test]
    fn los_examples() {
        assert_eq!(los_distance(&link(0.0, 11.5, 1.5)), 10.0);
        assert!((los_distance(&link(50.0, 50.0, 1.5)) - 69.658).abs() < 1e-3);
        assert_eq!(los_distance(&link(100.0, 1.5, 1.5)), 100.0);
    }

    #[test]
    fn ground_examples() {
        assert!((ground_reflection_length(&link(50.0, 50.0, 1.5)) - 71.779).abs() < 1e-3);
        assert_eq!(ground_reflection_length(&link(0.0, 10.0, 2.0)), 12.0);
    }

    #[test]
    fn wall_examples() {
        let g = link(50.0, 50.0, 1.5);
        assert!((wall_reflection_length(&g) - 72.528).abs() < 1e-3);
        let mut flat = g;
        flat.layout = GridLayout::new(10.0, 0.0).unwrap();
        assert_eq!(wall_reflection_length(&flat), los_distance(&flat));
    }

    #[test]
    fn wall_length_is_twice_half_path_at_roof_edge() {
        // with H = 2h_p − h_v the specular point is at the roof edge and each
        // half of the reflected path spans (D/2, S/2, h_p − h_v)
        let hv = 1.5;
        let hp = 27.0;
        let g = link(50.0, critical_altitude(hp, hv), hv);
        let s = g.layout.street;
        let half = ((g.distance / 2.0).powi(2) + (s / 2.0).powi(2) + (hp - hv).powi(2)).sqrt();
        assert!((2.0 * half - wall_reflection_length(&g)).abs() < 1e-9);
    }

    #[test]
    fn critical_altitude_examples() {
        assert_eq!(critical_altitude(20.0, 1.5), 38.5);
        assert_eq!(critical_altitude(1.5, 1.5), 1.5);
        assert_eq!(critical_altitude(25.0, 1.5), 48.5);
    }

    #[test]
    fn threshold_counts_as_present() {
        let g = link(10.0, 48.5, 1.5);
        let b = analyze_link(&g, &ConstantHeights(25.0));
        assert_eq!(b.num_wr, 2);
    }

    #[test]
    fn midpoint_examples() {
        assert_eq!(reflection_midpoint(&link(50.0, 50.0, 1.5)), 25.0);
        let g = link(0.0, 50.0, 1.5).with_vehicle_x(10.0);
        assert_eq!(reflection_midpoint(&g), 10.0);
    }

    #[test]
    fn hit_test_examples() {
        let l = urban();
        assert_eq!(
            facade_hit_test(0.0, &l),
            FacadeHit {
                on_facade: true,
                block: 0
            }
        );
        assert_eq!(
            facade_hit_test(30.0, &l),
            FacadeHit {
                on_facade: false,
                block: 0
            }
        );
        assert!(facade_hit_test(24.4999, &l).on_facade);
        assert!(!facade_hit_test(24.5, &l).on_facade);
        assert_eq!(facade_hit_test(-1.0, &l).block, -1);
        assert!(!facade_hit_test(-1.0, &l).on_facade);
        assert_eq!(facade_hit_test(44.7, &l).block, 1);
    }

    #[test]
    fn validation() {
        assert!(LinkGeometry::new(10.0, 1.0, 1.5, urban()).is_err());
        assert!(LinkGeometry::new(-1.0, 50.0, 1.5, urban()).is_err());
        assert!(LinkGeometry::new(10.0, 50.0, 0.0, urban()).is_err());
        assert!(LinkGeometry::new(0.0, 50.0, 1.5, urban()).is_ok());
    }

    #[test]
    fn two_reflections_when_both_buildings_tall() {
        let g = link(10.0, 30.0, 1.5);
        let b = analyze_link(&g, &ConstantHeights(40.0));
        assert_eq!(b.num_wr, 2);
        assert!(b.sides.iter().all(|s| s.critical_altitude == Some(78.5)));
    }

    #[test]
    fn gap_means_no_reflection_at_any_altitude() {
        // midpoint 30 m falls in the gap after block 0
        for h in [2.0, 10.0, 50.0, 300.0] {
            let b = analyze_link(&link(60.0, h, 1.5), &ConstantHeights(1e6));
            assert_eq!(b.num_wr, 0);
            assert!(b.sides.iter().all(|s| s.building_height.is_none()));
        }
    }

    #[test]
    fn above_both_critical_altitudes() {
        let b = analyze_link(&link(10.0, 100.0, 1.5), &ConstantHeights(20.0));
        assert_eq!(b.num_wr, 0);
        assert!(b.sides.iter().all(|s| s.on_facade));
    }

    #[test]
    fn one_reflection_between_critical_altitudes() {
        let mut t = HeightTable::default();
        t.insert(Side::Left, 0, 20.0);
        t.insert(Side::Right, 0, 40.0);
        let b = analyze_link(&link(10.0, 50.0, 1.5), &t);
        assert_eq!(b.num_wr, 1);
        assert!(!b.sides[0].wall_reflection);
        assert!(b.sides[1].wall_reflection);
    }

    #[test]
    fn grid_offset_shifts_pattern() {
        // midpoint 5 m; with blocks starting at 10 m it lands in the gap of block −1
        let g = link(10.0, 20.0, 1.5).with_grid_offset(10.0);
        let b = analyze_link(&g, &ConstantHeights(100.0));
        assert_eq!(b.num_wr, 0);
        assert_eq!(b.sides[0].block, -1);
    }
}
