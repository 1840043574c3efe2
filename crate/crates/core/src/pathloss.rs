//! Coherent path loss: free-space loss scaled by the magnitude of
//! `1 + Γ_g·e^{iΔφ_g} + N·Γ_b·e^{iΔφ_b}`, where `N ∈ {0, 1, 2}` wall
//! reflections share one path length and hence one phase.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{analyze_link, LinkGeometry};
use crate::scenario::{BuildingHeights, GridLayout};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Smallest field magnitude kept before a point is flagged as a deep null.
pub const FIELD_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadioConfig {
    pub frequency_hz: f64,
    /// Wall reflection coefficient Γ_b.
    pub gamma_b: f64,
    /// Ground reflection coefficient Γ_g.
    pub gamma_g: f64,
}

impl RadioConfig {
    pub fn new(frequency_hz: f64, gamma_b: f64, gamma_g: f64) -> Result<Self> {
        if !(frequency_hz > 0.0 && frequency_hz.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "frequency must be positive, got {frequency_hz}"
            )));
        }
        for (name, v) in [("gamma_b", gamma_b), ("gamma_g", gamma_g)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParams(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(Self {
            frequency_hz,
            gamma_b,
            gamma_g,
        })
    }

    /// Perfect reflectors at `frequency_hz`.
    pub fn ideal(frequency_hz: f64) -> Result<Self> {
        Self::new(frequency_hz, 1.0, 1.0)
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency_hz
    }
}

/// `(2π/λ)·(d_los − d_ref)`; never positive.
pub fn phase_difference(d_los: f64, d_ref: f64, wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0) {
        return Err(Error::InvalidInput(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    if d_ref < d_los {
        return Err(Error::InvalidInput(format!(
            "reflected path {d_ref} m is shorter than the direct path {d_los} m"
        )));
    }
    Ok(2.0 * PI / wavelength * (d_los - d_ref))
}

/// Free-space path loss `20·log10(4πd/λ)` in dB.
pub fn fspl(d: f64, wavelength: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::InvalidInput(format!(
            "distance must be positive, got {d}"
        )));
    }
    Ok(20.0 * (4.0 * PI * d / wavelength).log10())
}

pub fn field_factor(dphi_g: f64, dphi_b: f64, num_wr: u8, radio: &RadioConfig) -> Complex64 {
    Complex64::new(1.0, 0.0)
        + radio.gamma_g * Complex64::from_polar(1.0, dphi_g)
        + f64::from(num_wr) * radio.gamma_b * Complex64::from_polar(1.0, dphi_b)
}

/// Path loss from precomputed phases. Returns `(pl_db, clipped)`.
pub fn path_loss_db(
    d_los: f64,
    dphi_g: f64,
    dphi_b: f64,
    num_wr: u8,
    radio: &RadioConfig,
) -> Result<(f64, bool)> {
    let free = fspl(d_los, radio.wavelength())?;
    let amp = field_factor(dphi_g, dphi_b, num_wr, radio).norm();
    let clipped = !(amp >= FIELD_FLOOR);
    let amp = if clipped { FIELD_FLOOR } else { amp };
    Ok((free - 20.0 * amp.log10(), clipped))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathLossSample {
    pub distance: f64,
    pub altitude: f64,
    pub pl_db: f64,
    pub num_wr: u8,
    pub d_los: f64,
    pub d_ref_g: f64,
    pub d_ref_b: f64,
    pub dphi_g: f64,
    pub dphi_b: f64,
    /// The field magnitude fell below [`FIELD_FLOOR`] and was floored.
    pub clipped: bool,
}

pub fn path_loss_bu<B: BuildingHeights + ?Sized>(
    g: &LinkGeometry,
    heights: &B,
    radio: &RadioConfig,
) -> Result<PathLossSample> {
    let b = analyze_link(g, heights);
    if !(b.d_los > 0.0) {
        return Err(Error::InvalidGeometry(
            "UAV and vehicle antenna coincide".into(),
        ));
    }
    let lambda = radio.wavelength();
    let dphi_g = phase_difference(b.d_los, b.d_ref_g, lambda)?;
    let dphi_b = phase_difference(b.d_los, b.d_ref_b, lambda)?;
    let (pl_db, clipped) = path_loss_db(b.d_los, dphi_g, dphi_b, b.num_wr, radio)?;
    Ok(PathLossSample {
        distance: g.distance,
        altitude: g.altitude,
        pl_db,
        num_wr: b.num_wr,
        d_los: b.d_los,
        d_ref_g: b.d_ref_g,
        d_ref_b: b.d_ref_b,
        dphi_g,
        dphi_b,
        clipped,
    })
}

/// Inclusive range `start, start + step, …, stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sweep step must be positive, got {step}"
            )));
        }
        if !(start.is_finite() && stop.is_finite()) || stop < start {
            return Err(Error::InvalidInput(format!(
                "sweep range [{start}, {stop}] is empty"
            )));
        }
        Ok(Self { start, stop, step })
    }

    pub fn len(&self) -> usize {
        // tolerance absorbs representation error in e.g. 100 / 0.1
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.value(i))
    }
}

/// Street-level constants shared by every point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StreetSetup {
    pub layout: GridLayout,
    pub vehicle_height: f64,
    pub vehicle_x: f64,
    pub grid_offset: f64,
}

impl StreetSetup {
    pub fn new(layout: GridLayout, vehicle_height: f64) -> Self {
        Self {
            layout,
            vehicle_height,
            vehicle_x: 0.0,
            grid_offset: 0.0,
        }
    }

    pub fn link(&self, distance: f64, altitude: f64) -> Result<LinkGeometry> {
        let g = LinkGeometry {
            distance,
            altitude,
            vehicle_height: self.vehicle_height,
            layout: self.layout,
            vehicle_x: self.vehicle_x,
            grid_offset: self.grid_offset,
        };
        g.validate()?;
        Ok(g)
    }
}

/// UAV moves along the street at fixed altitude; one sample per distance.
pub fn sweep_horizontal<B: BuildingHeights + Sync + ?Sized>(
    distances: &SweepRange,
    altitude: f64,
    street: &StreetSetup,
    heights: &B,
    radio: &RadioConfig,
) -> Result<Vec<PathLossSample>> {
    (0..distances.len())
        .into_par_iter()
        .map(|i| {
            let g = street.link(distances.value(i), altitude)?;
            path_loss_bu(&g, heights, radio)
        })
        .collect()
}

/// UAV climbs at fixed horizontal distance; one sample per altitude.
pub fn sweep_vertical<B: BuildingHeights + Sync + ?Sized>(
    altitudes: &SweepRange,
    distance: f64,
    street: &StreetSetup,
    heights: &B,
    radio: &RadioConfig,
) -> Result<Vec<PathLossSample>> {
    if altitudes.start <= street.vehicle_height {
        return Err(Error::InvalidInput(format!(
            "lowest altitude {} must exceed vehicle antenna height {}",
            altitudes.start, street.vehicle_height
        )));
    }
    (0..altitudes.len())
        .into_par_iter()
        .map(|i| {
            let g = street.link(distance, altitudes.value(i))?;
            path_loss_bu(&g, heights, radio)
        })
        .collect()
}
