//! Numerical cross-check of the closed-form link geometry.
//!
//! The street is rebuilt as explicit 3D rectangles (one per building facade plus
//! the ground plane) and first-order specular points are located directly on
//! them, either by mirroring the transmitter across the panel plane or by
//! minimising the reflected path length over the plane (Fermat's principle).
//! Nothing here reuses the analytical length formulas or the critical-altitude
//! rule: a wall reflection exists only if the specular point lies on a panel.

use std::ops::RangeInclusive;

use nalgebra::{Point3, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{analyze_link, LinkGeometry, Side};
use crate::scenario::{BuildingHeights, GridLayout};

/// Relative length tolerance for oracle/model agreement.
pub const LENGTH_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PanelKind {
    Ground,
    Facade { side: Side, block: i64 },
}

/// Axis-aligned rectangle lying in the plane `coord[axis] = lo[axis] = hi[axis]`.
/// Bounds are closed; unbounded extents use infinities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Panel {
    pub kind: PanelKind,
    pub axis: usize,
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Panel {
    pub fn ground() -> Self {
        Self {
            kind: PanelKind::Ground,
            axis: 2,
            lo: [f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0],
            hi: [f64::INFINITY, f64::INFINITY, 0.0],
        }
    }

    pub fn facade(side: Side, block: i64, x0: f64, x1: f64, y: f64, height: f64) -> Self {
        Self {
            kind: PanelKind::Facade { side, block },
            axis: 1,
            lo: [x0, y, 0.0],
            hi: [x1, y, height],
        }
    }

    pub fn plane(&self) -> f64 {
        self.lo[self.axis]
    }

    pub fn normal(&self) -> Vector3<f64> {
        let mut n = Vector3::zeros();
        n[self.axis] = 1.0;
        n
    }

    /// In-plane bounds check, closed on every edge.
    pub fn contains(&self, p: &Point3<f64>) -> bool {
        (0..3)
            .filter(|&i| i != self.axis)
            .all(|i| p[i] >= self.lo[i] && p[i] <= self.hi[i])
    }

    fn in_plane_axes(&self) -> [usize; 2] {
        match self.axis {
            0 => [1, 2],
            1 => [0, 2],
            _ => [0, 1],
        }
    }
}

/// Facades of the blocks lining one street, plus the ground.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scene3D {
    pub layout: GridLayout,
    pub grid_offset: f64,
    pub ground: Panel,
    pub facades: Vec<Panel>,
}

impl Scene3D {
    pub fn build<B: BuildingHeights + ?Sized>(
        layout: GridLayout,
        grid_offset: f64,
        heights: &B,
        blocks: RangeInclusive<i64>,
    ) -> Self {
        let period = layout.period();
        let half = layout.street / 2.0;
        let mut facades = Vec::new();
        for k in blocks {
            let x0 = grid_offset + k as f64 * period;
            let x1 = x0 + layout.width;
            for side in Side::BOTH {
                facades.push(Panel::facade(
                    side,
                    k,
                    x0,
                    x1,
                    side.sign() * half,
                    heights.height(side, k),
                ));
            }
        }
        Self {
            layout,
            grid_offset,
            ground: Panel::ground(),
            facades,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PathKind {
    Los,
    GroundReflection,
    WallReflection { side: Side, block: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RayPath {
    pub kind: PathKind,
    pub length: f64,
    pub point: Option<[f64; 3]>,
}

/// Image-method specular point of `tx → panel → rx`, or `None` when it falls
/// outside the rectangle.
pub fn find_specular_point(
    tx: &Point3<f64>,
    rx: &Point3<f64>,
    panel: &Panel,
) -> Result<Option<Point3<f64>>> {
    let n = panel.axis;
    let c = panel.plane();
    let a = tx[n] - c;
    let b = rx[n] - c;
    if a == 0.0 || b == 0.0 {
        return Err(Error::DegenerateGeometry(
            "terminal lies in the reflecting plane".into(),
        ));
    }
    if a.signum() != b.signum() {
        return Err(Error::DegenerateGeometry(
            "terminals on opposite sides of the reflecting plane".into(),
        ));
    }
    let mut image = *tx;
    image[n] = 2.0 * c - tx[n];
    let t = (c - image[n]) / (rx[n] - image[n]);
    let mut p = image + (rx - image) * t;
    p[n] = c;
    Ok(panel.contains(&p).then_some(p))
}

/// Minimises `|tx − P| + |P − rx|` over the (unbounded) plane of `panel`.
///
/// The objective is convex, so each in-plane partial derivative is monotone
/// along its axis; nested bisection on their signs converges to machine
/// precision without touching the image construction.
pub fn fermat_search(tx: &Point3<f64>, rx: &Point3<f64>, panel: &Panel) -> Point3<f64> {
    let [u_axis, v_axis] = panel.in_plane_axes();
    let c = panel.plane();
    let point = |u: f64, v: f64| {
        let mut p = Point3::origin();
        p[panel.axis] = c;
        p[u_axis] = u;
        p[v_axis] = v;
        p
    };
    let grad = |p: &Point3<f64>, axis: usize| {
        let a = p - tx;
        let b = p - rx;
        a[axis] / a.norm() + b[axis] / b.norm()
    };
    let bracket = |axis: usize| {
        let lo = tx[axis].min(rx[axis]);
        let hi = tx[axis].max(rx[axis]);
        (lo - 1.0, hi + 1.0)
    };
    let bisect = |lo: f64, hi: f64, deriv: &dyn Fn(f64) -> f64| {
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if deriv(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let (v_lo, v_hi) = bracket(v_axis);
    let best_v = |u: f64| bisect(v_lo, v_hi, &|v| grad(&point(u, v), v_axis));
    let (u_lo, u_hi) = bracket(u_axis);
    let u = bisect(u_lo, u_hi, &|u| grad(&point(u, best_v(u)), u_axis));
    point(u, best_v(u))
}

/// Angle in radians between the mirrored incoming direction and the outgoing
/// direction at `p`; zero for an exact specular reflection.
pub fn specular_error(tx: &Point3<f64>, rx: &Point3<f64>, p: &Point3<f64>, panel: &Panel) -> f64 {
    let mut incoming = (p - tx).normalize();
    incoming[panel.axis] = -incoming[panel.axis];
    let outgoing = (rx - p).normalize();
    let cross = incoming.cross(&outgoing).norm();
    cross.atan2(incoming.dot(&outgoing))
}

/// Angles of incidence and departure measured from the panel normal.
pub fn reflection_angles(
    tx: &Point3<f64>,
    rx: &Point3<f64>,
    p: &Point3<f64>,
    panel: &Panel,
) -> (f64, f64) {
    let n = panel.normal();
    let angle = |v: Vector3<f64>| {
        let cos = v.dot(&n).abs() / v.norm();
        cos.clamp(-1.0, 1.0).acos()
    };
    (angle(tx - p), angle(rx - p))
}

fn polyline_length(tx: &Point3<f64>, p: &Point3<f64>, rx: &Point3<f64>) -> f64 {
    (p - tx).norm() + (rx - p).norm()
}

/// LOS, ground bounce and every first-order facade reflection whose specular
/// point lies on a panel. Panels whose plane contains a terminal are skipped.
pub fn trace_link(scene: &Scene3D, tx: &Point3<f64>, rx: &Point3<f64>) -> Vec<RayPath> {
    let mut paths = vec![RayPath {
        kind: PathKind::Los,
        length: (rx - tx).norm(),
        point: None,
    }];
    if let Ok(Some(p)) = find_specular_point(tx, rx, &scene.ground) {
        paths.push(RayPath {
            kind: PathKind::GroundReflection,
            length: polyline_length(tx, &p, rx),
            point: Some([p.x, p.y, p.z]),
        });
    }
    for panel in &scene.facades {
        let PanelKind::Facade { side, block } = panel.kind else {
            continue;
        };
        if let Ok(Some(p)) = find_specular_point(tx, rx, panel) {
            paths.push(RayPath {
                kind: PathKind::WallReflection { side, block },
                length: polyline_length(tx, &p, rx),
                point: Some([p.x, p.y, p.z]),
            });
        }
    }
    paths
}

/// Whether the straight segment `tx → rx` crosses any facade panel.
pub fn los_blocked(scene: &Scene3D, tx: &Point3<f64>, rx: &Point3<f64>) -> bool {
    scene.facades.iter().any(|panel| {
        let n = panel.axis;
        let a = tx[n] - panel.plane();
        let b = rx[n] - panel.plane();
        if a * b > 0.0 || a == b {
            return false;
        }
        let t = a / (a - b);
        panel.contains(&(tx + (rx - tx) * t))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub geometry: LinkGeometry,
    /// Set when the link cannot be checked, with the reason.
    pub skipped: Option<String>,
    pub lengths_match: bool,
    pub counts_match: bool,
    pub max_relative_error: f64,
    pub max_specular_error: f64,
    pub los_blocked: bool,
    pub oracle_wr: usize,
    pub model_wr: u8,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.skipped.is_some() || (self.lengths_match && self.counts_match && !self.los_blocked)
    }
}

/// Traces the link on explicit panels and compares with [`analyze_link`].
pub fn verify_against_analytical<B: BuildingHeights + ?Sized>(
    g: &LinkGeometry,
    heights: &B,
) -> VerificationReport {
    let model = analyze_link(g, heights);
    let mut report = VerificationReport {
        geometry: *g,
        skipped: None,
        lengths_match: true,
        counts_match: true,
        max_relative_error: 0.0,
        max_specular_error: 0.0,
        los_blocked: false,
        oracle_wr: 0,
        model_wr: model.num_wr,
    };
    if g.layout.street == 0.0 {
        report.skipped = Some("zero street width: facades coincide with the centerline".into());
        return report;
    }

    let period = g.layout.period();
    let x_min = g.vehicle_x.min(g.uav_x()) - period;
    let x_max = g.vehicle_x.max(g.uav_x()) + period;
    let k0 = ((x_min - g.grid_offset) / period).floor() as i64;
    let k1 = ((x_max - g.grid_offset) / period).floor() as i64;
    let scene = Scene3D::build(g.layout, g.grid_offset, heights, k0..=k1);

    let tx = Point3::new(g.uav_x(), 0.0, g.altitude);
    let rx = Point3::new(g.vehicle_x, 0.0, g.vehicle_height);
    let paths = trace_link(&scene, &tx, &rx);
    report.los_blocked = los_blocked(&scene, &tx, &rx);

    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
    let mut wr_sides = Vec::new();
    let mut saw_ground = false;
    for path in &paths {
        let expected = match path.kind {
            PathKind::Los => model.d_los,
            PathKind::GroundReflection => {
                saw_ground = true;
                model.d_ref_g
            }
            PathKind::WallReflection { side, .. } => {
                wr_sides.push(side);
                model.d_ref_b
            }
        };
        report.max_relative_error = report.max_relative_error.max(rel(path.length, expected));
        if let Some([x, y, z]) = path.point {
            let p = Point3::new(x, y, z);
            let panel = match path.kind {
                PathKind::GroundReflection => scene.ground,
                PathKind::WallReflection { side, block } => *scene
                    .facades
                    .iter()
                    .find(|f| f.kind == PanelKind::Facade { side, block })
                    .expect("traced panel belongs to the scene"),
                PathKind::Los => unreachable!(),
            };
            report.max_specular_error = report
                .max_specular_error
                .max(specular_error(&tx, &rx, &p, &panel));
        }
    }
    report.lengths_match = saw_ground && report.max_relative_error < LENGTH_TOLERANCE;
    report.oracle_wr = wr_sides.len();
    let model_sides: Vec<Side> = model
        .sides
        .iter()
        .filter(|s| s.wall_reflection)
        .map(|s| s.side)
        .collect();
    wr_sides.sort();
    report.counts_match = wr_sides == model_sides;
    report
}
