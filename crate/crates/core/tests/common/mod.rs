//! Brute-force reference implementations used to check the library.
//! Nothing here calls library geometry beyond plain vector types.

#![allow(dead_code)]

use std::f64::consts::PI;

use rand::Rng;
use vqi_core::access::{FloorPlan, FloorWindow};
use vqi_core::{Polygon, Vec2, Vec3, WindowRect};

/// Angular extents (degrees) of the window seen from `eye`, by sampling
/// `n` uniform points on the rectangle.
///
/// Horizontal: samples projected along the window's vertical axis onto the
/// horizontal plane through the eye. Vertical: samples projected along the
/// window's horizontal axis onto the vertical plane through the eye and the
/// window centre.
pub fn monte_carlo_angles(eye: Vec3, w: &WindowRect, n: usize, rng: &mut impl Rng) -> (f64, f64) {
    let outward = w.normal;
    let centre = w.origin + w.u * (0.5 * w.width) + w.v * (0.5 * (w.sill_height + w.head_height));
    let to_c = centre - eye;
    let hdir = (to_c - w.v * to_c.dot(w.v)).normalized();
    let m = w.v.cross(hdir);
    let (mut hmin, mut hmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..n {
        let s = rng.gen_range(0.0..=w.width);
        let t = rng.gen_range(w.sill_height..=w.head_height);
        let p = w.origin + w.u * s + w.v * t;
        let r = p - eye;
        let q = r - w.v * r.dot(w.v);
        let h = q.dot(w.u).atan2(q.dot(outward));
        hmin = hmin.min(h);
        hmax = hmax.max(h);
        let lambda = r.dot(m) / w.u.dot(m);
        let q = r - w.u * lambda;
        let v = q.dot(w.v).atan2(q.dot(hdir));
        vmin = vmin.min(v);
        vmax = vmax.max(v);
    }
    ((hmax - hmin).to_degrees(), (vmax - vmin).to_degrees())
}

/// Rotation matrix from a random unit quaternion.
pub fn random_rotation(rng: &mut impl Rng) -> [[f64; 3]; 3] {
    let (a, b, c, d) = loop {
        let q: (f64, f64, f64, f64) = (
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n2 = q.0 * q.0 + q.1 * q.1 + q.2 * q.2 + q.3 * q.3;
        if n2 > 0.1 && n2 <= 1.0 {
            let n = n2.sqrt();
            break (q.0 / n, q.1 / n, q.2 / n, q.3 / n);
        }
    };
    [
        [a * a + b * b - c * c - d * d, 2.0 * (b * c - a * d), 2.0 * (b * d + a * c)],
        [2.0 * (b * c + a * d), a * a - b * b + c * c - d * d, 2.0 * (c * d - a * b)],
        [2.0 * (b * d - a * c), 2.0 * (c * d + a * b), a * a - b * b - c * c + d * d],
    ]
}

pub fn rotate(r: &[[f64; 3]; 3], v: Vec3) -> Vec3 {
    Vec3::new(
        r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z,
        r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
        r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z,
    )
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Strict crossing of two segments; touching at an endpoint does not count.
pub fn properly_cross(p: Vec2, q: Vec2, a: Vec2, b: Vec2) -> bool {
    let d1 = orient(a, b, p);
    let d2 = orient(a, b, q);
    let d3 = orient(p, q, a);
    let d4 = orient(p, q, b);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Winding-number point-in-polygon test.
pub fn winding_inside(poly: &[Vec2], p: Vec2) -> bool {
    let mut wn = 0i32;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        if a.y <= p.y {
            if b.y > p.y && orient(a, b, p) > 0.0 {
                wn += 1;
            }
        } else if b.y <= p.y && orient(a, b, p) < 0.0 {
            wn -= 1;
        }
    }
    wn != 0
}

pub fn edges(poly: &[Vec2]) -> Vec<(Vec2, Vec2)> {
    (0..poly.len()).map(|i| (poly[i], poly[(i + 1) % poly.len()])).collect()
}

/// Room as plain vertex lists, independent of the library's plan type.
pub struct RawRoom {
    pub boundary: Vec<Vec2>,
    pub obstructions: Vec<Vec<Vec2>>,
    /// Plan endpoints of each window.
    pub windows: Vec<(Vec2, Vec2)>,
    pub occupied: Option<Vec<Vec2>>,
}

impl RawRoom {
    pub fn blockers(&self) -> Vec<(Vec2, Vec2)> {
        let mut out = edges(&self.boundary);
        for o in &self.obstructions {
            out.extend(edges(o));
        }
        out
    }

    /// Bearings of unobstructed rays from `p` to `samples` evenly spaced
    /// points on window `k`.
    pub fn visible_bearings(&self, p: Vec2, k: usize, samples: usize, blockers: &[(Vec2, Vec2)]) -> Vec<f64> {
        if self.obstructions.iter().any(|o| winding_inside(o, p)) {
            return Vec::new();
        }
        let (a, b) = self.windows[k];
        (0..samples)
            .map(|i| a + (b - a) * ((i as f64 + 0.5) / samples as f64))
            .filter(|&t| !blockers.iter().any(|&(e0, e1)| properly_cross(p, t, e0, e1)))
            .map(|t| (t.y - p.y).atan2(t.x - p.x))
            .collect()
    }

    /// Largest bearing difference, degrees, between visible rays to two
    /// different windows, by enumerating every pair of samples.
    pub fn pairwise_separation(&self, p: Vec2, samples: usize, blockers: &[(Vec2, Vec2)]) -> Option<f64> {
        let per: Vec<Vec<f64>> = (0..self.windows.len())
            .map(|k| self.visible_bearings(p, k, samples, blockers))
            .filter(|b| !b.is_empty())
            .collect();
        let mut best: Option<f64> = None;
        for i in 0..per.len() {
            for j in (i + 1)..per.len() {
                for &x in &per[i] {
                    for &y in &per[j] {
                        let d = (x - y).rem_euclid(2.0 * PI);
                        let d = d.min(2.0 * PI - d).to_degrees();
                        best = Some(best.map_or(d, |b: f64| b.max(d)));
                    }
                }
            }
        }
        best
    }

    /// Coarsest angular gap, degrees, between neighbouring samples seen from `p`.
    pub fn sample_step_deg(&self, p: Vec2, samples: usize) -> f64 {
        self.windows
            .iter()
            .map(|&(a, b)| {
                let ang = |t: Vec2| (t.y - p.y).atan2(t.x - p.x);
                let pts: Vec<f64> = (0..=samples).map(|i| ang(a + (b - a) * (i as f64 / samples as f64))).collect();
                pts.windows(2)
                    .map(|w| {
                        let d = (w[1] - w[0]).rem_euclid(2.0 * PI);
                        d.min(2.0 * PI - d)
                    })
                    .fold(0.0, f64::max)
                    .to_degrees()
            })
            .fold(0.0, f64::max)
    }

    /// Cell centres the oracle expects, using its own inside test.
    pub fn centres(&self, h: f64) -> Vec<Vec2> {
        let xs = self.boundary.iter().map(|v| v.x);
        let ys = self.boundary.iter().map(|v| v.y);
        let (x0, x1) = (xs.clone().fold(f64::INFINITY, f64::min), xs.fold(f64::NEG_INFINITY, f64::max));
        let (y0, y1) = (ys.clone().fold(f64::INFINITY, f64::min), ys.fold(f64::NEG_INFINITY, f64::max));
        let nx = ((x1 - x0) / h).ceil() as usize;
        let ny = ((y1 - y0) / h).ceil() as usize;
        let mut out = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let c = Vec2::new(x0 + (i as f64 + 0.5) * h, y0 + (j as f64 + 0.5) * h);
                let occ = self.occupied.as_ref().is_none_or(|o| winding_inside(o, c));
                if winding_inside(&self.boundary, c) && occ {
                    out.push(c);
                }
            }
        }
        out
    }

    pub fn to_plan(&self, h: f64) -> FloorPlan {
        let boundary = Polygon::new(self.boundary.clone());
        let windows = self
            .windows
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| FloorWindow {
                id: format!("w{i}"),
                rect: outward_window(&self.boundary, a, b),
            })
            .collect();
        let mut plan = FloorPlan::new(boundary, windows, h);
        for o in &self.obstructions {
            plan = plan.with_obstruction(Polygon::new(o.clone()));
        }
        plan.occupied_region = self.occupied.clone().map(Polygon::new);
        plan
    }
}

/// Window on the wall from `a` to `b` whose normal points out of the room.
pub fn outward_window(boundary: &[Vec2], a: Vec2, b: Vec2) -> WindowRect {
    let right = WindowRect::on_wall(a, b, 0.8, 2.4, true).unwrap();
    let mid = a + (b - a) * 0.5;
    let n = Vec2::new(right.normal.x, right.normal.y);
    if winding_inside(boundary, mid - n * 1e-3) {
        right
    } else {
        WindowRect::on_wall(a, b, 0.8, 2.4, false).unwrap()
    }
}

pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Vec2> {
    vec![Vec2::new(x0, y0), Vec2::new(x1, y0), Vec2::new(x1, y1), Vec2::new(x0, y1)]
}

pub fn v(x: f64, y: f64) -> Vec2 {
    Vec2::new(x, y)
}

/// The ten synthetic rooms of the spatial-assessment check, with their grid spacing.
pub fn synthetic_rooms(rng: &mut impl Rng) -> Vec<(&'static str, RawRoom, f64)> {
    let mut rooms = vec![
        (
            "empty rectangle",
            RawRoom {
                boundary: rect(0.0, 0.0, 6.0, 4.0),
                obstructions: vec![],
                windows: vec![(v(0.0, 0.0), v(6.0, 0.0))],
                occupied: None,
            },
            0.5,
        ),
        (
            "single column",
            RawRoom {
                boundary: rect(0.0, 0.0, 8.0, 6.0),
                obstructions: vec![rect(3.1, 2.1, 3.6, 2.6)],
                windows: vec![(v(1.0, 0.0), v(5.0, 0.0))],
                occupied: None,
            },
            0.5,
        ),
        (
            "partial partition",
            RawRoom {
                boundary: rect(0.0, 0.0, 8.0, 6.0),
                obstructions: vec![rect(0.0, 3.0, 5.1, 3.1)],
                windows: vec![(v(0.0, 0.0), v(8.0, 0.0))],
                occupied: None,
            },
            0.5,
        ),
        ("bisected", bisected_room(), 0.5),
        (
            "L-shaped",
            RawRoom {
                boundary: vec![v(0.0, 0.0), v(8.0, 0.0), v(8.0, 3.0), v(3.0, 3.0), v(3.0, 8.0), v(0.0, 8.0)],
                obstructions: vec![],
                windows: vec![(v(8.0, 0.5), v(8.0, 2.5))],
                occupied: None,
            },
            0.5,
        ),
        (
            "adjacent walls",
            RawRoom {
                boundary: rect(0.0, 0.0, 8.0, 6.0),
                obstructions: vec![rect(5.1, 1.1, 5.4, 4.6)],
                windows: vec![(v(1.0, 0.0), v(4.0, 0.0)), (v(8.0, 2.0), v(8.0, 5.0))],
                occupied: None,
            },
            0.5,
        ),
        (
            "U-shaped",
            RawRoom {
                boundary: vec![
                    v(0.0, 0.0),
                    v(9.0, 0.0),
                    v(9.0, 7.0),
                    v(6.0, 7.0),
                    v(6.0, 2.6),
                    v(3.0, 2.6),
                    v(3.0, 7.0),
                    v(0.0, 7.0),
                ],
                obstructions: vec![],
                windows: vec![
                    (v(0.5, 0.0), v(8.5, 0.0)),
                    (v(0.5, 7.0), v(2.5, 7.0)),
                    (v(8.5, 7.0), v(6.5, 7.0)),
                ],
                occupied: None,
            },
            0.5,
        ),
        (
            "column grid",
            RawRoom {
                boundary: rect(0.0, 0.0, 12.0, 8.0),
                obstructions: [(2.9, 2.1), (5.9, 2.1), (8.9, 2.1), (2.9, 5.1), (5.9, 5.1), (8.9, 5.1)]
                    .iter()
                    .map(|&(x, y)| rect(x, y, x + 0.4, y + 0.4))
                    .collect(),
                windows: vec![(v(1.0, 0.0), v(11.0, 0.0)), (v(11.0, 8.0), v(1.0, 8.0))],
                occupied: None,
            },
            0.5,
        ),
        (
            "occupied region",
            RawRoom {
                boundary: rect(0.0, 0.0, 10.0, 6.0),
                obstructions: vec![rect(2.1, 2.1, 6.9, 2.4)],
                windows: vec![(v(2.0, 0.0), v(8.0, 0.0))],
                occupied: Some(rect(1.1, 1.1, 8.9, 4.9)),
            },
            0.4,
        ),
    ];
    // seeded clutter between two facing windows
    let obstructions = (0..5)
        .map(|_| {
            let x = rng.gen_range(1.0..8.0);
            let y = rng.gen_range(1.0..6.0);
            rect(x, y, x + rng.gen_range(0.2..1.5), y + rng.gen_range(0.2..1.5))
        })
        .collect();
    rooms.push((
        "random clutter",
        RawRoom {
            boundary: rect(0.0, 0.0, 10.0, 8.0),
            obstructions,
            windows: vec![(v(0.0, 6.0), v(0.0, 1.0)), (v(10.0, 2.0), v(10.0, 7.0))],
            occupied: None,
        },
        0.5,
    ));
    rooms
}

/// Room halved by a full-width partition with the only window in one half.
pub fn bisected_room() -> RawRoom {
    RawRoom {
        boundary: rect(0.0, 0.0, 8.0, 6.0),
        obstructions: vec![rect(0.0, 3.0, 8.0, 3.1)],
        windows: vec![(v(1.0, 0.0), v(7.0, 0.0))],
        occupied: None,
    }
}
