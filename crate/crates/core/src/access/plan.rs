//! Plan-level visibility: line of sight to windows, spatial assessment grid,
//! and the two-direction sight-line check.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::angles::{view_angles_from_eye, AccessThresholds, AngleBasis, WindowRect, DEFAULT_EYE_HEIGHT_M};
use crate::error::{Error, Result};
use crate::geometry::{merge_intervals, Polygon, Segment, Vec2};

/// Sight-line directions narrower than this (radians) do not count as visible.
pub const VISIBILITY_EPS_RAD: f64 = 1e-9;

const CLIP_EPS: f64 = 1e-9;
const ON_BOUNDARY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorWindow {
    pub id: String,
    pub rect: WindowRect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorPlan {
    pub boundary: Polygon,
    #[serde(default)]
    pub obstructions: Vec<Polygon>,
    pub windows: Vec<FloorWindow>,
    pub grid_spacing_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occupied_region: Option<Polygon>,
    #[serde(default = "default_eye")]
    pub eye_height_m: f64,
}

fn default_eye() -> f64 {
    DEFAULT_EYE_HEIGHT_M
}

fn inside_or_on(poly: &Polygon, p: Vec2) -> bool {
    poly.contains(p) || poly.boundary_distance(p) <= ON_BOUNDARY_TOL
}

impl FloorPlan {
    pub fn new(boundary: Polygon, windows: Vec<FloorWindow>, grid_spacing_m: f64) -> Self {
        Self {
            boundary,
            obstructions: Vec::new(),
            windows,
            grid_spacing_m,
            occupied_region: None,
            eye_height_m: DEFAULT_EYE_HEIGHT_M,
        }
    }

    pub fn with_obstruction(mut self, poly: Polygon) -> Self {
        self.obstructions.push(poly);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.boundary.is_simple() {
            return Err(Error::DegenerateGeometry("floor boundary is not a simple polygon".into()));
        }
        if !(self.grid_spacing_m > 0.0) || !self.grid_spacing_m.is_finite() {
            return Err(Error::domain("grid_spacing_m", self.grid_spacing_m));
        }
        if !(self.eye_height_m > 0.0) {
            return Err(Error::domain("eye_height_m", self.eye_height_m));
        }
        for (i, obs) in self.obstructions.iter().enumerate() {
            if !obs.is_simple() {
                return Err(Error::DegenerateGeometry(format!("obstruction {i} is not a simple polygon")));
            }
            if !obs.vertices.iter().all(|&v| inside_or_on(&self.boundary, v)) {
                return Err(Error::DegenerateGeometry(format!("obstruction {i} extends outside the boundary")));
            }
        }
        if let Some(region) = &self.occupied_region {
            if !region.is_simple() {
                return Err(Error::DegenerateGeometry("occupied region is not a simple polygon".into()));
            }
        }
        for w in &self.windows {
            w.rect.validate()?;
            if !w.rect.is_on_vertical_wall() {
                return Err(Error::DegenerateGeometry(format!("window {} is not on a vertical wall", w.id)));
            }
            let seg = w.rect.plan_segment();
            if self.boundary.boundary_distance(seg.a) > ON_BOUNDARY_TOL
                || self.boundary.boundary_distance(seg.b) > ON_BOUNDARY_TOL
            {
                return Err(Error::DegenerateGeometry(format!("window {} does not lie on the boundary", w.id)));
            }
            let probe = seg.midpoint() - w.rect.plan_normal() * 1e-3;
            if !self.boundary.contains(probe) {
                return Err(Error::DegenerateGeometry(format!("window {} normal points into the room", w.id)));
            }
        }
        Ok(())
    }

    /// Edges that can block a sight line: obstruction outlines and the room boundary.
    pub fn blockers(&self) -> Vec<Segment> {
        self.obstructions
            .iter()
            .chain(std::iter::once(&self.boundary))
            .flat_map(|p| p.edges())
            .collect()
    }

    pub fn inside_obstruction(&self, p: Vec2) -> bool {
        self.obstructions.iter().any(|o| o.contains(p))
    }

    pub fn window(&self, id: &str) -> Option<&FloorWindow> {
        self.windows.iter().find(|w| w.id == id)
    }

    /// Unobstructed sight-line arcs from `p` to a window, as global bearings.
    pub fn visible_arcs(&self, p: Vec2, window: &WindowRect) -> Vec<(f64, f64)> {
        if self.inside_obstruction(p) {
            return Vec::new();
        }
        visible_arcs(p, window, &self.blockers())
    }

    /// Angular width of the unobstructed part of a window in plan, degrees.
    pub fn visible_horizontal_deg(&self, p: Vec2, window: &WindowRect) -> f64 {
        arcs_measure(&self.visible_arcs(p, window)).to_degrees()
    }

    pub fn has_line_of_sight(&self, p: Vec2, window: &WindowRect) -> bool {
        arcs_measure(&self.visible_arcs(p, window)) > VISIBILITY_EPS_RAD
    }
}

/// Bearings (radians) of the directions from `p` that reach the window
/// without crossing a blocker. Arcs are sorted and disjoint, expressed as
/// `axis + offset` where `axis` is the bearing of the window normal so they
/// never wrap.
fn visible_arcs(p: Vec2, window: &WindowRect, blockers: &[Segment]) -> Vec<(f64, f64)> {
    let seg = window.plan_segment();
    let fwd = window.plan_normal();
    let lat = fwd.perp();
    let depth = (seg.a - p).dot(fwd);
    if depth <= CLIP_EPS {
        return Vec::new();
    }
    let axis = fwd.bearing();
    let angle = |x: Vec2| {
        let r = x - p;
        r.dot(lat).atan2(r.dot(fwd))
    };
    let (ta, tb) = (angle(seg.a), angle(seg.b));
    let (lo, hi) = (ta.min(tb), ta.max(tb));

    // blockers only matter strictly between the eye line and the glazing line
    let (near, far) = (CLIP_EPS, depth - CLIP_EPS);
    let mut blocked: Vec<(f64, f64)> = Vec::new();
    for s in blockers {
        let fa = (s.a - p).dot(fwd);
        let fb = (s.b - p).dot(fwd);
        let (t0, t1) = if fa == fb {
            if fa < near || fa > far {
                continue;
            }
            (0.0, 1.0)
        } else {
            let ta = (near - fa) / (fb - fa);
            let tb = (far - fa) / (fb - fa);
            (ta.min(tb).max(0.0), ta.max(tb).min(1.0))
        };
        if t0 >= t1 {
            continue;
        }
        let a0 = angle(s.a.lerp(s.b, t0));
        let a1 = angle(s.a.lerp(s.b, t1));
        let (b0, b1) = (a0.min(a1).max(lo), a0.max(a1).min(hi));
        if b1 > b0 {
            blocked.push((b0, b1));
        }
    }

    let mut visible = Vec::new();
    let mut cursor = lo;
    for (b0, b1) in merge_intervals(&mut blocked) {
        if b0 > cursor {
            visible.push((axis + cursor, axis + b0));
        }
        cursor = cursor.max(b1);
    }
    if hi > cursor {
        visible.push((axis + cursor, axis + hi));
    }
    visible
}

fn arcs_measure(arcs: &[(f64, f64)]) -> f64 {
    arcs.iter().map(|(a, b)| b - a).sum()
}

/// Smallest angle between two bearings, in `[0, PI]`.
pub fn bearing_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn on_arc(x: f64, (lo, hi): (f64, f64)) -> bool {
    (x - lo).rem_euclid(TAU) <= hi - lo
}

/// Largest bearing difference between a direction in `a` and one in `b`.
fn arc_separation(a: (f64, f64), b: (f64, f64)) -> f64 {
    let anti = (a.0 + PI, a.1 + PI);
    if on_arc(b.0, anti) || on_arc(b.1, anti) || on_arc(anti.0, b) || on_arc(anti.1, b) {
        return PI;
    }
    [a.0, a.1]
        .into_iter()
        .flat_map(|x| [b.0, b.1].into_iter().map(move |y| bearing_difference(x, y)))
        .fold(0.0, f64::max)
}

/// Largest angle between unobstructed sight lines to two different windows,
/// radians. `None` when fewer than two windows are visible.
pub fn max_bearing_separation(point: Vec2, plan: &FloorPlan) -> Option<f64> {
    let arcs: Vec<Vec<(f64, f64)>> = plan
        .windows
        .iter()
        .map(|w| plan.visible_arcs(point, &w.rect))
        .filter(|arcs| arcs_measure(arcs) > VISIBILITY_EPS_RAD)
        .collect();
    separation_of(&arcs)
}

fn separation_of(arcs: &[Vec<(f64, f64)>]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for i in 0..arcs.len() {
        for j in (i + 1)..arcs.len() {
            for &x in &arcs[i] {
                for &y in &arcs[j] {
                    let s = arc_separation(x, y);
                    best = Some(best.map_or(s, |b| b.max(s)));
                }
            }
        }
    }
    best
}

/// Sight lines to two windows at least 90° apart.
pub fn multi_direction_access(point: Vec2, plan: &FloorPlan) -> bool {
    max_bearing_separation(point, plan).is_some_and(|s| s >= FRAC_PI_2 - 1e-12)
}

pub fn has_line_of_sight(point: Vec2, window: &WindowRect, obstructions: &[Polygon]) -> bool {
    if obstructions.iter().any(|o| o.contains(point)) {
        return false;
    }
    let blockers: Vec<Segment> = obstructions.iter().flat_map(|p| p.edges()).collect();
    arcs_measure(&visible_arcs(point, window, &blockers)) > VISIBILITY_EPS_RAD
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridCell {
    pub x: f64,
    pub y: f64,
    pub sees_window: bool,
    pub best_angle_deg: f64,
    pub qualified: bool,
    pub multi_direction: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpatialAssessment {
    /// Qualifying cells over evaluated cells.
    pub fraction: f64,
    /// Cells with two sight lines at least 90° apart over evaluated cells.
    pub multi_direction_fraction: f64,
    pub grid_spacing_m: f64,
    pub qualifier: Option<AccessThresholds>,
    /// Sorted by `(y, x)`.
    pub cells: Vec<GridCell>,
}

impl SpatialAssessment {
    pub fn qualified_count(&self) -> usize {
        self.cells.iter().filter(|c| c.qualified).count()
    }
}

/// Cell centres of the evaluation grid, row-major from the lowest `y`.
pub fn grid_centres(plan: &FloorPlan) -> Vec<Vec2> {
    let h = plan.grid_spacing_m;
    let (lo, hi) = plan.boundary.bounds();
    let nx = ((hi.x - lo.x) / h).ceil() as usize;
    let ny = ((hi.y - lo.y) / h).ceil() as usize;
    let mut out = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let c = Vec2::new(lo.x + (i as f64 + 0.5) * h, lo.y + (j as f64 + 0.5) * h);
            let occupied = plan.occupied_region.as_ref().is_none_or(|r| r.contains(c));
            if plan.boundary.contains(c) && occupied {
                out.push(c);
            }
        }
    }
    out
}

fn basis_angle(basis: AngleBasis, visible_h: f64, vertical: f64) -> f64 {
    match basis {
        AngleBasis::Horizontal => visible_h,
        AngleBasis::Vertical => vertical,
        AngleBasis::Smaller => visible_h.min(vertical),
    }
}

fn evaluate_cell(
    plan: &FloorPlan,
    blockers: &[Segment],
    qualifier: Option<&AccessThresholds>,
    c: Vec2,
) -> GridCell {
    let basis = qualifier.map_or(AngleBasis::Horizontal, |q| q.basis);
    let blocked_cell = plan.inside_obstruction(c);
    let mut sees = false;
    let mut best = 0.0_f64;
    let mut visible = Vec::new();
    if !blocked_cell {
        for w in &plan.windows {
            let arcs = visible_arcs(c, &w.rect, blockers);
            let h = arcs_measure(&arcs);
            if h <= VISIBILITY_EPS_RAD {
                continue;
            }
            sees = true;
            let vertical = view_angles_from_eye(c.extend(plan.eye_height_m), &w.rect)
                .map(|a| a.vertical_deg)
                .unwrap_or(0.0);
            best = best.max(basis_angle(basis, h.to_degrees(), vertical));
            visible.push(arcs);
        }
    }
    let qualified = sees && qualifier.is_none_or(|q| best >= q.alpha_min_deg);
    let multi_direction = separation_of(&visible).is_some_and(|s| s >= FRAC_PI_2 - 1e-12);
    GridCell {
        x: c.x,
        y: c.y,
        sees_window: sees,
        best_angle_deg: best,
        qualified,
        multi_direction,
    }
}

/// Share of grid cells with a (qualifying) sight line to at least one window.
///
/// Cells are evaluated in parallel; results are collected in grid order, so
/// the output does not depend on the thread count.
pub fn spatial_assessment(plan: &FloorPlan, qualifier: Option<&AccessThresholds>) -> Result<SpatialAssessment> {
    plan.validate()?;
    if let Some(q) = qualifier {
        q.validate()?;
    }
    let centres = grid_centres(plan);
    if centres.is_empty() {
        return Err(Error::EmptyOccupiedRegion);
    }
    let blockers = plan.blockers();
    let cells: Vec<GridCell> = centres
        .par_iter()
        .map(|&c| evaluate_cell(plan, &blockers, qualifier, c))
        .collect();
    let n = cells.len() as f64;
    let qualified = cells.iter().filter(|c| c.qualified).count() as f64;
    let multi = cells.iter().filter(|c| c.multi_direction).count() as f64;
    Ok(SpatialAssessment {
        fraction: qualified / n,
        multi_direction_fraction: multi / n,
        grid_spacing_m: plan.grid_spacing_m,
        qualifier: qualifier.copied(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn room(w: f64, d: f64) -> FloorPlan {
        // window fills the south wall (y = 0)
        let win = WindowRect::on_wall(Vec2::new(0.0, 0.0), Vec2::new(w, 0.0), 0.9, 2.4, true).unwrap();
        FloorPlan::new(
            Polygon::rect(0.0, 0.0, w, d),
            vec![FloorWindow { id: "s".into(), rect: win }],
            0.5,
        )
    }

    #[test]
    fn empty_room_sees_everything() {
        let r = spatial_assessment(&room(6.0, 4.0), None).unwrap();
        assert_eq!(r.fraction, 1.0);
        assert_eq!(r.cells.len(), 96);
        assert_eq!(r.multi_direction_fraction, 0.0);
    }

    #[test]
    fn full_partition_blocks() {
        let plan = room(6.0, 4.0).with_obstruction(Polygon::rect(0.0, 2.0, 6.0, 2.1));
        let w = plan.windows[0].rect;
        assert!(plan.has_line_of_sight(Vec2::new(3.0, 1.0), &w));
        assert!(!plan.has_line_of_sight(Vec2::new(3.0, 3.0), &w));
        assert!(!has_line_of_sight(Vec2::new(1.0, 3.5), &w, &plan.obstructions));
        assert!(has_line_of_sight(Vec2::new(1.0, 3.5), &w, &[]));
    }

    #[test]
    fn partial_partition_leaves_side_view() {
        let plan = room(6.0, 4.0).with_obstruction(Polygon::rect(0.0, 2.0, 4.0, 2.1));
        let w = plan.windows[0].rect;
        // (1, 3) is fully shadowed, (3.5, 3.5) sees past the end of the partition
        assert!(!plan.has_line_of_sight(Vec2::new(1.0, 3.0), &w));
        let p = Vec2::new(3.5, 3.5);
        assert!(plan.has_line_of_sight(p, &w));
        let vis = plan.visible_horizontal_deg(p, &w);
        assert!(vis > 0.0 && vis < view_angles_from_eye(p.extend(1.2), &w).unwrap().horizontal_deg);
    }

    #[test]
    fn point_inside_obstruction_sees_nothing() {
        let plan = room(6.0, 4.0).with_obstruction(Polygon::rect(2.0, 2.0, 3.0, 3.0));
        assert!(!plan.has_line_of_sight(Vec2::new(2.5, 2.5), &plan.windows[0].rect));
    }

    #[test]
    fn unobstructed_plan_angle_matches_3d_horizontal() {
        let plan = room(3.0, 5.0);
        let w = plan.windows[0].rect;
        for p in [Vec2::new(0.3, 0.7), Vec2::new(2.0, 4.5), Vec2::new(1.5, 2.0)] {
            let h3 = view_angles_from_eye(p.extend(1.2), &w).unwrap().horizontal_deg;
            assert!((plan.visible_horizontal_deg(p, &w) - h3).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_occupied_region_errors() {
        let mut plan = room(4.0, 4.0);
        plan.occupied_region = Some(Polygon::rect(10.0, 10.0, 11.0, 11.0));
        assert!(matches!(spatial_assessment(&plan, None), Err(Error::EmptyOccupiedRegion)));
    }

    #[test]
    fn corner_room_two_directions() {
        let south = WindowRect::on_wall(Vec2::new(1.0, 0.0), Vec2::new(5.0, 0.0), 0.9, 2.4, true).unwrap();
        let west = WindowRect::on_wall(Vec2::new(0.0, 5.0), Vec2::new(0.0, 1.0), 0.9, 2.4, true).unwrap();
        let plan = FloorPlan::new(
            Polygon::rect(0.0, 0.0, 6.0, 6.0),
            vec![
                FloorWindow { id: "s".into(), rect: south },
                FloorWindow { id: "w".into(), rect: west },
            ],
            0.5,
        );
        plan.validate().unwrap();
        assert!(multi_direction_access(Vec2::new(0.5, 0.5), &plan));
        assert!(!multi_direction_access(Vec2::new(0.5, 0.5), &room(6.0, 6.0)));
    }

    #[test]
    fn misoriented_window_rejected() {
        let win = WindowRect::on_wall(Vec2::new(0.0, 0.0), Vec2::new(4.0, 0.0), 0.9, 2.4, false).unwrap();
        let plan = FloorPlan::new(Polygon::rect(0.0, 0.0, 4.0, 4.0), vec![FloorWindow { id: "x".into(), rect: win }], 0.5);
        assert!(plan.validate().is_err());
    }

    #[test]
    fn bearing_math() {
        assert!((bearing_difference(0.1, TAU - 0.1) - 0.2).abs() < 1e-12);
        assert!((arc_separation((0.0, 0.2), (3.0, 3.3)) - PI).abs() < 1e-12);
        assert!((arc_separation((0.0, 0.2), (1.0, 1.2)) - 1.2).abs() < 1e-12);
    }
}
