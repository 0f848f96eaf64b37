//! Shared fixtures for the criterion benches.

use vqi_core::{FloorPlan, FloorWindow, Polygon, Vec2, WindowRect};

/// Rectangular room with one window on its south wall and `obstructions` columns.
pub fn office(width: f64, depth: f64, spacing: f64, obstructions: usize) -> FloorPlan {
    let rect = WindowRect::on_wall(Vec2::new(1.0, 0.0), Vec2::new(width - 1.0, 0.0), 0.8, 2.4, true)
        .expect("valid window");
    let mut plan = FloorPlan::new(
        Polygon::rect(0.0, 0.0, width, depth),
        vec![FloorWindow { id: "w1".into(), rect }],
        spacing,
    );
    for i in 0..obstructions {
        let x = width * (i as f64 + 1.0) / (obstructions as f64 + 1.0);
        let y = depth * 0.5;
        plan = plan.with_obstruction(Polygon::rect(x - 0.2, y - 0.2, x + 0.2, y + 0.2));
    }
    plan
}
