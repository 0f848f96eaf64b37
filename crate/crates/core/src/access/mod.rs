//! View access: view angles, angle thresholds, the access sub-score, the
//! View Factor rating, and plan-based spatial assessment.

mod angles;
mod plan;

pub use angles::{
    thresholds_for_content, v_access, view_angles, view_angles_from_eye, view_factor,
    AccessThresholds, AngleBasis, ContentClass, Observer, ViewAngles, WindowRect,
    DEFAULT_EYE_HEIGHT_M,
};
pub use plan::{
    bearing_difference, grid_centres, has_line_of_sight, max_bearing_separation,
    multi_direction_access, spatial_assessment, FloorPlan, FloorWindow, GridCell,
    SpatialAssessment, VISIBILITY_EPS_RAD,
};
