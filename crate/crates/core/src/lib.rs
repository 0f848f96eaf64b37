//! View Quality Index for windows: view content, view access and view clarity,
//! combined into a single score, plus rule checks from daylighting standards
//! and green building certifications.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod access;
pub mod clarity;
pub mod compliance;
pub mod content;
pub mod error;
pub mod geometry;
pub mod project;
pub mod report;
pub mod scale;
pub mod vqi;

pub use access::{
    spatial_assessment, thresholds_for_content, v_access, view_angles, view_factor, AccessThresholds, AngleBasis,
    ContentClass, FloorPlan, FloorWindow, Observer, SpatialAssessment, ViewAngles, WindowRect,
};
pub use clarity::{instantaneous_clarity, v_clarity, vci, ClarityThresholds, ShadeMaterial, ShadeSchedule};
pub use compliance::{ComplianceResult, Verdict};
pub use content::{v_content, ContentScore, Layer, Movement, SceneDescription};
pub use error::{Error, Result, ValidationIssue};
pub use geometry::{Polygon, Vec2, Vec3};
pub use vqi::{label, vqi, vqi_weighted, Label, VqiScore, Weights};
pub use project::{parse_project, parse_project_str, ProjectFile};
pub use report::{emit_grid_csv, evaluate, render_text, Report, Warning};
