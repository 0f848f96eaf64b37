//! End-to-end evaluation of a project and the text and CSV renderings of the result.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::access::{
    spatial_assessment, thresholds_for_content, v_access, view_angles, AccessThresholds, AngleBasis, ContentClass,
    FloorPlan, SpatialAssessment, ViewAngles,
};
use crate::clarity::{
    instantaneous_clarity, mullion_obstruction, temporal_clarity, v_clarity, vci, ClarityThresholds, MullionReport,
    TemporalClarity, DEFAULT_BOUNDARY_TOLERANCE,
};
use crate::compliance::{
    alternative_access_check, breeam_wwr_check, distance_rules, en_environmental_information, en_opening_size,
    en_sll_rows, leed_visual_elements, spatial_credit_row, view_factor_row, well_view_check, AlternativeStandard,
    Certification, ComplianceResult,
};
use crate::content::{v_content, ContentScore, Layer, Movement};
use crate::error::{Error, Result};
use crate::project::{ProjectFile, WindowSpec};
use crate::vqi::{vqi_weighted, VqiScore};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Conditions worth flagging next to a score. Each variant is raised by exactly
/// one check in [`evaluate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// No clarity thresholds were configured, so the provisional defaults were used.
    ProvisionalClarityThresholds { beta_min: f64, beta_saturation: f64 },
    /// The scene declares nearby and distant movement together, scored as 0.
    MovementBothAssumed,
    /// A horizontal glazing bar sits on a declared layer boundary.
    MullionBoundaryConflict {
        bar_index: usize,
        boundary: &'static str,
        bar_position: f64,
        boundary_position: f64,
    },
    /// Obstructions hide the whole window from the observer.
    NoLineOfSight,
    /// The scene declares no layers, so there is no content to rate access against.
    NoViewContent,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::ProvisionalClarityThresholds {
                beta_min,
                beta_saturation,
            } => write!(
                f,
                "provisional clarity thresholds in use (beta_min {}, beta_saturation {})",
                f6(*beta_min),
                f6(*beta_saturation)
            ),
            Warning::MovementBothAssumed => {
                f.write_str("movement `both` scored as nearby movement (weight 0)")
            }
            Warning::MullionBoundaryConflict {
                bar_index,
                boundary,
                bar_position,
                boundary_position,
            } => write!(
                f,
                "horizontal bar {bar_index} at {} coincides with the {boundary} boundary at {}",
                f6(*bar_position),
                f6(*boundary_position)
            ),
            Warning::NoLineOfSight => f.write_str("no line of sight to the window; access scored 0"),
            Warning::NoViewContent => f.write_str("scene has no view layers; access scored 0"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClaritySource {
    ClearGlazing,
    Shade {
        material: String,
        deployed_fraction: f64,
        vci: f64,
    },
    /// Mean over the occupied steps of a schedule.
    Schedule {
        schedule: String,
        occupied_steps: usize,
        fraction_above_min: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClarityResult {
    /// Instantaneous clarity, or its occupied-step mean for schedules.
    pub beta: f64,
    pub v_clarity: f64,
    pub thresholds: ClarityThresholds,
    pub source: ClaritySource,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccessResult {
    pub thresholds: Option<AccessThresholds>,
    /// Angle compared against the thresholds, after occlusion.
    pub angle_deg: f64,
    pub v_access: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport {
    pub observer: String,
    pub window: String,
    pub scene: String,
    pub distance_m: f64,
    pub line_of_sight: bool,
    /// Unoccluded angles; absent without a line of sight.
    pub angles: Option<ViewAngles>,
    pub visible_horizontal_deg: f64,
    pub content: ContentScore,
    pub content_class: Option<ContentClass>,
    pub access: AccessResult,
    pub clarity: ClarityResult,
    pub mullions: Option<MullionReport>,
    pub vqi: VqiScore,
    pub compliance: Vec<ComplianceResult>,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpatialSummary {
    pub assessment: SpatialAssessment,
    pub credits: Vec<ComplianceResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool_version: &'static str,
    /// SHA-256 of the canonical JSON form of the project.
    pub input_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub pairs: Vec<PairReport>,
    pub spatial: SpatialSummary,
    pub alternative_access: BTreeMap<String, Vec<ComplianceResult>>,
    pub schedules: BTreeMap<String, TemporalClarity>,
    pub provenance: Provenance,
}

impl Report {
    /// Every compliance row with the scope it applies to (`observer/window`,
    /// `spatial` or `atrium:<id>`).
    pub fn compliance_rows(&self) -> Vec<(String, &ComplianceResult)> {
        let mut rows = Vec::new();
        for p in &self.pairs {
            let scope = format!("{}/{}", p.observer, p.window);
            rows.extend(p.compliance.iter().map(|r| (scope.clone(), r)));
        }
        rows.extend(self.spatial.credits.iter().map(|r| ("spatial".to_string(), r)));
        for (id, rs) in &self.alternative_access {
            rows.extend(rs.iter().map(|r| (format!("atrium:{id}"), r)));
        }
        rows
    }
}

/// Fixed six-decimal rendering, with negative zero folded into zero.
pub fn f6(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.6}")
}

fn f3(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.3}")
}

pub fn input_hash(project: &ProjectFile) -> String {
    hex::encode(Sha256::digest(project.canonical_json()))
}

fn access_thresholds(project: &ProjectFile, class: Option<ContentClass>) -> Result<Option<AccessThresholds>> {
    if let Some(t) = project.thresholds.access {
        return Ok(Some(t));
    }
    let Some(class) = class else { return Ok(None) };
    let t = thresholds_for_content(class);
    match (class, project.thresholds.sky_or_ground_saturation_deg) {
        (ContentClass::SkyOrGroundOnly, Some(sat)) => Ok(Some(t.with_saturation(sat)?)),
        _ => Ok(Some(t)),
    }
}

/// Room depth measured inward from the window wall.
fn room_depth(plan: &FloorPlan, window: &crate::access::WindowRect) -> f64 {
    let inward = -window.plan_normal();
    let origin = window.plan_segment().a;
    plan.boundary
        .vertices
        .iter()
        .map(|&v| (v - origin).dot(inward))
        .fold(0.0, f64::max)
}

struct Ctx<'a> {
    project: &'a ProjectFile,
    plan: &'a FloorPlan,
    materials: BTreeMap<String, crate::clarity::ShadeMaterial>,
    clarity_thresholds: ClarityThresholds,
    provisional: bool,
    schedules: &'a BTreeMap<String, TemporalClarity>,
}

fn clarity_for(ctx: &Ctx, spec: &WindowSpec) -> Result<ClarityResult> {
    let t = ctx.clarity_thresholds;
    let shading = spec.shading.as_ref();
    let (beta, v, source) = match (shading.and_then(|s| s.material.as_ref()), shading.and_then(|s| s.schedule.as_ref())) {
        (Some(id), _) => {
            let m = &ctx.materials[id];
            let f = shading.and_then(|s| s.deployed_fraction).map_or(0.0, |f| f.0);
            let beta = instantaneous_clarity(f, m)?;
            let source = ClaritySource::Shade {
                material: id.clone(),
                deployed_fraction: f,
                vci: vci(m)?,
            };
            (beta, v_clarity(beta, &t)?, source)
        }
        (None, Some(id)) => {
            let tc = &ctx.schedules[id];
            let occupied = tc.series.iter().filter(|s| s.occupied);
            let mean_beta = occupied.map(|s| s.beta).sum::<f64>() / tc.occupied_steps as f64;
            let source = ClaritySource::Schedule {
                schedule: id.clone(),
                occupied_steps: tc.occupied_steps,
                fraction_above_min: tc.fraction_above_min,
            };
            (mean_beta, tc.mean_v_clarity, source)
        }
        (None, None) => (1.0, v_clarity(1.0, &t)?, ClaritySource::ClearGlazing),
    };
    Ok(ClarityResult {
        beta,
        v_clarity: v,
        thresholds: t,
        source,
    })
}

fn evaluate_pair(ctx: &Ctx, observer_id: &str, spec: &WindowSpec) -> Result<PairReport> {
    let project = ctx.project;
    let observer = project.observer(observer_id).expect("validated observer");
    let window = ctx.plan.window(&spec.id).expect("validated window").rect;
    let scene = &project.scenes[&spec.scene];
    let mut warnings = Vec::new();

    let line_of_sight = ctx.plan.has_line_of_sight(observer.position, &window);
    let visible_h = ctx.plan.visible_horizontal_deg(observer.position, &window);
    let angles = if line_of_sight {
        Some(view_angles(&observer, &window)?)
    } else {
        warnings.push(Warning::NoLineOfSight);
        None
    };

    let content = v_content(scene)?;
    if scene.movement == Movement::Both {
        warnings.push(Warning::MovementBothAssumed);
    }
    let content_class = ContentClass::of_scene(scene);
    let thresholds = access_thresholds(project, content_class)?;
    let (angle_deg, v_acc) = match (&angles, &thresholds) {
        (Some(a), Some(t)) => {
            let angle = match t.basis {
                AngleBasis::Horizontal => visible_h,
                AngleBasis::Vertical => a.vertical_deg,
                AngleBasis::Smaller => visible_h.min(a.vertical_deg),
            };
            (angle, v_access(angle, t)?)
        }
        (_, None) => {
            warnings.push(Warning::NoViewContent);
            (0.0, 0.0)
        }
        (None, Some(_)) => (0.0, 0.0),
    };

    let clarity = clarity_for(ctx, spec)?;
    if ctx.provisional {
        warnings.push(Warning::ProvisionalClarityThresholds {
            beta_min: clarity.thresholds.beta_min,
            beta_saturation: clarity.thresholds.beta_saturation,
        });
    }

    let mullions = match &spec.mullions {
        Some(id) => {
            let r = mullion_obstruction(
                &project.mullions[id],
                &window,
                scene.layer_boundaries.as_ref(),
                DEFAULT_BOUNDARY_TOLERANCE,
            )?;
            warnings.extend(r.boundary_conflicts.iter().map(|c| Warning::MullionBoundaryConflict {
                bar_index: c.bar_index,
                boundary: c.boundary,
                bar_position: c.bar_position,
                boundary_position: c.boundary_position,
            }));
            Some(r)
        }
        None => None,
    };

    let vqi = vqi_weighted([content.value, v_acc, clarity.v_clarity], project.weights()?)?;

    let distance_m = window.plan_segment().distance_to(observer.position);
    let mut compliance = en_sll_rows(scene, visible_h);
    compliance.push(en_environmental_information(scene));
    compliance.extend(en_opening_size(room_depth(ctx.plan, &window), window.width, window.height()));
    compliance.push(leed_visual_elements(scene));
    let vertical = angles.map_or(0.0, |a| a.vertical_deg);
    let sees_ground_or_sky = line_of_sight && (scene.has(Layer::Sky) || scene.has(Layer::Ground));
    compliance.push(well_view_check(vertical, sees_ground_or_sky));
    if let Some(a) = &angles {
        let smaller = visible_h.min(a.vertical_deg).min(90.0);
        if smaller > 0.0 {
            compliance.push(view_factor_row(smaller, scene.has_nature())?);
        }
    }
    compliance.extend(distance_rules(distance_m, Some(window.head_height))?);
    if let Some(wwr) = spec.wwr {
        compliance.push(breeam_wwr_check(distance_m, wwr.0)?);
    }

    Ok(PairReport {
        observer: observer_id.to_string(),
        window: spec.id.clone(),
        scene: spec.scene.clone(),
        distance_m,
        line_of_sight,
        angles,
        visible_horizontal_deg: visible_h,
        content,
        content_class,
        access: AccessResult {
            thresholds,
            angle_deg,
            v_access: v_acc,
        },
        clarity,
        mullions,
        vqi,
        compliance,
        warnings,
    })
}

/// Spatial assessment of the project's floor plan with its configured qualifier.
pub fn project_spatial(project: &ProjectFile) -> Result<SpatialAssessment> {
    let plan = project.floor_plan()?;
    spatial_assessment(&plan, project.spatial.qualifier.as_ref()).map_err(|e| e.context("spatial assessment"))
}

/// Temporal clarity for every schedule in the project.
pub fn project_schedules(project: &ProjectFile) -> Result<BTreeMap<String, TemporalClarity>> {
    let materials = project.materials()?;
    let thresholds = project.thresholds.clarity.unwrap_or(ClarityThresholds::PROVISIONAL);
    project
        .schedules
        .keys()
        .map(|id| {
            let s = project.schedule(id).expect("schedule exists");
            let tc = temporal_clarity(&s, &materials, &thresholds).map_err(|e| e.context(format!("schedule {id}")))?;
            Ok((id.clone(), tc))
        })
        .collect()
}

/// Scores every observer against every window, then runs the floor-wide checks.
pub fn evaluate(project: &ProjectFile) -> Result<Report> {
    project.validate()?;
    let plan = project.floor_plan()?;
    let schedules = project_schedules(project)?;
    let ctx = Ctx {
        project,
        plan: &plan,
        materials: project.materials()?,
        clarity_thresholds: project.thresholds.clarity.unwrap_or(ClarityThresholds::PROVISIONAL),
        provisional: project.thresholds.clarity.is_none(),
        schedules: &schedules,
    };

    let mut pairs = Vec::new();
    for observer in project.observers.keys() {
        for spec in &project.floor_plan.windows {
            let pair = evaluate_pair(&ctx, observer, spec)
                .map_err(|e| e.context(format!("observer {observer} / window {}", spec.id)))?;
            pairs.push(pair);
        }
    }

    let assessment = project_spatial(project)?;
    let credits = Certification::ALL
        .iter()
        .map(|&c| spatial_credit_row(assessment.fraction, c))
        .collect::<Result<Vec<_>>>()?;

    let mut alternative_access = BTreeMap::new();
    for (id, atrium) in &project.atria {
        let rows = AlternativeStandard::ALL
            .iter()
            .map(|&s| alternative_access_check(atrium, s))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| e.context(format!("atrium {id}")))?;
        alternative_access.insert(id.clone(), rows);
    }

    Ok(Report {
        pairs,
        spatial: SpatialSummary { assessment, credits },
        alternative_access,
        schedules,
        provenance: Provenance {
            tool_version: TOOL_VERSION,
            input_sha256: input_hash(project),
        },
    })
}

fn compliance_line(out: &mut String, r: &ComplianceResult) {
    let _ = writeln!(out, "    {:<22} {:<38} {:<12} {}", r.standard, r.criterion, r.verdict, r.citation);
}

fn clarity_source(s: &ClaritySource) -> String {
    match s {
        ClaritySource::ClearGlazing => "clear glazing".into(),
        ClaritySource::Shade {
            material,
            deployed_fraction,
            vci,
        } => format!("shade {material} deployed {} (VCI {})", f6(*deployed_fraction), f6(*vci)),
        ClaritySource::Schedule {
            schedule,
            occupied_steps,
            fraction_above_min,
        } => format!(
            "schedule {schedule}, {occupied_steps} occupied steps, {} at or above beta_min",
            f6(*fraction_above_min)
        ),
    }
}

/// Human-readable report. Byte-identical for identical inputs.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let p = &report.provenance;
    let _ = writeln!(out, "View Quality Index report");
    let _ = writeln!(out, "tool version: {}", p.tool_version);
    let _ = writeln!(out, "input sha256: {}", p.input_sha256);

    for pair in &report.pairs {
        let _ = writeln!(out);
        let _ = writeln!(out, "observer {} / window {} (scene {})", pair.observer, pair.window, pair.scene);
        let _ = writeln!(
            out,
            "  distance to window: {} m, line of sight: {}",
            f6(pair.distance_m),
            if pair.line_of_sight { "yes" } else { "no" }
        );
        if let Some(a) = &pair.angles {
            let _ = writeln!(
                out,
                "  angles (deg): horizontal {} (visible {}), vertical {}, smaller {}; solid angle {} sr",
                f6(a.horizontal_deg),
                f6(pair.visible_horizontal_deg),
                f6(a.vertical_deg),
                f6(a.smaller_deg),
                f6(a.solid_angle_sr)
            );
        }
        let b = &pair.content.breakdown;
        let _ = writeln!(
            out,
            "  content: {} (sky {}, landscape {}, ground {}, nature {}), class {}",
            f6(pair.content.value),
            f6(b.sky),
            f6(b.landscape),
            f6(b.ground),
            f6(b.nature),
            pair.content_class.map_or("none", |c| c.as_str())
        );
        match &pair.access.thresholds {
            Some(t) => {
                let _ = writeln!(
                    out,
                    "  access: {} ({} angle {} deg; min {}, saturation {})",
                    f6(pair.access.v_access),
                    t.basis.as_str(),
                    f6(pair.access.angle_deg),
                    f6(t.alpha_min_deg),
                    t.alpha_saturation_deg.map_or("none".to_string(), f6)
                );
            }
            None => {
                let _ = writeln!(out, "  access: {} (no thresholds apply)", f6(pair.access.v_access));
            }
        }
        let c = &pair.clarity;
        let _ = writeln!(
            out,
            "  clarity: {} (beta {}; {}; min {}, saturation {})",
            f6(c.v_clarity),
            f6(c.beta),
            clarity_source(&c.source),
            f6(c.thresholds.beta_min),
            f6(c.thresholds.beta_saturation)
        );
        if let Some(m) = &pair.mullions {
            let _ = writeln!(out, "  mullions: {} of the glazing occluded", f6(m.occluded_fraction));
        }
        let v = &pair.vqi;
        let w = v.weights;
        let _ = writeln!(
            out,
            "  VQI: {} {} (raw {}; weights {}, {}, {})",
            f6(v.value),
            v.label,
            f6(v.raw_value),
            f6(w.content),
            f6(w.access),
            f6(w.clarity)
        );
        let _ = writeln!(out, "  compliance:");
        for r in &pair.compliance {
            compliance_line(&mut out, r);
        }
        if !pair.warnings.is_empty() {
            let _ = writeln!(out, "  warnings:");
            for wn in &pair.warnings {
                let _ = writeln!(out, "    - {wn}");
            }
        }
    }

    let s = &report.spatial.assessment;
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "spatial assessment: grid {} m, {} cells, {} qualifying, fraction {}, two-direction fraction {}",
        f6(s.grid_spacing_m),
        s.cells.len(),
        s.qualified_count(),
        f6(s.fraction),
        f6(s.multi_direction_fraction)
    );
    match &s.qualifier {
        Some(q) => {
            let _ = writeln!(out, "  qualifier: {} angle >= {} deg", q.basis.as_str(), f6(q.alpha_min_deg));
        }
        None => {
            let _ = writeln!(out, "  qualifier: any line of sight");
        }
    }
    for r in &report.spatial.credits {
        compliance_line(&mut out, r);
    }

    for (id, rows) in &report.alternative_access {
        let _ = writeln!(out);
        let _ = writeln!(out, "atrium {id}:");
        for r in rows {
            compliance_line(&mut out, r);
        }
    }

    for (id, tc) in &report.schedules {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "schedule {id}: {} steps, {} occupied, mean v_clarity {}, {} at or above beta_min",
            tc.series.len(),
            tc.occupied_steps,
            f6(tc.mean_v_clarity),
            f6(tc.fraction_above_min)
        );
    }
    out
}

fn csv_bytes<I, R>(header: &[&str], rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("write to memory");
    for r in rows {
        w.write_record(r).expect("write to memory");
    }
    w.into_inner().expect("flush to memory")
}

pub const GRID_CSV_HEADER: [&str; 5] = ["x", "y", "sees_window", "best_angle_deg", "qualified"];

/// Grid cells as CSV, sorted by `(y, x)`.
pub fn emit_grid_csv(assessment: &SpatialAssessment) -> Vec<u8> {
    let mut cells = assessment.cells.clone();
    cells.sort_by(|a, b| a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x)));
    csv_bytes(
        &GRID_CSV_HEADER,
        cells.iter().map(|c| {
            [
                f3(c.x),
                f3(c.y),
                c.sees_window.to_string(),
                f6(c.best_angle_deg),
                c.qualified.to_string(),
            ]
        }),
    )
}

pub const COMPLIANCE_CSV_HEADER: [&str; 5] = ["scope", "standard", "criterion", "verdict", "citation"];

pub fn emit_compliance_csv(rows: &[(String, &ComplianceResult)]) -> Vec<u8> {
    csv_bytes(
        &COMPLIANCE_CSV_HEADER,
        rows.iter().map(|(scope, r)| {
            [
                scope.clone(),
                r.standard.to_string(),
                r.criterion.to_string(),
                r.verdict.to_string(),
                r.citation.to_string(),
            ]
        }),
    )
}

pub const SCORES_CSV_HEADER: [&str; 8] =
    ["observer", "window", "v_content", "v_access", "v_clarity", "vqi_raw", "vqi", "label"];

pub fn emit_scores_csv(report: &Report) -> Vec<u8> {
    csv_bytes(
        &SCORES_CSV_HEADER,
        report.pairs.iter().map(|p| {
            [
                p.observer.clone(),
                p.window.clone(),
                f6(p.vqi.v_content),
                f6(p.vqi.v_access),
                f6(p.vqi.v_clarity),
                f6(p.vqi.raw_value),
                f6(p.vqi.value),
                p.vqi.label.to_string(),
            ]
        }),
    )
}

pub const SERIES_CSV_HEADER: [&str; 3] = ["timestamp", "beta", "v_clarity"];

pub fn emit_series_csv(series: &TemporalClarity) -> Vec<u8> {
    csv_bytes(
        &SERIES_CSV_HEADER,
        series
            .series
            .iter()
            .map(|s| [s.timestamp.clone(), f6(s.beta), f6(s.v_clarity)]),
    )
}

/// True when the failure is a missing threshold the user has to supply.
pub fn is_configuration_error(e: &Error) -> bool {
    matches!(e.root(), Error::ConfigurationRequired(_))
}
