//! Project documents: one JSON file describing scenes, a floor plan, observers,
//! shading and overrides, validated as a whole.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::de::{self, DeserializeOwned, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::access::{AccessThresholds, FloorPlan, FloorWindow, Observer, WindowRect};
use crate::clarity::{ClarityThresholds, MullionLayout, ScheduleStep, ShadeMaterial, ShadeSchedule};
use crate::compliance::AtriumSpec;
use crate::content::SceneDescription;
use crate::error::{Error, Result, ValidationIssue};
use crate::geometry::{Polygon, Vec2};
use crate::vqi::Weights;

pub const SCHEMA_VERSION: u32 = 1;

/// A ratio written either as a number (`0.05`) or a percentage (`"5%"`).
/// Always stored and written back as the plain number.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Fraction(pub f64);

impl Fraction {
    pub fn parse(s: &str) -> Option<f64> {
        let t = s.trim();
        match t.strip_suffix('%') {
            Some(p) => p.trim().parse::<f64>().ok().map(|v| v / 100.0),
            None => t.parse::<f64>().ok(),
        }
        .filter(|v| v.is_finite())
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Fraction;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a percentage such as \"5%\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Fraction, E> {
                Ok(Fraction(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Fraction, E> {
                Ok(Fraction(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Fraction, E> {
                Ok(Fraction(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Fraction, E> {
                Fraction::parse(v)
                    .map(Fraction)
                    .ok_or_else(|| E::custom(format!("malformed number `{v}`")))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Openness factor.
    pub of: Fraction,
    /// Visible transmittance.
    pub tv: Fraction,
}

impl MaterialSpec {
    pub fn build(&self, id: &str) -> Result<ShadeMaterial> {
        ShadeMaterial::new(self.name.as_deref().unwrap_or(id), self.of.0, self.tv.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverSpec {
    pub position: Vec2,
    /// Falls back to the floor plan's eye height.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eye_height: Option<f64>,
}

/// Either a fixed deployment of one material, or a named schedule.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShadingSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub material: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deployed_fraction: Option<Fraction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub id: String,
    /// Plan endpoints of the glazing on the room boundary; the outward side is
    /// worked out from the boundary.
    pub start: Vec2,
    pub end: Vec2,
    pub sill_height: f64,
    pub head_height: f64,
    pub scene: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shading: Option<ShadingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mullions: Option<String>,
    /// Window-to-wall ratio of the facade, for the BREEAM band check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wwr: Option<Fraction>,
}

impl WindowSpec {
    /// Builds the window with its normal pointing out of `boundary`.
    pub fn rect(&self, boundary: &Polygon) -> Result<WindowRect> {
        let right = WindowRect::on_wall(self.start, self.end, self.sill_height, self.head_height, true)?;
        let probe = self.start.lerp(self.end, 0.5) - right.plan_normal() * 1e-3;
        if boundary.contains(probe) {
            Ok(right)
        } else {
            WindowRect::on_wall(self.start, self.end, self.sill_height, self.head_height, false)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSpec {
    pub boundary: Polygon,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub obstructions: Vec<Polygon>,
    pub windows: Vec<WindowSpec>,
    pub grid_spacing_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occupied_region: Option<Polygon>,
    #[serde(default = "default_eye")]
    pub eye_height_m: f64,
}

fn default_eye() -> f64 {
    crate::access::DEFAULT_EYE_HEIGHT_M
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<ScheduleStep>>,
    /// CSV file, relative to the project file. Replaced by `steps` on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdOverrides {
    /// Replaces the content-dependent access thresholds for every window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub access: Option<AccessThresholds>,
    /// Saturation angle for sky-or-ground-only scenes, which have none by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sky_or_ground_saturation_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clarity: Option<ClarityThresholds>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpatialSpec {
    /// Minimum view angle for a cell to count; any line of sight when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qualifier: Option<AccessThresholds>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectFile {
    pub schema_version: u32,
    pub scenes: BTreeMap<String, SceneDescription>,
    pub floor_plan: PlanSpec,
    #[serde(default)]
    pub observers: BTreeMap<String, ObserverSpec>,
    #[serde(default)]
    pub materials: BTreeMap<String, MaterialSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub mullions: BTreeMap<String, MullionLayout>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub schedules: BTreeMap<String, ScheduleSpec>,
    #[serde(default)]
    pub thresholds: ThresholdOverrides,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<[f64; 3]>,
    #[serde(default)]
    pub spatial: SpatialSpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub atria: BTreeMap<String, AtriumSpec>,
}

const TOP_LEVEL: [&str; 11] = [
    "schema_version",
    "scenes",
    "floor_plan",
    "observers",
    "materials",
    "mullions",
    "schedules",
    "thresholds",
    "weights",
    "spatial",
    "atria",
];

impl ProjectFile {
    pub fn floor_plan(&self) -> Result<FloorPlan> {
        let spec = &self.floor_plan;
        let windows = spec
            .windows
            .iter()
            .map(|w| {
                Ok(FloorWindow {
                    id: w.id.clone(),
                    rect: w.rect(&spec.boundary)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FloorPlan {
            boundary: spec.boundary.clone(),
            obstructions: spec.obstructions.clone(),
            windows,
            grid_spacing_m: spec.grid_spacing_m,
            occupied_region: spec.occupied_region.clone(),
            eye_height_m: spec.eye_height_m,
        })
    }

    pub fn observer(&self, name: &str) -> Option<Observer> {
        self.observers.get(name).map(|o| Observer {
            position: o.position,
            eye_height: o.eye_height.unwrap_or(self.floor_plan.eye_height_m),
        })
    }

    pub fn materials(&self) -> Result<BTreeMap<String, ShadeMaterial>> {
        self.materials
            .iter()
            .map(|(id, m)| Ok((id.clone(), m.build(id)?)))
            .collect()
    }

    pub fn schedule(&self, id: &str) -> Option<ShadeSchedule> {
        self.schedules.get(id).map(|s| ShadeSchedule {
            steps: s.steps.clone().unwrap_or_default(),
        })
    }

    pub fn weights(&self) -> Result<Weights> {
        match self.weights {
            Some([c, a, cl]) => Weights::new(c, a, cl),
            None => Ok(Weights::NEUTRAL),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("project serializes")
    }

    /// Compact serialization used for hashing; map keys are already sorted.
    pub fn canonical_json(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("project serializes")
    }

    /// Checks every cross-reference and value, collecting all problems.
    pub fn validate(&self) -> Result<()> {
        let mut issues = Vec::new();
        validate_into(self, &mut issues);
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(issues))
        }
    }
}

fn issue(issues: &mut Vec<ValidationIssue>, at: impl Into<String>, e: impl fmt::Display) {
    issues.push(ValidationIssue::new(at, e.to_string()));
}

fn validate_into(p: &ProjectFile, issues: &mut Vec<ValidationIssue>) {
    if p.schema_version != SCHEMA_VERSION {
        issue(
            issues,
            "schema_version",
            format!("unsupported schema version {} (expected {SCHEMA_VERSION})", p.schema_version),
        );
    }
    for (name, s) in &p.scenes {
        if let Err(e) = s.validate() {
            issue(issues, format!("scenes.{name}"), e);
        }
    }
    for (id, m) in &p.materials {
        if let Err(e) = m.build(id) {
            issue(issues, format!("materials.{id}"), e);
        }
    }
    for (id, m) in &p.mullions {
        if let Err(e) = m.validate() {
            issue(issues, format!("mullions.{id}"), e);
        }
    }
    for (id, a) in &p.atria {
        if let Err(e) = a.validate() {
            issue(issues, format!("atria.{id}"), e);
        }
    }
    for (id, s) in &p.schedules {
        let at = format!("schedules.{id}");
        match (&s.steps, &s.csv) {
            (Some(steps), None) => {
                for (i, step) in steps.iter().enumerate() {
                    if !(0.0..=1.0).contains(&step.deployed_fraction) {
                        issue(issues, format!("{at}.steps[{i}].deployed_fraction"), "must be in [0, 1]");
                    }
                    let bare = step.material_id.is_empty() && step.deployed_fraction == 0.0;
                    if !bare && !p.materials.contains_key(&step.material_id) {
                        issue(
                            issues,
                            format!("{at}.steps[{i}].material_id"),
                            format!("undefined material `{}`", step.material_id),
                        );
                    }
                }
            }
            (None, Some(_)) => issue(issues, &at, "csv schedule was not loaded; use parse_project with a path"),
            _ => issue(issues, &at, "give exactly one of `steps` or `csv`"),
        }
    }

    let t = &p.thresholds;
    if let Some(a) = &t.access {
        if let Err(e) = a.validate() {
            issue(issues, "thresholds.access", e);
        }
    }
    if let Some(s) = t.sky_or_ground_saturation_deg {
        let base = crate::access::thresholds_for_content(crate::access::ContentClass::SkyOrGroundOnly);
        if let Err(e) = base.with_saturation(s) {
            issue(issues, "thresholds.sky_or_ground_saturation_deg", e);
        }
    }
    if let Some(c) = &t.clarity {
        if let Err(e) = c.validate() {
            issue(issues, "thresholds.clarity", e);
        }
    }
    if let Some(q) = &p.spatial.qualifier {
        if let Err(e) = q.validate() {
            issue(issues, "spatial.qualifier", e);
        }
    }
    if let Err(e) = p.weights() {
        issue(issues, "weights", e);
    }

    let plan = &p.floor_plan;
    let mut ids = BTreeSet::new();
    for (i, w) in plan.windows.iter().enumerate() {
        let at = format!("floor_plan.windows[{i}]");
        if !ids.insert(w.id.as_str()) {
            issue(issues, format!("{at}.id"), format!("duplicate window id `{}`", w.id));
        }
        if !p.scenes.contains_key(&w.scene) {
            issue(issues, format!("{at}.scene"), format!("undefined scene `{}`", w.scene));
        }
        if let Some(m) = &w.mullions {
            if !p.mullions.contains_key(m) {
                issue(issues, format!("{at}.mullions"), format!("undefined mullion layout `{m}`"));
            }
        }
        if let Some(r) = w.wwr {
            if !(0.0..=1.0).contains(&r.0) {
                issue(issues, format!("{at}.wwr"), "must be in [0, 1]");
            }
        }
        if let Some(s) = &w.shading {
            validate_shading(p, s, &format!("{at}.shading"), issues);
        }
        if let Err(e) = w.rect(&plan.boundary) {
            issue(issues, &at, e);
        }
    }
    if plan.windows.is_empty() {
        issue(issues, "floor_plan.windows", "at least one window is required");
    }
    // geometry checks only make sense once every window builds
    if issues.iter().all(|i| !i.locator.starts_with("floor_plan")) {
        match p.floor_plan() {
            Ok(fp) => {
                if let Err(e) = fp.validate() {
                    issue(issues, "floor_plan", e);
                }
            }
            Err(e) => issue(issues, "floor_plan", e),
        }
    }

    for (name, o) in &p.observers {
        let at = format!("observers.{name}");
        let obs = Observer {
            position: o.position,
            eye_height: o.eye_height.unwrap_or(plan.eye_height_m),
        };
        if let Err(e) = obs.validate() {
            issue(issues, &at, e);
        } else if !plan.boundary.contains(o.position) {
            issue(issues, format!("{at}.position"), "observer is outside the floor boundary");
        }
    }
}

fn validate_shading(p: &ProjectFile, s: &ShadingSpec, at: &str, issues: &mut Vec<ValidationIssue>) {
    match (&s.material, &s.schedule) {
        (Some(m), None) => {
            if !p.materials.contains_key(m) {
                issue(issues, format!("{at}.material"), format!("undefined material `{m}`"));
            }
            match s.deployed_fraction {
                Some(f) if (0.0..=1.0).contains(&f.0) => {}
                Some(_) => issue(issues, format!("{at}.deployed_fraction"), "must be in [0, 1]"),
                None => issue(issues, format!("{at}.deployed_fraction"), "required with `material`"),
            }
        }
        (None, Some(id)) => {
            if !p.schedules.contains_key(id) {
                issue(issues, format!("{at}.schedule"), format!("undefined schedule `{id}`"));
            }
            if s.deployed_fraction.is_some() {
                issue(issues, format!("{at}.deployed_fraction"), "not allowed with `schedule`");
            }
        }
        _ => issue(issues, at, "give exactly one of `material` or `schedule`"),
    }
}

/// Deserializes one value, recording a located issue on failure.
fn take<T: DeserializeOwned>(v: Value, at: &str, issues: &mut Vec<ValidationIssue>) -> Option<T> {
    match serde_path_to_error::deserialize::<_, T>(v) {
        Ok(t) => Some(t),
        Err(e) => {
            let inner = e.path().to_string();
            let loc = if inner.is_empty() || inner == "." {
                at.to_string()
            } else if inner.starts_with('[') {
                format!("{at}{inner}")
            } else {
                format!("{at}.{inner}")
            };
            issues.push(ValidationIssue::new(loc, e.into_inner().to_string()));
            None
        }
    }
}

/// Deserializes each entry of an object separately so every bad entry is reported.
fn take_map<T: DeserializeOwned>(v: Option<Value>, at: &str, issues: &mut Vec<ValidationIssue>) -> BTreeMap<String, T> {
    let mut out = BTreeMap::new();
    match v {
        None | Some(Value::Null) => {}
        Some(Value::Object(m)) => {
            for (k, v) in m {
                if let Some(t) = take(v, &format!("{at}.{k}"), issues) {
                    out.insert(k, t);
                }
            }
        }
        Some(_) => issue(issues, at, "expected an object"),
    }
    out
}

fn take_plan(v: Option<Value>, issues: &mut Vec<ValidationIssue>) -> Option<PlanSpec> {
    let Some(Value::Object(mut m)) = v else {
        issue(issues, "floor_plan", "a floor plan object is required");
        return None;
    };
    let windows = match m.remove("windows") {
        Some(Value::Array(ws)) => {
            let n = issues.len();
            let ws: Vec<WindowSpec> = ws
                .into_iter()
                .enumerate()
                .filter_map(|(i, w)| take(w, &format!("floor_plan.windows[{i}]"), issues))
                .collect();
            (issues.len() == n).then_some(ws)
        }
        Some(_) => {
            issue(issues, "floor_plan.windows", "expected an array");
            None
        }
        None => {
            issue(issues, "floor_plan.windows", "missing field");
            None
        }
    };
    m.insert("windows".into(), Value::Array(Vec::new()));
    let mut plan: PlanSpec = take(Value::Object(m), "floor_plan", issues)?;
    plan.windows = windows?;
    Some(plan)
}

fn load_csv_schedules(p: &mut ProjectFile, base: &Path, issues: &mut Vec<ValidationIssue>) {
    for (id, s) in p.schedules.iter_mut() {
        let Some(rel) = s.csv.clone() else { continue };
        if s.steps.is_some() {
            continue; // reported by validation
        }
        let path = base.join(&rel);
        match std::fs::File::open(&path) {
            Ok(f) => match ShadeSchedule::from_csv(f, &rel) {
                Ok(sched) => {
                    s.steps = Some(sched.steps);
                    s.csv = None;
                }
                Err(Error::Validation(found)) => issues.extend(found),
                Err(e) => issue(issues, format!("schedules.{id}.csv"), e),
            },
            Err(e) => issue(issues, format!("schedules.{id}.csv"), format!("cannot read `{rel}`: {e}")),
        }
    }
}

/// Parses and validates a project document. CSV schedules are resolved
/// against `base_dir` (the current directory when `None`).
pub fn parse_project_str(text: &str, base_dir: Option<&Path>) -> Result<ProjectFile> {
    let root: Value = serde_json::from_str(text).map_err(|e| {
        Error::Validation(vec![ValidationIssue::new(
            format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )])
    })?;
    let Value::Object(mut m) = root else {
        return Err(Error::Validation(vec![ValidationIssue::new("", "project must be a JSON object")]));
    };
    let mut issues = Vec::new();
    for k in m.keys() {
        if !TOP_LEVEL.contains(&k.as_str()) {
            issue(&mut issues, k.as_str(), "unknown field");
        }
    }
    let schema_version = match m.remove("schema_version") {
        Some(v) => take::<u32>(v, "schema_version", &mut issues),
        None => {
            issue(&mut issues, "schema_version", "missing field");
            None
        }
    };
    let scenes = take_map(m.remove("scenes"), "scenes", &mut issues);
    let floor_plan = take_plan(m.remove("floor_plan"), &mut issues);
    let observers = take_map(m.remove("observers"), "observers", &mut issues);
    let materials = take_map(m.remove("materials"), "materials", &mut issues);
    let mullions = take_map(m.remove("mullions"), "mullions", &mut issues);
    let schedules = take_map(m.remove("schedules"), "schedules", &mut issues);
    let atria = take_map(m.remove("atria"), "atria", &mut issues);
    let thresholds = m
        .remove("thresholds")
        .and_then(|v| take(v, "thresholds", &mut issues))
        .unwrap_or_default();
    let spatial = m
        .remove("spatial")
        .and_then(|v| take(v, "spatial", &mut issues))
        .unwrap_or_default();
    let weights = m.remove("weights").and_then(|v| take(v, "weights", &mut issues));

    let (Some(schema_version), Some(floor_plan)) = (schema_version, floor_plan) else {
        return Err(Error::Validation(issues));
    };
    let mut project = ProjectFile {
        schema_version,
        scenes,
        floor_plan,
        observers,
        materials,
        mullions,
        schedules,
        thresholds,
        weights,
        spatial,
        atria,
    };
    load_csv_schedules(&mut project, base_dir.unwrap_or(Path::new(".")), &mut issues);
    validate_into(&project, &mut issues);
    if issues.is_empty() {
        Ok(project)
    } else {
        Err(Error::Validation(issues))
    }
}

pub fn parse_project(path: &Path) -> Result<ProjectFile> {
    let shown = path.display().to_string();
    let bytes = std::fs::read(path)
        .map_err(|e| Error::Validation(vec![ValidationIssue::new(&shown, format!("cannot read file: {e}"))]))?;
    let text = String::from_utf8(bytes)
        .map_err(|e| Error::Validation(vec![ValidationIssue::new(&shown, format!("not UTF-8: {e}"))]))?;
    parse_project_str(&text, path.parent())
}
