//! View clarity: shade-fabric clarity index, the clarity sub-score, mullion
//! diagnostics and clarity over a shade-deployment schedule.

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::access::WindowRect;
use crate::content::LayerBoundaries;
use crate::error::{check_range, Error, Result, ValidationIssue};
use crate::scale::knee_score;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadeMaterial {
    pub name: String,
    /// Open weave share of the fabric, as a fraction.
    pub openness_factor: f64,
    /// Visible transmittance, as a fraction.
    pub visible_transmittance: f64,
}

impl ShadeMaterial {
    pub fn new(name: impl Into<String>, openness_factor: f64, visible_transmittance: f64) -> Result<Self> {
        let m = Self {
            name: name.into(),
            openness_factor,
            visible_transmittance,
        };
        m.validate()?;
        Ok(m)
    }

    /// Tinted glazing without a fabric: everything transmitted is seen directly.
    pub fn tinted_glazing(name: impl Into<String>, visible_transmittance: f64) -> Result<Self> {
        Self::new(name, visible_transmittance, visible_transmittance)
    }

    pub fn validate(&self) -> Result<()> {
        check_range("openness factor", self.openness_factor, 0.0, 1.0)?;
        if self.visible_transmittance.is_nan() || self.visible_transmittance <= 0.0 || self.visible_transmittance > 1.0 {
            return Err(Error::domain("visible transmittance", self.visible_transmittance));
        }
        if self.openness_factor > self.visible_transmittance {
            return Err(Error::domain(
                "openness factor (exceeds visible transmittance)",
                self.openness_factor,
            ));
        }
        Ok(())
    }
}

/// Unclamped clarity index polynomial for fractional openness and transmittance.
pub fn vci_raw(openness: f64, transmittance: f64) -> Result<f64> {
    check_range("openness factor", openness, 0.0, 1.0)?;
    check_range("visible transmittance", transmittance, 0.0, 1.0)?;
    let ratio = if openness == 0.0 {
        0.0
    } else if transmittance == 0.0 {
        return Err(Error::domain("visible transmittance (zero with nonzero openness)", transmittance));
    } else {
        openness / transmittance
    };
    Ok(1.43 * openness.powf(0.48) + 0.64 * ratio.powf(1.1) - 0.22)
}

/// View clarity index of a shade fabric, clamped to `[0, 1]`.
pub fn vci(material: &ShadeMaterial) -> Result<f64> {
    material.validate()?;
    Ok(vci_raw(material.openness_factor, material.visible_transmittance)?.clamp(0.0, 1.0))
}

/// Clarity of a window whose shade covers `deployed_fraction` of the glazing.
pub fn instantaneous_clarity(deployed_fraction: f64, material: &ShadeMaterial) -> Result<f64> {
    clarity_with_index(deployed_fraction, vci(material)?)
}

/// Area-weighted clarity of a window part-covered by a shade of known index.
pub fn clarity_with_index(deployed_fraction: f64, shade_vci: f64) -> Result<f64> {
    let f = check_range("deployed fraction", deployed_fraction, 0.0, 1.0)?;
    let v = check_range("clarity index", shade_vci, 0.0, 1.0)?;
    Ok((1.0 - f) + f * v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClarityThresholds {
    pub beta_min: f64,
    pub beta_saturation: f64,
}

impl ClarityThresholds {
    /// Placeholder values; reports flag them as provisional.
    pub const PROVISIONAL: ClarityThresholds = ClarityThresholds {
        beta_min: 0.5,
        beta_saturation: 1.0,
    };

    pub fn new(beta_min: f64, beta_saturation: f64) -> Result<Self> {
        let t = Self { beta_min, beta_saturation };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta_min > 0.0 && self.beta_min < 1.0) {
            return Err(Error::domain("beta_min", self.beta_min));
        }
        if !(self.beta_saturation > self.beta_min && self.beta_saturation <= 1.0) {
            return Err(Error::domain("beta_saturation", self.beta_saturation));
        }
        Ok(())
    }
}

impl Default for ClarityThresholds {
    fn default() -> Self {
        Self::PROVISIONAL
    }
}

pub fn v_clarity(beta: f64, thresholds: &ClarityThresholds) -> Result<f64> {
    let b = check_range("clarity", beta, 0.0, 1.0)?;
    Ok(knee_score(b, thresholds.beta_min, thresholds.beta_saturation))
}

/// A glazing bar, positioned by its centre line as a fraction of the window
/// height (horizontal bars) or width (vertical bars), measured from the sill
/// or the window origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bar {
    pub position: f64,
    pub thickness_m: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MullionLayout {
    #[serde(default)]
    pub horizontal: Vec<Bar>,
    #[serde(default)]
    pub vertical: Vec<Bar>,
}

impl MullionLayout {
    pub fn validate(&self) -> Result<()> {
        for b in self.horizontal.iter().chain(&self.vertical) {
            check_range("bar position", b.position, 0.0, 1.0)?;
            if b.thickness_m.is_nan() || b.thickness_m < 0.0 {
                return Err(Error::domain("bar thickness", b.thickness_m));
            }
        }
        Ok(())
    }
}

/// Band around a layer boundary, as a fraction of window height, inside which a
/// horizontal bar is reported.
pub const DEFAULT_BOUNDARY_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryConflict {
    pub bar_index: usize,
    pub bar_position: f64,
    pub boundary: &'static str,
    pub boundary_position: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MullionReport {
    pub occluded_fraction: f64,
    pub boundary_conflicts: Vec<BoundaryConflict>,
}

/// Union length of bar spans clipped to `[0, extent]`.
fn covered(bars: &[Bar], extent: f64) -> f64 {
    let mut spans: Vec<(f64, f64)> = bars
        .iter()
        .map(|b| {
            let c = b.position * extent;
            ((c - 0.5 * b.thickness_m).max(0.0), (c + 0.5 * b.thickness_m).min(extent))
        })
        .collect();
    crate::geometry::union_length(&mut spans)
}

pub fn mullion_obstruction(
    layout: &MullionLayout,
    window: &WindowRect,
    boundaries: Option<&LayerBoundaries>,
    tolerance: f64,
) -> Result<MullionReport> {
    layout.validate()?;
    let (w, h) = (window.width, window.height());
    let rows = covered(&layout.horizontal, h);
    let cols = covered(&layout.vertical, w);
    // horizontal bars span the full width, vertical bars the full height
    let area = rows * w + cols * h - rows * cols;
    let occluded_fraction = area / (w * h);

    let mut boundary_conflicts = Vec::new();
    if let Some(bounds) = boundaries {
        for (i, bar) in layout.horizontal.iter().enumerate() {
            let half = 0.5 * bar.thickness_m / h;
            for (name, at) in bounds.iter() {
                let gap = ((bar.position - at).abs() - half).max(0.0);
                if gap <= tolerance {
                    boundary_conflicts.push(BoundaryConflict {
                        bar_index: i,
                        bar_position: bar.position,
                        boundary: name,
                        boundary_position: at,
                    });
                }
            }
        }
    }
    Ok(MullionReport {
        occluded_fraction,
        boundary_conflicts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleStep {
    pub timestamp: String,
    pub occupied: bool,
    pub deployed_fraction: f64,
    /// May be empty for steps with nothing deployed.
    #[serde(default)]
    pub material_id: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ShadeSchedule {
    pub steps: Vec<ScheduleStep>,
}

pub const SCHEDULE_CSV_HEADER: [&str; 4] = ["timestamp", "occupied", "deployed_fraction", "material_id"];

fn parse_flag(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "y" => Some(true),
        "0" | "false" | "no" | "n" => Some(false),
        _ => None,
    }
}

impl ShadeSchedule {
    /// Reads `timestamp,occupied,deployed_fraction,material_id` rows. All
    /// malformed rows are reported together, located by line number.
    pub fn from_csv<R: Read>(reader: R, source: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != SCHEDULE_CSV_HEADER {
            return Err(Error::Validation(vec![ValidationIssue::new(
                format!("{source}:1"),
                format!("expected header `{}`", SCHEDULE_CSV_HEADER.join(",")),
            )]));
        }
        let mut steps = Vec::new();
        let mut issues = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            let at = |field: &str| format!("{source}:{line}:{field}");
            let occupied = parse_flag(&rec[1]);
            if occupied.is_none() {
                issues.push(ValidationIssue::new(at("occupied"), format!("not a boolean: `{}`", &rec[1])));
            }
            let deployed = rec[2].parse::<f64>().ok().filter(|f| (0.0..=1.0).contains(f));
            if deployed.is_none() {
                issues.push(ValidationIssue::new(
                    at("deployed_fraction"),
                    format!("expected a number in [0, 1], got `{}`", &rec[2]),
                ));
            }
            if let (Some(occupied), Some(deployed_fraction)) = (occupied, deployed) {
                steps.push(ScheduleStep {
                    timestamp: rec[0].to_string(),
                    occupied,
                    deployed_fraction,
                    material_id: rec[3].to_string(),
                });
            }
        }
        if issues.is_empty() {
            Ok(Self { steps })
        } else {
            Err(Error::Validation(issues))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClarityStep {
    pub timestamp: String,
    pub occupied: bool,
    pub beta: f64,
    pub v_clarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemporalClarity {
    /// Share of occupied steps with clarity at or above `beta_min`.
    pub fraction_above_min: f64,
    pub mean_v_clarity: f64,
    pub occupied_steps: usize,
    /// Every step, occupied or not, in schedule order.
    pub series: Vec<ClarityStep>,
}

pub fn temporal_clarity(
    schedule: &ShadeSchedule,
    materials: &BTreeMap<String, ShadeMaterial>,
    thresholds: &ClarityThresholds,
) -> Result<TemporalClarity> {
    thresholds.validate()?;
    let mut series = Vec::with_capacity(schedule.steps.len());
    for (i, step) in schedule.steps.iter().enumerate() {
        let beta = if step.deployed_fraction == 0.0 && step.material_id.is_empty() {
            1.0
        } else {
            let m = materials.get(&step.material_id).ok_or_else(|| {
                Error::Validation(vec![ValidationIssue::new(
                    format!("steps[{i}].material_id"),
                    format!("unknown material `{}`", step.material_id),
                )])
            })?;
            instantaneous_clarity(step.deployed_fraction, m)?
        };
        series.push(ClarityStep {
            timestamp: step.timestamp.clone(),
            occupied: step.occupied,
            beta,
            v_clarity: v_clarity(beta, thresholds)?,
        });
    }
    let occupied: Vec<&ClarityStep> = series.iter().filter(|s| s.occupied).collect();
    if occupied.is_empty() {
        return Err(Error::NoOccupiedTimesteps);
    }
    let n = occupied.len() as f64;
    let above = occupied.iter().filter(|s| s.beta >= thresholds.beta_min).count() as f64;
    let mean = occupied.iter().map(|s| s.v_clarity).sum::<f64>() / n;
    Ok(TemporalClarity {
        fraction_above_min: above / n,
        mean_v_clarity: mean,
        occupied_steps: occupied.len(),
        series,
    })
}
