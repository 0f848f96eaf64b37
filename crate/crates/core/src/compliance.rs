//! Window-view rules from daylighting standards and green building certifications.
//!
//! Every check returns a [`ComplianceResult`] carrying the rule text it was
//! judged against, so reports can show where each verdict comes from.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::content::{Layer, Movement, SceneDescription};
use crate::error::{check_range, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    Level(String),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.pad("pass"),
            Verdict::Fail => f.pad("fail"),
            Verdict::Level(l) => f.pad(l),
        }
    }
}

impl From<bool> for Verdict {
    fn from(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplianceResult {
    pub standard: &'static str,
    pub criterion: &'static str,
    pub verdict: Verdict,
    pub citation: &'static str,
    /// Inputs the verdict was computed from, already formatted.
    pub inputs: Vec<(&'static str, String)>,
}

impl ComplianceResult {
    fn new(standard: &'static str, criterion: &'static str, verdict: Verdict, citation: &'static str) -> Self {
        Self {
            standard,
            criterion,
            verdict,
            citation,
            inputs: Vec::new(),
        }
    }

    fn input(mut self, name: &'static str, value: impl fmt::Display) -> Self {
        self.inputs.push((name, value.to_string()));
        self
    }
}

fn num(v: f64) -> String {
    format!("{v:.6}")
}

/// Case, space and punctuation insensitive key for standard names.
pub fn standard_key(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

// ---------------------------------------------------------------------------
// EN 17037 / SLL LG10 content levels

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum EnSllLevel {
    Insufficient,
    Minimum,
    Medium,
    High,
}

impl EnSllLevel {
    /// EN 17037 name; the standard has no name below Minimum.
    pub fn en_name(self) -> Option<&'static str> {
        match self {
            EnSllLevel::Insufficient => None,
            EnSllLevel::Minimum => Some("Minimum"),
            EnSllLevel::Medium => Some("Medium"),
            EnSllLevel::High => Some("High"),
        }
    }

    pub fn sll_name(self) -> &'static str {
        match self {
            EnSllLevel::Insufficient => "Insufficient",
            EnSllLevel::Minimum => "Sufficient",
            EnSllLevel::Medium => "Good",
            EnSllLevel::High => "Excellent",
        }
    }

    pub fn citation(self) -> &'static str {
        match self {
            EnSllLevel::Insufficient => "EN 17037/SLL LG10 insufficient: only sky or only foreground; < 6 m; < 14 deg",
            EnSllLevel::Minimum => "EN 17037/SLL LG10 minimum/sufficient: at least landscape layer; >= 6 m; >= 14 deg",
            EnSllLevel::Medium => "EN 17037/SLL LG10 medium/good: landscape layer plus one other; >= 20 m; >= 28 deg",
            EnSllLevel::High => "EN 17037/SLL LG10 high/excellent: all layers; >= 50 m; >= 54 deg",
        }
    }
}

/// Highest level whose layer, distance and horizontal-angle columns all hold.
pub fn en_sll_content_level(scene: &SceneDescription, horizontal_angle_deg: f64) -> EnSllLevel {
    let landscape = scene.has(Layer::Landscape);
    let others = usize::from(scene.has(Layer::Sky)) + usize::from(scene.has(Layer::Ground));
    let d = scene.content_distance_m;
    let a = horizontal_angle_deg;
    if landscape && others == 2 && d >= 50.0 && a >= 54.0 {
        EnSllLevel::High
    } else if landscape && others >= 1 && d >= 20.0 && a >= 28.0 {
        EnSllLevel::Medium
    } else if landscape && d >= 6.0 && a >= 14.0 {
        EnSllLevel::Minimum
    } else {
        EnSllLevel::Insufficient
    }
}

/// One row per standard for the content level.
pub fn en_sll_rows(scene: &SceneDescription, horizontal_angle_deg: f64) -> Vec<ComplianceResult> {
    let level = en_sll_content_level(scene, horizontal_angle_deg);
    let en = match level.en_name() {
        Some(n) => Verdict::Level(n.into()),
        None => Verdict::Fail,
    };
    let echo = |r: ComplianceResult| {
        r.input("layers", scene.layers.len())
            .input("content_distance_m", num(scene.content_distance_m))
            .input("horizontal_angle_deg", num(horizontal_angle_deg))
    };
    vec![
        echo(ComplianceResult::new("EN 17037", "view content level", en, level.citation())),
        echo(ComplianceResult::new(
            "SLL LG10",
            "view content level",
            Verdict::Level(level.sll_name().into()),
            level.citation(),
        )),
    ]
}

const ENV_INFO_CITATION: &str =
    "EN 17037/SLL LG10 environmental information: good needs nature or people, excellent needs both";

/// Nature and people columns of the environmental-information criteria.
/// Movement stands in for people. Advisory only.
pub fn en_environmental_information(scene: &SceneDescription) -> ComplianceResult {
    let nature = scene.has_nature();
    let people = scene.movement != Movement::None;
    let level = match (nature, people) {
        (true, true) => EnSllLevel::High,
        (true, false) | (false, true) => EnSllLevel::Medium,
        (false, false) => EnSllLevel::Minimum,
    };
    ComplianceResult::new(
        "SLL LG10",
        "environmental information (advisory)",
        Verdict::Level(level.sll_name().into()),
        ENV_INFO_CITATION,
    )
    .input("nature", nature)
    .input("people_or_movement", people)
}

const OPENING_SIZE_CITATION: &str =
    "EN 17037: rooms deeper than 4 m should have view openings of at least 1.0 m x 1.25 m (width x height)";

/// Opening-size recommendation for deep rooms; `None` when the room is 4 m deep or less.
pub fn en_opening_size(room_depth_m: f64, width_m: f64, height_m: f64) -> Option<ComplianceResult> {
    (room_depth_m > 4.0).then(|| {
        ComplianceResult::new(
            "EN 17037",
            "opening size (advisory)",
            (width_m >= 1.0 && height_m >= 1.25).into(),
            OPENING_SIZE_CITATION,
        )
        .input("room_depth_m", num(room_depth_m))
        .input("width_m", num(width_m))
        .input("height_m", num(height_m))
    })
}

// ---------------------------------------------------------------------------
// LEED / WELL visual elements

const LEED_ELEMENTS_CITATION: &str =
    "LEED v4.1: views include at least two of flora, fauna or sky; movement; objects at least 7.5 m from the glazing";

pub fn leed_visual_elements(scene: &SceneDescription) -> ComplianceResult {
    let nature_or_sky = scene.has_nature() || scene.has(Layer::Sky);
    let movement = scene.movement != Movement::None;
    let distant = scene.content_distance_m >= 7.5;
    let met = [nature_or_sky, movement, distant].into_iter().filter(|&b| b).count();
    ComplianceResult::new("LEED v4.1", "visual elements", (met >= 2).into(), LEED_ELEMENTS_CITATION)
        .input("flora_fauna_or_sky", nature_or_sky)
        .input("movement", movement)
        .input("objects_at_7_5_m", distant)
}

const WELL_VIEW_CITATION: &str =
    "WELL v2-pilot: vertical view angle of at least 30 deg with a direct line of sight to the ground or sky";

pub fn well_view_check(vertical_angle_deg: f64, sees_ground_or_sky: bool) -> ComplianceResult {
    ComplianceResult::new(
        "WELL v2-pilot",
        "vertical view angle",
        (vertical_angle_deg >= 30.0 && sees_ground_or_sky).into(),
        WELL_VIEW_CITATION,
    )
    .input("vertical_angle_deg", num(vertical_angle_deg))
    .input("sees_ground_or_sky", sees_ground_or_sky)
}

/// View Factor row; the citation names the angle band that produced the rating.
pub fn view_factor_row(smaller_angle_deg: f64, nature_view: bool) -> Result<ComplianceResult> {
    let factor = crate::access::view_factor(smaller_angle_deg, nature_view)?;
    let a = smaller_angle_deg;
    let citation = if a < 4.0 {
        "View factor 1: 1 to 4 deg, a glimpse of sky or sliver of the outside"
    } else if a < 9.0 {
        "View factor 1 or 2: 4 to 9 deg, 1 (non-nature) or 2 (nature)"
    } else if a < 11.0 {
        "View factor 2 or 3: 9 to 11 deg, 2 (non-nature) or 3 (nature)"
    } else if a < 15.0 {
        "View factor 3: 11 to 15 deg, coherent view"
    } else if a < 20.0 {
        "View factor 3 or 4: 15 to 20 deg, 3 (non-nature) or 4 (nature)"
    } else if a < 40.0 {
        "View factor 4: 20 to 40 deg, about one-half of the visual field"
    } else if a < 50.0 {
        "View factor 4 or 5: 40 to 50 deg, 4 (non-nature) or 5 (nature)"
    } else {
        "View factor 5: 50 to 90 deg, completely fills the visual field"
    };
    Ok(ComplianceResult::new("LEED v4.1", "view factor", Verdict::Level(factor.to_string()), citation)
        .input("smaller_angle_deg", num(a))
        .input("nature_view", nature_view))
}

// ---------------------------------------------------------------------------
// Distance and window-to-wall ratio

const BREEAM_DISTANCE_CITATION: &str = "BREEAM: within 8 m of an external wall containing a window";
const WELL_DISTANCE_CITATION: &str = "WELL v2: workspaces within 10 m of a window";
const DIN_DISTANCE_CITATION: &str = "DIN 5034: workspaces within 10 m of a window";
const LEED_DISTANCE_CITATION: &str = "LEED v4.1: within three times the head height of the window";

/// Distance-to-window rules; the LEED head-height rule needs the head height.
pub fn distance_rules(distance_to_window_m: f64, head_height_m: Option<f64>) -> Result<Vec<ComplianceResult>> {
    let d = check_range("distance to window", distance_to_window_m, 0.0, f64::INFINITY)?;
    let row = |standard, ok: bool, citation| {
        ComplianceResult::new(standard, "distance to window", ok.into(), citation).input("distance_m", num(d))
    };
    let mut rows = vec![
        row("BREEAM", d <= 8.0, BREEAM_DISTANCE_CITATION),
        row("WELL v2", d <= 10.0, WELL_DISTANCE_CITATION),
        row("DIN 5034", d <= 10.0, DIN_DISTANCE_CITATION),
    ];
    if let Some(head) = head_height_m {
        rows.push(row("LEED v4.1", d <= 3.0 * head, LEED_DISTANCE_CITATION).input("head_height_m", num(head)));
    }
    Ok(rows)
}

/// Minimum window-to-wall ratio for a workstation at `distance_m`.
/// Band edges belong to the farther band, except 14 m which stays at 30 %.
pub fn breeam_wwr_requirement(distance_m: f64) -> Result<f64> {
    let d = check_range("distance to window", distance_m, 0.0, f64::INFINITY)?;
    Ok(if d < 8.0 {
        0.20
    } else if d < 11.0 {
        0.25
    } else if d <= 14.0 {
        0.30
    } else {
        0.35
    })
}

fn wwr_citation(required: f64) -> &'static str {
    if required == 0.20 {
        "BREEAM open-plan WWR: 20 % (< 8 m)"
    } else if required == 0.25 {
        "BREEAM open-plan WWR: 25 % (8 - 11 m)"
    } else if required == 0.30 {
        "BREEAM open-plan WWR: 30 % (11 - 14 m)"
    } else {
        "BREEAM open-plan WWR: 35 % (> 14 m)"
    }
}

pub fn breeam_wwr_check(distance_m: f64, actual_wwr: f64) -> Result<ComplianceResult> {
    let required = breeam_wwr_requirement(distance_m)?;
    let actual = check_range("window-to-wall ratio", actual_wwr, 0.0, 1.0)?;
    Ok(
        ComplianceResult::new("BREEAM", "window-to-wall ratio", (actual >= required).into(), wwr_citation(required))
            .input("distance_m", num(distance_m))
            .input("required_wwr", num(required))
            .input("actual_wwr", num(actual)),
    )
}

// ---------------------------------------------------------------------------
// Alternative access through courtyards and atria

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtriumKind {
    Courtyard,
    Atrium,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtriumSpec {
    pub kind: AtriumKind,
    pub width_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_m: Option<f64>,
    pub content_distance_m: f64,
    #[serde(default)]
    pub features: Vec<String>,
    /// Whether every primary interior space has a view to the building exterior.
    #[serde(default)]
    pub exterior_view_from_all_primary_spaces: bool,
}

/// Feature tags counted as greenery.
pub const GREENERY_TAGS: [&str; 8] = [
    "greenery",
    "plants",
    "plant_containers",
    "trees",
    "green_wall",
    "garden",
    "roof_garden",
    "nature",
];

impl AtriumSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.width_m > 0.0) {
            return Err(Error::domain("atrium width", self.width_m));
        }
        if let Some(d) = self.depth_m {
            if !(d > 0.0) {
                return Err(Error::domain("atrium depth", d));
            }
        }
        if !(self.content_distance_m > 0.0) {
            return Err(Error::domain("atrium content distance", self.content_distance_m));
        }
        Ok(())
    }

    pub fn has_greenery(&self) -> bool {
        self.features
            .iter()
            .any(|f| GREENERY_TAGS.contains(&f.trim().to_ascii_lowercase().replace([' ', '-'], "_").as_str()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AlternativeStandard {
    Breeam,
    BreeamNor,
    BreeamNl,
    GreenGlobes,
    GreenStar,
    GreenStarNz,
}

impl AlternativeStandard {
    pub const ALL: [AlternativeStandard; 6] = [
        AlternativeStandard::Breeam,
        AlternativeStandard::BreeamNor,
        AlternativeStandard::BreeamNl,
        AlternativeStandard::GreenGlobes,
        AlternativeStandard::GreenStar,
        AlternativeStandard::GreenStarNz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlternativeStandard::Breeam => "BREEAM",
            AlternativeStandard::BreeamNor => "BREEAM NOR",
            AlternativeStandard::BreeamNl => "BREEAM NL",
            AlternativeStandard::GreenGlobes => "Green Globes",
            AlternativeStandard::GreenStar => "Green Star",
            AlternativeStandard::GreenStarNz => "Green Star NZ",
        }
    }
}

impl FromStr for AlternativeStandard {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = standard_key(s);
        Self::ALL
            .into_iter()
            .find(|a| standard_key(a.name()) == key)
            .ok_or_else(|| Error::UnknownStandard(s.to_string()))
    }
}

const BREEAM_ATRIUM_CITATION: &str =
    "BREEAM courtyard or atrium: visual content at least 10 m away, with greenery or plant containers";
const GREEN_GLOBES_CITATION: &str = "Green Globes: a view to the building exterior from all primary interior spaces";
const GREEN_STAR_CITATION: &str = "Green Star: atria at least 8 x 8 m in width and depth";
const GREEN_STAR_NZ_CITATION: &str = "Green Star NZ: atrium at least 8 m in width";

pub fn alternative_access_check(spec: &AtriumSpec, standard: AlternativeStandard) -> Result<ComplianceResult> {
    spec.validate()?;
    let (ok, citation) = match standard {
        AlternativeStandard::Breeam | AlternativeStandard::BreeamNor | AlternativeStandard::BreeamNl => {
            (spec.content_distance_m >= 10.0 && spec.has_greenery(), BREEAM_ATRIUM_CITATION)
        }
        AlternativeStandard::GreenGlobes => (spec.exterior_view_from_all_primary_spaces, GREEN_GLOBES_CITATION),
        AlternativeStandard::GreenStar => (
            spec.width_m >= 8.0 && spec.depth_m.is_some_and(|d| d >= 8.0),
            GREEN_STAR_CITATION,
        ),
        AlternativeStandard::GreenStarNz => (spec.width_m >= 8.0, GREEN_STAR_NZ_CITATION),
    };
    let mut row = ComplianceResult::new(standard.name(), "alternative view access", ok.into(), citation)
        .input("width_m", num(spec.width_m))
        .input("content_distance_m", num(spec.content_distance_m));
    if let Some(d) = spec.depth_m {
        row = row.input("depth_m", num(d));
    }
    Ok(row)
}

// ---------------------------------------------------------------------------
// Spatial-assessment credits

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Certification {
    Berde,
    BreeamUk2018,
    BreeamInternational,
    GreenBuildingIndex,
    GreenShip,
    GreenStarNz,
    Hqe2014,
    IgbcV3At75,
    IgbcV3At95,
    LeedCanada2009,
    LeedIndia2011,
    LeedV41,
    Estidama,
    WellV2Pilot,
    WellV2,
}

impl Certification {
    pub const ALL: [Certification; 15] = [
        Certification::Berde,
        Certification::BreeamUk2018,
        Certification::BreeamInternational,
        Certification::GreenBuildingIndex,
        Certification::GreenShip,
        Certification::GreenStarNz,
        Certification::Hqe2014,
        Certification::IgbcV3At75,
        Certification::IgbcV3At95,
        Certification::LeedCanada2009,
        Certification::LeedIndia2011,
        Certification::LeedV41,
        Certification::Estidama,
        Certification::WellV2Pilot,
        Certification::WellV2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Certification::Berde => "BERDE",
            Certification::BreeamUk2018 => "BREEAM UK 2018",
            Certification::BreeamInternational => "BREEAM International",
            Certification::GreenBuildingIndex => "Green Building Index",
            Certification::GreenShip => "GreenShip",
            Certification::GreenStarNz => "Green Star NZ",
            Certification::Hqe2014 => "HQE 2014",
            Certification::IgbcV3At75 => "IGBC V3 (75 %)",
            Certification::IgbcV3At95 => "IGBC V3 (95 %)",
            Certification::LeedCanada2009 => "LEED Canada 2009",
            Certification::LeedIndia2011 => "LEED India 2011",
            Certification::LeedV41 => "LEED v4.1",
            Certification::Estidama => "Estidama Pearl",
            Certification::WellV2Pilot => "WELL v2-pilot",
            Certification::WellV2 => "WELL v2",
        }
    }

    /// Floor-area percentages unlocking the first, second, third credit.
    pub fn thresholds_pct(self) -> &'static [f64] {
        match self {
            Certification::Berde => &[50.0, 75.0],
            Certification::BreeamUk2018 => &[95.0],
            Certification::BreeamInternational => &[80.0, 95.0],
            Certification::GreenBuildingIndex => &[60.0, 75.0],
            Certification::GreenShip => &[75.0],
            Certification::GreenStarNz => &[60.0, 90.0],
            Certification::Hqe2014 => &[30.0, 50.0, 75.0],
            Certification::IgbcV3At75 => &[75.0],
            Certification::IgbcV3At95 => &[95.0],
            Certification::LeedCanada2009 => &[90.0],
            Certification::LeedIndia2011 => &[90.0],
            Certification::LeedV41 => &[75.0],
            Certification::Estidama => &[75.0],
            Certification::WellV2Pilot => &[50.0],
            Certification::WellV2 => &[75.0],
        }
    }

    pub fn citation(self) -> &'static str {
        match self {
            Certification::Berde => "BERDE: credits at 50 / 75 % of floor area with direct outdoor views",
            Certification::BreeamUk2018 => "BREEAM UK 2018: 95 % of total floor area provides an adequate view out",
            Certification::BreeamInternational => "BREEAM International: credits at 80 / 95 % of floor area",
            Certification::GreenBuildingIndex => {
                "Green Building Index: credits at 60 / 75 %, direct lines of sight at 1.2 m from floor level"
            }
            Certification::GreenShip => "GreenShip: credit at 75 %, straight line path from viewing position",
            Certification::GreenStarNz => "Green Star NZ: credits at 60 / 90 % of floor area",
            Certification::Hqe2014 => "HQE 2014: credits at 30 / 50 / 75 % of floor area",
            Certification::IgbcV3At75 => "IGBC V3: credit at 75 %, direct line of sight at 2.1 m from floor level",
            Certification::IgbcV3At95 => "IGBC V3: credit at 95 %, direct line of sight at 2.1 m from floor level",
            Certification::LeedCanada2009 => "LEED Canada 2009: credit at 90 % of floor area",
            Certification::LeedIndia2011 => "LEED India 2011: credit at 90 % of floor area",
            Certification::LeedV41 => "LEED v4.1: credit at 75 % of floor area with unobstructed views",
            Certification::Estidama => "Estidama Pearl: credit at 75 % of floor area",
            Certification::WellV2Pilot => "WELL v2-pilot: 50 % of floor area",
            Certification::WellV2 => "WELL v2: 75 % of floor area",
        }
    }
}

impl FromStr for Certification {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = standard_key(s);
        let aliases: &[(&str, Certification)] = &[
            ("breeamuk", Certification::BreeamUk2018),
            ("gbi", Certification::GreenBuildingIndex),
            ("hqe", Certification::Hqe2014),
            ("igbcv375", Certification::IgbcV3At75),
            ("igbcv395", Certification::IgbcV3At95),
            ("leedcanada", Certification::LeedCanada2009),
            ("leedindia", Certification::LeedIndia2011),
            ("leed", Certification::LeedV41),
            ("estidamapearl", Certification::Estidama),
            ("pearl", Certification::Estidama),
            ("wellv2pilot", Certification::WellV2Pilot),
        ];
        Self::ALL
            .into_iter()
            .find(|c| standard_key(c.name()) == key)
            .or_else(|| aliases.iter().find(|(k, _)| *k == key).map(|(_, c)| *c))
            .ok_or_else(|| Error::UnknownStandard(s.to_string()))
    }
}

/// Number of spatial-assessment credits earned for a qualifying floor fraction.
pub fn spatial_credit(fraction: f64, certification: Certification) -> Result<u8> {
    let f = check_range("spatial fraction", fraction, 0.0, 1.0)?;
    let pct = f * 100.0;
    // tolerate percentages like 0.75 * 100 landing a hair under 75
    Ok(certification
        .thresholds_pct()
        .iter()
        .filter(|&&t| pct >= t - 1e-9)
        .count() as u8)
}

pub fn spatial_credit_row(fraction: f64, certification: Certification) -> Result<ComplianceResult> {
    let credits = spatial_credit(fraction, certification)?;
    let available = certification.thresholds_pct().len();
    Ok(ComplianceResult::new(
        certification.name(),
        "spatial assessment credits",
        Verdict::Level(format!("{credits}/{available}")),
        certification.citation(),
    )
    .input("fraction", num(fraction)))
}
