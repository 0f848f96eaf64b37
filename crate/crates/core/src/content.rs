//! View content sub-score: horizontal layers, content distance, movement and nature.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};

/// Weight carried by each layer (and by nature) when it is present.
pub const LAYER_WEIGHT: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Sky,
    Landscape,
    Ground,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Movement {
    #[default]
    None,
    /// Dynamic features within 6 m of the window.
    NearbyOnly,
    /// Dynamic features further than 6 m away.
    DistantOnly,
    Both,
}

/// Where the ground/landscape and landscape/sky boundaries fall, as fractions
/// of window height measured from the sill.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerBoundaries {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_landscape: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub landscape_sky: Option<f64>,
}

impl LayerBoundaries {
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> {
        [
            ("ground/landscape", self.ground_landscape),
            ("landscape/sky", self.landscape_sky),
        ]
        .into_iter()
        .filter_map(|(name, v)| v.map(|v| (name, v)))
    }
}

/// What a window shows, declared by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDescription {
    pub layers: BTreeSet<Layer>,
    #[serde(default)]
    pub nature_fraction: f64,
    pub content_distance_m: f64,
    /// Natural landscape scores full distance weight even when close.
    #[serde(default)]
    pub landscape_is_predominantly_natural: bool,
    #[serde(default)]
    pub movement: Movement,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layer_boundaries: Option<LayerBoundaries>,
}

impl SceneDescription {
    pub fn new(layers: &[Layer], content_distance_m: f64) -> Self {
        Self {
            layers: layers.iter().copied().collect(),
            nature_fraction: 0.0,
            content_distance_m,
            landscape_is_predominantly_natural: false,
            movement: Movement::None,
            layer_boundaries: None,
        }
    }

    pub fn with_nature(mut self, fraction: f64) -> Self {
        self.nature_fraction = fraction;
        self
    }

    pub fn with_movement(mut self, movement: Movement) -> Self {
        self.movement = movement;
        self
    }

    pub fn natural_landscape(mut self, natural: bool) -> Self {
        self.landscape_is_predominantly_natural = natural;
        self
    }

    pub fn has(&self, layer: Layer) -> bool {
        self.layers.contains(&layer)
    }

    pub fn has_nature(&self) -> bool {
        self.nature_fraction > 0.0
    }

    pub fn validate(&self) -> Result<()> {
        check_range("nature_fraction", self.nature_fraction, 0.0, 1.0)?;
        if !self.content_distance_m.is_finite() || self.content_distance_m < 0.0 {
            return Err(Error::domain("content_distance_m", self.content_distance_m));
        }
        if self.has_nature() && self.layers.is_empty() {
            return Err(Error::domain("nature_fraction (scene has no layers)", self.nature_fraction));
        }
        if let Some(b) = &self.layer_boundaries {
            for (_, v) in b.iter() {
                check_range("layer boundary fraction", v, 0.0, 1.0)?;
            }
        }
        Ok(())
    }
}

/// Per-term contributions to the content score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContentBreakdown {
    pub sky: f64,
    pub landscape: f64,
    pub ground: f64,
    pub nature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContentScore {
    pub value: f64,
    pub breakdown: ContentBreakdown,
}

pub fn layer_weight(present: bool) -> f64 {
    if present {
        LAYER_WEIGHT
    } else {
        0.0
    }
}

/// Distance weighting applied to the landscape layer.
///
/// Bands are upper-inclusive: 6 m scores 0 and 20 m scores 0.5.
pub fn wf_content_distance(distance_m: f64, predominantly_natural: bool) -> Result<f64> {
    if distance_m.is_nan() || distance_m < 0.0 {
        return Err(Error::domain("content distance", distance_m));
    }
    if predominantly_natural {
        return Ok(1.0);
    }
    Ok(if distance_m <= 6.0 {
        0.0
    } else if distance_m <= 20.0 {
        0.5
    } else if distance_m <= 50.0 {
        0.75
    } else {
        1.0
    })
}

/// Movement weighting applied to the ground layer.
pub fn wf_movement(movement: Movement) -> f64 {
    match movement {
        Movement::DistantOnly => 1.0,
        Movement::None => 0.5,
        // nearby movement distracts; it also dominates the mixed case
        Movement::NearbyOnly | Movement::Both => 0.0,
    }
}

pub fn wf_nature(nature_fraction: f64) -> Result<f64> {
    let f = check_range("nature fraction", nature_fraction, 0.0, 1.0)?;
    Ok(if f == 0.0 {
        0.0
    } else if f <= 0.25 {
        0.5
    } else if f <= 0.5 {
        0.75
    } else {
        1.0
    })
}

pub fn v_content(scene: &SceneDescription) -> Result<ContentScore> {
    scene.validate()?;
    let breakdown = ContentBreakdown {
        sky: layer_weight(scene.has(Layer::Sky)),
        landscape: layer_weight(scene.has(Layer::Landscape))
            * wf_content_distance(
                scene.content_distance_m,
                scene.landscape_is_predominantly_natural,
            )?,
        ground: layer_weight(scene.has(Layer::Ground)) * wf_movement(scene.movement),
        nature: layer_weight(scene.has_nature()) * wf_nature(scene.nature_fraction)?,
    };
    let value = breakdown.sky + breakdown.landscape + breakdown.ground + breakdown.nature;
    Ok(ContentScore { value, breakdown })
}
