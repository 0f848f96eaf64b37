use serde::{Deserialize, Serialize};

use crate::content::{Layer, SceneDescription};
use crate::error::{Error, Result};
use crate::geometry::{Segment, Vec2, Vec3};
use crate::scale::knee_score;

/// Seated eye height used when none is given.
pub const DEFAULT_EYE_HEIGHT_M: f64 = 1.2;

const ORTHO_TOL: f64 = 1e-9;
const PLANE_TOL: f64 = 1e-9;

/// A rectangular view opening on a wall.
///
/// The glazed area spans `origin + s*u + h*v` for `s` in `[0, width]` and
/// `h` in `[sill_height, head_height]`. `origin` usually sits at floor level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowRect {
    pub origin: Vec3,
    pub u: Vec3,
    pub v: Vec3,
    pub normal: Vec3,
    pub width: f64,
    pub sill_height: f64,
    pub head_height: f64,
}

impl WindowRect {
    pub fn new(
        origin: Vec3,
        u: Vec3,
        v: Vec3,
        normal: Vec3,
        width: f64,
        sill_height: f64,
        head_height: f64,
    ) -> Result<Self> {
        let w = Self {
            origin,
            u,
            v,
            normal,
            width,
            sill_height,
            head_height,
        };
        w.validate()?;
        Ok(w)
    }

    /// Window on a vertical wall running from `start` to `end` in plan, with
    /// the outward normal on the right-hand side of the direction of travel
    /// when `outward_right` is true.
    pub fn on_wall(
        start: Vec2,
        end: Vec2,
        sill_height: f64,
        head_height: f64,
        outward_right: bool,
    ) -> Result<Self> {
        let run = end - start;
        let width = run.norm();
        if !(width > 0.0) {
            return Err(Error::DegenerateGeometry("window has zero width".into()));
        }
        let dir = run.normalized();
        let right = Vec2::new(dir.y, -dir.x);
        let n = if outward_right { right } else { -right };
        Self::new(
            start.extend(0.0),
            dir.extend(0.0),
            Vec3::UP,
            n.extend(0.0),
            width,
            sill_height,
            head_height,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) || !self.width.is_finite() {
            return Err(Error::domain("window width", self.width));
        }
        if !(self.sill_height >= 0.0) {
            return Err(Error::domain("sill height", self.sill_height));
        }
        if !(self.head_height > self.sill_height) || !self.head_height.is_finite() {
            return Err(Error::domain("head height", self.head_height));
        }
        let unit = |v: Vec3| (v.norm() - 1.0).abs() <= ORTHO_TOL;
        if !(unit(self.u) && unit(self.v) && unit(self.normal)) {
            return Err(Error::DegenerateGeometry(
                "window axes must be unit vectors".into(),
            ));
        }
        if self.u.dot(self.v).abs() > ORTHO_TOL
            || self.u.dot(self.normal).abs() > ORTHO_TOL
            || self.v.dot(self.normal).abs() > ORTHO_TOL
        {
            return Err(Error::DegenerateGeometry(
                "window axes must be mutually orthogonal".into(),
            ));
        }
        Ok(())
    }

    pub fn height(&self) -> f64 {
        self.head_height - self.sill_height
    }

    pub fn area(&self) -> f64 {
        self.width * self.height()
    }

    pub fn center(&self) -> Vec3 {
        self.origin + self.u * (0.5 * self.width) + self.v * (0.5 * (self.sill_height + self.head_height))
    }

    /// Point on the glazing at local coordinates `(s, h)`.
    pub fn point(&self, s: f64, h: f64) -> Vec3 {
        self.origin + self.u * s + self.v * h
    }

    /// True when `v` is vertical, so the window has a plan footprint.
    pub fn is_on_vertical_wall(&self) -> bool {
        (self.v.dot(Vec3::UP) - 1.0).abs() <= ORTHO_TOL
    }

    /// Plan footprint of the glazing.
    pub fn plan_segment(&self) -> Segment {
        Segment::new(self.origin.xy(), (self.origin + self.u * self.width).xy())
    }

    pub fn plan_normal(&self) -> Vec2 {
        self.normal.xy().normalized()
    }

    /// Coordinates of `eye` in the window frame: along `u`, along `v`, and depth
    /// on the interior side of the glazing plane.
    fn local(&self, eye: Vec3) -> (f64, f64, f64) {
        let rel = eye - self.origin;
        (rel.dot(self.u), rel.dot(self.v), -rel.dot(self.normal))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observer {
    pub position: Vec2,
    #[serde(default = "default_eye_height")]
    pub eye_height: f64,
}

fn default_eye_height() -> f64 {
    DEFAULT_EYE_HEIGHT_M
}

impl Observer {
    pub fn seated(position: Vec2) -> Self {
        Self {
            position,
            eye_height: DEFAULT_EYE_HEIGHT_M,
        }
    }

    pub fn eye(&self) -> Vec3 {
        self.position.extend(self.eye_height)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eye_height > 0.0) || !self.eye_height.is_finite() {
            return Err(Error::domain("eye height", self.eye_height));
        }
        if !self.position.x.is_finite() || !self.position.y.is_finite() {
            return Err(Error::DegenerateGeometry("observer position is not finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ViewAngles {
    pub horizontal_deg: f64,
    pub vertical_deg: f64,
    pub smaller_deg: f64,
    pub solid_angle_sr: f64,
}

impl ViewAngles {
    pub fn along(&self, basis: AngleBasis) -> f64 {
        match basis {
            AngleBasis::Horizontal => self.horizontal_deg,
            AngleBasis::Vertical => self.vertical_deg,
            AngleBasis::Smaller => self.smaller_deg,
        }
    }
}

pub fn view_angles(observer: &Observer, window: &WindowRect) -> Result<ViewAngles> {
    view_angles_from_eye(observer.eye(), window)
}

/// View angles subtended by `window` at an arbitrary eye point.
///
/// The horizontal angle is measured between the two jamb edges in the plane
/// spanned by the window's horizontal axis and normal; the vertical angle
/// between sill and head in the plane through the eye and the window's centre
/// line.
pub fn view_angles_from_eye(eye: Vec3, window: &WindowRect) -> Result<ViewAngles> {
    let (a, b, d) = window.local(eye);
    let scale = 1.0 + window.width.max(window.head_height).max(a.abs()).max(b.abs());
    if d.abs() <= PLANE_TOL * scale {
        return Err(Error::DegenerateGeometry(
            "observer lies in the window plane".into(),
        ));
    }
    if d < 0.0 {
        return Err(Error::DegenerateGeometry(
            "observer is on the exterior side of the window".into(),
        ));
    }
    let w = window.width;
    let horizontal = ((w - a) / d).atan() + (a / d).atan();
    let lateral = 0.5 * w - a;
    let reach = d.hypot(lateral);
    let vertical = ((window.head_height - b) / reach).atan() - ((window.sill_height - b) / reach).atan();

    let solid = rect_solid_angle(-a, w - a, window.sill_height - b, window.head_height - b, d);

    let horizontal_deg = horizontal.to_degrees();
    let vertical_deg = vertical.to_degrees();
    Ok(ViewAngles {
        horizontal_deg,
        vertical_deg,
        smaller_deg: horizontal_deg.min(vertical_deg),
        solid_angle_sr: solid,
    })
}

/// Solid angle of the axis-aligned rectangle `[x0, x1] x [y0, y1]` lying in a
/// plane at distance `d` from the eye, coordinates taken from the foot of the
/// perpendicular.
fn rect_solid_angle(x0: f64, x1: f64, y0: f64, y1: f64, d: f64) -> f64 {
    let corner = |x: f64, y: f64| (x * y / (d * (d * d + x * x + y * y).sqrt())).atan();
    corner(x1, y1) - corner(x0, y1) - corner(x1, y0) + corner(x0, y0)
}

/// Which view angle a threshold applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleBasis {
    Horizontal,
    Vertical,
    Smaller,
}

impl AngleBasis {
    pub fn as_str(self) -> &'static str {
        match self {
            AngleBasis::Horizontal => "horizontal",
            AngleBasis::Vertical => "vertical",
            AngleBasis::Smaller => "smaller",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccessThresholds {
    pub alpha_min_deg: f64,
    /// Missing for the sky-or-ground row, which publishes no saturation angle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_saturation_deg: Option<f64>,
    pub basis: AngleBasis,
}

impl AccessThresholds {
    pub fn new(alpha_min_deg: f64, alpha_saturation_deg: f64, basis: AngleBasis) -> Result<Self> {
        let t = Self {
            alpha_min_deg,
            alpha_saturation_deg: Some(alpha_saturation_deg),
            basis,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_min_deg > 0.0 && self.alpha_min_deg < 180.0) {
            return Err(Error::domain("alpha_min_deg", self.alpha_min_deg));
        }
        if let Some(sat) = self.alpha_saturation_deg {
            if !(sat > self.alpha_min_deg && sat <= 180.0) {
                return Err(Error::domain("alpha_saturation_deg", sat));
            }
        }
        Ok(())
    }

    pub fn with_saturation(mut self, saturation_deg: f64) -> Result<Self> {
        self.alpha_saturation_deg = Some(saturation_deg);
        self.validate()?;
        Ok(self)
    }
}

/// Content categories that carry published view-angle thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContentClass {
    SkyOrGroundOnly,
    LandscapeNoNature,
    LandscapeWithNature,
    LandscapeWithSkyOrGround,
}

impl ContentClass {
    /// Picks the row that describes a scene. Landscape with sky or ground takes
    /// precedence over the nature rows; `None` for a scene with no layers.
    pub fn of_scene(scene: &SceneDescription) -> Option<Self> {
        let sky_or_ground = scene.has(Layer::Sky) || scene.has(Layer::Ground);
        if !scene.has(Layer::Landscape) {
            return sky_or_ground.then_some(ContentClass::SkyOrGroundOnly);
        }
        Some(if sky_or_ground {
            ContentClass::LandscapeWithSkyOrGround
        } else if scene.has_nature() {
            ContentClass::LandscapeWithNature
        } else {
            ContentClass::LandscapeNoNature
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ContentClass::SkyOrGroundOnly => "sky_or_ground_only",
            ContentClass::LandscapeNoNature => "landscape_no_nature",
            ContentClass::LandscapeWithNature => "landscape_with_nature",
            ContentClass::LandscapeWithSkyOrGround => "landscape_with_sky_or_ground",
        }
    }
}

pub fn thresholds_for_content(class: ContentClass) -> AccessThresholds {
    let (min, sat, basis) = match class {
        ContentClass::SkyOrGroundOnly => (30.0, None, AngleBasis::Vertical),
        ContentClass::LandscapeNoNature => (11.0, Some(90.0), AngleBasis::Smaller),
        ContentClass::LandscapeWithNature => (9.0, Some(50.0), AngleBasis::Smaller),
        ContentClass::LandscapeWithSkyOrGround => (14.0, Some(54.0), AngleBasis::Horizontal),
    };
    AccessThresholds {
        alpha_min_deg: min,
        alpha_saturation_deg: sat,
        basis,
    }
}

pub fn v_access(alpha_view_deg: f64, thresholds: &AccessThresholds) -> Result<f64> {
    if alpha_view_deg.is_nan() || alpha_view_deg < 0.0 {
        return Err(Error::domain("view angle", alpha_view_deg));
    }
    let sat = thresholds.alpha_saturation_deg.ok_or_else(|| {
        Error::ConfigurationRequired(format!(
            "no saturation angle for the {} {}° threshold; supply alpha_saturation_deg",
            thresholds.basis.as_str(),
            thresholds.alpha_min_deg
        ))
    })?;
    Ok(knee_score(alpha_view_deg, thresholds.alpha_min_deg, sat))
}

/// 1..5 rating from the smaller view angle, bumped one step for nature views
/// in the transitional bands.
pub fn view_factor(smaller_angle_deg: f64, nature_view: bool) -> Result<u8> {
    let a = smaller_angle_deg;
    if a.is_nan() || a <= 0.0 || a > 90.0 {
        return Err(Error::domain("view factor angle", a));
    }
    let bump = u8::from(nature_view);
    Ok(if a < 4.0 {
        1
    } else if a < 9.0 {
        1 + bump
    } else if a < 11.0 {
        2 + bump
    } else if a < 15.0 {
        3
    } else if a < 20.0 {
        3 + bump
    } else if a < 40.0 {
        4
    } else if a < 50.0 {
        4 + bump
    } else {
        5
    })
}
