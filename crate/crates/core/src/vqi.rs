//! View Quality Index: product of the three sub-scores, optional weights, and labels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};

/// Allowed distance of the weight product from 1.
pub const WEIGHT_PRODUCT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    Insufficient,
    Sufficient,
    Good,
    Excellent,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Insufficient => "Insufficient",
            Label::Sufficient => "Sufficient",
            Label::Good => "Good",
            Label::Excellent => "Excellent",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// Lower bounds are inclusive: 0.125 is Sufficient, 0.375 Good, 0.75 Excellent.
pub fn label(value: f64) -> Label {
    if value >= 0.75 {
        Label::Excellent
    } else if value >= 0.375 {
        Label::Good
    } else if value >= 0.125 {
        Label::Sufficient
    } else {
        Label::Insufficient
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub content: f64,
    pub access: f64,
    pub clarity: f64,
}

impl Weights {
    pub const NEUTRAL: Weights = Weights {
        content: 1.0,
        access: 1.0,
        clarity: 1.0,
    };

    pub fn new(content: f64, access: f64, clarity: f64) -> Result<Self> {
        let w = Self { content, access, clarity };
        w.validate()?;
        Ok(w)
    }

    pub fn product(&self) -> f64 {
        self.content * self.access * self.clarity
    }

    pub fn is_neutral(&self) -> bool {
        *self == Self::NEUTRAL
    }

    pub fn validate(&self) -> Result<()> {
        for k in [self.content, self.access, self.clarity] {
            if !(k > 0.0) || !k.is_finite() {
                return Err(Error::domain("weight", k));
            }
        }
        let product = self.product();
        if (product - 1.0).abs() > WEIGHT_PRODUCT_TOL {
            return Err(Error::WeightProduct { product });
        }
        Ok(())
    }
}

impl Default for Weights {
    fn default() -> Self {
        Self::NEUTRAL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VqiScore {
    pub v_content: f64,
    pub v_access: f64,
    pub v_clarity: f64,
    pub weights: Weights,
    /// Weighted product before clamping. Since the weights multiply to 1 this
    /// only leaves `[0, 1]` through rounding, but it is kept for reporting.
    pub raw_value: f64,
    pub value: f64,
    pub label: Label,
}

pub fn vqi(content: f64, access: f64, clarity: f64) -> Result<VqiScore> {
    vqi_weighted([content, access, clarity], Weights::NEUTRAL)
}

pub fn vqi_weighted(scores: [f64; 3], weights: Weights) -> Result<VqiScore> {
    let [c, a, cl] = scores;
    check_range("v_content", c, 0.0, 1.0)?;
    check_range("v_access", a, 0.0, 1.0)?;
    check_range("v_clarity", cl, 0.0, 1.0)?;
    weights.validate()?;
    let raw_value = (weights.content * c) * (weights.access * a) * (weights.clarity * cl);
    let value = raw_value.clamp(0.0, 1.0);
    Ok(VqiScore {
        v_content: c,
        v_access: a,
        v_clarity: cl,
        weights,
        raw_value,
        value,
        label: label(value),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_and_labels() {
        let s = vqi(1.0, 1.0, 1.0).unwrap();
        assert_eq!((s.value, s.label), (1.0, Label::Excellent));
        let s = vqi(0.9, 0.0, 0.9).unwrap();
        assert_eq!((s.value, s.label), (0.0, Label::Insufficient));
        let s = vqi(0.875, 0.75, 0.6).unwrap();
        assert!((s.value - 0.39375).abs() < 1e-15);
        assert_eq!(s.label, Label::Good);
        assert!(vqi(1.1, 1.0, 1.0).is_err());
        assert!(vqi(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn label_boundaries() {
        assert_eq!(label(0.75), Label::Excellent);
        assert_eq!(label(0.5), Label::Good);
        assert_eq!(label(0.124), Label::Insufficient);
        assert_eq!(label(0.125), Label::Sufficient);
        assert_eq!(label(0.375), Label::Good);
        assert_eq!(label(0.374999), Label::Sufficient);
    }

    #[test]
    fn weights() {
        let half = 0.5f64.sqrt();
        assert!(Weights::new(2.0, half, half).is_ok());
        match Weights::new(2.0, 1.0, 1.0) {
            Err(Error::WeightProduct { product }) => assert_eq!(product, 2.0),
            other => panic!("{other:?}"),
        }
        assert!(Weights::new(-1.0, -1.0, 1.0).is_err());
        let s = vqi_weighted([1.0, 1.0, 1.0], Weights::new(2.0, half, half).unwrap()).unwrap();
        assert!(s.raw_value <= 1.0 + 1e-9);
        let s = vqi_weighted([1.0, 0.9, 0.9], Weights::new(2.0, 0.5, 1.0).unwrap()).unwrap();
        assert!((s.raw_value - 0.81).abs() < 1e-12);
    }

    #[test]
    fn product_one_weights_only_rescale_rounding() {
        // with prod(k) = 1 the weighted product equals the plain product
        let half = 0.5f64.sqrt();
        let w = Weights::new(2.0, half, half).unwrap();
        for v in [[1.0, 1.0, 1.0], [0.875, 0.75, 0.6], [0.5, 0.2, 0.9]] {
            let weighted = vqi_weighted(v, w).unwrap();
            let plain = vqi(v[0], v[1], v[2]).unwrap();
            assert!((weighted.raw_value - plain.value).abs() <= 1e-9);
            assert!(weighted.value <= 1.0);
        }
    }
}
