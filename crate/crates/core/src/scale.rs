/// Maps a measured quantity onto the shared 0 / 0.5..1 scoring scale.
///
/// Below `min` scores 0, exactly `min` scores 0.5, anything at or above
/// `saturation` scores 1, and values in between rise linearly from 0.5 to 1.
pub fn knee_score(x: f64, min: f64, saturation: f64) -> f64 {
    if x < min {
        0.0
    } else if x >= saturation {
        1.0
    } else {
        0.5 + 0.5 * (x - min) / (saturation - min)
    }
}

#[cfg(test)]
mod tests {
    use super::knee_score;

    #[test]
    fn knots() {
        assert_eq!(knee_score(14.0, 14.0, 54.0), 0.5);
        assert_eq!(knee_score(54.0, 14.0, 54.0), 1.0);
        assert_eq!(knee_score(90.0, 14.0, 54.0), 1.0);
        assert_eq!(knee_score(13.999, 14.0, 54.0), 0.0);
        assert_eq!(knee_score(34.0, 14.0, 54.0), 0.75);
    }
}
