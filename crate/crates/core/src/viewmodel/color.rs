use serde::{Serialize, Serializer};

use super::ViewError;
use crate::data::ExpressionMatrix;
use crate::scalar::Scalar;

pub const DEFAULT_CMAX: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Serialize for Rgb {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.0, self.1, self.2].serialize(serializer)
    }
}

/// Categorical palette for clusters and prior-label overlays.
pub const PALETTE: [Rgb; 12] = [
    Rgb(78, 121, 167),
    Rgb(242, 142, 43),
    Rgb(225, 87, 89),
    Rgb(118, 183, 178),
    Rgb(89, 161, 79),
    Rgb(237, 201, 72),
    Rgb(176, 122, 161),
    Rgb(255, 157, 167),
    Rgb(156, 117, 95),
    Rgb(186, 176, 172),
    Rgb(31, 119, 180),
    Rgb(148, 103, 189),
];

const YELLOW: Rgb = Rgb(255, 255, 0);
const BLUE: Rgb = Rgb(0, 0, 255);
const RED: Rgb = Rgb(255, 0, 0);

/// Blue → yellow → red scale, piecewise linear in RGB on each half, with
/// inputs clamped to `[-cmax, cmax]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergingScale {
    cmax: f64,
}

impl Default for DivergingScale {
    fn default() -> Self {
        Self { cmax: DEFAULT_CMAX }
    }
}

impl DivergingScale {
    /// Non-positive or non-finite `cmax` falls back to the default.
    pub fn new(cmax: f64) -> Self {
        if cmax.is_finite() && cmax > 0.0 {
            Self { cmax }
        } else {
            Self::default()
        }
    }

    pub fn cmax(&self) -> f64 {
        self.cmax
    }

    pub fn color<T: Scalar>(&self, value: T) -> Rgb {
        let v = value.to_f64_lossless();
        if v.is_nan() {
            return YELLOW;
        }
        let t = (v / self.cmax).clamp(-1.0, 1.0);
        let (from, to, f) = if t < 0.0 { (YELLOW, BLUE, -t) } else { (YELLOW, RED, t) };
        let lerp = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * f).round() as u8;
        Rgb(lerp(from.0, to.0), lerp(from.1, to.1), lerp(from.2, to.2))
    }
}

/// Colors each sample by the mean of its selected feature values.
pub fn point_colors<T: Scalar>(
    matrix: &ExpressionMatrix<T>,
    samples: &[usize],
    selected_features: &[usize],
    scale: &DivergingScale,
) -> Result<Vec<Rgb>, ViewError> {
    if selected_features.is_empty() {
        return Err(ViewError::NoFeatureSelected);
    }
    if let Some(&f) = selected_features.iter().find(|&&f| f >= matrix.n_features()) {
        return Err(ViewError::OutOfRange(f));
    }
    samples
        .iter()
        .map(|&s| {
            if s >= matrix.n_samples() {
                return Err(ViewError::OutOfRange(s));
            }
            let mean = crate::scalar::mean(selected_features.iter().map(|&f| matrix.value(s, f)));
            Ok(scale.color(mean))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_midpoint() {
        let s = DivergingScale::default();
        assert_eq!(s.color(0.0), YELLOW);
        assert_eq!(s.color(-3.0), BLUE);
        assert_eq!(s.color(3.0), RED);
        assert_eq!(s.color(1.5), Rgb(255, 128, 0));
        assert_eq!(s.color(-1.5), Rgb(128, 128, 128));
        assert_eq!(s.color(100.0), RED);
        assert_eq!(s.color(-1e9), BLUE);
    }

    #[test]
    fn monotone_per_channel() {
        let s = DivergingScale::new(2.0);
        let mut prev = s.color(-2.0);
        for i in 1..=200 {
            let v = -2.0 + i as f64 * 0.01;
            let c = s.color(v);
            if v <= 0.0 {
                assert!(c.0 >= prev.0 && c.1 >= prev.1 && c.2 <= prev.2);
            } else {
                assert!(c.0 == 255 && c.1 <= prev.1 && c.2 == 0);
            }
            prev = c;
        }
    }

    #[test]
    fn averaged_point_color() {
        let m = ExpressionMatrix::new(
            vec!["a".into()],
            vec!["x".into(), "y".into()],
            vec![vec![-3.0, 3.0]],
        )
        .unwrap();
        let s = DivergingScale::default();
        assert_eq!(point_colors(&m, &[0], &[0, 1], &s).unwrap(), vec![YELLOW]);
        assert_eq!(point_colors(&m, &[0], &[1], &s).unwrap(), vec![RED]);
        assert_eq!(point_colors(&m, &[0], &[], &s), Err(ViewError::NoFeatureSelected));
    }
}
