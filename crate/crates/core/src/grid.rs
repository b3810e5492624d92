//! Uniform sampling grids and grid integration.

use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Real};

/// Uniform one-dimensional grid `lo, lo + h, ..., hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid<F> {
    lo: F,
    hi: F,
    len: usize,
}

impl<F: Real> UniformGrid<F> {
    pub fn new(lo: F, hi: F, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {len}")));
        }
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::InvalidGrid(format!(
                "bounds must be finite and increasing, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi, len })
    }

    /// Grid on `[-half_span, half_span]`; exactly mirror-symmetric about 0.
    pub fn symmetric(half_span: F, len: usize) -> Result<Self> {
        Self::new(-half_span, half_span, len)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn lo(&self) -> F {
        self.lo
    }

    pub fn hi(&self) -> F {
        self.hi
    }

    pub fn step(&self) -> F {
        (self.hi - self.lo) / F::count(self.len - 1)
    }

    /// `i`-th grid point. Interpolating from both ends keeps a symmetric
    /// grid exactly symmetric: `point(i) == -point(len - 1 - i)`.
    pub fn point(&self, i: usize) -> F {
        let n = F::count(self.len - 1);
        (self.lo * F::count(self.len - 1 - i) + self.hi * F::count(i)) / n
    }

    pub fn points(&self) -> Vec<F> {
        (0..self.len).map(|i| self.point(i)).collect()
    }

    pub fn covers(&self, lo: F, hi: F) -> bool {
        self.lo <= lo && self.hi >= hi
    }

    /// Every other point, starting at the first; `None` below 3 points.
    pub fn coarsened(&self) -> Option<Self> {
        if self.len < 3 {
            return None;
        }
        let len = self.len.div_ceil(2);
        let hi = self.point(2 * (len - 1));
        Some(Self { lo: self.lo, hi, len })
    }

    /// Refined grid with twice the resolution on the same span.
    pub fn refined(&self) -> Self {
        Self {
            lo: self.lo,
            hi: self.hi,
            len: 2 * self.len - 1,
        }
    }

    /// Compensated trapezoid rule over sampled `values`.
    pub fn trapezoid(&self, values: &[F]) -> F {
        assert_eq!(values.len(), self.len, "sample count must match grid");
        let half = F::lit(0.5);
        let inner = compensated_sum(values[1..self.len - 1].iter().copied());
        self.step() * (inner + half * (values[0] + values[self.len - 1]))
    }
}

/// Spacing of a sampled time axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// Sample points from `min` to `max` inclusive; strictly increasing.
pub fn sample_points<F: Real>(min: F, max: F, count: usize, spacing: Spacing) -> Result<Vec<F>> {
    if count == 0 {
        return Err(Error::InvalidGrid("time grid must be nonempty".into()));
    }
    if count == 1 {
        if !min.is_finite() || min < F::zero() {
            return Err(Error::InvalidGrid(format!("invalid time {min}")));
        }
        return Ok(vec![min]);
    }
    if !(min.is_finite() && max.is_finite() && max > min) {
        return Err(Error::InvalidGrid(format!(
            "time grid bounds must be finite and increasing, got [{min}, {max}]"
        )));
    }
    let n = F::count(count - 1);
    let pts: Vec<F> = match spacing {
        Spacing::Linear => (0..count)
            .map(|i| (min * F::count(count - 1 - i) + max * F::count(i)) / n)
            .collect(),
        Spacing::Log => {
            if min <= F::zero() {
                return Err(Error::InvalidGrid("log-spaced grid needs min > 0".into()));
            }
            let (a, b) = (min.ln(), max.ln());
            let mut pts: Vec<F> = (0..count)
                .map(|i| ((a * F::count(count - 1 - i) + b * F::count(i)) / n).exp())
                .collect();
            // endpoints exactly as requested
            pts[0] = min;
            pts[count - 1] = max;
            pts
        }
    };
    if pts.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid("time grid not strictly increasing".into()));
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_grid_is_exactly_mirrored() {
        let g = UniformGrid::symmetric(5.0_f64, 2048).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.point(i), -g.point(g.len() - 1 - i));
        }
        assert_eq!(g.point(0), -5.0);
        assert_eq!(g.point(2047), 5.0);
    }

    #[test]
    fn trapezoid_integrates_gaussian_spectrally() {
        let g = UniformGrid::symmetric(10.0_f64, 201).unwrap();
        let vals: Vec<f64> = g
            .points()
            .iter()
            .map(|x| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt())
            .collect();
        assert!((g.trapezoid(&vals) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn coarsen_and_refine() {
        let g = UniformGrid::new(0.0_f64, 1.0, 5).unwrap();
        let c = g.coarsened().unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.step(), 0.5);
        let g = UniformGrid::new(0.0_f64, 1.0, 4).unwrap();
        let c = g.coarsened().unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.point(1), g.point(2));
        assert_eq!(g.refined().len(), 7);
        assert_eq!(g.refined().step() * 2.0, g.step());
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(UniformGrid::new(0.0_f64, 1.0, 1).is_err());
        assert!(UniformGrid::new(1.0_f64, 1.0, 5).is_err());
        assert!(sample_points(0.0_f64, 1.0, 0, Spacing::Linear).is_err());
        assert!(sample_points(0.0_f64, 1.0, 5, Spacing::Log).is_err());
        assert!(sample_points(2.0_f64, 1.0, 5, Spacing::Linear).is_err());
    }

    #[test]
    fn log_points_hit_endpoints() {
        let p = sample_points(1e-3_f64, 1e2, 400, Spacing::Log).unwrap();
        assert_eq!(p[0], 1e-3);
        assert_eq!(p[399], 1e2);
        assert!(p.windows(2).all(|w| w[1] > w[0]));
    }
}
