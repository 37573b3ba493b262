use crate::error::{Error, Result};

/// Uniform time grid on `[t0, t1]` with `steps` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    t1: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, steps: usize) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite()) || t1 <= t0 {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: format!("need finite t1 > t0, got [{t0}, {t1}]"),
            });
        }
        if steps < 2 {
            return Err(Error::InvalidParameter {
                name: "steps",
                reason: format!("need at least 2 steps, got {steps}"),
            });
        }
        Ok(Self { t0, t1, steps })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step(&self) -> f64 {
        (self.t1 - self.t0) / self.steps as f64
    }

    /// Number of grid points, `steps + 1`.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps {
            self.t1
        } else {
            self.t0 + k as f64 * self.step()
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|k| self.time(k))
    }
}

/// Finite-difference derivative of samples on a uniform grid: centred in the
/// interior, one-sided at both ends.
pub fn finite_difference(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|k| {
            if k == 0 {
                (values[1] - values[0]) / h
            } else if k == n - 1 {
                (values[n - 1] - values[n - 2]) / h
            } else {
                (values[k + 1] - values[k - 1]) / (2.0 * h)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points_hit_both_ends() {
        let g = TimeGrid::new(0.0, 1.0, 3).unwrap();
        let ts: Vec<f64> = g.times().collect();
        assert_eq!(ts.len(), 4);
        assert_eq!(ts[0], 0.0);
        assert_eq!(ts[3], 1.0);
        assert!((g.step() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(1.0, 1.0, 10).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
        assert!(TimeGrid::new(0.0, f64::INFINITY, 10).is_err());
    }

    #[test]
    fn finite_difference_is_exact_on_quadratics_inside() {
        let h = 0.1;
        let v: Vec<f64> = (0..11).map(|k| (k as f64 * h).powi(2)).collect();
        let d = finite_difference(&v, h);
        for k in 1..10 {
            assert!((d[k] - 2.0 * k as f64 * h).abs() < 1e-12);
        }
    }
}
