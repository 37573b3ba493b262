use std::f64::consts::PI;

use num_complex::Complex64;

use super::kernel::lorentzian_kernel_amplitude;
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Two-exponential decomposition `G(s) = A₁e^{Φ₁s} + A₂e^{Φ₂s}` of the
/// single-level Green's function for a Lorentzian continuum with
/// unbounded band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePhase {
    pub a1: Complex64,
    pub a2: Complex64,
    pub phi1_rate: Complex64,
    pub phi2_rate: Complex64,
    /// Modulus of the branch root `R`, i.e. `|R²|^{1/2}`.
    pub c_mag: f64,
    /// Argument of `R²` in `(−π, π]`.
    pub theta: f64,
    pub e_minus: f64,
    pub e_plus: f64,
    pub v: f64,
    pub w: f64,
}

impl AmplitudePhase {
    /// Branch root `R = C·e^{iθ/2}`.
    pub fn root(&self) -> Complex64 {
        Complex64::from_polar(self.c_mag, 0.5 * self.theta)
    }

    /// Green's function at elapsed time `s`.
    pub fn green(&self, s: f64) -> Complex64 {
        if s == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        self.a1 * (self.phi1_rate * s).exp() + self.a2 * (self.phi2_rate * s).exp()
    }

    /// Decay criterion `W > C` used when classifying sweep rows.
    pub fn decays(&self) -> bool {
        self.w > self.c_mag
    }
}

/// Squared discriminant `(E₋−iV)² + 4κ` with the kernel amplitude `κ`.
pub(crate) fn discriminant(e_minus: f64, v: f64, j1: f64, gamma: f64) -> Complex64 {
    let base = Complex64::new(e_minus, -v);
    base * base + 4.0 * lorentzian_kernel_amplitude(j1, gamma)
}

/// `J₁` at which the discriminant vanishes for the given level, if any.
pub fn critical_j1(e_minus: f64, v: f64, gamma: f64) -> Option<f64> {
    if e_minus * v != 0.0 {
        return None;
    }
    // 4κ = 2J₁Γ must cancel E₋² − V²
    let j1 = (v * v - e_minus * e_minus) / (4.0 * lorentzian_kernel_amplitude(1.0, gamma));
    (j1 >= 0.0).then_some(j1)
}

pub fn amplitude_phase(
    es_level: f64,
    j0: f64,
    j1: f64,
    e0: f64,
    gamma: f64,
) -> Result<AmplitudePhase> {
    for (name, x) in [("es", es_level), ("j0", j0), ("j1", j1), ("e0", e0), ("gamma", gamma)] {
        if !x.is_finite() {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("must be finite, got {x}"),
            });
        }
    }
    if gamma <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("must be > 0, got {gamma}"),
        });
    }
    if j0 < 0.0 || j1 < 0.0 {
        return Err(Error::InvalidParameter {
            name: "j1",
            reason: "spectral strengths must be >= 0".into(),
        });
    }
    let e_minus = es_level - e0;
    let e_plus = es_level + e0;
    let v = j0 - gamma;
    let w = j0 + gamma;

    let d = discriminant(e_minus, v, j1, gamma);
    let scale = e_minus * e_minus + v * v + 4.0 * lorentzian_kernel_amplitude(j1, gamma);
    if d.norm() <= 1e-14 * scale || scale == 0.0 {
        return Err(Error::BranchSingularity {
            critical_j1: critical_j1(e_minus, v, gamma).unwrap_or(j1),
        });
    }

    let mut theta = d.im.atan2(d.re);
    if theta <= -PI {
        theta = PI;
    }
    let c_mag = d.norm().sqrt();
    let base = Complex64::new(e_minus, -v);
    let root = if j1 == 0.0 {
        // exact principal root of a perfect square
        if base.re > 0.0 || (base.re == 0.0 && base.im > 0.0) {
            base
        } else {
            -base
        }
    } else {
        Complex64::from_polar(c_mag, 0.5 * theta)
    };

    let a1 = 0.5 * (1.0 + base / root);
    let a2 = 1.0 - a1;
    let shift = Complex64::new(e_plus, -w);
    let phi1_rate = -0.5 * I * (shift + root);
    let phi2_rate = -0.5 * I * (shift - root);
    Ok(AmplitudePhase {
        a1,
        a2,
        phi1_rate,
        phi2_rate,
        c_mag,
        theta,
        e_minus,
        e_plus,
        v,
        w,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverRow {
    pub j1: f64,
    pub abs_a1: f64,
    pub abs_a2: f64,
    pub phi1_rate: Complex64,
    pub phi2_rate: Complex64,
    pub decay_flag: bool,
}

/// Evaluates the decomposition along a list of resonance strengths.
pub fn crossover_sweep(
    es_level: f64,
    j0: f64,
    e0: f64,
    gamma: f64,
    j1_values: &[f64],
) -> Result<Vec<CrossoverRow>> {
    if j1_values.is_empty() {
        return Err(Error::InvalidParameter {
            name: "j1_values",
            reason: "sweep needs at least one value".into(),
        });
    }
    j1_values
        .iter()
        .map(|&j1| {
            let ap = amplitude_phase(es_level, j0, j1, e0, gamma)?;
            Ok(CrossoverRow {
                j1,
                abs_a1: ap.a1.norm(),
                abs_a2: ap.a2.norm(),
                phi1_rate: ap.phi1_rate,
                phi2_rate: ap.phi2_rate,
                decay_flag: ap.decays(),
            })
        })
        .collect()
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|k| {
                    if k + 1 == n {
                        hi
                    } else {
                        (a + (b - a) * k as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_strength_endpoint_is_exact() {
        let ap = amplitude_phase(1.0, 0.1, 0.0, 0.4, 0.3).unwrap();
        assert_eq!(ap.a1, Complex64::new(1.0, 0.0));
        assert_eq!(ap.a2, Complex64::new(0.0, 0.0));
        // a single Markovian exponential survives
        let eps = Complex64::new(1.0, -0.1);
        assert!((ap.phi1_rate - (-I * eps)).norm() < 1e-15);
    }

    #[test]
    fn zero_strength_below_resonance_swaps_roles() {
        let ap = amplitude_phase(0.2, 0.1, 0.0, 0.4, 0.3).unwrap();
        assert_eq!(ap.a1, Complex64::new(0.0, 0.0));
        assert_eq!(ap.a2, Complex64::new(1.0, 0.0));
        let g = ap.green(3.0);
        let exact = (Complex64::new(0.2, -0.1) * (-I * 3.0)).exp();
        assert!((g - exact).norm() < 1e-14);
    }

    #[test]
    fn modulus_identity_at_zero_strength() {
        let (em, v) = (0.6f64, -0.2f64);
        let ap = amplitude_phase(em + 1.0, v + 0.5, 0.0, 1.0, 0.5).unwrap();
        assert!((ap.c_mag - (em * em + v * v).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn strong_resonance_splits_evenly() {
        let (e, j0, e0, g) = (1.0f64, 0.1f64, 0.7, 0.3f64);
        let scale = (e - e0).abs().max((j0 - g).abs()).max(g);
        let ap = amplitude_phase(e, j0, 1e6 * scale, e0, g).unwrap();
        assert!((ap.a1.norm() - 0.5).abs() < 1e-2);
        assert!((ap.a2.norm() - 0.5).abs() < 1e-2);
    }

    #[test]
    fn phase_rate_sum_is_independent_of_strength() {
        let rows = crossover_sweep(1.0, 0.2, 0.5, 0.4, &logspace(1e-4, 1e4, 30)).unwrap();
        for r in &rows {
            assert!(((r.phi1_rate + r.phi2_rate).re + (0.2 + 0.4)).abs() < 1e-10);
            assert!(r.abs_a1 + r.abs_a2 >= 1.0 - 1e-15);
        }
    }

    #[test]
    fn theta_in_half_open_interval_and_root_consistent() {
        for &(e, j0, j1, e0, g) in &[
            (1.0, 0.1, 0.5, 0.7, 0.3),
            (-2.0, 0.9, 0.1, 1.0, 0.2),
            (0.0, 0.0, 0.01, 1.0, 0.1),
            (1.0, 0.3, 0.0, 2.0, 0.3),
        ] {
            let ap = amplitude_phase(e, j0, j1, e0, g).unwrap();
            assert!(ap.theta > -PI && ap.theta <= PI);
            let d = discriminant(ap.e_minus, ap.v, j1, g);
            assert!((ap.root() * ap.root() - d).norm() < 1e-12 * d.norm().max(1.0));
            assert!((ap.a1 + ap.a2 - 1.0).norm() <= 2.0 * f64::EPSILON);
            // phases rewritten through C and θ/2
            let (c, s) = ((0.5 * ap.theta).cos(), (0.5 * ap.theta).sin());
            let phi1 = -0.5 * I * Complex64::new(ap.e_plus + ap.c_mag * c, -(ap.w - ap.c_mag * s));
            let phi2 = -0.5 * I * Complex64::new(ap.e_plus - ap.c_mag * c, -(ap.w + ap.c_mag * s));
            assert!((phi1 - ap.phi1_rate).norm() < 1e-12);
            assert!((phi2 - ap.phi2_rate).norm() < 1e-12);
        }
    }

    #[test]
    fn branch_point_reports_critical_strength() {
        // E₋ = 0, V = J₀ − Γ = −0.2: discriminant vanishes at J₁ = V²/(2Γ)
        let (j0, g) = (0.1, 0.3);
        let jc = 0.04 / (2.0 * g);
        match amplitude_phase(1.0, j0, jc, 1.0, g) {
            Err(Error::BranchSingularity { critical_j1 }) => assert!((critical_j1 - jc).abs() < 1e-15),
            other => panic!("expected singularity, got {other:?}"),
        }
        assert!(amplitude_phase(1.0, j0, 2.0 * jc, 1.0, g).is_ok());
    }

    #[test]
    fn green_starts_at_one() {
        let ap = amplitude_phase(1.0, 0.2, 0.8, 0.9, 0.4).unwrap();
        assert_eq!(ap.green(0.0), Complex64::new(1.0, 0.0));
        assert!((ap.green(1e-9) - 1.0).norm() < 1e-8);
    }

    #[test]
    fn logspace_endpoints() {
        let v = logspace(1e-3, 1e3, 7);
        assert_eq!(v.len(), 7);
        assert!((v[0] - 1e-3).abs() < 1e-18);
        assert_eq!(v[6], 1e3);
        assert!((v[3] - 1.0).abs() < 1e-12);
        assert!(logspace(1.0, 2.0, 0).is_empty());
    }
}
