use num_complex::Complex64;

use super::density::SpectralDensity;
use super::kernel::memory_kernel;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::ComplexMatrix;

pub const CONVENTION_NOTE: &str = "G1 = i*G_retarded, G2 = -i*G_lesser";

/// Largest allowed `h·(max|e| + J₀ + J₁)`.
pub const STEP_GUARD_LIMIT: f64 = 0.1;

/// Which history feeds the source term of the lesser equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LesserSource {
    /// Conjugate transpose of the retarded solution, as the equation is
    /// written.
    #[default]
    Adjoint,
    /// The retarded solution itself. With a flat density this reproduces
    /// the closed form `J₀s·e^{−i(e−iJ₀)s}`.
    Retarded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreenProblem {
    pub es: Vec<f64>,
    pub density: SpectralDensity,
    pub grid: TimeGrid,
    pub lesser_source: LesserSource,
    /// Turn a violated step guard into an error instead of a report.
    pub strict: bool,
}

impl GreenProblem {
    pub fn new(es: Vec<f64>, density: SpectralDensity, grid: TimeGrid) -> Result<Self> {
        if es.is_empty() || es.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "es",
                reason: "level energies must be a nonempty list of finite numbers".into(),
            });
        }
        Ok(Self {
            es,
            density,
            grid,
            lesser_source: LesserSource::default(),
            strict: false,
        })
    }

    pub fn step_guard(&self) -> StepGuard {
        let emax = self.es.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        let product =
            self.grid.step() * (emax + self.density.background() + self.density.structured_peak());
        StepGuard {
            product,
            limit: STEP_GUARD_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepGuard {
    pub product: f64,
    pub limit: f64,
}

impl StepGuard {
    pub fn ok(&self) -> bool {
        self.product < self.limit
    }
}

/// Diagonal Green's matrices on a time grid. `g1[k]` and `g2[k]` belong to
/// `grid.time(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenSolution {
    pub grid: TimeGrid,
    pub g1: Vec<ComplexMatrix>,
    pub g2: Option<Vec<ComplexMatrix>>,
    pub convention_note: &'static str,
    /// Present for numerical solutions.
    pub step_guard: Option<StepGuard>,
}

impl GreenSolution {
    pub fn levels(&self) -> usize {
        self.g1[0].rows()
    }

    /// Time series of the retarded function for one level.
    pub fn g1_level(&self, level: usize) -> Vec<Complex64> {
        self.g1.iter().map(|m| m[(level, level)]).collect()
    }

    pub fn g2_level(&self, level: usize) -> Option<Vec<Complex64>> {
        self.g2
            .as_ref()
            .map(|g| g.iter().map(|m| m[(level, level)]).collect())
    }

    /// Largest entrywise deviation of the retarded series from another
    /// solution on the same grid.
    pub fn max_g1_diff(&self, other: &GreenSolution) -> Result<f64> {
        if self.g1.len() != other.g1.len() || self.levels() != other.levels() {
            return Err(Error::Shape(format!(
                "cannot compare solutions with {}x{} and {}x{} samples",
                self.g1.len(),
                self.levels(),
                other.g1.len(),
                other.levels()
            )));
        }
        Ok(self
            .g1
            .iter()
            .zip(&other.g1)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max))
    }
}

/// Smooth kernel values on the lags `0, h, …, steps·h` plus the weight of
/// the instantaneous part.
struct KernelTable {
    smooth: Vec<Complex64>,
    delta: f64,
}

impl KernelTable {
    fn new(d: &SpectralDensity, grid: &TimeGrid) -> Result<Self> {
        let h = grid.step();
        let mut smooth = Vec::with_capacity(grid.len());
        let mut delta = 0.0;
        for m in 0..grid.len() {
            let kv = memory_kernel(d, m as f64 * h)?;
            smooth.push(kv.smooth);
            delta = kv.delta_weight;
        }
        Ok(Self { smooth, delta })
    }

    fn is_local(&self) -> bool {
        self.smooth.iter().all(|k| *k == Complex64::new(0.0, 0.0))
    }

    // h·Σ' κ_{n−k}·y_k over k = 0..=n with half weight at both ends
    fn trapezoid(&self, y: &[Complex64], n: usize, h: f64) -> Complex64 {
        if n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = 0.5 * (self.smooth[n] * y[0] + self.smooth[0] * y[n]);
        for k in 1..n {
            acc += self.smooth[n - k] * y[k];
        }
        acc * h
    }
}

/// Trapezoidal solution of `y' = −λy − ∫₀ˢ κ(s−u)y(u)du + f(s)` with
/// `y(0) = y0`. The endpoint terms are linear in the new value and are
/// solved for exactly, which is the fixed point of the trapezoidal
/// predictor–corrector iteration.
fn integrate_level(
    lambda: Complex64,
    kernel: &KernelTable,
    source: &[Complex64],
    y0: Complex64,
    h: f64,
) -> Vec<Complex64> {
    let len = source.len();
    let local = kernel.is_local();
    let mut y = Vec::with_capacity(len);
    y.push(y0);
    let k0 = kernel.smooth[0];
    let denom = 1.0 + 0.5 * h * lambda + 0.25 * h * h * k0;
    let mut deriv = -lambda * y0 + source[0];
    for n in 0..len - 1 {
        // history up to and including y_n, with the new endpoint left out
        let partial = if local {
            Complex64::new(0.0, 0.0)
        } else {
            let mut acc = 0.5 * kernel.smooth[n + 1] * y[0];
            for k in 1..=n {
                acc += kernel.smooth[n + 1 - k] * y[k];
            }
            acc * h
        };
        let next = (y[n] + 0.5 * h * (deriv - partial + source[n + 1])) / denom;
        deriv = -lambda * next - (partial + 0.5 * h * k0 * next) + source[n + 1];
        y.push(next);
    }
    y
}

/// Solves the retarded and lesser Green's function equations for diagonal
/// levels on the problem grid.
pub fn solve_green(p: &GreenProblem) -> Result<GreenSolution> {
    if p.es.is_empty() {
        return Err(Error::InvalidParameter {
            name: "es",
            reason: "no levels".into(),
        });
    }
    let guard = p.step_guard();
    if p.strict && !guard.ok() {
        return Err(Error::Stability {
            product: guard.product,
            limit: guard.limit,
        });
    }
    let grid = p.grid;
    let h = grid.step();
    let len = grid.len();
    let kernel = KernelTable::new(&p.density, &grid)?;
    let zero = vec![Complex64::new(0.0, 0.0); len];

    let mut g1_levels = Vec::with_capacity(p.es.len());
    let mut g2_levels = Vec::with_capacity(p.es.len());
    for &e in &p.es {
        let lambda = Complex64::new(kernel.delta, e);
        let g1 = integrate_level(lambda, &kernel, &zero, Complex64::new(1.0, 0.0), h);
        let driver: Vec<Complex64> = match p.lesser_source {
            LesserSource::Adjoint => g1.iter().map(|z| z.conj()).collect(),
            LesserSource::Retarded => g1.clone(),
        };
        let source: Vec<Complex64> = (0..len)
            .map(|n| kernel.delta * driver[n] + kernel.trapezoid(&driver, n, h))
            .collect();
        let mut g2 = integrate_level(lambda, &kernel, &source, Complex64::new(0.0, 0.0), h);
        g2[0] = Complex64::new(0.0, 0.0);
        g1_levels.push(g1);
        g2_levels.push(g2);
    }

    let n_levels = p.es.len();
    let assemble = |levels: &[Vec<Complex64>], k: usize| {
        let diag: Vec<Complex64> = levels.iter().map(|l| l[k]).collect();
        ComplexMatrix::from_diagonal(&diag)
    };
    let mut g1: Vec<ComplexMatrix> = (0..len).map(|k| assemble(&g1_levels, k)).collect();
    g1[0] = ComplexMatrix::identity(n_levels);
    let mut g2: Vec<ComplexMatrix> = (0..len).map(|k| assemble(&g2_levels, k)).collect();
    g2[0] = ComplexMatrix::zeros(n_levels, n_levels);
    for m in g1.iter().chain(&g2) {
        if m.diagonal().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Numerical {
                context: "solve_green",
                detail: format!("non-finite Green's function; step guard {:.3e}", guard.product),
            });
        }
    }
    Ok(GreenSolution {
        grid,
        g1,
        g2: Some(g2),
        convention_note: CONVENTION_NOTE,
        step_guard: Some(guard),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{analytic_green1_lorentzian, analytic_green_const};

    fn problem(es: &[f64], d: SpectralDensity, t1: f64, steps: usize) -> GreenProblem {
        GreenProblem::new(es.to_vec(), d, TimeGrid::new(0.0, t1, steps).unwrap()).unwrap()
    }

    #[test]
    fn closed_system_keeps_unit_modulus() {
        let p = problem(&[1.0, -2.0], SpectralDensity::constant(0.0).unwrap(), 10.0, 2000);
        let s = solve_green(&p).unwrap();
        for m in &s.g1 {
            for z in m.diagonal() {
                assert!((z.norm() - 1.0).abs() < 1e-12);
            }
        }
        assert_eq!(s.g1[0], ComplexMatrix::identity(2));
        assert_eq!(s.g2.as_ref().unwrap()[0], ComplexMatrix::zeros(2, 2));
    }

    #[test]
    fn flat_density_gives_exponential_decay() {
        let p = problem(&[1.0], SpectralDensity::constant(0.2).unwrap(), 10.0, 10_000);
        let s = solve_green(&p).unwrap();
        let exact = analytic_green_const(&[1.0], 0.2, &p.grid).unwrap();
        assert!(s.max_g1_diff(&exact).unwrap() < 1e-6);
        let g = s.g1_level(0);
        let resid = p
            .grid
            .times()
            .zip(&g)
            .map(|(t, z)| (z.norm().ln() + 0.2 * t).abs())
            .fold(0.0, f64::max);
        assert!(resid < 1e-6, "{resid}");
    }

    #[test]
    fn lesser_sources_match_closed_forms() {
        let (e, j0) = (1.0, 0.2);
        let mut p = problem(&[e], SpectralDensity::constant(j0).unwrap(), 10.0, 10_000);
        p.lesser_source = LesserSource::Retarded;
        let s = solve_green(&p).unwrap();
        let exact = analytic_green_const(&[e], j0, &p.grid).unwrap();
        let a = s.g2_level(0).unwrap();
        let b = exact.g2_level(0).unwrap();
        let err = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-5, "{err}");

        p.lesser_source = LesserSource::Adjoint;
        let s = solve_green(&p).unwrap();
        let a = s.g2_level(0).unwrap();
        let err = p
            .grid
            .times()
            .zip(&a)
            .map(|(t, z)| (z - j0 * (-j0 * t).exp() * (e * t).sin() / e).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-5, "{err}");
    }

    #[test]
    fn lorentzian_matches_closed_form_at_second_order() {
        let (e, j0, j1, e0, g) = (1.0, 0.1, 1.0, 1.0, 0.2);
        let d = SpectralDensity::lorentzian(j0, j1, e0, g, f64::INFINITY).unwrap();
        let mut errs = Vec::new();
        for steps in [500, 1000, 2000] {
            let p = problem(&[e], d.clone(), 10.0, steps);
            let s = solve_green(&p).unwrap();
            let exact = analytic_green1_lorentzian(&[e], j0, j1, e0, g, &p.grid).unwrap();
            errs.push(s.max_g1_diff(&exact).unwrap());
        }
        assert!(errs[2] < 1e-3);
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..4.5).contains(&ratio), "ratio {ratio}, errors {errs:?}");
        }
    }

    #[test]
    fn step_guard_reported_and_enforced() {
        let mut p = problem(&[5.0], SpectralDensity::constant(0.5).unwrap(), 10.0, 100);
        let s = solve_green(&p).unwrap();
        assert!(!s.step_guard.unwrap().ok());
        p.strict = true;
        assert!(matches!(solve_green(&p), Err(Error::Stability { .. })));
    }
}
