//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex-valued
//! integrands on finite intervals.

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_intervals: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (k, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kron += pair * WGK[k];
        if k % 2 == 1 {
            gauss += pair * WG[k / 2];
        }
    }
    Panel {
        a,
        b,
        value: kron * half,
        error: ((kron - gauss) * half).norm(),
    }
}

/// Integrates `f` over `[a, b]`, starting from `initial_panels` equal
/// sub-intervals and bisecting the worst panel until the summed error
/// estimate meets the tolerance.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    initial_panels: usize,
    opts: QuadratureOptions,
) -> Result<Complex64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Numerical {
            context: "quadrature",
            detail: format!("non-finite interval [{a}, {b}]"),
        });
    }
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let n0 = initial_panels.clamp(1, opts.max_intervals);
    let width = (b - a) / n0 as f64;
    let mut panels: Vec<Panel> = (0..n0)
        .map(|k| {
            let lo = a + k as f64 * width;
            let hi = if k + 1 == n0 { b } else { lo + width };
            kronrod(&f, lo, hi)
        })
        .collect();
    loop {
        let total: Complex64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let tol = opts.abs_tol.max(opts.rel_tol * total.norm());
        if error <= tol {
            return Ok(total);
        }
        if panels.len() >= opts.max_intervals {
            return Err(Error::Numerical {
                context: "quadrature",
                detail: format!(
                    "no convergence on [{a}, {b}] after {} panels: error estimate {error:e} > tolerance {tol:e}",
                    panels.len()
                ),
            });
        }
        // bisect every panel carrying at least its share of the error
        let share = error / panels.len() as f64;
        let splittable = |p: &Panel| p.b - p.a > 4.0 * f64::EPSILON * (p.a.abs() + p.b.abs());
        if !panels.iter().any(|p| p.error >= share && splittable(p)) {
            return Err(Error::Numerical {
                context: "quadrature",
                detail: format!(
                    "panels on [{a}, {b}] cannot be refined further: error estimate {error:e} > tolerance {tol:e}"
                ),
            });
        }
        let mut next = Vec::with_capacity(panels.len() * 2);
        for p in panels {
            if p.error >= share && splittable(&p) {
                let mid = 0.5 * (p.a + p.b);
                next.push(kronrod(&f, p.a, mid));
                next.push(kronrod(&f, mid, p.b));
            } else {
                next.push(p);
            }
        }
        panels = next;
    }
}
