use num_complex::Complex64;

use super::evolution::{Evolver, Propagator};
use super::spec::{CompositeSpec, InitialState};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix};

/// Four-index representation `C_{(i1,i2),(j1,j2)}(t, t0)` of the reduced
/// dynamical map.
///
/// Stored as a `dS² × dS²` matrix with row `i1·dS + i2` and column
/// `j1·dS + j2`, so that `ρ_S(t)_{j1j2} = Σ ρ_S(t0)_{i1i2} C_{(i1i2),(j1j2)}`
/// and composition over consecutive intervals is a plain matrix product.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperMap {
    pub d_s: usize,
    pub t: f64,
    pub t0: f64,
    pub entries: ComplexMatrix,
}

impl SuperMap {
    pub fn identity(d_s: usize, t0: f64) -> Self {
        Self {
            d_s,
            t: t0,
            t0,
            entries: ComplexMatrix::identity(d_s * d_s),
        }
    }

    pub fn get(&self, i1: usize, i2: usize, j1: usize, j2: usize) -> Complex64 {
        self.entries[(i1 * self.d_s + i2, j1 * self.d_s + j2)]
    }

    /// Applies the map to a system operator.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let n = self.d_s;
        ComplexMatrix::from_fn(n, n, |j1, j2| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i1 in 0..n {
                for i2 in 0..n {
                    acc += rho[(i1, i2)] * self.get(i1, i2, j1, j2);
                }
            }
            acc
        })
    }

    /// `self` over `[t0, ts]` followed by `later` over `[ts, t]`.
    pub fn then(&self, later: &SuperMap) -> SuperMap {
        SuperMap {
            d_s: self.d_s,
            t: later.t,
            t0: self.t0,
            entries: &self.entries * &later.entries,
        }
    }

    /// Largest deviation from trace preservation over the basis inputs
    /// `|i1⟩⟨i2|`: `|Σ_j C_{(i1,i2),(j,j)} − δ_{i1i2}|`.
    pub fn trace_defect(&self) -> f64 {
        let n = self.d_s;
        let mut worst: f64 = 0.0;
        for i1 in 0..n {
            for i2 in 0..n {
                let tr: Complex64 = (0..n).map(|j| self.get(i1, i2, j, j)).sum();
                let target = if i1 == i2 { 1.0 } else { 0.0 };
                worst = worst.max((tr - target).norm());
            }
        }
        worst
    }
}

/// Contracts the propagator matrix elements with the environment weights:
/// `C = Σ_{α1,α2,γ} d_{α1α2} ⟨j1γ|U|i1α1⟩ ⟨j2γ|U|i2α2⟩*`.
fn contract(u: &ComplexMatrix, d: &ComplexMatrix, ds: usize, de: usize) -> ComplexMatrix {
    let mut c = ComplexMatrix::zeros(ds * ds, ds * ds);
    // w[(j2,γ),(i2,α1)] = Σ_α2 d_{α1α2} U*_{(j2γ),(i2α2)}
    let w = ComplexMatrix::from_fn(ds * de, ds * de, |row, col| {
        let (i2, a1) = (col / de, col % de);
        (0..de)
            .map(|a2| d[(a1, a2)] * u[(row, i2 * de + a2)].conj())
            .sum()
    });
    for i1 in 0..ds {
        for i2 in 0..ds {
            for j1 in 0..ds {
                for j2 in 0..ds {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for g in 0..de {
                        for a1 in 0..de {
                            acc += u[(j1 * de + g, i1 * de + a1)] * w[(j2 * de + g, i2 * de + a1)];
                        }
                    }
                    c[(i1 * ds + i2, j1 * ds + j2)] = acc;
                }
            }
        }
    }
    c
}

fn check_order(t0: f64, ts: f64, t: f64) -> Result<()> {
    if !(t0 <= ts && ts <= t) {
        return Err(Error::InvalidParameter {
            name: "times",
            reason: format!("need t0 <= ts <= t, got ({t0}, {ts}, {t})"),
        });
    }
    Ok(())
}

/// Builds super maps of one spec for arbitrary intervals, always weighting
/// with the environment statistics present at preparation time.
#[derive(Debug, Clone)]
pub struct SuperMapBuilder {
    d_s: usize,
    d_e: usize,
    propagator: Propagator,
    weights: DensityMatrix,
}

impl SuperMapBuilder {
    pub fn new(spec: &CompositeSpec) -> Result<Self> {
        Ok(Self {
            d_s: spec.d_s,
            d_e: spec.d_e,
            propagator: Propagator::new(spec)?,
            weights: spec.initial.environment_weights()?,
        })
    }

    pub fn weights(&self) -> &DensityMatrix {
        &self.weights
    }

    pub fn build(&self, t0: f64, t: f64) -> Result<SuperMap> {
        if t < t0 {
            return Err(Error::InvalidParameter {
                name: "t",
                reason: format!("super map end {t} precedes start {t0}"),
            });
        }
        if t == t0 {
            return Ok(SuperMap::identity(self.d_s, t0));
        }
        let u = self.propagator.unitary(t - t0);
        Ok(SuperMap {
            d_s: self.d_s,
            t,
            t0,
            entries: contract(&u, self.weights.matrix(), self.d_s, self.d_e),
        })
    }

    /// Max-entry difference between `C(t,t0)` and `C(ts,t0)·C(t,ts)`.
    pub fn divisibility_defect(&self, t0: f64, ts: f64, t: f64) -> Result<f64> {
        check_order(t0, ts, t)?;
        let direct = self.build(t0, t)?;
        let split = self.build(t0, ts)?.then(&self.build(ts, t)?);
        Ok(direct.entries.max_abs_diff(&split.entries))
    }
}

/// Super map of the reduced dynamics from `t0` to `t`.
pub fn supermatrix(spec: &CompositeSpec, t: f64, t0: f64) -> Result<SuperMap> {
    SuperMapBuilder::new(spec)?.build(t0, t)
}

/// Tensor-level divisibility defect: the largest entry of
/// `C(t,t0) − C(ts,t0)·C(t,ts)`, with both factors weighted by the
/// preparation-time environment statistics.
pub fn divisibility_defect(spec: &CompositeSpec, t0: f64, ts: f64, t: f64) -> Result<f64> {
    SuperMapBuilder::new(spec)?.divisibility_defect(t0, ts, t)
}

/// State-level divisibility defect for the spec's own initial state:
/// `max |ρ_S(t) − Λ_{t,ts}[ρ_S(ts)]|`, where `ρ_S(·)` comes from exact
/// evolution of the state prepared at `t0` and `Λ_{t,ts}` is the super map
/// built from the preparation-time environment statistics.
pub fn divisibility_state_defect(spec: &CompositeSpec, t0: f64, ts: f64, t: f64) -> Result<f64> {
    check_order(t0, ts, t)?;
    let evolver = Evolver::new(spec)?;
    let builder = SuperMapBuilder::new(spec)?;
    let exact = evolver.system_state(t - t0)?;
    let mid = evolver.system_state(ts - t0)?;
    let split = builder.build(ts, t)?.apply(mid.matrix());
    Ok(exact.matrix().max_abs_diff(&split))
}

/// Divisibility defect for a correlated initial state `Σ a_{iα}|i,α⟩`.
///
/// Compares `ρ_S^{k1k2}(t)` with the value obtained by first propagating the
/// amplitudes to `ts` and then applying the super map over `[ts, t]` built
/// from the initial environment marginal.
pub fn entangled_divisibility(spec: &CompositeSpec, t0: f64, ts: f64, t: f64) -> Result<f64> {
    check_order(t0, ts, t)?;
    let InitialState::Entangled { amplitudes } = &spec.initial else {
        return Err(Error::InvalidState(
            "entangled divisibility needs entangled initial amplitudes".into(),
        ));
    };
    let (ds, de) = (spec.d_s, spec.d_e);
    let psi0 = amplitudes.to_row_major();
    let builder = SuperMapBuilder::new(spec)?;
    let propagator = Propagator::new(spec)?;
    // ρ_S^{k1k2}(τ) = Σ_δ [Σ_{iα} U_{(kδ),(iα)} a_{iα}]_{k1} [·]*_{k2}
    let reduced_at = |tau: f64| {
        let u = propagator.unitary(tau);
        let psi: Vec<Complex64> = (0..ds * de)
            .map(|row| (0..ds * de).map(|col| u[(row, col)] * psi0[col]).sum())
            .collect();
        ComplexMatrix::from_fn(ds, ds, |k1, k2| {
            (0..de)
                .map(|d| psi[k1 * de + d] * psi[k2 * de + d].conj())
                .sum()
        })
    };
    let rhs = reduced_at(t - t0);
    let lhs = builder.build(ts, t)?.apply(&reduced_at(ts - t0));
    Ok(rhs.max_abs_diff(&lhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynmap::evolve;
    use crate::random::{random_amplitudes, random_hermitian, random_product_spec, rng_from_seed};

    #[test]
    fn identity_at_initial_time() {
        let mut rng = rng_from_seed(31);
        let spec = random_product_spec(&mut rng, 2, 3, 1.0);
        let c = supermatrix(&spec, 0.4, 0.4).unwrap();
        assert_eq!(c.entries, ComplexMatrix::identity(4));
    }

    #[test]
    fn contraction_reproduces_partial_trace() {
        let mut rng = rng_from_seed(32);
        for (ds, de) in [(2, 2), (3, 2), (2, 3), (4, 4)] {
            let spec = random_product_spec(&mut rng, ds, de, 1.0);
            let t = 1.1;
            let c = supermatrix(&spec, t, 0.0).unwrap();
            let InitialState::Product { system, .. } = &spec.initial else {
                unreachable!()
            };
            let via_map = c.apply(system.matrix());
            let via_evolve = evolve(&spec, t).unwrap().rho_s;
            assert!(via_map.max_abs_diff(via_evolve.matrix()) < 1e-10);
            assert!(c.trace_defect() < 1e-10);
        }
    }

    #[test]
    fn uncoupled_map_is_pure_phase() {
        let mut rng = rng_from_seed(33);
        let ds = 3;
        let energies = [0.3, -0.8, 1.4];
        let spec = CompositeSpec::new(
            ds,
            2,
            ComplexMatrix::from_real_diagonal(&energies),
            random_hermitian(&mut rng, 2),
            random_hermitian(&mut rng, 6),
            0.0,
            InitialState::product_pure(&random_amplitudes(&mut rng, 3), DensityMatrix::maximally_mixed(2)).unwrap(),
        )
        .unwrap();
        let t = 2.3;
        let c = supermatrix(&spec, t, 0.0).unwrap();
        for i1 in 0..ds {
            for i2 in 0..ds {
                for j1 in 0..ds {
                    for j2 in 0..ds {
                        let expected = if i1 == j1 && i2 == j2 {
                            Complex64::new(0.0, -(energies[j1] - energies[j2]) * t).exp()
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                        assert!((c.get(i1, i2, j1, j2) - expected).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_splits_are_exact() {
        let mut rng = rng_from_seed(34);
        let spec = random_product_spec(&mut rng, 2, 3, 1.0);
        assert!(divisibility_defect(&spec, 0.2, 0.2, 1.5).unwrap() <= 1e-12);
        assert!(divisibility_defect(&spec, 0.2, 1.5, 1.5).unwrap() <= 1e-12);
    }

    #[test]
    fn bad_time_order_rejected() {
        let mut rng = rng_from_seed(35);
        let spec = random_product_spec(&mut rng, 2, 2, 1.0);
        assert!(divisibility_defect(&spec, 1.0, 0.5, 2.0).is_err());
        assert!(entangled_divisibility(&spec, 0.0, 0.5, 1.0).is_err());
    }
}
