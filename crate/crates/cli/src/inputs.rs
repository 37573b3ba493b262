//! Turns validated configs into library inputs.

use markovlab::dynmap::{CompositeSpec, InitialState, PROBE_TIMES};
use markovlab::linalg::{ComplexMatrix, DensityMatrix};
use markovlab::random::{random_product_spec, random_time_triple, rng_from_seed, SpecRng};
use markovlab::spectral::SpectralDensity;
use markovlab::TimeGrid;
use num_complex::Complex64;
use rand::Rng;

use crate::config::ScenarioConfig;
use crate::error::CliError;

const DEFAULT_SPAN: f64 = 5.0;

pub fn grid(cfg: &ScenarioConfig) -> Result<TimeGrid, CliError> {
    let t0 = cfg.number_or("t0", 0.0)?;
    let t1 = cfg.require_number("t1")?;
    let steps = cfg.require_count("steps")?;
    TimeGrid::new(t0, t1, steps).map_err(|e| CliError::invalid("t1", e.to_string()))
}

/// `(j1, e0, gamma)` when a resonance is configured; all three or none.
pub fn resonance(cfg: &ScenarioConfig) -> Result<Option<(f64, f64, f64)>, CliError> {
    let parts = [cfg.number("j1")?, cfg.number("e0")?, cfg.number("gamma")?];
    match parts {
        [None, None, None] => Ok(None),
        [Some(j1), Some(e0), Some(g)] => Ok(Some((j1, e0, g))),
        _ => {
            let missing = ["j1", "e0", "gamma"]
                .into_iter()
                .zip(parts)
                .find(|(_, v)| v.is_none())
                .map_or("j1", |(k, _)| k);
            Err(CliError::invalid(missing, "a resonance needs j1, e0 and gamma together"))
        }
    }
}

pub fn levels(cfg: &ScenarioConfig) -> Result<Vec<f64>, CliError> {
    let es = cfg.real_list("es")?.unwrap_or_default();
    if es.is_empty() {
        return Err(CliError::invalid("es", "need at least one level"));
    }
    Ok(es)
}

pub fn density(cfg: &ScenarioConfig) -> Result<SpectralDensity, CliError> {
    let j0 = cfg.require_number("j0")?;
    let table = (cfg.real_list("table_omega")?, cfg.real_list("table_values")?);
    let omega_cut = cfg.number("omega_cut")?;
    let lorentz = resonance(cfg)?;
    let built = match (table, lorentz) {
        ((None, None), None) => {
            if omega_cut.is_some() {
                return Err(CliError::invalid("omega_cut", "a band cut-off needs a resonance (j1, e0, gamma)"));
            }
            SpectralDensity::constant(j0)
        }
        ((None, None), Some((j1, e0, g))) => {
            SpectralDensity::lorentzian(j0, j1, e0, g, omega_cut.unwrap_or(f64::INFINITY))
        }
        ((Some(omega), Some(values)), None) => {
            if omega.len() != values.len() {
                return Err(CliError::invalid("table_values", "must match table_omega in length"));
            }
            if j0 != 0.0 {
                return Err(CliError::invalid("j0", "a tabulated density carries its own background; set j0 = 0"));
            }
            let points: Vec<(f64, f64)> = omega.into_iter().zip(values).collect();
            SpectralDensity::tabulated(&points)
        }
        ((Some(_), None), _) => return Err(CliError::invalid("table_values", "required with table_omega")),
        ((None, Some(_)), _) => return Err(CliError::invalid("table_omega", "required with table_values")),
        ((Some(_), Some(_)), Some(_)) => {
            return Err(CliError::invalid("table_omega", "cannot be combined with a resonance"))
        }
    };
    Ok(built?)
}

pub fn seeded_rng(cfg: &ScenarioConfig) -> Result<Option<SpecRng>, CliError> {
    Ok(cfg.count("seed")?.map(|s| rng_from_seed(s as u64)))
}

fn square(cfg: &ScenarioConfig, key: &str, n: usize) -> Result<Option<ComplexMatrix>, CliError> {
    let Some(rows) = cfg.matrix(key)? else {
        return Ok(None);
    };
    if rows.len() != n || rows[0].len() != n {
        return Err(CliError::invalid(key, format!("expected {n}x{n}, got {}x{}", rows.len(), rows[0].len())));
    }
    ComplexMatrix::from_rows(&rows)
        .map(Some)
        .map_err(|e| CliError::invalid(key, e.to_string()))
}

fn state(key: &str, m: ComplexMatrix) -> Result<DensityMatrix, CliError> {
    DensityMatrix::new(m).map_err(|e| CliError::invalid(key, e.to_string()))
}

fn need_seed(key: &str) -> CliError {
    CliError::invalid(key, "required unless a seed is given for random generation")
}

pub fn system_state(cfg: &ScenarioConfig, c_key: &str, rho_key: &str, ds: usize) -> Result<Option<DensityMatrix>, CliError> {
    match (cfg.complex_list(c_key)?, square(cfg, rho_key, ds)?) {
        (Some(_), Some(_)) => Err(CliError::invalid(rho_key, format!("give either {c_key} or {rho_key}"))),
        (Some(c), None) => {
            if c.len() != ds {
                return Err(CliError::invalid(c_key, format!("expected {ds} amplitudes, got {}", c.len())));
            }
            DensityMatrix::pure(&c)
                .map(Some)
                .map_err(|e| CliError::invalid(c_key, e.to_string()))
        }
        (None, Some(m)) => state(rho_key, m).map(Some),
        (None, None) => Ok(None),
    }
}

fn environment_state(cfg: &ScenarioConfig, de: usize) -> Result<Option<DensityMatrix>, CliError> {
    match (square(cfg, "d", de)?, cfg.real_list("env_weights")?) {
        (Some(_), Some(_)) => Err(CliError::invalid("env_weights", "give either d or env_weights")),
        (Some(m), None) => state("d", m).map(Some),
        (None, Some(w)) => {
            if w.len() != de {
                return Err(CliError::invalid("env_weights", format!("expected {de} weights, got {}", w.len())));
            }
            state("env_weights", ComplexMatrix::from_real_diagonal(&w)).map(Some)
        }
        (None, None) if de == 1 => Ok(Some(DensityMatrix::basis(1, 0))),
        (None, None) => Ok(None),
    }
}

/// Composite spec from explicit matrices, with any missing piece drawn
/// from `rng` when one is supplied.
pub fn composite_spec(cfg: &ScenarioConfig, rng: Option<&mut SpecRng>) -> Result<CompositeSpec, CliError> {
    let ds = cfg.require_count("d_s")?;
    let de = cfg.require_count("d_e")?;
    if ds == 0 || de == 0 {
        return Err(CliError::invalid(if ds == 0 { "d_s" } else { "d_e" }, "must be positive"));
    }
    let coupling = cfg.number_or("coupling_strength", 1.0)?;
    let base = rng.map(|rng| random_product_spec(rng, ds, de, coupling));
    let pick = |key: &str, n: usize, from_base: fn(&CompositeSpec) -> &ComplexMatrix| -> Result<ComplexMatrix, CliError> {
        match (square(cfg, key, n)?, &base) {
            (Some(m), _) => Ok(m),
            (None, Some(b)) => Ok(from_base(b).clone()),
            (None, None) => Err(need_seed(key)),
        }
    };
    let h_s = pick("hS", ds, |b| &b.h_s)?;
    let h_e = pick("hE", de, |b| &b.h_e)?;
    let h_se = pick("hSE", ds * de, |b| &b.h_se)?;

    let initial = if cfg.get("a").is_some() {
        let rows = cfg.matrix("a")?.unwrap_or_default();
        if rows.len() != ds || rows[0].len() != de {
            return Err(CliError::invalid("a", format!("expected {ds}x{de} amplitudes")));
        }
        let a = ComplexMatrix::from_rows(&rows).map_err(|e| CliError::invalid("a", e.to_string()))?;
        InitialState::entangled(a).map_err(|e| CliError::invalid("a", e.to_string()))?
    } else {
        let base_parts = base.as_ref().and_then(|b| match &b.initial {
            InitialState::Product { system, environment } => Some((system.clone(), environment.clone())),
            InitialState::Entangled { .. } => None,
        });
        let system = match (system_state(cfg, "c", "rho_s", ds)?, &base_parts) {
            (Some(s), _) => s,
            (None, Some((s, _))) => s.clone(),
            (None, None) => return Err(need_seed("c")),
        };
        let environment = match (environment_state(cfg, de)?, &base_parts) {
            (Some(e), _) => e,
            (None, Some((_, e))) => e.clone(),
            (None, None) => return Err(need_seed("d")),
        };
        InitialState::Product { system, environment }
    };
    Ok(CompositeSpec::new(ds, de, h_s, h_e, h_se, coupling, initial)?)
}

/// Explicit `times` (flattened triples) followed by any random triples.
pub fn time_triples(cfg: &ScenarioConfig, rng: Option<&mut SpecRng>) -> Result<Vec<(f64, f64, f64)>, CliError> {
    let mut out = Vec::new();
    if let Some(times) = cfg.real_list("times")? {
        if times.len() % 3 != 0 || times.is_empty() {
            return Err(CliError::invalid("times", "expected a flat list of (t0, ts, t) triples"));
        }
        out.extend(times.chunks(3).map(|c| (c[0], c[1], c[2])));
    }
    let n = cfg.count("random_triples")?.unwrap_or(0);
    if n > 0 {
        let span = cfg.number_or("span", DEFAULT_SPAN)?;
        let rng = rng.ok_or_else(|| CliError::invalid("random_triples", "needs a seed"))?;
        out.extend((0..n).map(|_| random_time_triple(rng, span)));
    }
    if out.is_empty() {
        out.push(PROBE_TIMES);
    }
    Ok(out)
}

/// Explicit `times` followed by `samples` uniform draws from `[0, span]`.
pub fn sample_times(cfg: &ScenarioConfig, rng: Option<&mut SpecRng>) -> Result<Vec<f64>, CliError> {
    let mut out = cfg.real_list("times")?.unwrap_or_default();
    let n = cfg.count("samples")?.unwrap_or(0);
    if n > 0 {
        let span = cfg.number_or("span", DEFAULT_SPAN)?;
        let rng = rng.ok_or_else(|| CliError::invalid("samples", "needs a seed"))?;
        out.extend((0..n).map(|_| rng.gen_range(0.0..span)));
    }
    if out.is_empty() {
        out = vec![0.5, 1.0, 2.0];
    }
    Ok(out)
}

/// Number of environment columns carrying weight in entangled amplitudes.
pub fn support_columns(spec: &CompositeSpec) -> usize {
    match &spec.initial {
        InitialState::Entangled { amplitudes } => (0..amplitudes.cols())
            .filter(|&a| (0..amplitudes.rows()).any(|i| amplitudes[(i, a)] != Complex64::new(0.0, 0.0)))
            .count(),
        InitialState::Product { .. } => 1,
    }
}
