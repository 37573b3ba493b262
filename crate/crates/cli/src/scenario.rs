//! Scenario names, accepted keys and the checks each one reports.

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Number,
    /// Nonnegative integer.
    Count,
    /// Bare word; an empty option list accepts any word.
    Word(&'static [&'static str]),
    RealList,
    ComplexList,
    Matrix,
    /// Square matrix that must be Hermitian within 1e-12.
    Hermitian,
}

#[derive(Debug, Clone, Copy)]
pub struct Field {
    pub key: &'static str,
    pub kind: Kind,
    pub required: bool,
}

const fn req(key: &'static str, kind: Kind) -> Field {
    Field { key, kind, required: true }
}

const fn opt(key: &'static str, kind: Kind) -> Field {
    Field { key, kind, required: false }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Green,
    GreenAnalytic,
    AmpPhase,
    Divisibility,
    Entangled,
    MasterCheck,
    Entropy,
    Stationarity,
    Witness,
    Sweep,
}

const COMMON: &[Field] = &[
    opt("output", Kind::Word(&[])),
    opt("sweep_key", Kind::Word(&[])),
    opt("sweep_values", Kind::RealList),
    opt("seed", Kind::Count),
];

const GRID: &[Field] = &[
    opt("t0", Kind::Number),
    req("t1", Kind::Number),
    req("steps", Kind::Count),
];

const LEVELS: &[Field] = &[
    req("es", Kind::RealList),
    req("j0", Kind::Number),
    opt("j1", Kind::Number),
    opt("e0", Kind::Number),
    opt("gamma", Kind::Number),
];

const NUMERIC_DENSITY: &[Field] = &[
    opt("omega_cut", Kind::Number),
    opt("table_omega", Kind::RealList),
    opt("table_values", Kind::RealList),
    opt("lesser", Kind::Word(&["adjoint", "retarded"])),
];

const SINGLE_LEVEL: &[Field] = &[
    req("es_level", Kind::Number),
    req("j0", Kind::Number),
    req("e0", Kind::Number),
    req("gamma", Kind::Number),
];

const CROSSOVER: &[Field] = &[
    opt("j1_values", Kind::RealList),
    opt("j1_min", Kind::Number),
    opt("j1_max", Kind::Number),
    opt("j1_points", Kind::Count),
];

const HAMILTONIANS: &[Field] = &[
    req("d_s", Kind::Count),
    req("d_e", Kind::Count),
    opt("hS", Kind::Hermitian),
    opt("hE", Kind::Hermitian),
    opt("hSE", Kind::Hermitian),
    opt("coupling_strength", Kind::Number),
];

const PRODUCT_STATE: &[Field] = &[
    opt("c", Kind::ComplexList),
    opt("rho_s", Kind::Hermitian),
    opt("d", Kind::Hermitian),
    opt("env_weights", Kind::RealList),
];

const TRIPLES: &[Field] = &[
    opt("times", Kind::RealList),
    opt("random_triples", Kind::Count),
    opt("span", Kind::Number),
];

const SAMPLES: &[Field] = &[
    opt("times", Kind::RealList),
    opt("samples", Kind::Count),
    opt("span", Kind::Number),
];

pub const ALL: [Scenario; 10] = [
    Scenario::Green,
    Scenario::GreenAnalytic,
    Scenario::AmpPhase,
    Scenario::Divisibility,
    Scenario::Entangled,
    Scenario::MasterCheck,
    Scenario::Entropy,
    Scenario::Stationarity,
    Scenario::Witness,
    Scenario::Sweep,
];

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Self::Green => "green",
            Self::GreenAnalytic => "green-analytic",
            Self::AmpPhase => "amp-phase",
            Self::Divisibility => "divisibility",
            Self::Entangled => "entangled",
            Self::MasterCheck => "master-check",
            Self::Entropy => "entropy",
            Self::Stationarity => "stationarity",
            Self::Witness => "witness",
            Self::Sweep => "sweep",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, CliError> {
        ALL.into_iter().find(|s| s.name() == name).ok_or_else(|| {
            let names: Vec<_> = ALL.iter().map(|s| s.name()).collect();
            CliError::invalid("scenario", format!("unknown scenario '{name}', expected one of {}", names.join(", ")))
        })
    }

    pub fn schema(self) -> Vec<Field> {
        let parts: &[&[Field]] = match self {
            Self::Green => &[LEVELS, NUMERIC_DENSITY, GRID],
            Self::GreenAnalytic => &[LEVELS, GRID],
            Self::AmpPhase => &[SINGLE_LEVEL, &[req("j1", Kind::Number)]],
            Self::Sweep => &[SINGLE_LEVEL, CROSSOVER],
            Self::Divisibility => &[HAMILTONIANS, PRODUCT_STATE, TRIPLES],
            Self::Entangled => &[HAMILTONIANS, &[req("a", Kind::Matrix)], TRIPLES],
            Self::MasterCheck => &[HAMILTONIANS, PRODUCT_STATE, SAMPLES],
            Self::Entropy | Self::Stationarity => &[HAMILTONIANS, PRODUCT_STATE, GRID],
            Self::Witness => &[
                HAMILTONIANS,
                PRODUCT_STATE,
                &[opt("c_b", Kind::ComplexList), opt("rho_b", Kind::Hermitian)],
                GRID,
            ],
        };
        COMMON.iter().chain(parts.iter().flat_map(|p| p.iter())).copied().collect()
    }

    /// Names usable in `tol.<name>` overrides.
    pub fn check_names(self) -> &'static [&'static str] {
        match self {
            Self::Green => &["initial_values", "markov_decay", "lorentzian_agreement"],
            Self::GreenAnalytic => &["initial_values"],
            Self::AmpPhase => &["amplitude_sum", "theta_range", "vieta"],
            Self::Sweep => &["amplitude_sum", "vieta", "zero_endpoint", "half_split"],
            Self::Divisibility | Self::Entangled => &["divisibility", "state_validity"],
            Self::MasterCheck => &[
                "derivative_trace",
                "commutator_form",
                "eigen_drift",
                "block_mixture",
                "mixed_invariance",
                "unitarity",
            ],
            Self::Entropy => &["entropy_flatness", "sie_bound"],
            Self::Stationarity => &["stationarity"],
            Self::Witness => &["no_backflow"],
        }
    }

    /// Whether `key` names a scalar parameter that a sweep may vary.
    pub fn scalar_key(self, key: &str) -> bool {
        self.schema()
            .iter()
            .any(|f| f.key == key && matches!(f.kind, Kind::Number | Kind::Count))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in ALL {
            assert_eq!(Scenario::from_name(s.name()).unwrap(), s);
        }
        assert!(Scenario::from_name("nope").is_err());
    }

    #[test]
    fn schemas_have_unique_keys() {
        for s in ALL {
            let schema = s.schema();
            for (i, f) in schema.iter().enumerate() {
                assert!(schema[i + 1..].iter().all(|g| g.key != f.key), "{} repeats {}", s.name(), f.key);
            }
        }
    }

    #[test]
    fn only_scalars_sweep() {
        assert!(Scenario::Divisibility.scalar_key("coupling_strength"));
        assert!(Scenario::GreenAnalytic.scalar_key("gamma"));
        assert!(!Scenario::Divisibility.scalar_key("hS"));
        assert!(!Scenario::Green.scalar_key("es"));
        assert!(!Scenario::Green.scalar_key("missing"));
    }
}
