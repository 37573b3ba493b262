//! Seeded generation of random operators, states and composite specs.
//!
//! Everything here draws from a ChaCha8 stream, so identical seeds give
//! identical specs on every platform.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynmap::{CompositeSpec, InitialState};
use crate::linalg::{ComplexMatrix, DensityMatrix};

pub type SpecRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SpecRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Matrix with independent entries uniform in the unit square.
pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| unit_complex(rng))
}

/// Hermitian matrix `(A + A†)/2` built from [`random_matrix`].
pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    random_matrix(rng, n, n).hermitian_part()
}

/// Normalized amplitude vector.
pub fn random_amplitudes<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n).map(|_| unit_complex(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Diagonal probability vector with entries bounded away from zero.
pub fn random_probabilities<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Diagonal mixed state with random weights.
pub fn random_diagonal_state<R: Rng>(rng: &mut R, n: usize) -> DensityMatrix {
    let p = random_probabilities(rng, n);
    DensityMatrix::new(ComplexMatrix::from_real_diagonal(&p))
        .expect("normalized diagonal weights form a state")
}

/// Random product spec: pure system state, diagonal mixed environment
/// (pure when `d_e = 1`).
pub fn random_product_spec<R: Rng>(rng: &mut R, d_s: usize, d_e: usize, coupling: f64) -> CompositeSpec {
    let h_s = random_hermitian(rng, d_s);
    let h_e = random_hermitian(rng, d_e);
    let h_se = random_hermitian(rng, d_s * d_e);
    let c = random_amplitudes(rng, d_s);
    let env = random_diagonal_state(rng, d_e);
    let initial = InitialState::product_pure(&c, env).expect("random amplitudes are normalized");
    CompositeSpec::new(d_s, d_e, h_s, h_e, h_se, coupling, initial)
        .expect("random spec dimensions are consistent")
}

/// Random times `t0 ≤ ts ≤ t` drawn from `[0, span]`.
pub fn random_time_triple<R: Rng>(rng: &mut R, span: f64) -> (f64, f64, f64) {
    let mut v = [
        rng.gen_range(0.0..span),
        rng.gen_range(0.0..span),
        rng.gen_range(0.0..span),
    ];
    v.sort_by(f64::total_cmp);
    (v[0], v[1], v[2])
}
