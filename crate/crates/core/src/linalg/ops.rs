use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Default bound on the dimension of any composite (system ⊗ environment)
/// space.
pub const MAX_COMPOSITE_DIM: usize = 64;

/// Kronecker product `a ⊗ b` with the first factor's index slow:
/// `(a⊗b)[i·b.rows+α, j·b.cols+β] = a[i,j]·b[α,β]`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    tensor_product_with_limit(a, b, MAX_COMPOSITE_DIM)
}

pub fn tensor_product_with_limit(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    max_dim: usize,
) -> Result<ComplexMatrix> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) => (r, c),
        _ => {
            return Err(Error::Sizing {
                dim: usize::MAX,
                max: max_dim,
            })
        }
    };
    if rows > max_dim || cols > max_dim {
        return Err(Error::Sizing {
            dim: rows.max(cols),
            max: max_dim,
        });
    }
    Ok(ComplexMatrix::from_inner(a.inner().kronecker(b.inner())))
}

fn check_composite(m: &ComplexMatrix, ds: usize, de: usize) -> Result<()> {
    let n = ds * de;
    if m.rows() != n || m.cols() != n {
        return Err(Error::Shape(format!(
            "expected a {n}x{n} operator for dS={ds}, dE={de}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Trace over the environment factor: `out[i,j] = Σ_α m[i·dE+α, j·dE+α]`.
pub fn partial_trace_env(m: &ComplexMatrix, ds: usize, de: usize) -> Result<ComplexMatrix> {
    check_composite(m, ds, de)?;
    Ok(ComplexMatrix::from_fn(ds, ds, |i, j| {
        (0..de).map(|a| m[(i * de + a, j * de + a)]).sum()
    }))
}

/// Trace over the system factor: `out[α,β] = Σ_i m[i·dE+α, i·dE+β]`.
pub fn partial_trace_sys(m: &ComplexMatrix, ds: usize, de: usize) -> Result<ComplexMatrix> {
    check_composite(m, ds, de)?;
    Ok(ComplexMatrix::from_fn(de, de, |a, b| {
        (0..ds).map(|i| m[(i * de + a, i * de + b)]).sum()
    }))
}

/// Spectral decomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted ascending; column `k` of `vectors` belongs to
/// `values[k]`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::Shape(format!(
                "eigendecomposition needs a square matrix, got {}x{}",
                h.rows(),
                h.cols()
            )));
        }
        let n = h.rows();
        if n == 0 {
            return Ok(Self {
                values: Vec::new(),
                vectors: ComplexMatrix::zeros(0, 0),
            });
        }
        let herm = h.hermitian_part();
        let eig = SymmetricEigen::try_new(herm.into_inner(), f64::EPSILON, 100_000).ok_or_else(|| {
            Error::Numerical {
                context: "hermitian eigendecomposition",
                detail: format!("no convergence for a {n}x{n} matrix (max entry {:e})", h.max_abs()),
            }
        })?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok(Self {
            values,
            vectors: ComplexMatrix::from_inner(vectors),
        })
    }

    /// `V · diag(f(λ)) · V†`.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let v = self.vectors.inner();
        let n = self.values.len();
        let fvals: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        let scaled = DMatrix::from_fn(n, n, |i, j| v[(i, j)] * fvals[j]);
        ComplexMatrix::from_inner(scaled * v.adjoint())
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(HermitianEigen::new(h)?.values)
}

/// Spectral norm of a Hermitian matrix (largest |eigenvalue|).
pub fn hermitian_operator_norm(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(h)?
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max))
}

/// Matrix exponential `exp(scale · h)`.
///
/// Hermitian and anti-Hermitian inputs go through an eigendecomposition;
/// anything else uses scaling and squaring with a degree-13 Padé
/// approximant.
pub fn mat_exp(h: &ComplexMatrix, scale: Complex64) -> Result<ComplexMatrix> {
    if !h.is_square() {
        return Err(Error::Shape(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let tol = 1e-12 * h.max_abs().max(1.0);
    if h.hermiticity_defect() <= tol {
        let eig = HermitianEigen::new(h)?;
        return Ok(eig.apply(|l| (scale * l).exp()));
    }
    let i = Complex64::new(0.0, 1.0);
    let k = h.scale(-i);
    if k.hermiticity_defect() <= tol {
        let eig = HermitianEigen::new(&k)?;
        return Ok(eig.apply(|l| (scale * i * l).exp()));
    }
    expm_pade(&h.scale(scale))
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn norm1(m: &DMatrix<Complex64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Scaling-and-squaring exponential of a general square matrix.
pub fn expm_pade(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::Shape("expm of a non-square matrix".into()));
    }
    let n = a.rows();
    let a = a.inner();
    let nrm = norm1(a);
    if !nrm.is_finite() {
        return Err(Error::Numerical {
            context: "matrix exponential",
            detail: format!("non-finite 1-norm {nrm}"),
        });
    }
    let squarings = if nrm > THETA13 {
        (nrm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * Complex64::new(2f64.powi(-squarings), 0.0);
    let b = |k: usize| Complex64::new(PADE13[k], 0.0);
    let id = DMatrix::<Complex64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9))
        + &a6 * b(7)
        + &a4 * b(5)
        + &a2 * b(3)
        + &id * b(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8))
        + &a6 * b(6)
        + &a4 * b(4)
        + &a2 * b(2)
        + &id * b(0);
    let lu = (&v - &u).lu();
    let mut x = lu.solve(&(&v + &u)).ok_or_else(|| Error::Numerical {
        context: "matrix exponential",
        detail: format!("singular Padé denominator after {squarings} scalings (1-norm {nrm:e})"),
    })?;
    for _ in 0..squarings {
        x = &x * &x;
    }
    ComplexMatrix::try_from_inner(x).map_err(|_| Error::Numerical {
        context: "matrix exponential",
        detail: format!("overflow while squaring {squarings} times (1-norm {nrm:e})"),
    })
}
