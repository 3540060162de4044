//! Dense complex linear algebra on small tensor-product spaces.
//!
//! Everything here operates on matrices of at most a few hundred rows: the
//! toy theory never leaves `(C^9)^{⊗2}`. Matrices are plain
//! [`nalgebra::DMatrix`] values; the multipartite structure is carried
//! separately by a [`FactorShape`].

mod random;

pub use random::{
    random_density_matrix, random_pure_state, random_pure_state_with, random_unitary,
};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

pub use nalgebra::Complex;

/// Double precision complex scalar.
pub type C64 = Complex<f64>;

/// Row-major dense complex matrix.
pub type ComplexMatrix = DMatrix<C64>;

/// Default tolerance for approximate matrix equality (relative Frobenius).
pub const MATRIX_TOL: f64 = 1e-10;

/// Tolerance on the unit norm of a [`StateVector`].
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("factor shape {dims:?} describes dimension {expected}, matrix is {rows}x{cols}")]
    ShapeMismatch {
        dims: Vec<usize>,
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("{0:?} is not a permutation of the factor indices")]
    InvalidPermutation(Vec<usize>),
    #[error("factor index set {0:?} is not valid for this shape")]
    InvalidFactorSet(Vec<usize>),
    #[error("matrix is not Hermitian (relative deviation {0:e})")]
    NotHermitian(f64),
    #[error("vector has norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("dimension must be positive")]
    ZeroDimension,
}

pub type Result<T> = std::result::Result<T, TensorError>;

/// Ordered list of tensor-factor dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactorShape {
    dims: Vec<usize>,
}

impl FactorShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(TensorError::ZeroDimension);
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Dimension of the full tensor product.
    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    fn check_square(&self, m: &ComplexMatrix) -> Result<()> {
        let expected = self.total();
        if m.nrows() != expected || m.ncols() != expected {
            return Err(TensorError::ShapeMismatch {
                dims: self.dims.clone(),
                expected,
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        Ok(())
    }

    /// Row-major multi-index of a flat basis index.
    fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }
}

/// Unit vector in `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
}

impl StateVector {
    /// Wraps `amplitudes`, which must already have unit norm.
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(TensorError::ZeroDimension);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(TensorError::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales `amplitudes` to unit norm. Fails on the zero vector.
    pub fn normalized(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(TensorError::NotNormalized(norm));
        }
        Ok(Self {
            amplitudes: amplitudes / C64::new(norm, 0.0),
        })
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self> {
        Self::normalized(DVector::from_column_slice(amplitudes))
    }

    /// Computational basis vector `|index⟩` of `C^dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_inner(self) -> DVector<C64> {
        self.amplitudes
    }

    /// `|self⟩ ⊗ |other⟩`.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        StateVector {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> ComplexMatrix {
        outer(&self.amplitudes)
    }

    /// `|ψ⟩⟨ψ|^{⊗2}`.
    pub fn doubled_projector(&self) -> ComplexMatrix {
        outer(&self.amplitudes.kronecker(&self.amplitudes))
    }

    /// Applies a matrix and renormalizes; `None` when the image vanishes.
    pub fn apply(&self, m: &ComplexMatrix) -> Option<StateVector> {
        StateVector::normalized(m * &self.amplitudes).ok()
    }
}

/// `|v⟩⟨v|` for an arbitrary (not necessarily normalized) vector.
pub fn outer(v: &DVector<C64>) -> ComplexMatrix {
    v * v.adjoint()
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.trace()
}

/// `tr(a b)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.norm()
}

/// `‖a − b‖_F / max(1, ‖a‖_F, ‖b‖_F)`.
pub fn rel_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let scale = 1.0_f64.max(a.norm()).max(b.norm());
    (a - b).norm() / scale
}

pub fn approx_eq(a: &ComplexMatrix, b: &ComplexMatrix) -> bool {
    a.shape() == b.shape() && rel_diff(a, b) < MATRIX_TOL
}

pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    (m - m.adjoint()).norm() / 1.0_f64.max(m.norm())
}

pub fn is_hermitian(m: &ComplexMatrix) -> bool {
    m.is_square() && hermitian_deviation(m) < MATRIX_TOL
}

/// Real scalar as a complex number.
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Conjugates `m` by the basis permutation that reorders tensor factors.
///
/// Factor `k` of the result is factor `perm[k]` of the input, so with
/// `shape = (2,3,2,3)` and `perm = [0,2,1,3]` the basis vector
/// `|0⟩|a⟩|1⟩|b⟩` is sent to `|0⟩|1⟩|a⟩|b⟩`. The output lives on the
/// permuted shape `(dims[perm[0]], dims[perm[1]], …)`.
pub fn permute_factors(
    m: &ComplexMatrix,
    shape: &FactorShape,
    perm: &[usize],
) -> Result<ComplexMatrix> {
    shape.check_square(m)?;
    let n = shape.len();
    let mut seen = vec![false; n];
    if perm.len() != n
        || perm
            .iter()
            .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
    {
        return Err(TensorError::InvalidPermutation(perm.to_vec()));
    }
    let source = permutation_source_indices(shape, perm);
    let dim = source.len();
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| {
        m[(source[i], source[j])]
    }))
}

/// For each output basis index, the input basis index it is read from.
fn permutation_source_indices(shape: &FactorShape, perm: &[usize]) -> Vec<usize> {
    let out_dims: Vec<usize> = perm.iter().map(|&p| shape.dims[p]).collect();
    let out_shape = FactorShape { dims: out_dims };
    let mut strides = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * shape.dims[k + 1];
    }
    (0..shape.total())
        .map(|out| {
            out_shape
                .digits(out)
                .iter()
                .zip(perm)
                .map(|(&digit, &p)| digit * strides[p])
                .sum()
        })
        .collect()
}

/// Traces out every factor not listed in `keep`. Kept factors retain their
/// relative order.
pub fn partial_trace(
    m: &ComplexMatrix,
    shape: &FactorShape,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    shape.check_square(m)?;
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&k| k >= shape.len()) {
        return Err(TensorError::InvalidFactorSet(keep.to_vec()));
    }
    let traced: Vec<usize> = (0..shape.len()).filter(|k| !kept.contains(k)).collect();
    let kept_dim: usize = kept.iter().map(|&k| shape.dims[k]).product();
    let traced_dim: usize = traced.iter().map(|&k| shape.dims[k]).product();

    // Split every basis index into (kept part, traced part).
    let split: Vec<(usize, usize)> = (0..shape.total())
        .map(|idx| {
            let digits = shape.digits(idx);
            let fold = |factors: &[usize]| {
                factors
                    .iter()
                    .fold(0, |acc, &k| acc * shape.dims[k] + digits[k])
            };
            (fold(&kept), fold(&traced))
        })
        .collect();
    let mut by_traced: Vec<Vec<(usize, usize)>> = vec![Vec::new(); traced_dim];
    for (idx, &(k, t)) in split.iter().enumerate() {
        by_traced[t].push((idx, k));
    }

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for group in &by_traced {
        for &(r, kr) in group {
            for &(c, kc) in group {
                out[(kr, kc)] += m[(r, c)];
            }
        }
    }
    Ok(out)
}

/// The SWAP operator on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut swap = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            swap[(i * d + j, j * d + i)] = re(1.0);
        }
    }
    swap
}

/// Projectors `(S, A) = ((I + SWAP)/2, (I − SWAP)/2)` onto the symmetric and
/// antisymmetric subspaces of `C^d ⊗ C^d`.
pub fn exchange_projectors(d: usize) -> (ComplexMatrix, ComplexMatrix) {
    let id = identity(d * d);
    let swap = swap_operator(d);
    let sym = (&id + &swap) * re(0.5);
    let anti = (&id - &swap) * re(0.5);
    (sym, anti)
}

/// `S` alone.
pub fn symmetric_projector(d: usize) -> ComplexMatrix {
    exchange_projectors(d).0
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues descending.
///
/// Eigenvectors inside a (near-)degenerate cluster form an arbitrary
/// orthonormal basis of that cluster.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Vec<StateVector>,
}

impl Spectrum {
    /// `Σ λ_k |v_k⟩⟨v_k|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = self.vectors.first().map_or(0, StateVector::dim);
        let mut out = ComplexMatrix::zeros(dim, dim);
        for (value, vector) in self.values.iter().zip(&self.vectors) {
            out += vector.projector() * re(*value);
        }
        out
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

pub fn hermitian_spectrum(m: &ComplexMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(TensorError::ShapeMismatch {
            dims: vec![m.nrows()],
            expected: m.nrows(),
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let deviation = hermitian_deviation(m);
    if deviation >= MATRIX_TOL {
        return Err(TensorError::NotHermitian(deviation));
    }
    let symmetrized = (m + m.adjoint()) * re(0.5);
    let eig = symmetrized.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| StateVector {
            amplitudes: eig.eigenvectors.column(k).into_owned(),
        })
        .collect();
    Ok(Spectrum { values, vectors })
}
