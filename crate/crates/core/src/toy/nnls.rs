//! Lawson–Hanson nonnegative least squares and the frame fit built on it.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::tensor::{hermitian_spectrum, random_pure_state_with, ComplexMatrix, StateVector, C64};

use super::design::symmetric_design;

/// Default number of frame directions tried by [`fit_doubled_projectors`].
pub const FRAME_SIZE: usize = 200;

/// Relative residual below which a frame fit counts as exact.
pub const FIT_TOL: f64 = 1e-9;

const FRAME_SEED: u64 = 0x6f70_666c_6162;

/// Solves `min ‖a x − b‖₂` subject to `x ≥ 0`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let scale = a.norm().max(1.0) * b.norm().max(1.0);
    let tol = 1e-13 * scale;
    let max_outer = 3 * n + 10;

    for _ in 0..max_outer {
        let gradient = a.transpose() * (b - a * &x);
        let Some(enter) = (0..n)
            .filter(|&j| !passive[j])
            .filter(|&j| gradient[j] > tol)
            .max_by(|&i, &j| gradient[i].total_cmp(&gradient[j]))
        else {
            break;
        };
        passive[enter] = true;

        loop {
            let z = passive_solution(a, b, &passive);
            let blocked: Vec<usize> = (0..n).filter(|&j| passive[j] && z[j] <= 0.0).collect();
            if blocked.is_empty() {
                x = z;
                break;
            }
            let alpha = blocked
                .iter()
                .map(|&j| x[j] / (x[j] - z[j]))
                .fold(f64::INFINITY, f64::min);
            x += (z - &x) * alpha;
            for j in 0..n {
                if passive[j] && x[j] <= 1e-15 {
                    passive[j] = false;
                    x[j] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    x
}

/// Unconstrained least squares restricted to the passive columns.
fn passive_solution(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let cols: Vec<usize> = (0..a.ncols()).filter(|&j| passive[j]).collect();
    let sub = DMatrix::from_fn(a.nrows(), cols.len(), |i, k| a[(i, cols[k])]);
    let solved = sub
        .svd(true, true)
        .solve(b, 1e-12)
        .unwrap_or_else(|_| DVector::zeros(cols.len()));
    let mut z = DVector::zeros(a.ncols());
    for (k, &j) in cols.iter().enumerate() {
        z[j] = solved[k];
    }
    z
}

/// Real coordinates of a Hermitian matrix in which the Euclidean norm equals
/// the Frobenius norm.
pub fn hermitian_coordinates(m: &ComplexMatrix) -> DVector<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    let root2 = std::f64::consts::SQRT_2;
    for i in 0..n {
        out.push(m[(i, i)].re);
        for j in (i + 1)..n {
            out.push(root2 * m[(i, j)].re);
            out.push(root2 * m[(i, j)].im);
        }
    }
    DVector::from_vec(out)
}

/// Searches for `target = Σ w_k |φ_k⟩⟨φ_k|^{⊗2}` with `w_k ≥ 0` over a
/// finite frame: the symmetric design of `C^d`, product vectors read off the
/// eigenvectors of `target`, and seeded random directions.
///
/// This is a semidecision: `None` means no fit was found in the frame, not
/// that none exists.
pub fn fit_doubled_projectors(d: usize, target: &ComplexMatrix) -> Option<Vec<(f64, StateVector)>> {
    let mut frame: Vec<StateVector> = symmetric_design(d).into_iter().map(|(_, v)| v).collect();
    frame.extend(product_candidates(d, target));
    let mut rng = ChaCha8Rng::seed_from_u64(FRAME_SEED ^ d as u64);
    while frame.len() < FRAME_SIZE {
        frame.push(random_pure_state_with(d, &mut rng));
    }

    let b = hermitian_coordinates(target);
    let columns: Vec<DVector<f64>> = frame
        .iter()
        .map(|v| hermitian_coordinates(&v.doubled_projector()))
        .collect();
    let a = DMatrix::from_columns(&columns);
    let weights = nnls(&a, &b);

    let terms: Vec<(f64, StateVector)> = weights
        .iter()
        .zip(frame)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, v)| (*w, v))
        .collect();
    let mut rebuilt = ComplexMatrix::zeros(target.nrows(), target.ncols());
    for (w, v) in &terms {
        rebuilt += v.doubled_projector() * C64::new(*w, 0.0);
    }
    let residual = (&rebuilt - target).norm() / target.norm().max(1.0);
    (residual <= FIT_TOL).then_some(terms)
}

/// For each eigenvector `v` of `target`, the leading left singular vector of
/// `v` reshaped to a `d × d` matrix. When `v = φ ⊗ φ` this recovers `φ`.
fn product_candidates(d: usize, target: &ComplexMatrix) -> Vec<StateVector> {
    let Ok(spectrum) = hermitian_spectrum(target) else {
        return Vec::new();
    };
    let threshold = 1e-9 * spectrum.max().abs().max(1.0);
    spectrum
        .values
        .iter()
        .zip(&spectrum.vectors)
        .filter(|(value, _)| value.abs() > threshold)
        .filter_map(|(_, vector)| {
            let amps = vector.amplitudes();
            let reshaped = ComplexMatrix::from_fn(d, d, |i, j| amps[i * d + j]);
            let svd = reshaped.svd(true, false);
            let u = svd.u?;
            let best = (0..svd.singular_values.len())
                .max_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))?;
            StateVector::normalized(u.column(best).into_owned()).ok()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nnls_matches_known_solution() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![2.0, -1.0, 1.0]);
        // Unconstrained optimum has a negative second coordinate.
        let x = nnls(&a, &b);
        assert!(x[1].abs() < 1e-12);
        assert!((x[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn nnls_exact_fit() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![2.0, 3.0]);
        let x = nnls(&a, &b);
        assert!(x.iter().all(|&v| v >= 0.0));
        assert!((&a * &x - &b).norm() < 1e-12);
    }

    #[test]
    fn coordinates_preserve_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = random_pure_state_with(4, &mut rng);
        let w = random_pure_state_with(4, &mut rng);
        let m = v.projector() - w.projector() * C64::new(0.3, 0.0);
        assert!((hermitian_coordinates(&m).norm() - m.norm()).abs() < 1e-12);
    }
}
