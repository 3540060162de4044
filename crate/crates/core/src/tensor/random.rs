use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{re, ComplexMatrix, StateVector, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    C64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random pure state of `C^d`, deterministic in `seed`.
///
/// The global phase is fixed so that the first nonzero amplitude is real
/// and positive; for `d = 1` this is the vector `(1)`.
pub fn random_pure_state(d: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_pure_state_with(d, &mut rng)
}

pub fn random_pure_state_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> StateVector {
    assert!(d >= 1, "dimension must be positive");
    loop {
        let v = DVector::from_fn(d, |_, _| gaussian(rng));
        if let Some(pivot) = v.iter().find(|z| z.norm() > 0.0) {
            let phase = pivot.conj() / pivot.norm();
            if let Ok(state) = StateVector::normalized(v * phase) {
                return state;
            }
        }
    }
}

/// Haar-random unitary via QR of a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..d {
        let diag = r[(k, k)];
        let phase = if diag.norm() > 0.0 {
            diag / diag.norm()
        } else {
            re(1.0)
        };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// Random density matrix `G G† / tr(G G†)` with `G` a `d × rank` Ginibre matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, rank.max(1), |_, _| gaussian(rng));
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho / re(tr)
}
