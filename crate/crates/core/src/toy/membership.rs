//! Numerical membership test for the set of reduced states.
//!
//! Reduced states of `ψ_AB ∈ C^d ⊗ C^{d_B}` are exactly the matrices
//! `marginal_image(ρ)` with `rank ρ ≤ min(d, d_B)`. The search minimizes the
//! Frobenius distance to that family over `ρ = LL†/tr(LL†)`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::tensor::{hermitian_spectrum, ComplexMatrix, C64};

use super::nnls::hermitian_coordinates;
use super::state::{invert_marginal_image, marginal_image, ToyState};
use super::ToyError;

/// Default Frobenius distance below which a state counts as reduced.
pub const MEMBERSHIP_TOL: f64 = 1e-3;

/// Points per axis of the qubit Bloch-cube grid.
pub const GRID_POINTS: usize = 40;

/// Lipschitz constant of `r ↦ marginal_image((I + r·σ)/2)` in Frobenius
/// norm: `√2` from `ρ ⊗ ρ` (with `‖∂ρ‖ = 1/√2`, `‖ρ‖ ≤ 1`) plus
/// `½·‖S̃‖ = 1/(2√3)` from the purity term.
pub const QUBIT_LIPSCHITZ: f64 = std::f64::consts::SQRT_2 + 0.288_675_134_594_812_9;

const RANDOM_STARTS: usize = 24;
const SEARCH_SEED: u64 = 0x7265_6475_6365;

#[derive(Debug, Clone)]
pub struct MembershipReport {
    pub member: bool,
    /// Smallest distance found (an upper bound on the true distance).
    pub distance: f64,
    /// Certified lower bound on the distance, when the search is exhaustive
    /// enough to give one (qubit `A` with `d_B ≥ 2`).
    pub lower_bound: Option<f64>,
    /// Minimizing `ρ`.
    pub closest: ComplexMatrix,
}

/// Decides whether `omega` is a reduced state of some `ψ_AB` with
/// `dim B = d_b`, up to Frobenius distance `tol`.
pub fn is_reduced_state(
    omega: &ToyState,
    d_b: usize,
    tol: f64,
) -> Result<MembershipReport, ToyError> {
    if d_b == 0 {
        return Err(ToyError::InvalidArgument("d_b must be positive".into()));
    }
    let d = omega.d();
    let rank = d.min(d_b);
    let target = omega.matrix();
    let objective = |rho: &ComplexMatrix| (marginal_image(rho) - target).norm();

    let mut starts: Vec<ComplexMatrix> = Vec::new();
    if let Ok(rho) = invert_marginal_image(target) {
        starts.push(rho);
    }
    let mut lower_bound = None;
    if d == 2 && rank == 2 {
        let (best, grid_min) = qubit_grid(target);
        let spacing = 2.0 / (GRID_POINTS - 1) as f64;
        let covering_radius = spacing * 3f64.sqrt() / 2.0;
        lower_bound = Some((grid_min - QUBIT_LIPSCHITZ * covering_radius).max(0.0));
        starts.extend(best);
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SEARCH_SEED);
        starts.push(ComplexMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0));
        for _ in 0..RANDOM_STARTS {
            let l = ComplexMatrix::from_fn(d, rank, |_, _| {
                C64::new(
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                )
            });
            starts.push(density_from_factor(&l));
        }
    }

    let mut best_rho = starts[0].clone();
    let mut best = f64::INFINITY;
    for start in &starts {
        let factor = factor_of(start, rank);
        let refined = levenberg_marquardt(&factor, target);
        let rho = density_from_factor(&refined);
        let value = objective(&rho);
        if value < best {
            best = value;
            best_rho = rho;
        }
    }
    Ok(MembershipReport {
        member: best < tol,
        distance: best,
        lower_bound,
        closest: best_rho,
    })
}

/// Minimum of the objective over the projected Bloch-cube grid and the five
/// best grid points as density matrices.
fn qubit_grid(target: &ComplexMatrix) -> (Vec<ComplexMatrix>, f64) {
    let n = GRID_POINTS;
    let coord = |k: usize| -1.0 + 2.0 * k as f64 / (n - 1) as f64;
    let mut scored: Vec<(f64, [f64; 3])> = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut r = [coord(i), coord(j), coord(k)];
                let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
                if len > 1.0 {
                    r.iter_mut().for_each(|x| *x /= len);
                }
                let value = (marginal_image(&bloch_density(r)) - target).norm();
                scored.push((value, r));
            }
        }
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let min = scored[0].0;
    (
        scored
            .iter()
            .take(5)
            .map(|(_, r)| bloch_density(*r))
            .collect(),
        min,
    )
}

/// `(I + r·σ)/2`.
pub fn bloch_density(r: [f64; 3]) -> ComplexMatrix {
    let c = |re: f64, im: f64| C64::new(re, im);
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            c(0.5 * (1.0 + r[2]), 0.0),
            c(0.5 * r[0], -0.5 * r[1]),
            c(0.5 * r[0], 0.5 * r[1]),
            c(0.5 * (1.0 - r[2]), 0.0),
        ],
    )
}

fn density_from_factor(l: &ComplexMatrix) -> ComplexMatrix {
    let rho = l * l.adjoint();
    let tr = rho.trace().re.max(f64::MIN_POSITIVE);
    rho * C64::new(1.0 / tr, 0.0)
}

/// `L` with `LL† = ρ`, keeping the `rank` largest eigenvalues.
fn factor_of(rho: &ComplexMatrix, rank: usize) -> ComplexMatrix {
    let d = rho.nrows();
    let Ok(spectrum) = hermitian_spectrum(rho) else {
        return ComplexMatrix::identity(d, rank);
    };
    ComplexMatrix::from_fn(d, rank, |i, k| {
        spectrum.vectors[k].amplitudes()[i] * spectrum.values[k].max(1e-6).sqrt()
    })
}

fn unpack(x: &DVector<f64>, d: usize, rank: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, rank, |i, k| {
        let idx = 2 * (i * rank + k);
        C64::new(x[idx], x[idx + 1])
    })
}

fn pack(l: &ComplexMatrix) -> DVector<f64> {
    let (d, rank) = l.shape();
    DVector::from_fn(2 * d * rank, |idx, _| {
        let entry = l[((idx / 2) / rank, (idx / 2) % rank)];
        if idx % 2 == 0 {
            entry.re
        } else {
            entry.im
        }
    })
}

/// Damped Gauss–Newton on the real coordinates of `L`, with a
/// central-difference Jacobian.
fn levenberg_marquardt(start: &ComplexMatrix, target: &ComplexMatrix) -> ComplexMatrix {
    let (d, rank) = start.shape();
    let residual = |x: &DVector<f64>| -> DVector<f64> {
        hermitian_coordinates(&(marginal_image(&density_from_factor(&unpack(x, d, rank))) - target))
    };
    let mut x = pack(start);
    let mut r = residual(&x);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    let n = x.len();
    for _ in 0..300 {
        if cost < 1e-30 {
            break;
        }
        let mut jac = DMatrix::zeros(r.len(), n);
        for k in 0..n {
            let h = 1e-7 * x[k].abs().max(1.0);
            let mut plus = x.clone();
            let mut minus = x.clone();
            plus[k] += h;
            minus[k] -= h;
            jac.set_column(k, &((residual(&plus) - residual(&minus)) / (2.0 * h)));
        }
        let jtj = jac.transpose() * &jac;
        let gradient = jac.transpose() * &r;
        let mut improved = false;
        while lambda < 1e12 {
            let mut damped = jtj.clone();
            for k in 0..n {
                damped[(k, k)] += lambda * (jtj[(k, k)] + 1e-12);
            }
            let Some(step) = damped.cholesky().map(|c| c.solve(&gradient)) else {
                lambda *= 4.0;
                continue;
            };
            let candidate = &x - step;
            let candidate_r = residual(&candidate);
            let candidate_cost = candidate_r.norm_squared();
            if candidate_cost < cost {
                let gain = cost - candidate_cost;
                x = candidate;
                r = candidate_r;
                cost = candidate_cost;
                lambda = (lambda / 3.0).max(1e-12);
                improved = gain > 1e-18 * cost.max(1e-30);
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    unpack(&x, d, rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{random_pure_state, StateVector};
    use crate::toy::{normalized_symmetric, reduced_state, BipartiteVector, Ensemble};

    #[test]
    fn reduced_states_are_members() {
        for (d_a, d_b, seed) in [(2, 2, 1), (2, 3, 2), (3, 2, 3), (3, 3, 4)] {
            let psi = BipartiteVector::new(d_a, d_b, random_pure_state(d_a * d_b, seed)).unwrap();
            let omega = ToyState::from_matrix(d_a, reduced_state(&psi).matrix().clone()).unwrap();
            let report = is_reduced_state(&omega, d_b, MEMBERSHIP_TOL).unwrap();
            assert!(report.member);
            assert!(report.distance < 1e-8, "{d_a}x{d_b}: {}", report.distance);
        }
    }

    #[test]
    fn maximally_mixed_symmetric_state_is_member() {
        let omega = ToyState::from_matrix(2, normalized_symmetric(2)).unwrap();
        assert!(is_reduced_state(&omega, 2, MEMBERSHIP_TOL).unwrap().member);
    }

    #[test]
    fn classical_mixture_is_rejected() {
        let ensemble = Ensemble::new(vec![
            (0.5, StateVector::basis(2, 0)),
            (0.5, StateVector::basis(2, 1)),
        ])
        .unwrap();
        let omega = ToyState::from_ensemble(&ensemble).unwrap();
        let report = is_reduced_state(&omega, 2, MEMBERSHIP_TOL).unwrap();
        assert!(!report.member);
        assert!(report.lower_bound.unwrap() >= 0.02);
        assert!(report.lower_bound.unwrap() <= report.distance);
    }
}
