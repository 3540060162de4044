//! Seeded consistency suite for the bipartite toy theory.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::tensor::{
    identity, kron, random_pure_state_with, random_unitary, rel_diff, symmetric_projector,
    ComplexMatrix, StateVector, C64,
};

use super::composite::{
    induced_local_effect, induced_local_matrix, reduced_state, star, star_with,
    unnormalized_conditional, BipartiteVector, StarVariant,
};
use super::design::mutually_unbiased_bases;
use super::effect::{canonical_measurement, ToyEffect, ToyMeasurement};
use super::random::{random_effect, random_global_effect, random_measurement};
use super::state::{convex_decomposition, ToyState};
use super::ToyError;

/// Residual threshold for every check in the suite.
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// Two random rays count as separated when some canonical outcome
/// probability differs by more than this.
pub const SEPARATION_TOL: f64 = 1e-9;

pub const CONSTRAINT_NAMES: [&str; 7] = [
    "C1",
    "C2",
    "C3-unit",
    "C3-factorization",
    "C4",
    "C5",
    "no-signalling",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintResult {
    pub constraint: String,
    pub pass: bool,
    pub max_residual: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub d_a: usize,
    pub d_b: usize,
    pub trials: usize,
    pub seed: u64,
    pub all_pass: bool,
    pub results: Vec<ConstraintResult>,
}

impl ConstraintReport {
    pub fn get(&self, constraint: &str) -> Option<&ConstraintResult> {
        self.results.iter().find(|r| r.constraint == constraint)
    }
}

pub fn verify_constraints(
    d_a: usize,
    d_b: usize,
    trials: usize,
    seed: u64,
) -> Result<ConstraintReport, ToyError> {
    verify_constraints_with(d_a, d_b, trials, seed, StarVariant::Standard)
}

/// Runs `trials` independent trials, trial `i` drawing from a generator
/// seeded with `seed + i`, and reports the worst residual per constraint.
pub fn verify_constraints_with(
    d_a: usize,
    d_b: usize,
    trials: usize,
    seed: u64,
    variant: StarVariant,
) -> Result<ConstraintReport, ToyError> {
    for d in [d_a, d_b] {
        if mutually_unbiased_bases(d).is_none() {
            return Err(ToyError::NotPrime(d));
        }
    }
    let worst = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            run_trial(d_a, d_b, variant, &mut rng)
        })
        .reduce(
            || [0.0; 7],
            |a, b| std::array::from_fn(|k| max_nan(a[k], b[k])),
        );

    let results: Vec<ConstraintResult> = CONSTRAINT_NAMES
        .iter()
        .zip(worst)
        .map(|(name, residual)| ConstraintResult {
            constraint: (*name).to_string(),
            pass: trials > 0 && residual < CONSTRAINT_TOL,
            max_residual: residual,
            trials,
        })
        .collect();
    Ok(ConstraintReport {
        d_a,
        d_b,
        trials,
        seed,
        all_pass: results.iter().all(|r| r.pass),
        results,
    })
}

/// `max` that lets a NaN (a broken computation) win.
fn max_nan(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Failed constructions count as an infinite residual.
fn residual_of(result: Result<f64, ToyError>) -> f64 {
    result.unwrap_or(f64::INFINITY)
}

fn run_trial(d_a: usize, d_b: usize, variant: StarVariant, rng: &mut ChaCha8Rng) -> [f64; 7] {
    let c1 = residual_of(check_c1(d_a, rng)).max(residual_of(check_c1(d_b, rng)));
    let c2 = residual_of(check_c2(d_a, rng)).max(residual_of(check_c2(d_b, rng)));
    let c3_unit = residual_of(check_unit(d_a, d_b, variant, rng));
    let c3_fact = residual_of(check_factorization(d_a, d_b, variant, rng));
    let c4 = residual_of(check_c4(d_a, d_b, rng));
    let c5 = residual_of(check_c5(d_a, d_b, rng));
    let ns = residual_of(check_no_signalling(d_a, d_b, rng));
    [c1, c2, c3_unit, c3_fact, c4, c5, ns]
}

fn random_bipartite(d_a: usize, d_b: usize, rng: &mut ChaCha8Rng) -> BipartiteVector {
    BipartiteVector::new(d_a, d_b, random_pure_state_with(d_a * d_b, rng))
        .expect("dimensions match")
}

/// C1: rotating an effect by `U^{⊗2}` yields a valid effect with
/// `F_U(Uψ) = F(ψ)`, and rotated measurements stay normalized.
fn check_c1(d: usize, rng: &mut ChaCha8Rng) -> Result<f64, ToyError> {
    let effect = random_effect(d, rng)?;
    let u = random_unitary(d, rng);
    let rotated = effect.rotated(&u)?;
    let uu = kron(&u, &u);
    let mut residual = rel_diff(rotated.matrix(), &(&uu * effect.matrix() * uu.adjoint()));
    for _ in 0..3 {
        let psi = random_pure_state_with(d, rng);
        let moved = StateVector::normalized(&u * psi.amplitudes())?;
        residual = residual.max((rotated.eval(&moved)? - effect.eval(&psi)?).abs());
    }
    let outcomes = rng.random_range(2..=4);
    let measurement = random_measurement(d, outcomes, rng)?;
    let v = random_unitary(d, rng);
    let turned = measurement
        .effects()
        .iter()
        .map(|e| e.rotated(&v))
        .collect::<Result<Vec<_>, _>>()?;
    ToyMeasurement::new(turned)?;
    Ok(residual)
}

/// C2: canonical outcome statistics reconstruct the ray (so distinct rays
/// are told apart). The residual is the tomography error; a pair of random
/// rays that no canonical effect separates counts as a failure.
fn check_c2(d: usize, rng: &mut ChaCha8Rng) -> Result<f64, ToyError> {
    let canonical = canonical_measurement(d)?;
    let psi = random_pure_state_with(d, rng);
    let other = random_pure_state_with(d, rng);
    let p = canonical.probabilities(&psi)?;
    let q = canonical.probabilities(&other)?;
    let separation = p
        .iter()
        .zip(&q)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if separation <= SEPARATION_TOL {
        return Ok(1.0);
    }
    // Σ over all MUB projectors of ⟨φ|ρ|φ⟩ |φ⟩⟨φ| equals ρ + I, and
    // F_φ(ψ) = ½|⟨φ|ψ⟩|⁴.
    let mut rebuilt = -identity(d);
    for (prob, effect) in p.iter().zip(canonical.effects()) {
        let (_, phi) = &effect.terms()[0];
        rebuilt += phi.projector() * C64::new((2.0 * prob.max(0.0)).sqrt(), 0.0);
    }
    Ok(rel_diff(&rebuilt, &psi.projector()))
}

/// C3, unit part: `u_A ⋆ u_B = u_AB`, also on a random entangled state.
fn check_unit(
    d_a: usize,
    d_b: usize,
    variant: StarVariant,
    rng: &mut ChaCha8Rng,
) -> Result<f64, ToyError> {
    let unit = star_with(&ToyEffect::unit(d_a), &ToyEffect::unit(d_b), variant);
    let psi = random_bipartite(d_a, d_b, rng);
    let on_state = (unit.eval(&psi)? - 1.0).abs();
    Ok(rel_diff(unit.matrix(), &symmetric_projector(d_a * d_b)).max(on_state))
}

/// C3: joint probabilities factorize on product states.
fn check_factorization(
    d_a: usize,
    d_b: usize,
    variant: StarVariant,
    rng: &mut ChaCha8Rng,
) -> Result<f64, ToyError> {
    let fa = random_effect(d_a, rng)?;
    let fb = random_effect(d_b, rng)?;
    let a = random_pure_state_with(d_a, rng);
    let b = random_pure_state_with(d_b, rng);
    let joint = star_with(&fa, &fb, variant).eval(&BipartiteVector::product(&a, &b))?;
    let mut residual = (joint - fa.eval(&a)? * fb.eval(&b)?).abs();
    let canonical_a = canonical_measurement(d_a)?;
    let canonical_b = canonical_measurement(d_b)?;
    let ea = &canonical_a.effects()[rng.random_range(0..canonical_a.len())];
    let eb = &canonical_b.effects()[rng.random_range(0..canonical_b.len())];
    let joint = star_with(ea, eb, variant).eval(&BipartiteVector::product(&a, &b))?;
    residual = residual.max((joint - ea.eval(&a)? * eb.eval(&b)?).abs());
    Ok(residual)
}

/// C4: reduced and conditional states are valid states with explicit
/// ensembles, and the branch weight is `(u_A ⋆ F_B)(ψ)`.
fn check_c4(d_a: usize, d_b: usize, rng: &mut ChaCha8Rng) -> Result<f64, ToyError> {
    let psi = random_bipartite(d_a, d_b, rng);
    let fb = random_effect(d_b, rng)?;
    let mut residual = decomposition_residual(&reduced_state(&psi))?;
    let (weight, matrix, witness) = unnormalized_conditional(&psi, &fb)?;
    let expected = star(&ToyEffect::unit(d_a), &fb).eval(&psi)?;
    residual = residual.max((weight - expected).abs());
    if weight > super::composite::ZERO_BRANCH_TOL {
        let scale = 1.0 / weight;
        let normalized = matrix * C64::new(scale, 0.0);
        ToyState::from_matrix(d_a, normalized.clone())?;
        let witness = witness
            .into_iter()
            .map(|(p, rho)| (p * scale, rho))
            .collect();
        residual = residual.max(decomposition_residual(&ToyState::with_witness(
            d_a, normalized, witness,
        ))?);
    }
    Ok(residual)
}

fn decomposition_residual(state: &ToyState) -> Result<f64, ToyError> {
    let ensemble = convex_decomposition(state)?;
    let weights: f64 = ensemble.members.iter().map(|(p, _)| p).sum();
    Ok(rel_diff(&ensemble.doubled_matrix(), state.matrix()).max((weights - 1.0).abs()))
}

/// C5: fixing `B` in a pure state turns any global effect into a valid local
/// effect that reproduces `F_AB(ψ ⊗ φ)`.
fn check_c5(d_a: usize, d_b: usize, rng: &mut ChaCha8Rng) -> Result<f64, ToyError> {
    let global = random_global_effect(d_a, d_b, rng)?;
    let phi = random_pure_state_with(d_b, rng);
    let induced = induced_local_effect(&global, &phi)?;
    let mut residual = rel_diff(induced.matrix(), &induced_local_matrix(&global, &phi)?);
    for _ in 0..3 {
        let psi = random_pure_state_with(d_a, rng);
        let direct = global.eval(&BipartiteVector::product(&psi, &phi))?;
        residual = residual.max((induced.eval(&psi)? - direct).abs());
    }
    Ok(residual)
}

/// Bob's choice between two measurements leaves Alice's averaged state equal
/// to the reduced state.
fn check_no_signalling(d_a: usize, d_b: usize, rng: &mut ChaCha8Rng) -> Result<f64, ToyError> {
    let psi = random_bipartite(d_a, d_b, rng);
    let reduced = reduced_state(&psi);
    let mut residual: f64 = 0.0;
    for _ in 0..2 {
        let outcomes = rng.random_range(2..=4);
        let measurement = random_measurement(d_b, outcomes, rng)?;
        let mut total = ComplexMatrix::zeros(d_a * d_a, d_a * d_a);
        for effect in measurement.effects() {
            total += unnormalized_conditional(&psi, effect)?.1;
        }
        residual = residual.max(rel_diff(&total, reduced.matrix()));
    }
    Ok(residual)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let report = verify_constraints(2, 2, 8, 7).unwrap();
        assert!(report.all_pass, "{report:?}");
        assert_eq!(report.results.len(), 7);
    }

    #[test]
    fn negative_control_breaks_unit() {
        let report =
            verify_constraints_with(2, 2, 4, 7, StarVariant::WithoutAntisymmetric).unwrap();
        assert!(!report.get("C3-unit").unwrap().pass);
        assert!(report.get("C3-factorization").unwrap().pass);
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            verify_constraints(2, 3, 6, 1).unwrap(),
            verify_constraints(2, 3, 6, 1).unwrap()
        );
    }
}
