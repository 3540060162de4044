//! Seeded generators of effects, measurements and global effects.

use rand::Rng;

use crate::tensor::{random_unitary, ComplexMatrix, StateVector};

use super::composite::{star, GlobalEffect};
use super::design::symmetric_design;
use super::effect::{ToyEffect, ToyMeasurement};
use super::ToyError;

/// The symmetric design rotated by a Haar-random unitary.
fn rotated_design<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<(f64, StateVector)> {
    let u: ComplexMatrix = random_unitary(d, rng);
    symmetric_design(d)
        .into_iter()
        .map(|(w, v)| {
            (
                w,
                StateVector::normalized(&u * v.amplitudes()).expect("unitary image"),
            )
        })
        .collect()
}

/// Random effect: each term of a rotated design is split between `F̂` and
/// `S − F̂` with a uniform fraction.
pub fn random_effect<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ToyEffect, ToyError> {
    let mut terms = Vec::new();
    let mut complement = Vec::new();
    for (w, v) in rotated_design(d, rng) {
        let share: f64 = rng.random();
        terms.push((w * share, v.clone()));
        complement.push((w * (1.0 - share), v));
    }
    ToyEffect::from_terms(d, terms, complement)
}

/// Random `outcomes`-outcome measurement: each term of a rotated design is
/// distributed over the outcomes with random proportions.
pub fn random_measurement<R: Rng + ?Sized>(
    d: usize,
    outcomes: usize,
    rng: &mut R,
) -> Result<ToyMeasurement, ToyError> {
    if outcomes == 0 {
        return Err(ToyError::InvalidArgument(
            "a measurement needs at least one outcome".into(),
        ));
    }
    let design = rotated_design(d, rng);
    let shares: Vec<Vec<f64>> = design
        .iter()
        .map(|_| {
            let raw: Vec<f64> = (0..outcomes).map(|_| rng.random::<f64>() + 1e-3).collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / total).collect()
        })
        .collect();
    let effects = (0..outcomes)
        .map(|k| {
            let mut terms = Vec::new();
            let mut complement = Vec::new();
            for ((w, v), share) in design.iter().zip(&shares) {
                terms.push((w * share[k], v.clone()));
                complement.push((w * (1.0 - share[k]), v.clone()));
            }
            ToyEffect::from_terms(d, terms, complement)
        })
        .collect::<Result<Vec<_>, _>>()?;
    ToyMeasurement::new(effects)
}

/// Random global effect: a ⋆-product, an intrinsic effect on `C^{d_A d_B}`
/// (generically with entangled terms), or a mixture of the two.
pub fn random_global_effect<R: Rng + ?Sized>(
    d_a: usize,
    d_b: usize,
    rng: &mut R,
) -> Result<GlobalEffect, ToyError> {
    let product = |rng: &mut R| -> Result<GlobalEffect, ToyError> {
        Ok(star(&random_effect(d_a, rng)?, &random_effect(d_b, rng)?))
    };
    let intrinsic = |rng: &mut R| GlobalEffect::intrinsic(d_a, d_b, random_effect(d_a * d_b, rng)?);
    match rng.random_range(0..3) {
        0 => product(rng),
        1 => intrinsic(rng),
        _ => {
            let p: f64 = rng.random();
            let q: f64 = rng.random::<f64>() * (1.0 - p);
            GlobalEffect::mixture(vec![(p, product(rng)?), (q, intrinsic(rng)?)])
        }
    }
}
