//! Mutually unbiased bases, finite phase averages and decompositions of the
//! symmetric projector into doubled rank-one projectors.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DVector;

use crate::tensor::{StateVector, C64};

pub fn is_prime(n: usize) -> bool {
    n >= 2
        && (2..)
            .take_while(|k| k * k <= n)
            .all(|k| !n.is_multiple_of(k))
}

/// `d + 1` mutually unbiased bases of `C^d` for prime `d`, or `None`.
///
/// `d = 2` uses the Pauli eigenbases. Odd primes use the computational
/// basis plus the bases `|e_{b,i}⟩ = Σ_k ω^{b k² + i k} |k⟩ / √d`.
pub fn mutually_unbiased_bases(d: usize) -> Option<Vec<Vec<StateVector>>> {
    if !is_prime(d) {
        return None;
    }
    let vector = |amps: Vec<C64>| StateVector::new(DVector::from_vec(amps)).expect("unit vector");
    if d == 2 {
        let h = FRAC_1_SQRT_2;
        let r = |x: f64| C64::new(x, 0.0);
        let i = |x: f64| C64::new(0.0, x);
        return Some(vec![
            vec![vector(vec![r(1.0), r(0.0)]), vector(vec![r(0.0), r(1.0)])],
            vec![vector(vec![r(h), r(h)]), vector(vec![r(h), r(-h)])],
            vec![vector(vec![r(h), i(h)]), vector(vec![r(h), i(-h)])],
        ]);
    }
    let norm = 1.0 / (d as f64).sqrt();
    let mut bases = vec![(0..d).map(|k| StateVector::basis(d, k)).collect::<Vec<_>>()];
    for b in 0..d {
        let basis = (0..d)
            .map(|i| {
                vector(
                    (0..d)
                        .map(|k| {
                            let exponent = (b * k * k + i * k) % d;
                            C64::from_polar(norm, 2.0 * PI * exponent as f64 / d as f64)
                        })
                        .collect(),
                )
            })
            .collect();
        bases.push(basis);
    }
    Some(bases)
}

/// Order `q` of the phase group `Z_q²` used to realize phase averages: the
/// smallest prime `q ≥ max(5, 2d − 1)`.
///
/// Averaging `e^{i(θ_i + θ_j − θ_k − θ_l)}` over `θ_j = 2π(t₁ j + t₂ j²)/q`
/// vanishes unless `i + j ≡ k + l` and `i² + j² ≡ k² + l² (mod q)`, which for
/// indices below `d` forces `{i, j} = {k, l}`, exactly as for independent
/// uniform phases.
pub fn phase_order(d: usize) -> usize {
    (std::cmp::max(5, (2 * d).saturating_sub(1))..)
        .find(|&q| is_prime(q))
        .expect("primes are unbounded")
}

/// The `q²` vectors `Σ_j e^{iθ_j} a_j |j⟩` of the phase family, each of
/// which carries weight `1/q²` in the average.
pub fn phase_family(amplitudes: &[f64]) -> Vec<StateVector> {
    let d = amplitudes.len();
    let q = phase_order(d);
    let mut out = Vec::with_capacity(q * q);
    for t1 in 0..q {
        for t2 in 0..q {
            let amps = amplitudes
                .iter()
                .enumerate()
                .map(|(j, &a)| {
                    let exponent = (t1 * j + t2 * j * j) % q;
                    C64::from_polar(a, 2.0 * PI * exponent as f64 / q as f64)
                })
                .collect();
            out.push(StateVector::normalized(DVector::from_vec(amps)).expect("nonzero amplitudes"));
        }
    }
    out
}

/// Weighted vectors with `Σ w |φ⟩⟨φ|^{⊗2} = S` on `C^d ⊗ C^d`.
///
/// Prime `d`: all MUB vectors with weight ½ (a complex projective
/// 2-design). Otherwise `S = (d²/2)·avg_θ |v_θ⟩⟨v_θ|^{⊗2} + ½ Σ_i |ii⟩⟨ii|`
/// with `v_θ` the uniform-amplitude phase family.
pub fn symmetric_design(d: usize) -> Vec<(f64, StateVector)> {
    if let Some(bases) = mutually_unbiased_bases(d) {
        return bases.into_iter().flatten().map(|v| (0.5, v)).collect();
    }
    let amplitude = 1.0 / (d as f64).sqrt();
    let family = phase_family(&vec![amplitude; d]);
    let weight = (d * d) as f64 / (2.0 * family.len() as f64);
    let mut out: Vec<(f64, StateVector)> = family.into_iter().map(|v| (weight, v)).collect();
    out.extend((0..d).map(|i| (0.5, StateVector::basis(d, i))));
    out
}
