//! Bipartite systems: the ⋆-product, global effects, reduced and conditional
//! states.
//!
//! Two-copy bipartite matrices are stored with factor order `A1 B1 A2 B2`
//! (the natural order of `ψ_AB ⊗ ψ_AB`). The algebra with `S_A ⊗ S_B` and
//! `A_A ⊗ A_B` happens in the order `A1 A2 B1 B2`; [`to_split_order`] and
//! [`to_copy_order`] convert between the two.

use nalgebra::DVector;

use crate::tensor::{
    exchange_projectors, kron, partial_trace, permute_factors, ComplexMatrix, FactorShape,
    StateVector, C64,
};

use super::effect::{Terms, ToyEffect};
use super::state::{marginal_image, maximally_mixed, normalized_symmetric, ToyState};
use super::{check_dim, ToyError};

/// Probability below which a conditional branch is not normalized.
pub const ZERO_BRANCH_TOL: f64 = 1e-14;

const SWAP_MIDDLE: [usize; 4] = [0, 2, 1, 3];

/// `A1 B1 A2 B2 → A1 A2 B1 B2`.
pub fn to_split_order(m: &ComplexMatrix, d_a: usize, d_b: usize) -> ComplexMatrix {
    let shape = FactorShape::new(vec![d_a, d_b, d_a, d_b]).expect("positive dimensions");
    permute_factors(m, &shape, &SWAP_MIDDLE).expect("shape matches")
}

/// `A1 A2 B1 B2 → A1 B1 A2 B2`.
pub fn to_copy_order(m: &ComplexMatrix, d_a: usize, d_b: usize) -> ComplexMatrix {
    let shape = FactorShape::new(vec![d_a, d_a, d_b, d_b]).expect("positive dimensions");
    permute_factors(m, &shape, &SWAP_MIDDLE).expect("shape matches")
}

/// Unit vector in `C^{d_A} ⊗ C^{d_B}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteVector {
    d_a: usize,
    d_b: usize,
    state: StateVector,
}

impl BipartiteVector {
    pub fn new(d_a: usize, d_b: usize, state: StateVector) -> Result<Self, ToyError> {
        check_dim(d_a * d_b, state.dim())?;
        Ok(Self { d_a, d_b, state })
    }

    pub fn product(a: &StateVector, b: &StateVector) -> Self {
        Self {
            d_a: a.dim(),
            d_b: b.dim(),
            state: a.tensor(b),
        }
    }

    /// `Σ_i |ii⟩ / √d`.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut amps = DVector::zeros(d * d);
        for i in 0..d {
            amps[i * d + i] = C64::new(1.0, 0.0);
        }
        Self {
            d_a: d,
            d_b: d,
            state: StateVector::normalized(amps).expect("nonzero"),
        }
    }

    /// `(|01⟩ − |10⟩)/√2`.
    pub fn singlet() -> Self {
        let mut amps = DVector::zeros(4);
        amps[1] = C64::new(1.0, 0.0);
        amps[2] = C64::new(-1.0, 0.0);
        Self {
            d_a: 2,
            d_b: 2,
            state: StateVector::normalized(amps).expect("nonzero"),
        }
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// `ρ_A = tr_B |ψ⟩⟨ψ|`.
    pub fn marginal_a(&self) -> ComplexMatrix {
        let shape = FactorShape::new(vec![self.d_a, self.d_b]).expect("positive dimensions");
        partial_trace(&self.state.projector(), &shape, &[0]).expect("shape matches")
    }

    /// `|ψ⟩⟨ψ|^{⊗2}` in split order `A1 A2 B1 B2`.
    fn doubled_split(&self) -> ComplexMatrix {
        to_split_order(&self.state.doubled_projector(), self.d_a, self.d_b)
    }

    /// `χ = (I ⊗ ⟨φ|) ψ`, unnormalized.
    fn contract_b(&self, phi: &StateVector) -> DVector<C64> {
        let amps = self.state.amplitudes();
        let phi = phi.amplitudes();
        DVector::from_fn(self.d_a, |a, _| {
            (0..self.d_b)
                .map(|b| phi[b].conj() * amps[a * self.d_b + b])
                .sum()
        })
    }
}

/// Which ⋆-product to use. `WithoutAntisymmetric` drops the `A_A ⊗ A_B`
/// term and exists only as a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StarVariant {
    #[default]
    Standard,
    WithoutAntisymmetric,
}

/// How a global effect was built.
#[derive(Debug, Clone)]
pub enum Provenance {
    Product(Box<ToyEffect>, Box<ToyEffect>),
    Intrinsic(ToyEffect),
    /// Nonnegative weights summing to at most one.
    Mixture(Vec<(f64, GlobalEffect)>),
}

/// An effect on the composite system, as a matrix on `(C^{d_A d_B})^{⊗2}` in
/// copy order `A1 B1 A2 B2`.
#[derive(Debug, Clone)]
pub struct GlobalEffect {
    d_a: usize,
    d_b: usize,
    matrix: ComplexMatrix,
    provenance: Provenance,
}

impl GlobalEffect {
    /// A toy effect on the joint system `C^{d_A d_B}`.
    pub fn intrinsic(d_a: usize, d_b: usize, effect: ToyEffect) -> Result<Self, ToyError> {
        check_dim(d_a * d_b, effect.d())?;
        Ok(Self {
            d_a,
            d_b,
            matrix: effect.matrix().clone(),
            provenance: Provenance::Intrinsic(effect),
        })
    }

    pub fn mixture(parts: Vec<(f64, GlobalEffect)>) -> Result<Self, ToyError> {
        let (d_a, d_b) = parts
            .first()
            .map(|(_, e)| (e.d_a, e.d_b))
            .ok_or_else(|| ToyError::InvalidArgument("empty mixture".into()))?;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || total > 1.0 + 1e-12 {
            return Err(ToyError::InvalidArgument(format!(
                "mixture weights sum to {total}"
            )));
        }
        let dim = d_a * d_b;
        let mut matrix = ComplexMatrix::zeros(dim * dim, dim * dim);
        for (w, e) in &parts {
            check_dim(d_a, e.d_a)?;
            check_dim(d_b, e.d_b)?;
            matrix += &e.matrix * C64::new(*w, 0.0);
        }
        Ok(Self {
            d_a,
            d_b,
            matrix,
            provenance: Provenance::Mixture(parts),
        })
    }

    /// `u_A ⋆ u_B`, which equals `S_AB`.
    pub fn unit(d_a: usize, d_b: usize) -> Self {
        star(&ToyEffect::unit(d_a), &ToyEffect::unit(d_b))
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `F_AB(ψ_AB)`.
    pub fn eval(&self, psi: &BipartiteVector) -> Result<f64, ToyError> {
        check_dim(self.d_a, psi.d_a)?;
        check_dim(self.d_b, psi.d_b)?;
        let amps = psi.state.amplitudes();
        let doubled = amps.kronecker(amps);
        Ok(doubled.dotc(&(&self.matrix * &doubled)).re)
    }
}

/// `F_A ⋆ F_B`.
pub fn star(fa: &ToyEffect, fb: &ToyEffect) -> GlobalEffect {
    star_with(fa, fb, StarVariant::Standard)
}

/// `F̂_A ⊗ F̂_B + (tr F̂_A / tr S_A)(tr F̂_B / tr S_B)·A_A ⊗ A_B`, reordered to
/// copy order.
pub fn star_with(fa: &ToyEffect, fb: &ToyEffect, variant: StarVariant) -> GlobalEffect {
    let (d_a, d_b) = (fa.d(), fb.d());
    let mut split = kron(fa.matrix(), fb.matrix());
    if variant == StarVariant::Standard {
        let (_, anti_a) = exchange_projectors(d_a);
        let (_, anti_b) = exchange_projectors(d_b);
        let weight = fa.trace() / sym_trace(d_a) * fb.trace() / sym_trace(d_b);
        split += kron(&anti_a, &anti_b) * C64::new(weight, 0.0);
    }
    GlobalEffect {
        d_a,
        d_b,
        matrix: to_copy_order(&split, d_a, d_b),
        provenance: Provenance::Product(Box::new(fa.clone()), Box::new(fb.clone())),
    }
}

fn sym_trace(d: usize) -> f64 {
    (d * (d + 1)) as f64 / 2.0
}

/// `(F_A ⋆ F_B)(ψ_AB)`.
pub fn joint_prob(fa: &ToyEffect, fb: &ToyEffect, psi: &BipartiteVector) -> Result<f64, ToyError> {
    check_dim(fa.d(), psi.d_a)?;
    check_dim(fb.d(), psi.d_b)?;
    star(fa, fb).eval(psi)
}

/// Weighted single-copy states whose marginal images sum to a toy state.
pub type MarginalWitness = Vec<(f64, ComplexMatrix)>;

/// `ω̄_A = tr_B(S_B Ψ) + (S_A / tr S_A)·tr(A_A ⊗ A_B Ψ)` with
/// `Ψ = |ψ⟩⟨ψ|^{⊗2}`.
pub fn reduced_state(psi: &BipartiteVector) -> ToyState {
    let (d_a, d_b) = (psi.d_a, psi.d_b);
    let big = psi.doubled_split();
    let (sym_b, anti_b) = exchange_projectors(d_b);
    let (_, anti_a) = exchange_projectors(d_a);
    let shape = FactorShape::new(vec![d_a * d_a, d_b * d_b]).expect("positive dimensions");
    let first = partial_trace(
        &(kron(&crate::tensor::identity(d_a * d_a), &sym_b) * &big),
        &shape,
        &[0],
    )
    .expect("shape matches");
    let anti = (kron(&anti_a, &anti_b) * &big).trace().re;
    let matrix = first + normalized_symmetric(d_a) * C64::new(anti, 0.0);
    ToyState::with_witness(d_a, matrix, vec![(1.0, psi.marginal_a())])
}

/// The closed form `S(ρ⊗ρ)S + (1 − tr S(ρ⊗ρ)S)·S̃` with `ρ = tr_B |ψ⟩⟨ψ|`.
pub fn reduced_state_closed_form(psi: &BipartiteVector) -> ComplexMatrix {
    marginal_image(&psi.marginal_a())
}

/// Weight `(u_A ⋆ F_B)(ψ_AB)` and normalized conditional state of `A` given
/// outcome `F_B` on `B`.
pub fn conditional_state(
    psi: &BipartiteVector,
    fb: &ToyEffect,
) -> Result<(f64, ToyState), ToyError> {
    let (weight, matrix, witness) = unnormalized_conditional(psi, fb)?;
    if weight < ZERO_BRANCH_TOL {
        return Err(ToyError::ZeroProbabilityBranch(weight));
    }
    let scale = 1.0 / weight;
    let witness = witness
        .into_iter()
        .map(|(p, rho)| (p * scale, rho))
        .collect();
    Ok((
        weight,
        ToyState::with_witness(psi.d_a, matrix * C64::new(scale, 0.0), witness),
    ))
}

/// `S_A tr_B((I ⊗ F̂_B) Ψ) S_A + tr(A_A ⊗ A_B Ψ)(tr F̂_B / tr S_B)·S̃_A`,
/// its trace, and its decomposition read off the terms of `F̂_B`.
pub fn unnormalized_conditional(
    psi: &BipartiteVector,
    fb: &ToyEffect,
) -> Result<(f64, ComplexMatrix, MarginalWitness), ToyError> {
    let (d_a, d_b) = (psi.d_a, psi.d_b);
    check_dim(d_b, fb.d())?;
    let big = psi.doubled_split();
    let (sym_a, anti_a) = exchange_projectors(d_a);
    let (_, anti_b) = exchange_projectors(d_b);
    let shape = FactorShape::new(vec![d_a * d_a, d_b * d_b])?;
    let traced = partial_trace(
        &(kron(&crate::tensor::identity(d_a * d_a), fb.matrix()) * &big),
        &shape,
        &[0],
    )?;
    let anti = (kron(&anti_a, &anti_b) * &big).trace().re;
    let mixed_weight = anti * fb.trace() / sym_trace(d_b);
    let matrix = &sym_a * traced * &sym_a + normalized_symmetric(d_a) * C64::new(mixed_weight, 0.0);
    let weight = matrix.trace().re;

    let mut witness = Vec::new();
    for (alpha, phi) in fb.terms() {
        let chi = psi.contract_b(phi);
        let norm_sq = chi.norm_squared();
        if norm_sq * norm_sq * alpha > 0.0 {
            let unit = StateVector::normalized(chi).expect("nonzero");
            witness.push((alpha * norm_sq * norm_sq, unit.projector()));
        }
    }
    if mixed_weight > 0.0 {
        witness.push((mixed_weight, maximally_mixed(d_a)));
    }
    Ok((weight, matrix, witness))
}

/// `F'_A` with `F'_A(ψ) = F_AB(ψ ⊗ φ_B)`, decomposed according to the
/// provenance of `F_AB`.
pub fn induced_local_effect(
    f_ab: &GlobalEffect,
    phi_b: &StateVector,
) -> Result<ToyEffect, ToyError> {
    check_dim(f_ab.d_b, phi_b.dim())?;
    let (terms, complement) = induced_terms(f_ab, phi_b)?;
    ToyEffect::from_terms(f_ab.d_a, terms, complement)
}

fn induced_terms(f_ab: &GlobalEffect, phi_b: &StateVector) -> Result<(Terms, Terms), ToyError> {
    let d_a = f_ab.d_a;
    match &f_ab.provenance {
        Provenance::Product(fa, fb) => {
            // The A_A ⊗ A_B part vanishes on φ_B^{⊗2}.
            let w = fb.eval(phi_b)?.clamp(0.0, 1.0);
            let terms = fa.terms().iter().map(|(a, v)| (a * w, v.clone())).collect();
            let mut complement = fa.complement().to_vec();
            complement.extend(fa.terms().iter().map(|(a, v)| (a * (1.0 - w), v.clone())));
            Ok((terms, complement))
        }
        Provenance::Intrinsic(effect) => {
            let contract = |terms: &[(f64, StateVector)]| -> Terms {
                terms
                    .iter()
                    .filter_map(|(alpha, big)| {
                        let joint = BipartiteVector {
                            d_a,
                            d_b: f_ab.d_b,
                            state: big.clone(),
                        };
                        let chi = joint.contract_b(phi_b);
                        let norm_sq = chi.norm_squared();
                        let weight = alpha * norm_sq * norm_sq;
                        (weight > 0.0)
                            .then(|| (weight, StateVector::normalized(chi).expect("nonzero")))
                    })
                    .collect()
            };
            Ok((contract(effect.terms()), contract(effect.complement())))
        }
        Provenance::Mixture(parts) => {
            let mut terms = Vec::new();
            let mut complement = Vec::new();
            let mut total = 0.0;
            for (w, part) in parts {
                let (t, c) = induced_terms(part, phi_b)?;
                terms.extend(t.into_iter().map(|(a, v)| (a * w, v)));
                complement.extend(c.into_iter().map(|(a, v)| (a * w, v)));
                total += w;
            }
            let slack = (1.0 - total).max(0.0);
            if slack > 0.0 {
                complement.extend(
                    super::design::symmetric_design(d_a)
                        .into_iter()
                        .map(|(a, v)| (a * slack, v)),
                );
            }
            Ok((terms, complement))
        }
    }
}

/// `S_A tr_B[(I ⊗ |φ⟩⟨φ|^{⊗2}) F̂_AB] S_A`, computed directly from the matrix.
pub fn induced_local_matrix(
    f_ab: &GlobalEffect,
    phi_b: &StateVector,
) -> Result<ComplexMatrix, ToyError> {
    let (d_a, d_b) = (f_ab.d_a, f_ab.d_b);
    check_dim(d_b, phi_b.dim())?;
    let split = to_split_order(&f_ab.matrix, d_a, d_b);
    let (sym_a, _) = exchange_projectors(d_a);
    let probe = kron(
        &crate::tensor::identity(d_a * d_a),
        &phi_b.doubled_projector(),
    );
    let shape = FactorShape::new(vec![d_a * d_a, d_b * d_b])?;
    let traced = partial_trace(&(probe * split), &shape, &[0])?;
    Ok(&sym_a * traced * &sym_a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{random_pure_state, rel_diff, symmetric_projector};
    use crate::toy::canonical_measurement;

    #[test]
    fn unit_star_unit_is_global_symmetric_projector() {
        for (d_a, d_b) in [(2, 2), (2, 3), (3, 2)] {
            let unit = GlobalEffect::unit(d_a, d_b);
            assert!(rel_diff(unit.matrix(), &symmetric_projector(d_a * d_b)) < 1e-12);
        }
    }

    #[test]
    fn zero_star_is_zero() {
        let f = star(
            &ToyEffect::zero(2),
            &canonical_measurement(3).unwrap().effects()[0],
        );
        assert!(f.matrix().norm() < 1e-15);
    }

    #[test]
    fn singlet_value() {
        let half = canonical_measurement(2).unwrap().effects()[0].clone();
        let half = &half;
        let p = joint_prob(half, half, &BipartiteVector::singlet()).unwrap();
        assert!((p - 1.0 / 144.0).abs() < 1e-14);
    }

    #[test]
    fn reduced_state_examples() {
        let a = random_pure_state(2, 1);
        let b = random_pure_state(3, 2);
        let product = reduced_state(&BipartiteVector::product(&a, &b));
        assert!(rel_diff(product.matrix(), &a.doubled_projector()) < 1e-12);
        let bell = reduced_state(&BipartiteVector::maximally_entangled(2));
        assert!(rel_diff(bell.matrix(), &normalized_symmetric(2)) < 1e-12);
    }

    #[test]
    fn conditional_on_unit_is_reduced() {
        let psi = BipartiteVector::new(2, 3, random_pure_state(6, 3)).unwrap();
        let (w, state) = conditional_state(&psi, &ToyEffect::unit(3)).unwrap();
        assert!((w - 1.0).abs() < 1e-12);
        assert!(rel_diff(state.matrix(), reduced_state(&psi).matrix()) < 1e-12);
    }

    #[test]
    fn zero_branch() {
        let psi = BipartiteVector::product(&StateVector::basis(2, 0), &StateVector::basis(2, 0));
        let effect = canonical_measurement(2).unwrap().effects()[1].clone();
        let effect = &effect;
        assert!(matches!(
            conditional_state(&psi, effect),
            Err(ToyError::ZeroProbabilityBranch(_))
        ));
    }

    #[test]
    fn induced_from_product_and_unit() {
        let canonical = canonical_measurement(3).unwrap();
        let fa = &canonical.effects()[2];
        let fb = canonical_measurement(2).unwrap().effects()[3].clone();
        let fb = &fb;
        let phi = random_pure_state(2, 8);
        let induced = induced_local_effect(&star(fa, fb), &phi).unwrap();
        let expected = fa.matrix() * C64::new(fb.eval(&phi).unwrap(), 0.0);
        assert!(rel_diff(induced.matrix(), &expected) < 1e-12);
        let unit = induced_local_effect(&GlobalEffect::unit(3, 2), &phi).unwrap();
        assert!(rel_diff(unit.matrix(), &symmetric_projector(3)) < 1e-12);
    }
}
