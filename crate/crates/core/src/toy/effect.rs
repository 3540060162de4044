use crate::tensor::{
    hermitian_spectrum, is_hermitian, rel_diff, symmetric_projector, ComplexMatrix, StateVector,
    C64, MATRIX_TOL,
};

use super::design::{is_prime, mutually_unbiased_bases, symmetric_design};
use super::nnls::fit_doubled_projectors;
use super::{check_dim, NotAnEffectReason, ToyError};

/// Weighted list of vectors standing for `Σ w |φ⟩⟨φ|^{⊗2}`.
pub type Terms = Vec<(f64, StateVector)>;

/// `Σ w |φ⟩⟨φ|^{⊗2}` on `C^d ⊗ C^d`.
pub fn doubled_sum(d: usize, terms: &[(f64, StateVector)]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for (w, v) in terms {
        out += v.doubled_projector() * C64::new(*w, 0.0);
    }
    out
}

/// A local effect `F̂ = Σ α_i |φ_i⟩⟨φ_i|^{⊗2}` whose complement `S − F̂`
/// admits a decomposition of the same kind.
#[derive(Debug, Clone)]
pub struct ToyEffect {
    d: usize,
    terms: Terms,
    complement: Terms,
    matrix: ComplexMatrix,
}

impl ToyEffect {
    /// Builds an effect from explicit decompositions of `F̂` and `S − F̂`,
    /// verifying both.
    pub fn from_terms(d: usize, terms: Terms, complement: Terms) -> Result<Self, ToyError> {
        if d < 2 {
            return Err(ToyError::InvalidArgument(format!(
                "local dimension must be at least 2, got {d}"
            )));
        }
        for (w, v) in terms.iter().chain(&complement) {
            check_dim(d, v.dim())?;
            if !(*w >= 0.0 && w.is_finite()) {
                return Err(ToyError::InvalidArgument(format!(
                    "term weight {w} is not a nonnegative number"
                )));
            }
        }
        let matrix = doubled_sum(d, &terms);
        let rest = doubled_sum(d, &complement);
        let sym = symmetric_projector(d);
        let residual = rel_diff(&(&matrix + &rest), &sym);
        if residual > MATRIX_TOL {
            return Err(ToyError::NotAnEffect {
                reason: NotAnEffectReason::IndecomposableComplement,
                detail: format!("terms and complement miss S by {residual:.3e}"),
            });
        }
        check_spectrum(&matrix, &sym)?;
        Ok(Self {
            d,
            terms,
            complement,
            matrix,
        })
    }

    /// Validates a Hermitian matrix on `C^d ⊗ C^d` as an effect, searching
    /// for both decompositions over a finite frame.
    pub fn from_matrix(d: usize, matrix: ComplexMatrix) -> Result<Self, ToyError> {
        if d < 2 {
            return Err(ToyError::InvalidArgument(format!(
                "local dimension must be at least 2, got {d}"
            )));
        }
        check_dim(d * d, matrix.nrows())?;
        check_dim(d * d, matrix.ncols())?;
        if !is_hermitian(&matrix) {
            return Err(ToyError::NotAnEffect {
                reason: NotAnEffectReason::SpectralViolation,
                detail: "matrix is not Hermitian".into(),
            });
        }
        let sym = symmetric_projector(d);
        check_spectrum(&matrix, &sym)?;
        let rest = &sym - &matrix;
        let terms = decompose_or_empty(d, &matrix).ok_or_else(|| ToyError::NotAnEffect {
            reason: NotAnEffectReason::IndecomposableEffect,
            detail: "no decomposition into doubled projectors found".into(),
        })?;
        let complement = decompose_or_empty(d, &rest).ok_or_else(|| ToyError::NotAnEffect {
            reason: NotAnEffectReason::IndecomposableComplement,
            detail: "no decomposition of S − F into doubled projectors found".into(),
        })?;
        Ok(Self {
            d,
            terms,
            complement,
            matrix,
        })
    }

    /// The unit effect `F̂ = S`.
    pub fn unit(d: usize) -> Self {
        Self::from_terms(d, symmetric_design(d), Vec::new()).expect("design sums to S")
    }

    /// The zero effect.
    pub fn zero(d: usize) -> Self {
        Self::from_terms(d, Vec::new(), symmetric_design(d)).expect("design sums to S")
    }

    /// `weight · F` for `weight ∈ [0, 1]`.
    pub fn scaled(&self, weight: f64) -> Result<Self, ToyError> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(ToyError::InvalidArgument(format!(
                "scale {weight} outside [0, 1]"
            )));
        }
        let terms = self
            .terms
            .iter()
            .map(|(w, v)| (w * weight, v.clone()))
            .collect();
        let mut complement = self.complement.clone();
        complement.extend(
            self.terms
                .iter()
                .map(|(w, v)| (w * (1.0 - weight), v.clone())),
        );
        Ok(Self {
            d: self.d,
            terms,
            complement,
            matrix: &self.matrix * C64::new(weight, 0.0),
        })
    }

    /// `U^{⊗2} F̂ U^{†⊗2}`, carried out on the decompositions.
    pub fn rotated(&self, unitary: &ComplexMatrix) -> Result<Self, ToyError> {
        check_dim(self.d, unitary.nrows())?;
        let rotate = |terms: &Terms| -> Terms {
            terms
                .iter()
                .map(|(w, v)| {
                    (
                        *w,
                        StateVector::normalized(unitary * v.amplitudes()).expect("unitary image"),
                    )
                })
                .collect()
        };
        Self::from_terms(self.d, rotate(&self.terms), rotate(&self.complement))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &[(f64, StateVector)] {
        &self.terms
    }

    pub fn complement(&self) -> &[(f64, StateVector)] {
        &self.complement
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `tr F̂`.
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `F(ψ) = tr(F̂ |ψ⟩⟨ψ|^{⊗2})`.
    pub fn eval(&self, psi: &StateVector) -> Result<f64, ToyError> {
        check_dim(self.d, psi.dim())?;
        let doubled = psi.amplitudes().kronecker(psi.amplitudes());
        Ok(doubled.dotc(&(&self.matrix * &doubled)).re)
    }
}

/// `F(ψ)` for a toy effect.
pub fn opf_eval(effect: &ToyEffect, psi: &StateVector) -> Result<f64, ToyError> {
    effect.eval(psi)
}

/// Input accepted by [`validate_effect`].
#[derive(Debug, Clone)]
pub enum EffectCandidate {
    Matrix {
        d: usize,
        matrix: ComplexMatrix,
    },
    Terms {
        d: usize,
        terms: Terms,
        complement: Terms,
    },
}

pub fn validate_effect(candidate: EffectCandidate) -> Result<ToyEffect, ToyError> {
    match candidate {
        EffectCandidate::Matrix { d, matrix } => ToyEffect::from_matrix(d, matrix),
        EffectCandidate::Terms {
            d,
            terms,
            complement,
        } => ToyEffect::from_terms(d, terms, complement),
    }
}

fn check_spectrum(matrix: &ComplexMatrix, sym: &ComplexMatrix) -> Result<(), ToyError> {
    let support = rel_diff(&(sym * matrix * sym), matrix);
    if support > MATRIX_TOL {
        return Err(ToyError::NotAnEffect {
            reason: NotAnEffectReason::SpectralViolation,
            detail: format!("not supported on the symmetric subspace (off by {support:.3e})"),
        });
    }
    let low = hermitian_spectrum(matrix)?.min();
    let high = hermitian_spectrum(&(sym - matrix))?.min();
    if low < -MATRIX_TOL || high < -MATRIX_TOL {
        return Err(ToyError::NotAnEffect {
            reason: NotAnEffectReason::SpectralViolation,
            detail: format!("0 ≤ F ≤ S violated (min eigenvalues {low:.3e}, {high:.3e})"),
        });
    }
    Ok(())
}

fn decompose_or_empty(d: usize, target: &ComplexMatrix) -> Option<Terms> {
    if target.norm() <= MATRIX_TOL {
        return Some(Vec::new());
    }
    fit_doubled_projectors(d, target)
}

/// A list of effects summing to the unit effect.
///
/// Every normalized list of valid effects is accepted as a measurement.
#[derive(Debug, Clone)]
pub struct ToyMeasurement {
    effects: Vec<ToyEffect>,
}

impl ToyMeasurement {
    pub fn new(effects: Vec<ToyEffect>) -> Result<Self, ToyError> {
        let Some(first) = effects.first() else {
            return Err(ToyError::InvalidArgument(
                "a measurement needs at least one effect".into(),
            ));
        };
        let d = first.d();
        let mut total = ComplexMatrix::zeros(d * d, d * d);
        for effect in &effects {
            check_dim(d, effect.d())?;
            total += effect.matrix();
        }
        let residual = rel_diff(&total, &symmetric_projector(d));
        if residual > MATRIX_TOL {
            return Err(ToyError::NotAMeasurement(residual));
        }
        Ok(Self { effects })
    }

    pub fn d(&self) -> usize {
        self.effects[0].d()
    }

    pub fn effects(&self) -> &[ToyEffect] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// Outcome probabilities on `ψ`.
    pub fn probabilities(&self, psi: &StateVector) -> Result<Vec<f64>, ToyError> {
        self.effects.iter().map(|e| e.eval(psi)).collect()
    }
}

/// The `d(d+1)` effects `½|φ⟩⟨φ|^{⊗2}` over all vectors of `d + 1` mutually
/// unbiased bases, for prime `d`.
pub fn canonical_measurement(d: usize) -> Result<ToyMeasurement, ToyError> {
    let bases = mutually_unbiased_bases(d).ok_or(ToyError::NotPrime(d))?;
    let vectors: Vec<StateVector> = bases.into_iter().flatten().collect();
    let effects = (0..vectors.len())
        .map(|k| {
            let terms = vec![(0.5, vectors[k].clone())];
            let complement = vectors
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, v)| (0.5, v.clone()))
                .collect();
            ToyEffect::from_terms(d, terms, complement)
        })
        .collect::<Result<Vec<_>, _>>()?;
    debug_assert!(is_prime(d));
    ToyMeasurement::new(effects)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{random_pure_state, trace};

    #[test]
    fn unit_and_half_projector_values() {
        let psi = random_pure_state(3, 1);
        assert!((ToyEffect::unit(3).eval(&psi).unwrap() - 1.0).abs() < 1e-12);
        let phi = StateVector::basis(2, 0);
        let canonical = canonical_measurement(2).unwrap();
        let f = &canonical.effects()[0];
        assert!((f.eval(&phi).unwrap() - 0.5).abs() < 1e-12);
        assert!(f.eval(&StateVector::basis(2, 1)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn canonical_sums() {
        for (d, count) in [(2, 6), (3, 12), (5, 30), (7, 56)] {
            let m = canonical_measurement(d).unwrap();
            assert_eq!(m.len(), count);
            let total = m
                .effects()
                .iter()
                .fold(ComplexMatrix::zeros(d * d, d * d), |acc, e| {
                    acc + e.matrix()
                });
            assert!((&total - symmetric_projector(d)).norm() < 1e-12);
            assert!((trace(&total).re - (d * (d + 1) / 2) as f64).abs() < 1e-12);
        }
        assert!(matches!(
            canonical_measurement(4),
            Err(ToyError::NotPrime(4))
        ));
        assert!(matches!(
            canonical_measurement(6),
            Err(ToyError::NotPrime(6))
        ));
    }

    #[test]
    fn unit_matrix_validates_with_empty_complement() {
        let e = ToyEffect::from_matrix(2, symmetric_projector(2)).unwrap();
        assert!(e.complement().is_empty());
        assert!((e.trace() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn doubled_basis_projector_is_rejected() {
        let zero = StateVector::basis(2, 0).doubled_projector();
        let err = ToyEffect::from_matrix(2, zero).unwrap_err();
        assert!(matches!(
            err,
            ToyError::NotAnEffect {
                reason: NotAnEffectReason::IndecomposableComplement,
                ..
            }
        ));
    }

    #[test]
    fn canonical_effect_matrix_validates() {
        for d in [2, 3] {
            let m = canonical_measurement(d).unwrap();
            for effect in m.effects() {
                let found = ToyEffect::from_matrix(d, effect.matrix().clone()).unwrap();
                assert!(
                    rel_diff(
                        &doubled_sum(d, found.complement()),
                        &(symmetric_projector(d) - effect.matrix())
                    ) < 1e-9
                );
            }
        }
    }

    #[test]
    fn spectral_violations() {
        let over = symmetric_projector(2) * C64::new(1.5, 0.0);
        assert!(matches!(
            ToyEffect::from_matrix(2, over),
            Err(ToyError::NotAnEffect {
                reason: NotAnEffectReason::SpectralViolation,
                ..
            })
        ));
        let (_, anti) = crate::tensor::exchange_projectors(2);
        assert!(matches!(
            ToyEffect::from_matrix(2, anti),
            Err(ToyError::NotAnEffect {
                reason: NotAnEffectReason::SpectralViolation,
                ..
            })
        ));
    }

    #[test]
    fn scaling_keeps_validity() {
        let f = canonical_measurement(3).unwrap().effects()[4]
            .scaled(0.3)
            .unwrap();
        let rebuilt =
            ToyEffect::from_terms(3, f.terms().to_vec(), f.complement().to_vec()).unwrap();
        assert!(rel_diff(rebuilt.matrix(), f.matrix()) < 1e-12);
    }
}
