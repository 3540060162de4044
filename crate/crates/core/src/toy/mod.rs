//! The toy theory in which outcome probabilities are linear in
//! `|ψ⟩⟨ψ|^{⊗2}`: effects are nonnegative combinations of doubled pure
//! projectors bounded by the symmetric projector `S`, which plays the role of
//! the unit effect.

mod composite;
mod constraints;
mod design;
mod effect;
mod figure;
mod membership;
mod nnls;
mod random;
mod state;

pub use composite::{
    conditional_state, induced_local_effect, induced_local_matrix, joint_prob, reduced_state,
    reduced_state_closed_form, star, star_with, to_copy_order, to_split_order,
    unnormalized_conditional, BipartiteVector, GlobalEffect, MarginalWitness, Provenance,
    StarVariant, ZERO_BRANCH_TOL,
};
pub use constraints::{
    verify_constraints, verify_constraints_with, ConstraintReport, ConstraintResult,
    CONSTRAINT_NAMES, CONSTRAINT_TOL,
};
pub use design::{is_prime, mutually_unbiased_bases, phase_family, phase_order, symmetric_design};
pub use effect::{
    canonical_measurement, doubled_sum, opf_eval, validate_effect, EffectCandidate, Terms,
    ToyEffect, ToyMeasurement,
};
pub use figure::{figure_data, project, FigureData, PointKind};
pub use membership::{
    bloch_density, is_reduced_state, MembershipReport, MEMBERSHIP_TOL, QUBIT_LIPSCHITZ,
};
pub use nnls::{fit_doubled_projectors, FIT_TOL, FRAME_SIZE};
pub use random::{random_effect, random_global_effect, random_measurement};
pub use state::{
    convex_decomposition, hyper_decohere, hyper_decohere_matrix, invert_marginal_image,
    marginal_image, maximally_mixed, normalized_symmetric, Ensemble, ToyState, DECOMPOSITION_TOL,
};

use thiserror::Error;

use crate::tensor::TensorError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NotAnEffectReason {
    SpectralViolation,
    IndecomposableEffect,
    IndecomposableComplement,
}

impl std::fmt::Display for NotAnEffectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NotAnEffectReason::SpectralViolation => "spectral violation",
            NotAnEffectReason::IndecomposableEffect => "indecomposable effect",
            NotAnEffectReason::IndecomposableComplement => "indecomposable complement",
        })
    }
}

#[derive(Debug, Error)]
pub enum ToyError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not an effect ({reason}): {detail}")]
    NotAnEffect {
        reason: NotAnEffectReason,
        detail: String,
    },
    #[error("not a state: {0}")]
    NotAState(String),
    #[error("effects do not sum to the unit effect (residual {0:.3e})")]
    NotAMeasurement(f64),
    #[error("conditioning on an outcome of probability {0:.3e}")]
    ZeroProbabilityBranch(f64),
    #[error("convex decomposition failed: {0}")]
    DecompositionFailed(String),
    #[error("{0} is not prime")]
    NotPrime(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<(), ToyError> {
    if expected == found {
        Ok(())
    } else {
        Err(ToyError::DimensionMismatch { expected, found })
    }
}
