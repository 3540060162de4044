//! Mixed states of the toy theory and their explicit ensembles.

use crate::tensor::{
    hermitian_spectrum, identity, is_hermitian, kron, partial_trace, rel_diff, symmetric_projector,
    ComplexMatrix, FactorShape, StateVector, C64, MATRIX_TOL,
};

use super::design::{phase_family, symmetric_design};
use super::effect::doubled_sum;
use super::nnls::fit_doubled_projectors;
use super::{check_dim, ToyError};

/// Residual allowed when reconstructing a state from an ensemble.
pub const DECOMPOSITION_TOL: f64 = 1e-9;

/// `S̃ = S / tr S`.
pub fn normalized_symmetric(d: usize) -> ComplexMatrix {
    let sym = symmetric_projector(d);
    let tr = (d * (d + 1)) as f64 / 2.0;
    sym * C64::new(1.0 / tr, 0.0)
}

/// `S(ρ⊗ρ)S + ½(1 − tr ρ²)·S̃`: the state induced on one side by a bipartite
/// pure state whose marginal is `ρ`. Pure `ρ = |ψ⟩⟨ψ|` gives `|ψ⟩⟨ψ|^{⊗2}`,
/// and `ρ = I/d` gives `S̃`.
pub fn marginal_image(rho: &ComplexMatrix) -> ComplexMatrix {
    let d = rho.nrows();
    let sym = symmetric_projector(d);
    let purity = (rho * rho).trace().re;
    &sym * kron(rho, rho) * &sym + normalized_symmetric(d) * C64::new(0.5 * (1.0 - purity), 0.0)
}

/// A mixed state `ω̄` on the symmetric subspace of `C^d ⊗ C^d`.
///
/// States built from known ingredients keep a witness: weights `p_i` and
/// density matrices `ρ_i` with `ω̄ = Σ p_i·marginal_image(ρ_i)`.
#[derive(Debug, Clone)]
pub struct ToyState {
    d: usize,
    matrix: ComplexMatrix,
    witness: Option<Vec<(f64, ComplexMatrix)>>,
}

impl ToyState {
    /// Validates positivity, unit trace and symmetric support.
    pub fn from_matrix(d: usize, matrix: ComplexMatrix) -> Result<Self, ToyError> {
        check_dim(d * d, matrix.nrows())?;
        check_dim(d * d, matrix.ncols())?;
        if !is_hermitian(&matrix) {
            return Err(ToyError::NotAState("matrix is not Hermitian".into()));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > MATRIX_TOL {
            return Err(ToyError::NotAState(format!("trace is {tr}")));
        }
        let sym = symmetric_projector(d);
        if rel_diff(&(&sym * &matrix * &sym), &matrix) > MATRIX_TOL {
            return Err(ToyError::NotAState(
                "not supported on the symmetric subspace".into(),
            ));
        }
        let low = hermitian_spectrum(&matrix)?.min();
        if low < -MATRIX_TOL {
            return Err(ToyError::NotAState(format!(
                "negative eigenvalue {low:.3e}"
            )));
        }
        Ok(Self {
            d,
            matrix,
            witness: None,
        })
    }

    /// `|ψ⟩⟨ψ|^{⊗2}`.
    pub fn pure(psi: &StateVector) -> Self {
        Self {
            d: psi.dim(),
            matrix: psi.doubled_projector(),
            witness: Some(vec![(1.0, psi.projector())]),
        }
    }

    /// `marginal_image(ρ)` for a density matrix `ρ`.
    pub fn from_marginal(rho: &ComplexMatrix) -> Result<Self, ToyError> {
        Self::mixture_of_marginals(vec![(1.0, rho.clone())])
    }

    /// `Σ p_i |ψ_i⟩⟨ψ_i|^{⊗2}`.
    pub fn from_ensemble(ensemble: &Ensemble) -> Result<Self, ToyError> {
        Self::mixture_of_marginals(
            ensemble
                .members
                .iter()
                .map(|(p, v)| (*p, v.projector()))
                .collect(),
        )
    }

    /// `Σ p_i·marginal_image(ρ_i)`.
    pub fn mixture_of_marginals(parts: Vec<(f64, ComplexMatrix)>) -> Result<Self, ToyError> {
        let d = parts
            .first()
            .map(|(_, rho)| rho.nrows())
            .ok_or_else(|| ToyError::InvalidArgument("empty mixture".into()))?;
        let total: f64 = parts.iter().map(|(p, _)| p).sum();
        if parts.iter().any(|(p, _)| *p < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(ToyError::InvalidArgument(format!(
                "mixture weights sum to {total}"
            )));
        }
        let mut matrix = ComplexMatrix::zeros(d * d, d * d);
        for (p, rho) in &parts {
            check_dim(d, rho.nrows())?;
            check_density(rho)?;
            matrix += marginal_image(rho) * C64::new(*p, 0.0);
        }
        Ok(Self {
            d,
            matrix,
            witness: Some(parts),
        })
    }

    pub(crate) fn with_witness(
        d: usize,
        matrix: ComplexMatrix,
        witness: Vec<(f64, ComplexMatrix)>,
    ) -> Self {
        Self {
            d,
            matrix,
            witness: Some(witness),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn witness(&self) -> Option<&[(f64, ComplexMatrix)]> {
        self.witness.as_deref()
    }

    /// `tr₂ ω̄`, the one-copy marginal.
    pub fn single_copy_marginal(&self) -> ComplexMatrix {
        let shape = FactorShape::new(vec![self.d, self.d]).expect("positive dimensions");
        partial_trace(&self.matrix, &shape, &[0]).expect("shape matches")
    }
}

fn check_density(rho: &ComplexMatrix) -> Result<(), ToyError> {
    let tr = rho.trace().re;
    if !is_hermitian(rho) || (tr - 1.0).abs() > MATRIX_TOL {
        return Err(ToyError::NotAState("not a density matrix".into()));
    }
    if hermitian_spectrum(rho)?.min() < -MATRIX_TOL {
        return Err(ToyError::NotAState("density matrix is not positive".into()));
    }
    Ok(())
}

/// Finite ensemble `{(p_i, ψ_i)}` of pure states.
#[derive(Debug, Clone, Default)]
pub struct Ensemble {
    pub members: Vec<(f64, StateVector)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, StateVector)>) -> Result<Self, ToyError> {
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        if members.iter().any(|(p, _)| *p < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(ToyError::InvalidArgument(format!(
                "ensemble weights sum to {total}"
            )));
        }
        Ok(Self { members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `Σ p_i |ψ_i⟩⟨ψ_i|^{⊗2}`.
    pub fn doubled_matrix(&self) -> ComplexMatrix {
        let d = self.members.first().map_or(0, |(_, v)| v.dim());
        doubled_sum(d, &self.members)
    }

    /// Merges members that are the same ray and drops zero weights.
    fn merged(members: Vec<(f64, StateVector)>) -> Self {
        let mut out: Vec<(f64, StateVector)> = Vec::new();
        for (p, v) in members {
            if p <= 0.0 {
                continue;
            }
            match out.iter_mut().find(|(_, u)| same_ray(u, &v)) {
                Some(slot) => slot.0 += p,
                None => out.push((p, v)),
            }
        }
        Self { members: out }
    }
}

/// `true` when `v = e^{iφ} u` to within `1e-13` in norm. Comparing overlaps
/// instead would merge rays up to `~1e-6` apart.
fn same_ray(u: &StateVector, v: &StateVector) -> bool {
    let overlap = u.inner(v);
    let size = overlap.norm();
    if size < 0.5 {
        return false;
    }
    let phase = overlap / size;
    (v.amplitudes() - u.amplitudes() * phase).norm() < 1e-13
}

/// Explicit ensemble for `marginal_image(ρ)`.
///
/// With `ρ = Σ α_j |j⟩⟨j|` and `P = Σ_{i<j} α_i α_j`, the target splits as
/// `½·avg_θ |v_θ⟩⟨v_θ|^{⊗2} + ½(Σ α_i² |ii⟩⟨ii| + 2P·S̃)` where
/// `v_θ = Σ e^{iθ_j} √α_j |j⟩`; the phase average is taken over a finite
/// group and `S̃` is expanded with the symmetric design.
fn marginal_ensemble(rho: &ComplexMatrix) -> Result<Vec<(f64, StateVector)>, ToyError> {
    let d = rho.nrows();
    let spectrum = hermitian_spectrum(rho)?;
    if spectrum.max() > 1.0 - 1e-12 {
        return Ok(vec![(1.0, spectrum.vectors[0].clone())]);
    }
    // Eigenvalues at rounding level are zeroed so the phase family does not
    // spread over numerically empty directions.
    let alphas: Vec<f64> = spectrum
        .values
        .iter()
        .map(|&a| if a < 1e-14 { 0.0 } else { a })
        .collect();
    let basis = ComplexMatrix::from_columns(
        &spectrum
            .vectors
            .iter()
            .map(|v| v.amplitudes().clone())
            .collect::<Vec<_>>(),
    );
    let in_basis =
        |v: &StateVector| StateVector::normalized(&basis * v.amplitudes()).expect("unitary image");

    let amplitudes: Vec<f64> = alphas.iter().map(|a| a.sqrt()).collect();
    let family = phase_family(&amplitudes);
    let phase_weight = 0.5 / family.len() as f64;
    let mut members: Vec<(f64, StateVector)> =
        family.iter().map(|v| (phase_weight, in_basis(v))).collect();

    for (j, a) in alphas.iter().enumerate() {
        members.push((0.5 * a * a, spectrum.vectors[j].clone()));
    }
    let pairs: f64 = (0..d)
        .flat_map(|i| ((i + 1)..d).map(move |j| (i, j)))
        .map(|(i, j)| alphas[i] * alphas[j])
        .sum();
    let tr_sym = (d * (d + 1)) as f64 / 2.0;
    for (w, v) in symmetric_design(d) {
        members.push((pairs * w / tr_sym, v));
    }
    Ok(members)
}

/// Recovers `ρ` from `ω̄ = marginal_image(ρ)` using
/// `tr₂ ω̄ = ½(ρ + ρ²) + (c/d)·I`, solving for `c` by bisection on `tr ρ = 1`.
/// Returns the candidate regardless of whether `ω̄` is in the family.
pub fn invert_marginal_image(omega: &ComplexMatrix) -> Result<ComplexMatrix, ToyError> {
    let d = (omega.nrows() as f64).sqrt().round() as usize;
    check_dim(d * d, omega.nrows())?;
    let shape = FactorShape::new(vec![d, d])?;
    let marginal = partial_trace(omega, &shape, &[0])?;
    let spectrum = hermitian_spectrum(&marginal)?;
    let eigenvalues = |c: f64| -> Vec<f64> {
        spectrum
            .values
            .iter()
            .map(|t| {
                let disc = (1.0 + 8.0 * (t - c / d as f64)).max(0.0);
                ((disc.sqrt() - 1.0) / 2.0).max(0.0)
            })
            .collect()
    };
    // Σλ(c) is nonincreasing in c.
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if eigenvalues(mid).iter().sum::<f64>() > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambdas = eigenvalues(0.5 * (lo + hi));
    let total: f64 = lambdas.iter().sum();
    let mut rho = ComplexMatrix::zeros(d, d);
    for (l, v) in lambdas.iter().zip(&spectrum.vectors) {
        rho += v.projector() * C64::new(l / total.max(f64::MIN_POSITIVE), 0.0);
    }
    Ok(rho)
}

/// Explicit finite ensemble `{(p_i, ψ_i)}` with `Σ p_i |ψ_i⟩⟨ψ_i|^{⊗2} = ω̄`.
///
/// Uses the state's witness when present. Otherwise `ω̄` is matched against
/// `marginal_image(ρ)` with `ρ` recovered from the one-copy marginal, and as
/// a last resort a nonnegative fit over a finite frame is attempted.
pub fn convex_decomposition(omega: &ToyState) -> Result<Ensemble, ToyError> {
    let members = match omega.witness() {
        Some(parts) => {
            let mut members = Vec::new();
            for (p, rho) in parts {
                members.extend(marginal_ensemble(rho)?.into_iter().map(|(q, v)| (p * q, v)));
            }
            members
        }
        None => {
            let rho = invert_marginal_image(omega.matrix())?;
            if rel_diff(&marginal_image(&rho), omega.matrix()) <= DECOMPOSITION_TOL {
                marginal_ensemble(&rho)?
            } else {
                fit_doubled_projectors(omega.d(), omega.matrix()).ok_or_else(|| {
                    ToyError::DecompositionFailed("state is outside the constructive family".into())
                })?
            }
        }
    };
    let ensemble = Ensemble::merged(members);
    let residual = rel_diff(&ensemble.doubled_matrix(), omega.matrix());
    if residual > DECOMPOSITION_TOL {
        return Err(ToyError::DecompositionFailed(format!(
            "reconstruction residual {residual:.3e}"
        )));
    }
    Ok(ensemble)
}

/// `tr₂(|ψ⟩⟨ψ|^{⊗2}) ⊗ |0⟩⟨0| = |ψ⟩⟨ψ| ⊗ |0⟩⟨0|`.
pub fn hyper_decohere(psi: &StateVector) -> ComplexMatrix {
    kron(
        &psi.projector(),
        &StateVector::basis(psi.dim(), 0).projector(),
    )
}

/// The same map on a (possibly mixed) two-copy matrix: `tr₂(ω) ⊗ |0⟩⟨0|`.
pub fn hyper_decohere_matrix(omega: &ComplexMatrix) -> Result<ComplexMatrix, ToyError> {
    let d = (omega.nrows() as f64).sqrt().round() as usize;
    check_dim(d * d, omega.nrows())?;
    let shape = FactorShape::new(vec![d, d])?;
    let reduced = partial_trace(omega, &shape, &[0])?;
    Ok(kron(&reduced, &StateVector::basis(d, 0).projector()))
}

/// `I/d`.
pub fn maximally_mixed(d: usize) -> ComplexMatrix {
    identity(d) * C64::new(1.0 / d as f64, 0.0)
}
