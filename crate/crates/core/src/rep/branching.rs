//! Restriction of `SU(mn)` irreps to `SU(m) × SU(n)` and the holism
//! certificates built on it.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use super::characters::CharacterCache;
use super::kronecker::kronecker;
use super::partition::{partitions, Partition};
use super::unitary::born_rep_partition;
use super::RepError;

/// `μ_f`: `mu` padded to `rows` rows, then widened by
/// `(f − |μ|)/rows` columns of height `rows` so that it has `f` boxes.
pub fn pad(mu: &Partition, rows: usize, f: usize) -> Result<Partition, RepError> {
    if mu.rows() > rows {
        return Err(RepError::TooManyRows {
            partition: mu.clone(),
            max_rows: rows,
        });
    }
    let size = mu.size();
    if rows == 0 || f < size || !(f - size).is_multiple_of(rows) {
        return Err(RepError::NonIntegerPadding {
            partition: mu.clone(),
            rows,
            target: f,
        });
    }
    let extra = (f - size) / rows;
    Partition::new((0..rows).map(|i| mu.part(i) + extra).collect())
}

/// Removes full columns of height `rows`: the canonical `SU(rows)` label.
pub fn strip_columns(mu: &Partition, rows: usize) -> Partition {
    if mu.rows() < rows {
        return mu.clone();
    }
    let width = mu.part(rows - 1);
    Partition::new(mu.parts().iter().map(|p| p - width).collect())
        .expect("subtracting the last row keeps parts decreasing")
}

/// Multiplicity of `Γ^m_μ ⊠ Γ^n_ν` in `Γ^{mn}_λ` restricted to
/// `SU(m) × SU(n)`, computed as `g(λ, μ_f, ν_f)` with `f = |λ|`. Zero when
/// either padding is impossible.
pub fn branching_multiplicity(
    cache: &CharacterCache,
    lambda: &Partition,
    m: usize,
    n: usize,
    mu: &Partition,
    nu: &Partition,
) -> Result<BigUint, RepError> {
    check_rows(lambda, m * n)?;
    check_rows(mu, m)?;
    check_rows(nu, n)?;
    let f = lambda.size();
    let (Ok(mu_f), Ok(nu_f)) = (pad(mu, m, f), pad(nu, n, f)) else {
        return Ok(BigUint::zero());
    };
    kronecker(cache, lambda, &mu_f, &nu_f)
}

fn check_rows(p: &Partition, max_rows: usize) -> Result<(), RepError> {
    if p.rows() > max_rows {
        return Err(RepError::TooManyRows {
            partition: p.clone(),
            max_rows,
        });
    }
    Ok(())
}

/// One summand `Γ^m_μ ⊠ Γ^n_ν` of a restriction, with its multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchTerm {
    /// Canonical `SU(m)` label (full columns removed).
    pub mu: Partition,
    /// Canonical `SU(n)` label.
    pub nu: Partition,
    /// `μ_f` and `ν_f`, the labels padded to `f = |λ|` boxes.
    pub mu_padded: Partition,
    pub nu_padded: Partition,
    #[serde(serialize_with = "crate::rep::serialize_decimal")]
    pub multiplicity: BigUint,
}

/// Full decomposition of `Γ^{mn}_λ` restricted to `SU(m) × SU(n)`.
///
/// Enumerates `μ_f ⊢ f` with at most `m` rows and `ν_f ⊢ f` with at most
/// `n` rows; each pair is in bijection with a canonical `(μ, ν)`.
pub fn branch_decompose(
    cache: &CharacterCache,
    lambda: &Partition,
    m: usize,
    n: usize,
) -> Result<Vec<BranchTerm>, RepError> {
    check_rows(lambda, m * n)?;
    let f = lambda.size();
    let left = partitions(f, Some(m));
    let right = partitions(f, Some(n));
    let mut terms = Vec::new();
    for mu_f in &left {
        for nu_f in &right {
            let multiplicity = kronecker(cache, lambda, mu_f, nu_f)?;
            if multiplicity.is_zero() {
                continue;
            }
            terms.push(BranchTerm {
                mu: strip_columns(mu_f, m),
                nu: strip_columns(nu_f, n),
                mu_padded: mu_f.clone(),
                nu_padded: nu_f.clone(),
                multiplicity,
            });
        }
    }
    Ok(terms)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateMethod {
    Direct,
    Inductive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The restriction contains `trivial ⊠ trivial`.
    Holistic,
    /// `j = 1`: the quantum case, no `trivial ⊠ trivial` term.
    LocallyTomographicQuantum,
    /// A non-quantum `j` whose restriction was found to lack the term.
    NotHolistic,
}

/// Result of asking whether `D_j^{d_a d_b}` restricted to
/// `SU(d_a) × SU(d_b)` contains `trivial ⊠ trivial`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HolismCertificate {
    pub j: usize,
    pub d_a: usize,
    pub d_b: usize,
    pub method: CertificateMethod,
    /// Exact multiplicity for direct certificates; `None` for inductive ones.
    #[serde(serialize_with = "crate::rep::serialize_optional_decimal")]
    pub multiplicity: Option<BigUint>,
    pub holistic: bool,
    pub verdict: Verdict,
    /// Values of `j` visited from the base case up to `j` (inductive only).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub chain: Vec<usize>,
}

/// Multiplicity of `trivial ⊠ trivial` in `D_j^{d_a d_b}`:
/// `g((2j, j^{d−2}), ((j d_b)^{d_a}), ((j d_a)^{d_b}))`.
pub fn trivial_multiplicity(
    cache: &CharacterCache,
    j: usize,
    d_a: usize,
    d_b: usize,
) -> Result<BigUint, RepError> {
    let d = d_a * d_b;
    let lambda = born_rep_partition(j, d)?;
    let f = lambda.size();
    let mu = pad(&Partition::empty(), d_a, f)?;
    let nu = pad(&Partition::empty(), d_b, f)?;
    kronecker(cache, &lambda, &mu, &nu)
}

/// Certifies that `D_j^{d_a d_b}` is holistic under `SU(d_a) × SU(d_b)`.
///
/// `j ∈ {1, 2, 3}` (or `direct = true`) is decided by a direct Kronecker
/// computation. Larger `j` defaults to induction: positivity for `j − 2`
/// and for `2` gives positivity for `j` by the semigroup property, so the
/// chain bottoms out at the base case `2` or `3` of matching parity.
pub fn certify_holistic(
    cache: &CharacterCache,
    j: usize,
    d_a: usize,
    d_b: usize,
    direct: bool,
) -> Result<HolismCertificate, RepError> {
    if j == 0 {
        return Err(RepError::InvalidArgument("j must be positive".into()));
    }
    if d_a < 2 || d_b < 2 {
        return Err(RepError::InvalidArgument(format!(
            "local dimensions must be at least 2, got {d_a} and {d_b}"
        )));
    }
    if direct || j <= 3 {
        let multiplicity = trivial_multiplicity(cache, j, d_a, d_b)?;
        let holistic = !multiplicity.is_zero();
        let verdict = match (j, holistic) {
            (_, true) => Verdict::Holistic,
            (1, false) => Verdict::LocallyTomographicQuantum,
            _ => Verdict::NotHolistic,
        };
        return Ok(HolismCertificate {
            j,
            d_a,
            d_b,
            method: CertificateMethod::Direct,
            multiplicity: Some(multiplicity),
            holistic,
            verdict,
            chain: Vec::new(),
        });
    }

    let base = if j.is_multiple_of(2) { 2 } else { 3 };
    let step = certify_holistic(cache, 2, d_a, d_b, false)?;
    let start = certify_holistic(cache, base, d_a, d_b, false)?;
    let holistic = step.holistic && start.holistic;
    Ok(HolismCertificate {
        j,
        d_a,
        d_b,
        method: CertificateMethod::Inductive,
        multiplicity: None,
        holistic,
        verdict: if holistic {
            Verdict::Holistic
        } else {
            Verdict::NotHolistic
        },
        chain: (base..=j).step_by(2).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn pad_examples() {
        assert_eq!(pad(&Partition::empty(), 3, 9).unwrap(), p(&[3, 3, 3]));
        assert_eq!(pad(&p(&[2, 1]), 2, 5).unwrap(), p(&[3, 2]));
        assert!(matches!(
            pad(&p(&[1]), 3, 9),
            Err(RepError::NonIntegerPadding { .. })
        ));
        assert!(matches!(
            pad(&p(&[1, 1, 1]), 2, 9),
            Err(RepError::TooManyRows { .. })
        ));
    }

    #[test]
    fn strip_inverts_pad() {
        for mu in partitions(5, Some(2)) {
            let canonical = strip_columns(&mu, 2);
            assert!(canonical.rows() < 2);
            assert_eq!(pad(&canonical, 2, 5).unwrap(), mu);
        }
    }

    #[test]
    fn multiplicity_examples() {
        let cache = CharacterCache::new();
        let one = p(&[1]);
        assert_eq!(
            branching_multiplicity(&cache, &one, 3, 3, &one, &one).unwrap(),
            BigUint::one()
        );
        let ll = p(&[1, 1]);
        assert_eq!(
            branching_multiplicity(&cache, &ll, 2, 2, &p(&[2]), &ll).unwrap(),
            BigUint::one()
        );
        assert_eq!(
            branching_multiplicity(&cache, &ll, 2, 2, &p(&[2]), &p(&[2])).unwrap(),
            BigUint::zero()
        );
        // Padding impossible folds to zero.
        assert_eq!(
            branching_multiplicity(&cache, &p(&[2]), 3, 3, &one, &one).unwrap(),
            BigUint::zero()
        );
    }

    #[test]
    fn decompose_two_qubits() {
        let cache = CharacterCache::new();
        let padded = |terms: Vec<BranchTerm>| -> Vec<(Partition, Partition, u32)> {
            let mut out: Vec<_> = terms
                .into_iter()
                .map(|t| {
                    (
                        t.mu_padded,
                        t.nu_padded,
                        u32::try_from(&t.multiplicity).unwrap(),
                    )
                })
                .collect();
            out.sort();
            out
        };
        let terms = padded(branch_decompose(&cache, &p(&[1, 1]), 2, 2).unwrap());
        assert_eq!(
            terms,
            vec![(p(&[1, 1]), p(&[2]), 1), (p(&[2]), p(&[1, 1]), 1)]
        );
        let terms = padded(branch_decompose(&cache, &p(&[2]), 2, 2).unwrap());
        assert_eq!(
            terms,
            vec![(p(&[1, 1]), p(&[1, 1]), 1), (p(&[2]), p(&[2]), 1)]
        );
        let terms = branch_decompose(&cache, &p(&[1]), 3, 4).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(
            (terms[0].mu.clone(), terms[0].nu.clone()),
            (p(&[1]), p(&[1]))
        );
    }

    #[test]
    fn small_holism_certificates() {
        // D_j^4 under SU(2) × SU(2): λ = (2j, j, j) with f = 4j.
        let cache = CharacterCache::new();
        let quantum = certify_holistic(&cache, 1, 2, 2, false).unwrap();
        assert_eq!(quantum.verdict, Verdict::LocallyTomographicQuantum);
        assert_eq!(quantum.multiplicity, Some(BigUint::zero()));
        let two = certify_holistic(&cache, 2, 2, 2, false).unwrap();
        assert!(two.holistic);
        let four = certify_holistic(&cache, 4, 2, 2, false).unwrap();
        assert_eq!(four.method, CertificateMethod::Inductive);
        assert_eq!(four.chain, vec![2, 4]);
        let four_direct = certify_holistic(&cache, 4, 2, 2, true).unwrap();
        assert_eq!(four.holistic, four_direct.holistic);
        assert!(certify_holistic(&cache, 0, 2, 2, false).is_err());
    }
}
