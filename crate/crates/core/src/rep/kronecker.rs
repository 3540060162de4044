use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::characters::{mn_character, CharacterCache};
use super::partition::{factorial, partitions, Partition};
use super::RepError;

/// Kronecker coefficient `g(λ, μ, ν)`: multiplicity of `Δ_λ` in `Δ_μ ⊗ Δ_ν`.
///
/// Evaluated as `Σ_C χ_λ(C) χ_μ(C) χ_ν(C) / z_C` over the conjugacy classes
/// of `S_n`, streaming over classes. Only the three character rows involved
/// are ever evaluated, and a class is abandoned as soon as one factor
/// vanishes.
pub fn kronecker(
    cache: &CharacterCache,
    lambda: &Partition,
    mu: &Partition,
    nu: &Partition,
) -> Result<BigUint, RepError> {
    let n = lambda.size();
    for other in [mu, nu] {
        if other.size() != n {
            return Err(RepError::SizeMismatch {
                expected: n,
                found: other.size(),
            });
        }
    }
    let n_factorial = BigInt::from(factorial(n));
    let total = partitions(n, None)
        .par_iter()
        .map(|class| -> Result<BigInt, RepError> {
            let mut product = BigInt::from(1);
            // Rectangular and short shapes vanish most often; try them first.
            for shape in [nu, mu, lambda] {
                let chi = mn_character(cache, shape, class)?;
                if chi.is_zero() {
                    return Ok(BigInt::zero());
                }
                product *= chi;
            }
            Ok(product * (&n_factorial / BigInt::from(class.centralizer_order())))
        })
        .try_reduce(BigInt::zero, |a, b| Ok(a + b))?;

    let (quotient, remainder) = total.div_rem(&n_factorial);
    if !remainder.is_zero() || quotient.is_negative() {
        return Err(RepError::Inconsistent(format!(
            "character sum for g({lambda}, {mu}, {nu}) is {total}, not a nonnegative multiple of {n}!"
        )));
    }
    Ok(quotient.magnitude().clone())
}
