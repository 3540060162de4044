//! `SU(d)` dimensions and the Young diagrams attached to alternative
//! measurement postulates.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use super::partition::Partition;
use super::RepError;

/// Dimension of the `SU(d)` irrep labelled by `lambda` (Weyl dimension
/// formula); zero when `lambda` has more than `d` rows.
pub fn su_dim(lambda: &Partition, d: usize) -> BigUint {
    if lambda.rows() > d {
        return BigUint::ZERO;
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..d {
        for j in (i + 1)..d {
            num *= BigUint::from(lambda.part(i) - lambda.part(j) + j - i);
            den *= BigUint::from(j - i);
        }
    }
    num / den
}

/// Young diagram `(2j, j^{d−2})` of the `SU(d)` irrep `D_j^d`. For `d = 2`
/// this is `(2j)`; for `j = 0` it is empty.
pub fn born_rep_partition(j: usize, d: usize) -> Result<Partition, RepError> {
    if d < 2 {
        return Err(RepError::InvalidArgument(format!(
            "dimension must be at least 2, got {d}"
        )));
    }
    if j == 0 {
        return Ok(Partition::empty());
    }
    let mut parts = vec![2 * j];
    parts.extend(std::iter::repeat_n(j, d - 2));
    Ok(Partition::from_parts_unchecked(parts))
}

/// Closed-form dimension of `D_j^d`:
/// `(2j/(d−1) + 1) · Π_{k=1}^{d−2} (1 + j/k)^2`, evaluated in exact rationals.
pub fn dim_dj(j: usize, d: usize) -> Result<BigUint, RepError> {
    if d < 2 {
        return Err(RepError::InvalidArgument(format!(
            "dimension must be at least 2, got {d}"
        )));
    }
    let r = |num: usize, den: usize| BigRational::new(BigInt::from(num), BigInt::from(den));
    let mut value = r(2 * j, d - 1) + BigRational::one();
    for k in 1..=(d - 2) {
        let factor = BigRational::one() + r(j, k);
        value *= &factor * &factor;
    }
    if !value.is_integer() || value.is_negative() {
        return Err(RepError::Inconsistent(format!(
            "D_{j}^{d} evaluated to non-integer {value}"
        )));
    }
    Ok(value.to_integer().magnitude().clone())
}

/// Achievable numbers of fiducial parameters `K_d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KValues {
    pub d: usize,
    pub limit: u64,
    pub values: Vec<u64>,
    /// `true` for `d ≥ 3`, where the admissible index sets are only
    /// partially characterized and no parity filter is applied.
    pub experimental: bool,
}

/// All `K = Σ_{j∈J} dim D_j^d ≤ limit` over finite sets `J` of distinct
/// positive integers.
///
/// For `d = 2`, `J` must contain an odd `j` (a component of odd angular
/// momentum). Every value also satisfies `K ≥ 2d − 2`.
pub fn enumerate_k_values(d: usize, limit: u64) -> Result<KValues, RepError> {
    if d < 2 {
        return Err(RepError::InvalidArgument(format!(
            "dimension must be at least 2, got {d}"
        )));
    }
    let cap = usize::try_from(limit)
        .ok()
        .filter(|&c| c <= 1 << 24)
        .ok_or_else(|| RepError::InvalidArgument(format!("limit {limit} too large")))?;

    let mut components: Vec<(usize, bool)> = Vec::new();
    for j in 1.. {
        let dim = dim_dj(j, d)?.to_usize().unwrap_or(usize::MAX);
        if dim > cap {
            break;
        }
        components.push((dim, j % 2 == 1));
    }

    // Subset-sum over distinct j, tracking whether an odd j was used.
    let mut reach = vec![[false; 2]; cap + 1];
    reach[0][0] = true;
    for &(dim, odd) in &components {
        for sum in (dim..=cap).rev() {
            for had_odd in 0..2 {
                if reach[sum - dim][had_odd] {
                    reach[sum][(had_odd == 1 || odd) as usize] = true;
                }
            }
        }
    }
    let floor = 2 * d - 2;
    let values = (1..=cap)
        .filter(|&k| k >= floor)
        .filter(|&k| {
            if d == 2 {
                reach[k][1]
            } else {
                reach[k][0] || reach[k][1]
            }
        })
        .map(|k| k as u64)
        .collect();
    Ok(KValues {
        d,
        limit,
        values,
        experimental: d != 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn su_dim_examples() {
        for d in 2..8 {
            assert_eq!(su_dim(&p(&[1]), d), BigUint::from(d));
            let mut adj = vec![2];
            adj.extend(std::iter::repeat_n(1, d - 2));
            assert_eq!(su_dim(&p(&adj), d), BigUint::from(d * d - 1));
        }
        assert_eq!(su_dim(&p(&[4, 2]), 3), BigUint::from(27u32));
        assert_eq!(su_dim(&p(&[1, 1, 1]), 2), BigUint::ZERO);
        assert_eq!(su_dim(&Partition::empty(), 5), BigUint::one());
    }

    #[test]
    fn born_rep_examples() {
        assert_eq!(born_rep_partition(1, 3).unwrap(), p(&[2, 1]));
        assert_eq!(born_rep_partition(2, 9).unwrap(), "4,2^7".parse().unwrap());
        assert_eq!(born_rep_partition(0, 4).unwrap(), Partition::empty());
        assert_eq!(born_rep_partition(3, 2).unwrap(), p(&[6]));
        assert!(born_rep_partition(1, 1).is_err());
    }

    #[test]
    fn dim_dj_examples() {
        for d in 2..=9 {
            assert_eq!(dim_dj(1, d).unwrap(), BigUint::from(d * d - 1));
        }
        assert_eq!(dim_dj(2, 3).unwrap(), BigUint::from(27u32));
        assert_eq!(dim_dj(2, 2).unwrap(), BigUint::from(5u32));
        assert_eq!(dim_dj(0, 5).unwrap(), BigUint::one());
    }

    #[test]
    fn qubit_k_values() {
        let k = enumerate_k_values(2, 14).unwrap();
        assert_eq!(k.values, vec![3, 7, 8, 10, 11, 12, 14]);
        assert!(!k.experimental);
        assert_eq!(enumerate_k_values(2, 3).unwrap().values, vec![3]);
    }

    #[test]
    fn higher_d_is_experimental() {
        let k = enumerate_k_values(3, 40).unwrap();
        assert!(k.experimental);
        assert_eq!(k.values, vec![8, 27, 35]);
    }
}
