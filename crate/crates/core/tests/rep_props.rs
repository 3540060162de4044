use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use opflab::rep::{
    born_rep_partition, branch_decompose, class_size, dim_dj, kronecker, mn_character, pad,
    partitions, su_dim, sym_dim, CharacterCache, Partition,
};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

#[test]
fn characters_are_orthogonal() {
    let cache = CharacterCache::new();
    for n in 1..=12 {
        let irreps = partitions(n, None);
        let table: Vec<Vec<BigInt>> = irreps
            .iter()
            .map(|l| {
                irreps
                    .iter()
                    .map(|c| mn_character(&cache, l, c).unwrap())
                    .collect()
            })
            .collect();
        let sizes: Vec<BigInt> = irreps.iter().map(|c| BigInt::from(class_size(c))).collect();
        let order = BigInt::from(factorial(n));
        for (i, row_i) in table.iter().enumerate() {
            for (j, row_j) in table.iter().enumerate().skip(i) {
                let inner: BigInt = row_i
                    .iter()
                    .zip(row_j)
                    .zip(&sizes)
                    .map(|((a, b), s)| a * b * s)
                    .sum();
                let expected = if i == j {
                    order.clone()
                } else {
                    BigInt::zero()
                };
                assert_eq!(inner, expected, "n={n} {} {}", irreps[i], irreps[j]);
            }
        }
    }
}

#[test]
fn class_sizes_sum_to_group_order() {
    for n in 0..=20 {
        let total: BigUint = partitions(n, None).iter().map(class_size).sum();
        assert_eq!(total, factorial(n), "n={n}");
    }
}

#[test]
fn kronecker_dimension_identity() {
    let cache = CharacterCache::new();
    for n in 1..=8 {
        let irreps = partitions(n, None);
        for mu in &irreps {
            for nu in &irreps {
                let total: BigUint = irreps
                    .iter()
                    .map(|l| kronecker(&cache, l, mu, nu).unwrap() * sym_dim(l))
                    .sum();
                assert_eq!(total, sym_dim(mu) * sym_dim(nu), "n={n} {mu} {nu}");
            }
        }
    }
}

#[test]
fn kronecker_with_trivial_is_delta() {
    let cache = CharacterCache::new();
    for n in 1..=7 {
        let irreps = partitions(n, None);
        for mu in &irreps {
            for nu in &irreps {
                let g = kronecker(&cache, &Partition::row(n), mu, nu).unwrap();
                assert_eq!(g, BigUint::from(u8::from(mu == nu)));
            }
        }
    }
}

#[test]
fn branching_dimension_identity() {
    let cache = CharacterCache::new();
    for (m, n) in [(2, 2), (2, 3), (3, 3)] {
        for size in 0..=8 {
            for lambda in partitions(size, Some(m * n)) {
                let total: BigUint = branch_decompose(&cache, &lambda, m, n)
                    .unwrap()
                    .iter()
                    .map(|t| &t.multiplicity * su_dim(&t.mu, m) * su_dim(&t.nu, n))
                    .sum();
                assert_eq!(total, su_dim(&lambda, m * n), "λ={lambda} m={m} n={n}");
            }
        }
    }
}

/// Uniformly random triple of partitions of a common size `1..=6` with a
/// positive Kronecker coefficient.
fn positive_triple(
    cache: &CharacterCache,
    rng: &mut ChaCha8Rng,
) -> (Partition, Partition, Partition) {
    loop {
        let n = *[1usize, 2, 3, 4, 5, 6].choose(rng).unwrap();
        let irreps = partitions(n, None);
        let pick = |rng: &mut ChaCha8Rng| irreps.choose(rng).unwrap().clone();
        let (l, m, v) = (pick(rng), pick(rng), pick(rng));
        if !kronecker(cache, &l, &m, &v).unwrap().is_zero() {
            return (l, m, v);
        }
    }
}

#[test]
fn semigroup_property() {
    let cache = CharacterCache::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let (l1, m1, n1) = positive_triple(&cache, &mut rng);
        let (l2, m2, n2) = positive_triple(&cache, &mut rng);
        let g = kronecker(&cache, &l1.add(&l2), &m1.add(&m2), &n1.add(&n2)).unwrap();
        assert!(!g.is_zero(), "{l1}+{l2}, {m1}+{m2}, {n1}+{n2}");
    }
}

#[test]
fn born_dimensions() {
    for d in 2..=9 {
        for j in 1..=4 {
            assert_eq!(
                dim_dj(j, d).unwrap(),
                su_dim(&born_rep_partition(j, d).unwrap(), d)
            );
        }
        let first = dim_dj(1, d).unwrap();
        assert_eq!(first, BigUint::from(d * d - 1));
        for j in 2..=6 {
            assert!(dim_dj(j, d).unwrap() > first);
        }
    }
}

fn partition_strategy(max_rows: usize) -> impl Strategy<Value = Partition> {
    prop::collection::vec(0usize..5, 0..=max_rows).prop_map(Partition::from_unsorted)
}

proptest! {
    #[test]
    fn kronecker_is_symmetric(seed in any::<u64>()) {
        let cache = CharacterCache::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = *[2usize, 3, 4, 5, 6, 7].choose(&mut rng).unwrap();
        let irreps = partitions(n, None);
        let t: Vec<Partition> = (0..3).map(|_| irreps.choose(&mut rng).unwrap().clone()).collect();
        let g = kronecker(&cache, &t[0], &t[1], &t[2]).unwrap();
        for p in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            prop_assert_eq!(&kronecker(&cache, &t[p[0]], &t[p[1]], &t[p[2]]).unwrap(), &g);
        }
    }

    #[test]
    fn padding_is_additive(mu in partition_strategy(3), nu in partition_strategy(3), m in 3usize..5, extra in 0usize..4, extra2 in 0usize..4) {
        let f = mu.size() + extra * m;
        let g = nu.size() + extra2 * m;
        if let (Ok(a), Ok(b), Ok(c)) = (pad(&mu, m, f), pad(&nu, m, g), pad(&mu.add(&nu), m, f + g)) {
            prop_assert_eq!(a.add(&b), c);
        }
    }
}
