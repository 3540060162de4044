//! Symmetric-group characters by the Murnaghan–Nakayama rule.
//!
//! Shapes are encoded as beta-sets (abacus bead positions) in a `u128`:
//! a partition with `ℓ` rows puts a bead at `λ_i + ℓ − 1 − i`. Removing a
//! rim hook of length `k` moves one bead from `b` to an empty `b − k`; the
//! leg length is the number of beads strictly between the two positions.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use dashmap::DashMap;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::partition::{sym_dim, Partition};
use super::RepError;

/// Environment variable naming the on-disk cache directory.
pub const CACHE_DIR_ENV: &str = "OPFLAB_CACHE_DIR";
/// Cache directory used when [`CACHE_DIR_ENV`] is unset.
pub const DEFAULT_CACHE_DIR: &str = ".opflab-cache";

const CACHE_FORMAT: &str = "opflab-character-cache";
const CACHE_VERSION: u32 = 1;
const CACHE_ORDER: &str = "reverse-lexicographic";

type MemoKey = (u128, Box<[u8]>);

/// Memoized exact character values `χ_λ(μ)`.
///
/// Top-level values (`mn_character` calls) are kept per `n = |λ|` and can be
/// persisted to disk, one JSON file per `n`. Intermediate Murnaghan–Nakayama
/// states are memoized in memory only. Safe to share across threads.
#[derive(Default)]
pub struct CharacterCache {
    table: DashMap<(Partition, Partition), BigInt>,
    memo: DashMap<MemoKey, BigInt>,
    dims: DashMap<u128, BigInt>,
    dir: Option<PathBuf>,
    write_lock: Mutex<()>,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    format: String,
    version: u32,
    n: usize,
    order: String,
    entries: Vec<CacheEntry>,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    irrep: Partition,
    class: Partition,
    value: String,
}

impl CharacterCache {
    /// In-memory cache with no backing directory.
    pub fn new() -> Self {
        Self::default()
    }

    /// Opens (and loads) the cache stored in `dir`. The directory does not
    /// need to exist yet.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, RepError> {
        let dir = dir.into();
        let cache = Self {
            dir: Some(dir.clone()),
            ..Self::default()
        };
        for (_, path) in cache_files(&dir)? {
            let text = fs::read_to_string(&path).map_err(|e| cache_err(&path, e))?;
            let file: CacheFile = serde_json::from_str(&text).map_err(|e| cache_err(&path, e))?;
            if file.format != CACHE_FORMAT || file.version != CACHE_VERSION {
                return Err(RepError::Cache(format!(
                    "{}: unsupported cache format {} v{}",
                    path.display(),
                    file.format,
                    file.version
                )));
            }
            for entry in file.entries {
                let value: BigInt = entry.value.parse().map_err(|e| cache_err(&path, e))?;
                cache.table.insert((entry.irrep, entry.class), value);
            }
        }
        Ok(cache)
    }

    /// Opens the directory named by `OPFLAB_CACHE_DIR`, or `.opflab-cache/`.
    pub fn from_env() -> Result<Self, RepError> {
        Self::open(cache_dir_from_env())
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Number of stored top-level character values.
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Stored top-level entries grouped by `n`.
    pub fn counts_by_degree(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for item in self.table.iter() {
            *counts.entry(item.key().0.size()).or_insert(0) += 1;
        }
        counts
    }

    pub fn get(&self, lambda: &Partition, mu: &Partition) -> Option<BigInt> {
        self.table
            .get(&(lambda.clone(), mu.clone()))
            .map(|v| v.value().clone())
    }

    /// Writes every stored value to the backing directory. A no-op for
    /// in-memory caches.
    pub fn persist(&self) -> Result<(), RepError> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let _guard = self.write_lock.lock().unwrap_or_else(|e| e.into_inner());
        fs::create_dir_all(dir).map_err(|e| cache_err(dir, e))?;

        let mut by_n: BTreeMap<usize, Vec<CacheEntry>> = BTreeMap::new();
        let mut items: Vec<((Partition, Partition), BigInt)> = self
            .table
            .iter()
            .map(|r| (r.key().clone(), r.value().clone()))
            .collect();
        // Reverse-lexicographic on (irrep, class).
        items.sort_by(|a, b| b.0.cmp(&a.0));
        for ((irrep, class), value) in items {
            by_n.entry(irrep.size()).or_default().push(CacheEntry {
                irrep,
                class,
                value: value.to_string(),
            });
        }
        for (n, entries) in by_n {
            let file = CacheFile {
                format: CACHE_FORMAT.to_string(),
                version: CACHE_VERSION,
                n,
                order: CACHE_ORDER.to_string(),
                entries,
            };
            let path = dir.join(cache_file_name(n));
            let tmp = dir.join(format!("{}.tmp", cache_file_name(n)));
            let json = serde_json::to_vec(&file).map_err(|e| cache_err(&path, e))?;
            let mut out = fs::File::create(&tmp).map_err(|e| cache_err(&tmp, e))?;
            out.write_all(&json).map_err(|e| cache_err(&tmp, e))?;
            out.sync_all().map_err(|e| cache_err(&tmp, e))?;
            fs::rename(&tmp, &path).map_err(|e| cache_err(&path, e))?;
        }
        Ok(())
    }

    fn dim_of_mask(&self, mask: u128) -> BigInt {
        if let Some(v) = self.dims.get(&mask) {
            return v.clone();
        }
        let value = BigInt::from(sym_dim(&mask_to_partition(mask)));
        self.dims.insert(mask, value.clone());
        value
    }

    fn chi(&self, mask: u128, class: &[u8]) -> BigInt {
        let Some(&k) = class.first() else {
            return if mask == 0 {
                BigInt::one()
            } else {
                BigInt::zero()
            };
        };
        if k == 1 {
            // Remaining class is the identity.
            return self.dim_of_mask(mask);
        }
        let key: MemoKey = (mask, class.into());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let k = k as u32;
        let rest = &class[1..];
        let mut acc = BigInt::zero();
        let mut beads = mask;
        while beads != 0 {
            let b = beads.trailing_zeros();
            beads &= beads - 1;
            if b < k || mask & (1u128 << (b - k)) != 0 {
                continue;
            }
            let between = mask & (((1u128 << b) - 1) ^ ((1u128 << (b - k + 1)) - 1));
            let moved = normalize_mask((mask & !(1u128 << b)) | (1u128 << (b - k)));
            let value = self.chi(moved, rest);
            if between.count_ones().is_multiple_of(2) {
                acc += value;
            } else {
                acc -= value;
            }
        }
        self.memo.insert(key, acc.clone());
        acc
    }
}

impl std::fmt::Debug for CharacterCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CharacterCache")
            .field("entries", &self.table.len())
            .field("memo", &self.memo.len())
            .field("dir", &self.dir)
            .finish()
    }
}

fn cache_err(path: &Path, e: impl std::fmt::Display) -> RepError {
    RepError::Cache(format!("{}: {e}", path.display()))
}

pub fn cache_dir_from_env() -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR))
}

fn cache_file_name(n: usize) -> String {
    format!("characters-n{n}.json")
}

/// Cache files present in `dir`, keyed by degree.
pub fn cache_files(dir: &Path) -> Result<Vec<(usize, PathBuf)>, RepError> {
    let read = match fs::read_dir(dir) {
        Ok(read) => read,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(cache_err(dir, e)),
    };
    let mut files = Vec::new();
    for entry in read {
        let entry = entry.map_err(|e| cache_err(dir, e))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        if let Some(n) = name
            .strip_prefix("characters-n")
            .and_then(|rest| rest.strip_suffix(".json"))
            .and_then(|n| n.parse::<usize>().ok())
        {
            files.push((n, entry.path()));
        }
    }
    files.sort();
    Ok(files)
}

/// Deletes every cache file in `dir`; returns how many were removed.
pub fn clear_cache_dir(dir: &Path) -> Result<usize, RepError> {
    let files = cache_files(dir)?;
    for (_, path) in &files {
        fs::remove_file(path).map_err(|e| cache_err(path, e))?;
    }
    Ok(files.len())
}

fn partition_to_mask(lambda: &Partition) -> Result<u128, RepError> {
    let rows = lambda.rows();
    if lambda.part(0) + rows > 127 {
        return Err(RepError::TooLarge(lambda.size()));
    }
    Ok(lambda
        .parts()
        .iter()
        .enumerate()
        .fold(0u128, |m, (i, &p)| m | (1u128 << (p + rows - 1 - i))))
}

/// Drops beads at the bottom of the abacus (zero-length rows).
fn normalize_mask(mut mask: u128) -> u128 {
    while mask & 1 == 1 {
        mask >>= 1;
    }
    mask
}

fn mask_to_partition(mask: u128) -> Partition {
    let rows = mask.count_ones() as usize;
    let mut parts = Vec::with_capacity(rows);
    let mut beads = mask;
    let mut positions = Vec::with_capacity(rows);
    while beads != 0 {
        positions.push(beads.trailing_zeros() as usize);
        beads &= beads - 1;
    }
    positions.reverse();
    for (i, b) in positions.into_iter().enumerate() {
        parts.push(b - (rows - 1 - i));
    }
    Partition::new(parts).expect("beta-set decodes to a partition")
}

fn class_key(mu: &Partition) -> Result<Vec<u8>, RepError> {
    mu.parts()
        .iter()
        .map(|&p| u8::try_from(p).map_err(|_| RepError::TooLarge(mu.size())))
        .collect()
}

/// `χ_λ(μ)`: the irreducible character of `S_n` labelled by `lambda`,
/// evaluated on the class of cycle type `mu`.
pub fn mn_character(
    cache: &CharacterCache,
    lambda: &Partition,
    mu: &Partition,
) -> Result<BigInt, RepError> {
    if lambda.size() != mu.size() {
        return Err(RepError::SizeMismatch {
            expected: lambda.size(),
            found: mu.size(),
        });
    }
    if let Some(v) = cache.get(lambda, mu) {
        return Ok(v);
    }
    let mask = partition_to_mask(lambda)?;
    let value = cache.chi(mask, &class_key(mu)?);
    cache
        .table
        .insert((lambda.clone(), mu.clone()), value.clone());
    Ok(value)
}

/// Character values of `lambda` on each of `classes`, evaluated in parallel.
pub fn character_row(
    cache: &CharacterCache,
    lambda: &Partition,
    classes: &[Partition],
) -> Result<Vec<BigInt>, RepError> {
    classes
        .par_iter()
        .map(|mu| mn_character(cache, lambda, mu))
        .collect()
}

/// `χ_λ(identity)`, as an unsigned integer.
pub fn character_degree(lambda: &Partition) -> BigUint {
    sym_dim(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::partition::partitions;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    /// Cycle type of a permutation given in one-line notation.
    fn cycle_type(perm: &[usize]) -> Partition {
        let mut seen = vec![false; perm.len()];
        let mut lens = Vec::new();
        for start in 0..perm.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = perm[i];
                len += 1;
            }
            lens.push(len);
        }
        Partition::from_unsorted(lens)
    }

    #[test]
    fn mask_round_trip() {
        for lambda in partitions(7, None) {
            let mask = partition_to_mask(&lambda).unwrap();
            assert_eq!(mask_to_partition(mask), lambda);
        }
    }

    #[test]
    fn s3_character_of_standard_rep_by_brute_force() {
        // The standard rep of S_3 is the permutation rep on C^3 minus the
        // trivial rep: χ_{(2,1)}(σ) = #fixed points − 1.
        let cache = CharacterCache::new();
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [1, 0, 2],
            [0, 2, 1],
            [2, 1, 0],
            [1, 2, 0],
            [2, 0, 1],
        ];
        for perm in perms {
            let fixed = perm.iter().enumerate().filter(|(i, &v)| *i == v).count() as i64;
            let chi = mn_character(&cache, &p(&[2, 1]), &cycle_type(&perm)).unwrap();
            assert_eq!(chi, BigInt::from(fixed - 1));
        }
        assert_eq!(
            mn_character(&cache, &p(&[2, 1]), &p(&[3])).unwrap(),
            BigInt::from(-1)
        );
    }

    #[test]
    fn trivial_sign_and_degree() {
        let cache = CharacterCache::new();
        for mu in partitions(6, None) {
            assert_eq!(mn_character(&cache, &p(&[6]), &mu).unwrap(), BigInt::one());
            // sign(σ) = (−1)^{n − #cycles}
            let sign = if (6 - mu.rows()) % 2 == 0 { 1 } else { -1 };
            assert_eq!(
                mn_character(&cache, &Partition::column(6), &mu).unwrap(),
                BigInt::from(sign)
            );
        }
        for lambda in partitions(6, None) {
            let chi = mn_character(&cache, &lambda, &Partition::column(6)).unwrap();
            assert_eq!(chi, BigInt::from(sym_dim(&lambda)));
        }
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let cache = CharacterCache::new();
        assert!(matches!(
            mn_character(&cache, &p(&[2, 1]), &p(&[2])),
            Err(RepError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn known_s4_table_row() {
        // χ_{(2,2)} on classes (4),(3,1),(2,2),(2,1,1),(1^4): 0,−1,2,0,2
        let cache = CharacterCache::new();
        let row = character_row(&cache, &p(&[2, 2]), &partitions(4, None)).unwrap();
        let expected: Vec<BigInt> = [0, -1, 2, 0, 2].into_iter().map(BigInt::from).collect();
        assert_eq!(row, expected);
    }

    #[test]
    fn persist_and_reload() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CharacterCache::open(dir.path()).unwrap();
        assert!(cache.is_empty());
        character_row(&cache, &p(&[3, 2]), &partitions(5, None)).unwrap();
        cache.persist().unwrap();
        let files = cache_files(dir.path()).unwrap();
        assert_eq!(files.len(), 1);
        assert_eq!(files[0].0, 5);

        let reloaded = CharacterCache::open(dir.path()).unwrap();
        assert_eq!(reloaded.len(), 7);
        assert_eq!(reloaded.get(&p(&[3, 2]), &p(&[5])), Some(BigInt::zero()));
        assert_eq!(clear_cache_dir(dir.path()).unwrap(), 1);
        assert!(CharacterCache::open(dir.path()).unwrap().is_empty());
    }
}
