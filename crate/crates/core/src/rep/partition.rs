use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::RepError;

/// Weakly decreasing sequence of positive integers.
///
/// Serves as Young diagram, label of an irreducible representation of the
/// symmetric group `S_n` (`n = size`), label of a conjugacy class of `S_n`
/// (cycle type), and label of an irreducible representation of `SU(d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Validates `parts`; trailing zeros are dropped.
    pub fn new(mut parts: Vec<usize>) -> Result<Self, RepError> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.contains(&0) {
            return Err(RepError::NotAPartition(parts));
        }
        Ok(Self { parts })
    }

    /// The empty partition (trivial representation).
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    /// The one-row partition `(n)`.
    pub fn row(n: usize) -> Self {
        if n == 0 {
            Self::empty()
        } else {
            Self { parts: vec![n] }
        }
    }

    /// The one-column partition `(1^n)`.
    pub fn column(n: usize) -> Self {
        Self { parts: vec![1; n] }
    }

    /// Rectangle with `rows` rows of length `width`.
    pub fn rectangle(rows: usize, width: usize) -> Self {
        if width == 0 {
            Self::empty()
        } else {
            Self {
                parts: vec![width; rows],
            }
        }
    }

    /// Sorts arbitrary nonnegative parts into a partition.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self { parts }
    }

    pub(crate) fn from_parts_unchecked(parts: Vec<usize>) -> Self {
        debug_assert!(Self::new(parts.clone()).is_ok());
        Self { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of boxes.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of (nonzero) rows.
    pub fn rows(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Row length, zero past the last row.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// Row-wise sum `λ + λ'`.
    pub fn add(&self, other: &Partition) -> Partition {
        let rows = self.rows().max(other.rows());
        Partition {
            parts: (0..rows).map(|i| self.part(i) + other.part(i)).collect(),
        }
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.part(0);
        Partition {
            parts: (0..width)
                .map(|c| self.parts.iter().filter(|&&p| p > c).count())
                .collect(),
        }
    }

    /// Hook lengths of every box, row by row.
    pub fn hook_lengths(&self) -> Vec<usize> {
        let conj = self.conjugate();
        let mut hooks = Vec::with_capacity(self.size());
        for (i, &row) in self.parts.iter().enumerate() {
            for j in 0..row {
                hooks.push((row - j - 1) + (conj.parts[j] - i - 1) + 1);
            }
        }
        hooks
    }

    /// Multiplicity of each part length, as `(length, count)` pairs.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((len, count)) if *len == p => *count += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// Order of the centralizer of a permutation with this cycle type:
    /// `z_μ = Π_k k^{m_k} m_k!`.
    pub fn centralizer_order(&self) -> BigUint {
        self.multiplicities()
            .into_iter()
            .fold(BigUint::one(), |acc, (len, count)| {
                acc * BigUint::from(len).pow(count as u32) * factorial(count)
            })
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.parts.cmp(&other.parts)
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = RepError;

    fn try_from(parts: Vec<usize>) -> Result<Self, Self::Error> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

/// Writes exponent notation: `(4,2^7)`, `()` for the empty partition.
impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (len, count)) in self.multiplicities().into_iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if count == 1 {
                write!(f, "{len}")?;
            } else {
                write!(f, "{len}^{count}")?;
            }
        }
        write!(f, ")")
    }
}

/// Parses comma-separated parts with optional `len^count` repetition,
/// optionally wrapped in parentheses: `4,2^7`, `(6,6,6)`, `()`.
impl FromStr for Partition {
    type Err = RepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .trim();
        if trimmed.is_empty() || trimmed == "0" || trimmed == "∅" {
            return Ok(Partition::empty());
        }
        let bad = || RepError::Parse(s.to_string());
        let mut parts = Vec::new();
        for item in trimmed.split(',') {
            let item = item.trim();
            let (len, count) = match item.split_once('^') {
                Some((len, count)) => (
                    len.trim(),
                    count.trim().parse::<usize>().map_err(|_| bad())?,
                ),
                None => (item, 1),
            };
            let len = len.parse::<usize>().map_err(|_| bad())?;
            parts.extend(std::iter::repeat_n(len, count));
        }
        Partition::new(parts)
    }
}

pub(crate) fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// All partitions of `n`, optionally with at most `max_rows` rows, in
/// reverse-lexicographic order: `(4), (3,1), (2,2), (2,1,1), (1,1,1,1)`.
pub fn partitions(n: usize, max_rows: Option<usize>) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    let rows = max_rows.unwrap_or(n);
    generate(n, n, rows, &mut current, &mut out);
    out
}

fn generate(
    remaining: usize,
    max_part: usize,
    rows_left: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Partition>,
) {
    if remaining == 0 {
        out.push(Partition {
            parts: current.clone(),
        });
        return;
    }
    if rows_left == 0 {
        return;
    }
    for first in (1..=remaining.min(max_part)).rev() {
        // The rest must fit in rows_left - 1 rows of width `first`.
        if (remaining - first) > first * (rows_left - 1) {
            break;
        }
        current.push(first);
        generate(remaining - first, first, rows_left - 1, current, out);
        current.pop();
    }
}

/// Dimension of the irreducible `S_n` representation labelled by `lambda`
/// (hook-length formula).
pub fn sym_dim(lambda: &Partition) -> BigUint {
    let hooks = lambda
        .hook_lengths()
        .into_iter()
        .fold(BigUint::one(), |acc, h| acc * BigUint::from(h));
    factorial(lambda.size()) / hooks
}

/// Size of the conjugacy class of cycle type `mu`: `n! / z_μ`.
pub fn class_size(mu: &Partition) -> BigUint {
    factorial(mu.size()) / mu.centralizer_order()
}
