//! Integer partitions.
//!
//! Partitions are ordered first by size and then reverse-lexicographically, so that
//! the partitions of `n` come out as `(n), (n-1,1), (n-2,2), ..., (1^n)`. Every basis,
//! matrix and JSON document in the crate uses this order.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::numbers::factorial;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Builds a partition from parts that must already be positive and non-increasing.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidInput(format!("partition with a zero part: {parts:?}")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!("partition parts not non-increasing: {parts:?}")));
        }
        Ok(Partition(parts))
    }

    /// Sorts arbitrary positive parts into a partition.
    pub fn from_parts(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of parts, written ℓ(λ).
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// r_m(λ), the number of parts equal to `m`.
    pub fn multiplicity(&self, m: u32) -> u32 {
        self.0.iter().filter(|&&p| p == m).count() as u32
    }

    /// `(part, multiplicity)` pairs with parts decreasing.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &p in &self.0 {
            match out.last_mut() {
                Some((q, r)) if *q == p => *r += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// z_λ = Π_m r_m! m^{r_m}.
    pub fn z_factor(&self) -> BigInt {
        self.multiplicities()
            .into_iter()
            .fold(BigInt::one(), |acc, (m, r)| acc * factorial(r) * BigInt::from(m).pow(r))
    }

    /// Multiset union.
    pub fn union(&self, other: &Partition) -> Partition {
        let mut parts = self.0.clone();
        parts.extend_from_slice(&other.0);
        Partition::from_parts(parts)
    }

    /// Multiset difference `self \ sub`, or `None` when `sub` is not contained in `self`.
    pub fn remove(&self, sub: &Partition) -> Option<Partition> {
        let mut rest = self.0.clone();
        for p in &sub.0 {
            let pos = rest.iter().position(|q| q == p)?;
            rest.remove(pos);
        }
        Some(Partition(rest))
    }

    /// Conjugate partition.
    pub fn conjugate(&self) -> Partition {
        let first = self.0.first().copied().unwrap_or(0);
        Partition((1..=first).map(|i| self.0.iter().filter(|&&p| p >= i).count() as u32).collect())
    }

    /// All sub-multisets with at most `max_len` parts, each once.
    pub fn sub_multisets(&self, max_len: usize) -> Vec<Partition> {
        let mults = self.multiplicities();
        let mut out = Vec::new();
        let mut current = Vec::new();
        fn rec(mults: &[(u32, u32)], idx: usize, left: usize, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if idx == mults.len() {
                out.push(Partition(current.clone()));
                return;
            }
            let (m, r) = mults[idx];
            for take in 0..=(r as usize).min(left) {
                for _ in 0..take {
                    current.push(m);
                }
                rec(mults, idx + 1, left - take, current, out);
                for _ in 0..take {
                    current.pop();
                }
            }
        }
        rec(&mults, 0, max_len, &mut current, &mut out);
        out
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size().cmp(&other.size()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", body.join(","))
    }
}

/// All partitions of `n` in reverse-lexicographic order.
pub fn partitions_of(n: u32) -> Vec<Partition> {
    bounded_partitions(n, n, usize::MAX)
}

/// Partitions of `n` with exactly `len` parts, reverse-lexicographic.
pub fn partitions_with_len(n: u32, len: usize) -> Vec<Partition> {
    bounded_partitions(n, n, len).into_iter().filter(|p| p.len() == len).collect()
}

/// Partitions of `n` with at most `max_len` parts, reverse-lexicographic.
pub fn partitions_with_max_len(n: u32, max_len: usize) -> Vec<Partition> {
    bounded_partitions(n, n, max_len)
}

fn bounded_partitions(n: u32, max_part: u32, max_len: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(rest: u32, max_part: u32, max_len: usize, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(current.clone()));
            return;
        }
        if current.len() == max_len {
            return;
        }
        for p in (1..=max_part.min(rest)).rev() {
            current.push(p);
            rec(rest - p, p, max_len, current, out);
            current.pop();
        }
    }
    rec(n, max_part, max_len, &mut current, &mut out);
    out
}
