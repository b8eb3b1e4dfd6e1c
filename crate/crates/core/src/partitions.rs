//! Integer partitions indexing irreducible representations.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-increasing sequence of positive integers. Trailing zeros are
/// stripped on construction, so `(2, 0)` and `(2)` compare equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(parts: impl Into<Vec<u32>>) -> Result<Self> {
        let mut parts = parts.into();
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition {
                partition: parts,
                reason: "parts must be non-increasing".into(),
            });
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Self(parts))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Sum of the parts, `|λ|`.
    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// The `i`-th part (zero-based), with implicit trailing zeros.
    pub fn part(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    /// Conjugate partition: `λ'_i = #{j : λ_j ≥ i}`.
    pub fn transpose(&self) -> Self {
        let Some(&first) = self.0.first() else {
            return Self::empty();
        };
        let parts = (1..=first)
            .map(|i| self.0.iter().take_while(|&&p| p >= i).count() as u32)
            .collect();
        Self(parts)
    }

    /// Associated partition for `O(n)`: the first column of the diagram is
    /// replaced by `n - λ'_1`. Only defined when `λ'_1 + λ'_2 ≤ n`.
    pub fn associate(&self, n: usize) -> Result<Self> {
        let t = self.transpose();
        let c1 = t.part(0) as usize;
        let c2 = t.part(1) as usize;
        if c1 + c2 > n {
            return Err(Error::InvalidPartition {
                partition: self.0.clone(),
                reason: format!("does not label a representation of O({n})"),
            });
        }
        let mut cols = t.0.clone();
        let new_first = (n - c1) as u32;
        if cols.is_empty() {
            cols.push(new_first);
        } else {
            cols[0] = new_first;
        }
        // n - c1 ≥ c2 keeps the column lengths non-increasing.
        Ok(Self::new(cols)?.transpose())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

/// All partitions of `weight` with at most `max_parts` parts, in
/// lexicographically decreasing order.
pub fn partitions_of(weight: u32, max_parts: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(max_parts);
    fill(weight, weight, max_parts, &mut current, &mut out);
    out
}

fn fill(remaining: u32, cap: u32, slots: usize, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition(current.clone()));
        return;
    }
    if slots == 0 {
        return;
    }
    // Largest part first gives lexicographically decreasing output.
    let hi = remaining.min(cap);
    // The remaining slots must be able to absorb what is left.
    let lo = remaining.div_ceil(slots as u32).max(1);
    for p in (lo..=hi).rev() {
        current.push(p);
        fill(remaining - p, p, slots - 1, current, out);
        current.pop();
    }
}

/// Every partition with at most `max_parts` parts and weight at most
/// `max_weight`, grouped by weight ascending.
pub fn enumerate_partitions(max_parts: usize, max_weight: u32) -> Vec<Partition> {
    (0..=max_weight)
        .flat_map(|n| partitions_of(n, max_parts))
        .collect()
}

/// Binomial coefficient `C(m, 2)`, the degree shift appearing in the kernels.
pub fn pairs(m: usize) -> u32 {
    (m * m.saturating_sub(1) / 2) as u32
}
