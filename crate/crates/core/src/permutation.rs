//! Permutations of `{0, …, N−1}` and their cycle structure.

use std::fmt;

use crate::error::{Error, Result};

/// A bijection on `{0, …, N−1}` stored as its image list: `k ↦ mapping[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n || seen[m] {
                return Err(Error::InvalidInput(format!(
                    "{mapping:?} is not a permutation of 0..{n}"
                )));
            }
            seen[m] = true;
        }
        Ok(Self { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mapping: (0..n).collect(),
        }
    }

    /// `k ↦ k + shift (mod n)`.
    pub fn rotation(n: usize, shift: usize) -> Self {
        Self {
            mapping: (0..n).map(|k| (k + shift) % n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn apply(&self, k: usize) -> usize {
        self.mapping[k]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(k, &m)| k == m)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (k, &m) in self.mapping.iter().enumerate() {
            inv[m] = k;
        }
        Self { mapping: inv }
    }

    /// `self ∘ other`, i.e. `k ↦ self(other(k))`.
    pub fn compose(&self, other: &Permutation) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self {
            mapping: other.mapping.iter().map(|&k| self.mapping[k]).collect(),
        }
    }

    /// Disjoint cycles `(k1 k2 … kr)` with `k_{i+1} = self(k_i)`. Each cycle
    /// starts at its smallest element and cycles are sorted by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut visited = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut k = start;
            while !visited[k] {
                visited[k] = true;
                cycle.push(k);
                k = self.mapping[k];
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// Position of this permutation in lexicographic order of image lists.
    pub fn rank(&self) -> usize {
        rank_of(&self.mapping)
    }

    /// All permutations of `n` elements in lexicographic order.
    pub fn all(n: usize) -> Lexicographic {
        Lexicographic {
            next: Some((0..n).collect()),
        }
    }
}

/// Lehmer-code rank of an image list.
pub(crate) fn rank_of(mapping: &[usize]) -> usize {
    let n = mapping.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller = mapping[i + 1..].iter().filter(|&&m| m < mapping[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.cycles() {
            let body: Vec<String> = c.iter().map(usize::to_string).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

/// Lexicographic permutation iterator.
pub struct Lexicographic {
    next: Option<Vec<usize>>,
}

impl Iterator for Lexicographic {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { mapping: current })
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
