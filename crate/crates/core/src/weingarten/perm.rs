//! Permutations of `{0, …, q-1}` and their cycle structure.

use std::fmt;

use crate::error::{Error, Result};

/// A permutation stored by its images: `σ(i) = mapping[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let q = mapping.len();
        let mut seen = vec![false; q];
        for &m in &mapping {
            if m >= q || seen[m] {
                return Err(Error::InvalidArgument(format!(
                    "{mapping:?} is not a bijection on 0..{q}"
                )));
            }
            seen[m] = true;
        }
        Ok(Self { mapping })
    }

    pub fn identity(q: usize) -> Self {
        Self {
            mapping: (0..q).collect(),
        }
    }

    /// Swaps `i` and `j`.
    pub fn transposition(q: usize, i: usize, j: usize) -> Self {
        let mut mapping: Vec<usize> = (0..q).collect();
        mapping.swap(i, j);
        Self { mapping }
    }

    /// A permutation whose cycles have the given lengths, filled in order.
    pub fn from_cycle_type(parts: &[usize]) -> Self {
        let q: usize = parts.iter().sum();
        let mut mapping = vec![0; q];
        let mut start = 0;
        for &len in parts {
            for i in 0..len {
                mapping[start + i] = start + (i + 1) % len;
            }
            start += len;
        }
        Self { mapping }
    }

    pub fn degree(&self) -> usize {
        self.mapping.len()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.degree()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m] = i;
        }
        Self { mapping: inv }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Self {
        assert_eq!(self.degree(), other.degree());
        Self {
            mapping: other.mapping.iter().map(|&i| self.mapping[i]).collect(),
        }
    }

    /// Cycles as lists of points, each starting at its smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let q = self.degree();
        let mut seen = vec![false; q];
        let mut out = Vec::new();
        for start in 0..q {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.mapping[i];
            }
            out.push(cycle);
        }
        out
    }

    pub fn num_cycles(&self) -> usize {
        let q = self.degree();
        let mut seen = vec![false; q];
        let mut count = 0;
        for start in 0..q {
            if !seen[start] {
                count += 1;
                let mut i = start;
                while !seen[i] {
                    seen[i] = true;
                    i = self.mapping[i];
                }
            }
        }
        count
    }

    /// Image of a basis index of `(C^n)^{⊗q}` under the copy permutation
    /// `P_σ |i_0 … i_{q-1}⟩ = |i_{σ⁻¹(0)} … i_{σ⁻¹(q-1)}⟩`, with the first copy
    /// as the most-significant digit.
    pub fn permute_tensor_index(&self, index: usize, n: usize) -> usize {
        let q = self.degree();
        let mut digits = [0usize; 16];
        let mut rest = index;
        for m in (0..q).rev() {
            digits[m] = rest % n;
            rest /= n;
        }
        let mut moved = [0usize; 16];
        for m in 0..q {
            moved[self.mapping[m]] = digits[m];
        }
        moved[..q].iter().fold(0, |acc, &d| acc * n + d)
    }

    /// Cycle lengths, nonincreasing.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut parts: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        parts
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.cycles() {
            let s: Vec<String> = c.iter().map(usize::to_string).collect();
            write!(f, "({})", s.join(" "))?;
        }
        Ok(())
    }
}

/// `"2+1+1"` style label of a cycle type.
pub fn cycle_type_label(parts: &[usize]) -> String {
    parts
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join("+")
}

/// All `q!` permutations in lexicographic order of their mappings.
pub fn all_permutations(q: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..q).collect();
    loop {
        out.push(Permutation {
            mapping: current.clone(),
        });
        if !next_permutation(&mut current) {
            break;
        }
    }
    out
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

/// Integer partitions of `q`, each nonincreasing, in reverse lexicographic
/// order (so `[q]` first and `[1; q]` last).
pub fn partitions(q: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            prefix.push(part);
            rec(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(q, q, &mut Vec::new(), &mut out);
    out
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}
