use crate::complex::cpow;
use crate::error::{GeometryError, Result};
use crate::jet::Jet;

/// Multi-indices `j ∈ ℕ^n` with `1 ≤ |j| ≤ d`, graded lexicographic: by
/// degree, then descending lexicographic within a degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiIndexBasis {
    n: usize,
    cutoff: usize,
    indices: Vec<Vec<u32>>,
}

fn of_degree(n: usize, m: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if n == 1 {
        prefix.push(m);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=m).rev() {
        prefix.push(first);
        of_degree(n - 1, m - first, prefix, out);
        prefix.pop();
    }
}

/// All multi-indices of degree `lo..=hi` in graded lexicographic order.
pub fn graded_indices(n: usize, lo: usize, hi: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for m in lo..=hi {
        of_degree(n, m as u32, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

impl MultiIndexBasis {
    pub fn new(n: usize, cutoff: usize) -> Result<MultiIndexBasis> {
        if n < 1 || cutoff < 1 {
            return Err(GeometryError::Parameter(format!(
                "multi-index basis needs n >= 1 and cutoff >= 1, got n = {n}, d = {cutoff}"
            )));
        }
        Ok(MultiIndexBasis {
            n,
            cutoff,
            indices: graded_indices(n, 1, cutoff),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn indices(&self) -> &[Vec<u32>] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

pub fn degree(j: &[u32]) -> u32 {
    j.iter().sum()
}

pub fn ln_factorial(m: u32) -> f64 {
    (2..=m).map(|k| f64::from(k).ln()).sum()
}

/// `ln j! = Σ ln j_i!`.
pub fn ln_multi_factorial(j: &[u32]) -> f64 {
    j.iter().map(|&v| ln_factorial(v)).sum()
}

/// `z^j` on interleaved real coordinates, as a (re, im) pair of jets.
pub fn monomial(z: &[Jet], j: &[u32]) -> (Jet, Jet) {
    let mut acc = (Jet::constant(1.0), Jet::constant(0.0));
    for (k, &e) in j.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let p = cpow((&z[2 * k], &z[2 * k + 1]), e);
        acc = crate::complex::cmul((&acc.0, &acc.1), (&p.0, &p.1));
    }
    acc
}

/// Number of multi-indices with `1 ≤ |j| ≤ d` in `n` variables,
/// `C(n + d, d) − 1`.
pub fn count(n: usize, d: usize) -> usize {
    let mut c: u128 = 1;
    for i in 1..=d as u128 {
        c = c * (n as u128 + i) / i;
    }
    (c - 1) as usize
}
