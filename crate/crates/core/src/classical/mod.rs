//! Free abelian groups `ℤⁿ` and free groups `F_n`, with their automorphism
//! generating sets and independent basis oracles.

mod free_abelian;
mod free_group;

pub use free_abelian::{abelian_aut_presentation, det_oracle, determinant, FreeAbelian, IntVec};
pub use free_group::{nielsen_aut_presentation, nielsen_oracle, nielsen_reduce, FWord, FreeGroup};

use crate::logic::Term;

/// `x_i ↦ x_i^{±1}` images of a signed permutation `i ↦ (perm[i], negate[i])`.
pub(crate) fn signed_perm_terms(perm: &[usize], negate: &[bool]) -> Vec<Term> {
    perm.iter()
        .zip(negate)
        .map(|(&p, &neg)| {
            let v = Term::Var(p + 1);
            if neg {
                Term::app(crate::group::INV, vec![v])
            } else {
                v
            }
        })
        .collect()
}

/// Inverse of a signed permutation in the same representation.
pub(crate) fn signed_perm_inverse(perm: &[usize], negate: &[bool]) -> (Vec<usize>, Vec<bool>) {
    let n = perm.len();
    let mut inv = vec![0; n];
    let mut neg = vec![false; n];
    for i in 0..n {
        inv[perm[i]] = i;
        neg[perm[i]] = negate[i];
    }
    (inv, neg)
}

/// All signed permutations of `0..n`, identity first, permutations in
/// lexicographic order and sign patterns in binary order within each.
pub(crate) fn signed_permutations(n: usize) -> Vec<(Vec<usize>, Vec<bool>)> {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out.sort();
        out
    }
    let mut out = Vec::new();
    for p in perms(n) {
        for mask in 0u32..(1 << n) {
            out.push((p.clone(), (0..n).map(|i| mask >> i & 1 == 1).collect()));
        }
    }
    out
}
