use std::fmt;

use crate::error::{Error, Result};
use crate::group::{commutation_relator, group_signature, Group, Letter, INV, MUL};
use crate::logic::{Presentation, Term};
use crate::orbit::{AffineBound, AutPresentation, AutomorphismSpec};

use super::{signed_perm_inverse, signed_perm_terms};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVec(pub Vec<i64>);

impl fmt::Display for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `ℤⁿ` on the standard basis; length is the L1 norm.
#[derive(Debug, Clone)]
pub struct FreeAbelian {
    n: usize,
    presentation: Presentation,
    gens: Vec<IntVec>,
}

impl FreeAbelian {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("rank must be at least 1".into()));
        }
        let mut relators = Vec::new();
        for i in 1..=n {
            for j in (i + 1)..=n {
                relators.push(commutation_relator(i, j));
            }
        }
        let presentation = Presentation::new(group_signature().clone(), n, relators)?;
        let gens = (0..n)
            .map(|i| IntVec((0..n).map(|j| i64::from(i == j)).collect()))
            .collect();
        Ok(FreeAbelian { n, presentation, gens })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn vector(&self, coords: &[i64]) -> Result<IntVec> {
        if coords.len() != self.n {
            return Err(Error::Precondition(format!(
                "vector has {} coordinates, rank is {}",
                coords.len(),
                self.n
            )));
        }
        Ok(IntVec(coords.to_vec()))
    }
}

impl Group for FreeAbelian {
    type Elem = IntVec;

    fn group_presentation(&self) -> &Presentation {
        &self.presentation
    }

    fn group_generators(&self) -> &[IntVec] {
        &self.gens
    }

    fn identity(&self) -> IntVec {
        IntVec(vec![0; self.n])
    }

    fn mul(&self, a: &IntVec, b: &IntVec) -> IntVec {
        IntVec(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    fn inverse(&self, a: &IntVec) -> IntVec {
        IntVec(a.0.iter().map(|x| -x).collect())
    }

    fn word_length(&self, a: &IntVec) -> usize {
        a.0.iter().map(|x| x.unsigned_abs() as usize).sum()
    }

    fn spell(&self, a: &IntVec) -> Vec<Letter> {
        a.0.iter()
            .enumerate()
            .flat_map(|(i, &x)| std::iter::repeat_n((i, x < 0), x.unsigned_abs() as usize))
            .collect()
    }

    /// Big-endian with the sign bit flipped, so byte order is numeric order.
    fn encode_word(&self, a: &IntVec) -> Vec<u8> {
        a.0.iter()
            .flat_map(|&x| ((x as u64) ^ (1 << 63)).to_be_bytes())
            .collect()
    }

    fn format_word(&self, a: &IntVec) -> String {
        a.to_string()
    }

    fn parse_word_text(&self, text: &str) -> Result<IntVec> {
        let t = text.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::syntax(0, "expected `(v1,...,vn)`"))?;
        let mut coords = Vec::new();
        let mut offset = 1;
        for part in inner.split(',') {
            let x: i64 = part
                .trim()
                .parse()
                .map_err(|_| Error::syntax(offset, format!("bad coordinate `{}`", part.trim())))?;
            coords.push(x);
            offset += part.len() + 1;
        }
        self.vector(&coords)
    }
}

/// Exact integer determinant (fraction-free elimination).
pub fn determinant(rows: &[Vec<i64>]) -> i128 {
    let n = rows.len();
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// A tuple of `n` vectors is a basis of `ℤⁿ` iff its determinant is `±1`.
pub fn det_oracle(vectors: &[IntVec]) -> bool {
    let n = vectors.len();
    if n == 0 || vectors.iter().any(|v| v.0.len() != n) {
        return false;
    }
    let rows: Vec<Vec<i64>> = vectors.iter().map(|v| v.0.clone()).collect();
    determinant(&rows).abs() == 1
}

/// Coordinate swaps, negation of the first coordinate and the transvection
/// `e₁ ↦ e₁ + e₂`, with `F(m̄) = n² + Σ mᵢ`.
pub fn abelian_aut_presentation(z: &FreeAbelian) -> Result<AutPresentation<IntVec>> {
    let n = z.rank();
    let mut gens = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.swap(i, j);
            let terms = signed_perm_terms(&perm, &vec![false; n]);
            let name = format!("swap_{}_{}", i + 1, j + 1);
            gens.push(AutomorphismSpec::from_terms(z, &name, terms.clone(), terms)?);
        }
    }
    let mut negate = vec![false; n];
    negate[0] = true;
    let perm: Vec<usize> = (0..n).collect();
    let (iperm, ineg) = signed_perm_inverse(&perm, &negate);
    gens.push(AutomorphismSpec::from_terms(
        z,
        "neg_1",
        signed_perm_terms(&perm, &negate),
        signed_perm_terms(&iperm, &ineg),
    )?);
    if n >= 2 {
        let mut img: Vec<Term> = (1..=n).map(Term::Var).collect();
        let mut inv = img.clone();
        img[0] = Term::app(MUL, vec![Term::Var(1), Term::Var(2)]);
        inv[0] = Term::app(MUL, vec![Term::Var(1), Term::app(INV, vec![Term::Var(2)])]);
        gens.push(AutomorphismSpec::from_terms(z, "tv_1_2", img, inv)?);
    }
    AutPresentation::new(gens, AffineBound::uniform(n * n, 1, n)?)
}
