use crate::error::{Error, Result};
use crate::group::{group_signature, parse_word, Group, Letter, IDENTITY, INV, MUL};
use crate::logic::{Presentation, Term};
use crate::orbit::{AffineBound, AutPresentation, AutomorphismSpec};

use super::{signed_perm_inverse, signed_perm_terms, signed_permutations};

/// Freely reduced word; letter `±(i + 1)` is generator `i` or its inverse.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FWord(pub Vec<i8>);

impl FWord {
    pub fn reduced(letters: impl IntoIterator<Item = i8>) -> FWord {
        let mut out: Vec<i8> = Vec::new();
        for x in letters {
            if out.last() == Some(&-x) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        FWord(out)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> FWord {
        FWord(self.0.iter().rev().map(|x| -x).collect())
    }

    pub fn concat(&self, other: &FWord) -> FWord {
        FWord::reduced(self.0.iter().chain(&other.0).copied())
    }
}

/// `F_n` on generators named `a, b, c, …`.
#[derive(Debug, Clone)]
pub struct FreeGroup {
    names: Vec<String>,
    presentation: Presentation,
    gens: Vec<FWord>,
}

impl FreeGroup {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 26 {
            return Err(Error::Precondition("rank must be between 1 and 26".into()));
        }
        let names: Vec<String> = (0..n)
            .map(|i| char::from(b'a' + i as u8).to_string())
            .map(|s| if s == IDENTITY { "e_".to_string() } else { s })
            .collect();
        let presentation = Presentation::new(group_signature().clone(), n, vec![])?;
        let gens = (0..n).map(|i| FWord(vec![i as i8 + 1])).collect();
        Ok(FreeGroup {
            names,
            presentation,
            gens,
        })
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn word(&self, text: &str) -> Result<FWord> {
        let parsed = parse_word(text, &self.names)?;
        let mut letters = Vec::new();
        for (g, k) in parsed {
            let x = g as i8 + 1;
            let x = if k < 0 { -x } else { x };
            letters.extend(std::iter::repeat_n(x, k.unsigned_abs() as usize));
        }
        Ok(FWord::reduced(letters))
    }
}

impl Group for FreeGroup {
    type Elem = FWord;

    fn group_presentation(&self) -> &Presentation {
        &self.presentation
    }

    fn group_generators(&self) -> &[FWord] {
        &self.gens
    }

    fn identity(&self) -> FWord {
        FWord::default()
    }

    fn mul(&self, a: &FWord, b: &FWord) -> FWord {
        a.concat(b)
    }

    fn inverse(&self, a: &FWord) -> FWord {
        a.inverse()
    }

    fn word_length(&self, a: &FWord) -> usize {
        a.len()
    }

    fn spell(&self, a: &FWord) -> Vec<Letter> {
        a.0.iter().map(|&x| (x.unsigned_abs() as usize - 1, x < 0)).collect()
    }

    fn encode_word(&self, a: &FWord) -> Vec<u8> {
        a.0.iter()
            .map(|&x| 2 * (x.unsigned_abs() - 1) + u8::from(x < 0))
            .collect()
    }

    fn format_word(&self, a: &FWord) -> String {
        if a.is_empty() {
            return IDENTITY.to_string();
        }
        a.0.iter()
            .map(|&x| {
                let name = &self.names[x.unsigned_abs() as usize - 1];
                if x < 0 {
                    format!("{name}^-1")
                } else {
                    name.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn parse_word_text(&self, text: &str) -> Result<FWord> {
        self.word(text)
    }
}

/// The elementary moves `u_i ↦ u_i u_j^{±1}` and `u_i ↦ u_j^{±1} u_i`, in
/// the order `(i, j, sign, side)`.
fn moves(n: usize) -> impl Iterator<Item = (usize, usize, bool, bool)> {
    (0..n).flat_map(move |i| {
        (0..n)
            .filter(move |&j| j != i)
            .flat_map(move |j| [false, true].into_iter().flat_map(move |neg| [false, true].map(|left| (i, j, neg, left))))
    })
}

/// Greedy Nielsen reduction: applies the first length-decreasing move until
/// none is left.
pub fn nielsen_reduce(tuple: &[FWord]) -> Vec<FWord> {
    let mut cur = tuple.to_vec();
    'outer: loop {
        if cur.iter().any(FWord::is_empty) {
            return cur;
        }
        for (i, j, neg, left) in moves(cur.len()) {
            let other = if neg { cur[j].inverse() } else { cur[j].clone() };
            let cand = if left { other.concat(&cur[i]) } else { cur[i].concat(&other) };
            if cand.len() < cur[i].len() {
                cur[i] = cand;
                continue 'outer;
            }
        }
        return cur;
    }
}

/// A tuple of reduced words is a basis of `F_n` iff its Nielsen reduction
/// is a signed permutation of the generators.
pub fn nielsen_oracle(tuple: &[FWord], rank: usize) -> bool {
    if tuple.len() != rank {
        return false;
    }
    let reduced = nielsen_reduce(tuple);
    let mut seen = vec![false; rank];
    for w in &reduced {
        if w.len() != 1 {
            return false;
        }
        let g = w.0[0].unsigned_abs() as usize - 1;
        if g >= rank || seen[g] {
            return false;
        }
        seen[g] = true;
    }
    true
}

/// Every non-identity signed permutation of the basis, plus `x_i ↦ x_i x_j`
/// and `x_i ↦ x_j x_i` for `i ≠ j`, with `F(m̄) = Σ mᵢ`.
pub fn nielsen_aut_presentation(f: &FreeGroup) -> Result<AutPresentation<FWord>> {
    let n = f.rank();
    let gens_text: Vec<&str> = f.names.iter().map(String::as_str).collect();
    let mut gens = Vec::new();
    for (perm, negate) in signed_permutations(n).into_iter().skip(1) {
        let (iperm, ineg) = signed_perm_inverse(&perm, &negate);
        let label: Vec<String> = perm
            .iter()
            .zip(&negate)
            .map(|(&p, &neg)| format!("{}{}", gens_text[p], if neg { "'" } else { "" }))
            .collect();
        let name = format!("perm({})", label.join(","));
        gens.push(AutomorphismSpec::from_terms(
            f,
            &name,
            signed_perm_terms(&perm, &negate),
            signed_perm_terms(&iperm, &ineg),
        )?);
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for left in [false, true] {
                let (xi, xj) = (Term::Var(i + 1), Term::Var(j + 1));
                let xj_inv = Term::app(INV, vec![xj.clone()]);
                let (img, inv) = if left {
                    (Term::app(MUL, vec![xj, xi.clone()]), Term::app(MUL, vec![xj_inv, xi]))
                } else {
                    (Term::app(MUL, vec![xi.clone(), xj]), Term::app(MUL, vec![xi, xj_inv]))
                };
                let mut image_terms: Vec<Term> = (1..=n).map(Term::Var).collect();
                let mut inverse_terms = image_terms.clone();
                image_terms[i] = img;
                inverse_terms[i] = inv;
                let name = if left {
                    format!("l_{}_{}", gens_text[i], gens_text[j])
                } else {
                    format!("r_{}_{}", gens_text[i], gens_text[j])
                };
                gens.push(AutomorphismSpec::from_terms(f, &name, image_terms, inverse_terms)?);
            }
        }
    }
    AutPresentation::new(gens, AffineBound::uniform(0, 1, n)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_formats() {
        let f = FreeGroup::new(2).unwrap();
        let w = f.word("a b a^-1").unwrap();
        assert_eq!(f.format_word(&w), "a b a^-1");
        assert!(f.word("a a^-1").unwrap().is_empty());
        assert_eq!(f.word("a b a b").unwrap().len(), 4);
        assert_eq!(f.word("a^2 b^-2").unwrap(), FWord(vec![1, 1, -2, -2]));
    }

    #[test]
    fn oracle_examples() {
        let f = FreeGroup::new(2).unwrap();
        let w = |s: &str| f.word(s).unwrap();
        assert!(nielsen_oracle(&[w("a"), w("b")], 2));
        assert!(nielsen_oracle(&[w("a"), w("a b a")], 2));
        assert!(!nielsen_oracle(&[w("a"), w("a^-1")], 2));
        assert!(!nielsen_oracle(&[w("a^2"), w("b")], 2));
        assert!(nielsen_oracle(&[w("b^-1"), w("a^-1")], 2));
    }

    #[test]
    fn full_nielsen_set_size() {
        let f = FreeGroup::new(2).unwrap();
        let ap = nielsen_aut_presentation(&f).unwrap();
        assert_eq!(ap.gens.len(), 7 + 4);
        assert_eq!(ap.bound.eval(&[1, 3]), 4);
        assert_eq!(ap.gens[0].name, "perm(a',b)");
    }
}
