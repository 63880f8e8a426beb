//! Groups as structures over the signature `{e, mul/2, inv/1}`.

use std::collections::HashSet;
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::logic::{AtomicFormula, Presentation, Signature, Term};
use crate::structure::{ElementId, Structure};

pub const IDENTITY: &str = "e";
pub const MUL: &str = "mul";
pub const INV: &str = "inv";

pub fn group_signature() -> &'static Signature {
    static SIG: OnceLock<Signature> = OnceLock::new();
    SIG.get_or_init(|| {
        Signature::new(
            vec![IDENTITY.into()],
            vec![(MUL.into(), 2), (INV.into(), 1)],
            vec![],
        )
        .expect("group signature is valid")
    })
}

pub fn is_group_signature(sig: &Signature) -> bool {
    sig.has_constant(IDENTITY) && sig.function_arity(MUL) == Some(2) && sig.function_arity(INV) == Some(1)
}

/// A letter `x_i` or `x_i^-1` of a group word.
pub type Letter = (usize, bool);

pub trait Group: Send + Sync {
    type Elem: Clone + Eq + Hash + Debug + Send + Sync;

    fn group_presentation(&self) -> &Presentation;
    fn group_generators(&self) -> &[Self::Elem];
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inverse(&self, a: &Self::Elem) -> Self::Elem;

    /// Geodesic length over the generators and their inverses.
    fn word_length(&self, a: &Self::Elem) -> usize;

    /// A geodesic spelling of `a`.
    fn spell(&self, a: &Self::Elem) -> Vec<Letter>;

    fn encode_word(&self, a: &Self::Elem) -> Vec<u8>;
    fn format_word(&self, a: &Self::Elem) -> String;
    fn parse_word_text(&self, text: &str) -> Result<Self::Elem>;

    fn ball(&self, radius: usize, cap: usize) -> Result<Vec<Self::Elem>> {
        ball(self, radius, cap)
    }
}

/// Words as right-nested products: `x1 x2 x1` is `mul(x1,mul(x2,x1))`.
pub fn word_term(letters: &[Letter]) -> Term {
    let leaf = |&(g, inv): &Letter| {
        let v = Term::Var(g + 1);
        if inv {
            Term::app(INV, vec![v])
        } else {
            v
        }
    };
    match letters.split_last() {
        None => Term::Const(IDENTITY.into()),
        Some((last, rest)) => rest
            .iter()
            .rev()
            .fold(leaf(last), |acc, l| Term::app(MUL, vec![leaf(l), acc])),
    }
}

/// `x_i^k` as a right-nested product of `k` copies.
pub fn power_term(var: usize, k: usize) -> Term {
    word_term(&vec![(var - 1, false); k])
}

pub fn commutation_relator(i: usize, j: usize) -> AtomicFormula {
    AtomicFormula::Eq(
        Term::app(MUL, vec![Term::Var(i), Term::Var(j)]),
        Term::app(MUL, vec![Term::Var(j), Term::Var(i)]),
    )
}

pub fn power_relator(i: usize, k: usize) -> AtomicFormula {
    AtomicFormula::Eq(power_term(i, k), Term::Const(IDENTITY.into()))
}

/// Elements within `radius` of the identity in the Cayley graph, BFS order.
pub fn ball<G: Group + ?Sized>(g: &G, radius: usize, cap: usize) -> Result<Vec<G::Elem>> {
    let mut steps = Vec::new();
    for x in g.group_generators() {
        steps.push(x.clone());
        steps.push(g.inverse(x));
    }
    let mut seen: HashSet<G::Elem> = HashSet::new();
    let mut order = vec![g.identity()];
    seen.insert(g.identity());
    let mut frontier = 0;
    for _ in 0..radius {
        let end = order.len();
        for i in frontier..end {
            for s in &steps {
                let next = g.mul(&order[i], s);
                if seen.insert(next.clone()) {
                    order.push(next);
                    if order.len() > cap {
                        return Err(Error::budget("group ball", cap));
                    }
                }
            }
        }
        if order.len() == end {
            break;
        }
        frontier = end;
    }
    Ok(order)
}

/// BFS distance from the identity; the reference for `word_length`.
pub fn bfs_length<G: Group + ?Sized>(g: &G, target: &G::Elem, max_radius: usize) -> Option<usize> {
    let mut steps = Vec::new();
    for x in g.group_generators() {
        steps.push(x.clone());
        steps.push(g.inverse(x));
    }
    let mut seen: HashSet<G::Elem> = HashSet::new();
    let mut layer = vec![g.identity()];
    seen.insert(g.identity());
    for d in 0..=max_radius {
        if layer.contains(target) {
            return Some(d);
        }
        let mut next = Vec::new();
        for a in &layer {
            for s in &steps {
                let b = g.mul(a, s);
                if seen.insert(b.clone()) {
                    next.push(b);
                }
            }
        }
        layer = next;
    }
    None
}

impl<G: Group> Structure for G {
    type Elem = G::Elem;

    fn presentation(&self) -> &Presentation {
        self.group_presentation()
    }

    fn generators(&self) -> &[Self::Elem] {
        self.group_generators()
    }

    fn constant(&self, name: &str) -> Result<Self::Elem> {
        if name == IDENTITY {
            Ok(self.identity())
        } else {
            Err(Error::UnknownSymbol(name.to_string()))
        }
    }

    fn apply(&self, func: &str, args: &[Self::Elem]) -> Result<Self::Elem> {
        match (func, args) {
            (MUL, [a, b]) => Ok(self.mul(a, b)),
            (INV, [a]) => Ok(self.inverse(a)),
            (MUL, _) | (INV, _) => Err(Error::Arity {
                name: func.to_string(),
                expected: if func == MUL { 2 } else { 1 },
                found: args.len(),
            }),
            _ => Err(Error::UnknownSymbol(func.to_string())),
        }
    }

    fn relation(&self, rel: &str, _args: &[Self::Elem]) -> Result<bool> {
        Err(Error::UnknownSymbol(rel.to_string()))
    }

    fn element_length(&self, e: &Self::Elem) -> usize {
        self.word_length(e)
    }

    fn elements_up_to(&self, max_len: usize, cap: usize) -> Result<Vec<Self::Elem>> {
        self.ball(max_len, cap)
    }

    fn express(&self, e: &Self::Elem) -> Term {
        word_term(&self.spell(e))
    }

    fn encode(&self, e: &Self::Elem) -> ElementId {
        ElementId(self.encode_word(e))
    }

    fn format(&self, e: &Self::Elem) -> String {
        self.format_word(e)
    }

    fn parse_element(&self, text: &str) -> Result<Self::Elem> {
        self.parse_word_text(text)
    }

    fn length_convention(&self) -> &'static str {
        "geodesic word length over generators and inverses"
    }
}

/// Parses whitespace-separated `v`, `v^k`, `v^-k` tokens against `names`.
/// `e` (when not a generator name) and the empty string denote the identity.
pub fn parse_word(text: &str, names: &[String]) -> Result<Vec<(usize, i64)>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for token in text.split_whitespace() {
        let pos = text[offset..].find(token).map(|p| p + offset).unwrap_or(offset);
        offset = pos + token.len();
        let (name, exp) = match token.split_once('^') {
            Some((n, k)) => {
                let k: i64 = k
                    .parse()
                    .map_err(|_| Error::syntax(pos + n.len() + 1, format!("bad exponent `{k}`")))?;
                (n, k)
            }
            None => (token, 1),
        };
        match names.iter().position(|n| n == name) {
            Some(i) => out.push((i, exp)),
            None if name == IDENTITY => {}
            None => return Err(Error::UnknownSymbol(name.to_string())),
        }
    }
    Ok(out)
}
