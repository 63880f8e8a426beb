//! The computable-structure abstraction shared by every concrete structure.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::logic::{AtomicFormula, Formula, Presentation, Signature, Term};

/// Canonical byte encoding of an element; equal iff the elements are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub Vec<u8>);

/// Default cap on the number of elements a single enumeration may touch.
pub const DEFAULT_ELEMENT_CAP: usize = 2_000_000;

/// A computable structure generated by a fixed tuple `ā`.
///
/// `Elem` values are canonical: two values compare equal iff they denote the
/// same element, so hashing and equality are O(size of the encoding).
pub trait Structure: Send + Sync {
    type Elem: Clone + Eq + Hash + Debug + Send + Sync;

    fn presentation(&self) -> &Presentation;

    fn signature(&self) -> &Signature {
        &self.presentation().signature
    }

    fn generators(&self) -> &[Self::Elem];

    fn constant(&self, name: &str) -> Result<Self::Elem>;

    fn apply(&self, func: &str, args: &[Self::Elem]) -> Result<Self::Elem>;

    fn relation(&self, rel: &str, args: &[Self::Elem]) -> Result<bool>;

    fn element_length(&self, e: &Self::Elem) -> usize;

    /// Every element of length `<= max_len`, each once, in any order.
    fn elements_up_to(&self, max_len: usize, cap: usize) -> Result<Vec<Self::Elem>>;

    /// Some term over `ā` evaluating to `e` (not necessarily minimal).
    fn express(&self, e: &Self::Elem) -> Term;

    fn encode(&self, e: &Self::Elem) -> ElementId;

    fn format(&self, e: &Self::Elem) -> String;

    fn parse_element(&self, text: &str) -> Result<Self::Elem>;

    /// Name of the length function, recorded in emitted documents.
    fn length_convention(&self) -> &'static str;

    fn arity(&self) -> usize {
        self.generators().len()
    }
}

/// Homomorphic evaluation of `t` under `xi ↦ assignment[i - 1]`.
pub fn eval_term<S: Structure + ?Sized>(s: &S, t: &Term, assignment: &[S::Elem]) -> Result<S::Elem> {
    match t {
        Term::Var(i) => {
            if *i == 0 || *i > assignment.len() {
                return Err(Error::VariableRange {
                    index: *i,
                    arity: assignment.len(),
                });
            }
            Ok(assignment[*i - 1].clone())
        }
        Term::Const(c) => s.constant(c),
        Term::App(f, args) => {
            let vals = args
                .iter()
                .map(|a| eval_term(s, a, assignment))
                .collect::<Result<Vec<_>>>()?;
            s.apply(f, &vals)
        }
    }
}

/// Like [`eval_term`] but with a partial assignment (bound variables unset).
pub(crate) fn eval_term_env<S: Structure + ?Sized>(
    s: &S,
    t: &Term,
    env: &[Option<S::Elem>],
) -> Result<S::Elem> {
    match t {
        Term::Var(i) => env
            .get(*i)
            .and_then(|v| v.clone())
            .ok_or(Error::VariableRange {
                index: *i,
                arity: env.len().saturating_sub(1),
            }),
        Term::Const(c) => s.constant(c),
        Term::App(f, args) => {
            let vals = args
                .iter()
                .map(|a| eval_term_env(s, a, env))
                .collect::<Result<Vec<_>>>()?;
            s.apply(f, &vals)
        }
    }
}

pub fn holds_atomic<S: Structure + ?Sized>(s: &S, a: &AtomicFormula, assignment: &[S::Elem]) -> Result<bool> {
    match a {
        AtomicFormula::Eq(l, r) => Ok(eval_term(s, l, assignment)? == eval_term(s, r, assignment)?),
        AtomicFormula::Rel(name, ts) => {
            let vals = ts
                .iter()
                .map(|t| eval_term(s, t, assignment))
                .collect::<Result<Vec<_>>>()?;
            s.relation(name, &vals)
        }
    }
}

/// Truth of a quantifier-free formula.
pub fn holds<S: Structure + ?Sized>(s: &S, f: &Formula, assignment: &[S::Elem]) -> Result<bool> {
    match f {
        Formula::Atomic(a) => holds_atomic(s, a, assignment),
        Formula::Not(x) => Ok(!holds(s, x, assignment)?),
        Formula::And(fs) => {
            for x in fs {
                if !holds(s, x, assignment)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(fs) => {
            for x in fs {
                if holds(s, x, assignment)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        _ => Err(Error::Precondition("holds() needs a quantifier-free formula".into())),
    }
}

/// True iff the tuple satisfies every relator and is pairwise distinct.
pub fn satisfies_psi<S: Structure + ?Sized>(s: &S, tuple: &[S::Elem]) -> Result<bool> {
    for (i, a) in tuple.iter().enumerate() {
        if tuple[i + 1..].contains(a) {
            return Ok(false);
        }
    }
    for r in &s.presentation().relators {
        if !holds_atomic(s, r, tuple)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Elements of length `<= max_len`, sorted by (length, encoding).
pub fn enumerate_elements<S: Structure + ?Sized>(s: &S, max_len: usize) -> Result<Vec<S::Elem>> {
    enumerate_elements_capped(s, max_len, DEFAULT_ELEMENT_CAP)
}

pub fn enumerate_elements_capped<S: Structure + ?Sized>(
    s: &S,
    max_len: usize,
    cap: usize,
) -> Result<Vec<S::Elem>> {
    let elems = s.elements_up_to(max_len, cap)?;
    let mut keyed: Vec<(usize, ElementId, S::Elem)> = elems
        .into_iter()
        .map(|e| (s.element_length(&e), s.encode(&e), e))
        .collect();
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    keyed.dedup_by(|a, b| a.1 == b.1);
    Ok(keyed.into_iter().map(|(_, _, e)| e).collect())
}

/// All elements of a finite structure, detected by a stable ball.
pub fn finite_universe<S: Structure + ?Sized>(s: &S, cap: usize) -> Result<Vec<S::Elem>> {
    let mut prev = 0usize;
    for radius in 0.. {
        let elems = enumerate_elements_capped(s, radius, cap).map_err(|e| match e {
            Error::Budget { .. } => Error::NotFinite(cap),
            other => other,
        })?;
        if radius > 0 && elems.len() == prev {
            return Ok(elems);
        }
        if elems.len() > cap {
            return Err(Error::NotFinite(cap));
        }
        prev = elems.len();
    }
    unreachable!()
}

/// Splits `"u, v, w"` on top-level commas and parses each element.
pub fn parse_tuple<S: Structure + ?Sized>(s: &S, text: &str) -> Result<Vec<S::Elem>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    let tuple = parts
        .iter()
        .map(|p| s.parse_element(p.trim()))
        .collect::<Result<Vec<_>>>()?;
    if tuple.len() != s.arity() {
        return Err(Error::Precondition(format!(
            "tuple has {} entries, structure has {} generators",
            tuple.len(),
            s.arity()
        )));
    }
    Ok(tuple)
}

pub fn format_tuple<S: Structure + ?Sized>(s: &S, tuple: &[S::Elem]) -> String {
    tuple.iter().map(|e| s.format(e)).collect::<Vec<_>>().join(", ")
}

/// Size-minimal term search over the signature, deduplicating by value.
///
/// Level `k` holds the values whose smallest term has exactly `k` nodes, with
/// the first such term in enumeration order: variables, then constants, then
/// function symbols in signature order with argument sizes and argument
/// values in lexicographic order. Replacing a subterm by a smaller one with
/// the same value keeps the value, so the first hit for each value is
/// size-minimal.
pub struct TermSearch<'a, S: Structure + ?Sized> {
    s: &'a S,
    levels: Vec<Vec<(S::Elem, Term)>>,
    seen: HashMap<S::Elem, (usize, usize)>,
    value_cap: usize,
}

impl<'a, S: Structure + ?Sized> TermSearch<'a, S> {
    pub fn new(s: &'a S) -> Self {
        Self::with_cap(s, 400_000)
    }

    pub fn with_cap(s: &'a S, value_cap: usize) -> Self {
        TermSearch {
            s,
            levels: vec![Vec::new()],
            seen: HashMap::new(),
            value_cap,
        }
    }

    fn push(&mut self, level: usize, value: S::Elem, term: Term) -> Result<()> {
        if self.seen.contains_key(&value) {
            return Ok(());
        }
        if self.seen.len() >= self.value_cap {
            return Err(Error::budget("term search values", self.value_cap));
        }
        let idx = self.levels[level].len();
        self.seen.insert(value.clone(), (level, idx));
        self.levels[level].push((value, term));
        Ok(())
    }

    fn grow(&mut self) -> Result<()> {
        let size = self.levels.len();
        self.levels.push(Vec::new());
        if size == 1 {
            let gens = self.s.generators().to_vec();
            for (i, g) in gens.into_iter().enumerate() {
                self.push(1, g, Term::Var(i + 1))?;
            }
            for c in self.s.signature().constants.clone() {
                let v = self.s.constant(&c)?;
                self.push(1, v, Term::Const(c))?;
            }
            return Ok(());
        }
        for (f, arity) in self.s.signature().functions.clone() {
            for parts in compositions(size - 1, arity) {
                if parts.iter().any(|p| self.levels[*p].is_empty()) {
                    continue;
                }
                let mut idx = vec![0usize; arity];
                loop {
                    let args: Vec<S::Elem> = (0..arity).map(|k| self.levels[parts[k]][idx[k]].0.clone()).collect();
                    let value = self.s.apply(&f, &args)?;
                    if !self.seen.contains_key(&value) {
                        let term = Term::App(
                            f.clone(),
                            (0..arity).map(|k| self.levels[parts[k]][idx[k]].1.clone()).collect(),
                        );
                        self.push(size, value, term)?;
                    }
                    let bounds: Vec<usize> = parts.iter().map(|p| self.levels[*p].len()).collect();
                    if !advance(&mut idx, &bounds) {
                        break;
                    }
                }
            }
        }
        Ok(())
    }

    /// The size-minimal term for `target`, searching terms of at most `max_size` nodes.
    pub fn find(&mut self, target: &S::Elem, max_size: usize) -> Result<Term> {
        loop {
            if let Some(&(l, i)) = self.seen.get(target) {
                return Ok(self.levels[l][i].1.clone());
            }
            if self.levels.len() > max_size {
                return Err(Error::budget("term size", max_size));
            }
            self.grow()?;
        }
    }
}

/// Odometer step over `idx[k] < bounds[k]`, last coordinate fastest.
pub(crate) fn advance(idx: &mut [usize], bounds: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < bounds[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// Ordered compositions of `total` into `parts` positive summands, lexicographic.
pub(crate) fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            if total >= 1 {
                prefix.push(total);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        for first in 1..=total.saturating_sub(parts - 1) {
            prefix.push(first);
            rec(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(total, parts, &mut Vec::new(), &mut out);
    }
    out
}

/// Size-minimal terms `t_i` with `t_i(ā) = b_i`.
pub fn find_terms_for<S: Structure + ?Sized>(s: &S, tuple: &[S::Elem], max_size: usize) -> Result<Vec<Term>> {
    let mut search = TermSearch::new(s);
    tuple.iter().map(|b| search.find(b, max_size)).collect()
}
