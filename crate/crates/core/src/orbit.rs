//! Bounded search of the automorphism orbit of the generating tuple.
//!
//! Automorphisms are handled through their action on `ā`: a generator is
//! stored as image terms `u_i(x̄)` with `α(a_i) = u_i(ā)`, so for any
//! automorphism `γ` we get `(γ∘α)(a_i) = u_i(γ(ā))`. A breadth-first search
//! over image tuples therefore needs nothing but term evaluation.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use log::{debug, trace};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{Group, INV, MUL};
use crate::logic::Term;
use crate::structure::{
    enumerate_elements, eval_term, format_tuple, holds_atomic, satisfies_psi, Structure, TermSearch,
};

/// Default cap on the number of distinct image tuples an engine may store.
pub const DEFAULT_NODE_CAP: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismSpec<E> {
    pub name: String,
    pub image_terms: Vec<Term>,
    pub inverse_terms: Vec<Term>,
    pub images: Vec<E>,
    pub inverse_images: Vec<E>,
}

impl<E: Clone + Eq + fmt::Debug> AutomorphismSpec<E> {
    /// Builds a spec from image terms over `ā` and checks it.
    pub fn from_terms<S>(s: &S, name: &str, image_terms: Vec<Term>, inverse_terms: Vec<Term>) -> Result<Self>
    where
        S: Structure<Elem = E> + ?Sized,
    {
        let n = s.arity();
        let bad = |reason: String| Error::InvalidAutomorphism {
            name: name.to_string(),
            reason,
        };
        if image_terms.len() != n || inverse_terms.len() != n {
            return Err(bad(format!("expected {n} image terms")));
        }
        for t in image_terms.iter().chain(&inverse_terms) {
            t.check(s.signature(), n).map_err(|e| bad(e.to_string()))?;
        }
        let gens = s.generators();
        let images = image_terms
            .iter()
            .map(|t| eval_term(s, t, gens))
            .collect::<Result<Vec<_>>>()?;
        let inverse_images = inverse_terms
            .iter()
            .map(|t| eval_term(s, t, gens))
            .collect::<Result<Vec<_>>>()?;
        let spec = AutomorphismSpec {
            name: name.to_string(),
            image_terms,
            inverse_terms,
            images,
            inverse_images,
        };
        spec.validate(s)?;
        Ok(spec)
    }

    /// Builds a spec from image elements, spelling them with `express`.
    pub fn from_images<S>(s: &S, name: &str, images: Vec<E>, inverse_images: Vec<E>) -> Result<Self>
    where
        S: Structure<Elem = E> + ?Sized,
    {
        let image_terms = images.iter().map(|e| s.express(e)).collect();
        let inverse_terms = inverse_images.iter().map(|e| s.express(e)).collect();
        Self::from_terms(s, name, image_terms, inverse_terms)
    }

    /// Relators and distinctness hold of both image tuples, and the two maps
    /// invert each other on `ā`.
    fn validate<S>(&self, s: &S) -> Result<()>
    where
        S: Structure<Elem = E> + ?Sized,
    {
        let bad = |reason: &str| Error::InvalidAutomorphism {
            name: self.name.clone(),
            reason: reason.to_string(),
        };
        if !satisfies_psi(s, &self.images)? {
            return Err(bad("images violate a relator or coincide"));
        }
        if !satisfies_psi(s, &self.inverse_images)? {
            return Err(bad("inverse images violate a relator or coincide"));
        }
        let gens = s.generators();
        for ((g, image), inverse) in gens.iter().zip(&self.image_terms).zip(&self.inverse_terms) {
            if eval_term(s, image, &self.inverse_images)? != *g {
                return Err(bad("inverse images are not a right inverse"));
            }
            if eval_term(s, inverse, &self.images)? != *g {
                return Err(bad("inverse images are not a left inverse"));
            }
        }
        Ok(())
    }

    pub fn is_identity_on(&self, gens: &[E]) -> bool {
        self.images == gens
    }

    pub fn terms(&self, inverse: bool) -> &[Term] {
        if inverse {
            &self.inverse_terms
        } else {
            &self.image_terms
        }
    }
}

/// `F(m̄) = c₀ + Σ cᵢ mᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineBound {
    pub constant: usize,
    pub coefficients: Vec<usize>,
}

impl AffineBound {
    pub fn new(constant: usize, coefficients: Vec<usize>) -> Result<Self> {
        if constant == 0 && coefficients.iter().all(|c| *c == 0) {
            return Err(Error::Precondition("affine bound is identically zero".into()));
        }
        Ok(AffineBound {
            constant,
            coefficients,
        })
    }

    pub fn uniform(constant: usize, coefficient: usize, n: usize) -> Result<Self> {
        Self::new(constant, vec![coefficient; n])
    }

    pub fn eval(&self, lengths: &[usize]) -> usize {
        self.constant
            + self
                .coefficients
                .iter()
                .zip(lengths)
                .map(|(c, m)| c * m)
                .sum::<usize>()
    }
}

impl fmt::Display for AffineBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for (i, c) in self.coefficients.iter().enumerate() {
            if *c != 0 {
                write!(f, " + {c}*m{}", i + 1)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutPresentation<E> {
    pub gens: Vec<AutomorphismSpec<E>>,
    pub bound: AffineBound,
}

impl<E> AutPresentation<E> {
    pub fn new(gens: Vec<AutomorphismSpec<E>>, bound: AffineBound) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::Precondition("automorphism generating set is empty".into()));
        }
        Ok(AutPresentation { gens, bound })
    }

    pub fn names(&self) -> Vec<&str> {
        self.gens.iter().map(|g| g.name.as_str()).collect()
    }

    /// All letters, each generator followed by its inverse.
    pub fn letters(&self) -> Vec<Letter> {
        (0..self.gens.len())
            .flat_map(|gen| [Letter { gen, inverse: false }, Letter { gen, inverse: true }])
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

/// `l₁ l₂ … l_m`, acting on `ā` as `l₁ ∘ l₂ ∘ … ∘ l_m`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct AutomorphismWord {
    pub letters: Vec<Letter>,
}

impl AutomorphismWord {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Image of `ā` under the composed automorphism.
    pub fn apply<S: Structure + ?Sized>(&self, s: &S, ap: &AutPresentation<S::Elem>) -> Result<Vec<S::Elem>> {
        let mut tuple = s.generators().to_vec();
        for l in &self.letters {
            tuple = act(s, ap.gens[l.gen].terms(l.inverse), &tuple)?;
        }
        Ok(tuple)
    }

    pub fn render<E>(&self, ap: &AutPresentation<E>) -> String {
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| {
                let name = &ap.gens[l.gen].name;
                if l.inverse {
                    format!("{name}^-1")
                } else {
                    name.clone()
                }
            })
            .collect();
        format!("[{}]", parts.join(", "))
    }
}

/// `ū(c̄)`: the image tuple after one more letter.
fn act<S: Structure + ?Sized>(s: &S, terms: &[Term], current: &[S::Elem]) -> Result<Vec<S::Elem>> {
    terms.iter().map(|t| eval_term(s, t, current)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbitVerdict {
    InOrbit { witness: AutomorphismWord, bound: usize },
    NotInOrbit { bound: usize },
}

impl OrbitVerdict {
    pub fn in_orbit(&self) -> bool {
        matches!(self, OrbitVerdict::InOrbit { .. })
    }

    pub fn bound(&self) -> usize {
        match self {
            OrbitVerdict::InOrbit { bound, .. } | OrbitVerdict::NotInOrbit { bound } => *bound,
        }
    }

    pub fn render<E>(&self, ap: &AutPresentation<E>) -> String {
        match self {
            OrbitVerdict::InOrbit { witness, .. } => format!("IN-ORBIT witness={}", witness.render(ap)),
            OrbitVerdict::NotInOrbit { bound } => format!("NOT-IN-ORBIT bound={bound}"),
        }
    }
}

struct Ball<E> {
    tuples: Vec<Vec<E>>,
    parent: Vec<Option<(usize, Letter)>>,
    depth: Vec<usize>,
    index: HashMap<Vec<E>, usize>,
    /// Every node of depth `<= radius` is present.
    radius: usize,
    layer_start: usize,
    /// The last expansion found nothing new: the whole orbit is stored.
    complete: bool,
}

/// Caches the breadth-first ball of image tuples; safe to share between threads.
pub struct OrbitEngine<'a, S: Structure + ?Sized> {
    s: &'a S,
    ap: &'a AutPresentation<S::Elem>,
    ball: Mutex<Ball<S::Elem>>,
    node_cap: usize,
}

impl<'a, S: Structure + ?Sized> OrbitEngine<'a, S> {
    pub fn new(s: &'a S, ap: &'a AutPresentation<S::Elem>) -> Self {
        Self::with_cap(s, ap, DEFAULT_NODE_CAP)
    }

    pub fn with_cap(s: &'a S, ap: &'a AutPresentation<S::Elem>, node_cap: usize) -> Self {
        let root = s.generators().to_vec();
        let mut index = HashMap::new();
        index.insert(root.clone(), 0);
        OrbitEngine {
            s,
            ap,
            ball: Mutex::new(Ball {
                tuples: vec![root],
                parent: vec![None],
                depth: vec![0],
                index,
                radius: 0,
                layer_start: 0,
                complete: false,
            }),
            node_cap,
        }
    }

    pub fn structure(&self) -> &'a S {
        self.s
    }

    pub fn presentation(&self) -> &'a AutPresentation<S::Elem> {
        self.ap
    }

    fn grow_one(&self, ball: &mut Ball<S::Elem>) -> Result<()> {
        let letters = self.ap.letters();
        let frontier = &ball.tuples[ball.layer_start..];
        let expanded: Vec<Vec<(Letter, Vec<S::Elem>)>> = frontier
            .par_iter()
            .map(|t| {
                letters
                    .iter()
                    .map(|l| Ok((*l, act(self.s, self.ap.gens[l.gen].terms(l.inverse), t)?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let start = ball.layer_start;
        let end = ball.tuples.len();
        let depth = ball.radius + 1;
        for (offset, children) in expanded.into_iter().enumerate() {
            for (letter, tuple) in children {
                if ball.index.contains_key(&tuple) {
                    continue;
                }
                if ball.tuples.len() >= self.node_cap {
                    return Err(Error::budget("orbit ball nodes", self.node_cap));
                }
                let id = ball.tuples.len();
                ball.index.insert(tuple.clone(), id);
                ball.tuples.push(tuple);
                ball.parent.push(Some((start + offset, letter)));
                ball.depth.push(depth);
            }
        }
        ball.complete = ball.tuples.len() == end;
        ball.layer_start = end;
        ball.radius = depth;
        trace!("orbit ball radius {} holds {} tuples", depth, ball.tuples.len());
        Ok(())
    }

    fn word_of(ball: &Ball<S::Elem>, mut id: usize) -> AutomorphismWord {
        let mut letters = Vec::new();
        while let Some((p, l)) = ball.parent[id] {
            letters.push(l);
            id = p;
        }
        letters.reverse();
        AutomorphismWord { letters }
    }

    /// A shortest word sending `ā` to `target`, searching words of length `<= max_len`.
    pub fn shortest_word(&self, target: &[S::Elem], max_len: usize) -> Result<Option<AutomorphismWord>> {
        let mut ball = self.ball.lock().expect("orbit ball lock");
        loop {
            if let Some(&id) = ball.index.get(target) {
                if ball.depth[id] <= max_len {
                    return Ok(Some(Self::word_of(&ball, id)));
                }
                return Ok(None);
            }
            if ball.radius >= max_len || ball.complete {
                return Ok(None);
            }
            self.grow_one(&mut ball)?;
        }
    }

    /// Every distinct image tuple reachable by words of length `<= max_len`,
    /// with a shortest witness, in breadth-first order.
    pub fn ball_to(&self, max_len: usize) -> Result<Vec<(Vec<S::Elem>, AutomorphismWord)>> {
        let mut ball = self.ball.lock().expect("orbit ball lock");
        while ball.radius < max_len && !ball.complete {
            self.grow_one(&mut ball)?;
        }
        Ok((0..ball.tuples.len())
            .filter(|&id| ball.depth[id] <= max_len)
            .map(|id| (ball.tuples[id].clone(), Self::word_of(&ball, id)))
            .collect())
    }

    /// The bounded orbit decision with `k = F(lengths of b̄)`.
    pub fn decide(&self, tuple: &[S::Elem]) -> Result<OrbitVerdict> {
        if tuple.len() != self.s.arity() || !satisfies_psi(self.s, tuple)? {
            return Err(Error::Precondition(format!(
                "tuple ({}) does not satisfy the presentation formula",
                format_tuple(self.s, tuple)
            )));
        }
        let lengths: Vec<usize> = tuple.iter().map(|e| self.s.element_length(e)).collect();
        let bound = self.ap.bound.eval(&lengths);
        let verdict = match self.shortest_word(tuple, bound)? {
            Some(witness) => OrbitVerdict::InOrbit { witness, bound },
            None => OrbitVerdict::NotInOrbit { bound },
        };
        debug!("orbit decision for ({}): {:?}", format_tuple(self.s, tuple), verdict);
        Ok(verdict)
    }
}

pub fn enumerate_automorphisms<S: Structure + ?Sized>(
    s: &S,
    ap: &AutPresentation<S::Elem>,
    max_len: usize,
) -> Result<Vec<(Vec<S::Elem>, AutomorphismWord)>> {
    OrbitEngine::new(s, ap).ball_to(max_len)
}

pub fn orbit_decide<S: Structure + ?Sized>(
    s: &S,
    ap: &AutPresentation<S::Elem>,
    tuple: &[S::Elem],
) -> Result<OrbitVerdict> {
    OrbitEngine::new(s, ap).decide(tuple)
}

/// One member of the non-generating tuple stream, with its fixed terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XStarItem<E> {
    pub tuple: Vec<E>,
    pub terms: Vec<Term>,
}

/// Cap on term size when attaching fixed terms to stream members.
pub const DEFAULT_TERM_SIZE_CAP: usize = 64;

/// Deterministic stream of ψ-satisfying tuples outside the orbit: grouped
/// by the largest element length `m = 0, 1, …, length_budget`, and within a
/// group lexicographic over the ordered elements of length `<= m`.
pub struct XStarStream<'e, 'a, S: Structure + ?Sized> {
    engine: &'e OrbitEngine<'a, S>,
    search: TermSearch<'a, S>,
    length_budget: usize,
    level: usize,
    elems: Vec<S::Elem>,
    lengths: Vec<usize>,
    idx: Option<Vec<usize>>,
    emitted: u64,
    exhausted: bool,
}

impl<'e, 'a, S: Structure + ?Sized> XStarStream<'e, 'a, S> {
    pub fn new(engine: &'e OrbitEngine<'a, S>, length_budget: usize) -> Self {
        XStarStream {
            engine,
            search: TermSearch::new(engine.structure()),
            length_budget,
            level: 0,
            elems: Vec::new(),
            lengths: Vec::new(),
            idx: None,
            emitted: 0,
            exhausted: false,
        }
    }

    /// Number of members produced so far.
    pub fn cursor(&self) -> u64 {
        self.emitted
    }

    fn load_level(&mut self) -> Result<()> {
        let s = self.engine.structure();
        self.elems = enumerate_elements(s, self.level)?;
        self.lengths = self.elems.iter().map(|e| s.element_length(e)).collect();
        self.idx = Some(vec![0; s.arity()]);
        Ok(())
    }

    /// Advances past tuples of the current group; `None` when the group is done.
    fn next_candidate(&mut self) -> Result<Option<Vec<S::Elem>>> {
        loop {
            if self.exhausted {
                return Ok(None);
            }
            if self.idx.is_none() {
                if self.level > self.length_budget {
                    self.exhausted = true;
                    return Ok(None);
                }
                self.load_level()?;
                if self.elems.is_empty() {
                    self.idx = None;
                    self.level += 1;
                    continue;
                }
                let idx = self.idx.as_ref().expect("level loaded");
                if let Some(t) = self.take(idx) {
                    return Ok(Some(t));
                }
            }
            let bounds = vec![self.elems.len(); self.engine.structure().arity()];
            let idx = self.idx.as_mut().expect("level loaded");
            if !crate::structure::advance(idx, &bounds) {
                self.idx = None;
                self.level += 1;
                continue;
            }
            let idx = self.idx.as_ref().expect("level loaded");
            if let Some(t) = self.take(idx) {
                return Ok(Some(t));
            }
        }
    }

    fn take(&self, idx: &[usize]) -> Option<Vec<S::Elem>> {
        let top = idx.iter().map(|&i| self.lengths[i]).max().unwrap_or(0);
        if top != self.level {
            return None;
        }
        Some(idx.iter().map(|&i| self.elems[i].clone()).collect())
    }

    pub fn next_item(&mut self) -> Result<Option<XStarItem<S::Elem>>> {
        let s = self.engine.structure();
        while let Some(tuple) = self.next_candidate()? {
            if !satisfies_psi(s, &tuple)? {
                continue;
            }
            if self.engine.decide(&tuple)?.in_orbit() {
                continue;
            }
            let terms = tuple
                .iter()
                .map(|b| self.search.find(b, DEFAULT_TERM_SIZE_CAP))
                .collect::<Result<Vec<_>>>()?;
            self.emitted += 1;
            return Ok(Some(XStarItem { tuple, terms }));
        }
        Ok(None)
    }

    /// Re-runs the stream up to `cursor` members.
    pub fn skip_to(&mut self, cursor: u64) -> Result<()> {
        while self.emitted < cursor {
            if self.next_item()?.is_none() {
                break;
            }
        }
        Ok(())
    }

    /// Up to `max` further members.
    pub fn take_items(&mut self, max: usize) -> Result<Vec<XStarItem<S::Elem>>> {
        let mut out = Vec::new();
        while out.len() < max {
            match self.next_item()? {
                Some(item) => out.push(item),
                None => break,
            }
        }
        Ok(out)
    }
}

/// The first members of the stream over tuples with elements of length `<= length_budget`.
pub fn enumerate_xstar<S: Structure + ?Sized>(
    s: &S,
    ap: &AutPresentation<S::Elem>,
    length_budget: usize,
    max_items: usize,
) -> Result<Vec<XStarItem<S::Elem>>> {
    let engine = OrbitEngine::new(s, ap);
    let mut stream = XStarStream::new(&engine, length_budget);
    stream.take_items(max_items)
}

/// Conjugations by each generator, plus the supplied coset representatives,
/// with `F(m̄) = 1 + Σ mᵢ`. Conjugations acting trivially on `ā` are left out.
pub fn make_inner_plus_finite<G: Group>(
    g: &G,
    reps: Vec<AutomorphismSpec<G::Elem>>,
) -> Result<AutPresentation<G::Elem>> {
    let n = Structure::arity(g);
    let conj = |j: usize, i: usize, inverse: bool| {
        let (l, r) = if inverse {
            (Term::app(INV, vec![Term::Var(j)]), Term::Var(j))
        } else {
            (Term::Var(j), Term::app(INV, vec![Term::Var(j)]))
        };
        Term::app(MUL, vec![l, Term::app(MUL, vec![Term::Var(i), r])])
    };
    let mut gens = Vec::new();
    for j in 1..=n {
        let img = (1..=n).map(|i| if i == j { Term::Var(i) } else { conj(j, i, false) }).collect();
        let inv = (1..=n).map(|i| if i == j { Term::Var(i) } else { conj(j, i, true) }).collect();
        let name = format!("conj_{}", g.format_word(&g.group_generators()[j - 1]));
        let spec = AutomorphismSpec::from_terms(g, &name, img, inv)?;
        if !spec.is_identity_on(g.group_generators()) {
            gens.push(spec);
        }
    }
    let gen_tuple = g.group_generators().to_vec();
    for r in reps {
        if r.images.len() != n || !satisfies_psi(g, &r.images)? {
            return Err(Error::InvalidAutomorphism {
                name: r.name.clone(),
                reason: "images violate the presentation".into(),
            });
        }
        for (i, t) in r.image_terms.iter().enumerate() {
            if eval_term(g, t, &gen_tuple)? != r.images[i] {
                return Err(Error::InvalidAutomorphism {
                    name: r.name.clone(),
                    reason: "image terms disagree with images".into(),
                });
            }
        }
        gens.push(r);
    }
    AutPresentation::new(gens, AffineBound::uniform(1, 1, n)?)
}

/// True iff every relator holds of `tuple`; a convenience for callers that
/// build candidate images by hand.
pub fn relators_hold<S: Structure + ?Sized>(s: &S, tuple: &[S::Elem]) -> Result<bool> {
    for r in &s.presentation().relators {
        if !holds_atomic(s, r, tuple)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_bound_evaluates() {
        let f = AffineBound::uniform(1, 1, 2).unwrap();
        assert_eq!(f.eval(&[1, 3]), 5);
        assert_eq!(AffineBound::new(8, vec![2; 4]).unwrap().eval(&[0, 2, 0, 2]), 16);
        assert!(AffineBound::new(0, vec![0, 0]).is_err());
        assert_eq!(f.to_string(), "1 + 1*m1 + 1*m2");
    }
}
