//! The orbit formula Θ as a resumable conjunct stream, the two-part Scott
//! sentence over it, and model checking of materialized prefixes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::{build_psi, psi_shifted, AtomicFormula, CeStream, Formula, FormulaNode, Signature, Term};
use crate::orbit::{AutPresentation, OrbitEngine, OrbitVerdict, XStarStream};
use crate::structure::{
    advance, compositions, enumerate_elements, eval_term_env, finite_universe, format_tuple, Structure,
    DEFAULT_ELEMENT_CAP,
};

/// Producer name of the Θ conjunct stream.
pub const THETA_PRODUCER: &str = "xstar";
/// Producer name of the term-tuple disjunction.
pub const TERM_TUPLE_PRODUCER: &str = "term_tuples";
/// Largest element length the X_* stream will scan before giving up.
pub const DEFAULT_THETA_LENGTH_BUDGET: usize = 32;
/// Term tuples materialized in an assembled sentence unless asked otherwise.
pub const DEFAULT_TERM_TUPLES: usize = 32;

pub const ASSEMBLY: &str = "d-sigma2-adopted";
pub const ASSEMBLY_NOTE: &str = "adopted, unverified";

/// One materialized Θ conjunct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaConjunct {
    /// The X_* tuple, formatted by its structure.
    pub tuple: String,
    pub terms: Vec<Term>,
    pub formula: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaPrefix {
    pub arity: usize,
    pub psi: Formula,
    pub conjuncts: Vec<ThetaConjunct>,
    pub cursor: u64,
}

impl ThetaPrefix {
    /// `ψ(x̄) ∧ ⋀[xstar] (...)`.
    pub fn formula(&self) -> Formula {
        Formula::And(vec![
            self.psi.clone(),
            Formula::CeAnd(CeStream {
                producer: THETA_PRODUCER.into(),
                cursor: self.cursor,
                materialized: self.conjuncts.iter().map(|c| c.formula.clone()).collect(),
            }),
        ])
    }
}

/// `∀ȳ ¬(ψ(ȳ) ∧ ⋀ xᵢ = tᵢ(ȳ))` with `ȳ = x(n+1)..x(2n)`.
pub fn theta_conjunct<S: Structure + ?Sized>(s: &S, terms: &[Term]) -> Formula {
    let n = s.arity();
    let mut body = match psi_shifted(s.presentation(), n) {
        Formula::And(parts) => parts,
        other => vec![other],
    };
    for (i, t) in terms.iter().enumerate() {
        body.push(Formula::Atomic(AtomicFormula::Eq(Term::Var(i + 1), t.shift_vars(n))));
    }
    Formula::Forall((n + 1..=2 * n).collect(), Box::new(Formula::negate(Formula::And(body))))
}

/// Θ with the first `max_conjuncts` members of the X_* stream.
pub fn build_theta<S: Structure + ?Sized>(
    s: &S,
    ap: &AutPresentation<S::Elem>,
    max_conjuncts: usize,
) -> Result<ThetaPrefix> {
    build_theta_from(s, ap, 0, max_conjuncts)
}

/// The conjuncts with stream indices `start..start + count`; the stream is
/// replayed deterministically up to `start`.
pub fn build_theta_from<S: Structure + ?Sized>(
    s: &S,
    ap: &AutPresentation<S::Elem>,
    start: u64,
    count: usize,
) -> Result<ThetaPrefix> {
    let engine = OrbitEngine::new(s, ap);
    let mut stream = XStarStream::new(&engine, DEFAULT_THETA_LENGTH_BUDGET);
    stream.skip_to(start)?;
    let items = stream.take_items(count)?;
    let conjuncts = items
        .into_iter()
        .map(|item| ThetaConjunct {
            tuple: format_tuple(s, &item.tuple),
            formula: theta_conjunct(s, &item.terms),
            terms: item.terms,
        })
        .collect();
    Ok(ThetaPrefix {
        arity: s.arity(),
        psi: build_psi(s.presentation()),
        conjuncts,
        cursor: stream.cursor(),
    })
}

/// Extends a prefix by up to `more` conjuncts.
pub fn resume_theta<S: Structure + ?Sized>(
    s: &S,
    ap: &AutPresentation<S::Elem>,
    prefix: &ThetaPrefix,
    more: usize,
) -> Result<ThetaPrefix> {
    let tail = build_theta_from(s, ap, prefix.cursor, more)?;
    let mut out = prefix.clone();
    out.conjuncts.extend(tail.conjuncts);
    out.cursor = tail.cursor;
    Ok(out)
}

/// Syntactic terms over `x1..xn` by size, in signature order.
pub struct TermEnumerator {
    sig: Signature,
    arity: usize,
    levels: Vec<Vec<Term>>,
}

impl TermEnumerator {
    pub fn new(sig: &Signature, arity: usize) -> Self {
        TermEnumerator {
            sig: sig.clone(),
            arity,
            levels: vec![Vec::new()],
        }
    }

    /// All terms with exactly `size` nodes.
    pub fn level(&mut self, size: usize) -> &[Term] {
        while self.levels.len() <= size {
            let k = self.levels.len();
            let mut out = Vec::new();
            if k == 1 {
                out.extend((1..=self.arity).map(Term::Var));
                out.extend(self.sig.constants.iter().map(|c| Term::Const(c.clone())));
            } else {
                for (f, r) in &self.sig.functions {
                    for parts in compositions(k - 1, *r) {
                        if parts.iter().any(|&p| self.levels[p].is_empty()) {
                            continue;
                        }
                        let bounds: Vec<usize> = parts.iter().map(|&p| self.levels[p].len()).collect();
                        let mut idx = vec![0; *r];
                        loop {
                            let args = (0..*r).map(|j| self.levels[parts[j]][idx[j]].clone()).collect();
                            out.push(Term::App(f.clone(), args));
                            if !advance(&mut idx, &bounds) {
                                break;
                            }
                        }
                    }
                }
            }
            self.levels.push(out);
        }
        &self.levels[size]
    }

    /// The first `count` tuples of `width` terms, by total size and then
    /// lexicographically.
    pub fn tuples(&mut self, width: usize, count: usize) -> Vec<Vec<Term>> {
        let mut out = Vec::new();
        if width == 0 || count == 0 {
            return out;
        }
        let mut total = width;
        let mut barren = 0;
        while out.len() < count {
            let mut produced = false;
            for parts in compositions(total, width) {
                let lists: Vec<Vec<Term>> = parts.iter().map(|&p| self.level(p).to_vec()).collect();
                if lists.iter().any(Vec::is_empty) {
                    continue;
                }
                let bounds: Vec<usize> = lists.iter().map(Vec::len).collect();
                let mut idx = vec![0; width];
                loop {
                    out.push((0..width).map(|j| lists[j][idx[j]].clone()).collect());
                    produced = true;
                    if out.len() == count || !advance(&mut idx, &bounds) {
                        break;
                    }
                }
                if out.len() == count {
                    break;
                }
            }
            barren = if produced { 0 } else { barren + 1 };
            if barren > width + 2 {
                break;
            }
            total += 1;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScottSentence {
    pub theta: ThetaPrefix,
    /// `∃x̄ Θ(x̄)`.
    pub sigma2: Formula,
    /// `∀ȳ∀x̄ (¬Θ(x̄) ∨ ⋁_t ⋀ yᵢ = tᵢ(x̄))` with `ȳ = x(2n+1)..x(3n)`.
    pub pi2: Formula,
}

impl ScottSentence {
    pub fn formula(&self) -> Formula {
        Formula::And(vec![self.sigma2.clone(), self.pi2.clone()])
    }
}

/// Assembles σ from `conjuncts` Θ conjuncts and `term_tuples` disjuncts.
pub fn assemble_scott<S: Structure + ?Sized>(
    s: &S,
    ap: &AutPresentation<S::Elem>,
    conjuncts: usize,
    term_tuples: usize,
) -> Result<ScottSentence> {
    let theta = build_theta(s, ap, conjuncts)?;
    Ok(assemble_from_theta(s, theta, term_tuples))
}

pub fn assemble_from_theta<S: Structure + ?Sized>(s: &S, theta: ThetaPrefix, term_tuples: usize) -> ScottSentence {
    let n = s.arity();
    let xs: Vec<usize> = (1..=n).collect();
    let theta_f = theta.formula();
    let sigma2 = Formula::Exists(xs.clone(), Box::new(theta_f.clone()));
    let disjuncts: Vec<Formula> = TermEnumerator::new(s.signature(), n)
        .tuples(n, term_tuples)
        .into_iter()
        .map(|ts| {
            Formula::And(
                ts.into_iter()
                    .enumerate()
                    .map(|(i, t)| Formula::Atomic(AtomicFormula::Eq(Term::Var(2 * n + 1 + i), t)))
                    .collect(),
            )
        })
        .collect();
    let mut bound: Vec<usize> = (2 * n + 1..=3 * n).collect();
    bound.extend(xs);
    let pi2 = Formula::Forall(
        bound,
        Box::new(Formula::Or(vec![
            Formula::negate(theta_f),
            Formula::CeOr(CeStream::new(TERM_TUPLE_PRODUCER, disjuncts)),
        ])),
    );
    ScottSentence { theta, sigma2, pi2 }
}

/// Outcome of checking a formula prefix at an assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<E> {
    /// No refutation with quantifiers bounded to element length `depth`.
    HoldsSoFar(usize),
    /// Part `conjunct` of the flattened conjunction is false; for a universal
    /// part, `witness` is a falsifying assignment of its bound variables.
    Refuted { conjunct: usize, witness: Vec<E> },
    ExactTrue,
    ExactFalse,
}

impl<E> Verdict<E> {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }

    pub fn render<S: Structure<Elem = E> + ?Sized>(&self, s: &S) -> String {
        match self {
            Verdict::HoldsSoFar(d) => format!("HOLDS-SO-FAR depth={d}"),
            Verdict::Refuted { conjunct, witness } => {
                format!("REFUTED conjunct={conjunct} witness=({})", format_tuple(s, witness))
            }
            Verdict::ExactTrue => "EXACT-TRUE".into(),
            Verdict::ExactFalse => "EXACT-FALSE".into(),
        }
    }
}

/// Top-level conjunction parts, with materialized `CeAnd` members spliced
/// in order, so for Θ part 0 is ψ and part `k` is conjunct `k`.
pub fn flatten_conjunction(f: &Formula) -> Vec<&Formula> {
    fn splice<'f>(g: &'f Formula, out: &mut Vec<&'f Formula>) {
        match g {
            Formula::CeAnd(s) => out.extend(s.materialized.iter()),
            other => out.push(other),
        }
    }
    let mut out = Vec::new();
    match f {
        Formula::And(fs) if !fs.is_empty() => fs.iter().for_each(|g| splice(g, &mut out)),
        other => splice(other, &mut out),
    }
    out
}

fn formula_max_var(f: &Formula) -> usize {
    match f {
        Formula::Atomic(a) => a.max_var(),
        Formula::Not(g) => formula_max_var(g),
        Formula::And(fs) | Formula::Or(fs) => fs.iter().map(formula_max_var).max().unwrap_or(0),
        Formula::CeAnd(s) | Formula::CeOr(s) => s.materialized.iter().map(formula_max_var).max().unwrap_or(0),
        Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
            vs.iter().copied().max().unwrap_or(0).max(formula_max_var(g))
        }
    }
}

fn check_symbols(f: &Formula, sig: &Signature, arity: usize) -> Result<()> {
    match f {
        Formula::Atomic(a) => a.check(sig, arity),
        Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => check_symbols(g, sig, arity),
        Formula::And(fs) | Formula::Or(fs) => fs.iter().try_for_each(|g| check_symbols(g, sig, arity)),
        Formula::CeAnd(s) | Formula::CeOr(s) => s.materialized.iter().try_for_each(|g| check_symbols(g, sig, arity)),
    }
}

/// Three-valued evaluation with quantifiers over a fixed domain. `None`
/// means the bounded search cannot settle the value.
struct Evaluator<'s, S: Structure + ?Sized> {
    s: &'s S,
    domain: Vec<S::Elem>,
    exact: bool,
}

impl<S: Structure + ?Sized> Evaluator<'_, S> {
    fn env_for(&self, f: &Formula, x: &[S::Elem]) -> Result<Vec<Option<S::Elem>>> {
        if x.len() != self.s.arity() {
            return Err(Error::Precondition(format!(
                "assignment has {} entries, structure has {} generators",
                x.len(),
                self.s.arity()
            )));
        }
        let size = formula_max_var(f).max(x.len());
        check_symbols(f, self.s.signature(), size.max(1))?;
        let mut env = vec![None; size + 1];
        for (i, e) in x.iter().enumerate() {
            env[i + 1] = Some(e.clone());
        }
        Ok(env)
    }

    fn each_assignment(
        &self,
        vs: &[usize],
        env: &mut Vec<Option<S::Elem>>,
        mut visit: impl FnMut(&mut Vec<Option<S::Elem>>) -> Result<bool>,
    ) -> Result<()> {
        let saved: Vec<Option<S::Elem>> = vs.iter().map(|&v| env[v].clone()).collect();
        if !self.domain.is_empty() || vs.is_empty() {
            let bounds = vec![self.domain.len(); vs.len()];
            let mut idx = vec![0; vs.len()];
            loop {
                for (k, &v) in vs.iter().enumerate() {
                    env[v] = Some(self.domain[idx[k]].clone());
                }
                if !visit(env)? || !advance(&mut idx, &bounds) {
                    break;
                }
            }
        }
        for (k, &v) in vs.iter().enumerate() {
            env[v] = saved[k].clone();
        }
        Ok(())
    }

    fn eval(&self, f: &Formula, env: &mut Vec<Option<S::Elem>>) -> Result<Option<bool>> {
        Ok(match f {
            Formula::Atomic(AtomicFormula::Eq(a, b)) => {
                Some(eval_term_env(self.s, a, env)? == eval_term_env(self.s, b, env)?)
            }
            Formula::Atomic(AtomicFormula::Rel(r, ts)) => {
                let args = ts.iter().map(|t| eval_term_env(self.s, t, env)).collect::<Result<Vec<_>>>()?;
                Some(self.s.relation(r, &args)?)
            }
            Formula::Not(g) => self.eval(g, env)?.map(|b| !b),
            Formula::And(fs) => self.all(fs, env, true)?,
            Formula::CeAnd(st) => match self.all(&st.materialized, env, true)? {
                Some(true) if !self.exact => None,
                v => v,
            },
            Formula::Or(fs) => self.all(fs, env, false)?,
            Formula::CeOr(st) => match self.all(&st.materialized, env, false)? {
                Some(false) if !self.exact => None,
                v => v,
            },
            Formula::Forall(vs, g) => self.quantify(vs, g, env, true)?,
            Formula::Exists(vs, g) => self.quantify(vs, g, env, false)?,
        })
    }

    /// Conjunction when `conj`, disjunction otherwise.
    fn all(&self, fs: &[Formula], env: &mut Vec<Option<S::Elem>>, conj: bool) -> Result<Option<bool>> {
        let mut settled = true;
        for g in fs {
            match self.eval(g, env)? {
                Some(b) if b != conj => return Ok(Some(!conj)),
                Some(_) => {}
                None => settled = false,
            }
        }
        Ok(settled.then_some(conj))
    }

    fn quantify(
        &self,
        vs: &[usize],
        g: &Formula,
        env: &mut Vec<Option<S::Elem>>,
        universal: bool,
    ) -> Result<Option<bool>> {
        let mut decisive = false;
        let mut settled = true;
        self.each_assignment(vs, env, |env| {
            match self.eval(g, env)? {
                Some(b) if b != universal => {
                    decisive = true;
                    return Ok(false);
                }
                Some(_) => {}
                None => settled = false,
            }
            Ok(true)
        })?;
        Ok(if decisive {
            Some(!universal)
        } else if settled && self.exact {
            Some(universal)
        } else {
            None
        })
    }

    /// First refuted part, with a falsifying assignment for universal parts.
    fn refute(&self, f: &Formula, x: &[S::Elem]) -> Result<Option<(usize, Vec<S::Elem>)>> {
        let mut env = self.env_for(f, x)?;
        for (i, part) in flatten_conjunction(f).into_iter().enumerate() {
            if let Formula::Forall(vs, body) = part {
                let mut witness = None;
                self.each_assignment(vs, &mut env, |env| {
                    if self.eval(body, env)? == Some(false) {
                        witness = Some(vs.iter().map(|&v| env[v].clone().expect("bound")).collect());
                        return Ok(false);
                    }
                    Ok(true)
                })?;
                if let Some(w) = witness {
                    return Ok(Some((i, w)));
                }
            } else if self.eval(part, &mut env)? == Some(false) {
                return Ok(Some((i, Vec::new())));
            }
        }
        Ok(None)
    }
}

/// Checks `f` at `x̄ = x` with every quantifier ranging over the elements of
/// length `<= depth`. A refutation of a universal part is final; anything
/// else is reported as holding so far.
pub fn check_bounded<S: Structure + ?Sized>(f: &Formula, target: &S, x: &[S::Elem], depth: usize) -> Result<Verdict<S::Elem>> {
    let ev = Evaluator {
        s: target,
        domain: enumerate_elements(target, depth)?,
        exact: false,
    };
    Ok(match ev.refute(f, x)? {
        Some((conjunct, witness)) => Verdict::Refuted { conjunct, witness },
        None => Verdict::HoldsSoFar(depth),
    })
}

/// Exact check of the materialized prefix on a finite target.
pub fn check_finite<S: Structure + ?Sized>(f: &Formula, target: &S, x: &[S::Elem]) -> Result<Verdict<S::Elem>> {
    let ev = Evaluator {
        s: target,
        domain: finite_universe(target, DEFAULT_ELEMENT_CAP)?,
        exact: true,
    };
    if let Some((conjunct, witness)) = ev.refute(f, x)? {
        return Ok(Verdict::Refuted { conjunct, witness });
    }
    let mut env = ev.env_for(f, x)?;
    Ok(match ev.eval(f, &mut env)? {
        Some(false) => Verdict::ExactFalse,
        _ => Verdict::ExactTrue,
    })
}

/// Exact truth value of the materialized prefix on a finite target.
pub fn eval_on_finite<S: Structure + ?Sized>(f: &Formula, target: &S, x: &[S::Elem]) -> Result<bool> {
    let ev = Evaluator {
        s: target,
        domain: finite_universe(target, DEFAULT_ELEMENT_CAP)?,
        exact: true,
    };
    let mut env = ev.env_for(f, x)?;
    ev.eval(f, &mut env)?
        .ok_or_else(|| Error::Precondition("finite evaluation left a value open".into()))
}

/// Θ on its home structure defines the orbit of `ā`, so the orbit decision
/// settles it exactly.
pub fn decide_theta_exact<S: Structure + ?Sized>(
    s: &S,
    ap: &AutPresentation<S::Elem>,
    x: &[S::Elem],
) -> Result<Verdict<S::Elem>> {
    if !crate::structure::satisfies_psi(s, x)? {
        return Ok(Verdict::ExactFalse);
    }
    Ok(match OrbitEngine::new(s, ap).decide(x)? {
        OrbitVerdict::InOrbit { .. } => Verdict::ExactTrue,
        OrbitVerdict::NotInOrbit { .. } => Verdict::ExactFalse,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConjunctRecord {
    pub tuple: String,
    pub terms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentMetadata {
    pub kind: String,
    pub config_hash: String,
    pub cursor: u64,
    pub assembly: String,
    pub assembly_note: String,
    pub length_convention: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presentation_note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub term_cursor: Option<u64>,
    pub conjuncts: Vec<ConjunctRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    metadata: DocumentMetadata,
    formula: FormulaNode,
}

fn metadata_for(kind: &str, theta: &ThetaPrefix, config_hash: &str, length_convention: &str) -> DocumentMetadata {
    DocumentMetadata {
        kind: kind.into(),
        config_hash: config_hash.into(),
        cursor: theta.cursor,
        assembly: ASSEMBLY.into(),
        assembly_note: ASSEMBLY_NOTE.into(),
        length_convention: length_convention.into(),
        presentation_note: None,
        term_cursor: None,
        conjuncts: theta
            .conjuncts
            .iter()
            .map(|c| ConjunctRecord {
                tuple: c.tuple.clone(),
                terms: c.terms.iter().map(Term::to_string).collect(),
            })
            .collect(),
    }
}

pub fn theta_metadata<S: Structure + ?Sized>(s: &S, theta: &ThetaPrefix, config_hash: &str) -> DocumentMetadata {
    metadata_for("theta", theta, config_hash, s.length_convention())
}

pub fn scott_metadata<S: Structure + ?Sized>(s: &S, sentence: &ScottSentence, config_hash: &str) -> DocumentMetadata {
    let mut meta = metadata_for("scott", &sentence.theta, config_hash, s.length_convention());
    if let Formula::Forall(_, body) = &sentence.pi2 {
        if let Formula::Or(parts) = body.as_ref() {
            if let Some(Formula::CeOr(st)) = parts.get(1) {
                meta.term_cursor = Some(st.cursor);
            }
        }
    }
    meta
}

/// One-line JSON document, newline-terminated.
pub fn write_document(metadata: &DocumentMetadata, f: &Formula) -> String {
    let doc = Document {
        metadata: metadata.clone(),
        formula: FormulaNode::from_formula(f),
    };
    let mut out = serde_json::to_string(&doc).expect("documents serialize");
    out.push('\n');
    out
}

pub fn read_document(text: &str) -> Result<(DocumentMetadata, Formula)> {
    let doc: Document = serde_json::from_str(text.trim_end()).map_err(|e| Error::Document(e.to_string()))?;
    let f = doc.formula.to_formula()?;
    Ok((doc.metadata, f))
}
