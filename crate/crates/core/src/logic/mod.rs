//! Finite signatures, terms, atomic formulas, presentations and the
//! infinitary formula AST.

mod formula;
mod parse;

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

pub(crate) use formula::Node as FormulaNode;
pub use formula::{parse_formula, serialize_formula, CeStream, Classification, Formula};
pub use parse::{parse_term, parse_term_unchecked};

/// A finite first-order signature. Equality is logical and never listed here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub constants: Vec<String>,
    pub functions: Vec<(String, usize)>,
    pub relations: Vec<(String, usize)>,
}

impl Signature {
    pub fn new(
        constants: Vec<String>,
        functions: Vec<(String, usize)>,
        relations: Vec<(String, usize)>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        let names = constants
            .iter()
            .chain(functions.iter().map(|(n, _)| n))
            .chain(relations.iter().map(|(n, _)| n));
        for name in names {
            if !is_identifier(name) || is_variable_name(name) {
                return Err(Error::Signature(format!("bad symbol name `{name}`")));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::Signature(format!("duplicate symbol `{name}`")));
            }
        }
        for (name, arity) in functions.iter().chain(relations.iter()) {
            if *arity == 0 {
                return Err(Error::Signature(format!("`{name}` has arity 0")));
            }
        }
        Ok(Signature {
            constants,
            functions,
            relations,
        })
    }

    pub fn has_constant(&self, name: &str) -> bool {
        self.constants.iter().any(|c| c == name)
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, a)| *a)
    }

    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        self.relations
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, a)| *a)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn is_variable_name(s: &str) -> bool {
    s.len() > 1 && s.starts_with('x') && s[1..].chars().all(|c| c.is_ascii_digit())
}

/// A finitary term. Variables are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Self {
        Term::Var(i)
    }

    pub fn app(f: &str, args: Vec<Term>) -> Self {
        Term::App(f.to_string(), args)
    }

    /// Node count; this is the term length used throughout.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn max_var(&self) -> usize {
        match self {
            Term::Var(i) => *i,
            Term::Const(_) => 0,
            Term::App(_, args) => args.iter().map(Term::max_var).max().unwrap_or(0),
        }
    }

    /// Renames every variable `xi` to `x(i + offset)`.
    pub fn shift_vars(&self, offset: usize) -> Term {
        match self {
            Term::Var(i) => Term::Var(i + offset),
            Term::Const(c) => Term::Const(c.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.shift_vars(offset)).collect()),
        }
    }

    /// Substitutes `xi` by `subst[i - 1]`.
    pub fn substitute(&self, subst: &[Term]) -> Term {
        match self {
            Term::Var(i) => subst[*i - 1].clone(),
            Term::Const(c) => Term::Const(c.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.substitute(subst)).collect()),
        }
    }

    pub fn check(&self, sig: &Signature, arity: usize) -> Result<()> {
        match self {
            Term::Var(i) => {
                if *i == 0 || *i > arity {
                    return Err(Error::VariableRange {
                        index: *i,
                        arity,
                    });
                }
            }
            Term::Const(c) => {
                if !sig.has_constant(c) {
                    return Err(Error::UnknownSymbol(c.clone()));
                }
            }
            Term::App(f, args) => {
                let expected = sig
                    .function_arity(f)
                    .ok_or_else(|| Error::UnknownSymbol(f.clone()))?;
                if expected != args.len() {
                    return Err(Error::Arity {
                        name: f.clone(),
                        expected,
                        found: args.len(),
                    });
                }
                for a in args {
                    a.check(sig, arity)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::Const(c) => write!(f, "{c}"),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Positive atomic formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AtomicFormula {
    Eq(Term, Term),
    Rel(String, Vec<Term>),
}

impl AtomicFormula {
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            AtomicFormula::Eq(a, b) => vec![a, b],
            AtomicFormula::Rel(_, ts) => ts.iter().collect(),
        }
    }

    pub fn shift_vars(&self, offset: usize) -> AtomicFormula {
        match self {
            AtomicFormula::Eq(a, b) => AtomicFormula::Eq(a.shift_vars(offset), b.shift_vars(offset)),
            AtomicFormula::Rel(r, ts) => {
                AtomicFormula::Rel(r.clone(), ts.iter().map(|t| t.shift_vars(offset)).collect())
            }
        }
    }

    pub fn max_var(&self) -> usize {
        self.terms().iter().map(|t| t.max_var()).max().unwrap_or(0)
    }

    pub fn check(&self, sig: &Signature, arity: usize) -> Result<()> {
        if let AtomicFormula::Rel(r, ts) = self {
            let expected = sig
                .relation_arity(r)
                .ok_or_else(|| Error::UnknownSymbol(r.clone()))?;
            if expected != ts.len() {
                return Err(Error::Arity {
                    name: r.clone(),
                    expected,
                    found: ts.len(),
                });
            }
        }
        for t in self.terms() {
            t.check(sig, arity)?;
        }
        Ok(())
    }
}

impl fmt::Display for AtomicFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomicFormula::Eq(a, b) => write!(f, "{a} = {b}"),
            AtomicFormula::Rel(r, ts) => {
                write!(f, "{r}(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A finite presentation `⟨x1..xn | relators⟩`, treated purely syntactically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub signature: Signature,
    pub generators: usize,
    pub relators: Vec<AtomicFormula>,
}

impl Presentation {
    pub fn new(signature: Signature, generators: usize, relators: Vec<AtomicFormula>) -> Result<Self> {
        if generators == 0 {
            return Err(Error::Precondition("presentation needs at least one generator".into()));
        }
        for r in &relators {
            r.check(&signature, generators)?;
        }
        Ok(Presentation {
            signature,
            generators,
            relators,
        })
    }
}

/// The presentation formula: all relators, plus pairwise distinctness of the
/// generator variables.
pub fn build_psi(p: &Presentation) -> Formula {
    psi_shifted(p, 0)
}

/// `build_psi` with every variable renamed `xi -> x(i + offset)`.
pub fn psi_shifted(p: &Presentation, offset: usize) -> Formula {
    let mut parts: Vec<Formula> = p
        .relators
        .iter()
        .map(|r| Formula::Atomic(r.shift_vars(offset)))
        .collect();
    for i in 1..=p.generators {
        for j in (i + 1)..=p.generators {
            parts.push(Formula::Not(Box::new(Formula::Atomic(AtomicFormula::Eq(
                Term::Var(i + offset),
                Term::Var(j + offset),
            )))));
        }
    }
    Formula::And(parts)
}
