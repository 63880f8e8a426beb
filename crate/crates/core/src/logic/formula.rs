use std::fmt;

use serde::{Deserialize, Serialize};

use super::parse::parse_term_unchecked;
use super::AtomicFormula;
use crate::error::{Error, Result};

/// Handle for a computably enumerable conjunction or disjunction: the producer
/// that generates members, how far it has been run, and the members so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CeStream {
    pub producer: String,
    pub cursor: u64,
    pub materialized: Vec<Formula>,
}

impl CeStream {
    pub fn new(producer: impl Into<String>, materialized: Vec<Formula>) -> Self {
        CeStream {
            producer: producer.into(),
            cursor: materialized.len() as u64,
            materialized,
        }
    }
}

/// Infinitary formula with finite materialized prefixes of its c.e. nodes.
///
/// Quantifiers bind the listed variable indices; the same index space as
/// `Term::Var` is used for free and bound variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Atomic(AtomicFormula),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Vec<usize>, Box<Formula>),
    Forall(Vec<usize>, Box<Formula>),
    CeAnd(CeStream),
    CeOr(CeStream),
}

/// Least levels at which a formula is Σ and Π by shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub sigma: u32,
    pub pi: u32,
}

impl Classification {
    const QF: Classification = Classification { sigma: 0, pi: 0 };

    pub fn is_sigma(&self, n: u32) -> bool {
        self.sigma <= n
    }

    pub fn is_pi(&self, n: u32) -> bool {
        self.pi <= n
    }

    pub fn tag(&self) -> String {
        match (self.sigma, self.pi) {
            (0, 0) => "Σ0/Π0".to_string(),
            (s, p) if s < p => format!("Σ{s}"),
            (s, p) if p < s => format!("Π{p}"),
            (s, _) => format!("Σ{s}/Π{s}"),
        }
    }
}

impl Formula {
    pub fn negate(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atomic(_) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Exists(..) | Formula::Forall(..) | Formula::CeAnd(_) | Formula::CeOr(_) => false,
        }
    }

    pub fn classify(&self) -> Classification {
        match self {
            Formula::Atomic(_) => Classification::QF,
            Formula::Not(f) => {
                let c = f.classify();
                Classification { sigma: c.pi, pi: c.sigma }
            }
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::classify).fold(
                Classification::QF,
                |acc, c| Classification {
                    sigma: acc.sigma.max(c.sigma),
                    pi: acc.pi.max(c.pi),
                },
            ),
            Formula::CeAnd(s) => {
                let pi = s.materialized.iter().map(|f| f.classify().pi).max().unwrap_or(0).max(1);
                Classification { sigma: pi + 1, pi }
            }
            Formula::CeOr(s) => {
                let sigma = s.materialized.iter().map(|f| f.classify().sigma).max().unwrap_or(0).max(1);
                Classification { sigma, pi: sigma + 1 }
            }
            Formula::Exists(_, body) => {
                let c = body.classify();
                let sigma = (c.pi + 1).min(c.sigma.max(1));
                Classification { sigma, pi: sigma + 1 }
            }
            Formula::Forall(_, body) => {
                let c = body.classify();
                let pi = (c.sigma + 1).min(c.pi.max(1));
                Classification { sigma: pi + 1, pi }
            }
        }
    }

    /// Conjunction of a Σn part and a Πn part.
    pub fn is_d_sigma(&self, n: u32) -> bool {
        match self {
            Formula::And(parts) if parts.len() == 2 => {
                let a = parts[0].classify();
                let b = parts[1].classify();
                (a.is_sigma(n) && b.is_pi(n)) || (a.is_pi(n) && b.is_sigma(n))
            }
            _ => false,
        }
    }

    /// Shape tag, preferring the d-Σ reading when the plain levels coincide.
    pub fn tag(&self) -> String {
        let c = self.classify();
        if c.sigma == c.pi && c.sigma > 0 {
            for n in 1..c.sigma {
                if self.is_d_sigma(n) {
                    return format!("d-Σ{n}");
                }
            }
        }
        c.tag()
    }

    pub fn shift_vars(&self, offset: usize) -> Formula {
        let shift_all = |fs: &[Formula]| fs.iter().map(|f| f.shift_vars(offset)).collect();
        let shift_vars = |vs: &[usize]| vs.iter().map(|v| v + offset).collect();
        match self {
            Formula::Atomic(a) => Formula::Atomic(a.shift_vars(offset)),
            Formula::Not(f) => Formula::Not(Box::new(f.shift_vars(offset))),
            Formula::And(fs) => Formula::And(shift_all(fs)),
            Formula::Or(fs) => Formula::Or(shift_all(fs)),
            Formula::Exists(vs, b) => Formula::Exists(shift_vars(vs), Box::new(b.shift_vars(offset))),
            Formula::Forall(vs, b) => Formula::Forall(shift_vars(vs), Box::new(b.shift_vars(offset))),
            Formula::CeAnd(s) => Formula::CeAnd(CeStream {
                producer: s.producer.clone(),
                cursor: s.cursor,
                materialized: shift_all(&s.materialized),
            }),
            Formula::CeOr(s) => Formula::CeOr(CeStream {
                producer: s.producer.clone(),
                cursor: s.cursor,
                materialized: shift_all(&s.materialized),
            }),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, fs: &[Formula], sep: &str, empty: &str) -> fmt::Result {
            if fs.is_empty() {
                return write!(f, "{empty}");
            }
            write!(f, "(")?;
            for (i, x) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {sep} ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")
        }
        fn vars(vs: &[usize]) -> String {
            vs.iter().map(|v| format!("x{v}")).collect::<Vec<_>>().join(",")
        }
        match self {
            Formula::Atomic(a) => write!(f, "{a}"),
            Formula::Not(x) => write!(f, "¬({x})"),
            Formula::And(fs) => join(f, fs, "∧", "⊤"),
            Formula::Or(fs) => join(f, fs, "∨", "⊥"),
            Formula::Exists(vs, b) => write!(f, "∃{} {b}", vars(vs)),
            Formula::Forall(vs, b) => write!(f, "∀{} {b}", vars(vs)),
            Formula::CeAnd(s) => {
                write!(f, "⋀[{}@{}]", s.producer, s.cursor)?;
                join(f, &s.materialized, "∧", "()")
            }
            Formula::CeOr(s) => {
                write!(f, "⋁[{}@{}]", s.producer, s.cursor)?;
                join(f, &s.materialized, "∨", "()")
            }
        }
    }
}

/// JSON node; field order here is the serialized order.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub(crate) struct Node {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vars: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub producer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cursor: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub children: Option<Vec<Node>>,
}

impl Node {
    fn bare(kind: &str) -> Node {
        Node {
            kind: kind.to_string(),
            name: None,
            terms: None,
            vars: None,
            producer: None,
            cursor: None,
            children: None,
        }
    }

    pub(crate) fn from_formula(f: &Formula) -> Node {
        let with_children = |kind: &str, fs: &[Formula]| Node {
            children: Some(fs.iter().map(Node::from_formula).collect()),
            ..Node::bare(kind)
        };
        match f {
            Formula::Atomic(AtomicFormula::Eq(a, b)) => Node {
                terms: Some(vec![a.to_string(), b.to_string()]),
                ..Node::bare("eq")
            },
            Formula::Atomic(AtomicFormula::Rel(r, ts)) => Node {
                name: Some(r.clone()),
                terms: Some(ts.iter().map(|t| t.to_string()).collect()),
                ..Node::bare("rel")
            },
            Formula::Not(x) => with_children("not", std::slice::from_ref(x)),
            Formula::And(fs) if fs.is_empty() => Node::bare("true"),
            Formula::Or(fs) if fs.is_empty() => Node::bare("false"),
            Formula::And(fs) => with_children("and", fs),
            Formula::Or(fs) => with_children("or", fs),
            Formula::Exists(vs, b) => Node {
                vars: Some(vs.clone()),
                ..with_children("exists", std::slice::from_ref(b))
            },
            Formula::Forall(vs, b) => Node {
                vars: Some(vs.clone()),
                ..with_children("forall", std::slice::from_ref(b))
            },
            Formula::CeAnd(s) | Formula::CeOr(s) => {
                let kind = if matches!(f, Formula::CeAnd(_)) { "ce_and" } else { "ce_or" };
                Node {
                    producer: Some(s.producer.clone()),
                    cursor: Some(s.cursor),
                    ..with_children(kind, &s.materialized)
                }
            }
        }
    }

    pub(crate) fn to_formula(&self) -> Result<Formula> {
        let bad = |msg: &str| Error::Document(format!("{} node: {msg}", self.kind));
        let children = || -> Result<Vec<Formula>> {
            self.children
                .as_ref()
                .ok_or_else(|| bad("missing children"))?
                .iter()
                .map(Node::to_formula)
                .collect()
        };
        let single = || -> Result<Box<Formula>> {
            let mut cs = children()?;
            if cs.len() != 1 {
                return Err(bad("expected exactly one child"));
            }
            Ok(Box::new(cs.remove(0)))
        };
        let terms = || -> Result<Vec<super::Term>> {
            self.terms
                .as_ref()
                .ok_or_else(|| bad("missing terms"))?
                .iter()
                .map(|t| parse_term_unchecked(t))
                .collect()
        };
        Ok(match self.kind.as_str() {
            "eq" => {
                let mut ts = terms()?;
                if ts.len() != 2 {
                    return Err(bad("equality needs two terms"));
                }
                let b = ts.pop().unwrap();
                let a = ts.pop().unwrap();
                Formula::Atomic(AtomicFormula::Eq(a, b))
            }
            "rel" => Formula::Atomic(AtomicFormula::Rel(
                self.name.clone().ok_or_else(|| bad("missing name"))?,
                terms()?,
            )),
            "true" => Formula::And(vec![]),
            "false" => Formula::Or(vec![]),
            "not" => Formula::Not(single()?),
            "and" => Formula::And(children()?),
            "or" => Formula::Or(children()?),
            "exists" | "forall" => {
                let vs = self.vars.clone().ok_or_else(|| bad("missing vars"))?;
                if self.kind == "exists" {
                    Formula::Exists(vs, single()?)
                } else {
                    Formula::Forall(vs, single()?)
                }
            }
            "ce_and" | "ce_or" => {
                let materialized = children()?;
                let cursor = self.cursor.ok_or_else(|| bad("missing cursor"))?;
                if cursor < materialized.len() as u64 {
                    return Err(bad("cursor behind materialized prefix"));
                }
                let s = CeStream {
                    producer: self.producer.clone().ok_or_else(|| bad("missing producer"))?,
                    cursor,
                    materialized,
                };
                if self.kind == "ce_and" {
                    Formula::CeAnd(s)
                } else {
                    Formula::CeOr(s)
                }
            }
            other => return Err(Error::Document(format!("unknown kind `{other}`"))),
        })
    }
}

/// Compact single-line JSON, newline-terminated.
pub fn serialize_formula(f: &Formula) -> String {
    let mut s = serde_json::to_string(&Node::from_formula(f)).expect("formula nodes serialize");
    s.push('\n');
    s
}

pub fn parse_formula(s: &str) -> Result<Formula> {
    let node: Node = serde_json::from_str(s.trim_end()).map_err(|e| Error::Document(e.to_string()))?;
    node.to_formula()
}
