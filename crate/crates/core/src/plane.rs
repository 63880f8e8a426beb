//! The free projective plane π⁴ over the quadrangle `A1, A2, B1, B2`.
//!
//! Elements live in an append-only interning table. A line `p v q` is created
//! only for two points with no common line, a point `l ^ m` only for two
//! lines with no common point, so incidence can be read off the creation
//! records: a point lies on a line iff one created the other.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use log::debug;

use crate::error::{Error, Result};
use crate::logic::{AtomicFormula, Presentation, Signature, Term};
use crate::orbit::{AffineBound, AutPresentation, AutomorphismSpec};
use crate::structure::{ElementId, Structure};

pub const BOT: &str = "bot";
pub const TOP: &str = "top";
pub const JOIN: &str = "join";
pub const MEET: &str = "meet";
pub const POINT: &str = "S1";
pub const LINE: &str = "S2";
pub const INCIDENT: &str = "I";

pub const BASE_NAMES: [&str; 4] = ["A1", "A2", "B1", "B2"];

pub fn plane_signature() -> &'static Signature {
    static SIG: OnceLock<Signature> = OnceLock::new();
    SIG.get_or_init(|| {
        Signature::new(
            vec![BOT.into(), TOP.into()],
            vec![(JOIN.into(), 2), (MEET.into(), 2)],
            vec![(POINT.into(), 1), (LINE.into(), 1), (INCIDENT.into(), 2)],
        )
        .expect("plane signature is valid")
    })
}

/// Handle into the plane's interning table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlaneElement(u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Bottom,
    Top,
    Base(u8),
    Join(PlaneElement, PlaneElement),
    Meet(PlaneElement, PlaneElement),
}

#[derive(Debug, Clone)]
struct Node {
    kind: Kind,
    stage: u32,
    /// Fully parenthesized form with children in string order.
    text: Arc<str>,
}

#[derive(Debug, Default)]
struct Store {
    nodes: Vec<Node>,
    index: HashMap<Kind, PlaneElement>,
    materialized: Option<u32>,
}

pub struct FreePlane {
    store: RwLock<Store>,
    presentation: Presentation,
    gens: Vec<PlaneElement>,
}

impl std::fmt::Debug for FreePlane {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FreePlane({} nodes)", self.node_count())
    }
}

impl Default for FreePlane {
    fn default() -> Self {
        Self::new()
    }
}

impl FreePlane {
    pub fn new() -> Self {
        let mut store = Store::default();
        let mut push = |kind: Kind, text: &str| {
            let id = PlaneElement(store.nodes.len() as u32);
            store.nodes.push(Node {
                kind,
                stage: 0,
                text: Arc::from(text),
            });
            store.index.insert(kind, id);
            id
        };
        push(Kind::Bottom, "0");
        push(Kind::Top, "1");
        let gens: Vec<PlaneElement> = (0..4u8).map(|i| push(Kind::Base(i), BASE_NAMES[i as usize])).collect();
        let relators = (1..=4)
            .map(|i| AtomicFormula::Rel(POINT.into(), vec![Term::Var(i)]))
            .collect();
        let presentation =
            Presentation::new(plane_signature().clone(), 4, relators).expect("plane presentation is valid");
        FreePlane {
            store: RwLock::new(store),
            presentation,
            gens,
        }
    }

    pub fn bottom(&self) -> PlaneElement {
        PlaneElement(0)
    }

    pub fn top(&self) -> PlaneElement {
        PlaneElement(1)
    }

    pub fn base(&self, i: usize) -> PlaneElement {
        self.gens[i]
    }

    pub fn node_count(&self) -> usize {
        self.store.read().expect("plane store lock").nodes.len()
    }

    fn node(&self, x: PlaneElement) -> Node {
        self.store.read().expect("plane store lock").nodes[x.0 as usize].clone()
    }

    pub fn kind(&self, x: PlaneElement) -> Kind {
        self.store.read().expect("plane store lock").nodes[x.0 as usize].kind
    }

    pub fn stage(&self, x: PlaneElement) -> u32 {
        self.store.read().expect("plane store lock").nodes[x.0 as usize].stage
    }

    pub fn is_point(&self, x: PlaneElement) -> bool {
        matches!(self.kind(x), Kind::Base(_) | Kind::Meet(..))
    }

    pub fn is_line(&self, x: PlaneElement) -> bool {
        matches!(self.kind(x), Kind::Join(..))
    }

    pub fn text(&self, x: PlaneElement) -> Arc<str> {
        self.node(x).text
    }

    /// Point-line incidence from the creation records.
    pub fn incident(&self, x: PlaneElement, y: PlaneElement) -> bool {
        let (kx, ky) = (self.kind(x), self.kind(y));
        let (p, kp, l, kl) = match (kx, ky) {
            (Kind::Base(_) | Kind::Meet(..), Kind::Join(..)) => (x, kx, y, ky),
            (Kind::Join(..), Kind::Base(_) | Kind::Meet(..)) => (y, ky, x, kx),
            _ => return false,
        };
        matches!(kl, Kind::Join(a, b) if a == p || b == p) || matches!(kp, Kind::Meet(a, b) if a == l || b == l)
    }

    fn common_line(&self, p: PlaneElement, q: PlaneElement) -> Option<PlaneElement> {
        for (x, y) in [(p, q), (q, p)] {
            if let Kind::Meet(l1, l2) = self.kind(x) {
                for l in [l1, l2] {
                    if self.incident(y, l) {
                        return Some(l);
                    }
                }
            }
        }
        None
    }

    fn common_point(&self, l: PlaneElement, m: PlaneElement) -> Option<PlaneElement> {
        for (x, y) in [(l, m), (m, l)] {
            if let Kind::Join(p1, p2) = self.kind(x) {
                for p in [p1, p2] {
                    if self.incident(p, y) {
                        return Some(p);
                    }
                }
            }
        }
        None
    }

    fn intern(&self, join: bool, a: PlaneElement, b: PlaneElement) -> PlaneElement {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let kind = if join { Kind::Join(a, b) } else { Kind::Meet(a, b) };
        if let Some(&id) = self.store.read().expect("plane store lock").index.get(&kind) {
            return id;
        }
        let mut store = self.store.write().expect("plane store lock");
        if let Some(&id) = store.index.get(&kind) {
            return id;
        }
        let (na, nb) = (&store.nodes[a.0 as usize], &store.nodes[b.0 as usize]);
        let stage = na.stage.max(nb.stage) + 1;
        let (ta, tb) = if na.text <= nb.text {
            (&na.text, &nb.text)
        } else {
            (&nb.text, &na.text)
        };
        let op = if join { "v" } else { "^" };
        let text: Arc<str> = Arc::from(format!("({ta} {op} {tb})"));
        let id = PlaneElement(store.nodes.len() as u32);
        store.nodes.push(Node { kind, stage, text });
        store.index.insert(kind, id);
        id
    }

    /// `x v y` on the whole lattice.
    pub fn join(&self, x: PlaneElement, y: PlaneElement) -> PlaneElement {
        if x == y {
            return x;
        }
        match (self.kind(x), self.kind(y)) {
            (Kind::Bottom, _) => y,
            (_, Kind::Bottom) => x,
            (Kind::Top, _) | (_, Kind::Top) => self.top(),
            (Kind::Join(..), Kind::Join(..)) => self.top(),
            (Kind::Join(..), _) => {
                if self.incident(y, x) {
                    x
                } else {
                    self.top()
                }
            }
            (_, Kind::Join(..)) => {
                if self.incident(x, y) {
                    y
                } else {
                    self.top()
                }
            }
            _ => self.common_line(x, y).unwrap_or_else(|| self.intern(true, x, y)),
        }
    }

    /// `x ^ y` on the whole lattice.
    pub fn meet(&self, x: PlaneElement, y: PlaneElement) -> PlaneElement {
        if x == y {
            return x;
        }
        match (self.kind(x), self.kind(y)) {
            (Kind::Top, _) => y,
            (_, Kind::Top) => x,
            (Kind::Bottom, _) | (_, Kind::Bottom) => self.bottom(),
            (Kind::Join(..), Kind::Join(..)) => self.common_point(x, y).unwrap_or_else(|| self.intern(false, x, y)),
            (Kind::Join(..), _) => {
                if self.incident(y, x) {
                    y
                } else {
                    self.bottom()
                }
            }
            (_, Kind::Join(..)) => {
                if self.incident(x, y) {
                    x
                } else {
                    self.bottom()
                }
            }
            _ => self.bottom(),
        }
    }

    fn all_nodes(&self) -> Vec<(PlaneElement, u32, Arc<str>, bool)> {
        let store = self.store.read().expect("plane store lock");
        store
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (PlaneElement(i as u32), n.stage, n.text.clone(), matches!(n.kind, Kind::Join(..))))
            .collect()
    }

    fn materialize(&self, k: u32) {
        let done = self.store.read().expect("plane store lock").materialized;
        let start = match done {
            Some(d) if d >= k => return,
            Some(d) => d + 1,
            None => 1,
        };
        for n in start..=k {
            let prev: Vec<_> = self
                .all_nodes()
                .into_iter()
                .filter(|(x, st, _, line)| *st < n && x.0 >= 2 && (*line == (n % 2 == 0)))
                .map(|(x, _, text, _)| (text, x))
                .collect();
            let mut prev = prev;
            prev.sort();
            for i in 0..prev.len() {
                for j in (i + 1)..prev.len() {
                    let (a, b) = (prev[i].1, prev[j].1);
                    if n % 2 == 1 {
                        self.join(a, b);
                    } else {
                        self.meet(a, b);
                    }
                }
            }
            debug!("plane materialized through stage {n}: {} nodes", self.node_count());
        }
        self.store.write().expect("plane store lock").materialized = Some(k.max(done.unwrap_or(0)));
    }

    /// Every point and line of stage `<= k`, ordered by (stage, text).
    pub fn enumerate_stage(&self, k: u32) -> Vec<PlaneElement> {
        self.materialize(k);
        let mut out: Vec<_> = self
            .all_nodes()
            .into_iter()
            .filter(|(x, st, _, _)| x.0 >= 2 && *st <= k)
            .map(|(x, st, text, _)| (st, text, x))
            .collect();
        out.sort();
        out.into_iter().map(|(_, _, x)| x).collect()
    }

    /// `(stage, new points, new lines)` for stages `0..=k`.
    pub fn census(&self, k: u32) -> Vec<(u32, usize, usize)> {
        let elems = self.enumerate_stage(k);
        (0..=k)
            .map(|st| {
                let at: Vec<_> = elems.iter().filter(|&&x| self.stage(x) == st).collect();
                let lines = at.iter().filter(|&&&x| self.is_line(x)).count();
                (st, at.len() - lines, lines)
            })
            .collect()
    }

    pub fn parse(&self, text: &str) -> Result<PlaneElement> {
        let mut p = InfixParser {
            plane: self,
            src: text.as_bytes(),
            pos: 0,
        };
        let x = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::syntax(p.pos, "trailing input"));
        }
        Ok(x)
    }

    pub fn display(&self, x: PlaneElement) -> String {
        let text = self.text(x);
        match text.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            Some(inner) => inner.to_string(),
            None => text.to_string(),
        }
    }

    /// A term over `x1..x4` (the base points) denoting `x`.
    pub fn term_of(&self, x: PlaneElement) -> Term {
        match self.kind(x) {
            Kind::Bottom => Term::Const(BOT.into()),
            Kind::Top => Term::Const(TOP.into()),
            Kind::Base(i) => Term::Var(i as usize + 1),
            Kind::Join(a, b) | Kind::Meet(a, b) => {
                let op = if matches!(self.kind(x), Kind::Join(..)) { JOIN } else { MEET };
                let (a, b) = if self.text(a) <= self.text(b) { (a, b) } else { (b, a) };
                Term::app(op, vec![self.term_of(a), self.term_of(b)])
            }
        }
    }
}

struct InfixParser<'a> {
    plane: &'a FreePlane,
    src: &'a [u8],
    pos: usize,
}

impl InfixParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<PlaneElement> {
        let mut x = self.term()?;
        while self.peek() == Some(b'v') {
            self.pos += 1;
            let y = self.term()?;
            x = self.plane.join(x, y);
        }
        Ok(x)
    }

    fn term(&mut self) -> Result<PlaneElement> {
        let mut x = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            let y = self.atom()?;
            x = self.plane.meet(x, y);
        }
        Ok(x)
    }

    fn atom(&mut self) -> Result<PlaneElement> {
        let start = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let x = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(Error::syntax(self.pos, "expected `)`"));
                }
                self.pos += 1;
                Ok(x)
            }
            Some(b'0') => {
                self.pos += 1;
                Ok(self.plane.bottom())
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(self.plane.top())
            }
            Some(b'A' | b'B') => {
                let rest = &self.src[self.pos..];
                for (i, name) in BASE_NAMES.iter().enumerate() {
                    if rest.starts_with(name.as_bytes()) {
                        self.pos += name.len();
                        return Ok(self.plane.base(i));
                    }
                }
                Err(Error::syntax(self.pos, "unknown base point"))
            }
            _ => Err(Error::syntax(start.max(self.pos), "expected a point, a line, 0, 1 or `(`")),
        }
    }
}

impl Structure for FreePlane {
    type Elem = PlaneElement;

    fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    fn generators(&self) -> &[PlaneElement] {
        &self.gens
    }

    fn constant(&self, name: &str) -> Result<PlaneElement> {
        match name {
            BOT => Ok(self.bottom()),
            TOP => Ok(self.top()),
            _ => Err(Error::UnknownSymbol(name.to_string())),
        }
    }

    fn apply(&self, func: &str, args: &[PlaneElement]) -> Result<PlaneElement> {
        match (func, args) {
            (JOIN, [a, b]) => Ok(self.join(*a, *b)),
            (MEET, [a, b]) => Ok(self.meet(*a, *b)),
            (JOIN | MEET, _) => Err(Error::Arity {
                name: func.to_string(),
                expected: 2,
                found: args.len(),
            }),
            _ => Err(Error::UnknownSymbol(func.to_string())),
        }
    }

    fn relation(&self, rel: &str, args: &[PlaneElement]) -> Result<bool> {
        match (rel, args) {
            (POINT, [x]) => Ok(self.is_point(*x)),
            (LINE, [x]) => Ok(self.is_line(*x)),
            (INCIDENT, [x, y]) => Ok(self.incident(*x, *y)),
            _ => match plane_signature().relation_arity(rel) {
                Some(expected) => Err(Error::Arity {
                    name: rel.to_string(),
                    expected,
                    found: args.len(),
                }),
                None => Err(Error::UnknownSymbol(rel.to_string())),
            },
        }
    }

    fn element_length(&self, e: &PlaneElement) -> usize {
        self.stage(*e) as usize
    }

    fn elements_up_to(&self, max_len: usize, cap: usize) -> Result<Vec<PlaneElement>> {
        let k = u32::try_from(max_len).map_err(|_| Error::budget("plane stage", u32::MAX as usize))?;
        let mut out = vec![self.bottom(), self.top()];
        out.extend(self.enumerate_stage(k));
        if out.len() > cap {
            return Err(Error::budget("plane elements", cap));
        }
        Ok(out)
    }

    fn express(&self, e: &PlaneElement) -> Term {
        self.term_of(*e)
    }

    fn encode(&self, e: &PlaneElement) -> ElementId {
        ElementId(self.text(*e).as_bytes().to_vec())
    }

    fn format(&self, e: &PlaneElement) -> String {
        self.display(*e)
    }

    fn parse_element(&self, text: &str) -> Result<PlaneElement> {
        self.parse(text)
    }

    fn length_convention(&self) -> &'static str {
        "stage in the free extension"
    }
}

/// A collineation given by the images of `A1, A2, B1, B2`, extended along
/// joins and meets with memoization.
pub struct Collineation<'p> {
    plane: &'p FreePlane,
    images: [PlaneElement; 4],
    memo: Mutex<HashMap<PlaneElement, PlaneElement>>,
}

impl<'p> Collineation<'p> {
    pub fn images(&self) -> [PlaneElement; 4] {
        self.images
    }

    pub fn apply(&self, x: PlaneElement) -> PlaneElement {
        if let Some(&y) = self.memo.lock().expect("collineation memo").get(&x) {
            return y;
        }
        let y = match self.plane.kind(x) {
            Kind::Bottom | Kind::Top => x,
            Kind::Base(i) => self.images[i as usize],
            Kind::Join(a, b) => {
                let (a, b) = (self.apply(a), self.apply(b));
                self.plane.join(a, b)
            }
            Kind::Meet(a, b) => {
                let (a, b) = (self.apply(a), self.apply(b));
                self.plane.meet(a, b)
            }
        };
        self.memo.lock().expect("collineation memo").insert(x, y);
        y
    }
}

/// Checks that the four images form a quadrangle and wraps them.
pub fn extend_collineation(plane: &FreePlane, images: [PlaneElement; 4]) -> Result<Collineation<'_>> {
    if let Some(x) = images.iter().find(|&&x| !plane.is_point(x)) {
        return Err(Error::Degenerate(format!("`{}` is not a point", plane.display(*x))));
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            if images[i] == images[j] {
                return Err(Error::Degenerate("repeated image point".into()));
            }
        }
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            let l = plane.join(images[i], images[j]);
            for (k, &p) in images.iter().enumerate() {
                if k != i && k != j && plane.incident(p, l) {
                    return Err(Error::Degenerate(format!(
                        "images of {}, {}, {} are collinear",
                        BASE_NAMES[i], BASE_NAMES[j], BASE_NAMES[k]
                    )));
                }
            }
        }
    }
    Ok(Collineation {
        plane,
        images,
        memo: Mutex::new(HashMap::new()),
    })
}

fn join_t(a: Term, b: Term) -> Term {
    Term::app(JOIN, vec![a, b])
}

fn meet_t(a: Term, b: Term) -> Term {
    Term::app(MEET, vec![a, b])
}

/// `(x1 v x2) ^ (x3 v x4)`.
pub fn a1_term() -> Term {
    meet_t(join_t(Term::Var(1), Term::Var(2)), join_t(Term::Var(3), Term::Var(4)))
}

/// `(x1 v x4) ^ (x2 v x3)`, the diagonal point off `A1 v B1`.
pub fn a2_term() -> Term {
    meet_t(join_t(Term::Var(1), Term::Var(4)), join_t(Term::Var(2), Term::Var(3)))
}

fn vars(idx: [usize; 4]) -> Vec<Term> {
    idx.iter().map(|&i| Term::Var(i)).collect()
}

/// Swaps `A1` and `A2`.
pub fn theta1(plane: &FreePlane) -> Result<AutomorphismSpec<PlaneElement>> {
    AutomorphismSpec::from_terms(plane, "theta1", vars([2, 1, 3, 4]), vars([2, 1, 3, 4]))
}

/// The 4-cycle `A1 → A2 → B1 → B2 → A1`.
pub fn theta2(plane: &FreePlane) -> Result<AutomorphismSpec<PlaneElement>> {
    AutomorphismSpec::from_terms(plane, "theta2", vars([2, 3, 4, 1]), vars([4, 1, 2, 3]))
}

/// Fixes `A1, B1` and sends `A2, B2` to the diagonal points on `B1 v B2`
/// and `A1 v B2`; an involution.
pub fn phi(plane: &FreePlane) -> Result<AutomorphismSpec<PlaneElement>> {
    let terms = vec![Term::Var(1), a1_term(), Term::Var(3), a2_term()];
    AutomorphismSpec::from_terms(plane, "phi", terms.clone(), terms)
}

/// `X = {θ₁, θ₂, φ}` with `F(m̄) = Σ 2(mᵢ + 1)`.
pub fn plane_aut_presentation(plane: &FreePlane) -> Result<AutPresentation<PlaneElement>> {
    AutPresentation::new(
        vec![theta1(plane)?, theta2(plane)?, phi(plane)?],
        AffineBound::uniform(8, 2, 4)?,
    )
}
