//! Graph products of primary cyclic groups: normal forms, geodesic length,
//! partial conjugations and the finite automorphism part `F(Γ)`.
//!
//! All-orders-2 instances are the right-angled Coxeter groups; the
//! two-vertex edgeless one is D∞.

use std::collections::BTreeSet;
use std::fmt;

use log::debug;

use crate::error::{Error, Result};
use crate::group::{
    commutation_relator, group_signature, parse_word, power_relator, Group, Letter, IDENTITY,
};
use crate::logic::{is_identifier, is_variable_name, Presentation};
use crate::orbit::{AffineBound, AutPresentation, AutomorphismSpec};
use crate::structure::advance;

/// Cap on the number of candidate assignments tried by [`f_gamma`].
pub const DEFAULT_F_GAMMA_BUDGET: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GPGraph {
    names: Vec<String>,
    orders: Vec<u32>,
    adj: Vec<Vec<bool>>,
    /// Position of each vertex in name order.
    rank: Vec<usize>,
}

fn is_prime_power(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n && !n.is_multiple_of(p) {
        p += 1;
    }
    let p = if n.is_multiple_of(p) { p } else { n };
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
    }
    m == 1
}

impl GPGraph {
    pub fn new(vertices: Vec<(String, u32)>, edges: Vec<(String, String)>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Config("graph needs at least one vertex".into()));
        }
        let mut names = Vec::new();
        let mut orders = Vec::new();
        for (name, order) in vertices {
            if !is_identifier(&name) || is_variable_name(&name) || name == IDENTITY {
                return Err(Error::Config(format!("bad vertex name `{name}`")));
            }
            if names.contains(&name) {
                return Err(Error::Config(format!("duplicate vertex `{name}`")));
            }
            if !is_prime_power(order) {
                return Err(Error::Config(format!("order {order} of `{name}` is not a prime power")));
            }
            names.push(name);
            orders.push(order);
        }
        let n = names.len();
        let mut adj = vec![vec![false; n]; n];
        for (a, b) in edges {
            let find = |v: &str| {
                names
                    .iter()
                    .position(|x| x == v)
                    .ok_or_else(|| Error::UnknownSymbol(v.to_string()))
            };
            let (i, j) = (find(&a)?, find(&b)?);
            if i == j {
                return Err(Error::Config(format!("self-loop at `{a}`")));
            }
            adj[i][j] = true;
            adj[j][i] = true;
        }
        let mut by_name: Vec<usize> = (0..n).collect();
        by_name.sort_by(|&i, &j| names[i].cmp(&names[j]));
        let mut rank = vec![0; n];
        for (r, &v) in by_name.iter().enumerate() {
            rank[v] = r;
        }
        Ok(GPGraph {
            names,
            orders,
            adj,
            rank,
        })
    }

    /// Edgeless graph on two vertices of order 2.
    pub fn infinite_dihedral() -> Self {
        Self::new(vec![("a".into(), 2), ("b".into(), 2)], vec![]).expect("valid graph")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn order(&self, v: usize) -> u32 {
        self.orders[v]
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u][v]
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Connected components of `Γ ∖ N*(s)`, each sorted, in order of least vertex.
    pub fn components_outside_star(&self, s: usize) -> Vec<Vec<usize>> {
        let n = self.len();
        let outside: Vec<bool> = (0..n).map(|v| v != s && !self.adj[s][v]).collect();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if !outside[start] || seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                for v in 0..n {
                    if outside[v] && !seen[v] && self.adj[u][v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Maximal cliques, each sorted, in lexicographic order.
    pub fn maximal_cliques(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut out = Vec::new();
        for mask in 1u64..(1u64 << n) {
            let members: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
            let clique = members
                .iter()
                .all(|&u| members.iter().all(|&v| u == v || self.adj[u][v]));
            if !clique {
                continue;
            }
            let maximal = (0..n)
                .filter(|v| mask >> v & 1 == 0)
                .all(|w| members.iter().any(|&u| !self.adj[u][w]));
            if maximal {
                out.push(members);
            }
        }
        out.sort();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub vertex: usize,
    pub exponent: u32,
}

/// Canonical reduced syllable word.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalWord {
    pub syllables: Vec<Syllable>,
}

impl NormalWord {
    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }
}

/// Normal form of `word`, a list of (vertex, exponent) pairs.
///
/// Equal-vertex syllables separated only by vertices adjacent to that vertex
/// are merged until none remain; the result is then shuffled into the
/// lexicographically least order by vertex name.
pub fn normal_form(g: &GPGraph, word: &[(usize, i64)]) -> Result<NormalWord> {
    let mut syl: Vec<Syllable> = Vec::with_capacity(word.len());
    for &(v, k) in word {
        if v >= g.len() {
            return Err(Error::UnknownSymbol(format!("vertex #{v}")));
        }
        let p = g.orders[v] as i64;
        let e = k.rem_euclid(p) as u32;
        if e != 0 {
            syl.push(Syllable { vertex: v, exponent: e });
        }
    }
    reduce(g, &mut syl);
    Ok(NormalWord {
        syllables: shuffle_least(g, syl),
    })
}

fn reduce(g: &GPGraph, syl: &mut Vec<Syllable>) {
    'outer: loop {
        for j in 0..syl.len() {
            let v = syl[j].vertex;
            for i in (0..j).rev() {
                if syl[i].vertex == v {
                    let p = g.orders[v];
                    let e = (syl[i].exponent + syl[j].exponent) % p;
                    syl.remove(j);
                    if e == 0 {
                        syl.remove(i);
                    } else {
                        syl[i].exponent = e;
                    }
                    continue 'outer;
                }
                if !g.adj[syl[i].vertex][v] {
                    break;
                }
            }
        }
        return;
    }
}

/// Lexicographically least (by vertex name) word in the shuffle class.
fn shuffle_least(g: &GPGraph, mut rest: Vec<Syllable>) -> Vec<Syllable> {
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut best: Option<usize> = None;
        for k in 0..rest.len() {
            let v = rest[k].vertex;
            if rest[..k].iter().all(|s| g.adj[s.vertex][v]) && best.is_none_or(|b| g.rank[v] < g.rank[rest[b].vertex]) {
                best = Some(k);
            }
        }
        out.push(rest.remove(best.expect("some syllable can move to the front")));
    }
    out
}

/// `Σ min(k, p − k)` over the syllables.
pub fn geodesic_length(g: &GPGraph, w: &NormalWord) -> usize {
    w.syllables
        .iter()
        .map(|s| s.exponent.min(g.orders[s.vertex] - s.exponent) as usize)
        .sum()
}

/// The group `G(Γ, p)` as a computable structure on its vertex generators.
#[derive(Debug, Clone)]
pub struct GraphProduct {
    graph: GPGraph,
    presentation: Presentation,
    gens: Vec<NormalWord>,
}

impl GraphProduct {
    pub fn new(graph: GPGraph) -> Result<Self> {
        let n = graph.len();
        let mut relators = Vec::new();
        for v in 0..n {
            relators.push(power_relator(v + 1, graph.orders[v] as usize));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if graph.adj[i][j] {
                    relators.push(commutation_relator(i + 1, j + 1));
                }
            }
        }
        let presentation = Presentation::new(group_signature().clone(), n, relators)?;
        let gens = (0..n)
            .map(|v| NormalWord {
                syllables: vec![Syllable { vertex: v, exponent: 1 }],
            })
            .collect();
        Ok(GraphProduct {
            graph,
            presentation,
            gens,
        })
    }

    pub fn graph(&self) -> &GPGraph {
        &self.graph
    }

    pub fn word(&self, text: &str) -> Result<NormalWord> {
        normal_form(&self.graph, &parse_word(text, &self.graph.names)?)
    }

    /// `w^k` (k may be negative).
    pub fn pow(&self, w: &NormalWord, k: i64) -> NormalWord {
        let base = if k < 0 { self.inverse(w) } else { w.clone() };
        let mut acc = NormalWord::default();
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        acc
    }

    /// Applies the endomorphism `v ↦ images[v]` to `w`.
    pub fn substitute(&self, images: &[NormalWord], w: &NormalWord) -> NormalWord {
        w.syllables.iter().fold(NormalWord::default(), |acc, s| {
            self.mul(&acc, &self.pow(&images[s.vertex], s.exponent as i64))
        })
    }

    fn conjugate(&self, s: &NormalWord, t: &NormalWord) -> NormalWord {
        self.mul(&self.mul(s, t), &self.inverse(s))
    }
}

impl Group for GraphProduct {
    type Elem = NormalWord;

    fn group_presentation(&self) -> &Presentation {
        &self.presentation
    }

    fn group_generators(&self) -> &[NormalWord] {
        &self.gens
    }

    fn identity(&self) -> NormalWord {
        NormalWord::default()
    }

    fn mul(&self, a: &NormalWord, b: &NormalWord) -> NormalWord {
        let mut syl: Vec<Syllable> = a.syllables.iter().chain(&b.syllables).copied().collect();
        reduce(&self.graph, &mut syl);
        NormalWord {
            syllables: shuffle_least(&self.graph, syl),
        }
    }

    fn inverse(&self, a: &NormalWord) -> NormalWord {
        let syl = a
            .syllables
            .iter()
            .rev()
            .map(|s| Syllable {
                vertex: s.vertex,
                exponent: self.graph.orders[s.vertex] - s.exponent,
            })
            .collect();
        NormalWord {
            syllables: shuffle_least(&self.graph, syl),
        }
    }

    fn word_length(&self, a: &NormalWord) -> usize {
        geodesic_length(&self.graph, a)
    }

    fn spell(&self, a: &NormalWord) -> Vec<Letter> {
        let mut out = Vec::new();
        for s in &a.syllables {
            let p = self.graph.orders[s.vertex];
            if s.exponent <= p - s.exponent {
                out.extend(std::iter::repeat_n((s.vertex, false), s.exponent as usize));
            } else {
                out.extend(std::iter::repeat_n((s.vertex, true), (p - s.exponent) as usize));
            }
        }
        out
    }

    fn encode_word(&self, a: &NormalWord) -> Vec<u8> {
        let mut out = Vec::with_capacity(a.syllables.len() * 8);
        for s in &a.syllables {
            out.extend_from_slice(&(self.graph.rank[s.vertex] as u32).to_be_bytes());
            out.extend_from_slice(&s.exponent.to_be_bytes());
        }
        out
    }

    fn format_word(&self, a: &NormalWord) -> String {
        if a.is_identity() {
            return IDENTITY.to_string();
        }
        a.syllables
            .iter()
            .map(|s| {
                let name = &self.graph.names[s.vertex];
                if s.exponent == 1 {
                    name.clone()
                } else {
                    format!("{name}^{}", s.exponent)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn parse_word_text(&self, text: &str) -> Result<NormalWord> {
        self.word(text)
    }
}

impl fmt::Display for GPGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self
            .names
            .iter()
            .zip(&self.orders)
            .map(|(n, p)| format!("{n}:{p}"))
            .collect();
        let mut es = Vec::new();
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                if self.adj[i][j] {
                    es.push(format!("{}-{}", self.names[i], self.names[j]));
                }
            }
        }
        write!(f, "[{}] {{{}}}", vs.join(" "), es.join(" "))
    }
}

/// `π_(s,C)`: `t ↦ s t s⁻¹` for `t ∈ C`, identity elsewhere, for every
/// nonempty union `C` of components of `Γ ∖ N*(s)`.
pub fn partial_conjugations(gp: &GraphProduct) -> Result<Vec<AutomorphismSpec<NormalWord>>> {
    let g = &gp.graph;
    let mut out = Vec::new();
    let mut acting: Vec<usize> = (0..g.len()).collect();
    acting.sort_by_key(|&v| g.rank[v]);
    for s in acting {
        let comps = g.components_outside_star(s);
        if comps.len() >= usize::BITS as usize {
            return Err(Error::budget("components outside a star", usize::BITS as usize));
        }
        let sw = &gp.gens[s];
        let s_inv = gp.inverse(sw);
        for mask in 1usize..(1usize << comps.len()) {
            let members: BTreeSet<usize> = comps
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .flat_map(|(_, c)| c.iter().copied())
                .collect();
            let images = (0..g.len())
                .map(|t| if members.contains(&t) { gp.conjugate(sw, &gp.gens[t]) } else { gp.gens[t].clone() })
                .collect();
            let inverse = (0..g.len())
                .map(|t| if members.contains(&t) { gp.conjugate(&s_inv, &gp.gens[t]) } else { gp.gens[t].clone() })
                .collect();
            let mut names: Vec<&str> = members.iter().map(|&t| g.names[t].as_str()).collect();
            names.sort_unstable();
            let name = format!("pc_{}_{}", g.names[s], names.join("+"));
            out.push(AutomorphismSpec::from_images(gp, &name, images, inverse)?);
        }
    }
    Ok(out)
}

/// Elements of the union of the maximal complete subgroups, in enumeration order.
fn complete_subgroup_elements(gp: &GraphProduct) -> Vec<NormalWord> {
    let g = &gp.graph;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for clique in g.maximal_cliques() {
        let bounds: Vec<usize> = clique.iter().map(|&v| g.orders[v] as usize).collect();
        let mut idx = vec![0usize; clique.len()];
        loop {
            let word: Vec<(usize, i64)> = clique.iter().zip(&idx).map(|(&v, &k)| (v, k as i64)).collect();
            let w = normal_form(g, &word).expect("clique vertices exist");
            let key = (geodesic_length(g, &w), gp.encode_word(&w));
            if seen.insert(key) {
                out.push(w);
            }
            if !advance(&mut idx, &bounds) {
                break;
            }
        }
    }
    out.sort_by_key(|w| (geodesic_length(g, w), gp.encode_word(w)));
    out
}

/// The finite group `F(Γ)` by exhaustive search: assignments of the vertex
/// generators into the union of maximal complete subgroups that respect the
/// relators and have a two-sided inverse among themselves. The identity is
/// listed first.
pub fn f_gamma(gp: &GraphProduct, budget: usize) -> Result<Vec<AutomorphismSpec<NormalWord>>> {
    let g = &gp.graph;
    let n = g.len();
    let pool = complete_subgroup_elements(gp);
    let candidates: Vec<Vec<NormalWord>> = (0..n)
        .map(|v| {
            pool.iter()
                .filter(|w| !w.is_identity() && gp.pow(w, g.orders[v] as i64).is_identity())
                .cloned()
                .collect()
        })
        .collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return Err(Error::Precondition("a vertex has no admissible image".into()));
    }
    let total = candidates
        .iter()
        .try_fold(1usize, |acc, c| acc.checked_mul(c.len()))
        .unwrap_or(usize::MAX);
    if total > budget {
        return Err(Error::budget("F(Γ) candidate assignments", budget));
    }
    let bounds: Vec<usize> = candidates.iter().map(Vec::len).collect();
    let mut idx = vec![0usize; n];
    let mut homs: Vec<Vec<NormalWord>> = Vec::new();
    loop {
        let images: Vec<NormalWord> = (0..n).map(|v| candidates[v][idx[v]].clone()).collect();
        let commute = (0..n).all(|i| {
            ((i + 1)..n).all(|j| !g.adj[i][j] || gp.mul(&images[i], &images[j]) == gp.mul(&images[j], &images[i]))
        });
        if commute {
            homs.push(images);
        }
        if !advance(&mut idx, &bounds) {
            break;
        }
    }
    let mut autos: Vec<(Vec<NormalWord>, Vec<NormalWord>)> = Vec::new();
    for f in &homs {
        let inverse = homs.iter().find(|h| {
            (0..n).all(|v| gp.substitute(h, &f[v]) == gp.gens[v] && gp.substitute(f, &h[v]) == gp.gens[v])
        });
        if let Some(h) = inverse {
            autos.push((f.clone(), h.clone()));
        }
    }
    if let Some(pos) = autos.iter().position(|(f, _)| *f == gp.gens) {
        let id = autos.remove(pos);
        autos.insert(0, id);
    }
    debug!("F(Γ) for {}: {} of {} homomorphisms", g, autos.len(), homs.len());
    autos
        .into_iter()
        .map(|(f, h)| {
            let name = format!("fg({})", f.iter().map(|w| gp.format_word(w)).collect::<Vec<_>>().join(";"));
            AutomorphismSpec::from_images(gp, &name, f, h)
        })
        .collect()
}

/// Partial conjugations together with the non-identity elements of `F(Γ)`,
/// `F(m̄) = 1 + Σ mᵢ`.
pub fn gp_aut_presentation(gp: &GraphProduct) -> Result<AutPresentation<NormalWord>> {
    gp_aut_presentation_with_budget(gp, DEFAULT_F_GAMMA_BUDGET)
}

pub fn gp_aut_presentation_with_budget(gp: &GraphProduct, budget: usize) -> Result<AutPresentation<NormalWord>> {
    let mut gens = partial_conjugations(gp)?;
    let finite = f_gamma(gp, budget)?;
    let mut nontrivial: Vec<_> = finite.iter().filter(|a| !a.is_identity_on(&gp.gens)).cloned().collect();
    if gens.is_empty() && nontrivial.is_empty() {
        nontrivial = finite;
    }
    gens.extend(nontrivial);
    AutPresentation::new(gens, AffineBound::uniform(1, 1, gp.graph.len())?)
}
