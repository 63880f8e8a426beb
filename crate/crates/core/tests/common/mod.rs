//! Brute-force oracles shared by the integration suites and the acceptance
//! runner. None of them calls into the algorithms they check.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use scott_core::classical::FWord;
use scott_core::graph_product::{GPGraph, GraphProduct};

pub fn graph(vertices: &[(&str, u32)], edges: &[(&str, &str)]) -> GPGraph {
    GPGraph::new(
        vertices.iter().map(|(n, o)| (n.to_string(), *o)).collect(),
        edges.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
    )
    .expect("test graph is valid")
}

pub fn dinf() -> GraphProduct {
    GraphProduct::new(GPGraph::infinite_dihedral()).unwrap()
}

pub fn path_abc() -> GraphProduct {
    GraphProduct::new(graph(&[("a", 2), ("b", 2), ("c", 2)], &[("a", "b"), ("b", "c")])).unwrap()
}

pub fn triangle_232() -> GraphProduct {
    GraphProduct::new(graph(&[("a", 2), ("b", 3), ("c", 2)], &[("a", "b"), ("b", "c"), ("a", "c")])).unwrap()
}

pub fn v4() -> GraphProduct {
    GraphProduct::new(graph(&[("a", 2), ("b", 2)], &[("a", "b")])).unwrap()
}

/// Letters `v^{±1}` of a graph product; `v^-1` only when `v` has order > 2.
pub fn alphabet(g: &GPGraph) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    for v in 0..g.len() {
        out.push((v, 1));
        if g.order(v) > 2 {
            out.push((v, -1));
        }
    }
    out
}

/// Every word of length `<= max_len` over `alphabet`, shortest first.
pub fn all_words<T: Clone>(alphabet: &[T], max_len: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in alphabet {
                let mut x: Vec<T> = w.clone();
                x.push(a.clone());
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Shortlex-least word reachable by merging equal adjacent letters and
/// swapping adjacent commuting ones. By the normal form theorem for graph
/// products this is a complete invariant of the element.
pub fn closure_canonical(g: &GPGraph, word: &[(usize, i64)]) -> Vec<(usize, u32)> {
    let start: Vec<(usize, u32)> = word
        .iter()
        .filter_map(|&(v, k)| {
            let p = g.order(v) as i64;
            let e = k.rem_euclid(p) as u32;
            (e != 0).then_some((v, e))
        })
        .collect();
    let mut seen: HashSet<Vec<(usize, u32)>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    let mut best: Option<Vec<(usize, u32)>> = None;
    while let Some(w) = queue.pop_front() {
        let better = match &best {
            None => true,
            Some(b) => (w.len(), &w) < (b.len(), b),
        };
        if better {
            best = Some(w.clone());
        }
        for i in 0..w.len().saturating_sub(1) {
            let (u, x) = w[i];
            let (v, y) = w[i + 1];
            let mut cand = w.clone();
            if u == v {
                let e = (x + y) % g.order(u);
                if e == 0 {
                    cand.drain(i..i + 2);
                } else {
                    cand[i] = (u, e);
                    cand.remove(i + 1);
                }
            } else if g.adjacent(u, v) {
                cand.swap(i, i + 1);
            } else {
                continue;
            }
            if seen.insert(cand.clone()) {
                queue.push_back(cand);
            }
        }
    }
    best.unwrap_or_default()
}

/// Integer Tits representation of a right-angled Coxeter group (all vertex
/// orders 2): `B(s,s) = 1`, `0` on edges, `-1` off edges. Faithful.
pub fn tits_matrix(g: &GPGraph, word: &[(usize, i64)]) -> Vec<Vec<i64>> {
    let n = g.len();
    let b = |s: usize, t: usize| -> i64 {
        if s == t {
            1
        } else if g.adjacent(s, t) {
            0
        } else {
            -1
        }
    };
    let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for &(s, _) in word {
        // right-multiply by σ_s, whose column t is e_t - 2B(s,t) e_s
        let mut next = m.clone();
        for row in 0..n {
            for t in 0..n {
                next[row][t] = m[row][t] - 2 * b(s, t) * m[row][s];
            }
        }
        m = next;
    }
    m
}

/// Exponent vector of a word in a graph product over a complete graph.
pub fn exponent_vector(g: &GPGraph, word: &[(usize, i64)]) -> Vec<u32> {
    let mut v = vec![0i64; g.len()];
    for &(x, k) in word {
        v[x] += k;
    }
    v.iter().enumerate().map(|(i, &x)| x.rem_euclid(g.order(i) as i64) as u32).collect()
}

fn cyclic_reduce(mut w: Vec<i8>) -> Vec<i8> {
    while w.len() >= 2 && w[0] == -w[w.len() - 1] {
        w.remove(0);
        w.pop();
    }
    w
}

fn is_rotation(a: &[i8], b: &[i8]) -> bool {
    a.len() == b.len() && (a.is_empty() || (0..a.len()).any(|r| a[r..].iter().chain(&a[..r]).eq(b.iter())))
}

/// `(u, v)` is a basis of `F₂` iff `[u, v]` is conjugate to `[a, b]^{±1}`.
pub fn commutator_basis_oracle(u: &FWord, v: &FWord) -> bool {
    let comm = u.concat(v).concat(&u.inverse()).concat(&v.inverse());
    let c = cyclic_reduce(comm.0);
    let target = vec![1, 2, -1, -2];
    let target_inv = vec![2, 1, -2, -1];
    is_rotation(&c, &target) || is_rotation(&c, &target_inv)
}

/// Reduced words of length `<= max_len` in `F_n`.
pub fn reduced_words(rank: i8, max_len: usize) -> Vec<FWord> {
    let letters: Vec<i8> = (1..=rank).flat_map(|g| [g, -g]).collect();
    let mut out = vec![FWord(vec![])];
    let mut layer = vec![FWord(vec![])];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &x in &letters {
                if w.0.last() == Some(&-x) {
                    continue;
                }
                let mut y = w.0.clone();
                y.push(x);
                next.push(FWord(y));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn det2(u: &[i64], v: &[i64]) -> i64 {
    u[0] * v[1] - u[1] * v[0]
}

/// The free completion of the quadrangle as explicit point and line sets,
/// named with the same fully parenthesized texts as the library.
#[derive(Debug, Default)]
pub struct PlaneOracle {
    /// text -> (stage, is_line)
    pub elements: BTreeMap<String, (u32, bool)>,
    /// line text -> its points
    pub lines: BTreeMap<String, BTreeSet<String>>,
}

impl PlaneOracle {
    pub fn build(max_stage: u32) -> Self {
        let mut o = PlaneOracle::default();
        for name in ["A1", "A2", "B1", "B2"] {
            o.elements.insert(name.into(), (0, false));
        }
        for n in 1..=max_stage {
            let older = |o: &PlaneOracle, want_line: bool| -> Vec<String> {
                o.elements
                    .iter()
                    .filter(|(_, &(st, l))| st < n && l == want_line)
                    .map(|(k, _)| k.clone())
                    .collect()
            };
            if n % 2 == 1 {
                let pts = older(&o, false);
                for i in 0..pts.len() {
                    for j in (i + 1)..pts.len() {
                        let (p, q) = (&pts[i], &pts[j]);
                        if o.lines.values().any(|s| s.contains(p) && s.contains(q)) {
                            continue;
                        }
                        let text = format!("({p} v {q})");
                        o.elements.insert(text.clone(), (n, true));
                        o.lines.insert(text, [p.clone(), q.clone()].into_iter().collect());
                    }
                }
            } else {
                let ls = older(&o, true);
                for i in 0..ls.len() {
                    for j in (i + 1)..ls.len() {
                        let (l, m) = (&ls[i], &ls[j]);
                        if o.lines[l].intersection(&o.lines[m]).next().is_some() {
                            continue;
                        }
                        let text = format!("({l} ^ {m})");
                        o.elements.insert(text.clone(), (n, false));
                        o.lines.get_mut(l).unwrap().insert(text.clone());
                        o.lines.get_mut(m).unwrap().insert(text);
                    }
                }
            }
        }
        o
    }

    pub fn incident(&self, point: &str, line: &str) -> bool {
        self.lines.get(line).is_some_and(|s| s.contains(point))
    }

    pub fn census(&self, max_stage: u32) -> Vec<(u32, usize, usize)> {
        (0..=max_stage)
            .map(|st| {
                let pts = self.elements.values().filter(|&&(s, l)| s == st && !l).count();
                let lns = self.elements.values().filter(|&&(s, l)| s == st && l).count();
                (st, pts, lns)
            })
            .collect()
    }
}
