//! Permutation equivalence of modular data, canonical keys and the rank
//! statistics of a collection of datasets.
//!
//! Both the isomorphism search and the canonical labelling work on the
//! matrices directly: vertices are simple objects, vertex colours come from
//! `T`, edge colours are the exact entries of `S`. Colours are refined to an
//! equitable partition and the search branches by individualising one vertex
//! of the first smallest non-singleton cell.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::hash::{DefaultHasher, Hash, Hasher};

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::Cyclotomic;
use crate::error::EquivalenceError;
use crate::modular::{Matrix, ModularData};

/// `perm[i]` is the index in the second dataset matched with `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermutationWitness {
    pub perm: Vec<usize>,
}

impl PermutationWitness {
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect() }
    }

    /// `T′[π i] = T[i]` and `S′[π i][π j] = S[i][j]` for all `i, j`.
    pub fn verify(&self, s1: &Matrix, t1: &[Cyclotomic], s2: &Matrix, t2: &[Cyclotomic]) -> bool {
        let p = &self.perm;
        let n = t1.len();
        p.len() == n
            && t2.len() == n
            && (0..n).all(|i| t2[p[i]] == t1[i])
            && (0..n).all(|i| (0..n).all(|j| s2[p[i]][p[j]] == s1[i][j]))
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.perm.len()];
        for (i, &j) in self.perm.iter().enumerate() {
            inv[j] = i;
        }
        Self { perm: inv }
    }

    /// First `self`, then `other`.
    pub fn then(&self, other: &Self) -> Self {
        Self { perm: self.perm.iter().map(|&j| other.perm[j]).collect() }
    }
}

pub fn t_equivalent(t1: &[Cyclotomic], t2: &[Cyclotomic]) -> Result<bool, EquivalenceError> {
    if t1.len() != t2.len() {
        return Err(EquivalenceError::LengthMismatch(t1.len(), t2.len()));
    }
    Ok(sorted_t(t1) == sorted_t(t2))
}

fn sorted_t(t: &[Cyclotomic]) -> Vec<Cyclotomic> {
    let mut v: Vec<Cyclotomic> = t.iter().map(Cyclotomic::normalized).collect();
    v.sort_by(Cyclotomic::cmp_repr);
    v
}

// ---------------------------------------------------------------------------
// Coloured structures
// ---------------------------------------------------------------------------

/// Distinct values in canonical order, with every entry replaced by its rank.
struct Interner {
    values: Vec<Cyclotomic>,
}

impl Interner {
    fn new<'a>(entries: impl Iterator<Item = &'a Cyclotomic>) -> Self {
        let mut values: Vec<Cyclotomic> = entries.map(Cyclotomic::normalized).collect();
        values.sort_by(Cyclotomic::cmp_repr);
        values.dedup_by(|a, b| a.cmp_repr(b) == Ordering::Equal);
        Self { values }
    }

    fn id(&self, x: &Cyclotomic) -> u32 {
        let x = x.normalized();
        self.values.binary_search_by(|v| v.cmp_repr(&x)).expect("interned value") as u32
    }
}

struct Graph {
    n: usize,
    t: Vec<u32>,
    s: Vec<u32>,
}

impl Graph {
    fn new(s: &Matrix, t: &[Cyclotomic], interner: &Interner) -> Self {
        let n = t.len();
        Self {
            n,
            t: t.iter().map(|x| interner.id(x)).collect(),
            s: s.iter().flatten().map(|x| interner.id(x)).collect(),
        }
    }

    fn edge(&self, i: usize, j: usize) -> u32 {
        self.s[i * self.n + j]
    }
}

/// Vertex colours `0..cells`, ordered canonically.
#[derive(Clone)]
struct Colouring {
    colour: Vec<u32>,
    cells: usize,
}

impl Colouring {
    fn is_discrete(&self) -> bool {
        self.cells == self.colour.len()
    }

    /// First smallest non-singleton cell, as its colour.
    fn target_cell(&self) -> u32 {
        let mut sizes = vec![0usize; self.cells];
        for &c in &self.colour {
            sizes[c as usize] += 1;
        }
        let min = sizes.iter().copied().filter(|&s| s > 1).min().expect("non-discrete");
        sizes.iter().position(|&s| s == min).expect("cell exists") as u32
    }

    fn members(&self, cell: u32) -> Vec<usize> {
        (0..self.colour.len()).filter(|&v| self.colour[v] == cell).collect()
    }

    /// Vertices in colour order; only meaningful when discrete.
    fn order(&self) -> Vec<usize> {
        let mut order = vec![0; self.colour.len()];
        for (v, &c) in self.colour.iter().enumerate() {
            order[c as usize] = v;
        }
        order
    }
}

/// Replaces every signature by its rank among the distinct signatures.
fn rank_signatures<K: Ord + Clone + Hash>(sigs: &[K], hasher: &mut DefaultHasher) -> Colouring {
    let distinct: Vec<K> = sigs.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    distinct.hash(hasher);
    let colour = sigs.iter().map(|k| distinct.binary_search(k).expect("present") as u32).collect();
    Colouring { colour, cells: distinct.len() }
}

fn initial_colouring(g: &Graph, hasher: &mut DefaultHasher) -> Colouring {
    let sigs: Vec<(u32, u32, Vec<u32>)> = (0..g.n)
        .map(|v| {
            let mut row: Vec<u32> = (0..g.n).map(|u| g.edge(v, u)).collect();
            row.sort_unstable();
            (g.t[v], g.edge(v, v), row)
        })
        .collect();
    rank_signatures(&sigs, hasher)
}

/// Refines to the coarsest equitable partition below `c`; returns it with a
/// hash of everything seen on the way, which is a labelling invariant.
fn refine(g: &Graph, mut c: Colouring, hasher: &mut DefaultHasher) -> (Colouring, u64) {
    loop {
        let sigs: Vec<(u32, Vec<(u32, u32)>)> = (0..g.n)
            .map(|v| {
                let mut nb: Vec<(u32, u32)> = (0..g.n).map(|u| (g.edge(v, u), c.colour[u])).collect();
                nb.sort_unstable();
                (c.colour[v], nb)
            })
            .collect();
        let next = rank_signatures(&sigs, hasher);
        let stable = next.cells == c.cells;
        c = next;
        if stable {
            c.cells.hash(hasher);
            return (c, hasher.finish());
        }
    }
}

fn individualize(c: &Colouring, v: usize) -> Colouring {
    let cell = c.colour[v];
    let colour = c
        .colour
        .iter()
        .enumerate()
        .map(|(u, &x)| if x > cell || (x == cell && u != v) { x + 1 } else { x })
        .collect();
    Colouring { colour, cells: c.cells + 1 }
}

fn root(g: &Graph) -> (Colouring, u64) {
    let mut h = DefaultHasher::new();
    let c = initial_colouring(g, &mut h);
    refine(g, c, &mut h)
}

fn child(g: &Graph, c: &Colouring, v: usize) -> (Colouring, u64) {
    let mut h = DefaultHasher::new();
    refine(g, individualize(c, v), &mut h)
}

// ---------------------------------------------------------------------------
// Isomorphism search
// ---------------------------------------------------------------------------

/// Simultaneous permutation equivalence; the witness is checked entrywise.
pub fn st_equivalent(
    s1: &Matrix,
    t1: &[Cyclotomic],
    s2: &Matrix,
    t2: &[Cyclotomic],
) -> Result<Option<PermutationWitness>, EquivalenceError> {
    let n = t1.len();
    if t2.len() != n || s1.len() != n || s2.len() != n {
        return Err(EquivalenceError::LengthMismatch(n, t2.len()));
    }
    if !t_equivalent(t1, t2)? {
        return Ok(None);
    }
    if n == 0 {
        return Ok(Some(PermutationWitness::identity(0)));
    }
    let interner = Interner::new(s1.iter().flatten().chain(s2.iter().flatten()).chain(t1).chain(t2));
    let (ga, gb) = (Graph::new(s1, t1, &interner), Graph::new(s2, t2, &interner));
    let (ca, ha) = root(&ga);
    let (cb, hb) = root(&gb);
    if ha != hb || ca.cells != cb.cells {
        return Ok(None);
    }
    let found = iso_search(&ga, &gb, &ca, &cb).map(|perm| PermutationWitness { perm });
    if let Some(w) = &found {
        assert!(w.verify(s1, t1, s2, t2), "isomorphism witness failed re-verification");
    }
    Ok(found)
}

fn iso_search(ga: &Graph, gb: &Graph, ca: &Colouring, cb: &Colouring) -> Option<Vec<usize>> {
    if ca.is_discrete() {
        let (oa, ob) = (ca.order(), cb.order());
        let mut perm = vec![0; ga.n];
        for (p, &v) in oa.iter().enumerate() {
            perm[v] = ob[p];
        }
        let ok = (0..ga.n).all(|i| ga.t[i] == gb.t[perm[i]] && (0..ga.n).all(|j| ga.edge(i, j) == gb.edge(perm[i], perm[j])));
        return ok.then_some(perm);
    }
    let cell = ca.target_cell();
    let v = ca.members(cell)[0];
    let (na, ha) = child(ga, ca, v);
    for w in cb.members(cell) {
        let (nb, hb) = child(gb, cb, w);
        if ha == hb && na.cells == nb.cells {
            if let Some(p) = iso_search(ga, gb, &na, &nb) {
                return Some(p);
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Canonical form
// ---------------------------------------------------------------------------

/// A canonical relabelling: `order[p]` is the object placed at position `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub order: Vec<usize>,
    pub key: Vec<u8>,
}

struct Leaf {
    traces: Vec<u64>,
    cert: Vec<u32>,
    order: Vec<usize>,
}

struct Canon<'a> {
    g: &'a Graph,
    best: Option<Leaf>,
    automorphisms: Vec<Vec<usize>>,
}

impl Canon<'_> {
    fn certificate(&self, order: &[usize]) -> Vec<u32> {
        let g = self.g;
        let mut cert: Vec<u32> = order.iter().map(|&v| g.t[v]).collect();
        for &i in order {
            cert.extend(order.iter().map(|&j| g.edge(i, j)));
        }
        cert
    }

    fn search(&mut self, c: &Colouring, traces: &mut Vec<u64>, prefix: &mut Vec<usize>) {
        if let Some(best) = &self.best {
            let k = traces.len().min(best.traces.len());
            if traces[..k] > best.traces[..k] {
                return;
            }
        }
        if c.is_discrete() {
            self.leaf(c, traces);
            return;
        }
        let cell = c.target_cell();
        let mut explored: Vec<usize> = Vec::new();
        for w in c.members(cell) {
            if !explored.is_empty() && self.same_orbit_as_any(prefix, w, &explored) {
                continue;
            }
            explored.push(w);
            let (next, h) = child(self.g, c, w);
            traces.push(h);
            prefix.push(w);
            self.search(&next, traces, prefix);
            prefix.pop();
            traces.pop();
        }
    }

    fn leaf(&mut self, c: &Colouring, traces: &[u64]) {
        let order = c.order();
        let cert = self.certificate(&order);
        let Some(best) = &self.best else {
            self.best = Some(Leaf { traces: traces.to_vec(), cert, order });
            return;
        };
        match (traces, &cert).cmp(&(&best.traces[..], &best.cert)) {
            Ordering::Less => self.best = Some(Leaf { traces: traces.to_vec(), cert, order }),
            Ordering::Equal => {
                // both labellings give the same matrices: their composite is an automorphism
                let mut gamma = vec![0; order.len()];
                for (p, &v) in order.iter().enumerate() {
                    gamma[v] = best.order[p];
                }
                if gamma.iter().enumerate().any(|(i, &j)| i != j) {
                    self.automorphisms.push(gamma);
                }
            }
            Ordering::Greater => {}
        }
    }

    /// Whether `w` lies in the orbit of an explored sibling under the
    /// automorphisms found so far that fix `prefix` pointwise.
    fn same_orbit_as_any(&self, prefix: &[usize], w: usize, explored: &[usize]) -> bool {
        let n = self.g.n;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for gamma in self.automorphisms.iter().filter(|g| prefix.iter().all(|&v| g[v] == v)) {
            for (i, &j) in gamma.iter().enumerate() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let rw = find(&mut parent, w);
        explored.iter().any(|&x| find(&mut parent, x) == rw)
    }
}

/// Canonical labelling of `(S, T)`; equal keys exactly for equivalent data.
pub fn canonical_form(s: &Matrix, t: &[Cyclotomic]) -> CanonicalForm {
    let interner = Interner::new(s.iter().flatten().chain(t));
    let g = Graph::new(s, t, &interner);
    let mut key = String::new();
    for v in &interner.values {
        write!(key, "{};", v.canonical_string()).expect("string write");
    }
    key.push('|');
    if g.n == 0 {
        return CanonicalForm { order: vec![], key: key.into_bytes() };
    }
    let (c, h) = root(&g);
    let mut canon = Canon { g: &g, best: None, automorphisms: Vec::new() };
    canon.search(&c, &mut vec![h], &mut Vec::new());
    let best = canon.best.expect("at least one leaf");
    for x in &best.cert {
        write!(key, "{x},").expect("string write");
    }
    CanonicalForm { order: best.order, key: key.into_bytes() }
}

pub fn canonical_key(s: &Matrix, t: &[Cyclotomic]) -> Vec<u8> {
    canonical_form(s, t).key
}

/// The smallest canonical key over all Galois conjugates of the data.
pub fn galois_key(s: &Matrix, t: &[Cyclotomic]) -> Vec<u8> {
    let n = t.iter().chain(s.iter().flatten()).fold(1u32, |acc, x| acc.lcm(&x.conductor())) as i64;
    (1..=n)
        .filter(|k| k.gcd(&n) == 1)
        .map(|k| {
            let sigma = |x: &Cyclotomic| x.galois(k % x.conductor() as i64).expect("coprime");
            let s2: Matrix = s.iter().map(|row| row.iter().map(sigma).collect()).collect();
            let t2: Vec<Cyclotomic> = t.iter().map(sigma).collect();
            canonical_key(&s2, &t2)
        })
        .min()
        .unwrap_or_default()
}

/// Short printable digest of a key.
pub fn key_digest(key: &[u8]) -> String {
    let mut h = DefaultHasher::new();
    key.hash(&mut h);
    format!("{:016x}", h.finish())
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bucket {
    pub order: usize,
    pub rank: usize,
    pub key: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankRow {
    pub rank: usize,
    pub orbit_count: usize,
    pub st_count: usize,
    pub t_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub galois_count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderRow {
    pub order: usize,
    pub groups: usize,
    pub ranks: Vec<RankRow>,
}

impl OrderRow {
    /// Number of datasets: an upper bound on the Morita classes.
    pub fn upper_bound(&self) -> usize {
        self.ranks.iter().map(|r| r.orbit_count).sum()
    }

    /// Number of (S,T)-classes: a lower bound on the Morita classes.
    pub fn lower_bound(&self) -> usize {
        self.ranks.iter().map(|r| r.st_count).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivClassReport {
    pub orders: Vec<OrderRow>,
    pub buckets: Vec<Bucket>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderSummary {
    pub order: usize,
    pub groups: usize,
    pub ranks: Vec<usize>,
    pub orbit_counts: Vec<usize>,
    pub st_counts: Vec<usize>,
    pub t_counts: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub galois_counts: Option<Vec<usize>>,
    pub upper_bound: usize,
    pub lower_bound: usize,
}

impl EquivClassReport {
    pub fn order(&self, n: usize) -> Option<&OrderRow> {
        self.orders.iter().find(|r| r.order == n)
    }

    pub fn summaries(&self) -> Vec<OrderSummary> {
        self.orders
            .iter()
            .map(|o| OrderSummary {
                order: o.order,
                groups: o.groups,
                ranks: o.ranks.iter().map(|r| r.rank).collect(),
                orbit_counts: o.ranks.iter().map(|r| r.orbit_count).collect(),
                st_counts: o.ranks.iter().map(|r| r.st_count).collect(),
                t_counts: o.ranks.iter().map(|r| r.t_count).collect(),
                galois_counts: o.ranks.iter().map(|r| r.galois_count).collect(),
                upper_bound: o.upper_bound(),
                lower_bound: o.lower_bound(),
            })
            .collect()
    }

    /// The rank distribution table.
    pub fn rank_table(&self) -> String {
        let join = |v: Vec<usize>| v.iter().map(usize::to_string).collect::<Vec<_>>().join(", ");
        let galois = self.orders.iter().any(|o| o.ranks.iter().any(|r| r.galois_count.is_some()));
        let mut out = String::from("# T-only classes are counted per (order, rank), pooled over groups\n");
        write!(out, "{:<5} {:<12} {:<12} {:<14} {:<12}", "|G|", "ranks", "datasets", "(S,T)-classes", "T-classes").unwrap();
        if galois {
            write!(out, " {:<12}", "mod Galois").unwrap();
        }
        out.push('\n');
        for o in &self.orders {
            write!(
                out,
                "{:<5} {:<12} {:<12} {:<14} {:<12}",
                o.order,
                join(o.ranks.iter().map(|r| r.rank).collect()),
                join(o.ranks.iter().map(|r| r.orbit_count).collect()),
                join(o.ranks.iter().map(|r| r.st_count).collect()),
                join(o.ranks.iter().map(|r| r.t_count).collect()),
            )
            .unwrap();
            if galois {
                write!(out, " {:<12}", join(o.ranks.iter().filter_map(|r| r.galois_count).collect())).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Groups per order with the two bounds on Morita classes.
    pub fn bounds_table(&self) -> String {
        let mut out = format!("{:<5} {:<8} {:<7} {:<7}\n", "|G|", "groups", "upper", "lower");
        for o in &self.orders {
            writeln!(out, "{:<5} {:<8} {:<7} {:<7}", o.order, o.groups, o.upper_bound(), o.lower_bound()).unwrap();
        }
        out
    }
}

impl fmt::Display for EquivClassReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\n{}", self.rank_table(), self.bounds_table())
    }
}

/// Buckets datasets by canonical key and tallies classes per order and rank.
pub fn classify(datasets: &[ModularData], modulo_galois: bool) -> EquivClassReport {
    let keys: Vec<(Vec<u8>, Vec<Cyclotomic>, Option<Vec<u8>>)> = datasets
        .par_iter()
        .map(|d| {
            let key = canonical_key(&d.s, &d.t);
            let galois = modulo_galois.then(|| galois_key(&d.s, &d.t));
            (key, sorted_t(&d.t), galois)
        })
        .collect();
    let mut by_rank: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let mut groups: BTreeMap<usize, BTreeSet<&str>> = BTreeMap::new();
    for (i, d) in datasets.iter().enumerate() {
        by_rank.entry((d.order, d.rank)).or_default().push(i);
        groups.entry(d.order).or_default().insert(&d.group);
    }
    let mut orders: Vec<OrderRow> = Vec::new();
    let mut buckets = Vec::new();
    for ((order, rank), members) in by_rank {
        let mut st: BTreeMap<&[u8], Vec<String>> = BTreeMap::new();
        let mut t_classes: Vec<&Vec<Cyclotomic>> = Vec::new();
        let mut galois: BTreeSet<&[u8]> = BTreeSet::new();
        for &i in &members {
            st.entry(&keys[i].0).or_default().push(datasets[i].id());
            if !t_classes.contains(&&keys[i].1) {
                t_classes.push(&keys[i].1);
            }
            if let Some(g) = &keys[i].2 {
                galois.insert(g);
            }
        }
        let row = RankRow {
            rank,
            orbit_count: members.len(),
            st_count: st.len(),
            t_count: t_classes.len(),
            galois_count: modulo_galois.then_some(galois.len()),
        };
        for (key, ids) in st {
            buckets.push(Bucket { order, rank, key: key_digest(key), members: ids });
        }
        match orders.last_mut() {
            Some(o) if o.order == order => o.ranks.push(row),
            _ => orders.push(OrderRow { order, groups: groups[&order].len(), ranks: vec![row] }),
        }
    }
    EquivClassReport { orders, buckets }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{orbit_representatives, Cocycle3, DEFAULT_H3_BOUND};
    use crate::group::{build_group, catalog};
    use crate::modular::Strategy;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn c(x: i64) -> Cyclotomic {
        Cyclotomic::from_integer(x)
    }

    fn data(max_order: usize) -> Vec<ModularData> {
        let mut out = Vec::new();
        for n in 1..=max_order {
            for name in catalog(n).unwrap() {
                let g = build_group(name).unwrap();
                let (_, orbits) = orbit_representatives(&g, DEFAULT_H3_BOUND).unwrap();
                for o in orbits {
                    out.push(ModularData::compute(&o.cocycle, o.representative, Strategy::Auto, 0).unwrap());
                }
            }
        }
        out
    }

    fn permuted(md: &ModularData, perm: &[usize]) -> (Matrix, Vec<Cyclotomic>) {
        let n = md.rank;
        let mut s = vec![vec![Cyclotomic::zero(); n]; n];
        let mut t = vec![Cyclotomic::zero(); n];
        for i in 0..n {
            t[perm[i]] = md.t[i].clone();
            for j in 0..n {
                s[perm[i]][perm[j]] = md.s[i][j].clone();
            }
        }
        (s, t)
    }

    #[test]
    fn t_examples() {
        assert!(t_equivalent(&[c(1), c(-1)], &[c(-1), c(1)]).unwrap());
        let i = Cyclotomic::root_of_unity(4, 1);
        assert!(!t_equivalent(&[c(1), c(1), c(1), c(-1)], &[c(1), c(1), i.clone(), -&i]).unwrap());
        assert!(t_equivalent(&[], &[]).unwrap());
        assert_eq!(t_equivalent(&[c(1)], &[]), Err(EquivalenceError::LengthMismatch(1, 0)));
    }

    #[test]
    fn witnesses_and_keys_on_permuted_copies() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for md in data(6) {
            let w = st_equivalent(&md.s, &md.t, &md.s, &md.t).unwrap().unwrap();
            assert!(w.verify(&md.s, &md.t, &md.s, &md.t));
            let key = canonical_key(&md.s, &md.t);
            for _ in 0..3 {
                let mut perm: Vec<usize> = (0..md.rank).collect();
                perm.shuffle(&mut rng);
                let (s2, t2) = permuted(&md, &perm);
                let w = st_equivalent(&md.s, &md.t, &s2, &t2).unwrap().expect("permuted copy is equivalent");
                assert!(w.verify(&md.s, &md.t, &s2, &t2));
                let back = st_equivalent(&s2, &t2, &md.s, &md.t).unwrap().unwrap();
                assert!(back.verify(&s2, &t2, &md.s, &md.t));
                assert!(w.then(&back).verify(&md.s, &md.t, &md.s, &md.t));
                assert_eq!(canonical_key(&s2, &t2), key, "{} {:?}", md.group, md.class_vector);
            }
        }
    }

    #[test]
    fn keys_agree_with_search_on_all_pairs() {
        let all = data(6);
        let keys: Vec<Vec<u8>> = all.iter().map(|d| canonical_key(&d.s, &d.t)).collect();
        for i in 0..all.len() {
            for j in 0..all.len() {
                if all[i].rank != all[j].rank {
                    continue;
                }
                let found = st_equivalent(&all[i].s, &all[i].t, &all[j].s, &all[j].t).unwrap();
                assert_eq!(found.is_some(), keys[i] == keys[j], "{} vs {}", all[i].id(), all[j].id());
            }
        }
    }

    #[test]
    fn c2_centres_differ() {
        let g = Arc::new(build_group("C2").unwrap());
        let toric = ModularData::compute(&Cocycle3::trivial(g.clone()), vec![0], Strategy::Direct, 0).unwrap();
        let semion = ModularData::compute(&Cocycle3::new(g, 2, vec![0, 0, 0, 0, 0, 0, 0, 1]).unwrap(), vec![1], Strategy::Direct, 0).unwrap();
        assert!(st_equivalent(&toric.s, &toric.t, &semion.s, &semion.t).unwrap().is_none());
        assert_ne!(canonical_key(&toric.s, &toric.t), canonical_key(&semion.s, &semion.t));
        let one = canonical_form(&vec![vec![c(1)]], &[c(1)]);
        assert_eq!(one.order, vec![0]);
    }

    #[test]
    fn classify_small_orders() {
        let report = classify(&data(4), false);
        let row = |n: usize| {
            let o = report.order(n).unwrap();
            o.ranks.iter().map(|r| (r.rank, r.orbit_count, r.st_count, r.t_count)).collect::<Vec<_>>()
        };
        assert_eq!(row(2), vec![(4, 2, 2, 2)]);
        assert_eq!(row(3), vec![(9, 3, 3, 3)]);
        assert_eq!(row(4), vec![(16, 8, 7, 7)]);
        let total: usize = report.buckets.iter().map(|b| b.members.len()).sum();
        assert_eq!(total, data(4).len());
        assert!(report.rank_table().contains("16"));
        let empty = classify(&[], false);
        assert!(empty.orders.is_empty());
    }
}
