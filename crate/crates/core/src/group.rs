//! Finite groups stored as explicit multiplication tables.
//!
//! Elements are `usize` indices with the identity at index 0. Every derived
//! structure (conjugacy classes, centralizers, automorphisms) is produced in a
//! deterministic order so that downstream output is reproducible.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::GroupError;

/// Upper bound on the group order accepted by [`FiniteGroup::automorphisms`].
pub const DEFAULT_AUT_BOUND: usize = 16;

/// A finite group given by its full multiplication table.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<u32>,
    inverses: Vec<u32>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.name)
            .field("order", &self.order)
            .finish()
    }
}

/// On-disk representation of a group table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupFile {
    pub name: String,
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

impl FiniteGroup {
    /// Validates `table` eagerly and builds the group.
    pub fn from_table(table: &[Vec<usize>], name: impl Into<String>) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::Empty);
        }
        for (row_idx, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::RaggedTable { row: row_idx, len: row.len(), order: n });
            }
            if let Some(&bad) = row.iter().find(|&&v| v >= n) {
                return Err(GroupError::IndexOutOfRange { index: bad, order: n });
            }
        }
        for g in 0..n {
            if table[0][g] != g || table[g][0] != g {
                return Err(GroupError::NoIdentityAtZero { element: g });
            }
        }
        let mut seen = vec![false; n];
        for (r, row) in table.iter().enumerate() {
            seen.iter_mut().for_each(|s| *s = false);
            for &v in row {
                if std::mem::replace(&mut seen[v], true) {
                    return Err(GroupError::NotLatinSquare { line: format!("row {r}") });
                }
            }
        }
        for c in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            for row in table {
                if std::mem::replace(&mut seen[row[c]], true) {
                    return Err(GroupError::NotLatinSquare { line: format!("column {c}") });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(GroupError::NotAssociative { a, b, c });
                    }
                }
            }
        }
        let flat: Vec<u32> = table.iter().flatten().map(|&v| v as u32).collect();
        Ok(Self::from_flat_unchecked(flat, n, name.into()))
    }

    /// Builds a group from a row-major table that is already known to be a
    /// group table (products, extensions, catalog constructions).
    pub(crate) fn from_flat_unchecked(table: Vec<u32>, order: usize, name: String) -> Self {
        debug_assert_eq!(table.len(), order * order);
        let mut inverses = vec![0u32; order];
        for g in 0..order {
            let row = &table[g * order..(g + 1) * order];
            let h = row.iter().position(|&v| v == 0).expect("latin square row");
            inverses[g] = h as u32;
        }
        Self { name, order, table, inverses }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a] as usize
    }

    /// `x g x⁻¹`.
    #[inline]
    pub fn conj(&self, x: usize, g: usize) -> usize {
        self.mul(self.mul(x, g), self.inv(x))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|a| (0..self.order).map(|b| self.mul(a, b)).collect())
            .collect()
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile { name: self.name.clone(), order: self.order, table: self.table() }
    }

    pub fn from_file(file: &GroupFile) -> Result<Self, GroupError> {
        if file.order != file.table.len() {
            return Err(GroupError::RaggedTable { row: 0, len: file.table.len(), order: file.order });
        }
        Self::from_table(&file.table, file.name.clone())
    }

    pub fn load(path: &Path) -> Result<Self, GroupError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GroupError::Io { path: path.display().to_string(), source: e })?;
        let file: GroupFile = serde_json::from_str(&text)
            .map_err(|e| GroupError::Parse { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_file(&file)
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        self.elements()
            .map(|g| self.element_order(g))
            .fold(1, num_integer::lcm)
    }

    pub fn pow(&self, g: usize, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.mul(acc, g))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn commute(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    /// Conjugacy classes ordered by representative, the identity class first.
    ///
    /// The representative of each class is its minimal index. For a member
    /// `g` the witness `a_g` is the inverse of the first `x` (by index) with
    /// `x a x⁻¹ = g`, so that `a_g g a_g⁻¹ = a`.
    pub fn conjugacy_classes(&self) -> Vec<ConjClass> {
        let n = self.order;
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for a in 0..n {
            if class_of[a] != usize::MAX {
                continue;
            }
            let idx = classes.len();
            let mut members = Vec::new();
            let mut witnesses = Vec::new();
            for x in 0..n {
                let g = self.conj(x, a);
                if class_of[g] == usize::MAX {
                    class_of[g] = idx;
                    members.push(g);
                    witnesses.push(self.inv(x));
                }
            }
            let mut paired: Vec<(usize, usize)> = members.into_iter().zip(witnesses).collect();
            paired.sort_unstable();
            let (members, witnesses) = paired.into_iter().unzip();
            classes.push(ConjClass { representative: a, members, witnesses });
        }
        classes
    }

    /// Index of the conjugacy class containing each element.
    pub fn class_map(classes: &[ConjClass], order: usize) -> Vec<usize> {
        let mut map = vec![0; order];
        for (i, class) in classes.iter().enumerate() {
            for &g in &class.members {
                map[g] = i;
            }
        }
        map
    }

    pub fn centralizer(&self, a: usize) -> Result<Subgroup, GroupError> {
        if a >= self.order {
            return Err(GroupError::IndexOutOfRange { index: a, order: self.order });
        }
        let elements: Vec<usize> = self.elements().filter(|&g| self.commute(a, g)).collect();
        Ok(Subgroup::new(self, elements, format!("C({a})")))
    }

    /// Smallest subgroup containing `gens`, as a sorted element list.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut in_sub = vec![false; self.order];
        in_sub[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(g) = queue.pop_front() {
            for &s in gens {
                let h = self.mul(g, s);
                if !in_sub[h] {
                    in_sub[h] = true;
                    queue.push_back(h);
                }
            }
        }
        (0..self.order).filter(|&g| in_sub[g]).collect()
    }

    /// Lexicographically first generating set of minimum size.
    pub fn minimal_generating_set(&self) -> Vec<usize> {
        fn search(g: &FiniteGroup, size: usize, next: usize, chosen: &mut Vec<usize>) -> bool {
            if chosen.len() == size {
                return g.generated_subgroup(chosen).len() == g.order();
            }
            for x in next..g.order() {
                chosen.push(x);
                if search(g, size, x + 1, chosen) {
                    return true;
                }
                chosen.pop();
            }
            false
        }
        let mut chosen = Vec::new();
        for size in 0..self.order {
            if search(self, size, 1, &mut chosen) {
                return chosen;
            }
        }
        unreachable!("the non-identity elements generate the group")
    }

    /// All automorphisms, found by backtracking over images of a minimal
    /// generating set. The identity automorphism comes first; the rest are
    /// sorted by their element maps.
    pub fn automorphisms(&self) -> Result<Vec<Automorphism>, GroupError> {
        self.automorphisms_bounded(DEFAULT_AUT_BOUND)
    }

    pub fn automorphisms_bounded(&self, bound: usize) -> Result<Vec<Automorphism>, GroupError> {
        if self.order > bound {
            return Err(GroupError::OrderBoundExceeded { order: self.order, bound });
        }
        let gens = self.minimal_generating_set();
        let orders: Vec<usize> = self.elements().map(|g| self.element_order(g)).collect();
        let candidates: Vec<Vec<usize>> = gens
            .iter()
            .map(|&s| self.elements().filter(|&g| orders[g] == orders[s]).collect())
            .collect();
        let mut found = Vec::new();
        let mut images = vec![0usize; gens.len()];
        self.extend_images(&gens, &candidates, &mut images, 0, &mut found);
        found.sort_unstable_by(|a: &Automorphism, b| a.map.cmp(&b.map));
        Ok(found)
    }

    fn extend_images(
        &self,
        gens: &[usize],
        candidates: &[Vec<usize>],
        images: &mut Vec<usize>,
        depth: usize,
        found: &mut Vec<Automorphism>,
    ) {
        if depth == gens.len() {
            if let Some(map) = self.homomorphism_from_images(gens, images) {
                found.push(Automorphism { map });
            }
            return;
        }
        for &c in &candidates[depth] {
            images[depth] = c;
            self.extend_images(gens, candidates, images, depth + 1, found);
        }
    }

    /// Extends generator images to a bijective homomorphism if one exists.
    fn homomorphism_from_images(&self, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
        let n = self.order;
        let mut map = vec![usize::MAX; n];
        map[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(g) = queue.pop_front() {
            for (&s, &t) in gens.iter().zip(images) {
                let h = self.mul(g, s);
                let img = self.mul(map[g], t);
                if map[h] == usize::MAX {
                    map[h] = img;
                    queue.push_back(h);
                } else if map[h] != img {
                    return None;
                }
            }
        }
        let mut hit = vec![false; n];
        for &m in &map {
            if m == usize::MAX || std::mem::replace(&mut hit[m], true) {
                return None;
            }
        }
        Some(map)
    }

    /// Direct product with index `(g, h) ↦ g·|H| + h`.
    pub fn direct_product(&self, other: &FiniteGroup) -> FiniteGroup {
        let (n, m) = (self.order, other.order);
        let order = n * m;
        let mut table = Vec::with_capacity(order * order);
        for a in 0..order {
            let (g1, h1) = (a / m, a % m);
            for b in 0..order {
                let (g2, h2) = (b / m, b % m);
                table.push((self.mul(g1, g2) * m + other.mul(h1, h2)) as u32);
            }
        }
        FiniteGroup::from_flat_unchecked(table, order, format!("{}x{}", self.name, other.name))
    }

    /// Sorted multiset of element orders; an isomorphism invariant.
    pub fn order_statistics(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.elements().map(|g| self.element_order(g)).collect();
        v.sort_unstable();
        v
    }
}

/// A conjugacy class with representative `a` and, for every member `g`, a
/// witness `a_g` with `a = a_g g a_g⁻¹`. Members are sorted by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjClass {
    pub representative: usize,
    pub members: Vec<usize>,
    pub witnesses: Vec<usize>,
}

impl ConjClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn witness(&self, g: usize) -> Option<usize> {
        self.members.binary_search(&g).ok().map(|i| self.witnesses[i])
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.binary_search(&g).is_ok()
    }
}

/// A subgroup together with its re-indexed group structure.
#[derive(Debug, Clone)]
pub struct Subgroup {
    elements: Vec<usize>,
    local: Vec<Option<usize>>,
    group: FiniteGroup,
}

impl Subgroup {
    /// `elements` must be a sorted, closed subset containing the identity.
    pub(crate) fn new(parent: &FiniteGroup, elements: Vec<usize>, name: String) -> Self {
        let mut local = vec![None; parent.order()];
        for (i, &g) in elements.iter().enumerate() {
            local[g] = Some(i);
        }
        let k = elements.len();
        let mut table = Vec::with_capacity(k * k);
        for &a in &elements {
            for &b in &elements {
                let ab = local[parent.mul(a, b)].expect("subgroup closed under multiplication");
                table.push(ab as u32);
            }
        }
        let group = FiniteGroup::from_flat_unchecked(table, k, name);
        Self { elements, local, group }
    }

    /// Parent indices, sorted; the identity is first.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn as_group(&self) -> &FiniteGroup {
        &self.group
    }

    /// Local index → parent index.
    pub fn embed(&self, local: usize) -> usize {
        self.elements[local]
    }

    /// Parent index → local index, if the element lies in the subgroup.
    pub fn local_index(&self, g: usize) -> Option<usize> {
        self.local.get(g).copied().flatten()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.local_index(g).is_some()
    }
}

/// A group automorphism as a permutation of element indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Automorphism {
    pub map: Vec<usize>,
}

impl Automorphism {
    pub fn identity(order: usize) -> Self {
        Self { map: (0..order).collect() }
    }

    #[inline]
    pub fn apply(&self, g: usize) -> usize {
        self.map[g]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism { map: other.map.iter().map(|&g| self.map[g]).collect() }
    }

    pub fn inverse(&self) -> Automorphism {
        let mut map = vec![0; self.map.len()];
        for (g, &h) in self.map.iter().enumerate() {
            map[h] = g;
        }
        Automorphism { map }
    }

    pub fn is_automorphism_of(&self, group: &FiniteGroup) -> bool {
        let n = group.order();
        if self.map.len() != n || self.map[0] != 0 {
            return false;
        }
        let mut hit = vec![false; n];
        for &h in &self.map {
            if h >= n || std::mem::replace(&mut hit[h], true) {
                return false;
            }
        }
        (0..n).all(|a| (0..n).all(|b| self.map[group.mul(a, b)] == group.mul(self.map[a], self.map[b])))
    }
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

pub fn cyclic(n: usize) -> FiniteGroup {
    assert!(n >= 1);
    let table = (0..n * n).map(|i| ((i / n + i % n) % n) as u32).collect();
    FiniteGroup::from_flat_unchecked(table, n, format!("C{n}"))
}

/// Dihedral group of order `2n`; element `r^i s^j` has index `i + n j`.
pub fn dihedral(n: usize) -> FiniteGroup {
    assert!(n >= 1);
    let order = 2 * n;
    let mut table = Vec::with_capacity(order * order);
    for a in 0..order {
        let (i, j) = (a % n, a / n);
        for b in 0..order {
            let (k, l) = (b % n, b / n);
            let rot = if j == 0 { (i + k) % n } else { (i + n - k) % n };
            table.push((rot + n * ((j + l) % 2)) as u32);
        }
    }
    FiniteGroup::from_flat_unchecked(table, order, format!("D{n}"))
}

/// Dicyclic group of order `4n`: `⟨a, x | a^{2n}, x² = a^n, x a x⁻¹ = a⁻¹⟩`.
/// Element `a^i x^j` has index `i + 2n j`. `Dic2` is the quaternion group.
pub fn dicyclic(n: usize) -> FiniteGroup {
    assert!(n >= 1);
    let m = 2 * n;
    let order = 2 * m;
    let mut table = Vec::with_capacity(order * order);
    for a in 0..order {
        let (i, j) = (a % m, a / m);
        for b in 0..order {
            let (k, l) = (b % m, b / m);
            let (rot, x) = if j == 0 {
                ((i + k) % m, l)
            } else if l == 0 {
                ((i + m - k) % m, 1)
            } else {
                ((i + m - k + n) % m, 0)
            };
            table.push((rot + m * x) as u32);
        }
    }
    FiniteGroup::from_flat_unchecked(table, order, format!("Dic{n}"))
}

/// Permutations of `0..k` in lexicographic order, optionally only the even ones.
fn permutation_group(k: usize, even_only: bool, name: &str) -> FiniteGroup {
    fn perms(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for first in 0..k {
            for rest in perms(k - 1) {
                let mut p = vec![first];
                p.extend(rest.into_iter().map(|v| if v >= first { v + 1 } else { v }));
                out.push(p);
            }
        }
        out
    }
    fn is_even(p: &[usize]) -> bool {
        let inversions = (0..p.len())
            .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| p[i] > p[j])
            .count();
        inversions % 2 == 0
    }
    let elems: Vec<Vec<usize>> = perms(k).into_iter().filter(|p| !even_only || is_even(p)).collect();
    let index = |p: &Vec<usize>| elems.iter().position(|q| q == p).expect("closed");
    let n = elems.len();
    let mut table = Vec::with_capacity(n * n);
    for p in &elems {
        for q in &elems {
            // (p q)(x) = p(q(x))
            let pq: Vec<usize> = q.iter().map(|&x| p[x]).collect();
            table.push(index(&pq) as u32);
        }
    }
    FiniteGroup::from_flat_unchecked(table, n, name.to_string())
}

pub fn symmetric(k: usize) -> FiniteGroup {
    permutation_group(k, false, &format!("S{k}"))
}

pub fn alternating(k: usize) -> FiniteGroup {
    permutation_group(k, true, &format!("A{k}"))
}

/// Builds a group from a textual spec: `Cn`, `Dn` (order 2n), `Dicn`
/// (order 4n), `Q8`, `S3`, `S4`, `A4`, products `AxB` (left associative) or
/// `@path` to a JSON table file.
pub fn build_group(spec: &str) -> Result<FiniteGroup, GroupError> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix('@') {
        return FiniteGroup::load(Path::new(path));
    }
    let mut factors = spec.split('x').map(build_factor);
    let first = factors.next().ok_or_else(|| GroupError::UnknownSpec(spec.to_string()))??;
    factors.try_fold(first, |acc, f| Ok(acc.direct_product(&f?)))
}

fn build_factor(spec: &str) -> Result<FiniteGroup, GroupError> {
    let unknown = || GroupError::UnknownSpec(spec.to_string());
    let parse_n = |s: &str| s.parse::<usize>().ok().filter(|&n| n >= 1 && n <= 64);
    match spec {
        "Q8" => return Ok(dicyclic(2).with_name("Q8")),
        "S3" => return Ok(symmetric(3)),
        "S4" => return Ok(symmetric(4)),
        "A4" => return Ok(alternating(4)),
        _ => {}
    }
    if let Some(rest) = spec.strip_prefix("Dic") {
        return parse_n(rest).map(dicyclic).ok_or_else(unknown);
    }
    if let Some(rest) = spec.strip_prefix('C') {
        return parse_n(rest).map(cyclic).ok_or_else(unknown);
    }
    if let Some(rest) = spec.strip_prefix('D') {
        return parse_n(rest).map(dihedral).ok_or_else(unknown);
    }
    Err(unknown())
}

/// Every isomorphism type of the given order, as group specs. Orders up to 12.
pub fn catalog(order: usize) -> Option<&'static [&'static str]> {
    Some(match order {
        1 => &["C1"],
        2 => &["C2"],
        3 => &["C3"],
        4 => &["C4", "C2xC2"],
        5 => &["C5"],
        6 => &["C6", "S3"],
        7 => &["C7"],
        8 => &["C8", "C4xC2", "C2xC2xC2", "D4", "Q8"],
        9 => &["C9", "C3xC3"],
        10 => &["C10", "D5"],
        11 => &["C11"],
        12 => &["C12", "C6xC2", "D6", "A4", "Dic3"],
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_classes(g: &FiniteGroup) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for a in g.elements() {
            let mut orbit: Vec<usize> = g.elements().map(|x| g.conj(x, a)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            if !out.contains(&orbit) {
                out.push(orbit);
            }
        }
        out
    }

    fn brute_force_automorphisms(g: &FiniteGroup) -> usize {
        fn rec(g: &FiniteGroup, map: &mut Vec<usize>, used: &mut Vec<bool>, count: &mut usize) {
            let k = map.len();
            if k == g.order() {
                if (Automorphism { map: map.clone() }).is_automorphism_of(g) {
                    *count += 1;
                }
                return;
            }
            for v in 0..g.order() {
                if !used[v] {
                    used[v] = true;
                    map.push(v);
                    rec(g, map, used, count);
                    map.pop();
                    used[v] = false;
                }
            }
        }
        let mut count = 0;
        rec(g, &mut Vec::new(), &mut vec![false; g.order()], &mut count);
        count
    }

    #[test]
    fn table_validation() {
        let trivial = FiniteGroup::from_table(&[vec![0]], "C1").unwrap();
        assert_eq!(trivial.order(), 1);
        let c2 = FiniteGroup::from_table(&[vec![0, 1], vec![1, 0]], "C2").unwrap();
        assert_eq!(c2.inv(1), 1);
        assert!(matches!(
            FiniteGroup::from_table(&[vec![0, 1], vec![1, 1]], "bad"),
            Err(GroupError::NotLatinSquare { .. })
        ));
        assert!(matches!(
            FiniteGroup::from_table(&[vec![1, 0], vec![0, 1]], "bad"),
            Err(GroupError::NoIdentityAtZero { element: 0 })
        ));
        // Latin square with identity that is not associative (order 5 loop).
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(
            FiniteGroup::from_table(&loop5, "loop"),
            Err(GroupError::NotAssociative { .. })
        ));
    }

    #[test]
    fn catalog_groups_are_groups() {
        for order in 1..=12 {
            let specs = catalog(order).unwrap();
            for spec in specs {
                let g = build_group(spec).unwrap();
                assert_eq!(g.order(), order, "{spec}");
                // full re-validation through the checked constructor
                FiniteGroup::from_table(&g.table(), spec.to_string()).unwrap();
            }
            // distinct isomorphism types have distinct invariants here
            let stats: Vec<(bool, Vec<usize>)> = specs
                .iter()
                .map(|s| {
                    let g = build_group(s).unwrap();
                    (g.is_abelian(), g.order_statistics())
                })
                .collect();
            for i in 0..stats.len() {
                for j in 0..i {
                    assert_ne!(stats[i], stats[j], "order {order}");
                }
            }
        }
        assert_eq!(build_group("S4").unwrap().order(), 24);
        assert!(matches!(build_group("Z5"), Err(GroupError::UnknownSpec(_))));
        assert!(matches!(build_group("C0"), Err(GroupError::UnknownSpec(_))));
    }

    #[test]
    fn products() {
        let v4 = build_group("C2xC2").unwrap();
        assert!(v4.is_abelian());
        assert_eq!(v4.order_statistics(), vec![1, 2, 2, 2]);
        let c1g = cyclic(1).direct_product(&dihedral(3));
        assert_eq!(c1g.table(), dihedral(3).table());
        assert_eq!(
            build_group("C2xC3").unwrap().order_statistics(),
            cyclic(6).order_statistics()
        );
        assert_eq!(build_group("C2xC2xC2").unwrap().exponent(), 2);
    }

    #[test]
    fn conjugacy_classes_match_brute_force() {
        for spec in ["C1", "C4", "S3", "D4", "Q8", "A4", "Dic3", "S4", "C2xC2xC2"] {
            let g = build_group(spec).unwrap();
            let classes = g.conjugacy_classes();
            let mut got: Vec<Vec<usize>> = classes.iter().map(|c| c.members.clone()).collect();
            let mut want = brute_force_classes(&g);
            got.sort();
            want.sort();
            assert_eq!(got, want, "{spec}");
            assert_eq!(classes[0].members, vec![0]);
            let total: usize = classes.iter().map(|c| c.size()).sum();
            assert_eq!(total, g.order());
            for c in &classes {
                assert_eq!(g.order() % c.size(), 0);
                assert_eq!(c.representative, c.members[0]);
                assert_eq!(c.witness(c.representative), Some(0));
                for (&m, &w) in c.members.iter().zip(&c.witnesses) {
                    assert_eq!(g.conj(w, m), c.representative);
                }
            }
        }
        let s3: Vec<usize> = build_group("S3").unwrap().conjugacy_classes().iter().map(|c| c.size()).collect();
        assert_eq!(s3, vec![1, 3, 2]);
        assert_eq!(build_group("C4").unwrap().conjugacy_classes().len(), 4);
        assert_eq!(build_group("D4").unwrap().conjugacy_classes().len(), 5);
    }

    #[test]
    fn centralizers() {
        let s3 = build_group("S3").unwrap();
        let c = s3.centralizer(1).unwrap();
        assert_eq!(c.order(), 2);
        assert!(c.contains(1) && c.contains(0));
        assert_eq!(s3.centralizer(0).unwrap().order(), 6);
        let c6 = cyclic(6);
        for a in c6.elements() {
            assert_eq!(c6.centralizer(a).unwrap().order(), 6);
        }
        assert!(matches!(s3.centralizer(6), Err(GroupError::IndexOutOfRange { .. })));
        let d4 = build_group("D4").unwrap();
        for a in d4.elements() {
            let sub = d4.centralizer(a).unwrap();
            let grp = sub.as_group();
            for x in 0..sub.order() {
                for y in 0..sub.order() {
                    assert_eq!(sub.embed(grp.mul(x, y)), d4.mul(sub.embed(x), sub.embed(y)));
                }
            }
            assert_eq!(d4.order() % sub.order(), 0);
        }
    }

    #[test]
    fn automorphism_counts() {
        let count = |s: &str| build_group(s).unwrap().automorphisms().unwrap().len();
        assert_eq!(count("C1"), 1);
        assert_eq!(count("C2"), 1);
        assert_eq!(count("C2xC2"), 6);
        assert_eq!(count("S3"), 6);
        assert_eq!(count("C8"), 4);
        assert_eq!(count("D4"), 8);
        assert_eq!(count("Q8"), 24);
        assert_eq!(count("C2xC2xC2"), 168);
        for spec in ["C2", "C3", "C4", "C2xC2", "C5", "C6", "S3"] {
            let g = build_group(spec).unwrap();
            assert_eq!(g.automorphisms().unwrap().len(), brute_force_automorphisms(&g), "{spec}");
        }
        assert!(matches!(
            build_group("S4").unwrap().automorphisms(),
            Err(GroupError::OrderBoundExceeded { .. })
        ));
    }

    #[test]
    fn automorphisms_form_a_group() {
        for spec in ["S3", "D4", "Q8", "C4xC2"] {
            let g = build_group(spec).unwrap();
            let auts = g.automorphisms().unwrap();
            assert_eq!(auts[0], Automorphism::identity(g.order()));
            for a in &auts {
                assert!(a.is_automorphism_of(&g));
                assert!(auts.contains(&a.inverse()));
                for b in &auts {
                    assert!(auts.contains(&a.compose(b)));
                }
            }
        }
    }

    #[test]
    fn group_file_round_trip() {
        let g = build_group("D4").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d4.json");
        std::fs::write(&path, serde_json::to_string(&g.to_file()).unwrap()).unwrap();
        let loaded = build_group(&format!("@{}", path.display())).unwrap();
        assert_eq!(loaded, g);
        assert!(matches!(
            build_group("@/nonexistent/file.json"),
            Err(GroupError::Io { .. })
        ));
    }
}
