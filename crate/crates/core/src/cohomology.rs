//! Normalized 3-cocycles, the classes of `H³(G, ℂ^×)` and their
//! automorphism orbits, and the derived 2-cocycles `θ_g` and `γ_x`.
//!
//! Cocycles are stored additively: an entry `v` of a cocycle with value
//! order `L` stands for `e^{2πi v/L}`.
//!
//! The class group is computed as `H⁴(G, Z)`, which for a finite group is the
//! torsion of the cokernel of the coboundary `δ³` on normalized integer
//! cochains (its rank part vanishes rationally). A Smith form
//! `U δ³ Q = D` gives, for every invariant factor `d > 1` at position `t`,
//! a rational cochain `Q e_t / d` whose reduction mod `Z` is a
//! `Z_d`-valued cocycle generating that summand. The `t`-th row of `Q⁻¹`
//! reads off the coordinate of an arbitrary cocycle.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CohomologyError, GroupError};
use crate::group::{Automorphism, FiniteGroup, Subgroup};
use crate::snf::column_snf;

/// Default largest group order accepted by [`h3_classes`].
pub const DEFAULT_H3_BOUND: usize = 8;

/// A normalized 3-cocycle `ω: G³ → Z_L`.
#[derive(Clone, PartialEq, Eq)]
pub struct Cocycle3 {
    group: Arc<FiniteGroup>,
    l: u64,
    values: Vec<u32>,
}

impl std::fmt::Debug for Cocycle3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cocycle3")
            .field("group", &self.group.name())
            .field("l", &self.l)
            .finish_non_exhaustive()
    }
}

/// On-disk cocycle: values flattened in row-major `(g, h, k)` order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocycleFile {
    pub group: String,
    #[serde(rename = "L")]
    pub l: u64,
    pub values: Vec<u64>,
}

impl Cocycle3 {
    /// Validates normalization and the cocycle condition.
    pub fn new(group: Arc<FiniteGroup>, l: u64, values: Vec<u64>) -> Result<Self, CohomologyError> {
        let n = group.order();
        if values.len() != n * n * n {
            return Err(CohomologyError::WrongSize { got: values.len(), expected: n * n * n });
        }
        let l = l.max(1);
        let values = values.into_iter().map(|v| (v % l) as u32).collect();
        let c = Self { group, l, values };
        c.check()?;
        Ok(c)
    }

    pub(crate) fn new_unchecked(group: Arc<FiniteGroup>, l: u64, values: Vec<u32>) -> Self {
        Self { group, l, values }
    }

    pub fn trivial(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        Self { group, l: 1, values: vec![0; n * n * n] }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// Value order: exponents live in `Z_L`.
    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    #[inline]
    pub fn value(&self, a: usize, b: usize, c: usize) -> u64 {
        let n = self.group.order();
        self.values[(a * n + b) * n + c] as u64
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn check(&self) -> Result<(), CohomologyError> {
        let g = &*self.group;
        let n = g.order();
        let l = self.l;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if (a == 0 || b == 0 || c == 0) && self.value(a, b, c) != 0 {
                        return Err(CohomologyError::NotNormalized(a, b, c));
                    }
                }
            }
        }
        for a in 1..n {
            for b in 1..n {
                let ab = g.mul(a, b);
                for c in 1..n {
                    let bc = g.mul(b, c);
                    for d in 1..n {
                        let cd = g.mul(c, d);
                        let s = self.value(b, c, d) + l - self.value(ab, c, d) + self.value(a, bc, d) + l
                            - self.value(a, b, cd)
                            + self.value(a, b, c);
                        if s % l != 0 {
                            return Err(CohomologyError::NotCocycle(a, b, c, d));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Pointwise inverse, `ω⁻¹`.
    pub fn inverse(&self) -> Self {
        let l = self.l as u32;
        let values = self.values.iter().map(|&v| (l - v) % l).collect();
        Self { group: self.group.clone(), l: self.l, values }
    }

    /// Divides `L` and every value by their common gcd.
    pub fn reduced(&self) -> Self {
        let g = self.values.iter().fold(self.l, |acc, &v| acc.gcd(&(v as u64)));
        if g <= 1 {
            return self.clone();
        }
        let values = self.values.iter().map(|&v| v / g as u32).collect();
        Self { group: self.group.clone(), l: self.l / g, values }
    }

    /// Re-expresses the cocycle with value order `m`, a multiple of `L`.
    pub fn scaled_to(&self, m: u64) -> Self {
        assert!(m % self.l == 0, "{m} is not a multiple of {}", self.l);
        let f = (m / self.l) as u32;
        Self { group: self.group.clone(), l: m, values: self.values.iter().map(|&v| v * f).collect() }
    }

    /// `(ω·θ)(a, b, c) = ω(θa, θb, θc)`.
    pub fn pullback(&self, aut: &Automorphism) -> Self {
        let n = self.group.order();
        let mut values = vec![0u32; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    values[(a * n + b) * n + c] = self.value(aut.apply(a), aut.apply(b), aut.apply(c)) as u32;
                }
            }
        }
        Self { group: self.group.clone(), l: self.l, values }
    }

    /// Exponent of `θ_g(x, y) = ω(g,x,y) ω(x,y,(xy)⁻¹gxy) / ω(x,x⁻¹gx,y)`, mod `L`.
    #[inline]
    pub fn theta_exp(&self, g: usize, x: usize, y: usize) -> u64 {
        let grp = &*self.group;
        let xy = grp.mul(x, y);
        let g_xy = grp.conj(grp.inv(xy), g);
        let g_x = grp.conj(grp.inv(x), g);
        (self.value(g, x, y) + self.value(x, y, g_xy) + self.l - self.value(x, g_x, y)) % self.l
    }

    /// Exponent of `γ_x(h, l) = ω(h,l,x) ω(x,x⁻¹hx,x⁻¹lx) / ω(h,x,x⁻¹lx)`, mod `L`.
    #[inline]
    pub fn gamma_exp(&self, x: usize, h: usize, l: usize) -> u64 {
        let grp = &*self.group;
        let xi = grp.inv(x);
        let hx = grp.conj(xi, h);
        let lx = grp.conj(xi, l);
        (self.value(h, l, x) + self.value(x, hx, lx) + self.l - self.value(h, x, lx)) % self.l
    }

    /// `θ_g` restricted to the centralizer `C(g)`, in its local indices.
    pub fn theta(&self, g: usize) -> Result<(Subgroup, TwoCocycle), CohomologyError> {
        let c = self.group.centralizer(g)?;
        let els = c.elements();
        let k = els.len();
        let mut values = Vec::with_capacity(k * k);
        for &x in els {
            for &y in els {
                values.push(self.theta_exp(g, x, y) as u32);
            }
        }
        Ok((c, TwoCocycle { l: self.l, order: k, values }))
    }

    /// `γ_x` on all of `G`.
    pub fn gamma(&self, x: usize) -> TwoCocycle {
        let n = self.group.order();
        let mut values = Vec::with_capacity(n * n);
        for h in 0..n {
            for l in 0..n {
                values.push(self.gamma_exp(x, h, l) as u32);
            }
        }
        TwoCocycle { l: self.l, order: n, values }
    }

    pub fn to_file(&self) -> CocycleFile {
        CocycleFile {
            group: self.group.name().to_string(),
            l: self.l,
            values: self.values.iter().map(|&v| v as u64).collect(),
        }
    }

    pub fn from_file(file: CocycleFile, group: Arc<FiniteGroup>) -> Result<Self, CohomologyError> {
        if file.group != group.name() {
            return Err(CohomologyError::GroupMismatch { cocycle: file.group, group: group.name().to_string() });
        }
        Self::new(group, file.l, file.values)
    }

    pub fn load(path: &Path, group: Arc<FiniteGroup>) -> Result<Self, CohomologyError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| GroupError::Io { path: path.display().to_string(), source })?;
        let file: CocycleFile = serde_json::from_str(&text)
            .map_err(|e| GroupError::Parse { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_file(file, group)
    }
}

/// A normalized 2-cocycle `β: C² → Z_L` on a group given by local indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoCocycle {
    l: u64,
    order: usize,
    values: Vec<u32>,
}

impl TwoCocycle {
    pub fn new(order: usize, l: u64, values: Vec<u64>) -> Result<Self, CohomologyError> {
        if values.len() != order * order {
            return Err(CohomologyError::WrongSize { got: values.len(), expected: order * order });
        }
        let l = l.max(1);
        Ok(Self { l, order, values: values.into_iter().map(|v| (v % l) as u32).collect() })
    }

    pub fn trivial(order: usize) -> Self {
        Self { l: 1, order, values: vec![0; order * order] }
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn value(&self, x: usize, y: usize) -> u64 {
        self.values[x * self.order + y] as u64
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Normalization and `β(x,y) β(xy,z) = β(x,yz) β(y,z)` on `group`.
    pub fn check(&self, group: &FiniteGroup) -> Result<(), CohomologyError> {
        let n = self.order;
        if group.order() != n {
            return Err(CohomologyError::WrongSize { got: n, expected: group.order() });
        }
        for x in 0..n {
            if self.value(0, x) != 0 || self.value(x, 0) != 0 {
                return Err(CohomologyError::NotTwoCocycle(0, x, 0));
            }
        }
        for x in 0..n {
            for y in 0..n {
                let xy = group.mul(x, y);
                for z in 0..n {
                    let lhs = self.value(x, y) + self.value(xy, z);
                    let rhs = self.value(x, group.mul(y, z)) + self.value(y, z);
                    if (lhs + self.l - rhs % self.l) % self.l != 0 {
                        return Err(CohomologyError::NotTwoCocycle(x, y, z));
                    }
                }
            }
        }
        Ok(())
    }

    /// Divides `L` and every value by their common gcd.
    pub fn reduced(&self) -> Self {
        let g = self.values.iter().fold(self.l, |acc, &v| acc.gcd(&(v as u64)));
        if g <= 1 {
            return self.clone();
        }
        Self { l: self.l / g, order: self.order, values: self.values.iter().map(|&v| v / g as u32).collect() }
    }
}

/// Generators and coordinates for `H³(G, ℂ^×)`.
#[derive(Clone)]
pub struct CohomologyClasses {
    group: Arc<FiniteGroup>,
    torsion: Vec<u64>,
    generators: Vec<Cocycle3>,
    /// For each torsion factor, the coordinate functional on normalized cochains.
    functionals: Vec<Vec<BigInt>>,
}

impl std::fmt::Debug for CohomologyClasses {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CohomologyClasses")
            .field("group", &self.group.name())
            .field("torsion", &self.torsion)
            .finish_non_exhaustive()
    }
}

/// Index of a normalized 3-cochain coordinate; every argument is non-identity.
#[inline]
fn cochain_index(m: usize, a: usize, b: usize, c: usize) -> usize {
    ((a - 1) * m + (b - 1)) * m + (c - 1)
}

/// Sparse rows of `δ³` on normalized cochains: one row per 4-tuple.
fn coboundary3(g: &FiniteGroup) -> Vec<Vec<(usize, i64)>> {
    let n = g.order();
    let m = n.saturating_sub(1);
    let mut rows = Vec::with_capacity(m.pow(4));
    let mut acc: HashMap<usize, i64> = HashMap::new();
    for a in 1..n {
        for b in 1..n {
            let ab = g.mul(a, b);
            for c in 1..n {
                let bc = g.mul(b, c);
                for d in 1..n {
                    let cd = g.mul(c, d);
                    acc.clear();
                    let terms = [(b, c, d, 1), (ab, c, d, -1), (a, bc, d, 1), (a, b, cd, -1), (a, b, c, 1)];
                    for (x, y, z, s) in terms {
                        if x != 0 && y != 0 && z != 0 {
                            *acc.entry(cochain_index(m, x, y, z)).or_default() += s;
                        }
                    }
                    let mut row: Vec<(usize, i64)> = acc.iter().filter(|(_, &v)| v != 0).map(|(&k, &v)| (k, v)).collect();
                    if !row.is_empty() {
                        row.sort_unstable();
                        rows.push(row);
                    }
                }
            }
        }
    }
    rows
}

/// `H³(G, ℂ^×)` with explicit generators, for `|G| ≤` [`DEFAULT_H3_BOUND`].
pub fn h3_classes(group: &FiniteGroup) -> Result<CohomologyClasses, CohomologyError> {
    h3_classes_bounded(group, DEFAULT_H3_BOUND)
}

pub fn h3_classes_bounded(group: &FiniteGroup, bound: usize) -> Result<CohomologyClasses, CohomologyError> {
    if group.order() > bound {
        return Err(GroupError::OrderBoundExceeded { order: group.order(), bound }.into());
    }
    let group = Arc::new(group.clone());
    let n = group.order();
    let m = n.saturating_sub(1);
    let snf = column_snf(&coboundary3(&group), m * m * m);
    let mut torsion = Vec::new();
    let mut generators = Vec::new();
    let mut functionals = Vec::new();
    for f in snf.factors {
        let d = f.d.to_u64().expect("torsion divides a power of |G|");
        let db = BigInt::from(d);
        let mut values = vec![0u32; n * n * n];
        for a in 1..n {
            for b in 1..n {
                for c in 1..n {
                    let v = f.column[cochain_index(m, a, b, c)].mod_floor(&db);
                    values[(a * n + b) * n + c] = v.to_u32().expect("reduced mod d");
                }
            }
        }
        let gen = Cocycle3::new_unchecked(group.clone(), d, values);
        gen.check()?;
        torsion.push(d);
        generators.push(gen);
        functionals.push(f.row);
    }
    Ok(CohomologyClasses { group, torsion, generators, functionals })
}

impl CohomologyClasses {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// Invariant factors `d_1 | d_2 | …` of the class group.
    pub fn torsion(&self) -> &[u64] {
        &self.torsion
    }

    /// One `Z_{d_i}`-valued cocycle per torsion factor.
    pub fn generators(&self) -> &[Cocycle3] {
        &self.generators
    }

    pub fn count(&self) -> u64 {
        self.torsion.iter().product()
    }

    /// Every class vector, in lexicographic order; the zero vector first.
    pub fn class_vectors(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for &d in &self.torsion {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..d).map(move |c| {
                        let mut w = v.clone();
                        w.push(c);
                        w
                    })
                })
                .collect();
        }
        out
    }

    fn check_vector(&self, c: &[u64]) -> Result<(), CohomologyError> {
        if c.len() != self.torsion.len() || c.iter().zip(&self.torsion).any(|(x, d)| x >= d) {
            return Err(CohomologyError::BadClassVector(c.to_vec()));
        }
        Ok(())
    }

    /// The cocycle `Σ c_i · gen_i`, with its value order gcd-reduced.
    pub fn cocycle(&self, c: &[u64]) -> Result<Cocycle3, CohomologyError> {
        self.check_vector(c)?;
        let l = self.torsion.last().copied().unwrap_or(1);
        let n = self.group.order();
        let mut values = vec![0u64; n * n * n];
        for ((gen, &d), &ci) in self.generators.iter().zip(&self.torsion).zip(c) {
            if ci == 0 {
                continue;
            }
            let scale = ci * (l / d);
            for (v, &g) in values.iter_mut().zip(&gen.values) {
                *v = (*v + scale * g as u64) % l;
            }
        }
        let values = values.into_iter().map(|v| v as u32).collect();
        Ok(Cocycle3::new_unchecked(self.group.clone(), l, values).reduced())
    }

    /// Every class as an explicit cocycle, in [`Self::class_vectors`] order.
    pub fn classes(&self) -> Vec<Cocycle3> {
        self.class_vectors().iter().map(|c| self.cocycle(c).expect("valid vector")).collect()
    }

    /// Class vector of an arbitrary cocycle on the same group.
    pub fn identify(&self, omega: &Cocycle3) -> Result<Vec<u64>, CohomologyError> {
        if omega.group() != self.group() {
            return Err(CohomologyError::GroupMismatch {
                cocycle: omega.group().name().to_string(),
                group: self.group.name().to_string(),
            });
        }
        let n = self.group.order();
        let m = n - 1;
        let l = BigInt::from(omega.l());
        let mut out = Vec::with_capacity(self.torsion.len());
        for (w, &d) in self.functionals.iter().zip(&self.torsion) {
            let mut s = BigInt::zero();
            for a in 1..n {
                for b in 1..n {
                    for c in 1..n {
                        let v = omega.value(a, b, c);
                        if v != 0 {
                            s += &w[cochain_index(m, a, b, c)] * v;
                        }
                    }
                }
            }
            let num = s * d;
            let (q, r) = num.div_mod_floor(&l);
            if !r.is_zero() {
                return Err(CohomologyError::InconsistentLift(format!(
                    "coordinate for factor Z_{d} is not integral (value order {})",
                    omega.l()
                )));
            }
            out.push(q.mod_floor(&BigInt::from(d)).to_u64().expect("reduced mod d"));
        }
        Ok(out)
    }

    /// Matrix of the pullback along `aut`: column `t` is the class of `gen_t ∘ aut`.
    pub fn action_matrix(&self, aut: &Automorphism) -> Result<Vec<Vec<u64>>, CohomologyError> {
        let cols = self
            .generators
            .iter()
            .map(|g| self.identify(&g.pullback(aut)))
            .collect::<Result<Vec<_>, _>>()?;
        let k = self.torsion.len();
        Ok((0..k).map(|s| (0..k).map(|t| cols[t][s]).collect()).collect())
    }

    fn apply(&self, matrix: &[Vec<u64>], c: &[u64]) -> Vec<u64> {
        matrix
            .iter()
            .zip(&self.torsion)
            .map(|(row, &d)| row.iter().zip(c).fold(0u64, |acc, (&m, &x)| (acc + m * x) % d))
            .collect()
    }

    fn vector_index(&self, c: &[u64]) -> usize {
        c.iter().zip(&self.torsion).fold(0usize, |acc, (&x, &d)| acc * d as usize + x as usize)
    }
}

/// An `Aut(G)`-orbit of cohomology classes.
#[derive(Debug, Clone)]
pub struct Orbit {
    /// Lexicographically minimal class vector in the orbit.
    pub representative: Vec<u64>,
    pub members: Vec<Vec<u64>>,
    pub cocycle: Cocycle3,
}

/// Orbits of `Aut(G)` on the classes, sorted by representative (trivial first).
pub fn aut_orbit_representatives(
    classes: &CohomologyClasses,
    automorphisms: &[Automorphism],
) -> Result<Vec<Orbit>, CohomologyError> {
    let matrices = automorphisms
        .iter()
        .map(|a| classes.action_matrix(a))
        .collect::<Result<Vec<_>, _>>()?;
    let vectors = classes.class_vectors();
    let mut seen = vec![false; vectors.len()];
    let mut orbits = Vec::new();
    for v in &vectors {
        if seen[classes.vector_index(v)] {
            continue;
        }
        let mut members = vec![v.clone()];
        seen[classes.vector_index(v)] = true;
        let mut i = 0;
        while i < members.len() {
            let cur = members[i].clone();
            for m in &matrices {
                let w = classes.apply(m, &cur);
                let idx = classes.vector_index(&w);
                if !seen[idx] {
                    seen[idx] = true;
                    members.push(w);
                }
            }
            i += 1;
        }
        members.sort();
        // vectors are visited in lex order, so v is the orbit minimum
        let cocycle = classes.cocycle(v)?;
        orbits.push(Orbit { representative: v.clone(), members, cocycle });
    }
    Ok(orbits)
}

/// `H³` classes and their automorphism orbits in one call.
pub fn orbit_representatives(group: &FiniteGroup, bound: usize) -> Result<(CohomologyClasses, Vec<Orbit>), CohomologyError> {
    let classes = h3_classes_bounded(group, bound)?;
    let auts = group.automorphisms_bounded(bound.max(crate::group::DEFAULT_AUT_BOUND))?;
    let orbits = aut_orbit_representatives(&classes, &auts)?;
    Ok((classes, orbits))
}
