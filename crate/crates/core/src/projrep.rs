//! Character tables by the Dixon–Schneider method, and β-projective
//! characters obtained from the central extension `C_β`.
//!
//! Central characters are common eigenvectors of the class multiplication
//! matrices. They are found over `F_p` for a prime `p ≡ 1 (mod exp G)`,
//! `p > 2√|G|`, where every character value reduces faithfully; values are
//! lifted back through the eigenvalue multiplicities of each element and
//! the whole table is re-checked exactly.

use std::cmp::Ordering;

use num_traits::ToPrimitive;

use crate::cohomology::TwoCocycle;
use crate::cyclotomic::{matmul, Cyclotomic};
use crate::error::ProjRepError;
use crate::group::{ConjClass, FiniteGroup};

/// Default largest group accepted by [`character_table`].
pub const DEFAULT_TABLE_BOUND: usize = 256;

/// The irreducible characters of a group, one row per character.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    group: FiniteGroup,
    classes: Vec<ConjClass>,
    class_of: Vec<usize>,
    /// `rows[i][t]` is `χ_i` on class `t`.
    rows: Vec<Vec<Cyclotomic>>,
}

impl CharacterTable {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn classes(&self) -> &[ConjClass] {
        &self.classes
    }

    pub fn rows(&self) -> &[Vec<Cyclotomic>] {
        &self.rows
    }

    pub fn degree(&self, i: usize) -> u64 {
        self.rows[i][0].as_integer().and_then(|d| d.to_u64()).expect("degrees are positive integers")
    }

    pub fn degrees(&self) -> Vec<u64> {
        (0..self.rows.len()).map(|i| self.degree(i)).collect()
    }

    /// `χ_i(g)` for an arbitrary element.
    pub fn value(&self, i: usize, g: usize) -> &Cyclotomic {
        &self.rows[i][self.class_of[g]]
    }

    /// Exact row orthogonality, `Σ_K |K| χ_i(K) χ_j(K)^* = |G| δ_ij`.
    pub fn check_orthogonality(&self) -> Result<(), ProjRepError> {
        let n = self.group.order() as i64;
        let weighted: Vec<Vec<Cyclotomic>> = self
            .rows
            .iter()
            .map(|row| row.iter().zip(&self.classes).map(|(x, c)| x.mul_integer(c.size() as i64)).collect())
            .collect();
        let adjoint: Vec<Vec<Cyclotomic>> = (0..self.classes.len())
            .map(|t| self.rows.iter().map(|row| row[t].conjugate()).collect())
            .collect();
        let gram = matmul(&weighted, &adjoint);
        for (i, row) in gram.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j { n } else { 0 };
                if *x != Cyclotomic::from_integer(want) {
                    return Err(ProjRepError::LiftVerificationFailed(format!(
                        "rows {i} and {j} of the table of {} are not orthonormal",
                        self.group.name()
                    )));
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Arithmetic mod p
// ---------------------------------------------------------------------------

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Smallest prime `p ≡ 1 (mod e)` with `p > 2√n`.
pub fn dixon_prime(e: u64, n: u64) -> u64 {
    let mut p = e + 1;
    while !(is_prime(p) && (p * p > 4 * n)) {
        p += e;
    }
    p
}

fn primitive_root(p: u64) -> u64 {
    let mut factors = Vec::new();
    let mut m = p - 1;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            factors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    (2..p).find(|&g| factors.iter().all(|&f| mod_pow(g, (p - 1) / f, p) != 1)).unwrap_or(1)
}

/// Reduced row echelon basis of the span of `vectors`; returns rows and pivots.
fn rref(mut m: Vec<Vec<u64>>, p: u64) -> (Vec<Vec<u64>>, Vec<usize>) {
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(i) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, i);
        let inv = mod_inv(m[r][c], p);
        m[r].iter_mut().for_each(|x| *x = *x * inv % p);
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                let (pr, mi) = if i < r {
                    let (lo, hi) = m.split_at_mut(r);
                    (&hi[0], &mut lo[i])
                } else {
                    let (lo, hi) = m.split_at_mut(i);
                    (&lo[r], &mut hi[0])
                };
                for (x, y) in mi.iter_mut().zip(pr.iter()) {
                    *x = (*x + p - f * y % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

/// Null space of the square matrix `a` over `F_p`, as column vectors.
fn null_space(a: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    let (r, pivots) = rref(a.to_vec(), p);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; n];
            v[f] = 1;
            for (row, &pc) in r.iter().zip(&pivots) {
                v[pc] = (p - row[f]) % p;
            }
            v
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Dixon–Schneider
// ---------------------------------------------------------------------------

pub fn character_table(group: &FiniteGroup) -> Result<CharacterTable, ProjRepError> {
    character_table_bounded(group, DEFAULT_TABLE_BOUND)
}

pub fn character_table_bounded(group: &FiniteGroup, bound: usize) -> Result<CharacterTable, ProjRepError> {
    let n = group.order();
    if n > bound {
        return Err(ProjRepError::OrderBoundExceeded { order: n, bound });
    }
    if group.is_abelian() {
        return abelian_table(group);
    }
    dixon_table(group)
}

/// Characters of an abelian group as the homomorphisms into `μ_e`, found by
/// assigning roots of unity to a generating set.
fn abelian_table(group: &FiniteGroup) -> Result<CharacterTable, ProjRepError> {
    let n = group.order();
    let e = group.exponent();
    let classes = group.conjugacy_classes();
    let class_of = FiniteGroup::class_map(&classes, n);
    let gens = group.minimal_generating_set();
    let steps: Vec<usize> = gens.iter().map(|&g| e / group.element_order(g)).collect();
    let mut rows: Vec<Vec<Cyclotomic>> = Vec::with_capacity(n);
    let mut images = vec![0usize; gens.len()];
    loop {
        if let Some(exps) = extend_homomorphism(group, &gens, &images, e) {
            let row = classes
                .iter()
                .map(|c| Cyclotomic::root_of_unity(e as u32, exps[c.representative] as i64))
                .collect();
            rows.push(row);
        }
        // next assignment: image of g_i runs over multiples of e / o(g_i)
        let mut i = 0;
        while i < gens.len() {
            images[i] += steps[i];
            if images[i] < e {
                break;
            }
            images[i] = 0;
            i += 1;
        }
        if i == gens.len() {
            break;
        }
    }
    // distinct homomorphisms are orthonormal, so the count is the whole check
    rows.sort_by(|a, b| cmp_rows(a, b));
    rows.dedup();
    if rows.len() != n {
        return Err(ProjRepError::LiftVerificationFailed(format!("found {} linear characters of an abelian group of order {n}", rows.len())));
    }
    Ok(CharacterTable { group: group.clone(), classes, class_of, rows })
}

/// Exponents `x ↦ k` of the homomorphism sending `gens[i]` to `ζ_e^{images[i]}`,
/// if one exists.
fn extend_homomorphism(group: &FiniteGroup, gens: &[usize], images: &[usize], e: usize) -> Option<Vec<usize>> {
    let mut exp = vec![usize::MAX; group.order()];
    exp[0] = 0;
    let mut queue = vec![0];
    while let Some(x) = queue.pop() {
        for (&g, &k) in gens.iter().zip(images) {
            let y = group.mul(x, g);
            let v = (exp[x] + k) % e;
            if exp[y] == usize::MAX {
                exp[y] = v;
                queue.push(y);
            } else if exp[y] != v {
                return None;
            }
        }
    }
    Some(exp)
}

/// The Dixon–Schneider method, for any group.
pub(crate) fn dixon_table(group: &FiniteGroup) -> Result<CharacterTable, ProjRepError> {
    let n = group.order();
    let classes = group.conjugacy_classes();
    let class_of = FiniteGroup::class_map(&classes, n);
    let k = classes.len();
    let e = group.exponent() as u64;
    let p = dixon_prime(e, n as u64);
    let inv_class: Vec<usize> = classes.iter().map(|c| class_of[group.inv(c.representative)]).collect();

    // coeff[r][s][t] = #{x ∈ K_r : x⁻¹ z_t ∈ K_s} for the representative z_t
    let mut coeff = vec![vec![vec![0u64; k]; k]; k];
    for (t, ct) in classes.iter().enumerate() {
        let z = ct.representative;
        for x in 0..n {
            let y = group.mul(group.inv(x), z);
            coeff[class_of[x]][class_of[y]][t] += 1;
        }
    }

    // split F_p^k into common eigenspaces, one class matrix at a time
    let mut spaces: Vec<Vec<Vec<u64>>> = vec![(0..k).map(|i| (0..k).map(|j| u64::from(i == j)).collect()).collect()];
    for r in 1..k {
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
        let mut next = Vec::new();
        for space in spaces {
            if space.len() == 1 {
                next.push(space);
                continue;
            }
            next.extend(split(&space, &coeff[r], p));
        }
        spaces = next;
    }
    if spaces.len() != k {
        return Err(ProjRepError::LiftVerificationFailed(format!(
            "class matrices of {} did not separate the central characters",
            group.name()
        )));
    }

    let z = mod_pow(primitive_root(p), (p - 1) / e, p);
    let orders: Vec<u64> = classes.iter().map(|c| group.element_order(c.representative) as u64).collect();
    let mut rows = Vec::with_capacity(k);
    for space in spaces {
        let mut w = space.into_iter().next().expect("one-dimensional");
        let w0 = mod_inv(w[0], p);
        w.iter_mut().for_each(|x| *x = *x * w0 % p);
        // Σ_t ω(K_t) ω(K_t*) / |K_t| = |G| / χ(1)²
        let s = (0..k).fold(0u64, |acc, t| {
            (acc + w[t] * w[inv_class[t]] % p * mod_inv(classes[t].size() as u64 % p, p)) % p
        });
        let d2 = (n as u64 % p) * mod_inv(s, p) % p;
        let dim = (1..=n as u64)
            .take_while(|d| d * d <= n as u64)
            .find(|d| d * d % p == d2)
            .ok_or_else(|| ProjRepError::LiftVerificationFailed("no admissible degree".into()))?;
        let chi_mod: Vec<u64> = (0..k)
            .map(|t| w[t] * (dim % p) % p * mod_inv(classes[t].size() as u64 % p, p) % p)
            .collect();
        let mut row = Vec::with_capacity(k);
        for (t, class) in classes.iter().enumerate() {
            let g = class.representative;
            let o = orders[t];
            let zo = mod_pow(z, e / o, p);
            let powers: Vec<u64> = (0..o).map(|l| chi_mod[class_of[group.pow(g, l as usize)]]).collect();
            let o_inv = mod_inv(o % p, p);
            let mut value = Cyclotomic::zero();
            for s in 0..o {
                let zs = mod_inv(mod_pow(zo, s, p), p);
                let mult = (0..o).fold(0u64, |acc, l| (acc + powers[l as usize] * mod_pow(zs, l, p)) % p) * o_inv % p;
                if mult > dim {
                    return Err(ProjRepError::LiftVerificationFailed(format!(
                        "eigenvalue multiplicity {mult} exceeds degree {dim}"
                    )));
                }
                if mult > 0 {
                    value += Cyclotomic::root_of_unity(o as u32, s as i64).mul_integer(mult as i64);
                }
            }
            row.push(value.embed(e as u32).map_err(|err| ProjRepError::LiftVerificationFailed(err.to_string()))?);
        }
        rows.push(row);
    }
    finish_table(group, classes, class_of, rows)
}

fn finish_table(
    group: &FiniteGroup,
    classes: Vec<ConjClass>,
    class_of: Vec<usize>,
    mut rows: Vec<Vec<Cyclotomic>>,
) -> Result<CharacterTable, ProjRepError> {
    let n = group.order();
    rows.sort_by(|a, b| cmp_rows(a, b));
    let table = CharacterTable { group: group.clone(), classes, class_of, rows };
    table.check_orthogonality()?;
    let sum: u64 = table.degrees().iter().map(|d| d * d).sum();
    if sum != n as u64 {
        return Err(ProjRepError::LiftVerificationFailed(format!("Σ χ(1)² = {sum}, expected {n}")));
    }
    Ok(table)
}

fn is_trivial(values: &[Cyclotomic]) -> bool {
    values.iter().all(Cyclotomic::is_one)
}

/// Order rows by degree, trivial character first, then by value vector.
fn cmp_rows(a: &[Cyclotomic], b: &[Cyclotomic]) -> Ordering {
    a[0].cmp(&b[0])
        .then_with(|| is_trivial(b).cmp(&is_trivial(a)))
        .then_with(|| a.iter().cmp(b.iter()))
}

/// Splits an invariant subspace into eigenspaces of the class matrix `m`
/// (acting on column vectors: `(M w)_s = Σ_t m[s][t] w_t`).
fn split(space: &[Vec<u64>], m: &[Vec<u64>], p: u64) -> Vec<Vec<Vec<u64>>> {
    let (basis, pivots) = rref(space.to_vec(), p);
    let d = basis.len();
    // restricted matrix: column j holds the coordinates of M b_j
    let images: Vec<Vec<u64>> = basis
        .iter()
        .map(|b| (0..b.len()).map(|s| m[s].iter().zip(b).fold(0u64, |acc, (x, y)| (acc + x % p * y) % p)).collect())
        .collect();
    let restricted: Vec<Vec<u64>> =
        (0..d).map(|i| (0..d).map(|j| images[j][pivots[i]]).collect()).collect();
    let mut out = Vec::new();
    let mut found = 0;
    for lambda in 0..p {
        let shifted: Vec<Vec<u64>> = restricted
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().enumerate().map(|(j, &x)| if i == j { (x + p - lambda) % p } else { x }).collect())
            .collect();
        let kernel = null_space(&shifted, p);
        if kernel.is_empty() {
            continue;
        }
        found += kernel.len();
        let vectors: Vec<Vec<u64>> = kernel
            .iter()
            .map(|c| {
                let mut v = vec![0u64; basis[0].len()];
                for (coef, b) in c.iter().zip(&basis) {
                    for (x, y) in v.iter_mut().zip(b) {
                        *x = (*x + coef * y) % p;
                    }
                }
                v
            })
            .collect();
        out.push(vectors);
        if found == d {
            break;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Projective characters
// ---------------------------------------------------------------------------

/// The central extension `C_β` on pairs `(g, j)`, indexed `g·m + j`, with
/// `(g,j)(h,k) = (gh, j+k+β(g,h) mod m)`. The central element `(e,1)`
/// has index 1 when `m > 1`.
pub fn group_extension(c: &FiniteGroup, beta: &TwoCocycle) -> Result<FiniteGroup, ProjRepError> {
    beta.check(c)?;
    let m = beta.l() as usize;
    let n = c.order();
    let size = n * m;
    let mut table = Vec::with_capacity(size * size);
    for g in 0..n {
        for j in 0..m {
            for h in 0..n {
                for k in 0..m {
                    let gh = c.mul(g, h);
                    let jj = (j + k + beta.value(g, h) as usize) % m;
                    table.push((gh * m + jj) as u32);
                }
            }
        }
    }
    Ok(FiniteGroup::from_flat_unchecked(table, size, format!("{}_beta{}", c.name(), m)))
}

#[inline]
fn g_index(g: usize, j: usize, m: usize) -> usize {
    g * m + j
}

/// A β-projective character, stored on every element of its domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjChar {
    dim: u64,
    values: Vec<Cyclotomic>,
}

impl ProjChar {
    pub fn new(values: Vec<Cyclotomic>) -> Self {
        let dim = values[0].as_integer().and_then(|d| d.to_u64()).expect("value at the identity is the degree");
        Self { dim, values }
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    /// Values indexed by local element index of the domain.
    pub fn values(&self) -> &[Cyclotomic] {
        &self.values
    }

    pub fn value(&self, g: usize) -> &Cyclotomic {
        &self.values[g]
    }

    /// `χ(hgh⁻¹) = β(h⁻¹,h) / (β(h,g) β(hg,h⁻¹)) · χ(g)` for all `g, h`.
    pub fn check_twisted_conjugate(&self, domain: &FiniteGroup, beta: &TwoCocycle) -> Result<(), String> {
        let l = beta.l() as i64;
        for g in domain.elements() {
            for h in domain.elements() {
                let hi = domain.inv(h);
                let hg = domain.mul(h, g);
                let e = beta.value(hi, h) as i64 - beta.value(h, g) as i64 - beta.value(hg, hi) as i64;
                let rhs = self.values[g].mul_root_of_unity(l as u32, e);
                if self.values[domain.conj(h, g)] != rhs {
                    return Err(format!("twisted conjugation fails at g={g}, h={h}"));
                }
            }
        }
        Ok(())
    }

    /// `χ(g⁻¹) = β(g, g⁻¹) χ(g)^*` for all `g`.
    pub fn check_inverse(&self, domain: &FiniteGroup, beta: &TwoCocycle) -> Result<(), String> {
        let l = beta.l() as u32;
        for g in domain.elements() {
            let gi = domain.inv(g);
            let rhs = self.values[g].conjugate().mul_root_of_unity(l, beta.value(g, gi) as i64);
            if self.values[gi] != rhs {
                return Err(format!("inverse relation fails at g={g}"));
            }
        }
        Ok(())
    }
}

impl PartialOrd for ProjChar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// By degree, the trivial character first, then by value vector.
impl Ord for ProjChar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim.cmp(&other.dim).then_with(|| cmp_rows(&self.values, &other.values))
    }
}

/// All irreducible β-projective characters of `c`, sorted.
///
/// `beta` is gcd-reduced first, so the extension has order `|C|·m` with `m`
/// the reduced value order.
pub fn projective_characters(c: &FiniteGroup, beta: &TwoCocycle) -> Result<Vec<ProjChar>, ProjRepError> {
    let beta = beta.reduced();
    let n = c.order();
    let mut out = if beta.l() == 1 {
        let table = character_table(c)?;
        (0..table.rows.len())
            .map(|i| ProjChar::new(c.elements().map(|g| table.value(i, g).clone()).collect()))
            .collect::<Vec<_>>()
    } else {
        let m = beta.l() as usize;
        let ext = group_extension(c, &beta)?;
        let table = character_table(&ext)?;
        let zeta = Cyclotomic::root_of_unity(m as u32, 1);
        (0..table.rows.len())
            .filter(|&i| *table.value(i, g_index(0, 1, m)) == table.value(i, 0) * &zeta)
            .map(|i| ProjChar::new(c.elements().map(|g| table.value(i, g_index(g, 0, m)).clone()).collect()))
            .collect()
    };
    out.sort();
    let sum: u64 = out.iter().map(|x| x.dim * x.dim).sum();
    if sum != n as u64 {
        return Err(ProjRepError::LiftVerificationFailed(format!(
            "projective degrees of {} give Σ dim² = {sum}, expected {n}",
            c.name()
        )));
    }
    Ok(out)
}
