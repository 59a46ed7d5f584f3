//! Simple objects of the twisted double and their S and T matrices.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cohomology::{Cocycle3, TwoCocycle};
use crate::cyclotomic::{matmul, Cyclotomic};
use crate::error::ModularError;
use crate::group::{ConjClass, FiniteGroup, Subgroup};
use crate::projrep::{projective_characters, ProjChar};

pub type Matrix = Vec<Vec<Cyclotomic>>;

/// Label stored in every data file: the matrices are those of `Rep(D^ω G)`,
/// i.e. of the centre of `Vec^{ω⁻¹} G` with reversed braiding.
pub const CATEGORY_LABEL: &str = "Z(Vec^{omega^-1} G)^bop";

/// One simple object `(K, a, ρ_a)`.
#[derive(Debug, Clone)]
pub struct SimpleObject {
    pub class_index: usize,
    pub class_: ConjClass,
    pub centralizer: Subgroup,
    /// `θ_a` on `C(a)`, local indices.
    pub theta: TwoCocycle,
    pub character: ProjChar,
    pub dim_total: u64,
}

impl SimpleObject {
    pub fn representative(&self) -> usize {
        self.class_.representative
    }
}

/// The simple objects of one `(G, ω)`, in canonical order.
#[derive(Debug, Clone)]
pub struct Objects {
    omega: Cocycle3,
    list: Vec<SimpleObject>,
}

impl Objects {
    pub fn group(&self) -> &FiniteGroup {
        self.omega.group()
    }

    pub fn omega(&self) -> &Cocycle3 {
        &self.omega
    }

    pub fn list(&self) -> &[SimpleObject] {
        &self.list
    }

    pub fn rank(&self) -> usize {
        self.list.len()
    }

    pub fn get(&self, i: usize) -> &SimpleObject {
        &self.list[i]
    }
}

pub fn simple_objects(omega: &Cocycle3) -> Result<Objects, ModularError> {
    let g = omega.group();
    let mut list = Vec::new();
    for (class_index, class) in g.conjugacy_classes().into_iter().enumerate() {
        let a = class.representative;
        let (centralizer, theta) = omega.theta(a)?;
        let chars = projective_characters(centralizer.as_group(), &theta)?;
        for character in chars {
            let dim_total = class.size() as u64 * character.dim();
            list.push(SimpleObject {
                class_index,
                class_: class.clone(),
                centralizer: centralizer.clone(),
                theta: theta.clone(),
                character,
                dim_total,
            });
        }
    }
    let n = g.order() as u64;
    debug_assert_eq!(list.iter().map(|o| o.dim_total * o.dim_total).sum::<u64>(), n * n);
    Ok(Objects { omega: omega.clone(), list })
}

pub fn t_matrix(objects: &Objects) -> Vec<Cyclotomic> {
    objects
        .list
        .iter()
        .map(|o| {
            let local = o.centralizer.local_index(o.representative()).expect("a ∈ C(a)");
            o.character.value(local).div_integer(o.character.dim() as i64)
        })
        .collect()
}

/// `χ_{ρ_y}(h)`: the character of object `i` moved from its representative
/// to the class member `y`, evaluated at `h ∈ C(y)`.
pub fn conjugate_character_transport(objects: &Objects, i: usize, y: usize, h: usize) -> Result<Cyclotomic, ModularError> {
    let o = &objects.list[i];
    let g = objects.group();
    let a = o.representative();
    let ay = o.class_.witness(y).ok_or(ModularError::NotInClass { element: y, representative: a })?;
    if !g.commute(y, h) {
        return Err(ModularError::NotCentralizing { y, h });
    }
    let w = &objects.omega;
    let l = w.l();
    let ayi = g.inv(ay);
    let e = (w.theta_exp(a, ay, h) + w.theta_exp(a, g.mul(ay, h), ayi) + l - w.theta_exp(y, ayi, ay)) % l;
    let local = o.centralizer.local_index(g.conj(ay, h)).expect("a_y h a_y⁻¹ ∈ C(a)");
    Ok(o.character.value(local).mul_root_of_unity(l as u32, e as i64))
}

/// The twist coefficient of one summand of the S matrix.
pub fn s_coefficient(objects: &Objects, i: usize, j: usize, g: usize, h: usize) -> Result<Cyclotomic, ModularError> {
    let grp = objects.group();
    let (oi, oj) = (&objects.list[i], &objects.list[j]);
    let (a, b) = (oi.representative(), oj.representative());
    let ag = oi.class_.witness(g).ok_or(ModularError::NotInClass { element: g, representative: a })?;
    let bh = oj.class_.witness(h).ok_or(ModularError::NotInClass { element: h, representative: b })?;
    if !grp.commute(g, h) {
        return Err(ModularError::NotCommuting(g, h));
    }
    let w = &objects.omega;
    let l = w.l();
    let (agi, bhi) = (grp.inv(ag), grp.inv(bh));
    let num = w.theta_exp(a, ag, h) + w.theta_exp(a, grp.mul(ag, h), agi) + w.theta_exp(b, bh, g) + w.theta_exp(b, grp.mul(bh, g), bhi);
    let den = w.theta_exp(g, agi, ag) + w.theta_exp(h, bhi, bh);
    let e = (num + 2 * l - den) % l;
    Ok(Cyclotomic::root_of_unity(l as u32, e as i64))
}

/// Conjugated transported characters, `tables[i][g·n + h]` for `g ∈ K_i`,
/// `h ∈ C(g)`, all in one common conductor.
struct Transport {
    n: usize,
    inv_order: Cyclotomic,
    tables: Vec<Vec<Option<Cyclotomic>>>,
}

impl Transport {
    fn new(objects: &Objects) -> Self {
        let grp = objects.group();
        let n = grp.order();
        let mut tables = Vec::with_capacity(objects.rank());
        let mut conductor = 1u32;
        for (i, o) in objects.list.iter().enumerate() {
            let mut t = vec![None; n * n];
            for &y in &o.class_.members {
                for h in grp.elements().filter(|&h| grp.commute(y, h)) {
                    let v = conjugate_character_transport(objects, i, y, h).expect("valid transport").conjugate();
                    conductor = conductor.lcm(&v.conductor());
                    t[y * n + h] = Some(v);
                }
            }
            tables.push(t);
        }
        for t in tables.iter_mut() {
            for v in t.iter_mut().flatten() {
                *v = v.embed(conductor).expect("common conductor");
            }
        }
        Self { n, inv_order: Cyclotomic::rational(1, n as i64), tables }
    }

    fn entry(&self, objects: &Objects, i: usize, j: usize) -> Cyclotomic {
        let n = self.n;
        let (ti, tj) = (&self.tables[i], &self.tables[j]);
        let mut acc = Cyclotomic::zero();
        for &g in &objects.list[i].class_.members {
            for &h in &objects.list[j].class_.members {
                if let (Some(x), Some(y)) = (&ti[g * n + h], &tj[h * n + g]) {
                    acc += x * y;
                }
            }
        }
        (&acc * &self.inv_order).normalized()
    }

    fn row(&self, objects: &Objects, i: usize) -> Vec<Cyclotomic> {
        (0..objects.rank()).map(|j| self.entry(objects, i, j)).collect()
    }
}

/// A single entry of S from the defining sum.
pub fn s_entry(objects: &Objects, i: usize, j: usize) -> Cyclotomic {
    Transport::new(objects).entry(objects, i, j)
}

/// S from the defining sum, upper triangle mirrored.
pub fn s_matrix_direct(objects: &Objects) -> Matrix {
    let tr = Transport::new(objects);
    let r = objects.rank();
    let mut s = vec![vec![Cyclotomic::zero(); r]; r];
    for i in 0..r {
        for j in i..r {
            let v = tr.entry(objects, i, j);
            s[j][i] = v.clone();
            s[i][j] = v;
        }
    }
    s
}

/// For abelian G every class is a singleton and the sum has one term.
pub fn s_matrix_abelian(objects: &Objects) -> Result<Matrix, ModularError> {
    let grp = objects.group();
    if !grp.is_abelian() {
        return Err(ModularError::NotAbelian);
    }
    let inv_order = Cyclotomic::rational(1, grp.order() as i64);
    let r = objects.rank();
    let mut s = vec![vec![Cyclotomic::zero(); r]; r];
    for i in 0..r {
        let (g, ci) = (objects.list[i].representative(), &objects.list[i].character);
        for j in i..r {
            let (h, cj) = (objects.list[j].representative(), &objects.list[j].character);
            // for abelian G the centralizer is G itself, so local = global
            let v = (&(&ci.value(h).conjugate() * &cj.value(g).conjugate()) * &inv_order).normalized();
            s[j][i] = v.clone();
            s[i][j] = v;
        }
    }
    Ok(s)
}

/// Galois group of `Q(T)` and the row placement state of the random-row
/// algorithm.
pub struct GaloisOrbitCache {
    /// Exponents `k` coprime to the conductor of `T`, lifted to be coprime to
    /// every conductor occurring in S as well.
    pub gal_group: Vec<i64>,
    rows: Vec<Option<Vec<Cyclotomic>>>,
    first_row: Vec<Cyclotomic>,
    done: HashSet<(usize, usize)>,
    pending: HashMap<(usize, usize), Vec<Cyclotomic>>,
    pub direct_rows: usize,
    pub placed_rows: usize,
}

impl GaloisOrbitCache {
    fn new(objects: &Objects, t: &[Cyclotomic], s_conductor: u32) -> Self {
        let nt = t.iter().fold(1u32, |acc, x| acc.lcm(&x.root_of_unity_order().expect("T entries are roots of unity")));
        let m = nt.lcm(&s_conductor) as i64;
        let nt = nt as i64;
        let gal_group = (1..=nt)
            .filter(|k| k.gcd(&nt) == 1)
            .map(|k| (0..).map(|s| k + s * nt).find(|k2| k2.gcd(&m) == 1).expect("Dirichlet") % m)
            .collect();
        let order = objects.group().order() as i64;
        let first_row = objects.list.iter().map(|o| Cyclotomic::rational(o.dim_total as i64, order)).collect();
        Self {
            gal_group,
            rows: vec![None; objects.rank()],
            first_row,
            done: HashSet::new(),
            pending: HashMap::new(),
            direct_rows: 0,
            placed_rows: 0,
        }
    }

    fn conjugate_row(&self, i: usize, k: i64) -> Vec<Cyclotomic> {
        self.rows[i]
            .as_ref()
            .expect("known row")
            .iter()
            .map(|x| x.galois(k.rem_euclid(x.conductor() as i64)).expect("k coprime to conductor").normalized())
            .collect()
    }

    fn fits(&self, x: usize, v: &[Cyclotomic]) -> bool {
        if self.first_row[x] != v[0] {
            return false;
        }
        self.rows.iter().enumerate().all(|(j, row)| row.as_ref().is_none_or(|row| row[x] == v[j]))
    }

    /// Places `σ_k(row i)` if its position is forced. Returns true on placement.
    fn try_place(&mut self, i: usize, kk: usize) -> Result<bool, ModularError> {
        if self.done.contains(&(i, kk)) {
            return Ok(false);
        }
        let v = match self.pending.remove(&(i, kk)) {
            Some(v) => v,
            None => self.conjugate_row(i, self.gal_group[kk]),
        };
        if self.rows.iter().flatten().any(|row| *row == v) {
            self.done.insert((i, kk));
            return Ok(false);
        }
        let candidates: Vec<usize> = (0..self.rows.len()).filter(|&x| self.rows[x].is_none() && self.fits(x, &v)).collect();
        match candidates.as_slice() {
            [] => Err(ModularError::PlacementContradiction),
            [x] => {
                self.rows[*x] = Some(v);
                self.placed_rows += 1;
                self.done.insert((i, kk));
                Ok(true)
            }
            _ => {
                self.pending.insert((i, kk), v);
                Ok(false)
            }
        }
    }
}

/// S by computing random rows directly and filling in their Galois conjugates.
pub fn s_matrix_galois(objects: &Objects, t: &[Cyclotomic], seed: u64) -> Result<Matrix, ModularError> {
    s_matrix_galois_stats(objects, t, seed).map(|(s, _)| s)
}

/// As [`s_matrix_galois`], also returning the placement state.
pub fn s_matrix_galois_stats(objects: &Objects, t: &[Cyclotomic], seed: u64) -> Result<(Matrix, GaloisOrbitCache), ModularError> {
    let tr = Transport::new(objects);
    let s_conductor = tr.tables.iter().flatten().flatten().next().map_or(1, |v| v.conductor());
    let mut cache = GaloisOrbitCache::new(objects, t, s_conductor);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let unknown: Vec<usize> = (0..cache.rows.len()).filter(|&i| cache.rows[i].is_none()).collect();
        if unknown.is_empty() {
            break;
        }
        let r = unknown[rng.random_range(0..unknown.len())];
        cache.rows[r] = Some(tr.row(objects, r));
        cache.direct_rows += 1;
        let mut progress = true;
        while progress {
            progress = false;
            for i in 0..cache.rows.len() {
                if cache.rows[i].is_none() {
                    continue;
                }
                for kk in 0..cache.gal_group.len() {
                    if cache.gal_group[kk] == 1 {
                        continue;
                    }
                    progress |= cache.try_place(i, kk)?;
                }
            }
        }
    }
    let s = cache.rows.iter().map(|r| r.clone().expect("all rows known")).collect();
    Ok((s, cache))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Auto,
    Direct,
    Abelian,
    Galois,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Strategy::Auto),
            "direct" => Ok(Strategy::Direct),
            "abelian" => Ok(Strategy::Abelian),
            "galois" => Ok(Strategy::Galois),
            _ => Err(format!("unknown strategy {s:?} (expected auto, direct, abelian or galois)")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Auto => "auto",
            Strategy::Direct => "direct",
            Strategy::Abelian => "abelian",
            Strategy::Galois => "galois",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectLabel {
    pub class_rep: usize,
    pub char_dim: u64,
    pub class_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularData {
    pub group: String,
    pub order: usize,
    pub label: String,
    pub class_vector: Vec<u64>,
    pub rank: usize,
    /// lcm of the conductors of all entries.
    pub conductor: u32,
    pub seed: u64,
    pub objects: Vec<ObjectLabel>,
    #[serde(rename = "T")]
    pub t: Vec<Cyclotomic>,
    #[serde(rename = "S")]
    pub s: Matrix,
}

impl ModularData {
    /// Runs the whole pipeline for one cocycle.
    pub fn compute(omega: &Cocycle3, class_vector: Vec<u64>, strategy: Strategy, seed: u64) -> Result<Self, ModularError> {
        let objects = simple_objects(omega)?;
        let t: Vec<Cyclotomic> = t_matrix(&objects).iter().map(Cyclotomic::normalized).collect();
        let abelian = omega.group().is_abelian();
        let s = match strategy {
            Strategy::Direct => s_matrix_direct(&objects),
            Strategy::Abelian => s_matrix_abelian(&objects)?,
            Strategy::Galois => s_matrix_galois(&objects, &t, seed)?,
            Strategy::Auto if abelian => s_matrix_abelian(&objects)?,
            Strategy::Auto => s_matrix_galois(&objects, &t, seed)?,
        };
        Ok(Self::assemble(&objects, class_vector, seed, t, s))
    }

    pub fn assemble(objects: &Objects, class_vector: Vec<u64>, seed: u64, t: Vec<Cyclotomic>, s: Matrix) -> Self {
        let g = objects.group();
        let conductor = t.iter().chain(s.iter().flatten()).fold(1u32, |acc, x| acc.lcm(&x.conductor()));
        Self {
            group: g.name().to_string(),
            order: g.order(),
            label: CATEGORY_LABEL.to_string(),
            class_vector,
            rank: objects.rank(),
            conductor,
            seed,
            objects: objects
                .list
                .iter()
                .map(|o| ObjectLabel { class_rep: o.representative(), char_dim: o.character.dim(), class_size: o.class_.size() })
                .collect(),
            t,
            s,
        }
    }

    /// File-name form of the class vector: entries joined by `-`, or `none`.
    pub fn class_label(&self) -> String {
        class_label(&self.class_vector)
    }

    /// `group/class_label`, unique within a database.
    pub fn id(&self) -> String {
        format!("{}/{}", self.group, self.class_label())
    }

    pub fn dims(&self) -> Vec<u64> {
        self.objects.iter().map(|o| o.class_size as u64 * o.char_dim).collect()
    }
}

pub fn class_label(v: &[u64]) -> String {
    if v.is_empty() {
        "none".to_string()
    } else {
        v.iter().map(u64::to_string).collect::<Vec<_>>().join("-")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{:<22} {}", c.name, if c.passed { "ok" } else { "FAILED" })?;
            if let Some(w) = &c.witness {
                write!(f, " at {w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn check(name: &'static str, witness: Option<String>) -> Check {
    Check { name, passed: witness.is_none(), witness }
}

fn find_entry(r: usize, c: usize, mut bad: impl FnMut(usize, usize) -> bool) -> Option<String> {
    (0..r).flat_map(|i| (0..c).map(move |j| (i, j))).find(|&(i, j)| bad(i, j)).map(|(i, j)| format!("({i},{j})"))
}

fn is_identity_entry(m: &Matrix, i: usize, j: usize) -> bool {
    if i == j {
        m[i][j].is_one()
    } else {
        m[i][j].is_zero()
    }
}

/// Checks every modular data axiom exactly.
pub fn verify_modular(md: &ModularData) -> VerificationReport {
    let r = md.rank;
    let mut checks = Vec::new();
    let shape_ok = md.t.len() == r && md.s.len() == r && md.s.iter().all(|row| row.len() == r) && md.objects.len() == r && r > 0;
    checks.push(check("shape", (!shape_ok).then(|| format!("rank {r}"))));
    if !shape_ok {
        return VerificationReport { checks };
    }
    let s = &md.s;
    let t = &md.t;
    checks.push(check(
        "conductor",
        find_entry(r, r + 1, |i, j| {
            let x = if j == r { &t[i] } else { &s[i][j] };
            md.conductor % x.min_conductor() != 0
        }),
    ));
    checks.push(check("t_unit", (!t[0].is_one()).then(|| "0".to_string())));
    checks.push(check(
        "t_roots_of_unity",
        t.iter().position(|x| !x.is_root_of_unity()).map(|i| i.to_string()),
    ));
    checks.push(check("s_symmetric", find_entry(r, r, |i, j| i < j && s[i][j] != s[j][i])));
    let order = md.order as i64;
    let dims = md.dims();
    checks.push(check(
        "s_first_row",
        (0..r)
            .find(|&j| s[0][j] != Cyclotomic::rational(dims[j] as i64, order) || dims[j] == 0)
            .map(|j| format!("(0,{j})")),
    ));
    let total: u128 = dims.iter().map(|&d| d as u128 * d as u128).sum();
    checks.push(check(
        "global_dimension",
        (total != (order as u128).pow(2)).then(|| format!("sum of squared dimensions {total}")),
    ));
    let s_dag: Matrix = (0..r).map(|i| (0..r).map(|j| s[j][i].conjugate()).collect()).collect();
    let unit = matmul(s, &s_dag);
    checks.push(check("unitarity", find_entry(r, r, |i, j| !is_identity_entry(&unit, i, j))));
    let s2 = matmul(s, s);
    let perm = {
        let cols_ok = (0..r).all(|j| (0..r).filter(|&i| s2[i][j].is_one()).count() == 1);
        let witness = find_entry(r, r, |i, j| !(s2[i][j].is_zero() || s2[i][j].is_one()))
            .or_else(|| (0..r).find(|&i| s2[i].iter().filter(|x| x.is_one()).count() != 1).map(|i| format!("row {i}")));
        witness.or_else(|| (!cols_ok).then(|| "columns".to_string()))
    };
    checks.push(check("charge_conjugation", perm));
    let st: Matrix = s.iter().map(|row| row.iter().zip(t).map(|(x, y)| x * y).collect()).collect();
    let st3 = matmul(&matmul(&st, &st), &st);
    checks.push(check("modular_relation", find_entry(r, r, |i, j| st3[i][j] != s2[i][j])));
    let verlinde = match fusion_rules(s) {
        Ok(_) => None,
        Err(ModularError::NonIntegralFusion { i, j, k }) => Some(format!("({i},{j},{k})")),
        Err(e) => Some(e.to_string()),
    };
    checks.push(check("verlinde", verlinde));
    VerificationReport { checks }
}

/// Fusion coefficients `N[i][j][k]` from the Verlinde formula.
///
/// Candidates are found in floating point, then confirmed exactly through
/// `Σ_k N_ij^k S_km = S_im S_jm / S_0m`, which determines them since S is
/// invertible.
pub fn fusion_rules(s: &Matrix) -> Result<Vec<Vec<Vec<u64>>>, ModularError> {
    let r = s.len();
    if s.iter().any(|row| row.len() != r) {
        return Err(ModularError::Shape(format!("S is not square ({r} rows)")));
    }
    if let Some(m) = (0..r).find(|&m| s[0][m].is_zero() || s[0][m].as_rational().is_none()) {
        return Err(ModularError::NonIntegralFusion { i: 0, j: 0, k: m });
    }
    let f: Vec<Vec<Complex64>> = s.iter().map(|row| row.iter().map(Cyclotomic::to_complex).collect()).collect();
    let ratio: Vec<Vec<Complex64>> = (0..r).map(|i| (0..r).map(|m| f[i][m] / f[0][m]).collect()).collect();
    let mut n = vec![vec![vec![0u64; r]; r]; r];
    for i in 0..r {
        for j in i..r {
            for k in 0..r {
                let v: Complex64 = (0..r).map(|m| ratio[i][m] * f[j][m] * f[k][m].conj()).sum();
                let rounded = v.re.round();
                if (v.re - rounded).abs() > 1e-6 || v.im.abs() > 1e-6 || rounded < 0.0 {
                    return Err(ModularError::NonIntegralFusion { i, j, k });
                }
                n[i][j][k] = rounded as u64;
                n[j][i][k] = rounded as u64;
            }
        }
    }
    let inv_first: Vec<BigRational> = (0..r).map(|m| s[0][m].as_rational().expect("rational").recip()).collect();
    let d: Matrix = (0..r).map(|i| (0..r).map(|m| s[i][m].mul_rational(&inv_first[m])).collect()).collect();
    for i in 0..r {
        for j in i..r {
            let support: Vec<(usize, u64)> = (0..r).filter(|&k| n[i][j][k] != 0).map(|k| (k, n[i][j][k])).collect();
            for m in 0..r {
                let lhs: Cyclotomic = support.iter().map(|&(k, c)| s[k][m].mul_integer(c as i64)).sum();
                if lhs != &d[i][m] * &s[j][m] {
                    let k = support.first().map_or(0, |&(k, _)| k);
                    return Err(ModularError::NonIntegralFusion { i, j, k });
                }
            }
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{orbit_representatives, DEFAULT_H3_BOUND};
    use crate::group::{build_group, catalog};
    use std::sync::Arc;

    fn c(x: i64) -> Cyclotomic {
        Cyclotomic::from_integer(x)
    }

    fn instances(max_order: usize) -> Vec<(String, Cocycle3, Vec<u64>)> {
        let mut out = Vec::new();
        for n in 1..=max_order {
            for name in catalog(n).unwrap() {
                let g = build_group(name).unwrap();
                let (_, orbits) = orbit_representatives(&g, DEFAULT_H3_BOUND).unwrap();
                for o in orbits {
                    out.push((name.to_string(), o.cocycle, o.representative));
                }
            }
        }
        out
    }

    fn trivial(spec: &str) -> Objects {
        simple_objects(&Cocycle3::trivial(Arc::new(build_group(spec).unwrap()))).unwrap()
    }

    fn i4(k: i64) -> Cyclotomic {
        Cyclotomic::root_of_unity(4, k)
    }

    fn nontrivial_c2() -> Cocycle3 {
        let g = Arc::new(build_group("C2").unwrap());
        // ω(x,x,x) = -1
        Cocycle3::new(g, 2, vec![0, 0, 0, 0, 0, 0, 0, 1]).unwrap()
    }

    #[test]
    fn object_counts() {
        assert_eq!(trivial("C1").rank(), 1);
        assert_eq!(trivial("C2").rank(), 4);
        assert_eq!(trivial("S3").rank(), 8);
        let s3 = trivial("S3");
        let dims: Vec<u64> = s3.list().iter().map(|o| o.dim_total).collect();
        assert_eq!(dims, vec![1, 1, 2, 3, 3, 2, 2, 2]);
        assert_eq!(dims.iter().map(|d| d * d).sum::<u64>(), 36);
        for name in ["C4", "C2xC2", "C6", "C2xC2xC2", "C4xC2"] {
            let n = build_group(name).unwrap().order();
            assert_eq!(trivial(name).rank(), n * n, "{name}");
        }
        let first = s3.get(0);
        assert_eq!(first.class_.members, vec![0]);
        assert!(first.character.values().iter().all(Cyclotomic::is_one));
    }

    #[test]
    fn t_examples() {
        assert_eq!(t_matrix(&trivial("C1")), vec![c(1)]);
        assert_eq!(t_matrix(&trivial("C2")), vec![c(1), c(1), c(1), c(-1)]);
        let t = t_matrix(&simple_objects(&nontrivial_c2()).unwrap());
        assert_eq!(t[..2], [c(1), c(1)]);
        let mut twisted = t[2..].to_vec();
        twisted.sort();
        let mut want = vec![i4(1), i4(3)];
        want.sort();
        assert_eq!(twisted, want);
    }

    #[test]
    fn s_examples() {
        let s = s_matrix_direct(&trivial("C2"));
        let h = |x: i64| Cyclotomic::rational(x, 2);
        let want = vec![
            vec![h(1), h(1), h(1), h(1)],
            vec![h(1), h(1), h(-1), h(-1)],
            vec![h(1), h(-1), h(1), h(-1)],
            vec![h(1), h(-1), h(-1), h(1)],
        ];
        assert_eq!(s, want);
        assert_eq!(s_matrix_direct(&trivial("C1")), vec![vec![c(1)]]);
        let s3 = s_matrix_direct(&trivial("S3"));
        let dims = [1, 1, 2, 3, 3, 2, 2, 2];
        for (j, &d) in dims.iter().enumerate() {
            assert_eq!(s3[0][j], Cyclotomic::rational(d, 6));
        }
    }

    #[test]
    fn lower_triangle_matches_upper() {
        for (name, w, v) in instances(6).into_iter().chain(instances(8).into_iter().filter(|(n, _, _)| n == "Q8" || n == "D4")) {
            let objs = simple_objects(&w).unwrap();
            let tr = Transport::new(&objs);
            for i in 0..objs.rank() {
                for j in 0..i {
                    assert_eq!(tr.entry(&objs, i, j), tr.entry(&objs, j, i), "{name} {v:?} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn abelian_shortcut_matches_direct() {
        for (name, w, v) in instances(4) {
            let objs = simple_objects(&w).unwrap();
            assert_eq!(s_matrix_abelian(&objs).unwrap(), s_matrix_direct(&objs), "{name} {v:?}");
        }
        assert!(matches!(s_matrix_abelian(&trivial("S3")), Err(ModularError::NotAbelian)));
    }

    #[test]
    fn galois_matches_direct() {
        for (name, w, v) in instances(6) {
            let objs = simple_objects(&w).unwrap();
            let t: Vec<Cyclotomic> = t_matrix(&objs).iter().map(Cyclotomic::normalized).collect();
            let direct = s_matrix_direct(&objs);
            for seed in 0..10 {
                assert_eq!(s_matrix_galois(&objs, &t, seed).unwrap(), direct, "{name} {v:?} seed {seed}");
            }
        }
    }

    #[test]
    fn galois_skips_rows() {
        let w = nontrivial_c2();
        let objs = simple_objects(&w).unwrap();
        let t = t_matrix(&objs);
        let (_, cache) = s_matrix_galois_stats(&objs, &t, 0).unwrap();
        assert_eq!(cache.direct_rows + cache.placed_rows, 4);
        // rational S: every row is computed
        let objs = trivial("C2");
        let (_, cache) = s_matrix_galois_stats(&objs, &t_matrix(&objs), 3).unwrap();
        assert_eq!((cache.direct_rows, cache.placed_rows), (4, 0));
    }

    #[test]
    fn transport_examples() {
        let objs = trivial("S3");
        let g = objs.group().clone();
        for (i, o) in objs.list().iter().enumerate() {
            let a = o.representative();
            for h in g.elements().filter(|&h| g.commute(a, h)) {
                let local = o.centralizer.local_index(h).unwrap();
                assert_eq!(conjugate_character_transport(&objs, i, a, h).unwrap(), *o.character.value(local));
            }
            for &y in &o.class_.members {
                let ay = o.class_.witness(y).unwrap();
                for h in g.elements().filter(|&h| g.commute(y, h)) {
                    let local = o.centralizer.local_index(g.conj(ay, h)).unwrap();
                    assert_eq!(conjugate_character_transport(&objs, i, y, h).unwrap(), *o.character.value(local));
                }
            }
        }
        let t3 = objs.list().iter().position(|o| o.class_.size() == 3).unwrap();
        let y = objs.get(t3).class_.members[0];
        let bad = g.elements().find(|&h| !g.commute(y, h)).unwrap();
        assert!(matches!(conjugate_character_transport(&objs, t3, y, bad), Err(ModularError::NotCentralizing { .. })));
        let not_member = g.elements().find(|&x| !objs.get(t3).class_.contains(x)).unwrap();
        assert!(matches!(
            conjugate_character_transport(&objs, t3, not_member, 0),
            Err(ModularError::NotInClass { .. })
        ));

        // C2 with ω(x,x,x) = -1: χ(x) = ±i, consistent with T
        let objs = simple_objects(&nontrivial_c2()).unwrap();
        let t = t_matrix(&objs);
        for i in 2..4 {
            assert_eq!(conjugate_character_transport(&objs, i, 1, 1).unwrap(), t[i]);
        }
    }

    #[test]
    fn s_coefficient_examples() {
        let objs = trivial("S3");
        let g = objs.group().clone();
        for i in 0..objs.rank() {
            for j in 0..objs.rank() {
                for &x in &objs.get(i).class_.members {
                    for &y in objs.get(j).class_.members.iter().filter(|&&y| g.commute(x, y)) {
                        assert!(s_coefficient(&objs, i, j, x, y).unwrap().is_one());
                    }
                }
            }
        }
        let objs = simple_objects(&nontrivial_c2()).unwrap();
        assert!(s_coefficient(&objs, 2, 2, 1, 1).unwrap().is_one());
        let s3 = trivial("S3");
        let (i, j) = (3, 3);
        let (x, y) = (s3.get(i).class_.members[0], s3.get(j).class_.members[1]);
        assert!(matches!(s_coefficient(&s3, i, j, x, y), Err(ModularError::NotCommuting(..))));
    }

    #[test]
    fn fusion_examples() {
        let s = s_matrix_direct(&trivial("C2"));
        let n = fusion_rules(&s).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(n[i][j].iter().sum::<u64>(), 1);
                assert_eq!(n[0][i][j], (i == j) as u64);
            }
        }
        // the objects form Z2 x Z2 under fusion
        for i in 0..4 {
            let sq: Vec<usize> = (0..4).filter(|&k| n[i][i][k] == 1).collect();
            assert_eq!(sq, vec![0]);
        }
        let s3 = s_matrix_direct(&trivial("S3"));
        let n = fusion_rules(&s3).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(n[i][j], n[j][i]);
                assert_eq!(n[0][i][j], (i == j) as u64);
            }
        }
        let mut bad = s3.clone();
        bad[1][2] = &bad[1][2] + &Cyclotomic::rational(1, 5);
        assert!(matches!(fusion_rules(&bad), Err(ModularError::NonIntegralFusion { .. })));
    }

    #[test]
    fn verification_and_fault_injection() {
        for spec in ["C1", "C2", "S3"] {
            let w = Cocycle3::trivial(Arc::new(build_group(spec).unwrap()));
            let md = ModularData::compute(&w, vec![], Strategy::Auto, 0).unwrap();
            assert!(verify_modular(&md).all_passed(), "{spec}");
        }
        let w = Cocycle3::trivial(Arc::new(build_group("C2").unwrap()));
        let mut md = ModularData::compute(&w, vec![0], Strategy::Direct, 0).unwrap();
        md.s[1][2] = Cyclotomic::rational(1, 3);
        let rep = verify_modular(&md);
        let unitarity = rep.checks.iter().find(|c| c.name == "unitarity").unwrap();
        assert!(!unitarity.passed);
        assert!(unitarity.witness.is_some());
        md.t[3] = Cyclotomic::rational(1, 2);
        assert!(!verify_modular(&md).checks.iter().find(|c| c.name == "t_roots_of_unity").unwrap().passed);
    }

    #[test]
    fn all_small_instances_verify() {
        for (name, w, v) in instances(6) {
            let md = ModularData::compute(&w, v.clone(), Strategy::Auto, 0).unwrap();
            let rep = verify_modular(&md);
            assert!(rep.all_passed(), "{name} {v:?}\n{rep}");
        }
    }

    #[test]
    fn json_round_trip() {
        let (_, w, v) = instances(6).into_iter().find(|(n, _, v)| n == "S3" && v == &vec![1]).unwrap();
        let md = ModularData::compute(&w, v, Strategy::Galois, 7).unwrap();
        let text = serde_json::to_string(&md).unwrap();
        let back: ModularData = serde_json::from_str(&text).unwrap();
        assert_eq!(back, md);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        assert!(text.contains("\"T\"") && text.contains("\"S\"") && text.contains("\"class_rep\""));
        assert_eq!("galois".parse::<Strategy>().unwrap(), Strategy::Galois);
        assert!("fast".parse::<Strategy>().is_err());
    }
}
