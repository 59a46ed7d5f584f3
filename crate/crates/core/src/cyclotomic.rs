//! Exact arithmetic in cyclotomic fields `Q(ζ_N)`.
//!
//! An element is stored as the residue of a rational polynomial in `ζ_N`
//! modulo the cyclotomic polynomial `Φ_N`, i.e. as coordinates in the power
//! basis `1, ζ, …, ζ^{φ(N)-1}`. Coordinates are kept over a common positive
//! denominator with the gcd removed, so for a fixed conductor the
//! representation is unique. Values of different conductors are embedded
//! into the lcm before arithmetic.
//!
//! Coefficients live in `i64` while they fit and are promoted to `BigInt`
//! on overflow; the two representations never hold the same value.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CyclotomicError;
use crate::int::Int as Coeff;

/// Largest conductor accepted by the field cache.
pub const MAX_CONDUCTOR: u32 = 1 << 16;

// ---------------------------------------------------------------------------
// Field data
// ---------------------------------------------------------------------------

/// Per-conductor reduction data.
pub(crate) struct Field {
    n: u32,
    phi: usize,
    /// `ζ^k` for `k in 0..n` in the power basis, as sparse `(index, coeff)`.
    powers: Vec<Vec<(usize, i64)>>,
}

fn fields() -> &'static RwLock<HashMap<u32, &'static Field>> {
    static FIELDS: OnceLock<RwLock<HashMap<u32, &'static Field>>> = OnceLock::new();
    FIELDS.get_or_init(Default::default)
}

pub(crate) fn field(n: u32) -> &'static Field {
    assert!(n >= 1 && n <= MAX_CONDUCTOR, "conductor {n} out of range");
    if let Some(f) = fields().read().expect("field cache").get(&n) {
        return f;
    }
    let mut map = fields().write().expect("field cache");
    *map.entry(n).or_insert_with(|| Box::leak(Box::new(Field::new(n))))
}

/// Dense integer polynomial, lowest degree first.
fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = *den.last().expect("nonzero divisor");
    let mut quot = vec![0i64; rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd] / lead;
        quot[i] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[i + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// Integer coefficients of `Φ_n`, computed by dividing `x^n - 1` by `Φ_d`
/// for every proper divisor `d` of `n`.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    fn rec(n: u32, cache: &mut HashMap<u32, Vec<i64>>) -> Vec<i64> {
        if let Some(p) = cache.get(&n) {
            return p.clone();
        }
        let mut p = vec![0i64; n as usize + 1];
        p[0] = -1;
        p[n as usize] = 1;
        for d in 1..n {
            if n % d == 0 {
                let phi_d = rec(d, cache);
                p = poly_div_exact(&p, &phi_d);
            }
        }
        cache.insert(n, p.clone());
        p
    }
    rec(n, &mut HashMap::new())
}

pub fn euler_phi(n: u32) -> usize {
    (1..=n).filter(|&k| k.gcd(&n) == 1).count()
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl Field {
    fn new(n: u32) -> Self {
        let phi_poly = cyclotomic_polynomial(n);
        let phi = phi_poly.len() - 1;
        let mut powers = Vec::with_capacity(n as usize);
        let mut cur = vec![0i64; phi];
        cur[0] = 1;
        for _ in 0..n {
            powers.push(
                cur.iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(i, &c)| (i, c))
                    .collect(),
            );
            // multiply by x and reduce with the monic Φ_n
            let top = cur[phi - 1];
            for i in (1..phi).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for i in 0..phi {
                    cur[i] -= top * phi_poly[i];
                }
            }
        }
        Self { n, phi, powers }
    }

    fn power(&self, k: usize) -> &[(usize, i64)] {
        &self.powers[k % self.n as usize]
    }
}

// ---------------------------------------------------------------------------
// Coefficient arithmetic, generic over i64 (checked) and BigInt
// ---------------------------------------------------------------------------

type Parts<C> = (C, Vec<C>);

fn normalize<C: Coeff>(mut den: C, mut num: Vec<C>) -> Parts<C> {
    if num.iter().all(|c| c.is_zero()) {
        return (C::one(), num.into_iter().map(|_| C::zero()).collect());
    }
    if den.is_negative() {
        den = -den;
        num.iter_mut().for_each(|c| *c = -c.clone());
    }
    let mut g = den.clone();
    for c in &num {
        if g.is_one() {
            break;
        }
        g = g.gcd(c);
    }
    if !g.is_one() {
        den = den.div_floor(&g);
        num.iter_mut().for_each(|c| *c = c.div_floor(&g));
    }
    (den, num)
}

fn add_parts<C: Coeff>(da: &C, a: &[C], db: &C, b: &[C], subtract: bool) -> Option<Parts<C>> {
    let (den, sa, sb) = if da == db {
        (da.clone(), C::one(), C::one())
    } else {
        let g = da.gcd(db);
        let sa = db.div_floor(&g);
        let sb = da.div_floor(&g);
        (da.c_mul(&sa)?, sa, sb)
    };
    let mut num = Vec::with_capacity(a.len());
    for (x, y) in a.iter().zip(b) {
        let x = if sa.is_one() { x.clone() } else { x.c_mul(&sa)? };
        let y = if sb.is_one() { y.clone() } else { y.c_mul(&sb)? };
        num.push(if subtract { x.c_sub(&y)? } else { x.c_add(&y)? });
    }
    Some(normalize(den, num))
}

fn mul_parts<C: Coeff>(field: &Field, da: &C, a: &[C], db: &C, b: &[C]) -> Option<Parts<C>> {
    let phi = field.phi;
    let mut prod = vec![C::zero(); 2 * phi - 1];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
            prod[i + j] = prod[i + j].c_add(&x.c_mul(y)?)?;
        }
    }
    let mut out: Vec<C> = prod.drain(..phi).collect();
    for (k, c) in prod.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        for &(idx, coef) in field.power(phi + k) {
            out[idx] = out[idx].c_add(&c.c_mul(&C::from_i64(coef))?)?;
        }
    }
    Some(normalize(da.c_mul(db)?, out))
}

/// Applies `ζ_from^i ↦ ζ_to^{exp(i)}` to every basis element.
fn map_basis<C: Coeff>(to: &Field, den: &C, num: &[C], exp: impl Fn(usize) -> usize) -> Option<Parts<C>> {
    let mut out = vec![C::zero(); to.phi];
    for (i, c) in num.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        for &(idx, coef) in to.power(exp(i)) {
            out[idx] = out[idx].c_add(&c.c_mul(&C::from_i64(coef))?)?;
        }
    }
    Some(normalize(den.clone(), out))
}

#[derive(Clone, PartialEq, Eq)]
enum Repr {
    Small(i64, Vec<i64>),
    Big(BigInt, Vec<BigInt>),
}

impl Repr {
    fn big(&self) -> (BigInt, Vec<BigInt>) {
        match self {
            Repr::Small(d, n) => (BigInt::from(*d), n.iter().map(|&c| BigInt::from(c)).collect()),
            Repr::Big(d, n) => (d.clone(), n.clone()),
        }
    }

    fn from_big(den: BigInt, num: Vec<BigInt>) -> Repr {
        let small_den = den.to_i64();
        let small_num: Option<Vec<i64>> = num.iter().map(|c| c.to_i64()).collect();
        match (small_den, small_num) {
            (Some(d), Some(n)) if d != i64::MIN && n.iter().all(|&c| c != i64::MIN) => Repr::Small(d, n),
            _ => Repr::Big(den, num),
        }
    }

    fn from_small(parts: Parts<i64>) -> Repr {
        Repr::Small(parts.0, parts.1)
    }
}

/// Runs `small` on i64 coefficients, falling back to `big` on overflow.
fn dispatch1(
    r: &Repr,
    small: impl FnOnce(&i64, &[i64]) -> Option<Parts<i64>>,
    big: impl FnOnce(&BigInt, &[BigInt]) -> Option<Parts<BigInt>>,
) -> Repr {
    if let Repr::Small(d, n) = r {
        if let Some(p) = small(d, n) {
            return Repr::from_small(p);
        }
    }
    let (d, n) = r.big();
    let (d, n) = big(&d, &n).expect("bigint arithmetic is total");
    Repr::from_big(d, n)
}

fn dispatch2(
    a: &Repr,
    b: &Repr,
    small: impl FnOnce(&i64, &[i64], &i64, &[i64]) -> Option<Parts<i64>>,
    big: impl FnOnce(&BigInt, &[BigInt], &BigInt, &[BigInt]) -> Option<Parts<BigInt>>,
) -> Repr {
    if let (Repr::Small(da, na), Repr::Small(db, nb)) = (a, b) {
        if let Some(p) = small(da, na, db, nb) {
            return Repr::from_small(p);
        }
    }
    let (da, na) = a.big();
    let (db, nb) = b.big();
    let (d, n) = big(&da, &na, &db, &nb).expect("bigint arithmetic is total");
    Repr::from_big(d, n)
}

// ---------------------------------------------------------------------------
// Cyclotomic
// ---------------------------------------------------------------------------

/// An exact element of the cyclotomic field of conductor `N`.
#[derive(Clone)]
pub struct Cyclotomic {
    field: &'static Field,
    repr: Repr,
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(v: i64) -> Self {
        Self::rational_small(v, 1)
    }

    fn rational_small(num: i64, den: i64) -> Self {
        let parts = normalize(den, vec![num]);
        Self { field: field(1), repr: Repr::from_small(parts) }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        let parts = normalize(q.denom().clone(), vec![q.numer().clone()]);
        Self { field: field(1), repr: Repr::from_big(parts.0, parts.1) }
    }

    /// `num / den` as a rational element.
    pub fn rational(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::rational_small(num, den)
    }

    /// `e^{2πi k / n}`.
    pub fn root_of_unity(n: u32, k: i64) -> Self {
        let f = field(n);
        let e = k.rem_euclid(n as i64) as usize;
        let mut num = vec![0i64; f.phi];
        for &(idx, c) in f.power(e) {
            num[idx] = c;
        }
        Self { field: f, repr: Repr::Small(1, num) }
    }

    /// Builds a value from rational power-basis coordinates of length `φ(n)`.
    pub fn from_coefficients(n: u32, coeffs: &[BigRational]) -> Result<Self, CyclotomicError> {
        if n == 0 || n > MAX_CONDUCTOR {
            return Err(CyclotomicError::Malformed(format!("conductor {n}")));
        }
        let f = field(n);
        if coeffs.len() != f.phi {
            return Err(CyclotomicError::Malformed(format!(
                "conductor {n} needs {} coefficients, got {}",
                f.phi,
                coeffs.len()
            )));
        }
        let den = coeffs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let num = coeffs.iter().map(|q| q.numer() * (&den / q.denom())).collect();
        let (d, n) = normalize(den, num);
        Ok(Self { field: f, repr: Repr::from_big(d, n) })
    }

    pub fn conductor(&self) -> u32 {
        self.field.n
    }

    /// Rational coordinates in the power basis of the stored conductor.
    pub fn coefficients(&self) -> Vec<BigRational> {
        let (den, num) = self.repr.big();
        num.into_iter().map(|c| BigRational::new(c, den.clone())).collect()
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Small(_, n) => n.iter().all(|&c| c == 0),
            Repr::Big(_, n) => n.iter().all(|c| c.is_zero()),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// Re-expresses the value in `Q(ζ_m)`; `m` must be a multiple of the conductor.
    pub fn embed(&self, m: u32) -> Result<Self, CyclotomicError> {
        let n = self.field.n;
        if m == 0 || m % n != 0 {
            return Err(CyclotomicError::Malformed(format!("cannot embed conductor {n} into {m}")));
        }
        if m == n {
            return Ok(self.clone());
        }
        let to = field(m);
        let step = (m / n) as usize;
        let repr = dispatch1(
            &self.repr,
            |d, c| map_basis(to, d, c, |i| i * step),
            |d, c| map_basis(to, d, c, |i| i * step),
        );
        Ok(Self { field: to, repr })
    }

    fn embed_unchecked(&self, m: u32) -> Self {
        self.embed(m).expect("multiple of conductor")
    }

    /// Brings both operands to a common conductor.
    fn aligned<'a>(a: &'a Self, b: &'a Self) -> (std::borrow::Cow<'a, Self>, std::borrow::Cow<'a, Self>) {
        use std::borrow::Cow;
        if a.field.n == b.field.n {
            return (Cow::Borrowed(a), Cow::Borrowed(b));
        }
        let m = a.field.n.lcm(&b.field.n);
        let ea = if a.field.n == m { Cow::Borrowed(a) } else { Cow::Owned(a.embed_unchecked(m)) };
        let eb = if b.field.n == m { Cow::Borrowed(b) } else { Cow::Owned(b.embed_unchecked(m)) };
        (ea, eb)
    }

    fn add_impl(&self, other: &Self, subtract: bool) -> Self {
        let (a, b) = Self::aligned(self, other);
        let repr = dispatch2(
            &a.repr,
            &b.repr,
            |da, na, db, nb| add_parts(da, na, db, nb, subtract),
            |da, na, db, nb| add_parts(da, na, db, nb, subtract),
        );
        Self { field: a.field, repr }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let (a, b) = Self::aligned(self, other);
        let f = a.field;
        let repr = dispatch2(
            &a.repr,
            &b.repr,
            |da, na, db, nb| mul_parts(f, da, na, db, nb),
            |da, na, db, nb| mul_parts(f, da, na, db, nb),
        );
        Self { field: f, repr }
    }

    /// Multiplies by `ζ_n^k`, embedding into `lcm(n, conductor)` when needed.
    pub fn mul_root_of_unity(&self, n: u32, k: i64) -> Self {
        let m = self.field.n.lcm(&n);
        let x = if m == self.field.n { std::borrow::Cow::Borrowed(self) } else { std::borrow::Cow::Owned(self.embed_unchecked(m)) };
        let shift = (k.rem_euclid(n as i64) as usize) * (m / n) as usize;
        let f = x.field;
        let repr = dispatch1(
            &x.repr,
            |d, c| map_basis(f, d, c, |i| i + shift),
            |d, c| map_basis(f, d, c, |i| i + shift),
        );
        Self { field: f, repr }
    }

    pub fn mul_rational(&self, q: &BigRational) -> Self {
        self * &Self::from_rational(q)
    }

    pub fn mul_integer(&self, k: i64) -> Self {
        self * &Self::from_integer(k)
    }

    pub fn div_integer(&self, k: i64) -> Self {
        assert!(k != 0, "division by zero");
        self * &Self::rational(1, k)
    }

    /// The Galois automorphism `ζ_N ↦ ζ_N^k`.
    pub fn galois(&self, k: i64) -> Result<Self, CyclotomicError> {
        let n = self.field.n;
        let kk = k.rem_euclid(n as i64) as usize;
        if (kk as u32).gcd(&n) != 1 && n != 1 {
            return Err(CyclotomicError::NotCoprime { k, conductor: n });
        }
        let f = self.field;
        let repr = dispatch1(
            &self.repr,
            |d, c| map_basis(f, d, c, |i| i * kk),
            |d, c| map_basis(f, d, c, |i| i * kk),
        );
        Ok(Self { field: f, repr })
    }

    /// Complex conjugation, `ζ ↦ ζ⁻¹`.
    pub fn conjugate(&self) -> Self {
        self.galois(-1).expect("-1 is a unit")
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        let (den, num) = self.repr.big();
        if num.iter().skip(1).any(|c| !c.is_zero()) {
            return None;
        }
        Some(BigRational::new(num[0].clone(), den))
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|q| q.is_integer()).map(|q| q.to_integer())
    }

    /// Double-precision evaluation, for display and diagnostics only.
    pub fn to_complex(&self) -> Complex64 {
        let n = self.field.n as f64;
        let (den, num) = self.repr.big();
        let den = den.to_f64().unwrap_or(f64::INFINITY);
        num.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let angle = 2.0 * std::f64::consts::PI * i as f64 / n;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN) / den, angle)
            })
            .sum()
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order if the value is a root of unity.
    pub fn root_of_unity_order(&self) -> Option<u32> {
        // roots of unity in Q(ζ_N) are ±ζ_N^k
        let bound = self.field.n.lcm(&2);
        if !self.pow(bound as u64).is_one() {
            return None;
        }
        let mut d: Vec<u32> = (1..=bound).filter(|d| bound % d == 0).collect();
        d.sort_unstable();
        d.into_iter().find(|&d| self.pow(d as u64).is_one())
    }

    pub fn is_root_of_unity(&self) -> bool {
        self.root_of_unity_order().is_some()
    }

    /// Multiplicative inverse via the product of the non-trivial conjugates.
    pub fn inverse(&self) -> Result<Self, CyclotomicError> {
        if self.is_zero() {
            return Err(CyclotomicError::DivisionByZero);
        }
        let n = self.field.n;
        let mut others = Self::one();
        for k in 2..n.max(2) {
            if k.gcd(&n) == 1 {
                others = &others * &self.galois(k as i64)?;
            }
        }
        let norm = (self * &others).as_rational().expect("field norm is rational");
        Ok(others.mul_rational(&norm.recip()))
    }

    /// Smallest conductor whose field contains the value.
    pub fn min_conductor(&self) -> u32 {
        self.normalized().conductor()
    }

    /// The same value expressed at its minimal conductor.
    pub fn normalized(&self) -> Self {
        let mut x = self.clone();
        'outer: loop {
            let n = x.field.n;
            if n == 1 {
                return x;
            }
            if x.is_zero() {
                return Self::zero();
            }
            for p in prime_factors(n) {
                if let Some(y) = x.descend(p) {
                    x = y;
                    continue 'outer;
                }
            }
            return x;
        }
    }

    /// Expresses the value in `Q(ζ_{N/p})` if it lies there.
    fn descend(&self, p: u32) -> Option<Self> {
        let n = self.field.n;
        let m = n / p;
        let to = field(m);
        let (den, num) = self.repr.big();
        if m % p == 0 {
            // Φ_N(x) = Φ_{N/p}(x^p): the subfield is spanned by ζ^{p j}
            if num.iter().enumerate().any(|(i, c)| i as u32 % p != 0 && !c.is_zero()) {
                return None;
            }
            let sub: Vec<BigInt> = num.iter().step_by(p as usize).cloned().collect();
            debug_assert_eq!(sub.len(), to.phi);
            let (d, c) = normalize(den, sub);
            return Some(Self { field: to, repr: Repr::from_big(d, c) });
        }
        // p ∥ N: fixed field of the kernel of (Z/N)^× → (Z/M)^×, a cyclic group
        let generator = kernel_generator(n, m, p);
        if self.galois(generator as i64).ok()? != *self {
            return None;
        }
        let descent = descent_map(m, n);
        let coeffs: Vec<BigRational> = descent
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(j, q)| q * BigRational::new(num[*j].clone(), den.clone()))
                    .fold(BigRational::zero(), |acc, t| acc + t)
            })
            .collect();
        let y = Self::from_coefficients(m, &coeffs).ok()?;
        debug_assert!(y.embed_unchecked(n) == *self);
        Some(y)
    }

    /// Total order on values: (minimal conductor, coefficient vector).
    pub fn cmp_canonical(&self, other: &Self) -> Ordering {
        let a = self.normalized();
        let b = other.normalized();
        a.cmp_repr(&b)
    }

    /// Order on the stored representation; agrees with [`Self::cmp_canonical`]
    /// only when both values already sit at their minimal conductor.
    pub fn cmp_repr(&self, other: &Self) -> Ordering {
        self.field.n.cmp(&other.field.n).then_with(|| {
            let (da, na) = self.repr.big();
            let (db, nb) = other.repr.big();
            for (x, y) in na.iter().zip(&nb) {
                let ord = (x * &db).cmp(&(y * &da));
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            Ordering::Equal
        })
    }

    /// Canonical textual key (minimal conductor form).
    pub fn canonical_string(&self) -> String {
        let x = self.normalized();
        let coeffs: Vec<String> = x.coefficients().iter().map(|q| q.to_string()).collect();
        format!("{}:{}", x.conductor(), coeffs.join(","))
    }
}

fn kernel_generator(n: u32, m: u32, p: u32) -> u32 {
    // k ≡ 1 (mod m), k ≡ g (mod p) with g a primitive root mod p
    let g = (1..p.max(2))
        .find(|&g| (1..p - 1).all(|e| mod_pow(g as u64, e as u64, p as u64) != 1) || p == 2)
        .unwrap_or(1);
    (0..p).map(|t| 1 + m * t).find(|&k| k % p == g % p).unwrap_or(1) % n.max(1)
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// A left inverse of the embedding `Q(ζ_m) → Q(ζ_n)` in power-basis coordinates.
struct Descent {
    rows: Vec<Vec<(usize, BigRational)>>,
}

fn descent_map(m: u32, n: u32) -> Arc<Descent> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<Descent>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(d) = cache.lock().expect("descent cache").get(&(m, n)) {
        return d.clone();
    }
    let d = Arc::new(build_descent(m, n));
    cache.lock().expect("descent cache").insert((m, n), d.clone());
    d
}

fn build_descent(m: u32, n: u32) -> Descent {
    let (fm, fn_) = (field(m), field(n));
    let step = (n / m) as usize;
    let (rows, cols) = (fn_.phi, fm.phi);
    // augmented [E | I_rows], reduce E to find cols pivot rows
    let mut a: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); cols + rows]; rows];
    for j in 0..cols {
        for &(idx, c) in fn_.power(j * step) {
            a[idx][j] = BigRational::from_integer(BigInt::from(c));
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[cols + i] = BigRational::one();
    }
    let mut r = 0;
    for c in 0..cols {
        let piv = (r..rows).find(|&i| !a[i][c].is_zero()).expect("embedding is injective");
        a.swap(r, piv);
        let inv = a[r][c].recip();
        a[r].iter_mut().for_each(|v| *v = &*v * &inv);
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pivot_row = a[r].clone();
                for (v, p) in a[i].iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *v = &*v - &f * p;
                    }
                }
            }
        }
        r += 1;
    }
    let rows_out = (0..cols)
        .map(|i| {
            a[i][cols..]
                .iter()
                .enumerate()
                .filter(|(_, q)| !q.is_zero())
                .map(|(j, q)| (j, q.clone()))
                .collect()
        })
        .collect();
    Descent { rows: rows_out }
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

/// A matrix brought to one conductor and one integer denominator.
struct Scaled {
    field: &'static Field,
    den: i64,
    cols: usize,
    data: Vec<Vec<i64>>,
}

fn scale(m: &[Vec<Cyclotomic>], n: u32) -> Option<Scaled> {
    let f = field(n);
    let mut den = 1i64;
    let mut entries = Vec::new();
    for x in m.iter().flatten() {
        let x = x.embed_unchecked(n);
        let Repr::Small(d, num) = x.repr else { return None };
        den = den.lcm(&d);
        if den > 1 << 40 {
            return None;
        }
        entries.push((d, num));
    }
    let data = entries
        .into_iter()
        .map(|(d, num)| {
            let s = den / d;
            num.iter().map(|c| c.checked_mul(s)).collect::<Option<Vec<i64>>>()
        })
        .collect::<Option<Vec<_>>>()?;
    Some(Scaled { field: f, den, cols: m.first().map_or(0, Vec::len), data })
}

/// Exact matrix product.
pub fn matmul(a: &[Vec<Cyclotomic>], b: &[Vec<Cyclotomic>]) -> Vec<Vec<Cyclotomic>> {
    let inner = b.len();
    assert!(a.iter().all(|r| r.len() == inner), "dimension mismatch");
    let n = a.iter().chain(b).flatten().fold(1u32, |acc, x| acc.lcm(&x.conductor()));
    match (scale(a, n), scale(b, n)) {
        (Some(sa), Some(sb)) if sa.den.checked_mul(sb.den).is_some() => matmul_scaled(&sa, &sb, a.len(), inner),
        _ => a
            .iter()
            .map(|row| {
                (0..b.first().map_or(0, Vec::len))
                    .map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum())
                    .collect()
            })
            .collect(),
    }
}

fn matmul_scaled(a: &Scaled, b: &Scaled, rows: usize, inner: usize) -> Vec<Vec<Cyclotomic>> {
    let f = a.field;
    let phi = f.phi;
    let den = BigInt::from(a.den) * BigInt::from(b.den);
    let mut out = Vec::with_capacity(rows);
    let mut acc = vec![0i128; 2 * phi - 1];
    for i in 0..rows {
        let mut row = Vec::with_capacity(b.cols);
        for j in 0..b.cols {
            acc.iter_mut().for_each(|c| *c = 0);
            for k in 0..inner {
                let x = &a.data[i * a.cols + k];
                let y = &b.data[k * b.cols + j];
                for (p, &u) in x.iter().enumerate().filter(|(_, u)| **u != 0) {
                    for (q, &v) in y.iter().enumerate().filter(|(_, v)| **v != 0) {
                        acc[p + q] += u as i128 * v as i128;
                    }
                }
            }
            let mut red: Vec<i128> = acc[..phi].to_vec();
            for (k, &c) in acc[phi..].iter().enumerate().filter(|(_, c)| **c != 0) {
                for &(idx, coef) in f.power(phi + k) {
                    red[idx] += c * coef as i128;
                }
            }
            let (d, num) = normalize(den.clone(), red.into_iter().map(BigInt::from).collect());
            row.push(Cyclotomic { field: f, repr: Repr::from_big(d, num) });
        }
        out.push(row);
    }
    out
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.field.n == other.field.n {
            return self.repr == other.repr;
        }
        let (a, b) = Self::aligned(self, other);
        a.repr == b.repr
    }
}

impl Eq for Cyclotomic {}

impl Hash for Cyclotomic {
    fn hash<H: Hasher>(&self, state: &mut H) {
        let x = self.normalized();
        x.field.n.hash(state);
        let (d, n) = x.repr.big();
        d.hash(state);
        n.hash(state);
    }
}

impl PartialOrd for Cyclotomic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cyclotomic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_canonical(other)
    }
}

impl Default for Cyclotomic {
    fn default() -> Self {
        Self::zero()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a> $tr<&'a Cyclotomic> for &'a Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: &'a Cyclotomic) -> Cyclotomic {
                let f: fn(&Cyclotomic, &Cyclotomic) -> Cyclotomic = $body;
                f(self, rhs)
            }
        }
        impl $tr<Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: Cyclotomic) -> Cyclotomic {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: &'a Cyclotomic) -> Cyclotomic {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.add_impl(b, false));
forward_binop!(Sub, sub, |a, b| a.add_impl(b, true));
forward_binop!(Mul, mul, |a, b| a.mul_impl(b));

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        let repr = match &self.repr {
            Repr::Small(d, n) if n.iter().all(|&c| c != i64::MIN) => {
                Repr::Small(*d, n.iter().map(|&c| -c).collect())
            }
            r => {
                let (d, n) = r.big();
                Repr::from_big(d, n.into_iter().map(|c| -c).collect())
            }
        };
        Cyclotomic { field: self.field, repr }
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}

impl AddAssign<&Cyclotomic> for Cyclotomic {
    fn add_assign(&mut self, rhs: &Cyclotomic) {
        *self = self.add_impl(rhs, false);
    }
}

impl AddAssign for Cyclotomic {
    fn add_assign(&mut self, rhs: Cyclotomic) {
        *self += &rhs;
    }
}

impl Sum for Cyclotomic {
    fn sum<I: Iterator<Item = Cyclotomic>>(iter: I) -> Self {
        iter.fold(Cyclotomic::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Cyclotomic> for Cyclotomic {
    fn sum<I: Iterator<Item = &'a Cyclotomic>>(iter: I) -> Self {
        iter.fold(Cyclotomic::zero(), |acc, x| acc + x)
    }
}

impl Product for Cyclotomic {
    fn product<I: Iterator<Item = Cyclotomic>>(iter: I) -> Self {
        iter.fold(Cyclotomic::one(), |acc, x| acc * x)
    }
}

impl From<i64> for Cyclotomic {
    fn from(v: i64) -> Self {
        Self::from_integer(v)
    }
}

impl From<i32> for Cyclotomic {
    fn from(v: i32) -> Self {
        Self::from_integer(v as i64)
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// GAP-style rendering, e.g. `1/2 - E(8)^3`.
impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.field.n;
        let terms: Vec<(usize, BigRational)> = self
            .coefficients()
            .into_iter()
            .enumerate()
            .filter(|(_, q)| !q.is_zero())
            .collect();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (t, (i, q)) in terms.iter().enumerate() {
            let (sign, mag) = if q.is_negative() { ("-", -q.clone()) } else { ("+", q.clone()) };
            if t == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            match (*i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "E({n})")?,
                (1, false) => write!(f, "{mag}*E({n})")?,
                (e, true) => write!(f, "E({n})^{e}")?,
                (e, false) => write!(f, "{mag}*E({n})^{e}")?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CyclotomicJson {
    conductor: u32,
    coeffs: Vec<String>,
}

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CyclotomicJson {
            conductor: self.conductor(),
            coeffs: self.coefficients().iter().map(|q| q.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = CyclotomicJson::deserialize(d)?;
        let coeffs = raw
            .coeffs
            .iter()
            .map(|s| BigRational::from_str(s).map_err(|e| D::Error::custom(format!("bad rational `{s}`: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Cyclotomic::from_coefficients(raw.conductor, &coeffs).map_err(D::Error::custom)
    }
}
