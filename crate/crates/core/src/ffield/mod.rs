//! Exact arithmetic in finite fields `F_q`, `q = p^k` with `p` odd.
//!
//! Elements are stored as their index `Σ c_i p^i` in `0..q`, where `c_i` are
//! the coefficients of the canonical representative modulo the defining
//! polynomial (constant term first). For `k = 1` the index is the residue
//! itself. Small fields carry precomputed operation tables.

mod poly;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub(crate) use poly::pow_mod;

/// Largest field order accepted by [`make_field`].
pub const MAX_FIELD_ORDER: u64 = 1 << 24;
const TABLE_LIMIT: u32 = 256;

/// An element of some `F_q`; meaningful only together with its [`FieldDesc`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    chi: Vec<i8>,
}

struct Inner {
    p: u64,
    k: u32,
    q: u32,
    modulus: Vec<u64>,
    tables: Option<Tables>,
}

/// Description of `F_{p^k}` with a fixed irreducible modulus.
#[derive(Clone)]
pub struct FieldDesc {
    inner: Arc<Inner>,
}

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        self.inner.p == other.inner.p
            && self.inner.k == other.inner.k
            && self.inner.modulus == other.inner.modulus
    }
}
impl Eq for FieldDesc {}

impl fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.inner.q)?;
        if self.inner.k > 1 {
            write!(f, " (modulus {:?})", self.inner.modulus)?;
        }
        Ok(())
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::EvenCharacteristic(p));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

/// Builds `F_{p^k}` with the lexicographically least monic irreducible
/// modulus, comparing coefficient vectors from the constant term up.
pub fn make_field(p: u64, k: i64) -> Result<FieldDesc> {
    check_odd_prime(p)?;
    if k < 1 {
        return Err(Error::DegenerateDegree(k));
    }
    let k = u32::try_from(k).map_err(|_| Error::DegenerateDegree(k))?;
    let q = p
        .checked_pow(k)
        .filter(|&q| q <= MAX_FIELD_ORDER)
        .ok_or(Error::FieldTooLarge { p, k })?;
    let ku = k as usize;
    let modulus = (0..q)
        .map(|i| {
            // Constant term is the most significant digit of `i`.
            let mut coeffs = vec![0u64; ku + 1];
            let mut rest = i;
            for slot in coeffs[..ku].iter_mut().rev() {
                *slot = rest % p;
                rest /= p;
            }
            coeffs[ku] = 1;
            coeffs
        })
        .find(|f| poly::is_irreducible(f, p))
        .expect("an irreducible polynomial of every degree exists");
    let mut inner = Inner {
        p,
        k,
        q: q as u32,
        modulus,
        tables: None,
    };
    if inner.q <= TABLE_LIMIT {
        inner.tables = Some(build_tables(&inner));
    }
    Ok(FieldDesc {
        inner: Arc::new(inner),
    })
}

fn build_tables(f: &Inner) -> Tables {
    let q = f.q as usize;
    let mut add = vec![0u32; q * q];
    let mut mul = vec![0u32; q * q];
    for a in 0..q {
        for b in 0..q {
            add[a * q + b] = raw_add(f, a as u32, b as u32);
            mul[a * q + b] = raw_mul(f, a as u32, b as u32);
        }
    }
    let neg = (0..q as u32).map(|a| raw_neg(f, a)).collect();
    let mut inv = vec![0u32; q];
    for a in 1..q {
        inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u32;
    }
    let half = (f.q as u64 - 1) / 2;
    let chi = (0..q as u32)
        .map(|a| {
            if a == 0 {
                0
            } else if raw_pow(f, a, half) == 1 {
                1
            } else {
                -1
            }
        })
        .collect();
    Tables {
        add,
        mul,
        neg,
        inv,
        chi,
    }
}

fn decode(f: &Inner, mut x: u32) -> Vec<u64> {
    let p = f.p as u32;
    (0..f.k)
        .map(|_| {
            let c = x % p;
            x /= p;
            c as u64
        })
        .collect()
}

fn encode(f: &Inner, coeffs: &[u64]) -> u32 {
    coeffs
        .iter()
        .rev()
        .fold(0u64, |acc, &c| acc * f.p + c % f.p) as u32
}

fn raw_add(f: &Inner, a: u32, b: u32) -> u32 {
    let (x, y) = (decode(f, a), decode(f, b));
    let s: Vec<u64> = x.iter().zip(&y).map(|(u, v)| (u + v) % f.p).collect();
    encode(f, &s)
}

fn raw_neg(f: &Inner, a: u32) -> u32 {
    let s: Vec<u64> = decode(f, a).iter().map(|u| (f.p - u) % f.p).collect();
    encode(f, &s)
}

fn raw_mul(f: &Inner, a: u32, b: u32) -> u32 {
    let prod = poly::mul(&decode(f, a), &decode(f, b), f.p);
    let mut r = poly::rem(&prod, &f.modulus, f.p);
    r.resize(f.k as usize, 0);
    encode(f, &r)
}

fn raw_pow(f: &Inner, a: u32, mut e: u64) -> u32 {
    let mut acc = 1u32;
    let mut b = a;
    while e > 0 {
        if e & 1 == 1 {
            acc = raw_mul(f, acc, b);
        }
        b = raw_mul(f, b, b);
        e >>= 1;
    }
    acc
}

impl FieldDesc {
    pub fn p(&self) -> u64 {
        self.inner.p
    }

    pub fn k(&self) -> u32 {
        self.inner.k
    }

    /// Field order `q = p^k`.
    pub fn order(&self) -> u64 {
        self.inner.q as u64
    }

    /// Monic modulus, constant term first (length `k + 1`).
    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem(1)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, a: i64) -> FieldElem {
        FieldElem(a.rem_euclid(self.inner.p as i64) as u32)
    }

    pub fn from_index(&self, index: u32) -> FieldElem {
        assert!(
            index < self.inner.q,
            "index {index} outside F_{}",
            self.inner.q
        );
        FieldElem(index)
    }

    pub fn from_coefficients(&self, coeffs: &[u64]) -> FieldElem {
        assert!(coeffs.len() <= self.inner.k as usize);
        FieldElem(encode(&self.inner, coeffs))
    }

    /// Coefficient vector (length `k`, constant term first).
    pub fn coefficients(&self, x: FieldElem) -> Vec<u64> {
        decode(&self.inner, x.0)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + Clone {
        (0..self.inner.q).map(FieldElem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElem> + Clone {
        (1..self.inner.q).map(FieldElem)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        match &self.inner.tables {
            Some(t) => FieldElem(t.add[(a.0 * self.inner.q + b.0) as usize]),
            None => FieldElem(raw_add(&self.inner, a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        match &self.inner.tables {
            Some(t) => FieldElem(t.neg[a.0 as usize]),
            None => FieldElem(raw_neg(&self.inner, a.0)),
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        match &self.inner.tables {
            Some(t) => FieldElem(t.mul[(a.0 * self.inner.q + b.0) as usize]),
            None => FieldElem(raw_mul(&self.inner, a.0, b.0)),
        }
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        FieldElem(raw_pow(&self.inner, a.0, e))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElem) -> Option<FieldElem> {
        if a.is_zero() {
            return None;
        }
        Some(match &self.inner.tables {
            Some(t) => FieldElem(t.inv[a.0 as usize]),
            None => self.pow(a, self.order() - 2),
        })
    }

    /// Quadratic character: 0 at zero, otherwise the integer lift of
    /// `x^{(q-1)/2}` in `{+1, -1}`.
    pub fn quad_char(&self, x: FieldElem) -> i8 {
        if let Some(t) = &self.inner.tables {
            return t.chi[x.0 as usize];
        }
        if x.is_zero() {
            return 0;
        }
        match raw_pow(&self.inner, x.0, (self.order() - 1) / 2) {
            1 => 1,
            _ => -1,
        }
    }

    pub fn is_square(&self, x: FieldElem) -> bool {
        self.quad_char(x) >= 0
    }

    /// Least positive integer whose residue is a non-square in `F_q`.
    /// For `k >= 2` no such integer exists (every element of `F_p` is a
    /// square in `F_{p^2}`), and `None` is returned.
    pub fn least_nonresidue_int(&self) -> Option<i64> {
        (1..self.p() as i64).find(|&a| self.quad_char(self.from_int(a)) == -1)
    }
}

/// Legendre symbol `(a / p)` for an odd prime `p`.
pub fn legendre(a: i64, p: u64) -> i8 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Norm test for the ramified quadratic extension `E/Q_p`: a `Z_p`-unit is a
/// norm iff its residue is a nonzero square mod `p`.
pub fn is_norm_unit(delta: i64, p: u64) -> Result<bool> {
    check_odd_prime(p)?;
    match legendre(delta, p) {
        0 => Err(Error::NotAUnit { delta, p }),
        s => Ok(s == 1),
    }
}

/// Least positive non-residue mod an odd prime `p`.
pub fn least_nonresidue(p: u64) -> Result<i64> {
    check_odd_prime(p)?;
    Ok((2..p as i64)
        .find(|&a| legendre(a, p) == -1)
        .expect("odd primes have non-residues"))
}
