//! Finite fields `F_q`, `q = p^e`, with table-driven arithmetic.
//!
//! Elements are encoded as integers `0..q`: the base-`p` digits of the code
//! are the coefficients of the element as a polynomial in the generator `g`
//! (lowest digit = constant term). For `e = 1` the code is the residue itself.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Encoded field element.
pub type Fe = u16;

/// Largest field size supported by the lookup tables.
pub const MAX_Q: u32 = 1024;

/// A finite field together with its arithmetic tables. Cloning is cheap.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

struct Inner {
    p: u32,
    e: u32,
    q: u32,
    /// Monic modulus over `F_p`, low-to-high, length `e + 1`; empty when `e = 1`.
    modulus: Vec<u32>,
    add: Vec<Fe>,
    mul: Vec<Fe>,
    neg: Vec<Fe>,
    inv: Vec<Fe>,
    trace: Vec<u8>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Dense polynomial helpers over F_p used only while building tables.
fn fp_trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let dm = m.len() - 1;
    let inv_lead = fp_inv(m[dm], p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = r[r.len() - 1] * inv_lead % p;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_inv(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Irreducibility over `F_p` by trial division with every monic polynomial of
/// degree at most half the degree. Only used for small moduli.
fn fp_irreducible(m: &[u32], p: u32) -> bool {
    let n = m.len() - 1;
    for d in 1..=n / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut f = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                f.push((c % p as u64) as u32);
                c /= p as u64;
            }
            f.push(1);
            if fp_rem(m, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self> {
        Self::build(p, 1, Vec::new())
    }

    /// The extension `F_p[g]/(modulus)`; `modulus` is given low-to-high over
    /// `F_p` and must be monic and irreducible.
    pub fn extension(p: u32, modulus: Vec<u32>) -> Result<Self> {
        if modulus.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree >= 1".into()));
        }
        let e = (modulus.len() - 1) as u32;
        if e == 1 {
            return Self::prime(p);
        }
        Self::build(p, e, modulus)
    }

    /// Parse a modulus written in the generator symbol, e.g. `"g^2+g+1"`.
    pub fn with_modulus_str(p: u32, text: &str) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        let base = Self::prime(p)?;
        let coeffs = crate::arith::poly::parse_terms(text, "g", &|s| base.parse_prime_digit(s))?;
        let mut v: Vec<u32> = coeffs.into_iter().map(|c| c as u32).collect();
        fp_trim(&mut v);
        Self::extension(p, v)
    }

    /// `F_{p^e}` with the lexicographically smallest monic irreducible modulus.
    pub fn smallest(p: u32, e: u32) -> Result<Self> {
        if e == 1 {
            return Self::prime(p);
        }
        if !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        let count = (p as u64).pow(e);
        for code in 0..count {
            let mut m = Vec::with_capacity(e as usize + 1);
            let mut c = code;
            for _ in 0..e {
                m.push((c % p as u64) as u32);
                c /= p as u64;
            }
            m.push(1);
            if m[0] != 0 && fp_irreducible(&m, p) {
                return Self::extension(p, m);
            }
        }
        Err(Error::InvalidField(format!("no irreducible polynomial of degree {e} over F_{p}")))
    }

    /// Field of order `q` with the smallest modulus; `q` must be a prime power.
    pub fn of_order(q: u32) -> Result<Self> {
        let (p, e) = prime_power(q).ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        Self::smallest(p, e)
    }

    fn build(p: u32, e: u32, modulus: Vec<u32>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        let q64 = (p as u64).pow(e);
        if q64 > MAX_Q as u64 {
            return Err(Error::InvalidField(format!("q = {q64} exceeds the supported bound {MAX_Q}")));
        }
        let q = q64 as u32;
        if e > 1 {
            if modulus[e as usize] != 1 || modulus.iter().any(|&c| c >= p) {
                return Err(Error::InvalidField("modulus must be monic with coefficients in 0..p".into()));
            }
            if !fp_irreducible(&modulus, p) {
                return Err(Error::InvalidField("modulus is reducible".into()));
            }
        }
        let digits = |x: u32| -> Vec<u32> {
            let mut v = Vec::with_capacity(e as usize);
            let mut c = x;
            for _ in 0..e {
                v.push(c % p);
                c /= p;
            }
            v
        };
        let undigits = |v: &[u32]| -> u32 { v.iter().rev().fold(0, |acc, &d| acc * p + d) };
        let qs = q as usize;
        let mut add = vec![0; qs * qs];
        let mut mul = vec![0; qs * qs];
        let mut neg = vec![0; qs];
        for a in 0..q {
            let da = digits(a);
            neg[a as usize] = undigits(&da.iter().map(|&x| (p - x) % p).collect::<Vec<_>>()) as Fe;
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
                add[a as usize * qs + b as usize] = undigits(&s) as Fe;
                let prod = if e == 1 {
                    vec![a * b % p]
                } else {
                    let mut full = vec![0u32; 2 * e as usize];
                    for (i, &x) in da.iter().enumerate() {
                        for (j, &y) in db.iter().enumerate() {
                            full[i + j] = (full[i + j] + x * y) % p;
                        }
                    }
                    let mut r = fp_rem(&full, &modulus, p);
                    r.resize(e as usize, 0);
                    r
                };
                mul[a as usize * qs + b as usize] = undigits(&prod) as Fe;
            }
        }
        let mut inv = vec![0; qs];
        for a in 1..qs {
            let b = (1..qs)
                .find(|&b| mul[a * qs + b] == 1)
                .ok_or_else(|| Error::InvalidField("zero divisor found; modulus is not irreducible".into()))?;
            inv[a] = b as Fe;
        }
        let mut inner = Inner { p, e, q, modulus, add, mul, neg, inv, trace: Vec::new() };
        // Tr(x) = x + x^p + ... + x^{p^(e-1)} lands in the prime field.
        let mut trace = vec![0u8; qs];
        for (x, t) in trace.iter_mut().enumerate() {
            let mut acc: Fe = 0;
            let mut y = x as Fe;
            for _ in 0..e {
                acc = inner.add[acc as usize * qs + y as usize];
                y = pow_raw(&inner, y, p as u64);
            }
            debug_assert!((acc as u32) < p);
            *t = acc as u8;
        }
        inner.trace = trace;
        let field = Field(Arc::new(inner));
        // The unit group must be cyclic of order q - 1: every unit satisfies x^(q-1) = 1.
        for x in 1..q {
            if field.pow(x as Fe, (q - 1) as u64) != 1 {
                return Err(Error::InvalidField("unit group order check failed".into()));
            }
        }
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }
    pub fn e(&self) -> u32 {
        self.0.e
    }
    pub fn q(&self) -> u32 {
        self.0.q
    }
    /// Low-to-high modulus over `F_p`; empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        self.0.add[a as usize * self.0.q as usize + b as usize]
    }
    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }
    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        self.0.mul[a as usize * self.0.q as usize + b as usize]
    }
    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.0.neg[a as usize]
    }
    /// Multiplicative inverse; `a` must be nonzero.
    #[inline]
    pub fn inv(&self, a: Fe) -> Fe {
        assert!(a != 0, "inverse of zero in F_q");
        self.0.inv[a as usize]
    }
    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        pow_raw(&self.0, a, e)
    }
    /// Absolute trace to `F_p`, returned as a residue `0..p`.
    #[inline]
    pub fn trace(&self, a: Fe) -> u32 {
        self.0.trace[a as usize] as u32
    }
    /// The image of the integer `n` in the prime subfield.
    pub fn from_int(&self, n: i64) -> Fe {
        n.rem_euclid(self.0.p as i64) as Fe
    }
    /// All elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        0..self.0.q as Fe
    }
    pub fn units(&self) -> impl Iterator<Item = Fe> {
        1..self.0.q as Fe
    }

    pub(crate) fn parse_prime_digit(&self, s: &str) -> Result<Fe> {
        let v: u32 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad coefficient `{s}`")))?;
        if v >= self.0.p {
            return Err(Error::Parse(format!("coefficient {v} is not reduced modulo {}", self.0.p)));
        }
        Ok(v as Fe)
    }

    /// Parse an element: a residue for prime fields, a polynomial in `g` otherwise.
    pub fn parse_elem(&self, s: &str) -> Result<Fe> {
        let s = s.trim();
        let s = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(s);
        if self.0.e == 1 {
            return self.parse_prime_digit(s);
        }
        let prime = Field::prime(self.0.p)?;
        let digits = crate::arith::poly::parse_terms(s, "g", &|t| prime.parse_prime_digit(t))?;
        if digits.len() > self.0.e as usize {
            return Err(Error::Parse(format!("element `{s}` is not reduced modulo the field modulus")));
        }
        Ok(digits.iter().rev().fold(0u32, |acc, &d| acc * self.0.p + d as u32) as Fe)
    }

    /// Canonical text of an element.
    pub fn fmt_elem(&self, a: Fe) -> String {
        if self.0.e == 1 {
            return a.to_string();
        }
        let p = self.0.p;
        let mut digits = Vec::new();
        let mut c = a as u32;
        for _ in 0..self.0.e {
            digits.push((c % p) as Fe);
            c /= p;
        }
        crate::arith::poly::format_terms(&digits, "g", &|d| d.to_string())
    }
}

fn pow_raw(inner: &Inner, a: Fe, mut e: u64) -> Fe {
    let qs = inner.q as usize;
    let mut r: Fe = 1;
    let mut b = a;
    while e > 0 {
        if e & 1 == 1 {
            r = inner.mul[r as usize * qs + b as usize];
        }
        b = inner.mul[b as usize * qs + b as usize];
        e >>= 1;
    }
    r
}

/// Decompose `q = p^e`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut e = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p, e))
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.e == other.0.e && self.0.modulus == other.0.modulus)
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.e == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            let m: Vec<Fe> = self.0.modulus.iter().map(|&c| c as Fe).collect();
            let s = crate::arith::poly::format_terms(&m, "g", &|d| d.to_string());
            write!(f, "F_{}[g]/({})", self.0.q, s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_tables() {
        let k = Field::prime(5).unwrap();
        assert_eq!(k.add(3, 4), 2);
        assert_eq!(k.mul(3, 4), 2);
        assert_eq!(k.inv(2), 3);
        assert_eq!(k.neg(1), 4);
        assert_eq!(k.trace(3), 3);
    }

    #[test]
    fn f4_arithmetic() {
        let k = Field::with_modulus_str(2, "g^2+g+1").unwrap();
        assert_eq!(k.q(), 4);
        let g = k.parse_elem("g").unwrap();
        // g^2 = g + 1
        assert_eq!(k.fmt_elem(k.mul(g, g)), "g+1");
        assert_eq!(k.pow(g, 3), 1);
        // Tr(g) = g + g^2 = 1
        assert_eq!(k.trace(g), 1);
        assert_eq!(k.trace(1), 0);
    }

    #[test]
    fn unit_group_has_order_q_minus_one() {
        for q in [2u32, 3, 4, 5, 7, 8, 9] {
            let k = Field::of_order(q).unwrap();
            assert_eq!(k.q(), q);
            for x in k.units() {
                assert_eq!(k.pow(x, (q - 1) as u64), 1);
            }
        }
    }

    #[test]
    fn rejects_reducible_modulus_and_composite_p() {
        assert!(Field::with_modulus_str(2, "g^2+1").is_err());
        assert!(Field::prime(6).is_err());
        assert!(Field::of_order(6).is_err());
    }

    #[test]
    fn element_text_roundtrip() {
        let k = Field::with_modulus_str(3, "g^2+1").unwrap();
        for x in k.elements() {
            let s = k.fmt_elem(x);
            assert_eq!(k.parse_elem(&s).unwrap(), x, "{s}");
        }
    }
}
