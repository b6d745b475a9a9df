//! The coefficient ring: `Z[1/p][zeta_p]` (exact mode) or `(Z/l^r)[zeta_p]`
//! (modular mode), with `zeta` a formal primitive `p`-th root of unity.
//!
//! Values are coordinate vectors of length `p - 1` in the basis
//! `1, zeta, ..., zeta^(p-2)`; `zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2))`.
//! Exact values carry a denominator `p^den`, kept minimal. All integer
//! arithmetic is checked and overflow panics.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::arith::field::{Fe, Field};
use crate::arith::laurent::{LaurentPoly, RatFn};
use crate::error::{Error, Result};

type Coords = SmallVec<[i128; 4]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Characteristic zero with `p`-power denominators.
    Exact,
    /// Coefficients modulo the given integer (a power of a prime `l != p`).
    Mod(i128),
}

impl Mode {
    /// `Mod(l^r)`, rejecting `l` dividing `p` so that `p` stays invertible.
    pub fn modulo(ell: u32, r: u32, p: u32) -> Result<Mode> {
        if ell < 2 || r == 0 {
            return Err(Error::Usage(format!("invalid modulus {ell}^{r}")));
        }
        if (ell as i128).gcd(&(p as i128)) != 1 {
            return Err(Error::Hypothesis(format!("l = {ell} is not coprime to p = {p}")));
        }
        let m = (ell as i128).checked_pow(r).ok_or_else(|| Error::Usage("modulus overflow".into()))?;
        Ok(Mode::Mod(m))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cyclo {
    p: u32,
    mode: Mode,
    den: u32,
    c: Coords,
}

fn ck_mul(a: i128, b: i128) -> i128 {
    a.checked_mul(b).expect("cyclotomic coordinate overflow")
}
fn ck_add(a: i128, b: i128) -> i128 {
    a.checked_add(b).expect("cyclotomic coordinate overflow")
}
fn ipow(b: i128, e: u32) -> i128 {
    b.checked_pow(e).expect("cyclotomic coordinate overflow")
}

fn modinv(a: i128, m: i128) -> Option<i128> {
    let g = a.extended_gcd(&m);
    (g.gcd == 1 || g.gcd == -1).then(|| (g.x * g.gcd).rem_euclid(m))
}

impl Cyclo {
    pub fn zero(p: u32, mode: Mode) -> Self {
        assert!(p >= 2, "p must be a prime");
        if let Mode::Mod(m) = mode {
            assert!(m >= 2 && (m.gcd(&(p as i128)) == 1), "modulus must be coprime to p");
        }
        Cyclo { p, mode, den: 0, c: SmallVec::from_elem(0, (p - 1) as usize) }
    }
    pub fn from_int(n: i128, p: u32, mode: Mode) -> Self {
        let mut z = Self::zero(p, mode);
        z.c[0] = n;
        z.fix();
        z
    }
    /// `n / p^e`.
    pub fn from_p_fraction(n: i128, e: u32, p: u32, mode: Mode) -> Self {
        Self::from_int(n, p, mode).div_p_pow(e)
    }
    /// `zeta^t`.
    pub fn zeta_pow(t: u32, p: u32, mode: Mode) -> Self {
        let t = t % p;
        let mut z = Self::zero(p, mode);
        if t == p - 1 {
            for x in z.c.iter_mut() {
                *x = -1;
            }
        } else {
            z.c[t as usize] = 1;
        }
        z.fix();
        z
    }
    pub fn from_coords(coords: &[i128], den: u32, p: u32, mode: Mode) -> Self {
        assert_eq!(coords.len(), (p - 1) as usize, "coordinate length must be p - 1");
        let mut z = Self::zero(p, mode);
        z.c.copy_from_slice(coords);
        if den > 0 {
            match mode {
                Mode::Exact => z.den = den,
                Mode::Mod(_) => {
                    z.fix();
                    return z.div_p_pow(den);
                }
            }
        }
        z.fix();
        z
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn mode(&self) -> Mode {
        self.mode
    }
    pub fn coords(&self) -> &[i128] {
        &self.c
    }
    /// Exponent of the `p`-power denominator (always 0 in modular mode).
    pub fn den_exp(&self) -> u32 {
        self.den
    }
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    fn fix(&mut self) {
        match self.mode {
            Mode::Exact => {
                let p = self.p as i128;
                while self.den > 0 && self.c.iter().all(|&x| x % p == 0) {
                    for x in self.c.iter_mut() {
                        *x /= p;
                    }
                    self.den -= 1;
                }
                if self.is_zero() {
                    self.den = 0;
                }
            }
            Mode::Mod(m) => {
                for x in self.c.iter_mut() {
                    *x = x.rem_euclid(m);
                }
            }
        }
    }

    fn check_compat(&self, o: &Cyclo) {
        assert!(self.p == o.p && self.mode == o.mode, "incompatible scalars: {:?}/{} vs {:?}/{}", self.mode, self.p, o.mode, o.p);
    }

    /// Coordinates scaled to denominator `p^den` (exact mode, `den >= self.den`).
    fn lifted(&self, den: u32) -> Coords {
        if den == self.den {
            return self.c.clone();
        }
        let f = ipow(self.p as i128, den - self.den);
        self.c.iter().map(|&x| ck_mul(x, f)).collect()
    }

    pub fn add(&self, o: &Cyclo) -> Cyclo {
        self.check_compat(o);
        let den = self.den.max(o.den);
        let a = self.lifted(den);
        let b = o.lifted(den);
        let mut r = Cyclo { p: self.p, mode: self.mode, den, c: a.iter().zip(&b).map(|(&x, &y)| ck_add(x, y)).collect() };
        r.fix();
        r
    }
    pub fn neg(&self) -> Cyclo {
        let mut r = self.clone();
        for x in r.c.iter_mut() {
            *x = -*x;
        }
        r.fix();
        r
    }
    pub fn sub(&self, o: &Cyclo) -> Cyclo {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &Cyclo) -> Cyclo {
        self.check_compat(o);
        let p = self.p as usize;
        let mut full = vec![0i128; p];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                let idx = (i + j) % p;
                let prod = match self.mode {
                    Mode::Exact => ck_mul(a, b),
                    Mode::Mod(m) => ck_mul(a, b) % m,
                };
                full[idx] = ck_add(full[idx], prod);
            }
        }
        let top = full[p - 1];
        let c: Coords = full[..p - 1].iter().map(|&x| x - top).collect();
        let mut r = Cyclo { p: self.p, mode: self.mode, den: self.den + o.den, c };
        r.fix();
        r
    }
    pub fn mul_int(&self, n: i128) -> Cyclo {
        let mut r = self.clone();
        for x in r.c.iter_mut() {
            *x = match self.mode {
                Mode::Exact => ck_mul(*x, n),
                Mode::Mod(m) => ck_mul(*x, n.rem_euclid(m)),
            };
        }
        r.fix();
        r
    }
    /// Multiply by `p^(-e)`.
    pub fn div_p_pow(&self, e: u32) -> Cyclo {
        match self.mode {
            Mode::Exact => {
                let mut r = self.clone();
                r.den += e;
                r.fix();
                r
            }
            Mode::Mod(m) => {
                let inv = modinv(self.p as i128, m).expect("p invertible modulo l^r");
                let mut f = 1i128;
                for _ in 0..e {
                    f = f * inv % m;
                }
                self.mul_int(f)
            }
        }
    }
    /// Exact division by a nonzero integer. Fails when the quotient leaves the
    /// ring, which certifies integrality whenever it succeeds.
    pub fn div_int(&self, n: i128) -> Result<Cyclo> {
        if n == 0 {
            return Err(Error::NonIntegral("division by zero".into()));
        }
        match self.mode {
            Mode::Exact => {
                let p = self.p as i128;
                let mut m = n;
                let mut a = 0u32;
                while m % p == 0 {
                    m /= p;
                    a += 1;
                }
                if self.c.iter().any(|&x| x % m != 0) {
                    return Err(Error::NonIntegral(format!("{self} is not divisible by {n}")));
                }
                let mut r = self.clone();
                for x in r.c.iter_mut() {
                    *x /= m;
                }
                r.den += a;
                r.fix();
                Ok(r)
            }
            Mode::Mod(md) => {
                let inv = modinv(n.rem_euclid(md), md)
                    .ok_or_else(|| Error::NonIntegral(format!("{n} is not invertible modulo {md}")))?;
                Ok(self.mul_int(inv))
            }
        }
    }
    pub fn pow(&self, mut e: u32) -> Cyclo {
        let mut r = Cyclo::from_int(1, self.p, self.mode);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        r
    }

    /// Image in `(Z/m)[zeta]`; exact inputs only.
    pub fn reduce(&self, m: i128) -> Result<Cyclo> {
        let target = Mode::Mod(m);
        match self.mode {
            Mode::Mod(m0) if m0 == m => Ok(self.clone()),
            Mode::Mod(_) => Err(Error::ModeMismatch("cannot change modulus".into())),
            Mode::Exact => {
                if m.gcd(&(self.p as i128)) != 1 {
                    return Err(Error::Hypothesis(format!("modulus {m} not coprime to p = {}", self.p)));
                }
                let z = Cyclo::from_coords(&self.c, 0, self.p, target);
                Ok(z.div_p_pow(self.den))
            }
        }
    }

    /// The rational integer represented, if any (exact mode only).
    pub fn as_integer(&self) -> Option<i128> {
        (self.mode == Mode::Exact && self.den == 0 && self.c[1..].iter().all(|&x| x == 0)).then(|| self.c[0])
    }
    /// `(n, e)` with value `n / p^e`, when the value is rational.
    pub fn as_p_fraction(&self) -> Option<(i128, u32)> {
        self.c[1..].iter().all(|&x| x == 0).then(|| (self.c[0], self.den))
    }
    /// Additive order in modular mode; `None` (infinite) for nonzero exact values.
    pub fn additive_order(&self) -> Option<i128> {
        match self.mode {
            Mode::Exact => self.is_zero().then_some(1),
            Mode::Mod(m) => Some(m / self.c.iter().fold(m, |g, &x| g.gcd(&x))),
        }
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = if self.c[1..].iter().all(|&x| x == 0) {
            self.c[0].to_string()
        } else {
            let v: Vec<String> = self.c.iter().map(|x| x.to_string()).collect();
            format!("[{}]", v.join(","))
        };
        match self.mode {
            Mode::Exact if self.den > 0 => {
                if self.den == 1 {
                    write!(f, "{body}/{}", self.p)
                } else {
                    write!(f, "{body}/{}^{}", self.p, self.den)
                }
            }
            Mode::Exact => write!(f, "{body}"),
            Mode::Mod(m) => write!(f, "{body} mod {m}"),
        }
    }
}

/// Serialized form of a scalar: coordinates plus denominator exponent or modulus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycloJson {
    pub coords: Vec<i128>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub den_exp: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub modulus: Option<i128>,
}

impl From<&Cyclo> for CycloJson {
    fn from(c: &Cyclo) -> Self {
        match c.mode {
            Mode::Exact => CycloJson { coords: c.c.to_vec(), den_exp: Some(c.den), modulus: None },
            Mode::Mod(m) => CycloJson { coords: c.c.to_vec(), den_exp: None, modulus: Some(m) },
        }
    }
}

impl CycloJson {
    pub fn to_cyclo(&self, p: u32) -> Result<Cyclo> {
        if self.coords.len() != (p - 1) as usize {
            return Err(Error::Parse("scalar has the wrong number of coordinates".into()));
        }
        match (self.den_exp, self.modulus) {
            (Some(d), None) => Ok(Cyclo::from_coords(&self.coords, d, p, Mode::Exact)),
            (None, Some(m)) if m >= 2 && m.gcd(&(p as i128)) == 1 => {
                Ok(Cyclo::from_coords(&self.coords, 0, p, Mode::Mod(m)))
            }
            _ => Err(Error::Parse("scalar needs exactly one of den_exp or modulus".into())),
        }
    }
}

/// Running sum of scalars sharing one mode; normalizes once at the end.
#[derive(Clone, Debug)]
pub struct CycloAcc {
    p: u32,
    mode: Mode,
    den: u32,
    c: Coords,
}

impl CycloAcc {
    pub fn new(p: u32, mode: Mode) -> Self {
        CycloAcc { p, mode, den: 0, c: SmallVec::from_elem(0, (p - 1) as usize) }
    }
    /// `self += factor * x`.
    pub fn add_scaled(&mut self, x: &Cyclo, factor: i128) {
        debug_assert!(x.p == self.p && x.mode == self.mode);
        if factor == 0 || x.is_zero() {
            return;
        }
        match self.mode {
            Mode::Exact => {
                if x.den > self.den {
                    let f = ipow(self.p as i128, x.den - self.den);
                    for v in self.c.iter_mut() {
                        *v = ck_mul(*v, f);
                    }
                    self.den = x.den;
                }
                let f = ck_mul(factor, ipow(self.p as i128, self.den - x.den));
                for (v, &y) in self.c.iter_mut().zip(&x.c) {
                    *v = ck_add(*v, ck_mul(y, f));
                }
            }
            Mode::Mod(m) => {
                let f = factor.rem_euclid(m);
                for (v, &y) in self.c.iter_mut().zip(&x.c) {
                    *v = (*v + ck_mul(y, f)) % m;
                }
            }
        }
    }
    pub fn add(&mut self, x: &Cyclo) {
        self.add_scaled(x, 1);
    }
    pub fn finish(self) -> Cyclo {
        let mut r = Cyclo { p: self.p, mode: self.mode, den: self.den, c: self.c };
        r.fix();
        r
    }
}

/// The additive character `eta(x) = eta0(Tr(a_1))` where `a_1` is the
/// `pi^1`-coefficient of `x` and `eta0(t) = zeta^(s t)` for a fixed
/// multiplier `s` coprime to `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character {
    pub s: u32,
}

impl Default for Character {
    fn default() -> Self {
        Character { s: 1 }
    }
}

impl Character {
    pub fn new(s: u32, p: u32) -> Result<Self> {
        if s % p == 0 {
            return Err(Error::Usage(format!("character multiplier {s} is trivial modulo {p}")));
        }
        Ok(Character { s: s % p })
    }
    /// `eta0(t)` for `t` in `F_p`.
    pub fn eta0(&self, t: u32, p: u32, mode: Mode) -> Cyclo {
        Cyclo::zeta_pow((self.s as u64 * t as u64 % p as u64) as u32, p, mode)
    }
    /// `eta0(Tr(a))` for `a` in `F_q`.
    pub fn on_fq(&self, a: Fe, k: &Field, mode: Mode) -> Cyclo {
        self.eta0(k.trace(a), k.p(), mode)
    }
    pub fn eta(&self, x: &LaurentPoly, k: &Field, mode: Mode) -> Cyclo {
        self.on_fq(x.coeff(1), k, mode)
    }
    pub fn eta_ratfn(&self, x: &RatFn, k: &Field, mode: Mode) -> Cyclo {
        self.on_fq(x.expansion(1, 2, k)[0], k, mode)
    }
}
