//! Square-free levels `n = p_1 ... p_s` with their prime factors in canonical
//! order. Divisors of `n` are indexed by bitmasks over that order.

use crate::arith::{Field, Poly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    n: Poly,
    primes: Vec<Poly>,
}

impl Level {
    pub fn new(n: &Poly, f: &Field) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::InvalidLevel("level must be nonzero".into()));
        }
        if !n.is_monic() {
            return Err(Error::InvalidLevel(format!("level {} is not monic", n.display(f))));
        }
        if n.is_one() {
            return Ok(Level { n: n.clone(), primes: Vec::new() });
        }
        let fac = n.factor(f)?;
        if fac.iter().any(|(_, e)| *e > 1) {
            return Err(Error::InvalidLevel(format!("level {} is not square-free", n.display(f))));
        }
        if fac.len() > 16 {
            return Err(Error::InvalidLevel("too many prime factors".into()));
        }
        Ok(Level { n: n.clone(), primes: fac.into_iter().map(|(p, _)| p).collect() })
    }
    pub fn parse(text: &str, f: &Field) -> Result<Self> {
        Self::new(&Poly::parse(text, f)?, f)
    }
    /// From a comma-separated list of distinct monic irreducibles; empty or
    /// `1` gives level one.
    pub fn from_prime_list(text: &str, f: &Field) -> Result<Self> {
        let t = text.trim();
        if t.is_empty() || t == "1" {
            return Self::new(&Poly::one(), f);
        }
        let mut n = Poly::one();
        let mut seen: Vec<Poly> = Vec::new();
        for part in t.split(',') {
            let p = Poly::parse(part.trim(), f)?;
            if !p.is_monic() || !p.is_irreducible(f)? {
                return Err(Error::InvalidLevel(format!("{} is not a monic irreducible", p.display(f))));
            }
            if seen.contains(&p) {
                return Err(Error::InvalidLevel(format!("duplicate prime {}", p.display(f))));
            }
            n = n.mul(&p, f);
            seen.push(p);
        }
        Self::new(&n, f)
    }
    pub fn n(&self) -> &Poly {
        &self.n
    }
    pub fn primes(&self) -> &[Poly] {
        &self.primes
    }
    pub fn s(&self) -> usize {
        self.primes.len()
    }
    pub fn deg(&self) -> usize {
        self.n.deg().unwrap_or(0)
    }
    /// Number of divisors, `2^s`.
    pub fn num_divisors(&self) -> usize {
        1 << self.s()
    }
    pub fn full_mask(&self) -> u32 {
        (1u32 << self.s()) - 1
    }
    /// The divisor `prod_{i in mask} p_i`.
    pub fn divisor(&self, mask: u32, f: &Field) -> Poly {
        let mut d = Poly::one();
        for (i, p) in self.primes.iter().enumerate() {
            if mask >> i & 1 == 1 {
                d = d.mul(p, f);
            }
        }
        d
    }
    /// Bitmask of a monic divisor of `n`.
    pub fn mask_of(&self, d: &Poly, f: &Field) -> Option<u32> {
        if !d.is_monic() || !d.divides(&self.n, f) {
            return None;
        }
        Some(
            self.primes
                .iter()
                .enumerate()
                .filter(|(_, p)| p.divides(d, f))
                .fold(0, |m, (i, _)| m | 1 << i),
        )
    }
    /// The level `n / p_i`.
    pub fn without(&self, i: usize, f: &Field) -> Level {
        let mut primes = self.primes.clone();
        let p = primes.remove(i);
        Level { n: self.n.div_exact(&p, f).expect("prime divides level"), primes }
    }
    /// Mask at level `n / p_i` of a mask at level `n` not containing bit `i`.
    pub fn drop_bit(mask: u32, i: usize) -> u32 {
        let low = mask & ((1 << i) - 1);
        let high = (mask >> (i + 1)) << i;
        low | high
    }
    /// Inverse of [`Level::drop_bit`].
    pub fn insert_bit(mask: u32, i: usize) -> u32 {
        let low = mask & ((1 << i) - 1);
        let high = (mask >> i) << (i + 1);
        low | high
    }
    pub fn prime_index(&self, p: &Poly) -> Option<usize> {
        self.primes.iter().position(|x| x == p)
    }
    /// `|d| = q^deg d` for the divisor with the given mask.
    pub fn divisor_norm(&self, mask: u32, q: u32) -> i128 {
        let deg: usize = (0..self.s()).filter(|i| mask >> i & 1 == 1).map(|i| self.primes[i].deg().unwrap()).sum();
        (q as i128).pow(deg as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_and_masks() {
        let f = Field::prime(3).unwrap();
        let l = Level::parse("T^2+T", &f).unwrap();
        assert_eq!(l.s(), 2);
        assert_eq!(l.primes()[0], Poly::t());
        assert_eq!(l.divisor(0b10, &f), Poly::parse("T+1", &f).unwrap());
        assert_eq!(l.mask_of(&Poly::parse("T+1", &f).unwrap(), &f), Some(0b10));
        assert_eq!(l.mask_of(&Poly::parse("T+2", &f).unwrap(), &f), None);
        assert_eq!(l.divisor_norm(0b11, 3), 9);
        assert!(matches!(Level::parse("T^2", &f), Err(Error::InvalidLevel(_))));
        assert!(matches!(Level::parse("2*T", &f), Err(Error::InvalidLevel(_))));
        assert_eq!(Level::parse("1", &f).unwrap().s(), 0);
    }
}
