//! Elements of `F = F_q(T)` as exact rational functions, with Laurent
//! expansions in the uniformizer `pi = 1/T` at infinity.

use crate::arith::field::{Fe, Field};
use crate::arith::poly::{format_monomial, parse_monomials, Poly};
use crate::error::{Error, Result};

/// A reduced fraction `num/den` with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn new(num: Poly, den: Poly, k: &Field) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroInput("zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den, k)?;
        let num = num.div_exact(&g, k).expect("gcd divides");
        let den = den.div_exact(&g, k).expect("gcd divides");
        let c = k.inv(den.lead());
        Ok(RatFn { num: num.scale(c, k), den: den.scale(c, k) })
    }
    pub fn zero() -> Self {
        RatFn { num: Poly::zero(), den: Poly::one() }
    }
    pub fn one() -> Self {
        RatFn { num: Poly::one(), den: Poly::one() }
    }
    pub fn from_poly(p: Poly) -> Self {
        RatFn { num: p, den: Poly::one() }
    }
    pub fn constant(c: Fe) -> Self {
        Self::from_poly(Poly::constant(c))
    }
    /// `pi^i = T^(-i)`.
    pub fn pi_pow(i: i64) -> Self {
        if i <= 0 {
            Self::from_poly(Poly::monomial(1, (-i) as usize))
        } else {
            RatFn { num: Poly::one(), den: Poly::monomial(1, i as usize) }
        }
    }
    pub fn num(&self) -> &Poly {
        &self.num
    }
    pub fn den(&self) -> &Poly {
        &self.den
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }
    /// The polynomial this represents, if it is one.
    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_poly().then_some(&self.num)
    }

    /// `ord_inf(f/g) = deg g - deg f`; `None` for zero.
    pub fn ord(&self) -> Option<i64> {
        Some(self.den.degree_i64() - self.num.deg()? as i64)
    }

    pub fn add(&self, o: &RatFn, k: &Field) -> RatFn {
        if self.den == o.den {
            return RatFn::new(self.num.add(&o.num, k), self.den.clone(), k).expect("nonzero den");
        }
        let n = self.num.mul(&o.den, k).add(&o.num.mul(&self.den, k), k);
        RatFn::new(n, self.den.mul(&o.den, k), k).expect("nonzero den")
    }
    pub fn neg(&self, k: &Field) -> RatFn {
        RatFn { num: self.num.neg(k), den: self.den.clone() }
    }
    pub fn sub(&self, o: &RatFn, k: &Field) -> RatFn {
        self.add(&o.neg(k), k)
    }
    pub fn mul(&self, o: &RatFn, k: &Field) -> RatFn {
        if self.is_zero() || o.is_zero() {
            return RatFn::zero();
        }
        RatFn::new(self.num.mul(&o.num, k), self.den.mul(&o.den, k), k).expect("nonzero den")
    }
    pub fn inv(&self, k: &Field) -> Result<RatFn> {
        if self.is_zero() {
            return Err(Error::ZeroInput("inverse of zero".into()));
        }
        RatFn::new(self.den.clone(), self.num.clone(), k)
    }
    pub fn div(&self, o: &RatFn, k: &Field) -> Result<RatFn> {
        Ok(self.mul(&o.inv(k)?, k))
    }
    pub fn scale(&self, c: Fe, k: &Field) -> RatFn {
        if c == 0 {
            return RatFn::zero();
        }
        RatFn { num: self.num.scale(c, k), den: self.den.clone() }
    }

    /// Coefficients of `pi^i` for `lo <= i < hi`.
    pub fn expansion(&self, lo: i64, hi: i64, k: &Field) -> Vec<Fe> {
        if hi <= lo {
            return Vec::new();
        }
        let mut out = vec![0; (hi - lo) as usize];
        let Some(v) = self.ord() else { return out };
        if hi <= v {
            return out;
        }
        // f/g = pi^v * rev(f)(pi) / rev(g)(pi), with rev(g)(0) = lead(g) != 0.
        let nrev: Vec<Fe> = self.num.coeffs().iter().rev().copied().collect();
        let drev: Vec<Fe> = self.den.coeffs().iter().rev().copied().collect();
        let len = (hi - v) as usize;
        let inv0 = k.inv(drev[0]);
        let mut h: Vec<Fe> = Vec::with_capacity(len);
        for j in 0..len {
            let mut acc = nrev.get(j).copied().unwrap_or(0);
            for t in 1..=j.min(drev.len() - 1) {
                acc = k.sub(acc, k.mul(drev[t], h[j - t]));
            }
            h.push(k.mul(acc, inv0));
        }
        for i in lo.max(v)..hi {
            out[(i - lo) as usize] = h[(i - v) as usize];
        }
        out
    }

    /// All expansion terms `pi^i` with `i < hi`.
    pub fn laurent_below(&self, hi: i64, k: &Field) -> LaurentPoly {
        match self.ord() {
            None => LaurentPoly::zero(),
            Some(v) if v >= hi => LaurentPoly::zero(),
            Some(v) => LaurentPoly::new(v, self.expansion(v, hi, k)),
        }
    }

    pub fn display(&self, k: &Field) -> String {
        if self.den.is_one() {
            self.num.display(k)
        } else {
            format!("({})/({})", self.num.display(k), self.den.display(k))
        }
    }
}

/// A finite Laurent polynomial `sum c_j pi^(low + j)` in `pi = 1/T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    low: i64,
    c: Vec<Fe>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { low: 0, c: Vec::new() }
    }
    pub fn new(low: i64, c: Vec<Fe>) -> Self {
        let mut lp = LaurentPoly { low, c };
        lp.trim();
        lp
    }
    pub fn monomial(c: Fe, i: i64) -> Self {
        Self::new(i, vec![c])
    }
    fn trim(&mut self) {
        while self.c.last() == Some(&0) {
            self.c.pop();
        }
        let lead = self.c.iter().take_while(|&&x| x == 0).count();
        if lead > 0 {
            self.c.drain(..lead);
            self.low += lead as i64;
        }
        if self.c.is_empty() {
            self.low = 0;
        }
    }
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    /// Lowest exponent present; `None` for zero.
    pub fn ord(&self) -> Option<i64> {
        (!self.c.is_empty()).then_some(self.low)
    }
    /// Highest exponent present; `None` for zero.
    pub fn top(&self) -> Option<i64> {
        (!self.c.is_empty()).then(|| self.low + self.c.len() as i64 - 1)
    }
    pub fn coeff(&self, i: i64) -> Fe {
        if i < self.low {
            return 0;
        }
        self.c.get((i - self.low) as usize).copied().unwrap_or(0)
    }
    /// `(exponent, coefficient)` pairs with nonzero coefficient, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Fe)> + '_ {
        self.c.iter().enumerate().filter(|(_, &c)| c != 0).map(move |(j, &c)| (self.low + j as i64, c))
    }

    fn zip_with(&self, o: &LaurentPoly, f: impl Fn(Fe, Fe) -> Fe) -> LaurentPoly {
        if self.is_zero() && o.is_zero() {
            return LaurentPoly::zero();
        }
        let lo = match (self.ord(), o.ord()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            _ => unreachable!(),
        };
        let hi = self.top().unwrap_or(lo).max(o.top().unwrap_or(lo));
        LaurentPoly::new(lo, (lo..=hi).map(|i| f(self.coeff(i), o.coeff(i))).collect())
    }
    pub fn add(&self, o: &LaurentPoly, k: &Field) -> LaurentPoly {
        self.zip_with(o, |a, b| k.add(a, b))
    }
    pub fn sub(&self, o: &LaurentPoly, k: &Field) -> LaurentPoly {
        self.zip_with(o, |a, b| k.sub(a, b))
    }
    pub fn neg(&self, k: &Field) -> LaurentPoly {
        LaurentPoly { low: self.low, c: self.c.iter().map(|&x| k.neg(x)).collect() }
    }
    pub fn scale(&self, s: Fe, k: &Field) -> LaurentPoly {
        LaurentPoly::new(self.low, self.c.iter().map(|&x| k.mul(x, s)).collect())
    }
    pub fn mul(&self, o: &LaurentPoly, k: &Field) -> LaurentPoly {
        if self.is_zero() || o.is_zero() {
            return LaurentPoly::zero();
        }
        let mut v = vec![0 as Fe; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                v[i + j] = k.add(v[i + j], k.mul(a, b));
            }
        }
        LaurentPoly::new(self.low + o.low, v)
    }
    /// Multiply by a polynomial in `T`.
    pub fn mul_poly(&self, p: &Poly, k: &Field) -> LaurentPoly {
        self.mul(&LaurentPoly::from_poly(p), k)
    }
    /// Terms with exponent `< k`.
    pub fn truncate_below(&self, hi: i64) -> LaurentPoly {
        if self.is_zero() || hi <= self.low {
            return LaurentPoly::zero();
        }
        let n = ((hi - self.low) as usize).min(self.c.len());
        LaurentPoly::new(self.low, self.c[..n].to_vec())
    }
    /// Terms with exponent `>= lo`.
    pub fn truncate_above(&self, lo: i64) -> LaurentPoly {
        if self.is_zero() || lo <= self.low {
            return self.clone();
        }
        let skip = (lo - self.low) as usize;
        if skip >= self.c.len() {
            return LaurentPoly::zero();
        }
        LaurentPoly::new(lo, self.c[skip..].to_vec())
    }
    /// The polynomial part (exponents `<= 0`) as an element of `A`.
    pub fn poly_part(&self) -> Poly {
        let pp = self.truncate_below(1);
        match pp.top() {
            None => Poly::zero(),
            Some(_) => {
                let deg = -pp.low;
                Poly::from_coeffs((0..=deg).map(|j| pp.coeff(-j)).collect())
            }
        }
    }
    /// The fractional part (exponents `>= 1`).
    pub fn frac_part(&self) -> LaurentPoly {
        self.truncate_above(1)
    }
    pub fn from_poly(p: &Poly) -> LaurentPoly {
        match p.deg() {
            None => LaurentPoly::zero(),
            Some(d) => LaurentPoly::new(-(d as i64), p.coeffs().iter().rev().copied().collect()),
        }
    }
    pub fn to_ratfn(&self, k: &Field) -> RatFn {
        let Some(top) = self.top() else { return RatFn::zero() };
        // value = T^(-top) * sum c_i T^(top - i)
        let shift = top.max(0);
        let num = Poly::from_coeffs(
            (0..=(shift - self.low))
                .map(|e| self.coeff(shift - e))
                .collect(),
        );
        RatFn::new(num, Poly::monomial(1, shift as usize), k).expect("nonzero den")
    }

    /// Parse text in `T` (nonpositive exponents) and `pi` (positive exponents),
    /// e.g. `"T^2+1+2*pi^3"`.
    pub fn parse(text: &str, k: &Field) -> Result<LaurentPoly> {
        let monos = parse_monomials(text, &["T", "pi"], &|s| k.parse_elem(s))?;
        let mut out = LaurentPoly::zero();
        for (var, e, c) in monos {
            let i = match var {
                None => 0,
                Some(0) => -(e as i64),
                Some(_) => e as i64,
            };
            if out.coeff(i) != 0 {
                return Err(Error::Parse(format!("repeated exponent in `{text}`")));
            }
            out = out.add(&LaurentPoly::monomial(c, i), k);
        }
        Ok(out)
    }

    pub fn display(&self, k: &Field) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let terms: Vec<String> = self
            .terms()
            .map(|(i, c)| {
                let cs = k.fmt_elem(c);
                if i <= 0 {
                    format_monomial(&cs, "T", (-i) as u32)
                } else {
                    format_monomial(&cs, "pi", i as u32)
                }
            })
            .collect();
        terms.join("+")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_poly(rng: &mut ChaCha8Rng, k: &Field, maxdeg: usize) -> Poly {
        let d = rng.gen_range(0..=maxdeg);
        Poly::from_coeffs((0..=d).map(|_| rng.gen_range(0..k.q()) as Fe).collect())
    }

    #[test]
    fn ord_is_degree_difference() {
        let k = Field::prime(3).unwrap();
        let f = RatFn::new(Poly::parse("T^2+1", &k).unwrap(), Poly::parse("T^5+T", &k).unwrap(), &k).unwrap();
        assert_eq!(f.ord(), Some(3));
        assert_eq!(RatFn::pi_pow(-4).ord(), Some(-4));
        assert_eq!(RatFn::zero().ord(), None);
    }

    #[test]
    fn expansion_of_one_over_one_minus_pi() {
        // T/(T-1) = 1/(1 - pi) = sum pi^i
        let k = Field::prime(5).unwrap();
        let f = RatFn::new(Poly::t(), Poly::parse("T+4", &k).unwrap(), &k).unwrap();
        assert_eq!(f.expansion(-2, 6, &k), vec![0, 0, 1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn window_plus_remainder_reproduces_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in [2u32, 3, 4, 5] {
            let k = Field::of_order(q).unwrap();
            for _ in 0..100 {
                let num = rand_poly(&mut rng, &k, 5);
                let mut den = rand_poly(&mut rng, &k, 5);
                if den.is_zero() {
                    den = Poly::one();
                }
                let f = RatFn::new(num, den, &k).unwrap();
                let hi = rng.gen_range(-3..8);
                let window = f.laurent_below(hi, &k).to_ratfn(&k);
                let rest = f.sub(&window, &k);
                assert!(rest.ord().map_or(true, |o| o >= hi));
            }
        }
    }

    #[test]
    fn laurent_text_roundtrip() {
        let k = Field::prime(3).unwrap();
        for s in ["T+pi", "2*T^2+1+pi^3", "pi", "0", "2*pi^2"] {
            assert_eq!(LaurentPoly::parse(s, &k).unwrap().display(&k), s);
        }
        assert!(LaurentPoly::parse("pi+pi", &k).is_err());
        assert!(LaurentPoly::parse("3*pi", &k).is_err());
    }

    #[test]
    fn poly_and_frac_parts() {
        let k = Field::prime(3).unwrap();
        let u = LaurentPoly::parse("T^2+2+pi+pi^4", &k).unwrap();
        assert_eq!(u.poly_part(), Poly::parse("T^2+2", &k).unwrap());
        assert_eq!(u.frac_part(), LaurentPoly::parse("pi+pi^4", &k).unwrap());
        assert_eq!(u.to_ratfn(&k).laurent_below(10, &k), u);
    }
}
