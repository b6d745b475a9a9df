//! Polynomials over `F_q`: the ring `A = F_q[T]`.
//!
//! Coefficients are stored low-to-high with no trailing zeros, so the zero
//! polynomial is the empty vector. Ideals of `A` are identified with their
//! monic generators.

use crate::arith::field::{Fe, Field};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<Fe>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }
    pub fn one() -> Self {
        Poly(vec![1])
    }
    /// The indeterminate `T`.
    pub fn t() -> Self {
        Poly(vec![0, 1])
    }
    pub fn constant(c: Fe) -> Self {
        Self::from_coeffs(vec![c])
    }
    pub fn monomial(c: Fe, d: usize) -> Self {
        let mut v = vec![0; d + 1];
        v[d] = c;
        Self::from_coeffs(v)
    }
    pub fn from_coeffs(mut v: Vec<Fe>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        Poly(v)
    }
    pub fn coeffs(&self) -> &[Fe] {
        &self.0
    }
    pub fn coeff(&self, i: usize) -> Fe {
        self.0.get(i).copied().unwrap_or(0)
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.0 == [1]
    }
    /// Degree; `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }
    /// Degree with the zero polynomial mapped to `-1`.
    pub fn degree_i64(&self) -> i64 {
        self.0.len() as i64 - 1
    }
    pub fn lead(&self) -> Fe {
        self.0.last().copied().unwrap_or(0)
    }
    pub fn is_monic(&self) -> bool {
        self.lead() == 1
    }
    /// `|f| = q^deg f`.
    pub fn norm(&self, q: u32) -> i128 {
        match self.deg() {
            None => 0,
            Some(d) => (q as i128).pow(d as u32),
        }
    }

    pub fn add(&self, o: &Poly, k: &Field) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::from_coeffs((0..n).map(|i| k.add(self.coeff(i), o.coeff(i))).collect())
    }
    pub fn sub(&self, o: &Poly, k: &Field) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::from_coeffs((0..n).map(|i| k.sub(self.coeff(i), o.coeff(i))).collect())
    }
    pub fn neg(&self, k: &Field) -> Poly {
        Poly(self.0.iter().map(|&c| k.neg(c)).collect())
    }
    pub fn scale(&self, c: Fe, k: &Field) -> Poly {
        if c == 0 {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|&x| k.mul(x, c)).collect())
    }
    /// Multiply by `T^d`.
    pub fn shift(&self, d: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![0; d];
        v.extend_from_slice(&self.0);
        Poly(v)
    }
    pub fn mul(&self, o: &Poly, k: &Field) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![0 as Fe; self.0.len() + o.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.0.iter().enumerate() {
                v[i + j] = k.add(v[i + j], k.mul(a, b));
            }
        }
        Poly::from_coeffs(v)
    }
    pub fn pow(&self, mut e: u32, k: &Field) -> Poly {
        let mut r = Poly::one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b, k);
            }
            b = b.mul(&b, k);
            e >>= 1;
        }
        r
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &Poly, k: &Field) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.0.len() - 1;
        if self.0.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let inv = k.inv(d.lead());
        let mut r = self.0.clone();
        let mut quo = vec![0 as Fe; r.len() - dd];
        for i in (0..quo.len()).rev() {
            let c = k.mul(r[i + dd], inv);
            quo[i] = c;
            if c != 0 {
                for (j, &dj) in d.0.iter().enumerate() {
                    r[i + j] = k.sub(r[i + j], k.mul(c, dj));
                }
            }
        }
        r.truncate(dd);
        (Poly::from_coeffs(quo), Poly::from_coeffs(r))
    }
    pub fn rem(&self, d: &Poly, k: &Field) -> Poly {
        self.divrem(d, k).1
    }
    /// `self / d` when the division is exact.
    pub fn div_exact(&self, d: &Poly, k: &Field) -> Option<Poly> {
        let (q, r) = self.divrem(d, k);
        r.is_zero().then_some(q)
    }
    pub fn divides(&self, m: &Poly, k: &Field) -> bool {
        !self.is_zero() && m.rem(self, k).is_zero()
    }
    /// Monic associate; zero stays zero.
    pub fn monic(&self, k: &Field) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(k.inv(self.lead()), k)
    }
    pub fn eval(&self, x: Fe, k: &Field) -> Fe {
        self.0.iter().rev().fold(0, |acc, &c| k.add(k.mul(acc, x), c))
    }
    pub fn derivative(&self, k: &Field) -> Poly {
        Poly::from_coeffs(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| k.mul(c, k.from_int(i as i64)))
                .collect(),
        )
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Poly, k: &Field) -> Result<Poly> {
        Ok(self.xgcd(o, k)?.0)
    }

    /// `(g, s, t)` with `g = s*self + t*o` and `g` the monic gcd.
    pub fn xgcd(&self, o: &Poly, k: &Field) -> Result<(Poly, Poly, Poly)> {
        if self.is_zero() && o.is_zero() {
            return Err(Error::GcdUndefined);
        }
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (qq, r) = r0.divrem(&r1, k);
            let s = s0.sub(&qq.mul(&s1, k), k);
            let t = t0.sub(&qq.mul(&t1, k), k);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        let c = k.inv(r0.lead());
        Ok((r0.scale(c, k), s0.scale(c, k), t0.scale(c, k)))
    }

    pub fn pow_mod(&self, mut e: u128, m: &Poly, k: &Field) -> Poly {
        let mut r = Poly::one().rem(m, k);
        let mut b = self.rem(m, k);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b, k).rem(m, k);
            }
            b = b.mul(&b, k).rem(m, k);
            e >>= 1;
        }
        r
    }

    /// Rabin's test: `f` of degree `n` is irreducible iff `T^(q^n) = T mod f`
    /// and `gcd(T^(q^(n/r)) - T, f) = 1` for every prime `r | n`.
    pub fn is_irreducible(&self, k: &Field) -> Result<bool> {
        let n = match self.deg() {
            None | Some(0) => return Err(Error::ConstantPolynomial),
            Some(n) => n,
        };
        if n == 1 {
            return Ok(true);
        }
        let f = self.monic(k);
        let q = k.q() as u128;
        let t = Poly::t();
        // powers[i] = T^(q^i) mod f
        let mut powers = vec![t.rem(&f, k)];
        for i in 1..=n {
            let prev = &powers[i - 1];
            powers.push(prev.pow_mod(q, &f, k));
        }
        if powers[n] != t.rem(&f, k) {
            return Ok(false);
        }
        let mut m = n;
        let mut r = 2;
        let mut prime_divs = Vec::new();
        while m > 1 {
            if m % r == 0 {
                prime_divs.push(r);
                while m % r == 0 {
                    m /= r;
                }
            }
            r += 1;
        }
        for r in prime_divs {
            let h = powers[n / r].sub(&t, k);
            if !h.gcd(&f, k)?.is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Monic irreducible factors with multiplicity, by trial division with
    /// monic polynomials of increasing degree. The leading constant is dropped.
    pub fn factor(&self, k: &Field) -> Result<Vec<(Poly, u32)>> {
        if self.is_zero() {
            return Err(Error::ZeroInput("cannot factor the zero polynomial".into()));
        }
        let mut rest = self.monic(k);
        let mut out: Vec<(Poly, u32)> = Vec::new();
        let mut d = 1;
        while rest.deg().unwrap_or(0) >= 2 * d {
            for m in monic_polys(d, k) {
                let mut e = 0;
                while let Some(qq) = rest.div_exact(&m, k) {
                    rest = qq;
                    e += 1;
                }
                if e > 0 {
                    out.push((m, e));
                }
                if rest.deg().unwrap_or(0) < 2 * d {
                    break;
                }
            }
            d += 1;
        }
        if rest.deg().unwrap_or(0) >= 1 {
            if let Some(pos) = out.iter().position(|(p, _)| *p == rest) {
                out[pos].1 += 1;
            } else {
                out.push((rest, 1));
            }
        }
        out.sort_by(|a, b| cmp_canonical(&a.0, &b.0));
        Ok(out)
    }

    /// `sigma(m) = sum of |m'|` over monic divisors `m'` of `m`.
    pub fn sigma(&self, k: &Field) -> Result<i128> {
        if self.is_zero() {
            return Err(Error::ZeroInput("sigma of the zero polynomial".into()));
        }
        let q = k.q();
        let mut total: i128 = 1;
        for (p, e) in self.factor(k)? {
            let np = p.norm(q);
            let mut s: i128 = 0;
            let mut pw: i128 = 1;
            for _ in 0..=e {
                s = s.checked_add(pw).expect("sigma overflow");
                pw = pw.checked_mul(np).expect("sigma overflow");
            }
            total = total.checked_mul(s).expect("sigma overflow");
        }
        Ok(total)
    }

    /// Position of a monic polynomial in the dense ordering by degree, then by
    /// base-`q` code of the lower coefficients:
    /// `index = (q^d - 1)/(q - 1) + sum m_j q^j`.
    pub fn monic_index(&self, q: u32) -> usize {
        let d = self.deg().expect("monic_index of zero");
        debug_assert!(self.is_monic());
        let mut idx = 0usize;
        for j in (0..d).rev() {
            idx = idx * q as usize + self.0[j] as usize;
        }
        monic_block_start(d, q) + idx
    }
    pub fn from_monic_index(idx: usize, q: u32) -> Poly {
        let mut d = 0;
        while monic_block_start(d + 1, q) <= idx {
            d += 1;
        }
        let mut c = idx - monic_block_start(d, q);
        let mut v = Vec::with_capacity(d + 1);
        for _ in 0..d {
            v.push((c % q as usize) as Fe);
            c /= q as usize;
        }
        v.push(1);
        Poly(v)
    }

    pub fn parse(text: &str, k: &Field) -> Result<Poly> {
        let v = parse_terms(text, "T", &|s| k.parse_elem(s))?;
        Ok(Poly::from_coeffs(v))
    }
    pub fn display(&self, k: &Field) -> String {
        format_terms(&self.0, "T", &|c| k.fmt_elem(c))
    }
}

/// Number of monic polynomials of degree `< d`, i.e. the index of the first
/// monic polynomial of degree `d`.
pub fn monic_block_start(d: usize, q: u32) -> usize {
    let q = q as usize;
    if q == 1 {
        return d;
    }
    (q.pow(d as u32) - 1) / (q - 1)
}

/// Number of monic polynomials of degree at most `d`.
pub fn monic_count_upto(d: usize, q: u32) -> usize {
    monic_block_start(d + 1, q)
}

/// All monic polynomials of degree `d`, in monic-index order.
pub fn monic_polys(d: usize, k: &Field) -> impl Iterator<Item = Poly> {
    let q = k.q();
    let start = monic_block_start(d, q);
    let count = (q as usize).pow(d as u32);
    (start..start + count).map(move |i| Poly::from_monic_index(i, q))
}

/// All polynomials of degree `< d` (including zero), by base-`q` code.
pub fn polys_below(d: usize, k: &Field) -> impl Iterator<Item = Poly> {
    let q = k.q() as usize;
    (0..q.pow(d as u32)).map(move |mut c| {
        let mut v = Vec::with_capacity(d);
        for _ in 0..d {
            v.push((c % q) as Fe);
            c /= q;
        }
        Poly::from_coeffs(v)
    })
}

/// Canonical total order: by degree, then by coefficients from the top.
pub fn cmp_canonical(a: &Poly, b: &Poly) -> std::cmp::Ordering {
    a.0.len()
        .cmp(&b.0.len())
        .then_with(|| a.0.iter().rev().cmp(b.0.iter().rev()))
}

/// Chinese remainder theorem: the unique `r` with `deg r < sum deg m_i` and
/// `r = r_i mod m_i`.
pub fn crt(pairs: &[(Poly, Poly)], k: &Field) -> Result<Poly> {
    let mut modulus = Poly::one();
    let mut acc = Poly::zero();
    for (m, r) in pairs {
        if m.is_zero() {
            return Err(Error::ZeroInput("zero modulus in CRT".into()));
        }
        let (g, s, _t) = modulus.xgcd(m, k)?;
        if !g.is_one() {
            return Err(Error::NotCoprime(format!(
                "{} and {}",
                modulus.display(k),
                m.display(k)
            )));
        }
        // acc + modulus * s * (r - acc) satisfies both congruences since
        // s * modulus = 1 mod m.
        let diff = r.sub(&acc, k).mul(&s, k).rem(m, k);
        acc = acc.add(&modulus.mul(&diff, k), k);
        modulus = modulus.mul(m, k);
        acc = acc.rem(&modulus, k);
    }
    Ok(acc)
}

fn split_top_level(text: &str) -> Result<Vec<&str>> {
    let mut depth = 0i32;
    let mut parts = Vec::new();
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse(format!("unbalanced parentheses in `{text}`")));
                }
            }
            '+' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced parentheses in `{text}`")));
    }
    parts.push(&text[start..]);
    Ok(parts)
}

/// One parsed monomial: `(variable index or None for a constant, exponent, coefficient)`.
pub(crate) type Monomial = (Option<usize>, u32, Fe);

/// Parse a `+`-separated sum of monomials `c*v^e` over the given variables.
pub(crate) fn parse_monomials(
    text: &str,
    vars: &[&str],
    coeff: &dyn Fn(&str) -> Result<Fe>,
) -> Result<Vec<Monomial>> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    if cleaned == "0" {
        return Ok(Vec::new());
    }
    let mut out: Vec<Monomial> = Vec::new();
    for term in split_top_level(&cleaned)? {
        if term.is_empty() {
            return Err(Error::Parse(format!("empty term in `{cleaned}`")));
        }
        let (base, exp) = match term.rfind('^') {
            Some(pos) if !term[pos + 1..].is_empty() && term[pos + 1..].bytes().all(|b| b.is_ascii_digit()) => {
                let es = &term[pos + 1..];
                if es.starts_with('0') {
                    return Err(Error::Parse(format!("non-canonical exponent in `{term}`")));
                }
                let e: u32 = es.parse().map_err(|_| Error::Parse(format!("bad exponent in `{term}`")))?;
                if e < 2 {
                    return Err(Error::Parse(format!("non-canonical exponent in `{term}`")));
                }
                (&term[..pos], Some(e))
            }
            _ => (term, None),
        };
        let hit = vars.iter().enumerate().find(|(_, v)| base.ends_with(*v));
        let mono = match hit {
            Some((vi, v)) => {
                let prefix = &base[..base.len() - v.len()];
                let c = if prefix.is_empty() {
                    1
                } else {
                    let cs = prefix
                        .strip_suffix('*')
                        .ok_or_else(|| Error::Parse(format!("malformed term `{term}`")))?;
                    let cs = cs.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(cs);
                    let c = coeff(cs)?;
                    if c <= 1 {
                        return Err(Error::Parse(format!("non-canonical coefficient in `{term}`")));
                    }
                    c
                };
                (Some(vi), exp.unwrap_or(1), c)
            }
            None => {
                let cs = term.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(term);
                let c = coeff(cs)?;
                if c == 0 {
                    return Err(Error::Parse(format!("zero term in `{cleaned}`")));
                }
                (None, 0, c)
            }
        };
        if out.iter().any(|(v, e, _)| *v == mono.0 && *e == mono.1) {
            return Err(Error::Parse(format!("repeated monomial in `{cleaned}`")));
        }
        out.push(mono);
    }
    Ok(out)
}

/// Parse a polynomial in a single variable into dense low-to-high coefficients.
pub(crate) fn parse_terms(text: &str, var: &str, coeff: &dyn Fn(&str) -> Result<Fe>) -> Result<Vec<Fe>> {
    let monos = parse_monomials(text, &[var], coeff)?;
    let top = monos.iter().map(|m| m.1 as usize).max().unwrap_or(0);
    let mut v = vec![0; if monos.is_empty() { 0 } else { top + 1 }];
    for (_, e, c) in monos {
        v[e as usize] = c;
    }
    while v.last() == Some(&0) {
        v.pop();
    }
    Ok(v)
}

/// Format one monomial `c * var^e`; `e = 0` means a bare constant.
pub(crate) fn format_monomial(c: &str, var: &str, e: u32) -> String {
    if e == 0 {
        return if c.contains('+') { format!("({c})") } else { c.to_string() };
    }
    let mono = if e == 1 { var.to_string() } else { format!("{var}^{e}") };
    if c == "1" {
        mono
    } else if c.contains('+') || c.contains('*') {
        format!("({c})*{mono}")
    } else {
        format!("{c}*{mono}")
    }
}

/// Canonical text of dense low-to-high coefficients, highest degree first.
pub(crate) fn format_terms(coeffs: &[Fe], var: &str, fmt: &dyn Fn(Fe) -> String) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(e, &c)| format_monomial(&fmt(c), var, e as u32))
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u32) -> Field {
        Field::of_order(q).unwrap()
    }
    fn p(s: &str, k: &Field) -> Poly {
        Poly::parse(s, k).unwrap()
    }

    #[test]
    fn xgcd_examples() {
        let k = f(3);
        let (g, s, t) = p("T", &k).xgcd(&p("T+1", &k), &k).unwrap();
        assert!(g.is_one());
        assert_eq!(s.mul(&p("T", &k), &k).add(&t.mul(&p("T+1", &k), &k), &k), Poly::one());
        assert_eq!(s, Poly::constant(2));
        assert_eq!(t, Poly::one());

        let (g, _, _) = p("T^2", &k).xgcd(&p("T^2", &k), &k).unwrap();
        assert_eq!(g, p("T^2", &k));

        let k2 = f(2);
        let (g, s, t) = p("T^2+1", &k2).xgcd(&p("T", &k2), &k2).unwrap();
        assert!(g.is_one());
        assert_eq!(s, Poly::one());
        assert_eq!(t, p("T", &k2));

        assert_eq!(Poly::zero().xgcd(&Poly::zero(), &k), Err(Error::GcdUndefined));
    }

    #[test]
    fn crt_examples() {
        let k = f(3);
        let r = crt(&[(p("T", &k), Poly::one()), (p("T+1", &k), Poly::zero())], &k).unwrap();
        // Independent check: r(0) = 1, r(-1) = 0, deg r < 2.
        assert!(r.deg().unwrap() < 2);
        assert_eq!(r.eval(0, &k), 1);
        assert_eq!(r.eval(2, &k), 0);
        assert_eq!(r, p("T+1", &k));
        assert_eq!(crt(&[(p("T", &k), Poly::constant(2))], &k).unwrap(), Poly::constant(2));
        assert_eq!(
            crt(&[(p("T", &k), Poly::zero()), (p("T+1", &k), Poly::zero())], &k).unwrap(),
            Poly::zero()
        );
        assert!(matches!(
            crt(&[(p("T", &k), Poly::one()), (p("2*T", &k), Poly::zero())], &k),
            Err(Error::NotCoprime(_))
        ));
    }

    #[test]
    fn irreducibility_examples() {
        assert!(p("T^2+T+1", &f(2)).is_irreducible(&f(2)).unwrap());
        for q in [2, 3, 5] {
            assert!(!p("T^2", &f(q)).is_irreducible(&f(q)).unwrap());
        }
        assert!(p("T^2+1", &f(3)).is_irreducible(&f(3)).unwrap());
        assert!(!p("T^2+1", &f(5)).is_irreducible(&f(5)).unwrap());
        assert_eq!(Poly::constant(2).is_irreducible(&f(3)), Err(Error::ConstantPolynomial));
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        // Number of monic irreducibles of degree d over F_q: (1/d) sum_{e|d} mu(e) q^(d/e).
        for (q, d, expect) in [(2u32, 2usize, 1usize), (2, 3, 2), (2, 4, 3), (3, 2, 3), (3, 3, 8), (4, 2, 6), (5, 2, 10)] {
            let k = f(q);
            let n = monic_polys(d, &k).filter(|m| m.is_irreducible(&k).unwrap()).count();
            assert_eq!(n, expect, "q={q} d={d}");
        }
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(Poly::one().sigma(&f(3)).unwrap(), 1);
        assert_eq!(p("T", &f(3)).sigma(&f(3)).unwrap(), 4);
        assert_eq!(p("T^2+T+1", &f(2)).sigma(&f(2)).unwrap(), 5);
        assert!(Poly::zero().sigma(&f(3)).is_err());
    }

    #[test]
    fn sigma_matches_divisor_enumeration() {
        let k = f(3);
        for d in 0..=4 {
            for m in monic_polys(d, &k) {
                let brute: i128 = (0..=d)
                    .flat_map(|e| monic_polys(e, &k).collect::<Vec<_>>())
                    .filter(|x| x.divides(&m, &k))
                    .map(|x| x.norm(3))
                    .sum();
                assert_eq!(m.sigma(&k).unwrap(), brute, "{}", m.display(&k));
            }
        }
    }

    #[test]
    fn monic_index_roundtrip() {
        for q in [2u32, 3, 4] {
            for idx in 0..monic_count_upto(4, q) {
                let m = Poly::from_monic_index(idx, q);
                assert!(m.is_monic());
                assert_eq!(m.monic_index(q), idx);
            }
        }
        assert_eq!(monic_count_upto(2, 3), 1 + 3 + 9);
    }

    #[test]
    fn factor_reassembles() {
        let k = f(2);
        let m = p("T^5+T^4+T^2+T", &k);
        let fs = m.factor(&k).unwrap();
        let mut prod = Poly::one();
        for (pp, e) in &fs {
            assert!(pp.is_irreducible(&k).unwrap());
            prod = prod.mul(&pp.pow(*e, &k), &k);
        }
        assert_eq!(prod, m);
    }

    #[test]
    fn text_format_roundtrip_and_rejections() {
        let k = f(3);
        for s in ["T^3+2*T+1", "0", "1", "T", "2*T^2"] {
            assert_eq!(p(s, &k).display(&k), s);
        }
        assert!(Poly::parse("T^3+3*T", &k).is_err());
        assert!(Poly::parse("1*T", &k).is_err());
        assert!(Poly::parse("T+T", &k).is_err());
        assert!(Poly::parse("T^", &k).is_err());
        assert!(Poly::parse("", &k).is_err());
        let k9 = Field::with_modulus_str(3, "g^2+1").unwrap();
        for s in ["g*T+1", "(g+1)*T^2+g", "T+(2*g+1)", "(2*g)*T"] {
            assert_eq!(Poly::parse(s, &k9).unwrap().display(&k9), s);
        }
    }
}
