//! Eisenstein cochains: the level-one `E~` with `E~(e_i) = q^(i+1)`, the span
//! of `E~ | B_d` for `d | n`, and the eigen-combinations
//! `E^eps = nu(eps)^-1 sum_{d | n} eps_d E~ | B_d`.

use std::fmt;

use num_integer::Integer;

use crate::arith::poly::{monic_block_start, monic_count_upto};
use crate::arith::{Cyclo, Mode, Poly};
use crate::cochain::{Ctx, EdgeFn, FourierData};
use crate::error::{Error, Result};
use crate::level::Level;
use crate::tree::{act, reduce_gl2a, TreeEdge, GL2F};

/// `E~(e)` from the half-line position of `e`.
pub fn etilde_closed(e: &TreeEdge, q: u32, f: &crate::arith::Field) -> Result<i128> {
    let r = reduce_gl2a(e, f)?;
    let v = u32::try_from(r.index + 1)
        .ok()
        .and_then(|i| (q as i128).checked_pow(i))
        .ok_or_else(|| Error::Usage("edge too far out on the half-line".into()))?;
    Ok(if r.flipped { 1 + q as i128 - v } else { v })
}

/// `E~` as an edge function in the scalars of `ctx`.
pub struct EtildeClosed<'a>(pub &'a Ctx);

impl EdgeFn for EtildeClosed<'_> {
    fn value(&self, e: &TreeEdge) -> Result<Cyclo> {
        Ok(self.0.int(etilde_closed(e, self.0.q(), &self.0.field)?))
    }
}

/// `sigma(m) = sum_{d | m monic} |d|` for all monic `m` of degree `<= depth`,
/// by sieving over products.
pub fn sigma_table(depth: usize, f: &crate::arith::Field) -> Vec<i128> {
    let q = f.q();
    let mut out = vec![0i128; monic_count_upto(depth, q)];
    for da in 0..=depth {
        let na = (q as i128).pow(da as u32);
        let sa = monic_block_start(da, q);
        for ia in sa..sa + (q as usize).pow(da as u32) {
            let a = Poly::from_monic_index(ia, q);
            for db in 0..=depth - da {
                let sb = monic_block_start(db, q);
                for ib in sb..sb + (q as usize).pow(db as u32) {
                    let b = Poly::from_monic_index(ib, q);
                    out[a.mul(&b, f).monic_index(q)] += na;
                }
            }
        }
    }
    out
}

/// Fourier data of `E~`: `c0 = q`, `f*(m) = (1 - q^2) sigma(m) / q^(1 + deg m)`,
/// pairing `q + 1`.
pub fn etilde_fourier(ctx: &Ctx, depth: i64) -> Result<FourierData> {
    if depth < 0 {
        return Err(Error::InsufficientDepth { needed: 0, available: depth });
    }
    let q = ctx.q() as i128;
    let sig = sigma_table(depth as usize, &ctx.field);
    let star = sig
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let d = Poly::from_monic_index(i, ctx.q()).degree_i64();
            ctx.scale_q(&ctx.int((1 - q * q) * s), -1 - d)
        })
        .collect();
    Ok(FourierData::new(ctx.clone(), Poly::one(), depth, ctx.int(q), star, ctx.int(q + 1))?.with_eigen_flag(true))
}

/// Sign vector `(eps_1, ..., eps_s)` aligned with the primes of a level.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EpsVector(pub Vec<i8>);

impl EpsVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&x| x != 1 && x != -1) {
            return Err(Error::Usage("signs must be +1 or -1".into()));
        }
        Ok(EpsVector(signs))
    }
    /// Accepts `+-+`, `1,-1` or `(1,-1)`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let t = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(t);
        if t.is_empty() {
            return Ok(EpsVector(Vec::new()));
        }
        if t.chars().all(|c| c == '+' || c == '-') {
            return Ok(EpsVector(t.chars().map(|c| if c == '+' { 1 } else { -1 }).collect()));
        }
        let signs = t
            .split(',')
            .map(|x| match x.trim() {
                "1" | "+1" => Ok(1),
                "-1" => Ok(-1),
                other => Err(Error::Parse(format!("bad sign `{other}` in `{text}`"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Ok(EpsVector(signs))
    }
    pub fn one(s: usize) -> Self {
        EpsVector(vec![1; s])
    }
    /// `eps_H = ((-1)^deg p_1, ..., (-1)^deg p_s)`.
    pub fn eps_h(level: &Level) -> Self {
        EpsVector(level.primes().iter().map(|p| if p.deg().unwrap() % 2 == 0 { 1 } else { -1 }).collect())
    }
    /// `eps_H` with the sign at position `i` reversed.
    pub fn eps_h_flipped(level: &Level, i: usize) -> Self {
        let mut e = Self::eps_h(level);
        e.0[i] = -e.0[i];
        e
    }
    /// `eps_H` with the last sign reversed.
    pub fn eps_h_s(level: &Level) -> Self {
        Self::eps_h_flipped(level, level.s() - 1)
    }
    /// All `2^s` vectors, in bitmask order (bit set means `-1`).
    pub fn all(s: usize) -> Vec<EpsVector> {
        (0..1u32 << s).map(|m| EpsVector((0..s).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect())).collect()
    }
    pub fn s(&self) -> usize {
        self.0.len()
    }
    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&x| x == 1)
    }
    /// `eps_d = prod_{i in mask} eps_i`.
    pub fn eps_d(&self, mask: u32) -> i128 {
        (0..self.s()).filter(|i| mask >> i & 1 == 1).map(|i| self.0[i] as i128).product()
    }
    fn check(&self, level: &Level) -> Result<()> {
        if self.s() != level.s() {
            return Err(Error::Usage(format!("sign vector has {} entries, level has {} primes", self.s(), level.s())));
        }
        Ok(())
    }
    /// `nu = 1` for `eps_H`, else `q + 1`.
    pub fn nu(&self, level: &Level, q: u32) -> Result<i128> {
        self.check(level)?;
        Ok(if *self == Self::eps_h(level) { 1 } else { q as i128 + 1 })
    }
    /// `N(n, eps) = prod (1 + eps_i |p_i|)`.
    pub fn big_n(&self, level: &Level, q: u32) -> Result<i128> {
        self.check(level)?;
        Ok(level
            .primes()
            .iter()
            .zip(&self.0)
            .map(|(p, &e)| 1 + e as i128 * p.norm(q))
            .product())
    }
    /// `(q + 1) / nu * prod (1 + eps_i)`, as an exact fraction `(num, nu)`.
    pub fn pairing(&self, level: &Level, q: u32) -> Result<(i128, i128)> {
        let nu = self.nu(level, q)?;
        let prod: i128 = self.0.iter().map(|&e| 1 + e as i128).product();
        Ok(((q as i128 + 1) * prod, nu))
    }
}

impl fmt::Display for EpsVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", v.join(","))
    }
}

/// `nu^-1 sum_d a_d E~ | B_d` with integer `a_d` indexed by divisor mask.
#[derive(Clone, Debug)]
pub struct EisCombo {
    level: Level,
    coeffs: Vec<i128>,
    nu: i128,
}

impl PartialEq for EisCombo {
    fn eq(&self, o: &Self) -> bool {
        self.level == o.level && self.coeffs.iter().zip(&o.coeffs).all(|(a, b)| a * o.nu == b * self.nu)
    }
}

impl EisCombo {
    pub fn new(level: Level, coeffs: Vec<i128>, nu: i128) -> Result<Self> {
        if coeffs.len() != level.num_divisors() || nu == 0 {
            return Err(Error::Usage("combination does not match level".into()));
        }
        Ok(EisCombo { level, coeffs, nu })
    }
    /// `E~ | B_d`.
    pub fn etilde_b(level: &Level, mask: u32) -> Self {
        let mut c = vec![0; level.num_divisors()];
        c[mask as usize] = 1;
        EisCombo { level: level.clone(), coeffs: c, nu: 1 }
    }
    pub fn e_eps(level: &Level, eps: &EpsVector, q: u32) -> Result<Self> {
        let nu = eps.nu(level, q)?;
        let coeffs = (0..level.num_divisors() as u32).map(|m| eps.eps_d(m)).collect();
        Ok(EisCombo { level: level.clone(), coeffs, nu })
    }
    pub fn level(&self) -> &Level {
        &self.level
    }
    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }
    pub fn nu(&self) -> i128 {
        self.nu
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&a| a == 0)
    }

    fn check_level(&self, o: &EisCombo) -> Result<()> {
        if self.level != o.level {
            return Err(Error::InvalidLevel("combinations at different levels".into()));
        }
        Ok(())
    }
    pub fn add(&self, o: &EisCombo) -> Result<EisCombo> {
        self.check_level(o)?;
        let nu = self.nu.lcm(&o.nu);
        let (x, y) = (nu / self.nu, nu / o.nu);
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a * x + b * y).collect();
        Ok(EisCombo { level: self.level.clone(), coeffs, nu })
    }
    pub fn scale(&self, a: i128) -> EisCombo {
        EisCombo { level: self.level.clone(), coeffs: self.coeffs.iter().map(|c| c * a).collect(), nu: self.nu }
    }
    pub fn sub(&self, o: &EisCombo) -> Result<EisCombo> {
        self.add(&o.scale(-1))
    }

    /// `| W_m`: the coefficient of `d` moves to `d m / (d, m)^2`.
    pub fn apply_w(&self, m: &Poly, f: &crate::arith::Field) -> Result<EisCombo> {
        let mm = self.level.mask_of(m, f).ok_or_else(|| {
            Error::InvalidOperator(format!("{} does not exactly divide the level", m.display(f)))
        })?;
        let mut coeffs = vec![0; self.coeffs.len()];
        for (d, &a) in self.coeffs.iter().enumerate() {
            coeffs[d ^ mm as usize] += a;
        }
        Ok(EisCombo { level: self.level.clone(), coeffs, nu: self.nu })
    }

    fn prime_idx(&self, p: &Poly, f: &crate::arith::Field) -> Result<usize> {
        self.level
            .prime_index(p)
            .ok_or_else(|| Error::InvalidOperator(format!("{} is not a prime of the level", p.display(f))))
    }

    /// `| U_p` for `p | n`, using `E~ | U_p = (|p| + 1) E~ - E~ | B_p` and
    /// `E~ | B_p | U_p = |p| E~`.
    pub fn apply_u(&self, p: &Poly, f: &crate::arith::Field) -> Result<EisCombo> {
        let i = self.prime_idx(p, f)?;
        let np = p.norm(f.q());
        let bit = 1usize << i;
        let mut coeffs = vec![0; self.coeffs.len()];
        for (d, &a) in self.coeffs.iter().enumerate() {
            if d & bit == 0 {
                coeffs[d] += (np + 1) * a;
                coeffs[d | bit] -= a;
            } else {
                coeffs[d ^ bit] += np * a;
            }
        }
        Ok(EisCombo { level: self.level.clone(), coeffs, nu: self.nu })
    }

    /// `Tr(h) = h + h | W_p U_p`, returned at level `n / p`.
    pub fn trace_down(&self, p: &Poly, f: &crate::arith::Field) -> Result<EisCombo> {
        let i = self.prime_idx(p, f)?;
        let t = self.add(&self.apply_w(p, f)?.apply_u(p, f)?)?;
        let low = self.level.without(i, f);
        let mut coeffs = vec![0; low.num_divisors()];
        for (d, &a) in t.coeffs.iter().enumerate() {
            if d >> i & 1 == 1 {
                if a != 0 {
                    return Err(Error::InvalidOperator("trace did not land in the lower level".into()));
                }
            } else {
                coeffs[Level::drop_bit(d as u32, i) as usize] = a;
            }
        }
        Ok(EisCombo { level: low, coeffs, nu: t.nu })
    }

    /// The same cochain viewed at a level `big` that `self.level` divides.
    pub fn embed(&self, big: &Level, f: &crate::arith::Field) -> Result<EisCombo> {
        if !self.level.n().divides(big.n(), f) {
            return Err(Error::InvalidLevel("target level is not a multiple".into()));
        }
        let mut coeffs = vec![0; big.num_divisors()];
        for (d, &a) in self.coeffs.iter().enumerate() {
            let dd = self.level.divisor(d as u32, f);
            coeffs[big.mask_of(&dd, f).expect("divisor") as usize] += a;
        }
        Ok(EisCombo { level: big.clone(), coeffs, nu: self.nu })
    }

    /// Fourier data to `depth`: built exactly, divided by `nu` exactly (an
    /// error certifies non-integrality), then reduced if `ctx` is modular.
    pub fn to_fourier(&self, ctx: &Ctx, depth: i64) -> Result<FourierData> {
        let exact = ctx.with_mode(Mode::Exact)?;
        let f = &ctx.field;
        let et = etilde_fourier(&exact, depth)?;
        let mut acc = FourierData::zero(exact.clone(), Poly::one(), depth)?;
        for (d, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let dd = self.level.divisor(d as u32, f);
            let term = et.apply_b_to(&dd, depth)?.mul_int(a);
            acc = acc.add(&term)?;
        }
        let out = acc.div_int(self.nu)?.with_level(self.level.n().clone()).with_eigen_flag(true);
        match ctx.mode {
            Mode::Exact => Ok(out),
            Mode::Mod(m) => Ok(out.reduce(m)?.with_eigen_flag(true)),
        }
    }

    /// Integer value at an edge from the closed form of `E~`.
    pub fn eval_closed(&self, e: &TreeEdge, f: &crate::arith::Field) -> Result<i128> {
        let mut total = 0i128;
        for (d, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let dd = self.level.divisor(d as u32, f);
            let g = GL2F::from_polys(&dd, &Poly::zero(), &Poly::zero(), &Poly::one(), f)?;
            let v = etilde_closed(&act(&g, e, f)?, f.q(), f)?;
            total = v.checked_mul(a).and_then(|x| x.checked_add(total)).ok_or_else(|| Error::Usage("overflow".into()))?;
        }
        if total % self.nu != 0 {
            return Err(Error::NonIntegral(format!("value {total}/{} at {}", self.nu, e.display(f))));
        }
        Ok(total / self.nu)
    }
}

/// `E^eps` as a combination together with its Fourier data.
pub fn build_e_eps(level: &Level, eps: &EpsVector, ctx: &Ctx, depth: i64) -> Result<(EisCombo, FourierData)> {
    let c = EisCombo::e_eps(level, eps, ctx.q())?;
    let d = c.to_fourier(ctx, depth)?;
    Ok((c, d))
}

/// `gcd(l^r, |x|)`.
pub fn order_formula(x: i128, ell: u32, r: u32) -> i128 {
    let m = (ell as i128).pow(r);
    m.gcd(&x.abs())
}

/// Outcome of [`eisenstein_order`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderReport {
    pub big_n: i128,
    pub nu: i128,
    pub n_over_nu: i128,
    /// `gcd(l^r, N/nu)` (or 1 for `eps = 1`).
    pub formula: i128,
    /// Size of `{x E^eps : x in Z/l^r, cuspidal and harmonic}` from the
    /// reduced Fourier data.
    pub certified: i128,
}

/// Order of `E_0(n, Z/l^r)^eps`, with a constructive certificate: the group
/// `{x E : x c0 = 0, x pairing = 0} / {x E = 0}` over `x in Z/l^r` is counted
/// from additive orders of the reduced coefficients.
pub fn eisenstein_order(level: &Level, eps: &EpsVector, ell: u32, r: u32, ctx: &Ctx) -> Result<OrderReport> {
    let q = ctx.q();
    if r == 0 || !crate::arith::field::is_prime(ell as u64) {
        return Err(Error::Usage(format!("l = {ell} must be prime and r >= 1")));
    }
    let qq = q as i128;
    if (qq * (qq - 1)) % ell as i128 == 0 {
        return Err(Error::Hypothesis(format!("l = {ell} divides q(q-1) = {}", qq * (qq - 1))));
    }
    let big_n = eps.big_n(level, q)?;
    let nu = eps.nu(level, q)?;
    if big_n % nu != 0 {
        return Err(Error::NonIntegral(format!("N = {big_n} not divisible by nu = {nu}")));
    }
    let n_over_nu = big_n / nu;
    let formula = if eps.is_one() { 1 } else { order_formula(n_over_nu, ell, r) };
    let modulus = (ell as i128).pow(r);
    let mctx = ctx.with_mode(Mode::modulo(ell, r, ctx.p())?)?;
    let data = EisCombo::e_eps(level, eps, q)?.to_fourier(&mctx, 2)?;
    let lcm_orders = |xs: &mut dyn Iterator<Item = &Cyclo>| -> i128 {
        xs.fold(1i128, |acc, x| acc.lcm(&x.additive_order().expect("modular scalar")))
    };
    let ord_all = lcm_orders(&mut std::iter::once(data.c0()).chain(data.star_table()).chain(std::iter::once(data.pairing())));
    let ord_cusp = lcm_orders(&mut [data.c0(), data.pairing()].into_iter());
    // multiples x with x c0 = x c = 0 number modulus / ord_cusp; those with
    // x E = 0 number modulus / ord_all
    let certified = ord_all / ord_cusp;
    debug_assert!(modulus % ord_all == 0);
    Ok(OrderReport { big_n, nu, n_over_nu, formula, certified })
}

/// `h = f | prod_{i < s} K_(p_i)` for `f` with `f | W_(p_s) = sign f`; checks
/// `h*(m p_s) = sign h*(m)` within depth and returns `h`.
pub fn annihilator_cascade(f: &FourierData, level: &Level, sign: i128) -> Result<FourierData> {
    let s = level.s();
    if s == 0 {
        return Err(Error::InvalidLevel("cascade needs at least one prime".into()));
    }
    let k = f.field();
    let mut h = f.clone();
    for p in &level.primes()[..s - 1] {
        h = h.apply_k(p)?;
    }
    let ps = &level.primes()[s - 1];
    let q = f.ctx().q();
    let dps = ps.degree_i64();
    for i in 0..monic_count_upto((h.depth() - dps).max(-1).max(0) as usize, q) {
        if h.depth() < dps {
            break;
        }
        let m = Poly::from_monic_index(i, q);
        let lhs = h.star(&m.mul(ps, k))?;
        let rhs = h.star(&m)?.mul_int(sign);
        if lhs != rhs {
            return Err(Error::Hypothesis(format!("cascade identity fails at m = {}", m.display(k))));
        }
    }
    Ok(h)
}

/// The deduction `f -> f - (f*(1) / E*(1)) E^eps` followed by the cascade
/// over successively smaller prime sets. Returns the scalar `c` with
/// `f = c E^eps` after checking it coefficientwise.
pub fn uniqueness_pipeline(f: &FourierData, level: &Level, eps: &EpsVector) -> Result<Cyclo> {
    let ctx = f.ctx().clone();
    let depth = f.depth();
    let (_, e) = build_e_eps(level, eps, &ctx, depth)?;
    let e1 = e.star(&Poly::one())?;
    let f1 = f.star(&Poly::one())?;
    // E*(1) = (1 - q^2) / (q nu) is an integer multiple of q^-1 times a unit
    // cofactor; divide through the integer part
    let (num, den) = e1.as_p_fraction().ok_or_else(|| Error::NonIntegral("E*(1) not rational".into()))?;
    let c = f1.div_int(num)?.mul_int((ctx.p() as i128).pow(den));
    let mut ft = f.sub(&e.scale(&c))?;
    let kf = f.field();
    let q = ctx.q();
    for i in 0..ft.star_table().len() {
        let m = Poly::from_monic_index(i, q);
        if m.gcd(level.n(), kf)?.is_one() && !ft.star(&m)?.is_zero() {
            return Err(Error::Hypothesis(format!("coefficient at coprime m = {} survives", m.display(kf))));
        }
    }
    let mut lv = level.clone();
    while lv.s() > 0 {
        let sign = eps.0[lv.s() - 1] as i128;
        let h = annihilator_cascade(&ft, &lv, sign)?;
        if h.star_table().iter().any(|x| !x.is_zero()) {
            return Err(Error::Hypothesis("cascade output is nonzero".into()));
        }
        lv = lv.without(lv.s() - 1, kf);
        ft = ft.with_level(ft.level().clone());
    }
    if ft.star_table().iter().any(|x| !x.is_zero()) || !ft.c0().is_zero() {
        return Err(Error::Hypothesis("residual is not zero".into()));
    }
    Ok(c)
}
