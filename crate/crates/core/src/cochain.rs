//! `Gamma_0(n)`-invariant pseudo-harmonic cochains stored by their Fourier
//! coefficients, and the operators `B`, `U`, `T`, `K`, `W`.
//!
//! For a positive edge `(k, u)` the expansion reads
//!
//! ```text
//! f(k, u) = f0(pi^k) + sum_{0 != m, deg m <= k-2} f*(m) q^-(k-2-deg m) eta(m u)
//! ```
//!
//! with `f0(pi^k) = c0 q^-k`. Negative edges are first moved to positive ones
//! by an element of `Gamma_0(n)`.

use serde_json::{json, Value};

use crate::arith::cyclo::CycloJson;
use crate::arith::poly::{monic_block_start, monic_count_upto, monic_polys, polys_below};
use crate::arith::{Character, Cyclo, Fe, Field, LaurentPoly, Mode, Poly, RatFn};
use crate::arith::cyclo::CycloAcc;
use crate::error::{Error, Result};
use crate::tree::{act, reduce_to_positive, TreeEdge, GL2F};

/// Anything that assigns a scalar to each edge.
pub trait EdgeFn {
    fn value(&self, e: &TreeEdge) -> Result<Cyclo>;
}

impl<F: Fn(&TreeEdge) -> Result<Cyclo>> EdgeFn for F {
    fn value(&self, e: &TreeEdge) -> Result<Cyclo> {
        self(e)
    }
}

/// Field, additive character and scalar mode shared by a computation.
#[derive(Clone, Debug, PartialEq)]
pub struct Ctx {
    pub field: Field,
    pub chi: Character,
    pub mode: Mode,
}

impl Ctx {
    pub fn new(field: Field, chi: Character, mode: Mode) -> Result<Self> {
        if chi.s % field.p() == 0 {
            return Err(Error::Usage("trivial character".into()));
        }
        if let Mode::Mod(m) = mode {
            if m < 2 || num_integer::gcd(m, field.p() as i128) != 1 {
                return Err(Error::Hypothesis(format!("modulus {m} not coprime to p = {}", field.p())));
            }
        }
        Ok(Ctx { field, chi, mode })
    }
    pub fn exact(field: Field) -> Self {
        Ctx { field, chi: Character::default(), mode: Mode::Exact }
    }
    pub fn with_mode(&self, mode: Mode) -> Result<Self> {
        Ctx::new(self.field.clone(), self.chi, mode)
    }
    pub fn q(&self) -> u32 {
        self.field.q()
    }
    pub fn p(&self) -> u32 {
        self.field.p()
    }
    pub fn int(&self, n: i128) -> Cyclo {
        Cyclo::from_int(n, self.p(), self.mode)
    }
    pub fn zero(&self) -> Cyclo {
        Cyclo::zero(self.p(), self.mode)
    }
    /// `x q^i`.
    pub fn scale_q(&self, x: &Cyclo, i: i64) -> Cyclo {
        let e = self.field.e() as i64;
        if i >= 0 {
            x.mul_int((self.q() as i128).checked_pow(i as u32).expect("q power overflow"))
        } else {
            x.div_p_pow((-i * e) as u32)
        }
    }
    pub fn q_pow(&self, i: i64) -> Cyclo {
        self.scale_q(&self.int(1), i)
    }
    /// `|m| = q^deg m`.
    pub fn norm(&self, m: &Poly) -> i128 {
        m.norm(self.q())
    }
    /// `eta0(Tr t)` for `t` in `F_q`.
    pub fn eta(&self, t: Fe) -> Cyclo {
        self.chi.on_fq(t, &self.field, self.mode)
    }
    /// `chi(t) = sum_{c != 0} eta0(Tr(c t))`, indexed by `t`.
    pub fn chi_table(&self) -> Vec<Cyclo> {
        let f = &self.field;
        f.elements()
            .map(|t| {
                let mut acc = CycloAcc::new(self.p(), self.mode);
                for c in f.units() {
                    acc.add(&self.eta(f.mul(c, t)));
                }
                acc.finish()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FourierData {
    ctx: Ctx,
    level: Poly,
    depth: i64,
    c0: Cyclo,
    /// `f*(m)` by monic index, for all monic `m` of degree `<= depth`.
    star: Vec<Cyclo>,
    pairing: Cyclo,
    /// Set when `f | T_p = (|p| + 1) f` for every prime `p` not dividing the level.
    eigen: bool,
}

fn star_len(depth: i64, q: u32) -> usize {
    if depth < 0 {
        0
    } else {
        monic_count_upto(depth as usize, q)
    }
}

impl FourierData {
    pub fn new(ctx: Ctx, level: Poly, depth: i64, c0: Cyclo, star: Vec<Cyclo>, pairing: Cyclo) -> Result<Self> {
        if level.is_zero() || !level.is_monic() {
            return Err(Error::InvalidLevel("level must be monic".into()));
        }
        if depth < 0 {
            return Err(Error::InsufficientDepth { needed: 0, available: depth });
        }
        if star.len() != star_len(depth, ctx.q()) {
            return Err(Error::Usage("star table length does not match depth".into()));
        }
        Ok(FourierData { ctx, level, depth, c0, star, pairing, eigen: false })
    }
    pub fn from_fn(
        ctx: Ctx,
        level: Poly,
        depth: i64,
        c0: Cyclo,
        pairing: Cyclo,
        star: impl Fn(&Poly) -> Cyclo,
    ) -> Result<Self> {
        let q = ctx.q();
        let s = (0..star_len(depth, q)).map(|i| star(&Poly::from_monic_index(i, q))).collect();
        Self::new(ctx, level, depth, c0, s, pairing)
    }
    pub fn zero(ctx: Ctx, level: Poly, depth: i64) -> Result<Self> {
        let z = ctx.zero();
        Self::from_fn(ctx, level, depth, z.clone(), z.clone(), |_| z.clone())
    }
    pub fn with_eigen_flag(mut self, eigen: bool) -> Self {
        self.eigen = eigen;
        self
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }
    pub fn field(&self) -> &Field {
        &self.ctx.field
    }
    pub fn level(&self) -> &Poly {
        &self.level
    }
    pub fn depth(&self) -> i64 {
        self.depth
    }
    pub fn c0(&self) -> &Cyclo {
        &self.c0
    }
    pub fn pairing(&self) -> &Cyclo {
        &self.pairing
    }
    pub fn is_eigen(&self) -> bool {
        self.eigen
    }
    pub fn star_table(&self) -> &[Cyclo] {
        &self.star
    }
    /// `f*(m)` for monic `m` within depth.
    pub fn star(&self, m: &Poly) -> Result<Cyclo> {
        if !m.is_monic() {
            return Err(Error::Usage(format!("{} is not monic", m.display(self.field()))));
        }
        let d = m.degree_i64();
        if d > self.depth {
            return Err(Error::InsufficientDepth { needed: d, available: self.depth });
        }
        Ok(self.star[m.monic_index(self.ctx.q())].clone())
    }

    /// `f*(m)` for any monic `m`. Beyond the stored depth this needs the
    /// eigen flag and `m` coprime to the level; the value then follows from
    /// `f*(1)` by the Hecke recursion
    /// `|p| f*(m p) = (|p| + 1) f*(m) - f*(m / p)` and multiplicativity.
    pub fn star_eigen(&self, m: &Poly) -> Result<Cyclo> {
        if m.degree_i64() <= self.depth {
            return self.star(m);
        }
        let f = self.field();
        if !self.eigen || !m.gcd(&self.level, f)?.is_one() {
            return Err(Error::InsufficientDepth { needed: m.degree_i64(), available: self.depth });
        }
        let mut val = self.star(&Poly::one())?;
        for (p, a) in m.factor(f)? {
            let np = self.ctx.norm(&p);
            // c(p^j) with c(1) = 1, c(p) = (|p| + 1) / |p|
            let (mut prev, mut cur) = (self.ctx.zero(), self.ctx.int(1));
            for _ in 0..a {
                let next = cur.mul_int(np + 1).sub(&prev).div_int(np)?;
                prev = cur;
                cur = next;
            }
            val = val.mul(&cur);
        }
        Ok(val)
    }

    /// Value at any edge. Negative edges go through `Gamma_0(n)`.
    pub fn eval(&self, e: &TreeEdge) -> Result<Cyclo> {
        if e.positive {
            self.eval_positive(e)
        } else {
            let (_, ep) = reduce_to_positive(e, &self.level, self.field())?;
            self.eval_positive(&ep)
        }
    }

    /// Negative edges through the pairing constant instead.
    pub fn eval_via_pairing(&self, e: &TreeEdge) -> Result<Cyclo> {
        if e.positive {
            self.eval_positive(e)
        } else {
            Ok(self.pairing.sub(&self.eval_positive(&e.bar())?))
        }
    }

    pub fn eval_positive(&self, e: &TreeEdge) -> Result<Cyclo> {
        assert!(e.positive, "eval_positive on a negative edge");
        let ctx = &self.ctx;
        let k = e.k;
        let mut total = ctx.scale_q(&self.c0, -k);
        if k <= 1 {
            return Ok(total);
        }
        let need = k - 2;
        if need > self.depth {
            return Err(Error::InsufficientDepth { needed: need, available: self.depth });
        }
        let f = &ctx.field;
        let q = ctx.q() as usize;
        let chi = ctx.chi_table();
        // ucoef[j] = coefficient of pi^(1+j)
        let ucoef: Vec<Fe> = (1..k).map(|i| e.u.coeff(i)).collect();
        for d in 0..=need as usize {
            let mut acc: Vec<CycloAcc> = (0..q).map(|_| CycloAcc::new(ctx.p(), ctx.mode)).collect();
            let start = monic_block_start(d, q as u32);
            let mut digits = vec![0 as Fe; d];
            for off in 0..q.pow(d as u32) {
                let s = &self.star[start + off];
                if !s.is_zero() {
                    let mut t = ucoef[d];
                    for j in 0..d {
                        t = f.add(t, f.mul(digits[j], ucoef[j]));
                    }
                    acc[t as usize].add(s);
                }
                for x in digits.iter_mut() {
                    *x += 1;
                    if (*x as usize) < q {
                        break;
                    }
                    *x = 0;
                }
            }
            let mut sd = CycloAcc::new(ctx.p(), ctx.mode);
            for (t, a) in acc.into_iter().enumerate() {
                let a = a.finish();
                if !a.is_zero() {
                    sd.add(&chi[t].mul(&a));
                }
            }
            total = total.add(&ctx.scale_q(&sd.finish(), -(k - 2 - d as i64)));
        }
        Ok(total)
    }

    /// `eval(e_0) + eval(bar e_0)` computed from the coefficients.
    pub fn recompute_pairing(&self) -> Result<Cyclo> {
        let e0 = TreeEdge::half_line(0);
        Ok(self.eval(&e0)?.add(&self.eval(&e0.bar())?))
    }

    fn check_same(&self, o: &FourierData) -> Result<()> {
        if self.ctx != o.ctx {
            return Err(Error::ModeMismatch("cochains over different coefficient setups".into()));
        }
        Ok(())
    }
    fn combine(&self, o: &FourierData, op: impl Fn(&Cyclo, &Cyclo) -> Cyclo) -> Result<FourierData> {
        self.check_same(o)?;
        let f = self.field();
        let g = self.level.gcd(&o.level, f)?;
        let level = self.level.mul(&o.level, f).div_exact(&g, f).expect("lcm");
        let depth = self.depth.min(o.depth);
        let n = star_len(depth, self.ctx.q());
        Ok(FourierData {
            ctx: self.ctx.clone(),
            level,
            depth,
            c0: op(&self.c0, &o.c0),
            star: (0..n).map(|i| op(&self.star[i], &o.star[i])).collect(),
            pairing: op(&self.pairing, &o.pairing),
            eigen: false,
        })
    }
    pub fn add(&self, o: &FourierData) -> Result<FourierData> {
        self.combine(o, |a, b| a.add(b))
    }
    pub fn sub(&self, o: &FourierData) -> Result<FourierData> {
        self.combine(o, |a, b| a.sub(b))
    }
    fn map(&self, g: impl Fn(&Cyclo) -> Result<Cyclo>) -> Result<FourierData> {
        Ok(FourierData {
            ctx: self.ctx.clone(),
            level: self.level.clone(),
            depth: self.depth,
            c0: g(&self.c0)?,
            star: self.star.iter().map(&g).collect::<Result<_>>()?,
            pairing: g(&self.pairing)?,
            eigen: self.eigen,
        })
    }
    pub fn scale(&self, c: &Cyclo) -> FourierData {
        self.map(|x| Ok(x.mul(c))).expect("infallible")
    }
    pub fn mul_int(&self, n: i128) -> FourierData {
        self.map(|x| Ok(x.mul_int(n))).expect("infallible")
    }
    /// Exact division of every coefficient; fails if any quotient is not integral.
    pub fn div_int(&self, n: i128) -> Result<FourierData> {
        self.map(|x| x.div_int(n))
    }
    /// Image of exact data modulo `m`.
    pub fn reduce(&self, m: i128) -> Result<FourierData> {
        let mut out = self.map(|x| x.reduce(m))?;
        out.ctx = self.ctx.with_mode(Mode::Mod(m))?;
        Ok(out)
    }
    pub fn truncate(&self, depth: i64) -> Result<FourierData> {
        if depth > self.depth || depth < 0 {
            return Err(Error::InsufficientDepth { needed: depth, available: self.depth });
        }
        let mut out = self.clone();
        out.depth = depth;
        out.star.truncate(star_len(depth, self.ctx.q()));
        Ok(out)
    }
    pub fn with_level(&self, level: Poly) -> FourierData {
        FourierData { level, ..self.clone() }
    }
    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.pairing.is_zero() && self.star.iter().all(Cyclo::is_zero)
    }
    /// Coefficientwise equality on the common depth (level and flags ignored).
    pub fn agrees_with(&self, o: &FourierData) -> bool {
        let n = star_len(self.depth.min(o.depth), self.ctx.q());
        self.ctx == o.ctx && self.c0 == o.c0 && self.pairing == o.pairing && self.star[..n] == o.star[..n]
    }

    fn check_prime(&self, p: &Poly) -> Result<()> {
        if !p.is_monic() || p.deg().unwrap_or(0) == 0 || !p.is_irreducible(self.field())? {
            return Err(Error::InvalidOperator(format!("{} is not a monic prime", p.display(self.field()))));
        }
        Ok(())
    }

    /// `f | B_m`.
    pub fn apply_b(&self, m: &Poly) -> Result<FourierData> {
        self.apply_b_to(m, self.depth + m.degree_i64())
    }

    /// `f | B_m` stored only to `depth <= depth(f) + deg m`.
    pub fn apply_b_to(&self, m: &Poly, depth: i64) -> Result<FourierData> {
        if m.is_zero() || !m.is_monic() {
            return Err(Error::InvalidOperator("B_m needs monic nonzero m".into()));
        }
        let f = self.field();
        if depth > self.depth + m.degree_i64() || depth < 0 {
            return Err(Error::InsufficientDepth { needed: depth, available: self.depth + m.degree_i64() });
        }
        let q = self.ctx.q();
        let star = (0..star_len(depth, q))
            .map(|i| {
                let r = Poly::from_monic_index(i, q);
                match r.div_exact(m, f) {
                    Some(s) => self.star[s.monic_index(q)].clone(),
                    None => self.ctx.zero(),
                }
            })
            .collect();
        Ok(FourierData {
            ctx: self.ctx.clone(),
            level: self.level.mul(m, f),
            depth,
            c0: self.c0.mul_int(self.ctx.norm(m)),
            star,
            pairing: self.pairing.clone(),
            eigen: false,
        })
    }

    /// Coefficient rule for `U_p` without level bookkeeping.
    fn u_raw(&self, p: &Poly) -> Result<FourierData> {
        let f = self.field();
        let dp = p.degree_i64();
        let depth = self.depth - dp;
        if depth < 0 {
            return Err(Error::InsufficientDepth { needed: dp, available: self.depth });
        }
        let np = self.ctx.norm(p);
        let q = self.ctx.q();
        let star = (0..star_len(depth, q))
            .map(|i| {
                let mp = Poly::from_monic_index(i, q).mul(p, f);
                self.star[mp.monic_index(q)].mul_int(np)
            })
            .collect();
        Ok(FourierData {
            ctx: self.ctx.clone(),
            level: self.level.clone(),
            depth,
            c0: self.c0.clone(),
            star,
            pairing: self.pairing.mul_int(np),
            eigen: false,
        })
    }

    /// `f | U_p` for a prime `p` dividing the level.
    pub fn apply_u(&self, p: &Poly) -> Result<FourierData> {
        self.check_prime(p)?;
        if !p.divides(&self.level, self.field()) {
            return Err(Error::InvalidOperator(format!(
                "U_p needs p | level; {} does not divide {} (use T_p)",
                p.display(self.field()),
                self.level.display(self.field())
            )));
        }
        self.u_raw(p)
    }

    /// `f | T_p = f | U_p + f | B_p` for a prime `p` coprime to the level.
    pub fn apply_t(&self, p: &Poly) -> Result<FourierData> {
        self.check_prime(p)?;
        let f = self.field();
        if p.divides(&self.level, f) {
            return Err(Error::InvalidOperator(format!(
                "T_p needs p coprime to level; {} divides {} (use U_p)",
                p.display(f),
                self.level.display(f)
            )));
        }
        let mut u = self.u_raw(p)?;
        let q = self.ctx.q();
        for i in 0..u.star.len() {
            let m = Poly::from_monic_index(i, q);
            if let Some(mq) = m.div_exact(p, f) {
                u.star[i] = u.star[i].add(&self.star[mq.monic_index(q)]);
            }
        }
        u.c0 = self.c0.mul_int(self.ctx.norm(p) + 1);
        u.pairing = self.pairing.mul_int(self.ctx.norm(p) + 1);
        u.eigen = self.eigen;
        Ok(u)
    }

    /// `f | K_p` with `K_p = 1 - |p|^-1 U_p B_p` (applied as `(f|U_p)|B_p`).
    pub fn apply_k(&self, p: &Poly) -> Result<FourierData> {
        self.check_prime(p)?;
        let f = self.field();
        let q = self.ctx.q();
        let level = if p.divides(&self.level, f) {
            self.level.mul(p, f)
        } else {
            self.level.mul(p, f).mul(p, f)
        };
        let star = (0..self.star.len())
            .map(|i| {
                if p.divides(&Poly::from_monic_index(i, q), f) {
                    self.ctx.zero()
                } else {
                    self.star[i].clone()
                }
            })
            .collect();
        Ok(FourierData {
            ctx: self.ctx.clone(),
            level,
            depth: self.depth,
            c0: self.ctx.zero(),
            star,
            pairing: self.ctx.zero(),
            eigen: false,
        })
    }

    /// `g = f | B_p^-1` for data whose coefficients are supported on multiples
    /// of `p`, at level `n / p`.
    pub fn lower_level(&self, p: &Poly) -> Result<FourierData> {
        self.check_prime(p)?;
        let f = self.field();
        let q = self.ctx.q();
        let Some(level) = self.level.div_exact(p, f) else {
            return Err(Error::InvalidOperator(format!("{} does not divide the level", p.display(f))));
        };
        for i in 0..self.star.len() {
            if !self.star[i].is_zero() && !p.divides(&Poly::from_monic_index(i, q), f) {
                return Err(Error::InvalidOperator("coefficients not supported on multiples of p".into()));
            }
        }
        let dp = p.degree_i64();
        let depth = self.depth - dp;
        if depth < 0 {
            return Err(Error::InsufficientDepth { needed: dp, available: self.depth });
        }
        let star = (0..star_len(depth, q))
            .map(|i| self.star[Poly::from_monic_index(i, q).mul(p, f).monic_index(q)].clone())
            .collect();
        Ok(FourierData {
            ctx: self.ctx.clone(),
            level,
            depth,
            c0: self.c0.div_int(self.ctx.norm(p))?,
            star,
            pairing: self.pairing.clone(),
            eigen: false,
        })
    }

    /// Canonical JSON: star entries sorted by the bytes of the printed `m`.
    pub fn to_json(&self) -> Value {
        let f = self.field();
        let q = self.ctx.q();
        let mut star: Vec<(String, Value)> = self
            .star
            .iter()
            .enumerate()
            .map(|(i, s)| (Poly::from_monic_index(i, q).display(f), scalar_json(s)))
            .collect();
        star.sort_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()));
        json!({
            "level": self.level.display(f),
            "depth": self.depth,
            "c0": scalar_json(&self.c0),
            "pairing": scalar_json(&self.pairing),
            "star": star.into_iter().map(|(m, s)| json!([m, s])).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value, ctx: Ctx) -> Result<FourierData> {
        let bad = |what: &str| Error::Parse(format!("fourier data: {what}"));
        let f = ctx.field.clone();
        let p = ctx.p();
        let level = Poly::parse(v["level"].as_str().ok_or_else(|| bad("level"))?, &f)?;
        let depth = v["depth"].as_i64().ok_or_else(|| bad("depth"))?;
        let sc = |x: &Value| -> Result<Cyclo> {
            let j: CycloJson = serde_json::from_value(x.clone()).map_err(|e| bad(&e.to_string()))?;
            let c = j.to_cyclo(p)?;
            if c.mode() != ctx.mode {
                return Err(Error::ModeMismatch("scalar mode differs from context".into()));
            }
            Ok(c)
        };
        let c0 = sc(&v["c0"])?;
        let pairing = sc(&v["pairing"])?;
        let entries = v["star"].as_array().ok_or_else(|| bad("star"))?;
        let n = star_len(depth, ctx.q());
        let mut star: Vec<Option<Cyclo>> = vec![None; n];
        for e in entries {
            let m = Poly::parse(e[0].as_str().ok_or_else(|| bad("star key"))?, &f)?;
            if !m.is_monic() || m.degree_i64() > depth {
                return Err(bad("star key out of range"));
            }
            let i = m.monic_index(ctx.q());
            if star[i].is_some() {
                return Err(bad("duplicate star key"));
            }
            star[i] = Some(sc(&e[1])?);
        }
        let star = star.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| bad("missing star entries"))?;
        FourierData::new(ctx, level, depth, c0, star, pairing)
    }
}

pub fn scalar_json(c: &Cyclo) -> Value {
    serde_json::to_value(CycloJson::from(c)).expect("serializable")
}

/// Coefficient of `pi^1` in `m u`.
fn pi1_coeff(m: &Poly, u: &LaurentPoly, f: &Field) -> Fe {
    let mut t = 0;
    for (j, &mj) in m.coeffs().iter().enumerate() {
        t = f.add(t, f.mul(mj, u.coeff(1 + j as i64)));
    }
    t
}

/// Tails `sum_{1 <= i < k} a_i pi^i`, all `q^(k-1)` of them.
fn tails(k: i64, f: &Field) -> impl Iterator<Item = LaurentPoly> + '_ {
    let n = (k - 1).max(0) as usize;
    polys_below(n, f).map(|p| LaurentPoly::new(1, p.coeffs().to_vec()))
}

/// `f*(m) = q^(-1-deg m) sum_{u in (pi)/(pi^(2+deg m))} f(2+deg m, u) eta(-m u)`.
pub fn fourier_star(values: &dyn EdgeFn, m: &Poly, ctx: &Ctx) -> Result<Cyclo> {
    if !m.is_monic() {
        return Err(Error::Usage("Fourier coefficient index must be monic".into()));
    }
    let f = &ctx.field;
    let k = m.degree_i64() + 2;
    let mut acc: Vec<CycloAcc> = (0..ctx.q()).map(|_| CycloAcc::new(ctx.p(), ctx.mode)).collect();
    for u in tails(k, f) {
        let t = f.neg(pi1_coeff(m, &u, f));
        acc[t as usize].add(&values.value(&TreeEdge::pos(k, u))?);
    }
    let mut total = CycloAcc::new(ctx.p(), ctx.mode);
    for (t, a) in acc.into_iter().enumerate() {
        total.add(&ctx.eta(t as Fe).mul(&a.finish()));
    }
    Ok(ctx.scale_q(&total.finish(), -(k - 1)))
}

/// `f0(pi^k)`: the average of `f(k, u)` over `u in (pi)/(pi^k)` times `q`,
/// or simply `f(k, 0)` for `k <= 1`.
pub fn fourier_constant(values: &dyn EdgeFn, k: i64, ctx: &Ctx) -> Result<Cyclo> {
    if k <= 1 {
        return values.value(&TreeEdge::pos(k, LaurentPoly::zero()));
    }
    let mut acc = CycloAcc::new(ctx.p(), ctx.mode);
    for u in tails(k, &ctx.field) {
        acc.add(&values.value(&TreeEdge::pos(k, u))?);
    }
    Ok(ctx.scale_q(&acc.finish(), 1 - k))
}

/// All coefficients up to `depth`, sharing edge evaluations per degree.
pub fn fourier_forward_batch(values: &dyn EdgeFn, level: &Poly, depth: i64, ctx: &Ctx) -> Result<FourierData> {
    let f = &ctx.field;
    let q = ctx.q();
    let mut star = Vec::with_capacity(star_len(depth, q));
    for d in 0..=depth.max(-1) {
        let k = d + 2;
        let us: Vec<LaurentPoly> = tails(k, f).collect();
        let vals: Vec<Cyclo> = us.iter().map(|u| values.value(&TreeEdge::pos(k, u.clone()))).collect::<Result<_>>()?;
        for m in monic_polys(d as usize, f) {
            let mut acc: Vec<CycloAcc> = (0..q).map(|_| CycloAcc::new(ctx.p(), ctx.mode)).collect();
            for (u, v) in us.iter().zip(&vals) {
                let t = f.neg(pi1_coeff(&m, u, f));
                acc[t as usize].add(v);
            }
            let mut total = CycloAcc::new(ctx.p(), ctx.mode);
            for (t, a) in acc.into_iter().enumerate() {
                total.add(&ctx.eta(t as Fe).mul(&a.finish()));
            }
            star.push(ctx.scale_q(&total.finish(), -(k - 1)));
        }
    }
    let c0 = fourier_constant(values, 0, ctx)?;
    let e0 = TreeEdge::half_line(0);
    let pairing = values.value(&e0)?.add(&values.value(&e0.bar())?);
    FourierData::new(ctx.clone(), level.clone(), depth, c0, star, pairing)
}

impl EdgeFn for FourierData {
    fn value(&self, e: &TreeEdge) -> Result<Cyclo> {
        self.eval(e)
    }
}

fn diag(a: &Poly, d: &Poly, f: &Field) -> GL2F {
    GL2F::from_polys(a, &Poly::zero(), &Poly::zero(), d, f).expect("nonsingular diagonal")
}

/// `B_p^-1 S_b` for all `deg b < deg p`.
fn u_representatives(p: &Poly, f: &Field) -> Vec<GL2F> {
    let pinv = GL2F::new(
        RatFn::new(Poly::one(), p.clone(), f).expect("p nonzero"),
        RatFn::zero(),
        RatFn::zero(),
        RatFn::one(),
        f,
    )
    .expect("nonsingular");
    polys_below(p.deg().unwrap_or(0), f).map(|b| pinv.mul(&GL2F::translation(&b), f)).collect()
}

/// `e -> f(g e)`, i.e. `f | g`.
pub fn pointwise_act<'a>(values: &'a dyn EdgeFn, g: GL2F, f: &Field) -> impl EdgeFn + 'a {
    let f = f.clone();
    move |e: &TreeEdge| values.value(&act(&g, e, &f)?)
}

/// `f | B_m` from the matrix definition.
pub fn pointwise_b<'a>(values: &'a dyn EdgeFn, m: &Poly, f: &Field) -> impl EdgeFn + 'a {
    pointwise_act(values, diag(m, &Poly::one(), f), f)
}

/// `f | U_p = sum_b f | B_p^-1 S_b` from the matrix definition.
pub fn pointwise_u<'a>(values: &'a dyn EdgeFn, p: &Poly, ctx: &Ctx) -> impl EdgeFn + 'a {
    let reps = u_representatives(p, &ctx.field);
    let ctx = ctx.clone();
    move |e: &TreeEdge| {
        let mut acc = CycloAcc::new(ctx.p(), ctx.mode);
        for g in &reps {
            acc.add(&values.value(&act(g, e, &ctx.field)?)?);
        }
        Ok(acc.finish())
    }
}

/// `f | T_p = f | U_p + f | B_p` from the matrix definitions.
pub fn pointwise_t<'a>(values: &'a dyn EdgeFn, p: &Poly, ctx: &Ctx) -> impl EdgeFn + 'a {
    let u = pointwise_u(values, p, ctx);
    let b = diag(p, &Poly::one(), &ctx.field);
    let f = ctx.field.clone();
    move |e: &TreeEdge| Ok(u.value(e)?.add(&values.value(&act(&b, e, &f)?)?))
}

/// `f | K_p = f - |p|^-1 (f | U_p) | B_p` from the matrix definitions.
pub fn pointwise_k<'a>(values: &'a dyn EdgeFn, p: &Poly, ctx: &Ctx) -> impl EdgeFn + 'a {
    let f = &ctx.field;
    let bp = diag(p, &Poly::one(), f);
    let reps: Vec<GL2F> = u_representatives(p, f).into_iter().map(|g| g.mul(&bp, f)).collect();
    let ctx = ctx.clone();
    let dp = p.degree_i64();
    move |e: &TreeEdge| {
        let mut acc = CycloAcc::new(ctx.p(), ctx.mode);
        for g in &reps {
            acc.add(&values.value(&act(g, e, &ctx.field)?)?);
        }
        Ok(values.value(e)?.sub(&ctx.scale_q(&acc.finish(), -dp)))
    }
}

/// `g = f | B_p^-1`, i.e. `e -> f(B_p^-1 e)`.
pub fn pointwise_lower<'a>(values: &'a dyn EdgeFn, p: &Poly, f: &Field) -> impl EdgeFn + 'a {
    let g = GL2F::new(RatFn::one(), RatFn::zero(), RatFn::zero(), RatFn::from_poly(p.clone()), f).expect("nonsingular");
    pointwise_act(values, g, f)
}

/// An Atkin-Lehner matrix `[[a m, b], [c n, d m]]` with determinant `m`,
/// for `m || n`. Solves `s m + t (n/m) = 1` and returns
/// `[[-(s + j n/m) m, t - j m], [-n, -m]]`; different `j` give different
/// valid matrices.
pub fn w_matrix_shifted(n: &Poly, m: &Poly, j: &Poly, f: &Field) -> Result<GL2F> {
    if !m.is_monic() || !n.is_monic() {
        return Err(Error::InvalidOperator("W_m needs monic m and n".into()));
    }
    let Some(rest) = n.div_exact(m, f) else {
        return Err(Error::InvalidOperator(format!("{} does not divide {}", m.display(f), n.display(f))));
    };
    let (g, s, t) = m.xgcd(&rest, f)?;
    if !g.is_one() {
        return Err(Error::InvalidOperator(format!(
            "{} does not exactly divide {}",
            m.display(f),
            n.display(f)
        )));
    }
    let s = s.add(&j.mul(&rest, f), f);
    let t = t.sub(&j.mul(m, f), f);
    GL2F::from_polys(&s.mul(m, f).neg(f), &t, &n.neg(f), &m.neg(f), f)
}

pub fn w_matrix(n: &Poly, m: &Poly, f: &Field) -> Result<GL2F> {
    w_matrix_shifted(n, m, &Poly::zero(), f)
}

/// `f | W_m` evaluated pointwise.
pub fn apply_w_pointwise<'a>(values: &'a dyn EdgeFn, n: &Poly, m: &Poly, f: &Field) -> Result<impl EdgeFn + 'a> {
    Ok(pointwise_act(values, w_matrix(n, m, f)?, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::random_edge;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pl(s: &str, f: &Field) -> Poly {
        Poly::parse(s, f).unwrap()
    }

    /// Closed form `E(e_i) = q^(i+1)`, `E(bar e_i) = 1 + q - q^(i+1)` on the
    /// half-line, extended by `GL_2(A)`-invariance.
    fn etilde_closed(ctx: &Ctx) -> impl EdgeFn + '_ {
        move |e: &TreeEdge| {
            let r = crate::tree::reduce_gl2a(e, &ctx.field)?;
            let q = ctx.q() as i128;
            let v = q.pow(r.index as u32 + 1);
            Ok(ctx.int(if r.flipped { 1 + q - v } else { v }))
        }
    }

    /// Level-1 data with `c0 = q`, `f*(m) = (1 - q^2) sigma(m) / q^(1 + deg m)`.
    fn etilde_data(ctx: &Ctx, depth: i64) -> FourierData {
        let q = ctx.q() as i128;
        let f = ctx.field.clone();
        FourierData::from_fn(ctx.clone(), Poly::one(), depth, ctx.int(q), ctx.int(q + 1), |m| {
            let s = m.sigma(&f).unwrap();
            ctx.scale_q(&ctx.int((1 - q * q) * s), -1 - m.degree_i64())
        })
        .unwrap()
        .with_eigen_flag(true)
    }

    fn random_data<R: Rng>(rng: &mut R, ctx: &Ctx, level: &Poly, depth: i64) -> FourierData {
        let c0 = ctx.int(rng.gen_range(-5..5));
        let star = (0..star_len(depth, ctx.q()))
            .map(|_| {
                let coords: Vec<i128> = (0..ctx.p() - 1).map(|_| rng.gen_range(-5..5)).collect();
                Cyclo::from_coords(&coords, 0, ctx.p(), ctx.mode)
            })
            .collect();
        FourierData::new(ctx.clone(), level.clone(), depth, c0, star, ctx.zero()).unwrap()
    }

    #[test]
    fn etilde_eval_examples() {
        let c3 = Ctx::exact(Field::prime(3).unwrap());
        let e = etilde_data(&c3, 4);
        assert_eq!(e.eval(&TreeEdge::half_line(1)).unwrap(), c3.int(9));
        assert_eq!(e.eval(&TreeEdge::pos(2, LaurentPoly::zero())).unwrap(), c3.int(-5));
        let c2 = Ctx::exact(Field::prime(2).unwrap());
        let e2 = etilde_data(&c2, 4);
        assert_eq!(e2.eval(&TreeEdge::pos(2, LaurentPoly::zero())).unwrap(), c2.int(-1));
        assert!(matches!(
            e2.eval(&TreeEdge::pos(7, LaurentPoly::zero())),
            Err(Error::InsufficientDepth { needed: 5, available: 4 })
        ));
    }

    #[test]
    fn forward_examples_and_roundtrip() {
        let c2 = Ctx::exact(Field::prime(2).unwrap());
        let closed = etilde_closed(&c2);
        assert_eq!(fourier_star(&closed, &Poly::one(), &c2).unwrap(), Cyclo::from_p_fraction(-3, 1, 2, Mode::Exact));
        for q in [2u32, 3, 4, 5] {
            let ctx = Ctx::exact(Field::of_order(q).unwrap());
            let closed = etilde_closed(&ctx);
            assert_eq!(fourier_constant(&closed, 0, &ctx).unwrap(), ctx.int(q as i128));
            assert_eq!(fourier_constant(&closed, 1, &ctx).unwrap(), ctx.int(1));
            let depth = if q <= 3 { 4 } else { 2 };
            let data = etilde_data(&ctx, depth);
            let batch = fourier_forward_batch(&closed, &Poly::one(), depth, &ctx).unwrap();
            assert!(batch.agrees_with(&data), "q={q}");
            let back = fourier_forward_batch(&data, &Poly::one(), depth, &ctx).unwrap();
            assert!(back.agrees_with(&data));
        }
        let zero = |_: &TreeEdge| Ok(Cyclo::zero(2, Mode::Exact));
        assert!(fourier_star(&zero, &pl("T^2+1", &Field::prime(2).unwrap()), &c2).unwrap().is_zero());
    }

    #[test]
    fn random_data_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for q in [2u32, 3, 5] {
            let ctx = Ctx::exact(Field::of_order(q).unwrap());
            let d = random_data(&mut rng, &ctx, &Poly::one(), 3);
            let back = fourier_forward_batch(&d, &Poly::one(), 3, &ctx).unwrap();
            assert_eq!(back.c0, d.c0);
            assert_eq!(back.star, d.star);
        }
    }

    #[test]
    fn etilde_flow_and_pairing() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for q in [2u32, 3] {
            let ctx = Ctx::exact(Field::of_order(q).unwrap());
            let e = etilde_data(&ctx, 6);
            let closed = etilde_closed(&ctx);
            let mut tested = 0;
            while tested < 200 {
                let x = random_edge(&mut rng, &ctx.field, 3);
                let Ok(v) = e.eval(&x) else { continue };
                assert_eq!(v, closed.value(&x).unwrap());
                let Ok(sum) = x.incoming_neighbors(&ctx.field).iter().map(|y| e.eval(y)).collect::<Result<Vec<_>>>() else {
                    continue;
                };
                let s = sum.iter().fold(ctx.zero(), |a, b| a.add(b));
                assert_eq!(s, v);
                assert_eq!(v.add(&e.eval(&x.bar()).unwrap()), ctx.int(q as i128 + 1));
                assert_eq!(e.eval_via_pairing(&x.bar()).unwrap(), e.eval(&x.bar()).unwrap());
                tested += 1;
            }
            assert_eq!(e.recompute_pairing().unwrap(), *e.pairing());
        }
    }

    #[test]
    fn b_operator() {
        let ctx = Ctx::exact(Field::prime(3).unwrap());
        let e = etilde_data(&ctx, 3);
        let t = Poly::t();
        let eb = e.apply_b(&t).unwrap();
        assert_eq!(eb.star(&t).unwrap(), Cyclo::from_p_fraction(-8, 1, 3, Mode::Exact));
        assert!(eb.star(&Poly::one()).unwrap().is_zero());
        assert_eq!(*eb.c0(), ctx.int(9));
        assert_eq!(eb.level(), &t);
        assert_eq!(e.apply_b(&Poly::one()).unwrap(), e.clone().with_eigen_flag(false));
        let m2 = pl("T+1", &ctx.field);
        let lhs = e.apply_b(&t).unwrap().apply_b(&m2).unwrap();
        let rhs = e.apply_b(&t.mul(&m2, &ctx.field)).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(eb.recompute_pairing().unwrap(), *eb.pairing());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pw = pointwise_b(&e, &t, &ctx.field);
        let mut tested = 0;
        while tested < 100 {
            let x = random_edge(&mut rng, &ctx.field, 3);
            let (Ok(a), Ok(b)) = (eb.eval(&x), pw.value(&x)) else { continue };
            assert_eq!(a, b);
            tested += 1;
        }
    }

    #[test]
    fn u_t_k_operators() {
        let ctx = Ctx::exact(Field::prime(3).unwrap());
        let f = &ctx.field;
        let t = Poly::t();
        let e = etilde_data(&ctx, 5);
        let ebu = e.apply_b(&t).unwrap().apply_u(&t).unwrap();
        assert!(ebu.agrees_with(&e.mul_int(3)));
        assert!(e.apply_u(&t).is_err());
        let et = e.apply_t(&t).unwrap();
        assert!(et.agrees_with(&e.mul_int(4)));
        assert!(e.apply_b(&t).unwrap().apply_t(&t).is_err());
        let ek = e.apply_k(&t).unwrap();
        assert_eq!(ek.star(&Poly::one()).unwrap(), e.star(&Poly::one()).unwrap());
        assert!(ek.star(&t).unwrap().is_zero());
        assert_eq!(ek.level(), &t.mul(&t, f));
        let p2 = pl("T+1", f);
        assert_eq!(ek.apply_k(&t).unwrap().star_table(), ek.star_table());
        assert_eq!(e.apply_k(&t).unwrap().apply_k(&p2).unwrap().star_table(), e.apply_k(&p2).unwrap().apply_k(&t).unwrap().star_table());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = random_data(&mut rng, &ctx, &Poly::one(), 5);
        let a = d.apply_t(&t).unwrap().apply_t(&p2).unwrap();
        let b = d.apply_t(&p2).unwrap().apply_t(&t).unwrap();
        assert_eq!(a.star_table(), b.star_table());
        let z = FourierData::zero(ctx.clone(), t.clone(), 3).unwrap();
        assert!(z.apply_u(&t).unwrap().is_zero());
        assert!(z.apply_t(&p2).unwrap().is_zero());
    }

    /// Fourier-level operators against the coset sums, on random edges.
    #[test]
    fn operators_match_pointwise() {
        let ctx = Ctx::exact(Field::prime(3).unwrap());
        let f = &ctx.field;
        let t = Poly::t();
        let p2 = pl("T+1", f);
        let base = etilde_data(&ctx, 7).apply_b(&t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fu = base.apply_u(&t).unwrap();
        let ft = base.apply_t(&p2).unwrap();
        let fk = base.apply_k(&p2).unwrap();
        let pu = pointwise_u(&base, &t, &ctx);
        let pt = pointwise_t(&base, &p2, &ctx);
        let pk = pointwise_k(&base, &p2, &ctx);
        let cases: [(&FourierData, &dyn EdgeFn); 3] = [(&fu, &pu), (&ft, &pt), (&fk, &pk)];
        for (data, pw) in cases {
            let mut tested = 0;
            while tested < 100 {
                let x = random_edge(&mut rng, f, 2);
                let (Ok(a), Ok(b)) = (data.eval(&x), pw.value(&x)) else { continue };
                assert_eq!(a, b, "{}", x.display(f));
                tested += 1;
            }
        }
    }

    #[test]
    fn w_matrices() {
        let f = Field::prime(3).unwrap();
        let n = pl("T^2+T", &f);
        let t = Poly::t();
        let w = w_matrix(&n, &t, &f).unwrap();
        let expect = GL2F::from_polys(&t, &Poly::one(), &n.neg(&f), &t.neg(&f), &f).unwrap();
        assert_eq!(w, expect);
        assert_eq!(w.det(&f).as_poly(), Some(&t));
        let wn = w_matrix(&n, &n, &f).unwrap();
        assert_eq!(wn.det(&f).as_poly(), Some(&n));
        assert!(w_matrix(&n, &Poly::one(), &f).unwrap().in_gamma0(&n, &f));
        assert!(w_matrix(&pl("T^2", &f), &t, &f).is_err());
        assert!(w_matrix(&n, &pl("T+2", &f), &f).is_err());
        let w2 = w_matrix_shifted(&n, &t, &Poly::one(), &f).unwrap();
        assert_ne!(w, w2);
        assert_eq!(w2.det(&f).as_poly(), Some(&t));
    }

    #[test]
    fn w_pointwise_properties() {
        let ctx = Ctx::exact(Field::prime(3).unwrap());
        let f = &ctx.field;
        let t = Poly::t();
        let e = etilde_data(&ctx, 8);
        let eb = e.apply_b(&t).unwrap();
        let w = apply_w_pointwise(&eb, &t, &t, f).unwrap();
        let w_alt = pointwise_act(&eb, w_matrix_shifted(&t, &t, &pl("T+2", f), f).unwrap(), f);
        let ww = apply_w_pointwise(&w, &t, &t, f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut tested = 0;
        while tested < 50 {
            let x = random_edge(&mut rng, f, 2);
            let (Ok(a), Ok(b), Ok(c), Ok(d)) = (w.value(&x), e.eval(&x), w_alt.value(&x), ww.value(&x)) else {
                continue;
            };
            assert_eq!(a, b);
            assert_eq!(a, c);
            assert_eq!(d, eb.eval(&x).unwrap());
            tested += 1;
        }
        let w1 = apply_w_pointwise(&e, &Poly::one(), &Poly::one(), f).unwrap();
        let x = TreeEdge::pos(2, LaurentPoly::monomial(1, 1));
        assert_eq!(w1.value(&x).unwrap(), e.eval(&x).unwrap());
    }

    #[test]
    fn level_lowering() {
        let ctx = Ctx::exact(Field::prime(3).unwrap());
        let f = &ctx.field;
        let t = Poly::t();
        let e = etilde_data(&ctx, 5);
        let eb = e.apply_b(&t).unwrap();
        let g = eb.lower_level(&t).unwrap();
        assert!(g.agrees_with(&e));
        assert_eq!(g.level(), &Poly::one());
        assert!(g.apply_b(&t).unwrap().agrees_with(&eb));
        assert!(e.apply_b(&pl("T+1", f)).unwrap().lower_level(&t).is_err());
        let pw = pointwise_lower(&eb, &t, f);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut tested = 0;
        while tested < 50 {
            let x = random_edge(&mut rng, f, 2);
            let (Ok(a), Ok(b)) = (g.eval(&x), pw.value(&x)) else { continue };
            assert_eq!(a, b);
            tested += 1;
        }
    }

    #[test]
    fn eigen_extension_matches_sigma() {
        let ctx = Ctx::exact(Field::prime(2).unwrap());
        let short = etilde_data(&ctx, 1);
        let long = etilde_data(&ctx, 6);
        for i in 0..long.star_table().len() {
            let m = Poly::from_monic_index(i, 2);
            assert_eq!(short.star_eigen(&m).unwrap(), long.star(&m).unwrap());
        }
        assert!(short.clone().with_eigen_flag(false).star_eigen(&pl("T^3", &ctx.field)).is_err());
    }

    #[test]
    fn json_roundtrip_is_byte_stable() {
        let ctx = Ctx::exact(Field::prime(3).unwrap());
        let e = etilde_data(&ctx, 2).apply_b(&Poly::t()).unwrap();
        let s = serde_json::to_string(&e.to_json()).unwrap();
        let back = FourierData::from_json(&serde_json::from_str(&s).unwrap(), ctx.clone()).unwrap();
        assert_eq!(back, e);
        assert_eq!(serde_json::to_string(&back.to_json()).unwrap(), s);
        let keys: Vec<String> = e.to_json()["star"].as_array().unwrap().iter().map(|x| x[0].as_str().unwrap().to_string()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        let modded = e.reduce(16).unwrap();
        let s2 = serde_json::to_string(&modded.to_json()).unwrap();
        let back2 = FourierData::from_json(&serde_json::from_str(&s2).unwrap(), ctx.with_mode(Mode::Mod(16)).unwrap()).unwrap();
        assert_eq!(back2, modded);
    }
}
