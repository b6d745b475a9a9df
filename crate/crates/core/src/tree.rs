//! Edges of the Bruhat-Tits tree of `PGL_2(F_inf)`, `F_inf = F_q((pi))`,
//! `pi = 1/T`.
//!
//! Edges are cosets `g Z I` with `I` the Iwahori group. A positive edge
//! `(k, u, +)` is the coset of `[[pi^k, u], [0, 1]]` with `u` taken modulo
//! `pi^k O`; it runs from the vertex `[[pi^k, u], [0, 1]]` to the vertex
//! `[[pi^(k-1), u], [0, 1]]`. The negative edge `(k, u, -)` is its reverse,
//! the coset of `[[pi^k, u], [0, 1]] w` with `w = [[0, 1], [pi, 0]]`.
//!
//! A matrix `[[a, b], [c, d]]` represents a positive edge iff
//! `ord(c) > ord(d)`: right multiplication by `Z I` scales both entries of the
//! bottom row by a common valuation and adds to `d` a multiple of `c` of
//! no smaller valuation (or to `c` a multiple of `d` of strictly larger
//! valuation), so the strict inequality is preserved.
//!
//! Half-line: `e_i = (-i, 0, +)` runs from `v_i = [[pi^-i, 0], [0, 1]]` to
//! `v_(i+1)`; for `k >= 1` the edge `(k, 0, +)` is `GL_2(A)`-equivalent to
//! `bar(e_(k-1))`.

use std::fmt;

use crate::arith::poly::{monic_polys, polys_below};
use crate::arith::{Field, LaurentPoly, Poly, RatFn};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeEdge {
    pub k: i64,
    /// Tail with all exponents below `k`.
    pub u: LaurentPoly,
    pub positive: bool,
}

impl TreeEdge {
    /// Builds an edge, truncating `u` modulo `pi^k`.
    pub fn new(k: i64, u: LaurentPoly, positive: bool) -> Self {
        TreeEdge { k, u: u.truncate_below(k), positive }
    }
    pub fn pos(k: i64, u: LaurentPoly) -> Self {
        Self::new(k, u, true)
    }
    /// The half-line edge `e_i`.
    pub fn half_line(i: u64) -> Self {
        Self::pos(-(i as i64), LaurentPoly::zero())
    }
    /// `e_i` or `bar(e_i)`.
    pub fn half_line_oriented(i: u64, flipped: bool) -> Self {
        let e = Self::half_line(i);
        if flipped {
            e.bar()
        } else {
            e
        }
    }
    pub fn bar(&self) -> Self {
        TreeEdge { k: self.k, u: self.u.clone(), positive: !self.positive }
    }

    /// A matrix representative of the coset.
    pub fn matrix(&self, f: &Field) -> GL2F {
        let m = GL2F::new_unchecked(RatFn::pi_pow(self.k), self.u.to_ratfn(f), RatFn::zero(), RatFn::one());
        if self.positive {
            m
        } else {
            m.mul(&GL2F::flip(), f)
        }
    }

    /// The `q` edges `e'` with `t(e') = o(e)` and `e' != bar(e)`.
    pub fn incoming_neighbors(&self, f: &Field) -> Vec<TreeEdge> {
        let k = self.k;
        if self.positive {
            f.elements()
                .map(|a| TreeEdge::pos(k + 1, self.u.add(&LaurentPoly::monomial(a, k), f)))
                .collect()
        } else {
            let mut out: Vec<TreeEdge> = f
                .units()
                .map(|c| TreeEdge::pos(k, self.u.add(&LaurentPoly::monomial(c, k - 1), f)))
                .collect();
            out.push(TreeEdge::new(k - 1, self.u.clone(), false));
            out
        }
    }

    /// Text form `(k; u; +)` or `(k; u; -)`.
    pub fn display(&self, f: &Field) -> String {
        format!("({}; {}; {})", self.k, self.u.display(f), if self.positive { '+' } else { '-' })
    }

    /// Parses the text form. The tail must already be reduced modulo `pi^k`.
    pub fn parse(text: &str, f: &Field) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed edge `{text}`, expected `(k; u; +/-)`"));
        let inner = text.trim().strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
        let parts: Vec<&str> = inner.split(';').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let k: i64 = parts[0].parse().map_err(|_| bad())?;
        let u = LaurentPoly::parse(parts[1], f)?;
        let positive = match parts[2] {
            "+" => true,
            "-" => false,
            _ => return Err(bad()),
        };
        if u.top().is_some_and(|t| t >= k) {
            return Err(Error::Parse(format!("tail of `{text}` has terms of exponent >= k")));
        }
        Ok(TreeEdge { k, u, positive })
    }
}

/// An invertible 2x2 matrix over `F = F_q(T)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GL2F {
    pub a: RatFn,
    pub b: RatFn,
    pub c: RatFn,
    pub d: RatFn,
}

impl GL2F {
    pub fn new(a: RatFn, b: RatFn, c: RatFn, d: RatFn, f: &Field) -> Result<Self> {
        let m = Self::new_unchecked(a, b, c, d);
        if m.det(f).is_zero() {
            return Err(Error::Singular);
        }
        Ok(m)
    }
    fn new_unchecked(a: RatFn, b: RatFn, c: RatFn, d: RatFn) -> Self {
        GL2F { a, b, c, d }
    }
    pub fn from_polys(a: &Poly, b: &Poly, c: &Poly, d: &Poly, f: &Field) -> Result<Self> {
        Self::new(
            RatFn::from_poly(a.clone()),
            RatFn::from_poly(b.clone()),
            RatFn::from_poly(c.clone()),
            RatFn::from_poly(d.clone()),
            f,
        )
    }
    pub fn identity() -> Self {
        Self::new_unchecked(RatFn::one(), RatFn::zero(), RatFn::zero(), RatFn::one())
    }
    /// `w = [[0, 1], [pi, 0]]`, which reverses the standard edge.
    pub fn flip() -> Self {
        Self::new_unchecked(RatFn::zero(), RatFn::one(), RatFn::pi_pow(1), RatFn::zero())
    }
    /// `[[0, 1], [1, 0]]`.
    pub fn swap() -> Self {
        Self::new_unchecked(RatFn::zero(), RatFn::one(), RatFn::one(), RatFn::zero())
    }
    /// `S_b = [[1, b], [0, 1]]`.
    pub fn translation(b: &Poly) -> Self {
        Self::new_unchecked(RatFn::one(), RatFn::from_poly(b.clone()), RatFn::zero(), RatFn::one())
    }
    pub fn scalar(z: &RatFn) -> Result<Self> {
        if z.is_zero() {
            return Err(Error::Singular);
        }
        Ok(Self::new_unchecked(z.clone(), RatFn::zero(), RatFn::zero(), z.clone()))
    }

    pub fn det(&self, f: &Field) -> RatFn {
        self.a.mul(&self.d, f).sub(&self.b.mul(&self.c, f), f)
    }
    pub fn mul(&self, o: &GL2F, f: &Field) -> GL2F {
        let e = |x: &RatFn, y: &RatFn, z: &RatFn, w: &RatFn| x.mul(y, f).add(&z.mul(w, f), f);
        Self::new_unchecked(
            e(&self.a, &o.a, &self.b, &o.c),
            e(&self.a, &o.b, &self.b, &o.d),
            e(&self.c, &o.a, &self.d, &o.c),
            e(&self.c, &o.b, &self.d, &o.d),
        )
    }
    pub fn inverse(&self, f: &Field) -> Result<GL2F> {
        let di = self.det(f).inv(f).map_err(|_| Error::Singular)?;
        Ok(Self::new_unchecked(
            self.d.mul(&di, f),
            self.b.neg(f).mul(&di, f),
            self.c.neg(f).mul(&di, f),
            self.a.mul(&di, f),
        ))
    }
    /// Entries in `A` and determinant in `F_q^x`.
    pub fn in_gl2a(&self, f: &Field) -> bool {
        [&self.a, &self.b, &self.c, &self.d].iter().all(|x| x.is_poly())
            && self.det(f).as_poly().is_some_and(|p| p.deg() == Some(0))
    }
    /// Membership in `Gamma_0(n)`.
    pub fn in_gamma0(&self, n: &Poly, f: &Field) -> bool {
        self.in_gl2a(f) && self.c.as_poly().is_some_and(|c| n.divides(c, f))
    }

    pub fn display(&self, f: &Field) -> String {
        format!(
            "[[{}, {}], [{}, {}]]",
            self.a.display(f),
            self.b.display(f),
            self.c.display(f),
            self.d.display(f)
        )
    }
}

impl fmt::Display for TreeEdge {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "({}; {:?}; {})", self.k, self.u, if self.positive { '+' } else { '-' })
    }
}

fn ord_lt(x: &RatFn, y: &RatFn) -> bool {
    // ord(x) < ord(y) with ord(0) = infinity
    match (x.ord(), y.ord()) {
        (_, None) => x.ord().is_some(),
        (None, Some(_)) => false,
        (Some(a), Some(b)) => a < b,
    }
}

/// The edge `g Z I`.
pub fn normal_form(g: &GL2F, f: &Field) -> Result<TreeEdge> {
    let det = g.det(f);
    let Some(vdet) = det.ord() else { return Err(Error::Singular) };
    if ord_lt(&g.d, &g.c) {
        let k = vdet - 2 * g.d.ord().expect("d nonzero");
        let u = g.b.div(&g.d, f)?.laurent_below(k, f);
        Ok(TreeEdge { k, u, positive: true })
    } else {
        // g w^-1 = [[b, a/pi], [d, c/pi]] is positive
        let h = GL2F::new_unchecked(
            g.b.clone(),
            g.a.mul(&RatFn::pi_pow(-1), f),
            g.d.clone(),
            g.c.mul(&RatFn::pi_pow(-1), f),
        );
        Ok(normal_form(&h, f)?.bar())
    }
}

pub fn act(g: &GL2F, e: &TreeEdge, f: &Field) -> Result<TreeEdge> {
    if g.det(f).is_zero() {
        return Err(Error::Singular);
    }
    normal_form(&g.mul(&e.matrix(f), f), f)
}

/// Result of reducing an edge to the half-line `GL_2(A)\T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfLineReduction {
    pub index: u64,
    pub flipped: bool,
    pub gamma: GL2F,
}

const REDUCE_STEP_CAP: usize = 10_000;

/// Finds `gamma` in `GL_2(A)` moving `e` onto `e_index` (or its reverse when
/// `flipped`). Each flip lowers `k` by at least 2, so the loop ends.
pub fn reduce_gl2a(e: &TreeEdge, f: &Field) -> Result<HalfLineReduction> {
    let mut k = e.k;
    let mut u = e.u.clone();
    let mut gamma = GL2F::identity();
    for _ in 0..REDUCE_STEP_CAP {
        let b = u.poly_part();
        if !b.is_zero() {
            gamma = GL2F::translation(&b.neg(f)).mul(&gamma, f);
            u = u.frac_part();
        }
        if k <= 0 {
            debug_assert!(u.is_zero());
            return Ok(HalfLineReduction { index: (-k) as u64, flipped: !e.positive, gamma });
        }
        gamma = GL2F::swap().mul(&gamma, f);
        if u.is_zero() {
            return Ok(HalfLineReduction { index: (k - 1) as u64, flipped: e.positive, gamma });
        }
        let j = u.ord().expect("nonzero tail");
        let kk = k - 2 * j;
        u = u.to_ratfn(f).inv(f)?.laurent_below(kk, f);
        k = kk;
    }
    Err(Error::SearchCap(format!("half-line reduction exceeded {REDUCE_STEP_CAP} steps")))
}

/// Degree cap on the auxiliary multiplier in [`reduce_to_positive`].
const POSITIVIZE_DEG_CAP: usize = 24;
/// Cap on the number of `d` candidates tried per multiplier.
const POSITIVIZE_D_CAP: usize = 1 << 12;

/// Finds `gamma` in `Gamma_0(n)` with `gamma e` positive.
///
/// For `e = (r, u, -)` and `gamma = [[a, b], [c, d]]` the image is positive
/// iff `ord(c u + d) >= r - deg c`. We take `c = c1 n` and `d` adjusting the
/// polynomial part of `c u`, then complete the row with `xgcd`.
pub fn reduce_to_positive(e: &TreeEdge, n: &Poly, f: &Field) -> Result<(GL2F, TreeEdge)> {
    if e.positive {
        return Ok((GL2F::identity(), e.clone()));
    }
    if n.is_zero() {
        return Err(Error::InvalidLevel("level must be nonzero".into()));
    }
    let n = n.monic(f);
    let r = e.k;
    for dc1 in 0..=POSITIVIZE_DEG_CAP {
        for c1 in monic_polys(dc1, f) {
            let c = c1.mul(&n, f);
            let s = r - c.degree_i64();
            let cu = e.u.mul_poly(&c, f);
            let base = cu.poly_part().neg(f);
            let found = if s >= 1 {
                let frac_ok = cu.frac_part().ord().map_or(true, |o| o >= s);
                if frac_ok && c.gcd(&base, f)?.is_one() {
                    Some(base)
                } else {
                    None
                }
            } else {
                polys_below((1 - s) as usize, f)
                    .take(POSITIVIZE_D_CAP)
                    .map(|delta| base.add(&delta, f))
                    .find(|d| c.gcd(d, f).map(|g| g.is_one()).unwrap_or(false))
            };
            if let Some(d) = found {
                let (g, x, y) = d.xgcd(&c, f)?;
                debug_assert!(g.is_one());
                // x d + y c = 1, so [[x, -y], [c, d]] has determinant 1
                let gamma = GL2F::from_polys(&x, &y.neg(f), &c, &d, f)?;
                let image = act(&gamma, e, f)?;
                debug_assert!(image.positive);
                return Ok((gamma, image));
            }
        }
    }
    Err(Error::SearchCap(format!("no Gamma_0 element found for {}", e.display(f))))
}
