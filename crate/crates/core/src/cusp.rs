//! Cusps of `Gamma_0(n)` for square-free `n`, the Atkin-Lehner action on
//! them, the lattice spanned by differences of `div(Delta_d)`, and the group
//! `Div^0 / P_known` with the orders of `D^eps`.
//!
//! Cusp `[m]` is stored at the bitmask of `m` in the level's prime order.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::field::is_prime;
use crate::arith::poly::polys_below;
use crate::arith::{Field, Poly};
use crate::eisenstein::EpsVector;
use crate::error::{Error, Result};
use crate::level::Level;
use crate::snf::{self, Matrix};

/// Integer vector indexed by cusps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CuspVector(pub Vec<i128>);

impl CuspVector {
    pub fn degree(&self) -> i128 {
        self.0.iter().sum()
    }
    pub fn add(&self, o: &CuspVector) -> CuspVector {
        CuspVector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
    pub fn scale(&self, c: i128) -> CuspVector {
        CuspVector(self.0.iter().map(|a| a * c).collect())
    }
    pub fn sub(&self, o: &CuspVector) -> CuspVector {
        self.add(&o.scale(-1))
    }
    /// Image under `W_d` for the divisor with bitmask `d`.
    pub fn apply_w(&self, d: u32) -> CuspVector {
        let mut out = vec![0; self.0.len()];
        for (m, &x) in self.0.iter().enumerate() {
            out[m ^ d as usize] = x;
        }
        CuspVector(out)
    }
}

/// `W_d [m] = [m d / (m, d)^2]` computed on polynomials.
pub fn cusp_w_action(level: &Level, d: &Poly, m: &Poly, f: &Field) -> Result<Poly> {
    let n = level.n();
    let cof = if d.is_monic() { n.div_exact(d, f) } else { None };
    if !cof.map_or(Ok(false), |c| d.gcd(&c, f).map(|g| g.is_one()))? {
        return Err(Error::InvalidOperator(format!("{} does not exactly divide {}", d.display(f), n.display(f))));
    }
    if !m.is_monic() || !m.divides(n, f) {
        return Err(Error::InvalidOperator(format!("{} does not divide {}", m.display(f), n.display(f))));
    }
    let g = m.gcd(d, f)?;
    Ok(m.mul(d, f).div_exact(&g.mul(&g, f), f).expect("square of gcd divides"))
}

/// Divisors of `n` in cusp order.
pub fn cusp_labels(level: &Level, f: &Field) -> Vec<Poly> {
    (0..level.num_divisors() as u32).map(|m| level.divisor(m, f)).collect()
}

/// The cusp of `(a : b)`: the class of `(1, gcd(b, n))`.
pub fn cusp_classify(a: &Poly, b: &Poly, level: &Level, f: &Field) -> Result<Poly> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::ZeroInput("the pair (0, 0)".into()));
    }
    if !a.gcd(b, f)?.is_one() {
        return Err(Error::NotCoprime(format!("({}, {})", a.display(f), b.display(f))));
    }
    b.gcd(level.n(), f)
}

fn normalize_pair(a: &Poly, b: &Poly, f: &Field) -> (Poly, Poly) {
    let lead = if b.is_zero() { a.lead() } else { b.lead() };
    let inv = f.inv(lead);
    (a.scale(inv, f), b.scale(inv, f))
}

/// Orbit search: breadth-first over the images of `(1, m)` under
/// translations `[[1, b], [0, 1]]` (`deg b <= 1`), lower unipotents
/// `[[1, 0], [n c, 1]]` (`deg c <= 1`) and `diag(alpha, 1)`, keeping only
/// pairs of degree at most `max(deg a, deg b, deg n) + 1`. The bound keeps the
/// search finite; every pair reachable within it is a genuine orbit member,
/// and failure to reach the target is reported as [`Error::SearchCap`].
pub fn orbit_contains(m: &Poly, a: &Poly, b: &Poly, level: &Level, f: &Field, cap: usize) -> Result<bool> {
    let target = normalize_pair(a, b, f);
    let bound = a.degree_i64().max(b.degree_i64()).max(level.n().degree_i64()) + 1;
    let shifts: Vec<Poly> = polys_below(2, f).collect();
    let lowers: Vec<Poly> = shifts.iter().map(|c| c.mul(level.n(), f)).collect();
    let units: Vec<u16> = (1..f.q() as u16).collect();
    let start = normalize_pair(&Poly::one(), m, f);
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some((x, y)) = queue.pop_front() {
        if (x.clone(), y.clone()) == target {
            return Ok(true);
        }
        let mut next = Vec::new();
        for s in &shifts {
            next.push((x.add(&s.mul(&y, f), f), y.clone()));
        }
        for c in &lowers {
            next.push((x.clone(), y.add(&c.mul(&x, f), f)));
        }
        for &u in &units {
            next.push((x.scale(u, f), y.clone()));
        }
        for (nx, ny) in next {
            if nx.degree_i64() > bound || ny.degree_i64() > bound {
                continue;
            }
            let p = normalize_pair(&nx, &ny, f);
            if seen.insert(p.clone()) {
                if seen.len() > cap {
                    return Err(Error::SearchCap(format!("orbit search exceeded {cap} pairs")));
                }
                queue.push_back(p);
            }
        }
    }
    Ok(false)
}

/// [`cusp_classify`] certified by [`orbit_contains`]; failure to reach the
/// pair is a hard error.
pub fn cusp_classify_checked(a: &Poly, b: &Poly, level: &Level, f: &Field) -> Result<Poly> {
    let m = cusp_classify(a, b, level, f)?;
    if !orbit_contains(&m, a, b, level, f, 2_000_000)? {
        return Err(Error::SearchCap(format!(
            "({}, {}) not reached from (1, {})",
            a.display(f),
            b.display(f),
            m.display(f)
        )));
    }
    Ok(m)
}

/// `div(Delta_d)`: entry `|n| |(m, d)|^2 / (|m| |d|)` at `[m]`.
pub fn div_delta(level: &Level, d: u32, q: u32) -> CuspVector {
    let nn = level.divisor_norm(level.full_mask(), q);
    let nd = level.divisor_norm(d, q);
    CuspVector(
        (0..level.num_divisors() as u32)
            .map(|m| {
                let g = level.divisor_norm(m & d, q);
                nn * g * g / (level.divisor_norm(m, q) * nd)
            })
            .collect(),
    )
}

/// `D^eps = sum_d eps_d [d]`.
pub fn d_eps(level: &Level, eps: &EpsVector) -> CuspVector {
    CuspVector((0..level.num_divisors() as u32).map(|m| eps.eps_d(m)).collect())
}

/// `div(Delta^eps) = sum_d eps_d div(Delta_d)`.
pub fn div_delta_eps(level: &Level, eps: &EpsVector, q: u32) -> CuspVector {
    (0..level.num_divisors() as u32).fold(CuspVector(vec![0; level.num_divisors()]), |acc, d| {
        acc.add(&div_delta(level, d, q).scale(eps.eps_d(d)))
    })
}

/// `div(Delta / Delta_(p_i))` from the expansion
/// `(|p| - 1) sum_{m | n'} (|n'| / |m|) ([m] - [m p])`, `n' = n / p_i`.
pub fn div_delta_ratio_expansion(level: &Level, i: usize, q: u32) -> CuspVector {
    let bit = 1u32 << i;
    let np = level.primes()[i].norm(q);
    let rest = level.full_mask() & !bit;
    let nrest = level.divisor_norm(rest, q);
    let mut out = vec![0; level.num_divisors()];
    for m in 0..level.num_divisors() as u32 {
        if m & bit == 0 {
            let c = (np - 1) * nrest / level.divisor_norm(m, q);
            out[m as usize] += c;
            out[(m | bit) as usize] -= c;
        }
    }
    CuspVector(out)
}

/// Pairwise differences `div(Delta_d) - div(Delta_d')`; the span is generated
/// by the `d' = 1` differences, which are what is stored.
#[derive(Clone, Debug)]
pub struct RelationLattice {
    pub level: Level,
    pub q: u32,
    pub generators: Vec<CuspVector>,
}

impl RelationLattice {
    pub fn new(level: &Level, q: u32) -> Result<Self> {
        let base = div_delta(level, 0, q);
        let generators: Vec<CuspVector> =
            (1..level.num_divisors() as u32).map(|d| div_delta(level, d, q).sub(&base)).collect();
        if let Some(g) = generators.iter().find(|g| g.degree() != 0) {
            return Err(Error::Hypothesis(format!("generator {:?} has nonzero degree", g.0)));
        }
        Ok(RelationLattice { level: level.clone(), q, generators })
    }
    /// Generators in `Div^0` coordinates (`[m] - [1]`, `m != 1`), one per row.
    fn matrix(&self) -> Matrix {
        self.generators.iter().map(|g| g.0[1..].iter().map(|&x| BigInt::from(x)).collect()).collect()
    }
    fn snf(&self) -> snf::Snf {
        snf::smith_normal_form(&self.matrix())
    }
    /// Coordinates of a degree-zero vector after the column transform `V`.
    fn coords(&self, v: &CuspVector, s: &snf::Snf) -> Result<Vec<BigInt>> {
        if v.degree() != 0 {
            return Err(Error::Hypothesis("vector is not of degree zero".into()));
        }
        let row: Matrix = vec![v.0[1..].iter().map(|&x| BigInt::from(x)).collect()];
        Ok(snf::mat_mul(&row, &s.v).remove(0))
    }
    /// Order of the image of `v` in `Div^0 / lattice`; `None` if infinite.
    pub fn order_of(&self, v: &CuspVector) -> Result<Option<BigInt>> {
        let s = self.snf();
        let c = self.coords(v, &s)?;
        let diag = {
            let mut d = s.diagonal();
            d.resize(c.len(), BigInt::zero());
            d
        };
        let mut ord = BigInt::one();
        for (x, d) in c.iter().zip(&diag) {
            if d.is_zero() {
                if !x.is_zero() {
                    return Ok(None);
                }
                continue;
            }
            ord = ord.lcm(&(d / d.gcd(x)));
        }
        Ok(Some(ord))
    }
    pub fn contains(&self, v: &CuspVector) -> Result<bool> {
        Ok(self.order_of(v)? == Some(BigInt::one()))
    }
    /// Elementary divisors of `Div^0 / lattice` other than 1 (0 marks a free
    /// factor).
    pub fn elementary_divisors(&self) -> Vec<BigInt> {
        if self.level.s() == 0 {
            return Vec::new();
        }
        snf::elementary_divisors(&self.matrix(), self.level.num_divisors() - 1)
            .into_iter()
            .filter(|d| !d.is_one())
            .collect()
    }
}

/// `rho(n) = prod (|p_i| - 1)(|p_i| + 1)^(s - 1)`.
pub fn rho(level: &Level, q: u32) -> BigInt {
    let s = level.s() as u32;
    level.primes().iter().fold(BigInt::one(), |acc, p| {
        let np = BigInt::from(p.norm(q));
        acc * (&np - 1) * num_traits::pow(np + 1, s.saturating_sub(1) as usize)
    })
}

/// `pi_p^*([m]) = |p| [m] + [m p]` from level `n / p_i` to level `n`.
pub fn pullback(level: &Level, i: usize, v: &CuspVector, q: u32) -> CuspVector {
    let np = level.primes()[i].norm(q);
    let mut out = vec![0; level.num_divisors()];
    for (m, &x) in v.0.iter().enumerate() {
        let big = Level::insert_bit(m as u32, i) as usize;
        out[big] += np * x;
        out[big | 1 << i] += x;
    }
    CuspVector(out)
}

/// `pi~_p^*([m]) = |p| [m p] + [m]`.
pub fn pullback_tilde(level: &Level, i: usize, v: &CuspVector, q: u32) -> CuspVector {
    let np = level.primes()[i].norm(q);
    let mut out = vec![0; level.num_divisors()];
    for (m, &x) in v.0.iter().enumerate() {
        let big = Level::insert_bit(m as u32, i) as usize;
        out[big | 1 << i] += np * x;
        out[big] += x;
    }
    CuspVector(out)
}

/// Checks that both pullbacks carry each `div(Delta_d)` of level `n / p_i`
/// to `div(Delta_d)` and `div(Delta_(d p_i))` of level `n`, so that the
/// pulled-back relations lie in the lattice.
pub fn pullback_check(level: &Level, q: u32, f: &Field) -> Result<bool> {
    let lat = RelationLattice::new(level, q)?;
    for i in 0..level.s() {
        let low = level.without(i, f);
        let low_lat = RelationLattice::new(&low, q)?;
        for d in 0..low.num_divisors() as u32 {
            let big = Level::insert_bit(d, i);
            if pullback(level, i, &div_delta(&low, d, q), q) != div_delta(level, big, q)
                || pullback_tilde(level, i, &div_delta(&low, d, q), q) != div_delta(level, big | 1 << i, q)
            {
                return Ok(false);
            }
        }
        for g in &low_lat.generators {
            if !lat.contains(&pullback(level, i, g, q))? || !lat.contains(&pullback_tilde(level, i, g, q))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Every elementary divisor divides `rho(n)`, and the pullback identities
/// hold.
pub fn exponent_check(level: &Level, q: u32, f: &Field) -> Result<bool> {
    let r = rho(level, q);
    let lat = RelationLattice::new(level, q)?;
    let divides = lat.elementary_divisors().iter().all(|d| !d.is_zero() && r.is_multiple_of(d));
    Ok(divides && pullback_check(level, q, f)?)
}

/// One `(n, eps)` row of the cusp-group table.
#[derive(Clone, Debug, Serialize)]
pub struct CuspGroupRow {
    pub q: u32,
    pub n: String,
    pub s: usize,
    pub elementary_divisors: String,
    pub eps: String,
    #[serde(rename = "N")]
    pub big_n: i128,
    pub nu: i128,
    /// Empty for `eps = 1`, `inf` if the image has infinite order.
    pub d_eps_order: String,
    pub sandwich_ok: bool,
    pub rho: String,
    pub exponent_ok: bool,
}

/// Sandwich `ord_l(N/nu) <= ord_l(order) <= ord_l(N)` at all primes
/// `l` not dividing `q(q-1)` (only primes dividing `N` or `order` matter).
pub fn sandwich(big_n: i128, nu: i128, order: &BigInt, q: u32) -> bool {
    let qq = q as u64;
    let bn = BigInt::from(big_n);
    let lower = BigInt::from(big_n / nu);
    let mut ells = snf::prime_divisors(&bn);
    ells.extend(snf::prime_divisors(order));
    ells.sort_unstable();
    ells.dedup();
    ells.into_iter().filter(|&l| (qq * (qq - 1)) % l != 0).all(|l| {
        let o = snf::ord_p(order, l);
        snf::ord_p(&lower, l) <= o && o <= snf::ord_p(&bn, l)
    })
}

fn join(xs: &[BigInt]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

/// The quotient `Div^0 / P_known` and, per `eps`, the order of `D^eps` and
/// the sandwich flag.
pub fn cusp_group(level: &Level, f: &Field) -> Result<Vec<CuspGroupRow>> {
    let q = f.q();
    let lat = RelationLattice::new(level, q)?;
    let ed = lat.elementary_divisors();
    let r = rho(level, q);
    let exp_ok = exponent_check(level, q, f)?;
    let mut rows = Vec::new();
    for eps in EpsVector::all(level.s()) {
        let big_n = eps.big_n(level, q)?;
        let nu = eps.nu(level, q)?;
        let (order, ok) = if eps.is_one() {
            (String::new(), true)
        } else {
            match lat.order_of(&d_eps(level, &eps))? {
                Some(o) => (o.to_string(), sandwich(big_n, nu, &o, q)),
                None => ("inf".into(), false),
            }
        };
        rows.push(CuspGroupRow {
            q,
            n: level.n().display(f),
            s: level.s(),
            elementary_divisors: join(&ed),
            eps: eps.to_string(),
            big_n,
            nu,
            d_eps_order: order,
            sandwich_ok: ok,
            rho: r.to_string(),
            exponent_ok: exp_ok,
        });
    }
    Ok(rows)
}

/// `ord_l` of the cusp order in a row, for tests and reports.
pub fn row_order(row: &CuspGroupRow) -> Option<BigInt> {
    row.d_eps_order.parse().ok()
}

/// Primes `l <= bound` not dividing `q(q-1)`.
pub fn admissible_ells(q: u32, bound: u32) -> Vec<u32> {
    (2..=bound).filter(|&l| is_prime(l as u64) && (q * (q - 1)) % l != 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(q: u32, n: &str) -> (Field, Level) {
        let f = Field::of_order(q).unwrap();
        let l = Level::parse(n, &f).unwrap();
        (f, l)
    }

    #[test]
    fn w_action_examples() {
        let (f, l) = setup(3, "T^2+T");
        let t = Poly::t();
        assert_eq!(cusp_w_action(&l, &t, &Poly::one(), &f).unwrap(), t);
        assert_eq!(cusp_w_action(&l, &t, l.n(), &f).unwrap(), Poly::parse("T+1", &f).unwrap());
        for (i, m) in cusp_labels(&l, &f).iter().enumerate() {
            let w = cusp_w_action(&l, l.n(), m, &f).unwrap();
            assert_eq!(w, l.n().div_exact(m, &f).unwrap());
            assert_eq!(l.mask_of(&w, &f).unwrap(), i as u32 ^ l.full_mask());
        }
        assert!(cusp_w_action(&l, &Poly::parse("T+2", &f).unwrap(), &t, &f).is_err());
    }

    #[test]
    fn w_action_group_law_faithful() {
        let f = Field::prime(3).unwrap();
        let n = Poly::parse("T^2+T", &f).unwrap().mul(&Poly::parse("T^2+1", &f).unwrap(), &f);
        let l = Level::new(&n, &f).unwrap();
        let labels = cusp_labels(&l, &f);
        let mut perms = HashSet::new();
        for d in &labels {
            let perm: Vec<Poly> = labels.iter().map(|m| cusp_w_action(&l, d, m, &f).unwrap()).collect();
            for (m, w) in labels.iter().zip(&perm) {
                assert_eq!(&cusp_w_action(&l, d, w, &f).unwrap(), m);
            }
            for e in &labels {
                let de = cusp_w_action(&l, e, d, &f).unwrap();
                for m in &labels {
                    let lhs = cusp_w_action(&l, d, &cusp_w_action(&l, e, m, &f).unwrap(), &f).unwrap();
                    assert_eq!(lhs, cusp_w_action(&l, &de, m, &f).unwrap());
                }
            }
            perms.insert(perm);
        }
        assert_eq!(perms.len(), 8);
    }

    #[test]
    fn classify_golden() {
        let (f, l) = setup(3, "T^2+T");
        let t = Poly::t();
        assert_eq!(cusp_classify_checked(&Poly::one(), &t, &l, &f).unwrap(), t);
        let a = Poly::parse("T+2", &f).unwrap();
        assert_eq!(cusp_classify_checked(&a, &t, &l, &f).unwrap(), t);
        // the point at infinity lies over the cusp [n]
        assert_eq!(cusp_classify_checked(&Poly::one(), &Poly::zero(), &l, &f).unwrap(), *l.n());
        assert_eq!(cusp_classify_checked(&Poly::zero(), &Poly::one(), &l, &f).unwrap(), Poly::one());
        assert!(matches!(cusp_classify(&t, &t, &l, &f), Err(Error::NotCoprime(_))));
        // distinct labels are not joined by the search
        assert!(!orbit_contains(&Poly::one(), &Poly::one(), &t, &l, &f, 100_000).unwrap());
    }

    #[test]
    fn delta_examples() {
        let (_, l) = setup(3, "T^2+T");
        assert_eq!(div_delta(&l, 1, 3), CuspVector(vec![3, 9, 1, 3]));
        let eh = EpsVector::parse("(-1,-1)").unwrap();
        assert_eq!(div_delta_eps(&l, &eh, 3), CuspVector(vec![4, -4, -4, 4]));
        let lat = RelationLattice::new(&l, 3).unwrap();
        assert!(lat.generators.iter().all(|g| g.degree() == 0));
        assert!(lat.contains(&div_delta_eps(&l, &eh, 3)).unwrap());
    }

    #[test]
    fn named_relations_and_w_eigen() {
        for (q, n) in [(2, "T^3+T"), (3, "T^3+T"), (3, "T^2+T"), (4, "T^3+T")] {
            let f = Field::of_order(q).unwrap();
            let Ok(l) = Level::parse(n, &f) else { continue };
            let lat = RelationLattice::new(&l, q).unwrap();
            for eps in EpsVector::all(l.s()) {
                let d = d_eps(&l, &eps);
                let deg: i128 = eps.0.iter().map(|&e| 1 + e as i128).product();
                assert_eq!(d.degree(), deg);
                for i in 0..l.s() {
                    assert_eq!(d.apply_w(1 << i), d.scale(eps.0[i] as i128));
                }
                if !eps.is_one() {
                    let big_n = eps.big_n(&l, q).unwrap();
                    let en = eps.eps_d(l.full_mask());
                    assert_eq!(div_delta_eps(&l, &eps, q), d.scale(en * big_n));
                    assert!(lat.contains(&div_delta_eps(&l, &eps, q)).unwrap());
                }
            }
            for i in 0..l.s() {
                let v = div_delta(&l, 0, q).sub(&div_delta(&l, 1 << i, q));
                assert_eq!(v, div_delta_ratio_expansion(&l, i, q));
                assert!(lat.contains(&v).unwrap());
            }
        }
    }

    #[test]
    fn group_examples() {
        let (f, l) = setup(3, "T^2+T");
        assert_eq!(rho(&l, 3), BigInt::from(64));
        let rows = cusp_group(&l, &f).unwrap();
        let eh = rows.iter().find(|r| r.eps == "(-1,-1)").unwrap();
        assert_eq!(snf::ord_p(&row_order(eh).unwrap(), 2), 2);
        assert!(rows.iter().all(|r| r.sandwich_ok && r.exponent_ok));
        assert_eq!(rows.iter().find(|r| r.eps == "(1,1)").unwrap().d_eps_order, "");
        let (f2, l2) = setup(2, "T");
        assert_eq!(rho(&l2, 2), BigInt::one());
        assert!(RelationLattice::new(&l2, 2).unwrap().elementary_divisors().is_empty());
        assert!(exponent_check(&l2, 2, &f2).unwrap());
        let (f1, l1) = setup(3, "1");
        assert!(exponent_check(&l1, 3, &f1).unwrap());
        assert_eq!(cusp_group(&l1, &f1).unwrap().len(), 1);
    }

    #[test]
    fn prime_level_cyclic() {
        for q in [2u32, 3, 5] {
            let f = Field::of_order(q).unwrap();
            for d in 1..=2 {
                for p in crate::arith::poly::monic_polys(d, &f) {
                    if !p.is_irreducible(&f).unwrap() {
                        continue;
                    }
                    let l = Level::new(&p, &f).unwrap();
                    let ed = RelationLattice::new(&l, q).unwrap().elementary_divisors();
                    assert!(ed.len() <= 1);
                    assert!(exponent_check(&l, q, &f).unwrap());
                }
            }
        }
    }
}
