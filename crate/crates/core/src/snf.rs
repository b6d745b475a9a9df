//! Smith normal form over `Z` with transforms, in arbitrary precision.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn from_i128(rows: &[Vec<i128>]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Determinant by fraction-free elimination.
pub fn det(m: &Matrix) -> BigInt {
    let n = m.len();
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if piv != k {
            a.swap(piv, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        BigInt::one()
    } else {
        sign * &a[n - 1][n - 1]
    }
}

/// `(U, D, V)` with `U M V = D`, `U`, `V` unimodular and the diagonal of `D`
/// nonnegative with `d_1 | d_2 | ...` (zeros last).
pub struct Snf {
    pub u: Matrix,
    pub d: Matrix,
    pub v: Matrix,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.d.len().min(self.d.first().map_or(0, |r| r.len()));
        (0..k).map(|i| self.d[i][i].clone()).collect()
    }
}

fn row_axpy(a: &mut Matrix, dst: usize, src: usize, c: &BigInt) {
    if c.is_zero() {
        return;
    }
    let s = a[src].clone();
    for (x, y) in a[dst].iter_mut().zip(&s) {
        *x -= c * y;
    }
}

fn col_axpy(a: &mut Matrix, dst: usize, src: usize, c: &BigInt) {
    if c.is_zero() {
        return;
    }
    for row in a.iter_mut() {
        let y = row[src].clone();
        row[dst] -= c * y;
    }
}

fn col_swap(a: &mut Matrix, i: usize, j: usize) {
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

pub fn smith_normal_form(m: &Matrix) -> Snf {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut a = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the remaining block to the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero() && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            a.swap(t, bi);
            u.swap(t, bi);
            col_swap(&mut a, t, bj);
            col_swap(&mut v, t, bj);
            let mut dirty = false;
            for i in t + 1..rows {
                let c = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &c);
                row_axpy(&mut u, i, t, &c);
                dirty |= !a[i][t].is_zero();
            }
            for j in t + 1..cols {
                let c = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, j, t, &c);
                col_axpy(&mut v, j, t, &c);
                dirty |= !a[t][j].is_zero();
            }
            if dirty {
                continue;
            }
            // pivot must divide the rest of the block
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    let one = -BigInt::one();
                    row_axpy(&mut a, t, i, &one);
                    row_axpy(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    Snf { u, d: a, v }
}

/// Elementary divisors of `Z^cols / rowspace(m)`, including zeros for free
/// directions; units are kept.
pub fn elementary_divisors(m: &Matrix, cols: usize) -> Vec<BigInt> {
    let mut d = smith_normal_form(m).diagonal();
    d.resize(cols, BigInt::zero());
    d
}

/// Exponent of `p` in `x` (`x` nonzero).
pub fn ord_p(x: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut k = 0;
    while !x.is_zero() && x.is_multiple_of(&p) {
        x /= &p;
        k += 1;
    }
    k
}

/// Prime divisors of a nonzero integer by trial division.
pub fn prime_divisors(x: &BigInt) -> Vec<u64> {
    let mut x = x.abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    while !x.is_one() && !x.is_zero() {
        let bp = BigInt::from(p);
        if &bp * &bp > x {
            out.push(u64::try_from(&x).expect("cofactor fits u64"));
            break;
        }
        if x.is_multiple_of(&bp) {
            out.push(p);
            while x.is_multiple_of(&bp) {
                x /= &bp;
            }
        }
        p += 1;
    }
    out
}
