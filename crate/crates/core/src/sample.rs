//! Seeded random edges and Laurent tails.

use rand::Rng;

use crate::arith::{Fe, Field, LaurentPoly};
use crate::tree::TreeEdge;

/// Uniform coefficients on exponents `lo..hi`.
pub fn random_laurent<R: Rng>(rng: &mut R, k: &Field, lo: i64, hi: i64) -> LaurentPoly {
    if hi <= lo {
        return LaurentPoly::zero();
    }
    let q = k.q();
    LaurentPoly::new(lo, (lo..hi).map(|_| rng.gen_range(0..q) as Fe).collect())
}

/// `k` uniform in `[-span, span + 2]`, tail coefficients iid uniform on
/// `pi^-2 .. pi^(k-1)`, random orientation.
pub fn random_edge<R: Rng>(rng: &mut R, k: &Field, span: i64) -> TreeEdge {
    let kk = rng.gen_range(-span..=span + 2);
    let u = random_laurent(rng, k, -2, kk);
    TreeEdge::new(kk, u, rng.gen_bool(0.5))
}

/// Like [`random_edge`] but always negatively oriented.
pub fn random_negative_edge<R: Rng>(rng: &mut R, k: &Field, span: i64) -> TreeEdge {
    let e = random_edge(rng, k, span);
    TreeEdge::new(e.k, e.u, false)
}
