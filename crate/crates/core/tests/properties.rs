//! Randomized invariants across modules.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treecochain::arith::{Cyclo, Field, Mode, Poly};
use treecochain::cusp::CuspVector;
use treecochain::eisenstein::{etilde_closed, EisCombo};
use treecochain::level::Level;
use treecochain::sample::random_edge;
use treecochain::snf;
use treecochain::tree::{act, reduce_gl2a, TreeEdge, GL2F};

const QS: [u32; 4] = [2, 3, 4, 5];

fn random_poly(rng: &mut ChaCha8Rng, f: &Field, max_deg: usize) -> Poly {
    let d = rng.gen_range(0..=max_deg);
    Poly::from_coeffs((0..=d).map(|_| rng.gen_range(0..f.q()) as u16).collect())
}

/// Random element of `GL_2(A)` as a product of translations, swaps and
/// diagonal units.
fn random_gl2a(rng: &mut ChaCha8Rng, f: &Field) -> GL2F {
    let mut g = GL2F::identity();
    for _ in 0..rng.gen_range(1..5) {
        let step = match rng.gen_range(0..3) {
            0 => GL2F::translation(&random_poly(rng, f, 2)),
            1 => GL2F::swap(),
            _ => {
                let a = rng.gen_range(1..f.q()) as u16;
                GL2F::from_polys(&Poly::constant(a), &Poly::zero(), &Poly::zero(), &Poly::one(), f).unwrap()
            }
        };
        g = g.mul(&step, f);
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn xgcd_bezout(seed in any::<u64>(), qi in 0usize..4) {
        let f = Field::of_order(QS[qi]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_poly(&mut rng, &f, 6);
        let b = random_poly(&mut rng, &f, 6);
        prop_assume!(!(a.is_zero() && b.is_zero()));
        let (g, x, y) = a.xgcd(&b, &f).unwrap();
        prop_assert!(g.is_monic());
        prop_assert_eq!(x.mul(&a, &f).add(&y.mul(&b, &f), &f), g.clone());
        prop_assert!(g.divides(&a, &f) && g.divides(&b, &f));
    }

    #[test]
    fn monic_index_roundtrip(idx in 0usize..5000, qi in 0usize..4) {
        let q = QS[qi];
        let p = Poly::from_monic_index(idx, q);
        prop_assert!(p.is_monic());
        prop_assert_eq!(p.monic_index(q), idx);
    }

    #[test]
    fn cyclo_ring_and_reduction(seed in any::<u64>(), pi in 0usize..3) {
        let p = [3u32, 5, 7][pi];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rand_c = |rng: &mut ChaCha8Rng| {
            let coords: Vec<i128> = (0..p - 1).map(|_| rng.gen_range(-50..50)).collect();
            Cyclo::from_coords(&coords, rng.gen_range(0..3), p, Mode::Exact)
        };
        let (a, b, c) = (rand_c(&mut rng), rand_c(&mut rng), rand_c(&mut rng));
        prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(Cyclo::zeta_pow(1, p, Mode::Exact).pow(p), Cyclo::from_int(1, p, Mode::Exact));
        let m = 2 * 2 * 11;
        let lhs = a.mul(&b).reduce(m).unwrap();
        let rhs = a.reduce(m).unwrap().mul(&b.reduce(m).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn action_composes(seed in any::<u64>(), qi in 0usize..4) {
        let f = Field::of_order(QS[qi]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_edge(&mut rng, &f, 4);
        let g1 = random_gl2a(&mut rng, &f);
        let g2 = random_gl2a(&mut rng, &f);
        let lhs = act(&g1, &act(&g2, &e, &f).unwrap(), &f).unwrap();
        prop_assert_eq!(lhs, act(&g1.mul(&g2, &f), &e, &f).unwrap());
        prop_assert_eq!(act(&GL2F::identity(), &e, &f).unwrap(), e.clone());
        prop_assert_eq!(e.bar().bar(), e);
    }

    #[test]
    fn half_line_reduction_certified(seed in any::<u64>(), qi in 0usize..4) {
        let f = Field::of_order(QS[qi]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_edge(&mut rng, &f, 5);
        let r = reduce_gl2a(&e, &f).unwrap();
        prop_assert!(r.gamma.in_gl2a(&f));
        prop_assert_eq!(act(&r.gamma, &e, &f).unwrap(), TreeEdge::half_line_oriented(r.index, r.flipped));
        // invariance of the closed form under GL_2(A)
        let g = random_gl2a(&mut rng, &f);
        let q = f.q();
        prop_assert_eq!(etilde_closed(&act(&g, &e, &f).unwrap(), q, &f).unwrap(), etilde_closed(&e, q, &f).unwrap());
    }

    #[test]
    fn etilde_closed_flow_and_pairing(seed in any::<u64>(), qi in 0usize..4) {
        let f = Field::of_order(QS[qi]).unwrap();
        let q = f.q();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_edge(&mut rng, &f, 5);
        let v = etilde_closed(&e, q, &f).unwrap();
        prop_assert_eq!(v + etilde_closed(&e.bar(), q, &f).unwrap(), q as i128 + 1);
        let s: i128 = e.incoming_neighbors(&f).iter().map(|n| etilde_closed(n, q, &f).unwrap()).sum();
        prop_assert_eq!(s, v);
    }

    #[test]
    fn combo_w_group_law(seed in any::<u64>()) {
        let f = Field::prime(3).unwrap();
        let n = Poly::parse("T^3+T", &f).unwrap().mul(&Poly::parse("T+2", &f).unwrap(), &f);
        let lv = Level::new(&n, &f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<i128> = (0..lv.num_divisors()).map(|_| rng.gen_range(-9..9)).collect();
        let c = EisCombo::new(lv.clone(), coeffs, 4).unwrap();
        let a = rng.gen_range(0..lv.num_divisors() as u32);
        let b = rng.gen_range(0..lv.num_divisors() as u32);
        let (da, db, dab) = (lv.divisor(a, &f), lv.divisor(b, &f), lv.divisor(a ^ b, &f));
        let lhs = c.apply_w(&da, &f).unwrap().apply_w(&db, &f).unwrap();
        prop_assert_eq!(lhs, c.apply_w(&dab, &f).unwrap());
    }

    #[test]
    fn snf_certificate(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = rng.gen_range(1..6);
        let c = rng.gen_range(1..6);
        let m: Vec<Vec<i128>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-30..30)).collect()).collect();
        let m = snf::from_i128(&m);
        let s = snf::smith_normal_form(&m);
        prop_assert_eq!(snf::mat_mul(&snf::mat_mul(&s.u, &m), &s.v), s.d.clone());
        prop_assert_eq!(snf::det(&s.u).magnitude().clone(), 1u32.into());
        prop_assert_eq!(snf::det(&s.v).magnitude().clone(), 1u32.into());
    }

    #[test]
    fn cusp_w_involution(seed in any::<u64>(), s in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = CuspVector((0..1usize << s).map(|_| rng.gen_range(-20..20)).collect());
        let d = rng.gen_range(0..1u32 << s);
        prop_assert_eq!(v.apply_w(d).apply_w(d), v.clone());
        prop_assert_eq!(v.apply_w(d).degree(), v.degree());
    }
}
