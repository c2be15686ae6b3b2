//! Property tests for the algebraic invariants.

use proptest::prelude::*;
use spinor_workbench::checks::legendre_curve;
use spinor_workbench::curve::{Curve, Place};
use spinor_workbench::divisor::{principal_divisor, Divisor};
use spinor_workbench::error::Error;
use spinor_workbench::field::{Fe, FiniteField};
use spinor_workbench::function::Function;
use spinor_workbench::parse::{parse_divisor, parse_function, parse_poly};
use spinor_workbench::picard::{ec_neg, PicardData};
use spinor_workbench::poly::Poly;
use spinor_workbench::quadratic::{embeds_isometrically, QuadLattice, QuadSpace, SearchMode};
use spinor_workbench::riemann_roch::{in_space, point_sum, rr_dim, rr_space};
use spinor_workbench::sheaf::order_conjugate_m2;
use spinor_workbench::spinor::{restrict_to_open, rho_invariant, spinor_class_group, Family, SpinorObject};

fn curve(i: usize) -> Curve {
    match i {
        0 => Curve::projective_line(&FiniteField::prime(3).unwrap()),
        1 => Curve::projective_line(&FiniteField::of_order(5).unwrap()),
        2 => legendre_curve(3),
        3 => legendre_curve(5),
        _ => legendre_curve(7),
    }
}

fn poly(k: &FiniteField, cs: &[u32]) -> Poly {
    Poly::from_coeffs(k, cs.iter().map(|&c| k.element(c % k.order()).unwrap()).collect())
}

/// Nonzero function `(a + b y)/d` from raw coefficient lists.
fn function(c: &Curve, a: &[u32], b: &[u32], d: &[u32]) -> Option<Function> {
    let k = c.field();
    let b = if c.is_elliptic() { poly(k, b) } else { Poly::zero(k) };
    let d = poly(k, d);
    if d.is_zero() {
        return None;
    }
    Function::from_parts(c, poly(k, a), b, d).ok().filter(|f| !f.is_zero())
}

fn divisor(c: &Curve, terms: &[(usize, i64)]) -> Divisor {
    let pts = c.rational_points();
    terms.iter().fold(Divisor::zero(c), |acc, &(i, m)| &acc + &Divisor::place(c, pts[i % pts.len()].clone(), m).unwrap())
}

/// A principal divisor `z` with rational support, built from `terms`.
fn principal(c: &Curve, pic: &PicardData, terms: &[(usize, i64)]) -> Divisor {
    let mut z = divisor(c, terms);
    z = &z - &Divisor::place(c, pic.base_place(), z.degree()).unwrap();
    if c.is_elliptic() {
        let s = point_sum(&z);
        if s != Place::Origin {
            z = &(&z + &Divisor::place(c, ec_neg(c, &s), 1).unwrap()) - &Divisor::place(c, Place::Origin, 1).unwrap();
        }
    }
    z
}

fn coeffs(max: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..64, 0..=max)
}

fn terms(n: usize, bound: i64) -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((0usize..32, -bound..=bound), 0..=n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valuation_is_multiplicative(ci in 0usize..5, a in coeffs(3), b in coeffs(2), d in coeffs(2),
                                   a2 in coeffs(3), b2 in coeffs(2), d2 in coeffs(2)) {
        let c = curve(ci);
        let (Some(f), Some(g)) = (function(&c, &a, &b, &d), function(&c, &a2, &b2, &d2)) else { return Ok(()) };
        let fg = &f * &g;
        for p in c.rational_points() {
            prop_assert_eq!(fg.valuation(&p), Some(f.valuation(&p).unwrap() + g.valuation(&p).unwrap()));
        }
    }

    #[test]
    fn principal_divisors_have_degree_zero(ci in 0usize..5, a in coeffs(4), b in coeffs(3), d in coeffs(3)) {
        let c = curve(ci);
        let Some(f) = function(&c, &a, &b, &d) else { return Ok(()) };
        match principal_divisor(&f) {
            Ok(div) => {
                prop_assert_eq!(div.degree(), 0);
                prop_assert!(PicardData::new(&c).unwrap().is_principal(&div).unwrap());
            }
            Err(Error::NonRationalSupport(_)) => prop_assert!(c.is_elliptic()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn factorization_round_trips(q in prop::sample::select(vec![2u64, 3, 5, 9, 25]), cs in prop::collection::vec(0u32..64, 2..9)) {
        let k = FiniteField::of_order(q).unwrap();
        let p = poly(&k, &cs);
        prop_assume!(!p.is_zero());
        let fz = p.factor();
        prop_assert_eq!(fz.expand(&k), p.clone());
        for (g, e) in &fz.factors {
            prop_assert!(g.is_monic() && g.is_irreducible() && *e >= 1);
        }
        prop_assert_eq!(parse_poly(&k, &p.to_string(), "x").unwrap(), p);
    }

    #[test]
    fn riemann_roch_and_serre_duality(ci in 0usize..5, t in terms(4, 3)) {
        let c = curve(ci);
        let b = divisor(&c, &t);
        let canonical = if c.is_elliptic() { Divisor::zero(&c) } else { Divisor::place(&c, Place::Infinity, -2).unwrap() };
        let l = rr_dim(&b).unwrap() as i64;
        let dual = rr_dim(&(&canonical - &b)).unwrap() as i64;
        prop_assert_eq!(l - dual, b.degree() + 1 - c.genus() as i64);
    }

    #[test]
    fn sections_multiply(ci in 0usize..5, ta in terms(2, 2), tb in terms(2, 2)) {
        let c = curve(ci);
        let (a, b) = (divisor(&c, &ta), divisor(&c, &tb));
        let (sa, sb) = (rr_space(&a).unwrap(), rr_space(&b).unwrap());
        let sum = &a + &b;
        for f in sa.basis() {
            prop_assert!(in_space(f, &a));
            for g in sb.basis() {
                prop_assert!(in_space(&(f * g), &sum));
            }
        }
    }

    #[test]
    fn linear_equivalence_preserves_dimension(ci in 0usize..5, t in terms(3, 2), z in terms(3, 2)) {
        let c = curve(ci);
        let pic = PicardData::new(&c).unwrap();
        let b = divisor(&c, &t);
        let b2 = &b + &principal(&c, &pic, &z);
        prop_assert_eq!(rr_dim(&b).unwrap(), rr_dim(&b2).unwrap());
        prop_assert!(order_conjugate_m2(&b, &b2, &pic).unwrap());
    }

    #[test]
    fn classification_by_dim_and_discriminant(q in prop::sample::select(vec![3u64, 5, 7]),
                                              u in prop::collection::vec(1u32..64, 1..=2),
                                              v in prop::collection::vec(1u32..64, 2)) {
        let v = &v[..u.len()];
        let k = FiniteField::of_order(q).unwrap();
        let unit = |x: u32| k.element(1 + x % (q as u32 - 1)).unwrap();
        let a = QuadSpace::diagonal(&k, &u.iter().map(|&x| unit(x)).collect::<Vec<Fe>>()).unwrap();
        let b = QuadSpace::diagonal(&k, &v.iter().map(|&x| unit(x)).collect::<Vec<Fe>>()).unwrap();
        let iso = embeds_isometrically(&a, &b, SearchMode::BruteForce).unwrap().embeds;
        prop_assert_eq!(iso, a.witt_invariants() == b.witt_invariants());
    }

    #[test]
    fn witt_cancellation(q in prop::sample::select(vec![3u64, 5, 9]), u in prop::collection::vec(0u32..64, 1..=3),
                         v in prop::collection::vec(0u32..64, 2), w in prop::collection::vec(0u32..64, 2)) {
        let k = FiniteField::of_order(q).unwrap();
        let unit = |x: u32| k.element(1 + x % (q as u32 - 1)).unwrap();
        let mk = |xs: &[u32]| QuadSpace::diagonal(&k, &xs.iter().map(|&x| unit(x)).collect::<Vec<Fe>>()).unwrap();
        let (u, v, w) = (mk(&u), mk(&v), mk(&w));
        let sums_equal = u.orthogonal_sum(&v).unwrap().witt_invariants() == u.orthogonal_sum(&w).unwrap().witt_invariants();
        prop_assert_eq!(sums_equal, v.witt_invariants() == w.witt_invariants());
    }

    #[test]
    fn conjugacy_is_an_equivalence(ci in 0usize..5, x in terms(3, 2), y in terms(3, 2), z in terms(3, 2)) {
        let c = curve(ci);
        let pic = PicardData::new(&c).unwrap();
        let (a, b, d) = (divisor(&c, &x), divisor(&c, &y), divisor(&c, &z));
        let r = |p: &Divisor, q: &Divisor| order_conjugate_m2(p, q, &pic).unwrap();
        prop_assert!(r(&a, &a));
        prop_assert_eq!(r(&a, &b), r(&b, &a));
        prop_assert!(!(r(&a, &b) && r(&b, &d)) || r(&a, &d));
        prop_assert!(r(&a, &(-&a)));
    }

    #[test]
    fn rho_is_a_genus_invariant(ci in 0usize..5, t in terms(3, 2), z in terms(3, 2), fam in 0usize..3) {
        let c = curve(ci);
        let pic = PicardData::new(&c).unwrap();
        let b = divisor(&c, &t);
        let b2 = &b + &principal(&c, &pic, &z);
        let family = [Family::SplitOrders(2), Family::UnimodularQuadratic(3), Family::UnimodularQuadratic(4)][fam];
        let obj = |d: &Divisor| match family {
            Family::UnimodularQuadratic(n) => SpinorObject::Lattice(QuadLattice::new(&c, n, d.clone()).unwrap()),
            Family::SplitOrders(_) => SpinorObject::m2(d),
        };
        let q = spinor_class_group(family, &pic).unwrap();
        prop_assert_eq!(rho_invariant(&obj(&b), &q).unwrap(), rho_invariant(&obj(&b2), &q).unwrap());
        prop_assert!(q.tag_of_divisor(&principal(&c, &pic, &z)).unwrap().is_identity());
    }

    #[test]
    fn restriction_is_functorial(ci in 0usize..5, s in 0usize..32, t in 0usize..32) {
        let c = curve(ci);
        let pic = PicardData::new(&c).unwrap();
        let pts = c.rational_points();
        let (s, t) = (pts[s % pts.len()].clone(), pts[t % pts.len()].clone());
        let q = spinor_class_group(Family::UnimodularQuadratic(4), &pic).unwrap();
        let two = restrict_to_open(&restrict_to_open(&q, std::slice::from_ref(&s)).unwrap(), std::slice::from_ref(&t)).unwrap();
        let one = restrict_to_open(&q, &[s.clone(), t.clone()]).unwrap();
        prop_assert_eq!(two.group(), one.group());
        for p in &pts {
            prop_assert_eq!(two.frobenius(p).ok(), one.frobenius(p).ok());
        }
        prop_assert!(one.frobenius(&s).unwrap().is_identity() && one.frobenius(&t).unwrap().is_identity());
    }

    #[test]
    fn printing_round_trips(ci in 0usize..5, a in coeffs(3), b in coeffs(2), d in coeffs(2), t in terms(4, 5)) {
        let c = curve(ci);
        if let Some(f) = function(&c, &a, &b, &d) {
            prop_assert_eq!(parse_function(&c, &f.to_string()).unwrap(), f);
        }
        let div = divisor(&c, &t);
        prop_assert_eq!(parse_divisor(&c, &div.to_string()).unwrap(), div);
    }
}
