//! Worked examples for each public operation, through the text literals.

use spinor_workbench::checks::legendre_curve;
use spinor_workbench::curve::{Curve, Place};
use spinor_workbench::divisor::{principal_divisor, Divisor};
use spinor_workbench::error::Error;
use spinor_workbench::field::{FieldOp, FiniteField};
use spinor_workbench::function::Function;
use spinor_workbench::parse::{parse_curve, parse_divisor, parse_field, parse_function, parse_place, parse_poly, parse_qlat};
use spinor_workbench::picard::PicardData;
use spinor_workbench::poly::Poly;
use spinor_workbench::quadratic::{embeds_isometrically, represents_obstruction, sections_quadspace, QuadLattice, QuadSpace, Representation, SearchMode};
use spinor_workbench::riemann_roch::{rr_dim, rr_kernel_solver, rr_space, AnsatzPool};
use spinor_workbench::series::local_expand;
use spinor_workbench::sheaf::{admits_constant_field_embedding, order_conjugate_m2, order_sections, DecomposableLattice, EmbeddingMode, SplitOrder, Structure};
use spinor_workbench::spinor::{
    nonsplit_lower_bound, representing_genera_hyperbolic_pair, restrict_to_open, rho_invariant, same_spinor_genus,
    spinor_class_group, split_representatives, Family, SpinorObject,
};

const E3: &str = "E/GF(3): y^2 = x^3 - x";

fn p1(q: u64) -> Curve {
    Curve::projective_line(&FiniteField::of_order(q).unwrap())
}

fn d(c: &Curve, s: &str) -> Divisor {
    parse_divisor(c, s).unwrap()
}

fn pl(c: &Curve, s: &str) -> Place {
    parse_place(c, s).unwrap()
}

fn func(c: &Curve, s: &str) -> Function {
    parse_function(c, s).unwrap()
}

#[test]
fn field_arithmetic() {
    let f3 = parse_field("GF(3)").unwrap();
    let two = f3.bind(f3.from_int(2));
    assert_eq!(two.inv().unwrap().value(), f3.from_int(2));
    let f9 = parse_field("GF(9,t^2+1)").unwrap();
    let t = f9.bind(f9.generator_t());
    assert_eq!(t.apply(&t, FieldOp::Mul).unwrap().value(), f9.from_int(-1));
    let squares: Vec<_> = f3.elements().filter(|a| !a.is_zero()).map(|a| f3.mul(a, a)).collect();
    assert!(squares.iter().all(|&s| s == f3.one()));
    assert!(matches!(two.add(&t), Err(Error::FieldMismatch(..))));
}

#[test]
fn polynomial_factorization() {
    let f3 = parse_field("GF(3)").unwrap();
    let fz = parse_poly(&f3, "x^2+1", "x").unwrap().factor();
    assert_eq!(fz.factors.len(), 1);
    let fz = parse_poly(&f3, "x^3-x", "x").unwrap().factor();
    let fs: Vec<String> = fz.factors.iter().map(|(g, _)| g.to_string()).collect();
    assert_eq!(fs, ["x", "x + 1", "x + 2"]);
    let f5 = parse_field("GF(5)").unwrap();
    assert!(!parse_poly(&f5, "x^2+1", "x").unwrap().is_irreducible());
}

#[test]
fn valuations_and_expansions() {
    let c = p1(3);
    assert_eq!(func(&c, "x^2/(x^2+1)").valuation(&pl(&c, "[x]")), Some(2));
    let e = parse_curve(E3).unwrap();
    assert_eq!(Function::x(&e).valuation(&Place::Origin), Some(-2));
    assert_eq!(Function::x(&e).valuation(&pl(&e, "[0,0]")), Some(2));
    assert_eq!(Function::zero(&e).valuation(&Place::Origin), None);

    let ex = local_expand(&Function::x(&c), &pl(&c, "[x-1]"), 4).unwrap();
    assert_eq!(ex.valuation, Some(0));
    assert_eq!(ex.coefficients[0], Poly::one(c.field()));
    let ey = local_expand(&Function::y(&e).unwrap(), &pl(&e, "[0,0]"), 4).unwrap();
    assert_eq!((ey.valuation, ey.uniformizer.as_str()), (Some(1), "y"));
    let ei = local_expand(&func(&c, "1/x"), &Place::Infinity, 4).unwrap();
    assert_eq!(ei.valuation, Some(1));
}

#[test]
fn enumerating_places() {
    let c = p1(3);
    assert_eq!(c.places_up_to_degree(1).unwrap().len(), 4);
    let two = c.places_up_to_degree(2).unwrap();
    assert_eq!(two.len(), 7);
    assert_eq!(two.iter().filter(|p| p.degree() == 2).count(), 3);
    let e = parse_curve(E3).unwrap();
    let pts: Vec<String> = e.rational_points().iter().map(|p| p.format(e.field())).collect();
    assert_eq!(pts, ["[O]", "[0,0]", "[1,0]", "[2,0]"]);
}

#[test]
fn principal_divisors() {
    let c = p1(3);
    assert_eq!(principal_divisor(&Function::x(&c)).unwrap(), d(&c, "[x] - [inf]"));
    assert_eq!(principal_divisor(&func(&c, "x^2/(x^2+1)")).unwrap(), d(&c, "2*[x] - [x^2+1]"));
    let e = parse_curve(E3).unwrap();
    assert_eq!(principal_divisor(&Function::x(&e)).unwrap(), d(&e, "2*[0,0] - 2*[O]"));
}

#[test]
fn principality_with_witnesses() {
    let e = parse_curve(E3).unwrap();
    let pic = PicardData::new(&e).unwrap();
    assert!(!pic.is_principal(&d(&e, "[0,0] - [O]")).unwrap());
    assert_eq!(pic.principal_witness(&d(&e, "[0,0] - [O]")).unwrap(), None);
    let w = pic.principal_witness(&d(&e, "2*[0,0] - 2*[O]")).unwrap().unwrap();
    assert_eq!(principal_divisor(&w).unwrap(), d(&e, "2*[0,0] - 2*[O]"));
    assert!(w.div(&Function::x(&e)).unwrap().as_constant().is_some());

    let c = p1(3);
    let pic = PicardData::new(&c).unwrap();
    let target = d(&c, "[x] + [x-1] - 2*[inf]");
    let w = pic.principal_witness(&target).unwrap().unwrap();
    assert_eq!(principal_divisor(&w).unwrap(), target);
    assert!(w.div(&func(&c, "x^2 - x")).unwrap().as_constant().is_some());
}

#[test]
fn picard_groups() {
    for q in [2, 3, 9] {
        assert!(PicardData::new(&p1(q)).unwrap().torsion().is_trivial());
    }
    let pic3 = PicardData::new(&legendre_curve(3)).unwrap();
    assert_eq!(pic3.torsion().to_string(), "Z/2 x Z/2");
    assert_eq!(PicardData::new(&legendre_curve(5)).unwrap().torsion().order(), Some(8));

    let e = legendre_curve(3);
    let c = pic3.class_of(&d(&e, "[0,0] - [O]")).unwrap();
    assert_eq!(c.degree, 0);
    assert_eq!(Some(c.torsion.clone()), pic3.point_coords(&pl(&e, "[0,0]")).ok());
    assert!(!pic3.torsion().is_identity(&c.torsion));
    let line = p1(3);
    let c = PicardData::new(&line).unwrap().class_of(&d(&line, "3*[inf]")).unwrap();
    assert_eq!((c.degree, c.torsion.len()), (3, 0));
}

#[test]
fn class_of_principal_is_trivial() {
    let e = legendre_curve(5);
    let pic = PicardData::new(&e).unwrap();
    let k = e.field().clone();
    let mut seen = 0;
    let lin = |a: i64| Poly::from_ints(&k, &[-a, 1]);
    for a in 0..5 {
        for b in 0..5 {
            for c in 0..5 {
                let num = &lin(a) * &lin(b);
                for f in [
                    Function::from_parts(&e, num.clone(), Poly::zero(&k), lin(c)).unwrap(),
                    Function::from_parts(&e, Poly::zero(&k), num.clone(), lin(c)).unwrap(),
                ] {
                    let div = principal_divisor(&f).unwrap();
                    assert!(pic.is_principal(&div).unwrap(), "{f}");
                    seen += 1;
                }
            }
        }
    }
    assert!(seen >= 5);
}

#[test]
fn quotients_of_pic() {
    let c = p1(3);
    assert_eq!(PicardData::new(&c).unwrap().pic_mod_n(2).unwrap().group().to_string(), "Z/2");
    let pic = PicardData::new(&legendre_curve(3)).unwrap();
    assert_eq!(pic.pic_mod_n(2).unwrap().order(), Some(8));
    assert_eq!(pic.pic_mod_n(3).unwrap().group().to_string(), "Z/3");

    let pc = PicardData::new(&c).unwrap();
    assert!(pc.affine_class_group(&[Place::Infinity]).unwrap().group().is_trivial());
    assert_eq!(pc.affine_class_group(&[pl(&c, "[x^2+1]")]).unwrap().group().to_string(), "Z/2");
    assert_eq!(pic.affine_class_group(&[Place::Origin]).unwrap().group().to_string(), "Z/2 x Z/2");
}

#[test]
fn riemann_roch_spaces() {
    let c = p1(3);
    let s = rr_space(&d(&c, "2*[inf]")).unwrap();
    let basis: Vec<String> = s.basis().iter().map(|f| f.to_string()).collect();
    assert_eq!(basis, ["1", "x", "x^2"]);
    assert_eq!(rr_space(&d(&c, "-[inf]")).unwrap().dim(), 0);
    let e = parse_curve(E3).unwrap();
    let s = rr_space(&d(&e, "3*[O]")).unwrap();
    let basis: Vec<String> = s.basis().iter().map(|f| f.to_string()).collect();
    assert_eq!(basis, ["1", "x", "y"]);
    assert_eq!(rr_space(&d(&e, "[0,0] - [O]")).unwrap().dim(), 0);

    assert_eq!(rr_dim(&d(&c, "5*[0]")).unwrap(), 6);
    assert_eq!(rr_dim(&d(&e, "2*[1,0]")).unwrap(), 2);
    assert_eq!(rr_dim(&d(&c, "[0] - 2*[inf]")).unwrap(), 0);
    assert_eq!(rr_dim(&d(&e, "[0,0] - 2*[O]")).unwrap(), 0);
}

#[test]
fn kernel_solver_pools() {
    let c = p1(3);
    let b = d(&c, "[x^2+1]");
    let pool = AnsatzPool::for_divisor(&b);
    assert_eq!((pool.denominator.to_string().as_str(), pool.max_deg_a), ("x^2 + 1", 2));
    assert_eq!(rr_kernel_solver(&b, &pool).unwrap().len(), 3);
    let e = parse_curve(E3).unwrap();
    let b = d(&e, "[0,0] + [O]");
    let pool = AnsatzPool::for_divisor(&b);
    assert_eq!(pool.denominator.to_string(), "x");
    assert_eq!(rr_kernel_solver(&b, &pool).unwrap().len(), 2);
    for b in [d(&c, "[0] + 2*[x^2+1]"), d(&e, "2*[1,0] + [O]")] {
        assert!(rr_space(&b).unwrap().contains(&Function::one(b.curve())));
    }
}

#[test]
fn lattice_sections() {
    let c = p1(3);
    let l = DecomposableLattice::new(&c, vec![d(&c, "0"), d(&c, "0"), d(&c, "2*[inf]"), d(&c, "-2*[inf]")]).unwrap();
    let dims: Vec<usize> = l.sections().unwrap().iter().map(|s| s.dim()).collect();
    assert_eq!(dims, [1, 1, 3, 0]);
    assert_eq!(DecomposableLattice::new(&c, vec![d(&c, "0")]).unwrap().sections().unwrap()[0].dim(), 1);
    let e = parse_curve(E3).unwrap();
    let l = DecomposableLattice::new(&e, vec![d(&e, "[0,0] - [O]")]).unwrap();
    assert_eq!(l.sections().unwrap()[0].dim(), 0);
}

#[test]
fn section_algebras() {
    let c = p1(3);
    let pic = PicardData::new(&c).unwrap();
    let a = order_sections(&SplitOrder::m2(&d(&c, "0")), &pic).unwrap();
    assert_eq!((a.dim(), a.structure().clone()), (4, Structure::FullMatrix));
    let a = order_sections(&SplitOrder::m2(&d(&c, "2*[inf]")), &pic).unwrap();
    assert_eq!((a.dim(), a.structure().clone()), (5, Structure::SplitDiagonalPlusNilpotent(3)));
    let e = parse_curve(E3).unwrap();
    let pe = PicardData::new(&e).unwrap();
    let a = order_sections(&SplitOrder::m2(&d(&e, "[0,0] - [O]")), &pe).unwrap();
    assert_eq!((a.dim(), a.structure().clone()), (2, Structure::DiagonalOnly));
}

#[test]
fn conjugacy_in_m2() {
    let c = p1(3);
    let pic = PicardData::new(&c).unwrap();
    assert!(order_conjugate_m2(&d(&c, "[inf]"), &d(&c, "-[inf]"), &pic).unwrap());
    assert!(order_conjugate_m2(&d(&c, "2*[inf]"), &d(&c, "[0] + [inf]"), &pic).unwrap());
    assert!(!order_conjugate_m2(&d(&c, "2*[inf]"), &d(&c, "[inf]"), &pic).unwrap());
    let e = parse_curve(E3).unwrap();
    let pe = PicardData::new(&e).unwrap();
    assert!(!order_conjugate_m2(&d(&e, "[0,0] - [O]"), &d(&e, "[1,0] - [O]"), &pe).unwrap());
}

#[test]
fn constant_field_embeddings() {
    let c = p1(3);
    let pic = PicardData::new(&c).unwrap();
    let v = admits_constant_field_embedding(&SplitOrder::m2(&d(&c, "0")), &pic, EmbeddingMode::Both).unwrap();
    assert!(v.admits);
    let m = v.minimal_polynomial.unwrap();
    assert!(m.degree() == Some(2) && m.is_irreducible());
    let v = admits_constant_field_embedding(&SplitOrder::m2(&d(&c, "[inf]")), &pic, EmbeddingMode::Both).unwrap();
    assert_eq!((v.admits, v.structural, v.brute_force), (false, Some(false), Some(false)));
    let e = parse_curve(E3).unwrap();
    let pe = PicardData::new(&e).unwrap();
    let v = admits_constant_field_embedding(&SplitOrder::m2(&d(&e, "[0,0] - [O]")), &pe, EmbeddingMode::BruteForce).unwrap();
    assert!(!v.admits);
}

#[test]
fn quadratic_section_spaces() {
    let w = sections_quadspace(&parse_qlat("qlat P1/GF(3) n=4 B=0").unwrap()).unwrap().witt_invariants();
    assert_eq!((w.dim, w.radical_dim, w.witt_index), (4, 0, 1));
    let w = sections_quadspace(&parse_qlat("qlat P1/GF(3) n=4 B=2*[inf]").unwrap()).unwrap().witt_invariants();
    assert_eq!((w.dim, w.radical_dim), (5, 3));
    let w = sections_quadspace(&parse_qlat("qlat P1/GF(3) n=3 B=0").unwrap()).unwrap().witt_invariants();
    assert_eq!((w.dim, w.radical_dim), (3, 0));
}

#[test]
fn witt_invariants_and_embeddings() {
    let f3 = FiniteField::prime(3).unwrap();
    let f5 = FiniteField::prime(5).unwrap();
    let one = f3.one();
    let plane3 = QuadSpace::diagonal(&f3, &[one, one]).unwrap();
    assert_eq!(plane3.witt_invariants().witt_index, 0);
    assert_eq!(QuadSpace::diagonal(&f5, &[f5.one(), f5.one()]).unwrap().witt_invariants().witt_index, 1);
    for k in [f3.clone(), f5.clone(), FiniteField::of_order(9).unwrap()] {
        assert_eq!(QuadSpace::hyperbolic_plane(&k).unwrap().witt_invariants().witt_index, 1);
    }
    let h = QuadSpace::hyperbolic_plane(&f3).unwrap();
    let z = f3.zero();
    let w = QuadSpace::diagonal(&f3, &[one, one, z, z, z]).unwrap();
    assert!(!embeds_isometrically(&h, &w, SearchMode::Both).unwrap().embeds);
    let w0 = sections_quadspace(&parse_qlat("qlat P1/GF(3) n=4 B=0").unwrap()).unwrap();
    assert!(embeds_isometrically(&h, &w0, SearchMode::Both).unwrap().embeds);
    let r = embeds_isometrically(&QuadSpace::diagonal(&f3, &[one]).unwrap(), &plane3, SearchMode::BruteForce).unwrap();
    assert!(r.embeds);
}

#[test]
fn obstruction_verdicts() {
    let v = |s: &str| represents_obstruction(&parse_qlat(s).unwrap(), SearchMode::Both).unwrap().verdict;
    assert_eq!(v("qlat P1/GF(3) n=4 B=2*[inf]"), Representation::Obstructed);
    assert_eq!(v("qlat P1/GF(3) n=4 B=0"), Representation::Inconclusive);
    // over F_5 the unit plane is hyperbolic, so the search succeeds
    assert_eq!(v("qlat P1/GF(5) n=4 B=2*[inf]"), Representation::Inconclusive);
}

#[test]
fn spinor_class_groups_and_tags() {
    let c = p1(3);
    let pc = PicardData::new(&c).unwrap();
    let qq = spinor_class_group(Family::UnimodularQuadratic(3), &pc).unwrap();
    assert_eq!(qq.group().to_string(), "Z/2");
    assert_eq!(spinor_class_group(Family::SplitOrders(3), &pc).unwrap().group().to_string(), "Z/3");
    let e = parse_curve(E3).unwrap();
    let pe = PicardData::new(&e).unwrap();
    let qe = spinor_class_group(Family::SplitOrders(2), &pe).unwrap();
    assert_eq!(qe.group().to_string(), "Z/2 x Z/2 x Z/2");

    let q4 = spinor_class_group(Family::UnimodularQuadratic(4), &pc).unwrap();
    let lat = |b: &str| SpinorObject::Lattice(QuadLattice::new(&c, 4, d(&c, b)).unwrap());
    assert!(rho_invariant(&lat("0"), &q4).unwrap().is_identity());
    assert!(rho_invariant(&lat("2*[inf]"), &q4).unwrap().is_identity());
    assert!(!rho_invariant(&lat("[x^2+1] - [inf]"), &q4).unwrap().is_identity());
    assert!(!rho_invariant(&SpinorObject::m2(&d(&e, "[0,0] - [O]")), &qe).unwrap().is_identity());

    let q2 = spinor_class_group(Family::SplitOrders(2), &pc).unwrap();
    let (m2inf, m0) = (SpinorObject::m2(&d(&c, "2*[inf]")), SpinorObject::m2(&d(&c, "0")));
    assert!(same_spinor_genus(&m2inf, &m0, &q2).unwrap());
    assert!(!order_conjugate_m2(&d(&c, "2*[inf]"), &d(&c, "0"), &pc).unwrap());
    let (b, dd) = (SpinorObject::m2(&d(&e, "[0,0] - [O]")), SpinorObject::m2(&d(&e, "[1,0] - [O]")));
    assert!(!same_spinor_genus(&b, &dd, &qe).unwrap());
    assert!(same_spinor_genus(&b, &b, &qe).unwrap());
}

#[test]
fn restrictions() {
    let c = p1(3);
    let pic = PicardData::new(&c).unwrap();
    let q = spinor_class_group(Family::UnimodularQuadratic(4), &pic).unwrap();
    for p in c.places_up_to_degree(1).unwrap() {
        assert!(restrict_to_open(&q, &[p]).unwrap().is_trivial());
    }
    let r = restrict_to_open(&q, &[pl(&c, "[x^2+1]")]).unwrap();
    assert_eq!(r.group().to_string(), "Z/2");
    assert!(r.frobenius(&pl(&c, "[x^2+1]")).unwrap().is_identity());
    assert_eq!(restrict_to_open(&q, &[]).unwrap().group(), q.group());
}

#[test]
fn nonsplit_bounds_and_representatives() {
    for q in [3, 5, 9] {
        let pic = PicardData::new(&p1(q)).unwrap();
        for n in 2..=5 {
            assert_eq!(nonsplit_lower_bound(&pic, n).unwrap().bound, 0);
        }
    }
    let pic = PicardData::new(&legendre_curve(3)).unwrap();
    assert_eq!(nonsplit_lower_bound(&pic, 2).unwrap().bound, 3);
    assert_eq!(nonsplit_lower_bound(&pic, 3).unwrap().bound, 0);

    let c = p1(3);
    let reps = split_representatives(&PicardData::new(&c).unwrap(), 2).unwrap();
    let bs: Vec<String> = reps.values().map(|o| o.divisors()[0].to_string()).collect();
    assert_eq!(bs, ["0", "[inf]"]);
    let reps = split_representatives(&pic, 2).unwrap();
    assert_eq!(reps.len(), 8);
    for curve in [legendre_curve(5), legendre_curve(7), p1(5)] {
        let pic = PicardData::new(&curve).unwrap();
        let reps = split_representatives(&pic, 2).unwrap();
        assert_eq!(reps.len() as u64, pic.pic_mod_n(2).unwrap().order().unwrap());
    }
}

#[test]
fn representing_genera() {
    let c = p1(3);
    let pic = PicardData::new(&c).unwrap();
    let r = representing_genera_hyperbolic_pair(&parse_qlat("qlat P1/GF(3) n=4 B=2*[inf]").unwrap(), &pic).unwrap();
    assert_eq!((r.count, r.total, r.qualifier()), (1, 2, "exact"));
    let r = representing_genera_hyperbolic_pair(&parse_qlat("qlat P1/GF(3) n=4 B=0").unwrap(), &pic).unwrap();
    assert!(r.count >= 1 && r.certified.iter().any(|t| t.is_identity()));
    let e = parse_curve(E3).unwrap();
    let pe = PicardData::new(&e).unwrap();
    let r = representing_genera_hyperbolic_pair(&QuadLattice::new(&e, 4, d(&e, "2*[O]")).unwrap(), &pe).unwrap();
    assert_eq!(r.qualifier(), "lower bound");
    assert!(r.count >= 1 && r.count <= r.total);
}

#[test]
fn rejects_bad_input() {
    assert!(matches!(parse_curve("E/GF(3): y^2 = x^3 + x^2"), Err(Error::InvalidCurve(_))));
    assert!(matches!(parse_field("GF(10)"), Err(Error::InvalidField(_))));
    let e = parse_curve(E3).unwrap();
    assert!(matches!(parse_place(&e, "[2,1]"), Err(Error::InvalidPlace(_))));
    assert!(matches!(parse_place(&e, "[inf]"), Err(Error::InvalidPlace(_))));
    let c = p1(3);
    let pc = PicardData::new(&c).unwrap();
    let qq = spinor_class_group(Family::UnimodularQuadratic(4), &pc).unwrap();
    assert!(matches!(rho_invariant(&SpinorObject::m2(&d(&c, "0")), &qq), Err(Error::KindMismatch(_))));
    assert!(spinor_class_group(Family::UnimodularQuadratic(4), &PicardData::new(&p1(2)).unwrap()).is_err());
    assert!(matches!(order_conjugate_m2(&d(&c, "0"), &d(&e, "0"), &pc), Err(Error::CurveMismatch(..))));
    // higher-degree elliptic places are outside the model
    let f = func(&e, "x^2 + 1");
    assert!(matches!(principal_divisor(&f), Err(Error::NonRationalSupport(_))));
}
