//! Invariant suite: randomized and exhaustive checks of every module,
//! followed by the acceptance matrix.

use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::checks::{acceptance, legendre_curve, Check, Scenario};
use crate::curve::{irreducible_count, Curve, Place};
use crate::divisor::{principal_divisor, Divisor};
use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};
use crate::function::Function;
use crate::parse;
use crate::picard::{ec_neg, Fault, PicardData};
use crate::poly::Poly;
use crate::quadratic::{embeds_isometrically, QuadSpace, SearchMode};
use crate::riemann_roch::{in_space, point_sum, rr_kernel_solver, rr_space, AnsatzPool};
use crate::series::local_expand;
use crate::sheaf::{order_conjugate_m2, order_sections, SplitOrder, Structure};
use crate::spinor::{restrict_to_open, rho_invariant, spinor_class_group, Family, SpinorObject};

/// Module groups, in run order; `acceptance` runs the acceptance matrix.
pub const GROUPS: [&str; 8] = [
    "galois-field",
    "curve-function-field",
    "divisor-picard",
    "riemann-roch",
    "sheaf-lattice",
    "quadratic-forms",
    "spinor-classfield",
    "acceptance",
];

fn field(q: u64) -> FiniteField {
    FiniteField::of_order(q).expect("supported order")
}

fn elem(k: &FiniteField, rng: &mut ChaCha8Rng) -> Fe {
    k.element(rng.gen_range(0..k.order())).expect("in range")
}

fn poly(k: &FiniteField, deg: usize, rng: &mut ChaCha8Rng) -> Poly {
    Poly::from_coeffs(k, (0..=deg).map(|_| elem(k, rng)).collect())
}

fn nonzero_poly(k: &FiniteField, deg: usize, rng: &mut ChaCha8Rng) -> Poly {
    loop {
        let p = poly(k, deg, rng);
        if !p.is_zero() {
            return p;
        }
    }
}

/// A random nonzero function `(a + b y)/d` (no `y` on the projective line).
pub fn random_function(c: &Curve, rng: &mut ChaCha8Rng) -> Function {
    let k = c.field();
    loop {
        let a = poly(k, rng.gen_range(0..4), rng);
        let b = if c.is_elliptic() { poly(k, rng.gen_range(0..3), rng) } else { Poly::zero(k) };
        let d = nonzero_poly(k, rng.gen_range(0..3), rng);
        if let Ok(f) = Function::from_parts(c, a, b, d) {
            if !f.is_zero() {
                return f;
            }
        }
    }
}

/// A random divisor supported on rational places.
pub fn random_divisor(c: &Curve, rng: &mut ChaCha8Rng, terms: usize, bound: i64) -> Divisor {
    let pts = c.rational_points();
    let mut d = Divisor::zero(c);
    for _ in 0..terms {
        let p = pts[rng.gen_range(0..pts.len())].clone();
        d = &d + &Divisor::place(c, p, rng.gen_range(-bound..=bound)).expect("rational place");
    }
    d
}

fn elliptic_curves() -> Vec<Curve> {
    let mut out: Vec<Curve> = [3, 5, 7, 9, 11].into_iter().map(legendre_curve).collect();
    let k = field(5);
    out.push(Curve::elliptic(&k, Poly::from_ints(&k, &[2, 0, 0, 1])).expect("x^3 + 2 is squarefree"));
    out
}

fn galois_field(seed: u64) -> Scenario {
    Scenario::run("galois-field", "finite fields and polynomials", Duration::from_secs(20), |out| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for q in [2, 3, 7, 9, 25, 27] {
            let k = field(q);
            let mut bad = 0;
            for _ in 0..300 {
                let (a, b, c) = (elem(&k, &mut rng), elem(&k, &mut rng), elem(&k, &mut rng));
                let assoc = k.mul(k.mul(a, b), c) == k.mul(a, k.mul(b, c)) && k.add(k.add(a, b), c) == k.add(a, k.add(b, c));
                let distrib = k.mul(a, k.add(b, c)) == k.add(k.mul(a, b), k.mul(a, c));
                let inverse = a.is_zero() || k.mul(a, k.inv(a)?) == k.one();
                let frob = k.frobenius(k.add(a, b)) == k.add(k.frobenius(a), k.frobenius(b));
                if !(assoc && distrib && inverse && frob && k.pow(a, q) == a) {
                    bad += 1;
                }
            }
            out.push(Check::eq(format!("{k}: field axiom violations in 300 samples"), 0, bad));
            if q % 2 == 1 {
                let squares = k.elements().filter(|&a| k.is_square(a)).count() as u64;
                let roots_ok = k.elements().all(|a| k.sqrt(a).is_none_or(|r| k.mul(r, r) == a));
                out.push(Check::eq(format!("{k}: number of squares"), q.div_ceil(2), squares));
                out.push(Check::holds(format!("{k}: square roots square back"), roots_ok));
            }
            for d in 1..=3u32 {
                if q.pow(d) > 20_000 {
                    continue;
                }
                let n = Poly::irreducibles_of_degree(&k, d as usize).len() as u64;
                out.push(Check::eq(format!("{k}: monic irreducibles of degree {d}"), irreducible_count(q, d), n));
            }
            let mut bad = 0;
            for _ in 0..40 {
                let p = nonzero_poly(&k, rng.gen_range(1..9), &mut rng);
                let fz = p.factor();
                let ok = fz.expand(&k) == p && fz.factors.iter().all(|(g, _)| g.is_monic() && g.is_irreducible());
                let printed = parse::parse_poly(&k, &p.to_string(), "x")? == p;
                if !(ok && printed) {
                    bad += 1;
                }
            }
            out.push(Check::eq(format!("{k}: factorization/printing round-trip failures"), 0, bad));
        }
        Ok(())
    })
}

fn curve_function_field(seed: u64) -> Scenario {
    Scenario::run("curve-function-field", "function fields: valuations and expansions", Duration::from_secs(20), |out| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let curves = [Curve::projective_line(&field(3)), Curve::projective_line(&field(9)), legendre_curve(3), legendre_curve(5)];
        for c in &curves {
            let places = if c.is_elliptic() { c.rational_points() } else { c.places_up_to_degree(2)? };
            let (mut tested, mut bad_mult, mut bad_series, mut bad_degree, mut bad_print) = (0, 0, 0, 0, 0);
            for _ in 0..40 {
                let f = random_function(c, &mut rng);
                let g = random_function(c, &mut rng);
                let fg = &f * &g;
                for p in &places {
                    tested += 1;
                    let (vf, vg) = (f.valuation(p).unwrap(), g.valuation(p).unwrap());
                    if fg.valuation(p) != Some(vf + vg) {
                        bad_mult += 1;
                    }
                    if local_expand(&f, p, 4)?.valuation != Some(vf) {
                        bad_series += 1;
                    }
                }
                match principal_divisor(&f) {
                    Ok(d) if d.degree() != 0 => bad_degree += 1,
                    Ok(_) | Err(Error::NonRationalSupport(_)) => {}
                    Err(e) => return Err(e),
                }
                if parse::parse_function(c, &f.to_string())? != f {
                    bad_print += 1;
                }
            }
            out.push(Check::holds(format!("{c}: {tested} valuations compared"), tested > 0));
            out.push(Check::eq(format!("{c}: v(fg) != v(f) + v(g)"), 0, bad_mult));
            out.push(Check::eq(format!("{c}: series order != exact valuation"), 0, bad_series));
            out.push(Check::eq(format!("{c}: principal divisors of nonzero degree"), 0, bad_degree));
            out.push(Check::eq(format!("{c}: parse(print(f)) != f"), 0, bad_print));
        }
        Ok(())
    })
}

fn divisor_picard(seed: u64) -> Scenario {
    Scenario::run("divisor-picard", "divisor class groups", Duration::from_secs(20), |out| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        for c in elliptic_curves() {
            let pic = PicardData::new(&c)?;
            out.push(Check::holds(format!("{c}: Hasse interval"), pic.hasse_check()));
            out.push(Check::holds(format!("{c}: group axioms"), pic.group_axioms_check()));
            let k = c.field();
            let cubic = c.cubic().unwrap();
            let brute = 1 + k.elements().map(|x| k.elements().filter(|&y| k.mul(y, y) == cubic.eval(x)).count()).sum::<usize>();
            out.push(Check::eq(format!("{c}: |Pic^0| = point count"), brute as u64, pic.torsion().order().unwrap_or(0)));
            let (mut principal, mut bad) = (0, 0);
            for _ in 0..30 {
                let mut d = random_divisor(&c, &mut rng, 4, 2);
                d = &d - &Divisor::place(&c, Place::Origin, d.degree())?;
                let oracle = point_sum(&d) == Place::Origin;
                let witness = pic.principal_witness(&d)?;
                let ok = match &witness {
                    Some(f) => oracle && principal_divisor(f)? == d,
                    None => !oracle,
                };
                principal += u64::from(oracle);
                if !ok {
                    bad += 1;
                }
            }
            out.push(Check::eq(format!("{c}: principal witnesses wrong in 30 samples ({principal} principal)"), 0, bad));
        }
        let faulty = PicardData::with_fault(&legendre_curve(3), Fault::DuplicatePoints)?;
        out.push(Check::eq("negative control: corrupted point table passes the Hasse interval", false, faulty.hasse_check()));
        Ok(())
    })
}

/// `ℓ(B)` from the raw solver on an enlarged ansatz, basis rechecked.
fn kernel_dim(d: &Divisor, bad: &mut u64) -> Result<usize> {
    let pool = AnsatzPool::for_divisor(d).enlarged();
    let ker = rr_kernel_solver(d, &pool)?;
    for (a, b) in &ker {
        let f = Function::from_parts(d.curve(), a.clone(), b.clone(), pool.denominator.clone())?;
        if !in_space(&f, d) {
            *bad += 1;
        }
    }
    Ok(ker.len())
}

fn riemann_roch(seed: u64) -> Scenario {
    Scenario::run("riemann-roch", "Riemann-Roch spaces", Duration::from_secs(20), |out| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let curves = [Curve::projective_line(&field(3)), Curve::projective_line(&field(5)), legendre_curve(3), legendre_curve(5), legendre_curve(7)];
        for c in &curves {
            let g = c.genus() as i64;
            let canonical = if c.is_elliptic() { Divisor::zero(c) } else { Divisor::place(c, Place::Infinity, -2)? };
            let (mut bad_rr, mut bad_basis, mut bad_mult) = (0, 0u64, 0);
            for _ in 0..25 {
                let b = random_divisor(c, &mut rng, 3, 3);
                let l = kernel_dim(&b, &mut bad_basis)? as i64;
                let dual = kernel_dim(&(&canonical - &b), &mut bad_basis)? as i64;
                if l - dual != b.degree() + 1 - g {
                    bad_rr += 1;
                }
                let a = random_divisor(c, &mut rng, 2, 2);
                let (sa, sb) = (rr_space(&a)?, rr_space(&b)?);
                let sum = &a + &b;
                for f in sa.basis() {
                    for h in sb.basis() {
                        if !in_space(&(f * h), &sum) {
                            bad_mult += 1;
                        }
                    }
                }
            }
            out.push(Check::eq(format!("{c}: l(B) - l(K - B) != deg B + 1 - g"), 0, bad_rr));
            out.push(Check::eq(format!("{c}: kernel elements failing div(f) + B >= 0"), 0, bad_basis));
            out.push(Check::eq(format!("{c}: L(A)·L(B) not inside L(A + B)"), 0, bad_mult));
        }
        let e = legendre_curve(3);
        let s = rr_space(&Divisor::place(&e, Place::Origin, 3)?)?;
        let basis: Vec<String> = s.basis().iter().map(|f| f.to_string()).collect();
        out.push(Check::eq("basis of L(3[O]) on y^2 = x^3 - x", "1, x, y", basis.join(", ")));
        Ok(())
    })
}

fn sheaf_lattice(seed: u64) -> Scenario {
    Scenario::run("sheaf-lattice", "split maximal orders and their sections", Duration::from_secs(20), |out| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 4);
        for c in [Curve::projective_line(&field(3)), legendre_curve(3), legendre_curve(5)] {
            let pic = PicardData::new(&c)?;
            let (mut bad_assoc, mut bad_dim, mut bad_tag) = (0, 0, 0);
            for _ in 0..12 {
                let n = rng.gen_range(2..=3);
                let ds: Vec<Divisor> = (0..n).map(|_| random_divisor(&c, &mut rng, 2, 1)).collect();
                let order = SplitOrder::new(&c, ds)?;
                let alg = order_sections(&order, &pic)?;
                if !alg.is_associative() {
                    bad_assoc += 1;
                }
                let mut expected = 0;
                for i in 0..n {
                    for j in 0..n {
                        expected += rr_space(&order.entry_divisor(i, j))?.dim();
                    }
                }
                if expected != alg.dim() {
                    bad_dim += 1;
                }
                let all_equivalent = (1..n).all(|i| point_sum_equal(&pic, &order.entry_divisor(i, 0)));
                if all_equivalent != (*alg.structure() == Structure::FullMatrix) {
                    bad_tag += 1;
                }
            }
            out.push(Check::eq(format!("{c}: non-associative section algebras"), 0, bad_assoc));
            out.push(Check::eq(format!("{c}: dim Δ(X) != Σ l(B_i - B_j)"), 0, bad_dim));
            out.push(Check::eq(format!("{c}: FullMatrix tag != all B_i equivalent"), 0, bad_tag));

            let sample: Vec<Divisor> = (0..10).map(|_| random_divisor(&c, &mut rng, 2, 2)).collect();
            let mut rel = vec![vec![false; sample.len()]; sample.len()];
            for (i, a) in sample.iter().enumerate() {
                for (j, b) in sample.iter().enumerate() {
                    rel[i][j] = order_conjugate_m2(a, b, &pic)?;
                }
            }
            let n = sample.len();
            let refl = (0..n).all(|i| rel[i][i]);
            let symm = (0..n).all(|i| (0..n).all(|j| rel[i][j] == rel[j][i]));
            let trans = (0..n).all(|i| (0..n).all(|j| (0..n).all(|l| !(rel[i][j] && rel[j][l]) || rel[i][l])));
            out.push(Check::holds(format!("{c}: conjugacy of Delta_B is an equivalence relation"), refl && symm && trans));
        }
        Ok(())
    })
}

/// `D ~ 0` decided from degree and the point sum alone.
fn point_sum_equal(pic: &PicardData, d: &Divisor) -> bool {
    d.degree() == 0 && (!pic.curve().is_elliptic() || point_sum(d) == Place::Origin)
}

fn brute_force_isotropic(s: &QuadSpace) -> bool {
    let k = s.field();
    let n = s.dim();
    let q = k.order() as usize;
    (1..q.pow(n as u32)).any(|mut idx| {
        let v: Vec<Fe> = (0..n)
            .map(|_| {
                let e = k.element((idx % q) as u32).unwrap();
                idx /= q;
                e
            })
            .collect();
        s.q(&v).is_zero()
    })
}

fn quadratic_forms(seed: u64) -> Scenario {
    Scenario::run("quadratic-forms", "quadratic spaces over finite fields", Duration::from_secs(20), |out| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 5);
        for (q, max_dim) in [(3, 3), (5, 2), (9, 2)] {
            let k = field(q);
            let units: Vec<Fe> = k.elements().filter(|a| !a.is_zero()).collect();
            let mut spaces = Vec::new();
            for d in 1..=max_dim {
                for _ in 0..4 {
                    let diag: Vec<Fe> = (0..d).map(|_| units[rng.gen_range(0..units.len())]).collect();
                    spaces.push(QuadSpace::diagonal(&k, &diag)?);
                }
            }
            let mut bad = 0;
            for a in &spaces {
                for b in spaces.iter().filter(|b| b.dim() == a.dim()) {
                    let same_invariants = a.witt_invariants() == b.witt_invariants();
                    let isometric = embeds_isometrically(a, b, SearchMode::BruteForce)?.embeds;
                    if same_invariants != isometric {
                        bad += 1;
                    }
                }
            }
            out.push(Check::eq(format!("GF({q}): isometry != equal (dim, disc), brute force"), 0, bad));

            let (mut bad_cancel, mut bad_aniso) = (0, 0);
            for _ in 0..20 {
                let mk = |rng: &mut ChaCha8Rng, d: usize| {
                    let diag: Vec<Fe> = (0..d).map(|_| units[rng.gen_range(0..units.len())]).collect();
                    QuadSpace::diagonal(&k, &diag)
                };
                let d = rng.gen_range(1..=2);
                let du = rng.gen_range(1..=2);
                let (u, v, w) = (mk(&mut rng, du)?, mk(&mut rng, d)?, mk(&mut rng, d)?);
                let lhs = u.orthogonal_sum(&v)?.witt_invariants() == u.orthogonal_sum(&w)?.witt_invariants();
                if lhs != (v.witt_invariants() == w.witt_invariants()) {
                    bad_cancel += 1;
                }
                let s = u.orthogonal_sum(&v)?;
                if s.dim() <= 3 && s.is_anisotropic() == brute_force_isotropic(&s) {
                    bad_aniso += 1;
                }
            }
            out.push(Check::eq(format!("GF({q}): Witt cancellation failures"), 0, bad_cancel));
            out.push(Check::eq(format!("GF({q}): anisotropy != no isotropic vector"), 0, bad_aniso));
        }
        Ok(())
    })
}

fn spinor_classfield(seed: u64) -> Scenario {
    Scenario::run("spinor-classfield", "class-field quotients and spinor invariants", Duration::from_secs(20), |out| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 6);
        for c in [Curve::projective_line(&field(3)), legendre_curve(3), legendre_curve(5), legendre_curve(7)] {
            let pic = PicardData::new(&c)?;
            let pts = c.rational_points();
            for family in [Family::SplitOrders(2), Family::SplitOrders(3), Family::UnimodularQuadratic(4)] {
                let q = spinor_class_group(family, &pic)?;
                let (mut bad_rho, mut bad_restrict, mut bad_frob) = (0, 0, 0);
                for _ in 0..15 {
                    let b = random_divisor(&c, &mut rng, 3, 2);
                    // B + div(f) for a principal divisor with rational support
                    let mut z = random_divisor(&c, &mut rng, 3, 2);
                    z = &z - &Divisor::place(&c, pic.base_place(), z.degree())?;
                    if c.is_elliptic() {
                        let s = point_sum(&z);
                        if s != Place::Origin {
                            z = &(&z + &Divisor::place(&c, ec_neg(&c, &s), 1)?) - &Divisor::place(&c, Place::Origin, 1)?;
                        }
                    }
                    let obj = |d: Divisor| match family {
                        Family::SplitOrders(n) => {
                            let mut ds = vec![d];
                            ds.extend(std::iter::repeat_n(Divisor::zero(&c), n - 1));
                            SplitOrder::new(&c, ds).map(SpinorObject::Order)
                        }
                        Family::UnimodularQuadratic(n) => {
                            crate::quadratic::QuadLattice::new(&c, n, d).map(SpinorObject::Lattice)
                        }
                    };
                    if rho_invariant(&obj(b.clone())?, &q)? != rho_invariant(&obj(&b + &z)?, &q)? {
                        bad_rho += 1;
                    }
                    let pick = |rng: &mut ChaCha8Rng| pts[rng.gen_range(0..pts.len())].clone();
                    let (s, t) = (pick(&mut rng), pick(&mut rng));
                    let two_step = restrict_to_open(&restrict_to_open(&q, std::slice::from_ref(&s))?, std::slice::from_ref(&t))?;
                    let one_step = restrict_to_open(&q, &[s.clone(), t.clone()])?;
                    let proj_ok = pts.iter().all(|p| {
                        two_step.frobenius(p).ok() == one_step.frobenius(p).ok()
                    });
                    if two_step.group() != one_step.group() || !proj_ok || !two_step.frobenius(&s)?.is_identity() {
                        bad_restrict += 1;
                    }
                    if !q.tag_of_divisor(&z)?.is_identity() {
                        bad_frob += 1;
                    }
                }
                out.push(Check::eq(format!("{c}, {family}: rho changes under linear equivalence"), 0, bad_rho));
                out.push(Check::eq(format!("{c}, {family}: restriction not functorial"), 0, bad_restrict));
                out.push(Check::eq(format!("{c}, {family}: principal divisors with nontrivial image"), 0, bad_frob));
            }
        }
        Ok(())
    })
}

/// Runs the groups whose name contains `filter` (all when `None`).
pub fn run(filter: Option<&str>, seed: u64) -> Vec<Scenario> {
    let wanted = |g: &str| filter.is_none_or(|f| g.contains(f));
    let mut out = Vec::new();
    for g in GROUPS {
        if !wanted(g) {
            continue;
        }
        match g {
            "galois-field" => out.push(galois_field(seed)),
            "curve-function-field" => out.push(curve_function_field(seed)),
            "divisor-picard" => out.push(divisor_picard(seed)),
            "riemann-roch" => out.push(riemann_roch(seed)),
            "sheaf-lattice" => out.push(sheaf_lattice(seed)),
            "quadratic-forms" => out.push(quadratic_forms(seed)),
            "spinor-classfield" => out.push(spinor_classfield(seed)),
            _ => {
                for mut s in acceptance(seed) {
                    s.id = format!("acceptance/{}", s.id);
                    out.push(s);
                }
            }
        }
    }
    out
}
