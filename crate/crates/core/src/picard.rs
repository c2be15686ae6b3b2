//! `Pic(X) ≅ Z × Pic⁰(X)`: divisor classes, principality with witnesses,
//! and finite quotients of the Picard group.
//!
//! For an elliptic curve, `Pic⁰` is identified with `E(F_q)` through
//! `P ↦ class(P − O)`. The points are enumerated and an explicit addition
//! table is kept, so `q ≤ 2^10`. Torsion classes are recorded in
//! invariant-factor coordinates `(a mod n1, b mod n2)` with respect to a
//! basis `g1, g2` of `E(F_q) ≅ Z/n1 × Z/n2`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::abelian::{AbelianGroup, Quotient};
use crate::curve::{Curve, Place};
use crate::divisor::{p1_product, Divisor};
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::function::Function;
use crate::poly::Poly;

/// Largest field order for which the point table is built.
pub const MAX_ELLIPTIC_Q: u32 = 1 << 10;

/// `(degree, torsion coordinates)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorClass {
    pub degree: i64,
    pub torsion: Vec<i64>,
}

impl DivisorClass {
    /// Coordinates in `Z^{1+t}`: the degree followed by the torsion part.
    pub fn vector(&self) -> Vec<i64> {
        let mut v = vec![self.degree];
        v.extend_from_slice(&self.torsion);
        v
    }
}

/// Deliberate corruption of the point table, for negative controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Every point appears twice.
    DuplicatePoints,
}

#[derive(Clone, Debug)]
struct PointTable {
    points: Vec<Place>,
    index: HashMap<Place, usize>,
    /// `add[i * n + j]` is the index of `points[i] + points[j]`.
    add: Vec<u32>,
    neg: Vec<u32>,
    /// Torsion coordinates of each point.
    coords: Vec<Vec<i64>>,
    /// Basis points, one per invariant factor.
    basis: Vec<usize>,
}

/// Picard data of a curve.
#[derive(Clone, Debug)]
pub struct PicardData {
    curve: Curve,
    torsion: AbelianGroup,
    table: Option<Arc<PointTable>>,
}

/// Elliptic chord-tangent addition on places `O` / `(x, y)`.
pub fn ec_add(curve: &Curve, p: &Place, q: &Place) -> Place {
    let k = curve.field();
    let cubic = curve.cubic().expect("elliptic curve");
    let (a2, a4) = (cubic.coeff(2), cubic.coeff(1));
    match (p, q) {
        (Place::Origin, _) => q.clone(),
        (_, Place::Origin) => p.clone(),
        (Place::Affine(x1, y1), Place::Affine(x2, y2)) => {
            let lambda = if x1 != x2 {
                k.div(k.sub(*y2, *y1), k.sub(*x2, *x1)).unwrap()
            } else if k.add(*y1, *y2).is_zero() {
                return Place::Origin;
            } else {
                let three = k.from_int(3);
                let two = k.from_int(2);
                let num = k.add(k.add(k.mul(three, k.mul(*x1, *x1)), k.mul(two, k.mul(a2, *x1))), a4);
                k.div(num, k.mul(two, *y1)).unwrap()
            };
            let x3 = k.sub(k.sub(k.sub(k.mul(lambda, lambda), a2), *x1), *x2);
            let y3 = k.sub(k.mul(lambda, k.sub(*x1, x3)), *y1);
            Place::Affine(x3, y3)
        }
        _ => panic!("not elliptic points: {p:?}, {q:?}"),
    }
}

pub fn ec_neg(curve: &Curve, p: &Place) -> Place {
    match p {
        Place::Affine(x, y) => Place::Affine(*x, curve.field().neg(*y)),
        _ => p.clone(),
    }
}

impl PicardData {
    pub fn new(curve: &Curve) -> Result<Self> {
        Self::build(curve, None)
    }

    /// Builds the data from a deliberately corrupted point table.
    #[doc(hidden)]
    pub fn with_fault(curve: &Curve, fault: Fault) -> Result<Self> {
        Self::build(curve, Some(fault))
    }

    fn build(curve: &Curve, fault: Option<Fault>) -> Result<Self> {
        if !curve.is_elliptic() {
            return Ok(PicardData { curve: curve.clone(), torsion: AbelianGroup::trivial(), table: None });
        }
        let q = curve.field().order();
        if q > MAX_ELLIPTIC_Q {
            return Err(Error::Unsupported(format!("point tables need q ≤ {MAX_ELLIPTIC_Q}, got {q}")));
        }
        let mut points = curve.rational_points();
        if fault == Some(Fault::DuplicatePoints) {
            points.extend(points.clone());
        }
        let n = points.len();
        let index: HashMap<Place, usize> = points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let mut add = vec![0u32; n * n];
        for i in 0..n {
            for j in i..n {
                let s = index[&ec_add(curve, &points[i], &points[j])] as u32;
                add[i * n + j] = s;
                add[j * n + i] = s;
            }
        }
        let neg = points.iter().map(|p| index[&ec_neg(curve, p)] as u32).collect();
        let mut table = PointTable { points, index, add, neg, coords: Vec::new(), basis: Vec::new() };
        let invariants = if fault.is_some() {
            // a corrupted table has no group structure to read off
            table.coords = vec![Vec::new(); n];
            vec![n as i64]
        } else {
            let (invariants, basis, coords) = table.structure();
            table.basis = basis;
            table.coords = coords;
            invariants
        };
        Ok(PicardData { curve: curve.clone(), torsion: AbelianGroup::from_invariants(invariants), table: Some(Arc::new(table)) })
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    /// The torsion group `T = Pic⁰(X)`.
    pub fn torsion(&self) -> &AbelianGroup {
        &self.torsion
    }

    /// Degree-one reference place (`∞` or `O`).
    pub fn base_place(&self) -> Place {
        self.curve.base_place()
    }

    /// Rational points in table order (elliptic curves only).
    pub fn points(&self) -> &[Place] {
        self.table.as_ref().map(|t| t.points.as_slice()).unwrap_or(&[])
    }

    /// Table sum of two rational points.
    pub fn point_add(&self, p: &Place, q: &Place) -> Result<Place> {
        let t = self.table.as_ref().ok_or_else(|| Error::Unsupported("the projective line has no point group".into()))?;
        let n = t.points.len();
        let i = t.index.get(p).ok_or_else(|| Error::InvalidPlace(format!("{p:?}")))?;
        let j = t.index.get(q).ok_or_else(|| Error::InvalidPlace(format!("{q:?}")))?;
        Ok(t.points[t.add[i * n + j] as usize].clone())
    }

    /// Basis points of `E(F_q)`, one per invariant factor.
    pub fn torsion_basis(&self) -> Vec<Place> {
        self.table.as_ref().map(|t| t.basis.iter().map(|&i| t.points[i].clone()).collect()).unwrap_or_default()
    }

    /// Torsion coordinates of `class(P − O)`.
    pub fn point_coords(&self, p: &Place) -> Result<Vec<i64>> {
        let t = self.table.as_ref().ok_or_else(|| Error::Unsupported("the projective line has no point group".into()))?;
        let i = t.index.get(p).ok_or_else(|| Error::InvalidPlace(format!("{} is not a rational point", p.format(self.curve.field()))))?;
        Ok(t.coords[*i].clone())
    }

    /// The point with the given torsion coordinates.
    pub fn point_of_coords(&self, c: &[i64]) -> Option<Place> {
        let t = self.table.as_ref()?;
        let mut c = c.to_vec();
        self.torsion.reduce(&mut c);
        t.coords.iter().position(|x| *x == c).map(|i| t.points[i].clone())
    }

    fn check_curve(&self, d: &Divisor) -> Result<()> {
        if d.curve() != &self.curve {
            return Err(Error::CurveMismatch(d.curve().to_string(), self.curve.to_string()));
        }
        Ok(())
    }

    pub fn class_of(&self, d: &Divisor) -> Result<DivisorClass> {
        self.check_curve(d)?;
        let mut torsion = self.torsion.identity();
        if self.table.is_some() {
            for (p, n) in d.terms() {
                let c = self.point_coords(p)?;
                torsion = self.torsion.add(&torsion, &self.torsion.scale(&c, n));
            }
        }
        Ok(DivisorClass { degree: d.degree(), torsion })
    }

    /// Class of a single place.
    pub fn class_of_place(&self, p: &Place) -> Result<DivisorClass> {
        self.class_of(&Divisor::place(&self.curve, p.clone(), 1)?)
    }

    pub fn is_principal(&self, d: &Divisor) -> Result<bool> {
        let c = self.class_of(d)?;
        Ok(c.degree == 0 && self.torsion.is_identity(&c.torsion))
    }

    /// A function `f` with `div(f) = D`, or `None` when `D` is not principal.
    pub fn principal_witness(&self, d: &Divisor) -> Result<Option<Function>> {
        if !self.is_principal(d)? {
            return Ok(None);
        }
        if !self.curve.is_elliptic() {
            return Ok(Some(p1_product(d)));
        }
        let (sum, h) = self.miller(d)?;
        if sum != Place::Origin {
            return Err(Error::Internal(format!("torsion coordinates vanish but the points of {d} sum to {sum:?}")));
        }
        Ok(Some(h))
    }

    /// `(S, h)` with `S = Σ n_P P` and `div(h) = D − deg(D)·O − (S − O)`.
    fn miller(&self, d: &Divisor) -> Result<(Place, Function)> {
        let c = &self.curve;
        let mut s = Place::Origin;
        let mut h = Function::one(c);
        for (p, n) in d.terms() {
            if *p == Place::Origin {
                continue;
            }
            let (step, extra) = if n > 0 {
                (p.clone(), None)
            } else {
                let Place::Affine(xp, _) = p else { unreachable!() };
                // −(P − O) = (−P − O) − div(x − x_P)
                (ec_neg(c, p), Some(Function::from_poly(c, Poly::linear(c.field(), *xp))))
            };
            for _ in 0..n.abs() {
                let (s2, ratio) = chord_step(c, &s, &step);
                h = &h * &ratio;
                if let Some(v) = &extra {
                    h = h.div(v)?;
                }
                s = s2;
            }
        }
        Ok((s, h))
    }

    /// `Pic(X) = Z^{1+t}/⟨t_i e_i⟩` as a quotient in class-vector coordinates.
    pub fn presentation(&self) -> Quotient {
        let t = self.torsion.rank();
        let rels = self
            .torsion
            .invariants()
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let mut r = vec![0; 1 + t];
                r[1 + i] = d;
                r
            })
            .collect();
        Quotient::new(1 + t, rels)
    }

    /// `Pic(X)/n·Pic(X) ≅ Z/n × T/nT`.
    pub fn pic_mod_n(&self, n: i64) -> Result<PicQuotient> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("n must be at least 2, got {n}")));
        }
        let ngens = 1 + self.torsion.rank();
        let extra: Vec<Vec<i64>> = (0..ngens)
            .map(|i| {
                let mut r = vec![0; ngens];
                r[i] = n;
                r
            })
            .collect();
        Ok(PicQuotient { quotient: self.presentation().with_relations(&extra) })
    }

    /// `Pic(X)/⟨class(P) : P removed⟩`, the class group of the affine
    /// complement.
    pub fn affine_class_group(&self, removed: &[Place]) -> Result<AffineClassGroup> {
        if removed.is_empty() {
            return Err(Error::InvalidArgument("at least one place must be removed".into()));
        }
        let mut rels = Vec::new();
        for p in removed {
            self.curve.validate_place(p)?;
            rels.push(self.class_of_place(p)?.vector());
        }
        let removed: BTreeSet<Place> = removed.iter().cloned().collect();
        Ok(AffineClassGroup {
            removed: removed.into_iter().collect(),
            quotient: PicQuotient { quotient: self.presentation().with_relations(&rels) },
        })
    }

    /// `| |E(F_q)| − (q + 1) | ≤ 2√q`; trivially true on the projective line.
    pub fn hasse_check(&self) -> bool {
        let Some(t) = &self.table else { return true };
        let q = self.curve.field().order() as i64;
        let dev = (t.points.len() as i64 - (q + 1)).abs();
        dev * dev <= 4 * q
    }

    /// Identity, inverses, commutativity and associativity of the table,
    /// exhaustive for at most 40 points and on a deterministic sample
    /// otherwise.
    pub fn group_axioms_check(&self) -> bool {
        let Some(t) = &self.table else { return true };
        let n = t.points.len();
        let add = |i: usize, j: usize| t.add[i * n + j] as usize;
        let Some(o) = t.index.get(&Place::Origin).copied() else { return false };
        if t.points.iter().filter(|p| **p == Place::Origin).count() != 1 {
            return false;
        }
        for i in 0..n {
            if add(o, i) != i || add(i, t.neg[i] as usize) != o {
                return false;
            }
            for j in 0..n {
                if add(i, j) != add(j, i) {
                    return false;
                }
            }
        }
        let sample: Vec<usize> = if n <= 40 { (0..n).collect() } else { (0..n).step_by(n / 40 + 1).collect() };
        for &i in &sample {
            for &j in &sample {
                for &k in &sample {
                    if add(add(i, j), k) != add(i, add(j, k)) {
                        return false;
                    }
                }
            }
        }
        // the coordinate map is a bijection onto the torsion group
        let distinct: BTreeSet<&Vec<i64>> = t.coords.iter().collect();
        distinct.len() == n && self.torsion.order() == Some(n as u64)
    }
}

impl PointTable {
    fn add(&self, i: usize, j: usize) -> usize {
        self.add[i * self.points.len() + j] as usize
    }

    fn mul(&self, i: usize, mut m: u64) -> usize {
        let mut acc = self.index[&Place::Origin];
        let mut b = i;
        while m > 0 {
            if m & 1 == 1 {
                acc = self.add(acc, b);
            }
            b = self.add(b, b);
            m >>= 1;
        }
        acc
    }

    fn order(&self, i: usize) -> u64 {
        let o = self.index[&Place::Origin];
        let mut acc = i;
        let mut k = 1;
        while acc != o {
            acc = self.add(acc, i);
            k += 1;
        }
        k
    }

    /// Invariants `[n1, n2]` (ones dropped), basis indices, and coordinates.
    fn structure(&self) -> (Vec<i64>, Vec<usize>, Vec<Vec<i64>>) {
        let n = self.points.len() as u64;
        let o = self.index[&Place::Origin];
        let orders: Vec<u64> = (0..self.points.len()).map(|i| self.order(i)).collect();
        let (g2, &n2) = orders.iter().enumerate().max_by_key(|(i, &e)| (e, std::cmp::Reverse(*i))).unwrap();
        let n1 = n / n2;
        let mut cyclic = vec![false; self.points.len()];
        let mut acc = o;
        for _ in 0..n2 {
            cyclic[acc] = true;
            acc = self.add(acc, g2);
        }
        let g1 = if n1 == 1 {
            o
        } else {
            (0..self.points.len())
                .find(|&r| {
                    orders[r] == n1 && {
                        let mut acc = r;
                        (1..n1).all(|_| {
                            let ok = !cyclic[acc];
                            acc = self.add(acc, r);
                            ok
                        })
                    }
                })
                .expect("a complement of a maximal cyclic subgroup exists")
        };
        let mut coords = vec![Vec::new(); self.points.len()];
        for a in 0..n1 {
            let base = self.mul(g1, a);
            let mut p = base;
            for b in 0..n2 {
                coords[p] = if n1 > 1 { vec![a as i64, b as i64] } else if n2 > 1 { vec![b as i64] } else { Vec::new() };
                p = self.add(p, g2);
            }
        }
        let mut invariants = Vec::new();
        let mut basis = Vec::new();
        if n1 > 1 {
            invariants.push(n1 as i64);
            basis.push(g1);
        }
        if n2 > 1 {
            invariants.push(n2 as i64);
            basis.push(g2);
        }
        (invariants, basis, coords)
    }
}

/// One step of Miller's chain: `S + P` and the function `l/v` with
/// `div(l/v) = (S) + (P) − (S + P) − (O)`.
fn chord_step(c: &Curve, s: &Place, p: &Place) -> (Place, Function) {
    let k = c.field();
    let sum = ec_add(c, s, p);
    let one = Function::one(c);
    let (Place::Affine(xs, ys), Place::Affine(xp, yp)) = (s, p) else {
        return (sum, one);
    };
    let x = Function::x(c);
    let vertical = |a: Fe| &x - &Function::constant(c, a);
    if sum == Place::Origin {
        return (sum, vertical(*xp));
    }
    let Place::Affine(x3, _) = sum else { unreachable!() };
    let lambda = if xs != xp {
        k.div(k.sub(*yp, *ys), k.sub(*xp, *xs)).unwrap()
    } else {
        let cubic = c.cubic().unwrap();
        k.div(cubic.derivative().eval(*xs), k.add(*ys, *ys)).unwrap()
    };
    // l = y − y_S − λ(x − x_S)
    let y = Function::y(c).unwrap();
    let l = &(&y - &Function::constant(c, *ys)) - &vertical(*xs).scale(lambda);
    (sum, l.div(&vertical(x3)).unwrap())
}

/// A finite quotient of `Pic(X)` with its projection from divisor classes.
#[derive(Clone, Debug)]
pub struct PicQuotient {
    quotient: Quotient,
}

impl PicQuotient {
    pub fn group(&self) -> &AbelianGroup {
        self.quotient.group()
    }

    pub fn project(&self, c: &DivisorClass) -> Vec<i64> {
        self.quotient.project(&c.vector())
    }

    /// Further quotient by the given classes.
    pub fn quotient_by(&self, classes: &[DivisorClass]) -> PicQuotient {
        let rels: Vec<Vec<i64>> = classes.iter().map(|c| c.vector()).collect();
        PicQuotient { quotient: self.quotient.with_relations(&rels) }
    }

    pub fn order(&self) -> Option<u64> {
        self.group().order()
    }
}

/// Class group of `X` minus finitely many places.
#[derive(Clone, Debug)]
pub struct AffineClassGroup {
    pub removed: Vec<Place>,
    pub quotient: PicQuotient,
}

impl AffineClassGroup {
    pub fn group(&self) -> &AbelianGroup {
        self.quotient.group()
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.torsion.iter().map(|c| c.to_string()).collect();
        write!(f, "(deg {}; {})", self.degree, if t.is_empty() { "0".into() } else { t.join(",") })
    }
}
