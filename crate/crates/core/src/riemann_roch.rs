//! Riemann–Roch spaces `L(B) = {f : div(f) + B ≥ 0} ∪ {0}`.
//!
//! Every `f ∈ L(B)` has the shape `(a + b·y)/d` for a denominator `d` fixed
//! by the positive part of `B`, with degree bounds on `a`, `b` forced by the
//! pole order allowed at the base place. The solver writes down this finite
//! ansatz, imposes `v_P(f) ≥ −n_P` as linear conditions on local expansion
//! coefficients, and returns the kernel.

use std::collections::BTreeSet;

use crate::curve::{Curve, CurveKind, Place};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::function::Function;
use crate::linalg;
use crate::picard::ec_add;
use crate::poly::Poly;
use crate::series::expand_all_until;

/// Candidate functions `x^i/d` (`i ≤ max_deg_a`) and `x^i·y/d`
/// (`i ≤ max_deg_b`); a negative bound means no such terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnsatzPool {
    pub denominator: Poly,
    pub max_deg_a: i64,
    pub max_deg_b: i64,
}

impl AnsatzPool {
    /// A pool containing `L(B)`.
    pub fn for_divisor(b: &Divisor) -> Self {
        let curve = b.curve();
        let k = curve.field();
        let base = b.coeff(&curve.base_place());
        match curve.kind() {
            CurveKind::ProjectiveLine => {
                let mut den = Poly::one(k);
                for (p, n) in b.terms() {
                    if let (Place::Finite(u), true) = (p, n > 0) {
                        den = &den * &u.pow(n as u32);
                    }
                }
                let max_deg_a = den.deg() + base.max(0);
                AnsatzPool { denominator: den, max_deg_a, max_deg_b: -1 }
            }
            CurveKind::Elliptic { .. } => {
                // exponent of (x − α): enough to clear the allowed pole at
                // every point above α; v_P(x − α) = 2 at 2-torsion points
                let mut exps: std::collections::BTreeMap<Fe, i64> = Default::default();
                for (p, n) in b.terms() {
                    if let (Place::Affine(a, y), true) = (p, n > 0) {
                        let need = if y.is_zero() { (n + 1) / 2 } else { n };
                        let e = exps.entry(*a).or_insert(0);
                        *e = (*e).max(need);
                    }
                }
                let mut den = Poly::one(k);
                for (a, e) in &exps {
                    den = &den * &Poly::linear(k, *a).pow(*e as u32);
                }
                // v_O(a/d) = 2 deg d − 2 deg a,  v_O(b y/d) = 2 deg d − 2 deg b − 3
                let room = base + 2 * den.deg();
                AnsatzPool { denominator: den, max_deg_a: room.div_euclid(2), max_deg_b: (room - 3).div_euclid(2) }
            }
        }
    }

    pub fn enlarged(&self) -> Self {
        let b = if self.max_deg_b >= 0 { self.max_deg_b + 1 } else { self.max_deg_b };
        AnsatzPool { denominator: self.denominator.clone(), max_deg_a: self.max_deg_a + 1, max_deg_b: b }
    }

    pub fn size(&self) -> usize {
        (self.max_deg_a + 1).max(0) as usize + (self.max_deg_b + 1).max(0) as usize
    }

    /// Numerators `(a, b)` of the candidates, `a`-terms first.
    fn numerators(&self) -> Vec<(Poly, Poly)> {
        let k = self.denominator.field();
        let zero = Poly::zero(k);
        let mut out = Vec::new();
        for i in 0..=self.max_deg_a {
            out.push((Poly::monomial(k, Fe::ONE, i as usize), zero.clone()));
        }
        for i in 0..=self.max_deg_b {
            out.push((zero.clone(), Poly::monomial(k, Fe::ONE, i as usize)));
        }
        out
    }
}

/// The kernel of the valuation conditions on `pool`, as numerator pairs over
/// the pool denominator. Exposed for cross-checks; [`rr_space`] is the
/// checked entry point.
pub fn rr_kernel_solver(b: &Divisor, pool: &AnsatzPool) -> Result<Vec<(Poly, Poly)>> {
    let curve = b.curve();
    let k = curve.field();
    let nums = pool.numerators();
    if nums.is_empty() {
        return Ok(Vec::new());
    }
    let den = &pool.denominator;
    let funcs: Vec<Function> = nums
        .iter()
        .map(|(a, bb)| Function::from_parts(curve, a.clone(), bb.clone(), den.clone()))
        .collect::<Result<_>>()?;

    let mut places: BTreeSet<Place> = b.support().cloned().collect();
    places.insert(curve.base_place());
    for (g, _) in den.factor().factors {
        match curve.kind() {
            CurveKind::ProjectiveLine => {
                places.insert(Place::Finite(g));
            }
            CurveKind::Elliptic { cubic } => {
                let a = k.neg(g.coeff(0));
                let Some(y) = k.sqrt(cubic.eval(a)) else {
                    return Err(Error::Internal("pool denominator has a non-rational root".into()));
                };
                places.insert(Place::Affine(a, y));
                places.insert(Place::Affine(a, k.neg(y)));
            }
        }
    }

    let mut rows: Vec<Vec<Fe>> = Vec::new();
    for p in &places {
        let until = -b.coeff(p);
        let lowest = funcs.iter().filter_map(|f| f.valuation(p)).min().unwrap_or(until);
        if lowest >= until {
            continue;
        }
        let exps = expand_all_until(&funcs, p, until)?;
        let width = p.degree().max(1) as usize;
        for e in lowest..until {
            for digit in 0..width {
                let row: Vec<Fe> = exps.iter().map(|x| x.coeff_at(e, k).coeff(digit)).collect();
                if row.iter().any(|c| !c.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let kernel = linalg::nullspace(k, &rows, nums.len());
    Ok(kernel
        .into_iter()
        .map(|v| {
            let mut a = Poly::zero(k);
            let mut bb = Poly::zero(k);
            for (c, (na, nb)) in v.iter().zip(&nums) {
                if !c.is_zero() {
                    a = &a + &na.scale(*c);
                    bb = &bb + &nb.scale(*c);
                }
            }
            (a, bb)
        })
        .collect())
}

/// `Σ n_P·P` under the group law (elliptic curves).
pub fn point_sum(b: &Divisor) -> Place {
    let c = b.curve();
    let mut s = Place::Origin;
    for (p, n) in b.terms() {
        let base = if n < 0 { crate::picard::ec_neg(c, p) } else { p.clone() };
        for _ in 0..n.abs() {
            s = ec_add(c, &s, &base);
        }
    }
    s
}

/// `ℓ(B)` in closed form.
pub fn rr_dim(b: &Divisor) -> Result<usize> {
    let d = b.degree();
    Ok(match b.curve().kind() {
        CurveKind::ProjectiveLine => (d + 1).max(0) as usize,
        CurveKind::Elliptic { .. } => {
            if d >= 1 {
                d as usize
            } else if d == 0 {
                usize::from(point_sum(b) == Place::Origin)
            } else {
                0
            }
        }
    })
}

/// A Riemann–Roch space with an explicit basis.
#[derive(Clone, Debug)]
pub struct RRSpace {
    divisor: Divisor,
    denominator: Poly,
    numerators: Vec<(Poly, Poly)>,
    basis: Vec<Function>,
}

impl RRSpace {
    pub fn curve(&self) -> &Curve {
        self.divisor.curve()
    }

    pub fn divisor(&self) -> &Divisor {
        &self.divisor
    }

    pub fn basis(&self) -> &[Function] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Membership by exact valuations.
    pub fn contains(&self, f: &Function) -> bool {
        in_space(f, &self.divisor)
    }

    /// Coordinates of `f` in the basis, or `None` when `f ∉ L(B)`.
    pub fn coordinates(&self, f: &Function) -> Option<Vec<Fe>> {
        let k = self.curve().field();
        if f.is_zero() {
            return Some(vec![Fe::ZERO; self.dim()]);
        }
        let g = f * &Function::from_poly(self.curve(), self.denominator.clone());
        if !g.den().is_one() {
            return None;
        }
        let width = self.numerators.iter().map(|(a, b)| a.coeffs().len().max(b.coeffs().len())).max().unwrap_or(0);
        let width = width.max(g.num_a().coeffs().len()).max(g.num_b().coeffs().len());
        let flat = |a: &Poly, b: &Poly| -> Vec<Fe> { (0..width).map(|i| a.coeff(i)).chain((0..width).map(|i| b.coeff(i))).collect() };
        let cols: Vec<Vec<Fe>> = self.numerators.iter().map(|(a, b)| flat(a, b)).collect();
        let target = flat(g.num_a(), g.num_b());
        if cols.is_empty() {
            return None;
        }
        linalg::solve(k, &cols, &target)
    }

    /// `Σ c_i f_i`.
    pub fn combine(&self, coords: &[Fe]) -> Function {
        let mut acc = Function::zero(self.curve());
        for (c, f) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                acc = &acc + &f.scale(*c);
            }
        }
        acc
    }
}

/// `div(f) + B ≥ 0`, checked with exact valuations independently of the
/// expansion-based solver.
pub fn in_space(f: &Function, b: &Divisor) -> bool {
    if f.is_zero() {
        return true;
    }
    let curve = f.curve();
    let k = curve.field();
    let mut places: BTreeSet<Place> = b.support().cloned().collect();
    places.insert(curve.base_place());
    for (g, _) in f.den().factor().factors {
        match curve.kind() {
            CurveKind::ProjectiveLine => {
                places.insert(Place::Finite(g));
            }
            CurveKind::Elliptic { cubic } => {
                // a pole above a non-rational place can never be allowed
                if g.deg() > 1 {
                    return false;
                }
                let a = k.neg(g.coeff(0));
                let Some(y) = k.sqrt(cubic.eval(a)) else { return false };
                places.insert(Place::Affine(a, y));
                places.insert(Place::Affine(a, k.neg(y)));
            }
        }
    }
    places.iter().all(|p| f.valuation(p).expect("nonzero") >= -b.coeff(p))
}

/// `L(B)` with a basis, verified against the closed-form dimension and by
/// an independent effectivity check of every basis element.
pub fn rr_space(b: &Divisor) -> Result<RRSpace> {
    let curve = b.curve();
    let expected = rr_dim(b)?;
    let mut pool = AnsatzPool::for_divisor(b);
    for _ in 0..4 {
        let kernel = rr_kernel_solver(b, &pool)?;
        if kernel.len() < expected {
            pool = pool.enlarged();
            continue;
        }
        if kernel.len() > expected {
            return Err(Error::Internal(format!("L({b}) solved to dimension {} > {expected}", kernel.len())));
        }
        let basis: Vec<Function> = kernel
            .iter()
            .map(|(a, bb)| Function::from_parts(curve, a.clone(), bb.clone(), pool.denominator.clone()))
            .collect::<Result<_>>()?;
        for f in &basis {
            if !in_space(f, b) {
                return Err(Error::Internal(format!("basis element {f} of L({b}) fails div(f) + B ≥ 0")));
            }
        }
        return Ok(RRSpace { divisor: b.clone(), denominator: pool.denominator, numerators: kernel, basis });
    }
    Err(Error::Internal(format!("ansatz pool for L({b}) stayed below dimension {expected}")))
}
