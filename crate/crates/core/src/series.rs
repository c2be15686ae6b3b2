//! Local expansions of functions at places.
//!
//! Rational places use truncated Laurent series in a uniformizer: `x - a` or
//! `1/x` on the projective line, and on an elliptic curve `x - a` at ordinary
//! affine points, `y` at 2-torsion points and `x/y` at `O`. Places of the
//! projective line of higher degree use `u`-adic digit expansions with digits
//! of degree below `deg u`.

use crate::curve::{Curve, CurveKind, Place};
use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};
use crate::function::Function;
use crate::poly::Poly;

const EXACT: i64 = 1 << 60;

/// Truncated Laurent series. Coefficients of `t^e` are known for `e < prec`;
/// stored coefficients start at `t^val`, and known coefficients past the
/// stored ones are zero.
#[derive(Clone, Debug)]
pub(crate) struct Laurent {
    val: i64,
    coeffs: Vec<Fe>,
    prec: i64,
}

impl Laurent {
    fn exact(val: i64, coeffs: Vec<Fe>) -> Self {
        Laurent { val, coeffs, prec: EXACT }
    }

    fn constant(c: Fe) -> Self {
        Self::exact(0, vec![c])
    }

    fn truncated(val: i64, coeffs: Vec<Fe>) -> Self {
        let prec = val + coeffs.len() as i64;
        Laurent { val, coeffs, prec }
    }

    /// Coefficient of `t^e`; `e` must be below `prec`.
    pub(crate) fn at(&self, e: i64) -> Fe {
        debug_assert!(e < self.prec, "coefficient {e} beyond precision {}", self.prec);
        if e < self.val {
            return Fe::ZERO;
        }
        self.coeffs.get((e - self.val) as usize).copied().unwrap_or(Fe::ZERO)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(self.coeffs.len());
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.val += lead as i64;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() && self.prec < EXACT {
            self.val = self.prec;
        }
    }

    /// Leading exponent and coefficient, when determined by the known terms.
    fn leading(&self) -> Option<(i64, Fe)> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|i| (self.val + i as i64, self.coeffs[i]))
    }

    fn add(&self, k: &FiniteField, o: &Laurent) -> Laurent {
        let val = self.val.min(o.val);
        let prec = self.prec.min(o.prec);
        let top = (self.val + self.coeffs.len() as i64).max(o.val + o.coeffs.len() as i64).min(prec);
        let coeffs = (val..top.max(val))
            .map(|e| {
                let a = if e < self.prec { self.at(e) } else { Fe::ZERO };
                let b = if e < o.prec { o.at(e) } else { Fe::ZERO };
                k.add(a, b)
            })
            .collect();
        Laurent { val, coeffs, prec }
    }

    fn mul(&self, k: &FiniteField, o: &Laurent) -> Laurent {
        let val = self.val + o.val;
        let prec = (self.val + o.prec).min(o.val + self.prec).min(EXACT);
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Laurent { val, coeffs: Vec::new(), prec };
        }
        let len = ((self.coeffs.len() + o.coeffs.len() - 1) as i64).min(prec - val).max(0) as usize;
        let mut coeffs = vec![Fe::ZERO; len];
        for (i, &a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] = k.add(coeffs[i + j], k.mul(a, b));
            }
        }
        Laurent { val, coeffs, prec }
    }

    /// Inverse with at most `cap` known terms past the leading one.
    fn inv(&self, k: &FiniteField, cap: i64) -> Result<Laurent> {
        let mut s = self.clone();
        s.normalize();
        if s.coeffs.is_empty() {
            return Err(if s.prec >= EXACT {
                Error::DivisionByZero
            } else {
                Error::PrecisionExhausted(cap.max(0) as usize)
            });
        }
        let rel = (s.prec - s.val).min(cap).max(1);
        let a0inv = k.inv(s.coeffs[0])?;
        let mut c: Vec<Fe> = Vec::with_capacity(rel as usize);
        c.push(a0inv);
        for n in 1..rel as usize {
            let mut acc = Fe::ZERO;
            for i in 1..=n.min(s.coeffs.len() - 1) {
                acc = k.add(acc, k.mul(s.coeffs[i], c[n - i]));
            }
            c.push(k.neg(k.mul(acc, a0inv)));
        }
        Ok(Laurent { val: -s.val, coeffs: c, prec: -s.val + rel })
    }

    fn eval_poly(k: &FiniteField, p: &Poly, x: &Laurent) -> Laurent {
        let mut acc = Laurent::exact(0, Vec::new());
        for &c in p.coeffs().iter().rev() {
            acc = acc.mul(k, x).add(k, &Laurent::constant(c));
        }
        acc
    }
}

/// `x(t)` and, on elliptic curves, `y(t)` at a rational place.
struct PlaceParam {
    x: Laurent,
    y: Option<Laurent>,
}

fn place_param(curve: &Curve, place: &Place, work: i64) -> Result<PlaceParam> {
    let k = curve.field();
    match (curve.kind(), place) {
        (CurveKind::ProjectiveLine, Place::Finite(u)) if u.deg() == 1 => {
            let a = k.neg(u.coeff(0));
            Ok(PlaceParam { x: Laurent::exact(0, vec![a, Fe::ONE]), y: None })
        }
        (CurveKind::ProjectiveLine, Place::Infinity) => Ok(PlaceParam { x: Laurent::exact(-1, vec![Fe::ONE]), y: None }),
        (CurveKind::Elliptic { cubic }, Place::Origin) => {
            // s = x/y, w = 1/y:  w = s^3 + a2 s^2 w + a4 s w^2 + a6 w^3
            let (a6, a4, a2) = (cubic.coeff(0), cubic.coeff(1), cubic.coeff(2));
            let n = (work + 8).max(8);
            let s = Laurent::exact(1, vec![Fe::ONE]);
            let s2 = s.mul(k, &s);
            let s3 = s2.mul(k, &s);
            let mut w = Laurent { val: 3, coeffs: vec![Fe::ONE], prec: n };
            for _ in 0..n {
                let w2 = w.mul(k, &w);
                let w3 = w2.mul(k, &w);
                let mut next = s3.clone();
                next = next.add(k, &s2.mul(k, &w).mul(k, &Laurent::constant(a2)));
                next = next.add(k, &s.mul(k, &w2).mul(k, &Laurent::constant(a4)));
                next = next.add(k, &w3.mul(k, &Laurent::constant(a6)));
                next.prec = next.prec.min(n);
                next.coeffs.truncate((next.prec - next.val).max(0) as usize);
                w = next;
            }
            w.prec = n;
            let winv = w.inv(k, n)?;
            let x = s.mul(k, &winv);
            Ok(PlaceParam { x, y: Some(winv) })
        }
        (CurveKind::Elliptic { cubic }, Place::Affine(alpha, beta)) if !beta.is_zero() => {
            // y^2 = F(t) = f(alpha + t), y(0) = beta
            let fs = cubic.taylor_shift(*alpha);
            let n = work.max(1) as usize;
            let two_beta_inv = k.inv(k.add(*beta, *beta))?;
            let mut y = vec![*beta];
            for m in 1..n {
                let mut acc = fs.coeff(m);
                for i in 1..m {
                    acc = k.sub(acc, k.mul(y[i], y[m - i]));
                }
                y.push(k.mul(acc, two_beta_inv));
            }
            Ok(PlaceParam { x: Laurent::exact(0, vec![*alpha, Fe::ONE]), y: Some(Laurent::truncated(0, y)) })
        }
        (CurveKind::Elliptic { cubic }, Place::Affine(alpha, _)) => {
            // t = y, x = alpha + s, c1 s + c2 s^2 + s^3 = t^2
            let fs = cubic.taylor_shift(*alpha);
            let (c1, c2) = (fs.coeff(1), fs.coeff(2));
            let c1inv = k.inv(c1)?;
            let n = (work + 4).max(4);
            let t2 = Laurent { val: 2, coeffs: vec![Fe::ONE], prec: n };
            let mut s = t2.mul(k, &Laurent::constant(c1inv));
            for _ in 0..n {
                let s2 = s.mul(k, &s);
                let s3 = s2.mul(k, &s);
                let rhs = t2
                    .add(k, &s2.mul(k, &Laurent::constant(k.neg(c2))))
                    .add(k, &s3.mul(k, &Laurent::constant(k.neg(Fe::ONE))));
                let mut next = rhs.mul(k, &Laurent::constant(c1inv));
                next.prec = next.prec.min(n);
                next.coeffs.truncate((next.prec - next.val).max(0) as usize);
                s = next;
            }
            let x = s.add(k, &Laurent::constant(*alpha));
            Ok(PlaceParam { x, y: Some(Laurent::exact(1, vec![Fe::ONE])) })
        }
        _ => Err(Error::InvalidPlace(format!("{} has no series parameterization on {}", place.format(k), curve))),
    }
}

fn series_from_param(f: &Function, param: &PlaceParam, work: i64) -> Result<Laurent> {
    let k = f.curve().field();
    let mut num = Laurent::eval_poly(k, f.num_a(), &param.x);
    if !f.num_b().is_zero() {
        let y = param.y.as_ref().expect("elliptic parameterization");
        num = num.add(k, &Laurent::eval_poly(k, f.num_b(), &param.x).mul(k, y));
    }
    let den = Laurent::eval_poly(k, f.den(), &param.x);
    let dinv = den.inv(k, work)?;
    Ok(num.mul(k, &dinv))
}

/// Expansion of a function at a place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalExpansion {
    pub place: Place,
    /// The uniformizer, as text: `x - a`, `1/x`, `y`, `x/y`, or `u(x)`.
    pub uniformizer: String,
    /// Leading valuation; `None` for the zero function.
    pub valuation: Option<i64>,
    /// Coefficients of `t^valuation, t^(valuation+1), …`. For places of
    /// degree above one these are residue digits of degree `< deg u`.
    pub coefficients: Vec<Poly>,
}

impl LocalExpansion {
    /// Coefficient at absolute exponent `e`; zero below the valuation.
    pub fn coeff_at(&self, e: i64, field: &FiniteField) -> Poly {
        match self.valuation {
            Some(v) if e >= v => self.coefficients.get((e - v) as usize).cloned().unwrap_or_else(|| Poly::zero(field)),
            _ => Poly::zero(field),
        }
    }

    /// Exponent one past the last known coefficient.
    pub fn known_until(&self) -> Option<i64> {
        self.valuation.map(|v| v + self.coefficients.len() as i64)
    }
}

pub fn uniformizer_name(curve: &Curve, place: &Place) -> String {
    let k = curve.field();
    match place {
        Place::Finite(u) => u.to_string(),
        Place::Infinity => "1/x".into(),
        Place::Origin => "x/y".into(),
        Place::Affine(a, b) if b.is_zero() => {
            let _ = a;
            "y".into()
        }
        Place::Affine(a, _) => format!("x - {}", k.format_atom(*a)),
    }
}

fn u_adic_digits(f: &Function, u: &Poly, count: usize) -> Result<(i64, Vec<Poly>)> {
    let (a, d) = (f.num_a(), f.den());
    let ma = a.multiplicity(u);
    let md = d.multiplicity(u);
    let a1 = a.exact_div(&u.pow(ma))?;
    let d1 = d.exact_div(&u.pow(md))?;
    let modulus = u.pow(count as u32);
    let mut g = a1.mul_mod(&d1.inv_mod(&modulus)?, &modulus);
    let mut digits = Vec::with_capacity(count);
    for _ in 0..count {
        let (q, r) = g.divmod(u)?;
        digits.push(r);
        g = q;
    }
    Ok((ma as i64 - md as i64, digits))
}

/// `precision` coefficients starting at the leading term, computing with
/// `work` terms of working precision. Fails with
/// [`Error::PrecisionExhausted`] when that is not enough.
pub fn expand_with_work(f: &Function, place: &Place, precision: usize, work: i64) -> Result<LocalExpansion> {
    let curve = f.curve();
    let k = curve.field();
    if precision == 0 {
        return Err(Error::InvalidArgument("precision must be at least 1".into()));
    }
    let uniformizer = uniformizer_name(curve, place);
    if f.is_zero() {
        return Ok(LocalExpansion { place: place.clone(), uniformizer, valuation: None, coefficients: Vec::new() });
    }
    if let Place::Finite(u) = place {
        if u.deg() > 1 {
            let (v, digits) = u_adic_digits(f, u, precision)?;
            return Ok(LocalExpansion { place: place.clone(), uniformizer, valuation: Some(v), coefficients: digits });
        }
    }
    let param = place_param(curve, place, work)?;
    let mut s = series_from_param(f, &param, work)?;
    s.normalize();
    let Some((v, _)) = s.leading() else {
        return Err(Error::PrecisionExhausted(work as usize));
    };
    if s.prec - v < precision as i64 {
        return Err(Error::PrecisionExhausted(work as usize));
    }
    let coefficients = (v..v + precision as i64).map(|e| Poly::constant(k, s.at(e))).collect();
    Ok(LocalExpansion { place: place.clone(), uniformizer, valuation: Some(v), coefficients })
}

/// Expansion to `precision` terms past the leading one, retrying with doubled
/// working precision when truncation hides the leading term.
pub fn local_expand(f: &Function, place: &Place, precision: usize) -> Result<LocalExpansion> {
    f.curve().validate_place(place)?;
    let mut work = precision as i64 + 8;
    for _ in 0..12 {
        match expand_with_work(f, place, precision, work) {
            Err(Error::PrecisionExhausted(_)) => work *= 2,
            other => return other,
        }
    }
    Err(Error::PrecisionExhausted(work as usize))
}

/// Expansions of several functions at one place, all known for exponents
/// below `until`.
pub(crate) fn expand_all_until(funcs: &[Function], place: &Place, until: i64) -> Result<Vec<LocalExpansion>> {
    let Some(first) = funcs.first() else { return Ok(Vec::new()) };
    let curve = first.curve();
    let k = curve.field();
    let uniformizer = uniformizer_name(curve, place);
    if let Place::Finite(u) = place {
        if u.deg() > 1 {
            return funcs
                .iter()
                .map(|f| {
                    if f.is_zero() {
                        return Ok(LocalExpansion { place: place.clone(), uniformizer: uniformizer.clone(), valuation: None, coefficients: Vec::new() });
                    }
                    let v = f.valuation(place).expect("nonzero");
                    let count = (until - v).max(1) as usize;
                    let (v, digits) = u_adic_digits(f, u, count)?;
                    Ok(LocalExpansion { place: place.clone(), uniformizer: uniformizer.clone(), valuation: Some(v), coefficients: digits })
                })
                .collect();
        }
    }
    let lowest = funcs.iter().filter_map(|f| f.valuation(place)).min().unwrap_or(0);
    let mut work = (until - lowest).max(1) + 8;
    'retry: for _ in 0..12 {
        let param = place_param(curve, place, work)?;
        let mut out = Vec::with_capacity(funcs.len());
        for f in funcs {
            if f.is_zero() {
                out.push(LocalExpansion { place: place.clone(), uniformizer: uniformizer.clone(), valuation: None, coefficients: Vec::new() });
                continue;
            }
            let s = match series_from_param(f, &param, work) {
                Ok(s) => s,
                Err(Error::PrecisionExhausted(_)) => {
                    work *= 2;
                    continue 'retry;
                }
                Err(e) => return Err(e),
            };
            let v = f.valuation(place).expect("nonzero");
            if s.prec < until.max(v + 1) {
                work *= 2;
                continue 'retry;
            }
            if !s.at(v).is_zero() && (s.val..v).all(|e| s.at(e).is_zero()) {
                let coefficients = (v..until.max(v + 1)).map(|e| Poly::constant(k, s.at(e))).collect();
                out.push(LocalExpansion { place: place.clone(), uniformizer: uniformizer.clone(), valuation: Some(v), coefficients });
            } else {
                return Err(Error::Internal(format!(
                    "series at {} disagrees with exact valuation {v} for {f}",
                    place.format(k)
                )));
            }
        }
        return Ok(out);
    }
    Err(Error::PrecisionExhausted(work as usize))
}
