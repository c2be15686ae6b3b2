//! Rational functions on a [`Curve`] in canonical form.
//!
//! Every element is stored as `(a(x) + b(x)·y) / d(x)` with `d` monic and
//! `gcd(a, b, d) = 1`; on the projective line `b` is always zero. The form is
//! unique, so structural equality is equality of functions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::curve::{Curve, CurveKind, Place};
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::poly::Poly;

#[derive(Clone, PartialEq, Eq)]
pub struct Function {
    curve: Curve,
    a: Poly,
    b: Poly,
    d: Poly,
}

impl Function {
    /// Builds and canonicalises `(a + b·y)/d`.
    pub fn from_parts(curve: &Curve, a: Poly, b: Poly, d: Poly) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if !curve.is_elliptic() && !b.is_zero() {
            return Err(Error::InvalidArgument("y is not defined on the projective line".into()));
        }
        Ok(Self::canonical(curve, a, b, d))
    }

    fn canonical(curve: &Curve, a: Poly, b: Poly, d: Poly) -> Self {
        let k = curve.field();
        if a.is_zero() && b.is_zero() {
            return Self::zero(curve);
        }
        let g = a.gcd(&b).gcd(&d);
        let (a, b, d) = if g.is_one() {
            (a, b, d)
        } else {
            (a.exact_div(&g).unwrap(), b.exact_div(&g).unwrap(), d.exact_div(&g).unwrap())
        };
        let c = k.inv(d.lead()).expect("nonzero denominator");
        Function { curve: curve.clone(), a: a.scale(c), b: b.scale(c), d: d.scale(c) }
    }

    pub fn zero(curve: &Curve) -> Self {
        let k = curve.field();
        Function { curve: curve.clone(), a: Poly::zero(k), b: Poly::zero(k), d: Poly::one(k) }
    }

    pub fn one(curve: &Curve) -> Self {
        Self::constant(curve, Fe::ONE)
    }

    pub fn constant(curve: &Curve, c: Fe) -> Self {
        Self::from_poly(curve, Poly::constant(curve.field(), c))
    }

    pub fn from_poly(curve: &Curve, p: Poly) -> Self {
        let k = curve.field();
        Function { curve: curve.clone(), a: p, b: Poly::zero(k), d: Poly::one(k) }
    }

    pub fn x(curve: &Curve) -> Self {
        Self::from_poly(curve, Poly::x(curve.field()))
    }

    pub fn y(curve: &Curve) -> Result<Self> {
        let k = curve.field();
        if !curve.is_elliptic() {
            return Err(Error::InvalidArgument("y is not defined on the projective line".into()));
        }
        Ok(Function { curve: curve.clone(), a: Poly::zero(k), b: Poly::one(k), d: Poly::one(k) })
    }

    /// `num/den` on the projective line (or an `x`-only function elsewhere).
    pub fn fraction(curve: &Curve, num: Poly, den: Poly) -> Result<Self> {
        let k = curve.field().clone();
        Self::from_parts(curve, num, Poly::zero(&k), den)
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    /// The `x`-part `a` of the numerator.
    pub fn num_a(&self) -> &Poly {
        &self.a
    }

    /// The `y`-coefficient `b` of the numerator.
    pub fn num_b(&self) -> &Poly {
        &self.b
    }

    pub fn den(&self) -> &Poly {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn as_constant(&self) -> Option<Fe> {
        (self.b.is_zero() && self.a.is_constant() && self.d.is_one()).then(|| self.a.coeff(0))
    }

    fn cubic(&self) -> Option<&Poly> {
        self.curve.cubic()
    }

    /// `a^2 - b^2 f`, the norm of the numerator down to `F_q(x)`.
    pub fn numerator_norm(&self) -> Poly {
        match self.cubic() {
            None => self.a.clone(),
            Some(f) => &(&self.a * &self.a) - &(&(&self.b * &self.b) * f),
        }
    }

    pub fn scale(&self, c: Fe) -> Function {
        Self::canonical(&self.curve, self.a.scale(c), self.b.scale(c), self.d.clone())
    }

    pub fn inv(&self) -> Result<Function> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.cubic().is_none() {
            return Ok(Self::canonical(&self.curve, self.d.clone(), self.b.clone(), self.a.clone()));
        }
        // d / (a + b y) = d (a - b y) / (a^2 - b^2 f)
        let norm = self.numerator_norm();
        let a = &self.d * &self.a;
        let b = -&(&self.d * &self.b);
        Ok(Self::canonical(&self.curve, a, b, norm))
    }

    pub fn div(&self, other: &Function) -> Result<Function> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Function> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Function::one(&self.curve);
        let mut b = base;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &b;
            }
            n >>= 1;
            if n > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// Valuation at `place`, `None` for the zero function. The place must
    /// belong to this function's curve.
    pub fn valuation(&self, place: &Place) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let v = match (self.curve.kind(), place) {
            (CurveKind::ProjectiveLine, Place::Finite(u)) => {
                self.a.multiplicity(u) as i64 - self.d.multiplicity(u) as i64
            }
            (CurveKind::ProjectiveLine, Place::Infinity) => self.d.deg() - self.a.deg(),
            (CurveKind::Elliptic { .. }, Place::Origin) => {
                let mut vnum = i64::MAX;
                if !self.a.is_zero() {
                    vnum = vnum.min(-2 * self.a.deg());
                }
                if !self.b.is_zero() {
                    vnum = vnum.min(-2 * self.b.deg() - 3);
                }
                vnum + 2 * self.d.deg()
            }
            (CurveKind::Elliptic { cubic }, Place::Affine(alpha, beta)) => {
                let ord = |p: &Poly| p.ord_at(*alpha) as i64;
                if beta.is_zero() {
                    // uniformizer y, v(x - alpha) = 2
                    let mut vnum = i64::MAX;
                    if !self.a.is_zero() {
                        vnum = vnum.min(2 * ord(&self.a));
                    }
                    if !self.b.is_zero() {
                        vnum = vnum.min(2 * ord(&self.b) + 1);
                    }
                    vnum - 2 * ord(&self.d)
                } else {
                    let vnum = affine_numerator_valuation(cubic, &self.a, &self.b, *alpha, *beta);
                    vnum - ord(&self.d)
                }
            }
            _ => panic!("place {place:?} does not belong to {}", self.curve),
        };
        Some(v)
    }

    /// [`valuation`](Self::valuation) with the place checked against the curve.
    pub fn checked_valuation(&self, place: &Place) -> Result<Option<i64>> {
        self.curve.validate_place(place)?;
        Ok(self.valuation(place))
    }

    /// Value at a place where the function is regular.
    pub fn evaluate(&self, place: &Place) -> Result<Fe> {
        let k = self.curve.field();
        match self.valuation(place) {
            None => Ok(Fe::ZERO),
            Some(v) if v > 0 => Ok(Fe::ZERO),
            Some(v) if v < 0 => Err(Error::DivisionByZero),
            _ => match place {
                Place::Affine(alpha, beta) => {
                    let dv = self.d.eval(*alpha);
                    if !dv.is_zero() {
                        let n = k.add(self.a.eval(*alpha), k.mul(self.b.eval(*alpha), *beta));
                        return k.div(n, dv);
                    }
                    let s = crate::series::local_expand(self, place, 1)?;
                    Ok(s.coefficients[0].coeff(0))
                }
                Place::Finite(u) if u.deg() == 1 => {
                    let s = crate::series::local_expand(self, place, 1)?;
                    Ok(s.coefficients[0].coeff(0))
                }
                _ => {
                    let s = crate::series::local_expand(self, place, 1)?;
                    if s.coefficients[0].deg() > 0 {
                        return Err(Error::Unsupported("value lies in a residue field extension".into()));
                    }
                    Ok(s.coefficients[0].coeff(0))
                }
            },
        }
    }

    pub fn format(&self) -> String {
        let atom = |p: &Poly| {
            let s = p.to_string();
            if s.contains(' ') {
                format!("({s})")
            } else {
                s
            }
        };
        let bterm = if self.b.is_zero() {
            None
        } else if self.b.is_one() {
            Some("y".to_string())
        } else {
            Some(format!("{}*y", atom(&self.b)))
        };
        let num = match (self.a.is_zero(), bterm) {
            (_, None) => self.a.to_string(),
            (true, Some(bt)) => bt,
            (false, Some(bt)) => format!("{} + {}", self.a, bt),
        };
        if self.d.is_one() {
            num
        } else {
            let n = if num.contains(' ') { format!("({num})") } else { num };
            format!("{}/{}", n, atom(&self.d))
        }
    }
}

/// Valuation of `a + b·y` at the affine point `(alpha, beta)`, `beta ≠ 0`,
/// where `x - alpha` is a uniformizer. Exact: after removing the common power
/// of `x - alpha`, at most one of the two conjugate points can be a zero, and
/// the norm `a^2 - b^2 f` carries its order.
fn affine_numerator_valuation(f: &Poly, a: &Poly, b: &Poly, alpha: Fe, beta: Fe) -> i64 {
    let k = f.field();
    let lin = Poly::linear(k, alpha);
    let ka = if a.is_zero() { u32::MAX } else { a.ord_at(alpha) };
    let kb = if b.is_zero() { u32::MAX } else { b.ord_at(alpha) };
    let m = ka.min(kb);
    let shift = lin.pow(m);
    let a0 = if a.is_zero() { a.clone() } else { a.exact_div(&shift).unwrap() };
    let b0 = if b.is_zero() { b.clone() } else { b.exact_div(&shift).unwrap() };
    let at_p = k.add(a0.eval(alpha), k.mul(b0.eval(alpha), beta));
    if !at_p.is_zero() {
        return m as i64;
    }
    let norm = &(&a0 * &a0) - &(&(&b0 * &b0) * f);
    m as i64 + norm.ord_at(alpha) as i64
}

impl fmt::Display for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

impl fmt::Debug for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Function({})", self.format())
    }
}

impl Add for &Function {
    type Output = Function;
    fn add(self, rhs: &Function) -> Function {
        assert_eq!(self.curve, rhs.curve, "functions on different curves");
        let g = self.d.gcd(&rhs.d);
        let l = rhs.d.exact_div(&g).unwrap();
        let r = self.d.exact_div(&g).unwrap();
        let a = &(&self.a * &l) + &(&rhs.a * &r);
        let b = &(&self.b * &l) + &(&rhs.b * &r);
        let d = &self.d * &l;
        Function::canonical(&self.curve, a, b, d)
    }
}

impl Neg for &Function {
    type Output = Function;
    fn neg(self) -> Function {
        Function { curve: self.curve.clone(), a: -&self.a, b: -&self.b, d: self.d.clone() }
    }
}

impl Sub for &Function {
    type Output = Function;
    fn sub(self, rhs: &Function) -> Function {
        self + &(-rhs)
    }
}

impl Mul for &Function {
    type Output = Function;
    fn mul(self, rhs: &Function) -> Function {
        assert_eq!(self.curve, rhs.curve, "functions on different curves");
        let (a, b) = match self.cubic() {
            None => (&self.a * &rhs.a, Poly::zero(self.curve.field())),
            Some(f) => (
                &(&self.a * &rhs.a) + &(&(&self.b * &rhs.b) * f),
                &(&self.a * &rhs.b) + &(&self.b * &rhs.a),
            ),
        };
        Function::canonical(&self.curve, a, b, &self.d * &rhs.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;

    fn f3() -> FiniteField {
        FiniteField::prime(3).unwrap()
    }

    fn e3() -> Curve {
        let k = f3();
        Curve::elliptic(&k, Poly::from_ints(&k, &[0, -1, 0, 1])).unwrap()
    }

    #[test]
    fn p1_valuation_at_x() {
        let k = f3();
        let c = Curve::projective_line(&k);
        let f = Function::fraction(&c, Poly::from_ints(&k, &[0, 0, 1]), Poly::from_ints(&k, &[1, 0, 1])).unwrap();
        assert_eq!(f.valuation(&Place::Finite(Poly::x(&k))), Some(2));
        assert_eq!(f.valuation(&Place::Finite(Poly::from_ints(&k, &[1, 0, 1]))), Some(-1));
        assert_eq!(f.valuation(&Place::Infinity), Some(0));
    }

    #[test]
    fn elliptic_valuations_of_x_and_y() {
        let c = e3();
        let k = c.field().clone();
        let x = Function::x(&c);
        let y = Function::y(&c).unwrap();
        assert_eq!(x.valuation(&Place::Origin), Some(-2));
        assert_eq!(y.valuation(&Place::Origin), Some(-3));
        assert_eq!(x.valuation(&Place::Affine(k.zero(), k.zero())), Some(2));
        assert_eq!(y.valuation(&Place::Affine(k.zero(), k.zero())), Some(1));
    }

    #[test]
    fn canonical_form_is_unique() {
        let c = e3();
        let x = Function::x(&c);
        let y = Function::y(&c).unwrap();
        // y/x = (x^2 - 1)/y
        let lhs = y.div(&x).unwrap();
        let x2m1 = &(&x * &x) - &Function::one(&c);
        let rhs = x2m1.div(&y).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(&lhs * &x, y);
    }

    #[test]
    fn inverse_round_trip() {
        let c = e3();
        let k = c.field().clone();
        let f = Function::from_parts(
            &c,
            Poly::from_ints(&k, &[1, 1]),
            Poly::from_ints(&k, &[2, 0, 1]),
            Poly::from_ints(&k, &[1, 0, 1]),
        )
        .unwrap();
        let g = f.inv().unwrap();
        assert_eq!(&f * &g, Function::one(&c));
        assert_eq!(Function::zero(&c).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn y_rejected_on_projective_line() {
        let c = Curve::projective_line(&f3());
        assert!(Function::y(&c).is_err());
    }
}
