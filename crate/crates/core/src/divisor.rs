//! Divisors and principal divisors.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::curve::{Curve, CurveKind, Place};
use crate::error::{Error, Result};
use crate::function::Function;
use crate::poly::Poly;

/// A finite formal combination of places; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Divisor {
    curve: Curve,
    terms: BTreeMap<Place, i64>,
}

impl Divisor {
    pub fn zero(curve: &Curve) -> Self {
        Divisor { curve: curve.clone(), terms: BTreeMap::new() }
    }

    /// Checked constructor: every place must belong to `curve`. Repeated
    /// places are summed.
    pub fn from_terms(curve: &Curve, terms: impl IntoIterator<Item = (Place, i64)>) -> Result<Self> {
        let mut d = Divisor::zero(curve);
        for (p, n) in terms {
            curve.validate_place(&p)?;
            d.add_term(p, n);
        }
        Ok(d)
    }

    /// `n·[P]`.
    pub fn place(curve: &Curve, place: Place, n: i64) -> Result<Self> {
        Self::from_terms(curve, [(place, n)])
    }

    pub(crate) fn from_terms_unchecked(curve: &Curve, terms: impl IntoIterator<Item = (Place, i64)>) -> Self {
        let mut d = Divisor::zero(curve);
        for (p, n) in terms {
            d.add_term(p, n);
        }
        d
    }

    fn add_term(&mut self, p: Place, n: i64) {
        if n == 0 {
            return;
        }
        let e = self.terms.entry(p.clone()).or_insert(0);
        *e += n;
        if *e == 0 {
            self.terms.remove(&p);
        }
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|(p, n)| n * p.degree()).sum()
    }

    pub fn coeff(&self, p: &Place) -> i64 {
        self.terms.get(p).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Place, i64)> {
        self.terms.iter().map(|(p, &n)| (p, n))
    }

    pub fn support(&self) -> impl Iterator<Item = &Place> {
        self.terms.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_effective(&self) -> bool {
        self.terms.values().all(|&n| n >= 0)
    }

    /// `Σ |n_P|·deg P`.
    pub fn size(&self) -> i64 {
        self.terms.iter().map(|(p, n)| n.abs() * p.degree()).sum()
    }

    pub fn scale(&self, k: i64) -> Divisor {
        Self::from_terms_unchecked(&self.curve, self.terms.iter().map(|(p, &n)| (p.clone(), n * k)))
    }

    pub fn positive_part(&self) -> Divisor {
        Self::from_terms_unchecked(&self.curve, self.terms.iter().filter(|(_, &n)| n > 0).map(|(p, &n)| (p.clone(), n)))
    }

    fn same_curve(&self, other: &Divisor) -> Result<()> {
        if self.curve != other.curve {
            return Err(Error::CurveMismatch(self.curve.to_string(), other.curve.to_string()));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Divisor) -> Result<Divisor> {
        self.same_curve(other)?;
        let mut d = self.clone();
        for (p, &n) in &other.terms {
            d.add_term(p.clone(), n);
        }
        Ok(d)
    }

    pub fn checked_sub(&self, other: &Divisor) -> Result<Divisor> {
        self.checked_add(&-other)
    }

    pub fn format(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let k = self.curve.field();
        let mut out = String::new();
        for (i, (p, &n)) in self.terms.iter().enumerate() {
            let sign = if n < 0 { "-" } else { "+" };
            if i == 0 {
                if n < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            if n.abs() != 1 {
                out.push_str(&format!("{}*", n.abs()));
            }
            out.push_str(&p.format(k));
        }
        out
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

impl Add for &Divisor {
    type Output = Divisor;
    fn add(self, o: &Divisor) -> Divisor {
        self.checked_add(o).expect("divisors on different curves")
    }
}

impl Sub for &Divisor {
    type Output = Divisor;
    fn sub(self, o: &Divisor) -> Divisor {
        self.checked_sub(o).expect("divisors on different curves")
    }
}

impl Neg for &Divisor {
    type Output = Divisor;
    fn neg(self) -> Divisor {
        self.scale(-1)
    }
}

/// `div(f)`.
///
/// On an elliptic curve the zeros and poles of `f` lie above the roots of
/// `d·(a² − b²f)`; every such root must be rational with rational points
/// above it, otherwise [`Error::NonRationalSupport`] is raised.
pub fn principal_divisor(f: &Function) -> Result<Divisor> {
    if f.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let curve = f.curve();
    let k = curve.field();
    let mut d = Divisor::zero(curve);
    match curve.kind() {
        CurveKind::ProjectiveLine => {
            for (u, m) in f.num_a().factor().factors {
                d.add_term(Place::Finite(u), m as i64);
            }
            for (u, m) in f.den().factor().factors {
                d.add_term(Place::Finite(u), -(m as i64));
            }
            d.add_term(Place::Infinity, f.den().deg() - f.num_a().deg());
        }
        CurveKind::Elliptic { cubic } => {
            let critical = &f.numerator_norm() * f.den();
            for (g, _) in critical.factor().factors {
                if g.deg() > 1 {
                    return Err(Error::NonRationalSupport(format!("{f} has zeros or poles above {g}")));
                }
                let alpha = k.neg(g.coeff(0));
                let fa = cubic.eval(alpha);
                let Some(beta) = k.sqrt(fa) else {
                    return Err(Error::NonRationalSupport(format!(
                        "{f} has zeros or poles at the degree-2 place above x = {}",
                        k.format(alpha)
                    )));
                };
                let mut above = vec![Place::Affine(alpha, beta)];
                if !beta.is_zero() {
                    above.push(Place::Affine(alpha, k.neg(beta)));
                }
                for p in above {
                    let v = f.valuation(&p).expect("nonzero");
                    d.add_term(p, v);
                }
            }
            d.add_term(Place::Origin, f.valuation(&Place::Origin).expect("nonzero"));
        }
    }
    if d.degree() != 0 {
        return Err(Error::Internal(format!("div({f}) = {d} has nonzero degree")));
    }
    Ok(d)
}

/// `Π u^{n}` over the finite places of a projective-line divisor, i.e. the
/// function whose divisor agrees with `D` away from infinity.
pub(crate) fn p1_product(d: &Divisor) -> Function {
    let curve = d.curve();
    let k = curve.field();
    let mut num = Poly::one(k);
    let mut den = Poly::one(k);
    for (p, n) in d.terms() {
        if let Place::Finite(u) = p {
            if n > 0 {
                num = &num * &u.pow(n as u32);
            } else {
                den = &den * &u.pow((-n) as u32);
            }
        }
    }
    Function::fraction(curve, num, den).expect("nonzero denominator")
}
