//! The curves in scope and their closed points.
//!
//! Two models are supported: the projective line over `F_q`, with places for
//! every monic irreducible polynomial plus the point at infinity, and elliptic
//! curves `y^2 = f(x)` with `f` a monic squarefree cubic in odd
//! characteristic, whose places are restricted to the `F_q`-rational points.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CurveKind {
    ProjectiveLine,
    /// `y^2 = f(x)`.
    Elliptic { cubic: Poly },
}

#[derive(Debug, PartialEq, Eq)]
struct CurveData {
    field: FiniteField,
    kind: CurveKind,
}

/// A smooth projective curve over a finite field. Cheap to clone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve(Arc<CurveData>);

/// A closed point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    /// Place of the projective line at the monic irreducible `u(x)`.
    Finite(Poly),
    /// Point at infinity of the projective line.
    Infinity,
    /// Neutral point `O` of an elliptic curve.
    Origin,
    /// Rational affine point of an elliptic curve.
    Affine(Fe, Fe),
}

impl Place {
    pub fn degree(&self) -> i64 {
        match self {
            Place::Finite(u) => u.deg(),
            _ => 1,
        }
    }

    pub fn format(&self, k: &FiniteField) -> String {
        match self {
            Place::Finite(u) => format!("[{u}]"),
            Place::Infinity => "[inf]".into(),
            Place::Origin => "[O]".into(),
            Place::Affine(a, b) => format!("[{},{}]", k.format(*a), k.format(*b)),
        }
    }
}

impl std::hash::Hash for Curve {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.field.order().hash(state);
        self.0.kind.hash(state);
    }
}

impl Curve {
    pub fn projective_line(field: &FiniteField) -> Self {
        Curve(Arc::new(CurveData { field: field.clone(), kind: CurveKind::ProjectiveLine }))
    }

    /// `y^2 = cubic`; the cubic must be monic and squarefree, the
    /// characteristic odd.
    pub fn elliptic(field: &FiniteField, cubic: Poly) -> Result<Self> {
        if field.characteristic() == 2 {
            return Err(Error::InvalidCurve("elliptic models need odd characteristic".into()));
        }
        if cubic.degree() != Some(3) || !cubic.is_monic() {
            return Err(Error::InvalidCurve(format!("{cubic} is not a monic cubic")));
        }
        if !cubic.gcd(&cubic.derivative()).is_one() {
            return Err(Error::InvalidCurve(format!("{cubic} is not squarefree (singular curve)")));
        }
        Ok(Curve(Arc::new(CurveData { field: field.clone(), kind: CurveKind::Elliptic { cubic } })))
    }

    pub fn field(&self) -> &FiniteField {
        &self.0.field
    }

    pub fn kind(&self) -> &CurveKind {
        &self.0.kind
    }

    pub fn is_elliptic(&self) -> bool {
        matches!(self.0.kind, CurveKind::Elliptic { .. })
    }

    /// The cubic `f` of `y^2 = f(x)`.
    pub fn cubic(&self) -> Option<&Poly> {
        match &self.0.kind {
            CurveKind::Elliptic { cubic } => Some(cubic),
            CurveKind::ProjectiveLine => None,
        }
    }

    pub fn genus(&self) -> u32 {
        if self.is_elliptic() {
            1
        } else {
            0
        }
    }

    /// The degree-one place used as reference: `∞` or `O`.
    pub fn base_place(&self) -> Place {
        if self.is_elliptic() {
            Place::Origin
        } else {
            Place::Infinity
        }
    }

    pub fn validate_place(&self, place: &Place) -> Result<()> {
        let k = self.field();
        match (&self.0.kind, place) {
            (CurveKind::ProjectiveLine, Place::Infinity) => Ok(()),
            (CurveKind::ProjectiveLine, Place::Finite(u)) => {
                if u.is_monic() && u.is_irreducible() {
                    Ok(())
                } else {
                    Err(Error::InvalidPlace(format!("{u} is not monic irreducible")))
                }
            }
            (CurveKind::Elliptic { .. }, Place::Origin) => Ok(()),
            (CurveKind::Elliptic { cubic }, Place::Affine(a, b)) => {
                if k.mul(*b, *b) == cubic.eval(*a) {
                    Ok(())
                } else {
                    Err(Error::InvalidPlace(format!("{} is not on the curve", place.format(k))))
                }
            }
            _ => Err(Error::InvalidPlace(format!("{} does not belong to {}", place.format(k), self))),
        }
    }

    /// Rational points of an elliptic curve: `O` first, then affine points
    /// sorted by `(x, y)`.
    pub fn rational_points(&self) -> Vec<Place> {
        let k = self.field();
        match self.cubic() {
            None => {
                let mut v: Vec<Place> = k.elements().map(|a| Place::Finite(Poly::linear(k, a))).collect();
                v.sort();
                v.push(Place::Infinity);
                v
            }
            Some(f) => {
                let mut v = vec![Place::Origin];
                for a in k.elements() {
                    let fa = f.eval(a);
                    if fa.is_zero() {
                        v.push(Place::Affine(a, Fe::ZERO));
                    } else if let Some(r) = k.sqrt(fa) {
                        let (r1, r2) = (r, k.neg(r));
                        v.push(Place::Affine(a, r1.min(r2)));
                        v.push(Place::Affine(a, r1.max(r2)));
                    }
                }
                v
            }
        }
    }

    /// Every place of degree at most `dmax`, without duplicates.
    pub fn places_up_to_degree(&self, dmax: usize) -> Result<Vec<Place>> {
        if dmax == 0 {
            return Err(Error::InvalidArgument("dmax must be at least 1".into()));
        }
        if self.is_elliptic() {
            if dmax > 1 {
                return Err(Error::Unsupported("elliptic places of degree > 1".into()));
            }
            return Ok(self.rational_points());
        }
        let mut out = self.rational_points();
        for d in 2..=dmax {
            out.extend(Poly::irreducibles_of_degree(self.field(), d).into_iter().map(Place::Finite));
        }
        Ok(out)
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            CurveKind::ProjectiveLine => write!(f, "P1/{}", self.0.field),
            CurveKind::Elliptic { cubic } => write!(f, "E/{}: y^2 = {}", self.0.field, cubic),
        }
    }
}

/// Number of monic irreducibles of degree `d` over `F_q`, by Möbius inversion.
pub fn irreducible_count(q: u64, d: u32) -> u64 {
    fn mobius(mut n: u32) -> i64 {
        let mut res = 1;
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                n /= p;
                if n.is_multiple_of(p) {
                    return 0;
                }
                res = -res;
            }
            p += 1;
        }
        if n > 1 {
            res = -res;
        }
        res
    }
    let total: i64 = (1..=d).filter(|e| d.is_multiple_of(*e)).map(|e| mobius(e) * (q as i64).pow(d / e)).sum();
    (total / d as i64) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> FiniteField {
        FiniteField::prime(3).unwrap()
    }

    #[test]
    fn p1_rational_places() {
        let c = Curve::projective_line(&f3());
        let places = c.places_up_to_degree(1).unwrap();
        assert_eq!(places.len(), 4);
        assert_eq!(places.last(), Some(&Place::Infinity));
    }

    #[test]
    fn p1_places_of_degree_two() {
        // 9 monic quadratics minus the 6 reducible ones (3 squares, 3 products).
        let k = f3();
        let c = Curve::projective_line(&k);
        let places = c.places_up_to_degree(2).unwrap();
        assert_eq!(places.len(), 4 + 3);
        let mut reducible = 0;
        for g in Poly::monics_of_degree(&k, 2) {
            if !g.is_irreducible() {
                reducible += 1;
            }
        }
        assert_eq!(reducible, 6);
    }

    #[test]
    fn place_counts_follow_mobius() {
        for q in [2u64, 3, 4, 5, 9] {
            let k = FiniteField::of_order(q).unwrap();
            let c = Curve::projective_line(&k);
            let places = c.places_up_to_degree(3).unwrap();
            for d in 1..=3 {
                let got = places.iter().filter(|p| p.degree() == d as i64 && **p != Place::Infinity).count();
                assert_eq!(got as u64, irreducible_count(q, d));
            }
        }
    }

    #[test]
    fn elliptic_rational_points_brute_force() {
        let k = f3();
        let c = Curve::elliptic(&k, Poly::from_ints(&k, &[0, -1, 0, 1])).unwrap();
        let pts = c.places_up_to_degree(1).unwrap();
        let mut brute = vec![Place::Origin];
        for x in k.elements() {
            for y in k.elements() {
                if k.mul(y, y) == k.sub(k.pow(x, 3), x) {
                    brute.push(Place::Affine(x, y));
                }
            }
        }
        assert_eq!(pts, brute);
        assert_eq!(pts.len(), 4);
        assert!(matches!(c.places_up_to_degree(2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn rejects_singular_and_char_two() {
        let k = f3();
        assert!(Curve::elliptic(&k, Poly::from_ints(&k, &[0, 0, 0, 1])).is_err());
        let k2 = FiniteField::prime(2).unwrap();
        assert!(Curve::elliptic(&k2, Poly::from_ints(&k2, &[1, 1, 0, 1])).is_err());
    }
}
