//! Dense univariate polynomials over a [`FiniteField`], with factorization.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};

/// Polynomial in `x` with coefficients low to high; never has a trailing zero.
#[derive(Clone)]
pub struct Poly {
    field: FiniteField,
    coeffs: Vec<Fe>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.field == other.field
    }
}

impl Eq for Poly {}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Poly {
    /// By degree, then coefficients from the top down.
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

/// `lead · Π factor^multiplicity`, factors monic irreducible and sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub lead: Fe,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn expand(&self, field: &FiniteField) -> Poly {
        let mut acc = Poly::constant(field, self.lead);
        for (f, e) in &self.factors {
            acc = &acc * &f.pow(*e);
        }
        acc
    }
}

impl Poly {
    pub fn from_coeffs(field: &FiniteField, mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs }
    }

    /// Integer coefficients, low to high, mapped into the prime subfield.
    pub fn from_ints(field: &FiniteField, coeffs: &[i64]) -> Self {
        Self::from_coeffs(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn zero(field: &FiniteField) -> Self {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &FiniteField) -> Self {
        Self::constant(field, Fe::ONE)
    }

    pub fn constant(field: &FiniteField, c: Fe) -> Self {
        Self::from_coeffs(field, vec![c])
    }

    pub fn x(field: &FiniteField) -> Self {
        Self::from_coeffs(field, vec![Fe::ZERO, Fe::ONE])
    }

    /// `c · x^deg`.
    pub fn monomial(field: &FiniteField, c: Fe, deg: usize) -> Self {
        let mut v = vec![Fe::ZERO; deg + 1];
        v[deg] = c;
        Self::from_coeffs(field, v)
    }

    /// `x - a`.
    pub fn linear(field: &FiniteField, a: Fe) -> Self {
        Self::from_coeffs(field, vec![field.neg(a), Fe::ONE])
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Fe::ONE
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with `deg 0 = -1`.
    pub fn deg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn lead(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Fe::ONE
    }

    pub fn scale(&self, c: Fe) -> Poly {
        let k = &self.field;
        Self::from_coeffs(k, self.coeffs.iter().map(|&a| k.mul(a, c)).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv(self.lead()).expect("nonzero lead"))
    }

    pub fn shift(&self, n: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![Fe::ZERO; n];
        v.extend_from_slice(&self.coeffs);
        Poly { field: self.field.clone(), coeffs: v }
    }

    pub fn eval(&self, a: Fe) -> Fe {
        let k = &self.field;
        self.coeffs.iter().rev().fold(Fe::ZERO, |acc, &c| k.add(k.mul(acc, a), c))
    }

    pub fn derivative(&self) -> Poly {
        let k = &self.field;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| k.mul(k.from_int(i as i64), c))
            .collect();
        Self::from_coeffs(k, v)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(&self.field);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn divmod(&self, g: &Poly) -> Result<(Poly, Poly)> {
        if g.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let k = &self.field;
        let dg = g.coeffs.len() - 1;
        if self.coeffs.len() <= dg {
            return Ok((Poly::zero(k), self.clone()));
        }
        let inv_lead = k.inv(g.lead())?;
        let mut r = self.coeffs.clone();
        let mut quot = vec![Fe::ZERO; r.len() - dg];
        for i in (dg..r.len()).rev() {
            let c = k.mul(r[i], inv_lead);
            if c.is_zero() {
                continue;
            }
            quot[i - dg] = c;
            for (j, &gj) in g.coeffs.iter().enumerate() {
                let idx = i - dg + j;
                r[idx] = k.sub(r[idx], k.mul(c, gj));
            }
        }
        r.truncate(dg);
        Ok((Self::from_coeffs(k, quot), Self::from_coeffs(k, r)))
    }

    pub fn rem(&self, g: &Poly) -> Result<Poly> {
        Ok(self.divmod(g)?.1)
    }

    /// Quotient when `g` is known to divide `self`.
    pub fn exact_div(&self, g: &Poly) -> Result<Poly> {
        let (q, r) = self.divmod(g)?;
        if !r.is_zero() {
            return Err(Error::Internal(format!("{g} does not divide {self}")));
        }
        Ok(q)
    }

    pub fn divides(&self, f: &Poly) -> bool {
        !self.is_zero() && f.rem(self).map(|r| r.is_zero()).unwrap_or(false)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s·self + t·other = g`, `g` monic.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let k = &self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(k), Poly::zero(k));
        let (mut t0, mut t1) = (Poly::zero(k), Poly::one(k));
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1).expect("nonzero divisor");
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let c = k.inv(r0.lead()).expect("nonzero lead");
        (r0.scale(c), s0.scale(c), t0.scale(c))
    }

    /// Inverse modulo `m`; fails when not coprime.
    pub fn inv_mod(&self, m: &Poly) -> Result<Poly> {
        let (g, s, _) = self.ext_gcd(m);
        if !g.is_one() {
            return Err(Error::DivisionByZero);
        }
        s.rem(m)
    }

    pub fn mul_mod(&self, other: &Poly, m: &Poly) -> Poly {
        (self * other).rem(m).expect("nonzero modulus")
    }

    pub fn pow_mod(&self, mut e: u64, m: &Poly) -> Poly {
        let mut acc = Poly::one(&self.field).rem(m).expect("nonzero modulus");
        let mut base = self.rem(m).expect("nonzero modulus");
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_mod(&base, m);
            }
        }
        acc
    }

    /// Largest `k` with `u^k | self`; `u` nonconstant, `self` nonzero.
    pub fn multiplicity(&self, u: &Poly) -> u32 {
        debug_assert!(!self.is_zero() && !u.is_constant());
        let mut k = 0;
        let mut cur = self.clone();
        loop {
            let (q, r) = cur.divmod(u).expect("nonzero divisor");
            if !r.is_zero() {
                return k;
            }
            k += 1;
            cur = q;
        }
    }

    /// Order of vanishing at `x = a`; `self` nonzero.
    pub fn ord_at(&self, a: Fe) -> u32 {
        self.multiplicity(&Poly::linear(&self.field, a))
    }

    /// Substitutes `x -> x + a`.
    pub fn taylor_shift(&self, a: Fe) -> Poly {
        let k = &self.field;
        let xa = Self::from_coeffs(k, vec![a, Fe::ONE]);
        let mut acc = Poly::zero(k);
        for &c in self.coeffs.iter().rev() {
            acc = &(&acc * &xa) + &Poly::constant(k, c);
        }
        acc
    }

    /// Coefficient-reversed polynomial `x^deg · f(1/x)`.
    pub fn reversed(&self) -> Poly {
        let mut v = self.coeffs.clone();
        v.reverse();
        Self::from_coeffs(&self.field, v)
    }

    pub fn is_irreducible(&self) -> bool {
        let n = match self.degree() {
            Some(0) | None => return false,
            Some(n) => n,
        };
        if n == 1 {
            return true;
        }
        let f = self.monic();
        let q = f.field.order() as u64;
        let x = Poly::x(&f.field);
        let mut h = x.clone();
        for _ in 1..=n / 2 {
            h = h.pow_mod(q, &f);
            if !(&h - &x).gcd(&f).is_one() {
                return false;
            }
        }
        true
    }

    /// Roots in the base field, sorted, without multiplicity.
    pub fn roots(&self) -> Vec<Fe> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut out: Vec<Fe> = self
            .factor()
            .factors
            .into_iter()
            .filter(|(f, _)| f.degree() == Some(1))
            .map(|(f, _)| self.field.neg(f.coeff(0)))
            .collect();
        out.sort();
        out
    }

    /// Complete factorization into monic irreducibles.
    pub fn factor(&self) -> Factorization {
        if self.is_constant() {
            return Factorization { lead: self.lead(), factors: Vec::new() };
        }
        let lead = self.lead();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut out: Vec<(Poly, u32)> = Vec::new();
        for (sqf, mult) in self.monic().squarefree_decomposition() {
            for (part, d) in sqf.distinct_degree() {
                for irr in part.equal_degree(d, &mut rng) {
                    out.push((irr, mult));
                }
            }
        }
        out.sort();
        let mut merged: Vec<(Poly, u32)> = Vec::new();
        for (f, e) in out {
            match merged.last_mut() {
                Some((g, m)) if *g == f => *m += e,
                _ => merged.push((f, e)),
            }
        }
        Factorization { lead, factors: merged }
    }

    fn pth_root(&self) -> Poly {
        let k = &self.field;
        let p = k.characteristic() as usize;
        let e = (k.order() / k.characteristic()) as u64;
        let v = self.coeffs.iter().step_by(p).map(|&c| k.pow(c, e)).collect();
        Self::from_coeffs(k, v)
    }

    /// Monic input; returns squarefree parts with multiplicities.
    fn squarefree_decomposition(&self) -> Vec<(Poly, u32)> {
        let k = &self.field;
        let p = k.characteristic();
        let mut out = Vec::new();
        let mut i = 1;
        let mut c = self.gcd(&self.derivative());
        let mut w = self.exact_div(&c).expect("gcd divides");
        while !w.is_one() {
            let y = w.gcd(&c);
            let fac = w.exact_div(&y).expect("gcd divides");
            if !fac.is_one() {
                out.push((fac, i));
            }
            w = y;
            c = c.exact_div(&w).expect("gcd divides");
            i += 1;
        }
        if !c.is_one() {
            for (f, e) in c.pth_root().squarefree_decomposition() {
                out.push((f, e * p));
            }
        }
        out
    }

    /// Monic squarefree input; products of all irreducible factors per degree.
    fn distinct_degree(&self) -> Vec<(Poly, u32)> {
        let k = &self.field;
        let q = k.order() as u64;
        let x = Poly::x(k);
        let mut out = Vec::new();
        let mut f = self.clone();
        let mut h = x.clone();
        let mut d = 1u32;
        while f.deg() >= 2 * d as i64 {
            h = h.pow_mod(q, &f);
            let g = (&h - &x).gcd(&f);
            if !g.is_one() {
                f = f.exact_div(&g).expect("gcd divides");
                h = h.rem(&f).expect("nonzero modulus");
                out.push((g, d));
            }
            d += 1;
        }
        if f.deg() > 0 {
            let d = f.deg() as u32;
            out.push((f, d));
        }
        out
    }

    /// Cantor–Zassenhaus splitting of a product of distinct degree-`d` irreducibles.
    fn equal_degree(&self, d: u32, rng: &mut ChaCha8Rng) -> Vec<Poly> {
        let n = self.deg() as u32;
        if n == d {
            return vec![self.clone()];
        }
        let k = &self.field;
        let q = k.order();
        loop {
            let a = Poly::from_coeffs(k, (0..n).map(|_| Fe(rng.gen_range(0..q))).collect());
            if a.is_constant() {
                continue;
            }
            let b = if k.characteristic() == 2 {
                // Trace to F_2: a + a^2 + ... + a^(2^(m d - 1)).
                let mut t = a.rem(self).expect("nonzero modulus");
                let mut acc = t.clone();
                for _ in 1..(k.degree() * d) {
                    t = t.mul_mod(&t, self);
                    acc = &acc + &t;
                }
                acc
            } else {
                // a^((q^d - 1)/2) = (a^(1 + q + ... + q^(d-1)))^((q - 1)/2).
                let mut conj = a.rem(self).expect("nonzero modulus");
                let mut norm = conj.clone();
                for _ in 1..d {
                    conj = conj.pow_mod(q as u64, self);
                    norm = norm.mul_mod(&conj, self);
                }
                &norm.pow_mod((q as u64 - 1) / 2, self) - &Poly::one(k)
            };
            let g = b.gcd(self);
            if !g.is_one() && g.deg() < self.deg() {
                let h = self.exact_div(&g).expect("gcd divides");
                let mut out = g.equal_degree(d, rng);
                out.extend(h.equal_degree(d, rng));
                return out;
            }
        }
    }

    /// All monic polynomials of exactly degree `d`, in index order.
    pub fn monics_of_degree(field: &FiniteField, d: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = field.order() as u64;
        let count = q.pow(d as u32);
        (0..count).map(move |mut idx| {
            let mut v = Vec::with_capacity(d + 1);
            for _ in 0..d {
                v.push(Fe((idx % q) as u32));
                idx /= q;
            }
            v.push(Fe::ONE);
            Poly::from_coeffs(field, v)
        })
    }

    /// Monic irreducibles of degree `d`, sorted.
    pub fn irreducibles_of_degree(field: &FiniteField, d: usize) -> Vec<Poly> {
        let mut v: Vec<Poly> = Self::monics_of_degree(field, d).filter(|f| f.is_irreducible()).collect();
        v.sort();
        v
    }

    pub fn format_var(&self, var: &str) -> String {
        let k = &self.field;
        let mut terms: Vec<String> = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let term = if mono.is_empty() {
                k.format_atom(c)
            } else if c == Fe::ONE {
                mono
            } else {
                format!("{}*{}", k.format_atom(c), mono)
            };
            terms.push(term);
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_var("x"))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let k = &self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let v = (0..n).map(|i| k.add(self.coeff(i), rhs.coeff(i))).collect();
        Poly::from_coeffs(k, v)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let k = &self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let v = (0..n).map(|i| k.sub(self.coeff(i), rhs.coeff(i))).collect();
        Poly::from_coeffs(k, v)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let k = &self.field;
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(k);
        }
        let mut v = vec![Fe::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                v[i + j] = k.add(v[i + j], k.mul(a, b));
            }
        }
        Poly::from_coeffs(k, v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let k = &self.field;
        Poly::from_coeffs(k, self.coeffs.iter().map(|&c| k.neg(c)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn f3() -> FiniteField {
        FiniteField::prime(3).unwrap()
    }

    #[test]
    fn x2_plus_1_irreducible_over_f3() {
        let k = f3();
        let f = Poly::from_ints(&k, &[1, 0, 1]);
        assert!(f.is_irreducible());
        let fac = f.factor();
        assert_eq!(fac.factors, vec![(f.clone(), 1)]);
    }

    #[test]
    fn x3_minus_x_over_f3() {
        let k = f3();
        let f = Poly::from_ints(&k, &[0, -1, 0, 1]);
        let fac = f.factor();
        let expected: Vec<(Poly, u32)> = vec![
            (Poly::from_ints(&k, &[0, 1]), 1),
            (Poly::from_ints(&k, &[1, 1]), 1),
            (Poly::from_ints(&k, &[2, 1]), 1),
        ];
        let mut got = fac.factors.clone();
        got.sort();
        let mut exp = expected;
        exp.sort();
        assert_eq!(got, exp);
        assert_eq!(f.roots(), vec![k.from_int(0), k.from_int(1), k.from_int(2)]);
    }

    #[test]
    fn x2_plus_1_reducible_over_f5() {
        let k = FiniteField::prime(5).unwrap();
        assert!(!Poly::from_ints(&k, &[1, 0, 1]).is_irreducible());
    }

    #[test]
    fn divmod_degree_bound_and_zero_divisor() {
        let k = f3();
        let f = Poly::from_ints(&k, &[1, 2, 0, 1, 1]);
        let g = Poly::from_ints(&k, &[2, 0, 1]);
        let (q, r) = f.divmod(&g).unwrap();
        assert!(r.deg() < g.deg());
        assert_eq!(&(&q * &g) + &r, f);
        assert_eq!(f.divmod(&Poly::zero(&k)), Err(Error::DivisionByZero));
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        // (1/d) Σ_{e|d} μ(e) q^{d/e}
        let k = f3();
        assert_eq!(Poly::irreducibles_of_degree(&k, 1).len(), 3);
        assert_eq!(Poly::irreducibles_of_degree(&k, 2).len(), 3);
        assert_eq!(Poly::irreducibles_of_degree(&k, 3).len(), 8);
        assert_eq!(Poly::irreducibles_of_degree(&k, 4).len(), 18);
    }

    #[test]
    fn factor_remultiplies_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in [2u64, 3, 4, 5, 9, 7] {
            let k = FiniteField::of_order(q).unwrap();
            for _ in 0..200 {
                let d = rng.gen_range(0..=8);
                let f = Poly::from_coeffs(&k, (0..=d).map(|_| Fe(rng.gen_range(0..q as u32))).collect());
                if f.is_zero() {
                    continue;
                }
                let fac = f.factor();
                assert_eq!(fac.expand(&k), f, "{f}");
                for (g, _) in &fac.factors {
                    assert!(g.is_monic() && g.is_irreducible());
                }
                let irr = fac.factors.len() == 1 && fac.factors[0].1 == 1;
                assert_eq!(irr, f.is_irreducible());
            }
        }
    }

    #[test]
    fn inseparable_input_factors() {
        let k = f3();
        // (x^3 + 2x + 1)^3 has zero derivative-free part handled by p-th roots.
        let g = Poly::from_ints(&k, &[1, 2, 0, 1]);
        let f = g.pow(3);
        assert_eq!(f.factor().expand(&k), f);
    }

    #[test]
    fn ext_gcd_bezout() {
        let k = f3();
        let a = Poly::from_ints(&k, &[1, 0, 1]);
        let b = Poly::from_ints(&k, &[0, 1, 1]);
        let (g, s, t) = a.ext_gcd(&b);
        assert!(g.is_one());
        assert_eq!(&(&s * &a) + &(&t * &b), g);
        let inv = a.inv_mod(&b).unwrap();
        assert!(a.mul_mod(&inv, &b).is_one());
    }
}
