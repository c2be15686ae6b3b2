//! Finite fields `GF(p^m)` of desk-scale order.
//!
//! Elements are stored as [`Fe`] handles: the integer `Σ c_i p^i` encoding the
//! coefficient vector `(c_0, .., c_{m-1})` of the element in `F_p[t]/(modulus)`.
//! All arithmetic goes through the owning [`FiniteField`], which keeps
//! discrete-log tables so multiplication and inversion are table lookups.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

/// An element of some finite field, meaningful only together with its field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe(pub(crate) u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// The integer encoding of this element.
    pub fn index(self) -> u32 {
        self.0
    }
}

struct FieldData {
    p: u32,
    m: u32,
    q: u32,
    /// Monic modulus over `F_p`, low to high, length `m + 1`. `[0, 1]` when `m = 1`.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    sqrt: Vec<u32>,
}

/// The field `F_q`, `q = p^m`. Cheap to clone.
#[derive(Clone)]
pub struct FiniteField(Arc<FieldData>);

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FiniteField {}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.m == 1 {
            write!(f, "GF({})", self.0.p)
        } else {
            write!(f, "GF({},{})", self.0.q, self.fmt_prime_poly(&self.0.modulus, "t"))
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Raw arithmetic on coefficient vectors over F_p, used only while building tables.
fn raw_mul(p: u32, modulus: &[u32], a: &[u32], b: &[u32]) -> Vec<u32> {
    let m = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * m];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    for d in (m..prod.len()).rev() {
        let c = prod[d];
        if c != 0 {
            for k in 0..m {
                let sub = c * modulus[k] as u64 % p as u64;
                prod[d - m + k] = (prod[d - m + k] + p as u64 - sub) % p as u64;
            }
            prod[d] = 0;
        }
    }
    prod.truncate(m);
    prod.into_iter().map(|c| c as u32).collect()
}

fn encode(p: u32, digits: &[u32]) -> u32 {
    digits.iter().rev().fold(0u32, |acc, &d| acc * p + d)
}

fn decode(p: u32, m: u32, mut v: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(m as usize);
    for _ in 0..m {
        out.push(v % p);
        v /= p;
    }
    out
}

/// Checks irreducibility of a monic polynomial over `F_p` by trial division
/// against every monic polynomial of degree at most half its degree.
fn raw_irreducible(p: u32, f: &[u32]) -> bool {
    let n = f.len() - 1;
    if n <= 1 {
        return n == 1;
    }
    for d in 1..=n / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut g: Vec<u32> = decode(p, d as u32, idx as u32);
            g.push(1);
            if raw_rem(p, f, &g).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn raw_rem(p: u32, f: &[u32], g: &[u32]) -> Vec<u32> {
    let mut r: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let dg = g.len() - 1;
    let pp = p as u64;
    // g is monic
    while r.len() > dg {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        if c != 0 {
            for k in 0..=dg {
                r[shift + k] = (r[shift + k] + pp - c * g[k] as u64 % pp) % pp;
            }
        }
        r.pop();
    }
    r.into_iter().map(|c| c as u32).collect()
}

impl FiniteField {
    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if p as u64 > MAX_ORDER {
            return Err(Error::InvalidField(format!("order {p} exceeds {MAX_ORDER}")));
        }
        Ok(Self::build(p, 1, vec![0, 1]))
    }

    /// `F_p[t]/(modulus)` where `modulus` is given low-to-high over `F_p`.
    /// The modulus is made monic and must be irreducible.
    pub fn extension(p: u32, modulus: &[i64]) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        let mut md: Vec<u32> = modulus.iter().map(|&c| c.rem_euclid(p as i64) as u32).collect();
        while md.last() == Some(&0) {
            md.pop();
        }
        if md.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree >= 1".into()));
        }
        let m = (md.len() - 1) as u32;
        if m == 1 {
            return Self::prime(p);
        }
        let q = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if q > MAX_ORDER {
            return Err(Error::InvalidField(format!("order {q} exceeds {MAX_ORDER}")));
        }
        let lead = *md.last().unwrap();
        let lead_inv = mod_pow(lead as u64, p as u64 - 2, p as u64) as u32;
        for c in md.iter_mut() {
            *c = (*c as u64 * lead_inv as u64 % p as u64) as u32;
        }
        if !raw_irreducible(p, &md) {
            return Err(Error::InvalidField("modulus is not irreducible".into()));
        }
        Ok(Self::build(p, m, md))
    }

    /// `GF(q)` with the lexicographically first monic irreducible modulus.
    pub fn of_order(q: u64) -> Result<Self> {
        if !(2..=MAX_ORDER).contains(&q) {
            return Err(Error::InvalidField(format!("unsupported order {q}")));
        }
        let p = prime_factors(q);
        if p.len() != 1 {
            return Err(Error::InvalidField(format!("{q} is not a prime power")));
        }
        let p = p[0] as u32;
        let mut m = 0;
        let mut r = q;
        while r > 1 {
            r /= p as u64;
            m += 1;
        }
        if m == 1 {
            return Self::prime(p);
        }
        let count = (p as u64).pow(m);
        for idx in 0..count {
            let mut g = decode(p, m, idx as u32);
            g.push(1);
            if raw_irreducible(p, &g) {
                let g: Vec<i64> = g.into_iter().map(|c| c as i64).collect();
                return Self::extension(p, &g);
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    fn build(p: u32, m: u32, modulus: Vec<u32>) -> Self {
        let q = p.pow(m);
        let mul = |a: u32, b: u32| -> u32 {
            if m == 1 {
                (a as u64 * b as u64 % p as u64) as u32
            } else {
                encode(p, &raw_mul(p, &modulus, &decode(p, m, a), &decode(p, m, b)))
            }
        };
        let pow = |a: u32, mut e: u64| -> u32 {
            let mut base = a;
            let mut acc = 1u32;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul(acc, base);
                }
                base = mul(base, base);
                e >>= 1;
            }
            acc
        };
        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        let gen = (1..q)
            .find(|&g| factors.iter().all(|&r| pow(g, order / r) != 1))
            .expect("multiplicative group is cyclic");
        let mut exp = vec![0u32; (q - 1) as usize];
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u32;
        for i in 0..(q - 1) {
            exp[i as usize] = cur;
            log[cur as usize] = i;
            cur = mul(cur, gen);
        }
        let mut sqrt = vec![u32::MAX; q as usize];
        for x in 0..q {
            let s = mul(x, x) as usize;
            if sqrt[s] == u32::MAX {
                sqrt[s] = x;
            }
        }
        FiniteField(Arc::new(FieldData { p, m, q, modulus, exp, log, sqrt }))
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.m
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    /// Modulus coefficients over `F_p`, low to high.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn zero(&self) -> Fe {
        Fe::ZERO
    }

    pub fn one(&self) -> Fe {
        Fe::ONE
    }

    /// The class of the integer `n` in the prime subfield.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.0.p as i64) as u32)
    }

    /// The adjoined root `t` of the modulus (equal to 0 in a prime field).
    pub fn generator_t(&self) -> Fe {
        if self.0.m == 1 {
            Fe::ZERO
        } else {
            Fe(self.0.p)
        }
    }

    pub fn from_digits(&self, digits: &[u32]) -> Fe {
        let mut d: Vec<u32> = digits.iter().map(|&c| c % self.0.p).collect();
        d.resize(self.0.m as usize, 0);
        Fe(encode(self.0.p, &d))
    }

    pub fn digits(&self, a: Fe) -> Vec<u32> {
        decode(self.0.p, self.0.m, a.0)
    }

    /// Element with the given integer encoding; `None` when out of range.
    pub fn element(&self, index: u32) -> Option<Fe> {
        (index < self.0.q).then_some(Fe(index))
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.0.q).map(Fe)
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let p = self.0.p;
        if self.0.m == 1 {
            let s = a.0 + b.0;
            return Fe(if s >= p { s - p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut place = 1u32;
        while x > 0 || y > 0 {
            let d = (x % p + y % p) % p;
            out += d * place;
            place = place.wrapping_mul(p);
            x /= p;
            y /= p;
        }
        Fe(out)
    }

    pub fn neg(&self, a: Fe) -> Fe {
        let p = self.0.p;
        if self.0.m == 1 {
            return Fe(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let mut x = a.0;
        let mut out = 0u32;
        let mut place = 1u32;
        while x > 0 {
            let d = x % p;
            out += ((p - d) % p) * place;
            place = place.wrapping_mul(p);
            x /= p;
        }
        Fe(out)
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        if self.0.m == 1 {
            return Fe((a.0 as u64 * b.0 as u64 % self.0.p as u64) as u32);
        }
        let n = self.0.q - 1;
        let s = self.0.log[a.0 as usize] + self.0.log[b.0 as usize];
        Fe(self.0.exp[(if s >= n { s - n } else { s }) as usize])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.0.q - 1;
        let l = self.0.log[a.0 as usize];
        Ok(Fe(self.0.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.0 == 0 {
            return Fe::ZERO;
        }
        let n = (self.0.q - 1) as u64;
        let l = self.0.log[a.0 as usize] as u64;
        Fe(self.0.exp[((l * (e % n)) % n) as usize])
    }

    /// `a^p`.
    pub fn frobenius(&self, a: Fe) -> Fe {
        self.pow(a, self.0.p as u64)
    }

    pub fn is_square(&self, a: Fe) -> bool {
        self.0.sqrt[a.0 as usize] != u32::MAX
    }

    /// Some square root of `a`, if one exists. Deterministic.
    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        let s = self.0.sqrt[a.0 as usize];
        (s != u32::MAX).then_some(Fe(s))
    }

    /// Integer value of an element of the prime subfield, in `0..p`.
    pub fn to_prime_int(&self, a: Fe) -> Option<u32> {
        (a.0 < self.0.p).then_some(a.0)
    }

    fn fmt_prime_poly(&self, digits: &[u32], var: &str) -> String {
        let mut terms = Vec::new();
        for (i, &c) in digits.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            terms.push(if mono.is_empty() {
                c.to_string()
            } else if c == 1 {
                mono
            } else {
                format!("{c}*{mono}")
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// Textual form: an integer in a prime field, a polynomial in `t` otherwise.
    pub fn format(&self, a: Fe) -> String {
        if self.0.m == 1 {
            a.0.to_string()
        } else {
            self.fmt_prime_poly(&self.digits(a), "t")
        }
    }

    /// Like [`format`](Self::format) but parenthesised when it is a sum.
    pub fn format_atom(&self, a: Fe) -> String {
        let s = self.format(a);
        if s.contains(' ') {
            format!("({s})")
        } else {
            s
        }
    }

    pub fn bind(&self, a: Fe) -> FFElement {
        FFElement { field: self.clone(), value: a }
    }
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// An element together with its field; arithmetic checks that operands agree.
#[derive(Clone, PartialEq, Eq)]
pub struct FFElement {
    field: FiniteField,
    value: Fe,
}

impl fmt::Debug for FFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self.field.format(self.value), self.field)
    }
}

impl fmt::Display for FFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format(self.value))
    }
}

/// The four primitive field operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Inv,
    Neg,
}

impl FFElement {
    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn value(&self) -> Fe {
        self.value
    }

    fn check(&self, other: &FFElement) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.to_string(), other.field.to_string()));
        }
        Ok(())
    }

    pub fn add(&self, other: &FFElement) -> Result<FFElement> {
        self.check(other)?;
        Ok(self.field.bind(self.field.add(self.value, other.value)))
    }

    pub fn mul(&self, other: &FFElement) -> Result<FFElement> {
        self.check(other)?;
        Ok(self.field.bind(self.field.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> FFElement {
        self.field.bind(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<FFElement> {
        Ok(self.field.bind(self.field.inv(self.value)?))
    }

    /// Applies `op`; unary operations ignore `other`.
    pub fn apply(&self, other: &FFElement, op: FieldOp) -> Result<FFElement> {
        match op {
            FieldOp::Add => self.add(other),
            FieldOp::Mul => self.mul(other),
            FieldOp::Inv => {
                self.check(other)?;
                self.inv()
            }
            FieldOp::Neg => {
                self.check(other)?;
                Ok(self.neg())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf9() -> FiniteField {
        FiniteField::extension(3, &[1, 0, 1]).unwrap()
    }

    #[test]
    fn inverse_of_two_mod_three() {
        let k = FiniteField::prime(3).unwrap();
        assert_eq!(k.inv(k.from_int(2)).unwrap(), k.from_int(2));
    }

    #[test]
    fn t_squared_is_minus_one_in_gf9() {
        let k = gf9();
        let t = k.generator_t();
        assert_eq!(k.mul(t, t), k.neg(k.one()));
    }

    #[test]
    fn squares_of_f3_units() {
        let k = FiniteField::prime(3).unwrap();
        for a in k.elements().skip(1) {
            assert_eq!(k.mul(a, a), k.one());
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for k in [FiniteField::prime(3).unwrap(), FiniteField::prime(5).unwrap(), FiniteField::prime(7).unwrap(), gf9()] {
            let els: Vec<Fe> = k.elements().collect();
            for &a in &els {
                if !a.is_zero() {
                    assert_eq!(k.mul(a, k.inv(a).unwrap()), k.one());
                }
                assert_eq!(k.add(a, k.neg(a)), k.zero());
                for &b in &els {
                    for &c in &els {
                        assert_eq!(k.add(k.add(a, b), c), k.add(a, k.add(b, c)));
                        assert_eq!(k.mul(k.mul(a, b), c), k.mul(a, k.mul(b, c)));
                        assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_additive_and_fixes_prime_field() {
        for q in [3u64, 9, 27, 81, 25, 49] {
            let k = FiniteField::of_order(q).unwrap();
            let p = k.characteristic();
            let mut fixed = 0;
            for a in k.elements() {
                if k.frobenius(a) == a {
                    fixed += 1;
                    assert!(k.to_prime_int(a).is_some());
                }
                for b in k.elements().step_by(3) {
                    assert_eq!(k.frobenius(k.add(a, b)), k.add(k.frobenius(a), k.frobenius(b)));
                }
            }
            assert_eq!(fixed, p);
        }
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(FiniteField::prime(9).is_err());
        assert!(FiniteField::extension(3, &[2, 0, 1]).is_err()); // t^2 - 1 splits
        assert!(FiniteField::of_order(12).is_err());
        assert!(FiniteField::of_order(1 << 17).is_err());
    }

    #[test]
    fn division_by_zero_and_mismatch() {
        let k3 = FiniteField::prime(3).unwrap();
        let k5 = FiniteField::prime(5).unwrap();
        assert_eq!(k3.inv(k3.zero()), Err(Error::DivisionByZero));
        let a = k3.bind(k3.one());
        let b = k5.bind(k5.one());
        assert!(matches!(a.add(&b), Err(Error::FieldMismatch(..))));
        assert_eq!(a.apply(&a, FieldOp::Inv).unwrap(), a);
    }

    #[test]
    fn characteristic_two_is_representable() {
        let k = FiniteField::of_order(16).unwrap();
        for a in k.elements() {
            assert_eq!(k.add(a, a), k.zero());
        }
    }
}
