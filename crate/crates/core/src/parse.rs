//! Text literals for every object the workbench manipulates.
//!
//! ```text
//! field     GF(3) | GF(9,t^2+1)
//! curve     P1/GF(3) | E/GF(3): y^2 = x^3 - x
//! place     [x^2+1] | [inf] | [O] | [0,0] | [c]   ([c] is [x - c] on P1)
//! divisor   2*[x] - [inf] + [x^2+1] | 0
//! function  (x + y)/(x^2 + 1), in x, y and the field generator t
//! order     order P1/GF(3) [2*[inf]; 0]
//! lattice   lattice P1/GF(3) [[inf]; 0; -[0]]
//! qlat      qlat P1/GF(3) n=4 B=2*[inf]
//! ```
//!
//! Everything the crate prints in these shapes parses back to the same value.

use crate::curve::{Curve, Place};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};
use crate::function::Function;
use crate::poly::Poly;
use crate::quadratic::QuadLattice;
use crate::sheaf::{DecomposableLattice, SplitOrder};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(u64),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let lit: String = cs[st..i].iter().collect();
            out.push(Tok::Num(lit.parse().map_err(|_| perr(format!("number too large: {lit}")))?));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(perr(format!("unexpected character '{c}' in \"{s}\"")));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Expr {
    Num(u64),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

struct ExprParser {
    toks: Vec<Tok>,
    pos: usize,
}

impl ExprParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = if self.eat('-') {
            Expr::Neg(Box::new(self.product()?))
        } else {
            self.eat('+');
            self.product()?
        };
        loop {
            if self.eat('+') {
                e = Expr::Add(Box::new(e), Box::new(self.product()?));
            } else if self.eat('-') {
                e = Expr::Sub(Box::new(e), Box::new(self.product()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut e = self.power()?;
        loop {
            if self.eat('*') {
                e = Expr::Mul(Box::new(e), Box::new(self.power()?));
            } else if self.eat('/') {
                e = Expr::Div(Box::new(e), Box::new(self.power()?));
            } else if matches!(self.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::Sym('('))) {
                // juxtaposition: 2x, 3(x+1)
                e = Expr::Mul(Box::new(e), Box::new(self.power()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let neg = self.eat('-');
        let Some(Tok::Num(n)) = self.peek().cloned() else {
            return Err(perr("exponent must be an integer"));
        };
        self.pos += 1;
        if paren && !self.eat(')') {
            return Err(perr("missing ')' after exponent"));
        }
        let n = i64::try_from(n).map_err(|_| perr("exponent too large"))?;
        Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }))
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Ident(v)) => {
                self.pos += 1;
                Ok(Expr::Var(v))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(perr("missing ')'"));
                }
                Ok(e)
            }
            Some(t) => Err(perr(format!("unexpected token {t:?}"))),
            None => Err(perr("unexpected end of expression")),
        }
    }
}

fn parse_expr(s: &str) -> Result<Expr> {
    let mut p = ExprParser { toks: tokenize(s)?, pos: 0 };
    if p.toks.is_empty() {
        return Err(perr("empty expression"));
    }
    let e = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(perr(format!("trailing input in \"{s}\"")));
    }
    Ok(e)
}

/// A ring in which expressions are evaluated.
trait Interp {
    type V: Clone;
    fn num(&self, n: u64) -> Result<Self::V>;
    fn var(&self, name: &str) -> Result<Self::V>;
    fn add(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn sub(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn div(&self, a: &Self::V, b: &Self::V) -> Result<Self::V>;
    fn pow(&self, a: &Self::V, e: i64) -> Result<Self::V>;

    fn eval(&self, e: &Expr) -> Result<Self::V> {
        Ok(match e {
            Expr::Num(n) => self.num(*n)?,
            Expr::Var(v) => self.var(v)?,
            Expr::Neg(a) => {
                let z = self.num(0)?;
                self.sub(&z, &self.eval(a)?)
            }
            Expr::Add(a, b) => self.add(&self.eval(a)?, &self.eval(b)?),
            Expr::Sub(a, b) => self.sub(&self.eval(a)?, &self.eval(b)?),
            Expr::Mul(a, b) => self.mul(&self.eval(a)?, &self.eval(b)?),
            Expr::Div(a, b) => self.div(&self.eval(a)?, &self.eval(b)?)?,
            Expr::Pow(a, n) => self.pow(&self.eval(a)?, *n)?,
        })
    }
}

fn reduce_int(k: &FiniteField, n: u64) -> Fe {
    k.from_int((n % k.characteristic() as u64) as i64)
}

/// Field elements; `t` is the generator of `F_p[t]/(modulus)`.
struct ElemInterp<'a>(&'a FiniteField);

impl Interp for ElemInterp<'_> {
    type V = Fe;
    fn num(&self, n: u64) -> Result<Fe> {
        Ok(reduce_int(self.0, n))
    }
    fn var(&self, name: &str) -> Result<Fe> {
        match name {
            "t" if self.0.degree() > 1 => Ok(self.0.generator_t()),
            _ => Err(perr(format!("unknown symbol '{name}' in a constant of {}", self.0))),
        }
    }
    fn add(&self, a: &Fe, b: &Fe) -> Fe {
        self.0.add(*a, *b)
    }
    fn sub(&self, a: &Fe, b: &Fe) -> Fe {
        self.0.sub(*a, *b)
    }
    fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        self.0.mul(*a, *b)
    }
    fn div(&self, a: &Fe, b: &Fe) -> Result<Fe> {
        self.0.div(*a, *b)
    }
    fn pow(&self, a: &Fe, e: i64) -> Result<Fe> {
        if e >= 0 {
            Ok(self.0.pow(*a, e as u64))
        } else {
            Ok(self.0.pow(self.0.inv(*a)?, e.unsigned_abs()))
        }
    }
}

/// Polynomials in one variable; `t` is the field generator unless it is
/// the variable itself.
struct PolyInterp<'a> {
    field: &'a FiniteField,
    var: &'a str,
}

impl Interp for PolyInterp<'_> {
    type V = Poly;
    fn num(&self, n: u64) -> Result<Poly> {
        Ok(Poly::constant(self.field, reduce_int(self.field, n)))
    }
    fn var(&self, name: &str) -> Result<Poly> {
        if name == self.var {
            Ok(Poly::x(self.field))
        } else {
            Ok(Poly::constant(self.field, ElemInterp(self.field).var(name)?))
        }
    }
    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        a + b
    }
    fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        a - b
    }
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        a * b
    }
    fn div(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (q, r) = a.divmod(b)?;
        if !r.is_zero() {
            return Err(perr(format!("({a})/({b}) is not a polynomial")));
        }
        Ok(q)
    }
    fn pow(&self, a: &Poly, e: i64) -> Result<Poly> {
        let e = u32::try_from(e).map_err(|_| perr("negative or huge exponent in a polynomial"))?;
        Ok(a.pow(e))
    }
}

struct FunctionInterp<'a>(&'a Curve);

impl Interp for FunctionInterp<'_> {
    type V = Function;
    fn num(&self, n: u64) -> Result<Function> {
        Ok(Function::constant(self.0, reduce_int(self.0.field(), n)))
    }
    fn var(&self, name: &str) -> Result<Function> {
        match name {
            "x" => Ok(Function::x(self.0)),
            "y" => Function::y(self.0),
            _ => Ok(Function::constant(self.0, ElemInterp(self.0.field()).var(name)?)),
        }
    }
    fn add(&self, a: &Function, b: &Function) -> Function {
        a + b
    }
    fn sub(&self, a: &Function, b: &Function) -> Function {
        a - b
    }
    fn mul(&self, a: &Function, b: &Function) -> Function {
        a * b
    }
    fn div(&self, a: &Function, b: &Function) -> Result<Function> {
        a.div(b)
    }
    fn pow(&self, a: &Function, e: i64) -> Result<Function> {
        a.pow(e)
    }
}

pub fn parse_element(k: &FiniteField, s: &str) -> Result<Fe> {
    ElemInterp(k).eval(&parse_expr(s)?)
}

/// A polynomial in `var` over `k`.
pub fn parse_poly(k: &FiniteField, s: &str, var: &str) -> Result<Poly> {
    PolyInterp { field: k, var }.eval(&parse_expr(s)?)
}

pub fn parse_function(curve: &Curve, s: &str) -> Result<Function> {
    FunctionInterp(curve).eval(&parse_expr(s)?)
}

pub fn parse_field(s: &str) -> Result<FiniteField> {
    let t = s.trim();
    let inner = t
        .strip_prefix("GF(")
        .or_else(|| t.strip_prefix("F("))
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| perr(format!("expected GF(q) or GF(q,modulus), got \"{s}\"")))?;
    let (qs, modulus) = match inner.split_once(',') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (inner.trim(), None),
    };
    let q: u64 = qs.parse().map_err(|_| perr(format!("bad field order \"{qs}\"")))?;
    let Some(m) = modulus else {
        return FiniteField::of_order(q);
    };
    let guess = FiniteField::of_order(q)?;
    let p = guess.characteristic();
    let fp = FiniteField::prime(p)?;
    let g = parse_poly(&fp, m, "t")?;
    let ints: Vec<i64> = g.coeffs().iter().map(|&c| fp.to_prime_int(c).unwrap() as i64).collect();
    let k = FiniteField::extension(p, &ints)?;
    if k.order() as u64 != q {
        return Err(Error::InvalidField(format!("modulus {m} has degree {} but GF({q}) needs {}", g.deg(), guess.degree())));
    }
    Ok(k)
}

pub fn parse_curve(s: &str) -> Result<Curve> {
    let t = s.trim();
    if let Some(rest) = t.strip_prefix("P1/") {
        return Ok(Curve::projective_line(&parse_field(rest)?));
    }
    let rest = t.strip_prefix("E/").ok_or_else(|| perr(format!("expected P1/GF(q) or E/GF(q): y^2 = f(x), got \"{s}\"")))?;
    let (fs, eq) = rest.split_once(':').ok_or_else(|| perr("elliptic curve literal needs ': y^2 = f(x)'"))?;
    let k = parse_field(fs)?;
    let (lhs, rhs) = eq.split_once('=').ok_or_else(|| perr("expected an equation y^2 = f(x)"))?;
    if lhs.split_whitespace().collect::<String>() != "y^2" {
        return Err(perr(format!("left-hand side must be y^2, got \"{}\"", lhs.trim())));
    }
    Curve::elliptic(&k, parse_poly(&k, rhs, "x")?)
}

pub fn parse_place(curve: &Curve, s: &str) -> Result<Place> {
    let t = s.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| perr(format!("place literal must be bracketed, got \"{s}\"")))?
        .trim();
    let k = curve.field();
    let place = match inner {
        "inf" | "oo" | "∞" => Place::Infinity,
        "O" => Place::Origin,
        _ => {
            if let Some((a, b)) = inner.split_once(',') {
                Place::Affine(parse_element(k, a)?, parse_element(k, b)?)
            } else {
                let u = parse_poly(k, inner, "x")?;
                match u.degree() {
                    None | Some(0) if !curve.is_elliptic() => Place::Finite(Poly::linear(k, u.coeff(0))),
                    Some(_) if !curve.is_elliptic() => Place::Finite(u.monic()),
                    _ => return Err(Error::InvalidPlace(format!("[{inner}] is not a point of {curve}; use [a,b] or [O]"))),
                }
            }
        }
    };
    curve.validate_place(&place)?;
    Ok(place)
}

/// Split at top-level occurrences of `sep` (outside brackets and parentheses).
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            _ if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

pub fn parse_divisor(curve: &Curve, s: &str) -> Result<Divisor> {
    let t = s.trim();
    if t == "0" {
        return Ok(Divisor::zero(curve));
    }
    let mut d = Divisor::zero(curve);
    let cs: Vec<char> = t.chars().collect();
    let mut i = 0;
    let mut first = true;
    let skip_ws = |i: &mut usize| {
        while *i < cs.len() && cs[*i].is_whitespace() {
            *i += 1;
        }
    };
    loop {
        skip_ws(&mut i);
        if i >= cs.len() {
            break;
        }
        let mut sign = 1;
        if cs[i] == '+' || cs[i] == '-' {
            if cs[i] == '-' {
                sign = -1;
            }
            i += 1;
            skip_ws(&mut i);
        } else if !first {
            return Err(perr(format!("expected '+' or '-' in divisor \"{s}\"")));
        }
        first = false;
        let st = i;
        while i < cs.len() && cs[i].is_ascii_digit() {
            i += 1;
        }
        let mut n: i64 = 1;
        if i > st {
            let lit: String = cs[st..i].iter().collect();
            n = lit.parse().map_err(|_| perr(format!("bad coefficient {lit}")))?;
            skip_ws(&mut i);
            if i < cs.len() && cs[i] == '*' {
                i += 1;
                skip_ws(&mut i);
            }
        }
        if i >= cs.len() || cs[i] != '[' {
            return Err(perr(format!("expected a place literal in divisor \"{s}\"")));
        }
        let st = i;
        let mut depth = 0;
        while i < cs.len() {
            match cs[i] {
                '[' => depth += 1,
                ']' => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                _ => {}
            }
            i += 1;
        }
        if i >= cs.len() {
            return Err(perr(format!("unbalanced brackets in divisor \"{s}\"")));
        }
        let lit: String = cs[st..=i].iter().collect();
        i += 1;
        let p = parse_place(curve, &lit)?;
        d = &d + &Divisor::place(curve, p, sign * n)?;
    }
    if first {
        return Err(perr("empty divisor"));
    }
    Ok(d)
}

/// `<curve> [D1; D2; ...]`
fn parse_curve_and_list(s: &str) -> Result<(Curve, Vec<Divisor>)> {
    let t = s.trim();
    if !t.ends_with(']') {
        return Err(perr(format!("expected a bracketed divisor list in \"{s}\"")));
    }
    let mut depth = 0;
    let mut open = None;
    for (i, c) in t.char_indices().rev() {
        match c {
            ']' => depth += 1,
            '[' => {
                depth -= 1;
                if depth == 0 {
                    open = Some(i);
                    break;
                }
            }
            _ => {}
        }
    }
    let open = open.ok_or_else(|| perr("unbalanced brackets"))?;
    let curve = parse_curve(&t[..open])?;
    let body = &t[open + 1..t.len() - 1];
    let divisors = split_top(body, ';').into_iter().map(|d| parse_divisor(&curve, d)).collect::<Result<Vec<_>>>()?;
    Ok((curve, divisors))
}

pub fn parse_order(s: &str) -> Result<SplitOrder> {
    let rest = s.trim().strip_prefix("order").ok_or_else(|| perr("order literal starts with 'order'"))?;
    let (curve, ds) = parse_curve_and_list(rest)?;
    SplitOrder::new(&curve, ds)
}

pub fn format_order(o: &SplitOrder) -> String {
    let ds: Vec<String> = o.divisors().iter().map(|d| d.to_string()).collect();
    format!("order {} [{}]", o.curve(), ds.join("; "))
}

pub fn parse_lattice(s: &str) -> Result<DecomposableLattice> {
    let rest = s.trim().strip_prefix("lattice").ok_or_else(|| perr("lattice literal starts with 'lattice'"))?;
    let (curve, ds) = parse_curve_and_list(rest)?;
    DecomposableLattice::new(&curve, ds)
}

pub fn parse_qlat(s: &str) -> Result<QuadLattice> {
    let rest = s.trim().strip_prefix("qlat").ok_or_else(|| perr("quadratic lattice literal starts with 'qlat'"))?;
    let ni = rest.rfind(" n=").ok_or_else(|| perr("qlat literal needs n=<rank>"))?;
    let curve = parse_curve(&rest[..ni])?;
    let tail = rest[ni + 3..].trim();
    let (ns, bs) = tail.split_once("B=").ok_or_else(|| perr("qlat literal needs B=<divisor>"))?;
    let n: usize = ns.trim().parse().map_err(|_| perr(format!("bad rank \"{}\"", ns.trim())))?;
    QuadLattice::new(&curve, n, parse_divisor(&curve, bs)?)
}

pub fn format_qlat(l: &QuadLattice) -> String {
    format!("qlat {} n={} B={}", l.curve(), l.rank(), l.divisor())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_and_curves() {
        assert_eq!(parse_field("GF(3)").unwrap().to_string(), "GF(3)");
        let k = parse_field("GF(9,t^2+1)").unwrap();
        assert_eq!(k.order(), 9);
        assert_eq!(parse_field(&k.to_string()).unwrap(), k);
        assert!(parse_field("GF(6)").is_err());
        assert!(parse_field("GF(9,t^2+2)").is_err());
        let e = parse_curve("E/GF(3): y^2 = x^3 - x").unwrap();
        assert_eq!(parse_curve("E/GF(3): y^2=x^3-x").unwrap(), e);
        assert_eq!(parse_curve(&e.to_string()).unwrap(), e);
        assert!(parse_curve("E/GF(3): y^2 = x^3").is_err());
    }

    #[test]
    fn places_and_divisors() {
        let p1 = parse_curve("P1/GF(3)").unwrap();
        let k = p1.field().clone();
        assert_eq!(parse_place(&p1, "[1]").unwrap(), Place::Finite(Poly::from_ints(&k, &[-1, 1])));
        assert_eq!(parse_place(&p1, "[x-1]").unwrap(), parse_place(&p1, "[1]").unwrap());
        assert!(parse_place(&p1, "[x^2-1]").is_err());
        let d = parse_divisor(&p1, "2*[x] - 1*[inf] + [x^2+1]").unwrap();
        assert_eq!(d.degree(), 3);
        assert_eq!(parse_divisor(&p1, &d.to_string()).unwrap(), d);
        assert!(parse_divisor(&p1, "0").unwrap().is_zero());
        assert!(parse_divisor(&p1, "[x] [inf]").is_err());
        let e = parse_curve("E/GF(3): y^2 = x^3 - x").unwrap();
        let d = parse_divisor(&e, "2*[0,0] - 2*[O]").unwrap();
        assert_eq!(d.to_string(), "-2*[O] + 2*[0,0]");
        assert!(parse_place(&e, "[1,1]").is_err());
    }

    #[test]
    fn functions_round_trip() {
        let e = parse_curve("E/GF(5): y^2 = x^3 + 2").unwrap();
        for s in ["x", "y", "(x + y)/(x^2 + 1)", "3*x*y - 2", "x^-2*y", "1/(y - 2)"] {
            let f = parse_function(&e, s).unwrap();
            assert_eq!(parse_function(&e, &f.to_string()).unwrap(), f, "{s}");
        }
        let k = parse_field("GF(9)").unwrap();
        let p1 = Curve::projective_line(&k);
        let f = parse_function(&p1, "(t+1)x^2 + t/(x - t)").unwrap();
        assert_eq!(parse_function(&p1, &f.to_string()).unwrap(), f);
        assert!(parse_function(&p1, "y").is_err());
    }

    #[test]
    fn composite_literals() {
        let o = parse_order("order P1/GF(3) [2*[inf]; 0]").unwrap();
        assert_eq!(o.n(), 2);
        assert_eq!(parse_order(&format_order(&o)).unwrap().divisors(), o.divisors());
        let o = parse_order("order E/GF(3): y^2 = x^3 - x [[0,0] - [O]; 0; 0]").unwrap();
        assert_eq!(o.n(), 3);
        let l = parse_qlat("qlat P1/GF(3) n=4 B=2*[inf]").unwrap();
        assert_eq!((l.rank(), l.divisor().degree()), (4, 2));
        assert_eq!(format_qlat(&l), "qlat P1/GF(3) n=4 B=2*[inf]");
        let m = parse_lattice("lattice P1/GF(3) [[inf]; 0; -[0]]").unwrap();
        assert_eq!(m.rank(), 3);
    }
}
