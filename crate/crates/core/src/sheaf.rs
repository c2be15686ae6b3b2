//! Completely decomposable lattices `⊕ L^{B_i} v_i`, split maximal orders
//! `Δ(B_1..B_n) = (L^{B_i − B_j})_{i,j}` and the finite algebras of their
//! global sections.

use std::collections::HashSet;
use std::fmt;

use crate::curve::Curve;
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};
use crate::function::Function;
use crate::linalg;
use crate::picard::PicardData;
use crate::poly::Poly;
use crate::riemann_roch::{rr_space, RRSpace};

fn check_divisors(curve: &Curve, divisors: &[Divisor]) -> Result<()> {
    if divisors.is_empty() {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    for d in divisors {
        if d.curve() != curve {
            return Err(Error::CurveMismatch(d.curve().to_string(), curve.to_string()));
        }
    }
    Ok(())
}

/// `⊕_i L^{B_i} v_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecomposableLattice {
    curve: Curve,
    divisors: Vec<Divisor>,
}

impl DecomposableLattice {
    pub fn new(curve: &Curve, divisors: Vec<Divisor>) -> Result<Self> {
        check_divisors(curve, &divisors)?;
        Ok(DecomposableLattice { curve: curve.clone(), divisors })
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    pub fn divisors(&self) -> &[Divisor] {
        &self.divisors
    }

    /// Global sections, one Riemann–Roch space per summand.
    pub fn sections(&self) -> Result<Vec<RRSpace>> {
        self.divisors.iter().map(rr_space).collect()
    }
}

/// The split maximal order with entry sheaves `L^{B_i − B_j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitOrder {
    curve: Curve,
    divisors: Vec<Divisor>,
}

impl SplitOrder {
    pub fn new(curve: &Curve, divisors: Vec<Divisor>) -> Result<Self> {
        check_divisors(curve, &divisors)?;
        Ok(SplitOrder { curve: curve.clone(), divisors })
    }

    /// `Δ_B = Δ(B, 0)` in `M_2(K)`.
    pub fn m2(b: &Divisor) -> Self {
        SplitOrder { curve: b.curve().clone(), divisors: vec![b.clone(), Divisor::zero(b.curve())] }
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn n(&self) -> usize {
        self.divisors.len()
    }

    pub fn divisors(&self) -> &[Divisor] {
        &self.divisors
    }

    pub fn entry_divisor(&self, i: usize, j: usize) -> Divisor {
        &self.divisors[i] - &self.divisors[j]
    }

    /// Blocks of indices whose divisors are linearly equivalent.
    pub fn equivalence_blocks(&self, pic: &PicardData) -> Result<Vec<Vec<usize>>> {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        'outer: for i in 0..self.n() {
            for b in blocks.iter_mut() {
                if pic.is_principal(&self.entry_divisor(i, b[0]))? {
                    b.push(i);
                    continue 'outer;
                }
            }
            blocks.push(vec![i]);
        }
        Ok(blocks)
    }
}

/// Shape of a section algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Structure {
    /// `M_n(F_q)`: all `B_i` linearly equivalent.
    FullMatrix,
    /// `F_q^n ⊕ V` with `V² = 0`, `V` of the given dimension.
    SplitDiagonalPlusNilpotent(usize),
    /// `F_q^n`.
    DiagonalOnly,
    /// Blocks of equivalent divisors on the diagonal with a nilpotent
    /// off-block part; used when the shapes above do not apply.
    BlockTriangular { block_sizes: Vec<usize>, nilpotent_dim: usize },
}

impl Structure {
    pub fn nilpotent_dim(&self) -> usize {
        match self {
            Structure::FullMatrix | Structure::DiagonalOnly => 0,
            Structure::SplitDiagonalPlusNilpotent(d) => *d,
            Structure::BlockTriangular { nilpotent_dim, .. } => *nilpotent_dim,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Structure::FullMatrix => "FullMatrix",
            Structure::SplitDiagonalPlusNilpotent(_) => "SplitDiagonalPlusNilpotent",
            Structure::DiagonalOnly => "DiagonalOnly",
            Structure::BlockTriangular { .. } => "BlockTriangular",
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::SplitDiagonalPlusNilpotent(d) => write!(f, "SplitDiagonalPlusNilpotent({d})"),
            Structure::BlockTriangular { block_sizes, nilpotent_dim } => {
                write!(f, "BlockTriangular({block_sizes:?}, {nilpotent_dim})")
            }
            other => f.write_str(other.tag()),
        }
    }
}

/// A basis vector `f·E_ij` of the section algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionEntry {
    pub i: usize,
    pub j: usize,
    pub f: Function,
}

/// `Δ(X)` as a finite-dimensional algebra over `F_q`.
#[derive(Clone, Debug)]
pub struct SectionsAlgebra {
    field: FiniteField,
    n: usize,
    entries: Vec<SectionEntry>,
    /// `table[a][b]` = sparse coordinates of `entries[a]·entries[b]`.
    table: Vec<Vec<Vec<(usize, Fe)>>>,
    structure: Structure,
}

/// Sections of `Δ`, with the multiplication table from `E_ij·E_jk = E_ik`.
pub fn order_sections(order: &SplitOrder, pic: &PicardData) -> Result<SectionsAlgebra> {
    let n = order.n();
    let k = order.curve().field().clone();
    let mut spaces: Vec<Vec<RRSpace>> = Vec::with_capacity(n);
    for i in 0..n {
        let row = (0..n).map(|j| rr_space(&order.entry_divisor(i, j))).collect::<Result<Vec<_>>>()?;
        spaces.push(row);
    }
    let mut entries = Vec::new();
    let mut offset = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in 0..n {
            offset[i][j] = entries.len();
            for f in spaces[i][j].basis() {
                entries.push(SectionEntry { i, j, f: f.clone() });
            }
        }
    }
    let dim = entries.len();
    let mut table = vec![vec![Vec::new(); dim]; dim];
    for a in 0..dim {
        for b in 0..dim {
            let (ea, eb) = (&entries[a], &entries[b]);
            if ea.j != eb.i {
                continue;
            }
            let prod = &ea.f * &eb.f;
            let space = &spaces[ea.i][eb.j];
            let coords = space.coordinates(&prod).ok_or_else(|| {
                Error::Internal(format!("product {prod} escapes L({})", space.divisor()))
            })?;
            table[a][b] = coords
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(t, c)| (offset[ea.i][eb.j] + t, c))
                .collect();
        }
    }

    let blocks = order.equivalence_blocks(pic)?;
    let mut block_of = vec![0; n];
    for (bi, b) in blocks.iter().enumerate() {
        for &i in b {
            block_of[i] = bi;
        }
    }
    let nilpotent: Vec<usize> = (0..dim).filter(|&a| block_of[entries[a].i] != block_of[entries[a].j]).collect();
    let squares_to_zero = nilpotent.iter().all(|&a| nilpotent.iter().all(|&b| table[a][b].is_empty()));
    let structure = if blocks.len() == 1 {
        Structure::FullMatrix
    } else if blocks.len() == n && nilpotent.is_empty() {
        Structure::DiagonalOnly
    } else if blocks.len() == n && squares_to_zero {
        Structure::SplitDiagonalPlusNilpotent(nilpotent.len())
    } else {
        Structure::BlockTriangular { block_sizes: blocks.iter().map(|b| b.len()).collect(), nilpotent_dim: nilpotent.len() }
    };
    Ok(SectionsAlgebra { field: k, n, entries, table, structure })
}

impl SectionsAlgebra {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn entries(&self) -> &[SectionEntry] {
        &self.entries
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    /// Dimension of the `(i, j)` block.
    pub fn block_dim(&self, i: usize, j: usize) -> usize {
        self.entries.iter().filter(|e| e.i == i && e.j == j).count()
    }

    pub fn mul(&self, u: &[Fe], v: &[Fe]) -> Vec<Fe> {
        let k = &self.field;
        let mut out = vec![Fe::ZERO; self.dim()];
        for (a, &ua) in u.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            for (b, &vb) in v.iter().enumerate() {
                if vb.is_zero() {
                    continue;
                }
                let c = k.mul(ua, vb);
                for &(t, s) in &self.table[a][b] {
                    out[t] = k.add(out[t], k.mul(c, s));
                }
            }
        }
        out
    }

    /// The unit `Σ_i 1·E_ii`.
    pub fn one(&self) -> Vec<Fe> {
        self.entries
            .iter()
            .map(|e| if e.i == e.j && e.f.as_constant() == Some(Fe::ONE) { Fe::ONE } else { Fe::ZERO })
            .collect()
    }

    pub fn basis_vector(&self, a: usize) -> Vec<Fe> {
        let mut v = vec![Fe::ZERO; self.dim()];
        v[a] = Fe::ONE;
        v
    }

    /// `(e_a e_b) e_c = e_a (e_b e_c)` for all basis triples.
    pub fn is_associative(&self) -> bool {
        let d = self.dim();
        (0..d).all(|a| {
            (0..d).all(|b| {
                let ab = self.mul(&self.basis_vector(a), &self.basis_vector(b));
                (0..d).all(|c| {
                    let bc = self.mul(&self.basis_vector(b), &self.basis_vector(c));
                    self.mul(&ab, &self.basis_vector(c)) == self.mul(&self.basis_vector(a), &bc)
                })
            })
        })
    }

    /// Minimal polynomial of `u` over `F_q`, from the first linear
    /// dependence among `1, u, u², …`; degrees above `max_deg` give `None`.
    pub fn minimal_polynomial(&self, u: &[Fe], max_deg: usize) -> Option<Poly> {
        let k = &self.field;
        let mut powers = vec![self.one()];
        for _ in 0..max_deg {
            let next = self.mul(powers.last().unwrap(), u);
            if let Some(c) = linalg::solve(k, &powers, &next) {
                // u^deg = Σ c_i u^i
                let mut coeffs: Vec<Fe> = c.iter().map(|&x| k.neg(x)).collect();
                coeffs.push(Fe::ONE);
                return Some(Poly::from_coeffs(k, coeffs));
            }
            powers.push(next);
        }
        None
    }

    /// The element `Σ u_a f_a E_{i_a j_a}` as a matrix of functions.
    pub fn as_matrix(&self, u: &[Fe], curve: &Curve) -> Vec<Vec<Function>> {
        let mut m = vec![vec![Function::zero(curve); self.n]; self.n];
        for (e, &c) in self.entries.iter().zip(u) {
            if !c.is_zero() {
                m[e.i][e.j] = &m[e.i][e.j] + &e.f.scale(c);
            }
        }
        m
    }
}

/// `Δ_B` and `Δ_D` in `M_2(K)` are conjugate iff `B ~ D` or `B ~ −D`.
pub fn order_conjugate_m2(b: &Divisor, d: &Divisor, pic: &PicardData) -> Result<bool> {
    Ok(pic.is_principal(&b.checked_sub(d)?)? || pic.is_principal(&b.checked_add(d)?)?)
}

/// Which procedure(s) decide constant-field embeddings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbeddingMode {
    Structural,
    BruteForce,
    /// Structural, cross-checked by brute force when within budget.
    Both,
}

/// Largest section algebra searched exhaustively.
pub const BRUTE_FORCE_BUDGET: u64 = 6561;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingVerdict {
    pub admits: bool,
    pub structural: Option<bool>,
    pub brute_force: Option<bool>,
    /// Coordinates of an element generating `F_{q^n}`.
    pub witness: Option<Vec<Fe>>,
    pub minimal_polynomial: Option<Poly>,
}

fn irreducible_of_degree(p: &Poly, n: usize) -> bool {
    p.degree() == Some(n) && p.is_irreducible()
}

/// Lexicographically first element whose minimal polynomial is irreducible
/// of degree `n`, by exhaustive search.
fn brute_force_embedding(alg: &SectionsAlgebra, n: usize) -> Result<Option<(Vec<Fe>, Poly)>> {
    let k = &alg.field;
    let q = k.order() as u64;
    let dim = alg.dim();
    let total = q.checked_pow(dim as u32).unwrap_or(u64::MAX);
    if total > BRUTE_FORCE_BUDGET {
        return Err(Error::BudgetExceeded(format!("{q}^{dim} section elements exceed {BRUTE_FORCE_BUDGET}")));
    }
    let irreducible: HashSet<Poly> = Poly::irreducibles_of_degree(k, n).into_iter().collect();
    let elems: Vec<Fe> = k.elements().collect();
    let mut idx = vec![0usize; dim];
    loop {
        let u: Vec<Fe> = idx.iter().map(|&i| elems[i]).collect();
        if let Some(m) = alg.minimal_polynomial(&u, n) {
            if irreducible.contains(&m) {
                return Ok(Some((u, m)));
            }
        }
        // odometer, last coordinate fastest
        let mut pos = dim;
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < elems.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Structural witness for a full matrix algebra: the companion matrix of an
/// irreducible degree-`n` polynomial, transported by `t_i/t_j` where
/// `t_i` spans `L(B_i − B_1)`.
fn structural_witness(order: &SplitOrder, alg: &SectionsAlgebra) -> Result<(Vec<Fe>, Poly)> {
    let k = &alg.field;
    let n = order.n();
    let g = Poly::irreducibles_of_degree(k, n).into_iter().next().expect("irreducibles exist in every degree");
    let t: Vec<Function> = (0..n)
        .map(|i| {
            let s = rr_space(&order.entry_divisor(i, 0))?;
            s.basis().first().cloned().ok_or_else(|| Error::Internal("equivalent divisors without a section".into()))
        })
        .collect::<Result<_>>()?;
    // companion matrix: C[i+1][i] = 1, C[i][n-1] = −g_i
    let mut c = vec![vec![Fe::ZERO; n]; n];
    for i in 0..n {
        if i + 1 < n {
            c[i + 1][i] = Fe::ONE;
        }
        c[i][n - 1] = k.neg(g.coeff(i));
    }
    let mut u = vec![Fe::ZERO; alg.dim()];
    for i in 0..n {
        for j in 0..n {
            if c[i][j].is_zero() {
                continue;
            }
            let entry = t[i].div(&t[j])?.scale(c[i][j]);
            // each block of a full matrix algebra is one-dimensional
            let start = (0..alg.dim()).find(|&a| alg.entries[a].i == i && alg.entries[a].j == j).expect("block present");
            let coeff = entry.div(&alg.entries[start].f)?.as_constant().ok_or_else(|| {
                Error::Internal("entry of a full matrix algebra is not a multiple of its section".into())
            })?;
            u[start] = k.add(u[start], coeff);
        }
    }
    let m = alg.minimal_polynomial(&u, n).ok_or_else(|| Error::Internal("companion witness has no minimal polynomial".into()))?;
    if m != g {
        return Err(Error::Internal(format!("companion witness has minimal polynomial {m}, expected {g}")));
    }
    Ok((u, m))
}

/// Whether `F_{q^n}` embeds into `Δ(X)`.
///
/// Structurally this happens iff all `B_i` are linearly equivalent, i.e.
/// `Δ ≅ M_n(O_X)`; otherwise the sections are block triangular with split
/// characteristic polynomials on the diagonal blocks.
pub fn admits_constant_field_embedding(order: &SplitOrder, pic: &PicardData, mode: EmbeddingMode) -> Result<EmbeddingVerdict> {
    let alg = order_sections(order, pic)?;
    let n = order.n();
    let mut verdict = EmbeddingVerdict { admits: false, structural: None, brute_force: None, witness: None, minimal_polynomial: None };
    if mode != EmbeddingMode::BruteForce {
        let s = alg.structure == Structure::FullMatrix;
        verdict.structural = Some(s);
        verdict.admits = s;
        if s {
            let (w, m) = structural_witness(order, &alg)?;
            verdict.witness = Some(w);
            verdict.minimal_polynomial = Some(m);
        }
    }
    let within_budget = (alg.field.order() as u64).checked_pow(alg.dim() as u32).is_some_and(|t| t <= BRUTE_FORCE_BUDGET);
    if mode == EmbeddingMode::BruteForce || (mode == EmbeddingMode::Both && within_budget) {
        let found = brute_force_embedding(&alg, n)?;
        verdict.brute_force = Some(found.is_some());
        if let Some(s) = verdict.structural {
            if s != found.is_some() {
                return Err(Error::Internal(format!(
                    "structural criterion says {s}, exhaustive search says {}",
                    found.is_some()
                )));
            }
        } else {
            verdict.admits = found.is_some();
        }
        if let Some((w, m)) = found {
            verdict.witness = Some(w);
            verdict.minimal_polynomial = Some(m);
        }
    }
    if let Some(m) = &verdict.minimal_polynomial {
        debug_assert!(irreducible_of_degree(m, n));
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Place;

    fn f3() -> FiniteField {
        FiniteField::prime(3).unwrap()
    }

    fn e3() -> Curve {
        let k = f3();
        Curve::elliptic(&k, Poly::from_ints(&k, &[0, -1, 0, 1])).unwrap()
    }

    fn inf(c: &Curve, n: i64) -> Divisor {
        Divisor::place(c, Place::Infinity, n).unwrap()
    }

    #[test]
    fn lattice_section_dimensions() {
        let c = Curve::projective_line(&f3());
        let l = DecomposableLattice::new(&c, vec![Divisor::zero(&c), Divisor::zero(&c), inf(&c, 2), inf(&c, -2)]).unwrap();
        let dims: Vec<usize> = l.sections().unwrap().iter().map(|s| s.dim()).collect();
        assert_eq!(dims, [1, 1, 3, 0]);
        let e = e3();
        let k = e.field().clone();
        let b = Divisor::from_terms(&e, [(Place::Affine(k.zero(), k.zero()), 1), (Place::Origin, -1)]).unwrap();
        let l = DecomposableLattice::new(&e, vec![b]).unwrap();
        assert_eq!(l.sections().unwrap()[0].dim(), 0);
    }

    #[test]
    fn m2_structures() {
        let c = Curve::projective_line(&f3());
        let pic = PicardData::new(&c).unwrap();
        let a = order_sections(&SplitOrder::m2(&Divisor::zero(&c)), &pic).unwrap();
        assert_eq!((a.dim(), a.structure().clone()), (4, Structure::FullMatrix));
        let a = order_sections(&SplitOrder::m2(&inf(&c, 2)), &pic).unwrap();
        assert_eq!((a.dim(), a.structure().clone()), (5, Structure::SplitDiagonalPlusNilpotent(3)));
        assert!(a.is_associative());
        let e = e3();
        let pic = PicardData::new(&e).unwrap();
        let k = e.field().clone();
        let b = Divisor::from_terms(&e, [(Place::Affine(k.zero(), k.zero()), 1), (Place::Origin, -1)]).unwrap();
        let a = order_sections(&SplitOrder::m2(&b), &pic).unwrap();
        assert_eq!((a.dim(), a.structure().clone()), (2, Structure::DiagonalOnly));
    }

    #[test]
    fn conjugacy_examples() {
        let c = Curve::projective_line(&f3());
        let pic = PicardData::new(&c).unwrap();
        assert!(order_conjugate_m2(&inf(&c, 1), &inf(&c, -1), &pic).unwrap());
        let k = c.field().clone();
        let d = Divisor::from_terms(&c, [(Place::Finite(Poly::x(&k)), 1), (Place::Infinity, 1)]).unwrap();
        assert!(order_conjugate_m2(&inf(&c, 2), &d, &pic).unwrap());
        let e = e3();
        let pic = PicardData::new(&e).unwrap();
        let b = Divisor::from_terms(&e, [(Place::Affine(k.zero(), k.zero()), 1), (Place::Origin, -1)]).unwrap();
        let d = Divisor::from_terms(&e, [(Place::Affine(k.one(), k.zero()), 1), (Place::Origin, -1)]).unwrap();
        assert!(!order_conjugate_m2(&b, &d, &pic).unwrap());
    }

    #[test]
    fn embedding_examples() {
        let c = Curve::projective_line(&f3());
        let pic = PicardData::new(&c).unwrap();
        let v = admits_constant_field_embedding(&SplitOrder::m2(&Divisor::zero(&c)), &pic, EmbeddingMode::Both).unwrap();
        assert!(v.admits && v.structural == Some(true) && v.brute_force == Some(true));
        let v = admits_constant_field_embedding(&SplitOrder::m2(&inf(&c, 1)), &pic, EmbeddingMode::Both).unwrap();
        assert_eq!((v.admits, v.brute_force), (false, Some(false)));
        let e = e3();
        let pic = PicardData::new(&e).unwrap();
        let k = e.field().clone();
        let b = Divisor::from_terms(&e, [(Place::Affine(k.zero(), k.zero()), 1), (Place::Origin, -1)]).unwrap();
        let v = admits_constant_field_embedding(&SplitOrder::m2(&b), &pic, EmbeddingMode::Both).unwrap();
        assert_eq!((v.admits, v.brute_force), (false, Some(false)));
    }

    #[test]
    fn rank_three_full_matrix_witness() {
        let c = Curve::projective_line(&f3());
        let pic = PicardData::new(&c).unwrap();
        let k = c.field().clone();
        let order = SplitOrder::new(
            &c,
            vec![Divisor::zero(&c), Divisor::zero(&c), &Divisor::place(&c, Place::Finite(Poly::x(&k)), 1).unwrap() - &inf(&c, 1)],
        )
        .unwrap();
        let alg = order_sections(&order, &pic).unwrap();
        assert_eq!(alg.structure(), &Structure::FullMatrix);
        assert_eq!(alg.dim(), 9);
        let v = admits_constant_field_embedding(&order, &pic, EmbeddingMode::Structural).unwrap();
        assert!(v.admits);
        assert_eq!(v.minimal_polynomial.unwrap().degree(), Some(3));
    }
}
