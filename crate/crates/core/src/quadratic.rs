//! Quadratic lattices `L(B) = ⊥_{i ≤ n−2} O v_i ⊥ (L^B v_{n−1} ⊕ L^{−B} v_n)`
//! with form `Σ g_i² + g_{n−1} g_n`, and quadratic spaces over `F_q`.
//!
//! Gram matrices store the bilinear form `b(u, v) = (Q(u+v) − Q(u) − Q(v))/2`,
//! so `Q(v) = b(v, v)`. Nondegenerate spaces over a finite field of odd
//! characteristic are classified by dimension and discriminant class.

use std::fmt;

use crate::curve::Curve;
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};
use crate::linalg;
use crate::riemann_roch::rr_space;
use crate::sheaf::DecomposableLattice;

/// The lattice `L(B)` of rank `n ≥ 3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadLattice {
    curve: Curve,
    rank: usize,
    b: Divisor,
}

impl QuadLattice {
    pub fn new(curve: &Curve, rank: usize, b: Divisor) -> Result<Self> {
        if curve.field().characteristic() == 2 {
            return Err(Error::CharacteristicTwo);
        }
        if rank < 3 {
            return Err(Error::InvalidArgument(format!("quadratic lattices need rank ≥ 3, got {rank}")));
        }
        if b.curve() != curve {
            return Err(Error::CurveMismatch(b.curve().to_string(), curve.to_string()));
        }
        Ok(QuadLattice { curve: curve.clone(), rank, b })
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn divisor(&self) -> &Divisor {
        &self.b
    }

    /// Component divisors `(0, …, 0, B, −B)`.
    pub fn as_decomposable(&self) -> DecomposableLattice {
        let mut ds = vec![Divisor::zero(&self.curve); self.rank - 2];
        ds.push(self.b.clone());
        ds.push(-&self.b);
        DecomposableLattice::new(&self.curve, ds).expect("same curve")
    }
}

/// Square class of a nonzero element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SquareClass {
    Square,
    NonSquare,
}

impl SquareClass {
    pub fn of(k: &FiniteField, a: Fe) -> Self {
        if k.is_square(a) {
            SquareClass::Square
        } else {
            SquareClass::NonSquare
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SquareClass::Square => "square",
            SquareClass::NonSquare => "nonsquare",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittInvariants {
    pub dim: usize,
    pub radical_dim: usize,
    /// Discriminant class of the nondegenerate quotient (square when it is 0).
    pub discriminant: SquareClass,
    pub witt_index: usize,
}

/// A quadratic space over `F_q` (`q` odd) given by its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadSpace {
    field: FiniteField,
    gram: Vec<Vec<Fe>>,
}

impl QuadSpace {
    pub fn new(field: &FiniteField, gram: Vec<Vec<Fe>>) -> Result<Self> {
        if field.characteristic() == 2 {
            return Err(Error::CharacteristicTwo);
        }
        let n = gram.len();
        if gram.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("Gram matrix is not square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidArgument("Gram matrix is not symmetric".into()));
                }
            }
        }
        Ok(QuadSpace { field: field.clone(), gram })
    }

    /// `⟨a_1, …, a_n⟩`.
    pub fn diagonal(field: &FiniteField, entries: &[Fe]) -> Result<Self> {
        let n = entries.len();
        let gram = (0..n).map(|i| (0..n).map(|j| if i == j { entries[i] } else { Fe::ZERO }).collect()).collect();
        Self::new(field, gram)
    }

    /// The hyperbolic plane `Q(x, y) = xy`.
    pub fn hyperbolic_plane(field: &FiniteField) -> Result<Self> {
        if field.characteristic() == 2 {
            return Err(Error::CharacteristicTwo);
        }
        let half = field.inv(field.from_int(2))?;
        Self::new(field, vec![vec![Fe::ZERO, half], vec![half, Fe::ZERO]])
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn gram(&self) -> &[Vec<Fe>] {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn b(&self, u: &[Fe], v: &[Fe]) -> Fe {
        linalg::bilinear(&self.field, &self.gram, u, v)
    }

    pub fn q(&self, v: &[Fe]) -> Fe {
        self.b(v, v)
    }

    pub fn orthogonal_sum(&self, other: &QuadSpace) -> Result<QuadSpace> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.to_string(), other.field.to_string()));
        }
        let (m, n) = (self.dim(), other.dim());
        let mut gram = vec![vec![Fe::ZERO; m + n]; m + n];
        for i in 0..m {
            gram[i][..m].copy_from_slice(&self.gram[i]);
        }
        for i in 0..n {
            gram[m + i][m..].copy_from_slice(&other.gram[i]);
        }
        QuadSpace::new(&self.field, gram)
    }

    pub fn radical_basis(&self) -> Vec<Vec<Fe>> {
        linalg::nullspace(&self.field, &self.gram, self.dim())
    }

    /// Diagonal entries of a congruent diagonal form.
    pub fn diagonalize(&self) -> Vec<Fe> {
        let k = &self.field;
        let n = self.dim();
        let mut g = self.gram.clone();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            if g[i][i].is_zero() {
                if let Some(j) = (i + 1..n).find(|&j| !g[j][j].is_zero()) {
                    // swap basis vectors i and j
                    g.swap(i, j);
                    for row in g.iter_mut() {
                        row.swap(i, j);
                    }
                } else if let Some(j) = (i + 1..n).find(|&j| !g[i][j].is_zero()) {
                    // v_i ← v_i + v_j, so b(v_i, v_i) = 2 b(v_i, v_j) ≠ 0
                    for c in 0..n {
                        g[i][c] = k.add(g[i][c], g[j][c]);
                    }
                    for r in 0..n {
                        g[r][i] = k.add(g[r][i], g[r][j]);
                    }
                }
            }
            let p = g[i][i];
            out.push(p);
            if p.is_zero() {
                continue;
            }
            let pinv = k.inv(p).unwrap();
            for j in i + 1..n {
                let f = k.mul(g[j][i], pinv);
                if f.is_zero() {
                    continue;
                }
                for c in 0..n {
                    g[j][c] = k.sub(g[j][c], k.mul(f, g[i][c]));
                }
                for r in 0..n {
                    g[r][j] = k.sub(g[r][j], k.mul(f, g[r][i]));
                }
            }
        }
        out
    }

    pub fn witt_invariants(&self) -> WittInvariants {
        let k = &self.field;
        let diag = self.diagonalize();
        let nonzero: Vec<Fe> = diag.iter().copied().filter(|d| !d.is_zero()).collect();
        let r = nonzero.len();
        let det = nonzero.iter().fold(Fe::ONE, |acc, &d| k.mul(acc, d));
        let witt_index = if r % 2 == 1 {
            (r - 1) / 2
        } else if r == 0 {
            0
        } else {
            let sign = if (r / 2) % 2 == 1 { k.neg(det) } else { det };
            if k.is_square(sign) {
                r / 2
            } else {
                r / 2 - 1
            }
        };
        WittInvariants { dim: self.dim(), radical_dim: self.dim() - r, discriminant: SquareClass::of(k, det), witt_index }
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.witt_invariants().radical_dim == 0
    }

    pub fn is_anisotropic(&self) -> bool {
        let w = self.witt_invariants();
        w.radical_dim == 0 && w.witt_index == 0
    }
}

impl fmt::Display for QuadSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .gram
            .iter()
            .map(|r| r.iter().map(|&c| self.field.format(c)).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

/// Global sections of `L(B)` as a quadratic space over `F_q`, in the basis
/// `v_1, …, v_{n−2}, f_k v_{n−1}, g_l v_n` with `f_k`, `g_l` bases of
/// `L(B)(X)` and `L(−B)(X)`.
pub fn sections_quadspace(l: &QuadLattice) -> Result<QuadSpace> {
    let k = l.curve.field();
    let plus = rr_space(&l.b)?;
    let minus = rr_space(&-&l.b)?;
    let units = l.rank - 2;
    let (dp, dm) = (plus.dim(), minus.dim());
    let n = units + dp + dm;
    let half = k.inv(k.from_int(2))?;
    let mut gram = vec![vec![Fe::ZERO; n]; n];
    for (i, row) in gram.iter_mut().enumerate().take(units) {
        row[i] = Fe::ONE;
    }
    for (a, f) in plus.basis().iter().enumerate() {
        for (c, g) in minus.basis().iter().enumerate() {
            let prod = f * g;
            let val = prod.as_constant().ok_or_else(|| {
                Error::Internal(format!("product of sections {prod} is not constant"))
            })?;
            let v = k.mul(val, half);
            gram[units + a][units + dp + c] = v;
            gram[units + dp + c][units + a] = v;
        }
    }
    QuadSpace::new(k, gram)
}

/// Which procedure(s) decide isometric embeddings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Invariants,
    BruteForce,
    /// Invariants when applicable, cross-checked by brute force within budget.
    Both,
}

pub const EMBEDDING_BUDGET: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingReport {
    pub embeds: bool,
    pub by_invariants: Option<bool>,
    pub by_search: Option<bool>,
    /// Images of the basis of `M`, in coordinates of `W`.
    pub witness: Option<Vec<Vec<Fe>>>,
    /// Candidate vectors examined by the search.
    pub candidates: u64,
}

fn shortcut(m: &QuadSpace, w: &QuadSpace) -> Option<bool> {
    let im = m.witt_invariants();
    if im.radical_dim != 0 {
        return None;
    }
    let iw = w.witt_invariants();
    let rw = iw.dim - iw.radical_dim;
    Some(im.dim < rw || (im.dim == rw && im.discriminant == iw.discriminant))
}

/// Lexicographically first tuple `(w_1, …, w_m)` of linearly independent
/// vectors of `W` with `b(w_i, w_j) = M_ij`, by depth-first search.
fn search(m: &QuadSpace, w: &QuadSpace) -> (Option<Vec<Vec<Fe>>>, u64) {
    let elems: Vec<Fe> = w.field.elements().collect();
    let dw = w.dim();
    let vectors: Vec<Vec<Fe>> = {
        let mut out = Vec::with_capacity(elems.len().pow(dw as u32));
        let mut idx = vec![0usize; dw];
        loop {
            out.push(idx.iter().map(|&i| elems[i]).collect());
            let mut pos = dw;
            let done = loop {
                if pos == 0 {
                    break true;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < elems.len() {
                    break false;
                }
                idx[pos] = 0;
            };
            if done {
                break;
            }
        }
        out
    };
    let mut chosen: Vec<Vec<Fe>> = Vec::new();
    let mut count = 0u64;
    fn rec(
        m: &QuadSpace,
        w: &QuadSpace,
        vectors: &[Vec<Fe>],
        chosen: &mut Vec<Vec<Fe>>,
        count: &mut u64,
    ) -> bool {
        let i = chosen.len();
        if i == m.dim() {
            return linalg::is_independent(&w.field, chosen);
        }
        for v in vectors {
            *count += 1;
            if w.q(v) != m.gram[i][i] {
                continue;
            }
            if (0..i).any(|j| w.b(&chosen[j], v) != m.gram[j][i]) {
                continue;
            }
            chosen.push(v.clone());
            if rec(m, w, vectors, chosen, count) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let found = rec(m, w, &vectors, &mut chosen, &mut count);
    (found.then_some(chosen), count)
}

/// Whether `M` embeds isometrically into `W`.
pub fn embeds_isometrically(m: &QuadSpace, w: &QuadSpace, mode: SearchMode) -> Result<EmbeddingReport> {
    if m.field != w.field {
        return Err(Error::FieldMismatch(m.field.to_string(), w.field.to_string()));
    }
    let by_invariants = if mode == SearchMode::BruteForce { None } else { shortcut(m, w) };
    let q = w.field.order() as u64;
    let budget = q.checked_pow((w.dim() * m.dim()) as u32).filter(|&t| t <= EMBEDDING_BUDGET);
    let run_search = match mode {
        SearchMode::BruteForce => true,
        SearchMode::Both => budget.is_some(),
        SearchMode::Invariants => by_invariants.is_none(),
    };
    if run_search && budget.is_none() {
        return Err(Error::BudgetExceeded(format!("{q}^({}·{}) candidate tuples", w.dim(), m.dim())));
    }
    if !run_search {
        let Some(e) = by_invariants else {
            return Err(Error::BudgetExceeded("degenerate source space needs a search".into()));
        };
        return Ok(EmbeddingReport { embeds: e, by_invariants, by_search: None, witness: None, candidates: 0 });
    }
    let (witness, candidates) = search(m, w);
    let by_search = Some(witness.is_some());
    if let (Some(a), Some(b)) = (by_invariants, by_search) {
        if a != b {
            return Err(Error::Internal(format!("invariants say {a}, search says {b}")));
        }
    }
    Ok(EmbeddingReport { embeds: witness.is_some(), by_invariants, by_search, witness, candidates })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Obstructed,
    Inconclusive,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Representation::Obstructed => "Obstructed",
            Representation::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub verdict: Representation,
    pub sections: QuadSpace,
    pub invariants: WittInvariants,
    pub embedding: EmbeddingReport,
}

/// Global-section test for `L(B)` representing the hyperbolic pair
/// `M = O v_{n−1} + O v_n`: if the hyperbolic plane `M(X)` does not embed in
/// `L(B)(X)`, no lattice in this family represents `M`. An embedding proves
/// nothing, hence `Inconclusive`.
pub fn represents_obstruction(l: &QuadLattice, mode: SearchMode) -> Result<ObstructionReport> {
    let sections = sections_quadspace(l)?;
    let m = QuadSpace::hyperbolic_plane(l.curve.field())?;
    let embedding = embeds_isometrically(&m, &sections, mode)?;
    let verdict = if embedding.embeds { Representation::Inconclusive } else { Representation::Obstructed };
    Ok(ObstructionReport { verdict, invariants: sections.witt_invariants(), sections, embedding })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Place;

    fn k(p: u32) -> FiniteField {
        FiniteField::prime(p).unwrap()
    }

    fn l(q: u32, n: usize, deg_inf: i64) -> QuadLattice {
        let c = Curve::projective_line(&k(q));
        QuadLattice::new(&c, n, Divisor::place(&c, Place::Infinity, deg_inf).unwrap()).unwrap()
    }

    #[test]
    fn example_b_section_space() {
        let s = sections_quadspace(&l(3, 4, 2)).unwrap();
        let w = s.witt_invariants();
        assert_eq!((w.dim, w.radical_dim, w.witt_index), (5, 3, 0));
        let s0 = sections_quadspace(&l(3, 4, 0)).unwrap();
        let w0 = s0.witt_invariants();
        assert_eq!((w0.dim, w0.radical_dim, w0.witt_index), (4, 0, 1));
        let s3 = sections_quadspace(&l(3, 3, 0)).unwrap();
        assert_eq!((s3.dim(), s3.witt_invariants().radical_dim), (3, 0));
    }

    #[test]
    fn witt_indices_of_small_spaces() {
        let f3 = k(3);
        let unit_plane = QuadSpace::diagonal(&f3, &[Fe::ONE, Fe::ONE]).unwrap();
        assert_eq!(unit_plane.witt_invariants().witt_index, 0);
        assert!(unit_plane.is_anisotropic());
        let f5 = k(5);
        assert_eq!(QuadSpace::diagonal(&f5, &[Fe::ONE, Fe::ONE]).unwrap().witt_invariants().witt_index, 1);
        for p in [3, 5, 7, 11] {
            let h = QuadSpace::hyperbolic_plane(&k(p)).unwrap().witt_invariants();
            assert_eq!(h.witt_index, 1);
            assert_eq!(h.discriminant, SquareClass::of(&k(p), k(p).from_int(-1)));
        }
    }

    #[test]
    fn embedding_examples() {
        let f3 = k(3);
        let h = QuadSpace::hyperbolic_plane(&f3).unwrap();
        let w = QuadSpace::diagonal(&f3, &[Fe::ONE, Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ZERO]).unwrap();
        let r = embeds_isometrically(&h, &w, SearchMode::Both).unwrap();
        assert!(!r.embeds);
        assert_eq!(r.by_search, Some(false));
        assert!(r.candidates <= 243 * 243);
        let w0 = sections_quadspace(&l(3, 4, 0)).unwrap();
        assert!(embeds_isometrically(&h, &w0, SearchMode::Both).unwrap().embeds);
        let one = QuadSpace::diagonal(&f3, &[Fe::ONE]).unwrap();
        let plane = QuadSpace::diagonal(&f3, &[Fe::ONE, Fe::ONE]).unwrap();
        let r = embeds_isometrically(&one, &plane, SearchMode::Both).unwrap();
        assert_eq!(r.witness, Some(vec![vec![Fe::ZERO, Fe::ONE]]));
    }

    #[test]
    fn obstruction_verdicts() {
        assert_eq!(represents_obstruction(&l(3, 4, 2), SearchMode::Both).unwrap().verdict, Representation::Obstructed);
        assert_eq!(represents_obstruction(&l(3, 4, 0), SearchMode::Both).unwrap().verdict, Representation::Inconclusive);
        // over F_5 the unit plane is itself hyperbolic
        assert_eq!(represents_obstruction(&l(5, 4, 2), SearchMode::Both).unwrap().verdict, Representation::Inconclusive);
    }

    #[test]
    fn rejects_characteristic_two() {
        let f2 = k(2);
        assert!(matches!(QuadSpace::hyperbolic_plane(&f2), Err(Error::CharacteristicTwo)));
        let c = Curve::projective_line(&f2);
        assert!(QuadLattice::new(&c, 4, Divisor::zero(&c)).is_err());
    }
}
