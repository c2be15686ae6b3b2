//! Finitely generated abelian groups in Smith normal form.
//!
//! A [`Quotient`] is `Z^k / ⟨relations⟩` together with the map from `Z^k`
//! coordinates onto invariant-factor coordinates, so subgroup quotients and
//! projections can be composed by appending relations.

use std::fmt;

/// `Z/d_1 × … × Z/d_r` with `1 < d_1 | d_2 | …`; a `0` entry is a free factor `Z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    invariants: Vec<i64>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { invariants: Vec::new() }
    }

    /// Group with the given invariant factors; entries equal to 1 are dropped.
    pub fn from_invariants(mut invariants: Vec<i64>) -> Self {
        invariants.retain(|&d| d != 1);
        AbelianGroup { invariants }
    }

    pub fn invariants(&self) -> &[i64] {
        &self.invariants
    }

    pub fn rank(&self) -> usize {
        self.invariants.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.invariants.iter().all(|&d| d > 0)
    }

    /// `None` when infinite.
    pub fn order(&self) -> Option<u64> {
        self.is_finite().then(|| self.invariants.iter().map(|&d| d as u64).product())
    }

    pub fn identity(&self) -> Vec<i64> {
        vec![0; self.invariants.len()]
    }

    pub fn reduce(&self, x: &mut [i64]) {
        for (c, &d) in x.iter_mut().zip(&self.invariants) {
            if d != 0 {
                *c = c.rem_euclid(d);
            }
        }
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut v: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.reduce(&mut v);
        v
    }

    pub fn neg(&self, a: &[i64]) -> Vec<i64> {
        let mut v: Vec<i64> = a.iter().map(|x| -x).collect();
        self.reduce(&mut v);
        v
    }

    pub fn scale(&self, a: &[i64], n: i64) -> Vec<i64> {
        let mut v: Vec<i64> = a.iter().map(|x| x * n).collect();
        self.reduce(&mut v);
        v
    }

    pub fn is_identity(&self, a: &[i64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    /// All elements in mixed-radix order; panics on infinite groups.
    pub fn elements(&self) -> Vec<Vec<i64>> {
        assert!(self.is_finite(), "cannot enumerate an infinite group");
        let mut out = vec![Vec::new()];
        for &d in &self.invariants {
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for e in &out {
                for c in 0..d {
                    let mut v = e.clone();
                    v.push(c);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    /// Order of the subgroup generated by `gens`, by closure.
    pub fn subgroup_order(&self, gens: &[Vec<i64>]) -> u64 {
        self.subgroup_elements(gens).len() as u64
    }

    pub fn subgroup_elements(&self, gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let mut seen = std::collections::BTreeSet::new();
        let mut frontier = vec![self.identity()];
        seen.insert(self.identity());
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.add(&x, g);
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    pub fn format_element(&self, a: &[i64]) -> String {
        let parts: Vec<String> = a.iter().map(|c| c.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariants.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .invariants
            .iter()
            .map(|&d| if d == 0 { "Z".to_string() } else { format!("Z/{d}") })
            .collect();
        f.write_str(&parts.join(" x "))
    }
}

/// Smith normal form `U R V = D` of the integer matrix `R` (`rows × ncols`).
/// Returns the diagonal (length `ncols`, trailing zeros for free columns)
/// and the column transform `V`.
pub fn smith_normal_form(relations: &[Vec<i64>], ncols: usize) -> (Vec<i64>, Vec<Vec<i64>>) {
    let mut a: Vec<Vec<i64>> = relations.iter().filter(|r| r.iter().any(|&c| c != 0)).cloned().collect();
    let nrows = a.len();
    let mut v: Vec<Vec<i64>> = (0..ncols).map(|i| (0..ncols).map(|j| i64::from(i == j)).collect()).collect();

    let swap_cols = |m: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        for row in m.iter_mut() {
            row.swap(i, j);
        }
    };
    // col_j -= q * col_i
    let col_axpy = |m: &mut Vec<Vec<i64>>, j: usize, i: usize, q: i64| {
        for row in m.iter_mut() {
            row[j] -= q * row[i];
        }
    };

    let mut t = 0;
    while t < nrows.min(ncols) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..nrows {
            for j in t..ncols {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..nrows {
                let q = a[i][t].div_euclid(p);
                if q != 0 {
                    for j in t..ncols {
                        a[i][j] -= q * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..ncols {
                let q = a[t][j].div_euclid(p);
                if q != 0 {
                    col_axpy(&mut a, j, t, q);
                    col_axpy(&mut v, j, t, q);
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
            if clean {
                // divisibility of the remaining block by the pivot
                let bad = (t + 1..nrows).find(|&i| (t + 1..ncols).any(|j| a[i][j] % p != 0));
                match bad {
                    None => break,
                    Some(i) => {
                        for j in t..ncols {
                            a[t][j] += a[i][j];
                        }
                        continue;
                    }
                }
            }
            // move the smallest nonzero entry of row t / column t to the pivot
            let mut best = (t, t);
            for i in t..nrows {
                if a[i][t] != 0 && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..ncols {
                if a[t][j] != 0 && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                a.swap(t, best.0);
            }
            if best.1 != t {
                swap_cols(&mut a, t, best.1);
                swap_cols(&mut v, t, best.1);
            }
        }
        if a[t][t] < 0 {
            for j in t..ncols {
                a[t][j] = -a[t][j];
            }
        }
        t += 1;
    }
    let diag = (0..ncols).map(|i| if i < nrows.min(ncols) { a[i][i] } else { 0 }).collect();
    (diag, v)
}

/// `Z^k / ⟨relations⟩` with its projection to invariant-factor coordinates.
#[derive(Clone, Debug)]
pub struct Quotient {
    ngens: usize,
    relations: Vec<Vec<i64>>,
    group: AbelianGroup,
    /// Columns of `V` that survive (diagonal entry ≠ 1), with their moduli.
    proj_cols: Vec<Vec<i64>>,
}

impl Quotient {
    pub fn new(ngens: usize, relations: Vec<Vec<i64>>) -> Self {
        let (diag, v) = smith_normal_form(&relations, ngens);
        let mut keep: Vec<(i64, Vec<i64>)> = Vec::new();
        for (i, &d) in diag.iter().enumerate() {
            if d != 1 {
                keep.push((d, v.iter().map(|row| row[i]).collect()));
            }
        }
        // invariant factors in divisibility order, free factors last
        keep.sort_by_key(|(d, _)| if *d == 0 { i64::MAX } else { *d });
        let group = AbelianGroup { invariants: keep.iter().map(|(d, _)| *d).collect() };
        Quotient { ngens, relations, group, proj_cols: keep.into_iter().map(|(_, c)| c).collect() }
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn relations(&self) -> &[Vec<i64>] {
        &self.relations
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    /// Image of a `Z^k` vector in the quotient.
    pub fn project(&self, x: &[i64]) -> Vec<i64> {
        debug_assert_eq!(x.len(), self.ngens);
        let mut out: Vec<i64> = self
            .proj_cols
            .iter()
            .map(|col| col.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect();
        self.group.reduce(&mut out);
        out
    }

    /// Further quotient by extra relations given in `Z^k` coordinates.
    pub fn with_relations(&self, extra: &[Vec<i64>]) -> Quotient {
        let mut rels = self.relations.clone();
        rels.extend(extra.iter().cloned());
        Quotient::new(self.ngens, rels)
    }
}
