//! Spinor class fields as finite quotients of `Pic(X)`.
//!
//! The spinor class field of a genus is represented by its Galois group `Q`
//! together with the Frobenius map `P ↦ image of class(P)` (Artin
//! reciprocity). For split maximal orders in `M_n(K)` the relevant norm
//! group is `J^n O^*`, so `Q = Pic/nPic`; for the unimodular quadratic
//! family `L(B)` it is `J^2 O^*`, so `Q = Pic/2Pic`. Spinor genera inside a
//! genus are told apart by the image of a class in `Q`.

use std::collections::BTreeMap;
use std::fmt;

use crate::abelian::AbelianGroup;
use crate::curve::{Curve, Place};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::picard::{DivisorClass, PicQuotient, PicardData};
use crate::quadratic::QuadLattice;
use crate::sheaf::SplitOrder;

/// Genus families with a known norm group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Maximal orders in `M_n(K)`.
    SplitOrders(usize),
    /// The quadratic lattices `L(B)` of rank `n ≥ 3`.
    UnimodularQuadratic(usize),
}

impl Family {
    /// Exponent `m` with norm group `J^m O^*`.
    pub fn exponent(&self) -> i64 {
        match self {
            Family::SplitOrders(n) => *n as i64,
            Family::UnimodularQuadratic(_) => 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::SplitOrders(n) => write!(f, "split maximal orders in M_{n}(K)"),
            Family::UnimodularQuadratic(n) => write!(f, "quadratic lattices L(B) of rank {n}"),
        }
    }
}

/// An element of a class-field quotient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinorGenusTag(pub Vec<i64>);

impl SpinorGenusTag {
    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for SpinorGenusTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A finite quotient `Q` of `Pic(X)` standing for a spinor class field.
#[derive(Clone, Debug)]
pub struct ClassFieldQuotient {
    pic: PicardData,
    family: Family,
    quotient: PicQuotient,
    removed: Vec<Place>,
}

impl ClassFieldQuotient {
    pub fn curve(&self) -> &Curve {
        self.pic.curve()
    }

    pub fn picard(&self) -> &PicardData {
        &self.pic
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn group(&self) -> &AbelianGroup {
        self.quotient.group()
    }

    pub fn order(&self) -> u64 {
        self.group().order().expect("class-field quotients are finite")
    }

    /// Places whose Frobenius has been killed.
    pub fn removed(&self) -> &[Place] {
        &self.removed
    }

    /// Which norm group this quotient encodes.
    pub fn label(&self) -> String {
        let m = self.family.exponent();
        let mut s = format!("Pic(X)/{m}Pic(X) for {}", self.family);
        if !self.removed.is_empty() {
            let k = self.curve().field();
            let ps: Vec<String> = self.removed.iter().map(|p| p.format(k)).collect();
            s.push_str(&format!(", split at {}", ps.join(" ")));
        }
        s
    }

    pub fn project(&self, c: &DivisorClass) -> SpinorGenusTag {
        SpinorGenusTag(self.quotient.project(c))
    }

    pub fn tag_of_divisor(&self, d: &Divisor) -> Result<SpinorGenusTag> {
        Ok(self.project(&self.pic.class_of(d)?))
    }

    /// Frobenius of a place: the image of its class.
    pub fn frobenius(&self, p: &Place) -> Result<SpinorGenusTag> {
        self.curve().validate_place(p)?;
        Ok(self.project(&self.pic.class_of_place(p)?))
    }

    /// Every element of `Q`.
    pub fn tags(&self) -> Vec<SpinorGenusTag> {
        self.group().elements().into_iter().map(SpinorGenusTag).collect()
    }

    /// `Q` is trivial exactly when the class field is `K(X)` itself.
    pub fn is_trivial(&self) -> bool {
        self.group().is_trivial()
    }
}

pub fn spinor_class_group(family: Family, pic: &PicardData) -> Result<ClassFieldQuotient> {
    match family {
        Family::SplitOrders(n) if n < 2 => {
            return Err(Error::InvalidArgument(format!("orders in M_n need n ≥ 2, got {n}")));
        }
        Family::UnimodularQuadratic(n) if n < 3 => {
            return Err(Error::InvalidArgument(format!("quadratic lattices need rank ≥ 3, got {n}")));
        }
        Family::UnimodularQuadratic(_) if pic.curve().field().characteristic() == 2 => {
            return Err(Error::CharacteristicTwo);
        }
        _ => {}
    }
    Ok(ClassFieldQuotient {
        pic: pic.clone(),
        family,
        quotient: pic.pic_mod_n(family.exponent())?,
        removed: Vec::new(),
    })
}

/// Objects carrying a spinor-genus invariant.
#[derive(Clone, Debug)]
pub enum SpinorObject {
    Lattice(QuadLattice),
    Order(SplitOrder),
}

impl SpinorObject {
    /// `Δ_B = Δ(B, 0)`.
    pub fn m2(b: &Divisor) -> Self {
        SpinorObject::Order(SplitOrder::m2(b))
    }

    fn family(&self) -> Family {
        match self {
            SpinorObject::Lattice(l) => Family::UnimodularQuadratic(l.rank()),
            SpinorObject::Order(o) => Family::SplitOrders(o.n()),
        }
    }

    /// The divisor whose class is the invariant: `B` for `L(B)`, `Σ B_i`
    /// for `Δ(B_1..B_n)`.
    pub fn divisor(&self) -> Divisor {
        match self {
            SpinorObject::Lattice(l) => l.divisor().clone(),
            SpinorObject::Order(o) => {
                o.divisors().iter().fold(Divisor::zero(o.curve()), |acc, d| &acc + d)
            }
        }
    }
}

/// `ρ`: image of the object's class in `Q`.
pub fn rho_invariant(object: &SpinorObject, q: &ClassFieldQuotient) -> Result<SpinorGenusTag> {
    if object.family() != q.family {
        return Err(Error::KindMismatch(format!("{} object against a quotient for {}", object.family(), q.family)));
    }
    q.tag_of_divisor(&object.divisor())
}

pub fn same_spinor_genus(a: &SpinorObject, b: &SpinorObject, q: &ClassFieldQuotient) -> Result<bool> {
    Ok(rho_invariant(a, q)? == rho_invariant(b, q)?)
}

/// The maximal subextension split at the removed places:
/// `Q / ⟨Frob(P) : P removed⟩`.
pub fn restrict_to_open(q: &ClassFieldQuotient, removed: &[Place]) -> Result<ClassFieldQuotient> {
    let mut classes = Vec::new();
    for p in removed {
        q.curve().validate_place(p)?;
        classes.push(q.pic.class_of_place(p)?);
    }
    let mut all = q.removed.clone();
    for p in removed {
        if !all.contains(p) {
            all.push(p.clone());
        }
    }
    all.sort();
    Ok(ClassFieldQuotient {
        pic: q.pic.clone(),
        family: q.family,
        quotient: q.quotient.quotient_by(&classes),
        removed: all,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonsplitBound {
    /// `|T/nT| − 1`.
    pub bound: u64,
    /// `|Pic/nPic| = n·|T/nT|`.
    pub spinor_genera: u64,
    /// `|T/nT|`.
    pub torsion_quotient: u64,
}

/// Lower bound on the number of spinor genera of maximal orders in `M_n(K)`
/// that contain non-split orders.
pub fn nonsplit_lower_bound(pic: &PicardData, n: usize) -> Result<NonsplitBound> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be at least 2, got {n}")));
    }
    let total = pic.pic_mod_n(n as i64)?.order().expect("finite");
    let tq = total / n as u64;
    Ok(NonsplitBound { bound: tq - 1, spinor_genera: total, torsion_quotient: tq })
}

/// One split order `Δ(B, 0, …, 0)` per spinor genus, with `B = d·P_0 +
/// (R − P_0)` for `0 ≤ d < n` and rational points `R`; the first divisor
/// reaching each tag is kept.
pub fn split_representatives(pic: &PicardData, n: usize) -> Result<BTreeMap<SpinorGenusTag, SplitOrder>> {
    let q = spinor_class_group(Family::SplitOrders(n), pic)?;
    let curve = pic.curve();
    let base = pic.base_place();
    let shifts: Vec<Divisor> = if curve.is_elliptic() {
        pic.points()
            .iter()
            .map(|r| Divisor::from_terms(curve, [(r.clone(), 1), (base.clone(), -1)]))
            .collect::<Result<_>>()?
    } else {
        vec![Divisor::zero(curve)]
    };
    let mut out = BTreeMap::new();
    for d in 0..n as i64 {
        let db = Divisor::place(curve, base.clone(), d)?;
        for s in &shifts {
            let b = &db + s;
            let mut divisors = vec![b];
            divisors.extend(std::iter::repeat_n(Divisor::zero(curve), n - 1));
            let order = SplitOrder::new(curve, divisors)?;
            let tag = rho_invariant(&SpinorObject::Order(order.clone()), &q)?;
            out.entry(tag).or_insert(order);
        }
    }
    if out.len() as u64 != q.order() {
        return Err(Error::Internal(format!("{} representatives for {} spinor genera", out.len(), q.order())));
    }
    Ok(out)
}

/// A local generator `a(π^j)` at a place of `supp(B)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorCandidate {
    pub place: Place,
    pub j: i64,
    /// Whether `M_℘ ⊆ u Λ_℘`.
    pub admissible: bool,
}

#[derive(Clone, Debug)]
pub struct RepresentingReport {
    pub quotient: ClassFieldQuotient,
    pub candidates: Vec<GeneratorCandidate>,
    /// Subgroup of `Q` generated by differences of admissible norm classes.
    pub subgroup: Vec<SpinorGenusTag>,
    /// Tags of spinor genera certified to represent `M`.
    pub certified: Vec<SpinorGenusTag>,
    pub count: u64,
    pub total: u64,
    /// Whether the count is asserted to be exact rather than a lower bound.
    pub exact: bool,
}

impl RepresentingReport {
    pub fn qualifier(&self) -> &'static str {
        if self.exact {
            "exact"
        } else {
            "lower bound"
        }
    }
}

/// Spinor genera in the genus of `L(B)` certified to represent the
/// hyperbolic pair `M = O v_{n−1} + O v_n`.
///
/// At `℘ ∈ supp(B)` with coefficient `b`, the rescaling `u = a(π^j)` sends
/// `Λ_℘ = … ⊕ π^{−b} O v_{n−1} ⊕ π^{b} O v_n` to
/// `… ⊕ π^{j−b} O v_{n−1} ⊕ π^{b−j} O v_n`, and is a generator for `Λ|M`
/// when that contains `M_℘`. Its spinor norm class is `j[℘]`. Units have
/// trivial norm class. Each admissible family of local generators certifies
/// the tag `class(B) − Σ j_℘[℘]` up to the subgroup spanned by differences
/// between admissible choices.
pub fn representing_genera_hyperbolic_pair(l: &QuadLattice, pic: &PicardData) -> Result<RepresentingReport> {
    let quotient = spinor_class_group(Family::UnimodularQuadratic(l.rank()), pic)?;
    let b = l.divisor();
    let mut candidates = Vec::new();
    let mut chosen = Divisor::zero(l.curve());
    let mut diffs: Vec<SpinorGenusTag> = Vec::new();
    for (p, bp) in b.terms() {
        let range: Vec<i64> = if bp >= 0 { (0..=bp).collect() } else { (bp..=0).collect() };
        let mut admissible = Vec::new();
        for j in range {
            // exponents of π on v_{n−1}, v_n in uΛ_℘; M_℘ needs both ≤ 0
            let ok = j - bp <= 0 && bp - j <= 0;
            candidates.push(GeneratorCandidate { place: p.clone(), j, admissible: ok });
            if ok {
                admissible.push(j);
            }
        }
        let Some(&first) = admissible.first() else {
            return Err(Error::Internal(format!("no generator at {}", p.format(l.curve().field()))));
        };
        chosen = &chosen + &Divisor::place(l.curve(), p.clone(), first)?;
        for &j in &admissible[1..] {
            diffs.push(quotient.tag_of_divisor(&Divisor::place(l.curve(), p.clone(), j - first)?)?);
        }
    }
    let group = quotient.group().clone();
    let gens: Vec<Vec<i64>> = diffs.iter().map(|t| t.0.clone()).collect();
    let subgroup: Vec<SpinorGenusTag> = group.subgroup_elements(&gens).into_iter().map(SpinorGenusTag).collect();
    let base = quotient.tag_of_divisor(&b.checked_sub(&chosen)?)?;
    let mut certified: Vec<SpinorGenusTag> =
        subgroup.iter().map(|s| SpinorGenusTag(group.add(&base.0, &s.0))).collect();
    certified.sort();
    certified.dedup();
    let count = certified.len() as u64;
    let total = quotient.order();
    let exact = !l.curve().is_elliptic() && 2 * count == total;
    Ok(RepresentingReport { quotient, candidates, subgroup, certified, count, total, exact })
}
