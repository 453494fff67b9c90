//! Affine type A Cartan data on the cycle `Z/eZ`, weight arithmetic, and the
//! folding maps between `Z/2lZ` and `Z/lZ`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::CrystalError;

/// The cyclic index set `Z/eZ` of an affine `A_{e-1}^{(1)}` diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexSet {
    e: u32,
}

impl IndexSet {
    pub fn new(e: u32) -> Result<Self, CrystalError> {
        if e < 2 {
            return Err(CrystalError::InvalidRank(e));
        }
        Ok(IndexSet { e })
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// Canonical residue of an arbitrary integer.
    pub fn residue(&self, value: i64) -> Residue {
        Residue(value.rem_euclid(self.e as i64) as u32)
    }

    pub fn shift(&self, i: Residue, by: i64) -> Residue {
        self.residue(i.0 as i64 + by)
    }

    pub fn contains(&self, i: Residue) -> bool {
        i.0 < self.e
    }

    pub fn residues(&self) -> impl Iterator<Item = Residue> {
        (0..self.e).map(Residue)
    }

    /// Entry `a_{ij} = <h_i, alpha_j>` of the affine Cartan matrix.
    pub fn cartan_pairing(&self, i: Residue, j: Residue) -> i64 {
        if i == j {
            2
        } else if self.e == 2 {
            -2
        } else if self.shift(i, 1) == j || self.shift(i, -1) == j {
            -1
        } else {
            0
        }
    }

    /// `<h_i, w>`.
    pub fn pair_weight(&self, i: Residue, w: &Weight) -> i64 {
        let lambda = w.lambda.get(&i.0).copied().unwrap_or(0);
        let alpha: i64 = w
            .alpha
            .iter()
            .map(|(&j, &c)| c * self.cartan_pairing(i, Residue(j)))
            .sum();
        lambda + alpha
    }

    pub fn check(&self, i: Residue) -> Result<Residue, CrystalError> {
        if self.contains(i) {
            Ok(i)
        } else {
            Err(CrystalError::ResidueOutOfRange { value: i.0, e: self.e })
        }
    }
}

/// A residue class, stored by its canonical representative in `[0, e)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Residue(pub u32);

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A class in `Z/lZ`, the color set of the folded crystal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FoldedIndex(pub u32);

impl fmt::Display for FoldedIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The pair of index sets `Z/2lZ` and `Z/lZ` with the section `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Folding {
    ell: u32,
}

impl Folding {
    /// Requires `l > 2`.
    pub fn new(ell: u32) -> Result<Self, CrystalError> {
        Self::with_small_rank(ell, false)
    }

    /// `allow_l2` admits `l = 2`, for which the folded results are unproven.
    pub fn with_small_rank(ell: u32, allow_l2: bool) -> Result<Self, CrystalError> {
        if ell > 2 || (ell == 2 && allow_l2) {
            Ok(Folding { ell })
        } else {
            Err(CrystalError::FoldingRank(ell))
        }
    }

    /// Folding data for an unfolded index set, which must have even `e = 2l`.
    pub fn from_index_set(idx: IndexSet) -> Result<Self, CrystalError> {
        if !idx.e.is_multiple_of(2) {
            return Err(CrystalError::OddRank(idx.e));
        }
        Self::new(idx.e / 2)
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    /// `Z/2lZ`.
    pub fn unfolded(&self) -> IndexSet {
        IndexSet { e: 2 * self.ell }
    }

    /// `Z/lZ`.
    pub fn folded(&self) -> IndexSet {
        IndexSet { e: self.ell }
    }

    pub fn folded_indices(&self) -> impl Iterator<Item = FoldedIndex> {
        (0..self.ell).map(FoldedIndex)
    }

    pub fn folded_index(&self, value: i64) -> FoldedIndex {
        FoldedIndex(value.rem_euclid(self.ell as i64) as u32)
    }

    pub fn theta(&self, i: FoldedIndex) -> Residue {
        Residue(i.0 % self.ell)
    }

    pub fn fold(&self, i: Residue) -> FoldedIndex {
        FoldedIndex(i.0 % self.ell)
    }

    /// The two letters `(theta(i), theta(i) + l)` of a hat letter.
    pub fn hat_pair(&self, i: FoldedIndex) -> (Residue, Residue) {
        let r = self.theta(i);
        (r, Residue(r.0 + self.ell))
    }

    /// The Dynkin diagram automorphism `i -> i + l`.
    pub fn swap(&self, i: Residue) -> Residue {
        self.unfolded().shift(i, self.ell as i64)
    }

    /// Folds the root part of a weight over `Z/2lZ`; the fundamental-weight
    /// part of the result is empty.
    pub fn fold_weight(&self, w: &Weight) -> Result<Weight, CrystalError> {
        let mut alpha = BTreeMap::new();
        for i in self.folded_indices() {
            let (a, b) = self.hat_pair(i);
            let ca = w.alpha_coeff(a);
            let cb = w.alpha_coeff(b);
            if ca != cb {
                return Err(CrystalError::Unbalanced { index: i.0, low: ca, high: cb });
            }
            if ca != 0 {
                alpha.insert(i.0, ca);
            }
        }
        Ok(Weight { lambda: BTreeMap::new(), alpha })
    }
}

/// A weight `sum_i c_i Lambda_i + sum_i d_i alpha_i`; the null root is not
/// tracked since it pairs to zero with every `h_i`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight {
    pub lambda: BTreeMap<u32, i64>,
    pub alpha: BTreeMap<u32, i64>,
}

impl Weight {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn fundamental(i: Residue) -> Self {
        let mut w = Self::zero();
        w.lambda.insert(i.0, 1);
        w
    }

    pub fn simple_root(i: Residue) -> Self {
        let mut w = Self::zero();
        w.alpha.insert(i.0, 1);
        w
    }

    pub fn lambda_coeff(&self, i: Residue) -> i64 {
        self.lambda.get(&i.0).copied().unwrap_or(0)
    }

    pub fn alpha_coeff(&self, i: Residue) -> i64 {
        self.alpha.get(&i.0).copied().unwrap_or(0)
    }

    pub fn add_alpha(&mut self, i: Residue, c: i64) {
        bump(&mut self.alpha, i.0, c);
    }

    pub fn add_lambda(&mut self, i: Residue, c: i64) {
        bump(&mut self.lambda, i.0, c);
    }

    pub fn is_zero(&self) -> bool {
        self.lambda.is_empty() && self.alpha.is_empty()
    }

    /// Relabels every index through `map`.
    pub fn relabel(&self, map: impl Fn(u32) -> u32) -> Weight {
        let mut out = Weight::zero();
        for (&i, &c) in &self.lambda {
            bump(&mut out.lambda, map(i), c);
        }
        for (&i, &c) in &self.alpha {
            bump(&mut out.alpha, map(i), c);
        }
        out
    }
}

fn bump(map: &mut BTreeMap<u32, i64>, key: u32, c: i64) {
    let v = map.entry(key).or_insert(0);
    *v += c;
    if *v == 0 {
        map.remove(&key);
    }
}

impl Add for &Weight {
    type Output = Weight;

    fn add(self, rhs: &Weight) -> Weight {
        let mut out = self.clone();
        for (&i, &c) in &rhs.lambda {
            bump(&mut out.lambda, i, c);
        }
        for (&i, &c) in &rhs.alpha {
            bump(&mut out.alpha, i, c);
        }
        out
    }
}

impl Add for Weight {
    type Output = Weight;

    fn add(self, rhs: Weight) -> Weight {
        &self + &rhs
    }
}

impl Neg for &Weight {
    type Output = Weight;

    fn neg(self) -> Weight {
        Weight {
            lambda: self.lambda.iter().map(|(&i, &c)| (i, -c)).collect(),
            alpha: self.alpha.iter().map(|(&i, &c)| (i, -c)).collect(),
        }
    }
}

impl Sub for &Weight {
    type Output = Weight;

    fn sub(self, rhs: &Weight) -> Weight {
        self + &(-rhs)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        let terms = self
            .lambda
            .iter()
            .map(|(i, c)| ("L", i, c))
            .chain(self.alpha.iter().map(|(i, c)| ("a", i, c)));
        for (sym, i, &c) in terms {
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sign}{sym}{i}")?;
            } else {
                write!(f, "{sign}{mag}{sym}{i}")?;
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn idx(e: u32) -> IndexSet {
        IndexSet::new(e).unwrap()
    }

    #[test]
    fn cartan_entries() {
        let i6 = idx(6);
        assert_eq!(i6.cartan_pairing(Residue(0), Residue(0)), 2);
        assert_eq!(i6.cartan_pairing(Residue(0), Residue(1)), -1);
        assert_eq!(i6.cartan_pairing(Residue(0), Residue(5)), -1);
        assert_eq!(i6.cartan_pairing(Residue(0), Residue(3)), 0);
        assert_eq!(idx(2).cartan_pairing(Residue(0), Residue(1)), -2);
    }

    #[test]
    fn rank_one_rejected() {
        assert!(IndexSet::new(1).is_err());
    }

    #[test]
    fn pairing_examples() {
        let mut w = Weight::fundamental(Residue(0));
        w.add_alpha(Residue(0), -1);
        assert_eq!(idx(2).pair_weight(Residue(1), &w), 2);
        assert_eq!(idx(6).pair_weight(Residue(0), &Weight::fundamental(Residue(0))), 1);
        let mut m = Weight::zero();
        m.add_alpha(Residue(1), -1);
        assert_eq!(idx(6).pair_weight(Residue(0), &m), 1);
    }

    #[test]
    fn folding_maps() {
        let f3 = Folding::new(3).unwrap();
        assert_eq!(f3.theta(FoldedIndex(2)), Residue(2));
        assert_eq!(f3.fold(Residue(5)), FoldedIndex(2));
        assert_eq!(Folding::new(4).unwrap().theta(FoldedIndex(0)), Residue(0));
        assert_eq!(f3.hat_pair(FoldedIndex(0)), (Residue(0), Residue(3)));
        assert_eq!(f3.hat_pair(FoldedIndex(2)), (Residue(2), Residue(5)));
        assert_eq!(Folding::new(4).unwrap().hat_pair(FoldedIndex(1)), (Residue(1), Residue(5)));
    }

    #[test]
    fn folding_rejects_small_or_odd() {
        assert!(matches!(Folding::new(2), Err(CrystalError::FoldingRank(2))));
        assert!(Folding::with_small_rank(2, true).is_ok());
        assert!(matches!(Folding::from_index_set(idx(7)), Err(CrystalError::OddRank(7))));
        assert!(Folding::from_index_set(idx(4)).is_err());
        assert_eq!(Folding::from_index_set(idx(6)).unwrap().ell(), 3);
    }

    #[test]
    fn fold_weight_examples() {
        let f = Folding::new(3).unwrap();
        let mut w = Weight::zero();
        w.add_alpha(Residue(0), -1);
        w.add_alpha(Residue(3), -1);
        let mut expect = Weight::zero();
        expect.add_alpha(Residue(0), -1);
        assert_eq!(f.fold_weight(&w).unwrap(), expect);
        assert_eq!(f.fold_weight(&Weight::zero()).unwrap(), Weight::zero());
        w.add_alpha(Residue(1), -1);
        assert!(matches!(f.fold_weight(&w), Err(CrystalError::Unbalanced { index: 1, .. })));
        w.add_alpha(Residue(4), -1);
        expect.add_alpha(Residue(1), -1);
        assert_eq!(f.fold_weight(&w).unwrap(), expect);
    }

    #[test]
    fn zero_weight_is_empty() {
        let mut w = Weight::simple_root(Residue(2));
        w.add_alpha(Residue(2), -1);
        assert!(w.is_zero());
        assert_eq!(w, Weight::zero());
    }

    fn weight_strategy(e: u32) -> impl Strategy<Value = Weight> {
        (
            proptest::collection::vec((0..e, -4i64..5), 0..5),
            proptest::collection::vec((0..e, -4i64..5), 0..5),
        )
            .prop_map(|(l, a)| {
                let mut w = Weight::zero();
                for (i, c) in l {
                    w.add_lambda(Residue(i), c);
                }
                for (i, c) in a {
                    w.add_alpha(Residue(i), c);
                }
                w
            })
    }

    proptest! {
        #[test]
        fn cartan_symmetric_with_zero_row_sums(e in 2u32..10, i in 0u32..10, j in 0u32..10) {
            let s = idx(e);
            let (i, j) = (s.residue(i as i64), s.residue(j as i64));
            prop_assert_eq!(s.cartan_pairing(i, j), s.cartan_pairing(j, i));
            let row: i64 = s.residues().map(|k| s.cartan_pairing(i, k)).sum();
            prop_assert_eq!(row, 0);
        }

        #[test]
        fn pairing_is_additive(a in weight_strategy(6), b in weight_strategy(6), i in 0u32..6) {
            let s = idx(6);
            let i = Residue(i);
            prop_assert_eq!(s.pair_weight(i, &(&a + &b)), s.pair_weight(i, &a) + s.pair_weight(i, &b));
        }

        #[test]
        fn fold_theta_identity(ell in 3u32..9, i in 0u32..9) {
            let f = Folding::new(ell).unwrap();
            let i = f.folded_index(i as i64);
            prop_assert_eq!(f.fold(f.theta(i)), i);
            let (a, b) = f.hat_pair(i);
            prop_assert_eq!(b.0 - a.0, ell);
        }

        #[test]
        fn fold_weight_additive(cs in proptest::collection::vec(-3i64..4, 3), ds in proptest::collection::vec(-3i64..4, 3)) {
            let f = Folding::new(3).unwrap();
            let balanced = |v: &[i64]| {
                let mut w = Weight::zero();
                for (i, &c) in v.iter().enumerate() {
                    w.add_alpha(Residue(i as u32), c);
                    w.add_alpha(Residue(i as u32 + 3), c);
                }
                w
            };
            let (a, b) = (balanced(&cs), balanced(&ds));
            prop_assert_eq!(
                f.fold_weight(&(&a + &b)).unwrap(),
                &f.fold_weight(&a).unwrap() + &f.fold_weight(&b).unwrap()
            );
        }
    }
}
