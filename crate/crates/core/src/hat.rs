//! Folded two-step operators.
//!
//! For `e = 2l` a folded color `i` in `Z/lZ` acts by the pair of commuting
//! operators on `theta(i)` and `theta(i) + l`. Wrapping any crystal model
//! over `Z/2lZ` in [`Folded`] gives a crystal model over `Z/lZ`, whose
//! elements are those reachable from the highest element.

use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use crate::binf::BinfCrystal;
use crate::cartan::{FoldedIndex, Folding, IndexSet, Residue, Weight};
use crate::error::CrystalError;
use crate::hwcrystal::{HighestWeightCrystal, Multipartition};
use crate::model::Crystal;

/// An element of a folded crystal together with a folded word producing it,
/// when one is known.
#[derive(Debug, Clone)]
pub struct HatElement<E> {
    pub inner: E,
    pub provenance: Option<Vec<FoldedIndex>>,
}

impl<E: PartialEq> PartialEq for HatElement<E> {
    fn eq(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

impl<E: Eq> Eq for HatElement<E> {}

impl<E: Hash> Hash for HatElement<E> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.inner.hash(state);
    }
}

/// The folded crystal generated inside an unfolded model `C` over `Z/2lZ`.
#[derive(Debug, Clone)]
pub struct Folded<C> {
    inner: C,
    folding: Folding,
    hat_highest_weight: Weight,
}

impl Folded<BinfCrystal> {
    /// `B-hat(infinity)` inside `B(infinity)` of `sl_{2l}`.
    pub fn binf(ell: u32) -> Result<Self, CrystalError> {
        let folding = Folding::new(ell)?;
        Self::new(BinfCrystal::new(folding.unfolded()), folding, Weight::zero())
    }
}

impl Folded<HighestWeightCrystal> {
    /// `B-hat(Lambda-hat_0)` inside `B(Lambda_0 + Lambda_l)`.
    pub fn cyclotomic(ell: u32) -> Result<Self, CrystalError> {
        let folding = Folding::new(ell)?;
        let inner = HighestWeightCrystal::level_two(ell)?;
        Self::new(inner, folding, Weight::fundamental(Residue(0)))
    }
}

impl<C: Crystal> Folded<C> {
    /// `hat_highest_weight` is the folded weight of the highest element.
    pub fn new(inner: C, folding: Folding, hat_highest_weight: Weight) -> Result<Self, CrystalError> {
        let unfolded = folding.unfolded();
        if inner.colors() != unfolded {
            return Err(CrystalError::MixedIndexSets(inner.colors().e(), unfolded.e()));
        }
        Ok(Folded { inner, folding, hat_highest_weight })
    }

    pub fn inner(&self) -> &C {
        &self.inner
    }

    pub fn folding(&self) -> &Folding {
        &self.folding
    }

    pub fn hat_highest(&self) -> HatElement<C::Elem> {
        HatElement { inner: self.inner.highest(), provenance: Some(Vec::new()) }
    }

    pub fn lift(&self, x: C::Elem) -> HatElement<C::Elem> {
        HatElement { inner: x, provenance: None }
    }

    /// `f_{theta(i)} f_{theta(i)+l}`: the `(theta(i)+l)`-operator acts first.
    /// `None` only in models where `f` can vanish.
    pub fn f_hat(&self, x: &HatElement<C::Elem>, i: FoldedIndex) -> Option<HatElement<C::Elem>> {
        let (a, b) = self.folding.hat_pair(i);
        let y = self.inner.f(&self.inner.f(&x.inner, b)?, a)?;
        let provenance = x.provenance.as_ref().map(|p| {
            let mut p = p.clone();
            p.push(i);
            p
        });
        Some(HatElement { inner: y, provenance })
    }

    /// The other composition order, `f_{theta(i)+l} f_{theta(i)}`.
    pub fn f_hat_swapped(&self, x: &C::Elem, i: FoldedIndex) -> Option<C::Elem> {
        let (a, b) = self.folding.hat_pair(i);
        self.inner.f(&self.inner.f(x, a)?, b)
    }

    /// `e_{theta(i)} e_{theta(i)+l}`.
    pub fn e_hat(&self, x: &HatElement<C::Elem>, i: FoldedIndex) -> Option<HatElement<C::Elem>> {
        let (a, b) = self.folding.hat_pair(i);
        let y = self.inner.e(&self.inner.e(&x.inner, b)?, a)?;
        let provenance = x.provenance.as_ref().and_then(|p| match p.last() {
            Some(&last) if last == i => Some(p[..p.len() - 1].to_vec()),
            _ => None,
        });
        Some(HatElement { inner: y, provenance })
    }

    /// `e_{theta(i)+l} e_{theta(i)}`.
    pub fn e_hat_swapped(&self, x: &C::Elem, i: FoldedIndex) -> Option<C::Elem> {
        let (a, b) = self.folding.hat_pair(i);
        self.inner.e(&self.inner.e(x, a)?, b)
    }

    pub fn eps_hat(&self, x: &HatElement<C::Elem>, i: FoldedIndex) -> i64 {
        let (a, b) = self.folding.hat_pair(i);
        self.inner.eps(&x.inner, a).min(self.inner.eps(&x.inner, b))
    }

    /// Highest folded weight minus the folded root content.
    pub fn wt_hat(&self, x: &HatElement<C::Elem>) -> Result<Weight, CrystalError> {
        let content = &self.inner.wt(&x.inner) - &self.inner.wt(&self.inner.highest());
        Ok(&self.hat_highest_weight + &self.folding.fold_weight(&content)?)
    }

    pub fn phi_hat(&self, x: &HatElement<C::Elem>, i: FoldedIndex) -> Result<i64, CrystalError> {
        let wt = self.wt_hat(x)?;
        Ok(self.eps_hat(x, i) + self.folding.folded().pair_weight(self.folding.theta(i), &wt))
    }

    /// `f*_{theta(i)} f*_{theta(i)+l}`.
    pub fn f_hat_star(
        &self,
        x: &HatElement<C::Elem>,
        i: FoldedIndex,
    ) -> Result<HatElement<C::Elem>, CrystalError> {
        let (a, b) = self.folding.hat_pair(i);
        let y = self.inner.f_star(&self.inner.f_star(&x.inner, b)?, a)?;
        Ok(self.lift(y))
    }

    /// `e*_{theta(i)} e*_{theta(i)+l}`.
    pub fn e_hat_star(
        &self,
        x: &HatElement<C::Elem>,
        i: FoldedIndex,
    ) -> Result<Option<HatElement<C::Elem>>, CrystalError> {
        let (a, b) = self.folding.hat_pair(i);
        let Some(y) = self.inner.e_star(&x.inner, b)? else {
            return Ok(None);
        };
        Ok(self.inner.e_star(&y, a)?.map(|z| self.lift(z)))
    }

    /// Largest `m` with `(e-hat*_i)^m x` nonzero.
    pub fn eps_hat_star(&self, x: &HatElement<C::Elem>, i: FoldedIndex) -> Result<i64, CrystalError> {
        let mut m = 0;
        let mut cur = x.clone();
        while let Some(next) = self.e_hat_star(&cur, i)? {
            m += 1;
            cur = next;
        }
        Ok(m)
    }

    /// Applies a folded word from the highest element.
    pub fn from_hat_word(&self, word: &[FoldedIndex]) -> Option<HatElement<C::Elem>> {
        word.iter().try_fold(self.hat_highest(), |x, &i| self.f_hat(&x, i))
    }

    /// The word in `Z/2lZ` obtained by doubling each folded letter.
    pub fn unfold_word(&self, word: &[FoldedIndex]) -> Vec<Residue> {
        word.iter()
            .flat_map(|&i| {
                let (a, b) = self.folding.hat_pair(i);
                [b, a]
            })
            .collect()
    }

    /// Breadth-first layers `B-hat(0), ..., B-hat(depth)`; zero results are
    /// dropped. Each element keeps the first word that reached it.
    pub fn generate(&self, depth: usize) -> Vec<Vec<HatElement<C::Elem>>> {
        let mut layers = vec![vec![self.hat_highest()]];
        for _ in 0..depth {
            let mut seen = HashSet::new();
            let mut next = Vec::new();
            for x in layers.last().expect("nonempty") {
                for i in self.folding.folded_indices() {
                    if let Some(y) = self.f_hat(x, i) {
                        if seen.insert(y.inner.clone()) {
                            next.push(y);
                        }
                    }
                }
            }
            layers.push(next);
        }
        layers
    }
}

impl<C: Crystal> Crystal for Folded<C> {
    type Elem = HatElement<C::Elem>;

    fn colors(&self) -> IndexSet {
        self.folding.folded()
    }

    fn highest(&self) -> Self::Elem {
        self.hat_highest()
    }

    fn f(&self, x: &Self::Elem, i: Residue) -> Option<Self::Elem> {
        self.f_hat(x, FoldedIndex(i.0))
    }

    fn e(&self, x: &Self::Elem, i: Residue) -> Option<Self::Elem> {
        self.e_hat(x, FoldedIndex(i.0))
    }

    fn eps(&self, x: &Self::Elem, i: Residue) -> i64 {
        self.eps_hat(x, FoldedIndex(i.0))
    }

    fn phi(&self, x: &Self::Elem, i: Residue) -> i64 {
        self.phi_hat(x, FoldedIndex(i.0)).expect("generated elements have balanced content")
    }

    fn wt(&self, x: &Self::Elem) -> Weight {
        self.wt_hat(x).expect("generated elements have balanced content")
    }

    fn key(&self, x: &Self::Elem) -> String {
        self.inner.key(&x.inner)
    }

    fn f_star(&self, x: &Self::Elem, i: Residue) -> Result<Self::Elem, CrystalError> {
        self.f_hat_star(x, FoldedIndex(i.0))
    }

    fn e_star(&self, x: &Self::Elem, i: Residue) -> Result<Option<Self::Elem>, CrystalError> {
        self.e_hat_star(x, FoldedIndex(i.0))
    }

    fn eps_star(&self, x: &Self::Elem, i: Residue) -> Result<i64, CrystalError> {
        self.eps_hat_star(x, FoldedIndex(i.0))
    }
}

/// The embedding of `B(Lambda-hat_0)` of `sl_l` into `B(Lambda_0 + Lambda_l)`
/// of `sl_{2l}`: each letter `i` of an `f`-path becomes `f_i f_{i+l}`.
pub fn iota(ell: u32, path: &[FoldedIndex]) -> Result<Multipartition, CrystalError> {
    let folding = Folding::new(ell)?;
    let level_one = HighestWeightCrystal::level_one(ell)?;
    let level_two = HighestWeightCrystal::level_two(ell)?;
    iota_in(&level_one, &level_two, &folding, path)
}

/// [`iota`] with explicit level-one and level-two models.
pub fn iota_in(
    level_one: &HighestWeightCrystal,
    level_two: &HighestWeightCrystal,
    folding: &Folding,
    path: &[FoldedIndex],
) -> Result<Multipartition, CrystalError> {
    let mut small = level_one.highest();
    let mut big = level_two.highest();
    for (step, &i) in path.iter().enumerate() {
        let err = || CrystalError::InvalidPath { step, letter: i.0 };
        if i.0 >= folding.ell() {
            return Err(err());
        }
        small = level_one.f_apply(&small, Residue(i.0)).ok_or_else(err)?;
        let (a, b) = folding.hat_pair(i);
        big = level_two.f_apply(&big, b).and_then(|y| level_two.f_apply(&y, a)).ok_or_else(err)?;
    }
    Ok(big)
}

/// The diagram automorphism `i -> i + l` transported to
/// `B(Lambda_0 + Lambda_l)`: relabel an `f`-word of `b` and replay it.
pub fn h_auto(ell: u32, b: &Multipartition) -> Result<Multipartition, CrystalError> {
    let folding = Folding::new(ell)?;
    let crystal = HighestWeightCrystal::level_two(ell)?;
    h_auto_in(&crystal, &folding, b)
}

/// [`h_auto`] with an explicit level-two model.
pub fn h_auto_in(
    crystal: &HighestWeightCrystal,
    folding: &Folding,
    b: &Multipartition,
) -> Result<Multipartition, CrystalError> {
    let word = crystal.peel(b).ok_or_else(|| CrystalError::NotKleshchev(b.to_string()))?;
    let shifted: Vec<Residue> = word.iter().map(|&i| folding.swap(i)).collect();
    crystal.from_word(&shifted).ok_or_else(|| CrystalError::NotKleshchev(b.to_string()))
}

pub fn is_h_fixed(ell: u32, b: &Multipartition) -> Result<bool, CrystalError> {
    Ok(h_auto(ell, b)? == *b)
}
