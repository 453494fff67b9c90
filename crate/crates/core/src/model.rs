//! The interface shared by every crystal model in the crate.

use std::fmt::Debug;
use std::hash::Hash;

use crate::cartan::{IndexSet, Residue, Weight};
use crate::error::CrystalError;

/// A crystal with a distinguished highest element.
///
/// Colors are residues of [`Crystal::colors`]. `None` plays the role of the
/// crystal zero.
pub trait Crystal {
    type Elem: Clone + Eq + Hash + Debug;

    fn colors(&self) -> IndexSet;
    fn highest(&self) -> Self::Elem;
    fn f(&self, x: &Self::Elem, i: Residue) -> Option<Self::Elem>;
    fn e(&self, x: &Self::Elem, i: Residue) -> Option<Self::Elem>;
    fn eps(&self, x: &Self::Elem, i: Residue) -> i64;
    fn phi(&self, x: &Self::Elem, i: Residue) -> i64;
    fn wt(&self, x: &Self::Elem) -> Weight;
    /// Stable string key used for deduplication and export.
    fn key(&self, x: &Self::Elem) -> String;

    fn f_star(&self, _x: &Self::Elem, _i: Residue) -> Result<Self::Elem, CrystalError> {
        Err(CrystalError::Unsupported("f_star"))
    }

    fn e_star(&self, _x: &Self::Elem, _i: Residue) -> Result<Option<Self::Elem>, CrystalError> {
        Err(CrystalError::Unsupported("e_star"))
    }

    fn eps_star(&self, _x: &Self::Elem, _i: Residue) -> Result<i64, CrystalError> {
        Err(CrystalError::Unsupported("eps_star"))
    }

    /// Applies `f` letter by letter, leftmost first.
    fn apply_word(&self, x: &Self::Elem, word: &[Residue]) -> Option<Self::Elem> {
        word.iter().try_fold(x.clone(), |acc, &i| self.f(&acc, i))
    }

    fn from_word(&self, word: &[Residue]) -> Option<Self::Elem> {
        self.apply_word(&self.highest(), word)
    }
}
