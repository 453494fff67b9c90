//! The crystal `B(infinity)` of affine `sl_e`, realized by coordinates with
//! respect to a cyclic reduced sequence `(s, s+1, s+2, ...)` of iterated
//! Kashiwara embeddings.
//!
//! An element is a finitely supported sequence `a_1, a_2, ...` of
//! nonnegative integers, position `k` carrying residue `s + k - 1`. For a
//! position `k` of residue `i` put
//!
//! ```text
//! sigma_k = a_k + sum_{j > k} <h_i, alpha_{i_j}> a_j
//! ```
//!
//! Then `eps_i` is the maximum of `sigma_k` over positions of residue `i`
//! (positions beyond the support contribute zero), `f_i` increments the
//! smallest position attaining the maximum and `e_i` decrements the largest.
//! The starred structure reads off the first coordinate after moving to the
//! sequence starting at `i`.

use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::cartan::{IndexSet, Residue, Weight};
use crate::error::CrystalError;
use crate::model::Crystal;

/// The index sequence `(start, start+1, start+2, ...)` read mod `e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CyclicSequence {
    pub start: Residue,
    pub idx: IndexSet,
}

impl CyclicSequence {
    pub fn new(idx: IndexSet, start: Residue) -> Self {
        CyclicSequence { start, idx }
    }

    /// Residue at 1-based position `k`.
    pub fn residue_at(&self, k: usize) -> Residue {
        self.idx.shift(self.start, k as i64 - 1)
    }

    /// Smallest position `k >= from` carrying residue `i`.
    pub fn next_position(&self, i: Residue, from: usize) -> usize {
        let e = self.idx.e() as usize;
        let offset = (i.0 as usize + e - self.start.0 as usize) % e;
        let first = offset + 1;
        if from <= first {
            first
        } else {
            first + (from - first).div_ceil(e) * e
        }
    }
}

/// Which attaining position `e_i` acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RaisePosition {
    /// Largest position attaining the maximum; the correct rule.
    #[default]
    Largest,
    /// Smallest position; deliberately wrong, for fault injection.
    Smallest,
}

/// A vertex of `B(infinity)`.
///
/// Equality is equality of the underlying crystal element: elements over
/// different sequences are compared after moving both to the sequence
/// starting at 0.
#[derive(Debug, Clone)]
pub struct BinfElement {
    base: CyclicSequence,
    coords: Vec<u32>,
    cached_word: Option<Vec<Residue>>,
}

impl BinfElement {
    pub fn highest(base: CyclicSequence) -> Self {
        BinfElement { base, coords: Vec::new(), cached_word: Some(Vec::new()) }
    }

    pub fn base(&self) -> CyclicSequence {
        self.base
    }

    /// Coordinates `a_1, a_2, ...` with trailing zeros stripped.
    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn coord(&self, k: usize) -> u32 {
        self.coords.get(k - 1).copied().unwrap_or(0)
    }

    pub fn is_highest(&self) -> bool {
        self.coords.is_empty()
    }

    /// Number of `f` applications needed to reach this element.
    pub fn depth(&self) -> u32 {
        self.coords.iter().sum()
    }

    /// A word producing this element, if one has been recorded.
    pub fn cached_word(&self) -> Option<&[Residue]> {
        self.cached_word.as_deref()
    }

    fn bump(&mut self, k: usize, up: bool) {
        if up {
            if self.coords.len() < k {
                self.coords.resize(k, 0);
            }
            self.coords[k - 1] += 1;
        } else {
            self.coords[k - 1] -= 1;
            while self.coords.last() == Some(&0) {
                self.coords.pop();
            }
        }
    }

    /// Coordinates over the sequence starting at 0.
    pub fn canonical_coords(&self) -> Vec<u32> {
        if self.base.start.0 == 0 {
            self.coords.clone()
        } else {
            let model = BinfCrystal::new(self.base.idx);
            model.rebase(self, Residue(0)).coords
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ElementJson { base: self.base.start.0, coords: self.coords.clone() })
            .expect("element serializes")
    }

    /// Reads `{"base": s, "coords": [...]}`; the coordinates must lie in the
    /// image of the embedding, which is checked by replaying a word.
    pub fn from_json(idx: IndexSet, value: &serde_json::Value) -> Result<Self, CrystalError> {
        let wire: ElementJson = serde_json::from_value(value.clone())
            .map_err(|e| CrystalError::Parse { input: value.to_string(), reason: e.to_string() })?;
        let start = idx.check(Residue(wire.base))?;
        let mut coords = wire.coords;
        while coords.last() == Some(&0) {
            coords.pop();
        }
        let raw = BinfElement { base: CyclicSequence::new(idx, start), coords, cached_word: None };
        let model = BinfCrystal::with_base(idx, start);
        let not_in_image = || CrystalError::Parse {
            input: value.to_string(),
            reason: "coordinates are not in the image of the embedding".into(),
        };
        let word = model.checked_word_of(&raw).ok_or_else(not_in_image)?;
        let replay = model.from_word(&word);
        if replay.coords != raw.coords {
            return Err(not_in_image());
        }
        Ok(replay)
    }
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    base: u32,
    coords: Vec<u32>,
}

impl PartialEq for BinfElement {
    fn eq(&self, other: &Self) -> bool {
        if self.base == other.base {
            self.coords == other.coords
        } else {
            self.base.idx == other.base.idx && self.canonical_coords() == other.canonical_coords()
        }
    }
}

impl Eq for BinfElement {}

impl Hash for BinfElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.base.idx.hash(state);
        self.canonical_coords().hash(state);
    }
}

/// The factor `B_i = {b_i(n)}`; only `n <= 0` is reachable here, stored as
/// `a = -n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BiElement {
    pub i: Residue,
    pub a: u32,
}

impl BiElement {
    pub fn eps(&self, j: Residue) -> Option<i64> {
        (j == self.i).then_some(self.a as i64)
    }

    pub fn phi(&self, j: Residue) -> Option<i64> {
        (j == self.i).then_some(-(self.a as i64))
    }

    pub fn wt(&self) -> Weight {
        let mut w = Weight::zero();
        w.add_alpha(self.i, -(self.a as i64));
        w
    }
}

/// `B(infinity)` over a fixed index set. New elements live over the sequence
/// starting at `start` (0 unless built with [`BinfCrystal::with_base`]).
#[derive(Debug, Clone, Copy)]
pub struct BinfCrystal {
    idx: IndexSet,
    start: Residue,
    raise: RaisePosition,
}

impl BinfCrystal {
    pub fn new(idx: IndexSet) -> Self {
        BinfCrystal { idx, start: Residue(0), raise: RaisePosition::Largest }
    }

    pub fn with_base(idx: IndexSet, start: Residue) -> Self {
        BinfCrystal { idx, start: idx.residue(start.0 as i64), raise: RaisePosition::Largest }
    }

    pub fn with_raise_position(mut self, raise: RaisePosition) -> Self {
        self.raise = raise;
        self
    }

    pub fn index_set(&self) -> IndexSet {
        self.idx
    }

    fn sequence(&self, start: Residue) -> CyclicSequence {
        CyclicSequence::new(self.idx, start)
    }

    /// `sigma_k(x)` at a position carrying residue `i`.
    pub fn sigma(&self, x: &BinfElement, i: Residue, k: usize) -> Result<i64, CrystalError> {
        let actual = x.base.residue_at(k);
        if k == 0 || actual != i {
            return Err(CrystalError::WrongPosition { position: k, expected: i.0, actual: actual.0 });
        }
        let tail: i64 = (k + 1..=x.coords.len())
            .map(|j| self.idx.cartan_pairing(i, x.base.residue_at(j)) * x.coord(j) as i64)
            .sum();
        Ok(x.coord(k) as i64 + tail)
    }

    /// `(position, sigma)` for every residue-`i` position inside the
    /// support, in increasing position order.
    fn sigmas(&self, x: &BinfElement, i: Residue) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        let mut tail = 0i64;
        for k in (1..=x.coords.len()).rev() {
            let r = x.base.residue_at(k);
            let a = x.coords[k - 1] as i64;
            if r == i {
                out.push((k, a + tail));
            }
            tail += self.idx.cartan_pairing(i, r) * a;
        }
        out.reverse();
        out
    }

    pub fn eps(&self, x: &BinfElement, i: Residue) -> i64 {
        self.sigmas(x, i).into_iter().map(|(_, s)| s).max().unwrap_or(0).max(0)
    }

    pub fn wt(&self, x: &BinfElement) -> Weight {
        let mut w = Weight::zero();
        for (k, &a) in x.coords.iter().enumerate() {
            w.add_alpha(x.base.residue_at(k + 1), -(a as i64));
        }
        w
    }

    pub fn phi(&self, x: &BinfElement, i: Residue) -> i64 {
        self.eps(x, i) + self.idx.pair_weight(i, &self.wt(x))
    }

    pub fn f_apply(&self, x: &BinfElement, i: Residue) -> BinfElement {
        let sigmas = self.sigmas(x, i);
        let max = sigmas.iter().map(|&(_, s)| s).max().unwrap_or(0).max(0);
        let k = sigmas
            .iter()
            .find(|&&(_, s)| s == max)
            .map(|&(k, _)| k)
            .unwrap_or_else(|| x.base.next_position(i, x.coords.len() + 1));
        let mut y = x.clone();
        y.bump(k, true);
        if let Some(w) = y.cached_word.as_mut() {
            w.push(i);
        }
        y
    }

    fn raise_position(&self, x: &BinfElement, i: Residue) -> Option<usize> {
        let sigmas = self.sigmas(x, i);
        let max = sigmas.iter().map(|&(_, s)| s).max().unwrap_or(0);
        if max <= 0 {
            return None;
        }
        let mut attaining =
            sigmas.iter().filter(|&&(k, s)| s == max && x.coord(k) > 0).map(|&(k, _)| k);
        match self.raise {
            RaisePosition::Largest => attaining.next_back(),
            RaisePosition::Smallest => attaining.next(),
        }
    }

    /// `None` is the crystal zero, returned exactly when `eps_i(x) = 0`.
    pub fn e_apply(&self, x: &BinfElement, i: Residue) -> Option<BinfElement> {
        let k = self.raise_position(x, i)?;
        let mut y = x.clone();
        y.bump(k, false);
        y.cached_word = None;
        Some(y)
    }

    /// Applies `f` letters left to right, starting from the highest element.
    pub fn from_word(&self, word: &[Residue]) -> BinfElement {
        self.from_word_over(word, self.start)
    }

    fn from_word_over(&self, word: &[Residue], start: Residue) -> BinfElement {
        let mut x = BinfElement::highest(self.sequence(start));
        for &i in word {
            x = self.f_apply(&x, i);
        }
        x
    }

    /// Greedy decomposition: repeatedly remove the smallest residue with
    /// `eps > 0`; the reversed removal sequence is returned.
    pub fn word_of(&self, x: &BinfElement) -> Vec<Residue> {
        let mut removed = Vec::new();
        let mut cur = x.clone();
        while !cur.is_highest() {
            let (i, next) = self
                .idx
                .residues()
                .find_map(|i| self.e_apply(&cur, i).map(|y| (i, y)))
                .expect("a non-highest element has some eps > 0");
            removed.push(i);
            cur = next;
        }
        removed.reverse();
        removed
    }

    /// `word_of` for coordinates of unknown provenance: fails instead of
    /// decrementing a zero coordinate.
    pub(crate) fn checked_word_of(&self, x: &BinfElement) -> Option<Vec<Residue>> {
        let mut removed = Vec::new();
        let mut cur = x.clone();
        while !cur.is_highest() {
            let (i, k) = self
                .idx
                .residues()
                .find_map(|i| self.raise_position(&cur, i).map(|k| (i, k)))?;
            if cur.coord(k) == 0 {
                return None;
            }
            cur.bump(k, false);
            removed.push(i);
        }
        removed.reverse();
        Some(removed)
    }

    /// The same crystal element with coordinates over the sequence starting
    /// at `start`.
    pub fn rebase(&self, x: &BinfElement, start: Residue) -> BinfElement {
        if x.base.start == start {
            return x.clone();
        }
        let word = match &x.cached_word {
            Some(w) => w.clone(),
            None => self.word_of(x),
        };
        self.from_word_over(&word, start)
    }

    pub fn eps_star(&self, x: &BinfElement, i: Residue) -> i64 {
        self.rebase(x, i).coord(1) as i64
    }

    pub fn f_star(&self, x: &BinfElement, i: Residue) -> BinfElement {
        let mut y = self.rebase(x, i);
        y.bump(1, true);
        y.cached_word = None;
        self.rebase(&y, x.base.start)
    }

    pub fn e_star(&self, x: &BinfElement, i: Residue) -> Option<BinfElement> {
        let mut y = self.rebase(x, i);
        if y.coord(1) == 0 {
            return None;
        }
        y.bump(1, false);
        y.cached_word = None;
        Some(self.rebase(&y, x.base.start))
    }

    /// Pushes `word` through `u_inf (x) b_i` with the tensor product rule.
    /// The second factor ends at `b_i(-eps_star_i)`.
    pub fn b_tensor_push(&self, word: &[Residue], i: Residue) -> (BinfElement, BiElement) {
        let mut left = BinfElement::highest(self.sequence(self.start));
        let mut right = BiElement { i, a: 0 };
        for &j in word {
            let acts_left = match right.eps(j) {
                None => true,
                Some(eps_right) => self.phi(&left, j) > eps_right,
            };
            if acts_left {
                left = self.f_apply(&left, j);
            } else {
                right.a += 1;
            }
        }
        (left, right)
    }
}

impl Crystal for BinfCrystal {
    type Elem = BinfElement;

    fn colors(&self) -> IndexSet {
        self.idx
    }

    fn highest(&self) -> BinfElement {
        BinfElement::highest(self.sequence(self.start))
    }

    fn f(&self, x: &BinfElement, i: Residue) -> Option<BinfElement> {
        Some(self.f_apply(x, i))
    }

    fn e(&self, x: &BinfElement, i: Residue) -> Option<BinfElement> {
        self.e_apply(x, i)
    }

    fn eps(&self, x: &BinfElement, i: Residue) -> i64 {
        BinfCrystal::eps(self, x, i)
    }

    fn phi(&self, x: &BinfElement, i: Residue) -> i64 {
        BinfCrystal::phi(self, x, i)
    }

    fn wt(&self, x: &BinfElement) -> Weight {
        BinfCrystal::wt(self, x)
    }

    fn key(&self, x: &BinfElement) -> String {
        let coords: Vec<String> = x.canonical_coords().iter().map(|a| a.to_string()).collect();
        format!("[{}]", coords.join(","))
    }

    fn f_star(&self, x: &BinfElement, i: Residue) -> Result<BinfElement, CrystalError> {
        Ok(BinfCrystal::f_star(self, x, i))
    }

    fn e_star(&self, x: &BinfElement, i: Residue) -> Result<Option<BinfElement>, CrystalError> {
        Ok(BinfCrystal::e_star(self, x, i))
    }

    fn eps_star(&self, x: &BinfElement, i: Residue) -> Result<i64, CrystalError> {
        Ok(BinfCrystal::eps_star(self, x, i))
    }

    fn from_word(&self, word: &[Residue]) -> Option<BinfElement> {
        Some(BinfCrystal::from_word(self, word))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e6() -> BinfCrystal {
        BinfCrystal::new(IndexSet::new(6).unwrap())
    }

    fn w(letters: &[u32]) -> Vec<Residue> {
        letters.iter().map(|&a| Residue(a)).collect()
    }

    #[test]
    fn next_position_walks_the_cycle() {
        let s = CyclicSequence::new(IndexSet::new(6).unwrap(), Residue(1));
        assert_eq!(s.next_position(Residue(0), 1), 6);
        assert_eq!(s.next_position(Residue(0), 7), 12);
        assert_eq!(s.next_position(Residue(1), 1), 1);
        assert_eq!(s.next_position(Residue(1), 2), 7);
        assert_eq!(s.residue_at(6), Residue(0));
    }

    #[test]
    fn sigma_examples() {
        let m = e6();
        let u = m.from_word(&[]);
        assert_eq!(m.sigma(&u, Residue(0), 1).unwrap(), 0);
        assert_eq!(m.sigma(&u, Residue(3), 4).unwrap(), 0);
        let x = m.from_word(&w(&[0]));
        assert_eq!(x.coords(), &[1]);
        assert_eq!(m.sigma(&x, Residue(0), 1).unwrap(), 1);
        let y = m.from_word(&w(&[0, 1]));
        assert_eq!(y.coords(), &[1, 1]);
        assert_eq!(m.sigma(&y, Residue(0), 1).unwrap(), 0);
        assert!(matches!(m.sigma(&y, Residue(0), 2), Err(CrystalError::WrongPosition { .. })));
    }

    #[test]
    fn statistics_examples() {
        let m = e6();
        let u = m.from_word(&[]);
        for i in m.index_set().residues() {
            assert_eq!(m.eps(&u, i), 0);
            assert_eq!(m.phi(&u, i), 0);
        }
        assert!(m.wt(&u).is_zero());
        let x = m.from_word(&w(&[0]));
        assert_eq!(m.eps(&x, Residue(0)), 1);
        assert_eq!(m.phi(&x, Residue(0)), -1);
        assert_eq!(m.eps(&m.from_word(&w(&[0, 1])), Residue(0)), 0);
    }

    #[test]
    fn operator_examples() {
        let m = e6();
        assert_eq!(m.from_word(&w(&[0, 1])).coords(), &[1, 1]);
        assert!(m.e_apply(&m.from_word(&[]), Residue(2)).is_none());
        // f_0 f_1: position 1 has sigma -1, so f_0 goes to position 7
        assert_eq!(m.from_word(&w(&[1, 0])).coords(), &[0, 1, 0, 0, 0, 0, 1]);
    }

    #[test]
    fn words_round_trip() {
        let m = e6();
        assert_eq!(m.word_of(&m.from_word(&[])), Vec::<Residue>::new());
        assert_eq!(m.word_of(&m.from_word(&w(&[0, 1]))), w(&[0, 1]));
        assert_eq!(m.from_word(&w(&[0, 3])), m.from_word(&w(&[3, 0])));
        let x = m.from_word(&w(&[2, 5, 1, 1, 0, 4, 3]));
        assert_eq!(m.from_word(&m.word_of(&x)), x);
    }

    #[test]
    fn rebase_examples() {
        let m = e6();
        let u = m.from_word(&[]);
        assert_eq!(m.rebase(&u, Residue(4)).coords(), &[] as &[u32]);
        let x = m.from_word(&w(&[0]));
        assert_eq!(m.rebase(&x, Residue(0)).coords(), &[1]);
        let y = m.rebase(&x, Residue(1));
        assert_eq!(y.coords(), &[0, 0, 0, 0, 0, 1]);
        assert_eq!(y, x);
        assert_eq!(m.rebase(&y, Residue(0)).coords(), x.coords());
    }

    #[test]
    fn star_examples() {
        let m = e6();
        for i in m.index_set().residues() {
            let fi = m.from_word(&[i]);
            assert_eq!(m.eps_star(&fi, i), 1);
            assert_eq!(m.f_star(&m.from_word(&[]), i), fi);
            assert!(m.e_star(&m.from_word(&[]), i).is_none());
            for j in m.index_set().residues().filter(|&j| j != i) {
                assert_eq!(m.eps_star(&m.from_word(&[j]), i), 0);
            }
        }
        assert_eq!(m.f_star(&m.from_word(&w(&[1])), Residue(0)), m.from_word(&w(&[0, 1])));
    }

    #[test]
    fn tensor_push_examples() {
        let m = e6();
        let (x, b) = m.b_tensor_push(&[], Residue(2));
        assert!(x.is_highest());
        assert_eq!(b, BiElement { i: Residue(2), a: 0 });
        let (x, b) = m.b_tensor_push(&w(&[2]), Residue(2));
        assert!(x.is_highest());
        assert_eq!(b.a, 1);
        let (x, b) = m.b_tensor_push(&w(&[4]), Residue(2));
        assert_eq!(x, m.from_word(&w(&[4])));
        assert_eq!(b.a, 0);
    }

    #[test]
    fn bi_element_statistics() {
        let b = BiElement { i: Residue(1), a: 3 };
        assert_eq!(b.eps(Residue(1)), Some(3));
        assert_eq!(b.phi(Residue(1)), Some(-3));
        assert_eq!(b.eps(Residue(0)), None);
        assert_eq!(b.wt().alpha_coeff(Residue(1)), -3);
    }

    #[test]
    fn json_strips_trailing_zeros_and_round_trips() {
        let m = e6();
        let x = m.from_word(&w(&[1, 0]));
        let j = x.to_json();
        assert_eq!(j.to_string(), r#"{"base":0,"coords":[0,1,0,0,0,0,1]}"#);
        let back = BinfElement::from_json(m.index_set(), &j).unwrap();
        assert_eq!(back, x);
        let bad = serde_json::json!({"base": 0, "coords": [0, 0, 0, 0, 0, 0, 0, 1]});
        assert!(BinfElement::from_json(m.index_set(), &bad).is_err());
    }
}
