//! Formal characters: finite multisets of residue words, the shuffle
//! product, and the suffix filters.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cartan::{FoldedIndex, Folding, IndexSet, Residue};
use crate::error::CrystalError;

pub type Word = Vec<Residue>;

/// A sum of words of a common length `n`, with positive multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    idx: IndexSet,
    n: usize,
    terms: BTreeMap<Word, u64>,
}

impl Character {
    /// The zero character of word length `n`.
    pub fn zero(idx: IndexSet, n: usize) -> Self {
        Character { idx, n, terms: BTreeMap::new() }
    }

    /// The character `[]` of the trivial module.
    pub fn unit(idx: IndexSet) -> Self {
        Self::word(idx, Vec::new())
    }

    pub fn word(idx: IndexSet, word: Word) -> Self {
        let n = word.len();
        let mut terms = BTreeMap::new();
        terms.insert(word, 1);
        Character { idx, n, terms }
    }

    /// Builds a character from raw letters; every letter is reduced mod `e`.
    pub fn from_terms<I, W>(idx: IndexSet, terms: I) -> Result<Self, CrystalError>
    where
        I: IntoIterator<Item = (W, u64)>,
        W: IntoIterator<Item = i64>,
    {
        let mut out: Option<Character> = None;
        for (w, m) in terms {
            let word: Word = w.into_iter().map(|a| idx.residue(a)).collect();
            let c = out.get_or_insert_with(|| Character::zero(idx, word.len()));
            c.add_term(word, m)?;
        }
        Ok(out.unwrap_or_else(|| Character::zero(idx, 0)))
    }

    pub fn add_term(&mut self, word: Word, mult: u64) -> Result<(), CrystalError> {
        if word.len() != self.n {
            return Err(CrystalError::Parse {
                input: format!("{word:?}"),
                reason: format!("word length differs from {}", self.n),
            });
        }
        if mult > 0 {
            *self.terms.entry(word).or_insert(0) += mult;
        }
        Ok(())
    }

    pub fn index_set(&self) -> IndexSet {
        self.idx
    }

    pub fn word_len(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dim(&self) -> u64 {
        self.terms.values().sum()
    }

    pub fn mult(&self, word: &[Residue]) -> u64 {
        self.terms.get(word).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, u64)> {
        self.terms.iter().map(|(w, &m)| (w, m))
    }

    pub fn add(&self, other: &Character) -> Result<Character, CrystalError> {
        self.same_index_set(other)?;
        let mut out = self.clone();
        for (w, m) in other.terms() {
            out.add_term(w.clone(), m)?;
        }
        Ok(out)
    }

    /// Character of an induced product: every interleaving of a word of
    /// `self` with a word of `other`, multiplicities multiplied.
    pub fn shuffle(&self, other: &Character) -> Result<Character, CrystalError> {
        self.same_index_set(other)?;
        let mut out = Character::zero(self.idx, self.n + other.n);
        let mut buf = Vec::with_capacity(self.n + other.n);
        for (u, mu) in self.terms() {
            for (v, mv) in other.terms() {
                interleave(u, v, &mut buf, &mut |w| {
                    *out.terms.entry(w.to_vec()).or_insert(0) += mu * mv;
                });
            }
        }
        Ok(out)
    }

    /// Keeps the terms whose last letters equal `suffix`.
    pub fn delta_filter(&self, suffix: &[Residue]) -> Character {
        let terms = self
            .terms
            .iter()
            .filter(|(w, _)| w.len() >= suffix.len() && w.ends_with(suffix))
            .map(|(w, &m)| (w.clone(), m))
            .collect();
        Character { idx: self.idx, n: self.n, terms }
    }

    /// Keeps the terms whose final `2m` letters are a rearrangement of `m`
    /// copies each of `theta(i)` and `theta(i) + l`.
    pub fn delta_hat_filter(&self, folding: &Folding, i: FoldedIndex, m: usize) -> Character {
        let (a, b) = folding.hat_pair(i);
        let terms = self
            .terms
            .iter()
            .filter(|(w, _)| {
                if w.len() < 2 * m {
                    return false;
                }
                let tail = &w[w.len() - 2 * m..];
                tail.iter().filter(|&&x| x == a).count() == m
                    && tail.iter().filter(|&&x| x == b).count() == m
            })
            .map(|(w, &m)| (w.clone(), m))
            .collect();
        Character { idx: self.idx, n: self.n, terms }
    }

    fn same_index_set(&self, other: &Character) -> Result<(), CrystalError> {
        if self.idx != other.idx {
            return Err(CrystalError::MixedIndexSets(self.idx.e(), other.idx.e()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let wire = CharacterJson {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(w, &mult)| TermJson { word: w.iter().map(|r| r.0).collect(), mult })
                .collect(),
        };
        serde_json::to_value(wire).expect("character serializes")
    }

    pub fn from_json(idx: IndexSet, value: &serde_json::Value) -> Result<Character, CrystalError> {
        let wire: CharacterJson = serde_json::from_value(value.clone()).map_err(|e| {
            CrystalError::Parse { input: value.to_string(), reason: e.to_string() }
        })?;
        let mut out = Character::zero(idx, wire.n);
        for t in wire.terms {
            let word = t.word.iter().map(|&a| idx.check(Residue(a))).collect::<Result<_, _>>()?;
            out.add_term(word, t.mult)?;
        }
        Ok(out)
    }
}

/// `[theta(i), theta(i)+l] + [theta(i)+l, theta(i)]`, the character of the
/// two-letter simple module attached to a hat letter.
pub fn char_of_hat_letter(folding: &Folding, i: FoldedIndex) -> Character {
    let (a, b) = folding.hat_pair(i);
    let mut c = Character::zero(folding.unfolded(), 2);
    c.add_term(vec![a, b], 1).expect("length 2");
    c.add_term(vec![b, a], 1).expect("length 2");
    c
}

#[derive(Serialize, Deserialize)]
struct CharacterJson {
    n: usize,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    word: Vec<u32>,
    mult: u64,
}

fn interleave(u: &[Residue], v: &[Residue], buf: &mut Vec<Residue>, emit: &mut impl FnMut(&[Residue])) {
    match (u.split_first(), v.split_first()) {
        (None, None) => emit(buf),
        (Some((&a, rest)), None) | (None, Some((&a, rest))) => {
            let mark = buf.len();
            buf.push(a);
            buf.extend_from_slice(rest);
            emit(buf);
            buf.truncate(mark);
        }
        (Some((&a, ur)), Some((&b, vr))) => {
            buf.push(a);
            interleave(ur, v, buf, emit);
            buf.pop();
            buf.push(b);
            interleave(u, vr, buf, emit);
            buf.pop();
        }
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, m)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if *m != 1 {
                write!(f, "{m}")?;
            }
            let letters: Vec<String> = w.iter().map(|r| r.to_string()).collect();
            write!(f, "[{}]", letters.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn i6() -> IndexSet {
        IndexSet::new(6).unwrap()
    }

    fn w(letters: &[u32]) -> Word {
        letters.iter().map(|&a| Residue(a)).collect()
    }

    fn binom(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, t| acc * (n - t) / (t + 1))
    }

    #[test]
    fn shuffle_of_adjacent_pair_with_itself() {
        let c = Character::word(i6(), w(&[0, 1]));
        let s = c.shuffle(&c).unwrap();
        let expect = Character::from_terms(i6(), [(vec![0, 0, 1, 1], 4), (vec![0, 1, 0, 1], 2)]).unwrap();
        assert_eq!(s, expect);
    }

    #[test]
    fn shuffle_identity() {
        let c = char_of_hat_letter(&Folding::new(3).unwrap(), FoldedIndex(1));
        assert_eq!(c.shuffle(&Character::unit(i6())).unwrap(), c);
        assert_eq!(Character::unit(i6()).shuffle(&c).unwrap(), c);
    }

    #[test]
    fn hat_letter_shuffle_dimensions() {
        let f = Folding::new(3).unwrap();
        let big = char_of_hat_letter(&f, FoldedIndex(0)).shuffle(&char_of_hat_letter(&f, FoldedIndex(1))).unwrap();
        assert_eq!(big.dim(), 24);
        let small = Character::word(i6(), w(&[0, 1])).shuffle(&Character::word(i6(), w(&[3, 4]))).unwrap();
        assert_eq!(small.dim(), 6);
        assert_eq!(big.dim() - small.dim(), 18);
    }

    #[test]
    fn mixed_index_sets_rejected() {
        let a = Character::unit(i6());
        let b = Character::unit(IndexSet::new(3).unwrap());
        assert!(matches!(a.shuffle(&b), Err(CrystalError::MixedIndexSets(6, 3))));
    }

    #[test]
    fn delta_filters() {
        let c = char_of_hat_letter(&Folding::new(3).unwrap(), FoldedIndex(0));
        assert_eq!(c.delta_filter(&w(&[3])), Character::word(i6(), w(&[0, 3])));
        assert_eq!(c.delta_filter(&w(&[0, 3])), Character::word(i6(), w(&[0, 3])));
        assert!(c.delta_filter(&w(&[1])).is_zero());
    }

    #[test]
    fn delta_hat_filters() {
        let f = Folding::new(3).unwrap();
        let c = char_of_hat_letter(&f, FoldedIndex(0));
        assert_eq!(c.delta_hat_filter(&f, FoldedIndex(0), 1), c);
        assert!(Character::word(i6(), w(&[0, 1])).delta_hat_filter(&f, FoldedIndex(0), 1).is_zero());
        let sq = c.shuffle(&c).unwrap();
        let filtered = sq.delta_hat_filter(&f, FoldedIndex(0), 2);
        assert_eq!(filtered, sq);
        assert_eq!(filtered.dim(), 24);
    }

    #[test]
    fn hat_letter_characters() {
        let f3 = Folding::new(3).unwrap();
        let f4 = Folding::new(4).unwrap();
        let expect = |idx, a: u32, b: u32| Character::from_terms(idx, [(vec![a as i64, b as i64], 1), (vec![b as i64, a as i64], 1)]).unwrap();
        assert_eq!(char_of_hat_letter(&f3, FoldedIndex(0)), expect(i6(), 0, 3));
        assert_eq!(char_of_hat_letter(&f3, FoldedIndex(2)), expect(i6(), 2, 5));
        assert_eq!(char_of_hat_letter(&f4, FoldedIndex(1)), expect(IndexSet::new(8).unwrap(), 1, 5));
    }

    #[test]
    fn json_is_sorted_and_round_trips() {
        let c = char_of_hat_letter(&Folding::new(3).unwrap(), FoldedIndex(0));
        let j = c.to_json();
        assert_eq!(
            j.to_string(),
            r#"{"n":2,"terms":[{"mult":1,"word":[0,3]},{"mult":1,"word":[3,0]}]}"#
        );
        assert_eq!(Character::from_json(i6(), &j).unwrap(), c);
    }

    fn char_strategy(max_len: usize) -> impl Strategy<Value = Character> {
        (0..=max_len).prop_flat_map(|n| {
            proptest::collection::vec((proptest::collection::vec(0i64..6, n), 1u64..3), 1..3)
                .prop_map(move |terms| {
                    let mut c = Character::zero(IndexSet::new(6).unwrap(), n);
                    for (word, m) in terms {
                        c.add_term(word.into_iter().map(|a| Residue(a as u32)).collect(), m).unwrap();
                    }
                    c
                })
        })
    }

    proptest! {
        #[test]
        fn shuffle_dimension_is_multiplicative(a in char_strategy(3), b in char_strategy(3)) {
            let s = a.shuffle(&b).unwrap();
            prop_assert_eq!(s.word_len(), a.word_len() + b.word_len());
            prop_assert_eq!(s.dim(), a.dim() * b.dim() * binom((a.word_len() + b.word_len()) as u64, a.word_len() as u64));
        }

        #[test]
        fn shuffle_commutative_associative(a in char_strategy(2), b in char_strategy(2), c in char_strategy(2)) {
            prop_assert_eq!(a.shuffle(&b).unwrap(), b.shuffle(&a).unwrap());
            prop_assert_eq!(
                a.shuffle(&b).unwrap().shuffle(&c).unwrap(),
                a.shuffle(&b.shuffle(&c).unwrap()).unwrap()
            );
        }

        #[test]
        fn nested_suffix_filters_compose(a in char_strategy(4), b in char_strategy(2), s in proptest::collection::vec(0u32..6, 0..2), t in proptest::collection::vec(0u32..6, 0..2)) {
            let c = a.shuffle(&b).unwrap();
            let s = w(&s);
            let mut longer = w(&t);
            longer.extend_from_slice(&s);
            let once = c.delta_filter(&longer);
            prop_assert_eq!(c.delta_filter(&s).delta_filter(&longer), once.clone());
            for (word, m) in once.terms() {
                prop_assert!(m <= c.mult(word));
            }
        }
    }
}
