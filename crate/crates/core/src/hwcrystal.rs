//! Highest-weight crystals `B(Lambda)` on multipartitions, via the good-node
//! signature rule.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cartan::{IndexSet, Residue, Weight};
use crate::error::CrystalError;
use crate::model::Crystal;

/// `(c_1, ..., c_r)`, standing for `Lambda = sum_m Lambda_{c_m}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Multicharge {
    charges: Vec<Residue>,
}

impl Multicharge {
    pub fn new(idx: IndexSet, charges: &[i64]) -> Result<Self, CrystalError> {
        if charges.is_empty() {
            return Err(CrystalError::Parse { input: String::new(), reason: "empty multicharge".into() });
        }
        Ok(Multicharge { charges: charges.iter().map(|&c| idx.residue(c)).collect() })
    }

    pub fn charges(&self) -> &[Residue] {
        &self.charges
    }

    pub fn level(&self) -> usize {
        self.charges.len()
    }

    pub fn highest_weight(&self) -> Weight {
        let mut w = Weight::zero();
        for &c in &self.charges {
            w.add_lambda(c, 1);
        }
        w
    }
}

/// A node `(component, row, column)`, all 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeRef {
    pub m: usize,
    pub r: usize,
    pub c: usize,
}

/// A tuple of partitions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multipartition {
    components: Vec<Vec<u32>>,
}

impl Multipartition {
    pub fn empty(level: usize) -> Self {
        Multipartition { components: vec![Vec::new(); level] }
    }

    pub fn new(components: Vec<Vec<u32>>) -> Result<Self, CrystalError> {
        for rows in &components {
            if rows.contains(&0) || rows.windows(2).any(|p| p[0] < p[1]) {
                return Err(CrystalError::Parse {
                    input: format!("{rows:?}"),
                    reason: "rows must be positive and weakly decreasing".into(),
                });
            }
        }
        Ok(Multipartition { components })
    }

    pub fn components(&self) -> &[Vec<u32>] {
        &self.components
    }

    pub fn level(&self) -> usize {
        self.components.len()
    }

    pub fn size(&self) -> u32 {
        self.components.iter().flatten().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.components.iter().all(|c| c.is_empty())
    }

    fn row(&self, m: usize, r: usize) -> u32 {
        self.components[m - 1].get(r - 1).copied().unwrap_or(0)
    }

    fn add_node(&mut self, node: NodeRef) {
        let rows = &mut self.components[node.m - 1];
        if rows.len() < node.r {
            rows.push(0);
        }
        rows[node.r - 1] += 1;
    }

    fn remove_node(&mut self, node: NodeRef) {
        let rows = &mut self.components[node.m - 1];
        rows[node.r - 1] -= 1;
        if rows[node.r - 1] == 0 {
            rows.pop();
        }
    }

    /// JSON array of row arrays.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("multipartition serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, CrystalError> {
        let components: Vec<Vec<u32>> = serde_json::from_value(value.clone())
            .map_err(|e| CrystalError::Parse { input: value.to_string(), reason: e.to_string() })?;
        Self::new(components)
    }

    pub fn key(&self) -> String {
        self.to_json().to_string()
    }
}

/// Rows joined by `,`, components by `;`; an empty component is an empty
/// string.
impl fmt::Display for Multipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|rows| rows.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", parts.join(";"))
    }
}

impl FromStr for Multipartition {
    type Err = CrystalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let components = s
            .split(';')
            .map(|part| {
                if part.trim().is_empty() {
                    return Ok(Vec::new());
                }
                part.split(',')
                    .map(|r| {
                        r.trim().parse::<u32>().map_err(|e| CrystalError::Parse {
                            input: s.to_string(),
                            reason: e.to_string(),
                        })
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Multipartition::new(components)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Addable,
    Removable,
}

/// Order in which addable and removable `i`-nodes are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReadingOrder {
    /// Components in decreasing index, rows in decreasing index. With the
    /// `A R` cancellation this makes level-one vertices the restricted
    /// partitions.
    #[default]
    DecreasingComponentRow,
    /// The reverse order; yields conjugate labels. Kept for fault injection.
    IncreasingComponentRow,
}

pub const READING_ORDER: ReadingOrder = ReadingOrder::DecreasingComponentRow;

/// The reduced `i`-signature of a multipartition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    /// Uncancelled letters in reading order: all removable before all
    /// addable.
    pub letters: Vec<(NodeKind, NodeRef)>,
    pub good_addable: Option<NodeRef>,
    pub good_removable: Option<NodeRef>,
    pub eps: i64,
    pub phi: i64,
}

/// `B(Lambda)` for `Lambda` given by a multicharge.
#[derive(Debug, Clone)]
pub struct HighestWeightCrystal {
    idx: IndexSet,
    charge: Multicharge,
    order: ReadingOrder,
}

impl HighestWeightCrystal {
    pub fn new(idx: IndexSet, charge: Multicharge) -> Self {
        HighestWeightCrystal { idx, charge, order: READING_ORDER }
    }

    pub fn with_reading_order(mut self, order: ReadingOrder) -> Self {
        self.order = order;
        self
    }

    /// The level-two crystal `B(Lambda_0 + Lambda_l)` over `Z/2lZ`.
    pub fn level_two(ell: u32) -> Result<Self, CrystalError> {
        let idx = IndexSet::new(2 * ell)?;
        Ok(Self::new(idx, Multicharge::new(idx, &[0, ell as i64])?))
    }

    /// `B(Lambda_0)` over `Z/eZ`.
    pub fn level_one(e: u32) -> Result<Self, CrystalError> {
        let idx = IndexSet::new(e)?;
        Ok(Self::new(idx, Multicharge::new(idx, &[0])?))
    }

    pub fn index_set(&self) -> IndexSet {
        self.idx
    }

    pub fn multicharge(&self) -> &Multicharge {
        &self.charge
    }

    pub fn residue(&self, node: NodeRef) -> Residue {
        let c = self.charge.charges[node.m - 1];
        self.idx.residue(c.0 as i64 + node.c as i64 - node.r as i64)
    }

    fn nodes_in_reading_order(&self, mp: &Multipartition, i: Residue) -> Vec<(NodeKind, NodeRef)> {
        let mut out = Vec::new();
        let level = mp.level();
        for m in (1..=level).rev() {
            let len = mp.components[m - 1].len();
            for r in (1..=len + 1).rev() {
                let row = mp.row(m, r);
                let above = if r == 1 { u32::MAX } else { mp.row(m, r - 1) };
                if row > mp.row(m, r + 1) {
                    let node = NodeRef { m, r, c: row as usize };
                    if self.residue(node) == i {
                        out.push((NodeKind::Removable, node));
                    }
                }
                if above > row {
                    let node = NodeRef { m, r, c: row as usize + 1 };
                    if self.residue(node) == i {
                        out.push((NodeKind::Addable, node));
                    }
                }
            }
        }
        if self.order == ReadingOrder::IncreasingComponentRow {
            out.reverse();
        }
        out
    }

    pub fn signature(&self, mp: &Multipartition, i: Residue) -> Signature {
        let mut stack: Vec<(NodeKind, NodeRef)> = Vec::new();
        for letter in self.nodes_in_reading_order(mp, i) {
            if letter.0 == NodeKind::Removable && matches!(stack.last(), Some((NodeKind::Addable, _))) {
                stack.pop();
            } else {
                stack.push(letter);
            }
        }
        let good_addable = stack.iter().find(|l| l.0 == NodeKind::Addable).map(|l| l.1);
        let good_removable = stack.iter().rev().find(|l| l.0 == NodeKind::Removable).map(|l| l.1);
        let eps = stack.iter().filter(|l| l.0 == NodeKind::Removable).count() as i64;
        let phi = stack.len() as i64 - eps;
        Signature { letters: stack, good_addable, good_removable, eps, phi }
    }

    pub fn f_apply(&self, mp: &Multipartition, i: Residue) -> Option<Multipartition> {
        let node = self.signature(mp, i).good_addable?;
        let mut out = mp.clone();
        out.add_node(node);
        Some(out)
    }

    pub fn e_apply(&self, mp: &Multipartition, i: Residue) -> Option<Multipartition> {
        let node = self.signature(mp, i).good_removable?;
        let mut out = mp.clone();
        out.remove_node(node);
        Some(out)
    }

    /// Residue content `gamma` with `wt = Lambda - sum gamma_i alpha_i`.
    pub fn wt(&self, mp: &Multipartition) -> Weight {
        let mut w = self.charge.highest_weight();
        for (m, rows) in mp.components.iter().enumerate() {
            for (r, &len) in rows.iter().enumerate() {
                for c in 1..=len as usize {
                    w.add_alpha(self.residue(NodeRef { m: m + 1, r: r + 1, c }), -1);
                }
            }
        }
        w
    }

    /// Greedy peeling with the smallest residue first; returns the reversed
    /// removal word if it reaches the empty multipartition.
    pub fn peel(&self, mp: &Multipartition) -> Option<Vec<Residue>> {
        if mp.level() != self.charge.level() {
            return None;
        }
        let mut removed = Vec::new();
        let mut cur = mp.clone();
        while !cur.is_empty() {
            let (i, next) = self.idx.residues().find_map(|i| self.e_apply(&cur, i).map(|y| (i, y)))?;
            removed.push(i);
            cur = next;
        }
        removed.reverse();
        Some(removed)
    }

    /// True iff `mp` is a vertex of `B(Lambda)`.
    pub fn is_kleshchev(&self, mp: &Multipartition) -> bool {
        self.peel(mp).is_some()
    }
}

impl Crystal for HighestWeightCrystal {
    type Elem = Multipartition;

    fn colors(&self) -> IndexSet {
        self.idx
    }

    fn highest(&self) -> Multipartition {
        Multipartition::empty(self.charge.level())
    }

    fn f(&self, x: &Multipartition, i: Residue) -> Option<Multipartition> {
        self.f_apply(x, i)
    }

    fn e(&self, x: &Multipartition, i: Residue) -> Option<Multipartition> {
        self.e_apply(x, i)
    }

    fn eps(&self, x: &Multipartition, i: Residue) -> i64 {
        self.signature(x, i).eps
    }

    fn phi(&self, x: &Multipartition, i: Residue) -> i64 {
        self.signature(x, i).phi
    }

    fn wt(&self, x: &Multipartition) -> Weight {
        HighestWeightCrystal::wt(self, x)
    }

    fn key(&self, x: &Multipartition) -> String {
        x.key()
    }
}

/// The crystal `B(N * sum_i Lambda_i)`, which agrees with `B(infinity)` on
/// words of length at most `N`.
pub fn big_lambda_crystal(idx: IndexSet, bound: usize) -> HighestWeightCrystal {
    let charges: Vec<i64> =
        idx.residues().flat_map(|i| std::iter::repeat_n(i.0 as i64, bound.max(1))).collect();
    HighestWeightCrystal::new(idx, Multicharge::new(idx, &charges).expect("nonempty"))
}

/// Image of `f_{w_n} ... f_{w_1}` applied to the empty multipartition of
/// [`big_lambda_crystal`].
pub fn big_lambda_embed(idx: IndexSet, word: &[Residue], bound: usize) -> Result<Multipartition, CrystalError> {
    if word.len() > bound {
        return Err(CrystalError::DepthBound { len: word.len(), bound });
    }
    let model = big_lambda_crystal(idx, bound);
    Ok(model.from_word(word).expect("f never vanishes within the depth bound"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(s: &str) -> Multipartition {
        s.parse().unwrap()
    }

    fn r(letters: &[u32]) -> Vec<Residue> {
        letters.iter().map(|&a| Residue(a)).collect()
    }

    #[test]
    fn residues_of_nodes() {
        let l2 = HighestWeightCrystal::level_two(3).unwrap();
        assert_eq!(l2.residue(NodeRef { m: 1, r: 1, c: 1 }), Residue(0));
        assert_eq!(l2.residue(NodeRef { m: 2, r: 1, c: 1 }), Residue(3));
        let l1 = HighestWeightCrystal::level_one(3).unwrap();
        assert_eq!(l1.residue(NodeRef { m: 1, r: 2, c: 1 }), Residue(2));
    }

    #[test]
    fn signature_of_empty() {
        let l1 = HighestWeightCrystal::level_one(3).unwrap();
        let sig = l1.signature(&mp(""), Residue(0));
        assert_eq!((sig.eps, sig.phi), (0, 1));
        assert_eq!(sig.good_addable, Some(NodeRef { m: 1, r: 1, c: 1 }));
        assert_eq!(l1.signature(&mp(""), Residue(1)).phi, 0);
    }

    #[test]
    fn reading_order_calibration_e2() {
        let l1 = HighestWeightCrystal::level_one(2).unwrap();
        let sig = l1.signature(&mp("1"), Residue(1));
        let kinds: Vec<_> = sig.letters.iter().map(|l| (l.0, l.1.r, l.1.c)).collect();
        assert_eq!(kinds, vec![(NodeKind::Addable, 2, 1), (NodeKind::Addable, 1, 2)]);
        assert_eq!(sig.good_addable, Some(NodeRef { m: 1, r: 2, c: 1 }));
        assert_eq!(l1.f_apply(&mp("1"), Residue(1)), Some(mp("1,1")));

        let flipped = l1.clone().with_reading_order(ReadingOrder::IncreasingComponentRow);
        assert_eq!(flipped.f_apply(&mp("1"), Residue(1)), Some(mp("2")));
    }

    #[test]
    fn signature_without_cancellation() {
        let l1 = HighestWeightCrystal::level_one(2).unwrap();
        let sig = l1.signature(&mp("1,1"), Residue(1));
        let kinds: Vec<_> = sig.letters.iter().map(|l| l.0).collect();
        assert_eq!(kinds, vec![NodeKind::Removable, NodeKind::Addable]);
        assert_eq!((sig.eps, sig.phi), (1, 1));
        let wt = l1.wt(&mp("1,1"));
        assert_eq!(sig.phi - sig.eps, l1.index_set().pair_weight(Residue(1), &wt));
    }

    #[test]
    fn level_two_operators() {
        let l2 = HighestWeightCrystal::level_two(3).unwrap();
        assert_eq!(l2.f_apply(&mp(";"), Residue(3)), Some(mp(";1")));
        assert_eq!(l2.f_apply(&mp(";1"), Residue(0)), Some(mp("1;1")));
        assert_eq!(l2.e_apply(&mp(";"), Residue(0)), None);
        assert_eq!(l2.f_apply(&mp(";"), Residue(1)), None);
    }

    #[test]
    fn kleshchev_examples() {
        let l1 = HighestWeightCrystal::level_one(2).unwrap();
        assert!(l1.is_kleshchev(&mp("")));
        assert!(!l1.is_kleshchev(&mp("2")));
        assert!(l1.is_kleshchev(&mp("1,1")));
        let l3 = HighestWeightCrystal::level_one(3).unwrap();
        assert!(l3.is_kleshchev(&mp("3,1")));
        assert!(!l3.is_kleshchev(&mp("3")));
        assert!(!l3.is_kleshchev(&mp("1;1")));
    }

    #[test]
    fn big_lambda_examples() {
        let i6 = IndexSet::new(6).unwrap();
        assert!(big_lambda_embed(i6, &[], 2).unwrap().is_empty());
        assert_eq!(big_lambda_embed(i6, &r(&[0, 3]), 2).unwrap(), big_lambda_embed(i6, &r(&[3, 0]), 2).unwrap());
        assert_ne!(big_lambda_embed(i6, &r(&[0, 1]), 2).unwrap(), big_lambda_embed(i6, &r(&[1, 0]), 2).unwrap());
        assert!(matches!(big_lambda_embed(i6, &r(&[0, 1, 2]), 2), Err(CrystalError::DepthBound { .. })));
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(mp("1,1;1").to_string(), "1,1;1");
        assert_eq!(mp(";").to_string(), ";");
        assert_eq!(mp(";").level(), 2);
        assert_eq!(mp("").level(), 1);
        assert_eq!(mp("2,1;").to_json().to_string(), "[[2,1],[]]");
        assert_eq!(Multipartition::from_json(&mp("2,1;").to_json()).unwrap(), mp("2,1;"));
        assert!("1,2".parse::<Multipartition>().is_err());
        assert!("a".parse::<Multipartition>().is_err());
    }
}
