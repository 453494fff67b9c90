//! Checks on whole truncated crystals: axioms, isomorphisms, vertex sets.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use super::{Outcome, Params};
use crate::binf::BinfCrystal;
use crate::cartan::{Folding, IndexSet, Residue, Weight};
use crate::error::{CrystalError, HarnessError};
use crate::graphs::{bfs_generate, bfs_layers, check_axioms, check_isomorphism, CrystalGraph, IsoOutcome};
use crate::hat::{h_auto_in, iota_in, Folded};
use crate::hwcrystal::{HighestWeightCrystal, Multipartition};
use crate::model::Crystal;

impl Params {
    pub(crate) fn folding(&self) -> Result<Folding, CrystalError> {
        Folding::with_small_rank(self.ell, self.allow_l2)
    }

    pub(crate) fn binf(&self, e: u32) -> Result<BinfCrystal, CrystalError> {
        Ok(BinfCrystal::new(IndexSet::new(e)?).with_raise_position(self.conventions.raise))
    }

    pub(crate) fn level_one(&self, e: u32) -> Result<HighestWeightCrystal, CrystalError> {
        Ok(HighestWeightCrystal::level_one(e)?.with_reading_order(self.conventions.reading_order))
    }

    pub(crate) fn level_two(&self) -> Result<HighestWeightCrystal, CrystalError> {
        Ok(HighestWeightCrystal::level_two(self.ell)?.with_reading_order(self.conventions.reading_order))
    }

    pub(crate) fn hat_binf(&self) -> Result<Folded<BinfCrystal>, CrystalError> {
        let folding = self.folding()?;
        Folded::new(self.binf(folding.unfolded().e())?, folding, Weight::zero())
    }

    pub(crate) fn hat_hw(&self) -> Result<Folded<HighestWeightCrystal>, CrystalError> {
        let folding = self.folding()?;
        Folded::new(self.level_two()?, folding, Weight::fundamental(Residue(0)))
    }
}

/// Partitions of `n` whose consecutive part differences, including the last
/// part, are all below `ell`; sorted, as level-one keys.
pub fn restricted_partitions(n: usize, ell: u32) -> BTreeSet<String> {
    fn go(rest: u32, max: u32, cur: &mut Vec<u32>, ell: u32, out: &mut BTreeSet<String>) {
        if rest == 0 {
            if cur.last().is_none_or(|&p| p < ell) {
                out.insert(Multipartition::new(vec![cur.clone()]).expect("partition").key());
            }
            return;
        }
        for p in (1..=max.min(rest)).rev() {
            if let Some(&prev) = cur.last() {
                if prev - p >= ell {
                    continue;
                }
            }
            cur.push(p);
            go(rest - p, p, cur, ell, out);
            cur.pop();
        }
    }
    let mut out = BTreeSet::new();
    go(n as u32, n as u32, &mut Vec::new(), ell, &mut out);
    out
}

/// Number of bipartitions of size at most `n`.
pub(crate) fn bipartition_count(n: usize) -> u64 {
    let mut p = vec![0u64; n + 1];
    p[0] = 1;
    for part in 1..=n {
        for m in part..=n {
            p[m] = p[m].saturating_add(p[m - part]);
        }
    }
    (0..=n).flat_map(|m| (0..=m).map(move |a| (a, m - a))).fold(0u64, |acc, (a, b)| acc.saturating_add(p[a].saturating_mul(p[b])))
}

fn iso(g1: &CrystalGraph, g2: &CrystalGraph) -> Result<Option<serde_json::Value>, HarnessError> {
    let identity: Vec<u32> = (0..g1.colors.e()).collect();
    Ok(match check_isomorphism(g1, g2, &identity)? {
        IsoOutcome::Isomorphic(_) => None,
        IsoOutcome::Counterexample(cx) => Some(serde_json::to_value(cx).expect("serializes")),
    })
}

fn layers_str(sizes: &[usize]) -> String {
    sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
}

pub(crate) fn hat_axioms(p: &Params) -> Result<Outcome, HarnessError> {
    let binf = bfs_generate(&p.hat_binf()?, p.depth);
    let hw = bfs_generate(&p.hat_hw()?, p.depth);
    for (model, g) in [("hat-binf", &binf), ("hat-hw", &hw)] {
        let violations = check_axioms(g);
        if let Some(v) = violations.first() {
            let cx = json!({"model": model, "site": v.site, "reasons": v.reasons});
            return Ok(Outcome::fail(format!("{} axiom violations in {model}", violations.len()), cx));
        }
    }
    Ok(Outcome::pass(format!(
        "hat-binf layers {}; hat-hw layers {}",
        layers_str(&binf.layer_sizes()),
        layers_str(&hw.layer_sizes())
    )))
}

pub(crate) fn binf_fold_iso(p: &Params) -> Result<Outcome, HarnessError> {
    let g1 = bfs_generate(&p.hat_binf()?, p.depth);
    let g2 = bfs_generate(&p.binf(p.ell)?, p.depth);
    let detail = format!("layers {} vs {}", layers_str(&g1.layer_sizes()), layers_str(&g2.layer_sizes()));
    if let Some(cx) = iso(&g1, &g2)? {
        return Ok(Outcome::fail(detail, cx));
    }
    if g1.layer_sizes() != g2.layer_sizes() {
        return Ok(Outcome::fail(detail, json!({"reason": "layer sizes differ"})));
    }
    Ok(Outcome::pass(detail))
}

/// Layer `n` of the level-one graph must be the restricted partitions of `n`.
fn restricted_mismatch(g: &CrystalGraph, ell: u32) -> Option<serde_json::Value> {
    for n in 0..=g.depth {
        let got = g.keys_at_depth(n);
        let want = restricted_partitions(n, ell);
        if got != want {
            let missing: Vec<&String> = want.difference(&got).collect();
            let unexpected: Vec<&String> = got.difference(&want).collect();
            return Some(json!({
                "e": ell,
                "layer": n,
                "missing": missing,
                "unexpected": unexpected,
            }));
        }
    }
    None
}

pub(crate) fn hw_fold_iso(p: &Params) -> Result<Outcome, HarnessError> {
    let hat = p.hat_hw()?;
    let g1 = bfs_generate(&hat, p.depth);
    let g2 = bfs_generate(&p.level_one(p.ell)?, p.depth);
    let detail = format!(
        "hat-hw layers {}; level-one layers {}",
        layers_str(&g1.layer_sizes()),
        layers_str(&g2.layer_sizes())
    );
    if let Some(cx) = restricted_mismatch(&g2, p.ell) {
        return Ok(Outcome::fail(detail, cx));
    }
    if let Some(cx) = iso(&g1, &g2)? {
        return Ok(Outcome::fail(detail, cx));
    }
    // phi-hat must agree with phi on both slots of every pair
    for x in hat.generate(p.depth).into_iter().flatten() {
        for i in hat.folding().folded_indices() {
            let (a, b) = hat.folding().hat_pair(i);
            let ph = hat.phi_hat(&x, i)?;
            let (pa, pb) = (hat.inner().phi(&x.inner, a), hat.inner().phi(&x.inner, b));
            if ph != pa || pa != pb {
                let cx = json!({"word": word_json(&x.provenance), "color": i.0, "phi": [ph, pa, pb]});
                return Ok(Outcome::fail(detail, cx));
            }
        }
    }
    Ok(Outcome::pass(detail))
}

pub(crate) fn word_json(w: &Option<Vec<crate::cartan::FoldedIndex>>) -> serde_json::Value {
    match w {
        Some(w) => json!(w.iter().map(|i| i.0).collect::<Vec<_>>()),
        None => serde_json::Value::Null,
    }
}

pub(crate) fn klesh_count(p: &Params) -> Result<Outcome, HarnessError> {
    // e = 2 calibration: f_1 f_0 of the empty partition is (1,1)
    let calib = p.level_one(2)?;
    let two = calib.from_word(&[Residue(0), Residue(1)]);
    let want = Multipartition::new(vec![vec![1, 1]])?;
    if two.as_ref() != Some(&want) {
        let got = two.map(|m| m.to_string());
        return Ok(Outcome::fail(
            "e = 2 calibration failed",
            json!({"e": 2, "word": [0, 1], "expected": want.to_string(), "got": got}),
        ));
    }
    let mut sizes = Vec::new();
    for e in [2, p.ell] {
        let g = bfs_generate(&p.level_one(e)?, p.depth);
        if let Some(cx) = restricted_mismatch(&g, e) {
            return Ok(Outcome::fail(format!("level-one e = {e} differs from restricted partitions"), cx));
        }
        sizes = g.layer_sizes();
    }
    Ok(Outcome::pass(format!("restricted partition counts {}", layers_str(&sizes))))
}

pub(crate) fn iota_welldef(p: &Params) -> Result<Outcome, HarnessError> {
    let folding = p.folding()?;
    let small = p.level_one(p.ell)?;
    let big = p.level_two()?;

    // every valid path of length <= depth, by depth-first extension
    let mut images: BTreeMap<String, (Vec<u32>, Multipartition)> = BTreeMap::new();
    let mut preimage: BTreeMap<Multipartition, (Vec<u32>, String)> = BTreeMap::new();
    let mut by_depth: Vec<BTreeSet<Multipartition>> = vec![BTreeSet::new(); p.depth + 1];
    let mut stack = vec![(Vec::<u32>::new(), small.highest())];
    while let Some((path, lam)) = stack.pop() {
        let letters: Vec<_> = path.iter().map(|&a| crate::cartan::FoldedIndex(a)).collect();
        let image = iota_in(&small, &big, &folding, &letters)?;
        let key = small.key(&lam);
        if let Some((other, prev)) = images.get(&key) {
            if prev != &image {
                let cx = json!({"path1": other, "path2": path, "reason": "same partition, different images"});
                return Ok(Outcome::fail("iota is path dependent", cx));
            }
        } else {
            if let Some((other, other_key)) = preimage.get(&image) {
                let cx = json!({"path1": other, "path2": path, "partitions": [other_key, key]});
                return Ok(Outcome::fail("iota is not injective", cx));
            }
            preimage.insert(image.clone(), (path.clone(), key.clone()));
            images.insert(key, (path.clone(), image.clone()));
            by_depth[path.len()].insert(image);
        }
        if path.len() < p.depth {
            for i in small.colors().residues() {
                if let Some(next) = small.f(&lam, i) {
                    let mut q = path.clone();
                    q.push(i.0);
                    stack.push((q, next));
                }
            }
        }
    }

    let layers = bfs_layers(&big, 2 * p.depth);
    let mut swaps = 0usize;
    let mut total = 0usize;
    for (size, layer) in layers.iter().enumerate() {
        let mut fixed = BTreeSet::new();
        for b in layer {
            let hb = h_auto_in(&big, &folding, b)?;
            let hhb = h_auto_in(&big, &folding, &hb)?;
            if &hhb != b {
                return Ok(Outcome::fail("h is not an involution", json!({"vertex": b.to_string()})));
            }
            for i in big.colors().residues() {
                if big.eps(&hb, i) != big.eps(b, folding.swap(i)) {
                    let cx = json!({"vertex": b.to_string(), "color": i.0});
                    return Ok(Outcome::fail("h does not intertwine eps", cx));
                }
            }
            let swapped: Vec<Vec<u32>> = b.components().iter().rev().cloned().collect();
            total += 1;
            if Multipartition::new(swapped)? == hb {
                swaps += 1;
            }
            if &hb == b {
                fixed.insert(b.clone());
            }
        }
        if size % 2 == 1 {
            if !fixed.is_empty() {
                let v: Vec<String> = fixed.iter().map(|b| b.to_string()).collect();
                return Ok(Outcome::fail("h-fixed vertex of odd size", json!({"size": size, "vertices": v})));
            }
            continue;
        }
        let n = size / 2;
        if fixed != by_depth[n] {
            let missing: Vec<String> = fixed.difference(&by_depth[n]).map(|b| b.to_string()).collect();
            let extra: Vec<String> = by_depth[n].difference(&fixed).map(|b| b.to_string()).collect();
            let cx = json!({"depth": n, "fixed_not_in_image": missing, "image_not_fixed": extra});
            return Ok(Outcome::fail("image differs from the h-fixed set", cx));
        }
    }
    let counts: Vec<usize> = by_depth.iter().map(|s| s.len()).collect();
    Ok(Outcome::pass(format!(
        "image sizes {}; h equals component swap on {swaps} of {total} vertices",
        layers_str(&counts)
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restricted_counts() {
        let counts: Vec<usize> = (0..=6).map(|n| restricted_partitions(n, 3).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 2, 4, 5, 7]);
        assert_eq!(restricted_partitions(2, 2).into_iter().collect::<Vec<_>>(), vec!["[[1,1]]"]);
    }

    #[test]
    fn bipartitions() {
        // 1 + 2 + 5 bipartitions of sizes 0, 1, 2
        assert_eq!(bipartition_count(2), 8);
    }
}
