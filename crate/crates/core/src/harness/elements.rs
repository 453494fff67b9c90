//! Checks quantified over the elements of truncated folded crystals.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::models::word_json;
use super::{Outcome, Params};
use crate::cartan::{FoldedIndex, Residue};
use crate::error::HarnessError;
use crate::hat::{Folded, HatElement};
use crate::model::Crystal;

/// A property violated at one element, for one or two colors.
struct Failure {
    color: u32,
    other: Option<u32>,
    reason: String,
}

fn failure(color: FoldedIndex, other: Option<FoldedIndex>, reason: impl Into<String>) -> Failure {
    Failure { color: color.0, other: other.map(|j| j.0), reason: reason.into() }
}

type Found = Result<Option<Failure>, HarnessError>;

/// Sets of inner elements of `B-hat(0..=depth)`.
fn layer_sets<C: Crystal>(layers: &[Vec<HatElement<C::Elem>>]) -> Vec<HashSet<C::Elem>> {
    layers.iter().map(|l| l.iter().map(|x| x.inner.clone()).collect()).collect()
}

fn predicate<C>(name: &str, hat: &Folded<C>, x: &HatElement<C::Elem>, n: usize, sets: &[HashSet<C::Elem>]) -> Found
where
    C: Crystal,
{
    match name {
        "crystal1" => crystal1_at(hat, x, n, sets),
        "mult_two_shadow" => mult_two_at(hat, x, n, sets),
        "star_eps" => star_at(hat, x, n, sets),
        "lemmas_10x" => lemmas_at(hat, x),
        _ => Err(HarnessError::UnknownCheck(name.to_string())),
    }
}

/// Runs `name`'s predicate on every element of `B-hat(n)`, `n <= depth`.
/// Returns the layer sizes and the first failure in layer and key order.
fn quantify<C>(name: &str, model: &str, hat: &Folded<C>, depth: usize) -> Result<(Vec<usize>, Option<Value>), HarnessError>
where
    C: Crystal + Sync,
    C::Elem: Send + Sync,
{
    let layers = hat.generate(depth + 1);
    let sets = layer_sets::<C>(&layers);
    for n in 0..=depth {
        let found = layers[n]
            .par_iter()
            .find_map_first(|x| predicate(name, hat, x, n, &sets).transpose().map(|r| r.map(|f| (x, f))));
        if let Some(found) = found {
            let (x, f) = found?;
            let cx = json!({
                "model": model,
                "word": word_json(&x.provenance),
                "color": f.color,
                "other": f.other,
                "reason": f.reason,
            });
            return Ok((Vec::new(), Some(cx)));
        }
    }
    Ok((layers[..=depth].iter().map(|l| l.len()).collect(), None))
}

fn sizes_str(sizes: &[usize]) -> String {
    sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
}

fn replay_on<C: Crystal>(name: &str, hat: &Folded<C>, word: &[FoldedIndex]) -> Result<Option<String>, HarnessError> {
    let x = hat
        .from_hat_word(word)
        .ok_or_else(|| HarnessError::Counterexample("word leaves the crystal".into()))?;
    let layers = hat.generate(word.len() + 1);
    let sets = layer_sets::<C>(&layers);
    let n = layers.iter().position(|l| l.iter().any(|y| y.inner == x.inner)).unwrap_or(word.len());
    Ok(predicate(name, hat, &x, n, &sets)?.map(|f| f.reason))
}

pub(crate) fn replay(name: &str, p: &Params, cx: &Value) -> Result<Option<String>, HarnessError> {
    let bad = || HarnessError::Counterexample(cx.to_string());
    if cx["model"] == "binf" {
        let w: Vec<Residue> = cx["unfolded_word"]
            .as_array()
            .ok_or_else(bad)?
            .iter()
            .map(|v| v.as_u64().map(|a| Residue(a as u32)).ok_or_else(bad))
            .collect::<Result<_, _>>()?;
        let i = Residue(cx["color"].as_u64().ok_or_else(bad)? as u32);
        let unfolded = p.binf(2 * p.ell)?;
        let (_, right) = unfolded.b_tensor_push(&w, i);
        let star = unfolded.eps_star(&unfolded.from_word(&w), i);
        return Ok((right.a as i64 != star)
            .then(|| format!("eps-star is {star}, tensor-product count is {}", right.a)));
    }
    let word: Vec<FoldedIndex> = cx["word"]
        .as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|v| v.as_u64().map(|a| FoldedIndex(a as u32)).ok_or_else(bad))
        .collect::<Result<_, _>>()?;
    match cx["model"].as_str() {
        Some("hat-binf") => replay_on(name, &p.hat_binf()?, &word),
        Some("hat-hw") => replay_on(name, &p.hat_hw()?, &word),
        _ => Err(bad()),
    }
}

fn e_inner<C: Crystal>(hat: &Folded<C>, x: &C::Elem, i: FoldedIndex) -> Option<C::Elem> {
    hat.e_hat(&hat.lift(x.clone()), i).map(|y| y.inner)
}

fn f_inner<C: Crystal>(hat: &Folded<C>, x: &C::Elem, i: FoldedIndex) -> Option<C::Elem> {
    hat.f_hat(&hat.lift(x.clone()), i).map(|y| y.inner)
}

fn eps_inner<C: Crystal>(hat: &Folded<C>, x: &C::Elem, i: FoldedIndex) -> i64 {
    hat.eps_hat(&hat.lift(x.clone()), i)
}

/// True when `theta(i)` avoids `theta(j) +- 1` and `theta(j) + l +- 1`.
fn far_apart<C: Crystal>(hat: &Folded<C>, i: FoldedIndex, j: FoldedIndex) -> bool {
    let fold = hat.folding();
    let e = fold.unfolded().e() as i64;
    let ell = fold.ell() as i64;
    let d = (fold.theta(i).0 as i64 - fold.theta(j).0 as i64).rem_euclid(e);
    ![1, e - 1, (ell + 1) % e, (ell - 1).rem_euclid(e)].contains(&d)
}

fn adjacent<C: Crystal>(hat: &Folded<C>, i: FoldedIndex, j: FoldedIndex) -> bool {
    let ell = hat.folding().ell();
    (i.0 + 1) % ell == j.0 || (j.0 + 1) % ell == i.0
}

fn crystal1_at<C: Crystal>(hat: &Folded<C>, x: &HatElement<C::Elem>, n: usize, sets: &[HashSet<C::Elem>]) -> Found {
    let fold = hat.folding();
    let inner = hat.inner();
    for i in fold.folded_indices() {
        let (a, b) = fold.hat_pair(i);
        let (ea, eb) = (inner.eps(&x.inner, a), inner.eps(&x.inner, b));
        if ea != eb {
            return Ok(Some(failure(i, None, format!("eps_{} = {ea} but eps_{} = {eb}", a.0, b.0))));
        }
        let eh = hat.eps_hat(x, i);
        let fx = hat.f_hat(x, i).map(|y| y.inner);
        if fx != hat.f_hat_swapped(&x.inner, i) {
            return Ok(Some(failure(i, None, "f-hat depends on the composition order")));
        }
        if let Some(y) = &fx {
            if !sets[n + 1].contains(y) {
                return Ok(Some(failure(i, None, "f-hat leaves the next layer")));
            }
        }
        match hat.e_hat(x, i) {
            Some(_) if eh == 0 => return Ok(Some(failure(i, None, "e-hat nonzero with eps-hat = 0"))),
            Some(y) if n == 0 || !sets[n - 1].contains(&y.inner) => {
                return Ok(Some(failure(i, None, "e-hat leaves the previous layer")));
            }
            None if eh > 0 => return Ok(Some(failure(i, None, "e-hat zero with eps-hat > 0"))),
            _ => {}
        }
        for j in fold.folded_indices().filter(|&j| j != i) {
            let fj = f_inner(hat, &x.inner, j);
            if far_apart(hat, i, j) {
                let ff = fx.as_ref().and_then(|y| f_inner(hat, y, j));
                let gg = fj.as_ref().and_then(|y| f_inner(hat, y, i));
                if ff != gg {
                    return Ok(Some(failure(i, Some(j), "f-hat operators do not commute")));
                }
                let ei = e_inner(hat, &x.inner, i);
                let ee = ei.as_ref().and_then(|y| e_inner(hat, y, j));
                let ej = e_inner(hat, &x.inner, j);
                if ee != ej.as_ref().and_then(|y| e_inner(hat, y, i)) {
                    return Ok(Some(failure(i, Some(j), "e-hat operators do not commute")));
                }
                let ef = fj.as_ref().and_then(|y| e_inner(hat, y, i));
                if ef != ei.as_ref().and_then(|y| f_inner(hat, y, j)) {
                    return Ok(Some(failure(i, Some(j), "e-hat_i and f-hat_j do not commute")));
                }
                if let Some(y) = &fj {
                    if eps_inner(hat, y, i) != eh {
                        return Ok(Some(failure(i, Some(j), "eps-hat_i changed by f-hat_j")));
                    }
                }
            } else if adjacent(hat, i, j) {
                if let Some(y) = &fj {
                    let after = eps_inner(hat, y, i);
                    let a = hat.folding().folded().cartan_pairing(Residue(i.0), Residue(j.0));
                    if after > eh || after < eh + a {
                        return Ok(Some(failure(i, Some(j), format!("eps-hat_i went from {eh} to {after}"))));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn mult_two_at<C: Crystal>(hat: &Folded<C>, x: &HatElement<C::Elem>, n: usize, sets: &[HashSet<C::Elem>]) -> Found {
    let fold = hat.folding();
    let inner = hat.inner();
    let e2 = |j: Residue, k: Residue| inner.e(&x.inner, k).and_then(|y| inner.e(&y, j));
    for i in fold.folded_indices() {
        let (a, b) = fold.hat_pair(i);
        if e2(a, b) != e2(b, a) {
            return Ok(Some(failure(i, None, "two-step removals depend on the order")));
        }
    }
    if n == 0 {
        return Ok(None);
    }
    let mut counts: HashMap<C::Elem, usize> = HashMap::new();
    for j in fold.unfolded().residues() {
        for k in fold.unfolded().residues() {
            if let Some(y) = e2(j, k) {
                if sets[n - 1].contains(&y) {
                    *counts.entry(y).or_default() += 1;
                }
            }
        }
    }
    let expected: HashSet<C::Elem> = fold.folded_indices().filter_map(|i| e_inner(hat, &x.inner, i)).collect();
    let reached: HashSet<C::Elem> = counts.keys().cloned().collect();
    if reached != expected {
        let i = FoldedIndex(0);
        return Ok(Some(failure(i, None, "two-step removals into the previous layer are not the e-hat images")));
    }
    for (y, c) in counts {
        if c != 2 {
            let i = fold.folded_indices().find(|&i| e_inner(hat, &x.inner, i).as_ref() == Some(&y));
            return Ok(Some(failure(i.unwrap_or(FoldedIndex(0)), None, format!("reached by {c} ordered pairs"))));
        }
    }
    Ok(None)
}

fn star_at<C: Crystal>(hat: &Folded<C>, x: &HatElement<C::Elem>, n: usize, sets: &[HashSet<C::Elem>]) -> Found {
    let fold = hat.folding();
    let inner = hat.inner();
    for i in fold.folded_indices() {
        let (a, b) = fold.hat_pair(i);
        let es = hat.eps_hat_star(x, i)?;
        let (sa, sb) = (inner.eps_star(&x.inner, a)?, inner.eps_star(&x.inner, b)?);
        if es != sa || sa != sb {
            return Ok(Some(failure(i, None, format!("eps-star values {es}, {sa}, {sb}"))));
        }
        let fs = hat.f_hat_star(x, i)?;
        if !sets[n + 1].contains(&fs.inner) {
            return Ok(Some(failure(i, None, "f-hat-star leaves the next layer")));
        }
        match hat.e_hat_star(x, i)? {
            Some(_) if es == 0 => return Ok(Some(failure(i, None, "e-hat-star nonzero with eps-star = 0"))),
            Some(y) if n == 0 || !sets[n - 1].contains(&y.inner) => {
                return Ok(Some(failure(i, None, "e-hat-star leaves the previous layer")));
            }
            None if es > 0 => return Ok(Some(failure(i, None, "e-hat-star zero with eps-star > 0"))),
            _ => {}
        }
        // eps_c(f*_c M) = eps_c(M) + 1 holds for c = a iff for c = b
        let bumps = |c: Residue| -> Result<bool, HarnessError> {
            Ok(inner.eps(&inner.f_star(&x.inner, c)?, c) == inner.eps(&x.inner, c) + 1)
        };
        let (ba, bb) = (bumps(a)?, bumps(b)?);
        if ba != bb {
            return Ok(Some(failure(i, None, "star increments differ between the two slots")));
        }
        if ba && Some(&fs.inner) != hat.f_hat(x, i).as_ref().map(|y| &y.inner) {
            return Ok(Some(failure(i, None, "f-hat-star differs from f-hat although both slots commute")));
        }
        let star_bumps = |c: Residue| -> Result<Option<bool>, HarnessError> {
            match inner.f(&x.inner, c) {
                Some(y) => Ok(Some(inner.eps_star(&y, c)? == inner.eps_star(&x.inner, c)? + 1)),
                None => Ok(None),
            }
        };
        if star_bumps(a)? != star_bumps(b)? {
            return Ok(Some(failure(i, None, "eps-star increments under f differ between the two slots")));
        }
    }
    Ok(None)
}

fn pow_e<C: Crystal>(hat: &Folded<C>, x: &HatElement<C::Elem>, i: FoldedIndex, m: i64) -> Option<HatElement<C::Elem>> {
    (0..m).try_fold(x.clone(), |y, _| hat.e_hat(&y, i))
}

fn pow_e_star<C: Crystal>(
    hat: &Folded<C>,
    x: &HatElement<C::Elem>,
    i: FoldedIndex,
    m: i64,
) -> Result<Option<HatElement<C::Elem>>, HarnessError> {
    let mut cur = x.clone();
    for _ in 0..m {
        match hat.e_hat_star(&cur, i)? {
            Some(y) => cur = y,
            None => return Ok(None),
        }
    }
    Ok(Some(cur))
}

fn lemmas_at<C: Crystal>(hat: &Folded<C>, x: &HatElement<C::Elem>) -> Found {
    let fold = hat.folding();
    let same = |a: &Option<HatElement<C::Elem>>, b: &Option<HatElement<C::Elem>>| {
        a.as_ref().map(|y| &y.inner) == b.as_ref().map(|y| &y.inner)
    };
    for i in fold.folded_indices() {
        let eps = hat.eps_hat(x, i);
        let es = hat.eps_hat_star(x, i)?;
        for j in fold.folded_indices() {
            let fsj = hat.f_hat_star(x, j)?;
            let after = hat.eps_hat(&fsj, i);
            let ok = if i == j { after == eps || after == eps + 1 } else { after == eps };
            if !ok {
                return Ok(Some(failure(i, Some(j), "eps-hat_i after f-hat-star_j out of range")));
            }
            if after == eps {
                let lhs = pow_e(hat, &fsj, i, eps);
                let rhs = match pow_e(hat, x, i, eps) {
                    Some(y) => Some(hat.f_hat_star(&y, j)?),
                    None => None,
                };
                if !same(&lhs, &rhs) {
                    return Ok(Some(failure(i, Some(j), "e-hat_i^eps and f-hat-star_j do not commute")));
                }
            }
            let Some(fj) = hat.f_hat(x, j) else { continue };
            let after_star = hat.eps_hat_star(&fj, i)?;
            let ok = if i == j { after_star == es || after_star == es + 1 } else { after_star == es };
            if !ok {
                return Ok(Some(failure(i, Some(j), "eps-hat-star_i after f-hat_j out of range")));
            }
            if after_star == es {
                let lhs = pow_e_star(hat, &fj, i, es)?;
                let rhs = pow_e_star(hat, x, i, es)?.and_then(|y| hat.f_hat(&y, j));
                if !same(&lhs, &rhs) {
                    return Ok(Some(failure(i, Some(j), "e-hat-star_i^a and f-hat_j do not commute")));
                }
            }
        }
        let m1 = pow_e(hat, x, i, eps).expect("eps-hat many raisings succeed");
        let m2 = pow_e_star(hat, x, i, es)?.expect("eps-hat-star many raisings succeed");
        if (es == hat.eps_hat_star(&m1, i)?) != (eps == hat.eps_hat(&m2, i)) {
            return Ok(Some(failure(i, None, "eps-star of the e-hat string end and eps of the e-hat-star string end disagree")));
        }
        let fsi = hat.f_hat_star(x, i)?;
        if hat.eps_hat(&fsi, i) == eps + 1 && !same(&hat.e_hat(&fsi, i), &Some(x.clone())) {
            return Ok(Some(failure(i, None, "e-hat does not undo f-hat-star")));
        }
        if let Some(fi) = hat.f_hat(x, i) {
            if hat.eps_hat_star(&fi, i)? == es + 1 && !same(&hat.e_hat_star(&fi, i)?, &Some(x.clone())) {
                return Ok(Some(failure(i, None, "e-hat-star does not undo f-hat")));
            }
        }
    }
    Ok(None)
}

pub(crate) fn crystal1(p: &Params) -> Result<Outcome, HarnessError> {
    let (binf_sizes, cx) = quantify("crystal1", "hat-binf", &p.hat_binf()?, p.depth)?;
    if let Some(cx) = cx {
        return Ok(Outcome::fail("hat-binf violates the folded eps identities", cx));
    }
    let (hw_sizes, cx) = quantify("crystal1", "hat-hw", &p.hat_hw()?, p.depth)?;
    if let Some(cx) = cx {
        return Ok(Outcome::fail("hat-hw violates the folded eps identities", cx));
    }
    Ok(Outcome::pass(format!(
        "hat-binf layers {}; hat-hw layers {}",
        sizes_str(&binf_sizes),
        sizes_str(&hw_sizes)
    )))
}

pub(crate) fn mult_two_shadow(p: &Params) -> Result<Outcome, HarnessError> {
    let (binf_sizes, cx) = quantify("mult_two_shadow", "hat-binf", &p.hat_binf()?, p.depth)?;
    if let Some(cx) = cx {
        return Ok(Outcome::fail("hat-binf", cx));
    }
    let (hw_sizes, cx) = quantify("mult_two_shadow", "hat-hw", &p.hat_hw()?, p.depth)?;
    if let Some(cx) = cx {
        return Ok(Outcome::fail("hat-hw", cx));
    }
    let total: usize = binf_sizes.iter().chain(&hw_sizes).sum();
    Ok(Outcome::pass(format!("{total} elements, every removal reached by exactly 2 ordered pairs")))
}

pub(crate) fn lemmas_10x(p: &Params) -> Result<Outcome, HarnessError> {
    let (sizes, cx) = quantify("lemmas_10x", "hat-binf", &p.hat_binf()?, p.depth)?;
    match cx {
        Some(cx) => Ok(Outcome::fail("hat-binf", cx)),
        None => Ok(Outcome::pass(format!("layers {}", sizes_str(&sizes)))),
    }
}

pub(crate) fn star_eps(p: &Params) -> Result<Outcome, HarnessError> {
    let hat = p.hat_binf()?;
    let (sizes, cx) = quantify("star_eps", "hat-binf", &hat, p.depth)?;
    if let Some(cx) = cx {
        return Ok(Outcome::fail("hat-binf", cx));
    }

    // the f-hat-star words generate the same layers as the f-hat words
    let layers = hat.generate(p.depth);
    let mut frontier = vec![hat.hat_highest()];
    for (n, layer) in layers.iter().enumerate().skip(1) {
        let mut next: Vec<HatElement<_>> = Vec::new();
        let mut seen = HashSet::new();
        for x in &frontier {
            for i in hat.folding().folded_indices() {
                let y = hat.f_hat_star(x, i)?;
                if seen.insert(y.inner.clone()) {
                    next.push(y);
                }
            }
        }
        let want: HashSet<_> = layer.iter().map(|x| x.inner.clone()).collect();
        if seen != want {
            return Ok(Outcome::fail(
                "star words generate a different layer",
                json!({"layer": n, "star_count": seen.len(), "count": want.len()}),
            ));
        }
        frontier = next;
    }

    // eps-star against the tensor-product description on random words
    let unfolded = p.binf(hat.folding().unfolded().e())?;
    let e = unfolded.index_set().e();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    for _ in 0..p.samples {
        let len = rng.gen_range(0..=8);
        let word: Vec<Residue> = (0..len).map(|_| Residue(rng.gen_range(0..e))).collect();
        let i = Residue(rng.gen_range(0..e));
        let (_, right) = unfolded.b_tensor_push(&word, i);
        let x = unfolded.from_word(&word);
        if right.a as i64 != unfolded.eps_star(&x, i) {
            let w: Vec<u32> = word.iter().map(|r| r.0).collect();
            return Ok(Outcome::fail(
                "eps-star differs from the tensor-product count",
                json!({"model": "binf", "unfolded_word": w, "color": i.0}),
            ));
        }
    }
    Ok(Outcome::pass(format!("layers {}; {} sampled words", sizes_str(&sizes), p.samples)))
}
