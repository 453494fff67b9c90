//! Checks phrased through words: normal-form identities, the two-case
//! classification, character identities and the large-level oracle.

use std::collections::HashMap;
use std::hash::Hash;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{Outcome, Params};
use crate::binf::BinfCrystal;
use crate::cartan::{FoldedIndex, IndexSet, Residue};
use crate::characters::{char_of_hat_letter, Character};
use crate::error::HarnessError;
use crate::hwcrystal::big_lambda_crystal;
use crate::model::Crystal;

/// A crystal seen through words over `0..letters`, with `f` applied
/// leftmost letter first.
struct WordModel<'a, E> {
    name: &'static str,
    letters: u32,
    elem: Box<dyn Fn(&[u32]) -> E + Sync + 'a>,
    eps: Box<dyn Fn(&E, u32) -> i64 + Sync + 'a>,
    raise: Box<dyn Fn(&E, u32) -> Option<E> + Sync + 'a>,
}

fn unfolded_model<'a>(binf: &'a BinfCrystal) -> WordModel<'a, crate::binf::BinfElement> {
    WordModel {
        name: "binf",
        letters: binf.index_set().e(),
        elem: Box::new(move |w| binf.from_word(&w.iter().map(|&a| Residue(a)).collect::<Vec<_>>())),
        eps: Box::new(move |x, i| binf.eps(x, Residue(i))),
        raise: Box::new(move |x, i| binf.e_apply(x, Residue(i))),
    }
}

fn folded_model<'a>(
    hat: &'a crate::hat::Folded<BinfCrystal>,
) -> WordModel<'a, crate::binf::BinfElement> {
    WordModel {
        name: "hat-binf",
        letters: hat.folding().ell(),
        elem: Box::new(move |w| {
            let w: Vec<FoldedIndex> = w.iter().map(|&a| FoldedIndex(a)).collect();
            hat.from_hat_word(&w).expect("f-hat never vanishes on B(infinity)").inner
        }),
        eps: Box::new(move |x, i| hat.eps_hat(&hat.lift(x.clone()), FoldedIndex(i))),
        raise: Box::new(move |x, i| hat.e_hat(&hat.lift(x.clone()), FoldedIndex(i)).map(|y| y.inner)),
    }
}

fn all_words(letters: u32, len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..letters).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out
}

fn words_up_to(letters: u32, len: usize) -> Vec<Vec<u32>> {
    (0..=len).flat_map(|n| all_words(letters, n)).collect()
}

fn neighbours(letters: u32, i: u32) -> Vec<u32> {
    let mut js = vec![(i + 1) % letters, (i + letters - 1) % letters];
    js.dedup();
    js
}

/// One instance of a normal-form identity.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Instance {
    lemma: String,
    prefix: Vec<u32>,
    i: u32,
    j: u32,
    k: usize,
    eps: usize,
    eps_prime: usize,
}

impl Instance {
    fn to_json(&self, model: &str) -> Value {
        json!({
            "model": model,
            "lemma": self.lemma,
            "prefix": self.prefix,
            "i": self.i,
            "j": self.j,
            "k": self.k,
            "eps": self.eps,
            "eps_prime": self.eps_prime,
        })
    }

    fn from_json(v: &Value) -> Option<(String, Instance)> {
        let n = |key: &str| v[key].as_u64();
        Some((
            v["model"].as_str()?.to_string(),
            Instance {
                lemma: v["lemma"].as_str()?.to_string(),
                prefix: v["prefix"].as_array()?.iter().map(|a| a.as_u64().map(|a| a as u32)).collect::<Option<_>>()?,
                i: n("i")? as u32,
                j: n("j")? as u32,
                k: n("k")? as usize,
                eps: n("eps")? as usize,
                eps_prime: n("eps_prime")? as usize,
            },
        ))
    }
}

fn cat(parts: &[&[u32]]) -> Vec<u32> {
    parts.concat()
}

fn rep(a: u32, m: usize) -> Vec<u32> {
    vec![a; m]
}

fn pairs(i: u32, j: u32, k: usize) -> Vec<u32> {
    [i, j].repeat(k)
}

/// `None` if the identity holds or its hypotheses fail, else the reason.
fn violation<E: Eq>(m: &WordModel<'_, E>, t: &Instance) -> Option<String> {
    let (i, j, k, e, e2) = (t.i, t.j, t.k, t.eps, t.eps_prime);
    let ua = t.prefix.as_slice();
    let l = |w: Vec<u32>| (m.elem)(&w);
    let base = l(ua.to_vec());
    let eps_i0 = (m.eps)(&base, i) == 0;
    let eps_j0 = (m.eps)(&base, j) == 0;
    match t.lemma.as_str() {
        "pair_block" if eps_j0 => {
            let lhs = l(cat(&[ua, &pairs(i, j, k)]));
            let rhs = l(cat(&[ua, &rep(i, k), &rep(j, k)]));
            (lhs != rhs).then(|| "(ij)^k block differs from i^k j^k".to_string())
        }
        "pair_block_tail" if eps_j0 && e >= 1 => {
            let a = l(cat(&[ua, &pairs(i, j, k), &rep(i, e)]));
            let b = l(cat(&[ua, &rep(i, e), &pairs(i, j, k)]));
            let c = l(cat(&[ua, &rep(i, k + e), &rep(j, k)]));
            (a != b || b != c).then(|| "tail i^eps does not move across the (ij)^k block".to_string())
        }
        "iji_rotation" if ua.is_empty() && k >= 1 => {
            let (r, s) = (k, e);
            let lhs = l(cat(&[&rep(i, r), &[j], &rep(i, s)]));
            let rhs = l(cat(&[&[i, j], &rep(i, r + s - 1)]));
            (lhs != rhs).then(|| "i^r j i^s differs from i j i^(r+s-1)".to_string())
        }
        "tail_shrink" if eps_i0 && eps_j0 && e2 < e => {
            let mm = l(cat(&[ua, &pairs(i, j, k), &rep(j, e2), &rep(i, e), &[j]]));
            let want = l(cat(&[ua, &pairs(i, j, k + 1), &rep(j, e2), &rep(i, e - 1)]));
            let got = (m.eps)(&mm, i);
            if got != e as i64 - 1 {
                Some(format!("eps_i = {got}, expected {}", e as i64 - 1))
            } else {
                (mm != want).then(|| "element differs from the shrunk normal form".to_string())
            }
        }
        "tail_grow" if eps_i0 && eps_j0 && e2 >= e && e >= 1 => {
            let mm = l(cat(&[ua, &pairs(i, j, k), &rep(j, e2), &rep(i, e), &[j]]));
            let want = l(cat(&[ua, &pairs(i, j, k), &rep(j, e2 + 1), &rep(i, e)]));
            let got = (m.eps)(&mm, i);
            if got != e as i64 {
                Some(format!("eps_i = {got}, expected {e}"))
            } else {
                (mm != want).then(|| "element differs from the grown normal form".to_string())
            }
        }
        _ => None,
    }
}

fn lemma_instances(letters: u32, bound: usize, lemmas: &[&str]) -> Vec<Instance> {
    let mut out = Vec::new();
    for lemma in lemmas {
        let prefixes = if *lemma == "iji_rotation" { vec![Vec::new()] } else { words_up_to(letters, bound) };
        for prefix in &prefixes {
            for i in 0..letters {
                for j in neighbours(letters, i) {
                    // iji_rotation reads k as r (>= 1) and eps as s, one step further
                    let top = if *lemma == "iji_rotation" { bound + 1 } else { bound };
                    for k in 0..=top {
                        for eps in 0..=top {
                            for eps_prime in 0..=bound {
                                out.push(Instance {
                                    lemma: lemma.to_string(),
                                    prefix: prefix.clone(),
                                    i,
                                    j,
                                    k,
                                    eps,
                                    eps_prime,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

const UNFOLDED_LEMMAS: [&str; 5] = ["pair_block", "pair_block_tail", "iji_rotation", "tail_shrink", "tail_grow"];
const FOLDED_LEMMAS: [&str; 4] = ["pair_block", "pair_block_tail", "tail_shrink", "tail_grow"];

fn first_violation<E: Eq>(m: &WordModel<'_, E>, instances: &[Instance]) -> Option<(Instance, String)> {
    instances.par_iter().find_map_first(|t| violation(m, t).map(|r| (t.clone(), r)))
}

pub(crate) fn word_lemmas(p: &Params) -> Result<Outcome, HarnessError> {
    let folding = p.folding()?;
    let binf = p.binf(folding.unfolded().e())?;
    let hat = p.hat_binf()?;
    let unfolded = unfolded_model(&binf);
    let folded = folded_model(&hat);
    let a = lemma_instances(unfolded.letters, p.bound, &UNFOLDED_LEMMAS);
    if let Some((t, reason)) = first_violation(&unfolded, &a) {
        return Ok(Outcome::fail(reason, t.to_json(unfolded.name)));
    }
    let b = lemma_instances(folded.letters, p.bound, &FOLDED_LEMMAS);
    if let Some((t, reason)) = first_violation(&folded, &b) {
        return Ok(Outcome::fail(reason, t.to_json(folded.name)));
    }
    Ok(Outcome::pass(format!("{} unfolded and {} folded instances", a.len(), b.len())))
}

/// Finds a word of `x` of the shape `ua (ij)^k j^eps' i^eps j` with
/// `eps_i(ua) = eps_j(ua) = 0`; returns `(k, eps')`.
fn two_case_form<E: Eq>(m: &WordModel<'_, E>, words: &[Vec<u32>], i: u32, j: u32, eps: usize) -> Option<(usize, usize)> {
    for w in words {
        let Some((&last, rest)) = w.split_last() else { continue };
        if last != j || rest.len() < eps || rest[rest.len() - eps..].iter().any(|&a| a != i) {
            continue;
        }
        let rest = &rest[..rest.len() - eps];
        let trailing_j = rest.iter().rev().take_while(|&&a| a == j).count();
        for eps_prime in 0..=trailing_j {
            let mut head = &rest[..rest.len() - eps_prime];
            let mut k = 0;
            loop {
                let ua = (m.elem)(head);
                if (m.eps)(&ua, i) == 0 && (m.eps)(&ua, j) == 0 {
                    return Some((k, eps_prime));
                }
                if head.len() >= 2 && head[head.len() - 2..] == [i, j] {
                    head = &head[..head.len() - 2];
                    k += 1;
                } else {
                    break;
                }
            }
        }
    }
    None
}

fn two_cases_in<E>(m: &WordModel<'_, E>, depth: usize) -> Result<(usize, usize), Value>
where
    E: Eq + Hash + Clone + Send + Sync,
{
    let mut index: HashMap<E, Vec<Vec<u32>>> = HashMap::new();
    for w in words_up_to(m.letters, depth).into_iter().filter(|w| !w.is_empty()) {
        index.entry((m.elem)(&w)).or_default().push(w);
    }
    let mut entries: Vec<(E, Vec<Vec<u32>>)> = index.into_iter().collect();
    entries.sort_by(|a, b| a.1[0].cmp(&b.1[0]));
    let results: Vec<Result<(usize, usize), Value>> = entries
        .par_iter()
        .map(|(x, words)| {
            let (mut a, mut b) = (0, 0);
            for i in 0..m.letters {
                for j in neighbours(m.letters, i) {
                    let Some(y) = (m.raise)(x, j) else { continue };
                    let eps = (m.eps)(&y, i);
                    if eps < 1 {
                        continue;
                    }
                    match two_case_form(m, words, i, j, eps as usize) {
                        Some((_, eps_prime)) if eps_prime < eps as usize => a += 1,
                        Some(_) => b += 1,
                        None => {
                            return Err(json!({
                                "model": m.name,
                                "word": words[0],
                                "i": i,
                                "j": j,
                                "eps": eps,
                                "reason": "no word of the element has either normal form",
                            }))
                        }
                    }
                }
            }
            Ok((a, b))
        })
        .collect();
    let mut total = (0, 0);
    for r in results {
        let (a, b) = r?;
        total.0 += a;
        total.1 += b;
    }
    Ok(total)
}

pub(crate) fn two_cases(p: &Params) -> Result<Outcome, HarnessError> {
    let folding = p.folding()?;
    let binf = p.binf(folding.unfolded().e())?;
    let hat = p.hat_binf()?;
    let unfolded = match two_cases_in(&unfolded_model(&binf), p.depth) {
        Ok(c) => c,
        Err(cx) => return Ok(Outcome::fail("unfolded element outside both cases", cx)),
    };
    let folded = match two_cases_in(&folded_model(&hat), p.depth) {
        Ok(c) => c,
        Err(cx) => return Ok(Outcome::fail("folded element outside both cases", cx)),
    };
    Ok(Outcome::pass(format!(
        "unfolded: {} case (a), {} case (b); folded: {} case (a), {} case (b)",
        unfolded.0, unfolded.1, folded.0, folded.1
    )))
}

pub(crate) fn char_identities(p: &Params) -> Result<Outcome, HarnessError> {
    let folding = p.folding()?;
    let idx = folding.unfolded();
    let e = idx.e() as i64;
    for i in 0..e {
        for j in [i + 1, i - 1] {
            let ij = Character::from_terms(idx, [(vec![i, j], 1)])?;
            let lhs = ij.shuffle(&ij)?;
            let rhs = Character::from_terms(idx, [(vec![i, i, j, j], 4), (vec![i, j, i, j], 2)])?;
            if lhs != rhs {
                return Ok(Outcome::fail(
                    "shuffle of [i,j] with itself",
                    json!({"i": i, "j": j.rem_euclid(e), "got": lhs.to_json()}),
                ));
            }
        }
    }
    let ell = folding.ell() as i64;
    let mut dims = None;
    for i in folding.folded_indices() {
        let j = folding.folded_index(i.0 as i64 + 1);
        let full = char_of_hat_letter(&folding, i).shuffle(&char_of_hat_letter(&folding, j))?.dim();
        let (a, b) = (i.0 as i64, j.0 as i64);
        let x = Character::from_terms(idx, [(vec![a, b], 1)])?;
        let y = Character::from_terms(idx, [(vec![a + ell, b + ell], 1)])?;
        let image = x.shuffle(&y)?.dim();
        if full < image || full - image != 18 {
            return Ok(Outcome::fail(
                format!("dim = {full} - {image} = {}", full as i64 - image as i64),
                json!({"i": i.0, "j": j.0, "full": full, "image": image}),
            ));
        }
        dims = Some((full, image));
    }
    let (full, image) = dims.unwrap_or((0, 0));
    Ok(Outcome::pass(format!("shuffle identity holds; dim = {full} - {image} = {}", full - image)))
}

struct Oracle {
    binf: BinfCrystal,
    reference: BinfCrystal,
    idx: IndexSet,
}

impl Oracle {
    fn new(p: &Params) -> Result<Self, HarnessError> {
        let e = 2 * p.ell;
        Ok(Oracle { binf: p.binf(e)?, reference: BinfCrystal::new(IndexSet::new(e)?), idx: IndexSet::new(e)? })
    }

    /// Compares `eps` and `e` of one word; returns both keys on success.
    fn word(&self, word: &[u32], bound: usize) -> Result<(String, String), String> {
        let oracle = big_lambda_crystal(self.idx, bound);
        let w: Vec<Residue> = word.iter().map(|&a| Residue(a)).collect();
        let x = self.binf.from_word(&w);
        let y = oracle.from_word(&w).expect("within the depth bound");
        for i in self.idx.residues() {
            let (a, b) = (self.binf.eps(&x, i), oracle.eps(&y, i));
            if a != b {
                return Err(format!("eps_{} is {a} in B(infinity), {b} in the oracle", i.0));
            }
            let raised = match self.binf.e_apply(&x, i) {
                None => None,
                Some(z) => match self.reference.checked_word_of(&z) {
                    Some(u) => oracle.from_word(&u),
                    None => return Err(format!("e_{} leaves the crystal", i.0)),
                },
            };
            if raised != oracle.e_apply(&y, i) {
                return Err(format!("e_{} differs", i.0));
            }
        }
        Ok((self.binf.key(&x), oracle.key(&y)))
    }

    fn batch(&self, words: &[Vec<u32>], bound: usize) -> Option<Value> {
        let keys: Vec<Result<(String, String), String>> = words.par_iter().map(|w| self.word(w, bound)).collect();
        let mut by_binf: HashMap<&str, (usize, &str)> = HashMap::new();
        let mut by_oracle: HashMap<&str, (usize, &str)> = HashMap::new();
        for (n, r) in keys.iter().enumerate() {
            let (kb, ko) = match r {
                Ok((kb, ko)) => (kb.as_str(), ko.as_str()),
                Err(reason) => return Some(json!({"word": words[n], "bound": bound, "reason": reason})),
            };
            let (m1, o1) = *by_binf.entry(kb).or_insert((n, ko));
            let (m2, b2) = *by_oracle.entry(ko).or_insert((n, kb));
            if o1 != ko {
                return Some(json!({"word": words[m1], "word2": words[n], "bound": bound,
                    "reason": "equal in B(infinity), different in the oracle"}));
            }
            if b2 != kb {
                return Some(json!({"word": words[m2], "word2": words[n], "bound": bound,
                    "reason": "equal in the oracle, different in B(infinity)"}));
            }
        }
        None
    }
}

pub(crate) fn oracle_xcheck(p: &Params) -> Result<Outcome, HarnessError> {
    let oracle = Oracle::new(p)?;
    let e = 2 * p.ell;
    let exhaustive = words_up_to(e, p.depth);
    if let Some(cx) = oracle.batch(&exhaustive, p.depth.max(1)) {
        return Ok(Outcome::fail("exhaustive words", cx));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let random: Vec<Vec<u32>> = (0..p.samples)
        .map(|_| {
            let len = rng.gen_range(0..=8);
            (0..len).map(|_| rng.gen_range(0..e)).collect()
        })
        .collect();
    if let Some(cx) = oracle.batch(&random, 8) {
        return Ok(Outcome::fail("random words", cx));
    }
    Ok(Outcome::pass(format!("{} exhaustive and {} random words", exhaustive.len(), random.len())))
}

pub(crate) fn replay(name: &str, p: &Params, cx: &Value) -> Result<Option<String>, HarnessError> {
    let bad = || HarnessError::Counterexample(cx.to_string());
    let word_of = |key: &str| -> Option<Vec<u32>> {
        cx[key].as_array()?.iter().map(|a| a.as_u64().map(|a| a as u32)).collect()
    };
    match name {
        "word_lemmas" => {
            let (model, t) = Instance::from_json(cx).ok_or_else(bad)?;
            let folding = p.folding()?;
            let binf = p.binf(folding.unfolded().e())?;
            let hat = p.hat_binf()?;
            Ok(match model.as_str() {
                "binf" => violation(&unfolded_model(&binf), &t),
                "hat-binf" => violation(&folded_model(&hat), &t),
                _ => return Err(bad()),
            })
        }
        "oracle_xcheck" => {
            let oracle = Oracle::new(p)?;
            let bound = cx["bound"].as_u64().ok_or_else(bad)? as usize;
            let mut words = vec![word_of("word").ok_or_else(bad)?];
            words.extend(word_of("word2"));
            Ok(oracle.batch(&words, bound).map(|v| v["reason"].as_str().unwrap_or_default().to_string()))
        }
        _ => Err(HarnessError::UnknownCheck(name.to_string())),
    }
}
