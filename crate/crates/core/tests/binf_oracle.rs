//! B(infinity) coordinates against the large-level multipartition model.

use std::collections::HashMap;

use hatcrystal::binf::{BinfCrystal, RaisePosition};
use hatcrystal::hwcrystal::big_lambda_crystal;
use hatcrystal::{Crystal, IndexSet, Residue};
use proptest::prelude::*;

fn all_words(e: u32, len: usize) -> Vec<Vec<Residue>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..e).map(move |a| {
                    let mut v = w.clone();
                    v.push(Residue(a));
                    v
                })
            })
            .collect();
    }
    out
}

/// Class index of each word under the two models must induce the same
/// partition of the word list.
fn same_partition(a: &[String], b: &[String]) -> bool {
    let mut ab: HashMap<&str, &str> = HashMap::new();
    let mut ba: HashMap<&str, &str> = HashMap::new();
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (x.as_str(), y.as_str());
        if *ab.entry(x).or_insert(y) != y || *ba.entry(y).or_insert(x) != x {
            return false;
        }
    }
    true
}

fn check_depth(model: &BinfCrystal, e: u32, depth: usize) -> Result<(), String> {
    let idx = IndexSet::new(e).unwrap();
    let oracle = big_lambda_crystal(idx, depth);
    let words = all_words(e, depth);
    let mut binf_keys = Vec::new();
    let mut oracle_keys = Vec::new();
    for w in &words {
        let x = model.from_word(w);
        let y = oracle.from_word(w).expect("within depth bound");
        for i in idx.residues() {
            if model.eps(&x, i) != oracle.eps(&y, i) {
                return Err(format!("eps_{} differs on {w:?}", i.0));
            }
            // raising must agree too
            if let Some(xe) = model.e_apply(&x, i) {
                let back = oracle.from_word(&BinfCrystal::new(idx).word_of(&xe)).unwrap();
                if Some(back) != oracle.e_apply(&y, i) {
                    return Err(format!("e_{} differs on {w:?}", i.0));
                }
            }
        }
        binf_keys.push(model.key(&x));
        oracle_keys.push(oracle.key(&y));
    }
    if !same_partition(&binf_keys, &oracle_keys) {
        return Err("equality classes differ".into());
    }
    Ok(())
}

#[test]
fn binf_agrees_with_large_level_model_up_to_depth_four() {
    let idx = IndexSet::new(6).unwrap();
    let model = BinfCrystal::new(idx);
    for depth in 0..=4 {
        check_depth(&model, 6, depth).unwrap();
    }
    let sl3 = BinfCrystal::new(IndexSet::new(3).unwrap());
    for depth in 0..=5 {
        check_depth(&sl3, 3, depth).unwrap();
    }
}

#[test]
fn flipped_raise_position_is_detected() {
    let idx = IndexSet::new(6).unwrap();
    let model = BinfCrystal::new(idx).with_raise_position(RaisePosition::Smallest);
    let failed = (0..=4).any(|d| check_depth(&model, 6, d).is_err());
    assert!(failed);
}

fn word_strategy(e: u32, max: usize) -> impl Strategy<Value = Vec<Residue>> {
    proptest::collection::vec((0..e).prop_map(Residue), 0..=max)
}

proptest! {
    #[test]
    fn kashiwara_operators_are_inverse(word in word_strategy(6, 9), i in 0u32..6) {
        let model = BinfCrystal::new(IndexSet::new(6).unwrap());
        let i = Residue(i);
        let x = model.from_word(&word);
        let fx = model.f_apply(&x, i);
        prop_assert_eq!(model.e_apply(&fx, i), Some(x.clone()));
        prop_assert_eq!(model.eps(&fx, i), model.eps(&x, i) + 1);
        let mut expect = model.wt(&x);
        expect.add_alpha(i, -1);
        prop_assert_eq!(model.wt(&fx), expect);
        match model.e_apply(&x, i) {
            Some(ex) => {
                prop_assert!(model.eps(&x, i) > 0);
                prop_assert_eq!(model.f_apply(&ex, i), x.clone());
            }
            None => prop_assert_eq!(model.eps(&x, i), 0),
        }
        let idx = model.index_set();
        prop_assert_eq!(model.phi(&x, i), model.eps(&x, i) + idx.pair_weight(i, &model.wt(&x)));
    }

    #[test]
    fn star_operators_are_inverse(word in word_strategy(6, 7), i in 0u32..6) {
        let model = BinfCrystal::new(IndexSet::new(6).unwrap());
        let i = Residue(i);
        let x = model.from_word(&word);
        let fx = model.f_star(&x, i);
        prop_assert_eq!(model.eps_star(&fx, i), model.eps_star(&x, i) + 1);
        prop_assert_eq!(model.e_star(&fx, i), Some(x.clone()));
        match model.e_star(&x, i) {
            Some(ex) => prop_assert_eq!(model.f_star(&ex, i), x.clone()),
            None => prop_assert_eq!(model.eps_star(&x, i), 0),
        }
    }

    #[test]
    fn statistics_do_not_depend_on_the_base(word in word_strategy(6, 8), s in 1u32..6) {
        let idx = IndexSet::new(6).unwrap();
        let m0 = BinfCrystal::new(idx);
        let ms = BinfCrystal::with_base(idx, Residue(s));
        let x = m0.from_word(&word);
        let y = ms.from_word(&word);
        prop_assert_eq!(&x, &y);
        let back = m0.rebase(&m0.rebase(&x, Residue(s)), Residue(0));
        prop_assert_eq!(back.coords(), x.coords());
        for i in idx.residues() {
            prop_assert_eq!(m0.eps(&x, i), ms.eps(&y, i));
            prop_assert_eq!(m0.phi(&x, i), ms.phi(&y, i));
            prop_assert_eq!(m0.eps_star(&x, i), ms.eps_star(&y, i));
        }
        prop_assert_eq!(m0.wt(&x), ms.wt(&y));
    }

    #[test]
    fn word_of_round_trips(word in word_strategy(6, 10)) {
        let model = BinfCrystal::new(IndexSet::new(6).unwrap());
        let x = model.from_word(&word);
        prop_assert_eq!(model.from_word(&model.word_of(&x)), x);
    }

    #[test]
    fn tensor_push_matches_star_statistic(word in word_strategy(6, 8), i in 0u32..6) {
        let model = BinfCrystal::new(IndexSet::new(6).unwrap());
        let i = Residue(i);
        let x = model.from_word(&word);
        let (left, right) = model.b_tensor_push(&word, i);
        let a = model.eps_star(&x, i);
        prop_assert_eq!(right.a as i64, a);
        let mut peeled = x.clone();
        for _ in 0..a {
            peeled = model.e_star(&peeled, i).unwrap();
        }
        prop_assert_eq!(left, peeled);
    }
}
