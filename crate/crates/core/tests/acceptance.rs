//! Acceptance criteria. Runs as a plain binary and prints one line per
//! criterion; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use hatcrystal::characters::{char_of_hat_letter, Character};
use hatcrystal::harness::{restricted_partitions, run_check, Conventions, Params, Status};
use hatcrystal::{Folding, IndexSet};

type Verdict = Result<String, String>;
type Criterion = (&'static str, Box<dyn Fn() -> Verdict>);

fn check(name: &str, p: Params) -> Verdict {
    let r = run_check(name, &p).map_err(|e| format!("{name}: {e}"))?;
    let line = format!("{name} l={} depth={}: {}", p.ell, p.depth, r.detail);
    match r.status {
        Status::Pass => Ok(line),
        _ => Err(format!("{line}; counterexample {}", r.counterexample.unwrap_or_default())),
    }
}

fn all(parts: Vec<Verdict>) -> Verdict {
    let mut ok = Vec::new();
    for part in parts {
        ok.push(part?);
    }
    Ok(ok.join(" | "))
}

fn expect_fail(name: &str, p: Params) -> Verdict {
    let r = run_check(name, &p).map_err(|e| format!("{name}: {e}"))?;
    match r.status {
        Status::Fail => Ok(format!("{name} fails as expected ({})", r.counterexample.unwrap_or_default())),
        _ => Err(format!("{name} did not notice the flipped convention: {}", r.detail)),
    }
}

fn shuffle_identity() -> Verdict {
    let idx = IndexSet::new(6).map_err(|e| e.to_string())?;
    let mut pairs = 0;
    for i in 0..6i64 {
        for j in [i + 1, i + 5] {
            let j = j % 6;
            let ij = Character::from_terms(idx, [(vec![i, j], 1)]).map_err(|e| e.to_string())?;
            let lhs = ij.shuffle(&ij).map_err(|e| e.to_string())?;
            let rhs = Character::from_terms(idx, [(vec![i, i, j, j], 4), (vec![i, j, i, j], 2)])
                .map_err(|e| e.to_string())?;
            if lhs != rhs {
                return Err(format!("i={i} j={j}: got {}", lhs.to_json()));
            }
            pairs += 1;
        }
    }
    Ok(format!("[i,j] shuffle [i,j] = 4[i,i,j,j] + 2[i,j,i,j] for {pairs} adjacent pairs at e = 6"))
}

fn kernel_dimension() -> Verdict {
    let folding = Folding::new(3).map_err(|e| e.to_string())?;
    let idx = folding.unfolded();
    let mut out = Vec::new();
    for i in folding.folded_indices() {
        let j = folding.folded_index(i.0 as i64 + 1);
        let full = char_of_hat_letter(&folding, i)
            .shuffle(&char_of_hat_letter(&folding, j))
            .map_err(|e| e.to_string())?
            .dim();
        let (a, b) = (i.0 as i64, j.0 as i64);
        let x = Character::from_terms(idx, [(vec![a, b], 1)]).map_err(|e| e.to_string())?;
        let y = Character::from_terms(idx, [(vec![a + 3, b + 3], 1)]).map_err(|e| e.to_string())?;
        let image = x.shuffle(&y).map_err(|e| e.to_string())?.dim();
        if (full, image) != (24, 6) {
            return Err(format!("i={} j={}: dim = {full} - {image}", i.0, j.0));
        }
        out.push(format!("({},{})", i.0, j.0));
    }
    Ok(format!("dim = 24 - 6 = 18 for folded pairs {}", out.join(" ")))
}

fn restricted_counts() -> Verdict {
    let counts: Vec<usize> = (0..=6).map(|n| restricted_partitions(n, 3).len()).collect();
    if counts == [1, 1, 2, 2, 4, 5, 7] {
        Ok("3-restricted partition counts 1,1,2,2,4,5,7".into())
    } else {
        Err(format!("3-restricted partition counts {counts:?}"))
    }
}

fn main() -> ExitCode {
    let l3 = Params::default().with_ell(3);
    let l4 = Params::default().with_ell(4);
    let criteria: Vec<Criterion> = vec![
        ("character identity", Box::new(shuffle_identity)),
        ("kernel dimension", Box::new(kernel_dimension)),
        (
            "folded eps identities and closure",
            Box::new(move || all(vec![check("crystal1", l3.with_depth(4)), check("crystal1", l4.with_depth(4))])),
        ),
        (
            "commuting removals, multiplicity two",
            Box::new(move || {
                all(vec![check("mult_two_shadow", l3.with_depth(4)), check("mult_two_shadow", l4.with_depth(4))])
            }),
        ),
        ("folding isomorphism for B(infinity)", Box::new(move || check("binf_fold_iso", l3.with_depth(4)))),
        (
            "folding isomorphism for B(Lambda_0)",
            Box::new(move || all(vec![restricted_counts(), check("hw_fold_iso", l3.with_depth(6))])),
        ),
        ("iota image equals the h-fixed set", Box::new(move || check("iota_welldef_and_fixedpoints", l3.with_depth(6)))),
        (
            "star identities and folded lemmas",
            Box::new(move || {
                all(vec![check("star_eps", l3.with_depth(3).with_samples(500)), check("lemmas_10x", l3.with_depth(3))])
            }),
        ),
        ("word identities", Box::new(move || check("word_lemmas", l3))),
        ("oracle equivalence", Box::new(move || check("oracle_xcheck", l3.with_depth(5).with_samples(1000)))),
        (
            "fault injection",
            Box::new(move || {
                all(vec![
                    expect_fail(
                        "oracle_xcheck",
                        l3.with_depth(5).with_samples(1000).with_conventions(Conventions::flipped_raise()),
                    ),
                    expect_fail("hw_fold_iso", l3.with_depth(6).with_conventions(Conventions::flipped_reading_order())),
                ])
            }),
        ),
    ];

    let mut failed = 0;
    for (n, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let ms = start.elapsed().as_millis();
        match verdict {
            Ok(detail) => println!("PASS criterion {} ({title}) [{ms} ms]: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({title}) [{ms} ms]: {detail}", n + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
