//! Named, parameterized checks of the folded crystal structures.
//!
//! Every check is deterministic given its [`Params`]. A failing check carries
//! a counterexample that [`replay`] can re-run in isolation.

mod elements;
mod models;
mod words;

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::binf::RaisePosition;
use crate::error::HarnessError;
use crate::hwcrystal::ReadingOrder;

pub use models::restricted_partitions;

/// Largest estimated number of visited states a single check may take on.
pub const STATE_BUDGET: u64 = 20_000_000;

pub const CHECK_NAMES: [&str; 13] = [
    "crystal1",
    "hat_axioms",
    "binf_fold_iso",
    "star_eps",
    "hw_fold_iso",
    "iota_welldef_and_fixedpoints",
    "mult_two_shadow",
    "word_lemmas",
    "two_cases",
    "char_identities",
    "oracle_xcheck",
    "klesh_count",
    "lemmas_10x",
];

/// Tie-break and reading-order choices of the underlying models. Only the
/// defaults are correct; the others exist to show that checks notice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Conventions {
    pub raise: RaisePosition,
    pub reading_order: ReadingOrder,
}

impl Conventions {
    pub fn flipped_raise() -> Self {
        Conventions { raise: RaisePosition::Smallest, ..Default::default() }
    }

    pub fn flipped_reading_order() -> Self {
        Conventions { reading_order: ReadingOrder::IncreasingComponentRow, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Params {
    pub ell: u32,
    pub depth: usize,
    /// Bound on `k`, `eps`, `eps'` and prefix length in the word lemmas.
    pub bound: usize,
    pub seed: u64,
    /// Number of random words in sampled checks.
    pub samples: usize,
    pub allow_l2: bool,
    pub conventions: Conventions,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            ell: 3,
            depth: 4,
            bound: 2,
            seed: 0,
            samples: 1000,
            allow_l2: false,
            conventions: Conventions::default(),
        }
    }
}

impl Params {
    pub fn with_ell(self, ell: u32) -> Self {
        Params { ell, ..self }
    }

    pub fn with_depth(self, depth: usize) -> Self {
        Params { depth, ..self }
    }

    pub fn with_samples(self, samples: usize) -> Self {
        Params { samples, ..self }
    }

    pub fn with_conventions(self, conventions: Conventions) -> Self {
        Params { conventions, ..self }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ell": self.ell,
            "depth": self.depth,
            "bound": self.bound,
            "seed": self.seed,
            "samples": self.samples,
            "allow_l2": self.allow_l2,
            "raise": format!("{:?}", self.conventions.raise),
            "reading_order": format!("{:?}", self.conventions.reading_order),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub params: Value,
    pub status: Status,
    pub counterexample: Option<Value>,
    pub detail: String,
    pub wall_ms: u64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// One JSON object per line; timing is left out unless asked for so
    /// that repeated runs print identical bytes.
    pub fn to_json_line(&self, timing: bool) -> String {
        let mut v = serde_json::to_value(self).expect("result serializes");
        if !timing {
            v.as_object_mut().expect("object").remove("wall_ms");
        }
        v.to_string()
    }
}

/// What a check body reports: a human-readable summary and, on failure, a
/// counterexample.
pub(crate) struct Outcome {
    pub detail: String,
    pub counterexample: Option<Value>,
}

impl Outcome {
    pub fn pass(detail: impl Into<String>) -> Self {
        Outcome { detail: detail.into(), counterexample: None }
    }

    pub fn fail(detail: impl Into<String>, cx: Value) -> Self {
        Outcome { detail: detail.into(), counterexample: Some(cx) }
    }
}

/// Rough number of states a check visits.
pub fn estimate(name: &str, params: &Params) -> Result<u64, HarnessError> {
    let ell = params.ell as u64;
    let d = params.depth as u32;
    let pow = |b: u64, k: u32| b.saturating_pow(k);
    let mul = |xs: &[u64]| xs.iter().fold(1u64, |acc, &x| acc.saturating_mul(x));
    let est = match name {
        "crystal1" | "hat_axioms" | "binf_fold_iso" | "mult_two_shadow" => mul(&[pow(ell, d + 1), ell]),
        "star_eps" | "lemmas_10x" => mul(&[pow(ell, d + 1), ell, ell, d as u64 + 1]),
        "hw_fold_iso" | "klesh_count" => pow(ell, d).saturating_add(1),
        "iota_welldef_and_fixedpoints" => {
            pow(ell, d).saturating_add(models::bipartition_count(2 * params.depth))
        }
        "word_lemmas" => mul(&[pow(2 * ell, params.bound as u32), ell, pow(params.bound as u64 + 1, 3), 4]),
        "two_cases" => mul(&[pow(2 * ell, d), 2]),
        "char_identities" => 64,
        "oracle_xcheck" => mul(&[pow(2 * ell, d), 2]).saturating_add(params.samples as u64),
        _ => return Err(HarnessError::UnknownCheck(name.to_string())),
    };
    Ok(est)
}

fn run_body(name: &str, params: &Params) -> Result<Outcome, HarnessError> {
    let estimate = estimate(name, params)?;
    if estimate > STATE_BUDGET {
        return Err(HarnessError::Infeasible { name: name.to_string(), estimate, budget: STATE_BUDGET });
    }
    match name {
        "crystal1" => elements::crystal1(params),
        "hat_axioms" => models::hat_axioms(params),
        "binf_fold_iso" => models::binf_fold_iso(params),
        "star_eps" => elements::star_eps(params),
        "hw_fold_iso" => models::hw_fold_iso(params),
        "iota_welldef_and_fixedpoints" => models::iota_welldef(params),
        "mult_two_shadow" => elements::mult_two_shadow(params),
        "word_lemmas" => words::word_lemmas(params),
        "two_cases" => words::two_cases(params),
        "char_identities" => words::char_identities(params),
        "oracle_xcheck" => words::oracle_xcheck(params),
        "klesh_count" => models::klesh_count(params),
        "lemmas_10x" => elements::lemmas_10x(params),
        _ => Err(HarnessError::UnknownCheck(name.to_string())),
    }
}

/// Runs one named check. Unknown names, infeasible parameters and invalid
/// ranks are errors; a property violation is a `Fail` result.
pub fn run_check(name: &str, params: &Params) -> Result<CheckResult, HarnessError> {
    let start = Instant::now();
    let outcome = run_body(name, params)?;
    let status = if outcome.counterexample.is_some() { Status::Fail } else { Status::Pass };
    Ok(CheckResult {
        name: name.to_string(),
        params: params.to_json(),
        status,
        counterexample: outcome.counterexample,
        detail: outcome.detail,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

/// Re-runs a failing check on its counterexample alone. Returns the failure
/// reason if it reproduces, `None` if the counterexample now passes.
pub fn replay(name: &str, params: &Params, cx: &Value) -> Result<Option<String>, HarnessError> {
    match name {
        "crystal1" | "star_eps" | "mult_two_shadow" | "lemmas_10x" => elements::replay(name, params, cx),
        "word_lemmas" | "oracle_xcheck" => words::replay(name, params, cx),
        _ => {
            let again = run_body(name, params)?;
            Ok(match again.counterexample {
                Some(c) if &c == cx => Some(again.detail),
                _ => None,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Quick,
    Full,
}

/// The `(name, params)` pairs making up a profile.
pub fn suite(profile: Profile, conventions: Conventions) -> Vec<(&'static str, Params)> {
    let base = Params::default().with_conventions(conventions);
    let l3 = |depth| base.with_ell(3).with_depth(depth);
    let mut out = vec![
        ("char_identities", l3(0)),
        ("klesh_count", l3(6)),
        ("word_lemmas", l3(0)),
    ];
    match profile {
        Profile::Quick => out.extend([
            ("crystal1", l3(4)),
            ("hat_axioms", l3(4)),
            ("binf_fold_iso", l3(4)),
            ("star_eps", l3(3).with_samples(200)),
            ("hw_fold_iso", l3(4)),
            ("iota_welldef_and_fixedpoints", l3(4)),
            ("mult_two_shadow", l3(4)),
            ("two_cases", l3(4)),
            ("oracle_xcheck", l3(4).with_samples(200)),
            ("lemmas_10x", l3(3)),
        ]),
        Profile::Full => {
            let l4 = |depth| base.with_ell(4).with_depth(depth);
            out.extend([
                ("crystal1", l3(6)),
                ("crystal1", l4(4)),
                ("hat_axioms", l3(6)),
                ("hat_axioms", l4(4)),
                ("binf_fold_iso", l3(6)),
                ("binf_fold_iso", l4(4)),
                ("star_eps", l3(4).with_samples(500)),
                ("star_eps", l4(3).with_samples(500)),
                ("hw_fold_iso", l3(6)),
                ("hw_fold_iso", l4(6)),
                ("iota_welldef_and_fixedpoints", l3(6)),
                ("iota_welldef_and_fixedpoints", l4(4)),
                ("mult_two_shadow", l3(6)),
                ("mult_two_shadow", l4(4)),
                ("two_cases", l3(5)),
                ("oracle_xcheck", l3(5)),
                ("klesh_count", l4(6)),
                ("lemmas_10x", l3(4)),
                ("lemmas_10x", l4(3)),
            ]);
        }
    }
    out
}

/// Runs a profile in the rayon pool. Individual errors become `Error`
/// results and do not stop the suite.
pub fn run_suite(profile: Profile, conventions: Conventions) -> Vec<CheckResult> {
    suite(profile, conventions)
        .into_par_iter()
        .map(|(name, params)| {
            run_check(name, &params).unwrap_or_else(|err| CheckResult {
                name: name.to_string(),
                params: params.to_json(),
                status: Status::Error,
                counterexample: None,
                detail: err.to_string(),
                wall_ms: 0,
            })
        })
        .collect()
}

/// Fixed-width summary table of a suite run.
pub fn summary_table(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in results {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        };
        let ell = r.params["ell"].as_u64().unwrap_or(0);
        let depth = r.params["depth"].as_u64().unwrap_or(0);
        out.push_str(&format!(
            "{:<30} l={:<2} depth={:<2} {:<5} {}\n",
            r.name, ell, depth, status, r.detail
        ));
    }
    out
}
