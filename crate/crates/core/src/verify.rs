//! Named verification suites, each producing PASS/FAIL checks.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::json;

use crate::bounds::{
    omega_cross_bound, omega_intersecting_bound, omega_strict_bound, pair_configs, pm_star_count, single_configs,
    star_identity_check,
};
use crate::cyclic::{double_count_check, interval_meet_audit, katona_verify, reconstruction_check, Sweep, SWEEP_LIMIT};
use crate::error::{Error, Result};
use crate::report::Check;
use crate::search::{uniqueness_report, with_workers, BranchAndBound, Maximizer, SearchOptions, Witness};
use crate::setcore::{is_cross_intersecting, is_intersecting, star, Family};
use crate::weights::{intersection_profile, omega_cross, omega_cross_strict, omega_family};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SuiteParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    pub all_perms: bool,
    pub seed: u64,
    #[serde(skip)]
    pub workers: usize,
    /// Explicit families for `doublecount`; stars through 1 otherwise.
    #[serde(skip)]
    pub families: Option<(Family, Family)>,
}

impl SuiteParams {
    fn need(&self, name: &str, v: Option<u32>) -> Result<u32> {
        v.ok_or_else(|| Error::Hypothesis(format!("missing parameter {name}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub sampled: bool,
    pub passed: bool,
}

impl VerifyReport {
    fn new(suite: &str, checks: Vec<Check>, sampled: bool) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self { suite: suite.to_string(), checks, sampled, passed }
    }
}

pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, params: &SuiteParams) -> Result<VerifyReport>;
}

pub struct SuiteRegistry {
    entries: BTreeMap<&'static str, Box<dyn Suite>>,
}

impl Default for SuiteRegistry {
    fn default() -> Self {
        let mut r = Self { entries: BTreeMap::new() };
        r.register(Box::new(Katona));
        r.register(Box::new(DoubleCount));
        r.register(Box::new(Identity));
        r.register(Box::new(Extremal));
        r
    }
}

impl SuiteRegistry {
    pub fn register(&mut self, suite: Box<dyn Suite>) {
        self.entries.insert(suite.name(), suite);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Suite> {
        self.entries.get(name).map(|s| s.as_ref()).ok_or_else(|| Error::Unknown {
            kind: "suite",
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

/// Intersecting interval families on cyclic orders.
pub struct Katona;

impl Suite for Katona {
    fn name(&self) -> &'static str {
        "katona"
    }

    fn run(&self, p: &SuiteParams) -> Result<VerifyReport> {
        let (n, k) = (p.need("n", p.n)?, p.need("k", p.k)?);
        let sweep = if p.all_perms { Sweep::All { seed: p.seed } } else { Sweep::Identity };
        let r = with_workers(p.workers, || katona_verify(n, k, sweep))?;
        let size_ok = r.max_size == k;
        let unique_ok = !r.uniqueness_required || r.fixed_element_maxima == r.maximum_families;
        let checks = vec![
            Check::new("max-interval-family", size_ok, json!({ "max_size": r.max_size, "k": k, "perms": r.perms_checked })),
            Check::new(
                "maxima-fixed-element",
                unique_ok,
                json!({
                    "required": r.uniqueness_required,
                    "maximum_families": r.maximum_families,
                    "fixed_element": r.fixed_element_maxima,
                    "extremal_identity": r.extremal,
                }),
            ),
        ];
        Ok(VerifyReport::new(self.name(), checks, r.sampled))
    }
}

/// The cyclic double count for every `m`, the meet-family audit, and the census reconstruction.
pub struct DoubleCount;

impl Suite for DoubleCount {
    fn name(&self) -> &'static str {
        "doublecount"
    }

    fn run(&self, p: &SuiteParams) -> Result<VerifyReport> {
        let (a, b) = match &p.families {
            Some(pair) => pair.clone(),
            None => {
                let (n, k) = (p.need("n", p.n)?, p.need("k", p.k)?);
                let l = p.l.unwrap_or(k);
                (star(n, k, 1)?, star(n, l, 1)?)
            }
        };
        if a.n() > SWEEP_LIMIT {
            return Err(Error::TooLarge { what: "n for an all-orders sweep", value: a.n() as u64, limit: SWEEP_LIMIT as u64 });
        }
        let mut checks = Vec::new();
        with_workers(p.workers, || -> Result<()> {
            for m in 1..=a.k().min(b.k()) {
                let r = double_count_check(&a, &b, m)?;
                let ce = r.counterexample.as_ref().map(|c| json!(c));
                checks.push(
                    Check::new(
                        format!("double-count m={m}"),
                        r.passed,
                        serde_json::to_value(&r).unwrap_or_default(),
                    )
                    .with_counterexample(ce),
                );
            }
            let audit = interval_meet_audit(&a, &b, Sweep::All { seed: p.seed })?;
            checks.extend(audit.checks);
            checks.push(reconstruction_check(&a, &b)?);
            Ok(())
        })?;
        Ok(VerifyReport::new(self.name(), checks, false))
    }
}

/// Closed forms against direct evaluation on explicit stars.
pub struct Identity;

/// Largest `n` at which closed forms are compared with explicit stars.
pub const STAR_COMPARE_LIMIT: u32 = 14;
/// Largest `n` at which the profile is compared with the star count formula.
pub const PROFILE_COMPARE_LIMIT: u32 = 12;

impl Suite for Identity {
    fn name(&self) -> &'static str {
        "identity"
    }

    fn run(&self, p: &SuiteParams) -> Result<VerifyReport> {
        let n_max = p.n_max.unwrap_or(20);
        let mut checks = Vec::new();

        let mut failure = None;
        let mut count = 0;
        for (n, k, l) in pair_configs(n_max) {
            count += 1;
            if !star_identity_check(n, k, l)? && failure.is_none() {
                failure = Some(json!({ "n": n, "k": k, "l": l }));
            }
        }
        checks.push(
            Check::new("star-identity", failure.is_none(), json!({ "n_max": n_max, "configs": count }))
                .with_counterexample(failure),
        );

        let star_max = n_max.min(STAR_COMPARE_LIMIT);
        let cmp = with_workers(p.workers, || star_comparisons(star_max))?;
        checks.extend(cmp);
        let prof_max = n_max.min(PROFILE_COMPARE_LIMIT);
        checks.push(profile_comparison(prof_max)?);
        Ok(VerifyReport::new(self.name(), checks, false))
    }
}

fn first_failure<T: Clone>(items: &[(bool, T)]) -> Option<T> {
    items.iter().find(|(ok, _)| !ok).map(|(_, t)| t.clone())
}

fn star_comparisons(n_max: u32) -> Result<Vec<Check>> {
    use rayon::prelude::*;
    let pairs: Vec<(u32, u32, u32)> = pair_configs(n_max).collect();
    let cross: Vec<(bool, serde_json::Value)> = pairs
        .par_iter()
        .map(|&(n, k, l)| {
            let direct = omega_cross(&star(n, k, 1)?, &star(n, l, 1)?)?;
            let closed = omega_cross_bound(n, k, l)?.value;
            Ok((direct == closed, json!({ "n": n, "k": k, "l": l, "direct": direct.to_string(), "closed": closed.to_string() })))
        })
        .collect::<Result<_>>()?;
    let singles: Vec<(u32, u32)> = single_configs(n_max).collect();
    let single: Vec<(bool, bool, bool, serde_json::Value)> = singles
        .par_iter()
        .map(|&(n, k)| {
            let s = star(n, k, 1)?;
            let strict_direct = omega_cross_strict(&s, &s)?;
            let strict = omega_strict_bound(n, k)?.value;
            let family = omega_intersecting_bound(n, k)?.value;
            let fam_direct = omega_family(&s);
            Ok((
                strict_direct == strict,
                2 * family == strict,
                fam_direct == family,
                json!({ "n": n, "k": k, "strict_direct": strict_direct.to_string(), "strict": strict.to_string(), "family": family.to_string() }),
            ))
        })
        .collect::<Result<_>>()?;
    let strict_items: Vec<(bool, serde_json::Value)> = single.iter().map(|t| (t.0, t.3.clone())).collect();
    let half_items: Vec<(bool, serde_json::Value)> = single.iter().map(|t| (t.1, t.3.clone())).collect();
    let fam_items: Vec<(bool, serde_json::Value)> = single.iter().map(|t| (t.2, t.3.clone())).collect();
    let mk = |name: &str, items: &[(bool, serde_json::Value)]| {
        let ce = first_failure(items);
        Check::new(name, ce.is_none(), json!({ "n_max": n_max, "configs": items.len() })).with_counterexample(ce)
    };
    Ok(vec![
        mk("cross-bound-equals-star-pair", &cross),
        mk("strict-bound-equals-star-strict", &strict_items),
        mk("strict-bound-is-twice-family-bound", &half_items),
        mk("family-bound-equals-star", &fam_items),
    ])
}

fn profile_comparison(n_max: u32) -> Result<Check> {
    use rayon::prelude::*;
    let pairs: Vec<(u32, u32, u32)> = pair_configs(n_max).collect();
    let items: Vec<(bool, serde_json::Value)> = pairs
        .par_iter()
        .map(|&(n, k, l)| {
            let prof = intersection_profile(&star(n, k, 1)?, &star(n, l, 1)?)?;
            let mut ok = prof.get(0) == 0;
            for m in 1..=l {
                ok &= prof.get(m as usize) == pm_star_count(n, k, l, m)?;
            }
            Ok((ok, json!({ "n": n, "k": k, "l": l })))
        })
        .collect::<Result<_>>()?;
    let ce = first_failure(&items);
    Ok(Check::new("profile-equals-star-count", ce.is_none(), json!({ "n_max": n_max, "configs": items.len() }))
        .with_counterexample(ce))
}

/// Exact maximization, tightness against the closed form, and the equality cases.
pub struct Extremal;

impl Suite for Extremal {
    fn name(&self) -> &'static str {
        "extremal"
    }

    fn run(&self, p: &SuiteParams) -> Result<VerifyReport> {
        let (n, k) = (p.need("n", p.n)?, p.need("k", p.k)?);
        let opts = SearchOptions { workers: p.workers, ..Default::default() };
        let r = match p.l {
            None => BranchAndBound.intersecting(n, k, &opts)?,
            Some(l) => BranchAndBound.cross(n, k, l, &opts)?,
        };
        let u = uniqueness_report(&r)?;
        let strict_regime = match p.l {
            None => n > 2 * k,
            Some(l) => n > k + l,
        };
        let feasible = r.witnesses.iter().all(|w| match w {
            Witness::Family(f) => is_intersecting(f),
            Witness::Pair(a, b) => is_cross_intersecting(a, b).unwrap_or(false),
        });
        let pattern_ok = !u.pattern_checked
            || u.witnesses.iter().filter(|w| w.star_center.is_some()).all(|w| w.pattern_holds == w.perms_checked);
        let checks = vec![
            Check::new(
                "bound-not-exceeded",
                r.best_value <= r.bound,
                json!({ "best_value": r.best_value.to_string(), "bound": r.bound.to_string() }),
            ),
            Check::new("bound-attained", r.tight, json!({ "best_value": r.best_value.to_string(), "bound": r.bound.to_string() })),
            Check::new("witnesses-feasible", feasible && r.validate().is_ok(), json!({ "witnesses": r.witnesses.len() })),
            Check::new(
                "equality-only-for-stars",
                !strict_regime || (u.all_stars && u.witness_classes == 1),
                json!({ "required": strict_regime, "classes": u.witness_classes, "all_stars": u.all_stars }),
            )
            .with_counterexample(if strict_regime && !u.all_stars { Some(json!(r.witnesses)) } else { None }),
            Check::new("star-witness-interval-pattern", pattern_ok, json!(u.witnesses)),
        ];
        Ok(VerifyReport::new(self.name(), checks, false))
    }
}
