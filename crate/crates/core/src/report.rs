//! Run configuration, check records and the command batteries behind the CLI.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{is_prime, parse_rational, prime_power_split, prime_powers_up_to};
use crate::error::{Error, Result};
use crate::field::{construct_extension, Field, PrimeField};
use crate::projective::certificate::CertificateConfig;
use crate::quintic::{
    check_quintic_smooth, count_v22, gm_parameter_valid, stabilizer_exhaustive, verify_gm_rigidity_all, verify_sigma_z_decomposition, CountType, QuinticSpec,
    SigmaZSpec,
};
use crate::reduction::{
    brauer_two_torsion_count, check_twisted_flat_limit, classify_ga_reduction, classify_split_gm_reduction, flat_limit, reduction_grid, shaf_ga_prime_count,
    shaf_gm_candidates, shaf_pgl2_count, twisted_cases, Fiber,
};
use crate::status::Status;
use crate::v5::{
    pair_mode, verify_action_homomorphism, verify_named_lines_and_counts, verify_normalization, verify_orbit_table, verify_preservation, verify_sigma_tilde,
    verify_y_smooth, ActionFamily,
};

/// Every tunable of a run. Parsed from `key=value` lines; CLI flags override.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub primes: Vec<u64>,
    /// Degree of the extension searched for lines at orbit representatives.
    pub ext_bound: usize,
    pub sunit_bound: i64,
    /// Worker threads; 0 uses all cores.
    pub jobs: usize,
    /// Largest `q` for the counting battery.
    pub count_bound: u64,
    /// Largest group order enumerated for stabilizers.
    pub stabilizer_bound: usize,
    /// Homomorphism checks are exhaustive up to this many pairs.
    pub pair_limit: usize,
    pub generic_points: usize,
    pub normalization_samples: usize,
    /// Primes checked for quadratic normality beyond the minor-gcd primes.
    pub v22_prime_bound: u64,
    /// Primes up to this bound get reduction data for S-unit candidates.
    pub report_bound: u64,
    /// `none` or `sigma`: corrupt one entry of `sigma` as a negative control.
    pub inject_fault: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            primes: vec![2, 3, 5, 7],
            ext_bound: 2,
            sunit_bound: 6,
            jobs: 0,
            count_bound: 49,
            stabilizer_bound: 10_000,
            pair_limit: 200_000,
            generic_points: 3,
            normalization_samples: 5,
            v22_prime_bound: 100,
            report_bound: 30,
            inject_fault: "none".into(),
        }
    }
}

fn parse_list(v: &str) -> Result<Vec<u64>> {
    v.split(',').map(|s| s.trim()).filter(|s| !s.is_empty()).map(|s| s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}")))).collect()
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Parse(format!("bad value {v:?} for {key}")))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "seed" => self.seed = parse_num(key, value)?,
            "primes" => self.primes = parse_list(value)?,
            "ext_bound" => self.ext_bound = parse_num(key, value)?,
            "sunit_bound" => self.sunit_bound = parse_num(key, value)?,
            "jobs" => self.jobs = parse_num(key, value)?,
            "count_bound" => self.count_bound = parse_num(key, value)?,
            "stabilizer_bound" => self.stabilizer_bound = parse_num(key, value)?,
            "pair_limit" => self.pair_limit = parse_num(key, value)?,
            "generic_points" => self.generic_points = parse_num(key, value)?,
            "normalization_samples" => self.normalization_samples = parse_num(key, value)?,
            "v22_prime_bound" => self.v22_prime_bound = parse_num(key, value)?,
            "report_bound" => self.report_bound = parse_num(key, value)?,
            "inject_fault" => self.inject_fault = value.trim().to_string(),
            _ => return Err(Error::Parse(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: expected key=value", n + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.primes.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::NotPrime(*p));
        }
        if self.primes.is_empty() || self.ext_bound == 0 || self.sunit_bound < 1 || self.count_bound < 2 || self.stabilizer_bound == 0 || self.pair_limit == 0 {
            return Err(Error::Invalid("bounds must be positive and the prime list non-empty".into()));
        }
        if !matches!(self.inject_fault.as_str(), "none" | "sigma") {
            return Err(Error::Invalid(format!("unknown fault {:?}", self.inject_fault)));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let list = |v: &[u64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "primes={}", list(&self.primes));
        let _ = writeln!(s, "ext_bound={}", self.ext_bound);
        let _ = writeln!(s, "sunit_bound={}", self.sunit_bound);
        let _ = writeln!(s, "jobs={}", self.jobs);
        let _ = writeln!(s, "count_bound={}", self.count_bound);
        let _ = writeln!(s, "stabilizer_bound={}", self.stabilizer_bound);
        let _ = writeln!(s, "pair_limit={}", self.pair_limit);
        let _ = writeln!(s, "generic_points={}", self.generic_points);
        let _ = writeln!(s, "normalization_samples={}", self.normalization_samples);
        let _ = writeln!(s, "v22_prime_bound={}", self.v22_prime_bound);
        let _ = writeln!(s, "report_bound={}", self.report_bound);
        let _ = writeln!(s, "inject_fault={}", self.inject_fault);
        s
    }
}

/// One line of the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub status: Status,
    pub expected: Value,
    pub computed: Value,
    /// Present on every FAIL and INCONCLUSIVE.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub details: Value,
    pub seed: u64,
}

impl CheckRecord {
    fn new(id: &str, ok: bool, expected: Value, computed: Value, details: impl Serialize) -> Self {
        Self::with_status(id, Status::from_bool(ok), expected, computed, details)
    }

    fn with_status(id: &str, status: Status, expected: Value, computed: Value, details: impl Serialize) -> Self {
        let details = serde_json::to_value(details).unwrap_or(Value::Null);
        let witness = (status != Status::Pass).then(|| format!("expected {expected}, computed {computed}"));
        CheckRecord { id: id.to_string(), status, expected, computed, witness, details, seed: 0 }
    }

    fn witness(mut self, w: Option<String>) -> Self {
        if self.status != Status::Pass {
            if let Some(w) = w {
                self.witness = Some(w);
            }
        }
        self
    }

    fn from_error(id: &str, e: &Error) -> Self {
        CheckRecord {
            id: id.to_string(),
            status: Status::Fail,
            expected: Value::Null,
            computed: Value::Null,
            witness: Some(format!("error: {e}")),
            details: Value::Null,
            seed: 0,
        }
    }
}

/// The records of one command, ordered by check id, plus command-level results.
#[derive(Debug, Clone, Serialize)]
pub struct Bundle {
    pub command: String,
    pub records: Vec<CheckRecord>,
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
    pub results: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub command: String,
    pub seed: u64,
    pub checks: usize,
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub status: Status,
    pub exit_code: i32,
    pub failing: Vec<String>,
    pub results: Value,
    pub seconds: BTreeMap<String, f64>,
}

impl Bundle {
    pub fn status(&self) -> Status {
        self.records.iter().fold(Status::Pass, |s, r| s.combine(r.status))
    }

    pub fn exit_code(&self) -> i32 {
        match self.status() {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }

    pub fn json_lines(&self) -> String {
        self.records.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect()
    }

    pub fn summary(&self, seed: u64) -> Summary {
        let count = |s: Status| self.records.iter().filter(|r| r.status == s).count();
        Summary {
            command: self.command.clone(),
            seed,
            checks: self.records.len(),
            pass: count(Status::Pass),
            fail: count(Status::Fail),
            inconclusive: count(Status::Inconclusive),
            status: self.status(),
            exit_code: self.exit_code(),
            failing: self.records.iter().filter(|r| r.status != Status::Pass).map(|r| r.id.clone()).collect(),
            results: self.results.clone(),
            seconds: self.timings.iter().cloned().collect(),
        }
    }
}

type Job<'a> = (String, Box<dyn Fn() -> Result<CheckRecord> + Send + Sync + 'a>);

fn job<'a>(id: impl Into<String>, f: impl Fn() -> Result<CheckRecord> + Send + Sync + 'a) -> Job<'a> {
    (id.into(), Box::new(f))
}

fn run_jobs(command: &str, cfg: &RunConfig, jobs: Vec<Job<'_>>, results: Value) -> Result<Bundle> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build().map_err(|e| Error::Invalid(e.to_string()))?;
    let mut out: Vec<(CheckRecord, f64)> = pool.install(|| {
        jobs.par_iter()
            .map(|(id, f)| {
                let t = Instant::now();
                let mut r = f().unwrap_or_else(|e| CheckRecord::from_error(id, &e));
                r.id = id.clone();
                r.seed = cfg.seed;
                (r, t.elapsed().as_secs_f64())
            })
            .collect()
    });
    out.sort_by(|a, b| a.0.id.cmp(&b.0.id));
    Ok(Bundle {
        command: command.to_string(),
        timings: out.iter().map(|(r, t)| (r.id.clone(), (t * 1000.0).round() / 1000.0)).collect(),
        records: out.into_iter().map(|x| x.0).collect(),
        results,
    })
}

fn sigma_family(f: &PrimeField, cfg: &RunConfig) -> Result<ActionFamily<PrimeField>> {
    let fam = ActionFamily::for_field(f)?;
    Ok(if cfg.inject_fault == "sigma" && f.p() != 2 {
        let e = fam.space().entry(0, 1).neg(f);
        fam.with_entry(0, 1, e)
    } else {
        fam
    })
}

/// The structural battery for `Y` and its group actions.
pub fn cmd_verify_v5(cfg: &RunConfig) -> Result<Bundle> {
    cfg.validate()?;
    let mut jobs: Vec<Job> = Vec::new();
    for &p in &cfg.primes {
        jobs.push(job(format!("y-smooth-F{p}"), move || {
            let r = verify_y_smooth(p)?;
            Ok(CheckRecord::new("", r.status == Status::Pass, json!({"points": r.expected_points, "singular": 0}), json!({"points": r.points_on_y, "singular": r.singular_points.len()}), &r)
                .witness(r.singular_points.first().cloned()))
        }));
        let groups: Vec<(u64, usize)> = if p == 2 { vec![(2, 1), (2, 2)] } else { vec![(p, 1)] };
        for (pp, e) in groups {
            let name = if p == 2 { "sigma-prime" } else { "sigma" };
            let q = pp.pow(e as u32);
            jobs.push(job(format!("{name}-homomorphism-F{q}"), move || {
                let run = |f: &dyn Fn(bool) -> Result<crate::v5::HomomorphismReport>| -> Result<CheckRecord> {
                    let space = f(false)?;
                    let plane = f(true)?;
                    let ok = space.status == Status::Pass && plane.status == Status::Pass;
                    Ok(CheckRecord::new("", ok, json!("homomorphism mod scalars"), json!({"P6": space.status, "P2": plane.status}), json!({"space": space, "plane": plane}))
                        .witness(space.violation.clone().or(plane.violation.clone())))
                };
                if e == 1 {
                    let f = PrimeField::new(pp)?;
                    let fam = sigma_family(&f, cfg)?;
                    let g = fam.group_elements();
                    let mode = pair_mode(g.len(), cfg.pair_limit, cfg.seed);
                    run(&|plane| Ok(verify_action_homomorphism(&fam, plane, &g, mode)))
                } else {
                    let f = construct_extension(pp, e)?;
                    let fam = ActionFamily::for_field(&f)?;
                    let g = fam.group_elements();
                    let mode = pair_mode(g.len(), cfg.pair_limit, cfg.seed);
                    run(&|plane| Ok(verify_action_homomorphism(&fam, plane, &g, mode)))
                }
            }));
            jobs.push(job(format!("{name}-preserves-y-F{q}"), move || {
                let r = if e == 1 {
                    let f = PrimeField::new(pp)?;
                    let fam = sigma_family(&f, cfg)?;
                    verify_preservation(&fam, &fam.group_elements())
                } else {
                    let f = construct_extension(pp, e)?;
                    let fam = ActionFamily::for_field(&f)?;
                    verify_preservation(&fam, &fam.group_elements())
                };
                Ok(CheckRecord::new("", r.status == Status::Pass, json!(r.group_order), json!(if r.violation.is_none() { r.group_order } else { 0 }), &r).witness(r.violation.clone()))
            }));
        }
        jobs.push(job(format!("orbit-dimensions-F{p}"), move || {
            let r = verify_orbit_table(&PrimeField::new(p)?)?;
            let exp: Vec<usize> = r.entries.iter().map(|e| e.expected_dimension).collect();
            let got: Vec<usize> = r.entries.iter().map(|e| e.growth_dimension.unwrap_or(e.tangent_dimension)).collect();
            let tangent: Vec<usize> = r.entries.iter().map(|e| e.tangent_dimension).collect();
            Ok(CheckRecord::new("", r.status == Status::Pass, json!(exp), json!({"dimensions": got, "tangent_ranks": tangent}), &r))
        }));
        jobs.push(job(format!("normalization-F{p}"), move || {
            let r = verify_normalization(&PrimeField::new(p)?, cfg.normalization_samples, cfg.seed)?;
            let bad: Vec<String> = r.checks.iter().filter(|c| c.status != Status::Pass).map(|c| format!("{}: {}", c.name, c.detail)).collect();
            Ok(CheckRecord::new("", r.status == Status::Pass, json!(r.checks.len()), json!(r.checks.len() - bad.len()), &r).witness(bad.first().cloned()))
        }));
        jobs.push(job(format!("lines-F{p}"), move || {
            let r = verify_named_lines_and_counts(p, cfg.ext_bound, cfg.generic_points, cfg.seed)?;
            let exp: Vec<usize> = r.counts.iter().chain(&r.generic).map(|c| c.expected).collect();
            let got: Vec<usize> = r.counts.iter().chain(&r.generic).map(|c| c.found).collect();
            Ok(CheckRecord::new("", r.status == Status::Pass, json!(exp), json!(got), &r))
        }));
    }
    jobs.push(job("sigma-tilde-integral-model", || {
        let r = verify_sigma_tilde()?;
        Ok(CheckRecord::new("", r.status == Status::Pass, json!({"mismatches": 0}), json!({"mismatches": r.mismatches.len(), "min_valuation": r.min_valuation}), &r)
            .witness(r.mismatches.first().cloned()))
    }));
    run_jobs("verify-v5", cfg, jobs, Value::Null)
}

fn stabilizer_expected(kind: &str, q: u64) -> u64 {
    match kind {
        "mu" => q * (q - 1),
        "ga" => q * num_integer::gcd(4, q - 1),
        _ => q - 1,
    }
}

/// Smoothness, stabilizers, rigidity and the loci of lines meeting the curves.
pub fn cmd_verify_quintics(cfg: &RunConfig) -> Result<Bundle> {
    cfg.validate()?;
    let mut jobs: Vec<Job> = Vec::new();
    jobs.push(job("quintic-smoothness-mu-ga", || {
        let mut rows = Vec::new();
        let mut ok = true;
        for p in [2u64, 3, 5, 7, 11, 13] {
            let f = PrimeField::new(p)?;
            let expect = !matches!(p, 2 | 5);
            let (mu, ga) = (check_quintic_smooth(&f, &QuinticSpec::MU)?, check_quintic_smooth(&f, &QuinticSpec::Ga(1))?);
            ok &= mu == expect && ga == expect;
            rows.push(json!({"p": p, "expected": expect, "mu": mu, "ga": ga}));
        }
        Ok(CheckRecord::new("", ok, json!("smooth exactly when p is not 2 or 5"), json!(rows), Value::Null))
    }));
    for p in [7u64, 13] {
        jobs.push(job(format!("quintic-smoothness-gm-F{p}"), move || {
            let f = PrimeField::new(p)?;
            let wrong: Vec<u64> = (0..p).filter(|&u| check_quintic_smooth(&f, &QuinticSpec::Gm(u)).map(|s| s != (u > 1)).unwrap_or(true)).collect();
            Ok(CheckRecord::new("", wrong.is_empty(), json!("smooth exactly when u is not 0 or 1"), json!({"mismatched_u": wrong}), Value::Null))
        }));
    }
    let stab_cases: Vec<(&str, u64)> = vec![("mu", 3), ("mu", 7), ("mu", 11), ("ga", 3), ("ga", 7), ("ga", 13), ("gm", 4), ("gm", 7), ("gm", 8), ("gm", 13)];
    for (kind, q) in stab_cases {
        jobs.push(job(format!("stabilizer-{kind}-F{q}"), move || {
            let (p, e) = prime_power_split(q).unwrap();
            let k = construct_extension(p, e as usize)?;
            let specs: Vec<QuinticSpec<_>> = match kind {
                "mu" => vec![QuinticSpec::MU],
                "ga" => vec![QuinticSpec::Ga(k.one())],
                _ => k.elements().into_iter().filter(|u| gm_parameter_valid(&k, u)).map(QuinticSpec::Gm).collect(),
            };
            let reports = specs.iter().map(|s| stabilizer_exhaustive(&k, s, cfg.stabilizer_bound)).collect::<Result<Vec<_>>>()?;
            let want = stabilizer_expected(kind, q) as usize;
            let orders: Vec<usize> = reports.iter().map(|r| r.order).collect();
            let bad = reports.iter().find(|r| r.order != want).map(|r| format!("{} has stabilizer of order {}", r.curve, r.order));
            Ok(CheckRecord::new("", bad.is_none() && !orders.is_empty(), json!(want), json!(orders), &reports).witness(bad))
        }));
    }
    for p in [7u64, 13] {
        jobs.push(job(format!("gm-rigidity-F{p}"), move || {
            let r = verify_gm_rigidity_all(&PrimeField::new(p)?)?;
            Ok(CheckRecord::new("", r.status == Status::Pass, json!({"mapped_pairs": 0}), json!({"mapped_pairs": r.mapped_pairs.len(), "pairs": r.pairs_checked}), &r)
                .witness(r.mapped_pairs.first().map(|(a, b)| format!("Z_{a} maps to Z_{b}"))))
        }));
    }
    let sz: Vec<(&str, SigmaZSpec, u64, usize)> = vec![
        ("sigma-z-mu-F7", SigmaZSpec::MU, 7, 1),
        ("sigma-z-ga-F13", SigmaZSpec::Ga, 13, 1),
        ("sigma-z-gm-F7", SigmaZSpec::Gm { u: 2 }, 7, 1),
        ("sigma-z-gm-F13", SigmaZSpec::Gm { u: 12 }, 13, 1),
        ("sigma-z-gm-F16", SigmaZSpec::Gm { u: crate::quintic::gm_parameter_with_root(2, 4)?.unwrap_or(0) }, 2, 4),
    ];
    for (id, spec, p, e) in sz {
        jobs.push(job(id, move || {
            let r = verify_sigma_z_decomposition(spec, p, e)?;
            let mults: Vec<Option<usize>> = r.multiplicities.iter().map(|m| m.found).collect();
            let exp: Vec<usize> = r.multiplicities.iter().map(|m| m.expected).collect();
            let w = r
                .components
                .iter()
                .find(|c| c.status != Status::Pass)
                .map(|c| format!("component {} has {} traced points", c.equation, c.distinct_points))
                .or_else(|| r.off_components.first().cloned())
                .or_else(|| (r.bisecant.status != Status::Pass).then(|| r.bisecant.detail.clone()));
            Ok(CheckRecord::new(
                "",
                r.status == Status::Pass,
                json!({"multiplicities": exp, "bisecant": "l(1:0:0)"}),
                json!({"multiplicities": mults, "bisecant": r.bisecant.status}),
                &r,
            )
            .witness(w))
        }));
    }
    run_jobs("verify-quintics", cfg, jobs, Value::Null)
}

pub fn parse_count_type(s: &str) -> Result<CountType> {
    match s.to_ascii_lowercase().as_str() {
        "pgl2" | "mu" => Ok(CountType::Pgl2),
        "ga" => Ok(CountType::Ga),
        "gm" => Ok(CountType::Gm),
        _ => Err(Error::Parse(format!("unknown type {s:?}; use pgl2, ga or gm"))),
    }
}

/// Enumerated counts against the closed formulas, for one `(type, q)` or
/// every prime power up to the configured bound.
pub fn cmd_count(cfg: &RunConfig, single: Option<(CountType, u64)>) -> Result<Bundle> {
    cfg.validate()?;
    let cases: Vec<(CountType, u64)> = match single {
        Some((t, q)) => {
            if prime_power_split(q).is_none() {
                return Err(Error::Invalid(format!("{q} is not a prime power")));
            }
            vec![(t, q)]
        }
        None => prime_powers_up_to(cfg.count_bound).iter().flat_map(|&(q, _, _)| [CountType::Pgl2, CountType::Ga, CountType::Gm].map(|t| (t, q))).collect(),
    };
    let jobs: Vec<Job> = cases
        .iter()
        .map(|&(t, q)| {
            job(format!("count-{}-F{q:02}", t.as_str().to_ascii_lowercase()), move || {
                let r = count_v22(t, q)?;
                Ok(CheckRecord::new("", r.agree, json!(r.formula), json!(r.enumerated), &r))
            })
        })
        .collect();
    let mut b = run_jobs("count", cfg, jobs, Value::Null)?;
    if single.is_some() {
        b.results = b.records[0].details.clone();
    }
    Ok(b)
}

/// What to reduce.
#[derive(Debug, Clone)]
pub enum ReduceTarget {
    Gm(BigRational),
    Ga(BigRational),
    /// The classifier grid and the constructed twisted flat limits.
    Battery,
}

pub fn parse_reduce_target(u: Option<&str>, xi: Option<&str>) -> Result<ReduceTarget> {
    match (u, xi) {
        (Some(_), Some(_)) => Err(Error::Invalid("give either --u or --xi".into())),
        (Some(u), None) => Ok(ReduceTarget::Gm(parse_rational(u)?)),
        (None, Some(x)) => Ok(ReduceTarget::Ga(parse_rational(x)?)),
        (None, None) => Ok(ReduceTarget::Battery),
    }
}

/// Whether a standard fibre is consistent with reducing the curve directly.
fn standard_fibre_consistent(u: &BigRational, p: u64, fiber: Fiber) -> Result<bool> {
    let f = PrimeField::new(p)?;
    let lim = flat_limit(&QuinticSpec::Gm(u.clone()), &crate::group::identity(&crate::field::Rationals), None, p)?;
    let target = crate::quintic::build_quintic(&f, &fiber.spec(&f))?;
    let same = match fiber {
        Fiber::Gm { .. } => lim.curve == target,
        _ => true,
    };
    Ok(!lim.degenerate && same && check_quintic_smooth(&f, &fiber.spec(&f))?)
}

pub fn cmd_reduce(cfg: &RunConfig, target: ReduceTarget, primes: Option<Vec<u64>>) -> Result<Bundle> {
    cfg.validate()?;
    let primes = primes.unwrap_or_else(|| cfg.primes.clone());
    if let Some(p) = primes.iter().find(|&&p| !is_prime(p)) {
        return Err(Error::NotPrime(*p));
    }
    let mut jobs: Vec<Job> = Vec::new();
    let mut results = Value::Null;
    match target {
        ReduceTarget::Gm(u) => {
            let outcomes = primes.iter().map(|&p| classify_split_gm_reduction(&u, p)).collect::<Result<Vec<_>>>()?;
            results = json!(outcomes);
            for o in outcomes {
                let p = o.context.prime;
                let u = u.clone();
                jobs.push(job(format!("reduce-gm-p{p:03}"), move || {
                    let ok = match o.standard {
                        Some(fib) => standard_fibre_consistent(&u, p, fib)?,
                        None => true,
                    } && o.twisted.as_ref().map_or(Ok(true), |t| {
                        let b = crate::arith::pow_rational(&crate::arith::int(p as i64), t.witness.b_valuation);
                        check_twisted_flat_limit(&u, &b, p).map(|c| c.matches)
                    })?;
                    Ok(CheckRecord::new("", ok, json!("fibres rebuild as smooth quintics matching the limits"), json!({"standard": o.standard, "twisted": o.twisted.as_ref().map(|t| t.fiber), "bad": o.bad}), &o))
                }));
            }
        }
        ReduceTarget::Ga(xi) => {
            let outcomes = primes.iter().map(|&p| classify_ga_reduction(&xi, p)).collect::<Result<Vec<_>>>()?;
            results = json!(outcomes);
            for o in outcomes {
                let p = o.context.prime;
                jobs.push(job(format!("reduce-ga-p{p:03}"), move || {
                    let f = PrimeField::new(p)?;
                    let ok = match o.standard {
                        Some(fib) => check_quintic_smooth(&f, &fib.spec(&f))?,
                        None => true,
                    };
                    Ok(CheckRecord::new("", ok, json!("fibre rebuilds as a smooth quintic"), json!({"standard": o.standard, "bad": o.bad}), &o))
                }));
            }
        }
        ReduceTarget::Battery => {
            jobs.push(job("reduction-grid-fibres", || {
                let mut bad = Vec::new();
                let grid = reduction_grid();
                for (u, p) in &grid {
                    let o = classify_split_gm_reduction(u, *p)?;
                    if let Some(fib) = o.standard {
                        if !standard_fibre_consistent(u, *p, fib)? {
                            bad.push(format!("u = {u}, p = {p}"));
                        }
                    }
                }
                Ok(CheckRecord::new("", bad.is_empty(), json!(grid.len()), json!(grid.len() - bad.len()), &bad).witness(bad.first().cloned()))
            }));
            for (i, (u, b, p)) in twisted_cases().into_iter().enumerate() {
                jobs.push(job(format!("twisted-flat-limit-{i:02}"), move || {
                    let c = check_twisted_flat_limit(&u, &b, p)?;
                    Ok(CheckRecord::new("", c.matches, json!(c.expected), json!(if c.matches { json!(c.expected) } else { json!("different curve") }), &c))
                }));
            }
        }
    }
    run_jobs("reduce", cfg, jobs, results)
}

pub fn cmd_shafarevich(cfg: &RunConfig, s: &[u64]) -> Result<Bundle> {
    cfg.validate()?;
    if let Some(p) = s.iter().find(|&&p| !is_prime(p)) {
        return Err(Error::NotPrime(*p));
    }
    let mut s = s.to_vec();
    s.sort_unstable();
    s.dedup();
    let pgl2 = shaf_pgl2_count(&s)?;
    let ga = shaf_ga_prime_count(&s)?;
    let gm = shaf_gm_candidates(&s, cfg.sunit_bound, cfg.report_bound)?;
    let results = json!({
        "S": s,
        "pgl2": pgl2.formula,
        "ga_prime": ga.formula,
        "gm_candidates": gm.candidates.iter().map(|c| c.u.clone()).collect::<Vec<_>>(),
    });
    let s2 = s.clone();
    let s3 = s.clone();
    let jobs: Vec<Job> = vec![
        job("shafarevich-pgl2", move || Ok(CheckRecord::new("", pgl2.agree, json!(pgl2.formula), json!(pgl2.cross_check), &pgl2))),
        job("shafarevich-ga-prime", move || Ok(CheckRecord::new("", ga.agree, json!(ga.formula), json!(ga.cross_check), &ga))),
        job("shafarevich-gm-candidates", move || {
            let excluded_ok = gm.candidates.iter().all(|c| c.u != "0" && c.u != "1" && c.u != "5/4");
            Ok(CheckRecord::new("", excluded_ok, json!("S-unit solutions other than 0, 1, 5/4"), json!(gm.candidates.len()), &gm))
        }),
        job("brauer-witnesses", move || {
            let b = brauer_two_torsion_count(&s2)?;
            let want = 1usize << s2.len();
            Ok(CheckRecord::new("", b.matches_even_subsets && b.count == want, json!(want), json!(b.count), &b))
        }),
        job("s-unit-symmetry", move || {
            let sol = crate::reduction::s_unit_equation(&s3, cfg.sunit_bound)?;
            let set: std::collections::HashSet<&BigRational> = sol.values.iter().collect();
            let asym: Vec<String> = sol.values.iter().filter(|u| !set.contains(&(BigRational::from_integer(1.into()) - *u))).map(|u| u.to_string()).collect();
            Ok(CheckRecord::new("", asym.is_empty(), json!("closed under u -> 1 - u"), json!({"solutions": sol.values.len(), "asymmetric": asym}), &sol).witness(asym.first().cloned()))
        }),
    ];
    run_jobs("shafarevich", cfg, jobs, results)
}

pub fn cmd_verify_v22_over_z(cfg: &RunConfig) -> Result<Bundle> {
    cfg.validate()?;
    let cert = CertificateConfig { seed: cfg.seed, ..CertificateConfig::default() };
    let r = crate::v22::verify_v22_over_z(cfg.v22_prime_bound, &cert)?;
    let results = json!({
        "immersion_candidate_primes": r.smoothness.immersion_candidate_primes,
        "injectivity_candidate_primes": r.smoothness.injectivity_candidate_primes,
        "minor_gcd_primes": r.normality.minor_gcd_primes,
    });
    let (on, quad, norm, smooth) = (r.gamma_on_quadric, r.quadric.clone(), r.normality.clone(), r.smoothness.clone());
    let jobs: Vec<Job> = vec![
        job("gamma-on-quadric", move || Ok(CheckRecord::new("", on, json!(true), json!(on), Value::Null))),
        job("quadric-smooth-over-z", move || {
            Ok(CheckRecord::new("", quad.status == Status::Pass, json!({"singular_primes": []}), json!({"singular_primes": quad.singular_primes}), &quad))
        }),
        job("gamma-quadratically-normal", move || {
            let w = norm.failures.first().map(|(p, k)| format!("kernel dimension {k} at p = {p}"));
            Ok(CheckRecord::with_status("", norm.status, json!({"kernel_dimension": 2}), json!({"over_q": norm.kernel_dimension_over_q, "failures": norm.failures}), &norm).witness(w))
        }),
        job("gamma-smooth-over-z", move || {
            let w = smooth.failure.clone().or(smooth.reason.clone());
            Ok(CheckRecord::with_status(
                "",
                smooth.status,
                json!("immersion and injectivity away from no prime"),
                json!({"immersion_candidates": smooth.immersion_candidate_primes, "injectivity_candidates": smooth.injectivity_candidate_primes}),
                &smooth,
            )
            .witness(w))
        }),
    ];
    run_jobs("verify-v22-over-z", cfg, jobs, results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let mut c = RunConfig::default();
        c.apply_text("seed = 7\n# comment\nprimes=3,5 # trailing\n").unwrap();
        assert_eq!((c.seed, c.primes.clone()), (7, vec![3, 5]));
        let mut d = RunConfig::default();
        d.apply_text(&c.to_text()).unwrap();
        assert_eq!(c, d);
        assert!(d.apply_text("nonsense=1").is_err());
        assert!(d.apply_text("seed").is_err());
        d.primes = vec![4];
        assert!(d.validate().is_err());
    }

    #[test]
    fn single_count() {
        let b = cmd_count(&RunConfig::default(), Some((CountType::Gm, 7))).unwrap();
        assert_eq!(b.results["enumerated"], 8);
        assert_eq!(b.results["formula"], 8);
        assert_eq!(b.exit_code(), 0);
        assert!(cmd_count(&RunConfig::default(), Some((CountType::Gm, 12))).is_err());
    }

    #[test]
    fn shafarevich_bundle() {
        let b = cmd_shafarevich(&RunConfig::default(), &[2, 5]).unwrap();
        assert_eq!(b.status(), Status::Pass);
        assert_eq!(b.results["pgl2"], 4);
        assert_eq!(b.results["ga_prime"], 32);
    }

    #[test]
    fn reduce_bundle() {
        let b = cmd_reduce(&RunConfig::default(), parse_reduce_target(Some("5/4+81"), None).unwrap(), Some(vec![3])).unwrap();
        assert_eq!(b.status(), Status::Pass, "{:?}", b.records);
        assert!(b.results[0]["twisted"].is_object());
        assert!(parse_reduce_target(Some("1"), Some("2")).is_err());
    }
}
