//! Property checks run as one batch: each criterion returns a pass flag and a one-line detail.

use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{solve_periods, ExactVerdict, STATE_BUDGET};
use crate::exec::Exec;
use crate::fold::{
    fold, schedule_density_half, unfold_schedule, validate_repr, EXACT_PERIOD_LIMIT,
};
use crate::instance::{Job, PinwheelInstance};
use crate::num::{rat, rat_big, Rational};
use crate::oracle::{brute_force_bgt, brute_force_pinwheel, brute_force_rs_one, catalog};
use crate::ptas::{decide, PtasVerdict};
use crate::reductions::greedy::{greedy_with, sample_density, warm_greedy_with, warm_lower_bound};
use crate::reductions::{
    all_allowed_periods, build_eps_witness, red_concise, red_eps, red_ps_detailed,
    validate_witness, JobCounts, LiteralReps,
};
use crate::related::{bgt_objective, red_bgt, red_rs};
use crate::repr::ScheduleRepr;
use crate::sat::{brute_force_sat, gen_random_34sat, gen_random_3sat, CnfFormula, SatVerdict};
use crate::schedule::validate_schedule_gaps;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} [{:>2}] {}: {}", self.id, self.name, self.detail)
    }
}

/// Batch sizes; [`SuiteConfig::default`] matches the documented acceptance run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    pub catalog_jobs: usize,
    pub catalog_max_period: u64,
    pub formulas: usize,
    pub greedy_draws: usize,
    pub fold_instances: usize,
    pub half_instances: usize,
    pub concise_formulas: usize,
    pub budget: u64,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            catalog_jobs: 3,
            catalog_max_period: 6,
            formulas: 50,
            greedy_draws: 1000,
            fold_instances: 1000,
            half_instances: 200,
            concise_formulas: 20,
            budget: STATE_BUDGET,
            seed: 0,
        }
    }
}

fn report(
    id: u8,
    name: &'static str,
    start: Instant,
    failures: Vec<String>,
    ok: String,
) -> CriterionReport {
    let secs = start.elapsed().as_secs_f64();
    let passed = failures.is_empty();
    let detail = if passed {
        format!("{ok} ({secs:.1}s)")
    } else {
        let shown: Vec<_> = failures.iter().take(3).cloned().collect();
        format!(
            "{} failure(s): {} ({secs:.1}s)",
            failures.len(),
            shown.join("; ")
        )
    };
    CriterionReport {
        id,
        name,
        passed,
        detail,
    }
}

fn errors<T>(results: Vec<std::result::Result<T, String>>) -> Vec<String> {
    results.into_iter().filter_map(|r| r.err()).collect()
}

/// Seeded 3,4-SAT formulas with 3 to 8 variables.
pub fn formula_corpus(count: usize, seed: u64) -> Result<Vec<CnfFormula>> {
    (0..count)
        .map(|i| {
            let n = 3 + i % 6;
            let m = 1 + (i / 6) % (4 * n / 3);
            gen_random_34sat(n, m, seed.wrapping_add(i as u64))
        })
        .collect()
}

fn int_instance(periods: &[u64]) -> PinwheelInstance {
    PinwheelInstance::from_integers(periods).expect("positive periods")
}

pub fn check_exact_catalog(cfg: &SuiteConfig, exec: Exec) -> CriterionReport {
    let start = Instant::now();
    let cat = catalog(cfg.catalog_jobs, cfg.catalog_max_period);
    let results = exec.map(&cat, |ps| -> std::result::Result<bool, String> {
        let solver = solve_periods(ps, cfg.budget).map_err(|e| format!("{ps:?}: {e}"))?;
        let oracle = brute_force_pinwheel(ps, cfg.budget).map_err(|e| format!("{ps:?}: {e}"))?;
        if let ExactVerdict::Schedulable(s) = &solver {
            if !validate_schedule_gaps(ps, s)
                .map_err(|e| e.to_string())?
                .is_valid()
            {
                return Err(format!("{ps:?}: solver schedule invalid"));
            }
        }
        if solver.is_schedulable() != oracle.is_schedulable() {
            return Err(format!(
                "{ps:?}: solver {} oracle {}",
                solver.is_schedulable(),
                oracle.is_schedulable()
            ));
        }
        Ok(solver.is_schedulable())
    });
    let yes = results.iter().filter(|r| matches!(r, Ok(true))).count();
    let mut failures = errors(results);
    for (ps, want) in [(vec![2, 3, 6], false), (vec![2, 4, 4], true)] {
        match solve_periods(&ps, cfg.budget) {
            Ok(v) if v.is_schedulable() == want => {}
            other => failures.push(format!("{ps:?}: got {other:?}")),
        }
    }
    report(
        1,
        "exact solver agrees with brute force",
        start,
        failures,
        format!("{} instances, {yes} schedulable", cat.len()),
    )
}

pub fn check_ps_density(cfg: &SuiteConfig, exec: Exec) -> CriterionReport {
    let start = Instant::now();
    let corpus = match formula_corpus(cfg.formulas, cfg.seed) {
        Ok(c) => c,
        Err(e) => {
            return report(
                2,
                "red_ps density is 1",
                start,
                vec![e.to_string()],
                String::new(),
            )
        }
    };
    let results = exec.map(&corpus, |f| {
        let r = red_ps_detailed(f).map_err(|e| e.to_string())?;
        // density recomputed from the groups over their common multiple
        let groups = r
            .tagged
            .instance
            .integer_groups()
            .map_err(|e| e.to_string())?;
        let l = groups.iter().fold(BigUint::one(), |acc, (p, _)| acc.lcm(p));
        let slots: BigUint = groups.iter().map(|(p, c)| c * (&l / p)).sum();
        if slots != l || r.tagged.density() != Rational::one() {
            return Err(format!(
                "n={} m={}: density {}",
                f.num_vars,
                f.num_clauses(),
                r.tagged.density()
            ));
        }
        Ok(())
    });
    report(
        2,
        "red_ps density is 1",
        start,
        errors(results),
        format!("{} formulas", corpus.len()),
    )
}

pub fn check_witnesses(cfg: &SuiteConfig, exec: Exec) -> CriterionReport {
    let start = Instant::now();
    let corpus = match formula_corpus(cfg.formulas, cfg.seed) {
        Ok(c) => c,
        Err(e) => {
            return report(
                3,
                "witness for satisfiable formulas",
                start,
                vec![e.to_string()],
                String::new(),
            )
        }
    };
    let results = exec.map(&corpus, |f| -> std::result::Result<bool, String> {
        let SatVerdict::Sat(a) = brute_force_sat(f).map_err(|e| e.to_string())? else {
            return Ok(false);
        };
        let w = build_eps_witness(f, &a)
            .map_err(|e| format!("n={} m={}: {e}", f.num_vars, f.num_clauses()))?;
        let v = validate_witness(&w, Exec::Sequential).map_err(|e| e.to_string())?;
        if !v.is_valid() {
            return Err(format!("n={} m={}: {v:?}", f.num_vars, f.num_clauses()));
        }
        Ok(true)
    });
    let sat = results.iter().filter(|r| matches!(r, Ok(true))).count();
    report(
        3,
        "witness for satisfiable formulas",
        start,
        errors(results),
        format!(
            "{sat} satisfiable of {} formulas, all witnesses valid",
            corpus.len()
        ),
    )
}

pub fn check_allowed_periods(cfg: &SuiteConfig, exec: Exec) -> CriterionReport {
    let start = Instant::now();
    let corpus = match formula_corpus(cfg.formulas, cfg.seed) {
        Ok(c) => c,
        Err(e) => {
            return report(
                4,
                "allowed-period invariants",
                start,
                vec![e.to_string()],
                String::new(),
            )
        }
    };
    let results = exec.map(&corpus, |f| {
        let all = all_allowed_periods(f).map_err(|e| e.to_string())?;
        let n = f.num_vars;
        let two_n = BigUint::from(2 * n);
        let v = BigUint::from(n.max(f.num_clauses()));
        let (lo, hi) = (&two_n * v.pow(28), &two_n * v.pow(84));
        let tag = format!("n={} m={}", n, f.num_clauses());
        for (i, ps) in all.iter().enumerate() {
            if ps.len() != n || ps[n - 1] != all[0][n - 1] {
                return Err(format!("{tag}: tail of variable {} differs", i + 1));
            }
            if ps[0] < lo || ps[0] > hi {
                return Err(format!(
                    "{tag}: first period of variable {} out of bounds",
                    i + 1
                ));
            }
            let next = &all[(i + 1) % n];
            for j in 1..n {
                if ps[j] <= ps[j - 1] || !(&ps[j] % &ps[j - 1]).is_zero() {
                    return Err(format!("{tag}: chain of variable {} breaks at {j}", i + 1));
                }
                if &two_n * &ps[j] != &ps[0] * &next[j - 1] {
                    return Err(format!("{tag}: cyclic identity fails at {}, {j}", i + 1));
                }
            }
        }
        Ok(())
    });
    report(
        4,
        "allowed-period invariants",
        start,
        errors(results),
        format!("{} formulas", corpus.len()),
    )
}

/// Whether the jobs fill exactly `d·last` of every `last` slots, with every period dividing
/// `last`.
fn fills(jobs: &JobCounts, d: &Rational, last: &BigUint) -> bool {
    let l = BigInt::from(last.clone());
    if !(&l % d.denom()).is_zero() || jobs.keys().any(|p| !(last % p).is_zero()) {
        return false;
    }
    let slots: BigUint = jobs.iter().map(|(p, c)| c * (last / p)).sum();
    BigInt::from(slots) == d.numer() * (l / d.denom())
}

pub fn check_greedy(cfg: &SuiteConfig, exec: Exec) -> CriterionReport {
    let start = Instant::now();
    let corpus = match formula_corpus(cfg.formulas, cfg.seed) {
        Ok(c) => c,
        Err(e) => {
            return report(
                5,
                "greedy densities are exact",
                start,
                vec![e.to_string()],
                String::new(),
            )
        }
    };
    let draws = cfg.greedy_draws;
    let seed = cfg.seed;
    let results = exec.map_range(corpus.len(), |k| {
        let f = &corpus[k];
        let n = f.num_vars;
        let tag = format!("n={} m={}", n, f.num_clauses());
        let all = all_allowed_periods(f).map_err(|e| e.to_string())?;
        let r = red_ps_detailed(f).map_err(|e| e.to_string())?;
        for ps in &all {
            if r.clause_sum < rat_big(&BigUint::from(2u32), &ps[0]) {
                return Err(format!("{tag}: clause_sum below 2/periods[0]"));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64) << 32);
        for _ in 0..draws {
            let ind = rng.gen_range(0..n);
            let ps = &all[ind];
            let last = ps.last().expect("n ≥ 1");
            let r = BigUint::from(rng.gen::<u64>()) * BigUint::from(rng.gen::<u64>());
            let d = sample_density(&Rational::zero(), n, last, &r);
            let g = greedy_with(ps, n, &d).map_err(|e| format!("{tag}: greedy {e}"))?;
            if !fills(&g, &d, last) {
                return Err(format!("{tag}: greedy density differs for d={d}"));
            }
            if n >= 2 {
                let lo = warm_lower_bound(ps, n).expect("two periods");
                let d = sample_density(&lo, n, last, &r);
                let w = warm_greedy_with(ps, n, &d).map_err(|e| format!("{tag}: warm {e}"))?;
                if !fills(&w, &d, last) {
                    return Err(format!("{tag}: warm greedy density differs for d={d}"));
                }
            }
        }
        Ok(())
    });
    report(
        5,
        "greedy densities are exact",
        start,
        errors(results),
        format!("{} formulas x {draws} draws", corpus.len()),
    )
}

pub fn check_ptas(cfg: &SuiteConfig, exec: Exec) -> CriterionReport {
    let start = Instant::now();
    let cat = catalog(cfg.catalog_jobs, cfg.catalog_max_period);
    let eps = rat(1, 4);
    let scale = rat(5, 4);
    let results = exec.map(&cat, |ps| -> std::result::Result<bool, String> {
        let inst = int_instance(ps);
        let out = decide(&inst, &eps, true).map_err(|e| format!("{ps:?}: {e}"))?;
        match out.verdict {
            PtasVerdict::Unschedulable => {
                match solve_periods(ps, cfg.budget).map_err(|e| e.to_string())? {
                    ExactVerdict::Unschedulable => Ok(false),
                    ExactVerdict::Schedulable(_) => {
                        Err(format!("{ps:?}: rejected a schedulable instance"))
                    }
                }
            }
            PtasVerdict::Schedulable(None) => Err(format!("{ps:?}: no construction")),
            PtasVerdict::Schedulable(Some(c)) => {
                let scaled = inst.scale(&scale).map_err(|e| e.to_string())?;
                let periods = scaled.expanded_periods().map_err(|e| e.to_string())?;
                let window = c.window.max(8 * c.len_s3);
                let v = c
                    .repr
                    .validate(&periods, window, EXACT_PERIOD_LIMIT)
                    .map_err(|e| format!("{ps:?}: {e}"))?;
                if !v.is_valid() {
                    return Err(format!("{ps:?}: construction invalid: {v:?}"));
                }
                Ok(true)
            }
        }
    });
    let yes = results.iter().filter(|r| matches!(r, Ok(true))).count();
    report(
        6,
        "approximation scheme at eps = 1/4",
        start,
        errors(results),
        format!("{} instances, {yes} constructions validated", cat.len()),
    )
}

fn random_rational_instance(
    rng: &mut ChaCha8Rng,
    max_jobs: usize,
    max_period: i64,
) -> PinwheelInstance {
    let m = rng.gen_range(1..=max_jobs);
    let jobs = (0..m)
        .map(|_| {
            let d = rng.gen_range(1..=4i64);
            let n = rng.gen_range(d..=max_period * d);
            Job::new(rat(n, d))
        })
        .collect();
    PinwheelInstance::new(jobs).expect("periods at least 1")
}

pub fn check_fold(cfg: &SuiteConfig, exec: Exec) -> CriterionReport {
    let start = Instant::now();
    let seed = cfg.seed;
    let budget = cfg.budget;
    let results = exec.map_range(
        cfg.fold_instances,
        |k| -> std::result::Result<bool, String> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0xf01d_0000 + k as u64));
            let inst = random_rational_instance(&mut rng, 8, 40);
            let theta = rat(rng.gen_range(4..=32), 2);
            let f = fold(&inst, &theta).map_err(|e| e.to_string())?;
            let tag = format!("instance {k}");
            if f.density() - inst.density() >= theta.recip() {
                return Err(format!("{tag}: density grew by at least 1/theta"));
            }
            let periods = inst.expanded_periods().map_err(|e| e.to_string())?;
            for (id, p) in periods.iter().enumerate() {
                if *p <= theta && !f.jobs.iter().any(|(j, q)| *j == id && q == p) {
                    return Err(format!("{tag}: job {id} with period {p} not preserved"));
                }
            }
            if f.jobs.iter().any(|(_, p)| *p > theta) {
                return Err(format!("{tag}: folded period above theta"));
            }
            let floors: Vec<u64> = f
                .jobs
                .iter()
                .map(|(_, p)| p.floor().to_integer().to_u64().expect("small period"))
                .collect();
            let ExactVerdict::Schedulable(s) =
                solve_periods(&floors, budget).map_err(|e| e.to_string())?
            else {
                return Ok(false);
            };
            let ids: Vec<usize> = f.jobs.iter().map(|(id, _)| *id).collect();
            let repr = ScheduleRepr::plain(s).remap_ids(&|j| ids[j]);
            let un = unfold_schedule(repr, &f).map_err(|e| format!("{tag}: {e}"))?;
            let v = validate_repr(&inst, &un, 4096).map_err(|e| format!("{tag}: {e}"))?;
            if !v.is_valid() {
                return Err(format!("{tag}: unfolded schedule invalid: {v:?}"));
            }
            Ok(true)
        },
    );
    let unfolded = results.iter().filter(|r| matches!(r, Ok(true))).count();
    let mut failures = errors(results);
    if unfolded * 4 < cfg.fold_instances {
        failures.push(format!("only {unfolded} folded instances were schedulable"));
    }
    report(
        7,
        "fold properties",
        start,
        failures,
        format!(
            "{} instances, {unfolded} unfolded schedules validated",
            cfg.fold_instances
        ),
    )
}

pub fn check_density_half(cfg: &SuiteConfig, exec: Exec) -> CriterionReport {
    let start = Instant::now();
    let seed = cfg.seed;
    let results = exec.map_range(cfg.half_instances, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x4a1f_0000 + k as u64));
        let mut inst = random_rational_instance(&mut rng, 10, 30);
        let d = inst.density();
        if d > rat(1, 2) {
            inst = inst.scale(&(d * rat(2, 1))).map_err(|e| e.to_string())?;
        }
        let r = schedule_density_half(&inst).map_err(|e| format!("instance {k}: {e}"))?;
        let v = validate_repr(&inst, &r, 4096).map_err(|e| format!("instance {k}: {e}"))?;
        if !v.is_valid() {
            return Err(format!("instance {k}: {v:?}"));
        }
        Ok(())
    });
    report(
        8,
        "density-1/2 scheduler",
        start,
        errors(results),
        format!("{} instances", cfg.half_instances),
    )
}

pub fn check_related(cfg: &SuiteConfig, exec: Exec) -> CriterionReport {
    let start = Instant::now();
    let cat = catalog(cfg.catalog_jobs, cfg.catalog_max_period);
    let budget = cfg.budget;
    let results = exec.map(&cat, |ps| -> std::result::Result<bool, String> {
        let inst = int_instance(ps);
        let exact = solve_periods(ps, budget).map_err(|e| e.to_string())?;
        let bgt = red_bgt(&inst).map_err(|e| e.to_string())?;
        let found = brute_force_bgt(&bgt, budget).map_err(|e| format!("{ps:?}: {e}"))?;
        if found.is_some() != exact.is_schedulable() {
            return Err(format!(
                "{ps:?}: BGT threshold disagrees with schedulability"
            ));
        }
        if let ExactVerdict::Schedulable(s) = &exact {
            if !bgt_objective(&bgt, s)
                .map_err(|e| e.to_string())?
                .at_most(&bgt.k)
            {
                return Err(format!("{ps:?}: schedule exceeds the BGT threshold"));
            }
        }
        if inst.density() != Rational::one() {
            return Ok(false);
        }
        let ri = red_rs(&inst).map_err(|e| e.to_string())?;
        let lcm = ps.iter().fold(1u64, |a, &p| a.lcm(&p)) as usize;
        let one = brute_force_rs_one(&ri, lcm, budget).map_err(|e| format!("{ps:?}: {e}"))?;
        if one.is_some() != exact.is_schedulable() {
            return Err(format!("{ps:?}: value 1 disagrees with schedulability"));
        }
        Ok(true)
    });
    let dense = results.iter().filter(|r| matches!(r, Ok(true))).count();
    report(
        9,
        "BGT and recurrent-scheduling equivalences",
        start,
        errors(results),
        format!("{} instances, {dense} dense", cat.len()),
    )
}

pub fn check_concise(cfg: &SuiteConfig, exec: Exec) -> CriterionReport {
    let start = Instant::now();
    let seed = cfg.seed;
    let results = exec.map_range(cfg.concise_formulas, |k| {
        let n = 3 + k % 4;
        let m = 1 + (k * 7) % (2 * n);
        let f = gen_random_3sat(n, m, seed.wrapping_add(k as u64)).map_err(|e| e.to_string())?;
        let c = red_concise(&f).map_err(|e| e.to_string())?;
        let tag = format!("n={n} m={m}");
        if c.tagged.density() != Rational::one() {
            return Err(format!("{tag}: density {}", c.tagged.density()));
        }
        if !c.tagged.instance.is_integral() || c.tagged.instance.integer_groups().is_err() {
            return Err(format!("{tag}: non-integral periods"));
        }
        // padding recomputed from the exact reduction
        let base = red_eps(&f).map_err(|e| e.to_string())?;
        let groups = base.instance.integer_groups().map_err(|e| e.to_string())?;
        let used: BigUint = groups.iter().map(|(p, cnt)| cnt * (&c.lcm / p)).sum();
        if &used + &c.added != c.lcm {
            return Err(format!("{tag}: padding count mismatch"));
        }
        Ok(())
    });
    report(
        10,
        "concise reduction is dense",
        start,
        errors(results),
        format!("{} formulas", cfg.concise_formulas),
    )
}

fn is_prime(p: u64) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

pub fn check_primes(cfg: &SuiteConfig, _exec: Exec) -> CriterionReport {
    let start = Instant::now();
    let mut failures = Vec::new();
    for v in 3u64..=8 {
        let count = (v + 1..=v * v * v).filter(|&p| is_prime(p)).count() as u64;
        if count < 2 * v {
            failures.push(format!("v={v}: {count} primes"));
        }
    }
    let mut reps_checked = 0usize;
    match formula_corpus(cfg.formulas, cfg.seed) {
        Ok(corpus) => {
            for f in &corpus {
                let reps = LiteralReps::new(f);
                let v = reps.v;
                for var in 1..=f.num_vars as i32 {
                    for l in [var, -var] {
                        let p = reps.rep1(l);
                        reps_checked += 1;
                        if p <= v || p > v * v * v || !is_prime(p) {
                            failures.push(format!("v={v}: rep1({l}) = {p}"));
                        }
                    }
                }
            }
        }
        Err(e) => failures.push(e.to_string()),
    }
    report(
        11,
        "prime bounds",
        start,
        failures,
        format!("v in 3..=8, {reps_checked} representatives"),
    )
}

pub type Criterion = fn(&SuiteConfig, Exec) -> CriterionReport;

/// Every criterion in order.
pub const CRITERIA: [Criterion; 11] = [
    check_exact_catalog,
    check_ps_density,
    check_witnesses,
    check_allowed_periods,
    check_greedy,
    check_ptas,
    check_fold,
    check_density_half,
    check_related,
    check_concise,
    check_primes,
];

pub fn run_suite(cfg: &SuiteConfig, exec: Exec) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| c(cfg, exec)).collect()
}
