//! The (1+ε)-approximate decision procedure and its constructive schedule pipeline.
//!
//! Jobs are split by a window search into big (period ≤ ℓ), medium (ℓ < period < u) and small
//! (period ≥ u). The big jobs are decided exactly through the largest holiday fraction of
//! their state graph; when that fraction covers the rest of the density, the remaining jobs
//! fit into the holidays after stretching every period by `1+ε`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::exact::{max_holiday_cycle, STATE_BUDGET};
use crate::exec::Exec;
use crate::fold::{fold_jobs, schedule_small_jobs, FoldResult, EXACT_PERIOD_LIMIT};
use crate::instance::{Job, PinwheelInstance};
use crate::num::{as_biguint, fmt_rational, rat, rat_big, rat_int, Rational};
use crate::repr::{Directive, ScheduleRepr};
use crate::schedule::{validate_periodic, Schedule, Slot, Validity};
use crate::{Error, Result};

/// Window search outcome. A bound of `None` lies above every period of the instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PtasParams {
    pub eps: Rational,
    pub n: u64,
    pub l: Option<BigUint>,
    pub u: Option<BigUint>,
    pub iterations: u64,
}

/// Multiplicity-expanded job ids by class.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct JobClassification {
    pub big: Vec<usize>,
    pub medium: Vec<usize>,
    pub small: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MediumCase {
    None,
    EverySecondHoliday,
    EveryHoliday,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    pub repr: ScheduleRepr,
    pub len_s1: u64,
    pub len_s3: u64,
    pub case: MediumCase,
    pub h_s4: Rational,
    pub small_density: Option<Rational>,
    pub window: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PtasVerdict {
    Unschedulable,
    /// `A(1+ε)` is schedulable; the schedule is present when construction was requested.
    Schedulable(Option<Box<Construction>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PtasOutcome {
    pub params: Option<PtasParams>,
    pub classes: JobClassification,
    pub h_max: Option<Rational>,
    pub d_not_big: Option<Rational>,
    pub verdict: PtasVerdict,
}

fn check_eps(eps: &Rational) -> Result<(u64, Rational)> {
    if *eps <= Rational::zero() || *eps >= rat(2, 7) {
        return Err(Error::EpsOutOfRange(fmt_rational(eps)));
    }
    let n = eps
        .recip()
        .ceil()
        .to_integer()
        .to_u64()
        .expect("1/ε < 4 fits");
    Ok((n, rat(1, n as i64)))
}

/// `16 n² ℓ^ℓ`, or `None` when it certainly exceeds `max_period`.
fn next_bound(n: u64, l: &BigUint, max_period: &Rational) -> Option<BigUint> {
    let cap_bits = max_period.ceil().to_integer().bits() + 64;
    let l_small = l.to_u64()?;
    if (l.bits()).saturating_sub(1).saturating_mul(l_small) > cap_bits {
        return None;
    }
    Some(BigUint::from(16 * n * n) * num_traits::pow(l.clone(), l_small as usize))
}

fn in_open(p: &Rational, lo: &Option<BigUint>, hi: &Option<BigUint>) -> bool {
    let above = match lo {
        Some(l) => *p > rat_big(l, &BigUint::one()),
        None => false,
    };
    let below = match hi {
        Some(u) => *p < rat_big(u, &BigUint::one()),
        None => true,
    };
    above && below
}

/// The window search: grows `[ℓ, u]` until the jobs strictly between carry density at most
/// `1/(2(n+1))`, then classifies every job.
pub fn classify(periods: &[Rational], n: u64) -> Result<(PtasParams, JobClassification)> {
    let max_period = periods.iter().max().cloned().unwrap_or_else(|| rat(1, 1));
    let threshold = rat(1, 2 * (n as i64 + 1));
    let mut l = Some(BigUint::from(n));
    let mut iterations = 0u64;
    let u = loop {
        iterations += 1;
        if iterations > 2 * (n + 1) {
            return Err(Error::ConstructionFailed {
                stage: "window search",
                msg: format!("more than {} iterations", 2 * (n + 1)),
            });
        }
        let u = l.as_ref().and_then(|l| next_bound(n, l, &max_period));
        let d_mid = periods
            .iter()
            .filter(|p| l.is_some() && in_open(p, &l, &u))
            .fold(Rational::zero(), |acc, p| acc + p.recip());
        if d_mid <= threshold {
            break u;
        }
        l = u;
    };
    let mut classes = JobClassification::default();
    for (id, p) in periods.iter().enumerate() {
        let big = match &l {
            Some(l) => *p <= rat_big(l, &BigUint::one()),
            None => true,
        };
        if big {
            classes.big.push(id);
        } else if in_open(p, &l, &u) {
            classes.medium.push(id);
        } else {
            classes.small.push(id);
        }
    }
    Ok((
        PtasParams {
            eps: rat(1, n as i64),
            n,
            l,
            u,
            iterations,
        },
        classes,
    ))
}

fn density_of(periods: &[Rational], ids: &[usize]) -> Rational {
    ids.iter()
        .fold(Rational::zero(), |acc, &i| acc + periods[i].recip())
}

/// Decides whether `A` is unschedulable or `A(1+ε)` is schedulable, optionally building a
/// validated schedule for the latter.
pub fn decide(inst: &PinwheelInstance, eps: &Rational, construct: bool) -> Result<PtasOutcome> {
    let (n, eps_n) = check_eps(eps)?;
    if !inst.is_integral() {
        return Err(Error::InvalidInstance(
            "the approximation scheme takes integer periods".into(),
        ));
    }
    if inst.density() > rat(1, 1) {
        return Ok(PtasOutcome {
            params: None,
            classes: JobClassification::default(),
            h_max: None,
            d_not_big: None,
            verdict: PtasVerdict::Unschedulable,
        });
    }
    let periods = inst.expanded_periods()?;
    let (params, classes) = classify(&periods, n)?;
    let big: Vec<u64> = classes
        .big
        .iter()
        .map(|&i| {
            periods[i]
                .to_integer()
                .to_u64()
                .expect("big periods are at most ℓ")
        })
        .collect();
    let d_not_big = density_of(&periods, &classes.medium) + density_of(&periods, &classes.small);
    let (h_max, cycle) = match max_holiday_cycle(&big, STATE_BUDGET, Exec::auto()) {
        Ok(x) => x,
        Err(Error::NoCycle) => {
            return Ok(PtasOutcome {
                params: Some(params),
                classes,
                h_max: None,
                d_not_big: Some(d_not_big),
                verdict: PtasVerdict::Unschedulable,
            })
        }
        Err(e) => return Err(e),
    };
    let verdict = if h_max < d_not_big {
        PtasVerdict::Unschedulable
    } else if construct {
        let global = relabel_cycle(&cycle, &classes.big)?;
        PtasVerdict::Schedulable(Some(Box::new(build(
            &periods, &eps_n, n, &classes, &h_max, &global,
        )?)))
    } else {
        PtasVerdict::Schedulable(None)
    };
    Ok(PtasOutcome {
        params: Some(params),
        classes,
        h_max: Some(h_max),
        d_not_big: Some(d_not_big),
        verdict,
    })
}

fn relabel_cycle(cycle: &Schedule, big: &[usize]) -> Result<Schedule> {
    Schedule::new(
        cycle
            .slots()
            .iter()
            .map(|s| match s {
                Slot::Job(j) => Slot::Job(big[*j]),
                Slot::Holiday => Slot::Holiday,
            })
            .collect(),
    )
}

/// Builds the schedule for `A(1+ε)` from a cycle of the big jobs (global ids) attaining the
/// largest holiday fraction.
pub fn construct_schedule(
    inst: &PinwheelInstance,
    eps: &Rational,
    h_max_cycle: &Schedule,
) -> Result<Construction> {
    let (n, eps_n) = check_eps(eps)?;
    let periods = inst.expanded_periods()?;
    let (_, classes) = classify(&periods, n)?;
    let h_max = rat(h_max_cycle.holidays() as i64, h_max_cycle.period() as i64);
    build(&periods, &eps_n, n, &classes, &h_max, h_max_cycle)
}

fn fail(stage: &'static str, msg: String) -> Error {
    Error::ConstructionFailed { stage, msg }
}

fn build(
    periods: &[Rational],
    eps: &Rational,
    n: u64,
    classes: &JobClassification,
    h_max: &Rational,
    s1: &Schedule,
) -> Result<Construction> {
    let one = rat(1, 1);
    let stretch = &one + eps;
    let len_s1 = s1.period() as u64;

    // S2 repeats S1 n times; S3 inserts a holiday after every n slots of S2
    let mut s3 = Vec::with_capacity(((n + 1) * len_s1) as usize);
    let mut inserted = Vec::new();
    for (k, slot) in (0..n).flat_map(|_| s1.slots().iter().copied()).enumerate() {
        s3.push(slot);
        if (k as u64 + 1) % n == 0 {
            inserted.push(s3.len());
            s3.push(Slot::Holiday);
        }
    }
    let len_s3 = s3.len() as u64;
    let s3_sched = Schedule::new(s3.clone())?;
    let big_scaled: Vec<Rational> = periods
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if classes.big.contains(&i) {
                p * &stretch
            } else {
                // jobs outside A_big do not occur in S3; a period beyond its length is never checked
                rat_int(u64::MAX)
            }
        })
        .collect();
    if let Validity::Violation { job, .. } = validate_periodic(&big_scaled, &s3_sched)? {
        if classes.big.contains(&job) {
            return Err(fail(
                "S3 insertion",
                format!("big job {} violated after insertion", job + 1),
            ));
        }
    }
    let h_s3 = rat(s3_sched.holidays() as i64, len_s3 as i64);
    let expect_h_s3 = h_max / &stretch + eps / &stretch;
    if h_s3 != expect_h_s3 {
        return Err(fail(
            "S3 insertion",
            format!(
                "holiday fraction {} differs from {}",
                fmt_rational(&h_s3),
                fmt_rational(&expect_h_s3)
            ),
        ));
    }

    // S4: the folded medium job takes every (second) inserted holiday of S3 repeated twice
    let n1 = n as i64 + 1;
    let d_medium = density_of(periods, &classes.medium);
    let (case, theta, step) = if classes.medium.is_empty() {
        (MediumCase::None, None, 0usize)
    } else if d_medium <= rat(1, 4 * n1) {
        (MediumCase::EverySecondHoliday, Some(rat(4 * n1, 1)), 2)
    } else if d_medium <= rat(1, 2 * n1) {
        (MediumCase::EveryHoliday, Some(rat(2 * n1, 1)), 1)
    } else {
        return Err(fail(
            "medium fold",
            format!("medium density {}", fmt_rational(&d_medium)),
        ));
    };
    let mut base = s3.clone();
    base.extend_from_slice(&s3);
    let all_inserted: Vec<usize> = inserted
        .iter()
        .copied()
        .chain(inserted.iter().map(|&p| p + len_s3 as usize))
        .collect();
    let mut next_id = periods.len();
    let mut medium_fold: Option<FoldResult> = None;
    if let Some(theta) = &theta {
        let jobs = classes
            .medium
            .iter()
            .map(|&i| (i, periods[i].clone()))
            .collect();
        let f = fold_jobs(jobs, theta, next_id)?;
        let [(m, _)] = f.jobs.as_slice() else {
            return Err(fail(
                "medium fold",
                format!("{} jobs left after folding", f.jobs.len()),
            ));
        };
        for (k, &pos) in all_inserted.iter().enumerate() {
            if k % step == 0 {
                base[pos] = Slot::Job(*m);
            }
        }
        next_id = f.next_id;
        medium_fold = Some(f);
    }
    let holidays_s4 = base.iter().filter(|s| **s == Slot::Holiday).count() as u64;
    let h_s4 = rat(holidays_s4 as i64, 2 * len_s3 as i64);
    let expect_h_s4 = match case {
        MediumCase::None => h_s3.clone(),
        MediumCase::EverySecondHoliday => &h_s3 - rat(1, 2 * n1),
        MediumCase::EveryHoliday => &h_s3 - rat(1, n1),
    };
    if h_s4 != expect_h_s4 {
        return Err(fail(
            "medium fold",
            format!("holiday fraction {} of S4", fmt_rational(&h_s4)),
        ));
    }
    let mut repr = ScheduleRepr::plain(Schedule::new(base)?);
    if let Some(f) = &medium_fold {
        repr.directives.extend(f.directives.iter().rev().cloned());
    }

    // small jobs: stretch, round down to multiples of 2·len(S3), shrink by h(S4)
    let d_small = density_of(periods, &classes.small);
    let bound = &one + rat(3, 4) * eps;
    if !classes.small.is_empty() && d_small > &h_s4 * &bound {
        return Err(fail(
            "small rescale",
            format!(
                "small density {} exceeds h(S4)(1+3ε/4)",
                fmt_rational(&d_small)
            ),
        ));
    }
    let mut small_density = None;
    if !classes.small.is_empty() {
        let two_len = BigUint::from(2 * len_s3);
        let mut small4 = Vec::with_capacity(classes.small.len());
        for &i in &classes.small {
            let stretched = &periods[i] * &stretch;
            let k = (stretched / rat_big(&two_len, &BigUint::one()))
                .floor()
                .to_integer();
            let k = k.to_biguint().filter(|k| !k.is_zero()).ok_or_else(|| {
                fail(
                    "small rescale",
                    format!("job {} shorter than 2·len(S3)", i + 1),
                )
            })?;
            // ⌊·⌋·2len(S3)·h(S4) = ⌊·⌋·holidays(S4)
            let p4 = rat_big(&(k * holidays_s4), &BigUint::one());
            if !p4.is_integer() {
                return Err(fail("small rescale", "non-integral period".into()));
            }
            small4.push(Job::new(p4));
        }
        let a4 = PinwheelInstance::new(small4)?;
        let d4 = a4.density();
        if d4 > &one - rat(13, 160) * eps {
            return Err(fail(
                "small rescale",
                format!("D(A_small,4) = {}", fmt_rational(&d4)),
            ));
        }
        let f1 = a4
            .jobs()
            .iter()
            .map(|j| as_biguint(&j.period).expect("integral"))
            .min()
            .expect("non-empty")
            .to_u64()
            .ok_or_else(|| fail("small rescale", "smallest period beyond 64 bits".into()))?;
        let s5 = schedule_small_jobs(&a4, f1).map_err(|e| fail("small schedule", e.to_string()))?;
        let k = classes.small.len();
        let small_ids = classes.small.clone();
        let shift = next_id;
        let s5 = s5.remap_ids(&move |x| if x < k { small_ids[x] } else { shift + x });
        repr = repr.with(Directive::PlaceInHolidays {
            inner: Box::new(s5),
        });
        small_density = Some(d4);
    }

    let target: Vec<Rational> = periods.iter().map(|p| p * &stretch).collect();
    let longest = target
        .iter()
        .map(|p| p.ceil().to_integer().to_u64().unwrap_or(u64::MAX))
        .max()
        .unwrap_or(1);
    let window = (8 * len_s3)
        .max(4 * longest.min(1 << 20))
        .min(1 << 22)
        .max(8 * len_s3);
    match repr.validate(&target, window, EXACT_PERIOD_LIMIT)? {
        Validity::Valid => {}
        Validity::Violation { job, start, len } => {
            return Err(fail(
                "placement",
                format!("job {} underserved in [{start}, {})", job + 1, start + len),
            ))
        }
    }
    Ok(Construction {
        repr,
        len_s1,
        len_s3,
        case,
        h_s4,
        small_density,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(p: &[u64]) -> PinwheelInstance {
        PinwheelInstance::from_integers(p).unwrap()
    }

    #[test]
    fn eps_range() {
        assert!(matches!(
            decide(&inst(&[2]), &rat(2, 7), false),
            Err(Error::EpsOutOfRange(_))
        ));
        assert!(matches!(
            decide(&inst(&[2]), &rat(0, 1), false),
            Err(Error::EpsOutOfRange(_))
        ));
    }

    #[test]
    fn overfull_is_unschedulable() {
        let o = decide(&inst(&[2, 2, 2]), &rat(1, 4), true).unwrap();
        assert_eq!(o.verdict, PtasVerdict::Unschedulable);
    }

    #[test]
    fn single_job_trace() {
        let o = decide(&inst(&[2]), &rat(1, 4), true).unwrap();
        let p = o.params.unwrap();
        assert_eq!(p.l, Some(BigUint::from(4u32)));
        assert!(o.classes.medium.is_empty());
        assert_eq!(o.h_max, Some(rat(1, 2)));
        match o.verdict {
            PtasVerdict::Schedulable(Some(c)) => {
                assert_eq!(c.case, MediumCase::None);
                assert_eq!(c.h_s4, rat(1, 2) / rat(5, 4) + rat(1, 4) / rat(5, 4));
                let target = vec![rat(5, 2)];
                assert!(c
                    .repr
                    .validate(&target, 8 * c.len_s3, 1 << 20)
                    .unwrap()
                    .is_valid());
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn saturated_big_jobs_block_medium_job() {
        let o = decide(&inst(&[2, 3, 100]), &rat(1, 4), false).unwrap();
        assert_eq!(o.classes.medium, vec![2]);
        assert_eq!(o.h_max, Some(rat(0, 1)));
        assert_eq!(o.verdict, PtasVerdict::Unschedulable);
    }

    #[test]
    fn medium_and_small_jobs_fit() {
        // ℓ = 4, u = 65536: 16 is medium, 200000 and 300000 are small
        let a = inst(&[2, 16, 200_000, 300_000]);
        let o = decide(&a, &rat(1, 4), true).unwrap();
        assert_eq!(o.classes.medium, vec![1]);
        assert_eq!(o.classes.small, vec![2, 3]);
        match o.verdict {
            PtasVerdict::Schedulable(Some(c)) => {
                assert_eq!(c.case, MediumCase::EveryHoliday);
                assert!(c.small_density.is_some());
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn window_search_skips_dense_band() {
        // 5 and 6 put density 11/30 > 1/10 into (4, 65536); everything becomes big
        let o = decide(&inst(&[5, 6]), &rat(1, 4), true).unwrap();
        assert_eq!(o.params.as_ref().unwrap().iterations, 2);
        assert_eq!(o.classes.big, vec![0, 1]);
        assert!(matches!(o.verdict, PtasVerdict::Schedulable(Some(_))));
    }
}
