//! Folding long periods into short ones, unfolding schedules back, and the fold-based
//! schedulers for low-density and long-period instances.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_integer::Roots;
use num_traits::{ToPrimitive, Zero};

use crate::instance::{Job, PinwheelInstance};
use crate::num::{fmt_rational, rat, rat_int, Rational};
use crate::repr::{Directive, ScheduleRepr};
use crate::schedule::{Schedule, Slot, Validity};
use crate::{Error, Result};

/// Largest represented period validated exactly instead of on a window.
pub const EXACT_PERIOD_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldResult {
    /// Folded jobs as `(id, period)`.
    pub jobs: Vec<(usize, Rational)>,
    /// Merge and substitution records in the order they were performed.
    pub directives: Vec<Directive>,
    /// Smallest id not used by the input or the fold.
    pub next_id: usize,
}

impl FoldResult {
    pub fn folded(&self) -> PinwheelInstance {
        PinwheelInstance::new(self.jobs.iter().map(|(_, p)| Job::new(p.clone())).collect())
            .expect("folded periods stay at least 1")
    }

    pub fn density(&self) -> Rational {
        self.jobs
            .iter()
            .fold(Rational::zero(), |acc, (_, p)| acc + p.recip())
    }
}

/// Folds the multiplicity-expanded jobs of `inst`, identified as `0..N`.
pub fn fold(inst: &PinwheelInstance, theta: &Rational) -> Result<FoldResult> {
    let periods = inst.expanded_periods()?;
    let n = periods.len();
    fold_jobs(periods.into_iter().enumerate().collect(), theta, n)
}

/// While some period exceeds `θ`: the two longest jobs merge into one of half the shorter
/// period when both exceed `θ`, otherwise the longest is replaced by a job of period `θ`.
/// Ties go to the lowest id; new jobs take ids from `next_id` upwards.
pub fn fold_jobs(
    jobs: Vec<(usize, Rational)>,
    theta: &Rational,
    next_id: usize,
) -> Result<FoldResult> {
    if *theta <= Rational::zero() {
        return Err(Error::InvalidInstance(format!(
            "fold threshold {} not positive",
            fmt_rational(theta)
        )));
    }
    let mut heap: BinaryHeap<(Rational, Reverse<usize>)> =
        jobs.into_iter().map(|(id, p)| (p, Reverse(id))).collect();
    let mut directives = Vec::new();
    let mut next = next_id;
    while let Some((a, Reverse(ida))) = heap.pop() {
        if a <= *theta {
            heap.push((a, Reverse(ida)));
            break;
        }
        let fresh = next;
        next += 1;
        match heap.peek() {
            Some((b, _)) if b > theta => {
                let (b, Reverse(idb)) = heap.pop().expect("peeked");
                heap.push((b / rat(2, 1), Reverse(fresh)));
                directives.push(Directive::FoldMerge {
                    merged: fresh,
                    a: ida,
                    b: idb,
                });
            }
            _ => {
                heap.push((theta.clone(), Reverse(fresh)));
                directives.push(Directive::FoldMonotone {
                    new: fresh,
                    old: ida,
                });
            }
        }
    }
    let mut jobs: Vec<(usize, Rational)> =
        heap.into_iter().map(|(p, Reverse(id))| (id, p)).collect();
    jobs.sort_by_key(|(id, _)| *id);
    Ok(FoldResult {
        jobs,
        directives,
        next_id: next,
    })
}

/// Turns a schedule of the folded jobs into one of the original jobs.
pub fn unfold_schedule(repr: ScheduleRepr, fold: &FoldResult) -> Result<ScheduleRepr> {
    let mut out = repr;
    out.directives.extend(fold.directives.iter().rev().cloned());
    out.final_ids()
        .map_err(|e| Error::MalformedRepr(format!("schedule does not match the fold: {e}")))?;
    Ok(out)
}

/// Deals the occurrences of `job` round-robin to `new_ids`.
pub fn partition_substitute(
    repr: ScheduleRepr,
    job: usize,
    new_ids: Vec<usize>,
) -> Result<ScheduleRepr> {
    let ids = repr.final_ids()?;
    if !ids.contains(&job) {
        return Err(Error::JobAbsent(job));
    }
    let out = repr.with(Directive::Partition { job, into: new_ids });
    out.final_ids()?;
    Ok(out)
}

/// Validates a represented schedule against an instance: exactly over one period when the
/// period is at most [`EXACT_PERIOD_LIMIT`], otherwise on the window `[0, window)`.
pub fn validate_repr(
    inst: &PinwheelInstance,
    repr: &ScheduleRepr,
    window: u64,
) -> Result<Validity> {
    let periods = inst.expanded_periods()?;
    repr.validate(&periods, window, EXACT_PERIOD_LIMIT)
}

/// Schedules any instance of density at most 1/2: folding at 2 leaves at most one job,
/// which runs every slot.
pub fn schedule_density_half(inst: &PinwheelInstance) -> Result<ScheduleRepr> {
    let d = inst.density();
    if d > rat(1, 2) {
        return Err(Error::DensityTooHigh {
            density: fmt_rational(&d),
            bound: "1/2".into(),
        });
    }
    let f = fold(inst, &rat(2, 1))?;
    let base = match f.jobs.as_slice() {
        [] => Schedule::new(vec![Slot::Holiday])?,
        [(id, _)] => Schedule::new(vec![Slot::Job(*id)])?,
        more => {
            return Err(Error::ConstructionFailed {
                stage: "density-half fold",
                msg: format!("{} jobs left after folding", more.len()),
            })
        }
    };
    unfold_schedule(ScheduleRepr::plain(base), &f)
}

/// A lower bound on `1 - (1 + ln 2)/(1 + √f₁) - 3/(2f₁)`, using `ln 2 < 0.6931471806` and
/// `√f₁ ≥ ⌊√f₁⌋`.
pub fn small_jobs_bound(f1: u64) -> Rational {
    let ln2_hi = Rational::new(6_931_471_806i64.into(), 10_000_000_000i64.into());
    let root = rat_int(f1.sqrt());
    rat(1, 1) - (rat(1, 1) + ln2_hi) / (rat(1, 1) + root) - rat(3, 2) / rat_int(f1)
}

/// Lane layout: jobs sorted by period rounded down to a multiple of `s`; a lane (one residue
/// class mod `s`) round-robins the next `k` jobs, where `s·k` is the rounded period of its first.
fn lane_layout(jobs: &[(usize, Rational)], s: u64) -> Option<Vec<Vec<usize>>> {
    let mut keyed: Vec<(u64, usize)> = jobs
        .iter()
        .map(|(id, p)| Some(((p / rat_int(s)).floor().to_integer().to_u64()?, *id)))
        .collect::<Option<_>>()?;
    if keyed.iter().any(|(k, _)| *k == 0) {
        return None;
    }
    keyed.sort_unstable();
    let mut lanes = Vec::new();
    let mut i = 0;
    while i < keyed.len() {
        let k = keyed[i].0 as usize;
        let end = (i + k).min(keyed.len());
        lanes.push(keyed[i..end].iter().map(|(_, id)| *id).collect());
        i = end;
        if lanes.len() as u64 > s {
            return None;
        }
    }
    Some(lanes)
}

fn lane_repr(lanes: &[Vec<usize>], s: u64, mut next_id: usize) -> Result<ScheduleRepr> {
    let mut slots = vec![Slot::Holiday; s as usize];
    let mut directives = Vec::new();
    for (lane, ids) in lanes.iter().enumerate() {
        if let [only] = ids.as_slice() {
            slots[lane] = Slot::Job(*only);
        } else {
            slots[lane] = Slot::Job(next_id);
            directives.push(Directive::Partition {
                job: next_id,
                into: ids.clone(),
            });
            next_id += 1;
        }
    }
    Ok(ScheduleRepr {
        base: Schedule::new(slots)?,
        directives,
    })
}

/// Schedules instances whose periods are all at least `f₁` and whose density is at most
/// [`small_jobs_bound`]: fold at `2f₁`, round periods down to multiples of `s ≈ √f₁`, fill
/// residue lanes mod `s` by round-robin, and unfold. The result is validated before return.
pub fn schedule_small_jobs(inst: &PinwheelInstance, f1: u64) -> Result<ScheduleRepr> {
    if f1 == 0 {
        return Err(Error::InvalidInstance("f1 must be positive".into()));
    }
    let f1_r = rat_int(f1);
    if let Some(j) = inst.jobs().iter().find(|j| j.period < f1_r) {
        return Err(Error::PreconditionViolated(format!(
            "period {} below f1 = {f1}",
            fmt_rational(&j.period)
        )));
    }
    let d = inst.density();
    let bound = small_jobs_bound(f1);
    if d > bound {
        return Err(Error::DensityTooHigh {
            density: fmt_rational(&d),
            bound: fmt_rational(&bound),
        });
    }
    let folded = fold(inst, &(rat_int(2u64) * &f1_r))?;
    let r = f1.sqrt().max(1);
    let mut candidates = vec![r, r * 3 / 4, r / 2, r * 3 / 2, r * 2];
    candidates.retain(|&s| s >= 1 && s <= f1);
    candidates.dedup();
    let lanes = candidates
        .iter()
        .find_map(|&s| lane_layout(&folded.jobs, s).map(|l| (s, l)));
    let Some((s, lanes)) = lanes else {
        return Err(Error::ConstructionFailed {
            stage: "small jobs lanes",
            msg: format!("{} folded jobs do not fit in the lanes", folded.jobs.len()),
        });
    };
    let repr = unfold_schedule(lane_repr(&lanes, s, folded.next_id)?, &folded)?;
    let window = small_jobs_window(inst, f1);
    match validate_repr(inst, &repr, window)? {
        Validity::Valid => Ok(repr),
        Validity::Violation { job, start, len } => Err(Error::ConstructionFailed {
            stage: "small jobs validation",
            msg: format!("job {} underserved in [{start}, {})", job + 1, start + len),
        }),
    }
}

fn small_jobs_window(inst: &PinwheelInstance, f1: u64) -> u64 {
    let longest = inst
        .jobs()
        .iter()
        .map(|j| j.period.ceil().to_integer().to_u64().unwrap_or(u64::MAX))
        .max()
        .unwrap_or(1);
    (8 * 2 * f1).max(4 * longest.min(1 << 20)).min(1 << 22)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::validate_window;

    fn inst(p: &[u64]) -> PinwheelInstance {
        PinwheelInstance::from_integers(p).unwrap()
    }

    #[test]
    fn fold_examples() {
        let f = fold(&inst(&[2, 3]), &rat(4, 1)).unwrap();
        assert!(f.directives.is_empty());
        assert_eq!(f.folded(), inst(&[2, 3]));
        let f = fold(&inst(&[10, 6]), &rat(4, 1)).unwrap();
        assert_eq!(f.jobs, vec![(2, rat(3, 1))]);
        assert_eq!(
            f.directives,
            vec![Directive::FoldMerge {
                merged: 2,
                a: 0,
                b: 1
            }]
        );
        let f = fold(&inst(&[5, 3]), &rat(2, 1)).unwrap();
        assert_eq!(f.jobs, vec![(2, rat(3, 2))]);
    }

    #[test]
    fn monotone_when_alone() {
        let f = fold(&inst(&[9, 2]), &rat(4, 1)).unwrap();
        assert_eq!(f.jobs, vec![(1, rat(2, 1)), (2, rat(4, 1))]);
        assert_eq!(
            f.directives,
            vec![Directive::FoldMonotone { new: 2, old: 0 }]
        );
    }

    #[test]
    fn merge_unfold_validates() {
        let a = inst(&[10, 6]);
        let f = fold(&a, &rat(4, 1)).unwrap();
        let base = Schedule::from_jobs(&[Some(2), None, None]).unwrap();
        let r = unfold_schedule(ScheduleRepr::plain(base), &f).unwrap();
        assert!(validate_repr(&a, &r, 120).unwrap().is_valid());
        let wrong = Schedule::from_jobs(&[Some(7)]).unwrap();
        assert!(unfold_schedule(ScheduleRepr::plain(wrong), &f).is_err());
    }

    #[test]
    fn density_half_examples() {
        let empty = schedule_density_half(&PinwheelInstance::empty()).unwrap();
        assert_eq!(empty.expand(0, 3).unwrap(), vec![Slot::Holiday; 3]);
        let one = schedule_density_half(&inst(&[2])).unwrap();
        assert_eq!(one.expand(0, 2).unwrap(), vec![Slot::Job(0); 2]);
        let a = inst(&[4, 8, 16]);
        let r = schedule_density_half(&a).unwrap();
        assert!(validate_repr(&a, &r, 512).unwrap().is_valid());
        assert!(schedule_density_half(&inst(&[3, 3])).is_err());
    }

    #[test]
    fn partition_examples() {
        let two = ScheduleRepr::plain(Schedule::from_jobs(&[Some(0), None]).unwrap());
        let same = partition_substitute(two.clone(), 0, vec![1]).unwrap();
        assert_eq!(
            relabel(&same.expand(0, 8).unwrap()),
            relabel(&two.expand(0, 8).unwrap())
                .iter()
                .map(|s| match s {
                    Slot::Job(_) => Slot::Job(0),
                    h => *h,
                })
                .collect::<Vec<_>>()
        );
        let r = partition_substitute(two.clone(), 0, vec![1, 2]).unwrap();
        let w = relabel(&r.expand(0, 16).unwrap());
        assert_eq!(
            &w[..4],
            &[Slot::Job(0), Slot::Holiday, Slot::Job(1), Slot::Holiday]
        );
        assert!(validate_window(&[rat(4, 1), rat(4, 1)], &w)
            .unwrap()
            .is_valid());
        let three = ScheduleRepr::plain(Schedule::from_jobs(&[Some(0), None, None]).unwrap());
        let r3 = partition_substitute(three, 0, vec![1, 2, 3]).unwrap();
        let w = relabel(&r3.expand(0, 36).unwrap());
        assert!(validate_window(&vec![rat(9, 1); 3], &w).unwrap().is_valid());
        assert_eq!(
            partition_substitute(two, 5, vec![6]),
            Err(Error::JobAbsent(5))
        );
    }

    /// Shifts ids down by one so partition outputs `1..` index a period list.
    fn relabel(slots: &[Slot]) -> Vec<Slot> {
        slots
            .iter()
            .map(|s| match s {
                Slot::Job(j) => Slot::Job(j.saturating_sub(1)),
                Slot::Holiday => Slot::Holiday,
            })
            .collect()
    }

    #[test]
    fn small_jobs_single_and_chain() {
        let f1 = 64;
        let r = schedule_small_jobs(&inst(&[100]), f1).unwrap();
        assert!(validate_repr(&inst(&[100]), &r, 1000).unwrap().is_valid());
        let chain: Vec<u64> = vec![64, 128, 128, 256, 256, 256, 512];
        let a = inst(&chain);
        assert!(a.density() <= small_jobs_bound(f1));
        let r = schedule_small_jobs(&a, f1).unwrap();
        assert!(validate_repr(&a, &r, 4096).unwrap().is_valid());
    }

    #[test]
    fn small_jobs_rejects_dense_input() {
        assert!(matches!(
            schedule_small_jobs(&inst(&[64; 60]), 64),
            Err(Error::DensityTooHigh { .. })
        ));
        assert!(matches!(
            schedule_small_jobs(&inst(&[10]), 64),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
