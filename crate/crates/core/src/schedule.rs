//! Periodic schedules and the ground-truth validity checks.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::instance::PinwheelInstance;
use crate::num::Rational;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    Holiday,
    Job(usize),
}

impl Slot {
    pub fn job(self) -> Option<usize> {
        match self {
            Slot::Job(j) => Some(j),
            Slot::Holiday => None,
        }
    }
}

/// One period of a periodic schedule. Job ids index the multiplicity-expanded job list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    slots: Vec<Slot>,
}

impl Schedule {
    pub fn new(slots: Vec<Slot>) -> Result<Self> {
        if slots.is_empty() {
            return Err(Error::InvalidSchedule("period must be at least 1".into()));
        }
        Ok(Schedule { slots })
    }

    pub fn from_jobs(jobs: &[Option<usize>]) -> Result<Self> {
        Self::new(
            jobs.iter()
                .map(|j| j.map_or(Slot::Holiday, Slot::Job))
                .collect(),
        )
    }

    pub fn period(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn at(&self, t: u64) -> Slot {
        self.slots[(t % self.slots.len() as u64) as usize]
    }

    pub fn holidays(&self) -> usize {
        self.slots.iter().filter(|s| **s == Slot::Holiday).count()
    }

    pub fn max_job(&self) -> Option<usize> {
        self.slots.iter().filter_map(|s| s.job()).max()
    }

    /// Parses `period: p` followed by `slots: ...` with 1-based job numbers and `-` for holidays.
    pub fn parse(text: &str) -> Result<Self> {
        let mut period = None;
        let mut slots = None;
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: idx + 1, msg };
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| err(format!("expected key: value, found {line:?}")))?;
            match key.trim() {
                "period" => {
                    period = Some(
                        value
                            .trim()
                            .parse::<usize>()
                            .map_err(|_| err(format!("bad period {value:?}")))?,
                    )
                }
                "slots" => {
                    let mut v = Vec::new();
                    for tok in value.split_whitespace() {
                        if tok == "-" {
                            v.push(Slot::Holiday);
                        } else {
                            let j: usize =
                                tok.parse().map_err(|_| err(format!("bad slot {tok:?}")))?;
                            if j == 0 {
                                return Err(err("job numbers start at 1".into()));
                            }
                            v.push(Slot::Job(j - 1));
                        }
                    }
                    slots = Some(v);
                }
                _ => {}
            }
        }
        let slots = slots.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing slots".into(),
        })?;
        if let Some(p) = period {
            if p != slots.len() {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("period {p} but {} slots", slots.len()),
                });
            }
        }
        Self::new(slots)
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "period: {}", self.slots.len())?;
        write!(f, "slots:")?;
        for s in &self.slots {
            match s {
                Slot::Holiday => write!(f, " -")?,
                Slot::Job(j) => write!(f, " {}", j + 1)?,
            }
        }
        writeln!(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// Job `job` (0-based, multiplicity-expanded) occurs too rarely in `[start, start + len)`.
    Violation {
        job: usize,
        start: u64,
        len: u64,
    },
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

fn positions(slots: &[Slot], jobs: usize) -> Result<Vec<Vec<u64>>> {
    let mut pos = vec![Vec::new(); jobs];
    for (t, s) in slots.iter().enumerate() {
        if let Slot::Job(j) = s {
            pos.get_mut(*j)
                .ok_or_else(|| {
                    Error::InvalidSchedule(format!("slot {t} references job {} of {jobs}", j + 1))
                })?
                .push(t as u64);
        }
    }
    Ok(pos)
}

/// Largest value of `(q_{j'} - q_j)·den - (j' - j)·num` over `j < j'`, with its argmax pair.
/// A value `>= den` means the window strictly between the two occurrences is too long.
fn worst_span<T>(q: &[i128], first_index: i128, num: &T, den: &T) -> Option<(T, usize, usize)>
where
    T: Clone
        + PartialOrd
        + From<i64>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + TryFrom<i128>,
{
    let conv = |x: i128| T::try_from(x).ok();
    let mut best: Option<(T, usize, usize)> = None;
    let mut min: Option<(T, usize)> = None;
    for (k, &qk) in q.iter().enumerate() {
        let idx = conv(first_index + k as i128)?;
        let phi = conv(qk)? * den.clone() - idx * num.clone();
        if let Some((m, at)) = &min {
            let diff = phi.clone() - m.clone();
            if best.as_ref().map_or(true, |(b, _, _)| diff > *b) {
                best = Some((diff, *at, k));
            }
        }
        if min.as_ref().map_or(true, |(m, _)| phi < *m) {
            min = Some((phi, k));
        }
    }
    best
}

enum SpanCheck {
    Ok,
    Bad(usize, usize),
}

fn span_check(q: &[i128], first_index: i128, period: &Rational) -> SpanCheck {
    let (num, den) = (period.numer(), period.denom());
    let small = num.to_i64().zip(den.to_i64());
    let res = match small {
        Some((n, d)) if q.iter().all(|x| x.unsigned_abs() < (1u128 << 60)) && d < (1 << 40) => {
            worst_span::<i128>(q, first_index, &(n as i128), &(d as i128))
                .map(|(v, a, b)| (v >= d as i128, a, b))
        }
        _ => worst_span::<BigInt>(q, first_index, num, den).map(|(v, a, b)| (v >= *den, a, b)),
    };
    match res {
        Some((true, a, b)) => SpanCheck::Bad(a, b),
        _ => SpanCheck::Ok,
    }
}

/// Validates one period of a periodic schedule against the counting criterion: every window
/// of length `L` holds at least `⌊L/a_i⌋` occurrences of job `i`.
///
/// Exact for rational periods: the long-run rate `c_i·a_i ≥ p` plus all windows shorter than
/// two periods, scanned in linear time per job.
pub fn validate_schedule(inst: &PinwheelInstance, sched: &Schedule) -> Result<Validity> {
    let periods = inst.expanded_periods()?;
    validate_periodic(&periods, sched)
}

pub fn validate_periodic(periods: &[Rational], sched: &Schedule) -> Result<Validity> {
    let p = sched.period() as u64;
    let pos = positions(sched.slots(), periods.len())?;
    for (job, (a, q)) in periods.iter().zip(&pos).enumerate() {
        let c = q.len() as u64;
        if c == 0 {
            let len = a.ceil().to_integer().to_u64().unwrap_or(u64::MAX);
            return Ok(Validity::Violation { job, start: 0, len });
        }
        let rate = Rational::from_integer(c.into()) * a;
        let p_r = Rational::from_integer(p.into());
        if rate < p_r {
            // smallest k with ⌊k·p/a⌋ > k·c
            let gap = &p_r / a - Rational::from_integer(c.into());
            let k = (Rational::from_integer(1.into()) / gap).ceil().to_integer();
            let len = (k * BigInt::from(p)).to_u64().unwrap_or(u64::MAX);
            return Ok(Validity::Violation { job, start: 0, len });
        }
        if *a > p_r {
            continue;
        }
        let unrolled: Vec<i128> = q
            .iter()
            .map(|&x| x as i128)
            .chain(q.iter().map(|&x| (x + p) as i128))
            .collect();
        if let SpanCheck::Bad(i, j) = span_check(&unrolled, 0, a) {
            let start = (unrolled[i] + 1) as u64 % p;
            let len = (unrolled[j] - unrolled[i] - 1) as u64;
            return Ok(Validity::Violation { job, start, len });
        }
    }
    Ok(Validity::Valid)
}

/// Gap criterion for integer periods: every job occurs and every cyclic gap is at most `a_i`.
pub fn validate_schedule_gaps(periods: &[u64], sched: &Schedule) -> Result<Validity> {
    let p = sched.period() as u64;
    let pos = positions(sched.slots(), periods.len())?;
    for (job, (&a, q)) in periods.iter().zip(&pos).enumerate() {
        if q.is_empty() {
            return Ok(Validity::Violation {
                job,
                start: 0,
                len: a,
            });
        }
        for (k, &t) in q.iter().enumerate() {
            let next = if k + 1 < q.len() { q[k + 1] } else { q[0] + p };
            if next - t > a {
                return Ok(Validity::Violation {
                    job,
                    start: (t + 1) % p,
                    len: next - t - 1,
                });
            }
        }
    }
    Ok(Validity::Valid)
}

/// Checks every sub-window of a finite slot sequence. Necessary for validity of any schedule
/// containing the sequence; `start` of a violation is relative to the sequence.
pub fn validate_window(periods: &[Rational], slots: &[Slot]) -> Result<Validity> {
    let w = slots.len() as i128;
    let pos = positions(slots, periods.len())?;
    for (job, (a, q)) in periods.iter().zip(&pos).enumerate() {
        if Rational::from_integer(BigInt::from(w)) < *a {
            continue;
        }
        let seq: Vec<i128> = std::iter::once(-1)
            .chain(q.iter().map(|&x| x as i128))
            .chain(std::iter::once(w))
            .collect();
        if let SpanCheck::Bad(i, j) = span_check(&seq, -1, a) {
            let start = (seq[i] + 1) as u64;
            let len = (seq[j] - seq[i] - 1) as u64;
            return Ok(Validity::Violation { job, start, len });
        }
    }
    Ok(Validity::Valid)
}

/// Occurrence count of each job in one period.
pub fn occurrence_counts(sched: &Schedule, jobs: usize) -> Vec<usize> {
    let mut c = vec![0; jobs];
    for s in sched.slots() {
        if let Slot::Job(j) = s {
            if *j < jobs {
                c[*j] += 1;
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    fn sched(s: &[Option<usize>]) -> Schedule {
        Schedule::from_jobs(s).unwrap()
    }

    #[test]
    fn spec_examples() {
        let a = PinwheelInstance::from_integers(&[2, 2]).unwrap();
        assert!(validate_schedule(&a, &sched(&[Some(0), Some(1)]))
            .unwrap()
            .is_valid());
        let b = PinwheelInstance::from_integers(&[2, 4, 4]).unwrap();
        assert!(
            validate_schedule(&b, &sched(&[Some(0), Some(1), Some(0), Some(2)]))
                .unwrap()
                .is_valid()
        );
        let c = PinwheelInstance::from_integers(&[2, 3]).unwrap();
        let v = validate_schedule(&c, &sched(&[Some(0), Some(1), None])).unwrap();
        assert!(matches!(v, Validity::Violation { job: 0, .. }));
    }

    #[test]
    fn rational_rate_violation_beyond_short_windows() {
        // once every 100 slots cannot serve a job of period 99.99 forever
        let mut slots = vec![None; 100];
        slots[0] = Some(0);
        let a = PinwheelInstance::from_periods(vec![rat(9999, 100)]).unwrap();
        let v = validate_schedule(&a, &sched(&slots)).unwrap();
        match v {
            Validity::Violation {
                job: 0,
                start: 0,
                len,
            } => assert_eq!(len, 9_999 * 100),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rational_periods_relaxed() {
        // period 3/2: at least one of every window of two, two of every window of three
        let a = PinwheelInstance::from_periods(vec![rat(3, 2)]).unwrap();
        assert!(validate_schedule(&a, &sched(&[Some(0), Some(0), None]))
            .unwrap()
            .is_valid());
        assert!(!validate_schedule(&a, &sched(&[Some(0), None]))
            .unwrap()
            .is_valid());
    }

    #[test]
    fn missing_job() {
        let a = PinwheelInstance::from_integers(&[5, 5]).unwrap();
        assert!(!validate_schedule(&a, &sched(&[Some(0)]))
            .unwrap()
            .is_valid());
        assert!(!validate_schedule_gaps(&[5, 5], &sched(&[Some(0)]))
            .unwrap()
            .is_valid());
    }

    #[test]
    fn window_check() {
        let periods = vec![rat(2, 1)];
        let ok = [Slot::Job(0), Slot::Holiday, Slot::Job(0)];
        assert!(validate_window(&periods, &ok).unwrap().is_valid());
        let bad = [Slot::Holiday, Slot::Holiday, Slot::Job(0)];
        assert!(!validate_window(&periods, &bad).unwrap().is_valid());
    }

    #[test]
    fn text_format() {
        let s = Schedule::parse("period: 4\nslots: 1 2 - 3\n").unwrap();
        assert_eq!(s.slots()[2], Slot::Holiday);
        assert_eq!(Schedule::parse(&s.to_string()).unwrap(), s);
        assert!(Schedule::parse("period: 3\nslots: 1 2\n").is_err());
    }
}
