//! Layered schedule representation: a base period plus substitution directives.
//!
//! Layer 0 is the base schedule repeated forever; layer `k` applies `directives[k-1]` to
//! layer `k-1`. Window expansion and occurrence counting never materialize more than the
//! requested window, so arbitrarily long represented periods stay cheap to inspect.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::num::Rational;
use crate::schedule::{validate_periodic, validate_window, Schedule, Slot, Validity};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Directive {
    /// Occurrences of `merged` alternate between `a` and `b`, starting with `a`.
    FoldMerge { merged: usize, a: usize, b: usize },
    /// Occurrences of `new` are handed to `old`.
    FoldMonotone { new: usize, old: usize },
    /// A holiday is inserted after every `every` slots.
    HolidayInsert { every: u64 },
    /// Holidays are filled, in order, by the slots of `inner`.
    PlaceInHolidays { inner: Box<ScheduleRepr> },
    /// Occurrences of `job` are dealt round-robin to `into`.
    Partition { job: usize, into: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleRepr {
    #[serde(with = "schedule_text")]
    pub base: Schedule,
    #[serde(default)]
    pub directives: Vec<Directive>,
}

mod schedule_text {
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    use crate::schedule::Schedule;

    #[derive(Serialize, Deserialize)]
    struct Raw {
        period: usize,
        slots: String,
    }

    pub fn serialize<S: Serializer>(v: &Schedule, s: S) -> Result<S::Ok, S::Error> {
        let text = v.to_string();
        let slots = text
            .lines()
            .find_map(|l| l.strip_prefix("slots:"))
            .unwrap_or("")
            .trim()
            .to_string();
        Raw {
            period: v.period(),
            slots,
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Schedule, D::Error> {
        let raw = Raw::deserialize(d)?;
        Schedule::parse(&format!("period: {}\nslots: {}\n", raw.period, raw.slots))
            .map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pred {
    Holiday,
    Job(usize),
}

impl Pred {
    fn matches(self, s: Slot) -> bool {
        match (self, s) {
            (Pred::Holiday, Slot::Holiday) => true,
            (Pred::Job(a), Slot::Job(b)) => a == b,
            _ => false,
        }
    }
}

/// Exact period of a represented schedule together with per-period occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodSummary {
    pub period: BigUint,
    pub holidays: BigUint,
    pub counts: BTreeMap<usize, BigUint>,
}

impl ScheduleRepr {
    pub fn plain(base: Schedule) -> Self {
        ScheduleRepr {
            base,
            directives: Vec::new(),
        }
    }

    pub fn with(mut self, d: Directive) -> Self {
        self.directives.push(d);
        self
    }

    /// Job ids present after all directives, or an error if some directive is inconsistent
    /// with the layer it is applied to.
    pub fn final_ids(&self) -> Result<BTreeSet<usize>> {
        let mut ids: BTreeSet<usize> = self.base.slots().iter().filter_map(|s| s.job()).collect();
        // ids are never reused, so every id is consumed by at most one directive
        let mut ever = ids.clone();
        let fresh = |ever: &mut BTreeSet<usize>, id: usize| -> Result<()> {
            if ever.insert(id) {
                Ok(())
            } else {
                Err(Error::MalformedRepr(format!("id {id} introduced twice")))
            }
        };
        for d in &self.directives {
            match d {
                Directive::FoldMerge { merged, a, b } => {
                    if !ids.remove(merged) {
                        return Err(Error::MalformedRepr(format!("merge of absent id {merged}")));
                    }
                    fresh(&mut ever, *a)?;
                    fresh(&mut ever, *b)?;
                    if a == b {
                        return Err(Error::MalformedRepr("merge into one id".into()));
                    }
                    ids.insert(*a);
                    ids.insert(*b);
                }
                Directive::FoldMonotone { new, old } => {
                    if !ids.remove(new) {
                        return Err(Error::MalformedRepr(format!(
                            "substitution of absent id {new}"
                        )));
                    }
                    fresh(&mut ever, *old)?;
                    ids.insert(*old);
                }
                Directive::HolidayInsert { every } => {
                    if *every == 0 {
                        return Err(Error::MalformedRepr(
                            "holiday insertion every 0 slots".into(),
                        ));
                    }
                }
                Directive::PlaceInHolidays { inner } => {
                    for id in inner.final_ids()? {
                        fresh(&mut ever, id)?;
                        ids.insert(id);
                    }
                }
                Directive::Partition { job, into } => {
                    if into.is_empty() {
                        return Err(Error::MalformedRepr("partition into zero jobs".into()));
                    }
                    if !ids.remove(job) {
                        return Err(Error::MalformedRepr(format!(
                            "partition of absent id {job}"
                        )));
                    }
                    let distinct: BTreeSet<_> = into.iter().collect();
                    if distinct.len() != into.len() {
                        return Err(Error::MalformedRepr("partition ids repeat".into()));
                    }
                    for id in into {
                        fresh(&mut ever, *id)?;
                        ids.insert(*id);
                    }
                }
            }
        }
        Ok(ids)
    }

    /// Renames every job id, including those of nested representations. `f` must be injective
    /// on the ids in use.
    pub fn remap_ids(&self, f: &dyn Fn(usize) -> usize) -> ScheduleRepr {
        let slots = self
            .base
            .slots()
            .iter()
            .map(|s| match s {
                Slot::Job(j) => Slot::Job(f(*j)),
                Slot::Holiday => Slot::Holiday,
            })
            .collect();
        let directives = self
            .directives
            .iter()
            .map(|d| match d {
                Directive::FoldMerge { merged, a, b } => Directive::FoldMerge {
                    merged: f(*merged),
                    a: f(*a),
                    b: f(*b),
                },
                Directive::FoldMonotone { new, old } => Directive::FoldMonotone {
                    new: f(*new),
                    old: f(*old),
                },
                Directive::HolidayInsert { every } => Directive::HolidayInsert { every: *every },
                Directive::PlaceInHolidays { inner } => Directive::PlaceInHolidays {
                    inner: Box::new(inner.remap_ids(f)),
                },
                Directive::Partition { job, into } => Directive::Partition {
                    job: f(*job),
                    into: into.iter().map(|x| f(*x)).collect(),
                },
            })
            .collect();
        ScheduleRepr {
            base: Schedule::new(slots).expect("relabelling keeps the period"),
            directives,
        }
    }

    /// Largest id used anywhere in the representation.
    pub fn max_id(&self) -> Option<usize> {
        let mut m = self.base.max_job();
        let mut see = |x: usize| m = Some(m.map_or(x, |y: usize| y.max(x)));
        for d in &self.directives {
            match d {
                Directive::FoldMerge { merged, a, b } => {
                    see(*merged);
                    see(*a);
                    see(*b);
                }
                Directive::FoldMonotone { new, old } => {
                    see(*new);
                    see(*old);
                }
                Directive::HolidayInsert { .. } => {}
                Directive::PlaceInHolidays { inner } => {
                    if let Some(x) = inner.max_id() {
                        see(x);
                    }
                }
                Directive::Partition { job, into } => {
                    see(*job);
                    into.iter().for_each(|x| see(*x));
                }
            }
        }
        m
    }

    /// Slots of the represented infinite schedule in `[t0, t1)`.
    pub fn expand(&self, t0: u64, t1: u64) -> Result<Vec<Slot>> {
        if t0 >= t1 {
            return Err(Error::MalformedRepr(format!("empty window [{t0}, {t1})")));
        }
        self.final_ids()?;
        Ok(self.expand_layer(self.directives.len(), t0, t1))
    }

    fn expand_unchecked(&self, t0: u64, t1: u64) -> Vec<Slot> {
        if t0 >= t1 {
            return Vec::new();
        }
        self.expand_layer(self.directives.len(), t0, t1)
    }

    fn expand_layer(&self, k: usize, t0: u64, t1: u64) -> Vec<Slot> {
        if k == 0 {
            return (t0..t1).map(|t| self.base.at(t)).collect();
        }
        match &self.directives[k - 1] {
            Directive::HolidayInsert { every } => {
                let block = every + 1;
                let inner_len = |t: u64| t - t / block;
                let inner = self.expand_layer(k - 1, inner_len(t0), inner_len(t1));
                let mut it = inner.into_iter();
                (t0..t1)
                    .map(|t| {
                        if t % block == *every {
                            Slot::Holiday
                        } else {
                            it.next().unwrap_or(Slot::Holiday)
                        }
                    })
                    .collect()
            }
            Directive::PlaceInHolidays { inner } => {
                let h0 = self.count_layer(k - 1, t0, Pred::Holiday);
                let mut v = self.expand_layer(k - 1, t0, t1);
                let hw = v.iter().filter(|s| **s == Slot::Holiday).count() as u64;
                let fill = inner.expand_unchecked(h0, h0 + hw);
                let mut it = fill.into_iter();
                for s in v.iter_mut() {
                    if *s == Slot::Holiday {
                        *s = it.next().unwrap_or(Slot::Holiday);
                    }
                }
                v
            }
            _ => self.expand_relabel_run(k, t0, t1),
        }
    }

    fn is_relabel(d: &Directive) -> bool {
        matches!(
            d,
            Directive::FoldMerge { .. }
                | Directive::FoldMonotone { .. }
                | Directive::Partition { .. }
        )
    }

    /// Applies the maximal run of relabelling directives ending at layer `k` in one pass,
    /// following each slot's id through the run.
    fn expand_relabel_run(&self, k: usize, t0: u64, t1: u64) -> Vec<Slot> {
        let mut j = k - 1;
        while j > 0 && Self::is_relabel(&self.directives[j - 1]) {
            j -= 1;
        }
        let consumer: HashMap<usize, usize> = (j..k)
            .map(|d| {
                let x = match &self.directives[d] {
                    Directive::FoldMerge { merged, .. } => *merged,
                    Directive::FoldMonotone { new, .. } => *new,
                    Directive::Partition { job, .. } => *job,
                    _ => unreachable!("run holds relabelling directives only"),
                };
                (x, d)
            })
            .collect();
        let mut counters: HashMap<usize, u64> = HashMap::new();
        let mut v = self.expand_layer(j, t0, t1);
        for s in v.iter_mut() {
            let Slot::Job(mut x) = *s else { continue };
            while let Some(&d) = consumer.get(&x) {
                if d >= k {
                    break;
                }
                let c = counters
                    .entry(d)
                    .or_insert_with(|| self.count_layer(d, t0, Pred::Job(x)));
                x = match &self.directives[d] {
                    Directive::FoldMerge { a, b, .. } => {
                        if *c % 2 == 0 {
                            *a
                        } else {
                            *b
                        }
                    }
                    Directive::FoldMonotone { old, .. } => *old,
                    Directive::Partition { into, .. } => into[(*c % into.len() as u64) as usize],
                    _ => unreachable!(),
                };
                *c += 1;
            }
            *s = Slot::Job(x);
        }
        v
    }

    fn count_layer(&self, k: usize, t: u64, pred: Pred) -> u64 {
        if k == 0 {
            let q = self.base.period() as u64;
            let per = self
                .base
                .slots()
                .iter()
                .filter(|s| pred.matches(**s))
                .count() as u64;
            let rem = self.base.slots()[..(t % q) as usize]
                .iter()
                .filter(|s| pred.matches(**s))
                .count() as u64;
            return (t / q) * per + rem;
        }
        match &self.directives[k - 1] {
            Directive::HolidayInsert { every } => {
                let inserted = t / (every + 1);
                let inner = self.count_layer(k - 1, t - inserted, pred);
                if pred == Pred::Holiday {
                    inner + inserted
                } else {
                    inner
                }
            }
            Directive::FoldMerge { merged, a, b } => match pred {
                Pred::Job(x) if x == *a => (self.count_layer(k - 1, t, Pred::Job(*merged)) + 1) / 2,
                Pred::Job(x) if x == *b => self.count_layer(k - 1, t, Pred::Job(*merged)) / 2,
                Pred::Job(x) if x == *merged => 0,
                _ => self.count_layer(k - 1, t, pred),
            },
            Directive::FoldMonotone { new, old } => match pred {
                Pred::Job(x) if x == *old => self.count_layer(k - 1, t, Pred::Job(*new)),
                Pred::Job(x) if x == *new => 0,
                _ => self.count_layer(k - 1, t, pred),
            },
            Directive::Partition { job, into } => match pred {
                Pred::Job(x) if x == *job => 0,
                Pred::Job(x) => match into.iter().position(|&y| y == x) {
                    Some(r) => {
                        let q = into.len() as u64;
                        let c = self.count_layer(k - 1, t, Pred::Job(*job));
                        (c + q - 1 - r as u64) / q
                    }
                    None => self.count_layer(k - 1, t, pred),
                },
                Pred::Holiday => self.count_layer(k - 1, t, pred),
            },
            Directive::PlaceInHolidays { inner } => {
                let h = self.count_layer(k - 1, t, Pred::Holiday);
                match pred {
                    Pred::Holiday => inner.count_layer(inner.directives.len(), h, Pred::Holiday),
                    Pred::Job(_) => {
                        self.count_layer(k - 1, t, pred)
                            + inner.count_layer(inner.directives.len(), h, pred)
                    }
                }
            }
        }
    }

    /// A (not necessarily minimal) period of the represented schedule with occurrence counts.
    pub fn summary(&self) -> Result<PeriodSummary> {
        self.final_ids()?;
        Ok(self.summary_unchecked())
    }

    fn summary_unchecked(&self) -> PeriodSummary {
        let mut counts: BTreeMap<usize, BigUint> = BTreeMap::new();
        let mut holidays = BigUint::zero();
        for s in self.base.slots() {
            match s {
                Slot::Holiday => holidays += 1u32,
                Slot::Job(j) => *counts.entry(*j).or_default() += 1u32,
            }
        }
        let mut sum = PeriodSummary {
            period: BigUint::from(self.base.period()),
            holidays,
            counts,
        };
        let scale = |sum: &mut PeriodSummary, f: &BigUint| {
            sum.period *= f;
            sum.holidays *= f;
            for c in sum.counts.values_mut() {
                *c *= f;
            }
        };
        for d in &self.directives {
            match d {
                Directive::HolidayInsert { every } => {
                    let n = BigUint::from(*every);
                    let l = sum.period.lcm(&n);
                    let f = &l / &sum.period;
                    scale(&mut sum, &f);
                    let inserted = &l / &n;
                    sum.period += &inserted;
                    sum.holidays += inserted;
                }
                Directive::FoldMerge { merged, a, b } => {
                    let c = sum.counts.remove(merged).unwrap_or_default();
                    if c.is_odd() {
                        scale(&mut sum, &BigUint::from(2u32));
                        sum.counts.insert(*a, c.clone());
                        sum.counts.insert(*b, c);
                    } else {
                        let half = &c / 2u32;
                        sum.counts.insert(*a, half.clone());
                        sum.counts.insert(*b, half);
                    }
                }
                Directive::FoldMonotone { new, old } => {
                    let c = sum.counts.remove(new).unwrap_or_default();
                    sum.counts.insert(*old, c);
                }
                Directive::Partition { job, into } => {
                    let c = sum.counts.remove(job).unwrap_or_default();
                    let q = BigUint::from(into.len());
                    let f = &q / c.gcd(&q);
                    scale(&mut sum, &f);
                    let each = &c * &f / &q;
                    for id in into {
                        sum.counts.insert(*id, each.clone());
                    }
                }
                Directive::PlaceInHolidays { inner } => {
                    let is = inner.summary_unchecked();
                    if sum.holidays.is_zero() {
                        continue;
                    }
                    let f = &is.period / sum.holidays.gcd(&is.period);
                    scale(&mut sum, &f);
                    let reps = &sum.holidays / &is.period;
                    sum.holidays = &is.holidays * &reps;
                    for (id, c) in is.counts {
                        sum.counts.insert(id, c * &reps);
                    }
                }
            }
        }
        sum
    }

    /// Validates against multiplicity-expanded periods. When the represented period is at most
    /// `exact_limit` slots, one full period is checked exactly; otherwise every sub-window of
    /// `[0, window)` is checked.
    pub fn validate(
        &self,
        periods: &[Rational],
        window: u64,
        exact_limit: u64,
    ) -> Result<Validity> {
        let ids = self.final_ids()?;
        if let Some(bad) = ids.iter().find(|&&id| id >= periods.len()) {
            return Err(Error::MalformedRepr(format!(
                "id {bad} is not a job of the instance"
            )));
        }
        let summary = self.summary_unchecked();
        if let Some(p) = summary.period.to_u64().filter(|&p| p <= exact_limit) {
            let sched = Schedule::new(self.expand_layer(self.directives.len(), 0, p))?;
            return validate_periodic(periods, &sched);
        }
        let slots = self.expand_layer(self.directives.len(), 0, window.max(1));
        validate_window(periods, &slots)
    }

    /// Base period times the growth factor of every directive; a coarse size measure.
    pub fn base_period(&self) -> usize {
        self.base.period()
    }
}

impl From<Schedule> for ScheduleRepr {
    fn from(s: Schedule) -> Self {
        ScheduleRepr::plain(s)
    }
}

/// `Some(p)` if the represented period fits in `u64`.
pub fn period_u64(repr: &ScheduleRepr) -> Option<u64> {
    repr.summary().ok().and_then(|s| s.period.to_u64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat_int;

    fn base(v: &[Option<usize>]) -> Schedule {
        Schedule::from_jobs(v).unwrap()
    }

    #[test]
    fn no_directives_repeats_base() {
        let r = ScheduleRepr::plain(base(&[Some(0), None, Some(1)]));
        let w = r.expand(0, 6).unwrap();
        assert_eq!(&w[..3], &w[3..]);
    }

    #[test]
    fn holiday_insert_layout() {
        let r = ScheduleRepr::plain(base(&[Some(0), Some(1), Some(2), Some(3)]))
            .with(Directive::HolidayInsert { every: 2 });
        let w = r.expand(0, 6).unwrap();
        assert_eq!(
            w,
            vec![
                Slot::Job(0),
                Slot::Job(1),
                Slot::Holiday,
                Slot::Job(2),
                Slot::Job(3),
                Slot::Holiday
            ]
        );
        assert_eq!(r.summary().unwrap().period, BigUint::from(6u32));
    }

    #[test]
    fn merge_alternates_and_validates() {
        // (10, 6) folded into (3): job 2 every third slot
        let r = ScheduleRepr::plain(base(&[Some(2), None, None])).with(Directive::FoldMerge {
            merged: 2,
            a: 0,
            b: 1,
        });
        let w = r.expand(0, 12).unwrap();
        assert_eq!(w[0], Slot::Job(0));
        assert_eq!(w[3], Slot::Job(1));
        assert_eq!(w[6], Slot::Job(0));
        let periods = vec![rat_int(10), rat_int(6)];
        assert!(r.validate(&periods, 60, 1000).unwrap().is_valid());
    }

    #[test]
    fn windows_are_consistent() {
        let inner = ScheduleRepr::plain(base(&[Some(5), Some(6), None]));
        let r = ScheduleRepr::plain(base(&[Some(0), None, Some(1), None, None]))
            .with(Directive::FoldMerge {
                merged: 0,
                a: 2,
                b: 3,
            })
            .with(Directive::HolidayInsert { every: 3 })
            .with(Directive::Partition {
                job: 1,
                into: vec![7, 8, 9],
            })
            .with(Directive::PlaceInHolidays {
                inner: Box::new(inner),
            });
        let full = r.expand(0, 400).unwrap();
        for (a, b) in [(0u64, 17u64), (5, 90), (123, 400), (399, 400)] {
            assert_eq!(
                r.expand(a, b).unwrap(),
                full[a as usize..b as usize].to_vec()
            );
        }
        let s = r.summary().unwrap();
        let p = s.period.to_u64().unwrap();
        let two = r.expand(0, 2 * p).unwrap();
        assert_eq!(&two[..p as usize], &two[p as usize..]);
        for (id, c) in &s.counts {
            let seen = two[..p as usize]
                .iter()
                .filter(|x| **x == Slot::Job(*id))
                .count();
            assert_eq!(BigUint::from(seen), *c);
        }
    }

    #[test]
    fn malformed_chains_rejected() {
        let r =
            ScheduleRepr::plain(base(&[Some(0)])).with(Directive::FoldMonotone { new: 4, old: 1 });
        assert!(r.expand(0, 3).is_err());
        let r = ScheduleRepr::plain(base(&[Some(0), Some(1)]))
            .with(Directive::FoldMonotone { new: 0, old: 1 });
        assert!(r.expand(0, 3).is_err());
    }

    #[test]
    fn json_round_trip() {
        let r =
            ScheduleRepr::plain(base(&[Some(0), None])).with(Directive::HolidayInsert { every: 1 });
        let text = serde_json::to_string(&r).unwrap();
        let back: ScheduleRepr = serde_json::from_str(&text).unwrap();
        assert_eq!(r, back);
    }
}
