//! Brute-force enumerators used to cross-check the solvers on small instances. None of them
//! shares code with the state-graph solver.

use std::collections::HashMap;

use num_traits::{One, ToPrimitive};

use crate::related::{bgt_objective, rs_value, BgtInstance, RecurrentInstance};
use crate::schedule::{validate_schedule_gaps, Schedule, Slot};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    Schedulable(Schedule),
    Unschedulable,
}

impl OracleVerdict {
    pub fn is_schedulable(&self) -> bool {
        matches!(self, OracleVerdict::Schedulable(_))
    }
}

/// All sorted period tuples with `1..=max_jobs` entries from `1..=max_period`.
pub fn catalog(max_jobs: usize, max_period: u64) -> Vec<Vec<u64>> {
    fn rec(start: u64, max: u64, left: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if left == 0 {
            return;
        }
        for p in start..=max {
            cur.push(p);
            rec(p, max, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, max_period, max_jobs, &mut Vec::new(), &mut out);
    out
}

struct GapSearch<'a> {
    limits: &'a [u64],
    target: usize,
    nodes: u64,
    budget: u64,
    seq: Vec<Slot>,
    idle: Vec<u64>,
}

impl GapSearch<'_> {
    /// Depth-first extension of `seq` keeping every job's run of absences below its limit.
    fn dfs(&mut self) -> Result<bool> {
        if self.seq.len() >= self.target {
            return Ok(true);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        let m = self.limits.len();
        let choices = (0..m).map(Slot::Job).chain(std::iter::once(Slot::Holiday));
        for s in choices {
            let saved = self.idle.clone();
            let ok = (0..m).all(|i| {
                self.idle[i] = if s == Slot::Job(i) {
                    0
                } else {
                    self.idle[i] + 1
                };
                self.idle[i] < self.limits[i]
            });
            if ok {
                self.seq.push(s);
                if self.dfs()? {
                    return Ok(true);
                }
                self.seq.pop();
            }
            self.idle = saved;
        }
        Ok(false)
    }
}

/// Periodic schedule in which job `i` is never absent for `limits[i]` consecutive slots, or
/// `None` if none exists. Searches one-sided sequences from the moment every job has just run;
/// a sequence longer than the number of absence-count vectors repeats one, closing a cycle.
pub fn gap_schedule(limits: &[u64], budget: u64) -> Result<Option<Schedule>> {
    if limits.is_empty() {
        return Ok(Some(Schedule::new(vec![Slot::Holiday])?));
    }
    if limits.contains(&0) {
        return Ok(None);
    }
    let states: u64 = limits
        .iter()
        .try_fold(1u64, |acc, &a| acc.checked_mul(a))
        .filter(|&s| s < 1 << 20)
        .ok_or(Error::BudgetExceeded(budget))?;
    let mut search = GapSearch {
        limits,
        target: states as usize + 1,
        nodes: 0,
        budget,
        seq: Vec::new(),
        idle: vec![0; limits.len()],
    };
    if !search.dfs()? {
        return Ok(None);
    }
    // replay to find the repeated absence vector
    let mut idle = vec![0u64; limits.len()];
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    seen.insert(idle.clone(), 0);
    for (t, s) in search.seq.iter().enumerate() {
        for (i, c) in idle.iter_mut().enumerate() {
            *c = if *s == Slot::Job(i) { 0 } else { *c + 1 };
        }
        if let Some(&start) = seen.get(&idle) {
            return Ok(Some(Schedule::new(search.seq[start..=t].to_vec())?));
        }
        seen.insert(idle.clone(), t + 1);
    }
    unreachable!("pigeonhole guarantees a repeat")
}

/// Exhaustive pinwheel decision for integer periods; schedules found are re-validated.
pub fn brute_force_pinwheel(periods: &[u64], budget: u64) -> Result<OracleVerdict> {
    match gap_schedule(periods, budget)? {
        Some(s) => {
            if !validate_schedule_gaps(periods, &s)?.is_valid() {
                return Err(Error::InvalidSchedule(
                    "enumerated schedule fails validation".into(),
                ));
            }
            Ok(OracleVerdict::Schedulable(s))
        }
        None => Ok(OracleVerdict::Unschedulable),
    }
}

/// A schedule with objective at most `K`, or `None`. Arm `i` may be absent for fewer than
/// `⌊K/h_i⌋` consecutive slots.
pub fn brute_force_bgt(bgt: &BgtInstance, budget: u64) -> Result<Option<Schedule>> {
    let limits: Vec<u64> = bgt
        .growth_rates
        .iter()
        .map(|h| (&bgt.k / h).to_u64().ok_or(Error::BudgetExceeded(budget)))
        .collect::<Result<_>>()?;
    let found = gap_schedule(&limits, budget)?;
    if let Some(s) = &found {
        if !bgt_objective(bgt, s)?.at_most(&bgt.k) {
            return Err(Error::InvalidSchedule(
                "enumerated schedule exceeds the threshold".into(),
            ));
        }
    }
    Ok(found)
}

/// A periodic schedule of length at most `max_len` with value 1, or `None`. Every slot must
/// pay 1, so holidays and early pulls are pruned as they appear.
pub fn brute_force_rs_one(
    ri: &RecurrentInstance,
    max_len: usize,
    budget: u64,
) -> Result<Option<Schedule>> {
    let arms = ri.saturation.len();
    let sat: Vec<usize> = ri
        .saturation
        .iter()
        .map(|a| a.to_usize().ok_or(Error::BudgetExceeded(budget)))
        .collect::<Result<_>>()?;
    let mut nodes = 0u64;
    for len in 1..=max_len {
        let mut seq: Vec<usize> = Vec::with_capacity(len);
        let mut last: Vec<Option<usize>> = vec![None; arms];
        if let Some(s) = rs_dfs(&sat, len, &mut seq, &mut last, &mut nodes, budget)? {
            if rs_value(ri, &s)? == num_rational::BigRational::one() {
                return Ok(Some(s));
            }
        }
    }
    Ok(None)
}

fn rs_dfs(
    sat: &[usize],
    len: usize,
    seq: &mut Vec<usize>,
    last: &mut [Option<usize>],
    nodes: &mut u64,
    budget: u64,
) -> Result<Option<Schedule>> {
    *nodes += 1;
    if *nodes > budget {
        return Err(Error::BudgetExceeded(budget));
    }
    let t = seq.len();
    if t == len {
        // wrap-around gap of each arm's first pull
        let mut first = vec![None; sat.len()];
        for (i, &j) in seq.iter().enumerate() {
            first[j].get_or_insert(i);
        }
        let ok = (0..sat.len()).all(|j| match (first[j], last[j]) {
            (Some(f), Some(l)) => f + len - l >= sat[j],
            _ => true,
        });
        return ok
            .then(|| Schedule::new(seq.iter().map(|&j| Slot::Job(j)).collect()))
            .transpose();
    }
    for j in 0..sat.len() {
        if last[j].is_some_and(|l| t - l < sat[j]) {
            continue;
        }
        let saved = last[j];
        last[j] = Some(t);
        seq.push(j);
        if let Some(s) = rs_dfs(sat, len, seq, last, nodes, budget)? {
            return Ok(Some(s));
        }
        seq.pop();
        last[j] = saved;
    }
    Ok(None)
}

/// Offsets making `demands` an exact covering sequence, by enumeration.
pub fn brute_force_constant_gap(demands: &[u64]) -> Option<Vec<u64>> {
    let total: u64 = demands.iter().sum();
    if demands.is_empty() || demands.iter().any(|&d| d == 0 || !total.is_multiple_of(d)) {
        return None;
    }
    let moduli: Vec<u64> = demands.iter().map(|&d| total / d).collect();
    let mut offs = vec![0u64; demands.len()];
    fn rec(k: usize, moduli: &[u64], total: u64, offs: &mut Vec<u64>) -> bool {
        if k == moduli.len() {
            // cover check over one full period
            return (0..total).all(|t| {
                (0..moduli.len())
                    .filter(|&i| t % moduli[i] == offs[i])
                    .count()
                    == 1
            });
        }
        for o in 0..moduli[k] {
            offs[k] = o;
            if rec(k + 1, moduli, total, offs) {
                return true;
            }
        }
        false
    }
    rec(0, &moduli, total, &mut offs).then_some(offs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_examples() {
        assert!(!brute_force_pinwheel(&[2, 3, 6], 1 << 20)
            .unwrap()
            .is_schedulable());
        assert!(brute_force_pinwheel(&[2, 4, 4], 1 << 20)
            .unwrap()
            .is_schedulable());
        assert!(brute_force_pinwheel(&[4, 5, 6], 1 << 20)
            .unwrap()
            .is_schedulable());
        assert!(!brute_force_pinwheel(&[1, 6], 1 << 20)
            .unwrap()
            .is_schedulable());
        assert_eq!(catalog(1, 3).len(), 3);
        assert_eq!(catalog(3, 6).len(), 6 + 21 + 56);
    }

    #[test]
    fn constant_gap_enumeration() {
        assert!(brute_force_constant_gap(&[2, 1, 1]).is_some());
        assert!(brute_force_constant_gap(&[1, 1, 1]).is_some());
        assert!(brute_force_constant_gap(&[3, 2, 1]).is_none());
    }
}
