//! Reductions to bamboo garden trimming, recurrent scheduling, the constant gap problem and
//! windows scheduling, with evaluators for their objectives on periodic schedules.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{solve_exact, ExactVerdict};
use crate::instance::PinwheelInstance;
use crate::num::{rat_big, Rational};
use crate::schedule::{Schedule, Slot};
use crate::{Error, Result};

/// Growth rates with the decision threshold `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BgtInstance {
    #[serde(with = "crate::serde_num::biguint_vec")]
    pub growth_rates: Vec<BigUint>,
    #[serde(with = "crate::serde_num::biguint")]
    pub k: BigUint,
}

/// Rates `L/a_i` and threshold `L = ∏ a_i` over the multiplicity-expanded periods.
pub fn red_bgt(inst: &PinwheelInstance) -> Result<BgtInstance> {
    let mut periods = Vec::new();
    for (p, c) in inst.integer_groups()? {
        let c = c.to_usize().ok_or(Error::BudgetExceeded(u64::MAX))?;
        periods.extend(std::iter::repeat(p).take(c));
    }
    let l: BigUint = periods.iter().product();
    Ok(BgtInstance {
        growth_rates: periods.iter().map(|a| &l / a).collect(),
        k: l,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BgtValue {
    Finite(Rational),
    /// Some arm is never trimmed.
    Unbounded {
        arm: usize,
    },
}

impl BgtValue {
    pub fn at_most(&self, k: &BigUint) -> bool {
        matches!(self, BgtValue::Finite(v) if *v <= Rational::from_integer(crate::num::to_bigint(k)))
    }
}

/// Largest cyclic gap between consecutive occurrences of each job, `None` if it never runs.
pub fn cyclic_max_gaps(sched: &Schedule, jobs: usize) -> Result<Vec<Option<usize>>> {
    let t = sched.period();
    let mut pos: Vec<Vec<usize>> = vec![Vec::new(); jobs];
    for (i, s) in sched.slots().iter().enumerate() {
        if let Slot::Job(j) = *s {
            pos.get_mut(j)
                .ok_or_else(|| Error::InvalidSchedule(format!("job {} beyond {jobs} jobs", j + 1)))?
                .push(i);
        }
    }
    Ok(pos
        .iter()
        .map(|ps| {
            let first = *ps.first()?;
            let wrap = first + t - ps[ps.len() - 1];
            Some(ps.windows(2).map(|w| w[1] - w[0]).fold(wrap, usize::max))
        })
        .collect())
}

/// `max_i h_i·D_i` with `D_i` the largest cyclic gap of arm `i`.
pub fn bgt_objective(bgt: &BgtInstance, sched: &Schedule) -> Result<BgtValue> {
    let gaps = cyclic_max_gaps(sched, bgt.growth_rates.len())?;
    let mut best = Rational::zero();
    for (arm, (h, g)) in bgt.growth_rates.iter().zip(&gaps).enumerate() {
        match g {
            None => return Ok(BgtValue::Unbounded { arm }),
            Some(g) => best = best.max(Rational::from_integer((h * BigUint::from(*g)).into())),
        }
    }
    Ok(BgtValue::Finite(best))
}

/// Arms paying `min(1, t/a_i)` when pulled `t` slots after their previous pull, with the
/// target average value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrentInstance {
    #[serde(with = "crate::serde_num::biguint_vec")]
    pub saturation: Vec<BigUint>,
    #[serde(with = "crate::serde_num::rational")]
    pub threshold: Rational,
}

impl RecurrentInstance {
    pub fn payoff(&self, arm: usize, t: u64) -> Rational {
        rat_big(&BigUint::from(t), &self.saturation[arm]).min(Rational::one())
    }
}

/// Recurrent scheduling instance of a dense integer pinwheel instance.
pub fn red_rs(inst: &PinwheelInstance) -> Result<RecurrentInstance> {
    let d = inst.density();
    if d != Rational::one() {
        return Err(Error::NonDense(format!("density {d} is not 1")));
    }
    let mut saturation = Vec::new();
    for (p, c) in inst.integer_groups()? {
        let c = c.to_usize().ok_or(Error::BudgetExceeded(u64::MAX))?;
        saturation.extend(std::iter::repeat(p).take(c));
    }
    Ok(RecurrentInstance {
        saturation,
        threshold: Rational::one(),
    })
}

/// Average payoff per slot of a periodic schedule over one period, each pull paid for the
/// cyclic gap since the previous pull of the same arm.
pub fn rs_value(ri: &RecurrentInstance, sched: &Schedule) -> Result<Rational> {
    let t = sched.period();
    let arms = ri.saturation.len();
    let mut last: Vec<Option<usize>> = vec![None; arms];
    for (i, s) in sched.slots().iter().enumerate() {
        if let Slot::Job(j) = *s {
            *last.get_mut(j).ok_or_else(|| {
                Error::InvalidSchedule(format!("arm {} beyond {arms} arms", j + 1))
            })? = Some(i);
        }
    }
    let mut total = Rational::zero();
    for (i, s) in sched.slots().iter().enumerate() {
        if let Slot::Job(j) = *s {
            let prev = last[j].expect("arm seen");
            let gap = if prev < i { i - prev } else { i + t - prev };
            total += ri.payoff(j, gap as u64);
            last[j] = Some(i);
        }
    }
    Ok(total / Rational::from_integer((t as u64).into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GapFailure {
    Empty,
    LengthMismatch { demands: usize, offsets: usize },
    NonIntegralModulus { index: usize },
    Overlap { a: usize, b: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GapVerdict {
    ExactCover,
    Failure(GapFailure),
}

/// Checks that the progressions `offsets[i] mod D/demands[i]`, `D = Σ demands`, partition
/// the integers. Their densities sum to 1, so disjointness suffices.
pub fn constant_gap_check(demands: &[u64], offsets: &[u64]) -> GapVerdict {
    if demands.is_empty() || demands.contains(&0) {
        return GapVerdict::Failure(GapFailure::Empty);
    }
    if demands.len() != offsets.len() {
        return GapVerdict::Failure(GapFailure::LengthMismatch {
            demands: demands.len(),
            offsets: offsets.len(),
        });
    }
    let total: u64 = demands.iter().sum();
    if let Some(index) = demands.iter().position(|&d| total % d != 0) {
        return GapVerdict::Failure(GapFailure::NonIntegralModulus { index });
    }
    let moduli: Vec<u64> = demands.iter().map(|&d| total / d).collect();
    for a in 0..moduli.len() {
        for b in a + 1..moduli.len() {
            let g = moduli[a].gcd(&moduli[b]);
            if offsets[a] % g == offsets[b] % g {
                return GapVerdict::Failure(GapFailure::Overlap { a, b });
            }
        }
    }
    GapVerdict::ExactCover
}

/// A pinwheel instance to be scheduled on `machines` parallel machines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowsInstance {
    pub instance: PinwheelInstance,
    pub machines: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WindowsVerdict {
    Schedulable,
    Unschedulable,
    /// No decision procedure for this machine count.
    Unknown,
}

pub fn windows_embed(inst: &PinwheelInstance, machines: u64) -> Result<WindowsInstance> {
    if machines == 0 {
        return Err(Error::InvalidInstance(
            "at least one machine is required".into(),
        ));
    }
    Ok(WindowsInstance {
        instance: inst.clone(),
        machines,
    })
}

impl WindowsInstance {
    /// One machine is plain pinwheel scheduling. With more machines only the trivial cases are
    /// decided: one job per machine, or density above the machine count.
    pub fn decide(&self) -> Result<WindowsVerdict> {
        if self.machines == 1 {
            return Ok(match solve_exact(&self.instance)? {
                ExactVerdict::Schedulable(_) => WindowsVerdict::Schedulable,
                ExactVerdict::Unschedulable => WindowsVerdict::Unschedulable,
            });
        }
        if self.instance.total_multiplicity() <= BigUint::from(self.machines) {
            return Ok(WindowsVerdict::Schedulable);
        }
        if self.instance.density() > Rational::from_integer(self.machines.into()) {
            return Ok(WindowsVerdict::Unschedulable);
        }
        Ok(WindowsVerdict::Unknown)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sched(v: &[Option<usize>]) -> Schedule {
        Schedule::from_jobs(v).unwrap()
    }

    fn b(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn bgt_examples() {
        let g = red_bgt(&PinwheelInstance::from_integers(&[2, 4]).unwrap()).unwrap();
        assert_eq!(g.growth_rates, vec![b(4), b(2)]);
        assert_eq!(g.k, b(8));
        let one = red_bgt(&PinwheelInstance::from_integers(&[1]).unwrap()).unwrap();
        assert_eq!(
            (one.growth_rates.clone(), one.k.clone()),
            (vec![b(1)], b(1))
        );
        let dense = red_bgt(&PinwheelInstance::from_integers(&[2, 4, 4]).unwrap()).unwrap();
        assert_eq!(dense.growth_rates.iter().sum::<BigUint>(), dense.k);

        let s = sched(&[Some(0), Some(1), Some(0), None]);
        assert_eq!(
            bgt_objective(&g, &s).unwrap(),
            BgtValue::Finite(Rational::from_integer(8.into()))
        );
        assert_eq!(
            bgt_objective(&one, &sched(&[Some(0)])).unwrap(),
            BgtValue::Finite(Rational::one())
        );
        assert_eq!(
            bgt_objective(&g, &sched(&[Some(0), None])).unwrap(),
            BgtValue::Unbounded { arm: 1 }
        );
    }

    #[test]
    fn recurrent_examples() {
        let inst = PinwheelInstance::from_integers(&[2, 2]).unwrap();
        let ri = red_rs(&inst).unwrap();
        assert_eq!(
            rs_value(&ri, &sched(&[Some(0), Some(1)])).unwrap(),
            Rational::one()
        );
        assert_eq!(
            rs_value(&ri, &sched(&[Some(0), None])).unwrap(),
            Rational::new(1.into(), 2.into())
        );
        assert!(matches!(
            red_rs(&PinwheelInstance::from_integers(&[2, 3]).unwrap()),
            Err(Error::NonDense(_))
        ));
        // a violated period always costs value
        let ri = red_rs(&PinwheelInstance::from_integers(&[2, 4, 4]).unwrap()).unwrap();
        let bad = sched(&[Some(0), Some(1), Some(2), Some(0)]);
        assert!(rs_value(&ri, &bad).unwrap() < Rational::one());
    }

    #[test]
    fn constant_gap_examples() {
        assert_eq!(constant_gap_check(&[1, 1], &[0, 1]), GapVerdict::ExactCover);
        assert_eq!(
            constant_gap_check(&[2, 1, 1], &[0, 1, 3]),
            GapVerdict::ExactCover
        );
        assert!(matches!(
            constant_gap_check(&[1, 1, 1], &[0, 0, 2]),
            GapVerdict::Failure(GapFailure::Overlap { .. })
        ));
        assert!(matches!(
            constant_gap_check(&[2, 3], &[0, 1]),
            GapVerdict::Failure(GapFailure::NonIntegralModulus { .. })
        ));
    }

    #[test]
    fn windows_examples() {
        let w = windows_embed(&PinwheelInstance::from_integers(&[2, 2]).unwrap(), 1).unwrap();
        assert_eq!(w.decide().unwrap(), WindowsVerdict::Schedulable);
        let w = windows_embed(&PinwheelInstance::from_integers(&[2, 3, 6]).unwrap(), 1).unwrap();
        assert_eq!(w.decide().unwrap(), WindowsVerdict::Unschedulable);
        let w = windows_embed(&PinwheelInstance::from_integers(&[1, 1]).unwrap(), 2).unwrap();
        assert_eq!(w.decide().unwrap(), WindowsVerdict::Schedulable);
    }
}
