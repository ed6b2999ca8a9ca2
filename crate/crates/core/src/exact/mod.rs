//! Ground-truth decision procedures on the state graph, and exact schedules as residue classes.

pub mod graph;
pub mod offsets;

use crate::exec::Exec;
use crate::instance::PinwheelInstance;
use crate::num::{rat, Rational};
use crate::schedule::{Schedule, Slot};
use crate::Result;

pub use graph::StateSpace;
pub use offsets::{
    solve_eps_offsets, validate_offsets, EpsOffsetAssignment, EpsSearch, OffsetVerdict, Piece,
    PieceVerdict, ResidueRange, SymbolicAssignment,
};

/// Default cap on the number of states of a state graph.
pub const STATE_BUDGET: u64 = 10_000_000;

/// Default cap on `states × edges` for the maximum-mean-cycle computation.
pub const CYCLE_WORK_BUDGET: u64 = 20_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactVerdict {
    Schedulable(Schedule),
    Unschedulable,
}

impl ExactVerdict {
    pub fn is_schedulable(&self) -> bool {
        matches!(self, ExactVerdict::Schedulable(_))
    }
}

/// Decides an integer instance by searching its state graph for a cycle.
pub fn solve_exact(inst: &PinwheelInstance) -> Result<ExactVerdict> {
    solve_exact_with(inst, STATE_BUDGET)
}

pub fn solve_exact_with(inst: &PinwheelInstance, budget: u64) -> Result<ExactVerdict> {
    let periods = inst.integer_periods()?;
    solve_periods(&periods, budget)
}

pub fn solve_periods(periods: &[u64], budget: u64) -> Result<ExactVerdict> {
    if periods.is_empty() {
        return Ok(ExactVerdict::Schedulable(Schedule::new(vec![
            Slot::Holiday,
        ])?));
    }
    let space = StateSpace::new(periods, budget)?;
    Ok(match graph::find_cycle(&space) {
        Some(s) => ExactVerdict::Schedulable(s),
        None => ExactVerdict::Unschedulable,
    })
}

/// Largest holiday fraction of any periodic schedule, with a schedule attaining it.
/// An empty instance can rest every slot.
pub fn max_holiday_cycle(periods: &[u64], budget: u64, exec: Exec) -> Result<(Rational, Schedule)> {
    if periods.is_empty() {
        return Ok((rat(1, 1), Schedule::new(vec![Slot::Holiday])?));
    }
    let space = StateSpace::new(periods, budget)?;
    graph::max_mean_cycle(&space, CYCLE_WORK_BUDGET, exec)
}

pub fn max_holiday_fraction(inst: &PinwheelInstance) -> Result<Rational> {
    let periods = inst.integer_periods()?;
    Ok(max_holiday_cycle(&periods, STATE_BUDGET, Exec::auto())?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::validate_schedule;
    use crate::Error;

    fn inst(p: &[u64]) -> PinwheelInstance {
        PinwheelInstance::from_integers(p).unwrap()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(
            solve_exact(&inst(&[1])).unwrap(),
            ExactVerdict::Schedulable(Schedule::from_jobs(&[Some(0)]).unwrap())
        );
        assert_eq!(
            solve_exact(&inst(&[2, 3, 6])).unwrap(),
            ExactVerdict::Unschedulable
        );
        match solve_exact(&inst(&[2, 4, 4])).unwrap() {
            ExactVerdict::Schedulable(s) => {
                assert_eq!(s.period(), 4);
                assert!(validate_schedule(&inst(&[2, 4, 4]), &s).unwrap().is_valid());
            }
            ExactVerdict::Unschedulable => panic!("(2,4,4) is schedulable"),
        }
    }

    #[test]
    fn holiday_fraction_examples() {
        assert_eq!(max_holiday_fraction(&inst(&[1])).unwrap(), rat(0, 1));
        assert_eq!(max_holiday_fraction(&inst(&[2])).unwrap(), rat(1, 2));
        assert_eq!(max_holiday_fraction(&inst(&[2, 2])).unwrap(), rat(0, 1));
        assert_eq!(max_holiday_fraction(&inst(&[3, 3])).unwrap(), rat(1, 3));
        assert_eq!(max_holiday_fraction(&inst(&[2, 3, 6])), Err(Error::NoCycle));
    }

    #[test]
    fn optimal_cycle_attains_fraction() {
        for p in [&[2u64, 5][..], &[3, 4, 6], &[4, 4, 5], &[2, 6, 6]] {
            let (h, s) = max_holiday_cycle(p, STATE_BUDGET, Exec::Sequential).unwrap();
            assert!(validate_schedule(&inst(p), &s).unwrap().is_valid());
            assert_eq!(rat(s.holidays() as i64, s.period() as i64), h);
        }
    }
}
