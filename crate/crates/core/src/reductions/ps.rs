//! Reduction from 3,4-SAT to pinwheel scheduling with density exactly 1.

use num_bigint::BigUint;
use num_traits::Zero;

use super::allowed::allowed_periods_with;
use super::eps::{check_normal_form, red_eps_with, JobRole, LiteralReps, TaggedInstance};
use super::greedy::{greedy_with, warm_greedy_with, JobCounts};
use crate::num::{recip, Rational};
use crate::sat::CnfFormula;
use crate::{Error, Result};

/// The reduction output with the intermediate quantities the witness construction needs.
/// Per-variable vectors are indexed from 0.
#[derive(Debug, Clone)]
pub struct PsReduction {
    pub formula: CnfFormula,
    pub reps: LiteralReps,
    pub tagged: TaggedInstance,
    pub periods: Vec<Vec<BigUint>>,
    pub clause_sum: Rational,
    /// Density handed to the plain greedy for each variable.
    pub remaining: Vec<Rational>,
    pub greedy: Vec<JobCounts>,
    /// Warm-greedy jobs for variables `1..n`, one entry fewer than variables.
    pub warm: Vec<JobCounts>,
}

impl PsReduction {
    /// Group indices of the jobs with the given role.
    pub fn groups(&self, role: impl Fn(&JobRole) -> bool) -> Vec<usize> {
        self.tagged.groups_where(role)
    }
}

/// Reduction from 3,4-SAT to pinwheel scheduling.
pub fn red_ps(f: &CnfFormula) -> Result<TaggedInstance> {
    Ok(red_ps_detailed(f)?.tagged)
}

pub fn red_ps_detailed(f: &CnfFormula) -> Result<PsReduction> {
    f.check_34sat().map_err(Error::Not34Sat)?;
    check_normal_form(f)?;
    let n = f.num_vars;
    if n == 0 {
        return Err(Error::Not34Sat("formula has no variables".into()));
    }
    let reps = LiteralReps::new(f);
    let mut tagged = red_eps_with(f, &reps)?;
    let periods: Vec<Vec<BigUint>> = (1..=n).map(|i| allowed_periods_with(i, f, &reps)).collect();
    let clause_sum = reps.clause_sum(f);
    let share = recip(&BigUint::from(n));
    let mut remaining = Vec::with_capacity(n);
    let mut greedy = Vec::with_capacity(n);
    for var in 1..=n {
        let d = &share - reps.base_density(var) - &clause_sum;
        let jobs = greedy_with(&periods[var - 1], n, &d)?;
        for (p, c) in &jobs {
            tagged.push(p.clone(), c.clone(), JobRole::Greedy { var })?;
        }
        remaining.push(d);
        greedy.push(jobs);
    }
    let mut warm = Vec::with_capacity(n.saturating_sub(1));
    for var in 1..n {
        let jobs = warm_greedy_with(&periods[var - 1], n, &clause_sum)?;
        for (p, c) in &jobs {
            tagged.push(p.clone(), c.clone(), JobRole::WarmGreedy { var })?;
        }
        warm.push(jobs);
    }
    debug_assert!(!clause_sum.is_zero() || n == 1);
    Ok(PsReduction {
        formula: f.clone(),
        reps,
        tagged,
        periods,
        clause_sum,
        remaining,
        greedy,
        warm,
    })
}
