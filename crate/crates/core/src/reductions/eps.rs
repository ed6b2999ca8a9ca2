//! Literal representatives and the reductions from 3-SAT to exact and concise pinwheel
//! scheduling.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::primes::primes_above;
use crate::instance::{Job, PinwheelInstance};
use crate::num::{rat_big, to_bigint, Rational};
use crate::sat::{lit_var, CnfFormula};
use crate::{Error, Result};

/// Which part of a reduction a job group comes from. Variables and clauses are 1-based;
/// literals are signed variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum JobRole {
    Rep2 { literal: i32 },
    Forced { var: usize },
    Clause { index: usize },
    Greedy { var: usize },
    WarmGreedy { var: usize },
    Filler,
}

impl fmt::Display for JobRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JobRole::Rep2 { literal } if *literal > 0 => write!(f, "rep2 x{literal}"),
            JobRole::Rep2 { literal } => write!(f, "rep2 ~x{}", -literal),
            JobRole::Forced { var } => write!(f, "f{var}"),
            JobRole::Clause { index } => write!(f, "clause {index}"),
            JobRole::Greedy { var } => write!(f, "greedy {var}"),
            JobRole::WarmGreedy { var } => write!(f, "warm {var}"),
            JobRole::Filler => write!(f, "filler"),
        }
    }
}

/// A reduction output whose job groups carry their role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedInstance {
    pub instance: PinwheelInstance,
    pub roles: Vec<JobRole>,
}

impl TaggedInstance {
    pub fn new() -> Self {
        TaggedInstance {
            instance: PinwheelInstance::empty(),
            roles: Vec::new(),
        }
    }

    /// Appends a group of `count` jobs of period `period`; empty groups are skipped.
    pub fn push(&mut self, period: BigUint, count: BigUint, role: JobRole) -> Result<()> {
        if count.is_zero() {
            return Ok(());
        }
        let job = Job::new(Rational::from_integer(to_bigint(&period)))
            .with_multiplicity(count)
            .with_label(role.to_string());
        self.instance.push(job)?;
        self.roles.push(role);
        Ok(())
    }

    /// Group indices with the given role.
    pub fn groups_where(&self, pred: impl Fn(&JobRole) -> bool) -> Vec<usize> {
        (0..self.roles.len())
            .filter(|&g| pred(&self.roles[g]))
            .collect()
    }

    pub fn density(&self) -> Rational {
        self.instance.density()
    }
}

impl Default for TaggedInstance {
    fn default() -> Self {
        Self::new()
    }
}

/// Prime representatives of literals and the derived periods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiteralReps {
    pub n: usize,
    pub m: usize,
    pub v: u64,
    pos: Vec<u64>,
    neg: Vec<u64>,
}

impl LiteralReps {
    pub fn new(f: &CnfFormula) -> Self {
        let n = f.num_vars;
        let m = f.num_clauses();
        let v = n.max(m) as u64;
        let primes = primes_above(v, 2 * n);
        LiteralReps {
            n,
            m,
            v,
            pos: primes.iter().step_by(2).copied().collect(),
            neg: primes.iter().skip(1).step_by(2).copied().collect(),
        }
    }

    pub fn rep1(&self, lit: i32) -> u64 {
        let v = lit_var(lit) - 1;
        if lit > 0 {
            self.pos[v]
        } else {
            self.neg[v]
        }
    }

    pub fn two_n(&self) -> BigUint {
        BigUint::from(2 * self.n)
    }

    pub fn rep2(&self, lit: i32) -> BigUint {
        let p = BigUint::from(self.rep1(lit));
        self.two_n() * &p * &p
    }

    /// Number of rep2 jobs of a literal, `rep1² − rep1`.
    pub fn b(&self, lit: i32) -> BigUint {
        let p = BigUint::from(self.rep1(lit));
        &p * &p - &p
    }

    /// Period of the forced job of a 1-based variable.
    pub fn f(&self, var: usize) -> BigUint {
        let v = var as i32;
        self.two_n() * self.rep1(v) * self.rep1(-v)
    }

    pub fn clause_rep2(&self, clause: &[i32]) -> BigUint {
        let prod = clause
            .iter()
            .fold(BigUint::one(), |acc, &l| acc * self.rep1(l));
        self.two_n() * &prod * &prod
    }

    /// Σ 1/rep2(C_j) over all clauses.
    pub fn clause_sum(&self, f: &CnfFormula) -> Rational {
        f.clauses.iter().fold(Rational::zero(), |acc, c| {
            acc + rat_big(&BigUint::one(), &self.clause_rep2(c))
        })
    }

    /// Density of a variable's literal and forced jobs.
    pub fn base_density(&self, var: usize) -> Rational {
        let v = var as i32;
        rat_big(&self.b(v), &self.rep2(v))
            + rat_big(&self.b(-v), &self.rep2(-v))
            + rat_big(&BigUint::one(), &self.f(var))
    }
}

/// Distinct literals per clause and no clause with a variable and its negation.
pub fn check_normal_form(f: &CnfFormula) -> Result<()> {
    for (j, c) in f.clauses.iter().enumerate() {
        let lits: BTreeSet<i32> = c.iter().copied().collect();
        let vars: BTreeSet<usize> = c.iter().map(|&l| lit_var(l)).collect();
        if c.is_empty() || c.len() > 3 || lits.len() != c.len() || vars.len() != c.len() {
            return Err(Error::MalformedFormula(format!(
                "clause {} must hold one to three literals over distinct variables",
                j + 1
            )));
        }
    }
    Ok(())
}

/// Reduction from 3-SAT to exact pinwheel scheduling.
pub fn red_eps(f: &CnfFormula) -> Result<TaggedInstance> {
    check_normal_form(f)?;
    let reps = LiteralReps::new(f);
    red_eps_with(f, &reps)
}

pub(crate) fn red_eps_with(f: &CnfFormula, reps: &LiteralReps) -> Result<TaggedInstance> {
    let n = f.num_vars as i32;
    let mut out = TaggedInstance::new();
    for lit in (1..=n).chain((1..=n).map(|v| -v)) {
        out.push(reps.rep2(lit), reps.b(lit), JobRole::Rep2 { literal: lit })?;
    }
    for var in 1..=f.num_vars {
        out.push(reps.f(var), BigUint::one(), JobRole::Forced { var })?;
    }
    for (j, c) in f.clauses.iter().enumerate() {
        out.push(
            reps.clause_rep2(c),
            BigUint::one(),
            JobRole::Clause { index: j + 1 },
        )?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConciseReduction {
    pub tagged: TaggedInstance,
    /// LCM of all exact-reduction periods.
    pub lcm: BigUint,
    /// Copies of period `lcm` added to reach density 1.
    pub added: BigUint,
}

/// Reduction from 3-SAT to pinwheel scheduling with binary multiplicities: the exact
/// reduction padded to density 1 with jobs of period equal to the LCM.
pub fn red_concise(f: &CnfFormula) -> Result<ConciseReduction> {
    let mut tagged = red_eps(f)?;
    let groups = tagged.instance.integer_groups()?;
    let lcm = groups.iter().fold(BigUint::one(), |acc, (p, _)| acc.lcm(p));
    let gap = Rational::one() - tagged.density();
    let added = gap * Rational::from_integer(to_bigint(&lcm));
    if !added.is_integer() || added < Rational::zero() {
        return Err(Error::PreconditionViolated(format!(
            "padding count {added} is not a natural number"
        )));
    }
    let added = added.numer().to_biguint().unwrap_or_default();
    tagged.push(lcm.clone(), added.clone(), JobRole::Filler)?;
    Ok(ConciseReduction { tagged, lcm, added })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::gen_random_3sat;

    fn one_clause() -> CnfFormula {
        CnfFormula::new(3, vec![vec![1, 2, 3]]).unwrap()
    }

    #[test]
    fn hand_trace() {
        let f = one_clause();
        let reps = LiteralReps::new(&f);
        assert_eq!(
            [1, -1, 2, -2, 3, -3].map(|l| reps.rep1(l)),
            [5, 7, 11, 13, 17, 19]
        );
        assert_eq!(reps.rep2(1), BigUint::from(150u32));
        assert_eq!(reps.b(1), BigUint::from(20u32));
        assert_eq!(reps.f(1), BigUint::from(210u32));
        assert_eq!(reps.clause_rep2(&[1, 2, 3]), BigUint::from(5_245_350u32));
        let t = red_eps(&f).unwrap();
        assert!(t.density() < Rational::one());
        for (p, _) in t.instance.integer_groups().unwrap() {
            assert!((p % 6u32).is_zero());
        }
    }

    #[test]
    fn concise_is_dense() {
        for seed in 0..5 {
            let f = gen_random_3sat(5, 6, seed).unwrap();
            let c = red_concise(&f).unwrap();
            assert_eq!(c.tagged.density(), Rational::one());
        }
    }

    #[test]
    fn rejects_tautological_clause() {
        let f = CnfFormula::new(2, vec![vec![1, -1, 2]]).unwrap();
        assert!(matches!(red_eps(&f), Err(Error::MalformedFormula(_))));
    }
}
