//! Allowed job periods per variable: divisibility chains built from clause and literal primes.

use num_bigint::BigUint;
use num_traits::One;

use super::eps::LiteralReps;
use crate::sat::{lit_var, CnfFormula};
use crate::{Error, Result};

/// One step of the chain: the primes (with repetition) multiplied into the running period.
fn step_primes(f: &CnfFormula, reps: &LiteralReps, var: usize) -> Vec<u64> {
    let v = var as i32;
    let mut primes = Vec::new();
    let mut clauses = 0usize;
    for c in f
        .clauses
        .iter()
        .filter(|c| c.iter().any(|&l| lit_var(l) == var))
    {
        for &l in c {
            primes.extend([reps.rep1(l); 2]);
        }
        clauses += 1;
    }
    primes.extend([reps.rep1(v); 2]);
    primes.extend([reps.rep1(-v); 2]);
    primes.extend(std::iter::repeat(reps.rep1(v)).take(4usize.saturating_sub(clauses) * 6));
    primes
}

fn check(f: &CnfFormula, ind: usize) -> Result<()> {
    f.check_34sat().map_err(Error::Not34Sat)?;
    if ind == 0 || ind > f.num_vars {
        return Err(Error::PreconditionViolated(format!(
            "variable index {ind} outside 1..={}",
            f.num_vars
        )));
    }
    Ok(())
}

/// Variable visited at step `i` of the chain for `ind` (both 1-based variables, `i` from 0).
pub fn step_variable(ind: usize, i: usize, n: usize) -> usize {
    (ind + i - 1) % n + 1
}

/// Number of primes multiplied in at each step of the chain for `ind`.
pub fn step_prime_counts(ind: usize, f: &CnfFormula) -> Result<Vec<usize>> {
    check(f, ind)?;
    let reps = LiteralReps::new(f);
    let n = f.num_vars;
    Ok((0..n)
        .map(|i| step_primes(f, &reps, step_variable(ind, i, n)).len())
        .collect())
}

/// The `n` allowed periods for variable `ind` (1-based), strictly increasing and each dividing
/// the next.
pub fn allowed_periods(ind: usize, f: &CnfFormula) -> Result<Vec<BigUint>> {
    check(f, ind)?;
    Ok(allowed_periods_with(ind, f, &LiteralReps::new(f)))
}

pub(crate) fn allowed_periods_with(ind: usize, f: &CnfFormula, reps: &LiteralReps) -> Vec<BigUint> {
    let n = f.num_vars;
    let mut period = reps.two_n();
    (0..n)
        .map(|i| {
            let step = step_primes(f, reps, step_variable(ind, i, n))
                .into_iter()
                .fold(BigUint::one(), |acc, p| acc * p);
            period = &period * step;
            period.clone()
        })
        .collect()
}

/// Allowed periods for every variable, indexed from 0.
pub fn all_allowed_periods(f: &CnfFormula) -> Result<Vec<Vec<BigUint>>> {
    f.check_34sat().map_err(Error::Not34Sat)?;
    let reps = LiteralReps::new(f);
    Ok((1..=f.num_vars)
        .map(|i| allowed_periods_with(i, f, &reps))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::pow_u;
    use crate::sat::gen_random_34sat;
    use num_traits::Zero;

    #[test]
    fn chain_invariants() {
        for seed in 0..10 {
            let f = gen_random_34sat(5, 6, seed).unwrap();
            let all = all_allowed_periods(&f).unwrap();
            let n = f.num_vars;
            let two_n = BigUint::from(2 * n);
            let v = n.max(f.num_clauses()) as u64;
            for (i, ps) in all.iter().enumerate() {
                assert_eq!(ps[n - 1], all[0][n - 1]);
                assert_eq!(step_prime_counts(i + 1, &f).unwrap(), vec![28; n]);
                assert!(&two_n * pow_u(v, 28) <= ps[0] && ps[0] <= &two_n * pow_u(v, 84));
                let next = &all[(i + 1) % n];
                for j in 1..n {
                    assert!((&ps[j] % &ps[j - 1]).is_zero());
                    assert_eq!(&two_n * &ps[j], &ps[0] * &next[j - 1]);
                }
            }
        }
    }

    #[test]
    fn rejects_non_34sat() {
        let f = CnfFormula::new(3, vec![vec![1, 2, 3]; 5]).unwrap();
        assert!(matches!(allowed_periods(1, &f), Err(Error::Not34Sat(_))));
    }
}
