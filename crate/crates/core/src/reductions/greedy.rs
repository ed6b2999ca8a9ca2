//! Greedy and warm-started greedy job additions over a chain of allowed periods.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::allowed::allowed_periods;
use crate::num::{rat_big, recip, to_bigint, Rational};
use crate::sat::CnfFormula;
use crate::{Error, Result};

/// Job multiset as period → count.
pub type JobCounts = BTreeMap<BigUint, BigUint>;

pub fn counts_density(jobs: &JobCounts) -> Rational {
    jobs.iter()
        .fold(Rational::zero(), |acc, (p, c)| acc + rat_big(c, p))
}

pub fn counts_total(jobs: &JobCounts) -> BigUint {
    jobs.values().sum()
}

fn add(jobs: &mut JobCounts, period: &BigUint, count: BigUint) {
    if !count.is_zero() {
        *jobs.entry(period.clone()).or_default() += count;
    }
}

fn check_range(d: &Rational, lo: &Rational, n: usize, last: &BigUint) -> Result<()> {
    let hi = Rational::new(1.into(), n.into());
    if d < lo || *d > hi {
        return Err(Error::PreconditionViolated(format!(
            "density {d} outside [{lo}, {hi}]"
        )));
    }
    if !(to_bigint(last) % d.denom()).is_zero() {
        return Err(Error::PreconditionViolated(format!(
            "density {d} times the last period is not integral"
        )));
    }
    Ok(())
}

/// Takes ⌊period·d⌋ jobs from each period of the chain `periods[from..]` in order. The
/// density is held as `slots / last`, which every period divides.
fn greedy_loop(periods: &[BigUint], from: usize, slots: &mut BigUint, jobs: &mut JobCounts) {
    let last = periods.last().expect("non-empty chain");
    for p in &periods[from..] {
        let q = last / p;
        let k = &*slots / &q;
        *slots -= &k * &q;
        add(jobs, p, k);
    }
}

/// `d·last` for a density already checked to make it integral.
fn slots_of(d: &Rational, last: &BigUint) -> BigUint {
    (d.numer() * (to_bigint(last) / d.denom()))
        .to_biguint()
        .unwrap_or_default()
}

/// Greedy addition over an explicit chain; `n` is the number of variables.
pub fn greedy_with(periods: &[BigUint], n: usize, d: &Rational) -> Result<JobCounts> {
    let last = periods
        .last()
        .ok_or_else(|| Error::PreconditionViolated("empty period chain".into()))?;
    check_range(d, &Rational::zero(), n, last)?;
    let mut rest = slots_of(d, last);
    let mut jobs = JobCounts::new();
    greedy_loop(periods, 0, &mut rest, &mut jobs);
    debug_assert!(rest.is_zero());
    Ok(jobs)
}

/// Lower end of the admissible density range of the warm-started greedy.
pub fn warm_lower_bound(periods: &[BigUint], n: usize) -> Option<Rational> {
    (periods.len() >= 2).then(|| rat_big(&periods[0], &(BigUint::from(n) * &periods[1])))
}

/// Warm-started greedy over an explicit chain: fixed counts for `periods[2..]` first, then
/// greedy from `periods[1]` on.
pub fn warm_greedy_with(periods: &[BigUint], n: usize, d: &Rational) -> Result<JobCounts> {
    let lo = warm_lower_bound(periods, n).ok_or_else(|| {
        Error::PreconditionViolated("warm greedy needs at least two periods".into())
    })?;
    let last = periods.last().expect("two periods");
    check_range(d, &lo, n, last)?;
    let two_n = BigUint::from(2 * n);
    let mut rest = slots_of(d, last);
    let mut jobs = JobCounts::new();
    for i in 2..periods.len() {
        let k = &periods[0] * &periods[i] / (&two_n * &periods[i - 1]);
        let used = &k * (last / &periods[i]);
        if used > rest {
            return Err(Error::PreconditionViolated(
                "warm start overshoots the density".into(),
            ));
        }
        rest -= used;
        add(&mut jobs, &periods[i], k);
    }
    greedy_loop(periods, 1, &mut rest, &mut jobs);
    debug_assert!(rest.is_zero());
    Ok(jobs)
}

/// Greedy job addition for variable `ind` (1-based) with density `d`.
pub fn greedy_jobs(ind: usize, d: &Rational, f: &CnfFormula) -> Result<JobCounts> {
    greedy_with(&allowed_periods(ind, f)?, f.num_vars, d)
}

/// Warm-started greedy job addition for variable `ind` (1-based) with density `d`.
pub fn warm_greedy_jobs(ind: usize, d: &Rational, f: &CnfFormula) -> Result<JobCounts> {
    warm_greedy_with(&allowed_periods(ind, f)?, f.num_vars, d)
}

/// A random density `k/P` in `[lo, 1/n]` for drawing test inputs.
pub fn sample_density(lo: &Rational, n: usize, last: &BigUint, r: &BigUint) -> Rational {
    let p = Rational::from_integer(to_bigint(last));
    let lo_k = crate::num::ceil_rational(&(lo * &p));
    let hi_k = (recip(&BigUint::from(n)) * &p).floor().to_integer();
    let span = (&hi_k - &lo_k + 1u32)
        .to_biguint()
        .unwrap_or_else(BigUint::one);
    let k = lo_k + to_bigint(&(r % span));
    Rational::new(k, to_bigint(last))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::gen_random_34sat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn greedy_edges() {
        let f = gen_random_34sat(4, 5, 1).unwrap();
        let ps = allowed_periods(2, &f).unwrap();
        assert!(greedy_jobs(2, &Rational::zero(), &f).unwrap().is_empty());
        let one = greedy_jobs(2, &recip(&ps[0]), &f).unwrap();
        assert_eq!(
            one.into_iter().collect::<Vec<_>>(),
            vec![(ps[0].clone(), BigUint::one())]
        );
        let bad = Rational::new(1.into(), to_bigint(&(&ps[3] * 7u32)));
        assert!(matches!(
            greedy_jobs(2, &bad, &f),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn densities_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for seed in 0..3 {
            let f = gen_random_34sat(4, 5, seed).unwrap();
            for ind in 1..=4 {
                let ps = allowed_periods(ind, &f).unwrap();
                let last = ps.last().unwrap();
                let lo = warm_lower_bound(&ps, 4).unwrap();
                for _ in 0..20 {
                    let r = BigUint::from(rng.gen::<u64>());
                    let d = sample_density(&Rational::zero(), 4, last, &r);
                    assert_eq!(counts_density(&greedy_jobs(ind, &d, &f).unwrap()), d);
                    let d = sample_density(&lo, 4, last, &r);
                    let w = warm_greedy_jobs(ind, &d, &f).unwrap();
                    assert_eq!(counts_density(&w), d);
                    assert!(!w.contains_key(&ps[0]));
                }
            }
        }
    }

    #[test]
    fn warm_start_counts() {
        let f = CnfFormula::new(3, vec![vec![1, 2, 3]]).unwrap();
        let ps = allowed_periods(1, &f).unwrap();
        let d = warm_lower_bound(&ps, 3).unwrap();
        let w = warm_greedy_with(&ps, 3, &d).unwrap();
        let expected = &ps[0] * &ps[2] / (BigUint::from(6u32) * &ps[1]);
        let six = BigUint::from(6u32);
        assert_eq!(w.len(), 2);
        assert_eq!(w[&ps[2]], expected);
        assert_eq!(w[&ps[1]], &ps[0] / six);
    }
}
