//! Extends an exact schedule by a divisibility chain of jobs placed in its holidays.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::exact::offsets::{divisible_chain_offsets, validate_offsets_raw, EpsOffsetAssignment};
use crate::exec::Exec;
use crate::num::{rat, Rational};
use crate::{Error, Result};

/// Holiday enumeration limit for one period of `A`.
pub const FILL_PERIOD_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsFill {
    /// Offsets of `A` followed by offsets of `B`.
    pub assignment: EpsOffsetAssignment,
    /// Padding jobs used while scheduling the rescaled chain.
    pub fillers: u64,
}

fn density(periods: &[u64]) -> Rational {
    periods.iter().map(|&p| rat(1, p as i64)).sum()
}

/// Places the chain `b` in the holidays of the valid offsets `a_offsets` for `a_periods`.
/// Each `b_i` must be a multiple of `L = lcm(a)` and the `b_i` must form a divisibility chain.
pub fn eps_fill(a_periods: &[u64], a_offsets: &[u64], b_periods: &[u64]) -> Result<EpsFill> {
    if !validate_offsets_raw(a_periods, a_offsets, Exec::Sequential)?.is_valid() {
        return Err(Error::InvalidSchedule("offsets of A collide".into()));
    }
    let mut l = 1u64;
    for &a in a_periods {
        l = l.lcm(&a);
        if l > FILL_PERIOD_LIMIT {
            return Err(Error::BudgetExceeded(l));
        }
    }
    if b_periods.iter().any(|&b| b == 0 || b % l != 0) {
        return Err(Error::NotDivisibleChain);
    }
    if density(a_periods) + density(b_periods) > Rational::one() {
        return Err(Error::DensityExceeded(
            "A and B together exceed density 1".into(),
        ));
    }
    let mut busy = vec![false; l as usize];
    for (&a, &o) in a_periods.iter().zip(a_offsets) {
        (o..l)
            .step_by(a as usize)
            .for_each(|t| busy[t as usize] = true);
    }
    let holidays: Vec<u64> = (0..l).filter(|&t| !busy[t as usize]).collect();
    let h = holidays.len() as u64;
    let mut out = a_offsets.to_vec();
    if b_periods.is_empty() {
        return Ok(EpsFill {
            assignment: EpsOffsetAssignment { offsets: out },
            fillers: 0,
        });
    }
    let scaled: Vec<u64> = b_periods.iter().map(|&b| b / l * h).collect();
    let top = scaled.iter().copied().fold(1u64, |acc, x| acc.lcm(&x));
    let gap = (Rational::one() - density(&scaled)) * Rational::from_integer(top.into());
    let fillers = gap
        .to_integer()
        .to_biguint()
        .and_then(|x| u64::try_from(x).ok())
        .filter(|_| gap.is_integer())
        .ok_or_else(|| Error::DensityExceeded("rescaled chain exceeds density 1".into()))?;
    let mut padded = scaled.clone();
    padded.extend(std::iter::repeat(top).take(fillers as usize));
    let offs = divisible_chain_offsets(&padded)?;
    for (i, &b) in b_periods.iter().enumerate() {
        let o = offs[i];
        let t = holidays[(o % h) as usize] + l * (o / h);
        out.push(t % b);
    }
    Ok(EpsFill {
        assignment: EpsOffsetAssignment { offsets: out },
        fillers,
    })
}

/// Whether `b` sorted ascending forms a divisibility chain.
pub fn is_divisible_chain(b: &[BigUint]) -> bool {
    let mut v = b.to_vec();
    v.sort();
    v.windows(2).all(|w| (&w[1] % &w[0]).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_a() {
        let r = eps_fill(&[], &[], &[4, 4, 8, 8]).unwrap();
        assert_eq!(r.fillers, 2);
        assert!(
            validate_offsets_raw(&[4, 4, 8, 8], &r.assignment.offsets, Exec::Sequential)
                .unwrap()
                .is_valid()
        );
    }

    #[test]
    fn empty_b_and_full() {
        let r = eps_fill(&[2, 4], &[0, 1], &[]).unwrap();
        assert_eq!(r.assignment.offsets, vec![0, 1]);
        let r = eps_fill(&[2, 4], &[0, 1], &[8, 8]).unwrap();
        assert_eq!(r.fillers, 0);
        assert!(
            validate_offsets_raw(&[2, 4, 8, 8], &r.assignment.offsets, Exec::Sequential)
                .unwrap()
                .is_valid()
        );
    }

    #[test]
    fn around_irregular_holidays() {
        let a = [3, 6];
        let offs = [0, 1];
        let b = [12, 24, 24, 48];
        let r = eps_fill(&a, &offs, &b).unwrap();
        let all: Vec<u64> = a.iter().chain(&b).copied().collect();
        assert!(
            validate_offsets_raw(&all, &r.assignment.offsets, Exec::Sequential)
                .unwrap()
                .is_valid()
        );
        assert!(matches!(
            eps_fill(&a, &offs, &[12, 18]),
            Err(Error::NotDivisibleChain)
        ));
        assert!(matches!(
            eps_fill(&a, &offs, &[6, 6, 6, 6]),
            Err(Error::DensityExceeded(_))
        ));
    }
}
