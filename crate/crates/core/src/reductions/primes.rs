//! Prime enumeration by sieving.

fn sieve(limit: u64) -> Vec<bool> {
    let n = limit as usize + 1;
    let mut is = vec![true; n];
    is[0] = false;
    if n > 1 {
        is[1] = false;
    }
    let mut i = 2;
    while i * i < n {
        if is[i] {
            for k in (i * i..n).step_by(i) {
                is[k] = false;
            }
        }
        i += 1;
    }
    is
}

/// The first `count` primes strictly greater than `v`, ascending.
pub fn primes_above(v: u64, count: usize) -> Vec<u64> {
    let mut limit = (2 * v + 64).max(v.saturating_mul(v).min(v + 4096));
    loop {
        let is = sieve(limit);
        let found: Vec<u64> = ((v + 1)..=limit)
            .filter(|&p| is[p as usize])
            .take(count)
            .collect();
        if found.len() == count {
            return found;
        }
        limit *= 2;
    }
}

/// Number of primes `p` with `lo < p ≤ hi`.
pub fn count_primes_between(lo: u64, hi: u64) -> usize {
    if hi <= lo {
        return 0;
    }
    let is = sieve(hi);
    ((lo + 1)..=hi).filter(|&p| is[p as usize]).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(primes_above(3, 6), vec![5, 7, 11, 13, 17, 19]);
        assert!(primes_above(3, 6).iter().all(|&p| p <= 27));
        assert_eq!(primes_above(1, 3), vec![2, 3, 5]);
        assert_eq!(count_primes_between(10, 30), 6);
        for v in 3..=8u64 {
            assert!(count_primes_between(v, v * v * v) >= 2 * v as usize);
        }
    }
}
