//! Combining jobs up a divisibility chain and splitting warm-greedy jobs between two
//! neighbouring subschedules. Every merged job remembers the jobs it stands for.

use std::collections::{BTreeMap, VecDeque};
use std::rc::Rc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::greedy::JobCounts;
use crate::num::{rat_big, Rational};
use crate::{Error, Result};

/// What a job in a pool stands for: an original job of some instance group, or a job of period
/// `a` replacing `factor` jobs of period `a·factor`, split as `parts` (counts sum to `factor`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recipe {
    Original(usize),
    Merged {
        factor: BigUint,
        parts: Vec<(BigUint, Rc<Recipe>)>,
    },
}

pub type Segment = (BigUint, Rc<Recipe>);

/// Jobs by period, each period a FIFO of segments of identical jobs.
#[derive(Debug, Clone, Default)]
pub struct Pool {
    by_period: BTreeMap<BigUint, VecDeque<Segment>>,
}

impl Pool {
    pub fn new() -> Self {
        Self::default()
    }

    /// A pool whose jobs of each period all stand for one original group.
    pub fn from_counts(jobs: &JobCounts, group: impl Fn(&BigUint) -> usize) -> Self {
        let mut pool = Pool::new();
        for (p, c) in jobs {
            pool.push(p, c.clone(), Rc::new(Recipe::Original(group(p))));
        }
        pool
    }

    pub fn count(&self, p: &BigUint) -> BigUint {
        self.by_period
            .get(p)
            .map_or_else(BigUint::zero, |q| q.iter().map(|s| &s.0).sum())
    }

    pub fn push(&mut self, p: &BigUint, count: BigUint, recipe: Rc<Recipe>) {
        if !count.is_zero() {
            self.by_period
                .entry(p.clone())
                .or_default()
                .push_back((count, recipe));
        }
    }

    pub fn push_all(&mut self, p: &BigUint, segs: Vec<Segment>) {
        for (c, r) in segs {
            self.push(p, c, r);
        }
    }

    /// Removes `k` jobs of period `p` from the front.
    pub fn take(&mut self, p: &BigUint, mut k: BigUint) -> Result<Vec<Segment>> {
        let mut out = Vec::new();
        let q = self.by_period.entry(p.clone()).or_default();
        while !k.is_zero() {
            let (c, r) = q
                .pop_front()
                .ok_or_else(|| Error::SplitFailed(format!("pool short of period {p}")))?;
            if c > k {
                q.push_front((&c - &k, r.clone()));
                out.push((k, r));
                break;
            }
            k -= &c;
            out.push((c, r));
        }
        if q.is_empty() {
            self.by_period.remove(p);
        }
        Ok(out)
    }

    /// Replaces ⌊count(p)/factor⌋·factor jobs of period `p` by a factor-fold smaller number of
    /// jobs of period `q`.
    pub fn merge_front(&mut self, p: &BigUint, factor: &BigUint, q: &BigUint) -> Result<()> {
        let k = self.count(p) / factor * factor;
        let segs = self.take(p, k)?;
        self.push_all(q, bundle(segs, factor)?);
        Ok(())
    }

    pub fn periods(&self) -> impl Iterator<Item = &BigUint> {
        self.by_period.keys()
    }

    pub fn segments(&self) -> impl Iterator<Item = (&BigUint, &Segment)> {
        self.by_period
            .iter()
            .flat_map(|(p, q)| q.iter().map(move |s| (p, s)))
    }

    pub fn to_counts(&self) -> JobCounts {
        self.by_period
            .keys()
            .map(|p| (p.clone(), self.count(p)))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    pub fn density(&self) -> Rational {
        self.segments()
            .fold(Rational::zero(), |acc, (p, (c, _))| acc + rat_big(c, p))
    }

    pub fn is_empty(&self) -> bool {
        self.by_period.values().all(VecDeque::is_empty)
    }
}

/// Groups segments into bundles of `factor` jobs each; the total must be a multiple of `factor`.
pub fn bundle(segs: Vec<Segment>, factor: &BigUint) -> Result<Vec<Segment>> {
    let mut out = Vec::new();
    let mut partial: Vec<Segment> = Vec::new();
    let mut filled = BigUint::zero();
    for (mut c, r) in segs {
        if !partial.is_empty() {
            let used = (factor - &filled).min(c.clone());
            c -= &used;
            filled += &used;
            partial.push((used, r.clone()));
            if &filled == factor {
                let parts = std::mem::take(&mut partial);
                out.push((
                    BigUint::one(),
                    Rc::new(Recipe::Merged {
                        factor: factor.clone(),
                        parts,
                    }),
                ));
                filled = BigUint::zero();
            }
        }
        let (whole, rest) = c.div_rem(factor);
        if !whole.is_zero() {
            let parts = vec![(factor.clone(), r.clone())];
            out.push((
                whole,
                Rc::new(Recipe::Merged {
                    factor: factor.clone(),
                    parts,
                }),
            ));
        }
        if !rest.is_zero() {
            filled += &rest;
            partial.push((rest, r));
        }
    }
    if !partial.is_empty() {
        return Err(Error::SplitFailed(format!(
            "{filled} jobs left over when bundling by {factor}"
        )));
    }
    Ok(out)
}

fn check_periods<'a>(mut it: impl Iterator<Item = &'a BigUint>, periods: &[BigUint]) -> Result<()> {
    match it.find(|p| !periods.contains(p)) {
        Some(p) => Err(Error::PeriodNotAllowed(format!(
            "period {p} is not in the allowed list"
        ))),
        None => Ok(()),
    }
}

/// Combines jobs of each period `periods[i]`, `i > level`, into jobs of `periods[i − 1]`, from
/// the longest period down.
pub fn combine_pool(pool: &mut Pool, periods: &[BigUint], level: usize) -> Result<()> {
    check_periods(pool.periods(), periods)?;
    for i in (level + 1..periods.len()).rev() {
        let factor = &periods[i] / &periods[i - 1];
        pool.merge_front(&periods[i], &factor, &periods[i - 1])?;
    }
    Ok(())
}

pub fn combine_jobs(jobs: &JobCounts, periods: &[BigUint], level: usize) -> Result<JobCounts> {
    let mut pool = Pool::from_counts(jobs, |_| 0);
    combine_pool(&mut pool, periods, level)?;
    Ok(pool.to_counts())
}

/// Splits the warm-greedy pool of one variable into the part kept (periods of `periods_i`) and
/// the part converted to the jobs `g` of the next variable. `two_n` is twice the variable count.
pub fn split_pool(
    periods_i: &[BigUint],
    wg: Pool,
    g: &JobCounts,
    two_n: &BigUint,
) -> Result<(Pool, Pool)> {
    let mut wg = wg;
    let mut g = g.clone();
    let mut moved = Pool::new();
    let m0 = &periods_i[0] / two_n;
    let mut convert = |wg: &mut Pool, g: &mut JobCounts, m: &BigUint| -> Result<()> {
        for (p, need) in g.iter_mut() {
            let src = p * m;
            let k = (wg.count(&src) / m).min(need.clone());
            if k.is_zero() {
                continue;
            }
            let segs = wg.take(&src, &k * m)?;
            moved.push_all(p, if m.is_one() { segs } else { bundle(segs, m)? });
            *need -= k;
        }
        g.retain(|_, c| !c.is_zero());
        Ok(())
    };
    convert(&mut wg, &mut g, &BigUint::one())?;
    convert(&mut wg, &mut g, &m0)?;
    combine_pool(&mut wg, periods_i, 1)?;
    convert(&mut wg, &mut g, &m0)?;
    if let Some((p, c)) = g.iter().next() {
        return Err(Error::SplitFailed(format!(
            "{c} jobs of period {p} left unconverted"
        )));
    }
    Ok((wg, moved))
}

pub fn split_jobs(
    periods_i: &[BigUint],
    wg: &JobCounts,
    g: &JobCounts,
    two_n: &BigUint,
) -> Result<(JobCounts, JobCounts)> {
    let (keep, moved) = split_pool(periods_i, Pool::from_counts(wg, |_| 0), g, two_n)?;
    Ok((keep.to_counts(), moved.to_counts()))
}

/// Number of original jobs a recipe expands to, per job.
pub fn recipe_size(r: &Recipe) -> BigUint {
    match r {
        Recipe::Original(_) => BigUint::one(),
        Recipe::Merged { parts, .. } => parts.iter().map(|(c, r)| c * recipe_size(r)).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::greedy::{counts_density, greedy_with};
    use super::super::ps::red_ps_detailed;
    use super::*;
    use crate::sat::gen_random_34sat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn b(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn counts(v: &[(u64, u64)]) -> JobCounts {
        v.iter().map(|&(p, c)| (b(p), b(c))).collect()
    }

    #[test]
    fn combine_basics() {
        let periods = [b(4), b(12), b(48)];
        let j = counts(&[(4, 3)]);
        assert_eq!(combine_jobs(&j, &periods, 0).unwrap(), j);
        assert_eq!(
            combine_jobs(&counts(&[(12, 3)]), &periods, 0).unwrap(),
            counts(&[(4, 1)])
        );
        assert!(matches!(
            combine_jobs(&counts(&[(5, 1)]), &periods, 0),
            Err(Error::PeriodNotAllowed(_))
        ));
    }

    #[test]
    fn combine_preserves_density() {
        let periods = [b(6), b(30), b(210), b(2310)];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let j: JobCounts = periods[1..]
                .iter()
                .map(|p| (p.clone(), b(rng.gen_range(0..40))))
                .filter(|(_, c)| !c.is_zero())
                .collect();
            for level in 0..2 {
                let out = combine_jobs(&j, &periods, level).unwrap();
                assert_eq!(counts_density(&out), counts_density(&j));
                if level == 0 {
                    let r = out.get(&periods[0]).cloned().unwrap_or_default();
                    let d = counts_density(&out);
                    assert!(rat_big(&r, &periods[0]) <= d);
                    assert!(d < rat_big(&(r + 1u32), &periods[0]));
                }
            }
        }
    }

    #[test]
    fn bundles_keep_composition() {
        let segs = vec![
            (b(5), Rc::new(Recipe::Original(0))),
            (b(7), Rc::new(Recipe::Original(1))),
        ];
        let out = bundle(segs, &b(4)).unwrap();
        let total: BigUint = out.iter().map(|(c, r)| c * recipe_size(r)).sum();
        assert_eq!(total, b(12));
        assert_eq!(out.len(), 3);
        assert!(bundle(vec![(b(3), Rc::new(Recipe::Original(0)))], &b(2)).is_err());
    }

    #[test]
    fn split_empties_greedy() {
        for seed in 0..4 {
            let f = gen_random_34sat(4, 4, seed).unwrap();
            let r = red_ps_detailed(&f).unwrap();
            let n = f.num_vars;
            let two_n = b(2 * n as u64);
            for i in 0..n - 1 {
                let wg = &r.warm[i];
                let (keep, moved) =
                    split_jobs(&r.periods[i], wg, &JobCounts::new(), &two_n).unwrap();
                assert!(moved.is_empty());
                assert_eq!(keep, combine_jobs(wg, &r.periods[i], 1).unwrap());
                let last = r.periods[i + 1].last().unwrap();
                for k in [1u32, 3, 17] {
                    let d5 = &r.clause_sum * Rational::new(k.into(), 20.into());
                    let d5 = (d5 * Rational::from_integer(crate::num::to_bigint(last))).floor()
                        / Rational::from_integer(crate::num::to_bigint(last));
                    let g = greedy_with(&r.periods[i + 1], n, &d5).unwrap();
                    let (keep, moved) = split_jobs(&r.periods[i], wg, &g, &two_n).unwrap();
                    assert_eq!(moved, g);
                    assert!(keep.keys().all(|p| r.periods[i].contains(p)));
                    assert_eq!(
                        counts_density(&keep) + counts_density(&moved),
                        counts_density(wg)
                    );
                }
            }
        }
    }
}
