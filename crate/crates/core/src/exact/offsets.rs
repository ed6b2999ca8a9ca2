//! Exact pinwheel schedules as residue classes: explicit offsets for small instances and
//! symbolic residue ranges for instances whose job counts and periods are astronomically large.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exec::Exec;
use crate::instance::PinwheelInstance;
use crate::num::{linear_mod_hits_below, mod_inverse, sub_mod};
use crate::schedule::{Schedule, Slot};
use crate::{Error, Result};

/// One offset per multiplicity-expanded job: job `i` runs at every `t ≡ offsets[i] (mod a_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsOffsetAssignment {
    pub offsets: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OffsetVerdict {
    Valid,
    Collision(usize, usize),
}

impl OffsetVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, OffsetVerdict::Valid)
    }
}

/// Two jobs collide iff their offsets agree modulo the gcd of their periods.
pub fn validate_offsets(
    inst: &PinwheelInstance,
    offs: &EpsOffsetAssignment,
) -> Result<OffsetVerdict> {
    let periods = inst.integer_periods()?;
    validate_offsets_raw(&periods, &offs.offsets, Exec::auto())
}

pub fn validate_offsets_raw(periods: &[u64], offsets: &[u64], exec: Exec) -> Result<OffsetVerdict> {
    if periods.len() != offsets.len() {
        return Err(Error::InvalidSchedule(format!(
            "{} offsets for {} jobs",
            offsets.len(),
            periods.len()
        )));
    }
    if let Some(i) = (0..periods.len()).find(|&i| offsets[i] >= periods[i]) {
        return Err(Error::InvalidSchedule(format!(
            "offset {} of job {} not below its period {}",
            offsets[i],
            i + 1,
            periods[i]
        )));
    }
    let hit = exec.find_first(periods.len(), |i| {
        (i + 1..periods.len())
            .find(|&j| {
                offsets[i] % periods[i].gcd(&periods[j]) == offsets[j] % periods[i].gcd(&periods[j])
            })
            .map(|j| (i, j))
    });
    Ok(match hit {
        Some((i, j)) => OffsetVerdict::Collision(i, j),
        None => OffsetVerdict::Valid,
    })
}

/// The slot schedule over one LCM period induced by offsets, if that period is at most `limit`.
pub fn offsets_to_schedule(periods: &[u64], offsets: &[u64], limit: u64) -> Result<Schedule> {
    let mut l = 1u64;
    for &a in periods {
        l = l.lcm(&a);
        if l > limit {
            return Err(Error::BudgetExceeded(l));
        }
    }
    let mut slots = vec![Slot::Holiday; l as usize];
    for (i, (&a, &o)) in periods.iter().zip(offsets).enumerate() {
        let mut t = o;
        while t < l {
            if slots[t as usize] != Slot::Holiday {
                return Err(Error::InvalidSchedule(format!("slot {t} used twice")));
            }
            slots[t as usize] = Slot::Job(i);
            t += a;
        }
    }
    Schedule::new(slots)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EpsSearch {
    Found(EpsOffsetAssignment),
    Exhausted,
}

/// Backtracking over offsets, shortest period first. Jobs of equal period take increasing
/// offsets, which removes their permutation symmetry.
pub fn solve_eps_offsets(inst: &PinwheelInstance, budget: u64) -> Result<EpsSearch> {
    let periods = inst.integer_periods()?;
    if inst.density() > crate::num::rat(1, 1) {
        return Ok(EpsSearch::Exhausted);
    }
    let mut order: Vec<usize> = (0..periods.len()).collect();
    order.sort_by_key(|&i| (periods[i], i));
    let a: Vec<u64> = order.iter().map(|&i| periods[i]).collect();
    let n = a.len();
    let mut chosen = vec![0u64; n];
    let mut next = vec![0u64; n];
    let mut nodes = 0u64;
    let mut k = 0usize;
    if n > 0 {
        next[0] = 0;
    }
    while k < n {
        let mut placed = false;
        while next[k] < a[k] {
            let o = next[k];
            next[k] += 1;
            nodes += 1;
            if nodes > budget {
                return Err(Error::BudgetExceeded(nodes));
            }
            let ok = (0..k).all(|j| {
                let g = a[j].gcd(&a[k]);
                chosen[j] % g != o % g
            });
            if ok {
                chosen[k] = o;
                placed = true;
                break;
            }
        }
        if placed {
            k += 1;
            if k < n {
                next[k] = if a[k] == a[k - 1] {
                    chosen[k - 1] + 1
                } else {
                    0
                };
            }
        } else {
            if k == 0 {
                return Ok(EpsSearch::Exhausted);
            }
            k -= 1;
        }
    }
    let mut offsets = vec![0u64; n];
    for (pos, &i) in order.iter().enumerate() {
        offsets[i] = chosen[pos];
    }
    Ok(EpsSearch::Found(EpsOffsetAssignment { offsets }))
}

/// First-fit offsets for periods forming a divisibility chain with density at most 1.
/// Returned offsets follow the input order.
pub fn divisible_chain_offsets(periods: &[u64]) -> Result<Vec<u64>> {
    let mut order: Vec<usize> = (0..periods.len()).collect();
    order.sort_by_key(|&i| (periods[i], i));
    for w in order.windows(2) {
        if periods[w[1]] % periods[w[0]] != 0 {
            return Err(Error::NotDivisibleChain);
        }
    }
    let mut free = FreeList::new(BigUint::one());
    let mut offsets = vec![0u64; periods.len()];
    for &i in &order {
        let got = free
            .take(&BigUint::from(periods[i]), &BigUint::one())
            .ok_or_else(|| Error::DensityExceeded("divisible chain over-full".into()))?;
        offsets[i] = got[0].range.class(&BigUint::zero()).to_u64().unwrap_or(0);
    }
    Ok(offsets)
}

/// Residue classes `base + stride·y (mod modulus)` for `y ∈ [lo, hi)`, with `stride | modulus`,
/// `base < stride` and `hi ≤ modulus/stride`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueRange {
    #[serde(with = "crate::serde_num::biguint")]
    pub base: BigUint,
    #[serde(with = "crate::serde_num::biguint")]
    pub stride: BigUint,
    #[serde(with = "crate::serde_num::biguint")]
    pub modulus: BigUint,
    #[serde(with = "crate::serde_num::biguint")]
    pub lo: BigUint,
    #[serde(with = "crate::serde_num::biguint")]
    pub hi: BigUint,
}

impl ResidueRange {
    pub fn new(
        base: BigUint,
        stride: BigUint,
        modulus: BigUint,
        lo: BigUint,
        hi: BigUint,
    ) -> Result<Self> {
        let r = ResidueRange {
            base,
            stride,
            modulus,
            lo,
            hi,
        };
        r.check()?;
        Ok(r)
    }

    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::MalformedRepr(format!("residue range {self:?}: {m}")));
        if self.stride.is_zero() || !(&self.modulus % &self.stride).is_zero() {
            return bad("stride must divide the modulus");
        }
        if self.base >= self.stride {
            return bad("base must be below the stride");
        }
        if self.lo > self.hi || self.hi > &self.modulus / &self.stride {
            return bad("index range out of bounds");
        }
        Ok(())
    }

    /// The single class `r (mod m)`.
    pub fn singleton(r: &BigUint, m: &BigUint) -> Self {
        ResidueRange {
            base: r % m,
            stride: m.clone(),
            modulus: m.clone(),
            lo: BigUint::zero(),
            hi: BigUint::one(),
        }
    }

    pub fn len(&self) -> BigUint {
        &self.hi - &self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    /// The `k`-th class of the range, `0 ≤ k < len`.
    pub fn class(&self, k: &BigUint) -> BigUint {
        &self.base + &self.stride * (&self.lo + k)
    }

    pub fn contains(&self, t: &BigUint) -> bool {
        let r = t % &self.modulus;
        if (&r % &self.stride) != self.base {
            return false;
        }
        let y = (r - &self.base) / &self.stride;
        self.lo <= y && y < self.hi
    }

    /// Whether some integer lies in a class of both ranges.
    pub fn intersects(&self, other: &ResidueRange) -> bool {
        if self.is_empty() || other.is_empty() {
            return false;
        }
        let g = self.modulus.gcd(&other.modulus);
        // s1·y1 - s2·y2 ≡ δ (mod g)
        let delta = sub_mod(&other.base, &self.base, &g);
        let s1 = &self.stride % &g;
        let s2 = &other.stride % &g;
        let g1 = s1.gcd(&g);
        let g2 = s2.gcd(&g1);
        // g1 | s1 and g1 | g, so s2·y2 ≡ -δ (mod g1) must be solvable
        let neg_delta = sub_mod(&BigUint::zero(), &delta, &g1);
        if !(&neg_delta % &g2).is_zero() {
            return false;
        }
        let t_mod = &g1 / &g2;
        let w0 = if t_mod.is_one() {
            BigUint::zero()
        } else {
            let inv =
                mod_inverse(&(&s2 / &g2 % &t_mod), &t_mod).expect("coprime after dividing by gcd");
            (&neg_delta / &g2) * inv % &t_mod
        };
        // y2 = w0 + T·t must lie in [lo2, hi2)
        let first = if other.lo <= w0 {
            BigUint::zero()
        } else {
            (&other.lo - &w0).div_ceil(&t_mod)
        };
        if &w0 + &t_mod * &first >= other.hi {
            return false;
        }
        let count = (&other.hi - &w0 - &t_mod * &first - 1u32) / &t_mod + 1u32;
        let gp = &g / &g1;
        let len1 = self.len();
        if len1 >= gp {
            return true;
        }
        let inv1 = mod_inverse(&(&s1 / &g1 % &gp), &gp).expect("coprime after dividing by gcd");
        let num = (&delta + &s2 * &w0) % &g;
        debug_assert!((&num % &g1).is_zero());
        let alpha = (&num / &g1) * &inv1 % &gp;
        let beta = (&s2 / &g2) * &inv1 % &gp;
        // y1 ≡ α + β·t (mod g'), needs a representative in [lo1, hi1)
        let b = sub_mod(&(&alpha + &beta * &first), &self.lo, &gp);
        linear_mod_hits_below(&count, &gp, &beta, &b, &len1)
    }
}

/// Jobs of period `period` occupying every lift of the classes in `range`; `range.modulus`
/// divides `period`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub range: ResidueRange,
    #[serde(with = "crate::serde_num::biguint")]
    pub period: BigUint,
}

impl Piece {
    pub fn new(range: ResidueRange, period: BigUint) -> Result<Self> {
        if period.is_zero() || !(&period % &range.modulus).is_zero() {
            return Err(Error::MalformedRepr(
                "piece modulus must divide its period".into(),
            ));
        }
        Ok(Piece { range, period })
    }

    pub fn jobs(&self) -> BigUint {
        self.range.len() * (&self.period / &self.range.modulus)
    }

    /// The same jobs viewed with period multiplied by `factor`.
    pub fn lift(&self, factor: &BigUint) -> Piece {
        Piece {
            range: self.range.clone(),
            period: &self.period * factor,
        }
    }

    /// Splits off the first `k` jobs; `None` if the piece holds fewer.
    pub fn split(&self, k: &BigUint) -> Option<(Vec<Piece>, Vec<Piece>)> {
        if *k > self.jobs() {
            return None;
        }
        let r = &self.range;
        let f = &self.period / &r.modulus;
        let (q, rem) = k.div_rem(&f);
        let mut head = Vec::new();
        let mut tail = Vec::new();
        let mid = &r.lo + &q;
        if !q.is_zero() {
            head.push(self.sub(r.lo.clone(), mid.clone()));
        }
        if rem.is_zero() {
            if mid < r.hi {
                tail.push(self.sub(mid, r.hi.clone()));
            }
        } else {
            let x = r.class(&q);
            let lifted = |lo: BigUint, hi: BigUint| Piece {
                range: ResidueRange {
                    base: x.clone(),
                    stride: r.modulus.clone(),
                    modulus: self.period.clone(),
                    lo,
                    hi,
                },
                period: self.period.clone(),
            };
            head.push(lifted(BigUint::zero(), rem.clone()));
            tail.push(lifted(rem, f.clone()));
            let after = &mid + 1u32;
            if after < r.hi {
                tail.push(self.sub(after, r.hi.clone()));
            }
        }
        Some((head, tail))
    }

    fn sub(&self, lo: BigUint, hi: BigUint) -> Piece {
        Piece {
            range: ResidueRange {
                lo,
                hi,
                ..self.range.clone()
            },
            period: self.period.clone(),
        }
    }
}

/// Ordered free space: residue ranges handed out front to back.
#[derive(Debug, Clone)]
pub struct FreeList {
    ranges: std::collections::VecDeque<ResidueRange>,
}

impl FreeList {
    /// All integers, as the single class `0 (mod unit)` repeated over `unit` classes.
    pub fn new(unit: BigUint) -> Self {
        let mut ranges = std::collections::VecDeque::new();
        ranges.push_back(ResidueRange {
            base: BigUint::zero(),
            stride: BigUint::one(),
            modulus: unit.clone(),
            lo: BigUint::zero(),
            hi: unit,
        });
        FreeList { ranges }
    }

    pub fn from_ranges(ranges: Vec<ResidueRange>) -> Self {
        FreeList {
            ranges: ranges.into_iter().filter(|r| !r.is_empty()).collect(),
        }
    }

    pub fn ranges(&self) -> impl Iterator<Item = &ResidueRange> {
        self.ranges.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    /// Takes `count` jobs of period `period` from the front. Every free range's modulus must
    /// divide `period`, which holds when periods are requested in divisibility order.
    pub fn take(&mut self, period: &BigUint, count: &BigUint) -> Option<Vec<Piece>> {
        let mut need = count.clone();
        let mut out = Vec::new();
        while !need.is_zero() {
            let r = self.ranges.pop_front()?;
            if !(period % &r.modulus).is_zero() {
                self.ranges.push_front(r);
                return None;
            }
            let piece = Piece {
                range: r,
                period: period.clone(),
            };
            let have = piece.jobs();
            if have <= need {
                need -= &have;
                out.push(piece);
            } else {
                let (head, tail) = piece.split(&need)?;
                need = BigUint::zero();
                out.extend(head);
                for p in tail.into_iter().rev() {
                    self.ranges.push_front(p.range);
                }
            }
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PieceVerdict {
    Valid,
    CountMismatch {
        group: usize,
        expected: BigUint,
        found: BigUint,
    },
    WrongPeriod {
        group: usize,
        piece: usize,
    },
    Collision {
        a: (usize, usize),
        b: (usize, usize),
    },
}

impl PieceVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, PieceVerdict::Valid)
    }
}

/// A symbolic offset assignment: pieces for each job group, indexed like the instance's jobs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicAssignment {
    pub groups: Vec<Vec<Piece>>,
}

impl SymbolicAssignment {
    /// Number of pieces covering `t` (1 everywhere for an exact cover).
    pub fn coverage_at(&self, t: &BigUint) -> usize {
        self.groups
            .iter()
            .flatten()
            .filter(|p| p.range.contains(t))
            .count()
    }

    pub fn piece_count(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Explicit offsets when every group is small enough to enumerate.
    pub fn to_explicit(&self, limit: u64) -> Result<EpsOffsetAssignment> {
        let mut offsets = Vec::new();
        for g in &self.groups {
            for p in g {
                let f = (&p.period / &p.range.modulus)
                    .to_u64()
                    .ok_or(Error::BudgetExceeded(limit))?;
                let len = p.range.len().to_u64().ok_or(Error::BudgetExceeded(limit))?;
                if (offsets.len() as u64).saturating_add(len.saturating_mul(f)) > limit {
                    return Err(Error::BudgetExceeded(limit));
                }
                for y in 0..len {
                    let c = p.range.class(&BigUint::from(y));
                    for lift in 0..f {
                        let o = &c + &p.range.modulus * lift;
                        offsets.push(o.to_u64().ok_or(Error::BudgetExceeded(limit))?);
                    }
                }
            }
        }
        Ok(EpsOffsetAssignment { offsets })
    }
}

/// Validates a symbolic assignment against `(period, multiplicity)` groups: each group's pieces
/// carry its period and total its multiplicity, and no two pieces share an integer.
pub fn validate_pieces(
    groups: &[(BigUint, BigUint)],
    a: &SymbolicAssignment,
    exec: Exec,
) -> Result<PieceVerdict> {
    if groups.len() != a.groups.len() {
        return Err(Error::InvalidSchedule(format!(
            "{} piece groups for {} job groups",
            a.groups.len(),
            groups.len()
        )));
    }
    for (gi, ((period, mult), pieces)) in groups.iter().zip(&a.groups).enumerate() {
        let mut total = BigUint::zero();
        for (pi, p) in pieces.iter().enumerate() {
            p.range.check()?;
            if &p.period != period || !(&p.period % &p.range.modulus).is_zero() {
                return Ok(PieceVerdict::WrongPeriod {
                    group: gi,
                    piece: pi,
                });
            }
            total += p.jobs();
        }
        if &total != mult {
            return Ok(PieceVerdict::CountMismatch {
                group: gi,
                expected: mult.clone(),
                found: total,
            });
        }
    }
    let flat: Vec<((usize, usize), &ResidueRange)> = a
        .groups
        .iter()
        .enumerate()
        .flat_map(|(g, ps)| ps.iter().enumerate().map(move |(i, p)| ((g, i), &p.range)))
        .filter(|(_, r)| !r.is_empty())
        .collect();
    // classes modulo the gcd of all strides separate pieces that can never meet
    let q = flat
        .iter()
        .fold(BigUint::zero(), |acc, (_, r)| acc.gcd(&r.stride));
    let mut buckets: HashMap<BigUint, Vec<usize>> = HashMap::new();
    for (k, (_, r)) in flat.iter().enumerate() {
        let key = if q.is_zero() {
            BigUint::zero()
        } else {
            &r.base % &q
        };
        buckets.entry(key).or_default().push(k);
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for members in buckets.values() {
        for (x, &i) in members.iter().enumerate() {
            pairs.extend(members[x + 1..].iter().map(|&j| (i.min(j), i.max(j))));
        }
    }
    pairs.sort_unstable();
    let hit = exec.find_first(pairs.len(), |k| {
        let (i, j) = pairs[k];
        flat[i]
            .1
            .intersects(flat[j].1)
            .then_some((flat[i].0, flat[j].0))
    });
    Ok(match hit {
        Some((a, b)) => PieceVerdict::Collision { a, b },
        None => PieceVerdict::Valid,
    })
}

/// Random probes of an assignment meant to cover every integer exactly once. Returns a probe
/// covered a different number of times, if any.
pub fn probe_exact_cover(
    a: &SymbolicAssignment,
    modulus: &BigUint,
    probes: usize,
    seed: u64,
) -> Option<BigUint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bytes = modulus.to_bytes_le();
    (0..probes).find_map(|_| {
        let mut buf: Vec<u8> = (0..bytes.len() + 8).map(|_| rng.gen()).collect();
        buf.push(0);
        let t = BigUint::from_bytes_le(&buf) % modulus;
        (a.coverage_at(&t) != 1).then_some(t)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn range(base: u64, stride: u64, modulus: u64, lo: u64, hi: u64) -> ResidueRange {
        ResidueRange::new(b(base), b(stride), b(modulus), b(lo), b(hi)).unwrap()
    }

    fn naive_intersects(x: &ResidueRange, y: &ResidueRange) -> bool {
        let l = x.modulus.lcm(&y.modulus).to_u64().unwrap();
        (0..l).any(|t| x.contains(&b(t)) && y.contains(&b(t)))
    }

    #[test]
    fn intersection_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let make = |rng: &mut ChaCha8Rng| {
            let stride = rng.gen_range(1..=12u64);
            let modulus = stride * rng.gen_range(1..=10u64);
            let base = rng.gen_range(0..stride);
            let top = modulus / stride;
            let lo = rng.gen_range(0..=top);
            let hi = rng.gen_range(lo..=top);
            range(base, stride, modulus, lo, hi)
        };
        for _ in 0..4000 {
            let x = make(&mut rng);
            let y = make(&mut rng);
            assert_eq!(x.intersects(&y), naive_intersects(&x, &y), "{x:?} {y:?}");
            assert_eq!(x.intersects(&y), y.intersects(&x));
        }
    }

    #[test]
    fn split_preserves_jobs() {
        let p = Piece::new(range(1, 3, 12, 1, 4), b(48)).unwrap();
        for k in 0..=p.jobs().to_u64().unwrap() {
            let (head, tail) = p.split(&b(k)).unwrap();
            let h: BigUint = head.iter().map(Piece::jobs).sum();
            let t: BigUint = tail.iter().map(Piece::jobs).sum();
            assert_eq!(h, b(k));
            assert_eq!(h + t, p.jobs());
            for x in head.iter().chain(&tail) {
                for y in head.iter().chain(&tail) {
                    if !std::ptr::eq(x, y) {
                        assert!(!x.range.intersects(&y.range));
                    }
                }
            }
        }
    }

    #[test]
    fn spec_offset_examples() {
        let i24 = PinwheelInstance::from_integers(&[2, 4]).unwrap();
        let ok = EpsOffsetAssignment {
            offsets: vec![0, 1],
        };
        assert!(validate_offsets(&i24, &ok).unwrap().is_valid());
        let bad = EpsOffsetAssignment {
            offsets: vec![0, 2],
        };
        assert_eq!(
            validate_offsets(&i24, &bad).unwrap(),
            OffsetVerdict::Collision(0, 1)
        );
        let i244 = PinwheelInstance::from_integers(&[2, 4, 4]).unwrap();
        let ok = EpsOffsetAssignment {
            offsets: vec![0, 1, 3],
        };
        assert!(validate_offsets(&i244, &ok).unwrap().is_valid());
    }

    #[test]
    fn search_examples() {
        let found = |p: &[u64]| {
            solve_eps_offsets(&PinwheelInstance::from_integers(p).unwrap(), 1_000_000).unwrap()
        };
        assert_eq!(
            found(&[2, 2]),
            EpsSearch::Found(EpsOffsetAssignment {
                offsets: vec![0, 1]
            })
        );
        assert_eq!(found(&[2, 3, 6]), EpsSearch::Exhausted);
        match found(&[2, 4, 4]) {
            EpsSearch::Found(a) => {
                let inst = PinwheelInstance::from_integers(&[2, 4, 4]).unwrap();
                assert!(validate_offsets(&inst, &a).unwrap().is_valid());
            }
            EpsSearch::Exhausted => panic!("(2,4,4) has an exact schedule"),
        }
    }

    #[test]
    fn chain_first_fit_covers() {
        let periods = [4, 4, 8, 8, 8, 8];
        let offs = divisible_chain_offsets(&periods).unwrap();
        assert!(validate_offsets_raw(&periods, &offs, Exec::Sequential)
            .unwrap()
            .is_valid());
        assert!(divisible_chain_offsets(&[4, 6]).is_err());
        assert!(divisible_chain_offsets(&[2, 2, 2]).is_err());
    }

    #[test]
    fn piece_validation_detects_collision_and_counts() {
        let groups = vec![(b(4), b(2)), (b(8), b(4))];
        let good = SymbolicAssignment {
            groups: vec![
                vec![Piece::new(range(0, 2, 4, 0, 2), b(4)).unwrap()],
                vec![Piece::new(range(1, 2, 4, 0, 2), b(8)).unwrap()],
            ],
        };
        assert!(validate_pieces(&groups, &good, Exec::Sequential)
            .unwrap()
            .is_valid());
        assert!(probe_exact_cover(&good, &b(8), 200, 1).is_none());
        let bad = SymbolicAssignment {
            groups: vec![
                vec![Piece::new(range(0, 2, 4, 0, 2), b(4)).unwrap()],
                vec![Piece::new(range(0, 1, 4, 1, 3), b(8)).unwrap()],
            ],
        };
        assert!(matches!(
            validate_pieces(&groups, &bad, Exec::Parallel).unwrap(),
            PieceVerdict::Collision { .. }
        ));
    }
}
