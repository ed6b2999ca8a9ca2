//! Pinwheel instances: multisets of (possibly rational) periods with optional multiplicities.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::num::{as_biguint, as_u64, fmt_rational, parse_rational, rat_int, to_bigint, Rational};
use crate::{Error, Result};

/// Largest multiplicity-expanded job count the explicit (per-job) views will materialize.
pub const EXPAND_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    #[serde(with = "crate::serde_num::rational")]
    pub period: Rational,
    #[serde(with = "crate::serde_num::biguint")]
    pub multiplicity: BigUint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Job {
    pub fn new(period: Rational) -> Self {
        Job {
            period,
            multiplicity: BigUint::one(),
            label: None,
        }
    }

    pub fn with_multiplicity(mut self, m: BigUint) -> Self {
        self.multiplicity = m;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn density(&self) -> Rational {
        Rational::from_integer(to_bigint(&self.multiplicity)) / &self.period
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PinwheelInstance {
    jobs: Vec<Job>,
}

impl PinwheelInstance {
    pub fn new(jobs: Vec<Job>) -> Result<Self> {
        for (i, j) in jobs.iter().enumerate() {
            if j.period < Rational::one() {
                return Err(Error::InvalidInstance(format!(
                    "job {} has period {} < 1",
                    i + 1,
                    fmt_rational(&j.period)
                )));
            }
            if j.multiplicity.is_zero() {
                return Err(Error::InvalidInstance(format!(
                    "job {} has multiplicity 0",
                    i + 1
                )));
            }
        }
        Ok(PinwheelInstance { jobs })
    }

    pub fn empty() -> Self {
        PinwheelInstance::default()
    }

    pub fn from_integers(periods: &[u64]) -> Result<Self> {
        Self::new(periods.iter().map(|&p| Job::new(rat_int(p))).collect())
    }

    pub fn from_periods(periods: Vec<Rational>) -> Result<Self> {
        Self::new(periods.into_iter().map(Job::new).collect())
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn push(&mut self, job: Job) -> Result<()> {
        if job.period < Rational::one() || job.multiplicity.is_zero() {
            return Err(Error::InvalidInstance(
                "job period < 1 or zero multiplicity".into(),
            ));
        }
        self.jobs.push(job);
        Ok(())
    }

    pub fn density(&self) -> Rational {
        self.jobs
            .iter()
            .map(Job::density)
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn total_multiplicity(&self) -> BigUint {
        self.jobs.iter().map(|j| &j.multiplicity).sum()
    }

    pub fn is_integral(&self) -> bool {
        self.jobs.iter().all(|j| j.period.is_integer())
    }

    pub fn scale(&self, alpha: &Rational) -> Result<Self> {
        if *alpha <= Rational::zero() {
            return Err(Error::InvalidInstance(
                "scale factor must be positive".into(),
            ));
        }
        let jobs = self
            .jobs
            .iter()
            .map(|j| Job {
                period: &j.period * alpha,
                ..j.clone()
            })
            .collect();
        Ok(PinwheelInstance { jobs })
    }

    pub fn floor_periods(&self) -> Result<Self> {
        Self::new(
            self.jobs
                .iter()
                .map(|j| Job {
                    period: j.period.floor(),
                    ..j.clone()
                })
                .collect(),
        )
    }

    /// One period per job copy, in job order.
    pub fn expanded_periods(&self) -> Result<Vec<Rational>> {
        let total = self.total_multiplicity();
        if total > BigUint::from(EXPAND_LIMIT) {
            return Err(Error::InvalidInstance(format!(
                "{total} job copies exceed the expansion limit {EXPAND_LIMIT}"
            )));
        }
        let mut out = Vec::new();
        for j in &self.jobs {
            let m = j.multiplicity.to_u64().unwrap_or(0);
            out.extend(std::iter::repeat(j.period.clone()).take(m as usize));
        }
        Ok(out)
    }

    /// Multiplicity-expanded integer periods; fails on rational or oversized periods.
    pub fn integer_periods(&self) -> Result<Vec<u64>> {
        self.expanded_periods()?
            .iter()
            .map(|p| {
                as_u64(p).ok_or_else(|| {
                    Error::InvalidInstance(format!(
                        "period {} is not a machine integer",
                        fmt_rational(p)
                    ))
                })
            })
            .collect()
    }

    /// Integer periods as big integers together with multiplicities, without expansion.
    pub fn integer_groups(&self) -> Result<Vec<(BigUint, BigUint)>> {
        self.jobs
            .iter()
            .map(|j| {
                as_biguint(&j.period)
                    .map(|p| (p, j.multiplicity.clone()))
                    .ok_or_else(|| {
                        Error::InvalidInstance(format!(
                            "period {} is not integral",
                            fmt_rational(&j.period)
                        ))
                    })
            })
            .collect()
    }

    /// Parses the line format `period[/denominator][ xMULT][ # label]`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut jobs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let (body, label) = match raw.split_once('#') {
                Some((b, l)) => (
                    b.trim(),
                    Some(l.trim().to_string()).filter(|l| !l.is_empty()),
                ),
                None => (raw.trim(), None),
            };
            if body.is_empty() {
                continue;
            }
            let mut parts = body.split_whitespace();
            let period = parts.next().unwrap_or_default();
            let period = parse_rational(period).map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad period {period:?}"),
            })?;
            let mut multiplicity = BigUint::one();
            if let Some(m) = parts.next() {
                let digits = m.strip_prefix('x').ok_or_else(|| Error::Parse {
                    line: line_no,
                    msg: format!("expected xMULT, found {m:?}"),
                })?;
                multiplicity = digits.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad multiplicity {digits:?}"),
                })?;
            }
            if let Some(extra) = parts.next() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("unexpected token {extra:?}"),
                });
            }
            jobs.push(Job {
                period,
                multiplicity,
                label,
            });
        }
        Self::new(jobs).map_err(|e| Error::Parse {
            line: 0,
            msg: e.to_string(),
        })
    }
}

impl fmt::Display for PinwheelInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in &self.jobs {
            if j.period.is_integer() {
                write!(f, "{}", j.period.numer())?;
            } else {
                write!(f, "{}/{}", j.period.numer(), j.period.denom())?;
            }
            if !j.multiplicity.is_one() {
                write!(f, " x{}", j.multiplicity)?;
            }
            if let Some(l) = &j.label {
                write!(f, " # {l}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    #[test]
    fn density_examples() {
        let a = PinwheelInstance::from_integers(&[2, 4, 8]).unwrap();
        assert_eq!(a.density(), rat(7, 8));
        assert_eq!(PinwheelInstance::empty().density(), Rational::zero());
    }

    #[test]
    fn scale_and_floor() {
        let a = PinwheelInstance::from_integers(&[2]).unwrap();
        let s = a.scale(&rat(5, 4)).unwrap();
        assert_eq!(s.jobs()[0].period, rat(5, 2));
        assert_eq!(s.floor_periods().unwrap().jobs()[0].period, rat(2, 1));
        let tiny = PinwheelInstance::from_integers(&[1])
            .unwrap()
            .scale(&rat(1, 2))
            .unwrap();
        assert!(tiny.floor_periods().is_err());
    }

    #[test]
    fn text_round_trip() {
        let text = "150 x20 # rep2 x1\n5/2\n\n# comment\n7\n";
        let a = PinwheelInstance::parse(text).unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(a.jobs()[0].multiplicity, BigUint::from(20u32));
        assert_eq!(a.jobs()[0].label.as_deref(), Some("rep2 x1"));
        let b = PinwheelInstance::parse(&a.to_string()).unwrap();
        assert_eq!(a, b);
        assert!(PinwheelInstance::parse("0\n").is_err());
        assert!(PinwheelInstance::parse("3 y2\n").is_err());
    }

    #[test]
    fn multiplicity_weights_density() {
        let a = PinwheelInstance::parse("4 x3\n").unwrap();
        assert_eq!(a.density(), rat(3, 4));
        assert_eq!(a.integer_periods().unwrap(), vec![4, 4, 4]);
    }
}
