//! Routing of warm-greedy density between neighbouring variable subschedules.

use num_traits::Zero;

use crate::num::Rational;
use crate::{Error, Result};

/// `d4[i]` of warm group `i` stays in subschedule `i`, `d5[i]` moves on to subschedule `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowAssignment {
    pub d3: Vec<Rational>,
    pub d4: Vec<Rational>,
    pub d5: Vec<Rational>,
}

/// Builds the flow from the free densities `d3` (one per variable).
pub fn flow_construct(d3: &[Rational], clause_sum: &Rational) -> Result<FlowAssignment> {
    let n = d3.len();
    if n == 0 {
        return Err(Error::InfeasibleFlow("no variables".into()));
    }
    let total: Rational = d3.iter().sum();
    let expected = clause_sum * Rational::from_integer((n as i64 - 1).into());
    if total != expected {
        return Err(Error::InfeasibleFlow(format!(
            "free density {total} differs from {expected}"
        )));
    }
    let mut d4 = Vec::with_capacity(n - 1);
    let mut d5: Vec<Rational> = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let stay = match i {
            0 => d3[0].clone(),
            _ => &d3[i] - &d5[i - 1],
        };
        let pass = clause_sum - &stay;
        for x in [&stay, &pass] {
            if *x < Rational::zero() || x > clause_sum {
                return Err(Error::InfeasibleFlow(format!(
                    "flow {x} on warm group {} out of capacity",
                    i + 1
                )));
            }
        }
        d4.push(stay);
        d5.push(pass);
    }
    let inflow = d5.last().cloned().unwrap_or_else(Rational::zero);
    if d3[n - 1] != inflow {
        return Err(Error::InfeasibleFlow(
            "last subschedule not saturated".into(),
        ));
    }
    Ok(FlowAssignment {
        d3: d3.to_vec(),
        d4,
        d5,
    })
}
