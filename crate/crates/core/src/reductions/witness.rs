//! Exact schedules for the density-1 reduction of a satisfiable formula, built from a
//! satisfying assignment as residue-class pieces.

use std::collections::{BTreeMap, VecDeque};
use std::rc::Rc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::combine::{split_pool, Pool, Recipe};
use super::eps::JobRole;
use super::flow::{flow_construct, FlowAssignment};
use super::greedy::{greedy_with, JobCounts};
use super::ps::{red_ps_detailed, PsReduction};
use crate::exact::offsets::{
    validate_pieces, FreeList, Piece, PieceVerdict, ResidueRange, SymbolicAssignment,
};
use crate::exec::Exec;
use crate::num::{rat_big, Rational};
use crate::sat::{lit_value, lit_var, CnfFormula};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct EpsWitness {
    pub reduction: PsReduction,
    pub assignment: SymbolicAssignment,
    pub flow: FlowAssignment,
    /// Literal each clause is scheduled with.
    pub routing: Vec<i32>,
}

impl EpsWitness {
    /// Density of all pieces in the two residue classes of each variable.
    pub fn subschedule_densities(&self) -> Vec<Rational> {
        let n = self.reduction.formula.num_vars;
        let two_n = BigUint::from(2 * n);
        let mut out = vec![Rational::zero(); n];
        for p in self.assignment.groups.iter().flatten() {
            let c = (&p.range.base % &two_n)
                .to_u64_digits()
                .first()
                .copied()
                .unwrap_or(0) as usize;
            out[c % n] += rat_big(&p.jobs(), &p.period);
        }
        out
    }
}

fn fail(stage: &'static str, msg: impl Into<String>) -> Error {
    Error::WitnessFailed {
        stage,
        msg: msg.into(),
    }
}

fn range(
    base: BigUint,
    stride: BigUint,
    modulus: BigUint,
    lo: u64,
    hi: BigUint,
) -> Result<ResidueRange> {
    ResidueRange::new(base, stride, modulus, BigUint::from(lo), hi)
}

/// Group index of every role, with groups of greedy kinds keyed by period as well.
struct GroupIndex {
    rep2: BTreeMap<i32, usize>,
    forced: BTreeMap<usize, usize>,
    clause: BTreeMap<usize, usize>,
    greedy: BTreeMap<(usize, BigUint), usize>,
    warm: BTreeMap<(usize, BigUint), usize>,
}

impl GroupIndex {
    fn new(r: &PsReduction, periods: &[(BigUint, BigUint)]) -> Self {
        let mut ix = GroupIndex {
            rep2: BTreeMap::new(),
            forced: BTreeMap::new(),
            clause: BTreeMap::new(),
            greedy: BTreeMap::new(),
            warm: BTreeMap::new(),
        };
        for (g, role) in r.tagged.roles.iter().enumerate() {
            let p = periods[g].0.clone();
            match *role {
                JobRole::Rep2 { literal } => _ = ix.rep2.insert(literal, g),
                JobRole::Forced { var } => _ = ix.forced.insert(var, g),
                JobRole::Clause { index } => _ = ix.clause.insert(index, g),
                JobRole::Greedy { var } => _ = ix.greedy.insert((var, p), g),
                JobRole::WarmGreedy { var } => _ = ix.warm.insert((var, p), g),
                JobRole::Filler => {}
            }
        }
        ix
    }
}

/// Takes the first `k` jobs off a list of pieces sharing one period.
fn take_jobs(list: &mut VecDeque<Piece>, k: &BigUint) -> Result<Vec<Piece>> {
    let mut need = k.clone();
    let mut out = Vec::new();
    while !need.is_zero() {
        let p = list
            .pop_front()
            .ok_or_else(|| fail("expand", "pieces exhausted"))?;
        let have = p.jobs();
        if have <= need {
            need -= have;
            out.push(p);
        } else {
            let (head, tail) = p.split(&need).expect("piece holds enough jobs");
            out.extend(head);
            for t in tail.into_iter().rev() {
                list.push_front(t);
            }
            need = BigUint::zero();
        }
    }
    Ok(out)
}

/// Hands `count` jobs laid out as `pieces` back to the original groups behind `recipe`.
fn expand(
    recipe: &Recipe,
    count: &BigUint,
    pieces: Vec<Piece>,
    out: &mut [Vec<Piece>],
) -> Result<()> {
    match recipe {
        Recipe::Original(g) => out[*g].extend(pieces),
        Recipe::Merged { factor, parts } => {
            let mut lifted: VecDeque<Piece> = pieces.iter().map(|p| p.lift(factor)).collect();
            for (c, r) in parts {
                let k = count * c;
                let sub = take_jobs(&mut lifted, &k)?;
                expand(r, &k, sub, out)?;
            }
            if !lifted.is_empty() {
                return Err(fail("expand", "merged job not fully expanded"));
            }
        }
    }
    Ok(())
}

fn literal_residue(lit: i32, n: usize) -> BigUint {
    let v = lit_var(lit);
    BigUint::from(if lit > 0 { v - 1 } else { n + v - 1 })
}

/// Builds the exact schedule for `red_ps(f)` from a satisfying assignment.
pub fn build_eps_witness(f: &CnfFormula, assignment: &[bool]) -> Result<EpsWitness> {
    if assignment.len() != f.num_vars || !f.satisfied_by(assignment) {
        return Err(Error::PreconditionViolated(
            "assignment does not satisfy the formula".into(),
        ));
    }
    let r = red_ps_detailed(f)?;
    let n = f.num_vars;
    let two_n = BigUint::from(2 * n);
    let reps = &r.reps;
    let groups = r.tagged.instance.integer_groups()?;
    let ix = GroupIndex::new(&r, &groups);
    let mut out: Vec<Vec<Piece>> = vec![Vec::new(); groups.len()];

    let routing: Vec<i32> = f
        .clauses
        .iter()
        .map(|c| {
            *c.iter()
                .find(|&&l| lit_value(l, assignment))
                .expect("satisfied clause")
        })
        .collect();

    let mut holes: Vec<Vec<ResidueRange>> = vec![Vec::new(); n];
    let mut d3 = Vec::with_capacity(n);
    for var in 1..=n {
        let v = var as i32;
        let truth = if assignment[var - 1] { v } else { -v };
        let falsity = -truth;
        let own = &mut holes[var - 1];
        for lit in [v, -v] {
            let c = literal_residue(lit, n);
            let p = BigUint::from(reps.rep1(lit));
            let rg = range(c, two_n.clone(), &two_n * &p, 1, p)?;
            out[ix.rep2[&lit]].push(Piece::new(rg, reps.rep2(lit))?);
        }
        // forced job in the false literal's classes
        let c = literal_residue(falsity, n);
        let p = BigUint::from(reps.rep1(falsity));
        let q = BigUint::from(reps.rep1(truth));
        let fper = reps.f(var);
        out[ix.forced[&var]].push(Piece::new(
            ResidueRange::singleton(&c, &fper),
            fper.clone(),
        )?);
        own.push(range(c, &two_n * &p, fper, 1, q)?);
        // routed clauses in the true literal's classes
        let c = literal_residue(truth, n);
        let p = BigUint::from(reps.rep1(truth));
        let routed: Vec<usize> = (0..f.num_clauses())
            .filter(|&j| routing[j] == truth)
            .collect();
        let sq = &two_n * &p * &p;
        own.push(range(
            c.clone(),
            &two_n * &p,
            sq.clone(),
            routed.len() as u64,
            p.clone(),
        )?);
        let mut used = Rational::zero();
        for (rho, &j) in routed.iter().enumerate() {
            let others = f.clauses[j]
                .iter()
                .filter(|&&l| l != truth)
                .fold(BigUint::one(), |acc, &l| acc * reps.rep1(l));
            let cper = reps.clause_rep2(&f.clauses[j]);
            let base = &c + &two_n * &p * rho;
            out[ix.clause[&(j + 1)]].push(Piece::new(
                ResidueRange::singleton(&base, &cper),
                cper.clone(),
            )?);
            own.push(range(base, sq.clone(), cper.clone(), 1, &others * &others)?);
            used += rat_big(&BigUint::one(), &cper);
        }
        d3.push(&r.clause_sum - used);
    }

    let flow = flow_construct(&d3, &r.clause_sum).map_err(|e| fail("flow", e.to_string()))?;

    // per variable: segments (period, count, recipe) to place in its holes
    let mut items: Vec<Vec<(BigUint, BigUint, Rc<Recipe>)>> = vec![Vec::new(); n];
    for var in 1..=n {
        for (p, c) in &r.greedy[var - 1] {
            let g = ix.greedy[&(var, p.clone())];
            items[var - 1].push((p.clone(), c.clone(), Rc::new(Recipe::Original(g))));
        }
    }
    for i in 0..n.saturating_sub(1) {
        let var = i + 1;
        let g: JobCounts = greedy_with(&r.periods[i + 1], n, &flow.d5[i])
            .map_err(|e| fail("split", e.to_string()))?;
        let wg = Pool::from_counts(&r.warm[i], |p| ix.warm[&(var, p.clone())]);
        let (keep, moved) =
            split_pool(&r.periods[i], wg, &g, &two_n).map_err(|e| fail("split", e.to_string()))?;
        for (p, (c, rc)) in keep.segments() {
            items[i].push((p.clone(), c.clone(), rc.clone()));
        }
        for (p, (c, rc)) in moved.segments() {
            items[i + 1].push((p.clone(), c.clone(), rc.clone()));
        }
    }

    for (i, mut list) in items.into_iter().enumerate() {
        list.sort_by(|a, b| a.0.cmp(&b.0));
        let mut free = FreeList::from_ranges(std::mem::take(&mut holes[i]));
        for (p, c, rc) in list {
            let pieces = free.take(&p, &c).ok_or_else(|| {
                fail(
                    "fill",
                    format!("variable {} has no room for {c} jobs of period {p}", i + 1),
                )
            })?;
            expand(&rc, &c, pieces, &mut out)?;
        }
        if !free.is_empty() {
            return Err(fail("fill", format!("variable {} left free slots", i + 1)));
        }
    }

    Ok(EpsWitness {
        reduction: r,
        assignment: SymbolicAssignment { groups: out },
        flow,
        routing,
    })
}

/// Checks the witness against the reduction's job groups: counts, periods and disjointness.
pub fn validate_witness(w: &EpsWitness, exec: Exec) -> Result<PieceVerdict> {
    let groups = w.reduction.tagged.instance.integer_groups()?;
    validate_pieces(&groups, &w.assignment, exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::offsets::probe_exact_cover;
    use crate::num::recip;

    #[test]
    fn one_clause_formula() {
        let f = CnfFormula::new(3, vec![vec![1, 2, 3]]).unwrap();
        for bits in 1..8u32 {
            let a: Vec<bool> = (0..3).map(|k| bits >> k & 1 == 1).collect();
            let w = build_eps_witness(&f, &a).unwrap();
            assert_eq!(
                validate_witness(&w, Exec::Sequential).unwrap(),
                PieceVerdict::Valid
            );
            for d in w.subschedule_densities() {
                assert_eq!(d, recip(&BigUint::from(3u32)));
            }
            let top = w.reduction.periods[0].last().unwrap().clone();
            assert_eq!(probe_exact_cover(&w.assignment, &top, 200, 1), None);
        }
        assert!(build_eps_witness(&f, &[false, false, false]).is_err());
    }
}
