//! CNF formulas: DIMACS input and output, an exhaustive oracle, an independent DPLL solver and
//! a seeded 3,4-SAT generator.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exec::Exec;
use crate::{Error, Result};

pub const DEFAULT_VAR_LIMIT: usize = 24;

/// Clauses over variables `1..=num_vars`; literal `-v` is the negation of `v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatVerdict {
    /// `assignment[v - 1]` is the value of variable `v`.
    Sat(Vec<bool>),
    Unsat,
}

impl SatVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatVerdict::Sat(_))
    }
}

pub fn lit_var(l: i32) -> usize {
    l.unsigned_abs() as usize
}

pub fn lit_value(l: i32, assignment: &[bool]) -> bool {
    assignment[lit_var(l) - 1] == (l > 0)
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        for (j, c) in clauses.iter().enumerate() {
            if let Some(&l) = c.iter().find(|&&l| l == 0 || lit_var(l) > num_vars) {
                return Err(Error::MalformedFormula(format!(
                    "clause {} has literal {l} outside 1..={num_vars}",
                    j + 1
                )));
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.num_vars
            && self
                .clauses
                .iter()
                .all(|c| c.iter().any(|&l| lit_value(l, assignment)))
    }

    /// Number of clauses mentioning each variable (either sign), indexed from 0.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut occ = vec![0; self.num_vars];
        for c in &self.clauses {
            let vars: BTreeSet<usize> = c.iter().map(|&l| lit_var(l)).collect();
            for v in vars {
                occ[v - 1] += 1;
            }
        }
        occ
    }

    /// Why the formula is not 3,4-SAT, if it is not.
    pub fn check_34sat(&self) -> std::result::Result<(), String> {
        for (j, c) in self.clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(format!("clause {} is empty", j + 1));
            }
            let distinct: BTreeSet<i32> = c.iter().copied().collect();
            if distinct.len() != c.len() {
                return Err(format!("clause {} repeats a literal", j + 1));
            }
            if c.len() > 3 {
                return Err(format!("clause {} has {} literals", j + 1, c.len()));
            }
            if c.iter().any(|&l| distinct.contains(&-l)) {
                return Err(format!(
                    "clause {} holds a variable and its negation",
                    j + 1
                ));
            }
        }
        match self.occurrences().iter().position(|&k| k > 4) {
            Some(v) => Err(format!(
                "variable {} occurs in more than four clauses",
                v + 1
            )),
            None => Ok(()),
        }
    }

    pub fn is_34sat(&self) -> bool {
        self.check_34sat().is_ok()
    }

    pub fn to_dimacs(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        for c in &self.clauses {
            for l in c {
                write!(f, "{l} ")?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses DIMACS CNF. Clauses end at `0` and may span lines; `c` lines are comments and a
/// lone `%` ends the clause section.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line == "%" {
            break;
        }
        last_line = line_no;
        if line.starts_with('p') {
            if header.is_some() {
                return Err(parse_err(line_no, "second problem line"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [_, "cnf", v, c] = parts.as_slice() else {
                return Err(parse_err(line_no, "expected `p cnf VARS CLAUSES`"));
            };
            let v = v
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad variable count {v:?}")))?;
            let c = c
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad clause count {c:?}")))?;
            header = Some((v, c, line_no));
            continue;
        }
        let Some((num_vars, _, _)) = header else {
            return Err(parse_err(line_no, "clause before the problem line"));
        };
        for tok in line.split_whitespace() {
            let l: i32 = tok
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad literal {tok:?}")))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit_var(l) > num_vars {
                return Err(parse_err(
                    line_no,
                    format!("literal {l} exceeds {num_vars} variables"),
                ));
            } else {
                current.push(l);
            }
        }
    }
    let Some((num_vars, expected, header_line)) = header else {
        return Err(parse_err(last_line.max(1), "missing problem line"));
    };
    if !current.is_empty() {
        return Err(parse_err(last_line, "last clause is not terminated by 0"));
    }
    if clauses.len() != expected {
        return Err(parse_err(
            header_line,
            format!(
                "header declares {expected} clauses, found {}",
                clauses.len()
            ),
        ));
    }
    CnfFormula::new(num_vars, clauses)
}

/// Exhaustive search over all assignments, as bit masks.
pub fn brute_force_sat(f: &CnfFormula) -> Result<SatVerdict> {
    brute_force_sat_with(f, DEFAULT_VAR_LIMIT, Exec::auto())
}

pub fn brute_force_sat_with(f: &CnfFormula, limit: usize, exec: Exec) -> Result<SatVerdict> {
    if f.num_vars > limit || f.num_vars > 32 {
        return Err(Error::VarLimitExceeded {
            vars: f.num_vars,
            limit: limit.min(32),
        });
    }
    let masks: Vec<(u64, u64)> = f
        .clauses
        .iter()
        .map(|c| {
            c.iter().fold((0u64, 0u64), |(pos, neg), &l| {
                let bit = 1u64 << (lit_var(l) - 1);
                if l > 0 {
                    (pos | bit, neg)
                } else {
                    (pos, neg | bit)
                }
            })
        })
        .collect();
    let total = 1u64 << f.num_vars;
    const CHUNK: u64 = 1 << 14;
    let chunks = total.div_ceil(CHUNK) as usize;
    let found = exec.find_first(chunks, |k| {
        let lo = k as u64 * CHUNK;
        (lo..(lo + CHUNK).min(total)).find(|&a| masks.iter().all(|&(p, n)| (a & p) | (!a & n) != 0))
    });
    Ok(match found {
        Some(a) => SatVerdict::Sat((0..f.num_vars).map(|v| a >> v & 1 == 1).collect()),
        None => SatVerdict::Unsat,
    })
}

/// Davis–Putnam–Logemann–Loveland search with unit propagation.
pub fn dpll(f: &CnfFormula) -> SatVerdict {
    fn solve(clauses: &[Vec<i32>], assign: &mut Vec<Option<bool>>) -> bool {
        let mut trail = Vec::new();
        loop {
            let mut unit = None;
            for c in clauses {
                let mut open = None;
                let mut open_count = 0;
                let mut sat = false;
                for &l in c {
                    match assign[lit_var(l) - 1] {
                        Some(v) if v == (l > 0) => {
                            sat = true;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            open_count += 1;
                            open = Some(l);
                        }
                    }
                }
                if sat {
                    continue;
                }
                match open_count {
                    0 => {
                        for v in trail {
                            assign[v] = None;
                        }
                        return false;
                    }
                    1 => {
                        unit = open;
                        break;
                    }
                    _ => {}
                }
            }
            match unit {
                Some(l) => {
                    assign[lit_var(l) - 1] = Some(l > 0);
                    trail.push(lit_var(l) - 1);
                }
                None => break,
            }
        }
        let branch = clauses
            .iter()
            .flatten()
            .map(|&l| lit_var(l) - 1)
            .find(|&v| assign[v].is_none());
        let Some(v) = branch else {
            return true;
        };
        for value in [true, false] {
            assign[v] = Some(value);
            if solve(clauses, assign) {
                return true;
            }
        }
        assign[v] = None;
        for v in trail {
            assign[v] = None;
        }
        false
    }
    let mut assign = vec![None; f.num_vars];
    if solve(&f.clauses, &mut assign) {
        SatVerdict::Sat(assign.into_iter().map(|v| v.unwrap_or(false)).collect())
    } else {
        SatVerdict::Unsat
    }
}

/// Random 3,4-SAT: `m` clauses of three distinct variables with random signs, no variable in
/// more than four clauses. Deterministic per seed.
pub fn gen_random_34sat(n: usize, m: usize, seed: u64) -> Result<CnfFormula> {
    if 3 * m > 4 * n {
        return Err(Error::Infeasible(format!(
            "{m} clauses need {} occurrences, {n} variables allow {}",
            3 * m,
            4 * n
        )));
    }
    if m > 0 && n < 3 {
        return Err(Error::Infeasible(format!(
            "three distinct variables needed, have {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..10_000 {
        let mut left = vec![4usize; n];
        let mut clauses = Vec::with_capacity(m);
        for _ in 0..m {
            let open: Vec<usize> = (0..n).filter(|&v| left[v] > 0).collect();
            if open.len() < 3 {
                continue 'attempt;
            }
            let vars: Vec<usize> = open
                .choose_multiple_weighted(&mut rng, 3, |&v| left[v] as f64)
                .ok()
                .map(|it| it.copied().collect())
                .unwrap_or_default();
            if vars.len() != 3 {
                continue 'attempt;
            }
            let mut clause = Vec::with_capacity(3);
            for v in vars {
                left[v] -= 1;
                let l = v as i32 + 1;
                clause.push(if rng.gen_bool(0.5) { l } else { -l });
            }
            clauses.push(clause);
        }
        return CnfFormula::new(n, clauses);
    }
    Err(Error::Infeasible(format!(
        "no 3,4-SAT formula found for n = {n}, m = {m}"
    )))
}

/// Random 3-SAT with three distinct variables per clause and no occurrence limit.
pub fn gen_random_3sat(n: usize, m: usize, seed: u64) -> Result<CnfFormula> {
    if m > 0 && n < 3 {
        return Err(Error::Infeasible(format!(
            "three distinct variables needed, have {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars: Vec<i32> = (1..=n as i32).collect();
    let clauses = (0..m)
        .map(|_| {
            vars.choose_multiple(&mut rng, 3)
                .map(|&v| if rng.gen_bool(0.5) { v } else { -v })
                .collect()
        })
        .collect();
    CnfFormula::new(n, clauses)
}
