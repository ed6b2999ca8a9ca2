//! The state graph of an integer instance: one state per vector of slots-since-service.

use crate::exec::Exec;
use crate::num::Rational;
use crate::schedule::{Schedule, Slot};
use crate::{Error, Result};

/// Mixed-radix encoding of states `(c_1, …, c_m)` with `0 ≤ c_i < a_i`, where `c_i` counts
/// the slots since job `i` was last served.
#[derive(Debug, Clone)]
pub struct StateSpace {
    periods: Vec<u64>,
    strides: Vec<u64>,
    inc: u64,
    size: u64,
}

impl StateSpace {
    pub fn new(periods: &[u64], budget: u64) -> Result<Self> {
        let mut size: u128 = 1;
        for &a in periods {
            if a == 0 {
                return Err(Error::InvalidInstance("period 0".into()));
            }
            size = size.saturating_mul(a as u128);
        }
        if size > budget as u128 {
            let exact: num_bigint::BigUint = periods
                .iter()
                .map(|&a| num_bigint::BigUint::from(a))
                .product();
            return Err(Error::StateBudgetExceeded {
                states: exact.to_string(),
                budget,
            });
        }
        let mut strides = Vec::with_capacity(periods.len());
        let mut s = 1u64;
        for &a in periods {
            strides.push(s);
            s *= a;
        }
        Ok(StateSpace {
            periods: periods.to_vec(),
            inc: strides.iter().sum(),
            strides,
            size: s,
        })
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn periods(&self) -> &[u64] {
        &self.periods
    }

    pub fn counter(&self, state: u64, job: usize) -> u64 {
        (state / self.strides[job]) % self.periods[job]
    }

    /// Outgoing edges as `(label, next)`, most urgent job first and the holiday last.
    pub fn successors(&self, state: u64, out: &mut Vec<(Slot, u64)>) {
        out.clear();
        let m = self.periods.len();
        let mut tight = None;
        for i in 0..m {
            if self.counter(state, i) + 1 == self.periods[i] {
                if tight.is_some() {
                    return;
                }
                tight = Some(i);
            }
        }
        let serve = |k: usize| state + self.inc - (self.counter(state, k) + 1) * self.strides[k];
        if let Some(k) = tight {
            out.push((Slot::Job(k), serve(k)));
            return;
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&i| (self.periods[i] - 1 - self.counter(state, i), i));
        for k in order {
            out.push((Slot::Job(k), serve(k)));
        }
        out.push((Slot::Holiday, state + self.inc));
    }
}

/// Depth-first search for any cycle; its edge labels form one period of a valid schedule.
pub fn find_cycle(space: &StateSpace) -> Option<Schedule> {
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    struct Frame {
        state: u64,
        via: Slot,
        succ: Vec<(Slot, u64)>,
        next: usize,
    }
    let n = space.size() as usize;
    let mut color = vec![WHITE; n];
    let mut stack: Vec<Frame> = Vec::new();
    for root in 0..space.size() {
        if color[root as usize] != WHITE {
            continue;
        }
        let mut succ = Vec::new();
        space.successors(root, &mut succ);
        color[root as usize] = GRAY;
        stack.push(Frame {
            state: root,
            via: Slot::Holiday,
            succ,
            next: 0,
        });
        while let Some(top) = stack.last_mut() {
            if top.next == top.succ.len() {
                color[top.state as usize] = BLACK;
                stack.pop();
                continue;
            }
            let (label, w) = top.succ[top.next];
            top.next += 1;
            match color[w as usize] {
                WHITE => {
                    let mut succ = Vec::new();
                    space.successors(w, &mut succ);
                    color[w as usize] = GRAY;
                    stack.push(Frame {
                        state: w,
                        via: label,
                        succ,
                        next: 0,
                    });
                }
                GRAY => {
                    let pos = stack
                        .iter()
                        .rposition(|f| f.state == w)
                        .expect("gray state on stack");
                    let mut slots: Vec<Slot> = stack[pos + 1..].iter().map(|f| f.via).collect();
                    slots.push(label);
                    return Schedule::new(slots).ok();
                }
                _ => {}
            }
        }
    }
    None
}

/// Explicit edge lists restricted to states that lie on some bi-infinite walk.
struct Trimmed {
    /// original state of each kept vertex
    states: Vec<u64>,
    fwd_start: Vec<usize>,
    fwd: Vec<(u32, u8, Slot)>,
    rev_start: Vec<usize>,
    rev: Vec<(u32, u8)>,
}

fn trim(space: &StateSpace) -> Trimmed {
    let n = space.size() as usize;
    let mut out_deg = vec![0u32; n];
    let mut in_deg = vec![0u32; n];
    let mut succ = Vec::new();
    for v in 0..n {
        space.successors(v as u64, &mut succ);
        out_deg[v] = succ.len() as u32;
        for &(_, w) in &succ {
            in_deg[w as usize] += 1;
        }
    }
    // predecessors are needed to peel states without successors
    let mut pred_start = vec![0usize; n + 1];
    for v in 0..n {
        pred_start[v + 1] = pred_start[v] + in_deg[v] as usize;
    }
    let mut fill = pred_start.clone();
    let mut preds = vec![0u32; pred_start[n]];
    for v in 0..n {
        space.successors(v as u64, &mut succ);
        for &(_, w) in &succ {
            preds[fill[w as usize]] = v as u32;
            fill[w as usize] += 1;
        }
    }
    let mut alive = vec![true; n];
    let mut queue: Vec<usize> = (0..n)
        .filter(|&v| out_deg[v] == 0 || in_deg[v] == 0)
        .collect();
    for &v in &queue {
        alive[v] = false;
    }
    while let Some(v) = queue.pop() {
        space.successors(v as u64, &mut succ);
        for &(_, w) in &succ {
            let w = w as usize;
            if alive[w] {
                in_deg[w] -= 1;
                if in_deg[w] == 0 {
                    alive[w] = false;
                    queue.push(w);
                }
            }
        }
        for &u in &preds[pred_start[v]..pred_start[v + 1]] {
            let u = u as usize;
            if alive[u] {
                out_deg[u] -= 1;
                if out_deg[u] == 0 {
                    alive[u] = false;
                    queue.push(u);
                }
            }
        }
    }
    drop(preds);
    let mut index = vec![u32::MAX; n];
    let states: Vec<u64> = (0..n).filter(|&v| alive[v]).map(|v| v as u64).collect();
    for (i, &s) in states.iter().enumerate() {
        index[s as usize] = i as u32;
    }
    let mut fwd_start = vec![0usize];
    let mut fwd = Vec::new();
    for &s in &states {
        space.successors(s, &mut succ);
        for &(label, w) in &succ {
            let wi = index[w as usize];
            if wi != u32::MAX {
                let weight = u8::from(label == Slot::Holiday);
                fwd.push((wi, weight, label));
            }
        }
        fwd_start.push(fwd.len());
    }
    let k = states.len();
    let mut rdeg = vec![0usize; k + 1];
    for &(w, _, _) in &fwd {
        rdeg[w as usize + 1] += 1;
    }
    for v in 0..k {
        rdeg[v + 1] += rdeg[v];
    }
    let rev_start = rdeg.clone();
    let mut rev = vec![(0u32, 0u8); fwd.len()];
    for u in 0..k {
        for &(w, wt, _) in &fwd[fwd_start[u]..fwd_start[u + 1]] {
            rev[rdeg[w as usize]] = (u as u32, wt);
            rdeg[w as usize] += 1;
        }
    }
    Trimmed {
        states,
        fwd_start,
        fwd,
        rev_start,
        rev,
    }
}

const NEG: i64 = i64::MIN / 4;

fn karp_step(g: &Trimmed, prev: &[i64], exec: Exec) -> Vec<i64> {
    exec.map_range(g.states.len(), |v| {
        let mut best = NEG;
        for &(u, w) in &g.rev[g.rev_start[v]..g.rev_start[v + 1]] {
            let d = prev[u as usize];
            if d > NEG {
                best = best.max(d + w as i64);
            }
        }
        best
    })
}

/// Maximum mean holiday weight over all cycles, with one cycle attaining it.
///
/// `work_budget` caps `states × edges`, the cost of Karp's recurrence.
pub fn max_mean_cycle(
    space: &StateSpace,
    work_budget: u64,
    exec: Exec,
) -> Result<(Rational, Schedule)> {
    let g = trim(space);
    let v = g.states.len();
    if v == 0 {
        return Err(Error::NoCycle);
    }
    let work = (v as u64).saturating_mul(g.fwd.len() as u64);
    if work > work_budget {
        return Err(Error::BudgetExceeded(work));
    }
    // walks of exactly k edges, starting anywhere
    let mut d = vec![0i64; v];
    for _ in 0..v {
        d = karp_step(&g, &d, exec);
    }
    let dv = d;
    // per-vertex minimum of (D_V - D_k)/(V - k) as a fraction
    let mut best: Vec<Option<(i64, i64)>> = vec![None; v];
    let mut dk = vec![0i64; v];
    for k in 0..v {
        for x in 0..v {
            if dv[x] <= NEG || dk[x] <= NEG {
                continue;
            }
            let cand = (dv[x] - dk[x], (v - k) as i64);
            best[x] = Some(match best[x] {
                Some(b) if (b.0 as i128) * (cand.1 as i128) <= (cand.0 as i128) * (b.1 as i128) => {
                    b
                }
                _ => cand,
            });
        }
        dk = karp_step(&g, &dk, exec);
    }
    let (p, q) = best
        .into_iter()
        .flatten()
        .max_by(|a, b| ((a.0 as i128) * (b.1 as i128)).cmp(&((b.0 as i128) * (a.1 as i128))))
        .ok_or(Error::NoCycle)?;
    let lambda = Rational::new(p.into(), q.into());
    let (p, q) = (
        lambda.numer().try_into().unwrap_or(0i64),
        lambda.denom().try_into().unwrap_or(1i64),
    );
    let cycle = tight_cycle(&g, p, q).ok_or_else(|| Error::ConstructionFailed {
        stage: "cycle extraction",
        msg: "no tight cycle at the optimal mean".into(),
    })?;
    Ok((lambda, cycle))
}

/// A cycle of mean exactly `p/q`, found among edges tight for longest-walk potentials under
/// the reweighting `q·w - p`.
fn tight_cycle(g: &Trimmed, p: i64, q: i64) -> Option<Schedule> {
    let v = g.states.len();
    let mut pi = vec![0i64; v];
    for _ in 0..=v {
        let mut changed = false;
        for u in 0..v {
            for &(w, wt, _) in &g.fwd[g.fwd_start[u]..g.fwd_start[u + 1]] {
                let cand = pi[u] + q * wt as i64 - p;
                if cand > pi[w as usize] {
                    pi[w as usize] = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let tight = |u: usize, w: u32, wt: u8| pi[u] + q * wt as i64 - p == pi[w as usize];
    let mut color = vec![0u8; v];
    for root in 0..v {
        if color[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize, Slot)> = vec![(root, g.fwd_start[root], Slot::Holiday)];
        color[root] = 1;
        while let Some(top) = stack.last_mut() {
            let u = top.0;
            if top.1 == g.fwd_start[u + 1] {
                color[u] = 2;
                stack.pop();
                continue;
            }
            let (w, wt, label) = g.fwd[top.1];
            top.1 += 1;
            if !tight(u, w, wt) {
                continue;
            }
            let w = w as usize;
            match color[w] {
                0 => {
                    color[w] = 1;
                    stack.push((w, g.fwd_start[w], label));
                }
                1 => {
                    let pos = stack.iter().rposition(|f| f.0 == w)?;
                    let mut slots: Vec<Slot> = stack[pos + 1..].iter().map(|f| f.2).collect();
                    slots.push(label);
                    return Schedule::new(slots).ok();
                }
                _ => {}
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn successor_rules() {
        let s = StateSpace::new(&[2, 3], 100).unwrap();
        let mut out = Vec::new();
        // c = (1, 2): both jobs tight
        s.successors(1 + 2 * 2, &mut out);
        assert!(out.is_empty());
        // c = (1, 0): job 0 forced
        s.successors(1, &mut out);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, Slot::Job(0));
    }

    #[test]
    fn budget_reported() {
        let err = StateSpace::new(&[1000, 1000, 1000], 1_000_000).unwrap_err();
        assert!(matches!(err, Error::StateBudgetExceeded { .. }));
    }
}
