//! Rewriting 3-SAT formulas so that no variable occurs in more than four clauses.

use crate::sat::{lit_var, CnfFormula};
use crate::Result;

/// Equisatisfiable formula in which every variable occurs in at most four clauses. A variable
/// with `k > 4` occurrences is replaced by `k` fresh variables, one per occurrence, tied equal
/// by the cycle `(y_1 ∨ ¬y_2), …, (y_k ∨ ¬y_1)`. Other variables are renumbered in order.
pub fn tovey_transform(f: &CnfFormula) -> Result<CnfFormula> {
    let occ = f.occurrences();
    let mut next = 0i32;
    let mut single = vec![0i32; f.num_vars];
    let mut fresh: Vec<Vec<i32>> = vec![Vec::new(); f.num_vars];
    for v in 0..f.num_vars {
        if occ[v] > 4 {
            fresh[v] = (0..occ[v])
                .map(|_| {
                    next += 1;
                    next
                })
                .collect();
        } else {
            next += 1;
            single[v] = next;
        }
    }
    let mut used = vec![0usize; f.num_vars];
    let mut clauses: Vec<Vec<i32>> = f
        .clauses
        .iter()
        .map(|c| {
            c.iter()
                .map(|&l| {
                    let v = lit_var(l) - 1;
                    let y = if fresh[v].is_empty() {
                        single[v]
                    } else {
                        used[v] += 1;
                        fresh[v][used[v] - 1]
                    };
                    y * l.signum()
                })
                .collect()
        })
        .collect();
    for ys in fresh.iter().filter(|ys| !ys.is_empty()) {
        for j in 0..ys.len() {
            clauses.push(vec![ys[j], -ys[(j + 1) % ys.len()]]);
        }
    }
    CnfFormula::new(next as usize, clauses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::{brute_force_sat, gen_random_3sat};

    #[test]
    fn heavy_variable_is_split() {
        let f = CnfFormula::new(
            6,
            vec![
                vec![1, 2, 3],
                vec![1, -2, 4],
                vec![-1, 3, 5],
                vec![1, 4, 6],
                vec![-1, -5, -6],
            ],
        )
        .unwrap();
        let g = tovey_transform(&f).unwrap();
        assert_eq!(g.num_vars, 10);
        assert_eq!(g.num_clauses(), 10);
        assert!(g.is_34sat());
        assert_eq!(
            brute_force_sat(&f).unwrap().is_sat(),
            brute_force_sat(&g).unwrap().is_sat()
        );
    }

    #[test]
    fn light_formula_is_renamed_only() {
        let f = CnfFormula::new(3, vec![vec![1, -2, 3]]).unwrap();
        assert_eq!(tovey_transform(&f).unwrap(), f);
    }

    #[test]
    fn equisatisfiable_on_random_formulas() {
        for seed in 0..30 {
            let f = gen_random_3sat(4, 12, seed).unwrap();
            let g = tovey_transform(&f).unwrap();
            assert!(g.is_34sat());
            if g.num_vars <= 20 {
                assert_eq!(
                    brute_force_sat(&f).unwrap().is_sat(),
                    brute_force_sat(&g).unwrap().is_sat()
                );
            }
        }
    }
}
