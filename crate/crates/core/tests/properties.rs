use proptest::prelude::*;

use pinwheel::exact::offsets::{solve_eps_offsets, validate_offsets, EpsSearch};
use pinwheel::exact::{solve_periods, ExactVerdict};
use pinwheel::fold::{fold, schedule_density_half, validate_repr};
use pinwheel::num::rat;
use pinwheel::oracle::{brute_force_constant_gap, brute_force_pinwheel, catalog};
use pinwheel::reductions::{red_ps, tovey_transform};
use pinwheel::related::{constant_gap_check, red_rs, rs_value, GapVerdict};
use pinwheel::sat::{brute_force_sat, dpll, gen_random_34sat, gen_random_3sat};
use pinwheel::schedule::validate_schedule_gaps;
use pinwheel::{Job, PinwheelInstance, Rational, Schedule, Slot};

fn rational_instance() -> impl Strategy<Value = PinwheelInstance> {
    prop::collection::vec((1i64..=60, 1i64..=4), 1..8).prop_map(|v| {
        let jobs = v
            .into_iter()
            .map(|(n, d)| Job::new(rat(n.max(d), d)))
            .collect();
        PinwheelInstance::new(jobs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_solver_matches_oracle(periods in prop::collection::vec(1u64..=7, 1..=4)) {
        let solver = solve_periods(&periods, 1 << 22).unwrap();
        let oracle = brute_force_pinwheel(&periods, 1 << 24).unwrap();
        prop_assert_eq!(solver.is_schedulable(), oracle.is_schedulable());
        if let ExactVerdict::Schedulable(s) = solver {
            prop_assert!(validate_schedule_gaps(&periods, &s).unwrap().is_valid());
        }
    }

    #[test]
    fn fold_density_grows_less_than_inverse_theta(a in rational_instance(), t in 2i64..=20) {
        let theta = rat(t, 1);
        let f = fold(&a, &theta).unwrap();
        prop_assert!(f.density() - a.density() < theta.recip());
        prop_assert!(f.jobs.iter().all(|(_, p)| *p <= theta));
    }

    #[test]
    fn density_half_schedules_validate(a in rational_instance()) {
        let d = a.density();
        let a = if d > rat(1, 2) { a.scale(&(d * rat(2, 1))).unwrap() } else { a };
        let r = schedule_density_half(&a).unwrap();
        prop_assert!(validate_repr(&a, &r, 2048).unwrap().is_valid());
    }

    #[test]
    fn violating_schedules_lose_value(slots in prop::collection::vec(0usize..4, 1..16)) {
        let a = PinwheelInstance::from_integers(&[2, 4, 8, 8]).unwrap();
        let ri = red_rs(&a).unwrap();
        let s = Schedule::new(slots.iter().map(|&j| Slot::Job(j)).collect()).unwrap();
        let valid = validate_schedule_gaps(&[2, 4, 8, 8], &s).unwrap().is_valid();
        let v = rs_value(&ri, &s).unwrap();
        prop_assert_eq!(v == Rational::from_integer(1.into()), valid);
    }

    #[test]
    fn constant_gap_search_is_sound(demands in prop::collection::vec(1u64..=4, 1..=4)) {
        if let Some(o) = brute_force_constant_gap(&demands) {
            prop_assert_eq!(constant_gap_check(&demands, &o), GapVerdict::ExactCover);
        }
    }

    #[test]
    fn tovey_preserves_satisfiability(seed in 0u64..500, m in 1usize..12) {
        let f = gen_random_3sat(5, m, seed).unwrap();
        let g = tovey_transform(&f).unwrap();
        prop_assert!(g.occurrences().iter().all(|&c| c <= 4));
        prop_assert_eq!(brute_force_sat(&f).unwrap().is_sat(), dpll(&g).is_sat());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ps_reduction_is_dense(seed in 0u64..10_000, n in 3usize..=7) {
        let f = gen_random_34sat(n, (4 * n / 3).max(1), seed).unwrap();
        prop_assert_eq!(red_ps(&f).unwrap().density(), Rational::from_integer(1.into()));
    }
}

#[test]
fn dense_exact_search_agrees_with_solver() {
    let dense: Vec<Vec<u64>> = catalog(4, 12)
        .into_iter()
        .filter(|p| {
            PinwheelInstance::from_integers(p).unwrap().density()
                == Rational::from_integer(1.into())
        })
        .collect();
    assert!(dense.len() > 10);
    for periods in dense {
        let a = PinwheelInstance::from_integers(&periods).unwrap();
        let exact = solve_periods(&periods, 1 << 22).unwrap();
        match solve_eps_offsets(&a, 1 << 22).unwrap() {
            EpsSearch::Found(o) => {
                assert!(validate_offsets(&a, &o).unwrap().is_valid());
                assert!(exact.is_schedulable(), "{periods:?}");
            }
            EpsSearch::Exhausted => assert!(!exact.is_schedulable(), "{periods:?}"),
        }
    }
}
