//! Reductions from 3-SAT to pinwheel scheduling.

pub mod allowed;
pub mod combine;
pub mod eps;
pub mod fill;
pub mod flow;
pub mod greedy;
pub mod primes;
pub mod ps;
pub mod tovey;
pub mod witness;

pub use allowed::{all_allowed_periods, allowed_periods};
pub use combine::{combine_jobs, split_jobs};
pub use eps::{
    check_normal_form, red_concise, red_eps, ConciseReduction, JobRole, LiteralReps, TaggedInstance,
};
pub use fill::eps_fill;
pub use flow::{flow_construct, FlowAssignment};
pub use greedy::{greedy_jobs, warm_greedy_jobs, JobCounts};
pub use primes::primes_above;
pub use ps::{red_ps, red_ps_detailed, PsReduction};
pub use tovey::tovey_transform;
pub use witness::{build_eps_witness, validate_witness, EpsWitness};
