//! Verification of shifted identities `p_{S₁}(n − H) = p_{S₂}(n)` along
//! progressions: principal-part comparison at every cusp, coefficient
//! comparison through the Sturm bound, cusp enumeration for `Γ₁(N)`, and
//! counterexample search.

mod certificate;
mod cusps;
mod problem;
mod search;
mod sturm;
mod suited;

pub use certificate::{
    persist_certificate, results_dir, sha256_hex, Certificate, Checkpoint, Verdict, Witness,
    RESULTS_DIR_ENV,
};
pub use cusps::{cusp_count_formula, cusp_representatives, cusps_equivalent};
pub use problem::{build_problem, gamma_level, level_formula, IdentityProblem, ProblemConfig};
pub use search::{
    alt_identity_check, find_counterexample, shift, Counterexample, Progression,
    DEFAULT_SEARCH_BOUND,
};
pub use sturm::{
    hatted_coefficient, hatted_order_bound, hatted_series, holomorphy_check, index_gamma1,
    recheck_coefficient_witness, sturm_bound, sturm_robins_check, verify_identity_sturm,
    verify_identity_sturm_with, SturmConfig, COEFFICIENT_BLOCK,
};
pub use suited::{
    check_suited, check_suited_with, compare_at_cusp, dp_scan, principal_exponent_set,
    recheck_cusp_witness, CheckpointSpec, CUSP_CHUNK,
};
