//! Quantitative content of the stability argument: the beta-type integral
//! bound, the hypotheses on `f` and `φ` with their constants, the
//! Grönwall–Pachpatte chain, and a certificate checked against a computed
//! solution.

mod certificate;
mod chain;
mod hypotheses;
mod lemma31;
mod pachpatte;

pub use certificate::{
    certify_stability, h1_samples, run_pipeline, Certificate, Outcome, PipelineOptions, StabilityRun,
};
pub use chain::{default_t0, gronwall_chain, w_bound, BoundReport};
pub use hypotheses::{
    check_h1, check_h2, derive_constants, DerivedConstants, Enclosure, Envelope, H1Report, H1Sample,
    H2Report, Hypotheses, PhiFn, Verdict,
};
pub use lemma31::{
    check_lemma31, evaluate_i, evaluate_i_at, lemma31_constant, Lemma31Params, Lemma31Report, Lemma31Sample,
};
pub use pachpatte::{pachpatte_bound, power_sum_check, Growth, PowerSumReport};
