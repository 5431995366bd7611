//! Correlation estimation, decay summaries, deviation bounds, the joint
//! correlation decomposition, and regularization schedule checks.

pub mod chebyshev;
pub mod correlation;
pub mod joint;
pub mod schedule;

pub use chebyshev::{chebyshev_check, deviation_bound, ChebyshevReport};
pub use correlation::{
    ensemble_correlation, ensemble_correlation_sequence, fit_decay, lambda_gamma_norm, mixing_bound_check,
    trajectory_correlation, CorrelationSequence, DecayCertificate, Estimator, MixingRow, Observable,
    StationaryProcess,
};
pub use joint::{joint_decomposition_check, FiniteChain, JointDecomposition};
pub use schedule::{
    check_assumptions, gate, region_verdict, schedule_eval, RegionVerdict, ScheduleCheck, ScheduleForm, ScheduleSpec,
    Trend, Variant,
};
