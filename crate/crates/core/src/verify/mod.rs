//! Pass/fail numerical experiments for the decay, smoothing, scaling and
//! asymptotic statements.

mod asymptotic;
mod dispersive;
mod fit;
mod local;
mod report;
mod similarity;
mod smoothing;

pub use asymptotic::{
    contracts, small_data_threshold, verify_asymptotic_link, AsymptoticOptions, SmallDataRun, ASYMPTOTIC_NOTE,
};
pub use dispersive::{
    dilation_ratio, dispersive_samples, operator_norm_estimate, verify_derivative_loss_dispersive,
    verify_dispersive_group, verify_mlf_operator_decay, DilationSearch, MlfDecayReport, NormSample,
};
pub use fit::{fit_power_law, log_times, FitResult, MIN_R_SQUARED};
pub use local::{verify_beta_lt2_run, verify_picard_contraction, LocalRunOptions, LocalRunReport, PicardOptions, PicardReport};
pub use report::{non_increasing, Check, VerifyReport};
pub use similarity::{homogeneous_datum, verify_self_similarity, SelfSimilarityOptions};
pub use smoothing::{
    smoothing_norm, verify_smoothing_bound_1d, verify_smoothing_equality_1d, BandLevel, SmoothingBoundOptions,
    SmoothingBoundReport, SmoothingEqualityReport, SmoothingOptions,
};
