//! Predicted exponents, boundary-decay fits, the Hölder reduction and
//! barrier sandwich checks.

mod fit;
mod holder;
mod prediction;
mod sandwich;

pub use fit::{
    check_two_sided, check_upper_bound, fit_boundary_exponent, log_log_fit, CheckKind, Consistency, DecayField, DecayFit,
    FitWindow, PowerField,
};
pub use holder::{decay_constant, holder_reduction_check, HolderReport, HolderStatus, SampledField};
pub use prediction::{predicted_exponents, Exponent, ExponentPrediction, PredictionInputs};
pub use sandwich::{sandwich_check, Certified, SandwichReport};
