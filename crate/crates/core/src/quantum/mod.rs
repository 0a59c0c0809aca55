//! Quantum treatment of the weak-deflecting-field regime: alignment factors
//! A_{J,m}, δ-kick propagation for z- and x-polarized prealignment pulses,
//! thermal/spin-statistics weighting, and the discrete distribution of A.

mod matrix_elements;
mod propagate;
mod state;
mod thermal;

pub use matrix_elements::{
    alignment_factor, alignment_factor_exact, cos2_matrix_element, cos2_theta_element,
    sin2_e2iphi_element, AngleOperator,
};
pub use propagate::{j_max_for_kick, kick_propagate, TRUNCATION_TOLERANCE, XI_RTOL};
pub use state::QuantumState;
pub use thermal::{
    alignment_expectation_trace, coarse_grain, revival_period, thermal_alignment_trace,
    thermal_distribution, DiscreteAlignmentDistribution, RationalAlignment,
};
