//! Equations of motion for one or two hinged flaps.
//!
//! The dual-flap system is
//!
//! ```text
//! (diag(I, I) + [[Ia, Ia_lr], [Ia_lr, Ia]]) θ'' + [[C, C_lr], [C_lr, C]] θ' + (k, k)·θ
//!     = (T0_l sin(ωt + φ_l), T0_r sin(ωt + φ_r))
//! ```
//!
//! and the single flap is its 1×1 restriction. The time-domain integrator
//! and the frequency-domain solve are two independent routes to the same
//! steady state; the test suites hold them against each other.

mod balance;
mod fit;
mod frequency;
mod integrate;
mod metrics;
mod system;

pub use balance::{power_balance, PowerBalance};
pub use fit::{harmonic_fit, HarmonicFit};
pub use frequency::{freq_domain_solve, FrequencyResponse};
pub use integrate::{integrate, IntegrationConfig, ResponseRecord};
pub use metrics::{response_metrics, FlapMetrics, ResponseMetrics};
pub use system::{assemble_system, Dof, FlapForcing, FlapProperties, ForcingSpec, SystemMatrices};

