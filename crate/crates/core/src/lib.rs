//! Hydrodynamic interaction between a pair of bottom-hinged oscillating
//! wave surge flaps.
//!
//! Each flap is a damped rotational oscillator. Two flaps are coupled
//! through off-diagonal added inertia and radiation damping whose strength
//! depends on their separation relative to the incident wavelength. The
//! crate integrates the equations of motion in the time domain, checks them
//! against a frequency-domain solve, and builds power matrices and annual
//! energy estimates on top.
//!
//! ```
//! use oswec::{Model, ScenarioKind, TorqueScenario};
//!
//! let model = Model::reference();
//! let case = model
//!     .simulate_torque(&TorqueScenario {
//!         kind: ScenarioKind::InPhase,
//!         amplitude: 1.0e6,
//!         period: 9.5,
//!         distance: 10.0,
//!     })
//!     .unwrap();
//! assert!(case.metrics.steady);
//! assert_eq!(case.metrics.flaps.len(), 2);
//! ```

pub mod config;
pub mod dynamics;
pub mod energy;
mod error;
pub mod forcing;
pub mod hydro;
mod model;
pub mod sweep;
pub mod verify;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use forcing::{ScenarioKind, TorqueScenario, WaveCondition};
pub use hydro::{Environment, WaterDepth};
pub use model::{CaseResult, Model, ModelDescriptor};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/coupling.md")]
    mod coupling {}
    #[doc = include_str!("../../../book/src/waves.md")]
    mod waves {}
    #[doc = include_str!("../../../book/src/steady-state.md")]
    mod steady_state {}
    #[doc = include_str!("../../../book/src/energy.md")]
    mod energy {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
