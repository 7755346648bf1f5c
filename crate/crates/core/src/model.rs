//! A fully configured simulator: environment, flap, coefficients, wave
//! excitation, PTO and integration settings.

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    assemble_system, integrate, response_metrics, Dof, FlapProperties, ForcingSpec,
    IntegrationConfig, ResponseMetrics, ResponseRecord, SystemMatrices,
};
use crate::energy::{mean_power, FlapPower, PtoModel};
use crate::error::{Error, Result};
use crate::forcing::{
    build_single_wave_forcing, build_torque_scenario, build_wave_forcing, ExcitationTransfer,
    ScenarioKind, TorqueScenario, WaveCondition,
};
use crate::hydro::{CoefficientSource, CouplingKernel, Environment, HydroCoefficients};

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub env: Environment,
    pub flap: FlapProperties,
    pub coefficients: CoefficientSource,
    pub transfer: ExcitationTransfer,
    pub pto: PtoModel,
    pub integration: IntegrationConfig,
}

/// Everything one simulation produced.
#[derive(Debug, Clone)]
pub struct CaseResult {
    pub system: SystemMatrices,
    pub forcing: ForcingSpec,
    pub record: ResponseRecord,
    pub metrics: ResponseMetrics,
    pub power: FlapPower,
}

/// Short, serializable summary of a model for report headers.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub coefficient_source: String,
    pub inertia_dry_kg_m2: f64,
    pub stiffness_Nm_per_rad: f64,
    pub pto_damping_Nms_per_rad: f64,
    pub pto_included_in_damping: bool,
    pub back_flap_eta: f64,
    pub environment: Environment,
    pub integration: IntegrationConfig,
}

impl Model {
    /// The shipped reference configuration.
    ///
    /// One flap resonates at T = 9.5 s: (I + I_a) = 1e7 kg·m², k = 4.375e6
    /// N·m/rad, C = 1e6 N·m·s/rad, half of it taken by the PTO. Coupling
    /// comes from the analytic kernel with its reference gain; excitation
    /// from the constant reference transfer.
    pub fn reference() -> Self {
        let damping = 1.0e6;
        Model {
            env: Environment::deep(),
            flap: FlapProperties {
                inertia_dry: 1.0e7,
                stiffness: 4.375e6,
            },
            coefficients: CoefficientSource::Analytic {
                base: HydroCoefficients::uncoupled(0.0, damping),
                kernel: CouplingKernel::default(),
            },
            transfer: ExcitationTransfer::reference(),
            pto: PtoModel::share_of(damping, 0.5),
            integration: IntegrationConfig::default(),
        }
    }

    /// Coupling and back-flap attenuation switched off.
    pub fn decoupled(&self) -> Self {
        Model {
            coefficients: self.coefficients.decoupled(),
            transfer: self.transfer.without_attenuation(),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        self.flap.validate()?;
        self.pto.validate()?;
        self.integration.validate()?;
        if let CoefficientSource::Analytic { base, kernel } = &self.coefficients {
            base.validate()?;
            kernel.validate()?;
        }
        Ok(())
    }

    pub fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor {
            coefficient_source: self.coefficients.descriptor(),
            inertia_dry_kg_m2: self.flap.inertia_dry,
            stiffness_Nm_per_rad: self.flap.stiffness,
            pto_damping_Nms_per_rad: self.pto.damping,
            pto_included_in_damping: self.pto.included,
            back_flap_eta: self.transfer.eta,
            environment: self.env,
            integration: self.integration,
        }
    }

    fn finish(&self, coeffs: &HydroCoefficients, dof: Dof) -> Result<SystemMatrices> {
        if self.pto.included && self.pto.damping > coeffs.damping {
            return Err(Error::invalid(format!(
                "PTO damping {} exceeds the system damping {} it is part of",
                self.pto.damping, coeffs.damping
            )));
        }
        let sys = assemble_system(&self.flap, coeffs, dof)?;
        Ok(if self.pto.included {
            sys
        } else {
            sys.with_extra_damping(self.pto.damping)
        })
    }

    /// System matrices of an isolated flap at `period`.
    pub fn single_system(&self, period: f64) -> Result<SystemMatrices> {
        self.finish(&self.coefficients.single(period)?, Dof::One)
    }

    /// System matrices of a flap pair at `period` and `distance`.
    pub fn pair_system(&self, period: f64, distance: f64) -> Result<SystemMatrices> {
        self.finish(&self.coefficients.pair(period, distance, &self.env)?, Dof::Two)
    }

    pub fn run(&self, system: SystemMatrices, forcing: ForcingSpec) -> Result<CaseResult> {
        let record = integrate(&system, &forcing, &self.integration)?;
        let metrics = response_metrics(&record, &self.integration)?;
        let power = mean_power(&record, &self.pto, &self.integration)?;
        Ok(CaseResult {
            system,
            forcing,
            record,
            metrics,
            power,
        })
    }

    pub fn simulate_torque(&self, scenario: &TorqueScenario) -> Result<CaseResult> {
        let forcing = build_torque_scenario(scenario, &self.env)?;
        let system = match scenario.kind {
            ScenarioKind::SingleBaseline => self.single_system(scenario.period)?,
            _ => self.pair_system(scenario.period, scenario.distance)?,
        };
        self.run(system, forcing)
    }

    /// Wave-forced run. `distance = None` simulates one isolated flap.
    pub fn simulate_wave(&self, wave: &WaveCondition, distance: Option<f64>) -> Result<CaseResult> {
        match distance {
            None => {
                let forcing = build_single_wave_forcing(wave, &self.transfer)?;
                self.run(self.single_system(wave.period)?, forcing)
            }
            Some(d) => {
                let forcing = build_wave_forcing(wave, d, &self.transfer, &self.env)?;
                self.run(self.pair_system(wave.period, d)?, forcing)
            }
        }
    }
}
