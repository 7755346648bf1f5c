use std::f64::consts::PI;

use oswec::dynamics::{
    freq_domain_solve, harmonic_fit, integrate, power_balance, Dof, FlapForcing, ForcingSpec,
    IntegrationConfig, SystemMatrices,
};
use oswec::verify::{random_cases, run_verification, verify_case, Fault, Property, VerifyOptions};
use oswec::{Model, ScenarioKind, TorqueScenario};
use proptest::prelude::*;

fn wrap(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

#[test]
fn default_suite_passes() {
    let report = run_verification(&VerifyOptions::default(), &IntegrationConfig::default());
    assert_eq!(report.cases.len(), 20);
    for c in report.failures() {
        panic!("{}: {:?}", c.case, c.properties);
    }
}

#[test]
fn suite_is_independent_of_worker_count() {
    let opts = VerifyOptions {
        cases: 6,
        seed: 11,
        fault: None,
    };
    let cfg = IntegrationConfig::default();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| run_verification(&opts, &cfg));
    let b = four.install(|| run_verification(&opts, &cfg));
    assert_eq!(a, b);
}

#[test]
fn damping_sign_fault_is_caught() {
    let cfg = IntegrationConfig::default();
    for case in random_cases(4, 5) {
        let out = verify_case(&case, &cfg, Some(Fault::FlipDampingSign));
        let balance = out
            .properties
            .iter()
            .find(|p| p.property == Property::EnergyBalance)
            .unwrap();
        assert!(!balance.passed, "{}", case);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn time_domain_matches_frequency_domain(seed in 0u64..10_000, index in 0usize..6) {
        let case = random_cases(index + 1, seed).pop().unwrap();
        let cfg = IntegrationConfig::default();
        let rec = integrate(&case.system, &case.forcing, &cfg).unwrap();
        let oracle = freq_domain_solve(&case.system, &case.forcing).unwrap();
        let window = rec.measure_window(cfg.measure_periods).unwrap();
        for i in 0..rec.flap_count() {
            let fit = harmonic_fit(&rec.time, &rec.rotation[i], case.forcing.omega, window.clone()).unwrap();
            let want = oracle.amplitude(i);
            prop_assert!((fit.amplitude - want).abs() / want < 0.01, "{}", case);
            prop_assert!(wrap(fit.phase - oracle.phase(i)).abs() < 0.02, "{}", case);
        }
    }
}

#[test]
fn reference_resonance_amplitude() {
    // T0 / (C ω) at ω = 2π/9.5
    let omega = 2.0 * PI / 9.5;
    let expected = 0.6e6 / (1.0e6 * omega);
    assert!((expected - 0.9071).abs() < 1e-4);
    let case = Model::reference()
        .simulate_torque(&TorqueScenario {
            kind: ScenarioKind::SingleBaseline,
            amplitude: 0.6e6,
            period: 9.5,
            distance: 0.0,
        })
        .unwrap();
    let amp = case.metrics.flaps[0].amplitude;
    assert!((amp - 0.9071).abs() / 0.9071 < 0.005, "{amp}");
}

#[test]
fn symmetric_modes_follow_the_scalar_formula() {
    let m = Model::reference();
    for period in [7.5, 8.5, 9.5, 10.5] {
        let sys = m.pair_system(period, 10.0).unwrap();
        let omega = 2.0 * PI / period;
        for (kind, sign) in [(ScenarioKind::InPhase, 1.0), (ScenarioKind::OutOfPhase, -1.0)] {
            let inertia = sys.inertia[0][0] + sign * sys.inertia[0][1];
            let damping = sys.damping[0][0] + sign * sys.damping[0][1];
            let k = sys.stiffness[0];
            let t0 = 1.0e6;
            let formula = t0 / ((k - inertia * omega * omega).powi(2) + (damping * omega).powi(2)).sqrt();
            let case = m
                .simulate_torque(&TorqueScenario { kind, amplitude: t0, period, distance: 10.0 })
                .unwrap();
            for f in &case.metrics.flaps {
                assert!((f.amplitude - formula).abs() / formula < 0.01, "{kind} T={period}");
            }
        }
    }
}

#[test]
fn energy_balance_on_reference_runs() {
    let m = Model::reference();
    for kind in ScenarioKind::ALL {
        let case = m
            .simulate_torque(&TorqueScenario { kind, amplitude: 0.8e6, period: 8.5, distance: 45.0 })
            .unwrap();
        let b = power_balance(&case.record, &case.system, &case.forcing, &m.integration).unwrap();
        assert!(b.relative_error() < 0.01, "{kind}: {b:?}");
    }
}

#[test]
fn response_scales_linearly_with_forcing() {
    let sys = SystemMatrices {
        inertia: [[8.0e6, 4.0e5], [4.0e5, 8.0e6]],
        damping: [[9.0e5, -1.0e5], [-1.0e5, 9.0e5]],
        stiffness: [4.0e6, 4.0e6],
        dof: Dof::Two,
    };
    let f = ForcingSpec {
        omega: 0.7,
        flaps: vec![FlapForcing::free(5.0e5, 0.0), FlapForcing::free(5.0e5, 1.0)],
    };
    let cfg = IntegrationConfig::default();
    let a = integrate(&sys, &f, &cfg).unwrap();
    let b = integrate(&sys, &f.scaled(3.0), &cfg).unwrap();
    for i in 0..2 {
        for (x, y) in a.rotation[i].iter().zip(&b.rotation[i]) {
            assert!((3.0 * x - y).abs() <= 1e-9 * y.abs().max(1e-12));
        }
    }
}
