use std::f64::consts::PI;
use std::io::Write;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::system::{ForcingSpec, Reduced, SystemMatrices};
use crate::error::{Error, Result};

/// Fixed-step integration settings, all counted in forcing periods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegrationConfig {
    pub steps_per_period: usize,
    /// Periods integrated before the first convergence check.
    pub ramp_periods: usize,
    /// Periods in the measured window, run after convergence.
    pub measure_periods: usize,
    pub max_periods: usize,
    /// Relative change in per-cycle RMS rotation that counts as steady.
    pub convergence_tol: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            steps_per_period: 200,
            ramp_periods: 10,
            measure_periods: 10,
            max_periods: 200,
            convergence_tol: 1e-4,
        }
    }
}

impl IntegrationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps_per_period == 0
            || self.ramp_periods == 0
            || self.measure_periods == 0
            || self.max_periods == 0
        {
            return Err(Error::invalid("integration counts must all be >= 1"));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::invalid("convergence tolerance must be > 0"));
        }
        if self.max_periods < self.ramp_periods + self.measure_periods {
            return Err(Error::invalid(
                "max_periods must cover ramp_periods + measure_periods",
            ));
        }
        Ok(())
    }
}

/// Sampled rotation and angular velocity of every flap, uniform in time.
///
/// Fixed flaps carry all-zero series.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseRecord {
    pub time: Vec<f64>,
    pub rotation: Vec<Vec<f64>>,
    pub velocity: Vec<Vec<f64>>,
    pub fixed: Vec<bool>,
    pub omega: f64,
    pub steps_per_period: usize,
    /// Whole periods integrated.
    pub periods: usize,
    pub steady: bool,
}

impl ResponseRecord {
    pub fn flap_count(&self) -> usize {
        self.rotation.len()
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    /// Sample range covering the final `measure_periods` whole periods.
    pub fn measure_window(&self, measure_periods: usize) -> Result<Range<usize>> {
        if measure_periods == 0 || measure_periods > self.periods {
            return Err(Error::invalid(format!(
                "cannot measure {measure_periods} periods of a {}-period record",
                self.periods
            )));
        }
        let end = self.time.len() - 1;
        Ok(end - measure_periods * self.steps_per_period..end)
    }

    /// Write `t,theta_l,theta_r,omega_l,omega_r` (right-flap columns absent
    /// for a single flap), preceded by a `#` units line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# t [s], theta [rad], omega [rad/s]")?;
        let labels = ["l", "r"];
        let n = self.flap_count();
        let mut header = vec!["t".to_string()];
        header.extend(labels[..n].iter().map(|l| format!("theta_{l}")));
        header.extend(labels[..n].iter().map(|l| format!("omega_{l}")));
        writeln!(out, "{}", header.join(","))?;
        for (i, t) in self.time.iter().enumerate() {
            write!(out, "{t}")?;
            for series in self.rotation.iter().chain(&self.velocity) {
                write!(out, ",{}", series[i])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

fn acceleration(sys: &Reduced, t: f64, x: &[f64; 2], v: &[f64; 2]) -> [f64; 2] {
    let n = sys.n();
    let mut rhs = [0.0; 2];
    for i in 0..n {
        let mut damping = 0.0;
        for j in 0..n {
            damping += sys.damping[i][j] * v[j];
        }
        rhs[i] = sys.amplitude[i] * (sys.omega * t + sys.phase[i]).sin()
            - damping
            - sys.stiffness[i] * x[i];
    }
    let mut a = [0.0; 2];
    for i in 0..n {
        for j in 0..n {
            a[i] += sys.inertia_inv[i][j] * rhs[j];
        }
    }
    a
}

fn rk4_step(sys: &Reduced, t: f64, h: f64, x: &mut [f64; 2], v: &mut [f64; 2]) {
    let n = sys.n();
    let offset = |base: &[f64; 2], d: &[f64; 2], s: f64| {
        let mut out = [0.0; 2];
        for i in 0..n {
            out[i] = base[i] + s * d[i];
        }
        out
    };

    let k1x = *v;
    let k1v = acceleration(sys, t, x, v);
    let (x2, v2) = (offset(x, &k1x, 0.5 * h), offset(v, &k1v, 0.5 * h));
    let k2x = v2;
    let k2v = acceleration(sys, t + 0.5 * h, &x2, &v2);
    let (x3, v3) = (offset(x, &k2x, 0.5 * h), offset(v, &k2v, 0.5 * h));
    let k3x = v3;
    let k3v = acceleration(sys, t + 0.5 * h, &x3, &v3);
    let (x4, v4) = (offset(x, &k3x, h), offset(v, &k3v, h));
    let k4x = v4;
    let k4v = acceleration(sys, t + h, &x4, &v4);

    for i in 0..n {
        x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
        v[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
    }
}

fn cycle_rms(series: &[f64], steps: usize) -> f64 {
    let cycle = &series[series.len() - steps..];
    (cycle.iter().map(|v| v * v).sum::<f64>() / steps as f64).sqrt()
}

fn relative_change(prev: f64, cur: f64) -> f64 {
    let scale = prev.abs().max(cur.abs());
    if scale == 0.0 {
        0.0
    } else {
        (cur - prev).abs() / scale
    }
}

/// Integrate the equations of motion from rest with classical RK4.
///
/// The step is `period / steps_per_period`. From the end of the ramp, each
/// period's RMS rotation is compared with the previous period's; once the
/// relative change is below `convergence_tol` on every flap, the run goes on
/// for `measure_periods` more periods and stops, so the measured window
/// lies entirely after convergence. Reaching `max_periods` first returns the
/// record with `steady = false`.
pub fn integrate(
    system: &SystemMatrices,
    forcing: &ForcingSpec,
    cfg: &IntegrationConfig,
) -> Result<ResponseRecord> {
    cfg.validate()?;
    let sys = Reduced::new(system, forcing)?;
    let dof = system.dof_count();
    let steps = cfg.steps_per_period;
    let dt = forcing.period() / steps as f64;
    let capacity = cfg.max_periods * steps + 1;

    let mut time = Vec::with_capacity(capacity);
    let mut rotation = vec![Vec::with_capacity(capacity); dof];
    let mut velocity = vec![Vec::with_capacity(capacity); dof];
    time.push(0.0);
    for i in 0..dof {
        rotation[i].push(0.0);
        velocity[i].push(0.0);
    }

    let mut x = [0.0; 2];
    let mut v = [0.0; 2];
    let mut previous: Option<Vec<f64>> = None;
    let mut settled_at: Option<usize> = None;
    let mut steady = false;
    let mut periods = 0;

    for period in 1..=cfg.max_periods {
        for s in 0..steps {
            let step = (period - 1) * steps + s;
            let t = step as f64 * dt;
            rk4_step(&sys, t, dt, &mut x, &mut v);
            if x.iter().chain(&v).any(|s| !s.is_finite()) {
                return Err(Error::numerical(format!(
                    "non-finite state at step {} (t = {} s)",
                    step + 1,
                    t + dt
                )));
            }
            time.push((step + 1) as f64 * dt);
            for i in 0..dof {
                let (theta, omega) = match sys.free.iter().position(|&f| f == i) {
                    Some(a) => (x[a], v[a]),
                    None => (0.0, 0.0),
                };
                rotation[i].push(theta);
                velocity[i].push(omega);
            }
        }
        periods = period;

        // once settled, the measured window is the next measure_periods
        if let Some(p) = settled_at {
            if period >= p + cfg.measure_periods {
                steady = true;
                break;
            }
            continue;
        }
        let rms: Vec<f64> = rotation.iter().map(|r| cycle_rms(r, steps)).collect();
        if period >= cfg.ramp_periods {
            if let Some(prev) = &previous {
                let settled = prev
                    .iter()
                    .zip(&rms)
                    .all(|(&a, &b)| relative_change(a, b) < cfg.convergence_tol);
                if settled {
                    settled_at = Some(period);
                }
            }
        }
        previous = Some(rms);
    }

    Ok(ResponseRecord {
        time,
        rotation,
        velocity,
        fixed: forcing.flaps.iter().map(|f| f.fixed).collect(),
        omega: forcing.omega,
        steps_per_period: steps,
        periods,
        steady,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{assemble_system, Dof, FlapForcing, FlapProperties};
    use crate::hydro::HydroCoefficients;

    fn reference_1dof() -> SystemMatrices {
        let props = FlapProperties {
            inertia_dry: 1.0e7,
            stiffness: 4.375e6,
        };
        assemble_system(&props, &HydroCoefficients::uncoupled(0.0, 1.0e6), Dof::One).unwrap()
    }

    fn steady_amplitude(rec: &ResponseRecord) -> f64 {
        let w = rec.measure_window(10).unwrap();
        rec.rotation[0][w].iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    #[test]
    fn zero_forcing_gives_zero_record() {
        let sys = reference_1dof();
        let rec = integrate(&sys, &ForcingSpec::single(0.0, 0.0, 0.66), &Default::default()).unwrap();
        assert!(rec.rotation[0].iter().all(|&v| v == 0.0));
        assert!(rec.velocity[0].iter().all(|&v| v == 0.0));
        assert!(rec.steady);
        assert_eq!(rec.periods, 20);
    }

    #[test]
    fn resonant_closed_form() {
        let omega = 2.0 * PI / 9.5;
        let rec = integrate(
            &reference_1dof(),
            &ForcingSpec::single(0.6e6, 0.0, omega),
            &Default::default(),
        )
        .unwrap();
        assert!(rec.steady);
        let expected = 0.6e6 / (1.0e6 * omega);
        assert!((expected - 0.9071).abs() < 1e-4);
        let amp = steady_amplitude(&rec);
        assert!(((amp - expected) / expected).abs() < 5e-3, "{amp} vs {expected}");
    }

    #[test]
    fn uniform_time_grid_and_lengths() {
        let rec = integrate(
            &reference_1dof(),
            &ForcingSpec::single(1.0e5, 0.3, 0.5),
            &Default::default(),
        )
        .unwrap();
        let dt = rec.time[1] - rec.time[0];
        assert!(rec
            .time
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() < 1e-9 * dt.max(1.0)));
        assert_eq!(rec.time.len(), rec.rotation[0].len());
        assert_eq!(rec.time.len(), rec.velocity[0].len());
        assert_eq!(rec.time.len(), rec.periods * rec.steps_per_period + 1);
    }

    #[test]
    fn symmetric_in_phase_is_bitwise_identical() {
        let props = FlapProperties {
            inertia_dry: 8.0e6,
            stiffness: 4.375e6,
        };
        let coeffs = HydroCoefficients {
            added_inertia: 2.0e6,
            damping: 1.0e6,
            coupling_inertia: -4.0e5,
            coupling_damping: -1.5e5,
        };
        let sys = assemble_system(&props, &coeffs, Dof::Two).unwrap();
        let f = FlapForcing::free(0.6e6, 0.0);
        let rec = integrate(&sys, &ForcingSpec::dual(f, f, 0.7), &Default::default()).unwrap();
        assert_eq!(rec.rotation[0], rec.rotation[1]);
        assert_eq!(rec.velocity[0], rec.velocity[1]);
    }

    #[test]
    fn fixed_flap_stays_at_rest() {
        let props = FlapProperties {
            inertia_dry: 1.0e7,
            stiffness: 4.375e6,
        };
        let coeffs = HydroCoefficients {
            added_inertia: 0.0,
            damping: 1.0e6,
            coupling_inertia: 0.0,
            coupling_damping: -2.0e5,
        };
        let sys = assemble_system(&props, &coeffs, Dof::Two).unwrap();
        let forcing = ForcingSpec::dual(FlapForcing::fixed(), FlapForcing::free(0.6e6, 0.0), 0.6);
        let rec = integrate(&sys, &forcing, &Default::default()).unwrap();
        assert!(rec.rotation[0].iter().all(|&v| v == 0.0));
        assert!(rec.velocity[0].iter().all(|&v| v == 0.0));
        assert!(rec.rotation[1].iter().any(|&v| v != 0.0));
        assert_eq!(rec.fixed, vec![true, false]);
    }

    #[test]
    fn unsteady_run_is_flagged() {
        // barely damped and far from settling within 25 periods
        let sys = SystemMatrices {
            inertia: [[1.0, 0.0], [0.0, 0.0]],
            damping: [[1e-4, 0.0], [0.0, 0.0]],
            stiffness: [1.0, 0.0],
            dof: Dof::One,
        };
        let cfg = IntegrationConfig {
            max_periods: 25,
            ..Default::default()
        };
        let rec = integrate(&sys, &ForcingSpec::single(1.0, 0.0, 0.77), &cfg).unwrap();
        assert!(!rec.steady);
        assert_eq!(rec.periods, 25);
    }

    #[test]
    fn overflow_reports_step() {
        let sys = SystemMatrices {
            inertia: [[1.0, 0.0], [0.0, 0.0]],
            damping: [[-50.0, 0.0], [0.0, 0.0]],
            stiffness: [1.0, 0.0],
            dof: Dof::One,
        };
        let err = integrate(&sys, &ForcingSpec::single(1.0, 0.0, 1.0), &Default::default())
            .unwrap_err();
        assert!(err.is_numerical());
        assert!(err.to_string().contains("step"), "{err}");
    }

    #[test]
    fn invalid_config() {
        let cfg = IntegrationConfig {
            steps_per_period: 0,
            ..Default::default()
        };
        assert!(integrate(&reference_1dof(), &ForcingSpec::single(1.0, 0.0, 1.0), &cfg).is_err());
        let cfg = IntegrationConfig {
            convergence_tol: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn halving_dt_barely_moves_amplitude() {
        let sys = reference_1dof();
        let forcing = ForcingSpec::single(0.6e6, 0.0, 0.55);
        let coarse = integrate(&sys, &forcing, &Default::default()).unwrap();
        let fine_cfg = IntegrationConfig {
            steps_per_period: 400,
            ..Default::default()
        };
        let fine = integrate(&sys, &forcing, &fine_cfg).unwrap();
        let a = crate::dynamics::response_metrics(&coarse, &Default::default()).unwrap();
        let b = crate::dynamics::response_metrics(&fine, &fine_cfg).unwrap();
        let rel = (a.flaps[0].amplitude - b.flaps[0].amplitude).abs() / b.flaps[0].amplitude;
        assert!(rel < 1e-4, "{rel}");
    }

    #[test]
    fn csv_dump_columns() {
        let rec = integrate(
            &reference_1dof(),
            &ForcingSpec::single(1.0, 0.0, 1.0),
            &Default::default(),
        )
        .unwrap();
        let mut buf = Vec::new();
        rec.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with('#'));
        assert_eq!(lines.next().unwrap(), "t,theta_l,omega_l");
        assert_eq!(lines.count(), rec.time.len());
    }
}
