use num_complex::Complex64;

use super::system::{ForcingSpec, Reduced, SystemMatrices};
use crate::error::{Error, Result};

/// Complex steady-state rotation of each flap; θ(t) = |Θ|·sin(ωt + arg Θ).
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    pub amplitudes: Vec<Complex64>,
}

impl FrequencyResponse {
    pub fn amplitude(&self, flap: usize) -> f64 {
        self.amplitudes[flap].norm()
    }

    pub fn phase(&self, flap: usize) -> f64 {
        let z = self.amplitudes[flap];
        if z == Complex64::new(0.0, 0.0) {
            0.0
        } else {
            z.arg()
        }
    }
}

/// Solve `(K − ω²M + iωC)·Θ = F` with `F_j = T0_j·e^{iφ_j}`.
///
/// Fixed flaps are eliminated before the solve and report Θ = 0.
pub fn freq_domain_solve(system: &SystemMatrices, forcing: &ForcingSpec) -> Result<FrequencyResponse> {
    let sys = Reduced::new(system, forcing)?;
    let n = sys.n();
    let w = sys.omega;

    let mut z = [[Complex64::new(0.0, 0.0); 2]; 2];
    let mut f = [Complex64::new(0.0, 0.0); 2];
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let stiff = if i == j { sys.stiffness[i] } else { 0.0 };
            z[i][j] = Complex64::new(stiff - w * w * sys.inertia[i][j], w * sys.damping[i][j]);
            scale = scale.max(stiff.abs() + (w * w * sys.inertia[i][j]).abs());
        }
        f[i] = Complex64::from_polar(sys.amplitude[i], sys.phase[i]);
    }

    let singular = || {
        Error::numerical(format!(
            "dynamic stiffness matrix is singular at omega = {w} rad/s"
        ))
    };
    let mut theta = [Complex64::new(0.0, 0.0); 2];
    match n {
        0 => {}
        1 => {
            if z[0][0].norm() <= 1e-14 * scale {
                return Err(singular());
            }
            theta[0] = f[0] / z[0][0];
        }
        _ => {
            let det = z[0][0] * z[1][1] - z[0][1] * z[1][0];
            if !det.is_finite() || det.norm() <= 1e-14 * scale * scale {
                return Err(singular());
            }
            theta[0] = (f[0] * z[1][1] - z[0][1] * f[1]) / det;
            theta[1] = (z[0][0] * f[1] - z[1][0] * f[0]) / det;
        }
    }

    let mut amplitudes = vec![Complex64::new(0.0, 0.0); system.dof_count()];
    for (a, &i) in sys.free.iter().enumerate() {
        amplitudes[i] = theta[a];
    }
    Ok(FrequencyResponse { amplitudes })
}
