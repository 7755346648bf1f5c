use std::f64::consts::PI;
use std::ops::Range;

use crate::error::{Error, Result};

/// Amplitude and phase of `amplitude · sin(ωt + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicFit {
    pub amplitude: f64,
    /// In (−π, π].
    pub phase: f64,
}

/// Least-squares fit of `A·sin(ωt) + B·cos(ωt)` over `window`.
///
/// The window must span at least three periods of ω.
pub fn harmonic_fit(
    time: &[f64],
    series: &[f64],
    omega: f64,
    window: Range<usize>,
) -> Result<HarmonicFit> {
    if time.len() != series.len() {
        return Err(Error::invalid("time and series lengths differ"));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid(format!("omega must be > 0, got {omega}")));
    }
    if window.end > time.len() || window.len() < 2 {
        return Err(Error::invalid("fit window out of range"));
    }
    let n = window.len();
    let dt = (time[window.end - 1] - time[window.start]) / (n - 1) as f64;
    let span = n as f64 * dt;
    let period = 2.0 * PI / omega;
    if span < 3.0 * period * (1.0 - 1e-9) {
        return Err(Error::invalid(format!(
            "fit window spans {span} s, need at least three periods ({} s)",
            3.0 * period
        )));
    }

    let (mut ss, mut sc, mut cc, mut ys, mut yc) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in window {
        let (s, c) = (omega * time[i]).sin_cos();
        let y = series[i];
        ss += s * s;
        sc += s * c;
        cc += c * c;
        ys += y * s;
        yc += y * c;
    }
    let det = ss * cc - sc * sc;
    if !(det.abs() > 0.0) {
        return Err(Error::numerical("degenerate harmonic fit"));
    }
    let a = (ys * cc - yc * sc) / det;
    let b = (yc * ss - ys * sc) / det;

    let mut phase = b.atan2(a);
    if phase <= -PI {
        phase = PI;
    }
    if phase == 0.0 {
        phase = 0.0;
    }
    Ok(HarmonicFit {
        amplitude: a.hypot(b),
        phase,
    })
}
