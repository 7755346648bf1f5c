use std::f64::consts::PI;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

pub const DEFAULT_GRAVITY: f64 = 9.81;

const MAX_NEWTON_ITERATIONS: usize = 100;
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum WaterDepth {
    #[default]
    Deep,
    Finite(f64),
}

impl Serialize for WaterDepth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            WaterDepth::Deep => s.serialize_str("deep"),
            WaterDepth::Finite(h) => s.serialize_f64(*h),
        }
    }
}

impl<'de> Deserialize<'de> for WaterDepth {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct DepthVisitor;

        impl Visitor<'_> for DepthVisitor {
            type Value = WaterDepth;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a depth in metres or the string \"deep\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<WaterDepth, E> {
                if v.eq_ignore_ascii_case("deep") {
                    Ok(WaterDepth::Deep)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<WaterDepth, E> {
                Ok(WaterDepth::Finite(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<WaterDepth, E> {
                Ok(WaterDepth::Finite(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<WaterDepth, E> {
                Ok(WaterDepth::Finite(v as f64))
            }
        }

        d.deserialize_any(DepthVisitor)
    }
}

fn default_gravity() -> f64 {
    DEFAULT_GRAVITY
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    #[serde(rename = "gravity_m_per_s2", default = "default_gravity")]
    pub gravity: f64,
    #[serde(rename = "water_depth_m", default)]
    pub water_depth: WaterDepth,
}

impl Default for Environment {
    fn default() -> Self {
        Environment::deep()
    }
}

impl Environment {
    pub fn deep() -> Self {
        Environment {
            gravity: DEFAULT_GRAVITY,
            water_depth: WaterDepth::Deep,
        }
    }

    pub fn with_depth(depth: f64) -> Self {
        Environment {
            gravity: DEFAULT_GRAVITY,
            water_depth: WaterDepth::Finite(depth),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gravity > 0.0 && self.gravity.is_finite()) {
            return Err(Error::invalid(format!(
                "gravity must be > 0, got {}",
                self.gravity
            )));
        }
        if let WaterDepth::Finite(h) = self.water_depth {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::invalid(format!("water depth must be > 0, got {h}")));
            }
        }
        Ok(())
    }
}

fn check_period(period: f64) -> Result<()> {
    if period > 0.0 && period.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("period must be > 0, got {period}")))
    }
}

/// ω = 2π / T.
pub fn angular_frequency(period: f64) -> f64 {
    2.0 * PI / period
}

/// Deep-water wavelength λ = g·T²/(2π).
pub fn wavelength_deep(period: f64, env: &Environment) -> Result<f64> {
    check_period(period)?;
    env.validate()?;
    Ok(env.gravity * period * period / (2.0 * PI))
}

/// Wavenumber from the linear dispersion relation ω² = g·k·tanh(k·h).
///
/// Deep water returns 2π/λ directly. Finite depth runs Newton's method on the
/// residual, seeded with the deep-water wavenumber and kept inside the bracket
/// `[k_deep, ω²/(g·tanh(k_deep·h))]` by falling back to bisection.
pub fn solve_dispersion(period: f64, env: &Environment) -> Result<f64> {
    let lambda = wavelength_deep(period, env)?;
    let k_deep = 2.0 * PI / lambda;
    let depth = match env.water_depth {
        WaterDepth::Deep => return Ok(k_deep),
        WaterDepth::Finite(h) => h,
    };

    let g = env.gravity;
    let omega2 = angular_frequency(period).powi(2);
    let residual = |k: f64| g * k * (k * depth).tanh() - omega2;

    let mut lo = k_deep;
    let mut hi = omega2 / (g * (k_deep * depth).tanh());
    let mut k = k_deep;
    let mut f = residual(k);

    for _ in 0..MAX_NEWTON_ITERATIONS {
        if (f / omega2).abs() < RESIDUAL_TOL * 1e-3 || hi - lo <= f64::EPSILON * hi {
            break;
        }
        if f < 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        let th = (k * depth).tanh();
        let slope = g * th + g * k * depth * (1.0 - th * th);
        let newton = k - f / slope;
        k = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        f = residual(k);
    }

    let rel = (f / omega2).abs();
    if rel < RESIDUAL_TOL {
        Ok(k)
    } else {
        Err(Error::numerical(format!(
            "dispersion solve did not converge for T = {period} s, h = {depth} m \
             (relative residual {rel:e})"
        )))
    }
}

/// Wavelength 2π/k using the configured depth.
pub fn wavelength(period: f64, env: &Environment) -> Result<f64> {
    Ok(2.0 * PI / solve_dispersion(period, env)?)
}
