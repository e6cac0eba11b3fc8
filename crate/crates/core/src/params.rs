use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Static description of one resonant tank and the port impedance.
///
/// `q0` may be `f64::INFINITY` for a lossless junction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// Tank inductance (H).
    pub l0: f64,
    /// Static tank capacitance (F).
    pub c0: f64,
    /// Unloaded tank quality factor.
    #[serde(with = "maybe_inf")]
    pub q0: f64,
    /// Differential port impedance (ohm).
    pub z0: f64,
}

/// Quantities that follow from [`CircuitParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub omega0: f64,
    /// Parallel tank resistance `Q0 w0 L0` (infinite when lossless).
    #[serde(with = "maybe_inf")]
    pub r0: f64,
    /// Port-loaded quality factor `w0 (3 Z0 / 2) C0`.
    pub qr: f64,
    /// Total loaded Q, `Q0 || Qr`.
    pub ql: f64,
}

impl CircuitParams {
    pub fn new(l0: f64, c0: f64, q0: f64, z0: f64) -> Result<Self> {
        let p = Self { l0, c0, q0, z0 };
        p.validate()?;
        Ok(p)
    }

    /// Builds the parameters from `L0` and a resonance `w0`, with `C0 = 1 / (w0^2 L0)`.
    pub fn from_resonance(l0: f64, omega0: f64, q0: f64, z0: f64) -> Result<Self> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(invalid("omega0", "must be positive and finite"));
        }
        Self::new(l0, 1.0 / (omega0 * omega0 * l0), q0, z0)
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be positive and finite, got {v}")))
            }
        };
        pos("l0", self.l0)?;
        pos("c0", self.c0)?;
        pos("z0", self.z0)?;
        if !(self.q0 > 0.0) {
            return Err(invalid("q0", format!("must be positive or infinite, got {}", self.q0)));
        }
        Ok(())
    }

    pub fn omega0(&self) -> f64 {
        1.0 / (self.l0 * self.c0).sqrt()
    }

    pub fn is_lossless(&self) -> bool {
        self.q0.is_infinite()
    }

    /// Parallel loss resistance of a voltage-mode (parallel LCR) tank.
    pub fn r_parallel(&self) -> f64 {
        self.q0 * self.omega0() * self.l0
    }

    /// Series loss resistance of a current-mode (series LCR) tank, `w0 L0 / Q0`.
    pub fn r_series(&self) -> f64 {
        self.omega0() * self.l0 / self.q0
    }

    /// Characteristic impedance `sqrt(L0 / C0)`.
    pub fn z_char(&self) -> f64 {
        (self.l0 / self.c0).sqrt()
    }

    pub fn with_q0(mut self, q0: f64) -> Self {
        self.q0 = q0;
        self
    }
}

pub fn derive(p: &CircuitParams) -> Result<DerivedParams> {
    p.validate()?;
    let omega0 = p.omega0();
    let r0 = p.r_parallel();
    let qr = omega0 * 1.5 * p.z0 * p.c0;
    let ql = 1.0 / (1.0 / p.q0 + 1.0 / qr);
    Ok(DerivedParams { omega0, r0, qr, ql })
}

/// Sense of the spatial phase progression of the modulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `phi_n = (n-1) * 2pi/3 + theta`; circulates 1 -> 2 -> 3 -> 1.
    #[default]
    Clockwise,
    /// `phi_n = -(n-1) * 2pi/3 + theta`; circulates 1 -> 3 -> 2 -> 1.
    Counterclockwise,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Clockwise => 1.0,
            Direction::Counterclockwise => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Clockwise => Direction::Counterclockwise,
            Direction::Counterclockwise => Direction::Clockwise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationParams {
    /// Modulation angular frequency (rad/s).
    pub omega_m: f64,
    /// Capacitance modulation depth `dC / C0`, in `[0, 1)`.
    pub dc_ratio: f64,
    /// Global modulation phase offset (rad).
    pub theta: f64,
    pub direction: Direction,
}

impl ModulationParams {
    pub fn new(omega_m: f64, dc_ratio: f64) -> Result<Self> {
        let m = Self { omega_m, dc_ratio, theta: 0.0, direction: Direction::Clockwise };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_m > 0.0 && self.omega_m.is_finite()) {
            return Err(invalid("omega_m", format!("must be positive, got {}", self.omega_m)));
        }
        if !(0.0..1.0).contains(&self.dc_ratio) {
            return Err(invalid("dc_ratio", format!("must lie in [0, 1), got {}", self.dc_ratio)));
        }
        if !self.theta.is_finite() {
            return Err(invalid("theta", "must be finite"));
        }
        Ok(())
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn with_dc_ratio(mut self, dc_ratio: f64) -> Self {
        self.dc_ratio = dc_ratio;
        self
    }

    /// Modulation phase of tank `n` (0-based) of a junction.
    pub fn phase(&self, n: usize) -> f64 {
        self.direction.sign() * (n as f64) * 2.0 * std::f64::consts::FRAC_PI_3 + self.theta
    }
}

/// Serializes infinite values as the string `"inf"` since JSON has no infinity.
pub mod maybe_inf {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Num {
            F(f64),
            S(String),
        }
        match Num::deserialize(d)? {
            Num::F(v) => Ok(v),
            Num::S(s) if s.eq_ignore_ascii_case("inf") => Ok(f64::INFINITY),
            Num::S(s) => s.parse().map_err(de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn derive_table_inductor_at_one_ghz() {
        let w0 = 2.0 * PI * 1e9;
        let p = CircuitParams::from_resonance(4.3e-9, w0, 70.0, 50.0).unwrap();
        // 1 / ((2 pi 1e9)^2 * 4.3e-9), evaluated by hand
        assert!((p.c0 - 5.8907e-12).abs() < 1e-15);
        let d = derive(&p).unwrap();
        assert!((d.omega0 - w0).abs() / w0 < 1e-14);
        assert!((d.r0 - 70.0 * w0 * 4.3e-9).abs() < 1e-9);
    }

    #[test]
    fn loaded_q_values() {
        let w0 = 2.0 * PI * 1e9;
        let p = CircuitParams::from_resonance(4.3e-9, w0, 70.0, 50.0).unwrap();
        let d = derive(&p).unwrap();
        // Qr = w0 * 75 * C0 = 75 / (w0 L0) = 2.7759583..., Ql = 1 / (1/70 + 1/Qr)
        assert!((d.qr - 2.775_958_31).abs() < 1e-7, "{}", d.qr);
        assert!((d.ql - 2.670_072_46).abs() < 1e-7, "{}", d.ql);
    }

    #[test]
    fn lossless_ql_equals_qr() {
        let p = CircuitParams::new(2e-9, 10e-12, f64::INFINITY, 50.0).unwrap();
        let d = derive(&p).unwrap();
        assert_eq!(d.ql, d.qr);
        assert!(d.r0.is_infinite());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(CircuitParams::new(0.0, 1e-12, 70.0, 50.0).is_err());
        assert!(CircuitParams::new(1e-9, -1e-12, 70.0, 50.0).is_err());
        assert!(CircuitParams::new(1e-9, 1e-12, 0.0, 50.0).is_err());
        assert!(CircuitParams::new(1e-9, 1e-12, f64::NAN, 50.0).is_err());
        assert!(CircuitParams::new(1e-9, 1e-12, 70.0, 0.0).is_err());
        assert!(ModulationParams::new(1e8, 1.0).is_err());
        assert!(ModulationParams::new(-1.0, 0.5).is_err());
        let bad = CircuitParams { l0: -1.0, c0: 1e-12, q0: 70.0, z0: 50.0 };
        assert!(derive(&bad).is_err());
    }

    #[test]
    fn phases_follow_direction() {
        let m = ModulationParams::new(1e8, 0.5).unwrap().with_theta(0.3);
        assert!((m.phase(1) - (2.0 * PI / 3.0 + 0.3)).abs() < 1e-15);
        let c = m.with_direction(Direction::Counterclockwise);
        assert!((c.phase(2) - (-4.0 * PI / 3.0 + 0.3)).abs() < 1e-15);
    }
}
