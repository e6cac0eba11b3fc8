//! Structural checks on steady-state waveforms.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spectrum::tank_harmonics;
use super::steady::Waveforms;
use super::topology::StateSpaceModel;
use crate::analytic::basis::JunctionBasis;

/// Largest in-phase (zero-sequence) tank quantity relative to the largest tank
/// quantity, per junction: `max |(x1 + x2 + x3) / 3| / max |x_n|`.
pub fn inphase_residual(model: &StateSpaceModel, wf: &Waveforms) -> Vec<f64> {
    (0..model.topology.junctions())
        .map(|j| {
            let mut zero: f64 = 0.0;
            let mut peak: f64 = 0.0;
            for p in &wf.probes {
                let t = p.tank[j];
                zero = zero.max(((t[0] + t[1] + t[2]) / 3.0).abs());
                peak = peak.max(t.iter().fold(0.0, |m: f64, v| m.max(v.abs())));
            }
            zero / peak.max(f64::MIN_POSITIVE)
        })
        .collect()
}

/// Period-averaged power terms, all in units of `W * sqrt(L0/C0)` per volt^2 of drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBalance {
    /// Delivered by the ideal source.
    pub source: f64,
    /// Dissipated in the port terminations (including the source's own).
    pub ports: f64,
    /// Dissipated in the tank resistances.
    pub loss: f64,
    /// Work done on the capacitors by the modulation.
    pub pump: f64,
}

impl PowerBalance {
    /// `|source + pump - ports - loss| / source`.
    pub fn relative_error(&self) -> f64 {
        (self.source + self.pump - self.ports - self.loss).abs() / self.source.abs()
    }

    /// Error of the balance that ignores the pump.
    pub fn relative_error_without_pump(&self) -> f64 {
        (self.source - self.ports - self.loss).abs() / self.source.abs()
    }
}

pub fn power_balance(model: &StateSpaceModel, wf: &Waveforms) -> PowerBalance {
    let n = wf.probes.len();
    let zeta = model.zeta;
    let w = wf.snap.omega / model.omega0;
    let tau_t = wf.period * model.omega0;
    let port = model.excitation_port - 1;
    let (mut source, mut ports) = (0.0, 0.0);
    for (i, p) in wf.probes.iter().enumerate() {
        let tau = tau_t * i as f64 / n as f64;
        let vs = wf.amplitude * (w * tau).cos();
        source += zeta * vs * p.zi_port[port];
        ports += zeta * p.zi_port.iter().map(|z| z * z).sum::<f64>();
    }
    let a2 = wf.amplitude * wf.amplitude;
    PowerBalance {
        source: source / n as f64 / a2,
        ports: ports / n as f64 / a2,
        loss: wf.mean_loss / a2,
        pump: wf.mean_pump / a2,
    }
}

/// Rotating-mode amplitudes `(in-phase, +, -)` of the differential and common tank
/// quantities at harmonic `k`, relative to the drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeAmplitudes {
    pub differential: Vector3<Complex64>,
    pub common: Vector3<Complex64>,
}

/// Projects `(x_u - x_l) / 2` and `(x_u + x_l) / 2` of a differential model on the
/// rotating modes. Tanks are taken in the order that follows the port numbering.
pub fn mode_amplitudes(model: &StateSpaceModel, wf: &Waveforms, k: i64) -> ModeAmplitudes {
    assert_eq!(model.topology.junctions(), 2, "mode projection needs a differential model");
    let b = JunctionBasis::new();
    let (order, sign) = tank_order(model);
    let get = |j: usize| Vector3::from_fn(|n, _| tank_harmonics(wf, j, order[n]).at(k) * sign);
    let (u, l) = (get(0), get(1));
    let half = Complex64::new(0.5, 0.0);
    ModeAmplitudes { differential: b.t_inv * (u - l) * half, common: b.t_inv * (u + l) * half }
}

/// Tank indices and polarity that put the tanks in modulation order with the
/// reference direction of the closed-form models.
fn tank_order(model: &StateSpaceModel) -> ([usize; 3], f64) {
    if model.topology.is_delta() {
        ([2, 1, 0], -1.0)
    } else {
        ([0, 1, 2], 1.0)
    }
}
