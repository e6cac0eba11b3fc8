use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{CircuitParams, ModulationParams};
use crate::sparams::{check_grid, circulant, SParameterSet};

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Rotating-mode amplitudes of the voltage-mode junction pair, normalized to `Vs1`.
///
/// `vd_*` are the differential tank-voltage modes at `omega`; `vc_minus_up` is the
/// common `-` mode at `omega + s*omega_m` and `vc_plus_down` the common `+` mode at
/// `omega - s*omega_m`, where `s` is the direction sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeResponseVM {
    pub omega: f64,
    pub vd_plus: Complex64,
    pub vd_minus: Complex64,
    pub vc_minus_up: Complex64,
    pub vc_plus_down: Complex64,
}

pub fn vm_modes(omega: f64, cp: &CircuitParams, mp: &ModulationParams) -> Result<ModeResponseVM> {
    cp.validate()?;
    mp.validate()?;
    let (c0, z0) = (cp.c0, cp.z0);
    let w02 = 1.0 / (cp.l0 * c0);
    let g_tank = 1.0 / (cp.r_parallel() * c0);
    let a = 2.0 / (3.0 * z0 * c0) + g_tank;
    let x = mp.dc_ratio;
    let wm = mp.direction.sign() * mp.omega_m;
    let w = Complex64::new(omega, 0.0);
    let sq3 = 3f64.sqrt();

    let mut vd = [Complex64::default(); 2];
    let mut vc = [Complex64::default(); 2];
    for (i, s) in [1.0, -1.0].into_iter().enumerate() {
        let big = omega + s * wm;
        let b = Complex64::new(big * big - w02, -g_tank * big);
        let d = -(0.5 * x * omega * big).powi(2) + Complex64::new(omega * omega - w02, -a * omega) * b;
        if d.norm() == 0.0 || !d.is_finite() {
            return Err(Error::Pole { omega });
        }
        vd[i] = J * w * Complex64::from_polar(1.0, s * std::f64::consts::FRAC_PI_6) * b / (3.0 * sq3 * z0 * c0 * d);
        vc[i] = -J * Complex64::new(1.0, s / sq3) * x * omega * big * big / (12.0 * z0 * c0 * d);
    }
    Ok(ModeResponseVM { omega, vd_plus: vd[0], vd_minus: vd[1], vc_minus_up: vc[0], vc_plus_down: vc[1] })
}

impl ModeResponseVM {
    /// First S-matrix column `(S11, S21, S31)`.
    pub fn column(&self) -> [Complex64; 3] {
        let sum = self.vd_plus + self.vd_minus;
        let dif = self.vd_plus - self.vd_minus;
        let k = J * (2.0 / 3f64.sqrt());
        [-1.0 / 3.0 - 2.0 * sum + k * dif, 2.0 / 3.0 + 2.0 * sum + k * dif, 2.0 / 3.0 - 2.0 * k * dif]
    }
}

pub fn vm_column(omega: f64, cp: &CircuitParams, mp: &ModulationParams) -> Result<[Complex64; 3]> {
    Ok(vm_modes(omega, cp, mp)?.column())
}

pub fn vm_sparams(grid: &[f64], cp: &CircuitParams, mp: &ModulationParams) -> Result<SParameterSet> {
    check_grid(grid)?;
    let s = grid.iter().map(|&w| vm_column(w, cp, mp).map(circulant)).collect::<Result<Vec<_>>>()?;
    SParameterSet::new(grid.to_vec(), s)
}
