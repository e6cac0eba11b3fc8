use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::params::{CircuitParams, ModulationParams};
use crate::sparams::{check_grid, circulant, SParameterSet};

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Rotating-mode arm currents of the current-mode junction pair, normalized to `Vs1` (S).
///
/// `ic_*` are the common modes at `omega`; `id_minus_up` is the differential `-` mode
/// at `omega + s*omega_m`, `id_plus_down` the differential `+` mode at `omega - s*omega_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeResponseCM {
    pub omega: f64,
    pub ic_plus: Complex64,
    pub ic_minus: Complex64,
    pub id_minus_up: Complex64,
    pub id_plus_down: Complex64,
    pub sigma: f64,
    pub rho: f64,
}

/// First-harmonic expansion of the normalized elastance `C0 / C(t) ~ sigma + rho cos(.)`
/// for `C(t) = C0 (1 + x cos(.))`.
pub fn elastance_coeffs(x: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&x) {
        return Err(invalid("dc_ratio", format!("elastance expansion needs dc_ratio < 1, got {x}")));
    }
    let root = (1.0 - x * x).sqrt();
    let sigma = 1.0 / root;
    // (2/x)(1 - sigma), rewritten without the cancellation near x = 0
    let rho = -2.0 * x / (root * (1.0 + root));
    Ok((sigma, rho))
}

pub fn cm_modes(omega: f64, cp: &CircuitParams, mp: &ModulationParams) -> Result<ModeResponseCM> {
    cp.validate()?;
    mp.validate()?;
    let (sigma, rho) = elastance_coeffs(mp.dc_ratio)?;
    let (l0, z0) = (cp.l0, cp.z0);
    let w02 = 1.0 / (l0 * cp.c0);
    let r = if cp.is_lossless() { 0.0 } else { cp.r_series() };
    let wm = mp.direction.sign() * mp.omega_m;

    let mut ic = [Complex64::default(); 2];
    let mut id = [Complex64::default(); 2];
    for (i, s) in [1.0, -1.0].into_iter().enumerate() {
        let big = omega + s * wm;
        let b = Complex64::new(big * big - sigma * w02, -(r / l0) * big);
        let d = (0.5 * rho * w02).powi(2) + Complex64::new(sigma * w02 - omega * omega, (r + 2.0 * z0) / l0 * omega) * b;
        if d.norm() == 0.0 || !d.is_finite() {
            return Err(Error::Pole { omega });
        }
        ic[i] = J * omega * b / (3.0 * l0 * d);
        id[i] = rho / (6.0 * l0 * l0 * cp.c0) * J * big / d;
    }
    Ok(ModeResponseCM {
        omega,
        ic_plus: ic[0],
        ic_minus: ic[1],
        id_minus_up: id[0],
        id_plus_down: id[1],
        sigma,
        rho,
    })
}

impl ModeResponseCM {
    /// First S-matrix column, for a port impedance `z0`.
    pub fn column(&self, z0: f64) -> [Complex64; 3] {
        let sum = self.ic_plus + self.ic_minus;
        let dif = J * 3f64.sqrt() * (self.ic_plus - self.ic_minus);
        [1.0 - 4.0 * z0 * sum, 2.0 * z0 * (sum - dif), 2.0 * z0 * (sum + dif)]
    }
}

pub fn cm_column(omega: f64, cp: &CircuitParams, mp: &ModulationParams) -> Result<[Complex64; 3]> {
    Ok(cm_modes(omega, cp, mp)?.column(cp.z0))
}

pub fn cm_sparams(grid: &[f64], cp: &CircuitParams, mp: &ModulationParams) -> Result<SParameterSet> {
    check_grid(grid)?;
    let s = grid.iter().map(|&w| cm_column(w, cp, mp).map(circulant)).collect::<Result<Vec<_>>>()?;
    SParameterSet::new(grid.to_vec(), s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Direction;
    use crate::sparams::linspace;
    use std::f64::consts::PI;

    fn cp() -> CircuitParams {
        CircuitParams::from_resonance(2.24e-9, 2.0 * PI * 0.99215e9, 70.0, 50.0).unwrap()
    }

    fn mp(x: f64) -> ModulationParams {
        ModulationParams::new(2.0 * PI * 1e8, x).unwrap()
    }

    #[test]
    fn sigma_rho_at_half() {
        let (s, r) = elastance_coeffs(0.5).unwrap();
        assert!((s - 1.154_700_538_379_251_5).abs() < 1e-15);
        assert!((r - 4.0 * (1.0 - s)).abs() < 1e-14);
        assert!((r + 0.618_802_153_517_006).abs() < 1e-12);
    }

    #[test]
    fn sigma_rho_match_numeric_fourier_series() {
        // mean and first cosine coefficient of 1 / (1 + x cos t) by trapezoid rule
        for &x in &[0.1, 0.3, 0.5, 0.8] {
            let n = 4096;
            let (mut a0, mut a1) = (0.0, 0.0);
            for k in 0..n {
                let t = 2.0 * PI * k as f64 / n as f64;
                let e = 1.0 / (1.0 + x * t.cos());
                a0 += e / n as f64;
                a1 += 2.0 * e * t.cos() / n as f64;
            }
            let (s, r) = elastance_coeffs(x).unwrap();
            assert!((s - a0).abs() < 1e-12 && (r - a1).abs() < 1e-12, "{x}");
        }
    }

    #[test]
    fn small_depth_limit() {
        let (s, r) = elastance_coeffs(1e-9).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
        assert!((r + 1e-9).abs() < 1e-20);
        let m = cm_modes(2.0 * PI * 1e9, &cp(), &mp(0.0)).unwrap();
        assert_eq!(m.rho, 0.0);
        assert_eq!(m.id_minus_up, Complex64::default());
        assert!(elastance_coeffs(1.0).is_err());
    }

    #[test]
    fn harmonic_balance_reference_values() {
        // frozen from an independent 17-harmonic nodal solve with first-harmonic elastance
        let cases = [
            (1.0e9, [(-2.85464960059338857e-1, -9.97555653039942231e-2), (7.52818091260818778e-1, 8.67563924498917921e-2), (5.32646868798520745e-1, 1.29991728541030468e-2)]),
            (0.93e9, [(-2.96822684041553986e-1, 7.74085932977520291e-2), (5.70128848903042162e-1, -1.04397966574189451e-2), (7.26693835138511712e-1, -6.69687966403333806e-2)]),
        ];
        for (f, want) in cases {
            let c = cm_column(2.0 * PI * f, &cp(), &mp(0.5)).unwrap();
            for (got, (re, im)) in c.iter().zip(want) {
                assert!((got - Complex64::new(re, im)).norm() < 1e-12, "{f}: {got} vs {re} {im}");
            }
        }
    }

    #[test]
    fn unmodulated_is_reciprocal() {
        let grid = linspace(2.0 * PI * 0.8e9, 2.0 * PI * 1.2e9, 41);
        let s = cm_sparams(&grid, &cp(), &mp(0.0)).unwrap();
        assert!(s.asymmetry() < 1e-12);
    }

    #[test]
    fn lossless_unit_columns_and_reversal() {
        let grid = linspace(2.0 * PI * 0.8e9, 2.0 * PI * 1.2e9, 41);
        let p = cp().with_q0(f64::INFINITY);
        let s = cm_sparams(&grid, &p, &mp(0.4)).unwrap();
        assert!(s.unitarity_error() < 1e-12);
        let r = cm_sparams(&grid, &p, &mp(0.4).with_direction(Direction::Counterclockwise)).unwrap();
        assert!(s.transpose().max_abs_diff(&r) < 1e-12);
    }
}
