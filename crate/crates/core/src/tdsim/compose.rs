//! Harmonic-domain composition of single-ended delta junctions.
//!
//! A delta of parallel tanks with node potentials `V` prescribed as a sum of tones at
//! `omega + k omega_m` draws node currents at the same tones: the tank law
//! `i = d(C v)/dt + g v + i_L` only shifts a tone by one modulation harmonic. This gives
//! a conversion admittance per junction, from which single-ended and differential
//! port responses follow by linear algebra, independently of the differential ODEs.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::spectrum::KMAX;
use super::topology::{StateSpaceModel, Topology};
use crate::error::{Error, Result};

/// Port waves over harmonics `-kmax..=kmax`, relative to the incident wave.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicPorts {
    pub kmax: usize,
    /// `waves[port][k + kmax]`, ports 0-based.
    pub waves: [Vec<Complex64>; 3],
}

impl HarmonicPorts {
    /// Wave at port `port` (1-based) and harmonic `k`; zero outside the solved range.
    pub fn bin(&self, port: usize, k: i64) -> Complex64 {
        let kk = self.kmax as i64;
        if k.abs() > kk {
            Complex64::new(0.0, 0.0)
        } else {
            self.waves[port - 1][(k + kk) as usize]
        }
    }
}

const G: [[f64; 3]; 3] = [[1.0, -1.0, 0.0], [0.0, 1.0, -1.0], [-1.0, 0.0, 1.0]];

fn check_delta(model: &StateSpaceModel) -> Result<()> {
    if model.topology != Topology::SeDelta {
        return Err(Error::Unsupported("conversion admittance is defined for a single-ended delta".into()));
    }
    Ok(())
}

/// Node conversion admittance of a single-ended delta, in units of `sqrt(C0/L0)`.
/// Index `(k + kmax) * 3 + node`; couplings past `kmax` are dropped.
pub fn delta_conversion_admittance(model: &StateSpaceModel, omega: f64, kmax: usize) -> Result<DMatrix<Complex64>> {
    check_delta(model)?;
    let j = 0;
    let nh = 2 * kmax + 1;
    let w = omega / model.omega0;
    let x = model.signs[j] * model.mp.dc_ratio;
    // tank admittance: tank current harmonics from tank voltage harmonics
    let mut a = DMatrix::<Complex64>::zeros(3 * nh, 3 * nh);
    for h in 0..nh {
        let k = h as f64 - kmax as f64;
        let wk = w + k * model.nu;
        if wk.abs() < 1e-12 {
            // the inductors short the junction at dc
            return Err(Error::Unsupported(format!("harmonic {k} falls at dc; lower kmax")));
        }
        let jw = Complex64::new(0.0, wk);
        for n in 0..3 {
            let r = 3 * h + n;
            a[(r, r)] = jw + model.loss + 1.0 / jw;
            let e = Complex64::from_polar(0.5 * x, model.phases[j][n]);
            if h > 0 {
                a[(r, 3 * (h - 1) + n)] = jw * e;
            }
            if h + 1 < nh {
                a[(r, 3 * (h + 1) + n)] = jw * e.conj();
            }
        }
    }
    // node currents -G i from tank voltages -G^T V
    let mut gb = DMatrix::<Complex64>::zeros(3 * nh, 3 * nh);
    for h in 0..nh {
        for r in 0..3 {
            for c in 0..3 {
                gb[(3 * h + r, 3 * h + c)] = Complex64::new(G[r][c], 0.0);
            }
        }
    }
    Ok(&gb * a * gb.transpose())
}

/// Outgoing waves `vs - 2 Z0 i` for a unit source at `port`, from scaled port currents.
fn waves(kmax: usize, port: usize, i_scaled: impl Fn(usize, usize) -> Complex64, zeta: f64) -> HarmonicPorts {
    let nh = 2 * kmax + 1;
    let waves = std::array::from_fn(|p| {
        (0..nh)
            .map(|h| {
                let vs = if p == port - 1 && h == kmax { 1.0 } else { 0.0 };
                Complex64::new(vs, 0.0) - i_scaled(h, p) * (2.0 / zeta)
            })
            .collect()
    });
    HarmonicPorts { kmax, waves }
}

/// Single-ended delta with every port terminated by its source impedance.
pub fn se_delta_ports(model: &StateSpaceModel, omega: f64, kmax: usize) -> Result<HarmonicPorts> {
    check_delta(model)?;
    let nh = 2 * kmax + 1;
    let y = delta_conversion_admittance(model, omega, kmax)?;
    let z = model.zeta;
    let m = y + DMatrix::<Complex64>::identity(3 * nh, 3 * nh) * Complex64::new(z, 0.0);
    let mut rhs = nalgebra::DVector::<Complex64>::zeros(3 * nh);
    rhs[3 * kmax + model.excitation_port - 1] = Complex64::new(z, 0.0);
    let v = m.lu().solve(&rhs).ok_or_else(|| Error::NoConvergence("singular junction system".into()))?;
    let port = model.excitation_port;
    let current = |h: usize, p: usize| {
        let vs = if p == port - 1 && h == kmax { 1.0 } else { 0.0 };
        (Complex64::new(vs, 0.0) - v[3 * h + p]) * z
    };
    Ok(waves(kmax, port, current, z))
}

/// Two single-ended deltas joined by floating differential ports: the source and its
/// impedance at port `k` sit between node `k` of `upper` and node `k` of `lower`.
pub fn compose_differential(upper: &StateSpaceModel, lower: &StateSpaceModel, omega: f64, kmax: usize) -> Result<HarmonicPorts> {
    check_delta(upper)?;
    check_delta(lower)?;
    if upper.zeta != lower.zeta || upper.omega0 != lower.omega0 || upper.mp.omega_m != lower.mp.omega_m {
        return Err(Error::Unsupported("composed junctions must share tanks and modulation frequency".into()));
    }
    let nh = 2 * kmax + 1;
    let b = 3 * nh;
    let z = upper.zeta;
    let yu = delta_conversion_admittance(upper, omega, kmax)?;
    let yl = delta_conversion_admittance(lower, omega, kmax)?;
    let one = Complex64::new(1.0, 0.0);
    // unknowns [U; L; I] with I the scaled port current flowing into the upper node
    let mut m = DMatrix::<Complex64>::zeros(3 * b + nh, 3 * b);
    let mut rhs = nalgebra::DVector::<Complex64>::zeros(3 * b + nh);
    m.view_mut((0, 0), (b, b)).copy_from(&yu);
    m.view_mut((b, b), (b, b)).copy_from(&yl);
    for r in 0..b {
        m[(r, 2 * b + r)] = -one;
        m[(b + r, 2 * b + r)] = one;
        m[(2 * b + r, r)] = one;
        m[(2 * b + r, b + r)] = -one;
        m[(2 * b + r, 2 * b + r)] = Complex64::new(1.0 / z, 0.0);
    }
    rhs[2 * b + 3 * kmax + upper.excitation_port - 1] = one;
    // both junctions float: fix the common potential of each harmonic
    for h in 0..nh {
        for n in 0..3 {
            m[(3 * b + h, 3 * h + n)] = one;
            m[(3 * b + h, b + 3 * h + n)] = one;
        }
    }
    let sol = m.svd(true, true).solve(&rhs, 1e-14).map_err(|e| Error::NoConvergence(e.to_string()))?;
    Ok(waves(kmax, upper.excitation_port, |h, p| sol[2 * b + 3 * h + p], z))
}

/// What the half-circuit picture predicts for the differential circulator: the average
/// of two single-ended circulators whose modulations differ by 180 degrees. Odd
/// harmonics cancel, but the fundamental stays that of the single-ended circuit.
pub fn half_circuit_prediction(a: &HarmonicPorts, b: &HarmonicPorts) -> HarmonicPorts {
    let waves = std::array::from_fn(|p| a.waves[p].iter().zip(&b.waves[p]).map(|(x, y)| (x + y) * 0.5).collect());
    HarmonicPorts { kmax: a.kmax.min(b.kmax), waves }
}

/// Harmonic range used when composing junctions.
pub const COMPOSE_KMAX: usize = 3;

/// Largest `|k| <= KMAX` difference between composed waves and an oracle spectrum.
pub fn max_wave_difference(h: &HarmonicPorts, oracle: &super::spectrum::PortSpectrum) -> f64 {
    let mut d: f64 = 0.0;
    for p in 1..=3 {
        for k in -KMAX..=KMAX {
            d = d.max((h.bin(p, k) - oracle.bin(p, k)).norm());
        }
    }
    d
}
