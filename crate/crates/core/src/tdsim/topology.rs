//! Raw circuit equations of the four junction topologies.
//!
//! States are scaled to volts: capacitor charge as `q / C0` and inductor (or arm)
//! current as `i * sqrt(L0/C0)`; time is scaled as `tau = w0 t`. Per tank `n` of
//! junction `j` the state pair sits at `2 (3 j + n)`.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::analytic::current::elastance_coeffs;
use crate::error::{invalid, Error, Result};
use crate::params::{CircuitParams, ModulationParams};

use super::steady::Monodromy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    /// One delta of parallel tanks, each port referenced to ground.
    SeDelta,
    /// One wye of series tanks, each port referenced to ground.
    SeWye,
    /// Two anti-phase deltas joined by floating differential ports.
    DiffVoltage,
    /// Two anti-phase wyes whose terminals are tied at the ports.
    DiffCurrent,
}

impl Topology {
    pub fn junctions(self) -> usize {
        match self {
            Topology::SeDelta | Topology::SeWye => 1,
            Topology::DiffVoltage | Topology::DiffCurrent => 2,
        }
    }

    pub fn is_delta(self) -> bool {
        matches!(self, Topology::SeDelta | Topology::DiffVoltage)
    }

    pub fn state_dim(self) -> usize {
        6 * self.junctions()
    }

    pub fn all() -> [Topology; 4] {
        [Topology::SeDelta, Topology::SeWye, Topology::DiffVoltage, Topology::DiffCurrent]
    }
}

impl std::str::FromStr for Topology {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "se-delta" => Ok(Topology::SeDelta),
            "se-wye" => Ok(Topology::SeWye),
            "diff-voltage" | "voltage" => Ok(Topology::DiffVoltage),
            "diff-current" | "current" => Ok(Topology::DiffCurrent),
            _ => Err(format!("unknown topology `{s}`")),
        }
    }
}

/// How a series tank's capacitor voltage follows its charge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ElastanceModel {
    /// `v = q / C(t)`.
    #[default]
    Exact,
    /// `v = (sigma + rho cos(.)) q / C0`, the first-harmonic truncation of `1 / C(t)`.
    FirstHarmonic,
}

/// Assembled first-order LPTV system for one topology and one excited port.
#[derive(Debug, Clone)]
pub struct StateSpaceModel {
    pub topology: Topology,
    pub cp: CircuitParams,
    pub mp: ModulationParams,
    /// Excited port, 1-based.
    pub excitation_port: usize,
    pub elastance: ElastanceModel,
    /// Modulation phase of every tank, `[junction][tank]`.
    pub phases: [[f64; 3]; 2],
    /// Sign of the modulation of each junction (`C0 +- dC cos`).
    pub signs: [f64; 2],
    pub(crate) omega0: f64,
    /// `omega_m / omega0`.
    pub(crate) nu: f64,
    /// `1 / Q0` (0 when lossless).
    pub(crate) loss: f64,
    /// `sqrt(L0/C0) / Z0`.
    pub(crate) zeta: f64,
    pub(crate) sigma: f64,
    pub(crate) rho: f64,
    pub(crate) monodromy: Arc<OnceLock<Monodromy>>,
}

/// Port and internal quantities at one instant.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Probe {
    /// Port voltages (V).
    pub v_port: [f64; 3],
    /// Port currents into the junction, times `Z0` (V).
    pub zi_port: [f64; 3],
    /// Tank voltages (delta) or arm currents times `sqrt(L0/C0)` (wye), `[junction][tank]`.
    pub tank: [[f64; 3]; 2],
    /// Capacitor voltages per tank.
    pub vcap: [[f64; 3]; 2],
    /// Inductor currents times `sqrt(L0/C0)` per tank.
    pub icur: [[f64; 3]; 2],
}

pub fn assemble(
    topology: Topology,
    cp: &CircuitParams,
    mp: &ModulationParams,
    excitation_port: usize,
) -> Result<StateSpaceModel> {
    assemble_with(topology, cp, mp, excitation_port, ElastanceModel::Exact)
}

pub fn assemble_with(
    topology: Topology,
    cp: &CircuitParams,
    mp: &ModulationParams,
    excitation_port: usize,
    elastance: ElastanceModel,
) -> Result<StateSpaceModel> {
    cp.validate()?;
    mp.validate()?;
    if !(1..=3).contains(&excitation_port) {
        return Err(invalid("excitation_port", format!("must be 1, 2 or 3, got {excitation_port}")));
    }
    if topology.is_delta() && elastance == ElastanceModel::FirstHarmonic {
        return Err(Error::Unsupported("first-harmonic elastance applies to series (wye) tanks only".into()));
    }
    let (sigma, rho) = elastance_coeffs(mp.dc_ratio)?;
    let omega0 = cp.omega0();
    // A delta tank sits between two ports, so the progression that circulates
    // 1 -> 2 -> 3 runs against the port numbering.
    let hand = if topology.is_delta() { -1.0 } else { 1.0 };
    let mut phases = [[0.0; 3]; 2];
    for row in phases.iter_mut() {
        for (n, p) in row.iter_mut().enumerate() {
            *p = hand * (mp.phase(n) - mp.theta) + mp.theta;
        }
    }
    Ok(StateSpaceModel {
        topology,
        cp: *cp,
        mp: *mp,
        excitation_port,
        elastance,
        phases,
        signs: [1.0, -1.0],
        omega0,
        nu: mp.omega_m / omega0,
        loss: if cp.is_lossless() { 0.0 } else { 1.0 / cp.q0 },
        zeta: cp.z_char() / cp.z0,
        sigma,
        rho,
        monodromy: Arc::new(OnceLock::new()),
    })
}

impl StateSpaceModel {
    pub fn dim(&self) -> usize {
        self.topology.state_dim()
    }

    /// Same circuit driven at another port; the cached monodromy is shared.
    pub fn with_excitation(&self, port: usize) -> Result<Self> {
        if !(1..=3).contains(&port) {
            return Err(invalid("excitation_port", format!("must be 1, 2 or 3, got {port}")));
        }
        let mut m = self.clone();
        m.excitation_port = port;
        Ok(m)
    }

    /// Overrides the modulation phase of junction `j` (used for composition checks).
    pub fn with_junction_phase_offset(&self, j: usize, offset: f64) -> Self {
        let mut m = self.clone();
        for p in m.phases[j].iter_mut() {
            *p += offset;
        }
        m.monodromy = Arc::new(OnceLock::new());
        m
    }

    /// Normalized capacitance `C/C0` and its `tau`-derivative.
    #[inline]
    fn cap(&self, j: usize, n: usize, tau: f64) -> (f64, f64) {
        let a = self.nu * tau + self.phases[j][n];
        let x = self.signs[j] * self.mp.dc_ratio;
        (1.0 + x * a.cos(), -x * self.nu * a.sin())
    }

    /// Capacitor voltage of a series tank from its scaled charge.
    #[inline]
    fn elastance_v(&self, j: usize, n: usize, tau: f64, q: f64) -> f64 {
        match self.elastance {
            ElastanceModel::Exact => q / self.cap(j, n, tau).0,
            ElastanceModel::FirstHarmonic => {
                let a = self.nu * tau + self.phases[j][n];
                (self.sigma + self.signs[j] * self.rho * a.cos()) * q
            }
        }
    }

    /// Right-hand side for source voltages `vs`; fills `probe` if given.
    pub fn eval(&self, tau: f64, x: &[f64], vs: [f64; 3], dx: &mut [f64], probe: Option<&mut Probe>) {
        match self.topology {
            Topology::SeDelta | Topology::DiffVoltage => self.eval_delta(tau, x, vs, dx, probe),
            Topology::SeWye | Topology::DiffCurrent => self.eval_wye(tau, x, vs, dx, probe),
        }
    }

    fn eval_delta(&self, tau: f64, x: &[f64], vs: [f64; 3], dx: &mut [f64], probe: Option<&mut Probe>) {
        let nj = self.topology.junctions();
        let mut v = [[0.0; 3]; 2];
        let mut c = [[0.0; 3]; 2];
        let mut cd = [[0.0; 3]; 2];
        // node potentials with node 1 of each junction as local reference
        let mut vp = [[0.0; 3]; 2];
        for j in 0..nj {
            for n in 0..3 {
                let (cc, ccd) = self.cap(j, n, tau);
                c[j][n] = cc;
                cd[j][n] = ccd;
                v[j][n] = x[2 * (3 * j + n)] / cc;
            }
            vp[j] = [0.0, -v[j][1], v[j][0]];
        }
        let mut vport = [0.0; 3];
        let mut e = [[0.0; 3]; 2];
        if nj == 1 {
            let off = (vs.iter().sum::<f64>() - vp[0].iter().sum::<f64>()) / 3.0;
            for k in 0..3 {
                vport[k] = vp[0][k] + off;
                e[0][k] = self.zeta * (vs[k] - vport[k]);
            }
        } else {
            let d: f64 = (0..3).map(|k| vs[k] - (vp[0][k] - vp[1][k])).sum::<f64>() / 3.0;
            for k in 0..3 {
                vport[k] = vp[0][k] - vp[1][k] + d;
                let is = self.zeta * (vs[k] - vport[k]);
                e[0][k] = is;
                e[1][k] = -is;
            }
        }
        let g = self.loss;
        for j in 0..nj {
            let ip = [0.0, e[j][0], e[j][0] + e[j][1]];
            let mut num = 0.0;
            let mut den = 0.0;
            for n in 0..3 {
                let il = x[2 * (3 * j + n) + 1];
                num += (ip[n] - g * v[j][n] - il - v[j][n] * cd[j][n]) / c[j][n];
                den += 1.0 / c[j][n];
            }
            let loop_i = -num / den;
            for n in 0..3 {
                let s = 2 * (3 * j + n);
                dx[s] = ip[n] + loop_i - g * v[j][n] - x[s + 1];
                dx[s + 1] = v[j][n];
            }
        }
        if let Some(p) = probe {
            p.v_port = vport;
            for k in 0..3 {
                p.zi_port[k] = e[0][k] / self.zeta;
            }
            for j in 0..nj {
                p.tank[j] = v[j];
                p.vcap[j] = v[j];
                for n in 0..3 {
                    p.icur[j][n] = x[2 * (3 * j + n) + 1];
                }
            }
        }
    }

    fn eval_wye(&self, tau: f64, x: &[f64], vs: [f64; 3], dx: &mut [f64], probe: Option<&mut Probe>) {
        let nj = self.topology.junctions();
        let g = self.loss;
        let mut vc = [[0.0; 3]; 2];
        let mut arm = [[0.0; 3]; 2];
        for j in 0..nj {
            for n in 0..3 {
                let s = 2 * (3 * j + n);
                vc[j][n] = self.elastance_v(j, n, tau, x[s]);
                arm[j][n] = x[s + 1];
            }
        }
        let mut vnode = [0.0; 3];
        let mut zi = [0.0; 3];
        for k in 0..3 {
            let total: f64 = (0..nj).map(|j| arm[j][k]).sum();
            zi[k] = total / self.zeta;
            vnode[k] = vs[k] - zi[k];
        }
        for j in 0..nj {
            let center = (0..3).map(|n| vnode[n] - g * arm[j][n] - vc[j][n]).sum::<f64>() / 3.0;
            for n in 0..3 {
                let s = 2 * (3 * j + n);
                dx[s] = arm[j][n];
                dx[s + 1] = vnode[n] - center - g * arm[j][n] - vc[j][n];
            }
        }
        if let Some(p) = probe {
            p.v_port = vnode;
            p.zi_port = zi;
            for j in 0..nj {
                p.tank[j] = arm[j];
                p.vcap[j] = vc[j];
                p.icur[j] = arm[j];
            }
        }
    }

    /// Linear constraints `K x = 0` that every state at `tau = 0` must satisfy:
    /// KVL around each delta loop and the conserved loop current, or KCL at each
    /// wye center and the conserved center charge.
    pub fn constraints(&self) -> Vec<Vec<f64>> {
        let nj = self.topology.junctions();
        let dim = self.dim();
        let mut rows = Vec::new();
        for j in 0..nj {
            let mut a = vec![0.0; dim];
            let mut b = vec![0.0; dim];
            for n in 0..3 {
                let s = 2 * (3 * j + n);
                if self.topology.is_delta() {
                    a[s] = 1.0 / self.cap(j, n, 0.0).0;
                } else {
                    a[s] = 1.0;
                }
                b[s + 1] = 1.0;
            }
            rows.push(a);
            rows.push(b);
        }
        rows
    }

    /// Resistive tank dissipation, in units of `W * sqrt(L0/C0)`.
    pub(crate) fn loss_rate(&self, x: &[f64], tau: f64) -> f64 {
        let nj = self.topology.junctions();
        let mut p = 0.0;
        for j in 0..nj {
            for n in 0..3 {
                let s = 2 * (3 * j + n);
                if self.topology.is_delta() {
                    let v = x[s] / self.cap(j, n, tau).0;
                    p += self.loss * v * v;
                } else {
                    p += self.loss * x[s + 1] * x[s + 1];
                }
            }
        }
        p
    }

    /// Explicit rate of change of the stored capacitor energy, `q^2 e'(t) / 2`, in
    /// the same units; this is the work done by the modulation.
    pub(crate) fn pump_rate(&self, x: &[f64], tau: f64) -> f64 {
        let nj = self.topology.junctions();
        let mut p = 0.0;
        for j in 0..nj {
            for n in 0..3 {
                let q = x[2 * (3 * j + n)];
                // stored energy q^2 e / 2 changes at the explicit rate q^2 e' / 2
                let de = match (self.topology.is_delta(), self.elastance) {
                    (_, ElastanceModel::FirstHarmonic) => {
                        let a = self.nu * tau + self.phases[j][n];
                        -self.signs[j] * self.rho * self.nu * a.sin()
                    }
                    _ => {
                        let (c, cd) = self.cap(j, n, tau);
                        -cd / (c * c)
                    }
                };
                p += 0.5 * q * q * de;
            }
        }
        p
    }
}
