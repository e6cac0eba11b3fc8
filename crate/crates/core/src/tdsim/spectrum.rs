//! Exact-period DFT of steady-state waveforms.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::steady::{steady_state_with, Snap, SteadyConfig, Waveforms};
use super::topology::{assemble_with, ElastanceModel, StateSpaceModel, Topology};
use crate::error::Result;
use crate::params::{CircuitParams, ModulationParams};
use crate::sparams::{check_grid, SMatrix, SParameterSet};

/// Harmonic orders reported on each side of the carrier.
pub const KMAX: i64 = 8;

/// Complex bins of one real signal at `omega + k omega_m`, `|k| <= KMAX`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Harmonics {
    /// Phasors indexed by `k + KMAX`.
    pub bins: Vec<Complex64>,
    /// Largest phasor magnitude outside the reported harmonics.
    pub floor: f64,
}

impl Harmonics {
    pub fn at(&self, k: i64) -> Complex64 {
        self.bins[(k + KMAX) as usize]
    }
}

/// Outgoing-wave spectrum at every port, relative to the incident wave.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortSpectrum {
    pub snap: Snap,
    pub omega_m: f64,
    pub excitation_port: usize,
    /// `ports[i].at(k)` is the scattered wave at port `i+1` and `omega + k omega_m`,
    /// divided by the incident wave.
    pub ports: [Harmonics; 3],
    /// Numeric floor (dBc): the largest bin that is not a reported harmonic.
    pub floor_dbc: f64,
    /// Relative periodicity residual of the underlying steady state.
    pub residual: f64,
}

impl PortSpectrum {
    pub fn bin(&self, port: usize, k: i64) -> Complex64 {
        self.ports[port - 1].at(k)
    }

    pub fn dbc(&self, port: usize, k: i64) -> f64 {
        20.0 * self.bin(port, k).norm().log10()
    }

    pub fn frequency(&self, k: i64) -> f64 {
        self.snap.omega + k as f64 * self.omega_m
    }

    /// True when `omega + k omega_m = -omega`: a real signal cannot tell that bin from
    /// the carrier.
    pub fn is_carrier_image(&self, k: i64) -> bool {
        let (p, q) = (self.snap.p as i64, self.snap.q as i64);
        p + k * q == -p
    }

    /// Largest `k != 0` bin over all ports (dBc), carrier images excluded.
    pub fn max_im_dbc(&self) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for p in 1..=3 {
            for k in -KMAX..=KMAX {
                if k != 0 && !self.is_carrier_image(k) {
                    m = m.max(self.dbc(p, k));
                }
            }
        }
        m
    }
}

/// Phasors (`x(t) = Re(X e^{jwt})`) at `omega + k omega_m` of a signal sampled over one
/// common period of `q` modulation periods.
pub fn harmonics(signal: &[f64], sn: &Snap) -> Harmonics {
    let n = signal.len();
    let mut buf: Vec<Complex64> = signal.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 2.0 / n as f64;
    let (p, q) = (sn.p as i64, sn.q as i64);
    let idx = |k: i64| -> usize { (p + k * q).rem_euclid(n as i64) as usize };
    let bins: Vec<Complex64> = (-KMAX..=KMAX).map(|k| buf[idx(k)] * scale).collect();
    let mut used = vec![false; n / 2 + 1];
    for k in -KMAX..=KMAX {
        let m = (p + k * q).unsigned_abs() as usize;
        if m <= n / 2 {
            used[m] = true;
        }
    }
    let floor = (0..=n / 2).filter(|&m| !used[m]).map(|m| buf[m].norm() * scale).fold(0.0, f64::max);
    Harmonics { bins, floor }
}

pub fn port_spectrum(model: &StateSpaceModel, omega_rf: f64, amplitude: f64) -> Result<PortSpectrum> {
    port_spectrum_with(model, omega_rf, amplitude, &SteadyConfig::default())
}

pub fn port_spectrum_with(
    model: &StateSpaceModel,
    omega_rf: f64,
    amplitude: f64,
    cfg: &SteadyConfig,
) -> Result<PortSpectrum> {
    let wf = steady_state_with(model, omega_rf, amplitude, cfg)?;
    Ok(spectrum_of(model, &wf))
}

pub fn spectrum_of(model: &StateSpaceModel, wf: &Waveforms) -> PortSpectrum {
    let a = wf.amplitude;
    let ports: [Harmonics; 3] = std::array::from_fn(|i| {
        let b: Vec<f64> = wf.probes.iter().map(|p| (p.v_port[i] - p.zi_port[i]) / a).collect();
        harmonics(&b, &wf.snap)
    });
    let floor = ports.iter().map(|h| h.floor).fold(0.0, f64::max);
    PortSpectrum {
        snap: wf.snap,
        omega_m: model.mp.omega_m,
        excitation_port: model.excitation_port,
        floor_dbc: 20.0 * floor.max(1e-300).log10(),
        ports,
        residual: wf.residual,
    }
}

/// Harmonics of the tank quantity (`Probe::tank`) of junction `j`, tank `n`, over `A`.
pub fn tank_harmonics(wf: &Waveforms, j: usize, n: usize) -> Harmonics {
    let s: Vec<f64> = wf.probes.iter().map(|p| p.tank[j][n] / wf.amplitude).collect();
    harmonics(&s, &wf.snap)
}

/// Summary of a time-domain S-parameter sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TdReport {
    pub runs: usize,
    pub max_residual: f64,
    pub max_snap_shift: f64,
    /// Largest `k != 0` port bin seen (dBc).
    pub max_im_dbc: f64,
    pub max_floor_dbc: f64,
}

/// S-parameters from three independent runs (one per excited port) per frequency.
pub fn sparams_td(
    topology: Topology,
    elastance: ElastanceModel,
    cp: &CircuitParams,
    mp: &ModulationParams,
    grid: &[f64],
    cfg: &SteadyConfig,
) -> Result<(SParameterSet, TdReport)> {
    check_grid(grid)?;
    let base = assemble_with(topology, cp, mp, 1, elastance)?;
    let run = |w: f64| -> Result<(f64, SMatrix, TdReport)> {
        let mut s = SMatrix::zeros();
        let mut rep = TdReport { max_im_dbc: f64::NEG_INFINITY, max_floor_dbc: f64::NEG_INFINITY, ..Default::default() };
        let mut omega = w;
        for j in 1..=3 {
            let m = base.with_excitation(j)?;
            let sp = port_spectrum_with(&m, w, 1.0, cfg)?;
            for i in 1..=3 {
                s[(i - 1, j - 1)] = sp.bin(i, 0);
            }
            omega = sp.snap.omega;
            rep.runs += 1;
            rep.max_residual = rep.max_residual.max(sp.residual);
            rep.max_snap_shift = rep.max_snap_shift.max(sp.snap.shift().abs());
            rep.max_im_dbc = rep.max_im_dbc.max(sp.max_im_dbc());
            rep.max_floor_dbc = rep.max_floor_dbc.max(sp.floor_dbc);
        }
        Ok((omega, s, rep))
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<Result<_>> = {
        use rayon::prelude::*;
        grid.par_iter().map(|&w| run(w)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Result<_>> = grid.iter().map(|&w| run(w)).collect();

    let mut omegas = Vec::with_capacity(grid.len());
    let mut mats = Vec::with_capacity(grid.len());
    let mut rep = TdReport { max_im_dbc: f64::NEG_INFINITY, max_floor_dbc: f64::NEG_INFINITY, ..Default::default() };
    for row in rows {
        let (w, s, r) = row?;
        omegas.push(w);
        mats.push(s);
        rep.runs += r.runs;
        rep.max_residual = rep.max_residual.max(r.max_residual);
        rep.max_snap_shift = rep.max_snap_shift.max(r.max_snap_shift);
        rep.max_im_dbc = rep.max_im_dbc.max(r.max_im_dbc);
        rep.max_floor_dbc = rep.max_floor_dbc.max(r.max_floor_dbc);
    }
    Ok((SParameterSet::new(omegas, mats)?, rep))
}
