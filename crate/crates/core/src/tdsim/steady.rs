//! Periodic steady state by shooting over one common period.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::ode::{Dopri5, Stats, Tolerance};
use super::topology::{Probe, StateSpaceModel};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyConfig {
    /// Minimum number of samples over the common period.
    pub samples: usize,
    /// Largest allowed denominator when snapping `omega_rf / omega_m`.
    pub max_q: u64,
    /// Largest accepted relative periodicity residual.
    pub residual_max: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Newton refinement passes allowed after the first shot.
    pub refinements: usize,
}

impl Default for SteadyConfig {
    fn default() -> Self {
        Self { samples: 4096, max_q: 64, residual_max: 1e-9, rtol: 1e-12, atol: 1e-14, refinements: 3 }
    }
}

/// Rational approximation `omega_rf ~ (p / q) omega_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Snap {
    pub p: u64,
    pub q: u64,
    pub omega_requested: f64,
    pub omega: f64,
}

impl Snap {
    pub fn shift(&self) -> f64 {
        self.omega - self.omega_requested
    }
}

/// Snaps `omega_rf` to the nearest `p/q * omega_m` with `q <= max_q`, preferring the
/// smallest `q` among equally good candidates.
pub fn snap(omega_rf: f64, omega_m: f64, max_q: u64) -> Result<Snap> {
    if !(omega_rf > 0.0 && omega_m > 0.0) || max_q == 0 {
        return Err(invalid("omega_rf", "frequencies must be positive"));
    }
    let r = omega_rf / omega_m;
    let mut best: Option<(f64, u64, u64)> = None;
    for q in 1..=max_q {
        let p = (r * q as f64).round().max(1.0) as u64;
        let err = (r - p as f64 / q as f64).abs();
        let better = match best {
            None => true,
            Some((e, _, _)) => err < e - 1e-12 * r,
        };
        if better {
            best = Some((err, p, q));
        }
    }
    let (_, p, q) = best.expect("max_q >= 1");
    Ok(Snap { p, q, omega_requested: omega_rf, omega: omega_m * p as f64 / q as f64 })
}

/// One-modulation-period state transition restricted to the constraint manifold.
#[derive(Debug, Clone)]
pub(crate) struct Monodromy {
    /// Orthonormal basis of the manifold (dim x r).
    basis: DMatrix<f64>,
    /// Transition matrix in that basis (r x r).
    m: DMatrix<f64>,
}

/// Sampled periodic steady state.
#[derive(Debug, Clone)]
pub struct Waveforms {
    pub snap: Snap,
    pub amplitude: f64,
    /// Samples over one common period, at `t_i = i T / len`.
    pub probes: Vec<Probe>,
    /// State at `t = 0`.
    pub x0: Vec<f64>,
    /// Common period (s).
    pub period: f64,
    /// `|x(T) - x(0)| / |x(0)|`.
    pub residual: f64,
    pub stats: Stats,
    /// Dissipation and pump work averaged over the period (scaled units).
    pub(crate) mean_loss: f64,
    pub(crate) mean_pump: f64,
}

impl Waveforms {
    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }
}

pub fn steady_state(model: &StateSpaceModel, omega_rf: f64, amplitude: f64) -> Result<Waveforms> {
    steady_state_with(model, omega_rf, amplitude, &SteadyConfig::default())
}

pub fn steady_state_with(
    model: &StateSpaceModel,
    omega_rf: f64,
    amplitude: f64,
    cfg: &SteadyConfig,
) -> Result<Waveforms> {
    if !(amplitude.is_finite() && amplitude != 0.0) {
        return Err(invalid("amplitude", "must be finite and nonzero"));
    }
    let sn = snap(omega_rf, model.mp.omega_m, cfg.max_q)?;
    let tol = Tolerance { rtol: cfg.rtol, atol: cfg.atol * amplitude.abs() };
    let mono = model.monodromy.get_or_init(|| monodromy(model, tol));

    let w = sn.omega / model.omega0;
    let t_mod = 2.0 * std::f64::consts::PI / model.nu;
    let t_common = t_mod * sn.q as f64;
    let port = model.excitation_port - 1;
    let drive = move |tau: f64| {
        let mut vs = [0.0; 3];
        vs[port] = amplitude * (w * tau).cos();
        vs
    };
    let dim = model.dim();
    let h0 = 2.0 * std::f64::consts::PI / w / 64.0;
    let mut stats = Stats::default();

    // particular solution from rest
    let mut xp = vec![0.0; dim];
    {
        let mut ode = Dopri5::new(dim, |t, x: &[f64], d: &mut [f64]| model.eval(t, x, drive(t), d, None), tol, h0);
        ode.integrate(0.0, &mut xp, &[t_common], |_, _| {});
        add(&mut stats, ode.stats);
    }

    let r = mono.basis.ncols();
    let mq = mono.m.pow(sn.q as u32);
    let lhs = DMatrix::<f64>::identity(r, r) - &mq;
    let lu = lhs.lu();
    let solve = |rhs: &DVector<f64>| -> Result<DVector<f64>> {
        lu.solve(rhs).ok_or_else(|| Error::NoConvergence("periodicity matrix is singular".into()))
    };
    let b = &mono.basis;
    let mut c = solve(&(b.transpose() * DVector::from_column_slice(&xp)))?;

    let n = sample_count(cfg.samples, sn);
    let stops: Vec<f64> = (1..=n).map(|i| t_common * i as f64 / n as f64).collect();
    let mut attempt = 0;
    loop {
        let x0: Vec<f64> = (b * &c).iter().copied().collect();
        let mut x = x0.clone();
        let mut probes = Vec::with_capacity(n);
        let mut p0 = Probe::default();
        let mut scratch = vec![0.0; dim];
        model.eval(0.0, &x, drive(0.0), &mut scratch, Some(&mut p0));
        probes.push(p0);
        let (mut loss, mut pump) = (model.loss_rate(&x, 0.0), model.pump_rate(&x, 0.0));
        {
            let mut ode = Dopri5::new(dim, |t, x: &[f64], d: &mut [f64]| model.eval(t, x, drive(t), d, None), tol, h0);
            ode.integrate(0.0, &mut x, &stops, |i, s| {
                if i + 1 < n {
                    let t = stops[i];
                    let mut pr = Probe::default();
                    model.eval(t, s, drive(t), &mut scratch, Some(&mut pr));
                    probes.push(pr);
                    loss += model.loss_rate(s, t);
                    pump += model.pump_rate(s, t);
                }
            });
            add(&mut stats, ode.stats);
        }
        let diff: f64 = x.iter().zip(&x0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = x0.iter().map(|a| a * a).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let residual = diff / norm;
        if residual <= cfg.residual_max {
            return Ok(Waveforms {
                snap: sn,
                amplitude,
                probes,
                x0,
                period: t_common / model.omega0,
                residual,
                stats,
                mean_loss: loss / n as f64,
                mean_pump: pump / n as f64,
            });
        }
        if attempt >= cfg.refinements {
            return Err(Error::Divergence { residual, periods: (attempt + 1) * sn.q as usize });
        }
        attempt += 1;
        let r_vec = DVector::from_iterator(dim, x.iter().zip(&x0).map(|(a, b)| a - b));
        c += solve(&(b.transpose() * r_vec))?;
    }
}

fn add(s: &mut Stats, o: Stats) {
    s.accepted += o.accepted;
    s.rejected += o.rejected;
}

/// Power of two with room for every reported harmonic below Nyquist.
fn sample_count(min: usize, sn: Snap) -> usize {
    let top = (sn.p + 8 * sn.q + 1) as usize;
    let mut n = min.max(16).next_power_of_two();
    while n < 4 * top {
        n *= 2;
    }
    n
}

fn monodromy(model: &StateSpaceModel, tol: Tolerance) -> Monodromy {
    let dim = model.dim();
    let basis = null_space(&model.constraints(), dim);
    let r = basis.ncols();
    let t_mod = 2.0 * std::f64::consts::PI / model.nu;
    let mut y: Vec<f64> = basis.as_slice().to_vec(); // column-major: column k at k*dim
    let batch = |t: f64, x: &[f64], d: &mut [f64]| {
        for k in 0..r {
            model.eval(t, &x[k * dim..(k + 1) * dim], [0.0; 3], &mut d[k * dim..(k + 1) * dim], None);
        }
    };
    let tol = Tolerance { rtol: tol.rtol, atol: tol.rtol * 1e-2 };
    let mut ode = Dopri5::new(dim * r, batch, tol, t_mod / 512.0);
    ode.integrate(0.0, &mut y, &[t_mod], |_, _| {});
    let phi = DMatrix::from_column_slice(dim, r, &y);
    let m = basis.transpose() * phi;
    Monodromy { basis, m }
}

/// Orthonormal basis of `{x : K x = 0}` by Gram-Schmidt.
fn null_space(rows: &[Vec<f64>], dim: usize) -> DMatrix<f64> {
    let mut ortho: Vec<DVector<f64>> = Vec::new();
    let push = |v: DVector<f64>, set: &mut Vec<DVector<f64>>| -> bool {
        let mut v = v;
        for _ in 0..2 {
            for u in set.iter() {
                let d = u.dot(&v);
                v -= u * d;
            }
        }
        let n = v.norm();
        if n > 1e-10 {
            set.push(v / n);
            true
        } else {
            false
        }
    };
    for r in rows {
        push(DVector::from_column_slice(r), &mut ortho);
    }
    let nc = ortho.len();
    for i in 0..dim {
        push(DVector::from_fn(dim, |k, _| if k == i { 1.0 } else { 0.0 }), &mut ortho);
    }
    let cols: Vec<DVector<f64>> = ortho.split_off(nc);
    DMatrix::from_columns(&cols)
}
