//! Modulation-parameter design: isolation solver, resonance tuning and design charts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{cm_column, vm_column, Family};
use crate::error::{invalid, Error, Result};
use crate::metrics::{metrics_at, MetricSet, Thresholds};
use crate::params::{derive, CircuitParams, ModulationParams};
use crate::sparams::linspace;

/// Inductance of the reference tanks (H).
pub const REFERENCE_L0: f64 = 2.24e-9;
pub const REFERENCE_Q0: f64 = 70.0;
pub const REFERENCE_Z0: f64 = 50.0;
pub const REFERENCE_FRF: f64 = 1e9;
pub const REFERENCE_FM: f64 = 1e8;
pub const REFERENCE_DC: f64 = 0.5;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Modulation parameters that isolate port 3 at `omega_rf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    pub family: Family,
    pub omega_m: f64,
    pub dc_ratio: f64,
    pub omega_rf: f64,
    pub omega0: f64,
    /// Closed-form root before refinement (voltage family; equals the final point
    /// when no refinement was needed).
    pub seed_omega_m: f64,
    pub seed_dc_ratio: f64,
    /// Relative residual of the isolation condition on `omega_m` at the seed.
    pub residual_omega_m: f64,
    /// Relative disagreement of the two sign branches for `(dC / 2C0)^2` at the seed.
    pub residual_dc: f64,
    /// `|S31(omega_rf)|` of the analytic model at the returned point.
    pub s31: f64,
}

impl DesignPoint {
    pub fn modulation(&self) -> Result<ModulationParams> {
        ModulationParams::new(self.omega_m, self.dc_ratio)
    }

    pub fn ix_db(&self) -> f64 {
        -20.0 * self.s31.log10()
    }
}

/// Residual of the `omega_m` isolation condition in polynomial form (no poles),
/// scaled by `omega_rf^8`.
fn isolation_poly(w: f64, wm: f64, w0: f64, ql: f64) -> f64 {
    let k = 3f64.sqrt() * w0 / ql;
    let (up, dn) = (w + wm, w - wm);
    let ap = w * w + k * w - w0 * w0;
    let am = w * w - k * w - w0 * w0;
    ((up * up - w0 * w0) * ap * dn * dn - (dn * dn - w0 * w0) * am * up * up) / w.powi(8)
}

/// `(dC / 2C0)^2` from the `+` (`sign = 1`) or `-` branch.
pub fn half_depth_squared(w: f64, wm: f64, w0: f64, ql: f64, sign: f64) -> f64 {
    let k = 3f64.sqrt() * w0 / ql;
    let s = w + sign * wm;
    (s * s - w0 * w0) * (w * w + sign * k * w - w0 * w0) / (w * w * s * s)
}

/// Loaded quality factor `Q0 || Qr`.
fn loaded_q(cp: &CircuitParams) -> Result<f64> {
    Ok(derive(cp)?.ql)
}

/// Closed-form isolation root: smallest `omega_m` in `(0, omega_rf)` where the
/// condition changes sign and both depth branches agree on a depth in `(0, 1)`.
pub fn isolation_seed(omega_rf: f64, cp: &CircuitParams) -> Result<(f64, f64, f64, f64)> {
    cp.validate()?;
    if !(omega_rf > 0.0 && omega_rf.is_finite()) {
        return Err(invalid("omega_rf", "must be positive"));
    }
    let w0 = cp.omega0();
    let ql = loaded_q(cp)?;
    let f = |m: f64| isolation_poly(omega_rf, m, w0, ql);
    let n = 20_000;
    let mut prev_m = omega_rf * 1e-6;
    let mut prev = f(prev_m);
    let mut inconsistent = None;
    for i in 1..n {
        let m = omega_rf * i as f64 / n as f64;
        let cur = f(m);
        if prev == 0.0 || prev.signum() != cur.signum() {
            let root = bisect(&f, prev_m, m);
            let hp = half_depth_squared(omega_rf, root, w0, ql, 1.0);
            let hm = half_depth_squared(omega_rf, root, w0, ql, -1.0);
            let x = 2.0 * hp.max(0.0).sqrt();
            if hp > 0.0 && hm > 0.0 && x < 1.0 {
                let res_m = (f(root)).abs();
                let res_dc = (hp - hm).abs() / hp.abs().max(hm.abs());
                return Ok((root, x, res_m, res_dc));
            }
            inconsistent.get_or_insert(root);
        }
        prev_m = m;
        prev = cur;
    }
    match inconsistent {
        Some(omega_m) => Err(Error::InconsistentRoot { omega_m }),
        None => Err(Error::NoIsolationPoint),
    }
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    while (b - a) > 1e-12 * b {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn s31(family: Family, omega_rf: f64, cp: &CircuitParams, wm: f64, x: f64) -> Result<Complex64> {
    let mp = ModulationParams::new(wm, x)?;
    let col = match family {
        Family::Voltage => vm_column(omega_rf, cp, &mp)?,
        Family::Current => cm_column(omega_rf, cp, &mp)?,
    };
    Ok(col[2])
}

/// Drives `S31(omega_rf)` of the analytic model to zero by Newton iteration on
/// `(omega_m / omega_rf, dc_ratio)`.
fn polish(family: Family, omega_rf: f64, cp: &CircuitParams, wm: f64, x: f64) -> Result<(f64, f64, f64)> {
    let mut u = [wm / omega_rf, x];
    let eval = |u: [f64; 2]| s31(family, omega_rf, cp, u[0] * omega_rf, u[1]);
    let mut s = eval(u)?;
    for _ in 0..50 {
        if s.norm() < 1e-13 {
            break;
        }
        let h = 1e-7;
        let d0 = (eval([u[0] + h, u[1]])? - eval([u[0] - h, u[1]])?) / (2.0 * h);
        let d1 = (eval([u[0], u[1] + h])? - eval([u[0], u[1] - h])?) / (2.0 * h);
        // [d0.re d1.re; d0.im d1.im] du = -[s.re; s.im]
        let det = d0.re * d1.im - d1.re * d0.im;
        if det == 0.0 || !det.is_finite() {
            return Err(Error::NoConvergence("singular isolation Jacobian".into()));
        }
        let du0 = (-s.re * d1.im + s.im * d1.re) / det;
        let du1 = (-s.im * d0.re + s.re * d0.im) / det;
        // damped step that stays inside the valid region
        let mut t = 1.0;
        loop {
            let cand = [u[0] + t * du0, u[1] + t * du1];
            if cand[0] > 0.0 && cand[0] < 1.0 && cand[1] > 0.0 && cand[1] < 1.0 {
                let sc = eval(cand)?;
                if sc.norm() < s.norm() || t < 1e-3 {
                    u = cand;
                    s = sc;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-6 {
                return Err(Error::NoConvergence("isolation refinement left the valid region".into()));
            }
        }
    }
    Ok((u[0] * omega_rf, u[1], s.norm()))
}

/// Isolation design of the voltage-mode circulator. The closed-form root is exact
/// without tank loss; with loss it is refined on the full analytic model.
pub fn solve_isolation(omega_rf: f64, cp: &CircuitParams) -> Result<DesignPoint> {
    let (wm, x, res_m, res_dc) = isolation_seed(omega_rf, cp)?;
    let (omega_m, dc_ratio, s) = polish(Family::Voltage, omega_rf, cp, wm, x)?;
    Ok(DesignPoint {
        family: Family::Voltage,
        omega_m,
        dc_ratio,
        omega_rf,
        omega0: cp.omega0(),
        seed_omega_m: wm,
        seed_dc_ratio: x,
        residual_omega_m: res_m,
        residual_dc: res_dc,
        s31: s,
    })
}

/// Isolation design of the current-mode circulator: coarse scan of `|S31|` then the
/// same refinement.
pub fn solve_isolation_current(omega_rf: f64, cp: &CircuitParams) -> Result<DesignPoint> {
    cp.validate()?;
    let mut best: Option<(f64, f64, f64)> = None;
    for r in linspace(0.01, 0.5, 99) {
        for x in linspace(0.01, 0.95, 95) {
            let v = s31(Family::Current, omega_rf, cp, r * omega_rf, x)?.norm();
            if best.is_none_or(|b| v < b.2) {
                best = Some((r * omega_rf, x, v));
            }
        }
    }
    let (wm, x, _) = best.expect("non-empty scan");
    let (omega_m, dc_ratio, s) = polish(Family::Current, omega_rf, cp, wm, x)?;
    Ok(DesignPoint {
        family: Family::Current,
        omega_m,
        dc_ratio,
        omega_rf,
        omega0: cp.omega0(),
        seed_omega_m: wm,
        seed_dc_ratio: x,
        residual_omega_m: f64::NAN,
        residual_dc: f64::NAN,
        s31: s,
    })
}

/// Resonance that maximizes isolation at `omega_rf` for a fixed inductance and
/// modulation: bracketing scan over `[0.8, 1.2] omega_rf`, then golden section.
/// `modulation` maps a trial `omega0` to the modulation to evaluate.
pub fn tune_omega0(
    family: Family,
    omega_rf: f64,
    l0: f64,
    q0: f64,
    z0: f64,
    modulation: impl Fn(f64) -> Result<ModulationParams>,
) -> Result<f64> {
    let cost = |w0: f64| -> Result<f64> {
        let cp = CircuitParams::from_resonance(l0, w0, q0, z0)?;
        let mp = modulation(w0)?;
        Ok(family.column(omega_rf, &cp, &mp)?[2].norm())
    };
    let (lo, hi) = (0.8 * omega_rf, 1.2 * omega_rf);
    let n = 200;
    let pts = linspace(lo, hi, n + 1);
    let mut best = (0, f64::INFINITY);
    for (i, &w) in pts.iter().enumerate() {
        let c = cost(w)?;
        if c < best.1 {
            best = (i, c);
        }
    }
    let mut a = pts[best.0.saturating_sub(1)];
    let mut b = pts[(best.0 + 1).min(n)];
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (cost(c)?, cost(d)?);
    while (b - a) > 1e-13 * omega_rf {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = cost(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = cost(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// The canonical voltage-mode configuration: 1 GHz carrier, 100 MHz modulation at
/// half depth, `Q0 = 70`, 50 ohm ports, resonance tuned for isolation.
pub fn reference_design() -> Result<(CircuitParams, ModulationParams)> {
    let w = TWO_PI * REFERENCE_FRF;
    let mp = ModulationParams::new(TWO_PI * REFERENCE_FM, REFERENCE_DC)?;
    let w0 = tune_omega0(Family::Voltage, w, REFERENCE_L0, REFERENCE_Q0, REFERENCE_Z0, |_| Ok(mp))?;
    Ok((CircuitParams::from_resonance(REFERENCE_L0, w0, REFERENCE_Q0, REFERENCE_Z0)?, mp))
}

/// Current-mode counterpart of the reference design: series tanks with the dual
/// inductance `Z0^2 C0` of the reference parallel tanks, resonance tuned by the same
/// rule at the reference modulation, then modulated at their own isolation point.
pub fn reference_current_design() -> Result<(CircuitParams, DesignPoint)> {
    let (vm, mp) = reference_design()?;
    let w = reference_omega_rf();
    let l0 = vm.z0 * vm.z0 * vm.c0;
    let w0 = tune_omega0(Family::Current, w, l0, vm.q0, vm.z0, |_| Ok(mp))?;
    let cp = CircuitParams::from_resonance(l0, w0, vm.q0, vm.z0)?;
    let d = solve_isolation_current(w, &cp)?;
    Ok((cp, d))
}

/// Single-ended delta circulator tuned for lowest insertion loss at `omega_rf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleEndedDesign {
    pub cp: CircuitParams,
    pub mp: ModulationParams,
    /// `|S21(omega_rf)|` of the tuned design.
    pub s21: f64,
}

/// Scans the resonance over `[0.9, 1.4] omega_rf` and the depth over `(0, 0.95]` at a
/// fixed modulation frequency, minimizing single-ended insertion loss at `omega_rf`;
/// a second scan refines around the best cell. Tanks keep `l0`, `q0` and `z0`.
pub fn single_ended_il_design(omega_rf: f64, omega_m: f64, l0: f64, q0: f64, z0: f64) -> Result<SingleEndedDesign> {
    use crate::tdsim::{assemble, se_delta_ports, Topology};
    let eval = |w0: f64, x: f64| -> Result<f64> {
        let cp = CircuitParams::from_resonance(l0, w0, q0, z0)?;
        let mp = ModulationParams::new(omega_m, x)?;
        let m = assemble(Topology::SeDelta, &cp, &mp, 1)?;
        Ok(se_delta_ports(&m, omega_rf, 2)?.bin(2, 0).norm())
    };
    let scan = |w: (f64, f64), x: (f64, f64), n: usize| -> Result<(f64, f64, f64)> {
        let mut best = (0.0, 0.0, -1.0);
        for w0 in linspace(w.0, w.1, n) {
            for xv in linspace(x.0, x.1, n) {
                let s = eval(w0, xv)?;
                if s > best.2 {
                    best = (w0, xv, s);
                }
            }
        }
        Ok(best)
    };
    let (w0, x, _) = scan((0.9 * omega_rf, 1.4 * omega_rf), (0.01, 0.95), 96)?;
    let (dw, dx) = (0.5 * omega_rf / 95.0, 0.94 / 95.0);
    let (w0, x, s21) = scan((w0 - dw, w0 + dw), ((x - dx).max(1e-3), (x + dx).min(0.95)), 41)?;
    Ok(SingleEndedDesign {
        cp: CircuitParams::from_resonance(l0, w0, q0, z0)?,
        mp: ModulationParams::new(omega_m, x)?,
        s21,
    })
}

/// Carrier of the reference design (rad/s).
pub fn reference_omega_rf() -> f64 {
    TWO_PI * REFERENCE_FRF
}

/// Whether chart cells share one resonance or retune it per cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartMode {
    /// `omega0` of the given circuit for every cell.
    #[default]
    Fixed,
    /// `omega0` re-tuned per cell for isolation, `omega_m = ratio * omega0`.
    Retune,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub fm_over_f0: (f64, f64),
    pub n_fm: usize,
    pub dc_ratio: (f64, f64),
    pub n_dc: usize,
    /// Frequency points of the local grid around `omega_rf`.
    pub points: usize,
    /// Half-width of the local grid relative to `omega_rf`.
    pub span: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { fm_over_f0: (0.005, 0.3), n_fm: 60, dc_ratio: (0.015, 0.9), n_dc: 60, points: 401, span: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricRequest {
    pub family: Family,
    pub thresholds: Thresholds,
    pub mode: ChartMode,
}

impl Default for MetricRequest {
    fn default() -> Self {
        Self { family: Family::Voltage, thresholds: Thresholds::default(), mode: ChartMode::Fixed }
    }
}

/// Location of one optimum on the chart grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub i_fm: usize,
    pub i_dc: usize,
    pub fm_over_f0: f64,
    pub dc_ratio: f64,
    /// Value of the optimized metric (dB, or fractional bandwidth for p4).
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optima {
    /// Best return loss.
    pub p1: Option<Optimum>,
    /// Best insertion loss.
    pub p2: Option<Optimum>,
    /// Best isolation.
    pub p3: Option<Optimum>,
    /// Widest defined bandwidth.
    pub p4: Option<Optimum>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartGrid {
    pub fm_over_f0: Vec<f64>,
    pub dc_ratio: Vec<f64>,
    /// Row-major by modulation frequency: `cells[i_fm * n_dc + i_dc]`.
    pub cells: Vec<MetricSet>,
    /// Resonance used per cell (rad/s).
    pub omega0: Vec<f64>,
    pub optima: Optima,
    pub mode: ChartMode,
}

impl ChartGrid {
    pub fn cell(&self, i_fm: usize, i_dc: usize) -> &MetricSet {
        &self.cells[i_fm * self.dc_ratio.len() + i_dc]
    }
}

fn axis(range: (f64, f64), n: usize, name: &'static str) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::EmptyGrid);
    }
    if n == 1 {
        return Ok(vec![range.0]);
    }
    if !(range.0 > 0.0 && range.1 > range.0) {
        return Err(invalid(name, "range must be positive and increasing"));
    }
    Ok(linspace(range.0, range.1, n))
}

/// Metrics of one design at `omega_rf` over the local grid `omega_rf (1 +- span)`.
pub fn cell_metrics(
    req: &MetricRequest,
    omega_rf: f64,
    cp: &CircuitParams,
    mp: &ModulationParams,
    points: usize,
    span: f64,
) -> Result<MetricSet> {
    let grid = local_grid(omega_rf, points, span)?;
    let sp = req.family.sparams(&grid, cp, mp)?;
    metrics_at(&sp, &req.thresholds, Some(omega_rf))
}

pub fn local_grid(omega_rf: f64, points: usize, span: f64) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::EmptyGrid);
    }
    if points == 1 {
        return Ok(vec![omega_rf]);
    }
    Ok(linspace(omega_rf * (1.0 - span), omega_rf * (1.0 + span), points))
}

/// Design chart over `(omega_m / omega0, dC / C0)`.
pub fn chart(req: &MetricRequest, spec: &GridSpec, omega_rf: f64, cp: &CircuitParams) -> Result<ChartGrid> {
    cp.validate()?;
    let fm = axis(spec.fm_over_f0, spec.n_fm, "fm_over_f0")?;
    let dc = axis(spec.dc_ratio, spec.n_dc, "dc_ratio")?;
    let cells_idx: Vec<(usize, usize)> = (0..fm.len()).flat_map(|i| (0..dc.len()).map(move |j| (i, j))).collect();
    let run = |&(i, j): &(usize, usize)| -> Result<(MetricSet, f64)> {
        let (r, x) = (fm[i], dc[j]);
        let (cpc, w0) = match req.mode {
            ChartMode::Fixed => (*cp, cp.omega0()),
            ChartMode::Retune => {
                let w0 = tune_omega0(req.family, omega_rf, cp.l0, cp.q0, cp.z0, |w0| ModulationParams::new(r * w0, x))?;
                (CircuitParams::from_resonance(cp.l0, w0, cp.q0, cp.z0)?, w0)
            }
        };
        let mp = ModulationParams::new(r * w0, x)?;
        Ok((cell_metrics(req, omega_rf, &cpc, &mp, spec.points, spec.span)?, w0))
    };
    #[cfg(feature = "parallel")]
    let out: Vec<Result<(MetricSet, f64)>> = {
        use rayon::prelude::*;
        cells_idx.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let out: Vec<Result<(MetricSet, f64)>> = cells_idx.iter().map(run).collect();
    let mut cells = Vec::with_capacity(out.len());
    let mut omega0 = Vec::with_capacity(out.len());
    for o in out {
        let (m, w0) = o?;
        cells.push(m);
        omega0.push(w0);
    }
    let optima = locate_optima(&fm, &dc, &cells);
    Ok(ChartGrid { fm_over_f0: fm, dc_ratio: dc, cells, omega0, optima, mode: req.mode })
}

/// Scan-and-pick optima. Cells are visited in `(omega_m, dc)` order and replaced
/// only by a strictly better value, so ties go to the lowest `omega_m`, then dc.
fn locate_optima(fm: &[f64], dc: &[f64], cells: &[MetricSet]) -> Optima {
    let pick = |score: &dyn Fn(&MetricSet) -> Option<f64>, report: &dyn Fn(&MetricSet) -> f64| {
        let mut best: Option<(usize, f64)> = None;
        for (k, c) in cells.iter().enumerate() {
            if let Some(s) = score(c).filter(|s| s.is_finite()) {
                if best.is_none_or(|b| s > b.1) {
                    best = Some((k, s));
                }
            }
        }
        best.map(|(k, _)| Optimum {
            i_fm: k / dc.len(),
            i_dc: k % dc.len(),
            fm_over_f0: fm[k / dc.len()],
            dc_ratio: dc[k % dc.len()],
            value: report(&cells[k]),
        })
    };
    Optima {
        p1: pick(&|c| Some(c.rl_db), &|c| c.rl_db),
        p2: pick(&|c| Some(-c.il_db), &|c| c.il_db),
        p3: pick(&|c| Some(c.ix_db), &|c| c.ix_db),
        p4: pick(&|c| (!c.bw_undefined).then_some(c.bw_fractional), &|c| c.bw_fractional),
    }
}
