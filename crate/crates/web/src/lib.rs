//! Browser demo: S-parameter sweep, isolation design and design chart.
//!
//! Every operation takes plain numbers and returns a JSON string, so the same
//! functions run natively under test and behind `wasm-bindgen` in the page.

use std::f64::consts::TAU;

use serde_json::{json, Value};
use stm_core::analytic::Family;
use stm_core::design::{
    chart as core_chart, solve_isolation, solve_isolation_current, tune_omega0, ChartMode, GridSpec, MetricRequest,
    REFERENCE_L0,
};
use stm_core::sparams::{db_loss, linspace};
use stm_core::{metrics, CircuitParams, ModulationParams, Thresholds};

pub type Result<T> = std::result::Result<T, String>;

fn family(name: &str) -> Result<Family> {
    name.parse()
}

fn err(e: stm_core::Error) -> String {
    e.to_string()
}

/// Finite numbers as-is, everything else as `null`.
fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// |S11|, |S21|, |S31| in dB and the band metrics over `n` points.
#[allow(clippy::too_many_arguments)]
pub fn sparams(
    topology: &str,
    l0: f64,
    f0_hz: f64,
    q0: f64,
    z0: f64,
    fm_hz: f64,
    dc: f64,
    fstart_hz: f64,
    fstop_hz: f64,
    n: usize,
) -> Result<String> {
    let fam = family(topology)?;
    let cp = CircuitParams::from_resonance(l0, TAU * f0_hz, q0, z0).map_err(err)?;
    let mp = ModulationParams::new(TAU * fm_hz, dc).map_err(err)?;
    let grid = linspace(TAU * fstart_hz, TAU * fstop_hz, n);
    let sp = fam.sparams(&grid, &cp, &mp).map_err(err)?;
    let m = metrics(&sp, &Thresholds::default()).map_err(err)?;
    let db = |i: usize| -> Vec<Value> { sp.matrices().iter().map(|s| finite(-db_loss(s[(i, 0)]))).collect() };
    Ok(json!({
        "freq_hz": sp.omega().iter().map(|w| w / TAU).collect::<Vec<_>>(),
        "s11_db": db(0),
        "s21_db": db(1),
        "s31_db": db(2),
        "il_db": finite(m.il_db),
        "rl_db": finite(m.rl_db),
        "ix_db": finite(m.ix_db),
        "bw_fractional": if m.bw_undefined { Value::Null } else { json!(m.bw_fractional) },
        "center_hz": m.center_frequency / TAU,
    })
    .to_string())
}

/// Isolating modulation at `frf_hz`, with the resonance tuned at a tenth of the
/// carrier and half depth.
pub fn design(topology: &str, frf_hz: f64, q0: f64, z0: f64) -> Result<String> {
    let fam = family(topology)?;
    let w = TAU * frf_hz;
    let tune = ModulationParams::new(0.1 * w, 0.5).map_err(err)?;
    let wv = tune_omega0(Family::Voltage, w, REFERENCE_L0, q0, z0, |_| Ok(tune)).map_err(err)?;
    let (cp, d) = match fam {
        Family::Voltage => {
            let cp = CircuitParams::from_resonance(REFERENCE_L0, wv, q0, z0).map_err(err)?;
            (cp, solve_isolation(w, &cp).map_err(err)?)
        }
        Family::Current => {
            let l0 = z0 * z0 / (wv * wv * REFERENCE_L0);
            let w0 = tune_omega0(Family::Current, w, l0, q0, z0, |_| Ok(tune)).map_err(err)?;
            let cp = CircuitParams::from_resonance(l0, w0, q0, z0).map_err(err)?;
            (cp, solve_isolation_current(w, &cp).map_err(err)?)
        }
    };
    let col = fam.column(w, &cp, &d.modulation().map_err(err)?).map_err(err)?;
    Ok(json!({
        "l0": cp.l0,
        "f0_hz": cp.omega0() / TAU,
        "fm_hz": d.omega_m / TAU,
        "dc_ratio": d.dc_ratio,
        "ix_db": finite(d.ix_db()),
        "s11": col[0].norm(),
        "s21": col[1].norm(),
        "s31": col[2].norm(),
    })
    .to_string())
}

/// Design chart: IL, RL, IX and bandwidth grids indexed `[fm][dc]`, plus optima.
#[allow(clippy::too_many_arguments)]
pub fn chart(
    topology: &str,
    l0: f64,
    f0_hz: f64,
    q0: f64,
    z0: f64,
    frf_hz: f64,
    n_fm: usize,
    n_dc: usize,
    retune: bool,
) -> Result<String> {
    let fam = family(topology)?;
    let cp = CircuitParams::from_resonance(l0, TAU * f0_hz, q0, z0).map_err(err)?;
    let mode = if retune { ChartMode::Retune } else { ChartMode::Fixed };
    let req = MetricRequest { family: fam, thresholds: Thresholds::default(), mode };
    let spec = GridSpec { n_fm, n_dc, points: 201, ..GridSpec::default() };
    let g = core_chart(&req, &spec, TAU * frf_hz, &cp).map_err(err)?;
    let grid = |f: &dyn Fn(&stm_core::MetricSet) -> Value| -> Vec<Vec<Value>> {
        (0..g.fm_over_f0.len()).map(|i| (0..g.dc_ratio.len()).map(|j| f(g.cell(i, j))).collect()).collect()
    };
    Ok(json!({
        "fm_over_f0": g.fm_over_f0,
        "dc_ratio": g.dc_ratio,
        "il_db": grid(&|c| finite(c.il_db)),
        "rl_db": grid(&|c| finite(c.rl_db)),
        "ix_db": grid(&|c| finite(c.ix_db)),
        "bw_fractional": grid(&|c| if c.bw_undefined { Value::Null } else { json!(c.bw_fractional) }),
        "optima": g.optima,
    })
    .to_string())
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    #[wasm_bindgen]
    #[allow(clippy::too_many_arguments)]
    pub fn sparams(
        topology: &str,
        l0: f64,
        f0_hz: f64,
        q0: f64,
        z0: f64,
        fm_hz: f64,
        dc: f64,
        fstart_hz: f64,
        fstop_hz: f64,
        n: usize,
    ) -> Result<String, JsError> {
        super::sparams(topology, l0, f0_hz, q0, z0, fm_hz, dc, fstart_hz, fstop_hz, n).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen]
    pub fn design(topology: &str, frf_hz: f64, q0: f64, z0: f64) -> Result<String, JsError> {
        super::design(topology, frf_hz, q0, z0).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen]
    #[allow(clippy::too_many_arguments)]
    pub fn chart(
        topology: &str,
        l0: f64,
        f0_hz: f64,
        q0: f64,
        z0: f64,
        frf_hz: f64,
        n_fm: usize,
        n_dc: usize,
        retune: bool,
    ) -> Result<String, JsError> {
        super::chart(topology, l0, f0_hz, q0, z0, frf_hz, n_fm, n_dc, retune).map_err(|e| JsError::new(&e))
    }
}
