use std::f64::consts::TAU;

use serde_json::json;
use stm_core::analytic::Family as CoreFamily;
use stm_core::design::{
    chart, solve_isolation, solve_isolation_current, tune_omega0, ChartMode, GridSpec, MetricRequest, REFERENCE_L0,
};
use stm_core::sparams::linspace;
use stm_core::tdsim::{assemble_with, port_spectrum_with, sparams_td, SteadyConfig, KMAX};
use stm_core::{metrics, CircuitParams, Direction, ModulationParams, SParameterSet};

use crate::args::*;
use crate::config;
use crate::error::{missing, CliError};
use crate::output::{json, num, Csv, Outputs};
use crate::touchstone::{self, Network};

type Result<T> = std::result::Result<T, CliError>;

fn need<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| missing(flag))
}

fn circuit(c: &Circuit) -> Result<CircuitParams> {
    let (l0, f0) = (need(c.l0, "l0")?, need(c.f0, "f0")?);
    let (q0, z0) = (need(c.q0, "q0")?, need(c.z0, "z0")?);
    Ok(CircuitParams::from_resonance(l0, TAU * f0, q0, z0)?)
}

fn modulation(m: &Modulation) -> Result<ModulationParams> {
    let dir = match m.direction {
        Rotation::Cw => Direction::Clockwise,
        Rotation::Ccw => Direction::Counterclockwise,
    };
    Ok(ModulationParams::new(TAU * need(m.fm, "fm")?, need(m.dc, "dc")?)?.with_theta(m.theta).with_direction(dir))
}

/// Circuit parameters plus the resonance in Hz.
fn circuit_json(cp: &CircuitParams) -> serde_json::Value {
    let mut v = json!(cp);
    v["f0_hz"] = json!(cp.omega0() / TAU);
    v
}

pub fn design(a: &DesignArgs, argv: &[String]) -> Result<()> {
    let frf = need(a.frf, "frf")?;
    let (q0, z0) = (need(a.circuit.q0, "q0")?, need(a.circuit.z0, "z0")?);
    let w = TAU * frf;
    let tune_mp = ModulationParams::new(a.tune_fm_ratio * w, a.tune_dc)?;
    let tuned = |family: CoreFamily, l0: f64| -> Result<f64> {
        match a.circuit.f0 {
            Some(f0) => Ok(TAU * f0),
            None => Ok(tune_omega0(family, w, l0, q0, z0, |_| Ok(tune_mp))?),
        }
    };
    let (cp, d) = match a.topology {
        Family::Voltage => {
            let l0 = a.circuit.l0.unwrap_or(REFERENCE_L0);
            let cp = CircuitParams::from_resonance(l0, tuned(CoreFamily::Voltage, l0)?, q0, z0)?;
            (cp, solve_isolation(w, &cp)?)
        }
        Family::Current => {
            // series tanks default to the dual of the default parallel tank
            let l0 = match a.circuit.l0 {
                Some(l) => l,
                None => {
                    let wv = tune_omega0(CoreFamily::Voltage, w, REFERENCE_L0, q0, z0, |_| Ok(tune_mp))?;
                    z0 * z0 / (wv * wv * REFERENCE_L0)
                }
            };
            let cp = CircuitParams::from_resonance(l0, tuned(CoreFamily::Current, l0)?, q0, z0)?;
            (cp, solve_isolation_current(w, &cp)?)
        }
    };
    let mp = d.modulation()?;
    let col = a.topology.core().column(w, &cp, &mp)?;
    let norm_error = (col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs();
    let lossless = cp.is_lossless().then(|| json!({ "column_norm_error": norm_error, "unit_norm": norm_error < 1e-6 }));
    let report = json!({
        "topology": a.topology.name(),
        "frf_hz": frf,
        "fm_hz": d.omega_m / TAU,
        "fm_over_frf": d.omega_m / w,
        "dc_ratio": d.dc_ratio,
        "f0_hz": cp.omega0() / TAU,
        "circuit": cp,
        "design": d,
        "s11": col[0].norm(),
        "s21": col[1].norm(),
        "s31": col[2].norm(),
        "ix_db": d.ix_db(),
        "lossless": lossless,
    });
    let conf = config::render(&[
        ("topology", a.topology.name().to_string()),
        ("l0", num(cp.l0)),
        ("f0", num(cp.omega0() / TAU)),
        ("q0", num(cp.q0)),
        ("z0", num(cp.z0)),
        ("fm", num(d.omega_m / TAU)),
        ("dc", num(d.dc_ratio)),
    ]);
    println!("fm = {} Hz", num(d.omega_m / TAU));
    println!("dC/C0 = {}", num(d.dc_ratio));
    let mut out = Outputs::new(&a.common.out);
    out.add("design.json", json(&report));
    out.add("design.conf", conf);
    let params = json!({
        "topology": a.topology.name(),
        "frf_hz": frf,
        "tune_modulation": tune_mp,
        "omega0": cp.omega0(),
        "circuit": cp,
        "seed": { "omega_m": d.seed_omega_m, "dc_ratio": d.seed_dc_ratio },
        "residuals": { "omega_m": d.residual_omega_m, "dc_ratio": d.residual_dc, "s31": d.s31 },
    });
    out.commit("design", argv, params)?;
    Ok(())
}

fn sparams_csv(sp: &SParameterSet) -> String {
    let mut header = vec!["frequency_hz".to_string()];
    for i in 1..=3 {
        for j in 1..=3 {
            header.push(format!("s{i}{j}_re"));
            header.push(format!("s{i}{j}_im"));
        }
    }
    header.extend(["il_db", "rl_db", "ix_db"].map(String::from));
    let hdr: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut csv = Csv::new(&hdr);
    for (k, w) in sp.omega().iter().enumerate() {
        let m = sp.at(k);
        let mut row = vec![num(w / TAU)];
        for i in 0..3 {
            for j in 0..3 {
                row.push(num(m[(i, j)].re));
                row.push(num(m[(i, j)].im));
            }
        }
        row.extend([num(sp.il_db(k)), num(sp.rl_db(k)), num(sp.ix_db(k))]);
        csv.row(row);
    }
    csv.into_string()
}

pub fn sparams(a: &SparamsArgs, argv: &[String]) -> Result<()> {
    let cp = circuit(&a.circuit)?;
    let mp = modulation(&a.modulation)?;
    let grid = linspace(TAU * need(a.fstart, "fstart")?, TAU * need(a.fstop, "fstop")?, a.n);
    let family = a.topology.core();
    let (sp, td) = match a.engine {
        Engine::Analytic => (family.sparams(&grid, &cp, &mp)?, None),
        Engine::Td => {
            let topo = match a.topology {
                Family::Voltage => Topology::Voltage,
                Family::Current => Topology::Current,
            };
            let cfg = SteadyConfig { max_q: a.max_q, ..Default::default() };
            let (sp, rep) = sparams_td(topo.core(), a.elastance.core(), &cp, &mp, &grid, &cfg)?;
            let diff = sp.max_abs_diff(&family.sparams(sp.omega(), &cp, &mp)?);
            (sp, Some((rep, diff)))
        }
    };
    let m = metrics(&sp, &a.limits.thresholds())?;
    let summary = json!({
        "engine": if td.is_some() { "td" } else { "analytic" },
        "metrics": m,
        "center_frequency_hz": m.center_frequency / TAU,
        "bandwidth_hz": m.bw_width / TAU,
        "td_report": td.map(|t| t.0),
        "max_abs_diff_vs_analytic": td.map(|t| t.1),
    });
    let net = Network { freq_hz: sp.omega().iter().map(|w| w / TAU).collect(), s: sp.matrices().to_vec(), r: cp.z0 };
    let mut out = Outputs::new(&a.common.out);
    out.add("sparams.csv", sparams_csv(&sp));
    out.add("sparams.s3p", touchstone::write(&net));
    out.add("metrics.json", json(&summary));
    let params = json!({
        "topology": a.topology.name(),
        "circuit": circuit_json(&cp),
        "modulation": mp,
        "grid_rad_s": grid,
        "evaluated_rad_s": sp.omega(),
        "thresholds": a.limits.thresholds(),
        "elastance": format!("{:?}", a.elastance),
        "max_q": a.max_q,
    });
    out.commit("sparams", argv, params)?;
    Ok(())
}

pub fn sweep(a: &SweepArgs, argv: &[String]) -> Result<()> {
    let cp = circuit(&a.circuit)?;
    let w = TAU * need(a.frf, "frf")?;
    let mode = match a.mode {
        Mode::Fixed => ChartMode::Fixed,
        Mode::Retune => ChartMode::Retune,
    };
    let req = MetricRequest { family: a.topology.core(), thresholds: a.limits.thresholds(), mode };
    let spec = GridSpec {
        fm_over_f0: (a.fm_min, a.fm_max),
        n_fm: a.n_fm,
        dc_ratio: (a.dc_min, a.dc_max),
        n_dc: a.n_dc,
        points: a.points,
        span: a.span,
    };
    let g = chart(&req, &spec, w, &cp)?;
    let mut csv = Csv::new(&["fm_over_f0", "dc_ratio", "il_db", "rl_db", "ix_db", "bw_frac"]);
    for (i, &fm) in g.fm_over_f0.iter().enumerate() {
        for (j, &dc) in g.dc_ratio.iter().enumerate() {
            let c = g.cell(i, j);
            let bw = if c.bw_undefined { f64::NAN } else { c.bw_fractional };
            csv.row([num(fm), num(dc), num(c.il_db), num(c.rl_db), num(c.ix_db), num(bw)]);
        }
    }
    let mut out = Outputs::new(&a.common.out);
    out.add("chart.csv", csv.into_string());
    out.add("optima.json", json(&json!({ "mode": g.mode, "optima": g.optima })));
    let params = json!({
        "topology": a.topology.name(),
        "circuit": circuit_json(&cp),
        "frf_hz": w / TAU,
        "grid": spec,
        "thresholds": req.thresholds,
        "mode": g.mode,
        "omega0_range": [g.omega0.iter().copied().fold(f64::INFINITY, f64::min), g.omega0.iter().copied().fold(0.0, f64::max)],
    });
    out.commit("sweep", argv, params)?;
    Ok(())
}

pub fn spectrum(a: &SpectrumArgs, argv: &[String]) -> Result<()> {
    let cp = circuit(&a.circuit)?;
    let mp = modulation(&a.modulation)?;
    let w = TAU * need(a.frf, "frf")?;
    let model = assemble_with(a.topology.core(), &cp, &mp, a.port as usize, a.elastance.core())?;
    let cfg = SteadyConfig { max_q: a.max_q, ..Default::default() };
    let sp = port_spectrum_with(&model, w, 1.0, &cfg)?;
    let mut csv = Csv::new(&["port", "k", "freq_hz", "amplitude_dbc", "phase_rad"]);
    for p in 1..=3 {
        for k in -KMAX..=KMAX {
            let b = sp.bin(p, k);
            csv.row([p.to_string(), k.to_string(), num(sp.frequency(k) / TAU), num(sp.dbc(p, k)), num(b.arg())]);
        }
    }
    let mut out = Outputs::new(&a.common.out);
    out.add("spectrum.csv", csv.into_string());
    let params = json!({
        "topology": format!("{:?}", a.topology),
        "elastance": format!("{:?}", a.elastance),
        "circuit": circuit_json(&cp),
        "modulation": mp,
        "port": a.port,
        "snap": sp.snap,
        "snap_shift_hz": sp.snap.shift() / TAU,
        "residual": sp.residual,
        "floor_dbc": sp.floor_dbc,
        "max_im_dbc": sp.max_im_dbc(),
        "max_q": a.max_q,
    });
    out.commit("spectrum", argv, params)?;
    Ok(())
}
