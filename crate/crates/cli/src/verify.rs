//! Bundled invariant suites for `stm verify`.

use std::f64::consts::TAU;

use serde::Serialize;
use serde_json::json;
use stm_core::analytic::basis::{closed_form, JunctionBasis};
use stm_core::analytic::{vm_sparams, Family};
use stm_core::design::{local_grid, reference_current_design, reference_design, reference_omega_rf};
use stm_core::sparams::{linspace, SMatrix};
use stm_core::tdsim::*;
use stm_core::{CircuitParams, Complex64, ModulationParams};

use crate::args::VerifyArgs;
use crate::error::CliError;
use crate::output::{json, Outputs};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Default)]
struct Report {
    checks: Vec<Check>,
}

impl Report {
    /// Passes when `measured <= tolerance`.
    fn push(&mut self, suite: &'static str, name: impl Into<String>, measured: f64, tolerance: f64) {
        let pass = measured <= tolerance;
        self.checks.push(Check { suite, name: name.into(), measured, tolerance, pass });
    }
}

fn max_diff(a: &SMatrix, b: &SMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn oracle(r: &mut Report) -> stm_core::Result<()> {
    let w = reference_omega_rf();
    let grid = linspace(0.9 * w, 1.1 * w, 21);
    let (cp, mp) = reference_design()?;
    let (td, _) = sparams_td(Topology::DiffVoltage, ElastanceModel::Exact, &cp, &mp, &grid, &SteadyConfig::default())?;
    r.push("oracle-equivalence", "voltage mode", td.max_abs_diff(&vm_sparams(td.omega(), &cp, &mp)?), 1e-3);
    let (cpc, d) = reference_current_design()?;
    let mpc = d.modulation()?;
    let cfg = SteadyConfig { max_q: 16, ..Default::default() };
    let (td, _) = sparams_td(Topology::DiffCurrent, ElastanceModel::FirstHarmonic, &cpc, &mpc, &grid, &cfg)?;
    r.push("oracle-equivalence", "current mode", td.max_abs_diff(&Family::Current.sparams(td.omega(), &cpc, &mpc)?), 1e-3);
    Ok(())
}

fn pseudo_lti(r: &mut Report) -> stm_core::Result<()> {
    let (cp, _) = reference_design()?;
    let (cpc, _) = reference_current_design()?;
    for (topology, cp, el) in [
        (Topology::DiffVoltage, cp, ElastanceModel::Exact),
        (Topology::DiffCurrent, cpc, ElastanceModel::FirstHarmonic),
    ] {
        let mut worst = f64::NEG_INFINITY;
        let mut port = 0;
        for ratio in [0.05, 0.12, 0.25] {
            for dc in [0.2, 0.6] {
                for (q, u) in [(1u64, 0.95), (3, 1.04)] {
                    let wm = ratio * cp.omega0();
                    let p = (u * cp.omega0() / wm * q as f64).round();
                    let mp = ModulationParams::new(wm, dc)?.with_theta(0.3);
                    port = port % 3 + 1;
                    let m = assemble_with(topology, &cp, &mp, port, el)?;
                    worst = worst.max(port_spectrum(&m, wm * p / q as f64, 1.0)?.max_im_dbc());
                }
            }
        }
        // dBc above the -120 dBc limit
        r.push("pseudo-lti", format!("{topology:?} largest k != 0 bin + 120 dB"), worst + 120.0, 0.0);
    }
    Ok(())
}

fn phase_law(r: &mut Report) -> stm_core::Result<()> {
    let (cp, mp) = reference_design()?;
    let w = reference_omega_rf();
    let theta = 0.7;
    for topology in [Topology::SeDelta, Topology::SeWye] {
        let a = port_spectrum(&assemble(topology, &cp, &mp, 1)?, w, 1.0)?;
        let b = port_spectrum(&assemble(topology, &cp, &mp.with_theta(theta), 1)?, w, 1.0)?;
        let mut err: f64 = 0.0;
        for p in 1..=3 {
            for k in -2i64..=2 {
                err = err.max((b.bin(p, k) - a.bin(p, k) * Complex64::from_polar(1.0, k as f64 * theta)).norm());
            }
        }
        r.push("phase-law", format!("{topology:?}"), err, 1e-6);
    }
    Ok(())
}

fn unitarity(r: &mut Report) -> stm_core::Result<()> {
    let (cp, mp) = reference_design()?;
    let lossless = cp.with_q0(f64::INFINITY);
    let w = reference_omega_rf();
    let an = vm_sparams(&local_grid(w, 201, 0.1)?, &lossless, &mp)?;
    r.push("unitarity", "closed form", an.unitarity_error(), 1e-6);
    let (td, _) =
        sparams_td(Topology::DiffVoltage, ElastanceModel::Exact, &lossless, &mp, &[0.96 * w, w], &SteadyConfig::default())?;
    r.push("unitarity", "time domain", td.unitarity_error(), 1e-6);
    Ok(())
}

fn inphase(r: &mut Report) -> stm_core::Result<()> {
    let (cp, mp) = reference_design()?;
    let w = reference_omega_rf();
    for t in Topology::all() {
        let el = if t.is_delta() { ElastanceModel::Exact } else { ElastanceModel::FirstHarmonic };
        let m = assemble_with(t, &cp, &mp, 2, el)?;
        let wf = steady_state(&m, 1.03 * w, 1.0)?;
        r.push("inphase-residual", format!("{t:?}"), inphase_residual(&m, &wf).into_iter().fold(0.0, f64::max), 1e-8);
    }
    Ok(())
}

fn identities(r: &mut Report) {
    let b = JunctionBasis::new();
    r.push("matrix-identities", "T^-1 H T", max_diff(&b.h_t, &closed_form::h_t()), 1e-12);
    r.push("matrix-identities", "T^-1 Q T", max_diff(&b.q_t, &closed_form::q_t()), 1e-12);
    r.push("matrix-identities", "T^-1 G", max_diff(&b.g_t, &closed_form::g_t()), 1e-12);
    r.push("matrix-identities", "T^-1 E T", max_diff(&b.e_t, &closed_form::e_t()), 1e-12);
    let (mut cc, mut cs) = (0.0f64, 0.0f64);
    for i in 0..16 {
        let wt = TAU * i as f64 / 16.0 + 0.1;
        cc = cc.max(max_diff(&b.hcc_t(wt), &closed_form::hcc_t(wt)));
        cs = cs.max(max_diff(&b.hcs_t(wt), &closed_form::hcs_t(wt)));
    }
    r.push("matrix-identities", "T^-1 H Cc T", cc, 1e-12);
    r.push("matrix-identities", "T^-1 H Cs T", cs, 1e-12);
    r.push("matrix-identities", "T T^-1", max_diff(&(b.t * b.t_inv), &SMatrix::identity()), 1e-12);
}

pub fn run_checks() -> stm_core::Result<Vec<Check>> {
    let mut r = Report::default();
    identities(&mut r);
    oracle(&mut r)?;
    pseudo_lti(&mut r)?;
    phase_law(&mut r)?;
    unitarity(&mut r)?;
    inphase(&mut r)?;
    Ok(r.checks)
}

pub fn verify(a: &VerifyArgs, argv: &[String]) -> Result<(), CliError> {
    let checks = run_checks()?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    for c in &checks {
        println!("{} {} / {}: {:.3e} (<= {:.0e})", if c.pass { "PASS" } else { "FAIL" }, c.suite, c.name, c.measured, c.tolerance);
    }
    let mut out = Outputs::new(&a.common.out);
    out.add("verify.json", json(&json!({ "pass": failed == 0, "checks": checks })));
    let (cp, mp): (CircuitParams, ModulationParams) = reference_design()?;
    let params = json!({ "reference_circuit": cp, "reference_modulation": mp, "carrier_rad_s": reference_omega_rf() });
    out.commit("verify", argv, params)?;
    if failed > 0 {
        return Err(CliError::Verify(failed));
    }
    Ok(())
}
