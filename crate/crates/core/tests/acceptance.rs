//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

mod common;

use std::f64::consts::{FRAC_PI_3, PI};
use std::time::{Duration, Instant};

use nalgebra::Matrix3;
use num_complex::Complex64;
use stm_core::analytic::basis::{closed_form, JunctionBasis};
use stm_core::analytic::{ideal_smatrix, vm_column, vm_sparams, Family};
use stm_core::design::{
    local_grid, reference_current_design, reference_design, reference_omega_rf, single_ended_il_design,
    solve_isolation, REFERENCE_L0, REFERENCE_Q0, REFERENCE_Z0,
};
use stm_core::sparams::{circulant, linspace};
use stm_core::tdsim::*;
use stm_core::{metrics_at, Direction, Thresholds};

use common::{elastance_for, random_run, samples};

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(v: f64, target: f64, tol: f64) -> bool {
    (v - target).abs() <= tol
}

fn criterion_1() -> Outcome {
    let (cp, mp) = reference_design().unwrap();
    let w = reference_omega_rf();
    let sp = vm_sparams(&local_grid(w, 401, 0.1).unwrap(), &cp, &mp).unwrap();
    let m = metrics_at(&sp, &Thresholds::default(), Some(w)).unwrap();
    let bw = 100.0 * m.bw_fractional;
    Outcome {
        pass: within(m.il_db, 0.6, 0.15)
            && within(m.rl_db, 27.5, 1.5)
            && within(m.ix_db, 31.5, 1.5)
            && !m.bw_undefined
            && within(bw, 3.6, 0.3),
        detail: format!(
            "IL {:.3} dB, RL {:.2} dB, IX {:.2} dB, BW {:.2}% (f0 {:.6} GHz)",
            m.il_db,
            m.rl_db,
            m.ix_db,
            bw,
            cp.omega0() / (2.0 * PI) / 1e9
        ),
    }
}

fn se_design() -> stm_core::design::SingleEndedDesign {
    let w = reference_omega_rf();
    single_ended_il_design(w, 0.1 * w, REFERENCE_L0, REFERENCE_Q0, REFERENCE_Z0).unwrap()
}

fn criterion_2() -> Outcome {
    let d = se_design();
    let w = reference_omega_rf();
    let grid = linspace(0.9 * w, 1.1 * w, 21);
    let (sp, _) = sparams_td(Topology::SeDelta, ElastanceModel::Exact, &d.cp, &d.mp, &grid, &SteadyConfig::default()).unwrap();
    let m = metrics_at(&sp, &Thresholds::default(), Some(w)).unwrap();
    Outcome {
        pass: within(m.il_db, 2.31, 0.3) && within(m.rl_db, 21.8, 2.0) && within(m.ix_db, 10.0, 2.0) && m.bw_undefined,
        detail: format!(
            "IL {:.3} dB, RL {:.2} dB, IX {:.2} dB, BW undefined {} (f0 {:.4} GHz, dC/C0 {:.4})",
            m.il_db,
            m.rl_db,
            m.ix_db,
            m.bw_undefined,
            d.cp.omega0() / (2.0 * PI) / 1e9,
            d.mp.dc_ratio
        ),
    }
}

fn criterion_3() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut floor = f64::NEG_INFINITY;
    for (seed, topology) in [(3u8, Topology::DiffVoltage), (4u8, Topology::DiffCurrent)] {
        for r in samples(random_run(), 25, seed) {
            let m = assemble_with(topology, &r.cp, &r.mp, r.port, elastance_for(topology)).unwrap();
            let sp = port_spectrum(&m, r.omega_rf, 1.0).unwrap();
            worst = worst.max(sp.max_im_dbc());
            floor = floor.max(sp.floor_dbc);
        }
    }
    Outcome {
        pass: worst <= -120.0,
        detail: format!("50 runs, largest k != 0 port bin {worst:.1} dBc (numeric floor {floor:.1} dBc)"),
    }
}

fn criterion_4() -> Outcome {
    let d = se_design();
    let w = reference_omega_rf();
    let m = assemble(Topology::SeDelta, &d.cp, &d.mp, 1).unwrap();
    let sp = port_spectrum(&m, w, 1.0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for p in 1..=3 {
        let (lo, hi) = (sp.dbc(p, -1), sp.dbc(p, 1));
        pass &= within(lo, -12.0, 2.0) && within(hi, -12.0, 2.0);
        parts.push(format!("port {p}: {lo:.2}/{hi:.2}"));
    }
    Outcome { pass, detail: format!("k = -1/+1 bins at 0.9/1.1 GHz (dBc) {}", parts.join(", ")) }
}

fn criterion_5() -> Outcome {
    let w = reference_omega_rf();
    let grid = linspace(0.9 * w, 1.1 * w, 21);
    let (cp, mp) = reference_design().unwrap();
    let (td, _) = sparams_td(Topology::DiffVoltage, ElastanceModel::Exact, &cp, &mp, &grid, &SteadyConfig::default()).unwrap();
    let dv = td.max_abs_diff(&vm_sparams(td.omega(), &cp, &mp).unwrap());
    let (cpc, d) = reference_current_design().unwrap();
    let mpc = d.modulation().unwrap();
    let cfg = SteadyConfig { max_q: 16, ..Default::default() };
    let (td, rep) = sparams_td(Topology::DiffCurrent, ElastanceModel::FirstHarmonic, &cpc, &mpc, &grid, &cfg).unwrap();
    let dc = td.max_abs_diff(&Family::Current.sparams(td.omega(), &cpc, &mpc).unwrap());
    Outcome {
        pass: dv < 1e-3 && dc < 1e-3,
        detail: format!(
            "max |S_analytic - S_td|: voltage {dv:.2e}, current {dc:.2e} (largest snap shift {:.2e} of carrier)",
            rep.max_snap_shift / w
        ),
    }
}

fn criterion_6() -> Outcome {
    let w = reference_omega_rf();
    let (cp, _) = reference_design().unwrap();
    let d = solve_isolation(w, &cp).unwrap();
    let ix = -20.0 * vm_column(w, &cp, &d.modulation().unwrap()).unwrap()[2].norm().log10();
    let lossless = cp.with_q0(f64::INFINITY);
    let dl = solve_isolation(w, &lossless).unwrap();
    let s = circulant(vm_column(w, &lossless, &dl.modulation().unwrap()).unwrap());
    let ideal_err = (s - ideal_smatrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    Outcome {
        pass: ix >= 60.0 && d.residual_dc <= 1e-9 && dl.residual_dc <= 1e-9 && ideal_err <= 1e-4,
        detail: format!(
            "IX {ix:.1} dB at fm/frf {:.5}, dC/C0 {:.5}; branch disagreement {:.1e}/{:.1e}; lossless max |S - S_ideal| {ideal_err:.1e}",
            d.omega_m / w,
            d.dc_ratio,
            d.residual_dc,
            dl.residual_dc
        ),
    }
}

fn max_diff(a: &Matrix3<Complex64>, b: &Matrix3<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn real(m: [[f64; 3]; 3]) -> Matrix3<Complex64> {
    Matrix3::from_fn(|r, c| Complex64::new(m[r][c], 0.0))
}

fn criterion_7() -> Outcome {
    let b = JunctionBasis::new();
    let mut errs = vec![
        ("H", max_diff(&(b.g * b.g), &real([[1.0, -2.0, 1.0], [1.0, 1.0, -2.0], [-2.0, 1.0, 1.0]]))),
        ("T^-1 H T", max_diff(&b.h_t, &closed_form::h_t())),
        ("T^-1 Q T", max_diff(&b.q_t, &closed_form::q_t())),
        ("T^-1 G", max_diff(&b.g_t, &closed_form::g_t())),
        ("E", max_diff(&b.e, &real([[2.0, -1.0, -1.0], [-1.0, 2.0, -1.0], [-1.0, -1.0, 2.0]]))),
        ("T^-1 E T", max_diff(&b.e_t, &closed_form::e_t())),
    ];
    let (mut cc, mut cs) = (0.0f64, 0.0f64);
    for i in 0..16 {
        let wt = 2.0 * PI * i as f64 / 16.0 + 0.1;
        cc = cc.max(max_diff(&b.hcc_t(wt), &closed_form::hcc_t(wt)));
        cs = cs.max(max_diff(&b.hcs_t(wt), &closed_form::hcs_t(wt)));
    }
    errs.push(("T^-1 H Cc T", cc));
    errs.push(("T^-1 H Cs T", cs));
    // Cs = -(1/wm) dCc/dt by complex-step differentiation in t
    let wm = 2.0 * PI * 1e8;
    let h = 1e-20;
    let mut deriv: f64 = 0.0;
    for i in 0..16 {
        let t = i as f64 / 16.0 / 1e8;
        for n in 0..3 {
            let arg = Complex64::new(wm * t + n as f64 * 2.0 * FRAC_PI_3, wm * h);
            let dcc = arg.cos().im / h;
            let sin = b.cs(wm * t)[(n, n)].re;
            deriv = deriv.max((-dcc / wm - sin).abs());
        }
    }
    errs.push(("Cs = -Cc'/wm", deriv));
    let worst = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    Outcome {
        pass: worst <= 1e-12,
        detail: errs.iter().map(|(n, e)| format!("{n} {e:.0e}")).collect::<Vec<_>>().join(", "),
    }
}

fn criterion_8() -> Outcome {
    let (cp, mp) = reference_design().unwrap();
    let w = reference_omega_rf();
    let cfg = SteadyConfig::default();
    let mut checks: Vec<(&str, f64, f64)> = Vec::new();

    let still = mp.with_dc_ratio(0.0);
    let (sp, _) = sparams_td(Topology::DiffVoltage, ElastanceModel::Exact, &cp, &still, &[0.97 * w], &cfg).unwrap();
    checks.push(("reciprocity", sp.asymmetry(), 1e-9));

    let (sp, _) = sparams_td(Topology::DiffVoltage, ElastanceModel::Exact, &cp, &mp, &[0.97 * w], &cfg).unwrap();
    let s = sp.at(0);
    let mut rot: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            rot = rot.max((s[((i + 1) % 3, (j + 1) % 3)] - s[(i, j)]).norm());
        }
    }
    checks.push(("threefold symmetry", rot, 1e-9));

    let grid = local_grid(w, 41, 0.1).unwrap();
    let fwd = vm_sparams(&grid, &cp, &mp).unwrap();
    let rev = vm_sparams(&grid, &cp, &mp.with_direction(Direction::Counterclockwise)).unwrap();
    checks.push(("reversal transposes", rev.max_abs_diff(&fwd.transpose()), 1e-12));

    let se = assemble(Topology::SeDelta, &cp, &mp, 1).unwrap();
    let theta = 0.7;
    let shifted = assemble(Topology::SeDelta, &cp, &mp.with_theta(theta), 1).unwrap();
    let (a, b) = (port_spectrum(&se, w, 1.0).unwrap(), port_spectrum(&shifted, w, 1.0).unwrap());
    let mut law: f64 = 0.0;
    for p in 1..=3 {
        law = law.max((b.bin(p, 0) - a.bin(p, 0)).norm());
        for k in [-1i64, 1] {
            law = law.max((b.bin(p, k) - a.bin(p, k) * Complex64::from_polar(1.0, k as f64 * theta)).norm());
        }
    }
    checks.push(("IM phase law", law, 1e-6));

    let mut inphase: f64 = 0.0;
    for t in Topology::all() {
        let m = assemble_with(t, &cp, &mp, 2, elastance_for(t)).unwrap();
        let wf = steady_state(&m, 1.03 * w, 1.0).unwrap();
        inphase = inphase.max(inphase_residual(&m, &wf).into_iter().fold(0.0, f64::max));
    }
    checks.push(("in-phase residual", inphase, 1e-8));

    let lossless = cp.with_q0(f64::INFINITY);
    let (sp, _) = sparams_td(Topology::DiffVoltage, ElastanceModel::Exact, &lossless, &mp, &[0.96 * w, w, 1.04 * w], &cfg).unwrap();
    checks.push(("lossless unitarity", sp.unitarity_error(), 1e-6));

    let m = assemble(Topology::DiffVoltage, &cp, &mp, 1).unwrap();
    let wf = steady_state(&m, 1.02 * w, 1.0).unwrap();
    checks.push(("power balance", power_balance(&m, &wf).relative_error(), 1e-8));

    let mut comp: f64 = 0.0;
    for (port, wr) in [(1, w), (2, 0.95 * w), (3, 1.07 * w)] {
        let diff = assemble(Topology::DiffVoltage, &cp, &mp, port).unwrap();
        let sp = port_spectrum(&diff, wr, 1.0).unwrap();
        let up = assemble(Topology::SeDelta, &cp, &mp, port).unwrap();
        let lo = up.with_junction_phase_offset(0, PI);
        let c = compose_differential(&up, &lo, sp.snap.omega, COMPOSE_KMAX).unwrap();
        comp = comp.max(max_wave_difference(&c, &sp));
    }
    checks.push(("SE composition", comp, 1e-9));

    Outcome {
        pass: checks.iter().all(|c| c.1 <= c.2),
        detail: checks.iter().map(|(n, v, t)| format!("{n} {v:.1e} (<= {t:.0e})")).collect::<Vec<_>>().join(", "),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("1 reference response", criterion_1, Duration::from_secs(1)),
        ("2 single-ended contrast", criterion_2, Duration::from_secs(120)),
        ("3 pseudo-LTI", criterion_3, Duration::from_secs(600)),
        ("4 single-ended IM level", criterion_4, Duration::MAX),
        ("5 oracle equivalence", criterion_5, Duration::MAX),
        ("6 isolation solver", criterion_6, Duration::MAX),
        ("7 basis identities", criterion_7, Duration::MAX),
        ("8 invariant suite", criterion_8, Duration::MAX),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let t = Instant::now();
        let out = run();
        let dt = t.elapsed();
        let pass = out.pass && dt <= budget;
        if !pass {
            failed += 1;
        }
        let limit = if budget == Duration::MAX { String::new() } else { format!(", limit {budget:?}") };
        println!(
            "{} criterion {name}: {} [{:.2?}{limit}]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            dt
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
