//! Adaptive Dormand-Prince 5(4) integrator.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14 }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integration statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrates `x' = f(t, x)` from `t0` through every time in `stops` (increasing),
/// calling `visit(i, x)` at each stop. The step never crosses a stop, so every
/// visited state carries the full fifth-order accuracy.
pub struct Dopri5<F> {
    f: F,
    tol: Tolerance,
    n: usize,
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    xn: Vec<f64>,
    h: f64,
    pub stats: Stats,
}

impl<F: FnMut(f64, &[f64], &mut [f64])> Dopri5<F> {
    pub fn new(n: usize, f: F, tol: Tolerance, h0: f64) -> Self {
        let z = || vec![0.0; n];
        Self { f, tol, n, k: [z(), z(), z(), z(), z(), z(), z()], tmp: z(), xn: z(), h: h0, stats: Stats::default() }
    }

    pub fn integrate(&mut self, t0: f64, x: &mut [f64], stops: &[f64], mut visit: impl FnMut(usize, &[f64])) {
        assert_eq!(x.len(), self.n);
        let mut t = t0;
        (self.f)(t, x, &mut self.k[0]);
        for (i, &ts) in stops.iter().enumerate() {
            while t < ts {
                let remaining = ts - t;
                let last = self.h >= remaining * (1.0 - 1e-12);
                let h = if last { remaining } else { self.h };
                let err = self.try_step(t, x, h);
                if err <= 1.0 {
                    self.stats.accepted += 1;
                    t = if last { ts } else { t + h };
                    x.copy_from_slice(&self.xn);
                    // first-same-as-last
                    self.k.swap(0, 6);
                    let hn = adapt(h, err);
                    // a step clipped at a stop says little about the natural step size
                    self.h = if last { self.h.max(hn) } else { hn };
                } else {
                    self.stats.rejected += 1;
                    self.h = adapt(h, err);
                }
                assert!(self.h > 0.0 && self.h.is_finite(), "step size collapsed at t = {t}");
            }
            visit(i, x);
        }
    }

    fn try_step(&mut self, t: f64, x: &[f64], h: f64) -> f64 {
        let n = self.n;
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        let tmp = &mut self.tmp;
        for i in 0..n {
            tmp[i] = x[i] + h * A21 * k1[i];
        }
        (self.f)(t + C2 * h, tmp, k2);
        for i in 0..n {
            tmp[i] = x[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        (self.f)(t + C3 * h, tmp, k3);
        for i in 0..n {
            tmp[i] = x[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        (self.f)(t + C4 * h, tmp, k4);
        for i in 0..n {
            tmp[i] = x[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        (self.f)(t + C5 * h, tmp, k5);
        for i in 0..n {
            tmp[i] = x[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        (self.f)(t + h, tmp, k6);
        let xn = &mut self.xn;
        for i in 0..n {
            xn[i] = x[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        (self.f)(t + h, xn, k7);
        let mut acc = 0.0;
        for i in 0..n {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.tol.atol + self.tol.rtol * x[i].abs().max(xn[i].abs());
            acc += (e / sc).powi(2);
        }
        let err = (acc / n as f64).sqrt();
        if err.is_finite() {
            err
        } else {
            f64::INFINITY
        }
    }
}

fn adapt(h: f64, err: f64) -> f64 {
    let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
    h * fac
}
