use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparams::SParameterSet;

/// Pass limits used for the bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub ix_min_db: f64,
    pub rl_min_db: f64,
    pub il_max_db: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { ix_min_db: 20.0, rl_min_db: 20.0, il_max_db: 3.0 }
    }
}

impl Thresholds {
    pub fn passes(&self, il: f64, rl: f64, ix: f64) -> bool {
        ix >= self.ix_min_db && rl >= self.rl_min_db && il <= self.il_max_db
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub il_db: f64,
    pub rl_db: f64,
    pub ix_db: f64,
    /// Width of the passing band divided by the center frequency.
    pub bw_fractional: f64,
    /// Width of the passing band (rad/s).
    pub bw_width: f64,
    /// Set when the center frequency itself fails the thresholds.
    pub bw_undefined: bool,
    /// Center frequency (rad/s).
    pub center_frequency: f64,
    /// Grid index of the center frequency.
    pub center_index: usize,
}

/// Metrics with the center at the frequency of maximum isolation.
pub fn metrics(sp: &SParameterSet, thr: &Thresholds) -> Result<MetricSet> {
    metrics_at(sp, thr, None)
}

/// Metrics with an optional center override; the nearest grid point is used.
///
/// The bandwidth is the contiguous run of passing grid points that contains the
/// center, measured from its first to its last point.
pub fn metrics_at(sp: &SParameterSet, thr: &Thresholds, center: Option<f64>) -> Result<MetricSet> {
    if sp.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let w = sp.omega();
    let n = w.len();
    let k = match center {
        Some(c) => nearest(w, c),
        None => {
            // first index of the maximum keeps ties deterministic
            let mut best = 0;
            for i in 1..n {
                if sp.ix_db(i) > sp.ix_db(best) {
                    best = i;
                }
            }
            best
        }
    };
    let pass = |i: usize| thr.passes(sp.il_db(i), sp.rl_db(i), sp.ix_db(i));
    let (width, undefined) = if pass(k) {
        let mut lo = k;
        while lo > 0 && pass(lo - 1) {
            lo -= 1;
        }
        let mut hi = k;
        while hi + 1 < n && pass(hi + 1) {
            hi += 1;
        }
        (w[hi] - w[lo], false)
    } else {
        (0.0, true)
    };
    Ok(MetricSet {
        il_db: sp.il_db(k),
        rl_db: sp.rl_db(k),
        ix_db: sp.ix_db(k),
        bw_fractional: width / w[k],
        bw_width: width,
        bw_undefined: undefined,
        center_frequency: w[k],
        center_index: k,
    })
}

fn nearest(w: &[f64], c: f64) -> usize {
    let mut best = 0;
    for (i, &x) in w.iter().enumerate() {
        if (x - c).abs() < (w[best] - c).abs() {
            best = i;
        }
    }
    best
}
