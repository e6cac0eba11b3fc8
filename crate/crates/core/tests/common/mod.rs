#![allow(dead_code)]

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use stm_core::tdsim::{ElastanceModel, Topology};
use stm_core::{CircuitParams, Direction, ModulationParams};

/// One randomized oracle run.
#[derive(Debug, Clone, Copy)]
pub struct RandomRun {
    pub cp: CircuitParams,
    pub mp: ModulationParams,
    pub port: usize,
    /// Commensurate carrier, exactly `p / q * omega_m`.
    pub omega_rf: f64,
}

pub fn elastance_for(t: Topology) -> ElastanceModel {
    if t.is_delta() {
        ElastanceModel::Exact
    } else {
        ElastanceModel::FirstHarmonic
    }
}

prop_compose! {
    pub fn random_run()(
        l0 in (1e-9f64).ln()..(50e-9f64).ln(),
        f0 in 0.5e9..2.0e9f64,
        lossless in proptest::bool::weighted(0.2),
        q0 in 20.0..200.0f64,
        z0 in 25.0..100.0f64,
        ratio in 0.03..0.3f64,
        dc in 0.05..0.9f64,
        theta in 0.0..std::f64::consts::TAU,
        ccw in any::<bool>(),
        port in 1usize..=3,
        q in 1u64..=4,
        u in 0.85..1.15f64,
    ) -> RandomRun {
        let w0 = std::f64::consts::TAU * f0;
        let cp = CircuitParams::from_resonance(l0.exp(), w0, if lossless { f64::INFINITY } else { q0 }, z0).unwrap();
        let wm = ratio * w0;
        let dir = if ccw { Direction::Counterclockwise } else { Direction::Clockwise };
        let mp = ModulationParams::new(wm, dc).unwrap().with_theta(theta).with_direction(dir);
        let p = (u * w0 / wm * q as f64).round().max(1.0);
        RandomRun { cp, mp, port, omega_rf: wm * p / q as f64 }
    }
}

/// `n` deterministic samples of `strategy`, independent of test order.
pub fn samples<S: Strategy>(strategy: S, n: usize, seed: u8) -> Vec<S::Value> {
    let mut seed_bytes = [0u8; 32];
    seed_bytes[0] = seed;
    let rng = TestRng::from_seed(RngAlgorithm::ChaCha, &seed_bytes);
    let mut runner = TestRunner::new_with_rng(Config::default(), rng);
    (0..n).map(|_| strategy.new_tree(&mut runner).unwrap().current()).collect()
}
