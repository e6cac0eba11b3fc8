//! Independent time-domain oracle: raw circuit ODEs, periodic steady state,
//! exact-period spectra and S-parameters. Nothing here uses the closed-form models.

pub mod checks;
pub mod compose;
pub mod ode;
pub mod spectrum;
pub mod steady;
pub mod topology;

pub use compose::{compose_differential, delta_conversion_admittance, half_circuit_prediction, max_wave_difference, se_delta_ports, HarmonicPorts, COMPOSE_KMAX};
pub use checks::{inphase_residual, mode_amplitudes, power_balance, ModeAmplitudes, PowerBalance};
pub use spectrum::{port_spectrum, port_spectrum_with, sparams_td, spectrum_of, tank_harmonics, Harmonics, PortSpectrum, TdReport, KMAX};
pub use steady::{snap, steady_state, steady_state_with, Snap, SteadyConfig, Waveforms};
pub use topology::{assemble, assemble_with, ElastanceModel, Probe, StateSpaceModel, Topology};
