//! Optical deflection of laser-prealigned linear molecules.
//!
//! The library covers four connected pieces of physics:
//!
//! * [`quantum`] — rotational wavepackets kicked by an impulsive alignment
//!   pulse and the resulting discrete distribution of the time-averaged
//!   alignment factor A_{J,m};
//! * [`classical`] — the rigid-rotor Monte Carlo counterpart with the
//!   closed-form free solution, analytic rainbow laws and strong-kick
//!   asymptotics;
//! * [`strongfield`] — adiabatic-invariant dynamics when the deflecting
//!   field itself distorts the rotation (root bifurcation of g(u),
//!   rotational trapping);
//! * [`deflection`] — mapping alignment onto deflection velocities and
//!   angles for a Gaussian beam, in both the weak-field affine law and the
//!   strong-field trajectory integral.
//!
//! Everything downstream of a seed is deterministic: ensembles draw from
//! counter-derived RNG substreams, so any thread count reproduces the same
//! samples.

pub mod classical;
pub mod constants;
pub mod deflection;
pub mod error;
pub mod histogram;
pub mod pulse;
pub mod quadrature;
pub mod quantum;
pub mod rng;
pub mod species;
pub mod strongfield;
pub mod thermal;

pub use error::{Error, Result};
pub use pulse::{KickAxis, KickPulse};
pub use rng::RngSpec;
pub use species::{JParity, MolecularSpecies};
pub use thermal::ThermalSpec;
