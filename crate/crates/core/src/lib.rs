//! Two harmonic chains coupled through a coupling matrix K, reduced to one
//! collective coordinate X (the scaled difference of the chains' centers of
//! mass) interacting with an internal bath of relative phonons.
//!
//! The crate builds and validates the model ([`model`]), maps it onto the
//! collective-coordinate-plus-bath form ([`mapping`]), evolves X after a kick
//! ([`dynamics`]) and computes its quantum transition-strength spectra
//! ([`spectra`]).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod mapping;
pub mod model;
pub mod secular;
pub mod spectra;

pub use dynamics::{
    collective_frequency, damping_kernel, evolve_exact, fourier_solution, gamma_transform, linear_response,
    solve_volterra, underdamped_closed_form, OscillatorParams, Regime, TimeGrid, TrajectoryTable,
};
pub use error::{Error, Result, Violation};
pub use mapping::{
    caldeira_leggett_form, collective_sector_modes, decoupling_indicator, interaction_in_phonon_basis,
    point_coupling_secular, CollectiveForm, InteractionTransforms,
};
pub use model::{
    build_chain_model, build_general_model, build_next_neighbor_model, full_potential_matrix, phonon_spectrum,
    Boundary, PhononSpectrum, SystemModel,
};
pub use num_complex::Complex64;
pub use spectra::{
    convolution_power_spectrum, correlator_s, fdt_spectrum, ohmic_spectrum, sigma_comb, sigma_resolvent,
    smoothed_spectrum, strength_comb, Broadening, DeltaComb, Line, QuantumModes, SpectrumTable,
};
