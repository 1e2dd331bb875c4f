//! Pseudo-spectral simulation and numerical analysis of magnetic relaxation
//! equations on the flat torus.

pub mod analysis;
pub mod cli;
pub mod io;
pub mod lagrangian;
pub mod oracle;
pub mod relaxation;
pub mod solver;
pub mod spectral;
