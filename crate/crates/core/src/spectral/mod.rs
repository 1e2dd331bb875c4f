//! Fourier representation of periodic fields on the flat torus and the exact
//! spectral operators used by the solver.

pub mod fft;
mod field;
mod grid;
pub mod ops;

pub use field::{SpectralError, SpectralScalar, SpectralVector};
pub use grid::{Grid, GridError, MAX_DIM};
pub use ops::{
    curl, curl_2d, curl_3d, dealiased_product, derivative, divergence, fractional_laplacian,
    fractional_laplacian_vector, gradient, inverse_laplacian, leray_project, tensor_divergence,
    Curl,
};
