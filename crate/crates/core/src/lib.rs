//! Spectra of a single cavity mode coupled to one spin of a spin-½ XY chain.
//!
//! * [`operators`]: 2×2 generators and their Kronecker embedding.
//! * [`model`]: Hamiltonian assembly for open and closed chains, plus the
//!   total-S_z and excitation-number observables.
//! * [`spectral`]: real-symmetric eigensolver and degeneracy clustering.
//! * [`analytic`]: closed-form four-spin spectra and factored
//!   characteristic polynomials.
//! * [`exactpoly`]: exact rational characteristic polynomials and
//!   certification of the factored forms.
//! * [`sweep`]: the polar sweep G = C cos φ, J = C sin φ and its csv / json /
//!   gnuplot output.
//! * [`verify`]: the self-check suite behind `jcxy verify`.

pub mod analytic;
pub mod exactpoly;
pub mod model;
pub mod operators;
pub mod spectral;
pub mod sweep;
pub mod verify;

pub use model::{build_hamiltonian, Chain, ModelConfig, Topology};
pub use spectral::{spectrum_of, Level, Spectrum, Tolerances};
